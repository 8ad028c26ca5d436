//! Wreath products `A Wr B` (all functions) and `A wr B` (finite support) over
//! an abelian active group `B`, with elements in the normal form `b f`.
//!
//! `(b1 f1)(b2 f2) = (b1 b2)(f1^{b2} f2)` where `f^b(x) = f(b x)`.

use std::fmt;
use std::sync::Arc;

use crate::basefun::{ActiveGroup, BaseFunction, LatticePoint, WindowBox};
use crate::error::{Error, Result};
use crate::group::{commutator, iterated_commutator, Group};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WreathMode {
    /// All functions `B -> A`.
    Cartesian,
    /// Finitely supported functions only.
    Direct,
}

/// How base functions are compared.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EqualityPolicy {
    /// Full comparison; requires a finite active group or exact representations.
    Exact,
    /// Exact where decidable, otherwise agreement on the box.
    Window(WindowBox),
}

pub struct WreathElement<G: Group> {
    active: LatticePoint,
    base: BaseFunction<G>,
}

impl<G: Group> Clone for WreathElement<G> {
    fn clone(&self) -> Self {
        Self {
            active: self.active.clone(),
            base: self.base.clone(),
        }
    }
}

impl<G: Group> fmt::Debug for WreathElement<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WreathElement({} | {:?})", self.active, self.base)
    }
}

impl<G: Group> WreathElement<G> {
    pub fn active(&self) -> &LatticePoint {
        &self.active
    }

    pub fn base(&self) -> &BaseFunction<G> {
        &self.base
    }
}

pub struct WreathGroup<G: Group> {
    passive: Arc<G>,
    active: ActiveGroup,
    mode: WreathMode,
    policy: EqualityPolicy,
}

impl<G: Group> WreathGroup<G> {
    pub fn new(passive: Arc<G>, active: ActiveGroup, mode: WreathMode, policy: EqualityPolicy) -> Result<Self> {
        if let EqualityPolicy::Window(w) = &policy {
            if w.rank() != active.rank() {
                return Err(Error::DimensionMismatch(format!(
                    "window of rank {} for {active}",
                    w.rank()
                )));
            }
        }
        if policy == EqualityPolicy::Exact && !active.is_finite() && mode == WreathMode::Cartesian {
            return Err(Error::Invalid(
                "exact equality in a Cartesian wreath product needs a finite active group".into(),
            ));
        }
        Ok(Self {
            passive,
            active,
            mode,
            policy,
        })
    }

    pub fn passive(&self) -> &Arc<G> {
        &self.passive
    }

    pub fn active_group(&self) -> &ActiveGroup {
        &self.active
    }

    pub fn mode(&self) -> WreathMode {
        self.mode
    }

    pub fn policy(&self) -> &EqualityPolicy {
        &self.policy
    }

    /// `b f`, checked against the group.
    pub fn element(&self, active: &[i64], base: BaseFunction<G>) -> Result<WreathElement<G>> {
        let active = self.active.point(active)?;
        if base.domain() != &self.active {
            return Err(Error::DimensionMismatch(format!(
                "base over {} in a wreath product over {}",
                base.domain(),
                self.active
            )));
        }
        if !Arc::ptr_eq(base.target(), &self.passive) {
            return Err(Error::TargetMismatch);
        }
        if self.mode == WreathMode::Direct && !base.has_finite_support() {
            return Err(Error::Invalid(
                "direct wreath product elements need finitely supported bases".into(),
            ));
        }
        Ok(WreathElement { active, base })
    }

    /// The pure active element `b`.
    pub fn active_element(&self, coords: &[i64]) -> Result<WreathElement<G>> {
        let base = BaseFunction::identity(self.passive.clone(), self.active.clone());
        self.element(coords, base)
    }

    /// Generator of one active axis.
    pub fn axis_generator(&self, axis: usize) -> Result<WreathElement<G>> {
        self.active.check_axis(axis)?;
        let base = BaseFunction::identity(self.passive.clone(), self.active.clone());
        Ok(WreathElement {
            active: self.active.unit(axis),
            base,
        })
    }

    /// The pure base element `f`.
    pub fn base_element(&self, f: BaseFunction<G>) -> Result<WreathElement<G>> {
        let origin = vec![0; self.active.rank()];
        self.element(&origin, f)
    }

    pub fn wreath_mul(&self, x: &WreathElement<G>, y: &WreathElement<G>) -> WreathElement<G> {
        WreathElement {
            active: self.active.add(&x.active, &y.active),
            base: x.base.shift(&y.active).mul(&y.base),
        }
    }

    pub fn wreath_inv(&self, x: &WreathElement<G>) -> WreathElement<G> {
        let back = self.active.neg(&x.active);
        WreathElement {
            base: x.base.pointwise_inv().shift(&back),
            active: back,
        }
    }

    pub fn wreath_commutator(&self, x: &WreathElement<G>, y: &WreathElement<G>) -> WreathElement<G> {
        commutator(self, x, y)
    }

    pub fn wreath_iterated_commutator(
        &self,
        x: &WreathElement<G>,
        y: &WreathElement<G>,
        k: usize,
    ) -> Result<WreathElement<G>> {
        iterated_commutator(self, x, y, k)
    }

    pub fn is_base(&self, x: &WreathElement<G>) -> bool {
        self.active.is_origin(&x.active)
    }

    /// `h(1)` for a pure base element `h`.
    pub fn project_at_identity(&self, x: &WreathElement<G>) -> Result<G::Elem> {
        if !self.is_base(x) {
            return Err(Error::NotBase);
        }
        Ok(x.base.eval(&self.active.origin()))
    }

    /// Axis-0 coordinates where the base is not identically trivial; windowed for lazy bases.
    pub fn base_support_slices(&self, x: &WreathElement<G>) -> Vec<i64> {
        x.base.support_slices(&self.window())
    }

    /// The comparison window: the policy's box, or the whole group when finite.
    pub fn window(&self) -> WindowBox {
        match &self.policy {
            EqualityPolicy::Window(w) => w.clone(),
            EqualityPolicy::Exact => WindowBox::around(&self.active, 0),
        }
    }

    /// First base point (in window order) where two elements with equal active parts differ.
    pub fn first_difference(&self, x: &WreathElement<G>, y: &WreathElement<G>) -> Option<LatticePoint> {
        if x.active != y.active {
            return Some(self.active.origin());
        }
        match x.base.exact_eq(&y.base) {
            Some(true) => None,
            Some(false) if self.active.is_finite() => x.base.first_difference_on(&y.base, self.active.points()),
            _ => x.base.first_difference(&y.base, &self.window()),
        }
    }
}

impl<G: Group> Group for WreathGroup<G> {
    type Elem = WreathElement<G>;

    fn identity(&self) -> WreathElement<G> {
        WreathElement {
            active: self.active.origin(),
            base: BaseFunction::identity(self.passive.clone(), self.active.clone()),
        }
    }

    fn mul(&self, a: &WreathElement<G>, b: &WreathElement<G>) -> WreathElement<G> {
        self.wreath_mul(a, b)
    }

    fn inv(&self, a: &WreathElement<G>) -> WreathElement<G> {
        self.wreath_inv(a)
    }

    fn elem_eq(&self, a: &WreathElement<G>, b: &WreathElement<G>) -> bool {
        if a.active != b.active {
            return false;
        }
        match (&self.policy, a.base.exact_eq(&b.base)) {
            (_, Some(eq)) => eq,
            (EqualityPolicy::Window(w), None) => a.base.window_equal(&b.base, w),
            (EqualityPolicy::Exact, None) => {
                panic!("undecidable exact comparison of lazy bases over {}", self.active)
            }
        }
    }

    fn render(&self, a: &WreathElement<G>) -> String {
        format!("{} | {} base", a.active, a.base.representation())
    }
}
