//! Functions from an abelian active group into a target group, and the
//! discrete calculus on them.
//!
//! Representations are exact (dense tables over finite domains, finite sparse
//! maps, one-dimensional step functions, constants, slice maps along axis 0) or
//! lazy expression trees. Exact representations compare exactly; lazy ones over
//! infinite domains are compared on a [`WindowBox`].

mod calculus;
mod domain;
mod ops;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::group::Group;

pub use calculus::{
    binomial, discrete_derivative, discrete_integral, discrete_integral_from, finite_iterated_integral,
    grid_distinguisher, grid_distinguisher_by_integration, grid_function, integral_exponent, iterated_integral,
    periodic_descent, GridView,
};
pub use domain::{ActiveGroup, BoxIter, Component, LatticePoint, WindowBox};

/// Finite domains up to this many points are materialized as dense tables.
pub const DENSE_LIMIT: u64 = 1 << 22;

pub struct BaseFunction<G: Group> {
    target: Arc<G>,
    domain: ActiveGroup,
    repr: Repr<G>,
}

impl<G: Group> Clone for BaseFunction<G> {
    fn clone(&self) -> Self {
        Self {
            target: self.target.clone(),
            domain: self.domain.clone(),
            repr: self.repr.clone(),
        }
    }
}

pub(crate) enum Repr<G: Group> {
    Constant(G::Elem),
    Dense(Arc<[G::Elem]>),
    /// Non-identity values only.
    Sparse(Arc<BTreeMap<LatticePoint, G::Elem>>),
    /// Rank-1 free domain: `left` below `offset`, `window` from `offset`, then `right`.
    Step(Arc<Step<G::Elem>>),
    /// Slices along axis 0 keyed by coordinate; missing slices are trivial.
    Sliced(Arc<BTreeMap<i64, BaseFunction<G>>>),
    Lazy(Arc<Node<G>>),
}

impl<G: Group> Clone for Repr<G> {
    fn clone(&self) -> Self {
        match self {
            Repr::Constant(e) => Repr::Constant(e.clone()),
            Repr::Dense(v) => Repr::Dense(v.clone()),
            Repr::Sparse(m) => Repr::Sparse(m.clone()),
            Repr::Step(s) => Repr::Step(s.clone()),
            Repr::Sliced(s) => Repr::Sliced(s.clone()),
            Repr::Lazy(n) => Repr::Lazy(n.clone()),
        }
    }
}

pub(crate) struct Step<E> {
    pub left: E,
    pub offset: i64,
    pub window: Vec<E>,
    pub right: E,
}

pub(crate) enum Node<G: Group> {
    Shift(BaseFunction<G>, LatticePoint),
    Mul(BaseFunction<G>, BaseFunction<G>),
    Inv(BaseFunction<G>),
    /// Solution of `x(p)^-1 x(p + e_axis) = integrand(p)` with `x = start` on the
    /// hyperplane `p[axis] = 0`; `start` lives on the domain without `axis`.
    Integral {
        integrand: BaseFunction<G>,
        start: BaseFunction<G>,
        axis: usize,
        memo: Mutex<HashMap<LatticePoint, G::Elem>>,
    },
    /// `base^(prod_a E_{k_a}(p[a]))` with `E_k(y) = sum_{r <= k} C(y, r)`.
    Power {
        base: G::Elem,
        order: Option<u64>,
        degrees: SmallVec<[(usize, u32); 3]>,
    },
    /// Pullback of a function on a finite domain along coordinate reduction.
    Lift(BaseFunction<G>),
    /// Restriction to the hyperplane `p[axis] = coord`.
    Restrict {
        inner: BaseFunction<G>,
        axis: usize,
        coord: i64,
    },
}

impl<G: Group> BaseFunction<G> {
    pub(crate) fn from_repr(target: Arc<G>, domain: ActiveGroup, repr: Repr<G>) -> Self {
        Self { target, domain, repr }
    }

    pub(crate) fn repr(&self) -> &Repr<G> {
        &self.repr
    }

    /// The trivial function.
    pub fn identity(target: Arc<G>, domain: ActiveGroup) -> Self {
        Self::from_repr(target, domain, Repr::Sparse(Arc::new(BTreeMap::new())))
    }

    /// `u^(0)`.
    pub fn constant(target: Arc<G>, domain: ActiveGroup, value: G::Elem) -> Self {
        if target.is_identity(&value) {
            return Self::identity(target, domain);
        }
        Self::from_repr(target, domain, Repr::Constant(value))
    }

    /// Finite support map; identity values are dropped.
    pub fn sparse(
        target: Arc<G>,
        domain: ActiveGroup,
        entries: impl IntoIterator<Item = (LatticePoint, G::Elem)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (p, e) in entries {
            let p = domain.point(&p)?;
            if !target.is_identity(&e) {
                map.insert(p, e);
            } else {
                map.remove(&p);
            }
        }
        Ok(Self::from_repr(target, domain, Repr::Sparse(Arc::new(map))))
    }

    /// `{p -> value}`.
    pub fn delta(target: Arc<G>, domain: ActiveGroup, p: &[i64], value: G::Elem) -> Result<Self> {
        let p = domain.point(p)?;
        Self::sparse(target, domain, [(p, value)])
    }

    /// Full value table over a finite domain in index order.
    pub fn dense(target: Arc<G>, domain: ActiveGroup, values: Vec<G::Elem>) -> Result<Self> {
        let Some(n) = domain.size() else {
            return Err(Error::DimensionMismatch(format!(
                "dense function over infinite {domain}"
            )));
        };
        if values.len() as u64 != n {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {n} points of {domain}",
                values.len()
            )));
        }
        Ok(Self::from_repr(target, domain, Repr::Dense(values.into())))
    }

    /// Tabulates `f` over a finite domain.
    pub fn from_fn(target: Arc<G>, domain: ActiveGroup, f: impl Fn(&LatticePoint) -> G::Elem) -> Result<Self> {
        if domain.size().is_none() {
            return Err(Error::DimensionMismatch(format!("from_fn over infinite {domain}")));
        }
        let values: Vec<_> = domain.points().map(|p| f(&p)).collect();
        Self::dense(target, domain, values)
    }

    /// `p -> f(p mod n)`: a function on a finite domain viewed as a periodic
    /// function on the free lattice of the same rank.
    pub fn periodic_lift(&self) -> Result<Self> {
        if !self.domain.is_finite() {
            return Err(Error::DimensionMismatch(format!("lift from infinite {}", self.domain)));
        }
        Ok(Self::from_repr(
            self.target.clone(),
            ActiveGroup::free(self.domain.rank()),
            Repr::Lazy(Arc::new(Node::Lift(self.clone()))),
        ))
    }

    /// Assembles a function from its slices along axis 0.
    pub fn sliced(
        target: Arc<G>,
        domain: ActiveGroup,
        slices: impl IntoIterator<Item = (i64, BaseFunction<G>)>,
    ) -> Result<Self> {
        if domain.rank() < 2 {
            return Err(Error::DimensionMismatch("sliced functions need rank >= 2".into()));
        }
        let tail = domain.without_axis(0);
        let mut map = BTreeMap::new();
        for (k, f) in slices {
            if f.domain != tail {
                return Err(Error::DimensionMismatch(format!(
                    "slice over {} inside {domain}",
                    f.domain
                )));
            }
            if !Arc::ptr_eq(&f.target, &target) {
                return Err(Error::TargetMismatch);
            }
            let key = domain.point(&[&[k][..], &vec![0; tail.rank()]].concat())?[0];
            if !f.is_trivially_identity() {
                map.insert(key, f);
            }
        }
        Ok(Self::from_repr(target, domain, Repr::Sliced(Arc::new(map))))
    }

    pub fn target(&self) -> &Arc<G> {
        &self.target
    }

    pub fn domain(&self) -> &ActiveGroup {
        &self.domain
    }

    /// Kind tag of the current representation.
    pub fn representation(&self) -> &'static str {
        match &self.repr {
            Repr::Constant(_) => "constant",
            Repr::Dense(_) => "dense",
            Repr::Sparse(_) => "sparse",
            Repr::Step(_) => "eventually-constant",
            Repr::Sliced(_) => "sliced",
            Repr::Lazy(_) => "lazy",
        }
    }

    /// True when equality with another exact function is decidable without a window.
    pub fn is_exact(&self) -> bool {
        match &self.repr {
            Repr::Lazy(_) => self.domain.is_finite(),
            Repr::Sliced(s) => self.domain.is_finite() || s.values().all(|f| f.is_exact()),
            _ => true,
        }
    }

    /// Whether the function is known to be nontrivial at finitely many points only.
    pub fn has_finite_support(&self) -> bool {
        if self.domain.is_finite() {
            return true;
        }
        match &self.repr {
            Repr::Sparse(_) => true,
            Repr::Constant(e) => self.target.is_identity(e),
            Repr::Step(s) => self.target.is_identity(&s.left) && self.target.is_identity(&s.right),
            Repr::Sliced(s) => s.values().all(|f| f.has_finite_support()),
            _ => false,
        }
    }

    /// Cheap syntactic test for the trivial function.
    pub(crate) fn is_trivially_identity(&self) -> bool {
        match &self.repr {
            Repr::Sparse(m) => m.is_empty(),
            Repr::Constant(e) => self.target.is_identity(e),
            Repr::Sliced(s) => s.is_empty(),
            _ => false,
        }
    }

    /// Value at a point given by raw coordinates.
    pub fn try_eval(&self, coords: &[i64]) -> Result<G::Elem> {
        let p = self.domain.point(coords)?;
        Ok(self.eval(&p))
    }

    /// Value at a canonical point of the domain.
    pub fn eval(&self, p: &LatticePoint) -> G::Elem {
        debug_assert_eq!(p.len(), self.domain.rank());
        match &self.repr {
            Repr::Constant(e) => e.clone(),
            Repr::Dense(v) => v[self.domain.index(p)].clone(),
            Repr::Sparse(m) => m.get(p).cloned().unwrap_or_else(|| self.target.identity()),
            Repr::Step(s) => {
                let x = p[0];
                if x < s.offset {
                    s.left.clone()
                } else if x >= s.offset + s.window.len() as i64 {
                    s.right.clone()
                } else {
                    s.window[(x - s.offset) as usize].clone()
                }
            }
            Repr::Sliced(s) => match s.get(&p[0]) {
                Some(f) => f.eval(&self.domain.project_out(p, 0)),
                None => self.target.identity(),
            },
            Repr::Lazy(n) => self.eval_node(n, p),
        }
    }

    fn eval_node(&self, node: &Node<G>, p: &LatticePoint) -> G::Elem {
        match node {
            Node::Shift(f, b) => f.eval(&self.domain.add(p, b)),
            Node::Mul(f, g) => self.target.mul(&f.eval(p), &g.eval(p)),
            Node::Inv(f) => self.target.inv(&f.eval(p)),
            Node::Integral {
                integrand,
                start,
                axis,
                memo,
            } => calculus::eval_integral(self, integrand, start, *axis, memo, p),
            Node::Power { base, order, degrees } => {
                let e = calculus::power_exponent(degrees, p, *order);
                self.target.pow(base, e)
            }
            Node::Lift(inner) => inner.eval(&inner.domain.point(p).expect("rank checked at lift")),
            Node::Restrict { inner, axis, coord } => inner.eval(&inner.domain.insert_coord(p, *axis, *coord)),
        }
    }

    /// Dense copy over a finite domain; other functions are returned unchanged.
    pub fn materialize(&self) -> Self {
        match (&self.repr, self.domain.size()) {
            (Repr::Dense(_), _) => self.clone(),
            (_, Some(n)) if n <= DENSE_LIMIT => {
                let values: Vec<_> = self.domain.points().map(|p| self.eval(&p)).collect();
                Self::from_repr(self.target.clone(), self.domain.clone(), Repr::Dense(values.into()))
            }
            _ => self.clone(),
        }
    }

    /// Exact equality when decidable from the representations, `None` otherwise.
    pub fn exact_eq(&self, other: &Self) -> Option<bool> {
        if self.domain != other.domain {
            return Some(false);
        }
        let t = &self.target;
        match (&self.repr, &other.repr) {
            (Repr::Constant(a), Repr::Constant(b)) => return Some(t.elem_eq(a, b)),
            (Repr::Sparse(a), Repr::Sparse(b)) => {
                return Some(
                    a.len() == b.len() && a.iter().zip(b.iter()).all(|((p, x), (q, y))| p == q && t.elem_eq(x, y)),
                )
            }
            (Repr::Sliced(_), Repr::Sliced(_) | Repr::Sparse(_)) | (Repr::Sparse(_), Repr::Sliced(_)) => {
                let (a, b) = (self.slices()?, other.slices()?);
                let id = Self::identity(t.clone(), self.domain.without_axis(0));
                let mut all = true;
                for k in a.keys().chain(b.keys()) {
                    let x = a.get(k).unwrap_or(&id);
                    let y = b.get(k).unwrap_or(&id);
                    match x.exact_eq(y) {
                        Some(true) => {}
                        Some(false) => return Some(false),
                        None => all = false,
                    }
                }
                if all {
                    return Some(true);
                }
            }
            _ => {}
        }
        if self.domain.is_finite() {
            return Some(self.first_difference_on(other, self.domain.points()).is_none());
        }
        if self.domain.rank() == 1 {
            if let (Some(a), Some(b)) = (self.as_step(), other.as_step()) {
                return Some(ops::step_eq(t.as_ref(), &a, &b));
            }
        }
        match (&self.repr, &other.repr) {
            (Repr::Constant(c), Repr::Sparse(m)) | (Repr::Sparse(m), Repr::Constant(c)) => {
                // a nonempty finite support cannot be constant on an infinite domain
                Some(m.is_empty() && t.is_identity(c))
            }
            _ => None,
        }
    }

    /// Step form of an exact rank-1 function, if it has one.
    pub(crate) fn as_step(&self) -> Option<Step<G::Elem>> {
        if self.domain.rank() != 1 || self.domain.is_finite() {
            return None;
        }
        let id = self.target.identity();
        match &self.repr {
            Repr::Step(s) => Some(Step {
                left: s.left.clone(),
                offset: s.offset,
                window: s.window.clone(),
                right: s.right.clone(),
            }),
            Repr::Constant(c) => Some(Step {
                left: c.clone(),
                offset: 0,
                window: vec![],
                right: c.clone(),
            }),
            Repr::Sparse(m) => {
                let (Some(lo), Some(hi)) = (m.keys().next(), m.keys().next_back()) else {
                    return Some(Step {
                        left: id.clone(),
                        offset: 0,
                        window: vec![],
                        right: id,
                    });
                };
                let (lo, hi) = (lo[0], hi[0]);
                let window = (lo..=hi)
                    .map(|x| {
                        m.get(&self.domain.point(&[x]).unwrap())
                            .cloned()
                            .unwrap_or_else(|| id.clone())
                    })
                    .collect();
                Some(Step {
                    left: id.clone(),
                    offset: lo,
                    window,
                    right: id,
                })
            }
            _ => None,
        }
    }

    /// First point of `points` where the two functions differ.
    pub fn first_difference_on(
        &self,
        other: &Self,
        points: impl Iterator<Item = LatticePoint>,
    ) -> Option<LatticePoint> {
        let mut points = points;
        points.find(|p| !self.target.elem_eq(&self.eval(p), &other.eval(p)))
    }

    /// First point of the box (in enumeration order) where the functions differ.
    pub fn first_difference(&self, other: &Self, window: &WindowBox) -> Option<LatticePoint> {
        if self.exact_eq(other) == Some(true) {
            return None;
        }
        let dom = &self.domain;
        self.first_difference_on(other, window.points().map(|p| dom.point(&p).unwrap()))
    }

    /// Agreement on every point of the box.
    pub fn window_equal(&self, other: &Self, window: &WindowBox) -> bool {
        self.domain == other.domain && self.first_difference(other, window).is_none()
    }

    /// Exact equality on finite domains or exact representations, window equality otherwise.
    pub fn agrees_with(&self, other: &Self, window: &WindowBox) -> bool {
        match self.exact_eq(other) {
            Some(b) => b,
            None => self.window_equal(other, window),
        }
    }

    /// Axis-0 coordinates of the box on which the function is not identically trivial.
    pub fn support_slices(&self, window: &WindowBox) -> Vec<i64> {
        if let Repr::Sliced(s) = &self.repr {
            if self.domain.is_finite() || s.values().all(|f| f.is_exact()) {
                return s
                    .iter()
                    .filter(|(_, f)| {
                        let id = Self::identity(self.target.clone(), f.domain.clone());
                        f.exact_eq(&id) == Some(false)
                    })
                    .map(|(k, _)| *k)
                    .collect();
            }
        }
        if let Repr::Sparse(m) = &self.repr {
            let mut keys: Vec<i64> = m.keys().map(|p| p[0]).collect();
            keys.dedup();
            return keys;
        }
        let mut out = Vec::new();
        let (lo, hi) = window.bounds()[0];
        let rest = window.without_axis(0);
        for k in lo..=hi {
            let nontrivial = rest.points().any(|q| {
                let p = self.domain.insert_coord(&q, 0, k);
                !self.target.is_identity(&self.eval(&p))
            });
            if nontrivial {
                out.push(self.domain.point(&[&[k][..], &vec![0; rest.rank()]].concat()).unwrap()[0]);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// One `coords -> element` line per point of the box.
    pub fn dump(&self, window: &WindowBox) -> String {
        let mut out = String::new();
        for p in window.points() {
            let q = self.domain.point(&p).expect("window rank matches domain");
            let _ = writeln!(out, "{p} -> {}", self.target.render(&self.eval(&q)));
        }
        out
    }
}

impl<G: Group> std::fmt::Debug for BaseFunction<G> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BaseFunction<{} over {}>", self.representation(), self.domain)
    }
}

/// Free-function form of [`BaseFunction::window_equal`].
pub fn window_equal<G: Group>(f: &BaseFunction<G>, g: &BaseFunction<G>, window: &WindowBox) -> bool {
    f.window_equal(g, window)
}

fn check_same<G: Group>(f: &BaseFunction<G>, g: &BaseFunction<G>) -> Result<()> {
    if f.domain != g.domain {
        return Err(Error::DimensionMismatch(format!("{} vs {}", f.domain, g.domain)));
    }
    if !Arc::ptr_eq(&f.target, &g.target) {
        return Err(Error::TargetMismatch);
    }
    Ok(())
}
