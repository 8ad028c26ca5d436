use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use smallvec::SmallVec;

use super::{ActiveGroup, BaseFunction, Component, LatticePoint, Node, Repr, Step, DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::group::{order_by_powers, Group};

/// Bound used when an element order has to be found by repeated multiplication.
const ORDER_SEARCH_BOUND: u64 = 1 << 20;

/// `C(y, r)` for any integer `y`.
pub fn binomial(y: i64, r: u32) -> i128 {
    let mut c: i128 = 1;
    for j in 0..r as i128 {
        c = c
            .checked_mul(y as i128 - j)
            .expect("binomial coefficient overflows i128")
            / (j + 1);
    }
    c
}

/// `E_k(y) = sum_{r=0}^{k} C(y, r)`: the exponent of `u` in `u^(k)(b^y)`.
pub fn integral_exponent(k: u32, y: i64) -> i128 {
    (0..=k).map(|r| binomial(y, r)).sum()
}

pub(super) fn power_exponent(degrees: &[(usize, u32)], p: &LatticePoint, order: Option<u64>) -> i64 {
    let mut e: i128 = 1;
    for &(axis, k) in degrees {
        e = e
            .checked_mul(integral_exponent(k, p[axis]))
            .expect("exponent overflows i128");
        if let Some(l) = order {
            e = e.rem_euclid(l as i128);
        }
    }
    match order {
        Some(l) => e.rem_euclid(l as i128) as i64,
        None => i64::try_from(e).expect("exponent exceeds i64 for an element of infinite order"),
    }
}

/// `x(p)^-1 x(p + e_axis)`, the base part of `[x, b_axis]`.
pub fn discrete_derivative<G: Group>(f: &BaseFunction<G>, axis: usize) -> Result<BaseFunction<G>> {
    f.domain.check_axis(axis)?;
    let e = f.domain.unit(axis);
    Ok(f.pointwise_inv().mul(&f.shift(&e)))
}

/// The unique `x` with derivative `d` along `axis` and `x = start` where `p[axis] = 0`.
pub fn discrete_integral<G: Group>(d: &BaseFunction<G>, start: G::Elem, axis: usize) -> Result<BaseFunction<G>> {
    d.domain.check_axis(axis)?;
    let start = BaseFunction::constant(d.target.clone(), d.domain.without_axis(axis), start);
    discrete_integral_from(d, &start, axis)
}

/// As [`discrete_integral`], with start values varying over the hyperplane `p[axis] = 0`.
///
/// Along a cyclic axis the line products must close up; otherwise the
/// integral does not exist on the finite domain.
pub fn discrete_integral_from<G: Group>(
    d: &BaseFunction<G>,
    start: &BaseFunction<G>,
    axis: usize,
) -> Result<BaseFunction<G>> {
    let dom = &d.domain;
    dom.check_axis(axis)?;
    if start.domain != dom.without_axis(axis) {
        return Err(Error::DimensionMismatch(format!(
            "start values over {} for integration along axis {axis} of {dom}",
            start.domain
        )));
    }
    if !Arc::ptr_eq(&d.target, &start.target) {
        return Err(Error::TargetMismatch);
    }
    let t = d.target.clone();
    if let Component::Cyclic(n) = dom.component(axis) {
        if !dom.is_finite() {
            return Err(Error::Invalid(
                "integration along a cyclic axis needs a finite domain".into(),
            ));
        }
        let mut values = vec![t.identity(); dom.size().unwrap() as usize];
        for q in start.domain.points() {
            let first = start.eval(&q);
            let mut x = first.clone();
            for k in 0..n as i64 {
                let p = dom.insert_coord(&q, axis, k);
                values[dom.index(&p)] = x.clone();
                x = t.mul(&x, &d.eval(&p));
            }
            if !t.elem_eq(&x, &first) {
                return Err(Error::IntegralNotClosed(format!(
                    "line through {} has product {} over Z_{n}",
                    dom.insert_coord(&q, axis, 0),
                    t.render(&t.mul(&t.inv(&first), &x))
                )));
            }
        }
        return BaseFunction::dense(t, dom.clone(), values);
    }
    if dom.rank() == 1 {
        if let (Some(s), Repr::Constant(_) | Repr::Sparse(_)) = (d.as_step(), start.repr()) {
            if t.is_identity(&s.left) && t.is_identity(&s.right) {
                let x0 = start.eval(&start.domain.origin());
                let lo = s.offset.min(0);
                let hi = (s.offset + s.window.len() as i64).max(0);
                let mut window = Vec::with_capacity((hi - lo + 1) as usize);
                // walk down from 0 to lo, then up to hi
                let mut below = Vec::new();
                let mut x = x0.clone();
                for k in (lo..0).rev() {
                    x = t.mul(&x, &t.inv(&d.eval(&dom.point(&[k]).unwrap())));
                    below.push(x.clone());
                }
                window.extend(below.into_iter().rev());
                let mut x = x0;
                window.push(x.clone());
                for k in 0..hi {
                    x = t.mul(&x, &d.eval(&dom.point(&[k]).unwrap()));
                    window.push(x.clone());
                }
                let left = window[0].clone();
                let right = window[window.len() - 1].clone();
                return Ok(BaseFunction::from_repr(
                    t,
                    dom.clone(),
                    Repr::Step(Arc::new(Step {
                        left,
                        offset: lo,
                        window,
                        right,
                    })),
                ));
            }
        }
    }
    Ok(BaseFunction::from_repr(
        t,
        dom.clone(),
        Repr::Lazy(Arc::new(Node::Integral {
            integrand: d.clone(),
            start: start.clone(),
            axis,
            memo: Mutex::new(HashMap::new()),
        })),
    ))
}

pub(super) fn eval_integral<G: Group>(
    owner: &BaseFunction<G>,
    integrand: &BaseFunction<G>,
    start: &BaseFunction<G>,
    axis: usize,
    memo: &Mutex<HashMap<LatticePoint, G::Elem>>,
    p: &LatticePoint,
) -> G::Elem {
    if let Some(v) = memo.lock().unwrap().get(p) {
        return v.clone();
    }
    let dom = &owner.domain;
    let t = &owner.target;
    let n = p[axis];
    let dir = n.signum();
    let mut k = n;
    let mut known = None;
    {
        let m = memo.lock().unwrap();
        while k != 0 {
            k -= dir;
            if let Some(v) = m.get(&dom.with_coord(p, axis, k)) {
                known = Some(v.clone());
                break;
            }
        }
    }
    let mut v = known.unwrap_or_else(|| start.eval(&dom.project_out(p, axis)));
    while k != n {
        if dir > 0 {
            v = t.mul(&v, &integrand.eval(&dom.with_coord(p, axis, k)));
            k += 1;
        } else {
            k -= 1;
            v = t.mul(&v, &t.inv(&integrand.eval(&dom.with_coord(p, axis, k))));
        }
        memo.lock().unwrap().insert(dom.with_coord(p, axis, k), v.clone());
    }
    v
}

/// `p -> base^(prod E_k(p[axis]))` over `domain`, materialized on finite domains.
///
/// On a cyclic axis of order `n` the exponent must be `n`-periodic modulo the
/// order of `base`; this is checked rather than assumed.
pub fn grid_function<G: Group>(
    target: Arc<G>,
    domain: ActiveGroup,
    base: G::Elem,
    degrees: &[(usize, u32)],
) -> Result<BaseFunction<G>> {
    for &(axis, _) in degrees {
        domain.check_axis(axis)?;
    }
    let degrees: SmallVec<[(usize, u32); 3]> = degrees.iter().copied().filter(|d| d.1 > 0).collect();
    if degrees.is_empty() {
        return Ok(BaseFunction::constant(target, domain, base));
    }
    let needs_order = degrees
        .iter()
        .any(|&(a, _)| matches!(domain.component(a), Component::Cyclic(_)));
    let order = if needs_order {
        match order_by_powers(target.as_ref(), &base, ORDER_SEARCH_BOUND) {
            Ok(l) => Some(l),
            Err(_) => {
                return Err(Error::NotPeriodic(
                    "element of infinite order integrated along a cyclic axis".into(),
                ))
            }
        }
    } else {
        None
    };
    for &(axis, k) in &degrees {
        if let (Component::Cyclic(n), Some(l)) = (domain.component(axis), order) {
            let n = n as i64;
            for y in 0..n {
                if (integral_exponent(k, y + n) - integral_exponent(k, y)).rem_euclid(l as i128) != 0 {
                    return Err(Error::NotPeriodic(format!(
                        "{k}-fold integral of an element of order {l} does not fold onto Z_{n}"
                    )));
                }
            }
        }
    }
    let f = BaseFunction::from_repr(
        target,
        domain,
        Repr::Lazy(Arc::new(Node::Power { base, order, degrees })),
    );
    Ok(match f.domain.size() {
        Some(n) if n <= DENSE_LIMIT => f.materialize(),
        _ => f,
    })
}

/// `u^(k)` along `axis`: `u^(0)` is constant and `u^(k)` integrates `u^(k-1)` from `u`.
pub fn iterated_integral<G: Group>(
    target: Arc<G>,
    domain: ActiveGroup,
    u: G::Elem,
    k: u32,
    axis: usize,
) -> Result<BaseFunction<G>> {
    grid_function(target, domain, u, &[(axis, k)])
}

/// `u^(k)` folded onto `Z_{l^t}` for `u` of order dividing `l`.
pub fn finite_iterated_integral<G: Group>(
    target: Arc<G>,
    u: G::Elem,
    l: u64,
    k: u32,
    t: u32,
) -> Result<BaseFunction<G>> {
    if k > t {
        return Err(Error::Invalid(format!(
            "period l^{k} does not divide l^{t}: need k <= t"
        )));
    }
    if !target.is_identity(&target.pow(&u, l as i64)) {
        return Err(Error::Invalid(format!("u^{l} is not trivial")));
    }
    let n = l
        .checked_pow(t)
        .ok_or_else(|| Error::Invalid(format!("{l}^{t} overflows")))?;
    let domain = ActiveGroup::cyclic(&[n])?;
    grid_function(target, domain, u, &[(0, k)])
}

/// Integral of an `r`-periodic `d` over `Z` with values in `gp(u)`, as a function over `Z_{lr}`.
pub fn periodic_descent<G: Group>(d: &BaseFunction<G>, r: u64, u: &G::Elem, start: G::Elem) -> Result<BaseFunction<G>> {
    let dom = &d.domain;
    if dom.rank() != 1 || dom.is_finite() {
        return Err(Error::DimensionMismatch(format!(
            "descent needs a function over Z, got {dom}"
        )));
    }
    if r == 0 {
        return Err(Error::Invalid("period must be positive".into()));
    }
    let t = d.target.clone();
    let l = order_by_powers(t.as_ref(), u, ORDER_SEARCH_BOUND)
        .map_err(|_| Error::FiniteOrdersRequired("u must have finite order".into()))?;
    let powers: Vec<G::Elem> = (0..l as i64).map(|k| t.pow(u, k)).collect();
    let n = (l * r) as i64;
    let at = |x: i64| d.eval(&dom.point(&[x]).unwrap());
    for x in 0..r as i64 {
        let v = at(x);
        if !powers.iter().any(|w| t.elem_eq(w, &v)) {
            return Err(Error::OutsideCyclic(format!(
                "d({x}) = {} is not a power of u",
                t.render(&v)
            )));
        }
    }
    for x in -2 * n..2 * n {
        if !t.elem_eq(&at(x), &at(x + r as i64)) {
            return Err(Error::NotPeriodic(format!("d({x}) != d({})", x + r as i64)));
        }
    }
    let mut values = Vec::with_capacity(n as usize);
    let mut x = start.clone();
    for k in 0..n {
        values.push(x.clone());
        x = t.mul(&x, &at(k));
    }
    // l periods of d multiply to 1, so the integral closes up after lr steps
    if !t.elem_eq(&x, &start) {
        return Err(Error::NotPeriodic(format!("integral is not {n}-periodic")));
    }
    BaseFunction::dense(t, ActiveGroup::cyclic(&[n as u64])?, values)
}

/// `f_i` on a rank-2 domain: `u^(E_{t-i}(p_0) E_i(p_1))`, so that `i` derivatives
/// along axis 1 and `t - i` along axis 0 return `u^(0)`, while the same
/// operator kills every `f_j` with `j != i`.
pub fn grid_distinguisher<G: Group>(
    target: Arc<G>,
    domain: ActiveGroup,
    u: G::Elem,
    i: usize,
    t: usize,
) -> Result<BaseFunction<G>> {
    if domain.rank() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "distinguishers live on rank-2 domains, got {domain}"
        )));
    }
    if i == 0 || i > t {
        return Err(Error::IndexOutOfRange { index: i, total: t });
    }
    grid_function(target, domain, u, &[(0, (t - i) as u32), (1, i as u32)])
}

/// The same `f_i` built by integration: the 0-row is the `(t - i)`-fold integral of
/// `u` along axis 0, and each column is the `i`-fold integral along axis 1 of the
/// constant equal to its 0-row value, started from that value.
pub fn grid_distinguisher_by_integration<G: Group>(
    target: Arc<G>,
    domain: ActiveGroup,
    u: G::Elem,
    i: usize,
    t: usize,
) -> Result<BaseFunction<G>> {
    if domain.rank() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "distinguishers live on rank-2 domains, got {domain}"
        )));
    }
    if i == 0 || i > t {
        return Err(Error::IndexOutOfRange { index: i, total: t });
    }
    let mut row = BaseFunction::constant(target.clone(), domain.clone(), u.clone());
    for _ in 0..t - i {
        row = discrete_integral(&row, u.clone(), 0)?;
    }
    let row_start = row.restrict(1, 0)?;
    let mut f = row;
    for _ in 0..i {
        f = discrete_integral_from(&f, &row_start, 1)?;
    }
    Ok(f)
}

/// Columns and rows of a rank-2 function: column `i0` fixes axis 0, row `j0` fixes axis 1.
pub struct GridView<G: Group> {
    f: BaseFunction<G>,
}

impl<G: Group> GridView<G> {
    pub fn new(f: BaseFunction<G>) -> Result<Self> {
        if f.domain.rank() != 2 {
            return Err(Error::DimensionMismatch(format!("grid view of {}", f.domain)));
        }
        Ok(Self { f })
    }

    pub fn function(&self) -> &BaseFunction<G> {
        &self.f
    }

    /// `C(i0)`, a function of the axis-1 coordinate.
    pub fn column(&self, i0: i64) -> BaseFunction<G> {
        self.f.restrict_unchecked(0, i0)
    }

    /// `R(j0)`, a function of the axis-0 coordinate.
    pub fn row(&self, j0: i64) -> BaseFunction<G> {
        self.f.restrict_unchecked(1, j0)
    }
}
