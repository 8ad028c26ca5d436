use std::collections::BTreeMap;
use std::sync::Arc;

use super::{check_same, BaseFunction, LatticePoint, Node, Repr, Step, DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::group::Group;

impl<G: Group> BaseFunction<G> {
    /// `f^b` with `f^b(x) = f(x + b)`.
    pub fn shift(&self, b: &LatticePoint) -> Self {
        let dom = &self.domain;
        if dom.is_origin(b) {
            return self.clone();
        }
        let repr = match &self.repr {
            Repr::Constant(_) => return self.clone(),
            Repr::Dense(v) => {
                let values: Vec<_> = (0..v.len())
                    .map(|i| v[dom.index(&dom.add(&dom.point_at(i), b))].clone())
                    .collect();
                Repr::Dense(values.into())
            }
            Repr::Sparse(m) => Repr::Sparse(Arc::new(m.iter().map(|(p, e)| (dom.sub(p, b), e.clone())).collect())),
            Repr::Step(s) => Repr::Step(Arc::new(Step {
                left: s.left.clone(),
                offset: s.offset - b[0],
                window: s.window.clone(),
                right: s.right.clone(),
            })),
            Repr::Sliced(s) => {
                let tail = dom.project_out(b, 0);
                let map = s
                    .iter()
                    .map(|(k, f)| {
                        let key = dom.with_coord(&dom.origin(), 0, k - b[0])[0];
                        (key, f.shift(&tail))
                    })
                    .collect();
                Repr::Sliced(Arc::new(map))
            }
            Repr::Lazy(n) => match n.as_ref() {
                Node::Shift(f, c) => {
                    let total = dom.add(c, b);
                    return f.shift(&total);
                }
                _ => Repr::Lazy(Arc::new(Node::Shift(self.clone(), b.clone()))),
            },
        };
        Self::from_repr(self.target.clone(), dom.clone(), repr)
    }

    /// Shift by raw coordinates.
    pub fn try_shift(&self, coords: &[i64]) -> Result<Self> {
        let b = self.domain.point(coords)?;
        Ok(self.shift(&b))
    }

    /// `(fg)(x) = f(x) g(x)`.
    pub fn pointwise_mul(&self, other: &Self) -> Result<Self> {
        check_same(self, other)?;
        Ok(self.mul(other))
    }

    pub(crate) fn mul(&self, other: &Self) -> Self {
        if self.is_trivially_identity() {
            return other.clone();
        }
        if other.is_trivially_identity() {
            return self.clone();
        }
        let t = &self.target;
        let dom = &self.domain;
        let make = |repr| Self::from_repr(t.clone(), dom.clone(), repr);
        match (&self.repr, &other.repr) {
            (Repr::Constant(a), Repr::Constant(b)) => return Self::constant(t.clone(), dom.clone(), t.mul(a, b)),
            (Repr::Sparse(a), Repr::Sparse(b)) => {
                let mut map = BTreeMap::new();
                let id = t.identity();
                for p in a.keys().chain(b.keys()) {
                    if map.contains_key(p) {
                        continue;
                    }
                    let v = t.mul(a.get(p).unwrap_or(&id), b.get(p).unwrap_or(&id));
                    if !t.is_identity(&v) {
                        map.insert(p.clone(), v);
                    }
                }
                return make(Repr::Sparse(Arc::new(map)));
            }
            (Repr::Dense(a), Repr::Dense(b)) => {
                let values: Vec<_> = a.iter().zip(b.iter()).map(|(x, y)| t.mul(x, y)).collect();
                return make(Repr::Dense(values.into()));
            }
            _ => {}
        }
        let sliced = matches!(self.repr, Repr::Sliced(_)) || matches!(other.repr, Repr::Sliced(_));
        if sliced {
            if let (Some(a), Some(b)) = (self.slices(), other.slices()) {
                let mut map = BTreeMap::new();
                for k in a.keys().chain(b.keys()) {
                    if map.contains_key(k) {
                        continue;
                    }
                    let f = match (a.get(k), b.get(k)) {
                        (Some(x), Some(y)) => x.mul(y),
                        (Some(x), None) | (None, Some(x)) => x.clone(),
                        (None, None) => unreachable!(),
                    };
                    if !f.is_trivially_identity() {
                        map.insert(*k, f);
                    }
                }
                return make(Repr::Sliced(Arc::new(map)));
            }
        }
        if let Some(n) = dom.size() {
            if n <= DENSE_LIMIT {
                let values: Vec<_> = dom.points().map(|p| t.mul(&self.eval(&p), &other.eval(&p))).collect();
                return make(Repr::Dense(values.into()));
            }
        }
        if dom.rank() == 1 {
            if let (Some(a), Some(b)) = (self.as_step(), other.as_step()) {
                let lo = a.offset.min(b.offset);
                let hi = (a.offset + a.window.len() as i64).max(b.offset + b.window.len() as i64);
                let window = (lo..hi)
                    .map(|x| {
                        let p = dom.point(&[x]).unwrap();
                        t.mul(&self.eval(&p), &other.eval(&p))
                    })
                    .collect();
                return make(Repr::Step(Arc::new(Step {
                    left: t.mul(&a.left, &b.left),
                    offset: lo,
                    window,
                    right: t.mul(&a.right, &b.right),
                })));
            }
        }
        make(Repr::Lazy(Arc::new(Node::Mul(self.clone(), other.clone()))))
    }

    /// `f^-1(x) = f(x)^-1`.
    pub fn pointwise_inv(&self) -> Self {
        let t = &self.target;
        let repr = match &self.repr {
            Repr::Constant(e) => Repr::Constant(t.inv(e)),
            Repr::Dense(v) => Repr::Dense(v.iter().map(|e| t.inv(e)).collect::<Vec<_>>().into()),
            Repr::Sparse(m) => Repr::Sparse(Arc::new(m.iter().map(|(p, e)| (p.clone(), t.inv(e))).collect())),
            Repr::Step(s) => Repr::Step(Arc::new(Step {
                left: t.inv(&s.left),
                offset: s.offset,
                window: s.window.iter().map(|e| t.inv(e)).collect(),
                right: t.inv(&s.right),
            })),
            Repr::Sliced(s) => Repr::Sliced(Arc::new(s.iter().map(|(k, f)| (*k, f.pointwise_inv())).collect())),
            Repr::Lazy(n) => match n.as_ref() {
                Node::Inv(f) => return f.clone(),
                Node::Power { base, order, degrees } => Repr::Lazy(Arc::new(Node::Power {
                    base: t.inv(base),
                    order: *order,
                    degrees: degrees.clone(),
                })),
                _ => Repr::Lazy(Arc::new(Node::Inv(self.clone()))),
            },
        };
        Self::from_repr(t.clone(), self.domain.clone(), repr)
    }

    /// Slices along axis 0 when they can be listed finitely.
    pub(crate) fn slices(&self) -> Option<BTreeMap<i64, BaseFunction<G>>> {
        let dom = &self.domain;
        if dom.rank() < 2 {
            return None;
        }
        let tail = dom.without_axis(0);
        match &self.repr {
            Repr::Sliced(s) => Some(s.as_ref().clone()),
            Repr::Sparse(m) => {
                let mut groups: BTreeMap<i64, Vec<(LatticePoint, G::Elem)>> = BTreeMap::new();
                for (p, e) in m.iter() {
                    groups.entry(p[0]).or_default().push((dom.project_out(p, 0), e.clone()));
                }
                Some(
                    groups
                        .into_iter()
                        .map(|(k, entries)| {
                            let f = BaseFunction::sparse(self.target.clone(), tail.clone(), entries)
                                .expect("projected points are valid");
                            (k, f)
                        })
                        .collect(),
                )
            }
            _ => {
                let super::Component::Cyclic(n) = dom.component(0) else {
                    return None;
                };
                let mut out = BTreeMap::new();
                for k in 0..n as i64 {
                    let mut f = self.restrict_unchecked(0, k);
                    if matches!(f.repr, Repr::Lazy(_)) {
                        f = f.materialize();
                    }
                    if !f.is_trivially_identity() {
                        out.insert(k, f);
                    }
                }
                Some(out)
            }
        }
    }

    /// Restriction to the hyperplane `p[axis] = coord`, over the domain without `axis`.
    pub fn restrict(&self, axis: usize, coord: i64) -> Result<Self> {
        self.domain.check_axis(axis)?;
        if self.domain.rank() < 2 {
            return Err(Error::DimensionMismatch("cannot restrict a rank-1 function".into()));
        }
        Ok(self.restrict_unchecked(axis, coord))
    }

    pub(crate) fn restrict_unchecked(&self, axis: usize, coord: i64) -> Self {
        let dom = &self.domain;
        let coord = dom.with_coord(&dom.origin(), axis, coord)[axis];
        let sub = dom.without_axis(axis);
        let t = self.target.clone();
        match &self.repr {
            Repr::Constant(e) => Self::constant(t, sub, e.clone()),
            Repr::Sparse(m) => {
                let entries = m
                    .iter()
                    .filter(|(p, _)| p[axis] == coord)
                    .map(|(p, e)| (dom.project_out(p, axis), e.clone()));
                Self::sparse(t, sub, entries.collect::<Vec<_>>()).expect("projected points are valid")
            }
            Repr::Dense(_) => Self::from_fn(t, sub.clone(), |q| self.eval(&dom.insert_coord(q, axis, coord)))
                .expect("finite subdomain"),
            Repr::Sliced(s) if axis == 0 => s.get(&coord).cloned().unwrap_or_else(|| Self::identity(t, sub)),
            Repr::Sliced(s) if sub.rank() >= 2 => {
                let map = s
                    .iter()
                    .map(|(k, f)| (*k, f.restrict_unchecked(axis - 1, coord)))
                    .filter(|(_, f)| !f.is_trivially_identity())
                    .collect();
                Self::from_repr(t, sub, Repr::Sliced(Arc::new(map)))
            }
            _ => Self::from_repr(
                t,
                sub,
                Repr::Lazy(Arc::new(Node::Restrict {
                    inner: self.clone(),
                    axis,
                    coord,
                })),
            ),
        }
    }
}

pub(crate) fn step_eq<G: Group + ?Sized>(t: &G, a: &Step<G::Elem>, b: &Step<G::Elem>) -> bool {
    if !t.elem_eq(&a.left, &b.left) || !t.elem_eq(&a.right, &b.right) {
        return false;
    }
    let lo = a.offset.min(b.offset);
    let hi = (a.offset + a.window.len() as i64).max(b.offset + b.window.len() as i64);
    let at = |s: &Step<G::Elem>, x: i64| -> G::Elem {
        if x < s.offset {
            s.left.clone()
        } else if x >= s.offset + s.window.len() as i64 {
            s.right.clone()
        } else {
            s.window[(x - s.offset) as usize].clone()
        }
    };
    (lo..hi).all(|x| t.elem_eq(&at(a, x), &at(b, x)))
}
