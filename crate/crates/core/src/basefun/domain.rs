use std::fmt;
use std::ops::Deref;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// One factor of a finitely generated abelian active group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    Free,
    Cyclic(u64),
}

/// `Z^a x Z_{n_1} x ...` in a fixed axis order. In three-axis witnesses axis 0
/// is `c` and axes 1, 2 are `b_1`, `b_2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActiveGroup {
    components: SmallVec<[Component; 4]>,
}

/// A point of an active group, coordinates reduced on cyclic axes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint(SmallVec<[i64; 4]>);

impl LatticePoint {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

impl Deref for LatticePoint {
    type Target = [i64];
    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl ActiveGroup {
    pub fn new(components: impl IntoIterator<Item = Component>) -> Result<Self> {
        let components: SmallVec<[Component; 4]> = components.into_iter().collect();
        if components.iter().any(|c| matches!(c, Component::Cyclic(0))) {
            return Err(Error::Invalid("cyclic component of order 0".into()));
        }
        Ok(Self { components })
    }

    pub fn free(rank: usize) -> Self {
        Self {
            components: std::iter::repeat_n(Component::Free, rank).collect(),
        }
    }

    pub fn cyclic(orders: &[u64]) -> Result<Self> {
        Self::new(orders.iter().map(|&n| Component::Cyclic(n)))
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, axis: usize) -> Component {
        self.components[axis]
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| matches!(c, Component::Cyclic(_)))
    }

    /// Number of points of a finite active group.
    pub fn size(&self) -> Option<u64> {
        self.components.iter().try_fold(1u64, |acc, c| match c {
            Component::Cyclic(n) => acc.checked_mul(*n),
            Component::Free => None,
        })
    }

    /// Active group with `axis` removed.
    pub fn without_axis(&self, axis: usize) -> Self {
        let mut components = self.components.clone();
        components.remove(axis);
        Self { components }
    }

    pub fn check_axis(&self, axis: usize) -> Result<()> {
        if axis < self.rank() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!("axis {axis} out of range for {self}")))
        }
    }

    pub fn point(&self, coords: &[i64]) -> Result<LatticePoint> {
        if coords.len() != self.rank() {
            return Err(Error::DimensionMismatch(format!(
                "point of length {} in {self}",
                coords.len()
            )));
        }
        Ok(self.reduce(coords.iter().copied().collect()))
    }

    fn reduce(&self, mut coords: SmallVec<[i64; 4]>) -> LatticePoint {
        for (x, c) in coords.iter_mut().zip(&self.components) {
            if let Component::Cyclic(n) = c {
                *x = x.rem_euclid(*n as i64);
            }
        }
        LatticePoint(coords)
    }

    pub fn origin(&self) -> LatticePoint {
        LatticePoint(std::iter::repeat_n(0, self.rank()).collect())
    }

    /// Generator of `axis`.
    pub fn unit(&self, axis: usize) -> LatticePoint {
        let mut p = self.origin();
        p.0[axis] = 1;
        self.reduce(p.0)
    }

    pub fn add(&self, a: &LatticePoint, b: &LatticePoint) -> LatticePoint {
        debug_assert_eq!(a.len(), self.rank());
        self.reduce(a.iter().zip(b.iter()).map(|(x, y)| x + y).collect())
    }

    pub fn neg(&self, a: &LatticePoint) -> LatticePoint {
        self.reduce(a.iter().map(|x| -x).collect())
    }

    pub fn sub(&self, a: &LatticePoint, b: &LatticePoint) -> LatticePoint {
        self.reduce(a.iter().zip(b.iter()).map(|(x, y)| x - y).collect())
    }

    pub fn is_origin(&self, p: &LatticePoint) -> bool {
        p.iter().all(|&x| x == 0)
    }

    /// `p` moved by `steps` along `axis`.
    pub fn step(&self, p: &LatticePoint, axis: usize, steps: i64) -> LatticePoint {
        let mut q = p.0.clone();
        q[axis] += steps;
        self.reduce(q)
    }

    /// `p` with the coordinate on `axis` replaced.
    pub fn with_coord(&self, p: &LatticePoint, axis: usize, value: i64) -> LatticePoint {
        let mut q = p.0.clone();
        q[axis] = value;
        self.reduce(q)
    }

    /// Drops `axis` from a point.
    pub fn project_out(&self, p: &LatticePoint, axis: usize) -> LatticePoint {
        let mut q = p.0.clone();
        q.remove(axis);
        LatticePoint(q)
    }

    /// Inserts a coordinate at `axis` (inverse of `project_out`).
    pub fn insert_coord(&self, p: &LatticePoint, axis: usize, value: i64) -> LatticePoint {
        let mut q = p.0.clone();
        q.insert(axis, value);
        self.reduce(q)
    }

    /// Row-major index of a point of a finite active group.
    pub fn index(&self, p: &LatticePoint) -> usize {
        let mut idx = 0usize;
        for (x, c) in p.iter().zip(&self.components) {
            let Component::Cyclic(n) = c else {
                panic!("index on infinite active group {self}")
            };
            idx = idx * *n as usize + *x as usize;
        }
        idx
    }

    pub fn point_at(&self, mut idx: usize) -> LatticePoint {
        let mut coords: SmallVec<[i64; 4]> = std::iter::repeat_n(0, self.rank()).collect();
        for axis in (0..self.rank()).rev() {
            let Component::Cyclic(n) = self.components[axis] else {
                panic!("point_at on infinite active group {self}")
            };
            coords[axis] = (idx % n as usize) as i64;
            idx /= n as usize;
        }
        LatticePoint(coords)
    }

    /// All points of a finite active group in index order.
    pub fn points(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        let n = self.size().expect("points() on infinite active group") as usize;
        (0..n).map(move |i| self.point_at(i))
    }
}

impl fmt::Display for ActiveGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "1");
        }
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            match c {
                Component::Free => write!(f, "Z")?,
                Component::Cyclic(n) => write!(f, "Z_{n}")?,
            }
        }
        Ok(())
    }
}

/// Inclusive per-axis coordinate bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowBox {
    bounds: Vec<(i64, i64)>,
}

impl WindowBox {
    pub fn new(bounds: Vec<(i64, i64)>) -> Result<Self> {
        if bounds.iter().any(|(lo, hi)| lo > hi) {
            return Err(Error::Invalid("empty window".into()));
        }
        Ok(Self { bounds })
    }

    /// `[-radius, radius]` on free axes and the full range on cyclic ones.
    pub fn around(domain: &ActiveGroup, radius: i64) -> Self {
        Self {
            bounds: domain
                .components()
                .iter()
                .map(|c| match c {
                    Component::Free => (-radius, radius),
                    Component::Cyclic(n) => (0, *n as i64 - 1),
                })
                .collect(),
        }
    }

    pub fn bounds(&self) -> &[(i64, i64)] {
        &self.bounds
    }

    pub fn rank(&self) -> usize {
        self.bounds.len()
    }

    pub fn size(&self) -> u64 {
        self.bounds.iter().map(|(lo, hi)| (hi - lo + 1) as u64).product()
    }

    /// Lexicographic enumeration of the box, last axis fastest.
    pub fn points(&self) -> BoxIter<'_> {
        BoxIter {
            bounds: &self.bounds,
            next: Some(self.bounds.iter().map(|b| b.0).collect()),
        }
    }

    pub fn without_axis(&self, axis: usize) -> Self {
        let mut bounds = self.bounds.clone();
        bounds.remove(axis);
        Self { bounds }
    }
}

impl fmt::Display for WindowBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (lo, hi)) in self.bounds.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "[{lo}, {hi}]")?;
        }
        Ok(())
    }
}

pub struct BoxIter<'a> {
    bounds: &'a [(i64, i64)],
    next: Option<SmallVec<[i64; 4]>>,
}

impl Iterator for BoxIter<'_> {
    type Item = LatticePoint;

    fn next(&mut self) -> Option<LatticePoint> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut axis = self.bounds.len();
        loop {
            if axis == 0 {
                break;
            }
            axis -= 1;
            if succ[axis] < self.bounds[axis].1 {
                succ[axis] += 1;
                self.next = Some(succ);
                break;
            }
            succ[axis] = self.bounds[axis].0;
        }
        Some(LatticePoint(current))
    }
}
