use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;

use super::matrix::IntMatrix;
use super::perm::Permutation;
use super::word::Presentation;
use super::{order_by_powers, pow_by_squaring, Group};
use crate::error::{Error, Result};

/// Power bound used when detecting the order of a matrix element.
pub const DEFAULT_ORDER_BOUND: u64 = 10_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Table(u32),
    Perm(Permutation),
    Matrix(IntMatrix),
    /// Exponent of the formal generator `u`, reduced when the order is finite.
    Cyclic(i64),
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Table(i) => write!(f, "e{i}"),
            GroupElement::Perm(p) => write!(f, "{p}"),
            GroupElement::Matrix(m) => write!(f, "{m}"),
            GroupElement::Cyclic(0) => write!(f, "1"),
            GroupElement::Cyclic(e) => write!(f, "u^{e}"),
        }
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug)]
pub struct CayleyTable {
    rows: Vec<Vec<u32>>,
    inverse: Vec<u32>,
    identity: u32,
}

#[derive(Clone, Debug)]
pub enum Backend {
    /// Full multiplication table; `rows[a][b]` is `a * b`.
    Table(Arc<CayleyTable>),
    Permutation {
        degree: usize,
    },
    Matrix {
        dim: usize,
    },
    /// Formal cyclic group on one letter `u`; `None` is infinite order.
    Cyclic {
        order: Option<u64>,
    },
}

impl Backend {
    pub fn tag(&self) -> &'static str {
        match self {
            Backend::Table(_) => "finite-table",
            Backend::Permutation { .. } => "finite-permutation",
            Backend::Matrix { .. } => "integer-matrix",
            Backend::Cyclic { .. } => "formal-cyclic",
        }
    }
}

/// A computable group `G` together with an ordered generating list.
#[derive(Clone, Debug)]
pub struct EffectiveGroup {
    name: String,
    backend: Backend,
    generators: Vec<GroupElement>,
    presentation: Option<Presentation>,
}

impl EffectiveGroup {
    pub fn new(name: impl Into<String>, backend: Backend, generators: Vec<GroupElement>) -> Result<Self> {
        let group = Self {
            name: name.into(),
            backend,
            generators,
            presentation: None,
        };
        for g in &group.generators {
            group.check(g)?;
        }
        Ok(group)
    }

    pub fn permutation(name: &str, degree: usize, cycles: &[&str]) -> Result<Self> {
        let gens = cycles
            .iter()
            .map(|c| Permutation::parse_cycles(c, degree).map(GroupElement::Perm))
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, Backend::Permutation { degree }, gens)
    }

    pub fn cyclic(name: &str, order: Option<u64>) -> Result<Self> {
        if order == Some(0) {
            return Err(Error::Invalid("cyclic order must be positive".into()));
        }
        let gens = if order == Some(1) {
            vec![]
        } else {
            vec![GroupElement::Cyclic(1)]
        };
        Self::new(name, Backend::Cyclic { order }, gens)
    }

    pub fn matrix(name: &str, dim: usize, gens: &[&[i64]]) -> Result<Self> {
        let gens = gens
            .iter()
            .map(|rows| IntMatrix::from_i64_rows(dim, rows).map(GroupElement::Matrix))
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, Backend::Matrix { dim }, gens)
    }

    /// Table backend. Checks closure, identity, inverses and associativity.
    pub fn table(name: &str, rows: Vec<Vec<u32>>, generators: &[u32]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("multiplication table must be square".into()));
        }
        if rows.iter().flatten().any(|&x| x as usize >= n) {
            return Err(Error::Invalid("table entry out of range".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| rows[e][x] as usize == x && rows[x][e] as usize == x))
            .ok_or_else(|| Error::Invalid("table has no identity".into()))? as u32;
        let mut inverse = vec![0u32; n];
        for a in 0..n {
            inverse[a] = (0..n)
                .find(|&b| rows[a][b] == identity)
                .ok_or_else(|| Error::Invalid(format!("element {a} has no inverse")))? as u32;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = rows[a][b] as usize;
                for c in 0..n {
                    if rows[ab][c] != rows[a][rows[b][c] as usize] {
                        return Err(Error::Invalid(format!("table is not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        let table = CayleyTable {
            rows,
            inverse,
            identity,
        };
        let gens = generators.iter().map(|&g| GroupElement::Table(g)).collect();
        Self::new(name, Backend::Table(Arc::new(table)), gens)
    }

    pub fn with_presentation(mut self, presentation: Presentation) -> Result<Self> {
        if presentation.generator_count() != self.generators.len() {
            return Err(Error::ArityMismatch {
                expected: self.generators.len(),
                got: presentation.generator_count(),
            });
        }
        self.presentation = Some(presentation);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn presentation(&self) -> Option<&Presentation> {
        self.presentation.as_ref()
    }

    /// Finite backends: table, permutation, formal cyclic of finite order.
    pub fn is_finite(&self) -> bool {
        match &self.backend {
            Backend::Table(_) | Backend::Permutation { .. } => true,
            Backend::Cyclic { order } => order.is_some(),
            Backend::Matrix { .. } => false,
        }
    }

    pub fn require_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NotFinite(self.backend.tag().to_string()))
        }
    }

    /// Abelian by construction (formal cyclic groups only).
    pub fn is_abelian_backend(&self) -> bool {
        matches!(self.backend, Backend::Cyclic { .. })
    }

    /// Validates that `g` is a well-formed element of this group.
    pub fn check(&self, g: &GroupElement) -> Result<()> {
        match (&self.backend, g) {
            (Backend::Table(t), GroupElement::Table(i)) if (*i as usize) < t.rows.len() => Ok(()),
            (Backend::Permutation { degree }, GroupElement::Perm(p)) if p.degree() == *degree => Ok(()),
            (Backend::Matrix { dim }, GroupElement::Matrix(m)) if m.dim() == *dim => Ok(()),
            (Backend::Cyclic { order }, GroupElement::Cyclic(e)) => match order {
                Some(n) if *e < 0 || *e as u64 >= *n => {
                    Err(Error::InvalidElement(format!("exponent {e} not reduced mod {n}")))
                }
                _ => Ok(()),
            },
            _ => Err(Error::BackendMismatch(format!(
                "{g} is not an element of the {} group {}",
                self.backend.tag(),
                self.name
            ))),
        }
    }

    /// Parses an element payload in this backend's notation.
    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        let text = text.trim();
        match &self.backend {
            Backend::Table(t) => {
                let i: u32 = text
                    .trim_start_matches('e')
                    .parse()
                    .map_err(|_| Error::InvalidElement(format!("bad table index {text:?}")))?;
                if i as usize >= t.rows.len() {
                    return Err(Error::InvalidElement(format!("table index {i} out of range")));
                }
                Ok(GroupElement::Table(i))
            }
            Backend::Permutation { degree } => Permutation::parse_cycles(text, *degree).map(GroupElement::Perm),
            Backend::Matrix { dim } => {
                let entries = text
                    .split(|c: char| c == ',' || c == '[' || c == ']' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<BigInt>()
                            .map_err(|_| Error::InvalidElement(format!("bad entry {s:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                IntMatrix::from_rows(*dim, entries).map(GroupElement::Matrix)
            }
            Backend::Cyclic { .. } => {
                let e: i64 = text
                    .trim_start_matches("u^")
                    .parse()
                    .map_err(|_| Error::InvalidElement(format!("bad exponent {text:?}")))?;
                Ok(self.cyclic_element(e))
            }
        }
    }

    fn cyclic_element(&self, e: i64) -> GroupElement {
        match self.backend {
            Backend::Cyclic { order: Some(n) } => GroupElement::Cyclic(e.rem_euclid(n as i64)),
            _ => GroupElement::Cyclic(e),
        }
    }

    pub fn try_mul(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub fn try_inv(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        Ok(self.inv_unchecked(a))
    }

    pub fn try_eq(&self, a: &GroupElement, b: &GroupElement) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(a == b)
    }

    fn mul_unchecked(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (&self.backend, a, b) {
            (Backend::Table(t), GroupElement::Table(x), GroupElement::Table(y)) => {
                GroupElement::Table(t.rows[*x as usize][*y as usize])
            }
            (_, GroupElement::Perm(p), GroupElement::Perm(q)) => GroupElement::Perm(p.then(q)),
            (_, GroupElement::Matrix(p), GroupElement::Matrix(q)) => GroupElement::Matrix(p.mul(q)),
            (_, GroupElement::Cyclic(x), GroupElement::Cyclic(y)) => self.cyclic_element(x + y),
            _ => panic!("backend mismatch multiplying {a} and {b} in {}", self.backend.tag()),
        }
    }

    fn inv_unchecked(&self, a: &GroupElement) -> GroupElement {
        match (&self.backend, a) {
            (Backend::Table(t), GroupElement::Table(x)) => GroupElement::Table(t.inverse[*x as usize]),
            (_, GroupElement::Perm(p)) => GroupElement::Perm(p.inverse()),
            (_, GroupElement::Matrix(m)) => GroupElement::Matrix(m.inverse()),
            (_, GroupElement::Cyclic(x)) => self.cyclic_element(-x),
            _ => panic!("backend mismatch inverting {a} in {}", self.backend.tag()),
        }
    }

    /// Least `k >= 1` with `g^k = 1`.
    pub fn element_order(&self, g: &GroupElement) -> Result<u64> {
        self.element_order_with_bound(g, DEFAULT_ORDER_BOUND)
    }

    pub fn element_order_with_bound(&self, g: &GroupElement, bound: u64) -> Result<u64> {
        self.check(g)?;
        match (&self.backend, g) {
            (Backend::Cyclic { order: Some(n) }, GroupElement::Cyclic(e)) => Ok(n / n.gcd(&(*e as u64))),
            (Backend::Cyclic { order: None }, GroupElement::Cyclic(e)) => {
                if *e == 0 {
                    Ok(1)
                } else {
                    Err(Error::InfiniteOrder)
                }
            }
            (Backend::Table(t), _) => order_by_powers(self, g, t.rows.len() as u64),
            _ => order_by_powers(self, g, bound),
        }
    }

    /// Least common multiple of all element orders (finite backends).
    pub fn exponent(&self, bound: usize) -> Result<u64> {
        let elems = super::subgroup_closure(self, &self.generators, bound)?;
        let mut e = 1u64;
        for g in &elems {
            e = e.lcm(&self.element_order(g)?);
        }
        Ok(e)
    }
}

impl Group for EffectiveGroup {
    type Elem = GroupElement;

    fn identity(&self) -> GroupElement {
        match &self.backend {
            Backend::Table(t) => GroupElement::Table(t.identity),
            Backend::Permutation { degree } => GroupElement::Perm(Permutation::identity(*degree)),
            Backend::Matrix { dim } => GroupElement::Matrix(IntMatrix::identity(*dim)),
            Backend::Cyclic { .. } => GroupElement::Cyclic(0),
        }
    }

    fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.mul_unchecked(a, b)
    }

    fn inv(&self, a: &GroupElement) -> GroupElement {
        self.inv_unchecked(a)
    }

    fn elem_eq(&self, a: &GroupElement, b: &GroupElement) -> bool {
        a == b
    }

    fn pow(&self, a: &GroupElement, n: i64) -> GroupElement {
        match a {
            GroupElement::Cyclic(e) => self.cyclic_element(e * n),
            _ => pow_by_squaring(self, a, n),
        }
    }

    fn render(&self, a: &GroupElement) -> String {
        a.to_string()
    }
}
