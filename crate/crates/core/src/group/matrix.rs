//! Square matrices over arbitrary-precision integers.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    dim: usize,
    entries: Arc<[BigInt]>,
}

impl IntMatrix {
    pub fn identity(dim: usize) -> Self {
        let entries = (0..dim * dim)
            .map(|k| {
                if k / dim == k % dim {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            })
            .collect();
        Self { dim, entries }
    }

    /// Row-major construction. Fails unless the matrix is `dim x dim` with determinant +-1.
    pub fn from_rows(dim: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::InvalidElement(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let m = Self {
            dim,
            entries: entries.into(),
        };
        let det = m.determinant();
        if det.abs() != BigInt::one() {
            return Err(Error::InvalidElement(format!(
                "matrix {m} has determinant {det}, not invertible over the integers"
            )));
        }
        Ok(m)
    }

    pub fn from_i64_rows(dim: usize, entries: &[i64]) -> Result<Self> {
        Self::from_rows(dim, entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        &self.entries[row * self.dim + col]
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.dim;
        debug_assert_eq!(n, other.dim);
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigInt::zero();
                for k in 0..n {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    acc += a * other.get(k, j);
                }
                out.push(acc);
            }
        }
        Self {
            dim: n,
            entries: out.into(),
        }
    }

    fn to_rational(&self) -> Vec<Vec<BigRational>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| BigRational::from_integer(self.get(i, j).clone()))
                    .collect()
            })
            .collect()
    }

    pub fn determinant(&self) -> BigInt {
        let n = self.dim;
        let mut a = self.to_rational();
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return BigInt::zero();
            };
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            let p = a[col][col].clone();
            det *= &p;
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let factor = &a[r][col] / &p;
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= &factor * y;
                }
            }
        }
        det.to_integer()
    }

    /// Exact inverse; integral because construction enforces determinant +-1.
    pub fn inverse(&self) -> Self {
        let n = self.dim;
        let mut a = self.to_rational();
        let mut inv: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .expect("unimodular matrix is invertible");
            a.swap(pivot, col);
            inv.swap(pivot, col);
            let p = a[col][col].clone();
            for c in 0..n {
                a[col][c] = &a[col][c] / &p;
                inv[col][c] = &inv[col][c] / &p;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for c in 0..n {
                    let v = &factor * &a[col][c];
                    a[r][c] -= v;
                    let w = &factor * &inv[col][c];
                    inv[r][c] -= w;
                }
            }
        }
        let entries = inv
            .into_iter()
            .flatten()
            .map(|q| {
                debug_assert!(q.is_integer());
                q.to_integer()
            })
            .collect();
        Self { dim: n, entries }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
