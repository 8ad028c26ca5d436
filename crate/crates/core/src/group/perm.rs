//! Permutations of `{1..n}` in image-array form.
//!
//! Products compose left to right: `p * q` applies `p` first, then `q`.
//! Every commutator identity in the crate depends on this convention.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    // images[x] is the image of point x (0-based).
    images: Arc<[u32]>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Self {
            images: (0..degree as u32).collect(),
        }
    }

    /// Builds a permutation from 0-based images, checking bijectivity.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(Error::InvalidElement(format!(
                    "image array {images:?} is not a permutation"
                )));
            }
            seen[x] = true;
        }
        Ok(Self { images: images.into() })
    }

    /// Parses cycle notation over points `1..=degree`, e.g. `(1 2)(3 4 5)` or `()`.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let bad = |msg: String| Error::InvalidElement(format!("{text:?}: {msg}"));
        let mut rest = text.trim();
        let mut used = vec![false; degree];
        while !rest.is_empty() {
            let Some(stripped) = rest.strip_prefix('(') else {
                return Err(bad("expected '('".into()));
            };
            let Some(close) = stripped.find(')') else {
                return Err(bad("unclosed cycle".into()));
            };
            let body = &stripped[..close];
            let points = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| bad(format!("bad point {s:?}")))
                        .and_then(|p| {
                            if p == 0 || p > degree {
                                Err(bad(format!("point {p} outside 1..={degree}")))
                            } else {
                                Ok(p - 1)
                            }
                        })
                })
                .collect::<Result<Vec<_>>>()?;
            for &p in &points {
                if used[p] {
                    return Err(bad(format!("point {} repeated", p + 1)));
                }
                used[p] = true;
            }
            for (k, &p) in points.iter().enumerate() {
                images[p] = points[(k + 1) % points.len()] as u32;
            }
            rest = stripped[close + 1..].trim_start();
        }
        Ok(Self { images: images.into() })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Self) -> Self {
        debug_assert_eq!(self.degree(), other.degree());
        Self {
            images: self.images.iter().map(|&x| other.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.degree()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        Self { images: inv.into() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x as u32 == y)
    }

    /// Disjoint cycles of length >= 2, points 1-based, each starting at its least point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start + 1];
            seen[start] = true;
            let mut x = self.image(start);
            while x != start {
                seen[x] = true;
                cycle.push(x + 1);
                x = self.image(x);
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (k, p) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
