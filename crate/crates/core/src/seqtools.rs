//! Strictly uneven sparse sequences and the support layouts built from them.
//!
//! A sequence `s_1 < s_2 < ...` is strictly uneven when the differences
//! `s_{i+j} - s_j` (for `i, j >= 1`) are pairwise distinct, i.e. a difference
//! determines the index pair. The slots `c^{s_k}` of a witness function are
//! laid out along such a sequence so that shifted copies meet in one point only.

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseSequence {
    terms: Vec<u64>,
}

impl SparseSequence {
    /// Accepts any strictly increasing list of positive integers.
    pub fn new(terms: Vec<u64>) -> Result<Self> {
        check_increasing(&terms)?;
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[u64] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// 1-based access, `s_k`.
    pub fn term(&self, k: usize) -> u64 {
        self.terms[k - 1]
    }

    pub fn is_uneven(&self, modulus: Option<u64>) -> bool {
        matches!(is_strictly_uneven(&self.terms, modulus), Ok(None))
    }
}

/// Why a sequence fails the uneven property. Indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnevenViolation {
    /// `s_{i+j} - s_j = s_{k+l} - s_l` with `(i, j) != (k, l)`.
    EqualDifferences { i: usize, j: usize, k: usize, l: usize },
    /// Two terms coincide modulo the modulus.
    Collision { a: usize, b: usize },
}

impl fmt::Display for UnevenViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            UnevenViolation::EqualDifferences { i, j, k, l } => write!(
                f,
                "s_{} - s_{} = s_{} - s_{} with (i, j, k, l) = ({i}, {j}, {k}, {l})",
                i + j,
                j,
                k + l,
                l
            ),
            UnevenViolation::Collision { a, b } => write!(f, "s_{a} = s_{b} modulo the modulus"),
        }
    }
}

fn check_increasing(terms: &[u64]) -> Result<()> {
    if terms.first() == Some(&0) {
        return Err(Error::Invalid("sequence terms must be positive".into()));
    }
    for (k, w) in terms.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(Error::NotIncreasing { position: k + 2 });
        }
    }
    Ok(())
}

/// Exhaustive quadruple check. `Ok(None)` means uneven.
pub fn is_strictly_uneven(terms: &[u64], modulus: Option<u64>) -> Result<Option<UnevenViolation>> {
    if terms.is_empty() {
        return Err(Error::Invalid("sequence must be nonempty".into()));
    }
    check_increasing(terms)?;
    let n = terms.len();
    let reduce = |x: u64| modulus.map_or(x, |m| x % m);
    if let Some(m) = modulus {
        for a in 1..=n {
            for b in a + 1..=n {
                if terms[a - 1] % m == terms[b - 1] % m {
                    return Ok(Some(UnevenViolation::Collision { a, b }));
                }
            }
        }
    }
    // i >= 1, j >= 1, i + j <= n, and likewise for (k, l).
    for j in 1..n {
        for i in 1..=n - j {
            let d = reduce(terms[i + j - 1] - terms[j - 1]);
            for l in 1..n {
                for k in 1..=n - l {
                    if (i, j) == (k, l) {
                        continue;
                    }
                    if reduce(terms[k + l - 1] - terms[l - 1]) == d {
                        return Ok(Some(UnevenViolation::EqualDifferences { i, j, k, l }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// `(2, 4, ..., 2^n)`.
pub fn powers_of_two(n: usize) -> Result<SparseSequence> {
    if n == 0 || n > 62 {
        return Err(Error::Invalid(format!("powers_of_two needs 1 <= n <= 62, got {n}")));
    }
    let seq = SparseSequence::new((1..=n as u32).map(|i| 1u64 << i).collect())?;
    debug_assert!(seq.is_uneven(None));
    Ok(seq)
}

/// Consecutive sequence indices handed to named classes of slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportAssignment {
    sequence: SparseSequence,
    classes: Vec<(String, Range<usize>)>,
}

impl SupportAssignment {
    pub fn sequence(&self) -> &SparseSequence {
        &self.sequence
    }

    /// 1-based index range of a class.
    pub fn class(&self, name: &str) -> Option<Range<usize>> {
        self.classes.iter().find(|(n, _)| n == name).map(|(_, r)| r.clone())
    }

    pub fn classes(&self) -> &[(String, Range<usize>)] {
        &self.classes
    }

    /// Sequence index of the `member`-th (0-based) element of a class.
    pub fn index(&self, name: &str, member: usize) -> usize {
        let r = self.class(name).unwrap_or_else(|| panic!("unknown class {name}"));
        assert!(member < r.len(), "class {name} has {} members", r.len());
        r.start + member
    }

    /// Position `s_k` of the `member`-th element of a class.
    pub fn position(&self, name: &str, member: usize) -> u64 {
        self.sequence.term(self.index(name, member))
    }

    pub fn total_slots(&self) -> usize {
        self.classes.iter().map(|(_, r)| r.len()).sum()
    }

    /// All assigned positions in index order.
    pub fn positions(&self) -> Vec<u64> {
        (1..=self.total_slots()).map(|k| self.sequence.term(k)).collect()
    }

    /// Replaces the positions while keeping the class layout (same slot count).
    pub fn with_positions(&self, positions: Vec<u64>) -> Result<Self> {
        if positions.len() != self.total_slots() {
            return Err(Error::Invalid(format!(
                "layout has {} slots, got {} positions",
                self.total_slots(),
                positions.len()
            )));
        }
        Ok(Self {
            sequence: SparseSequence::new(positions)?,
            classes: self.classes.clone(),
        })
    }
}

/// Constraint for layouts on a finite cyclic axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularConstraint {
    pub modulus: u64,
    /// Slot pairs (1-based sequence indices) whose shifted copies are multiplied
    /// pointwise by a commutator; they may only meet at the origin.
    pub separated_pairs: Vec<(usize, usize)>,
}

/// First reason a modular layout fails, if any.
pub fn modular_layout_violation(positions: &[u64], modulus: u64, separated_pairs: &[(usize, usize)]) -> Option<String> {
    let n = positions.len();
    let res: Vec<u64> = positions.iter().map(|p| p % modulus).collect();
    for a in 0..n {
        for b in a + 1..n {
            if res[a] == res[b] {
                return Some(format!(
                    "slots {} and {} coincide: {} = {} mod {modulus}",
                    a + 1,
                    b + 1,
                    positions[a],
                    positions[b]
                ));
            }
        }
    }
    for &(a, b) in separated_pairs {
        let (sa, sb) = (res[a - 1], res[b - 1]);
        for p in 0..n {
            // shift x with x + s_a = s_p
            let x = (res[p] + modulus - sa) % modulus;
            if x == 0 {
                continue;
            }
            let hit = (x + sb) % modulus;
            if let Some(q) = res.iter().position(|&r| r == hit) {
                return Some(format!(
                    "slots {a} and {b} meet again at shift {x} mod {modulus} (via slots {} and {})",
                    p + 1,
                    q + 1
                ));
            }
        }
    }
    None
}

/// Smallest multiple of `base` on which the layout is admissible.
pub fn smallest_admissible_modulus(positions: &[u64], base: u64, separated_pairs: &[(usize, usize)]) -> u64 {
    let mut m = base;
    while modular_layout_violation(positions, m, separated_pairs).is_some() {
        m += base;
    }
    m
}

/// Assigns consecutive indices of `2, 4, 8, ...` to each class, in order.
///
/// With a modular constraint the layout must have pairwise distinct residues
/// and keep every separated pair apart; otherwise a capacity error names the
/// smallest admissible multiple of the modulus.
pub fn plan_supports(counts: &[(&str, usize)], constraint: Option<&ModularConstraint>) -> Result<SupportAssignment> {
    let total: usize = counts.iter().map(|(_, c)| c).sum();
    let sequence = if total == 0 {
        SparseSequence { terms: vec![] }
    } else {
        powers_of_two(total)?
    };
    let mut next = 1;
    let mut classes = Vec::with_capacity(counts.len());
    for (name, count) in counts {
        if classes.iter().any(|(n, _): &(String, Range<usize>)| n == name) {
            return Err(Error::Invalid(format!("duplicate class {name}")));
        }
        classes.push((name.to_string(), next..next + count));
        next += count;
    }
    let plan = SupportAssignment { sequence, classes };
    if let Some(c) = constraint {
        let positions = plan.positions();
        if modular_layout_violation(&positions, c.modulus, &c.separated_pairs).is_some() {
            return Err(Error::Capacity {
                modulus: c.modulus,
                suggested: smallest_admissible_modulus(&positions, c.modulus, &c.separated_pairs),
            });
        }
    }
    Ok(plan)
}

/// Lexicographically least increasing residues in `1..modulus` forming an admissible layout.
pub fn search_layout(slots: usize, modulus: u64, separated_pairs: &[(usize, usize)]) -> Option<Vec<u64>> {
    fn extend(chosen: &mut Vec<u64>, slots: usize, modulus: u64, pairs: &[(usize, usize)]) -> bool {
        if chosen.len() == slots {
            return modular_layout_violation(chosen, modulus, pairs).is_none();
        }
        let start = chosen.last().map_or(1, |&x| x + 1);
        for x in start..modulus {
            chosen.push(x);
            // prune with the pairs already fully placed
            let placed: Vec<_> = pairs
                .iter()
                .copied()
                .filter(|&(a, b)| a <= chosen.len() && b <= chosen.len())
                .collect();
            if modular_layout_violation(chosen, modulus, &placed).is_none() && extend(chosen, slots, modulus, pairs) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut chosen = Vec::with_capacity(slots);
    extend(&mut chosen, slots, modulus, separated_pairs).then_some(chosen)
}
