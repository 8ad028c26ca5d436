//! Explicit embeddings of a group `G` into small-generated subgroups `H` of
//! wreath products, with recovery words for the generators of `G` and a
//! verifier that turns a witness into a certificate.

mod finite;
mod theorem1;
mod theorem3;
mod verify;

use std::fmt;
use std::sync::Arc;

use crate::group::{Group, Presentation, Word};
use crate::wreath::{WreathElement, WreathGroup};

pub use finite::{build_corollary6_witness, build_theorem5_witness, DistinguisherScheme, FiniteOptions};
pub use theorem1::{build_theorem1_witness, GeneratorDecomposition, Theorem1Options};
pub use theorem3::{build_theorem3_witness, theorem3_recovered_names, Theorem3Options};
pub use verify::{
    cayley_presentation, verify_witness, CertificateMode, CheckResult, EmbeddingCertificate, VerifyOptions,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    /// `H = gp(c, d)` in `G Wr Z`, for free abelianization.
    Theorem1,
    /// `H = gp(c, b1, b2, d)` in `G Wr Z^3`.
    Theorem3,
    /// `H = gp(c, b1, b2, d)` in `G wr (Z_{s^2} x Z_s x Z_s)`, `s = lcm(l_i^m)`.
    Theorem5,
    /// As above over `Z_{e^{m+1}} x Z_e x Z_e` for `G` of exponent `e`.
    Corollary6,
}

impl Construction {
    pub fn tag(self) -> &'static str {
        match self {
            Construction::Theorem1 => "theorem-1",
            Construction::Theorem3 => "theorem-3",
            Construction::Theorem5 => "theorem-5",
            Construction::Corollary6 => "corollary-6",
        }
    }

    /// Number of generators of `H`.
    pub fn generator_count(self) -> usize {
        match self {
            Construction::Theorem1 => 2,
            _ => 4,
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// What a support slot of `d` carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotClass {
    /// `a_i` (or `a_i^(0)`), sequence index `iota(i)`.
    FreeBasis,
    /// `u_{j,q}`, index `delta`.
    CommutatorLeft,
    /// `v_{j,q}`, index `lambda`.
    CommutatorRight,
    /// Distinguisher `f(j)` in the fixed block `1..t`.
    Distinguisher,
    /// Constant `g_m^(0)`, index `mu(m)`.
    Generator,
}

impl SlotClass {
    pub fn tag(self) -> &'static str {
        match self {
            SlotClass::FreeBasis => "free",
            SlotClass::CommutatorLeft => "comm-left",
            SlotClass::CommutatorRight => "comm-right",
            SlotClass::Distinguisher => "distinguisher",
            SlotClass::Generator => "generator",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub class: SlotClass,
    pub member: usize,
    /// Coordinate along the `c` axis.
    pub position: i64,
}

/// Where the values of `d` sit along the `c` axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub slots: Vec<Slot>,
    /// Order of `c` for finite active groups.
    pub c_order: Option<u64>,
    pub note: String,
}

impl Layout {
    pub fn position(&self, class: SlotClass, member: usize) -> i64 {
        self.slots
            .iter()
            .find(|s| s.class == class && s.member == member)
            .map(|s| s.position)
            .unwrap_or_else(|| panic!("no {} slot {member}", class.tag()))
    }

    pub fn positions(&self) -> Vec<i64> {
        self.slots.iter().map(|s| s.position).collect()
    }
}

/// An element of `H` given by a word in the generators of `H`, with the value
/// the construction predicts for it.
pub struct Recovered<G: Group> {
    pub name: String,
    pub word: Word,
    pub expected: WreathElement<G>,
}

impl<G: Group> Clone for Recovered<G> {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            word: self.word.clone(),
            expected: self.expected.clone(),
        }
    }
}

pub struct EmbeddingWitness<G: Group> {
    pub construction: Construction,
    pub group_name: String,
    pub wreath: Arc<WreathGroup<G>>,
    pub h_names: Vec<String>,
    pub h_generators: Vec<WreathElement<G>>,
    pub recovered: Vec<Recovered<G>>,
    /// Generators of `G` inside the passive group.
    pub g_generators: Vec<G::Elem>,
    /// Each generator of `G` as a word in `recovered`.
    pub g_words: Vec<Word>,
    /// Indices into `recovered` whose exponent sums are audited.
    pub free_letters: Vec<usize>,
    pub layout: Layout,
    pub group_order: Option<usize>,
    pub derived_length: Option<usize>,
    /// Claimed exponent of `W` (and so of `H`), when known.
    pub exponent_bound: Option<u64>,
    /// Extra `key: value` facts recorded in the certificate.
    pub facts: Vec<(String, String)>,
    pub presentation: Option<Presentation>,
}

impl<G: Group> EmbeddingWitness<G> {
    /// Index of `d` among the generators of `H`.
    pub fn d_index(&self) -> usize {
        self.h_generators.len() - 1
    }

    pub fn d(&self) -> &WreathElement<G> {
        &self.h_generators[self.d_index()]
    }

    /// Multiplies `d` by a point function, leaving the expected values alone.
    /// Used as a negative control: the certificate must then fail.
    pub fn corrupt_d(&mut self, point: &[i64], value: G::Elem) -> crate::Result<()> {
        let w = &self.wreath;
        let delta = crate::basefun::BaseFunction::delta(w.passive().clone(), w.active_group().clone(), point, value)?;
        let corrupted = self.d().base().pointwise_mul(&delta)?;
        let i = self.d_index();
        self.h_generators[i] = w.base_element(corrupted)?;
        Ok(())
    }
}

/// `d^(c^s) = c^-s d c^s` as a word; `c` is generator 0.
pub(crate) fn d_conjugate(d: usize, s: i64) -> Word {
    Word::generator(d).conjugate(&Word::power(0, s))
}

/// `[w, b2; i, b1; j]^(c^s)`.
pub(crate) fn distinguisher_word(d: usize, b1: usize, b2: usize, along_b2: usize, along_b1: usize, s: i64) -> Word {
    Word::generator(d)
        .iterated_commutator(&Word::generator(b2), along_b2)
        .iterated_commutator(&Word::generator(b1), along_b1)
        .conjugate(&Word::power(0, s))
}

#[cfg(test)]
mod tests;
