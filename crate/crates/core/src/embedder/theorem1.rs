use std::sync::Arc;

use super::{d_conjugate, Construction, EmbeddingWitness, Layout, Recovered, Slot, SlotClass};
use crate::basefun::{ActiveGroup, BaseFunction, LatticePoint, WindowBox};
use crate::error::{Error, Result};
use crate::group::{commutator, derived_length, AbelianizationData, EffectiveGroup, Group, GroupElement, Word};
use crate::seqtools::{plan_supports, SparseSequence};
use crate::wreath::{EqualityPolicy, WreathGroup, WreathMode};

/// `g = a_1^{e_1} ... a_k^{e_k} [u_1, v_1] ... [u_r, v_r]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorDecomposition {
    pub free_exponents: Vec<i64>,
    pub commutators: Vec<(GroupElement, GroupElement)>,
}

#[derive(Clone, Debug)]
pub struct Theorem1Options {
    /// Radius of the comparison window on the `c` axis.
    pub window: i64,
    /// Replaces `2, 4, 8, ...` for the slot positions (negative controls).
    pub sequence: Option<Vec<u64>>,
    /// Declared derived length of `G`, recorded for infinite groups.
    pub derived_length: Option<usize>,
    pub closure_bound: usize,
}

impl Default for Theorem1Options {
    fn default() -> Self {
        Self {
            window: 16,
            sequence: None,
            derived_length: None,
            closure_bound: crate::group::DEFAULT_CLOSURE_BOUND,
        }
    }
}

/// `G` with free abelianization inside `G Wr Z`, `H = gp(c, d)`.
pub fn build_theorem1_witness(
    group: &Arc<EffectiveGroup>,
    data: &AbelianizationData,
    decomps: &[GeneratorDecomposition],
    opts: &Theorem1Options,
) -> Result<EmbeddingWitness<EffectiveGroup>> {
    if !data.is_free() {
        return Err(Error::AbelianizationNotFree);
    }
    if data.free_basis.len() != data.free_rank {
        return Err(Error::Invalid(format!(
            "free rank {} but {} basis preimages",
            data.free_rank,
            data.free_basis.len()
        )));
    }
    let gens = group.generators();
    if decomps.len() != gens.len() {
        return Err(Error::ArityMismatch {
            expected: gens.len(),
            got: decomps.len(),
        });
    }
    let k = data.free_rank;
    let mut pairs: Vec<(usize, GroupElement, GroupElement)> = Vec::new();
    let mut derived_parts = Vec::with_capacity(gens.len());
    for (j, (g, dec)) in gens.iter().zip(decomps).enumerate() {
        if dec.free_exponents.len() != k {
            return Err(Error::ArityMismatch {
                expected: k,
                got: dec.free_exponents.len(),
            });
        }
        let mut free = group.identity();
        for (a, &e) in data.free_basis.iter().zip(&dec.free_exponents) {
            free = group.try_mul(&free, &group.pow(a, e))?;
        }
        let mut derived = group.identity();
        for (u, v) in &dec.commutators {
            group.check(u)?;
            group.check(v)?;
            derived = group.mul(&derived, &commutator(group.as_ref(), u, v));
            pairs.push((j, u.clone(), v.clone()));
        }
        if group.mul(&free, &derived) != *g {
            return Err(Error::Invalid(format!(
                "decomposition of generator {} does not evaluate to it",
                j + 1
            )));
        }
        derived_parts.push(derived);
    }

    let r = pairs.len();
    let plan = plan_supports(&[("A", k), ("U", r), ("V", r)], None)?;
    let plan = match &opts.sequence {
        Some(seq) => {
            let total = plan.total_slots();
            if seq.len() < total {
                return Err(Error::Invalid(format!(
                    "sequence has {} terms, {total} needed",
                    seq.len()
                )));
            }
            SparseSequence::new(seq[..total].to_vec())?;
            plan.with_positions(seq[..total].to_vec())?
        }
        None => plan,
    };

    let mut slots = Vec::new();
    let mut values = Vec::new();
    for (i, a) in data.free_basis.iter().enumerate() {
        slots.push(Slot {
            class: SlotClass::FreeBasis,
            member: i,
            position: plan.position("A", i) as i64,
        });
        values.push(a.clone());
    }
    for (q, (_, u, v)) in pairs.iter().enumerate() {
        slots.push(Slot {
            class: SlotClass::CommutatorLeft,
            member: q,
            position: plan.position("U", q) as i64,
        });
        values.push(u.clone());
        slots.push(Slot {
            class: SlotClass::CommutatorRight,
            member: q,
            position: plan.position("V", q) as i64,
        });
        values.push(v.clone());
    }

    let line = ActiveGroup::free(1);
    let point = |x: i64| line.point(&[x]).expect("rank 1");
    // d and its c-conjugates, written down from the slot table
    let shifted_d = |by: i64| -> Result<BaseFunction<EffectiveGroup>> {
        let entries: Vec<(LatticePoint, GroupElement)> = slots
            .iter()
            .zip(&values)
            .map(|(s, v)| (point(s.position - by), v.clone()))
            .collect();
        BaseFunction::sparse(group.clone(), line.clone(), entries)
    };
    let window = WindowBox::around(&line, opts.window);
    let w = Arc::new(WreathGroup::new(
        group.clone(),
        line.clone(),
        WreathMode::Cartesian,
        EqualityPolicy::Window(window),
    )?);
    let c = w.axis_generator(0)?;
    let d = w.base_element(shifted_d(0)?)?;
    const D: usize = 1;

    let mut recovered = Vec::new();
    for (i, s) in slots.iter().filter(|s| s.class == SlotClass::FreeBasis).enumerate() {
        recovered.push(Recovered {
            name: format!("a{}", i + 1),
            word: d_conjugate(D, s.position),
            expected: w.base_element(shifted_d(s.position)?)?,
        });
    }
    let free_letters: Vec<usize> = (0..k).collect();
    let mut g_words = Vec::with_capacity(gens.len());
    for (j, dec) in decomps.iter().enumerate() {
        let mut word = Word::empty();
        for (i, &e) in dec.free_exponents.iter().enumerate() {
            word.push(i, e);
        }
        let qs: Vec<usize> = (0..r).filter(|&q| pairs[q].0 == j).collect();
        if !qs.is_empty() {
            let mut rec = Word::empty();
            for &q in &qs {
                let left = d_conjugate(D, plan.position("U", q) as i64);
                let right = d_conjugate(D, plan.position("V", q) as i64);
                rec = rec.mul(&left.commutator(&right));
            }
            let expected = BaseFunction::delta(group.clone(), line.clone(), &[0], derived_parts[j].clone())?;
            word.push(recovered.len(), 1);
            recovered.push(Recovered {
                name: format!("g'{}", j + 1),
                word: rec,
                expected: w.base_element(expected)?,
            });
        }
        g_words.push(word);
    }

    let (group_order, derived_len) = if group.is_finite() {
        let order = crate::group::subgroup_closure(group.as_ref(), gens, opts.closure_bound)?.len();
        (Some(order), Some(derived_length(group, opts.closure_bound)?))
    } else {
        (None, opts.derived_length)
    };
    let note = match &opts.sequence {
        Some(_) => "custom sequence".to_string(),
        None => "powers of two".to_string(),
    };
    Ok(EmbeddingWitness {
        construction: Construction::Theorem1,
        group_name: group.name().to_string(),
        h_names: vec!["c".into(), "d".into()],
        h_generators: vec![c, d],
        recovered,
        g_generators: gens.to_vec(),
        g_words,
        free_letters,
        layout: Layout {
            slots,
            c_order: None,
            note,
        },
        group_order,
        derived_length: derived_len,
        exponent_bound: None,
        facts: vec![
            ("free-rank".into(), k.to_string()),
            ("commutator-pairs".into(), r.to_string()),
        ],
        presentation: group.presentation().cloned(),
        wreath: w,
    })
}
