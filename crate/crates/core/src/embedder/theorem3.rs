use std::sync::Arc;

use super::{d_conjugate, distinguisher_word, Construction, EmbeddingWitness, Layout, Recovered, Slot, SlotClass};
use crate::basefun::{grid_distinguisher, ActiveGroup, BaseFunction, WindowBox};
use crate::error::{Error, Result};
use crate::group::{
    canonical_words, commutator, derived_length, AbelianizationData, EffectiveGroup, GroupElement, Word,
};
use crate::seqtools::plan_supports;
use crate::wreath::{EqualityPolicy, WreathGroup, WreathMode};

#[derive(Clone, Debug)]
pub struct Theorem3Options {
    /// Radius of the comparison cube.
    pub window: i64,
    /// Generators of `G` as words in the recovered elements
    /// `a1.., u1.., g1_2, g1_3, ..` (in that order).
    pub expressions: Option<Vec<Word>>,
    pub derived_length: Option<usize>,
    pub closure_bound: usize,
}

impl Default for Theorem3Options {
    fn default() -> Self {
        Self {
            window: 8,
            expressions: None,
            derived_length: None,
            closure_bound: crate::group::DEFAULT_CLOSURE_BOUND,
        }
    }
}

/// Names of the recovered elements, in order, for `k` free generators, `t`
/// torsion generators and `n` generators of `G`.
pub fn theorem3_recovered_names(k: usize, t: usize, n: usize) -> Vec<String> {
    let mut names: Vec<String> = (1..=k).map(|i| format!("a{i}")).collect();
    names.extend((1..=t).map(|j| format!("u{j}")));
    for m in 1..=n {
        names.extend((m + 1..=n).map(|m2| format!("g{m}_{m2}")));
    }
    names
}

/// Any finitely generated `G` with finitely generated abelianization inside
/// `G Wr Z^3`, `H = gp(c, b1, b2, d)`.
pub fn build_theorem3_witness(
    group: &Arc<EffectiveGroup>,
    data: &AbelianizationData,
    opts: &Theorem3Options,
) -> Result<EmbeddingWitness<EffectiveGroup>> {
    let gens = group.generators();
    let k = data.free_rank;
    let t = data.torsion.len();
    let n = gens.len();
    if data.free_basis.len() != k {
        return Err(Error::Invalid(format!(
            "free rank {k} but {} basis preimages",
            data.free_basis.len()
        )));
    }
    for (u, l) in &data.torsion {
        group.check(u)?;
        if *l < 2 {
            return Err(Error::Invalid(format!("torsion order {l} for {u}")));
        }
        // the element itself must have finite order; the declared l is its order mod G'
        let order = group.element_order(u)?;
        if order % l != 0 {
            return Err(Error::Invalid(format!("{u} has order {order}, not a multiple of {l}")));
        }
    }
    for a in &data.free_basis {
        group.check(a)?;
    }

    let plan = plan_supports(&[("F", t), ("I", k), ("M", n)], None)?;
    let space = ActiveGroup::free(3);
    let plane = space.without_axis(0);
    let mut slots = Vec::new();
    let mut slices: Vec<BaseFunction<EffectiveGroup>> = Vec::new();
    for (j, (u, _)) in data.torsion.iter().enumerate() {
        slots.push(Slot {
            class: SlotClass::Distinguisher,
            member: j,
            position: plan.position("F", j) as i64,
        });
        slices.push(grid_distinguisher(group.clone(), plane.clone(), u.clone(), j + 1, t)?);
    }
    for (i, a) in data.free_basis.iter().enumerate() {
        slots.push(Slot {
            class: SlotClass::FreeBasis,
            member: i,
            position: plan.position("I", i) as i64,
        });
        slices.push(BaseFunction::constant(group.clone(), plane.clone(), a.clone()));
    }
    for (m, g) in gens.iter().enumerate() {
        slots.push(Slot {
            class: SlotClass::Generator,
            member: m,
            position: plan.position("M", m) as i64,
        });
        slices.push(BaseFunction::constant(group.clone(), plane.clone(), g.clone()));
    }
    let shifted_d = |by: i64| {
        BaseFunction::sliced(
            group.clone(),
            space.clone(),
            slots.iter().zip(&slices).map(|(s, f)| (s.position - by, f.clone())),
        )
    };
    let at_origin = |value: GroupElement| {
        BaseFunction::sliced(
            group.clone(),
            space.clone(),
            [(0, BaseFunction::constant(group.clone(), plane.clone(), value))],
        )
    };

    let w = Arc::new(WreathGroup::new(
        group.clone(),
        space.clone(),
        WreathMode::Cartesian,
        EqualityPolicy::Window(WindowBox::around(&space, opts.window)),
    )?);
    const B1: usize = 1;
    const B2: usize = 2;
    const D: usize = 3;
    let h_generators = vec![
        w.axis_generator(0)?,
        w.axis_generator(1)?,
        w.axis_generator(2)?,
        w.base_element(shifted_d(0)?)?,
    ];

    let mut recovered = Vec::new();
    for i in 0..k {
        let s = plan.position("I", i) as i64;
        recovered.push(Recovered {
            name: format!("a{}", i + 1),
            word: d_conjugate(D, s),
            expected: w.base_element(shifted_d(s)?)?,
        });
    }
    for (j, (u, _)) in data.torsion.iter().enumerate() {
        let s = plan.position("F", j) as i64;
        recovered.push(Recovered {
            name: format!("u{}", j + 1),
            word: distinguisher_word(D, B1, B2, j + 1, t - j - 1, s),
            expected: w.base_element(at_origin(u.clone())?)?,
        });
    }
    for m in 0..n {
        for m2 in m + 1..n {
            let left = d_conjugate(D, plan.position("M", m) as i64);
            let right = d_conjugate(D, plan.position("M", m2) as i64);
            recovered.push(Recovered {
                name: format!("g{}_{}", m + 1, m2 + 1),
                word: left.commutator(&right),
                expected: w.base_element(at_origin(commutator(group.as_ref(), &gens[m], &gens[m2]))?)?,
            });
        }
    }

    let projections: Vec<GroupElement> = recovered
        .iter()
        .map(|r| r.expected.base().eval(&space.origin()))
        .collect();
    let g_words = match &opts.expressions {
        Some(words) => {
            if words.len() != n {
                return Err(Error::ArityMismatch {
                    expected: n,
                    got: words.len(),
                });
            }
            if let Some(bad) = words
                .iter()
                .filter_map(|w| w.max_generator())
                .find(|&g| g >= recovered.len())
            {
                return Err(Error::GeneratorOutOfRange {
                    index: bad,
                    count: recovered.len(),
                });
            }
            words.clone()
        }
        None => express_generators(group, gens, &projections, opts.closure_bound)?,
    };

    let (group_order, derived_len) = if group.is_finite() {
        let order = crate::group::subgroup_closure(group.as_ref(), gens, opts.closure_bound)?.len();
        (Some(order), Some(derived_length(group, opts.closure_bound)?))
    } else {
        (None, opts.derived_length)
    };
    Ok(EmbeddingWitness {
        construction: Construction::Theorem3,
        group_name: group.name().to_string(),
        h_names: ["c", "b1", "b2", "d"].map(String::from).to_vec(),
        h_generators,
        recovered,
        g_generators: gens.to_vec(),
        g_words,
        free_letters: (0..k).collect(),
        layout: Layout {
            slots,
            c_order: None,
            note: "powers of two".into(),
        },
        group_order,
        derived_length: derived_len,
        exponent_bound: None,
        facts: vec![
            ("free-rank".into(), k.to_string()),
            ("torsion-orders".into(), format!("{:?}", data.torsion_orders())),
        ],
        presentation: group.presentation().cloned(),
        wreath: w,
    })
}

/// Writes each generator as a word in the recovered projections: directly when a
/// generator is itself a projection, otherwise by breadth-first search in a finite `G`.
fn express_generators(
    group: &Arc<EffectiveGroup>,
    gens: &[GroupElement],
    projections: &[GroupElement],
    bound: usize,
) -> Result<Vec<Word>> {
    let direct: Option<Vec<Word>> = gens
        .iter()
        .map(|g| projections.iter().position(|p| p == g).map(Word::generator))
        .collect();
    if let Some(words) = direct {
        return Ok(words);
    }
    if !group.is_finite() {
        return Err(Error::Invalid(
            "generator expressions are required for infinite groups whose generators are not recovered directly".into(),
        ));
    }
    let words = canonical_words(group.as_ref(), projections, bound)?;
    gens.iter()
        .map(|g| {
            words.get(g).cloned().ok_or_else(|| {
                Error::Invalid(format!(
                    "{g} is not in the subgroup generated by the recovered elements"
                ))
            })
        })
        .collect()
}
