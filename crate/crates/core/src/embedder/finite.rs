use std::sync::Arc;

use num_integer::Integer;

use super::{d_conjugate, distinguisher_word, Construction, EmbeddingWitness, Layout, Recovered, Slot, SlotClass};
use crate::basefun::{grid_function, ActiveGroup, BaseFunction};
use crate::error::{Error, Result};
use crate::group::{commutator, derived_length_of, EffectiveGroup, FiniteGroup, GroupElement, Word};
use crate::seqtools::{plan_supports, search_layout, smallest_admissible_modulus, ModularConstraint};
use crate::wreath::{EqualityPolicy, WreathGroup, WreathMode};

type Passive = FiniteGroup<GroupElement>;

#[derive(Clone, Debug)]
pub struct FiniteOptions {
    /// Order of `c` for the `s`-construction; defaults to `s^2`.
    pub c_order: Option<u64>,
    pub closure_bound: usize,
}

impl Default for FiniteOptions {
    fn default() -> Self {
        Self {
            c_order: None,
            closure_bound: crate::group::DEFAULT_CLOSURE_BOUND,
        }
    }
}

/// Which pair of degrees the `j`-th distinguisher carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistinguisherScheme {
    /// `f_j = u_j^(E_{m-j}(y1) E_j(y2))`.
    Literal,
    /// `f_j = u_j^(E_{m-j}(y1) E_{j-1}(y2))`: total degree `m - 1`, so it folds
    /// onto `Z_e x Z_e` more often.
    Diagonal,
}

impl DistinguisherScheme {
    /// `(degree along b1, degree along b2)` of `f_j`, `1 <= j <= m`.
    pub fn degrees(self, j: usize, m: usize) -> (u32, u32) {
        match self {
            DistinguisherScheme::Literal => ((m - j) as u32, j as u32),
            DistinguisherScheme::Diagonal => ((m - j) as u32, (j - 1) as u32),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            DistinguisherScheme::Literal => "literal",
            DistinguisherScheme::Diagonal => "diagonal",
        }
    }
}

fn tabulate(group: &EffectiveGroup, bound: usize) -> Result<Arc<Passive>> {
    for (i, g) in group.generators().iter().enumerate() {
        if group.element_order(g).is_err() {
            return Err(Error::FiniteOrdersRequired(format!(
                "generator {} = {g} has no detectable finite order",
                i + 1
            )));
        }
    }
    Ok(Arc::new(FiniteGroup::from_group(group, group.generators(), bound)?))
}

/// Pairs `(mu(m), mu(m'))`, 1-based, for the generator block after `offset` slots.
fn generator_pairs(offset: usize, n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            pairs.push((offset + a + 1, offset + b + 1));
        }
    }
    pairs
}

/// `G` finite with generators of orders `l_i`, `m` of them: `H` inside
/// `G wr (Z_c x Z_s x Z_s)` with `s = lcm(l_i^m)` and `c = s^2` by default.
pub fn build_theorem5_witness(group: &EffectiveGroup, opts: &FiniteOptions) -> Result<EmbeddingWitness<Passive>> {
    let fg = tabulate(group, opts.closure_bound)?;
    let m = fg.generators().len();
    let mut s = 1u64;
    for &g in fg.generators() {
        let l = fg.element_order(g);
        let p = l
            .checked_pow(m as u32)
            .ok_or_else(|| Error::Invalid(format!("{l}^{m} overflows")))?;
        s = s.lcm(&p);
    }
    let c_order = match opts.c_order {
        Some(c) => c,
        None => s
            .checked_mul(s)
            .ok_or_else(|| Error::Invalid(format!("{s}^2 overflows")))?,
    };
    let pairs = generator_pairs(m, m);
    let positions = if fg.order() == 1 {
        plan_supports(&[("F", m), ("M", m)], None)?.positions()
    } else {
        let constraint = ModularConstraint {
            modulus: c_order,
            separated_pairs: pairs,
        };
        plan_supports(&[("F", m), ("M", m)], Some(&constraint))?.positions()
    };
    let facts = vec![
        ("s".to_string(), s.to_string()),
        (
            "orders".to_string(),
            format!(
                "{:?}",
                fg.generators().iter().map(|&g| fg.element_order(g)).collect::<Vec<_>>()
            ),
        ),
    ];
    assemble(
        group,
        fg,
        Construction::Theorem5,
        c_order,
        s,
        DistinguisherScheme::Literal,
        positions,
        "powers of two".into(),
        None,
        facts,
        opts.closure_bound,
    )
}

/// `G` finite of exponent `e` with `m` generators: `H` inside
/// `G wr (Z_{e^{m+1}} x Z_e x Z_e)`, of exponent dividing `e^{m+2}`.
pub fn build_corollary6_witness(group: &EffectiveGroup, opts: &FiniteOptions) -> Result<EmbeddingWitness<Passive>> {
    let fg = tabulate(group, opts.closure_bound)?;
    let m = fg.generators().len();
    let e = fg.exponent();
    let overflow = || Error::Invalid(format!("{e}^{} overflows", m + 2));
    let modulus = e.checked_pow(m as u32 + 1).ok_or_else(overflow)?;
    let bound = e.checked_pow(m as u32 + 2).ok_or_else(overflow)?;
    let pairs = generator_pairs(m, m);

    let (positions, layout_note) = if fg.order() == 1 {
        (
            plan_supports(&[("F", m), ("M", m)], None)?.positions(),
            "powers of two".to_string(),
        )
    } else {
        let constraint = ModularConstraint {
            modulus,
            separated_pairs: pairs.clone(),
        };
        match plan_supports(&[("F", m), ("M", m)], Some(&constraint)) {
            Ok(plan) => (plan.positions(), "powers of two".into()),
            Err(Error::Capacity { .. }) => match search_layout(2 * m, modulus, &pairs) {
                Some(p) => (p, format!("searched residues mod {modulus}")),
                None => {
                    let p = plan_supports(&[("F", m), ("M", m)], None)?.positions();
                    return Err(Error::Capacity {
                        modulus,
                        suggested: smallest_admissible_modulus(&p, modulus, &pairs),
                    });
                }
            },
            Err(err) => return Err(err),
        }
    };

    let mut last = None;
    for scheme in [DistinguisherScheme::Literal, DistinguisherScheme::Diagonal] {
        if scheme == DistinguisherScheme::Diagonal && m < 2 {
            break;
        }
        let facts = vec![("e".to_string(), e.to_string())];
        match assemble(
            group,
            fg.clone(),
            Construction::Corollary6,
            modulus,
            e,
            scheme,
            positions.clone(),
            layout_note.clone(),
            Some(bound),
            facts,
            opts.closure_bound,
        ) {
            Err(err @ Error::NotPeriodic(_)) => last = Some(err),
            other => return other,
        }
    }
    Err(last.unwrap_or_else(|| Error::NotPeriodic("no distinguisher scheme folds".into())))
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    group: &EffectiveGroup,
    fg: Arc<Passive>,
    construction: Construction,
    c_order: u64,
    axis_order: u64,
    scheme: DistinguisherScheme,
    positions: Vec<u64>,
    note: String,
    exponent_bound: Option<u64>,
    mut facts: Vec<(String, String)>,
    closure_bound: usize,
) -> Result<EmbeddingWitness<Passive>> {
    let gens: Vec<u32> = fg.generators().to_vec();
    let m = gens.len();
    let active = ActiveGroup::cyclic(&[c_order, axis_order, axis_order])?;
    let plane = active.without_axis(0);

    let mut slots = Vec::with_capacity(2 * m);
    let mut slices = Vec::with_capacity(2 * m);
    let mut degrees = Vec::with_capacity(m);
    for (j, &u) in gens.iter().enumerate() {
        let (d1, d2) = scheme.degrees(j + 1, m);
        degrees.push((d1, d2));
        slots.push(Slot {
            class: SlotClass::Distinguisher,
            member: j,
            position: positions[j] as i64,
        });
        slices.push(grid_function(fg.clone(), plane.clone(), u, &[(0, d1), (1, d2)])?);
    }
    for (j, &u) in gens.iter().enumerate() {
        slots.push(Slot {
            class: SlotClass::Generator,
            member: j,
            position: positions[m + j] as i64,
        });
        slices.push(BaseFunction::constant(fg.clone(), plane.clone(), u));
    }
    let shifted_d = |by: i64| {
        BaseFunction::sliced(
            fg.clone(),
            active.clone(),
            slots.iter().zip(&slices).map(|(s, f)| (s.position - by, f.clone())),
        )
    };
    let at_origin = |value: u32| {
        BaseFunction::sliced(
            fg.clone(),
            active.clone(),
            [(0, BaseFunction::constant(fg.clone(), plane.clone(), value))],
        )
    };

    let w = Arc::new(WreathGroup::new(
        fg.clone(),
        active.clone(),
        WreathMode::Direct,
        EqualityPolicy::Exact,
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
    for (j, &u) in gens.iter().enumerate() {
        let (d1, d2) = degrees[j];
        recovered.push(Recovered {
            name: format!("u{}", j + 1),
            word: distinguisher_word(D, B1, B2, d2 as usize, d1 as usize, positions[j] as i64),
            expected: w.base_element(at_origin(u)?)?,
        });
    }
    for a in 0..m {
        for b in a + 1..m {
            let left = d_conjugate(D, positions[m + a] as i64);
            let right = d_conjugate(D, positions[m + b] as i64);
            recovered.push(Recovered {
                name: format!("g{}_{}", a + 1, b + 1),
                word: left.commutator(&right),
                expected: w.base_element(at_origin(commutator(fg.as_ref(), &gens[a], &gens[b]))?)?,
            });
        }
    }

    facts.push(("scheme".into(), scheme.tag().into()));
    facts.push((
        "degrees".into(),
        degrees
            .iter()
            .map(|(a, b)| format!("({a}, {b})"))
            .collect::<Vec<_>>()
            .join(" "),
    ));
    let derived = derived_length_of(fg.as_ref(), &gens, closure_bound)?;
    Ok(EmbeddingWitness {
        construction,
        group_name: group.name().to_string(),
        h_names: ["c", "b1", "b2", "d"].map(String::from).to_vec(),
        h_generators,
        recovered,
        g_words: (0..m).map(Word::generator).collect(),
        g_generators: gens,
        free_letters: Vec::new(),
        layout: Layout {
            slots,
            c_order: Some(c_order),
            note,
        },
        group_order: Some(fg.order()),
        derived_length: Some(derived),
        exponent_bound,
        facts,
        presentation: group.presentation().cloned(),
        wreath: w,
    })
}
