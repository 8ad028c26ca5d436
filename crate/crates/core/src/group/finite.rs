//! Breadth-first closure and the finite-group analyses built on it.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use indexmap::{IndexMap, IndexSet};
use num_integer::Integer;

use super::effective::{EffectiveGroup, GroupElement};
use super::word::Word;
use super::{commutator, Group};
use crate::error::{Error, Result};

pub const DEFAULT_CLOSURE_BOUND: usize = 1_000_000;

/// Longest product of commutators the decomposition oracle searches.
pub const MAX_DECOMPOSITION_LENGTH: usize = 4;

/// Largest group turned into a dense multiplication table.
pub const MAX_TABLE_ORDER: usize = 4096;

/// Smallest set containing `gens` closed under products and inverses.
///
/// Elements appear in breadth-first discovery order, identity first.
pub fn subgroup_closure<G>(group: &G, gens: &[G::Elem], bound: usize) -> Result<IndexSet<G::Elem>>
where
    G: Group + ?Sized,
    G::Elem: Hash + Eq,
{
    let mut steps: Vec<G::Elem> = Vec::with_capacity(gens.len() * 2);
    for g in gens {
        steps.push(g.clone());
        steps.push(group.inv(g));
    }
    let mut seen = IndexSet::new();
    seen.insert(group.identity());
    let mut frontier = 0;
    while frontier < seen.len() {
        let x = seen[frontier].clone();
        frontier += 1;
        for s in &steps {
            let y = group.mul(&x, s);
            if seen.insert(y) && seen.len() > bound {
                return Err(Error::ClosureOverflow { bound });
            }
        }
    }
    Ok(seen)
}

/// Shortest words (over generators and their inverses) for every element.
pub fn canonical_words<G>(group: &G, gens: &[G::Elem], bound: usize) -> Result<IndexMap<G::Elem, Word>>
where
    G: Group + ?Sized,
    G::Elem: Hash + Eq,
{
    let mut words = IndexMap::new();
    words.insert(group.identity(), Word::empty());
    let mut queue = VecDeque::from([group.identity()]);
    while let Some(x) = queue.pop_front() {
        let wx = words[&x].clone();
        for (i, g) in gens.iter().enumerate() {
            for e in [1i64, -1] {
                let step = if e == 1 { g.clone() } else { group.inv(g) };
                let y = group.mul(&x, &step);
                if !words.contains_key(&y) {
                    let mut wy = wx.clone();
                    wy.push(i, e);
                    words.insert(y.clone(), wy);
                    if words.len() > bound {
                        return Err(Error::ClosureOverflow { bound });
                    }
                    queue.push_back(y);
                }
            }
        }
    }
    Ok(words)
}

/// Closure of all pairwise commutators of `term`, built only from products of
/// commutators (so every element is such a product by construction).
fn commutator_closure<G>(group: &G, term: &IndexSet<G::Elem>, bound: usize) -> Result<IndexSet<G::Elem>>
where
    G: Group + ?Sized,
    G::Elem: Hash + Eq,
{
    let mut comms: IndexSet<G::Elem> = IndexSet::new();
    for a in term {
        for b in term {
            comms.insert(commutator(group, a, b));
        }
    }
    comms.swap_remove(&group.identity());
    let comms: Vec<_> = comms.into_iter().collect();
    let mut seen = IndexSet::new();
    seen.insert(group.identity());
    let mut frontier = 0;
    while frontier < seen.len() {
        let x = seen[frontier].clone();
        frontier += 1;
        for c in &comms {
            if seen.insert(group.mul(&x, c)) && seen.len() > bound {
                return Err(Error::ClosureOverflow { bound });
            }
        }
    }
    Ok(seen)
}

/// `G ⊇ G' ⊇ G'' ⊇ ...` until the series stabilises.
///
/// For a solvable group the last term is trivial.
pub fn derived_series_of<G>(group: &G, gens: &[G::Elem], bound: usize) -> Result<Vec<IndexSet<G::Elem>>>
where
    G: Group + ?Sized,
    G::Elem: Hash + Eq,
{
    let mut series = vec![subgroup_closure(group, gens, bound)?];
    loop {
        let last = series.last().expect("nonempty");
        if last.len() == 1 {
            return Ok(series);
        }
        let next = commutator_closure(group, last, bound)?;
        if next.len() == last.len() {
            return Ok(series);
        }
        series.push(next);
    }
}

pub fn derived_series(group: &EffectiveGroup, bound: usize) -> Result<Vec<IndexSet<GroupElement>>> {
    group.require_finite()?;
    derived_series_of(group, group.generators(), bound)
}

fn length_of_series<E>(series: &[IndexSet<E>]) -> Result<usize> {
    let last = series.last().expect("nonempty");
    if last.len() == 1 {
        Ok(series.len() - 1)
    } else {
        Err(Error::NotSolvable { order: last.len() })
    }
}

pub fn derived_length_of<G>(group: &G, gens: &[G::Elem], bound: usize) -> Result<usize>
where
    G: Group + ?Sized,
    G::Elem: Hash + Eq,
{
    length_of_series(&derived_series_of(group, gens, bound)?)
}

pub fn derived_length(group: &EffectiveGroup, bound: usize) -> Result<usize> {
    length_of_series(&derived_series(group, bound)?)
}

/// Preimages of a basis of `G/G'`: free part `a_i` and torsion part `(u_j, l_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianizationData {
    pub free_rank: usize,
    pub free_basis: Vec<GroupElement>,
    pub torsion: Vec<(GroupElement, u64)>,
}

impl AbelianizationData {
    pub fn torsion_orders(&self) -> Vec<u64> {
        self.torsion.iter().map(|(_, l)| *l).collect()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }
}

/// Abelianization of a finite group with its projection `G -> G/G'`.
#[derive(Clone, Debug)]
pub struct Abelianization {
    pub data: AbelianizationData,
    pub derived: IndexSet<GroupElement>,
    coordinates: HashMap<GroupElement, Vec<u64>>,
}

impl Abelianization {
    /// Exponents of the image of `g` along the torsion basis.
    pub fn project(&self, g: &GroupElement) -> Option<&[u64]> {
        self.coordinates.get(g).map(Vec::as_slice)
    }

    pub fn order(&self) -> u64 {
        self.data.torsion.iter().map(|(_, l)| l).product()
    }
}

/// Computes `G/G'` as a product of cyclic groups of prime-power order.
pub fn abelianization(group: &EffectiveGroup, bound: usize) -> Result<Abelianization> {
    group.require_finite()?;
    let elements = subgroup_closure(group, group.generators(), bound)?;
    let series = derived_series_of(group, group.generators(), bound)?;
    let derived = if series.len() > 1 {
        series[1].clone()
    } else {
        series[0].clone()
    };

    // Cosets of the normal subgroup G'.
    let mut coset_of: HashMap<GroupElement, usize> = HashMap::new();
    let mut reps: Vec<GroupElement> = Vec::new();
    for g in &elements {
        if coset_of.contains_key(g) {
            continue;
        }
        let id = reps.len();
        reps.push(g.clone());
        for h in &derived {
            coset_of.insert(group.mul(g, h), id);
        }
    }
    let q = reps.len();
    let qmul = |a: usize, b: usize| coset_of[&group.mul(&reps[a], &reps[b])];
    let qid = coset_of[&group.identity()];
    let qorder = |a: usize| {
        let mut k = 1u64;
        let mut x = a;
        while x != qid {
            x = qmul(x, a);
            k += 1;
        }
        k
    };

    // Primary decomposition, greedily splitting off cyclic factors of maximal order.
    let mut basis: Vec<(usize, u64)> = Vec::new();
    let mut remaining = q as u64;
    let mut p = 2u64;
    while remaining > 1 {
        if !remaining.is_multiple_of(p) {
            p += 1;
            continue;
        }
        while remaining.is_multiple_of(p) {
            remaining /= p;
        }
        let sylow: Vec<usize> = (0..q).filter(|&x| is_power_of(qorder(x), p)).collect();
        let mut span: IndexSet<usize> = IndexSet::from([qid]);
        while span.len() < sylow.len() {
            let order_mod = |x: usize| {
                let mut k = 1u64;
                let mut y = x;
                while !span.contains(&y) {
                    y = qmul(y, x);
                    k += 1;
                }
                k
            };
            let (best, best_order) = sylow
                .iter()
                .map(|&x| (x, order_mod(x)))
                .max_by_key(|&(x, k)| (k, std::cmp::Reverse(x)))
                .expect("sylow subgroup nonempty");
            let lift = span
                .iter()
                .map(|&h| qmul(best, h))
                .find(|&y| qorder(y) == best_order)
                .expect("maximal-order coset has a lift of the same order");
            basis.push((lift, best_order));
            let mut grown = IndexSet::new();
            let mut power = qid;
            for _ in 0..best_order {
                for &h in &span {
                    grown.insert(qmul(power, h));
                }
                power = qmul(power, lift);
            }
            span = grown;
        }
        p += 1;
    }

    // Coordinates of every coset along the basis.
    let mut coords_of_coset: HashMap<usize, Vec<u64>> = HashMap::from([(qid, vec![0; basis.len()])]);
    for (k, &(b, order)) in basis.iter().enumerate() {
        let existing: Vec<(usize, Vec<u64>)> = coords_of_coset.iter().map(|(c, v)| (*c, v.clone())).collect();
        for (c, v) in existing {
            let mut x = c;
            for e in 1..order {
                x = qmul(x, b);
                let mut w = v.clone();
                w[k] = e;
                coords_of_coset.insert(x, w);
            }
        }
    }
    debug_assert_eq!(coords_of_coset.len(), q);
    let coordinates = elements
        .iter()
        .map(|g| (g.clone(), coords_of_coset[&coset_of[g]].clone()))
        .collect();

    let torsion = basis.iter().map(|&(b, order)| (reps[b].clone(), order)).collect();
    Ok(Abelianization {
        data: AbelianizationData {
            free_rank: 0,
            free_basis: vec![],
            torsion,
        },
        derived,
        coordinates,
    })
}

fn is_power_of(mut n: u64, p: u64) -> bool {
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

/// One factor `[u, v]` of a commutator decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutatorFactor {
    pub u: GroupElement,
    pub v: GroupElement,
    pub u_word: Word,
    pub v_word: Word,
}

/// `target = [u_1, v_1] ... [u_r, v_r]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutatorDecomposition {
    pub target: GroupElement,
    pub factors: Vec<CommutatorFactor>,
}

impl CommutatorDecomposition {
    pub fn length(&self) -> usize {
        self.factors.len()
    }

    pub fn evaluate(&self, group: &EffectiveGroup) -> GroupElement {
        self.factors.iter().fold(group.identity(), |acc, f| {
            group.mul(&acc, &commutator(group, &f.u, &f.v))
        })
    }
}

/// Shortest product of single commutators equal to `g`, by breadth-first search.
pub fn commutator_decomposition_oracle(
    group: &EffectiveGroup,
    g: &GroupElement,
    bound: usize,
) -> Result<CommutatorDecomposition> {
    group.require_finite()?;
    group.check(g)?;
    let words = canonical_words(group, group.generators(), bound)?;
    let series = derived_series_of(group, group.generators(), bound)?;
    let derived = series.get(1).unwrap_or(&series[0]);
    if !derived.contains(g) {
        return Err(Error::NotInDerivedSubgroup);
    }

    // First pair (in canonical order) realising each commutator value.
    let mut pair_of: IndexMap<GroupElement, (GroupElement, GroupElement)> = IndexMap::new();
    for u in words.keys() {
        for v in words.keys() {
            pair_of
                .entry(commutator(group, u, v))
                .or_insert_with(|| (u.clone(), v.clone()));
        }
    }

    let mut parent: HashMap<GroupElement, Option<(GroupElement, GroupElement)>> =
        HashMap::from([(group.identity(), None)]);
    let mut layer = vec![group.identity()];
    for _ in 0..=MAX_DECOMPOSITION_LENGTH {
        if parent.contains_key(g) {
            break;
        }
        let mut next = Vec::new();
        for x in &layer {
            for c in pair_of.keys() {
                let y = group.mul(x, c);
                if !parent.contains_key(&y) {
                    parent.insert(y.clone(), Some((x.clone(), c.clone())));
                    next.push(y);
                }
            }
        }
        layer = next;
    }
    if !parent.contains_key(g) {
        return Err(Error::DecompositionTooLong {
            max_len: MAX_DECOMPOSITION_LENGTH,
        });
    }
    let mut factors = Vec::new();
    let mut cur = g.clone();
    while let Some(Some((prev, c))) = parent.get(&cur) {
        let (u, v) = pair_of[c].clone();
        factors.push(CommutatorFactor {
            u_word: words[&u].clone(),
            v_word: words[&v].clone(),
            u,
            v,
        });
        cur = prev.clone();
    }
    factors.reverse();
    if factors.len() > MAX_DECOMPOSITION_LENGTH {
        return Err(Error::DecompositionTooLong {
            max_len: MAX_DECOMPOSITION_LENGTH,
        });
    }
    let decomposition = CommutatorDecomposition {
        target: g.clone(),
        factors,
    };
    debug_assert_eq!(decomposition.evaluate(group), *g);
    Ok(decomposition)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorRole {
    FreeBasis(usize),
    Derived(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorDescriptor {
    pub role: GeneratorRole,
    pub element: GroupElement,
}

/// Generating data `{a_i} ∪ gens(G')` of the finite-index subgroup `K = gp(a_i, G')`.
///
/// For finite groups a generating set of `G'` is computed greedily from the
/// commutators; for infinite backends the declared generators are used as given.
pub fn finite_index_subgroup_data(
    group: &EffectiveGroup,
    data: &AbelianizationData,
    declared_derived: &[GroupElement],
    bound: usize,
) -> Result<Vec<GeneratorDescriptor>> {
    for g in data.free_basis.iter().chain(declared_derived) {
        group.check(g)?;
    }
    if data.free_basis.len() != data.free_rank {
        return Err(Error::Invalid(format!(
            "free rank {} but {} basis preimages",
            data.free_rank,
            data.free_basis.len()
        )));
    }
    let derived_gens = if group.is_finite() {
        let series = derived_series(group, bound)?;
        let derived = series.get(1).unwrap_or(&series[0]);
        let mut gens: Vec<GroupElement> = Vec::new();
        let mut span = subgroup_closure(group, &gens, bound)?;
        let elements: Vec<_> = series[0].iter().cloned().collect();
        'outer: for a in &elements {
            for b in &elements {
                if span.len() == derived.len() {
                    break 'outer;
                }
                let c = commutator(group, a, b);
                if !span.contains(&c) {
                    gens.push(c);
                    span = subgroup_closure(group, &gens, bound)?;
                }
            }
        }
        gens
    } else {
        declared_derived.to_vec()
    };
    let mut out: Vec<GeneratorDescriptor> = data
        .free_basis
        .iter()
        .enumerate()
        .map(|(i, a)| GeneratorDescriptor {
            role: GeneratorRole::FreeBasis(i),
            element: a.clone(),
        })
        .collect();
    out.extend(derived_gens.into_iter().enumerate().map(|(k, z)| GeneratorDescriptor {
        role: GeneratorRole::Derived(k),
        element: z,
    }));
    Ok(out)
}

/// A finite group as a dense multiplication table over `0..n`, identity `0`.
#[derive(Clone, Debug)]
pub struct FiniteGroup<E> {
    elements: Vec<E>,
    index: HashMap<E, u32>,
    table: Vec<u32>,
    inverse: Vec<u32>,
    generators: Vec<u32>,
}

impl<E: Clone + Hash + Eq> FiniteGroup<E> {
    /// Enumerates the subgroup generated by `gens` and tabulates it.
    pub fn from_group<G>(group: &G, gens: &[E], bound: usize) -> Result<Self>
    where
        G: Group<Elem = E> + ?Sized,
    {
        let limit = bound.min(MAX_TABLE_ORDER);
        let elements: Vec<E> = subgroup_closure(group, gens, limit)?.into_iter().collect();
        let n = elements.len();
        let index: HashMap<E, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as u32))
            .collect();
        let mut table = Vec::with_capacity(n * n);
        for a in &elements {
            for b in &elements {
                table.push(index[&group.mul(a, b)]);
            }
        }
        let inverse = elements.iter().map(|a| index[&group.inv(a)]).collect();
        let generators = gens.iter().map(|g| index[g]).collect();
        Ok(Self {
            elements,
            index,
            table,
            inverse,
            generators,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, code: u32) -> &E {
        &self.elements[code as usize]
    }

    pub fn code(&self, e: &E) -> Option<u32> {
        self.index.get(e).copied()
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.elements.len() as u32
    }

    pub fn element_order(&self, code: u32) -> u64 {
        let mut k = 1;
        let mut x = code;
        while x != 0 {
            x = self.table[x as usize * self.order() + code as usize];
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> u64 {
        self.elements().fold(1u64, |e, x| e.lcm(&self.element_order(x)))
    }
}

impl<E: Clone + Hash + Eq + std::fmt::Display + Send + Sync> Group for FiniteGroup<E> {
    type Elem = u32;

    fn identity(&self) -> u32 {
        0
    }

    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.table[*a as usize * self.elements.len() + *b as usize]
    }

    #[inline]
    fn inv(&self, a: &u32) -> u32 {
        self.inverse[*a as usize]
    }

    fn elem_eq(&self, a: &u32, b: &u32) -> bool {
        a == b
    }

    fn render(&self, a: &u32) -> String {
        self.elements[*a as usize].to_string()
    }
}
