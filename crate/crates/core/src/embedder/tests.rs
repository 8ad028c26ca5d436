use std::sync::Arc;

use super::*;
use crate::group::{commutator, AbelianizationData, EffectiveGroup, Group, Presentation};
use crate::Error;

fn cyclic(n: u64) -> EffectiveGroup {
    EffectiveGroup::cyclic(&format!("Z{n}"), Some(n))
        .unwrap()
        .with_presentation(Presentation::parse(1, &[&format!("x1^{n}")]).unwrap())
        .unwrap()
}

fn klein() -> EffectiveGroup {
    EffectiveGroup::permutation("Z2xZ2", 4, &["(1 2)", "(3 4)"])
        .unwrap()
        .with_presentation(Presentation::parse(2, &["x1^2", "x2^2", "[x1, x2]"]).unwrap())
        .unwrap()
}

fn heisenberg() -> (Arc<EffectiveGroup>, AbelianizationData, Vec<GeneratorDecomposition>) {
    let g = EffectiveGroup::matrix(
        "H3",
        3,
        &[
            &[1, 1, 0, 0, 1, 0, 0, 0, 1],
            &[1, 0, 0, 0, 1, 1, 0, 0, 1],
            &[1, 0, 1, 0, 1, 0, 0, 0, 1],
        ],
    )
    .unwrap();
    let (x, y, z) = (
        g.generators()[0].clone(),
        g.generators()[1].clone(),
        g.generators()[2].clone(),
    );
    assert_eq!(commutator(&g, &x, &y), z);
    let g = g
        .with_presentation(Presentation::parse(3, &["[x1, x2] x3^-1", "[x1, x3]", "[x2, x3]"]).unwrap())
        .unwrap();
    let data = AbelianizationData {
        free_rank: 2,
        free_basis: vec![x.clone(), y.clone()],
        torsion: vec![],
    };
    let decomps = vec![
        GeneratorDecomposition {
            free_exponents: vec![1, 0],
            commutators: vec![],
        },
        GeneratorDecomposition {
            free_exponents: vec![0, 1],
            commutators: vec![],
        },
        GeneratorDecomposition {
            free_exponents: vec![0, 0],
            commutators: vec![(x, y)],
        },
    ];
    (Arc::new(g), data, decomps)
}

fn z_times_z2() -> (Arc<EffectiveGroup>, AbelianizationData) {
    let g = EffectiveGroup::matrix(
        "ZxZ2",
        3,
        &[&[1, 1, 0, 0, 1, 0, 0, 0, 1], &[1, 0, 0, 0, 1, 0, 0, 0, -1]],
    )
    .unwrap()
    .with_presentation(Presentation::parse(2, &["[x1, x2]", "x2^2"]).unwrap())
    .unwrap();
    let (a, u) = (g.generators()[0].clone(), g.generators()[1].clone());
    let data = AbelianizationData {
        free_rank: 1,
        free_basis: vec![a],
        torsion: vec![(u, 2)],
    };
    (Arc::new(g), data)
}

fn passes<G: Group>(w: &EmbeddingWitness<G>) -> EmbeddingCertificate
where
    G::Elem: std::hash::Hash + Eq,
{
    let cert = verify_witness(w, None, &VerifyOptions::default()).unwrap();
    assert!(cert.verdict(), "{}", cert.to_text());
    cert
}

#[test]
fn theorem5_cyclic() {
    for (n, size) in [(2, 16), (3, 81), (4, 256)] {
        let w = build_theorem5_witness(&cyclic(n), &FiniteOptions::default()).unwrap();
        assert_eq!(w.layout.positions(), vec![2, 4]);
        let cert = passes(&w);
        assert_eq!(cert.stat("active-order"), Some(size.to_string().as_str()));
        assert_eq!(cert.mode, CertificateMode::Exact);
    }
}

#[test]
fn theorem5_klein_needs_larger_c() {
    let err = build_theorem5_witness(&klein(), &FiniteOptions::default())
        .err()
        .unwrap();
    assert!(
        matches!(
            err,
            Error::Capacity {
                modulus: 16,
                suggested: 32
            }
        ),
        "{err}"
    );
    let w = build_theorem5_witness(
        &klein(),
        &FiniteOptions {
            c_order: Some(32),
            ..Default::default()
        },
    )
    .unwrap();
    let cert = passes(&w);
    assert_eq!(cert.stat("active-order"), Some("512"));
    assert_eq!(cert.stat("derived-length"), Some("1"));
}

#[test]
fn corollary6_klein() {
    let w = build_corollary6_witness(&klein(), &FiniteOptions::default()).unwrap();
    let cert = passes(&w);
    assert_eq!(cert.stat("active-order"), Some("32"));
    assert_eq!(cert.stat("scheme"), Some("diagonal"));
    assert!(cert.check("exponent-bound").unwrap().passed);
    assert_eq!(w.exponent_bound, Some(16));
}

#[test]
fn theorem5_trivial_group() {
    let g = EffectiveGroup::cyclic("1", Some(1)).unwrap();
    let w = build_theorem5_witness(&g, &FiniteOptions::default()).unwrap();
    assert!(w.recovered.is_empty());
    passes(&w);
}

#[test]
fn theorem5_rejects_infinite_orders() {
    let (g, _) = z_times_z2();
    let err = build_theorem5_witness(&g, &FiniteOptions::default()).err().unwrap();
    assert!(matches!(err, Error::FiniteOrdersRequired(_)), "{err}");
}

#[test]
fn theorem1_heisenberg() {
    let (g, data, decomps) = heisenberg();
    let w = build_theorem1_witness(&g, &data, &decomps, &Theorem1Options::default()).unwrap();
    assert_eq!(w.layout.positions(), vec![2, 4, 8, 16]);
    let cert = passes(&w);
    assert!(matches!(cert.mode, CertificateMode::Window(_)));
    assert_eq!(w.h_generators.len(), 2);
}

#[test]
fn theorem1_even_sequence_fails() {
    let (g, data, decomps) = heisenberg();
    let opts = Theorem1Options {
        sequence: Some(vec![1, 2, 3, 4]),
        ..Default::default()
    };
    let w = build_theorem1_witness(&g, &data, &decomps, &opts).unwrap();
    let cert = verify_witness(&w, None, &VerifyOptions::default()).unwrap();
    assert!(!cert.verdict());
    assert!(!cert.check("recovery-values").unwrap().passed);
}

#[test]
fn theorem1_requires_free_abelianization() {
    let (g, data) = z_times_z2();
    let err = build_theorem1_witness(&g, &data, &[], &Theorem1Options::default())
        .err()
        .unwrap();
    assert!(matches!(err, Error::AbelianizationNotFree));
}

#[test]
fn theorem1_checks_decompositions() {
    let (g, data, mut decomps) = heisenberg();
    decomps[2].commutators.clear();
    let err = build_theorem1_witness(&g, &data, &decomps, &Theorem1Options::default())
        .err()
        .unwrap();
    assert!(matches!(err, Error::Invalid(_)));
}

#[test]
fn theorem3_z_times_z2() {
    let (g, data) = z_times_z2();
    let w = build_theorem3_witness(&g, &data, &Theorem3Options::default()).unwrap();
    assert_eq!(w.layout.positions(), vec![2, 4, 8, 16]);
    let cert = passes(&w);
    assert!(cert.check("exponent-sums").unwrap().passed);
}

#[test]
fn theorem3_finite_group_without_free_part() {
    let g = Arc::new(cyclic(2));
    let u = g.generators()[0].clone();
    let data = AbelianizationData {
        free_rank: 0,
        free_basis: vec![],
        torsion: vec![(u, 2)],
    };
    let w = build_theorem3_witness(&g, &data, &Theorem3Options::default()).unwrap();
    assert_eq!(w.layout.positions(), vec![2, 4]);
    passes(&w);
}

#[test]
fn corrupted_d_is_caught() {
    let mut w = build_theorem5_witness(&cyclic(2), &FiniteOptions::default()).unwrap();
    w.corrupt_d(&[1, 0, 0], 1).unwrap();
    let cert = verify_witness(&w, None, &VerifyOptions::default()).unwrap();
    assert!(!cert.verdict());
    let check = cert.check("recovery-values").unwrap();
    assert!(check.counterexample.is_some());
}

#[test]
fn certificates_are_deterministic() {
    let w = build_theorem5_witness(&cyclic(3), &FiniteOptions::default()).unwrap();
    let opts = VerifyOptions {
        seed: 7,
        ..Default::default()
    };
    let a = verify_witness(&w, None, &opts).unwrap().with_input(b"spec").to_text();
    let b = verify_witness(&w, None, &opts).unwrap().with_input(b"spec").to_text();
    assert_eq!(a, b);
    assert!(a.contains("verdict: pass"));
}

#[test]
fn cayley_presentation_of_s3() {
    let g = EffectiveGroup::permutation("S3", 3, &["(1 2)", "(1 2 3)"]).unwrap();
    let p = cayley_presentation(&g, g.generators(), 100).unwrap();
    assert!(crate::group::check_relations(&p, g.generators(), &g).unwrap());
    let w = build_theorem5_witness(&g, &FiniteOptions::default()).unwrap();
    let cert = passes(&w);
    assert_eq!(cert.stat("c-order"), Some("1296"));
}

#[test]
fn theorem3_names_match_witness() {
    let (g, data) = z_times_z2();
    let w = build_theorem3_witness(&g, &data, &Theorem3Options::default()).unwrap();
    let names: Vec<String> = w.recovered.iter().map(|r| r.name.clone()).collect();
    assert_eq!(names, theorem3_recovered_names(1, 1, 2));
    assert_eq!(names, ["a1", "u1", "g1_2"]);
}
