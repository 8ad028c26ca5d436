//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Every expected value is recomputed here
//! from first principles (prefix products, exponent recursions, brute-force
//! loops) rather than read back from the library.

use std::collections::HashSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wreath_embed::basefun::{
    discrete_derivative, discrete_integral, finite_iterated_integral, grid_distinguisher,
    grid_distinguisher_by_integration, iterated_integral, periodic_descent, ActiveGroup, BaseFunction, Component,
    WindowBox,
};
use wreath_embed::embedder::{
    build_corollary6_witness, build_theorem1_witness, build_theorem3_witness, build_theorem5_witness, verify_witness,
    CertificateMode, EmbeddingCertificate, EmbeddingWitness, FiniteOptions, Theorem1Options, Theorem3Options,
    VerifyOptions,
};
use wreath_embed::group::{commutator, eval_word, EffectiveGroup, Group, GroupElement, GroupSpec, Word};
use wreath_embed::seqtools::{is_strictly_uneven, powers_of_two};
use wreath_embed::wreath::{EqualityPolicy, WreathGroup, WreathMode};

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, f64, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn el(e: i64) -> GroupElement {
    GroupElement::Cyclic(e)
}

fn formal(order: Option<u64>) -> Arc<EffectiveGroup> {
    Arc::new(EffectiveGroup::cyclic("C", order).unwrap())
}

fn spec(name: &str) -> GroupSpec {
    let text = match name {
        "z2" => include_str!("../../../specs/z2.toml"),
        "z3" => include_str!("../../../specs/z3.toml"),
        "z4" => include_str!("../../../specs/z4.toml"),
        "klein" => include_str!("../../../specs/klein.toml"),
        "s3" => include_str!("../../../specs/s3.toml"),
        "heisenberg" => include_str!("../../../specs/heisenberg.toml"),
        "z_times_z2" => include_str!("../../../specs/z_times_z2.toml"),
        _ => panic!("no spec {name}"),
    };
    GroupSpec::parse(text).unwrap()
}

/// `x(0) = start`, `x(k + 1) = x(k) d(k)`; values for `lo..=hi`.
fn prefix_products<G: Group>(g: &G, d: impl Fn(i64) -> G::Elem, start: G::Elem, lo: i64, hi: i64) -> Vec<G::Elem> {
    let mut up = vec![start.clone()];
    for k in 0..hi {
        let next = g.mul(up.last().unwrap(), &d(k));
        up.push(next);
    }
    let mut down = Vec::new();
    let mut x = start;
    for k in (lo..0).rev() {
        x = g.mul(&x, &g.inv(&d(k)));
        down.push(x.clone());
    }
    down.reverse();
    down.extend(up);
    down
}

/// Exponents of `u^(k)` on `lo..=hi` from `e_0 = 1`, `e_k(0) = 1`, `e_k(y + 1) = e_k(y) + e_{k-1}(y)`.
fn integral_exponents(k: u32, lo: i64, hi: i64) -> Vec<i128> {
    let mut e = vec![1i128; (hi - lo + 1) as usize];
    for _ in 0..k {
        let prev = e.clone();
        let zero = (-lo) as usize;
        e[zero] = 1;
        for i in zero + 1..e.len() {
            e[i] = e[i - 1] + prev[i - 1];
        }
        for i in (0..zero).rev() {
            e[i] = e[i + 1] - prev[i];
        }
    }
    e
}

fn base_on(
    w: &WreathGroup<EffectiveGroup>,
    f: BaseFunction<EffectiveGroup>,
) -> wreath_embed::wreath::WreathElement<EffectiveGroup> {
    w.base_element(f).unwrap()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let line = ActiveGroup::free(1);
    let window = WindowBox::around(&line, 50);
    let mut integrals = 0;
    let mut identities = 0;
    for order in [None, Some(2), Some(3), Some(6)] {
        let g = formal(order);
        for _ in 0..25 {
            let size = rng.gen_range(0..=6);
            let entries: Vec<_> = (0..size)
                .map(|_| {
                    (
                        line.point(&[rng.gen_range(-20..=20)]).unwrap(),
                        g.pow(&el(1), rng.gen_range(-5..=5)),
                    )
                })
                .collect();
            let d = BaseFunction::sparse(g.clone(), line.clone(), entries).map_err(err)?;
            let start = g.pow(&el(1), rng.gen_range(-5..=5));
            let x = discrete_integral(&d, start.clone(), 0).map_err(err)?;
            let back = discrete_derivative(&x, 0).map_err(err)?;
            ensure!(
                back.window_equal(&d, &window),
                "derivative of integral differs from d over order {order:?}"
            );
            let oracle = prefix_products(g.as_ref(), |k| d.eval(&line.point(&[k]).unwrap()), start, -50, 50);
            for (i, v) in oracle.iter().enumerate() {
                let y = i as i64 - 50;
                ensure!(
                    g.elem_eq(&x.eval(&line.point(&[y]).unwrap()), v),
                    "integral differs from prefix products at {y}"
                );
            }
            integrals += 1;
        }

        let w = WreathGroup::new(
            g.clone(),
            line.clone(),
            WreathMode::Cartesian,
            EqualityPolicy::Window(WindowBox::around(&line, 32)),
        )
        .map_err(err)?;
        let b = w.axis_generator(0).map_err(err)?;
        let u = el(1);
        let one = base_on(&w, BaseFunction::identity(g.clone(), line.clone()));
        let constant = base_on(&w, BaseFunction::constant(g.clone(), line.clone(), u.clone()));
        let mut ints = Vec::new();
        for k in 0..=4u32 {
            let f = iterated_integral(g.clone(), line.clone(), u.clone(), k, 0).map_err(err)?;
            for (i, e) in integral_exponents(k, -32, 32).into_iter().enumerate() {
                let y = i as i64 - 32;
                let want = g.pow(&u, i64::try_from(e).unwrap());
                ensure!(
                    g.elem_eq(&f.eval(&line.point(&[y]).unwrap()), &want),
                    "u^({k}) wrong at {y}"
                );
            }
            ints.push(base_on(&w, f));
        }
        for k in 1..=4 {
            for (i, f) in ints.iter().enumerate().take(k + 1) {
                let c = w.wreath_iterated_commutator(f, &b, k).map_err(err)?;
                let want = if i == k { &constant } else { &one };
                ensure!(
                    w.first_difference(&c, want).is_none(),
                    "[u^({i}), b; {k}] wrong over order {order:?}"
                );
                identities += 1;
            }
        }
    }
    Ok(format!(
        "{integrals} random integrals on [-50, 50], {identities} commutator identities on [-32, 32]"
    ))
}

fn criterion_2() -> Outcome {
    let line = ActiveGroup::free(1);
    let mut patterns = 0;
    let mut identities = 0;
    for l in [2u64, 3, 4] {
        let g = formal(Some(l));
        let u = el(1);
        for r in [1u64, 2, 3] {
            let n = (l * r) as i64;
            for code in 0..l.pow(r as u32) {
                let values: Vec<i64> = (0..r).map(|i| ((code / l.pow(i as u32)) % l) as i64).collect();
                let period = ActiveGroup::cyclic(&[r]).map_err(err)?;
                let d = BaseFunction::dense(g.clone(), period, values.iter().map(|&v| el(v)).collect())
                    .map_err(err)?
                    .periodic_lift()
                    .map_err(err)?;
                let dv = |k: i64| el(values[k.rem_euclid(r as i64) as usize]);
                let start = el(values[0]);
                let x = discrete_integral(&d, start.clone(), 0).map_err(err)?;
                let oracle = prefix_products(g.as_ref(), dv, start.clone(), -3 * n, 3 * n);
                for y in -3 * n..=2 * n {
                    let at = |y: i64| x.eval(&line.point(&[y]).unwrap());
                    ensure!(
                        g.elem_eq(&at(y), &oracle[(y + 3 * n) as usize]),
                        "integral differs from prefix products"
                    );
                    ensure!(
                        g.elem_eq(&at(y), &at(y + n)),
                        "integral of {values:?} is not {n}-periodic"
                    );
                }
                let folded = periodic_descent(&d, r, &u, start).map_err(err)?;
                let dom = folded.domain().clone();
                ensure!(dom.size() == Some(n as u64), "descent lives on {dom}, expected Z_{n}");
                let deriv = discrete_derivative(&folded, 0).map_err(err)?;
                for y in 0..n {
                    let p = dom.point(&[y]).unwrap();
                    ensure!(
                        g.elem_eq(&deriv.eval(&p), &dv(y)),
                        "descent derivative differs from folded d at {y}"
                    );
                    ensure!(
                        g.elem_eq(&folded.eval(&p), &oracle[(y + 3 * n) as usize]),
                        "descent differs at {y}"
                    );
                }
                patterns += 1;
            }
        }
        for t in 1..=3u32 {
            let n = l.pow(t);
            let dom = ActiveGroup::cyclic(&[n]).map_err(err)?;
            let w = WreathGroup::new(g.clone(), dom.clone(), WreathMode::Direct, EqualityPolicy::Exact).map_err(err)?;
            let b = w.axis_generator(0).map_err(err)?;
            let one = base_on(&w, BaseFunction::identity(g.clone(), dom.clone()));
            let constant = base_on(&w, BaseFunction::constant(g.clone(), dom.clone(), u.clone()));
            let mut ints = Vec::new();
            for k in 0..=t {
                let f = finite_iterated_integral(g.clone(), u.clone(), l, k, t).map_err(err)?;
                let e = integral_exponents(k, 0, n as i64 - 1);
                for y in 0..n as i64 {
                    let want = el((e[y as usize] % l as i128) as i64);
                    ensure!(
                        g.elem_eq(&f.eval(&dom.point(&[y]).unwrap()), &want),
                        "u^({k}) over Z_{n} wrong at {y}"
                    );
                }
                if k > 0 {
                    let deriv = discrete_derivative(&f, 0).map_err(err)?;
                    ensure!(
                        deriv.exact_eq(&ints[k as usize - 1]) == Some(true),
                        "[u^({k}), b] != u^({}) over Z_{n}",
                        k - 1
                    );
                    ensure!(g.elem_eq(&f.eval(&dom.origin()), &u), "u^({k})(0) != u");
                }
                ints.push(f);
            }
            let elems: Vec<_> = ints.iter().map(|f| base_on(&w, f.clone())).collect();
            for k in 1..=t as usize {
                for (i, f) in elems.iter().enumerate().take(k + 1) {
                    let c = w.wreath_iterated_commutator(f, &b, k).map_err(err)?;
                    let want = if i == k { &constant } else { &one };
                    ensure!(
                        w.first_difference(&c, want).is_none(),
                        "[u^({i}), b; {k}] wrong over Z_{n}"
                    );
                    identities += 1;
                }
            }
        }
    }
    Ok(format!(
        "{patterns} periodic patterns, {identities} exact identities over Z_(l^t)"
    ))
}

fn distinguisher_matrix(w: &WreathGroup<EffectiveGroup>, plane: &ActiveGroup, t: usize) -> Result<usize, String> {
    let g = w.passive().clone();
    let u = el(1);
    let (b1, b2) = (w.axis_generator(0).map_err(err)?, w.axis_generator(1).map_err(err)?);
    let one = base_on(w, BaseFunction::identity(g.clone(), plane.clone()));
    let constant = base_on(w, BaseFunction::constant(g.clone(), plane.clone(), u.clone()));
    let mut fs = Vec::new();
    for j in 1..=t {
        let f = grid_distinguisher(g.clone(), plane.clone(), u.clone(), j, t).map_err(err)?;
        let by_rows = grid_distinguisher_by_integration(g.clone(), plane.clone(), u.clone(), j, t).map_err(err)?;
        ensure!(
            f.window_equal(&by_rows, &w.window()),
            "f_{j} differs from its row/column construction"
        );
        fs.push(base_on(w, f));
    }
    let mut count = 0;
    for i in 1..=t {
        for (j, f) in fs.iter().enumerate() {
            let c = w.wreath_iterated_commutator(f, &b2, i).map_err(err)?;
            let c = if i < t {
                w.wreath_iterated_commutator(&c, &b1, t - i).map_err(err)?
            } else {
                c
            };
            let want = if i == j + 1 { &constant } else { &one };
            ensure!(
                w.first_difference(&c, want).is_none(),
                "[f_{}, b2; {i}; b1; {}] wrong for t = {t}",
                j + 1,
                t - i
            );
            count += 1;
        }
    }
    Ok(count)
}

fn criterion_3() -> Outcome {
    let mut infinite = 0;
    let plane = ActiveGroup::free(2);
    let w = WreathGroup::new(
        formal(None),
        plane.clone(),
        WreathMode::Cartesian,
        EqualityPolicy::Window(WindowBox::around(&plane, 16)),
    )
    .map_err(err)?;
    for t in 1..=3 {
        infinite += distinguisher_matrix(&w, &plane, t)?;
    }
    let mut finite = 0;
    for (s, l) in [(4u64, 2u64), (8, 2), (9, 3)] {
        let plane = ActiveGroup::cyclic(&[s, s]).map_err(err)?;
        let w = WreathGroup::new(
            formal(Some(l)),
            plane.clone(),
            WreathMode::Direct,
            EqualityPolicy::Exact,
        )
        .map_err(err)?;
        for t in 1..=3 {
            finite += distinguisher_matrix(&w, &plane, t)?;
        }
    }
    Ok(format!(
        "{infinite} entries on [-16, 16]^2, {finite} exact entries over Z_s^2 for s in 4, 8, 9"
    ))
}

/// Residues distinct and all pairwise differences `s_q - s_p` (`p < q`) distinct.
fn uneven_oracle(terms: &[u64], modulus: Option<u64>) -> bool {
    let r = |x: u64| modulus.map_or(x, |m| x % m);
    let n = terms.len();
    for p in 0..n {
        for q in p + 1..n {
            if r(terms[p]) == r(terms[q]) {
                return false;
            }
        }
    }
    let mut diffs = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            diffs.push(r(terms[q] - terms[p]));
        }
    }
    for a in 0..diffs.len() {
        for b in a + 1..diffs.len() {
            if diffs[a] == diffs[b] {
                return false;
            }
        }
    }
    true
}

fn compare_uneven(terms: &[u64], modulus: Option<u64>) -> Result<(), String> {
    let lib = is_strictly_uneven(terms, modulus).map_err(err)?.is_none();
    ensure!(
        lib == uneven_oracle(terms, modulus),
        "{terms:?} mod {modulus:?}: library says {lib}"
    );
    Ok(())
}

fn increasing(len: usize, max: u64, out: &mut Vec<Vec<u64>>, cur: &mut Vec<u64>) {
    if cur.len() == len {
        out.push(cur.clone());
        return;
    }
    let from = cur.last().map_or(1, |&x| x + 1);
    for x in from..=max {
        cur.push(x);
        increasing(len, max, out, cur);
        cur.pop();
    }
}

fn criterion_4() -> Outcome {
    let seq = powers_of_two(12).map_err(err)?;
    ensure!(
        is_strictly_uneven(seq.terms(), None).map_err(err)?.is_none(),
        "powers of two rejected"
    );
    ensure!(uneven_oracle(seq.terms(), None), "oracle rejects powers of two");
    let mut progressions = 0;
    for a in 1..=16u64 {
        for step in 1..=16u64 {
            for len in 3..=10u64 {
                let terms: Vec<u64> = (0..len).map(|i| a + i * step).collect();
                ensure!(
                    is_strictly_uneven(&terms, None).map_err(err)?.is_some(),
                    "progression {terms:?} accepted"
                );
                progressions += 1;
            }
        }
    }

    let mut exhaustive = 0;
    let mut sets = Vec::new();
    for len in 1..=2 {
        increasing(len, 64, &mut sets, &mut Vec::new());
    }
    for len in 3..=4 {
        increasing(len, 16, &mut sets, &mut Vec::new());
    }
    for terms in &sets {
        compare_uneven(terms, None)?;
        for m in 1..=256 {
            compare_uneven(terms, Some(m))?;
        }
        exhaustive += 257;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let samples = 100_000;
    for _ in 0..samples {
        let len = rng.gen_range(3..=6);
        let mut terms: Vec<u64> = Vec::new();
        while terms.len() < len {
            let x = rng.gen_range(1..=64);
            if !terms.contains(&x) {
                terms.push(x);
            }
        }
        terms.sort_unstable();
        let m = rng.gen_range(0..=256);
        compare_uneven(&terms, (m > 0).then_some(m))?;
    }
    Ok(format!(
        "{progressions} progressions rejected, {exhaustive} exhaustive and {samples} sampled modular cases agree"
    ))
}

fn certify<G: Group>(w: &EmbeddingWitness<G>) -> Result<EmbeddingCertificate, String>
where
    G::Elem: std::hash::Hash + Eq,
{
    verify_witness(w, None, &VerifyOptions::default()).map_err(err)
}

const CORE_CHECKS: [&str; 6] = [
    "recovery-values",
    "relators",
    "projection",
    "variety",
    "generator-count",
    "exponent-sums",
];

fn all_pass(cert: &EmbeddingCertificate, label: &str) -> Result<(), String> {
    for name in CORE_CHECKS {
        let c = cert.check(name).ok_or_else(|| format!("{label}: no {name} check"))?;
        ensure!(c.passed, "{label}: {name} failed: {:?}", c.counterexample);
    }
    ensure!(cert.verdict(), "{label}: verdict fail");
    Ok(())
}

fn lcm(a: u64, b: u64) -> u64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

fn theorem5_case(name: &str, orders: &[u64], c_order: Option<u64>) -> Result<u64, String> {
    let m = orders.len() as u32;
    let s = orders.iter().fold(1, |acc, &l| lcm(acc, l.pow(m)));
    let c = c_order.unwrap_or(s * s);
    let spec = spec(name);
    let w = build_theorem5_witness(
        &spec.group,
        &FiniteOptions {
            c_order,
            ..Default::default()
        },
    )
    .map_err(err)?;
    let cert = certify(&w)?;
    all_pass(&cert, name)?;
    ensure!(cert.mode == CertificateMode::Exact, "{name}: not an exact certificate");
    let size = c * s * s;
    ensure!(
        cert.stat("active-order") == Some(size.to_string().as_str()),
        "{name}: active order {:?}, expected {size}",
        cert.stat("active-order")
    );
    Ok(size)
}

fn criterion_5() -> Outcome {
    let mut sizes = Vec::new();
    for (name, orders, c) in [
        ("z2", &[2][..], None),
        ("z3", &[3], None),
        ("klein", &[2, 2], Some(32)),
        ("z4", &[4], None),
    ] {
        let size = theorem5_case(name, orders, c)?;
        ensure!(size <= 1296, "{name}: domain {size} exceeds 1296");
        sizes.push(format!("{name} {size}"));
    }
    Ok(format!("six checks pass exactly; domains {}", sizes.join(", ")))
}

fn criterion_5_extended() -> Outcome {
    let size = theorem5_case("s3", &[2, 3], None)?;
    ensure!(size == 1_679_616, "S3 domain {size}");
    Ok(format!("S3 on {size} points"))
}

fn random_word(rng: &mut ChaCha8Rng, letters: usize, max_len: usize) -> Word {
    let mut word = Word::empty();
    for _ in 0..rng.gen_range(1..=max_len) {
        word.push(rng.gen_range(0..letters), if rng.gen_bool(0.5) { 1 } else { -1 });
    }
    word
}

fn criterion_6() -> Outcome {
    let spec = spec("klein");
    let w = build_corollary6_witness(&spec.group, &FiniteOptions::default()).map_err(err)?;
    let cert = certify(&w)?;
    all_pass(&cert, "klein")?;
    ensure!(
        cert.check("exponent-bound").is_some_and(|c| c.passed),
        "exponent-bound check missing or failed"
    );
    let comps = w.wreath.active_group().components().to_vec();
    ensure!(
        comps == [Component::Cyclic(8), Component::Cyclic(2), Component::Cyclic(2)],
        "active group {}",
        w.wreath.active_group()
    );
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let h = w.wreath.as_ref();
    for _ in 0..100 {
        let word = random_word(&mut rng, w.h_generators.len(), 8);
        let x = eval_word(h, &word, &w.h_generators);
        ensure!(
            h.is_identity(&h.pow(&x, 16)),
            "({})^16 is not trivial",
            word.display_with(&w.h_names)
        );
    }
    Ok("active Z8 x Z2 x Z2, 100 sampled orders divide 16".into())
}

fn criterion_7() -> Outcome {
    let spec = spec("heisenberg");
    let opts = Theorem1Options {
        window: 16,
        derived_length: spec.derived_length,
        ..Default::default()
    };
    let w = build_theorem1_witness(
        &spec.group,
        spec.abelianization.as_ref().unwrap(),
        spec.decompositions.as_ref().unwrap(),
        &opts,
    )
    .map_err(err)?;
    let cert = certify(&w)?;
    all_pass(&cert, "heisenberg")?;
    match &cert.mode {
        CertificateMode::Window(b) => ensure!(b.bounds() == [(-16, 16)], "window {b}"),
        CertificateMode::Exact => return Err("expected a window certificate".into()),
    }
    ensure!(cert.check("exponent-sums").unwrap().detail == "50 words", "audit size");

    let g = spec.group.as_ref();
    let gens = g.generators();
    let z = commutator(g, &gens[0], &gens[1]);
    ensure!(g.elem_eq(&z, &gens[2]), "[x, y] != z in the spec");
    let rec = w.recovered.iter().find(|r| r.name == "g'3").ok_or("no recovery of z")?;
    let value = eval_word(w.wreath.as_ref(), &rec.word, &w.h_generators);
    ensure!(w.wreath.is_base(&value), "recovered z is not a base element");
    let line = w.wreath.active_group();
    for y in -16..=16 {
        let want = if y == 0 { z.clone() } else { g.identity() };
        ensure!(
            g.elem_eq(&value.base().eval(&line.point(&[y]).unwrap()), &want),
            "recovered z wrong at c^{y}"
        );
    }
    Ok("z recovered as a delta at the origin on [-16, 16]; relators, projection, 50-word audit pass".into())
}

fn criterion_8() -> Outcome {
    let spec = spec("z_times_z2");
    let opts = Theorem3Options {
        window: 8,
        ..Default::default()
    };
    let w = build_theorem3_witness(&spec.group, spec.abelianization.as_ref().unwrap(), &opts).map_err(err)?;
    let cert = certify(&w)?;
    all_pass(&cert, "ZxZ2")?;
    match &cert.mode {
        CertificateMode::Window(b) => ensure!(b.bounds() == [(-8, 8); 3], "window {b}"),
        CertificateMode::Exact => return Err("expected a window certificate".into()),
    }

    // slots: distinguisher for u at 2, free a at 4, generators a, u at 8, 16
    let g = spec.group.as_ref();
    let (a, u) = (g.generators()[0].clone(), g.generators()[1].clone());
    let pow_u = |e: i64| g.pow(&u, e);
    let d_slice = |x: i64, y2: i64| -> GroupElement {
        match x {
            2 => pow_u(1 + y2),
            4 | 8 => a.clone(),
            16 => u.clone(),
            _ => g.identity(),
        }
    };
    type Expect<'a> = Box<dyn Fn(i64, i64, i64) -> GroupElement + 'a>;
    let expectations: Vec<(&str, Expect)> = vec![
        ("a1", Box::new(|x, _, y2| d_slice(x + 4, y2))),
        ("u1", Box::new(|x, _, _| if x == 0 { u.clone() } else { g.identity() })),
        ("g1_2", Box::new(|_, _, _| g.identity())),
    ];
    let h = w.wreath.as_ref();
    let space = h.active_group();
    let mut points = 0;
    for (name, expect) in &expectations {
        let rec = w
            .recovered
            .iter()
            .find(|r| r.name == *name)
            .ok_or(format!("no recovered {name}"))?;
        let v = eval_word(h, &rec.word, &w.h_generators);
        ensure!(h.is_base(&v), "{name} is not a base element");
        for x in -8..=8 {
            for y1 in -8..=8 {
                for y2 in -8..=8 {
                    let got = v.base().eval(&space.point(&[x, y1, y2]).unwrap());
                    ensure!(g.elem_eq(&got, &expect(x, y1, y2)), "{name} wrong at ({x}, {y1}, {y2})");
                    points += 1;
                }
            }
        }
    }
    Ok(format!(
        "a1, u1, g1_2 match slice bookkeeping at {points} points of [-8, 8]^3"
    ))
}

/// Derived length by brute-force closure.
fn derived_length_oracle(g: &EffectiveGroup) -> usize {
    let close = |gens: &[GroupElement]| -> HashSet<GroupElement> {
        let mut set: HashSet<GroupElement> = HashSet::from([g.identity()]);
        let mut frontier = vec![g.identity()];
        while let Some(x) = frontier.pop() {
            for s in gens {
                let y = g.mul(&x, s);
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        set
    };
    let mut current = close(g.generators());
    let mut length = 0;
    while current.len() > 1 {
        let elems: Vec<_> = current.iter().cloned().collect();
        let comms: Vec<_> = elems
            .iter()
            .flat_map(|x| elems.iter().map(|y| commutator(g, x, y)))
            .collect();
        current = close(&comms);
        length += 1;
    }
    length
}

fn variety_sample<G: Group>(w: &EmbeddingWitness<G>, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = w.wreath.as_ref();
    for _ in 0..100 {
        let x = eval_word(h, &random_word(&mut rng, w.h_generators.len(), 8), &w.h_generators);
        let y = eval_word(h, &random_word(&mut rng, w.h_generators.len(), 8), &w.h_generators);
        ensure!(
            h.is_base(&commutator(h, &x, &y)),
            "commutator with nontrivial active part"
        );
    }
    Ok(())
}

fn variety_case<G: Group>(label: &str, w: &EmbeddingWitness<G>, dl: usize) -> Result<(), String>
where
    G::Elem: std::hash::Hash + Eq,
{
    let cert = certify(w)?;
    ensure!(cert.verdict(), "{label}: certificate fails");
    let v = cert.check("variety").unwrap();
    ensure!(
        v.passed && v.detail == "100 commutators",
        "{label}: variety check {v:?}"
    );
    let want = format!("dl(H) <= {}", dl + 1);
    ensure!(
        cert.stat("derived-length-bound") == Some(want.as_str()),
        "{label}: bound {:?}",
        cert.stat("derived-length-bound")
    );
    variety_sample(w, 9)
}

fn criterion_9() -> Outcome {
    let mut labels = Vec::new();
    for (name, c) in [
        ("z2", None),
        ("z3", None),
        ("z4", None),
        ("klein", Some(32)),
        ("s3", None),
    ] {
        let spec = spec(name);
        let dl = derived_length_oracle(&spec.group);
        let opts = FiniteOptions {
            c_order: c,
            ..Default::default()
        };
        variety_case(name, &build_theorem5_witness(&spec.group, &opts).map_err(err)?, dl)?;
        labels.push(format!("{name} (dl {dl})"));
    }
    let klein = spec("klein");
    let w = build_corollary6_witness(&klein.group, &FiniteOptions::default()).map_err(err)?;
    variety_case("klein cor6", &w, derived_length_oracle(&klein.group))?;
    labels.push("klein cor6".into());

    let heis = spec("heisenberg");
    let opts = Theorem1Options {
        window: 16,
        derived_length: heis.derived_length,
        ..Default::default()
    };
    let w = build_theorem1_witness(
        &heis.group,
        heis.abelianization.as_ref().unwrap(),
        heis.decompositions.as_ref().unwrap(),
        &opts,
    )
    .map_err(err)?;
    variety_case("heisenberg", &w, 2)?;
    let zz = spec("z_times_z2");
    let opts = Theorem3Options {
        window: 8,
        derived_length: zz.derived_length,
        ..Default::default()
    };
    let w = build_theorem3_witness(&zz.group, zz.abelianization.as_ref().unwrap(), &opts).map_err(err)?;
    variety_case("ZxZ2", &w, 1)?;
    labels.push("heisenberg".into());
    labels.push("ZxZ2".into());
    Ok(format!("100 + 100 commutators in the base for {}", labels.join(", ")))
}

fn criterion_10() -> Outcome {
    let z2 = spec("z2");
    let run_corrupt = || -> Result<EmbeddingCertificate, String> {
        let mut w = build_theorem5_witness(&z2.group, &FiniteOptions::default()).map_err(err)?;
        let u = w.g_generators[0];
        w.corrupt_d(&[2, 0, 0], u).map_err(err)?;
        certify(&w)
    };
    let a = run_corrupt()?;
    ensure!(!a.verdict(), "corrupted d still passes");
    let failing: Vec<_> = a.checks.iter().filter(|c| !c.passed).collect();
    ensure!(
        failing.iter().all(|c| c.counterexample.is_some()),
        "failing check without counterexample"
    );
    ensure!(
        run_corrupt()?.to_text() == a.to_text(),
        "corrupted run is not deterministic"
    );

    let heis = spec("heisenberg");
    let run_ap = || -> Result<EmbeddingCertificate, String> {
        let opts = Theorem1Options {
            window: 16,
            sequence: Some(vec![1, 2, 3, 4]),
            derived_length: heis.derived_length,
            ..Default::default()
        };
        let w = build_theorem1_witness(
            &heis.group,
            heis.abelianization.as_ref().unwrap(),
            heis.decompositions.as_ref().unwrap(),
            &opts,
        )
        .map_err(err)?;
        certify(&w)
    };
    let b = run_ap()?;
    ensure!(!b.verdict(), "progression layout still passes");
    let rec = b.check("recovery-values").unwrap();
    ensure!(
        !rec.passed && rec.counterexample.is_some(),
        "recovery-values did not fail with a counterexample"
    );
    ensure!(
        run_ap()?.to_text() == b.to_text(),
        "progression run is not deterministic"
    );
    Ok(format!(
        "corrupt d fails {}; progression fails recovery-values ({})",
        failing.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join(", "),
        rec.counterexample.as_deref().unwrap_or("")
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("1", "discrete calculus", 5.0, criterion_1),
        ("2", "periodic integrals and descent", 10.0, criterion_2),
        ("3", "distinguisher matrix", 30.0, criterion_3),
        ("4", "uneven sequences", 10.0, criterion_4),
        ("5", "finite construction, small groups", 10.0, criterion_5),
        ("5+", "finite construction, S3", 300.0, criterion_5_extended),
        ("6", "bounded-exponent construction", 10.0, criterion_6),
        ("7", "Heisenberg window certificate", 30.0, criterion_7),
        ("8", "Z x Z2 window certificate", 60.0, criterion_8),
        ("9", "variety and derived length", 120.0, criterion_9),
        ("10", "negative controls", 30.0, criterion_10),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, title, budget, check) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(detail) if secs > budget => Err(format!("{detail}; over budget")),
            other => other,
        };
        let (status, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(e) => ("FAIL", e),
        };
        if outcome.is_err() {
            failed += 1;
        }
        println!("criterion {id:<3} {status}  {title}: {detail} [{secs:.2}s, budget {budget}s, exact]");
    }
    println!("acceptance: {} of 11 pass", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
