use std::fmt::Write as _;
use std::hash::Hash;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::{Construction, EmbeddingWitness};
use crate::basefun::WindowBox;
use crate::error::{Error, Result};
use crate::group::{canonical_words, commutator, eval_word, first_failing_relator, Group, Presentation, Word};
use crate::wreath::{EqualityPolicy, WreathElement};

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random commutators tested for lying in the base group.
    pub variety_samples: usize,
    /// Random words with a nonzero exponent sum on the free letters.
    pub audit_words: usize,
    pub max_word_len: usize,
    /// Random elements of `H` raised to the claimed exponent.
    pub order_samples: usize,
    /// Pairs `(x, y)` tested for `R(x) R(y) = R(xy)`.
    pub max_pairs: usize,
    pub closure_bound: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            variety_samples: 100,
            audit_words: 50,
            max_word_len: 8,
            order_samples: 100,
            max_pairs: 4096,
            closure_bound: crate::group::DEFAULT_CLOSURE_BOUND,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificateMode {
    Exact,
    Window(WindowBox),
}

impl std::fmt::Display for CertificateMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CertificateMode::Exact => f.write_str("exact"),
            CertificateMode::Window(b) => write!(f, "window {b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub counterexample: Option<String>,
}

impl CheckResult {
    fn pass(name: &str, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: true,
            detail: detail.into(),
            counterexample: None,
        }
    }

    fn fail(name: &str, detail: impl Into<String>, counterexample: String) -> Self {
        Self {
            name: name.into(),
            passed: false,
            detail: detail.into(),
            counterexample: Some(counterexample),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingCertificate {
    pub construction: Construction,
    pub group: String,
    pub input_hash: Option<String>,
    pub mode: CertificateMode,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub stats: Vec<(String, String)>,
    pub tool_version: String,
}

impl EmbeddingCertificate {
    pub fn verdict(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn stat(&self, key: &str) -> Option<&str> {
        self.stats.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Records the SHA-256 of the input the witness was built from.
    pub fn with_input(mut self, bytes: &[u8]) -> Self {
        self.input_hash = Some(hex::encode(Sha256::digest(bytes)));
        self
    }

    /// Line-oriented, deterministic rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "certificate wreath-embed {}", self.tool_version);
        let _ = writeln!(out, "construction: {}", self.construction);
        let _ = writeln!(out, "group: {}", self.group);
        let _ = writeln!(out, "input-sha256: {}", self.input_hash.as_deref().unwrap_or("-"));
        let _ = writeln!(out, "mode: {}", self.mode);
        let _ = writeln!(out, "seed: {}", self.seed);
        let _ = writeln!(out, "verdict: {}", if self.verdict() { "pass" } else { "fail" });
        out.push_str("[checks]\n");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{}: {} ({})",
                c.name,
                if c.passed { "pass" } else { "fail" },
                c.detail
            );
            if let Some(x) = &c.counterexample {
                let _ = writeln!(out, "  counterexample: {x}");
            }
        }
        out.push_str("[statistics]\n");
        for (k, v) in &self.stats {
            let _ = writeln!(out, "{k}: {v}");
        }
        out
    }
}

/// Presentation read off the Cayley graph: `w_x g_i w_{x g_i}^-1` for every
/// element `x` and generator `g_i`, with `w_x` the breadth-first word of `x`.
pub fn cayley_presentation<G>(group: &G, gens: &[G::Elem], bound: usize) -> Result<Presentation>
where
    G: Group + ?Sized,
    G::Elem: Hash + Eq,
{
    let words = canonical_words(group, gens, bound)?;
    let mut relators = Vec::new();
    for (x, wx) in &words {
        for (i, g) in gens.iter().enumerate() {
            let y = group.mul(x, g);
            let wy = &words[&y];
            let r = wx.mul(&Word::generator(i)).mul(&wy.inverse());
            if !r.is_empty() && !relators.contains(&r) {
                relators.push(r);
            }
        }
    }
    Presentation::new(gens.len(), relators)
}

fn random_word(rng: &mut ChaCha8Rng, letters: usize, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len.max(1));
    let mut w = Word::empty();
    for _ in 0..len {
        let g = rng.gen_range(0..letters);
        w.push(g, if rng.gen_bool(0.5) { 1 } else { -1 });
    }
    w
}

/// Runs every check on `witness` and collects the results.
///
/// Uses `presentation` when given, then the witness' own, then (for finite
/// `G`) the Cayley-graph presentation.
pub fn verify_witness<G>(
    witness: &EmbeddingWitness<G>,
    presentation: Option<&Presentation>,
    opts: &VerifyOptions,
) -> Result<EmbeddingCertificate>
where
    G: Group,
    G::Elem: Hash + Eq,
{
    let w = witness.wreath.as_ref();
    let passive = w.passive().as_ref();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = Vec::new();
    let names: Vec<String> = witness.recovered.iter().map(|r| r.name.clone()).collect();

    // (a) the words in c, b, d produce the predicted elements
    let actual: Vec<WreathElement<G>> = witness
        .recovered
        .iter()
        .map(|r| eval_word(w, &r.word, &witness.h_generators))
        .collect();
    let mismatch = witness.recovered.iter().zip(&actual).find_map(|(r, x)| {
        w.first_difference(x, &r.expected).map(|p| {
            if x.active() != r.expected.active() {
                format!(
                    "{}: active part {} instead of {}",
                    r.name,
                    x.active(),
                    r.expected.active()
                )
            } else {
                format!(
                    "{} at {p}: got {}, expected {}",
                    r.name,
                    passive.render(&x.base().eval(&p)),
                    passive.render(&r.expected.base().eval(&p))
                )
            }
        })
    });
    let n_rec = witness.recovered.len();
    checks.push(match mismatch {
        None => CheckResult::pass("recovery-values", format!("{n_rec} recovered elements")),
        Some(x) => CheckResult::fail("recovery-values", format!("{n_rec} recovered elements"), x),
    });

    // (b) relators of G hold on the images R(g)
    let images: Vec<WreathElement<G>> = witness.g_words.iter().map(|word| eval_word(w, word, &actual)).collect();
    let owned;
    let presentation = match presentation.or(witness.presentation.as_ref()) {
        Some(p) => p,
        None if witness.group_order.is_some() => {
            owned = cayley_presentation(passive, &witness.g_generators, opts.closure_bound)?;
            &owned
        }
        None => {
            return Err(Error::Invalid(
                "an infinite group needs a presentation to verify".into(),
            ))
        }
    };
    let n_rel = presentation.relators().len();
    checks.push(match first_failing_relator(presentation, &images, w)? {
        None => CheckResult::pass("relators", format!("{n_rel} relators")),
        Some(i) => {
            let g_names: Vec<String> = (1..=images.len()).map(|i| format!("g{i}")).collect();
            CheckResult::fail(
                "relators",
                format!("{n_rel} relators"),
                format!(
                    "relator {} = {} is not trivial",
                    i + 1,
                    presentation.relators()[i].display_with(&g_names)
                ),
            )
        }
    });

    // (c) projection at the identity undoes R, and R is multiplicative
    let mut failure = None;
    for (i, (img, g)) in images.iter().zip(&witness.g_generators).enumerate() {
        match w.project_at_identity(img) {
            Ok(p) if passive.elem_eq(&p, g) => {}
            Ok(p) => {
                failure = Some(format!(
                    "R(g{}) projects to {}, not {}",
                    i + 1,
                    passive.render(&p),
                    passive.render(g)
                ));
                break;
            }
            Err(_) => {
                failure = Some(format!("R(g{}) is not in the base group", i + 1));
                break;
            }
        }
    }
    let mut detail = format!("{} generators", images.len());
    if failure.is_none() && witness.group_order.is_some() {
        let words = canonical_words(passive, &witness.g_generators, opts.closure_bound)?;
        let all: Vec<(&G::Elem, WreathElement<G>)> =
            words.iter().map(|(x, word)| (x, eval_word(w, word, &images))).collect();
        let index: std::collections::HashMap<&G::Elem, usize> =
            all.iter().enumerate().map(|(i, (x, _))| (*x, i)).collect();
        for (x, rx) in &all {
            if !matches!(w.project_at_identity(rx), Ok(p) if passive.elem_eq(&p, x)) {
                failure = Some(format!("R({}) does not project back", passive.render(x)));
                break;
            }
        }
        let n = all.len();
        let total = n * n;
        let mut tested = 0;
        if failure.is_none() {
            let pairs: Vec<(usize, usize)> = if total <= opts.max_pairs {
                (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
            } else {
                (0..opts.max_pairs)
                    .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                    .collect()
            };
            for (a, b) in pairs {
                tested += 1;
                let xy = passive.mul(all[a].0, all[b].0);
                let rxy = &all[index[&xy]].1;
                if !w.elem_eq(&w.mul(&all[a].1, &all[b].1), rxy) {
                    failure = Some(format!(
                        "R({}) R({}) differs from R({})",
                        passive.render(all[a].0),
                        passive.render(all[b].0),
                        passive.render(&xy)
                    ));
                    break;
                }
            }
        }
        detail = format!("{n} elements, {tested} products");
    }
    checks.push(match failure {
        None => CheckResult::pass("projection", detail),
        Some(x) => CheckResult::fail("projection", detail, x),
    });

    // (d) H/base is abelian: commutators of random elements lie in the base
    let h_count = witness.h_generators.len();
    let mut failure = None;
    for _ in 0..opts.variety_samples {
        let x = random_word(&mut rng, h_count, opts.max_word_len);
        let y = random_word(&mut rng, h_count, opts.max_word_len);
        let z = commutator(
            w,
            &eval_word(w, &x, &witness.h_generators),
            &eval_word(w, &y, &witness.h_generators),
        );
        if !w.is_base(&z) {
            failure = Some(format!(
                "[{}, {}] has active part {}",
                x.display_with(&witness.h_names),
                y.display_with(&witness.h_names),
                z.active()
            ));
            break;
        }
    }
    let detail = format!("{} commutators", opts.variety_samples);
    checks.push(match failure {
        None => CheckResult::pass("variety", detail),
        Some(x) => CheckResult::fail("variety", detail, x),
    });

    // (e) number of generators of H
    let expected = witness.construction.generator_count();
    checks.push(if h_count == expected {
        CheckResult::pass("generator-count", format!("{h_count} generators"))
    } else {
        CheckResult::fail(
            "generator-count",
            format!("expected {expected}"),
            format!("{h_count} generators"),
        )
    });

    // (f) a nonzero exponent sum on the free letters leaves the kernel
    if witness.free_letters.is_empty() {
        checks.push(CheckResult::pass("exponent-sums", "vacuous: no free letters"));
    } else {
        let mut failure = None;
        for _ in 0..opts.audit_words {
            let mut word = random_word(&mut rng, n_rec, opts.max_word_len);
            if witness.free_letters.iter().all(|&i| word.exponent_sum(i) == 0) {
                let i = witness.free_letters[rng.gen_range(0..witness.free_letters.len())];
                word.push(i, 1);
            }
            let z = eval_word(w, &word, &actual);
            if w.is_identity(&z) {
                failure = Some(format!("{} is trivial", word.display_with(&names)));
                break;
            }
        }
        let detail = format!("{} words", opts.audit_words);
        checks.push(match failure {
            None => CheckResult::pass("exponent-sums", detail),
            Some(x) => CheckResult::fail("exponent-sums", detail, x),
        });
    }

    // exponent of H divides the claimed bound
    if let Some(bound) = witness.exponent_bound {
        let mut failure = None;
        for _ in 0..opts.order_samples {
            let x = random_word(&mut rng, h_count, opts.max_word_len);
            let v = eval_word(w, &x, &witness.h_generators);
            if !w.is_identity(&w.pow(&v, bound as i64)) {
                failure = Some(format!("({})^{bound} is not trivial", x.display_with(&witness.h_names)));
                break;
            }
        }
        let detail = format!("{} elements, bound {bound}", opts.order_samples);
        checks.push(match failure {
            None => CheckResult::pass("exponent-bound", detail),
            Some(x) => CheckResult::fail("exponent-bound", detail, x),
        });
    }

    let mode = match w.policy() {
        EqualityPolicy::Exact => CertificateMode::Exact,
        EqualityPolicy::Window(b) => CertificateMode::Window(b.clone()),
    };
    let mut stats: Vec<(String, String)> = vec![
        ("active-group".into(), w.active_group().to_string()),
        (
            "group-order".into(),
            witness.group_order.map_or("infinite".into(), |n| n.to_string()),
        ),
        (
            "derived-length".into(),
            witness.derived_length.map_or("unknown".into(), |n| n.to_string()),
        ),
        (
            "derived-length-bound".into(),
            witness
                .derived_length
                .map_or("unknown".into(), |n| format!("dl(H) <= {}", n + 1)),
        ),
        ("h-generators".into(), witness.h_names.join(" ")),
        ("recovered".into(), names.join(" ")),
        (
            "slots".into(),
            witness
                .layout
                .slots
                .iter()
                .map(|s| format!("{}{}@{}", s.class.tag(), s.member + 1, s.position))
                .collect::<Vec<_>>()
                .join(" "),
        ),
        ("layout".into(), witness.layout.note.clone()),
        ("d-representation".into(), witness.d().base().representation().into()),
    ];
    if let Some(c) = witness.layout.c_order {
        stats.push(("c-order".into(), c.to_string()));
    }
    if let Some(n) = w.active_group().size() {
        stats.push(("active-order".into(), n.to_string()));
    }
    if let Some(b) = witness.exponent_bound {
        stats.push(("exponent-bound".into(), b.to_string()));
    }
    stats.extend(witness.facts.iter().cloned());
    stats.push((
        "g-words".into(),
        witness
            .g_words
            .iter()
            .map(|g| g.display_with(&names))
            .collect::<Vec<_>>()
            .join(", "),
    ));

    Ok(EmbeddingCertificate {
        construction: witness.construction,
        group: witness.group_name.clone(),
        input_hash: None,
        mode,
        seed: opts.seed,
        checks,
        stats,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    })
}
