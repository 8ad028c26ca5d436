use std::fmt;
use std::fs;
use std::hash::Hash;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use wreath_embed::basefun::Component;
use wreath_embed::embedder::{
    build_corollary6_witness, build_theorem1_witness, build_theorem3_witness, build_theorem5_witness,
    theorem3_recovered_names, verify_witness, EmbeddingCertificate, EmbeddingWitness, FiniteOptions,
    GeneratorDecomposition, Theorem1Options, Theorem3Options, VerifyOptions,
};
use wreath_embed::group::{
    abelianization, commutator_decomposition_oracle, derived_length, derived_series, AbelianizationData,
    EffectiveGroup, Group, GroupSpec,
};
use wreath_embed::seqtools::is_strictly_uneven;
use wreath_embed::Error;

use crate::{Command, OracleCommand, RunArgs, Theorem};

/// Active groups above this many points need `--allow-large`.
const LARGE_DOMAIN: u64 = 1_000_000;

pub enum CliError {
    Core(Error),
    Io(PathBuf, std::io::Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub fn hint(err: &CliError) -> Option<String> {
    let CliError::Core(e) = err else { return None };
    Some(match e {
        Error::Capacity { suggested, .. } => format!(
            "rerun with --c-order {suggested}, or use --theorem cor6, which sizes the cyclic factor from the exponent"
        ),
        Error::FiniteOrdersRequired(_) => {
            "use --theorem 1 or --theorem 3 for groups with infinite-order elements".into()
        }
        Error::AbelianizationNotFree => "use --theorem 3, or --theorem 5 / cor6 for finite groups".into(),
        Error::ClosureOverflow { .. } => "raise --max-closure".into(),
        Error::NotPeriodic(_) => "the distinguishers do not fold onto this cyclic order; try --theorem 5".into(),
        _ => return None,
    })
}

type CliResult<T> = Result<T, CliError>;

const BUILTIN: &[(&str, &str)] = &[
    ("Z2", include_str!("../../../specs/z2.toml")),
    ("Z3", include_str!("../../../specs/z3.toml")),
    ("Z4", include_str!("../../../specs/z4.toml")),
    ("Z2xZ2", include_str!("../../../specs/klein.toml")),
    ("S3", include_str!("../../../specs/s3.toml")),
];

fn load(path: &Path) -> CliResult<GroupSpec> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    Ok(GroupSpec::parse(&text)?)
}

fn load_named(name: &str) -> CliResult<GroupSpec> {
    match BUILTIN.iter().find(|(n, _)| n.eq_ignore_ascii_case(name)) {
        Some((_, text)) => Ok(GroupSpec::parse(text)?),
        None => load(Path::new(name)),
    }
}

pub fn dispatch(command: Command) -> CliResult<bool> {
    match command {
        Command::Inspect { spec, max_closure } => {
            print!("{}", inspect(&load(&spec)?, max_closure)?);
            Ok(true)
        }
        Command::Embed(args) => {
            let spec = load(&args.spec)?;
            let outcome = run(&spec, &args)?;
            emit(&outcome, args.out.as_deref())?;
            Ok(outcome.certificate.verdict())
        }
        Command::Verify { run: args, certificate } => {
            let spec = load(&args.spec)?;
            let stored = fs::read_to_string(&certificate).map_err(|e| CliError::Io(certificate.clone(), e))?;
            let outcome = run(&spec, &args)?;
            let text = outcome.certificate.to_text();
            let same = text == stored;
            println!("reproduced: {}", if same { "yes" } else { "no" });
            println!(
                "verdict: {}",
                if outcome.certificate.verdict() { "pass" } else { "fail" }
            );
            eprintln!("{}", outcome.summary);
            Ok(same && outcome.certificate.verdict())
        }
        Command::Oracle(o) => oracle(o),
        Command::Report {
            spec,
            seed,
            max_closure,
            allow_large,
        } => {
            let path = spec;
            let spec = load(&path)?;
            let mut ok = true;
            for theorem in [Theorem::One, Theorem::Three, Theorem::Five, Theorem::Cor6] {
                let args = RunArgs {
                    spec: path.clone(),
                    theorem,
                    window: if theorem == Theorem::Three { 8 } else { 32 },
                    seed,
                    max_closure,
                    allow_large,
                    c_order: None,
                    out: None,
                    dump: false,
                };
                match run(&spec, &args) {
                    Ok(o) => {
                        ok &= o.certificate.verdict();
                        println!("{}", o.summary);
                    }
                    Err(e) => println!("{}: not run ({e})", label(theorem)),
                }
            }
            Ok(ok)
        }
    }
}

fn label(t: Theorem) -> &'static str {
    match t {
        Theorem::One => "theorem-1",
        Theorem::Three => "theorem-3",
        Theorem::Five => "theorem-5",
        Theorem::Cor6 => "corollary-6",
    }
}

pub struct Outcome {
    pub certificate: EmbeddingCertificate,
    pub summary: String,
    pub dump: Option<String>,
}

fn emit(outcome: &Outcome, out: Option<&Path>) -> CliResult<()> {
    let text = outcome.certificate.to_text();
    match out {
        Some(p) => fs::write(p, &text).map_err(|e| CliError::Io(p.to_path_buf(), e))?,
        None => print!("{text}"),
    }
    if let Some(d) = &outcome.dump {
        print!("{d}");
    }
    eprintln!("{}", outcome.summary);
    Ok(())
}

fn declared_or_computed(spec: &GroupSpec, bound: usize) -> CliResult<AbelianizationData> {
    match &spec.abelianization {
        Some(d) => Ok(d.clone()),
        None if spec.group.is_finite() => Ok(abelianization(&spec.group, bound)?.data),
        None => Err(CliError::Usage(
            "infinite groups need an [abelianization] declaration in the spec".into(),
        )),
    }
}

fn decompositions(spec: &GroupSpec, data: &AbelianizationData, bound: usize) -> CliResult<Vec<GeneratorDecomposition>> {
    if let Some(d) = &spec.decompositions {
        return Ok(d.clone());
    }
    if !spec.group.is_finite() {
        return Err(CliError::Usage(
            "infinite groups need [[decompositions]] for --theorem 1".into(),
        ));
    }
    if !data.is_free() {
        return Err(Error::AbelianizationNotFree.into());
    }
    // a finite group with free abelianization is perfect: every generator lies in G'
    spec.group
        .generators()
        .iter()
        .map(|g| {
            let dec = commutator_decomposition_oracle(&spec.group, g, bound)?;
            Ok(GeneratorDecomposition {
                free_exponents: vec![0; data.free_rank],
                commutators: dec.factors.into_iter().map(|f| (f.u, f.v)).collect(),
            })
        })
        .collect()
}

fn run(spec: &GroupSpec, args: &RunArgs) -> CliResult<Outcome> {
    if args.window < 1 {
        return Err(CliError::Usage("--window must be positive".into()));
    }
    let bound = args.max_closure;
    let group: &Arc<EffectiveGroup> = &spec.group;
    match args.theorem {
        Theorem::One => {
            let data = declared_or_computed(spec, bound)?;
            if !data.is_free() {
                return Err(Error::AbelianizationNotFree.into());
            }
            let decomps = decompositions(spec, &data, bound)?;
            let opts = Theorem1Options {
                window: args.window,
                sequence: None,
                derived_length: spec.derived_length,
                closure_bound: bound,
            };
            finish(spec, build_theorem1_witness(group, &data, &decomps, &opts)?, args)
        }
        Theorem::Three => {
            let data = declared_or_computed(spec, bound)?;
            let names = theorem3_recovered_names(data.free_rank, data.torsion.len(), group.generators().len());
            let opts = Theorem3Options {
                window: args.window,
                expressions: spec.expression_words(&names)?,
                derived_length: spec.derived_length,
                closure_bound: bound,
            };
            finish(spec, build_theorem3_witness(group, &data, &opts)?, args)
        }
        Theorem::Five => {
            let opts = FiniteOptions {
                c_order: args.c_order,
                closure_bound: bound,
            };
            finish(spec, build_theorem5_witness(group, &opts)?, args)
        }
        Theorem::Cor6 => {
            if args.c_order.is_some() {
                return Err(CliError::Usage("--c-order applies to --theorem 5 only".into()));
            }
            let opts = FiniteOptions {
                c_order: None,
                closure_bound: bound,
            };
            finish(spec, build_corollary6_witness(group, &opts)?, args)
        }
    }
}

fn finish<G>(spec: &GroupSpec, witness: EmbeddingWitness<G>, args: &RunArgs) -> CliResult<Outcome>
where
    G: Group,
    G::Elem: Hash + Eq,
{
    let active = witness.wreath.active_group().clone();
    if let Some(points) = active.size() {
        if points > LARGE_DOMAIN {
            // dense slices of u32 codes, a few live copies per slot
            let plane = match active.component(0) {
                Component::Cyclic(n) => points / n,
                Component::Free => points,
            };
            let slots = witness.layout.slots.len().max(1) as u64;
            let mib = (plane * slots * 4 * 16) as f64 / (1 << 20) as f64 + 16.0;
            eprintln!("active group {active}: {points} points, estimated memory {mib:.1} MiB");
            if !args.allow_large {
                return Err(CliError::Usage(format!(
                    "active group has {points} points (> {LARGE_DOMAIN}); rerun with --allow-large"
                )));
            }
        }
    }
    let opts = VerifyOptions {
        seed: args.seed,
        closure_bound: args.max_closure,
        ..Default::default()
    };
    let certificate = verify_witness(&witness, None, &opts)?.with_input(spec.source.as_bytes());
    let passed = certificate.checks.iter().filter(|c| c.passed).count();
    let summary = format!(
        "{} on {}: {} ({passed}/{} checks), active group {}, {}",
        certificate.construction,
        certificate.group,
        if certificate.verdict() { "pass" } else { "fail" },
        certificate.checks.len(),
        active,
        certificate.mode,
    );
    let dump = args.dump.then(|| {
        let window = witness.wreath.window();
        if window.size() > 4096 {
            format!("[d]\n(window {window} too large to dump)\n")
        } else {
            format!("[d]\n{}", witness.d().base().dump(&window))
        }
    });
    Ok(Outcome {
        certificate,
        summary,
        dump,
    })
}

fn inspect(spec: &GroupSpec, bound: usize) -> CliResult<String> {
    use std::fmt::Write as _;
    let g = &spec.group;
    let mut out = String::new();
    let _ = writeln!(out, "name: {}", g.name());
    let _ = writeln!(out, "backend: {}", g.backend().tag());
    let _ = writeln!(out, "generators: {}", g.generators().len());
    for (name, x) in spec.names.iter().zip(g.generators()) {
        let order = match g.element_order(x) {
            Ok(n) => n.to_string(),
            Err(Error::InfiniteOrder) => "infinite".into(),
            Err(_) => "infinite or undetected".into(),
        };
        let _ = writeln!(out, "  {name} = {x}  order {order}");
    }
    if let Some(p) = g.presentation() {
        let _ = writeln!(out, "relators: {}", p.relators().len());
    }
    if g.is_finite() {
        let series = derived_series(g, bound)?;
        let ab = abelianization(g, bound)?;
        let _ = writeln!(out, "order: {}", series[0].len());
        let _ = writeln!(out, "derived-length: {}", derived_length(g, bound)?);
        let _ = writeln!(out, "abelianization: {}", describe(&ab.data));
        let _ = writeln!(out, "exponent: {}", g.exponent(bound)?);
    } else {
        let _ = writeln!(out, "order: infinite");
        let _ = writeln!(
            out,
            "derived-length: {}",
            spec.derived_length
                .map_or("undeclared".into(), |d| format!("{d} (declared)"))
        );
        let _ = writeln!(
            out,
            "abelianization: {}",
            spec.abelianization.as_ref().map_or("undeclared".into(), |d| format!(
                "{} (declared, rank {})",
                describe(d),
                d.free_rank
            ))
        );
    }
    Ok(out)
}

fn describe(d: &AbelianizationData) -> String {
    let mut parts = Vec::new();
    match d.free_rank {
        0 => {}
        1 => parts.push("Z".to_string()),
        k => parts.push(format!("Z^{k}")),
    }
    parts.extend(d.torsion.iter().map(|(_, l)| format!("Z{l}")));
    if parts.is_empty() {
        "trivial".into()
    } else {
        parts.join(" x ")
    }
}

fn oracle(o: OracleCommand) -> CliResult<bool> {
    match o {
        OracleCommand::Uneven { terms, modulus } => match is_strictly_uneven(&terms, modulus)? {
            None => {
                println!("uneven: yes");
                Ok(true)
            }
            Some(v) => {
                println!("uneven: no");
                println!("counterexample: {v}");
                Ok(false)
            }
        },
        OracleCommand::Decompose {
            group,
            element,
            max_closure,
        } => {
            let spec = load_named(&group)?;
            let g = spec.group.parse_element(&element)?;
            let dec = commutator_decomposition_oracle(&spec.group, &g, max_closure)?;
            println!("element: {g}");
            println!("length: {}", dec.length());
            for f in &dec.factors {
                println!(
                    "[{}, {}] = [{}, {}]",
                    f.u,
                    f.v,
                    f.u_word.display_with(&spec.names),
                    f.v_word.display_with(&spec.names)
                );
            }
            Ok(true)
        }
        OracleCommand::Derived { group, max_closure } => {
            let spec = load_named(&group)?;
            let series = derived_series(&spec.group, max_closure)?;
            for (i, term) in series.iter().enumerate() {
                println!("G^({i}): order {}", term.len());
            }
            println!("derived-length: {}", derived_length(&spec.group, max_closure)?);
            Ok(true)
        }
    }
}
