use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use polyvol_core::instance::{parse_instance, to_json};
use polyvol_core::oracle::{known_instance, mc_volume, KnownKind};
use polyvol_core::polytope::{compactness_witness, find_strict_interior, scale_rows, NormalizedInstance};
use polyvol_core::rat::{int, to_decimal, Rat};
use polyvol_core::residue::LevelStats;
use polyvol_core::{normalize, run_direct, run_transform, Error, PolytopeInstance};

/// Exact volume of {x >= 0 | Ax <= b} by residue inversion of the Laplace transform.
///
/// Exit codes: 0 ok, 2 invalid input, 3 nonpositive b, 4 unbounded,
/// 5 not pointed, 6 degenerate data, 7 internal error.
#[derive(Parser, Debug)]
#[command(name = "polyvol", version, about, long_about = None)]
struct Cli {
    /// Print a generated instance (simplex:N, box:N or paper-example) and exit.
    #[arg(long, value_name = "KIND")]
    gen: Option<String>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the exact volume of an instance file.
    Volume(VolumeArgs),
    /// Print a generated instance (simplex:N, box:N or paper-example).
    Gen { kind: String },
}

#[derive(clap::Args, Debug)]
struct VolumeArgs {
    /// JSON file {"A": [[rational strings]], "b": [rational strings]}.
    file: PathBuf,

    #[arg(long, value_enum, default_value_t = Method::Both)]
    method: Method,

    /// Digits after the decimal point in the decimal rendering.
    #[arg(long, default_value_t = 12)]
    digits: usize,

    /// Only validate: normalization, boundedness and pointedness.
    #[arg(long)]
    check_only: bool,

    /// Append a Monte Carlo cross-check.
    #[arg(long)]
    verify_mc: bool,

    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Per-level node counts, closing sides and perturbations.
    #[arg(long)]
    stats: bool,

    /// Read decimal literals as exact rationals instead of refusing them.
    #[arg(long)]
    tolerate_floats: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Direct,
    Transform,
    Both,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = e.exit_code();
        let mut message = e.to_string();
        if code == 6 {
            message.push_str(
                "\nhint: the data sit on a measure-zero coincidence; perturbing one entry of A by a small rational \
                 (or removing a redundant constraint) makes the poles simple",
            );
        }
        Failure { code, message }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match (&cli.gen, &cli.command) {
        (Some(kind), None) | (None, Some(Command::Gen { kind })) => generate(kind),
        (None, Some(Command::Volume(args))) => volume(args),
        (Some(_), Some(_)) => Err(fail(2, "--gen cannot be combined with a subcommand")),
        (None, None) => Err(fail(2, "nothing to do; try `polyvol volume <file>` or `polyvol --help`")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn generate(kind: &str) -> Result<(), Failure> {
    let size = |s: &str| -> Result<usize, Failure> {
        s.parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| fail(2, format!("bad dimension {s:?} in --gen {kind}")))
    };
    let known = match kind.split_once(':') {
        Some(("simplex", n)) => KnownKind::Simplex(size(n)?),
        Some(("box", n)) => KnownKind::Box(vec![int(1); size(n)?]),
        None if kind == "paper-example" => KnownKind::PaperExample,
        _ => return Err(fail(2, format!("unknown generator {kind:?}; use simplex:N, box:N or paper-example"))),
    };
    print!("{}", to_json(&known_instance(&known).0));
    Ok(())
}

fn load(args: &VolumeArgs) -> Result<PolytopeInstance, Failure> {
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| fail(2, format!("cannot read {}: {e}", args.file.display())))?;
    let parsed = parse_instance(&text, args.tolerate_floats)?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    Ok(parsed.instance)
}

fn join(v: &[Rat]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn volume(args: &VolumeArgs) -> Result<(), Failure> {
    let inst = load(args)?;
    if args.check_only {
        return check_only(&inst);
    }
    let norm = normalize(&inst)?;

    let direct = match args.method {
        Method::Direct | Method::Both => Some(run_direct(&norm, None)?),
        Method::Transform => None,
    };
    let transform = match args.method {
        Method::Transform | Method::Both => Some(run_transform(&norm, None)?),
        Method::Direct => None,
    };
    let value = match (&direct, &transform) {
        (Some(d), Some(t)) if d.result != t.result => {
            return Err(fail(
                7,
                format!(
                    "methods disagree: direct = {}, transform = {} (C = {}); abscissae c = ({}); \
                     direct ledger {:?}; transform ledger {:?}",
                    d.result,
                    t.result,
                    t.h_coefficient,
                    join(norm.interior()),
                    d.config.ledger(),
                    t.config.ledger()
                ),
            ))
        }
        (Some(d), _) => d.result.clone(),
        (None, Some(t)) => t.result.clone(),
        (None, None) => unreachable!("at least one method runs"),
    };

    println!("{value} ({})", to_decimal(&value, args.digits));
    if args.method == Method::Both {
        println!("methods: direct = transform (exact)");
    }

    if args.stats {
        println!("abscissae: c = ({})", join(norm.interior()));
        if let Some(d) = &direct {
            print_levels("direct", &d.levels);
            let bound = if d.node_bound_holds(norm.n()) { "holds" } else { "VIOLATED" };
            println!("direct: leaves {}, node bound (n+1)^k {bound}", d.leaves);
            println!("direct: first-level partials {}", join(&d.partials));
            print_ledger("direct", d.config.ledger());
        }
        if let Some(t) = &transform {
            print_levels("transform", &t.levels);
            println!("transform: C = {} (volume = C/{}!)", t.h_coefficient, norm.n());
            print_ledger("transform", t.config.ledger());
        }
    }

    if args.verify_mc {
        let est = mc_volume(&inst, args.samples, args.seed)?;
        println!(
            "mc: estimate {:.6} stderr {:.6} z {:.3} (samples {}, seed {}, box side {})",
            est.estimate,
            est.stderr,
            est.z_score(&value),
            est.samples,
            est.seed,
            est.box_bound
        );
    }
    Ok(())
}

fn print_levels(tag: &str, levels: &[LevelStats]) {
    for (k, st) in levels.iter().enumerate() {
        println!(
            "{tag}: level {} ({}): {} terms in, {} poles ({} left, {} right), closed left {} right {}, {} terms out",
            k + 1,
            st.var,
            st.terms_in,
            st.poles_found,
            st.left_poles,
            st.right_poles,
            st.closed_left,
            st.closed_right,
            st.terms_out
        );
    }
}

fn print_ledger(tag: &str, ledger: &[polyvol_core::residue::LedgerEntry]) {
    if ledger.is_empty() {
        println!("{tag}: perturbation ledger empty");
    }
    for e in ledger {
        println!("{tag}: perturbed {} from {} to {} (epsilon {}, delta {})", e.var, e.from, e.to, e.epsilon, e.delta);
    }
}

fn check_only(inst: &PolytopeInstance) -> Result<(), Failure> {
    let (a, cleanup) = scale_rows(inst)?;
    println!(
        "normalized: m = {} (input rows {}, dropped zero rows {:?}, merged duplicates {:?}), n = {}",
        a.len(),
        inst.m(),
        cleanup.dropped_zero_rows,
        cleanup.merged_duplicate_rows,
        inst.n()
    );
    match compactness_witness(&a) {
        Some(u) => println!("compact: true (u = ({}), A'u >= e)", join(&u)),
        None => {
            println!("compact: false");
            return Err(Error::NotCompact.into());
        }
    }
    match find_strict_interior(&a) {
        Ok(c) => println!("pointed: true (c = ({}), c > 0, A'c > 0)", join(&c)),
        Err(e) => {
            println!("pointed: false");
            return Err(e.into());
        }
    }
    NormalizedInstance::from_matrix(a)?;
    println!("valid");
    Ok(())
}
