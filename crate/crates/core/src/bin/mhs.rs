use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use mixed_hodge::deligne::{bigrading_with, delta_splitting_with, Tolerances, TOLERANCE_ENV};
use mixed_hodge::framed::HeightData;
use mixed_hodge::io::{
    evaluate_point, parse_complex, read_file, run_sweep, write_csv, write_file, IoError, MhsDocument,
    SplittingReport, SweepRow, SweepSpec,
};
use mixed_hodge::linalg::Scalar;
use mixed_hodge::polylog::{polylog_framed, PolylogContext};

#[derive(Parser)]
#[command(
    name = "mhs",
    version,
    about = "Deligne splittings and heights of mixed Hodge structures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the axioms of a structure file (and its framing, if any).
    Validate { file: PathBuf },
    /// Bigrading, Y, δ and its Hodge components.
    Splitting {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Heights of a framed structure.
    Height {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        which: Which,
    },
    /// Heights of the polylogarithm structure at one point or over a sweep.
    Polylog(PolylogArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Both,
}

#[derive(clap::Args)]
struct PolylogArgs {
    /// Point `a+bi`.
    #[arg(long, allow_hyphen_values = true, value_parser = complex_arg, conflicts_with = "sweep", required_unless_present = "sweep")]
    z: Option<Scalar>,
    #[arg(long = "N", default_value_t = 4, conflicts_with = "sweep")]
    n: usize,
    #[arg(long, default_value_t = 0, conflicts_with = "sweep")]
    a: usize,
    #[arg(long, default_value_t = 1, conflicts_with = "sweep")]
    b: usize,
    /// Sweep specification (JSON).
    #[arg(long)]
    sweep: Option<PathBuf>,
    /// Write the rows as CSV to this file.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Print the framed structure at `--z` as a document instead of heights.
    #[arg(long, conflicts_with = "sweep")]
    emit_json: bool,
}

fn complex_arg(s: &str) -> Result<Scalar, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

fn tolerances() -> Result<Tolerances, IoError> {
    match std::env::var(TOLERANCE_ENV) {
        Err(_) => Ok(Tolerances::default()),
        Ok(s) => Tolerances::parse_override(&s)
            .ok_or_else(|| IoError::Usage(format!("{TOLERANCE_ENV}={s:?} is not a positive number"))),
    }
}

fn load(path: &Path) -> Result<MhsDocument, IoError> {
    MhsDocument::from_json(&read_file(path)?)
}

fn print_json<T: Serialize>(value: &T) -> Result<(), IoError> {
    let s = serde_json::to_string_pretty(value).expect("reports always serialise");
    let mut out = std::io::stdout().lock();
    writeln!(out, "{s}").map_err(|e| IoError::io(Path::new("<stdout>"), e))
}

fn validate(file: &Path, tol: &Tolerances) -> Result<(), IoError> {
    let doc = load(file)?;
    let h = doc.to_mhs()?;
    let framed = doc.to_framed()?;
    let b = bigrading_with(&h, tol)?;
    let hodge_numbers: Vec<_> = b
        .pieces()
        .iter()
        .filter(|(_, s)| s.dim() > 0)
        .map(|(&(p, q), s)| json!({"p": p, "q": q, "dim": s.dim()}))
        .collect();
    print_json(&json!({
        "valid": true,
        "dimension": h.dimension(),
        "weights": h.weight().weights(),
        "hodge_numbers": hodge_numbers,
        "framing": framed.map(|f| json!({"a": f.a, "b": f.b})),
    }))
}

fn splitting(file: &Path, out: Option<&Path>, tol: &Tolerances) -> Result<(), IoError> {
    let h = load(file)?.to_mhs()?;
    let s = delta_splitting_with(&h, tol)?;
    let report = SplittingReport::new(&h, &s);
    match out {
        None => print_json(&report),
        Some(p) => {
            let text = serde_json::to_string_pretty(&report).expect("reports always serialise");
            write_file(p, text.as_bytes())
        }
    }
}

fn height(file: &Path, which: Which, tol: &Tolerances) -> Result<(), IoError> {
    let fh = load(file)?
        .to_framed()?
        .ok_or_else(|| IoError::Validation("document has no framing".into()))?;
    let hd = HeightData::compute_with(&fh, tol)?;
    let mut out = serde_json::Map::new();
    if matches!(which, Which::One | Which::Both) {
        out.insert("ht1".into(), json!(hd.height1()));
        out.insert("ht1_via_delta".into(), json!(hd.height1_via_delta()?));
    }
    if matches!(which, Which::Two | Which::Both) {
        out.insert("ht2".into(), json!(hd.height2()?));
    }
    out.insert(
        "diagnostics".into(),
        json!({
            "splitting_residual": hd.splitting.residual,
            "reality_residual": hd.splitting.reality_residual,
            "lift_residuals": hd.frame.lift_residuals,
            "delta_cubed_norm": hd.delta_cubed_norm(),
        }),
    );
    print_json(&out)
}

fn polylog(args: &PolylogArgs, tol: &Tolerances) -> Result<(), IoError> {
    let rows: Vec<SweepRow> = if let Some(spec) = &args.sweep {
        run_sweep(&SweepSpec::from_json(&read_file(spec)?)?, tol)?
    } else {
        let z = args.z.expect("clap requires --z without --sweep");
        let ctx = PolylogContext::new(z, args.n)?;
        if args.emit_json {
            let fh = polylog_framed(&ctx, args.a, args.b)?;
            return print_json(&MhsDocument::from_framed(&fh));
        }
        evaluate_point(&ctx, &[(args.a, args.b)], tol)?
    };
    match &args.csv {
        Some(p) => {
            let f = std::fs::File::create(p).map_err(|e| IoError::io(p, e))?;
            write_csv(&rows, f).map_err(|e| IoError::Io {
                path: p.clone(),
                source: e.into(),
            })
        }
        None if args.sweep.is_some() => write_csv(&rows, std::io::stdout().lock()).map_err(|e| IoError::Io {
            path: "<stdout>".into(),
            source: e.into(),
        }),
        None => print_json(&rows[0]),
    }
}

fn run(cli: Cli) -> Result<(), IoError> {
    let tol = tolerances()?;
    match cli.command {
        Command::Validate { file } => validate(&file, &tol),
        Command::Splitting { file, out } => splitting(&file, out.as_deref(), &tol),
        Command::Height { file, which } => height(&file, which, &tol),
        Command::Polylog(args) => polylog(&args, &tol),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
