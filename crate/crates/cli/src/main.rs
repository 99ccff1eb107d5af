use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dyckham::bench::{rows_to_csv, sweep, SweepSpec};
use dyckham::run::{count_symbols, n_from_symbols, replay, run, Mode, RunError, RunSpec};
use dyckham::testkit::InstanceKind;

/// One-pass streaming tests for Hamming distance and Dyck₂ with type errors.
///
/// Reads `01` (x then reversed y) for the Hamming modes and `([)]` for the
/// Dyck modes from INPUT, or stdin when INPUT is absent or `-`. Exit status is
/// 0 on accept, 1 on reject, 2 on usage or input errors.
#[derive(Debug, Parser)]
#[command(name = "dyckham", version)]
struct Args {
    /// ham-fp, ham-lite, dyck-fp, dyck-lite or oracle.
    #[arg(long, default_value = "dyck-fp")]
    mode: String,
    /// Length parameter: |x| for Hamming input, stream length for Dyck.
    /// Required for stdin. With --bench, a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    n: Vec<u64>,
    /// Distance threshold. With --bench, a comma-separated list.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    k: Vec<u32>,
    /// Error exponent for the fingerprint tests (failure ≤ n^-c).
    #[arg(long)]
    c: Option<u32>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the JSON report instead of the one-line summary.
    #[arg(long)]
    json: bool,
    /// Run a metered sweep over --n × --k and print CSV.
    #[arg(long)]
    bench: bool,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// Run every instance line of this file and print one result per line.
    #[arg(long, value_name = "FILE")]
    replay: Option<PathBuf>,
    /// Input kind: ham, one_turn or dyck (defaults from the mode).
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    block_len: Option<u64>,
    /// Step budget for the post-stream support search.
    #[arg(long)]
    budget: Option<u64>,
    input: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match dispatch(&args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("dyckham: {e}");
            ExitCode::from(2)
        }
    }
}

fn template(args: &Args, mode: Mode) -> Result<RunSpec, RunError> {
    let mut spec = RunSpec::new(mode, 0, 0).with_seed(args.seed);
    if let Some(kind) = &args.kind {
        let kind: InstanceKind = kind.parse().map_err(|_| RunError::Usage(format!("unknown kind {kind:?}")))?;
        if !mode.accepts_kind(kind) {
            return Err(RunError::Usage(format!("mode {mode} does not take {kind} input")));
        }
        spec = spec.with_kind(kind);
    }
    if let Some(c) = args.c {
        spec.c = c;
    }
    if let Some(e) = args.epsilon {
        spec.epsilon = e;
    }
    if let Some(g) = args.gamma {
        spec.gamma = g;
    }
    spec.block_len = args.block_len;
    spec.budget = args.budget;
    Ok(spec)
}

fn single<T: Copy>(v: &[T], flag: &str) -> Result<Option<T>, RunError> {
    match v {
        [] => Ok(None),
        [x] => Ok(Some(*x)),
        _ => Err(RunError::Usage(format!("--{flag} takes one value outside --bench"))),
    }
}

fn dispatch(args: &Args) -> Result<u8, RunError> {
    let mode: Mode = args.mode.parse()?;
    let tpl = template(args, mode)?;
    let mut out = io::stdout().lock();
    let io_err = |e: io::Error| RunError::Io(e.to_string());

    if args.bench {
        if args.n.is_empty() {
            return Err(RunError::Usage("--bench needs --n".into()));
        }
        let rows = sweep(&SweepSpec { mode, ns: args.n.clone(), ks: args.k.clone(), trials: args.trials, seed: args.seed, template: tpl })?;
        out.write_all(rows_to_csv(&rows).as_bytes()).map_err(io_err)?;
        return Ok(0);
    }

    if let Some(path) = &args.replay {
        let f = File::open(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
        let rows = replay(&tpl, f)?;
        for r in &rows {
            if args.json {
                writeln!(out, "{}", serde_json::to_string(r).expect("row serializes")).map_err(io_err)?;
            } else {
                writeln!(
                    out,
                    "line {}: {} d={} expected {} -> {}{}",
                    r.line,
                    r.kind,
                    r.true_distance,
                    r.expected,
                    r.report.to_human().lines().next().unwrap_or_default(),
                    if r.agrees { "" } else { "  [disagrees]" }
                )
                .map_err(io_err)?;
            }
        }
        return Ok(if rows.iter().all(|r| r.agrees) { 0 } else { 1 });
    }

    let k = single(&args.k, "k")?.unwrap_or(0);
    let n_flag = single(&args.n, "n")?;
    let report = match args.input.as_ref().filter(|p| p.as_os_str() != "-") {
        Some(path) => {
            let open = || File::open(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())));
            let n = match n_flag {
                Some(n) => n,
                None => n_from_symbols(tpl.kind, count_symbols(open()?)?)?,
            };
            run(&RunSpec { n, k, ..tpl }, open()?)?
        }
        None => {
            let n = n_flag.ok_or_else(|| RunError::Usage("--n is required when reading stdin".into()))?;
            run(&RunSpec { n, k, ..tpl }, io::stdin().lock())?
        }
    };
    if args.json {
        writeln!(out, "{}", report.to_json()).map_err(io_err)?;
    } else {
        writeln!(out, "{}", report.to_human().trim_end()).map_err(io_err)?;
    }
    Ok(report.exit_code() as u8)
}
