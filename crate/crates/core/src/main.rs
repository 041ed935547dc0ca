use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use modschatten::bench::{expand_suites, replay, run_suite, sharpness_probe, ExperimentConfig, Report};
use modschatten::gabor::{
    canonical_dual, gaussian, read_grid, reconstruct, write_grid, write_grid_csv, GaborSystem,
};
use modschatten::matrix_bank::{
    factorize_left_diagonal, factorize_right_diagonal, read_matrix, write_matrix, write_matrix_csv, MatrixFormat,
};
use modschatten::psido::{
    gabor_matrix, op_t, read_symbol, wigner_t, write_symbol, write_symbol_csv, PhaseSpaceSystem,
};
use modschatten::weights_lattices::{Exponent, Weight};
use modschatten::{Error, Result};

#[derive(Parser)]
#[command(name = "modschatten", version, about = "Seeded verification runs and numerical tools")]
struct Cli {
    /// Output directory; defaults to $MODSCHATTEN_OUT, then `./out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Format of written tables and arrays.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run acceptance suites (`all` for every suite); exit status 0 iff every normative check passes.
    Verify {
        suites: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Split a matrix into a diagonal factor and a remainder.
    Factorize(FactorizeArgs),
    #[command(subcommand)]
    Gabor(GaborCommand),
    #[command(subcommand)]
    Psido(PsidoCommand),
    #[command(subcommand)]
    Probe(ProbeCommand),
    /// Recompute every record of a report from its stored inputs.
    Replay { report: PathBuf },
}

#[derive(Args)]
struct FactorizeArgs {
    matrix: PathBuf,
    #[arg(long)]
    p0: Exponent,
    #[arg(long)]
    p1: Exponent,
    #[arg(long)]
    p2: Exponent,
    /// Put the diagonal factor on the right instead of the left.
    #[arg(long)]
    right: bool,
}

#[derive(Subcommand)]
enum GaborCommand {
    /// Canonical dual of a window for steps `a`, `b`.
    Dual {
        #[arg(long)]
        n: Option<usize>,
        /// Window file; a unit Gaussian on `ℤ_n` when absent.
        #[arg(long)]
        window: Option<PathBuf>,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
    },
    /// Expand a signal with the canonical dual pair and report residuals.
    Reconstruct {
        signal: PathBuf,
        #[arg(long)]
        window: Option<PathBuf>,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
    },
}

#[derive(Subcommand)]
enum PsidoCommand {
    /// Matrix of `Op_t(a)`, optionally applied to a signal.
    Op {
        symbol: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[arg(long)]
        apply: Option<PathBuf>,
    },
    /// Cross-Wigner distribution `W^t_{f1,f2}`.
    Wigner {
        f1: PathBuf,
        f2: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
    },
    /// Gabor matrix of a symbol over a Gaussian phase-space system.
    Gmatrix {
        symbol: PathBuf,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
    },
}

#[derive(Subcommand)]
enum ProbeCommand {
    /// Growth of `‖Op^w(a)‖_{I_r}` for symbols with `ℓ^q` coefficients, `q > r`.
    Sharpness {
        #[arg(long, default_value = "2")]
        p: Exponent,
        #[arg(long, default_value = "2")]
        q: Exponent,
        #[arg(long, default_value = "1")]
        r: Exponent,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 64)]
        n: usize,
        /// Use coefficients in `ℓ^r`.
        #[arg(long)]
        control: bool,
    },
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| std::env::var_os("MODSCHATTEN_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?)?;
    Ok(())
}

fn ext(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn load_window(path: Option<&Path>, n: Option<usize>) -> Result<modschatten::gabor::CyclicGridFunction> {
    match (path, n) {
        (Some(p), _) => read_grid(p),
        (None, Some(n)) => Ok(gaussian(n, 1.0)?.normalized()),
        (None, None) => Err(Error::Config {
            field: "window".into(),
            reason: "give --window or --n".into(),
        }),
    }
}

fn verify(cli: &Cli, suites: &[String], seed: Option<u64>, config: Option<&Path>) -> Result<bool> {
    let mut cfg = match config {
        Some(p) => ExperimentConfig::from_toml_str(&std::fs::read_to_string(p)?)?,
        None => ExperimentConfig::default(),
    };
    if !suites.is_empty() {
        cfg.suites = expand_suites(suites)?;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let out = run_suite(&cfg)?;
    let dir = out_dir(cli);
    out.report.write_dir(&dir)?;
    write_json(&dir.join("timing.json"), &out.timing)?;
    for a in &out.report.aggregates {
        println!(
            "{:<22} {:<34} records={:<6} failures={:<4} worst_ratio={:.6e}",
            a.suite, a.check, a.records, a.failures, a.worst_ratio
        );
    }
    for e in &out.report.errors {
        println!("error {} {}: {}", e.inputs.suite, e.digest, e.error);
    }
    println!("{} -> {}", if out.report.pass { "PASS" } else { "FAIL" }, dir.display());
    Ok(out.report.pass)
}

fn run(cli: &Cli) -> Result<bool> {
    let dir = out_dir(cli);
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Verify { suites, seed, config } => return verify(cli, suites, *seed, config.as_deref()),
        Command::Factorize(f) => {
            let a0 = read_matrix(&f.matrix)?;
            let u = Weight::unit();
            let fac = if f.right {
                factorize_right_diagonal(&a0, f.p0, f.p1, f.p2, &u, &u, &u)?
            } else {
                factorize_left_diagonal(&a0, f.p0, f.p1, f.p2, &u, &u, &u)?
            };
            std::fs::create_dir_all(&dir)?;
            let fmt = if json { MatrixFormat::Binary } else { MatrixFormat::Csv };
            let suffix = if json { "bin" } else { "csv" };
            write_matrix(&dir.join(format!("a1.{suffix}")), &fac.a1, fmt)?;
            write_matrix(&dir.join(format!("a2.{suffix}")), &fac.a2, fmt)?;
            println!(
                "norm_a0={:.12e} norm_a1={:.12e} norm_a2={:.12e}",
                fac.norm_a0, fac.norm_a1, fac.norm_a2
            );
            if !json {
                print!("{}", write_matrix_csv(&fac.a1));
            }
        }
        Command::Gabor(GaborCommand::Dual { n, window, a, b }) => {
            let g = load_window(window.as_deref(), *n)?;
            let dual = canonical_dual(&GaborSystem::new(g, *a, *b)?)?;
            std::fs::create_dir_all(&dir)?;
            write_grid(&dir.join("dual.csv"), &dual, false)?;
            print!("{}", write_grid_csv(&dual));
        }
        Command::Gabor(GaborCommand::Reconstruct { signal, window, a, b }) => {
            let f = read_grid(signal)?;
            let g = load_window(window.as_deref(), Some(f.len()))?;
            let sys = GaborSystem::new(g, *a, *b)?.with_canonical_dual()?;
            let r = reconstruct(&sys, &f)?;
            std::fs::create_dir_all(&dir)?;
            write_grid(&dir.join("reconstruction.csv"), &r.synthesis_dual, false)?;
            println!(
                "residual_synthesis_dual={:.6e} residual_analysis_dual={:.6e}",
                r.residual_synthesis_dual, r.residual_analysis_dual
            );
        }
        Command::Psido(PsidoCommand::Op { symbol, t, apply }) => {
            let m = op_t(&read_symbol(symbol)?, *t)?;
            std::fs::create_dir_all(&dir)?;
            write_matrix(&dir.join("operator.csv"), &m, MatrixFormat::Csv)?;
            if let Some(p) = apply {
                let g = modschatten::psido::apply_operator(&m, &read_grid(p)?)?;
                write_grid(&dir.join("applied.csv"), &g, false)?;
                print!("{}", write_grid_csv(&g));
            }
        }
        Command::Psido(PsidoCommand::Wigner { f1, f2, t }) => {
            let w = wigner_t(&read_grid(f1)?, &read_grid(f2)?, *t)?;
            std::fs::create_dir_all(&dir)?;
            write_symbol(&dir.join("wigner.csv"), &w, false)?;
            if !json {
                print!("{}", write_symbol_csv(&w));
            }
        }
        Command::Psido(PsidoCommand::Gmatrix { symbol, a, b }) => {
            let s = read_symbol(symbol)?;
            let ps = PhaseSpaceSystem::gaussian(s.n(), *a, *b)?;
            let m = gabor_matrix(&s, &ps)?;
            std::fs::create_dir_all(&dir)?;
            write_matrix(&dir.join("gabor_matrix.csv"), &m, MatrixFormat::Csv)?;
            println!("gabor matrix {}x{} -> {}", m.n(), m.n(), dir.display());
        }
        Command::Probe(ProbeCommand::Sharpness { p, q, r, sizes, n, control }) => {
            let table = sharpness_probe(*p, *q, *r, sizes, *n, *control)?;
            std::fs::create_dir_all(&dir)?;
            let path = dir.join(format!("sharpness.{}", ext(cli.format)));
            if json {
                write_json(&path, &table)?;
            } else {
                std::fs::write(&path, table.to_csv())?;
            }
            print!("{}", table.to_csv());
        }
        Command::Replay { report } => {
            let r = Report::from_json(&std::fs::read_to_string(report)?)?;
            let o = replay(&r)?;
            println!("replayed {} records from {} cases; {} mismatches", o.records, o.cases, o.mismatches.len());
            for d in &o.mismatches {
                println!("mismatch {d}");
            }
            return Ok(o.mismatches.is_empty());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
