use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use gadget_core::certify::{
    certify_patterns, coarse_bound, optimize_params, write_landscape_csv, GapParams, GridSpec,
};
use gadget_core::config::ModelConfig;
use gadget_core::model::{TdProfile, TermSet};
use gadget_core::report::{Check, Oracle, RunReport};
use gadget_core::spectral::{Method, SolverConfig};
use gadget_core::subspace::{assemble_restricted, default_budget, enumerate_subspace};
use gadget_core::suite::{
    run_suite, sector_references, sector_spectrum, spectrum_checks, SectorSpec, Suite,
};
use gadget_core::GadgetError;

#[derive(Parser)]
#[command(
    name = "gadget",
    version,
    about = "Build, verify and certify two-body gadget Hamiltonians"
)]
struct Cli {
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serialize the term set of a model.
    Build {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one verification suite.
    Verify {
        #[arg(long)]
        suite: Suite,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Lowest levels of invariant subspaces.
    Spectrum {
        #[arg(long)]
        config: Option<PathBuf>,
        /// `0`, `all`, `x1`, `x2`, `x1x2`, or `d:<digits>`.
        #[arg(long, default_value = "0")]
        sector: SectorSpec,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[arg(long, default_value_t = SolverConfig::default().tol)]
        tol: f64,
        #[arg(long, default_value_t = SolverConfig::default().seed)]
        seed: u64,
        /// Also write the restricted matrix of a single sector in Matrix Market format.
        #[arg(long)]
        matrix_out: Option<PathBuf>,
    },
    /// Coarse bound chain and the pattern-resolved certificate.
    Certify {
        /// `U,t,J,beta_lr,beta_du`.
        #[arg(long, default_value = "1,0.375,0.09,0.25,0")]
        params: GapParams,
        #[arg(long, value_enum, default_value_t = TdArg::Derived)]
        td: TdArg,
        /// Required single-vortex gap, in units of `U`.
        #[arg(long, default_value_t = 0.0375)]
        vortex_threshold: f64,
        /// Required certified gap, in units of `U`.
        #[arg(long, default_value_t = 0.075)]
        gap_threshold: f64,
    },
    /// Grid search for the largest certified gap.
    Optimize {
        /// `default` or `;`-separated overrides such as `J=0.05:0.1:0.01;t=0.375`.
        #[arg(long, default_value = "default")]
        grid: GridSpec,
        /// CSV landscape of every grid point.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Dense,
    Iterative,
}

#[derive(Clone, Copy, ValueEnum)]
enum TdArg {
    Derived,
    Literal,
}

fn load_config(path: &Option<PathBuf>) -> Result<ModelConfig, GadgetError> {
    match path {
        Some(p) => ModelConfig::load(p),
        None => Ok(ModelConfig::default_toric()),
    }
}

fn with_model(report: &mut RunReport, path: &Option<PathBuf>) -> Result<TermSet, GadgetError> {
    let cfg = load_config(path)?;
    let t0 = Instant::now();
    let ts = cfg.build()?;
    report.time("build", t0.elapsed().as_secs_f64());
    report.fingerprint = Some(ts.fingerprint()?);
    report.config = Some(cfg);
    Ok(ts)
}

fn run(cli: &Cli, report: &mut RunReport) -> Result<(), GadgetError> {
    let budget = default_budget();
    match &cli.command {
        Command::Build { config, out } => {
            let ts = with_model(report, config)?;
            ts.validate()?;
            std::fs::write(out, ts.to_json()?)?;
            report.push(Check::new("model_valid", true, true, Oracle::ExactAlgebra));
            report.insert("out", out);
            report.insert("terms", ts.terms.len());
        }
        Command::Verify { suite, config } => {
            let ts = with_model(report, config)?;
            let t0 = Instant::now();
            report.extend(run_suite(&ts, *suite, budget)?);
            report.time("suite", t0.elapsed().as_secs_f64());
        }
        Command::Spectrum {
            config,
            sector,
            k,
            method,
            tol,
            seed,
            matrix_out,
        } => {
            let ts = with_model(report, config)?;
            let cfg = SolverConfig {
                method: match method {
                    MethodArg::Auto => Method::Auto,
                    MethodArg::Dense => Method::Dense,
                    MethodArg::Iterative => Method::Iterative,
                },
                tol: *tol,
                seed: *seed,
                ..SolverConfig::default()
            };
            let refs = sector_references(&ts, sector)?;
            if let Some(path) = matrix_out {
                if refs.len() != 1 {
                    return Err(GadgetError::Config(
                        "--matrix-out needs a single sector".into(),
                    ));
                }
                let b = enumerate_subspace(&ts, refs[0].1, budget)?;
                assemble_restricted(&ts, &b)?
                    .write_matrix_market(BufWriter::new(File::create(path)?))?;
            }
            let t0 = Instant::now();
            let spectra = refs
                .iter()
                .map(|(name, key)| sector_spectrum(&ts, name, *key, *k, &cfg, budget))
                .collect::<Result<Vec<_>, _>>()?;
            report.time("spectrum", t0.elapsed().as_secs_f64());
            report.extend(spectrum_checks(&spectra));
            report.insert("sectors", &spectra);
            report.insert("solver", cfg);
        }
        Command::Certify {
            params,
            td,
            vortex_threshold,
            gap_threshold,
        } => {
            params.validate()?;
            let td = match td {
                TdArg::Derived => TdProfile::Derived,
                TdArg::Literal => TdProfile::Literal,
            };
            let chain = coarse_bound(params.u, params.t, params.j);
            let cert = certify_patterns(params, td)?;
            let u = params.u;
            report.push(
                Check::new(
                    "vortex_gap_above_threshold",
                    cert.vortex_gap > vortex_threshold * u,
                    cert.vortex_gap,
                    Oracle::DenseEig,
                )
                .expect(vortex_threshold * u, cert.vortex_gap - vortex_threshold * u),
            );
            report.push(
                Check::new(
                    "certified_gap_at_threshold",
                    cert.certified_gap >= gap_threshold * u,
                    cert.certified_gap,
                    Oracle::DenseEig,
                )
                .expect(gap_threshold * u, 0.0),
            );
            report.push(Check::new(
                "certificate_positive",
                cert.verdict,
                cert.certified_gap,
                Oracle::DenseEig,
            ));
            report.insert("coarse_bound", &chain);
            report.insert("certificate", &cert);
        }
        Command::Optimize { grid, out } => {
            let t0 = Instant::now();
            let opt = optimize_params(grid)?;
            report.time("grid", t0.elapsed().as_secs_f64());
            if let Some(path) = out {
                write_landscape_csv(&opt.landscape, BufWriter::new(File::create(path)?))?;
                report.insert("landscape", path);
            }
            report.push(Check::new(
                "optimum_positive",
                opt.best.certified_gap > 0.0,
                opt.best.certified_gap,
                Oracle::DenseEig,
            ));
            report.insert("points", opt.landscape.len());
            report.insert("best", opt.best);
            report.insert("grid", grid);
        }
    }
    Ok(())
}

fn emit(report: &RunReport, path: &Option<PathBuf>) -> io::Result<()> {
    let text = serde_json::to_string_pretty(report).map_err(io::Error::other)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n"),
        None => writeln!(io::stdout().lock(), "{text}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot set up {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let mut report = RunReport::new(std::env::args().collect());
    if let Err(e) = run(&cli, &mut report) {
        let kind = match e {
            GadgetError::BudgetExceeded { .. } => "budget exceeded",
            GadgetError::Config(_) | GadgetError::Io(_) | GadgetError::Json(_) => "configuration",
            _ => "run",
        };
        eprintln!("error ({kind}): {e}");
        return ExitCode::from(2);
    }
    if let Err(e) = emit(&report, &cli.report) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!(
            "FAIL {}: measured {}, expected {}",
            c.name, c.measured, c.expected
        );
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
