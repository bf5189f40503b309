use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ngp_cert::config::{parse_config, CRange, Command, Format, RunConfig};
use ngp_cert::repro::{run_case, CaseId, CaseParams};
use ngp_cert::report::{self, SweepJson, TraceJson, VerdictJson};
use ngp_cert::{parallel_sweep, CliError};
use ngp_cert_core::{build_potential, trace_gamma, Certifier, CertifyOptions, GridSpec, PotentialModel, TraceOptions};

#[derive(Parser)]
#[command(version, about = "Certify nonexistence of traveling waves for nonlocal Gross-Pitaevskii kernels")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Certify a single speed.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        c: Option<f64>,
    },
    /// Certify an evenly spaced range of speeds.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        c_min: Option<f64>,
        #[arg(long)]
        c_max: Option<f64>,
        #[arg(long)]
        c_steps: Option<usize>,
    },
    /// Trace one branch pair of the dispersion zero set near the origin.
    Trace {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        c: Option<f64>,
        /// Axis `j` in `2..=N`.
        #[arg(long)]
        axis: Option<usize>,
    },
    /// Run a built-in reproduction case.
    Reproduce {
        #[arg(long, value_enum)]
        case: CaseId,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        b_tilde: Option<f64>,
        #[arg(long)]
        dim: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    out: OutputArgs,
    /// Certify even when a base hypothesis fails on the grid.
    #[arg(long)]
    allow_hypothesis_failure: bool,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    grid_nr: Option<usize>,
    #[arg(long)]
    grid_ndir: Option<usize>,
}

#[derive(Args)]
struct OutputArgs {
    /// Directory for report files; without it the report goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of json, md, csv.
    #[arg(long)]
    format: Option<String>,
}

fn formats(arg: &Option<String>, from_file: &[Format], default: &[Format]) -> Result<Vec<Format>, CliError> {
    let mut f = match arg {
        Some(list) => list.split(',').map(Format::parse).collect::<Result<Vec<_>, _>>()?,
        None if !from_file.is_empty() => from_file.to_vec(),
        None => default.to_vec(),
    };
    f.sort();
    f.dedup();
    Ok(f)
}

fn file_name(f: Format) -> &'static str {
    match f {
        Format::Json => "report.json",
        Format::Md => "report.md",
        Format::Csv => "trace.csv",
    }
}

/// Writes each rendered format to `dir`, or all of them to stdout.
fn emit(dir: Option<&Path>, rendered: Vec<(Format, String)>) -> Result<(), CliError> {
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            for (f, text) in rendered {
                let path = dir.join(file_name(f));
                fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            for (_, text) in rendered {
                stdout.write_all(text.as_bytes())?;
            }
        }
    }
    Ok(())
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(&common.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", common.config.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(n) = common.grid.grid_nr {
        cfg.grid.n_r = Some(n);
    }
    if let Some(n) = common.grid.grid_ndir {
        cfg.grid.n_dir = Some(n);
    }
    if common.out.out.is_some() {
        cfg.output.path = common.out.out.clone();
    }
    cfg.allow_hypothesis_failure |= common.allow_hypothesis_failure;
    Ok(cfg)
}

fn model_and_grid(cfg: &RunConfig) -> Result<(PotentialModel, GridSpec), CliError> {
    let model = build_potential(cfg.potential.clone()).map_err(|e| CliError::Config(e.to_string()))?;
    let grid = cfg.grid.resolve(&model)?;
    Ok((model, grid))
}

/// Builds the certifier; a nonnegativity failure stops the run unless overridden.
fn certifier(cfg: &RunConfig) -> Result<Certifier, CliError> {
    let (model, grid) = model_and_grid(cfg)?;
    let opts = CertifyOptions {
        grid: Some(grid),
        trace: TraceOptions::default(),
        allow_hypothesis_failure: cfg.allow_hypothesis_failure,
    };
    let certifier = Certifier::new(model, opts);
    let h4 = &certifier.hypotheses().nonnegativity;
    if !h4.passed() && !cfg.allow_hypothesis_failure {
        let at = h4.witness.as_ref().map(|w| format!(" at {w:?}")).unwrap_or_default();
        let value = h4.value.map(|v| format!(" (value {v:e})")).unwrap_or_default();
        return Err(CliError::Hypothesis(format!(
            "H4 (nonnegativity) fails{at}{value}; pass --allow-hypothesis-failure to continue"
        )));
    }
    Ok(certifier)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Cmd::Analyze { common, c } => {
            let mut cfg = load(&common)?;
            cfg.c = c.or(cfg.c);
            cfg.validate_for(Command::Analyze)?;
            let fmts = formats(&common.out.format, &cfg.output.formats, &[Format::Json])?;
            let certifier = certifier(&cfg)?;
            let v = certifier.certify(cfg.c.expect("validated"));
            for d in &v.diagnostics {
                eprintln!("note: {d}");
            }
            let mut rendered = Vec::new();
            for f in fmts {
                match f {
                    Format::Json => rendered.push((f, report::to_json(&VerdictJson::from(&v)))),
                    Format::Md => rendered.push((
                        f,
                        report::analyze_markdown(&cfg.potential, certifier.sonic(), certifier.hypotheses(), &v),
                    )),
                    Format::Csv => return Err(CliError::Config("csv output is only available for trace".into())),
                }
            }
            emit(cfg.output.path.as_deref(), rendered)
        }
        Cmd::Sweep { common, c_min, c_max, c_steps } => {
            let mut cfg = load(&common)?;
            let file = cfg.c_range;
            let pick = |flag: Option<f64>, f: fn(&CRange) -> f64| flag.or(file.as_ref().map(f));
            if let (Some(c_min), Some(c_max), Some(steps)) =
                (pick(c_min, |r| r.c_min), pick(c_max, |r| r.c_max), c_steps.or(file.map(|r| r.steps)))
            {
                cfg.c_range = Some(CRange { c_min, c_max, steps });
            }
            cfg.validate_for(Command::Sweep)?;
            let fmts = formats(&common.out.format, &cfg.output.formats, &[Format::Json, Format::Md])?;
            let certifier = certifier(&cfg)?;
            let rep = parallel_sweep(&certifier, &cfg.c_range.expect("validated").grid());
            let mut rendered = Vec::new();
            for f in fmts {
                match f {
                    Format::Json => rendered.push((f, report::to_json(&SweepJson::new(&cfg.potential, &rep)))),
                    Format::Md => rendered.push((f, report::sweep_markdown(&cfg.potential, &rep))),
                    Format::Csv => return Err(CliError::Config("csv output is only available for trace".into())),
                }
            }
            // stdout gets JSON only, so it stays parseable
            if cfg.output.path.is_none() {
                rendered.retain(|(f, _)| *f == Format::Json);
            }
            emit(cfg.output.path.as_deref(), rendered)
        }
        Cmd::Trace { common, c, axis } => {
            let mut cfg = load(&common)?;
            cfg.c = c.or(cfg.c);
            cfg.axis = axis.or(cfg.axis);
            cfg.validate_for(Command::Trace)?;
            let fmts = formats(&common.out.format, &cfg.output.formats, &[Format::Csv])?;
            let (model, _) = model_and_grid(&cfg)?;
            let trace = trace_gamma(&model, cfg.axis.expect("validated"), cfg.c.expect("validated"), &TraceOptions::default())
                .map_err(|e| CliError::Config(format!("trace failed: {e}")))?;
            let mut rendered = Vec::new();
            for f in fmts {
                let text = match f {
                    Format::Json => report::to_json(&TraceJson::from(&trace)),
                    Format::Md => report::trace_markdown(&trace),
                    Format::Csv => report::trace_csv(&trace)?,
                };
                rendered.push((f, text));
            }
            emit(cfg.output.path.as_deref(), rendered)
        }
        Cmd::Reproduce { case, a, b, epsilon, b_tilde, dim, out, grid } => {
            let params = CaseParams { a, b, epsilon, b_tilde, dim };
            let grid = if grid.grid_nr.is_some() || grid.grid_ndir.is_some() {
                let d = default_grid(case, &params)?;
                Some(
                    GridSpec::new(
                        d.dim,
                        d.r_min,
                        d.r_max,
                        grid.grid_nr.unwrap_or(d.n_r),
                        grid.grid_ndir.unwrap_or(d.n_dir),
                        d.exclusion_radius,
                    )
                    .map_err(|e| CliError::Config(e.to_string()))?,
                )
            } else {
                None
            };
            let fmts = formats(&out.format, &[], &[Format::Json, Format::Md])?;
            let rep = run_case(case, params, grid)?;
            let mut rendered = Vec::new();
            for f in fmts {
                match f {
                    Format::Json => rendered.push((f, rep.json())),
                    Format::Md => rendered.push((f, rep.markdown())),
                    Format::Csv => return Err(CliError::Config("csv output is only available for trace".into())),
                }
            }
            if out.out.is_none() {
                rendered.retain(|(f, _)| *f == Format::Md);
            }
            emit(out.out.as_deref(), rendered)?;
            if rep.passed() {
                Ok(())
            } else {
                Err(CliError::Mismatch(rep.diff_table()))
            }
        }
    }
}

fn default_grid(case: CaseId, p: &CaseParams) -> Result<GridSpec, CliError> {
    use ngp_cert_core::PotentialSpec;
    let spec = match case {
        CaseId::Delta => PotentialSpec::delta(p.a.unwrap_or(1.0), p.dim.unwrap_or(2)),
        CaseId::Sk => PotentialSpec::radial_sk(p.a.unwrap_or(1.0), p.b.unwrap_or(2.0), p.dim.unwrap_or(3)),
        CaseId::DeltaPlusF => PotentialSpec::delta_plus_f(p.epsilon.unwrap_or(0.05), p.dim.unwrap_or(2)),
        CaseId::Dipolar => PotentialSpec::dipolar(p.a.unwrap_or(1.0), p.b_tilde.unwrap_or(0.25)),
    };
    let model = build_potential(spec).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(GridSpec::default_for(&model))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
