use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use galilean_cli::config::{parse_config, CheckConfig, CheckSpec, Expectation, Format, ScenarioConfig};
use galilean_cli::report::{check_csv, render, to_structured, OverallVerdict, RunReport};
use galilean_cli::runner::{convergence_csv, convergence_human, run_convergence, run_scenario, RunOptions};
use galilean_cli::scenarios::{bundled_text, BUNDLED};
use galilean_core::audit::RelationLabel;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Human,
    Structured,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Human => Format::Human,
            FormatArg::Structured => Format::Structured,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "galilean", version, about = "Galilean-algebra audits, covariance checks and Casimir tools")]
struct Cli {
    /// Output format; overrides the scenario's [output] section.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Directory for the report document and per-check CSV files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Multiplier applied to every tolerance; recorded in the report.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,
    /// Replaces the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Audit the commutation relations of a scenario's representation.
    Audit { config: String },
    /// Run every check of one or more scenarios (file paths or bundled names).
    Run {
        #[arg(required = true)]
        configs: Vec<String>,
    },
    /// List the bundled scenarios.
    ListScenarios,
    /// Print a relation and what it expresses, e.g. `5f` or `5c(x,y)`.
    Explain { relation: String },
    /// Rerun a scenario with the ladder truncation doubled k times.
    Convergence {
        config: String,
        #[arg(long = "double-N", value_name = "K")]
        double_n: u32,
    },
}

fn load(arg: &str) -> Result<ScenarioConfig> {
    let path = Path::new(arg);
    let text = if path.exists() {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    } else if let Some(t) = bundled_text(arg) {
        t.to_string()
    } else {
        bail!("no scenario file or bundled scenario named `{arg}`");
    };
    parse_config(&text).with_context(|| format!("parsing {arg}"))
}

fn options(cli: &Cli) -> Result<RunOptions> {
    if !(cli.tol_scale.is_finite() && cli.tol_scale > 0.0) {
        bail!("--tol-scale must be positive, got {}", cli.tol_scale);
    }
    Ok(RunOptions {
        tol_scale: cli.tol_scale,
        seed: cli.seed,
    })
}

fn out_dir(cli: &Cli, cfg: &ScenarioConfig) -> Option<PathBuf> {
    cli.out.clone().or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
}

fn emit(cli: &Cli, cfg: &ScenarioConfig, report: &RunReport) -> Result<()> {
    let format = cli.format.map_or(cfg.output.format, Format::from);
    print!("{}", render(report, format));
    if let Some(dir) = out_dir(cli, cfg) {
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        let doc = dir.join(format!("{}.report.json", report.scenario));
        fs::write(&doc, to_structured(report)).with_context(|| format!("writing {}", doc.display()))?;
        for check in &report.checks {
            let path = dir.join(format!("{}.{}.csv", report.scenario, check.id));
            fs::write(&path, check_csv(report, check)).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::ListScenarios => {
            for (name, text) in BUNDLED {
                let description = parse_config(text)?.description.unwrap_or_default();
                println!("{name:<32} {description}");
            }
            Ok(0)
        }
        Command::Explain { relation } => {
            let code = relation.split('(').next().unwrap_or(relation);
            let label = RelationLabel::parse(code.trim())
                .with_context(|| format!("`{relation}` is not a relation id (5a … 5i)"))?;
            println!("{}  {}", label.code(), label.statement());
            println!("    {}", label.meaning());
            Ok(0)
        }
        Command::Audit { config } => {
            let mut cfg = load(config)?;
            let audits: Vec<CheckConfig> = cfg
                .checks
                .iter()
                .filter(|c| matches!(c.spec, CheckSpec::AlgebraAudit { .. }))
                .cloned()
                .collect();
            cfg.checks = if audits.is_empty() {
                vec![CheckConfig {
                    id: "1-algebra_audit".to_string(),
                    expect: Expectation::Pass,
                    spec: CheckSpec::AlgebraAudit {
                        audit_time: 0.0,
                        expected_failures: Default::default(),
                    },
                }]
            } else {
                audits
            };
            let report = run_scenario(&cfg, &options(cli)?)?;
            emit(cli, &cfg, &report)?;
            Ok(report.verdict.exit_code())
        }
        Command::Run { configs } => {
            let opts = options(cli)?;
            let loaded = configs.iter().map(|c| load(c)).collect::<Result<Vec<_>>>()?;
            let mut code = 0;
            for cfg in &loaded {
                let report = run_scenario(cfg, &opts)?;
                emit(cli, cfg, &report)?;
                code = code.max(report.verdict.exit_code());
            }
            Ok(code)
        }
        Command::Convergence { config, double_n } => {
            let cfg = load(config)?;
            let report = run_convergence(&cfg, &options(cli)?, *double_n)?;
            let format = cli.format.map_or(cfg.output.format, Format::from);
            let text = match format {
                Format::Human => convergence_human(&report),
                Format::Structured => serde_json::to_string_pretty(&report)? + "\n",
                Format::Csv => convergence_csv(&report),
            };
            print!("{text}");
            if let Some(dir) = out_dir(cli, &cfg) {
                fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                let path = dir.join(format!("{}.convergence.csv", report.scenario));
                fs::write(&path, convergence_csv(&report)).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(match report.verdict {
                OverallVerdict::Fail => 1,
                _ => 0,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
