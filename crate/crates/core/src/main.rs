use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use darkmap::catalog::{self, CatalogEntry};
use darkmap::dot::export_dot;
use darkmap::pipeline::{run, run_verified, Analysis};
use darkmap::{parse_system, Error, LevelId, SystemSpec, Tolerances};

/// Dark-state analysis of N-level quantum systems.
#[derive(Debug, Parser)]
#[command(name = "darkmap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count and construct the dark states; prints the report as JSON.
    Analyze(InputArgs),
    /// Analyze, then check every dark state by exact time evolution.
    Verify(InputArgs),
    /// Print the dressed coupling graph in DOT format.
    ExportDot(InputArgs),
    /// Built-in configurations with known dark states.
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Debug, Subcommand)]
enum CatalogCommand {
    /// List entries and their default parameters.
    List,
    /// Run an entry through the full pipeline and compare with its expectation.
    Run {
        name: String,
        /// Parameter overrides, `key=value`.
        params: Vec<String>,
        #[command(flatten)]
        opts: Options,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    /// System document (JSON).
    input: Option<PathBuf>,
    /// Use a catalog entry instead of a document.
    #[arg(long, conflicts_with = "input")]
    catalog: Option<String>,
    /// Catalog parameter override, `key=value`; repeatable.
    #[arg(long = "param", requires = "catalog")]
    params: Vec<String>,
    #[command(flatten)]
    opts: Options,
}

#[derive(Debug, Args)]
struct Options {
    /// Upper levels, comma separated; overrides the document.
    #[arg(long, value_delimiter = ',')]
    upper: Option<Vec<u32>>,
    #[arg(long, default_value_t = Tolerances::default().tol_degeneracy)]
    tol_degeneracy: f64,
    #[arg(long, env = "DARKMAP_TOL_RANK", default_value_t = Tolerances::default().tol_rank)]
    tol_rank: f64,
    #[arg(long, default_value_t = Tolerances::default().tol_residual)]
    tol_residual: f64,
    /// Write the output here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Large-atom-number coupling for the `dsp` entry.
    #[arg(long)]
    large_n: bool,
    /// Seed for randomly drawn catalog couplings.
    #[arg(long)]
    seed: Option<u64>,
}

impl Options {
    fn tolerances(&self) -> Tolerances {
        Tolerances { tol_degeneracy: self.tol_degeneracy, tol_rank: self.tol_rank, tol_residual: self.tol_residual }
    }

    fn emit(&self, text: &str) -> Result<(), Error> {
        match &self.report {
            Some(path) => fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e)),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn parse_params(raw: &[String], opts: &Options) -> Result<BTreeMap<String, f64>, Error> {
    let mut out = BTreeMap::new();
    for item in raw {
        let (k, v) = item.split_once('=').ok_or_else(|| Error::Usage(format!("expected key=value, got `{item}`")))?;
        let v: f64 = v.trim().parse().map_err(|_| Error::Usage(format!("`{v}` is not a number")))?;
        out.insert(k.trim().to_string(), v);
    }
    if opts.large_n {
        out.insert("large_n".into(), 1.0);
    }
    if let Some(seed) = opts.seed {
        out.insert("seed".into(), seed as f64);
    }
    Ok(out)
}

type Resolved = (SystemSpec, Option<Vec<LevelId>>, Option<CatalogEntry>);

/// The spec to analyse and the partition to use.
fn resolve(
    input: &Option<PathBuf>,
    catalog: &Option<String>,
    params: &[String],
    opts: &Options,
) -> Result<Resolved, Error> {
    let (spec, entry) = match (input, catalog) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
            (parse_system(&text)?, None)
        }
        (None, Some(name)) => {
            let entry = catalog::build(name, &parse_params(params, opts)?)?;
            (entry.spec.clone(), Some(entry))
        }
        _ => return Err(Error::Usage("give an input document or --catalog NAME".into())),
    };
    let cli_upper: Option<Vec<LevelId>> = opts.upper.as_ref().map(|u| u.iter().copied().map(LevelId).collect());
    if let (Some(cli), Some(doc)) = (&cli_upper, spec.upper_hint()) {
        if cli.as_slice() != doc {
            eprintln!(
                "{}",
                serde_json::json!({
                    "warning": "UpperOverride",
                    "message": "--upper overrides the partition given in the input",
                    "input": doc,
                    "cli": cli,
                })
            );
        }
    }
    Ok((spec, cli_upper, entry))
}

fn analysis_for(args: &InputArgs, verified: bool) -> Result<(Analysis, Option<CatalogEntry>), Error> {
    let (spec, upper, entry) = resolve(&args.input, &args.catalog, &args.params, &args.opts)?;
    let tol = args.opts.tolerances();
    let a = if verified { run_verified(&spec, upper.as_deref(), &tol, None)? } else { run(&spec, upper.as_deref(), &tol)? };
    Ok((a, entry))
}

fn verification_outcome(a: &Analysis) -> Result<(), Error> {
    let v = a.report.verify.as_ref().expect("verified analysis");
    if v.pass {
        return Ok(());
    }
    let worst = v.max_leakage.iter().cloned().fold(0.0, f64::max);
    let worst_res = v.residuals.iter().chain(&v.eigen_residuals).cloned().fold(0.0, f64::max);
    Err(Error::VerificationFailed(format!(
        "max leakage {worst:e} (threshold {:e}), max residual {worst_res:e} (threshold {:e})",
        v.leakage_threshold, v.residual_threshold
    )))
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Analyze(args) => {
            let (a, _) = analysis_for(&args, false)?;
            args.opts.emit(&(a.report.to_json() + "\n"))
        }
        Command::Verify(args) => {
            let (a, _) = analysis_for(&args, true)?;
            args.opts.emit(&(a.report.to_json() + "\n"))?;
            verification_outcome(&a)
        }
        Command::ExportDot(args) => {
            let (a, _) = analysis_for(&args, false)?;
            args.opts.emit(&export_dot(&a.dressed, a.report.sigma_max, args.opts.tol_rank))
        }
        Command::Catalog(CatalogCommand::List) => {
            for e in catalog::ENTRIES {
                println!("{e}");
            }
            Ok(())
        }
        Command::Catalog(CatalogCommand::Run { name, params, opts }) => {
            let args = InputArgs { input: None, catalog: Some(name), params, opts };
            let (a, entry) = analysis_for(&args, true)?;
            args.opts.emit(&(a.report.to_json() + "\n"))?;
            let entry = entry.expect("catalog entry");
            match entry.check(&a.report) {
                Ok(Some(d)) => eprintln!("{}: expectation met (subspace distance {d:e})", entry.name),
                Ok(None) => eprintln!("{}: {} dark state(s)", entry.name, a.report.total_dark),
                Err(msg) => return Err(Error::ExpectationFailed(msg)),
            }
            verification_outcome(&a)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
