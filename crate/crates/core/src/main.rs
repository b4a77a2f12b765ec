//! Command-line interface: eta expansions, coefficient twisting, point
//! counts, involution signs, and the verification pipelines.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use cytwist::charfield::{PrimeModulus, QuadraticCharacterSpec};
use cytwist::counting::{count_catalog_entry, CountOptions};
use cytwist::error::VarietyError;
use cytwist::forms::{pullback_sign, ResidueFormSpec};
use cytwist::harness::{
    load_coefficient_files, run_catalog, verify_geometric_twist, write_report, PipelineOptions,
    Report, RunConfig,
};
use cytwist::qseries::{expand_eta_quotient, twist_expansion, twisted_level, EtaData, EtaQuotient};
use cytwist::varieties::{Catalog, CountShape, InvolutionSpec, ModularSource, ResidueChart};

#[derive(Parser)]
#[command(
    name = "cytwist",
    about = "Exact checks that quadratic twists of rigid Calabi-Yau threefolds match twists of weight-4 newforms",
    version
)]
struct Cli {
    /// Extra variety definition files merged over the built-in catalog.
    #[arg(long, global = true)]
    definitions: Vec<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand an eta quotient to an integer q-series.
    Eta(EtaArgs),
    /// Twist a cataloged form's coefficients by a quadratic character.
    TwistForm(TwistFormArgs),
    /// Count points of a cataloged variety over F_p.
    Count(CountArgs),
    /// Sign of an involution's action on the holomorphic form.
    Sign(SignArgs),
    /// Run the geometric twist pipeline for one family and twist parameter.
    Verify(VerifyArgs),
    /// Run a batch of pipelines from a config file.
    Run(RunArgs),
    /// List the catalog.
    Catalog,
}

#[derive(Args)]
struct EtaArgs {
    /// Quotient as `m:r` pairs, e.g. "4:16,8:-4,2:-4".
    #[arg(long)]
    spec: String,
    #[arg(long, default_value_t = 50)]
    precision: usize,
    #[arg(long, default_value = "json")]
    format: String,
    /// Label carried into the output (defaults to the quotient string).
    #[arg(long)]
    label: Option<String>,
}

#[derive(Args)]
struct TwistFormArgs {
    /// Catalog newform label, e.g. "beauville-III".
    #[arg(long)]
    form: String,
    #[arg(long, allow_hyphen_values = true)]
    d: i64,
    #[arg(long, default_value_t = 50)]
    pmax: usize,
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    variety: String,
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    d: i64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// log2 of the enumeration budget.
    #[arg(long, default_value_t = 33)]
    budget: u32,
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct SignArgs {
    #[arg(long)]
    variety: String,
    #[arg(long)]
    involution: String,
    /// Override the chart's distinguished coordinate.
    #[arg(long)]
    i0: Option<usize>,
    /// Override the Jacobian minor columns, comma separated.
    #[arg(long = "I", value_name = "I", value_delimiter = ',')]
    minor: Option<Vec<usize>>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    family: String,
    #[arg(long, allow_hyphen_values = true)]
    d: i64,
    #[arg(long, default_value_t = 50)]
    pmax: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value_t = 25)]
    budget: u32,
    /// External coefficient files (label-matched).
    #[arg(long)]
    coeffs: Vec<PathBuf>,
    /// Report path, `.json` or `.csv`.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report path override.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_catalog(definitions: &[PathBuf]) -> Result<Catalog, Box<dyn std::error::Error>> {
    let mut cat = Catalog::builtin_copy();
    for path in definitions {
        let text = std::fs::read_to_string(path)?;
        cat.extend_from_str(&text)?;
    }
    Ok(cat)
}

fn parse_eta_spec(spec: &str) -> Result<EtaQuotient, Box<dyn std::error::Error>> {
    let mut factors = Vec::new();
    for part in spec.split(',') {
        let (m, r) = part
            .split_once(':')
            .ok_or_else(|| format!("bad eta factor `{part}`; expected m:r"))?;
        factors.push((m.trim().parse::<u64>()?, r.trim().parse::<i32>()?));
    }
    Ok(EtaQuotient::new(&factors)?)
}

fn print_series(
    label: &str,
    level: u64,
    coeffs: &[num_bigint::BigInt],
    format: &str,
) -> Result<(), Box<dyn std::error::Error>> {
    match format {
        "json" => {
            let out = json!({
                "label": label,
                "level": level,
                "coeffs": coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        "csv" => {
            println!("n,c_n");
            for (i, c) in coeffs.iter().enumerate() {
                println!("{},{}", i + 1, c);
            }
        }
        other => return Err(format!("unknown format `{other}`").into()),
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let catalog = load_catalog(&cli.definitions)?;
    match cli.command {
        Command::Eta(args) => {
            let eq = parse_eta_spec(&args.spec)?;
            let f = expand_eta_quotient(&eq, args.precision)?;
            let label = args.label.unwrap_or_else(|| format!("eta({})", args.spec));
            print_series(&label, eq.level(), f.coeffs(), &args.format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::TwistForm(args) => {
            let record = catalog.newform(&args.form)?;
            let spec = QuadraticCharacterSpec::new(args.d)?;
            let f = record.expansion(args.pmax)?;
            let g = twist_expansion(&f, &spec, args.pmax)?;
            let label = format!("{}@d={}", record.label, args.d);
            match twisted_level(record.level, &spec) {
                Ok(level) => print_series(&label, level, g.coeffs(), &args.format)?,
                Err(e) => {
                    eprintln!("level: {e}");
                    print_series(&label, record.level, g.coeffs(), &args.format)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Count(args) => {
            let entry = catalog.get(&args.variety)?;
            let p = PrimeModulus::new(args.p)?;
            let opts = CountOptions {
                threads: args.threads,
                budget_log2: args.budget,
            };
            let r = count_catalog_entry(entry, args.d, &p, &opts)?;
            let mut out = json!({
                "variety": r.variety,
                "p": r.p,
                "d": r.d,
                "count": r.count,
            });
            if let Some(fibers) = &r.fibers {
                out["fibers"] = json!(fibers);
            }
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Sign(args) => {
            let entry = catalog.get(&args.variety)?;
            let (variety, involution) = if entry.shape == CountShape::PencilFiberProduct {
                let (model, invs) = cytwist::forms::pencil_fiber_product_model(entry)?;
                let inv = if args.involution == "identity" {
                    InvolutionSpec::identity(model.coordinates())
                } else {
                    invs.into_iter()
                        .find(|i| i.name == args.involution)
                        .ok_or_else(|| VarietyError::MissingAttachment {
                            id: entry.variety.id.clone(),
                            what: format!("involution `{}`", args.involution),
                        })?
                };
                (model, inv)
            } else if args.involution == "identity" {
                (
                    entry.variety.clone(),
                    InvolutionSpec::identity(entry.variety.coordinates()),
                )
            } else {
                (
                    entry.variety.clone(),
                    entry.involution(&args.involution)?.clone(),
                )
            };
            let default_chart =
                entry
                    .chart
                    .clone()
                    .ok_or_else(|| VarietyError::MissingAttachment {
                        id: entry.variety.id.clone(),
                        what: "residue chart".to_string(),
                    })?;
            let chart = ResidueChart {
                i0: args.i0.or(default_chart.i0),
                minor: args.minor.unwrap_or(default_chart.minor),
            };
            let form = ResidueFormSpec::new(variety.clone(), chart.i0, chart.minor.clone())?;
            let sign = pullback_sign(&form, &involution)?;
            println!("variety: {}", entry.variety.id);
            println!("involution: {}", involution.name);
            println!(
                "chart: i0 = {}, I = {:?}",
                chart
                    .i0
                    .map(|i| variety.var_names[i].clone())
                    .unwrap_or_else(|| "-".to_string()),
                chart
                    .minor
                    .iter()
                    .map(|&i| variety.var_names[i].clone())
                    .collect::<Vec<_>>()
            );
            println!(
                "D_I = {}",
                form.denominator().display(Some(&variety.var_names))
            );
            println!("sign: {sign:+}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let entry = catalog.get(&args.family)?;
            let opts = PipelineOptions {
                threads: args.threads,
                pmax: args.pmax,
                count_budget_log2: args.budget,
            };
            let external = if args.coeffs.is_empty() {
                BTreeMap::new()
            } else {
                load_coefficient_files(&args.coeffs)?
            };
            let family_report = verify_geometric_twist(entry, args.d, &opts, &external)?;
            let report = Report::new(vec![family_report]);
            match &args.report {
                Some(path) => write_report(&report, path)?,
                None => println!("{}", report.to_json()?),
            }
            for e in &report.entries {
                eprintln!("{} d={} -> {}", e.family, e.d, e.verdict);
            }
            Ok(if report.has_failures() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Run(args) => {
            let mut config = match &args.config {
                Some(path) => RunConfig::load(path)?,
                None => RunConfig::default(),
            };
            if let Some(path) = args.report {
                config.report = Some(path);
            }
            let mut catalog = catalog;
            for path in &config.definition_files {
                let text = std::fs::read_to_string(path)?;
                catalog.extend_from_str(&text)?;
            }
            let report = run_catalog(&catalog, &config)?;
            if let Some(path) = &config.report {
                write_report(&report, path)?;
                eprintln!("report written to {}", path.display());
            } else {
                println!("{}", report.to_json()?);
            }
            for e in &report.entries {
                let tag = e
                    .error
                    .as_ref()
                    .map(|err| format!(" [error: {err}]"))
                    .unwrap_or_default();
                eprintln!("{} d={} -> {}{}", e.family, e.d, e.verdict, tag);
            }
            Ok(if report.has_failures() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Catalog => {
            for entry in catalog.entries() {
                let shape = match &entry.shape {
                    CountShape::Projective => "projective",
                    CountShape::DoubleCover { .. } => "double-cover",
                    CountShape::PencilFiberProduct => "pencil",
                    CountShape::EllipticCurve { .. } => "elliptic",
                };
                let modular = match &entry.modular {
                    Some(ModularSource::Eta(r)) => match &r.eta {
                        EtaData::Quotient(eq) => format!("{} (level {})", eq, r.level),
                        EtaData::NotEtaGiven => format!("level {}", r.level),
                    },
                    Some(ModularSource::External { label, level }) => {
                        format!("external `{label}` (level {level})")
                    }
                    Some(ModularSource::EllipticSelf) => "self-calibrating".to_string(),
                    None => "-".to_string(),
                };
                println!(
                    "{:24} {:12} twist={:3} involutions=[{}] modular: {}",
                    entry.variety.id,
                    shape,
                    if entry.twist.is_some() { "yes" } else { "no" },
                    entry
                        .involutions
                        .iter()
                        .map(|i| i.name.as_str())
                        .collect::<Vec<_>>()
                        .join(", "),
                    modular,
                );
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
