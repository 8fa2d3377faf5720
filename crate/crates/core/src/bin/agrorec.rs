use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use agrorec::config::RunConfig;
use agrorec::dataset::{
    clean_dataset, format_cleaning_log, ingest, read_dataset_csv, save_dataset_csv, write_dataset_csv, write_source_csvs,
    AliasTable,
};
use agrorec::eda::write_eda_outputs;
use agrorec::evaluation::{
    compare_reports, comparison_csv, lagged_dataset, report_text, run_approach, Approach, EvaluationReport,
};
use agrorec::features::{encode_apply, encode_fit, temporal_sort};
use agrorec::learners::{load_model, save_model, ModelBundle, ModelKind};
use agrorec::recommend::{parse_key_values, parse_record_csv, recommend, recommendations_csv};
use agrorec::seed::derive_seed;
use agrorec::synth::{generate_synthetic, SyntheticSpec};
use agrorec::{Error, Result};

/// Crop recommendation pipeline.
///
/// Settings come from built-in defaults, then the `--config` TOML file, then
/// command-line flags. Log verbosity is read from AGROREC_LOG.
#[derive(Parser)]
#[command(name = "agrorec", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Merge the environmental and economic sources and clean the result.
    Ingest {
        #[arg(long)]
        env: Option<PathBuf>,
        #[arg(long)]
        econ: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Skewness, correlation, VIF and grouped aggregates as CSV files.
    Eda {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a model on the whole dataset and save it.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "rf")]
        model: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Add the configured lag features before fitting.
        #[arg(long)]
        lags: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run evaluation protocols and write one report per approach and model.
    Evaluate {
        #[arg(long)]
        data: PathBuf,
        /// 1, 2 or 3; repeatable. Defaults to evaluate.approaches.
        #[arg(long)]
        approach: Vec<u8>,
        /// rf or svm; repeatable. Defaults to evaluate.models.
        #[arg(long)]
        model: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank all crops for one record.
    Recommend {
        #[arg(long)]
        model: PathBuf,
        /// A one-row CSV file, or a `key=value,...` list.
        #[arg(long)]
        input: String,
        /// Also write the ranking as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate synthetic data with yearly drift.
    Synth {
        /// TOML synthetic spec; all fields optional.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Dataset CSV. `<stem>_env.csv` and `<stem>_econ.csv` are written next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank the reports found in a directory.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Prints to stdout; a closed pipe (`agrorec ... | head`) is not an error.
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn output_dir(flag: Option<PathBuf>, config: &RunConfig) -> PathBuf {
    flag.or_else(|| config.paths.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn write(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, body)?;
    Ok(())
}

fn aliases(config: &RunConfig) -> Result<AliasTable> {
    match &config.paths.aliases {
        Some(p) => AliasTable::with_file(p),
        None => Ok(AliasTable::default()),
    }
}

fn require(flag: Option<PathBuf>, fallback: &Option<PathBuf>, key: &str) -> Result<PathBuf> {
    flag.or_else(|| fallback.clone()).ok_or_else(|| Error::ConfigInvalid {
        key: key.to_string(),
        message: "no path given by flag or config".to_string(),
    })
}

fn parse_kind(name: &str) -> Result<ModelKind> {
    ModelKind::parse(name).ok_or_else(|| Error::ConfigInvalid {
        key: "evaluate.models".to_string(),
        message: format!("unknown model '{name}'"),
    })
}

fn run(cli: Cli) -> Result<()> {
    let mut config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest { env, econ, out } => {
            let env = require(env, &config.paths.env_csv, "paths.env_csv")?;
            let econ = require(econ, &config.paths.econ_csv, "paths.econ_csv")?;
            let out = output_dir(out, &config);
            let merged = ingest(&env, &econ, &aliases(&config)?)?;
            let (cleaned, _) = clean_dataset(&merged, &config.cleaning)?;
            fs::create_dir_all(&out)?;
            save_dataset_csv(&cleaned, out.join("cleaned.csv"))?;
            let log = format!(
                "config-hash\t{}\n{}",
                config.hash(),
                format_cleaning_log(&cleaned.cleaning_log)
            );
            write(&out.join("cleaning_log.tsv"), &log)?;
            say!("{} rows -> {}", cleaned.len(), out.join("cleaned.csv").display());
        }
        Command::Eda { data, out } => {
            let dataset = read_dataset_csv(&data)?;
            for path in write_eda_outputs(&dataset, &config.eda, output_dir(out, &config))? {
                say!("{}", path.display());
            }
        }
        Command::Train {
            data,
            model,
            seed,
            lags,
            out,
        } => {
            if let Some(s) = seed {
                config.seed = s;
            }
            let kind = parse_kind(&model)?;
            let mut dataset = read_dataset_csv(&data)?;
            if lags {
                dataset = lagged_dataset(&temporal_sort(&dataset), &config.protocol.lag_specs)?.0;
            }
            let encoding = encode_fit(&dataset, &config.protocol.encoding)?;
            config.validate(Some(encoding.n_features()))?;
            let (x, y, _) = encode_apply(&dataset, &encoding)?;
            let learner = config.learner(kind);
            let model = learner.train(&x, &y, &encoding.class_names, derive_seed(config.seed, "train", 0))?;
            let bundle = ModelBundle {
                model,
                encoding,
                config_hash: config.hash(),
            };
            save_model(&bundle, &out)?;
            say!("{} model on {} rows -> {}", kind.name(), dataset.len(), out.display());
        }
        Command::Evaluate {
            data,
            approach,
            model,
            seed,
            out,
        } => {
            if let Some(s) = seed {
                config.seed = s;
            }
            if !approach.is_empty() {
                config.evaluate.approaches = approach;
            }
            if !model.is_empty() {
                config.evaluate.models = model;
            }
            config.validate(None)?;
            let dataset = read_dataset_csv(&data)?;
            let out = output_dir(out, &config);
            fs::create_dir_all(&out)?;
            let hash = config.hash();
            for name in &config.evaluate.models {
                let learner = config.learner(parse_kind(name)?);
                for id in &config.evaluate.approaches {
                    let approach = Approach::from_id(*id).expect("validated");
                    let outcome = run_approach(&dataset, approach, &learner, &config.protocol, config.seed, &hash)?;
                    let report = &outcome.report;
                    let stem = out.join(report.file_stem());
                    if config.report.formats.iter().any(|f| f == "json") {
                        write(&stem.with_extension("json"), &report.to_json()?)?;
                    }
                    if config.report.formats.iter().any(|f| f == "text") {
                        write(&stem.with_extension("txt"), &report_text(report))?;
                    }
                    write(
                        &stem.with_extension("timing.json"),
                        &format!("{}\n", serde_json::to_string_pretty(&outcome.timing)?),
                    )?;
                    say!(
                        "A{} {:<4} accuracy={:.4} -> {}",
                        report.approach,
                        report.model,
                        report.accuracy,
                        stem.display()
                    );
                }
            }
        }
        Command::Recommend { model, input, out } => {
            let bundle = load_model(&model)?;
            let path = Path::new(&input);
            let record = if path.is_file() {
                parse_record_csv(&fs::read_to_string(path)?)?
            } else {
                parse_key_values(&input)?
            };
            let recs = recommend(&bundle, &record)?;
            for r in &recs {
                say!("{:>2}  {:<12} {:.4}", r.rank, r.crop, r.score);
            }
            if let Some(out) = out {
                write(&out, &recommendations_csv(&recs))?;
            }
        }
        Command::Synth { spec, rows, seed, out } => {
            let mut spec = match spec {
                Some(p) => {
                    if !p.is_file() {
                        return Err(Error::MissingFile(p));
                    }
                    toml::from_str::<SyntheticSpec>(&fs::read_to_string(&p)?)
                        .map_err(|e| Error::BadSpec(e.message().to_string()))?
                }
                None => SyntheticSpec::default(),
            };
            if let Some(n) = rows {
                spec.n_rows = n;
            }
            if let Some(s) = seed {
                spec.seed = s;
            }
            let data = generate_synthetic(&spec)?;
            let mut bytes = Vec::new();
            write_dataset_csv(&data, &mut bytes)?;
            write(&out, std::str::from_utf8(&bytes).expect("csv is utf-8"))?;
            let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("synthetic");
            let env = out.with_file_name(format!("{stem}_env.csv"));
            let econ = out.with_file_name(format!("{stem}_econ.csv"));
            write_source_csvs(&data, fs::File::create(&env)?, fs::File::create(&econ)?)?;
            say!(
                "{} rows -> {} ({}, {})",
                data.len(),
                out.display(),
                env.display(),
                econ.display()
            );
        }
        Command::Report { input, out } => {
            if !input.is_dir() {
                return Err(Error::MissingFile(input));
            }
            let mut paths: Vec<PathBuf> = fs::read_dir(&input)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| {
                    let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
                    name.starts_with("report_") && name.ends_with(".json") && !name.ends_with(".timing.json")
                })
                .collect();
            paths.sort();
            let reports = paths
                .iter()
                .map(|p| EvaluationReport::from_json(&fs::read_to_string(p)?))
                .collect::<Result<Vec<_>>>()?;
            let table = comparison_csv(&compare_reports(&reports));
            match out {
                Some(out) => {
                    write(&out, &table)?;
                    say!("{} reports -> {}", reports.len(), out.display());
                }
                None => {
                    let _ = std::io::stdout().lock().write_all(table.as_bytes());
                }
            }
        }
    }
    Ok(())
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("AGROREC_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let kind = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = e.print();
                    return ExitCode::SUCCESS;
                }
                ErrorKind::InvalidSubcommand => "UnknownCommand",
                _ => "Usage",
            };
            eprintln!("error: kind={kind} message={}", one_line(&e.to_string()));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let key = match &e {
                Error::ConfigInvalid { key, .. } => format!(" key={key}"),
                _ => String::new(),
            };
            eprintln!("error: kind={}{key} message={}", e.kind(), one_line(&e.to_string()));
            ExitCode::FAILURE
        }
    }
}
