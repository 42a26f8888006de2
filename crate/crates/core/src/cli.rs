//! The `lxcim` command line.
//!
//! Exit codes: 0 success or invariant, 1 invariance violation, 2 usage
//! error, 3 I/O, parse or metric error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::io::{
    ingest, report_json, report_table, write_curve_csv, write_dataset_file, FileError, Format,
    Ingested, LabelNames,
};
use crate::lxc::{check_rank_lxc_invariance, duplicate_dataset, INVARIANCE_TOLERANCE};
use crate::metrics::{curves, report, Curve, Metric};
use crate::plot::{curve_svg, render_svg, Series};
use crate::verify::{convergence_study, generate, GeneratorConfig, GeneratorKind, StudyTable, WeightMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lxcim", version, about = "Rank-based binary classifier evaluation with LxCIM")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report LxCIM, accuracy, AUROC and AUDRC for a prediction file.
    Eval {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
        output: ReportFormat,
        /// Write curve CSVs and SVG plots into this directory.
        #[arg(long)]
        curves_dir: Option<PathBuf>,
    },
    /// Check a metric for invariance under random local class exchanges.
    Check {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = MetricArg::Lxcim)]
        metric: MetricArg,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the dataset together with the class-exchanged copy of every sample.
    Duplicate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        output: PathBuf,
    },
    /// Write a synthetic prediction file.
    Synth {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Probability of a correct prediction, for `--kind biased`.
        #[arg(long, value_parser = parse_probability)]
        p: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = WeightsArg::Uniform)]
        weights: WeightsArg,
        #[arg(long)]
        output: PathBuf,
        /// Output format; inferred from the file extension when omitted.
        #[arg(long)]
        format: Option<Format>,
    },
    /// Smoothness of the cumulative and running accuracy curves as N grows.
    Study {
        #[arg(long, value_enum, default_value_t = KindArg::Random)]
        kind: KindArg,
        #[arg(long, value_parser = parse_probability)]
        p: Option<f64>,
        /// Dataset sizes, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [10u64, 100, 1000, 10000])]
        n: Vec<u64>,
        /// Datasets per size.
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
        output: ReportFormat,
        #[arg(long)]
        curves_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long)]
    format: Option<Format>,
    #[arg(long, default_value = "1")]
    positive_label: String,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, conflicts_with = "prob")]
    s_star: f64,
    /// Scores are probabilities: threshold at 0.5.
    #[arg(long)]
    prob: bool,
}

impl InputArgs {
    fn format(&self) -> Format {
        self.format.unwrap_or_else(|| Format::from_path(&self.input))
    }

    fn s_star(&self) -> f64 {
        if self.prob {
            0.5
        } else {
            self.s_star
        }
    }

    fn load(&self) -> Result<Ingested, Failure> {
        let s_star = self.s_star();
        if !s_star.is_finite() {
            return Err(Failure::Usage("--s-star must be finite".into()));
        }
        Ok(ingest(&self.input, self.format(), &self.positive_label, s_star)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    Lxcim,
    Audrc,
    Auroc,
    Accuracy,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Lxcim => Metric::Lxcim,
            MetricArg::Audrc => Metric::Audrc,
            MetricArg::Auroc => Metric::Auroc,
            MetricArg::Accuracy => Metric::Accuracy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Random,
    Ideal,
    Adversarial,
    Biased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WeightsArg {
    Uniform,
    Random,
}

fn parse_probability(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(format!("p must lie in [0, 1], got {p}"))
    }
}

fn generator_kind(kind: KindArg, p: Option<f64>) -> Result<GeneratorKind, Failure> {
    match (kind, p) {
        (KindArg::Biased, Some(p)) => Ok(GeneratorKind::Biased(p)),
        (KindArg::Biased, None) => Err(Failure::Usage("--kind biased requires --p".into())),
        (_, Some(_)) => Err(Failure::Usage("--p only applies to --kind biased".into())),
        (KindArg::Random, None) => Ok(GeneratorKind::Random),
        (KindArg::Ideal, None) => Ok(GeneratorKind::Ideal),
        (KindArg::Adversarial, None) => Ok(GeneratorKind::Adversarial),
    }
}

enum Failure {
    Usage(String),
    Failed(String),
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        Failure::Failed(e.to_string())
    }
}

impl From<crate::error::Error> for Failure {
    fn from(e: crate::error::Error) -> Self {
        Failure::Failed(e.to_string())
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Failed(format!("cannot write {}: {e}", path.display()))
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Failed(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILURE
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Eval {
            input,
            output,
            curves_dir,
        } => {
            let ing = input.load()?;
            let r = report(&ing.dataset, &ing.spec)?;
            let text = match output {
                ReportFormat::Table => report_table(&r),
                ReportFormat::Json => format!("{}\n", report_json(&r)),
            };
            emit(out, &text)?;
            if let Some(dir) = curves_dir {
                let set = curves(&ing.dataset, &ing.spec)?;
                fs::create_dir_all(&dir).map_err(|e| io_failure(&dir, e))?;
                write_curve_files(&dir, "cumulative_accuracy", &set.cumulative_accuracy)?;
                write_curve_files(&dir, "accuracy_rate", &set.accuracy_rate)?;
                if let Some(roc) = &set.roc {
                    write_curve_files(&dir, "roc", roc)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Check {
            input,
            metric,
            trials,
            seed,
        } => {
            let ing = input.load()?;
            let metric = Metric::from(metric);
            let spec = ing.spec;
            let r = check_rank_lxc_invariance(
                |d| metric.evaluate(d, &spec),
                &ing.dataset,
                &spec,
                trials as usize,
                seed,
            )?;
            let mut text = format!(
                "metric: {metric}\ntrials: {trials}\nseed: {seed}\nbaseline: {}\nmax deviation: {:e}\n",
                r.baseline, r.max_deviation
            );
            let code = match &r.violation {
                None => {
                    text.push_str(&format!("invariant within {INVARIANCE_TOLERANCE:e}\n"));
                    EXIT_OK
                }
                Some(v) => {
                    let rows: Vec<String> = v.mask.indices().map(|i| (i + 1).to_string()).collect();
                    let value = match (&v.value, &v.error) {
                        (Some(x), _) => x.to_string(),
                        (None, Some(e)) => format!("undefined ({e})"),
                        (None, None) => "undefined".to_string(),
                    };
                    text.push_str(&format!(
                        "violation at trial {}: exchanging rows {{{}}} changes {metric} to {value}\n",
                        v.trial + 1,
                        rows.join(",")
                    ));
                    EXIT_VIOLATION
                }
            };
            emit(out, &text)?;
            Ok(code)
        }
        Command::Duplicate { input, output } => {
            let ing = input.load()?;
            let omega = duplicate_dataset(&ing.dataset, &ing.spec)?;
            write_dataset_file(&output, &omega, input.format(), &ing.labels, ing.weighted)?;
            emit(out, &format!("wrote {} rows to {}\n", omega.len(), output.display()))?;
            Ok(EXIT_OK)
        }
        Command::Synth {
            kind,
            n,
            p,
            seed,
            weights,
            output,
            format,
        } => {
            let kind = generator_kind(kind, p)?;
            let weight_mode = match weights {
                WeightsArg::Uniform => WeightMode::Uniform,
                WeightsArg::Random => WeightMode::RandomPositive,
            };
            let cfg = GeneratorConfig::new(kind, n as usize, seed).with_weights(weight_mode);
            let d = generate(&cfg).map_err(|e| Failure::Usage(e.to_string()))?;
            let format = format.unwrap_or_else(|| Format::from_path(&output));
            write_dataset_file(&output, &d, format, &LabelNames::default(), false)?;
            emit(out, &format!("wrote {} rows to {}\n", d.len(), output.display()))?;
            Ok(EXIT_OK)
        }
        Command::Study {
            kind,
            p,
            n,
            seeds,
            seed,
            output,
            curves_dir,
        } => {
            let kind = generator_kind(kind, p)?;
            if n.is_empty() || n.contains(&0) {
                return Err(Failure::Usage("--n needs positive sizes".into()));
            }
            let sizes: Vec<usize> = n.iter().map(|&x| x as usize).collect();
            let table = convergence_study(kind, &sizes, seeds as usize, seed)?;
            let text = match output {
                ReportFormat::Table => study_table(&table),
                ReportFormat::Json => format!("{}\n", study_json(&table)),
            };
            emit(out, &text)?;
            if let Some(dir) = curves_dir {
                write_study_curves(&dir, &table)?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Failed(format!("cannot write output: {e}")))
}

fn write_curve_files(dir: &Path, stem: &str, curve: &Curve) -> Result<(), Failure> {
    let csv_path = dir.join(format!("{stem}.csv"));
    let file = fs::File::create(&csv_path).map_err(|e| io_failure(&csv_path, e))?;
    write_curve_csv(std::io::BufWriter::new(file), curve).map_err(|e| io_failure(&csv_path, e))?;
    let svg_path = dir.join(format!("{stem}.svg"));
    fs::write(&svg_path, curve_svg(curve, "model")).map_err(|e| io_failure(&svg_path, e))
}

fn study_table(table: &StudyTable) -> String {
    let mut s = format!(
        "{:>8} {:>6} {:>14} {:>14} {:>10} {:>10}\n",
        "n", "seeds", "sup|G-pi|", "early|acc-p|", "lxcim", "audrc"
    );
    for r in &table.rows {
        s.push_str(&format!(
            "{:>8} {:>6} {:>14.6} {:>14.6} {:>10.6} {:>10.6}\n",
            r.n,
            r.seeds,
            r.mean_cumulative_deviation,
            r.mean_early_accuracy_deviation,
            r.mean_lxcim,
            r.mean_audrc
        ));
    }
    s
}

fn study_json(table: &StudyTable) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = table
        .rows
        .iter()
        .map(|r| {
            serde_json::json!({
                "n": r.n,
                "seeds": r.seeds,
                "mean_cumulative_deviation": r.mean_cumulative_deviation,
                "mean_early_accuracy_deviation": r.mean_early_accuracy_deviation,
                "mean_lxcim": r.mean_lxcim,
                "mean_audrc": r.mean_audrc,
            })
        })
        .collect();
    serde_json::json!({ "rows": rows })
}

const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#d62728", "#9467bd", "#8c564b", "#17becf"];

fn write_study_curves(dir: &Path, table: &StudyTable) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    let mut cumulative = vec![];
    let mut running = vec![];
    for (k, row) in table.rows.iter().enumerate() {
        for (stem, curve) in [
            ("cumulative_accuracy", &row.cumulative_curve),
            ("accuracy_rate", &row.accuracy_curve),
        ] {
            let path = dir.join(format!("{stem}_n{}.csv", row.n));
            let file = fs::File::create(&path).map_err(|e| io_failure(&path, e))?;
            write_curve_csv(std::io::BufWriter::new(file), curve).map_err(|e| io_failure(&path, e))?;
        }
        let color = PALETTE[k % PALETTE.len()];
        let name = format!("N = {}", row.n);
        cumulative.push(Series::solid(&name, row.cumulative_curve.points.clone(), color));
        running.push(Series::solid(&name, row.accuracy_curve.points.clone(), color));
    }
    let p = table.kind.expected_accuracy();
    cumulative.insert(0, Series::dashed("expected", vec![(0.0, 0.0), (1.0, p)], "#7f7f7f"));
    running.insert(0, Series::dashed("expected", vec![(0.0, p), (1.0, p)], "#7f7f7f"));
    for (stem, title, y_label, series) in [
        ("cumulative_accuracy", "Cumulative accuracy vs decision rate", "cumulative accuracy G", cumulative),
        ("accuracy_rate", "Accuracy vs decision rate", "accuracy", running),
    ] {
        let path = dir.join(format!("{stem}.svg"));
        fs::write(&path, render_svg(title, "decision rate", y_label, &series))
            .map_err(|e| io_failure(&path, e))?;
    }
    Ok(())
}
