//! Command-line front end: datasets, code lengths, model selection and
//! report tables.
//!
//! Reports are CSV (default) or JSON. An infinite code length is written as
//! `inf` in CSV and as `null` with `infinite: true` in JSON.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::closed_form::{log_lpc_asymptotic, log_lpc_table1};
use crate::error::{Error, Result};
use crate::fourier_engine::{lpc_fourier, lpc_gamma_known_scale, lpc_theorem1_mc, PCResult};
use crate::models::{
    build, default_window, log_likelihood_suff, mle_suff, parse_window, registry, sufficient, Luckiness, ModelSpec,
};
use crate::oracle::{lpc_oracle_mc, lpc_oracle_quadrature, OracleConfig};
use crate::quadrature::QuadConfig;

/// Environment variable that overrides the default seed.
pub const SEED_ENV: &str = "NMLKIT_SEED";

/// One real datum per record.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub values: Vec<f64>,
    pub source: Option<PathBuf>,
}

impl Dataset {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("dataset is empty".into()));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data {
                index,
                reason: format!("value {} is not finite", values[index]),
            });
        }
        Ok(Dataset { values, source: None })
    }

    /// Reads CSV with one number in the first column of each record. A
    /// first record that does not parse as a number is taken as a header.
    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut values = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            let field = record.get(0).unwrap_or("");
            if field.is_empty() && record.len() <= 1 {
                continue;
            }
            match field.parse::<f64>() {
                Ok(v) => values.push(v),
                Err(_) if i == 0 => {}
                Err(_) => {
                    return Err(Error::Data {
                        index: values.len(),
                        reason: format!("'{field}' is not a number"),
                    })
                }
            }
        }
        Dataset::new(values)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let mut d = Dataset::from_reader(std::fs::File::open(path)?)?;
        d.source = Some(path.to_path_buf());
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }
}

/// How `log LPC` is obtained for a code length.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum LpcMethod {
    /// Closed form when the model has one, Fourier inversion otherwise.
    #[default]
    Auto,
    Fourier,
    ClosedForm,
}

/// `log LPC` of `spec` at sample size `n`.
pub fn log_lpc(spec: &ModelSpec, n: usize, method: LpcMethod, cfg: &QuadConfig) -> Result<PCResult> {
    let model = spec.model()?;
    let w = &spec.luckiness;
    match method {
        LpcMethod::ClosedForm => log_lpc_table1(model.as_ref(), w, n),
        LpcMethod::Fourier => lpc_fourier(model.as_ref(), w, n, cfg),
        LpcMethod::Auto => match log_lpc_table1(model.as_ref(), w, n) {
            Err(Error::NoClosedForm(_)) => lpc_fourier(model.as_ref(), w, n, cfg),
            other => other,
        },
    }
}

/// Luckiness-NML code length of a dataset and its parts, in nats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeLength {
    pub mle: Vec<f64>,
    pub log_max_likelihood: f64,
    pub log_luckiness_at_mle: f64,
    pub log_lpc: f64,
    /// `−log_max_likelihood − log_luckiness_at_mle + log_lpc`.
    pub nml_code_length: f64,
    /// The MLE has zero luckiness or sits on the domain boundary.
    pub infinite: bool,
    pub reason: Option<String>,
}

pub fn nml_code_length(spec: &ModelSpec, data: &Dataset, method: LpcMethod, cfg: &QuadConfig) -> Result<CodeLength> {
    let model = spec.model()?;
    let s = sufficient(model.as_ref(), &data.values)?;
    let mle = mle_suff(model.as_ref(), &s);
    let log_lpc = log_lpc(spec, data.n(), method, cfg)?.log_value;
    if mle.boundary {
        return Ok(CodeLength {
            mle: mle.mu,
            log_max_likelihood: f64::INFINITY,
            log_luckiness_at_mle: f64::NEG_INFINITY,
            log_lpc,
            nml_code_length: f64::INFINITY,
            infinite: true,
            reason: Some("maximum likelihood estimate on the domain boundary".into()),
        });
    }
    let log_max_likelihood = log_likelihood_suff(model.as_ref(), &s, &mle.mu)?;
    let log_luckiness_at_mle = spec.luckiness.weight(&mle.mu).ln();
    let nml_code_length = -log_max_likelihood - log_luckiness_at_mle + log_lpc;
    let infinite = nml_code_length == f64::INFINITY;
    Ok(CodeLength {
        reason: infinite.then(|| "maximum likelihood estimate outside the luckiness window".into()),
        mle: mle.mu,
        log_max_likelihood,
        log_luckiness_at_mle,
        log_lpc,
        nml_code_length,
        infinite,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateResult {
    pub label: String,
    pub model_id: String,
    pub fixed_params: BTreeMap<String, f64>,
    #[serde(flatten)]
    pub code: CodeLength,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub source: Option<PathBuf>,
    pub n: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl DatasetSummary {
    fn of(data: &Dataset) -> Self {
        let v = &data.values;
        DatasetSummary {
            source: data.source.clone(),
            n: v.len(),
            mean: v.iter().sum::<f64>() / v.len() as f64,
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Candidates in input order, each with its rank by code length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub dataset: DatasetSummary,
    pub method: LpcMethod,
    pub config: QuadConfig,
    pub candidates: Vec<CandidateResult>,
}

impl SelectionReport {
    /// The rank-1 candidate.
    pub fn best(&self) -> &CandidateResult {
        self.candidates.iter().find(|c| c.rank == 1).expect("a report ranks every candidate")
    }
}

/// Ranks candidates by luckiness-NML code length; ties keep input order
/// and infinite code lengths come last.
///
/// Candidates may use different luckiness windows, in which case the code
/// lengths belong to different codes.
pub fn select_model(
    candidates: &[ModelSpec],
    data: &Dataset,
    method: LpcMethod,
    cfg: &QuadConfig,
) -> Result<SelectionReport> {
    if candidates.len() < 2 {
        return Err(Error::Config(format!(
            "model selection needs at least two candidates, got {}",
            candidates.len()
        )));
    }
    let codes: Vec<Result<CodeLength>> = std::thread::scope(|scope| {
        let handles: Vec<_> = candidates
            .iter()
            .map(|spec| scope.spawn(move || nml_code_length(spec, data, method, cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Numerical("candidate evaluation panicked".into()))))
            .collect()
    });
    let codes = codes.into_iter().collect::<Result<Vec<_>>>()?;
    if codes.iter().all(|c| c.infinite) {
        return Err(Error::EmptySelection(
            candidates
                .iter()
                .zip(&codes)
                .map(|(s, c)| format!("{}: {}", s.label(), c.reason.as_deref().unwrap_or("infinite")))
                .collect(),
        ));
    }
    let mut order: Vec<usize> = (0..codes.len()).collect();
    order.sort_by(|&i, &j| codes[i].nml_code_length.total_cmp(&codes[j].nml_code_length));
    let mut ranks = vec![0; codes.len()];
    for (r, &i) in order.iter().enumerate() {
        ranks[i] = r + 1;
    }
    Ok(SelectionReport {
        dataset: DatasetSummary::of(data),
        method,
        config: cfg.clone(),
        candidates: candidates
            .iter()
            .zip(codes)
            .zip(ranks)
            .map(|((spec, code), rank)| CandidateResult {
                label: spec.label(),
                model_id: spec.model_id.clone(),
                fixed_params: spec.fixed_params.clone(),
                code,
                rank,
            })
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub exact_log_lpc: f64,
    pub asymptotic_log_lpc: f64,
    /// `|exact − asymptotic|`.
    pub gap: f64,
}

/// Exact against asymptotic `log LPC` over sample sizes.
pub fn sweep_asymptotic(spec: &ModelSpec, n_list: &[usize], cfg: &QuadConfig) -> Result<Vec<SweepRow>> {
    let model = spec.model()?;
    n_list
        .iter()
        .map(|&n| {
            let exact = log_lpc(spec, n, LpcMethod::Auto, cfg)?.log_value;
            let asymptotic = log_lpc_asymptotic(model.as_ref(), &spec.luckiness, n, cfg)?.log_value;
            Ok(SweepRow {
                n,
                exact_log_lpc: exact,
                asymptotic_log_lpc: asymptotic,
                gap: (exact - asymptotic).abs(),
            })
        })
        .collect()
}

#[derive(Parser, Debug)]
#[command(name = "nmlkit", version, about = "Luckiness-NML code lengths and parametric complexities")]
struct Cli {
    /// JSON file with `quad` and `oracle` settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Random seed; overrides the config file and NMLKIT_SEED.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the model registry.
    Models,
    /// Log parametric complexity by one method.
    Pc {
        #[command(flatten)]
        model: ModelArgs,
        /// Sample size.
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = PcMethod::Fourier)]
        method: PcMethod,
    },
    /// Closed form, Fourier and oracle side by side.
    Compare {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated sample sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
    /// Code length of a dataset under one model.
    Nml {
        #[command(flatten)]
        model: ModelArgs,
        /// CSV file, one value per row, optional header.
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value_t = LpcMethod::Auto)]
        method: LpcMethod,
    },
    /// Rank candidate models by code length.
    Select {
        /// CSV file, one value per row, optional header.
        #[arg(long)]
        data: PathBuf,
        /// `model[:key=value...][:window=a,b]`, repeated.
        #[arg(long = "candidate", required = true)]
        candidates: Vec<String>,
        #[arg(long, value_enum, default_value_t = LpcMethod::Auto)]
        method: LpcMethod,
    },
    /// Exact against asymptotic complexity over sample sizes.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated sample sizes.
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
    },
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Registry id; see `nmlkit models`.
    #[arg(long)]
    model: String,
    /// Known variance (normal-known-variance).
    #[arg(long)]
    sigma2: Option<f64>,
    /// Known mean (normal-known-mean, laplace-known-mean).
    #[arg(long, allow_hyphen_values = true)]
    mean: Option<f64>,
    /// Known shape (gamma-known-shape).
    #[arg(long)]
    kappa: Option<f64>,
    /// Known shape (weibull-known-shape).
    #[arg(long)]
    shape: Option<f64>,
    /// Known scale (gamma-known-scale).
    #[arg(long)]
    beta: Option<f64>,
    /// Luckiness window `a,b`; defaults to `1,e` or `0,1`.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
}

impl ModelArgs {
    fn spec(&self) -> Result<ModelSpec> {
        let fixed_params: BTreeMap<String, f64> = [
            ("sigma2", self.sigma2),
            ("mean", self.mean),
            ("kappa", self.kappa),
            ("shape", self.shape),
            ("beta", self.beta),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
        .collect();
        let model = build(&self.model, &fixed_params)?;
        let window = match &self.window {
            Some(text) => vec![parse_window(text)?],
            None => default_window(model.as_ref()),
        };
        let spec = ModelSpec {
            model_id: self.model.clone(),
            fixed_params,
            luckiness: Luckiness::Indicator(window),
        };
        spec.model()?;
        Ok(spec)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PcMethod {
    ClosedForm,
    Fourier,
    /// Shape-parameter Fourier path of the gamma family with known scale.
    GammaScale,
    Asymptotic,
    OracleQuad,
    OracleMc,
    Theorem1Mc,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    quad: QuadConfig,
    oracle: Option<OracleConfig>,
}

struct Settings {
    quad: QuadConfig,
    oracle: OracleConfig,
    format: Format,
}

impl Settings {
    fn load(cli: &Cli) -> Result<Self> {
        let file: FileConfig = match &cli.config {
            Some(path) => serde_json::from_reader(std::fs::File::open(path)?)?,
            None => FileConfig::default(),
        };
        let mut quad = file.quad;
        if let Ok(text) = std::env::var(SEED_ENV) {
            quad.seed = text
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV}='{text}' is not an unsigned integer")))?;
        }
        if let Some(seed) = cli.seed {
            quad.seed = seed;
        }
        quad.validate()?;
        let mut oracle = file.oracle.unwrap_or_default();
        oracle.quad = quad.clone();
        Ok(Settings {
            quad,
            oracle,
            format: cli.format,
        })
    }
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code: 0 on success, 1 for usage, configuration and data errors, 2 for
/// numerical failures.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        2
    } else {
        1
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let settings = Settings::load(cli)?;
    match &cli.command {
        Command::Models => models(&settings, out),
        Command::Pc { model, n, method } => pc(&model.spec()?, *n, *method, &settings, out),
        Command::Compare { model, n } => compare(&model.spec()?, n, &settings, out),
        Command::Nml { model, data, method } => {
            let spec = model.spec()?;
            let data = Dataset::from_path(data)?;
            let code = nml_code_length(&spec, &data, *method, &settings.quad)?;
            let row = CandidateResult {
                label: spec.label(),
                model_id: spec.model_id.clone(),
                fixed_params: spec.fixed_params.clone(),
                code,
                rank: 1,
            };
            write_candidates(std::slice::from_ref(&row), settings.format, out)
        }
        Command::Select { data, candidates, method } => {
            let specs = candidates.iter().map(|c| c.parse()).collect::<Result<Vec<ModelSpec>>>()?;
            let data = Dataset::from_path(data)?;
            let report = select_model(&specs, &data, *method, &settings.quad)?;
            match settings.format {
                Format::Json => write_json(&report, out),
                Format::Csv => write_candidates(&report.candidates, Format::Csv, out),
            }
        }
        Command::Sweep { model, n } => {
            let rows = sweep_asymptotic(&model.spec()?, n, &settings.quad)?;
            write_rows(&rows, settings.format, out)
        }
    }
}

fn models(settings: &Settings, out: &mut dyn Write) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        id: &'static str,
        title: &'static str,
        statistic: &'static str,
        canonical: &'static str,
        expectation: &'static str,
        partition: &'static str,
        complexity: &'static str,
        params: String,
    }
    match settings.format {
        Format::Json => write_json(&registry(), out),
        Format::Csv => {
            let rows: Vec<Row> = registry()
                .iter()
                .map(|m| Row {
                    id: m.id,
                    title: m.title,
                    statistic: m.statistic,
                    canonical: m.canonical,
                    expectation: m.expectation,
                    partition: m.partition,
                    complexity: m.complexity,
                    params: m
                        .params
                        .iter()
                        .map(|p| format!("{}={}", p.name, p.default))
                        .collect::<Vec<_>>()
                        .join(";"),
                })
                .collect();
            write_rows(&rows, Format::Csv, out)
        }
    }
}

#[derive(Serialize)]
struct PcRow {
    model: String,
    n: usize,
    method: &'static str,
    log_lpc: f64,
    error_estimate: f64,
    divergent: bool,
    evaluations: usize,
    warnings: String,
}

impl PcRow {
    fn new(spec: &ModelSpec, r: &PCResult) -> Self {
        PcRow {
            model: spec.label(),
            n: r.n,
            method: r.method.name(),
            log_lpc: r.log_value,
            error_estimate: r.error_estimate,
            divergent: r.divergent,
            evaluations: r.diagnostics.evaluations,
            warnings: r.diagnostics.warnings.join("; "),
        }
    }
}

fn compute_pc(spec: &ModelSpec, n: usize, method: PcMethod, settings: &Settings) -> Result<PCResult> {
    let model = spec.model()?;
    let (m, w, cfg) = (model.as_ref(), &spec.luckiness, &settings.quad);
    match method {
        PcMethod::ClosedForm => log_lpc_table1(m, w, n),
        PcMethod::Fourier => lpc_fourier(m, w, n, cfg),
        PcMethod::GammaScale => {
            if spec.model_id != "gamma-known-scale" {
                return Err(Error::Config("gamma-scale applies only to gamma-known-scale".into()));
            }
            let beta = spec.fixed_params.get("beta").copied().unwrap_or(1.0);
            lpc_gamma_known_scale(beta, w, n, cfg)
        }
        PcMethod::Asymptotic => log_lpc_asymptotic(m, w, n, cfg),
        PcMethod::OracleQuad => lpc_oracle_quadrature(m, w, n, &settings.oracle),
        PcMethod::OracleMc => lpc_oracle_mc(m, w, n, &settings.oracle),
        PcMethod::Theorem1Mc => lpc_theorem1_mc(m, w, n, cfg),
    }
}

fn pc(spec: &ModelSpec, n: usize, method: PcMethod, settings: &Settings, out: &mut dyn Write) -> Result<()> {
    let r = compute_pc(spec, n, method, settings)?;
    match settings.format {
        Format::Json => write_json(&serde_json::json!({ "model": spec.label(), "result": r }), out),
        Format::Csv => write_rows(&[PcRow::new(spec, &r)], Format::Csv, out),
    }
}

/// One row per method and sample size; a method that does not apply
/// reports its error in `status`.
fn compare(spec: &ModelSpec, ns: &[usize], settings: &Settings, out: &mut dyn Write) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        n: usize,
        method: &'static str,
        log_lpc: Option<f64>,
        error_estimate: Option<f64>,
        status: String,
    }
    let mut rows = Vec::new();
    for &n in ns {
        let oracle = if n <= 3 { PcMethod::OracleQuad } else { PcMethod::OracleMc };
        for (label, method) in [("closed_form", PcMethod::ClosedForm), ("fourier", PcMethod::Fourier), ("oracle", oracle)] {
            rows.push(match compute_pc(spec, n, method, settings) {
                Ok(r) => Row {
                    n,
                    method: r.method.name(),
                    log_lpc: Some(r.log_value),
                    error_estimate: Some(r.error_estimate),
                    status: "ok".into(),
                },
                Err(e) if !e.is_numerical() && !matches!(e, Error::NoClosedForm(_) | Error::UnsupportedDimension(_)) => {
                    return Err(e)
                }
                Err(e) => Row {
                    n,
                    method: label,
                    log_lpc: None,
                    error_estimate: None,
                    status: e.to_string(),
                },
            });
        }
    }
    write_rows(&rows, settings.format, out)
}

#[derive(Serialize)]
struct CandidateRow<'a> {
    rank: usize,
    label: &'a str,
    model_id: &'a str,
    mle: String,
    log_max_likelihood: f64,
    log_luckiness_at_mle: f64,
    log_lpc: f64,
    nml_code_length: f64,
    infinite: bool,
}

fn write_candidates(rows: &[CandidateResult], format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json => write_json(&rows, out),
        Format::Csv => {
            let flat: Vec<CandidateRow> = rows
                .iter()
                .map(|c| CandidateRow {
                    rank: c.rank,
                    label: &c.label,
                    model_id: &c.model_id,
                    mle: c.code.mle.iter().map(f64::to_string).collect::<Vec<_>>().join(";"),
                    log_max_likelihood: c.code.log_max_likelihood,
                    log_luckiness_at_mle: c.code.log_luckiness_at_mle,
                    log_lpc: c.code.log_lpc,
                    nml_code_length: c.code.nml_code_length,
                    infinite: c.code.infinite,
                })
                .collect();
            write_rows(&flat, Format::Csv, out)
        }
    }
}

fn write_rows<T: Serialize>(rows: &[T], format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json => write_json(&rows, out),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn write_json<T: Serialize + ?Sized>(value: &T, out: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn exp_spec(a: f64, b: f64) -> ModelSpec {
        ModelSpec::new("gamma-known-shape", &[("kappa", 1.0)], Luckiness::interval(a, b))
    }

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(std::iter::once("nmlkit").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn dataset_ingest() {
        let d = Dataset::from_reader("x\n1.5\n2\n\n3e-1\n".as_bytes()).unwrap();
        assert_eq!(d.values, vec![1.5, 2.0, 0.3]);
        let e = Dataset::from_reader("1\nfoo\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Data { index: 1, .. }), "{e}");
        assert!(Dataset::from_reader("x\n".as_bytes()).is_err());
        assert!(matches!(Dataset::new(vec![1.0, f64::NAN]), Err(Error::Data { index: 1, .. })));
    }

    #[test]
    fn exponential_code_length() {
        let d = Dataset::new(vec![1.0, 1.0, 1.0]).unwrap();
        let c = nml_code_length(&exp_spec(1.0, std::f64::consts::E), &d, LpcMethod::Auto, &QuadConfig::default())
            .unwrap();
        assert_relative_eq!(c.nml_code_length, 2.602_689_685_444_383_3, max_relative = 1e-10);
        assert_eq!(c.log_luckiness_at_mle, 0.0);
    }

    #[test]
    fn gaussian_code_length_cancels() {
        let spec = ModelSpec::new("normal-known-variance", &[("sigma2", 1.0)], Luckiness::interval(0.0, 1.0));
        let c = nml_code_length(&spec, &Dataset::new(vec![0.5]).unwrap(), LpcMethod::Auto, &QuadConfig::default())
            .unwrap();
        assert!(c.nml_code_length.abs() < 1e-12, "{c:?}");
    }

    #[test]
    fn outside_window_is_infinite() {
        let d = Dataset::new(vec![5.0, 6.0]).unwrap();
        let c = nml_code_length(&exp_spec(1.0, 2.0), &d, LpcMethod::ClosedForm, &QuadConfig::default()).unwrap();
        assert!(c.infinite && c.nml_code_length == f64::INFINITY);
        assert!(c.reason.is_some());
    }

    #[test]
    fn negative_datum_is_a_data_error() {
        let d = Dataset::new(vec![1.0, -2.0]).unwrap();
        let e = nml_code_length(&exp_spec(0.5, 8.0), &d, LpcMethod::Auto, &QuadConfig::default()).unwrap_err();
        assert!(matches!(e, Error::Data { index: 1, .. }), "{e}");
    }

    #[test]
    fn selection_ties_and_failures() {
        let d = Dataset::new(vec![1.0, 2.0, 0.5, 3.0]).unwrap();
        let cfg = QuadConfig::default();
        let r = select_model(&[exp_spec(0.5, 8.0), exp_spec(0.5, 8.0)], &d, LpcMethod::Auto, &cfg).unwrap();
        assert_eq!(r.candidates[0].code.nml_code_length, r.candidates[1].code.nml_code_length);
        assert_eq!((r.candidates[0].rank, r.candidates[1].rank), (1, 2));
        let r = select_model(&[exp_spec(5.0, 8.0), exp_spec(0.5, 8.0)], &d, LpcMethod::Auto, &cfg).unwrap();
        assert_eq!(r.best().label, exp_spec(0.5, 8.0).label());
        assert_eq!(r.candidates[0].rank, 2);
        let e = select_model(&[exp_spec(5.0, 8.0), exp_spec(6.0, 8.0)], &d, LpcMethod::Auto, &cfg).unwrap_err();
        assert!(matches!(e, Error::EmptySelection(ref v) if v.len() == 2), "{e}");
        assert!(select_model(&[exp_spec(0.5, 8.0)], &d, LpcMethod::Auto, &cfg).is_err());
    }

    #[test]
    fn sweep_rows() {
        let rows = sweep_asymptotic(&exp_spec(1.0, std::f64::consts::E), &[10, 100], &QuadConfig::default()).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].gap > rows[1].gap && rows[1].gap < 1e-3);
        assert!(sweep_asymptotic(&exp_spec(1.0, 2.0), &[], &QuadConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn pc_closed_form_command() {
        let (code, out, _) = run_capture(&[
            "pc", "--model", "gamma-known-shape", "--kappa", "1", "--window", "1,2.71828", "--n", "3", "--method",
            "closed-form",
        ]);
        assert_eq!(code, 0);
        let mut rdr = csv::Reader::from_reader(out.as_bytes());
        let row = rdr.records().next().unwrap().unwrap();
        let v: f64 = row[3].parse().unwrap();
        assert!((v + 0.3973).abs() < 1e-4, "{out}");
    }

    #[test]
    fn exit_codes() {
        let (code, _, err) = run_capture(&["pc", "--model", "gamma-known-shape", "--n", "1", "--method", "fourier"]);
        assert_eq!(code, 2);
        assert!(err.contains("IntegrabilityError"), "{err}");
        assert_eq!(run_capture(&["pc", "--model", "poisson", "--n", "2"]).0, 1);
        assert_eq!(run_capture(&["bogus"]).0, 1);
        assert_eq!(run_capture(&["--help"]).0, 0);
        let (code, out, _) = run_capture(&["models"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 7);
    }

    #[test]
    fn infinity_serialization() {
        let d = Dataset::new(vec![5.0, 6.0]).unwrap();
        let row = CandidateResult {
            label: "x".into(),
            model_id: "gamma-known-shape".into(),
            fixed_params: BTreeMap::new(),
            code: nml_code_length(&exp_spec(1.0, 2.0), &d, LpcMethod::ClosedForm, &QuadConfig::default()).unwrap(),
            rank: 1,
        };
        let mut csv_out = Vec::new();
        write_candidates(std::slice::from_ref(&row), Format::Csv, &mut csv_out).unwrap();
        let text = String::from_utf8(csv_out).unwrap();
        assert!(text.lines().nth(1).unwrap().contains(",inf,true"), "{text}");
        let mut json_out = Vec::new();
        write_candidates(std::slice::from_ref(&row), Format::Json, &mut json_out).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&json_out).unwrap();
        assert!(v[0]["nml_code_length"].is_null());
        assert_eq!(v[0]["infinite"], true);
    }
}
