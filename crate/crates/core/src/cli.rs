//! Command-line front end: file ingestion, measure dispatch and report output.
//!
//! Exit codes: `0` success, `1` internal error, `2` invalid input or
//! arguments, `3` a verification suite reported a violation.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::alpha::{
    arimoto_mi, min_expected_alpha_loss, pointwise_alpha_leakage, renyi_divergence,
    renyi_entropy, sibson_mi, AlphaOrder,
};
use crate::capacity::{
    alpha_beta_leakage, bayes_capacity, ldp_leakage, maximal_alpha_leakage,
    multiplicative_f_capacity, renyi_ldp, SimplexOptimizerConfig, SupResult,
};
use crate::error::QifError;
use crate::fmean::{h_alpha_beta, FMean};
use crate::gain::GainSpec;
use crate::prob::{push, Channel, Prior};
use crate::report::{ext_value, LeakageReport, Provenance, Reason, Unit, VerifyReport};
use crate::verify::{
    run_axiom_suite, verify_dual_formulas, verify_maximal_equals_capacity, AxiomSuiteConfig,
    MaximalConfig, MeanFamily,
};
use crate::vulnerability::{
    gen_leakage, gen_max_leakage, gen_posterior_vulnerability_avg,
    gen_posterior_vulnerability_max, gen_prior_vulnerability_opt, LeakageKind,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_SUITE_FAILED: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Qif(#[from] QifError),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("malformed CSV in {path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("missing required input --{0}")]
    Missing(&'static str),

    #[error("cannot write output: {0}")]
    Output(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Output(_) => EXIT_INTERNAL,
            _ => EXIT_INVALID,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    PriorV,
    PostAvg,
    PostMax,
    LeakageMult,
    LeakageAdd,
    RenyiEntropy,
    RenyiDivergence,
    ArimotoMi,
    SibsonMi,
    AlphaLossMin,
    PointwiseAlpha,
    AlphaBeta,
    BayesCapacity,
    Ldp,
    RenyiLdp,
    MaxAlphaCapacity,
    MultFCapacity,
}

impl Measure {
    pub fn name(self) -> String {
        self.to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_owned()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Bits,
}

#[derive(Debug, Parser)]
#[command(name = "qifkit", version, about = "Quantitative information flow measures over finite channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a single measure.
    Compute(ComputeArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Channel CSV: rows are inputs, columns outputs, header optional.
    #[arg(long)]
    pub channel: Option<PathBuf>,
    /// Prior CSV (single row).
    #[arg(long)]
    pub prior: Option<PathBuf>,
    /// Second distribution for divergences (single row).
    #[arg(long)]
    pub mu: Option<PathBuf>,
    /// Posterior for pointwise leakage (single row).
    #[arg(long)]
    pub posterior: Option<PathBuf>,
    /// `identity`, `simplex`, `pointwise` or a CSV gain matrix (actions × secrets).
    #[arg(long, default_value = "identity")]
    pub gain: String,
}

#[derive(Debug, Args)]
pub struct OptimizerArgs {
    #[arg(long, env = "QIFKIT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    /// Grid resolution for `|X| ≤ 3`.
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
}

impl OptimizerArgs {
    pub fn config(&self) -> SimplexOptimizerConfig {
        SimplexOptimizerConfig {
            restarts: self.restarts,
            grid_resolution: self.grid,
            seed: self.seed,
            ..SimplexOptimizerConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[arg(value_enum)]
    pub measure: Measure,
    #[command(flatten)]
    pub inputs: InputArgs,
    /// Order α (`inf` accepted).
    #[arg(long)]
    pub alpha: Option<String>,
    /// β of the (α, β) family (`inf` accepted).
    #[arg(long)]
    pub beta: Option<String>,
    /// Prior mean function (e.g. `affine`, `alpha:2`, `pow:0.5`).
    #[arg(long)]
    pub f: Option<String>,
    /// Posterior averaging mean; defaults to `f`.
    #[arg(long)]
    pub h: Option<String>,
    /// Use max-case instead of average-case posterior vulnerability.
    #[arg(long)]
    pub max_case: bool,
    /// Report log-valued measures in bits.
    #[arg(long)]
    pub bits: bool,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Axioms,
    Duals,
    Maximal,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 1000)]
    pub instances: usize,
    /// `classical`, `alpha:<α>`, `injected`, or `all` (classical and several α).
    #[arg(long, default_value = "all")]
    pub family: String,
    #[command(flatten)]
    pub inputs: InputArgs,
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub h: Option<String>,
    /// Largest auxiliary alphabet for the maximal-leakage enumeration.
    #[arg(long, default_value_t = 4)]
    pub max_u: usize,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A single measure evaluation, independent of argument parsing.
#[derive(Debug, Clone)]
pub struct MeasureRequest {
    pub measure: Measure,
    pub alpha: Option<AlphaOrder>,
    pub beta: Option<f64>,
    pub f: Option<FMean>,
    pub h: Option<FMean>,
    pub gain: String,
    pub max_case: bool,
    pub optimizer: SimplexOptimizerConfig,
    pub log_base: LogBase,
}

/// Input files of a request. Unused files are ignored.
#[derive(Debug, Clone, Default)]
pub struct InputFiles {
    pub channel: Option<PathBuf>,
    pub prior: Option<PathBuf>,
    pub mu: Option<PathBuf>,
    pub posterior: Option<PathBuf>,
}

struct Loaded {
    provenance: Provenance,
}

impl Loaded {
    fn read(&mut self, role: &'static str, path: Option<&Path>) -> CliResult<Vec<Vec<f64>>> {
        let path = path.ok_or(CliError::Missing(role))?;
        let bytes = std::fs::read(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        self.provenance.add_input(role, &bytes);
        parse_csv(&bytes).map_err(|message| CliError::Csv {
            path: path.to_owned(),
            message,
        })
    }

    fn channel(&mut self, files: &InputFiles) -> CliResult<Channel> {
        Ok(Channel::new(self.read("channel", files.channel.as_deref())?)?)
    }

    fn distribution(&mut self, role: &'static str, path: Option<&Path>) -> CliResult<Prior> {
        let rows = self.read(role, path)?;
        if rows.len() != 1 {
            return Err(CliError::Csv {
                path: path.expect("read succeeded").to_owned(),
                message: format!("expected a single row, found {}", rows.len()),
            });
        }
        Ok(Prior::new(rows.into_iter().next().expect("one row"))?)
    }

    fn gain(&mut self, spec: &str, prior: Option<&Prior>) -> CliResult<GainSpec> {
        match spec {
            "identity" => Ok(GainSpec::Identity),
            "simplex" => Ok(GainSpec::Simplex),
            "pointwise" => Ok(GainSpec::PointwiseInfo(
                prior.cloned().ok_or(CliError::Missing("prior"))?,
            )),
            path => Ok(GainSpec::matrix(self.read("gain", Some(Path::new(path)))?)?),
        }
    }
}

/// Parses a numeric CSV matrix. A first row with any non-numeric field is a
/// header and is skipped.
pub fn parse_csv(bytes: &[u8]) -> std::result::Result<Vec<Vec<f64>>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(bytes);
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(format!("record {}: {e}", i + 1)),
        }
    }
    if rows.is_empty() {
        return Err("no numeric rows".to_owned());
    }
    Ok(rows)
}

fn parse_number(name: &'static str, s: &str) -> CliResult<f64> {
    crate::fmean::parse_extended(s)
        .ok_or_else(|| QifError::Parse(format!("{name}: `{s}` is not a number")).into())
}

fn need<T: Clone>(v: &Option<T>, name: &'static str) -> CliResult<T> {
    v.clone().ok_or(CliError::Missing(name))
}

fn sup_diagnostics(report: LeakageReport, sup: &SupResult) -> LeakageReport {
    report
        .diagnostic("witness", json!(sup.witness))
        .diagnostic(
            "optimizer",
            serde_json::to_value(&sup.diagnostics).expect("diagnostics serialize"),
        )
}

fn optimizer_params(report: LeakageReport, cfg: &SimplexOptimizerConfig) -> LeakageReport {
    report
        .param("restarts", cfg.restarts)
        .param("grid_resolution", cfg.grid_resolution)
        .param("seed", cfg.seed)
}

/// Evaluates one measure and builds its report.
pub fn run(req: &MeasureRequest, files: &InputFiles) -> CliResult<LeakageReport> {
    use Measure::*;
    let stochastic = matches!(req.measure, MaxAlphaCapacity);
    let mut io = Loaded {
        provenance: Provenance::new(stochastic.then_some(req.optimizer.seed)),
    };
    let name = req.measure.name();
    let alpha = || need(&req.alpha, "alpha");
    let f_or_id = req.f.clone().unwrap_or_else(FMean::identity);
    let h_or_f = req.h.clone().unwrap_or_else(|| f_or_id.clone());
    let nats = |value: f64, prov: Provenance| LeakageReport::new(name.clone(), value, Unit::Nats, prov);

    let report = match req.measure {
        PriorV | PostAvg | PostMax | LeakageMult | LeakageAdd => {
            let pi = io.distribution("prior", files.prior.as_deref())?;
            let g = io.gain(&req.gain, Some(&pi))?;
            let f = &f_or_id;
            let h = &h_or_f;
            let base = |value: f64, unit: Unit, io: &Loaded| {
                LeakageReport::new(name.clone(), value, unit, io.provenance.clone())
                    .param("gain", g.id())
                    .param("f", f.id())
            };
            match req.measure {
                PriorV => {
                    let opt = gen_prior_vulnerability_opt(&pi, &g, f)?;
                    base(opt.value, Unit::Gain, &io)
                        .diagnostic("witness", serde_json::to_value(&opt.witness).expect("witness"))
                        .diagnostic("method", serde_json::to_value(opt.method).expect("method"))
                }
                _ => {
                    let c = io.channel(files)?;
                    let hyper = push(&pi, &c)?;
                    let outputs = json!(hyper.outputs());
                    let kind = match req.measure {
                        LeakageAdd => Some(LeakageKind::Additive),
                        LeakageMult => Some(LeakageKind::Multiplicative),
                        _ => None,
                    };
                    let (value, unit) = match (req.measure, kind) {
                        (PostAvg, _) => (gen_posterior_vulnerability_avg(&hyper, &g, f, h)?, Unit::Gain),
                        (PostMax, _) => (gen_posterior_vulnerability_max(&hyper, &g, f)?, Unit::Gain),
                        (_, Some(k)) => {
                            let v = if req.max_case {
                                gen_max_leakage(&pi, &c, &g, f, k)?
                            } else {
                                gen_leakage(&pi, &c, &g, f, h, k)?
                            };
                            let unit = if k == LeakageKind::Multiplicative { Unit::Nats } else { Unit::Gain };
                            (v, unit)
                        }
                        _ => unreachable!("covered above"),
                    };
                    let mut r = base(value, unit, &io).diagnostic("retained_outputs", outputs);
                    if req.measure != PostMax && !(kind.is_some() && req.max_case) {
                        r = r.param("h", h.id());
                    }
                    if kind.is_some() {
                        r = r.param("case", if req.max_case { "max" } else { "average" });
                    }
                    r.with_reason(Some(Reason::ZeroPriorVulnerability))
                }
            }
        }
        RenyiEntropy => {
            let a = alpha()?;
            let pi = io.distribution("prior", files.prior.as_deref())?;
            nats(renyi_entropy(&pi, a), io.provenance.clone()).param("alpha", ext_value(a.value()))
        }
        RenyiDivergence => {
            let a = alpha()?;
            let mu = io.distribution("mu", files.mu.as_deref())?;
            let pi = io.distribution("prior", files.prior.as_deref())?;
            nats(renyi_divergence(&mu, &pi, a)?, io.provenance.clone())
                .param("alpha", ext_value(a.value()))
                .with_reason(Some(Reason::SupportMismatch))
        }
        ArimotoMi | SibsonMi => {
            let a = alpha()?;
            let pi = io.distribution("prior", files.prior.as_deref())?;
            let c = io.channel(files)?;
            let v = if req.measure == ArimotoMi {
                arimoto_mi(&push(&pi, &c)?, a)
            } else {
                sibson_mi(&pi, &c, a)?
            };
            nats(v, io.provenance.clone()).param("alpha", ext_value(a.value()))
        }
        AlphaLossMin => {
            let a = alpha()?;
            let pi = io.distribution("prior", files.prior.as_deref())?;
            let (v, guess) = min_expected_alpha_loss(&pi, a)?;
            LeakageReport::new(name.clone(), v, Unit::Loss, io.provenance.clone())
                .param("alpha", ext_value(a.value()))
                .diagnostic("minimizer", json!(guess))
                .with_reason(Some(Reason::ZeroProbabilityGuess))
        }
        PointwiseAlpha => {
            let a = alpha()?;
            let pi = io.distribution("prior", files.prior.as_deref())?;
            let delta = io.distribution("posterior", files.posterior.as_deref())?;
            nats(pointwise_alpha_leakage(&pi, &delta, a)?, io.provenance.clone())
                .param("alpha", ext_value(a.value()))
                .with_reason(Some(Reason::SupportMismatch))
        }
        AlphaBeta => {
            let a = alpha()?;
            let beta = need(&req.beta, "beta")?;
            let (_, warning) = h_alpha_beta(a, beta)?;
            let pi = io.distribution("prior", files.prior.as_deref())?;
            let c = io.channel(files)?;
            let mut r = nats(alpha_beta_leakage(&pi, &c, a, beta)?, io.provenance.clone())
                .param("alpha", ext_value(a.value()))
                .param("beta", ext_value(beta));
            if let Some(w) = warning {
                r = r.diagnostic("warning", w);
            }
            r
        }
        BayesCapacity => {
            let c = io.channel(files)?;
            nats(bayes_capacity(&c), io.provenance.clone())
        }
        Ldp => {
            let c = io.channel(files)?;
            nats(ldp_leakage(&c), io.provenance.clone()).with_reason(Some(Reason::ZeroChannelEntry))
        }
        RenyiLdp => {
            let a = alpha()?;
            let c = io.channel(files)?;
            nats(renyi_ldp(&c, a)?, io.provenance.clone())
                .param("alpha", ext_value(a.value()))
                .with_reason(Some(Reason::ZeroChannelEntry))
        }
        MaxAlphaCapacity => {
            let a = alpha()?;
            let c = io.channel(files)?;
            let sup = maximal_alpha_leakage(&c, a, &req.optimizer)?;
            let r = nats(sup.value, io.provenance.clone()).param("alpha", ext_value(a.value()));
            sup_diagnostics(optimizer_params(r, &req.optimizer), &sup)
        }
        MultFCapacity => {
            let f = need(&req.f, "f")?;
            let c = io.channel(files)?;
            nats(multiplicative_f_capacity(&c, &f)?, io.provenance.clone()).param("f", f.id())
        }
    };
    Ok(match req.log_base {
        LogBase::Natural => report,
        LogBase::Bits => report.into_bits(),
    })
}

fn parse_mean(s: &Option<String>) -> CliResult<Option<FMean>> {
    Ok(match s {
        Some(s) => Some(s.parse::<FMean>()?),
        None => None,
    })
}

impl ComputeArgs {
    pub fn request(&self) -> CliResult<(MeasureRequest, InputFiles)> {
        let alpha = match &self.alpha {
            Some(a) => Some(AlphaOrder::new(parse_number("alpha", a)?)?),
            None => None,
        };
        let beta = match &self.beta {
            Some(b) => Some(parse_number("beta", b)?),
            None => None,
        };
        let optimizer = self.optimizer.config();
        optimizer.validate()?;
        let req = MeasureRequest {
            measure: self.measure,
            alpha,
            beta,
            f: parse_mean(&self.f)?,
            h: parse_mean(&self.h)?,
            gain: self.inputs.gain.clone(),
            max_case: self.max_case,
            optimizer,
            log_base: if self.bits { LogBase::Bits } else { LogBase::Natural },
        };
        Ok((req, self.inputs.files()))
    }
}

impl InputArgs {
    fn files(&self) -> InputFiles {
        InputFiles {
            channel: self.channel.clone(),
            prior: self.prior.clone(),
            mu: self.mu.clone(),
            posterior: self.posterior.clone(),
        }
    }
}

/// Families checked by `verify axioms --family all`.
pub fn default_families() -> Vec<MeanFamily> {
    let mut v = vec![MeanFamily::Classical];
    for a in [0.0, 0.5, 1.0, 2.0, f64::INFINITY] {
        v.push(MeanFamily::Alpha(AlphaOrder::new(a).expect("valid order")));
    }
    v
}

pub fn run_verify(args: &VerifyArgs) -> CliResult<VerifyReport> {
    let seed = args.optimizer.seed;
    let mut params: BTreeMap<String, Value> = BTreeMap::new();
    params.insert("seed".into(), json!(seed));
    let mut provenance = Provenance::new(Some(seed));
    let (suite, results) = match args.suite {
        Suite::Axioms => {
            let families = if args.family == "all" {
                default_families()
            } else {
                vec![args.family.parse::<MeanFamily>()?]
            };
            params.insert("instances".into(), json!(args.instances));
            params.insert(
                "families".into(),
                json!(families.iter().map(|f| f.label()).collect::<Vec<_>>()),
            );
            let mut results = Vec::new();
            for family in families {
                let cfg = AxiomSuiteConfig::new(family, args.instances, seed);
                results.extend(run_axiom_suite(&cfg)?);
            }
            ("axioms", results)
        }
        Suite::Duals => {
            params.insert("instances".into(), json!(args.instances));
            ("duals", verify_dual_formulas(args.instances, seed)?)
        }
        Suite::Maximal => {
            let mut io = Loaded { provenance };
            let c = io.channel(&args.inputs.files())?;
            let g = io.gain(&args.inputs.gain, None)?;
            provenance = io.provenance;
            let f = parse_mean(&args.f)?.unwrap_or_else(FMean::identity);
            let h = parse_mean(&args.h)?.unwrap_or_else(|| f.clone());
            let optimizer = args.optimizer.config();
            optimizer.validate()?;
            let cfg = MaximalConfig {
                max_aux: args.max_u,
                optimizer,
                ..MaximalConfig::default()
            };
            params.insert("gain".into(), json!(g.id()));
            params.insert("f".into(), json!(f.id()));
            params.insert("h".into(), json!(h.id()));
            params.insert("max_u".into(), json!(args.max_u));
            params.insert("grid_resolution".into(), json!(cfg.optimizer.grid_resolution));
            params.insert("restarts".into(), json!(cfg.optimizer.restarts));
            let check = verify_maximal_equals_capacity(&c, &g, &f, &h, &cfg)?;
            params.insert("lhs".into(), ext_value(check.lhs));
            params.insert("rhs".into(), ext_value(check.rhs));
            ("maximal", check.results())
        }
    };
    Ok(VerifyReport::new(suite, params, results, provenance))
}

fn emit(out: &Option<PathBuf>, json: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{json}\n")).map_err(CliError::Output),
        None => writeln!(stdout, "{json}").map_err(CliError::Output),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Errors go to `stderr`.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let outcome = match &cli.command {
        Command::Compute(args) => args
            .request()
            .and_then(|(req, files)| run(&req, &files))
            .and_then(|report| emit(&args.out, &report.to_json(), stdout))
            .map(|_| EXIT_OK),
        Command::Verify(args) => run_verify(args).and_then(|report| {
            emit(&args.out, &report.to_json(), stdout)?;
            Ok(if report.passed { EXIT_OK } else { EXIT_SUITE_FAILED })
        }),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_detection() {
        assert_eq!(parse_csv(b"y0,y1\n0.9,0.1\n0.1,0.9\n").unwrap().len(), 2);
        assert_eq!(parse_csv(b"0.5, 0.5\n").unwrap(), vec![vec![0.5, 0.5]]);
        assert!(parse_csv(b"a,b\n").is_err());
        assert!(parse_csv(b"0.5,0.5\nx,0.5\n").is_err());
    }

    #[test]
    fn measure_names_are_kebab_case() {
        assert_eq!(Measure::BayesCapacity.name(), "bayes-capacity");
        assert_eq!(Measure::PriorV.name(), "prior-v");
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
