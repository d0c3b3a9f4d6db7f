//! Verification harness: axiom suites, dual-formula agreement and the
//! enumeration check that maximal leakage over auxiliary variables equals
//! the leakage capacity.
//!
//! Random instances are drawn from fixed distributions: priors and channel
//! rows are Dirichlet(1, …, 1), alphabet sizes are uniform in small ranges and
//! gain matrices have independent Uniform[0, 1) entries. Instance `i` uses its
//! own random stream, so results do not depend on scheduling.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::alpha::{
    alpha_loss, arimoto_mi, expected_alpha_loss, min_expected_alpha_loss, sibson_mi,
    sibson_via_pointwise, AlphaOrder,
};
use crate::capacity::{alpha_beta_leakage, gen_leakage_capacity, SimplexOptimizerConfig};
use crate::error::{QifError, Result};
use crate::fmean::{f_alpha, h_alpha_beta, FMean};
use crate::gain::{GainMatrix, GainSpec};
use crate::prob::{compose, ni_channel, push, Channel, Hyper, Prior};
use crate::report::ext_f64;
use crate::simplex::{dirichlet_uniform, grid_points, instance_rng};
use crate::vulnerability::{
    gen_leakage, gen_posterior_vulnerability_avg, gen_posterior_vulnerability_avg_unchecked,
    gen_posterior_vulnerability_max, gen_prior_vulnerability, LeakageKind,
};

/// Largest secret alphabet accepted by [`verify_maximal_equals_capacity`].
pub const MAX_ENUM_SECRETS: usize = 3;
/// Largest auxiliary alphabet accepted by [`verify_maximal_equals_capacity`].
pub const MAX_ENUM_AUX: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationResult {
    pub theorem_id: String,
    pub instances_checked: usize,
    #[serde(serialize_with = "ext_f64")]
    pub max_violation: f64,
    pub tolerance: f64,
    /// Inputs of the instance with the largest violation (`null` if none).
    pub worst_instance: Value,
    pub passed: bool,
}

impl VerificationResult {
    /// Aggregates per-instance violations; the first instance with the
    /// largest violation is kept. NaN counts as an infinite violation.
    pub fn from_violations(
        theorem_id: impl Into<String>,
        tolerance: f64,
        violations: &[f64],
        describe: impl Fn(usize) -> Value,
    ) -> Self {
        let mut worst: Option<(usize, f64)> = None;
        for (i, &v) in violations.iter().enumerate() {
            let v = if v.is_nan() { f64::INFINITY } else { v };
            if worst.map_or(true, |(_, w)| v > w) {
                worst = Some((i, v));
            }
        }
        let max_violation = worst.map_or(0.0, |w| w.1);
        Self {
            theorem_id: theorem_id.into(),
            instances_checked: violations.len(),
            max_violation,
            tolerance,
            worst_instance: worst.map_or(Value::Null, |(i, _)| describe(i)),
            passed: max_violation <= tolerance,
        }
    }
}

fn random_channel<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Channel {
    let data: Vec<Vec<f64>> = (0..rows).map(|_| dirichlet_uniform(rng, cols)).collect();
    Channel::new(data).expect("dirichlet rows are distributions")
}

fn random_prior<R: Rng>(rng: &mut R, n: usize) -> Prior {
    Prior::new(dirichlet_uniform(rng, n)).expect("dirichlet point")
}

fn random_gain_matrix<R: Rng>(rng: &mut R, n_actions: usize, n_secrets: usize) -> GainMatrix {
    let mut rows: Vec<Vec<f64>> = (0..n_actions)
        .map(|_| (0..n_secrets).map(|_| rng.gen::<f64>()).collect())
        .collect();
    if rows.iter().flatten().all(|&v| v == 0.0) {
        rows[0][0] = 1.0;
    }
    GainMatrix::new(rows).expect("non-negative matrix with a positive entry")
}

fn gain_json(g: &GainSpec) -> Value {
    match g {
        GainSpec::Matrix(m) => json!({ "matrix": m.to_rows() }),
        other => json!(other.id()),
    }
}

/// Mean functions under test in an axiom suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanFamily {
    /// Affine `f = h`, with `g_id` or random non-negative gain matrices.
    Classical,
    /// `f = h = f_α` with the simplex gain.
    Alpha(AlphaOrder),
    /// Affine `f` with the harmonic `h(t) = t⁻¹` and the class check
    /// disabled. The suite is expected to report violations.
    Injected,
}

impl MeanFamily {
    pub fn label(&self) -> String {
        match self {
            MeanFamily::Classical => "classical".to_owned(),
            MeanFamily::Alpha(a) => format!("alpha:{a}"),
            MeanFamily::Injected => "injected".to_owned(),
        }
    }
}

impl std::str::FromStr for MeanFamily {
    type Err = QifError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(MeanFamily::Classical),
            "injected" => Ok(MeanFamily::Injected),
            _ => match s.strip_prefix("alpha:") {
                Some(a) => Ok(MeanFamily::Alpha(a.parse()?)),
                None => Err(QifError::Parse(format!("unknown mean family `{s}`"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomSuiteConfig {
    pub family: MeanFamily,
    pub n_instances: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl AxiomSuiteConfig {
    pub fn new(family: MeanFamily, n_instances: usize, seed: u64) -> Self {
        Self {
            family,
            n_instances,
            seed,
            tolerance: 1e-9,
        }
    }
}

pub const AXIOMS: [&str; 7] = ["NI", "MONO", "DPI-avg", "DPI-max", "CVX", "Q-CVX", "AVG<=MAX"];

struct AxiomInstance {
    prior: Prior,
    channel: Channel,
    post: Channel,
    mix_weight: f64,
    mix_a: Prior,
    mix_b: Prior,
    gain: GainSpec,
}

impl AxiomInstance {
    fn draw(family: MeanFamily, seed: u64, index: usize) -> Self {
        let mut rng = instance_rng(seed, index as u64);
        let nx = rng.gen_range(2..=4);
        let ny = rng.gen_range(2..=4);
        let nz = rng.gen_range(1..=4);
        let prior = random_prior(&mut rng, nx);
        let channel = random_channel(&mut rng, nx, ny);
        let post = random_channel(&mut rng, ny, nz);
        let mix_weight = rng.gen::<f64>();
        let mix_a = random_prior(&mut rng, nx);
        let mix_b = random_prior(&mut rng, nx);
        let gain = match family {
            MeanFamily::Alpha(_) => GainSpec::Simplex,
            _ if index % 2 == 0 => GainSpec::Identity,
            _ => {
                let nw = rng.gen_range(1..=4);
                GainSpec::Matrix(random_gain_matrix(&mut rng, nw, nx))
            }
        };
        Self {
            prior,
            channel,
            post,
            mix_weight,
            mix_a,
            mix_b,
            gain,
        }
    }

    fn to_json(&self, index: usize) -> Value {
        json!({
            "index": index,
            "prior": self.prior,
            "channel": self.channel,
            "post_processing": self.post,
            "mix_weight": self.mix_weight,
            "mix_a": self.mix_a,
            "mix_b": self.mix_b,
            "gain": gain_json(&self.gain),
        })
    }
}

fn family_means(family: MeanFamily) -> (FMean, FMean) {
    match family {
        MeanFamily::Classical => (FMean::identity(), FMean::identity()),
        MeanFamily::Alpha(a) => (f_alpha(a), f_alpha(a)),
        MeanFamily::Injected => (FMean::identity(), FMean::power(-1.0).expect("valid exponent")),
    }
}

fn axiom_violations(inst: &AxiomInstance, family: MeanFamily) -> Result<[f64; 7]> {
    let (f, h) = family_means(family);
    let g = &inst.gain;
    let prior_v = |pi: &Prior| gen_prior_vulnerability(pi, g, &f);
    let avg = |hy: &Hyper| {
        if family == MeanFamily::Injected {
            gen_posterior_vulnerability_avg_unchecked(hy, g, &f, &h)
        } else {
            gen_posterior_vulnerability_avg(hy, g, &f, &h)
        }
    };
    let max = |hy: &Hyper| gen_posterior_vulnerability_max(hy, g, &f);

    let pi = &inst.prior;
    let v = prior_v(pi)?;
    let ni = push(pi, &ni_channel(pi.len())?)?;
    let hc = push(pi, &inst.channel)?;
    let hcr = push(pi, &compose(&inst.channel, &inst.post)?)?;
    let (avg_c, max_c) = (avg(&hc)?, max(&hc)?);

    let ni_violation = (avg(&ni)? - v).abs().max((max(&ni)? - v).abs());
    let mono = (v - avg_c).max(0.0);
    let dpi_avg = (avg(&hcr)? - avg_c).max(0.0);
    let dpi_max = (max(&hcr)? - max_c).max(0.0);

    let a = inst.mix_weight;
    let mixed = Prior::mix(&[a, 1.0 - a], &[inst.mix_a.clone(), inst.mix_b.clone()])?;
    let (va, vb, vm) = (prior_v(&inst.mix_a)?, prior_v(&inst.mix_b)?, prior_v(&mixed)?);
    let cvx = (vm - (a * va + (1.0 - a) * vb)).max(0.0);
    let qcvx = (vm - va.max(vb)).max(0.0);
    let avg_max = (avg_c - max_c).max(0.0);
    Ok([ni_violation, mono, dpi_avg, dpi_max, cvx, qcvx, avg_max])
}

/// Checks the vulnerability axioms on `n_instances` random instances; one
/// result per axiom, in the order of [`AXIOMS`].
pub fn run_axiom_suite(cfg: &AxiomSuiteConfig) -> Result<Vec<VerificationResult>> {
    let family = cfg.family;
    let per_instance = (0..cfg.n_instances)
        .into_par_iter()
        .map(|i| axiom_violations(&AxiomInstance::draw(family, cfg.seed, i), family))
        .collect::<Result<Vec<_>>>()?;
    let (f, h) = family_means(family);
    Ok(AXIOMS
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let column: Vec<f64> = per_instance.iter().map(|v| v[k]).collect();
            VerificationResult::from_violations(
                format!("{name}/{}", family.label()),
                cfg.tolerance,
                &column,
                |i| {
                    let mut j = AxiomInstance::draw(family, cfg.seed, i).to_json(i);
                    j["f"] = json!(f.id());
                    j["h"] = json!(h.id());
                    j
                },
            )
        })
        .collect())
}

struct DualInstance {
    prior: Prior,
    channel: Channel,
}

impl DualInstance {
    fn draw(seed: u64, index: usize, sizes: Option<(usize, usize)>) -> Self {
        let mut rng = instance_rng(seed, index as u64);
        let (nx, ny) = sizes.unwrap_or_else(|| (rng.gen_range(2..=4), rng.gen_range(2..=4)));
        let prior = random_prior(&mut rng, nx);
        let channel = random_channel(&mut rng, nx, ny);
        Self { prior, channel }
    }

    fn to_json(&self, index: usize) -> Value {
        json!({ "index": index, "prior": self.prior, "channel": self.channel })
    }
}

fn dual_check<F>(
    id: String,
    tolerance: f64,
    n: usize,
    seed: u64,
    sizes: Option<(usize, usize)>,
    check: F,
) -> Result<VerificationResult>
where
    F: Fn(&DualInstance) -> Result<f64> + Sync,
{
    let violations = (0..n)
        .into_par_iter()
        .map(|i| check(&DualInstance::draw(seed, i, sizes)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(VerificationResult::from_violations(id, tolerance, &violations, |i| {
        DualInstance::draw(seed, i, sizes).to_json(i)
    }))
}

fn shannon_mi_by_entropies(pi: &Prior, c: &Channel) -> f64 {
    let h = |v: &mut dyn Iterator<Item = f64>| -> f64 {
        v.filter(|&q| q > 0.0).map(|q| -q * q.ln()).sum()
    };
    let p = pi.probs();
    let hx = h(&mut p.iter().copied());
    let hy = h(&mut (0..c.n_outputs()).map(|y| c.column(y).zip(p).map(|(a, b)| a * b).sum()));
    let hxy = h(&mut (0..c.n_inputs()).flat_map(|x| c.row(x).iter().map(move |v| v * p[x])));
    hx + hy - hxy
}

/// Tolerance for identities between two closed forms.
pub const DUAL_TOLERANCE: f64 = 1e-8;
/// Tolerance for the pointwise route to Sibson mutual information.
pub const SIBSON_TOLERANCE: f64 = 1e-9;

/// Checks that independent formulas for the same quantity agree.
pub fn verify_dual_formulas(n_instances: usize, seed: u64) -> Result<Vec<VerificationResult>> {
    let n = n_instances;
    let mut out = Vec::new();
    let simplex = GainSpec::Simplex;

    for al in [0.5, 2.0, f64::INFINITY] {
        let alpha = AlphaOrder::new(al)?;
        let f = f_alpha(alpha);
        out.push(dual_check(
            format!("alpha-leakage=arimoto[alpha={alpha}]"),
            DUAL_TOLERANCE,
            n,
            seed,
            None,
            |d| {
                let l = gen_leakage(&d.prior, &d.channel, &simplex, &f, &f, LeakageKind::Multiplicative)?;
                Ok((l - arimoto_mi(&push(&d.prior, &d.channel)?, alpha)).abs())
            },
        )?);
    }

    for al in [0.5, 2.0, 10.0] {
        let alpha = AlphaOrder::new(al)?;
        out.push(dual_check(
            format!("pointwise-average=sibson[alpha={alpha}]"),
            SIBSON_TOLERANCE,
            n,
            seed,
            None,
            |d| {
                let via = sibson_via_pointwise(&push(&d.prior, &d.channel)?, &d.prior, alpha)?;
                Ok((via - sibson_mi(&d.prior, &d.channel, alpha)?).abs())
            },
        )?);
    }

    for al in [2.0, 3.0, f64::INFINITY] {
        let alpha = AlphaOrder::new(al)?;
        let threshold = if alpha.is_infinite() { 1.0 } else { al / (al - 1.0) };
        for beta in [1.0, threshold, 4.0, f64::INFINITY] {
            let (h, _) = h_alpha_beta(alpha, beta)?;
            let f = f_alpha(alpha);
            out.push(dual_check(
                format!("alpha-beta-closed-form=vulnerability-ratio[alpha={alpha},beta={beta}]"),
                DUAL_TOLERANCE,
                n,
                seed,
                None,
                |d| {
                    let closed = alpha_beta_leakage(&d.prior, &d.channel, alpha, beta)?;
                    let route =
                        gen_leakage(&d.prior, &d.channel, &simplex, &f, &h, LeakageKind::Multiplicative)?;
                    Ok((closed - route).abs())
                },
            )?);
        }
    }

    for al in [1.5, 2.0, f64::INFINITY] {
        let alpha = AlphaOrder::new(al)?;
        out.push(dual_check(
            format!("alpha-beta[beta=1]=arimoto[alpha={alpha}]"),
            DUAL_TOLERANCE,
            n,
            seed,
            None,
            |d| {
                let ab = alpha_beta_leakage(&d.prior, &d.channel, alpha, 1.0)?;
                Ok((ab - arimoto_mi(&push(&d.prior, &d.channel)?, alpha)).abs())
            },
        )?);
    }

    let grid = grid_points(3, 100);
    for al in [0.5, 1.0, 2.0, f64::INFINITY] {
        let alpha = AlphaOrder::new(al)?;
        out.push(dual_check(
            format!("min-expected-alpha-loss=value-at-minimizer[alpha={alpha}]"),
            DUAL_TOLERANCE,
            n,
            seed,
            Some((3, 2)),
            |d| {
                let (value, minimizer) = min_expected_alpha_loss(&d.prior, alpha)?;
                Ok((expected_alpha_loss(&d.prior, &minimizer, alpha)? - value).abs())
            },
        )?);
        out.push(dual_check(
            format!("min-expected-alpha-loss<=grid-search[alpha={alpha}]"),
            DUAL_TOLERANCE,
            n,
            seed,
            Some((3, 2)),
            |d| {
                let (value, _) = min_expected_alpha_loss(&d.prior, alpha)?;
                let mut best = f64::INFINITY;
                for w in &grid {
                    let mut e = 0.0;
                    for (&q, &g) in d.prior.probs().iter().zip(w) {
                        e += q * alpha_loss(g, alpha)?;
                    }
                    best = best.min(e);
                }
                Ok((value - best).max(0.0))
            },
        )?);
    }

    let one = AlphaOrder::one();
    out.push(dual_check(
        "arimoto=sibson=shannon[alpha=1]".to_owned(),
        SIBSON_TOLERANCE,
        n,
        seed,
        None,
        |d| {
            let ari = arimoto_mi(&push(&d.prior, &d.channel)?, one);
            let sib = sibson_mi(&d.prior, &d.channel, one)?;
            let sh = shannon_mi_by_entropies(&d.prior, &d.channel);
            Ok((ari - sib).abs().max((ari - sh).abs()))
        },
    )?);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximalConfig {
    /// Largest auxiliary alphabet `|U|` enumerated.
    pub max_aux: usize,
    /// Grid resolution for priors and the capacity optimizer.
    pub optimizer: SimplexOptimizerConfig,
    /// Random stochastic `p(u|x)` spot checks.
    pub stochastic_samples: usize,
    /// Allowed `|LHS − RHS|`; defaults to `max(1e-6, 2 / grid_resolution)`.
    pub gap_tolerance: Option<f64>,
}

impl Default for MaximalConfig {
    fn default() -> Self {
        Self {
            max_aux: MAX_ENUM_AUX,
            optimizer: SimplexOptimizerConfig::default(),
            stochastic_samples: 64,
            gap_tolerance: None,
        }
    }
}

impl MaximalConfig {
    pub fn gap_tolerance(&self) -> f64 {
        self.gap_tolerance
            .unwrap_or_else(|| (2.0 / self.optimizer.grid_resolution as f64).max(1e-6))
    }
}

/// Outcome of [`verify_maximal_equals_capacity`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximalCheck {
    /// Best leakage over grid priors and auxiliary variables `U`.
    pub lhs: f64,
    /// Capacity found by the prior optimizer.
    pub rhs: f64,
    pub lhs_prior: Vec<f64>,
    /// Conditional `p(u|x)` rows attaining the LHS.
    pub lhs_aux: Vec<Vec<f64>>,
    pub rhs_prior: Prior,
    pub maps_enumerated: usize,
    /// `|LHS − RHS| ≤ gap tolerance`.
    pub gap: VerificationResult,
    /// `LHS ≤ RHS + 1e-9`.
    pub order: VerificationResult,
}

impl MaximalCheck {
    pub fn results(&self) -> Vec<VerificationResult> {
        vec![self.gap.clone(), self.order.clone()]
    }
}

/// Restricted growth strings: set partitions of `n` items into at most `k`
/// blocks.
fn set_partitions(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, n: usize, k: usize, used: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=used.min(k - 1) {
            if b == used && used == k {
                continue;
            }
            cur.push(b);
            rec(i + 1, n, k, used.max(b + 1), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, 0, &mut Vec::new(), &mut out);
    out
}

/// All maps `{0..n} → {0..k}`.
fn all_maps(n: usize, k: usize) -> Vec<Vec<usize>> {
    let total = k.pow(n as u32);
    (0..total)
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let d = code % k;
                    code /= k;
                    d
                })
                .collect()
        })
        .collect()
}

fn deterministic_aux(map: &[usize], n_aux: usize) -> Vec<Vec<f64>> {
    map.iter()
        .map(|&u| {
            let mut row = vec![0.0; n_aux];
            row[u] = 1.0;
            row
        })
        .collect()
}

/// Prior on `U` and channel from `U` to `Y` induced by `π`, `p(u|x)` and `C`.
fn induced(pi: &Prior, aux: &[Vec<f64>], channel: &Channel) -> Result<(Prior, Channel)> {
    let n_aux = aux[0].len();
    let p = pi.probs();
    let mut pu = vec![0.0; n_aux];
    for (x, row) in aux.iter().enumerate() {
        for (u, q) in row.iter().enumerate() {
            pu[u] += p[x] * q;
        }
    }
    let ny = channel.n_outputs();
    let mut rows = Vec::with_capacity(n_aux);
    for u in 0..n_aux {
        let mut row = vec![0.0; ny];
        // Unreachable u is dropped by the hyper; any valid row will do.
        let weights: Vec<f64> = if pu[u] > 0.0 {
            (0..p.len()).map(|x| p[x] * aux[x][u] / pu[u]).collect()
        } else {
            vec![1.0 / p.len() as f64; p.len()]
        };
        for (x, w) in weights.iter().enumerate() {
            for (y, r) in row.iter_mut().enumerate() {
                *r += w * channel.get(x, y);
            }
        }
        rows.push(row);
    }
    let total: f64 = pu.iter().sum();
    let pu = Prior::from_weights(pu.iter().map(|v| v / total).collect());
    Ok((pu, Channel::new(rows)?))
}

/// Compares the best generalized leakage of auxiliary variables `U − X − Y`
/// (grid priors, every deterministic `p(u|x)` up to `|U| ≤ max_aux`, plus
/// random stochastic ones) with the prior-optimized leakage capacity of `C`.
///
/// Label-symmetric gains (`g_id`, simplex) only need one map per set
/// partition of `X`. A gain matrix fixes `|U|` to its number of columns.
pub fn verify_maximal_equals_capacity(
    channel: &Channel,
    g: &GainSpec,
    f: &FMean,
    h: &FMean,
    cfg: &MaximalConfig,
) -> Result<MaximalCheck> {
    let nx = channel.n_inputs();
    if nx > MAX_ENUM_SECRETS {
        return Err(QifError::SizeLimit(format!(
            "|X| = {nx} exceeds {MAX_ENUM_SECRETS}"
        )));
    }
    if cfg.max_aux == 0 || cfg.max_aux > MAX_ENUM_AUX {
        return Err(QifError::SizeLimit(format!(
            "|U| bound {} outside 1..={MAX_ENUM_AUX}",
            cfg.max_aux
        )));
    }
    g.check_secrets(nx)?;
    let aux_maps: Vec<Vec<Vec<f64>>> = match g {
        GainSpec::Identity | GainSpec::Simplex => set_partitions(nx, cfg.max_aux)
            .into_iter()
            .map(|m| {
                let blocks = m.iter().max().map_or(1, |b| b + 1);
                deterministic_aux(&m, blocks)
            })
            .collect(),
        GainSpec::Matrix(m) => {
            let k = m.n_secrets();
            if k > cfg.max_aux {
                return Err(QifError::SizeLimit(format!(
                    "gain matrix needs |U| = {k} > {}",
                    cfg.max_aux
                )));
            }
            all_maps(nx, k)
                .into_iter()
                .map(|m| deterministic_aux(&m, k))
                .collect()
        }
        GainSpec::PointwiseInfo(_) => {
            return Err(QifError::Unsupported(
                "pointwise information gain depends on a fixed prior".to_owned(),
            ))
        }
    };
    let priors = grid_points(nx, cfg.optimizer.grid_resolution);
    let leak = |pi: &Prior, aux: &[Vec<f64>]| -> Result<f64> {
        let (pu, cu) = induced(pi, aux, channel)?;
        gen_leakage(&pu, &cu, g, f, h, LeakageKind::Multiplicative)
    };

    let per_prior = priors
        .par_iter()
        .map(|w| {
            let pi = Prior::from_weights(w.clone());
            let mut best = (f64::NEG_INFINITY, 0);
            for (k, aux) in aux_maps.iter().enumerate() {
                let v = leak(&pi, aux)?;
                if v > best.0 {
                    best = (v, k);
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut lhs = f64::NEG_INFINITY;
    let mut lhs_prior = priors[0].clone();
    let mut lhs_aux = aux_maps[0].clone();
    for (w, &(v, k)) in priors.iter().zip(&per_prior) {
        if v > lhs {
            lhs = v;
            lhs_prior = w.clone();
            lhs_aux = aux_maps[k].clone();
        }
    }

    let stochastic = (0..cfg.stochastic_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = instance_rng(cfg.optimizer.seed ^ 0x5eed, i as u64);
            let n_aux = match g {
                GainSpec::Matrix(m) => m.n_secrets(),
                _ => rng.gen_range(1..=cfg.max_aux),
            };
            let aux: Vec<Vec<f64>> = (0..nx).map(|_| dirichlet_uniform(&mut rng, n_aux)).collect();
            let w = priors[rng.gen_range(0..priors.len())].clone();
            let v = leak(&Prior::from_weights(w.clone()), &aux)?;
            Ok((v, w, aux))
        })
        .collect::<Result<Vec<_>>>()?;
    for (v, w, aux) in stochastic {
        if v > lhs {
            lhs = v;
            lhs_prior = w;
            lhs_aux = aux;
        }
    }

    let rhs_result = gen_leakage_capacity(channel, g, f, h, &cfg.optimizer)?;
    let rhs = rhs_result.value;
    let describe = |_| {
        json!({
            "channel": channel,
            "gain": gain_json(g),
            "f": f.id(),
            "h": h.id(),
            "lhs": lhs,
            "rhs": rhs,
            "lhs_prior": lhs_prior,
            "lhs_aux": lhs_aux,
            "rhs_prior": rhs_result.witness,
        })
    };
    let gap = VerificationResult::from_violations(
        "maximal=capacity/gap",
        cfg.gap_tolerance(),
        &[(lhs - rhs).abs()],
        describe,
    );
    let order = VerificationResult::from_violations(
        "maximal=capacity/lhs<=rhs",
        1e-9,
        &[(lhs - rhs).max(0.0)],
        describe,
    );
    Ok(MaximalCheck {
        lhs,
        rhs,
        lhs_prior: lhs_prior.clone(),
        lhs_aux: lhs_aux.clone(),
        rhs_prior: rhs_result.witness.clone(),
        maps_enumerated: aux_maps.len(),
        gap,
        order,
    })
}
