//! Leakage capacities: closed forms and a supremum-over-priors optimizer.

use rayon::prelude::*;
use serde::Serialize;

use crate::alpha::{arimoto_mi, divergence, sibson_mi, AlphaBranch, AlphaOrder};
use crate::error::{QifError, Result};
use crate::fmean::{Direction, FMean};
use crate::gain::GainSpec;
use crate::num::log_sum_exp;
use crate::prob::{push, Channel, Prior};
use crate::simplex::{ascend, dirichlet_uniform, grid_points, instance_rng, AscentConfig};
use crate::vulnerability::{gen_leakage, LeakageKind};

/// Largest alphabet for which [`sup_over_prior`] adds an exhaustive grid.
pub const GRID_MAX_SECRETS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexOptimizerConfig {
    /// Dirichlet(1) starting points for projected ascent.
    pub restarts: usize,
    /// Points per unit of the exhaustive grid (used when `|X| ≤ 3`).
    pub grid_resolution: usize,
    /// Values of `n` in the vertex family `π_{x*} = 1 − 1/n`.
    pub vertex_epsilon_sequence: Vec<u64>,
    pub ascent_tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
    /// Best candidates (grid, vertex, uniform) that are refined by ascent.
    pub refine_top: usize,
}

impl Default for SimplexOptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            grid_resolution: 100,
            vertex_epsilon_sequence: vec![10, 100, 1000, 10000],
            ascent_tolerance: 1e-12,
            max_iterations: 500,
            seed: 0,
            refine_top: 3,
        }
    }
}

impl SimplexOptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(QifError::OutOfRange {
                name: "restarts",
                value: 0.0,
                allowed: ">= 1",
            });
        }
        if !(self.ascent_tolerance > 0.0) {
            return Err(QifError::OutOfRange {
                name: "ascent_tolerance",
                value: self.ascent_tolerance,
                allowed: "> 0",
            });
        }
        if self.vertex_epsilon_sequence.iter().any(|&n| n < 2) {
            return Err(QifError::OutOfRange {
                name: "vertex n",
                value: 1.0,
                allowed: ">= 2",
            });
        }
        Ok(())
    }

    fn ascent(&self) -> AscentConfig {
        AscentConfig {
            tolerance: self.ascent_tolerance,
            max_iterations: self.max_iterations,
            ..AscentConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Uniform,
    Vertex { x: usize, n: u64 },
    Grid,
    Restart { index: usize },
    Refined { from: Box<Source> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexStep {
    pub n: u64,
    /// Best objective over the choice of `x*` at this `n`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupDiagnostics {
    pub evaluations: usize,
    pub candidates: usize,
    pub ascent_runs: usize,
    pub ascent_iterations: usize,
    pub best_source: Source,
    pub vertex_trend: Vec<VertexStep>,
}

/// Best objective value found and the prior attaining it. The value is a
/// lower bound on the supremum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupResult {
    pub value: f64,
    pub witness: Prior,
    pub diagnostics: SupDiagnostics,
}

/// Vertex-approaching prior: mass `1 − 1/n` on `x`, the rest spread evenly.
pub fn vertex_prior(size: usize, x: usize, n: u64) -> Vec<f64> {
    let rest = 1.0 / (n as f64 * (size - 1) as f64);
    let mut v = vec![rest; size];
    v[x] = 1.0 - 1.0 / n as f64;
    v
}

/// Maximizes `objective` over priors on `n_secrets` symbols.
///
/// Candidates are the uniform prior, the vertex family, an exhaustive grid
/// for small alphabets and seeded Dirichlet restarts; the restarts and the
/// best candidates are refined by projected ascent. Results are merged in a
/// fixed order, so the outcome depends only on the inputs and the seed.
pub fn sup_over_prior<F>(
    n_secrets: usize,
    objective: F,
    cfg: &SimplexOptimizerConfig,
) -> Result<SupResult>
where
    F: Fn(&Prior) -> Result<f64> + Sync,
{
    cfg.validate()?;
    if n_secrets == 0 {
        return Err(QifError::Empty("prior"));
    }
    let eval = |w: &[f64]| objective(&Prior::from_weights(w.to_vec()));

    let mut candidates: Vec<(Source, Vec<f64>)> =
        vec![(Source::Uniform, vec![1.0 / n_secrets as f64; n_secrets])];
    if n_secrets > 1 {
        for &n in &cfg.vertex_epsilon_sequence {
            for x in 0..n_secrets {
                candidates.push((Source::Vertex { x, n }, vertex_prior(n_secrets, x, n)));
            }
        }
        if n_secrets <= GRID_MAX_SECRETS {
            for w in grid_points(n_secrets, cfg.grid_resolution) {
                candidates.push((Source::Grid, w));
            }
        }
    }
    let values = candidates
        .par_iter()
        .map(|(_, w)| eval(w))
        .collect::<Result<Vec<f64>>>()?;
    let mut evaluations = values.len();

    let vertex_trend = cfg
        .vertex_epsilon_sequence
        .iter()
        .filter(|_| n_secrets > 1)
        .map(|&n| VertexStep {
            n,
            value: candidates
                .iter()
                .zip(&values)
                .filter(|(c, _)| matches!(c.0, Source::Vertex { n: m, .. } if m == n))
                .map(|(_, &v)| v)
                .fold(f64::NEG_INFINITY, f64::max),
        })
        .collect();

    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut starts: Vec<(Source, Vec<f64>)> = Vec::new();
    if n_secrets > 1 {
        for i in 0..cfg.restarts {
            let mut rng = instance_rng(cfg.seed, i as u64);
            starts.push((Source::Restart { index: i }, dirichlet_uniform(&mut rng, n_secrets)));
        }
        for &i in order.iter().take(cfg.refine_top) {
            let (src, w) = &candidates[i];
            starts.push((
                Source::Refined {
                    from: Box::new(src.clone()),
                },
                w.clone(),
            ));
        }
    }
    let acfg = cfg.ascent();
    let runs = starts
        .par_iter()
        .map(|(_, w)| ascend(w, eval, &acfg))
        .collect::<Result<Vec<_>>>()?;

    let mut best_value = f64::NEG_INFINITY;
    let mut best: Option<(Source, Vec<f64>)> = None;
    for ((src, w), &v) in candidates.iter().zip(&values) {
        if v > best_value || best.is_none() {
            best_value = v;
            best = Some((src.clone(), w.clone()));
        }
    }
    let mut ascent_iterations = 0;
    for ((src, _), run) in starts.iter().zip(&runs) {
        evaluations += run.evaluations;
        ascent_iterations += run.iterations;
        if run.value > best_value {
            best_value = run.value;
            best = Some((src.clone(), run.point.clone()));
        }
    }
    let (best_source, w) = best.expect("at least the uniform candidate");
    Ok(SupResult {
        value: best_value,
        witness: Prior::from_weights(w),
        diagnostics: SupDiagnostics {
            evaluations,
            candidates: candidates.len(),
            ascent_runs: runs.len(),
            ascent_iterations,
            best_source,
            vertex_trend,
        },
    })
}

fn column_max(channel: &Channel, y: usize) -> f64 {
    channel.column(y).fold(0.0, f64::max)
}

/// Bayes capacity `ln Σ_y max_x C_{x,y}`.
pub fn bayes_capacity(channel: &Channel) -> f64 {
    (0..channel.n_outputs())
        .map(|y| column_max(channel, y))
        .sum::<f64>()
        .ln()
}

/// LDP leakage `ln max_y max_x C_{x,y} / min_x C_{x,y}`; `+∞` when some
/// reachable column contains a zero.
pub fn ldp_leakage(channel: &Channel) -> f64 {
    let mut best = 0.0f64;
    for y in 0..channel.n_outputs() {
        let hi = column_max(channel, y);
        if hi == 0.0 {
            continue;
        }
        let lo = channel.column(y).fold(f64::INFINITY, f64::min);
        if lo == 0.0 {
            return f64::INFINITY;
        }
        best = best.max((hi / lo).ln());
    }
    best
}

fn require_gt1(alpha: AlphaOrder) -> Result<()> {
    if matches!(alpha.branch(), AlphaBranch::FiniteGt1 | AlphaBranch::Infinity) {
        Ok(())
    } else {
        Err(QifError::OutOfRange {
            name: "alpha",
            value: alpha.value(),
            allowed: "(1, inf]",
        })
    }
}

/// Rényi LDP: `max_{x,x'} D_α(C_x ‖ C_{x'})`.
pub fn renyi_ldp(channel: &Channel, alpha: AlphaOrder) -> Result<f64> {
    require_gt1(alpha)?;
    if alpha.is_infinite() {
        return Ok(ldp_leakage(channel));
    }
    let mut best = 0.0f64;
    for x in 0..channel.n_inputs() {
        for x2 in 0..channel.n_inputs() {
            if x != x2 {
                best = best.max(divergence(channel.row(x), channel.row(x2), alpha));
            }
        }
    }
    Ok(best)
}

/// Generalized leakage under `h_{(α,β)}`, `f_α` and the simplex gain:
/// `(α/((α−1)β)) ln Σ_y p(y)^{1−β} [Σ_x π_x^α C_{x,y}^α / Σ_x π_x^α]^{β/α}`,
/// with dedicated branches for `β = ∞` and `α = ∞`.
pub fn alpha_beta_leakage(
    pi: &Prior,
    channel: &Channel,
    alpha: AlphaOrder,
    beta: f64,
) -> Result<f64> {
    require_gt1(alpha)?;
    if beta.is_nan() || beta < 1.0 {
        return Err(QifError::OutOfRange {
            name: "beta",
            value: beta,
            allowed: "[1, inf]",
        });
    }
    if pi.len() != channel.n_inputs() {
        return Err(QifError::DimensionMismatch {
            what: "prior vs channel rows",
            expected: channel.n_inputs(),
            found: pi.len(),
        });
    }
    let p = pi.probs();
    // Per reachable output: (ln p(y), (1/α) ln A_y).
    let mut terms = Vec::with_capacity(channel.n_outputs());
    let log_norm = if alpha.is_infinite() {
        pi.max().ln()
    } else {
        let a = alpha.value();
        log_sum_exp(p.iter().filter(|&&q| q > 0.0).map(|q| a * q.ln())) / a
    };
    for y in 0..channel.n_outputs() {
        let joint: Vec<f64> = channel.column(y).zip(p).map(|(c, q)| c * q).collect();
        let py: f64 = joint.iter().sum();
        if py <= 0.0 {
            continue;
        }
        let log_a = if alpha.is_infinite() {
            joint.iter().copied().fold(0.0, f64::max).ln()
        } else {
            let a = alpha.value();
            log_sum_exp(joint.iter().filter(|&&j| j > 0.0).map(|j| a * j.ln())) / a
        };
        terms.push((py.ln(), log_a - log_norm));
    }
    let outer = if alpha.is_infinite() {
        1.0
    } else {
        let a = alpha.value();
        a / (a - 1.0)
    };
    if beta == f64::INFINITY {
        let m = terms
            .iter()
            .map(|(lp, la)| la - lp)
            .fold(f64::NEG_INFINITY, f64::max);
        return Ok(outer * m);
    }
    let lse = log_sum_exp(terms.iter().map(|(lp, la)| (1.0 - beta) * lp + beta * la));
    Ok(outer / beta * lse)
}

/// `ln f⁻¹(Σ_y max_x C_{x,y})` for a mean with multiplicative inverse.
pub fn multiplicative_f_capacity(channel: &Channel, f: &FMean) -> Result<f64> {
    f.require_prior_valid()?;
    if !f.inverse_is_multiplicative() {
        return Err(QifError::NotMultiplicative(f.id().to_owned()));
    }
    let s: f64 = (0..channel.n_outputs()).map(|y| column_max(channel, y)).sum();
    Ok(f.inverse(s)?.ln())
}

/// Upper bound on the generalized max-case capacity:
/// `ln max_y f⁻¹(max_x C / min_x C)` for increasing `f⁻¹`, and the ratio
/// inverted for decreasing `f⁻¹`.
pub fn max_case_capacity_bound(channel: &Channel, f: &FMean) -> Result<f64> {
    f.require_prior_valid()?;
    if !f.inverse_is_multiplicative() {
        return Err(QifError::NotMultiplicative(f.id().to_owned()));
    }
    let mut best = f64::NEG_INFINITY;
    for y in 0..channel.n_outputs() {
        let hi = column_max(channel, y);
        if hi == 0.0 {
            continue;
        }
        let lo = channel.column(y).fold(f64::INFINITY, f64::min);
        let ratio = match f.direction() {
            Direction::Increasing => {
                if lo == 0.0 {
                    f64::INFINITY
                } else {
                    hi / lo
                }
            }
            Direction::Decreasing => lo / hi,
        };
        best = best.max(f.inverse(ratio)?);
    }
    Ok(best.ln())
}

/// Maximal α-leakage: `sup_π` of the Arimoto mutual information.
pub fn maximal_alpha_leakage(
    channel: &Channel,
    alpha: AlphaOrder,
    cfg: &SimplexOptimizerConfig,
) -> Result<SupResult> {
    sup_over_prior(
        channel.n_inputs(),
        |pi| Ok(arimoto_mi(&push(pi, channel)?, alpha)),
        cfg,
    )
}

/// `sup_π` of the Sibson mutual information.
pub fn maximal_sibson(
    channel: &Channel,
    alpha: AlphaOrder,
    cfg: &SimplexOptimizerConfig,
) -> Result<SupResult> {
    sup_over_prior(channel.n_inputs(), |pi| sibson_mi(pi, channel, alpha), cfg)
}

/// `sup_π` of [`alpha_beta_leakage`].
pub fn alpha_beta_capacity(
    channel: &Channel,
    alpha: AlphaOrder,
    beta: f64,
    cfg: &SimplexOptimizerConfig,
) -> Result<SupResult> {
    alpha_beta_leakage(&Prior::uniform(channel.n_inputs())?, channel, alpha, beta)?;
    sup_over_prior(
        channel.n_inputs(),
        |pi| alpha_beta_leakage(pi, channel, alpha, beta),
        cfg,
    )
}

/// `sup_π` of the generalized multiplicative leakage.
pub fn gen_leakage_capacity(
    channel: &Channel,
    g: &GainSpec,
    f: &FMean,
    h: &FMean,
    cfg: &SimplexOptimizerConfig,
) -> Result<SupResult> {
    sup_over_prior(
        channel.n_inputs(),
        |pi| gen_leakage(pi, channel, g, f, h, LeakageKind::Multiplicative),
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fmean::f_alpha;
    use crate::prob::ni_channel;

    fn a(v: f64) -> AlphaOrder {
        AlphaOrder::new(v).unwrap()
    }

    fn bsc() -> Channel {
        Channel::binary_symmetric(0.1).unwrap()
    }

    #[test]
    fn bayes_capacity_examples() {
        for n in 1..5 {
            let v = bayes_capacity(&Channel::identity(n).unwrap());
            assert!((v - (n as f64).ln()).abs() < 1e-15);
        }
        assert_eq!(bayes_capacity(&ni_channel(3).unwrap()), 0.0);
        assert!((bayes_capacity(&bsc()) - 1.8f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn ldp_examples() {
        assert_eq!(ldp_leakage(&ni_channel(2).unwrap()), 0.0);
        assert_eq!(ldp_leakage(&Channel::identity(2).unwrap()), f64::INFINITY);
        assert!((ldp_leakage(&bsc()) - 9f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn renyi_ldp_examples() {
        assert_eq!(renyi_ldp(&ni_channel(2).unwrap(), a(2.0)).unwrap(), 0.0);
        assert!((renyi_ldp(&bsc(), AlphaOrder::infinity()).unwrap() - 9f64.ln()).abs() < 1e-15);
        let expected = (0.81f64 / 0.1 + 0.01 / 0.9).ln();
        assert!((renyi_ldp(&bsc(), a(2.0)).unwrap() - expected).abs() < 1e-12);
        assert!(renyi_ldp(&bsc(), a(1.0)).is_err());
    }

    #[test]
    fn alpha_beta_beta_one_is_arimoto() {
        let pi = Prior::new(vec![0.2, 0.5, 0.3]).unwrap();
        let c = Channel::new(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.6, 0.3], vec![0.3, 0.3, 0.4]])
            .unwrap();
        let h = push(&pi, &c).unwrap();
        for &al in &[1.5, 2.0, 10.0, f64::INFINITY] {
            let v = alpha_beta_leakage(&pi, &c, a(al), 1.0).unwrap();
            assert!((v - arimoto_mi(&h, a(al))).abs() < 1e-12, "alpha {al}");
        }
        assert!(alpha_beta_leakage(&pi, &ni_channel(3).unwrap(), a(2.0), 3.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn alpha_beta_limits_match_large_parameters() {
        let pi = Prior::new(vec![0.2, 0.5, 0.3]).unwrap();
        let c = Channel::new(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.6, 0.3], vec![0.3, 0.3, 0.4]])
            .unwrap();
        let v_inf_beta = alpha_beta_leakage(&pi, &c, a(3.0), f64::INFINITY).unwrap();
        let v_big_beta = alpha_beta_leakage(&pi, &c, a(3.0), 1e6).unwrap();
        assert!((v_inf_beta - v_big_beta).abs() < 1e-4);
        let v_inf_alpha = alpha_beta_leakage(&pi, &c, AlphaOrder::infinity(), 2.0).unwrap();
        let v_big_alpha = alpha_beta_leakage(&pi, &c, a(1e6), 2.0).unwrap();
        assert!((v_inf_alpha - v_big_alpha).abs() < 1e-4);
        let both = alpha_beta_leakage(&pi, &c, AlphaOrder::infinity(), f64::INFINITY).unwrap();
        let big = alpha_beta_leakage(&pi, &c, a(1e6), 1e6).unwrap();
        assert!((both - big).abs() < 1e-3);
    }

    #[test]
    fn multiplicative_capacity_examples() {
        let c = bsc();
        assert_eq!(
            multiplicative_f_capacity(&c, &FMean::identity()).unwrap(),
            bayes_capacity(&c)
        );
        let sq: FMean = "inv-pow:2".parse().unwrap();
        let v = multiplicative_f_capacity(&c, &sq).unwrap();
        assert!((v - 2.0 * 1.8f64.ln()).abs() < 1e-12);
        assert!(multiplicative_f_capacity(&ni_channel(2).unwrap(), &sq).unwrap().abs() < 1e-15);
        assert!(multiplicative_f_capacity(&c, &FMean::log()).is_err());
    }

    #[test]
    fn max_case_bound_examples() {
        let c = bsc();
        assert!((max_case_capacity_bound(&c, &FMean::identity()).unwrap() - ldp_leakage(&c)).abs() < 1e-15);
        let sq: FMean = "inv-pow:2".parse().unwrap();
        assert!((max_case_capacity_bound(&c, &sq).unwrap() - 2.0 * 9f64.ln()).abs() < 1e-12);
        assert_eq!(max_case_capacity_bound(&ni_channel(3).unwrap(), &sq).unwrap(), 0.0);
        let dec = f_alpha(a(0.5));
        assert!((max_case_capacity_bound(&c, &dec).unwrap() - 9f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn sup_examples() {
        let cfg = SimplexOptimizerConfig::default();
        let id = Channel::identity(2).unwrap();
        let r = maximal_alpha_leakage(&id, a(2.0), &cfg).unwrap();
        assert!((r.value - 2f64.ln()).abs() < 1e-9);
        assert!((r.witness.get(0) - 0.5).abs() < 1e-4);
        let r = sup_over_prior(3, |_| Ok(0.0), &cfg).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.diagnostics.best_source, Source::Uniform);
    }

    #[test]
    fn sup_is_reproducible() {
        let c = Channel::new(vec![vec![0.6, 0.3, 0.1], vec![0.2, 0.2, 0.6], vec![0.1, 0.8, 0.1], vec![0.25, 0.25, 0.5]])
            .unwrap();
        let cfg = SimplexOptimizerConfig {
            seed: 11,
            ..Default::default()
        };
        let r1 = maximal_sibson(&c, a(2.0), &cfg).unwrap();
        let r2 = maximal_sibson(&c, a(2.0), &cfg).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn arimoto_and_sibson_share_supremum() {
        let c = Channel::new(vec![vec![0.6, 0.3, 0.1], vec![0.2, 0.2, 0.6], vec![0.1, 0.8, 0.1]])
            .unwrap();
        let cfg = SimplexOptimizerConfig::default();
        for &al in &[0.5, 2.0, 5.0] {
            let ari = maximal_alpha_leakage(&c, a(al), &cfg).unwrap().value;
            let sib = maximal_sibson(&c, a(al), &cfg).unwrap().value;
            assert!((ari - sib).abs() < 1e-6, "alpha {al}: {ari} vs {sib}");
        }
    }

    #[test]
    fn config_validation() {
        let bad = SimplexOptimizerConfig {
            restarts: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SimplexOptimizerConfig {
            ascent_tolerance: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
