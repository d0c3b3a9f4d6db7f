//! Closed-form α-family measures.
//!
//! Every function branches on [`AlphaBranch`] so that `α ∈ {0, 1, ∞}` never
//! reach the generic formula with its removable singularities. Results are
//! in nats.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{QifError, Result};
use crate::fmean::ell_alpha;
use crate::num::{ln0, log_power_sum, log_sum_exp};
use crate::prob::{Channel, Hyper, Prior};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaBranch {
    Zero,
    /// `(0, 1)`
    OpenUnit,
    One,
    /// `(1, ∞)`
    FiniteGt1,
    Infinity,
}

/// An order `α ∈ [0, ∞]` with an exact branch tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaOrder {
    value: f64,
    branch: AlphaBranch,
}

impl AlphaOrder {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 0.0 {
            return Err(QifError::OutOfRange {
                name: "alpha",
                value,
                allowed: "[0, inf]",
            });
        }
        let branch = if value == 0.0 {
            AlphaBranch::Zero
        } else if value < 1.0 {
            AlphaBranch::OpenUnit
        } else if value == 1.0 {
            AlphaBranch::One
        } else if value.is_finite() {
            AlphaBranch::FiniteGt1
        } else {
            AlphaBranch::Infinity
        };
        Ok(Self { value, branch })
    }

    pub fn zero() -> Self {
        Self {
            value: 0.0,
            branch: AlphaBranch::Zero,
        }
    }

    pub fn one() -> Self {
        Self {
            value: 1.0,
            branch: AlphaBranch::One,
        }
    }

    pub fn infinity() -> Self {
        Self {
            value: f64::INFINITY,
            branch: AlphaBranch::Infinity,
        }
    }

    pub fn value(self) -> f64 {
        self.value
    }

    pub fn branch(self) -> AlphaBranch {
        self.branch
    }

    pub fn is_infinite(self) -> bool {
        self.branch == AlphaBranch::Infinity
    }

    fn require_positive(self) -> Result<()> {
        if self.branch == AlphaBranch::Zero {
            Err(QifError::OutOfRange {
                name: "alpha",
                value: 0.0,
                allowed: "(0, inf]",
            })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for AlphaOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.value)
        }
    }
}

impl Serialize for AlphaOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.value)
        }
    }
}

impl std::str::FromStr for AlphaOrder {
    type Err = QifError;

    fn from_str(s: &str) -> Result<Self> {
        let v = crate::fmean::parse_extended(s)
            .ok_or_else(|| QifError::Parse(format!("invalid alpha `{s}`")))?;
        AlphaOrder::new(v)
    }
}

fn check_dims(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(QifError::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}

fn shannon(p: &[f64]) -> f64 {
    -p.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum::<f64>()
}

/// Rényi entropy `H_α(π)`.
pub fn renyi_entropy(pi: &Prior, alpha: AlphaOrder) -> f64 {
    let p = pi.probs();
    match alpha.branch() {
        AlphaBranch::Zero => (pi.support_size() as f64).ln(),
        AlphaBranch::One => shannon(p),
        AlphaBranch::Infinity => -pi.max().ln(),
        _ => {
            let a = alpha.value();
            log_power_sum(p, a) / (1.0 - a)
        }
    }
}

/// Rényi divergence `D_α(μ‖π)` on raw slices. Terms with `μ_x = 0` vanish;
/// `μ_x > 0 = π_x` gives `+∞` for every `α > 0`.
pub(crate) fn divergence(mu: &[f64], pi: &[f64], alpha: AlphaOrder) -> f64 {
    let pairs: Vec<(f64, f64)> = mu
        .iter()
        .zip(pi)
        .filter(|(&m, _)| m > 0.0)
        .map(|(&m, &p)| (m, p))
        .collect();
    if alpha.branch() == AlphaBranch::Zero {
        let mass: f64 = pairs.iter().map(|q| q.1).sum();
        return -ln0(mass);
    }
    if pairs.iter().any(|q| q.1 <= 0.0) {
        return f64::INFINITY;
    }
    match alpha.branch() {
        AlphaBranch::One => pairs.iter().map(|(m, p)| m * (m / p).ln()).sum(),
        AlphaBranch::Infinity => pairs
            .iter()
            .map(|(m, p)| (m / p).ln())
            .fold(f64::NEG_INFINITY, f64::max),
        _ => {
            let a = alpha.value();
            let lse = log_sum_exp(pairs.iter().map(|(m, p)| a * m.ln() + (1.0 - a) * p.ln()));
            lse / (a - 1.0)
        }
    }
}

/// Rényi divergence `D_α(μ‖π)`; `+∞` when the support of `μ` is not
/// contained in that of `π`.
pub fn renyi_divergence(mu: &Prior, pi: &Prior, alpha: AlphaOrder) -> Result<f64> {
    check_dims("divergence arguments", pi.len(), mu.len())?;
    Ok(divergence(mu.probs(), pi.probs(), alpha))
}

/// Arimoto conditional entropy `H_α(X|Y)` of a hyper.
pub fn arimoto_conditional_entropy(hyper: &Hyper, alpha: AlphaOrder) -> f64 {
    match alpha.branch() {
        AlphaBranch::Zero => hyper
            .inners()
            .iter()
            .map(|d| (d.support_size() as f64).ln())
            .fold(0.0, f64::max),
        AlphaBranch::One => hyper.iter().map(|(p, d)| p * shannon(d.probs())).sum(),
        AlphaBranch::Infinity => -hyper.iter().map(|(p, d)| p * d.max()).sum::<f64>().ln(),
        _ => {
            let a = alpha.value();
            let lse = log_sum_exp(
                hyper
                    .iter()
                    .map(|(p, d)| p.ln() + log_power_sum(d.probs(), a) / a),
            );
            a / (1.0 - a) * lse
        }
    }
}

/// Arimoto mutual information `H_α(π) − H_α(X|Y)`.
pub fn arimoto_mi(hyper: &Hyper, alpha: AlphaOrder) -> f64 {
    renyi_entropy(hyper.prior(), alpha) - arimoto_conditional_entropy(hyper, alpha)
}

/// Sibson mutual information of order `α`.
pub fn sibson_mi(pi: &Prior, channel: &Channel, alpha: AlphaOrder) -> Result<f64> {
    check_dims("prior vs channel rows", channel.n_inputs(), pi.len())?;
    let p = pi.probs();
    let cols = 0..channel.n_outputs();
    Ok(match alpha.branch() {
        AlphaBranch::Zero => {
            let best = cols
                .map(|y| {
                    channel
                        .column(y)
                        .zip(p)
                        .filter(|(c, _)| *c > 0.0)
                        .map(|(_, q)| q)
                        .sum::<f64>()
                })
                .fold(0.0, f64::max);
            -best.ln()
        }
        AlphaBranch::One => {
            let mut total = 0.0;
            for y in cols {
                let py: f64 = channel.column(y).zip(p).map(|(c, q)| c * q).sum();
                for (c, q) in channel.column(y).zip(p) {
                    if c > 0.0 && *q > 0.0 {
                        total += q * c * (c / py).ln();
                    }
                }
            }
            total
        }
        AlphaBranch::Infinity => cols
            .map(|y| {
                channel
                    .column(y)
                    .zip(p)
                    .filter(|(_, q)| **q > 0.0)
                    .map(|(c, _)| c)
                    .fold(0.0, f64::max)
            })
            .sum::<f64>()
            .ln(),
        _ => {
            let a = alpha.value();
            let lse = log_sum_exp(cols.map(|y| {
                log_sum_exp(
                    channel
                        .column(y)
                        .zip(p)
                        .filter(|(c, q)| *c > 0.0 && **q > 0.0)
                        .map(|(c, q)| q.ln() + a * c.ln()),
                ) / a
            }));
            a / (a - 1.0) * lse
        }
    })
}

/// α-loss of assigning probability `p_hat` to the realized secret.
pub fn alpha_loss(p_hat: f64, alpha: AlphaOrder) -> Result<f64> {
    alpha.require_positive()?;
    if !(0.0..=1.0).contains(&p_hat) {
        return Err(QifError::OutOfRange {
            name: "p_hat",
            value: p_hat,
            allowed: "[0, 1]",
        });
    }
    Ok(match alpha.branch() {
        AlphaBranch::One => -ln0(p_hat),
        AlphaBranch::Infinity => 1.0 - p_hat,
        _ => {
            let a = alpha.value();
            let e = (a - 1.0) / a;
            let pow = if p_hat == 0.0 {
                if e > 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                p_hat.powf(e)
            };
            a / (a - 1.0) * (1.0 - pow)
        }
    })
}

/// Expected α-loss `Σ_x π_x ℓ_α(guess_x)` of a soft guess.
pub fn expected_alpha_loss(pi: &Prior, guess: &Prior, alpha: AlphaOrder) -> Result<f64> {
    check_dims("guess", pi.len(), guess.len())?;
    let mut total = 0.0;
    for (&p, &g) in pi.probs().iter().zip(guess.probs()) {
        if p > 0.0 {
            total += p * alpha_loss(g, alpha)?;
        }
    }
    Ok(total)
}

/// Minimum expected α-loss and its minimizer `π^α / Σ π^α`.
pub fn min_expected_alpha_loss(pi: &Prior, alpha: AlphaOrder) -> Result<(f64, Prior)> {
    alpha.require_positive()?;
    let p = pi.probs();
    Ok(match alpha.branch() {
        AlphaBranch::One => (shannon(p), pi.clone()),
        AlphaBranch::Infinity => {
            let m = pi.max();
            let tilt = p.iter().map(|&v| if v == m { 1.0 } else { 0.0 }).collect();
            (1.0 - m, Prior::from_weights(tilt))
        }
        _ => {
            let a = alpha.value();
            let h = renyi_entropy(pi, alpha);
            let value = a / (a - 1.0) * (1.0 - ((1.0 - a) / a * h).exp());
            (value, tilted(p, a))
        }
    })
}

/// `π^α / Σ π^α`, computed in scaled form.
pub(crate) fn tilted(p: &[f64], a: f64) -> Prior {
    let m = p.iter().copied().fold(0.0, f64::max);
    Prior::from_weights(
        p.iter()
            .map(|&v| if v > 0.0 { (v / m).powf(a) } else { 0.0 })
            .collect(),
    )
}

/// Pointwise α-leakage of observing a posterior `delta`: `D_α(δ‖π)`.
pub fn pointwise_alpha_leakage(pi: &Prior, delta: &Prior, alpha: AlphaOrder) -> Result<f64> {
    renyi_divergence(delta, pi, alpha)
}

/// `ℓ_α`-average of the pointwise α-leakages of a hyper built from `pi`.
pub fn sibson_via_pointwise(hyper: &Hyper, pi: &Prior, alpha: AlphaOrder) -> Result<f64> {
    check_dims("hyper prior", pi.len(), hyper.prior().len())?;
    let d: Vec<f64> = hyper
        .inners()
        .iter()
        .map(|delta| divergence(delta.probs(), pi.probs(), alpha))
        .collect();
    ell_alpha(alpha).mean(hyper.outer(), &d)
}
