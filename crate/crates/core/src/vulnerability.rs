//! Classical and generalized vulnerabilities and leakages.
//!
//! The generalized prior vulnerability is
//! `V_{f,g}(π) = sup_w f⁻¹(Σ_x π_x f(g(w, x)))`. Finite action sets are
//! enumerated; soft-guess gains use the closed-form optimal guess when `f` is
//! recognized as `f_α` (or `ℓ_α` for the pointwise information gain) and a
//! multi-start projected ascent otherwise.

use serde::Serialize;

use crate::alpha::{divergence, tilted, AlphaBranch, AlphaOrder};
use crate::error::{QifError, Result};
use crate::fmean::{Direction, FMean};
use crate::gain::GainSpec;
use crate::num::argmax_lowest;
use crate::prob::{push, Channel, Hyper, Prior};
use crate::simplex::{ascend, dirichlet_uniform, instance_rng, AscentConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Index of the optimal action (lowest index on ties).
    Action(usize),
    /// Optimal soft guess.
    Guess(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Enumeration,
    ClosedForm,
    Ascent,
}

/// Optimal value of a vulnerability together with the action attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optimum {
    pub value: f64,
    pub witness: Witness,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LeakageKind {
    Additive,
    Multiplicative,
}

fn check_negative(v: f64) -> Result<f64> {
    if v < 0.0 {
        Err(QifError::NegativeVulnerability(v))
    } else {
        Ok(v)
    }
}

fn point_mass(n: usize, x: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[x] = 1.0;
    v
}

/// Classical prior g-vulnerability with its witness.
pub fn prior_vulnerability_opt(pi: &Prior, g: &GainSpec) -> Result<Optimum> {
    g.check_secrets(pi.len())?;
    let p = pi.probs();
    if let Some(m) = g.finite_rows(pi.len()) {
        let values: Vec<f64> = m
            .rows()
            .map(|row| row.iter().zip(p).map(|(g, q)| g * q).sum())
            .collect();
        let w = argmax_lowest(&values);
        return Ok(Optimum {
            value: check_negative(values[w])?,
            witness: Witness::Action(w),
            method: Method::Enumeration,
        });
    }
    match g {
        GainSpec::Simplex => {
            let x = argmax_lowest(p);
            Ok(Optimum {
                value: p[x],
                witness: Witness::Guess(point_mass(p.len(), x)),
                method: Method::ClosedForm,
            })
        }
        GainSpec::PointwiseInfo(reference) => Ok(Optimum {
            value: divergence(p, reference.probs(), AlphaOrder::one()),
            witness: Witness::Guess(p.to_vec()),
            method: Method::ClosedForm,
        }),
        _ => unreachable!("finite gains handled above"),
    }
}

/// Classical prior g-vulnerability `max_w Σ_x π_x g(w, x)`.
pub fn prior_vulnerability(pi: &Prior, g: &GainSpec) -> Result<f64> {
    prior_vulnerability_opt(pi, g).map(|o| o.value)
}

/// `Σ_y p(y) V_g(δ^y)`
pub fn posterior_vulnerability_avg(hyper: &Hyper, g: &GainSpec) -> Result<f64> {
    let mut total = 0.0;
    for (p, d) in hyper.iter() {
        total += p * prior_vulnerability(d, g)?;
    }
    Ok(total)
}

/// `max_y V_g(δ^y)`
pub fn posterior_vulnerability_max(hyper: &Hyper, g: &GainSpec) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for d in hyper.inners() {
        best = best.max(prior_vulnerability(d, g)?);
    }
    Ok(best)
}

/// Optimal soft guess for the simplex gain under `f_α`.
fn simplex_witness(p: &[f64], alpha: AlphaOrder) -> Vec<f64> {
    match alpha.branch() {
        AlphaBranch::Zero => {
            let k = p.iter().filter(|&&v| v > 0.0).count() as f64;
            p.iter().map(|&v| if v > 0.0 { 1.0 / k } else { 0.0 }).collect()
        }
        AlphaBranch::One => p.to_vec(),
        AlphaBranch::Infinity => point_mass(p.len(), argmax_lowest(p)),
        _ => tilted(p, alpha.value()).probs().to_vec(),
    }
}

/// Optimal soft guess for the pointwise information gain under `ℓ_α`:
/// `w ∝ δ^α π^{1−α}` on the support of `δ`.
fn pointwise_witness(delta: &[f64], reference: &[f64], alpha: AlphaOrder) -> Vec<f64> {
    let support = delta.iter().zip(reference).map(|(&d, _)| d > 0.0);
    let w: Vec<f64> = match alpha.branch() {
        AlphaBranch::Zero => support
            .zip(reference)
            .map(|(s, &r)| if s { r } else { 0.0 })
            .collect(),
        AlphaBranch::One => delta.to_vec(),
        AlphaBranch::Infinity => {
            let ratios: Vec<f64> = delta
                .iter()
                .zip(reference)
                .map(|(&d, &r)| if d > 0.0 { d / r } else { f64::NEG_INFINITY })
                .collect();
            point_mass(delta.len(), argmax_lowest(&ratios))
        }
        _ => {
            let a = alpha.value();
            let logs: Vec<f64> = delta
                .iter()
                .zip(reference)
                .map(|(&d, &r)| {
                    if d > 0.0 {
                        a * d.ln() + (1.0 - a) * r.ln()
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .collect();
            let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            logs.iter().map(|l| (l - m).exp()).collect()
        }
    };
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

fn pointwise_gains(w: &[f64], reference: &[f64]) -> Vec<f64> {
    w.iter()
        .zip(reference)
        .map(|(&w, &r)| {
            if w == 0.0 {
                f64::NEG_INFINITY
            } else {
                (w / r).ln()
            }
        })
        .collect()
}

fn soft_objective(p: &[f64], g: &GainSpec, f: &FMean, w: &[f64]) -> Result<f64> {
    match g {
        GainSpec::Simplex => f.mean(p, w),
        GainSpec::PointwiseInfo(r) => f.mean(p, &pointwise_gains(w, r.probs())),
        _ => unreachable!("soft gains only"),
    }
}

/// Multi-start projected ascent over soft guesses, for means without a
/// closed-form optimum.
fn soft_ascent(p: &[f64], g: &GainSpec, f: &FMean) -> Result<Optimum> {
    let n = p.len();
    let mut starts = vec![vec![1.0 / n as f64; n], p.to_vec()];
    for x in 0..n {
        starts.push(point_mass(n, x));
    }
    let mut rng = instance_rng(0, 0);
    for _ in 0..8 {
        starts.push(dirichlet_uniform(&mut rng, n));
    }
    let cfg = AscentConfig::default();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for s in starts {
        let out = ascend(&s, |w| soft_objective(p, g, f, w), &cfg)?;
        if best.as_ref().map_or(true, |b| out.value > b.0) {
            best = Some((out.value, out.point));
        }
    }
    let (value, w) = best.expect("at least one start");
    Ok(Optimum {
        value,
        witness: Witness::Guess(w),
        method: Method::Ascent,
    })
}

fn gen_prior_unvalidated(pi: &Prior, g: &GainSpec, f: &FMean) -> Result<Optimum> {
    if f.is_affine() {
        return prior_vulnerability_opt(pi, g);
    }
    g.check_secrets(pi.len())?;
    let p = pi.probs();
    if let Some(m) = g.finite_rows(pi.len()) {
        let values = m.rows().map(|row| f.mean(p, row)).collect::<Result<Vec<_>>>()?;
        let w = argmax_lowest(&values);
        return Ok(Optimum {
            value: check_negative(values[w])?,
            witness: Witness::Action(w),
            method: Method::Enumeration,
        });
    }
    match g {
        GainSpec::Simplex => match f.alpha_order() {
            Some(alpha) => {
                let w = simplex_witness(p, alpha);
                Ok(Optimum {
                    value: f.mean(p, &w)?,
                    witness: Witness::Guess(w),
                    method: Method::ClosedForm,
                })
            }
            None => soft_ascent(p, g, f),
        },
        GainSpec::PointwiseInfo(reference) => {
            let r = reference.probs();
            if p.iter().zip(r).any(|(&d, &q)| d > 0.0 && q == 0.0) {
                return Ok(Optimum {
                    value: f64::INFINITY,
                    witness: Witness::Guess(p.to_vec()),
                    method: Method::ClosedForm,
                });
            }
            match f.ell_order() {
                Some(alpha) => {
                    let w = pointwise_witness(p, r, alpha);
                    Ok(Optimum {
                        value: f.mean(p, &pointwise_gains(&w, r))?,
                        witness: Witness::Guess(w),
                        method: Method::ClosedForm,
                    })
                }
                None => soft_ascent(p, g, f),
            }
        }
        _ => unreachable!("finite gains handled above"),
    }
}

/// The pointwise information gain under `ℓ_α` is its own optimization
/// (a Rényi divergence), so the convex-inverse requirement does not apply.
fn require_valid(g: &GainSpec, f: &FMean) -> Result<()> {
    if matches!(g, GainSpec::PointwiseInfo(_)) && f.ell_order().is_some() {
        return Ok(());
    }
    f.require_prior_valid()
}

/// Generalized prior vulnerability with its witness.
pub fn gen_prior_vulnerability_opt(pi: &Prior, g: &GainSpec, f: &FMean) -> Result<Optimum> {
    require_valid(g, f)?;
    gen_prior_unvalidated(pi, g, f)
}

/// Generalized prior vulnerability `V_{f,g}(π)`.
pub fn gen_prior_vulnerability(pi: &Prior, g: &GainSpec, f: &FMean) -> Result<f64> {
    gen_prior_vulnerability_opt(pi, g, f).map(|o| o.value)
}

/// Optimal `V_{f,g}(δ^y)` for every retained output.
pub fn posterior_optima(hyper: &Hyper, g: &GainSpec, f: &FMean) -> Result<Vec<Optimum>> {
    require_valid(g, f)?;
    hyper
        .inners()
        .iter()
        .map(|d| gen_prior_unvalidated(d, g, f))
        .collect()
}

/// `opt_w Σ_x δ_x f(g(w, x))`, sup for increasing `f⁻¹` and inf otherwise.
fn f_space_optimum(delta: &Prior, g: &GainSpec, f: &FMean, opt: &Optimum) -> Result<f64> {
    let p = delta.probs();
    let raw = |vals: &[f64]| -> Result<f64> {
        let mut s = 0.0;
        for (&q, &v) in p.iter().zip(vals) {
            if q > 0.0 {
                s += q * f.forward(v)?;
            }
        }
        Ok(s)
    };
    if let Some(m) = g.finite_rows(delta.len()) {
        let sums = m.rows().map(raw).collect::<Result<Vec<_>>>()?;
        let pick = match f.direction() {
            Direction::Increasing => sums.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Direction::Decreasing => sums.iter().copied().fold(f64::INFINITY, f64::min),
        };
        return Ok(pick);
    }
    let Witness::Guess(w) = &opt.witness else {
        unreachable!("soft gains yield guesses")
    };
    match g {
        GainSpec::Simplex => raw(w),
        GainSpec::PointwiseInfo(r) => raw(&pointwise_gains(w, r.probs())),
        _ => unreachable!("finite gains handled above"),
    }
}

fn gen_posterior_avg_impl(
    hyper: &Hyper,
    g: &GainSpec,
    f: &FMean,
    h: &FMean,
    check_h: bool,
) -> Result<f64> {
    let optima = posterior_optima(hyper, g, f)?;
    let values: Vec<f64> = optima.iter().map(|o| o.value).collect();
    if h.same_mean(f) {
        if f.is_limit() || f.is_affine() {
            return f.mean(hyper.outer(), &values);
        }
        let mut s = 0.0;
        for ((p, d), o) in hyper.iter().zip(&optima) {
            s += p * f_space_optimum(d, g, f, o)?;
        }
        return f.inverse(s);
    }
    if check_h {
        h.require_posterior_valid()?;
    }
    h.mean(hyper.outer(), &values)
}

/// Generalized average posterior vulnerability
/// `h⁻¹(Σ_y p(y) h(V_{f,g}(δ^y)))`.
///
/// When `h` induces the same mean as `f`, the optimization is moved inside
/// the mean: `f⁻¹(Σ_y p(y) opt_w Σ_x δ^y_x f(g(w, x)))`.
pub fn gen_posterior_vulnerability_avg(
    hyper: &Hyper,
    g: &GainSpec,
    f: &FMean,
    h: &FMean,
) -> Result<f64> {
    gen_posterior_avg_impl(hyper, g, f, h, true)
}

/// Same as [`gen_posterior_vulnerability_avg`] without the class check on
/// `h`; used to build negative controls.
pub(crate) fn gen_posterior_vulnerability_avg_unchecked(
    hyper: &Hyper,
    g: &GainSpec,
    f: &FMean,
    h: &FMean,
) -> Result<f64> {
    gen_posterior_avg_impl(hyper, g, f, h, false)
}

/// `max_y V_{f,g}(δ^y)`
pub fn gen_posterior_vulnerability_max(hyper: &Hyper, g: &GainSpec, f: &FMean) -> Result<f64> {
    let optima = posterior_optima(hyper, g, f)?;
    Ok(optima
        .iter()
        .map(|o| o.value)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Additive (`post − prior`) or multiplicative (`ln(post / prior)`) leakage.
/// A zero prior vulnerability gives `+∞` multiplicative leakage.
pub fn leakage(prior_v: f64, post_v: f64, kind: LeakageKind) -> Result<f64> {
    match kind {
        LeakageKind::Additive => Ok(post_v - prior_v),
        LeakageKind::Multiplicative => {
            if prior_v < 0.0 || post_v < 0.0 {
                return Err(QifError::NegativeVulnerability(prior_v.min(post_v)));
            }
            if prior_v == 0.0 {
                return Ok(f64::INFINITY);
            }
            Ok((post_v / prior_v).ln())
        }
    }
}

/// Generalized average-case leakage of `C` under prior `π`.
pub fn gen_leakage(
    pi: &Prior,
    channel: &Channel,
    g: &GainSpec,
    f: &FMean,
    h: &FMean,
    kind: LeakageKind,
) -> Result<f64> {
    let hyper = push(pi, channel)?;
    let prior_v = gen_prior_vulnerability(pi, g, f)?;
    let post_v = gen_posterior_vulnerability_avg(&hyper, g, f, h)?;
    leakage(prior_v, post_v, kind)
}

/// Generalized max-case leakage of `C` under prior `π`.
pub fn gen_max_leakage(
    pi: &Prior,
    channel: &Channel,
    g: &GainSpec,
    f: &FMean,
    kind: LeakageKind,
) -> Result<f64> {
    let hyper = push(pi, channel)?;
    let prior_v = gen_prior_vulnerability(pi, g, f)?;
    let post_v = gen_posterior_vulnerability_max(&hyper, g, f)?;
    leakage(prior_v, post_v, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::{arimoto_conditional_entropy, renyi_divergence, renyi_entropy};
    use crate::fmean::{ell_alpha, f_alpha};
    use crate::prob::ni_channel;

    fn a(v: f64) -> AlphaOrder {
        AlphaOrder::new(v).unwrap()
    }

    fn p(v: &[f64]) -> Prior {
        Prior::new(v.to_vec()).unwrap()
    }

    fn bsc_uniform() -> Hyper {
        push(&Prior::uniform(2).unwrap(), &Channel::binary_symmetric(0.1).unwrap()).unwrap()
    }

    #[test]
    fn prior_vulnerability_examples() {
        for n in 1..6 {
            let v = prior_vulnerability(&Prior::uniform(n).unwrap(), &GainSpec::Identity).unwrap();
            assert!((v - 1.0 / n as f64).abs() < 1e-15);
        }
        let v = prior_vulnerability(&p(&[0.7, 0.3]), &GainSpec::Identity).unwrap();
        assert_eq!(v, 0.7);
        let g = GainSpec::matrix(vec![vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let o = prior_vulnerability_opt(&p(&[0.5, 0.5]), &g).unwrap();
        assert_eq!(o.value, 1.0);
        assert_eq!(o.witness, Witness::Action(0));
        let o = prior_vulnerability_opt(&p(&[0.2, 0.8]), &GainSpec::Simplex).unwrap();
        assert_eq!(o.witness, Witness::Guess(vec![0.0, 1.0]));
    }

    #[test]
    fn negative_vulnerability_rejected() {
        let g = GainSpec::matrix(vec![vec![1.0, -5.0]]).unwrap();
        assert!(matches!(
            prior_vulnerability(&p(&[0.5, 0.5]), &g),
            Err(QifError::NegativeVulnerability(_))
        ));
    }

    #[test]
    fn posterior_examples() {
        let id = push(&Prior::uniform(2).unwrap(), &Channel::identity(2).unwrap()).unwrap();
        assert_eq!(posterior_vulnerability_avg(&id, &GainSpec::Identity).unwrap(), 1.0);
        assert_eq!(posterior_vulnerability_max(&id, &GainSpec::Identity).unwrap(), 1.0);
        let pi = p(&[0.2, 0.5, 0.3]);
        let ni = push(&pi, &ni_channel(3).unwrap()).unwrap();
        let g = GainSpec::matrix(vec![vec![1.0, 0.5, 0.0], vec![0.0, 0.2, 1.0]]).unwrap();
        let v = prior_vulnerability(&pi, &g).unwrap();
        assert!((posterior_vulnerability_avg(&ni, &g).unwrap() - v).abs() < 1e-15);
        assert!((posterior_vulnerability_max(&ni, &g).unwrap() - v).abs() < 1e-15);
        let h = bsc_uniform();
        assert!((posterior_vulnerability_avg(&h, &GainSpec::Identity).unwrap() - 0.9).abs() < 1e-15);
        assert!((posterior_vulnerability_max(&h, &GainSpec::Identity).unwrap() - 0.9).abs() < 1e-15);
    }

    #[test]
    fn gen_prior_examples() {
        let g = GainSpec::matrix(vec![vec![2.0, 0.0], vec![0.3, 1.0]]).unwrap();
        let pi = p(&[0.4, 0.6]);
        assert_eq!(
            gen_prior_vulnerability(&pi, &g, &FMean::affine(3.0, -1.0).unwrap()).unwrap(),
            prior_vulnerability(&pi, &g).unwrap()
        );
        let v = gen_prior_vulnerability(&p(&[0.5, 0.5]), &GainSpec::Simplex, &f_alpha(a(2.0))).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        let inf = f_alpha(AlphaOrder::infinity());
        assert_eq!(gen_prior_vulnerability(&p(&[0.7, 0.3]), &GainSpec::Simplex, &inf).unwrap(), 0.7);
    }

    #[test]
    fn gen_prior_matches_renyi_closed_form() {
        let pi = p(&[0.1, 0.2, 0.3, 0.4]);
        for &al in &[0.0, 0.3, 1.0, 2.0, 10.0, f64::INFINITY] {
            let v = gen_prior_vulnerability(&pi, &GainSpec::Simplex, &f_alpha(a(al))).unwrap();
            let expected = (-renyi_entropy(&pi, a(al))).exp();
            assert!((v - expected).abs() < 1e-12, "alpha {al}: {v} vs {expected}");
        }
    }

    #[test]
    fn closed_form_beats_grid() {
        let pi = p(&[0.15, 0.35, 0.5]);
        for &al in &[0.5, 2.0, 5.0] {
            let f = f_alpha(a(al));
            let v = gen_prior_vulnerability(&pi, &GainSpec::Simplex, &f).unwrap();
            let grid = crate::simplex::grid_points(3, 200)
                .into_iter()
                .map(|w| f.mean(pi.probs(), &w).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(grid <= v + 1e-12);
            assert!(v - grid < 1e-2);
        }
    }

    #[test]
    fn ascent_fallback_agrees_with_closed_form() {
        // exp mean with negative rate has a convex inverse but no closed form.
        let pi = p(&[0.2, 0.3, 0.5]);
        let f = FMean::exp(-3.0).unwrap();
        let o = gen_prior_vulnerability_opt(&pi, &GainSpec::Simplex, &f).unwrap();
        assert_eq!(o.method, Method::Ascent);
        let grid = crate::simplex::grid_points(3, 200)
            .into_iter()
            .map(|w| f.mean(pi.probs(), &w).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(o.value >= grid - 1e-9);
        assert!(o.value - grid < 1e-2);
    }

    #[test]
    fn non_convex_inverse_rejected() {
        let f = FMean::power(2.0).unwrap();
        assert!(matches!(
            gen_prior_vulnerability(&p(&[0.5, 0.5]), &GainSpec::Simplex, &f),
            Err(QifError::NonConvexInverse(_))
        ));
    }

    #[test]
    fn domain_violation_reported() {
        let g = GainSpec::matrix(vec![vec![1.0, -1.0]]).unwrap();
        assert!(matches!(
            gen_prior_vulnerability(&p(&[0.5, 0.5]), &g, &f_alpha(a(2.0))),
            Err(QifError::DomainViolation { .. })
        ));
    }

    #[test]
    fn gen_posterior_examples() {
        let pi = p(&[0.3, 0.7]);
        let ni = push(&pi, &ni_channel(2).unwrap()).unwrap();
        let f = f_alpha(a(2.0));
        let (h, _) = crate::fmean::h_alpha_beta(a(2.0), 4.0).unwrap();
        let prior = gen_prior_vulnerability(&pi, &GainSpec::Simplex, &f).unwrap();
        for hm in [&f, &h, &FMean::identity()] {
            let post = gen_posterior_vulnerability_avg(&ni, &GainSpec::Simplex, &f, hm).unwrap();
            assert!((post - prior).abs() < 1e-12);
        }
        let id = push(&Prior::uniform(2).unwrap(), &Channel::identity(2).unwrap()).unwrap();
        let v = gen_posterior_vulnerability_avg(&id, &GainSpec::Simplex, &f, &f).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let inf = f_alpha(AlphaOrder::infinity());
        let v = gen_posterior_vulnerability_max(&bsc_uniform(), &GainSpec::Simplex, &inf).unwrap();
        assert!((v - 0.9).abs() < 1e-15);
    }

    #[test]
    fn collapsed_form_matches_arimoto() {
        let pi = p(&[0.2, 0.3, 0.5]);
        let c = Channel::new(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.6, 0.3], vec![0.3, 0.3, 0.4]])
            .unwrap();
        let hyper = push(&pi, &c).unwrap();
        for &al in &[0.0, 0.5, 1.0, 2.0, 7.0, f64::INFINITY] {
            let f = f_alpha(a(al));
            let v = gen_posterior_vulnerability_avg(&hyper, &GainSpec::Simplex, &f, &f).unwrap();
            let expected = (-arimoto_conditional_entropy(&hyper, a(al))).exp();
            assert!((v - expected).abs() < 1e-12, "alpha {al}: {v} vs {expected}");
        }
    }

    #[test]
    fn invalid_h_rejected() {
        let h = FMean::power(-1.0).unwrap();
        let r = gen_posterior_vulnerability_avg(&bsc_uniform(), &GainSpec::Identity, &FMean::identity(), &h);
        assert!(matches!(r, Err(QifError::InvalidMeanClass(_))));
        let ok = gen_posterior_vulnerability_avg_unchecked(
            &bsc_uniform(),
            &GainSpec::Identity,
            &FMean::identity(),
            &h,
        );
        assert!((ok.unwrap() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn pointwise_gain_recovers_divergence() {
        let reference = p(&[0.2, 0.3, 0.5]);
        let delta = p(&[0.6, 0.0, 0.4]);
        let g = GainSpec::PointwiseInfo(reference.clone());
        for &al in &[0.0, 0.5, 1.0, 2.0, 9.0, f64::INFINITY] {
            let v = gen_prior_vulnerability(&delta, &g, &ell_alpha(a(al))).unwrap();
            let d = renyi_divergence(&delta, &reference, a(al)).unwrap();
            assert!((v - d).abs() < 1e-12, "alpha {al}: {v} vs {d}");
        }
    }

    #[test]
    fn pointwise_witness_beats_grid() {
        let reference = p(&[0.25, 0.25, 0.5]);
        let delta = p(&[0.5, 0.3, 0.2]);
        let eps = 1e-6;
        for &al in &[0.5, 2.0, 4.0] {
            let f = ell_alpha(a(al));
            let g = GainSpec::PointwiseInfo(reference.clone());
            let v = gen_prior_vulnerability(&delta, &g, &f).unwrap();
            let best = crate::simplex::grid_points(3, 200)
                .into_iter()
                .filter(|w| w.iter().all(|&x| x >= eps))
                .map(|w| f.mean(delta.probs(), &pointwise_gains(&w, reference.probs())).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(best <= v + 1e-12);
            assert!(v - best < 1e-2);
        }
    }

    #[test]
    fn leakage_examples() {
        for kind in [LeakageKind::Additive, LeakageKind::Multiplicative] {
            assert_eq!(leakage(0.5, 0.5, kind).unwrap(), 0.0);
        }
        assert!((leakage(0.5, 0.9, LeakageKind::Multiplicative).unwrap() - 1.8f64.ln()).abs() < 1e-15);
        assert!((leakage(0.5, 0.9, LeakageKind::Additive).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(leakage(0.0, 0.3, LeakageKind::Multiplicative).unwrap(), f64::INFINITY);
    }
}
