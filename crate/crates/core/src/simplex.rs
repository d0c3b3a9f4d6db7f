//! Utilities on the probability simplex: projection, grids, random points and
//! projected-gradient ascent.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Distribution};

use crate::error::Result;

/// Independent, reproducible random stream for instance `stream` of a run.
pub fn instance_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform (Dirichlet(1, …, 1)) point of the `n`-simplex.
pub fn dirichlet_uniform<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let d = Dirichlet::new(&vec![1.0; n]).expect("n >= 2 and positive concentration");
    let mut v = d.sample(rng);
    // Dirichlet samples can underflow to exact zero only with negligible
    // probability; renormalize to absorb rounding.
    let s: f64 = v.iter().sum();
    for x in &mut v {
        *x /= s;
    }
    v
}

/// Euclidean projection onto the simplex (sort-based).
pub fn project(v: &mut [f64]) {
    let n = v.len();
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        for x in v.iter_mut() {
            *x /= s;
        }
    } else {
        v.fill(1.0 / n as f64);
    }
}

/// All points of the simplex with coordinates in `{0, 1/r, …, 1}`.
pub fn grid_points(n: usize, resolution: usize) -> Vec<Vec<f64>> {
    fn rec(left: usize, slots: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if slots == 1 {
            cur.push(left);
            out.push(cur.iter().map(|&k| k as f64 / r as f64).collect());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(left - k, slots - 1, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 || resolution == 0 {
        return out;
    }
    rec(resolution, n, resolution, &mut Vec::with_capacity(n), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscentConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Step of the central finite differences.
    pub fd_step: f64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 500,
            fd_step: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscentOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

/// Projected gradient ascent with backtracking.
///
/// Partial derivatives are taken along the tangent directions `e_i − 1/n`
/// by central differences, falling back to one-sided differences at the
/// boundary. Iteration stops when an accepted step improves the objective by
/// less than `tolerance` or no step size improves it.
pub fn ascend<F>(start: &[f64], mut objective: F, cfg: &AscentConfig) -> Result<AscentOutcome>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let n = start.len();
    let mut point = start.to_vec();
    project(&mut point);
    let mut value = objective(&point)?;
    let mut evaluations = 1;
    let mut iterations = 0;
    if n < 2 || !value.is_finite() {
        return Ok(AscentOutcome {
            point,
            value,
            iterations,
            evaluations,
        });
    }
    let h = cfg.fd_step;
    let inv_n = 1.0 / n as f64;
    let mut step = 0.5;
    let mut probe = vec![0.0; n];
    let mut grad = vec![0.0; n];
    while iterations < cfg.max_iterations {
        iterations += 1;
        for i in 0..n {
            let shift = |sign: f64, probe: &mut Vec<f64>| -> bool {
                for (j, p) in probe.iter_mut().enumerate() {
                    let d = if i == j { 1.0 - inv_n } else { -inv_n };
                    *p = point[j] + sign * h * d;
                }
                probe.iter().all(|&p| p >= 0.0)
            };
            let up = if shift(1.0, &mut probe) {
                evaluations += 1;
                Some(objective(&probe)?)
            } else {
                None
            };
            let down = if shift(-1.0, &mut probe) {
                evaluations += 1;
                Some(objective(&probe)?)
            } else {
                None
            };
            grad[i] = match (up, down) {
                (Some(u), Some(d)) => (u - d) / (2.0 * h),
                (Some(u), None) => (u - value) / h,
                (None, Some(d)) => (value - d) / h,
                (None, None) => 0.0,
            };
            if !grad[i].is_finite() {
                grad[i] = 0.0;
            }
        }
        let mean = grad.iter().sum::<f64>() * inv_n;
        for g in &mut grad {
            *g -= mean;
        }
        if grad.iter().all(|g| g.abs() < 1e-300) {
            break;
        }
        let mut accepted = None;
        let mut t = step;
        while t > 1e-14 {
            for j in 0..n {
                probe[j] = point[j] + t * grad[j];
            }
            project(&mut probe);
            evaluations += 1;
            let v = objective(&probe)?;
            if v > value {
                accepted = Some(v);
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some(v) => {
                let gain = v - value;
                point.copy_from_slice(&probe);
                value = v;
                step = (t * 2.0).min(1e3);
                if gain < cfg.tolerance {
                    break;
                }
            }
            None => break,
        }
    }
    Ok(AscentOutcome {
        point,
        value,
        iterations,
        evaluations,
    })
}
