//! Finite priors, channels and hyper-distributions.
//!
//! All values are immutable once built. Inputs are accepted when every entry
//! is non-negative and each distribution sums to one within
//! [`INPUT_TOLERANCE`]; accepted inputs are renormalized exactly.

use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{QifError, Result};

/// Slack allowed on user-supplied probabilities before they are rejected.
pub const INPUT_TOLERANCE: f64 = 1e-9;

/// Tolerance used when asserting internal identities (mass conservation etc.).
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

fn check_distribution(values: &mut [f64]) -> std::result::Result<(), String> {
    if values.is_empty() {
        return Err("no entries".to_owned());
    }
    for (i, v) in values.iter_mut().enumerate() {
        if !v.is_finite() {
            return Err(format!("entry {i} is not finite ({v})"));
        }
        if *v < 0.0 {
            if *v < -INPUT_TOLERANCE {
                return Err(format!("entry {i} is negative ({v})"));
            }
            *v = 0.0;
        }
    }
    let total: f64 = values.iter().sum();
    if (total - 1.0).abs() > INPUT_TOLERANCE {
        return Err(format!("entries sum to {total}"));
    }
    for v in values.iter_mut() {
        *v /= total;
    }
    Ok(())
}

/// A probability distribution over a finite secret alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    probs: Vec<f64>,
}

impl Prior {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let mut probs = probs;
        check_distribution(&mut probs).map_err(QifError::InvalidDistribution)?;
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(QifError::Empty("prior"));
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
        })
    }

    pub fn point_mass(n: usize, x: usize) -> Result<Self> {
        if x >= n {
            return Err(QifError::DimensionMismatch {
                what: "point mass index",
                expected: n,
                found: x,
            });
        }
        let mut probs = vec![0.0; n];
        probs[x] = 1.0;
        Ok(Self { probs })
    }

    /// Builds a prior from non-negative weights by dividing by their sum.
    /// Callers guarantee the weights are finite, non-negative and not all zero.
    pub(crate) fn from_weights(mut weights: Vec<f64>) -> Self {
        let total: f64 = weights.iter().sum();
        debug_assert!(total > 0.0 && total.is_finite());
        for w in &mut weights {
            *w /= total;
        }
        Self { probs: weights }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, x: usize) -> f64 {
        self.probs[x]
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| i)
    }

    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }

    pub fn has_full_support(&self) -> bool {
        self.probs.iter().all(|&p| p > 0.0)
    }

    /// Largest probability (Bayes vulnerability).
    pub fn max(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }

    /// Convex combination `Σ_i a_i π^i`.
    pub fn mix(weights: &[f64], priors: &[Prior]) -> Result<Prior> {
        if weights.len() != priors.len() {
            return Err(QifError::DimensionMismatch {
                what: "mixture weights",
                expected: priors.len(),
                found: weights.len(),
            });
        }
        let first = priors.first().ok_or(QifError::Empty("mixture"))?;
        let n = first.len();
        let mut out = vec![0.0; n];
        for (a, p) in weights.iter().zip(priors) {
            if p.len() != n {
                return Err(QifError::DimensionMismatch {
                    what: "mixture component",
                    expected: n,
                    found: p.len(),
                });
            }
            for (o, v) in out.iter_mut().zip(p.probs()) {
                *o += a * v;
            }
        }
        Prior::new(out)
    }
}

impl Serialize for Prior {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.probs.serialize(serializer)
    }
}

/// Row-stochastic matrix `C[x][y] = P(Y = y | X = x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_rows = rows.len();
        if n_rows == 0 {
            return Err(QifError::Empty("channel"));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(QifError::Empty("channel row"));
        }
        let mut data = Vec::with_capacity(n_rows * cols);
        for (i, mut row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(QifError::DimensionMismatch {
                    what: "channel row length",
                    expected: cols,
                    found: row.len(),
                });
            }
            check_distribution(&mut row)
                .map_err(|reason| QifError::NotStochastic { row: i, reason })?;
            data.extend(row);
        }
        Ok(Self {
            rows: n_rows,
            cols,
            data,
        })
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(QifError::DimensionMismatch {
                what: "channel data length",
                expected: rows * cols,
                found: data.len(),
            });
        }
        if cols == 0 {
            return Err(QifError::Empty("channel row"));
        }
        Self::new(data.chunks(cols).map(<[f64]>::to_vec).collect())
    }

    pub(crate) fn from_rows_unchecked(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(QifError::Empty("channel"));
        }
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Ok(Self::from_rows_unchecked(n, n, data))
    }

    /// Binary symmetric channel flipping the input with probability `flip`.
    pub fn binary_symmetric(flip: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&flip) {
            return Err(QifError::OutOfRange {
                name: "flip probability",
                value: flip,
                allowed: "[0, 1]",
            });
        }
        Ok(Self::from_rows_unchecked(
            2,
            2,
            vec![1.0 - flip, flip, flip, 1.0 - flip],
        ))
    }

    pub fn n_inputs(&self) -> usize {
        self.rows
    }

    pub fn n_outputs(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.cols + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.cols..(x + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.cols)
    }

    pub fn column(&self, y: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.rows).map(move |x| self.get(x, y))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }
}

impl Serialize for Channel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for row in self.rows() {
            seq.serialize_element(row)?;
        }
        seq.end()
    }
}

/// Distribution over posteriors: outer weights `p(y)` with inners `δ^y`.
///
/// Outputs of probability zero are dropped; `outputs()` maps every retained
/// inner back to its column in the originating channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyper {
    prior: Prior,
    outer: Vec<f64>,
    inners: Vec<Prior>,
    outputs: Vec<usize>,
}

impl Hyper {
    /// The point hyper `[π]`.
    pub fn point(prior: Prior) -> Self {
        Self {
            outer: vec![1.0],
            inners: vec![prior.clone()],
            outputs: vec![0],
            prior,
        }
    }

    /// Builds a hyper from explicit parts; the prior is recovered as the
    /// outer-weighted mixture of the inners.
    pub fn from_parts(outer: Vec<f64>, inners: Vec<Prior>) -> Result<Self> {
        if outer.len() != inners.len() {
            return Err(QifError::DimensionMismatch {
                what: "hyper inners",
                expected: outer.len(),
                found: inners.len(),
            });
        }
        let outer_dist = Prior::new(outer)?;
        let (outer, inners, outputs): (Vec<f64>, Vec<Prior>, Vec<usize>) = {
            let mut o = Vec::new();
            let mut i = Vec::new();
            let mut idx = Vec::new();
            for (k, (w, inner)) in outer_dist.probs().iter().zip(inners).enumerate() {
                if *w > 0.0 {
                    o.push(*w);
                    i.push(inner);
                    idx.push(k);
                }
            }
            (o, i, idx)
        };
        let prior = Prior::mix(&outer, &inners)?;
        Ok(Self {
            prior,
            outer,
            inners,
            outputs,
        })
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    pub fn outer(&self) -> &[f64] {
        &self.outer
    }

    pub fn inners(&self) -> &[Prior] {
        &self.inners
    }

    /// Channel column of each retained inner.
    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn len(&self) -> usize {
        self.outer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outer.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &Prior)> {
        self.outer.iter().copied().zip(&self.inners)
    }
}

/// Pushes a prior through a channel, producing the hyper `[π, C]`.
pub fn push(prior: &Prior, channel: &Channel) -> Result<Hyper> {
    if prior.len() != channel.n_inputs() {
        return Err(QifError::DimensionMismatch {
            what: "prior vs channel rows",
            expected: channel.n_inputs(),
            found: prior.len(),
        });
    }
    let mut outer = Vec::with_capacity(channel.n_outputs());
    let mut inners = Vec::with_capacity(channel.n_outputs());
    let mut outputs = Vec::with_capacity(channel.n_outputs());
    for y in 0..channel.n_outputs() {
        let joint: Vec<f64> = prior
            .probs()
            .iter()
            .zip(channel.column(y))
            .map(|(p, c)| p * c)
            .collect();
        let py: f64 = joint.iter().sum();
        if py > 0.0 {
            outer.push(py);
            inners.push(Prior::from_weights(joint));
            outputs.push(y);
        }
    }
    Ok(Hyper {
        prior: prior.clone(),
        outer,
        inners,
        outputs,
    })
}

/// Cascade `CR`: first `c`, then `r` applied to its output.
pub fn compose(c: &Channel, r: &Channel) -> Result<Channel> {
    if c.n_outputs() != r.n_inputs() {
        return Err(QifError::DimensionMismatch {
            what: "composed channel inner dimension",
            expected: c.n_outputs(),
            found: r.n_inputs(),
        });
    }
    let (n, m) = (c.n_inputs(), r.n_outputs());
    let mut data = vec![0.0; n * m];
    for x in 0..n {
        for (y, &cxy) in c.row(x).iter().enumerate() {
            if cxy == 0.0 {
                continue;
            }
            for (z, &ryz) in r.row(y).iter().enumerate() {
                data[x * m + z] += cxy * ryz;
            }
        }
    }
    Ok(Channel::from_rows_unchecked(n, m, data))
}

/// The non-interfering channel: one output column of ones.
pub fn ni_channel(n_rows: usize) -> Result<Channel> {
    if n_rows == 0 {
        return Err(QifError::Empty("channel"));
    }
    Ok(Channel::from_rows_unchecked(n_rows, 1, vec![1.0; n_rows]))
}
