//! Gain functions `g(w, x)`.

use std::fmt;

use crate::error::{QifError, Result};
use crate::prob::Prior;

/// Explicit gain matrix with rows indexed by actions and columns by secrets.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix {
    n_actions: usize,
    n_secrets: usize,
    data: Vec<f64>,
}

impl GainMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_actions = rows.len();
        if n_actions == 0 {
            return Err(QifError::Empty("action set"));
        }
        let n_secrets = rows[0].len();
        if n_secrets == 0 {
            return Err(QifError::Empty("gain row"));
        }
        let mut data = Vec::with_capacity(n_actions * n_secrets);
        for row in rows {
            if row.len() != n_secrets {
                return Err(QifError::DimensionMismatch {
                    what: "gain row length",
                    expected: n_secrets,
                    found: row.len(),
                });
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(QifError::InvalidGain(format!("non-finite entry {v}")));
            }
            data.extend(row);
        }
        if !data.iter().any(|&v| v > 0.0) {
            return Err(QifError::InvalidGain(
                "at least one gain value must be positive".to_owned(),
            ));
        }
        Ok(Self {
            n_actions,
            n_secrets,
            data,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(QifError::Empty("action set"));
        }
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Ok(Self {
            n_actions: n,
            n_secrets: n,
            data,
        })
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn n_secrets(&self) -> usize {
        self.n_secrets
    }

    pub fn get(&self, w: usize, x: usize) -> f64 {
        self.data[w * self.n_secrets + x]
    }

    pub fn row(&self, w: usize) -> &[f64] {
        &self.data[w * self.n_secrets..(w + 1) * self.n_secrets]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n_secrets)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&v| v >= 0.0)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GainSpec {
    /// Finite action set given by an explicit matrix.
    Matrix(GainMatrix),
    /// `g_id(w, x) = [w = x]`; the adversary guesses the secret.
    Identity,
    /// `g(w, x) = w_x` over soft guesses `w ∈ 𝔻X`.
    Simplex,
    /// `γ(w, x) = ln(w_x / π_x)` over `w ∈ 𝔻X` relative to a reference prior.
    PointwiseInfo(Prior),
}

impl GainSpec {
    pub fn matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        GainMatrix::new(rows).map(GainSpec::Matrix)
    }

    pub fn id(&self) -> String {
        match self {
            GainSpec::Matrix(m) => format!("matrix:{}x{}", m.n_actions(), m.n_secrets()),
            GainSpec::Identity => "identity".to_owned(),
            GainSpec::Simplex => "simplex".to_owned(),
            GainSpec::PointwiseInfo(_) => "pointwise-info".to_owned(),
        }
    }

    /// Checks that the gain applies to a secret alphabet of size `n`.
    pub fn check_secrets(&self, n: usize) -> Result<()> {
        let expected = match self {
            GainSpec::Matrix(m) => m.n_secrets(),
            GainSpec::PointwiseInfo(p) => p.len(),
            GainSpec::Identity | GainSpec::Simplex => return Ok(()),
        };
        if expected == n {
            Ok(())
        } else {
            Err(QifError::DimensionMismatch {
                what: "gain secrets vs prior",
                expected,
                found: n,
            })
        }
    }

    /// Gains defined for every alphabet size and invariant under relabeling.
    pub fn is_label_symmetric(&self) -> bool {
        matches!(self, GainSpec::Identity | GainSpec::Simplex)
    }

    /// Entries of a finite action set, materializing `g_id` for size `n`.
    pub(crate) fn finite_rows(&self, n: usize) -> Option<GainMatrix> {
        match self {
            GainSpec::Matrix(m) => Some(m.clone()),
            GainSpec::Identity => GainMatrix::identity(n).ok(),
            _ => None,
        }
    }
}

impl fmt::Display for GainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}
