use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sample mean with its spread: `std_error = sqrt(variance / n_samples)`,
/// `variance` being the unbiased sample variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

impl MCEstimate {
    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        let mut acc = Welford::default();
        xs.iter().for_each(|&x| acc.push(x));
        acc.estimate()
    }

    /// Whether `|mean - target| <= k · std_error`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }
}

/// Streaming mean and variance.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn estimate(&self) -> Result<MCEstimate> {
        if self.n == 0 {
            return Err(Error::InvalidParams("an estimate needs at least one sample".into()));
        }
        let variance = if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        };
        Ok(MCEstimate {
            mean: self.mean,
            variance,
            std_error: (variance / self.n as f64).sqrt(),
            n_samples: self.n,
        })
    }
}
