//! Logarithmic pair interactions and the energies built from them.
//!
//! Two interactions are supported: the non-periodic `g(x) = -log|x|` and the
//! `n`-periodic `g_n(x) = -log|2 sin(πx/n)|`. Both vanish at their
//! singularities by convention, so double sums may include the diagonal.

mod moves;
mod potential;

pub use moves::{
    cost_function, exterior_weight, log_exterior_weight, move_function, move_function_limit,
    CostValue, MoveValue,
};
pub use potential::{
    moved_charge_potential, renormalized_energy_periodic, segment_log_potential, v_function,
};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::config::{PointConfiguration, Window};
use crate::error::{Error, Result};
use crate::sum::Compensated;

/// Which pair potential an energy is computed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InteractionModel {
    NonPeriodic,
    Periodic(u32),
}

impl InteractionModel {
    pub fn periodic(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("period must be at least 1".into()));
        }
        Ok(InteractionModel::Periodic(n))
    }

    pub fn period(&self) -> Option<f64> {
        match *self {
            InteractionModel::NonPeriodic => None,
            InteractionModel::Periodic(n) => Some(n as f64),
        }
    }

    /// `g(x)` or `g_n(x)`, zero on the singular set (`{0}` or `nℤ`).
    #[inline]
    pub fn pair_potential(&self, x: f64) -> f64 {
        match *self {
            InteractionModel::NonPeriodic => {
                if x == 0.0 {
                    0.0
                } else {
                    -x.abs().ln()
                }
            }
            InteractionModel::Periodic(n) => {
                let n = n as f64;
                // reduce to [-n/2, n/2] first so sin sees a small argument
                let r = x - n * (x / n).round();
                if r == 0.0 {
                    0.0
                } else {
                    -(2.0 * (PI * r / n).sin()).abs().ln()
                }
            }
        }
    }

    /// Whether `x` lies on the singular set of the potential.
    #[inline]
    pub(crate) fn is_singular(&self, x: f64) -> bool {
        match *self {
            InteractionModel::NonPeriodic => x == 0.0,
            InteractionModel::Periodic(n) => {
                let n = n as f64;
                x - n * (x / n).round() == 0.0
            }
        }
    }

    /// `Σ_{y ∈ points} g(x - y)`.
    pub(crate) fn field_at(&self, x: f64, points: &[f64]) -> f64 {
        points
            .iter()
            .map(|&y| self.pair_potential(x - y))
            .collect::<Compensated>()
            .value()
    }
}

/// Free-function form of [`InteractionModel::pair_potential`].
pub fn pair_potential(model: InteractionModel, x: f64) -> f64 {
    model.pair_potential(x)
}

/// `H_Λ(γ) = Σ_{i<j} g(x_i - x_j)` over the points of `gamma` in `w`.
pub fn interaction_energy(model: InteractionModel, gamma: &PointConfiguration, w: &Window) -> f64 {
    pair_energy(model, gamma.restrict(w).points())
}

/// `Σ_{i<j} g(x_i - x_j)` over a slice.
pub(crate) fn pair_energy(model: InteractionModel, pts: &[f64]) -> f64 {
    let mut acc = Compensated::new();
    for (i, &x) in pts.iter().enumerate() {
        for &y in &pts[i + 1..] {
            acc.add(model.pair_potential(x - y));
        }
    }
    acc.value()
}
