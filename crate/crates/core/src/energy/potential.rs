use std::f64::consts::PI;

use super::InteractionModel;
use crate::config::{PointConfiguration, Window};
use crate::error::{Error, Result};
use crate::sum::Compensated;

/// `Ψ(x) = Σ_{e∈η} g(x-e) - Σ_{y∈γ_Λ} g(x-y)`, the potential of the signed
/// charge `η - γ_Λ`.
///
/// Meant for `|η| = |γ_Λ|`; unequal counts are evaluated as written and give
/// the potential of a non-neutral charge.
pub fn moved_charge_potential(
    model: InteractionModel,
    eta: &PointConfiguration,
    gamma_inner: &PointConfiguration,
    x: f64,
) -> f64 {
    let mut acc = Compensated::new();
    for e in eta.iter() {
        acc.add(model.pair_potential(x - e));
    }
    for y in gamma_inner.iter() {
        acc.add(-model.pair_potential(x - y));
    }
    acc.value()
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `V(t) = (1+t) log(1+t) + (1-t) log(1-t)` on `[-1, 1]`, with `0 log 0 = 0`.
///
/// This is the closed form used for the mean-zero estimate of the moved-charge
/// potential. It differs from the segment potential `∫_{-1}^{1} -log|t-s| ds`
/// by the affine map `2 - V(t)` (see [`segment_log_potential`]); the two have
/// derivatives of equal magnitude, which is what the estimate relies on.
pub fn v_function(t: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::DomainError(format!("V(t) needs |t| <= 1, got {t}")));
    }
    Ok(xlogx(1.0 + t) + xlogx(1.0 - t))
}

/// `∫_{-1}^{1} -log|t-s| ds = 2 - V(t)` for `|t| <= 1`.
pub fn segment_log_potential(t: f64) -> Result<f64> {
    Ok(2.0 - v_function(t)?)
}

/// Renormalized energy of the `n`-periodic extension of `γ ⊂ Λ_n`:
/// `(π/n) (2 H^{n-per}_{Λ_n}(γ) + n log(n / 2π))`.
pub fn renormalized_energy_periodic(gamma: &PointConfiguration, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParams("period must be at least 1".into()));
    }
    if gamma.len() != n as usize {
        return Err(Error::CardinalityMismatch {
            left: gamma.len(),
            right: n as usize,
        });
    }
    let nf = n as f64;
    let lambda_n = Window::centered(nf)?;
    if gamma.count_in(&lambda_n) != gamma.len() {
        return Err(Error::DomainError(format!(
            "configuration must lie in [-{}, {}]",
            nf / 2.0,
            nf / 2.0
        )));
    }
    let h = super::pair_energy(InteractionModel::Periodic(n), gamma.points());
    Ok(PI / nf * (2.0 * h + nf * (nf / (2.0 * PI)).ln()))
}
