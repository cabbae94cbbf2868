use serde::Serialize;

use super::InteractionModel;
use crate::config::{PointConfiguration, Window};
use crate::error::{Error, Result};
use crate::sum::{csum, Compensated};

/// A truncated move-function evaluation together with its convergence record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoveValue {
    pub value: f64,
    pub inner_window: Window,
    /// Last truncation radius `p` (exterior points with `|u| <= p`).
    pub outer_radius: f64,
    pub converged: bool,
    pub last_increment: f64,
    /// First schedule index from which every increment stayed within tolerance.
    pub converged_at: Option<usize>,
    /// `value(p_k) - value(p_{k-1})`, with `value(p_{-1}) = 0`.
    pub increments: Vec<f64>,
}

/// Cost of moving a tuple of points from the origin into `γ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostValue {
    pub value: f64,
    pub tuple_size: usize,
    pub truncation_radius: f64,
    pub converged: bool,
    pub last_increment: f64,
}

fn check_cardinality(eta: &PointConfiguration, gamma_in: &PointConfiguration) -> Result<()> {
    if eta.len() != gamma_in.len() {
        return Err(Error::CardinalityMismatch {
            left: eta.len(),
            right: gamma_in.len(),
        });
    }
    Ok(())
}

/// Contribution of one exterior point `u`: `Σ_{e∈η} g(e-u) - Σ_{y∈γ_Λ} g(y-u)`.
#[inline]
fn exterior_term(model: InteractionModel, eta: &[f64], gamma_in: &[f64], u: f64) -> f64 {
    let mut acc = Compensated::new();
    for (&e, &y) in eta.iter().zip(gamma_in) {
        acc.add(model.pair_potential(e - u));
        acc.add(-model.pair_potential(y - u));
    }
    acc.value()
}

/// `M_{Λ,outer}(η, γ) = ∬ g(x-y) d(η_Λ - γ_Λ) ⊗ γ_{outer∖Λ}`.
pub fn move_function(
    model: InteractionModel,
    eta: &PointConfiguration,
    gamma: &PointConfiguration,
    inner: &Window,
    outer: &Window,
) -> Result<f64> {
    inner.check_nested_in(outer)?;
    let eta_in = eta.restrict(inner);
    let gamma_in = gamma.restrict(inner);
    check_cardinality(&eta_in, &gamma_in)?;
    let ext = gamma.annulus(inner, outer);
    Ok(csum(ext.iter().map(|u| {
        exterior_term(model, eta_in.points(), gamma_in.points(), u)
    })))
}

fn validate_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InvalidSchedule("empty radius schedule".into()));
    }
    if schedule.iter().any(|p| !p.is_finite() || *p <= 0.0) {
        return Err(Error::InvalidSchedule("radii must be positive and finite".into()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSchedule("radii must be strictly increasing".into()));
    }
    Ok(())
}

fn convergence(increments: &[f64], tol: f64) -> (bool, Option<usize>) {
    let k = increments.len();
    let tail = &increments[k.saturating_sub(2)..];
    let converged = tail.iter().all(|d| d.abs() <= tol);
    let mut at = None;
    for i in (0..k).rev() {
        if increments[i].abs() <= tol {
            at = Some(i);
        } else {
            break;
        }
    }
    (converged, at)
}

/// Evaluates the non-periodic move function along `p_schedule`, truncating the
/// exterior symmetrically at `|u| <= p`.
///
/// Convergence is declared when the last two increments are both within `tol`.
/// Non-convergence is reported through the returned value, not as an error.
pub fn move_function_limit(
    eta: &PointConfiguration,
    gamma: &PointConfiguration,
    inner: &Window,
    p_schedule: &[f64],
    tol: f64,
) -> Result<MoveValue> {
    validate_schedule(p_schedule)?;
    inner.check_nested_in(&Window::symmetric(p_schedule[0])?)?;
    let model = InteractionModel::NonPeriodic;
    let eta_in = eta.restrict(inner);
    let gamma_in = gamma.restrict(inner);
    check_cardinality(&eta_in, &gamma_in)?;

    let mut terms: Vec<(f64, f64)> = gamma
        .complement(inner)
        .iter()
        .map(|u| (u.abs(), exterior_term(model, eta_in.points(), gamma_in.points(), u)))
        .collect();
    terms.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut acc = Compensated::new();
    let mut next = 0;
    let mut prev = 0.0;
    let mut increments = Vec::with_capacity(p_schedule.len());
    for &p in p_schedule {
        while next < terms.len() && terms[next].0 <= p {
            acc.add(terms[next].1);
            next += 1;
        }
        let v = acc.value();
        increments.push(v - prev);
        prev = v;
    }
    let (converged, converged_at) = convergence(&increments, tol);
    Ok(MoveValue {
        value: prev,
        inner_window: *inner,
        outer_radius: *p_schedule.last().unwrap(),
        converged,
        last_increment: *increments.last().unwrap(),
        converged_at,
        increments,
    })
}

/// `β Σ_{|u|<=p} log|1 - x/u|`, or `None` when `x` hits an exterior point.
pub fn log_exterior_weight(
    x: f64,
    gamma_ext: &PointConfiguration,
    beta: f64,
    p: f64,
) -> Result<Option<f64>> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParams(format!("beta must be positive, got {beta}")));
    }
    let mut acc = Compensated::new();
    for u in gamma_ext.iter().filter(|u| u.abs() <= p) {
        if u == 0.0 {
            return Err(Error::DomainError(
                "exterior configuration contains the origin".into(),
            ));
        }
        let factor = (1.0 - x / u).abs();
        if factor == 0.0 {
            return Ok(None);
        }
        acc.add(factor.ln());
    }
    Ok(Some(beta * acc.value()))
}

/// The truncated exterior weight `ω_p(x) = ∏_{|u|<=p} |1 - x/u|^β`.
pub fn exterior_weight(x: f64, gamma_ext: &PointConfiguration, beta: f64, p: f64) -> Result<f64> {
    Ok(log_exterior_weight(x, gamma_ext, beta, p)?.map_or(0.0, f64::exp))
}

fn cost_at(sorted: &[f64], gamma: &PointConfiguration, p: f64) -> f64 {
    let g = InteractionModel::NonPeriodic;
    let mut acc = Compensated::new();
    for (i, &x) in sorted.iter().enumerate() {
        for &y in &sorted[i + 1..] {
            acc.add(g.pair_potential(x - y));
        }
    }
    for y in gamma.iter().filter(|y| y.abs() <= p) {
        for &x in sorted {
            acc.add(g.pair_potential(x - y));
            acc.add(-g.pair_potential(y));
        }
    }
    acc.value()
}

/// `Σ_{i<j} g(x_i - x_j) + Σ_{y∈γ, |y|<=p} Σ_i [g(x_i - y) - g(y)]`.
///
/// The truncation is also evaluated at `p/4` and `p/2`; the value is flagged
/// converged when both increments up to `p` are within `tol`. The tuple is
/// sorted before summation so the result does not depend on its ordering.
pub fn cost_function(
    x_tuple: &[f64],
    gamma: &PointConfiguration,
    p: f64,
    tol: f64,
) -> Result<CostValue> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::InvalidSchedule(format!("truncation radius must be positive, got {p}")));
    }
    let mut sorted = x_tuple.to_vec();
    if let Some(&bad) = sorted.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFinite(bad));
    }
    sorted.sort_by(f64::total_cmp);
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicatePoint(w[0]));
    }
    for &x in &sorted {
        if gamma.points().binary_search_by(|y| y.total_cmp(&x)).is_ok() {
            return Err(Error::SingularOverlap(x));
        }
    }
    let radii = [0.25 * p, 0.5 * p, p];
    let values: Vec<f64> = radii.iter().map(|&r| cost_at(&sorted, gamma, r)).collect();
    let increments = [values[1] - values[0], values[2] - values[1]];
    Ok(CostValue {
        value: values[2],
        tuple_size: sorted.len(),
        truncation_radius: p,
        converged: increments.iter().all(|d| d.abs() <= tol),
        last_increment: increments[1],
    })
}
