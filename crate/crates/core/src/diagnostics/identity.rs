use rand::Rng;

use crate::config::{PointConfiguration, Window};
use crate::energy::{interaction_energy, move_function, InteractionModel};
use crate::error::{Error, Result};
use crate::sampler::bernoulli_sample;

/// `|LHS - RHS|` of
/// `H_{Λ_n}(γ) + M(η,γ) + H_Λ(η) = H_{Λ_n}(η ∪ γ_{Λ^c}) + H_Λ(γ)`.
pub fn algebraic_identity_residual(
    model: InteractionModel,
    gamma: &PointConfiguration,
    eta: &PointConfiguration,
    inner: &Window,
) -> Result<f64> {
    let n = match model {
        InteractionModel::Periodic(n) => n,
        InteractionModel::NonPeriodic => {
            return Err(Error::InvalidParams("the identity is stated for the periodic model".into()))
        }
    };
    let domain = Window::centered(n as f64)?;
    inner.check_nested_in(&domain)?;
    if gamma.count_in(&domain) != gamma.len() {
        return Err(Error::DomainError("gamma must lie in the periodic domain".into()));
    }
    if eta.count_in(inner) != eta.len() {
        return Err(Error::DomainError("eta must lie in the inner window".into()));
    }
    let interior = gamma.restrict(inner);
    if eta.len() != interior.len() {
        return Err(Error::CardinalityMismatch {
            left: eta.len(),
            right: interior.len(),
        });
    }
    let exterior = gamma.complement(inner);
    for e in eta.iter() {
        if let Some(u) = exterior.iter().find(|&u| model.is_singular(e - u)) {
            return Err(Error::SingularOverlap(u));
        }
    }
    let replaced = eta.union(&exterior)?;
    let lhs = interaction_energy(model, gamma, &domain)
        + move_function(model, eta, gamma, inner, &domain)?
        + interaction_energy(model, eta, inner);
    let rhs = interaction_energy(model, &replaced, &domain) + interaction_energy(model, gamma, inner);
    Ok((lhs - rhs).abs())
}

/// One random instance: `n` points in `Λ_n` of which `k <= max_interior` lie
/// in a random inner window, and a same-count replacement `η`.
pub fn random_identity_instance<R: Rng + ?Sized>(
    n: u32,
    max_interior: usize,
    rng: &mut R,
) -> Result<(PointConfiguration, PointConfiguration, Window)> {
    let nf = n as f64;
    let k = rng.random_range(0..=max_interior.min(n as usize));
    let len = rng.random_range(1.0..(nf / 4.0).max(1.5));
    let lo = -nf / 2.0 + (nf - len) * rng.random::<f64>();
    let inner = Window::new(lo, lo + len)?;
    let domain = Window::centered(nf)?;
    let mut ext = Vec::with_capacity(n as usize - k);
    while ext.len() < n as usize - k {
        let x = domain.lo() + nf * rng.random::<f64>();
        if !inner.contains(x) {
            ext.push(x);
        }
    }
    let gamma = PointConfiguration::new(ext)?.union(&bernoulli_sample(k, &inner, rng))?;
    let eta = bernoulli_sample(k, &inner, rng);
    Ok((gamma, eta, inner))
}
