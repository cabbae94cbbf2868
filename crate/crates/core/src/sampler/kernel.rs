use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::uniform_points;
use crate::config::{PointConfiguration, Window};
use crate::energy::{pair_energy, InteractionModel};
use crate::error::{Error, Result};
use crate::sum::Compensated;

/// Conditional law inside `inner` given the exterior, at fixed particle count.
///
/// The target density on `inner^N` is `exp(-β(H_Λ(η) + M(η, γ)))` relative to
/// the Bernoulli process. Only exterior points within `[-outer_radius,
/// outer_radius]` take part; for a periodic model use `outer_radius = n/2`.
///
/// `reference` holds the interior `γ_Λ` that the move function measures
/// against. It shifts `M` by a constant and therefore leaves the kernel
/// unchanged, but it fixes the normalization of the conditional partition
/// function and gives the chain a starting point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelSpec {
    inner: Window,
    outer_radius: f64,
    model: InteractionModel,
    beta: f64,
    fixed_count: usize,
    exterior: PointConfiguration,
    reference: Option<PointConfiguration>,
}

impl KernelSpec {
    /// Kernel for `fixed_count` particles with no reference interior.
    pub fn new(
        inner: Window,
        outer_radius: f64,
        model: InteractionModel,
        beta: f64,
        fixed_count: usize,
        exterior: &PointConfiguration,
    ) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParams(format!("beta must be positive, got {beta}")));
        }
        if !(outer_radius.is_finite() && outer_radius > 0.0) {
            return Err(Error::InvalidParams(format!(
                "outer radius must be positive, got {outer_radius}"
            )));
        }
        let outer = Window::symmetric(outer_radius)?;
        inner.check_nested_in(&outer)?;
        if let Some(x) = exterior.restrict(&inner).iter().next() {
            return Err(Error::ExteriorOverlap(x));
        }
        Ok(Self {
            inner,
            outer_radius,
            model,
            beta,
            fixed_count,
            exterior: exterior.restrict(&outer),
            reference: None,
        })
    }

    /// Kernel seen by `gamma`: `N = |γ_Λ|`, exterior `γ_{outer∖Λ}` and
    /// reference interior `γ_Λ`.
    pub fn from_configuration(
        gamma: &PointConfiguration,
        inner: Window,
        outer_radius: f64,
        model: InteractionModel,
        beta: f64,
    ) -> Result<Self> {
        let outer = Window::symmetric(outer_radius)?;
        inner.check_nested_in(&outer)?;
        let interior = gamma.restrict(&inner);
        let exterior = gamma.annulus(&inner, &outer);
        Self::new(inner, outer_radius, model, beta, interior.len(), &exterior)?
            .with_reference(interior)
    }

    /// Attaches a reference interior; it must have `fixed_count` points in
    /// `inner`.
    pub fn with_reference(mut self, reference: PointConfiguration) -> Result<Self> {
        if reference.len() != self.fixed_count {
            return Err(Error::CardinalityMismatch {
                left: reference.len(),
                right: self.fixed_count,
            });
        }
        if reference.count_in(&self.inner) != reference.len() {
            return Err(Error::DomainError("reference interior must lie in the inner window".into()));
        }
        self.reference = Some(reference);
        Ok(self)
    }

    pub fn inner(&self) -> &Window {
        &self.inner
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn outer(&self) -> Window {
        Window::symmetric(self.outer_radius).expect("validated radius")
    }

    pub fn model(&self) -> InteractionModel {
        self.model
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn fixed_count(&self) -> usize {
        self.fixed_count
    }

    pub fn exterior(&self) -> &PointConfiguration {
        &self.exterior
    }

    pub fn reference(&self) -> Option<&PointConfiguration> {
        self.reference.as_ref()
    }

    /// `Σ_{u ∈ exterior} g(x - u)`.
    pub fn exterior_field(&self, x: f64) -> f64 {
        self.model.field_at(x, self.exterior.points())
    }

    fn hits_exterior(&self, x: f64) -> bool {
        self.exterior.iter().any(|u| self.model.is_singular(x - u))
    }

    /// `Σ_u Σ_{y ∈ reference} g(y - u)`, zero without a reference.
    pub fn reference_field(&self) -> f64 {
        self.reference
            .as_ref()
            .map(|r| r.iter().map(|y| self.exterior_field(y)).collect::<Compensated>().value())
            .unwrap_or(0.0)
    }

    /// `H_Λ(η) + M(η, γ)`, or `None` when `η` meets the exterior.
    pub fn conditional_energy(&self, eta: &[f64]) -> Option<f64> {
        if eta.iter().any(|&x| self.hits_exterior(x)) {
            return None;
        }
        let mut acc = Compensated::with_value(pair_energy(self.model, eta));
        for &x in eta {
            acc.add(self.exterior_field(x));
        }
        acc.add(-self.reference_field());
        Some(acc.value())
    }

    /// Proposal standard deviation used when none is given: half the mean
    /// spacing of `N` points in `inner`.
    pub fn default_step_scale(&self) -> f64 {
        0.5 * self.inner.length() / self.fixed_count.max(1) as f64
    }
}

/// Final state and counters of a kernel run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelOutcome {
    pub config: PointConfiguration,
    pub accepted: u64,
    pub proposed: u64,
}

/// Metropolis chain on `inner^N` for a [`KernelSpec`].
///
/// Proposals leaving `inner` or landing on another point are rejected.
#[derive(Debug, Clone)]
pub struct KernelChain<'a> {
    spec: &'a KernelSpec,
    positions: Vec<f64>,
    field: Vec<f64>,
    step_scale: f64,
    accepted: u64,
    proposed: u64,
}

impl<'a> KernelChain<'a> {
    /// Starts at the reference interior when present, otherwise at uniform
    /// points avoiding the exterior.
    pub fn new<R: Rng + ?Sized>(spec: &'a KernelSpec, rng: &mut R) -> Self {
        let positions = match &spec.reference {
            Some(r) if r.iter().all(|x| !spec.hits_exterior(x)) => r.points().to_vec(),
            _ => loop {
                let pts = uniform_points(spec.fixed_count, &spec.inner, rng);
                if pts.iter().all(|&x| !spec.hits_exterior(x)) {
                    break pts;
                }
            },
        };
        let field = positions.iter().map(|&x| spec.exterior_field(x)).collect();
        Self {
            spec,
            positions,
            field,
            step_scale: spec.default_step_scale(),
            accepted: 0,
            proposed: 0,
        }
    }

    pub fn with_step_scale(mut self, s: f64) -> Self {
        self.step_scale = s;
        self
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let n = self.positions.len();
        if n == 0 {
            return false;
        }
        self.proposed += 1;
        let i = rng.random_range(0..n);
        let z: f64 = rng.sample(StandardNormal);
        let x = self.positions[i];
        let y = x + self.step_scale * z;
        if !self.spec.inner.contains(y) {
            return false;
        }
        let model = self.spec.model;
        let mut delta = Compensated::new();
        for (j, &xj) in self.positions.iter().enumerate() {
            if j == i {
                continue;
            }
            if model.is_singular(y - xj) {
                return false;
            }
            delta.add(model.pair_potential(y - xj) - model.pair_potential(x - xj));
        }
        if self.spec.hits_exterior(y) {
            return false;
        }
        let fy = self.spec.exterior_field(y);
        delta.add(fy - self.field[i]);
        let de = delta.value();
        if de <= 0.0 || rng.random::<f64>().ln() < -self.spec.beta * de {
            self.positions[i] = y;
            self.field[i] = fy;
            self.accepted += 1;
            true
        } else {
            false
        }
    }

    pub fn run<R: Rng + ?Sized>(&mut self, steps: u64, rng: &mut R) {
        for _ in 0..steps {
            self.step(rng);
        }
    }

    pub fn outcome(&self) -> KernelOutcome {
        let mut pts = self.positions.clone();
        pts.sort_by(f64::total_cmp);
        KernelOutcome {
            config: PointConfiguration::from_sorted_unchecked(pts),
            accepted: self.accepted,
            proposed: self.proposed,
        }
    }
}

/// Runs the kernel chain for `steps` proposals and returns the interior.
pub fn gibbs_kernel_sample<R: Rng + ?Sized>(
    spec: &KernelSpec,
    steps: u64,
    rng: &mut R,
) -> PointConfiguration {
    if spec.fixed_count == 0 {
        return PointConfiguration::empty();
    }
    let mut chain = KernelChain::new(spec, rng);
    chain.run(steps, rng);
    chain.outcome().config
}

/// Redraws `γ_Λ` from the kernel seen by `gamma` and returns
/// `η ∪ γ_{outer∖Λ}`; `steps = None` runs `200·N` proposals.
pub fn resample_interior<R: Rng + ?Sized>(
    gamma: &PointConfiguration,
    inner: Window,
    outer_radius: f64,
    model: InteractionModel,
    beta: f64,
    steps: Option<u64>,
    rng: &mut R,
) -> Result<PointConfiguration> {
    let spec = KernelSpec::from_configuration(gamma, inner, outer_radius, model, beta)?;
    let steps = steps.unwrap_or(200 * spec.fixed_count as u64);
    let eta = gibbs_kernel_sample(&spec, steps, rng);
    eta.union(spec.exterior())
}
