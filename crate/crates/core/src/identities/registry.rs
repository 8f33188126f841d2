//! Checks selectable by name, each with a default parameter grid.

use super::channels::{check_chiribella, check_mp_bound, symmetric_test_state, BoundForm};
use super::combinatorial::{check_perm_inequality, check_stirling_identity};
use super::likelihood::{check_likelihood_normalization, check_likelihood_ratio, LeafShape};
use super::moments::{check_collision_moments, check_haar_moment, check_induced_moments, haar_moment_threshold};
use super::povm::{check_povm_swap_bound, PovmInstance};
use super::report::{CheckParams, CheckReport};
use crate::cap;
use crate::ensembles::induced_state_of_dim;
use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::tensor::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    /// Deterministic up to floating point; threshold `1e-9`.
    Exact,
    /// Sampling-based; residual in standard errors or a Frobenius distance.
    MonteCarlo,
}

impl CheckKind {
    pub fn label(self) -> &'static str {
        match self {
            CheckKind::Exact => "exact",
            CheckKind::MonteCarlo => "mc",
        }
    }
}

/// A numeric verification of one identity or inequality.
pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn kind(&self) -> CheckKind;
    /// Values used for keys the caller leaves out.
    fn defaults(&self) -> CheckParams {
        CheckParams::new()
    }
    fn grid(&self) -> Vec<CheckParams>;
    /// `params` are complete (already merged over `defaults`).
    fn evaluate(&self, params: &CheckParams, rng: &mut StreamRng) -> Result<CheckReport>;

    fn run(&self, params: &CheckParams, seed: u64) -> Result<CheckReport> {
        let merged = params.clone().merged_over(&self.defaults());
        self.evaluate(&merged, &mut StreamRng::new(seed, 0))
    }
}

fn random_state(dim: usize, rng: &mut StreamRng) -> Matrix {
    induced_state_of_dim(dim, 2, rng).into_matrix()
}

fn channel_input(params: &CheckParams, d: usize, a: usize, rng: &mut StreamRng) -> Result<Matrix> {
    match params.raw("input").unwrap_or("random") {
        "random" => symmetric_test_state(d, a, rng),
        "basis" => Ok(Matrix::basis_projector(cap::check_power(d, a)?, 0)),
        other => Err(Error::InvalidParameter(format!("input must be 'random' or 'basis', got '{other}'"))),
    }
}

fn channel_grid(max_out_dim: usize) -> Vec<CheckParams> {
    let mut grid = Vec::new();
    for d in 2..=4usize {
        for a in 1..=5usize {
            for b in 1..=(6 - a) {
                if d.pow((a + b) as u32) <= cap::DEFAULT_DIM_CAP && d.pow(b as u32) <= max_out_dim {
                    grid.push(CheckParams::new().with("d", d).with("a", a).with("b", b));
                }
            }
        }
    }
    grid
}

struct HaarMoment;

impl Check for HaarMoment {
    fn name(&self) -> &'static str {
        "haar_moment"
    }
    fn description(&self) -> &'static str {
        "sample mean of ψ^{⊗t} over Haar ψ equals S_t / C(d+t-1, t)"
    }
    fn kind(&self) -> CheckKind {
        CheckKind::MonteCarlo
    }
    fn defaults(&self) -> CheckParams {
        CheckParams::new().with("d", 2).with("t", 1).with("N", 100_000)
    }
    fn grid(&self) -> Vec<CheckParams> {
        [(2, 1, 100_000), (4, 1, 200_000), (4, 2, 200_000), (2, 3, 200_000)]
            .iter()
            .map(|&(d, t, n)| CheckParams::new().with("d", d).with("t", t).with("N", n))
            .collect()
    }
    fn evaluate(&self, p: &CheckParams, rng: &mut StreamRng) -> Result<CheckReport> {
        let t: usize = p.get("t")?;
        let threshold = p.get_or("threshold", haar_moment_threshold(t))?;
        check_haar_moment(p.get("d")?, t, p.get("N")?, threshold, rng)
    }
}

struct Chiribella;

impl Check for Chiribella {
    fn name(&self) -> &'static str {
        "chiribella"
    }
    fn description(&self) -> &'static str {
        "measure-and-prepare channel equals its optimal-cloning decomposition on symmetric inputs"
    }
    fn kind(&self) -> CheckKind {
        CheckKind::Exact
    }
    fn defaults(&self) -> CheckParams {
        CheckParams::new().with("d", 2).with("a", 1).with("b", 1).with("input", "random")
    }
    fn grid(&self) -> Vec<CheckParams> {
        let mut grid = vec![CheckParams::new().with("input", "basis")];
        grid.extend(channel_grid(usize::MAX));
        grid
    }
    fn evaluate(&self, p: &CheckParams, rng: &mut StreamRng) -> Result<CheckReport> {
        let (d, a, b) = (p.get("d")?, p.get("a")?, p.get("b")?);
        let rho = channel_input(p, d, a, rng)?;
        let mut report = check_chiribella(d, a, b, &rho)?;
        report.params = p.to_string();
        Ok(report)
    }
}

struct MpBound(BoundForm);

impl Check for MpBound {
    fn name(&self) -> &'static str {
        self.0.check_name()
    }
    fn description(&self) -> &'static str {
        match self.0 {
            BoundForm::Derived => "E tr(rho ψ^{⊗a}) ψ^{⊗b} ≥ e^{-ab/d} S_b / (C(a+d-1,a) C(d+b-1,b)) for symmetric rho",
            BoundForm::Displayed => "the same bound without the 1/C(a+d-1,a) factor; fails already at d=2, a=b=1",
        }
    }
    fn kind(&self) -> CheckKind {
        CheckKind::Exact
    }
    fn defaults(&self) -> CheckParams {
        CheckParams::new().with("d", 2).with("a", 1).with("b", 1).with("input", "random")
    }
    fn grid(&self) -> Vec<CheckParams> {
        let mut grid = vec![CheckParams::new().with("input", "basis")];
        grid.extend(channel_grid(256));
        grid
    }
    fn evaluate(&self, p: &CheckParams, rng: &mut StreamRng) -> Result<CheckReport> {
        let (d, a, b) = (p.get("d")?, p.get("a")?, p.get("b")?);
        let rho = channel_input(p, d, a, rng)?;
        let mut report = check_mp_bound(d, a, b, &rho, self.0)?;
        report.params = p.to_string();
        Ok(report)
    }
}

struct PermInequality;

impl Check for PermInequality {
    fn name(&self) -> &'static str {
        "perm_inequality"
    }
    fn description(&self) -> &'static str {
        "permutation sum over S_{x+y} dominates the product of the sums over S_x and S_y"
    }
    fn kind(&self) -> CheckKind {
        CheckKind::Exact
    }
    fn defaults(&self) -> CheckParams {
        CheckParams::new().with("d", 2).with("x", 1).with("y", 1)
    }
    fn grid(&self) -> Vec<CheckParams> {
        let mut grid = Vec::new();
        for d in 2..=4usize {
            for x in 1..=5usize {
                for y in 1..=(6 - x) {
                    grid.push(CheckParams::new().with("d", d).with("x", x).with("y", y));
                }
            }
        }
        grid
    }
    fn evaluate(&self, p: &CheckParams, rng: &mut StreamRng) -> Result<CheckReport> {
        let (d, x, y): (usize, usize, usize) = (p.get("d")?, p.get("x")?, p.get("y")?);
        cap::check_power(d, x + y)?;
        let rho_x = random_state(d.pow(x as u32), rng);
        let rho_y = random_state(d.pow(y as u32), rng);
        check_perm_inequality(&rho_x, x, &rho_y, y, d)
    }
}

struct Stirling;

impl Check for Stirling {
    fn name(&self) -> &'static str {
        "stirling"
    }
    fn description(&self) -> &'static str {
        "Σ_{π ∈ S_t} x^{cycles(π)} equals the rising factorial x (x+1) ⋯ (x+t-1)"
    }
    fn kind(&self) -> CheckKind {
        CheckKind::Exact
    }
    fn defaults(&self) -> CheckParams {
        CheckParams::new().with("t", 3).with("x", 2)
    }
    fn grid(&self) -> Vec<CheckParams> {
        let mut grid = Vec::new();
        for t in 1..=7usize {
            for x in [0.5, 1.0, 2.0, 3.0, 4.0] {
                grid.push(CheckParams::new().with("t", t).with("x", x));
            }
        }
        grid
    }
    fn evaluate(&self, p: &CheckParams, _rng: &mut StreamRng) -> Result<CheckReport> {
        check_stirling_identity(p.get("t")?, p.get("x")?)
    }
}

struct LikelihoodRatio;

impl Check for LikelihoodRatio {
    fn name(&self) -> &'static str {
        "likelihood_ratio"
    }
    fn description(&self) -> &'static str {
        "Monte Carlo leaf likelihood ratio for induced states matches the closed form"
    }
    fn kind(&self) -> CheckKind {
        CheckKind::MonteCarlo
    }
    fn defaults(&self) -> CheckParams {
        CheckParams::new().with("d", 4).with("de", 4).with("T", 2).with("leaf", "equal").with("N", 100_000)
    }
    fn grid(&self) -> Vec<CheckParams> {
        let mut grid = Vec::new();
        for de in [2usize, 4] {
            for t in [2usize, 3] {
                for leaf in ["equal", "distinct"] {
                    grid.push(CheckParams::new().with("de", de).with("T", t).with("leaf", leaf));
                }
            }
        }
        grid
    }
    fn evaluate(&self, p: &CheckParams, rng: &mut StreamRng) -> Result<CheckReport> {
        let (d, t): (usize, usize) = (p.get("d")?, p.get("T")?);
        let leaf = p.get::<LeafShape>("leaf")?.outcomes(t, d)?;
        let mut report = check_likelihood_ratio(d, p.get("de")?, &leaf, p.get("N")?, rng)?;
        report.params = p.to_string();
        Ok(report)
    }
}

struct LikelihoodNormalization;

impl Check for LikelihoodNormalization {
    fn name(&self) -> &'static str {
        "likelihood_normalization"
    }
    fn description(&self) -> &'static str {
        "closed-form likelihood ratio equals d^T q(leaf) from the exact induced moment on every leaf, and averages to 1"
    }
    fn kind(&self) -> CheckKind {
        CheckKind::Exact
    }
    fn defaults(&self) -> CheckParams {
        CheckParams::new().with("d", 2).with("de", 2).with("T", 2)
    }
    fn grid(&self) -> Vec<CheckParams> {
        let mut grid = Vec::new();
        for d in [2usize, 3] {
            for de in [1usize, 2, 4] {
                for t in 1..=3u32 {
                    if (d * de).pow(t) <= 1024 {
                        grid.push(CheckParams::new().with("d", d).with("de", de).with("T", t));
                    }
                }
            }
        }
        grid
    }
    fn evaluate(&self, p: &CheckParams, _rng: &mut StreamRng) -> Result<CheckReport> {
        check_likelihood_normalization(p.get("d")?, p.get("de")?, p.get("T")?)
    }
}

struct CollisionMoments;

impl Check for CollisionMoments {
    fn name(&self) -> &'static str {
        "collision_moments"
    }
    fn description(&self) -> &'static str {
        "pair and triple collision moments of T uniform draws from [d]"
    }
    fn kind(&self) -> CheckKind {
        CheckKind::MonteCarlo
    }
    fn defaults(&self) -> CheckParams {
        CheckParams::new().with("d", 4).with("T", 2).with("N", 100_000)
    }
    fn grid(&self) -> Vec<CheckParams> {
        [(4, 1), (4, 2), (4, 5), (16, 6)].iter().map(|&(d, t)| CheckParams::new().with("d", d).with("T", t)).collect()
    }
    fn evaluate(&self, p: &CheckParams, rng: &mut StreamRng) -> Result<CheckReport> {
        check_collision_moments(p.get("d")?, p.get("T")?, p.get("N")?, rng)
    }
}

struct PovmSwapBound;

impl Check for PovmSwapBound {
    fn name(&self) -> &'static str {
        "povm_swap_bound"
    }
    fn description(&self) -> &'static str {
        "Σ_s tr(F_s SWAP)^2 / tr(F_s) ≤ 2^{k+n} on concrete two-copy POVMs"
    }
    fn kind(&self) -> CheckKind {
        CheckKind::Exact
    }
    fn defaults(&self) -> CheckParams {
        CheckParams::new().with("instance", "computational").with("n", 2).with("k", 0)
    }
    fn grid(&self) -> Vec<CheckParams> {
        let mut grid = Vec::new();
        for n in 1..=3usize {
            grid.push(CheckParams::new().with("instance", "computational").with("n", n).with("k", 0));
            grid.push(CheckParams::new().with("instance", "bell").with("n", n).with("k", n));
        }
        for n in 1..=2usize {
            grid.push(CheckParams::new().with("instance", "haar").with("n", n).with("k", 0));
        }
        grid
    }
    fn evaluate(&self, p: &CheckParams, rng: &mut StreamRng) -> Result<CheckReport> {
        check_povm_swap_bound(p.get::<PovmInstance>("instance")?, p.get("n")?, p.get("k")?, rng)
    }
}

struct InducedMoments;

impl Check for InducedMoments {
    fn name(&self) -> &'static str {
        "induced_moments"
    }
    fn description(&self) -> &'static str {
        "mean and variance of the purity of random induced states"
    }
    fn kind(&self) -> CheckKind {
        CheckKind::MonteCarlo
    }
    fn defaults(&self) -> CheckParams {
        CheckParams::new().with("n", 1).with("de", 2).with("N", 100_000)
    }
    fn grid(&self) -> Vec<CheckParams> {
        [(1, 1), (1, 2), (2, 1), (2, 2), (2, 4)]
            .iter()
            .map(|&(n, de)| CheckParams::new().with("n", n).with("de", de))
            .collect()
    }
    fn evaluate(&self, p: &CheckParams, rng: &mut StreamRng) -> Result<CheckReport> {
        check_induced_moments(p.get("n")?, p.get("de")?, p.get("N")?, rng)
    }
}

/// Name-indexed collection of checks, in registration order.
pub struct CheckRegistry {
    entries: Vec<Box<dyn Check>>,
}

impl CheckRegistry {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(HaarMoment));
        r.register(Box::new(Chiribella));
        r.register(Box::new(MpBound(BoundForm::Derived)));
        r.register(Box::new(MpBound(BoundForm::Displayed)));
        r.register(Box::new(PermInequality));
        r.register(Box::new(LikelihoodRatio));
        r.register(Box::new(LikelihoodNormalization));
        r.register(Box::new(Stirling));
        r.register(Box::new(CollisionMoments));
        r.register(Box::new(PovmSwapBound));
        r.register(Box::new(InducedMoments));
        r
    }

    /// Adds a check, replacing any previous one with the same name.
    pub fn register(&mut self, check: Box<dyn Check>) {
        self.entries.retain(|c| c.name() != check.name());
        self.entries.push(check);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Check> {
        self.entries.iter().find(|c| c.name() == name).map(|c| c.as_ref()).ok_or_else(|| {
            Error::InvalidParameter(format!("unknown check '{name}', expected one of: {}", self.names().join(", ")))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|c| c.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Check> {
        self.entries.iter().map(|c| c.as_ref())
    }

    /// Every grid point of every check of the given kind (all kinds when
    /// `None`), seeded per point from `seed`.
    pub fn run_suite(&self, kind: Option<CheckKind>, seed: u64) -> Result<Vec<CheckReport>> {
        let mut reports = Vec::new();
        for check in self.iter().filter(|c| kind.is_none_or(|k| c.kind() == k)) {
            for (i, params) in check.grid().iter().enumerate() {
                reports.push(check.run(params, crate::rng::derive_seed(seed, i as u64))?);
            }
        }
        Ok(reports)
    }
}

impl Default for CheckRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_resolvable() {
        let r = CheckRegistry::with_defaults();
        let names = r.names();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
        for n in names {
            assert_eq!(r.get(n).unwrap().name(), n);
        }
        assert!(r.get("missing").is_err());
    }

    #[test]
    fn defaults_fill_missing_keys() {
        let r = CheckRegistry::with_defaults();
        let report = r.get("stirling").unwrap().run(&CheckParams::new().with("t", 4), 0).unwrap();
        assert_eq!(report.params, "t=4;x=2");
        assert!(report.passed);
    }

    #[test]
    fn displayed_bound_reported_failing_at_smallest_case() {
        let r = CheckRegistry::with_defaults();
        let p = CheckParams::new().with("input", "basis");
        assert!(r.get("mp_bound").unwrap().run(&p, 0).unwrap().passed);
        assert!(!r.get("mp_bound_displayed").unwrap().run(&p, 0).unwrap().passed);
    }
}
