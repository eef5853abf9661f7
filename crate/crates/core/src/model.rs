//! Parameter set and instance data model shared by the rest of the crate.

use std::fmt;
use std::time::Duration;

/// Every knob of the generator.
///
/// `Default` gives the two-dimensional reference configuration:
/// `alpha = 200`, `theta = 100`, `rho = 50`, `l_max = 0.35`, `s_min = 100`,
/// `a_max = 1000`, `b_max = 10000`, with `n = 2`, `d = 5`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    /// Space dimension.
    pub n: usize,
    /// Number of random inequalities to add.
    pub d: usize,
    /// Edge length of the bounding hypercube.
    pub alpha: f64,
    /// Radius of the large hypersphere around the hypercube center.
    pub theta: f64,
    /// Radius of the small hypersphere around the hypercube center.
    pub rho: f64,
    /// Upper bound on the distance between unit normals for two hyperplanes
    /// to count as nearly parallel.
    pub l_max: f64,
    /// Upper bound on the gap between normalized constant terms for two
    /// hyperplanes to count as nearly concurrent.
    pub s_min: f64,
    /// Magnitude bound of random coefficients.
    pub a_max: f64,
    /// Magnitude bound of random constant terms.
    pub b_max: f64,
    pub seed: u64,
    /// Worker count for the parallel engine.
    pub workers: usize,
    /// Draw budget per accepted inequality before generation is declared stalled.
    pub max_attempts: u64,
}

pub const DEFAULT_MAX_ATTEMPTS: u64 = 1_000_000;

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            n: 2,
            d: 5,
            alpha: 200.0,
            theta: 100.0,
            rho: 50.0,
            l_max: 0.35,
            s_min: 100.0,
            a_max: 1000.0,
            b_max: 10_000.0,
            seed: 0,
            workers: 1,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }
}

/// A violated parameter constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamViolation {
    DimensionZero,
    WorkersZero,
    MaxAttemptsZero,
    AlphaNotPositive,
    ThetaNotPositive,
    RhoNotPositive,
    LMaxNotPositive,
    SMinNotPositive,
    AMaxNotPositive,
    BMaxNotPositive,
    ThetaAboveHalfAlpha,
    RhoNotBelowTheta,
    LMaxAboveBound,
}

impl ParamViolation {
    /// The constraint as written in diagnostics.
    pub fn constraint(&self) -> &'static str {
        match self {
            Self::DimensionZero => "n ≥ 1",
            Self::WorkersZero => "workers ≥ 1",
            Self::MaxAttemptsZero => "max_attempts ≥ 1",
            Self::AlphaNotPositive => "alpha > 0",
            Self::ThetaNotPositive => "theta > 0",
            Self::RhoNotPositive => "rho > 0",
            Self::LMaxNotPositive => "l_max > 0",
            Self::SMinNotPositive => "s_min > 0",
            Self::AMaxNotPositive => "a_max > 0",
            Self::BMaxNotPositive => "b_max > 0",
            Self::ThetaAboveHalfAlpha => "theta ≤ alpha/2",
            Self::RhoNotBelowTheta => "rho < theta",
            Self::LMaxAboveBound => "l_max ≤ 0.7",
        }
    }
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.constraint())
    }
}

/// Largest admissible near-parallelism bound.
pub const L_MAX_BOUND: f64 = 0.7;

/// Checks every parameter constraint and returns all of the violated ones.
///
/// Non-finite reals fail their positivity checks.
pub fn validate_params(p: &GeneratorParams) -> Result<(), Vec<ParamViolation>> {
    use ParamViolation::*;
    let positive = |x: f64| x.is_finite() && x > 0.0;
    let mut violations = Vec::new();
    if p.n == 0 {
        violations.push(DimensionZero);
    }
    if p.workers == 0 {
        violations.push(WorkersZero);
    }
    if p.max_attempts == 0 {
        violations.push(MaxAttemptsZero);
    }
    let checks = [
        (p.alpha, AlphaNotPositive),
        (p.theta, ThetaNotPositive),
        (p.rho, RhoNotPositive),
        (p.l_max, LMaxNotPositive),
        (p.s_min, SMinNotPositive),
        (p.a_max, AMaxNotPositive),
        (p.b_max, BMaxNotPositive),
    ];
    for (value, violation) in checks {
        if !positive(value) {
            violations.push(violation);
        }
    }
    if !(p.theta <= p.alpha / 2.0) {
        violations.push(ThetaAboveHalfAlpha);
    }
    if !(p.rho < p.theta) {
        violations.push(RhoNotBelowTheta);
    }
    if !(p.l_max <= L_MAX_BOUND) {
        violations.push(LMaxAboveBound);
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Formats a violation list as one line, for error messages.
pub fn describe_violations(violations: &[ParamViolation]) -> String {
    violations
        .iter()
        .map(|v| v.constraint())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Linear inequality `<a, x> <= b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Inequality {
    pub a: Vec<f64>,
    pub b: f64,
}

impl Inequality {
    pub fn new(a: Vec<f64>, b: f64) -> Self {
        Self { a, b }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn norm(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// The same halfspace boundary with the inequality reversed:
    /// `-<a, x> <= -b`.
    pub fn flipped(&self) -> Self {
        Self {
            a: self.a.iter().map(|x| -x).collect(),
            b: -self.b,
        }
    }
}

/// A generated problem: maximize `<objective, x>` subject to the support
/// inequalities followed by the random ones.
#[derive(Debug, Clone, PartialEq)]
pub struct LpInstance {
    pub params: GeneratorParams,
    pub support: Vec<Inequality>,
    pub random: Vec<Inequality>,
    pub objective: Vec<f64>,
}

impl LpInstance {
    pub fn n(&self) -> usize {
        self.objective.len()
    }

    pub fn d(&self) -> usize {
        self.random.len()
    }

    /// Total constraint count.
    pub fn m(&self) -> usize {
        self.support.len() + self.random.len()
    }

    /// All constraints, support rows first.
    pub fn constraints(&self) -> impl Iterator<Item = &Inequality> + '_ {
        self.support.iter().chain(self.random.iter())
    }
}

/// Rejection tallies of one generation run.
///
/// For the parallel engine, `rejected_similarity` counts rejections made on
/// both sides of the protocol; `coordinator_rejected_similarity` is the
/// coordinator's share of it, and `discarded` counts surviving candidates
/// dropped because the target count was reached mid-round. For every
/// completed run:
///
/// `candidates_drawn = accepted + rejected_distance + rejected_objective
///  + rejected_similarity + discarded`
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GenerationStats {
    pub candidates_drawn: u64,
    pub accepted: u64,
    pub rejected_distance: u64,
    pub rejected_objective: u64,
    pub rejected_similarity: u64,
    pub coordinator_rejected_similarity: u64,
    pub discarded: u64,
    pub rounds: u64,
    pub wall_time: Duration,
}

impl GenerationStats {
    pub fn total_rejected(&self) -> u64 {
        self.rejected_distance + self.rejected_objective + self.rejected_similarity
    }

    /// Whether the conservation identity holds.
    pub fn is_balanced(&self) -> bool {
        self.candidates_drawn == self.accepted + self.total_rejected() + self.discarded
    }

    /// Adds another tally into this one. Wall time and rounds are left alone.
    pub fn absorb(&mut self, other: &GenerationStats) {
        self.candidates_drawn += other.candidates_drawn;
        self.accepted += other.accepted;
        self.rejected_distance += other.rejected_distance;
        self.rejected_objective += other.rejected_objective;
        self.rejected_similarity += other.rejected_similarity;
        self.coordinator_rejected_similarity += other.coordinator_rejected_similarity;
        self.discarded += other.discarded;
    }
}
