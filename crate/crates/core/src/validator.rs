//! Post-hoc checks of generated instances, and a vertex-enumeration oracle
//! for the optimum of the support-only problem in low dimension.

use std::fmt;

use thiserror::Error;

use crate::geometry::{
    distance_to_center, dot, objective_value, project_center, CenterPoint, NormalizedInequality,
};
use crate::model::{Inequality, LpInstance};
use crate::support::{build_objective, build_support, support_only_solution};

/// Relative slack for the non-strict conditions.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    /// `m = 2n + 1 + d`, with row counts matching the parameters.
    ConstraintCount,
    /// Support rows differ from the canonical support system.
    SupportMismatch,
    /// Objective differs from `theta * (n, ..., 1)`.
    ObjectiveMismatch,
    /// The hypercube center violates the constraint.
    CenterFeasibility,
    /// Center distance outside `(rho, theta]`.
    DistanceBand,
    /// Projection of the center does not improve the objective.
    ObjectiveImprovement,
    /// Two constraints are similar.
    Likeness,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ConstraintCount => "constraint count",
            Self::SupportMismatch => "support system",
            Self::ObjectiveMismatch => "objective vector",
            Self::CenterFeasibility => "center feasibility",
            Self::DistanceBand => "distance band",
            Self::ObjectiveImprovement => "objective improvement",
            Self::Likeness => "dissimilarity",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Row in the full constraint list (support first), if the violation
    /// belongs to a single row. For likeness this is the later row of the pair.
    pub index: Option<usize>,
    /// The other row of a similar pair.
    pub other: Option<usize>,
    pub condition: Condition,
    pub measured: f64,
    pub bound: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.index, self.other) {
            (Some(i), Some(j)) => write!(f, "rows {j} and {i}: ")?,
            (Some(i), None) => write!(f, "row {i}: ")?,
            _ => {}
        }
        write!(
            f,
            "{} violated (measured {}, bound {})",
            self.condition, self.measured, self.bound
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, condition: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }
}

fn slack(scale: f64) -> f64 {
    TOLERANCE * scale.abs().max(1.0)
}

/// Re-checks every generation condition on `inst`.
///
/// Strict conditions (`dist > rho`, objective improvement) are checked with
/// no slack; non-strict ones allow [`TOLERANCE`] relative slack. Likeness is
/// checked for every pair among all constraints.
pub fn validate_instance(inst: &LpInstance) -> ValidationReport {
    let p = &inst.params;
    let n = p.n;
    let mut report = ValidationReport::default();
    let mut push = |index, other, condition, measured, bound| {
        report.violations.push(Violation {
            index,
            other,
            condition,
            measured,
            bound,
        })
    };

    let rows: Vec<&Inequality> = inst.constraints().collect();
    let expected_m = 2 * n + 1 + p.d;
    let shape_ok = inst.objective.len() == n && rows.iter().all(|q| q.a.len() == n);
    if inst.m() != expected_m || inst.support.len() != 2 * n + 1 || !shape_ok {
        push(
            None,
            None,
            Condition::ConstraintCount,
            inst.m() as f64,
            expected_m as f64,
        );
    }
    if !shape_ok || n == 0 {
        // Nothing below is meaningful with ragged dimensions.
        return report;
    }
    if inst.support != build_support(n, p.alpha) {
        push(None, None, Condition::SupportMismatch, f64::NAN, f64::NAN);
    }
    if inst.objective != build_objective(n, p.theta) {
        push(None, None, Condition::ObjectiveMismatch, f64::NAN, f64::NAN);
    }

    let h = CenterPoint::new(n, p.alpha);
    let center_value = objective_value(&inst.objective, h.coords());
    let support_len = inst.support.len();
    let mut normalized = Vec::with_capacity(rows.len());
    for (i, q) in rows.iter().enumerate() {
        let lhs = dot(&q.a, h.coords());
        if !(lhs <= q.b + slack(q.b)) {
            push(Some(i), None, Condition::CenterFeasibility, lhs, q.b);
        }
        let Ok(norm_q) = NormalizedInequality::of(q) else {
            push(Some(i), None, Condition::DistanceBand, 0.0, p.theta);
            normalized.push(None);
            continue;
        };
        normalized.push(Some(norm_q));
        if i < support_len {
            continue;
        }
        let dist = distance_to_center(&h, q).expect("nonzero normal");
        if !(p.rho < dist && dist <= p.theta + slack(p.theta)) {
            let bound = if dist <= p.rho { p.rho } else { p.theta };
            push(Some(i), None, Condition::DistanceBand, dist, bound);
        }
        let projected = project_center(&h, q).expect("nonzero normal");
        let value = objective_value(&inst.objective, &projected);
        if !(value > center_value) {
            push(
                Some(i),
                None,
                Condition::ObjectiveImprovement,
                value,
                center_value,
            );
        }
    }

    for i in 0..normalized.len() {
        let Some(qi) = &normalized[i] else { continue };
        for (j, qj) in normalized.iter().enumerate().take(i) {
            let Some(qj) = qj else { continue };
            if qi.is_like(qj, p.l_max, p.s_min) {
                push(
                    Some(i),
                    Some(j),
                    Condition::Likeness,
                    qi.direction_gap(qj),
                    p.l_max,
                );
            }
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("vertex enumeration supports 1 ≤ n ≤ 3, got n = {0}")]
    UnsupportedDimension(usize),
    #[error("alpha and theta must be positive")]
    InvalidParams,
}

/// Result of enumerating the vertices of the support polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportOracle {
    pub vertices: Vec<Vec<f64>>,
    /// A maximizer of the objective among the vertices.
    pub optimum: Vec<f64>,
    pub value: f64,
    /// Whether `(alpha, ..., alpha, alpha/2)` is the unique maximizer.
    pub confirmed: bool,
}

pub const ORACLE_MAX_DIMENSION: usize = 3;

/// Enumerates all vertices of the support polytope (every `n`-subset of the
/// `2n + 1` boundary hyperplanes, solved directly, kept when feasible) and
/// checks that the known support-only solution is the unique maximizer.
pub fn verify_support_solution(
    n: usize,
    alpha: f64,
    theta: f64,
) -> Result<SupportOracle, OracleError> {
    if n == 0 || n > ORACLE_MAX_DIMENSION {
        return Err(OracleError::UnsupportedDimension(n));
    }
    if !(alpha > 0.0 && theta > 0.0) {
        return Err(OracleError::InvalidParams);
    }
    let rows = build_support(n, alpha);
    let c = build_objective(n, theta);
    let scale = alpha * n as f64;
    let feasible = |x: &[f64]| rows.iter().all(|q| dot(&q.a, x) <= q.b + slack(scale));
    let same = |x: &[f64], y: &[f64]| x.iter().zip(y).all(|(a, b)| (a - b).abs() <= slack(scale));

    let mut vertices: Vec<Vec<f64>> = Vec::new();
    for subset in combinations(rows.len(), n) {
        let matrix: Vec<Vec<f64>> = subset.iter().map(|&i| rows[i].a.clone()).collect();
        let rhs: Vec<f64> = subset.iter().map(|&i| rows[i].b).collect();
        let Some(x) = solve(matrix, rhs) else {
            continue;
        };
        if feasible(&x) && !vertices.iter().any(|v| same(v, &x)) {
            vertices.push(x);
        }
    }

    let values: Vec<f64> = vertices.iter().map(|v| objective_value(&c, v)).collect();
    let best = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v > values[best] { i } else { best });
    let value = values[best];
    let optimum = vertices[best].clone();
    let maximizers = values
        .iter()
        .filter(|v| (**v - value).abs() <= slack(value))
        .count();
    let expected = support_only_solution(n, alpha);
    let confirmed = maximizers == 1 && same(&optimum, &expected);
    Ok(SupportOracle {
        vertices,
        optimum,
        value,
        confirmed,
    })
}

/// All `k`-subsets of `0..len` in lexicographic order.
fn combinations(len: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, len: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..len {
            cur.push(i);
            rec(i + 1, len, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, len, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Gaussian elimination with partial pivoting; `None` for singular systems.
fn solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            let (upper, lower) = m.split_at_mut(row);
            for (target, source) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *target -= factor * source;
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| m[row][k] * x[k]).sum();
        x[row] = (rhs[row] - tail) / m[row][row];
    }
    Some(x)
}
