//! Geometric kernel: objective value, hypercube center, distance from the
//! center to a hyperplane, orthogonal projection of the center, and the
//! likeness predicate between two inequalities.

use crate::model::Inequality;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("inequality has a zero coefficient vector")]
    ZeroNorm,
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "dimension mismatch");
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Value of the objective `<c, x>` at `x`.
pub fn objective_value(c: &[f64], x: &[f64]) -> f64 {
    dot(c, x)
}

/// Center `(alpha/2, ..., alpha/2)` of the bounding hypercube.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterPoint(Vec<f64>);

impl CenterPoint {
    pub fn new(n: usize, alpha: f64) -> Self {
        Self(vec![alpha / 2.0; n])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

fn checked_norm(q: &Inequality) -> Result<f64, GeometryError> {
    let norm = q.norm();
    if norm > 0.0 {
        Ok(norm)
    } else {
        Err(GeometryError::ZeroNorm)
    }
}

/// Euclidean distance from `h` to the hyperplane `<a, x> = b`.
pub fn distance_to_center(h: &CenterPoint, q: &Inequality) -> Result<f64, GeometryError> {
    let norm = checked_norm(q)?;
    Ok((dot(&q.a, h.coords()) - q.b).abs() / norm)
}

/// Orthogonal projection of `h` onto the hyperplane `<a, x> = b`.
pub fn project_center(h: &CenterPoint, q: &Inequality) -> Result<Vec<f64>, GeometryError> {
    let norm = checked_norm(q)?;
    let t = (dot(&q.a, h.coords()) - q.b) / (norm * norm);
    Ok(h.coords()
        .iter()
        .zip(&q.a)
        .map(|(hj, aj)| hj - t * aj)
        .collect())
}

/// An inequality rescaled so that its normal has unit length:
/// `unit = a/|a|`, `offset = b/|a|`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedInequality {
    pub unit: Vec<f64>,
    pub offset: f64,
}

impl NormalizedInequality {
    pub fn of(q: &Inequality) -> Result<Self, GeometryError> {
        let norm = checked_norm(q)?;
        Ok(Self {
            unit: q.a.iter().map(|x| x / norm).collect(),
            offset: q.b / norm,
        })
    }

    /// `|unit - other.unit|`.
    pub fn direction_gap(&self, other: &Self) -> f64 {
        assert_eq!(self.unit.len(), other.unit.len(), "dimension mismatch");
        self.unit
            .iter()
            .zip(&other.unit)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    pub fn offset_gap(&self, other: &Self) -> f64 {
        (self.offset - other.offset).abs()
    }

    /// Nearly parallel and nearly concurrent, both bounds strict.
    pub fn is_like(&self, other: &Self, l_max: f64, s_min: f64) -> bool {
        // Offset first: it is O(1) and the conjunction does not care about order.
        self.offset_gap(other) < s_min && self.direction_gap(other) < l_max
    }
}

/// Whether two inequalities are similar: unit normals closer than `l_max`
/// and normalized constant terms closer than `s_min`.
pub fn likeness(
    q1: &Inequality,
    q2: &Inequality,
    l_max: f64,
    s_min: f64,
) -> Result<bool, GeometryError> {
    let n1 = NormalizedInequality::of(q1)?;
    let n2 = NormalizedInequality::of(q2)?;
    Ok(n1.is_like(&n2, l_max, s_min))
}
