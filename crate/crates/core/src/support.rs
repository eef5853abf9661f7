//! Support inequalities, objective vector and the support-only optimum.
//!
//! Support rows come in a fixed order:
//! `x_j <= alpha` for `j = 1..n`, then `-x_j <= 0` for `j = 1..n`, then the
//! diagonal cut `x_1 + ... + x_n <= (n-1)*alpha + alpha/2`.

use crate::model::Inequality;

/// Right-hand side of the diagonal cut.
pub fn cut_bound(n: usize, alpha: f64) -> f64 {
    (n as f64 - 1.0) * alpha + alpha / 2.0
}

pub fn build_support(n: usize, alpha: f64) -> Vec<Inequality> {
    assert!(n >= 1, "dimension must be positive");
    let unit = |j: usize, value: f64| {
        let mut a = vec![0.0; n];
        a[j] = value;
        a
    };
    let mut rows = Vec::with_capacity(2 * n + 1);
    rows.extend((0..n).map(|j| Inequality::new(unit(j, 1.0), alpha)));
    rows.extend((0..n).map(|j| Inequality::new(unit(j, -1.0), 0.0)));
    rows.push(Inequality::new(vec![1.0; n], cut_bound(n, alpha)));
    rows
}

/// `theta * (n, n-1, ..., 1)`.
pub fn build_objective(n: usize, theta: f64) -> Vec<f64> {
    (0..n).map(|j| theta * (n - j) as f64).collect()
}

/// `(alpha, ..., alpha, alpha/2)`: the unique maximizer when there are no
/// random inequalities.
pub fn support_only_solution(n: usize, alpha: f64) -> Vec<f64> {
    assert!(n >= 1, "dimension must be positive");
    let mut x = vec![alpha; n];
    x[n - 1] = alpha / 2.0;
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dot;

    fn row(a: &[f64], b: f64) -> Inequality {
        Inequality::new(a.to_vec(), b)
    }

    #[test]
    fn two_dimensional_support() {
        assert_eq!(
            build_support(2, 200.0),
            vec![
                row(&[1.0, 0.0], 200.0),
                row(&[0.0, 1.0], 200.0),
                row(&[-1.0, 0.0], 0.0),
                row(&[0.0, -1.0], 0.0),
                row(&[1.0, 1.0], 300.0),
            ]
        );
    }

    #[test]
    fn one_dimensional_support() {
        assert_eq!(
            build_support(1, 200.0),
            vec![row(&[1.0], 200.0), row(&[-1.0], 0.0), row(&[1.0], 100.0)]
        );
    }

    #[test]
    fn three_dimensional_cut() {
        let s = build_support(3, 200.0);
        assert_eq!(s.len(), 7);
        assert_eq!(s[6], row(&[1.0, 1.0, 1.0], 500.0));
    }

    #[test]
    fn objective_examples() {
        assert_eq!(build_objective(3, 100.0), vec![300.0, 200.0, 100.0]);
        assert_eq!(build_objective(1, 100.0), vec![100.0]);
        assert_eq!(build_objective(2, 100.0), vec![200.0, 100.0]);
    }

    #[test]
    fn solution_examples() {
        assert_eq!(support_only_solution(2, 200.0), vec![200.0, 100.0]);
        assert_eq!(support_only_solution(1, 200.0), vec![100.0]);
        assert_eq!(support_only_solution(3, 200.0), vec![200.0, 200.0, 100.0]);
    }

    #[test]
    fn solution_is_feasible_and_binds_n_rows() {
        for n in 1..=100 {
            for alpha in [1.0, 200.0, 1e6] {
                let x = support_only_solution(n, alpha);
                let mut binding = Vec::new();
                for (i, q) in build_support(n, alpha).iter().enumerate() {
                    let lhs = dot(&q.a, &x);
                    assert!(lhs <= q.b, "n={n} alpha={alpha} row {i}");
                    if lhs == q.b {
                        binding.push(i);
                    }
                }
                let mut expected: Vec<usize> = (0..n - 1).collect();
                expected.push(2 * n);
                assert_eq!(binding, expected, "n={n} alpha={alpha}");
            }
        }
    }

    #[test]
    fn support_row_shape() {
        for n in [1, 2, 10] {
            let s = build_support(n, 200.0);
            for q in &s[..2 * n] {
                let nonzero: Vec<f64> = q.a.iter().copied().filter(|x| *x != 0.0).collect();
                assert_eq!(nonzero.len(), 1);
                assert_eq!(nonzero[0].abs(), 1.0);
            }
            assert!(s[2 * n].a.iter().all(|x| *x == 1.0));
        }
    }
}
