//! Two-dimensional principal component projection for neighborhood plots.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Smallest loading magnitude considered nonzero when fixing component signs.
const SIGN_EPS: f64 = 1e-12;

/// Result of projecting a point set onto its top two principal axes.
#[derive(Debug, Clone)]
pub struct Pca2d {
    /// One (pc1, pc2) pair per input vector, in input order.
    pub points: Vec<[f64; 2]>,
    /// Fraction of total centered variance captured by each axis.
    pub explained: [f64; 2],
}

/// Project `vectors` (all of one dimension >= 2) onto their top two
/// principal components.
///
/// Components are eigenvectors of the sample covariance matrix (divisor
/// n - 1), ordered by descending eigenvalue. Each component's sign is fixed
/// so its first nonzero loading is positive, making the output deterministic.
pub fn pca_2d(vectors: &[Vec<f64>]) -> Result<Pca2d> {
    let n = vectors.len();
    if n < 2 {
        return Err(Error::PcaInput(format!(
            "need at least 2 points, got {n}"
        )));
    }
    let dim = vectors[0].len();
    if dim < 2 {
        return Err(Error::PcaInput(format!(
            "need dimension of at least 2, got {dim}"
        )));
    }
    if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: bad.len(),
        });
    }

    let mut mean = vec![0.0; dim];
    for v in vectors {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }

    let centered = DMatrix::from_fn(n, dim, |i, j| vectors[i][j] - mean[j]);
    let cov = centered.transpose() * &centered / (n as f64 - 1.0);
    let total: f64 = cov.diagonal().iter().sum();
    if total <= 0.0 {
        return Err(Error::PcaInput(
            "all points are identical; no variance to project".into(),
        ));
    }

    let eigen = cov.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eigen.eigenvalues[j].total_cmp(&eigen.eigenvalues[i]));

    let mut axes: Vec<DVector<f64>> = Vec::with_capacity(2);
    let mut explained = [0.0; 2];
    for (k, &idx) in order.iter().take(2).enumerate() {
        let mut axis: DVector<f64> = eigen.eigenvectors.column(idx).into_owned();
        if let Some(first) = axis.iter().copied().find(|x| x.abs() > SIGN_EPS) {
            if first < 0.0 {
                axis.neg_mut();
            }
        }
        explained[k] = eigen.eigenvalues[idx].max(0.0) / total;
        axes.push(axis);
    }

    let points = (0..n)
        .map(|i| {
            let row = centered.row(i);
            [(&row * &axes[0])[(0, 0)], (&row * &axes[1])[(0, 0)]]
        })
        .collect();

    Ok(Pca2d { points, explained })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Independent eigensolver: cyclic Jacobi rotations on the covariance
    /// matrix, built without nalgebra's decomposition code.
    fn jacobi_pca_oracle(vectors: &[Vec<f64>]) -> (Vec<[f64; 2]>, [f64; 2]) {
        let n = vectors.len();
        let d = vectors[0].len();
        let mut mean = vec![0.0; d];
        for v in vectors {
            for j in 0..d {
                mean[j] += v[j] / n as f64;
            }
        }
        let centered: Vec<Vec<f64>> = vectors
            .iter()
            .map(|v| (0..d).map(|j| v[j] - mean[j]).collect())
            .collect();
        let mut a = vec![vec![0.0; d]; d];
        for row in &centered {
            for i in 0..d {
                for j in 0..d {
                    a[i][j] += row[i] * row[j] / (n as f64 - 1.0);
                }
            }
        }
        // v starts as identity and accumulates the rotations.
        let mut v = vec![vec![0.0; d]; d];
        for (i, row) in v.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        for _ in 0..100 {
            let mut off = 0.0;
            for i in 0..d {
                for j in i + 1..d {
                    off += a[i][j] * a[i][j];
                }
            }
            if off < 1e-24 {
                break;
            }
            for p in 0..d {
                for q in p + 1..d {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = 0.5 * (2.0 * a[p][q]).atan2(a[q][q] - a[p][p]);
                    // Standard Jacobi rotation angle; use the form that zeroes
                    // a[p][q]: tan(2t) = 2*a_pq / (a_qq - a_pp).
                    let (s, c) = theta.sin_cos();
                    for k in 0..d {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..d {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                    for k in 0..d {
                        let vkp = v[k][p];
                        let vkq = v[k][q];
                        v[k][p] = c * vkp - s * vkq;
                        v[k][q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut eigs: Vec<(f64, Vec<f64>)> = (0..d)
            .map(|j| (a[j][j], (0..d).map(|i| v[i][j]).collect()))
            .collect();
        eigs.sort_by(|x, y| y.0.total_cmp(&x.0));
        let total: f64 = eigs.iter().map(|e| e.0).sum();
        let mut axes: Vec<Vec<f64>> = Vec::new();
        for (_, mut axis) in eigs.iter().take(2).cloned() {
            if let Some(&first) = axis.iter().find(|x| x.abs() > 1e-12) {
                if first < 0.0 {
                    for x in &mut axis {
                        *x = -*x;
                    }
                }
            }
            axes.push(axis);
        }
        let points = centered
            .iter()
            .map(|row| {
                [
                    row.iter().zip(&axes[0]).map(|(a, b)| a * b).sum(),
                    row.iter().zip(&axes[1]).map(|(a, b)| a * b).sum(),
                ]
            })
            .collect();
        (points, [eigs[0].0 / total, eigs[1].0 / total])
    }

    fn deterministic_points(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        (0..n)
            .map(|_| (0..d).map(|j| next() * (j + 1) as f64).collect())
            .collect()
    }

    #[test]
    fn matches_jacobi_oracle() {
        for seed in [3u64, 17, 99] {
            for d in [2usize, 3, 6] {
                let pts = deterministic_points(12, d, seed);
                let got = pca_2d(&pts).unwrap();
                let (oracle_pts, oracle_expl) = jacobi_pca_oracle(&pts);
                for (g, o) in got.points.iter().zip(&oracle_pts) {
                    assert_relative_eq!(g[0], o[0], epsilon = 1e-8, max_relative = 1e-6);
                    assert_relative_eq!(g[1], o[1], epsilon = 1e-8, max_relative = 1e-6);
                }
                assert_relative_eq!(got.explained[0], oracle_expl[0], epsilon = 1e-8);
                assert_relative_eq!(got.explained[1], oracle_expl[1], epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn collinear_points_collapse_to_first_axis() {
        let dir = [1.0, -2.0, 0.5];
        let pts: Vec<Vec<f64>> = (0..6)
            .map(|i| dir.iter().map(|&d| d * i as f64).collect())
            .collect();
        let got = pca_2d(&pts).unwrap();
        assert_relative_eq!(got.explained[0], 1.0, epsilon = 1e-8);
        for p in &got.points {
            assert!(p[1].abs() < 1e-8, "second coordinate {} not zero", p[1]);
        }
    }

    #[test]
    fn explained_fractions_sum_to_at_most_one() {
        let pts = deterministic_points(20, 5, 42);
        let got = pca_2d(&pts).unwrap();
        assert!(got.explained[0] >= got.explained[1]);
        assert!(got.explained[1] >= 0.0);
        assert!(got.explained[0] + got.explained[1] <= 1.0 + 1e-12);
    }

    #[test]
    fn eigenvalue_mass_equals_centered_variance() {
        let pts = deterministic_points(15, 4, 7);
        let n = pts.len();
        let d = pts[0].len();
        let mut mean = vec![0.0; d];
        for v in &pts {
            for j in 0..d {
                mean[j] += v[j] / n as f64;
            }
        }
        let total_var: f64 = pts
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&mean)
                    .map(|(x, m)| (x - m) * (x - m))
                    .sum::<f64>()
            })
            .sum::<f64>()
            / (n as f64 - 1.0);
        // Projected variance along each axis equals its eigenvalue; recover
        // the eigenvalues from the projected coordinates themselves.
        let got = pca_2d(&pts).unwrap();
        for k in 0..2 {
            let var_k: f64 =
                got.points.iter().map(|p| p[k] * p[k]).sum::<f64>() / (n as f64 - 1.0);
            assert_relative_eq!(var_k, got.explained[k] * total_var, epsilon = 1e-8);
        }
    }

    #[test]
    fn identical_points_rejected() {
        let pts = vec![vec![1.0, 2.0]; 4];
        assert!(pca_2d(&pts).is_err());
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        let pts = vec![vec![1.0, 2.0], vec![1.0, 2.0, 3.0]];
        assert!(pca_2d(&pts).is_err());
    }

    #[test]
    fn rejects_too_few_points_or_dims() {
        assert!(pca_2d(&[vec![1.0, 2.0]]).is_err());
        assert!(pca_2d(&[vec![1.0], vec![2.0]]).is_err());
    }
}
