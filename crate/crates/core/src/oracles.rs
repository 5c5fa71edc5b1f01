//! Deliberately naive reference implementations.
//!
//! Everything here trades speed for transparency and stays independent of
//! the code paths it cross-checks: least squares through the normal
//! equations instead of an orthogonal factorization, isometry constants from
//! a dense grid instead of eigenvalues, and regularized selection by full
//! subset enumeration instead of the band scan.

use alloc::vec;
use alloc::vec::Vec;

use crate::mat::{abs, dot, DenseMatrix};
use crate::model::rip::supports;
use crate::{Error, Result};

/// Solves `min ||y - A c||` through the normal equations
/// `(AᵀA) c = Aᵀ y` with Gaussian elimination and partial pivoting.
pub fn normal_equations_solve(a: &DenseMatrix, y: &[f64]) -> Result<Vec<f64>> {
    if y.len() != a.rows() || a.cols() > a.rows() {
        return Err(Error::BadDimensions);
    }
    let k = a.cols();
    let at = a.transpose();
    let gram = at.matmul(a);
    let rhs = a.matvec_t(y);
    // Augmented elimination.
    let mut aug = DenseMatrix::from_fn(k, k + 1, |r, c| if c < k { gram[(r, c)] } else { rhs[r] });
    for col in 0..k {
        let mut pivot_row = col;
        let mut pivot = abs(aug[(col, col)]);
        for r in col + 1..k {
            if abs(aug[(r, col)]) > pivot {
                pivot = abs(aug[(r, col)]);
                pivot_row = r;
            }
        }
        if pivot == 0.0 {
            return Err(Error::RankDeficient);
        }
        if pivot_row != col {
            for c in 0..=k {
                let tmp = aug[(col, c)];
                aug[(col, c)] = aug[(pivot_row, c)];
                aug[(pivot_row, c)] = tmp;
            }
        }
        for r in col + 1..k {
            let factor = aug[(r, col)] / aug[(col, col)];
            if factor != 0.0 {
                for c in col..=k {
                    let v = aug[(col, c)];
                    aug[(r, c)] -= factor * v;
                }
            }
        }
    }
    let mut coeffs = vec![0.0; k];
    for r in (0..k).rev() {
        let mut s = aug[(r, k)];
        for c in r + 1..k {
            s -= aug[(r, c)] * coeffs[c];
        }
        coeffs[r] = s / aug[(r, r)];
    }
    Ok(coeffs)
}

/// Order-2 isometry constant by direct evaluation on a dense grid of
/// unit-norm 2-sparse vectors: for every support pair `{i, j}` the defect
/// `| ||Phi x||^2 - 1 |` is maximized over `x = cos(t) e_i + sin(t) e_j`.
///
/// With `grid_points` around 10^4 the result is within about `1e-7` of the
/// true constant.
pub fn rip_grid_2sparse(phi: &DenseMatrix, grid_points: usize) -> f64 {
    assert!(grid_points >= 2);
    let n = phi.cols();
    let cols: Vec<Vec<f64>> = (0..n).map(|c| phi.column(c)).collect();
    let mut worst = 0.0_f64;
    for pair in supports(n, 2) {
        let (ci, cj) = (&cols[pair[0]], &cols[pair[1]]);
        for g in 0..grid_points {
            let t = core::f64::consts::PI * g as f64 / grid_points as f64;
            let (s, c) = num_traits::Float::sin_cos(t);
            let mut sq = 0.0;
            for r in 0..phi.rows() {
                let v = c * ci[r] + s * cj[r];
                sq += v * v;
            }
            let defect = abs(sq - 1.0);
            if defect > worst {
                worst = defect;
            }
        }
    }
    worst
}

/// Maximal-energy regularized subset by enumerating every nonempty subset of
/// the candidates (indices with values; at most ~20 candidates). A subset
/// qualifies when all its magnitudes lie within a factor 2 of each other;
/// energy ties are broken toward the subset whose smallest magnitude sits at
/// the smallest original index. Returns indices ascending.
pub fn regularized_subset_bruteforce(candidates: &[(usize, f64)]) -> Vec<usize> {
    assert!(!candidates.is_empty() && candidates.len() <= 20);
    let n = candidates.len();
    let mut best_energy = f64::NEG_INFINITY;
    let mut best_floor_index = usize::MAX;
    let mut best: Vec<usize> = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let mut min_mag = f64::INFINITY;
        let mut max_mag = 0.0_f64;
        let mut energy = 0.0;
        let mut floor_index = usize::MAX;
        for (b, &(idx, v)) in candidates.iter().enumerate() {
            if mask & (1 << b) != 0 {
                let mag = abs(v);
                if mag < min_mag || (mag == min_mag && idx < floor_index) {
                    floor_index = idx;
                }
                min_mag = min_mag.min(mag);
                max_mag = max_mag.max(mag);
                energy += v * v;
            }
        }
        if max_mag > 2.0 * min_mag {
            continue;
        }
        if energy > best_energy || (energy == best_energy && floor_index < best_floor_index) {
            best_energy = energy;
            best_floor_index = floor_index;
            best = candidates
                .iter()
                .enumerate()
                .filter(|&(b, _)| mask & (1 << b) != 0)
                .map(|(_, &(idx, _))| idx)
                .collect();
        }
    }
    best.sort_unstable();
    best
}

/// Direct check of the two-sided isometry inequality for one vector:
/// `(1 - delta) ||x||^2 <= ||Phi x||^2 <= (1 + delta) ||x||^2`,
/// returned as the amount by which the worse side is violated (<= 0 when it
/// holds).
pub fn isometry_violation(phi: &DenseMatrix, x: &[f64], delta: f64) -> f64 {
    let px = phi.matvec(x);
    let got = dot(&px, &px);
    let x_sq = dot(x, x);
    let low = (1.0 - delta) * x_sq - got;
    let high = got - (1.0 + delta) * x_sq;
    low.max(high)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rip::rip_exact;
    use crate::model::{gen_matrix, Ensemble};
    use approx::assert_abs_diff_eq;

    #[test]
    fn normal_equations_identity() {
        let a = DenseMatrix::identity(3);
        let c = normal_equations_solve(&a, &[1.0, -2.0, 0.5]).unwrap();
        assert_eq!(c, vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn normal_equations_singular() {
        let a = DenseMatrix::from_rows(3, 2, vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(normal_equations_solve(&a, &[1.0; 3]).unwrap_err(), Error::RankDeficient);
    }

    #[test]
    fn grid_oracle_agrees_with_eigen_route() {
        let phi = gen_matrix(&Ensemble::Gaussian, 6, 8, 123).unwrap();
        let exact = rip_exact(&phi, 2).unwrap().delta;
        let grid = rip_grid_2sparse(&phi, 20_000);
        assert_abs_diff_eq!(exact, grid, epsilon = 1e-6);
        assert!(grid <= exact + 1e-12, "grid evaluation cannot exceed the spectral maximum");
    }

    #[test]
    fn isometry_violation_sign() {
        let phi = DenseMatrix::identity(4);
        assert!(isometry_violation(&phi, &[1.0, 0.0, 0.0, 0.0], 0.0) <= 1e-15);
        let phi2 = DenseMatrix::from_rows(2, 2, vec![2.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(isometry_violation(&phi2, &[1.0, 0.0], 0.5) > 0.0);
    }

    #[test]
    fn bruteforce_regularized_known_case() {
        assert_eq!(
            regularized_subset_bruteforce(&[(0, 4.0), (1, 3.0), (2, 1.0)]),
            vec![0, 1]
        );
    }
}
