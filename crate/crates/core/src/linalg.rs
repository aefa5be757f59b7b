//! Small dense linear-algebra helpers: eigenvalues of complex and real
//! matrices, null vectors, and polynomial roots.
//!
//! Eigenvalues come from nalgebra's Schur decomposition. Polynomial roots use
//! the Aberth–Ehrlich iteration, which serves both as an independent check of
//! the companion-matrix eigenvalues and as a fallback when the Schur iteration
//! does not converge.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = Complex64;

const SCHUR_MAX_ITER: usize = 10_000;

/// Eigenvalues of a complex square matrix (with multiplicity).
pub fn eigenvalues_complex(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let schur = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::NoConvergence(format!("complex Schur decomposition of a {n}x{n} matrix")))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Eigenvalues of a real square matrix (with multiplicity), as complex numbers.
pub fn eigenvalues_real(m: &DMatrix<f64>) -> Result<Vec<C64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let schur = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::NoConvergence(format!("real Schur decomposition of a {n}x{n} matrix")))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Unit vector spanning the (numerical) null space of `m − λ I`: the right
/// singular vector belonging to the smallest singular value.
pub fn null_vector(m: &DMatrix<C64>, lambda: C64) -> DVector<C64> {
    let n = m.nrows();
    let shifted = m - DMatrix::<C64>::identity(n, n) * lambda;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("SVD was asked for V^T");
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    let row = v_t.row(imin);
    let v = DVector::from_iterator(n, row.iter().map(|z| z.conj()));
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// Converts a real matrix to a complex one.
pub fn complexify(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|x| C64::new(x, 0.0))
}

/// Residual `‖(λ I − M) v‖` of an eigenpair.
pub fn eigen_residual(m: &DMatrix<C64>, lambda: C64, v: &DVector<C64>) -> f64 {
    (m * v - v * lambda).norm()
}

/// Evaluates `p(z) = Σ a_k z^k` (ascending coefficients) and its derivative.
pub fn poly_eval(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All roots of `p(z) = Σ a_k z^k` (ascending coefficients, nonzero leading
/// coefficient) by the Aberth–Ehrlich simultaneous iteration.
pub fn poly_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let deg = coeffs.len().saturating_sub(1);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    if lead.norm() == 0.0 {
        return Err(Error::InvalidParameter("leading polynomial coefficient vanishes".into()));
    }
    let monic: Vec<C64> = coeffs.iter().map(|&a| a / lead).collect();
    // Cauchy bound for the root radius; initial guesses on a rotated circle.
    let radius = 1.0 + monic[..deg].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..deg)
        .map(|k| C64::from_polar(0.5 * radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            let (p, dp) = poly_eval(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut sum = C64::new(0.0, 0.0);
            for j in 0..deg {
                if j != i {
                    sum += C64::new(1.0, 0.0) / (z[i] - z[j]);
                }
            }
            let step = ratio / (C64::new(1.0, 0.0) - ratio * sum);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            return Ok(z);
        }
    }
    // The iteration stalls near multiple roots at the level of rounding error;
    // accept the result if the residuals are small relative to the scale.
    let scale: f64 = monic.iter().map(|a| a.norm()).sum();
    if z.iter().all(|&r| poly_eval(&monic, r).0.norm() <= 1e-6 * scale * (1.0 + r.norm()).powi(deg as i32)) {
        Ok(z)
    } else {
        Err(Error::NoConvergence("Aberth iteration for polynomial roots".into()))
    }
}

/// Refines a root of `p` by Newton's method; returns the input if Newton does not improve it.
pub fn polish_root(coeffs: &[C64], root: C64) -> C64 {
    let mut z = root;
    let mut best = poly_eval(coeffs, z).0.norm();
    for _ in 0..8 {
        let (p, dp) = poly_eval(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let candidate = z - p / dp;
        let val = poly_eval(coeffs, candidate).0.norm();
        if val < best {
            best = val;
            z = candidate;
        } else {
            break;
        }
    }
    z
}

/// Groups values closer than `tol` into clusters; returns `(mean, multiplicity)`.
pub fn cluster(values: &[C64], tol: f64) -> Vec<(C64, usize)> {
    let mut used = vec![false; values.len()];
    let mut out = Vec::new();
    for i in 0..values.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut members = vec![values[i]];
        for j in (i + 1)..values.len() {
            if !used[j] && (values[j] - values[i]).norm() < tol {
                used[j] = true;
                members.push(values[j]);
            }
        }
        let mean = members.iter().sum::<C64>() / members.len() as f64;
        out.push((mean, members.len()));
    }
    out
}

/// Solves `a x = b` for a real square system with partial-pivot LU.
pub fn solve_real(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    a.clone().lu().solve(b)
}

/// Sorts complex values by descending real part (ties broken by imaginary part).
pub fn sort_by_real_desc(values: &mut [C64]) {
    values.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn complex_eigenvalues_of_triangular_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 1.0), c(3.0, 0.0), c(0.0, 0.0), c(-2.0, 0.5)]);
        let mut eig = eigenvalues_complex(&m).unwrap();
        sort_by_real_desc(&mut eig);
        assert!((eig[0] - c(1.0, 1.0)).norm() < 1e-13);
        assert!((eig[1] - c(-2.0, 0.5)).norm() < 1e-13);
    }

    #[test]
    fn real_matrix_rotation_has_imaginary_pair() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -2.0, 2.0, 0.0]);
        let mut eig = eigenvalues_real(&m).unwrap();
        sort_by_real_desc(&mut eig);
        assert!(eig.iter().all(|z| z.re.abs() < 1e-14 && (z.im.abs() - 2.0).abs() < 1e-14));
    }

    #[test]
    fn aberth_recovers_known_roots() {
        let roots = [c(1.0, 0.0), c(-2.0, 1.0), c(0.5, -3.0), c(0.0, 0.25)];
        // Expand (z - r1)...(z - r4) into ascending coefficients.
        let mut coeffs = vec![c(1.0, 0.0)];
        for r in roots {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (k, &a) in coeffs.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            coeffs = next;
        }
        let found = poly_roots(&coeffs).unwrap();
        for r in roots {
            let best = found.iter().map(|z| (z - r).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-12, "root {r} missed by {best}");
        }
    }

    #[test]
    fn null_vector_is_eigenvector() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[c(2.0, 0.0), c(1.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(4.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.5, 2.0)],
        );
        for lambda in eigenvalues_complex(&m).unwrap() {
            let v = null_vector(&m, lambda);
            assert!(eigen_residual(&m, lambda, &v) < 1e-12);
        }
    }

    #[test]
    fn clusters_merge_close_values() {
        let cl = cluster(&[c(0.0, 0.0), c(1e-9, 0.0), c(1.0, 0.0)], 1e-7);
        assert_eq!(cl.len(), 2);
        assert_eq!(cl[0].1, 2);
    }
}
