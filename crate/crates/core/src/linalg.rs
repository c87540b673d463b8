//! Dense linear-algebra helpers shared by the numerical modules.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type RMatrix = DMatrix<f64>;

/// Largest Taylor degree tried before giving up on further terms.
const MAX_TAYLOR_TERMS: usize = 40;
/// Scaled matrices have 1-norm at most this before the Taylor core runs.
const SCALED_NORM: f64 = 0.5;

/// Matrix exponential by scaling and squaring around a truncated Taylor series.
///
/// The matrix is scaled by `2^-s` so its 1-norm is at most one half, the
/// series is summed until a term drops below machine precision relative to
/// the partial sum, and the result is squared `s` times.
pub(crate) fn expm<T>(a: &DMatrix<T>) -> DMatrix<T>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    let norm = one_norm(a);
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.map(|z| z.scale(2f64.powi(-squarings)));

    let mut result = DMatrix::<T>::identity(n, n);
    let mut term = DMatrix::<T>::identity(n, n);
    for k in 1..=MAX_TAYLOR_TERMS {
        term = &term * &scaled;
        term.apply(|z| *z = z.unscale(k as f64));
        result += &term;
        if one_norm(&term) <= f64::EPSILON * 1e-3 * one_norm(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

fn one_norm<T>(a: &DMatrix<T>) -> f64
where
    T: ComplexField<RealField = f64> + Copy,
{
    a.column_iter()
        .map(|c| c.iter().map(|z| z.modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Entrywise max-modulus norm.
pub(crate) fn max_abs<T>(a: &DMatrix<T>) -> f64
where
    T: ComplexField<RealField = f64> + Copy,
{
    a.iter().map(|z| z.modulus()).fold(0.0, f64::max)
}

pub(crate) fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Stacks real parts over imaginary parts: `C^d -> R^{2d}`.
pub(crate) fn realify(v: &CVector) -> DVector<f64> {
    let d = v.len();
    DVector::from_fn(2 * d, |k, _| if k < d { v[k].re } else { v[k - d].im })
}

/// Inverse of [`realify`].
pub(crate) fn complexify(v: &DVector<f64>) -> CVector {
    let d = v.len() / 2;
    CVector::from_fn(d, |k, _| Complex64::new(v[k], v[k + d]))
}

/// Singular values and an orthonormal null-space basis of a real matrix.
///
/// Singular values below `rel_tol` times the largest count as zero. When the
/// largest singular value is itself zero every direction is null. The matrix
/// is padded with zero rows so the right-singular basis is complete even
/// for wide inputs.
pub(crate) struct NullSpace {
    pub rank: usize,
    pub basis: Vec<DVector<f64>>,
    pub singular_values: Vec<f64>,
}

pub(crate) fn null_space(m: &RMatrix, rel_tol: f64) -> NullSpace {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return NullSpace {
            rank: 0,
            basis: Vec::new(),
            singular_values: Vec::new(),
        };
    }
    let padded = if rows < cols {
        let mut p = RMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let largest = sv.iter().copied().fold(0.0, f64::max);
    let threshold = rel_tol * largest;
    let mut rank = 0;
    let mut basis = Vec::new();
    for (k, &s) in sv.iter().enumerate() {
        if largest > 0.0 && s > threshold {
            rank += 1;
        } else {
            basis.push(v_t.row(k).transpose());
        }
    }
    NullSpace {
        rank,
        basis,
        singular_values: sv,
    }
}

/// Numerical rank of a real matrix relative to its largest singular value.
pub(crate) fn rank(m: &RMatrix, rel_tol: f64) -> usize {
    null_space(m, rel_tol).rank
}

/// Largest principal angle (radians) between two subspaces given by
/// orthonormal bases of the same ambient space. Subspaces of different
/// dimension are at angle pi/2.
pub(crate) fn max_principal_angle(a: &[DVector<f64>], b: &[DVector<f64>]) -> f64 {
    if a.len() != b.len() {
        return std::f64::consts::FRAC_PI_2;
    }
    if a.is_empty() {
        return 0.0;
    }
    let overlap = RMatrix::from_fn(a.len(), b.len(), |i, j| a[i].dot(&b[j]));
    let smallest_cos = overlap
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    smallest_cos.clamp(-1.0, 1.0).acos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = CMatrix::zeros(3, 3);
        assert_eq!(expm(&z), CMatrix::identity(3, 3));
    }

    #[test]
    fn expm_of_rotation_generator() {
        let t = 2.3;
        let a = RMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        let e = expm(&a);
        let want = RMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        assert_abs_diff_eq!(e, want, epsilon = 1e-14);
    }

    #[test]
    fn expm_of_nilpotent_terminates() {
        let a = RMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let e = expm(&a);
        let want = RMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.5, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(e, want, epsilon = 1e-15);
    }

    #[test]
    fn expm_matches_nalgebra_on_large_norm() {
        // ||A|| close to 10, skew-Hermitian so the oracle is well conditioned.
        let a = CMatrix::from_fn(4, 4, |i, j| {
            let x = c((i + 2 * j) as f64 * 0.37, (i * j) as f64 * 0.41 - 1.0);
            if i == j {
                c(0.0, x.im)
            } else if i < j {
                x
            } else {
                -c((j + 2 * i) as f64 * 0.37, -((i * j) as f64 * 0.41 - 1.0))
            }
        });
        let skew = (&a - a.adjoint()) * c(0.5, 0.0);
        let ours = expm(&skew);
        let oracle = skew.clone().exp();
        assert!(max_abs(&(&ours - &oracle)) < 1e-12);
        let unit = ours.adjoint() * &ours - CMatrix::identity(4, 4);
        assert!(max_abs(&unit) < 1e-13);
    }

    #[test]
    fn realify_roundtrip() {
        let v = CVector::from_vec(vec![c(1.0, -2.0), c(0.5, 3.0)]);
        assert_eq!(realify(&v).as_slice(), &[1.0, 0.5, -2.0, 3.0]);
        assert_eq!(complexify(&realify(&v)), v);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = RMatrix::from_row_slice(1, 3, &[1.0, 0.0, 0.0]);
        let ns = null_space(&m, 1e-8);
        assert_eq!(ns.rank, 1);
        assert_eq!(ns.basis.len(), 2);
        for b in &ns.basis {
            assert!(b[0].abs() < 1e-14);
        }
    }

    #[test]
    fn null_space_of_zero_matrix_is_everything() {
        let ns = null_space(&RMatrix::zeros(2, 3), 1e-8);
        assert_eq!(ns.rank, 0);
        assert_eq!(ns.basis.len(), 3);
    }

    #[test]
    fn principal_angles() {
        let e1 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let e2 = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        let diag = DVector::from_vec(vec![1.0, 1.0, 0.0]).normalize();
        assert_abs_diff_eq!(
            max_principal_angle(std::slice::from_ref(&e1), std::slice::from_ref(&e1)),
            0.0,
            epsilon = 1e-7
        );
        assert_abs_diff_eq!(
            max_principal_angle(std::slice::from_ref(&e1), &[diag]),
            std::f64::consts::FRAC_PI_4,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            max_principal_angle(&[e1], &[e2]),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-12
        );
    }
}
