//! `C^d` as a real symplectic vector space.
//!
//! The Hermitian product is `<x, y> = sum_i x_i conj(y_i)`, linear in the
//! first slot, and the symplectic form is `omega(x, y) = Im <x, y>`. With
//! this slot convention `Re <x, y> = omega(i x, y)`.
//!
//! At finite dimension `omega` is nondegenerate in the strong sense: the
//! map `x -> omega(x, -)` is a bijection onto the real dual, so every smooth
//! function has an omega-gradient and every real functional has a unique
//! representer. The Poisson bracket is `{f, g}(x) = omega(grad f(x), grad g(x))`.

use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{commutator, max_abs, CMatrix};
use crate::rep::StateVector;

/// Skewness tolerance for [`QuadraticObservable`].
pub const SKEW_TOL: f64 = 1e-12;
/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// The Hermitian space `C^d` with the fixed inner-product convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermitianSpace {
    dim: usize,
}

impl HermitianSpace {
    /// Creates the space, asserting `Re <x, y> = omega(i x, y)` on a fixed pair.
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput(
                "Hermitian space dimension must be positive".into(),
            ));
        }
        let sp = Self { dim };
        let x = StateVector::from_complex(
            (0..dim)
                .map(|k| Complex64::new(1.0 + k as f64, 0.5 - k as f64))
                .collect(),
        );
        let y = StateVector::from_complex(
            (0..dim)
                .map(|k| Complex64::new(-0.25 * k as f64, 2.0 + k as f64))
                .collect(),
        );
        let lhs = sp.inner(&x, &y)?.re;
        let rhs = sp.omega(&x.scaled(I), &y)?;
        assert!(
            (lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()),
            "inner product slot convention broken: {lhs} != {rhs}"
        );
        Ok(sp)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check(&self, x: &StateVector) -> Result<()> {
        check_dim("state vector", self.dim, x.dim())
    }

    /// `<x, y> = sum_i x_i conj(y_i)`.
    pub fn inner(&self, x: &StateVector, y: &StateVector) -> Result<Complex64> {
        self.check(x)?;
        self.check(y)?;
        Ok(x.0.iter().zip(y.0.iter()).map(|(a, b)| a * b.conj()).sum())
    }

    pub fn omega(&self, x: &StateVector, y: &StateVector) -> Result<f64> {
        Ok(self.inner(x, y)?.im)
    }

    /// The functional `y -> omega(x, y)`.
    pub fn omega_check(&self, x: &StateVector) -> Result<SmoothDualElement> {
        self.check(x)?;
        Ok(SmoothDualElement {
            representer: x.clone(),
        })
    }

    /// The representer of a smooth-dual element.
    pub fn omega_uncheck(&self, ell: &SmoothDualElement) -> Result<StateVector> {
        self.check(&ell.representer)?;
        Ok(ell.representer.clone())
    }

    pub fn eval_quadratic(&self, f: &QuadraticObservable, x: &StateVector) -> Result<f64> {
        self.check_observable(f)?;
        self.check(x)?;
        Ok(0.5 * self.omega(&x.apply(&f.matrix), x)?)
    }

    /// `grad f(x) = A x` for `f(x) = omega(A x, x) / 2`.
    pub fn grad_quadratic(&self, f: &QuadraticObservable, x: &StateVector) -> Result<StateVector> {
        self.check_observable(f)?;
        self.check(x)?;
        Ok(x.apply(&f.matrix))
    }

    /// Omega-gradient of `f` at `x` by central differences of step `h`
    /// along the `2d` real coordinate directions.
    ///
    /// The partial derivatives `a_k = df/dRe x_k` and `b_k = df/dIm x_k`
    /// give `df(x) y = Re <w, y>` with `w_k = a_k + i b_k`, whose
    /// omega-representer is `i w`.
    pub fn fd_gradient<F>(&self, f: F, x: &StateVector, h: f64) -> Result<StateVector>
    where
        F: Fn(&StateVector) -> f64,
    {
        self.check(x)?;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "finite-difference step must be positive, got {h}"
            )));
        }
        let mut w = Vec::with_capacity(self.dim);
        for k in 0..self.dim {
            let mut part = [0.0; 2];
            for (slot, dir) in [Complex64::new(h, 0.0), Complex64::new(0.0, h)]
                .into_iter()
                .enumerate()
            {
                let mut plus = x.clone();
                plus.0[k] += dir;
                let mut minus = x.clone();
                minus.0[k] -= dir;
                let (fp, fm) = (f(&plus), f(&minus));
                if !fp.is_finite() || !fm.is_finite() {
                    return Err(Error::NonFinite {
                        message: format!("function value near coordinate {k}"),
                        sample: None,
                    });
                }
                part[slot] = (fp - fm) / (2.0 * h);
            }
            w.push(Complex64::new(part[0], part[1]));
        }
        let ell = SmoothDualElement::from_real_inner(StateVector::from_complex(w));
        self.omega_uncheck(&ell)
    }

    /// `{f, g}(x) = omega(grad f(x), grad g(x))`.
    pub fn poisson<F, G>(&self, f: &F, g: &G, x: &StateVector) -> Result<f64>
    where
        F: Observable + ?Sized,
        G: Observable + ?Sized,
    {
        self.check(x)?;
        self.omega(&f.gradient(x)?, &g.gradient(x)?)
    }

    fn check_observable(&self, f: &QuadraticObservable) -> Result<()> {
        check_dim("observable matrix", self.dim, f.matrix.nrows())
    }
}

/// An element `y -> omega(eta, y)` of the smooth dual, stored by its representer.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothDualElement {
    representer: StateVector,
}

impl SmoothDualElement {
    /// The functional `y -> Re <w, y>`, whose representer is `i w`.
    pub fn from_real_inner(w: StateVector) -> Self {
        Self {
            representer: w.scaled(I),
        }
    }

    pub fn representer(&self) -> &StateVector {
        &self.representer
    }

    pub fn evaluate(&self, y: &StateVector) -> Result<f64> {
        check_dim("state vector", self.representer.dim(), y.dim())?;
        Ok(self
            .representer
            .0
            .iter()
            .zip(y.0.iter())
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            .im)
    }
}

/// A smooth function on states that knows its omega-gradient.
pub trait Observable {
    fn value(&self, x: &StateVector) -> Result<f64>;
    fn gradient(&self, x: &StateVector) -> Result<StateVector>;
}

/// `f(x) = omega(A x, x) / 2` for a skew-Hermitian `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticObservable {
    matrix: CMatrix,
}

impl QuadraticObservable {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidInput(
                "observable matrix must be square and nonempty".into(),
            ));
        }
        let skew = max_abs(&(&matrix + matrix.adjoint()));
        if skew > SKEW_TOL {
            return Err(Error::InvalidInput(format!(
                "observable matrix is not skew-Hermitian (defect {skew:e})"
            )));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix without the skewness check. Callers guarantee the
    /// shape; used for deliberately faulty representations.
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_zero(&self) -> bool {
        max_abs(&self.matrix) == 0.0
    }
}

impl Observable for QuadraticObservable {
    fn value(&self, x: &StateVector) -> Result<f64> {
        HermitianSpace { dim: self.dim() }.eval_quadratic(self, x)
    }

    fn gradient(&self, x: &StateVector) -> Result<StateVector> {
        HermitianSpace { dim: self.dim() }.grad_quadratic(self, x)
    }
}

/// An observable given by a value closure and an analytic gradient closure.
pub struct FnObservable<V, G> {
    value: V,
    gradient: G,
}

impl<V, G> FnObservable<V, G>
where
    V: Fn(&StateVector) -> f64,
    G: Fn(&StateVector) -> StateVector,
{
    pub fn new(value: V, gradient: G) -> Self {
        Self { value, gradient }
    }
}

impl<V, G> Observable for FnObservable<V, G>
where
    V: Fn(&StateVector) -> f64,
    G: Fn(&StateVector) -> StateVector,
{
    fn value(&self, x: &StateVector) -> Result<f64> {
        Ok((self.value)(x))
    }

    fn gradient(&self, x: &StateVector) -> Result<StateVector> {
        Ok((self.gradient)(x))
    }
}

/// The quadratic observable with matrix `[A_f, A_g]`, equal to `{f, g}` pointwise.
pub fn quadratic_poisson(
    f: &QuadraticObservable,
    g: &QuadraticObservable,
) -> Result<QuadraticObservable> {
    check_dim("observable matrix", f.dim(), g.dim())?;
    Ok(QuadraticObservable {
        matrix: commutator(&f.matrix, &g.matrix),
    })
}
