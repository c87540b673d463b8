//! The Hamiltonian lift `sigma` and the moment map `mu`, together with the
//! numerical checks of their structural properties.
//!
//! Conventions: `sigma(X)(x) = omega(rho'(X) x, x) / 2`, normalized by
//! `sigma(X)(0) = 0`; `mu(x)(X) = sigma(X)(x)`; the Poisson bracket on
//! states is `{f, g} = omega(grad f, grad g)`, under which
//! `{sigma(X), sigma(Y)} = sigma([X, Y])`. The Lie-Poisson bracket on the
//! dual is `{F, G}(xi) = xi([dF(xi), dG(xi)])`, the sign forced by
//! requiring linear functions to pull back to `sigma`.

use std::sync::Arc;

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::exec::{self, Execution};
use crate::lie::{pair, AlgebraVector, DualVector, GroupWord};
use crate::linalg::{complexify, max_principal_angle, null_space, rank, realify, RMatrix};
use crate::rep::{Representation, StateVector};
use crate::rng;
use crate::symplectic::{HermitianSpace, QuadraticObservable};

/// Strict subspace comparisons pass when the largest principal angle is below this.
pub const PRINCIPAL_ANGLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Bound for identity defects.
    pub defect: f64,
    /// Relative singular-value threshold for ranks and null spaces.
    pub rank: f64,
    /// Central-difference step.
    pub fd_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            defect: 1e-10,
            rank: 1e-8,
            fd_step: 1e-5,
        }
    }
}

/// A representation bound to its symplectic state space.
#[derive(Debug, Clone)]
pub struct MomentContext {
    rep: Arc<Representation>,
    space: HermitianSpace,
    tolerances: Tolerances,
}

impl MomentContext {
    /// Binds `rep`, requiring its validity defects to be within `tolerances.defect`.
    pub fn new(rep: Representation, tolerances: Tolerances) -> Result<Self> {
        let defects = rep.validity_defects();
        if !(defects.skewness <= tolerances.defect && defects.bracket <= tolerances.defect) {
            return Err(Error::InvalidInput(format!(
                "representation {rep} fails validity checks: skewness {:e}, bracket {:e}",
                defects.skewness, defects.bracket
            )));
        }
        Self::new_unchecked(rep, tolerances)
    }

    /// Binds `rep` without validity checks, for deliberate-fault experiments.
    pub fn new_unchecked(rep: Representation, tolerances: Tolerances) -> Result<Self> {
        let space = HermitianSpace::new(rep.dim())?;
        Ok(Self {
            rep: Arc::new(rep),
            space,
            tolerances,
        })
    }

    pub fn rep(&self) -> &Representation {
        &self.rep
    }

    pub fn space(&self) -> &HermitianSpace {
        &self.space
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    fn algebra_dim(&self) -> usize {
        self.rep.algebra().dim()
    }

    /// `sigma(X)`, the quadratic observable with matrix `rho'(X)`.
    pub fn sigma(&self, x: &AlgebraVector) -> Result<QuadraticObservable> {
        Ok(QuadraticObservable::from_matrix_unchecked(
            self.rep.rho_prime(x)?,
        ))
    }

    /// `mu(x)_i = omega(A_i x, x) / 2`.
    pub fn moment(&self, x: &StateVector) -> Result<DualVector> {
        check_dim("state vector", self.rep.dim(), x.dim())?;
        let coords = self
            .rep
            .generators()
            .iter()
            .map(|a| self.space.omega(&x.apply(a), x).map(|w| 0.5 * w))
            .collect::<Result<Vec<_>>>()?;
        Ok(DualVector(coords))
    }

    /// `(d mu(x) y)_i = omega(A_i x, y)`.
    pub fn moment_differential(&self, x: &StateVector, y: &StateVector) -> Result<DualVector> {
        check_dim("state vector", self.rep.dim(), x.dim())?;
        check_dim("state vector", self.rep.dim(), y.dim())?;
        let coords = self
            .rep
            .generators()
            .iter()
            .map(|a| self.space.omega(&x.apply(a), y))
            .collect::<Result<Vec<_>>>()?;
        Ok(DualVector(coords))
    }

    /// Relative error between `d mu(x) y` and the central difference of `mu` along `y`.
    pub fn differential_fd_error(&self, x: &StateVector, y: &StateVector) -> Result<f64> {
        let h = self.tolerances.fd_step;
        let exact = self.moment_differential(x, y)?;
        let step = y.scaled(num_complex::Complex64::new(h, 0.0));
        let plus = self.moment(&(x + &step))?;
        let minus = self.moment(&(x - &step))?;
        let fd: Vec<f64> = plus
            .coords()
            .iter()
            .zip(minus.coords())
            .map(|(p, m)| (p - m) / (2.0 * h))
            .collect();
        Ok(relative_error(&fd, exact.coords()))
    }

    /// Relative error between the finite-difference omega-gradient of
    /// `sigma(X)` at `x` and `rho'(X) x`.
    pub fn gradient_fd_error(&self, xa: &AlgebraVector, x: &StateVector) -> Result<f64> {
        let f = self.sigma(xa)?;
        let fd = self.space.fd_gradient(
            |y| self.space.eval_quadratic(&f, y).unwrap_or(f64::NAN),
            x,
            self.tolerances.fd_step,
        )?;
        let exact = x.apply(&self.rep.rho_prime(xa)?);
        Ok(relative_error(
            &fd.to_interleaved(),
            &exact.to_interleaved(),
        ))
    }

    /// The `n x 2d` real matrix of `d mu(x)` acting on `realify(y)`.
    fn differential_matrix(&self, x: &StateVector) -> RMatrix {
        let d = self.rep.dim();
        let rows: Vec<_> = self
            .rep
            .generators()
            .iter()
            .map(|a| {
                let u = a * &x.0;
                // omega(u, y) = sum_k Im(u_k) Re(y_k) - Re(u_k) Im(y_k)
                DVector::from_fn(2 * d, |k, _| if k < d { u[k].im } else { -u[k - d].re })
                    .transpose()
            })
            .collect();
        RMatrix::from_rows(&rows)
    }

    /// Dimension counts for the image and kernel of `d mu(x)`.
    pub fn rank_analysis(&self, x: &StateVector) -> Result<RankAnalysis> {
        check_dim("state vector", self.rep.dim(), x.dim())?;
        if x.is_zero() {
            return Err(Error::InvalidInput(
                "rank analysis needs a nonzero state".into(),
            ));
        }
        let n = self.algebra_dim();
        let d = self.rep.dim();
        let tol = self.tolerances.rank;

        let dmu = self.differential_matrix(x);
        let kernel = null_space(&dmu, tol);
        let largest = kernel.singular_values.iter().copied().fold(0.0, f64::max);
        let orbit_tangent_dim = rank(&self.rep.orbit_tangent_matrix(x), tol);
        let isotropy = self.rep.isotropy_algebra(x, tol)?;

        let tangents: Vec<StateVector> = self.rep.generators().iter().map(|a| x.apply(a)).collect();
        let kernel_basis: Vec<StateVector> = kernel
            .basis
            .iter()
            .map(|v| StateVector(complexify(v)))
            .collect();

        let mut kernel_residual: f64 = 0.0;
        for y in &kernel_basis {
            for t in &tangents {
                kernel_residual = kernel_residual.max(self.space.omega(y, t)?.abs());
            }
        }
        // Image of d mu(x) annihilates g_x: omega(rho'(X) x, y) = 0 for X in g_x.
        let mut image_residual: f64 = 0.0;
        for xa in &isotropy {
            let v = x.apply(&self.rep.rho_prime(xa)?);
            for k in 0..d {
                for unit in [
                    StateVector::basis(d, k),
                    StateVector::basis(d, k).scaled(num_complex::Complex64::i()),
                ] {
                    image_residual = image_residual.max(self.space.omega(&v, &unit)?.abs());
                }
            }
        }
        let threshold = tol * largest.max(1.0);
        let consistent = kernel.rank + isotropy.len() == n
            && kernel_basis.len() == 2 * d - orbit_tangent_dim
            && kernel_residual <= threshold
            && image_residual <= threshold;

        Ok(RankAnalysis {
            rank: kernel.rank,
            isotropy_dim: isotropy.len(),
            kernel_dim: kernel_basis.len(),
            orbit_tangent_dim,
            consistent,
            kernel_residual,
            image_residual,
            kernel_basis,
            isotropy_basis: isotropy,
        })
    }

    /// Largest principal angle between `ker d mu(x)` and the omega-annihilator
    /// of the orbit tangent space, the latter computed independently as
    /// `i * (span_R{A_i x})^perp`.
    pub fn kernel_annihilator_angle(&self, x: &StateVector) -> Result<f64> {
        let analysis = self.rank_analysis(x)?;
        let kernel: Vec<DVector<f64>> = analysis
            .kernel_basis
            .iter()
            .map(|y| realify(&y.0))
            .collect();
        let tangent = self.rep.orbit_tangent_matrix(x);
        let complement = null_space(&tangent.transpose(), self.tolerances.rank).basis;
        let annihilator: Vec<DVector<f64>> = complement
            .iter()
            .map(|v| realify(&(complexify(v) * num_complex::Complex64::i())))
            .collect();
        Ok(max_principal_angle(&kernel, &annihilator))
    }

    /// Defects of `Ad'(g) mu(x) = mu(rho(g) x)` and
    /// `sigma(X)(rho(g) x) = sigma(Ad(g^-1) X)(x)` over the samples.
    pub fn equivariance_defect(
        &self,
        g: &GroupWord,
        samples: &[StateVector],
    ) -> Result<EquivarianceDefect> {
        self.equivariance_defect_with(Execution::default(), g, samples)
    }

    pub fn equivariance_defect_with(
        &self,
        execution: Execution,
        g: &GroupWord,
        samples: &[StateVector],
    ) -> Result<EquivarianceDefect> {
        if samples.is_empty() {
            return Err(Error::InvalidInput(
                "equivariance check needs at least one sample".into(),
            ));
        }
        let alg = self.rep.algebra();
        let n = alg.dim();
        let coadjoint = alg.coadjoint_matrix(g)?;
        let rho = self.rep.rho(g)?;
        let ginv = g.inverse();
        let pulled: Vec<QuadraticObservable> = (0..n)
            .map(|i| self.sigma(&alg.adjoint_action(&ginv, &AlgebraVector::basis(n, i))?))
            .collect::<Result<_>>()?;
        let basis_sigma: Vec<QuadraticObservable> = (0..n)
            .map(|i| self.sigma(&AlgebraVector::basis(n, i)))
            .collect::<Result<_>>()?;

        let per_sample =
            exec::try_map_indexed(execution, samples.len(), |s| -> Result<(f64, f64)> {
                let x = &samples[s];
                let gx = x.apply(&rho);
                let lhs: DualVector = (&coadjoint * self.moment(x)?.to_dvector()).into();
                let rhs = self.moment(&gx)?;
                let mu_defect = lhs.max_diff(&rhs);
                let mut sigma_defect: f64 = 0.0;
                for (direct, pulled) in basis_sigma.iter().zip(&pulled) {
                    let a = self.space.eval_quadratic(direct, &gx)?;
                    let b = self.space.eval_quadratic(pulled, x)?;
                    sigma_defect = sigma_defect.max((a - b).abs());
                }
                check_finite(mu_defect.max(sigma_defect), s)?;
                Ok((mu_defect, sigma_defect))
            })?;
        Ok(per_sample.into_iter().fold(
            EquivarianceDefect {
                mu_defect: 0.0,
                sigma_defect: 0.0,
            },
            |acc, (m, s)| EquivarianceDefect {
                mu_defect: acc.mu_defect.max(m),
                sigma_defect: acc.sigma_defect.max(s),
            },
        ))
    }

    /// `max |{sigma(X), sigma(Y)}(x) - sigma([X, Y])(x)|` over random
    /// `X, Y` with coordinates in `[-1, 1]` and unit `x` in the validity subspace.
    pub fn cocycle_defect(&self, trials: usize, seed: u64) -> Result<f64> {
        self.cocycle_defect_with(Execution::default(), trials, seed)
    }

    pub fn cocycle_defect_with(
        &self,
        execution: Execution,
        trials: usize,
        seed: u64,
    ) -> Result<f64> {
        if trials == 0 {
            return Err(Error::InvalidInput(
                "cocycle check needs at least one trial".into(),
            ));
        }
        let alg = self.rep.algebra();
        let n = alg.dim();
        let defects = exec::try_map_indexed(execution, trials, |t| -> Result<f64> {
            let mut rng = rng::stream(seed, t as u64);
            let xa = random_algebra_vector(&mut rng, n, 1.0);
            let ya = random_algebra_vector(&mut rng, n, 1.0);
            let x = self.rep.random_unit_state(&mut rng);
            let poisson = self
                .space
                .poisson(&self.sigma(&xa)?, &self.sigma(&ya)?, &x)?;
            let lifted = self
                .space
                .eval_quadratic(&self.sigma(&alg.bracket(&xa, &ya)?)?, &x)?;
            let defect = (poisson - lifted).abs();
            check_finite(defect, t)?;
            Ok(defect)
        })?;
        Ok(defects.into_iter().fold(0.0, f64::max))
    }

    /// `max |{F o mu, G o mu}(x) - ({F, G}_LP o mu)(x)|` over the samples.
    ///
    /// The state-side gradients of `F o mu` and `G o mu` come from central
    /// differences; the Lie-Poisson side uses the analytic differentials.
    pub fn pullback_poisson_check(
        &self,
        f: &DualPolynomial,
        g: &DualPolynomial,
        samples: &[StateVector],
    ) -> Result<f64> {
        let n = self.algebra_dim();
        check_dim("polynomial variables", n, f.dim())?;
        check_dim("polynomial variables", n, g.dim())?;
        let alg = self.rep.algebra();
        let h = self.tolerances.fd_step;
        let defects =
            exec::try_map_indexed(Execution::default(), samples.len(), |s| -> Result<f64> {
                let x = &samples[s];
                let fmu =
                    |y: &StateVector| self.moment(y).map(|xi| f.value(&xi)).unwrap_or(f64::NAN);
                let gmu =
                    |y: &StateVector| self.moment(y).map(|xi| g.value(&xi)).unwrap_or(f64::NAN);
                let grad_f = self.space.fd_gradient(fmu, x, h)?;
                let grad_g = self.space.fd_gradient(gmu, x, h)?;
                let state_side = self.space.omega(&grad_f, &grad_g)?;
                let xi = self.moment(x)?;
                let dual_side = pair(
                    &xi,
                    &alg.bracket(&f.differential(&xi), &g.differential(&xi))?,
                )?;
                let defect = (state_side - dual_side).abs();
                check_finite(defect, s)?;
                Ok(defect)
            })?;
        Ok(defects.into_iter().fold(0.0, f64::max))
    }
}

fn check_finite(v: f64, sample: usize) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite {
            message: "defect evaluated to a non-finite value".into(),
            sample: Some(sample),
        })
    }
}

/// Coordinates independently uniform in `[-scale, scale]`.
pub(crate) fn random_algebra_vector<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    scale: f64,
) -> AlgebraVector {
    AlgebraVector((0..n).map(|_| rng.random_range(-scale..=scale)).collect())
}

/// `|approx - exact| / |exact|` in the Euclidean norm; the absolute error
/// when `exact` vanishes.
pub fn relative_error(approx: &[f64], exact: &[f64]) -> f64 {
    let diff = approx
        .iter()
        .zip(exact)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let norm = exact.iter().map(|b| b * b).sum::<f64>().sqrt();
    if norm == 0.0 {
        diff
    } else {
        diff / norm
    }
}

/// Result of [`MomentContext::rank_analysis`].
#[derive(Debug, Clone)]
pub struct RankAnalysis {
    pub rank: usize,
    pub isotropy_dim: usize,
    pub kernel_dim: usize,
    pub orbit_tangent_dim: usize,
    pub consistent: bool,
    /// `max |omega(y, A_i x)|` over kernel basis vectors `y`.
    pub kernel_residual: f64,
    /// `max |omega(rho'(X) x, y)|` over isotropy vectors `X` and unit `y`.
    pub image_residual: f64,
    pub kernel_basis: Vec<StateVector>,
    pub isotropy_basis: Vec<AlgebraVector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceDefect {
    pub mu_defect: f64,
    pub sigma_defect: f64,
}

impl EquivarianceDefect {
    pub fn max(&self) -> f64 {
        self.mu_defect.max(self.sigma_defect)
    }
}

/// A monomial `coef * xi_{vars[0]} * xi_{vars[1]} * ...`; an empty `vars` is a constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialTerm {
    pub vars: Vec<usize>,
    pub coef: f64,
}

/// A polynomial of degree at most two on the dual of the algebra:
/// `F(xi) = c + l . xi + xi^T Q xi` with `Q` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPolynomial {
    constant: f64,
    linear: DVector<f64>,
    quadratic: RMatrix,
}

impl DualPolynomial {
    pub fn from_terms(dim: usize, terms: &[PolynomialTerm]) -> Result<Self> {
        let mut p = Self {
            constant: 0.0,
            linear: DVector::zeros(dim),
            quadratic: RMatrix::zeros(dim, dim),
        };
        for t in terms {
            if let Some(&v) = t.vars.iter().find(|&&v| v >= dim) {
                return Err(Error::InvalidInput(format!(
                    "polynomial variable {v} out of range for dimension {dim}"
                )));
            }
            match t.vars.as_slice() {
                [] => p.constant += t.coef,
                [i] => p.linear[*i] += t.coef,
                [i, j] => {
                    p.quadratic[(*i, *j)] += 0.5 * t.coef;
                    p.quadratic[(*j, *i)] += 0.5 * t.coef;
                }
                vars => return Err(Error::DegreeTooHigh(vars.len())),
            }
        }
        Ok(p)
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self {
            constant: c,
            linear: DVector::zeros(dim),
            quadratic: RMatrix::zeros(dim, dim),
        }
    }

    /// The linear function `xi -> xi(X)`.
    pub fn linear(x: &AlgebraVector) -> Self {
        let dim = x.len();
        Self {
            constant: 0.0,
            linear: x.to_dvector(),
            quadratic: RMatrix::zeros(dim, dim),
        }
    }

    /// `xi -> xi^T Q xi` for a symmetric `Q`; the matrix is symmetrized.
    pub fn quadratic_form(q: RMatrix) -> Self {
        let dim = q.nrows();
        Self {
            constant: 0.0,
            linear: DVector::zeros(dim),
            quadratic: (&q + q.transpose()) * 0.5,
        }
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn degree(&self) -> usize {
        if self.quadratic.iter().any(|&q| q != 0.0) {
            2
        } else if self.linear.iter().any(|&l| l != 0.0) {
            1
        } else {
            0
        }
    }

    pub fn value(&self, xi: &DualVector) -> f64 {
        let v = xi.to_dvector();
        self.constant + self.linear.dot(&v) + v.dot(&(&self.quadratic * &v))
    }

    /// `dF(xi)`, an element of the algebra (the bidual of the dual).
    pub fn differential(&self, xi: &DualVector) -> AlgebraVector {
        (&self.linear + &self.quadratic * xi.to_dvector() * 2.0).into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::CatalogKind;
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn ctx(kind: CatalogKind) -> MomentContext {
        MomentContext::new(
            Representation::catalog(&kind).unwrap(),
            Tolerances::default(),
        )
        .unwrap()
    }

    fn spin(twice_j: u32) -> MomentContext {
        ctx(CatalogKind::spin(twice_j))
    }

    fn dual(c: &[f64]) -> DualVector {
        DualVector(c.to_vec())
    }

    #[test]
    fn sigma_fixtures() {
        let c = spin(1);
        assert!(c.sigma(&AlgebraVector::zeros(3)).unwrap().is_zero());
        let v = c.space().eval_quadratic(
            &c.sigma(&AlgebraVector::basis(3, 2)).unwrap(),
            &StateVector::basis(2, 0),
        );
        assert_eq!(v.unwrap(), -0.25);

        for k in -2..=2i64 {
            let circle = ctx(CatalogKind::Circle { charge: k });
            let f = circle.sigma(&AlgebraVector::basis(1, 0)).unwrap();
            let v = circle
                .space()
                .eval_quadratic(&f, &StateVector::basis(1, 0))
                .unwrap();
            assert_eq!(v, k as f64 / 2.0);
        }
    }

    #[test]
    fn moment_fixtures() {
        let c = spin(1);
        assert_eq!(
            c.moment(&StateVector::zeros(2)).unwrap(),
            DualVector::zeros(3)
        );
        assert!(
            c.moment(&StateVector::basis(2, 0))
                .unwrap()
                .max_diff(&dual(&[0.0, 0.0, -0.25]))
                < 1e-12
        );
        let x = StateVector::from_pairs(&[(FRAC_1_SQRT_2, 0.0), (FRAC_1_SQRT_2, 0.0)]);
        assert!(c.moment(&x).unwrap().max_diff(&dual(&[-0.25, 0.0, 0.0])) < 1e-12);

        let h = ctx(CatalogKind::HeisenbergTruncated { n: 8 });
        for k in 0..6 {
            assert!((h.moment(&StateVector::basis(8, k)).unwrap().coords()[2] + 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn moment_differential_fixtures() {
        let c = spin(1);
        let x = StateVector::basis(2, 0);
        assert_eq!(
            c.moment_differential(&x, &StateVector::zeros(2)).unwrap(),
            DualVector::zeros(3)
        );
        let euler = c.moment_differential(&x, &x).unwrap();
        assert!(euler.max_diff(&dual(&[0.0, 0.0, -0.5])) < 1e-15);
        let y = StateVector::from_pairs(&[(0.0, 1.0), (0.0, 0.0)]);
        let dmu = c.moment_differential(&x, &y).unwrap();
        assert!(dmu.coords()[2].abs() < 1e-15);
        assert!(
            c.differential_fd_error(&x, &y).unwrap() < 1e-6
                || dmu.coords().iter().all(|v| v.abs() < 1e-15)
        );
    }

    #[test]
    fn rank_analysis_spin_half_generic() {
        let c = spin(1);
        let r = c.rank_analysis(&StateVector::basis(2, 0)).unwrap();
        assert_eq!(
            (r.rank, r.isotropy_dim, r.orbit_tangent_dim, r.kernel_dim),
            (3, 0, 3, 1)
        );
        assert!(r.consistent);
        let k = &r.kernel_basis[0];
        // Kernel is spanned by (i, 0).
        assert!(k.0[1].norm() < 1e-12);
        assert!(k.0[0].re.abs() < 1e-12 && (k.0[0].im.abs() - 1.0).abs() < 1e-12);
        assert!(
            c.kernel_annihilator_angle(&StateVector::basis(2, 0))
                .unwrap()
                < PRINCIPAL_ANGLE_TOL
        );
    }

    #[test]
    fn rank_analysis_spin_one_weight_zero() {
        let r = spin(2).rank_analysis(&StateVector::basis(3, 1)).unwrap();
        assert_eq!((r.isotropy_dim, r.rank), (1, 2));
        assert!(r.consistent);
    }

    #[test]
    fn rank_analysis_trivial() {
        let c = ctx(CatalogKind::Circle { charge: 0 });
        let r = c
            .rank_analysis(&StateVector::from_pairs(&[(0.6, 0.8)]))
            .unwrap();
        assert_eq!((r.rank, r.isotropy_dim, r.kernel_dim), (0, 1, 2));
        assert!(r.consistent);
        assert!(c.rank_analysis(&StateVector::zeros(1)).is_err());
    }

    #[test]
    fn equivariance_fixtures() {
        let c = spin(1);
        let x = StateVector::basis(2, 0);
        let d = c
            .equivariance_defect(&GroupWord::identity(), std::slice::from_ref(&x))
            .unwrap();
        assert_eq!((d.mu_defect, d.sigma_defect), (0.0, 0.0));

        let g = GroupWord::exp(AlgebraVector::basis(3, 0).scaled(PI));
        let rotated = c
            .rep()
            .algebra()
            .coadjoint_action(&g, &c.moment(&x).unwrap())
            .unwrap();
        assert!(rotated.max_diff(&dual(&[0.0, 0.0, 0.25])) < 1e-12);
        let d = c.equivariance_defect(&g, &[x]).unwrap();
        assert!(d.max() < 1e-10);
        assert!(c.equivariance_defect(&g, &[]).is_err());
    }

    #[test]
    fn cocycle_fixtures() {
        let abelian = std::sync::Arc::new(crate::lie::LieAlgebra::abelian(2).unwrap());
        let gens = vec![
            crate::CMatrix::from_diagonal(&crate::CVector::from_vec(vec![
                Complex64::i(),
                -Complex64::i(),
            ])),
            crate::CMatrix::from_diagonal(&crate::CVector::from_vec(vec![
                Complex64::i() * 2.0,
                Complex64::i(),
            ])),
        ];
        let rep = Representation::new(abelian, gens, None).unwrap();
        let c = MomentContext::new(rep, Tolerances::default()).unwrap();
        assert!(c.cocycle_defect(50, 3).unwrap() < 1e-15);

        for twice_j in 1..=5 {
            assert!(spin(twice_j).cocycle_defect(200, 11).unwrap() <= 1e-10);
        }
        assert!(spin(2).cocycle_defect(0, 1).is_err());
    }

    #[test]
    fn cocycle_detects_wrong_structure_constants() {
        let wrong = crate::lie::LieAlgebra::from_sparse(
            vec!["e1".into(), "e2".into(), "e3".into()],
            &[(0, 1, 2, 2.0), (1, 2, 0, 1.0), (0, 2, 1, -1.0)],
        )
        .unwrap();
        let half = Representation::catalog(&CatalogKind::spin(1)).unwrap();
        let rep = Representation::new(std::sync::Arc::new(wrong), half.generators().to_vec(), None)
            .unwrap();
        assert!(MomentContext::new(rep.clone(), Tolerances::default()).is_err());
        let c = MomentContext::new_unchecked(rep, Tolerances::default()).unwrap();
        let d = c.cocycle_defect(200, 5).unwrap();
        // The defect is |sigma(x_1 y_2 - x_2 y_1)(e_3)(x)|, at most 2 * 1/4 on unit states.
        assert!(d > 0.05 && d <= 0.5, "{d}");
    }

    #[test]
    fn pullback_fixtures() {
        let c = spin(1);
        let mut rng = rng::stream(1, 0);
        let samples: Vec<_> = (0..50)
            .map(|_| c.rep().random_unit_state(&mut rng))
            .collect();
        let k = DualPolynomial::constant(3, 2.0);
        assert!(c.pullback_poisson_check(&k, &k, &samples).unwrap() < 1e-12);
        let f = DualPolynomial::linear(&AlgebraVector::basis(3, 0));
        let g = DualPolynomial::linear(&AlgebraVector::basis(3, 1));
        assert!(c.pullback_poisson_check(&f, &g, &samples).unwrap() <= 1e-8);
        let casimir = DualPolynomial::quadratic_form(RMatrix::identity(3, 3));
        assert!(c.pullback_poisson_check(&casimir, &g, &samples).unwrap() <= 1e-8);
    }

    #[test]
    fn polynomial_terms() {
        let terms = vec![
            PolynomialTerm {
                vars: vec![],
                coef: 1.0,
            },
            PolynomialTerm {
                vars: vec![0],
                coef: 2.0,
            },
            PolynomialTerm {
                vars: vec![1, 2],
                coef: 3.0,
            },
        ];
        let p = DualPolynomial::from_terms(3, &terms).unwrap();
        assert_eq!(p.degree(), 2);
        let xi = dual(&[1.0, 2.0, -1.0]);
        assert_eq!(p.value(&xi), 1.0 + 2.0 - 6.0);
        assert_eq!(p.differential(&xi), AlgebraVector(vec![2.0, -3.0, 6.0]));

        let cubic = vec![PolynomialTerm {
            vars: vec![0, 0, 1],
            coef: 1.0,
        }];
        assert!(matches!(
            DualPolynomial::from_terms(3, &cubic),
            Err(Error::DegreeTooHigh(3))
        ));
        let out_of_range = vec![PolynomialTerm {
            vars: vec![3],
            coef: 1.0,
        }];
        assert!(DualPolynomial::from_terms(3, &out_of_range).is_err());
    }

    #[test]
    fn relative_error_conventions() {
        assert_eq!(relative_error(&[0.0], &[0.0]), 0.0);
        assert_eq!(relative_error(&[1e-3], &[0.0]), 1e-3);
        assert!((relative_error(&[1.1, 0.0], &[1.0, 0.0]) - 0.1).abs() < 1e-12);
    }
}
