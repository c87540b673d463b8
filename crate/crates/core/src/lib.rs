//! Moment maps of finite-dimensional unitary representations.
//!
//! A representation `rho` of a connected Lie group `G` on `C^d` is given by
//! skew-Hermitian generators `A_i = rho'(e_i)`. Viewing `C^d` as a real
//! symplectic space with `omega = Im <-, ->`, each algebra element `X`
//! lifts to the quadratic Hamiltonian `sigma(X)(x) = omega(rho'(X) x, x) / 2`
//! and the moment map is `mu(x)(X) = sigma(X)(x)`.
//!
//! The crate computes these objects and checks their structural
//! properties numerically: `sigma` is a Lie algebra homomorphism into the
//! Poisson algebra with `grad sigma(X) = rho'(X)`, `d mu` has the expected
//! image and kernel, `mu` is equivariant for the coadjoint action, and
//! pullback along `mu` respects the Poisson brackets.
//!
//! Everything is finite-dimensional. All maps are smooth, every vector is a
//! smooth vector, and the space of functions with smooth omega-gradients is
//! the space of all smooth functions.
//!
//! Modules:
//! - [`lie`]: structure constants, adjoint and coadjoint actions
//! - [`rep`]: unitary representations and the built-in catalog
//! - [`symplectic`]: `omega`, gradients, Poisson brackets, finite differences
//! - [`moment`]: `sigma`, `mu`, `d mu`, and their structural checks
//! - [`orbit`]: Casimir surveys of `mu` over spheres and group orbits
//! - [`harness`]: config-driven experiment runner behind the `momentlab` binary

pub mod error;
pub mod exec;
pub mod harness;
pub mod lie;
mod linalg;
pub mod moment;
pub mod orbit;
pub mod rep;
pub mod rng;
pub mod symplectic;

pub use error::{Error, Result};
pub use exec::Execution;
pub use lie::{pair, AlgebraVector, DualVector, GroupWord, LieAlgebra};
pub use linalg::{CMatrix, CVector, RMatrix};
pub use moment::{DualPolynomial, MomentContext, Tolerances};
pub use orbit::{CasimirSpec, SurveyReport};
pub use rep::{CatalogKind, Representation, StateVector, ValidityDefects};
pub use symplectic::{HermitianSpace, Observable, QuadraticObservable, SmoothDualElement};
