//! Finite-dimensional real Lie algebras given by structure constants, and
//! the adjoint and coadjoint actions of the connected group they generate.
//!
//! Group elements are [`GroupWord`]s, finite products `exp(X_1)...exp(X_m)`.
//! Every element of the identity component is such a product, and nothing
//! downstream needs a faithful matrix model of the group itself.

use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{expm, RMatrix};

/// Tolerance for antisymmetry of user-supplied structure constants.
const ANTISYMMETRY_TOL: f64 = 1e-12;
/// Jacobi tolerance applied when loading algebras from documents.
pub const JACOBI_TOL: f64 = 1e-12;

/// An element of the Lie algebra, in the fixed basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlgebraVector(pub Vec<f64>);

/// An element of the dual space, in the dual basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DualVector(pub Vec<f64>);

macro_rules! coord_vector {
    ($t:ident) => {
        impl $t {
            pub fn zeros(n: usize) -> Self {
                Self(vec![0.0; n])
            }

            /// The `k`-th basis vector of an `n`-dimensional space.
            pub fn basis(n: usize, k: usize) -> Self {
                let mut v = vec![0.0; n];
                v[k] = 1.0;
                Self(v)
            }

            pub fn coords(&self) -> &[f64] {
                &self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|c| c.is_finite())
            }

            pub fn scaled(&self, s: f64) -> Self {
                Self(self.0.iter().map(|c| c * s).collect())
            }

            /// Max-norm distance to another vector of the same length.
            pub fn max_diff(&self, other: &Self) -> f64 {
                self.0
                    .iter()
                    .zip(&other.0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            }

            pub(crate) fn to_dvector(&self) -> DVector<f64> {
                DVector::from_column_slice(&self.0)
            }
        }

        impl From<Vec<f64>> for $t {
            fn from(v: Vec<f64>) -> Self {
                Self(v)
            }
        }

        impl From<DVector<f64>> for $t {
            fn from(v: DVector<f64>) -> Self {
                Self(v.iter().copied().collect())
            }
        }
    };
}

coord_vector!(AlgebraVector);
coord_vector!(DualVector);

impl std::ops::Add for &AlgebraVector {
    type Output = AlgebraVector;

    fn add(self, rhs: Self) -> AlgebraVector {
        AlgebraVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

/// A connected-group element `exp(X_1) exp(X_2) ... exp(X_m)`.
///
/// The empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroupWord {
    pub letters: Vec<AlgebraVector>,
}

impl GroupWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(letters: Vec<AlgebraVector>) -> Self {
        Self { letters }
    }

    /// `exp(X)` as a one-letter word.
    pub fn exp(x: AlgebraVector) -> Self {
        Self { letters: vec![x] }
    }

    /// Reversed word with negated letters.
    pub fn inverse(&self) -> Self {
        Self {
            letters: self.letters.iter().rev().map(|x| x.scaled(-1.0)).collect(),
        }
    }

    /// The product `self * other`.
    pub fn compose(&self, other: &GroupWord) -> Self {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        Self { letters }
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }
}

/// A real Lie algebra `[e_i, e_j] = sum_k c[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    labels: Vec<String>,
    /// Dense `n * n * n` array indexed `(i * n + j) * n + k`.
    structure: Vec<f64>,
}

impl LieAlgebra {
    /// Builds an algebra from a dense structure-constant array.
    ///
    /// Rejects non-finite or non-antisymmetric constants. The Jacobi
    /// identity is not enforced here; see [`LieAlgebra::jacobi_defect`].
    pub fn new(labels: Vec<String>, structure: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidInput(
                "algebra dimension must be positive".into(),
            ));
        }
        check_dim("structure constants", n * n * n, structure.len())?;
        if structure.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(
                "structure constants must be finite".into(),
            ));
        }
        let alg = Self { labels, structure };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let s = alg.c(i, j, k) + alg.c(j, i, k);
                    if s.abs() > ANTISYMMETRY_TOL {
                        return Err(Error::InvalidInput(format!(
                            "structure constants are not antisymmetric at ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        Ok(alg)
    }

    /// Builds an algebra from the nonzero constants `(i, j, k, c)` with `i < j`;
    /// the entries for `(j, i)` follow by antisymmetry.
    pub fn from_sparse(
        labels: Vec<String>,
        entries: &[(usize, usize, usize, f64)],
    ) -> Result<Self> {
        let n = labels.len();
        let mut structure = vec![0.0; n * n * n];
        for &(i, j, k, c) in entries {
            if i >= n || j >= n || k >= n {
                return Err(Error::InvalidInput(format!(
                    "structure index ({i}, {j}, {k}) out of range for dimension {n}"
                )));
            }
            if i >= j {
                return Err(Error::InvalidInput(format!(
                    "structure entry ({i}, {j}, {k}) must have i < j"
                )));
            }
            structure[(i * n + j) * n + k] += c;
            structure[(j * n + i) * n + k] -= c;
        }
        Self::new(labels, structure)
    }

    /// Parses `{"dim": n, "labels": [...], "structure": [[i, j, k, c], ...]}`.
    ///
    /// Indices are zero-based. The loaded algebra must satisfy the Jacobi
    /// identity to [`JACOBI_TOL`].
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: AlgebraDocument = serde_json::from_str(text)?;
        Self::from_document(&doc)
    }

    pub fn from_document(doc: &AlgebraDocument) -> Result<Self> {
        if doc.labels.len() != doc.dim {
            return Err(Error::InvalidInput(format!(
                "algebra declares dim {} but lists {} labels",
                doc.dim,
                doc.labels.len()
            )));
        }
        let entries: Vec<_> = doc.structure.iter().map(|e| (e.0, e.1, e.2, e.3)).collect();
        let alg = Self::from_sparse(doc.labels.clone(), &entries)?;
        let defect = alg.jacobi_defect();
        if defect > JACOBI_TOL {
            return Err(Error::InvalidInput(format!(
                "structure constants violate the Jacobi identity (defect {defect:e})"
            )));
        }
        Ok(alg)
    }

    /// The document form, listing nonzero constants with `i < j`.
    pub fn to_document(&self) -> AlgebraDocument {
        let n = self.dim();
        let mut structure = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let c = self.c(i, j, k);
                    if c != 0.0 {
                        structure.push(StructureEntry(i, j, k, c));
                    }
                }
            }
        }
        AlgebraDocument {
            dim: n,
            labels: self.labels.clone(),
            structure,
        }
    }

    /// `su(2)` with `[e_1, e_2] = e_3` and cyclic permutations.
    pub fn su2() -> Self {
        Self::from_sparse(
            labels(&["e1", "e2", "e3"]),
            &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (0, 2, 1, -1.0)],
        )
        .expect("su(2) constants are antisymmetric")
    }

    /// The Heisenberg algebra on `(Q, P, Z)` with `[Q, P] = Z`, `Z` central.
    pub fn heisenberg() -> Self {
        Self::from_sparse(labels(&["Q", "P", "Z"]), &[(0, 1, 2, 1.0)])
            .expect("Heisenberg constants are antisymmetric")
    }

    /// The abelian algebra of dimension `n`.
    pub fn abelian(n: usize) -> Result<Self> {
        let names: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
        Self::new(names, vec![0.0; n * n * n])
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// The structure constant `c[i][j][k]`.
    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim();
        self.structure[(i * n + j) * n + k]
    }

    pub fn bracket(&self, x: &AlgebraVector, y: &AlgebraVector) -> Result<AlgebraVector> {
        let n = self.dim();
        check_dim("algebra vector", n, x.len())?;
        check_dim("algebra vector", n, y.len())?;
        let mut out = vec![0.0; n];
        for i in 0..n {
            if x.0[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = x.0[i] * y.0[j];
                if w == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += w * self.c(i, j, k);
                }
            }
        }
        Ok(AlgebraVector(out))
    }

    /// Max over basis triples of the Jacobiator in the max norm.
    pub fn jacobi_defect(&self) -> f64 {
        let n = self.dim();
        let e = |i| AlgebraVector::basis(n, i);
        let br = |a: &AlgebraVector, b: &AlgebraVector| self.bracket(a, b).expect("basis dims");
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let a = br(&br(&e(i), &e(j)), &e(k));
                    let b = br(&br(&e(j), &e(k)), &e(i));
                    let c = br(&br(&e(k), &e(i)), &e(j));
                    for t in 0..n {
                        worst = worst.max((a.0[t] + b.0[t] + c.0[t]).abs());
                    }
                }
            }
        }
        worst
    }

    /// The matrix of `ad(X) = [X, -]` acting on coordinate columns.
    pub fn ad_matrix(&self, x: &AlgebraVector) -> Result<RMatrix> {
        let n = self.dim();
        check_dim("algebra vector", n, x.len())?;
        Ok(RMatrix::from_fn(n, n, |k, j| {
            (0..n).map(|i| x.0[i] * self.c(i, j, k)).sum()
        }))
    }

    /// `Ad(g) = exp(ad X_1) ... exp(ad X_m)` as an `n x n` matrix.
    pub fn adjoint_matrix(&self, g: &GroupWord) -> Result<RMatrix> {
        let n = self.dim();
        let mut m = RMatrix::identity(n, n);
        for letter in &g.letters {
            m *= expm(&self.ad_matrix(letter)?);
        }
        Ok(m)
    }

    pub fn adjoint_action(&self, g: &GroupWord, x: &AlgebraVector) -> Result<AlgebraVector> {
        check_dim("algebra vector", self.dim(), x.len())?;
        Ok((self.adjoint_matrix(g)? * x.to_dvector()).into())
    }

    /// Matrix of `Ad'(g) = Ad(g^-1)^T` acting on dual coordinates.
    pub fn coadjoint_matrix(&self, g: &GroupWord) -> Result<RMatrix> {
        Ok(self.adjoint_matrix(&g.inverse())?.transpose())
    }

    /// `xi o Ad(g^-1)`.
    pub fn coadjoint_action(&self, g: &GroupWord, xi: &DualVector) -> Result<DualVector> {
        check_dim("dual vector", self.dim(), xi.len())?;
        Ok((self.coadjoint_matrix(g)? * xi.to_dvector()).into())
    }
}

impl fmt::Display for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Lie algebra of dimension {} [{}]",
            self.dim(),
            self.labels.join(", ")
        )
    }
}

/// Evaluation of a dual vector on an algebra vector.
pub fn pair(xi: &DualVector, x: &AlgebraVector) -> Result<f64> {
    check_dim("algebra vector", xi.len(), x.len())?;
    Ok(xi.0.iter().zip(&x.0).map(|(a, b)| a * b).sum())
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Serialized form of a [`LieAlgebra`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDocument {
    pub dim: usize,
    pub labels: Vec<String>,
    pub structure: Vec<StructureEntry>,
}

/// `[i, j, k, c]`: the constant `c[i][j][k]`, zero-based, with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureEntry(pub usize, pub usize, pub usize, pub f64);
