//! Finite-dimensional unitary representations given by skew-Hermitian
//! generator matrices `A_i = rho'(e_i)`.
//!
//! At finite dimension every vector is smooth, so the state space here is
//! the whole of `C^d`. Truncated models of infinite-dimensional
//! representations carry a validity subspace: the span of the basis modes
//! on which the bracket relations hold exactly.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lie::{AlgebraDocument, AlgebraVector, GroupWord, LieAlgebra};
use crate::linalg::{commutator, expm, max_abs, null_space, realify, CMatrix, CVector, RMatrix};

/// Default null-space threshold, relative to the largest singular value.
pub const DEFAULT_NULL_TOL: f64 = 1e-8;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A vector of the representation space `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(pub CVector);

impl StateVector {
    pub fn zeros(d: usize) -> Self {
        Self(CVector::zeros(d))
    }

    /// The `k`-th standard basis vector of `C^d`.
    pub fn basis(d: usize, k: usize) -> Self {
        let mut v = CVector::zeros(d);
        v[k] = Complex64::new(1.0, 0.0);
        Self(v)
    }

    pub fn from_complex(coords: Vec<Complex64>) -> Self {
        Self(CVector::from_vec(coords))
    }

    /// Builds a state from `(re, im)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        Self::from_complex(
            pairs
                .iter()
                .map(|&(re, im)| Complex64::new(re, im))
                .collect(),
        )
    }

    /// Parses the interleaved form `[re_0, im_0, re_1, im_1, ...]`.
    pub fn from_interleaved(values: &[f64]) -> Result<Self> {
        if !values.len().is_multiple_of(2) {
            return Err(Error::InvalidInput(
                "interleaved state must have an even number of entries".into(),
            ));
        }
        Ok(Self::from_complex(
            values
                .chunks(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect(),
        ))
    }

    /// `[re_0, im_0, re_1, im_1, ...]`.
    pub fn to_interleaved(&self) -> Vec<f64> {
        self.0.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &CVector {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn normalized(&self) -> Self {
        Self(self.0.unscale(self.norm()))
    }

    pub fn apply(&self, m: &CMatrix) -> Self {
        Self(m * &self.0)
    }

    /// Max-modulus distance.
    pub fn max_diff(&self, other: &Self) -> f64 {
        (&self.0 - &other.0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// SHA-256 of the little-endian interleaved coordinates, first 16 hex digits.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        for v in self.to_interleaved() {
            h.update(v.to_le_bytes());
        }
        hex::encode(h.finalize())[..16].to_string()
    }
}

impl std::ops::Add for &StateVector {
    type Output = StateVector;

    fn add(self, rhs: Self) -> StateVector {
        StateVector(&self.0 + &rhs.0)
    }
}

impl std::ops::Sub for &StateVector {
    type Output = StateVector;

    fn sub(self, rhs: Self) -> StateVector {
        StateVector(&self.0 - &rhs.0)
    }
}

impl Serialize for StateVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_interleaved().serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<f64>::deserialize(d)?;
        Self::from_interleaved(&values).map_err(serde::de::Error::custom)
    }
}

/// Built-in representations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalogKind {
    /// Spin `j = twice_j / 2` representation of `su(2)`.
    Su2Spin { twice_j: u32 },
    /// Schroedinger representation of the Heisenberg algebra on the first `n` Hermite modes.
    HeisenbergTruncated { n: usize },
    /// Character `e^{i k t}` of the circle group.
    Circle { charge: i64 },
    /// Block-diagonal sum over a shared algebra.
    DirectSum(Vec<CatalogKind>),
}

impl CatalogKind {
    pub fn spin(twice_j: u32) -> Self {
        CatalogKind::Su2Spin { twice_j }
    }

    fn algebra(&self) -> Result<LieAlgebra> {
        match self {
            CatalogKind::Su2Spin { .. } => Ok(LieAlgebra::su2()),
            CatalogKind::HeisenbergTruncated { .. } => Ok(LieAlgebra::heisenberg()),
            CatalogKind::Circle { .. } => LieAlgebra::abelian(1),
            CatalogKind::DirectSum(parts) => parts
                .first()
                .ok_or_else(|| Error::InvalidInput("direct sum needs at least one summand".into()))?
                .algebra(),
        }
    }
}

impl fmt::Display for CatalogKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogKind::Su2Spin { twice_j } if twice_j % 2 == 0 => {
                write!(f, "su2(j={})", twice_j / 2)
            }
            CatalogKind::Su2Spin { twice_j } => write!(f, "su2(j={}/2)", twice_j),
            CatalogKind::HeisenbergTruncated { n } => write!(f, "heisenberg(N={n})"),
            CatalogKind::Circle { charge } => write!(f, "circle(k={charge})"),
            CatalogKind::DirectSum(parts) => {
                write!(f, "direct_sum(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Worst-case violations of the representation invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityDefects {
    /// `max_i |A_i + A_i^*|_inf`.
    pub skewness: f64,
    /// `max_{i<j} |([A_i, A_j] - sum_k c_ijk A_k) P|_inf` with `P` the
    /// projector onto the validity subspace.
    pub bracket: f64,
}

/// A representation `rho'` of a Lie algebra on `C^d`.
#[derive(Debug, Clone)]
pub struct Representation {
    algebra: Arc<LieAlgebra>,
    generators: Vec<CMatrix>,
    validity: Vec<usize>,
    kind: Option<CatalogKind>,
}

impl Representation {
    /// Builds a representation from generator matrices.
    ///
    /// Only shapes are checked here; use [`Representation::validity_defects`]
    /// for the skewness and bracket invariants. `validity` lists the basis
    /// modes spanning the validity subspace, or `None` for all of `C^d`.
    pub fn new(
        algebra: Arc<LieAlgebra>,
        generators: Vec<CMatrix>,
        validity: Option<Vec<usize>>,
    ) -> Result<Self> {
        check_dim("generator count", algebra.dim(), generators.len())?;
        let d = generators[0].nrows();
        if d == 0 {
            return Err(Error::InvalidInput(
                "representation dimension must be positive".into(),
            ));
        }
        for g in &generators {
            check_dim("generator rows", d, g.nrows())?;
            check_dim("generator columns", d, g.ncols())?;
            if g.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidInput(
                    "generator entries must be finite".into(),
                ));
            }
        }
        let validity = match validity {
            None => (0..d).collect(),
            Some(mut modes) => {
                modes.sort_unstable();
                modes.dedup();
                if modes.is_empty() {
                    return Err(Error::InvalidInput(
                        "validity subspace must be nonempty".into(),
                    ));
                }
                if let Some(&m) = modes.iter().find(|&&m| m >= d) {
                    return Err(Error::InvalidInput(format!(
                        "validity mode {m} out of range for dimension {d}"
                    )));
                }
                modes
            }
        };
        Ok(Self {
            algebra,
            generators,
            validity,
            kind: None,
        })
    }

    /// Constructs a built-in representation.
    pub fn catalog(kind: &CatalogKind) -> Result<Self> {
        let algebra = Arc::new(kind.algebra()?);
        let (generators, validity) = catalog_generators(kind, &algebra)?;
        let mut rep = Self::new(algebra, generators, Some(validity))?;
        rep.kind = Some(kind.clone());
        Ok(rep)
    }

    /// Parses `{"algebra": {...}, "dim": d, "generators": [...], "validity_subspace": [...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: RepresentationDocument = serde_json::from_str(text)?;
        let algebra = Arc::new(LieAlgebra::from_document(&doc.algebra)?);
        let d = doc.dim;
        let mut generators = Vec::with_capacity(doc.generators.len());
        for (i, entries) in doc.generators.iter().enumerate() {
            if entries.len() != d * d {
                return Err(Error::InvalidInput(format!(
                    "generator {i} has {} entries, expected {}",
                    entries.len(),
                    d * d
                )));
            }
            generators.push(CMatrix::from_row_iterator(
                d,
                d,
                entries.iter().map(|&[re, im]| Complex64::new(re, im)),
            ));
        }
        Self::new(algebra, generators, doc.validity_subspace)
    }

    pub fn to_document(&self) -> RepresentationDocument {
        let all: Vec<usize> = (0..self.dim()).collect();
        RepresentationDocument {
            algebra: self.algebra.to_document(),
            dim: self.dim(),
            generators: self
                .generators
                .iter()
                .map(|g| g.transpose().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
            validity_subspace: (self.validity != all).then(|| self.validity.clone()),
        }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn algebra_arc(&self) -> Arc<LieAlgebra> {
        Arc::clone(&self.algebra)
    }

    /// Complex dimension `d` of the representation space.
    pub fn dim(&self) -> usize {
        self.generators[0].nrows()
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn kind(&self) -> Option<&CatalogKind> {
        self.kind.as_ref()
    }

    /// Basis modes spanning the validity subspace, ascending.
    pub fn validity_modes(&self) -> &[usize] {
        &self.validity
    }

    /// Euclidean norm of the part of `x` outside the validity subspace.
    pub fn validity_leakage(&self, x: &StateVector) -> f64 {
        let mut inside = vec![false; self.dim()];
        for &m in &self.validity {
            inside[m] = true;
        }
        x.0.iter()
            .zip(&inside)
            .filter(|(_, &ok)| !ok)
            .map(|(z, _)| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// A unit vector distributed uniformly on the sphere of the validity subspace.
    pub fn random_unit_state<R: Rng + ?Sized>(&self, rng: &mut R) -> StateVector {
        loop {
            let mut v = CVector::zeros(self.dim());
            for &m in &self.validity {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                v[m] = Complex64::new(re, im);
            }
            let n = v.norm();
            if n > 1e-300 {
                return StateVector(v.unscale(n));
            }
        }
    }

    /// `rho'(X) = sum_i X^i A_i`.
    pub fn rho_prime(&self, x: &AlgebraVector) -> Result<CMatrix> {
        check_dim("algebra vector", self.algebra.dim(), x.len())?;
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for (c, a) in x.coords().iter().zip(&self.generators) {
            if *c != 0.0 {
                m += a * Complex64::new(*c, 0.0);
            }
        }
        Ok(m)
    }

    /// `rho(g) = exp(rho'(X_1)) ... exp(rho'(X_m))`.
    pub fn rho(&self, g: &GroupWord) -> Result<CMatrix> {
        let d = self.dim();
        let mut m = CMatrix::identity(d, d);
        for letter in &g.letters {
            m *= expm(&self.rho_prime(letter)?);
        }
        Ok(m)
    }

    pub fn validity_defects(&self) -> ValidityDefects {
        let skewness = self
            .generators
            .iter()
            .map(|a| max_abs(&(a + a.adjoint())))
            .fold(0.0, f64::max);

        let d = self.dim();
        let mut projector = CMatrix::zeros(d, d);
        for &m in &self.validity {
            projector[(m, m)] = Complex64::new(1.0, 0.0);
        }
        let n = self.algebra.dim();
        let mut bracket: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let mut err = commutator(&self.generators[i], &self.generators[j]);
                for k in 0..n {
                    let c = self.algebra.c(i, j, k);
                    if c != 0.0 {
                        err -= &self.generators[k] * Complex64::new(c, 0.0);
                    }
                }
                bracket = bracket.max(max_abs(&(err * &projector)));
            }
        }
        ValidityDefects { skewness, bracket }
    }

    /// Orthonormal basis of `g_x = {X : rho'(X) x = 0}`.
    ///
    /// Singular values of the real-linear map `X -> rho'(X) x` below
    /// `tol` times the largest are treated as zero.
    pub fn isotropy_algebra(&self, x: &StateVector, tol: f64) -> Result<Vec<AlgebraVector>> {
        check_dim("state vector", self.dim(), x.dim())?;
        if x.is_zero() {
            return Err(Error::InvalidInput(
                "isotropy of the zero vector is the whole algebra".into(),
            ));
        }
        let orbit = self.orbit_tangent_matrix(x);
        Ok(null_space(&orbit, tol)
            .basis
            .into_iter()
            .map(AlgebraVector::from)
            .collect())
    }

    /// The `2d x n` real matrix whose columns are `realify(A_i x)`.
    pub(crate) fn orbit_tangent_matrix(&self, x: &StateVector) -> RMatrix {
        let cols: Vec<DVector<f64>> = self
            .generators
            .iter()
            .map(|a| realify(&(a * &x.0)))
            .collect();
        RMatrix::from_columns(&cols)
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Some(k) => write!(f, "{k}"),
            None => write!(
                f,
                "custom(dim={}, algebra_dim={})",
                self.dim(),
                self.algebra.dim()
            ),
        }
    }
}

/// Serialized form of a custom [`Representation`].
///
/// Each generator is a row-major list of `d * d` entries `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationDocument {
    pub algebra: AlgebraDocument,
    pub dim: usize,
    pub generators: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validity_subspace: Option<Vec<usize>>,
}

fn catalog_generators(
    kind: &CatalogKind,
    algebra: &LieAlgebra,
) -> Result<(Vec<CMatrix>, Vec<usize>)> {
    match kind {
        CatalogKind::Su2Spin { twice_j } => {
            let [j1, j2, j3] = spin_matrices(*twice_j);
            let d = *twice_j as usize + 1;
            let minus_i = Complex64::new(0.0, -1.0);
            Ok((
                vec![j1 * minus_i, j2 * minus_i, j3 * minus_i],
                (0..d).collect(),
            ))
        }
        CatalogKind::HeisenbergTruncated { n } => {
            let n = *n;
            if n < 4 {
                return Err(Error::InvalidInput(format!(
                    "truncated Heisenberg needs at least 4 modes, got {n}"
                )));
            }
            let (x, p) = position_momentum(n);
            let a_z = CMatrix::identity(n, n) * Complex64::new(0.0, -1.0);
            Ok((vec![x * I, p * I, a_z], (0..n - 2).collect()))
        }
        CatalogKind::Circle { charge } => Ok((
            vec![CMatrix::from_element(
                1,
                1,
                Complex64::new(0.0, *charge as f64),
            )],
            vec![0],
        )),
        CatalogKind::DirectSum(parts) => {
            if parts.is_empty() {
                return Err(Error::InvalidInput(
                    "direct sum needs at least one summand".into(),
                ));
            }
            let mut blocks = Vec::with_capacity(parts.len());
            for p in parts {
                if &p.algebra()? != algebra {
                    return Err(Error::InvalidInput(format!(
                        "direct sum summand {p} acts on a different algebra"
                    )));
                }
                blocks.push(catalog_generators(p, algebra)?);
            }
            let d: usize = blocks.iter().map(|(g, _)| g[0].nrows()).sum();
            let n = algebra.dim();
            let mut generators = vec![CMatrix::zeros(d, d); n];
            let mut validity = Vec::new();
            let mut offset = 0;
            for (gens, modes) in &blocks {
                let size = gens[0].nrows();
                for (full, block) in generators.iter_mut().zip(gens) {
                    full.view_mut((offset, offset), (size, size))
                        .copy_from(block);
                }
                validity.extend(modes.iter().map(|m| m + offset));
                offset += size;
            }
            Ok((generators, validity))
        }
    }
}

/// Hermitian spin matrices `(J_1, J_2, J_3)` in the basis `m = j, j-1, ..., -j`.
pub fn spin_matrices(twice_j: u32) -> [CMatrix; 3] {
    let d = twice_j as usize + 1;
    let j = twice_j as f64 / 2.0;
    let m_of = |k: usize| j - k as f64;
    let mut raise = CMatrix::zeros(d, d);
    for k in 1..d {
        let m = m_of(k);
        raise[(k - 1, k)] = Complex64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let lower = raise.adjoint();
    let half = Complex64::new(0.5, 0.0);
    let j1 = (&raise + &lower) * half;
    let j2 = (&raise - &lower) * Complex64::new(0.0, -0.5);
    let j3 = CMatrix::from_diagonal(&CVector::from_fn(d, |k, _| Complex64::new(m_of(k), 0.0)));
    [j1, j2, j3]
}

/// Truncated ladder operator `a` on `n` Hermite modes: `a e_k = sqrt(k) e_{k-1}`.
pub fn annihilation(n: usize) -> CMatrix {
    let mut a = CMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    a
}

/// Hermitian position and momentum `X = (a + a^*)/sqrt 2`, `P = (a - a^*)/(i sqrt 2)`.
pub fn position_momentum(n: usize) -> (CMatrix, CMatrix) {
    let a = annihilation(n);
    let ad = a.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = (&a + &ad) * Complex64::new(s, 0.0);
    let p = (&a - &ad) * Complex64::new(0.0, -s);
    (x, p)
}
