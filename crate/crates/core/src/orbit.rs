//! Surveys of the moment map over unit spheres and group orbits, measured
//! through Casimir invariants, and the Heisenberg expectation-value table.
//!
//! Nothing here asserts that the unit sphere maps into a single coadjoint
//! orbit. Sphere surveys record the Casimir distribution and let the
//! numbers speak. Orbit surveys do carry a pass criterion, because
//! equivariance forces the Casimir to be constant along `rho(G) x0`.
//!
//! Under the conventions of [`crate::moment`], the highest-weight state of
//! spin `j` has `mu = (0, 0, -j/2)`, so its coadjoint sphere has radius `j/2`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::exec::{self, Execution};
use crate::lie::{DualVector, GroupWord, LieAlgebra};
use crate::linalg::{CMatrix, RMatrix};
use crate::moment::{random_algebra_vector, DualPolynomial, MomentContext, PolynomialTerm};
use crate::rep::{annihilation, CatalogKind, StateVector};
use crate::rng;

/// Orbit surveys pass when the Casimir spread is at most this.
pub const ORBIT_SPREAD_TOL: f64 = 1e-9;
/// Survey states must have unit norm to this tolerance.
pub const UNIT_NORM_TOL: f64 = 1e-12;
/// Expectation-table columns must agree to this tolerance.
pub const EXPECTATION_TOL: f64 = 1e-12;
/// Largest admissible norm of a state's component outside the validity subspace.
pub const VALIDITY_LEAK_TOL: f64 = 1e-12;
/// Number of histogram bins in survey aggregates.
pub const HISTOGRAM_BINS: usize = 10;

/// A named polynomial invariant on the dual of the algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct CasimirSpec {
    name: String,
    poly: DualPolynomial,
}

impl CasimirSpec {
    pub fn new(name: impl Into<String>, poly: DualPolynomial) -> Self {
        Self {
            name: name.into(),
            poly,
        }
    }

    /// `xi_1^2 + xi_2^2 + xi_3^2` on `su(2)*`.
    pub fn su2_quadratic() -> Self {
        Self::new(
            "su2_quadratic",
            DualPolynomial::quadratic_form(RMatrix::identity(3, 3)),
        )
    }

    /// The central coordinate `xi_Z` on the Heisenberg dual.
    pub fn heisenberg_center() -> Self {
        let terms = [PolynomialTerm {
            vars: vec![2],
            coef: 1.0,
        }];
        Self::new(
            "heisenberg_center",
            DualPolynomial::from_terms(3, &terms).expect("index 2 is in range"),
        )
    }

    /// Looks up a builtin by name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "su2_quadratic" => Some(Self::su2_quadratic()),
            "heisenberg_center" => Some(Self::heisenberg_center()),
            _ => None,
        }
    }

    /// The natural builtin for a catalog representation, if there is one.
    pub fn default_for(kind: &CatalogKind) -> Option<Self> {
        match kind {
            CatalogKind::Su2Spin { .. } => Some(Self::su2_quadratic()),
            CatalogKind::HeisenbergTruncated { .. } => Some(Self::heisenberg_center()),
            CatalogKind::Circle { .. } => Some(Self::new(
                "circle_coordinate",
                DualPolynomial::from_terms(
                    1,
                    &[PolynomialTerm {
                        vars: vec![0],
                        coef: 1.0,
                    }],
                )
                .expect("index 0 is in range"),
            )),
            CatalogKind::DirectSum(parts) => parts.first().and_then(Self::default_for),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn value(&self, xi: &DualVector) -> f64 {
        self.poly.value(xi)
    }

    pub fn differential(&self, xi: &DualVector) -> crate::lie::AlgebraVector {
        self.poly.differential(xi)
    }
}

/// A word of `length` letters with coordinates uniform in `[-scale, scale]`.
pub fn sample_group_word(
    alg: &LieAlgebra,
    length: usize,
    scale: f64,
    seed: u64,
) -> Result<GroupWord> {
    check_scale(scale)?;
    Ok(word_from_rng(
        &mut rng::stream(seed, 0),
        alg.dim(),
        length,
        scale,
    ))
}

fn check_scale(scale: f64) -> Result<()> {
    if scale > 0.0 && scale.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "word scale must be positive, got {scale}"
        )))
    }
}

pub(crate) fn word_from_rng<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    length: usize,
    scale: f64,
) -> GroupWord {
    GroupWord::new(
        (0..length)
            .map(|_| random_algebra_vector(rng, n, scale))
            .collect(),
    )
}

/// `max |C(Ad'(g) xi) - C(xi)|` over random `xi` in `[-1, 1]^n` and random
/// words of length 3 and scale 1.
pub fn casimir_invariance_defect(
    alg: &LieAlgebra,
    spec: &CasimirSpec,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    check_dim("Casimir variables", alg.dim(), spec.dim())?;
    if trials == 0 {
        return Err(Error::InvalidInput(
            "Casimir check needs at least one trial".into(),
        ));
    }
    let n = alg.dim();
    let defects = exec::try_map_indexed(Execution::default(), trials, |t| -> Result<f64> {
        let mut rng = rng::stream(seed, t as u64);
        let xi = DualVector(random_algebra_vector(&mut rng, n, 1.0).0);
        let g = word_from_rng(&mut rng, n, 3, 1.0);
        let moved = alg.coadjoint_action(&g, &xi)?;
        Ok((spec.value(&moved) - spec.value(&xi)).abs())
    })?;
    Ok(defects.into_iter().fold(0.0, crate::exec::nan_max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurveyKind {
    Sphere,
    Orbit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub sample_index: usize,
    pub state_digest: String,
    pub mu: Vec<f64>,
    pub casimir: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CasimirAggregates {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub spread: f64,
    pub histogram: Histogram,
}

impl CasimirAggregates {
    fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let mut counts = vec![0u64; HISTOGRAM_BINS];
        let width = (max - min) / HISTOGRAM_BINS as f64;
        for v in values {
            let bin = if width > 0.0 {
                (((v - min) / width) as usize).min(HISTOGRAM_BINS - 1)
            } else {
                0
            };
            counts[bin] += 1;
        }
        Some(Self {
            min,
            max,
            mean,
            spread: max - min,
            histogram: Histogram {
                lo: min,
                hi: max,
                counts,
            },
        })
    }
}

/// Moment-map values and Casimir statistics over a set of unit states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub kind: SurveyKind,
    pub representation: String,
    pub casimir_name: String,
    pub seed: u64,
    pub sample_count: usize,
    pub records: Vec<SurveyRecord>,
    pub aggregates: Option<CasimirAggregates>,
}

impl SurveyReport {
    fn assemble(
        kind: SurveyKind,
        ctx: &MomentContext,
        spec: &CasimirSpec,
        seed: u64,
        records: Vec<SurveyRecord>,
    ) -> Self {
        let values: Vec<f64> = records.iter().map(|r| r.casimir).collect();
        Self {
            kind,
            representation: ctx.rep().to_string(),
            casimir_name: spec.name().to_string(),
            seed,
            sample_count: records.len(),
            aggregates: CasimirAggregates::from_values(&values),
            records,
        }
    }

    /// `max - min` of the Casimir over all records; zero for an empty survey.
    pub fn casimir_spread(&self) -> f64 {
        self.aggregates.as_ref().map_or(0.0, |a| a.spread)
    }

    /// CSV with columns `sample_index,casimir,mu_1..mu_n,norm`.
    ///
    /// An empty survey has no `mu` columns beyond what `algebra_dim` declares.
    pub fn to_csv(&self, algebra_dim: usize) -> String {
        let mut out = String::from("sample_index,casimir");
        for i in 1..=algebra_dim {
            let _ = write!(out, ",mu_{i}");
        }
        out.push_str(",norm\n");
        for r in &self.records {
            let _ = write!(out, "{},{:?}", r.sample_index, r.casimir);
            for m in &r.mu {
                let _ = write!(out, ",{m:?}");
            }
            let _ = writeln!(out, ",{:?}", r.norm);
        }
        out
    }
}

fn record(
    ctx: &MomentContext,
    spec: &CasimirSpec,
    index: usize,
    x: &StateVector,
) -> Result<SurveyRecord> {
    let mu = ctx.moment(x)?;
    let casimir = spec.value(&mu);
    let norm = x.norm();
    if !casimir.is_finite() || !mu.is_finite() {
        return Err(Error::NonFinite {
            message: "moment or Casimir value".into(),
            sample: Some(index),
        });
    }
    if (norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::NonFinite {
            message: format!("survey state drifted off the unit sphere (norm {norm})"),
            sample: Some(index),
        });
    }
    Ok(SurveyRecord {
        sample_index: index,
        state_digest: x.digest(),
        mu: mu.0,
        casimir,
        norm,
    })
}

/// Surveys `mu` over uniformly random unit states of the validity subspace.
pub fn sphere_survey(
    ctx: &MomentContext,
    spec: &CasimirSpec,
    samples: usize,
    seed: u64,
) -> Result<SurveyReport> {
    sphere_survey_with(Execution::default(), ctx, spec, samples, seed)
}

pub fn sphere_survey_with(
    execution: Execution,
    ctx: &MomentContext,
    spec: &CasimirSpec,
    samples: usize,
    seed: u64,
) -> Result<SurveyReport> {
    check_dim("Casimir variables", ctx.rep().algebra().dim(), spec.dim())?;
    if samples == 0 {
        return Err(Error::InvalidInput(
            "sphere survey needs at least one sample".into(),
        ));
    }
    let records = exec::try_map_indexed(execution, samples, |i| {
        let x = ctx
            .rep()
            .random_unit_state(&mut rng::stream(seed, i as u64));
        record(ctx, spec, i, &x)
    })?;
    Ok(SurveyReport::assemble(
        SurveyKind::Sphere,
        ctx,
        spec,
        seed,
        records,
    ))
}

/// Parameters of an orbit survey.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitParams {
    pub words: usize,
    pub length: usize,
    pub scale: f64,
    pub seed: u64,
}

/// Surveys `mu` along `rho(g) x0` for random words `g`.
///
/// Record 0 is `x0` itself; record `i >= 1` uses the word drawn from stream `i`.
pub fn orbit_survey(
    ctx: &MomentContext,
    spec: &CasimirSpec,
    x0: &StateVector,
    params: OrbitParams,
) -> Result<SurveyReport> {
    check_dim("Casimir variables", ctx.rep().algebra().dim(), spec.dim())?;
    check_dim("state vector", ctx.rep().dim(), x0.dim())?;
    check_scale(params.scale)?;
    if (x0.norm() - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::InvalidInput(format!(
            "orbit survey needs a unit start state, got norm {}",
            x0.norm()
        )));
    }
    check_validity(ctx, x0)?;
    let n = ctx.rep().algebra().dim();
    let records = exec::try_map_indexed(Execution::default(), params.words + 1, |i| {
        let x = if i == 0 {
            x0.clone()
        } else {
            let g = word_from_rng(
                &mut rng::stream(params.seed, i as u64),
                n,
                params.length,
                params.scale,
            );
            x0.apply(&ctx.rep().rho(&g)?)
        };
        record(ctx, spec, i, &x)
    })?;
    Ok(SurveyReport::assemble(
        SurveyKind::Orbit,
        ctx,
        spec,
        params.seed,
        records,
    ))
}

fn check_validity(ctx: &MomentContext, x: &StateVector) -> Result<()> {
    let leak = ctx.rep().validity_leakage(x);
    if leak > VALIDITY_LEAK_TOL {
        return Err(Error::InvalidInput(format!(
            "state has weight {leak:e} outside the validity subspace"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationRow {
    pub state_index: usize,
    pub mu_q: f64,
    pub mu_p: f64,
    pub mu_z: f64,
    /// `<X x, x> / 2` with the Hermitian position operator.
    pub half_position: f64,
    /// `<P x, x> / 2` with the Hermitian momentum operator.
    pub half_momentum: f64,
}

/// Moment coordinates next to Hermitian expectation values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationTable {
    pub rows: Vec<ExpectationRow>,
    /// `max |mu_q - <X>/2|, |mu_p - <P>/2|` over rows.
    pub max_deviation: f64,
}

impl ExpectationTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("state_index,mu_q,mu_p,mu_z,half_position,half_momentum\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:?},{:?},{:?},{:?},{:?}",
                r.state_index, r.mu_q, r.mu_p, r.mu_z, r.half_position, r.half_momentum
            );
        }
        out
    }

    pub fn passes(&self) -> bool {
        self.max_deviation <= EXPECTATION_TOL
    }
}

/// Compares `mu(x)(Q), mu(x)(P)` with half the expectations of the Hermitian
/// position and momentum operators, built here directly from the ladder
/// operator rather than from the representation's generators.
pub fn expectation_table(ctx: &MomentContext, states: &[StateVector]) -> Result<ExpectationTable> {
    let n = match ctx.rep().kind() {
        Some(CatalogKind::HeisenbergTruncated { n }) => *n,
        _ => {
            return Err(Error::InvalidInput(format!(
                "expectation table needs a truncated Heisenberg representation, got {}",
                ctx.rep()
            )))
        }
    };
    let a = annihilation(n);
    let a_dag = a.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let position: CMatrix = (&a + &a_dag) * Complex64::new(s, 0.0);
    let momentum: CMatrix = (&a - &a_dag) * Complex64::new(0.0, -s);
    let expect = |op: &CMatrix, x: &StateVector| -> f64 {
        (op * &x.0)
            .iter()
            .zip(x.0.iter())
            .map(|(u, v)| u * v.conj())
            .sum::<Complex64>()
            .re
    };

    let mut rows = Vec::with_capacity(states.len());
    let mut max_deviation: f64 = 0.0;
    for (i, x) in states.iter().enumerate() {
        check_dim("state vector", n, x.dim())?;
        if (x.norm() - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::InvalidInput(format!(
                "state {i} is not a unit vector"
            )));
        }
        check_validity(ctx, x)?;
        let mu = ctx.moment(x)?;
        let row = ExpectationRow {
            state_index: i,
            mu_q: mu.coords()[0],
            mu_p: mu.coords()[1],
            mu_z: mu.coords()[2],
            half_position: 0.5 * expect(&position, x),
            half_momentum: 0.5 * expect(&momentum, x),
        };
        max_deviation = max_deviation
            .max((row.mu_q - row.half_position).abs())
            .max((row.mu_p - row.half_momentum).abs());
        rows.push(row);
    }
    Ok(ExpectationTable {
        rows,
        max_deviation,
    })
}
