//! Config-driven experiment runner and report emitter.
//!
//! A JSON config names a representation, an experiment, and its sample
//! counts. [`run_experiment`] dispatches to the numerical modules and
//! returns a [`Report`]; [`emit_report`] writes it as JSON (with a config
//! echo and tool version) or CSV. Output is a pure function of the config.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::lie::{AlgebraVector, GroupWord};
use crate::moment::{
    DualPolynomial, EquivarianceDefect, MomentContext, PolynomialTerm, Tolerances,
};
use crate::orbit::{self, CasimirSpec, ExpectationTable, OrbitParams, SurveyReport};
use crate::rep::{CatalogKind, Representation, StateVector, ValidityDefects};
use crate::rng;

pub const TOOL_VERSION: &str = concat!("momentlab ", env!("CARGO_PKG_VERSION"));

/// Validity experiments pass when both defects are at most this.
pub const VALIDITY_TOL: f64 = 1e-12;
pub const EQUIVARIANCE_TOL: f64 = 1e-9;
/// Truncated Heisenberg representations get a looser equivariance bound.
pub const EQUIVARIANCE_TOL_TRUNCATED: f64 = 1e-8;
pub const COCYCLE_TOL: f64 = 1e-10;
pub const PULLBACK_TOL: f64 = 1e-8;

/// Displacement used for the displaced state in expectation tables.
const DISPLACEMENT: f64 = 0.3;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config syntax error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config field `{field}`: {message}")]
    Validation { field: String, message: String },
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("runtime error: {0}")]
    Runtime(#[from] crate::Error),
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    /// Exit status: 2 for config errors, 3 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Runtime(_) | HarnessError::Io { .. } => 3,
        }
    }
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Validity,
    Equivariance,
    Rank,
    Cocycle,
    Pullback,
    SphereSurvey,
    OrbitSurvey,
    Expectation,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variants serialize");
        write!(f, "{}", s.as_str().unwrap_or("?"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Representation as written in a config document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RepSpec {
    Su2 { j: f64 },
    Heisenberg { n: i64 },
    Circle { charge: i64 },
    DirectSum { parts: Vec<RepSpec> },
    Custom { path: PathBuf },
}

/// Resolved representation source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepSource {
    Catalog(CatalogKind),
    Custom(PathBuf),
}

impl RepSpec {
    fn resolve(&self, field: &str) -> Result<RepSource, ConfigError> {
        Ok(match self {
            RepSpec::Custom { path } => RepSource::Custom(path.clone()),
            other => RepSource::Catalog(other.catalog_kind(field)?),
        })
    }

    fn catalog_kind(&self, field: &str) -> Result<CatalogKind, ConfigError> {
        match self {
            RepSpec::Su2 { j } => Ok(CatalogKind::spin(twice_spin(*j, &format!("{field}.j"))?)),
            RepSpec::Heisenberg { n } => {
                if *n < 4 {
                    return Err(invalid(
                        &format!("{field}.n"),
                        "truncation needs at least 4 modes",
                    ));
                }
                Ok(CatalogKind::HeisenbergTruncated { n: *n as usize })
            }
            RepSpec::Circle { charge } => Ok(CatalogKind::Circle { charge: *charge }),
            RepSpec::DirectSum { parts } => {
                if parts.is_empty() {
                    return Err(invalid(
                        &format!("{field}.parts"),
                        "direct sum needs at least one summand",
                    ));
                }
                parts
                    .iter()
                    .enumerate()
                    .map(|(i, p)| p.catalog_kind(&format!("{field}.parts[{i}]")))
                    .collect::<Result<_, _>>()
                    .map(CatalogKind::DirectSum)
            }
            RepSpec::Custom { .. } => {
                Err(invalid(field, "custom representations cannot be nested"))
            }
        }
    }
}

/// `2j` for a nonnegative half-integer `j`.
pub fn twice_spin(j: f64, field: &str) -> Result<u32, ConfigError> {
    let twice = 2.0 * j;
    if !((0.0..=200.0).contains(&twice) && twice.fract() == 0.0) {
        return Err(invalid(
            field,
            format!("spin must be a nonnegative half-integer up to 100, got {j}"),
        ));
    }
    Ok(twice as u32)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defect: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialPair {
    pub f: Vec<PolynomialTerm>,
    pub g: Vec<PolynomialTerm>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

/// The config document exactly as written.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    rep: RepSpec,
    experiment: ExperimentKind,
    samples: Option<i64>,
    words: Option<i64>,
    length: Option<i64>,
    scale: Option<f64>,
    trials: Option<i64>,
    seed: Option<u64>,
    #[serde(default)]
    tolerances: ToleranceOverrides,
    casimir: Option<String>,
    x0: Option<Vec<f64>>,
    polynomials: Option<PolynomialPair>,
    #[serde(default)]
    output: OutputSpec,
}

/// A validated experiment configuration with defaults applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub rep: RepSource,
    pub experiment: ExperimentKind,
    pub samples: usize,
    pub words: usize,
    pub length: usize,
    pub scale: f64,
    pub trials: usize,
    pub seed: u64,
    pub tolerances: ToleranceOverrides,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub casimir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polynomials: Option<PolynomialPair>,
    #[serde(skip)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    /// Core tolerances with the rank and step overrides applied. The
    /// `defect` override sets only the experiment's pass threshold; the
    /// representation validity gate keeps its default.
    pub fn core_tolerances(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            defect: d.defect,
            rank: self.tolerances.rank.unwrap_or(d.rank),
            fd_step: self.tolerances.fd_step.unwrap_or(d.fd_step),
        }
    }

    /// SHA-256 of the canonical config echo, first 16 hex digits.
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))[..16].to_string()
    }

    fn is_truncated(&self) -> bool {
        fn truncated(k: &CatalogKind) -> bool {
            match k {
                CatalogKind::HeisenbergTruncated { .. } => true,
                CatalogKind::DirectSum(parts) => parts.iter().any(truncated),
                _ => false,
            }
        }
        matches!(&self.rep, RepSource::Catalog(k) if truncated(k))
    }
}

/// Parses a config with seed default 0.
pub fn parse_config(document: &str) -> Result<ExperimentConfig, ConfigError> {
    parse_config_with_seed_default(document, 0)
}

/// Parses a config; `default_seed` applies when the document has no `seed`.
pub fn parse_config_with_seed_default(
    document: &str,
    default_seed: u64,
) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(document).map_err(|e| match e.classify() {
        serde_json::error::Category::Syntax
        | serde_json::error::Category::Eof
        | serde_json::error::Category::Io => ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
        serde_json::error::Category::Data => {
            let msg = e.to_string();
            let field = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.starts_with("unknown field") || msg.starts_with("missing field"))
                .unwrap_or("<document>")
                .to_string();
            ConfigError::Validation {
                field,
                message: msg,
            }
        }
    })?;

    let count = |field: &str, v: Option<i64>, default: usize| -> Result<usize, ConfigError> {
        match v {
            None => Ok(default),
            Some(c) if c > 0 => Ok(c as usize),
            Some(c) => Err(invalid(field, format!("must be a positive count, got {c}"))),
        }
    };
    let rep = raw.rep.resolve("rep")?;
    let heisenberg = matches!(
        &rep,
        RepSource::Catalog(CatalogKind::HeisenbergTruncated { .. })
    );
    let default_samples = match raw.experiment {
        ExperimentKind::SphereSurvey => 1000,
        ExperimentKind::Rank => 100,
        ExperimentKind::Expectation => 20,
        _ => 50,
    };
    let default_words = match raw.experiment {
        ExperimentKind::OrbitSurvey => 200,
        _ => 50,
    };
    let default_scale = if heisenberg { 0.5 } else { 1.0 };
    let scale = raw.scale.unwrap_or(default_scale);
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(invalid("scale", format!("must be positive, got {scale}")));
    }
    for (name, v) in [
        ("tolerances.defect", raw.tolerances.defect),
        ("tolerances.rank", raw.tolerances.rank),
        ("tolerances.fd_step", raw.tolerances.fd_step),
    ] {
        if let Some(t) = v {
            if !(t > 0.0 && t.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {t}")));
            }
        }
    }
    if let Some(name) = &raw.casimir {
        if CasimirSpec::builtin(name).is_none() {
            return Err(invalid("casimir", format!("unknown Casimir `{name}`")));
        }
    }
    if let Some(x0) = &raw.x0 {
        if x0.is_empty() || x0.len() % 2 != 0 {
            return Err(invalid(
                "x0",
                "must be a nonempty interleaved [re, im, ...] list",
            ));
        }
    }
    if let Some(p) = &raw.polynomials {
        for (name, terms) in [("polynomials.f", &p.f), ("polynomials.g", &p.g)] {
            if let Some(t) = terms.iter().find(|t| t.vars.len() > 2) {
                return Err(invalid(name, format!("degree {} exceeds 2", t.vars.len())));
            }
        }
    }

    Ok(ExperimentConfig {
        rep,
        experiment: raw.experiment,
        samples: count("samples", raw.samples, default_samples)?,
        words: count("words", raw.words, default_words)?,
        length: count("length", raw.length, 3)?,
        scale,
        trials: count("trials", raw.trials, 200)?,
        seed: raw.seed.unwrap_or(default_seed),
        tolerances: raw.tolerances,
        casimir: raw.casimir,
        x0: raw.x0,
        polynomials: raw.polynomials,
        output: raw.output,
    })
}

/// Experiment-specific payload of a [`Report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Details {
    Validity(ValidityDefects),
    Equivariance(EquivarianceDefect),
    Rank(RankSummary),
    Survey(SurveyReport),
    Expectation(ExpectationTable),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankSummary {
    pub states: usize,
    pub inconsistent: usize,
    pub first_inconsistent: Option<usize>,
}

/// Outcome of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub operation: String,
    pub inputs_digest: String,
    pub defect: f64,
    /// `None` for pure surveys, which report distributions without a bound.
    pub tolerance: Option<f64>,
    pub pass: bool,
    pub algebra_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<Details>,
}

impl Report {
    fn bounded(
        cfg: &ExperimentConfig,
        algebra_dim: usize,
        defect: f64,
        tolerance: f64,
        details: Option<Details>,
    ) -> Self {
        Self {
            operation: cfg.experiment.to_string(),
            inputs_digest: cfg.digest(),
            defect,
            tolerance: Some(tolerance),
            pass: defect <= tolerance,
            algebra_dim,
            details,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

/// JSON document written by [`emit_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub report: Report,
}

fn load_rep(cfg: &ExperimentConfig) -> Result<Representation, HarnessError> {
    match &cfg.rep {
        RepSource::Catalog(kind) => Ok(Representation::catalog(kind)?),
        RepSource::Custom(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
                path: path.clone(),
                source,
            })?;
            Ok(Representation::from_json(&text)?)
        }
    }
}

fn casimir_for(cfg: &ExperimentConfig, rep: &Representation) -> Result<CasimirSpec, HarnessError> {
    let spec = match &cfg.casimir {
        Some(name) => CasimirSpec::builtin(name),
        None => rep.kind().and_then(CasimirSpec::default_for),
    }
    .ok_or_else(|| {
        invalid(
            "casimir",
            "no default Casimir for this representation; name one",
        )
    })?;
    if spec.dim() != rep.algebra().dim() {
        return Err(invalid(
            "casimir",
            format!("`{}` does not match the algebra dimension", spec.name()),
        )
        .into());
    }
    Ok(spec)
}

fn random_states(rep: &Representation, seed: u64, domain: u32, count: usize) -> Vec<StateVector> {
    (0..count)
        .map(|i| rep.random_unit_state(&mut rng::domain_stream(seed, domain, i as u32)))
        .collect()
}

/// Runs the configured experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let rep = load_rep(cfg)?;
    let n = rep.algebra().dim();

    if cfg.experiment == ExperimentKind::Validity {
        let d = rep.validity_defects();
        let tol = cfg.tolerances.defect.unwrap_or(VALIDITY_TOL);
        return Ok(Report::bounded(
            cfg,
            n,
            d.skewness.max(d.bracket),
            tol,
            Some(Details::Validity(d)),
        ));
    }

    let ctx = MomentContext::new(rep, cfg.core_tolerances())?;
    let rep = ctx.rep();
    let seed = cfg.seed;

    let report = match cfg.experiment {
        ExperimentKind::Validity => unreachable!("handled above"),
        ExperimentKind::Equivariance => {
            let default_tol = if cfg.is_truncated() {
                EQUIVARIANCE_TOL_TRUNCATED
            } else {
                EQUIVARIANCE_TOL
            };
            let samples = random_states(rep, seed, 1, cfg.samples);
            let mut worst = EquivarianceDefect {
                mu_defect: 0.0,
                sigma_defect: 0.0,
            };
            for w in 0..cfg.words {
                let g = orbit::word_from_rng(
                    &mut rng::domain_stream(seed, 0, w as u32),
                    n,
                    cfg.length,
                    cfg.scale,
                );
                let d = ctx.equivariance_defect(&g, &samples)?;
                worst.mu_defect = worst.mu_defect.max(d.mu_defect);
                worst.sigma_defect = worst.sigma_defect.max(d.sigma_defect);
            }
            let tol = cfg.tolerances.defect.unwrap_or(default_tol);
            Report::bounded(cfg, n, worst.max(), tol, Some(Details::Equivariance(worst)))
        }
        ExperimentKind::Rank => {
            let samples = random_states(rep, seed, 1, cfg.samples);
            let mut inconsistent = 0;
            let mut first = None;
            for (i, x) in samples.iter().enumerate() {
                if !ctx.rank_analysis(x)?.consistent {
                    inconsistent += 1;
                    first.get_or_insert(i);
                }
            }
            let summary = RankSummary {
                states: samples.len(),
                inconsistent,
                first_inconsistent: first,
            };
            Report::bounded(
                cfg,
                n,
                inconsistent as f64,
                0.0,
                Some(Details::Rank(summary)),
            )
        }
        ExperimentKind::Cocycle => {
            let d = ctx.cocycle_defect(cfg.trials, seed)?;
            Report::bounded(
                cfg,
                n,
                d,
                cfg.tolerances.defect.unwrap_or(COCYCLE_TOL),
                None,
            )
        }
        ExperimentKind::Pullback => {
            let samples = random_states(rep, seed, 1, cfg.samples);
            let pairs = match &cfg.polynomials {
                Some(p) => vec![(
                    DualPolynomial::from_terms(n, &p.f)?,
                    DualPolynomial::from_terms(n, &p.g)?,
                )],
                None => default_polynomial_pairs(n, seed),
            };
            let mut worst: f64 = 0.0;
            for (f, g) in &pairs {
                worst = worst.max(ctx.pullback_poisson_check(f, g, &samples)?);
            }
            Report::bounded(
                cfg,
                n,
                worst,
                cfg.tolerances.defect.unwrap_or(PULLBACK_TOL),
                None,
            )
        }
        ExperimentKind::SphereSurvey => {
            let spec = casimir_for(cfg, rep)?;
            let survey = orbit::sphere_survey(&ctx, &spec, cfg.samples, seed)?;
            Report {
                operation: cfg.experiment.to_string(),
                inputs_digest: cfg.digest(),
                defect: survey.casimir_spread(),
                tolerance: None,
                pass: true,
                algebra_dim: n,
                details: Some(Details::Survey(survey)),
            }
        }
        ExperimentKind::OrbitSurvey => {
            let spec = casimir_for(cfg, rep)?;
            let x0 = match &cfg.x0 {
                Some(v) => StateVector::from_interleaved(v)?,
                None => StateVector::basis(rep.dim(), rep.validity_modes()[0]),
            };
            let params = OrbitParams {
                words: cfg.words,
                length: cfg.length,
                scale: cfg.scale,
                seed,
            };
            let survey = orbit::orbit_survey(&ctx, &spec, &x0, params)?;
            let tol = cfg.tolerances.defect.unwrap_or(orbit::ORBIT_SPREAD_TOL);
            Report::bounded(
                cfg,
                n,
                survey.casimir_spread(),
                tol,
                Some(Details::Survey(survey)),
            )
        }
        ExperimentKind::Expectation => {
            let states = expectation_states(&ctx, cfg.samples, seed)?;
            let table = orbit::expectation_table(&ctx, &states)?;
            let tol = cfg.tolerances.defect.unwrap_or(orbit::EXPECTATION_TOL);
            Report::bounded(
                cfg,
                n,
                table.max_deviation,
                tol,
                Some(Details::Expectation(table)),
            )
        }
    };
    Ok(report)
}

/// Linear pairs on all basis couples, the quadratic Casimir-like form
/// against a linear function, and one seeded random degree-2 pair.
fn default_polynomial_pairs(n: usize, seed: u64) -> Vec<(DualPolynomial, DualPolynomial)> {
    use rand::Rng;
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((
                DualPolynomial::linear(&AlgebraVector::basis(n, i)),
                DualPolynomial::linear(&AlgebraVector::basis(n, j)),
            ));
        }
    }
    pairs.push((
        DualPolynomial::quadratic_form(crate::RMatrix::identity(n, n)),
        DualPolynomial::linear(&AlgebraVector::basis(n, 0)),
    ));
    let mut rng = rng::domain_stream(seed, 2, 0);
    let mut random_poly = || {
        let q = crate::RMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..=1.0));
        let mut terms = vec![PolynomialTerm {
            vars: vec![],
            coef: rng.random_range(-1.0..=1.0),
        }];
        for i in 0..n {
            terms.push(PolynomialTerm {
                vars: vec![i],
                coef: rng.random_range(-1.0..=1.0),
            });
            for j in 0..n {
                terms.push(PolynomialTerm {
                    vars: vec![i, j],
                    coef: q[(i, j)],
                });
            }
        }
        DualPolynomial::from_terms(n, &terms).expect("indices in range, degree at most 2")
    };
    let f = random_poly();
    let g = random_poly();
    pairs.push((f, g));
    pairs
}

/// Ground, first excited, and displaced ground state, then random unit
/// states of the validity subspace up to `count`.
fn expectation_states(
    ctx: &MomentContext,
    count: usize,
    seed: u64,
) -> crate::Result<Vec<StateVector>> {
    let rep = ctx.rep();
    let d = rep.dim();
    let n = rep.algebra().dim();
    let displaced = StateVector::basis(d, 0).apply(&rep.rho(&GroupWord::exp(
        AlgebraVector::basis(n, 1).scaled(DISPLACEMENT),
    ))?);
    let mut states = vec![
        StateVector::basis(d, 0),
        StateVector::basis(d, 1),
        displaced,
    ];
    states.truncate(count);
    let extra = count.saturating_sub(states.len());
    states.extend(random_states(rep, seed, 3, extra));
    Ok(states)
}

/// Serializes a report. JSON carries the config echo and tool version.
pub fn render_report(report: &Report, cfg: &ExperimentConfig, format: Format) -> String {
    match format {
        Format::Json => {
            let envelope = ReportEnvelope {
                tool_version: TOOL_VERSION.to_string(),
                config: cfg.clone(),
                report: report.clone(),
            };
            let mut text = serde_json::to_string_pretty(&envelope).expect("reports serialize");
            text.push('\n');
            text
        }
        Format::Csv => match &report.details {
            Some(Details::Survey(s)) => s.to_csv(report.algebra_dim),
            Some(Details::Expectation(t)) => t.to_csv(),
            _ => {
                let tol = report
                    .tolerance
                    .map(|t| format!("{t:?}"))
                    .unwrap_or_default();
                format!(
                    "operation,inputs_digest,defect,tolerance,pass\n{},{},{:?},{},{}\n",
                    report.operation, report.inputs_digest, report.defect, tol, report.pass
                )
            }
        },
    }
}

/// Writes a report to `path`.
pub fn emit_report(
    report: &Report,
    cfg: &ExperimentConfig,
    path: &Path,
    format: Format,
) -> Result<(), HarnessError> {
    std::fs::write(path, render_report(report, cfg, format)).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Picks a format from an explicit choice, then the file extension, then JSON.
pub fn infer_format(explicit: Option<Format>, path: Option<&Path>) -> Format {
    explicit
        .or_else(|| {
            path.and_then(|p| p.extension())
                .and_then(|e| e.to_str())
                .and_then(|e| match e.to_ascii_lowercase().as_str() {
                    "csv" => Some(Format::Csv),
                    "json" => Some(Format::Json),
                    _ => None,
                })
        })
        .unwrap_or(Format::Json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg = parse_config(r#"{"rep": {"kind": "su2", "j": 0.5}, "experiment": "sphere-survey", "samples": 1000, "seed": 7}"#)
            .unwrap();
        assert_eq!(cfg.rep, RepSource::Catalog(CatalogKind::spin(1)));
        assert_eq!(cfg.experiment, ExperimentKind::SphereSurvey);
        assert_eq!((cfg.samples, cfg.seed), (1000, 7));
        assert_eq!(cfg.core_tolerances(), Tolerances::default());
    }

    #[test]
    fn seed_defaults() {
        let doc = r#"{"rep": {"kind": "circle", "charge": 1}, "experiment": "cocycle"}"#;
        assert_eq!(parse_config(doc).unwrap().seed, 0);
        assert_eq!(parse_config_with_seed_default(doc, 99).unwrap().seed, 99);
        let with_seed =
            r#"{"rep": {"kind": "circle", "charge": 1}, "experiment": "cocycle", "seed": 3}"#;
        assert_eq!(
            parse_config_with_seed_default(with_seed, 99).unwrap().seed,
            3
        );
    }

    #[test]
    fn rejects_negative_samples() {
        let err = parse_config(
            r#"{"rep": {"kind": "su2", "j": 1}, "experiment": "rank", "samples": -3}"#,
        )
        .unwrap_err();
        assert!(
            matches!(&err, ConfigError::Validation { field, .. } if field == "samples"),
            "{err}"
        );
        let err =
            parse_config(r#"{"rep": {"kind": "su2", "j": 1}, "experiment": "rank", "samples": 0}"#)
                .unwrap_err();
        assert!(matches!(&err, ConfigError::Validation { field, .. } if field == "samples"));
    }

    #[test]
    fn rejects_unknown_keys() {
        let err = parse_config(
            r#"{"rep": {"kind": "su2", "j": 0.5}, "experiment": "sphere-survey", "samples": 10, "typo_field": 1}"#,
        )
        .unwrap_err();
        assert!(
            matches!(&err, ConfigError::Validation { field, .. } if field == "typo_field"),
            "{err}"
        );
        assert!(err.to_string().contains("typo_field"));

        let err = parse_config(r#"{"rep": {"kind": "su2", "j": 0.5}, "experiment": "cocycle", "tolerances": {"defekt": 1}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("defekt"), "{err}");

        let err =
            parse_config(r#"{"rep": {"kind": "su2", "j": 0.5, "n": 3}, "experiment": "cocycle"}"#)
                .unwrap_err();
        assert!(err.to_string().contains('n'), "{err}");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_config("{\n  \"rep\": ,\n}").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn rejects_bad_parameters() {
        for (doc, field) in [
            (
                r#"{"rep": {"kind": "su2", "j": 0.3}, "experiment": "rank"}"#,
                "rep.j",
            ),
            (
                r#"{"rep": {"kind": "heisenberg", "n": 3}, "experiment": "rank"}"#,
                "rep.n",
            ),
            (
                r#"{"rep": {"kind": "su2", "j": 1}, "experiment": "rank", "scale": -1}"#,
                "scale",
            ),
            (
                r#"{"rep": {"kind": "su2", "j": 1}, "experiment": "rank", "casimir": "nope"}"#,
                "casimir",
            ),
            (
                r#"{"rep": {"kind": "su2", "j": 1}, "experiment": "orbit-survey", "x0": [1.0]}"#,
                "x0",
            ),
            (
                r#"{"rep": {"kind": "su2", "j": 1}, "experiment": "pullback",
                    "polynomials": {"f": [{"vars": [0, 1, 2], "coef": 1.0}], "g": []}}"#,
                "polynomials.f",
            ),
        ] {
            let err = parse_config(doc).unwrap_err();
            assert!(
                matches!(&err, ConfigError::Validation { field: f, .. } if f == field),
                "{doc}: {err}"
            );
        }
    }

    #[test]
    fn validity_on_spin_one() {
        let cfg =
            parse_config(r#"{"rep": {"kind": "su2", "j": 1}, "experiment": "validity"}"#).unwrap();
        let r = run_experiment(&cfg).unwrap();
        assert!(r.pass && r.defect <= 1e-12);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn cocycle_on_spin_three_halves() {
        let cfg =
            parse_config(r#"{"rep": {"kind": "su2", "j": 1.5}, "experiment": "cocycle", "trials": 200, "seed": 1}"#).unwrap();
        let r = run_experiment(&cfg).unwrap();
        assert!(r.pass && r.defect <= 1e-10, "{r:?}");
    }

    #[test]
    fn sphere_survey_on_spin_one() {
        let cfg = parse_config(
            r#"{"rep": {"kind": "su2", "j": 1}, "experiment": "sphere-survey", "samples": 1000}"#,
        )
        .unwrap();
        let r = run_experiment(&cfg).unwrap();
        let Some(Details::Survey(s)) = &r.details else {
            panic!("survey details")
        };
        let agg = s.aggregates.as_ref().unwrap();
        assert!(agg.min < 0.01 && agg.max > 0.24, "{agg:?}");
        assert!(r.pass && r.tolerance.is_none());
    }

    #[test]
    fn tolerance_failure_is_reported() {
        let cfg = parse_config(
            r#"{"rep": {"kind": "su2", "j": 1}, "experiment": "pullback", "samples": 5, "tolerances": {"defect": 1e-30}}"#,
        )
        .unwrap();
        let r = run_experiment(&cfg).unwrap();
        assert!(!r.pass);
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn runtime_errors_map_to_exit_three() {
        let cfg = parse_config(r#"{"rep": {"kind": "custom", "path": "/nonexistent/rep.json"}, "experiment": "validity"}"#)
            .unwrap();
        let err = run_experiment(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        let cfg = parse_config(r#"{"rep": {"kind": "su2", "j": 1}, "experiment": "expectation"}"#)
            .unwrap();
        assert_eq!(run_experiment(&cfg).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn empty_survey_csv_is_header_only() {
        let cfg =
            parse_config(r#"{"rep": {"kind": "su2", "j": 0.5}, "experiment": "sphere-survey"}"#)
                .unwrap();
        let survey = SurveyReport {
            kind: orbit::SurveyKind::Sphere,
            representation: "su2(j=1/2)".into(),
            casimir_name: "su2_quadratic".into(),
            seed: 0,
            sample_count: 0,
            records: vec![],
            aggregates: None,
        };
        let report = Report {
            operation: "sphere-survey".into(),
            inputs_digest: cfg.digest(),
            defect: 0.0,
            tolerance: None,
            pass: true,
            algebra_dim: 3,
            details: Some(Details::Survey(survey)),
        };
        assert_eq!(
            render_report(&report, &cfg, Format::Csv),
            "sample_index,casimir,mu_1,mu_2,mu_3,norm\n"
        );
    }

    #[test]
    fn spin_half_survey_csv() {
        let cfg = parse_config(
            r#"{"rep": {"kind": "su2", "j": 0.5}, "experiment": "sphere-survey", "samples": 3}"#,
        )
        .unwrap();
        let csv = render_report(&run_experiment(&cfg).unwrap(), &cfg, Format::Csv);
        let rows: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(rows.len(), 3);
        for row in rows {
            let casimir: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
            assert!((casimir - 0.0625).abs() <= 1e-12);
        }
    }

    #[test]
    fn io_errors_name_the_path() {
        let cfg = parse_config(r#"{"rep": {"kind": "su2", "j": 0.5}, "experiment": "validity"}"#)
            .unwrap();
        let r = run_experiment(&cfg).unwrap();
        let err = emit_report(
            &r,
            &cfg,
            Path::new("/nonexistent/dir/out.json"),
            Format::Json,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("/nonexistent/dir/out.json"));
    }

    #[test]
    fn json_round_trip() {
        let cfg = parse_config(
            r#"{"rep": {"kind": "su2", "j": 0.5}, "experiment": "sphere-survey", "samples": 4}"#,
        )
        .unwrap();
        let r = run_experiment(&cfg).unwrap();
        let text = render_report(&r, &cfg, Format::Json);
        let back: ReportEnvelope = serde_json::from_str(&text).unwrap();
        assert_eq!(back.report, r);
        assert_eq!(back.config, cfg);
        assert_eq!(back.tool_version, TOOL_VERSION);
    }

    #[test]
    fn format_inference() {
        assert_eq!(infer_format(None, Some(Path::new("a.csv"))), Format::Csv);
        assert_eq!(
            infer_format(Some(Format::Json), Some(Path::new("a.csv"))),
            Format::Json
        );
        assert_eq!(infer_format(None, None), Format::Json);
    }
}
