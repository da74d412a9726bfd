//! Model catalog, suite dispatch, and the report-matrix driver behind the
//! command-line interface.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::contact::ContactStructure;
use crate::error::{Error, Result};
use crate::field::TensorField;
use crate::models::{
    self, build_heisenberg, pde_check, pde_mutations, random_metric, random_vector_field,
    RandomMetricSpec,
};
use crate::report::{CheckRecord, CheckStatus, FittedConstant, SuiteReport, Tolerances};
use crate::sample::sample_points;
use crate::soliton::{integrability_check, lemma1_suite, theorem1_suite, theorem2_suite, Lambda};

pub const SCHEMA_VERSION: u32 = 1;

/// The verification suites exposed by the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteKind {
    Axioms,
    Identities,
    Classify,
    Theorem1,
    Lemma1,
    Theorem2,
    Pde,
    Integrability,
    Universal,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 9] = [
        SuiteKind::Axioms,
        SuiteKind::Identities,
        SuiteKind::Classify,
        SuiteKind::Theorem1,
        SuiteKind::Lemma1,
        SuiteKind::Theorem2,
        SuiteKind::Pde,
        SuiteKind::Integrability,
        SuiteKind::Universal,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SuiteKind::Axioms => "axioms",
            SuiteKind::Identities => "identities",
            SuiteKind::Classify => "classify",
            SuiteKind::Theorem1 => "theorem1",
            SuiteKind::Lemma1 => "lemma1",
            SuiteKind::Theorem2 => "theorem2",
            SuiteKind::Pde => "pde",
            SuiteKind::Integrability => "integrability",
            SuiteKind::Universal => "universal",
        }
    }

    /// Minimum jet order the suite's derivative stack requires.
    pub fn min_jet_order(&self) -> usize {
        match self {
            SuiteKind::Axioms | SuiteKind::Pde | SuiteKind::Lemma1 => 1,
            SuiteKind::Classify => 2,
            SuiteKind::Identities => 3,
            SuiteKind::Theorem1
            | SuiteKind::Theorem2
            | SuiteKind::Integrability
            | SuiteKind::Universal => 3,
        }
    }
}

impl FromStr for SuiteKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<SuiteKind> {
        SuiteKind::ALL
            .iter()
            .find(|k| k.name() == s)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite: {s:?}")))
    }
}

/// Catalog selector, e.g. `heisenberg:n=2`, `heisenberg-deformed:n=1,a=2`,
/// `random:dim=3,seed=7`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelSelector {
    Heisenberg { n: usize },
    HeisenbergDeformed { n: usize, a: f64 },
    Random { dim: usize, seed: u64 },
}

impl fmt::Display for ModelSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSelector::Heisenberg { n } => write!(f, "heisenberg:n={n}"),
            ModelSelector::HeisenbergDeformed { n, a } => {
                write!(f, "heisenberg-deformed:n={n},a={a}")
            }
            ModelSelector::Random { dim, seed } => write!(f, "random:dim={dim},seed={seed}"),
        }
    }
}

fn parse_params(s: &str) -> Result<Vec<(String, String)>> {
    s.split(',')
        .filter(|part| !part.is_empty())
        .map(|part| {
            let (k, v) = part.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("model parameter {part:?} is not key=value"))
            })?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn get_param<T: FromStr>(params: &[(String, String)], key: &str) -> Result<Option<T>> {
    match params.iter().find(|(k, _)| k == key) {
        None => Ok(None),
        Some((_, v)) => v.parse::<T>().map(Some).map_err(|_| {
            Error::InvalidArgument(format!("cannot parse model parameter {key}={v}"))
        }),
    }
}

impl FromStr for ModelSelector {
    type Err = Error;
    fn from_str(s: &str) -> Result<ModelSelector> {
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n, r),
            None => (s, ""),
        };
        let params = parse_params(rest)?;
        match name {
            "heisenberg" => Ok(ModelSelector::Heisenberg {
                n: get_param(&params, "n")?.unwrap_or(1),
            }),
            "heisenberg-deformed" => Ok(ModelSelector::HeisenbergDeformed {
                n: get_param(&params, "n")?.unwrap_or(1),
                a: get_param(&params, "a")?.unwrap_or(2.0),
            }),
            "random" => Ok(ModelSelector::Random {
                dim: get_param(&params, "dim")?.unwrap_or(3),
                seed: get_param(&params, "seed")?.unwrap_or(0),
            }),
            other => Err(Error::InvalidArgument(format!("unknown model: {other:?}"))),
        }
    }
}

/// One verification run: a suite on a model with numeric configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub suite: SuiteKind,
    pub model: ModelSelector,
    pub tolerance: f64,
    pub jet_order: usize,
    pub samples: usize,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(suite: SuiteKind, model: ModelSelector) -> RunConfig {
        RunConfig {
            suite,
            model,
            tolerance: 1e-7,
            jet_order: 3,
            samples: 64,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        if self.samples == 0 {
            return Err(Error::InvalidArgument("sample count must be >= 1".into()));
        }
        if !(1..=3).contains(&self.jet_order) {
            return Err(Error::InvalidArgument(format!(
                "jet order must be in 1..=3, got {}",
                self.jet_order
            )));
        }
        if let ModelSelector::Heisenberg { n } | ModelSelector::HeisenbergDeformed { n, .. } =
            self.model
        {
            if n == 0 {
                return Err(Error::InvalidArgument("n must be >= 1".into()));
            }
        }
        Ok(())
    }
}

/// Configuration echo embedded in every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub tolerance: f64,
    pub jet_order: usize,
    pub samples: usize,
    pub seed: u64,
}

/// Machine-readable result of one run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: String,
    pub model: String,
    pub config: ConfigEcho,
    pub checks: Vec<CheckRecord>,
    pub constants: Vec<FittedConstant>,
    pub overall_pass: bool,
}

impl VerificationReport {
    fn from_suite(cfg: &RunConfig, suite: SuiteReport) -> VerificationReport {
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            suite: suite.suite,
            model: cfg.model.to_string(),
            config: ConfigEcho {
                tolerance: cfg.tolerance,
                jet_order: cfg.jet_order,
                samples: cfg.samples,
                seed: cfg.seed,
            },
            checks: suite.checks,
            constants: suite.constants,
            overall_pass: suite.overall_pass,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("suite: {}    model: {}\n", self.suite, self.model));
        out.push_str(&format!(
            "tolerance: {:.1e}   jet order: {}   samples: {}   seed: {}\n",
            self.config.tolerance, self.config.jet_order, self.config.samples, self.config.seed
        ));
        for c in &self.checks {
            out.push_str(&render_check(c));
        }
        for k in &self.constants {
            out.push_str(&format!(
                "  const {:<24} = {:+.12e}  (spread {:.2e})\n",
                k.name, k.value, k.spread
            ));
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.overall_pass { "PASS" } else { "FAIL" }
        ));
        out
    }
}

fn render_check(c: &CheckRecord) -> String {
    let status = match c.status {
        CheckStatus::Pass => "PASS",
        CheckStatus::Fail => "FAIL",
        CheckStatus::NotApplicable => "n/a ",
    };
    let residual = match c.max_residual {
        Some(r) => format!("max {r:9.3e}"),
        None => "             ".into(),
    };
    let threshold = match c.threshold {
        Some(t) => format!("thr {t:8.1e}"),
        None => String::new(),
    };
    let eq = c.equation.as_deref().unwrap_or("");
    format!(
        "  [{status}] {:<28} {:<8} {residual}  {threshold}\n",
        c.name, eq
    )
}

#[allow(clippy::large_enum_variant)]
enum BuiltModel {
    Contact {
        structure: ContactStructure,
        /// The distinguished field for soliton/automorphism suites.
        v: TensorField,
        lambda: Option<f64>,
        is_heisenberg: bool,
        n: usize,
    },
    Random {
        spec: RandomMetricSpec,
    },
}

fn build_model(selector: &ModelSelector) -> Result<BuiltModel> {
    match *selector {
        ModelSelector::Heisenberg { n } => {
            let m = build_heisenberg(n)?;
            Ok(BuiltModel::Contact {
                structure: m.structure,
                v: m.soliton_v,
                lambda: Some(m.lambda),
                is_heisenberg: true,
                n,
            })
        }
        ModelSelector::HeisenbergDeformed { n, a } => {
            let s = models::heisenberg_deformed(n, a)?;
            let v = s.xi().clone();
            Ok(BuiltModel::Contact {
                structure: s,
                v,
                lambda: None,
                is_heisenberg: false,
                n,
            })
        }
        ModelSelector::Random { dim, seed } => Ok(BuiltModel::Random {
            spec: RandomMetricSpec::new(dim, seed),
        }),
    }
}

/// Runs one suite on one model and assembles the report.
pub fn run_suite(cfg: &RunConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    if cfg.jet_order < cfg.suite.min_jet_order() {
        return Err(Error::Capability(format!(
            "suite {} needs jet order >= {}, configured {}",
            cfg.suite.name(),
            cfg.suite.min_jet_order(),
            cfg.jet_order
        )));
    }
    let tols = Tolerances::new(cfg.tolerance);
    let model = build_model(&cfg.model)?;
    let suite = match (&model, cfg.suite) {
        (BuiltModel::Contact { structure, .. }, SuiteKind::Axioms) => {
            let points = sample_points(structure.chart(), 1.0, cfg.samples, cfg.seed);
            structure.verify_axioms(&points, &tols)?
        }
        (BuiltModel::Contact { structure, .. }, SuiteKind::Identities) => {
            let points = sample_points(structure.chart(), 1.0, cfg.samples, cfg.seed);
            structure.identity_suite(&points, &tols)?
        }
        (BuiltModel::Contact { structure, .. }, SuiteKind::Classify) => {
            let points = sample_points(structure.chart(), 1.0, cfg.samples, cfg.seed);
            classification_report(structure, &points, &tols)?
        }
        (
            BuiltModel::Contact {
                structure,
                v,
                is_heisenberg: true,
                ..
            },
            SuiteKind::Theorem1,
        ) => {
            let points = sample_points(structure.chart(), 1.0, cfg.samples, cfg.seed);
            theorem1_suite(structure, v, &points, &tols)?
        }
        (BuiltModel::Contact { structure, v, .. }, SuiteKind::Lemma1) => {
            let points = sample_points(structure.chart(), 1.0, cfg.samples, cfg.seed);
            lemma1_suite(structure, v, &points, &tols)?.to_suite_report(&tols)
        }
        (BuiltModel::Contact { structure, v, .. }, SuiteKind::Theorem2) => {
            let points = sample_points(structure.chart(), 1.0, cfg.samples, cfg.seed);
            theorem2_suite(structure, v, &points, &tols)?.report
        }
        (
            BuiltModel::Contact {
                structure,
                v,
                lambda: Some(lambda),
                is_heisenberg: true,
                n,
            },
            SuiteKind::Pde,
        ) => {
            let points = sample_points(structure.chart(), 1.0, cfg.samples, cfg.seed);
            let m = models::HeisenbergModel {
                n: *n,
                structure: structure.clone(),
                soliton_v: v.clone(),
                lambda: *lambda,
            };
            let mut rep = pde_check(&m, v, &points, &tols)?;
            // mutation battery: each must break its targeted equation
            for mutation in pde_mutations(&m) {
                let mrep = pde_check(&m, &mutation.candidate, &points, &tols)?;
                let target = mrep.check(mutation.targeted_check).expect("known check");
                let observed = target.max_residual.unwrap_or(0.0);
                let detected = target.status == CheckStatus::Fail && observed > 1e-2;
                rep.push(CheckRecord {
                    name: format!("mutation_{}_detected", mutation.name),
                    equation: Some("pdemut".into()),
                    max_residual: Some(observed),
                    mean_residual: None,
                    threshold: Some(1e-2),
                    points: points.len(),
                    status: if detected {
                        CheckStatus::Pass
                    } else {
                        CheckStatus::Fail
                    },
                    note: Some(format!(
                        "targeted equation: {}; passes when that equation fails hard",
                        mutation.targeted_check
                    )),
                });
            }
            rep
        }
        (
            BuiltModel::Contact {
                structure,
                v,
                lambda: Some(lambda),
                is_heisenberg: true,
                ..
            },
            SuiteKind::Integrability,
        ) => {
            let points = sample_points(structure.chart(), 1.0, cfg.samples, cfg.seed);
            integrability_check(structure, v, Lambda::Fixed(*lambda), &points, &tols)?
        }
        (BuiltModel::Random { spec }, SuiteKind::Universal) => {
            universal_suite(spec, cfg.samples, cfg.seed, &tols)?
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "suite {} is not applicable to model {}",
                cfg.suite.name(),
                cfg.model
            )))
        }
    };
    Ok(VerificationReport::from_suite(cfg, suite))
}

/// Classification rendered as a report: flags are outcomes (with their
/// residuals), not pass/fail requirements.
fn classification_report(
    structure: &ContactStructure,
    points: &[crate::chart::Point],
    tols: &Tolerances,
) -> Result<SuiteReport> {
    let class = structure.classify(points, tols)?;
    let mut rep = SuiteReport::new("classify");
    let flags = [
        ("k_contact", class.k_contact),
        ("sasakian", class.sasakian),
        ("eta_einstein", class.eta_einstein),
        ("einstein", class.einstein),
        ("d_homothetically_fixed", class.d_homothetically_fixed),
        ("null_eta_einstein", class.null_eta_einstein),
    ];
    for (name, flag) in flags {
        rep.push(CheckRecord {
            name: name.into(),
            equation: None,
            max_residual: Some(flag.residual),
            mean_residual: None,
            threshold: Some(tols.at(1e-7)),
            points: points.len(),
            status: CheckStatus::Pass,
            note: Some(if flag.set { "set".into() } else { "unset".into() }),
        });
    }
    rep.push_constant(class.alpha);
    rep.push_constant(class.beta);
    Ok(rep)
}

/// The universal-identity suite on a random polynomial metric and vector
/// field: commutation identities, metric compatibility, both Bianchi
/// identities, and d^2 = 0 on a random polynomial function.
fn universal_suite(
    spec: &RandomMetricSpec,
    samples: usize,
    seed: u64,
    tols: &Tolerances,
) -> Result<SuiteReport> {
    let geom = random_metric(spec)?;
    let v = random_vector_field(spec)?;
    let points = sample_points(geom.chart(), 1.0, samples, seed);
    let mut rep = SuiteReport::new("universal");

    let comm = geom.commutation_check_10(&v, &points, false)?;
    rep.push(CheckRecord::from_stats(
        "commutation_metric",
        Some("eq10"),
        comm.raw,
        tols.at(1e-7),
    ));
    let c13 = geom.commutation_check_13(&v, &points)?;
    rep.push(CheckRecord::from_stats(
        "commutation_curvature",
        Some("eq13"),
        c13,
        tols.at(1e-6),
    ));
    let compat = geom.metric_compatibility(&points)?;
    rep.push(CheckRecord::from_stats(
        "metric_compatibility",
        Some("nablag"),
        compat,
        tols.at(1e-10),
    ));
    let bianchi = geom.bianchi_checks(&points)?;
    rep.push(CheckRecord::from_stats(
        "first_bianchi",
        Some("bianchi1"),
        bianchi.first,
        tols.at(1e-9),
    ));
    rep.push(CheckRecord::from_stats(
        "contracted_second_bianchi",
        Some("bianchi2"),
        bianchi.contracted_second,
        tols.at(1e-8),
    ));
    let f = models::random_scalar_field(spec)?;
    let ddf = f.differential().exterior_derivative()?;
    let mut vals = Vec::new();
    for p in &points {
        vals.push(ddf.values(p)?.max_abs());
    }
    rep.push(CheckRecord::from_stats(
        "d_squared_zero",
        Some("d2"),
        crate::report::ResidualStats::from_values(&vals),
        tols.at(1e-10),
    ));
    Ok(rep)
}

/// Configuration for the whole-catalog matrix.
#[derive(Clone, Debug)]
pub struct MatrixConfig {
    pub tolerance: f64,
    pub jet_order: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for MatrixConfig {
    fn default() -> Self {
        MatrixConfig {
            tolerance: 1e-7,
            jet_order: 3,
            samples: 16,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CellOutcome {
    Report(VerificationReport),
    NotApplicable { reason: String },
    Error { message: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixCell {
    pub model: String,
    pub suite: String,
    pub outcome: CellOutcome,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverageCell {
    pub model: String,
    pub max_residual: Option<f64>,
    pub status: CheckStatus,
}

/// One equation tag with its worst residual per model.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverageRow {
    pub equation: String,
    pub cells: Vec<CoverageCell>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixReport {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub cells: Vec<MatrixCell>,
    pub coverage: Vec<CoverageRow>,
    pub overall_pass: bool,
}

/// The catalog the matrix iterates, in deterministic order.
pub fn matrix_catalog() -> Vec<ModelSelector> {
    vec![
        ModelSelector::Heisenberg { n: 1 },
        ModelSelector::Heisenberg { n: 2 },
        ModelSelector::Heisenberg { n: 3 },
        ModelSelector::HeisenbergDeformed { n: 1, a: 2.0 },
        ModelSelector::Random { dim: 3, seed: 7 },
        ModelSelector::Random { dim: 5, seed: 3 },
    ]
}

fn applicable(model: &ModelSelector, suite: SuiteKind) -> bool {
    match model {
        ModelSelector::Heisenberg { .. } => suite != SuiteKind::Universal,
        ModelSelector::HeisenbergDeformed { .. } => matches!(
            suite,
            SuiteKind::Axioms
                | SuiteKind::Identities
                | SuiteKind::Classify
                | SuiteKind::Lemma1
                | SuiteKind::Theorem2
        ),
        ModelSelector::Random { .. } => suite == SuiteKind::Universal,
    }
}

/// Runs every applicable suite on every catalog model and aggregates the
/// equation-coverage table. Cell errors are recorded, never propagated.
pub fn report_matrix(cfg: &MatrixConfig) -> Result<MatrixReport> {
    if !cfg.tolerance.is_finite() || cfg.tolerance <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if !(1..=3).contains(&cfg.jet_order) {
        return Err(Error::InvalidArgument("jet order must be in 1..=3".into()));
    }
    let mut cells = Vec::new();
    let mut overall = true;
    for model in matrix_catalog() {
        for suite in SuiteKind::ALL {
            let outcome = if !applicable(&model, suite) {
                CellOutcome::NotApplicable {
                    reason: "suite preconditions do not apply to this model".into(),
                }
            } else {
                let run = RunConfig {
                    suite,
                    model,
                    tolerance: cfg.tolerance,
                    jet_order: cfg.jet_order,
                    samples: cfg.samples,
                    seed: cfg.seed,
                };
                match run_suite(&run) {
                    Ok(rep) => {
                        overall &= rep.overall_pass;
                        CellOutcome::Report(rep)
                    }
                    Err(e) => {
                        overall = false;
                        CellOutcome::Error {
                            message: e.to_string(),
                        }
                    }
                }
            };
            cells.push(MatrixCell {
                model: model.to_string(),
                suite: suite.name().into(),
                outcome,
            });
        }
    }

    // coverage: per equation tag, worst residual per model
    let mut tags: Vec<String> = Vec::new();
    for cell in &cells {
        if let CellOutcome::Report(rep) = &cell.outcome {
            for c in &rep.checks {
                if let Some(eq) = &c.equation {
                    if !tags.contains(eq) {
                        tags.push(eq.clone());
                    }
                }
            }
        }
    }
    tags.sort();
    let model_names: Vec<String> = matrix_catalog().iter().map(|m| m.to_string()).collect();
    let coverage = tags
        .iter()
        .map(|tag| {
            let cells_for_tag = model_names
                .iter()
                .map(|model| {
                    let mut worst: Option<f64> = None;
                    let mut status = CheckStatus::NotApplicable;
                    for cell in cells.iter().filter(|c| &c.model == model) {
                        if let CellOutcome::Report(rep) = &cell.outcome {
                            for c in rep.checks.iter().filter(|c| {
                                c.equation.as_deref() == Some(tag.as_str())
                            }) {
                                if let Some(r) = c.max_residual {
                                    worst = Some(worst.map_or(r, |w: f64| w.max(r)));
                                }
                                status = match (status, c.status) {
                                    (_, CheckStatus::Fail) | (CheckStatus::Fail, _) => {
                                        CheckStatus::Fail
                                    }
                                    (_, CheckStatus::Pass) | (CheckStatus::Pass, _) => {
                                        CheckStatus::Pass
                                    }
                                    _ => CheckStatus::NotApplicable,
                                };
                            }
                        }
                    }
                    CoverageCell {
                        model: model.clone(),
                        max_residual: worst,
                        status,
                    }
                })
                .collect();
            CoverageRow {
                equation: tag.clone(),
                cells: cells_for_tag,
            }
        })
        .collect();

    Ok(MatrixReport {
        schema_version: SCHEMA_VERSION,
        config: ConfigEcho {
            tolerance: cfg.tolerance,
            jet_order: cfg.jet_order,
            samples: cfg.samples,
            seed: cfg.seed,
        },
        cells,
        coverage,
        overall_pass: overall,
    })
}

impl MatrixReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix serialization")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str("equation coverage (worst residual per model):\n");
        let models: Vec<&str> = self
            .coverage
            .first()
            .map(|row| row.cells.iter().map(|c| c.model.as_str()).collect())
            .unwrap_or_default();
        out.push_str(&format!("  {:<10}", "equation"));
        for m in &models {
            out.push_str(&format!(" {m:>24}"));
        }
        out.push('\n');
        for row in &self.coverage {
            out.push_str(&format!("  {:<10}", row.equation));
            for cell in &row.cells {
                let txt = match (cell.status, cell.max_residual) {
                    (CheckStatus::NotApplicable, _) => "n/a".into(),
                    (_, Some(r)) => format!("{r:.2e}"),
                    (_, None) => "-".into(),
                };
                out.push_str(&format!(" {txt:>24}"));
            }
            out.push('\n');
        }
        out.push_str("\ncells:\n");
        for cell in &self.cells {
            let status = match &cell.outcome {
                CellOutcome::Report(r) => {
                    if r.overall_pass {
                        "PASS"
                    } else {
                        "FAIL"
                    }
                }
                CellOutcome::NotApplicable { .. } => "n/a",
                CellOutcome::Error { .. } => "ERROR",
            };
            out.push_str(&format!(
                "  [{status:<5}] {:<28} {}\n",
                cell.model, cell.suite
            ));
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.overall_pass { "PASS" } else { "FAIL" }
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selector_round_trip() {
        for s in [
            "heisenberg:n=2",
            "heisenberg-deformed:n=1,a=2",
            "random:dim=3,seed=7",
        ] {
            let sel: ModelSelector = s.parse().unwrap();
            assert_eq!(sel.to_string(), s);
        }
        assert!("mystery:n=1".parse::<ModelSelector>().is_err());
        assert!("heisenberg:n=abc".parse::<ModelSelector>().is_err());
        assert!("frobnicate".parse::<SuiteKind>().is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = RunConfig::new(SuiteKind::Axioms, ModelSelector::Heisenberg { n: 1 });
        assert!(cfg.validate().is_ok());
        cfg.tolerance = 0.0;
        assert!(cfg.validate().is_err());
        cfg.tolerance = 1e-7;
        cfg.jet_order = 4;
        assert!(cfg.validate().is_err());
        cfg.jet_order = 3;
        cfg.samples = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn capability_error_for_low_jet_order() {
        let cfg = RunConfig {
            jet_order: 2,
            samples: 4,
            ..RunConfig::new(SuiteKind::Theorem1, ModelSelector::Heisenberg { n: 1 })
        };
        assert!(matches!(run_suite(&cfg), Err(Error::Capability(_))));
    }

    #[test]
    fn inapplicable_pair_is_invalid_argument() {
        let cfg = RunConfig {
            samples: 4,
            ..RunConfig::new(
                SuiteKind::Theorem1,
                ModelSelector::Random { dim: 3, seed: 7 },
            )
        };
        assert!(matches!(run_suite(&cfg), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn verify_theorem1_heisenberg_smoke() {
        let cfg = RunConfig {
            samples: 6,
            ..RunConfig::new(SuiteKind::Theorem1, ModelSelector::Heisenberg { n: 1 })
        };
        let rep = run_suite(&cfg).unwrap();
        assert!(rep.overall_pass);
        let lam = rep.constants.iter().find(|c| c.name == "lambda").unwrap();
        assert!((lam.value - 6.0).abs() < 1e-10);
        // serialization round-trips losslessly
        let json = rep.to_json();
        let back: VerificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn unattainable_tolerance_fails_verification() {
        let cfg = RunConfig {
            samples: 4,
            tolerance: 1e-30,
            ..RunConfig::new(SuiteKind::Theorem1, ModelSelector::Heisenberg { n: 1 })
        };
        let rep = run_suite(&cfg).unwrap();
        assert!(!rep.overall_pass);
    }

    #[test]
    fn universal_suite_on_random_model() {
        let cfg = RunConfig {
            samples: 6,
            ..RunConfig::new(
                SuiteKind::Universal,
                ModelSelector::Random { dim: 3, seed: 7 },
            )
        };
        let rep = run_suite(&cfg).unwrap();
        assert!(rep.overall_pass, "{}", rep.render_text());
    }
}
