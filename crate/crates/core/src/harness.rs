//! Batch runs: configuration, deterministic sampling, suite dispatch and
//! reports.
//!
//! A run generates its point list up front from `(seed, index)` with one
//! ChaCha stream per point, evaluates the points on the rayon pool, and
//! reduces in index order. Reports are therefore identical across runs and
//! thread counts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::calabi::{
    chern_scalar, extremal_residual, kcp1_point, km_balanced_residual, omega_norm,
    theorem_metric_kcp1, BaseKahlerModel, CalabiMetric, CalabiParams,
};
use crate::chart::{ChartId, ChartPoint};
use crate::error::{Error, Result};
use crate::expr::{compile_str, Role};
use crate::fields::ScalarField;
use crate::hyperkahler::{asd_residual, validate_hyperkahler, HyperkahlerModel};
use crate::residual::Residual;
use crate::strominger::{
    anomaly_residual, balanced_residual, curvature_identities, hym_residual, radial_h_residual,
};
use crate::twistor::AnsatzParams;

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");
const MAX_WORST: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Hyperkahler,
    Balanced,
    Hym,
    Anomaly,
    Identities,
    Radial,
    Calabi,
    All,
}

impl Suite {
    pub const CONCRETE: [Suite; 7] = [
        Suite::Hyperkahler,
        Suite::Balanced,
        Suite::Hym,
        Suite::Anomaly,
        Suite::Identities,
        Suite::Radial,
        Suite::Calabi,
    ];

    pub fn parse(name: &str) -> Result<Suite> {
        serde_json::from_value(serde_json::Value::String(name.into()))
            .map_err(|_| Error::Config(format!("unknown suite `{name}`")))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Hyperkahler => "hyperkahler",
            Suite::Balanced => "balanced",
            Suite::Hym => "hym",
            Suite::Anomaly => "anomaly",
            Suite::Identities => "identities",
            Suite::Radial => "radial",
            Suite::Calabi => "calabi",
            Suite::All => "all",
        }
    }

    /// Whether the suite can run on the given model. The frame-based suites
    /// need the explicit flat frame; the Calabi suite lives on `K_{ℂP¹}` and
    /// ignores the model.
    pub fn supports(&self, m: &HyperkahlerModel) -> bool {
        match self {
            Suite::Hym | Suite::Anomaly | Suite::Identities | Suite::Radial => m.is_flat(),
            _ => true,
        }
    }

    pub fn expand(&self, m: &HyperkahlerModel) -> Vec<Suite> {
        match self {
            Suite::All => Suite::CONCRETE.into_iter().filter(|s| s.supports(m)).collect(),
            s => vec![*s],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sampling {
    pub count: usize,
    pub seed: u64,
    /// Box for `Re ζ`, `Im ζ` (and the base coordinate of the Calabi suite).
    pub zeta_box: [f64; 2],
    /// Box for each coordinate of `N` (and the fiber coordinate `t`).
    pub fiber_box: [f64; 2],
    /// Disc removed around `ζ = 0`, the Eguchi-Hanson origin and `t = 0`.
    pub exclusion_radius: f64,
    /// Range of `ρ = |u|²` for the radial suite.
    pub rho_range: [f64; 2],
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            count: 500,
            seed: 42,
            zeta_box: [-1.5, 1.5],
            fiber_box: [-1.5, 1.5],
            exclusion_radius: 0.05,
            rho_range: [0.5, 5.0],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub absolute: f64,
    pub relative: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            absolute: 1e-10,
            relative: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalabiConstants {
    pub c: f64,
    pub c0: f64,
}

impl Default for CalabiConstants {
    fn default() -> Self {
        CalabiConstants { c: 0.0, c0: 1.0 }
    }
}

/// A run. Function slots take a preset name or an expression:
///
/// * `g`: `half_alpha` (`½log(α′/2)`), `anomaly_free` (`½log(α′/4)`), `zero`, or
///   an expression in `zr`, `zi`;
/// * `h`: `zero`, `radial` (`−(3/2)log ρ`), or an expression in `x1..x4`, `rho`;
/// * `radial_profile`: an expression in `rho`;
/// * `f`: `theorem` (the balanced profile) or an expression in `R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: HyperkahlerModel,
    pub suite: Suite,
    pub sampling: Sampling,
    pub tolerances: Tolerances,
    pub alpha_prime: f64,
    pub g: String,
    pub h: String,
    pub radial_profile: String,
    pub f: String,
    pub calabi: CalabiConstants,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: HyperkahlerModel::FlatR4,
            suite: Suite::All,
            sampling: Sampling::default(),
            tolerances: Tolerances::default(),
            alpha_prime: 2.0,
            g: "half_alpha".into(),
            h: "zero".into(),
            radial_profile: "-1.5*log(rho)".into(),
            f: "theorem".into(),
            calabi: CalabiConstants::default(),
            output: None,
        }
    }
}

fn box_ok(b: [f64; 2]) -> bool {
    b[0].is_finite() && b[1].is_finite() && b[0] < b[1]
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    /// Check invariants and build everything the suites need.
    pub fn validate(&self) -> Result<Plan> {
        let s = &self.sampling;
        let t = &self.tolerances;
        if s.count == 0 {
            return Err(Error::Config("sampling.count must be at least 1".into()));
        }
        if !(s.exclusion_radius > 0.0) {
            return Err(Error::Config("sampling.exclusion_radius must be positive".into()));
        }
        if !(t.absolute > 0.0 && t.relative > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if !box_ok(s.zeta_box) || !box_ok(s.fiber_box) || !box_ok(s.rho_range) || s.rho_range[0] <= 0.0 {
            return Err(Error::Config("sampling boxes must be finite, nonempty intervals (ρ > 0)".into()));
        }
        let excl = s.exclusion_radius;
        let covers = |b: [f64; 2]| b[0].abs().max(b[1].abs()) > excl;
        if !covers(s.zeta_box) || !covers(s.fiber_box) {
            return Err(Error::Config("sampling boxes lie inside the exclusion disc".into()));
        }
        if !(self.alpha_prime > 0.0 && self.alpha_prime.is_finite()) {
            return Err(Error::Config("alpha_prime must be positive".into()));
        }
        if let HyperkahlerModel::EguchiHanson { a } = self.model {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Config("Eguchi-Hanson scale must be positive".into()));
            }
        }
        if let Some(bad) = self.suite.expand(&self.model).iter().find(|x| !x.supports(&self.model)) {
            return Err(Error::Config(format!(
                "suite `{}` is not available on the {} model",
                bad.name(),
                self.model.name()
            )));
        }
        let g = resolve_g(&self.g, self.alpha_prime)?;
        let h = resolve(&self.h, Role::H, &[("zero", "0"), ("radial", "-1.5*log(rho)")])?;
        let radial = resolve(&self.radial_profile, Role::Radial, &[])?;
        let (calabi_metric, _) = theorem_metric_kcp1(self.calabi.c, self.calabi.c0)?;
        let calabi = if self.f == "theorem" {
            calabi_metric
        } else {
            let f = compile_str(&self.f, Role::Profile)?;
            let params = CalabiParams::constant_length(ScalarField::constant(0.0), f, self.calabi.c, 1);
            CalabiMetric::new(BaseKahlerModel::FubiniStudyCp1, params)
        };
        Ok(Plan {
            model: self.model,
            suites: self.suite.expand(&self.model),
            sampling: self.sampling.clone(),
            tolerances: self.tolerances,
            ansatz: AnsatzParams::new(g, h, self.alpha_prime),
            radial,
            calabi,
        })
    }

    /// sha256 of the canonical JSON of the effective configuration.
    pub fn digest(&self) -> String {
        let v = serde_json::to_value(self).expect("config serializes");
        hex::encode(Sha256::digest(v.to_string().as_bytes()))
    }
}

fn resolve(src: &str, role: Role, presets: &[(&str, &str)]) -> Result<ScalarField> {
    let src = presets
        .iter()
        .find(|(name, _)| *name == src)
        .map_or(src, |(_, e)| *e);
    compile_str(src, role)
}

fn resolve_g(src: &str, alpha_prime: f64) -> Result<ScalarField> {
    let expr = match src {
        "half_alpha" => format!("0.5*log({})", alpha_prime / 2.0),
        "anomaly_free" => format!("0.5*log({})", alpha_prime / 4.0),
        "zero" => "0".into(),
        other => other.into(),
    };
    compile_str(&expr, Role::G)
}

/// A validated run, ready to evaluate.
#[derive(Clone, Debug)]
pub struct Plan {
    pub model: HyperkahlerModel,
    pub suites: Vec<Suite>,
    pub sampling: Sampling,
    pub tolerances: Tolerances,
    pub ansatz: AnsatzParams,
    pub radial: ScalarField,
    pub calabi: CalabiMetric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PointKind {
    Fiber,
    Twistor,
    Radial,
    Canonical,
}

impl Suite {
    fn kind(&self) -> PointKind {
        match self {
            Suite::Hyperkahler => PointKind::Fiber,
            Suite::Radial => PointKind::Radial,
            Suite::Calabi => PointKind::Canonical,
            _ => PointKind::Twistor,
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, b: [f64; 2]) -> f64 {
    rng.gen_range(b[0]..b[1])
}

/// Uniform pair in `b × b` outside the exclusion disc.
fn pair_outside(rng: &mut ChaCha8Rng, b: [f64; 2], r: f64) -> [f64; 2] {
    loop {
        let p = [uniform(rng, b), uniform(rng, b)];
        if p[0] * p[0] + p[1] * p[1] > r * r {
            return p;
        }
    }
}

fn fiber_coords(rng: &mut ChaCha8Rng, s: &Sampling, m: &HyperkahlerModel) -> [f64; 4] {
    loop {
        let x = [0; 4].map(|_| uniform(rng, s.fiber_box));
        let t: f64 = x.iter().map(|v| v * v).sum();
        if m.is_flat() || t > s.exclusion_radius * s.exclusion_radius {
            return x;
        }
    }
}

fn sample_point(kind: PointKind, s: &Sampling, m: &HyperkahlerModel, index: usize) -> ChartPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    rng.set_stream(index as u64);
    let r = s.exclusion_radius;
    let point = match kind {
        PointKind::Fiber => ChartPoint::new(ChartId::Fiber, fiber_coords(&mut rng, s, m).to_vec()),
        PointKind::Twistor => {
            let z = pair_outside(&mut rng, s.zeta_box, r);
            ChartPoint::twistor(Complex64::new(z[0], z[1]), fiber_coords(&mut rng, s, m))
        }
        PointKind::Radial => {
            let z = pair_outside(&mut rng, s.zeta_box, r);
            let rho = uniform(&mut rng, s.rho_range);
            let dir = loop {
                let d = [0; 4].map(|_| rng.gen_range(-1.0..1.0));
                let n: f64 = d.iter().map(|v: &f64| v * v).sum();
                if n > 0.01 && n <= 1.0 {
                    break d.map(|v| v * (rho / n).sqrt());
                }
            };
            ChartPoint::twistor(Complex64::new(z[0], z[1]), dir)
        }
        PointKind::Canonical => {
            let z = [uniform(&mut rng, s.zeta_box), uniform(&mut rng, s.zeta_box)];
            let t = pair_outside(&mut rng, s.fiber_box, r);
            kcp1_point(Complex64::new(z[0], z[1]), Complex64::new(t[0], t[1]))
        }
    };
    point.expect("sampled coordinates are finite")
}

/// The point list of a suite.
pub fn sample_points(plan: &Plan, suite: Suite) -> Vec<ChartPoint> {
    (0..plan.sampling.count)
        .map(|i| sample_point(suite.kind(), &plan.sampling, &plan.model, i))
        .collect()
}

type Entries = Vec<(&'static str, Residual)>;

fn abs_only(x: f64) -> Residual {
    Residual::new(x, 1.0)
}

fn evaluate(plan: &Plan, suite: Suite, p: &ChartPoint) -> Result<Entries> {
    let m = &plan.model;
    let a = &plan.ansatz;
    Ok(match suite {
        Suite::Hyperkahler => {
            let mut e = vec![("hyperkahler.det", abs_only(validate_hyperkahler(m, std::slice::from_ref(p))?))];
            if !m.is_flat() {
                e.push(("hyperkahler.asd", abs_only(asd_residual(m, p)?)));
            }
            e
        }
        Suite::Balanced => vec![("balanced", balanced_residual(m, a, p)?)],
        Suite::Hym => vec![("hym", hym_residual(m, a, p)?)],
        Suite::Anomaly => vec![("anomaly", anomaly_residual(m, a, p)?)],
        Suite::Identities => {
            let c = curvature_identities(m, a, p)?;
            vec![
                ("identities.c1", c.c1),
                ("identities.c2", c.c2),
                ("identities.trace", c.trace),
                ("identities.w", c.w),
            ]
        }
        Suite::Radial => {
            let r = radial_h_residual(&plan.radial, p)?;
            vec![
                ("radial", r.residual),
                ("radial.expansion", abs_only(r.expansion_mismatch)),
                ("radial.rho_identity", abs_only(r.rho_identity)),
            ]
        }
        Suite::Calabi => {
            let c = &plan.calabi;
            vec![
                ("calabi.balanced", km_balanced_residual(c.base, &c.params, p)?),
                ("calabi.chern_scalar", abs_only(chern_scalar(c, p)?.abs())),
                ("calabi.extremal", extremal_residual(c, p)?),
                // squared deviations are filled in after the sweep
                ("calabi.norm_variance", abs_only(omega_norm(c, p)?)),
            ]
        }
        Suite::All => unreachable!("expanded before evaluation"),
    })
}

fn entry_names(suite: Suite, model: &HyperkahlerModel) -> Vec<&'static str> {
    match suite {
        Suite::Hyperkahler if model.is_flat() => vec!["hyperkahler.det"],
        Suite::Hyperkahler => vec!["hyperkahler.det", "hyperkahler.asd"],
        Suite::Balanced => vec!["balanced"],
        Suite::Hym => vec!["hym"],
        Suite::Anomaly => vec!["anomaly"],
        Suite::Identities => vec!["identities.c1", "identities.c2", "identities.trace", "identities.w"],
        Suite::Radial => vec!["radial", "radial.expansion", "radial.rho_identity"],
        Suite::Calabi => vec!["calabi.balanced", "calabi.chern_scalar", "calabi.extremal", "calabi.norm_variance"],
        Suite::All => vec![],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstPoint {
    pub index: usize,
    pub coords: Vec<f64>,
    /// Normalised residual, absent when the point failed to evaluate.
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    /// Largest normalised residual `abs / max(tol_abs/tol_rel, scale)`.
    pub max: f64,
    pub mean: f64,
    pub points: usize,
    pub errors: usize,
    /// Bound on `max` (the relative tolerance).
    pub tolerance: f64,
    pub pass: bool,
    pub worst_points: Vec<WorstPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub version: String,
    pub config_digest: String,
    pub suites: BTreeMap<String, SuiteReport>,
}

impl ResidualReport {
    pub fn all_pass(&self) -> bool {
        self.suites.values().all(|s| s.pass)
    }

    /// Canonical JSON: sorted keys, shortest round-trip floats.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Compensated (Neumaier) sum in the given order.
pub fn neumaier_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + comp
}

fn reduce(
    values: &[(usize, std::result::Result<f64, String>)],
    points: &[ChartPoint],
    tolerance: f64,
) -> SuiteReport {
    let ok: Vec<f64> = values.iter().filter_map(|(_, v)| v.as_ref().ok().copied()).collect();
    let errors = values.len() - ok.len();
    let max = ok.iter().copied().fold(0.0, f64::max);
    let mean = if ok.is_empty() { 0.0 } else { neumaier_sum(ok.iter().copied()) / ok.len() as f64 };
    let nan = ok.iter().any(|v| v.is_nan());
    let mut ranked: Vec<&(usize, std::result::Result<f64, String>)> = values.iter().collect();
    // errors first, then descending residual, ties by index
    ranked.sort_by(|a, b| match (&a.1, &b.1) {
        (Err(_), Err(_)) => a.0.cmp(&b.0),
        (Err(_), Ok(_)) => std::cmp::Ordering::Less,
        (Ok(_), Err(_)) => std::cmp::Ordering::Greater,
        (Ok(x), Ok(y)) => y.total_cmp(x).then(a.0.cmp(&b.0)),
    });
    let pass = errors == 0 && !nan && max <= tolerance;
    let worst_points = ranked
        .into_iter()
        .filter(|(_, v)| !pass || v.is_err())
        .take(MAX_WORST)
        .map(|(i, v)| WorstPoint {
            index: *i,
            coords: points[*i].coords.clone(),
            residual: v.as_ref().ok().copied(),
            error: v.as_ref().err().cloned(),
        })
        .collect();
    SuiteReport {
        max,
        mean,
        points: values.len(),
        errors,
        tolerance,
        pass,
        worst_points,
    }
}

/// Evaluate one suite over its point list.
pub fn run_single(plan: &Plan, suite: Suite) -> BTreeMap<String, SuiteReport> {
    let points = sample_points(plan, suite);
    let raw: Vec<std::result::Result<Entries, String>> = points
        .par_iter()
        .map(|p| evaluate(plan, suite, p).map_err(|e| e.to_string()))
        .collect();
    let tol = plan.tolerances;
    let mut out = BTreeMap::new();
    for name in entry_names(suite, &plan.model) {
        let mut column: Vec<(usize, std::result::Result<Residual, String>)> = raw
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let v = r.as_ref().map_err(Clone::clone).and_then(|es| {
                    es.iter()
                        .find(|(n, _)| *n == name)
                        .map(|(_, r)| *r)
                        .ok_or_else(|| format!("{name} missing"))
                });
                (i, v)
            })
            .collect();
        if name == "calabi.norm_variance" {
            let norms: Vec<f64> = column.iter().filter_map(|(_, v)| v.as_ref().ok().map(|r| r.abs)).collect();
            if !norms.is_empty() {
                let mu = neumaier_sum(norms.iter().copied()) / norms.len() as f64;
                for (_, v) in column.iter_mut() {
                    if let Ok(r) = v {
                        *r = abs_only((r.abs - mu) * (r.abs - mu));
                    }
                }
            }
        }
        let values: Vec<(usize, std::result::Result<f64, String>)> = column
            .into_iter()
            .map(|(i, v)| (i, v.map(|r| r.normalized(tol.absolute, tol.relative))))
            .collect();
        out.insert(name.to_string(), reduce(&values, &points, tol.relative));
    }
    out
}

pub fn run_plan(plan: &Plan, digest: String) -> ResidualReport {
    let mut suites = BTreeMap::new();
    for s in &plan.suites {
        suites.extend(run_single(plan, *s));
    }
    ResidualReport {
        version: REPORT_VERSION.into(),
        config_digest: digest,
        suites,
    }
}

/// Validate and run a configuration.
pub fn run_suite(cfg: &RunConfig) -> Result<ResidualReport> {
    let plan = cfg.validate()?;
    Ok(run_plan(&plan, cfg.digest()))
}

/// As [`run_suite`], on a dedicated pool of `threads` workers.
pub fn run_suite_with_threads(cfg: &RunConfig, threads: usize) -> Result<ResidualReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_suite(cfg))
}

pub fn emit_report(report: &ResidualReport, path: &Path) -> Result<()> {
    std::fs::write(path, report.to_json()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// A random polynomial pair `(g, h)` as expression strings: `g` of degree 2
/// in `zr, zi`, `h` of degree 2 in `x1..x4`, coefficients in `[−0.3, 0.3]`.
pub fn random_test_pair(seed: u64, index: u64) -> (String, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut poly = |vars: &[&str]| {
        let mut terms = vec![format!("{:.3}", rng.gen_range(-0.3..0.3))];
        for (i, a) in vars.iter().enumerate() {
            terms.push(format!("{:.3}*{a}", rng.gen_range(-0.3..0.3)));
            for b in &vars[i..] {
                terms.push(format!("{:.3}*{a}*{b}", rng.gen_range(-0.3..0.3)));
            }
        }
        terms.join(" + ")
    };
    let g = poly(&["zr", "zi"]);
    let h = poly(&["x1", "x2", "x3", "x4"]);
    (g, h)
}

/// `AnsatzParams` from two expression strings.
pub fn ansatz_from_exprs(g: &str, h: &str, alpha_prime: f64) -> Result<AnsatzParams> {
    Ok(AnsatzParams::new(compile_str(g, Role::G)?, compile_str(h, Role::H)?, alpha_prime))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(suite: Suite) -> RunConfig {
        RunConfig {
            suite,
            sampling: Sampling {
                count: 6,
                ..Sampling::default()
            },
            ..RunConfig::default()
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_json(r#"{"suite": "hym", "bogus": 1}"#).is_err());
        assert!(RunConfig::from_json(r#"{"sampling": {"count": 3, "sede": 1}}"#).is_err());
        let c = RunConfig::from_json(r#"{"model": {"model": "eguchi_hanson", "a": 1.0}, "suite": "balanced"}"#).unwrap();
        assert_eq!(c.model, HyperkahlerModel::EguchiHanson { a: 1.0 });
        assert_eq!(c.sampling, Sampling::default());
    }

    #[test]
    fn validation() {
        let mut c = small(Suite::Hym);
        c.model = HyperkahlerModel::EguchiHanson { a: 1.0 };
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.suite = Suite::All;
        let plan = c.validate().unwrap();
        assert_eq!(plan.suites, vec![Suite::Hyperkahler, Suite::Balanced, Suite::Calabi]);
        let mut c = small(Suite::Balanced);
        c.sampling.count = 0;
        assert!(c.validate().is_err());
        let mut c = small(Suite::Balanced);
        c.tolerances.relative = 0.0;
        assert!(c.validate().is_err());
        let mut c = small(Suite::Balanced);
        c.h = "log(".into();
        assert!(matches!(c.validate(), Err(Error::Syntax { offset: 4, .. })));
    }

    #[test]
    fn sampling_respects_regions() {
        let plan = small(Suite::All).validate().unwrap();
        for p in sample_points(&plan, Suite::Hym) {
            assert!(p.zeta().unwrap().norm() > 0.05);
            assert!(p.coords.iter().all(|x| x.abs() <= 1.5));
        }
        for p in sample_points(&plan, Suite::Radial) {
            let rho: f64 = p.coords[2..].iter().map(|x| x * x).sum();
            assert!((0.5..=5.0).contains(&rho));
        }
        let a = sample_points(&plan, Suite::Hym);
        assert_eq!(a, sample_points(&plan, Suite::Balanced));
    }

    #[test]
    fn neumaier_is_exact_on_cancellation() {
        assert_eq!(neumaier_sum([1.0, 1e100, 1.0, -1e100]), 2.0);
    }

    #[test]
    fn domain_violations_fail_the_suite() {
        let mut c = small(Suite::Balanced);
        c.h = "log(x1)".into();
        let r = run_suite(&c).unwrap();
        let b = &r.suites["balanced"];
        assert!(!b.pass);
        assert!(b.errors > 0);
        assert!(b.worst_points[0].error.is_some());
    }

    #[test]
    fn random_pairs_parse() {
        for k in 0..5 {
            let (g, h) = random_test_pair(7, k);
            ansatz_from_exprs(&g, &h, 2.0).unwrap();
        }
        assert_ne!(random_test_pair(7, 0), random_test_pair(7, 1));
    }
}
