//! Config-driven experiment runner behind the `hsr` binary.
//!
//! A config is a flat [`Record`] with dotted sections. Top-level keys are
//! `kind`, `seed`, `out` and `format`; the sections are `model`,
//! `optimizer`, `constants`, `fill`, and one section per experiment kind.
//! Every key is checked against the schema below, so a misspelled key is an
//! error rather than a silent default.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{
    bundle_for, c1_limit_check, estimate_eta, min_sin_angle, scaling_experiment, BundleInputs,
    ConstantsBundle,
};
use crate::disks::{
    circle, estimate_k, fill_disk, lifted_circle_loop, loop_corpus, DiskFamily, FillConfig,
    DEFAULT_C_M, DEFAULT_DELTA_M, DEFAULT_SIGMA,
};
use crate::distance::{
    estimate_upper, heisenberg_vertical_exact, reachability_probe, OptimizerConfig,
};
use crate::error::{Error, Result};
use crate::fields::FieldRecipe;
use crate::forms::{ModelDescriptor, ModelKind, DEFAULT_PERTURBATION};
use crate::kv::{content_hash, join_list, Record};
use crate::norm::{hoelder_norm_estimate, DomainBox, GridSpec};
use crate::paths::Polyline;
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Synth,
    Norm,
    Dist,
    Probe,
    Stokes,
    Fill,
    Scaling,
    Limits,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        Self::Synth,
        Self::Norm,
        Self::Dist,
        Self::Probe,
        Self::Stokes,
        Self::Fill,
        Self::Scaling,
        Self::Limits,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Synth => "synth",
            Self::Norm => "norm",
            Self::Dist => "dist",
            Self::Probe => "probe",
            Self::Stokes => "stokes",
            Self::Fill => "fill",
            Self::Scaling => "scaling",
            Self::Limits => "limits",
        }
    }

    /// Keys of the kind's own section.
    fn keys(self) -> &'static [&'static str] {
        match self {
            Self::Synth => &["resolution"],
            Self::Norm => &["resolutions", "pairs"],
            Self::Dist => &["p", "q"],
            Self::Probe => &["p", "eps", "samples"],
            Self::Stokes => &["family", "trials", "r_min", "r_max", "segments"],
            Self::Fill => &["loop", "radius", "segments"],
            Self::Scaling => &["p", "epsilons", "bound", "k_trials"],
            Self::Limits => &["thetas"],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidValue {
                key: "kind".into(),
                message: format!(
                    "`{s}` is not one of synth, norm, dist, probe, stokes, fill, scaling, limits"
                ),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::InvalidValue {
                key: "format".into(),
                message: format!("`{s}` is not csv or json"),
            }),
        }
    }
}

/// Overrides for the constants of the lower bound. `k` and `eta` are
/// estimated when absent; `sin_phi0` and `alpha_norm` only matter for
/// `limits`, where no form is built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantOverrides {
    pub c_m: f64,
    pub delta_m: f64,
    pub sigma: f64,
    pub k: Option<f64>,
    pub eta: Option<f64>,
    pub sin_phi0: f64,
    pub alpha_norm: f64,
}

impl Default for ConstantOverrides {
    fn default() -> Self {
        Self {
            c_m: DEFAULT_C_M,
            delta_m: DEFAULT_DELTA_M,
            sigma: DEFAULT_SIGMA,
            k: None,
            eta: None,
            sin_phi0: 1.0,
            alpha_norm: 1.0,
        }
    }
}

const CONSTANT_KEYS: [&str; 7] = [
    "c_m",
    "delta_m",
    "sigma",
    "k",
    "eta",
    "sin_phi0",
    "alpha_norm",
];
const MODEL_KEYS: [&str; 7] = [
    "kind",
    "theta",
    "amplitude",
    "seed",
    "lambda",
    "depth",
    "period",
];
const OPTIMIZER_KEYS: [&str; 7] = [
    "segments",
    "harmonics",
    "restarts",
    "endpoint_tol",
    "defect_tol",
    "max_evals",
    "penalty",
];
const FILL_KEYS: [&str; 2] = ["rings", "smoothing_iters"];
const FIELD_KEYS: [&str; 6] = ["theta", "lambda", "depth", "amplitude", "seed", "period"];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub model: ModelDescriptor,
    pub field: FieldRecipe,
    pub optimizer: OptimizerConfig,
    pub constants: ConstantOverrides,
    pub fill: FillConfig,
    /// Entries of the kind's own section, prefix removed.
    pub params: Record,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::OutOfRange {
            name,
            range: "(0, inf)",
            value: v,
        })
    }
}

fn theta_in_range(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(Error::OutOfRange {
            name,
            range: "(0,1)",
            value: v,
        })
    }
}

fn point(r: &Record, key: &str, default: Vec3) -> Result<Vec3> {
    match r.get_list(key)? {
        None => Ok(default),
        Some(v) if v.len() == 3 => Ok(Vec3::new(v[0], v[1], v[2])),
        Some(v) => Err(Error::InvalidValue {
            key: key.into(),
            message: format!("expected 3 comma-separated numbers, got {}", v.len()),
        }),
    }
}

impl ExperimentConfig {
    /// Defaults for a kind, as if parsed from `kind = <kind>` alone.
    pub fn defaults(kind: ExperimentKind) -> Self {
        Self {
            kind,
            seed: 0,
            model: ModelDescriptor::new(ModelKind::Heisenberg, 0.5, DEFAULT_PERTURBATION, 0),
            field: FieldRecipe::default(),
            optimizer: OptimizerConfig::default(),
            constants: ConstantOverrides::default(),
            fill: FillConfig::default(),
            params: Record::new(),
            out: None,
            format: OutputFormat::Csv,
        }
    }

    /// Parse and validate. `kind` may be supplied by the caller when the
    /// record has none; if both are present they must agree.
    pub fn from_record(r: &Record, kind: Option<ExperimentKind>) -> Result<Self> {
        let file_kind = r
            .get_str("kind")
            .map(ExperimentKind::from_str)
            .transpose()?;
        let kind = match (file_kind, kind) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::InvalidValue {
                    key: "kind".into(),
                    message: format!("config says `{a}` but `{b}` was requested"),
                })
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(Error::MissingKey("kind".into())),
        };

        let mut allowed: Vec<String> = ["kind", "seed", "out", "format"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        for (prefix, keys) in [
            ("model", &MODEL_KEYS[..]),
            ("optimizer", &OPTIMIZER_KEYS[..]),
            ("constants", &CONSTANT_KEYS[..]),
            ("fill", &FILL_KEYS[..]),
            ("field", &FIELD_KEYS[..]),
            (kind.name(), kind.keys()),
        ] {
            allowed.extend(keys.iter().map(|k| format!("{prefix}.{k}")));
        }
        let allowed_refs: Vec<&str> = allowed.iter().map(String::as_str).collect();
        let unknown = r.unknown_keys(&allowed_refs);
        if !unknown.is_empty() {
            return Err(Error::UnknownKeys(unknown));
        }

        let mut cfg = Self::defaults(kind);
        cfg.seed = r.get("seed")?.unwrap_or(0);
        cfg.out = r.get_str("out").map(PathBuf::from);
        if let Some(f) = r.get_str("format") {
            cfg.format = f.parse()?;
        }

        let mut model = r.section("model");
        if !model.contains("kind") {
            model.set("kind", ModelKind::Heisenberg);
        }
        cfg.model = ModelDescriptor::from_record(&model)?;
        theta_in_range("model.theta", cfg.model.theta)?;
        positive("model.period", cfg.model.period)?;
        if !(cfg.model.amplitude >= 0.0) {
            return Err(Error::OutOfRange {
                name: "model.amplitude",
                range: "[0, inf)",
                value: cfg.model.amplitude,
            });
        }

        let field = r.section("field");
        let d = FieldRecipe::default();
        cfg.field = FieldRecipe {
            theta: field.get("theta")?.unwrap_or(d.theta),
            lambda: field.get("lambda")?.unwrap_or(d.lambda),
            depth: field.get("depth")?.unwrap_or(d.depth),
            amplitude: field.get("amplitude")?.unwrap_or(d.amplitude),
            seed: field.get("seed")?.unwrap_or(d.seed),
            period: field.get("period")?.unwrap_or(d.period),
        };
        theta_in_range("field.theta", cfg.field.theta)?;
        cfg.field.build()?;

        let mut opt = r.section("optimizer");
        opt.set("seed", cfg.seed);
        cfg.optimizer = OptimizerConfig::from_record(&opt)?;

        let c = r.section("constants");
        let dc = ConstantOverrides::default();
        cfg.constants = ConstantOverrides {
            c_m: positive("constants.c_m", c.get("c_m")?.unwrap_or(dc.c_m))?,
            delta_m: positive("constants.delta_m", c.get("delta_m")?.unwrap_or(dc.delta_m))?,
            sigma: positive("constants.sigma", c.get("sigma")?.unwrap_or(dc.sigma))?,
            k: c.get("k")?
                .map(|v| positive("constants.k", v))
                .transpose()?,
            eta: c
                .get("eta")?
                .map(|v| positive("constants.eta", v))
                .transpose()?,
            sin_phi0: c.get("sin_phi0")?.unwrap_or(dc.sin_phi0),
            alpha_norm: positive(
                "constants.alpha_norm",
                c.get("alpha_norm")?.unwrap_or(dc.alpha_norm),
            )?,
        };
        if !(cfg.constants.sin_phi0 > 0.0 && cfg.constants.sin_phi0 <= 1.0) {
            return Err(Error::OutOfRange {
                name: "constants.sin_phi0",
                range: "(0, 1]",
                value: cfg.constants.sin_phi0,
            });
        }

        let f = r.section("fill");
        cfg.fill = FillConfig {
            rings: f.get("rings")?.unwrap_or(cfg.fill.rings),
            smoothing_iters: f
                .get("smoothing_iters")?
                .unwrap_or(cfg.fill.smoothing_iters),
            delta_m: cfg.constants.delta_m,
            c_m: cfg.constants.c_m,
        };
        if cfg.fill.rings < 1 || cfg.fill.smoothing_iters > 200 {
            return Err(Error::Invalid(
                "fill.rings must be >= 1 and fill.smoothing_iters <= 200".into(),
            ));
        }

        cfg.params = r.section(kind.name());
        Ok(cfg)
    }

    pub fn parse(text: &str, kind: Option<ExperimentKind>) -> Result<Self> {
        Self::from_record(&Record::parse(text)?, kind)
    }

    /// Everything that determines the numbers, with defaults filled in.
    /// `out` and `format` are left out since they do not affect results.
    pub fn to_record(&self) -> Record {
        let mut r = Record::new();
        r.set("kind", self.kind).set("seed", self.seed);
        r.merge_section("model", &self.model.to_record());
        r.merge_section("field", &self.field.to_record());
        let mut opt = self.optimizer.to_record();
        opt = Record::parse(
            &opt.entries()
                .iter()
                .filter(|(k, _)| k.as_str() != "seed")
                .map(|(k, v)| format!("{k} = {v}\n"))
                .collect::<String>(),
        )
        .expect("optimizer record reparses");
        r.merge_section("optimizer", &opt);
        let c = &self.constants;
        let mut cr = Record::new();
        cr.set("c_m", c.c_m)
            .set("delta_m", c.delta_m)
            .set("sigma", c.sigma)
            .set("sin_phi0", c.sin_phi0)
            .set("alpha_norm", c.alpha_norm);
        if let Some(k) = c.k {
            cr.set("k", k);
        }
        if let Some(e) = c.eta {
            cr.set("eta", e);
        }
        r.merge_section("constants", &cr);
        let mut fr = Record::new();
        fr.set("rings", self.fill.rings)
            .set("smoothing_iters", self.fill.smoothing_iters);
        r.merge_section("fill", &fr);
        r.merge_section(self.kind.name(), &self.params);
        r
    }

    pub fn hash(&self) -> String {
        content_hash(&self.to_record().to_text())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

macro_rules! row {
    ($($v:expr),* $(,)?) => { vec![$($v.to_string()),*] };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> Assertion {
    Assertion {
        name: name.into(),
        passed,
        detail,
    }
}

/// Everything one run produces. Serializes to the JSON summary; `files`
/// (OFF disks, polylines) and `elapsed` are written separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub kind: ExperimentKind,
    pub config: String,
    pub config_hash: String,
    /// Constants in force for the run.
    pub constants: BTreeMap<String, f64>,
    /// Full bundle when the run computed one.
    pub bundle: Option<ConstantsBundle>,
    pub outputs: Value,
    pub tables: Vec<Table>,
    pub assertions: Vec<Assertion>,
    pub unconverged: usize,
    #[serde(skip)]
    pub files: BTreeMap<String, String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl ReportBundle {
    pub fn passed(&self) -> bool {
        self.unconverged == 0 && self.assertions.iter().all(|a| a.passed)
    }

    /// 0 when every assertion holds and every estimate converged, else 1.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Content hash of the JSON summary.
    pub fn hash(&self) -> Result<String> {
        Ok(content_hash(&serde_json::to_string(self)?))
    }
}

struct Outcome {
    outputs: Value,
    tables: Vec<Table>,
    assertions: Vec<Assertion>,
    unconverged: usize,
    bundle: Option<ConstantsBundle>,
    files: BTreeMap<String, String>,
}

impl Outcome {
    fn new(outputs: Value) -> Self {
        Self {
            outputs,
            tables: Vec::new(),
            assertions: Vec::new(),
            unconverged: 0,
            bundle: None,
            files: BTreeMap::new(),
        }
    }
}

pub fn run_config(path: &Path) -> Result<ReportBundle> {
    let text = fs::read_to_string(path)?;
    run_experiment(&ExperimentConfig::parse(&text, None)?)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ReportBundle> {
    let start = Instant::now();
    let o = match cfg.kind {
        ExperimentKind::Synth => run_synth(cfg)?,
        ExperimentKind::Norm => run_norm(cfg)?,
        ExperimentKind::Dist => run_dist(cfg)?,
        ExperimentKind::Probe => run_probe(cfg)?,
        ExperimentKind::Stokes => run_stokes(cfg)?,
        ExperimentKind::Fill => run_fill(cfg)?,
        ExperimentKind::Scaling => run_scaling(cfg)?,
        ExperimentKind::Limits => run_limits(cfg)?,
    };
    let c = &cfg.constants;
    let mut constants = BTreeMap::from([
        ("c_m".to_string(), c.c_m),
        ("delta_m".to_string(), c.delta_m),
        ("sigma".to_string(), c.sigma),
        ("tau".to_string(), c.delta_m.min(c.sigma)),
    ]);
    if let Some(b) = &o.bundle {
        constants.extend(b.to_record().entries().iter().map(|(k, v)| {
            (
                k.clone(),
                v.parse::<f64>().expect("bundle values are numbers"),
            )
        }));
    }
    Ok(ReportBundle {
        kind: cfg.kind,
        config: cfg.to_record().to_text(),
        config_hash: cfg.hash(),
        constants,
        bundle: o.bundle,
        outputs: o.outputs,
        tables: o.tables,
        assertions: o.assertions,
        unconverged: o.unconverged,
        files: o.files,
        elapsed: start.elapsed(),
    })
}

/// Write the report into `dir`: `summary.json` always, one CSV per table
/// for [`OutputFormat::Csv`], and every auxiliary file.
pub fn emit_report(
    bundle: &ReportBundle,
    format: OutputFormat,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, text: &str| -> Result<()> {
        let p = dir.join(name);
        fs::write(&p, text)?;
        written.push(p);
        Ok(())
    };
    put("summary.json", &bundle.to_json()?)?;
    if format == OutputFormat::Csv {
        for t in &bundle.tables {
            put(&format!("{}.csv", t.name), &t.to_csv())?;
        }
    }
    for (name, text) in &bundle.files {
        put(name, text)?;
    }
    Ok(written)
}

fn run_synth(cfg: &ExperimentConfig) -> Result<Outcome> {
    let field = cfg.field.build()?;
    let res: usize = cfg.params.get("resolution")?.unwrap_or(17);
    let grid = GridSpec::new(res, 4096, cfg.seed)?;
    let est = hoelder_norm_estimate(
        |x| field.eval(&Vec3::new(x[0], x[1], x[2])),
        field.theta,
        &DomainBox::cube(3, 0.0, field.period),
        &grid,
    )?;
    let mut slice = Table::new("slice", &["x", "y", "value"]);
    let h = field.period / (res - 1) as f64;
    for i in 0..res {
        for j in 0..res {
            let (x, y) = (i as f64 * h, j as f64 * h);
            slice.push(row![x, y, field.eval(&Vec3::new(x, y, 0.0))]);
        }
    }
    let mut o = Outcome::new(json!({
        "recipe": field.recipe(),
        "directions": field.directions,
        "phases": field.phases,
        "sup_bound": field.sup_bound(),
        "seminorm_bound": field.seminorm_bound(),
        "analytic_norm_bound": field.analytic_norm_bound,
        "estimate": est,
    }));
    o.assertions.push(check(
        "estimate_below_bound",
        est.value() <= field.analytic_norm_bound,
        format!("{} <= {}", est.value(), field.analytic_norm_bound),
    ));
    o.tables.push(slice);
    Ok(o)
}

fn run_norm(cfg: &ExperimentConfig) -> Result<Outcome> {
    let field = cfg.field.build()?;
    let resolutions: Vec<usize> = cfg
        .params
        .get_list("resolutions")?
        .unwrap_or_else(|| vec![9.0, 17.0, 33.0])
        .into_iter()
        .map(|v| v as usize)
        .collect();
    let pairs: usize = cfg.params.get("pairs")?.unwrap_or(20_000);
    let mut table = Table::new(
        "norm",
        &[
            "resolution",
            "sup_norm",
            "seminorm",
            "estimate",
            "analytic_bound",
        ],
    );
    let mut values = Vec::new();
    for &r in &resolutions {
        let est = hoelder_norm_estimate(
            |x| field.eval(&Vec3::new(x[0], x[1], x[2])),
            field.theta,
            &DomainBox::cube(3, 0.0, field.period),
            &GridSpec::new(r, pairs, cfg.seed)?,
        )?;
        values.push(est.value());
        table.push(row![
            r,
            est.sup_norm,
            est.seminorm,
            est.value(),
            field.analytic_norm_bound
        ]);
    }
    let mut o = Outcome::new(json!({
        "recipe": field.recipe(),
        "estimates": values,
        "analytic_norm_bound": field.analytic_norm_bound,
    }));
    let nested = resolutions
        .windows(2)
        .all(|w| w[1] > w[0] && (w[1] - 1) % (w[0] - 1) == 0);
    if nested {
        o.assertions.push(check(
            "monotone_under_refinement",
            values.windows(2).all(|w| w[1] >= w[0]),
            format!("{values:?}"),
        ));
    }
    o.assertions.push(check(
        "below_analytic_bound",
        values.iter().all(|v| *v <= field.analytic_norm_bound),
        format!("bound {}", field.analytic_norm_bound),
    ));
    o.tables.push(table);
    Ok(o)
}

fn polyline_csv(p: &Polyline) -> Result<String> {
    let mut buf = Vec::new();
    p.write_csv(&mut buf)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}

fn run_dist(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (alpha, model) = cfg.model.build()?;
    let p = point(&cfg.params, "p", Vec3::zeros())?;
    let q = point(&cfg.params, "q", Vec3::new(0.0, 0.0, 0.1))?;
    let (est, converged) = match estimate_upper(&alpha, p, q, &cfg.optimizer) {
        Ok(e) => (e, true),
        Err(Error::Unconverged { best }) => (*best, false),
        Err(e) => return Err(e),
    };
    let d = q - p;
    let oracle =
        (cfg.model.kind == ModelKind::Heisenberg && p == Vec3::zeros() && d.x == 0.0 && d.y == 0.0)
            .then(|| heisenberg_vertical_exact(d.z));
    let mut o = Outcome::new(json!({
        "model": model.description,
        "p": [p.x, p.y, p.z],
        "q": [q.x, q.y, q.z],
        "d_r": alpha.chart.distance(&p, &q),
        "estimate": est.record(&cfg.optimizer),
        "oracle": oracle,
    }));
    if let Some(exact) = oracle {
        o.assertions.push(check(
            "upper_estimate_above_oracle",
            !converged || est.value >= exact * (1.0 - cfg.optimizer.endpoint_tol),
            format!("{} vs {exact}", est.value),
        ));
    }
    o.unconverged = usize::from(!converged);
    o.files.insert("path.csv".into(), polyline_csv(&est.path)?);
    Ok(o)
}

fn run_probe(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (alpha, model) = cfg.model.build()?;
    let p = point(&cfg.params, "p", Vec3::zeros())?;
    let eps: f64 = cfg.params.get("eps")?.unwrap_or(0.1);
    let samples: usize = cfg.params.get("samples")?.unwrap_or(256);
    let rep = reachability_probe(&alpha, p, positive("probe.eps", eps)?, samples, cfg.seed)?;
    let dido = eps * eps / (4.0 * PI);
    let mut table = Table::new("endpoints", &["x", "y", "z"]);
    for e in &rep.endpoints {
        table.push(row![e[0], e[1], e[2]]);
    }
    let mut o = Outcome::new(json!({
        "model": model.description,
        "eps": eps,
        "samples": samples,
        "max_dz": rep.max_dz,
        "max_dr": rep.max_dr,
        "dido_area": dido,
        "reach_over_dido": rep.max_dz / dido,
    }));
    o.assertions.push(check(
        "paths_shorter_than_eps",
        rep.max_dr < eps,
        format!("max d_R {} < {eps}", rep.max_dr),
    ));
    o.tables.push(table);
    Ok(o)
}

fn run_stokes(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (alpha, model) = cfg.model.build()?;
    let sigma = cfg.constants.sigma;
    let family = match cfg.params.get_str("family").unwrap_or("admissible") {
        "admissible" => DiskFamily::admissible(sigma),
        "flat" => DiskFamily::FlatCircles {
            r_min: cfg.params.get("r_min")?.unwrap_or(0.05),
            r_max: cfg.params.get("r_max")?.unwrap_or(0.4),
            segments: cfg.params.get("segments")?.unwrap_or(128),
            center_half_width: 0.0,
        },
        other => {
            return Err(Error::InvalidValue {
                key: "stokes.family".into(),
                message: format!("`{other}` is not admissible or flat"),
            })
        }
    };
    let flat = matches!(family, DiskFamily::FlatCircles { .. });
    let trials: usize = cfg.params.get("trials")?.unwrap_or(1000);
    let fill = FillConfig {
        delta_m: if flat {
            f64::INFINITY
        } else {
            cfg.fill.delta_m
        },
        ..cfg.fill
    };
    let admissibility = if flat { f64::INFINITY } else { sigma };
    let form = alpha.normalized();
    let k = estimate_k(
        &form,
        alpha.theta,
        &family,
        trials,
        cfg.seed,
        &fill,
        admissibility,
    )?;
    let mut table = Table::new(
        "stokes",
        &[
            "trial",
            "boundary_length",
            "area",
            "boundary_integral",
            "normalized_ratio",
            "smooth_ratio",
        ],
    );
    for (i, s) in k.samples.iter().enumerate() {
        table.push(row![
            i,
            s.boundary_length,
            s.area,
            s.boundary_integral,
            s.normalized_ratio,
            s.smooth_ratio
        ]);
    }
    let mut o = Outcome::new(json!({
        "model": model.description,
        "family": family,
        "trials": trials,
        "k_hat": k.k_hat,
        "norm_upper": k.norm_upper,
        "max_smooth_ratio": k.max_smooth_ratio(),
    }));
    o.assertions.push(check(
        "k_hat_finite",
        k.k_hat.is_finite(),
        format!("K_hat = {}", k.k_hat),
    ));
    o.tables.push(table);
    Ok(o)
}

fn run_fill(cfg: &ExperimentConfig) -> Result<Outcome> {
    let segments: usize = cfg.params.get("segments")?.unwrap_or(64);
    let loops: Vec<(String, Polyline)> = match cfg.params.get_str("loop").unwrap_or("corpus") {
        "corpus" => loop_corpus(cfg.fill.delta_m, cfg.seed),
        "circle" => {
            let r: f64 = cfg.params.get("radius")?.unwrap_or(0.05);
            vec![(
                "circle".into(),
                circle(Vec3::zeros(), positive("fill.radius", r)?, segments),
            )]
        }
        "lifted" => {
            let r: f64 = cfg.params.get("radius")?.unwrap_or(0.05);
            vec![(
                "lifted".into(),
                lifted_circle_loop(positive("fill.radius", r)?, segments),
            )]
        }
        other => {
            return Err(Error::InvalidValue {
                key: "fill.loop".into(),
                message: format!("`{other}` is not corpus, circle or lifted"),
            })
        }
    };
    let mut table = Table::new(
        "fill",
        &[
            "loop",
            "length",
            "area",
            "area_bound",
            "max_distance",
            "distance_bound",
            "euler",
            "ok",
        ],
    );
    let mut o = Outcome::new(Value::Null);
    let mut failed = Vec::new();
    for (name, gamma) in &loops {
        let (disk, r) = fill_disk(gamma, &cfg.fill)?;
        let chi = disk.euler_characteristic();
        let ok = r.area_ok() && r.distance_ok() && chi == 1 && disk.has_single_boundary_cycle();
        if !ok {
            failed.push(name.clone());
        }
        table.push(row![
            name,
            r.boundary_length,
            r.area,
            r.area_bound,
            r.max_distance,
            r.distance_bound,
            chi,
            ok as u8
        ]);
        let mut buf = Vec::new();
        disk.write_off(&mut buf)?;
        o.files.insert(
            format!("disk_{name}.off"),
            String::from_utf8(buf).expect("off is utf-8"),
        );
    }
    o.outputs = json!({ "loops": loops.len(), "failed": failed });
    o.assertions.push(check(
        "isoperimetric_filling",
        failed.is_empty(),
        format!(
            "{} of {} loops within c_M bounds",
            loops.len() - failed.len(),
            loops.len()
        ),
    ));
    o.tables.push(table);
    Ok(o)
}

/// K (estimated unless overridden), eta (same) and the bundle for `alpha`
/// along the vertical axis through `p`.
fn compute_bundle(
    cfg: &ExperimentConfig,
    alpha: &crate::forms::OneForm,
    p: Vec3,
    axis: &Polyline,
) -> Result<(ConstantsBundle, Value)> {
    let c = &cfg.constants;
    let (k, k_info) = match c.k {
        Some(k) => (k, json!("configured")),
        None => {
            let trials: usize = cfg.params.get("k_trials")?.unwrap_or(1000);
            let est = estimate_k(
                &alpha.normalized(),
                alpha.theta,
                &DiskFamily::admissible(c.sigma),
                trials,
                cfg.seed,
                &cfg.fill,
                c.sigma,
            )?;
            (est.k_hat, json!({ "trials": trials, "k_hat": est.k_hat }))
        }
    };
    let (eta, eta_info) = match c.eta {
        Some(e) => (e, json!("configured")),
        None => {
            let est = estimate_eta(alpha, p, c.delta_m.min(c.sigma), &cfg.optimizer, 16)?;
            (est.eta, serde_json::to_value(&est)?)
        }
    };
    let b = bundle_for(alpha, axis, k, eta, c.c_m, c.delta_m, c.sigma)?;
    Ok((b, json!({ "k": k_info, "eta": eta_info })))
}

fn run_scaling(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (alpha, model) = cfg.model.build()?;
    let p = point(&cfg.params, "p", Vec3::zeros())?;
    let bound = match cfg.params.get_str("bound").unwrap_or("false") {
        "true" => true,
        "false" => false,
        other => {
            return Err(Error::InvalidValue {
                key: "scaling.bound".into(),
                message: format!("`{other}` is not true or false"),
            })
        }
    };
    let mut eps = cfg
        .params
        .get_list("epsilons")?
        .unwrap_or_else(|| vec![0.1, 0.05, 0.02, 0.01]);
    let n = alpha.unit_normal(&p);
    let mut bundle_info = Value::Null;
    let bundle = if bound {
        let probe_axis = Polyline::segment(p, p + n * 0.01)?;
        let (b, info) = compute_bundle(cfg, &alpha, p, &probe_axis)?;
        bundle_info = info;
        if cfg.params.get_str("epsilons").is_none() {
            eps = (0..20).map(|i| b.rho * 0.95 * 0.8f64.powi(i)).collect();
        }
        Some(b)
    } else {
        None
    };
    let height = eps.iter().cloned().fold(0.0, f64::max) * 1.01;
    let axis = Polyline::segment(p, p + Vec3::z() * positive("scaling.epsilons", height)?)?;
    let sin_phi0 = min_sin_angle(&alpha, &axis, 8)?;
    let r = scaling_experiment(&alpha, &axis, &eps, &cfg.optimizer, bundle.as_ref())?;

    let mut table = Table::new(
        "scaling",
        &["epsilon", "d_r", "d_hat", "lower_bound", "violation"],
    );
    let mut explore = Table::new(
        "exploration",
        &["epsilon", "d_hat", "hoelder_ratio", "sqrt_ratio"],
    );
    for row in &r.rows {
        table.push(row![
            row.epsilon,
            row.d_r,
            row.d_hat,
            row.lower_bound.map(|v| v.to_string()).unwrap_or_default(),
            row.violation as u8
        ]);
        explore.push(row![
            row.epsilon,
            row.d_hat,
            row.hoelder_ratio,
            row.sqrt_ratio
        ]);
    }
    let mut o = Outcome::new(json!({
        "model": model.description,
        "theta": r.theta,
        "sin_phi0": sin_phi0,
        "fitted_slope": r.fitted_slope,
        "intercept": r.intercept,
        "r2": r.r2,
        "violations": r.violations,
        "partial": r.partial,
        "flagged": r.flagged,
        "constants_source": bundle_info,
    }));
    o.unconverged = r.unconverged();
    if bundle.is_some() {
        o.assertions.push(check(
            "pointwise_lower_bound",
            r.violations == 0,
            format!("{} violations", r.violations),
        ));
    }
    o.assertions.push(check(
        "fit_quality",
        !r.flagged,
        format!("r2 = {:?} (flagged below 0.98)", r.r2),
    ));
    o.bundle = bundle;
    o.tables.push(table);
    o.tables.push(explore);
    Ok(o)
}

fn run_limits(cfg: &ExperimentConfig) -> Result<Outcome> {
    let c = &cfg.constants;
    let thetas = cfg
        .params
        .get_list("thetas")?
        .unwrap_or_else(|| (0..=99).map(|i| 0.9 + 0.001 * i as f64).collect());
    let base = ConstantsBundle::assemble(BundleInputs {
        theta: 0.5,
        c_m: c.c_m,
        k: c.k.unwrap_or(1.0),
        sin_phi0: c.sin_phi0,
        alpha_norm: c.alpha_norm,
        delta_m: c.delta_m,
        sigma: c.sigma,
        eta: c.eta.unwrap_or(f64::INFINITY),
    })?;
    let t = c1_limit_check(&base, &thetas)?;
    let mut table = Table::new("limits", &["theta", "c"]);
    for (th, v) in t.thetas.iter().zip(&t.values) {
        table.push(row![th, v]);
    }
    table.push(row![1, t.limit]);
    let mut o = Outcome::new(json!({
        "thetas": join_list(&t.thetas),
        "limit": t.limit,
        "last_rel_gap": t.last_rel_gap,
        "monotone": t.monotone,
        "finite": t.finite,
    }));
    o.assertions.push(check("finite", t.finite, String::new()));
    o.assertions
        .push(check("monotone", t.monotone, String::new()));
    let last = *t.thetas.last().unwrap();
    if last >= 0.999 {
        o.assertions.push(check(
            "approaches_smooth_value",
            t.last_rel_gap <= 0.01,
            format!("|C({last}) - C(1)| / C(1) = {}", t.last_rel_gap),
        ));
    }
    o.bundle = Some(base);
    o.tables.push(table);
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_listed() {
        let err = ExperimentConfig::parse(
            "kind = limits\nmodel.thetta = 0.5\nlimits.thetas = 0.9\nbogus = 1\n",
            None,
        )
        .unwrap_err();
        match err {
            Error::UnknownKeys(k) => {
                assert_eq!(k, vec!["bogus".to_string(), "model.thetta".to_string()])
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn theta_range_names_the_field() {
        let err = ExperimentConfig::parse("kind = dist\nmodel.theta = 1.5\n", None).unwrap_err();
        assert!(err.to_string().contains("theta must lie in (0,1)"), "{err}");
    }

    #[test]
    fn section_keys_depend_on_kind() {
        assert!(ExperimentConfig::parse("kind = dist\nprobe.eps = 0.1\n", None).is_err());
        assert!(ExperimentConfig::parse("kind = probe\nprobe.eps = 0.1\n", None).is_ok());
    }

    #[test]
    fn kind_must_agree() {
        assert!(ExperimentConfig::parse("kind = dist\n", Some(ExperimentKind::Probe)).is_err());
        assert!(ExperimentConfig::parse("", Some(ExperimentKind::Probe)).is_ok());
        assert!(matches!(
            ExperimentConfig::parse("", None),
            Err(Error::MissingKey(_))
        ));
    }

    #[test]
    fn echo_reparses_to_the_same_config() {
        let cfg = ExperimentConfig::parse(
            "kind = scaling\nseed = 4\nmodel.kind = perturbed\nconstants.k = 0.2\n",
            None,
        )
        .unwrap();
        let back = ExperimentConfig::parse(&cfg.to_record().to_text(), None).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
    }

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(Table::new("t", &["a", "b"]).to_csv(), "a,b\n");
    }
}
