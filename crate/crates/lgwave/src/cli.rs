//! Command-line front end: a line-oriented configuration format, six
//! subcommands covering every module, deterministic file emission, and
//! machine-readable exit codes.
//!
//! Exit codes: `0` success, `1` domain or usage problems (invalid config,
//! speeds below critical, unknown figures), `2` verification failures (a
//! differential inequality, derivative estimate, or descent check fails),
//! `3` I/O errors. All failures also print a single-line diagnostic.
//!
//! Output files are written under the configured directory with
//! deterministic names built from the subcommand, the kinetics kind, and the
//! key parameters, so repeated runs overwrite rather than accumulate.
//! Emission order is fixed; outputs are byte-identical across runs.

use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::{
    check_condition_p, critical_speed, equilibria, holling_threshold_abar, lv_threshold,
    preyfree_condition, wave_context,
};
use crate::bounds::{build_bounds_scaled, kink_jump_check, kink_report, verify_bounds};
use crate::lyapunov::{
    lyapunov_value, select_rho_novel, select_rho_preyfree, verify_descent, LyapunovKind,
};
use crate::model::{ModelKind, ModelSpec};
use crate::output::{
    fmt17, write_csv, write_summary, write_svg, SvgSeries,
};
use crate::pdesim::{
    default_initial_condition, estimate_spreading_speed, run as pde_run, Boundary, SimConfig,
    Snapshot,
};
use crate::waveode::{
    asymptotic_rates, check_derivative_estimates, classify_tail, monotone_iterate, shoot,
    wave_limit, Profile,
};
use crate::{Error, Result};

/// Name of the environment variable supplying the default output directory.
pub const OUT_DIR_ENV: &str = "LGWAVE_OUT";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    Analyze,
    Bounds,
    Wave,
    Lyapunov,
    Simulate,
    Reproduce,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Analyze => "analyze",
            Subcommand::Bounds => "bounds",
            Subcommand::Wave => "wave",
            Subcommand::Lyapunov => "lyapunov",
            Subcommand::Simulate => "simulate",
            Subcommand::Reproduce => "reproduce",
        }
    }

    fn parse(s: &str) -> Option<Subcommand> {
        Some(match s {
            "analyze" => Subcommand::Analyze,
            "bounds" => Subcommand::Bounds,
            "wave" => Subcommand::Wave,
            "lyapunov" => Subcommand::Lyapunov,
            "simulate" => Subcommand::Simulate,
            "reproduce" => Subcommand::Reproduce,
            _ => return None,
        })
    }
}

/// `[model]` section: kinetics kind and parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelBlock {
    pub kind: Option<String>,
    pub a: Option<f64>,
    pub e1: Option<f64>,
    pub m: Option<f64>,
    pub d: f64,
    pub s: f64,
    pub mu: Option<f64>,
}

impl Default for ModelBlock {
    fn default() -> Self {
        ModelBlock { kind: None, a: None, e1: None, m: None, d: 1.0, s: 0.5, mu: None }
    }
}

impl ModelBlock {
    pub fn build(&self) -> Result<ModelSpec> {
        let kind = self
            .kind
            .as_deref()
            .ok_or_else(|| Error::Validation("model.kind is required".into()))?;
        let need = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| Error::Validation(format!("model.{name} is required for {kind}")))
        };
        let spec = match kind {
            "lotka-volterra" | "lv" => ModelSpec::lotka_volterra(
                need("a", self.a)?,
                self.d,
                self.s,
                need("mu", self.mu)?,
            ),
            "holling2" => ModelSpec::holling2(
                need("a", self.a)?,
                need("e1", self.e1)?,
                self.d,
                self.s,
                need("mu", self.mu)?,
            ),
            "ivlev" => ModelSpec::ivlev(
                need("a", self.a)?,
                need("m", self.m)?,
                self.d,
                self.s,
                need("mu", self.mu)?,
            ),
            other => {
                return Err(Error::Validation(format!(
                    "model.kind must be lotka-volterra, holling2, or ivlev, got {other}"
                )))
            }
        };
        spec.map_err(|e| Error::Validation(e.to_string()))
    }
}

/// `[wave]` section: speed and solver controls.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveBlock {
    pub c: Option<f64>,
    pub delta: f64,
    pub z_span: f64,
    pub step_tol: f64,
    /// `shoot` or `monotone`.
    pub method: String,
}

impl Default for WaveBlock {
    fn default() -> Self {
        WaveBlock {
            c: None,
            delta: 1e-6,
            z_span: 400.0,
            step_tol: 1e-10,
            method: "shoot".into(),
        }
    }
}

/// `[sim]` section mirroring [`SimConfig`].
#[derive(Clone, Debug, PartialEq)]
pub struct SimBlock {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub dt: Option<f64>,
    pub t_end: f64,
    pub snapshot_times: Option<Vec<f64>>,
}

impl Default for SimBlock {
    fn default() -> Self {
        SimBlock {
            x_min: -200.0,
            x_max: 200.0,
            dx: 0.2,
            dt: None,
            t_end: 300.0,
            snapshot_times: None,
        }
    }
}

impl SimBlock {
    fn to_sim_config(&self) -> SimConfig {
        let mut config = SimConfig::defaults(self.t_end);
        config.x_min = self.x_min;
        config.x_max = self.x_max;
        config.dx = self.dx;
        config.dt = self.dt;
        if let Some(times) = &self.snapshot_times {
            config.snapshot_times = times.clone();
        }
        config.boundary = Boundary::NeumannZeroFlux;
        config
    }
}

/// `[bounds]` section: verification grid and constant overrides.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsBlock {
    pub grid: usize,
    pub tol: f64,
    /// Multiplies the selected prey-envelope amplitude; values below 1
    /// deliberately undercut the proven constant to probe the verifier.
    pub sigma_scale: f64,
    pub r_scale: f64,
}

impl Default for BoundsBlock {
    fn default() -> Self {
        BoundsBlock { grid: 100_000, tol: 1e-10, sigma_scale: 1.0, r_scale: 1.0 }
    }
}

/// `[lyapunov]` section: functional choice.
#[derive(Clone, Debug, PartialEq)]
pub struct LyapunovBlock {
    /// `auto`, `coexistence`, `preyfree`, or `novel`.
    pub kind: String,
    pub rho: Option<f64>,
}

impl Default for LyapunovBlock {
    fn default() -> Self {
        LyapunovBlock { kind: "auto".into(), rho: None }
    }
}

/// `[output]` section.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputBlock {
    pub directory: String,
    /// Subset of `{csv, svg}`.
    pub formats: Vec<String>,
    pub verbosity: u32,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            directory: std::env::var(OUT_DIR_ENV).unwrap_or_else(|_| ".".into()),
            formats: vec!["csv".into()],
            verbosity: 1,
        }
    }
}

/// A fully parsed and validated run description.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    /// Target of `reproduce` (`fig1` .. `fig5`).
    pub figure: Option<String>,
    pub model: ModelBlock,
    pub wave: WaveBlock,
    pub sim: SimBlock,
    pub bounds: BoundsBlock,
    pub lyapunov: LyapunovBlock,
    pub output: OutputBlock,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            subcommand: Subcommand::Analyze,
            figure: None,
            model: ModelBlock::default(),
            wave: WaveBlock::default(),
            sim: SimBlock::default(),
            bounds: BoundsBlock::default(),
            lyapunov: LyapunovBlock::default(),
            output: OutputBlock::default(),
        }
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse::<T>().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse {key} value {value:?} as a number"),
    })
}

fn parse_list(line: usize, key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num::<f64>(line, key, s))
        .collect()
}

/// Parse the line-oriented `key = value` configuration format.
///
/// Sections are introduced by `[name]` headers; `#` starts a comment;
/// unknown sections and keys are rejected; a key assigned twice keeps the
/// later value, which is what makes command-line overrides win. After
/// parsing, per-subcommand parameter completeness is validated before any
/// computation.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or(Error::Parse {
                line: lineno,
                msg: "unterminated section header".into(),
            })?;
            match name {
                "run" | "model" | "wave" | "sim" | "bounds" | "lyapunov" | "output" => {
                    section = name.to_string();
                }
                other => {
                    return Err(Error::Validation(format!("unknown section [{other}]")));
                }
            }
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(Error::Parse {
            line: lineno,
            msg: "expected `key = value` or a `[section]` header".into(),
        })?;
        let key = key.trim();
        let value = value.trim();
        if section.is_empty() {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("key {key:?} appears before any [section] header"),
            });
        }
        match (section.as_str(), key) {
            ("run", "subcommand") => {
                cfg.subcommand = Subcommand::parse(value).ok_or_else(|| {
                    Error::Validation(format!("unknown subcommand {value:?}"))
                })?;
            }
            ("run", "figure") => cfg.figure = Some(value.to_string()),
            ("model", "kind") => cfg.model.kind = Some(value.to_string()),
            ("model", "a") => cfg.model.a = Some(parse_num(lineno, key, value)?),
            ("model", "e1") => cfg.model.e1 = Some(parse_num(lineno, key, value)?),
            ("model", "m") => cfg.model.m = Some(parse_num(lineno, key, value)?),
            ("model", "d") => cfg.model.d = parse_num(lineno, key, value)?,
            ("model", "s") => cfg.model.s = parse_num(lineno, key, value)?,
            ("model", "mu") => cfg.model.mu = Some(parse_num(lineno, key, value)?),
            ("wave", "c") => cfg.wave.c = Some(parse_num(lineno, key, value)?),
            ("wave", "delta") => cfg.wave.delta = parse_num(lineno, key, value)?,
            ("wave", "z_span") => cfg.wave.z_span = parse_num(lineno, key, value)?,
            ("wave", "step_tol") => cfg.wave.step_tol = parse_num(lineno, key, value)?,
            ("wave", "method") => cfg.wave.method = value.to_string(),
            ("sim", "x_min") => cfg.sim.x_min = parse_num(lineno, key, value)?,
            ("sim", "x_max") => cfg.sim.x_max = parse_num(lineno, key, value)?,
            ("sim", "dx") => cfg.sim.dx = parse_num(lineno, key, value)?,
            ("sim", "dt") => cfg.sim.dt = Some(parse_num(lineno, key, value)?),
            ("sim", "t_end") => cfg.sim.t_end = parse_num(lineno, key, value)?,
            ("sim", "snapshot_times") => {
                cfg.sim.snapshot_times = Some(parse_list(lineno, key, value)?)
            }
            ("bounds", "grid") => cfg.bounds.grid = parse_num(lineno, key, value)?,
            ("bounds", "tol") => cfg.bounds.tol = parse_num(lineno, key, value)?,
            ("bounds", "sigma_scale") => cfg.bounds.sigma_scale = parse_num(lineno, key, value)?,
            ("bounds", "r_scale") => cfg.bounds.r_scale = parse_num(lineno, key, value)?,
            ("lyapunov", "kind") => cfg.lyapunov.kind = value.to_string(),
            ("lyapunov", "rho") => cfg.lyapunov.rho = Some(parse_num(lineno, key, value)?),
            ("output", "directory") => cfg.output.directory = value.to_string(),
            ("output", "formats") => {
                cfg.output.formats = value
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
            }
            ("output", "verbosity") => cfg.output.verbosity = parse_num(lineno, key, value)?,
            (section, key) => {
                return Err(Error::Validation(format!("unknown key {section}.{key}")));
            }
        }
    }
    validate(&cfg)?;
    Ok(cfg)
}

/// Per-subcommand completeness checks, run before any computation.
fn validate(cfg: &RunConfig) -> Result<()> {
    for f in &cfg.output.formats {
        if f != "csv" && f != "svg" {
            return Err(Error::Validation(format!(
                "output.formats entries must be csv or svg, got {f:?}"
            )));
        }
    }
    match cfg.subcommand {
        Subcommand::Reproduce => {
            let fig = cfg
                .figure
                .as_deref()
                .ok_or_else(|| Error::Validation("run.figure is required for reproduce".into()))?;
            figure_model(fig)?;
        }
        Subcommand::Analyze | Subcommand::Simulate => {
            cfg.model.build()?;
        }
        Subcommand::Bounds | Subcommand::Wave | Subcommand::Lyapunov => {
            cfg.model.build()?;
            if cfg.wave.c.is_none() {
                return Err(Error::Validation(format!(
                    "wave.c is required for {}",
                    cfg.subcommand.name()
                )));
            }
            if cfg.wave.method != "shoot" && cfg.wave.method != "monotone" {
                return Err(Error::Validation(format!(
                    "wave.method must be shoot or monotone, got {:?}",
                    cfg.wave.method
                )));
            }
            if cfg.subcommand == Subcommand::Lyapunov {
                let k = cfg.lyapunov.kind.as_str();
                if !matches!(k, "auto" | "coexistence" | "preyfree" | "novel") {
                    return Err(Error::Validation(format!(
                        "lyapunov.kind must be auto, coexistence, preyfree, or novel, got {k:?}"
                    )));
                }
            }
        }
    }
    Ok(())
}

fn push_opt(out: &mut String, key: &str, v: &Option<f64>) {
    if let Some(x) = v {
        out.push_str(&format!("{key} = {x}\n"));
    }
}

/// Serialize a configuration with all defaults filled, in a fixed section
/// and key order. Parsing the result reproduces the configuration exactly.
pub fn emit_config(cfg: &RunConfig) -> String {
    let mut out = String::new();
    out.push_str("[run]\n");
    out.push_str(&format!("subcommand = {}\n", cfg.subcommand.name()));
    if let Some(f) = &cfg.figure {
        out.push_str(&format!("figure = {f}\n"));
    }
    out.push_str("\n[model]\n");
    if let Some(k) = &cfg.model.kind {
        out.push_str(&format!("kind = {k}\n"));
    }
    push_opt(&mut out, "a", &cfg.model.a);
    push_opt(&mut out, "e1", &cfg.model.e1);
    push_opt(&mut out, "m", &cfg.model.m);
    out.push_str(&format!("d = {}\n", cfg.model.d));
    out.push_str(&format!("s = {}\n", cfg.model.s));
    push_opt(&mut out, "mu", &cfg.model.mu);
    out.push_str("\n[wave]\n");
    push_opt(&mut out, "c", &cfg.wave.c);
    out.push_str(&format!("delta = {}\n", cfg.wave.delta));
    out.push_str(&format!("z_span = {}\n", cfg.wave.z_span));
    out.push_str(&format!("step_tol = {}\n", cfg.wave.step_tol));
    out.push_str(&format!("method = {}\n", cfg.wave.method));
    out.push_str("\n[sim]\n");
    out.push_str(&format!("x_min = {}\n", cfg.sim.x_min));
    out.push_str(&format!("x_max = {}\n", cfg.sim.x_max));
    out.push_str(&format!("dx = {}\n", cfg.sim.dx));
    push_opt(&mut out, "dt", &cfg.sim.dt);
    out.push_str(&format!("t_end = {}\n", cfg.sim.t_end));
    if let Some(times) = &cfg.sim.snapshot_times {
        let joined: Vec<String> = times.iter().map(|t| t.to_string()).collect();
        out.push_str(&format!("snapshot_times = {}\n", joined.join(", ")));
    }
    out.push_str("\n[bounds]\n");
    out.push_str(&format!("grid = {}\n", cfg.bounds.grid));
    out.push_str(&format!("tol = {}\n", cfg.bounds.tol));
    out.push_str(&format!("sigma_scale = {}\n", cfg.bounds.sigma_scale));
    out.push_str(&format!("r_scale = {}\n", cfg.bounds.r_scale));
    out.push_str("\n[lyapunov]\n");
    out.push_str(&format!("kind = {}\n", cfg.lyapunov.kind));
    push_opt(&mut out, "rho", &cfg.lyapunov.rho);
    out.push_str("\n[output]\n");
    out.push_str(&format!("directory = {}\n", cfg.output.directory));
    out.push_str(&format!("formats = {}\n", cfg.output.formats.join(", ")));
    out.push_str(&format!("verbosity = {}\n", cfg.output.verbosity));
    out
}

/// The five reproducible figure scenarios.
pub fn figure_ids() -> [&'static str; 5] {
    ["fig1", "fig2", "fig3", "fig4", "fig5"]
}

/// Model parameters behind each figure id.
pub fn figure_model(id: &str) -> Result<ModelSpec> {
    match id {
        "fig1" => ModelSpec::holling2(1.4, 2.0, 1.0, 0.5, 1.2),
        "fig2" => ModelSpec::holling2(0.7, 1.2, 1.0, 0.5, 1.4),
        "fig3" => ModelSpec::holling2(15.0, 1.2, 1.0, 0.5, 0.5),
        "fig4" => ModelSpec::lotka_volterra(15.0, 1.0, 0.5, 0.1),
        "fig5" => ModelSpec::lotka_volterra(4.5, 1.0, 0.5, 0.1),
        other => Err(Error::Validation(format!(
            "unknown figure {other:?}; expected one of fig1..fig5"
        ))),
    }
}

fn model_tag(model: &ModelSpec) -> String {
    let params = match model.kind {
        ModelKind::LotkaVolterra { a } => format!("a{a}"),
        ModelKind::Holling2 { a, e1 } => format!("a{a}_e1{e1}"),
        ModelKind::Ivlev { a, m } => format!("a{a}_m{m}"),
        ModelKind::Custom(ref k) => k.name.clone(),
    };
    format!(
        "{}_{}_d{}_s{}_mu{}",
        model.kind.label(),
        params,
        model.d,
        model.s,
        model.mu
    )
}

struct Emitter<'a> {
    dir: PathBuf,
    cfg: &'a RunConfig,
}

impl<'a> Emitter<'a> {
    fn new(cfg: &'a RunConfig) -> Result<Self> {
        let dir = PathBuf::from(&cfg.output.directory);
        fs::create_dir_all(&dir)?;
        Ok(Emitter { dir, cfg })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn csv_enabled(&self) -> bool {
        self.cfg.output.formats.iter().any(|f| f == "csv")
    }

    fn svg_enabled(&self) -> bool {
        self.cfg.output.formats.iter().any(|f| f == "svg")
    }

    fn finish(&self, stem: &str, pairs: &[(String, String)]) -> Result<()> {
        write_summary(&self.path(&format!("{stem}_summary.txt")), pairs)?;
        if self.cfg.output.verbosity > 0 {
            for (k, v) in pairs {
                println!("{k} = {v}");
            }
        }
        Ok(())
    }
}

fn kv(key: &str, value: f64) -> (String, String) {
    (key.to_string(), fmt17(value))
}

fn kv_str(key: impl Into<String>, value: impl Into<String>) -> (String, String) {
    (key.into(), value.into())
}

fn analyze_pairs(model: &ModelSpec, c: Option<f64>) -> Vec<(String, String)> {
    let mut pairs = vec![
        kv_str("kind", model.kind.label().to_string()),
        kv("d", model.d),
        kv("s", model.s),
        kv("mu", model.mu),
        kv("c_star", critical_speed(model)),
        kv("q1", model.q(1.0)),
    ];
    let eq = equilibria(model);
    pairs.push(kv("prey_only_u", eq.prey_only[0]));
    pairs.push(kv("prey_free_v", eq.prey_free[1]));
    match eq.coexistence {
        Some([us, vs]) => {
            pairs.push(kv("u_star", us));
            pairs.push(kv("v_star", vs));
        }
        None => pairs.push(kv_str("coexistence", "none")),
    }
    match model.kind {
        ModelKind::Holling2 { e1, .. } => {
            if let Ok(abar) = holling_threshold_abar(e1, model.mu) {
                pairs.push(kv("a_bar", abar));
            }
        }
        ModelKind::LotkaVolterra { .. } => {
            if let Ok(t) = lv_threshold(model.mu) {
                pairs.push(kv("a_tilde", t.a_tilde));
                pairs.push(kv("a_bar", t.a_bar));
            }
        }
        _ => {}
    }
    if let Ok(p) = check_condition_p(model) {
        pairs.push(kv_str("condition_p", if p { "true" } else { "false" }));
    }
    pairs.push(kv_str(
        "preyfree_condition",
        if preyfree_condition(model) { "true" } else { "false" },
    ));
    if let Some(c) = c {
        if let Ok(ctx) = wave_context(model, c) {
            pairs.push(kv("c", c));
            pairs.push(kv_str("critical", if ctx.critical { "true" } else { "false" }));
            pairs.push(kv("lambda1", ctx.lambda1));
            pairs.push(kv("lambda2", ctx.lambda2));
            pairs.push(kv("lambda3", ctx.lambda3));
            pairs.push(kv("lambda4", ctx.lambda4));
        }
    }
    pairs
}

fn cmd_analyze(cfg: &RunConfig) -> Result<i32> {
    let model = cfg.model.build()?;
    let em = Emitter::new(cfg)?;
    let pairs = analyze_pairs(&model, cfg.wave.c);
    em.finish(&format!("analyze_{}", model_tag(&model)), &pairs)?;
    Ok(0)
}

fn cmd_bounds(cfg: &RunConfig) -> Result<i32> {
    let model = cfg.model.build()?;
    let c = cfg.wave.c.unwrap();
    let pair = build_bounds_scaled(&model, c, cfg.bounds.sigma_scale, cfg.bounds.r_scale)?;
    let (z_lo, z_hi) = (pair.z1 - 40.0, 40.0);
    let report = verify_bounds(&pair, z_lo, z_hi, cfg.bounds.grid, cfg.bounds.tol);
    let kinks = kink_report(&pair);
    let kinks_ok = kink_jump_check(&pair);
    let em = Emitter::new(cfg)?;
    let stem = format!("bounds_{}_c{}", model_tag(&model), c);

    if em.csv_enabled() {
        let n = 2001;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let z = z_lo + (z_hi - z_lo) * i as f64 / (n - 1) as f64;
                let vals = pair.inequality_values(z);
                vec![z, vals[0], vals[1], vals[2], vals[3]]
            })
            .collect();
        write_csv(
            &em.path(&format!("{stem}.csv")),
            &["z", "prey_upper", "prey_lower", "predator_upper", "predator_lower"],
            &rows,
        )?;
    }

    let mut pairs = vec![
        kv("c", c),
        kv_str("case", format!("{:?}", pair.case)),
        kv("z1", pair.z1),
        kv("z2", pair.z2),
        kv("kink0", pair.kink0),
        kv("sigma", pair.sigma),
        kv("r", pair.r),
        kv_str("grid", report.n_grid.to_string()),
        kv("tol", report.tol),
    ];
    for check in &report.checks {
        pairs.push(kv(&format!("worst_{}", check.label), check.worst));
        pairs.push(kv_str(
            format!("pass_{}", check.label),
            if check.pass { "true" } else { "false" },
        ));
    }
    for k in &kinks {
        pairs.push(kv_str(
            format!("kink_{}", k.which),
            if k.ok { "true" } else { "false" },
        ));
    }
    let all_ok = report.all_pass() && kinks_ok;
    pairs.push(kv_str("pass", if all_ok { "true" } else { "false" }));
    em.finish(&stem, &pairs)?;
    Ok(if all_ok { 0 } else { 2 })
}

fn compute_profile(cfg: &RunConfig, model: &ModelSpec, c: f64) -> Result<Profile> {
    if cfg.wave.method == "monotone" {
        let pair = build_bounds_scaled(model, c, 1.0, 1.0)?;
        let outcome = monotone_iterate(model, c, &pair, 2000, 1e-8)?;
        Ok(outcome.profile)
    } else {
        shoot(model, c, cfg.wave.delta, cfg.wave.z_span, cfg.wave.step_tol)
    }
}

fn profile_rows(profile: &Profile) -> Vec<Vec<f64>> {
    profile
        .z
        .iter()
        .zip(&profile.states)
        .map(|(&z, s)| vec![z, s[0], s[1], s[2], s[3]])
        .collect()
}

fn cmd_wave(cfg: &RunConfig) -> Result<i32> {
    let model = cfg.model.build()?;
    let c = cfg.wave.c.unwrap();
    let profile = compute_profile(cfg, &model, c)?;
    let em = Emitter::new(cfg)?;
    let stem = format!("wave_{}_c{}_{}", model_tag(&model), c, cfg.wave.method);

    if em.csv_enabled() {
        write_csv(
            &em.path(&format!("{stem}.csv")),
            &["z", "u", "w", "v", "y"],
            &profile_rows(&profile),
        )?;
    }
    if em.svg_enabled() {
        let u: Vec<f64> = profile.states.iter().map(|s| s[0]).collect();
        let v: Vec<f64> = profile.states.iter().map(|s| s[2]).collect();
        let q1 = model.q(1.0);
        write_svg(
            &em.path(&format!("{stem}.svg")),
            &format!("wave profile, c = {c}"),
            &profile.z,
            &[
                SvgSeries { label: "u", ys: &u, color: "#1f77b4" },
                SvgSeries { label: "v", ys: &v, color: "#d62728" },
            ],
            (profile.z[0], *profile.z.last().unwrap()),
            (0.0, q1.max(1.0) * 1.05),
        )?;
    }

    let residual = profile.residual(&model);
    let (limit, matched) = wave_limit(&profile, &model, 0.1);
    let tail = classify_tail(&profile, &model);
    let estimates = check_derivative_estimates(&profile, &model)?;
    let mut pairs = vec![
        kv("c", c),
        kv_str("method", cfg.wave.method.clone()),
        kv_str("nodes", profile.len().to_string()),
        kv("residual", residual),
        kv("limit_u", limit[0]),
        kv("limit_v", limit[1]),
        kv_str(
            "limit_state",
            matched.map_or("none".to_string(), |k| format!("{k:?}")),
        ),
        kv_str("tail_class", format!("{:?}", tail.class)),
        kv_str(
            "prey_slope_negative",
            if tail.w_all_negative { "true" } else { "false" },
        ),
        kv_str("lemma42", if estimates.lemma42_ok { "true" } else { "false" }),
        kv_str("lemma43", if estimates.lemma43_ok { "true" } else { "false" }),
        kv_str("set_d", if estimates.set_d_ok { "true" } else { "false" }),
    ];
    if let Ok(rates) = asymptotic_rates(&profile, &model, (profile.z[0], profile.z[0] + 10.0)) {
        pairs.push(kv("tail_rate_v", rates.rate_v));
        pairs.push(kv("tail_rate_u", rates.rate_u));
        pairs.push(kv("lambda1", rates.lambda1));
    }
    let ok = estimates.lemma42_ok && estimates.lemma43_ok && estimates.set_d_ok;
    pairs.push(kv_str("pass", if ok { "true" } else { "false" }));
    em.finish(&stem, &pairs)?;
    Ok(if ok { 0 } else { 2 })
}

/// Pick the descent functional for a model: the coexistence construction
/// where its convexity condition certifies it, the sharper quadratic-form
/// one for Lotka-Volterra kinetics, and the prey-free one under strong
/// predation.
fn auto_kind(model: &ModelSpec) -> Result<(&'static str, LyapunovKind)> {
    if check_condition_p(model).unwrap_or(false) {
        return Ok(("coexistence", LyapunovKind::Coexistence));
    }
    if let Ok(rho) = select_rho_novel(model) {
        return Ok(("novel", LyapunovKind::LotkaVolterraNovel { rho }));
    }
    if preyfree_condition(model) {
        let rho = select_rho_preyfree(model)?;
        return Ok(("preyfree", LyapunovKind::PreyFree { rho }));
    }
    Err(Error::Precondition(
        "no descent functional applies: the convexity condition, the quadratic-form band, \
         and the strong-predation condition all fail"
            .into(),
    ))
}

fn cmd_lyapunov(cfg: &RunConfig) -> Result<i32> {
    let model = cfg.model.build()?;
    let c = cfg.wave.c.unwrap();
    let (kind_name, kind) = match cfg.lyapunov.kind.as_str() {
        "auto" => auto_kind(&model)?,
        "coexistence" => ("coexistence", LyapunovKind::Coexistence),
        "preyfree" => {
            let rho = match cfg.lyapunov.rho {
                Some(r) => r,
                None => select_rho_preyfree(&model)?,
            };
            ("preyfree", LyapunovKind::PreyFree { rho })
        }
        "novel" => {
            let rho = match cfg.lyapunov.rho {
                Some(r) => r,
                None => select_rho_novel(&model)?,
            };
            ("novel", LyapunovKind::LotkaVolterraNovel { rho })
        }
        _ => unreachable!("validated"),
    };
    let profile = compute_profile(cfg, &model, c)?;
    let report = verify_descent(&kind, &model, &profile)?;
    let em = Emitter::new(cfg)?;
    let stem = format!("lyapunov_{}_{}_c{}", kind_name, model_tag(&model), c);

    if em.csv_enabled() {
        let rows: Vec<Vec<f64>> = profile
            .z
            .iter()
            .zip(&profile.states)
            .map(|(&z, s)| {
                let (l, lp) = lyapunov_value(&kind, &model, profile.c, *s)?;
                Ok(vec![z, l, lp])
            })
            .collect::<Result<_>>()?;
        write_csv(
            &em.path(&format!("{stem}.csv")),
            &["z", "lyapunov", "lyapunov_rate"],
            &rows,
        )?;
    }

    let mut pairs = vec![
        kv("c", c),
        kv_str("kind", kind_name),
        kv_str("nodes", profile.len().to_string()),
        kv("worst_increase", report.worst_increase.0),
        kv("worst_increase_z", report.worst_increase.1),
        kv("worst_rate", report.worst_lprime.0),
        kv("worst_rate_z", report.worst_lprime.1),
        kv_str("monotone", if report.l_ok { "true" } else { "false" }),
        kv_str("rate_nonpositive", if report.lprime_ok { "true" } else { "false" }),
        kv_str("inside_region", if report.d_ok { "true" } else { "false" }),
        kv_str("pass", if report.pass { "true" } else { "false" }),
    ];
    match kind {
        LyapunovKind::PreyFree { rho } | LyapunovKind::LotkaVolterraNovel { rho } => {
            pairs.insert(2, kv("rho", rho));
        }
        LyapunovKind::Coexistence => {}
    }
    em.finish(&stem, &pairs)?;
    Ok(if report.pass { 0 } else { 2 })
}

fn snapshot_outputs(
    em: &Emitter<'_>,
    stem: &str,
    model: &ModelSpec,
    snaps: &[Snapshot],
    emit_times: Option<&[f64]>,
) -> Result<()> {
    let q1 = model.q(1.0);
    for snap in snaps {
        if let Some(times) = emit_times {
            if !times.iter().any(|&t| (t - snap.t).abs() < 1e-6) {
                continue;
            }
        }
        let tag = format!("{stem}_t{}", snap.t);
        if em.csv_enabled() {
            let rows: Vec<Vec<f64>> = (0..snap.x.len())
                .map(|i| vec![snap.x[i], snap.u[i], snap.v[i]])
                .collect();
            write_csv(&em.path(&format!("{tag}.csv")), &["x", "u", "v"], &rows)?;
        }
        if em.svg_enabled() {
            write_svg(
                &em.path(&format!("{tag}.svg")),
                &format!("t = {}", snap.t),
                &snap.x,
                &[
                    SvgSeries { label: "u", ys: &snap.u, color: "#1f77b4" },
                    SvgSeries { label: "v", ys: &snap.v, color: "#d62728" },
                ],
                (snap.x[0], *snap.x.last().unwrap()),
                (0.0, q1.max(1.0) * 1.05),
            )?;
        }
    }
    Ok(())
}

fn invariant_margins(snaps: &[Snapshot], q1: f64) -> (f64, f64) {
    let mut u_excess = 0.0_f64;
    let mut v_excess = 0.0_f64;
    for s in snaps {
        for &u in &s.u {
            u_excess = u_excess.max(-u).max(u - 1.0);
        }
        for &v in &s.v {
            v_excess = v_excess.max(-v).max(v - q1);
        }
    }
    (u_excess, v_excess)
}

fn cmd_simulate(cfg: &RunConfig) -> Result<i32> {
    let model = cfg.model.build()?;
    let sim = cfg.sim.to_sim_config();
    let (u0, v0) = default_initial_condition(&sim);
    let snaps = pde_run(&model, &sim, &u0, &v0)?;
    let em = Emitter::new(cfg)?;
    let stem = format!("simulate_{}", model_tag(&model));
    snapshot_outputs(&em, &stem, &model, &snaps, None)?;

    let q1 = model.q(1.0);
    let (u_excess, v_excess) = invariant_margins(&snaps, q1);
    let mut pairs = vec![
        kv("t_end", sim.t_end),
        kv("dx", sim.dx),
        kv("dt", sim.effective_dt(model.d)),
        kv_str("snapshots", snaps.len().to_string()),
        kv("invariant_excess_u", u_excess),
        kv("invariant_excess_v", v_excess),
        kv("c_star", critical_speed(&model)),
    ];
    if let Ok((speed, r2)) = estimate_spreading_speed(&snaps, &model, sim.t_end / 3.0) {
        pairs.push(kv("speed", speed));
        pairs.push(kv("speed_r2", r2));
    }
    em.finish(&format!("{stem}_summary_run"), &pairs)?;
    Ok(0)
}

/// Snapshot times displayed for every reproduced figure.
pub const FIGURE_TIMES: [f64; 4] = [0.0, 60.0, 120.0, 180.0];

fn cmd_reproduce(cfg: &RunConfig) -> Result<i32> {
    let fig = cfg.figure.as_deref().unwrap();
    let model = figure_model(fig)?;
    // Wider window than the display default so the front stays clear of the
    // left boundary for the whole measured interval.
    let mut times: Vec<f64> = FIGURE_TIMES.to_vec();
    let mut t = 90.0;
    while t <= 180.0 {
        times.push(t);
        t += 10.0;
    }
    times.sort_by(f64::total_cmp);
    times.dedup();
    let sim = SimConfig {
        x_min: -400.0,
        x_max: 200.0,
        dx: 0.2,
        dt: None,
        t_end: 180.0,
        snapshot_times: times,
        boundary: Boundary::NeumannZeroFlux,
    };
    let (u0, v0) = default_initial_condition(&sim);
    let snaps = pde_run(&model, &sim, &u0, &v0)?;
    let em = Emitter::new(cfg)?;
    let stem = format!("reproduce_{fig}");
    snapshot_outputs(&em, &stem, &model, &snaps, Some(&FIGURE_TIMES))?;

    let eq = equilibria(&model);
    let expected = eq.coexistence.unwrap_or(eq.prey_free);
    let last = snaps.last().unwrap();
    let j = last
        .x
        .iter()
        .position(|&x| x >= 150.0)
        .expect("domain contains x = 150");
    let behind = [last.u[j], last.v[j]];
    let gap = (behind[0] - expected[0])
        .abs()
        .max((behind[1] - expected[1]).abs());
    let (speed, r2) = estimate_spreading_speed(&snaps, &model, 80.0)?;

    let mut pairs = analyze_pairs(&model, None);
    pairs.push(kv_str("figure", fig));
    pairs.push(kv("behind_front_u", behind[0]));
    pairs.push(kv("behind_front_v", behind[1]));
    pairs.push(kv("expected_u", expected[0]));
    pairs.push(kv("expected_v", expected[1]));
    pairs.push(kv("behind_front_gap", gap));
    pairs.push(kv("speed", speed));
    pairs.push(kv("speed_r2", r2));
    let ok = gap <= 1e-2;
    pairs.push(kv_str("pass", if ok { "true" } else { "false" }));
    em.finish(&stem, &pairs)?;
    Ok(if ok { 0 } else { 2 })
}

/// Execute a validated configuration: dispatch to the owning module, write
/// the outputs, and return the process exit code.
pub fn run_subcommand(cfg: &RunConfig) -> i32 {
    let result = match cfg.subcommand {
        Subcommand::Analyze => cmd_analyze(cfg),
        Subcommand::Bounds => cmd_bounds(cfg),
        Subcommand::Wave => cmd_wave(cfg),
        Subcommand::Lyapunov => cmd_lyapunov(cfg),
        Subcommand::Simulate => cmd_simulate(cfg),
        Subcommand::Reproduce => cmd_reproduce(cfg),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

const USAGE: &str = "usage: lgwave <subcommand> [figN] [--config FILE] [section.key=value ...]
subcommands: analyze, bounds, wave, lyapunov, simulate, reproduce
examples:
  lgwave analyze model.kind=holling2 model.a=1.4 model.e1=2 model.mu=1.2
  lgwave wave --config run.cfg wave.c=1.5
  lgwave reproduce fig1 output.directory=out";

/// Assemble a configuration from command-line arguments and run it.
///
/// The first positional argument is the subcommand; for `reproduce` a
/// second positional names the figure. `--config FILE` loads a base
/// configuration; `section.key=value` arguments are appended after it, so
/// they win over file values.
pub fn main_from_args(args: &[String]) -> i32 {
    match build_config_text(args) {
        Ok(None) => {
            println!("{USAGE}");
            0
        }
        Ok(Some(text)) => match parse_config(&text) {
            Ok(cfg) => run_subcommand(&cfg),
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("{USAGE}");
            e.exit_code()
        }
    }
}

fn build_config_text(args: &[String]) -> Result<Option<String>> {
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" {
        return Ok(None);
    }
    let sub = &args[0];
    if Subcommand::parse(sub).is_none() {
        return Err(Error::Validation(format!("unknown subcommand {sub:?}")));
    }
    let mut base = String::new();
    let mut overrides = vec![format!("[run]\nsubcommand = {sub}")];
    let mut i = 1;
    while i < args.len() {
        let arg = &args[i];
        if arg == "--config" {
            let path = args.get(i + 1).ok_or_else(|| {
                Error::Validation("--config requires a file path".into())
            })?;
            base = fs::read_to_string(Path::new(path))?;
            i += 2;
        } else if let Some((key, value)) = arg.split_once('=') {
            let (section, key) = key.split_once('.').ok_or_else(|| {
                Error::Validation(format!(
                    "override {arg:?} must look like section.key=value"
                ))
            })?;
            overrides.push(format!("[{section}]\n{key} = {value}"));
            i += 1;
        } else if i == 1 && sub == "reproduce" {
            overrides.push(format!("[run]\nfigure = {arg}"));
            i += 1;
        } else {
            return Err(Error::Validation(format!("unexpected argument {arg:?}")));
        }
    }
    Ok(Some(format!("{base}\n{}\n", overrides.join("\n"))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use tempfile::tempdir;

    fn fig1_text(dir: &str) -> String {
        format!(
            "[model]\nkind = holling2\na = 1.4\ne1 = 2\nmu = 1.2\nd = 1\ns = 0.5\n\
             [output]\ndirectory = {dir}\n"
        )
    }

    #[test]
    fn parses_the_reference_parameter_block() {
        let cfg = parse_config(
            "[model]\nkind = holling2\na = 1.4\ne1 = 2\nmu = 1.2\nd = 1\ns = 0.5",
        )
        .unwrap();
        assert_eq!(cfg.subcommand, Subcommand::Analyze);
        let m = cfg.model.build().unwrap();
        assert!(matches!(m.kind, ModelKind::Holling2 { a, e1 } if a == 1.4 && e1 == 2.0));
        assert_eq!(m.mu, 1.2);
        assert_eq!(cfg.wave.delta, 1e-6);
        assert_eq!(cfg.bounds.grid, 100_000);
    }

    #[test]
    fn empty_config_reports_the_missing_kind() {
        let err = parse_config("").unwrap_err();
        assert!(matches!(&err, Error::Validation(m) if m.contains("model.kind")), "{err}");
    }

    #[test]
    fn negative_parameter_is_a_validation_error() {
        let err = parse_config("[model]\nkind = holling2\na = -1\ne1 = 2\nmu = 1.2").unwrap_err();
        assert!(matches!(&err, Error::Validation(m) if m.contains("positive")), "{err}");
    }

    #[test]
    fn unknown_keys_sections_and_syntax_errors_are_located() {
        let err = parse_config("[model]\nbogus = 3").unwrap_err();
        assert!(matches!(&err, Error::Validation(m) if m.contains("model.bogus")), "{err}");

        let err = parse_config("[warp]\n").unwrap_err();
        assert!(matches!(&err, Error::Validation(m) if m.contains("warp")), "{err}");

        let err = parse_config("[model]\nkind = lv\nnot a pair\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");

        let err = parse_config("[model]\na = fast\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");

        let err = parse_config("kind = lv\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err:?}");
    }

    #[test]
    fn wave_subcommand_requires_a_speed() {
        let err = parse_config(
            "[run]\nsubcommand = wave\n[model]\nkind = lv\na = 4.5\nmu = 0.1",
        )
        .unwrap_err();
        assert!(matches!(&err, Error::Validation(m) if m.contains("wave.c")), "{err}");
    }

    #[test]
    fn emitted_config_round_trips() {
        let text = "\
[run]
subcommand = simulate
[model]
kind = ivlev
a = 2.5
m = 1.1
mu = 0.7
d = 2
s = 0.25
[sim]
t_end = 40
snapshot_times = 0, 20, 40
dt = 0.001
[output]
directory = /tmp/somewhere
formats = csv, svg
verbosity = 2
";
        let cfg = parse_config(text).unwrap();
        let emitted = emit_config(&cfg);
        let cfg2 = parse_config(&emitted).unwrap();
        assert_eq!(cfg, cfg2);
        // Defaults were filled in on the way through.
        assert!(emitted.contains("z_span = 400"));
        assert!(emitted.contains("sigma_scale = 1"));
    }

    #[test]
    fn later_assignments_win() {
        let cfg = parse_config("[wave]\nc = 1.5\nc = 2.5\n[model]\nkind = lv\na = 1\nmu = 0.5")
            .unwrap();
        assert_eq!(cfg.wave.c, Some(2.5));
    }

    #[test]
    fn figure_registry_matches_the_published_scenarios() {
        for id in figure_ids() {
            figure_model(id).unwrap();
        }
        assert!(figure_model("fig9").is_err());

        // The second scenario has the exact rational coexistence state.
        let m = figure_model("fig2").unwrap();
        let [us, vs] = crate::analysis::positive_equilibrium(&m).unwrap();
        assert_relative_eq!(us, 0.2, epsilon = 1e-10);
        assert_relative_eq!(vs, 1.6, epsilon = 1e-10);

        // The fourth has no coexistence state at all: prey dies out.
        let m = figure_model("fig4").unwrap();
        assert!(crate::analysis::positive_equilibrium(&m).is_none());
    }

    #[test]
    fn analyze_writes_the_reference_table() {
        let dir = tempdir().unwrap();
        let text = fig1_text(dir.path().to_str().unwrap());
        let cfg = parse_config(&text).unwrap();
        assert_eq!(run_subcommand(&cfg), 0);
        let summary = std::fs::read_to_string(
            dir.path().join("analyze_holling2_a1.4_e12_d1_s0.5_mu1.2_summary.txt"),
        )
        .unwrap();
        let get = |k: &str| -> f64 {
            summary
                .lines()
                .find(|l| l.starts_with(&format!("{k} = ")))
                .unwrap_or_else(|| panic!("{k} missing in {summary}"))
                .split(" = ")
                .nth(1)
                .unwrap()
                .parse()
                .unwrap()
        };
        assert_relative_eq!(get("u_star"), 0.1266, epsilon = 1e-3);
        assert_relative_eq!(get("v_star"), 1.3266, epsilon = 1e-3);
        assert_relative_eq!(get("a_bar"), 1.4373, epsilon = 1e-3);
        assert_relative_eq!(get("c_star"), 2.0_f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn subcritical_speed_exits_with_domain_code() {
        let dir = tempdir().unwrap();
        let text = format!(
            "[run]\nsubcommand = wave\n[wave]\nc = 1.0\n{}",
            fig1_text(dir.path().to_str().unwrap())
        );
        let cfg = parse_config(&text).unwrap();
        assert_eq!(run_subcommand(&cfg), 1);
    }

    #[test]
    fn undercut_envelope_constant_exits_with_verification_code() {
        let dir = tempdir().unwrap();
        let text = format!(
            "[run]\nsubcommand = bounds\n[wave]\nc = 2.0\n[bounds]\nsigma_scale = 0.2\ngrid = 20000\n{}",
            fig1_text(dir.path().to_str().unwrap())
        );
        let cfg = parse_config(&text).unwrap();
        assert_eq!(run_subcommand(&cfg), 2);

        // At the proven constants the same verification passes.
        let text = format!(
            "[run]\nsubcommand = bounds\n[wave]\nc = 2.0\n[bounds]\ngrid = 20000\n{}",
            fig1_text(dir.path().to_str().unwrap())
        );
        let cfg = parse_config(&text).unwrap();
        assert_eq!(run_subcommand(&cfg), 0);
    }

    #[test]
    fn io_failure_exits_with_io_code() {
        let text = "[run]\nsubcommand = analyze\n[model]\nkind = lv\na = 4.5\nmu = 0.1\n\
                    [output]\ndirectory = /dev/null/nope";
        let cfg = parse_config(text).unwrap();
        assert_eq!(run_subcommand(&cfg), 3);
    }

    #[test]
    fn simulate_outputs_are_byte_identical_across_runs() {
        let dir_a = tempdir().unwrap();
        let dir_b = tempdir().unwrap();
        let base = "[run]\nsubcommand = simulate\n[model]\nkind = holling2\na = 1.4\ne1 = 2\nmu = 1.2\n\
                    [sim]\nt_end = 5\nsnapshot_times = 0, 5\n[output]\nformats = csv, svg\ndirectory = ";
        for dir in [&dir_a, &dir_b] {
            let cfg =
                parse_config(&format!("{base}{}", dir.path().to_str().unwrap())).unwrap();
            assert_eq!(run_subcommand(&cfg), 0);
        }
        for name in [
            "simulate_holling2_a1.4_e12_d1_s0.5_mu1.2_t0.csv",
            "simulate_holling2_a1.4_e12_d1_s0.5_mu1.2_t5.csv",
            "simulate_holling2_a1.4_e12_d1_s0.5_mu1.2_t5.svg",
        ] {
            let a = std::fs::read(dir_a.path().join(name)).unwrap();
            let b = std::fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between runs");
        }
    }

    #[test]
    fn command_line_overrides_beat_config_files() {
        let dir = tempdir().unwrap();
        let cfg_path = dir.path().join("base.cfg");
        std::fs::write(&cfg_path, fig1_text(dir.path().to_str().unwrap())).unwrap();
        let args: Vec<String> = [
            "analyze",
            "--config",
            cfg_path.to_str().unwrap(),
            "model.a=0.7",
            "model.e1=1.2",
            "model.mu=1.4",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        assert_eq!(main_from_args(&args), 0);
        // The overridden parameter set is the one whose summary exists.
        assert!(dir
            .path()
            .join("analyze_holling2_a0.7_e11.2_d1_s0.5_mu1.4_summary.txt")
            .exists());
    }

    #[test]
    fn usage_is_printed_without_arguments() {
        assert_eq!(main_from_args(&[]), 0);
        assert_eq!(main_from_args(&["--help".to_string()]), 0);
        assert_eq!(main_from_args(&["warp".to_string()]), 1);
    }
}
