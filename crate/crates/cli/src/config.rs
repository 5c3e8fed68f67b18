//! `key = value` run configuration.
//!
//! Every key is optional; omitted keys take the defaults listed in
//! [`RunConfig::default`], except `r_min` (0 for euclidean, 1 for cone, the
//! bolt `a` for eguchi_hanson) and `gamma_order` (1, or 2 for cone).

use std::fmt::{self, Write as _};
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Background {
    Euclidean,
    Cone,
    EguchiHanson,
}

impl Background {
    pub fn name(self) -> &'static str {
        match self {
            Background::Euclidean => "euclidean",
            Background::Cone => "cone",
            Background::EguchiHanson => "eguchi_hanson",
        }
    }
    const ALL: [Background; 3] = [Background::Euclidean, Background::Cone, Background::EguchiHanson];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitFamily {
    Zero,
    Gaussian,
    TracelessBump,
    SlowTail,
    TracelessTail,
    Step,
    /// Lowest kernel candidate of the spectral preflight, scaled to `amp`.
    Kernel,
}

impl InitFamily {
    pub fn name(self) -> &'static str {
        match self {
            InitFamily::Zero => "zero",
            InitFamily::Gaussian => "gaussian",
            InitFamily::TracelessBump => "traceless_bump",
            InitFamily::SlowTail => "slow_tail",
            InitFamily::TracelessTail => "traceless_tail",
            InitFamily::Step => "step",
            InitFamily::Kernel => "kernel",
        }
    }
    pub const ALL: [InitFamily; 7] = [
        InitFamily::Zero,
        InitFamily::Gaussian,
        InitFamily::TracelessBump,
        InitFamily::SlowTail,
        InitFamily::TracelessTail,
        InitFamily::Step,
        InitFamily::Kernel,
    ];
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: String,
    pub background: Background,
    pub n: usize,
    pub gamma_order: usize,
    /// Bolt parameter (eguchi_hanson).
    pub a: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub nodes: usize,
    pub stretch: f64,
    pub init: InitFamily,
    pub amp: f64,
    /// Bump width; the jump radius for `step`.
    pub width: f64,
    pub center: f64,
    /// Decay power for `traceless_tail`.
    pub power: f64,
    pub delta_ball: f64,
    pub t_max: f64,
    pub tol_conv: f64,
    /// Relative to `‖h(mono_from)‖²_{L²}`.
    pub tol_mono: f64,
    pub safety: f64,
    pub t0: f64,
    pub ratio: f64,
    pub max_steps: usize,
    pub spectral: bool,
    pub eigen_count: usize,
    pub tol_kern: f64,
    pub hardy: bool,
    pub flow: bool,
    pub decay_window: (f64, f64),
    pub smoothing_window: (f64, f64),
    /// `(t, r)` pairs for the parabolic mean-value check.
    pub meanvalue_pairs: Vec<(f64, f64)>,
    /// Start of the monotonicity window.
    pub mono_from: f64,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: "custom".into(),
            background: Background::Euclidean,
            n: 4,
            gamma_order: 1,
            a: 1.0,
            r_min: 0.0,
            r_max: 40.0,
            nodes: 201,
            stretch: 1.0,
            init: InitFamily::Gaussian,
            amp: 1e-2,
            width: 2.0,
            center: 0.0,
            power: 2.2,
            delta_ball: 0.1,
            t_max: 10.0,
            tol_conv: 1e-8,
            tol_mono: 1e-8,
            safety: 0.9,
            t0: 1e-2,
            ratio: 1.3,
            max_steps: 5_000_000,
            spectral: true,
            eigen_count: 4,
            tol_kern: 1e-6,
            hardy: false,
            flow: true,
            decay_window: (1.0, 1e3),
            smoothing_window: (1e-4, 1e-2),
            meanvalue_pairs: Vec::new(),
            mono_from: 1.0,
            out_dir: PathBuf::from("aleflow-out"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    /// 1-based line, 0 when the problem is not tied to one line.
    pub line: usize,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: key `{}`: {}", self.line, self.key, self.message)
        } else {
            write!(f, "key `{}`: {}", self.key, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

pub const KEYS: [&str; 34] = [
    "scenario",
    "background",
    "n",
    "gamma_order",
    "a",
    "r_min",
    "r_max",
    "nodes",
    "stretch",
    "init",
    "amp",
    "width",
    "center",
    "power",
    "delta_ball",
    "t_max",
    "tol_conv",
    "tol_mono",
    "safety",
    "t0",
    "ratio",
    "max_steps",
    "spectral",
    "eigen_count",
    "tol_kern",
    "hardy",
    "flow",
    "decay_window",
    "smoothing_window",
    "meanvalue_pairs",
    "mono_from",
    "out_dir",
    // Aliases of `a` and `nodes`.
    "bolt",
    "N",
];

fn parse_f64(v: &str) -> Result<f64, String> {
    let x: f64 = v.parse().map_err(|_| format!("expected a number, got `{v}`"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("expected a finite number, got `{v}`"))
    }
}

fn parse_usize(v: &str) -> Result<usize, String> {
    v.parse().map_err(|_| format!("expected a non-negative integer, got `{v}`"))
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected true or false, got `{v}`")),
    }
}

fn parse_window(v: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [lo, hi] => Ok((parse_f64(lo)?, parse_f64(hi)?)),
        _ => Err(format!("expected `lo, hi`, got `{v}`")),
    }
}

fn parse_pairs(v: &str) -> Result<Vec<(f64, f64)>, String> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|p| {
            let (t, r) = p.trim().split_once(':').ok_or_else(|| format!("expected `t:r` pairs, got `{p}`"))?;
            Ok((parse_f64(t.trim())?, parse_f64(r.trim())?))
        })
        .collect()
}

fn pick<T>(names: &[(T, &'static str)], v: &str) -> Result<T, String>
where
    T: Copy,
{
    names.iter().find(|(_, n)| *n == v).map(|(x, _)| *x).ok_or_else(|| {
        let opts: Vec<&str> = names.iter().map(|(_, n)| *n).collect();
        format!("expected one of {}, got `{v}`", opts.join(", "))
    })
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut c = RunConfig::default();
    let mut seen: Vec<(&str, usize)> = Vec::new();
    let err = |line: usize, key: &str, message: String| ConfigError { line, key: key.into(), message };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (k, v) = body
            .split_once('=')
            .ok_or_else(|| err(line, body, "expected `key = value`".into()))?;
        let (k, v) = (k.trim(), v.trim());
        let key = KEYS.iter().find(|&&name| name == k).copied().ok_or_else(|| err(line, k, "unknown key".into()))?;
        if let Some((_, prev)) = seen.iter().find(|(s, _)| *s == key) {
            return Err(err(line, key, format!("duplicate key (first set on line {prev})")));
        }
        seen.push((key, line));
        let backgrounds: Vec<(Background, &str)> = Background::ALL.iter().map(|&b| (b, b.name())).collect();
        let inits: Vec<(InitFamily, &str)> = InitFamily::ALL.iter().map(|&f| (f, f.name())).collect();
        let res: Result<(), String> = (|| {
            match key {
                "scenario" => c.scenario = v.to_string(),
                "background" => c.background = pick(&backgrounds, v)?,
                "n" => c.n = parse_usize(v)?,
                "gamma_order" => c.gamma_order = parse_usize(v)?,
                "a" | "bolt" => c.a = parse_f64(v)?,
                "r_min" => c.r_min = parse_f64(v)?,
                "r_max" => c.r_max = parse_f64(v)?,
                "nodes" | "N" => c.nodes = parse_usize(v)?,
                "stretch" => c.stretch = parse_f64(v)?,
                "init" => c.init = pick(&inits, v)?,
                "amp" => c.amp = parse_f64(v)?,
                "width" => c.width = parse_f64(v)?,
                "center" => c.center = parse_f64(v)?,
                "power" => c.power = parse_f64(v)?,
                "delta_ball" => c.delta_ball = parse_f64(v)?,
                "t_max" => c.t_max = parse_f64(v)?,
                "tol_conv" => c.tol_conv = parse_f64(v)?,
                "tol_mono" => c.tol_mono = parse_f64(v)?,
                "safety" => c.safety = parse_f64(v)?,
                "t0" => c.t0 = parse_f64(v)?,
                "ratio" => c.ratio = parse_f64(v)?,
                "max_steps" => c.max_steps = parse_usize(v)?,
                "spectral" => c.spectral = parse_bool(v)?,
                "eigen_count" => c.eigen_count = parse_usize(v)?,
                "tol_kern" => c.tol_kern = parse_f64(v)?,
                "hardy" => c.hardy = parse_bool(v)?,
                "flow" => c.flow = parse_bool(v)?,
                "decay_window" => c.decay_window = parse_window(v)?,
                "smoothing_window" => c.smoothing_window = parse_window(v)?,
                "meanvalue_pairs" => c.meanvalue_pairs = parse_pairs(v)?,
                "mono_from" => c.mono_from = parse_f64(v)?,
                "out_dir" => {
                    if v.is_empty() {
                        return Err("expected a path".into());
                    }
                    c.out_dir = PathBuf::from(v)
                }
                _ => unreachable!("key table and parser disagree"),
            }
            Ok(())
        })();
        res.map_err(|m| err(line, key, m))?;
    }
    let line_of = |k: &str| seen.iter().find(|(s, _)| *s == k).map(|(_, l)| *l);
    for (a, b) in [("a", "bolt"), ("nodes", "N")] {
        if let (Some(_), Some(l)) = (line_of(a), line_of(b)) {
            return Err(err(l, b, format!("conflicts with `{a}`")));
        }
    }
    if line_of("gamma_order").is_none() && c.background == Background::Cone {
        c.gamma_order = 2;
    }
    if line_of("r_min").is_none() {
        c.r_min = match c.background {
            Background::Euclidean => 0.0,
            Background::Cone => 1.0,
            Background::EguchiHanson => c.a,
        };
    }
    validate(&c).map_err(|(key, message)| ConfigError { line: line_of(key).unwrap_or(0), key: key.into(), message })?;
    Ok(c)
}

/// Preconditions of every module a run touches, checked before any compute.
pub fn validate(c: &RunConfig) -> Result<(), (&'static str, String)> {
    let pos = |key: &'static str, x: f64| if x > 0.0 { Ok(()) } else { Err((key, format!("must be positive, got {x}"))) };
    if c.n < 3 {
        return Err(("n", format!("dimension must be at least 3, got {}", c.n)));
    }
    match c.background {
        Background::Euclidean => {
            if c.gamma_order != 1 {
                return Err(("gamma_order", "euclidean background has trivial Γ (gamma_order = 1)".into()));
            }
            if c.r_min != 0.0 {
                return Err(("r_min", "euclidean grids start at the origin (r_min = 0)".into()));
            }
        }
        Background::Cone => {
            if c.gamma_order < 2 {
                return Err(("gamma_order", format!("cone needs gamma_order >= 2, got {}", c.gamma_order)));
            }
            if c.r_min <= 0.0 {
                return Err(("r_min", "the cone apex is singular; need r_min > 0".into()));
            }
        }
        Background::EguchiHanson => {
            if c.n != 4 {
                return Err(("n", format!("eguchi_hanson is four-dimensional, got n = {}", c.n)));
            }
            pos("a", c.a)?;
            if c.r_min != c.a {
                return Err(("r_min", format!("eguchi_hanson grids start at the bolt r_min = a = {}", c.a)));
            }
        }
    }
    if c.r_max <= c.r_min {
        return Err(("r_max", format!("need r_max > r_min = {}", c.r_min)));
    }
    if c.nodes < 16 {
        return Err(("nodes", format!("need at least 16 nodes, got {}", c.nodes)));
    }
    if !(c.stretch >= 1.0) {
        return Err(("stretch", format!("stretch must be >= 1, got {}", c.stretch)));
    }
    pos("width", c.width)?;
    pos("power", c.power)?;
    pos("delta_ball", c.delta_ball)?;
    pos("t_max", c.t_max)?;
    pos("tol_conv", c.tol_conv)?;
    pos("tol_mono", c.tol_mono)?;
    if !(c.safety > 0.0 && c.safety <= 1.0) {
        return Err(("safety", format!("must lie in (0, 1], got {}", c.safety)));
    }
    pos("t0", c.t0)?;
    if c.ratio <= 1.0 {
        return Err(("ratio", format!("sampling ratio must exceed 1, got {}", c.ratio)));
    }
    if c.max_steps == 0 {
        return Err(("max_steps", "must be at least 1".into()));
    }
    if c.spectral && c.eigen_count == 0 {
        return Err(("eigen_count", "need at least one eigenpair".into()));
    }
    pos("tol_kern", c.tol_kern)?;
    for (key, (lo, hi)) in [("decay_window", c.decay_window), ("smoothing_window", c.smoothing_window)] {
        if !(lo > 0.0 && hi > lo) {
            return Err((key, format!("need 0 < lo < hi, got {lo}, {hi}")));
        }
    }
    for &(t, r) in &c.meanvalue_pairs {
        if !(t > 0.0 && r > 0.0) {
            return Err(("meanvalue_pairs", format!("need t, r > 0, got {t}:{r}")));
        }
        if t > c.t_max {
            return Err(("meanvalue_pairs", format!("t = {t} exceeds t_max = {}", c.t_max)));
        }
    }
    if c.init == InitFamily::Kernel && !c.spectral {
        return Err(("init", "kernel data needs the spectral preflight (spectral = true)".into()));
    }
    if c.scenario.is_empty() || c.scenario.contains(char::is_whitespace) {
        return Err(("scenario", "must be a single non-empty word".into()));
    }
    Ok(())
}

/// Renders every key; `parse_config(&render(c)) == c` for valid configs.
pub fn render(c: &RunConfig) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("scenario", c.scenario.clone());
    kv("background", c.background.name().into());
    kv("n", c.n.to_string());
    kv("gamma_order", c.gamma_order.to_string());
    kv("a", format!("{:?}", c.a));
    kv("r_min", format!("{:?}", c.r_min));
    kv("r_max", format!("{:?}", c.r_max));
    kv("nodes", c.nodes.to_string());
    kv("stretch", format!("{:?}", c.stretch));
    kv("init", c.init.name().into());
    kv("amp", format!("{:?}", c.amp));
    kv("width", format!("{:?}", c.width));
    kv("center", format!("{:?}", c.center));
    kv("power", format!("{:?}", c.power));
    kv("delta_ball", format!("{:?}", c.delta_ball));
    kv("t_max", format!("{:?}", c.t_max));
    kv("tol_conv", format!("{:?}", c.tol_conv));
    kv("tol_mono", format!("{:?}", c.tol_mono));
    kv("safety", format!("{:?}", c.safety));
    kv("t0", format!("{:?}", c.t0));
    kv("ratio", format!("{:?}", c.ratio));
    kv("max_steps", c.max_steps.to_string());
    kv("spectral", c.spectral.to_string());
    kv("eigen_count", c.eigen_count.to_string());
    kv("tol_kern", format!("{:?}", c.tol_kern));
    kv("hardy", c.hardy.to_string());
    kv("flow", c.flow.to_string());
    kv("decay_window", format!("{:?}, {:?}", c.decay_window.0, c.decay_window.1));
    kv("smoothing_window", format!("{:?}, {:?}", c.smoothing_window.0, c.smoothing_window.1));
    let pairs: Vec<String> = c.meanvalue_pairs.iter().map(|(t, r)| format!("{t:?}:{r:?}")).collect();
    kv("meanvalue_pairs", pairs.join(", "));
    kv("mono_from", format!("{:?}", c.mono_from));
    kv("out_dir", c.out_dir.display().to_string());
    s
}
