//! Named presets and the pipeline shared by every run: spectral preflight,
//! Hardy constant, flow, fits and checks.

use std::sync::Arc;

use aleflow::flow::{
    decay_fit, meanvalue_check, monotonicity_report, smoothing_fit, Classification, Diagnostics, Flow, FlowParams, InitialData, Sample,
};
use aleflow::operators::grid::Discretization;
use aleflow::spectral::{assemble, hardy_constant, kernel_basis, lowest_eigenpairs, strong_positivity_alpha, KernelStatus};
use aleflow::{BackgroundMetric, RadialGrid, TensorField};
use sha2::{Digest, Sha256};

use crate::config::{render, Background, InitFamily, RunConfig};
use crate::report::{num, Report, Table};

/// `(name, summary)` of every preset, in listing order.
pub const SCENARIOS: [(&str, &str); 8] = [
    ("flat-decay-n3", "slowly decaying data on R^3: L^inf decay exponent"),
    ("flat-decay-n4", "slowly decaying data on R^4: L^inf decay exponent"),
    ("cone-orbifold", "Gaussian bump on the cone R^4/Z2 away from the apex"),
    ("eh-stability", "Eguchi-Hanson spectrum, kernel, strong positivity and Hardy constant on a fine grid"),
    ("eh-flow", "small traceless perturbation of Eguchi-Hanson with kernel modulation"),
    ("smoothing-kink", "jump data on R^4: derivative smoothing exponents"),
    ("meanvalue-sweep", "parabolic mean-value check at infinity on R^4"),
    ("eh-ball-exit", "large slowly decaying traceless data on Eguchi-Hanson leaving the ball"),
];

pub fn scenario(name: &str) -> Option<RunConfig> {
    let base = RunConfig { scenario: name.into(), out_dir: format!("aleflow-out/{name}").into(), ..RunConfig::default() };
    let flat_decay = |n| RunConfig {
        n,
        r_max: 400.0,
        nodes: 113,
        stretch: 1.04,
        init: InitFamily::SlowTail,
        amp: 1e-3,
        width: 2.0,
        t_max: 1e3,
        decay_window: (1.0, 1e3),
        eigen_count: 2,
        ..base.clone()
    };
    let eh = RunConfig { background: Background::EguchiHanson, a: 1.0, r_min: 1.0, ..base.clone() };
    Some(match name {
        "flat-decay-n3" => flat_decay(3),
        "flat-decay-n4" => flat_decay(4),
        "cone-orbifold" => RunConfig {
            background: Background::Cone,
            gamma_order: 2,
            r_min: 1.0,
            r_max: 200.0,
            nodes: 120,
            stretch: 1.03,
            init: InitFamily::Gaussian,
            center: 5.0,
            width: 2.0,
            t_max: 500.0,
            decay_window: (2.0, 500.0),
            eigen_count: 2,
            ..base
        },
        "eh-stability" => RunConfig {
            r_max: 40.0,
            nodes: 10_000,
            stretch: 1.0006,
            eigen_count: 4,
            tol_kern: 1e-3,
            hardy: true,
            flow: false,
            ..eh
        },
        "eh-flow" => RunConfig {
            r_max: 20.0,
            nodes: 115,
            stretch: 1.03,
            init: InitFamily::TracelessBump,
            amp: 1e-2,
            center: 6.0,
            width: 1.0,
            t_max: 200.0,
            tol_conv: 1e-6,
            delta_ball: 0.3,
            eigen_count: 4,
            tol_kern: 0.02,
            decay_window: (1.0, 200.0),
            mono_from: 1.0,
            tol_mono: 1e-8,
            meanvalue_pairs: vec![(16.0, 2.0), (64.0, 4.0), (144.0, 6.0)],
            ..eh
        },
        "smoothing-kink" => RunConfig {
            r_max: 1.5,
            nodes: 501,
            stretch: 1.0,
            init: InitFamily::Step,
            amp: 1e-2,
            width: 0.5,
            t0: 1e-5,
            t_max: 1e-2,
            smoothing_window: (1e-4, 1e-2),
            spectral: false,
            ..base
        },
        "meanvalue-sweep" => RunConfig {
            r_max: 160.0,
            nodes: 144,
            stretch: 1.02,
            init: InitFamily::Gaussian,
            amp: 1e-2,
            width: 2.0,
            t0: 1.0,
            t_max: 256.0,
            delta_ball: 0.5,
            spectral: false,
            decay_window: (1.0, 256.0),
            meanvalue_pairs: vec![(16.0, 2.0), (64.0, 4.0), (256.0, 8.0), (100.0, 2.0), (100.0, 4.0), (100.0, 8.0)],
            ..base
        },
        "eh-ball-exit" => RunConfig {
            r_max: 20.0,
            nodes: 100,
            stretch: 1.02,
            init: InitFamily::TracelessTail,
            amp: 0.1,
            power: 2.2,
            delta_ball: 0.12,
            t_max: 5.0,
            spectral: false,
            ..eh
        },
        _ => return None,
    })
}

/// Failure of a run. Invalid input maps to exit code 2, everything else to 1.
#[derive(Debug)]
pub enum RunError {
    Core(aleflow::Error),
    Io(std::io::Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Core(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<aleflow::Error> for RunError {
    fn from(e: aleflow::Error) -> Self {
        RunError::Core(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Core(aleflow::Error::InvalidInput(_)) => 2,
            _ => 1,
        }
    }
}

/// Hex SHA-256 of the rendered configuration, output directory excluded.
pub fn config_hash(c: &RunConfig) -> String {
    let c = RunConfig { out_dir: Default::default(), ..c.clone() };
    Sha256::digest(render(&c).as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn background(c: &RunConfig) -> aleflow::Result<BackgroundMetric> {
    match c.background {
        Background::Euclidean => BackgroundMetric::euclidean(c.n),
        Background::Cone => BackgroundMetric::cone(c.n, c.gamma_order),
        Background::EguchiHanson => BackgroundMetric::eguchi_hanson(c.a),
    }
}

/// Snapshot times covering `[t − r², t]` for each mean-value pair.
fn snapshot_times(pairs: &[(f64, f64)]) -> Vec<f64> {
    let mut ts: Vec<f64> = Vec::new();
    for &(t, r) in pairs {
        let lo = t - r * r;
        if lo < 0.0 {
            continue;
        }
        ts.extend((0..=8).map(|k| lo + (t - lo) * k as f64 / 8.0));
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

fn fit_entry(rep: &mut Report, key: &str, fit: aleflow::Result<aleflow::flow::Fit>) {
    match fit {
        Ok(f) => {
            rep.set_num(key, f.exponent);
            rep.set_num(&format!("{key}_residual"), f.residual);
        }
        Err(e) => rep.set(&format!("{key}_error"), e.to_string()),
    }
}

fn field_table(h: &TensorField) -> Table {
    let mut cols = vec!["r".to_string()];
    cols.extend((0..h.blocks()).map(|b| format!("h{b}")));
    cols.push("norm".into());
    let norm = h.pointwise_norm();
    let mut t = Table { columns: cols, rows: Vec::new() };
    for i in 0..h.grid().len() {
        let mut row = vec![num(h.grid().r(i))];
        row.extend(h.node(i).iter().map(|&v| num(v)));
        row.push(num(norm[i]));
        t.push(row);
    }
    t
}

/// One row per sample in [`Sample::COLUMNS`] order; header only when empty.
pub fn diagnostics_table(diag: &Diagnostics) -> Table {
    let mut t = Table::new(&Sample::COLUMNS);
    for s in &diag.samples {
        t.push(s.values().iter().map(|&v| num(v)).collect());
    }
    t
}

/// Result of a completed pipeline; `blew_up` runs still carry a full report.
pub struct Outcome {
    pub report: Report,
    pub class: Option<Classification>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.class == Some(Classification::BlewUp) {
            1
        } else {
            0
        }
    }
}

/// Runs the configured pipeline without touching the filesystem.
pub fn execute(c: &RunConfig) -> Result<Outcome, RunError> {
    let mut rep = Report::default();
    rep.set("version", env!("CARGO_PKG_VERSION"));
    rep.set("scenario", c.scenario.clone());
    rep.set("config_hash", config_hash(c));
    let g0 = background(c)?;
    let grid = Arc::new(RadialGrid::new(c.n, c.r_min, c.r_max, c.nodes, c.stretch)?);
    let disc = Discretization::new(&g0, grid.clone())?;
    rep.set("background", g0.kind().name());
    rep.set("nodes", grid.len().to_string());
    rep.set_num("min_spacing", grid.min_spacing());

    let mut kernel_fields = Vec::new();
    if c.spectral {
        let a = assemble(&disc, true)?;
        let rough = assemble(&disc, false)?;
        let res = lowest_eigenpairs(&a, &disc, c.eigen_count)?;
        let ks = kernel_basis(&res, &a, &disc, c.tol_kern);
        rep.set_num("lambda_min", res.lambda_min());
        match res.eigenvalues.get(ks.dim()) {
            Some(&l) => rep.set_num("first_nonzero", l),
            None => rep.set("first_nonzero", "none"),
        }
        rep.set("kernel_dim", ks.dim().to_string());
        let (status, gap) = match ks.status {
            KernelStatus::Resolved { gap_ratio } => ("resolved", gap_ratio),
            KernelStatus::Ambiguous { gap_ratio } => ("ambiguous", gap_ratio),
        };
        rep.set("kernel_status", status);
        rep.set_num("gap_ratio", gap);
        match strong_positivity_alpha(&a, &rough, &ks.coords()) {
            Ok(alpha) => rep.set_num("alpha", alpha),
            Err(e) => rep.set("alpha_error", e.to_string()),
        }
        // Residuals of every computed pair, kernel or not.
        let all = kernel_basis(&res, &a, &disc, f64::INFINITY);
        let mut t = Table::new(&["index", "eigenvalue", "residual", "kernel", "trace_residual", "div_residual", "decay_slope"]);
        for (i, cand) in all.candidates.iter().enumerate() {
            t.push(vec![
                i.to_string(),
                num(cand.eigenvalue),
                num(res.residuals[i]),
                (i < ks.dim()).to_string(),
                num(cand.trace_residual),
                num(cand.div_residual),
                num(cand.decay_slope),
            ]);
        }
        rep.tables.push(("spectral".into(), t));
        kernel_fields = ks.candidates.into_iter().map(|k| k.field).collect();
    }
    if c.hardy {
        let h = hardy_constant(&g0, &grid)?;
        rep.set_num("hardy_constant", h.constant);
        rep.set_num("hardy_refined", h.refined);
        rep.set_num("hardy_refinement_residual", h.refinement_residual);
        rep.set_num("avr", h.avr);
    }
    if !c.flow {
        return Ok(Outcome { report: rep, class: None });
    }

    let init = match c.init {
        InitFamily::Zero => InitialData::Zero,
        InitFamily::Gaussian => InitialData::Gaussian { amp: c.amp, width: c.width, center: c.center },
        InitFamily::TracelessBump => InitialData::TracelessBump { amp: c.amp, width: c.width, center: c.center },
        InitFamily::SlowTail => InitialData::SlowTail { amp: c.amp, width: c.width },
        InitFamily::TracelessTail => InitialData::TracelessTail { amp: c.amp, power: c.power },
        InitFamily::Step => InitialData::Step { amp: c.amp, radius: c.width },
        InitFamily::Kernel => match kernel_fields.first() {
            Some(f) => InitialData::Kernel { amp: c.amp, field: f.clone() },
            None => return Err(aleflow::Error::InvalidInput("init = kernel but the kernel slice is empty".into()).into()),
        },
    };
    let flow = Flow::new(disc.clone(), kernel_fields)?;
    let params = FlowParams {
        t_max: c.t_max,
        delta_ball: c.delta_ball,
        tol_conv: c.tol_conv,
        safety: c.safety,
        t0: c.t0,
        ratio: c.ratio,
        max_steps: c.max_steps,
        snapshot_times: snapshot_times(&c.meanvalue_pairs),
    };
    let run = flow.run(init.sample(&disc), &params)?;
    let out = &run.outcome;
    rep.set("classification", out.class.name());
    rep.set_num("t_final", out.state.t);
    rep.set("steps", out.state.step_count.to_string());
    if let Some(e) = &out.exit {
        rep.set("exit_reason", e.reason.clone());
        rep.set_num("exit_t", e.t);
        rep.set_num("exit_value", e.value);
    }
    if let Some((ric, v)) = out.gauge {
        rep.set_num("final_ric_linf", ric);
        rep.set_num("final_deturck_linf", v);
    }
    let diag = &run.diagnostics;
    if let Some(s) = diag.samples.first() {
        rep.set_num("initial_linf", s.linf);
    }

    fit_entry(&mut rep, "decay_exponent", decay_fit(diag, c.decay_window, true));
    fit_entry(&mut rep, "decay_exponent_outside", decay_fit(diag, c.decay_window, false));
    fit_entry(&mut rep, "smoothing_exponent_k1", smoothing_fit(diag, c.smoothing_window, 1));
    fit_entry(&mut rep, "smoothing_exponent_k2", smoothing_fit(diag, c.smoothing_window, 2));

    if let Some(s) = diag.samples.iter().find(|s| s.t >= c.mono_from) {
        let m = monotonicity_report(diag, c.mono_from, c.tol_mono * s.l2 * s.l2);
        rep.set_num("monotonicity_max_excursion", m.max_excursion);
        rep.set("monotonicity_flagged", m.flagged.to_string());
        rep.set_num("growth_constant", m.growth_constant);
        if let (Some(mx), Some(md)) = (m.modulation_max, m.modulation_median) {
            rep.set_num("modulation_max", mx);
            rep.set_num("modulation_median", md);
            rep.set_num("modulation_ratio", mx / md);
        }
    }

    rep.tables.push(("diagnostics".into(), diagnostics_table(diag)));

    if !c.meanvalue_pairs.is_empty() {
        let mut mt = Table::new(&["t", "r", "lhs", "integral", "implied", "notice"]);
        let mut implied = Vec::new();
        for &(t, r) in &c.meanvalue_pairs {
            for row in meanvalue_check(&disc, &run.snapshots, t, &[r]) {
                if let Some(k) = row.implied {
                    implied.push(k);
                }
                mt.push(vec![
                    num(row.t),
                    num(row.r),
                    num(row.lhs),
                    num(row.integral),
                    row.implied.map_or("nan".into(), num),
                    row.notice.unwrap_or_default().replace(',', ";"),
                ]);
            }
        }
        rep.set("meanvalue_rows", mt.rows.len().to_string());
        if !implied.is_empty() {
            let lo = implied.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = implied.iter().copied().fold(0.0, f64::max);
            rep.set_num("meanvalue_implied_min", lo);
            rep.set_num("meanvalue_implied_max", hi);
        }
        rep.tables.push(("meanvalue".into(), mt));
    }

    if out.class == Classification::BlewUp {
        rep.tables.push(("final_state".into(), field_table(&out.state.h)));
    }
    Ok(Outcome { report: rep, class: Some(out.class) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_config, validate};

    #[test]
    fn presets_are_valid_and_round_trip() {
        for (name, _) in SCENARIOS {
            let c = scenario(name).unwrap();
            validate(&c).unwrap_or_else(|e| panic!("{name}: {e:?}"));
            assert_eq!(parse_config(&render(&c)).unwrap(), c, "{name}");
        }
        assert!(scenario("nope").is_none());
    }

    #[test]
    fn snapshot_windows_cover_pairs() {
        let ts = snapshot_times(&[(16.0, 2.0), (1.0, 2.0)]);
        assert_eq!(ts.len(), 9);
        assert_eq!((ts[0], ts[8]), (12.0, 16.0));
    }

    #[test]
    fn hash_ignores_out_dir() {
        let a = scenario("eh-flow").unwrap();
        let b = RunConfig { out_dir: "elsewhere".into(), ..a.clone() };
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_ne!(config_hash(&a), config_hash(&RunConfig { amp: 0.02, ..a }));
    }
}
