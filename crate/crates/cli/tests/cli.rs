use std::path::Path;
use std::process::Command;

use aleflow_cli::config::{validate, Background, InitFamily};
use aleflow::flow::{Diagnostics, Sample};
use aleflow_cli::report::Report;
use aleflow_cli::scenario::diagnostics_table;
use aleflow_cli::{execute, parse_config, render, scenario, RunConfig};
use proptest::prelude::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aleflow"))
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![1e-6..1e3f64, (1e-12..1e-6f64), Just(0.1), Just(1.0 / 3.0)]
}

prop_compose! {
    fn config()(
        bg in 0usize..3,
        n in 3usize..7,
        gamma in 2usize..5,
        a in 0.1..5.0f64,
        r_min in 0.1..2.0f64,
        span in 1.0..500.0f64,
        nodes in 16usize..5000,
        stretch in 1.0..1.1f64,
        init in 0usize..6,
        (amp, width, power) in (finite(), finite(), finite()),
        center in -5.0..20.0f64,
        (delta, tol_conv, tol_mono, tol_kern) in (finite(), finite(), finite(), finite()),
        safety in 0.01..1.0f64,
        t0 in 1e-6..1.0f64,
        ratio in 1.01..3.0f64,
        max_steps in 1usize..10_000_000,
        (spectral, hardy, flow) in (any::<bool>(), any::<bool>(), any::<bool>()),
        eigen_count in 1usize..10,
        t_max in 1.0..1e4f64,
        pairs in prop::collection::vec((0.01..1.0f64, 0.1..10.0f64), 0..4),
        name in "[a-z][a-z0-9-]{0,12}",
        dir in "[a-z][a-z0-9_/]{0,20}",
    ) -> RunConfig {
        let background = [Background::Euclidean, Background::Cone, Background::EguchiHanson][bg];
        let (n, r_min, gamma_order) = match background {
            Background::Euclidean => (n, 0.0, 1),
            Background::Cone => (n, r_min, gamma),
            Background::EguchiHanson => (4, a, 1),
        };
        RunConfig {
            scenario: name,
            background,
            n,
            gamma_order,
            a,
            r_min,
            r_max: r_min + span,
            nodes,
            stretch,
            init: InitFamily::ALL[init],
            amp,
            width,
            center,
            power,
            delta_ball: delta,
            t_max,
            tol_conv,
            tol_mono,
            safety,
            t0,
            ratio,
            max_steps,
            spectral,
            eigen_count,
            tol_kern,
            hardy,
            flow,
            decay_window: (t0, t0 * 100.0),
            smoothing_window: (t0 * 0.5, t0 * 7.0),
            meanvalue_pairs: pairs.into_iter().map(|(f, r)| (f * t_max, r)).collect(),
            mono_from: t0 * 3.0,
            out_dir: dir.into(),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn render_round_trips(c in config()) {
        prop_assert!(validate(&c).is_ok(), "{:?}", validate(&c));
        prop_assert_eq!(parse_config(&render(&c)).unwrap(), c);
    }
}

fn small_flat(dir: &Path) -> RunConfig {
    RunConfig {
        r_max: 10.0,
        nodes: 41,
        t_max: 0.05,
        spectral: false,
        out_dir: dir.into(),
        ..RunConfig::default()
    }
}

#[test]
fn empty_diagnostics_give_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = Report::default();
    r.tables.push(("diagnostics".into(), diagnostics_table(&Diagnostics::default())));
    r.write(dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    assert_eq!(text, Sample::COLUMNS.join(",") + "\n");
    // A run at rest still records its initial sample and exits 0.
    let c = RunConfig { init: InitFamily::Zero, ..small_flat(dir.path()) };
    let out = execute(&c).unwrap();
    assert_eq!(out.exit_code(), 0);
    assert_eq!(out.report.get("classification"), Some("converged"));
    assert_eq!(out.report.table("diagnostics").unwrap().rows.len(), 1);
}

#[test]
fn reemit_replaces_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = Report::default();
    r.set("a", "1");
    r.write(dir.path()).unwrap();
    r.set("a", "2");
    r.write(dir.path()).unwrap();
    assert_eq!(std::fs::read_to_string(dir.path().join("report.txt")).unwrap(), "a = 2\n");
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.cfg");
    std::fs::write(&p, "background = cone\ngamma_order = 2\nr_min = 0\n").unwrap();
    let out = bin().args(["run", "--config"]).arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("r_min"), "{err}");
    let out = bin().args(["scenario", "no-such-thing"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["run", "--config"]).arg(dir.path().join("missing.cfg")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Starting outside the ball is invalid input surfaced by the flow.
    std::fs::write(&p, "r_max = 10\nnodes = 41\namp = 0.5\ndelta_ball = 0.1\nspectral = false\n").unwrap();
    let out = bin().args(["run", "--config"]).arg(&p).arg("--out").arg(dir.path().join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn blow_up_exits_1_with_post_mortem() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("hot.cfg");
    // g0 + h degenerates where the jump of −0.95·g0 is smoothed below −1.
    std::fs::write(
        &p,
        "r_max = 2\nnodes = 64\ninit = step\namp = -0.95\nwidth = 1\ndelta_ball = 10\nt_max = 1\nspectral = false\n",
    )
    .unwrap();
    let out = bin().args(["run", "--config"]).arg(&p).arg("--out").arg(dir.path().join("o")).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("classification = blew_up"), "{stdout}");
    assert!(stdout.contains("exit_reason = metric not positive definite"), "{stdout}");
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout.contains("csv_final_state = final_state.csv"));
    let post = std::fs::read_to_string(dir.path().join("o/final_state.csv")).unwrap();
    assert!(post.starts_with("r,h0,h1,norm\n") && post.lines().count() == 65);
}

#[test]
fn run_writes_report_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, render(&small_flat(Path::new("unused")))).unwrap();
    let mut outputs = Vec::new();
    for sub in ["a", "b"] {
        let out_dir = dir.path().join(sub);
        let out = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&out_dir).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let report = std::fs::read_to_string(out_dir.join("report.txt")).unwrap();
        for key in ["version", "config_hash", "classification", "csv_diagnostics"] {
            assert!(report.contains(&format!("{key} = ")), "{key} missing:\n{report}");
        }
        outputs.push((report, std::fs::read(out_dir.join("diagnostics.csv")).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn list_and_show_scenarios() {
    let out = bin().arg("list-scenarios").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["flat-decay-n3", "flat-decay-n4", "cone-orbifold", "eh-stability", "eh-flow", "smoothing-kink", "meanvalue-sweep"] {
        assert!(text.contains(name), "{name}");
    }
    let out = bin().args(["show-scenario", "eh-flow"]).output().unwrap();
    let shown = parse_config(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(shown, scenario("eh-flow").unwrap());
}

#[test]
fn eh_stability_reports_spectral_keys() {
    let c = RunConfig { nodes: 1600, stretch: 1.004, ..scenario("eh-stability").unwrap() };
    let r = execute(&c).unwrap().report;
    for key in ["lambda_min", "alpha", "kernel_dim", "first_nonzero", "gap_ratio", "hardy_constant"] {
        assert!(r.get(key).is_some(), "{key}");
    }
    assert_eq!(r.get("kernel_dim"), Some("1"));
    assert!(r.table("spectral").unwrap().rows.len() == 4);
}
