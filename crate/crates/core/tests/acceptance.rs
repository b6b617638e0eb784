//! Acceptance criteria, one test each. Every test prints a single
//! `criterion N: PASS|FAIL ...` line (visible with `--nocapture`) before
//! asserting.

use std::fs;

use advect_verify::analysis::ConvergenceTable;
use advect_verify::driver::{compute, emit_outputs, preset, run_experiment, Outcome};
use advect_verify::errmodel::{closed_form, exp_factor, recurrence_simulate, ErrorModelParams};
use advect_verify::grid::{make_irregular, GridKind, Lcg};
use advect_verify::scheme::{face_fluxes, residual_values};

fn verdict(n: u32, checks: &[(String, bool)]) {
    let ok = checks.iter().all(|(_, pass)| *pass);
    let detail: Vec<String> = checks
        .iter()
        .map(|(what, pass)| format!("{what} [{}]", if *pass { "ok" } else { "X" }))
        .collect();
    println!(
        "criterion {n}: {} {}",
        if ok { "PASS" } else { "FAIL" },
        detail.join("; ")
    );
    assert!(ok, "criterion {n} failed: {checks:?}");
}

fn in_band(order: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&order)
}

fn table(outcome: &Outcome, kind: GridKind) -> &ConvergenceTable {
    &outcome
        .run(kind)
        .expect("preset runs both grid kinds")
        .table
}

fn order_check(label: &str, order: f64, lo: f64, hi: f64) -> (String, bool) {
    (
        format!("{label} {order:.3} in [{lo}, {hi}]"),
        in_band(order, lo, hi),
    )
}

fn run(name: &str) -> Outcome {
    let cfg = preset(name).unwrap();
    assert_eq!(cfg.base_cells, 8);
    assert_eq!(cfg.n_levels, 6);
    compute(&cfg).unwrap()
}

#[test]
fn criterion_1_steady() {
    let out = run("fig1b");
    let mut checks = Vec::new();
    for kind in [GridKind::Regular, GridKind::Irregular] {
        let t = table(&out, kind);
        assert_eq!(t.rows().last().unwrap().n_cells, 256);
        let (o1, oinf) = t.final_orders();
        checks.push(order_check(&format!("{} L1", kind.name()), o1, 1.9, 2.1));
        checks.push(order_check(
            &format!("{} Linf", kind.name()),
            oinf,
            1.9,
            2.1,
        ));
    }
    verdict(1, &checks);
}

#[test]
fn criterion_2_time_integration() {
    let cfg = preset("fig1c").unwrap();
    assert_eq!(cfg.final_time(), Some(0.01 / 8.0));
    assert_eq!(cfg.dt_for(1.0 / 256.0), Some(0.01 / 256.0));
    let out = compute(&cfg).unwrap();
    let mut checks = Vec::new();
    for kind in [GridKind::Regular, GridKind::Irregular] {
        let (o1, oinf) = table(&out, kind).final_orders();
        checks.push(order_check(&format!("{} L1", kind.name()), o1, 1.9, 2.1));
        checks.push(order_check(
            &format!("{} Linf", kind.name()),
            oinf,
            1.9,
            2.1,
        ));
    }
    verdict(2, &checks);
}

fn pitfall_checks(out: &Outcome) -> Vec<(String, bool)> {
    let mut checks = Vec::new();
    let (o1, oinf) = table(out, GridKind::Irregular).final_orders();
    checks.push(order_check("irregular L1", o1, 0.8, 1.2));
    checks.push(order_check("irregular Linf", oinf, 0.8, 1.2));
    let regular = table(out, GridKind::Regular);
    let (o1, oinf) = regular.final_orders();
    checks.push(order_check("regular L1", o1, 1.9, 2.1));
    checks.push(order_check("regular Linf", oinf, 0.8, 1.2));
    let cells: Vec<usize> = regular.rows().iter().map(|r| r.linf_cell).collect();
    let adjacent = regular
        .rows()
        .iter()
        .all(|r| r.linf_cell == 0 || r.linf_cell == r.n_cells - 1);
    checks.push((
        format!("regular Linf argmax cells {cells:?} at a boundary"),
        adjacent,
    ));
    checks
}

#[test]
fn criterion_3_tiny_step_pitfall() {
    let cfg = preset("fig1de").unwrap();
    assert_eq!(cfg.dt_fixed, Some(1e-8));
    assert_eq!(cfg.final_time(), Some(1e-8));
    verdict(3, &pitfall_checks(&compute(&cfg).unwrap()));
}

#[test]
fn criterion_4_scaled_dt_pitfall() {
    let tiny = run("fig1de");
    let scaled = run("scaled_dt_pitfall");
    let mut checks = pitfall_checks(&scaled);
    for kind in [GridKind::Regular, GridKind::Irregular] {
        let larger = table(&scaled, kind)
            .rows()
            .iter()
            .zip(table(&tiny, kind).rows())
            .all(|(s, t)| s.l1_error > t.l1_error && s.linf_error > t.linf_error);
        checks.push((
            format!(
                "{} errors larger than tiny-step run on every level",
                kind.name()
            ),
            larger,
        ));
    }
    verdict(4, &checks);
}

#[test]
fn criterion_5_remedy() {
    let cfg = preset("fig2").unwrap();
    assert_eq!(cfg.mu, Some(0.95));
    assert_eq!(cfg.final_time(), cfg.dt_for(1.0 / 8.0));
    let out = compute(&cfg).unwrap();
    let mut checks = Vec::new();
    for kind in [GridKind::Regular, GridKind::Irregular] {
        let (o1, oinf) = table(&out, kind).final_orders();
        checks.push(order_check(&format!("{} L1", kind.name()), o1, 1.85, 2.15));
        checks.push(order_check(
            &format!("{} Linf", kind.name()),
            oinf,
            1.85,
            2.15,
        ));
    }
    verdict(5, &checks);
}

fn two_sig(x: f64) -> String {
    format!("{x:.1e}")
}

#[test]
fn criterion_6_factor_tables() {
    let expected = [
        (0.01, [0.99, 0.98, 0.96, 0.92, 0.85, 0.73]),
        (1.0, [0.37, 0.14, 1.8e-2, 3.4e-4, 1.1e-7, 1.3e-14]),
    ];
    let h_c = 1.0 / 8.0;
    let mut checks = Vec::new();
    for (mu, values) in expected {
        let t_final = mu * h_c;
        let got: Vec<f64> = (0..6)
            .map(|k| exp_factor(1.0, t_final, h_c / f64::from(1 << k)).unwrap())
            .collect();
        let ok = got
            .iter()
            .zip(values)
            .all(|(g, p)| two_sig(*g) == two_sig(p));
        let shown: Vec<String> = got.iter().map(|g| two_sig(*g)).collect();
        checks.push((format!("mu = {mu}: {}", shown.join(" ")), ok));
    }
    let out = run("exp_tables");
    let from_driver: Vec<f64> = out.factor_tables[0].rows.iter().map(|r| r.factor).collect();
    checks.push((
        "driver tables match exp_factor".into(),
        from_driver
            .iter()
            .zip(expected[0].1)
            .all(|(g, p)| two_sig(*g) == two_sig(p)),
    ));
    verdict(6, &checks);
}

#[test]
fn criterion_7_model_oracle() {
    let (a, h, c1) = (1.0, 1.0 / 64.0, 0.8);
    let mut worst: f64 = 0.0;
    let mut n1_exact = true;
    for mu in [0.01, 0.5, 0.95, 1.0] {
        let p = ErrorModelParams::new(a, h, mu, c1, 1.0).unwrap();
        for n in 0..=1000u64 {
            let cf = closed_form(&p, n);
            let rec = recurrence_simulate(&p, n);
            let rel = if rec == 0.0 {
                cf.abs()
            } else {
                ((cf - rec) / rec).abs()
            };
            worst = worst.max(rel);
        }
        let dt = mu * h / a;
        let single = dt * c1 * (dt + h);
        n1_exact &= closed_form(&p, 1) == single && recurrence_simulate(&p, 1) == single;
    }
    verdict(
        7,
        &[
            (
                format!("max relative gap {worst:.2e} <= 1e-12"),
                worst <= 1e-12,
            ),
            ("n = 1 equals dt C1 (dt + h) bitwise".into(), n1_exact),
        ],
    );
}

#[test]
fn criterion_8_properties() {
    let mut rng = Lcg::new(2024);
    let cases = 64;
    let mut worst_linear: f64 = 0.0;
    let mut worst_constant: f64 = 0.0;
    let mut worst_telescope: f64 = 0.0;
    let mut partitions = true;
    for _ in 0..cases {
        let n = 4 + (rng.next_unit() * 96.0) as usize;
        let frac = rng.next_unit() * 0.45;
        let seed = (rng.next_unit() * 2f64.powi(53)) as u64;
        let (alpha, beta) = (6.0 * rng.next_unit() - 3.0, 6.0 * rng.next_unit() - 3.0);
        let a = 0.1 + 4.9 * rng.next_unit();
        let g = make_irregular(n, seed, frac).unwrap();

        let h = 1.0 / n as f64;
        let faces = g.faces();
        partitions &= faces[0] == 0.0 && faces[n] == 1.0;
        partitions &= g
            .volumes()
            .iter()
            .all(|&v| v >= (1.0 - 2.0 * frac) * h * (1.0 - 1e-12));
        partitions &= g
            .volumes()
            .iter()
            .all(|&v| v <= (1.0 + 2.0 * frac) * h * (1.0 + 1e-12));
        partitions &= (g.volumes().iter().sum::<f64>() - 1.0).abs() < 1e-14;
        partitions &= g
            .centers()
            .iter()
            .enumerate()
            .all(|(j, &c)| faces[j] < c && c < faces[j + 1]);

        let lin: Vec<f64> = g.centers().iter().map(|&x| alpha + beta * x).collect();
        let res = residual_values(&g, a, &lin, alpha).unwrap();
        for (r, v) in res.iter().zip(g.volumes()) {
            worst_linear = worst_linear.max((r - a * beta * v).abs());
        }

        let flat = vec![alpha; n];
        let res = residual_values(&g, a, &flat, alpha).unwrap();
        worst_constant = res.iter().fold(worst_constant, |m, r| m.max(r.abs()));

        let wavy: Vec<f64> = g.centers().iter().map(|&x| 2.0 + (5.0 * x).sin()).collect();
        let inflow = 1.5;
        let res = residual_values(&g, a, &wavy, inflow).unwrap();
        let fluxes = face_fluxes(&g, a, &wavy, inflow).unwrap();
        let sum: f64 = res.iter().sum();
        worst_telescope = worst_telescope.max((sum - (fluxes[n] - a * inflow)).abs());
    }

    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let mut identical = true;
    let mut files = 0;
    for dir in [first.path(), second.path()] {
        let mut cfg = preset("fig2").unwrap();
        cfg.output_dir = Some(dir.to_path_buf());
        let out = run_experiment(&cfg).unwrap();
        emit_outputs(&out, dir, true).unwrap();
    }
    let mut names: Vec<_> = fs::read_dir(first.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    for name in &names {
        let a = fs::read(first.path().join(name)).unwrap();
        let b = fs::read(second.path().join(name)).unwrap();
        identical &= a == b;
        files += 1;
    }
    identical &= fs::read_dir(second.path()).unwrap().count() == files;

    verdict(
        8,
        &[
            (
                format!("linear exactness on {cases} grids, max {worst_linear:.1e} <= 1e-13"),
                worst_linear <= 1e-13,
            ),
            (
                format!("constant preservation, max {worst_constant:.1e} <= 1e-13"),
                worst_constant <= 1e-13,
            ),
            (
                format!("telescoping sum, max {worst_telescope:.1e} <= 1e-13"),
                worst_telescope <= 1e-13,
            ),
            ("grid partition invariants".into(), partitions),
            (
                format!("fig2 outputs byte-identical across two runs ({files} files)"),
                identical && files > 0,
            ),
        ],
    );
}
