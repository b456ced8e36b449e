//! End-to-end acceptance checks, one line per criterion.
//!
//! Failing criteria are reported but only fail the process when
//! `OAMNFC_ACCEPTANCE_STRICT=1`.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use oamnfc::channel::{circulant_residual, reduce_channel, ChannelMatrix, SParameterDocument};
use oamnfc::cli::evaluate_imported;
use oamnfc::config::SimulationConfig;
use oamnfc::geometry::LinkGeometry;
use oamnfc::harness::{recipe, run_sweep, Axis, Metric, SweepResult, SweepSpec};
use oamnfc::inductance::{coil_electrical, mutual_tx_rx, CoilElectrical, InductanceMethod};
use oamnfc::linalg::CVec;
use oamnfc::metrics::{
    ber_ls, ber_oam_analytic, capacity_bounds, capacity_ls, capacity_mimo, capacity_oam, capacity_oam_simplified,
    capacity_siso, default_correlation, identity_correlation,
};
use oamnfc::txrx::{
    estimate_channel_ls, mse_ls, propagate, run_ber, BerDetector, BerOptions, BlindDetector, Constellation,
    DftOperator, LinkBudget, PilotConfig,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn baseline_elec(g: &LinkGeometry) -> CoilElectrical {
    coil_electrical(g, 13.56e6, 13.35e6, 1.75e-8, 5e-8).unwrap()
}

fn analytic(g: &LinkGeometry) -> ChannelMatrix {
    ChannelMatrix::analytic(g, &baseline_elec(g), InductanceMethod::Elliptic, true).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn random_geometry(rng: &mut ChaCha8Rng) -> LinkGeometry {
    loop {
        let n_tx = rng.random_range(2..=10);
        let n_rx = rng.random_range(2..=10);
        let ring_tx = rng.random_range(20e-3..40e-3);
        let ring_rx = rng.random_range(20e-3..40e-3);
        let max_tx = (ring_tx * (PI / n_tx as f64).sin()).min(6e-3);
        let max_rx = (ring_rx * (PI / n_rx as f64).sin()).min(6e-3);
        let g = LinkGeometry {
            n_tx,
            n_rx,
            ring_radius_tx: ring_tx,
            ring_radius_rx: ring_rx,
            coil_radius_tx: rng.random_range(0.3..0.95) * max_tx,
            coil_radius_rx: rng.random_range(0.3..0.95) * max_rx,
            turns_tx: rng.random_range(1..=3),
            turns_rx: rng.random_range(1..=3),
            axial_distance: rng.random_range(8e-3..40e-3),
            offset_x: rng.random_range(-15e-3..15e-3),
            offset_y: rng.random_range(-15e-3..15e-3),
            tilt_x: rng.random_range(-40f64..40.0).to_radians(),
            tilt_y: rng.random_range(-40f64..40.0).to_radians(),
        };
        if g.validate().is_ok() {
            return g;
        }
    }
}

fn c1_inductance_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let g = random_geometry(&mut rng);
        let m = rng.random_range(1..=g.n_rx);
        let n = rng.random_range(1..=g.n_tx);
        let e = mutual_tx_rx(&g, m, n, InductanceMethod::Elliptic).unwrap();
        let o = mutual_tx_rx(&g, m, n, InductanceMethod::Neumann).unwrap();
        worst = worst.max(rel(e, o));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst < 1e-4 && secs < 120.0, format!("worst relative error {worst:.2e} over 100 pairs in {secs:.1} s"))
}

fn c2_circulant_structure() -> Outcome {
    let g = LinkGeometry::baseline();
    let res = |g: &LinkGeometry| circulant_residual(&reduce_channel(&analytic(g)).unwrap());
    let aligned = res(&g);
    let shifted = res(&LinkGeometry { offset_x: 10e-3, ..g });
    let tilted = res(&LinkGeometry { tilt_x: 10f64.to_radians(), ..g });
    outcome(
        aligned < 1e-10 && shifted > 1e-2 && tilted > 1e-2,
        format!("aligned {aligned:.1e}, d_x=10mm {shifted:.3}, theta_x=10deg {tilted:.3}"),
    )
}

fn c3_blind_exactness() -> Outcome {
    let ch = analytic(&LinkGeometry::baseline());
    let det = BlindDetector::from_channel(&ch).unwrap();
    let w = DftOperator::new(8).unwrap();
    let bpsk = Constellation::bpsk();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut errors = 0usize;
    for _ in 0..10_000 {
        let x = CVec::from_fn(8, |_, _| bpsk.random(&mut rng));
        let vr = propagate(&ch, &w.excite(&x).unwrap(), 0.0, &mut rng).unwrap();
        let d = det.detect(&vr, &bpsk).unwrap();
        errors += d.symbols.iter().zip(x.iter()).filter(|(s, xi)| **s != Some(**xi)).count();
    }
    outcome(errors == 0, format!("{errors} symbol errors in 10^4 noiseless vectors"))
}

fn c4_ls_convergence() -> Outcome {
    let ch = analytic(&LinkGeometry::baseline());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let snrs = [0.0, 20.0, 40.0, 60.0];
    let trials = 400;
    let pts: Vec<(f64, f64)> = snrs
        .iter()
        .map(|&db| {
            let cfg = PilotConfig::default().with_snr_db(db);
            let mean: f64 = (0..trials)
                .map(|_| (estimate_channel_ls(&ch, &cfg, &mut rng).unwrap() - &ch.h).norm_squared())
                .sum::<f64>()
                / trials as f64;
            (db / 10.0, mean.log10())
        })
        .collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let cfg = PilotConfig::default().with_snr_db(60.0);
    let m = mse_ls(&ch, &cfg, &LinkBudget::default(), &mut rng, 20_000).unwrap();
    let dev = rel(m.mse, m.limit);
    outcome(
        (slope + 1.0).abs() <= 0.1 && dev <= 0.1,
        format!("estimate error slope {slope:.3}; MSE at 60 dB {:.4e} vs limit {:.4e} ({:.1}%)", m.mse, m.limit, 100.0 * dev),
    )
}

/// First crossing of `half` walking outward from index `from`, by linear interpolation.
fn crossing(xs: &[f64], ys: &[f64], half: f64) -> Option<f64> {
    for i in 1..xs.len() {
        if ys[i] <= half {
            let t = (ys[i - 1] - half) / (ys[i - 1] - ys[i]);
            return Some((xs[i - 1] + t * (xs[i] - xs[i - 1])).abs());
        }
    }
    None
}

fn half_power_points(r: &SweepResult, column: &str) -> (Option<f64>, Option<f64>, Option<f64>) {
    let vals = r.column(column).unwrap();
    let pick = |f: &dyn Fn(f64, f64) -> bool| -> (Vec<f64>, Vec<f64>) {
        let mut pts: Vec<(f64, f64)> = r
            .rows
            .iter()
            .zip(&vals)
            .filter(|(row, _)| f(row.coords[0], row.coords[1]))
            .map(|(row, v)| (row.coords[0].max(row.coords[1].abs()), v.unwrap()))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.into_iter().unzip()
    };
    let (dx, cd) = pick(&|d, t| t == 0.0 && d >= 0.0);
    let (tp, cp) = pick(&|d, t| d == 0.0 && t >= 0.0);
    let (tn, cn) = pick(&|d, t| d == 0.0 && t <= 0.0);
    let half = cd[0] / 2.0;
    (crossing(&dx, &cd, half), crossing(&tp, &cp, half), crossing(&tn, &cn, half))
}

fn c5_half_power_points() -> Outcome {
    let start = Instant::now();
    let fmt = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:.1}"));
    let within = |v: Option<f64>, c: f64, tol: f64| v.is_some_and(|x| (x - c).abs() <= tol);
    let a = run_sweep(&recipe("fig3a").unwrap()).unwrap();
    let (dx_a, tp_a, tn_a) = half_power_points(&a, "capacity_oam");
    let ta = start.elapsed().as_secs_f64();
    let b = run_sweep(&recipe("fig3b").unwrap()).unwrap();
    let (dx_b, tp_b, tn_b) = half_power_points(&b, "capacity_ls");
    let tb = start.elapsed().as_secs_f64() - ta;
    let pass = within(tp_a, 9.0, 2.0)
        && within(tn_a, 9.0, 2.0)
        && within(dx_a, 7.5, 1.5)
        && within(tp_b, 40.0, 5.0)
        && within(tn_b, 40.0, 5.0)
        && within(dx_b, 13.5, 2.0)
        && ta < 600.0
        && tb < 600.0;
    outcome(
        pass,
        format!(
            "blind: theta +{}/-{} deg, d_x {} mm; LS: theta +{}/-{} deg, d_x {} mm; surfaces {ta:.1} s, {tb:.1} s",
            fmt(tp_a),
            fmt(tn_a),
            fmt(dx_a),
            fmt(tp_b),
            fmt(tn_b),
            fmt(dx_b)
        ),
    )
}

fn c6_bounds_sandwich() -> Outcome {
    let mut count = 0;
    let mut violations = 0;
    let b = LinkBudget::default();
    for d in [5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0, 50.0] {
        for r in [20.0, 30.0, 40.0, 50.0, 60.0] {
            for n in [2usize, 4, 6, 8, 10] {
                let g = LinkGeometry {
                    n_tx: n,
                    n_rx: n,
                    ring_radius_tx: r * 1e-3,
                    ring_radius_rx: r * 1e-3,
                    axial_distance: d * 1e-3,
                    ..LinkGeometry::baseline()
                };
                let e = baseline_elec(&g);
                let c = capacity_oam_simplified(&g, &e, &b).unwrap().total_bits;
                let (lo, hi) = capacity_bounds(&g, &e, &b).unwrap();
                count += 1;
                if !(lo <= c && c <= hi) {
                    violations += 1;
                }
            }
        }
    }
    outcome(violations == 0 && count >= 200, format!("{violations} violations over {count} (D, R, N_t) points"))
}

fn c7_ber() -> Outcome {
    let start = Instant::now();
    let ch = analytic(&LinkGeometry::baseline());
    let base = LinkBudget::default();
    let at17 = ber_oam_analytic(&ch, &base.at_snr_db(17.0)).unwrap();
    let budget = LinkBudget { snr_grid: (0..=30).map(f64::from).collect(), ..base };
    let opts = BerOptions { bits_per_point: 1_000_000, ..BerOptions::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pts = run_ber(&ch, &budget, &BerDetector::Blind { gains: None }, &opts, &mut rng).unwrap();
    let mut checked = 0;
    let mut worst = 0.0f64;
    for p in &pts {
        let a = p.analytic.unwrap();
        if a >= 1e-4 {
            checked += 1;
            worst = worst.max((p.ber - a).abs() / p.sigma_at(a));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        at17 <= 1e-7 && worst <= 3.0 && secs < 300.0,
        format!("analytic BER at 17 dB {at17:.3e}; Monte Carlo within {worst:.2} sigma at {checked} SNR points; {secs:.1} s"),
    )
}

fn c8_scheme_ordering() -> Outcome {
    let g = LinkGeometry::baseline();
    let e = baseline_elec(&g);
    let ch = analytic(&g);
    let (gt, gr) = default_correlation(&g, InductanceMethod::Elliptic).unwrap();
    let mut siso_ok = true;
    let mut mimo_ok = true;
    let mut worst_mimo = f64::INFINITY;
    for k in 31..=60 {
        let b = LinkBudget::default().at_snr_db(k as f64 * 0.5);
        let oam = capacity_oam(&ch, &b).unwrap().total_bits;
        let siso = capacity_siso(&g, &e, &b).unwrap();
        let mimo = capacity_mimo(&ch, &b, &gt, &gr, false).unwrap().total_bits;
        siso_ok &= oam > siso;
        mimo_ok &= oam > mimo;
        worst_mimo = worst_mimo.min(oam - mimo);
    }
    outcome(
        siso_ok && mimo_ok,
        format!("OAM > SISO: {siso_ok}; OAM > MIMO (default correlation): {mimo_ok}, smallest margin {worst_mimo:.3} bits"),
    )
}

fn simplified(cfg: &SimulationConfig) -> Option<f64> {
    let s = cfg.scenario().ok()?;
    capacity_oam_simplified(&s.geometry, &s.electrical, &s.budget).ok().map(|r| r.total_bits)
}

fn c9_trends() -> Outcome {
    let mut notes = Vec::new();
    // distance, from the recipe
    let d = run_sweep(&recipe("sweep_D").unwrap()).unwrap();
    let ls: Vec<f64> = d.column("capacity_ls").unwrap().into_iter().map(Option::unwrap).collect();
    let simp: Vec<f64> = d.column("capacity_simplified").unwrap().into_iter().map(Option::unwrap).collect();
    let d_ok = ls.windows(2).all(|w| w[1] < w[0]) && simp.windows(2).all(|w| w[1] < w[0]);
    notes.push(format!("D decreasing {d_ok}"));

    // coil count at fixed N_r over integer folds
    let mut n_ok = true;
    for nr in 1..=20usize {
        let caps: Vec<f64> = (1..=nr)
            .filter(|nt| nr % nt == 0)
            .filter_map(|nt| {
                let mut c = SimulationConfig::default();
                c.set("R", 50.0).unwrap();
                c.set("N_t", nt as f64).unwrap();
                c.set("N_r", nr as f64).unwrap();
                simplified(&c)
            })
            .collect();
        n_ok &= caps.windows(2).all(|w| w[1] > w[0]);
    }
    notes.push(format!("N_t increasing {n_ok}"));

    // equal ring radii against equal-sum pairs
    let radii: Vec<f64> = (0..26).map(|i| 20.0 + 3.2 * i as f64).collect();
    let cap_r = |a: f64, b: f64| {
        let mut c = SimulationConfig::default();
        c.set("R_t", a).unwrap();
        c.set("R_r", b).unwrap();
        simplified(&c).unwrap()
    };
    let diag: Vec<f64> = radii.iter().map(|&r| cap_r(r, r)).collect();
    let mut r_ok = true;
    for i in 0..radii.len() {
        for j in 0..radii.len() {
            if i != j && (i + j) % 2 == 0 {
                r_ok &= diag[(i + j) / 2] > cap_r(radii[i], radii[j]);
            }
        }
    }
    notes.push(format!("R_t = R_r dominates {r_ok}"));

    // receive coil radius over its feasible range
    let r = run_sweep(&recipe("sweep_r").unwrap()).unwrap();
    let pts: Vec<(f64, f64)> = r
        .rows
        .iter()
        .zip(r.column("capacity_ls").unwrap())
        .filter_map(|(row, v)| v.map(|v| (row.coords[0], v)))
        .collect();
    let increasing = pts.windows(2).all(|w| w[1].1 > w[0].1);
    let top = pts.last().unwrap().0;
    let upper: Vec<f64> = pts.iter().filter(|p| p.0 >= top / 2.0).map(|p| p.1).collect();
    let inc: Vec<f64> = upper.windows(2).map(|w| w[1] - w[0]).collect();
    let diminishing = inc.windows(2).all(|w| w[1] < w[0]);
    notes.push(format!("r_r increasing {increasing}, diminishing on [{:.1}, {top:.1}] mm {diminishing}", top / 2.0));
    outcome(d_ok && n_ok && r_ok && increasing && diminishing, notes.join("; "))
}

fn c10_determinism() -> Outcome {
    let mut base = SimulationConfig::default();
    base.flags.estimated_csi = true;
    let spec = SweepSpec {
        name: "determinism".into(),
        base,
        axes: vec![Axis::new("snr_db", 0.0, 10.0, 5.0), Axis::new("d_x", 0.0, 4.0, 2.0)],
        metrics: vec![Metric::CapacityLs, Metric::BerMc, Metric::CapacityMimo],
        trials: 2000,
        seed: 42,
    };
    let a = run_sweep(&spec).unwrap();
    let b = run_sweep(&spec).unwrap();
    let same = a.to_csv() == b.to_csv() && a.to_json() == b.to_json();
    let r1 = run_sweep(&recipe("fig4b").unwrap()).unwrap().to_csv();
    let r2 = run_sweep(&recipe("fig4b").unwrap()).unwrap().to_csv();
    outcome(same && r1 == r2, format!("randomized sweep identical {same}, recipe identical {}", r1 == r2))
}

fn c11_sparam_round_trip() -> Outcome {
    let g = LinkGeometry::baseline();
    let ch = analytic(&g);
    let doc = SParameterDocument::embedding(&ch.h, 13.56e6, |i, j| {
        Complex64::new(0.01 * (i as f64 + 1.0), -0.02 * (j as f64 + 1.0))
    });
    let parsed = SParameterDocument::parse(&doc.to_csv()).unwrap();
    let imported = oamnfc::channel::import_s_parameters(&parsed).unwrap();
    let mut cfg = SimulationConfig::default();
    cfg.budget.snr_db = vec![0.0, 10.0, 20.0, 30.0];
    let report = evaluate_imported(&imported, &cfg, 0).unwrap();
    let mut worst = 0.0f64;
    let (gt, gr) = (identity_correlation(8), identity_correlation(8));
    for (i, snr) in cfg.budget.snr_db.iter().enumerate() {
        let b = LinkBudget::default().at_snr_db(*snr);
        let direct = [
            capacity_ls(&ch, &ch.h, &b).unwrap().total_bits,
            ber_ls(&ch, &ch.h, &b).unwrap(),
            capacity_mimo(&ch, &b, &gt, &gr, false).unwrap().total_bits,
            capacity_mimo(&ch, &b, &gt, &gr, true).unwrap().total_bits,
        ];
        for (k, v) in direct.iter().enumerate() {
            worst = worst.max(rel(report.rows[i].values[k].unwrap(), *v));
        }
    }
    let exact = imported.h == ch.h;
    outcome(exact && worst <= 1e-12, format!("16-port fixture, H bit-exact {exact}, worst metric deviation {worst:.1e}"))
}

fn main() {
    let checks: [(&str, fn() -> Outcome); 11] = [
        ("inductance oracle", c1_inductance_oracle),
        ("circulant structure", c2_circulant_structure),
        ("blind detection exactness", c3_blind_exactness),
        ("LS convergence", c4_ls_convergence),
        ("capacity half-power points", c5_half_power_points),
        ("bound sandwich", c6_bounds_sandwich),
        ("BER benchmark", c7_ber),
        ("scheme ordering", c8_scheme_ordering),
        ("trend suite", c9_trends),
        ("determinism", c10_determinism),
        ("S-parameter round trip", c11_sparam_round_trip),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in checks.iter().enumerate() {
        let o = check();
        println!("criterion {:>2} {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    println!("acceptance: {}/{} criteria pass", checks.len() - failed.len(), checks.len());
    if !failed.is_empty() && std::env::var("OAMNFC_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
