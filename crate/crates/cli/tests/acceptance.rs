//! Acceptance criteria, one PASS/FAIL line each with tolerance and runtime.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qwalk::asymptotics::{
    eigenvalues_distributed_example, eigenvalues_entangled_example, eigenvalues_local_general,
    rho_asymptotic, rho_local_closed,
};
use qwalk::characteristic::{c_local, c_local_u2, c_of_k_u2, characteristic_at_k, QuadratureGrid};
use qwalk::linalg::DEFAULT_DEGENERACY_TOL;
use qwalk::sampling::{
    random_angle, random_bloch, random_general_state, random_k, random_u2_params, random_walk_spec,
};
use qwalk::simulator::cesaro_rho;
use qwalk::states::{basis_coin, bloch_coin, InitialState};
use qwalk::walk::{eig_uk, line_walk, U2Params};
use qwalk::{CMatrix, Error, Subsystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn qwalk(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(args)
        .output()
        .expect("run qwalk");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8 output"),
    )
}

fn zero_state_rho(theta: f64) -> CMatrix {
    let (s, c) = theta.sin_cos();
    let f = s * c / (s + 1.0);
    CMatrix::from_real_rows(&[&[1.0 - s / 2.0, f / 2.0], &[f / 2.0, s / 2.0]]).unwrap()
}

fn pair_gap(values: &[f64], pair: (f64, f64)) -> f64 {
    (values[0] - pair.0).abs().max((values[1] - pair.1).abs())
}

fn interior_sweep(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.05 + (PI - 0.1) * (i as f64 + 0.5) / n as f64)
        .collect()
}

fn ac1() -> Outcome {
    let args = [
        "rho",
        "--theta",
        "pi/4",
        "--alpha",
        "pi/2",
        "--beta",
        "pi/2",
        "--state",
        "local v=0 chi=(1,0)",
        "--grid",
        "4096",
    ];
    let (code, out) = qwalk(&args);
    let v: Value = serde_json::from_str(&out).expect("rho JSON");
    let cpe = v["cpe"].as_f64().unwrap();
    let mut closed_args = args.to_vec();
    closed_args.push("--closed-form");
    let (_, out) = qwalk(&closed_args);
    let closed: Value = serde_json::from_str(&out).expect("rho JSON");
    let gap = (closed["cpe"].as_f64().unwrap() - cpe).abs();
    outcome(
        code == 0 && (cpe - 0.872).abs() <= 1e-3 && gap <= 1e-8,
        format!("cpe={cpe:.12} |cpe-0.872|<=1e-3, closed-form gap={gap:.2e}<=1e-8"),
    )
}

fn ac2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = random_u2_params(&mut rng, 0.05);
        let k = random_k(&mut rng, 1);
        let closed = c_of_k_u2(p, k.components()[0]).unwrap();
        let numeric = characteristic_at_k(&line_walk(p), &k, DEFAULT_DEGENERACY_TOL).unwrap();
        worst = worst.max(closed.matrix().max_abs_diff(numeric.matrix()));
    }
    outcome(
        worst <= 1e-10,
        format!("100 draws, max |closed-numeric|={worst:.2e}<=1e-10"),
    )
}

fn ac3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let grid = QuadratureGrid::new(4096, 1).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = random_u2_params(&mut rng, 0.05);
        let numeric = c_local(&line_walk(p), &grid).unwrap();
        worst = worst.max(numeric.matrix().max_abs_diff(c_local_u2(p).matrix()));
    }
    outcome(
        worst <= 1e-8,
        format!("20 draws at N=4096, max |C_L-closed|={worst:.2e}<=1e-8"),
    )
}

fn ac4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let grid = QuadratureGrid::new(4096, 1).unwrap();
    let (mut local, mut dist, mut ent) = (0.0f64, 0.0f64, 0.0f64);
    for theta in interior_sweep(100) {
        let p = U2Params::new(theta, random_angle(&mut rng), random_angle(&mut rng));
        let spec = line_walk(p);
        let b = random_bloch(&mut rng);
        let r = rho_asymptotic(
            &spec,
            &InitialState::local(vec![0], bloch_coin(b)).unwrap(),
            &grid,
        )
        .unwrap();
        local = local.max(pair_gap(&r.eigenvalues, eigenvalues_local_general(p, b)));
        let r = rho_asymptotic(
            &spec,
            &InitialState::local(vec![0], basis_coin(2, 0)).unwrap(),
            &grid,
        )
        .unwrap();
        let d = theta.cos().abs() / (2.0 * theta.sin() + 2.0);
        local = local.max(pair_gap(&r.eigenvalues, (0.5 + d, 0.5 - d)));
        let r = rho_asymptotic(&spec, &InitialState::split_pair(), &grid).unwrap();
        dist = dist.max(pair_gap(&r.eigenvalues, eigenvalues_distributed_example(p)));
        let r = rho_asymptotic(&spec, &InitialState::entangled_pair(), &grid).unwrap();
        ent = ent.max(pair_gap(&r.eigenvalues, eigenvalues_entangled_example(p)));
    }
    let worst = local.max(dist).max(ent);
    outcome(
        worst <= 1e-8,
        format!("100-point sweeps, gaps local={local:.2e} distributed={dist:.2e} entangled={ent:.2e} <=1e-8"),
    )
}

fn ac5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = QuadratureGrid::new(4096, 1).unwrap();
    let (mut closed, mut numeric) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let p = random_u2_params(&mut rng, 0.05);
        let q = p.shift_phases(random_angle(&mut rng));
        let b = random_bloch(&mut rng);
        let chi = bloch_coin(b);
        closed = closed.max(c_local_u2(p).matrix().max_abs_diff(c_local_u2(q).matrix()));
        let (a, c) = (
            rho_local_closed(p, &chi).unwrap(),
            rho_local_closed(q, &chi).unwrap(),
        );
        closed = closed
            .max(a.rho.matrix().max_abs_diff(c.rho.matrix()))
            .max(pair_gap(
                &a.eigenvalues,
                (c.eigenvalues[0], c.eigenvalues[1]),
            ))
            .max((a.cpe - c.cpe).abs());
        let state = InitialState::local(vec![0], chi).unwrap();
        let (a, c) = (
            rho_asymptotic(&line_walk(p), &state, &grid).unwrap(),
            rho_asymptotic(&line_walk(q), &state, &grid).unwrap(),
        );
        numeric = numeric
            .max(a.rho.matrix().max_abs_diff(c.rho.matrix()))
            .max(pair_gap(
                &a.eigenvalues,
                (c.eigenvalues[0], c.eigenvalues[1]),
            ))
            .max((a.cpe - c.cpe).abs());
    }
    outcome(
        closed <= 1e-12 && numeric <= 1e-8,
        format!(
            "20 draws, closed-form drift={closed:.2e}<=1e-12, numeric drift={numeric:.2e}<=1e-8"
        ),
    )
}

fn ac6() -> Outcome {
    let spec = line_walk(U2Params::hadamard());
    let state = InitialState::local(vec![0], basis_coin(2, 0)).unwrap();
    let target = zero_state_rho(FRAC_PI_4);
    let late = cesaro_rho(&spec, &state, 2000, 100)
        .unwrap()
        .matrix()
        .max_abs_diff(&target);
    let early = cesaro_rho(&spec, &state, 250, 100)
        .unwrap()
        .matrix()
        .max_abs_diff(&target);
    outcome(
        late <= 0.02 && late < early,
        format!("residual t=2000: {late:.2e}<=0.02, t=250: {early:.2e} (must be larger)"),
    )
}

fn ac7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut structure = 0.0f64;
    let mut skipped = 0;
    for _ in 0..200 {
        let d = rng.gen_range(1..=2);
        let n = rng.gen_range(2..=4);
        let spec = random_walk_spec(&mut rng, d, n);
        let k = random_k(&mut rng, d);
        if eig_uk(&spec, &k, DEFAULT_DEGENERACY_TOL)
            .unwrap()
            .is_degenerate()
        {
            skipped += 1;
            continue;
        }
        let c = characteristic_at_k(&spec, &k, DEFAULT_DEGENERACY_TOL).unwrap();
        let m = c.matrix();
        let id = CMatrix::identity(n);
        structure = structure
            .max(m.hermiticity_defect())
            .max(c.swap_defect())
            .max(m.partial_trace(Subsystem::First).unwrap().max_abs_diff(&id))
            .max(
                m.partial_trace(Subsystem::Second)
                    .unwrap()
                    .max_abs_diff(&id),
            );
    }
    let (mut density, mut forms, mut rho_skipped) = (0.0f64, 0.0f64, 0);
    for _ in 0..30 {
        let d = rng.gen_range(1..=2);
        let n = rng.gen_range(2..=3);
        let spec = random_walk_spec(&mut rng, d, n);
        let state = random_general_state(&mut rng, d, n, 3);
        let grid = QuadratureGrid::new(if d == 1 { 256 } else { 32 }, d).unwrap();
        match rho_asymptotic(&spec, &state, &grid) {
            Ok(r) => {
                let m = r.rho.matrix();
                let min = r.eigenvalues.last().copied().unwrap_or(0.0);
                density = density
                    .max(m.hermiticity_defect())
                    .max((m.trace().re - 1.0).abs())
                    .max(m.trace().im.abs())
                    .max((-min).max(0.0));
                forms = forms.max(r.diagnostics.form_residual);
            }
            Err(Error::DegenerateCoin(_)) => rho_skipped += 1,
            Err(e) => return outcome(false, format!("unexpected error: {e}")),
        }
    }
    outcome(
        structure <= 1e-10 && density <= 1e-8 && forms <= 1e-10 && skipped < 20 && rho_skipped < 10,
        format!(
            "C(k) defects={structure:.2e}<=1e-10 ({skipped}/200 degenerate skipped), \
             rho defects={density:.2e}<=1e-8, trace forms={forms:.2e}<=1e-10 ({rho_skipped}/30 skipped)"
        ),
    )
}

/// Strict local minima after merging neighbours equal within `floor`.
fn local_minima(points: &[(f64, f64)], floor: f64) -> Vec<f64> {
    let mut runs: Vec<(f64, f64)> = Vec::new();
    for &(t, v) in points {
        match runs.last() {
            Some(&(_, last)) if (v - last).abs() <= floor => {}
            _ => runs.push((t, v)),
        }
    }
    (1..runs.len().saturating_sub(1))
        .filter(|&i| runs[i].1 < runs[i - 1].1 && runs[i].1 < runs[i + 1].1)
        .map(|i| runs[i].0)
        .collect()
}

fn ac8() -> Outcome {
    let (code, out) = qwalk(&["fig", "cpe-entangled"]);
    let points: Vec<(f64, f64)> = out
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("theta"))
        .map(|l| {
            let (t, c) = l.split_once(',').expect("two columns");
            (t.parse().unwrap(), c.parse().unwrap())
        })
        .filter(|&(t, _)| t > 0.05 && t < PI - 0.05)
        .collect();
    let lowest = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let minima = local_minima(&points, 1e-12);
    let placed = minima.len() == 2
        && (minima[0] - FRAC_PI_8).abs() <= 0.1
        && (minima[1] - 7.0 * FRAC_PI_8).abs() <= 0.1;
    outcome(
        code == 0 && lowest >= 0.98 && placed && points.len() > 900,
        format!("{} rows, min cpe={lowest:.6}>=0.98, minima at {minima:.4?} (want 2, within 0.1 of pi/8, 7pi/8)", points.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "AC1 hadamard local-state CPE via rho",
            Duration::from_secs(5),
            ac1,
        ),
        (
            "AC2 closed-form C(k) equivalence",
            Duration::from_secs(2),
            ac2,
        ),
        ("AC3 C_L quadrature", Duration::from_secs(30), ac3),
        ("AC4 eigenvalue formulas", Duration::from_secs(120), ac4),
        (
            "AC5 phase-difference invariance",
            Duration::from_secs(30),
            ac5,
        ),
        (
            "AC6 time-average oracle convergence",
            Duration::from_secs(60),
            ac6,
        ),
        ("AC7 structural invariants", Duration::from_secs(60), ac7),
        ("AC8 entangled figure minima", Duration::from_secs(10), ac8),
    ];
    let mut all = true;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let pass = result.pass && elapsed <= limit;
        all &= pass;
        println!(
            "{} {name}: {}; runtime {:.3}s (limit {}s)",
            if pass { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
