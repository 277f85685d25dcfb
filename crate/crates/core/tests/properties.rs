use num_complex::Complex64;
use proptest::prelude::*;
use qwalk::asymptotics::{rho_asymptotic, rho_local_closed};
use qwalk::characteristic::{c_of_k_u2, characteristic_at_k, QuadratureGrid};
use qwalk::linalg::{eig_unitary, von_neumann_entropy, DEFAULT_DEGENERACY_TOL};
use qwalk::sampling::{
    random_bloch, random_general_state, random_k, random_u2_params, random_unitary,
    random_walk_spec,
};
use qwalk::states::{bloch_coin, InitialState};
use qwalk::walk::{build_uk, dispersion_gamma, eig_uk, line_walk, KPoint};
use qwalk::{CMatrix, DensityMatrix, Error, Subsystem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn step_operator_is_unitary(seed in any::<u64>(), d in 1usize..=2, n in 2usize..=4) {
        let mut r = rng(seed);
        let spec = random_walk_spec(&mut r, d, n);
        let uk = build_uk(&spec, &random_k(&mut r, d)).unwrap();
        prop_assert!(uk.unitarity_defect() <= 1e-12);
    }

    #[test]
    fn characteristic_structure(seed in any::<u64>(), d in 1usize..=2, n in 2usize..=4) {
        let mut r = rng(seed);
        let spec = random_walk_spec(&mut r, d, n);
        let k = random_k(&mut r, d);
        let es = eig_uk(&spec, &k, DEFAULT_DEGENERACY_TOL).unwrap();
        prop_assume!(!es.is_degenerate());
        let c = characteristic_at_k(&spec, &k, DEFAULT_DEGENERACY_TOL).unwrap();
        let m = c.matrix();
        prop_assert!(m.hermiticity_defect() <= 1e-10);
        prop_assert!(c.swap_defect() <= 1e-10);
        let id = CMatrix::identity(n);
        prop_assert!(m.partial_trace(Subsystem::First).unwrap().max_abs_diff(&id) <= 1e-10);
        prop_assert!(m.partial_trace(Subsystem::Second).unwrap().max_abs_diff(&id) <= 1e-10);
    }

    #[test]
    fn global_coin_phase_leaves_characteristic_unchanged(seed in any::<u64>(), phi in -3.0f64..3.0) {
        let mut r = rng(seed);
        let spec = random_walk_spec(&mut r, 1, 3);
        let k = random_k(&mut r, 1);
        prop_assume!(!eig_uk(&spec, &k, DEFAULT_DEGENERACY_TOL).unwrap().is_degenerate());
        let a = characteristic_at_k(&spec, &k, DEFAULT_DEGENERACY_TOL).unwrap();
        let b = characteristic_at_k(&spec.with_global_phase(phi), &k, DEFAULT_DEGENERACY_TOL).unwrap();
        prop_assert!(a.matrix().max_abs_diff(b.matrix()) <= 1e-10);
    }

    #[test]
    fn u2_eigenphases_are_plus_minus_gamma(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_u2_params(&mut r, 0.05);
        let k = random_k(&mut r, 1);
        let es = eig_unitary(&build_uk(&line_walk(p), &k).unwrap(), DEFAULT_DEGENERACY_TOL).unwrap();
        let g = dispersion_gamma(p, k.components()[0]);
        let mut phases = es.phases.clone();
        phases.sort_by(f64::total_cmp);
        prop_assert!((phases[0] + g).abs() <= 1e-10 && (phases[1] - g).abs() <= 1e-10);
    }

    #[test]
    fn closed_form_characteristic_matches_numeric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_u2_params(&mut r, 0.05);
        let k = random_k(&mut r, 1);
        let closed = c_of_k_u2(p, k.components()[0]).unwrap();
        let numeric = characteristic_at_k(&line_walk(p), &k, DEFAULT_DEGENERACY_TOL).unwrap();
        prop_assert!(closed.matrix().max_abs_diff(numeric.matrix()) <= 1e-10);
    }

    #[test]
    fn partial_trace_is_linear(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let mut r = rng(seed);
        let x = random_unitary(9, &mut r);
        let y = random_unitary(9, &mut r);
        for which in [Subsystem::First, Subsystem::Second] {
            let mut sum = x.scale_real(a);
            sum.add_scaled(&y, Complex64::new(b, 0.0));
            let lhs = sum.partial_trace(which).unwrap();
            let mut rhs = x.partial_trace(which).unwrap().scale_real(a);
            rhs.add_scaled(&y.partial_trace(which).unwrap(), Complex64::new(b, 0.0));
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        }
    }

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let psi: Vec<_> = random_unitary(n * n, &mut r).column(0);
        let joint = CMatrix::outer(&psi, &psi);
        let rho = joint.partial_trace(Subsystem::First).unwrap();
        let v = random_unitary(n, &mut r);
        let rotated = &(&v * &rho) * &v.adjoint();
        let e1 = von_neumann_entropy(&DensityMatrix::new(rho).unwrap());
        let e2 = von_neumann_entropy(&DensityMatrix::new(rotated.hermitian_part()).unwrap());
        prop_assert!((e1 - e2).abs() <= 1e-10);
    }

    #[test]
    fn parseval_on_the_grid(seed in any::<u64>(), d in 1usize..=2, n in 2usize..=3, sites in 1usize..6) {
        let mut r = rng(seed);
        let state = random_general_state(&mut r, d, n, sites);
        let grid = QuadratureGrid::new(16, d).unwrap();
        let total = grid.integrate_scalar(|k| state.psi_k(k).unwrap().iter().map(|z| z.norm_sqr()).sum());
        prop_assert!((total - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn projector_is_rank_one(seed in any::<u64>()) {
        let mut r = rng(seed);
        let state = random_general_state(&mut r, 1, 3, 4);
        let p = state.projector_k(&random_k(&mut r, 1)).unwrap();
        let (values, _) = qwalk::linalg::eigh(&p).unwrap();
        prop_assert!(values[1..].iter().all(|v| v.abs() <= 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn asymptotic_state_is_a_density_matrix(seed in any::<u64>(), d in 1usize..=2, n in 2usize..=3) {
        let mut r = rng(seed);
        let spec = random_walk_spec(&mut r, d, n);
        let state = random_general_state(&mut r, d, n, 3);
        let grid = QuadratureGrid::new(if d == 1 { 128 } else { 24 }, d).unwrap();
        match rho_asymptotic(&spec, &state, &grid) {
            Ok(res) => {
                let m = res.rho.matrix();
                prop_assert!(m.hermiticity_defect() <= 1e-8);
                prop_assert!((m.trace().re - 1.0).abs() <= 1e-8);
                prop_assert!(res.eigenvalues.iter().all(|&l| l >= -1e-8));
                prop_assert!(res.diagnostics.form_residual <= 1e-10);
            }
            // A node landing on an eigenvalue crossing is reported, not averaged over.
            Err(Error::DegenerateCoin(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn local_closed_form_matches_pipeline(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_u2_params(&mut r, 0.05);
        let b = random_bloch(&mut r);
        let state = InitialState::local(vec![0], bloch_coin(b)).unwrap();
        let grid = QuadratureGrid::new(4096, 1).unwrap();
        let num = rho_asymptotic(&line_walk(p), &state, &grid).unwrap();
        let closed = rho_local_closed(p, &bloch_coin(b)).unwrap();
        prop_assert!(num.rho.matrix().max_abs_diff(closed.rho.matrix()) <= 1e-8);
    }
}

#[test]
fn local_projector_does_not_depend_on_k() {
    let mut r = rng(5);
    let state = InitialState::local(vec![7, -2], bloch_coin(random_bloch(&mut r))).unwrap();
    let p0 = state
        .projector_k(&KPoint::new(vec![0.0, 0.0]).unwrap())
        .unwrap();
    for _ in 0..20 {
        let p = state.projector_k(&random_k(&mut r, 2)).unwrap();
        assert!(p.max_abs_diff(&p0) <= 1e-12);
    }
}

#[test]
fn separable_projector_factorizes() {
    let state: InitialState = "dist {-2:0.3+0.1i, 0:-0.5i, 3:0.8} chi=bloch(1.2, 0.4)"
        .parse()
        .unwrap();
    let InitialState::SeparableDistributed { chi, .. } = &state else {
        panic!()
    };
    let pc = CMatrix::outer(chi, chi);
    let mut r = rng(9);
    for _ in 0..20 {
        let k = random_k(&mut r, 1);
        let q = state.position_factor(&k).unwrap().unwrap();
        let want = pc.scale_real(q.norm_sqr());
        assert!(state.projector_k(&k).unwrap().max_abs_diff(&want) <= 1e-12);
    }
}
