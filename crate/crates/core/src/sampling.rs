//! Random walks, momenta and states for property checks and the verify report.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;

use crate::linalg::eigen::orthonormalize;
use crate::linalg::{CMatrix, CVector};
use crate::states::{BlochCoin, InitialState};
use crate::walk::{KPoint, U2Params, WalkSpec};

/// Unitary from Gram–Schmidt on box-uniform complex columns (not Haar).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<CVector> = (0..n).map(|_| random_vector(n, rng)).collect();
    let idx: Vec<usize> = (0..n).collect();
    orthonormalize(&mut cols, &idx);
    CMatrix::from_fn(n, n, |i, j| cols[j][i])
}

fn random_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Angle in `(−π, π]`.
pub fn random_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    PI - rng.gen_range(0.0..2.0 * PI)
}

/// U(2) angles with `θ` in `(margin, π/2 − margin)`.
pub fn random_u2_params<R: Rng + ?Sized>(rng: &mut R, margin: f64) -> U2Params {
    U2Params::new(
        rng.gen_range(margin..FRAC_PI_2 - margin),
        random_angle(rng),
        random_angle(rng),
    )
}

pub fn random_bloch<R: Rng + ?Sized>(rng: &mut R) -> BlochCoin {
    BlochCoin::new(rng.gen_range(0.0..=PI), random_angle(rng))
}

/// Momentum with components in `[−π, π)`.
pub fn random_k<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> KPoint {
    KPoint::new((0..dim).map(|_| rng.gen_range(-PI..PI)).collect()).expect("components in range")
}

/// Random coin with shifts drawn from `[−2, 2]^d`.
pub fn random_walk_spec<R: Rng + ?Sized>(
    rng: &mut R,
    lattice_dim: usize,
    coin_dim: usize,
) -> WalkSpec {
    let shifts = (0..coin_dim)
        .map(|_| (0..lattice_dim).map(|_| rng.gen_range(-2..=2)).collect())
        .collect();
    WalkSpec::new(lattice_dim, shifts, random_unitary(coin_dim, rng))
        .expect("random coin is unitary")
}

/// Normalized general state supported on `sites` random positions in `[−3, 3]^d`.
pub fn random_general_state<R: Rng + ?Sized>(
    rng: &mut R,
    lattice_dim: usize,
    coin_dim: usize,
    sites: usize,
) -> InitialState {
    let mut amps: BTreeMap<Vec<i64>, CVector> = BTreeMap::new();
    while amps.len() < sites.max(1) {
        let r = (0..lattice_dim).map(|_| rng.gen_range(-3..=3)).collect();
        amps.insert(r, random_vector(coin_dim, rng));
    }
    InitialState::General { amps }
        .normalized()
        .expect("nonzero random state")
}
