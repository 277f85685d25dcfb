//! Brute-force position-space evolution: coin at every site, then the
//! coin-conditioned shift. Serves as a finite-time check on the asymptotics.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{vec_norm, CMatrix, CVector, DensityMatrix};
use crate::states::{InitialState, Position};
use crate::walk::WalkSpec;

/// Tolerance for the density matrices produced here.
pub const SIMULATION_TOL: f64 = 1e-9;

/// Sparse lattice wavefunction after `t` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    pub t: usize,
    pub amplitudes: BTreeMap<Position, CVector>,
}

impl LatticeState {
    pub fn from_initial(state: &InitialState) -> Self {
        Self {
            t: 0,
            amplitudes: state.amplitudes(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|c| vec_norm(c).powi(2)).sum()
    }

    /// One step of the walk; sites whose amplitude vanishes exactly are dropped.
    pub fn step(&self, spec: &WalkSpec) -> Result<Self> {
        check_shapes(
            spec,
            self.amplitudes.keys().next().map(Vec::len),
            self.amplitudes.values().next().map(Vec::len),
        )?;
        let n = spec.coin_dim();
        let coin = spec.coin();
        let mut next: BTreeMap<Position, CVector> = BTreeMap::new();
        for (r, c) in &self.amplitudes {
            let mixed = coin.mul_vec(c);
            for (j, amp) in mixed.into_iter().enumerate() {
                if amp == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let target: Position = r
                    .iter()
                    .zip(&spec.shifts()[j])
                    .map(|(a, b)| a + b)
                    .collect();
                next.entry(target)
                    .or_insert_with(|| vec![Complex64::new(0.0, 0.0); n])[j] += amp;
            }
        }
        Ok(Self {
            t: self.t + 1,
            amplitudes: next,
        })
    }

    /// `Σ_r |c_r⟩⟨c_r|`
    pub fn rho_c_matrix(&self) -> CMatrix {
        let n = self.amplitudes.values().next().map_or(0, Vec::len);
        let mut rho = CMatrix::zeros(n, n);
        for c in self.amplitudes.values() {
            accumulate_outer(&mut rho, c);
        }
        rho
    }

    pub fn rho_c_at_t(&self) -> Result<DensityMatrix> {
        DensityMatrix::with_tolerance(self.rho_c_matrix(), SIMULATION_TOL)
    }
}

fn check_shapes(
    spec: &WalkSpec,
    lattice_dim: Option<usize>,
    coin_dim: Option<usize>,
) -> Result<()> {
    if let Some(d) = lattice_dim.filter(|&d| d != spec.lattice_dim()) {
        return Err(Error::DimensionMismatch {
            expected: spec.lattice_dim(),
            found: d,
        });
    }
    if let Some(n) = coin_dim.filter(|&n| n != spec.coin_dim()) {
        return Err(Error::DimensionMismatch {
            expected: spec.coin_dim(),
            found: n,
        });
    }
    Ok(())
}

fn accumulate_outer(rho: &mut CMatrix, c: &[Complex64]) {
    for (i, ci) in c.iter().enumerate() {
        for (j, cj) in c.iter().enumerate() {
            rho[(i, j)] += ci * cj.conj();
        }
    }
}

/// Line walk stored as one contiguous array over `[lo, lo + len)`.
#[derive(Debug, Clone)]
struct DenseLine {
    lo: i64,
    n: usize,
    data: Vec<Complex64>,
}

impl DenseLine {
    fn new(state: &InitialState, n: usize) -> Self {
        let amps = state.amplitudes();
        let lo = amps.keys().map(|r| r[0]).min().unwrap_or(0);
        let hi = amps.keys().map(|r| r[0]).max().unwrap_or(0);
        let mut data = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize * n];
        for (r, c) in amps {
            let base = (r[0] - lo) as usize * n;
            data[base..base + n].copy_from_slice(&c);
        }
        Self { lo, n, data }
    }

    fn sites(&self) -> usize {
        self.data.len() / self.n
    }

    fn step(&mut self, coin: &CMatrix, shifts: &[i64], reach: i64) {
        let n = self.n;
        let sites = self.sites();
        let mut next = vec![Complex64::new(0.0, 0.0); (sites + 2 * reach as usize) * n];
        let mut mixed = vec![Complex64::new(0.0, 0.0); n];
        for x in 0..sites {
            let c = &self.data[x * n..(x + 1) * n];
            for (j, m) in mixed.iter_mut().enumerate() {
                *m = coin.row(j).iter().zip(c).map(|(a, b)| a * b).sum();
            }
            for (j, &amp) in mixed.iter().enumerate() {
                let target = (x as i64 + reach + shifts[j]) as usize;
                next[target * n + j] += amp;
            }
        }
        self.lo -= reach;
        self.data = next;
    }

    fn rho(&self) -> CMatrix {
        let mut rho = CMatrix::zeros(self.n, self.n);
        for c in self.data.chunks_exact(self.n) {
            accumulate_outer(&mut rho, c);
        }
        rho
    }

    fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    fn to_lattice(&self, t: usize) -> LatticeState {
        let amplitudes = self
            .data
            .chunks_exact(self.n)
            .enumerate()
            .filter(|(_, c)| c.iter().any(|z| z.norm_sqr() > 0.0))
            .map(|(x, c)| (vec![self.lo + x as i64], c.to_vec()))
            .collect();
        LatticeState { t, amplitudes }
    }
}

#[derive(Debug, Clone)]
enum Storage {
    Dense(DenseLine),
    Sparse(LatticeState),
}

/// A running evolution; dense storage on the line, sparse otherwise.
#[derive(Debug, Clone)]
pub struct Trajectory {
    spec: WalkSpec,
    t: usize,
    storage: Storage,
}

impl Trajectory {
    pub fn new(spec: &WalkSpec, state: &InitialState) -> Result<Self> {
        check_shapes(spec, Some(state.lattice_dim()), Some(state.coin_dim()))?;
        let storage = if spec.lattice_dim() == 1 {
            Storage::Dense(DenseLine::new(state, spec.coin_dim()))
        } else {
            Storage::Sparse(LatticeState::from_initial(state))
        };
        Ok(Self {
            spec: spec.clone(),
            t: 0,
            storage,
        })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn advance(&mut self) -> Result<()> {
        match &mut self.storage {
            Storage::Dense(line) => {
                let shifts: Vec<i64> = self.spec.shifts().iter().map(|s| s[0]).collect();
                line.step(self.spec.coin(), &shifts, self.spec.max_step());
            }
            Storage::Sparse(s) => *s = s.step(&self.spec)?,
        }
        self.t += 1;
        Ok(())
    }

    /// `ρ_c(t)` without validation.
    pub fn rho_c(&self) -> CMatrix {
        match &self.storage {
            Storage::Dense(line) => line.rho(),
            Storage::Sparse(s) => s.rho_c_matrix(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        match &self.storage {
            Storage::Dense(line) => line.norm_sqr(),
            Storage::Sparse(s) => s.norm_sqr(),
        }
    }

    pub fn lattice_state(&self) -> LatticeState {
        match &self.storage {
            Storage::Dense(line) => line.to_lattice(self.t),
            Storage::Sparse(s) => LatticeState {
                t: self.t,
                amplitudes: s.amplitudes.clone(),
            },
        }
    }
}

/// Burn-in used when none is given: 5% of the run.
pub fn default_burn_in(t_max: usize) -> usize {
    t_max / 20
}

/// `(1/(t_max − burn_in)) Σ_{t = burn_in+1}^{t_max} ρ_c(t)`
pub fn cesaro_rho(
    spec: &WalkSpec,
    state: &InitialState,
    t_max: usize,
    burn_in: usize,
) -> Result<DensityMatrix> {
    if t_max <= burn_in {
        return Err(Error::InvalidArgument(format!(
            "t_max ({t_max}) must exceed burn_in ({burn_in})"
        )));
    }
    let mut traj = Trajectory::new(spec, state)?;
    let n = spec.coin_dim();
    let mut sum = CMatrix::zeros(n, n);
    while traj.t() < t_max {
        traj.advance()?;
        if traj.t() > burn_in {
            sum.add_scaled(&traj.rho_c(), Complex64::new(1.0, 0.0));
        }
    }
    let avg = sum.scale_real(1.0 / (t_max - burn_in) as f64);
    DensityMatrix::with_tolerance(avg.hermitian_part(), SIMULATION_TOL)
}

/// `ρ_c(t)` for `t = 0, every, 2·every, …, ≤ t_max`.
pub fn rho_series(
    spec: &WalkSpec,
    state: &InitialState,
    t_max: usize,
    every: usize,
) -> Result<Vec<(usize, CMatrix)>> {
    if every == 0 {
        return Err(Error::InvalidArgument(
            "sampling interval must be positive".into(),
        ));
    }
    let mut traj = Trajectory::new(spec, state)?;
    let mut out = vec![(0, traj.rho_c())];
    while traj.t() < t_max {
        traj.advance()?;
        if traj.t() % every == 0 {
            out.push((traj.t(), traj.rho_c()));
        }
    }
    Ok(out)
}
