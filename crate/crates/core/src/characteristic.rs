//! Characteristic matrices `C(k) = Σ_ω P_ω ⊗ P_ω` and their Brillouin-zone
//! integrals.
//!
//! Contracting `C` with an initial-state projector gives the long-time coin
//! state: `ρ̂ = ∫ Tr₁((P₀(k) ⊗ I) C(k)) dk/(2π)^d`. For a local initial state
//! `P₀` is constant, so only the integrated matrix `C_L = ∫ C(k)` is needed;
//! for a separable distributed state the weight `|Q(k)|²` folds into `C_S`.
//!
//! Integration uses the uniform rule on the periodic torus. Nodes are
//! evaluated in parallel in fixed-size chunks, and partial sums are combined
//! in node order, so the result does not depend on the thread count.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, EigenSystem, Subsystem, DEFAULT_DEGENERACY_TOL};
use crate::walk::{dispersion_gamma, eig_uk, line_walk, KPoint, U2Params, WalkSpec};

/// `c_of_k_u2` refuses points where sin²γ falls below this.
pub const MIN_SIN2_GAMMA: f64 = 1e-14;

/// Default points per axis for one-dimensional walks.
pub const DEFAULT_POINTS_1D: usize = 4096;

/// Default points per axis for two-dimensional walks.
pub const DEFAULT_POINTS_2D: usize = 256;

/// Allowed deviation of `∫|Q(k)|²` from 1.
pub const NORMALIZATION_TOL: f64 = 1e-6;

const CHUNK: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub enum CharacteristicKind {
    Pointwise(KPoint),
    IntegratedLocal,
    IntegratedSeparable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicMatrix {
    coin_dim: usize,
    matrix: CMatrix,
    kind: CharacteristicKind,
}

impl CharacteristicMatrix {
    fn new(matrix: CMatrix, kind: CharacteristicKind) -> Self {
        let coin_dim = (matrix.rows() as f64).sqrt().round() as usize;
        debug_assert_eq!(coin_dim * coin_dim, matrix.rows());
        Self {
            coin_dim,
            matrix,
            kind,
        }
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn kind(&self) -> &CharacteristicKind {
        &self.kind
    }

    /// `‖SWAP·C·SWAP − C‖_max`
    pub fn swap_defect(&self) -> f64 {
        self.matrix
            .swap_factors()
            .map(|s| s.max_abs_diff(&self.matrix))
            .unwrap_or(f64::INFINITY)
    }

    /// `Tr₁((P ⊗ I) C)` for [`Subsystem::First`], `Tr₂((I ⊗ P) C)` for [`Subsystem::Second`].
    pub fn contract(&self, projector: &CMatrix, which: Subsystem) -> Result<CMatrix> {
        contract(&self.matrix, projector, which)
    }
}

pub(crate) fn contract(c: &CMatrix, projector: &CMatrix, which: Subsystem) -> Result<CMatrix> {
    let n = projector.rows();
    if !projector.is_square() || n * n != c.rows() {
        return Err(Error::DimensionMismatch {
            expected: (c.rows() as f64).sqrt().round() as usize,
            found: n,
        });
    }
    let id = CMatrix::identity(n);
    let lifted = match which {
        Subsystem::First => projector.kron(&id),
        Subsystem::Second => id.kron(projector),
    };
    (&lifted * c).partial_trace(which)
}

/// Uniform rule on `[−π, π)^d` with `N` points per axis and weight `1/N^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureGrid {
    points_per_axis: usize,
    dim: usize,
}

impl QuadratureGrid {
    pub fn new(points_per_axis: usize, dim: usize) -> Result<Self> {
        if points_per_axis == 0 || dim == 0 {
            return Err(Error::InvalidWalk(
                "quadrature grid needs N >= 1 and d >= 1".into(),
            ));
        }
        points_per_axis
            .checked_pow(dim as u32)
            .ok_or_else(|| Error::InvalidWalk("quadrature grid too large".into()))?;
        Ok(Self {
            points_per_axis,
            dim,
        })
    }

    /// Default resolution for a walk's lattice dimension.
    pub fn default_for(dim: usize) -> Result<Self> {
        let n = if dim <= 1 {
            DEFAULT_POINTS_1D
        } else {
            DEFAULT_POINTS_2D
        };
        Self::new(n, dim)
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.len() as f64
    }

    /// `−π + 2πj/N`, j = 0..N.
    pub fn axis(&self) -> Vec<f64> {
        let n = self.points_per_axis as f64;
        (0..self.points_per_axis)
            .map(|j| -PI + 2.0 * PI * j as f64 / n)
            .collect()
    }

    /// Node with flat index `idx`; the last axis varies fastest.
    pub fn node(&self, mut idx: usize) -> KPoint {
        let n = self.points_per_axis;
        let mut comps = vec![0.0; self.dim];
        for c in comps.iter_mut().rev() {
            *c = -PI + 2.0 * PI * (idx % n) as f64 / n as f64;
            idx /= n;
        }
        KPoint::new(comps).expect("grid nodes lie in [-pi, pi)")
    }

    pub fn nodes(&self) -> impl Iterator<Item = KPoint> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }

    /// `Σ_nodes w · f(k)` with a reduction order fixed by the node order.
    pub fn integrate<F>(&self, rows: usize, cols: usize, f: F) -> Result<CMatrix>
    where
        F: Fn(&KPoint) -> Result<CMatrix> + Sync,
    {
        let len = self.len();
        let chunks: Vec<(usize, usize)> = (0..len)
            .step_by(CHUNK)
            .map(|s| (s, (s + CHUNK).min(len)))
            .collect();
        let partial: Vec<CMatrix> = chunks
            .par_iter()
            .map(|&(start, end)| {
                let mut acc = CMatrix::zeros(rows, cols);
                for i in start..end {
                    acc.add_scaled(&f(&self.node(i))?, Complex64::new(1.0, 0.0));
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        let mut total = CMatrix::zeros(rows, cols);
        for p in &partial {
            total.add_scaled(p, Complex64::new(1.0, 0.0));
        }
        Ok(total.scale_real(self.weight()))
    }

    /// `Σ_nodes w · f(k)` for scalar integrands, same ordering contract.
    pub fn integrate_scalar<F>(&self, f: F) -> f64
    where
        F: Fn(&KPoint) -> f64 + Sync,
    {
        let len = self.len();
        let chunks: Vec<(usize, usize)> = (0..len)
            .step_by(CHUNK)
            .map(|s| (s, (s + CHUNK).min(len)))
            .collect();
        let partial: Vec<f64> = chunks
            .par_iter()
            .map(|&(start, end)| (start..end).map(|i| f(&self.node(i))).sum::<f64>())
            .collect();
        partial.iter().sum::<f64>() * self.weight()
    }
}

/// `Σ_g P_g ⊗ P_g` over the eigenspaces of a spectral decomposition.
pub fn characteristic_from_eigensystem(es: &EigenSystem) -> CMatrix {
    let n = es.dim();
    let mut c = CMatrix::zeros(n * n, n * n);
    for p in es.projectors() {
        c.add_scaled(&p.kron(&p), Complex64::new(1.0, 0.0));
    }
    c
}

/// `C(k)` from the numerical spectral decomposition of `U_k`.
pub fn characteristic_at_k(
    spec: &WalkSpec,
    k: &KPoint,
    degeneracy_tol: f64,
) -> Result<CharacteristicMatrix> {
    let es = eig_uk(spec, k, degeneracy_tol)?;
    Ok(CharacteristicMatrix::new(
        characteristic_from_eigensystem(&es),
        CharacteristicKind::Pointwise(k.clone()),
    ))
}

/// The scalars `(L, G, F)` of the closed-form U(2) characteristic matrix.
pub fn u2_lgf(p: U2Params, k: f64) -> Result<(f64, Complex64, Complex64)> {
    let (s, c) = p.theta.sin_cos();
    let cos_gamma = c * (k - p.alpha).cos();
    let sin2_gamma = 1.0 - cos_gamma * cos_gamma;
    if !(sin2_gamma >= MIN_SIN2_GAMMA) {
        return Err(Error::DegenerateDispersion { sin2_gamma });
    }
    let l = s * s / (2.0 * sin2_gamma);
    let g = -l * Complex64::from_polar(1.0, 2.0 * (k - p.beta));
    let f = Complex64::new(0.0, (k - p.alpha).sin() * s * c / (2.0 * sin2_gamma))
        * Complex64::from_polar(1.0, k - p.beta);
    Ok((l, g, f))
}

/// Lays `(L, G, F)` out as the 4×4 U(2) characteristic matrix.
pub fn assemble_u2(l: f64, g: Complex64, f: Complex64) -> CMatrix {
    let lc = Complex64::new(l, 0.0);
    let one_minus = Complex64::new(1.0 - l, 0.0);
    CMatrix::from_rows(&[
        vec![one_minus, -f.conj(), -f.conj(), g.conj()],
        vec![-f, lc, lc, f.conj()],
        vec![-f, lc, lc, f.conj()],
        vec![g, f, f, one_minus],
    ])
    .expect("4x4 literal")
}

/// Closed-form `C(k)` for the U(2) line walk.
pub fn c_of_k_u2(p: U2Params, k: f64) -> Result<CharacteristicMatrix> {
    let (l, g, f) = u2_lgf(p, k)?;
    Ok(CharacteristicMatrix::new(
        assemble_u2(l, g, f),
        CharacteristicKind::Pointwise(KPoint::line(k)?),
    ))
}

/// Aborts numerical integration for walks outside the dispersive regime.
fn ensure_dispersive(spec: &WalkSpec) -> Result<()> {
    if spec.has_monomial_coin() {
        return Err(Error::DegenerateCoin(
            "coin never mixes coin states (Pauli-type, e.g. theta = 0 or pi/2); \
             stationary-phase asymptotics do not apply"
                .into(),
        ));
    }
    Ok(())
}

fn nondegenerate_c(spec: &WalkSpec, k: &KPoint) -> Result<CMatrix> {
    let es = eig_uk(spec, k, DEFAULT_DEGENERACY_TOL)?;
    if es.is_degenerate() {
        return Err(Error::DegenerateCoin(format!(
            "step operator has a degenerate eigenvalue at k = {:?}",
            k.components()
        )));
    }
    Ok(characteristic_from_eigensystem(&es))
}

/// Pointwise `C(k)` used inside integrals: numerical, or the U(2) closed form
/// with a numerical fallback where the closed form is singular.
#[derive(Debug, Clone, Copy)]
pub enum PointwiseSource<'a> {
    Numeric(&'a WalkSpec),
    ClosedFormU2(U2Params),
}

impl PointwiseSource<'_> {
    pub fn coin_dim(&self) -> usize {
        match self {
            Self::Numeric(spec) => spec.coin_dim(),
            Self::ClosedFormU2(_) => 2,
        }
    }

    pub fn lattice_dim(&self) -> usize {
        match self {
            Self::Numeric(spec) => spec.lattice_dim(),
            Self::ClosedFormU2(_) => 1,
        }
    }

    pub fn ensure_dispersive(&self) -> Result<()> {
        match self {
            Self::Numeric(spec) => ensure_dispersive(spec),
            Self::ClosedFormU2(p) => ensure_dispersive(&line_walk(*p)),
        }
    }

    pub fn at(&self, k: &KPoint) -> Result<CMatrix> {
        match self {
            Self::Numeric(spec) => nondegenerate_c(spec, k),
            Self::ClosedFormU2(p) => match c_of_k_u2(*p, k.components()[0]) {
                Ok(c) => Ok(c.matrix),
                Err(Error::DegenerateDispersion { .. }) => nondegenerate_c(&line_walk(*p), k),
                Err(e) => Err(e),
            },
        }
    }
}

fn check_grid(source: &PointwiseSource<'_>, grid: &QuadratureGrid) -> Result<()> {
    if grid.dim() != source.lattice_dim() {
        return Err(Error::DimensionMismatch {
            expected: source.lattice_dim(),
            found: grid.dim(),
        });
    }
    Ok(())
}

/// `C_L = ∫ C(k) dk/(2π)^d` on the grid.
pub fn c_local_with(
    source: PointwiseSource<'_>,
    grid: &QuadratureGrid,
) -> Result<CharacteristicMatrix> {
    check_grid(&source, grid)?;
    source.ensure_dispersive()?;
    let n2 = source.coin_dim().pow(2);
    let m = grid.integrate(n2, n2, |k| source.at(k))?;
    Ok(CharacteristicMatrix::new(
        m,
        CharacteristicKind::IntegratedLocal,
    ))
}

pub fn c_local(spec: &WalkSpec, grid: &QuadratureGrid) -> Result<CharacteristicMatrix> {
    c_local_with(PointwiseSource::Numeric(spec), grid)
}

/// `C_S = ∫ |Q(k)|² C(k) dk/(2π)^d`; `q2` must integrate to 1.
pub fn c_separable_with<Q>(
    source: PointwiseSource<'_>,
    q2: Q,
    grid: &QuadratureGrid,
) -> Result<CharacteristicMatrix>
where
    Q: Fn(&KPoint) -> f64 + Sync,
{
    check_grid(&source, grid)?;
    let total = grid.integrate_scalar(&q2);
    if !((total - 1.0).abs() <= NORMALIZATION_TOL) {
        return Err(Error::Normalization(format!(
            "weight integrates to {total}, expected 1"
        )));
    }
    if let Some(k) = grid.nodes().find(|k| !(q2(k) >= 0.0)) {
        return Err(Error::Normalization(format!(
            "negative weight at k = {:?}",
            k.components()
        )));
    }
    source.ensure_dispersive()?;
    let n2 = source.coin_dim().pow(2);
    let m = grid.integrate(n2, n2, |k| Ok(source.at(k)?.scale_real(q2(k))))?;
    Ok(CharacteristicMatrix::new(
        m,
        CharacteristicKind::IntegratedSeparable,
    ))
}

pub fn c_separable<Q>(spec: &WalkSpec, q2: Q, grid: &QuadratureGrid) -> Result<CharacteristicMatrix>
where
    Q: Fn(&KPoint) -> f64 + Sync,
{
    c_separable_with(PointwiseSource::Numeric(spec), q2, grid)
}

/// `f` and `g` of the closed-form local characteristic matrix.
pub fn local_f_g(p: U2Params) -> (Complex64, Complex64) {
    let (s, c) = p.theta.sin_cos();
    let f = Complex64::from_polar(s * c / (s + 1.0), p.alpha - p.beta);
    let g = Complex64::from_polar(1.0, 2.0 * (p.alpha - p.beta)) * (s * (s - 1.0) / (s + 1.0));
    (f, g)
}

/// Closed-form `C_L` of the U(2) line walk, valid for θ ∈ (0, π/2).
pub fn c_local_u2(p: U2Params) -> CharacteristicMatrix {
    let s = Complex64::new(p.theta.sin(), 0.0);
    let d = Complex64::new(2.0, 0.0) - s;
    let (f, g) = local_f_g(p);
    let m = CMatrix::from_rows(&[
        vec![d, f.conj(), f.conj(), g.conj()],
        vec![f, s, s, -f.conj()],
        vec![f, s, s, -f.conj()],
        vec![g, -f, -f, d],
    ])
    .expect("4x4 literal")
    .scale_real(0.5);
    CharacteristicMatrix::new(m, CharacteristicKind::IntegratedLocal)
}

/// Eigenphases ±γ of the U(2) line walk at `k`, for cross-checks.
pub fn u2_eigenphases(p: U2Params, k: f64) -> [f64; 2] {
    let g = dispersion_gamma(p, k);
    [-g, g]
}
