//! Long-time reduced coin state `ρ̂_c = ∫ Tr₁((P₀(k) ⊗ I) C(k)) dk/(2π)^d`
//! and closed-form references for the U(2) line walk.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;

use crate::characteristic::{
    c_local_u2, c_local_with, c_separable_with, contract, PointwiseSource, QuadratureGrid,
};
use crate::error::{Error, Result};
use crate::linalg::{vec_norm, von_neumann_entropy, CMatrix, DensityMatrix, Subsystem};
use crate::states::{bloch_coin, BlochCoin, InitialState};
use crate::walk::{U2Params, WalkSpec};

/// Budget for `‖Tr₁(P₀⊗I·C) − Tr₂(I⊗P₀·C)‖_max`.
pub const FORM_EQUIVALENCE_TOL: f64 = 1e-10;

/// Largest anti-Hermitian part tolerated before symmetrizing.
pub const ASYMMETRY_TOL: f64 = 1e-10;

/// Density-matrix validation tolerance after quadrature.
pub const RESULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Numerical eigendecomposition of `U_k` at every node.
    NumericQuadrature,
    /// U(2) closed-form `C(k)` integrated on the grid.
    ClosedFormQuadrature,
    /// Contraction of the closed-form `C_L`.
    ClosedFormLocal,
    /// Reference matrices quoted for specific states.
    ClosedFormReference,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::NumericQuadrature => "numeric_quadrature",
            Method::ClosedFormQuadrature => "closed_form_quadrature",
            Method::ClosedFormLocal => "closed_form_local",
            Method::ClosedFormReference => "closed_form_reference",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    /// Largest disagreement between the `Tr₁` and `Tr₂` contractions.
    pub form_residual: f64,
    /// `‖ρ − ρ†‖_max / 2` before symmetrization.
    pub asymmetry: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticResult {
    pub rho: DensityMatrix,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Entropy of `rho` in bits.
    pub cpe: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl AsymptoticResult {
    /// Validates, symmetrizes and diagonalizes a raw coin matrix.
    pub fn from_matrix(raw: CMatrix, method: Method, form_residual: f64) -> Result<Self> {
        if !(form_residual <= FORM_EQUIVALENCE_TOL) {
            return Err(Error::Numerical(format!(
                "trace forms disagree by {form_residual:.3e} (budget {FORM_EQUIVALENCE_TOL:.0e})"
            )));
        }
        let asymmetry = raw.hermiticity_defect() / 2.0;
        if !(asymmetry <= ASYMMETRY_TOL) {
            return Err(Error::Numerical(format!(
                "coin matrix asymmetry {asymmetry:.3e}"
            )));
        }
        let rho = DensityMatrix::with_tolerance(raw.hermitian_part(), RESULT_TOL)?;
        let eigenvalues = rho.eigenvalues();
        let cpe = von_neumann_entropy(&rho);
        Ok(Self {
            rho,
            eigenvalues,
            cpe,
            method,
            diagnostics: Diagnostics {
                form_residual,
                asymmetry,
            },
        })
    }
}

/// Coin-position entanglement of a pure global state, in bits.
pub fn cpe(result: &AsymptoticResult) -> f64 {
    von_neumann_entropy(&result.rho)
}

fn both_forms(c: &CMatrix, p: &CMatrix) -> Result<(CMatrix, f64)> {
    let first = contract(c, p, Subsystem::First)?;
    let second = contract(c, p, Subsystem::Second)?;
    let residual = first.max_abs_diff(&second);
    Ok((first, residual))
}

fn check_compatible(source: &PointwiseSource<'_>, state: &InitialState) -> Result<()> {
    if state.coin_dim() != source.coin_dim() {
        return Err(Error::DimensionMismatch {
            expected: source.coin_dim(),
            found: state.coin_dim(),
        });
    }
    if state.lattice_dim() != source.lattice_dim() {
        return Err(Error::DimensionMismatch {
            expected: source.lattice_dim(),
            found: state.lattice_dim(),
        });
    }
    Ok(())
}

/// `ρ̂_c` from numerical `C(k)` on `grid`.
pub fn rho_asymptotic(
    spec: &WalkSpec,
    state: &InitialState,
    grid: &QuadratureGrid,
) -> Result<AsymptoticResult> {
    rho_asymptotic_with(PointwiseSource::Numeric(spec), state, grid)
}

/// `ρ̂_c` on `grid` with the given pointwise `C(k)`.
///
/// Local and separable states use the integrated constants `C_L` and `C_S`;
/// general states contract `P₀(k)` node by node.
pub fn rho_asymptotic_with(
    source: PointwiseSource<'_>,
    state: &InitialState,
    grid: &QuadratureGrid,
) -> Result<AsymptoticResult> {
    check_compatible(&source, state)?;
    let method = match source {
        PointwiseSource::Numeric(_) => Method::NumericQuadrature,
        PointwiseSource::ClosedFormU2(_) => Method::ClosedFormQuadrature,
    };
    let (raw, residual) = match state {
        InitialState::Local { chi, .. } => {
            let cl = c_local_with(source, grid)?;
            both_forms(cl.matrix(), &CMatrix::outer(chi, chi))?
        }
        InitialState::SeparableDistributed { chi, .. } => {
            let q2 = |k: &_| {
                state
                    .position_factor(k)
                    .ok()
                    .flatten()
                    .map_or(f64::NAN, |q| q.norm_sqr())
            };
            let cs = c_separable_with(source, q2, grid)?;
            both_forms(cs.matrix(), &CMatrix::outer(chi, chi))?
        }
        InitialState::General { .. } => {
            if grid.dim() != source.lattice_dim() {
                return Err(Error::DimensionMismatch {
                    expected: source.lattice_dim(),
                    found: grid.dim(),
                });
            }
            source.ensure_dispersive()?;
            // Non-negative f64 bit patterns order like the values.
            let worst = AtomicU64::new(0);
            let n = state.coin_dim();
            let rho = grid.integrate(n, n, |k| {
                let (r, res) = both_forms(&source.at(k)?, &state.projector_k(k)?)?;
                worst.fetch_max(res.to_bits(), Ordering::Relaxed);
                Ok(r)
            })?;
            (rho, f64::from_bits(worst.into_inner()))
        }
    };
    AsymptoticResult::from_matrix(raw, method, residual)
}

fn u2_coin_vector(chi: &[Complex64]) -> Result<()> {
    if chi.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: chi.len(),
        });
    }
    let norm = vec_norm(chi);
    if !((norm - 1.0).abs() <= crate::states::STATE_NORM_TOL) {
        return Err(Error::InvalidState(format!("coin vector norm {norm}")));
    }
    Ok(())
}

/// `Tr₁(|χ⟩⟨χ| ⊗ I · C_L)` with the closed-form `C_L`.
pub fn rho_local_closed(p: U2Params, chi: &[Complex64]) -> Result<AsymptoticResult> {
    u2_coin_vector(chi)?;
    let (raw, residual) = both_forms(c_local_u2(p).matrix(), &CMatrix::outer(chi, chi))?;
    AsymptoticResult::from_matrix(raw, Method::ClosedFormLocal, residual)
}

/// Reference `ρ̂_c` for `(|−1⟩ + |+1⟩)/√2 ⊗ |0⟩`.
pub fn rho_distributed_closed(p: U2Params) -> Result<AsymptoticResult> {
    let (s, c) = p.theta.sin_cos();
    let (sa, ca) = p.alpha.sin_cos();
    let i = Complex64::i();
    let a = (Complex64::new(sa * sa, 0.0)
        + (0.5 - i * sa * Complex64::from_polar(1.0, -p.alpha)) / (s + 1.0))
        * Complex64::from_polar(c, p.beta - p.alpha);
    let b = s * sa * sa + ca * ca;
    let pref = s / (s + 1.0);
    let m = CMatrix::from_rows(&[
        vec![Complex64::new((s + 1.0) / s - b, 0.0), a],
        vec![a.conj(), Complex64::new(b, 0.0)],
    ])?
    .scale_real(pref);
    AsymptoticResult::from_matrix(m, Method::ClosedFormReference, 0.0)
}

fn pair(delta: f64) -> (f64, f64) {
    let d = delta.abs();
    (0.5 + d, 0.5 - d)
}

/// Eigenvalues for a local state with coin `cos(ξ/2)|0⟩ + e^{iη} sin(ξ/2)|1⟩`.
pub fn eigenvalues_local_general(p: U2Params, b: BlochCoin) -> (f64, f64) {
    let t2 = 2.0 * p.theta;
    let x2 = 2.0 * b.xi;
    let radicand =
        1.0 + t2.cos() * x2.cos() + t2.sin() * (p.alpha - p.beta - b.eta).cos() * x2.sin();
    pair(radicand.max(0.0).sqrt() / (2.0 * std::f64::consts::SQRT_2 * (p.theta.sin() + 1.0)))
}

/// Eigenvalues for `(|−1⟩ + |+1⟩)/√2 ⊗ |0⟩`.
pub fn eigenvalues_distributed_example(p: U2Params) -> (f64, f64) {
    let (s, c) = p.theta.sin_cos();
    let sa2 = p.alpha.sin().powi(2);
    let root = (4.0 * s * s * sa2 + 4.0 * s * sa2 + 1.0).sqrt();
    pair(c.abs() * root / (2.0 * (s + 1.0).powi(2)))
}

/// Eigenvalues for `(|−1⟩⊗|0⟩ + |+1⟩⊗|1⟩)/√2`.
pub fn eigenvalues_entangled_example(p: U2Params) -> (f64, f64) {
    let s = p.theta.sin();
    pair(s * (1.0 - s) / (2.0 * (1.0 + s).powi(2)))
}

/// Local-state eigenvalues for a Bloch coin, via the closed-form `C_L`.
pub fn rho_local_bloch(p: U2Params, b: BlochCoin) -> Result<AsymptoticResult> {
    rho_local_closed(p, &bloch_coin(b))
}
