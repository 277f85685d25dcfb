//! Walk definition: coin, shift table and the momentum-space step operator.
//!
//! A step applies the coin and then moves coin component `j` by `shifts[j]`.
//! In momentum space this is the n×n matrix
//! `U_k = diag_j(e^{−i k·s_j}) · U_C`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eig_unitary, CMatrix, EigenSystem};
use crate::text::{format_complex, parse_complex};

/// Unitarity tolerance for coins accepted into a [`WalkSpec`].
pub const COIN_UNITARY_TOL: f64 = 1e-10;

/// Entries at or below this modulus count as zero when classifying coins.
const MONOMIAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct WalkSpec {
    lattice_dim: usize,
    shifts: Vec<Vec<i64>>,
    coin: CMatrix,
}

impl WalkSpec {
    pub fn new(lattice_dim: usize, shifts: Vec<Vec<i64>>, coin: CMatrix) -> Result<Self> {
        if lattice_dim == 0 {
            return Err(Error::InvalidWalk(
                "lattice dimension must be at least 1".into(),
            ));
        }
        if !coin.is_square() {
            return Err(Error::InvalidWalk(format!(
                "coin is {}x{}, not square",
                coin.rows(),
                coin.cols()
            )));
        }
        if shifts.len() != coin.rows() {
            return Err(Error::DimensionMismatch {
                expected: coin.rows(),
                found: shifts.len(),
            });
        }
        if let Some(bad) = shifts.iter().find(|s| s.len() != lattice_dim) {
            return Err(Error::DimensionMismatch {
                expected: lattice_dim,
                found: bad.len(),
            });
        }
        let deviation = coin.unitarity_defect();
        if !(deviation <= COIN_UNITARY_TOL) {
            return Err(Error::NonUnitaryInput { deviation });
        }
        Ok(Self {
            lattice_dim,
            shifts,
            coin,
        })
    }

    pub fn lattice_dim(&self) -> usize {
        self.lattice_dim
    }

    pub fn coin_dim(&self) -> usize {
        self.coin.rows()
    }

    pub fn shifts(&self) -> &[Vec<i64>] {
        &self.shifts
    }

    pub fn coin(&self) -> &CMatrix {
        &self.coin
    }

    /// Largest |component| over all shift vectors.
    pub fn max_step(&self) -> i64 {
        self.shifts
            .iter()
            .flatten()
            .map(|x| x.abs())
            .max()
            .unwrap_or(0)
    }

    /// A coin with a single nonzero per row (Pauli-type for n = 2) never
    /// mixes coin states, so the walk has no interference to dephase.
    pub fn has_monomial_coin(&self) -> bool {
        self.coin.is_monomial(MONOMIAL_TOL)
    }

    /// Same walk with the coin multiplied by `e^{iφ}`.
    pub fn with_global_phase(&self, phi: f64) -> Self {
        Self {
            coin: self.coin.scale(Complex64::from_polar(1.0, phi)),
            ..self.clone()
        }
    }
}

/// Angles of the U(2) coin with the global phase dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct U2Params {
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl U2Params {
    pub fn new(theta: f64, alpha: f64, beta: f64) -> Self {
        Self { theta, alpha, beta }
    }

    /// θ = π/4, α = β = π/2: the Hadamard coin up to a global phase.
    pub fn hadamard() -> Self {
        Self::new(PI / 4.0, PI / 2.0, PI / 2.0)
    }

    /// Pauli-type coin (sin θ = 0 or cos θ = 0) outside the dispersive regime.
    pub fn is_degenerate(&self) -> bool {
        let (s, c) = self.theta.sin_cos();
        s.abs() <= MONOMIAL_TOL || c.abs() <= MONOMIAL_TOL
    }

    /// Shifts α and β by the same amount.
    pub fn shift_phases(&self, delta: f64) -> Self {
        Self::new(self.theta, self.alpha + delta, self.beta + delta)
    }
}

/// Point of the Brillouin zone.
#[derive(Debug, Clone, PartialEq)]
pub struct KPoint(Vec<f64>);

impl KPoint {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if let Some(&k) = components.iter().find(|k| !(k.abs() <= PI)) {
            return Err(Error::InvalidWalk(format!(
                "k component {k} outside [-pi, pi]"
            )));
        }
        Ok(Self(components))
    }

    pub fn line(k: f64) -> Result<Self> {
        Self::new(vec![k])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, r: &[i64]) -> f64 {
        self.0.iter().zip(r).map(|(k, &x)| k * x as f64).sum()
    }
}

/// `[[e^{iα}cosθ, e^{iβ}sinθ], [−e^{−iβ}sinθ, e^{−iα}cosθ]]`
pub fn u2_coin(p: U2Params) -> CMatrix {
    let (s, c) = p.theta.sin_cos();
    let ea = Complex64::from_polar(1.0, p.alpha);
    let eb = Complex64::from_polar(1.0, p.beta);
    CMatrix::from_rows(&[vec![ea * c, eb * s], vec![-eb.conj() * s, ea.conj() * c]])
        .expect("2x2 literal")
}

/// Walk on the line: coin state |0⟩ steps to +1, |1⟩ to −1.
pub fn line_walk(p: U2Params) -> WalkSpec {
    WalkSpec::new(1, vec![vec![1], vec![-1]], u2_coin(p)).expect("U(2) coin is unitary")
}

/// Momentum-space step operator `diag_j(e^{−i k·s_j}) · U_C`.
pub fn build_uk(spec: &WalkSpec, k: &KPoint) -> Result<CMatrix> {
    if k.dim() != spec.lattice_dim {
        return Err(Error::DimensionMismatch {
            expected: spec.lattice_dim,
            found: k.dim(),
        });
    }
    let phases: Vec<Complex64> = spec
        .shifts
        .iter()
        .map(|s| Complex64::from_polar(1.0, -k.dot(s)))
        .collect();
    let n = spec.coin_dim();
    Ok(CMatrix::from_fn(n, n, |i, j| phases[i] * spec.coin[(i, j)]))
}

/// Spectral decomposition of `U_k`.
pub fn eig_uk(spec: &WalkSpec, k: &KPoint, degeneracy_tol: f64) -> Result<EigenSystem> {
    eig_unitary(&build_uk(spec, k)?, degeneracy_tol)
}

/// γ ∈ [0, π] with cos γ = cos θ cos(k − α); the line walk's eigenphases are ±γ.
pub fn dispersion_gamma(p: U2Params, k: f64) -> f64 {
    (p.theta.cos() * (k - p.alpha).cos())
        .clamp(-1.0, 1.0)
        .acos()
}

impl fmt::Display for WalkSpec {
    /// Writes the config grammar read by [`WalkSpec::from_str`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim = {}", self.lattice_dim)?;
        for i in 0..self.coin_dim() {
            let row: Vec<String> = self
                .coin
                .row(i)
                .iter()
                .map(|&z| format_complex(z))
                .collect();
            writeln!(f, "coin = {}", row.join(", "))?;
        }
        for s in &self.shifts {
            let v: Vec<String> = s.iter().map(|x| x.to_string()).collect();
            writeln!(f, "shift = {}", v.join(", "))?;
        }
        Ok(())
    }
}

impl FromStr for WalkSpec {
    type Err = Error;

    /// Line-oriented `key = value` config:
    ///
    /// ```text
    /// # Hadamard walk on the line
    /// dim = 1
    /// coin = 0.70710678118654757, 0.70710678118654757
    /// coin = 0.70710678118654757, -0.70710678118654757
    /// shift = 1
    /// shift = -1
    /// ```
    ///
    /// `coin` lines give matrix rows in order as complex literals; `shift`
    /// lines give one integer vector per coin state, in coin-basis order.
    fn from_str(s: &str) -> Result<Self> {
        let mut dim: Option<usize> = None;
        let mut rows: Vec<Vec<Complex64>> = Vec::new();
        let mut shifts: Vec<Vec<i64>> = Vec::new();
        for (lineno, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| Error::Parse(format!("line {}: {msg}", lineno + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected `key = value`, got `{line}`")))?;
            let value = value.trim();
            match key.trim() {
                "dim" => {
                    if dim.is_some() {
                        return Err(at("duplicate `dim`".into()));
                    }
                    dim = Some(
                        value
                            .parse()
                            .map_err(|_| at(format!("invalid dimension `{value}`")))?,
                    );
                }
                "coin" => rows.push(
                    value
                        .split(',')
                        .map(parse_complex)
                        .collect::<Result<Vec<_>>>()
                        .map_err(|e| at(e.to_string()))?,
                ),
                "shift" => shifts.push(
                    value
                        .split(',')
                        .map(|x| {
                            x.trim()
                                .parse::<i64>()
                                .map_err(|_| at(format!("invalid shift component `{x}`")))
                        })
                        .collect::<Result<Vec<_>>>()?,
                ),
                other => return Err(at(format!("unknown key `{other}`"))),
            }
        }
        let dim = dim.ok_or_else(|| Error::Parse("missing `dim`".into()))?;
        if rows.is_empty() {
            return Err(Error::Parse("missing `coin` rows".into()));
        }
        WalkSpec::new(dim, shifts, CMatrix::from_rows(&rows)?)
    }
}
