//! Eigendecomposition of normal matrices (unitary and Hermitian).
//!
//! 2×2 unitaries use the closed-form quadratic. Everything else goes through
//! a complex Schur reduction: Householder to Hessenberg form, then
//! single-shift QR sweeps with Wilkinson shifts. For a normal matrix the
//! Schur factor is diagonal to rounding, so the Schur vectors are already an
//! orthonormal eigenbasis and no back-substitution is needed.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{inner, vec_norm, CMatrix, CVector};
use crate::error::{Error, Result};

/// Phases closer than this (radians) share an eigenspace.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

/// Unitarity tolerance checked on entry to [`eig_unitary`].
const UNITARY_INPUT_TOL: f64 = 1e-10;

const MAX_SWEEPS_PER_EIGENVALUE: usize = 100;

#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Eigenphases ω ∈ (−π, π], one per vector.
    pub phases: Vec<f64>,
    /// Orthonormal eigenvectors; `vectors[j]` belongs to `phases[j]`.
    pub vectors: Vec<CVector>,
    /// Index sets of eigenspaces, ordered by ascending phase.
    pub groups: Vec<Vec<usize>>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.groups.iter().any(|g| g.len() > 1)
    }

    /// Orthogonal projector onto one eigenspace.
    pub fn projector(&self, group: usize) -> CMatrix {
        let n = self.dim();
        let mut p = CMatrix::zeros(n, n);
        for &j in &self.groups[group] {
            p.add_scaled(
                &CMatrix::outer(&self.vectors[j], &self.vectors[j]),
                Complex64::new(1.0, 0.0),
            );
        }
        p
    }

    pub fn projectors(&self) -> Vec<CMatrix> {
        (0..self.groups.len()).map(|g| self.projector(g)).collect()
    }

    /// Σ e^{iω} P_ω
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        let mut u = CMatrix::zeros(n, n);
        for (w, v) in self.phases.iter().zip(&self.vectors) {
            u.add_scaled(&CMatrix::outer(v, v), Complex64::from_polar(1.0, *w));
        }
        u
    }

    /// Largest column residual ‖U v_j − e^{iω_j} v_j‖.
    pub fn max_residual(&self, u: &CMatrix) -> f64 {
        self.phases
            .iter()
            .zip(&self.vectors)
            .map(|(&w, v)| {
                let uv = u.mul_vec(v);
                let lam = Complex64::from_polar(1.0, w);
                uv.iter()
                    .zip(v)
                    .map(|(a, b)| (a - lam * b).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// Principal argument mapped onto (−π, π].
fn principal_arg(z: Complex64) -> f64 {
    let w = z.arg();
    if w <= -PI {
        PI
    } else {
        w
    }
}

/// Spectral decomposition of a unitary matrix.
pub fn eig_unitary(u: &CMatrix, degeneracy_tol: f64) -> Result<EigenSystem> {
    let deviation = u.unitarity_defect();
    if !(deviation <= UNITARY_INPUT_TOL) {
        return Err(Error::NonUnitaryInput { deviation });
    }
    let n = u.rows();
    let (eigenvalues, mut vectors) = match n {
        1 => (vec![u[(0, 0)]], vec![vec![Complex64::new(1.0, 0.0)]]),
        2 => eig_2x2_unitary(u),
        _ => {
            let (t, z) = schur(u)?;
            (
                (0..n).map(|i| t[(i, i)]).collect(),
                (0..n).map(|j| z.column(j)).collect(),
            )
        }
    };
    let mut phases: Vec<f64> = eigenvalues.into_iter().map(principal_arg).collect();

    let groups = group_phases(&phases, degeneracy_tol);
    for g in groups.iter().filter(|g| g.len() > 1) {
        orthonormalize(&mut vectors, g);
        // Rayleigh quotients keep each phase consistent with its re-orthonormalized vector.
        for &j in g {
            let uv = u.mul_vec(&vectors[j]);
            phases[j] = principal_arg(inner(&vectors[j], &uv));
        }
    }

    Ok(EigenSystem {
        phases,
        vectors,
        groups,
    })
}

fn eig_2x2_unitary(u: &CMatrix) -> (Vec<Complex64>, Vec<CVector>) {
    let (a, b, c, d) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
    // Pick the root that avoids cancellation in tr ± disc.
    let s = if (tr.conj() * disc).re >= 0.0 {
        disc
    } else {
        -disc
    };
    let lam = (tr + s) * 0.5;

    let va = [b, lam - a];
    let vb = [lam - d, c];
    let (na, nb) = (vec_norm(&va), vec_norm(&vb));
    let scale = u.max_abs().max(1.0);
    let v1: CVector = if na.max(nb) <= 1e-14 * scale {
        // Scalar matrix: any basis diagonalizes it.
        vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
    } else if na >= nb {
        va.iter().map(|z| z / na).collect()
    } else {
        vb.iter().map(|z| z / nb).collect()
    };
    let v2: CVector = vec![-v1[1].conj(), v1[0].conj()];

    let l1 = inner(&v1, &u.mul_vec(&v1));
    let l2 = inner(&v2, &u.mul_vec(&v2));
    (vec![l1, l2], vec![v1, v2])
}

/// Partition indices into clusters whose phases agree within `tol` on the circle.
fn group_phases(phases: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..phases.len()).collect();
    order.sort_by(|&i, &j| phases[i].total_cmp(&phases[j]));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        match groups.last_mut() {
            Some(g) if phases[idx] - phases[*g.last().unwrap()] <= tol => g.push(idx),
            _ => groups.push(vec![idx]),
        }
    }
    // Phases near −π and π are neighbours on the circle.
    if groups.len() > 1 {
        let first = phases[groups[0][0]];
        let last = phases[*groups.last().unwrap().last().unwrap()];
        if first + 2.0 * PI - last <= tol {
            let head = groups.remove(0);
            groups.last_mut().unwrap().extend(head);
        }
    }
    groups
}

/// Modified Gram–Schmidt over the vectors named by `idx`.
pub(crate) fn orthonormalize(vectors: &mut [CVector], idx: &[usize]) {
    for (pos, &j) in idx.iter().enumerate() {
        for &i in &idx[..pos] {
            let proj = inner(&vectors[i], &vectors[j]);
            let vi = vectors[i].clone();
            for (x, y) in vectors[j].iter_mut().zip(&vi) {
                *x -= proj * y;
            }
        }
        let norm = vec_norm(&vectors[j]);
        for x in vectors[j].iter_mut() {
            *x /= norm;
        }
    }
}

/// Eigenvalues (descending) and eigenvectors of a Hermitian matrix.
///
/// Only the Hermitian part of `a` is used.
pub fn eigh(a: &CMatrix) -> Result<(Vec<f64>, Vec<CVector>)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let h = a.hermitian_part();
    let n = h.rows();
    if n == 1 {
        return Ok((vec![h[(0, 0)].re], vec![vec![Complex64::new(1.0, 0.0)]]));
    }
    let (t, z) = schur(&h)?;
    let mut pairs: Vec<(f64, CVector)> = (0..n).map(|i| (t[(i, i)].re, z.column(i))).collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    Ok(pairs.into_iter().unzip())
}

/// Complex Schur decomposition `A = Z T Z†` with `T` upper triangular.
pub(crate) fn schur(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = a.rows();
    let (mut h, mut z) = hessenberg(a);
    let norm = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;

    let mut hi = n - 1;
    let mut sweeps = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // Find the start of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let scale = (h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm()).max(norm * 1e-3);
            if sub <= eps * scale {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            sweeps = 0;
            continue;
        }

        sweeps += 1;
        total += 1;
        if sweeps > MAX_SWEEPS_PER_EIGENVALUE {
            return Err(Error::ConvergenceFailure { iterations: total });
        }
        let mu = if sweeps.is_multiple_of(11) {
            // Exceptional shift breaks rare cycles.
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        qr_sweep(&mut h, &mut z, lo, hi, mu);
    }

    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok((h, z))
}

fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut z = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: CVector = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = vec_norm(&x);
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut v = x;
        v[0] += phase * xnorm;
        let vnorm = vec_norm(&v);
        for vi in v.iter_mut() {
            *vi /= vnorm;
        }
        // H ← (I − 2vv†) H
        for j in 0..n {
            let s: Complex64 = v
                .iter()
                .enumerate()
                .map(|(i, vi)| vi.conj() * h[(k + 1 + i, j)])
                .sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= 2.0 * vi * s;
            }
        }
        // H ← H (I − 2vv†), Z ← Z (I − 2vv†)
        for m in [&mut h, &mut z] {
            for i in 0..n {
                let s: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(j, vj)| m[(i, k + 1 + j)] * vj)
                    .sum();
                for (j, vj) in v.iter().enumerate() {
                    m[(i, k + 1 + j)] -= 2.0 * s * vj.conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    (h, z)
}

/// Eigenvalue of the trailing 2×2 block closest to its last diagonal entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let root = (half * half + b * c).sqrt();
    let den_plus = half + root;
    let den_minus = half - root;
    let den = if den_plus.norm() >= den_minus.norm() {
        den_plus
    } else {
        den_minus
    };
    if den.norm() == 0.0 {
        d
    } else {
        d - b * c / den
    }
}

/// Givens rotation `[[c, s], [−s̄, c]]` mapping (x, y) to (r, 0); `c` is real.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if r == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if x.norm() == 0.0 {
        return (0.0, y.conj() / y.norm());
    }
    let phase = x / x.norm();
    (x.norm() / r, phase * y.conj() / r)
}

/// One explicit shifted QR step on the active block `lo..=hi`.
fn qr_sweep(h: &mut CMatrix, z: &mut CMatrix, lo: usize, hi: usize, mu: Complex64) {
    let n = h.rows();
    for i in lo..=hi {
        h[(i, i)] -= mu;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for j in lo..hi {
        let (c, s) = givens(h[(j, j)], h[(j + 1, j)]);
        for k in j..n {
            let (x, y) = (h[(j, k)], h[(j + 1, k)]);
            h[(j, k)] = c * x + s * y;
            h[(j + 1, k)] = -s.conj() * x + c * y;
        }
        h[(j + 1, j)] = Complex64::new(0.0, 0.0);
        rotations.push((j, c, s));
    }
    for &(j, c, s) in &rotations {
        let upper = (j + 2).min(hi + 1);
        for i in 0..upper {
            let (x, y) = (h[(i, j)], h[(i, j + 1)]);
            h[(i, j)] = x * c + y * s.conj();
            h[(i, j + 1)] = -x * s + y * c;
        }
        for i in 0..n {
            let (x, y) = (z[(i, j)], z[(i, j + 1)]);
            z[(i, j)] = x * c + y * s.conj();
            z[(i, j + 1)] = -x * s + y * c;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += mu;
    }
}
