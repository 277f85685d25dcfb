//! Initial walker states and their momentum-space components.
//!
//! `ψ_k = Σ_r e^{−i k·r} c_r`, the convention under which
//! `ψ_k(t+1) = U_k ψ_k(t)` for the step operator of [`crate::walk::build_uk`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{vec_norm, CMatrix, CVector};
use crate::text::{format_complex, parse_angle, parse_complex};
use crate::walk::KPoint;

/// Normalization tolerance for constructed states.
pub const STATE_NORM_TOL: f64 = 1e-12;

pub type Position = Vec<i64>;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// `|v⟩ ⊗ |χ⟩`
    Local { position: Position, chi: CVector },
    /// `(Σ_n a_n |n⟩) ⊗ |χ⟩`
    SeparableDistributed {
        amps: BTreeMap<Position, Complex64>,
        chi: CVector,
    },
    /// `Σ_r |r⟩ ⊗ |c_r⟩`, possibly entangled.
    General { amps: BTreeMap<Position, CVector> },
}

/// Coin state `cos(ξ/2)|0⟩ + e^{iη} sin(ξ/2)|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochCoin {
    pub xi: f64,
    pub eta: f64,
}

impl BlochCoin {
    pub fn new(xi: f64, eta: f64) -> Self {
        Self { xi, eta }
    }
}

pub fn bloch_coin(b: BlochCoin) -> CVector {
    let (s, c) = (b.xi / 2.0).sin_cos();
    vec![Complex64::new(c, 0.0), Complex64::from_polar(s, b.eta)]
}

/// Basis vector `|j⟩` of an n-dimensional coin.
pub fn basis_coin(n: usize, j: usize) -> CVector {
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[j] = Complex64::new(1.0, 0.0);
    v
}

fn check_unit(norm_sqr: f64, what: &str) -> Result<()> {
    if !((norm_sqr - 1.0).abs() <= STATE_NORM_TOL) {
        return Err(Error::InvalidState(format!(
            "{what} has squared norm {norm_sqr}, expected 1"
        )));
    }
    Ok(())
}

fn check_positions<'a>(mut positions: impl Iterator<Item = &'a Position>) -> Result<()> {
    let Some(first) = positions.next() else {
        return Err(Error::InvalidState("state has no support".into()));
    };
    if first.is_empty() {
        return Err(Error::InvalidState(
            "positions need at least one coordinate".into(),
        ));
    }
    let d = first.len();
    if let Some(bad) = positions.find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.len(),
        });
    }
    Ok(())
}

fn phase(k: &KPoint, r: &[i64]) -> Complex64 {
    Complex64::from_polar(1.0, -k.dot(r))
}

impl InitialState {
    pub fn local(position: Position, chi: CVector) -> Result<Self> {
        check_positions(std::iter::once(&position))?;
        check_unit(vec_norm(&chi).powi(2), "coin vector")?;
        Ok(Self::Local { position, chi })
    }

    pub fn separable(amps: BTreeMap<Position, Complex64>, chi: CVector) -> Result<Self> {
        check_positions(amps.keys())?;
        check_unit(vec_norm(&chi).powi(2), "coin vector")?;
        check_unit(
            amps.values().map(|a| a.norm_sqr()).sum(),
            "position amplitudes",
        )?;
        Ok(Self::SeparableDistributed { amps, chi })
    }

    pub fn general(amps: BTreeMap<Position, CVector>) -> Result<Self> {
        check_positions(amps.keys())?;
        let n = amps.values().next().map(Vec::len).unwrap_or(0);
        if n == 0 {
            return Err(Error::InvalidState("empty coin vectors".into()));
        }
        if let Some(bad) = amps.values().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        check_unit(amps.values().map(|c| vec_norm(c).powi(2)).sum(), "state")?;
        Ok(Self::General { amps })
    }

    /// `(|−1⟩⊗|0⟩ + |+1⟩⊗|1⟩)/√2` on the line.
    pub fn entangled_pair() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = BTreeMap::new();
        amps.insert(
            vec![-1],
            vec![Complex64::new(s, 0.0), Complex64::new(0.0, 0.0)],
        );
        amps.insert(
            vec![1],
            vec![Complex64::new(0.0, 0.0), Complex64::new(s, 0.0)],
        );
        Self::General { amps }
    }

    /// `(|−1⟩ + |+1⟩)/√2 ⊗ |0⟩` on the line.
    pub fn split_pair() -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let amps = BTreeMap::from([(vec![-1], s), (vec![1], s)]);
        Self::SeparableDistributed {
            amps,
            chi: basis_coin(2, 0),
        }
    }

    /// Same state with its norm rescaled to 1; fails on the zero vector.
    pub fn normalized(self) -> Result<Self> {
        let scale = |x: f64| -> Result<f64> {
            if x > 0.0 && x.is_finite() {
                Ok(1.0 / x.sqrt())
            } else {
                Err(Error::InvalidState("state has zero norm".into()))
            }
        };
        match self {
            Self::Local { position, chi } => {
                let s = scale(vec_norm(&chi).powi(2))?;
                Self::local(position, chi.iter().map(|z| z * s).collect())
            }
            Self::SeparableDistributed { amps, chi } => {
                let sa = scale(amps.values().map(|a| a.norm_sqr()).sum())?;
                let sc = scale(vec_norm(&chi).powi(2))?;
                Self::separable(
                    amps.into_iter().map(|(r, a)| (r, a * sa)).collect(),
                    chi.iter().map(|z| z * sc).collect(),
                )
            }
            Self::General { amps } => {
                let s = scale(amps.values().map(|c| vec_norm(c).powi(2)).sum())?;
                Self::general(
                    amps.into_iter()
                        .map(|(r, c)| (r, c.iter().map(|z| z * s).collect()))
                        .collect(),
                )
            }
        }
    }

    pub fn coin_dim(&self) -> usize {
        match self {
            Self::Local { chi, .. } | Self::SeparableDistributed { chi, .. } => chi.len(),
            Self::General { amps } => amps.values().next().map(Vec::len).unwrap_or(0),
        }
    }

    pub fn lattice_dim(&self) -> usize {
        match self {
            Self::Local { position, .. } => position.len(),
            Self::SeparableDistributed { amps, .. } => {
                amps.keys().next().map(Vec::len).unwrap_or(0)
            }
            Self::General { amps } => amps.keys().next().map(Vec::len).unwrap_or(0),
        }
    }

    /// Position-space amplitudes `r ↦ c_r`.
    pub fn amplitudes(&self) -> BTreeMap<Position, CVector> {
        match self {
            Self::Local { position, chi } => BTreeMap::from([(position.clone(), chi.clone())]),
            Self::SeparableDistributed { amps, chi } => amps
                .iter()
                .map(|(r, a)| (r.clone(), chi.iter().map(|z| a * z).collect()))
                .collect(),
            Self::General { amps } => amps.clone(),
        }
    }

    fn check_k(&self, k: &KPoint) -> Result<()> {
        if k.dim() != self.lattice_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.lattice_dim(),
                found: k.dim(),
            });
        }
        Ok(())
    }

    /// `Q(k) = Σ_n a_n e^{−i k·n}` for separable states; `e^{−i k·v}` for local ones.
    pub fn position_factor(&self, k: &KPoint) -> Result<Option<Complex64>> {
        self.check_k(k)?;
        Ok(match self {
            Self::Local { position, .. } => Some(phase(k, position)),
            Self::SeparableDistributed { amps, .. } => {
                Some(amps.iter().map(|(r, a)| a * phase(k, r)).sum())
            }
            Self::General { .. } => None,
        })
    }

    /// Coin vector `ψ_k(0)`.
    pub fn psi_k(&self, k: &KPoint) -> Result<CVector> {
        self.check_k(k)?;
        Ok(match self {
            Self::Local { chi, .. } | Self::SeparableDistributed { chi, .. } => {
                let q = self.position_factor(k)?.expect("separable state");
                chi.iter().map(|z| q * z).collect()
            }
            Self::General { amps } => {
                let mut psi = vec![Complex64::new(0.0, 0.0); self.coin_dim()];
                for (r, c) in amps {
                    let ph = phase(k, r);
                    for (p, z) in psi.iter_mut().zip(c) {
                        *p += ph * z;
                    }
                }
                psi
            }
        })
    }

    /// `P₀(k) = |ψ_k(0)⟩⟨ψ_k(0)|`
    pub fn projector_k(&self, k: &KPoint) -> Result<CMatrix> {
        let psi = self.psi_k(k)?;
        Ok(CMatrix::outer(&psi, &psi))
    }
}

fn format_position(r: &[i64]) -> String {
    if r.len() == 1 {
        r[0].to_string()
    } else {
        let parts: Vec<String> = r.iter().map(i64::to_string).collect();
        format!("({})", parts.join(","))
    }
}

fn format_vector(v: &[Complex64]) -> String {
    let parts: Vec<String> = v.iter().map(|&z| format_complex(z)).collect();
    format!("({})", parts.join(","))
}

impl fmt::Display for InitialState {
    /// Writes the text grammar accepted by [`InitialState::from_str`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Local { position, chi } => {
                write!(
                    f,
                    "local v={} chi={}",
                    format_position(position),
                    format_vector(chi)
                )
            }
            Self::SeparableDistributed { amps, chi } => {
                let items: Vec<String> = amps
                    .iter()
                    .map(|(r, a)| format!("{}:{}", format_position(r), format_complex(*a)))
                    .collect();
                write!(
                    f,
                    "dist {{{}}} chi={}",
                    items.join(", "),
                    format_vector(chi)
                )
            }
            Self::General { amps } => {
                let items: Vec<String> = amps
                    .iter()
                    .map(|(r, c)| format!("{}:{}", format_position(r), format_vector(c)))
                    .collect();
                write!(f, "general {{{}}}", items.join(", "))
            }
        }
    }
}

/// Recursive-descent reader for the state grammar.
struct Reader<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in `{}`", self.pos, self.src))
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{token}`")))
        }
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let end = self
            .rest()
            .find(|c: char| !c.is_ascii_alphanumeric() && c != '_')
            .unwrap_or(self.rest().len());
        let w = &self.rest()[..end];
        self.pos += end;
        w
    }

    /// Raw text up to (not including) the first char in `stops` at nesting depth 0.
    fn until(&mut self, stops: &[char]) -> &'a str {
        self.skip_ws();
        let mut depth = 0i32;
        let mut end = self.rest().len();
        for (i, c) in self.rest().char_indices() {
            match c {
                '(' => depth += 1,
                ')' if depth > 0 => depth -= 1,
                _ if depth == 0 && stops.contains(&c) => {
                    end = i;
                    break;
                }
                _ => {}
            }
        }
        let s = &self.rest()[..end];
        self.pos += end;
        s.trim()
    }

    fn int(&mut self, s: &str) -> Result<i64> {
        s.trim()
            .parse()
            .map_err(|_| self.err(&format!("invalid integer `{s}`")))
    }

    fn position(&mut self) -> Result<Position> {
        if self.eat("(") {
            let inner = self.until(&[')']);
            self.expect(")")?;
            inner.split(',').map(|x| self.int(x)).collect()
        } else {
            let tok = self.until(&[':', ' ', '\t', ',', '}']);
            Ok(vec![self.int(tok)?])
        }
    }

    fn vector(&mut self) -> Result<CVector> {
        if self.eat("bloch") {
            self.expect("(")?;
            let inner = self.until(&[')']);
            self.expect(")")?;
            let (xi, eta) = inner
                .split_once(',')
                .ok_or_else(|| self.err("bloch needs (xi, eta)"))?;
            return Ok(bloch_coin(BlochCoin::new(
                parse_angle(xi)?,
                parse_angle(eta)?,
            )));
        }
        self.expect("(")?;
        let inner = self.until(&[')']);
        self.expect(")")?;
        inner.split(',').map(parse_complex).collect()
    }

    fn scalar(&mut self) -> Result<Complex64> {
        let tok = self.until(&[',', '}']);
        parse_complex(tok)
    }

    fn map<T>(
        &mut self,
        mut value: impl FnMut(&mut Self) -> Result<T>,
    ) -> Result<BTreeMap<Position, T>> {
        self.expect("{")?;
        let mut out = BTreeMap::new();
        loop {
            let r = self.position()?;
            self.expect(":")?;
            let v = value(self)?;
            if out.insert(r, v).is_some() {
                return Err(self.err("duplicate position"));
            }
            if self.eat("}") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn key(&mut self, name: &str) -> Result<()> {
        if self.word() != name {
            return Err(self.err(&format!("expected `{name}=`")));
        }
        self.expect("=")
    }

    fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.rest().is_empty() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing input"))
        }
    }
}

impl FromStr for InitialState {
    type Err = Error;

    /// Reads `local v=0 chi=(1,0)`, `dist {-1:0.7071, 1:0.7071} chi=(1,0)`
    /// or `general {-1:(0.7071,0), 1:(0,0.7071)}`.
    ///
    /// Positions are integers or tuples `(x,y)`; coin vectors are tuples of
    /// complex literals or `bloch(xi,eta)`. Amplitudes are rescaled to unit norm.
    fn from_str(s: &str) -> Result<Self> {
        let mut rd = Reader::new(s);
        let state = match rd.word() {
            "local" => {
                rd.key("v")?;
                let position = rd.position()?;
                rd.key("chi")?;
                let chi = rd.vector()?;
                InitialState::Local { position, chi }
            }
            "dist" => {
                let amps = rd.map(|r| r.scalar())?;
                rd.key("chi")?;
                let chi = rd.vector()?;
                InitialState::SeparableDistributed { amps, chi }
            }
            "general" => InitialState::General {
                amps: rd.map(|r| r.vector())?,
            },
            other => return Err(rd.err(&format!("unknown state kind `{other}`"))),
        };
        rd.finish()?;
        state.normalized()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn local_origin_is_k_independent() {
        let st = InitialState::local(vec![0], basis_coin(2, 0)).unwrap();
        for k in [-PI, -1.0, 0.0, 2.5] {
            let k = KPoint::line(k).unwrap();
            assert_eq!(st.psi_k(&k).unwrap(), basis_coin(2, 0));
            let p = st.projector_k(&k).unwrap();
            assert_eq!(
                p,
                CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap()
            );
        }
    }

    #[test]
    fn local_off_origin_projector_is_constant() {
        let st = InitialState::local(vec![3], bloch_coin(BlochCoin::new(1.0, 0.4))).unwrap();
        let p0 = st.projector_k(&KPoint::line(0.0).unwrap()).unwrap();
        let p1 = st.projector_k(&KPoint::line(1.3).unwrap()).unwrap();
        assert!(p0.max_abs_diff(&p1) < 1e-15);
    }

    #[test]
    fn split_pair_is_cosine_weighted() {
        let st = InitialState::split_pair();
        for k in [-2.0, 0.0, 0.7] {
            let kp = KPoint::line(k).unwrap();
            let psi = st.psi_k(&kp).unwrap();
            assert!(close(&psi, &[c(SQRT_2 * k.cos(), 0.0), c(0.0, 0.0)], 1e-15));
            let p = st.projector_k(&kp).unwrap();
            let want =
                CMatrix::from_real_rows(&[&[2.0 * k.cos().powi(2), 0.0], &[0.0, 0.0]]).unwrap();
            assert!(p.max_abs_diff(&want) < 1e-15);
        }
    }

    #[test]
    fn entangled_pair_projector() {
        let st = InitialState::entangled_pair();
        for k in [-1.1, 0.4, 3.0] {
            let kp = KPoint::line(k).unwrap();
            let psi = st.psi_k(&kp).unwrap();
            let want = [
                Complex64::from_polar(FRAC_1_SQRT_2, k),
                Complex64::from_polar(FRAC_1_SQRT_2, -k),
            ];
            assert!(close(&psi, &want, 1e-15));
            let p = st.projector_k(&kp).unwrap();
            let e2 = Complex64::from_polar(0.5, 2.0 * k);
            let want =
                CMatrix::from_rows(&[vec![c(0.5, 0.0), e2], vec![e2.conj(), c(0.5, 0.0)]]).unwrap();
            assert!(p.max_abs_diff(&want) < 1e-15);
        }
    }

    #[test]
    fn bloch_examples() {
        assert!(close(
            &bloch_coin(BlochCoin::new(0.0, 1.0)),
            &basis_coin(2, 0),
            0.0
        ));
        let v = bloch_coin(BlochCoin::new(PI, 0.7));
        assert!(close(
            &v,
            &[c(0.0, 0.0), Complex64::from_polar(1.0, 0.7)],
            1e-16
        ));
        let v = bloch_coin(BlochCoin::new(PI / 2.0, 0.0));
        assert!(close(
            &v,
            &[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
            1e-15
        ));
        assert!((vec_norm(&bloch_coin(BlochCoin::new(2.2, -3.0))) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(InitialState::local(vec![0], vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(InitialState::separable(
            BTreeMap::from([(vec![0], c(0.5, 0.0))]),
            basis_coin(2, 0)
        )
        .is_err());
        let mixed_dims = BTreeMap::from([
            (vec![0], c(FRAC_1_SQRT_2, 0.0)),
            (vec![0, 1], c(FRAC_1_SQRT_2, 0.0)),
        ]);
        assert!(InitialState::separable(mixed_dims, basis_coin(2, 0)).is_err());
        assert!(InitialState::general(BTreeMap::new()).is_err());
    }

    #[test]
    fn k_dimension_is_checked() {
        let st = InitialState::entangled_pair();
        let k = KPoint::new(vec![0.0, 0.0]).unwrap();
        assert!(matches!(st.psi_k(&k), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn parses_documented_forms() {
        let st: InitialState = "local v=0 chi=(1,0)".parse().unwrap();
        assert_eq!(st, InitialState::local(vec![0], basis_coin(2, 0)).unwrap());

        let st: InitialState = "dist {-1:0.7071, 1:0.7071} chi=(1,0)".parse().unwrap();
        let InitialState::SeparableDistributed { amps, .. } = &st else {
            panic!()
        };
        assert!((amps[&vec![-1]] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);

        let st: InitialState = "general {-1:(0.7071,0), 1:(0,0.7071)}".parse().unwrap();
        let want = InitialState::entangled_pair();
        let k = KPoint::line(0.9).unwrap();
        assert!(
            st.projector_k(&k)
                .unwrap()
                .max_abs_diff(&want.projector_k(&k).unwrap())
                < 1e-15
        );

        let st: InitialState = "local v=(1,-2) chi=(0.6, 0.8i)".parse().unwrap();
        assert_eq!(st.lattice_dim(), 2);
        let st: InitialState = "local v=0 chi=bloch(pi/2, 0)".parse().unwrap();
        let InitialState::Local { chi, .. } = &st else {
            panic!()
        };
        assert!(close(
            chi,
            &[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
            1e-15
        ));
    }

    #[test]
    fn rejects_malformed_text() {
        for bad in [
            "",
            "local",
            "local v=0",
            "local v=0 chi=(0,0)",
            "dist {-1:1, -1:1} chi=(1,0)",
            "general {0:(1,0)} extra",
            "teleport v=0 chi=(1,0)",
            "local x=0 chi=(1,0)",
        ] {
            assert!(bad.parse::<InitialState>().is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for st in [
            InitialState::entangled_pair(),
            InitialState::split_pair(),
            InitialState::local(vec![2, -1], bloch_coin(BlochCoin::new(0.3, 1.2))).unwrap(),
        ] {
            let back: InitialState = st.to_string().parse().unwrap();
            let k = KPoint::new(vec![0.37; st.lattice_dim()]).unwrap();
            assert!(
                back.projector_k(&k)
                    .unwrap()
                    .max_abs_diff(&st.projector_k(&k).unwrap())
                    < 1e-15
            );
        }
    }
}
