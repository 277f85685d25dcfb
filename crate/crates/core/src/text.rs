//! Literal parsing and float formatting shared by the config grammars and the CLI.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Parses a complex literal: `1.5`, `-2i`, `i`, `0.3-0.4i`, `1e-3+2.5E-1i`.
///
/// A tuple `(re,im)` is also accepted.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let err = || Error::Parse(format!("invalid complex literal `{s}`"));
    if s.is_empty() {
        return Err(err());
    }
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let (re, im) = inner.split_once(',').ok_or_else(err)?;
        let re: f64 = re.trim().parse().map_err(|_| err())?;
        let im: f64 = im.trim().parse().map_err(|_| err())?;
        return Ok(Complex64::new(re, im));
    }

    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = compact.strip_suffix('i') else {
        return compact
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| err());
    };
    // Split at the last sign that is not an exponent sign and not leading.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| (bytes[p] == b'+' || bytes[p] == b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let coeff = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse().map_err(|_| err()),
        }
    };
    match split {
        Some(p) => {
            let re: f64 = body[..p].parse().map_err(|_| err())?;
            Ok(Complex64::new(re, coeff(&body[p..])?))
        }
        None => Ok(Complex64::new(0.0, coeff(body)?)),
    }
}

/// Formats a complex number as an `a+bi` literal that [`parse_complex`] reads back exactly.
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", fmt_g17(z.re), sign, fmt_g17(z.im.abs()))
}

/// Parses an angle in radians; accepts plain numbers and `pi` expressions
/// such as `pi`, `-pi/4`, `3pi/8`, `3*pi/8`, `0.25*pi`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let compact: String = s
        .trim()
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase();
    let err = || Error::Parse(format!("invalid angle `{s}`"));
    if let Ok(x) = compact.parse::<f64>() {
        return if x.is_finite() { Ok(x) } else { Err(err()) };
    }
    let (num, den) = match compact.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| err())?),
        None => (compact.as_str(), 1.0),
    };
    let (sign, num) = match num.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, num.strip_prefix('+').unwrap_or(num)),
    };
    let coeff_str = num.strip_suffix("pi").ok_or_else(err)?;
    let coeff_str = coeff_str.strip_suffix('*').unwrap_or(coeff_str);
    let coeff = if coeff_str.is_empty() {
        1.0
    } else {
        coeff_str.parse::<f64>().map_err(|_| err())?
    };
    if den == 0.0 {
        return Err(err());
    }
    Ok(sign * coeff * std::f64::consts::PI / den)
}

/// C's `%.17g`: 17 significant digits, trailing zeros stripped, exponent
/// form when the decimal exponent is below −4 or at least 17.
pub fn fmt_g17(x: f64) -> String {
    const P: i32 = 17;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..P).contains(&exp) {
        let fixed = format!("{:.*}", (P - 1 - exp) as usize, x);
        strip_zeros(&fixed)
    } else {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn strip_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
