//! Command-line value syntax: complex literals, angles and ranges.

use std::f64::consts::PI;

use num_complex::Complex64;

/// `re`, `imj`, `re+imj` or `re-imj`; `j` alone is the imaginary unit.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("bad complex literal {text:?} (expected re±imj)");
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['j', 'i']) else {
        return real(&s).map(|re| Complex64::new(re, 0.0)).ok_or_else(bad);
    };
    // Split at the last sign that is not the leading one and not an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (real(&body[..k]).ok_or_else(bad)?, imag(&body[k..]).ok_or_else(bad)?),
        None => (0.0, imag(body).ok_or_else(bad)?),
    };
    Ok(Complex64::new(re, im))
}

fn real(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

fn imag(s: &str) -> Option<f64> {
    match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => real(s),
    }
}

/// A decimal, or a multiple of pi such as `pi`, `-pi/4`, `3pi/8`, `0.5*pi`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s = text.trim();
    if let Some(x) = real(s) {
        return Ok(x);
    }
    let bad = || format!("bad number {text:?}");
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, real(d).filter(|&d| d != 0.0).ok_or_else(bad)?),
        None => (s, 1.0),
    };
    let coef = num.strip_suffix("pi").ok_or_else(bad)?;
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let c = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        _ => real(coef).ok_or_else(bad)?,
    };
    Ok(c * PI / den)
}

/// Comma-separated items, each `LO:HI:STEP` (HI included up to rounding) or a single value.
pub fn parse_range(text: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in text.split(',') {
        out.extend(parse_item(item)?);
        if out.len() > 100_000 {
            return Err(format!("range {text:?} has too many points"));
        }
    }
    Ok(out)
}

fn parse_item(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts[..] {
        [single] => Ok(vec![parse_angle(single)?]),
        [lo, hi, step] => {
            let (lo, hi, step) = (parse_angle(lo)?, parse_angle(hi)?, parse_angle(step)?);
            if !(step > 0.0) || hi < lo {
                return Err(format!("range {text:?} needs LO <= HI and STEP > 0"));
            }
            let n = ((hi - lo) / step + 1e-9).floor() as usize;
            if n > 100_000 {
                return Err(format!("range {text:?} has too many points"));
            }
            Ok((0..=n).map(|k| lo + k as f64 * step).collect())
        }
        _ => Err(format!("bad range {text:?} (expected LO:HI:STEP)")),
    }
}
