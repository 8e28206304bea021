//! Complex scalars and their canonical text form.

use num_complex::Complex64;

pub type Scalar = Complex64;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

pub fn one() -> Scalar {
    Scalar::new(1.0, 0.0)
}

pub fn zero() -> Scalar {
    Scalar::new(0.0, 0.0)
}

pub fn real(x: f64) -> Scalar {
    Scalar::new(x, 0.0)
}

/// Integer power that stays exact for unit-modulus table entries like `-1` or `i`.
pub fn powi(base: Scalar, exp: i64) -> Scalar {
    if exp == 0 {
        return one();
    }
    let mut acc = one();
    let mut b = if exp < 0 { base.inv() } else { base };
    let mut e = exp.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    acc
}

pub fn close(a: Scalar, b: Scalar, tol: f64) -> bool {
    (a - b).norm() <= tol
}

pub(crate) fn check_tolerance(tol: f64) -> crate::Result<f64> {
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(crate::Error::InvalidTolerance(tol))
    }
}

fn clean(x: f64) -> f64 {
    // collapse -0 and float noise far below any tolerance we use
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// `re+imj` form used by CSV export and configs, e.g. `1+0j`, `-0.5-0.25j`.
pub fn format_complex(z: Scalar) -> String {
    let re = clean(z.re);
    let im = clean(z.im);
    if im < 0.0 {
        format!("{re}-{}j", -im)
    } else {
        format!("{re}+{im}j")
    }
}

/// Compact form for polynomial coefficients: plain real when the imaginary
/// part vanishes, parenthesized `re+imj` otherwise.
pub fn format_coefficient(z: Scalar) -> String {
    let re = clean(z.re);
    let im = clean(z.im);
    if im == 0.0 {
        format!("{re}")
    } else {
        format!("({})", format_complex(Scalar::new(re, im)))
    }
}

/// Parse `re`, `imj`, `re+imj`, `re-imj` (whitespace ignored).
pub fn parse_complex(text: &str) -> Option<Scalar> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    if let Some(body) = s.strip_suffix(['j', 'i']) {
        // find the split between real and imaginary parts: last sign not
        // following an exponent marker and not at position 0
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                split = Some(k);
                break;
            }
        }
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other.parse::<f64>().ok()?,
        };
        let re = re.parse::<f64>().ok()?;
        Some(Scalar::new(re, im))
    } else {
        s.parse::<f64>().ok().map(real)
    }
}
