//! Complex polynomials, the built-in target besides the q-zeta function.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::ComplexPoint;
use crate::winding::AnalyticFunction;

/// Polynomial with coefficients listed from the highest degree down.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty()
            || coeffs
                .iter()
                .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::InvalidParameter(
                "polynomial needs finite coefficients".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = coeffs.clone();
            next.push(Complex64::new(0.0, 0.0));
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] -= r * c;
            }
            coeffs = next;
        }
        Self { coeffs }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self, k: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * k + c)
    }
}

impl AnalyticFunction for Polynomial {
    fn eval(&self, k: ComplexPoint) -> Result<ComplexPoint> {
        Ok(self.value(k))
    }

    /// `eps * sum |c_i| |k|^i`, the Horner error scale.
    fn rounding_floor(&self, k: ComplexPoint) -> Result<f64> {
        let r = k.norm();
        let scale = self.coeffs.iter().fold(0.0, |acc, c| acc * r + c.norm());
        Ok(f64::EPSILON * scale)
    }
}

/// Parse `3`, `-2.5`, `1+2i`, `0.5-1e-3i`, `-i`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidParameter(format!("cannot parse complex number '{text}'"));
    let Some(body) = s.strip_suffix(['i', 'I']) else {
        return s
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| bad());
    };
    // split at the last sign that is not a leading sign or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re_text, im_text) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("", body),
    };
    let re = if re_text.is_empty() {
        0.0
    } else {
        re_text.parse::<f64>().map_err(|_| bad())?
    };
    let im = match im_text {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

impl FromStr for Polynomial {
    type Err = Error;

    /// Comma-separated coefficients, highest degree first.
    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(parse_complex)
            .collect::<Result<Vec<_>>>()?;
        Polynomial::new(coeffs)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|c| {
                if c.im == 0.0 {
                    format!("{}", c.re)
                } else {
                    format!("{}{:+}i", c.re, c.im)
                }
            })
            .collect();
        write!(f, "{}", parts.join(","))
    }
}
