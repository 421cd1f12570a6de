//! Flag value parsing: scientific notation plus unit suffixes.

use std::str::FromStr;

use losmimo::{Carrier, Complex64, ComplexMatrix};

fn split_suffix(s: &str) -> (&str, &str) {
    let s = s.trim();
    let cut = s
        .char_indices()
        .find(|&(i, c)| {
            c.is_alphabetic() && !((c == 'e' || c == 'E') && s[i + c.len_utf8()..].starts_with(|d: char| d.is_ascii_digit() || d == '-' || d == '+'))
        })
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    (s[..cut].trim_end(), &s[cut..])
}

fn number(s: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("not a finite number: {s:?}"))
}

/// Frequency in Hz; accepts `Hz`, `kHz`, `MHz`, `GHz`, `THz`.
pub fn frequency(s: &str) -> Result<f64, String> {
    let (num, unit) = split_suffix(s);
    let scale = match unit.to_ascii_lowercase().as_str() {
        "" | "hz" => 1.0,
        "khz" => 1e3,
        "mhz" => 1e6,
        "ghz" => 1e9,
        "thz" => 1e12,
        _ => return Err(format!("unknown frequency unit {unit:?}")),
    };
    Ok(number(num)? * scale)
}

/// A length that may be given in wavelengths of the working carrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Length {
    Meters(f64),
    Wavelengths(f64),
}

impl Length {
    pub fn resolve(self, carrier: &Carrier) -> f64 {
        match self {
            Length::Meters(m) => m,
            Length::Wavelengths(w) => w * carrier.wavelength(),
        }
    }
}

impl FromStr for Length {
    type Err = String;

    /// Meters by default; `m`, `cm`, `mm`, `um` and `lambda` (or `λ`) suffixes.
    fn from_str(s: &str) -> Result<Self, String> {
        let (num, unit) = split_suffix(s);
        let v = number(num)?;
        Ok(match unit {
            "" | "m" => Length::Meters(v),
            "cm" => Length::Meters(v * 1e-2),
            "mm" => Length::Meters(v * 1e-3),
            "um" => Length::Meters(v * 1e-6),
            "lambda" | "λ" | "lam" => Length::Wavelengths(v),
            _ => return Err(format!("unknown length unit {unit:?}")),
        })
    }
}

pub fn length(s: &str) -> Result<Length, String> {
    s.parse()
}

pub fn decibels(s: &str) -> Result<f64, String> {
    let (num, unit) = split_suffix(s);
    if !(unit.is_empty() || unit.eq_ignore_ascii_case("db")) {
        return Err(format!("unknown unit {unit:?}, expected dB"));
    }
    number(num)
}

pub fn float_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|t| number(t.trim())).collect()
}

/// `tx,rx` with 1-based indices.
pub fn pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected tx,rx, got {s:?}"))?;
    let idx = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad index {t:?}"));
    Ok((idx(a)?, idx(b)?))
}

/// Rows separated by `;`, entries by `,`. Entries are `a+bj` style complex
/// numbers or `mag@deg` polar values.
pub fn complex_matrix(s: &str) -> Result<ComplexMatrix, String> {
    let rows = s
        .split(';')
        .map(|row| row.split(',').map(|e| complex(e.trim())).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    ComplexMatrix::from_rows(&rows).ok_or_else(|| "matrix must be square".to_string())
}

fn complex(s: &str) -> Result<Complex64, String> {
    if let Some((mag, deg)) = s.split_once('@') {
        return Ok(Complex64::from_polar(number(mag)?, number(deg)?.to_radians()));
    }
    Complex64::from_str(s).map_err(|_| format!("not a complex number: {s:?}"))
}
