//! Fixed-precision number rendering for CSV output.

/// Nine significant digits in positional notation (no exponent).
pub fn sig9(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (8 - exp).max(0) as usize;
    let out = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit (9.9999999999 -> 10.00000000).
    if decimals > 0 && out.trim_start_matches('-').parse::<f64>().is_ok_and(|v| v >= 10f64.powi(exp + 1)) {
        let decimals = decimals - 1;
        return format!("{x:.decimals$}");
    }
    out
}

/// Six decimal places, used for bps/Hz.
pub fn fixed6(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    format!("{x:.6}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig9(0.00939010262), "0.00939010262");
        assert_eq!(sig9(0.2002203), "0.200220300");
        assert_eq!(sig9(340e9), "340000000000");
        assert_eq!(sig9(-1.5), "-1.50000000");
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(f64::NAN), "NaN");
        assert_eq!(fixed6(2.0), "2.000000");
    }

    #[test]
    fn stable_under_reparse() {
        for x in [9.9999999999, 1.0 / 3.0, 123456.789123, 7.31e-4, 1e-20] {
            let once = sig9(x);
            assert_eq!(sig9(once.parse().unwrap()), once);
        }
    }
}
