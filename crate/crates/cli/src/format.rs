//! Text formatting for CSV output.

/// Formats `v` with 17 significant digits, enough to round-trip any `f64`.
///
/// Magnitudes in `[1e-5, 1e17)` are printed in positional notation, others
/// in scientific notation.
pub fn f17(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".to_string() } else { v.to_string() };
    }
    let sci = format!("{v:.16e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        sci
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(f17(0.5), "0.50000000000000000");
        assert_eq!(f17(5.0), "5.0000000000000000");
        assert_eq!(f17(0.0), "0");
        assert_eq!(f17(1e-300), "1.0000000000000000e-300");
        let t = 0.5f64.sqrt().atanh();
        assert_eq!(f17(t).parse::<f64>().unwrap(), t);
        let digits = f17(t).chars().filter(|c| c.is_ascii_digit()).count();
        assert_eq!(digits, 18); // leading zero plus 17 significant digits
    }
}
