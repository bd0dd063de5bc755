//! Numeric formatting: all numbers are printed with 12 significant digits,
//! in plain decimal when the magnitude allows and scientific otherwise.

/// Renders `x` with 12 significant digits.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = 11 - magnitude;
    if (0..=17).contains(&decimals) {
        format!("{x:.*}", decimals as usize)
    } else {
        format!("{x:.11e}")
    }
}

/// Rounds `x` to 12 significant digits so structured output matches the
/// text rendering.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_and_scientific_renderings() {
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(fmt12(4.0 / 3.0), "1.33333333333");
        assert_eq!(fmt12(43.631_396_243_5), "43.6313962435");
        assert_eq!(fmt12(1e-9), "1.00000000000e-9");
        assert_eq!(fmt12(f64::INFINITY), "inf");
    }

    #[test]
    fn rounding_is_stable() {
        let x = 1.234_567_890_123_456_7;
        assert_eq!(sig12(x), 1.23456789012);
        assert_eq!(sig12(sig12(x)), sig12(x));
    }
}
