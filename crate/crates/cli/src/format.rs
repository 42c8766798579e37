//! Fixed-precision number formatting for CSV output.

/// Formats `x` with 12 significant digits, trailing zeros removed.
///
/// Plain notation is used for decimal exponents in `[-5, 12)`, scientific otherwise.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(-0.0), "0");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(0.1), "0.1");
        assert_eq!(sig12(0.30000000000000004), "0.3");
        assert_eq!(sig12(0.201752073283), "0.201752073283");
        assert_eq!(sig12(0.2017520732834567), "0.201752073283");
        assert_eq!(sig12(0.999999999999999), "1");
        assert_eq!(sig12(-2.5e-7), "-2.5e-7");
        assert_eq!(sig12(1.23456789012345e13), "1.23456789012e13");
        assert_eq!(sig12(12345.678), "12345.678");
    }
}
