//! Deterministic JSON rendering helpers.

use serde_json::Value;

/// `%.12g`-style rendering: 12 significant digits, trailing zeros removed,
/// scientific notation outside `1e-4 <= |x| < 1e12`.
pub fn fmt_sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// JSON number with 12 significant digits; infinities become the string
/// `"inf"`.
pub fn json_number(x: f64) -> Value {
    if x.is_finite() {
        let s = fmt_sig12(x);
        serde_json::from_str(&s).expect("rendered number parses")
    } else {
        Value::String(fmt_sig12(x))
    }
}

/// `serialize_with` adapter for [`json_number`].
pub fn ser_number<S: serde::Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&json_number(*x), s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig12(2.0), "2");
        assert_eq!(fmt_sig12(0.25), "0.25");
        assert_eq!(fmt_sig12(123456789012345.0), "1.23456789012e+14");
        assert_eq!(fmt_sig12(1e-7), "1e-07");
        assert_eq!(fmt_sig12(-2.5), "-2.5");
        assert_eq!(fmt_sig12(f64::INFINITY), "inf");
        assert_eq!(fmt_sig12(1.0 / 24.0 * 5.0), "0.208333333333");
    }

    #[test]
    fn json_numbers() {
        assert_eq!(json_number(0.5).to_string(), "0.5");
        assert_eq!(json_number(f64::INFINITY), Value::String("inf".into()));
    }
}
