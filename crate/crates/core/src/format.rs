//! Number formatting shared by the CSV writers and the CLI.

/// Significant digits used in machine-readable output (round-trip safe).
pub const CSV_DIGITS: usize = 17;
/// Significant digits used in human-readable output.
pub const HUMAN_DIGITS: usize = 9;

/// Formats `x` like C's `%.{digits}g`: `digits` significant digits, fixed
/// notation for exponents in `[-5, digits)`, scientific otherwise, trailing
/// zeros removed.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn csv_num(x: f64) -> String {
    format_sig(x, CSV_DIGITS)
}

pub fn human_num(x: f64) -> String {
    format_sig(x, HUMAN_DIGITS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(format_sig(1.0 / 3.0, 17), "0.33333333333333331");
        assert_eq!(format_sig(1.0 / 3.0, 9), "0.333333333");
        assert_eq!(format_sig(0.5, 17), "0.5");
        assert_eq!(format_sig(1024.0, 9), "1024");
        assert_eq!(format_sig(1.5e-7, 9), "1.5e-07");
        assert_eq!(format_sig(123456789012.0, 9), "1.23456789e+11");
        assert_eq!(format_sig(-2.5, 3), "-2.5");
        assert_eq!(format_sig(9.9999999999, 3), "10");
        assert_eq!(format_sig(0.0001, 6), "0.0001");
        assert_eq!(format_sig(f64::INFINITY, 6), "inf");
        assert_eq!(format_sig(0.0, 6), "0");
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [
            0.1,
            1.0 / 3.0,
            std::f64::consts::PI,
            1e-300,
            6.02214076e23,
            -7.25e-9,
        ] {
            let s = csv_num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }
}
