//! Number rendering shared by the TSV/JSON exporters: six significant
//! digits, whole numbers without a decimal point.

pub const SIGNIFICANT_DIGITS: i32 = 6;

pub fn number(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let r = round_significant(v);
    if r == r.trunc() && r.abs() < 1e15 {
        return format!("{}", r as i64);
    }
    let exp = r.abs().log10().floor() as i32;
    if !(-5..SIGNIFICANT_DIGITS).contains(&exp) {
        let s = format!("{:.*e}", (SIGNIFICANT_DIGITS - 1) as usize, r);
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        return format!("{}e{}", trim_zeros(mantissa), e);
    }
    let decimals = (SIGNIFICANT_DIGITS - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, r)).to_string()
}

/// `v` rounded to six significant digits.
pub fn round_significant(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let s = format!("{:.*e}", (SIGNIFICANT_DIGITS - 1) as usize, v);
    s.parse().expect("round trip")
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders() {
        assert_eq!(number(48.0), "48");
        assert_eq!(number(-0.0), "0");
        assert_eq!(number(19.017758025), "19.0178");
        assert_eq!(number(-1.5900542897), "-1.59005");
        assert_eq!(number(0.0104012182), "0.0104012");
        assert_eq!(number(-0.00814736), "-0.00814736");
        assert_eq!(number(1.0e-7 * 3.3), "3.3e-7");
        assert_eq!(number(123456789.5), "123457000");
        assert_eq!(number(9.9999999), "10");
        assert_eq!(number(0.25), "0.25");
    }
}
