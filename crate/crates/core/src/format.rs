//! Number formatting shared by the CSV writers.

/// Formats `x` with 12 significant digits, `%.12g` style.
pub fn sig12(x: f64) -> String {
    sig(x, 12)
}

/// Formats `x` with `digits` significant digits, trailing zeros trimmed.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let exp = x.abs().log10().floor() as i32;
    // rounding can bump the exponent (9.99… → 10.0)
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, e) = sci.split_once('e').expect("exponent form");
    let exp_rounded: i32 = e.parse().unwrap_or(exp);
    if (-5..digits as i32).contains(&exp_rounded) {
        let decimals = (digits as i32 - 1 - exp_rounded).max(0) as usize;
        trim(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim(mantissa.to_string()), exp_rounded)
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
