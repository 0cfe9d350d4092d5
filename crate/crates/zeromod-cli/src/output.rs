//! Formatting helpers: every floating value is printed with 12 significant
//! digits, in both the human-readable and the JSON reports.

use num_complex::Complex64;

/// printf %.12g equivalent.
pub fn g12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..12).contains(&mag) {
        let s = format!("{:.11e}", x);
        return trim_exp(&s);
    }
    let decimals = (11 - mag).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

fn trim_exp(s: &str) -> String {
    match s.split_once('e') {
        Some((mant, exp)) => {
            let m = mant.trim_end_matches('0').trim_end_matches('.');
            format!("{m}e{exp}")
        }
        None => s.to_string(),
    }
}

/// Round to 12 significant digits, for schema-stable JSON output.
pub fn round12(x: f64) -> f64 {
    g12(x).parse().unwrap_or(x)
}

pub fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        g12(z.re)
    } else if z.im >= 0.0 {
        format!("{} + {}i", g12(z.re), g12(z.im))
    } else {
        format!("{} - {}i", g12(z.re), g12(-z.im))
    }
}

pub fn complex_pair(z: Complex64) -> serde_json::Value {
    serde_json::json!([round12(z.re), round12(z.im)])
}

pub fn yesno(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
