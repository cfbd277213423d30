//! Plain-text serialization helpers shared by the CSV writers.

/// Format with 9 significant digits, `%.9g` style: fixed notation for
/// decimal exponents in [-4, 9), scientific otherwise, trailing zeros dropped.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    // Round first so the exponent reflects the rounded mantissa.
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        strip_zeros(format!("{:.*}", decimals, x))
    } else {
        let m = strip_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn strip_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// CSV text with the given header and equally long columns; LF line endings.
pub fn columns_to_csv(header: &[&str], columns: &[&[f64]]) -> String {
    let rows = columns.first().map_or(0, |c| c.len());
    let mut out = String::with_capacity(rows * 16 * columns.len().max(1) + 32);
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..rows {
        let line: Vec<String> = columns.iter().map(|c| format_sig9(c[i])).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
