//! Deterministic decimal formatting shared by reports, traces, and tests.
//!
//! Every float the tool emits goes through [`fmt_f64`], which fixes the
//! output at 12 significant digits so golden files and report round-trips
//! are bit-exact across platforms.

/// Formats `v` with 12 significant digits, trailing zeros stripped.
///
/// Values with a decimal exponent in `[-4, 11]` render positionally
/// (`0.353553390593`, `1000`); anything outside renders in scientific
/// notation (`1e-5`, `1.23456789012e14`). The output is a valid JSON
/// number, and re-parsing then re-formatting it reproduces the same
/// string exactly.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".to_owned();
    }
    if !v.is_finite() {
        // Never emitted by the tool; kept total for robustness.
        return if v.is_nan() {
            "nan".to_owned()
        } else if v > 0.0 {
            "inf".to_owned()
        } else {
            "-inf".to_owned()
        };
    }

    // "{:.11e}" yields one leading digit plus 11 decimals: 12 significant
    // digits, e.g. "-3.53553390593e-1".
    let sci = format!("{:.11e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };

    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if (-4..12).contains(&exp) {
        if exp >= 0 {
            let whole = exp as usize + 1;
            if digits.len() > whole {
                out.push_str(&digits[..whole]);
                out.push('.');
                out.push_str(&digits[whole..]);
            } else {
                out.push_str(digits);
                out.push_str(&"0".repeat(whole - digits.len()));
            }
        } else {
            out.push_str("0.");
            out.push_str(&"0".repeat((-exp - 1) as usize));
            out.push_str(digits);
        }
    } else {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        out.push('e');
        out.push_str(&exp.to_string());
    }
    out
}
