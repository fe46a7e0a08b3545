//! Fixed 12-significant-digit decimal formatting for analysis outputs,
//! so runs diff cleanly across platforms.

const SIG_DIGITS: i32 = 12;

pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".to_string() } else { "-inf".to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = SIG_DIGITS - 1 - magnitude;
    if (0..=24).contains(&decimals) {
        format!("{:.*}", decimals as usize, x)
    } else {
        format!("{:.*e}", (SIG_DIGITS - 1) as usize, x)
    }
}

/// Rounds to 12 significant digits; used before placing floats in JSON.
pub fn round_sig12(x: f64) -> f64 {
    fmt_sig12(x).parse().unwrap_or(x)
}
