//! CSV emission and parsing.
//!
//! Format contract: UTF-8, comma separators, `.` decimal point,
//! `#`-prefixed metadata lines, then one header row, then data rows.
//! Floats print in scientific notation with a configurable number of
//! significant digits (default 12), which round-trips exactly through
//! `f64` parsing, so parse + re-emit is byte-identical.

use bjj_core::sweep::SweepResult;

pub const DEFAULT_SIG_DIGITS: usize = 12;

/// Scientific-notation float with `sig` significant digits; `inf` and
/// `nan` spelled out so every emitted token parses back.
pub fn fmt_float(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{:.*e}", sig.saturating_sub(1), x)
}

/// Renders a sweep as a full CSV document.
pub fn render_sweep(result: &SweepResult, sig: usize) -> String {
    let mut out = String::new();
    let meta = &result.metadata;
    out.push_str(&format!("# bjj v{} sweep\n", meta.version));
    out.push_str(&format!("# axis: {}\n", meta.axis.name()));
    out.push_str(&format!("# n_total: {}\n", meta.base.n_total()));
    out.push_str(&format!(
        "# tunneling_j: {}\n",
        fmt_float(meta.base.tunneling_j(), sig)
    ));
    out.push_str(&format!(
        "# charging_ec: {}\n",
        fmt_float(meta.base.charging_ec(), sig)
    ));
    out.push_str(&format!(
        "# asymmetry_delta: {}\n",
        fmt_float(meta.base.asymmetry_delta(), sig)
    ));
    out.push_str(&format!("# beta: {}\n", fmt_float(meta.beta, sig)));
    let names: Vec<&str> = result.quantities.iter().map(|q| q.name()).collect();
    out.push_str(&format!("# quantities: {}\n", names.join(",")));

    out.push_str(meta.axis.name());
    for name in &names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');

    for row in &result.rows {
        out.push_str(&fmt_float(row.axis_value, sig));
        for v in &row.values {
            out.push(',');
            out.push_str(&fmt_float(*v, sig));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting() {
        assert_eq!(fmt_float(0.5, 12), "5.00000000000e-1");
        assert_eq!(fmt_float(0.0, 12), "0.00000000000e0");
        assert_eq!(fmt_float(f64::INFINITY, 12), "inf");
        assert_eq!(fmt_float(f64::NEG_INFINITY, 12), "-inf");
        assert_eq!(fmt_float(f64::NAN, 12), "nan");
        assert_eq!(fmt_float(2.0 / 6.0_f64.sqrt(), 12), "8.16496580928e-1");
    }

    #[test]
    fn twelve_digits_round_trip() {
        for &x in &[
            0.5,
            1.0 / 3.0,
            2.0f64.sqrt(),
            -1.23456789e-7,
            9.999999999e11,
        ] {
            let s = fmt_float(x, 12);
            let y: f64 = s.parse().unwrap();
            assert_eq!(fmt_float(y, 12), s);
        }
    }
}
