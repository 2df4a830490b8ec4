//! Sweep results as CSV.

use std::io::{self, Write};

use crate::harness::SweepResult;

pub const CSV_HEADER: &str =
    "scenario,L_km,mean_fidelity,sd_fidelity,n_states,mean_photons,p_in_mw,xi_per_km,seed";

/// Formats `x` with at most 9 significant digits and no trailing zeros.
///
/// Plain decimal notation is used for decimal exponents in `[-5, 9)`,
/// otherwise `d.ddde-N` style. The output depends only on the bits of `x`.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exponent) = sci.split_once('e').expect("exponent form");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if (-5..9).contains(&exponent) {
        let decimals = (8 - exponent).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exponent}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Writes all sweep points, sorted by scenario label and then length.
pub fn write_csv<W: Write>(results: &[SweepResult], mut out: W) -> io::Result<()> {
    if results.is_empty() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "no results to write",
        ));
    }
    let mut rows: Vec<(&str, f64, String)> = Vec::new();
    for result in results {
        let c = &result.config;
        for p in &result.points {
            let row = [
                c.label.clone(),
                format_sig9(p.length_km),
                format_sig9(p.mean_fidelity),
                format_sig9(p.sd_fidelity),
                p.n_states.to_string(),
                format_sig9(c.source.mean_photons()),
                format_sig9(c.channel_template.p_in_watts * 1e3),
                format_sig9(c.channel_template.xi_per_km),
                c.master_seed.to_string(),
            ]
            .join(",");
            rows.push((c.label.as_str(), p.length_km, row));
        }
    }
    rows.sort_by(|a, b| a.0.cmp(b.0).then(a.1.total_cmp(&b.1)));

    let mut buf = String::with_capacity(64 * (rows.len() + 1));
    buf.push_str(CSV_HEADER);
    buf.push('\n');
    for (_, _, row) in rows {
        buf.push_str(&row);
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())?;
    out.flush()
}
