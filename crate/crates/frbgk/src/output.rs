//! CSV and report serialization. Numeric fields carry 17 significant digits
//! so that reruns are byte-for-byte comparable.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;
use crate::solver::DiagRow;
use crate::state::Primitive;

/// 17 significant digits; enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Profile of the macroscopic solution at all solution nodes, ordered by x.
pub fn write_profile(path: &Path, xs: &[f64], prims: &[Primitive], gamma: f64) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,rho,u,p,e,theta")?;
    for (x, q) in xs.iter().zip(prims) {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_f64(*x),
            fmt_f64(q.rho),
            fmt_f64(q.u),
            fmt_f64(q.p),
            fmt_f64(q.specific_internal_energy(gamma)),
            fmt_f64(q.theta()),
        )?;
    }
    Ok(())
}

pub fn write_timeseries(path: &Path, rows: &[DiagRow]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,mass,momentum,energy,mass_err,min_f,residual_linf")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            fmt_f64(r.t),
            fmt_f64(r.mass),
            fmt_f64(r.momentum),
            fmt_f64(r.energy),
            fmt_f64(r.mass_err),
            fmt_f64(r.min_f),
            fmt_f64(r.residual_linf),
        )?;
    }
    Ok(())
}

/// Velocity-axis distribution slice.
pub fn write_fu(path: &Path, u: &[f64], f_u: &[f64]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "u,f_u")?;
    for (ui, fi) in u.iter().zip(f_u) {
        writeln!(w, "{},{}", fmt_f64(*ui), fmt_f64(*fi))?;
    }
    Ok(())
}

/// One line of a machine-readable JSON-lines validation report.
pub fn jsonl_check(
    suite: &str,
    name: &str,
    measured: f64,
    expected: f64,
    tol: f64,
    pass: bool,
) -> String {
    format!(
        "{{\"suite\":\"{suite}\",\"check\":\"{name}\",\"measured\":{},\"expected\":{},\"tol\":{},\"pass\":{pass}}}",
        fmt_f64(measured),
        fmt_f64(expected),
        fmt_f64(tol),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_formatting_round_trips() {
        for v in [0.1, -3.25e-17, 1.0 / 3.0, 2.0f64.sqrt() * 1e100] {
            let s = fmt_f64(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn jsonl_shape() {
        let line = jsonl_check("sod", "plateau", 0.265, 0.2655, 0.05, true);
        assert!(line.starts_with('{') && line.ends_with('}'));
        assert!(line.contains("\"suite\":\"sod\""));
        assert!(line.contains("\"pass\":true"));
    }
}
