//! Deterministic CSV emission: header row, `.` decimal separator, 15
//! significant digits.

use std::io::{self, Write};

use crate::dynamics::ScatteringObservables;
use crate::spectrum::BoundStateBranch;
use crate::transport::TransmissionRow;

/// `%.15g`: 15 significant digits, trailing zeros trimmed, exponent form
/// outside `[1e-5, 1e15)`.
pub fn fmt_g15(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.14e}", x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-5..15).contains(&exp) {
        let m = trim(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (14 - exp).max(0) as usize;
    trim(&format!("{:.*}", decimals, x)).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn row<W: Write + ?Sized>(w: &mut W, values: &[f64]) -> io::Result<()> {
    let cells: Vec<String> = values.iter().map(|&v| fmt_g15(v)).collect();
    writeln!(w, "{}", cells.join(","))
}

pub fn write_transmission_csv<W: Write + ?Sized>(w: &mut W, rows: &[TransmissionRow]) -> io::Result<()> {
    writeln!(w, "k,V,T_analytic,T_negf,T_planewave,V_R_plus,V_R_minus")?;
    for r in rows {
        row(w, &[r.k, r.v, r.t_analytic, r.t_negf, r.t_planewave, r.v_r_plus, r.v_r_minus])?;
    }
    Ok(())
}

pub fn write_time_series_header<W: Write + ?Sized>(w: &mut W) -> io::Result<()> {
    writeln!(w, "time,p_incident,p_reflected,p_shifted,p_pair_broken,norm,energy,shift_estimate")
}

pub fn write_time_series_row<W: Write + ?Sized>(w: &mut W, o: &ScatteringObservables) -> io::Result<()> {
    row(
        w,
        &[o.time, o.p_incident, o.p_reflected, o.p_shifted, o.p_pair_broken, o.norm, o.energy, o.shift_estimate],
    )
}

pub fn write_time_series_csv<W: Write + ?Sized>(w: &mut W, series: &[ScatteringObservables]) -> io::Result<()> {
    write_time_series_header(w)?;
    for o in series {
        write_time_series_row(w, o)?;
    }
    Ok(())
}

/// One row per (branch, momentum).
pub fn write_branch_csv<W: Write + ?Sized>(w: &mut W, branches: &[BoundStateBranch]) -> io::Result<()> {
    writeln!(w, "branch,k,energy,weight_r0,weight_r1")?;
    for b in branches {
        for i in 0..b.k_grid.len() {
            write!(w, "{},", b.branch_type)?;
            row(w, &[b.k_grid[i], b.energies[i], b.weight_r0[i], b.weight_r1[i]])?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g15_formatting() {
        assert_eq!(fmt_g15(0.64), "0.64");
        assert_eq!(fmt_g15(1.0), "1");
        assert_eq!(fmt_g15(-0.8660254037844386), "-0.866025403784439");
        assert_eq!(fmt_g15(16.0 / 25.0), "0.64");
        assert_eq!(fmt_g15(1e-7), "1e-07");
        assert_eq!(fmt_g15(1.5e20), "1.5e+20");
        assert_eq!(fmt_g15(123456.0), "123456");
        assert_eq!(fmt_g15(0.0001234), "0.0001234");
        assert_eq!(fmt_g15(9.999999999999999e14), "1e+15");
        assert_eq!(fmt_g15(0.0), "0");
        assert_eq!(fmt_g15(std::f64::consts::PI), "3.14159265358979");
    }
}
