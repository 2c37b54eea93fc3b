//! CSV export of lattice fields.

use std::fmt::Write;

use crate::field::FieldConfig;

/// Rows `t,x,component,value` with 17 significant digits, `t` and `x`
/// given as physical coordinates.
pub fn field_csv(f: &FieldConfig, dt: f64, dx: f64) -> String {
    let mut out = String::from("t,x,component,value\n");
    let (nt, nx, p) = f.shape();
    for n in 0..nt {
        for x in 0..nx {
            for c in 0..p {
                let _ = writeln!(out, "{:.16e},{:.16e},{},{:.16e}", n as f64 * dt, x as f64 * dx, c, f[(n, x, c)]);
            }
        }
    }
    out
}
