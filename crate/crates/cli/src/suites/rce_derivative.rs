use inhomkg_lattice::scenarios::DerivativeComparison;

use super::{err, Kind, Measured, Runner};
use crate::plot::loglog_svg;
use crate::report::{ConvergenceTable, Semantics};

/// Refinement on which the relative error is judged, when present.
const REFERENCE_NX: usize = 64;

pub(super) fn run(r: &mut Runner) {
    let cfg = r.cfg;
    let mut rows: Result<Vec<DerivativeComparison>, String> = Ok(Vec::new());
    for &nx in &cfg.refinements {
        rows = rows.and_then(|mut acc| {
            let s = cfg.derivative.scenario(nx).map_err(err)?;
            acc.push(inhomkg_lattice::scenarios::compare_derivative(&s, cfg.fd_step).map_err(err)?);
            Ok(acc)
        });
    }
    let table = rows.as_ref().ok().map(|rows| ConvergenceTable {
        columns: vec!["fd".into(), "predicted".into(), "relative_error".into()],
        rows: rows
            .iter()
            .map(|c| (c.nx, 1.0 / c.nx as f64, vec![c.fd, c.predicted, c.relative_error]))
            .collect(),
    });
    if let Some(t) = &table {
        r.artifact("rce_derivative_convergence.csv", t.to_csv());
        if cfg.svg {
            let pts: Vec<(f64, f64)> = t.rows.iter().map(|(_, dx, v)| (*dx, v[2])).collect();
            r.artifact("rce_derivative_convergence.svg", loglog_svg("rce derivative relative error", &pts));
        }
    }
    r.case("rce_derivative_relative_error", Kind::Floating, Semantics::Within, 0.0, 0.02, |_| {
        let rows = rows.as_ref().map_err(Clone::clone)?;
        let pick = rows.iter().find(|c| c.nx == REFERENCE_NX).or(rows.last()).ok_or("no refinements")?;
        Ok(Measured {
            value: pick.relative_error,
            note: Some(format!("nx {}: fd {:.6e}, predicted {:.6e}", pick.nx, pick.fd, pick.predicted)),
        })
    });
    if cfg.refinements.len() < 2 {
        r.skip("rce_derivative_order", Semantics::AtLeast, 1.8, "needs at least two refinements");
        return;
    }
    r.case("rce_derivative_order", Kind::Bound, Semantics::AtLeast, 1.8, 0.0, |_| {
        let t = table.as_ref().ok_or_else(|| rows.as_ref().err().cloned().unwrap_or_default())?;
        let orders = t.orders();
        let min = orders.iter().copied().fold(f64::INFINITY, f64::min);
        let listed: Vec<String> = orders.iter().map(|o| format!("{o:.3}")).collect();
        Ok(Measured { value: min, note: Some(format!("orders {}", listed.join(", "))) })
    });
}
