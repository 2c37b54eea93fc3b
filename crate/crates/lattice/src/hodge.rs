//! Density-valued (top-form) sources, related to scalar sources by the
//! volume factor `√|g|`.

use crate::classes::{future_representative, ObservableClass};
use crate::error::{LatticeError, Result};
use crate::field::FieldConfig;
use crate::rce::Perturbation;
use crate::spacetime::{LatticeGeometry, LatticeSpacetime, Metric};

fn divide_by_density(f: &FieldConfig, sqrt_g: &[f64]) -> FieldConfig {
    let p = f.components();
    let mut out = f.clone();
    for (k, v) in out.data_mut().iter_mut().enumerate() {
        *v /= sqrt_g[k / p];
    }
    out
}

/// Lattice whose scalar source is `J̃ / √|g|`.
pub fn hodge_variant(geom: LatticeGeometry, metric: Metric, top_source: &FieldConfig) -> Result<LatticeSpacetime> {
    let probe = LatticeSpacetime::new(geom, metric.clone(), FieldConfig::zeros(geom.nt, geom.nx, geom.p))?;
    probe.check_shape(top_source)?;
    LatticeSpacetime::new(geom, metric, divide_by_density(top_source, probe.sqrt_g()))
}

/// The density `J̃ = √|g| J` of a lattice's source.
pub fn hodge_inverse(l: &LatticeSpacetime) -> FieldConfig {
    let p = l.p();
    let mut out = l.source().clone();
    for (k, v) in out.data_mut().iter_mut().enumerate() {
        *v *= l.sqrt_g()[k / p];
    }
    out
}

/// Scalar-source perturbation induced by perturbing the metric by `h` and
/// the density by `j̃` while the background density is held fixed.
pub fn top_form_perturbation(l: &LatticeSpacetime, h: &Metric, top_j: &FieldConfig) -> Result<Perturbation> {
    l.check_shape(top_j)?;
    let bare = l.with_source(l.zeros())?.perturbed(h, &l.zeros())?;
    let density = hodge_inverse(l);
    let p = l.p();
    let mut j = l.zeros();
    for (k, v) in j.data_mut().iter_mut().enumerate() {
        let s = k / p;
        let metric_moves = h.g_tt[s] != 0.0 || h.g_tx[s] != 0.0 || h.g_xx[s] != 0.0;
        // away from the metric perturbation only the density perturbation acts
        *v = if metric_moves {
            (density.data()[k] + top_j.data()[k]) / bare.sqrt_g()[s] - l.source().data()[k]
        } else {
            top_j.data()[k] / l.sqrt_g()[s]
        };
    }
    Ok(Perturbation { h: h.clone(), j })
}

/// Closed form of the evolution for density sources, applied to the
/// representative supported after the perturbation:
/// `(φ + (KG - KG_h) E_h φ, α - Σ ⟨j̃, E_h φ⟩ dt dx)`.
pub fn rce_top_form_closed(
    l: &LatticeSpacetime,
    h: &Metric,
    top_j: &FieldConfig,
    a: &ObservableClass,
) -> Result<ObservableClass> {
    let pert = top_form_perturbation(l, h, top_j)?;
    let lp = pert.validate(l)?;
    let Some((_, last)) = pert.row_support(l.nx()) else {
        return Ok(a.clone());
    };
    let hi = l.nt() - 1 - l.margin();
    if last + 3 >= hi {
        return Err(LatticeError::Geometry("no room after the perturbation".into()));
    }
    let fut = future_representative(l, a, last + 3, hi)?;
    let e = lp.e_map(&fut.test)?;
    let test = fut.test.add(&l.kg_apply(&e)?).sub(&lp.kg_apply(&e)?);
    let g = l.geometry();
    let alpha = fut.alpha - top_j.data().iter().zip(e.data()).map(|(a, b)| a * b).sum::<f64>() * g.dt * g.dx;
    ObservableClass::new(l, test, alpha)
}
