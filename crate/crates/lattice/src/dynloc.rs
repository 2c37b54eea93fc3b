//! Dynamical locality experiments: classes whose propagated test function
//! stays in the causal hull of a region are fixed by perturbations in its
//! causal complement, and are represented by test functions in any
//! neighbourhood of the region.

use crate::classes::{class_equal, slab_representative, ObservableClass};
use crate::error::{LatticeError, Result};
use crate::rce::{rce, rce_source_only, Perturbation};
use crate::region::{dilate_mask, CompactRegion};
use crate::spacetime::LatticeSpacetime;

/// Rows of padding between a region and its causal complement, enough to
/// keep perturbed stencils away from the hull.
pub const COMPLEMENT_PAD: usize = 2;

/// Relative cut below which propagated values count as zero.
pub const SUPPORT_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum DynLocOutcome {
    /// The class qualified and every sampled perturbation fixed it; carries
    /// the largest relative defect seen.
    Fixed { max_defect: f64 },
    /// The class qualified but some perturbation moved it.
    Moved { index: usize, defect: f64 },
    /// The support condition failed; the source perturbation moves the
    /// class's constant by `shift`.
    Violation { witness: Perturbation, shift: f64 },
}

/// Sites of the causal complement that a perturbation may occupy.
pub fn admissible_complement(l: &LatticeSpacetime, k: &CompactRegion) -> Vec<bool> {
    let (nt, nx, m) = (l.nt(), l.nx(), l.margin());
    let mut mask = k.causal_complement(COMPLEMENT_PAD, nt, nx);
    for (s, b) in mask.iter_mut().enumerate() {
        let n = s / nx;
        if n < m + 4 || n + m + 4 >= nt {
            *b = false;
        }
    }
    mask
}

/// Whether `supp(E φ_A)` lies in the causal hull of `K`.
pub fn qualifies(l: &LatticeSpacetime, k: &CompactRegion, a: &ObservableClass) -> Result<bool> {
    let e = l.e_map(&a.test)?;
    let hull = k.causal_hull(l.nt(), l.nx());
    Ok(e.support_mask(SUPPORT_THRESHOLD).iter().zip(&hull).all(|(s, h)| !s || *h))
}

pub fn dynloc_fixed_test(
    l: &LatticeSpacetime,
    k: &CompactRegion,
    a: &ObservableClass,
    perts: &[Perturbation],
    tol: f64,
) -> Result<DynLocOutcome> {
    let allowed = admissible_complement(l, k);
    for (i, p) in perts.iter().enumerate() {
        if p.site_mask().iter().zip(&allowed).any(|(s, ok)| *s && !ok) {
            return Err(LatticeError::Geometry(format!("perturbation {i} leaves the causal complement")));
        }
    }
    if qualifies(l, k, a)? {
        let mut max_defect: f64 = 0.0;
        for (index, p) in perts.iter().enumerate() {
            let moved = rce(l, p, a)?;
            let cmp = class_equal(l, &moved, a, tol)?;
            let defect = cmp.field_defect.max(cmp.alpha_defect);
            if !cmp.equal {
                return Ok(DynLocOutcome::Moved { index, defect });
            }
            max_defect = max_defect.max(defect);
        }
        return Ok(DynLocOutcome::Fixed { max_defect });
    }
    // a unit source at the admissible site where E φ_A is largest
    let e = l.e_map(&a.test)?;
    let p = l.p();
    let mut best: Option<(usize, usize, f64)> = None;
    for (s, ok) in allowed.iter().enumerate() {
        if !ok {
            continue;
        }
        for c in 0..p {
            let v = e.data()[s * p + c].abs();
            if best.is_none_or(|b| v > b.2) {
                best = Some((s, c, v));
            }
        }
    }
    let Some((s, c, v)) = best.filter(|b| b.2 > SUPPORT_THRESHOLD * e.max_abs()) else {
        return Err(LatticeError::Geometry("no admissible site sees the propagated test function".into()));
    };
    let nx = l.nx();
    let witness = Perturbation::source_only(l, l.delta(s / nx, s % nx, c));
    let moved = rce_source_only(l, &witness.j, a)?;
    debug_assert!(v > 0.0);
    Ok(DynLocOutcome::Violation { shift: moved.alpha - a.alpha, witness })
}

#[derive(Clone, Debug, PartialEq)]
pub struct KinDynWitness {
    pub class: ObservableClass,
    pub step_row: Option<usize>,
    pub field_defect: f64,
    pub alpha_defect: f64,
}

/// An equivalent class with test function supported in `O`, built from a
/// sharp time step placed inside `O`.
pub fn kin_dyn_witness(l: &LatticeSpacetime, o: &CompactRegion, a: &ObservableClass, tol: f64) -> Result<KinDynWitness> {
    let (nt, nx) = (l.nt(), l.nx());
    let region = o.mask(nt, nx);
    let inside = |c: &ObservableClass| c.test.support_mask(0.0).iter().zip(&region).all(|(s, r)| !s || *r);
    if inside(a) {
        return Ok(KinDynWitness { class: a.clone(), step_row: None, field_defect: 0.0, alpha_defect: 0.0 });
    }
    let e = l.e_map(&a.test)?;
    // the step representative lives where E φ_A or its neighbours are nonzero
    let reach = dilate_mask(&e.support_mask(SUPPORT_THRESHOLD), 1, nt, nx);
    let (r0, r1) = o.rows();
    let mut best_residual = f64::INFINITY;
    for r in r0..r1 {
        let fits = (0..nx).all(|x| (!reach[r * nx + x] || region[r * nx + x]) && (!reach[(r + 1) * nx + x] || region[(r + 1) * nx + x]));
        if !fits {
            continue;
        }
        let Ok(mut cand) = slab_representative(l, a, r) else { continue };
        // entries outside the region are round-off of cancelled propagation
        let p = l.p();
        for (k, v) in cand.test.data_mut().iter_mut().enumerate() {
            if !region[k / p] {
                *v = 0.0;
            }
        }
        let cmp = class_equal(l, a, &cand, tol)?;
        if cmp.equal {
            return Ok(KinDynWitness {
                class: cand,
                step_row: Some(r),
                field_defect: cmp.field_defect,
                alpha_defect: cmp.alpha_defect,
            });
        }
        best_residual = best_residual.min(cmp.field_defect.max(cmp.alpha_defect));
    }
    Err(LatticeError::Infeasible { what: "test function inside the region".into(), residual: best_residual })
}
