//! Relative Cauchy evolution under compactly supported metric and source
//! perturbations, its closed forms and finite-difference derivative.

use crate::classes::{future_representative, past_representative, ObservableClass};
use crate::error::{LatticeError, Result};
use crate::field::FieldConfig;
use crate::spacetime::{LatticeSpacetime, Metric};
use crate::stress::{smear, stress_energy};

/// Rows kept between a perturbation and a representative's support.
const GAP: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct Perturbation {
    pub h: Metric,
    pub j: FieldConfig,
}

impl Perturbation {
    pub fn zero(l: &LatticeSpacetime) -> Self {
        let n = l.nt() * l.nx();
        Perturbation { h: Metric { g_tt: vec![0.0; n], g_tx: vec![0.0; n], g_xx: vec![0.0; n] }, j: l.zeros() }
    }

    pub fn source_only(l: &LatticeSpacetime, j: FieldConfig) -> Self {
        Perturbation { j, ..Self::zero(l) }
    }

    pub fn metric_only(l: &LatticeSpacetime, h: Metric) -> Self {
        Perturbation { h, j: l.zeros() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let sc = |v: &[f64]| v.iter().map(|x| x * s).collect::<Vec<_>>();
        Perturbation {
            h: Metric { g_tt: sc(&self.h.g_tt), g_tx: sc(&self.h.g_tx), g_xx: sc(&self.h.g_xx) },
            j: self.j.scale(s),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.j.is_zero()
            && [&self.h.g_tt, &self.h.g_tx, &self.h.g_xx]
                .iter()
                .all(|v| v.iter().all(|x| *x == 0.0))
    }

    /// Site mask of the union of metric and source supports.
    pub fn site_mask(&self) -> Vec<bool> {
        let p = self.j.components();
        (0..self.h.g_tt.len())
            .map(|s| {
                self.h.g_tt[s] != 0.0
                    || self.h.g_tx[s] != 0.0
                    || self.h.g_xx[s] != 0.0
                    || self.j.data()[s * p..(s + 1) * p].iter().any(|v| *v != 0.0)
            })
            .collect()
    }

    /// First and last rows touched by the perturbation.
    pub fn row_support(&self, nx: usize) -> Option<(usize, usize)> {
        let mask = self.site_mask();
        let rows: Vec<usize> = mask.chunks(nx).enumerate().filter(|(_, r)| r.iter().any(|b| *b)).map(|(n, _)| n).collect();
        Some((*rows.first()?, *rows.last()?))
    }

    /// Shape and support checks plus admissibility of the perturbed lattice.
    pub fn validate(&self, l: &LatticeSpacetime) -> Result<LatticeSpacetime> {
        let n = l.nt() * l.nx();
        for v in [&self.h.g_tt, &self.h.g_tx, &self.h.g_xx] {
            if v.len() != n {
                return Err(LatticeError::Shape { expected: (l.nt(), l.nx(), 1), found: (v.len(), 1, 1) });
            }
        }
        l.check_interior(&self.j)?;
        if let Some((f, last)) = self.row_support(l.nx()) {
            if f < l.margin() || last + l.margin() >= l.nt() {
                return Err(LatticeError::Support { row: if f < l.margin() { f } else { last } });
            }
        }
        l.perturbed(&self.h, &self.j)
    }
}

/// `rce(pert)(A)`: move `A` after the perturbation on the background,
/// reinterpret on the perturbed lattice, move it before the perturbation
/// there, and reinterpret back.
pub fn rce(l: &LatticeSpacetime, pert: &Perturbation, a: &ObservableClass) -> Result<ObservableClass> {
    a.check_on(l)?;
    let lp = pert.validate(l)?;
    let Some((first, last)) = pert.row_support(l.nx()) else {
        return Ok(a.clone());
    };
    let (nt, m) = (l.nt(), l.margin());
    let lo = last + GAP;
    let hi = nt - 1 - m;
    if lo >= hi || first < m + GAP + 1 {
        return Err(LatticeError::Geometry(format!(
            "perturbation rows {first}..={last} leave no room for representatives on {nt} rows"
        )));
    }
    let fut = future_representative(l, a, lo, hi)?;
    let on_p = fut.reinterpret(&lp)?;
    let past = past_representative(&lp, &on_p, m, first - GAP)?;
    past.reinterpret(l)
}

/// Closed form for a source-only perturbation: `(φ, α - Σ vol ⟨j, E φ⟩)`.
pub fn rce_source_only(l: &LatticeSpacetime, j: &FieldConfig, a: &ObservableClass) -> Result<ObservableClass> {
    a.check_on(l)?;
    let e = l.e_map(&a.test)?;
    Ok(ObservableClass { test: a.test.clone(), alpha: a.alpha - l.inner(j, &e), lattice: a.lattice })
}

/// Central difference of `s ↦ pairing(rce(s·pert)(A), φ)` at zero with one
/// Richardson level.
pub fn rce_derivative_fd(
    l: &LatticeSpacetime,
    pert: &Perturbation,
    a: &ObservableClass,
    phi: &FieldConfig,
    step: f64,
) -> Result<f64> {
    if pert.is_zero() {
        return Ok(0.0);
    }
    // φ is a solution on the background; pairing there is the affine evaluation
    let f = |s: f64| -> Result<f64> {
        let b = rce(l, &pert.scaled(s), a)?;
        Ok(l.inner(&b.test, phi) + b.alpha)
    };
    let central = |s: f64| -> Result<f64> { Ok((f(s)? - f(-s)?) / (2.0 * s)) };
    let coarse = central(step)?;
    let fine = central(step / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Predicted derivative: `-[½ d/ds Σ vol h_ab T^{ab}[φ + s E φ_A] + Σ vol ⟨j, E φ_A⟩]`.
pub fn rce_prediction(l: &LatticeSpacetime, pert: &Perturbation, a: &ObservableClass, phi: &FieldConfig) -> Result<f64> {
    a.check_on(l)?;
    let e = l.e_map(&a.test)?;
    let source = l.inner(&pert.j, &e);
    // the smeared tensor is quadratic in the field, so this difference is exact
    let tp = smear(l, &stress_energy(l, &phi.add(&e))?, &pert.h);
    let tm = smear(l, &stress_energy(l, &phi.sub(&e))?, &pert.h);
    Ok(-(0.25 * (tp - tm) + source))
}

/// Constant shift of a massless theory acting on classes:
/// `(φ, α) ↦ (φ, α + Σ vol ⟨φ, μ⟩)`.
pub fn shift_class(l: &LatticeSpacetime, a: &ObservableClass, mu: &[f64]) -> Result<ObservableClass> {
    a.check_on(l)?;
    if l.mass() != 0.0 {
        return Err(LatticeError::Parameter("constant shifts require m = 0".into()));
    }
    if mu.len() != l.p() {
        return Err(LatticeError::Shape { expected: (1, 1, l.p()), found: (1, 1, mu.len()) });
    }
    Ok(ObservableClass { test: a.test.clone(), alpha: a.alpha + l.integrate_against(&a.test, mu), lattice: a.lattice })
}
