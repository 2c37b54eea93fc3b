//! Observable classes `[(φ, α)]`: a compactly supported test function and a
//! constant, modulo pairs `(KG h, Σ vol ⟨J, h⟩)` with `h` compactly supported.

use crate::error::{LatticeError, Result};
use crate::field::FieldConfig;
use crate::spacetime::{GreenKind, LatticeSpacetime};

/// Default relative tolerance for class comparisons and solution checks.
pub const CLASS_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct ObservableClass {
    pub test: FieldConfig,
    pub alpha: f64,
    pub lattice: u64,
}

impl ObservableClass {
    /// Validates interior support against `l`.
    pub fn new(l: &LatticeSpacetime, test: FieldConfig, alpha: f64) -> Result<Self> {
        l.check_interior(&test)?;
        Ok(ObservableClass { test, alpha, lattice: l.id() })
    }

    /// The constant class `(0, α)`.
    pub fn constant(l: &LatticeSpacetime, alpha: f64) -> Self {
        ObservableClass { test: l.zeros(), alpha, lattice: l.id() }
    }

    /// Same data, attached to another lattice.
    pub fn reinterpret(&self, l: &LatticeSpacetime) -> Result<Self> {
        Self::new(l, self.test.clone(), self.alpha)
    }

    pub fn check_on(&self, l: &LatticeSpacetime) -> Result<()> {
        if self.lattice != l.id() {
            return Err(LatticeError::LatticeMismatch);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassComparison {
    pub equal: bool,
    /// `‖E d‖∞` for the difference `d` of test functions, relative to the
    /// largest propagated input.
    pub field_defect: f64,
    /// Relative mismatch of the constants after accounting for the preimage.
    pub alpha_defect: f64,
    pub diagnostic: String,
}

/// Decides `A ≡ B` up to `tol`: the difference of test functions must lie in
/// the image of KG on compact data, and the constants must differ by the
/// source integrated against the preimage.
pub fn class_equal(l: &LatticeSpacetime, a: &ObservableClass, b: &ObservableClass, tol: f64) -> Result<ClassComparison> {
    a.check_on(l)?;
    b.check_on(l)?;
    // propagate each side separately so the defect is measured against the
    // size of the inputs, not only of their difference
    let (ra, aa) = (l.green(&a.test, GreenKind::Retarded)?, l.green(&a.test, GreenKind::Advanced)?);
    let (rb, ab) = (l.green(&b.test, GreenKind::Retarded)?, l.green(&b.test, GreenKind::Advanced)?);
    let ret = ra.sub(&rb);
    let e = aa.sub(&ab).sub(&ret);
    let scale = [&ra, &aa, &rb, &ab].iter().fold(0.0_f64, |m, f| m.max(f.max_abs()));
    let field_defect = if scale == 0.0 { 0.0 } else { e.max_abs() / scale };
    let (dalpha, shift) = (a.alpha - b.alpha, l.inner(l.source(), &ret));
    let mut weight: f64 = 1.0_f64.max(a.alpha.abs()).max(b.alpha.abs());
    let vol = l.vol();
    let p = l.p();
    let mut abs_sum = 0.0;
    for (k, (j, h)) in l.source().data().iter().zip(ret.data()).enumerate() {
        abs_sum += (vol[k / p] * j * h).abs();
    }
    weight = weight.max(abs_sum);
    let alpha_defect = (dalpha - shift).abs() / weight;
    let equal = field_defect <= tol && alpha_defect <= tol;
    let diagnostic = if equal {
        "equivalent".to_string()
    } else if field_defect > tol {
        format!("test functions differ by a non-exact term (defect {field_defect:.3e})")
    } else {
        format!("constants differ by {:.6e} beyond the source term", dalpha - shift)
    };
    Ok(ClassComparison { equal, field_defect, alpha_defect, diagnostic })
}

/// `Σ vol ⟨φ_A, φ⟩ + α`, after checking that `φ` solves `KG φ + J = 0`.
pub fn pairing(l: &LatticeSpacetime, a: &ObservableClass, phi: &FieldConfig) -> Result<f64> {
    a.check_on(l)?;
    let res = l.solution_residual(phi)?;
    if res > 1e-8 {
        return Err(LatticeError::NotSolution(res));
    }
    Ok(l.inner(&a.test, phi) + a.alpha)
}

/// Smooth step in time: 0 on rows `<= lo`, 1 on rows `>= hi`, cubic between.
pub fn time_ramp(nt: usize, lo: usize, hi: usize) -> Vec<f64> {
    (0..nt)
        .map(|n| {
            if n <= lo {
                0.0
            } else if n >= hi {
                1.0
            } else {
                let s = (n - lo) as f64 / (hi - lo) as f64;
                s * s * (3.0 - 2.0 * s)
            }
        })
        .collect()
}

/// Subtracts the trivial pair `(KG h, Σ vol ⟨J, h⟩)` from `A`.
/// Rows in `zero_rows` are cleared of round-off before validation.
fn subtract_trivial(
    l: &LatticeSpacetime,
    a: &ObservableClass,
    h: &FieldConfig,
    zero_rows: impl Iterator<Item = usize>,
) -> Result<ObservableClass> {
    let mut test = a.test.sub(&l.kg_apply(h)?);
    for n in zero_rows {
        test.row_mut(n).fill(0.0);
    }
    let alpha = a.alpha - l.inner(l.source(), h);
    ObservableClass::new(l, test, alpha)
}

fn check_ramp(l: &LatticeSpacetime, lo: usize, hi: usize) -> Result<()> {
    let (nt, m) = (l.nt(), l.margin());
    if lo >= hi || lo < m || hi + m >= nt {
        return Err(LatticeError::Geometry(format!(
            "ramp rows {lo}..{hi} do not fit between margins on {nt} rows"
        )));
    }
    Ok(())
}

/// Equivalent class with test function supported in rows `<= hi`; the ramp
/// runs over rows `lo..hi`.
pub fn past_representative(l: &LatticeSpacetime, a: &ObservableClass, lo: usize, hi: usize) -> Result<ObservableClass> {
    a.check_on(l)?;
    check_ramp(l, lo, hi)?;
    let chi = time_ramp(l.nt(), lo, hi);
    let h = l.green(&a.test, GreenKind::Advanced)?.scale_rows(&chi);
    // above the ramp the cancellation is exact up to round-off
    subtract_trivial(l, a, &h, hi + 1..l.nt())
}

/// Equivalent class with test function supported in rows `>= lo`.
pub fn future_representative(l: &LatticeSpacetime, a: &ObservableClass, lo: usize, hi: usize) -> Result<ObservableClass> {
    a.check_on(l)?;
    check_ramp(l, lo, hi)?;
    let chi: Vec<f64> = time_ramp(l.nt(), lo, hi).iter().map(|c| 1.0 - c).collect();
    let h = l.green(&a.test, GreenKind::Retarded)?.scale_rows(&chi);
    subtract_trivial(l, a, &h, 0..lo)
}

/// Equivalent class supported on rows `r` and `r + 1`, obtained from a sharp
/// step between them: `φ' = -KG(χ E φ)`.
pub fn slab_representative(l: &LatticeSpacetime, a: &ObservableClass, r: usize) -> Result<ObservableClass> {
    a.check_on(l)?;
    check_ramp(l, r, r + 1)?;
    let chi = time_ramp(l.nt(), r, r + 1);
    let ret = l.green(&a.test, GreenKind::Retarded)?;
    let adv = l.green(&a.test, GreenKind::Advanced)?;
    let cut = adv.sub(&ret).scale_rows(&chi);
    let mut test = l.kg_apply(&cut)?.scale(-1.0);
    // rows away from the step are zero up to round-off
    for n in (0..l.nt()).filter(|&n| n != r && n != r + 1) {
        test.row_mut(n).fill(0.0);
    }
    let alpha = a.alpha - l.inner(l.source(), &ret.add(&cut));
    ObservableClass::new(l, test, alpha)
}
