//! Finite-dimensional charts of the lattice phase space: every class is
//! equivalent to one supported on two adjacent rows, so point evaluations on
//! those rows together with the constant class generate everything. The
//! chart turns lattice classes into linear elements of the canonical
//! algebras of the core crate.

use inhomkg_core::ccr::{commutator, quantum_ideal_reduce, star_product};
use inhomkg_core::poly::Polynomial;
use inhomkg_core::presymplectic::{PointedPreSympSpace, PreSympSpace, ScalarMode};
use inhomkg_core::C64;

use crate::classes::{slab_representative, ObservableClass};
use crate::error::Result;
use crate::field::FieldConfig;
use crate::spacetime::LatticeSpacetime;

/// Largest coefficient modulus.
pub fn coeff_abs_max(p: &Polynomial<C64>) -> f64 {
    p.terms().values().fold(0.0, |m, c| m.max(c.norm()))
}

/// Tolerance used when validating float presymplectic forms.
pub const FORM_TOLERANCE: f64 = 1e-9;

/// Antisymmetrized form with the given labels, pointed at generator 0.
pub(crate) fn pointed_float_space(labels: Vec<String>, mut form: Vec<Vec<f64>>) -> Result<PointedPreSympSpace<f64>> {
    let n = form.len();
    for i in 0..n {
        form[i][i] = 0.0;
        for j in i + 1..n {
            let v = 0.5 * (form[i][j] - form[j][i]);
            form[i][j] = v;
            form[j][i] = -v;
        }
    }
    let base = PreSympSpace::new(labels, form, ScalarMode::Floating { tolerance: FORM_TOLERANCE })?;
    let mut point = vec![0.0; n];
    point[0] = 1.0;
    Ok(PointedPreSympSpace::new(base, point)?)
}

#[derive(Clone, Debug)]
pub struct PhaseSpaceChart {
    row: usize,
    lattice: u64,
    /// `(n, x, c)` of generator `1 + k`.
    sites: Vec<(usize, usize, usize)>,
    space: PointedPreSympSpace<f64>,
}

impl PhaseSpaceChart {
    /// Generators: the constant class, then point evaluations on rows `r`
    /// and `r + 1`.
    pub fn new(l: &LatticeSpacetime, row: usize) -> Result<Self> {
        let (nx, p) = (l.nx(), l.p());
        let mut sites = Vec::with_capacity(2 * nx * p);
        for n in [row, row + 1] {
            for x in 0..nx {
                for c in 0..p {
                    sites.push((n, x, c));
                }
            }
        }
        // probe the step geometry once so that errors surface here
        slab_representative(l, &ObservableClass::constant(l, 0.0), row)?;
        let dim = sites.len() + 1;
        let mut form = vec![vec![0.0; dim]; dim];
        for (t, &(nt_, xt, ct)) in sites.iter().enumerate() {
            let e = l.e_map(&l.delta(nt_, xt, ct))?;
            for (s, &(ns, xs, cs)) in sites.iter().enumerate() {
                form[1 + s][1 + t] = e[(ns, xs, cs)];
            }
        }
        let mut labels = vec!["1".to_string()];
        labels.extend(sites.iter().map(|(n, x, c)| format!("phi[{n},{x},{c}]")));
        let space = pointed_float_space(labels, form)?;
        Ok(PhaseSpaceChart { row, lattice: l.id(), sites, space })
    }

    pub fn space(&self) -> &PointedPreSympSpace<f64> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn row(&self) -> usize {
        self.row
    }

    /// Coordinates `(α', vol·φ'(s)...)` of the two-row representative.
    pub fn coordinates(&self, l: &LatticeSpacetime, a: &ObservableClass) -> Result<Vec<f64>> {
        let rep = slab_representative(l, a, self.row)?;
        let nx = l.nx();
        let mut out = Vec::with_capacity(self.dim());
        out.push(rep.alpha);
        for &(n, x, c) in &self.sites {
            out.push(rep.test[(n, x, c)] * l.vol()[n * nx + x]);
        }
        Ok(out)
    }

    /// The field operator of a class as a linear element.
    pub fn field(&self, l: &LatticeSpacetime, a: &ObservableClass) -> Result<Polynomial<C64>> {
        let coords: Vec<C64> = self.coordinates(l, a)?.into_iter().map(|v| C64::new(v, 0.0)).collect();
        Ok(Polynomial::linear(&coords))
    }

    /// Field operator of the class `(f, 0)`.
    pub fn smeared(&self, l: &LatticeSpacetime, f: &FieldConfig) -> Result<Polynomial<C64>> {
        self.field(l, &ObservableClass::new(l, f.clone(), 0.0)?)
    }

    pub fn lattice(&self) -> u64 {
        self.lattice
    }
}

/// Largest coefficient of `Φ(KG φ) + Σ vol ⟨φ, J⟩` after the quantum ideal
/// reduction, relative to the size of the terms involved.
pub fn field_equation_defect(chart: &PhaseSpaceChart, l: &LatticeSpacetime, phi: &FieldConfig) -> Result<f64> {
    let kphi = l.kg_apply(phi)?;
    let src = l.inner(phi, l.source());
    let field = chart.smeared(l, &kphi)?;
    let total = &field + &Polynomial::constant(chart.dim(), C64::new(src, 0.0));
    let reduced = quantum_ideal_reduce(chart.space(), &total)?;
    let scale = coeff_abs_max(&field).max(src.abs()).max(1.0);
    Ok(coeff_abs_max(&reduced) / scale)
}

/// `|[Φ(A), Φ(B)] - i σ(A, B)|` relative to `max(1, |σ|)`.
pub fn commutator_defect(
    chart: &PhaseSpaceChart,
    l: &LatticeSpacetime,
    a: &ObservableClass,
    b: &ObservableClass,
) -> Result<f64> {
    let fa = chart.field(l, a)?;
    let fb = chart.field(l, b)?;
    let sigma = l.presymp(&a.test, &b.test)?;
    let comm = commutator(chart.space().base(), &fa, &fb)?;
    let expected = Polynomial::constant(chart.dim(), C64::new(0.0, sigma));
    Ok(coeff_abs_max(&(&comm - &expected)) / sigma.abs().max(1.0))
}

/// The map from the off-shell algebra generated by smeared fields to the
/// on-shell algebra, on a finite family of test functions.
#[derive(Clone, Debug)]
pub struct HollandsWaldMap {
    offshell: PreSympSpace<f64>,
    images: Vec<Polynomial<C64>>,
    target_dim: usize,
}

impl HollandsWaldMap {
    pub fn new(chart: &PhaseSpaceChart, l: &LatticeSpacetime, family: &[FieldConfig]) -> Result<Self> {
        let k = family.len();
        let mut form = vec![vec![0.0; k]; k];
        let images_e = family.iter().map(|f| l.e_map(f)).collect::<Result<Vec<_>>>()?;
        for i in 0..k {
            for j in 0..k {
                form[i][j] = l.inner(&family[i], &images_e[j]);
            }
        }
        for i in 0..k {
            for j in i + 1..k {
                let v = 0.5 * (form[i][j] - form[j][i]);
                form[i][j] = v;
                form[j][i] = -v;
            }
            form[i][i] = 0.0;
        }
        let labels = (0..k).map(|i| format!("f{i}")).collect();
        let offshell = PreSympSpace::new(labels, form, ScalarMode::Floating { tolerance: FORM_TOLERANCE })?;
        let images = family.iter().map(|f| chart.smeared(l, f)).collect::<Result<Vec<_>>>()?;
        Ok(HollandsWaldMap { offshell, images, target_dim: chart.dim() })
    }

    pub fn offshell(&self) -> &PreSympSpace<f64> {
        &self.offshell
    }

    /// Image in the on-shell algebra, before reduction.
    pub fn apply(&self, x: &Polynomial<C64>) -> Polynomial<C64> {
        x.substitute(&self.images, self.target_dim)
    }

    /// `|κ(x ⋆ y) - κ(x) ⋆ κ(y)|` after reduction, relative.
    pub fn homomorphism_defect(&self, chart: &PhaseSpaceChart, x: &Polynomial<C64>, y: &Polynomial<C64>) -> Result<f64> {
        let space = chart.space();
        let lhs = quantum_ideal_reduce(space, &self.apply(&star_product(&self.offshell, x, y)?))?;
        let rhs = quantum_ideal_reduce(space, &star_product(space.base(), &self.apply(x), &self.apply(y))?)?;
        Ok(coeff_abs_max(&(&lhs - &rhs)) / coeff_abs_max(&lhs).max(1.0))
    }

    /// Reduced image of `x ⋆ (f_k + c) ⋆ y`, relative to the unreduced size.
    pub fn ideal_defect(
        &self,
        chart: &PhaseSpaceChart,
        x: &Polynomial<C64>,
        generator: usize,
        constant: f64,
        y: &Polynomial<C64>,
    ) -> Result<f64> {
        let k = self.offshell.dim();
        let g = &Polynomial::var(k, generator) + &Polynomial::constant(k, C64::new(constant, 0.0));
        let word = star_product(&self.offshell, &star_product(&self.offshell, x, &g)?, y)?;
        let image = self.apply(&word);
        let reduced = quantum_ideal_reduce(chart.space(), &image)?;
        Ok(coeff_abs_max(&reduced) / coeff_abs_max(&image).max(1.0))
    }
}
