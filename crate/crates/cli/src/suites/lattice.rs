use inhomkg_core::ccr::{quantum_ideal_reduce, star_product};
use inhomkg_core::poisson::{distinguished, ideal_reduce, shift_endomorphism, sign_flip, LinFunctional};
use inhomkg_core::poly::{Monomial, Polynomial};
use inhomkg_core::presymplectic::PointedPreSympSpace;
use inhomkg_core::sample::{random_cpoly, random_pointed_space, random_poly, small_rational};
use inhomkg_core::{q, C64, CQ, Q};
use inhomkg_lattice::chart::{commutator_defect, field_equation_defect, HollandsWaldMap, PhaseSpaceChart};
use inhomkg_lattice::presets::{metric_preset, source_preset};
use inhomkg_lattice::rce::{rce_source_only, shift_class};
use inhomkg_lattice::scenarios::{divergence_error, random_block, random_bump_perturbation};
use inhomkg_lattice::stress::{stress_energy, tilde_stress};
use inhomkg_lattice::{class_equal, rce, FieldConfig, LatticeGeometry, LatticeSpacetime, ObservableClass, Perturbation};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{err, CaseResult, Kind, Measured, Runner, Tally};
use crate::config::SuiteConfig;
use crate::plot::loglog_svg;
use crate::report::{ConvergenceTable, Semantics};

const CLASS_SAMPLES: usize = 10;
const CHART_SAMPLES: usize = 10;

fn build(cfg: &SuiteConfig, geom: LatticeGeometry) -> Result<LatticeSpacetime, String> {
    let metric = metric_preset(&cfg.lattice.metric, &geom).map_err(err)?;
    let source = source_preset(&cfg.lattice.source, &geom, cfg.lattice.source_strength).map_err(err)?;
    LatticeSpacetime::new(geom, metric, source).map_err(err)
}

fn config_lattice(cfg: &SuiteConfig, mass: Option<f64>) -> Result<LatticeSpacetime, String> {
    let mut g = cfg.lattice.geometry();
    if let Some(m) = mass {
        g.mass = m;
    }
    build(cfg, g)
}

/// Perturbation rows in the middle quarter of the lattice.
fn pert_rows(l: &LatticeSpacetime) -> (usize, usize) {
    (3 * l.nt() / 8, 5 * l.nt() / 8)
}

fn random_class(rng: &mut ChaCha8Rng, l: &LatticeSpacetime) -> Result<ObservableClass, String> {
    let m = l.margin();
    let test = random_block(rng, l, m, l.nt() - m - 1);
    ObservableClass::new(l, test, rng.gen_range(-1.0..1.0)).map_err(err)
}

/// Largest class_equal defect over pairs, with the first diagnostic that
/// exceeds `tol`.
struct Worst {
    value: f64,
    note: Option<String>,
    tol: f64,
}

impl Worst {
    fn new(tol: f64) -> Self {
        Worst { value: 0.0, note: None, tol }
    }

    fn compare(&mut self, l: &LatticeSpacetime, a: &ObservableClass, b: &ObservableClass) -> Result<(), String> {
        let c = class_equal(l, a, b, self.tol).map_err(err)?;
        self.value = self.value.max(c.field_defect).max(c.alpha_defect);
        if !c.equal && self.note.is_none() {
            self.note = Some(c.diagnostic);
        }
        Ok(())
    }

    fn finish(self) -> CaseResult {
        Ok(Measured { value: self.value, note: self.note })
    }
}

/// Null functional: random coefficients with the pivot solved so that the
/// distinguished point is annihilated.
fn null_functional(rng: &mut ChaCha8Rng, v: &PointedPreSympSpace<Q>) -> LinFunctional<Q> {
    let (n, k) = (v.dim(), v.pivot());
    let mut c: Vec<Q> = (0..n).map(|_| small_rational(rng)).collect();
    let rest = (0..n).filter(|&i| i != k).fold(q(0, 1), |acc, i| acc + v.point()[i].clone() * c[i].clone());
    c[k] = -rest / v.point()[k].clone();
    LinFunctional::new(c)
}

fn algebra_shifts(rng: &mut ChaCha8Rng, samples: usize) -> CaseResult {
    let mut t = Tally::default();
    for k in 0..samples {
        let dim = rng.gen_range(1..=6);
        let general = rng.gen_bool(0.5);
        let v = random_pointed_space(rng, dim, general);
        let (s, n) = (v.base(), v.dim());
        let c = null_functional(rng, &v);
        let (x, y) = (random_poly(rng, n, 3, 3), random_poly(rng, n, 3, 3));
        let sh = |a: &Polynomial<Q>| shift_endomorphism(&v, a, &c).map_err(err);
        t.check(sh(&(&x * &y))? == &sh(&x)? * &sh(&y)?, || format!("element {k}: classical product"));
        let g = &distinguished::<Q, Q>(&v) - &Polynomial::one(n);
        t.check(ideal_reduce(&v, &sh(&(&g * &x))?).map_err(err)?.is_zero(), || format!("element {k}: classical ideal"));
        let (cx, cy) = (random_cpoly(rng, n, 3, 3), random_cpoly(rng, n, 3, 3));
        let shq = |a: &Polynomial<CQ>| shift_endomorphism(&v, a, &c).map_err(err);
        let lhs = shq(&star_product(s, &cx, &cy).map_err(err)?)?;
        t.check(lhs == star_product(s, &shq(&cx)?, &shq(&cy)?).map_err(err)?, || format!("element {k}: star product"));
        let gq = &distinguished::<Q, CQ>(&v) - &Polynomial::one(n);
        let word = star_product(s, &star_product(s, &cx, &gq).map_err(err)?, &cy).map_err(err)?;
        t.check(quantum_ideal_reduce(&v, &shq(&word)?).map_err(err)?.is_zero(), || format!("element {k}: quantum ideal"));
    }
    t.finish()
}

fn random_chart_poly(rng: &mut ChaCha8Rng, nvars: usize, max_degree: usize) -> Polynomial<C64> {
    let mut p = Polynomial::zero(nvars);
    for _ in 0..rng.gen_range(1..5) {
        let d = rng.gen_range(0..=max_degree);
        let m = Monomial::new((0..d).map(|_| rng.gen_range(0..nvars)).collect());
        p.add_term(m, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    }
    p
}

/// Small lattice on which charts and the off-shell map stay cheap.
fn chart_lattice(cfg: &SuiteConfig) -> Result<LatticeSpacetime, String> {
    build(cfg, LatticeGeometry::unit_circle(6, 24, 0.5, cfg.lattice.mass, cfg.lattice.p))
}

/// Random values on a block of rows one away from the margins, so that KG
/// of it is still interior.
fn compact_block(rng: &mut ChaCha8Rng, l: &LatticeSpacetime) -> FieldConfig {
    let m = l.margin();
    random_block(rng, l, m + 1, l.nt() - m - 2)
}

/// Random values off the dyadic grid of the generator, so that adding a
/// shift actually rounds.
fn full_random(rng: &mut ChaCha8Rng, l: &LatticeSpacetime) -> FieldConfig {
    FieldConfig::from_fn(l.nt(), l.nx(), l.p(), |_, _, _| rng.gen_range(-1.0..1.0) * std::f64::consts::PI)
}

fn automorphisms(r: &mut Runner) {
    let cfg = r.cfg;
    r.exact("shift_automorphisms", |rng| algebra_shifts(rng, cfg.samples.algebra));
    r.exact("sign_flip_obstruction", |rng| {
        let mut t = Tally::default();
        for k in 0..cfg.samples.algebra {
            let dim = rng.gen_range(1..=6);
            let general = rng.gen_bool(0.5);
        let v = random_pointed_space(rng, dim, general);
            let g = &distinguished::<Q, CQ>(&v) - &Polynomial::one(v.dim());
            let flipped = quantum_ideal_reduce(&v, &sign_flip(&g)).map_err(err)?;
            t.check(!flipped.is_zero(), || format!("space {k}: flipped generator reduces to zero"));
        }
        t.finish()
    });
    r.defect("shift_commutes_with_rce", 1e-8, |rng| {
        let l = config_lattice(cfg, Some(0.0))?;
        let (lo, hi) = pert_rows(&l);
        let mut w = Worst::new(1e-8);
        for _ in 0..cfg.samples.shift_cases {
            let with_metric = rng.gen_bool(0.7);
            let pert = random_bump_perturbation(rng, &l, lo, hi, with_metric);
            let mu: Vec<f64> = (0..l.p()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let a = random_class(rng, &l)?;
            let one = shift_class(&l, &rce(&l, &pert, &a).map_err(err)?, &mu).map_err(err)?;
            let two = rce(&l, &pert, &shift_class(&l, &a, &mu).map_err(err)?).map_err(err)?;
            w.compare(&l, &one, &two)?;
        }
        w.finish()
    });
}

fn exact_rce(r: &mut Runner) {
    let cfg = r.cfg;
    let lattice = config_lattice(cfg, None);
    r.defect("rce_zero_is_identity", 1e-9, |rng| {
        let l = lattice.as_ref().map_err(Clone::clone)?;
        let mut w = Worst::new(1e-9);
        for _ in 0..CLASS_SAMPLES {
            let a = random_class(rng, l)?;
            w.compare(l, &a, &rce(l, &Perturbation::zero(l), &a).map_err(err)?)?;
        }
        w.finish()
    });
    r.defect("rce_fixes_constants", 1e-9, |rng| {
        let l = lattice.as_ref().map_err(Clone::clone)?;
        let (lo, hi) = pert_rows(l);
        let mut w = Worst::new(1e-9);
        for _ in 0..CLASS_SAMPLES {
            let a = ObservableClass::constant(l, rng.gen_range(-5.0..5.0));
            let pert = random_bump_perturbation(rng, l, lo, hi, true);
            w.compare(l, &a, &rce(l, &pert, &a).map_err(err)?)?;
        }
        w.finish()
    });
    r.defect("rce_source_closed_form", 1e-9, |rng| {
        let l = lattice.as_ref().map_err(Clone::clone)?;
        let (lo, hi) = pert_rows(l);
        let mut w = Worst::new(1e-9);
        for _ in 0..CLASS_SAMPLES {
            let a = random_class(rng, l)?;
            let pert = random_bump_perturbation(rng, l, lo, hi, false);
            let closed = rce_source_only(l, &pert.j, &a).map_err(err)?;
            w.compare(l, &rce(l, &pert, &a).map_err(err)?, &closed)?;
        }
        w.finish()
    });
}

fn divergence(r: &mut Runner) {
    let cfg = r.cfg;
    let lat = &cfg.lattice;
    let errors: Result<Vec<f64>, String> = cfg
        .divergence_refinements
        .iter()
        .map(|&nx| divergence_error(nx, &lat.metric, &lat.source, lat.mass).map_err(err))
        .collect();
    if let Ok(e) = &errors {
        let table = ConvergenceTable {
            columns: vec!["residual_l2".into()],
            rows: cfg.divergence_refinements.iter().zip(e).map(|(&nx, &v)| (nx, 1.0 / nx as f64, vec![v])).collect(),
        };
        r.artifact("divergence_convergence.csv", table.to_csv());
        if cfg.svg {
            let pts: Vec<(f64, f64)> = table.rows.iter().map(|(_, dx, v)| (*dx, v[0])).collect();
            r.artifact("divergence_convergence.svg", loglog_svg("divergence residual", &pts));
        }
    }
    // error ratios under halving must lie in [3.3, 4.8]
    let ratio = |k: usize| -> CaseResult {
        let e = errors.as_ref().map_err(Clone::clone)?;
        if e.len() < k + 2 {
            return Err(format!("needs {} divergence refinements", k + 2));
        }
        let (a, b) = (e[k], e[k + 1]);
        Ok(Measured { value: a / b, note: Some(format!("errors {a:.4e} / {b:.4e}")) })
    };
    let fine = cfg.divergence_refinements.len().saturating_sub(2);
    r.case("divergence_ratio_coarse", Kind::Bound, Semantics::Within, 4.05, 0.75, |_| ratio(0));
    r.case("divergence_ratio_fine", Kind::Bound, Semantics::Within, 4.05, 0.75, |_| ratio(fine.max(1)));
}

fn field_contract(r: &mut Runner) {
    let cfg = r.cfg;
    let lattice = chart_lattice(cfg);
    r.defect("field_equation_in_chart", 1e-9, |rng| {
        let l = lattice.as_ref().map_err(Clone::clone)?;
        let chart = PhaseSpaceChart::new(l, l.nt() / 2).map_err(err)?;
        let mut worst = 0.0f64;
        for _ in 0..CHART_SAMPLES {
            worst = worst.max(field_equation_defect(&chart, l, &compact_block(rng, l)).map_err(err)?);
        }
        Ok(worst.into())
    });
    r.defect("commutator_reproduces_form", 1e-9, |rng| {
        let l = lattice.as_ref().map_err(Clone::clone)?;
        let m = l.margin();
        let mut worst = 0.0f64;
        for row in [m + 4, l.nt() / 2, l.nt() - m - 6] {
            let chart = PhaseSpaceChart::new(l, row).map_err(err)?;
            for _ in 0..CHART_SAMPLES / 2 {
                let (a, b) = (random_class(rng, l)?, random_class(rng, l)?);
                worst = worst.max(commutator_defect(&chart, l, &a, &b).map_err(err)?);
            }
        }
        Ok(worst.into())
    });
    r.defect("hollands_wald_ideal", 1e-9, |rng| {
        let l = lattice.as_ref().map_err(Clone::clone)?;
        let chart = PhaseSpaceChart::new(l, l.nt() / 2).map_err(err)?;
        let pre: Vec<FieldConfig> = (0..3).map(|_| compact_block(rng, l)).collect();
        let mut family = pre.iter().map(|h| l.kg_apply(h).map_err(err)).collect::<Result<Vec<_>, _>>()?;
        let m = l.margin();
        family.extend((0..3).map(|_| random_block(rng, l, m, l.nt() - m - 1)));
        let hw = HollandsWaldMap::new(&chart, l, &family).map_err(err)?;
        let k = family.len();
        let mut worst = 0.0f64;
        for _ in 0..CHART_SAMPLES {
            let x = random_chart_poly(rng, k, 1);
            let y = random_chart_poly(rng, k, 2);
            // generators KG h + Σ vol ⟨h, J⟩
            for (g, h) in pre.iter().enumerate() {
                worst = worst.max(hw.ideal_defect(&chart, &x, g, l.inner(h, l.source()), &y).map_err(err)?);
            }
            let (a, b) = (random_chart_poly(rng, k, 2), random_chart_poly(rng, k, 2));
            worst = worst.max(hw.homomorphism_defect(&chart, &a, &b).map_err(err)?);
        }
        Ok(worst.into())
    });
}

fn gauge(r: &mut Runner) {
    let cfg = r.cfg;
    let lattice = config_lattice(cfg, Some(0.0));
    let sample = |rng: &mut ChaCha8Rng| -> Result<_, String> {
        let l = lattice.as_ref().map_err(Clone::clone)?;
        let phi = full_random(rng, l);
        let mu: Vec<f64> = (0..l.p()).map(|_| rng.gen_range(-2.0..2.0) * std::f64::consts::E).collect();
        let shifted = FieldConfig::from_fn(l.nt(), l.nx(), l.p(), |n, x, c| phi[(n, x, c)] + mu[c]);
        Ok((l, phi, shifted, mu))
    };
    r.defect("gauge_invariant_stress", 1e-12, |rng| {
        let mut worst = 0.0f64;
        for _ in 0..CLASS_SAMPLES {
            let (l, phi, shifted, _) = sample(rng)?;
            let base = tilde_stress(l, &phi).map_err(err)?;
            let d = tilde_stress(l, &shifted).map_err(err)?.sub(&base);
            worst = worst.max(d.max_abs() / base.max_abs().max(f64::MIN_POSITIVE));
        }
        Ok(worst.into())
    });
    r.defect("stress_shift_defect", 1e-12, |rng| {
        let mut worst = 0.0f64;
        for _ in 0..CLASS_SAMPLES {
            let (l, phi, shifted, mu) = sample(rng)?;
            let base = stress_energy(l, &phi).map_err(err)?;
            let d = stress_energy(l, &shifted).map_err(err)?.sub(&base);
            let scale = base.max_abs().max(f64::MIN_POSITIVE);
            let (nt, nx) = (l.nt(), l.nx());
            for n in 1..nt - 1 {
                for x in 0..nx {
                    let (utt, utx, uxx) = l.inverse_metric(n * nx + x);
                    let mj: f64 = (0..l.p()).map(|c| mu[c] * l.source()[(n, x, c)]).sum();
                    let e = (d.tt[(n, x, 0)] - utt * mj)
                        .abs()
                        .max((d.tx[(n, x, 0)] - utx * mj).abs())
                        .max((d.xx[(n, x, 0)] - uxx * mj).abs());
                    worst = worst.max(e / scale);
                }
            }
        }
        Ok(worst.into())
    });
}

pub(super) fn run(r: &mut Runner) {
    automorphisms(r);
    exact_rce(r);
    divergence(r);
    field_contract(r);
    gauge(r);
}
