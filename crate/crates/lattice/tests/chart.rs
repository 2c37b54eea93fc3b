mod common;

use common::*;
use inhomkg_core::poly::{Monomial, Polynomial};
use inhomkg_core::C64;
use inhomkg_lattice::chart::{commutator_defect, field_equation_defect, HollandsWaldMap, PhaseSpaceChart};
use inhomkg_lattice::quantum::quantum_rce_commutator_check;
use inhomkg_lattice::rce::Perturbation;
use inhomkg_lattice::scenarios::derivative_scenario;
use inhomkg_lattice::{FieldConfig, LatticeSpacetime, ObservableClass};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small() -> LatticeSpacetime {
    curved(24, 6, 0.8, 2)
}

fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, max_degree: usize) -> Polynomial<C64> {
    let mut p = Polynomial::zero(nvars);
    for _ in 0..rng.gen_range(1..5) {
        let d = rng.gen_range(0..=max_degree);
        let m = Monomial::new((0..d).map(|_| rng.gen_range(0..nvars)).collect());
        p.add_term(m, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    }
    p
}

#[test]
fn field_equation_holds_in_the_chart() {
    let l = small();
    let chart = PhaseSpaceChart::new(&l, 11).unwrap();
    assert_eq!(chart.dim(), 1 + 2 * 6 * 2);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let phi = random_compact(&mut rng, &l);
        let d = field_equation_defect(&chart, &l, &phi).unwrap();
        assert!(d <= 1e-9, "{d}");
    }
}

#[test]
fn commutators_reproduce_the_form() {
    let l = small();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for row in [6, 11, 15] {
        let chart = PhaseSpaceChart::new(&l, row).unwrap();
        for _ in 0..5 {
            let a = ObservableClass::new(&l, random_interior(&mut rng, &l), rng.gen_range(-1.0..1.0)).unwrap();
            let b = ObservableClass::new(&l, random_interior(&mut rng, &l), rng.gen_range(-1.0..1.0)).unwrap();
            let d = commutator_defect(&chart, &l, &a, &b).unwrap();
            assert!(d <= 1e-9, "row {row}: {d}");
        }
    }
}

#[test]
fn equivalent_classes_have_equal_fields() {
    let l = small();
    let chart = PhaseSpaceChart::new(&l, 10).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = random_compact(&mut rng, &l);
    let a = ObservableClass::new(&l, random_interior(&mut rng, &l), 0.2).unwrap();
    // adding KG h and removing its source pairing leaves the class unchanged
    let b = ObservableClass::new(&l, a.test.add(&l.kg_apply(&h).unwrap()), 0.2 + l.inner(&h, l.source())).unwrap();
    let (fa, fb) = (chart.field(&l, &a).unwrap(), chart.field(&l, &b).unwrap());
    let diff = &fa - &fb;
    assert!(diff.terms().values().all(|c| c.norm() <= 1e-9 * (1.0 + chart.coordinates(&l, &a).unwrap().iter().fold(0.0_f64, |m, v| m.max(v.abs())))));
}

fn hw_family(rng: &mut ChaCha8Rng, l: &LatticeSpacetime) -> (Vec<FieldConfig>, Vec<FieldConfig>) {
    let pre: Vec<FieldConfig> = (0..3).map(|_| random_compact(rng, l)).collect();
    let mut fam: Vec<FieldConfig> = pre.iter().map(|h| l.kg_apply(h).unwrap()).collect();
    fam.extend((0..3).map(|_| random_interior(rng, l)));
    (fam, pre)
}

#[test]
fn hollands_wald_map_kills_ideal_generators() {
    let l = small();
    let chart = PhaseSpaceChart::new(&l, 11).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (fam, pre) = hw_family(&mut rng, &l);
    let hw = HollandsWaldMap::new(&chart, &l, &fam).unwrap();
    let k = fam.len();
    for _ in 0..10 {
        let x = random_poly(&mut rng, k, 1);
        let y = random_poly(&mut rng, k, 2);
        for (g, h) in pre.iter().enumerate() {
            let d = hw.ideal_defect(&chart, &x, g, l.inner(h, l.source()), &y).unwrap();
            assert!(d <= 1e-9, "generator {g}: {d}");
        }
    }
    // a wrong constant is not in the ideal
    let one = Polynomial::one(k);
    assert!(hw.ideal_defect(&chart, &one, 0, l.inner(&pre[0], l.source()) + 1.0, &one).unwrap() > 0.1);
}

#[test]
fn hollands_wald_map_is_multiplicative() {
    let l = small();
    let chart = PhaseSpaceChart::new(&l, 12).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (fam, _) = hw_family(&mut rng, &l);
    let hw = HollandsWaldMap::new(&chart, &l, &fam).unwrap();
    for _ in 0..10 {
        let x = random_poly(&mut rng, fam.len(), 2);
        let y = random_poly(&mut rng, fam.len(), 2);
        let d = hw.homomorphism_defect(&chart, &x, &y).unwrap();
        assert!(d <= 1e-9, "{d}");
    }
}

#[test]
fn chart_rejects_rows_without_room() {
    let l = small();
    assert!(PhaseSpaceChart::new(&l, 0).is_err());
    assert!(PhaseSpaceChart::new(&l, l.nt() - 2).is_err());
}

#[test]
fn quantum_source_derivative_is_a_constant() {
    let s = derivative_scenario(32, false, true).unwrap();
    let r = quantum_rce_commutator_check(&s.lattice, &s.pert, &s.class, &s.solution, 1.0).unwrap();
    let e = s.lattice.e_map(&s.class.test).unwrap();
    let expected = -s.lattice.inner(&s.pert.j, &e);
    assert!(rel(r.commutator, expected) <= 1e-9, "{} vs {expected}", r.commutator);
    assert!(r.imaginary.abs() <= 1e-12 * expected.abs());
    assert!(r.relative_error <= 1e-8, "{}", r.relative_error);
}

#[test]
fn quantum_derivative_vanishes_without_perturbation() {
    let s = derivative_scenario(16, false, false).unwrap();
    let r = quantum_rce_commutator_check(&s.lattice, &Perturbation::zero(&s.lattice), &s.class, &s.solution, 1e-3).unwrap();
    assert_eq!(r.commutator, 0.0);
    assert_eq!(r.fd_derivative, 0.0);
}

#[test]
fn quantum_metric_derivative_matches_finite_differences() {
    let s = derivative_scenario(64, true, false).unwrap();
    let r = quantum_rce_commutator_check(&s.lattice, &s.pert, &s.class, &s.solution, 1e-3).unwrap();
    assert!(r.relative_error <= 0.02, "{r:?}");
}
