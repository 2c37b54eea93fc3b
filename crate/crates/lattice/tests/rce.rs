mod common;

use common::*;
use inhomkg_lattice::classes::{class_equal, CLASS_TOLERANCE};
use inhomkg_lattice::hodge::{hodge_inverse, hodge_variant, rce_top_form_closed, top_form_perturbation};
use inhomkg_lattice::rce::{rce, rce_derivative_fd, rce_source_only, shift_class, Perturbation};
use inhomkg_lattice::scenarios::{compare_derivative, derivative_scenario, random_bump_perturbation};
use inhomkg_lattice::{LatticeError, LatticeSpacetime, ObservableClass};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random smooth metric and source perturbation with support in rows `lo..=hi`.
fn random_pert(rng: &mut ChaCha8Rng, l: &LatticeSpacetime, lo: usize, hi: usize, metric: bool) -> Perturbation {
    random_bump_perturbation(rng, l, lo, hi, metric)
}

fn setup(seed: u64, mass: f64) -> (LatticeSpacetime, ChaCha8Rng) {
    (curved(48, 12, mass, 2), ChaCha8Rng::seed_from_u64(seed))
}

#[test]
fn zero_perturbation_is_identity() {
    let (l, mut rng) = setup(1, 1.0);
    let a = ObservableClass::new(&l, random_interior(&mut rng, &l), 0.4).unwrap();
    let out = rce(&l, &Perturbation::zero(&l), &a).unwrap();
    assert!(class_equal(&l, &a, &out, CLASS_TOLERANCE).unwrap().equal);
    let s = derivative_scenario(16, false, false).unwrap();
    assert_eq!(rce_derivative_fd(&s.lattice, &s.pert, &s.class, &s.solution, 1e-3).unwrap(), 0.0);
}

#[test]
fn perturbations_are_validated() {
    let (l, mut rng) = setup(2, 1.0);
    let a = ObservableClass::constant(&l, 0.0);
    let mut edge = Perturbation::zero(&l);
    edge.j[(1, 3, 0)] = 1.0;
    assert!(rce(&l, &edge, &a).is_err());
    let mut flip = random_pert(&mut rng, &l, 20, 28, true);
    flip.h.g_tt[24 * 12 + 5] = -3.0;
    assert!(matches!(rce(&l, &flip, &a), Err(LatticeError::NotLorentzian { .. })));
    let mut mixed = Perturbation::zero(&l);
    mixed.h.g_tx[24 * 12 + 5] = 0.01;
    assert!(matches!(rce(&l, &mixed, &a), Err(LatticeError::MixedMetric { .. })));
    let early = random_pert(&mut rng, &l, 3, 8, false);
    assert!(matches!(rce(&l, &early, &a), Err(LatticeError::Geometry(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn constants_are_fixed(seed in any::<u64>(), alpha in -5.0..5.0f64) {
        let (l, mut rng) = setup(seed, 1.0);
        let pert = random_pert(&mut rng, &l, 18, 30, true);
        let a = ObservableClass::constant(&l, alpha);
        let out = rce(&l, &pert, &a).unwrap();
        prop_assert!(class_equal(&l, &a, &out, CLASS_TOLERANCE).unwrap().equal);
    }

    #[test]
    fn source_only_matches_closed_form(seed in any::<u64>()) {
        let (l, mut rng) = setup(seed, 0.8);
        let pert = random_pert(&mut rng, &l, 16, 32, false);
        let a = ObservableClass::new(&l, random_interior(&mut rng, &l), rng.gen_range(-1.0..1.0)).unwrap();
        let out = rce(&l, &pert, &a).unwrap();
        let closed = rce_source_only(&l, &pert.j, &a).unwrap();
        let cmp = class_equal(&l, &out, &closed, CLASS_TOLERANCE).unwrap();
        prop_assert!(cmp.equal, "{:?}", cmp);
    }

    #[test]
    fn rce_respects_classes_and_form(seed in any::<u64>()) {
        let (l, mut rng) = setup(seed, 1.2);
        let pert = random_pert(&mut rng, &l, 18, 30, true);
        let a = ObservableClass::new(&l, random_interior(&mut rng, &l), 0.1).unwrap();
        let b = ObservableClass::new(&l, random_interior(&mut rng, &l), -0.3).unwrap();
        let h = random_compact(&mut rng, &l);
        let a2 = ObservableClass::new(&l, a.test.add(&l.kg_apply(&h).unwrap()), a.alpha + l.inner(l.source(), &h)).unwrap();
        let (ra, ra2, rb) = (rce(&l, &pert, &a).unwrap(), rce(&l, &pert, &a2).unwrap(), rce(&l, &pert, &b).unwrap());
        let cmp = class_equal(&l, &ra, &ra2, CLASS_TOLERANCE).unwrap();
        prop_assert!(cmp.equal, "{:?}", cmp);
        let before = l.presymp(&a.test, &b.test).unwrap();
        let after = l.presymp(&ra.test, &rb.test).unwrap();
        prop_assert!((before - after).abs() <= 1e-8 * before.abs().max(1e-6), "{before} {after}");
    }

    #[test]
    fn shift_commutes_with_rce(seed in any::<u64>()) {
        let (l, mut rng) = setup(seed, 0.0);
        let with_metric = rng.gen_bool(0.7);
        let pert = random_pert(&mut rng, &l, 18, 30, with_metric);
        let mu = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let a = ObservableClass::new(&l, random_interior(&mut rng, &l), 0.2).unwrap();
        let one = shift_class(&l, &rce(&l, &pert, &a).unwrap(), &mu).unwrap();
        let two = rce(&l, &pert, &shift_class(&l, &a, &mu).unwrap()).unwrap();
        let cmp = class_equal(&l, &one, &two, 1e-8).unwrap();
        prop_assert!(cmp.equal, "{:?}", cmp);
        // the shift preserves the form exactly since it leaves test functions alone
        prop_assert_eq!(shift_class(&l, &a, &mu).unwrap().test, a.test);
    }

    #[test]
    fn top_form_sources_follow_their_closed_form(seed in any::<u64>()) {
        let (l, mut rng) = setup(seed, 0.5);
        let mut pert = random_pert(&mut rng, &l, 18, 30, true);
        let top_j = pert.j.scale(0.5);
        let a = ObservableClass::new(&l, random_interior(&mut rng, &l), 0.0).unwrap();
        let induced = top_form_perturbation(&l, &pert.h, &top_j).unwrap();
        pert.j = induced.j.clone();
        let direct = rce(&l, &pert, &a).unwrap();
        let closed = rce_top_form_closed(&l, &pert.h, &top_j, &a).unwrap();
        let cmp = class_equal(&l, &direct, &closed, CLASS_TOLERANCE).unwrap();
        prop_assert!(cmp.equal, "{:?}", cmp);
    }
}

#[test]
fn shift_requires_massless_theory() {
    let (l, _) = setup(3, 1.0);
    assert!(shift_class(&l, &ObservableClass::constant(&l, 0.0), &[1.0, 0.0]).is_err());
}

#[test]
fn hodge_round_trip() {
    let l = curved(24, 10, 0.0, 2);
    let top = hodge_inverse(&l);
    let back = hodge_variant(*l.geometry(), l.metric().clone(), &top).unwrap();
    assert!(back.source().sub(l.source()).max_abs() <= 1e-14 * l.source().max_abs());
}

#[test]
fn source_derivative_is_exact() {
    let s = derivative_scenario(32, false, true).unwrap();
    let e = s.lattice.e_map(&s.class.test).unwrap();
    let expected = -s.lattice.inner(&s.pert.j, &e);
    // linear in the step, so any step works; a unit step avoids cancellation
    let fd = rce_derivative_fd(&s.lattice, &s.pert, &s.class, &s.solution, 1.0).unwrap();
    assert!(rel(fd, expected) < 1e-10, "{fd} {expected}");
}

#[test]
fn metric_derivative_matches_stress_tensor() {
    let s = derivative_scenario(64, true, false).unwrap();
    let c = compare_derivative(&s, 1e-3).unwrap();
    assert!(c.relative_error <= 0.02, "{c:?}");
}
