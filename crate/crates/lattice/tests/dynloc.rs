mod common;

use inhomkg_lattice::classes::{class_equal, CLASS_TOLERANCE};
use inhomkg_lattice::dynloc::{admissible_complement, dynloc_fixed_test, kin_dyn_witness, qualifies, DynLocOutcome};
use inhomkg_lattice::rce::rce;
use inhomkg_lattice::scenarios::{
    delocalized_class, dynloc_lattice, random_complement_perturbation, random_local_test, random_region,
};
use inhomkg_lattice::{CompactRegion, ObservableClass, Rect};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn local_classes_are_fixed_by_complement_perturbations() {
    let l = dynloc_lattice().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for case in 0..20 {
        let k = random_region(&mut rng, &l);
        let a = ObservableClass::new(&l, random_local_test(&mut rng, &l, &k), 0.3).unwrap();
        assert!(qualifies(&l, &k, &a).unwrap());
        let pert = random_complement_perturbation(&mut rng, &l, &k);
        assert!(!pert.is_zero(), "case {case}: empty complement");
        match dynloc_fixed_test(&l, &k, &a, &[pert], 1e-9).unwrap() {
            DynLocOutcome::Fixed { max_defect } => assert!(max_defect <= 1e-9, "case {case}: {max_defect}"),
            other => panic!("case {case}: {other:?}"),
        }
    }
}

#[test]
fn constants_are_always_fixed() {
    let l = dynloc_lattice().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let k = random_region(&mut rng, &l);
    let perts: Vec<_> = (0..3).map(|_| random_complement_perturbation(&mut rng, &l, &k)).collect();
    let out = dynloc_fixed_test(&l, &k, &ObservableClass::constant(&l, -1.7), &perts, 1e-9).unwrap();
    assert!(matches!(out, DynLocOutcome::Fixed { .. }), "{out:?}");
}

#[test]
fn perturbations_must_stay_in_the_complement() {
    let l = dynloc_lattice().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let k = random_region(&mut rng, &l);
    let (n, x) = (k.rects[0].t0, k.rects[0].x0);
    let mut pert = random_complement_perturbation(&mut rng, &l, &k);
    pert.j.data_mut()[(n * l.nx() + x) * l.p()] = 1.0;
    let a = ObservableClass::constant(&l, 0.0);
    assert!(dynloc_fixed_test(&l, &k, &a, &[pert], 1e-9).is_err());
}

#[test]
fn spacelike_class_yields_a_violation_witness() {
    let l = dynloc_lattice().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..5 {
        let k = random_region(&mut rng, &l);
        let r = k.rects[0];
        // same rows, opposite side of the circle
        let shift = l.nx() / 2;
        let far = CompactRegion::rect(Rect::new(r.t0, r.t1, (r.x0 + shift) % l.nx(), (r.x0 + shift) % l.nx() + (r.x1 - r.x0)));
        let a = ObservableClass::new(&l, random_local_test(&mut rng, &l, &far), 0.0).unwrap();
        assert!(!qualifies(&l, &k, &a).unwrap());
        match dynloc_fixed_test(&l, &k, &a, &[], 1e-9).unwrap() {
            DynLocOutcome::Violation { witness, shift } => {
                let allowed = admissible_complement(&l, &k);
                assert!(witness.site_mask().iter().zip(&allowed).all(|(s, ok)| !s || *ok));
                let e = l.e_map(&a.test).unwrap();
                let predicted = -l.inner(&witness.j, &e);
                assert!(shift.abs() > 1e-6);
                assert!((shift - predicted).abs() <= 1e-9 * predicted.abs());
                let moved = rce(&l, &witness, &a).unwrap();
                assert!(!class_equal(&l, &moved, &a, CLASS_TOLERANCE).unwrap().equal);
            }
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn witness_localizes_delocalized_classes() {
    let l = dynloc_lattice().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for i in 0..10 {
        let k = random_region(&mut rng, &l);
        let case = delocalized_class(&mut rng, &l, &k).unwrap();
        let (a, o) = (&case.class, &case.region);
        assert!(qualifies(&l, &k, a).unwrap());
        let w = kin_dyn_witness(&l, o, a, CLASS_TOLERANCE).unwrap_or_else(|e| panic!("case {i}: {e}"));
        assert!(w.step_row.is_some());
        let mask = o.mask(l.nt(), l.nx());
        assert!(w.class.test.support_mask(0.0).iter().zip(&mask).all(|(s, m)| !s || *m));
        assert!(class_equal(&l, a, &w.class, CLASS_TOLERANCE).unwrap().equal);
        // dropping the KG-exact part shifts the constant by its preimage paired with the source
        let local = ObservableClass::new(&l, case.local.clone(), a.alpha - l.inner(&case.far, l.source())).unwrap();
        assert!(class_equal(&l, &local, &w.class, CLASS_TOLERANCE).unwrap().equal);
        let (ea, ew) = (l.e_map(&a.test).unwrap(), l.e_map(&w.class.test).unwrap());
        assert!(ea.sub(&ew).max_abs() <= 1e-9 * ea.max_abs());
    }
}

#[test]
fn classes_already_in_the_region_are_returned() {
    let l = dynloc_lattice().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let k = random_region(&mut rng, &l);
    let a = ObservableClass::new(&l, random_local_test(&mut rng, &l, &k), 0.9).unwrap();
    let w = kin_dyn_witness(&l, &k, &a, CLASS_TOLERANCE).unwrap();
    assert_eq!(w.class, a);
    assert_eq!(w.step_row, None);
}
