mod common;

use common::*;
use inhomkg_lattice::classes::{
    class_equal, future_representative, pairing, past_representative, slab_representative, time_ramp, CLASS_TOLERANCE,
};
use inhomkg_lattice::{FieldConfig, LatticeError, LatticeSpacetime, ObservableClass};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn solution(l: &LatticeSpacetime, rng: &mut ChaCha8Rng) -> FieldConfig {
    let w = l.nx() * l.p();
    let r0: Vec<f64> = (0..w).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let r1: Vec<f64> = r0.iter().map(|v| v + 0.01 * rng.gen_range(-1.0..1.0)).collect();
    l.sample_solution(&r0, &r1).unwrap()
}

#[test]
fn trivial_pairs_are_zero() {
    let l = curved(24, 10, 1.0, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = random_compact(&mut rng, &l);
    let a = ObservableClass::new(&l, l.kg_apply(&h).unwrap(), l.inner(l.source(), &h)).unwrap();
    let zero = ObservableClass::constant(&l, 0.0);
    assert!(class_equal(&l, &a, &zero, CLASS_TOLERANCE).unwrap().equal);
    assert!(class_equal(&l, &a, &a, CLASS_TOLERANCE).unwrap().equal);
    let one = ObservableClass::constant(&l, 1.0);
    let cmp = class_equal(&l, &one, &zero, CLASS_TOLERANCE).unwrap();
    assert!(!cmp.equal);
    assert!(cmp.diagnostic.contains("constants"));
    // wrong constant on an exact test function
    let off = ObservableClass { alpha: a.alpha + 0.5, ..a.clone() };
    assert!(!class_equal(&l, &off, &zero, CLASS_TOLERANCE).unwrap().equal);
    // non-exact test function
    let b = ObservableClass::new(&l, random_interior(&mut rng, &l), 0.0).unwrap();
    let cmp = class_equal(&l, &b, &zero, CLASS_TOLERANCE).unwrap();
    assert!(!cmp.equal && cmp.field_defect > 1e-3);
}

#[test]
fn classes_from_other_lattices_rejected() {
    let l = curved(24, 10, 1.0, 1);
    let k = flat(24, 10, 1.0, 1);
    let a = ObservableClass::constant(&k, 0.0);
    assert_eq!(class_equal(&l, &a, &a, 1e-9), Err(LatticeError::LatticeMismatch));
}

#[test]
fn sample_solution_examples() {
    let l = LatticeSpacetime::flat_sourceless(geom(20, 8, 1.0, 1)).unwrap();
    assert!(l.sample_solution(&[0.0; 8], &[0.0; 8]).unwrap().is_zero());
    // static solution for a constant source
    let (c, m) = (0.6, 1.5);
    let g = geom(20, 8, m, 2);
    let l = LatticeSpacetime::flat(g, FieldConfig::from_fn(20, 8, 2, |_, _, _| c)).unwrap();
    let stat = vec![-c / (m * m); 16];
    let phi = l.sample_solution(&stat, &stat).unwrap();
    assert!(phi.data().iter().all(|v| (v + c / (m * m)).abs() < 1e-12));
    assert!(l.solution_residual(&phi).unwrap() < 1e-12);
    // massless: constant shifts of solutions are solutions
    let l = curved(20, 8, 0.0, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let phi = solution(&l, &mut rng);
    let shifted = FieldConfig::from_fn(20, 8, 2, |n, x, c| phi[(n, x, c)] + [0.3, -1.2][c]);
    assert!(l.solution_residual(&phi).unwrap() < 1e-12);
    assert!(l.solution_residual(&shifted).unwrap() < 1e-12);
}

#[test]
fn pairing_examples() {
    let l = curved(24, 10, 0.8, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let phi = solution(&l, &mut rng);
    assert!((pairing(&l, &ObservableClass::constant(&l, 2.5), &phi).unwrap() - 2.5).abs() < 1e-14);
    // invariance under adding a trivial pair
    let a = ObservableClass::new(&l, random_interior(&mut rng, &l), 0.3).unwrap();
    let h = random_compact(&mut rng, &l);
    let b = ObservableClass::new(&l, a.test.add(&l.kg_apply(&h).unwrap()), a.alpha + l.inner(l.source(), &h)).unwrap();
    assert!(class_equal(&l, &a, &b, CLASS_TOLERANCE).unwrap().equal);
    let (pa, pb) = (pairing(&l, &a, &phi).unwrap(), pairing(&l, &b, &phi).unwrap());
    assert!(rel(pa, pb) < 1e-9, "{pa} {pb}");
    // affine in the solution along homogeneous directions
    let hom = l.e_map(&random_interior(&mut rng, &l)).unwrap();
    let lin = ObservableClass { alpha: 0.0, ..a.clone() };
    let d = pairing(&l, &lin, &phi.add(&hom)).unwrap() - pairing(&l, &lin, &phi).unwrap();
    assert!(rel(d, l.inner(&lin.test, &hom)) < 1e-9);
    // non-solutions are rejected
    let junk = random_rows(&mut rng, &l, 0, 23);
    assert!(matches!(pairing(&l, &a, &junk), Err(LatticeError::NotSolution(_))));
}

#[test]
fn time_ramp_shape() {
    let r = time_ramp(10, 2, 6);
    assert_eq!(&r[..3], &[0.0, 0.0, 0.0]);
    assert_eq!(&r[6..], &[1.0; 4]);
    assert!(r.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn representatives_move_support_and_keep_class() {
    let l = curved(40, 12, 1.0, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let a = ObservableClass::new(&l, random_rows(&mut rng, &l, 15, 24), 0.7).unwrap();
    let fut = future_representative(&l, &a, 28, 35).unwrap();
    assert!(fut.test.row_support().unwrap().0 >= 28);
    assert!(class_equal(&l, &a, &fut, CLASS_TOLERANCE).unwrap().equal);
    let past = past_representative(&l, &a, 3, 10).unwrap();
    assert!(past.test.row_support().unwrap().1 <= 10);
    assert!(class_equal(&l, &a, &past, CLASS_TOLERANCE).unwrap().equal);
    assert!(matches!(future_representative(&l, &a, 30, 38), Err(LatticeError::Geometry(_))));
    assert!(matches!(past_representative(&l, &a, 1, 5), Err(LatticeError::Geometry(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_class_has_a_representative_in_any_slab(seed in any::<u64>(), row in 2usize..36) {
        let l = curved(40, 10, 0.6, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ObservableClass::new(&l, random_interior(&mut rng, &l), rng.gen_range(-1.0..1.0)).unwrap();
        let rep = slab_representative(&l, &a, row).unwrap();
        let (lo, hi) = rep.test.row_support().unwrap_or((row, row));
        prop_assert!(lo >= row && hi <= row + 1);
        let cmp = class_equal(&l, &a, &rep, CLASS_TOLERANCE).unwrap();
        prop_assert!(cmp.equal, "{:?}", cmp);
        let phi = solution(&l, &mut rng);
        prop_assert!(rel(pairing(&l, &a, &phi).unwrap(), pairing(&l, &rep, &phi).unwrap()) < 1e-8);
    }
}

#[test]
fn field_csv_layout() {
    let f = inhomkg_lattice::FieldConfig::from_fn(2, 3, 2, |n, x, c| (100 * n + 10 * x + c) as f64);
    let csv = inhomkg_lattice::export::field_csv(&f, 0.5, 0.25);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,x,component,value");
    assert_eq!(lines.len(), 1 + 12);
    let last: Vec<f64> = lines[12].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last, vec![0.5, 0.5, 1.0, 121.0]);
}
