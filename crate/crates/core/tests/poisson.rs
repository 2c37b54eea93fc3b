use inhomkg_core::poisson::{
    evaluate, evaluate_pointed, ideal_reduce, is_normal_form, kappa_from_lin, kappa_to_lin, poisson_bracket,
    shift_endomorphism, tensor_factorize, tensor_unfactorize, vanishes_on_points, AffinePoint, CompositionIso,
    LinFunctional, TensorPoly,
};
use inhomkg_core::poly::{Monomial, Polynomial};
use inhomkg_core::presymplectic::{sample_v3, PointedPreSympSpace, PreSympSpace};
use inhomkg_core::sample::{random_monomial, random_multiplet_space, random_pointed_space, random_poly, small_rational};
use inhomkg_core::{q, AlgebraError, Q};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn e(i: usize) -> Polynomial<Q> {
    Polynomial::var(3, i)
}

fn random_point(rng: &mut ChaCha8Rng, space: &PointedPreSympSpace<Q>) -> AffinePoint<Q> {
    let n = space.dim();
    let k = space.pivot();
    let mut v: Vec<Q> = (0..n).map(|_| small_rational(rng)).collect();
    let rest = (0..n).filter(|&i| i != k).fold(q(0, 1), |acc, i| acc + space.point()[i].clone() * v[i].clone());
    v[k] = (q(1, 1) - rest) / space.point()[k].clone();
    AffinePoint::new(v)
}

/// `d/dt a(p + t e_i)` at 0 from forward differences on integer nodes,
/// exact for polynomials of degree at most `deg`.
fn directional_derivative(a: &Polynomial<Q>, p: &[Q], i: usize, deg: usize) -> Q {
    let f = |t: i64| {
        let mut x = p.to_vec();
        x[i] += q(t, 1);
        a.evaluate(&x)
    };
    let vals: Vec<Q> = (0..=deg as i64).map(f).collect();
    let mut diffs = vals;
    let mut acc = q(0, 1);
    for k in 1..=deg {
        diffs = diffs.windows(2).map(|w| w[1].clone() - w[0].clone()).collect();
        let term = diffs[0].clone() / q(k as i64, 1);
        if k % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

#[allow(clippy::needless_range_loop)]
fn bracket_oracle(space: &PreSympSpace<Q>, a: &Polynomial<Q>, b: &Polynomial<Q>, p: &[Q]) -> Q {
    let n = space.dim();
    let (da, db) = (a.degree().max(1), b.degree().max(1));
    let ga: Vec<Q> = (0..n).map(|i| directional_derivative(a, p, i, da)).collect();
    let gb: Vec<Q> = (0..n).map(|i| directional_derivative(b, p, i, db)).collect();
    let mut acc = q(0, 1);
    for i in 0..n {
        for j in 0..n {
            acc += space.sigma(i, j).clone() * ga[i].clone() * gb[j].clone();
        }
    }
    acc
}

#[test]
fn bracket_of_squares_matches_oracle() {
    let v = sample_v3();
    let a = e(1).pow(2);
    let b = e(2).pow(2);
    let br = poisson_bracket(v.base(), &a, &b).unwrap();
    assert_eq!(br, (&e(1) * &e(2)).scale(&q(4, 1)));
    let p = [q(1, 1), q(3, 2), q(-2, 1)];
    assert_eq!(br.evaluate(&p), bracket_oracle(v.base(), &a, &b, &p));
}

#[test]
fn evaluation_examples() {
    let v = sample_v3();
    let (a, b) = (q(5, 3), q(-2, 1));
    let p = AffinePoint::new(vec![q(1, 1), a.clone(), b.clone()]);
    let x = &(&e(1) * &e(2)) + &e(0).scale(&q(3, 1));
    assert_eq!(evaluate_pointed(&v, &x, &p).unwrap(), a * b + q(3, 1));
    assert_eq!(evaluate_pointed(&v, &Polynomial::<Q>::one(3), &p).unwrap(), q(1, 1));
    let c = &e(0) - &Polynomial::one(3);
    assert_eq!(evaluate_pointed(&v, &c, &p).unwrap(), q(0, 1));
}

#[test]
fn reduction_examples() {
    let v = sample_v3();
    assert_eq!(ideal_reduce(&v, &e(0)).unwrap(), Polynomial::one(3));
    assert_eq!(ideal_reduce(&v, &(&e(0) * &e(1))).unwrap(), e(1));
    let x = &e(0).pow(2) - &e(0);
    assert!(ideal_reduce(&v, &x).unwrap().is_zero());
    // membership by division: e0^2 - e0 = e0 (e0 - 1)
    let g = &e(0) - &Polynomial::one(3);
    assert_eq!(&e(0) * &g, x);
}

#[test]
fn kappa_examples() {
    let v = sample_v3();
    let base = AffinePoint::new(vec![q(1, 1), q(7, 2), q(0, 1)]);
    let mut expected = Polynomial::<Q>::var(2, 0);
    expected.add_term(Monomial::one(), q(7, 2));
    assert_eq!(kappa_to_lin(&v, &e(1), &base).unwrap(), expected);
    assert_eq!(kappa_to_lin(&v, &e(0), &base).unwrap(), Polynomial::one(2));
    let bad = AffinePoint::new(vec![q(0, 1), q(0, 1), q(0, 1)]);
    assert_eq!(kappa_to_lin(&v, &e(1), &bad).unwrap_err(), AlgebraError::InvalidPoint);
}

#[test]
fn kappa_round_trip_on_random_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let dim = rng.gen_range(2..=6);
        let general = rng.gen_bool(0.5);
        let v = random_pointed_space(&mut rng, dim, general);
        let base = random_point(&mut rng, &v);
        let x = random_poly(&mut rng, dim, 4, 5);
        let k = kappa_to_lin(&v, &x, &base).unwrap();
        let back = kappa_from_lin(&v, &k, &base).unwrap();
        assert_eq!(back, ideal_reduce(&v, &x).unwrap());
        assert_eq!(kappa_to_lin(&v, &back, &base).unwrap(), k);
    }
}

#[test]
fn tensor_factorize_examples() {
    let v = sample_v3();
    let w = PreSympSpace::from_entries(3, &[(1, 2, q(1, 1))]).unwrap();
    let s = v.base().direct_sum(&w).unwrap();
    let g = Polynomial::<Q>::var(6, 1);
    let t = tensor_factorize(&s, &g).unwrap();
    assert_eq!(t, TensorPoly::pure(&e(1), &Polynomial::one(3)));
    let one = tensor_factorize(&s, &Polynomial::<Q>::one(6)).unwrap();
    assert_eq!(one, TensorPoly::pure(&Polynomial::one(3), &Polynomial::one(3)));
    let f2 = tensor_factorize(&s, &Polynomial::<Q>::var(6, 5)).unwrap();
    assert!(t.bracket(&f2, v.base(), &w).unwrap().terms().is_empty());
    assert_eq!(tensor_factorize(v.base(), &e(1)).unwrap_err(), AlgebraError::NotDirectSum);
}

#[test]
fn shift_examples() {
    let v = sample_v3();
    let lam = q(5, 2);
    let c = LinFunctional::new(vec![q(0, 1), lam.clone(), q(0, 1)]);
    let s = shift_endomorphism(&v, &e(1), &c).unwrap();
    assert_eq!(s, &e(1) + &e(0).scale(&lam));
    let x = &(&e(1) * &e(2)) + &e(0);
    assert_eq!(shift_endomorphism(&v, &x, &LinFunctional::zero(3)).unwrap(), x);
    let g = &e(0) - &Polynomial::one(3);
    let sg = shift_endomorphism(&v, &g, &c).unwrap();
    assert!(ideal_reduce(&v, &sg).unwrap().is_zero());
}

#[test]
fn composition_identification_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (whole, comp) = random_multiplet_space(&mut rng, 3, 2);
    let iso = CompositionIso::split(&whole, &comp, 1).unwrap();
    let sum = iso.sum_space().unwrap();
    for _ in 0..100 {
        let x = random_poly(&mut rng, sum.dim(), 3, 4);
        let t = tensor_factorize(&sum, &x).unwrap();
        let img = ideal_reduce(&whole, &iso.eta(&t)).unwrap();
        let back = iso.reduce_tensor(&iso.eta_inv(&img));
        assert_eq!(back, iso.reduce_tensor(&t));
        assert_eq!(tensor_unfactorize(&sum, &t).unwrap(), x);
        // products and brackets are carried over
        let y = random_poly(&mut rng, sum.dim(), 2, 3);
        let ty = tensor_factorize(&sum, &y).unwrap();
        assert_eq!(iso.eta(&t.mul(&ty)), &iso.eta(&t) * &iso.eta(&ty));
        let br = t.bracket(&ty, iso.left.base(), iso.right.base()).unwrap();
        assert_eq!(iso.eta(&br), poisson_bracket(whole.base(), &iso.eta(&t), &iso.eta(&ty)).unwrap());
    }
}

fn seeds() -> impl Strategy<Value = u64> {
    any::<u64>()
}

fn mono_poly(n: usize, m: Monomial) -> Polynomial<Q> {
    Polynomial::monomial(n, m, q(1, 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_and_leibniz_on_monomials(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = rng.gen_range(1..=6);
        let general = rng.gen_bool(0.5);
        let v = random_pointed_space(&mut rng, dim, general);
        let s = v.base();
        let a = mono_poly(dim, random_monomial(&mut rng, dim, 3));
        let b = mono_poly(dim, random_monomial(&mut rng, dim, 3));
        let c = mono_poly(dim, random_monomial(&mut rng, dim, 3));
        let br = |x: &Polynomial<Q>, y: &Polynomial<Q>| poisson_bracket(s, x, y).unwrap();
        let jac = &(&br(&a, &br(&b, &c)) + &br(&b, &br(&c, &a))) + &br(&c, &br(&a, &b));
        prop_assert!(jac.is_zero());
        let leib = &br(&a, &(&b * &c)) - &(&(&br(&a, &b) * &c) + &(&b * &br(&a, &c)));
        prop_assert!(leib.is_zero());
        prop_assert!((&br(&a, &b) + &br(&b, &a)).is_zero());
        let deg = br(&a, &b).degree();
        prop_assert!(br(&a, &b).is_zero() || deg + 2 <= a.degree() + b.degree());
    }

    #[test]
    fn evaluated_bracket_matches_derivative_oracle(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = rng.gen_range(1..=5);
        let v = random_pointed_space(&mut rng, dim, false);
        let a = mono_poly(dim, random_monomial(&mut rng, dim, 3));
        let b = mono_poly(dim, random_monomial(&mut rng, dim, 3));
        let p: Vec<Q> = (0..dim).map(|_| small_rational(&mut rng)).collect();
        let br = poisson_bracket(v.base(), &a, &b).unwrap();
        prop_assert_eq!(br.evaluate(&p), bracket_oracle(v.base(), &a, &b, &p));
    }

    #[test]
    fn reduction_respects_valid_points(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = rng.gen_range(1..=6);
        let v = random_pointed_space(&mut rng, dim, true);
        let x = random_poly(&mut rng, dim, 4, 5);
        let r = ideal_reduce(&v, &x).unwrap();
        prop_assert!(is_normal_form(&v, &r));
        prop_assert_eq!(ideal_reduce(&v, &r).unwrap(), r.clone());
        let pts: Vec<AffinePoint<Q>> = (0..5).map(|_| random_point(&mut rng, &v)).collect();
        for p in &pts {
            prop_assert_eq!(evaluate(&r, p).unwrap(), evaluate(&x, p).unwrap());
        }
        prop_assert!(vanishes_on_points(&v, &(&x - &r), &pts).unwrap());
        let y = random_poly(&mut rng, dim, 3, 3);
        let prod = ideal_reduce(&v, &(&x * &y)).unwrap();
        let prod2 = ideal_reduce(&v, &(&r * &ideal_reduce(&v, &y).unwrap())).unwrap();
        prop_assert_eq!(prod, prod2);
    }

    #[test]
    fn kappa_intertwines_brackets(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = rng.gen_range(2..=6);
        let v = random_pointed_space(&mut rng, dim, true);
        let lin = v.linearized();
        let base = random_point(&mut rng, &v);
        let x = ideal_reduce(&v, &random_poly(&mut rng, dim, 3, 4)).unwrap();
        let y = ideal_reduce(&v, &random_poly(&mut rng, dim, 3, 4)).unwrap();
        let k = |a: &Polynomial<Q>| kappa_to_lin(&v, a, &base).unwrap();
        let lhs = k(&ideal_reduce(&v, &poisson_bracket(v.base(), &x, &y).unwrap()).unwrap());
        prop_assert_eq!(lhs, poisson_bracket(&lin, &k(&x), &k(&y)).unwrap());
        prop_assert_eq!(k(&(&x * &y)), &k(&x) * &k(&y));
        prop_assert_eq!(k(&Polynomial::one(dim)), Polynomial::one(dim - 1));
    }

    #[test]
    fn tensor_factorization_is_an_isomorphism(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d1, d2) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let v = random_pointed_space(&mut rng, d1, false);
        let w = random_pointed_space(&mut rng, d2, false);
        let s = v.base().direct_sum(w.base()).unwrap();
        let x = random_poly(&mut rng, d1 + d2, 3, 4);
        let y = random_poly(&mut rng, d1 + d2, 3, 4);
        let tx = tensor_factorize(&s, &x).unwrap();
        let ty = tensor_factorize(&s, &y).unwrap();
        prop_assert_eq!(tensor_unfactorize(&s, &tx).unwrap(), x.clone());
        prop_assert_eq!(tensor_factorize(&s, &(&x * &y)).unwrap(), tx.mul(&ty));
        let br = tensor_factorize(&s, &poisson_bracket(&s, &x, &y).unwrap()).unwrap();
        prop_assert_eq!(br, tx.bracket(&ty, v.base(), w.base()).unwrap());
    }

    #[test]
    fn shifts_compose_and_preserve_structure(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = rng.gen_range(2..=6);
        let v = random_pointed_space(&mut rng, dim, true);
        let mk = |rng: &mut ChaCha8Rng| {
            let mut c: Vec<Q> = (0..dim).map(|_| small_rational(rng)).collect();
            let k = v.pivot();
            let rest = (0..dim).filter(|&i| i != k).fold(q(0, 1), |acc, i| acc + v.point()[i].clone() * c[i].clone());
            c[k] = -rest / v.point()[k].clone();
            LinFunctional::new(c)
        };
        let c1 = mk(&mut rng);
        let c2 = mk(&mut rng);
        let x = random_poly(&mut rng, dim, 3, 4);
        let y = random_poly(&mut rng, dim, 3, 4);
        let sh = |a: &Polynomial<Q>, c: &LinFunctional<Q>| shift_endomorphism(&v, a, c).unwrap();
        prop_assert_eq!(sh(&sh(&x, &c2), &c1), sh(&x, &c1.add(&c2)));
        prop_assert_eq!(sh(&(&x * &y), &c1), &sh(&x, &c1) * &sh(&y, &c1));
        let br = poisson_bracket(v.base(), &x, &y).unwrap();
        prop_assert_eq!(sh(&br, &c1), poisson_bracket(v.base(), &sh(&x, &c1), &sh(&y, &c1)).unwrap());
        let g = &inhomkg_core::poisson::distinguished::<Q, Q>(&v) - &Polynomial::one(dim);
        prop_assert!(ideal_reduce(&v, &sh(&g, &c1)).unwrap().is_zero());
    }
}
