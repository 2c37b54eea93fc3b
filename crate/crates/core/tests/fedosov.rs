use inhomkg_core::ccr::{involution, star_product};
use inhomkg_core::fedosov::{BundleElement, FedosovContext, TensorField};
use inhomkg_core::json::{bundle_from_json, bundle_to_json};
use inhomkg_core::poisson::ideal_reduce;
use inhomkg_core::poly::Polynomial;
use inhomkg_core::presymplectic::{sample_v3, PointedPreSympSpace};
use inhomkg_core::sample::{random_bundle, random_cpoly, random_pointed_space};
use inhomkg_core::{q, Coeff, CQ, Q};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn space(rng: &mut ChaCha8Rng, max_dim: usize) -> PointedPreSympSpace<Q> {
    let dim = rng.gen_range(1..=max_dim);
    let general = rng.gen_bool(0.5);
    random_pointed_space(rng, dim, general)
}

/// Projection onto fibre degree 0 and form degree 0.
fn tau(w: &BundleElement<CQ>) -> BundleElement<CQ> {
    w.component(0, 0)
}

fn int_scale(w: &BundleElement<CQ>, k: i64) -> BundleElement<CQ> {
    w.scale(&CQ::from_re(q(k, 1)))
}

/// `δ δ* + δ* δ` multiplies each homogeneous piece by its total degree.
fn degree_weighted(w: &BundleElement<CQ>, max: usize) -> BundleElement<CQ> {
    let mut out = w.scale(&CQ::from_re(q(0, 1)));
    for n in 0..=max {
        for m in 0..=max {
            out = out.add(&int_scale(&w.component(n, m), (n + m) as i64));
        }
    }
    out
}

#[test]
fn flat_section_of_square_on_sample_space() {
    let v = sample_v3();
    let ctx = FedosovContext::new(&v);
    let g = Polynomial::<CQ>::var(3, 1).pow(2);
    let flat = ctx.flat_section(&g).unwrap();
    assert!(ctx.fedosov_d(&flat).is_zero());
    assert_eq!(flat.sigma_proj(), g);
    // a^2 + 2a y + y^2 in the fibre
    assert_eq!(flat.terms().len(), 3);
}

#[test]
fn three_products_agree_on_sample_space() {
    let v = sample_v3();
    let ctx = FedosovContext::new(&v);
    let e = |i| Polynomial::<CQ>::var(3, i);
    for (a, b) in [(e(1), e(2)), (e(1).pow(2), e(2).pow(2)), (e(0), e(1)), (&e(1) * &e(2), e(2).pow(3))] {
        let direct = ideal_reduce(&v, &star_product(v.base(), &a, &b).unwrap()).unwrap();
        assert_eq!(ctx.star_fedosov(&a, &b).unwrap(), direct);
        assert_eq!(ctx.star_connection(&a, &b).unwrap(), direct);
    }
}

fn seeds() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn koszul_identities(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = space(&mut rng, 5);
        let ctx = FedosovContext::new(&v);
        let w = random_bundle(&mut rng, &ctx, 3, 5);
        prop_assert!(w.delta().delta().is_zero());
        prop_assert!(w.delta_star().delta_star().is_zero());
        let homotopy = w.delta().delta_inv().add(&w.delta_inv().delta()).add(&tau(&w));
        prop_assert_eq!(homotopy, w.clone());
        let weighted = w.delta().delta_star().add(&w.delta_star().delta());
        prop_assert_eq!(weighted, degree_weighted(&w, 8));
    }

    #[test]
    fn connection_identities(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = space(&mut rng, 5);
        let ctx = FedosovContext::new(&v);
        let w = random_bundle(&mut rng, &ctx, 3, 5);
        prop_assert!(ctx.nabla_w(&ctx.nabla_w(&w)).is_zero());
        prop_assert!(ctx.nabla_w(&w.delta()).add(&ctx.nabla_w(&w).delta()).is_zero());
        prop_assert!(ctx.fedosov_d(&ctx.fedosov_d(&w)).is_zero());
    }

    #[test]
    fn flat_sections_are_flat_and_project_back(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = space(&mut rng, 5);
        let ctx = FedosovContext::new(&v);
        let a = random_cpoly(&mut rng, v.dim(), 3, 4);
        let flat = ctx.flat_section(&a).unwrap();
        prop_assert!(ctx.fedosov_d(&flat).is_zero());
        prop_assert_eq!(flat.sigma_proj(), ideal_reduce(&v, &a).unwrap());
    }

    #[test]
    fn three_products_agree(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = space(&mut rng, 5);
        let ctx = FedosovContext::new(&v);
        let n = v.dim();
        let a = random_cpoly(&mut rng, n, 3, 3);
        let b = random_cpoly(&mut rng, n, 3, 3);
        let direct = ideal_reduce(&v, &star_product(v.base(), &a, &b).unwrap()).unwrap();
        let fed = ctx.star_fedosov(&a, &b).unwrap();
        prop_assert_eq!(&fed, &direct);
        prop_assert_eq!(ctx.star_connection(&a, &b).unwrap(), direct);
        // hermiticity of the bundle product
        let flipped = ctx.star_fedosov(&involution(&b), &involution(&a)).unwrap();
        prop_assert_eq!(involution(&fed), flipped);
    }

    #[test]
    fn torsion_curvature_and_poisson_compatibility(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = space(&mut rng, 5);
        prop_assume!(v.dim() >= 2);
        let ctx = FedosovContext::new(&v);
        let n = v.dim();
        let m = ctx.lin_dim();
        let a = ideal_reduce(&v, &random_cpoly(&mut rng, n, 4, 4)).unwrap();
        let hess = ctx.nabla_tensor(&ctx.nabla_tensor(&TensorField::function(&a)));
        prop_assert_eq!(hess.transpose(0, 1), hess);
        let f = ideal_reduce(&v, &random_cpoly(&mut rng, n, 3, 3)).unwrap();
        let g = ideal_reduce(&v, &random_cpoly(&mut rng, n, 3, 3)).unwrap();
        let alpha = TensorField::one_form(&f, rng.gen_range(0..m));
        let beta = TensorField::one_form(&g, rng.gen_range(0..m));
        let second = ctx.nabla_tensor(&ctx.nabla_tensor(&alpha));
        prop_assert_eq!(second.transpose(1, 2), second);
        let pair = TensorField::function(&ctx.poisson_power(&alpha, &beta));
        let lhs = ctx.nabla_tensor(&pair);
        let rhs = ctx
            .contract_slot(&ctx.nabla_tensor(&alpha), 0, &beta, false)
            .plus(&ctx.contract_slot(&ctx.nabla_tensor(&beta), 0, &alpha, true), true);
        prop_assert!(lhs.plus(&rhs, false).is_zero());
    }

    #[test]
    fn bundle_json_round_trip(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = space(&mut rng, 5);
        let ctx = FedosovContext::new(&v);
        let w = random_bundle(&mut rng, &ctx, 3, 6);
        let back: BundleElement<CQ> = bundle_from_json(&bundle_to_json(&w), ctx.dim(), ctx.lin_dim()).unwrap();
        prop_assert_eq!(back, w);
    }
}

#[test]
fn repeated_form_index_rejected() {
    let v = sample_v3();
    let ctx = FedosovContext::new(&v);
    let mut w: BundleElement<CQ> = ctx.zero();
    let one = inhomkg_core::poly::Monomial::one();
    assert!(w.push(one.clone(), one, &[0, 0], CQ::from_re(q(1, 1))).is_err());
}
