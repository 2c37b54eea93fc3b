//! Seeded random generation of exact test data.

use num_traits::Zero;
use rand::Rng;

use crate::ccr::QuasiFreeState;
use crate::fedosov::{BundleElement, FedosovContext};
use crate::poly::{Monomial, Polynomial};
use crate::presymplectic::{PointedPreSympSpace, PreSympSpace};
use crate::scalar::{q, Real, CQ, Q};

/// Small nonzero-biased rational.
pub fn small_rational<G: Rng>(rng: &mut G) -> Q {
    let n = rng.gen_range(-5..=5);
    let d = rng.gen_range(1..=3);
    q(n, d)
}

fn nonzero_rational<G: Rng>(rng: &mut G) -> Q {
    loop {
        let x = small_rational(rng);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Random sparse antisymmetric form on `dim` generators.
pub fn random_form<G: Rng>(rng: &mut G, dim: usize) -> Vec<Vec<Q>> {
    let mut f = vec![vec![q(0, 1); dim]; dim];
    for i in 0..dim {
        for j in (i + 1)..dim {
            if rng.gen_bool(0.6) {
                let v = small_rational(rng);
                f[i][j] = v.clone();
                f[j][i] = -v;
            }
        }
    }
    f
}

fn inverse(m: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = m.len();
    let mut aug: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { q(1, 1) } else { q(0, 1) }));
            r
        })
        .collect();
    let piv = crate::linalg::rref(&mut aug, 2 * n, &q(0, 1));
    assert_eq!(piv.len(), n, "matrix is invertible");
    aug.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Random pointed space of the given dimension (at least 1). With
/// `general_point`, the point is moved off the basis by a unimodular change
/// of coordinates.
pub fn random_pointed_space<G: Rng>(rng: &mut G, dim: usize, general_point: bool) -> PointedPreSympSpace<Q> {
    assert!(dim >= 1);
    let inner = random_form(rng, dim - 1);
    let mut f = vec![vec![q(0, 1); dim]; dim];
    for i in 1..dim {
        for j in 1..dim {
            f[i][j] = inner[i - 1][j - 1].clone();
        }
    }
    let mut point = vec![q(0, 1); dim];
    point[0] = q(1, 1);
    if general_point && dim > 1 {
        // T = unit lower triangular with small integer entries; new form
        // T^t F T, new point T^{-1} e0
        let mut t = vec![vec![q(0, 1); dim]; dim];
        for i in 0..dim {
            t[i][i] = q(1, 1);
            for j in 0..i {
                t[i][j] = q(rng.gen_range(-2..=2), 1);
            }
        }
        let mut g = vec![vec![q(0, 1); dim]; dim];
        for a in 0..dim {
            for b in 0..dim {
                let mut acc = q(0, 1);
                for i in 0..dim {
                    for j in 0..dim {
                        if !t[i][a].is_zero() && !t[j][b].is_zero() && !f[i][j].is_zero() {
                            acc += t[i][a].clone() * f[i][j].clone() * t[j][b].clone();
                        }
                    }
                }
                g[a][b] = acc;
            }
        }
        let ti = inverse(&t);
        point = (0..dim).map(|i| ti[i][0].clone()).collect();
        f = g;
    }
    let labels = (0..dim).map(|i| format!("e{i}")).collect();
    let base = PreSympSpace::with_default_mode(labels, f).expect("antisymmetric");
    PointedPreSympSpace::new(base, point).expect("point is null")
}

pub fn random_monomial<G: Rng>(rng: &mut G, nvars: usize, max_degree: usize) -> Monomial {
    let d = rng.gen_range(0..=max_degree);
    Monomial::new((0..d).map(|_| rng.gen_range(0..nvars)).collect())
}

/// Random rational polynomial with up to `max_terms` terms.
pub fn random_poly<G: Rng>(rng: &mut G, nvars: usize, max_degree: usize, max_terms: usize) -> Polynomial<Q> {
    let k = rng.gen_range(1..=max_terms);
    let mut p = Polynomial::zero(nvars);
    for _ in 0..k {
        p.add_term(random_monomial(rng, nvars, max_degree), nonzero_rational(rng));
    }
    p
}

/// Random complex rational polynomial.
pub fn random_cpoly<G: Rng>(rng: &mut G, nvars: usize, max_degree: usize, max_terms: usize) -> Polynomial<CQ> {
    let k = rng.gen_range(1..=max_terms);
    let mut p = Polynomial::zero(nvars);
    for _ in 0..k {
        let im = if rng.gen_bool(0.4) { small_rational(rng) } else { q(0, 1) };
        p.add_term(random_monomial(rng, nvars, max_degree), CQ::new(nonzero_rational(rng), im));
    }
    p
}

/// Random admissible quasi-free state: covariance `P^t (λ + B^t B) P` on the
/// quotient with `λ` at least half the row-sum norm of the form.
pub fn random_state<G: Rng>(rng: &mut G, space: &PointedPreSympSpace<Q>) -> QuasiFreeState<Q> {
    let n = space.dim();
    let lin = space.linearized();
    let m = lin.dim();
    let row_sum = (0..m)
        .map(|i| (0..m).fold(q(0, 1), |acc, j| acc + lin.sigma(i, j).abs_val()))
        .fold(q(0, 1), |a, b| if b > a { b } else { a });
    let lambda = row_sum / q(2, 1) + q(rng.gen_range(0..=2), 2);
    let b: Vec<Vec<Q>> = (0..m).map(|_| (0..m).map(|_| q(rng.gen_range(-2..=2), 2)).collect()).collect();
    let mut wbar = vec![vec![q(0, 1); m]; m];
    for i in 0..m {
        for j in 0..m {
            let mut acc = if i == j { lambda.clone() } else { q(0, 1) };
            for row in &b {
                acc += row[i].clone() * row[j].clone();
            }
            wbar[i][j] = acc;
        }
    }
    // P e_i for each generator
    let proj: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut e = vec![q(0, 1); n];
            e[i] = q(1, 1);
            space.project(&e)
        })
        .collect();
    let mut w = vec![vec![q(0, 1); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = q(0, 1);
            for a in 0..m {
                if proj[i][a].is_zero() {
                    continue;
                }
                for c in 0..m {
                    acc += proj[i][a].clone() * wbar[a][c].clone() * proj[j][c].clone();
                }
            }
            w[i][j] = acc;
        }
    }
    let k = space.pivot();
    let mut mean: Vec<Q> = (0..n).map(|_| small_rational(rng)).collect();
    let rest = (0..n)
        .filter(|&i| i != k)
        .fold(q(0, 1), |acc, i| acc + space.point()[i].clone() * mean[i].clone());
    mean[k] = (q(1, 1) - rest) / space.point()[k].clone();
    QuasiFreeState::new(space, mean, w).expect("constructed state is admissible")
}

/// Random normal-form polynomial (no pivot generator).
pub fn random_normal_form<G: Rng>(
    rng: &mut G,
    space: &PointedPreSympSpace<Q>,
    max_degree: usize,
    max_terms: usize,
) -> Polynomial<CQ> {
    let gens = space.linear_generators();
    let n = space.dim();
    if gens.is_empty() {
        return Polynomial::constant(n, CQ::new(nonzero_rational(rng), q(0, 1)));
    }
    let k = rng.gen_range(1..=max_terms);
    let mut p = Polynomial::zero(n);
    for _ in 0..k {
        let d = rng.gen_range(0..=max_degree);
        let m = Monomial::new((0..d).map(|_| gens[rng.gen_range(0..gens.len())]).collect());
        p.add_term(m, CQ::new(nonzero_rational(rng), q(0, 1)));
    }
    p
}

/// Random bundle element with bounded degrees in each slot.
pub fn random_bundle<G: Rng>(
    rng: &mut G,
    ctx: &FedosovContext<Q>,
    max_degree: usize,
    max_terms: usize,
) -> BundleElement<CQ> {
    let gens = ctx.space().linear_generators();
    let m = ctx.lin_dim();
    let mut w = ctx.zero();
    if m == 0 {
        return w;
    }
    let k = rng.gen_range(1..=max_terms);
    for _ in 0..k {
        let da = rng.gen_range(0..=max_degree);
        let a = Monomial::new((0..da).map(|_| gens[rng.gen_range(0..gens.len())]).collect());
        let db = rng.gen_range(0..=max_degree);
        let b = Monomial::new((0..db).map(|_| rng.gen_range(0..m)).collect());
        let df = rng.gen_range(0..=m.min(3));
        let mut form: Vec<usize> = Vec::new();
        while form.len() < df {
            let i = rng.gen_range(0..m);
            if !form.contains(&i) {
                form.push(i);
            }
        }
        let c = CQ::new(nonzero_rational(rng), small_rational(rng));
        w.push(a, b, &form, c).expect("distinct form indices");
    }
    w
}

/// Pointed space with generator 0 as the point and `per` generators for each
/// of `p` multiplet components, coupled only within a component. Returns the
/// component of each generator (`None` for the point).
pub fn random_multiplet_space<G: Rng>(
    rng: &mut G,
    p: usize,
    per: usize,
) -> (PointedPreSympSpace<Q>, Vec<Option<usize>>) {
    let n = 1 + p * per;
    let mut entries = Vec::new();
    let mut comp = vec![None];
    for c in 0..p {
        for a in 0..per {
            comp.push(Some(c));
            for b in (a + 1)..per {
                let x = nonzero_rational(rng);
                entries.push((1 + c * per + a, 1 + c * per + b, x));
            }
        }
    }
    let base = PreSympSpace::from_entries(n, &entries).expect("valid");
    let mut point = vec![q(0, 1); n];
    point[0] = q(1, 1);
    (PointedPreSympSpace::new(base, point).expect("point is null"), comp)
}
