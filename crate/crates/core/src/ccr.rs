//! Polynomial CCR algebra: the Moyal-type star product on symmetric
//! polynomials, involution, quantum ideal normal form, quasi-free states
//! and the linearization isomorphism.

use std::collections::BTreeMap;

use crate::error::{AlgebraError, Result};
use crate::poisson::{self, AffinePoint};
use crate::poly::{Monomial, Polynomial};
use crate::presymplectic::{PointedPreSympSpace, PreSympSpace};
use crate::scalar::{Coeff, ComplexCoeff, Real};

fn check<R: Real, C: Coeff<Re = R>>(space: &PreSympSpace<R>, a: &Polynomial<C>) -> Result<()> {
    if a.nvars() != space.dim() {
        return Err(AlgebraError::SpaceMismatch { expected: space.dim(), found: a.nvars() });
    }
    Ok(())
}

fn int_coeff<C: Coeff>(k: usize) -> C {
    (0..k).fold(C::zero(), |acc, _| acc + C::one())
}

/// Complexify a real polynomial.
pub fn complexify<R, C>(a: &Polynomial<R>) -> Polynomial<C>
where
    R: Real + Coeff<Re = R>,
    C: ComplexCoeff<Re = R>,
{
    a.map_coeffs(|c| C::from_re(c.clone()))
}

/// `a ⋆ b = sum_r (i/2)^r / r! sum sigma_{i1 j1}..sigma_{ir jr}
/// (d_{i1..ir} a)(d_{j1..jr} b)`, computed by repeated contraction of a
/// bilinear tableau of monomial pairs.
pub fn star_product<R: Real, C: ComplexCoeff<Re = R>>(
    space: &PreSympSpace<R>,
    a: &Polynomial<C>,
    b: &Polynomial<C>,
) -> Result<Polynomial<C>> {
    check(space, a)?;
    check(space, b)?;
    let n = space.dim();
    let half_i = C::i().div_re(&R::from_int(2));

    let mut tableau: BTreeMap<(Monomial, Monomial), C> = BTreeMap::new();
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            accumulate(&mut tableau, (ma.clone(), mb.clone()), ca.clone() * cb.clone());
        }
    }
    let mut out = Polynomial::zero(n);
    let mut weight = C::one();
    let mut r = 0usize;
    while !tableau.is_empty() {
        for ((ma, mb), c) in &tableau {
            out.add_term(ma.mul(mb), c.clone() * weight.clone());
        }
        r += 1;
        weight = weight * half_i.clone();
        weight = weight.div_re(&R::from_int(r as i64));
        let mut next = BTreeMap::new();
        for ((ma, mb), c) in &tableau {
            let pb = mb.powers();
            for (i, ki) in ma.powers() {
                for &(j, kj) in &pb {
                    let s = space.sigma(i, j);
                    if s.is_zero() {
                        continue;
                    }
                    let key = (ma.remove_one(i).unwrap(), mb.remove_one(j).unwrap());
                    let f = C::from_re(s.clone()) * int_coeff::<C>(ki * kj);
                    accumulate(&mut next, key, c.clone() * f);
                }
            }
        }
        tableau = next;
    }
    Ok(out)
}

fn accumulate<K: Ord, C: Coeff>(map: &mut BTreeMap<K, C>, key: K, c: C) {
    if c.is_zero() {
        return;
    }
    match map.remove(&key) {
        Some(old) => {
            let s = old + c;
            if !s.is_zero() {
                map.insert(key, s);
            }
        }
        None => {
            map.insert(key, c);
        }
    }
}

/// `a ⋆ b - b ⋆ a`.
pub fn commutator<R: Real, C: ComplexCoeff<Re = R>>(
    space: &PreSympSpace<R>,
    a: &Polynomial<C>,
    b: &Polynomial<C>,
) -> Result<Polynomial<C>> {
    Ok(&star_product(space, a, b)? - &star_product(space, b, a)?)
}

/// Star product of several factors, left to right.
pub fn star_word<R: Real, C: ComplexCoeff<Re = R>>(
    space: &PreSympSpace<R>,
    factors: &[Polynomial<C>],
) -> Result<Polynomial<C>> {
    let mut acc = Polynomial::one(space.dim());
    for f in factors {
        acc = star_product(space, &acc, f)?;
    }
    Ok(acc)
}

/// The involution: generators are self-adjoint and symmetric monomials are
/// fixed, so only coefficients are conjugated.
pub fn involution<C: Coeff>(a: &Polynomial<C>) -> Polynomial<C> {
    a.conj()
}

/// Normal form modulo the two-sided star ideal generated by `1_V - 1`.
/// `1_V` is central, so the substitution normal form of the commutative
/// case applies unchanged.
pub fn quantum_ideal_reduce<R: Real, C: ComplexCoeff<Re = R>>(
    space: &PointedPreSympSpace<R>,
    a: &Polynomial<C>,
) -> Result<Polynomial<C>> {
    poisson::ideal_reduce(space, a)
}

/// Quotient through the pointed CCR functor: change to a basis in which the
/// point is a basis vector, set that generator to 1, and change back.
pub fn pointed_ccr_reduce<R: Real, C: ComplexCoeff<Re = R>>(
    space: &PointedPreSympSpace<R>,
    a: &Polynomial<C>,
) -> Result<Polynomial<C>> {
    check(space.base(), a)?;
    let n = space.dim();
    let k = space.pivot();
    let p = space.point();
    let pk = p[k].clone();
    // old generator e_k in the adapted basis f (f_k = 1_V, f_i = e_i otherwise)
    let to_adapted: Vec<Polynomial<C>> = (0..n)
        .map(|i| {
            if i != k {
                return Polynomial::var(n, i);
            }
            let mut img = Polynomial::zero(n);
            img.add_term(Monomial::var(k), C::from_re(R::one() / pk.clone()));
            for j in space.linear_generators() {
                if !p[j].is_zero() {
                    img.add_term(Monomial::var(j), C::from_re(-(p[j].clone() / pk.clone())));
                }
            }
            img
        })
        .collect();
    let adapted = a.substitute(&to_adapted, n);
    // in the adapted basis the ideal is generated by f_k - 1
    let unit_images: Vec<Polynomial<C>> = (0..n)
        .map(|i| if i == k { Polynomial::one(n) } else { Polynomial::var(n, i) })
        .collect();
    let reduced = adapted.substitute(&unit_images, n);
    // f_i = e_i for i != k, and f_k no longer occurs
    Ok(reduced)
}

/// Gaussian state determined by a mean on all generators and a covariance
/// matrix annihilating the point.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiFreeState<R> {
    pub mean: Vec<R>,
    pub covariance: Vec<Vec<R>>,
}

impl<R: Real> QuasiFreeState<R> {
    /// Validates symmetry, the point constraints and positivity of the
    /// two-point matrix `W + (i/2) sigma`.
    pub fn new(space: &PointedPreSympSpace<R>, mean: Vec<R>, covariance: Vec<Vec<R>>) -> Result<Self> {
        let n = space.dim();
        if mean.len() != n || covariance.len() != n || covariance.iter().any(|r| r.len() != n) {
            return Err(AlgebraError::DimensionMismatch { expected: n, found: mean.len() });
        }
        let base = space.base();
        let scale = covariance
            .iter()
            .flatten()
            .map(|x| x.to_f64().abs())
            .fold(1.0, f64::max);
        for i in 0..n {
            for j in 0..n {
                if !base.negligible(&(covariance[i][j].clone() - covariance[j][i].clone()), scale) {
                    return Err(AlgebraError::InvalidState(format!("covariance not symmetric at ({i}, {j})")));
                }
            }
        }
        AffinePoint::new(mean.clone())
            .validate(space)
            .map_err(|_| AlgebraError::InvalidState("mean does not send the point to 1".into()))?;
        for (i, row) in covariance.iter().enumerate() {
            let v = row
                .iter()
                .zip(space.point())
                .fold(R::zero(), |acc, (w, p)| acc + w.clone() * p.clone());
            if !base.negligible(&v, scale) {
                return Err(AlgebraError::InvalidState(format!("covariance row {i} does not annihilate the point")));
            }
        }
        for i in 0..n {
            for j in 0..n {
                // |sigma_ij| <= 2 sqrt(W_ii W_jj)
                let s = base.sigma(i, j).clone();
                let lhs = s.clone() * s;
                let rhs = R::from_int(4) * covariance[i][i].clone() * covariance[j][j].clone();
                if lhs.to_f64() > rhs.to_f64() * (1.0 + 1e-12) + 1e-15 && lhs > rhs {
                    return Err(AlgebraError::InvalidState(format!("uncertainty bound violated at ({i}, {j})")));
                }
            }
        }
        if !hermitian_psd(base, &covariance) {
            return Err(AlgebraError::InvalidState("two-point matrix is not positive".into()));
        }
        Ok(QuasiFreeState { mean, covariance })
    }
}

/// Positivity of `W + (i/2) sigma` via the real symmetric embedding
/// `[[W, -S], [S, W]]` with `S = sigma / 2`.
fn hermitian_psd<R: Real>(space: &PreSympSpace<R>, w: &[Vec<R>]) -> bool {
    let n = w.len();
    let m = nalgebra::DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let (ri, ci) = (r % n, c % n);
        let wv = w[ri][ci].to_f64();
        let sv = space.sigma(ri, ci).to_f64() / 2.0;
        match (r < n, c < n) {
            (true, true) | (false, false) => wv,
            (true, false) => -sv,
            (false, true) => sv,
        }
    });
    let scale = m.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let eig = m.symmetric_eigen();
    eig.eigenvalues.iter().all(|&l| l >= -1e-10 * scale)
}

/// Centered Gaussian moment of the listed generators (classical pairing
/// with the symmetric covariance).
fn gaussian_moment<R: Real>(idx: &[usize], w: &[Vec<R>]) -> R {
    if idx.is_empty() {
        return R::one();
    }
    if idx.len() % 2 == 1 {
        return R::zero();
    }
    let first = idx[0];
    let mut acc = R::zero();
    for k in 1..idx.len() {
        let c = w[first][idx[k]].clone();
        if c.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx[1..]
            .iter()
            .enumerate()
            .filter(|&(j, _)| j + 1 != k)
            .map(|(_, &v)| v)
            .collect();
        acc = acc + c * gaussian_moment(&rest, w);
    }
    acc
}

/// Expectation of a symmetric (Weyl-ordered) polynomial: shift by the mean,
/// then pair with the symmetric covariance.
pub fn state_evaluate<R: Real, C: ComplexCoeff<Re = R>>(
    space: &PointedPreSympSpace<R>,
    state: &QuasiFreeState<R>,
    a: &Polynomial<C>,
) -> Result<C> {
    check(space.base(), a)?;
    let n = space.dim();
    let shifted: Vec<Polynomial<C>> = (0..n)
        .map(|i| {
            let mut g = Polynomial::var(n, i);
            g.add_term(Monomial::one(), C::from_re(state.mean[i].clone()));
            g
        })
        .collect();
    let centered = a.substitute(&shifted, n);
    let mut acc = C::zero();
    for (m, c) in centered.terms() {
        let v = gaussian_moment(m.indices(), &state.covariance);
        if !v.is_zero() {
            acc = acc + c.clone() * C::from_re(v);
        }
    }
    Ok(acc)
}

/// Expectation of an ordered star word `g_{w0} ⋆ g_{w1} ⋆ ...` by ordered
/// Wick pairing with `W + (i/2) sigma`.
pub fn word_expectation<R: Real, C: ComplexCoeff<Re = R>>(
    space: &PointedPreSympSpace<R>,
    state: &QuasiFreeState<R>,
    word: &[usize],
) -> C {
    let half_i = C::i().div_re(&R::from_int(2));
    let two_point = |a: usize, b: usize| -> C {
        C::from_re(state.covariance[a][b].clone()) + half_i.clone() * C::from_re(space.base().sigma(a, b).clone())
    };
    // expand each factor into mean + centered part
    let len = word.len();
    let mut total = C::zero();
    for mask in 0u64..(1u64 << len) {
        let mut coeff = C::one();
        let mut centered = Vec::new();
        for (pos, &g) in word.iter().enumerate() {
            if mask & (1 << pos) != 0 {
                centered.push(g);
            } else {
                coeff = coeff * C::from_re(state.mean[g].clone());
            }
        }
        if coeff.is_zero() {
            continue;
        }
        total = total + coeff * ordered_pairing(&centered, &two_point);
    }
    total
}

fn ordered_pairing<C: Coeff>(idx: &[usize], two_point: &dyn Fn(usize, usize) -> C) -> C {
    if idx.is_empty() {
        return C::one();
    }
    if idx.len() % 2 == 1 {
        return C::zero();
    }
    let mut acc = C::zero();
    for k in 1..idx.len() {
        let rest: Vec<usize> = idx[1..]
            .iter()
            .enumerate()
            .filter(|&(j, _)| j + 1 != k)
            .map(|(_, &v)| v)
            .collect();
        acc = acc + two_point(idx[0], idx[k]) * ordered_pairing(&rest, two_point);
    }
    acc
}

/// Linearization of the quotient algebra using the state's mean.
pub fn kappa_q<R: Real, C: ComplexCoeff<Re = R>>(
    space: &PointedPreSympSpace<R>,
    a: &Polynomial<C>,
    state: &QuasiFreeState<R>,
) -> Result<Polynomial<C>> {
    poisson::kappa_to_lin(space, a, &AffinePoint::new(state.mean.clone()))
}

pub fn kappa_q_inv<R: Real, C: ComplexCoeff<Re = R>>(
    space: &PointedPreSympSpace<R>,
    b: &Polynomial<C>,
    state: &QuasiFreeState<R>,
) -> Result<Polynomial<C>> {
    poisson::kappa_from_lin(space, b, &AffinePoint::new(state.mean.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presymplectic::sample_v3;
    use crate::scalar::{q, CQ, Q};

    fn e(i: usize) -> Polynomial<CQ> {
        Polynomial::var(3, i)
    }

    fn c(re: i64, im: i64, d: i64) -> CQ {
        CQ::new(q(re, d), q(im, d))
    }

    #[test]
    fn star_examples() {
        let v = sample_v3();
        let s = v.base();
        let mut expected = &e(1) * &e(2);
        expected.add_term(Monomial::one(), c(0, 1, 2));
        assert_eq!(star_product(s, &e(1), &e(2)).unwrap(), expected);
        assert_eq!(star_product(s, &e(1), &e(1)).unwrap(), e(1).pow(2));
        let mut exp2 = &e(1).pow(2) * &e(2).pow(2);
        exp2.add_term(Monomial::new(vec![1, 2]), c(0, 2, 1));
        exp2.add_term(Monomial::one(), c(-1, 0, 2));
        assert_eq!(star_product(s, &e(1).pow(2), &e(2).pow(2)).unwrap(), exp2);
    }

    #[test]
    fn commutator_examples() {
        let v = sample_v3();
        let s = v.base();
        assert_eq!(commutator(s, &e(1), &e(2)).unwrap(), Polynomial::constant(3, c(0, 1, 1)));
        assert_eq!(commutator(s, &e(1).pow(2), &e(2)).unwrap(), e(1).scale(&c(0, 2, 1)));
    }

    #[test]
    fn admissible_state_on_point() {
        let v = sample_v3();
        let w = vec![
            vec![q(0, 1), q(0, 1), q(0, 1)],
            vec![q(0, 1), q(1, 1), q(0, 1)],
            vec![q(0, 1), q(0, 1), q(1, 1)],
        ];
        let st = QuasiFreeState::new(&v, vec![q(1, 1), q(2, 1), q(0, 1)], w).unwrap();
        let one: CQ = state_evaluate(&v, &st, &e(0)).unwrap();
        assert_eq!(one, c(1, 0, 1));
        let e00 = star_product(v.base(), &e(0), &e(0)).unwrap();
        assert_eq!(state_evaluate(&v, &st, &e00).unwrap(), c(1, 0, 1));
        let e11 = star_product(v.base(), &e(1), &e(1)).unwrap();
        assert_eq!(state_evaluate(&v, &st, &e11).unwrap(), c(5, 0, 1));
    }

    #[test]
    fn state_below_uncertainty_bound_rejected() {
        let v = sample_v3();
        let w = vec![
            vec![q(0, 1), q(0, 1), q(0, 1)],
            vec![q(0, 1), q(1, 10), q(0, 1)],
            vec![q(0, 1), q(0, 1), q(1, 10)],
        ];
        let r = QuasiFreeState::<Q>::new(&v, vec![q(1, 1), q(0, 1), q(0, 1)], w);
        assert!(matches!(r, Err(AlgebraError::InvalidState(_))));
    }
}
