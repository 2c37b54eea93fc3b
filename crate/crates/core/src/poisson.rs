//! Canonical Poisson algebra over a presymplectic space: bracket,
//! evaluation on affine points, the substitution normal form for the ideal
//! generated by `1_V - 1`, the linearization isomorphism, tensor splitting
//! and shift maps.

use std::collections::BTreeMap;

use crate::error::{AlgebraError, Result};
use crate::poly::{Monomial, Polynomial};
use crate::presymplectic::{PointedPreSympSpace, PreSympSpace};
use crate::scalar::{Coeff, Real};

fn check_space<R: Real, C>(space: &PreSympSpace<R>, a: &Polynomial<C>) -> Result<()>
where
    C: Coeff<Re = R>,
{
    if a.nvars() != space.dim() {
        return Err(AlgebraError::SpaceMismatch { expected: space.dim(), found: a.nvars() });
    }
    Ok(())
}

/// `{a, b} = sum_ij sigma_ij (d_i a)(d_j b)`.
pub fn poisson_bracket<R: Real, C: Coeff<Re = R>>(
    space: &PreSympSpace<R>,
    a: &Polynomial<C>,
    b: &Polynomial<C>,
) -> Result<Polynomial<C>> {
    check_space(space, a)?;
    check_space(space, b)?;
    let n = space.dim();
    let da: Vec<Polynomial<C>> = (0..n).map(|i| a.derivative(i)).collect();
    let db: Vec<Polynomial<C>> = (0..n).map(|j| b.derivative(j)).collect();
    let mut out = Polynomial::zero(n);
    for i in 0..n {
        if da[i].is_zero() {
            continue;
        }
        for j in 0..n {
            let s = space.sigma(i, j);
            if s.is_zero() || db[j].is_zero() {
                continue;
            }
            let prod = &da[i] * &db[j];
            out.add_assign_scaled(&prod, &C::from_re(s.clone()));
        }
    }
    Ok(out)
}

/// Values of the generators at a solution-side point.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinePoint<R> {
    pub values: Vec<R>,
}

impl<R: Real> AffinePoint<R> {
    pub fn new(values: Vec<R>) -> Self {
        AffinePoint { values }
    }

    /// Checks that the point takes the value 1 on the distinguished vector.
    pub fn validate(&self, space: &PointedPreSympSpace<R>) -> Result<()> {
        if self.values.len() != space.dim() {
            return Err(AlgebraError::DimensionMismatch { expected: space.dim(), found: self.values.len() });
        }
        let v = dot(&self.values, space.point());
        if !space.base().negligible(&(v - R::one()), 1.0) {
            return Err(AlgebraError::InvalidPoint);
        }
        Ok(())
    }
}

fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    a.iter().zip(b).fold(R::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Linear functional on the generators, used for shift maps.
#[derive(Clone, Debug, PartialEq)]
pub struct LinFunctional<R> {
    pub coeffs: Vec<R>,
}

impl<R: Real> LinFunctional<R> {
    pub fn new(coeffs: Vec<R>) -> Self {
        LinFunctional { coeffs }
    }

    pub fn zero(n: usize) -> Self {
        LinFunctional { coeffs: vec![R::zero(); n] }
    }

    pub fn add(&self, other: &Self) -> Self {
        LinFunctional {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

/// Evaluate at an arbitrary point of the unpointed space.
pub fn evaluate<R: Real, C: Coeff<Re = R>>(a: &Polynomial<C>, p: &AffinePoint<R>) -> Result<C> {
    if a.nvars() != p.values.len() {
        return Err(AlgebraError::DimensionMismatch { expected: a.nvars(), found: p.values.len() });
    }
    let vals: Vec<C> = p.values.iter().cloned().map(C::from_re).collect();
    Ok(a.evaluate(&vals))
}

/// Evaluate at a point of a pointed space, rejecting points that do not
/// send the distinguished vector to 1.
pub fn evaluate_pointed<R: Real, C: Coeff<Re = R>>(
    space: &PointedPreSympSpace<R>,
    a: &Polynomial<C>,
    p: &AffinePoint<R>,
) -> Result<C> {
    check_space(space.base(), a)?;
    p.validate(space)?;
    evaluate(a, p)
}

/// The element `1_V` as a degree-one polynomial.
pub fn distinguished<R: Real, C: Coeff<Re = R>>(space: &PointedPreSympSpace<R>) -> Polynomial<C> {
    Polynomial::linear(&space.point().iter().cloned().map(C::from_re).collect::<Vec<_>>())
}

/// Image of the pivot generator under the ideal normal form:
/// `(1 - sum_{i != k} p_i e_i) / p_k`.
fn pivot_image<R: Real, C: Coeff<Re = R>>(space: &PointedPreSympSpace<R>) -> Polynomial<C> {
    let n = space.dim();
    let k = space.pivot();
    let pk = space.point()[k].clone();
    let mut img = Polynomial::constant(n, C::from_re(R::one() / pk.clone()));
    for i in space.linear_generators() {
        let pi = &space.point()[i];
        if !pi.is_zero() {
            img.add_term(Monomial::var(i), C::from_re(-(pi.clone() / pk.clone())));
        }
    }
    img
}

/// Normal form modulo the ideal generated by `1_V - 1`.
pub fn ideal_reduce<R: Real, C: Coeff<Re = R>>(
    space: &PointedPreSympSpace<R>,
    a: &Polynomial<C>,
) -> Result<Polynomial<C>> {
    check_space(space.base(), a)?;
    let n = space.dim();
    let k = space.pivot();
    if a.terms().keys().all(|m| m.count(k) == 0) {
        return Ok(a.clone());
    }
    let images: Vec<Polynomial<C>> = (0..n)
        .map(|i| if i == k { pivot_image(space) } else { Polynomial::var(n, i) })
        .collect();
    Ok(a.substitute(&images, n))
}

/// True when no monomial contains the pivot generator.
pub fn is_normal_form<R: Real, C: Coeff<Re = R>>(space: &PointedPreSympSpace<R>, a: &Polynomial<C>) -> bool {
    let k = space.pivot();
    a.terms().keys().all(|m| m.count(k) == 0)
}

/// Isomorphism onto the algebra of the linearized space determined by a
/// base point: each non-pivot generator `g` goes to `base(g) + g_bar`.
pub fn kappa_to_lin<R: Real, C: Coeff<Re = R>>(
    space: &PointedPreSympSpace<R>,
    a: &Polynomial<C>,
    base: &AffinePoint<R>,
) -> Result<Polynomial<C>> {
    check_space(space.base(), a)?;
    base.validate(space)?;
    let n = space.dim();
    let m = n - 1;
    let k = space.pivot();
    let pk = space.point()[k].clone();
    let mut images = Vec::with_capacity(n);
    for i in 0..n {
        if i == k {
            // (1 - sum_{i != k} p_i (base_i + g_bar_i)) / p_k
            let mut img = Polynomial::constant(m, C::from_re(base.values[k].clone()));
            for j in space.linear_generators() {
                let pj = &space.point()[j];
                if !pj.is_zero() {
                    img.add_term(Monomial::var(space.lin_index(j).unwrap()), C::from_re(-(pj.clone() / pk.clone())));
                }
            }
            images.push(img);
        } else {
            let mut img = Polynomial::var(m, space.lin_index(i).unwrap());
            img.add_term(Monomial::one(), C::from_re(base.values[i].clone()));
            images.push(img);
        }
    }
    Ok(a.substitute(&images, m))
}

/// Inverse of `kappa_to_lin`, landing in normal forms.
pub fn kappa_from_lin<R: Real, C: Coeff<Re = R>>(
    space: &PointedPreSympSpace<R>,
    b: &Polynomial<C>,
    base: &AffinePoint<R>,
) -> Result<Polynomial<C>> {
    base.validate(space)?;
    let n = space.dim();
    if b.nvars() != n - 1 {
        return Err(AlgebraError::SpaceMismatch { expected: n - 1, found: b.nvars() });
    }
    let images: Vec<Polynomial<C>> = space
        .linear_generators()
        .into_iter()
        .map(|i| {
            let mut img = Polynomial::var(n, i);
            img.add_term(Monomial::one(), C::from_re(-base.values[i].clone()));
            img
        })
        .collect();
    Ok(b.substitute(&images, n))
}

/// The map `g -> g + c(g) 1_V` on generators, extended multiplicatively.
pub fn shift_endomorphism<R: Real, C: Coeff<Re = R>>(
    space: &PointedPreSympSpace<R>,
    a: &Polynomial<C>,
    c: &LinFunctional<R>,
) -> Result<Polynomial<C>> {
    check_space(space.base(), a)?;
    if c.coeffs.len() != space.dim() {
        return Err(AlgebraError::DimensionMismatch { expected: space.dim(), found: c.coeffs.len() });
    }
    if !space.base().negligible(&dot(&c.coeffs, space.point()), 1.0) {
        return Err(AlgebraError::FunctionalNotNull);
    }
    let n = space.dim();
    let one_v: Polynomial<C> = distinguished(space);
    let images: Vec<Polynomial<C>> = (0..n)
        .map(|i| {
            let mut img = Polynomial::var(n, i);
            img.add_assign_scaled(&one_v, &C::from_re(c.coeffs[i].clone()));
            img
        })
        .collect();
    Ok(a.substitute(&images, n))
}

/// The map sending every generator to its negative.
pub fn sign_flip<C: Coeff>(a: &Polynomial<C>) -> Polynomial<C> {
    Polynomial::from_terms(
        a.nvars(),
        a.terms().iter().map(|(m, c)| {
            if m.degree() % 2 == 1 {
                (m.clone(), -c.clone())
            } else {
                (m.clone(), c.clone())
            }
        }),
    )
}

/// Whether `a` vanishes at every listed point; a sampling cross-check of
/// membership in the vanishing ideal.
pub fn vanishes_on_points<R: Real, C: Coeff<Re = R>>(
    space: &PointedPreSympSpace<R>,
    a: &Polynomial<C>,
    points: &[AffinePoint<R>],
) -> Result<bool> {
    let scale = a.terms().values().map(crate::scalar::coeff_abs).fold(1.0, f64::max);
    for p in points {
        let v = evaluate_pointed(space, a, p)?;
        let zero = if R::EXACT {
            v.is_zero()
        } else {
            crate::scalar::coeff_abs(&v) <= space.base().mode().tolerance() * scale
        };
        if !zero {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Element of `S(V) ⊗ S(W)` stored as pairs of monomials.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorPoly<C> {
    pub left_nvars: usize,
    pub right_nvars: usize,
    terms: BTreeMap<(Monomial, Monomial), C>,
}

impl<C: Coeff> TensorPoly<C> {
    pub fn zero(left_nvars: usize, right_nvars: usize) -> Self {
        TensorPoly { left_nvars, right_nvars, terms: BTreeMap::new() }
    }

    pub fn terms(&self) -> &BTreeMap<(Monomial, Monomial), C> {
        &self.terms
    }

    pub fn add_term(&mut self, l: Monomial, r: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        let key = (l, r);
        match self.terms.remove(&key) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(key, s);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    /// `a ⊗ b` for polynomials on each side.
    pub fn pure(a: &Polynomial<C>, b: &Polynomial<C>) -> Self {
        let mut t = Self::zero(a.nvars(), b.nvars());
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                t.add_term(ma.clone(), mb.clone(), ca.clone() * cb.clone());
            }
        }
        t
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((l, r), c) in &other.terms {
            out.add_term(l.clone(), r.clone(), c.clone());
        }
        out
    }

    /// Bilinear product built from products on each factor:
    /// `(a ⊗ b)(a' ⊗ b') = left(a, a') ⊗ right(b, b')`.
    pub fn product_with(
        &self,
        other: &Self,
        left: impl Fn(&Polynomial<C>, &Polynomial<C>) -> Polynomial<C>,
        right: impl Fn(&Polynomial<C>, &Polynomial<C>) -> Polynomial<C>,
    ) -> Self {
        let mut out = Self::zero(self.left_nvars, self.right_nvars);
        for ((l1, r1), c1) in &self.terms {
            for ((l2, r2), c2) in &other.terms {
                let a = left(
                    &Polynomial::monomial(self.left_nvars, l1.clone(), C::one()),
                    &Polynomial::monomial(self.left_nvars, l2.clone(), C::one()),
                );
                let b = right(
                    &Polynomial::monomial(self.right_nvars, r1.clone(), C::one()),
                    &Polynomial::monomial(self.right_nvars, r2.clone(), C::one()),
                );
                let c = c1.clone() * c2.clone();
                for (ma, ca) in a.terms() {
                    for (mb, cb) in b.terms() {
                        out.add_term(ma.clone(), mb.clone(), c.clone() * ca.clone() * cb.clone());
                    }
                }
            }
        }
        out
    }

    /// Commutative product.
    pub fn mul(&self, other: &Self) -> Self {
        self.product_with(other, |a, b| a * b, |a, b| a * b)
    }

    /// Bracket of the tensor product of Poisson algebras:
    /// `{a⊗b, a'⊗b'} = {a,a'} ⊗ bb' + aa' ⊗ {b,b'}`.
    pub fn bracket<R: Real>(&self, other: &Self, v: &PreSympSpace<R>, w: &PreSympSpace<R>) -> Result<Self>
    where
        C: Coeff<Re = R>,
    {
        let mut out = Self::zero(self.left_nvars, self.right_nvars);
        for ((l1, r1), c1) in &self.terms {
            for ((l2, r2), c2) in &other.terms {
                let c = c1.clone() * c2.clone();
                let a1 = Polynomial::monomial(self.left_nvars, l1.clone(), C::one());
                let a2 = Polynomial::monomial(self.left_nvars, l2.clone(), C::one());
                let b1 = Polynomial::monomial(self.right_nvars, r1.clone(), C::one());
                let b2 = Polynomial::monomial(self.right_nvars, r2.clone(), C::one());
                let t1 = Self::pure(&poisson_bracket(v, &a1, &a2)?, &(&b1 * &b2));
                let t2 = Self::pure(&(&a1 * &a2), &poisson_bracket(w, &b1, &b2)?);
                for ((l, r), x) in t1.add(&t2).terms {
                    out.add_term(l, r, x * c.clone());
                }
            }
        }
        Ok(out)
    }

    /// Apply maps to each factor independently.
    pub fn map_factors(
        &self,
        left: impl Fn(&Polynomial<C>) -> Polynomial<C>,
        right: impl Fn(&Polynomial<C>) -> Polynomial<C>,
    ) -> Self {
        let mut out: Option<Self> = None;
        for ((l, r), c) in &self.terms {
            let a = left(&Polynomial::monomial(self.left_nvars, l.clone(), c.clone()));
            let b = right(&Polynomial::monomial(self.right_nvars, r.clone(), C::one()));
            let t = Self::pure(&a, &b);
            out = Some(match out {
                None => t,
                Some(acc) => acc.add(&t),
            });
        }
        out.unwrap_or_else(|| {
            let probe_l = left(&Polynomial::zero(self.left_nvars)).nvars();
            let probe_r = right(&Polynomial::zero(self.right_nvars)).nvars();
            Self::zero(probe_l, probe_r)
        })
    }
}

/// Split a polynomial on `V ⊕ W` into `S(V) ⊗ S(W)`.
pub fn tensor_factorize<R: Real, C: Coeff<Re = R>>(
    space: &PreSympSpace<R>,
    a: &Polynomial<C>,
) -> Result<TensorPoly<C>> {
    check_space(space, a)?;
    let n = space.split().ok_or(AlgebraError::NotDirectSum)?;
    let mut out = TensorPoly::zero(n, space.dim() - n);
    for (m, c) in a.terms() {
        let (l, r): (Vec<usize>, Vec<usize>) = m.indices().iter().partition(|&&i| i < n);
        out.add_term(Monomial::new(l), Monomial::new(r.into_iter().map(|i| i - n).collect()), c.clone());
    }
    Ok(out)
}

/// Inverse of `tensor_factorize`.
pub fn tensor_unfactorize<R: Real, C: Coeff<Re = R>>(
    space: &PreSympSpace<R>,
    t: &TensorPoly<C>,
) -> Result<Polynomial<C>> {
    let n = space.split().ok_or(AlgebraError::NotDirectSum)?;
    if t.left_nvars != n || t.left_nvars + t.right_nvars != space.dim() {
        return Err(AlgebraError::SpaceMismatch { expected: space.dim(), found: t.left_nvars + t.right_nvars });
    }
    let mut out = Polynomial::zero(space.dim());
    for ((l, r), c) in t.terms() {
        let idx: Vec<usize> = l.indices().iter().copied().chain(r.indices().iter().map(|i| i + n)).collect();
        out.add_term(Monomial::new(idx), c.clone());
    }
    Ok(out)
}

/// Splitting of a pointed multiplet space into the first `q` components and
/// the rest. Each side keeps a copy of the point; the identification map
/// sends `x ⊗ 1 -> x` and `1 ⊗ y -> y`.
#[derive(Clone, Debug)]
pub struct CompositionIso<R> {
    pub whole: PointedPreSympSpace<R>,
    pub left: PointedPreSympSpace<R>,
    pub right: PointedPreSympSpace<R>,
    /// Generator of `left` to generator of `whole` (point to point).
    pub left_map: Vec<usize>,
    pub right_map: Vec<usize>,
}

impl<R: Real> CompositionIso<R> {
    /// `component[i]` is the multiplet component of generator `i`, `None`
    /// for the point. The point must be a basis vector and the form must not
    /// couple generators in different halves.
    pub fn split(whole: &PointedPreSympSpace<R>, component: &[Option<usize>], q: usize) -> Result<Self> {
        let n = whole.dim();
        if component.len() != n {
            return Err(AlgebraError::DimensionMismatch { expected: n, found: component.len() });
        }
        if !whole.point_is_basis_vector() {
            return Err(AlgebraError::Structure("composition split needs a basis-vector point".into()));
        }
        let k = whole.pivot();
        if component[k].is_some() || component.iter().filter(|c| c.is_none()).count() != 1 {
            return Err(AlgebraError::Structure("exactly the point must carry no component".into()));
        }
        let mut left_map = vec![k];
        let mut right_map = vec![k];
        for (i, c) in component.iter().enumerate() {
            match c {
                Some(c) if *c < q => left_map.push(i),
                Some(_) => right_map.push(i),
                None => {}
            }
        }
        for &i in &left_map[1..] {
            for &j in &right_map[1..] {
                if !whole.base().sigma(i, j).is_zero() {
                    return Err(AlgebraError::Structure(format!("form couples generators {i} and {j}")));
                }
            }
        }
        let left_base = whole.base().restrict(&left_map);
        let right_base = whole.base().restrict(&right_map);
        let mut lp = vec![R::zero(); left_map.len()];
        lp[0] = R::one();
        let mut rp = vec![R::zero(); right_map.len()];
        rp[0] = R::one();
        Ok(CompositionIso {
            whole: whole.clone(),
            left: PointedPreSympSpace::new(left_base, lp)?,
            right: PointedPreSympSpace::new(right_base, rp)?,
            left_map,
            right_map,
        })
    }

    /// Direct sum of the two halves, on which `tensor_factorize` applies.
    pub fn sum_space(&self) -> Result<PreSympSpace<R>> {
        self.left.base().direct_sum(self.right.base())
    }

    /// `x ⊗ y -> x y` with generators relabelled into the whole space.
    pub fn eta<C: Coeff<Re = R>>(&self, t: &TensorPoly<C>) -> Polynomial<C> {
        let n = self.whole.dim();
        let mut out = Polynomial::zero(n);
        for ((l, r), c) in t.terms() {
            let idx: Vec<usize> = l
                .indices()
                .iter()
                .map(|&i| self.left_map[i])
                .chain(r.indices().iter().map(|&i| self.right_map[i]))
                .collect();
            out.add_term(Monomial::new(idx), c.clone());
        }
        out
    }

    /// Inverse of `eta` on normal forms: generators go to the side they
    /// belong to, the point goes to the left copy.
    pub fn eta_inv<C: Coeff<Re = R>>(&self, a: &Polynomial<C>) -> TensorPoly<C> {
        let mut side = vec![(0usize, 0usize); self.whole.dim()];
        for (j, &i) in self.right_map.iter().enumerate() {
            side[i] = (1, j);
        }
        for (j, &i) in self.left_map.iter().enumerate() {
            side[i] = (0, j);
        }
        let mut out = TensorPoly::zero(self.left_map.len(), self.right_map.len());
        for (m, c) in a.terms() {
            let mut l = Vec::new();
            let mut r = Vec::new();
            for &i in m.indices() {
                let (s, j) = side[i];
                if s == 0 {
                    l.push(j);
                } else {
                    r.push(j);
                }
            }
            out.add_term(Monomial::new(l), Monomial::new(r), c.clone());
        }
        out
    }

    /// Normal form of a tensor element modulo both point ideals.
    pub fn reduce_tensor<C: Coeff<Re = R>>(&self, t: &TensorPoly<C>) -> TensorPoly<C> {
        let mut out = TensorPoly::zero(t.left_nvars, t.right_nvars);
        for ((l, r), c) in t.terms() {
            let l2: Vec<usize> = l.indices().iter().copied().filter(|&i| i != 0).collect();
            let r2: Vec<usize> = r.indices().iter().copied().filter(|&i| i != 0).collect();
            out.add_term(Monomial::new(l2), Monomial::new(r2), c.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presymplectic::sample_v3;
    use crate::scalar::{q, Q};

    fn e(i: usize) -> Polynomial<Q> {
        Polynomial::var(3, i)
    }

    #[test]
    fn bracket_examples() {
        let v = sample_v3();
        let s = v.base();
        assert_eq!(poisson_bracket(s, &e(1), &e(2)).unwrap(), Polynomial::one(3));
        assert!(poisson_bracket(s, &e(0), &(&e(1) * &e(2))).unwrap().is_zero());
        let b = poisson_bracket(s, &e(1).pow(2), &e(2).pow(2)).unwrap();
        assert_eq!(b, (&e(1) * &e(2)).scale(&q(4, 1)));
    }

    #[test]
    fn reduce_and_kappa() {
        let v = sample_v3();
        assert_eq!(ideal_reduce(&v, &e(0)).unwrap(), Polynomial::one(3));
        let x = &e(0).pow(2) - &e(0);
        assert!(ideal_reduce(&v, &x).unwrap().is_zero());
        let base = AffinePoint::new(vec![q(1, 1), q(3, 1), q(-2, 1)]);
        let k = kappa_to_lin(&v, &e(1), &base).unwrap();
        let mut expected = Polynomial::<Q>::var(2, 0);
        expected.add_term(Monomial::one(), q(3, 1));
        assert_eq!(k, expected);
        assert_eq!(kappa_to_lin(&v, &e(0), &base).unwrap(), Polynomial::one(2));
    }

    #[test]
    fn invalid_point_rejected() {
        let v = sample_v3();
        let bad = AffinePoint::new(vec![q(2, 1), q(0, 1), q(0, 1)]);
        assert_eq!(evaluate_pointed(&v, &e(1), &bad).unwrap_err(), AlgebraError::InvalidPoint);
    }

    #[test]
    fn shift_rejects_non_null_functional() {
        let v = sample_v3();
        let c = LinFunctional::new(vec![q(1, 1), q(0, 1), q(0, 1)]);
        assert_eq!(shift_endomorphism(&v, &e(1), &c).unwrap_err(), AlgebraError::FunctionalNotNull);
    }
}
