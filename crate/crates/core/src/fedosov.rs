//! Fedosov construction for the canonical Poisson algebra of a pointed
//! space.
//!
//! The bundle `W ⊗ Ω` is modelled by finite sums of terms `a ⊗ b ⊗ λ`: `a` a
//! normal-form polynomial on the pointed space, `b` a polynomial in the
//! linearized generators (multiplied with the fibre star product) and `λ` a
//! wedge of linearized one-forms, stored as a strictly increasing index list.

use std::collections::BTreeMap;

use crate::ccr::star_product;
use crate::error::{AlgebraError, Result};
use crate::poisson::ideal_reduce;
use crate::poly::{Monomial, Polynomial};
use crate::presymplectic::{PointedPreSympSpace, PreSympSpace};
use crate::scalar::{Coeff, ComplexCoeff, Real};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BundleKey {
    pub a: Monomial,
    pub b: Monomial,
    pub form: Vec<usize>,
}

impl BundleKey {
    pub fn b_degree(&self) -> usize {
        self.b.degree()
    }

    pub fn form_degree(&self) -> usize {
        self.form.len()
    }
}

/// Sort a list of one-form indices, returning the permutation sign, or
/// `None` if an index repeats.
pub fn wedge_normalize(idx: &[usize]) -> Option<(bool, Vec<usize>)> {
    let mut v = idx.to_vec();
    let mut negative = false;
    // insertion sort, counting transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            negative = !negative;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((negative, v))
}

/// `dx_i ∧ λ`.
fn wedge_front(i: usize, form: &[usize]) -> Option<(bool, Vec<usize>)> {
    if form.contains(&i) {
        return None;
    }
    let pos = form.iter().filter(|&&j| j < i).count();
    let mut v = form.to_vec();
    v.insert(pos, i);
    Some((pos % 2 == 1, v))
}

/// Pointed space together with its linearization.
#[derive(Clone, Debug)]
pub struct FedosovContext<R> {
    space: PointedPreSympSpace<R>,
    lin: PreSympSpace<R>,
    /// Generators of the pointed space used as coordinates on `A`, paired
    /// with their linearized index.
    coords: Vec<(usize, usize)>,
}

impl<R: Real> FedosovContext<R> {
    pub fn new(space: &PointedPreSympSpace<R>) -> Self {
        let coords = space
            .linear_generators()
            .into_iter()
            .map(|g| (g, space.lin_index(g).unwrap()))
            .collect();
        FedosovContext { space: space.clone(), lin: space.linearized(), coords }
    }

    pub fn space(&self) -> &PointedPreSympSpace<R> {
        &self.space
    }

    /// Poisson tensor on the linearized generators.
    pub fn lin(&self) -> &PreSympSpace<R> {
        &self.lin
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn lin_dim(&self) -> usize {
        self.lin.dim()
    }

    /// Pairs `(generator, linearized index)` of the coordinate generators.
    pub fn coords(&self) -> &[(usize, usize)] {
        &self.coords
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BundleElement<C> {
    dim: usize,
    lin_dim: usize,
    terms: BTreeMap<BundleKey, C>,
}

impl<C: Coeff> BundleElement<C> {
    pub fn zero(dim: usize, lin_dim: usize) -> Self {
        BundleElement { dim, lin_dim, terms: BTreeMap::new() }
    }

    pub fn terms(&self) -> &BTreeMap<BundleKey, C> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim, self.lin_dim)
    }

    /// Add `c · a ⊗ b ⊗ λ` where `λ` may be unsorted; repeated one-form
    /// indices are rejected.
    pub fn push(&mut self, a: Monomial, b: Monomial, form: &[usize], c: C) -> Result<()> {
        let (neg, form) = wedge_normalize(form)
            .ok_or_else(|| AlgebraError::Structure(format!("repeated one-form index in {form:?}")))?;
        self.add_key(BundleKey { a, b, form }, if neg { -c } else { c });
        Ok(())
    }

    fn add_key(&mut self, key: BundleKey, c: C) {
        if c.is_zero() {
            return;
        }
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

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_key(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_key(k.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero(self.dim, self.lin_dim);
        for (k, c) in &self.terms {
            out.add_key(k.clone(), c.clone() * s.clone());
        }
        out
    }

    /// `δ(a ⊗ b ⊗ λ) = sum_i a ⊗ ∂b/∂y_i ⊗ (dy_i ∧ λ)`.
    pub fn delta(&self) -> Self {
        let mut out = Self::zero(self.dim, self.lin_dim);
        for (k, c) in &self.terms {
            for (i, mult) in k.b.powers() {
                let Some((neg, form)) = wedge_front(i, &k.form) else { continue };
                let b = k.b.remove_one(i).unwrap();
                let v = c.clone() * int::<C>(mult);
                out.add_key(BundleKey { a: k.a.clone(), b, form }, if neg { -v } else { v });
            }
        }
        out
    }

    /// `δ*(a ⊗ b ⊗ λ) = sum_j (-1)^j a ⊗ b y_{λ_j} ⊗ (λ without λ_j)`.
    pub fn delta_star(&self) -> Self {
        let mut out = Self::zero(self.dim, self.lin_dim);
        for (k, c) in &self.terms {
            for (j, &idx) in k.form.iter().enumerate() {
                let mut form = k.form.clone();
                form.remove(j);
                let b = k.b.mul(&Monomial::var(idx));
                let v = if j % 2 == 1 { -c.clone() } else { c.clone() };
                out.add_key(BundleKey { a: k.a.clone(), b, form }, v);
            }
        }
        out
    }

    /// `δ⁻¹ = δ*/(n+m)` on terms of fibre degree `n` and form degree `m`,
    /// zero when `n + m = 0`.
    pub fn delta_inv(&self) -> Self {
        let mut out = Self::zero(self.dim, self.lin_dim);
        for (k, c) in &self.terms {
            let w = k.b_degree() + k.form_degree();
            if w == 0 || k.form.is_empty() {
                continue;
            }
            let single = BundleElement {
                dim: self.dim,
                lin_dim: self.lin_dim,
                terms: std::iter::once((k.clone(), c.clone())).collect(),
            };
            for (k2, c2) in single.delta_star().terms {
                out.add_key(k2, c2 * inv_int::<C>(w));
            }
        }
        out
    }

    /// Projection onto fibre degree 0 and form degree 0, as a polynomial on
    /// the pointed space.
    pub fn sigma_proj(&self) -> Polynomial<C> {
        Polynomial::from_terms(
            self.dim,
            self.terms
                .iter()
                .filter(|(k, _)| k.b.is_one() && k.form.is_empty())
                .map(|(k, c)| (k.a.clone(), c.clone())),
        )
    }

    /// Terms of the given fibre and form degree.
    pub fn component(&self, b_degree: usize, form_degree: usize) -> Self {
        let mut out = Self::zero(self.dim, self.lin_dim);
        for (k, c) in &self.terms {
            if k.b_degree() == b_degree && k.form_degree() == form_degree {
                out.add_key(k.clone(), c.clone());
            }
        }
        out
    }
}

fn int<C: Coeff>(k: usize) -> C {
    C::from_re(<C::Re as Real>::from_int(k as i64))
}

fn inv_int<C: Coeff>(k: usize) -> C {
    C::from_re(<C::Re as Real>::ratio(1, k as i64))
}

impl<R: Real> FedosovContext<R> {
    pub fn zero<C: Coeff<Re = R>>(&self) -> BundleElement<C> {
        BundleElement::zero(self.dim(), self.lin_dim())
    }

    /// `a ⊗ 1 ⊗ 1` with `a` brought to normal form.
    pub fn lift<C: Coeff<Re = R>>(&self, a: &Polynomial<C>) -> Result<BundleElement<C>> {
        let a = ideal_reduce(&self.space, a)?;
        let mut out = self.zero();
        for (m, c) in a.terms() {
            out.add_key(BundleKey { a: m.clone(), b: Monomial::one(), form: Vec::new() }, c.clone());
        }
        Ok(out)
    }

    /// `∇_W(a ⊗ b ⊗ λ) = sum_i ∂_i a ⊗ b ⊗ (dy_i ∧ λ)`, where `i` runs over
    /// the coordinate generators of `A`.
    pub fn nabla_w<C: Coeff<Re = R>>(&self, w: &BundleElement<C>) -> BundleElement<C> {
        let mut out = self.zero();
        for (k, c) in w.terms() {
            for &(g, li) in &self.coords {
                let mult = k.a.count(g);
                if mult == 0 {
                    continue;
                }
                let Some((neg, form)) = wedge_front(li, &k.form) else { continue };
                let a = k.a.remove_one(g).unwrap();
                let v = c.clone() * int::<C>(mult);
                out.add_key(BundleKey { a, b: k.b.clone(), form }, if neg { -v } else { v });
            }
        }
        out
    }

    /// `D = -δ + ∇_W`.
    pub fn fedosov_d<C: Coeff<Re = R>>(&self, w: &BundleElement<C>) -> BundleElement<C> {
        self.nabla_w(w).sub(&w.delta())
    }

    /// Unique `w` with `σ(w) = a` and `D w = 0`, by iterating
    /// `w = a + δ⁻¹ ∇_W w`.
    pub fn flat_section<C: Coeff<Re = R>>(&self, a: &Polynomial<C>) -> Result<BundleElement<C>> {
        let seed = self.lift(a)?;
        let cap = a.degree() + 2;
        let mut w = seed.clone();
        for _ in 0..cap {
            let next = seed.add(&self.nabla_w(&w).delta_inv());
            if next == w {
                return Ok(w);
            }
            w = next;
        }
        Err(AlgebraError::Structure("flat section iteration did not settle".into()))
    }

    /// Fibrewise product: `(a ⊗ b ⊗ λ)(a' ⊗ b' ⊗ λ') = aa' ⊗ (b ⋆ b') ⊗ (λ ∧ λ')`.
    pub fn fibre_product<C: ComplexCoeff<Re = R>>(
        &self,
        x: &BundleElement<C>,
        y: &BundleElement<C>,
    ) -> Result<BundleElement<C>> {
        let m = self.lin_dim();
        let mut cache: BTreeMap<(Monomial, Monomial), Polynomial<C>> = BTreeMap::new();
        let mut out = self.zero();
        for (k1, c1) in x.terms() {
            for (k2, c2) in y.terms() {
                let mut joined = k1.form.clone();
                joined.extend_from_slice(&k2.form);
                let Some((neg, form)) = wedge_normalize(&joined) else { continue };
                let key = (k1.b.clone(), k2.b.clone());
                if !cache.contains_key(&key) {
                    let p = star_product(
                        &self.lin,
                        &Polynomial::monomial(m, k1.b.clone(), C::one()),
                        &Polynomial::monomial(m, k2.b.clone(), C::one()),
                    )?;
                    cache.insert(key.clone(), p);
                }
                let a = k1.a.mul(&k2.a);
                let mut c = c1.clone() * c2.clone();
                if neg {
                    c = -c;
                }
                for (b, cb) in cache[&key].terms() {
                    out.add_key(BundleKey { a: a.clone(), b: b.clone(), form: form.clone() }, c.clone() * cb.clone());
                }
            }
        }
        Ok(out)
    }

    /// `σ(flat(a) · flat(b))`.
    pub fn star_fedosov<C: ComplexCoeff<Re = R>>(
        &self,
        a: &Polynomial<C>,
        b: &Polynomial<C>,
    ) -> Result<Polynomial<C>> {
        let fa = self.flat_section(a)?;
        let fb = self.flat_section(b)?;
        Ok(self.fibre_product(&fa, &fb)?.sigma_proj())
    }

    /// `sum_n (i/2)^n / n! Π^n(∇^n a, ∇^n b)` with `∇^n` built by iterating
    /// the tensor connection.
    pub fn star_connection<C: ComplexCoeff<Re = R>>(
        &self,
        a: &Polynomial<C>,
        b: &Polynomial<C>,
    ) -> Result<Polynomial<C>> {
        let mut ta = TensorField::function(&ideal_reduce(&self.space, a)?);
        let mut tb = TensorField::function(&ideal_reduce(&self.space, b)?);
        let half_i = C::i().div_re(&R::from_int(2));
        let mut weight = C::one();
        let mut out = Polynomial::zero(self.dim());
        let mut n = 0usize;
        while !ta.is_zero() && !tb.is_zero() {
            let term = self.poisson_power(&ta, &tb);
            out.add_assign_scaled(&term, &weight);
            n += 1;
            weight = (weight * half_i.clone()).div_re(&R::from_int(n as i64));
            ta = self.nabla_tensor(&ta);
            tb = self.nabla_tensor(&tb);
        }
        Ok(out)
    }

    /// Covariant derivative of a one-form basis element `dy_j`, as a
    /// two-tensor with the derivative slot last. The connection is the
    /// canonical one, for which the coordinate functions have vanishing
    /// second derivatives.
    fn nabla_basis_form<C: Coeff<Re = R>>(&self, j: usize) -> TensorField<C> {
        let (g, _) = self.coords[j];
        let coord = Polynomial::<C>::var(self.dim(), g);
        let mut out = TensorField::zero(self.dim());
        for &(g1, l1) in &self.coords {
            let d1 = coord.derivative(g1);
            for &(g2, l2) in &self.coords {
                for (m, c) in d1.derivative(g2).terms() {
                    out.add(m.clone(), vec![l1, l2], c.clone());
                }
            }
        }
        out
    }

    /// Tensor connection on covariant tensor fields: derivative index is
    /// appended as the last slot, and each existing slot is differentiated
    /// through `nabla_basis_form`.
    pub fn nabla_tensor<C: Coeff<Re = R>>(&self, t: &TensorField<C>) -> TensorField<C> {
        let mut out = TensorField::zero(self.dim());
        let basis: Vec<TensorField<C>> = (0..self.lin_dim()).map(|j| self.nabla_basis_form(j)).collect();
        for ((m, word), c) in t.terms() {
            for &(g, l) in &self.coords {
                let k = m.count(g);
                if k == 0 {
                    continue;
                }
                let mut w = word.clone();
                w.push(l);
                out.add(m.remove_one(g).unwrap(), w, c.clone() * int::<C>(k));
            }
            for (slot, &j) in word.iter().enumerate() {
                for ((m2, w2), c2) in basis[j].terms() {
                    // replace slot by the first index of ∇dy_j and append the
                    // derivative index
                    let mut w = word.clone();
                    w[slot] = w2[0];
                    w.push(w2[1]);
                    out.add(m.mul(m2), w, c.clone() * c2.clone());
                }
            }
        }
        out
    }

    /// Full contraction of two rank-`n` tensors slot by slot with the
    /// Poisson tensor.
    pub fn poisson_power<C: Coeff<Re = R>>(&self, s: &TensorField<C>, t: &TensorField<C>) -> Polynomial<C> {
        let mut out = Polynomial::zero(self.dim());
        for ((m1, w1), c1) in s.terms() {
            for ((m2, w2), c2) in t.terms() {
                if w1.len() != w2.len() {
                    continue;
                }
                let mut f = c1.clone() * c2.clone();
                for (u, v) in w1.iter().zip(w2) {
                    let s = self.lin.sigma(*u, *v);
                    if s.is_zero() {
                        f = C::zero();
                        break;
                    }
                    f = f * C::from_re(s.clone());
                }
                out.add_term(m1.mul(m2), f);
            }
        }
        out
    }

    /// Contract slot `slot` of `t` with the one-form `alpha` through the
    /// Poisson tensor, `Π(alpha, t_slot)` when `alpha_first`, else
    /// `Π(t_slot, alpha)`.
    pub fn contract_slot<C: Coeff<Re = R>>(
        &self,
        t: &TensorField<C>,
        slot: usize,
        alpha: &TensorField<C>,
        alpha_first: bool,
    ) -> TensorField<C> {
        let mut out = TensorField::zero(self.dim());
        for ((m1, w1), c1) in t.terms() {
            for ((m2, w2), c2) in alpha.terms() {
                let (u, v) = if alpha_first { (w2[0], w1[slot]) } else { (w1[slot], w2[0]) };
                let s = self.lin.sigma(u, v);
                if s.is_zero() {
                    continue;
                }
                let mut w = w1.clone();
                w.remove(slot);
                out.add(m1.mul(m2), w, c1.clone() * c2.clone() * C::from_re(s.clone()));
            }
        }
        out
    }
}

/// Covariant tensor field on the pointed space: coefficient functions times
/// ordered products of linearized one-forms.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField<C> {
    dim: usize,
    terms: BTreeMap<(Monomial, Vec<usize>), C>,
}

impl<C: Coeff> TensorField<C> {
    pub fn zero(dim: usize) -> Self {
        TensorField { dim, terms: BTreeMap::new() }
    }

    pub fn function(a: &Polynomial<C>) -> Self {
        let mut t = Self::zero(a.nvars());
        for (m, c) in a.terms() {
            t.add(m.clone(), Vec::new(), c.clone());
        }
        t
    }

    /// `f dy_j`.
    pub fn one_form(f: &Polynomial<C>, j: usize) -> Self {
        let mut t = Self::zero(f.nvars());
        for (m, c) in f.terms() {
            t.add(m.clone(), vec![j], c.clone());
        }
        t
    }

    pub fn terms(&self) -> &BTreeMap<(Monomial, Vec<usize>), C> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&mut self, m: Monomial, w: Vec<usize>, c: C) {
        if c.is_zero() {
            return;
        }
        let key = (m, w);
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

    pub fn plus(&self, other: &Self, sign: bool) -> Self {
        let mut out = self.clone();
        for ((m, w), c) in &other.terms {
            out.add(m.clone(), w.clone(), if sign { c.clone() } else { -c.clone() });
        }
        out
    }

    /// Swap two slots.
    pub fn transpose(&self, i: usize, j: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for ((m, w), c) in &self.terms {
            let mut w2 = w.clone();
            w2.swap(i, j);
            out.add(m.clone(), w2, c.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presymplectic::sample_v3;
    use crate::scalar::{q, CQ};

    fn e(i: usize) -> Polynomial<CQ> {
        Polynomial::var(3, i)
    }

    #[test]
    fn delta_moves_fibre_to_form() {
        let ctx = FedosovContext::new(&sample_v3());
        let mut w: BundleElement<CQ> = ctx.zero();
        w.push(Monomial::one(), Monomial::var(0), &[], CQ::from_re(q(1, 1))).unwrap();
        let mut expected: BundleElement<CQ> = ctx.zero();
        expected.push(Monomial::one(), Monomial::one(), &[0], CQ::from_re(q(1, 1))).unwrap();
        assert_eq!(w.delta(), expected);
    }

    #[test]
    fn flat_section_of_square() {
        let ctx = FedosovContext::new(&sample_v3());
        let w = ctx.flat_section(&e(1).pow(2)).unwrap();
        let one = CQ::from_re(q(1, 1));
        let mut expected: BundleElement<CQ> = ctx.zero();
        expected.push(Monomial::new(vec![1, 1]), Monomial::one(), &[], one.clone()).unwrap();
        expected.push(Monomial::var(1), Monomial::var(0), &[], CQ::from_re(q(2, 1))).unwrap();
        expected.push(Monomial::one(), Monomial::new(vec![0, 0]), &[], one).unwrap();
        assert_eq!(w, expected);
    }

    #[test]
    fn products_agree_on_generators() {
        let v = sample_v3();
        let ctx = FedosovContext::new(&v);
        let direct = star_product(v.base(), &e(1), &e(2)).unwrap();
        assert_eq!(ctx.star_fedosov(&e(1), &e(2)).unwrap(), direct);
        assert_eq!(ctx.star_connection(&e(1), &e(2)).unwrap(), direct);
    }

    #[test]
    fn repeated_form_index_rejected() {
        let ctx = FedosovContext::new(&sample_v3());
        let mut w: BundleElement<CQ> = ctx.zero();
        assert!(w.push(Monomial::one(), Monomial::one(), &[1, 1], CQ::from_re(q(1, 1))).is_err());
    }
}
