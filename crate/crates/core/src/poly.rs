//! Commutative polynomials in finitely many generators.
//!
//! A monomial is a sorted multiset of generator indices. Terms are kept in a
//! `BTreeMap` ordered graded-lexicographically, and zero coefficients are
//! never stored, so structural equality is mathematical equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Coeff;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<usize>);

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        Monomial(vec![i])
    }

    pub fn new(mut idx: Vec<usize>) -> Self {
        idx.sort_unstable();
        Monomial(idx)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (0, 0);
        while a < self.0.len() && b < other.0.len() {
            if self.0[a] <= other.0[b] {
                out.push(self.0[a]);
                a += 1;
            } else {
                out.push(other.0[b]);
                b += 1;
            }
        }
        out.extend_from_slice(&self.0[a..]);
        out.extend_from_slice(&other.0[b..]);
        Monomial(out)
    }

    pub fn count(&self, i: usize) -> usize {
        self.0.iter().filter(|&&j| j == i).count()
    }

    /// Monomial with one factor `i` removed, if present.
    pub fn remove_one(&self, i: usize) -> Option<Monomial> {
        let pos = self.0.iter().position(|&j| j == i)?;
        let mut v = self.0.clone();
        v.remove(pos);
        Some(Monomial(v))
    }

    /// Distinct indices with multiplicities.
    pub fn powers(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &i in &self.0 {
            match out.last_mut() {
                Some((j, k)) if *j == i => *k += 1,
                _ => out.push((i, 1)),
            }
        }
        out
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.last().copied()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<C> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "generator {i} out of range for {nvars} generators");
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(i), C::one());
        p
    }

    /// Degree-one element `sum_i v_i e_i`.
    pub fn linear(v: &[C]) -> Self {
        let mut p = Self::zero(v.len());
        for (i, c) in v.iter().enumerate() {
            p.add_term(Monomial::var(i), c.clone());
        }
        p
    }

    pub fn monomial(nvars: usize, m: Monomial, c: C) -> Self {
        if let Some(k) = m.max_index() {
            assert!(k < nvars, "generator {k} out of range for {nvars} generators");
        }
        let mut p = Self::zero(nvars);
        p.add_term(m, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, C> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, C> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Monomial::one())
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Self, c: &C) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v.clone() * c.clone());
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(m, v)| (m.clone(), v.clone() * c.clone())))
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &C) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().map(|(k, v)| (k.mul(m), v.clone() * c.clone())),
        )
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Partial derivative with respect to generator `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let k = m.count(i);
            if k == 0 {
                continue;
            }
            let factor = (0..k).fold(C::zero(), |acc, _| acc + C::one());
            out.add_term(m.remove_one(i).unwrap(), c.clone() * factor);
        }
        out
    }

    /// Algebra homomorphism determined by the images of the generators.
    pub fn substitute(&self, images: &[Polynomial<C>], target_nvars: usize) -> Self {
        assert_eq!(images.len(), self.nvars, "one image per generator");
        let mut cache: BTreeMap<(usize, usize), Polynomial<C>> = BTreeMap::new();
        let mut out = Self::zero(target_nvars);
        for (m, c) in &self.terms {
            let mut term = Self::constant(target_nvars, c.clone());
            for (i, k) in m.powers() {
                let p = cache
                    .entry((i, k))
                    .or_insert_with(|| images[i].pow(k))
                    .clone();
                term = &term * &p;
            }
            for (mm, cc) in term.terms {
                out.add_term(mm, cc);
            }
        }
        out
    }

    /// Value at the point assigning `values[i]` to generator `i`.
    pub fn evaluate(&self, values: &[C]) -> C {
        assert_eq!(values.len(), self.nvars, "one value per generator");
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &i in m.indices() {
                t = t * values[i].clone();
            }
            acc = acc + t;
        }
        acc
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        Polynomial::from_terms(self.nvars, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Reinterpret over a larger (or equal) set of generators, relabelling
    /// index `i` as `map[i]`.
    pub fn relabel(&self, map: &[usize], target_nvars: usize) -> Self {
        Self::from_terms(
            target_nvars,
            self.terms
                .iter()
                .map(|(m, c)| (Monomial::new(m.indices().iter().map(|&i| map[i]).collect()), c.clone())),
        )
    }

    /// Coefficientwise conjugation.
    pub fn conj(&self) -> Self {
        self.map_coeffs(|c| c.conj())
    }

    /// Homogeneous component of degree `d`.
    pub fn homogeneous_part(&self, d: usize) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (m.clone(), c.clone())),
        )
    }
}

impl<C: Coeff> Add for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        assert_eq!(self.nvars, rhs.nvars, "generator count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        assert_eq!(self.nvars, rhs.nvars, "generator count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<C: Coeff> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        self.map_coeffs(|c| -c.clone())
    }
}

impl<C: Coeff> Mul for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        assert_eq!(self.nvars, rhs.nvars, "generator count mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a.mul(b), ca.clone() * cb.clone());
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl<C: Coeff> $tr for Polynomial<C> {
            type Output = Polynomial<C>;
            fn $f(self, rhs: Polynomial<C>) -> Polynomial<C> {
                (&self).$f(&rhs)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl<C: Coeff> Neg for Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        -&self
    }
}
