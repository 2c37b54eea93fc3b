//! Scalar fields used throughout the crate.
//!
//! `Real` covers the two scalar modes (exact rationals and tolerance-checked
//! floats). `Coeff` covers polynomial coefficients, which may additionally be
//! complex.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;
pub type CQ = Complex<BigRational>;
pub type C64 = Complex<f64>;

/// Build an exact rational `n/d`.
pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Build an exact complex rational `re + i im` from integer parts.
pub fn cq(re: i64, im: i64) -> CQ {
    Complex::new(q(re, 1), q(im, 1))
}

pub trait Real:
    Clone + Debug + PartialEq + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    const EXACT: bool;

    fn from_int(n: i64) -> Self;
    fn ratio(n: i64, d: i64) -> Self;
    fn abs_val(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// Decimal or `p/q` text used in JSON documents.
    fn to_text(&self) -> String;
    fn parse_text(s: &str) -> Option<Self>;

    /// Kernel basis in reduced echelon form. `rel_tol` is ignored in exact mode.
    fn kernel_basis(m: &[Vec<Self>], ncols: usize, _rel_tol: f64) -> Vec<Vec<Self>> {
        crate::linalg::exact_kernel(m, ncols)
    }

    fn matrix_rank(m: &[Vec<Self>], ncols: usize, _rel_tol: f64) -> usize {
        crate::linalg::exact_rank(m, ncols)
    }
}

impl Real for Q {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        q(n, 1)
    }
    fn ratio(n: i64, d: i64) -> Self {
        q(n, d)
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn to_text(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
    fn parse_text(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            return Some(BigRational::new(n, d));
        }
        if let Ok(n) = s.parse::<BigInt>() {
            return Some(BigRational::from_integer(n));
        }
        // finite decimal such as -1.25
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, s),
        };
        let (int_part, frac_part) = body.split_once('.')?;
        let digits = format!("{int_part}{frac_part}");
        let n: BigInt = digits.parse().ok()?;
        let d = num_traits::pow(BigInt::from(10), frac_part.len());
        Some(BigRational::new(n * sign, d))
    }
}

impl Real for f64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_text(&self) -> String {
        format!("{:.17e}", self)
    }
    fn parse_text(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
    fn kernel_basis(m: &[Vec<f64>], ncols: usize, rel_tol: f64) -> Vec<Vec<f64>> {
        crate::linalg::svd_kernel(m, ncols, rel_tol)
    }
    fn matrix_rank(m: &[Vec<f64>], ncols: usize, rel_tol: f64) -> usize {
        crate::linalg::svd_rank(m, ncols, rel_tol)
    }
}

/// Polynomial coefficient ring: a real field or its complexification.
pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + std::ops::Sub<Output = Self>
    + Send
    + Sync
    + 'static
{
    type Re: Real;

    fn from_re(r: Self::Re) -> Self;
    fn re(&self) -> Self::Re;
    fn im(&self) -> Self::Re;
    /// `None` when the type is real and `im` is nonzero.
    fn from_parts(re: Self::Re, im: Self::Re) -> Option<Self>;
    fn conj(&self) -> Self;
    fn div_re(&self, r: &Self::Re) -> Self;
}

/// Coefficient rings containing the imaginary unit.
pub trait ComplexCoeff: Coeff {
    fn i() -> Self;
}

macro_rules! real_coeff {
    ($t:ty) => {
        impl Coeff for $t {
            type Re = $t;
            fn from_re(r: $t) -> Self {
                r
            }
            fn re(&self) -> $t {
                self.clone()
            }
            fn im(&self) -> $t {
                <$t>::zero()
            }
            fn from_parts(re: $t, im: $t) -> Option<Self> {
                if im.is_zero() {
                    Some(re)
                } else {
                    None
                }
            }
            fn conj(&self) -> Self {
                self.clone()
            }
            fn div_re(&self, r: &$t) -> Self {
                self.clone() / r.clone()
            }
        }
    };
}

macro_rules! complex_coeff {
    ($t:ty) => {
        impl Coeff for Complex<$t> {
            type Re = $t;
            fn from_re(r: $t) -> Self {
                Complex::new(r, <$t>::zero())
            }
            fn re(&self) -> $t {
                self.re.clone()
            }
            fn im(&self) -> $t {
                self.im.clone()
            }
            fn from_parts(re: $t, im: $t) -> Option<Self> {
                Some(Complex::new(re, im))
            }
            fn conj(&self) -> Self {
                Complex::new(self.re.clone(), -self.im.clone())
            }
            fn div_re(&self, r: &$t) -> Self {
                Complex::new(self.re.clone() / r.clone(), self.im.clone() / r.clone())
            }
        }

        impl ComplexCoeff for Complex<$t> {
            fn i() -> Self {
                Complex::new(<$t>::zero(), <$t>::one())
            }
        }
    };
}

real_coeff!(Q);
real_coeff!(f64);
complex_coeff!(Q);
complex_coeff!(f64);

/// Magnitude estimate of a coefficient, used by floating comparisons.
pub fn coeff_abs<C: Coeff>(c: &C) -> f64 {
    c.re().to_f64().hypot(c.im().to_f64())
}
