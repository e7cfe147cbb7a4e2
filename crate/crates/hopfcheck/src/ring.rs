//! A minimal commutative-ring abstraction for exact linear algebra.
//!
//! Determinant-style algorithms in this crate (notably the division-free
//! characteristic polynomial) must run over several coefficient domains:
//! plain rationals, polynomials, and quadratic extensions `ℚ(√d)`. The
//! domains carry context (a radicand, a variable count), so the abstraction
//! is a small *context object* trait rather than operator overloading on the
//! element types: every operation goes through `&self`.
//!
//! Only the operations the algorithms actually use are present — this is not
//! a general algebra framework.

use crate::poly::quad::{QuadExt, QuadRing};
use crate::poly::SparsePoly;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// A commutative ring with unit containing the rationals.
pub trait Ring {
    /// Element type of the ring.
    type Elem: Clone + std::fmt::Debug;

    /// Additive identity.
    fn zero(&self) -> Self::Elem;
    /// Multiplicative identity.
    fn one(&self) -> Self::Elem;
    /// Sum.
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Difference.
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Product.
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Negation.
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Zero test.
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Embedding of the rationals.
    fn from_rational(&self, q: &BigRational) -> Self::Elem;

    /// Embedding of machine integers (convenience).
    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_rational(&BigRational::from_integer(n.into()))
    }
}

/// The field of rational numbers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RationalRing;

impl Ring for RationalRing {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a.clone()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        Zero::is_zero(a)
    }
    fn from_rational(&self, q: &BigRational) -> BigRational {
        q.clone()
    }
}

/// The polynomial ring `ℚ[x_1, …, x_n]` over a fixed variable count.
///
/// Multiplication panics on exponent overflow (degrees in this crate stay
/// far below the `u8` ceiling; hitting it indicates a logic error, not bad
/// input).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolyRing {
    nvars: usize,
}

impl PolyRing {
    /// Polynomial ring in `nvars` variables.
    pub fn new(nvars: usize) -> Self {
        PolyRing { nvars }
    }

    /// Number of variables.
    pub fn nvars(&self) -> usize {
        self.nvars
    }
}

impl Ring for PolyRing {
    type Elem = SparsePoly;

    fn zero(&self) -> SparsePoly {
        SparsePoly::zero(self.nvars)
    }
    fn one(&self) -> SparsePoly {
        SparsePoly::one(self.nvars)
    }
    fn add(&self, a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
        a.add(b)
    }
    fn sub(&self, a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
        a.sub(b)
    }
    fn mul(&self, a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
        a.mul(b).expect("polynomial exponent overflow in ring multiply")
    }
    fn neg(&self, a: &SparsePoly) -> SparsePoly {
        a.neg()
    }
    fn is_zero(&self, a: &SparsePoly) -> bool {
        a.is_zero()
    }
    fn from_rational(&self, q: &BigRational) -> SparsePoly {
        SparsePoly::constant(self.nvars, q.clone())
    }
}

impl Ring for QuadRing {
    type Elem = QuadExt;

    fn zero(&self) -> QuadExt {
        QuadExt::from_rational(BigRational::zero())
    }
    fn one(&self) -> QuadExt {
        QuadExt::from_rational(BigRational::one())
    }
    fn add(&self, a: &QuadExt, b: &QuadExt) -> QuadExt {
        QuadRing::add(self, a, b)
    }
    fn sub(&self, a: &QuadExt, b: &QuadExt) -> QuadExt {
        QuadRing::sub(self, a, b)
    }
    fn mul(&self, a: &QuadExt, b: &QuadExt) -> QuadExt {
        QuadRing::mul(self, a, b)
    }
    fn neg(&self, a: &QuadExt) -> QuadExt {
        QuadRing::neg(self, a)
    }
    fn is_zero(&self, a: &QuadExt) -> bool {
        a.is_zero()
    }
    fn from_rational(&self, q: &BigRational) -> QuadExt {
        QuadExt::from_rational(q.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Generic distributivity smoke test usable over any ring.
    fn distributes<R: Ring>(ring: &R, a: R::Elem, b: R::Elem, c: R::Elem)
    where
        R::Elem: PartialEq,
    {
        let lhs = ring.mul(&a, &ring.add(&b, &c));
        let rhs = ring.add(&ring.mul(&a, &b), &ring.mul(&a, &c));
        assert!(lhs == rhs);
    }

    #[test]
    fn rational_ring_laws() {
        let r = RationalRing;
        distributes(&r, q(3, 2), q(-1, 7), q(5, 3));
        assert!(r.is_zero(&r.sub(&r.one(), &r.one())));
        assert_eq!(r.from_i64(-4), q(-4, 1));
    }

    #[test]
    fn poly_ring_laws() {
        let r = PolyRing::new(2);
        let x = SparsePoly::var(2, 0);
        let y = SparsePoly::var(2, 1);
        distributes(&r, x.clone(), y.clone(), r.one());
        assert!(r.is_zero(&r.sub(&x, &x)));
    }

    #[test]
    fn quad_ring_laws() {
        let r = QuadRing::new(q(3, 1));
        let s = QuadExt::sqrt_d();
        let t = QuadExt {
            a: q(1, 2),
            b: q(-2, 5),
        };
        distributes(&r, s.clone(), t.clone(), r.one());
        // √3·√3 = 3 through the trait surface.
        let three = Ring::mul(&r, &s, &s);
        assert!(Ring::is_zero(&r, &Ring::sub(&r, &three, &r.from_i64(3))));
    }
}
