//! Root finding for exact-coefficient polynomials.
//!
//! Eigenvalue questions about witness points reduce to the roots of a
//! characteristic polynomial with exact rational coefficients. This module
//! keeps the exactness as far as it can be kept:
//!
//! * the zero-root multiplicity is split off exactly (trailing
//!   coefficients),
//! * pure imaginary pairs `±i√t` are detected exactly, by reducing the
//!   polynomial modulo `z² + t` with `t` symbolic and finding positive
//!   rational roots of the gcd of the two remainder coordinates,
//! * the remaining simple roots are seeded with a floating-point
//!   Aberth–Ehrlich pass and then polished by Newton iteration in exact
//!   rational complex arithmetic, rounded to a configurable number of
//!   decimal digits each step so numerators and denominators stay bounded.

use crate::poly::quad::exact_sqrt;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Errors from numeric root refinement.
#[derive(Debug, thiserror::Error)]
pub enum RootsError {
    /// A floating-point stage failed (overflow or non-convergence).
    #[error("numeric root stage failed: {msg}")]
    Numeric {
        /// What went wrong.
        msg: String,
    },
    /// Newton polishing did not reach the requested tolerance.
    #[error("root polishing stalled after {iters} iterations")]
    PolishStalled {
        /// Iterations performed.
        iters: usize,
    },
    /// The polynomial was identically zero or empty.
    #[error("root finding needs a nonzero polynomial")]
    ZeroPolynomial,
}

type Result<T, E = RootsError> = std::result::Result<T, E>;

/// A complex number with exact rational parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigComplex {
    /// Real part.
    pub re: BigRational,
    /// Imaginary part.
    pub im: BigRational,
}

impl BigComplex {
    /// Zero.
    pub fn zero() -> Self {
        BigComplex {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    /// From rational parts.
    pub fn new(re: BigRational, im: BigRational) -> Self {
        BigComplex { re, im }
    }

    /// Exact conversion from a floating-point complex number.
    pub fn from_f64(z: Complex64) -> Option<Self> {
        Some(BigComplex {
            re: BigRational::from_float(z.re)?,
            im: BigRational::from_float(z.im)?,
        })
    }

    /// Lossy conversion to floating point.
    pub fn to_f64(&self) -> Option<Complex64> {
        Some(Complex64::new(self.re.to_f64()?, self.im.to_f64()?))
    }

    /// Sum.
    pub fn add(&self, other: &Self) -> Self {
        BigComplex {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
        }
    }

    /// Difference.
    pub fn sub(&self, other: &Self) -> Self {
        BigComplex {
            re: &self.re - &other.re,
            im: &self.im - &other.im,
        }
    }

    /// Product.
    pub fn mul(&self, other: &Self) -> Self {
        BigComplex {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }

    /// Quotient; `None` when dividing by zero.
    pub fn div(&self, other: &Self) -> Option<Self> {
        let d = other.norm_sqr();
        if d.is_zero() {
            return None;
        }
        let num = self.mul(&other.conj());
        Some(BigComplex {
            re: num.re / &d,
            im: num.im / &d,
        })
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        BigComplex {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Squared modulus, exactly.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// The 1-norm `|re| + |im|` — a cheap exact magnitude bound.
    pub fn norm1(&self) -> BigRational {
        self.re.abs() + self.im.abs()
    }

    /// Rounds both parts to `digits` decimal places.
    pub fn round(&self, digits: u32) -> Self {
        BigComplex {
            re: round_digits(&self.re, digits),
            im: round_digits(&self.im, digits),
        }
    }
}

/// Rounds a rational to the nearest multiple of `10^(−digits)`.
pub fn round_digits(x: &BigRational, digits: u32) -> BigRational {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = x * BigRational::from_integer(scale.clone());
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let shifted = if scaled.is_negative() {
        scaled - half
    } else {
        scaled + half
    };
    BigRational::new(shifted.to_integer(), scale)
}

/// `10^(−digits)` as a rational, handy as a tolerance.
pub fn decimal_tolerance(digits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10u32).pow(digits))
}

/// Strips the exact zero roots: returns the descending coefficients of
/// `p(z) / z^k` and the multiplicity `k` of the root at the origin.
pub fn trailing_zero_split(coeffs: &[BigRational]) -> Result<(Vec<BigRational>, usize)> {
    if coeffs.iter().all(Zero::is_zero) {
        return Err(RootsError::ZeroPolynomial);
    }
    let mut end = coeffs.len();
    while end > 0 && coeffs[end - 1].is_zero() {
        end -= 1;
    }
    Ok((coeffs[..end].to_vec(), coeffs.len() - end))
}

/// Evaluates a descending-coefficient polynomial at an exact complex
/// point by Horner's rule.
pub fn eval_poly(coeffs: &[BigRational], z: &BigComplex) -> BigComplex {
    let mut acc = BigComplex::zero();
    for c in coeffs {
        acc = acc.mul(z);
        acc.re += c;
    }
    acc
}

/// Descending coefficients of the derivative.
pub fn derivative(coeffs: &[BigRational]) -> Vec<BigRational> {
    let n = coeffs.len().saturating_sub(1);
    coeffs[..n]
        .iter()
        .enumerate()
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(n - i)))
        .collect()
}

/// Approximates all roots of a polynomial with simultaneous
/// Aberth–Ehrlich iteration in `f64`. Coefficients descending; the
/// polynomial must have nonzero leading and constant terms (strip zero
/// roots first). Multiple roots degrade accuracy but the pass is only a
/// seed supplier.
pub fn aberth_roots(coeffs: &[BigRational]) -> Result<Vec<Complex64>> {
    let (coeffs, zeros) = trailing_zero_split(coeffs)?;
    if zeros > 0 {
        return Err(RootsError::Numeric {
            msg: "strip zero roots before the floating-point stage".into(),
        });
    }
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    // Monic, then to f64.
    let lead = coeffs[0].clone();
    let cf: Option<Vec<f64>> = coeffs.iter().map(|c| (c / &lead).to_f64()).collect();
    let cf = cf.ok_or_else(|| RootsError::Numeric {
        msg: "coefficient does not fit f64".into(),
    })?;
    if cf.iter().any(|c| !c.is_finite()) {
        return Err(RootsError::Numeric {
            msg: "coefficient overflowed f64".into(),
        });
    }
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in &cf {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    // Initial guesses on a circle inside the Cauchy root bound.
    let bound = 1.0 + cf.iter().skip(1).map(|c| c.abs()).fold(0.0, f64::max);
    let radius = bound.powf(1.0 / n as f64).max(0.5);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    let mut converged = false;
    for _ in 0..400 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let w = if dp.norm() == 0.0 {
                Complex64::new(1e-8, 1e-8)
            } else {
                p / dp
            };
            let mut s = Complex64::new(0.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    let d = z[i] - zj;
                    if d.norm() > 1e-300 {
                        s += Complex64::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * s;
            let step = if denom.norm() < 1e-300 { w } else { w / denom };
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        if max_step < 1e-13 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(RootsError::Numeric {
            msg: "root iteration did not converge".into(),
        });
    }
    Ok(z)
}

/// Polishes one root by Newton iteration in exact rational complex
/// arithmetic, rounding to `digits` decimal places each step. Succeeds
/// when the step size falls at or below `tol`.
pub fn polish_newton(
    coeffs: &[BigRational],
    seed: &BigComplex,
    digits: u32,
    tol: &BigRational,
    max_iter: usize,
) -> Result<BigComplex> {
    let deriv = derivative(coeffs);
    let mut z = seed.round(digits);
    for _ in 0..max_iter {
        let p = eval_poly(coeffs, &z);
        let dp = eval_poly(&deriv, &z);
        let Some(step) = p.div(&dp) else {
            return Err(RootsError::Numeric {
                msg: "derivative vanished during polishing".into(),
            });
        };
        z = z.sub(&step).round(digits);
        if step.norm1() <= *tol {
            return Ok(z);
        }
    }
    Err(RootsError::PolishStalled { iters: max_iter })
}

/// Exact detection of pure imaginary root pairs.
///
/// Reducing `p(z)` modulo `z² + t` with `t` left symbolic gives a
/// remainder `S(t)·z + R(t)`; the values of `t` where both vanish are
/// exactly those with `±i√t` a root pair of `p`. The positive **rational**
/// such `t` are returned; `residual_degree` counts the part of
/// `gcd(R, S)` that could not be split into rational linear factors (zero
/// when the answer is complete).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PurePairs {
    /// Each `t > 0` with `z² + t` dividing the polynomial; ascending.
    pub pair_squares: Vec<BigRational>,
    /// Degree of the unresolved factor of the gcd (0 = complete).
    pub residual_degree: usize,
}

/// Finds pure imaginary pairs `±i√t` with rational `t`, exactly.
pub fn pure_imaginary_pairs(coeffs: &[BigRational]) -> Result<PurePairs> {
    if coeffs.iter().all(Zero::is_zero) {
        return Err(RootsError::ZeroPolynomial);
    }
    // Remainder of p modulo z² + t: maintain (R(t), S(t)) ascending in t.
    let mut r: Vec<BigRational> = Vec::new();
    let mut s: Vec<BigRational> = Vec::new();
    for c in coeffs {
        // (R, S) ← (−t·S + c, R)
        let mut new_r: Vec<BigRational> = vec![c.clone()];
        new_r.extend(s.iter().map(|x| -x.clone()));
        trim(&mut new_r);
        s = r;
        r = new_r;
    }
    let g = uni_gcd(&r, &s);
    let deg = g.len().saturating_sub(1);
    let mut out = Vec::new();
    let mut residual = 0usize;
    match deg {
        0 => {}
        1 => {
            let t = -&g[0] / &g[1];
            if t.is_positive() {
                out.push(t);
            }
        }
        2 => {
            let (c, b, a) = (&g[0], &g[1], &g[2]);
            let disc = b * b - BigRational::from_integer(BigInt::from(4)) * a * c;
            if let Some(sq) = exact_sqrt(&disc) {
                let two_a = BigRational::from_integer(BigInt::from(2)) * a;
                for root in [(-b + &sq) / &two_a, (-b - &sq) / &two_a] {
                    if root.is_positive() {
                        out.push(root);
                    }
                }
            } else {
                residual = 2;
            }
        }
        d => residual = d,
    }
    out.sort();
    out.dedup();
    Ok(PurePairs {
        pair_squares: out,
        residual_degree: residual,
    })
}

fn trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

/// Monic gcd of two ascending-coefficient univariate rationals.
fn uni_gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = uni_rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(lead) = a.last().cloned() {
        for c in &mut a {
            *c = &*c / &lead;
        }
    }
    a
}

/// Remainder of ascending-coefficient univariate division.
fn uni_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() > db {
        let dr = r.len() - 1;
        let q = &r[dr] / lead;
        if !q.is_zero() {
            for i in 0..db {
                let adj = &q * &b[i];
                r[dr - db + i] -= adj;
            }
        }
        r.pop();
        trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn qr(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn zero_roots_split_exactly() {
        // z³ − z² = z²·(z − 1)
        let coeffs = vec![q(1), q(-1), q(0), q(0)];
        let (reduced, mult) = trailing_zero_split(&coeffs).unwrap();
        assert_eq!(mult, 2);
        assert_eq!(reduced, vec![q(1), q(-1)]);
        assert!(trailing_zero_split(&[q(0), q(0)]).is_err());
    }

    #[test]
    fn aberth_finds_integer_roots() {
        // (z−1)(z−2)(z−3) = z³ − 6z² + 11z − 6
        let coeffs = vec![q(1), q(-6), q(11), q(-6)];
        let mut roots: Vec<f64> = aberth_roots(&coeffs)
            .unwrap()
            .into_iter()
            .map(|z| {
                assert!(z.im.abs() < 1e-9);
                z.re
            })
            .collect();
        roots.sort_by(f64::total_cmp);
        assert!((roots[0] - 1.0).abs() < 1e-9);
        assert!((roots[1] - 2.0).abs() < 1e-9);
        assert!((roots[2] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn newton_polishes_to_many_digits() {
        // √2 from a crude seed, 40 digits.
        let coeffs = vec![q(1), q(0), q(-2)];
        let seed = BigComplex::new(qr(14, 10), q(0));
        let tol = decimal_tolerance(35);
        let root = polish_newton(&coeffs, &seed, 40, &tol, 100).unwrap();
        let residual = eval_poly(&coeffs, &root);
        assert!(residual.norm1() < decimal_tolerance(30));
        assert!(root.im.is_zero());
    }

    #[test]
    fn complex_newton_from_aberth_seed() {
        // z² + 1: roots ±i.
        let coeffs = vec![q(1), q(0), q(1)];
        let seeds = aberth_roots(&coeffs).unwrap();
        for seed in seeds {
            let big = BigComplex::from_f64(seed).unwrap();
            let tol = decimal_tolerance(25);
            let root = polish_newton(&coeffs, &big, 30, &tol, 100).unwrap();
            assert!(root.re.abs() < decimal_tolerance(25));
            assert!((root.im.abs() - q(1)).abs() < decimal_tolerance(25));
        }
    }

    #[test]
    fn pure_pairs_detected_exactly() {
        // (z² + 4)(z + 3) = z³ + 3z² + 4z + 12
        let coeffs = vec![q(1), q(3), q(4), q(12)];
        let pairs = pure_imaginary_pairs(&coeffs).unwrap();
        assert_eq!(pairs.pair_squares, vec![q(4)]);
        assert_eq!(pairs.residual_degree, 0);
        // No pure pair: z³ + z² + z + 2.
        let none = pure_imaginary_pairs(&[q(1), q(1), q(1), q(2)]).unwrap();
        assert!(none.pair_squares.is_empty());
        assert_eq!(none.residual_degree, 0);
    }

    #[test]
    fn two_pure_pairs_via_quadratic_gcd() {
        // (z² + 2)(z² + 3) = z⁴ + 5z² + 6
        let coeffs = vec![q(1), q(0), q(5), q(0), q(6)];
        let pairs = pure_imaginary_pairs(&coeffs).unwrap();
        assert_eq!(pairs.pair_squares, vec![q(2), q(3)]);
        assert_eq!(pairs.residual_degree, 0);
    }

    #[test]
    fn cubic_purity_criterion_matches() {
        // z³ + a₁z² + a₂z + a₁a₂ has the pure pair ±i√a₂.
        let (a1, a2) = (qr(7, 3), qr(45, 7));
        let a3 = &a1 * &a2;
        let coeffs = vec![q(1), a1, a2.clone(), a3];
        let pairs = pure_imaginary_pairs(&coeffs).unwrap();
        assert_eq!(pairs.pair_squares, vec![a2]);
    }

    #[test]
    fn rounding_is_to_nearest() {
        assert_eq!(round_digits(&qr(12346, 10000), 3), qr(1235, 1000));
        assert_eq!(round_digits(&qr(-12346, 10000), 3), qr(-1235, 1000));
        assert_eq!(round_digits(&qr(1, 3), 5), qr(33333, 100000));
    }

    #[test]
    fn eval_and_derivative_exact() {
        // p = 2z³ − z + 5, p' = 6z² − 1, at z = 1 + i.
        let coeffs = vec![q(2), q(0), q(-1), q(5)];
        let z = BigComplex::new(q(1), q(1));
        // (1+i)³ = −2 + 2i ⇒ p = 2(−2+2i) − (1+i) + 5 = −4+4i −1−i +5 = 4i − i...
        let p = eval_poly(&coeffs, &z);
        assert_eq!(p, BigComplex::new(q(0), q(3)));
        let d = derivative(&coeffs);
        assert_eq!(d, vec![q(6), q(0), q(-1)]);
        // p'(1+i) = 6(1+i)² − 1 = 6·2i − 1 = −1 + 12i.
        let dp = eval_poly(&d, &z);
        assert_eq!(dp, BigComplex::new(q(-1), q(12)));
    }
}
