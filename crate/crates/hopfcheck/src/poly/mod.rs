//! Sparse multivariate polynomials with exact big-rational coefficients.
//!
//! Every symbolic object in this crate — Jacobian entries, characteristic
//! polynomial coefficients, Hurwitz determinants, certification obligations —
//! is a [`SparsePoly`]: a hash map from exponent vectors to nonzero
//! `BigRational` coefficients. The representation is tuned for the workloads
//! here:
//!
//! * Exponents are `u8` per variable, stored densely as `Box<[u8]>`. Total
//!   degrees in this crate stay far below 255; exponent arithmetic is checked
//!   and overflow is a reported error, never silent wraparound.
//! * Coefficient arithmetic is exact. No floating point enters a polynomial.
//! * Term order for printing and for witness selection is graded
//!   lexicographic (total degree first, then lexicographic), descending.
//!
//! Besides ring operations, the module provides the structural operations the
//! certification campaign is built from: substitution of a polynomial for a
//! variable, sign-faithful substitution of rational bounds (`x := num/den + t`
//! and `x := (t/(t+1))·num/den` with denominators cleared), grouping of terms
//! by a subset of variables, and coefficient-sign verdicts with extreme-term
//! witnesses.

mod text;
pub mod quad;

pub use text::parse_decimal_rational;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;
use std::cmp::Ordering;

/// Errors arising in polynomial construction, arithmetic, and parsing.
#[derive(Debug, thiserror::Error)]
pub enum PolyError {
    /// An exponent exceeded the `u8` range during multiplication or power.
    #[error("exponent overflow on variable {var}: {attempted} exceeds 255")]
    ExponentOverflow {
        /// Index of the offending variable.
        var: usize,
        /// The exponent that would have been produced.
        attempted: u32,
    },
    /// Two polynomials over different variable counts were combined.
    #[error("variable count mismatch: {left} vs {right}")]
    NvarsMismatch {
        /// Variable count of the left operand.
        left: usize,
        /// Variable count of the right operand.
        right: usize,
    },
    /// Text could not be parsed as a polynomial.
    #[error("polynomial parse error at {line}:{col}: {msg}")]
    Parse {
        /// 1-based line of the offending token.
        line: usize,
        /// 1-based column of the offending token.
        col: usize,
        /// Description of what went wrong.
        msg: String,
    },
    /// A variable name was not found in the table.
    #[error("unknown variable `{name}`")]
    UnknownVariable {
        /// The name that failed to resolve.
        name: String,
    },
    /// A substitution denominator was not certified positive.
    #[error("substitution denominator must have all coefficients strictly positive")]
    NonPositiveDenominator,
    /// An evaluation point had the wrong dimension.
    #[error("point dimension {got} does not match variable count {want}")]
    PointDimension {
        /// Supplied dimension.
        got: usize,
        /// Expected dimension.
        want: usize,
    },
}

/// An ordered table of variable names shared by polynomials in one context.
///
/// Polynomials themselves carry only a variable *count*; the table supplies
/// names for parsing and printing. Keeping the table external lets the same
/// polynomial be rendered under different naming schemes (for example when a
/// network's convex parameters are relabelled).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
    index: FxHashMap<String, usize>,
}

impl VarTable {
    /// Builds a table from a list of distinct names.
    ///
    /// # Panics
    /// Panics if two names coincide; variable names must be unique.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        let mut index = FxHashMap::default();
        let mut stored = Vec::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            let n = n.as_ref().to_owned();
            assert!(
                index.insert(n.clone(), i).is_none(),
                "duplicate variable name `{n}`"
            );
            stored.push(n);
        }
        VarTable { names: stored, index }
    }

    /// Standard table `h1..h{nh}, l1..l{nl}` used for convex parameters.
    pub fn convex(nh: usize, nl: usize) -> Self {
        let mut names = Vec::with_capacity(nh + nl);
        for i in 1..=nh {
            names.push(format!("h{i}"));
        }
        for i in 1..=nl {
            names.push(format!("l{i}"));
        }
        VarTable::new(&names)
    }

    /// Returns a new table with `extra` names appended.
    pub fn extended<S: AsRef<str>>(&self, extra: &[S]) -> Self {
        let mut names: Vec<String> = self.names.clone();
        names.extend(extra.iter().map(|s| s.as_ref().to_owned()));
        VarTable::new(&names)
    }

    /// Number of variables.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// True when the table has no variables.
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Name of variable `i`.
    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    /// All names in order.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Index of `name`, if present.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Index of `name`, as an error if absent.
    pub fn require(&self, name: &str) -> Result<usize, PolyError> {
        self.index_of(name).ok_or_else(|| PolyError::UnknownVariable {
            name: name.to_owned(),
        })
    }
}

/// A single monomial-with-coefficient, used for witnesses and reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    /// Exponent vector, one entry per variable.
    pub exponents: Box<[u8]>,
    /// Nonzero rational coefficient.
    pub coeff: BigRational,
}

impl Term {
    /// Renders the term as text under `table`, e.g. `-3/2*h1^2*l3`.
    pub fn to_text(&self, table: &VarTable) -> String {
        text::format_term(&self.coeff, &self.exponents, table, true)
    }
}

/// Outcome of inspecting the coefficient signs of a polynomial.
///
/// The verdict speaks about *coefficients*, not values: `AllCoeffsPositive`
/// certifies strict positivity at every strictly positive point (and
/// positivity on the closed positive orthant wherever some monomial is
/// nonzero), while `Mixed` merely exhibits one positive and one negative
/// term. Witness terms are the graded-lexicographically largest of each sign,
/// so verdicts are deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignVerdict {
    /// The zero polynomial.
    Zero,
    /// Every coefficient is strictly positive.
    AllCoeffsPositive {
        /// Number of terms.
        terms: usize,
    },
    /// Every coefficient is strictly negative.
    AllCoeffsNegative {
        /// Number of terms.
        terms: usize,
    },
    /// Coefficients of both signs occur.
    Mixed {
        /// Largest positive term (graded-lex order).
        positive: Term,
        /// Largest negative term (graded-lex order).
        negative: Term,
        /// Number of positive terms.
        positive_terms: usize,
        /// Number of negative terms.
        negative_terms: usize,
    },
}

impl SignVerdict {
    /// True for `AllCoeffsPositive`.
    pub fn is_all_positive(&self) -> bool {
        matches!(self, SignVerdict::AllCoeffsPositive { .. })
    }

    /// True for `AllCoeffsNegative`.
    pub fn is_all_negative(&self) -> bool {
        matches!(self, SignVerdict::AllCoeffsNegative { .. })
    }

    /// True for `Zero`.
    pub fn is_zero(&self) -> bool {
        matches!(self, SignVerdict::Zero)
    }

    /// True for `AllCoeffsPositive` or `Zero`: evaluation at any point of the
    /// closed positive orthant is nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        matches!(
            self,
            SignVerdict::AllCoeffsPositive { .. } | SignVerdict::Zero
        )
    }

    /// Short machine-friendly tag for reports.
    pub fn tag(&self) -> &'static str {
        match self {
            SignVerdict::Zero => "zero",
            SignVerdict::AllCoeffsPositive { .. } => "all-coeffs-positive",
            SignVerdict::AllCoeffsNegative { .. } => "all-coeffs-negative",
            SignVerdict::Mixed { .. } => "mixed",
        }
    }
}

/// Compares exponent vectors in graded lexicographic order.
pub fn graded_lex(a: &[u8], b: &[u8]) -> Ordering {
    let ta: u32 = a.iter().map(|&e| u32::from(e)).sum();
    let tb: u32 = b.iter().map(|&e| u32::from(e)).sum();
    ta.cmp(&tb).then_with(|| a.cmp(b))
}

/// Which side of a threshold a substituted variable ranges over.
///
/// Used by [`SparsePoly::substitute_bound`] to re-parameterize a variable
/// that is known to lie below or above a rational bound `num/den`:
///
/// * `Below`: `x := (t/(t+1)) · num/den` sweeps `[0, num/den)` as the fresh
///   variable `t` sweeps `[0, ∞)`.
/// * `Above`: `x := num/den + t` sweeps `(num/den, ∞)` for `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    /// Substitute `x := (t/(t+1)) · num/den`.
    Below,
    /// Substitute `x := num/den + t`.
    Above,
}

/// A sparse multivariate polynomial over `BigRational`.
///
/// Invariant: no stored coefficient is zero, and every key has length
/// `nvars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePoly {
    nvars: usize,
    terms: FxHashMap<Box<[u8]>, BigRational>,
}

impl SparsePoly {
    /// The zero polynomial in `nvars` variables.
    pub fn zero(nvars: usize) -> Self {
        SparsePoly {
            nvars,
            terms: FxHashMap::default(),
        }
    }

    /// The constant polynomial `1`.
    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    /// A constant polynomial.
    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0u8; nvars].into_boxed_slice(), c);
        }
        p
    }

    /// A constant polynomial from an integer.
    pub fn constant_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, BigRational::from_integer(BigInt::from(c)))
    }

    /// The single variable `x_var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        Self::monomial(nvars, &[(var, 1)], BigRational::one())
    }

    /// The monomial `c · Π x_i^{e_i}` for the listed `(variable, exponent)`
    /// pairs.
    pub fn monomial(nvars: usize, powers: &[(usize, u8)], c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if c.is_zero() {
            return p;
        }
        let mut mono = vec![0u8; nvars];
        for &(v, e) in powers {
            assert!(v < nvars, "variable index {v} out of range");
            mono[v] = mono[v].checked_add(e).expect("monomial exponent overflow");
        }
        p.terms.insert(mono.into_boxed_slice(), c);
        p
    }

    /// Builds a polynomial by accumulating `(monomial, coefficient)` pairs.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Box<[u8]>, BigRational)>,
    {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.len(), nvars, "monomial width mismatch");
            p.accumulate(m, c);
        }
        p
    }

    /// Number of variables.
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Number of stored (nonzero) terms.
    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True if the polynomial is a constant (including zero).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    /// The constant term.
    pub fn constant_term(&self) -> BigRational {
        let key: Box<[u8]> = vec![0u8; self.nvars].into_boxed_slice();
        self.terms.get(&key).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Iterates over `(exponents, coefficient)` pairs in unspecified order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &BigRational)> {
        self.terms.iter().map(|(m, c)| (m.as_ref(), c))
    }

    /// Terms sorted in descending graded-lex order (printing order).
    pub fn sorted_terms(&self) -> Vec<Term> {
        let mut v: Vec<Term> = self
            .terms
            .iter()
            .map(|(m, c)| Term {
                exponents: m.clone(),
                coeff: c.clone(),
            })
            .collect();
        v.sort_by(|a, b| graded_lex(&b.exponents, &a.exponents));
        v
    }

    /// The graded-lex largest term, if any.
    pub fn max_term(&self) -> Option<Term> {
        self.terms
            .iter()
            .max_by(|a, b| graded_lex(a.0, b.0))
            .map(|(m, c)| Term {
                exponents: m.clone(),
                coeff: c.clone(),
            })
    }

    /// Total degree, or `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&e| u32::from(e)).sum())
            .max()
    }

    /// Degree in a single variable (0 for the zero polynomial).
    pub fn degree_in(&self, var: usize) -> u8 {
        assert!(var < self.nvars);
        self.terms.keys().map(|m| m[var]).max().unwrap_or(0)
    }

    /// The coefficient of an exact monomial.
    pub fn coeff_of(&self, mono: &[u8]) -> BigRational {
        assert_eq!(mono.len(), self.nvars);
        self.terms.get(mono).cloned().unwrap_or_else(BigRational::zero)
    }

    fn accumulate(&mut self, mono: Box<[u8]>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::hash_map::Entry;
        // FxHashMap re-exports std's entry API.
        match self.terms.entry(mono) {
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    fn check_nvars(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::NvarsMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    /// Sum of two polynomials.
    ///
    /// # Panics
    /// Panics if the variable counts differ (programming error, not data).
    pub fn add(&self, other: &Self) -> Self {
        self.check_nvars(other).expect("nvars mismatch in add");
        let (big, small) = if self.nterms() >= other.nterms() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.accumulate(m.clone(), c.clone());
        }
        out
    }

    /// Adds `other` into `self` in place.
    pub fn add_assign(&mut self, other: &Self) {
        self.check_nvars(other).expect("nvars mismatch in add_assign");
        for (m, c) in &other.terms {
            self.accumulate(m.clone(), c.clone());
        }
    }

    /// Difference `self − other`.
    pub fn sub(&self, other: &Self) -> Self {
        self.check_nvars(other).expect("nvars mismatch in sub");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), -c.clone());
        }
        out
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    /// Multiplication by a rational scalar.
    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero(self.nvars);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = &*c * k;
        }
        out
    }

    /// Product of two polynomials with checked exponent arithmetic.
    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_nvars(other)?;
        let mut out = Self::zero(self.nvars);
        // Iterate the smaller polynomial on the outside: fewer passes over
        // the large term list improves locality.
        let (outer, inner) = if self.nterms() <= other.nterms() {
            (self, other)
        } else {
            (other, self)
        };
        for (ma, ca) in &outer.terms {
            for (mb, cb) in &inner.terms {
                let mono = mono_add(ma, mb)?;
                out.accumulate(mono, ca * cb);
            }
        }
        Ok(out)
    }

    /// Integer power with checked exponents.
    pub fn pow(&self, e: u32) -> Result<Self, PolyError> {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Evaluates at a rational point.
    pub fn eval(&self, point: &[BigRational]) -> Result<BigRational, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::PointDimension {
                got: point.len(),
                want: self.nvars,
            });
        }
        // Cache powers per variable up to the maximum exponent used.
        let mut max_exp = vec![0u8; self.nvars];
        for m in self.terms.keys() {
            for (v, &e) in m.iter().enumerate() {
                max_exp[v] = max_exp[v].max(e);
            }
        }
        let powers: Vec<Vec<BigRational>> = point
            .iter()
            .zip(&max_exp)
            .map(|(x, &me)| {
                let mut row = Vec::with_capacity(usize::from(me) + 1);
                row.push(BigRational::one());
                for k in 1..=usize::from(me) {
                    let next = &row[k - 1] * x;
                    row.push(next);
                }
                row
            })
            .collect();
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut prod = c.clone();
            for (v, &e) in m.iter().enumerate() {
                if e > 0 {
                    prod *= &powers[v][usize::from(e)];
                }
            }
            total += prod;
        }
        Ok(total)
    }

    /// Evaluates in an arbitrary ring containing the rationals.
    pub fn eval_ring<R: crate::ring::Ring>(
        &self,
        ring: &R,
        point: &[R::Elem],
    ) -> Result<R::Elem, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::PointDimension {
                got: point.len(),
                want: self.nvars,
            });
        }
        let mut total = ring.zero();
        for (m, c) in &self.terms {
            let mut prod = ring.from_rational(c);
            for (v, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    prod = ring.mul(&prod, &point[v]);
                }
            }
            total = ring.add(&total, &prod);
        }
        Ok(total)
    }

    /// Pads the polynomial to a wider variable set (new variables last).
    pub fn extend_vars(&self, new_nvars: usize) -> Self {
        assert!(new_nvars >= self.nvars, "cannot shrink variable set");
        if new_nvars == self.nvars {
            return self.clone();
        }
        let mut out = Self::zero(new_nvars);
        for (m, c) in &self.terms {
            let mut mono = vec![0u8; new_nvars];
            mono[..self.nvars].copy_from_slice(m);
            out.terms.insert(mono.into_boxed_slice(), c.clone());
        }
        out
    }

    /// Substitutes `replacement` for variable `var`.
    pub fn substitute(&self, var: usize, replacement: &Self) -> Result<Self, PolyError> {
        self.check_nvars(replacement)?;
        assert!(var < self.nvars);
        let buckets = self.coeffs_in(var);
        let mut out = Self::zero(self.nvars);
        let mut power = Self::one(self.nvars);
        for (e, bucket) in buckets.into_iter().enumerate() {
            if e > 0 {
                power = power.mul(replacement)?;
            }
            if !bucket.is_zero() {
                out.add_assign(&bucket.mul(&power)?);
            }
        }
        Ok(out)
    }

    /// Substitutes the rational function `num/den` for `var`, clearing the
    /// denominator: returns `(den^D · self|_{var=num/den}, D)` where `D` is
    /// the degree of `self` in `var`.
    ///
    /// `den` must have all coefficients strictly positive so that the
    /// clearing factor is sign-faithful on the positive orthant.
    pub fn substitute_ratio(
        &self,
        var: usize,
        num: &Self,
        den: &Self,
    ) -> Result<(Self, u32), PolyError> {
        self.check_nvars(num)?;
        self.check_nvars(den)?;
        if !den.sign_verdict().is_all_positive() {
            return Err(PolyError::NonPositiveDenominator);
        }
        let d = u32::from(self.degree_in(var));
        let buckets = self.coeffs_in(var);
        let mut out = Self::zero(self.nvars);
        // num^e · den^{D−e}, built incrementally from both ends.
        let mut num_pows = Vec::with_capacity(buckets.len());
        let mut den_pows = Vec::with_capacity(buckets.len());
        let mut p = Self::one(self.nvars);
        for _ in 0..buckets.len() {
            num_pows.push(p.clone());
            p = p.mul(num)?;
        }
        p = Self::one(self.nvars);
        for _ in 0..buckets.len() {
            den_pows.push(p.clone());
            p = p.mul(den)?;
        }
        for (e, bucket) in buckets.into_iter().enumerate() {
            if bucket.is_zero() {
                continue;
            }
            let factor = num_pows[e].mul(&den_pows[d as usize - e])?;
            out.add_assign(&bucket.mul(&factor)?);
        }
        Ok((out, d))
    }

    /// Re-parameterizes `var` against the rational threshold `num/den`,
    /// introducing the fresh variable `param`:
    ///
    /// * [`BoundMode::Below`]: `var := (param/(param+1)) · num/den`; returns
    ///   `(((param+1)·den)^D · image, D)`.
    /// * [`BoundMode::Above`]: `var := num/den + param`; returns
    ///   `(den^D · image, D)`.
    ///
    /// `D` is the degree of `self` in `var`. The polynomial must not already
    /// involve `param`, and `den` must have strictly positive coefficients so
    /// the cleared image keeps the sign of the original on the positive
    /// orthant.
    pub fn substitute_bound(
        &self,
        var: usize,
        param: usize,
        num: &Self,
        den: &Self,
        mode: BoundMode,
    ) -> Result<(Self, u32), PolyError> {
        assert!(param < self.nvars && var != param);
        assert_eq!(self.degree_in(param), 0, "bound parameter already occurs");
        match mode {
            BoundMode::Below => {
                let t = Self::var(self.nvars, param);
                let t1 = t.add(&Self::one(self.nvars));
                let eff_num = t.mul(num)?;
                let eff_den_raw = t1.mul(den)?;
                // (param+1)·den has positive coefficients whenever den does;
                // substitute_ratio re-checks.
                self.substitute_ratio(var, &eff_num, &eff_den_raw)
            }
            BoundMode::Above => {
                let t = Self::var(self.nvars, param);
                let eff_num = num.add(&t.mul(den)?);
                self.substitute_ratio(var, &eff_num, den)
            }
        }
    }

    /// Renames variables: old variable `v` becomes `map[v]` in a polynomial
    /// of width `new_nvars`. Two old variables may map to the same slot
    /// (their exponents add, checked for overflow).
    ///
    /// # Panics
    /// Panics when `map` does not cover every variable or targets an index
    /// outside the new width.
    pub fn remap_vars(&self, new_nvars: usize, map: &[usize]) -> Result<Self, PolyError> {
        assert_eq!(map.len(), self.nvars, "remap must cover every variable");
        assert!(
            map.iter().all(|&t| t < new_nvars),
            "remap target out of range"
        );
        let mut out = Self::zero(new_nvars);
        for (m, c) in &self.terms {
            let mut exps = vec![0u8; new_nvars];
            for (v, &e) in m.iter().enumerate() {
                let sum = u32::from(exps[map[v]]) + u32::from(e);
                if sum > u8::MAX as u32 {
                    return Err(PolyError::ExponentOverflow {
                        var: map[v],
                        attempted: sum,
                    });
                }
                exps[map[v]] = sum as u8;
            }
            out.accumulate(exps.into_boxed_slice(), c.clone());
        }
        Ok(out)
    }

    /// Splits into buckets by the exponent of `var`: index `e` holds the
    /// coefficient polynomial of `var^e`, with `var` zeroed out.
    pub fn coeffs_in(&self, var: usize) -> Vec<Self> {
        assert!(var < self.nvars);
        let d = usize::from(self.degree_in(var));
        let mut buckets = vec![Self::zero(self.nvars); d + 1];
        for (m, c) in &self.terms {
            let e = usize::from(m[var]);
            let mut mono = m.clone();
            mono[var] = 0;
            buckets[e].accumulate(mono, c.clone());
        }
        buckets
    }

    /// Groups terms by the exponents of the listed variables.
    ///
    /// The key is a full-width monomial that is zero outside `vars`; the
    /// value retains the remaining variables (with `vars` zeroed). Summing
    /// `key · value` over the map reconstructs the polynomial.
    pub fn group_by(&self, vars: &[usize]) -> FxHashMap<Box<[u8]>, Self> {
        let mut mask = vec![false; self.nvars];
        for &v in vars {
            assert!(v < self.nvars);
            mask[v] = true;
        }
        let mut groups: FxHashMap<Box<[u8]>, Self> = FxHashMap::default();
        for (m, c) in &self.terms {
            let mut key = vec![0u8; self.nvars];
            let mut rest = vec![0u8; self.nvars];
            for (v, &e) in m.iter().enumerate() {
                if mask[v] {
                    key[v] = e;
                } else {
                    rest[v] = e;
                }
            }
            groups
                .entry(key.into_boxed_slice())
                .or_insert_with(|| Self::zero(self.nvars))
                .accumulate(rest.into_boxed_slice(), c.clone());
        }
        groups
    }

    /// The value polynomial of [`SparsePoly::group_by`] for one key.
    pub fn group_coefficient(&self, vars: &[usize], key: &[u8]) -> Self {
        assert_eq!(key.len(), self.nvars);
        let mut mask = vec![false; self.nvars];
        for &v in vars {
            mask[v] = true;
        }
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let matches = m
                .iter()
                .zip(key.iter())
                .enumerate()
                .all(|(v, (&e, &k))| if mask[v] { e == k } else { true });
            if matches {
                let mut rest = vec![0u8; self.nvars];
                for (v, &e) in m.iter().enumerate() {
                    if !mask[v] {
                        rest[v] = e;
                    }
                }
                out.accumulate(rest.into_boxed_slice(), c.clone());
            }
        }
        out
    }

    /// Sets the listed variables to zero (drops every term using them).
    pub fn zero_out(&self, vars: &[usize]) -> Self {
        let mut mask = vec![false; self.nvars];
        for &v in vars {
            assert!(v < self.nvars);
            mask[v] = true;
        }
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.iter().enumerate().all(|(v, &e)| !mask[v] || e == 0) {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Inspects coefficient signs; see [`SignVerdict`].
    pub fn sign_verdict(&self) -> SignVerdict {
        if self.terms.is_empty() {
            return SignVerdict::Zero;
        }
        let mut pos_count = 0usize;
        let mut neg_count = 0usize;
        let mut max_pos: Option<(&Box<[u8]>, &BigRational)> = None;
        let mut max_neg: Option<(&Box<[u8]>, &BigRational)> = None;
        for (m, c) in &self.terms {
            if c.is_positive() {
                pos_count += 1;
                if max_pos.is_none_or(|(pm, _)| graded_lex(m, pm) == Ordering::Greater) {
                    max_pos = Some((m, c));
                }
            } else {
                neg_count += 1;
                if max_neg.is_none_or(|(pm, _)| graded_lex(m, pm) == Ordering::Greater) {
                    max_neg = Some((m, c));
                }
            }
        }
        match (max_pos, max_neg) {
            (Some(_), None) => SignVerdict::AllCoeffsPositive { terms: pos_count },
            (None, Some(_)) => SignVerdict::AllCoeffsNegative { terms: neg_count },
            (Some((pm, pc)), Some((nm, nc))) => SignVerdict::Mixed {
                positive: Term {
                    exponents: pm.clone(),
                    coeff: pc.clone(),
                },
                negative: Term {
                    exponents: nm.clone(),
                    coeff: nc.clone(),
                },
                positive_terms: pos_count,
                negative_terms: neg_count,
            },
            (None, None) => unreachable!("nonempty polynomial with no terms"),
        }
    }

    /// Renders the polynomial under `table` in descending graded-lex order.
    pub fn to_text(&self, table: &VarTable) -> String {
        text::format_poly(self, table)
    }

    /// Parses text into a polynomial over `table`'s variables.
    pub fn parse(input: &str, table: &VarTable) -> Result<Self, PolyError> {
        text::parse_poly(input, table)
    }
}

pub(crate) fn mono_add(a: &[u8], b: &[u8]) -> Result<Box<[u8]>, PolyError> {
    debug_assert_eq!(a.len(), b.len());
    let mut out = vec![0u8; a.len()];
    for (v, o) in out.iter_mut().enumerate() {
        let sum = u32::from(a[v]) + u32::from(b[v]);
        if sum > 255 {
            return Err(PolyError::ExponentOverflow { var: v, attempted: sum });
        }
        *o = sum as u8;
    }
    Ok(out.into_boxed_slice())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn table3() -> VarTable {
        VarTable::new(&["x", "y", "z"])
    }

    #[test]
    fn constants_and_vars() {
        let t = table3();
        let one = SparsePoly::one(3);
        assert!(one.is_constant());
        assert_eq!(one.to_text(&t), "1");
        let x = SparsePoly::var(3, 0);
        assert_eq!(x.to_text(&t), "x");
        assert_eq!(x.degree_in(0), 1);
        assert_eq!(x.total_degree(), Some(1));
        assert!(SparsePoly::zero(3).total_degree().is_none());
    }

    #[test]
    fn remap_vars_permutes_and_merges() {
        let t = table3();
        let p = SparsePoly::parse("x^2*y - 3*z", &t).unwrap();
        // Swap x and z into a wider table.
        let wide = VarTable::new(&["a", "b", "c", "d"]);
        let swapped = p.remap_vars(4, &[2, 1, 0]).unwrap();
        assert_eq!(swapped.to_text(&wide), "b*c^2 - 3*a");
        // Merging x and y into one slot adds exponents.
        let merged = p.remap_vars(3, &[0, 0, 2]).unwrap();
        assert_eq!(merged.to_text(&t), "x^3 - 3*z");
    }

    #[test]
    fn arithmetic_cancellation() {
        let x = SparsePoly::var(3, 0);
        let y = SparsePoly::var(3, 1);
        let p = x.add(&y);
        let d = p.sub(&x).sub(&y);
        assert!(d.is_zero());
        let prod = p.mul(&p).unwrap();
        // (x+y)^2 = x^2 + 2xy + y^2
        assert_eq!(prod.nterms(), 3);
        assert_eq!(prod.coeff_of(&[1, 1, 0]), q(2, 1));
    }

    #[test]
    fn mul_matches_pow() {
        let t = table3();
        let p = SparsePoly::parse("x + 2*y - 3/2*z", &t).unwrap();
        let p3 = p.pow(3).unwrap();
        let q3 = p.mul(&p).unwrap().mul(&p).unwrap();
        assert_eq!(p3, q3);
    }

    #[test]
    fn eval_agrees_with_structure() {
        let t = table3();
        let p = SparsePoly::parse("x^2*y - 4*z + 7/3", &t).unwrap();
        let pt = [q(2, 1), q(3, 1), q(1, 2)];
        let v = p.eval(&pt).unwrap();
        // 4·3 − 4·(1/2) + 7/3 = 37/3
        assert_eq!(v, q(37, 3));
    }

    #[test]
    fn eval_dimension_checked() {
        let p = SparsePoly::var(3, 0);
        assert!(matches!(
            p.eval(&[BigRational::one()]),
            Err(PolyError::PointDimension { got: 1, want: 3 })
        ));
    }

    #[test]
    fn substitution_expands() {
        let t = table3();
        let p = SparsePoly::parse("x^2 + y", &t).unwrap();
        let r = SparsePoly::parse("y + z", &t).unwrap();
        let s = p.substitute(0, &r).unwrap();
        let expect = SparsePoly::parse("y^2 + 2*y*z + z^2 + y", &t).unwrap();
        assert_eq!(s, expect);
    }

    #[test]
    fn ratio_substitution_clears_denominator() {
        let t = table3();
        let p = SparsePoly::parse("x^2 - y", &t).unwrap();
        let num = SparsePoly::parse("y", &t).unwrap();
        let den = SparsePoly::parse("z", &t).unwrap();
        let (img, d) = p.substitute_ratio(0, &num, &den).unwrap();
        assert_eq!(d, 2);
        // z^2 · ((y/z)^2 − y) = y^2 − y·z^2
        let expect = SparsePoly::parse("y^2 - y*z^2", &t).unwrap();
        assert_eq!(img, expect);
    }

    #[test]
    fn ratio_substitution_rejects_mixed_denominator() {
        let t = table3();
        let p = SparsePoly::parse("x", &t).unwrap();
        let num = SparsePoly::one(3);
        let den = SparsePoly::parse("y - z", &t).unwrap();
        assert!(matches!(
            p.substitute_ratio(0, &num, &den),
            Err(PolyError::NonPositiveDenominator)
        ));
    }

    #[test]
    fn bound_substitution_below_matches_pointwise() {
        // Polynomial in x; substitute x := (t/(t+1))·(n/d) and compare with a
        // direct rational evaluation at sample points.
        let t = VarTable::new(&["x", "n", "d", "t"]);
        let p = SparsePoly::parse("x^2 - 3*x + 2", &t).unwrap();
        let num = SparsePoly::parse("n", &t).unwrap();
        let den = SparsePoly::parse("d", &t).unwrap();
        let (img, deg) = p
            .substitute_bound(0, 3, &num, &den, BoundMode::Below)
            .unwrap();
        assert_eq!(deg, 2);
        let (nv, dv, tv) = (q(5, 1), q(2, 1), q(3, 1));
        let xv = (&tv / (&tv + BigRational::one())) * (&nv / &dv);
        let direct = p.eval(&[xv, nv.clone(), dv.clone(), tv.clone()]).unwrap();
        let clearing = ((&tv + BigRational::one()) * &dv).pow(2);
        let lifted = img.eval(&[BigRational::zero(), nv, dv, tv]).unwrap();
        assert_eq!(lifted, direct * clearing);
    }

    #[test]
    fn bound_substitution_above_matches_pointwise() {
        let t = VarTable::new(&["x", "n", "d", "t"]);
        let p = SparsePoly::parse("x^3 + x", &t).unwrap();
        let num = SparsePoly::parse("n", &t).unwrap();
        let den = SparsePoly::parse("d", &t).unwrap();
        let (img, deg) = p
            .substitute_bound(0, 3, &num, &den, BoundMode::Above)
            .unwrap();
        assert_eq!(deg, 3);
        let (nv, dv, tv) = (q(7, 2), q(3, 1), q(4, 5));
        let xv = &nv / &dv + &tv;
        let direct = p.eval(&[xv, nv.clone(), dv.clone(), tv.clone()]).unwrap();
        let clearing = dv.pow(3);
        let lifted = img.eval(&[BigRational::zero(), nv, dv, tv]).unwrap();
        assert_eq!(lifted, direct * clearing);
    }

    #[test]
    fn grouping_reassembles() {
        let t = table3();
        let p = SparsePoly::parse("x^2*y + x*z - y*z + 4", &t).unwrap();
        let groups = p.group_by(&[0]);
        let mut sum = SparsePoly::zero(3);
        for (key, val) in &groups {
            let key_poly = SparsePoly::from_terms(3, [(key.clone(), BigRational::one())]);
            sum.add_assign(&key_poly.mul(val).unwrap());
        }
        assert_eq!(sum, p);
        // group_coefficient agrees with group_by.
        for (key, val) in &groups {
            assert_eq!(&p.group_coefficient(&[0], key), val);
        }
    }

    #[test]
    fn zero_out_drops_terms() {
        let t = table3();
        let p = SparsePoly::parse("x*y + z + 1", &t).unwrap();
        let q0 = p.zero_out(&[1]);
        let expect = SparsePoly::parse("z + 1", &t).unwrap();
        assert_eq!(q0, expect);
    }

    #[test]
    fn sign_verdicts() {
        let t = table3();
        assert!(SparsePoly::zero(3).sign_verdict().is_zero());
        let p = SparsePoly::parse("x + 2*y^2", &t).unwrap();
        assert!(p.sign_verdict().is_all_positive());
        assert!(p.neg().sign_verdict().is_all_negative());
        let m = SparsePoly::parse("x^2 - y", &t).unwrap();
        match m.sign_verdict() {
            SignVerdict::Mixed {
                positive, negative, ..
            } => {
                assert_eq!(positive.to_text(&t), "x^2");
                assert_eq!(negative.to_text(&t), "-y");
            }
            other => panic!("expected mixed verdict, got {other:?}"),
        }
    }

    #[test]
    fn coeffs_in_buckets() {
        let t = table3();
        let p = SparsePoly::parse("x^2*y + x*z + 5", &t).unwrap();
        let b = p.coeffs_in(0);
        assert_eq!(b.len(), 3);
        assert_eq!(b[0], SparsePoly::parse("5", &t).unwrap());
        assert_eq!(b[1], SparsePoly::parse("z", &t).unwrap());
        assert_eq!(b[2], SparsePoly::parse("y", &t).unwrap());
    }

    #[test]
    fn exponent_overflow_reported() {
        let x = SparsePoly::var(1, 0);
        let big = x.pow(200).unwrap();
        let err = big.mul(&big).unwrap_err();
        assert!(matches!(err, PolyError::ExponentOverflow { var: 0, .. }));
    }

    #[test]
    fn extend_vars_pads() {
        let p = SparsePoly::var(2, 1);
        let e = p.extend_vars(4);
        assert_eq!(e.nvars(), 4);
        assert_eq!(e.coeff_of(&[0, 1, 0, 0]), BigRational::one());
    }
}
