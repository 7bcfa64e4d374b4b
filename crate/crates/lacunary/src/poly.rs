//! Sparse and dense polynomials over the rationals.
//!
//! `SparsePoly` keeps a map from arbitrary-precision exponents to nonzero
//! rational coefficients, so a polynomial like `x^(10^9) - x` costs two map
//! entries.  `DensePoly` is a coefficient vector with a hard degree cap; it is
//! the representation for outer polynomials, whose degree stays small.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Default bound on the number of terms any expanding operation may produce.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// Default bound on the degree of any dense polynomial.
pub const DENSE_DEGREE_CAP: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("term budget exhausted: operation needs more than {cap} terms")]
    TermBudget { cap: usize },
    #[error("dense degree {degree} exceeds cap {cap}")]
    DenseCap { degree: String, cap: usize },
    #[error("outer polynomial must be non-constant")]
    ConstantOuter,
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("invalid polynomial data: {0}")]
    Parse(String),
}

fn big_rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Convenience constructor for integer rationals, used heavily in tests.
pub fn rat(n: i64) -> BigRational {
    big_rational(n, 1)
}

/// Convenience constructor for fractions, used heavily in tests.
pub fn frac(n: i64, d: i64) -> BigRational {
    big_rational(n, d)
}

// ---------------------------------------------------------------------------
// SparsePoly
// ---------------------------------------------------------------------------

/// Polynomial stored as exponent -> coefficient, zero coefficients excluded.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparsePoly {
    terms: BTreeMap<BigUint, BigRational>,
}

impl SparsePoly {
    pub fn zero() -> Self {
        SparsePoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = SparsePoly::zero();
        if !c.is_zero() {
            p.terms.insert(BigUint::zero(), c);
        }
        p
    }

    pub fn monomial(exp: BigUint, coeff: BigRational) -> Self {
        let mut p = SparsePoly::zero();
        if !coeff.is_zero() {
            p.terms.insert(exp, coeff);
        }
        p
    }

    /// Builds a polynomial from (exponent, coefficient) pairs, merging
    /// duplicates and dropping zeros.
    pub fn from_terms<I>(iter: I) -> Self
    where
        I: IntoIterator<Item = (BigUint, BigRational)>,
    {
        let mut terms: BTreeMap<BigUint, BigRational> = BTreeMap::new();
        for (e, c) in iter {
            if c.is_zero() {
                continue;
            }
            match terms.get_mut(&e) {
                Some(existing) => {
                    *existing += c;
                    if existing.is_zero() {
                        terms.remove(&e);
                    }
                }
                None => {
                    terms.insert(e, c);
                }
            }
        }
        SparsePoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Iterates terms by ascending exponent.
    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &BigRational)> {
        self.terms.iter()
    }

    /// Iterates terms by descending exponent.
    pub fn terms_desc(&self) -> impl Iterator<Item = (&BigUint, &BigRational)> {
        self.terms.iter().rev()
    }

    /// Degree of a nonzero polynomial.
    pub fn degree(&self) -> Option<&BigUint> {
        self.terms.keys().next_back()
    }

    pub fn min_exponent(&self) -> Option<&BigUint> {
        self.terms.keys().next()
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.terms.values().next_back()
    }

    pub fn coeff(&self, exp: &BigUint) -> BigRational {
        self.terms.get(exp).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(&BigUint::zero())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|e| e.is_zero())
    }

    /// True when the polynomial is `c * x^e` for a single exponent `e > 0`.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1 && !self.terms.keys().next().unwrap().is_zero()
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn neg(&self) -> Self {
        SparsePoly {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            match terms.get_mut(e) {
                Some(existing) => {
                    *existing += c;
                    if existing.is_zero() {
                        terms.remove(e);
                    }
                }
                None => {
                    terms.insert(e.clone(), c.clone());
                }
            }
        }
        SparsePoly { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return SparsePoly::zero();
        }
        SparsePoly {
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by `coeff * x^exp` without any term growth.
    pub fn mul_monomial(&self, exp: &BigUint, coeff: &BigRational) -> Self {
        if coeff.is_zero() {
            return SparsePoly::zero();
        }
        SparsePoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e + exp, c * coeff))
                .collect(),
        }
    }

    /// Product with an explicit term budget.
    pub fn mul_capped(&self, other: &Self, cap: usize) -> Result<Self, PolyError> {
        let (small, large) = if self.term_count() <= other.term_count() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc: BTreeMap<BigUint, BigRational> = BTreeMap::new();
        for (e1, c1) in &small.terms {
            for (e2, c2) in &large.terms {
                let e = e1 + e2;
                let c = c1 * c2;
                match acc.get_mut(&e) {
                    Some(existing) => {
                        *existing += c;
                        if existing.is_zero() {
                            acc.remove(&e);
                        }
                    }
                    None => {
                        if acc.len() >= cap {
                            return Err(PolyError::TermBudget { cap });
                        }
                        acc.insert(e, c);
                    }
                }
            }
        }
        Ok(SparsePoly { terms: acc })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.mul_capped(other, DEFAULT_TERM_CAP)
    }

    pub fn pow_capped(&self, k: usize, cap: usize) -> Result<Self, PolyError> {
        let mut result = SparsePoly::constant(BigRational::one());
        let mut base = self.clone();
        let mut k = k;
        loop {
            if k & 1 == 1 {
                result = result.mul_capped(&base, cap)?;
            }
            k >>= 1;
            if k == 0 {
                return Ok(result);
            }
            base = base.mul_capped(&base, cap)?;
        }
    }

    /// Largest `n` such that every exponent is a multiple of `n`; `None` for
    /// constants and zero.  With a constant term present the gcd is driven by
    /// the positive exponents alone.
    pub fn exponent_gcd(&self) -> Option<BigUint> {
        if self.is_constant() {
            return None;
        }
        let mut g = BigUint::zero();
        for e in self.terms.keys() {
            g = num_integer::Integer::gcd(&g, e);
            if g.is_one() {
                break;
            }
        }
        Some(g)
    }

    /// Replaces each exponent `e` by `e / n`; all exponents must be multiples
    /// of `n > 0`.
    pub fn compress_exponents(&self, n: &BigUint) -> Option<SparsePoly> {
        assert!(!n.is_zero());
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let (q, r) = num_integer::Integer::div_rem(e, n);
            if !r.is_zero() {
                return None;
            }
            terms.insert(q, c.clone());
        }
        Some(SparsePoly { terms })
    }

    /// Divides by the leading coefficient; returns the monic polynomial and
    /// the coefficient that was removed.
    pub fn make_monic(&self) -> Option<(SparsePoly, BigRational)> {
        let lead = self.leading_coeff()?.clone();
        let inv = BigRational::one() / lead.clone();
        Some((self.scale(&inv), lead))
    }

    pub fn to_dense(&self, cap: usize) -> Result<DensePoly, PolyError> {
        if self.is_zero() {
            return Ok(DensePoly::zero());
        }
        let deg = self.degree().unwrap();
        let deg: usize = deg
            .try_into()
            .map_err(|_| PolyError::DenseCap { degree: self.degree().unwrap().to_string(), cap })?;
        if deg > cap {
            return Err(PolyError::DenseCap { degree: deg.to_string(), cap });
        }
        let mut coeffs = vec![BigRational::zero(); deg + 1];
        for (e, c) in &self.terms {
            let idx: usize = e.try_into().expect("exponent below degree");
            coeffs[idx] = c.clone();
        }
        DensePoly::from_coeffs_capped(coeffs, cap)
    }

    pub fn evaluate(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            acc += c * rational_pow(x, e);
        }
        acc
    }
}

/// `x^e` for an arbitrary-precision exponent, by binary powering.
pub fn rational_pow(x: &BigRational, e: &BigUint) -> BigRational {
    let mut result = BigRational::one();
    let mut base = x.clone();
    let bits = e.bits();
    for i in 0..bits {
        if e.bit(i) {
            result *= &base;
        }
        if i + 1 < bits {
            base = &base * &base;
        }
    }
    result
}

/// Composition `g(h(x))` of a dense outer with a sparse inner polynomial.
pub fn compose_outer(g: &DensePoly, h: &SparsePoly, cap: usize) -> Result<SparsePoly, PolyError> {
    let d = g.degree().ok_or(PolyError::ConstantOuter)?;
    if d == 0 {
        return Err(PolyError::ConstantOuter);
    }
    let mut acc = SparsePoly::constant(g.coeff(d).clone());
    for j in (0..d).rev() {
        acc = acc.mul_capped(h, cap)?;
        let c = g.coeff(j);
        if !c.is_zero() {
            acc = acc.add(&SparsePoly::constant(c.clone()));
        }
    }
    Ok(acc)
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms_desc() {
            if first {
                first = false;
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            if e.is_zero() {
                write!(f, "{}", a)?;
                continue;
            }
            if !a.is_one() {
                write!(f, "{}*", a)?;
            }
            if e.is_one() {
                write!(f, "x")?;
            } else {
                write!(f, "x^{}", e)?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// JSON encoding
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRepr {
    exp: String,
    num: String,
    den: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyRepr {
    terms: Vec<TermRepr>,
}

impl Serialize for SparsePoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms = self
            .terms_desc()
            .map(|(e, c)| TermRepr {
                exp: e.to_string(),
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            })
            .collect();
        PolyRepr { terms }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SparsePoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(deserializer)?;
        let mut terms: BTreeMap<BigUint, BigRational> = BTreeMap::new();
        for t in repr.terms {
            let exp = BigUint::from_str(&t.exp)
                .map_err(|_| D::Error::custom(format!("bad exponent {:?}", t.exp)))?;
            let num = BigInt::from_str(&t.num)
                .map_err(|_| D::Error::custom(format!("bad numerator {:?}", t.num)))?;
            let den = BigInt::from_str(&t.den)
                .map_err(|_| D::Error::custom(format!("bad denominator {:?}", t.den)))?;
            if den.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            let c = BigRational::new(num, den);
            if c.is_zero() {
                return Err(D::Error::custom(format!("zero coefficient at exponent {}", exp)));
            }
            if terms.insert(exp.clone(), c).is_some() {
                return Err(D::Error::custom(format!("duplicate exponent {}", exp)));
            }
        }
        Ok(SparsePoly { terms })
    }
}

// ---------------------------------------------------------------------------
// DensePoly
// ---------------------------------------------------------------------------

/// Dense polynomial: `coeffs[i]` is the coefficient of `x^i`; the last entry
/// is nonzero, the zero polynomial has no entries.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DensePoly {
    coeffs: Vec<BigRational>,
}

impl DensePoly {
    pub fn zero() -> Self {
        DensePoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        if c.is_zero() {
            DensePoly::zero()
        } else {
            DensePoly { coeffs: vec![c] }
        }
    }

    pub fn x() -> Self {
        DensePoly { coeffs: vec![BigRational::zero(), BigRational::one()] }
    }

    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Result<Self, PolyError> {
        Self::from_coeffs_capped(coeffs, DENSE_DEGREE_CAP)
    }

    pub fn from_coeffs_capped(mut coeffs: Vec<BigRational>, cap: usize) -> Result<Self, PolyError> {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        if coeffs.len() > cap + 1 {
            return Err(PolyError::DenseCap { degree: (coeffs.len() - 1).to_string(), cap });
        }
        Ok(DensePoly { coeffs })
    }

    /// Builds from small integers, a convenience for tests: `&[1, 0, 2]` is
    /// `2x^2 + 1`.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        DensePoly::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect()).expect("small poly")
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> &BigRational {
        if i < self.coeffs.len() {
            &self.coeffs[i]
        } else {
            zero_ref()
        }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn neg(&self) -> Self {
        DensePoly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            let mut c = BigRational::zero();
            if i < self.coeffs.len() {
                c += &self.coeffs[i];
            }
            if i < other.coeffs.len() {
                c += &other.coeffs[i];
            }
            coeffs.push(c);
        }
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        DensePoly { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return DensePoly::zero();
        }
        DensePoly { coeffs: self.coeffs.iter().map(|v| v * c).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return DensePoly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        DensePoly { coeffs }
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut result = DensePoly::constant(BigRational::one());
        for _ in 0..k {
            result = result.mul(self);
        }
        result
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return DensePoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * rat(i as i64))
            .collect();
        DensePoly { coeffs }
    }

    /// Division with remainder; the divisor must be nonzero.
    pub fn divrem(&self, div: &Self) -> Result<(Self, Self), PolyError> {
        if div.is_zero() {
            return Err(PolyError::ZeroDivisor);
        }
        let dd = div.degree().unwrap();
        let lead_inv = BigRational::one() / div.leading_coeff().unwrap().clone();
        let mut rem = self.clone();
        let mut quo = vec![BigRational::zero(); self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let c = rem.leading_coeff().unwrap() * &lead_inv;
            let shift = rd - dd;
            quo[shift] = c.clone();
            let mut coeffs = rem.coeffs;
            for (i, b) in div.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    let t = &c * b;
                    coeffs[i + shift] -= t;
                }
            }
            while coeffs.last().map(|v| v.is_zero()).unwrap_or(false) {
                coeffs.pop();
            }
            rem = DensePoly { coeffs };
        }
        while quo.last().map(|v| v.is_zero()).unwrap_or(false) {
            quo.pop();
        }
        Ok((DensePoly { coeffs: quo }, rem))
    }

    /// Monic greatest common divisor by the Euclidean algorithm.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        match a.leading_coeff() {
            None => a,
            Some(lc) => {
                let inv = BigRational::one() / lc.clone();
                a.scale(&inv)
            }
        }
    }

    pub fn evaluate(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Dense composition `self(inner)`, for oracle-scale degrees only.
    pub fn compose_dense(&self, inner: &Self) -> Self {
        let mut acc = DensePoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner);
            acc = acc.add(&DensePoly::constant(c.clone()));
        }
        acc
    }

    pub fn make_monic(&self) -> Option<(DensePoly, BigRational)> {
        let lead = self.leading_coeff()?.clone();
        let inv = BigRational::one() / lead.clone();
        Some((self.scale(&inv), lead))
    }

    pub fn to_sparse(&self) -> SparsePoly {
        SparsePoly::from_terms(
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (BigUint::from(i), c.clone())),
        )
    }

    /// Substitutes `lambda * x + mu` for `x`.
    pub fn affine_substitute(&self, lambda: &BigRational, mu: &BigRational) -> Self {
        let inner = DensePoly::from_coeffs(vec![mu.clone(), lambda.clone()]).expect("degree 1");
        self.compose_dense(&inner)
    }
}

fn zero_ref() -> &'static BigRational {
    use std::sync::OnceLock;
    static ZERO: OnceLock<BigRational> = OnceLock::new();
    ZERO.get_or_init(BigRational::zero)
}

impl fmt::Display for DensePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_sparse().fmt(f)
    }
}
