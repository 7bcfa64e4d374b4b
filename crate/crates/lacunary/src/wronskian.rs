//! Rational functions of one variable, places, valuations, and Wronskians.
//!
//! A place is either a monic irreducible polynomial (the finite places) or
//! the point at infinity.  Valuations are the usual order of vanishing; at
//! infinity the order of `num/den` is `deg den - deg num`.
//!
//! The Wronskian of an `n`-tuple is computed by fraction-free-ish Gaussian
//! elimination over the rational function field.  When orders of the
//! Wronskian are summed over all places, the derivative is taken with
//! respect to a local parameter at each place; only infinity needs a
//! correction, contributing `-2 * C(n,2)`, so the weighted total telescopes
//! to exactly that.

use num_rational::BigRational;
use num_traits::One;

use crate::factor::{self, FactorError};
use crate::poly::DensePoly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WronskianError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid place: {0}")]
    InvalidPlace(String),
    #[error("functions are linearly dependent")]
    Dependent,
    #[error(transparent)]
    Factor(#[from] FactorError),
}

// ---------------------------------------------------------------------------
// Rational functions
// ---------------------------------------------------------------------------

/// A rational function `num/den` kept in lowest terms with a monic
/// denominator; zero is canonically `0/1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: DensePoly,
    den: DensePoly,
}

fn exact_div(a: &DensePoly, b: &DensePoly) -> DensePoly {
    a.divrem(b).expect("nonzero divisor").0
}

impl RatFunc {
    pub fn new(num: DensePoly, den: DensePoly) -> Result<Self, WronskianError> {
        if den.is_zero() {
            return Err(WronskianError::InvalidInput("zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(RatFunc::zero());
        }
        let g = num.gcd(&den);
        let mut num = exact_div(&num, &g);
        let mut den = exact_div(&den, &g);
        let lead = den.leading_coeff().expect("nonzero").clone();
        if !lead.is_one() {
            let inv = BigRational::one() / lead;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(RatFunc { num, den })
    }

    pub fn from_poly(p: DensePoly) -> Self {
        RatFunc { num: p, den: DensePoly::constant(BigRational::one()) }
    }

    pub fn zero() -> Self {
        RatFunc::from_poly(DensePoly::zero())
    }

    pub fn one() -> Self {
        RatFunc::from_poly(DensePoly::constant(BigRational::one()))
    }

    pub fn num(&self) -> &DensePoly {
        &self.num
    }

    pub fn den(&self) -> &DensePoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `max(deg num, deg den)`.
    pub fn height(&self) -> usize {
        self.num
            .degree()
            .unwrap_or(0)
            .max(self.den.degree().unwrap_or(0))
    }

    pub fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RatFunc::new(num, den).expect("nonzero denominator")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        RatFunc::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominator")
    }

    pub fn derivative(&self) -> Self {
        let num = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        let den = self.den.mul(&self.den);
        RatFunc::new(num, den).expect("nonzero denominator")
    }
}

impl std::fmt::Display for RatFunc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

// ---------------------------------------------------------------------------
// Places and valuations
// ---------------------------------------------------------------------------

/// A place of the rational function field: a monic irreducible polynomial or
/// the point at infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Place {
    Finite(DensePoly),
    Infinite,
}

impl Place {
    /// Validates monicity and irreducibility.
    pub fn finite(q: DensePoly) -> Result<Self, WronskianError> {
        if q.degree().map_or(true, |d| d == 0) {
            return Err(WronskianError::InvalidPlace("must be non-constant".into()));
        }
        if !q.is_monic() {
            return Err(WronskianError::InvalidPlace("must be monic".into()));
        }
        if !factor::is_irreducible(&q)? {
            return Err(WronskianError::InvalidPlace(format!("{} is reducible", q)));
        }
        Ok(Place::Finite(q))
    }

    pub fn infinite() -> Self {
        Place::Infinite
    }

    /// Residue degree: the degree of the defining polynomial, 1 at infinity.
    pub fn degree(&self) -> usize {
        match self {
            Place::Finite(q) => q.degree().expect("non-constant"),
            Place::Infinite => 1,
        }
    }

    fn sort_key(&self) -> (usize, Vec<BigRational>) {
        match self {
            Place::Finite(q) => (q.degree().unwrap_or(0), q.coeffs().to_vec()),
            Place::Infinite => (usize::MAX, Vec::new()),
        }
    }
}

impl std::fmt::Display for Place {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Place::Finite(q) => write!(f, "({})", q),
            Place::Infinite => write!(f, "infinity"),
        }
    }
}

/// Multiplicity of the irreducible `q` in the nonzero polynomial `p`.
fn multiplicity(p: &DensePoly, q: &DensePoly) -> i64 {
    let mut count = 0;
    let mut current = p.clone();
    loop {
        let (quo, rem) = current.divrem(q).expect("nonzero divisor");
        if !rem.is_zero() {
            return count;
        }
        count += 1;
        current = quo;
        if current.degree().is_none() {
            return count;
        }
    }
}

/// Order of vanishing of `f` at `place`; the zero function is rejected.
pub fn valuation(f: &RatFunc, place: &Place) -> Result<i64, WronskianError> {
    if f.is_zero() {
        return Err(WronskianError::InvalidInput(
            "the zero function has no valuation".into(),
        ));
    }
    Ok(match place {
        Place::Finite(q) => multiplicity(&f.num, q) - multiplicity(&f.den, q),
        Place::Infinite => {
            f.den.degree().unwrap_or(0) as i64 - f.num.degree().unwrap_or(0) as i64
        }
    })
}

// ---------------------------------------------------------------------------
// Wronskians
// ---------------------------------------------------------------------------

/// Wronskian determinant of the tuple: rows are successive derivatives.
pub fn wronskian_det(fns: &[RatFunc]) -> Result<RatFunc, WronskianError> {
    let n = fns.len();
    if n == 0 {
        return Err(WronskianError::InvalidInput("empty tuple".into()));
    }
    let mut rows: Vec<Vec<RatFunc>> = vec![fns.to_vec()];
    for _ in 1..n {
        let prev = rows.last().unwrap();
        rows.push(prev.iter().map(|f| f.derivative()).collect());
    }
    // Gaussian elimination over the function field.
    let mut det = RatFunc::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !rows[r][col].is_zero());
        let Some(pivot) = pivot else {
            return Ok(RatFunc::zero());
        };
        if pivot != col {
            rows.swap(pivot, col);
            det = det.neg();
        }
        let pivot_val = rows[col][col].clone();
        det = det.mul(&pivot_val);
        for r in col + 1..n {
            if rows[r][col].is_zero() {
                continue;
            }
            let ratio = RatFunc::new(
                rows[r][col].num.mul(&pivot_val.den),
                rows[r][col].den.mul(&pivot_val.num),
            )
            .expect("pivot nonzero");
            for c in col..n {
                let sub = ratio.mul(&rows[col][c]);
                rows[r][c] = rows[r][c].sub(&sub);
            }
        }
    }
    Ok(det)
}

/// Orders of the Wronskian at every place where it is nonzero, each taken
/// with respect to a local parameter at that place, plus the degree-weighted
/// total.  Only infinity picks up a correction, `-2 * C(n,2)`, and the total
/// always equals exactly that.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderSumReport {
    pub orders: Vec<(Place, i64)>,
    pub total: i64,
}

pub fn wronskian_order_sum(fns: &[RatFunc]) -> Result<OrderSumReport, WronskianError> {
    let n = fns.len() as i64;
    let w = wronskian_det(fns)?;
    if w.is_zero() {
        return Err(WronskianError::Dependent);
    }
    let pairs = n * (n - 1) / 2;
    let mut orders: Vec<(Place, i64)> = Vec::new();
    let (_, num_factors) = factor::factor_rational(&w.num)?;
    for (q, m) in num_factors {
        orders.push((Place::Finite(q), m as i64));
    }
    let (_, den_factors) = factor::factor_rational(&w.den)?;
    for (q, m) in den_factors {
        orders.push((Place::Finite(q), -(m as i64)));
    }
    let at_infinity = valuation(&w, &Place::Infinite)? - 2 * pairs;
    if at_infinity != 0 {
        orders.push((Place::Infinite, at_infinity));
    }
    orders.sort_by(|a, b| a.0.sort_key().cmp(&b.0.sort_key()));
    let total = orders
        .iter()
        .map(|(p, o)| p.degree() as i64 * o)
        .sum();
    Ok(OrderSumReport { orders, total })
}

// ---------------------------------------------------------------------------
// The sum-height inequality
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prop1Report {
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
}

/// Places where some function in the slice has a pole, or (for the first
/// `r`) a zero.  This is the minimal set accepted by [`verify_prop1`].
pub fn required_places(
    phis: &[RatFunc],
    r: usize,
) -> Result<Vec<Place>, WronskianError> {
    let mut out: Vec<Place> = Vec::new();
    let push = |p: Place, out: &mut Vec<Place>| {
        if !out.contains(&p) {
            out.push(p);
        }
    };
    for (i, f) in phis.iter().enumerate() {
        let (_, den_factors) = factor::factor_rational(f.den())?;
        for (q, _) in den_factors {
            push(Place::Finite(q), &mut out);
        }
        let nd = f.num().degree().unwrap_or(0);
        let dd = f.den().degree().unwrap_or(0);
        if nd > dd {
            push(Place::Infinite, &mut out);
        }
        if i < r {
            let (_, num_factors) = factor::factor_rational(f.num())?;
            for (q, _) in num_factors {
                push(Place::Finite(q), &mut out);
            }
            if nd < dd {
                push(Place::Infinite, &mut out);
            }
        }
    }
    Ok(out)
}

/// Checks the height inequality for the sum of the first `r` functions of a
/// linearly independent tuple against a set of places.  The set must contain
/// every pole of the functions and every zero of the first `r`; supersets
/// are allowed and weaken the bound.
pub fn verify_prop1(
    phis: &[RatFunc],
    r: usize,
    places: &[Place],
) -> Result<Prop1Report, WronskianError> {
    let n = phis.len();
    if n == 0 || r == 0 || r > n {
        return Err(WronskianError::InvalidInput(format!(
            "need 1 <= r <= n, got r = {}, n = {}",
            r, n
        )));
    }
    if phis.iter().any(|f| f.is_zero()) {
        return Err(WronskianError::InvalidInput(
            "tuple contains the zero function".into(),
        ));
    }
    let mut sigma = RatFunc::zero();
    for f in &phis[..r] {
        sigma = sigma.add(f);
    }
    if sigma.is_zero() {
        return Err(WronskianError::InvalidInput(
            "the first r functions sum to zero".into(),
        ));
    }

    let mut set: Vec<Place> = Vec::new();
    for p in places {
        if !set.contains(p) {
            set.push(p.clone());
        }
    }
    for req in required_places(phis, r)? {
        if !set.contains(&req) {
            return Err(WronskianError::InvalidInput(format!(
                "place set is missing {}",
                req
            )));
        }
    }

    let mut lhs = 0i64;
    for v in &set {
        let vs = valuation(&sigma, v)?;
        let mut min = i64::MAX;
        for f in phis {
            min = min.min(valuation(f, v)?);
        }
        lhs += v.degree() as i64 * (vs - min);
    }
    let pairs = (n as i64) * (n as i64 - 1) / 2;
    let set_degree: i64 = set.iter().map(|v| v.degree() as i64).sum();
    let tail_heights: i64 = phis[r..].iter().map(|f| f.height() as i64).sum();
    let rhs = pairs * (set_degree - 2) + tail_heights;
    Ok(Prop1Report { lhs, rhs, holds: lhs <= rhs })
}
