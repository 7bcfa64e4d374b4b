//! Truncated power series with exact rational coefficients.
//!
//! The central operation raises a series with constant term 1 to a fractional
//! power `s/d`.  The implementation walks coefficients in increasing order and
//! only ever touches positions reachable from the nonzero input gaps, so a
//! sparse input with huge truncation order stays cheap; the recurrence comes
//! from `fs * P' = (s/d) * fs' * P`.
//!
//! On top of that sit the delta-split expansion (splitting off a partial sum
//! of the series before expanding), the expansion of the inverse of an outer
//! polynomial at infinity, and the reversal series used to probe inner
//! polynomials of candidate compositions.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::factor;
use crate::poly::{DensePoly, SparsePoly, DEFAULT_TERM_CAP};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("invalid series input: {0}")]
    InvalidInput(String),
    #[error("series constant term must be 1")]
    NonUnitConstant,
    #[error("series term budget exhausted (cap {cap})")]
    Budget { cap: usize },
    #[error("leading coefficient has no rational root of the required index")]
    Normalization,
    #[error("required shift is not rational; operation restricted to rational shifts")]
    IrrationalShift,
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("delta is not a prefix of the series: {0}")]
    DeltaPrefix(String),
    #[error("truncation order overflows the supported range")]
    OrderOverflow,
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

// ---------------------------------------------------------------------------
// TruncatedSeries
// ---------------------------------------------------------------------------

/// Power series in `y` known modulo `y^order`; only nonzero coefficients are
/// stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: BTreeMap<u64, BigRational>,
    order: u64,
}

impl TruncatedSeries {
    pub fn zero(order: u64) -> Self {
        TruncatedSeries { coeffs: BTreeMap::new(), order }
    }

    pub fn one(order: u64) -> Self {
        let mut s = TruncatedSeries::zero(order);
        if order > 0 {
            s.coeffs.insert(0, BigRational::one());
        }
        s
    }

    /// Builds from (exponent, coefficient) pairs, dropping zeros and anything
    /// at or beyond `order`.
    pub fn from_terms<I>(order: u64, iter: I) -> Self
    where
        I: IntoIterator<Item = (u64, BigRational)>,
    {
        let mut coeffs = BTreeMap::new();
        for (e, c) in iter {
            if e >= order || c.is_zero() {
                continue;
            }
            let entry = coeffs.entry(e).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                coeffs.remove(&e);
            }
        }
        TruncatedSeries { coeffs, order }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: u64) -> BigRational {
        self.coeffs.get(&e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(0)
    }

    /// Iterates stored terms by ascending exponent.
    pub fn terms(&self) -> impl Iterator<Item = (&u64, &BigRational)> {
        self.coeffs.iter()
    }

    /// Restricts knowledge to `y^order` for a smaller order.
    pub fn truncate(&self, order: u64) -> Self {
        let order = order.min(self.order);
        TruncatedSeries {
            coeffs: self
                .coeffs
                .range(..order)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
            order,
        }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c.clone())).collect(),
            order: self.order,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut coeffs: BTreeMap<u64, BigRational> = self
            .coeffs
            .range(..order)
            .map(|(e, c)| (*e, c.clone()))
            .collect();
        for (e, c) in other.coeffs.range(..order) {
            let entry = coeffs.entry(*e).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                coeffs.remove(e);
            }
        }
        TruncatedSeries { coeffs, order }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return TruncatedSeries::zero(self.order);
        }
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|(e, v)| (*e, v * c)).collect(),
            order: self.order,
        }
    }

    /// Multiplies by `y^k`; the result is known one shift further out.
    pub fn shift_up(&self, k: u64) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
            order: self.order.saturating_add(k),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut coeffs: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (e1, c1) in self.coeffs.range(..order) {
            for (e2, c2) in other.coeffs.iter() {
                let Some(e) = e1.checked_add(*e2) else { break };
                if e >= order {
                    break;
                }
                let entry = coeffs.entry(e).or_insert_with(BigRational::zero);
                *entry += c1 * c2;
                if entry.is_zero() {
                    coeffs.remove(&e);
                }
            }
        }
        TruncatedSeries { coeffs, order }
    }

    /// Integer power by repeated squaring.
    pub fn pow_int(&self, k: u64) -> Self {
        let mut result = TruncatedSeries::one(self.order);
        let mut base = self.clone();
        let mut k = k;
        loop {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k == 0 {
                return result;
            }
            base = base.mul(&base);
        }
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        let a0 = self.constant_term();
        if a0.is_zero() {
            return Err(SeriesError::InvalidInput(
                "cannot invert a series with zero constant term".into(),
            ));
        }
        let a0_inv = BigRational::one() / a0;
        let gaps: Vec<(u64, BigRational)> = self
            .coeffs
            .iter()
            .filter(|(e, _)| **e > 0)
            .map(|(e, c)| (*e, c.clone()))
            .collect();
        let mut out: BTreeMap<u64, BigRational> = BTreeMap::new();
        if self.order > 0 {
            out.insert(0, a0_inv.clone());
        }
        let mut pending: BTreeMap<u64, BigRational> = BTreeMap::new();
        let push = |pending: &mut BTreeMap<u64, BigRational>, u: u64, bu: &BigRational, order: u64| {
            for (n, a) in &gaps {
                let Some(t) = u.checked_add(*n) else { continue };
                if t >= order {
                    continue;
                }
                let entry = pending.entry(t).or_insert_with(BigRational::zero);
                *entry += a * bu;
            }
        };
        if self.order > 0 {
            push(&mut pending, 0, &a0_inv, self.order);
        }
        let mut work = 0usize;
        while let Some((t, v)) = pending.pop_first() {
            work += 1;
            if work > DEFAULT_TERM_CAP {
                return Err(SeriesError::Budget { cap: DEFAULT_TERM_CAP });
            }
            let bt = -(&a0_inv) * v;
            if bt.is_zero() {
                continue;
            }
            push(&mut pending, t, &bt, self.order);
            out.insert(t, bt);
        }
        Ok(TruncatedSeries { coeffs: out, order: self.order })
    }
}

// ---------------------------------------------------------------------------
// Generalized binomial and multinomial coefficients
// ---------------------------------------------------------------------------

/// `(s/d choose k) = prod_{i=0}^{k-1} (s/d - i) / k!`.
pub fn binom_general(s: i64, d: u64, k: u64) -> BigRational {
    assert!(d > 0, "denominator index must be positive");
    let alpha = BigRational::new(BigInt::from(s), BigInt::from(d));
    let mut num = BigRational::one();
    let mut fact = BigInt::one();
    for i in 0..k {
        num *= &alpha - BigRational::from_integer(BigInt::from(i));
        fact *= BigInt::from(i + 1);
    }
    num / BigRational::from_integer(fact)
}

/// Coefficient of the multinomial expansion of `(1 + t_1 + ... + t_r)^(s/d)`
/// at the monomial with multiplicities `h`: `(s/d choose k) * k! / prod h_i!`
/// where `k = sum h_i`.
pub fn multinomial_coeff(s: i64, d: u64, h: &[u64]) -> BigRational {
    let k: u64 = h.iter().sum();
    let mut multi = BigUint::one();
    let mut partial: u64 = 0;
    for &hi in h {
        partial += hi;
        multi *= binomial_uint(partial, hi);
    }
    binom_general(s, d, k) * BigRational::from_integer(BigInt::from(multi))
}

fn binomial_uint(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k.min(n));
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= BigUint::from(n - i);
        den *= BigUint::from(i + 1);
    }
    num / den
}

// ---------------------------------------------------------------------------
// Fractional powers
// ---------------------------------------------------------------------------

/// `fs^(s/d)` modulo `y^min(n, fs.order)`, for `fs` with constant term 1.
/// The result is verified internally by re-raising it to the `d`-th power.
pub fn pow_fractional(
    fs: &TruncatedSeries,
    s: i64,
    d: u64,
    n: u64,
) -> Result<TruncatedSeries, SeriesError> {
    pow_fractional_with_budget(fs, s, d, n, DEFAULT_TERM_CAP)
}

/// As [`pow_fractional`], with a caller-chosen budget on the number of
/// coefficient slots the recurrence may touch.
pub fn pow_fractional_with_budget(
    fs: &TruncatedSeries,
    s: i64,
    d: u64,
    n: u64,
    budget: usize,
) -> Result<TruncatedSeries, SeriesError> {
    let result = pow_fractional_budgeted(fs, s, d, n, budget)?;
    let lhs = result.pow_int(d);
    let rhs = if s >= 0 {
        fs.truncate(result.order()).pow_int(s as u64)
    } else {
        fs.truncate(result.order())
            .invert()?
            .pow_int(s.unsigned_abs())
    };
    if lhs != rhs {
        return Err(SeriesError::Internal("fractional power self-check".into()));
    }
    Ok(result)
}

/// Same computation without the final self-check, for callers that validate
/// end to end; `budget` bounds the number of coefficient slots examined.
pub(crate) fn pow_fractional_budgeted(
    fs: &TruncatedSeries,
    s: i64,
    d: u64,
    n: u64,
    budget: usize,
) -> Result<TruncatedSeries, SeriesError> {
    if d == 0 {
        return Err(SeriesError::InvalidInput("power index d must be positive".into()));
    }
    if n == 0 {
        return Err(SeriesError::InvalidInput("truncation order must be positive".into()));
    }
    if !fs.constant_term().is_one() {
        return Err(SeriesError::NonUnitConstant);
    }
    let order = n.min(fs.order());
    let gaps: Vec<(u64, BigRational)> = fs
        .coeffs
        .iter()
        .filter(|(e, _)| **e > 0)
        .map(|(e, c)| (*e, c.clone()))
        .collect();
    let d_big = BigInt::from(d);
    let s_big = BigInt::from(s);

    let mut out: BTreeMap<u64, BigRational> = BTreeMap::new();
    out.insert(0, BigRational::one());
    let mut pending: BTreeMap<u64, BigRational> = BTreeMap::new();
    let push = |pending: &mut BTreeMap<u64, BigRational>, u: u64, pu: &BigRational| {
        for (ni, bi) in &gaps {
            let Some(t) = u.checked_add(*ni) else { continue };
            if t >= order {
                continue;
            }
            // contribution b_i * (s*n_i - d*u)/d * p_u toward t = u + n_i
            let factor = BigRational::new(&s_big * BigInt::from(*ni) - &d_big * BigInt::from(u), d_big.clone());
            let entry = pending.entry(t).or_insert_with(BigRational::zero);
            *entry += bi * pu * factor;
        }
    };
    push(&mut pending, 0, &BigRational::one());
    let mut work = 0usize;
    while let Some((t, v)) = pending.pop_first() {
        work += 1;
        if work > budget {
            return Err(SeriesError::Budget { cap: budget });
        }
        let pt = v / BigRational::from_integer(BigInt::from(t));
        if pt.is_zero() {
            continue;
        }
        push(&mut pending, t, &pt);
        out.insert(t, pt);
    }
    Ok(TruncatedSeries { coeffs: out, order })
}

// ---------------------------------------------------------------------------
// Delta-split expansion
// ---------------------------------------------------------------------------

/// One term `coeff * delta^(s/d - k) * y^y_exp` of a delta-split expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaTerm {
    pub coeff: BigRational,
    pub k: u64,
    pub y_exp: u64,
}

/// Expands `fs^(s/d)` as a finite combination of powers of the partial sum
/// `delta` (the constant 1 plus the first `p` non-constant terms of `fs`)
/// times monomials in `y`.  The output re-expands exactly to
/// `pow_fractional(fs, s, d, n)`; this is checked before returning.
pub fn delta_split_expand(
    fs: &TruncatedSeries,
    p: usize,
    delta: &TruncatedSeries,
    s: i64,
    d: u64,
    n: u64,
) -> Result<Vec<DeltaTerm>, SeriesError> {
    if d == 0 {
        return Err(SeriesError::InvalidInput("power index d must be positive".into()));
    }
    if !fs.constant_term().is_one() {
        return Err(SeriesError::NonUnitConstant);
    }
    if !delta.constant_term().is_one() {
        return Err(SeriesError::DeltaPrefix("delta must have constant term 1".into()));
    }
    let order = n.min(fs.order());
    if order == 0 {
        return Err(SeriesError::InvalidInput("truncation order must be positive".into()));
    }

    let fs_tail: Vec<(u64, BigRational)> = fs
        .coeffs
        .iter()
        .filter(|(e, _)| **e > 0)
        .map(|(e, c)| (*e, c.clone()))
        .collect();
    let delta_tail: Vec<(u64, BigRational)> = delta
        .coeffs
        .iter()
        .filter(|(e, _)| **e > 0)
        .map(|(e, c)| (*e, c.clone()))
        .collect();
    if delta_tail.len() != p {
        return Err(SeriesError::DeltaPrefix(format!(
            "delta has {} non-constant terms, expected p = {}",
            delta_tail.len(),
            p
        )));
    }
    if p > fs_tail.len() {
        return Err(SeriesError::DeltaPrefix("p exceeds the number of series terms".into()));
    }
    for (i, (e, c)) in delta_tail.iter().enumerate() {
        if fs_tail[i].0 != *e || fs_tail[i].1 != *c {
            return Err(SeriesError::DeltaPrefix(format!(
                "mismatch at term {}: delta has {} y^{}",
                i + 1,
                c,
                e
            )));
        }
    }

    // Tail beyond delta; exponents at or past the order can never appear.
    let tail: Vec<(u64, BigRational)> = fs_tail[p..]
        .iter()
        .filter(|(e, _)| *e < order)
        .cloned()
        .collect();

    // Enumerate multiplicity vectors h over the tail with sum of h_j * n_j
    // below the order.
    let mut terms: Vec<DeltaTerm> = Vec::new();
    let mut h = vec![0u64; tail.len()];
    enumerate_tail(&tail, 0, 0, order, &mut h, &mut terms, s, d)?;
    terms.sort_by_key(|t| (t.y_exp, t.k));

    // Re-expansion check against the direct fractional power.
    let reference = pow_fractional_budgeted(fs, s, d, order, DEFAULT_TERM_CAP)?;
    let delta_full = TruncatedSeries::from_terms(
        order,
        std::iter::once((0u64, BigRational::one()))
            .chain(delta_tail.iter().cloned()),
    );
    let delta_pow = pow_fractional_budgeted(&delta_full, s, d, order, DEFAULT_TERM_CAP)?;
    let delta_inv = delta_full.invert()?;
    let mut by_k: BTreeMap<u64, TruncatedSeries> = BTreeMap::new();
    for t in &terms {
        let entry = by_k.entry(t.k).or_insert_with(|| TruncatedSeries::zero(order));
        *entry = entry.add(&TruncatedSeries::from_terms(
            order,
            std::iter::once((t.y_exp, t.coeff.clone())),
        ));
    }
    let mut total = TruncatedSeries::zero(order);
    for (k, part) in &by_k {
        let factor = delta_pow.mul(&delta_inv.pow_int(*k));
        total = total.add(&part.mul(&factor));
    }
    if total != reference {
        return Err(SeriesError::Internal("delta-split re-expansion mismatch".into()));
    }
    Ok(terms)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_tail(
    tail: &[(u64, BigRational)],
    idx: usize,
    used: u64,
    order: u64,
    h: &mut Vec<u64>,
    out: &mut Vec<DeltaTerm>,
    s: i64,
    d: u64,
) -> Result<(), SeriesError> {
    if idx == tail.len() {
        let coeff_multi = multinomial_coeff(s, d, h);
        let mut coeff = coeff_multi;
        for (j, (_, b)) in tail.iter().enumerate() {
            for _ in 0..h[j] {
                coeff *= b;
            }
        }
        let k: u64 = h.iter().sum();
        out.push(DeltaTerm { coeff, k, y_exp: used });
        if out.len() > DEFAULT_TERM_CAP {
            return Err(SeriesError::Budget { cap: DEFAULT_TERM_CAP });
        }
        return Ok(());
    }
    let (n_j, _) = tail[idx];
    let mut add = 0u64;
    loop {
        h[idx] = add / n_j.max(1);
        enumerate_tail(tail, idx + 1, used + add, order, h, out, s, d)?;
        h[idx] = 0;
        add += n_j;
        if add >= order.saturating_sub(used) {
            break;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Puiseux-style inverse of an outer polynomial at infinity
// ---------------------------------------------------------------------------

/// Coefficients `c_{-1}, c_0, c_1, ...` of the expansion
/// `h = c_{-1} F + c_0 + c_1 F^{-1} + ...` satisfying
/// `g(h) = F^d + O(F^(d - count))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuiseuxTail {
    coeffs: Vec<BigRational>,
}

impl PuiseuxTail {
    /// Coefficient `c_j` for `j >= -1`.
    pub fn coeff(&self, j: i64) -> BigRational {
        let idx = (j + 1) as usize;
        self.coeffs.get(idx).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }
}

/// Exact rational `n`-th root, when it exists.
pub fn rational_nth_root(r: &BigRational, n: u64) -> Option<BigRational> {
    if n == 0 {
        return None;
    }
    if r.is_zero() {
        return Some(BigRational::zero());
    }
    if r.is_negative() && n % 2 == 0 {
        return None;
    }
    let n32: u32 = n.try_into().ok()?;
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let rn = num_integer::Roots::nth_root(num, n32);
    let rd = num_integer::Roots::nth_root(den, n32);
    if &rn.pow(n32) != num || &rd.pow(n32) != den {
        return None;
    }
    let mut root = BigRational::new(BigInt::from(rn), BigInt::from(rd));
    if r.is_negative() {
        root = -root;
    }
    Some(root)
}

/// Laurent polynomial in `F` with a hard floor on exponents, used only for
/// the coefficient-matching iteration below.
#[derive(Debug, Clone)]
struct Laurent {
    terms: BTreeMap<i64, BigRational>,
    floor: i64,
}

impl Laurent {
    fn zero(floor: i64) -> Self {
        Laurent { terms: BTreeMap::new(), floor }
    }

    fn constant(c: BigRational, floor: i64) -> Self {
        let mut l = Laurent::zero(floor);
        l.insert(0, c);
        l
    }

    fn insert(&mut self, e: i64, c: BigRational) {
        if c.is_zero() || e < self.floor {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    fn mul(&self, other: &Laurent) -> Laurent {
        let mut out = Laurent::zero(self.floor);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.insert(e1 + e2, c1 * c2);
            }
        }
        out
    }

    fn coeff(&self, e: i64) -> BigRational {
        self.terms.get(&e).cloned().unwrap_or_else(BigRational::zero)
    }
}

/// Expands the compositional inverse of `g` at infinity: finds the first
/// `count` coefficients of `h = c_{-1} F + c_0 + c_1 F^{-1} + ...` with
/// `g(h) = F^d + O(F^(d - count))`, verified by back-substitution.
pub fn puiseux_inverse_at_infinity(
    g: &DensePoly,
    count: usize,
) -> Result<PuiseuxTail, SeriesError> {
    let d = g
        .degree()
        .filter(|d| *d >= 1)
        .ok_or_else(|| SeriesError::InvalidInput("outer polynomial must be non-constant".into()))?;
    if count == 0 {
        return Err(SeriesError::InvalidInput("need at least one coefficient".into()));
    }
    let a = g.leading_coeff().unwrap().clone();
    let c_lead = rational_nth_root(&(BigRational::one() / a.clone()), d as u64)
        .ok_or(SeriesError::Normalization)?;

    let floor = -(count as i64) - (d as i64) - 2;
    let mut h = Laurent::zero(floor);
    h.insert(1, c_lead.clone());
    let mut coeffs = vec![c_lead.clone()];

    // pivot: d * a * c_lead^(d-1)
    let mut pivot = BigRational::from_integer(BigInt::from(d)) * &a;
    for _ in 0..d - 1 {
        pivot *= &c_lead;
    }

    let eval = |h: &Laurent| -> Laurent {
        let mut acc = Laurent::constant(g.coeff(d).clone(), floor);
        for i in (0..d).rev() {
            acc = acc.mul(h);
            acc.insert(0, g.coeff(i).clone());
        }
        acc
    };

    for j in 0..count - 1 {
        let defect = eval(&h);
        // coefficient of F^(d-1-j) in g(h) - F^d; the target sits below F^d
        let target = d as i64 - 1 - j as i64;
        let e = defect.coeff(target);
        let cj = -e / pivot.clone();
        h.insert(-(j as i64), cj.clone());
        coeffs.push(cj);
    }

    // Back-substitution: everything above F^(d - count) must match F^d.
    let defect = eval(&h);
    for (e, c) in &defect.terms {
        if *e <= d as i64 - count as i64 {
            continue;
        }
        let expect = if *e == d as i64 { BigRational::one() } else { BigRational::zero() };
        if *c != expect {
            return Err(SeriesError::Internal(format!(
                "back-substitution defect at F^{}",
                e
            )));
        }
    }
    Ok(PuiseuxTail { coeffs })
}

// ---------------------------------------------------------------------------
// Reversal series of a candidate inner polynomial
// ---------------------------------------------------------------------------

/// Truncation order used by default when probing `f` against an outer `g`:
/// one past twice the largest exponent gap of `f`.
pub fn default_tilde_order(f: &SparsePoly) -> Result<u64, SeriesError> {
    let deg = f
        .degree()
        .ok_or_else(|| SeriesError::InvalidInput("zero polynomial".into()))?;
    let min = f.min_exponent().unwrap();
    let nl = deg - min;
    let nl: u64 = (&nl).try_into().map_err(|_| SeriesError::OrderOverflow)?;
    nl.checked_mul(2)
        .and_then(|v| v.checked_add(1))
        .ok_or(SeriesError::OrderOverflow)
}

/// The `y`-series of `x^(-m/d) * (h_candidate(x) - xi)` where `y = 1/x`,
/// `m = deg f`, `d = deg g`, and `h_candidate` is assembled from the
/// expansion of the inverse of `g` at infinity applied to fractional powers
/// of the reversal of `f`.  When `f` is exactly `g(h)` with rational data the
/// result is the reversal of `h`, a polynomial in `y`; coefficients that
/// persist at large exponents flag a non-polynomial root.
pub fn tilde_h_truncation(
    f: &SparsePoly,
    g: &DensePoly,
    n: u64,
) -> Result<TruncatedSeries, SeriesError> {
    if n == 0 {
        return Err(SeriesError::InvalidInput("truncation order must be positive".into()));
    }
    let m = f
        .degree()
        .filter(|m| !m.is_zero())
        .ok_or_else(|| SeriesError::InvalidInput("f must be non-constant".into()))?
        .clone();
    let d = g
        .degree()
        .filter(|d| *d >= 1)
        .ok_or_else(|| SeriesError::InvalidInput("g must be non-constant".into()))?;
    let d_big = BigUint::from(d);
    let (e_big, rem) = m.div_rem(&d_big);
    if !rem.is_zero() {
        return Err(SeriesError::NotApplicable(format!(
            "deg g = {} does not divide deg f = {}",
            d, m
        )));
    }

    let (f_monic, _) = f.make_monic().unwrap();
    let (g_monic, _) = g.make_monic().unwrap();

    // Reversal of f: gaps below the truncation order.
    let mut tilde_terms: Vec<(u64, BigRational)> = Vec::new();
    for (exp, c) in f_monic.terms() {
        let gap = &m - exp;
        if gap < BigUint::from(n) {
            let gap: u64 = (&gap).try_into().expect("gap below order");
            tilde_terms.push((gap, c.clone()));
        }
    }
    let f_tilde = TruncatedSeries::from_terms(n, tilde_terms);

    // Poly-part exponent e = m/d; series terms c_j y^((1+j)e) f_tilde^(-j/d).
    let e_in_range = e_big < BigUint::from(n);
    let mut series = pow_fractional_budgeted(&f_tilde, 1, d as u64, n, DEFAULT_TERM_CAP)?
        .truncate(n);
    // pow result order = n since f_tilde.order = n
    if e_in_range {
        let e: u64 = (&e_big).try_into().expect("e below order");
        if e == 0 {
            return Err(SeriesError::InvalidInput("f must be non-constant".into()));
        }
        let j_max = (n - 1) / e - 1; // largest j >= 0 with (1+j)e < n
        let tail = puiseux_inverse_at_infinity(&g_monic, (j_max + 2) as usize)?;
        for j in 0..=j_max {
            let cj = tail.coeff(j as i64);
            if cj.is_zero() {
                continue;
            }
            let shift = (1 + j) * e;
            let part = if j == 0 {
                TruncatedSeries::one(n - shift)
            } else {
                pow_fractional_budgeted(&f_tilde, -(j as i64), d as u64, n - shift, DEFAULT_TERM_CAP)?
            };
            series = series.add(&part.scale(&cj).shift_up(shift));
        }

        // Shift by xi: for f vanishing at 0 the natural shift is the series
        // coefficient at y^e (the candidate constant term of h); otherwise xi
        // must be a rational root of g.
        let f_at_zero_vanishes = !f.min_exponent().unwrap().is_zero();
        let xi = if f_at_zero_vanishes {
            series.coeff(e)
        } else {
            let mut roots = factor::rational_roots(&g_monic).map_err(|e| match e {
                factor::FactorError::Budget { cap } => SeriesError::Budget { cap },
                other => SeriesError::Internal(other.to_string()),
            })?;
            roots.sort();
            if roots.is_empty() {
                return Err(SeriesError::IrrationalShift);
            }
            let cand = series.coeff(e);
            roots
                .iter()
                .find(|r| **r != cand)
                .cloned()
                .unwrap_or_else(|| roots[0].clone())
        };
        if !xi.is_zero() {
            series = series.sub(&TruncatedSeries::from_terms(n, std::iter::once((e, xi))));
        }
    }
    Ok(series)
}
