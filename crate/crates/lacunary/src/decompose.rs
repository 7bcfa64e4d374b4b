//! Decomposition of sparse polynomials into compositions `g(h)`.
//!
//! Candidate inner polynomials come from truncated `d`-th roots: for each
//! divisor `d` of the degree, the polynomial part of `f^(1/d)` is the only
//! possible monic inner of degree `deg f / d` (up to the usual affine
//! normalization, fixed here as monic with zero constant term).  The
//! corresponding outer polynomial is recovered by repeated division, writing
//! `f` in base `h`; the decomposition is genuine exactly when every digit is
//! constant.
//!
//! Divisors are only scanned up to `2 l (l + 1)` where `l` is the number of
//! terms of `f`: inner polynomials of higher-degree outers cannot exist for
//! an `l`-term composition.  A small dense-only routine with no such pruning
//! serves as an independent cross-check at low degree.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::poly::{
    DensePoly, PolyError, SparsePoly, DEFAULT_TERM_CAP, DENSE_DEGREE_CAP,
};
use crate::series::{pow_fractional_budgeted, SeriesError};

/// Default cap on series coefficient slots examined per divisor probe.
pub const DEFAULT_SERIES_BUDGET: usize = 100_000;

/// Degree ceiling for the dense cross-check routine.
pub const ORACLE_DEGREE_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecomposeError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("series budget exhausted (cap {cap})")]
    Budget { cap: usize },
    #[error("term budget exhausted (cap {cap})")]
    TermCap { cap: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DecompositionKind {
    /// Inner polynomial is a pure power of `x`.
    Trivial,
    /// Inner polynomial has at least two terms.
    Proper,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionResult {
    pub outer: DensePoly,
    pub inner: SparsePoly,
    pub kind: DecompositionKind,
    /// Degree of the outer polynomial.
    pub divisor_d: u64,
}

/// Successful decompositions plus notes about divisors that could not be
/// fully examined within the budgets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionOutcome {
    pub results: Vec<DecompositionResult>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct DecomposeOptions {
    pub series_budget: usize,
    pub term_cap: usize,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { series_budget: DEFAULT_SERIES_BUDGET, term_cap: DEFAULT_TERM_CAP }
    }
}

// ---------------------------------------------------------------------------
// Trivial decompositions through powers of x
// ---------------------------------------------------------------------------

/// Canonical decomposition through the largest usable power of `x`: when the
/// exponent gcd `n0` exceeds 1, returns `g(x^n)` where `n` is the largest
/// divisor of `n0` giving both parts degree at least 2.  If no divisor does
/// (for instance a monomial of prime degree), the full compression with a
/// degree-1 outer is returned so the family is still visible.
pub fn trivial_decompose(
    f: &SparsePoly,
) -> Result<Option<DecompositionResult>, DecomposeError> {
    let Some(n0) = f.exponent_gcd() else { return Ok(None) };
    if n0 <= BigUint::one() {
        return Ok(None);
    }
    let m = f.degree().expect("non-constant").clone();
    let two = BigUint::from(2u32);
    // Largest divisor n of n0 with n >= 2 and m/n >= 2, when one exists.
    let n = if &n0 * &two <= m {
        Some(n0.clone())
    } else {
        // n0 = m here: f is a (bi)nomial in x^m and we need m's smallest
        // prime factor to split off a degree >= 2 outer.
        debug_assert_eq!(n0, m);
        let m_small = m.to_u64().ok_or_else(|| {
            DecomposeError::InvalidInput(
                "degree too large to canonicalize a trivial decomposition".into(),
            )
        })?;
        let p = smallest_prime_factor(m_small);
        if p == m_small {
            None
        } else {
            Some(BigUint::from(m_small / p))
        }
    };
    let n = n.unwrap_or(n0);
    let compressed = f.compress_exponents(&n).expect("n divides all exponents");
    let outer = compressed.to_dense(DENSE_DEGREE_CAP)?;
    let divisor_d = outer.degree().expect("non-constant") as u64;
    Ok(Some(DecompositionResult {
        outer,
        inner: SparsePoly::monomial(n, BigRational::one()),
        kind: DecompositionKind::Trivial,
        divisor_d,
    }))
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    acc
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's cycle variant of the rho method; `n` must be odd, composite, and
/// free of factors below the trial-division floor.
fn brent_rho(n: u64) -> u64 {
    for c in 1u64.. {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

fn smallest_prime_factor(n: u64) -> u64 {
    debug_assert!(n >= 2);
    if n % 2 == 0 {
        return 2;
    }
    let mut p = 3u64;
    while p <= 100_000 && p * p <= n {
        if n % p == 0 {
            return p;
        }
        p += 2;
    }
    if p * p > n || is_prime_u64(n) {
        return n;
    }
    let d = brent_rho(n);
    smallest_prime_factor(d).min(smallest_prime_factor(n / d))
}

// ---------------------------------------------------------------------------
// Root candidates and outer recovery
// ---------------------------------------------------------------------------

/// Polynomial part of the `d`-th root of `f`, in the normal form "monic with
/// zero constant term".  Returns `None` when `d` does not divide the degree.
/// This is the only possible inner polynomial of its degree, so callers
/// validate it end to end by recovering an outer polynomial.
pub fn sparse_root_candidate(
    f: &SparsePoly,
    d: u64,
    budget: usize,
) -> Result<Option<SparsePoly>, DecomposeError> {
    if d < 2 {
        return Err(DecomposeError::InvalidInput("root index must be at least 2".into()));
    }
    let m = f
        .degree()
        .filter(|m| !m.is_zero())
        .ok_or_else(|| DecomposeError::InvalidInput("f must be non-constant".into()))?
        .clone();
    let (e_big, rem) = m.div_rem(&BigUint::from(d));
    if !rem.is_zero() {
        return Ok(None);
    }
    let e: u64 = (&e_big).to_u64().ok_or_else(|| {
        DecomposeError::InvalidInput("inner degree exceeds the supported range".into())
    })?;
    let order = e
        .checked_add(1)
        .ok_or_else(|| DecomposeError::InvalidInput("inner degree exceeds the supported range".into()))?;

    let (f_monic, _) = f.make_monic().expect("non-constant");
    let mut tilde: Vec<(u64, BigRational)> = Vec::new();
    for (exp, c) in f_monic.terms() {
        let gap = &m - exp;
        if gap < BigUint::from(order) {
            tilde.push(((&gap).to_u64().expect("below order"), c.clone()));
        }
    }
    let tilde = crate::series::TruncatedSeries::from_terms(order, tilde);
    let root = match pow_fractional_budgeted(&tilde, 1, d, order, budget) {
        Ok(r) => r,
        Err(SeriesError::Budget { cap }) => return Err(DecomposeError::Budget { cap }),
        Err(other) => return Err(other.into()),
    };
    // Reverse back: series coefficient at y^k becomes x^(e - k); drop the
    // constant term of the result to reach the normal form.
    let terms: Vec<(BigUint, BigRational)> = root
        .terms()
        .filter(|(k, _)| **k < e)
        .map(|(k, c)| (BigUint::from(e - *k), c.clone()))
        .collect();
    Ok(Some(SparsePoly::from_terms(terms)))
}

/// Division with remainder by a non-constant sparse divisor; the quotient's
/// term count is capped.
fn sparse_divrem_capped(
    f: &SparsePoly,
    h: &SparsePoly,
    cap: usize,
) -> Result<(SparsePoly, SparsePoly), DecomposeError> {
    let dh = h
        .degree()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| DecomposeError::InvalidInput("divisor must be non-constant".into()))?
        .clone();
    let lc = h.leading_coeff().expect("non-constant").clone();
    let mut rem: std::collections::BTreeMap<BigUint, BigRational> =
        f.terms().map(|(e, c)| (e.clone(), c.clone())).collect();
    let mut quo: Vec<(BigUint, BigRational)> = Vec::new();
    while let Some((e, _)) = rem.last_key_value() {
        if *e < dh {
            break;
        }
        let e = e.clone();
        let c = rem.remove(&e).expect("present");
        let q_exp = &e - &dh;
        let q_c = c / &lc;
        for (he, hc) in h.terms() {
            if *he == dh {
                continue;
            }
            let target = &q_exp + he;
            let entry = rem.entry(target.clone()).or_insert_with(BigRational::zero);
            *entry -= &q_c * hc;
            if entry.is_zero() {
                rem.remove(&target);
            }
        }
        quo.push((q_exp, q_c));
        if quo.len() > cap {
            return Err(DecomposeError::TermCap { cap });
        }
    }
    Ok((
        SparsePoly::from_terms(quo),
        SparsePoly::from_terms(rem.into_iter()),
    ))
}

/// Writes `f` in base `h` and reads off the outer polynomial when every
/// digit is constant; `None` means `f` is not a composition through `h`.
pub fn recover_outer(
    f: &SparsePoly,
    h: &SparsePoly,
    cap: usize,
) -> Result<Option<DensePoly>, DecomposeError> {
    if h.degree().map_or(true, |d| d.is_zero()) {
        return Err(DecomposeError::InvalidInput("inner must be non-constant".into()));
    }
    let mut digits: Vec<BigRational> = Vec::new();
    let mut current = f.clone();
    loop {
        if current.is_zero() || current.is_constant() {
            digits.push(current.constant_term());
            break;
        }
        let (q, r) = sparse_divrem_capped(&current, h, cap)?;
        if !(r.is_zero() || r.is_constant()) {
            return Ok(None);
        }
        digits.push(r.constant_term());
        current = q;
        if digits.len() > DENSE_DEGREE_CAP {
            return Err(DecomposeError::Poly(PolyError::DenseCap {
                degree: digits.len().to_string(),
                cap: DENSE_DEGREE_CAP,
            }));
        }
    }
    Ok(Some(DensePoly::from_coeffs(digits)?))
}

// ---------------------------------------------------------------------------
// The sparse decomposition driver
// ---------------------------------------------------------------------------

/// All decompositions of `f` in normal form: the trivial family through the
/// exponent gcd, plus one candidate per divisor `d` of the degree with
/// `2 <= d <= min(2 l (l+1), deg f / 2)`, validated by outer recovery.
/// Divisors whose probe exceeds a budget are reported in `diagnostics`
/// rather than failing the whole run.
pub fn sparse_decompose(
    f: &SparsePoly,
    opts: &DecomposeOptions,
) -> Result<DecompositionOutcome, DecomposeError> {
    let m = f
        .degree()
        .filter(|m| !m.is_zero())
        .ok_or_else(|| DecomposeError::InvalidInput("f must be non-constant".into()))?
        .clone();
    let mut results = Vec::new();
    let mut diagnostics = Vec::new();
    if let Some(trivial) = trivial_decompose(f)? {
        results.push(trivial);
    }

    let l = f.term_count() as u64;
    let bound = 2 * l * (l + 1);
    let half = &m / BigUint::from(2u32);
    let max_d = if BigUint::from(bound) <= half {
        bound
    } else {
        half.to_u64().expect("bounded by the term-count cap")
    };
    for d in 2..=max_d {
        if !(&m % BigUint::from(d)).is_zero() {
            continue;
        }
        let candidate = match sparse_root_candidate(f, d, opts.series_budget) {
            Ok(Some(h)) => h,
            Ok(None) => continue,
            Err(DecomposeError::Budget { cap }) => {
                diagnostics.push(format!(
                    "outer degree {}: series budget exhausted (cap {})",
                    d, cap
                ));
                continue;
            }
            Err(other) => return Err(other),
        };
        if candidate.is_monomial() {
            // covered by the trivial family
            continue;
        }
        match recover_outer(f, &candidate, opts.term_cap) {
            Ok(Some(outer)) => {
                debug_assert!(
                    crate::poly::compose_outer(&outer, &candidate, opts.term_cap)
                        .map(|c| c == *f)
                        .unwrap_or(true)
                );
                results.push(DecompositionResult {
                    outer,
                    inner: candidate,
                    kind: DecompositionKind::Proper,
                    divisor_d: d,
                });
            }
            Ok(None) => {}
            Err(DecomposeError::TermCap { cap }) => {
                diagnostics.push(format!(
                    "outer degree {}: term budget exhausted during division (cap {})",
                    d, cap
                ));
            }
            Err(other) => return Err(other),
        }
    }
    results.sort_by(|a, b| {
        a.divisor_d
            .cmp(&b.divisor_d)
            .then_with(|| a.kind.cmp(&b.kind))
    });
    Ok(DecompositionOutcome { results, diagnostics })
}

/// Whether an outcome contains a decomposition with both parts of degree at
/// least 2.
pub fn has_proper(outcome: &DecompositionOutcome) -> bool {
    outcome.results.iter().any(|r| {
        r.divisor_d >= 2 && r.inner.degree().map_or(false, |d| *d >= BigUint::from(2u32))
    })
}

// ---------------------------------------------------------------------------
// Dense cross-check
// ---------------------------------------------------------------------------

/// Exhaustive decomposition search for dense polynomials of degree at most
/// `ORACLE_DEGREE_CAP`, trying every divisor with both parts of degree at
/// least 2 and no term-count pruning.  Inner polynomials are normalized to
/// be monic with zero constant term, making the result per divisor unique.
pub fn dense_decompose_oracle(
    f: &DensePoly,
) -> Result<Vec<(DensePoly, DensePoly)>, DecomposeError> {
    let m = f
        .degree()
        .filter(|m| *m >= 1)
        .ok_or_else(|| DecomposeError::InvalidInput("f must be non-constant".into()))?;
    if m > ORACLE_DEGREE_CAP {
        return Err(DecomposeError::InvalidInput(format!(
            "degree {} exceeds the dense cross-check cap {}",
            m, ORACLE_DEGREE_CAP
        )));
    }
    let (f_monic, lead) = f.make_monic().expect("non-constant");
    let mut out = Vec::new();
    for d in 2..=m / 2 {
        if m % d != 0 {
            continue;
        }
        let e = m / d;
        // Build the unique monic zero-constant inner candidate by matching
        // the top coefficients of h^d against f one at a time.
        let mut h_coeffs = vec![BigRational::zero(); e + 1];
        h_coeffs[e] = BigRational::one();
        let mut h = DensePoly::from_coeffs(h_coeffs.clone())?;
        for k in 1..e {
            let power = h.pow(d);
            let target = f_monic.coeff(m - k) - power.coeff(m - k);
            let c = target / BigRational::from_integer(num_bigint::BigInt::from(d));
            if !c.is_zero() {
                h_coeffs[e - k] = c;
                h = DensePoly::from_coeffs(h_coeffs.clone())?;
            }
        }
        // Digit expansion of f in base h; all digits must be constant.
        let mut digits: Vec<BigRational> = Vec::new();
        let mut current = f_monic.clone();
        let mut ok = true;
        while !(current.is_zero() || current.degree() == Some(0)) {
            let (q, r) = current.divrem(&h).expect("non-constant divisor");
            if r.degree().map_or(false, |dr| dr >= 1) {
                ok = false;
                break;
            }
            digits.push(r.coeff(0).clone());
            current = q;
        }
        if !ok {
            continue;
        }
        digits.push(current.coeff(0).clone());
        let outer = DensePoly::from_coeffs(digits)?.scale(&lead);
        debug_assert_eq!(outer.compose_dense(&h), *f);
        out.push((outer, h));
    }
    out.sort_by_key(|(g, _)| g.degree());
    Ok(out)
}

// ---------------------------------------------------------------------------
// Membership scans
// ---------------------------------------------------------------------------

/// Whether `f` is a composition with outer and inner degree both at least 2.
/// Errs on the side of honesty: if the search ran out of budget anywhere
/// without finding a witness, the verdict is an error instead of `false`.
pub fn corollary_membership(
    f: &SparsePoly,
    opts: &DecomposeOptions,
) -> Result<bool, DecomposeError> {
    let outcome = sparse_decompose(f, opts)?;
    if has_proper(&outcome) {
        return Ok(true);
    }
    if !outcome.diagnostics.is_empty() {
        return Err(DecomposeError::Budget { cap: opts.series_budget });
    }
    Ok(false)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxScanRow {
    /// Strictly decreasing exponents paired with the fixed coefficients.
    pub exponents: Vec<u64>,
    pub decomposable: bool,
}

/// Scans every polynomial with the given coefficient pattern and strictly
/// decreasing exponents drawn from `1..=max_exp`, reporting which are
/// compositions with both parts of degree at least 2.  Coefficients pair
/// with exponents in descending order, so `coeffs[0]` is the leading one.
pub fn corollary_box_scan(
    coeffs: &[BigRational],
    max_exp: u64,
    opts: &DecomposeOptions,
) -> Result<Vec<BoxScanRow>, DecomposeError> {
    let k = coeffs.len();
    if k == 0 {
        return Err(DecomposeError::InvalidInput(
            "coefficient pattern must be nonempty".into(),
        ));
    }
    if coeffs.iter().any(|c| c.is_zero()) {
        return Err(DecomposeError::InvalidInput(
            "coefficient pattern must not contain zeros".into(),
        ));
    }
    if (max_exp as usize) < k {
        return Err(DecomposeError::InvalidInput(format!(
            "box 1..={} cannot hold {} distinct exponents",
            max_exp, k
        )));
    }
    let mut rows = Vec::new();
    // ascending combinations of k exponents out of 1..=max_exp
    let mut pick: Vec<u64> = (1..=k as u64).collect();
    loop {
        let exponents: Vec<u64> = pick.iter().rev().copied().collect();
        let f = SparsePoly::from_terms(
            exponents
                .iter()
                .zip(coeffs)
                .map(|(&e, c)| (BigUint::from(e), c.clone())),
        );
        let decomposable = corollary_membership(&f, opts)?;
        rows.push(BoxScanRow { exponents, decomposable });

        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(rows);
            }
            i -= 1;
            if pick[i] < max_exp - (k - 1 - i) as u64 {
                pick[i] += 1;
                for j in i + 1..k {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}
