//! Factorization over the rationals.
//!
//! The pipeline is classical: monicize, split into squarefree parts (Yun),
//! clear denominators, factor each part modulo a well-chosen small prime
//! (distinct-degree plus a randomized equal-degree split with a fixed seed),
//! lift the modular factorization with quadratic Hensel steps arranged in a
//! binary tree, and recombine subsets against an integer coefficient bound.
//!
//! Everything is exact; the randomness only affects how quickly the
//! equal-degree split succeeds, never the result, and the seed is fixed so
//! repeated runs produce identical output.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::DensePoly;

/// Upper bound on subset products tried during recombination.
const RECOMBINATION_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FactorError {
    #[error("factor recombination budget exhausted (cap {cap})")]
    Budget { cap: usize },
    #[error("internal factorization failure: {0}")]
    Internal(String),
}

/// Factors `f` as `content * prod_i p_i^(e_i)` with each `p_i` monic and
/// irreducible over the rationals.  The zero polynomial yields content 0 and
/// no factors; constants yield themselves as content.
pub fn factor_rational(
    f: &DensePoly,
) -> Result<(BigRational, Vec<(DensePoly, u32)>), FactorError> {
    if f.is_zero() {
        return Ok((BigRational::zero(), Vec::new()));
    }
    let Some(deg) = f.degree() else { unreachable!() };
    if deg == 0 {
        return Ok((f.coeff(0).clone(), Vec::new()));
    }
    let (fm, lead) = f.make_monic().expect("nonzero");
    let mut factors: Vec<(DensePoly, u32)> = Vec::new();
    for (part, mult) in yun_squarefree(&fm) {
        let z = to_int_primitive(&part);
        for q in zassenhaus(&z)? {
            factors.push((to_monic_rational(&q), mult));
        }
    }
    factors.sort_by(|a, b| {
        a.0.degree()
            .cmp(&b.0.degree())
            .then_with(|| a.0.coeffs().cmp(b.0.coeffs()))
            .then_with(|| a.1.cmp(&b.1))
    });
    Ok((lead, factors))
}

/// Whether `f` is irreducible over the rationals (constants are not).
pub fn is_irreducible(f: &DensePoly) -> Result<bool, FactorError> {
    match f.degree() {
        None | Some(0) => Ok(false),
        Some(d) => {
            let (_, factors) = factor_rational(f)?;
            Ok(factors.len() == 1 && factors[0].1 == 1 && factors[0].0.degree() == Some(d))
        }
    }
}

/// Distinct rational roots of `f`, unsorted.
pub fn rational_roots(f: &DensePoly) -> Result<Vec<BigRational>, FactorError> {
    let (_, factors) = factor_rational(f)?;
    Ok(factors
        .iter()
        .filter(|(p, _)| p.degree() == Some(1))
        .map(|(p, _)| -p.coeff(0).clone())
        .collect())
}

// ---------------------------------------------------------------------------
// Squarefree decomposition (characteristic zero)
// ---------------------------------------------------------------------------

/// Quotient of an exact division by a nonzero divisor.
fn qdiv(a: &DensePoly, b: &DensePoly) -> DensePoly {
    a.divrem(b).expect("nonzero divisor").0
}

/// Yun's algorithm on a monic `f`: returns pairs `(p_i, i)` with the `p_i`
/// monic, squarefree, pairwise coprime, and `f = prod p_i^i`.
fn yun_squarefree(f: &DensePoly) -> Vec<(DensePoly, u32)> {
    let deriv = f.derivative();
    let a = f.gcd(&deriv);
    if a.degree() == Some(0) || a.is_zero() {
        return vec![(f.clone(), 1)];
    }
    let mut b = qdiv(f, &a);
    let c = qdiv(&deriv, &a);
    let mut d = c.sub(&b.derivative());
    let mut out = Vec::new();
    let mut i = 1u32;
    while b.degree().map_or(false, |db| db >= 1) {
        let p = b.gcd(&d);
        if p.degree().map_or(false, |dp| dp >= 1) {
            out.push((p.clone(), i));
        }
        b = qdiv(&b, &p);
        let c = qdiv(&d, &p);
        d = c.sub(&b.derivative());
        i += 1;
    }
    out
}

// ---------------------------------------------------------------------------
// Integer / rational conversions
// ---------------------------------------------------------------------------

/// Clears denominators and removes integer content; the result has a
/// positive leading coefficient.
fn to_int_primitive(f: &DensePoly) -> Vec<BigInt> {
    let mut den = BigInt::one();
    for c in f.coeffs() {
        den = den.lcm(c.denom());
    }
    let mut v: Vec<BigInt> = f
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&den / c.denom()))
        .collect();
    let mut content = BigInt::zero();
    for c in &v {
        content = content.gcd(c);
    }
    if !content.is_zero() && !content.is_one() {
        for c in &mut v {
            *c = &*c / &content;
        }
    }
    if v.last().map_or(false, |c| c.is_negative()) {
        for c in &mut v {
            *c = -&*c;
        }
    }
    v
}

fn to_monic_rational(z: &[BigInt]) -> DensePoly {
    let lead = BigRational::from_integer(z.last().expect("nonzero").clone());
    let coeffs: Vec<BigRational> = z
        .iter()
        .map(|c| BigRational::from_integer(c.clone()) / lead.clone())
        .collect();
    DensePoly::from_coeffs(coeffs).expect("degree bounded by the input")
}

// ---------------------------------------------------------------------------
// Arithmetic modulo m on integer coefficient vectors
// ---------------------------------------------------------------------------

type ZPoly = Vec<BigInt>;

fn zp_trim(mut v: ZPoly) -> ZPoly {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
    v
}

fn zp_deg(v: &[BigInt]) -> Option<usize> {
    if v.is_empty() {
        None
    } else {
        Some(v.len() - 1)
    }
}

fn mp_reduce(v: &[BigInt], m: &BigInt) -> ZPoly {
    zp_trim(v.iter().map(|c| c.mod_floor(m)).collect())
}

fn mp_add(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ZPoly {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    mp_reduce(&out, m)
}

fn mp_sub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ZPoly {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    mp_reduce(&out, m)
}

fn mp_mul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            out[i + j] += ca * cb;
        }
    }
    mp_reduce(&out, m)
}

fn modinv(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Division with remainder; the divisor's leading coefficient must be
/// invertible modulo `m`.
fn mp_divrem(a: &[BigInt], b: &[BigInt], m: &BigInt) -> (ZPoly, ZPoly) {
    let db = zp_deg(b).expect("division by zero");
    let inv = modinv(b.last().unwrap(), m).expect("leading coefficient not invertible");
    let mut rem: Vec<BigInt> = a.iter().map(|c| c.mod_floor(m)).collect();
    if rem.len() < b.len() {
        return (Vec::new(), zp_trim(rem));
    }
    let dq = rem.len() - b.len();
    let mut q = vec![BigInt::zero(); dq + 1];
    for k in (0..=dq).rev() {
        let c = rem[db + k].mod_floor(m);
        if c.is_zero() {
            continue;
        }
        let qk = (&c * &inv).mod_floor(m);
        q[k] = qk.clone();
        for (j, bc) in b.iter().enumerate() {
            let t = (&rem[j + k] - &qk * bc).mod_floor(m);
            rem[j + k] = t;
        }
    }
    (zp_trim(q), zp_trim(rem))
}

fn mp_make_monic(a: &[BigInt], m: &BigInt) -> ZPoly {
    match a.last() {
        None => Vec::new(),
        Some(lc) => {
            let inv = modinv(lc, m).expect("leading coefficient not invertible");
            mp_reduce(&a.iter().map(|c| c * &inv).collect::<Vec<_>>(), m)
        }
    }
}

/// Monic gcd modulo a prime.
fn mp_gcd(a: &[BigInt], b: &[BigInt], p: &BigInt) -> ZPoly {
    let mut r0 = mp_reduce(a, p);
    let mut r1 = mp_reduce(b, p);
    while !r1.is_empty() {
        let r = mp_divrem(&r0, &r1, p).1;
        r0 = r1;
        r1 = r;
    }
    mp_make_monic(&r0, p)
}

/// Extended Euclid modulo a prime for coprime `a`, `b`: returns `(s, t)`
/// with `s a + t b = 1`, `deg s < deg b`, `deg t < deg a`.
fn mp_bezout(a: &[BigInt], b: &[BigInt], p: &BigInt) -> (ZPoly, ZPoly) {
    let mut r0 = mp_reduce(a, p);
    let mut r1 = mp_reduce(b, p);
    let mut s0: ZPoly = vec![BigInt::one()];
    let mut s1: ZPoly = Vec::new();
    let mut t0: ZPoly = Vec::new();
    let mut t1: ZPoly = vec![BigInt::one()];
    while !r1.is_empty() {
        let (q, r) = mp_divrem(&r0, &r1, p);
        let s = mp_sub(&s0, &mp_mul(&q, &s1, p), p);
        let t = mp_sub(&t0, &mp_mul(&q, &t1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    debug_assert_eq!(zp_deg(&r0), Some(0), "inputs must be coprime");
    let inv = modinv(&r0[0], p).expect("coprime inputs");
    let s = mp_reduce(&s0.iter().map(|c| c * &inv).collect::<Vec<_>>(), p);
    let t = mp_reduce(&t0.iter().map(|c| c * &inv).collect::<Vec<_>>(), p);
    (s, t)
}

fn mp_powmod(base: &[BigInt], exp: &BigInt, f: &[BigInt], p: &BigInt) -> ZPoly {
    let mut acc: ZPoly = vec![BigInt::one()];
    if exp.is_zero() {
        return acc;
    }
    let base = mp_divrem(base, f, p).1;
    let bits = exp.bits();
    for i in (0..bits).rev() {
        acc = mp_divrem(&mp_mul(&acc, &acc, p), f, p).1;
        if exp.bit(i) {
            acc = mp_divrem(&mp_mul(&acc, &base, p), f, p).1;
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Factorization modulo a prime
// ---------------------------------------------------------------------------

struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
}

/// Distinct-degree stage: factors a monic squarefree `f` modulo the odd
/// prime `p` into monic irreducibles.
fn factor_modp(f: &[BigInt], p: &BigInt) -> Result<Vec<ZPoly>, FactorError> {
    let x_poly: ZPoly = vec![BigInt::zero(), BigInt::one()];
    let mut rem_f = f.to_vec();
    let mut h = x_poly.clone();
    let mut out = Vec::new();
    let mut i = 0usize;
    loop {
        let Some(df) = zp_deg(&rem_f) else { break };
        if df == 0 {
            break;
        }
        i += 1;
        if 2 * i > df {
            out.push(mp_make_monic(&rem_f, p));
            break;
        }
        h = mp_powmod(&h, p, &rem_f, p);
        let g = mp_gcd(&mp_sub(&h, &x_poly, p), &rem_f, p);
        if zp_deg(&g).map_or(false, |d| d >= 1) {
            equal_degree_factor(&g, i, p, &mut out)?;
            rem_f = mp_divrem(&rem_f, &g, p).0;
            h = mp_divrem(&h, &rem_f, p).1;
        }
    }
    Ok(out)
}

/// Cantor-Zassenhaus equal-degree split: `g` is monic squarefree with all
/// irreducible factors of degree `i`.
fn equal_degree_factor(
    g: &[BigInt],
    i: usize,
    p: &BigInt,
    out: &mut Vec<ZPoly>,
) -> Result<(), FactorError> {
    let dg = zp_deg(g).expect("nonzero");
    if dg == i {
        out.push(mp_make_monic(g, p));
        return Ok(());
    }
    let p_small = p.to_u64().expect("working primes are small");
    let mut rng = SplitMix(0x0fb3_1d5c_02a4_11e7 ^ (dg as u64).wrapping_mul(0x9e37));
    let exp = (p.pow(i as u32) - BigInt::one()) / BigInt::from(2);
    for _ in 0..400 {
        let r: ZPoly = zp_trim(
            (0..dg)
                .map(|_| BigInt::from(rng.next() % p_small))
                .collect(),
        );
        if zp_deg(&r).map_or(true, |d| d == 0) {
            continue;
        }
        let direct = mp_gcd(&r, g, p);
        if let Some(dt) = zp_deg(&direct) {
            if dt >= 1 && dt < dg {
                equal_degree_factor(&direct, i, p, out)?;
                equal_degree_factor(&mp_divrem(g, &direct, p).0, i, p, out)?;
                return Ok(());
            }
        }
        let s = mp_powmod(&r, &exp, g, p);
        let t = mp_gcd(&mp_sub(&s, &[BigInt::one()], p), g, p);
        if let Some(dt) = zp_deg(&t) {
            if dt >= 1 && dt < dg {
                equal_degree_factor(&t, i, p, out)?;
                equal_degree_factor(&mp_divrem(g, &t, p).0, i, p, out)?;
                return Ok(());
            }
        }
    }
    Err(FactorError::Internal("equal-degree split did not converge".into()))
}

// ---------------------------------------------------------------------------
// Hensel lifting on a factor tree
// ---------------------------------------------------------------------------

enum LiftTree {
    Leaf {
        poly: ZPoly,
    },
    Node {
        poly: ZPoly,
        s: ZPoly,
        t: ZPoly,
        left: Box<LiftTree>,
        right: Box<LiftTree>,
    },
}

impl LiftTree {
    fn poly(&self) -> &ZPoly {
        match self {
            LiftTree::Leaf { poly } => poly,
            LiftTree::Node { poly, .. } => poly,
        }
    }
}

fn build_tree(factors: &[ZPoly], p: &BigInt) -> LiftTree {
    if factors.len() == 1 {
        return LiftTree::Leaf { poly: factors[0].clone() };
    }
    let mid = factors.len() / 2;
    let left = build_tree(&factors[..mid], p);
    let right = build_tree(&factors[mid..], p);
    let poly = mp_mul(left.poly(), right.poly(), p);
    let (s, t) = mp_bezout(left.poly(), right.poly(), p);
    LiftTree::Node { poly, s, t, left: Box::new(left), right: Box::new(right) }
}

/// One quadratic Hensel step: assuming `target = g h` and `s g + t h = 1`
/// modulo the previous modulus, reestablishes both modulo `m2`.
fn hensel_step(
    target: &ZPoly,
    g: &ZPoly,
    h: &ZPoly,
    s: &ZPoly,
    t: &ZPoly,
    m2: &BigInt,
) -> Result<(ZPoly, ZPoly, ZPoly, ZPoly), FactorError> {
    let e = mp_sub(target, &mp_mul(g, h, m2), m2);
    let (q, r) = mp_divrem(&mp_mul(s, &e, m2), h, m2);
    let g2 = mp_add(g, &mp_add(&mp_mul(t, &e, m2), &mp_mul(&q, g, m2), m2), m2);
    let h2 = mp_add(h, &r, m2);
    if zp_deg(&g2) != zp_deg(g) || zp_deg(&h2) != zp_deg(h) {
        return Err(FactorError::Internal("lift disturbed factor degrees".into()));
    }
    let e2 = mp_sub(
        &mp_add(&mp_mul(s, &g2, m2), &mp_mul(t, &h2, m2), m2),
        &[BigInt::one()],
        m2,
    );
    let (c, d) = mp_divrem(&mp_mul(s, &e2, m2), &h2, m2);
    let s2 = mp_sub(s, &d, m2);
    let t2 = mp_sub(
        t,
        &mp_add(&mp_mul(t, &e2, m2), &mp_mul(&c, &g2, m2), m2),
        m2,
    );
    Ok((g2, h2, s2, t2))
}

fn lift_node(tree: &mut LiftTree, target: ZPoly, m2: &BigInt) -> Result<(), FactorError> {
    match tree {
        LiftTree::Leaf { poly } => {
            *poly = target;
            Ok(())
        }
        LiftTree::Node { poly, s, t, left, right } => {
            let (g2, h2, s2, t2) = hensel_step(&target, left.poly(), right.poly(), s, t, m2)?;
            *poly = target;
            *s = s2;
            *t = t2;
            lift_node(left, g2, m2)?;
            lift_node(right, h2, m2)
        }
    }
}

fn collect_leaves(tree: &LiftTree, out: &mut Vec<ZPoly>) {
    match tree {
        LiftTree::Leaf { poly } => out.push(poly.clone()),
        LiftTree::Node { left, right, .. } => {
            collect_leaves(left, out);
            collect_leaves(right, out);
        }
    }
}

// ---------------------------------------------------------------------------
// Zassenhaus driver
// ---------------------------------------------------------------------------

fn z_primitive(v: ZPoly) -> ZPoly {
    let mut v = zp_trim(v);
    let mut content = BigInt::zero();
    for c in &v {
        content = content.gcd(c);
    }
    if !content.is_zero() && !content.is_one() {
        for c in &mut v {
            *c = &*c / &content;
        }
    }
    if v.last().map_or(false, |c| c.is_negative()) {
        for c in &mut v {
            *c = -&*c;
        }
    }
    v
}

/// Exact division in `Z[x]`; `None` unless `b` divides `a` exactly.
fn zdiv_exact(a: &[BigInt], b: &[BigInt]) -> Option<ZPoly> {
    let db = zp_deg(b)?;
    let da = zp_deg(a)?;
    if da < db {
        return None;
    }
    let lc = b.last().unwrap();
    let mut rem = a.to_vec();
    let mut q = vec![BigInt::zero(); da - db + 1];
    for k in (0..=da - db).rev() {
        let c = rem[db + k].clone();
        if c.is_zero() {
            continue;
        }
        let (qk, r) = c.div_rem(lc);
        if !r.is_zero() {
            return None;
        }
        for (j, bc) in b.iter().enumerate() {
            rem[j + k] -= &qk * bc;
        }
        q[k] = qk;
    }
    if rem.iter().all(|c| c.is_zero()) {
        Some(zp_trim(q))
    } else {
        None
    }
}

fn symmetric(v: ZPoly, m: &BigInt) -> ZPoly {
    let half = m / BigInt::from(2);
    zp_trim(
        v.into_iter()
            .map(|c| {
                let c = c.mod_floor(m);
                if c > half {
                    c - m
                } else {
                    c
                }
            })
            .collect(),
    )
}

struct Combos {
    n: usize,
    idx: Vec<usize>,
    fresh: bool,
}

impl Combos {
    fn new(n: usize, k: usize) -> Self {
        Combos { n, idx: (0..k).collect(), fresh: true }
    }
}

impl Iterator for Combos {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let k = self.idx.len();
        if k > self.n {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            return Some(self.idx.clone());
        }
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if self.idx[i] < self.n - (k - i) {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return Some(self.idx.clone());
            }
        }
    }
}

fn primes_from_3() -> impl Iterator<Item = u64> {
    (3u64..).step_by(2).filter(|n| {
        let mut d = 3;
        while d * d <= *n {
            if n % d == 0 {
                return false;
            }
            d += 2;
        }
        true
    })
}

/// Factors a primitive squarefree integer polynomial with positive leading
/// coefficient into primitive irreducible integer polynomials.
fn zassenhaus(poly: &[BigInt]) -> Result<Vec<ZPoly>, FactorError> {
    let n = zp_deg(poly).expect("nonzero");
    if n == 1 {
        return Ok(vec![poly.to_vec()]);
    }
    let lc = poly.last().unwrap().clone();

    // Pick an odd prime keeping the degree and squarefreeness.
    let mut chosen: Option<(BigInt, ZPoly)> = None;
    for p_small in primes_from_3().take(4000) {
        let p = BigInt::from(p_small);
        if lc.mod_floor(&p).is_zero() {
            continue;
        }
        let fbar = mp_make_monic(&mp_reduce(poly, &p), &p);
        let deriv: ZPoly = zp_trim(
            fbar.iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| (c * BigInt::from(i)).mod_floor(&p))
                .collect(),
        );
        if deriv.is_empty() {
            continue;
        }
        if zp_deg(&mp_gcd(&fbar, &deriv, &p)) == Some(0) {
            chosen = Some((p, fbar));
            break;
        }
    }
    let (p, fbar) = chosen
        .ok_or_else(|| FactorError::Internal("no usable prime found".into()))?;

    let mut mod_factors = factor_modp(&fbar, &p)?;
    if mod_factors.len() == 1 {
        return Ok(vec![poly.to_vec()]);
    }
    mod_factors.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

    // Coefficient bound for lc-adjusted factors, then lift past twice it.
    let max_abs = poly.iter().map(|c| c.abs()).max().unwrap();
    let sqrt_part = BigInt::from(((n as f64) + 1.0).sqrt().ceil() as u64 + 1);
    let bound: BigInt = lc.abs() * (BigInt::one() << n) * sqrt_part * max_abs;
    let target: BigInt = BigInt::from(2) * &bound + BigInt::one();

    let mut tree = build_tree(&mod_factors, &p);
    let mut m = p.clone();
    while m < target {
        let m2 = &m * &m;
        let inv_lc = modinv(&lc, &m2)
            .ok_or_else(|| FactorError::Internal("leading coefficient not invertible".into()))?;
        let target_poly = mp_reduce(
            &poly.iter().map(|c| c * &inv_lc).collect::<Vec<_>>(),
            &m2,
        );
        lift_node(&mut tree, target_poly, &m2)?;
        m = m2;
    }
    let mut pool: Vec<ZPoly> = Vec::new();
    collect_leaves(&tree, &mut pool);

    // Subset recombination against the current remainder.
    let mut remainder = poly.to_vec();
    let mut out: Vec<ZPoly> = Vec::new();
    let mut tests = 0usize;
    let mut size = 1usize;
    while 2 * size <= pool.len() {
        let mut found: Option<(Vec<usize>, ZPoly, ZPoly)> = None;
        for combo in Combos::new(pool.len(), size) {
            tests += 1;
            if tests > RECOMBINATION_CAP {
                return Err(FactorError::Budget { cap: RECOMBINATION_CAP });
            }
            let lc_rem = remainder.last().unwrap().mod_floor(&m);
            let mut cand: ZPoly = vec![lc_rem];
            for &ix in &combo {
                cand = mp_mul(&cand, &pool[ix], &m);
            }
            let cand = z_primitive(symmetric(cand, &m));
            if zp_deg(&cand).map_or(true, |d| d == 0) {
                continue;
            }
            if let Some(q) = zdiv_exact(&remainder, &cand) {
                found = Some((combo, cand, z_primitive(q)));
                break;
            }
        }
        match found {
            Some((combo, cand, q)) => {
                out.push(cand);
                remainder = q;
                for &ix in combo.iter().rev() {
                    pool.remove(ix);
                }
            }
            None => size += 1,
        }
    }
    if zp_deg(&remainder).map_or(false, |d| d >= 1) {
        out.push(z_primitive(remainder));
    }
    Ok(out)
}
