//! Finite catalogs of parametric composition identities.
//!
//! For fixed shape `(l, ell, b_count)` consider `l`-term polynomials
//! `f = sum a_i x^(m_i)`, an outer polynomial `g = sum b_j t^j` of degree at
//! most `ell`, and a ratio of `b_count`-term polynomials `h1/h2`.  Clearing
//! denominators, `f = g(h1/h2)` becomes the vanishing of
//!
//! ```text
//!   h2^ell * f  -  sum_j b_j * h1^j * h2^(ell-j)
//! ```
//!
//! whose expansion is a fixed list of symbolic terms, each a coefficient
//! monomial times `x` raised to an integer linear form in the exponent
//! variables.  The expression vanishes identically exactly when the terms
//! split into groups of equal degree with each group's coefficients summing
//! to zero.  Enumerating set partitions of the term list therefore yields a
//! finite catalog: each surviving partition contributes a lattice of
//! admissible exponent vectors and a system of coefficient equations.
//! Partitions whose degree lattice forces two distinct groups to collide are
//! pruned; they reappear as the coarser partition that merges those groups.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::poly::{DensePoly, PolyError, SparsePoly, DEFAULT_TERM_CAP};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("identity has {terms} terms, above the partition guard {cap}; raise the guard to proceed")]
    SizeGuard { terms: usize, cap: usize },
    #[error("exponent variable {var} resolves to a negative value")]
    NegativeExponent { var: String },
    #[error("coefficient point violates the group equations: {0}")]
    PointNotOnVariety(String),
    #[error("no catalog entry matches the realized degree partition")]
    NotInCatalog,
    #[error("internal catalog failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

// ---------------------------------------------------------------------------
// Symbols and symbolic terms
// ---------------------------------------------------------------------------

/// Coefficient symbols of the master identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CoefSym {
    /// Coefficient of the `i`-th term of `f` (0-based).
    A(usize),
    /// Coefficient of `t^j` in the outer polynomial.
    B(usize),
    /// Coefficient of the `k`-th term of the numerator `h1`.
    C1(usize),
    /// Coefficient of the `k`-th term of the denominator `h2`.
    C2(usize),
}

impl std::fmt::Display for CoefSym {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoefSym::A(i) => write!(f, "a{}", i + 1),
            CoefSym::B(j) => write!(f, "b{}", j),
            CoefSym::C1(k) => write!(f, "c1_{}", k + 1),
            CoefSym::C2(k) => write!(f, "c2_{}", k + 1),
        }
    }
}

pub type Monomial = BTreeMap<CoefSym, u32>;

/// One term of the expanded master identity: a rational scalar, a monomial
/// in the coefficient symbols, and the exponent of `x` as an integer linear
/// form over the exponent variables (ordered `m_1..m_l`, `n1_1..n1_B`,
/// `n2_1..n2_B`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicTerm {
    pub scalar: BigRational,
    pub monomial: Monomial,
    pub degree: Vec<i64>,
}

/// Name of the exponent variable at position `v`, for messages.
fn var_name(l: usize, b_count: usize, v: usize) -> String {
    if v < l {
        format!("m{}", v + 1)
    } else if v < l + b_count {
        format!("n1_{}", v - l + 1)
    } else {
        format!("n2_{}", v - l - b_count + 1)
    }
}

/// Names of the exponent variables in catalog order.
pub fn variable_names(l: usize, b_count: usize) -> Vec<String> {
    (0..l + 2 * b_count).map(|v| var_name(l, b_count, v)).collect()
}

fn compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, parts - 1) {
            let mut c = vec![first];
            c.append(&mut rest);
            out.push(c);
        }
    }
    out
}

fn multinomial(total: u64, parts: &[u64]) -> BigInt {
    let mut remaining = total;
    let mut acc = BigUint::one();
    for &p in parts {
        acc *= binomial_uint(remaining, p);
        remaining -= p;
    }
    BigInt::from(acc)
}

fn binomial_uint(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= BigUint::from(n - i);
        den *= BigUint::from(i + 1);
    }
    num / den
}

/// Expands `h2^ell * f - sum_j b_j h1^j h2^(ell-j)` into symbolic terms,
/// in a fixed order: the `f` block first, then `j = 0..=ell`.
pub fn expand_master_identity(l: usize, ell: usize, b_count: usize) -> Vec<SymbolicTerm> {
    let dim = l + 2 * b_count;
    let var_m = |i: usize| i;
    let var_n1 = |k: usize| l + k;
    let var_n2 = |k: usize| l + b_count + k;
    let mut terms = Vec::new();
    for i in 0..l {
        for comp in compositions(ell as u64, b_count) {
            let mut monomial = Monomial::new();
            monomial.insert(CoefSym::A(i), 1);
            let mut degree = vec![0i64; dim];
            degree[var_m(i)] = 1;
            for (k, &pow) in comp.iter().enumerate() {
                if pow > 0 {
                    monomial.insert(CoefSym::C2(k), pow as u32);
                    degree[var_n2(k)] += pow as i64;
                }
            }
            terms.push(SymbolicTerm {
                scalar: BigRational::from_integer(multinomial(ell as u64, &comp)),
                monomial,
                degree,
            });
        }
    }
    for j in 0..=ell {
        for comp1 in compositions(j as u64, b_count) {
            for comp2 in compositions((ell - j) as u64, b_count) {
                let mut monomial = Monomial::new();
                monomial.insert(CoefSym::B(j), 1);
                let mut degree = vec![0i64; dim];
                for (k, &pow) in comp1.iter().enumerate() {
                    if pow > 0 {
                        monomial.insert(CoefSym::C1(k), pow as u32);
                        degree[var_n1(k)] += pow as i64;
                    }
                }
                for (k, &pow) in comp2.iter().enumerate() {
                    if pow > 0 {
                        monomial.insert(CoefSym::C2(k), pow as u32);
                        degree[var_n2(k)] += pow as i64;
                    }
                }
                let scalar = -(multinomial(j as u64, &comp1) * multinomial((ell - j) as u64, &comp2));
                terms.push(SymbolicTerm {
                    scalar: BigRational::from_integer(scalar),
                    monomial,
                    degree,
                });
            }
        }
    }
    terms
}

// ---------------------------------------------------------------------------
// Integer kernels
// ---------------------------------------------------------------------------

/// Saturated basis of `{ u : row . u = 0 for every row }` inside the integer
/// lattice, via unimodular column reduction.
fn integer_kernel(rows: &[Vec<i64>], dim: usize) -> Vec<Vec<i64>> {
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut u: Vec<Vec<i128>> = (0..dim)
        .map(|i| (0..dim).map(|j| i128::from(i == j)).collect())
        .collect();
    // u is kept as a list of columns; column ops act on both a and u.
    let nrows = a.len();
    let mut fixed = 0usize;
    for r in 0..nrows {
        loop {
            let pivot = (fixed..dim)
                .filter(|&c| a[r][c] != 0)
                .min_by_key(|&c| a[r][c].unsigned_abs());
            let Some(p) = pivot else { break };
            for row in a.iter_mut() {
                row.swap(fixed, p);
            }
            u.swap(fixed, p);
            let mut done = true;
            for c in fixed + 1..dim {
                if a[r][c] == 0 {
                    continue;
                }
                let q = a[r][c].div_euclid(a[r][fixed]);
                if q != 0 {
                    for row in a.iter_mut() {
                        let s = row[fixed];
                        row[c] -= q * s;
                    }
                    for v in 0..dim {
                        let s = u[fixed][v];
                        u[c][v] -= q * s;
                    }
                }
                if a[r][c] != 0 {
                    done = false;
                }
            }
            if done {
                fixed += 1;
                break;
            }
        }
        if fixed == dim {
            break;
        }
    }
    let mut basis: Vec<Vec<i64>> = Vec::new();
    for c in fixed..dim {
        let mut v: Vec<i64> = u[c].iter().map(|&x| x.try_into().expect("small entries")).collect();
        if let Some(first) = v.iter().find(|&&x| x != 0) {
            if *first < 0 {
                for x in &mut v {
                    *x = -*x;
                }
            }
        }
        basis.push(v);
    }
    basis
}

/// Solves `sum_j coords[j] * basis[j] = w` exactly; the basis vectors are
/// linearly independent, so the solution is unique when it exists, and
/// `None` means `w` is outside the rational span or has fractional
/// coordinates.
fn solve_in_basis(basis: &[Vec<i64>], w: &[i64]) -> Option<Vec<i64>> {
    let p = basis.len();
    let dim = w.len();
    if p == 0 {
        return if w.iter().all(|&x| x == 0) { Some(Vec::new()) } else { None };
    }
    let mut aug: Vec<Vec<BigRational>> = (0..dim)
        .map(|v| {
            (0..p)
                .map(|j| BigRational::from_integer(BigInt::from(basis[j][v])))
                .chain(std::iter::once(BigRational::from_integer(BigInt::from(w[v]))))
                .collect()
        })
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0usize;
    for col in 0..p {
        let Some(pr) = (row..dim).find(|&r| !aug[r][col].is_zero()) else { continue };
        aug.swap(row, pr);
        let inv = BigRational::one() / aug[row][col].clone();
        for c in col..=p {
            aug[row][c] = &aug[row][c] * &inv;
        }
        for r in 0..dim {
            if r != row && !aug[r][col].is_zero() {
                let factor = aug[r][col].clone();
                for c in col..=p {
                    let delta = &factor * &aug[row][c];
                    aug[r][c] = &aug[r][c] - delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == dim {
            break;
        }
    }
    // consistency of the remaining rows
    for r in row..dim {
        if !aug[r][p].is_zero() {
            return None;
        }
    }
    if pivots.len() < p {
        // dependent basis never happens for kernels produced here
        return None;
    }
    let mut coords = Vec::with_capacity(p);
    for (r, _col) in pivots.iter().enumerate() {
        let val = aug[r][p].clone();
        if !val.is_integer() {
            return None;
        }
        coords.push(i64::try_from(val.to_integer()).ok()?);
    }
    Some(coords)
}

// ---------------------------------------------------------------------------
// Catalog structure
// ---------------------------------------------------------------------------

/// Admissible exponent vectors of one catalog entry: all integer
/// combinations of the basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentLattice {
    pub dim: usize,
    pub basis: Vec<Vec<i64>>,
}

impl ExponentLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Resolves lattice coordinates to an exponent vector.
    pub fn point(&self, u: &[i64]) -> Result<Vec<i64>, CatalogError> {
        if u.len() != self.basis.len() {
            return Err(CatalogError::InvalidInput(format!(
                "expected {} lattice coordinates, got {}",
                self.basis.len(),
                u.len()
            )));
        }
        let mut w = vec![0i128; self.dim];
        for (j, coord) in u.iter().enumerate() {
            for v in 0..self.dim {
                w[v] += i128::from(*coord) * i128::from(self.basis[j][v]);
            }
        }
        w.into_iter()
            .map(|x| {
                i64::try_from(x).map_err(|_| {
                    CatalogError::InvalidInput("exponent overflows the supported range".into())
                })
            })
            .collect()
    }
}

/// One group equation: the listed coefficient monomials sum to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffEquation {
    pub terms: Vec<(BigRational, Monomial)>,
    /// Whether the group contains a term of `f`, in which case the equation
    /// defines that coefficient of `f` instead of constraining `g` and `h`.
    pub defines_f_coeff: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffSystem {
    pub equations: Vec<CoeffEquation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    /// Groups of term indices with a common degree; groups are ordered by
    /// their smallest member and members ascend.
    pub partition: Vec<Vec<usize>>,
    pub lattice: ExponentLattice,
    pub coeff_system: CoeffSystem,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    pub l: usize,
    pub ell: usize,
    pub b_count: usize,
    pub terms: Vec<SymbolicTerm>,
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn dim(&self) -> usize {
        self.l + 2 * self.b_count
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CatalogOptions {
    /// Partition enumeration is refused above this many identity terms.
    pub max_terms: usize,
}

impl Default for CatalogOptions {
    fn default() -> Self {
        CatalogOptions { max_terms: 12 }
    }
}

fn next_rgs(a: &mut [usize]) -> bool {
    for t in (1..a.len()).rev() {
        let max_prev = a[..t].iter().copied().max().unwrap_or(0);
        if a[t] <= max_prev {
            a[t] += 1;
            for s in t + 1..a.len() {
                a[s] = 0;
            }
            return true;
        }
    }
    false
}

/// Builds the full catalog for the shape `(l, ell, b_count)`.
pub fn enumerate_catalog(
    l: usize,
    ell: usize,
    b_count: usize,
    opts: &CatalogOptions,
) -> Result<Catalog, CatalogError> {
    if l == 0 || ell == 0 || b_count == 0 {
        return Err(CatalogError::InvalidInput(
            "term counts and outer degree must be positive".into(),
        ));
    }
    let terms = expand_master_identity(l, ell, b_count);
    let t_count = terms.len();
    if t_count > opts.max_terms {
        return Err(CatalogError::SizeGuard { terms: t_count, cap: opts.max_terms });
    }
    let dim = l + 2 * b_count;
    let mut entries = Vec::new();
    let mut rgs = vec![0usize; t_count];
    loop {
        let group_count = rgs.iter().copied().max().unwrap_or(0) + 1;
        let mut partition: Vec<Vec<usize>> = vec![Vec::new(); group_count];
        for (t, &g) in rgs.iter().enumerate() {
            partition[g].push(t);
        }
        // Degree rows: within a group every term matches the first.
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for group in &partition {
            let base = &terms[group[0]].degree;
            for &t in &group[1..] {
                let row: Vec<i64> = base
                    .iter()
                    .zip(&terms[t].degree)
                    .map(|(a, b)| a - b)
                    .collect();
                rows.push(row);
            }
        }
        let basis = integer_kernel(&rows, dim);
        if !basis.is_empty() {
            // Prune partitions whose lattice forces two groups to share a
            // degree; the coarser partition covers those.
            let mut generic = true;
            'pairs: for gi in 0..group_count {
                for gj in gi + 1..group_count {
                    let diff: Vec<i64> = terms[partition[gi][0]]
                        .degree
                        .iter()
                        .zip(&terms[partition[gj][0]].degree)
                        .map(|(a, b)| a - b)
                        .collect();
                    let vanishes = basis.iter().all(|v| {
                        v.iter()
                            .zip(&diff)
                            .map(|(x, w)| i128::from(*x) * i128::from(*w))
                            .sum::<i128>()
                            == 0
                    });
                    if vanishes {
                        generic = false;
                        break 'pairs;
                    }
                }
            }
            if generic {
                let equations = partition
                    .iter()
                    .map(|group| CoeffEquation {
                        terms: group
                            .iter()
                            .map(|&t| (terms[t].scalar.clone(), terms[t].monomial.clone()))
                            .collect(),
                        defines_f_coeff: group
                            .iter()
                            .any(|&t| terms[t].monomial.keys().any(|s| matches!(s, CoefSym::A(_)))),
                    })
                    .collect();
                entries.push(CatalogEntry {
                    partition,
                    lattice: ExponentLattice { dim, basis },
                    coeff_system: CoeffSystem { equations },
                });
            }
        }
        if !next_rgs(&mut rgs) {
            break;
        }
    }
    Ok(Catalog { l, ell, b_count, terms, entries })
}

// ---------------------------------------------------------------------------
// Instantiation and lookup
// ---------------------------------------------------------------------------

/// Concrete values for the coefficient symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub a: Vec<BigRational>,
    pub b: Vec<BigRational>,
    pub c1: Vec<BigRational>,
    pub c2: Vec<BigRational>,
}

impl Assignment {
    fn value(&self, sym: &CoefSym) -> Option<&BigRational> {
        match sym {
            CoefSym::A(i) => self.a.get(*i),
            CoefSym::B(j) => self.b.get(*j),
            CoefSym::C1(k) => self.c1.get(*k),
            CoefSym::C2(k) => self.c2.get(*k),
        }
    }

    fn eval_monomial(&self, mono: &Monomial) -> Result<BigRational, CatalogError> {
        let mut acc = BigRational::one();
        for (sym, pow) in mono {
            let v = self.value(sym).ok_or_else(|| {
                CatalogError::InvalidInput(format!("assignment is missing {}", sym))
            })?;
            for _ in 0..*pow {
                acc *= v;
            }
        }
        Ok(acc)
    }
}

fn check_equations(
    entry: &CatalogEntry,
    point: &Assignment,
) -> Result<(), CatalogError> {
    for (gi, eq) in entry.coeff_system.equations.iter().enumerate() {
        let mut sum = BigRational::zero();
        for (scalar, mono) in &eq.terms {
            sum += scalar * point.eval_monomial(mono)?;
        }
        if !sum.is_zero() {
            return Err(CatalogError::PointNotOnVariety(format!(
                "group {} sums to {}",
                gi, sum
            )));
        }
    }
    Ok(())
}

/// A fully resolved identity instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instantiated {
    pub f: SparsePoly,
    pub h1: SparsePoly,
    pub h2: SparsePoly,
    pub g: DensePoly,
    /// Resolved exponent variables, in catalog variable order.
    pub exponents: Vec<i64>,
    /// True when `h2` is a nonzero constant, so `f = g(h1/h2)` composes
    /// through an honest polynomial.
    pub polynomial_composition: bool,
}

fn build_sparse(
    coeffs: &[BigRational],
    exps: &[i64],
    l: usize,
    b_count: usize,
    offset: usize,
) -> Result<SparsePoly, CatalogError> {
    let mut terms = Vec::new();
    for (k, c) in coeffs.iter().enumerate() {
        let e = exps[offset + k];
        if e < 0 {
            return Err(CatalogError::NegativeExponent {
                var: var_name(l, b_count, offset + k),
            });
        }
        terms.push((BigUint::from(e as u64), c.clone()));
    }
    Ok(SparsePoly::from_terms(terms))
}

/// Realizes one catalog entry at a coefficient point and lattice
/// coordinates, verifying the identity exactly.
pub fn instantiate(
    catalog: &Catalog,
    entry: &CatalogEntry,
    point: &Assignment,
    u: &[i64],
) -> Result<Instantiated, CatalogError> {
    if point.a.len() != catalog.l
        || point.b.len() != catalog.ell + 1
        || point.c1.len() != catalog.b_count
        || point.c2.len() != catalog.b_count
    {
        return Err(CatalogError::InvalidInput(
            "assignment sizes do not match the catalog shape".into(),
        ));
    }
    let exps = entry.lattice.point(u)?;
    for (v, &e) in exps.iter().enumerate() {
        if e < 0 {
            return Err(CatalogError::NegativeExponent {
                var: var_name(catalog.l, catalog.b_count, v),
            });
        }
    }
    check_equations(entry, point)?;

    let f = build_sparse(&point.a, &exps, catalog.l, catalog.b_count, 0)?;
    let h1 = build_sparse(&point.c1, &exps, catalog.l, catalog.b_count, catalog.l)?;
    let h2 = build_sparse(
        &point.c2,
        &exps,
        catalog.l,
        catalog.b_count,
        catalog.l + catalog.b_count,
    )?;
    let g = DensePoly::from_coeffs(point.b.clone())?;

    // Residual check: h2^ell * f - sum_j b_j h1^j h2^(ell-j) must vanish.
    let mut residual = h2.pow_capped(catalog.ell, DEFAULT_TERM_CAP)?.mul_capped(&f, DEFAULT_TERM_CAP)?;
    for (j, bj) in point.b.iter().enumerate() {
        if bj.is_zero() {
            continue;
        }
        let part = h1
            .pow_capped(j, DEFAULT_TERM_CAP)?
            .mul_capped(&h2.pow_capped(catalog.ell - j, DEFAULT_TERM_CAP)?, DEFAULT_TERM_CAP)?
            .scale(bj);
        residual = residual.sub(&part);
    }
    if !residual.is_zero() {
        return Err(CatalogError::Internal(
            "instantiated identity does not vanish".into(),
        ));
    }
    let polynomial_composition = !h2.is_zero() && h2.is_constant();
    Ok(Instantiated { f, h1, h2, g, exponents: exps, polynomial_composition })
}

/// Concrete exponent data accompanying an assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteExponents {
    pub m: Vec<i64>,
    pub n1: Vec<i64>,
    pub n2: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Located {
    pub entry_index: usize,
    pub u: Vec<i64>,
}

/// Finds the catalog entry realized by a concrete identity: terms are
/// grouped by their realized degree, the matching partition is looked up,
/// and the exponent vector is expressed in the entry's lattice basis.
pub fn locate(
    catalog: &Catalog,
    point: &Assignment,
    exps: &ConcreteExponents,
) -> Result<Located, CatalogError> {
    if exps.m.len() != catalog.l
        || exps.n1.len() != catalog.b_count
        || exps.n2.len() != catalog.b_count
    {
        return Err(CatalogError::InvalidInput(
            "exponent sizes do not match the catalog shape".into(),
        ));
    }
    let mut w: Vec<i64> = Vec::with_capacity(catalog.dim());
    w.extend_from_slice(&exps.m);
    w.extend_from_slice(&exps.n1);
    w.extend_from_slice(&exps.n2);
    if w.iter().all(|&x| x == 0) {
        return Err(CatalogError::InvalidInput(
            "all exponents are zero; the identity is degenerate".into(),
        ));
    }

    // Group terms by realized degree, preserving first-seen order so the
    // partition comes out in canonical form.
    let mut groups: Vec<(i64, Vec<usize>)> = Vec::new();
    for (t, term) in catalog.terms.iter().enumerate() {
        let deg: i64 = term
            .degree
            .iter()
            .zip(&w)
            .map(|(c, x)| c * x)
            .sum();
        match groups.iter_mut().find(|(d, _)| *d == deg) {
            Some((_, members)) => members.push(t),
            None => groups.push((deg, vec![t])),
        }
    }
    let partition: Vec<Vec<usize>> = groups.into_iter().map(|(_, g)| g).collect();

    let entry_index = catalog
        .entries
        .iter()
        .position(|e| e.partition == partition)
        .ok_or(CatalogError::NotInCatalog)?;
    let entry = &catalog.entries[entry_index];
    let u = solve_in_basis(&entry.lattice.basis, &w).ok_or_else(|| {
        CatalogError::Internal("realized exponents are outside the entry lattice".into())
    })?;
    check_equations(entry, point)?;
    Ok(Located { entry_index, u })
}
