//! End-to-end acceptance checks.  Each criterion prints one PASS/FAIL line;
//! all sample sizes, degree ranges, and budgets are pinned below so the run
//! is reproducible bit for bit.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lacunary::catalog::{self, Assignment, CatalogOptions, ConcreteExponents};
use lacunary::decompose::{self, DecomposeError, DecomposeOptions};
use lacunary::poly::{compose_outer, DensePoly, SparsePoly, DEFAULT_TERM_CAP};
use lacunary::series::{self, SeriesError, TruncatedSeries};
use lacunary::wronskian::{self, RatFunc};

const SEED: u64 = 0x1ac0_9a17_5eed_0001;

// criterion 1
const C1_EXHAUSTIVE_MAX_DEG: u64 = 48;
const C1_SAMPLED_L3: usize = 600;
const C1_SAMPLED_L3_MAX_DEG: u64 = 120;
const C1_SAMPLED_L4: usize = 600;
const C1_SAMPLED_L4_MAX_DEG: u64 = 200;
const C1_ORACLE_SAMPLES: usize = 1500;
const C1_ORACLE_MAX_DEG: usize = 24;
const C1_SERIES_BUDGET: usize = 500_000;
const C1_DIVISION_CAP: usize = 10_000;

// criterion 2
const C2_PAIRS: usize = 300;
const C2_MAX_INNER_EXP: u64 = 10_000;

// criterion 3
const C3_RANDOM: usize = 400;
const C3_COMPOSED: usize = 100;
const C3_MAX_DEG: usize = 48;

// criterion 4
const C4_TUPLES: usize = 200;
const C4_MAX_DEG: usize = 8;

// criterion 5
const C5_POWS: usize = 200;
const C5_MAX_ORDER: u64 = 40;
const C5_SPLITS: usize = 100;
const C5_PUISEUX: usize = 100;

// criterion 6
const C6_INSTANTIATIONS: usize = 100;
const C6_LOCATES: usize = 50;

// criterion 7
const C7_BOX: u64 = 12;

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn nonzero(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> i64 {
    loop {
        let x = rng.gen_range(lo..=hi);
        if x != 0 {
            return x;
        }
    }
}

fn sparse(terms: &[(u64, BigRational)]) -> SparsePoly {
    SparsePoly::from_terms(terms.iter().map(|(e, c)| (BigUint::from(*e), c.clone())))
}

fn report(criterion: usize, label: &str, failures: &[String]) {
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {} ({}): {}", criterion, label, verdict);
    assert!(
        failures.is_empty(),
        "criterion {} failed with {} cases, first: {}",
        criterion,
        failures.len(),
        failures[0]
    );
}

// ---------------------------------------------------------------------------
// criterion 1: the outer degree bound for non-monomial inner polynomials
// ---------------------------------------------------------------------------

fn degree_bound(l: usize) -> u64 {
    2 * (l as u64) * (l as u64 + 1)
}

/// Sweeps every divisor of the degree with no pruning at all, recovering
/// decompositions through the unique normal-form candidate, and records a
/// failure if any with a non-monomial inner exceeds the bound.  Returns the
/// number of decompositions found so the sweep can be shown non-vacuous.
fn check_bound(f: &SparsePoly, failures: &mut Vec<String>) -> usize {
    let mut found = 0;
    let l = f.term_count();
    let m = f.degree().and_then(|m| m.to_u64()).expect("bounded degree");
    for d in 2..=m / 2 {
        if m % d != 0 {
            continue;
        }
        let candidate = match decompose::sparse_root_candidate(f, d, C1_SERIES_BUDGET) {
            Ok(Some(h)) => h,
            Ok(None) => continue,
            Err(DecomposeError::Budget { .. }) => continue,
            Err(e) => {
                failures.push(format!("candidate failure for {} at d = {}: {}", f, d, e));
                continue;
            }
        };
        if candidate.is_monomial() {
            continue;
        }
        match decompose::recover_outer(f, &candidate, C1_DIVISION_CAP) {
            Ok(Some(_)) => {
                found += 1;
                if d > degree_bound(l) {
                    failures.push(format!(
                        "{} = g(h) with deg g = {} > {} (l = {})",
                        f,
                        d,
                        degree_bound(l),
                        l
                    ));
                }
            }
            Ok(None) => {}
            Err(e) => failures.push(format!("recovery failure for {} at d = {}: {}", f, d, e)),
        }
    }
    found
}

#[test]
fn criterion_1_outer_degree_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let mut failures = Vec::new();

    // exhaustive exponent patterns with 1..=3 terms up to the degree cap,
    // each tried with unit coefficients and one random coefficient vector
    let mut patterns: Vec<Vec<u64>> = Vec::new();
    for e1 in 1..=C1_EXHAUSTIVE_MAX_DEG {
        patterns.push(vec![e1]);
    }
    for e1 in 1..=C1_EXHAUSTIVE_MAX_DEG {
        for e2 in 0..e1 {
            patterns.push(vec![e1, e2]);
        }
    }
    for e1 in 2..=C1_EXHAUSTIVE_MAX_DEG {
        for e2 in 1..e1 {
            for e3 in 0..e2 {
                patterns.push(vec![e1, e2, e3]);
            }
        }
    }
    let mut found = 0usize;
    for pattern in &patterns {
        let unit: Vec<(u64, BigRational)> = pattern.iter().map(|&e| (e, rat(1))).collect();
        found += check_bound(&sparse(&unit), &mut failures);
        let random: Vec<(u64, BigRational)> = pattern
            .iter()
            .map(|&e| (e, rat(nonzero(&mut rng, -4, 4))))
            .collect();
        found += check_bound(&sparse(&random), &mut failures);
    }

    // squares of random binomials land inside the exhaustive pattern range,
    // so the sweep must have seen decompositions with a non-monomial inner
    if found < 5 {
        failures.push(format!("exhaustive sweep found only {} decompositions", found));
    }

    // sampled patterns at degrees where the bound has real bite
    for (count, terms, max_deg) in [
        (C1_SAMPLED_L3, 3usize, C1_SAMPLED_L3_MAX_DEG),
        (C1_SAMPLED_L4, 4usize, C1_SAMPLED_L4_MAX_DEG),
    ] {
        for _ in 0..count {
            let mut exps = BTreeSet::new();
            exps.insert(rng.gen_range(terms as u64..=max_deg));
            while exps.len() < terms {
                exps.insert(rng.gen_range(0..*exps.iter().max().unwrap()));
            }
            let f: Vec<(u64, BigRational)> = exps
                .iter()
                .rev()
                .map(|&e| (e, rat(nonzero(&mut rng, -4, 4))))
                .collect();
            check_bound(&sparse(&f), &mut failures);
        }
    }

    // independent dense cross-check on a sample of small-degree patterns
    for _ in 0..C1_ORACLE_SAMPLES {
        let deg = rng.gen_range(4..=C1_ORACLE_MAX_DEG);
        let l = rng.gen_range(1..=3usize);
        let mut exps = BTreeSet::new();
        exps.insert(deg as u64);
        while exps.len() < l {
            exps.insert(rng.gen_range(0..deg as u64));
        }
        let mut coeffs = vec![BigRational::zero(); deg + 1];
        for &e in &exps {
            coeffs[e as usize] = rat(nonzero(&mut rng, -4, 4));
        }
        let f = DensePoly::from_coeffs(coeffs).unwrap();
        match decompose::dense_decompose_oracle(&f) {
            Ok(found) => {
                for (g, h) in found {
                    if h.to_sparse().is_monomial() {
                        continue;
                    }
                    let d = g.degree().unwrap() as u64;
                    if d > degree_bound(l) {
                        failures.push(format!(
                            "oracle: {} = g(h) with deg g = {} > {} (l = {})",
                            f,
                            d,
                            degree_bound(l),
                            l
                        ));
                    }
                }
            }
            Err(e) => failures.push(format!("oracle failure for {}: {}", f, e)),
        }
    }

    report(1, "outer degree bound", &failures);
}

// ---------------------------------------------------------------------------
// criterion 2: exact recovery of random compositions with large exponents
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_exact_recovery() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let mut failures = Vec::new();

    for case in 0..C2_PAIRS {
        let deg_g = rng.gen_range(2..=6usize);
        let mut g_coeffs: Vec<BigRational> =
            (0..deg_g).map(|_| rat(rng.gen_range(-5..=5))).collect();
        g_coeffs.push(rat(nonzero(&mut rng, -5, 5)));
        let g = DensePoly::from_coeffs(g_coeffs).unwrap();

        // leading exponent spread over four decades up to the cap
        let decade = rng.gen_range(1..=4u32);
        let lo = 10u64.pow(decade - 1).max(10);
        let hi = 10u64.pow(decade).min(C2_MAX_INNER_EXP);
        // middle exponents stay at or below E/2 so the reversed series has
        // large gaps and a sparse reachable set; this keeps exact arithmetic
        // small even at four-digit exponents
        let e_lead = rng.gen_range(lo..=hi);
        let mid_count = rng.gen_range(1..=3usize).min(e_lead as usize / 2);
        let mut mids = BTreeSet::new();
        while mids.len() < mid_count {
            mids.insert(rng.gen_range(1..=e_lead / 2));
        }
        let mut h_terms = vec![(e_lead, rat(1))];
        for &e in &mids {
            h_terms.push((e, rat(nonzero(&mut rng, -5, 5))));
        }
        let h = sparse(&h_terms);

        let f = compose_outer(&g, &h, DEFAULT_TERM_CAP).unwrap();
        let outcome =
            decompose::sparse_decompose(&f, &DecomposeOptions::default()).unwrap();
        let found = outcome
            .results
            .iter()
            .any(|r| r.divisor_d == deg_g as u64 && r.inner == h && r.outer == g);
        if !found {
            failures.push(format!(
                "case {}: deg g = {}, deg h = {} not recovered (diagnostics: {:?})",
                case,
                deg_g,
                e_lead,
                outcome.diagnostics
            ));
        }
    }

    report(2, "exact recovery of sparse compositions", &failures);
}

// ---------------------------------------------------------------------------
// criterion 3: verdict agreement with the dense search
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_dense_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    let mut failures = Vec::new();

    let mut polys: Vec<DensePoly> = Vec::new();
    for _ in 0..C3_RANDOM {
        let deg = rng.gen_range(4..=C3_MAX_DEG);
        let mut coeffs: Vec<BigRational> =
            (0..deg).map(|_| rat(rng.gen_range(-3..=3))).collect();
        coeffs.push(rat(nonzero(&mut rng, -3, 3)));
        polys.push(DensePoly::from_coeffs(coeffs).unwrap());
    }
    for _ in 0..C3_COMPOSED {
        let (dg, dh) = loop {
            let dg = rng.gen_range(2..=6usize);
            let dh = rng.gen_range(2..=8usize);
            if dg * dh <= C3_MAX_DEG {
                break (dg, dh);
            }
        };
        let mut g_coeffs: Vec<BigRational> =
            (0..dg).map(|_| rat(rng.gen_range(-3..=3))).collect();
        g_coeffs.push(rat(nonzero(&mut rng, -3, 3)));
        let mut h_coeffs: Vec<BigRational> =
            (0..dh).map(|_| rat(rng.gen_range(-3..=3))).collect();
        h_coeffs.push(rat(nonzero(&mut rng, -3, 3)));
        let g = DensePoly::from_coeffs(g_coeffs).unwrap();
        let h = DensePoly::from_coeffs(h_coeffs).unwrap();
        polys.push(g.compose_dense(&h));
    }

    for f in &polys {
        let dense_found = match decompose::dense_decompose_oracle(f) {
            Ok(list) => !list.is_empty(),
            Err(e) => {
                failures.push(format!("oracle failed on {}: {}", f, e));
                continue;
            }
        };
        let sparse_found = match decompose::sparse_decompose(
            &f.to_sparse(),
            &DecomposeOptions::default(),
        ) {
            Ok(outcome) => {
                if !outcome.diagnostics.is_empty() {
                    failures.push(format!("unexpected diagnostics on {}", f));
                    continue;
                }
                decompose::has_proper(&outcome)
            }
            Err(e) => {
                failures.push(format!("sparse search failed on {}: {}", f, e));
                continue;
            }
        };
        if dense_found != sparse_found {
            failures.push(format!(
                "verdict split on {}: dense {}, sparse {}",
                f, dense_found, sparse_found
            ));
        }
    }

    report(3, "sparse/dense verdict agreement", &failures);
}

// ---------------------------------------------------------------------------
// criterion 4: order sums and the height inequality
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_wronskian_reports() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let mut failures = Vec::new();

    let random_poly = |rng: &mut ChaCha8Rng, max_deg: usize| -> DensePoly {
        loop {
            let deg = rng.gen_range(0..=max_deg);
            let coeffs: Vec<BigRational> =
                (0..=deg).map(|_| rat(rng.gen_range(-3..=3))).collect();
            let p = DensePoly::from_coeffs(coeffs).unwrap();
            if !p.is_zero() {
                return p;
            }
        }
    };

    let mut done = 0usize;
    let mut attempts = 0usize;
    while done < C4_TUPLES {
        attempts += 1;
        assert!(attempts < C4_TUPLES * 50, "resampling failed to converge");
        let n = rng.gen_range(2..=4usize);
        // the Wronskian numerator degree grows like n^2 * deg, so larger
        // tuples get lower-degree entries to keep factoring affordable
        let max_deg = C4_MAX_DEG / (n - 1);
        let mut fns = Vec::with_capacity(n);
        for _ in 0..n {
            let num = random_poly(&mut rng, max_deg);
            let den = random_poly(&mut rng, max_deg);
            fns.push(RatFunc::new(num, den).unwrap());
        }

        let report = match wronskian::wronskian_order_sum(&fns) {
            Ok(r) => r,
            Err(wronskian::WronskianError::Dependent) => continue,
            Err(e) => {
                failures.push(format!("order sum failed: {}", e));
                continue;
            }
        };
        let pairs = (n as i64) * (n as i64 - 1) / 2;
        if report.total != -2 * pairs {
            failures.push(format!(
                "order total {} for n = {}, expected {}",
                report.total,
                n,
                -2 * pairs
            ));
        }

        let r = rng.gen_range(1..=n);
        let places = match wronskian::required_places(&fns, r) {
            Ok(p) => p,
            Err(e) => {
                failures.push(format!("required places failed: {}", e));
                continue;
            }
        };
        match wronskian::verify_prop1(&fns, r, &places) {
            Ok(p) => {
                if !p.holds {
                    failures.push(format!(
                        "height inequality violated: lhs {} > rhs {}",
                        p.lhs, p.rhs
                    ));
                }
            }
            Err(wronskian::WronskianError::InvalidInput(_)) => continue, // zero sum
            Err(e) => failures.push(format!("inequality check failed: {}", e)),
        }
        done += 1;
    }

    report4(&failures);
}

fn report4(failures: &[String]) {
    report(4, "Wronskian order sums and height bound", failures);
}

// ---------------------------------------------------------------------------
// criterion 5: series engines agree with their defining identities
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_series_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let mut failures = Vec::new();

    // fractional powers re-raised to integer powers
    for case in 0..C5_POWS {
        let order = rng.gen_range(4..=C5_MAX_ORDER);
        let tail = rng.gen_range(1..=4usize);
        let mut terms = vec![(0u64, BigRational::one())];
        for _ in 0..tail {
            terms.push((rng.gen_range(1..order), rat(nonzero(&mut rng, -3, 3))));
        }
        let fs = TruncatedSeries::from_terms(order, terms.clone());
        let s = nonzero(&mut rng, -5, 5);
        let d = rng.gen_range(1..=5u64);
        match series::pow_fractional(&fs, s, d, order) {
            Ok(root) => {
                let lhs = root.pow_int(d);
                let rhs = if s >= 0 {
                    fs.truncate(root.order()).pow_int(s as u64)
                } else {
                    match fs.truncate(root.order()).invert() {
                        Ok(inv) => inv.pow_int(s.unsigned_abs()),
                        Err(e) => {
                            failures.push(format!("case {}: invert failed: {}", case, e));
                            continue;
                        }
                    }
                };
                if lhs != rhs {
                    failures.push(format!("case {}: root^d disagrees with f^s", case));
                }
            }
            Err(e) => failures.push(format!("case {}: power failed: {}", case, e)),
        }
    }

    // delta splits (the library re-expands and compares internally; an Ok
    // return is the guarantee, shape checks are on top)
    for case in 0..C5_SPLITS {
        let order = rng.gen_range(6..=C5_MAX_ORDER);
        let tail_count = rng.gen_range(2..=5usize);
        let mut exps = BTreeSet::new();
        while exps.len() < tail_count {
            exps.insert(rng.gen_range(1..order));
        }
        let mut terms = vec![(0u64, BigRational::one())];
        for &e in &exps {
            terms.push((e, rat(nonzero(&mut rng, -3, 3))));
        }
        let fs = TruncatedSeries::from_terms(order, terms.clone());
        let p = rng.gen_range(1..=tail_count.min(2));
        let delta = TruncatedSeries::from_terms(
            order,
            terms.iter().take(1 + p).cloned(),
        );
        let s = nonzero(&mut rng, -3, 3);
        let d = rng.gen_range(1..=4u64);
        match series::delta_split_expand(&fs, p, &delta, s, d, order) {
            Ok(parts) => {
                if parts.is_empty() {
                    failures.push(format!("split case {}: empty expansion", case));
                }
                if parts.windows(2).any(|w| (w[0].y_exp, w[0].k) > (w[1].y_exp, w[1].k)) {
                    failures.push(format!("split case {}: unsorted output", case));
                }
            }
            Err(e) => failures.push(format!("split case {}: {}", case, e)),
        }
    }

    // inverse expansions at infinity, including non-monic leading terms
    for case in 0..C5_PUISEUX {
        let d = rng.gen_range(2..=5usize);
        let root = match rng.gen_range(0..4) {
            0 => rat(2),
            1 => frac(1, 2),
            2 => rat(3),
            _ => rat(1),
        };
        let mut lead = BigRational::one();
        for _ in 0..d {
            lead *= &root;
        }
        let lead_inv_root = BigRational::one() / &root;
        let mut coeffs: Vec<BigRational> =
            (0..d).map(|_| rat(rng.gen_range(-3..=3))).collect();
        coeffs.push(lead);
        let g = DensePoly::from_coeffs(coeffs).unwrap();
        let count = rng.gen_range(2..=6usize);
        match series::puiseux_inverse_at_infinity(&g, count) {
            Ok(tail) => {
                if tail.coeffs().len() != count {
                    failures.push(format!("inverse case {}: wrong length", case));
                } else if tail.coeffs()[0] != lead_inv_root {
                    failures.push(format!(
                        "inverse case {}: leading coefficient {} != {}",
                        case,
                        tail.coeffs()[0],
                        lead_inv_root
                    ));
                }
            }
            Err(e) => failures.push(format!("inverse case {}: {}", case, e)),
        }
    }

    // leading coefficients without rational roots are refused
    let g = DensePoly::from_ints(&[1, 0, 2]);
    if !matches!(
        series::puiseux_inverse_at_infinity(&g, 3),
        Err(SeriesError::Normalization)
    ) {
        failures.push("irrational leading root was not refused".into());
    }

    report(5, "series expansion identities", &failures);
}

// ---------------------------------------------------------------------------
// criterion 6: catalog instantiation and lookup round-trips
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_catalog_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let mut failures = Vec::new();
    let opts = CatalogOptions::default();

    let c121 = catalog::enumerate_catalog(1, 2, 1, &opts).unwrap();
    let c221 = catalog::enumerate_catalog(2, 2, 1, &opts).unwrap();
    assert_eq!(c121.terms.len(), 4);
    assert_eq!(c221.terms.len(), 5);
    // determinism of the enumeration itself
    assert_eq!(c121, catalog::enumerate_catalog(1, 2, 1, &opts).unwrap());
    assert_eq!(c221, catalog::enumerate_catalog(2, 2, 1, &opts).unwrap());

    let small_rat = |rng: &mut ChaCha8Rng| -> BigRational {
        frac(nonzero(rng, -4, 4), nonzero(rng, 1, 3))
    };

    // single-term f: x^m = b2 (c1 x^n1 / c2 x^n2)^2 identities, located and
    // reinstantiated at doubled lattice coordinates
    for case in 0..C6_INSTANTIATIONS / 2 {
        let n2 = rng.gen_range(0..=3i64);
        let n1 = n2 + rng.gen_range(1..=6i64);
        let c1 = small_rat(&mut rng);
        let c2 = small_rat(&mut rng);
        let b2 = small_rat(&mut rng);
        let a1 = &b2 * &c1 * &c1 / (&c2 * &c2);
        let point = Assignment {
            a: vec![a1],
            b: vec![BigRational::zero(), BigRational::zero(), b2],
            c1: vec![c1],
            c2: vec![c2.clone()],
        };
        let exps = ConcreteExponents { m: vec![2 * (n1 - n2)], n1: vec![n1], n2: vec![n2] };
        let located = match catalog::locate(&c121, &point, &exps) {
            Ok(l) => l,
            Err(e) => {
                failures.push(format!("locate case {}: {}", case, e));
                continue;
            }
        };
        let entry = &c121.entries[located.entry_index];
        for scale in [1i64, 2] {
            let u: Vec<i64> = located.u.iter().map(|x| x * scale).collect();
            match catalog::instantiate(&c121, entry, &point, &u) {
                Ok(inst) => {
                    if scale == 1 && inst.exponents != vec![2 * (n1 - n2), n1, n2] {
                        failures.push(format!("case {}: exponent mismatch", case));
                    }
                    if inst.polynomial_composition != (n2 == 0) {
                        failures.push(format!("case {}: composition flag wrong", case));
                    }
                    if n2 == 0 {
                        let inner = inst.h1.scale(&(BigRational::one() / &c2));
                        let composed =
                            compose_outer(&inst.g, &inner, DEFAULT_TERM_CAP).unwrap();
                        if composed != inst.f {
                            failures.push(format!("case {}: recomposition failed", case));
                        }
                    }
                }
                Err(e) => failures.push(format!("instantiate case {}: {}", case, e)),
            }
        }
    }

    // two-term f in both coefficient shapes, located in the richer catalog
    for case in 0..C6_LOCATES {
        let with_b1 = rng.gen_bool(0.5);
        let n2 = rng.gen_range(0..=2i64);
        let n1 = n2 + rng.gen_range(1..=5i64);
        let c1 = small_rat(&mut rng);
        let c2 = small_rat(&mut rng);
        let b2 = small_rat(&mut rng);
        let a1 = &b2 * &c1 * &c1 / (&c2 * &c2);
        let (point, exps) = if with_b1 {
            let b1 = small_rat(&mut rng);
            let a2 = &b1 * &c1 / &c2;
            (
                Assignment {
                    a: vec![a1, a2],
                    b: vec![BigRational::zero(), b1, b2],
                    c1: vec![c1],
                    c2: vec![c2],
                },
                ConcreteExponents {
                    m: vec![2 * (n1 - n2), n1 - n2],
                    n1: vec![n1],
                    n2: vec![n2],
                },
            )
        } else {
            let b0 = small_rat(&mut rng);
            (
                Assignment {
                    a: vec![a1, b0.clone()],
                    b: vec![b0, BigRational::zero(), b2],
                    c1: vec![c1],
                    c2: vec![c2],
                },
                ConcreteExponents {
                    m: vec![2 * (n1 - n2), 0],
                    n1: vec![n1],
                    n2: vec![n2],
                },
            )
        };
        match catalog::locate(&c221, &point, &exps) {
            Ok(located) => {
                let entry = &c221.entries[located.entry_index];
                let doubled: Vec<i64> = located.u.iter().map(|x| 2 * x).collect();
                match catalog::instantiate(&c221, entry, &point, &doubled) {
                    Ok(inst) => {
                        let expect: Vec<i64> = [
                            exps.m.clone(),
                            exps.n1.clone(),
                            exps.n2.clone(),
                        ]
                        .concat()
                        .iter()
                        .map(|x| 2 * x)
                        .collect();
                        if inst.exponents != expect {
                            failures.push(format!("locate case {}: doubling drifted", case));
                        }
                    }
                    Err(e) => failures.push(format!("reinstantiate case {}: {}", case, e)),
                }
            }
            Err(e) => failures.push(format!("locate case {}: {}", case, e)),
        }
    }

    report(6, "catalog locate/instantiate round-trips", &failures);
}

// ---------------------------------------------------------------------------
// criterion 7: the box scan matches the two expected families exactly
// ---------------------------------------------------------------------------

fn gcd3(a: u64, b: u64, c: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    gcd(gcd(a, b), c)
}

fn expected_decomposable(e: &[u64]) -> bool {
    let (e1, e2, e3) = (e[0], e[1], e[2]);
    if gcd3(e1, e2, e3) >= 2 {
        return true;
    }
    // (x^u + x^v)^2 with u > v >= 1
    e1 % 2 == 0 && e3 % 2 == 0 && e1 / 2 > e3 / 2 && e3 / 2 >= 1 && e2 == e1 / 2 + e3 / 2
}

#[test]
fn criterion_7_box_scan_families() {
    let mut failures = Vec::new();
    let opts = DecomposeOptions::default();

    let base = vec![rat(1), rat(2), rat(1)];
    let rows = decompose::corollary_box_scan(&base, C7_BOX, &opts).unwrap();
    let expected_total = (C7_BOX * (C7_BOX - 1) * (C7_BOX - 2) / 6) as usize;
    if rows.len() != expected_total {
        failures.push(format!("{} rows, expected {}", rows.len(), expected_total));
    }
    for row in &rows {
        let want = expected_decomposable(&row.exponents);
        if row.decomposable != want {
            failures.push(format!(
                "exponents {:?}: got {}, expected {}",
                row.exponents, row.decomposable, want
            ));
        }
    }

    // scalar closure: scaling the coefficient pattern preserves verdicts
    for scale in [rat(3), frac(1, 2)] {
        let scaled: Vec<BigRational> = base.iter().map(|c| c * &scale).collect();
        let scaled_rows = decompose::corollary_box_scan(&scaled, C7_BOX, &opts).unwrap();
        for (a, b) in rows.iter().zip(&scaled_rows) {
            if a.exponents != b.exponents || a.decomposable != b.decomposable {
                failures.push(format!(
                    "scaling by {} changed the verdict at {:?}",
                    scale, a.exponents
                ));
            }
        }
    }

    report(7, "decomposable box families", &failures);
}
