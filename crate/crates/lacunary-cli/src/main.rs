//! Command line front end for the lacunary toolkit.
//!
//! Every subcommand reads a JSON document (from `--input` or `--inline`)
//! and writes a JSON document to stdout or `--output`.  Output is
//! deterministic: the same invocation produces byte-identical bytes.
//! Failures exit with code 1 and, by default, a machine-readable
//! `{"error":{"kind":...,"message":...}}` line on stderr; usage problems
//! exit with code 2.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{ArgAction, Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use lacunary::catalog::{self, CatalogOptions};
use lacunary::decompose::{self, DecomposeOptions, DecompositionKind};
use lacunary::poly::{PolyError, SparsePoly, DEFAULT_TERM_CAP, DENSE_DEGREE_CAP};
use lacunary::series::{self, SeriesError, TruncatedSeries};
use lacunary::wronskian::{self, Place, RatFunc, WronskianError};

#[derive(Parser)]
#[command(name = "lacunary", version, about = "Sparse polynomial composition toolkit")]
struct Cli {
    /// Emit errors as JSON on stderr (pass `false` for plain text only).
    #[arg(
        long,
        global = true,
        value_name = "BOOL",
        default_value_t = true,
        action = ArgAction::Set
    )]
    json_errors: bool,

    /// Also print a human-readable line for JSON errors.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputArgs {
    /// Path of the JSON input document.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,

    /// The JSON input document itself.
    #[arg(long, value_name = "JSON")]
    inline: Option<String>,
}

impl InputArgs {
    fn read(&self) -> Result<String, CliError> {
        match (&self.input, &self.inline) {
            (Some(path), None) => Ok(std::fs::read_to_string(path)?),
            (None, Some(text)) => Ok(text.clone()),
            _ => unreachable!("clap enforces the group"),
        }
    }
}

#[derive(Args)]
struct OutputArg {
    /// Write the result here instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Search a sparse polynomial for composition structure.
    Decompose {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        out: OutputArg,
        /// Budget on series coefficient slots per divisor.
        #[arg(long, value_name = "N", default_value_t = decompose::DEFAULT_SERIES_BUDGET)]
        budget_terms: usize,
    },
    /// Expand a fractional power of a unit series to a given order.
    Expand {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        out: OutputArg,
        /// Budget on series coefficient slots.
        #[arg(long, value_name = "N", default_value_t = DEFAULT_TERM_CAP)]
        budget_terms: usize,
    },
    /// Order sums of a Wronskian and the height inequality for a tuple.
    WronskianCheck {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Enumerate the identity catalog for a shape (l, ell, b).
    Enumerate {
        #[command(flatten)]
        out: OutputArg,
        /// Number of terms of f.
        #[arg(long = "cap-l", value_name = "L", default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        cap_l: u8,
        /// Degree of the outer polynomial.
        #[arg(long = "cap-ell", value_name = "ELL", default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=4))]
        cap_ell: u8,
        /// Number of terms of each inner polynomial.
        #[arg(long = "cap-b", value_name = "B", default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        cap_b: u8,
        /// Enumerate even when the identity has many terms.
        #[arg(long)]
        override_size_guard: bool,
    },
    /// Scan a coefficient pattern over all exponent boxes for decomposability.
    CorollaryScan {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        out: OutputArg,
        /// Exponents range over 1..=BOX.
        #[arg(long = "box", value_name = "BOX")]
        box_max: u64,
        /// Budget on series coefficient slots per divisor.
        #[arg(long, value_name = "N", default_value_t = decompose::DEFAULT_SERIES_BUDGET)]
        budget_terms: usize,
    },
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct CliError {
    kind: &'static str,
    message: String,
}

impl CliError {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        CliError { kind, message: message.into() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new("io", e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::new("json", e.to_string())
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        let kind = match &e {
            PolyError::TermBudget { .. } => "term_budget",
            PolyError::DenseCap { .. } => "dense_cap",
            PolyError::ConstantOuter => "constant_outer",
            PolyError::ZeroDivisor => "zero_divisor",
            PolyError::Parse(_) => "parse",
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        let kind = match &e {
            SeriesError::InvalidInput(_) => "invalid_input",
            SeriesError::NonUnitConstant => "non_unit_constant",
            SeriesError::Budget { .. } => "budget",
            SeriesError::Normalization => "normalization",
            SeriesError::IrrationalShift => "irrational_shift",
            SeriesError::NotApplicable(_) => "not_applicable",
            SeriesError::DeltaPrefix(_) => "delta_prefix",
            SeriesError::OrderOverflow => "order_overflow",
            SeriesError::Internal(_) => "internal",
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<decompose::DecomposeError> for CliError {
    fn from(e: decompose::DecomposeError) -> Self {
        match e {
            decompose::DecomposeError::Poly(p) => p.into(),
            decompose::DecomposeError::Series(s) => s.into(),
            decompose::DecomposeError::Budget { .. } => CliError::new("budget", e.to_string()),
            decompose::DecomposeError::TermCap { .. } => CliError::new("term_cap", e.to_string()),
            decompose::DecomposeError::InvalidInput(_) => {
                CliError::new("invalid_input", e.to_string())
            }
        }
    }
}

impl From<WronskianError> for CliError {
    fn from(e: WronskianError) -> Self {
        let kind = match &e {
            WronskianError::InvalidInput(_) => "invalid_input",
            WronskianError::InvalidPlace(_) => "invalid_place",
            WronskianError::Dependent => "dependent",
            WronskianError::Factor(lacunary::factor::FactorError::Budget { .. }) => "budget",
            WronskianError::Factor(_) => "internal",
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<catalog::CatalogError> for CliError {
    fn from(e: catalog::CatalogError) -> Self {
        match e {
            catalog::CatalogError::Poly(p) => p.into(),
            catalog::CatalogError::SizeGuard { .. } => CliError::new("size_guard", e.to_string()),
            catalog::CatalogError::NegativeExponent { .. } => {
                CliError::new("negative_exponent", e.to_string())
            }
            catalog::CatalogError::PointNotOnVariety(_) => {
                CliError::new("point_not_on_variety", e.to_string())
            }
            catalog::CatalogError::NotInCatalog => CliError::new("not_in_catalog", e.to_string()),
            catalog::CatalogError::InvalidInput(_) => {
                CliError::new("invalid_input", e.to_string())
            }
            catalog::CatalogError::Internal(_) => CliError::new("internal", e.to_string()),
        }
    }
}

fn emit_error(err: &CliError, json_errors: bool, verbose: bool) {
    if json_errors {
        let doc = serde_json::json!({
            "error": { "kind": err.kind, "message": err.message }
        });
        eprintln!("{}", doc);
        if verbose {
            eprintln!("error ({}): {}", err.kind, err.message);
        }
    } else {
        eprintln!("error ({}): {}", err.kind, err.message);
    }
}

// ---------------------------------------------------------------------------
// Shared JSON shapes
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RationalRepr {
    num: String,
    den: String,
}

fn parse_rational(r: &RationalRepr) -> Result<BigRational, CliError> {
    let num = BigInt::from_str(&r.num)
        .map_err(|_| CliError::new("parse", format!("bad numerator {:?}", r.num)))?;
    let den = BigInt::from_str(&r.den)
        .map_err(|_| CliError::new("parse", format!("bad denominator {:?}", r.den)))?;
    if den.is_zero() {
        return Err(CliError::new("parse", "zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

fn rational_repr(x: &BigRational) -> RationalRepr {
    RationalRepr { num: x.numer().to_string(), den: x.denom().to_string() }
}

fn parse_input<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, CliError> {
    Ok(serde_json::from_str(text)?)
}

fn write_output(doc: &impl Serialize, out: &OutputArg) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    match &out.output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn sparse_to_u64_terms(p: &SparsePoly) -> Result<Vec<(u64, BigRational)>, CliError> {
    p.terms()
        .map(|(e, c)| {
            e.to_u64()
                .map(|e| (e, c.clone()))
                .ok_or_else(|| CliError::new("invalid_input", format!("exponent {} too large", e)))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// decompose
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct DecomposeOut {
    degree: String,
    term_count: usize,
    has_proper: bool,
    results: Vec<DecompositionOut>,
    diagnostics: Vec<String>,
}

#[derive(Serialize)]
struct DecompositionOut {
    kind: &'static str,
    divisor: u64,
    outer: Vec<RationalRepr>,
    inner: SparsePoly,
}

fn run_decompose(input: &InputArgs, out: &OutputArg, budget: usize) -> Result<(), CliError> {
    let f: SparsePoly = parse_input(&input.read()?)?;
    let opts = DecomposeOptions { series_budget: budget, ..Default::default() };
    let outcome = decompose::sparse_decompose(&f, &opts)?;
    let doc = DecomposeOut {
        degree: f.degree().map(|d| d.to_string()).unwrap_or_else(|| "-inf".into()),
        term_count: f.term_count(),
        has_proper: decompose::has_proper(&outcome),
        results: outcome
            .results
            .iter()
            .map(|r| DecompositionOut {
                kind: match r.kind {
                    DecompositionKind::Trivial => "trivial",
                    DecompositionKind::Proper => "proper",
                },
                divisor: r.divisor_d,
                outer: r.outer.coeffs().iter().map(rational_repr).collect(),
                inner: r.inner.clone(),
            })
            .collect(),
        diagnostics: outcome.diagnostics,
    };
    write_output(&doc, out)
}

// ---------------------------------------------------------------------------
// expand
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpandJob {
    poly: SparsePoly,
    s: i64,
    d: u64,
    order: u64,
}

#[derive(Serialize)]
struct SeriesTermOut {
    exp: String,
    num: String,
    den: String,
}

#[derive(Serialize)]
struct ExpandOut {
    order: u64,
    terms: Vec<SeriesTermOut>,
}

fn series_out(s: &TruncatedSeries) -> ExpandOut {
    ExpandOut {
        order: s.order(),
        terms: s
            .terms()
            .map(|(e, c)| SeriesTermOut {
                exp: e.to_string(),
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            })
            .collect(),
    }
}

fn run_expand(input: &InputArgs, out: &OutputArg, budget: usize) -> Result<(), CliError> {
    let job: ExpandJob = parse_input(&input.read()?)?;
    let terms = sparse_to_u64_terms(&job.poly)?;
    let fs = TruncatedSeries::from_terms(job.order, terms);
    let result = series::pow_fractional_with_budget(&fs, job.s, job.d, job.order, budget)?;
    write_output(&series_out(&result), out)
}

// ---------------------------------------------------------------------------
// wronskian-check
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RatFuncRepr {
    num: SparsePoly,
    #[serde(default)]
    den: Option<SparsePoly>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
enum PlaceRepr {
    Infinite,
    Finite { poly: SparsePoly },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WronskianJob {
    functions: Vec<RatFuncRepr>,
    #[serde(default)]
    r: Option<usize>,
    #[serde(default)]
    places: Option<Vec<PlaceRepr>>,
}

#[derive(Serialize)]
struct OrderOut {
    place: String,
    degree: usize,
    order: i64,
}

#[derive(Serialize)]
struct Prop1Out {
    r: usize,
    places: Vec<String>,
    lhs: i64,
    rhs: i64,
    holds: bool,
}

#[derive(Serialize)]
struct WronskianOut {
    functions: usize,
    wronskian_orders: Vec<OrderOut>,
    order_total: i64,
    prop1: Option<Prop1Out>,
}

fn run_wronskian(input: &InputArgs, out: &OutputArg) -> Result<(), CliError> {
    let job: WronskianJob = parse_input(&input.read()?)?;
    let mut fns = Vec::with_capacity(job.functions.len());
    for f in &job.functions {
        let num = f.num.to_dense(DENSE_DEGREE_CAP)?;
        let den = match &f.den {
            Some(p) => p.to_dense(DENSE_DEGREE_CAP)?,
            None => lacunary::poly::DensePoly::from_ints(&[1]),
        };
        fns.push(RatFunc::new(num, den)?);
    }

    let report = wronskian::wronskian_order_sum(&fns)?;
    let prop1 = match (job.r, job.places) {
        (Some(r), places) => {
            let set: Vec<Place> = match places {
                Some(list) => list
                    .into_iter()
                    .map(|p| match p {
                        PlaceRepr::Infinite => Ok(Place::infinite()),
                        PlaceRepr::Finite { poly } => Place::finite(poly.to_dense(DENSE_DEGREE_CAP)?)
                            .map_err(CliError::from),
                    })
                    .collect::<Result<_, CliError>>()?,
                None => wronskian::required_places(&fns, r)?,
            };
            let p = wronskian::verify_prop1(&fns, r, &set)?;
            Some(Prop1Out {
                r,
                places: set.iter().map(|p| p.to_string()).collect(),
                lhs: p.lhs,
                rhs: p.rhs,
                holds: p.holds,
            })
        }
        (None, Some(_)) => {
            return Err(CliError::new("invalid_input", "places were given without r"));
        }
        (None, None) => None,
    };

    let doc = WronskianOut {
        functions: fns.len(),
        wronskian_orders: report
            .orders
            .iter()
            .map(|(place, order)| OrderOut {
                place: place.to_string(),
                degree: place.degree(),
                order: *order,
            })
            .collect(),
        order_total: report.total,
        prop1,
    };
    write_output(&doc, out)
}

// ---------------------------------------------------------------------------
// enumerate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ShapeOut {
    l: usize,
    ell: usize,
    b_count: usize,
}

#[derive(Serialize)]
struct SymbolicTermOut {
    scalar: RationalRepr,
    monomial: std::collections::BTreeMap<String, u32>,
    degree: Vec<i64>,
}

#[derive(Serialize)]
struct EquationOut {
    terms: Vec<EquationTermOut>,
    defines_f_coeff: bool,
}

#[derive(Serialize)]
struct EquationTermOut {
    scalar: RationalRepr,
    monomial: std::collections::BTreeMap<String, u32>,
}

#[derive(Serialize)]
struct EntryOut {
    partition: Vec<Vec<usize>>,
    lattice_basis: Vec<Vec<i64>>,
    equations: Vec<EquationOut>,
}

#[derive(Serialize)]
struct CatalogOut {
    shape: ShapeOut,
    variables: Vec<String>,
    terms: Vec<SymbolicTermOut>,
    entry_count: usize,
    entries: Vec<EntryOut>,
}

fn monomial_out(m: &catalog::Monomial) -> std::collections::BTreeMap<String, u32> {
    m.iter().map(|(sym, pow)| (sym.to_string(), *pow)).collect()
}

fn run_enumerate(
    out: &OutputArg,
    l: usize,
    ell: usize,
    b_count: usize,
    override_guard: bool,
) -> Result<(), CliError> {
    let opts = if override_guard {
        CatalogOptions { max_terms: usize::MAX }
    } else {
        CatalogOptions::default()
    };
    let cat = catalog::enumerate_catalog(l, ell, b_count, &opts)?;
    let doc = CatalogOut {
        shape: ShapeOut { l: cat.l, ell: cat.ell, b_count: cat.b_count },
        variables: catalog::variable_names(cat.l, cat.b_count),
        terms: cat
            .terms
            .iter()
            .map(|t| SymbolicTermOut {
                scalar: rational_repr(&t.scalar),
                monomial: monomial_out(&t.monomial),
                degree: t.degree.clone(),
            })
            .collect(),
        entry_count: cat.entries.len(),
        entries: cat
            .entries
            .iter()
            .map(|e| EntryOut {
                partition: e.partition.clone(),
                lattice_basis: e.lattice.basis.clone(),
                equations: e
                    .coeff_system
                    .equations
                    .iter()
                    .map(|eq| EquationOut {
                        terms: eq
                            .terms
                            .iter()
                            .map(|(scalar, mono)| EquationTermOut {
                                scalar: rational_repr(scalar),
                                monomial: monomial_out(mono),
                            })
                            .collect(),
                        defines_f_coeff: eq.defines_f_coeff,
                    })
                    .collect(),
            })
            .collect(),
    };
    write_output(&doc, out)
}

// ---------------------------------------------------------------------------
// corollary-scan
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanJob {
    coeffs: Vec<RationalRepr>,
}

#[derive(Serialize)]
struct ScanRowOut {
    exponents: Vec<u64>,
    decomposable: bool,
}

#[derive(Serialize)]
struct ScanOut {
    #[serde(rename = "box")]
    box_max: u64,
    pattern: Vec<RationalRepr>,
    total: usize,
    decomposable_count: usize,
    rows: Vec<ScanRowOut>,
}

fn run_scan(
    input: &InputArgs,
    out: &OutputArg,
    box_max: u64,
    budget: usize,
) -> Result<(), CliError> {
    let job: ScanJob = parse_input(&input.read()?)?;
    let coeffs = job
        .coeffs
        .iter()
        .map(parse_rational)
        .collect::<Result<Vec<_>, _>>()?;
    let opts = DecomposeOptions { series_budget: budget, ..Default::default() };
    let rows = decompose::corollary_box_scan(&coeffs, box_max, &opts)?;
    let doc = ScanOut {
        box_max,
        pattern: coeffs.iter().map(rational_repr).collect(),
        total: rows.len(),
        decomposable_count: rows.iter().filter(|r| r.decomposable).count(),
        rows: rows
            .into_iter()
            .map(|r| ScanRowOut { exponents: r.exponents, decomposable: r.decomposable })
            .collect(),
    };
    write_output(&doc, out)
}

// ---------------------------------------------------------------------------

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Decompose { input, out, budget_terms } => {
            run_decompose(input, out, *budget_terms)
        }
        Command::Expand { input, out, budget_terms } => run_expand(input, out, *budget_terms),
        Command::WronskianCheck { input, out } => run_wronskian(input, out),
        Command::Enumerate { out, cap_l, cap_ell, cap_b, override_size_guard } => run_enumerate(
            out,
            *cap_l as usize,
            *cap_ell as usize,
            *cap_b as usize,
            *override_size_guard,
        ),
        Command::CorollaryScan { input, out, box_max, budget_terms } => {
            run_scan(input, out, *box_max, *budget_terms)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            emit_error(&e, cli.json_errors, cli.verbose);
            ExitCode::from(1)
        }
    }
}
