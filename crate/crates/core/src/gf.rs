//! Generating functions for both classes, each computed along two
//! independent routes, plus the cross-check report.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::automata::{
    data, transfer_series, Automaton, AutomatonError, TransferMatrix, WeightTable, Weights,
};
use crate::classes::{basis_a, basis_a_prime, level_stats};
use crate::perm::parse_basis;
use crate::series::{catalan, fibonacci, g_by_recurrence, g_series, PowerSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("unknown series name {0:?}")]
    UnknownName(String),
    #[error("series {name} has no {route} route")]
    UnknownRoute { name: String, route: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Automaton,
    Pipeline,
    ClosedForm,
    FunctionalEquation,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Automaton => "automaton",
            Route::Pipeline => "pipeline",
            Route::ClosedForm => "closed_form",
            Route::FunctionalEquation => "functional_equation",
        }
    }

    pub fn parse(s: &str) -> Option<Route> {
        match s {
            "automaton" => Some(Route::Automaton),
            "pipeline" => Some(Route::Pipeline),
            "closed" | "closed_form" => Some(Route::ClosedForm),
            "functional" | "functional_equation" | "fixed_point" => Some(Route::FunctionalEquation),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineResult {
    pub name: String,
    pub route: Route,
    pub order: usize,
    #[serde(serialize_with = "ser_series")]
    pub series: PowerSeries,
}

fn ser_series<S: serde::Serializer>(s: &PowerSeries, ser: S) -> Result<S::Ok, S::Error> {
    ser.collect_seq(s.to_json_strings())
}

/// Coefficient polynomials of the closed form for the larger class, as
/// `numer = sum a_i s^i` and `denom = sum b_i s^i` with `s = G - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedFormConstants {
    pub a: Vec<Vec<i64>>,
    pub b: Vec<Vec<i64>>,
}

impl ClosedFormConstants {
    /// Reference coefficients of the closed form.
    pub fn reference() -> ClosedFormConstants {
        ClosedFormConstants {
            a: vec![
                vec![-1, 14, -39, 28, 9, -11, 1],
                vec![-12, 81, -100, 15, 46, -19],
                vec![-8, 35, -20, -25, 31, -6, -1],
                vec![7],
                vec![1],
                vec![-2],
            ],
            b: vec![
                vec![-1, 57, -125, 143, -48, -64, 51, 0, -2],
                vec![-54, 260, -386, 250, 81, -226, 74, 15, -3],
                vec![-18, 114, -104, -22, 148, -123, 11, 14, -1],
                vec![24],
                vec![-2],
                vec![-5],
                vec![1],
            ],
        }
    }
}

/// The closed form for the simple permutations of the larger class:
/// `2 x^4 NUM / ((1 + x) DEN)`.
pub const SIMPLE_APRIME_NUM: [i64; 11] = [1, 0, 2, 9, 12, 10, 16, 23, 18, 7, 1];
pub const SIMPLE_APRIME_DEN: [i64; 10] = [1, -3, -3, 0, -5, -11, 3, 16, 12, 2];

/// Initial states of the larger automaton with the power of `x` that
/// accounts for each stripped prefix (the simple-count multiplier is
/// `x^2` times this).
pub const APRIME_STARTS: [(&str, usize); 10] = [
    ("A", 0),
    ("A''", 2),
    ("A[A]", 1),
    ("A''[A]", 2),
    ("A[B]", 1),
    ("A''[B]", 2),
    ("A[X]", 1),
    ("A''[X]", 2),
    ("B^A", 1),
    ("B^A''", 2),
];

/// Everything the pipelines read: the two automata with their weight tables
/// and the closed-form constants. Kept as data so corrupted copies can be
/// checked too.
#[derive(Debug, Clone)]
pub struct GfContext {
    pub m: Automaton,
    pub m_weights: WeightTable,
    pub m_prime: Automaton,
    pub m_prime_weights: WeightTable,
    pub constants: ClosedFormConstants,
}

impl GfContext {
    /// Loads the shipped tables (honouring `PERMCLASS_DATA_DIR`).
    pub fn shipped() -> Result<GfContext, GfError> {
        let (m, m_weights) = data::m()?;
        let (m_prime, m_prime_weights) = data::m_prime()?;
        Ok(GfContext {
            m,
            m_weights,
            m_prime,
            m_prime_weights,
            constants: ClosedFormConstants::reference(),
        })
    }
}

/// Divides by the largest common power of `x` and then divides the series.
/// Both inputs must be computed to at least `order + shift` where `shift` is
/// that power.
fn ratio_stripping_x(
    num: &PowerSeries,
    den: &PowerSeries,
    order: usize,
) -> Result<PowerSeries, SeriesError> {
    let k = den
        .coeffs()
        .iter()
        .position(|c| !c.is_zero())
        .ok_or(SeriesError::DivisionByNonUnit)?;
    if num.coeffs()[..k].iter().any(|c| !c.is_zero()) || den.order() < order + k {
        return Err(SeriesError::DivisionByNonUnit);
    }
    let strip = |s: &PowerSeries| PowerSeries::new(s.coeffs()[k..].to_vec(), order);
    strip(num).checked_div(&strip(den))
}

fn x(order: usize) -> PowerSeries {
    PowerSeries::x(order)
}

fn poly(c: &[i64], order: usize) -> PowerSeries {
    PowerSeries::from_ints(c, order)
}

/// `f - 1` for the Catalan series.
pub fn cat_bar(order: usize) -> PowerSeries {
    catalan(order).bar()
}

/// `x / (1 - x)`.
pub fn geom_bar(order: usize) -> PowerSeries {
    x(order).checked_div(&poly(&[1, -1], order)).expect("unit")
}

pub fn f_bar(order: usize) -> PowerSeries {
    fibonacci(order).bar()
}

pub fn g_bar(order: usize) -> PowerSeries {
    g_series(order).bar()
}

/// `sqrt(1 - 4x)` at the given order.
fn surd(order: usize) -> PowerSeries {
    poly(&[1, -4], order).sqrt().expect("unit constant term")
}

// Smaller class

pub fn gf_simple_a(ctx: &GfContext, order: usize, route: Route) -> Result<PowerSeries, GfError> {
    match route {
        Route::Automaton => {
            let t = transfer_series(&ctx.m, &Weights::Uniform(x(order)), "A", "Dl", order)?;
            Ok(&poly(&[0, 0, 2], order) * &t)
        }
        Route::ClosedForm => {
            let den = &poly(&[1, -3], order) * &poly(&[1, 1], order);
            Ok(PowerSeries::monomial(4, order)
                .scale_int(2)
                .checked_div(&den)?)
        }
        _ => Err(GfError::UnknownRoute {
            name: "f_simple_A".into(),
            route: route.name().into(),
        }),
    }
}

/// Inflations of skeleton 21 inside the smaller class.
pub fn f_ifl21_a(order: usize) -> PowerSeries {
    let c = cat_bar(order);
    &(&c - &(&x(order) * &c)) * &c
}

/// The same series from the surd expression `(1-2x-S)^2 (1-x) / (4x^2)`.
pub fn f_ifl21_a_closed(order: usize) -> Result<PowerSeries, GfError> {
    let n = order + 2;
    let t = &poly(&[1, -2], n) - &surd(n);
    let num = &(&t * &t) * &poly(&[1, -1], n);
    Ok(ratio_stripping_x(&num, &poly(&[0, 0, 4], n), order)?)
}

/// Inflations of simple permutations of length at least 4 in the smaller class.
pub fn f_ifl_simple_a(ctx: &GfContext, order: usize) -> Result<PowerSeries, GfError> {
    let c = cat_bar(order);
    let w = ctx.m_weights.bind(&x(order), &geom_bar(order), &c);
    let t = transfer_series(&ctx.m, &w, "A", "Dl", order)?;
    Ok(&(&c * &c).scale_int(2) * &t)
}

/// The surd form of the previous series.
pub fn f_ifl_simple_a_closed(order: usize) -> Result<PowerSeries, GfError> {
    let n = order + 4;
    let s = surd(n);
    let t = &poly(&[1, -2], n) - &s;
    let num = t.pow(4);
    // 8x^2 (x^2 - S x + 3x + S - 1)
    let inner = &(&poly(&[-1, 3, 1], n) + &s) - &(&x(n) * &s);
    let den = &poly(&[0, 0, 8], n) * &inner;
    Ok(ratio_stripping_x(&num, &den, order)?)
}

pub fn gf_class_a(ctx: &GfContext, order: usize, route: Route) -> Result<PowerSeries, GfError> {
    match route {
        Route::Pipeline => {
            let d = &(&(&PowerSeries::one(order) - &x(order)) - &f_ifl21_a(order))
                - &f_ifl_simple_a(ctx, order)?;
            Ok(d.recip()?)
        }
        Route::ClosedForm => {
            // 2 (1 - 3x - x^2 - (1-x) S) / (1 - 3x - S (1 - x + 2x^2))
            let n = order + 4;
            let s = surd(n);
            let num = (&poly(&[1, -3, -1], n) - &(&poly(&[1, -1], n) * &s)).scale_int(2);
            let den = &poly(&[1, -3], n) - &(&s * &poly(&[1, -1, 2], n));
            Ok(ratio_stripping_x(&num, &den, order)?)
        }
        _ => Err(GfError::UnknownRoute {
            name: "f_A".into(),
            route: route.name().into(),
        }),
    }
}

// Larger class

/// `sum_i pre_i(x) * T(q_i, Dl)` over the ten initial states, where `pre_i`
/// is `x^k_i` times `lead`.
fn aprime_start_sum(
    ctx: &GfContext,
    weights: &Weights,
    lead: &PowerSeries,
    order: usize,
) -> Result<PowerSeries, GfError> {
    let p = TransferMatrix::new(&ctx.m_prime, weights, order)?;
    let col = p.inverse_column(ctx.m_prime.state_index("Dl")?);
    let mut acc = PowerSeries::zero(order);
    for (state, k) in APRIME_STARTS {
        let t = &col[ctx.m_prime.state_index(state)?];
        acc = &acc + &(&(lead * &PowerSeries::monomial(k, order)) * t);
    }
    Ok(acc)
}

pub fn gf_simple_aprime(
    ctx: &GfContext,
    order: usize,
    route: Route,
) -> Result<PowerSeries, GfError> {
    match route {
        Route::Automaton => {
            let h = aprime_start_sum(
                ctx,
                &Weights::Uniform(x(order)),
                &PowerSeries::monomial(2, order),
                order,
            )?;
            Ok(h.scale_int(2))
        }
        Route::ClosedForm => {
            let num =
                &PowerSeries::monomial(4, order).scale_int(2) * &poly(&SIMPLE_APRIME_NUM, order);
            let den = &poly(&[1, 1], order) * &poly(&SIMPLE_APRIME_DEN, order);
            Ok(num.checked_div(&den)?)
        }
        _ => Err(GfError::UnknownRoute {
            name: "f_simple_Aprime".into(),
            route: route.name().into(),
        }),
    }
}

/// Inflations of skeleton 21 inside the larger class: `(1 - x - x^2) Gbar^2`.
pub fn f_ifl21_aprime(order: usize) -> PowerSeries {
    let g = g_bar(order);
    &poly(&[1, -1, -1], order) * &(&g * &g)
}

/// Inflations of the simple permutations of the canonical half.
pub fn f_ifl_h_prime(ctx: &GfContext, order: usize) -> Result<PowerSeries, GfError> {
    let g = g_bar(order);
    let w = ctx.m_prime_weights.bind(&x(order), &f_bar(order), &g);
    aprime_start_sum(ctx, &w, &(&g * &g), order)
}

pub fn gf_class_aprime(
    ctx: &GfContext,
    order: usize,
    route: Route,
) -> Result<PowerSeries, GfError> {
    match route {
        Route::Pipeline => {
            let ifl = f_ifl_h_prime(ctx, order)?.scale_int(2);
            let d = &(&(&PowerSeries::one(order) - &x(order)) - &f_ifl21_aprime(order)) - &ifl;
            Ok(d.recip()?)
        }
        Route::ClosedForm => {
            let c = &ctx.constants;
            Ok(PowerSeries::rational_in(&c.a, &c.b, &g_bar(order))?)
        }
        _ => Err(GfError::UnknownRoute {
            name: "f_Aprime".into(),
            route: route.name().into(),
        }),
    }
}

// Reference series

/// `fibonacci`, `catalan`, `G` or `skew_indec_G`, from the fixed-point
/// solver (functional-equation route) or an independent closed form or
/// recurrence (closed-form route).
pub fn gf_reference(name: &str, order: usize, route: Route) -> Result<PowerSeries, GfError> {
    let one = PowerSeries::one(order);
    let bad_route = || GfError::UnknownRoute {
        name: name.into(),
        route: route.name().into(),
    };
    match (name, route) {
        ("fibonacci", Route::FunctionalEquation) => Ok(fibonacci(order)),
        ("fibonacci", Route::ClosedForm) => Ok(one.checked_div(&poly(&[1, -1, -1], order))?),
        ("catalan", Route::FunctionalEquation) => Ok(catalan(order)),
        ("catalan", Route::ClosedForm) => {
            let n = order + 1;
            Ok(ratio_stripping_x(
                &(&PowerSeries::one(n) - &surd(n)),
                &poly(&[0, 2], n),
                order,
            )?)
        }
        ("G", Route::FunctionalEquation) => Ok(g_series(order)),
        ("G", Route::ClosedForm) => Ok(PowerSeries::new(
            g_by_recurrence(order)
                .into_iter()
                .map(num_rational::BigRational::from_integer)
                .collect(),
            order,
        )),
        ("skew_indec_G", Route::FunctionalEquation) => {
            Ok(&poly(&[1, -1, -1], order) * &g_bar(order))
        }
        ("skew_indec_G", Route::ClosedForm) => {
            let g = gf_reference("G", order, Route::ClosedForm)?.bar();
            Ok(&poly(&[1, -1, -1], order) * &g)
        }
        ("fibonacci" | "catalan" | "G" | "skew_indec_G", _) => Err(bad_route()),
        _ => Err(GfError::UnknownName(name.into())),
    }
}

/// Names accepted by [`gf`].
pub const GF_NAMES: &[&str] = &[
    "f_A",
    "f_Aprime",
    "f_simple_A",
    "f_simple_Aprime",
    "f_ifl21_A",
    "f_ifl21_Aprime",
    "f_ifl_simple_A",
    "f_ifl_Hprime",
    "fibonacci",
    "catalan",
    "G",
    "skew_indec_G",
];

/// Any named series by any of its routes.
pub fn gf(
    ctx: &GfContext,
    name: &str,
    order: usize,
    route: Route,
) -> Result<PipelineResult, GfError> {
    let bad_route = || GfError::UnknownRoute {
        name: name.into(),
        route: route.name().into(),
    };
    let series = match name {
        "f_A" => gf_class_a(ctx, order, route)?,
        "f_Aprime" => gf_class_aprime(ctx, order, route)?,
        "f_simple_A" => gf_simple_a(ctx, order, route)?,
        "f_simple_Aprime" => gf_simple_aprime(ctx, order, route)?,
        "f_ifl21_A" => match route {
            Route::Pipeline => f_ifl21_a(order),
            Route::ClosedForm => f_ifl21_a_closed(order)?,
            _ => return Err(bad_route()),
        },
        "f_ifl21_Aprime" => match route {
            Route::Pipeline => f_ifl21_aprime(order),
            _ => return Err(bad_route()),
        },
        "f_ifl_simple_A" => match route {
            Route::Pipeline => f_ifl_simple_a(ctx, order)?,
            Route::ClosedForm => f_ifl_simple_a_closed(order)?,
            _ => return Err(bad_route()),
        },
        "f_ifl_Hprime" => match route {
            Route::Pipeline => f_ifl_h_prime(ctx, order)?,
            _ => return Err(bad_route()),
        },
        _ => gf_reference(name, order, route)?,
    };
    Ok(PipelineResult {
        name: name.into(),
        route,
        order,
        series,
    })
}

// Cross-check report

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub quantity: String,
    pub n: usize,
    pub route_a: String,
    pub route_b: String,
    pub oracle: Option<String>,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub order: usize,
    pub oracle_max_n: usize,
    pub rows: Vec<ReportRow>,
    pub all_agree: bool,
    pub first_mismatch: Option<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<18} {:>3} {:>14} {:>14} {:>14}  ok",
            "quantity", "n", "route A", "route B", "oracle"
        )
        .unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:<18} {:>3} {:>14} {:>14} {:>14}  {}",
                r.quantity,
                r.n,
                r.route_a,
                r.route_b,
                r.oracle.as_deref().unwrap_or("-"),
                if r.agree { "yes" } else { "NO" }
            )
            .unwrap();
        }
        writeln!(
            out,
            "{}",
            if self.all_agree {
                "all rows agree"
            } else {
                "DISAGREEMENT"
            }
        )
        .unwrap();
        if let Some(m) = &self.first_mismatch {
            writeln!(out, "first mismatch: {m}").unwrap();
        }
        out
    }
}

fn coeff_text(s: &PowerSeries, n: usize) -> String {
    let q = s.coeff(n);
    if q.is_integer() {
        q.to_integer().to_string()
    } else {
        q.to_string()
    }
}

fn push_rows(
    rows: &mut Vec<ReportRow>,
    quantity: &str,
    a: &PowerSeries,
    b: &PowerSeries,
    oracle: &[u64],
    range: std::ops::RangeInclusive<usize>,
) {
    for n in range {
        let (ra, rb) = (coeff_text(a, n), coeff_text(b, n));
        let oracle = oracle.get(n).map(|v| v.to_string());
        let agree = ra == rb && oracle.as_ref().is_none_or(|o| *o == ra);
        rows.push(ReportRow {
            quantity: quantity.into(),
            n,
            route_a: ra,
            route_b: rb,
            oracle,
            agree,
        });
    }
}

/// Oracle counts for the report, indexed by length.
#[derive(Debug, Clone, Default)]
pub struct OracleCounts {
    pub class_a: Vec<u64>,
    pub simple_a: Vec<u64>,
    pub class_a_prime: Vec<u64>,
    pub simple_a_prime: Vec<u64>,
    pub fibonacci: Vec<u64>,
    pub catalan: Vec<u64>,
    pub g: Vec<u64>,
    pub skew_indec_g: Vec<u64>,
}

impl OracleCounts {
    /// Brute-force counts of every class up to length `n`.
    pub fn compute(n: usize) -> OracleCounts {
        let a = level_stats(&basis_a(), n);
        let ap = level_stats(&basis_a_prime(), n);
        let fib = level_stats(&parse_basis("123,213,132").expect("literal"), n);
        let cat = level_stats(&parse_basis("231").expect("literal"), n);
        let g = level_stats(&parse_basis("4123,4213,4132").expect("literal"), n);
        OracleCounts {
            class_a: a.counts,
            simple_a: a.simple,
            class_a_prime: ap.counts,
            simple_a_prime: ap.simple,
            fibonacci: fib.counts,
            catalan: cat.counts,
            g: g.counts,
            skew_indec_g: g.skew_indecomposable,
        }
    }
}

/// Runs every route pair at `order` and compares with the oracle counts
/// where available.
pub fn verify_all(ctx: &GfContext, order: usize, oracle: &OracleCounts) -> Result<Report, GfError> {
    let mut rows = vec![];
    let all = 0..=order;
    let from4 = 4.min(order + 1)..=order;

    let sa = gf_simple_a(ctx, order, Route::Automaton)?;
    let sb = gf_simple_a(ctx, order, Route::ClosedForm)?;
    // the oracle counts 12 and 21 as simple; the series excludes them
    push_rows(
        &mut rows,
        "f_simple_A",
        &sa,
        &sb,
        &oracle.simple_a,
        from4.clone(),
    );
    let sa = gf_simple_aprime(ctx, order, Route::Automaton)?;
    let sb = gf_simple_aprime(ctx, order, Route::ClosedForm)?;
    push_rows(
        &mut rows,
        "f_simple_Aprime",
        &sa,
        &sb,
        &oracle.simple_a_prime,
        from4,
    );

    let a = gf_class_a(ctx, order, Route::Pipeline)?;
    let b = gf_class_a(ctx, order, Route::ClosedForm)?;
    push_rows(&mut rows, "f_A", &a, &b, &oracle.class_a, all.clone());
    let a = gf_class_aprime(ctx, order, Route::Pipeline)?;
    let b = gf_class_aprime(ctx, order, Route::ClosedForm)?;
    push_rows(
        &mut rows,
        "f_Aprime",
        &a,
        &b,
        &oracle.class_a_prime,
        all.clone(),
    );

    let a = f_ifl21_a(order);
    let b = f_ifl21_a_closed(order)?;
    push_rows(&mut rows, "f_ifl21_A", &a, &b, &[], all.clone());
    let a = f_ifl_simple_a(ctx, order)?;
    let b = f_ifl_simple_a_closed(order)?;
    push_rows(&mut rows, "f_ifl_simple_A", &a, &b, &[], all.clone());

    for (name, counts) in [
        ("fibonacci", &oracle.fibonacci),
        ("catalan", &oracle.catalan),
        ("G", &oracle.g),
        ("skew_indec_G", &oracle.skew_indec_g),
    ] {
        let a = gf_reference(name, order, Route::FunctionalEquation)?;
        let b = gf_reference(name, order, Route::ClosedForm)?;
        // the skew-indecomposable count is defined from length 1
        let range = if name == "skew_indec_G" {
            1.min(order)..=order
        } else {
            all.clone()
        };
        push_rows(&mut rows, name, &a, &b, counts, range);
    }

    let ex = data::example()?;
    let t = transfer_series(&ex, &Weights::Uniform(x(order)), "A", "C", order)?;
    let walks: Vec<u64> = (0..=order.min(30))
        .map(|n| ex.count_walks("A", "C", n).map(|w| w as u64))
        .collect::<Result<_, _>>()?;
    let closed = poly(&[0, 1, 1], order).checked_div(&poly(&[1, -1, -2], order))?;
    push_rows(&mut rows, "example(A,C)", &t, &closed, &walks, all);

    let first_mismatch = rows.iter().find(|r| !r.agree).map(|r| {
        format!(
            "{} at n={}: route A {}, route B {}, oracle {}",
            r.quantity,
            r.n,
            r.route_a,
            r.route_b,
            r.oracle.as_deref().unwrap_or("-")
        )
    });
    let oracle_max_n = oracle.class_a_prime.len().saturating_sub(1);
    Ok(Report {
        order,
        oracle_max_n,
        all_agree: first_mismatch.is_none(),
        first_mismatch,
        rows,
    })
}

/// Coefficients as integers; panics if any is not integral.
pub fn integer_coeffs(s: &PowerSeries) -> Vec<BigInt> {
    s.integer_coeffs().expect("integral series")
}
