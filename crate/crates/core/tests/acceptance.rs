//! Acceptance suite. Each criterion prints one PASS or FAIL line with its
//! running time against the budget; the process fails if any criterion does.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use permclass::automata::data;
use permclass::classes::{
    basis_a, basis_a_prime, count_class, count_skew_indecomposable, for_each_level, simple_levels,
};
use permclass::codec::{accepts, l_bar_index, phi_prime, psi_prime, Language, L_BAR_PREFIXES};
use permclass::gf::{
    gf_class_a, gf_class_aprime, gf_reference, gf_simple_a, gf_simple_aprime, verify_all,
    GfContext, OracleCounts, Route, APRIME_STARTS,
};
use permclass::glue::{
    d_sequence, extreme_pattern, glue, glue_all, glue_decompose, least_position_chain_312,
    membership, verify_structure, Domain, ExtremePattern, GlueType, Orientation,
};
use permclass::perm::parse_basis;
use permclass::simple::is_simple;
use permclass::word::{word, Word};
use permclass::{Perm, PowerSeries};

type Outcome = Result<String, String>;

/// Brute-forced members of the larger class, shared by several criteria.
struct Larger {
    counts: Vec<u64>,
    simple: Vec<Vec<Perm>>,
}

fn ints(s: &PowerSeries) -> Vec<i128> {
    s.to_i128().expect("integral series")
}

fn as_i128(v: &[u64]) -> Vec<i128> {
    v.iter().map(|&c| c as i128).collect()
}

fn same<T: PartialEq + std::fmt::Debug>(what: &str, a: T, b: T) -> Result<(), String> {
    if a == b {
        Ok(())
    } else {
        Err(format!("{what}: {a:?} != {b:?}"))
    }
}

fn within(what: &str, t: Duration, secs: f64) -> Result<(), String> {
    if t.as_secs_f64() <= secs {
        Ok(())
    } else {
        Err(format!(
            "{what} took {:.1} s, budget {secs} s",
            t.as_secs_f64()
        ))
    }
}

fn criterion(
    results: &mut Vec<bool>,
    id: u8,
    title: &str,
    budget: f64,
    f: impl FnOnce() -> Outcome,
) {
    let t = Instant::now();
    let outcome = f();
    let elapsed = t.elapsed().as_secs_f64();
    let outcome = outcome.and_then(|msg| {
        if elapsed <= budget {
            Ok(msg)
        } else {
            Err(format!("{msg}; over budget"))
        }
    });
    let (tag, msg) = match &outcome {
        Ok(m) => ("PASS", m),
        Err(m) => ("FAIL", m),
    };
    println!("[{tag}] {id}. {title}: {msg} ({elapsed:.2} s, budget {budget} s)");
    results.push(outcome.is_ok());
}

fn main() -> ExitCode {
    let ctx = GfContext::shipped().expect("shipped tables load");
    let mut results = Vec::new();
    let mut larger: Option<Larger> = None;

    criterion(
        &mut results,
        1,
        "larger class series, brute force = pipeline = closed form (n <= 9)",
        61.0,
        || {
            let reference = [1, 1, 2, 6, 24, 115, 607, 3370, 19235, 111571];
            let t = Instant::now();
            let mut counts = Vec::new();
            let mut simple = Vec::new();
            for_each_level(&basis_a_prime(), 9, |_, level| {
                counts.push(level.len() as u64);
                simple.push(level.iter().filter(|p| is_simple(p)).cloned().collect());
            });
            within("brute force", t.elapsed(), 60.0)?;
            let t = Instant::now();
            let pipeline =
                ints(&gf_class_aprime(&ctx, 9, Route::Pipeline).map_err(|e| e.to_string())?);
            within("pipeline", t.elapsed(), 1.0)?;
            let closed =
                ints(&gf_class_aprime(&ctx, 9, Route::ClosedForm).map_err(|e| e.to_string())?);
            same(
                "brute force vs reference",
                as_i128(&counts),
                reference.to_vec(),
            )?;
            same("pipeline vs reference", pipeline, reference.to_vec())?;
            same("closed form vs reference", closed, reference.to_vec())?;
            larger = Some(Larger { counts, simple });
            Ok("1,1,2,6,24,115,607,3370,19235,111571 on all three routes".into())
        },
    );
    let larger = larger.unwrap_or_else(|| {
        let mut counts = Vec::new();
        let mut simple = Vec::new();
        for_each_level(&basis_a_prime(), 9, |_, level| {
            counts.push(level.len() as u64);
            simple.push(level.iter().filter(|p| is_simple(p)).cloned().collect());
        });
        Larger { counts, simple }
    });

    criterion(
        &mut results,
        2,
        "smaller class series, brute force = pipeline = closed form (n <= 8)",
        10.0,
        || {
            let reference = vec![1, 1, 2, 6, 23, 101, 477, 2343, 11762];
            let brute = as_i128(&count_class(&basis_a(), 8).counts);
            let pipeline = ints(&gf_class_a(&ctx, 8, Route::Pipeline).map_err(|e| e.to_string())?);
            let closed = ints(&gf_class_a(&ctx, 8, Route::ClosedForm).map_err(|e| e.to_string())?);
            same("brute force vs reference", brute, reference.clone())?;
            same("pipeline vs reference", pipeline, reference.clone())?;
            same("closed form vs reference", closed, reference)?;
            Ok("1,1,2,6,23,101,477,2343,11762 on all three routes".into())
        },
    );

    criterion(
        &mut results,
        3,
        "simple counts from both closed forms equal brute force",
        60.0,
        || {
            let mut small = Vec::new();
            for_each_level(&basis_a(), 8, |_, level| {
                small.push(level.iter().filter(|p| is_simple(p)).count() as i128)
            });
            for route in [Route::Automaton, Route::ClosedForm] {
                let a = ints(&gf_simple_a(&ctx, 8, route).map_err(|e| e.to_string())?);
                same("smaller class n=4..8", a[4..].to_vec(), small[4..].to_vec())?;
                same(
                    "smaller class expansion",
                    a[4..].to_vec(),
                    vec![2, 4, 14, 40, 122],
                )?;
                let b = ints(&gf_simple_aprime(&ctx, 9, route).map_err(|e| e.to_string())?);
                let brute: Vec<i128> = larger.simple[4..].iter().map(|l| l.len() as i128).collect();
                same("larger class n=4..9", b[4..].to_vec(), brute)?;
            }
            Ok(format!(
                "2,4,14,40,122 and {:?}",
                larger.simple[4..].iter().map(Vec::len).collect::<Vec<_>>()
            ))
        },
    );

    criterion(
        &mut results,
        4,
        "reference series equal brute force (n <= 8)",
        10.0,
        || {
            for (name, basis) in [
                ("fibonacci", "123,213,132"),
                ("catalan", "231"),
                ("G", "4123,4213,4132"),
            ] {
                let brute = as_i128(&count_class(&parse_basis(basis).unwrap(), 8).counts);
                for route in [Route::FunctionalEquation, Route::ClosedForm] {
                    let s = ints(&gf_reference(name, 8, route).map_err(|e| e.to_string())?);
                    same(name, s, brute.clone())?;
                }
            }
            let g = ints(&gf_reference("G", 8, Route::FunctionalEquation).unwrap());
            same("s_4 of G", g[4], 21)?;
            let basis = parse_basis("4123,4213,4132").unwrap();
            let sk = ints(&gf_reference("skew_indec_G", 8, Route::FunctionalEquation).unwrap());
            for n in 1..=8 {
                same(
                    &format!("skew-indecomposable n={n}"),
                    sk[n],
                    count_skew_indecomposable(&basis, n) as i128,
                )?;
            }
            Ok("Fibonacci, Catalan, G (s_4 = 21) and (1-x-x^2)(G-1) agree".into())
        },
    );

    criterion(
        &mut results,
        5,
        "worked automaton: transfer entry (A,C) and walk counts (n <= 6)",
        1.0,
        || {
            let ex = data::example().map_err(|e| e.to_string())?;
            let x = PowerSeries::x(6);
            let s = permclass::automata::transfer_series(
                &ex,
                &permclass::automata::Weights::Uniform(x),
                "A",
                "C",
                6,
            )
            .map_err(|e| e.to_string())?;
            let s = ints(&s);
            same("entry (A,C)", s[..5].to_vec(), vec![0, 1, 2, 4, 8])?;
            for (u, v) in [("A", "C"), ("A", "A"), ("B", "C"), ("C", "B")] {
                let e = ints(
                    &permclass::automata::transfer_series(
                        &ex,
                        &permclass::automata::Weights::Uniform(PowerSeries::x(6)),
                        u,
                        v,
                        6,
                    )
                    .map_err(|e| e.to_string())?,
                );
                for (n, &c) in e.iter().enumerate() {
                    same(
                        &format!("({u},{v}) n={n}"),
                        c,
                        ex.count_walks(u, v, n).map_err(|e| e.to_string())? as i128,
                    )?;
                }
            }
            Ok("x + 2x^2 + 4x^3 + 8x^4 + ..., coefficients equal walk counts".into())
        },
    );

    criterion(
        &mut results,
        6,
        "codec is a bijection from H'_n onto accepted words (4 <= n <= 9)",
        120.0,
        || {
            let (m, _) = data::m_prime().map_err(|e| e.to_string())?;
            let mut images: HashMap<Word, Perm> = HashMap::new();
            let mut sizes = BTreeMap::new();
            for level in &larger.simple[4..] {
                for p in level.iter().filter(|p| membership(p, Domain::HPrime)) {
                    *sizes.entry(p.len()).or_insert(0usize) += 1;
                    let w = phi_prime(p).map_err(|e| format!("{p}: {e}"))?;
                    if w.len() != p.len() || !accepts(&w, Language::LPrime) {
                        return Err(format!("{p}: word fails L'"));
                    }
                    let (i, k) = l_bar_index(&w).ok_or(format!("{p}: no prefix"))?;
                    if !m
                        .accepts(&w[k..], Some(APRIME_STARTS[i as usize - 1].0))
                        .map_err(|e| e.to_string())?
                    {
                        return Err(format!("{p}: rejected by the automaton"));
                    }
                    same(
                        &format!("psi'(phi'({p}))"),
                        &psi_prime(&w).map_err(|e| e.to_string())?,
                        p,
                    )?;
                    if let Some(q) = images.insert(w, p.clone()) {
                        return Err(format!("{p} and {q} share a word"));
                    }
                }
            }
            // every word the automata accept is an image
            let mut accepted = BTreeMap::new();
            for (i, (start, _)) in APRIME_STARTS.iter().enumerate() {
                let prefix = word(L_BAR_PREFIXES[i]);
                for rest in accepted_words(&m, start, 9 - prefix.len()) {
                    let w: Word = prefix.iter().chain(&rest).copied().collect();
                    if w.len() < 4 {
                        continue;
                    }
                    if !images.contains_key(&w) {
                        return Err(format!(
                            "accepted word {} has no preimage",
                            permclass::word::format_word(&w)
                        ));
                    }
                    *accepted.entry(w.len()).or_insert(0usize) += 1;
                }
            }
            same("accepted words per length vs |H'_n|", &accepted, &sizes)?;
            Ok(format!("|H'_n| = {:?}", sizes.values().collect::<Vec<_>>()))
        },
    );

    criterion(
        &mut results,
        7,
        "glue and glue_decompose are inverse (result length <= 11)",
        60.0,
        glue_roundtrips,
    );

    criterion(
        &mut results,
        8,
        "structure validators on simple members (n <= 9)",
        60.0,
        || {
            let mut checked = 0;
            for p in larger.simple[4..].iter().flatten() {
                match extreme_pattern(p) {
                    ExtremePattern::P3412 => return Err(format!("{p} has extreme pattern 3412")),
                    ExtremePattern::P2413 | ExtremePattern::P3142 => {
                        let r = verify_structure(p);
                        if !r.passed {
                            return Err(format!("{p}: {:?}", r.violation));
                        }
                        checked += 1;
                    }
                    _ => {}
                }
            }
            Ok(format!(
                "{checked} members of type 2413/3142 pass, none of type 3412"
            ))
        },
    );

    criterion(
        &mut results,
        9,
        "negative control: corrupted data fails verify_all",
        5.0,
        || {
            let mut oracle = OracleCounts::compute(0);
            oracle.class_a_prime = larger.counts.clone();
            oracle.simple_a_prime = larger.simple.iter().map(|l| l.len() as u64).collect();
            let run = |c: &GfContext| {
                verify_all(c, 9, &oracle)
                    .map(|r| r.all_agree)
                    .map_err(|e| e.to_string())
            };
            if !run(&ctx)? {
                return Err("shipped data already disagrees".into());
            }
            let mut broken = ctx.clone();
            if !broken
                .m_prime
                .remove_transition("A", permclass::word::Letter::B)
            {
                return Err("no transition to remove".into());
            }
            if run(&broken)? {
                return Err("missing transition went unnoticed".into());
            }
            let mut broken = ctx.clone();
            broken.constants.a[0][1] += 1;
            if run(&broken)? {
                return Err("altered coefficient went unnoticed".into());
            }
            Ok("shipped data agrees; both corruptions are flagged".into())
        },
    );

    let passed = results.iter().filter(|&&ok| ok).count();
    println!("{passed}/{} acceptance criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

/// Words with at most `max` letters that the automaton accepts from `start`.
fn accepted_words(m: &permclass::automata::Automaton, start: &str, max: usize) -> Vec<Word> {
    let letters = m.alphabet();
    let accept: HashSet<&str> = m.accepting_states().into_iter().collect();
    let mut out = Vec::new();
    let mut stack = vec![(start, Vec::new())];
    while let Some((s, w)) = stack.pop() {
        if accept.contains(s) {
            out.push(w.clone());
        }
        if w.len() < max {
            for &l in &letters {
                if let Some(t) = m.step(s, l) {
                    let mut v = w.clone();
                    v.push(l);
                    stack.push((t, v));
                }
            }
        }
    }
    out
}

const GLUE_MAX: usize = 11;

/// A factor with the chain lengths that decide its 3-0 glue length.
struct Factor {
    perm: Perm,
    chain_nw: Option<usize>,
    chain_se: Option<usize>,
}

/// Length of the product, per the glue tables, or None if the type cannot apply.
fn predicted_len(m: usize, f: &Factor, g: GlueType) -> Option<usize> {
    let n = f.perm.len();
    let chain = if g.orientation == Orientation::NW {
        f.chain_nw
    } else {
        f.chain_se
    };
    match (g.x, g.y) {
        (1 | 2, 0) => Some(m + n - 3),
        (1 | 2, 1) => Some(m + n - 2),
        (3, 0) => chain.map(|l| m + n - 3 - l),
        _ => (m + n).checked_sub(5),
    }
}

/// Enumerates every factor list whose glued product has length at most
/// `GLUE_MAX` and checks that decomposition returns it. Also checks the
/// other direction on every member of H' up to that length.
///
/// Both operands of a glue sum are patterns of it, so factors and partial
/// products never exceed the final length; this is checked on every sum.
fn glue_roundtrips() -> Outcome {
    let levels = simple_levels(&basis_a_prime(), GLUE_MAX);
    let of = |e: ExtremePattern| -> Vec<Factor> {
        levels
            .iter()
            .flatten()
            .filter(|p| p.len() >= 4 && extreme_pattern(p) == e)
            .map(|p| Factor {
                perm: p.clone(),
                chain_nw: least_position_chain_312(p).map(|c| c.0.len()),
                chain_se: least_position_chain_312(&p.inverse()).map(|c| c.0.len()),
            })
            .collect()
    };
    let (north, south) = (of(ExtremePattern::P2413), of(ExtremePattern::P3142));
    let h_prime: BTreeSet<Perm> = levels
        .iter()
        .flatten()
        .filter(|p| membership(p, Domain::HPrime))
        .cloned()
        .collect();

    for p in &h_prime {
        let dec = glue_decompose(p).map_err(|e| format!("{p}: {e}"))?;
        same(
            &format!("reglue {p}"),
            &glue_all(&dec.factors, &dec.types).map_err(|e| e.to_string())?,
            p,
        )?;
        same(
            &format!("d-sequence of {p}"),
            d_sequence(p).map_err(|e| e.to_string())?.len(),
            dec.m() + 3,
        )?;
    }

    let mut results = BTreeSet::new();
    let mut inputs = 0usize;
    let mut stack: Vec<(Perm, Vec<Perm>, Vec<GlueType>)> = Vec::new();
    for f in &north {
        if h_prime.contains(&f.perm) {
            results.insert(f.perm.clone());
            inputs += 1;
        }
        stack.push((f.perm.clone(), vec![f.perm.clone()], vec![]));
    }
    while let Some((q, factors, types)) = stack.pop() {
        let (pool, se) = if factors.len() % 2 == 1 {
            (&south, false)
        } else {
            (&north, true)
        };
        for f in pool {
            for (x, y) in GlueType::VARIANTS {
                let g = if se {
                    GlueType::se(x, y)
                } else {
                    GlueType::nw(x, y)
                };
                let Some(len) = predicted_len(q.len(), f, g) else {
                    continue;
                };
                if len > GLUE_MAX {
                    continue;
                }
                let Ok(r) = glue(&q, &f.perm, g) else {
                    continue;
                };
                if r.len() != len || !r.contains(&q) || !r.contains(&f.perm) {
                    return Err(format!(
                        "{q} {g} {} = {r} breaks the length or pattern rule",
                        f.perm
                    ));
                }
                let mut fs = factors.clone();
                fs.push(f.perm.clone());
                let mut ts = types.clone();
                ts.push(g);
                let dec = glue_decompose(&r).map_err(|e| format!("{r}: {e}"))?;
                if dec.factors != fs || dec.types != ts {
                    return Err(format!(
                        "{r} decomposes differently from the factors it was glued from"
                    ));
                }
                results.insert(r.clone());
                inputs += 1;
                stack.push((r, fs, ts));
            }
        }
    }
    let extra: Vec<String> = results
        .difference(&h_prime)
        .take(5)
        .map(|p| p.to_string())
        .collect();
    let missing: Vec<String> = h_prime
        .difference(&results)
        .take(5)
        .map(|p| p.to_string())
        .collect();
    if !extra.is_empty() || !missing.is_empty() {
        return Err(format!(
            "{} products outside H' (e.g. {extra:?}), {} members of H' never produced (e.g. {missing:?})",
            results.difference(&h_prime).count(),
            h_prime.difference(&results).count()
        ));
    }
    same("inputs vs distinct products", inputs, results.len())?;
    Ok(format!(
        "{inputs} glue inputs, one per member of H' up to length {GLUE_MAX}"
    ))
}
