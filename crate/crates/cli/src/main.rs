//! Command-line front end for the permclass library.

use std::io::{self, BufRead, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use permclass::automata::{data, transfer_series, Automaton, Weights};
use permclass::classes::{basis_a_prime, for_each_level, level_stats};
use permclass::codec::{
    check_language, decode_a, encode_a, factor_decode, factor_encode, phi_prime, psi_prime,
    Language, Shape,
};
use permclass::gf::{gf, verify_all, GfContext, OracleCounts, Route};
use permclass::glue::{
    extreme_pattern, glue_all, glue_decompose, membership, verify_structure, Domain,
    ExtremePattern, GlueType,
};
use permclass::perm::parse_basis;
use permclass::simple::{is_simple, proper_nontrivial_blocks, substitution_decompose};
use permclass::word::{format_word, parse_word, Letter, Word};
use permclass::{Perm, PowerSeries};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "permclass",
    version,
    about = "Enumerate and encode permutation classes"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Class {
    /// The smaller class; words over {a, b, c, d, dl}.
    A,
    /// The larger class; words over the 30-letter alphabet.
    Aprime,
    /// A single 2413-type factor.
    N,
    /// A single 3142-type factor.
    S,
}

#[derive(Subcommand)]
enum Command {
    /// Count the members of Av(basis) of each length up to --max-n.
    Count {
        #[arg(long)]
        basis: String,
        #[arg(long, default_value_t = 9)]
        max_n: usize,
        /// Also count simple and skew-indecomposable members.
        #[arg(long)]
        simple: bool,
    },
    /// Report which of the given patterns a permutation contains.
    Contains {
        /// Comma-separated patterns.
        #[arg(long, alias = "basis")]
        patterns: String,
        /// Permutation; read one per line from stdin when omitted.
        perm: Option<String>,
    },
    /// Blocks and substitution decomposition of a permutation.
    Simple { perm: Option<String> },
    /// Glue decomposition of a member of H or H'.
    Decompose { perm: Option<String> },
    /// Glue factors together: FACTOR TYPE FACTOR [TYPE FACTOR ...].
    Glue {
        #[arg(required = true, num_args = 1..)]
        args: Vec<String>,
    },
    /// Encode a permutation as a word.
    Encode {
        #[arg(long, value_enum, default_value_t = Class::Aprime)]
        class: Class,
        perm: Option<String>,
    },
    /// Decode a word, or with --check report the language conditions it breaks.
    Decode {
        #[arg(long, value_enum, default_value_t = Class::Aprime)]
        class: Class,
        /// Only check membership in a language (L, L_bar, K1, K3, L_prime, L_bar_1 .. L_bar_10).
        #[arg(long)]
        check: Option<String>,
        /// Space-separated tokens or a JSON array; read from stdin when omitted.
        word: Option<String>,
    },
    /// Run, dump or expand a shipped automaton.
    Automaton {
        #[command(subcommand)]
        action: AutomatonAction,
    },
    /// A named generating function by one of its routes.
    Gf {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 12)]
        order: usize,
        /// automaton, pipeline, closed or functional.
        #[arg(long, default_value = "pipeline")]
        route: String,
    },
    /// Cross-check every series against the brute-force counts.
    Verify {
        /// Largest length counted by brute force.
        #[arg(long, default_value_t = 9)]
        max_n: usize,
        /// Series order; defaults to --max-n.
        #[arg(long)]
        order: Option<usize>,
        /// Number of H' members sampled for codec and structure checks.
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum AutomatonAction {
    /// Decide acceptance of a word.
    Run {
        #[arg(long, default_value = "m_prime")]
        name: String,
        /// Start state; defaults to the table's first initial state.
        #[arg(long)]
        initial: Option<String>,
        word: Option<String>,
    },
    /// Re-emit the table in canonical form.
    Dump {
        #[arg(long, default_value = "m_prime")]
        name: String,
    },
    /// Transfer-matrix entry with every letter weighted x.
    Series {
        #[arg(long, default_value = "m")]
        name: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 12)]
        order: usize,
    },
}

/// A failure the user caused with valid syntax; exits with status 1.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(e.to_string())
    }
}

type Res<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    match run(&cli, &mut out) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(msg)) => {
            let _ = out.flush();
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// Returns whether everything succeeded.
fn run(cli: &Cli, out: &mut impl Write) -> Res<bool> {
    let fmt = cli.format;
    match &cli.command {
        Command::Count {
            basis,
            max_n,
            simple,
        } => {
            let basis = parse_basis(basis)?;
            if *simple {
                let s = level_stats(&basis, *max_n);
                emit(out, fmt, &serde_json::to_value(&s)?, &join(&s.counts))?;
            } else {
                let t = permclass::classes::count_class(&basis, *max_n);
                emit(out, fmt, &serde_json::to_value(&t)?, &join(&t.counts))?;
            }
            Ok(true)
        }
        Command::Contains { patterns, perm } => {
            let patterns = parse_basis(patterns)?;
            batch(out, fmt, perm.as_deref(), |line| {
                let p: Perm = line.parse()?;
                let hit: Vec<&Perm> = patterns.iter().filter(|q| p.contains(q)).collect();
                let text = if hit.is_empty() {
                    "avoids all".to_string()
                } else {
                    hit.iter()
                        .map(|q| q.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                };
                Ok((
                    json!({"perm": p, "contains": hit, "avoids_all": hit.is_empty()}),
                    text,
                ))
            })
        }
        Command::Simple { perm } => batch(out, fmt, perm.as_deref(), |line| {
            let p: Perm = line.parse()?;
            let d = substitution_decompose(&p);
            let simple = is_simple(&p);
            let text = format!(
                "{} skeleton {} parts {}",
                if simple { "simple" } else { "not simple" },
                d.skeleton,
                d.parts
                    .iter()
                    .map(|q| q.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            let v = json!({
                "perm": p,
                "simple": simple,
                "blocks": proper_nontrivial_blocks(&p),
                "skeleton": d.skeleton,
                "parts": d.parts,
            });
            Ok((v, text))
        }),
        Command::Decompose { perm } => batch(out, fmt, perm.as_deref(), |line| {
            let p: Perm = line.parse()?;
            let d = glue_decompose(&p)?;
            let mut text = d.factors[0].to_string();
            for (g, f) in d.types.iter().zip(&d.factors[1..]) {
                text.push_str(&format!(" {g} {f}"));
            }
            let v = json!({
                "perm": p,
                "factors": d.factors,
                "types": d.types,
                "structure": verify_structure(&p),
            });
            Ok((v, text))
        }),
        Command::Glue { args } => {
            if args.len() % 2 == 0 {
                return Err(Failure(
                    "expected FACTOR TYPE FACTOR [TYPE FACTOR ...]".into(),
                ));
            }
            let factors = args
                .iter()
                .step_by(2)
                .map(|s| s.parse())
                .collect::<Result<Vec<Perm>, _>>()?;
            let types = args
                .iter()
                .skip(1)
                .step_by(2)
                .map(|s| s.parse())
                .collect::<Result<Vec<GlueType>, _>>()?;
            let p = glue_all(&factors, &types)?;
            emit(out, fmt, &json!(p), &p.to_string())?;
            Ok(true)
        }
        Command::Encode { class, perm } => batch(out, fmt, perm.as_deref(), |line| {
            let p: Perm = line.parse()?;
            let w = match class {
                Class::A => encode_a(&p)?,
                Class::Aprime => phi_prime(&p)?,
                Class::N => factor_encode(&p, Shape::N)?,
                Class::S => factor_encode(&p, Shape::S)?,
            };
            let text = format_word(&w);
            Ok((json!(text), text))
        }),
        Command::Decode { class, check, word } => {
            let lang = check.as_deref().map(str::parse::<Language>).transpose()?;
            batch(out, fmt, word.as_deref(), |line| {
                let w = read_word(line)?;
                if let Some(lang) = lang {
                    let r = check_language(&w, lang);
                    let text = match &r.violated {
                        None => "accepted".to_string(),
                        Some(v) => format!("rejected: {v}"),
                    };
                    return Ok((serde_json::to_value(&r)?, text));
                }
                let p = match class {
                    Class::A => decode_a(&w)?,
                    Class::Aprime => psi_prime(&w)?,
                    Class::N => factor_decode(&w, Shape::N)?,
                    Class::S => factor_decode(&w, Shape::S)?,
                };
                Ok((json!(p), p.to_string()))
            })
        }
        Command::Automaton { action } => automaton(out, fmt, action),
        Command::Gf { name, order, route } => {
            let route =
                Route::parse(route).ok_or_else(|| Failure(format!("unknown route {route:?}")))?;
            let ctx = GfContext::shipped()?;
            let r = gf(&ctx, name, *order, route)?;
            let text = series_text(&r.series);
            emit(out, fmt, &serde_json::to_value(&r)?, &text)?;
            Ok(true)
        }
        Command::Verify {
            max_n,
            order,
            samples,
            seed,
        } => verify(out, fmt, *max_n, order.unwrap_or(*max_n), *samples, *seed),
    }
}

fn automaton(out: &mut impl Write, fmt: Format, action: &AutomatonAction) -> Res<bool> {
    let load = |name: &str| -> Res<Automaton> {
        let file = match name {
            "m" | "M" => "m.txt",
            "m_prime" | "mprime" | "M'" => "m_prime.txt",
            "example" => "example.txt",
            _ => {
                return Err(Failure(format!(
                    "unknown automaton {name:?}; expected m, m_prime or example"
                )))
            }
        };
        Ok(Automaton::parse(&data::read(file)?)?)
    };
    match action {
        AutomatonAction::Run {
            name,
            initial,
            word,
        } => {
            let m = load(name)?;
            batch(out, fmt, word.as_deref(), |line| {
                let w = read_word(line)?;
                let ok = m.accepts(&w, initial.as_deref())?;
                Ok((
                    json!(ok),
                    if ok { "accepted" } else { "rejected" }.to_string(),
                ))
            })
        }
        AutomatonAction::Dump { name } => {
            let text = load(name)?.dump();
            emit(out, fmt, &json!(text), text.trim_end())?;
            Ok(true)
        }
        AutomatonAction::Series {
            name,
            from,
            to,
            order,
        } => {
            let m = load(name)?;
            let s = transfer_series(
                &m,
                &Weights::Uniform(PowerSeries::x(*order)),
                from,
                to,
                *order,
            )?;
            let text = series_text(&s);
            emit(out, fmt, &json!(s.to_json_strings()), &text)?;
            Ok(true)
        }
    }
}

/// Runs the series report and, on a seeded sample of H', the codec and
/// structure checks.
fn verify(
    out: &mut impl Write,
    fmt: Format,
    max_n: usize,
    order: usize,
    samples: usize,
    seed: u64,
) -> Res<bool> {
    let ctx = GfContext::shipped()?;
    let oracle = OracleCounts::compute(max_n);
    let report = verify_all(&ctx, order, &oracle)?;

    let mut h_prime = Vec::new();
    for_each_level(&basis_a_prime(), max_n, |_, level| {
        h_prime.extend(
            level
                .iter()
                .filter(|p| membership(p, Domain::HPrime))
                .cloned(),
        );
    });
    let mut rng = StdRng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let picked: Vec<&Perm> = h_prime.choose_multiple(&mut rng, samples).collect();
    for p in &picked {
        let shaped = matches!(
            extreme_pattern(p),
            ExtremePattern::P2413 | ExtremePattern::P3142
        );
        let ok = phi_prime(p)
            .and_then(|w| psi_prime(&w))
            .is_ok_and(|q| q == **p)
            && (!shaped || verify_structure(p).passed);
        if !ok {
            failures.push(p.to_string());
        }
    }
    let all_ok = report.all_agree && failures.is_empty();
    let codec = json!({"sampled": picked.len(), "seed": seed, "failures": failures});
    let v = json!({"series": report, "codec": codec, "all_ok": all_ok});
    let text = format!(
        "{}codec roundtrip on {} sampled members of H' (seed {seed}): {}",
        report.to_table(),
        picked.len(),
        if failures.is_empty() {
            "ok".to_string()
        } else {
            format!("FAILED for {}", failures.join(", "))
        }
    );
    emit(out, fmt, &v, &text)?;
    Ok(all_ok)
}

fn read_word(text: &str) -> Res<Word> {
    let t = text.trim();
    if t.starts_with('[') {
        let w: Vec<Letter> = serde_json::from_str(t)?;
        return Ok(w);
    }
    Ok(parse_word(t)?)
}

/// Coefficients joined by commas, as integers where they are integral.
fn series_text(s: &PowerSeries) -> String {
    match s.integer_coeffs() {
        Some(c) => c
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(","),
        None => s.to_json_strings().join(","),
    }
}

fn join(v: &[u64]) -> String {
    v.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn emit(out: &mut impl Write, fmt: Format, v: &Value, text: &str) -> io::Result<()> {
    match fmt {
        Format::Json => writeln!(out, "{v}"),
        Format::Text => writeln!(out, "{text}"),
    }
}

/// Applies `f` to the argument, or to every nonblank stdin line when there
/// is none. In batch mode a failing line is reported in place and the run
/// carries on.
fn batch(
    out: &mut impl Write,
    fmt: Format,
    arg: Option<&str>,
    mut f: impl FnMut(&str) -> Res<(Value, String)>,
) -> Res<bool> {
    if let Some(a) = arg {
        let (v, text) = f(a)?;
        emit(out, fmt, &v, &text)?;
        return Ok(true);
    }
    let mut all_ok = true;
    for line in io::stdin().lock().lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match f(&line) {
            Ok((v, text)) => emit(out, fmt, &v, &text)?,
            Err(Failure(msg)) => {
                all_ok = false;
                emit(
                    out,
                    fmt,
                    &json!({"input": line.trim(), "error": msg}),
                    &format!("error: {msg}"),
                )?;
            }
        }
    }
    Ok(all_ok)
}
