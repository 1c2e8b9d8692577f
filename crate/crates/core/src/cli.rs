//! The `pso` command line: algebra dumps, verification, patterns, Fock data.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::engine::{CreationWord, FockVector};
use crate::error::{Error, Result};
use crate::exact::{parse_rational, Rational};
use crate::fock::{self, induced_dims, ModuleSnapshot};
use crate::graded::{self, Generator, RelationFamily, Sign};
use crate::gz::{self, TopRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Largest rank accepted by the subcommands.
pub const MAX_RANK: usize = 4;

#[derive(Parser, Debug)]
#[command(name = "pso", version, about = "Exact computations for pso(2n+1|2n) and its parastatistics Fock spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Basis, Cartan elements, structure constants and closure dimension.
    Algebra(AlgebraArgs),
    /// Axiom suite and the four triple-relation families.
    Verify(VerifyArgs),
    /// Pattern enumeration for a top row, or basis counts for (n, p, L).
    Patterns(PatternArgs),
    /// Dimension table of the Fock space with unitarity and pattern checks.
    Fock(FockArgs),
    /// Action of one generator at infinite rank, checked across truncations.
    Infinite(InfiniteArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct Output {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write to a file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AlgebraArgs {
    #[arg(short = 'n', long = "rank")]
    pub rank: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(short = 'n', long = "rank")]
    pub rank: usize,
    /// Seed for the random homogeneous triples.
    #[arg(long, default_value_t = 20_240_601)]
    pub seed: u64,
    /// Number of random triples (ranks ≥ 2; rank 1 checks every basis triple).
    #[arg(long, default_value_t = 200)]
    pub triples: usize,
    /// Demand that this family passes, even if it is expected to fail.
    #[arg(long, value_name = "FAMILY")]
    pub require_pass: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct PatternArgs {
    /// Top row such as "1,0;0,0".
    #[arg(long, allow_hyphen_values = true)]
    pub top: Option<String>,
    #[arg(short = 'n', long = "rank")]
    pub rank: Option<usize>,
    #[arg(short = 'p', long = "order", default_value = "1")]
    pub order: String,
    #[arg(short = 'L', long = "level")]
    pub level: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct FockArgs {
    #[arg(short = 'n', long = "rank")]
    pub rank: usize,
    #[arg(short = 'p', long = "order")]
    pub order: String,
    /// Highest level built; cost grows like (2n)^L words.
    #[arg(short = 'L', long = "level", default_value_t = 4)]
    pub level: usize,
    /// Only report blocks with this weight, e.g. "[-1/2;3/2]".
    #[arg(long, allow_hyphen_values = true)]
    pub weight: Option<String>,
    /// Allow non-integer p; skips the unitarity and pattern checks.
    #[arg(long)]
    pub explore: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct InfiniteArgs {
    /// Mode index i of the generator.
    #[arg(long, allow_hyphen_values = true)]
    pub mode: i64,
    /// "+" for creation, "-" for annihilation.
    #[arg(long, allow_hyphen_values = true)]
    pub sign: String,
    /// Creation word such as "5,-2"; empty for the vacuum.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub word: String,
    #[arg(short = 'p', long = "order", default_value = "1")]
    pub order: String,
    #[command(flatten)]
    pub output: Output,
}

/// What a subcommand produced: text to emit and the exit code.
struct Outcome {
    text: String,
    code: i32,
    message: Option<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: EXIT_OK, message: None }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

fn check_rank(n: usize) -> Result<()> {
    if n == 0 || n > MAX_RANK {
        return Err(usage(format!("rank must lie in 1..={MAX_RANK}, got {n}")));
    }
    Ok(())
}

fn parse_order(s: &str) -> Result<Rational> {
    let p = parse_rational(s)?;
    if !p.is_positive() {
        return Err(usage(format!("order p must be positive, got {p}")));
    }
    Ok(p)
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut wr = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Internal(e.to_string());
    wr.write_record(header).map_err(io)?;
    for r in rows {
        wr.write_record(r).map_err(io)?;
    }
    let bytes = wr.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

fn run_algebra(a: &AlgebraArgs) -> Result<Outcome> {
    check_rank(a.rank)?;
    let n = a.rank;
    let basis = graded::canonical_basis(n)?;
    let constants = graded::structure_constants(n)?;
    if a.output.format == Format::Csv {
        let rows = constants
            .iter()
            .flat_map(|c| {
                c.bracket.iter().map(move |t| {
                    vec![c.x.clone(), c.y.clone(), t.basis.clone(), t.coeff.a.to_string(), t.coeff.b.to_string()]
                })
            })
            .collect();
        return csv_text(&["x", "y", "basis", "coeff_a", "coeff_b"], rows).map(Outcome::ok);
    }
    let closure = graded::bracket_closure(n)?;
    let elements: Vec<_> = basis
        .iter()
        .map(|b| {
            let entries: Vec<_> = b
                .element
                .entries()
                .map(|(&(r, c), v)| json!({"row": r, "col": c, "value": v}))
                .collect();
            json!({"name": b.name, "grade": b.element.grade(), "entries": entries})
        })
        .collect();
    let names = |prefix: &str| -> Vec<String> {
        basis.iter().filter(|b| b.name.starts_with(prefix)).map(|b| b.name.clone()).collect()
    };
    let mut generators = names("f(");
    generators.extend(names("b("));
    let doc = json!({
        "schema": 1,
        "n": n,
        "dimension": basis.len(),
        "generators": generators,
        "cartan": names("h("),
        "glEmbedding": names("E("),
        "basis": elements,
        "structureConstants": constants,
        "closure": closure,
    });
    let code = if closure.consistent() { EXIT_OK } else { EXIT_FAILED };
    Ok(Outcome { text: pretty(&doc), code, message: None })
}

fn run_verify(a: &VerifyArgs) -> Result<Outcome> {
    check_rank(a.rank)?;
    if a.output.format == Format::Csv {
        return Err(usage("verify only writes json"));
    }
    let n = a.rank;
    let required = a.require_pass.as_deref().map(RelationFamily::parse).transpose()?;
    let triples = if n == 1 {
        graded::basis_triples(n)?
    } else {
        let basis = graded::canonical_basis(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        (0..a.triples)
            .map(|_| {
                (
                    graded::random_homogeneous(&basis, &mut rng),
                    graded::random_homogeneous(&basis, &mut rng),
                    graded::random_homogeneous(&basis, &mut rng),
                )
            })
            .collect()
    };
    let axioms = graded::axiom_check(n, &triples)?;
    let mut ok = axioms.all_pass();
    let mut first_problem = axioms.first_failure.clone();
    let mut relations = Vec::new();
    for family in RelationFamily::ALL {
        let report = graded::relation_check(family, n)?;
        let must_pass = family != RelationFamily::RelativeParafermion || required == Some(family);
        let expected = if must_pass { report.all_pass() } else { !report.all_pass() };
        if !expected {
            ok = false;
            if first_problem.is_none() {
                first_problem = Some(
                    report
                        .first_counterexample
                        .clone()
                        .unwrap_or_else(|| format!("{} relations unexpectedly all hold", family.name())),
                );
            }
        }
        relations.push(json!({"report": report, "expected": if must_pass { "pass" } else { "fail" }, "asExpected": expected}));
    }
    let gl = graded::gl_relation_check(n)?;
    if !gl.all_pass() {
        ok = false;
        first_problem = first_problem.or_else(|| gl.first_counterexample.clone());
    }
    let doc = json!({
        "schema": 1,
        "n": n,
        "seed": a.seed,
        "axioms": axioms,
        "relations": relations,
        "glEmbedding": gl,
        "verdict": if ok { "pass" } else { "fail" },
    });
    Ok(Outcome {
        text: pretty(&doc),
        code: if ok { EXIT_OK } else { EXIT_FAILED },
        message: first_problem.filter(|_| !ok),
    })
}

fn run_patterns(a: &PatternArgs) -> Result<Outcome> {
    let p = parse_order(&a.order)?;
    if let Some(top) = &a.top {
        let top = TopRow::parse(top)?;
        check_rank(top.n())?;
        let patterns = gz::enumerate_patterns(&top);
        let rows: Vec<_> = patterns
            .iter()
            .map(|pat| {
                let round_trip = gz::phi_to_infinite(pat)
                    .and_then(|inf| gz::phi_from_infinite(&inf, 2 * pat.n()))
                    .map(|back| back == *pat)
                    .ok();
                (pat, gz::pattern_weight(pat, &p).display(top.n()), gz::stability_index(pat), round_trip)
            })
            .collect();
        if a.output.format == Format::Csv {
            let table = rows
                .iter()
                .map(|(pat, w, s, rt)| {
                    vec![
                        serde_json::to_string(pat).expect("patterns serialize"),
                        w.clone(),
                        s.map_or(String::new(), |s| s.to_string()),
                        rt.map_or(String::new(), |b| b.to_string()),
                    ]
                })
                .collect();
            return csv_text(&["rows", "weight", "stability", "phiRoundTrip"], table).map(Outcome::ok);
        }
        let list: Vec<_> = rows
            .iter()
            .map(|(pat, w, s, rt)| json!({"rows": pat, "weight": w, "stability": s, "phiRoundTrip": rt}))
            .collect();
        let doc = json!({"schema": 1, "n": top.n(), "p": p.to_string(), "top": top.to_string(), "count": list.len(), "patterns": list});
        return Ok(Outcome::ok(pretty(&doc)));
    }
    let (Some(n), Some(level)) = (a.rank, a.level) else {
        return Err(usage("patterns needs --top, or --rank with --level"));
    };
    check_rank(n)?;
    if !p.is_integer() {
        return Err(usage("pattern counts need an integer order p"));
    }
    let cutoff = p.to_integer().try_into().map_err(|_| usage("order p is too large"))?;
    let with_cutoff = gz::count_patterns(n, &p, level, Some(cutoff));
    let without = gz::count_patterns(n, &p, level, None);
    let rows: Vec<(String, usize, usize)> = without
        .iter()
        .map(|(w, &all)| (w.display(n), with_cutoff.get(w).copied().unwrap_or(0), all))
        .collect();
    if a.output.format == Format::Csv {
        let table = rows.iter().map(|(w, c, all)| vec![w.clone(), c.to_string(), all.to_string()]).collect();
        return csv_text(&["weight", "count", "uncutCount"], table).map(Outcome::ok);
    }
    let list: Vec<_> = rows.iter().map(|(w, c, all)| json!({"weight": w, "count": c, "uncutCount": all})).collect();
    let doc = json!({"schema": 1, "n": n, "p": p.to_string(), "L": level, "counts": list});
    Ok(Outcome::ok(pretty(&doc)))
}

fn run_fock(a: &FockArgs) -> Result<Outcome> {
    check_rank(a.rank)?;
    let n = a.rank;
    let p = parse_order(&a.order)?;
    if !a.explore && !p.is_integer() {
        return Err(usage(format!("certification needs an integer order p, got {p}; use --explore")));
    }
    let snap = ModuleSnapshot::build(n, p.clone(), a.level)?;
    let mut problems: Vec<String> = Vec::new();
    let mut psd_ok = true;
    let mut gz_ok = true;
    if !a.explore {
        for (level, weight, verdict) in snap.psd_report()? {
            if !verdict.is_psd() {
                psd_ok = false;
                problems.push(format!("Gram block not positive semidefinite at L={level}, weight {}", weight.display(n)));
            }
        }
        let cutoff: i64 = p.to_integer().try_into().map_err(|_| usage("order p is too large"))?;
        for level in 0..=a.level {
            let counts = gz::count_patterns(n, &p, level, Some(cutoff));
            let ranks: std::collections::BTreeMap<_, _> = snap
                .level(level)
                .iter()
                .filter(|b| b.rank > 0)
                .map(|b| (b.weight.clone(), b.rank))
                .collect();
            if counts != ranks {
                gz_ok = false;
                let bad = counts
                    .keys()
                    .chain(ranks.keys())
                    .find(|w| counts.get(*w) != ranks.get(*w))
                    .expect("maps differ");
                problems.push(format!(
                    "dimension mismatch at L={level}, weight {}: Gram rank {}, patterns {}",
                    bad.display(n),
                    ranks.get(bad).copied().unwrap_or(0),
                    counts.get(bad).copied().unwrap_or(0)
                ));
            }
        }
    }
    let keep = |w: &str| a.weight.as_deref().is_none_or(|f| f.replace(' ', "") == w);
    let code = if psd_ok && gz_ok { EXIT_OK } else { EXIT_FAILED };
    if a.output.format == Format::Csv {
        let mut buf = Vec::new();
        snap.write_csv(&mut buf)?;
        let text = String::from_utf8(buf).map_err(|e| Error::Internal(e.to_string()))?;
        let mut lines = text.lines();
        let mut out = format!("{}\n", lines.next().unwrap_or_default());
        for line in lines {
            let weight = line.split(',').nth(1).unwrap_or_default();
            let quoted = line.split('"').nth(1).unwrap_or(weight);
            if keep(quoted) {
                out.push_str(line);
                out.push('\n');
            }
        }
        return Ok(Outcome { text: out, code, message: problems.first().cloned() });
    }
    let mut doc = snap.to_json();
    if let Some(levels) = doc["levels"].as_array_mut() {
        for level in levels {
            let l = level["L"].as_u64().unwrap_or(0) as usize;
            let induced = induced_dims(n, &p, l);
            if let Some(blocks) = level["blocks"].as_array_mut() {
                blocks.retain(|b| keep(b["weight"].as_str().unwrap_or_default()));
                for b in blocks.iter_mut() {
                    let w = snap
                        .level(l)
                        .iter()
                        .find(|x| x.weight.display(n) == b["weight"].as_str().unwrap_or_default())
                        .map(|x| x.weight.clone());
                    let dim = w.and_then(|w| induced.get(&w).copied()).unwrap_or(0);
                    b["inducedDim"] = json!(dim);
                }
            }
        }
    }
    doc["certified"] = json!(!a.explore);
    if !a.explore {
        doc["psd"] = json!(psd_ok);
        doc["patternEquivalence"] = json!(gz_ok);
    }
    Ok(Outcome { text: pretty(&doc), code, message: problems.first().cloned() })
}

fn run_infinite(a: &InfiniteArgs) -> Result<Outcome> {
    let p = parse_order(&a.order)?;
    let sign = Sign::parse(a.sign.trim())?;
    let g = Generator::new(a.mode, sign)?;
    let modes: Vec<i64> = a
        .word
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<i64>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
        .collect::<Result<_>>()?;
    let v = FockVector::word(CreationWord::new(modes)?);
    let base = (g.mode.unsigned_abs() as usize).max(v.max_mode()) + 1;
    let results: Vec<(usize, FockVector)> = (base..base + 3)
        .map(|r| fock::infinite_action_at(g, &v, &p, r).map(|x| (r, x)))
        .collect::<Result<_>>()?;
    let agree = results.windows(2).all(|w| w[0].1 == w[1].1);
    let norm = fock::infinite_inner_product_at(&results[0].1, &results[0].1, &p, base)?;
    let doc = json!({
        "schema": 1,
        "generator": g.name(),
        "p": p.to_string(),
        "input": v,
        "result": results[0].1,
        "truncations": results.iter().map(|(r, _)| r).collect::<Vec<_>>(),
        "truncationIndependent": agree,
        "resultNormSquared": norm.to_string(),
    });
    if a.output.format == Format::Csv {
        let rows = results[0]
            .1
            .terms()
            .map(|(w, c)| vec![serde_json::to_string(w).expect("words serialize"), c.to_string()])
            .collect();
        let text = csv_text(&["word", "coeff"], rows)?;
        let code = if agree { EXIT_OK } else { EXIT_FAILED };
        return Ok(Outcome { text, code, message: None });
    }
    Ok(Outcome {
        text: pretty(&doc),
        code: if agree { EXIT_OK } else { EXIT_FAILED },
        message: (!agree).then(|| "results differ between truncation ranks".to_string()),
    })
}

fn output_of(cmd: &Command) -> &Output {
    match cmd {
        Command::Algebra(a) => &a.output,
        Command::Verify(a) => &a.output,
        Command::Patterns(a) => &a.output,
        Command::Fock(a) => &a.output,
        Command::Infinite(a) => &a.output,
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Algebra(a) => run_algebra(a),
        Command::Verify(a) => run_verify(a),
        Command::Patterns(a) => run_patterns(a),
        Command::Fock(a) => run_fock(a),
        Command::Infinite(a) => run_infinite(a),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Some(path) = &output_of(&cli.command).out {
        if let Err(e) = std::fs::write(path, &outcome.text) {
            let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
            return EXIT_USAGE;
        }
    } else if stdout.write_all(outcome.text.as_bytes()).is_err() {
        return EXIT_USAGE;
    }
    if let Some(m) = outcome.message {
        let _ = writeln!(stderr, "{m}");
    }
    outcome.code
}
