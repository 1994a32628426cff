//! `chaincalc`: command-line front end for the chaincalc library.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use chaincalc::chain::{
    oracle_eval, parse_chain_expr, shuffle_sets, Assignment, CutPartition, IndexSet, PosSet, Segment, Word,
};
use chaincalc::formula::{formula_depth, parse_formula};
use chaincalc::interp::{image, model_check_fo, parse_interp, respects, t_axioms, tk_axioms, Interpretation, Structure};
use chaincalc::theory::{formal_shuffle, parse_literal, TheoryEngine, TheoryHandle, UpIndexSet, UpSequence};
use chaincalc::Guards;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chaincalc", version, about = "Monadic second-order theories of labeled chains")]
struct Cli {
    /// Print nothing; report only through the exit code.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(flatten)]
    guards: GuardArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GuardArgs {
    /// Largest theory level.
    #[arg(long, global = true, env = "CHAINCALC_MAX_LEVEL", default_value_t = chaincalc::guards::DEFAULT_MAX_LEVEL)]
    max_level: usize,
    /// Longest word handled by exhaustive subset enumeration.
    #[arg(long, global = true, env = "CHAINCALC_MAX_ORACLE_LEN", default_value_t = chaincalc::guards::DEFAULT_MAX_ORACLE_LEN)]
    max_oracle_len: usize,
    /// Largest closure (census or generated semigroup).
    #[arg(long, global = true, env = "CHAINCALC_MAX_CLOSURE", default_value_t = chaincalc::guards::DEFAULT_MAX_CLOSURE)]
    max_closure: usize,
    /// Most theory values interned by one run.
    #[arg(long, global = true, env = "CHAINCALC_MAX_NODES", default_value_t = chaincalc::guards::DEFAULT_MAX_NODES)]
    max_nodes: usize,
}

#[derive(Args)]
struct FormulaArg {
    /// Formula text.
    #[arg(short, long, conflicts_with = "formula_file")]
    formula: Option<String>,
    /// File holding the formula.
    #[arg(long)]
    formula_file: Option<String>,
}

impl FormulaArg {
    fn text(&self) -> Result<String> {
        match (&self.formula, &self.formula_file) {
            (Some(f), _) => Ok(f.clone()),
            (None, Some(path)) => read(path),
            (None, None) => Err(usage("a formula is required (--formula or --formula-file)")),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the digest and pretty form of the n-theory of a chain expression.
    Theory {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        m: usize,
        #[arg(short, long)]
        expr: String,
        /// Omit the pretty form.
        #[arg(long)]
        digest_only: bool,
    },
    /// Decide a sentence on a chain expression through its theory.
    Decide {
        #[arg(short)]
        m: usize,
        #[arg(short, long)]
        expr: String,
        #[command(flatten)]
        formula: FormulaArg,
        /// Theory level; defaults to the quantifier depth of the formula.
        #[arg(short)]
        n: Option<usize>,
    },
    /// Evaluate a formula on a finite word by brute force.
    Oracle {
        #[arg(short)]
        m: usize,
        /// Word as consecutive m-bit letters (`.` per position when m = 0).
        #[arg(short, long)]
        word: String,
        #[command(flatten)]
        formula: FormulaArg,
        /// Point assignment `x=3`.
        #[arg(long = "point")]
        points: Vec<String>,
        /// Set assignment `X=0,2`.
        #[arg(long = "set")]
        sets: Vec<String>,
        /// Parameter values W1, W2, .. in order.
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Close the theories of short words under sum (and ω-power).
    Reachable {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        max_word_len: usize,
        #[arg(long)]
        omega: bool,
    },
    /// Interpretations evaluated inside a finite word.
    Interp {
        #[command(subcommand)]
        action: InterpAction,
    },
    /// Shuffle two set tuples along a cut partition and check the block sums.
    Shuffle {
        #[arg(short)]
        m: usize,
        #[arg(short)]
        n: usize,
        #[arg(short, long)]
        word: String,
        /// Interior cuts, e.g. `2,4`.
        #[arg(long)]
        cuts: String,
        /// Blocks taken from the first tuple, e.g. `0,2`.
        #[arg(short)]
        a: String,
        /// First tuple, sets separated by `;`.
        #[arg(long)]
        xs: String,
        /// Second tuple, sets separated by `;`.
        #[arg(long)]
        ys: String,
    },
    /// Ultimately periodic sequences.
    Seq {
        #[command(subcommand)]
        action: SeqAction,
    },
}

#[derive(Args)]
struct InterpInput {
    /// Interpretation file.
    #[arg(short, long)]
    interp: String,
    #[arg(short)]
    m: usize,
    #[arg(short, long)]
    word: String,
    /// Parameter values W1, W2, .. in order.
    #[arg(long = "param")]
    params: Vec<String>,
}

#[derive(Subcommand)]
enum InterpAction {
    /// Check that the word respects the interpretation.
    Check(InterpInput),
    /// Print the quotient structure and optionally check axioms in it.
    Image {
        #[command(flatten)]
        input: InterpInput,
        /// Check the pairing axioms, reading `Code` as `p`.
        #[arg(long)]
        t_axioms: bool,
        /// Check the axioms asserting k coded atoms.
        #[arg(long)]
        tk: Option<usize>,
    },
    /// Largest family of nonequivalent elements agreeing outside a segment.
    Bouquet {
        #[command(flatten)]
        input: InterpInput,
        /// Segment `lo..hi` (half open).
        #[arg(long)]
        segment: String,
    },
}

#[derive(Args)]
struct CensusArgs {
    #[arg(short)]
    n: usize,
    #[arg(short)]
    m: usize,
    /// Longest word seeding the census that resolves digests.
    #[arg(long, default_value_t = 1)]
    max_word_len: usize,
    #[arg(long)]
    omega: bool,
    /// Extra chain expression whose theory may be named by digest.
    #[arg(long = "expr")]
    exprs: Vec<String>,
}

#[derive(Subcommand)]
enum SeqAction {
    /// Check whether a sequence of theories is formal.
    Check {
        #[command(flatten)]
        census: CensusArgs,
        /// Literal `prefix=[d1,..];period=[..]` of theory digests.
        #[arg(long)]
        seq: String,
    },
    /// Shuffle two sequences along an ultimately periodic index set.
    Shuffle {
        #[arg(long)]
        s: String,
        #[arg(long)]
        t: String,
        /// Index set literal with 0/1 entries.
        #[arg(short)]
        a: String,
    },
}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: &str) -> anyhow::Error {
    Usage(msg.to_string()).into()
}

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read `{path}`"))
}

/// Output collected by a command, with the verdict it reports.
struct Outcome {
    lines: Vec<String>,
    ok: bool,
}

impl Outcome {
    fn verdict(v: bool) -> Outcome {
        Outcome {
            lines: vec![v.to_string()],
            ok: v,
        }
    }
}

fn guards(g: &GuardArgs) -> Guards {
    Guards {
        max_level: g.max_level,
        max_oracle_len: g.max_oracle_len,
        max_closure: g.max_closure,
        max_nodes: g.max_nodes,
    }
}

fn parse_sets(text: &str) -> Result<Vec<PosSet>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    Ok(text.split(';').map(PosSet::parse).collect::<chaincalc::Result<_>>()?)
}

fn parse_params(params: &[String]) -> Result<Vec<PosSet>> {
    Ok(params.iter().map(|p| PosSet::parse(p)).collect::<chaincalc::Result<_>>()?)
}

fn parse_segment(text: &str, len: usize) -> Result<Segment> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| usage("segment must be written `lo..hi`"))?;
    let lo = lo.trim().parse().context("segment start")?;
    let hi = hi.trim().parse().context("segment end")?;
    Ok(Segment::new(lo, hi, len)?)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let guards = guards(&cli.guards);
    let mut engine = TheoryEngine::new(guards);
    match &cli.command {
        Command::Theory {
            n,
            m,
            expr,
            digest_only,
        } => {
            let e = parse_chain_expr(expr, *m)?;
            let t = engine.theory_of_expr(&e, *n)?;
            let mut lines = vec![format!("digest {}", engine.digest(t))];
            if !digest_only {
                lines.push(engine.pretty(t));
            }
            Ok(Outcome { lines, ok: true })
        }
        Command::Decide { m, expr, formula, n } => {
            let f = parse_formula(&formula.text()?, *m)?;
            let e = parse_chain_expr(expr, *m)?;
            let n = n.unwrap_or_else(|| formula_depth(&f));
            let t = engine.theory_of_expr(&e, n)?;
            Ok(Outcome::verdict(engine.decide(&f, t)?))
        }
        Command::Oracle {
            m,
            word,
            formula,
            points,
            sets,
            params,
        } => {
            let w = Word::from_bits(word, *m)?;
            let f = parse_formula(&formula.text()?, *m)?;
            let mut a = Assignment::new().with_params(parse_params(params)?);
            for p in points {
                let (x, v) = p.split_once('=').ok_or_else(|| usage("points are written `x=3`"))?;
                a = a.point(x.trim(), v.trim().parse().context("point value")?);
            }
            for s in sets {
                let (x, v) = s.split_once('=').ok_or_else(|| usage("sets are written `X=0,2`"))?;
                a = a.set(x.trim(), PosSet::parse(v)?);
            }
            Ok(Outcome::verdict(oracle_eval(&w, &f, &a, &guards)?))
        }
        Command::Reachable {
            n,
            m,
            max_word_len,
            omega,
        } => {
            let census = engine.reachable_theories(*n, *m, *max_word_len, *omega)?;
            let mut lines = vec![format!("count {}", census.count())];
            for (i, e) in census.entries.iter().enumerate() {
                lines.push(format!("#{i} {} {}", engine.digest(e.theory), e.provenance));
            }
            Ok(Outcome { lines, ok: true })
        }
        Command::Interp { action } => run_interp(action, &guards),
        Command::Shuffle {
            m,
            n,
            word,
            cuts,
            a,
            xs,
            ys,
        } => {
            let w = Word::from_bits(word, *m)?;
            let cuts = CutPartition::parse(cuts, w.len())?;
            let a = IndexSet::parse(a)?;
            let (xs, ys) = (parse_sets(xs)?, parse_sets(ys)?);
            let zs = shuffle_sets(&xs, &ys, &cuts, &a)?;
            let whole = engine.theory_of_word_with(&w, &zs, *n)?;
            let mut parts = Vec::new();
            for (j, b) in cuts.blocks().iter().enumerate() {
                let src = if a.contains(j) { &xs } else { &ys };
                let sub = w.slice(b.lo, b.hi);
                let local: Vec<PosSet> = src.iter().map(|s| PosSet(s.intersect(b.mask()).0 >> b.lo)).collect();
                parts.push(engine.theory_of_word_with(&sub, &local, *n)?);
            }
            let summed = match engine.sum_all(&parts)? {
                Some(t) => t,
                None => engine.empty_theory(*n, zs.len() + m),
            };
            let consistent = summed == whole;
            let shown: Vec<String> = zs.iter().map(|s| s.to_string()).collect();
            Ok(Outcome {
                lines: vec![
                    format!("sets {}", shown.join(";")),
                    format!("digest {}", engine.digest(whole)),
                    format!("consistent {consistent}"),
                ],
                ok: consistent,
            })
        }
        Command::Seq { action } => run_seq(action, &mut engine),
    }
}

fn load_interp(input: &InterpInput) -> Result<(Interpretation, Word, Vec<PosSet>)> {
    let interp = parse_interp(&read(&input.interp)?)?;
    let w = Word::from_bits(&input.word, input.m)?;
    Ok((interp, w, parse_params(&input.params)?))
}

fn run_interp(action: &InterpAction, guards: &Guards) -> Result<Outcome> {
    match action {
        InterpAction::Check(input) => {
            let (i, w, p) = load_interp(input)?;
            Ok(match respects(&w, &i, &p, guards)? {
                None => Outcome::verdict(true),
                Some(f) => Outcome {
                    lines: vec!["false".into(), f.to_string()],
                    ok: false,
                },
            })
        }
        InterpAction::Image { input, t_axioms: t, tk } => {
            let (i, w, p) = load_interp(input)?;
            let mut model = image(&w, &i, &p, guards)?;
            let mut lines = vec![format!("size {}", model.size), model.render()];
            let mut ok = true;
            let empty = BTreeMap::new();
            if let Some(k) = tk {
                for (j, ax) in tk_axioms(*k)?.iter().enumerate() {
                    let v = model_check_fo(&model, ax, &empty)?;
                    ok &= v;
                    lines.push(format!("tk{k}[{j}] {v}"));
                }
            }
            if *t {
                model.rename("Code", "p")?;
                for (j, ax) in t_axioms().iter().enumerate() {
                    let v = model_check_fo(&model, ax, &empty)?;
                    ok &= v;
                    lines.push(format!("t[{}] {v}", ['a', 'b', 'c'][j]));
                }
            }
            Ok(Outcome { lines, ok })
        }
        InterpAction::Bouquet { input, segment } => {
            let (i, w, p) = load_interp(input)?;
            let seg = parse_segment(segment, w.len())?;
            let s = Structure::compute(&w, &i, &p, guards)?;
            Ok(Outcome {
                lines: vec![s.bouquet_size(&seg)?.to_string()],
                ok: true,
            })
        }
    }
}

fn resolve_digests(args: &CensusArgs, engine: &mut TheoryEngine) -> Result<BTreeMap<String, TheoryHandle>> {
    let census = engine.reachable_theories(args.n, args.m, args.max_word_len, args.omega)?;
    let mut named = BTreeMap::new();
    for t in census.theories() {
        named.insert(engine.digest(t), t);
    }
    for e in &args.exprs {
        let t = engine.theory_of_expr(&parse_chain_expr(e, args.m)?, args.n)?;
        named.insert(engine.digest(t), t);
    }
    Ok(named)
}

fn run_seq(action: &SeqAction, engine: &mut TheoryEngine) -> Result<Outcome> {
    match action {
        SeqAction::Check { census, seq } => {
            let named = resolve_digests(census, engine)?;
            let s: UpSequence<TheoryHandle> = parse_literal(seq, |d| {
                named.get(d).copied().ok_or_else(|| chaincalc::Error::Mismatch(format!("unknown digest `{d}`")))
            })?;
            Ok(match engine.check_formal_sequence(&s)? {
                None => Outcome::verdict(true),
                Some((i, j)) => Outcome {
                    lines: vec!["false".into(), format!("witness {i} {j}")],
                    ok: false,
                },
            })
        }
        SeqAction::Shuffle { s, t, a } => {
            let item = |d: &str| Ok(d.to_string());
            let s = parse_literal(s, item)?;
            let t = parse_literal(t, item)?;
            let a = UpIndexSet::parse(a)?;
            Ok(Outcome {
                lines: vec![formal_shuffle(&s, &t, &a)?.render()],
                ok: true,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            if !cli.quiet {
                let mut stdout = std::io::stdout().lock();
                for line in &out.lines {
                    if writeln!(stdout, "{line}").is_err() {
                        break;
                    }
                }
            }
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(e) => {
            if !cli.quiet || e.is::<Usage>() {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(2)
        }
    }
}

