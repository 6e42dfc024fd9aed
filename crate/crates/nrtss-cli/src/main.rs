//! `nrtss`: derive transitions, check rule formats, translate between
//! residual styles and run the property suites.
//!
//! Exit codes: 0 pass, 1 check or diff failure, 2 usage or parse error.

mod json;

use std::collections::{BTreeMap, VecDeque};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nrtss::calculi::{bundle, counterpart, CalculusBundle};
use nrtss::engine::{format_residual, AtomPool, Derivation, Engine, Transition, DEFAULT_FRESH_SLACK, DEFAULT_FUEL};
use nrtss::formats::{check_acr, check_ba, check_equivariant, AcrOptions, Report};
use nrtss::nrtss::{parse_ruleset, Nrtss};
use nrtss::props::derived_set;
use nrtss::selftest::{self, SUITES};
use nrtss::syntax::parse_term;
use nrtss::translate::{alpha_close, roundtrip_abs, roundtrip_plain, trans_abs, trans_conc, RoundTrip, Style};
use nrtss::{interpret, NominalTerm};

#[derive(Parser)]
#[command(name = "nrtss", version, about = "Nominal residual transition system specifications")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct PoolArgs {
    /// Fresh atoms per sort added to the support of the state.
    #[arg(long, default_value_t = DEFAULT_FRESH_SLACK)]
    extra_fresh: usize,
    /// Bound on derivation depth.
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the transitions of a state.
    Step {
        /// `early`, `late`, `early-abs`, `late-abs` or a rule-spec file.
        #[arg(long)]
        calculus: String,
        term: String,
        #[command(flatten)]
        pool: PoolArgs,
        /// Print a proof tree under each transition.
        #[arg(long)]
        proof: bool,
        /// Print states with the binder names they were written with.
        #[arg(long)]
        alpha: bool,
        #[arg(long)]
        json: bool,
    },
    /// Explore the states reachable from a state, breadth first, over the
    /// atom pool of the initial state.
    Trace {
        #[arg(long)]
        calculus: String,
        term: String,
        #[command(flatten)]
        pool: PoolArgs,
        /// Number of steps to follow.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Stop after this many states.
        #[arg(long, default_value_t = 200)]
        max_states: usize,
        #[arg(long)]
        json: bool,
    },
    /// Check a bundled calculus against a rule format.
    Check {
        #[arg(long)]
        calculus: String,
        #[arg(long, value_enum)]
        format: Format,
        /// Check every candidate atom, including those that cannot be fresh.
        #[arg(long)]
        no_nf_filter: bool,
        /// Also check instances identifying atom metavariables.
        #[arg(long)]
        all_instances: bool,
        /// Print the environments compared by each obligation.
        #[arg(long)]
        verbose: bool,
        #[arg(long)]
        json: bool,
    },
    /// Translate the transitions of a state to the other residual style and
    /// compare them with the counterpart calculus.
    Translate {
        #[arg(long)]
        calculus: String,
        term: String,
        #[command(flatten)]
        pool: PoolArgs,
        #[arg(long)]
        json: bool,
    },
    /// Translate there and back and report the difference.
    Roundtrip {
        #[arg(long)]
        calculus: String,
        /// State whose derived transitions are used.
        #[arg(required_unless_present = "transitions", conflicts_with = "transitions")]
        term: Option<String>,
        /// Transition set in the JSON record format instead of a state.
        #[arg(long)]
        transitions: Option<PathBuf>,
        #[command(flatten)]
        pool: PoolArgs,
        #[arg(long)]
        json: bool,
    },
    /// Run the seeded property suites.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run only these suites.
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: Vec<String>,
        /// Channel atoms in generated terms.
        #[arg(long)]
        atoms: Option<u32>,
        /// Depth of generated terms.
        #[arg(long)]
        depth: Option<usize>,
        /// Samples per suite.
        #[arg(long)]
        cases: Option<usize>,
        #[command(flatten)]
        pool: PoolArgs,
        /// Sabotage the checks to show how counterexamples are reported.
        #[arg(long)]
        force_failure: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Equivariant,
    Acr,
    Ba,
}

enum Failure {
    /// A check or diff failed; the report is already printed.
    Check,
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Run = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd) -> Run {
    match cmd {
        Cmd::Step { calculus, term, pool, proof, alpha, json } => step(&calculus, &term, &pool, proof, alpha, json),
        Cmd::Trace { calculus, term, pool, depth, max_states, json } => trace(&calculus, &term, &pool, depth, max_states, json),
        Cmd::Check { calculus, format, no_nf_filter, all_instances, verbose, json } => {
            check(&calculus, format, AcrOptions { nf_filter: !no_nf_filter, all_instances }, verbose, json)
        }
        Cmd::Translate { calculus, term, pool, json } => translate(&calculus, &term, &pool, json),
        Cmd::Roundtrip { calculus, term, transitions, pool, json } => roundtrip(&calculus, term, transitions, &pool, json),
        Cmd::Selftest { seed, suite, atoms, depth, cases, pool, force_failure, json } => {
            let cfg = selftest::Config {
                seed,
                cases,
                atoms,
                depth,
                fuel: pool.fuel,
                extra_fresh: pool.extra_fresh,
                force_failure,
            };
            run_selftest(&suite, &cfg, json)
        }
    }
}

/// A bundled calculus by name, or the rules of a file.
fn load(calculus: &str) -> Result<Nrtss, Failure> {
    match bundle(calculus) {
        Ok(b) => Ok(b.nrtss),
        Err(_) if std::path::Path::new(calculus).is_file() => Ok(parse_ruleset(&std::fs::read_to_string(calculus)?)?),
        Err(_) => Err(Failure::Usage(format!(
            "unknown calculus {calculus}; expected early, late, early-abs, late-abs or a rule-spec file"
        ))),
    }
}

fn load_bundle(calculus: &str) -> Result<CalculusBundle, Failure> {
    bundle(calculus).map_err(|_| Failure::Usage(format!("unknown calculus {calculus}; expected early, late, early-abs or late-abs")))
}

fn parse_state(n: &Nrtss, src: &str) -> Result<NominalTerm, Failure> {
    let raw = parse_term(&n.signature, src, Some(&n.state_sort))?;
    Ok(interpret(&raw)?)
}

fn style_of(n: &Nrtss) -> Style {
    if n.is_abstraction() {
        Style::Abstraction
    } else {
        Style::Plain
    }
}

fn pool_line(pool: &AtomPool) -> String {
    let atoms: Vec<String> = pool.atoms().iter().map(|a| a.to_string()).collect();
    format!("pool {{{}}}", atoms.join(", "))
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serialisable"));
}

fn step(calculus: &str, term: &str, pa: &PoolArgs, proof: bool, alpha: bool, as_json: bool) -> Run {
    let n = load(calculus)?;
    let p = parse_state(&n, term)?;
    let pool = AtomPool::for_state(&n.signature, &p, pa.extra_fresh);
    let d = Engine::new(&n).derive(&p, &pool, pa.fuel)?;
    if as_json {
        print_json(&json::derivation(&n, &p, &pool, pa.fuel, &d, proof));
        return Ok(());
    }
    let shown = if alpha { p.display_alpha() } else { p.to_string() };
    println!("state {shown}");
    println!("{}  fuel {}", pool_line(&pool), pa.fuel);
    if d.incomplete {
        println!("warning: fuel ran out; the set may be incomplete");
    }
    println!("{} transition{}", d.len(), if d.len() == 1 { "" } else { "s" });
    for (t, pt) in &d.transitions {
        println!("  {}", format_residual(&t.residual));
        if proof {
            for line in pt.render().lines() {
                println!("      {line}");
            }
        }
    }
    Ok(())
}

/// Target state of a residual, inside the abstraction if there is one.
fn target(r: &NominalTerm) -> Option<NominalTerm> {
    let body = match r.as_abs() {
        Some((_, b)) => b,
        None => r.clone(),
    };
    body.components().and_then(|cs| cs.get(1).cloned())
}

fn trace(calculus: &str, term: &str, pa: &PoolArgs, depth: usize, max_states: usize, as_json: bool) -> Run {
    let n = load(calculus)?;
    let p = parse_state(&n, term)?;
    let pool = AtomPool::for_state(&n.signature, &p, pa.extra_fresh);
    let mut engine = Engine::new(&n);
    let mut ids: BTreeMap<NominalTerm, usize> = BTreeMap::new();
    let mut states = vec![p.clone()];
    let mut edges: Vec<(usize, String, usize)> = Vec::new();
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    let mut truncated = false;
    let mut incomplete = false;
    ids.insert(p, 0);
    while let Some((i, level)) = queue.pop_front() {
        if level == depth {
            continue;
        }
        let d: Derivation = engine.derive(&states[i].clone(), &pool, pa.fuel)?;
        incomplete |= d.incomplete;
        for t in d.transitions.keys() {
            let Some(q) = target(&t.residual) else { continue };
            let j = match ids.get(&q) {
                Some(&j) => j,
                None if states.len() < max_states => {
                    ids.insert(q.clone(), states.len());
                    states.push(q);
                    queue.push_back((states.len() - 1, level + 1));
                    states.len() - 1
                }
                None => {
                    truncated = true;
                    continue;
                }
            };
            let label = format_residual(&t.residual);
            let label = label.rsplit_once(" / ").map_or(label.clone(), |(l, _)| l.to_string());
            edges.push((i, label, j));
        }
    }
    if as_json {
        print_json(&json::trace(&n, &pool, pa.fuel, &states, &edges, truncated, incomplete));
        return Ok(());
    }
    println!("{}  fuel {}  depth {depth}", pool_line(&pool), pa.fuel);
    for (i, s) in states.iter().enumerate() {
        println!("s{i} = {s}");
    }
    for (i, l, j) in &edges {
        println!("s{i} --{l}--> s{j}");
    }
    if truncated {
        println!("stopped at {max_states} states");
    }
    if incomplete {
        println!("warning: fuel ran out; some sets may be incomplete");
    }
    Ok(())
}

fn check(calculus: &str, format: Format, opts: AcrOptions, verbose: bool, as_json: bool) -> Run {
    let b = load_bundle(calculus)?;
    let report: Report = match format {
        Format::Equivariant => check_equivariant(&b.nrtss),
        Format::Acr => {
            let bn = b.bn.as_ref().ok_or_else(|| {
                Failure::Usage(format!("{calculus} has abstraction residuals; the acr format needs plain residuals"))
            })?;
            check_acr(&b.nrtss, bn, &b.strat, &b.inert, opts)?
        }
        Format::Ba => {
            if b.bn.is_some() {
                return Err(Failure::Usage(format!("{calculus} has plain residuals; the ba format needs abstraction residuals")));
            }
            check_ba(&b.nrtss, &b.strat)?
        }
    };
    if as_json {
        print_json(&json::report(calculus, &report));
    } else {
        let lines = if verbose { report.verbose_lines() } else { report.lines() };
        for l in lines {
            println!("{l}");
        }
        let failed = report.failures().count();
        if failed == 0 {
            println!("PASS {calculus} {}: {} obligations", report.format, report.obligations.len());
        } else {
            println!("FAIL {calculus} {}: {failed} of {} obligations fail", report.format, report.obligations.len());
        }
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn print_diff(header: &str, lines: &[String], as_json: bool, extra: serde_json::Value) -> Run {
    if as_json {
        let mut v = extra;
        v["equal"] = lines.is_empty().into();
        v["diff"] = lines.iter().map(|s| serde_json::Value::from(s.as_str())).collect();
        print_json(&v);
    } else {
        println!("{header}");
        for l in lines {
            println!("  {l}");
        }
        println!("{}", if lines.is_empty() { "empty diff" } else { "non-empty diff" });
    }
    if lines.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn translate(calculus: &str, term: &str, pa: &PoolArgs, as_json: bool) -> Run {
    let b = load_bundle(calculus)?;
    let other = load_bundle(counterpart(calculus).expect("bundled calculi are paired"))?;
    let p = parse_state(&b.nrtss, term)?;
    let pool = AtomPool::for_state(&b.nrtss.signature, &p, pa.extra_fresh);
    let mine = derived_set(&mut Engine::new(&b.nrtss), &p, &pool, pa.fuel)?;
    let theirs = derived_set(&mut Engine::new(&other.nrtss), &p, &pool, pa.fuel)?;
    let (translated, expected, how) = match &b.bn {
        Some(bn) => (trans_abs(&mine, bn)?, theirs, "TransAbs"),
        None => {
            let bn = other.bn.as_ref().expect("plain counterpart");
            (trans_conc(&mine, &pool)?.0, alpha_close(&theirs, bn, &pool)?, "Trans")
        }
    };
    let mut lines = Vec::new();
    for t in translated.transitions.difference(&expected.transitions) {
        lines.push(format!("only translated: {}", show(t)));
    }
    for t in expected.transitions.difference(&translated.transitions) {
        lines.push(format!("only {}: {}", other.name, show(t)));
    }
    let header = format!(
        "{how} of {} {calculus} transitions against {} {} transitions of {p}",
        mine.len(),
        expected.len(),
        other.name
    );
    let extra = serde_json::json!({
        "calculus": calculus,
        "counterpart": other.name,
        "source": p.to_string(),
        "translated": json::transition_set(&translated),
        "expected": json::transition_set(&expected),
    });
    print_diff(&header, &lines, as_json, extra)
}

fn show(t: &Transition) -> String {
    format!("{} --> {}", t.source, format_residual(&t.residual))
}

fn roundtrip(calculus: &str, term: Option<String>, file: Option<PathBuf>, pa: &PoolArgs, as_json: bool) -> Run {
    let b = load_bundle(calculus)?;
    let (ts, pool) = match (term, file) {
        (Some(src), _) => {
            let p = parse_state(&b.nrtss, &src)?;
            let pool = AtomPool::for_state(&b.nrtss.signature, &p, pa.extra_fresh);
            (derived_set(&mut Engine::new(&b.nrtss), &p, &pool, pa.fuel)?, pool)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let ts = json::read_transitions(&b.nrtss, style_of(&b.nrtss), &text)?;
            let atoms = ts.transitions.iter().flat_map(|t| t.support());
            let pool = AtomPool::around(&b.nrtss.signature, atoms, pa.extra_fresh);
            (ts, pool)
        }
        (None, None) => return Err(Failure::Usage("give a term or --transitions".into())),
    };
    let r: RoundTrip = match &b.bn {
        Some(bn) => roundtrip_plain(&ts, bn, &pool)?,
        None => roundtrip_abs(&ts, &pool)?,
    };
    let header = format!("round trip of {} {} transitions over {}", ts.len(), ts.style, pool_line(&pool));
    let extra = serde_json::json!({ "calculus": calculus, "input": json::transition_set(&ts) });
    print_diff(&header, &r.lines(), as_json, extra)
}

fn run_selftest(suites: &[String], cfg: &selftest::Config, as_json: bool) -> Run {
    let names: Vec<&str> = if suites.is_empty() { SUITES.to_vec() } else { suites.iter().map(|s| s.as_str()).collect() };
    let mut outcomes = Vec::new();
    for s in names {
        outcomes.push(selftest::run(s, cfg)?);
    }
    let ok = outcomes.iter().all(|o| o.passed());
    if as_json {
        print_json(&json::selftest(cfg.seed, &outcomes));
    } else {
        println!("seed {}", cfg.seed);
        for o in &outcomes {
            if o.passed() {
                println!("PASS {}: {}", o.suite, o.summary);
            } else {
                println!("FAIL {}: {}; {} counterexamples", o.suite, o.summary, o.counterexamples.len());
                for c in o.counterexamples.iter().take(5) {
                    println!("  {c}");
                }
                if o.counterexamples.len() > 5 {
                    println!("  ... {} more", o.counterexamples.len() - 5);
                }
            }
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}
