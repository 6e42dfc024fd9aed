//! Seeded property suites behind the `selftest` command.
//!
//! Process suites sample random processes shared by all four calculi. The
//! plain calculi are not closed under alpha-conversion of residuals for
//! processes that replicate a choice (see
//! [`replicates_choice`](crate::calculi::replicates_choice)); the alpha,
//! translation and round-trip suites skip those processes for the plain
//! calculi and say how many they skipped.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculi::{bundle, counterpart, replicates_choice, CalculusBundle, NAMES};
use crate::engine::{format_residual, AtomPool, Engine, DEFAULT_FRESH_SLACK, DEFAULT_FUEL};
use crate::error::{Error, Result};
use crate::formats::{test_stratification_on, StratSpec};
use crate::freshness::{entails, simplify_with};
use crate::gen::{random_consequence, random_env, random_state, reduced_shapes, EntailmentOracle, EnvShape};
use crate::nominal::NominalTerm;
use crate::props::{
    check_alpha_residuals, check_binding_condition, check_equivariance, check_roundtrip, check_translation, derived_set,
};
use crate::foundation::Atom;
use crate::translate::TransitionSet;

pub const SUITES: [&str; 7] = [
    "normal-forms",
    "entailment-oracle",
    "equivariance",
    "alpha-conversion",
    "translation",
    "roundtrip",
    "stratification",
];

#[derive(Clone, Debug)]
pub struct Config {
    pub seed: u64,
    /// Samples per suite; `None` picks a per-suite default.
    pub cases: Option<usize>,
    /// Channel atoms; defaults to 3 for processes and 4 for environments.
    pub atoms: Option<u32>,
    /// Term depth; defaults to 4 for processes and 2 for oracle instances.
    pub depth: Option<usize>,
    pub fuel: usize,
    pub extra_fresh: usize,
    /// Sabotage each suite so that it reports counterexamples.
    pub force_failure: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            cases: None,
            atoms: None,
            depth: None,
            fuel: DEFAULT_FUEL,
            extra_fresh: DEFAULT_FRESH_SLACK,
            force_failure: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub suite: String,
    pub summary: String,
    pub counterexamples: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

pub fn run(suite: &str, cfg: &Config) -> Result<Outcome> {
    let (summary, counterexamples) = match suite {
        "normal-forms" => normal_forms(cfg),
        "entailment-oracle" => entailment_oracle(cfg),
        "equivariance" => equivariance(cfg)?,
        "alpha-conversion" => alpha_conversion(cfg)?,
        "translation" => translation(cfg)?,
        "roundtrip" => roundtrip(cfg)?,
        "stratification" => stratification(cfg)?,
        _ => return Err(Error::Other(format!("unknown suite {suite}; expected one of {}", SUITES.join(", ")))),
    };
    Ok(Outcome {
        suite: suite.to_string(),
        summary,
        counterexamples,
    })
}

pub fn run_all(cfg: &Config) -> Result<Vec<Outcome>> {
    SUITES.iter().map(|s| run(s, cfg)).collect()
}

fn rng(cfg: &Config, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(salt))
}

fn normal_forms(cfg: &Config) -> (String, Vec<String>) {
    let n = cfg.cases.unwrap_or(300);
    let shape = EnvShape::new(6, cfg.depth.unwrap_or(4), cfg.atoms.unwrap_or(4), 3);
    let (mut r, mut s1, mut s2) = (rng(cfg, 1), rng(cfg, 2), rng(cfg, 3));
    let mut bad = Vec::new();
    for i in 0..n {
        let env = random_env(&mut r, &shape);
        let (n1, _) = simplify_with(&env, |k| s1.gen_range(0..k));
        let n2 = if cfg.force_failure { env.clone() } else { simplify_with(&env, |k| s2.gen_range(0..k)).0 };
        if n1 != n2 {
            bad.push(format!("environment {i} {env}: {n1} vs {n2}"));
        } else if !reduced_shapes(&n1) {
            bad.push(format!("environment {i} {env}: {n1} is not reduced"));
        }
    }
    (format!("{n} environments"), bad)
}

fn entailment_oracle(cfg: &Config) -> (String, Vec<String>) {
    let n = cfg.cases.unwrap_or(200);
    let shape = EnvShape::new(4, 3, cfg.atoms.unwrap_or(4), 2);
    let mut oracle = EntailmentOracle::new(&shape, cfg.depth.unwrap_or(2));
    let mut r = rng(cfg, 4);
    let mut bad = Vec::new();
    let mut entailed = 0;
    for i in 0..n {
        let e1 = random_env(&mut r, &shape);
        let e2 = if r.gen_bool(0.5) { random_consequence(&mut r, &shape, &e1) } else { random_env(&mut r, &shape) };
        // sabotage: claim entailment of the unrelated side
        let (lhs, rhs) = if cfg.force_failure { (&e2, &e1) } else { (&e1, &e2) };
        if entails(&e1, &e2) {
            entailed += 1;
            if let Some(phi) = oracle.counterexample(lhs, rhs) {
                bad.push(format!("pair {i}: {lhs} |- {rhs} but {phi} separates them"));
            }
        }
    }
    (
        format!("{n} pairs, {entailed} entailed, {} ground instances", oracle.instances()),
        bad,
    )
}

fn processes(cfg: &Config) -> Vec<NominalTerm> {
    let b = bundle("early").expect("bundled");
    let atoms: Vec<Atom> = (0..cfg.atoms.unwrap_or(3)).map(Atom::ch).collect();
    let mut r = rng(cfg, 5);
    let depth = cfg.depth.unwrap_or(4);
    (0..cfg.cases.unwrap_or(40))
        .map(|_| random_state(&mut r, &b.nrtss.signature, &b.nrtss.state_sort, &atoms, depth))
        .collect()
}

struct Sample<'b> {
    bundle: &'b CalculusBundle,
    pool: AtomPool,
    set: TransitionSet,
}

fn sample<'b>(b: &'b CalculusBundle, e: &mut Engine<'_>, p: &NominalTerm, cfg: &Config) -> Result<Sample<'b>> {
    let pool = AtomPool::for_state(&b.nrtss.signature, p, cfg.extra_fresh);
    let mut set = derived_set(e, p, &pool, cfg.fuel)?;
    if cfg.force_failure {
        if let Some(t) = set.transitions.iter().next_back().cloned() {
            set.transitions.remove(&t);
        }
    }
    Ok(Sample { bundle: b, pool, set })
}

fn equivariance(cfg: &Config) -> Result<(String, Vec<String>)> {
    let ps = processes(cfg);
    let mut bad = Vec::new();
    for name in NAMES {
        let b = bundle(name)?;
        let mut e = Engine::new(&b.nrtss);
        for p in &ps {
            let pool = AtomPool::for_state(&b.nrtss.signature, p, cfg.extra_fresh);
            let mut found = check_equivariance(&mut e, p, &pool, cfg.fuel)?;
            if cfg.force_failure && found.is_empty() {
                let s = sample(&b, &mut e, p, cfg)?;
                let full = derived_set(&mut e, p, &pool, cfg.fuel)?;
                found.extend(
                    full.transitions
                        .difference(&s.set.transitions)
                        .map(|t| format!("missing {}", format_residual(&t.residual))),
                );
            }
            bad.extend(found.into_iter().map(|s| format!("{name}: {p}: {s}")));
        }
    }
    Ok((format!("{} processes x 4 calculi", ps.len()), bad))
}

fn alpha_conversion(cfg: &Config) -> Result<(String, Vec<String>)> {
    let ps = processes(cfg);
    let skipped = ps.iter().filter(|p| replicates_choice(p.raw())).count();
    let mut bad = Vec::new();
    for name in NAMES {
        let b = bundle(name)?;
        let mut e = Engine::new(&b.nrtss);
        for p in &ps {
            if b.bn.is_some() && replicates_choice(p.raw()) {
                continue;
            }
            let s = sample(&b, &mut e, p, cfg)?;
            let found = match &s.bundle.bn {
                Some(bn) => check_alpha_residuals(&s.set, bn, &s.pool)?,
                None => check_binding_condition(&s.set)?,
            };
            bad.extend(found.into_iter().map(|s| format!("{name}: {s}")));
        }
    }
    Ok((format!("{} processes x 4 calculi, {skipped} with replicated choice skipped for plain calculi", ps.len()), bad))
}

fn pairs(cfg: &Config, check: &dyn Fn(&Sample, &Sample) -> Result<Vec<String>>) -> Result<(usize, usize, Vec<String>)> {
    let ps = processes(cfg);
    let mut bad = Vec::new();
    let mut skipped = 0;
    for name in ["early", "late"] {
        let plain = bundle(name)?;
        let abs = bundle(counterpart(name).expect("paired"))?;
        let (mut ep, mut ea) = (Engine::new(&plain.nrtss), Engine::new(&abs.nrtss));
        for p in &ps {
            if replicates_choice(p.raw()) {
                skipped += 1;
                continue;
            }
            let sp = sample(&plain, &mut ep, p, cfg)?;
            let sa = sample(&abs, &mut ea, p, cfg)?;
            bad.extend(check(&sp, &sa)?.into_iter().map(|s| format!("{name}: {p}: {s}")));
        }
    }
    Ok((ps.len(), skipped / 2, bad))
}

fn translation(cfg: &Config) -> Result<(String, Vec<String>)> {
    let (n, skipped, bad) = pairs(cfg, &|sp, sa| check_translation(&sp.set, sp.bundle.bn.as_ref().expect("plain"), &sa.set))?;
    Ok((format!("{n} processes x 2 calculus pairs, {skipped} with replicated choice skipped"), bad))
}

fn roundtrip(cfg: &Config) -> Result<(String, Vec<String>)> {
    let (n, skipped, bad) = pairs(cfg, &|sp, sa| {
        let mut out = check_roundtrip(&sp.set, sp.bundle.bn.as_ref(), &sp.pool)?;
        out.extend(check_roundtrip(&sa.set, None, &sa.pool)?);
        Ok(out)
    })?;
    Ok((format!("{n} processes x 4 calculi, {skipped} with replicated choice skipped"), bad))
}

fn stratification(cfg: &Config) -> Result<(String, Vec<String>)> {
    let ps = processes(cfg);
    let mut bad = Vec::new();
    let mut nodes = 0;
    for name in NAMES {
        let b = bundle(name)?;
        let strat = if cfg.force_failure {
            StratSpec {
                defined_shapes: b.strat.defined_shapes.clone(),
                measure: Some(|_, _| Some(0)),
            }
        } else {
            b.strat.clone()
        };
        let r = test_stratification_on(&b.nrtss, &b.strat_mode(), &strat, &ps, cfg.extra_fresh)?;
        nodes += r.nodes;
        bad.extend(r.violations.into_iter().map(|s| format!("{name}: {s}")));
    }
    Ok((format!("{} processes x 4 calculi, {nodes} derivation nodes", ps.len()), bad))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Config {
        Config {
            cases: Some(6),
            depth: Some(3),
            ..Config::default()
        }
    }

    #[test]
    fn suites_pass_by_default() {
        for o in run_all(&small()).unwrap() {
            assert!(o.passed(), "{}: {:?}", o.suite, o.counterexamples);
        }
    }

    #[test]
    fn forced_failures_are_reported() {
        let cfg = Config {
            force_failure: true,
            cases: Some(12),
            ..small()
        };
        for s in ["normal-forms", "equivariance", "alpha-conversion", "stratification"] {
            assert!(!run(s, &cfg).unwrap().passed(), "{s}");
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(run("nope", &small()).is_err());
    }

    #[test]
    fn deterministic() {
        let cfg = small();
        assert_eq!(run("alpha-conversion", &cfg).unwrap(), run("alpha-conversion", &cfg).unwrap());
    }
}
