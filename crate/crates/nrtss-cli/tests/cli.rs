use std::process::{Command, Output};

fn nrtss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nrtss")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

const OPEN: &str = "(new ([b] (out a b (null))))";
const COMM: &str = "(par (out a a (null)) (in a ([b] (out c b (null)))))";

#[test]
fn step_open() {
    let o = nrtss(&["step", "--calculus", "early", OPEN]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l.trim() == "boutA(a,b) / (null)"), "{}", stdout(&o));
}

#[test]
fn step_late_communication() {
    let o = nrtss(&["step", "--calculus", "late", COMM]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l.trim() == "tauA / (par (null) (out c a (null)))"));
}

#[test]
fn step_null() {
    let o = nrtss(&["step", "--calculus", "early", "(null)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\n0 transitions\n"));
}

#[test]
fn step_with_proof() {
    let o = nrtss(&["step", "--calculus", "early", "--proof", OPEN]);
    let out = stdout(&o);
    assert!(out.contains("Open [a=a b=b]"), "{out}");
    assert!(out.contains("with b # a"), "{out}");
}

#[test]
fn step_alpha_keeps_written_binders() {
    let src = "(in a ([b] (out c b (null))))";
    let canonical = stdout(&nrtss(&["step", "--calculus", "late", src]));
    let written = stdout(&nrtss(&["step", "--calculus", "late", "--alpha", src]));
    assert!(canonical.starts_with("state (in a ([a] (out c a (null))))"), "{canonical}");
    assert!(written.starts_with(&format!("state {src}")), "{written}");
}

#[test]
fn step_from_a_rule_file() {
    let path = format!("{}/../nrtss/fixtures/early.nrtss", env!("CARGO_MANIFEST_DIR"));
    let o = nrtss(&["step", "--calculus", &path, OPEN]);
    assert_eq!(stdout(&o), stdout(&nrtss(&["step", "--calculus", "early", OPEN])));
}

#[test]
fn check_verdicts() {
    let acr = nrtss(&["check", "--calculus", "early", "--format", "acr"]);
    assert_eq!(acr.status.code(), Some(0));
    assert!(stdout(&acr).lines().last().unwrap().starts_with("PASS early acr"));
    let ba = nrtss(&["check", "--calculus", "late-abs", "--format", "ba"]);
    assert_eq!(ba.status.code(), Some(0));
    assert!(stdout(&ba).lines().last().unwrap().starts_with("PASS late-abs ba"));
    for name in ["early", "late", "early-abs", "late-abs"] {
        assert_eq!(nrtss(&["check", "--calculus", name, "--format", "equivariant"]).status.code(), Some(0));
    }
}

#[test]
fn check_without_nf_filter_fails_at_res() {
    let o = nrtss(&["check", "--calculus", "early", "--format", "acr", "--no-nf-filter"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("Res case=boutA") && l.contains("ob=i -> FAIL")), "{out}");
}

#[test]
fn check_json_dump() {
    let o = nrtss(&["check", "--calculus", "early-abs", "--format", "ba", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["format"], "ba");
    assert!(v["obligations"].as_array().unwrap().iter().all(|o| o["pass"] == true));
}

#[test]
fn translations_agree() {
    for (calc, term) in [("early", OPEN), ("late", COMM), ("early-abs", OPEN), ("late-abs", COMM)] {
        let o = nrtss(&["translate", "--calculus", calc, term]);
        assert_eq!(o.status.code(), Some(0), "{calc}: {}", stdout(&o));
        assert!(stdout(&o).ends_with("empty diff\n"));
    }
}

#[test]
fn roundtrip_of_derived_sets() {
    for calc in ["early", "late", "early-abs", "late-abs"] {
        let o = nrtss(&["roundtrip", "--calculus", calc, COMM]);
        assert_eq!(o.status.code(), Some(0), "{calc}: {}", stdout(&o));
    }
}

#[test]
fn roundtrip_names_the_ba_witness() {
    let o = nrtss(&["roundtrip", "--calculus", "early-abs", "--transitions", &data("ba_violation.json")]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("ba-violation (tau (out a a (null))) --> [a] tauA / (out a a (null))"), "{out}");
    assert!(out.ends_with("non-empty diff\n"));
}

#[test]
fn json_output_reads_back() {
    let o = nrtss(&["step", "--calculus", "early-abs", "--json", COMM]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let first = &v["transitions"][0];
    let keys: Vec<&str> = first.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(keys, ["source", "style", "binder", "action", "target", "residual"]);
    let path = std::env::temp_dir().join(format!("nrtss-cli-{}.json", std::process::id()));
    std::fs::write(&path, stdout(&o)).unwrap();
    let back = nrtss(&["roundtrip", "--calculus", "early-abs", "--transitions", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(back.status.code(), Some(0), "{}", stdout(&back));
}

#[test]
fn proofs_in_json() {
    let o = nrtss(&["step", "--calculus", "early", "--json", "--proof", OPEN]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let proof = &v["transitions"][0]["proof"];
    assert_eq!(proof["rule"], "Open");
    assert_eq!(proof["children"][0]["rule"], "Out");
    assert_eq!(proof["discharged"][0], "b # a");
}

#[test]
fn output_is_byte_stable() {
    for args in [
        vec!["step", "--calculus", "late", "--json", "--proof", COMM],
        vec!["trace", "--calculus", "early", "--depth", "2", COMM],
        vec!["selftest", "--seed", "7", "--cases", "8"],
    ] {
        assert_eq!(nrtss(&args).stdout, nrtss(&args).stdout, "{args:?}");
    }
}

#[test]
fn trace_explores_reachable_states() {
    let o = nrtss(&["trace", "--calculus", "late", "--depth", "1", COMM]);
    let out = stdout(&o);
    assert!(out.contains("= (par (null) (out c a (null)))"), "{out}");
    assert!(out.lines().any(|l| l.starts_with("s0 --tauA--> s")), "{out}");
}

#[test]
fn selftest_default_is_green() {
    let o = nrtss(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().skip(1).all(|l| l.starts_with("PASS ")));
}

#[test]
fn selftest_entailment_oracle() {
    let o = nrtss(&["selftest", "--suite", "entailment-oracle", "--atoms", "4", "--depth", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS entailment-oracle"));
}

#[test]
fn selftest_forced_failure_shows_counterexamples() {
    let o = nrtss(&["selftest", "--force-failure", "--suite", "alpha-conversion", "--cases", "20"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAIL alpha-conversion"), "{out}");
    assert!(out.contains("has no variant"), "{out}");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["step", "--calculus", "nope", OPEN],
        vec!["step", "--calculus", "early", "(nul)"],
        vec!["check", "--calculus", "early", "--format", "ba"],
        vec!["check", "--calculus", "early", "--format", "bogus"],
        vec!["selftest", "--suite", "bogus"],
        vec!["roundtrip", "--calculus", "early-abs", "--transitions", "/nonexistent.json"],
        vec![],
    ] {
        assert_eq!(nrtss(&args).status.code(), Some(2), "{args:?}");
    }
}
