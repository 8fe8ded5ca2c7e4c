//! One line per acceptance criterion. Runs without the libtest harness so the
//! output reads as a checklist; exits nonzero if any line fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use tautcalc_core::hyperelliptic_db::{proportionality, HypClassId, Registry};
use tautcalc_core::rational::{format, frac, int};
use tautcalc_core::taut_expr::scalar_of;
use tautcalc_core::test_curves::free_labels;
use tautcalc_core::verify::{self, Group, VerifyOptions};
use tautcalc_core::{b_curve_pairing, conj_pair_family, parse, pair, MarkedSpace, Rational, Result, TautExpr};

struct Outcome {
    passed: bool,
    detail: String,
}

fn ok(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn show(v: &[Rational]) -> String {
    v.iter().map(format).collect::<Vec<_>>().join(", ")
}

fn logan() -> Result<Outcome> {
    let f = conj_pair_family(0);
    let terms = ["-1*lambda", "psi[+]", "psi[-]", "-3*d[2;]", "-1*d[1;]"]
        .iter()
        .map(|t| pair(&f, &parse(f.space(), t)?))
        .collect::<Result<Vec<_>>>()?;
    let expected_terms = vec![int(0), int(8), int(8), int(-18), int(0)];
    let mut totals = Vec::new();
    for n in 0..=3 {
        let h = Registry::shared().class_of(&HypClassId::new(0, 1, n)?)?;
        totals.push(pair(&conj_pair_family(n), &h)?);
    }
    let passed = terms == expected_terms && totals.iter().all(|v| *v == int(-2));
    Ok(ok(passed, format!("terms [{}], totals n=0..3 [{}]", show(&terms), show(&totals))))
}

fn notprop() -> Result<Outcome> {
    let mut got = Vec::new();
    for n in 0..=2 {
        let h = Registry::shared().class_of(&HypClassId::new(2, 0, n)?)?;
        let psi = TautExpr::psi(h.space(), "w1", n as u32 + 3)?;
        got.push(h.multiply(&psi)?.integrate()?);
    }
    Ok(ok(got.iter().all(|v| *v == frac(1, 384)), format!("n=0..2 [{}]", show(&got))))
}

fn w_vanishing() -> Result<Outcome> {
    let mut got = Vec::new();
    for n in 0..=3 {
        let mut side = vec!["w1".to_string(), "w2".to_string()];
        side.extend(free_labels(n));
        let s = MarkedSpace::new(2, side.clone())?;
        let w = TautExpr::w_class(&s, &side)?;
        got.push(w.multiply(&TautExpr::psi(&s, "w1", n as u32 + 3)?)?.integrate()?);
    }
    Ok(ok(got.iter().all(|v| *v == int(0)), format!("n=0..3 [{}]", show(&got))))
}

fn b_curve() -> Result<Outcome> {
    let mut got = Vec::new();
    let mut passed = true;
    for n in 0..=2 {
        let b = b_curve_pairing(n)?;
        passed &= b.value == frac(-1, 8) && b.is_negative() && b.up_to_positive_power_of_two;
        got.push(b.value);
    }
    Ok(ok(passed, format!("n=0..2 [{}], negative, up to a positive power of two", show(&got))))
}

fn report_group(group: Group, filter: impl Fn(&str) -> bool) -> Outcome {
    let report = verify::run(&VerifyOptions { only: vec![group], ..VerifyOptions::default() });
    let checks: Vec<_> = report.checks.iter().filter(|c| filter(&c.name)).collect();
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    let mut detail = format!("{} checks, {} failed", checks.len(), failed.len());
    if let Some(first) = failed.first() {
        detail.push_str(&format!(" (first: {first})"));
    }
    ok(!checks.is_empty() && failed.is_empty(), detail)
}

fn omega_dilaton() -> Result<Outcome> {
    Ok(report_group(Group::Omega, |name| name.starts_with("g=")))
}

fn omega_swap() -> Result<Outcome> {
    Ok(report_group(Group::Omega, |name| name.starts_with("n=")))
}

fn ladder() -> Result<Outcome> {
    let reg = Registry::shared();
    let chen_tarasca = reg.class_of(&HypClassId::new(2, 0, 0)?)?;
    let total = scalar_of(&chen_tarasca.pushforward_forget("w2")?.pushforward_forget("w1")?)?;
    let mut steps = Vec::new();
    for n in 1..=3 {
        let big = reg.class_of(&HypClassId::new(2, 0, n)?)?;
        let prev = reg.class_of(&HypClassId::new(2, 0, n - 1)?)?;
        let p = format!("p{n}");
        let down = TautExpr::omega(big.space(), &p, 1)?.multiply(&big)?.pushforward_forget(&p)?;
        steps.push(proportionality(&down, &prev)?);
    }
    let passed = total == Some(int(30)) && steps.iter().all(|c| *c == Some(int(2)));
    let shown: Vec<String> = steps.iter().map(|c| c.as_ref().map(format).unwrap_or_else(|| "none".into())).collect();
    Ok(ok(
        passed,
        format!(
            "double pushforward {}, omega step n=1..3 [{}]",
            total.as_ref().map(format).unwrap_or_else(|| "not scalar".into()),
            shown.join(", ")
        ),
    ))
}

fn w_pullback() -> Result<Outcome> {
    let mut matches = Vec::new();
    for n in 1..=3usize {
        let new = format!("p{n}");
        let mut ls = vec!["w1".to_string(), "w2".to_string()];
        ls.extend(free_labels(n - 1));
        let small = MarkedSpace::new(2, ls)?;
        let big = small.with_marking(&new)?;
        let side = ["w1", "w2"];
        let lhs = TautExpr::w_class(&small, &side)?
            .pullback_forget(&new)?
            .sub(&TautExpr::w_class(&big, &side)?)?
            .normalize()?;
        let rhs = TautExpr::w_class(&big, &["w1", "w2", new.as_str()])?.normalize()?;
        matches.push(lhs == rhs);
    }
    Ok(ok(matches.iter().all(|m| *m), format!("n=1..3 {matches:?}")))
}

fn engine() -> Result<Outcome> {
    Ok(report_group(Group::Engine, |_| true))
}

fn end_to_end() -> Result<Outcome> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_tautcalc"))
        .arg("verify")
        .output()
        .map_err(|e| tautcalc_core::TautError::Unsupported(e.to_string()))?;
    let elapsed = start.elapsed();
    let summary = String::from_utf8_lossy(&out.stdout).lines().last().unwrap_or("").to_string();
    let code = out.status.code();
    Ok(ok(
        code == Some(0) && elapsed < Duration::from_secs(60),
        format!("exit {code:?} in {:.1}s: {summary}", elapsed.as_secs_f64()),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("Logan pairing", logan),
        ("1/384", notprop),
        ("W vanishing", w_vanishing),
        ("admissible-cover pairing", b_curve),
        ("omega dilaton", omega_dilaton),
        ("omega swap", omega_swap),
        ("pushforward ladder", ladder),
        ("W pullback identity", w_pullback),
        ("engine properties", engine),
        ("verify end to end", end_to_end),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = check().unwrap_or_else(|e| ok(false, format!("error: {e}")));
        if !outcome.passed {
            failures += 1;
        }
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {:>2} {name}: {}", i + 1, outcome.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
