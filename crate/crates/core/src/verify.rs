//! End-to-end rerun of the hyperelliptic computations and the engine
//! identities they rest on.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, TautError};
use crate::hyperelliptic_db::{verify_relations, HypClassId, Registry};
use crate::parser::parse;
use crate::rational::{factorial, format as fmt_rational, frac, int, Rational};
use crate::stable_graphs::{enumerate_boundary_divisors, DivisorClassId, MarkedSpace};
use crate::taut_expr::{scalar_of, TautExpr};
use crate::test_curves::{b_curve_pairing, conj_pair_family, generator_class, generators, pair};
use crate::wk_engine::{dilaton_check_with, string_check_with, wk, PsiMoment};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Group {
    Logan,
    NotProp,
    WVanishing,
    BCurve,
    Omega,
    Ladder,
    WPullback,
    Engine,
}

impl Group {
    pub const ALL: [Group; 8] = [
        Group::Logan,
        Group::NotProp,
        Group::WVanishing,
        Group::BCurve,
        Group::Omega,
        Group::Ladder,
        Group::WPullback,
        Group::Engine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Group::Logan => "logan",
            Group::NotProp => "notprop",
            Group::WVanishing => "w-vanishing",
            Group::BCurve => "b-curve",
            Group::Omega => "omega",
            Group::Ladder => "ladder",
            Group::WPullback => "w-pullback",
            Group::Engine => "engine",
        }
    }

    pub fn from_name(name: &str) -> Option<Group> {
        Group::ALL.into_iter().find(|g| g.name() == name)
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub type Correlator = Arc<dyn Fn(&PsiMoment) -> Rational + Send + Sync>;

#[derive(Clone)]
pub struct VerifyOptions {
    /// Groups to run; all when empty.
    pub only: Vec<Group>,
    /// Evaluator used by the engine identities.
    pub correlator: Correlator,
    /// Size of the parse/print corpus.
    pub corpus_size: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            only: Vec::new(),
            correlator: Arc::new(|m: &PsiMoment| wk(m).unwrap_or_else(|_| int(0))),
            corpus_size: 200,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub group: Group,
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub passed: bool,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {}: expected {}, computed {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.group,
            self.name,
            self.expected,
            self.computed
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn group(&self, g: Group) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(move |c| c.group == g)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            4
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

struct Recorder<'a> {
    group: Group,
    report: &'a mut Report,
}

impl Recorder<'_> {
    fn value(&mut self, name: impl Into<String>, expected: &Rational, computed: Result<Rational>) {
        let (computed, passed) = match computed {
            Ok(c) => (fmt_rational(&c), &c == expected),
            Err(e) => (format!("error: {e}"), false),
        };
        self.push(name.into(), fmt_rational(expected), computed, passed);
    }

    fn holds(&mut self, name: impl Into<String>, computed: Result<bool>) {
        let (computed, passed) = match computed {
            Ok(true) => ("holds".to_string(), true),
            Ok(false) => ("fails".to_string(), false),
            Err(e) => (format!("error: {e}"), false),
        };
        self.push(name.into(), "holds".into(), computed, passed);
    }

    fn push(&mut self, name: String, expected: String, computed: String, passed: bool) {
        self.report.checks.push(CheckResult {
            group: self.group,
            name,
            expected,
            computed,
            passed,
        });
    }
}

pub fn run(options: &VerifyOptions) -> Report {
    let mut report = Report::default();
    for g in Group::ALL {
        if !options.only.is_empty() && !options.only.contains(&g) {
            continue;
        }
        let mut r = Recorder {
            group: g,
            report: &mut report,
        };
        match g {
            Group::Logan => logan(&mut r),
            Group::NotProp => notprop(&mut r),
            Group::WVanishing => w_vanishing(&mut r),
            Group::BCurve => b_curve(&mut r),
            Group::Omega => omega(&mut r),
            Group::Ladder => ladder(&mut r),
            Group::WPullback => w_pullback(&mut r),
            Group::Engine => engine(&mut r, options),
        }
    }
    report
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn logan(r: &mut Recorder) {
    let reg = Registry::shared();
    let f = conj_pair_family(0);
    let s = f.space().clone();
    let termwise: [(&str, &str, Rational); 5] = [
        ("-lambda", "-1*lambda", int(0)),
        ("psi_+", "psi[+]", int(8)),
        ("psi_-", "psi[-]", int(8)),
        ("-3 d_{2,0}", "-3*d[2;]", int(-18)),
        ("-d_{1,0}", "-1*d[1;]", int(0)),
    ];
    for (name, text, expected) in termwise {
        r.value(
            format!("conj-pair term {name}"),
            &expected,
            parse(&s, text).and_then(|e| pair(&f, &e)),
        );
    }
    for n in 0..=3 {
        r.value(
            format!("conj-pair against H_{{2,0,2,{n}}}"),
            &int(-2),
            HypClassId::new(0, 1, n)
                .and_then(|id| reg.class_of(&id))
                .and_then(|e| pair(&conj_pair_family(n), &e)),
        );
    }
}

fn notprop(r: &mut Recorder) {
    let reg = Registry::shared();
    for n in 0..=2usize {
        r.value(
            format!("H_{{2,2,0,{n}}} . psi[w1]^{}", n + 3),
            &frac(1, 384),
            HypClassId::new(2, 0, n).and_then(|id| reg.class_of(&id)).and_then(|h| {
                let psi = TautExpr::psi(h.space(), "w1", n as u32 + 3)?;
                h.multiply(&psi)?.integrate()
            }),
        );
    }
}

fn w_vanishing(r: &mut Recorder) {
    for n in 0..=3usize {
        r.value(
            format!("W(rational side w1,w2,p1..p{n}) . psi[w1]^{}", n + 3),
            &int(0),
            (|| {
                let mut side = vec!["w1".to_string(), "w2".to_string()];
                side.extend(labels("p", n));
                let s = MarkedSpace::new(2, side.clone())?;
                let w = TautExpr::w_class(&s, &side)?;
                w.multiply(&TautExpr::psi(&s, "w1", n as u32 + 3)?)?.integrate()
            })(),
        );
    }
}

fn b_curve(r: &mut Recorder) {
    for n in 0..=2 {
        let b = b_curve_pairing(n);
        r.value(
            format!("b-curve pairing n={n}, up to a positive power of two"),
            &frac(-1, 8),
            b.clone().map(|b| b.value),
        );
        r.holds(
            format!("b-curve sign n={n} is negative"),
            b.map(|b| b.is_negative() && b.up_to_positive_power_of_two),
        );
    }
}

fn omega(r: &mut Recorder) {
    for g in 1..=2u32 {
        for n in 1..=4usize {
            let ls = labels("p", n);
            let Ok(s) = MarkedSpace::new(g, ls.clone()) else { continue };
            for i in &ls {
                let Ok(target) = s.without_marking(i) else { continue };
                for j in &ls {
                    let expected = if i == j { int(2 * g as i64 - 2) } else { int(0) };
                    r.value(
                        format!("g={g} n={n} push {i} of omega[{j}]"),
                        &expected,
                        (|| {
                            let pushed = TautExpr::omega(&s, j, 1)?.pushforward_forget(i)?;
                            debug_assert_eq!(pushed.space(), &target);
                            scalar_of(&pushed)?.ok_or_else(|| {
                                TautError::Unsupported(format!("not a multiple of the fundamental class: {pushed}"))
                            })
                        })(),
                    );
                }
            }
        }
    }
    for n in 2..=4usize {
        let ls = labels("p", n);
        let s = MarkedSpace::new(2, ls.clone()).expect("stable");
        for mask in 0u32..(1 << n) {
            let p: Vec<&String> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| &ls[i]).collect();
            if p.len() + 2 > n {
                continue;
            }
            let outside: Vec<&String> = ls.iter().filter(|l| !p.contains(l)).collect();
            let shown: Vec<&str> = p.iter().map(|l| l.as_str()).collect();
            r.holds(
                format!("n={n} omega[p_i]*d[2;{}] independent of p_i", shown.join(",")),
                (|| {
                    let d = TautExpr::divisor(&s, &DivisorClassId::separating(&s, 2, p.iter().copied())?)?;
                    let first = TautExpr::omega(&s, outside[0], 1)?.multiply(&d)?;
                    for l in &outside[1..] {
                        if TautExpr::omega(&s, l, 1)?.multiply(&d)? != first {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                })(),
            );
        }
    }
}

fn ladder(r: &mut Recorder) {
    let report = verify_relations(Registry::shared(), 3);
    for c in report.checks {
        r.push(c.name, c.expected, c.computed, c.passed);
    }
}

fn w_pullback(r: &mut Recorder) {
    for n in 1..=3usize {
        let new = format!("p{n}");
        r.holds(
            format!("pull back W along {new}, minus W with {new} on the genus-2 side"),
            (|| {
                let mut ls = vec!["w1".to_string(), "w2".to_string()];
                ls.extend(labels("p", n - 1));
                let small = MarkedSpace::new(2, ls)?;
                let big = small.with_marking(&new)?;
                let side = ["w1", "w2"];
                let pulled = TautExpr::w_class(&small, &side)?.pullback_forget(&new)?;
                let lhs = pulled.sub(&TautExpr::w_class(&big, &side)?)?.normalize()?;
                let rhs = TautExpr::w_class(&big, &["w1", "w2", new.as_str()])?.normalize()?;
                Ok(lhs == rhs)
            })(),
        );
    }
}

/// Sorted exponent vectors of length `n` with entries summing to `total`.
fn partitions(n: usize, total: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, total: u32, max: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            if total == 0 {
                out.push(acc.clone());
            }
            return;
        }
        for a in (0..=max.min(total)).rev() {
            acc.push(a);
            rec(n - 1, total - a, a, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, total, total, &mut Vec::new(), &mut out);
    out
}

/// All exponent vectors of length `n` with entries summing to `total`.
fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for a in 0..=total {
        for mut rest in compositions(n - 1, total - a) {
            rest.insert(0, a);
            out.push(rest);
        }
    }
    out
}

fn genus_zero_closed_form(a: &[u32]) -> Rational {
    let mut denom = num_bigint::BigInt::from(1);
    for &x in a {
        denom *= factorial(x);
    }
    Rational::new(factorial(a.len() as u32 - 3), denom)
}

fn brute_force_divisors(space: &MarkedSpace) -> BTreeSet<(u32, BTreeSet<String>)> {
    let g = space.genus();
    let ms = space.markings();
    let mut out = BTreeSet::new();
    for h in 0..=g {
        for mask in 0u32..(1 << ms.len()) {
            let p: BTreeSet<String> = (0..ms.len()).filter(|i| mask & (1 << i) != 0).map(|i| ms[i].clone()).collect();
            let q: BTreeSet<String> = ms.iter().filter(|l| !p.contains(*l)).cloned().collect();
            let stable = |genus: u32, k: usize| 2 * genus as i64 - 2 + k as i64 + 1 > 0;
            if !stable(h, p.len()) || !stable(g - h, q.len()) {
                continue;
            }
            // one representative per unordered pair of sides
            let a = (h, p.clone());
            let b = (g - h, q);
            out.insert(if a <= b { a } else { b });
        }
    }
    out
}

/// Random expressions for the parse/print round trip.
pub fn random_corpus(seed: u64, count: usize) -> Vec<(MarkedSpace, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let g = rng.gen_range(0..=2u32);
        let n = rng.gen_range(0..=3usize);
        let Ok(space) = MarkedSpace::new(g, labels("p", n)) else { continue };
        let divisors: Vec<DivisorClassId> = enumerate_boundary_divisors(&space).into_iter().collect();
        let mut terms = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let mut factors = vec![format!("{}/{}", rng.gen_range(1..=9), rng.gen_range(1..=4))];
            let mut has_w = false;
            for _ in 0..rng.gen_range(0..=3) {
                let f = match rng.gen_range(0..7) {
                    0 if n > 0 => format!("psi[p{}]^{}", rng.gen_range(1..=n), rng.gen_range(1..=2)),
                    1 if n > 0 && g > 0 => format!("omega[p{}]", rng.gen_range(1..=n)),
                    2 => "lambda".to_string(),
                    3 => format!("kappa[{}]", rng.gen_range(1..=2)),
                    4 | 5 if !divisors.is_empty() => divisors[rng.gen_range(0..divisors.len())].to_string(),
                    6 if g == 2 && n >= 2 && !has_w => {
                        has_w = true;
                        "W[p1,p2]".to_string()
                    }
                    _ => continue,
                };
                factors.push(f);
            }
            terms.push(factors.join("*"));
        }
        let sign = if rng.gen_bool(0.5) { " - " } else { " + " };
        out.push((space, terms.join(sign)));
    }
    out
}

fn engine(r: &mut Recorder, options: &VerifyOptions) {
    let eval = options.correlator.clone();
    let ev = move |m: &PsiMoment| eval(m);

    let mut oracle_failures = Vec::new();
    let mut checked = 0;
    for n in 3..=8usize {
        for total in [n as u32 - 3, n as u32 - 2] {
            for a in compositions(n, total) {
                checked += 1;
                let expected = if total == n as u32 - 3 { genus_zero_closed_form(&a) } else { int(0) };
                if ev(&PsiMoment::new(0, a.clone())) != expected {
                    oracle_failures.push(format!("{a:?}"));
                }
            }
        }
    }
    r.push(
        format!("genus-0 closed form (n-3)!/prod a_i! and dimension gate over {checked} moments, n <= 8"),
        "0 mismatches".into(),
        format!("{} mismatches {}", oracle_failures.len(), oracle_failures.join(" ")),
        oracle_failures.is_empty(),
    );

    for (name, check) in [
        ("string equation", string_check_with as fn(&PsiMoment, &dyn Fn(&PsiMoment) -> Rational) -> bool),
        ("dilaton equation", dilaton_check_with),
    ] {
        let mut failures = Vec::new();
        let mut count = 0;
        for g in 0..=2u32 {
            for n in 1..=6usize {
                let dim = 3 * g as i64 - 3 + n as i64;
                if dim < 0 {
                    continue;
                }
                for total in 0..=dim as u32 {
                    for a in partitions(n, total) {
                        count += 1;
                        if !check(&PsiMoment::new(g, a.clone()), &ev) {
                            failures.push(format!("g={g} {a:?}"));
                        }
                    }
                }
            }
        }
        r.push(
            format!("{name} over {count} moments, g <= 2, n <= 6"),
            "0 violations".into(),
            format!("{} violations {}", failures.len(), failures.iter().take(5).cloned().collect::<Vec<_>>().join(" ")),
            failures.is_empty(),
        );
    }

    for n in 0..=2usize {
        r.holds(
            format!("projection formula, M_(2,{n}) <- M_(2,{})", n + 1),
            projection_formula(n),
        );
    }
    for n in 0..=3usize {
        r.holds(format!("pushforward of a pulled-back divisor vanishes, M_(2,{n})"), adjunction(n));
    }

    for g in 0..=2u32 {
        for n in 0..=5usize {
            let Ok(s) = MarkedSpace::new(g, labels("p", n)) else { continue };
            let brute = brute_force_divisors(&s);
            let expected = brute.len() + usize::from(g >= 1);
            let listed = enumerate_boundary_divisors(&s);
            let agree = listed.len() == expected
                && brute.iter().all(|(h, p)| {
                    DivisorClassId::separating(&s, *h, p.iter().cloned()).is_ok_and(|d| listed.contains(&d))
                });
            r.push(
                format!("boundary divisors of {s}"),
                expected.to_string(),
                listed.len().to_string(),
                agree,
            );
        }
    }

    let corpus = random_corpus(options.seed, options.corpus_size);
    let mut bad = Vec::new();
    let mut skipped = 0;
    for (s, text) in &corpus {
        match parse(s, text) {
            Ok(e) => {
                let printed = e.to_string();
                if parse(s, &printed).ok().as_ref() != Some(&e) {
                    bad.push(format!("{text} => {printed}"));
                }
            }
            Err(_) => skipped += 1,
        }
    }
    r.push(
        format!("parse . print round trip over {} expressions ({skipped} rejected)", corpus.len()),
        "0 mismatches".into(),
        format!("{} mismatches {}", bad.len(), bad.first().cloned().unwrap_or_default()),
        bad.is_empty(),
    );
}

fn divisor_basis(s: &MarkedSpace) -> Result<Vec<TautExpr>> {
    generators(s).iter().map(|g| generator_class(s, g)).collect()
}

/// ψ monomials of the given degree on `s`, and degree-1-lower ones times a
/// boundary divisor.
fn test_classes(s: &MarkedSpace, degree: u32) -> Result<Vec<TautExpr>> {
    let ls = s.markings().to_vec();
    let mut out = Vec::new();
    for (extra, deg) in [(false, degree), (true, degree - 1)] {
        for a in partitions(ls.len(), deg) {
            for shift in 0..ls.len().max(1) {
                let mut e = TautExpr::one(s);
                for (i, &x) in a.iter().enumerate() {
                    e = e.multiply(&TautExpr::psi(s, &ls[(i + shift) % ls.len()], x)?)?;
                }
                if extra {
                    for d in enumerate_boundary_divisors(s) {
                        out.push(e.multiply(&TautExpr::divisor(s, &d)?)?);
                    }
                } else {
                    out.push(e);
                }
            }
        }
    }
    Ok(out)
}

fn projection_formula(n: usize) -> Result<bool> {
    let small = MarkedSpace::new(2, labels("p", n))?;
    let big = small.with_marking("q")?;
    let classes = test_classes(&big, big.dimension() as u32 - 1)?;
    for (k, a) in divisor_basis(&small)?.iter().enumerate() {
        let pulled = a.pullback_forget("q")?;
        for e in classes.iter().skip(k % 3).step_by(5) {
            let lhs = pulled.multiply(e)?.integrate()?;
            let rhs = a.multiply(&e.pushforward_forget("q")?)?.integrate()?;
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn adjunction(n: usize) -> Result<bool> {
    let s = MarkedSpace::new(2, labels("p", n))?;
    for e in divisor_basis(&s)? {
        if !e.pullback_forget("q")?.pushforward_forget("q")?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_are_sorted_multisets() {
        assert_eq!(partitions(3, 2), vec![vec![2, 0, 0], vec![1, 1, 0]]);
        assert_eq!(partitions(0, 0), vec![Vec::<u32>::new()]);
        assert_eq!(compositions(3, 2).len(), 6);
        assert_eq!(compositions(2, 0), vec![vec![0, 0]]);
    }

    #[test]
    fn group_names_round_trip() {
        for g in Group::ALL {
            assert_eq!(Group::from_name(g.name()), Some(g));
        }
        assert_eq!(Group::from_name("nope"), None);
    }

    #[test]
    fn broken_string_equation_is_reported() {
        let broken: Correlator = Arc::new(|m: &PsiMoment| {
            let v = wk(m).unwrap();
            if m.exponents.contains(&0) && m.exponents.len() > 3 {
                v * int(2)
            } else {
                v
            }
        });
        let report = run(&VerifyOptions {
            only: vec![Group::Engine],
            correlator: broken,
            corpus_size: 5,
            ..Default::default()
        });
        assert!(!report.passed());
        assert_eq!(report.exit_code(), 4);
        assert!(report.failures().any(|c| c.name.starts_with("string equation")));
    }

    #[test]
    fn only_filter() {
        let report = run(&VerifyOptions {
            only: vec![Group::BCurve],
            ..Default::default()
        });
        assert!(report.passed());
        assert!(report.checks.iter().all(|c| c.group == Group::BCurve));
        assert_eq!(report.checks.len(), 6);
    }

    #[test]
    fn corpus_is_deterministic() {
        assert_eq!(random_corpus(3, 20), random_corpus(3, 20));
        assert_eq!(random_corpus(3, 20).len(), 20);
    }
}
