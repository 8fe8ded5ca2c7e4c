//! Hyperelliptic loci `H_{g,ℓ,2m,n}` and the registered formulas for their
//! classes.
//!
//! Markings are `w1..wℓ` for Weierstrass points, `+`/`-` for a single
//! conjugate pair (`+1`/`-1`, `+2`/`-2`, ... when `m > 1`) and `p1..pn` for
//! free points.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TautError};
use crate::rational::{format as fmt_rational, frac, int, Rational};
use crate::stable_graphs::{DivisorClassId, MarkedSpace};
use crate::taut_expr::{scalar_of, TautExpr};

pub const LOGAN: &str = "logan-2003";
pub const CHEN_TARASCA: &str = "chen-tarasca";
pub const CAVALIERI: &str = "cavalieri-hurwitz";
pub const DERIVED: &str = "derived";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HypClassId {
    genus: u32,
    ell: u32,
    m: u32,
    n: u32,
}

impl HypClassId {
    /// A genus-2 locus.
    pub fn new(ell: u32, m: u32, n: usize) -> Result<Self> {
        Self::with_genus(2, ell, m, n)
    }

    /// A genus-1 locus; only `H_{1,2,0,0}` has a registered class.
    pub fn genus_one(ell: u32, m: u32, n: usize) -> Result<Self> {
        Self::with_genus(1, ell, m, n)
    }

    pub fn with_genus(genus: u32, ell: u32, m: u32, n: usize) -> Result<Self> {
        if !(1..=2).contains(&genus) {
            return Err(TautError::UnsupportedGenus(genus));
        }
        if ell > 2 * genus + 2 {
            return Err(TautError::InvalidSpace(format!(
                "genus {genus} has only {} Weierstrass points",
                2 * genus + 2
            )));
        }
        let id = HypClassId { genus, ell, m, n: n as u32 };
        id.space()?;
        Ok(id)
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// `ℓ + m` in genus 2. In genus 1 any point is a Weierstrass point for a
    /// suitable origin, so the first `w` imposes nothing.
    pub fn codim(&self) -> u32 {
        match self.genus {
            1 => (self.ell + self.m).saturating_sub(1),
            _ => self.ell + self.m,
        }
    }

    pub fn weierstrass_labels(&self) -> Vec<String> {
        (1..=self.ell).map(|i| format!("w{i}")).collect()
    }

    pub fn pair_labels(&self) -> Vec<(String, String)> {
        match self.m {
            1 => vec![("+".into(), "-".into())],
            m => (1..=m).map(|j| (format!("+{j}"), format!("-{j}"))).collect(),
        }
    }

    pub fn free_labels(&self) -> Vec<String> {
        (1..=self.n).map(|i| format!("p{i}")).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        let mut out = self.weierstrass_labels();
        for (a, b) in self.pair_labels() {
            out.push(a);
            out.push(b);
        }
        out.extend(self.free_labels());
        out
    }

    pub fn space(&self) -> Result<MarkedSpace> {
        MarkedSpace::new(self.genus, self.labels())
    }

    fn base(&self) -> HypClassId {
        HypClassId { n: 0, ..*self }
    }
}

impl fmt::Display for HypClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H_{{{},{},{},{}}}", self.genus, self.ell, 2 * self.m, self.n)
    }
}

/// Which marking a pushforward forgets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForgetKind {
    /// The last Weierstrass point.
    Weierstrass,
    /// The `+` point of the first pair; its partner becomes free.
    Plus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisteredExpression {
    pub id: HypClassId,
    pub expr: TautExpr,
    pub source: String,
}

/// Registered classes, all with `n = 0`; free points are added by pullback.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Registry {
    entries: Vec<RegisteredExpression>,
}

fn d(space: &MarkedSpace, h: u32, labels: &[&str]) -> Result<TautExpr> {
    TautExpr::divisor(space, &DivisorClassId::separating(space, h, labels.iter().copied())?)
}

/// `-λ + ψ_+ + ψ_- - 3δ_{2,∅} - δ_{1,∅}` on `M_{2,{+,-}}`.
pub fn logan_class() -> Result<TautExpr> {
    let s = HypClassId::new(0, 1, 0)?.space()?;
    TautExpr::lambda(&s)
        .neg()
        .add(&TautExpr::psi(&s, "+", 1)?)?
        .add(&TautExpr::psi(&s, "-", 1)?)?
        .sub(&d(&s, 2, &[])?.scaled(&int(3)))?
        .sub(&d(&s, 1, &[])?)
}

/// `6ψ_1ψ_2 - 3/2(ψ_1² + ψ_2²) - (ψ_1 + ψ_2)(21/10 δ_{1,{w1}} + 3/5 δ_{1,∅} + 1/20 δ_irr)`
/// on `M_{2,{w1,w2}}`.
pub fn chen_tarasca_class() -> Result<TautExpr> {
    let s = HypClassId::new(2, 0, 0)?.space()?;
    let p1 = TautExpr::psi(&s, "w1", 1)?;
    let p2 = TautExpr::psi(&s, "w2", 1)?;
    let bracket = d(&s, 1, &["w1"])?
        .scaled(&frac(21, 10))
        .add(&d(&s, 1, &[])?.scaled(&frac(3, 5)))?
        .add(&TautExpr::divisor(&s, &DivisorClassId::Irr)?.scaled(&frac(1, 20)))?;
    p1.multiply(&p2)?
        .scaled(&int(6))
        .sub(&TautExpr::psi(&s, "w1", 2)?.scaled(&frac(3, 2)))?
        .sub(&TautExpr::psi(&s, "w2", 2)?.scaled(&frac(3, 2)))?
        .sub(&p1.add(&p2)?.multiply(&bracket)?)
}

/// `3ψ_{w1}` on `M_{1,{w1,w2}}`.
pub fn cavalieri_class() -> Result<TautExpr> {
    let s = HypClassId::genus_one(2, 0, 0)?.space()?;
    Ok(TautExpr::psi(&s, "w1", 1)?.scaled(&int(3)))
}

/// `(1/5) π_{w2*}` of the Chen–Tarasca class, computed by the engine.
pub fn derived_single_weierstrass_class() -> Result<TautExpr> {
    let e = chen_tarasca_class()?.pushforward_forget("w2")?;
    Ok(e.scaled(&frac(1, 5)))
}

impl Registry {
    pub fn builtin() -> Self {
        let entry = |id: Result<HypClassId>, expr: Result<TautExpr>, source: &str| RegisteredExpression {
            id: id.expect("registered id"),
            expr: expr.and_then(|e| e.normalize()).expect("registered formula"),
            source: source.to_string(),
        };
        Registry {
            entries: vec![
                entry(HypClassId::new(0, 1, 0), logan_class(), LOGAN),
                entry(HypClassId::new(2, 0, 0), chen_tarasca_class(), CHEN_TARASCA),
                entry(HypClassId::genus_one(2, 0, 0), cavalieri_class(), CAVALIERI),
                entry(HypClassId::new(1, 0, 0), derived_single_weierstrass_class(), DERIVED),
            ],
        }
    }

    /// The builtin registry, built once per process.
    pub fn shared() -> &'static Registry {
        static SHARED: OnceLock<Registry> = OnceLock::new();
        SHARED.get_or_init(Registry::builtin)
    }

    pub fn entries(&self) -> &[RegisteredExpression] {
        &self.entries
    }

    pub fn entry(&self, id: &HypClassId) -> Option<&RegisteredExpression> {
        self.entries.iter().find(|e| e.id == id.base())
    }

    /// The class of `id`, pulling the registered `n = 0` class back along
    /// `p1, ..., pn`.
    pub fn class_of(&self, id: &HypClassId) -> Result<TautExpr> {
        let entry = self
            .entry(id)
            .ok_or_else(|| TautError::NoGeneratorFormula(id.to_string()))?;
        let mut e = entry.expr.clone();
        for p in id.free_labels() {
            e = e.pullback_forget(&p)?;
        }
        Ok(e)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut entries = Vec::new();
        for e in &self.entries {
            let expr: serde_json::Value =
                serde_json::from_str(&e.expr.to_json()?).map_err(|x| TautError::Json(x.to_string()))?;
            entries.push(EntryJson {
                id: e.id,
                source: e.source.clone(),
                expr,
            });
        }
        Ok(serde_json::to_string_pretty(&RegistryJson { entries }).expect("registry serializes"))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: RegistryJson = serde_json::from_str(text).map_err(|e| TautError::Json(e.to_string()))?;
        let mut entries = Vec::new();
        for e in doc.entries {
            let id = HypClassId::with_genus(e.id.genus, e.id.ell, e.id.m, e.id.n as usize)?;
            let expr = TautExpr::from_json(&e.expr.to_string())?;
            if expr.space() != &id.space()? {
                return Err(TautError::SpaceMismatch(format!("{} is not the space of {id}", expr.space())));
            }
            entries.push(RegisteredExpression {
                id,
                expr,
                source: e.source,
            });
        }
        Ok(Registry { entries })
    }
}

#[derive(Serialize, Deserialize)]
struct RegistryJson {
    entries: Vec<EntryJson>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    id: HypClassId,
    source: String,
    expr: serde_json::Value,
}

/// `π_* [H_{2,ℓ,2m,n}]` as a multiple of the class with one fewer
/// Weierstrass point (`7 - ℓ`), or one fewer pair and one more free point
/// (`1`).
pub fn expected_pushforward_coefficient(id: &HypClassId, forget: ForgetKind) -> Result<Rational> {
    match forget {
        ForgetKind::Weierstrass if id.ell >= 1 => Ok(int(6 - (id.ell as i64 - 1))),
        ForgetKind::Plus if id.m >= 1 => Ok(int(1)),
        _ => Err(TautError::InvalidSpace(format!("{id} has no marking of that kind to forget"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationCheck {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationReport {
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: String, expected: String, computed: Result<String>) {
        let (computed, passed) = match computed {
            Ok(c) => (c.clone(), c == expected),
            Err(e) => (format!("error: {e}"), false),
        };
        self.checks.push(RelationCheck {
            name,
            expected,
            computed,
            passed,
        });
    }
}

/// The factor `c` with `e = c · base`, if there is one.
pub fn proportionality(e: &TautExpr, base: &TautExpr) -> Result<Option<Rational>> {
    let e = e.normalize()?;
    let base = base.normalize()?;
    let Some((s, c0)) = base.strata().and_then(|t| t.first().map(|(s, c)| ((*s).clone(), (*c).clone()))) else {
        return Ok(None);
    };
    let ce = e
        .strata()
        .unwrap()
        .into_iter()
        .find(|(t, _)| **t == s)
        .map(|(_, c)| c.clone())
        .unwrap_or_else(|| int(0));
    let c = ce / c0;
    Ok(e.sub(&base.scaled(&c))?.normalize()?.is_zero().then_some(c))
}

fn show(c: Option<Rational>) -> String {
    c.map_or_else(|| "not proportional".to_string(), |c| fmt_rational(&c))
}

/// Pushforward ladders, the ω step and codimension bookkeeping for every
/// registered family with up to `max_n` free points.
pub fn verify_relations(registry: &Registry, max_n: usize) -> RelationReport {
    let mut report = RelationReport::default();
    for e in registry.entries() {
        report.push(
            format!("codim {} ({})", e.id, e.source),
            e.id.codim().to_string(),
            Ok(e.expr.codim().map_or("mixed".into(), |c| c.to_string())),
        );
    }
    for n in 0..=max_n {
        let two = HypClassId::new(2, 0, n).unwrap();
        let one = HypClassId::new(1, 0, n).unwrap();
        // π_{w2*} [H_{2,2,0,n}] = 5 [H_{2,1,0,n}]
        report.push(
            format!("pushforward w2 of {two}"),
            fmt_rational(&expected_pushforward_coefficient(&two, ForgetKind::Weierstrass).unwrap()),
            (|| {
                let down = registry.class_of(&two)?.pushforward_forget("w2")?;
                Ok(show(proportionality(&down, &registry.class_of(&one)?)?))
            })(),
        );
        // π_{w1*} [H_{2,1,0,n}] = 6 [H_{2,0,0,n}] = 6
        report.push(
            format!("pushforward w1 of {one}"),
            fmt_rational(&expected_pushforward_coefficient(&one, ForgetKind::Weierstrass).unwrap()),
            (|| {
                let down = registry.class_of(&one)?.pushforward_forget("w1")?;
                Ok(show(scalar_of(&down)?))
            })(),
        );
        let pair = HypClassId::new(0, 1, n).unwrap();
        report.push(
            format!("pushforward + of {pair}"),
            fmt_rational(&expected_pushforward_coefficient(&pair, ForgetKind::Plus).unwrap()),
            (|| {
                let down = registry.class_of(&pair)?.pushforward_forget("+")?;
                Ok(show(scalar_of(&down)?))
            })(),
        );
        if n == 0 {
            report.push(
                "double pushforward of the Chen-Tarasca class".into(),
                "30".into(),
                (|| {
                    let e = registry.class_of(&two)?.pushforward_forget("w2")?.pushforward_forget("w1")?;
                    Ok(show(scalar_of(&e)?))
                })(),
            );
        } else {
            // π_{pn*}(ω_{pn} · [H_{2,2,0,n}]) = 2 [H_{2,2,0,n-1}]
            let prev = HypClassId::new(2, 0, n - 1).unwrap();
            let p = format!("p{n}");
            report.push(
                format!("omega step on {two}"),
                "2".into(),
                (|| {
                    let big = registry.class_of(&two)?;
                    let omega = TautExpr::omega(big.space(), &p, 1)?;
                    let down = omega.multiply(&big)?.pushforward_forget(&p)?;
                    Ok(show(proportionality(&down, &registry.class_of(&prev)?)?))
                })(),
            );
        }
    }
    report
}
