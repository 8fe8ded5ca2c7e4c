//! Tautological expressions on a fixed marked space.
//!
//! A term `c · Γ` with `Γ` a [`DecoratedStratum`] stands for `c · ξ_{Γ*}(α)`,
//! the pushforward of the vertex classes `α` along the gluing map, with no
//! automorphism factor. Printed and serialized coefficients instead use the
//! class `[Γ, α] = ξ_{Γ*}(α) / |Aut Γ|` with `Aut Γ` the automorphisms of the
//! undecorated dual graph, so that `1*d_irr` is the usual `δ_irr`.

mod display;
mod forget;
mod integrate;
mod rules;

pub(crate) use display::{decoration_kind, parse_anchor};

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Result, TautError};
use crate::rational::{int, Rational};
use crate::stable_graphs::{
    divisor_stratum, gamma_stratum, w_stratum, DecoratedStratum, DivisorClassId, MarkedSpace,
};

pub(crate) type Terms = BTreeMap<DecoratedStratum, Rational>;

/// A product of generators, possibly with one stratum factor.
///
/// The canonical form of a monomial holds only `stratum`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    pub psi: BTreeMap<String, u32>,
    pub omega: BTreeMap<String, u32>,
    pub lambda_exp: u32,
    /// κ indices; `κ_0` is the scalar `2g - 2 + n`.
    pub kappa: Vec<u32>,
    pub divisors: Vec<DivisorClassId>,
    /// `ξ_{Γ*}(α)`.
    pub stratum: Option<DecoratedStratum>,
}

impl Monomial {
    pub fn codim(&self) -> u32 {
        self.psi.values().sum::<u32>()
            + self.omega.values().sum::<u32>()
            + self.lambda_exp
            + self.kappa.iter().sum::<u32>()
            + self.divisors.len() as u32
            + self.stratum.as_ref().map_or(0, |s| s.codim())
    }

    pub fn is_canonical(&self) -> bool {
        self.stratum.is_some()
            && self.psi.is_empty()
            && self.omega.is_empty()
            && self.lambda_exp == 0
            && self.kappa.is_empty()
            && self.divisors.is_empty()
    }

    fn of_stratum(s: DecoratedStratum) -> Self {
        Monomial {
            stratum: Some(s),
            ..Default::default()
        }
    }

    /// Product of generator factors; at most one side may carry a stratum.
    fn merge(&self, other: &Monomial) -> Option<Monomial> {
        if self.stratum.is_some() && other.stratum.is_some() {
            return None;
        }
        let mut out = self.clone();
        for (l, e) in &other.psi {
            *out.psi.entry(l.clone()).or_insert(0) += e;
        }
        for (l, e) in &other.omega {
            *out.omega.entry(l.clone()).or_insert(0) += e;
        }
        out.lambda_exp += other.lambda_exp;
        out.kappa.extend(other.kappa.iter().copied());
        out.kappa.sort_unstable();
        out.divisors.extend(other.divisors.iter().cloned());
        out.divisors.sort();
        if out.stratum.is_none() {
            out.stratum = other.stratum.clone();
        }
        Some(out)
    }
}

/// A finite rational combination of monomials on one space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TautExpr {
    space: MarkedSpace,
    terms: BTreeMap<Monomial, Rational>,
}

impl TautExpr {
    pub fn zero(space: &MarkedSpace) -> Self {
        TautExpr {
            space: space.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(space: &MarkedSpace) -> Self {
        Self::from_stratum(space, DecoratedStratum::trivial(space))
    }

    pub fn scalar(space: &MarkedSpace, c: Rational) -> Self {
        Self::one(space).scaled(&c)
    }

    pub fn from_monomial(space: &MarkedSpace, m: Monomial, c: Rational) -> Self {
        let mut e = Self::zero(space);
        e.add_monomial(m, c);
        e
    }

    /// `ξ_{Γ*}(α)` for a stratum of this space.
    pub fn from_stratum(space: &MarkedSpace, s: DecoratedStratum) -> Self {
        let mut terms = Terms::new();
        rules::add_term(&mut terms, s, Rational::one());
        Self::from_terms(space, terms)
    }

    /// `[Γ, α] = ξ_{Γ*}(α) / |Aut Γ|`.
    pub fn stratum_class(space: &MarkedSpace, s: DecoratedStratum) -> Result<Self> {
        s.validate(space)?;
        let aut = s.graph_automorphism_count();
        Ok(Self::from_stratum(space, s).scaled(&Rational::new(1.into(), aut.into())))
    }

    pub fn psi(space: &MarkedSpace, label: &str, exp: u32) -> Result<Self> {
        space.require(label)?;
        let mut m = Monomial::default();
        if exp > 0 {
            m.psi.insert(label.to_string(), exp);
        }
        Ok(Self::from_monomial(space, m, Rational::one()))
    }

    pub fn omega(space: &MarkedSpace, label: &str, exp: u32) -> Result<Self> {
        space.require(label)?;
        let mut m = Monomial::default();
        if exp > 0 {
            m.omega.insert(label.to_string(), exp);
        }
        Ok(Self::from_monomial(space, m, Rational::one()))
    }

    pub fn lambda(space: &MarkedSpace) -> Self {
        let m = Monomial {
            lambda_exp: 1,
            ..Default::default()
        };
        Self::from_monomial(space, m, Rational::one())
    }

    pub fn kappa(space: &MarkedSpace, a: u32) -> Self {
        let m = Monomial {
            kappa: vec![a],
            ..Default::default()
        };
        Self::from_monomial(space, m, Rational::one())
    }

    /// The boundary divisor `δ_D`.
    pub fn divisor(space: &MarkedSpace, d: &DivisorClassId) -> Result<Self> {
        divisor_stratum(space, d)?;
        let m = Monomial {
            divisors: vec![d.clone()],
            ..Default::default()
        };
        Ok(Self::from_monomial(space, m, Rational::one()))
    }

    /// The class of the `W` stratum with the given rational-side markings.
    pub fn w_class<S: AsRef<str>>(space: &MarkedSpace, rational_side: &[S]) -> Result<Self> {
        Self::stratum_class(space, w_stratum(space, rational_side)?)
    }

    /// The class of the `γ` stratum with the given genus-1-side markings.
    pub fn gamma_class<S: AsRef<str>>(space: &MarkedSpace, genus_one_side: &[S]) -> Result<Self> {
        Self::stratum_class(space, gamma_stratum(space, genus_one_side)?)
    }

    pub(crate) fn from_terms(space: &MarkedSpace, terms: Terms) -> Self {
        TautExpr {
            space: space.clone(),
            terms: terms
                .into_iter()
                .map(|(s, c)| (Monomial::of_stratum(s), c))
                .collect(),
        }
    }

    pub fn space(&self) -> &MarkedSpace {
        &self.space
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        self.terms.keys().all(Monomial::is_canonical)
    }

    /// Canonical terms `(Γ, c)` meaning `c · ξ_{Γ*}(α)`; `None` before
    /// normalization.
    pub fn strata(&self) -> Option<Vec<(&DecoratedStratum, &Rational)>> {
        self.terms
            .iter()
            .map(|(m, c)| m.is_canonical().then(|| (m.stratum.as_ref().unwrap(), c)))
            .collect()
    }

    /// Codimension if every term has the same one.
    pub fn codim(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(Monomial::codim);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    fn add_monomial(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    fn check_space(&self, other: &TautExpr) -> Result<()> {
        if self.space != other.space {
            return Err(TautError::SpaceMismatch(format!(
                "{} vs {}",
                self.space, other.space
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &TautExpr) -> Result<TautExpr> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_monomial(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TautExpr) -> Result<TautExpr> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TautExpr {
        self.scaled(&-Rational::one())
    }

    pub fn scaled(&self, c: &Rational) -> TautExpr {
        if c.is_zero() {
            return Self::zero(&self.space);
        }
        TautExpr {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    /// Canonical form: a combination of decorated strata with `ω`, `λ`, `κ`,
    /// `ψ` and divisor factors absorbed.
    pub fn normalize(&self) -> Result<TautExpr> {
        Ok(Self::from_terms(&self.space, self.normalized_terms()?))
    }

    pub(crate) fn normalized_terms(&self) -> Result<Terms> {
        let mut out = Terms::new();
        for (m, c) in &self.terms {
            for (s, x) in rules::normalize_monomial(&self.space, m)? {
                rules::add_term(&mut out, s, x * c);
            }
        }
        Ok(out)
    }

    /// Product of two expressions, in canonical form.
    ///
    /// Generator factors are collected into one monomial before
    /// normalization. Two genuine strata are multiplied only when one of them
    /// is a ψ/κ monomial on the open part or an undecorated boundary divisor
    /// times leg ψ classes.
    pub fn multiply(&self, other: &TautExpr) -> Result<TautExpr> {
        self.check_space(other)?;
        let mut out = Terms::new();
        let dim = self.space.dimension();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if (ma.codim() + mb.codim()) as i64 > dim {
                    continue;
                }
                let (m, factor) = self.merge_factors(ma, mb)?;
                for (s, x) in rules::normalize_monomial(&self.space, &m)? {
                    rules::add_term(&mut out, s, x * ca * cb * &factor);
                }
            }
        }
        Ok(Self::from_terms(&self.space, out))
    }

    fn merge_factors(&self, a: &Monomial, b: &Monomial) -> Result<(Monomial, Rational)> {
        if let Some(m) = a.merge(b) {
            return Ok((m, Rational::one()));
        }
        for (keep, flat) in [(a, b), (b, a)] {
            if let Some((raw, factor)) = rules::unstratify(&self.space, flat.stratum.as_ref().unwrap()) {
                let mut flat_rest = flat.clone();
                flat_rest.stratum = None;
                let m = keep
                    .merge(&flat_rest)
                    .and_then(|m| m.merge(&raw))
                    .expect("only one stratum factor remains");
                return Ok((m, factor));
            }
        }
        Err(TautError::Unsupported(
            "product of two strata that are neither open nor divisorial".into(),
        ))
    }

    /// `π_q^*` along the map forgetting the new marking `q`.
    pub fn pullback_forget(&self, q: &str) -> Result<TautExpr> {
        let target = self.space.with_marking(q)?;
        let mut out = Terms::new();
        for (s, c) in self.normalized_terms()? {
            for (t, x) in forget::pullback_stratum(&s, q)? {
                rules::add_term(&mut out, t, x * &c);
            }
        }
        Ok(Self::from_terms(&target, out))
    }

    /// `π_{q*}` along the map forgetting the marking `q`.
    pub fn pushforward_forget(&self, q: &str) -> Result<TautExpr> {
        let target = self.space.without_marking(q)?;
        let mut out = Terms::new();
        for (s, c) in self.normalized_terms()? {
            for (t, x) in forget::pushforward_stratum(&s, q)? {
                rules::add_term(&mut out, t, x * &c);
            }
        }
        Ok(Self::from_terms(&target, out))
    }

    /// Degree of a top-dimensional class.
    pub fn integrate(&self) -> Result<Rational> {
        let dim = self.space.dimension();
        for m in self.terms.keys() {
            if m.codim() as i64 != dim {
                return Err(TautError::Degree(format!(
                    "term of codimension {} on {} of dimension {dim}",
                    m.codim(),
                    self.space
                )));
            }
        }
        let mut total = Rational::zero();
        for (s, c) in self.normalized_terms()? {
            total += c * integrate::integrate_stratum(&s)?;
        }
        Ok(total)
    }

    /// Coefficients of a divisor-degree expression on the generators
    /// `λ, ψ_i, δ_D`, with canonical terms read back as `|Aut D| δ_D` times
    /// leg ψ classes. `None` if some term is not of this shape.
    pub fn divisor_coordinates(&self) -> Result<Option<Vec<(Monomial, Rational)>>> {
        let mut out: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (s, c) in self.normalized_terms()? {
            let Some((m, factor)) = rules::unstratify(&self.space, &s) else {
                return Ok(None);
            };
            if m.codim() != 1 {
                return Ok(None);
            }
            *out.entry(m).or_insert_with(Rational::zero) += c * factor;
        }
        Ok(Some(out.into_iter().filter(|(_, c)| !c.is_zero()).collect()))
    }
}

/// Scalar multiple of the fundamental class.
pub fn scalar_of(e: &TautExpr) -> Result<Option<Rational>> {
    let n = e.normalize()?;
    let trivial = DecoratedStratum::trivial(e.space()).canonicalize();
    let strata = n.strata().unwrap();
    match strata.as_slice() {
        [] => Ok(Some(Rational::zero())),
        [(s, c)] if **s == trivial => Ok(Some((*c).clone())),
        _ => Ok(None),
    }
}

pub fn normalize(e: &TautExpr) -> Result<TautExpr> {
    e.normalize()
}

pub fn multiply(a: &TautExpr, b: &TautExpr) -> Result<TautExpr> {
    a.multiply(b)
}

pub fn pullback_forget(e: &TautExpr, new_label: &str) -> Result<TautExpr> {
    e.pullback_forget(new_label)
}

pub fn pushforward_forget(e: &TautExpr, label: &str) -> Result<TautExpr> {
    e.pushforward_forget(label)
}

pub fn integrate(e: &TautExpr) -> Result<Rational> {
    e.integrate()
}

pub(crate) fn euler_char(genus: u32, n: usize) -> Rational {
    int(2 * genus as i64 - 2 + n as i64)
}
