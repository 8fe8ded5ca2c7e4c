//! The expression language.
//!
//! ```text
//! expr    := sign? term (('+' | '-') term)*
//! term    := factor ('*' factor)*
//! factor  := atom ('^' uint)?
//! atom    := rational | 'psi[L]' | 'omega[L]' | 'lambda' | 'kappa[a]'
//!          | 'd_irr' | 'd[h;L,...]' | 'W[L,...]' | 'gamma[L,...]'
//!          | 'H(l,m,n)' | stratum | '(' expr ')'
//! rational:= uint ('/' uint)?
//! stratum := 'G{' vertex (';' vertex)* ('|' edge (',' edge)*)? '}'
//! vertex  := uint ':' (item (',' item)*)?
//! item    := L ('^' uint)? | '#'uint ('^' uint)? | 'kappa[a]' | '@' name '(' (L | '#'uint)? ')'
//! edge    := '#'uint '-' '#'uint
//! ```
//!
//! `W[...]` lists the markings on the rational side and `gamma[...]` those on
//! the genus-1 side. `H(l,m,n)` is looked up in the hyperelliptic registry and
//! must live on the declared space. Every printed canonical form parses back
//! to itself.

use num_bigint::BigInt;

use crate::error::{Result, TautError};
use crate::hyperelliptic_db::{HypClassId, Registry};
use crate::rational::Rational;
use crate::stable_graphs::{DecoratedStratum, DecoratedVertex, Decoration, DivisorClassId, MarkedSpace, Slot};
use crate::taut_expr::{decoration_kind, parse_anchor, TautExpr};

const RESERVED: &str = "[]{}(),;:|#@^*/";

/// Parse `text` as a class on `space`, resolving `H(...)` in the builtin
/// registry. The result is in canonical form.
pub fn parse(space: &MarkedSpace, text: &str) -> Result<TautExpr> {
    parse_with(space, text, Registry::shared())
}

pub fn parse_with(space: &MarkedSpace, text: &str, registry: &Registry) -> Result<TautExpr> {
    let mut p = Parser {
        src: text,
        pos: 0,
        space,
        registry,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(p.error("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error(format!("unexpected `{}`", p.peek().unwrap())));
    }
    e.normalize()
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    space: &'a MarkedSpace,
    registry: &'a Registry,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> TautError {
        TautError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &str {
        let start = self.pos;
        while self.peek().is_some_and(&f) {
            self.bump();
        }
        &self.src[start..self.pos]
    }

    fn uint(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return Err(self.error("expected a non-negative integer"));
        }
        Ok(digits.parse().expect("decimal digits"))
    }

    fn small_uint(&mut self) -> Result<u32> {
        let at = self.pos;
        let n = self.uint()?;
        u32::try_from(n).map_err(|_| TautError::Syntax {
            pos: at,
            msg: "integer too large".into(),
        })
    }

    fn label(&mut self) -> Result<String> {
        self.skip_ws();
        let label = self
            .take_while(|c| !c.is_whitespace() && !RESERVED.contains(c))
            .to_string();
        if label.is_empty() {
            return Err(self.error("expected a marking label"));
        }
        Ok(label)
    }

    fn known_label(&mut self) -> Result<String> {
        let l = self.label()?;
        self.space.require(&l)?;
        Ok(l)
    }

    /// Comma-separated labels up to `close`; may be empty.
    fn label_list(&mut self, close: char) -> Result<Vec<String>> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(self.known_label()?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn expr(&mut self) -> Result<TautExpr> {
        let mut acc = TautExpr::zero(self.space);
        let mut negate = false;
        self.skip_ws();
        if self.eat('-') {
            negate = true;
        } else {
            self.eat('+');
        }
        loop {
            let t = self.term()?;
            acc = if negate { acc.sub(&t)? } else { acc.add(&t)? };
            if self.eat('+') {
                negate = false;
            } else if self.eat('-') {
                negate = true;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<TautExpr> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            let f = self.factor()?;
            acc = acc.multiply(&f)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<TautExpr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let e = self.small_uint()?;
        let mut acc = TautExpr::one(self.space);
        for _ in 0..e {
            acc = acc.multiply(&base)?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<TautExpr> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(c) if c.is_ascii_digit() => {
                let n = self.uint()?;
                let d = if self.eat('/') { self.uint()? } else { BigInt::from(1) };
                if d == BigInt::from(0) {
                    return Err(TautError::Syntax {
                        pos: start,
                        msg: "zero denominator".into(),
                    });
                }
                Ok(TautExpr::scalar(self.space, Rational::new(n, d)))
            }
            Some('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_').to_string();
                self.keyword(&name, start)
            }
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
        }
    }

    fn keyword(&mut self, name: &str, start: usize) -> Result<TautExpr> {
        match name {
            "psi" | "omega" => {
                self.expect('[')?;
                let l = self.known_label()?;
                self.expect(']')?;
                if name == "psi" {
                    TautExpr::psi(self.space, &l, 1)
                } else {
                    TautExpr::omega(self.space, &l, 1)
                }
            }
            "lambda" => Ok(TautExpr::lambda(self.space)),
            "kappa" => {
                self.expect('[')?;
                let a = self.small_uint()?;
                self.expect(']')?;
                Ok(TautExpr::kappa(self.space, a))
            }
            "d_irr" => TautExpr::divisor(self.space, &DivisorClassId::irr(self.space)?),
            "d" => {
                self.expect('[')?;
                let h = self.small_uint()?;
                self.expect(';')?;
                let labels = self.label_list(']')?;
                TautExpr::divisor(self.space, &DivisorClassId::separating(self.space, h, labels)?)
            }
            "W" => {
                self.expect('[')?;
                let labels = self.label_list(']')?;
                TautExpr::w_class(self.space, &labels)
            }
            "gamma" => {
                self.expect('[')?;
                let labels = self.label_list(']')?;
                TautExpr::gamma_class(self.space, &labels)
            }
            "H" => {
                self.expect('(')?;
                let l = self.small_uint()?;
                self.expect(',')?;
                let m = self.small_uint()?;
                self.expect(',')?;
                let n = self.small_uint()?;
                self.expect(')')?;
                let id = HypClassId::with_genus(self.space.genus(), l, m, n as usize)?;
                if id.space()? != *self.space {
                    return Err(TautError::SpaceMismatch(format!(
                        "{id} lives on {}, not {}",
                        id.space()?,
                        self.space
                    )));
                }
                self.registry.class_of(&id)
            }
            "G" => {
                let s = self.stratum()?;
                TautExpr::stratum_class(self.space, s)
            }
            _ => Err(TautError::Syntax {
                pos: start,
                msg: format!("unknown symbol `{name}`"),
            }),
        }
    }

    fn half(&mut self) -> Result<u32> {
        self.expect('#')?;
        self.small_uint()
    }

    fn power(&mut self) -> Result<u32> {
        if self.eat('^') {
            self.small_uint()
        } else {
            Ok(0)
        }
    }

    fn stratum(&mut self) -> Result<DecoratedStratum> {
        self.expect('{')?;
        let mut vertices = Vec::new();
        loop {
            vertices.push(self.vertex()?);
            if !self.eat(';') {
                break;
            }
        }
        let mut edges = Vec::new();
        if self.eat('|') {
            loop {
                let a = self.half()?;
                self.expect('-')?;
                let b = self.half()?;
                edges.push((a, b));
                if !self.eat(',') {
                    break;
                }
            }
        }
        self.expect('}')?;
        Ok(DecoratedStratum { vertices, edges })
    }

    fn vertex(&mut self) -> Result<DecoratedVertex> {
        let g = self.small_uint()?;
        self.expect(':')?;
        let mut v = DecoratedVertex::new(g);
        self.skip_ws();
        if matches!(self.peek(), Some(';' | '|' | '}')) {
            return Ok(v);
        }
        loop {
            self.item(&mut v)?;
            if !self.eat(',') {
                break;
            }
        }
        v.kappa.sort_unstable();
        v.decorations.sort();
        Ok(v)
    }

    fn item(&mut self, v: &mut DecoratedVertex) -> Result<()> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('#') => {
                let h = self.half()?;
                let e = self.power()?;
                if v.halves.insert(h, e).is_some() {
                    return Err(TautError::Syntax {
                        pos: start,
                        msg: format!("half-edge #{h} repeated"),
                    });
                }
            }
            Some('@') => {
                self.bump();
                let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-').to_string();
                let kind = decoration_kind(&name)?;
                self.expect('(')?;
                self.skip_ws();
                let anchor = if self.peek() == Some(')') {
                    None
                } else if self.peek() == Some('#') {
                    Some(Slot::Half(self.half()?))
                } else {
                    Some(parse_anchor(&self.known_label()?)?)
                };
                self.expect(')')?;
                v.decorations.push(Decoration { kind, anchor });
            }
            _ => {
                let l = self.label()?;
                if l == "kappa" && self.peek() == Some('[') {
                    self.bump();
                    v.kappa.push(self.small_uint()?);
                    self.expect(']')?;
                } else {
                    self.space.require(&l)?;
                    let e = self.power()?;
                    if v.legs.insert(l.clone(), e).is_some() {
                        return Err(TautError::Syntax {
                            pos: start,
                            msg: format!("marking `{l}` repeated"),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}
