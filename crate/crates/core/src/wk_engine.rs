//! Intersection numbers of ψ classes, `<τ_{a_1} ... τ_{a_n}>_g`.
//!
//! Values are derived from the single normalization `<τ_0 τ_0 τ_0>_0 = 1`
//! using the string and dilaton equations and the Dijkgraaf–Verlinde–Verlinde
//! form of the Virasoro constraints. Results are cached in a process-wide
//! table keyed by `(genus, sorted exponents)`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::Zero;

use crate::error::{Result, TautError};
use crate::rational::{int, odd_double_factorial, one, zero, Rational};

/// Largest genus accepted by the public entry points.
pub const MAX_GENUS: u32 = 2;

/// Environment variable bounding the number of cached correlators.
pub const MEMO_CAP_ENV: &str = "TAUTCALC_WK_MEMO_CAP";

const DEFAULT_MEMO_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PsiMoment {
    pub genus: u32,
    pub exponents: Vec<u32>,
}

impl PsiMoment {
    pub fn new(genus: u32, exponents: impl Into<Vec<u32>>) -> Self {
        PsiMoment {
            genus,
            exponents: exponents.into(),
        }
    }

    pub fn is_stable(&self) -> bool {
        2 * self.genus as i64 - 2 + self.exponents.len() as i64 > 0
    }

    pub fn dimension_matches(&self) -> bool {
        let dim = 3 * self.genus as i64 - 3 + self.exponents.len() as i64;
        self.exponents.iter().map(|&a| a as i64).sum::<i64>() == dim
    }
}

/// Exact value of `<τ_{a_1} ... τ_{a_n}>_g`; zero on dimension mismatch.
pub fn wk(moment: &PsiMoment) -> Result<Rational> {
    if moment.genus > MAX_GENUS {
        return Err(TautError::UnsupportedGenus(moment.genus));
    }
    Ok(correlator(moment.genus, &moment.exponents))
}

/// Checks `<τ_0 Π τ_{a_i}>_g = Σ_j <τ_{a_j - 1} Π_{i≠j} τ_{a_i}>_g` for the
/// moment, which must contain the `τ_0` being removed. Moments without a
/// `τ_0`, or whose reduced correlator is unstable, satisfy it vacuously.
pub fn string_check(moment: &PsiMoment) -> bool {
    string_check_with(moment, &|m| correlator(m.genus, &m.exponents))
}

/// Checks `<τ_1 Π τ_{a_i}>_g = (2g - 2 + n) <Π τ_{a_i}>_g` for the moment,
/// which must contain the `τ_1` being removed.
pub fn dilaton_check(moment: &PsiMoment) -> bool {
    dilaton_check_with(moment, &|m| correlator(m.genus, &m.exponents))
}

pub fn string_check_with(moment: &PsiMoment, eval: &dyn Fn(&PsiMoment) -> Rational) -> bool {
    let Some(pos) = moment.exponents.iter().position(|&a| a == 0) else {
        return true;
    };
    let mut rest = moment.exponents.clone();
    rest.remove(pos);
    let reduced = PsiMoment::new(moment.genus, rest.clone());
    if !reduced.is_stable() {
        return true;
    }
    let lhs = eval(moment);
    let mut rhs = zero();
    for j in 0..rest.len() {
        if rest[j] == 0 {
            continue;
        }
        let mut lowered = rest.clone();
        lowered[j] -= 1;
        rhs += eval(&PsiMoment::new(moment.genus, lowered));
    }
    lhs == rhs
}

pub fn dilaton_check_with(moment: &PsiMoment, eval: &dyn Fn(&PsiMoment) -> Rational) -> bool {
    let Some(pos) = moment.exponents.iter().position(|&a| a == 1) else {
        return true;
    };
    let mut rest = moment.exponents.clone();
    rest.remove(pos);
    let reduced = PsiMoment::new(moment.genus, rest);
    if !reduced.is_stable() {
        return true;
    }
    let factor = 2 * moment.genus as i64 - 2 + reduced.exponents.len() as i64;
    eval(moment) == int(factor) * eval(&reduced)
}

fn memo() -> &'static Mutex<HashMap<(u32, Vec<u32>), Rational>> {
    static MEMO: OnceLock<Mutex<HashMap<(u32, Vec<u32>), Rational>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

fn memo_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(MEMO_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_MEMO_CAP)
    })
}

/// Number of cached correlators.
pub fn memo_len() -> usize {
    memo().lock().map(|m| m.len()).unwrap_or(0)
}

pub fn clear_memo() {
    if let Ok(mut m) = memo().lock() {
        m.clear();
    }
}

/// Unchecked correlator for any genus; unstable or dimension-mismatched
/// correlators are zero.
pub(crate) fn correlator(genus: u32, exponents: &[u32]) -> Rational {
    let n = exponents.len() as i64;
    if 2 * genus as i64 - 2 + n <= 0 {
        return zero();
    }
    let total: i64 = exponents.iter().map(|&a| a as i64).sum();
    if total != 3 * genus as i64 - 3 + n {
        return zero();
    }
    let mut key = exponents.to_vec();
    key.sort_unstable_by(|a, b| b.cmp(a));
    if let Some(v) = memo().lock().ok().and_then(|m| m.get(&(genus, key.clone())).cloned()) {
        return v;
    }
    let value = compute(genus, &key);
    if let Ok(mut m) = memo().lock() {
        if m.len() >= memo_cap() {
            m.clear();
        }
        m.insert((genus, key), value.clone());
    }
    value
}

// `exps` is sorted in decreasing order, stable and of matching dimension.
fn compute(genus: u32, exps: &[u32]) -> Rational {
    let n = exps.len();
    if genus == 0 && n == 3 && exps.iter().all(|&a| a == 0) {
        return one();
    }
    if genus == 1 && exps == [1] {
        // <τ_2 τ_0>_1 = <τ_1>_1 by the string equation, while DVV applied to
        // <τ_2 τ_0>_1 gives 15 x = 3 x + <τ_0^3>_0 / 2.
        return correlator(0, &[0, 0, 0]) / int(24);
    }
    if exps[n - 1] == 0 && 2 * genus as i64 - 2 + (n as i64 - 1) > 0 {
        let rest = &exps[..n - 1];
        let mut acc = zero();
        for j in 0..rest.len() {
            if rest[j] > 0 {
                let mut lowered = rest.to_vec();
                lowered[j] -= 1;
                acc += correlator(genus, &lowered);
            }
        }
        return acc;
    }
    if let Some(pos) = exps.iter().position(|&a| a == 1) {
        if 2 * genus as i64 - 2 + (n as i64 - 1) > 0 {
            let mut rest = exps.to_vec();
            rest.remove(pos);
            let factor = 2 * genus as i64 - 2 + rest.len() as i64;
            return int(factor) * correlator(genus, &rest);
        }
    }
    dvv(genus, exps)
}

fn dvv(genus: u32, exps: &[u32]) -> Rational {
    let k = exps[0];
    debug_assert!(k >= 2);
    let rest = &exps[1..];
    let dfr = |m: u32| Rational::from_integer(odd_double_factorial(m));
    let mut acc = zero();

    for j in 0..rest.len() {
        let d = rest[j];
        let coeff = dfr(k + d) / dfr(d);
        let mut next: Vec<u32> = rest.to_vec();
        next[j] = k + d - 1;
        acc += coeff * correlator(genus, &next);
    }

    let half = Rational::new(1.into(), 2.into());
    for r in 0..=(k - 2) {
        let s = k - 2 - r;
        let weight = dfr(r + 1) * dfr(s + 1) * &half;
        if genus >= 1 {
            let mut merged = vec![r, s];
            merged.extend_from_slice(rest);
            acc += &weight * correlator(genus - 1, &merged);
        }
        let mut split_sum = zero();
        let m = rest.len();
        for mask in 0u64..(1u64 << m) {
            let (mut left, mut right) = (vec![r], vec![s]);
            for (i, &d) in rest.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    left.push(d);
                } else {
                    right.push(d);
                }
            }
            for g1 in 0..=genus {
                let a = correlator(g1, &left);
                if a.is_zero() {
                    continue;
                }
                split_sum += a * correlator(genus - g1, &right);
            }
        }
        acc += weight * split_sum;
    }
    acc / dfr(k + 1)
}
