use num_traits::One;

use crate::error::{Result, TautError};
use crate::rational::Rational;
use crate::stable_graphs::DecoratedStratum;
use crate::wk_engine::correlator;

/// `∫ ξ_{Γ*}(α) = Π_v ∫ α_v`.
pub(crate) fn integrate_stratum(s: &DecoratedStratum) -> Result<Rational> {
    if s.vertices.iter().any(|v| v.degree() as i64 != v.dim()) {
        return Ok(Rational::from_integer(0.into()));
    }
    if let Some(d) = s.vertices.iter().flat_map(|v| v.decorations.iter()).next() {
        return Err(TautError::UnresolvedDecoration(format!(
            "the integral needs the value of `{}`",
            d.kind.name
        )));
    }
    let mut total = Rational::one();
    for v in &s.vertices {
        let psi: Vec<u32> = v.legs.values().chain(v.halves.values()).copied().collect();
        total *= vertex_integral(v.genus, &psi, &v.kappa);
    }
    Ok(total)
}

/// `∫_{M_{g,n}} Π ψ_i^{a_i} Π κ_{b_j}`, removing one κ at a time through
/// `∫ X κ_b = ∫_{n+1} π^*X ψ^{b+1}` and `π^*κ_c = κ_c - ψ^c`.
pub(crate) fn vertex_integral(genus: u32, psi: &[u32], kappa: &[u32]) -> Rational {
    let Some((&b1, rest)) = kappa.split_first() else {
        return correlator(genus, psi);
    };
    let mut total = Rational::from_integer(0.into());
    for mask in 0u64..(1u64 << rest.len()) {
        let mut new_psi = b1 + 1;
        let mut remaining = Vec::new();
        let mut sign = Rational::one();
        for (i, &b) in rest.iter().enumerate() {
            if mask & (1 << i) != 0 {
                new_psi += b;
                sign = -sign;
            } else {
                remaining.push(b);
            }
        }
        let mut exps = psi.to_vec();
        exps.push(new_psi);
        total += sign * vertex_integral(genus, &exps, &remaining);
    }
    total
}
