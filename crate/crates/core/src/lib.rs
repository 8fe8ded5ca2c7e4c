//! Exact intersection calculus in the tautological ring of the moduli spaces
//! of stable marked curves of genus at most two.
//!
//! Classes are finite rational combinations of decorated boundary strata.
//! The crate provides ψ-class intersection numbers, products with ψ, ω, λ, κ
//! and boundary divisors, pullback and pushforward along forgetful maps, top
//! degree integration, one-parameter test families and a small registry of
//! hyperelliptic loci.

pub mod error;
pub mod hyperelliptic_db;
pub mod parser;
pub mod rational;
pub mod stable_graphs;
pub mod taut_expr;
pub mod test_curves;
pub mod verify;
pub mod wk_engine;

pub use error::{Result, TautError};
pub use hyperelliptic_db::{HypClassId, RegisteredExpression, Registry};
pub use parser::parse;
pub use rational::Rational;
pub use stable_graphs::{
    automorphism_factor, dimension, divisor_to_graph, enumerate_boundary_divisors, specialize,
    DecoratedStratum, DecoratedVertex, Decoration, DivisorClassId, MarkedSpace, Slot,
    Specialization, StableGraph,
};
pub use taut_expr::{Monomial, TautExpr};
pub use test_curves::{b_curve_pairing, conj_pair_family, pair, TestCurveFunctional};
pub use wk_engine::{wk, PsiMoment};
