//! Finite quotients of the residual groups and the cover constructions
//! built on them.

pub mod assembly;
pub mod cases;
pub mod cyclic;
pub mod group;
pub mod psl;
pub mod strategy;
pub mod witness;

pub use assembly::case5_assembly;
pub use cases::{
    cover_cases, coxeter_quotient, plan_all, plan_cover, select_cases, Candidate, CasePlan, CaseTag, CoverCase,
    FactoryContext, PlanFailure, Variant,
};
pub use cyclic::{case3b_cover, cyclic_solution, doubled_cyclic_cover, CyclicSolution};
pub use strategy::{
    quotient_strategies, select_strategies, solve_shape, strategy_names, triangle_quotient, QuotientBudget,
    QuotientStrategy,
};
pub use witness::{CertifiedOrder, QuotientShape, QuotientWitness};
