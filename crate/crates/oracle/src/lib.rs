//! Independent semantics for attacked closed loops: language, stealth,
//! admissibility and damage of an attack function, embedding into an attack
//! structure, and exhaustive enumeration of small attackers.

pub mod closed_loop;
pub mod enumerate;
pub mod estimate;
pub mod literal;
pub mod policy;

pub use closed_loop::{check_embedding, check_problem1, closed_loop_language, Explorer, Report, Verdict};
pub use enumerate::{enumerate_attackers, EnumBounds, EnumClass, EnumError, EnumStats};
pub use estimate::{reach_estimate, supervisor_after};
pub use literal::literal_language;
pub use policy::{AttackPolicy, Reactions, Relay, TableAttacker};
