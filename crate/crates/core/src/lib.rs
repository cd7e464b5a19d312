//! Synthesis of stealthy sensor insertion/deletion attacks against
//! partially observed supervisors.
//!
//! The pipeline: build the completed supervisor R̃ from plant G and
//! realization R, expand the all-insertion-deletion attack structure
//! (AIDA), prune it for an attacker class, then extract an attack function.

pub mod alphabet;
pub mod automaton;
pub mod builders;
pub mod dot;
pub mod error;
pub mod format;
pub mod ida;
pub mod pruning;
pub mod random;
pub mod scenario;
pub mod sets;
pub mod supervisor;
pub mod synthesis;

pub use alphabet::{EditAlphabet, EditSym};
pub use automaton::{Alphabet, Automaton, AutomatonBuilder, EventDecl};
pub use error::{ModelError, SynthesisError};
pub use ida::{Counter, Ida, IdaContext, Label, Node, NodeId, Side};
pub use pruning::{Pruned, PruneOptions};
pub use scenario::{Scenario, Setup};
pub use sets::{EventId, EventSet, StateId, StateSet};
pub use supervisor::RTilde;
pub use synthesis::{AttackFunction, AttackMode, Preference, Strength};
