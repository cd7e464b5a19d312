use thiserror::Error;

/// Errors raised while building or validating models.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate event `{0}`")]
    DuplicateEvent(String),
    #[error("state name `{0}` is reserved")]
    ReservedName(String),
    #[error("automaton `{0}` has no initial state")]
    MissingInitial(String),
    #[error("automaton `{0}` has more than one initial state")]
    MultipleInitial(String),
    #[error("nondeterministic transition from `{state}` on `{event}`")]
    Nondeterministic { state: String, event: String },
    #[error("event `{0}` declared with conflicting attributes")]
    AttributeMismatch(String),
    #[error("alphabets differ: {0}")]
    AlphabetMismatch(String),
    #[error("invalid supervisor: {0}")]
    InvalidSupervisor(String),
    #[error("invalid attack alphabet: {0}")]
    InvalidAttack(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("conflicting transition on `{label}` from node {node}")]
    Conflict { node: String, label: String },
    #[error("{0}")]
    Io(String),
}

/// Errors raised by attack extraction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error("no attack exists: the pruned structure has no target state")]
    Infeasible,
    #[error("target node {0} is not reachable")]
    Unreachable(usize),
    #[error("flagged node {0} has no insertion chain to a waiting state")]
    NoEscape(usize),
    #[error("S-node {0} has no control decision edge")]
    MissingDecision(usize),
    #[error("attack function violates its class: {0}")]
    ClassViolation(String),
}
