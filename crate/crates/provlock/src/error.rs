//! Error types shared across the library.

use thiserror::Error;

/// Which theorem condition an assembly plan failed to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanCondition {
    /// Condition (i): the per-module hidden output subset is not safe at the
    /// requested privacy target.
    SafeSubset,
    /// Condition (ii): a closure module is not UD-safe (or D-safe, on the
    /// general route) with respect to its share of the hidden attributes.
    ClosureSafety,
    /// Condition (iii): hidden attributes stray outside the module's outputs
    /// and its closure.
    Containment,
    /// The per-module hidden sets are not pairwise disjoint (single-predecessor
    /// route only).
    Disjointness,
}

impl std::fmt::Display for PlanCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PlanCondition::SafeSubset => "safe-subset (i)",
            PlanCondition::ClosureSafety => "closure-safety (ii)",
            PlanCondition::Containment => "containment (iii)",
            PlanCondition::Disjointness => "disjointness",
        };
        f.write_str(s)
    }
}

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("workflow wiring contains a cycle: {0}")]
    CycleDetected(String),
    #[error("attribute produced by more than one module (or both input and output of one): {0}")]
    DuplicateOutputAttr(String),
    #[error("module table is not total over its input domain: {0}")]
    PartialTable(String),
    #[error("unknown attribute: {0}")]
    UnknownAttribute(String),
    #[error("value outside the attribute's declared domain: {0}")]
    InvalidValue(String),
    #[error("tuple schemas do not match: {0}")]
    SchemaMismatch(String),
    #[error("input tuple does not appear in the relation: {0}")]
    InputNotInRelation(String),
    #[error("composite members are not connected: {0}")]
    NotConnected(String),
    #[error("composite member is not a public module: {0}")]
    NonPublicMember(String),
    #[error("hidden set is not a subset of the private module's outputs: {0}")]
    NotOutputOfPrivate(String),
    #[error("workflow is not single-predecessor: {0}")]
    NotSinglePredecessor(String),
    #[error("assembly plan violates condition {condition}: {witness}")]
    ConditionViolated {
        condition: PlanCondition,
        witness: String,
    },
    #[error("closure is not a chain: {0}")]
    NotAChain(String),
    #[error("closure is not a tree: {0}")]
    NotATree(String),
    #[error("no feasible plan: {0}")]
    NoFeasiblePlan(String),
    #[error("witness construction precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("workflow too large for this analysis: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
