use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error("template `{0}` declared twice")]
    DuplicateTemplate(String),
    #[error("template `{name}` {problem}")]
    BadReference { name: String, problem: &'static str },
    #[error("presentation declares no vertex templates")]
    EmptyPresentation,
    #[error("presentation is not connected at any level up to {limit}")]
    NeverConnected { limit: u32 },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("level budget {given} too small: need at least {needed}")]
    BudgetTooSmall { needed: u32, given: u32 },
    #[error("insufficient level {given}: need at least {needed}")]
    InsufficientLevel { needed: u32, given: u32 },
    #[error("edge set {0} is not a certified finite cut")]
    Uncertified(String),
    #[error("duplicate cut {0} in sequence")]
    DuplicateCut(String),
    #[error("sets are not nested: {0}")]
    NotNested(String),
    #[error("component structure of G minus {0} is unstable within the level budget")]
    Unstable(String),
    #[error("side undetermined within budget: {0}")]
    Undetermined(String),
    #[error("vertex set is finite within the budget ({found} vertices, need {needed})")]
    FiniteWithinBudget { found: usize, needed: usize },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
