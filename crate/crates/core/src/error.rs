use thiserror::Error;

/// Crate-wide error type. Numerical degeneracies carry the node where they
/// were detected so a failing solve can be located on the grid.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid too small: need at least {need} nodes per direction, got {got}")]
    GridTooSmall { need: usize, got: usize },

    #[error("degenerate Weierstrass data at node ({i},{j}): {what}")]
    DegenerateData { i: usize, j: usize, what: String },

    #[error("regularity violated at node ({i},{j}): {what}")]
    Regularity { i: usize, j: usize, what: String },

    #[error("numerical abort at node ({i},{j}): {what}")]
    NumericalAbort { i: usize, j: usize, what: String },

    #[error("stereographic projection pole: n2 = 1")]
    ProjectionPole,

    #[error("normal Gauss map undefined: 1 + qr = 0")]
    GaussMapPole,

    #[error("flat chart embedding requires c != 0")]
    ZeroCurvatureChart,

    #[error("wrong parameter regime: {0}")]
    WrongRegime(String),

    #[error("boundary expression for `{name}` may only depend on `{allowed}` (found `{found}`)")]
    WrongVariable {
        name: String,
        allowed: char,
        found: char,
    },

    #[error(transparent)]
    Expr(#[from] ExprError),

    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("assertion failed: {0}")]
    Assertion(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parse or evaluation failure in the boundary-data expression language.
/// Offsets are byte positions into the source string.
#[derive(Debug, Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("division by zero at offset {offset}")]
    DivisionByZero { offset: usize },
}
