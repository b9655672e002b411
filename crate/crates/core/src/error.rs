use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid root of unity: r={r}, k={k} ({reason})")]
    InvalidRoot { r: i64, k: i64, reason: &'static str },

    #[error("logarithm of zero")]
    LogOfZero,

    #[error("inadmissible triple ({0}, {1}, {2}) (twice-colors)")]
    InadmissibleTriple(u16, u16, u16),

    #[error("inadmissible 6-tuple {0:?} (twice-colors)")]
    InadmissibleSixTuple([u16; 6]),

    #[error("inadmissible input: {0}")]
    InadmissibleInput(String),

    #[error("color {twice}/2 outside I_r for r={r}")]
    ColorOutOfRange { twice: u32, r: u32 },

    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("edge class {index} out of range (edges {edges}) at line {line}")]
    Index { index: usize, edges: usize, line: usize },

    #[error("triangulation has no tetrahedra")]
    EmptyTriangulation,

    #[error("unknown census manifold `{0}`")]
    UnknownCensusName(String),

    #[error("precision cap of {cap} bits reached with only {achieved} verified digits (wanted {wanted})")]
    PrecisionExhausted { cap: u32, achieved: u32, wanted: u32 },

    #[error("input too large for brute force: {0}")]
    TooLarge(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
