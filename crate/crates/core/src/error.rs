use thiserror::Error;

/// Every failure mode of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no sign change on [{a}, {b}]: f(a) = {fa}, f(b) = {fb}")]
    NoBracket { a: f64, b: f64, fa: f64, fb: f64 },
    #[error("non-finite state after t = {t}")]
    Blowup { t: f64 },
    #[error("r crossed the floor at θ+ = {theta_plus}, θ- = {theta_minus}")]
    BlowupAt { theta_plus: f64, theta_minus: f64 },
    #[error("requested accuracy not reached: {0}")]
    Accuracy(String),
    #[error("eigenvalue bracket not found: {0}")]
    NotFound(String),
    #[error("matrix is numerically singular")]
    Singular,
    #[error("w2 = {0} does not exceed the critical value; no unstable mode")]
    NoInstability(f64),
    #[error("denominator vanishes at x = {0}")]
    Pole(f64),
    #[error("gradient vanishes at the evaluation point")]
    SingularPoint,
    #[error("point is off the surface, defect {0}")]
    OffSurface(f64),
    #[error("unknown catalog entry `{0}`")]
    UnknownSurface(String),
    #[error("component {index} takes the negative value {value}")]
    NotARealSurface { index: usize, value: f64 },
    #[error("profile equation has no admissible region")]
    NoRealProfile,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate tangent or metric")]
    Degenerate,
    #[error("chart is degenerate: {0}")]
    DegenerateChart(String),
    #[error("light-cone chart breaks down: {0}")]
    ChartBreakdown(String),
    #[error("null direction degenerates (x+ . x- = {0})")]
    NullDegeneracy(f64),
    #[error("surface is not a graph over the requested patch")]
    NotAGraph,
}

pub type Result<T> = std::result::Result<T, Error>;
