use std::fmt;

/// Errors shared across the library. Variants mirror the failure modes of the
/// numerical operations; the CLI maps them onto exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A query point lies outside the open set Ω.
    PointOutsideDomain { x: f64, y: f64 },
    /// Grid spacing too coarse for the requested construction.
    ResolutionTooCoarse(String),
    /// A quadrature node hit the boundary while the integrand is singular.
    CurveTouchesBoundary { t: f64 },
    /// No grid path between the endpoints at the finest allowed resolution.
    Disconnected,
    /// Refinement budget exhausted before the requested slack was reached.
    SlackUnreachable { requested: f64, achieved: f64 },
    /// A hypothesis-gated check was called outside its hypothesis.
    PreconditionNotMet(String),
    /// The supplied constant does not satisfy the hypothesis; carries the
    /// smallest constant that would.
    HypothesisFails { min_c: f64 },
    /// Exponent out of the admissible range (e.g. p ≤ n).
    BadExponent(String),
    /// Weight trace too sparse for the requested interval family.
    DegenerateTrace(String),
    /// A sub-arc violates the strong subhyperbolicity bound.
    NotStronglySubhyperbolic { t_lo: f64, t_hi: f64, measured_c: f64 },
    /// Cube does not meet the domain.
    EmptyIntersection,
    /// Operation requires exact derivatives but the field has no analytic source.
    MissingDerivatives,
    /// Regularity constant estimate diverges under refinement.
    NotRegular { sigma_coarse: f64, sigma_fine: f64 },
    /// Domain construction or validation failure.
    InvalidDomain(String),
    /// Curve construction or validation failure.
    InvalidCurve(String),
    /// Parameter outside its documented range.
    InvalidParameter(String),
}

impl Error {
    /// Stable identifier used in failure reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::PointOutsideDomain { .. } => "PointOutsideDomain",
            Error::ResolutionTooCoarse(_) => "ResolutionTooCoarse",
            Error::CurveTouchesBoundary { .. } => "CurveTouchesBoundary",
            Error::Disconnected => "Disconnected",
            Error::SlackUnreachable { .. } => "SlackUnreachable",
            Error::PreconditionNotMet(_) => "PreconditionNotMet",
            Error::HypothesisFails { .. } => "HypothesisFails",
            Error::BadExponent(_) => "BadExponent",
            Error::DegenerateTrace(_) => "DegenerateTrace",
            Error::NotStronglySubhyperbolic { .. } => "NotStronglySubhyperbolic",
            Error::EmptyIntersection => "EmptyIntersection",
            Error::MissingDerivatives => "MissingDerivatives",
            Error::NotRegular { .. } => "NotRegular",
            Error::InvalidDomain(_) => "InvalidDomain",
            Error::InvalidCurve(_) => "InvalidCurve",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::PointOutsideDomain { x, y } => {
                write!(f, "point ({x}, {y}) is outside the domain")
            }
            Error::ResolutionTooCoarse(msg) => write!(f, "resolution too coarse: {msg}"),
            Error::CurveTouchesBoundary { t } => {
                write!(f, "curve touches the boundary near arclength {t}")
            }
            Error::Disconnected => write!(f, "endpoints are not connected on the grid"),
            Error::SlackUnreachable { requested, achieved } => write!(
                f,
                "slack {requested} unreachable within the refinement budget (best gap {achieved})"
            ),
            Error::PreconditionNotMet(msg) => write!(f, "precondition not met: {msg}"),
            Error::HypothesisFails { min_c } => {
                write!(f, "hypothesis fails; smallest admissible constant is {min_c}")
            }
            Error::BadExponent(msg) => write!(f, "bad exponent: {msg}"),
            Error::DegenerateTrace(msg) => write!(f, "degenerate weight trace: {msg}"),
            Error::NotStronglySubhyperbolic { t_lo, t_hi, measured_c } => write!(
                f,
                "arc [{t_lo}, {t_hi}] violates the strong bound (needs constant {measured_c})"
            ),
            Error::EmptyIntersection => write!(f, "cube does not intersect the domain"),
            Error::MissingDerivatives => write!(f, "field carries no analytic derivatives"),
            Error::NotRegular { sigma_coarse, sigma_fine } => write!(
                f,
                "regularity constant diverges under refinement ({sigma_coarse} -> {sigma_fine})"
            ),
            Error::InvalidDomain(msg) => write!(f, "invalid domain: {msg}"),
            Error::InvalidCurve(msg) => write!(f, "invalid curve: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
