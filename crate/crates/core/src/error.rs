use std::fmt;

/// Hypotheses of the key inequality and of its reduced form, named so that
/// callers can tell exactly which one failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Condition {
    /// (i) F slopewise dominates E.
    FDominatesE,
    /// (ii) E^∨ slopewise dominates Q^∨.
    DualEDominatesDualQ,
    /// (iii) F slopewise dominates Q.
    FDominatesQ,
    /// (iv) E and F have no common slopes.
    NoCommonSlopes,
    /// (v) rk(Q) < rk(E).
    RankBelowE,
    /// (v') rk(Q) = rk(E) - 1.
    RankOneBelowE,
    /// (vi) all slopes of E, F and Q are integers.
    IntegerSlopes,
    /// (vii) μ_max(E) = 0.
    ZeroMaxSlope,
}

impl Condition {
    pub fn label(self) -> &'static str {
        match self {
            Condition::FDominatesE => "(i)",
            Condition::DualEDominatesDualQ => "(ii)",
            Condition::FDominatesQ => "(iii)",
            Condition::NoCommonSlopes => "(iv)",
            Condition::RankBelowE => "(v)",
            Condition::RankOneBelowE => "(v')",
            Condition::IntegerSlopes => "(vi)",
            Condition::ZeroMaxSlope => "(vii)",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Condition::FDominatesE => "F slopewise dominates E",
            Condition::DualEDominatesDualQ => "dual(E) slopewise dominates dual(Q)",
            Condition::FDominatesQ => "F slopewise dominates Q",
            Condition::NoCommonSlopes => "E and F have no common slopes",
            Condition::RankBelowE => "rank(Q) < rank(E)",
            Condition::RankOneBelowE => "rank(Q) = rank(E) - 1",
            Condition::IntegerSlopes => "all slopes of E, F and Q are integers",
            Condition::ZeroMaxSlope => "mu_max(E) = 0",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {} ({})", self.label(), self.description())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// The quantity is undefined for this input, e.g. the slope of the zero bundle.
    #[error("undefined input: {0}")]
    UndefinedInput(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("precondition violated: {0}")]
    Condition(Condition),
    #[error("parse error: {0}")]
    Parse(String),
    /// A statement that holds for every admissible input failed; always a bug or a counterexample.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
