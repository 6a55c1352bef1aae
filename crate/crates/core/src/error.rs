use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("degenerate triple: repeated point in {0}")]
    DegenerateTriple(&'static str),
    #[error("map is the identity in PGL2")]
    IdentityMap,
    #[error("arc {0} is the interior edge of a self-folded triangle")]
    SelfFoldedInterior(usize),
    #[error("marked point {0} is not a puncture")]
    NotAPuncture(usize),
    #[error("unsupported surface: {0}")]
    UnsupportedSurface(String),
    #[error("holonomy at puncture {0} is not semisimple")]
    NonSemisimpleHolonomy(usize),
    #[error("triangulation does not match the framed system")]
    TriangulationMismatch,
    #[error("coordinate of arc {0} is not finite and nonzero")]
    NonRegularInput(usize),
    #[error("mutation at arc {arc} hits a pole (entry {entry})")]
    MutationPole { arc: usize, entry: usize },
    #[error("framed system is degenerate ({0})")]
    DegenerateInput(String),
    #[error("move budget {budget} exceeded: {good} of {total} edges good")]
    BudgetExceeded { budget: usize, good: usize, total: usize },
    #[error("potential has no poles")]
    NoPoles,
    #[error("integration step failed at z = {re}{im:+}i: {reason}")]
    StepFailure { re: f64, im: f64, reason: String },
    #[error("path passes within {clearance:e} of a pole")]
    PathTooClose { clearance: f64 },
    #[error("decay target not reached on the seed ray of sector {sector}")]
    SeedNotFound { sector: usize },
    #[error("monodromy at pole {0} is parabolic or trivial")]
    ResonantOrApparent(usize),
    #[error("both eigenvalues at pole {0} match the target")]
    AmbiguousMatch(usize),
    #[error("surface has genus 0 and fewer than 3 marked points")]
    DegenerateSurface,
    #[error("non-polynomial potential needs an explicit planar realization")]
    RealizationRequired,
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepFailure { .. }
                | Error::BudgetExceeded { .. }
                | Error::ResonantOrApparent(_)
                | Error::AmbiguousMatch(_)
                | Error::SeedNotFound { .. }
                | Error::MutationPole { .. }
                | Error::PathTooClose { .. }
        )
    }
}
