use thiserror::Error;

/// Errors raised by the numerical routines and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("branch jump of {increment:.6} rad between samples {index} and {next}: curve under-sampled near t0")]
    BranchJump {
        index: usize,
        next: usize,
        increment: f64,
    },

    #[error("no radius in the grid yields nonempty circles at both radii")]
    AllAnnuliEmpty,

    #[error("x grid spans {decades:.3} decades on the {side} side; at least 3 are required")]
    GridTooNarrow { side: &'static str, decades: f64 },

    #[error("modular is infinite for every tested lambda")]
    NotLocallyIntegrable,

    #[error("arc around t0 of radius {delta} is degenerate: {reason}")]
    EmptyArc { delta: f64, reason: &'static str },

    #[error("no admissible arc radius: even the smallest arc has p_* = {p_star} <= {required}")]
    NoAdmissibleDelta { p_star: f64, required: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for errors caused by bad inputs rather than numerical breakdown.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::Precondition(_)
                | Error::GridTooNarrow { .. }
                | Error::Io(_)
                | Error::Json(_)
                | Error::Csv(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
