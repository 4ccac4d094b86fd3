use thiserror::Error;

/// Errors raised by the physics, averaging, ledger and fit routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("pump amplitude |alpha| = {0} is at or above the supported threshold bound {max}", max = crate::physics::MAX_PUMP_AMPLITUDE)]
    AboveThreshold(f64),

    #[error("dB conversion needs a positive linear power, got {0}")]
    NonPositivePower(f64),

    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {value}, error {error}, requested {requested})")]
    Quadrature {
        subdivisions: usize,
        value: f64,
        error: f64,
        requested: f64,
    },

    #[error("averaging failed at delay {tau_d_s} s: {source}")]
    AtDelay {
        tau_d_s: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("the OPO cavity must not appear in a delay ledger; its dispersion is handled by the compensation length")]
    OpoCavityInLedger,

    #[error("delay ledger path `{0}` is empty")]
    EmptyPath(&'static str),

    #[error(
        "measured power {measured_db} dB does not exceed the electronic noise floor {floor_db} dB"
    )]
    BelowElectronicFloor { measured_db: f64, floor_db: f64 },

    #[error("trace length mismatch: {raw} raw points vs {reference} shot-noise points")]
    LengthMismatch { raw: usize, reference: usize },

    #[error("scan at {demod_hz} Hz: {reason}")]
    InvalidScan { demod_hz: f64, reason: String },

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check(
    cond: bool,
    name: &'static str,
    value: f64,
    reason: &'static str,
) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason,
        })
    }
}
