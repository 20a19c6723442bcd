use thiserror::Error;

/// Errors raised by the geometry, channel, analytic and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{quantity} = {value} lies outside the support [{lo}, {hi}]")]
    Domain {
        quantity: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("density is singular at the support endpoint {at}; use an open quadrature rule")]
    SingularPoint { at: f64 },

    #[error("empty point process after {attempts} draws{}", trial.map(|t| format!(" (trial {t})")).unwrap_or_default())]
    EmptyScenario { attempts: u32, trial: Option<u64> },

    #[error("quadrature did not converge: estimate {estimate:e}, achieved abs error {achieved:e}, requested {requested:e}")]
    Numerical {
        estimate: f64,
        achieved: f64,
        requested: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Parameter {
            name,
            value,
            reason: "must be finite and strictly positive",
        })
    }
}

pub(crate) fn path_loss_exponent(value: f64) -> Result<f64> {
    if value.is_finite() && value > 2.0 {
        Ok(value)
    } else {
        Err(Error::Parameter {
            name: "alpha",
            value,
            reason: "path-loss exponent must exceed 2",
        })
    }
}
