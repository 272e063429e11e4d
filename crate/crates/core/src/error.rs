use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A thermodynamic function was evaluated outside its domain.
    #[error("domain error: {quantity} = {value} must be positive")]
    Domain { quantity: &'static str, value: f64 },

    /// Loss of positivity (or finiteness) during time stepping.
    #[error(
        "scheme failure at step {step}, t = {time}: cell ({i}, {j}) has {quantity} = {value} (rho = {rho}, theta = {theta})"
    )]
    SchemeFailure {
        step: usize,
        time: f64,
        i: usize,
        j: usize,
        quantity: &'static str,
        value: f64,
        rho: f64,
        theta: f64,
    },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("configuration error for key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}
