use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("missing key {0}")]
    MissingKey(String),

    #[error("unknown unit tag in key {0}")]
    UnknownUnit(String),

    #[error("unknown key {0}")]
    UnknownKey(String),

    #[error("no stationary state: spectral abscissa {abscissa:e} >= 0")]
    Unstable { abscissa: f64 },

    #[error("singular linear system ({0})")]
    Singular(String),

    #[error("objective evaluation failed at g_plus = {g_plus:e} rad/s: {source}")]
    Objective {
        g_plus: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("empty grid")]
    EmptyGrid,

    #[error("invalid sweep specification: {0}")]
    Spec(String),
}

impl Error {
    /// True for errors caused by bad user input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Validation(_)
                | Error::Parse(_)
                | Error::MissingKey(_)
                | Error::UnknownUnit(_)
                | Error::UnknownKey(_)
                | Error::EmptyGrid
                | Error::Spec(_)
        )
    }
}
