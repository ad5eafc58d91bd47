use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("domain error in {function}: argument {value} {reason}")]
    Domain {
        function: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("overflow in {function} at x = {value}")]
    Overflow { function: &'static str, value: f64 },

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions: \
         estimate {estimate:e} with error bound {error:e}"
    )]
    NonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("Matsubara sum is not decaying: terms {terms:?} around n = {index}")]
    NonDecay { index: usize, terms: [f64; 3] },

    #[error("Matsubara sum exhausted {max_terms} terms; partial sum {partial:e}, last term {last:e}")]
    SumTruncated {
        max_terms: usize,
        partial: f64,
        last: f64,
    },

    #[error("spectral data rejected: {0}")]
    Spectral(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "collective response has a pole on the imaginary axis near xi = {xi:e} rad/s \
         (denominator changes sign); the literal continuation is not admissible here"
    )]
    CollectivePole { xi: f64 },

    #[error("singular matrix in {what} at {context}")]
    Singular {
        what: &'static str,
        context: EvalContext,
    },

    #[error("{context}: {source}")]
    AtPoint {
        context: EvalContext,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

/// Where in (D, φ, T, κ, k⊥) an evaluation failed.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EvalContext {
    pub separation_nm: Option<f64>,
    pub angle_rad: Option<f64>,
    pub temperature_k: Option<f64>,
    pub kappa_per_m: Option<f64>,
    pub k_perp_per_m: Option<f64>,
}

impl fmt::Display for EvalContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(d) = self.separation_nm {
            parts.push(format!("D = {d} nm"));
        }
        if let Some(p) = self.angle_rad {
            parts.push(format!("phi = {p} rad"));
        }
        if let Some(t) = self.temperature_k {
            parts.push(format!("T = {t} K"));
        }
        if let Some(k) = self.kappa_per_m {
            parts.push(format!("kappa = {k:e} 1/m"));
        }
        if let Some(k) = self.k_perp_per_m {
            parts.push(format!("k_perp = {k:e} 1/m"));
        }
        if parts.is_empty() {
            write!(f, "<no context>")
        } else {
            write!(f, "{}", parts.join(", "))
        }
    }
}

impl Error {
    pub fn at(self, context: EvalContext) -> Error {
        match self {
            // Inner context wins; the outer one only fills the gaps.
            Error::AtPoint { context: inner, source } => Error::AtPoint {
                context: EvalContext {
                    separation_nm: inner.separation_nm.or(context.separation_nm),
                    angle_rad: inner.angle_rad.or(context.angle_rad),
                    temperature_k: inner.temperature_k.or(context.temperature_k),
                    kappa_per_m: inner.kappa_per_m.or(context.kappa_per_m),
                    k_perp_per_m: inner.k_perp_per_m.or(context.k_perp_per_m),
                },
                source,
            },
            other => Error::AtPoint {
                context,
                source: Box::new(other),
            },
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
