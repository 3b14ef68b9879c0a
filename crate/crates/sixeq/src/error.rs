use thiserror::Error;

/// Identifies which physical quantity violated an admissibility bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Alpha1,
    Rho1,
    Rho2,
    P1,
    P2,
    Energy1,
    Energy2,
    Momentum,
    NonFinite,
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Field::Alpha1 => "alpha1",
            Field::Rho1 => "rho1",
            Field::Rho2 => "rho2",
            Field::P1 => "p1",
            Field::P2 => "p2",
            Field::Energy1 => "E1",
            Field::Energy2 => "E2",
            Field::Momentum => "momentum",
            Field::NonFinite => "non-finite state",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A non-finite or out-of-domain argument was passed to a thermodynamic call.
    #[error("invalid input: {what} = {value}")]
    InvalidInput { what: &'static str, value: f64 },

    /// A state left the region of thermodynamic stability (rho_k <= 0,
    /// alpha1 outside (0,1), or p_k + pi_k <= 0). The offending field and its
    /// value are kept: admissibility loss is a diagnostic, not something to
    /// clamp away.
    #[error("inadmissible state: {field} = {value}")]
    Inadmissible { field: Field, value: f64 },

    /// The HLLC wave fan collapsed (an external wave coincides with the
    /// contact while mass still crosses it), so the middle states are not
    /// defined.
    #[error("degenerate HLLC fan: s_ext = {s_ext}, s_star = {s_star}")]
    DegenerateFan { s_ext: f64, s_star: f64 },

    /// The pressure-relaxation quadratic has no admissible root.
    #[error("pressure relaxation failed: {reason} (p1 = {p1}, p2 = {p2})")]
    RelaxationFailure {
        reason: &'static str,
        p1: f64,
        p2: f64,
    },

    /// Field-level relaxation failure, carrying the first failing cell and
    /// the phasic pressures of its pre-relaxation state.
    #[error("relaxation failed at cell {cell}: {source}")]
    RelaxationAtCell {
        cell: usize,
        #[source]
        source: Box<Error>,
    },

    /// Admissibility audit failure during time marching, with full
    /// provenance: the step, flat cell index, offending field and the scheme
    /// that produced it.
    #[error("positivity loss at step {step}, cell {cell}: {field} = {value} [{scheme}]")]
    Positivity {
        step: usize,
        cell: usize,
        field: Field,
        value: f64,
        scheme: String,
    },

    /// Initial states would generate vacuum in the exact Euler solution.
    #[error("vacuum generated: u_R - u_L = {du} exceeds 2(c_L + c_R)/(gamma - 1) = {limit}")]
    Vacuum { du: f64, limit: f64 },

    /// The exact-solver pressure iteration did not converge.
    #[error("pressure iteration did not converge after {iters} iterations (residual {residual})")]
    NoConvergence { iters: usize, residual: f64 },

    #[error("unknown case {name:?}; valid names: {valid}")]
    UnknownCase { name: String, valid: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error at {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub fn invalid(what: &'static str, value: f64) -> Self {
        Error::InvalidInput { what, value }
    }

    pub fn inadmissible(field: Field, value: f64) -> Self {
        Error::Inadmissible { field, value }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
