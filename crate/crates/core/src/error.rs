use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Backward iteration divides by the last coefficient.
    #[error("backward step is singular: last coefficient alpha_N is zero")]
    SingularBackstep,

    #[error("characteristic roots are not distinct (separation {separation:e} below tolerance)")]
    RepeatedRoots { separation: f64 },

    #[error("poles are not distinct (separation {separation:e} below tolerance)")]
    RepeatedPoles { separation: f64 },

    #[error("pole at the origin cannot appear in a partial-fraction term")]
    ZeroPole,

    #[error("linear system is numerically singular")]
    SingularSystem,

    #[error("truncated convolution cannot be certified for this filter")]
    TruncationUncertified,

    #[error("input is not causal: support starts at k = {start}")]
    NotCausalInput { start: i64 },

    #[error("pole on the unit circle (|denominator| = {magnitude:e})")]
    PoleOnUnitCircle { magnitude: f64 },

    #[error("output did not settle within k <= {cap}")]
    NotSettled { cap: i64 },

    #[error("filter is unstable (max |root| = {max_root:.6})")]
    Unstable { max_root: f64 },

    #[error("pole with |p| = {magnitude} lies strictly inside the region ({inner} < |z| < {outer})")]
    PoleInsideRoc { magnitude: f64, inner: f64, outer: f64 },
}
