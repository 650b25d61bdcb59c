use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Coefficient extraction at radius ρ < 1 would amplify by more than the guard allows.
    #[error("coefficient amplification rho^-{degree} = {factor:e} exceeds 1e8")]
    Amplification { degree: usize, factor: f64 },

    #[error("grid modulus sample {index} has imaginary part {imag:e}")]
    NonRealInput { index: usize, imag: f64 },

    #[error("max grid modulus {max_modulus} exceeds the unit ball")]
    NotInUnitBall { max_modulus: f64 },

    #[error("point of modulus {modulus} is outside the open unit disk")]
    OutsideDisk { modulus: f64 },

    #[error("invalid Pythagorean pair: {0}")]
    InvalidPair(String),

    #[error("invalid Blaschke zero sequence: {0}")]
    InvalidBlaschke(String),

    /// The finite section is too ill-conditioned to trust; the verdict would be inconclusive.
    #[error("finite section condition estimate {condition:e} exceeds 1e12")]
    IllConditioned { condition: f64 },

    #[error("Laurent symbol has a root within {distance:e} of the unit circle")]
    DegenerateOnCircle { distance: f64 },

    #[error("root pairing distance {distance:e} exceeds 1e-6")]
    PairingFailed { distance: f64 },

    #[error("invalid rational function: {0}")]
    InvalidRational(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("kernel tail t^N = {tail:e} exceeds 0.01; increase the truncation degree")]
    Resolution { tail: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
