use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("element index {index} out of range 1..={count}")]
    IndexOutOfRange { index: u64, count: u64 },
    #[error("source must lie strictly in front of the surface (z = {z} m)")]
    SourceBehindSurface { z: f64 },
    #[error("invalid {what}: {value}")]
    InvalidParameter { what: &'static str, value: f64 },
    #[error("angle {radians} rad is outside [-pi/2, pi/2]")]
    AngleOutOfRange { radians: f64 },
    #[error("closed form undefined at endfire (|theta| = pi/2)")]
    Endfire,
    #[error("{count} elements exceed the materialization cap of {cap}; use channel_stats instead")]
    MaterializationCap { count: u64, cap: u64 },
    #[error("desired channel has zero norm")]
    DegenerateChannel,
    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("combining vector is zero")]
    ZeroCombiner,
    #[error("negative SINR {0}")]
    NegativeSinr(f64),
    #[error("empty sweep")]
    EmptySweep,
}
