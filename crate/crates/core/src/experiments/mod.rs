//! Scenario runners that regenerate the data behind the near-/far-field
//! comparisons: channel gain and interference gain against surface size,
//! spectral efficiency against size and distance, an interferer-position
//! heatmap, the effect of polarization mismatch, and the loss caused by an
//! uncertain interferer position.
//!
//! Runners are pure: they return typed records (see [`record`]) and never
//! touch the filesystem. Output order is fixed by the input lists.

use alloc::vec::Vec;

use crate::channel::{ChannelModel, PolarizationMode};
use crate::combining::LinkBudget;
use crate::error::{Error, Result};
use crate::geometry::UePolar;
use crate::math;

mod heatmap;
mod position_error;
pub mod record;
mod sweeps;

pub use heatmap::{run_heatmap, HeatmapSpec};
pub use position_error::{run_position_error, DiskSampler, McSpec};
pub use record::{
    Field, GainRecord, HeatmapRecord, InterferenceRecord, PolarizationRecord, PositionErrorRecord,
    Record, SeDistanceRecord, SeLengthRecord, SeTriple,
};
pub use sweeps::{
    run_gain_vs_length, run_interference_vs_length, run_polarization_compare, run_se_vs_distance,
    run_se_vs_length, SELF_CHECK_MAX_ELEMENTS,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    /// Wavelength λ in meters.
    pub wavelength: f64,
    /// Element side √A in meters.
    pub element_side: f64,
    pub ue1: UePolar,
    pub ue2: UePolar,
    pub budget: LinkBudget,
    pub pol: PolarizationMode,
    pub model: ChannelModel,
}

impl Default for Scenario {
    /// λ = 0.1 m, λ/4 elements, users at 2.5 m and ±2°, 30 dBm transmit power
    /// and 0 dBm noise.
    fn default() -> Self {
        let wavelength = 0.1;
        Self {
            wavelength,
            element_side: wavelength / 4.0,
            ue1: UePolar::from_degrees(2.5, 2.0).expect("valid default"),
            ue2: UePolar::from_degrees(2.5, -2.0).expect("valid default"),
            budget: LinkBudget::default(),
            pol: PolarizationMode::Mismatch,
            model: ChannelModel::ExactNearField,
        }
    }
}

/// `points` logarithmically spaced values from `min` to `max` inclusive.
pub fn log_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    check_range(min, max, points)?;
    if !(min > 0.0) {
        return Err(Error::InvalidParameter {
            what: "log grid start",
            value: min,
        });
    }
    if points == 1 {
        return Ok(alloc::vec![min]);
    }
    let ratio = max / min;
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                max
            } else {
                min * math::powf(ratio, i as f64 / last)
            }
        })
        .collect())
}

/// `points` evenly spaced values from `min` to `max` inclusive.
pub fn linear_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    check_range(min, max, points)?;
    if points == 1 {
        return Ok(alloc::vec![min]);
    }
    let step = (max - min) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                max
            } else {
                min + step * i as f64
            }
        })
        .collect())
}

fn check_range(min: f64, max: f64, points: usize) -> Result<()> {
    if points == 0 {
        return Err(Error::EmptySweep);
    }
    if !(min.is_finite() && max.is_finite() && max >= min) {
        return Err(Error::InvalidParameter {
            what: "grid range",
            value: max - min,
        });
    }
    Ok(())
}

/// 60 logarithmic points from 0.1 m to 200 m.
pub fn default_length_grid() -> Vec<f64> {
    log_grid(0.1, 200.0, 60).expect("valid default")
}

/// 1 m to 100 m in 1 m steps.
pub fn default_distance_grid() -> Vec<f64> {
    linear_grid(1.0, 100.0, 100).expect("valid default")
}

/// 0 to 1 wavelength in steps of 0.05.
pub fn default_radius_grid() -> Vec<f64> {
    linear_grid(0.0, 1.0, 21).expect("valid default")
}

fn check_sweep(values: &[f64], what: &'static str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::EmptySweep);
    }
    for &v in values {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter { what, value: v });
        }
    }
    Ok(())
}
