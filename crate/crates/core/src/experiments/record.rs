use alloc::vec;
use alloc::vec::Vec;

use crate::combining::SinrReport;

/// One cell of a tabular record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Field {
    Float(f64),
    Int(u64),
    Text(&'static str),
    Missing,
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Float(v)
    }
}

impl From<u64> for Field {
    fn from(v: u64) -> Self {
        Field::Int(v)
    }
}

impl From<Option<f64>> for Field {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Field::Missing, Field::Float)
    }
}

/// A row of an experiment table. The first column is always the experiment
/// id; `fields()` has exactly `HEADER.len()` entries.
pub trait Record {
    const EXPERIMENT: &'static str;
    const HEADER: &'static [&'static str];

    fn fields(&self) -> Vec<Field>;
}

/// Interference-free, MMSE and MR results for one channel realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeTriple {
    pub free: SinrReport,
    pub mmse: SinrReport,
    pub mr: SinrReport,
}

impl SeTriple {
    fn se_fields(&self) -> [Field; 3] {
        [self.free.se.into(), self.mmse.se.into(), self.mr.se.into()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainRecord {
    pub length: f64,
    pub n_elements: u64,
    pub exact: f64,
    pub far_field: f64,
    /// Element-by-element sum, present when the grid is small enough.
    pub self_check: Option<f64>,
}

impl Record for GainRecord {
    const EXPERIMENT: &'static str = "gain-sweep";
    const HEADER: &'static [&'static str] = &[
        "experiment",
        "L_m",
        "N",
        "exact_gain",
        "farfield_gain",
        "selfcheck_gain",
    ];

    fn fields(&self) -> Vec<Field> {
        vec![
            Field::Text(Self::EXPERIMENT),
            self.length.into(),
            self.n_elements.into(),
            self.exact.into(),
            self.far_field.into(),
            self.self_check.into(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceRecord {
    pub length: f64,
    pub n_elements: u64,
    /// `|h₁ᴴh₂|²/‖h₁‖²` under the exact model.
    pub exact: f64,
    pub far_field: f64,
}

impl Record for InterferenceRecord {
    const EXPERIMENT: &'static str = "interference-sweep";
    const HEADER: &'static [&'static str] = &[
        "experiment",
        "L_m",
        "N",
        "exact_interference",
        "farfield_interference",
    ];

    fn fields(&self) -> Vec<Field> {
        vec![
            Field::Text(Self::EXPERIMENT),
            self.length.into(),
            self.n_elements.into(),
            self.exact.into(),
            self.far_field.into(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeLengthRecord {
    pub length: f64,
    pub n_elements: u64,
    pub exact: SeTriple,
    pub far_field: SeTriple,
}

impl Record for SeLengthRecord {
    const EXPERIMENT: &'static str = "se-sweep";
    const HEADER: &'static [&'static str] = &[
        "experiment",
        "L_m",
        "N",
        "se_free_exact",
        "se_mmse_exact",
        "se_mr_exact",
        "se_free_farfield",
        "se_mmse_farfield",
        "se_mr_farfield",
    ];

    fn fields(&self) -> Vec<Field> {
        let mut f = vec![
            Field::Text(Self::EXPERIMENT),
            self.length.into(),
            self.n_elements.into(),
        ];
        f.extend(self.exact.se_fields());
        f.extend(self.far_field.se_fields());
        f
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeDistanceRecord {
    pub z: f64,
    pub length: f64,
    pub n_elements: u64,
    pub exact: SeTriple,
    pub far_field: SeTriple,
}

impl Record for SeDistanceRecord {
    const EXPERIMENT: &'static str = "se-distance";
    const HEADER: &'static [&'static str] = &[
        "experiment",
        "z_m",
        "L_m",
        "N",
        "se_free_exact",
        "se_mmse_exact",
        "se_mr_exact",
        "se_free_farfield",
        "se_mmse_farfield",
        "se_mr_farfield",
    ];

    fn fields(&self) -> Vec<Field> {
        let mut f = vec![
            Field::Text(Self::EXPERIMENT),
            self.z.into(),
            self.length.into(),
            self.n_elements.into(),
        ];
        f.extend(self.exact.se_fields());
        f.extend(self.far_field.se_fields());
        f
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatmapRecord {
    pub length: f64,
    pub n_elements: u64,
    /// Interferer position in meters.
    pub x2: f64,
    pub z2: f64,
    /// Offset from the desired user, in wavelengths.
    pub dx_wavelengths: f64,
    pub dz_wavelengths: f64,
    pub se_free: f64,
    pub se_mmse: f64,
    pub se_mr: f64,
}

impl Record for HeatmapRecord {
    const EXPERIMENT: &'static str = "heatmap";
    const HEADER: &'static [&'static str] = &[
        "experiment",
        "L_m",
        "N",
        "x2_m",
        "z2_m",
        "dx_wavelengths",
        "dz_wavelengths",
        "se_free",
        "se_mmse",
        "se_mr",
    ];

    fn fields(&self) -> Vec<Field> {
        vec![
            Field::Text(Self::EXPERIMENT),
            self.length.into(),
            self.n_elements.into(),
            self.x2.into(),
            self.z2.into(),
            self.dx_wavelengths.into(),
            self.dz_wavelengths.into(),
            self.se_free.into(),
            self.se_mmse.into(),
            self.se_mr.into(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationRecord {
    pub length: f64,
    pub n_elements: u64,
    pub mismatch: SeTriple,
    pub ignored: SeTriple,
    pub interference_mismatch: f64,
    pub interference_ignored: f64,
}

impl PolarizationRecord {
    /// Relative SE loss caused by the mismatch, `1 − SE_mismatch / SE_ignored`,
    /// for (free, MMSE, MR).
    pub fn reductions(&self) -> [f64; 3] {
        let r = |m: f64, i: f64| 1.0 - m / i;
        [
            r(self.mismatch.free.se, self.ignored.free.se),
            r(self.mismatch.mmse.se, self.ignored.mmse.se),
            r(self.mismatch.mr.se, self.ignored.mr.se),
        ]
    }
}

impl Record for PolarizationRecord {
    const EXPERIMENT: &'static str = "polarization";
    const HEADER: &'static [&'static str] = &[
        "experiment",
        "L_m",
        "N",
        "se_free_mismatch",
        "se_mmse_mismatch",
        "se_mr_mismatch",
        "se_free_ignored",
        "se_mmse_ignored",
        "se_mr_ignored",
        "interference_mismatch",
        "interference_ignored",
    ];

    fn fields(&self) -> Vec<Field> {
        let mut f = vec![
            Field::Text(Self::EXPERIMENT),
            self.length.into(),
            self.n_elements.into(),
        ];
        f.extend(self.mismatch.se_fields());
        f.extend(self.ignored.se_fields());
        f.push(self.interference_mismatch.into());
        f.push(self.interference_ignored.into());
        f
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionErrorRecord {
    pub radius_wavelengths: f64,
    pub length: f64,
    pub n_elements: u64,
    pub samples: u32,
    pub seed: u64,
    pub se_mmse_mean: f64,
    /// Sample standard deviation (zero for a single sample).
    pub se_mmse_std: f64,
    pub se_mr: f64,
    pub se_mmse_perfect: f64,
    /// Draws rejected because the perturbed position fell behind the surface.
    pub resampled: u64,
}

impl Record for PositionErrorRecord {
    const EXPERIMENT: &'static str = "position-error";
    const HEADER: &'static [&'static str] = &[
        "experiment",
        "r_wavelengths",
        "L_m",
        "N",
        "samples",
        "seed",
        "se_mmse_mean",
        "se_mmse_std",
        "se_mr",
        "se_mmse_perfect",
        "resampled",
    ];

    fn fields(&self) -> Vec<Field> {
        vec![
            Field::Text(Self::EXPERIMENT),
            self.radius_wavelengths.into(),
            self.length.into(),
            self.n_elements.into(),
            (self.samples as u64).into(),
            self.seed.into(),
            self.se_mmse_mean.into(),
            self.se_mmse_std.into(),
            self.se_mr.into(),
            self.se_mmse_perfect.into(),
            self.resampled.into(),
        ]
    }
}
