use alloc::vec::Vec;

use super::record::HeatmapRecord;
use super::sweeps::se_triple;
use super::Scenario;
use crate::channel::{self, accumulate_against, ElementChannel};
use crate::error::{Error, Result};
use crate::geometry::{ElementGrid, UePolar};
use crate::math;
use crate::par;

/// Square grid of interferer positions around the desired user, in the
/// XZ-plane, with extents and spacing in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatmapSpec {
    pub half_width_wavelengths: f64,
    pub step_wavelengths: f64,
}

impl Default for HeatmapSpec {
    /// ±3λ at λ/20 spacing.
    fn default() -> Self {
        Self {
            half_width_wavelengths: 3.0,
            step_wavelengths: 0.05,
        }
    }
}

impl HeatmapSpec {
    /// Offsets along one axis, symmetric about zero and including it.
    pub fn offsets(&self) -> Result<Vec<f64>> {
        if !(self.step_wavelengths.is_finite() && self.step_wavelengths > 0.0) {
            return Err(Error::InvalidParameter {
                what: "heatmap step",
                value: self.step_wavelengths,
            });
        }
        if !(self.half_width_wavelengths.is_finite() && self.half_width_wavelengths >= 0.0) {
            return Err(Error::InvalidParameter {
                what: "heatmap half width",
                value: self.half_width_wavelengths,
            });
        }
        let k = math::round(self.half_width_wavelengths / self.step_wavelengths) as i64;
        Ok((-k..=k).map(|i| i as f64 * self.step_wavelengths).collect())
    }
}

/// SE of user 1 (fixed) while the interferer moves over a grid around it on
/// a surface of side `length`. Rows run over `dx` fastest, then `dz`;
/// positions behind the surface are skipped.
pub fn run_heatmap(
    scenario: &Scenario,
    spec: &HeatmapSpec,
    length: f64,
) -> Result<Vec<HeatmapRecord>> {
    let grid = ElementGrid::for_length(length, scenario.element_side)?;
    let lambda = scenario.wavelength;
    let h1 = channel::channel_vector(scenario.model, scenario.pol, &grid, &scenario.ue1, lambda)?;
    let origin = scenario.ue1.to_point();
    let offsets = spec.offsets()?;
    let points: Vec<(f64, f64)> = offsets
        .iter()
        .flat_map(|&dz| offsets.iter().map(move |&dx| (dx, dz)))
        .filter(|&(_, dz)| origin.z + dz * lambda > 0.0)
        .collect();

    let rows = par::map_indexed(points.len(), |i| {
        let (dx, dz) = points[i];
        let x2 = origin.x + dx * lambda;
        let z2 = origin.z + dz * lambda;
        let ue2 = UePolar::from_xz(x2, z2)?;
        let second = ElementChannel::new(scenario.model, scenario.pol, &grid, &ue2, lambda)?;
        let stats = accumulate_against(&h1, &second, 0..grid.len()).finish(lambda);
        let t = se_triple(&stats, &scenario.budget)?;
        Ok(HeatmapRecord {
            length: grid.length(),
            n_elements: grid.len(),
            x2,
            z2,
            dx_wavelengths: dx,
            dz_wavelengths: dz,
            se_free: t.free.se,
            se_mmse: t.mmse.se,
            se_mr: t.mr.se,
        })
    });
    rows.into_iter().collect()
}
