use alloc::vec::Vec;

use super::record::{
    GainRecord, InterferenceRecord, PolarizationRecord, SeDistanceRecord, SeLengthRecord, SeTriple,
};
use super::{check_sweep, Scenario};
use crate::channel::{
    self, far_field_stats, interference_far_field_closed, norm_far_field, ChannelModel,
    ChannelStats, PolarizationMode,
};
use crate::combining::{sinr_interference_free, sinr_mmse, sinr_mr, LinkBudget};
use crate::error::Result;
use crate::geometry::{ElementGrid, UePolar};
use crate::par;

/// Largest grid for which the gain sweep also sums element gains one by one.
pub const SELF_CHECK_MAX_ELEMENTS: u64 = 1_000_000;

pub(crate) fn se_triple(stats: &ChannelStats, budget: &LinkBudget) -> Result<SeTriple> {
    Ok(SeTriple {
        free: sinr_interference_free(stats, budget)?,
        mmse: sinr_mmse(stats, budget)?,
        mr: sinr_mr(stats, budget)?,
    })
}

fn grids(scenario: &Scenario, lengths: &[f64]) -> Result<Vec<ElementGrid>> {
    check_sweep(lengths, "surface length")?;
    lengths
        .iter()
        .map(|&l| ElementGrid::for_length(l, scenario.element_side))
        .collect()
}

fn collect<T: Send>(count: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    par::map_indexed(count, f).into_iter().collect()
}

/// Total channel gain of user 1 against surface size: closed form under the
/// scenario's polarization mode, the far-field approximation, and an
/// element-by-element sum for grids up to [`SELF_CHECK_MAX_ELEMENTS`].
pub fn run_gain_vs_length(scenario: &Scenario, lengths: &[f64]) -> Result<Vec<GainRecord>> {
    let grids = grids(scenario, lengths)?;
    let ue = scenario.ue1;
    collect(grids.len(), |i| {
        let grid = &grids[i];
        let (n, area) = (grid.len(), grid.element_area());
        let exact = match scenario.pol {
            PolarizationMode::Mismatch => {
                channel::norm_closed_form(ue.distance(), ue.angle(), n, area)?
            }
            PolarizationMode::Ignored => {
                channel::norm_closed_form_ignored(ue.distance(), ue.angle(), n, area)?
            }
        };
        let self_check = if n <= SELF_CHECK_MAX_ELEMENTS {
            Some(channel::norm_streaming(
                ChannelModel::ExactNearField,
                scenario.pol,
                grid,
                &ue,
                scenario.wavelength,
            )?)
        } else {
            None
        };
        Ok(GainRecord {
            length: grid.length(),
            n_elements: n,
            exact,
            far_field: norm_far_field(ue.distance(), ue.angle(), n, area),
            self_check,
        })
    })
}

/// Normalized interference gain `|h₁ᴴh₂|²/‖h₁‖²` against surface size, exact
/// (streamed) and far-field (closed form).
pub fn run_interference_vs_length(
    scenario: &Scenario,
    lengths: &[f64],
) -> Result<Vec<InterferenceRecord>> {
    let grids = grids(scenario, lengths)?;
    let (ue1, ue2) = (scenario.ue1, scenario.ue2);
    collect(grids.len(), |i| {
        let grid = &grids[i];
        let stats = channel::channel_stats(
            ChannelModel::ExactNearField,
            scenario.pol,
            grid,
            &ue1,
            &ue2,
            scenario.wavelength,
        )?;
        Ok(InterferenceRecord {
            length: grid.length(),
            n_elements: grid.len(),
            exact: stats.interference_gain(),
            far_field: interference_far_field_closed(
                ue2.distance(),
                ue1.angle(),
                ue2.angle(),
                grid.len(),
                grid.element_area(),
                scenario.wavelength,
            ),
        })
    })
}

fn both_models(
    scenario: &Scenario,
    grid: &ElementGrid,
    ue1: &UePolar,
    ue2: &UePolar,
) -> Result<(SeTriple, SeTriple)> {
    let exact = channel::channel_stats(
        ChannelModel::ExactNearField,
        scenario.pol,
        grid,
        ue1,
        ue2,
        scenario.wavelength,
    )?;
    let far = far_field_stats(grid, ue1, ue2, scenario.wavelength)?;
    Ok((
        se_triple(&exact, &scenario.budget)?,
        se_triple(&far, &scenario.budget)?,
    ))
}

/// SE of user 1 with interference-free, MMSE and MR processing against
/// surface size, under both channel models.
pub fn run_se_vs_length(scenario: &Scenario, lengths: &[f64]) -> Result<Vec<SeLengthRecord>> {
    let grids = grids(scenario, lengths)?;
    collect(grids.len(), |i| {
        let grid = &grids[i];
        let (exact, far_field) = both_models(scenario, grid, &scenario.ue1, &scenario.ue2)?;
        Ok(SeLengthRecord {
            length: grid.length(),
            n_elements: grid.len(),
            exact,
            far_field,
        })
    })
}

/// SE against the users' common depth `z` on a surface of side `length`.
/// Each user keeps its original abscissa `d sinθ` and moves to `(x, 0, z)`.
pub fn run_se_vs_distance(
    scenario: &Scenario,
    depths: &[f64],
    length: f64,
) -> Result<Vec<SeDistanceRecord>> {
    check_sweep(depths, "depth")?;
    let grid = ElementGrid::for_length(length, scenario.element_side)?;
    let x1 = scenario.ue1.to_point().x;
    let x2 = scenario.ue2.to_point().x;
    collect(depths.len(), |i| {
        let z = depths[i];
        let ue1 = UePolar::from_xz(x1, z)?;
        let ue2 = UePolar::from_xz(x2, z)?;
        let (exact, far_field) = both_models(scenario, &grid, &ue1, &ue2)?;
        Ok(SeDistanceRecord {
            z,
            length: grid.length(),
            n_elements: grid.len(),
            exact,
            far_field,
        })
    })
}

/// Exact-model SE and interference with and without the polarization
/// mismatch loss.
pub fn run_polarization_compare(
    scenario: &Scenario,
    lengths: &[f64],
) -> Result<Vec<PolarizationRecord>> {
    let grids = grids(scenario, lengths)?;
    collect(grids.len(), |i| {
        let grid = &grids[i];
        let stats = |pol| {
            channel::channel_stats(
                ChannelModel::ExactNearField,
                pol,
                grid,
                &scenario.ue1,
                &scenario.ue2,
                scenario.wavelength,
            )
        };
        let mismatch = stats(PolarizationMode::Mismatch)?;
        let ignored = stats(PolarizationMode::Ignored)?;
        Ok(PolarizationRecord {
            length: grid.length(),
            n_elements: grid.len(),
            mismatch: se_triple(&mismatch, &scenario.budget)?,
            ignored: se_triple(&ignored, &scenario.budget)?,
            interference_mismatch: mismatch.interference_gain(),
            interference_ignored: ignored.interference_gain(),
        })
    })
}
