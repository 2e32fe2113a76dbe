use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::record::PositionErrorRecord;
use super::Scenario;
use crate::channel::{self, ChannelStats};
use crate::combining::{mmse_combiner, se, sinr_generic, sinr_mmse, sinr_mr};
use crate::error::{Error, Result};
use crate::geometry::{ElementGrid, UePolar};
use crate::math;
use crate::par;
use crate::sum::NeumaierSum;

/// Monte-Carlo settings for one error radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSpec {
    /// Error disk radius in wavelengths.
    pub radius_wavelengths: f64,
    pub samples: u32,
    pub seed: u64,
}

impl Default for McSpec {
    fn default() -> Self {
        Self {
            radius_wavelengths: 0.0,
            samples: 1000,
            seed: 0,
        }
    }
}

/// Uniform draws from the unit disk for one Monte-Carlo sample.
///
/// Sample `index` reads ChaCha8 stream `index` of the generator seeded with
/// `seed`, so each sample is a pure function of `(seed, index)` and samples
/// can be computed in any order or on any worker.
#[derive(Debug, Clone)]
pub struct DiskSampler {
    rng: ChaCha8Rng,
}

impl DiskSampler {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { rng }
    }

    /// `(√u cos 2πv, √u sin 2πv)` with `u, v` uniform on `[0, 1)`.
    pub fn next_offset(&mut self) -> (f64, f64) {
        let u: f64 = self.rng.random();
        let v: f64 = self.rng.random();
        let r = math::sqrt(u);
        let (s, c) = math::sincos(TAU * v);
        (r * c, r * s)
    }
}

struct Sample {
    se: f64,
    resampled: u64,
}

/// Mean SE of user 1 when the MMSE combiner is built from an interferer
/// position that is off by a uniform draw from a disk of radius `r` (in the
/// XZ-plane), while the SINR is evaluated against the true channels. MR does
/// not use the interferer channel and is reported from the true channels.
pub fn run_position_error(
    scenario: &Scenario,
    radii_wavelengths: &[f64],
    samples: u32,
    seed: u64,
    length: f64,
) -> Result<Vec<PositionErrorRecord>> {
    if radii_wavelengths.is_empty() {
        return Err(Error::EmptySweep);
    }
    if samples == 0 {
        return Err(Error::InvalidParameter {
            what: "sample count",
            value: 0.0,
        });
    }
    for &r in radii_wavelengths {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidParameter {
                what: "error radius",
                value: r,
            });
        }
    }
    let lambda = scenario.wavelength;
    let grid = ElementGrid::for_length(length, scenario.element_side)?;
    let vector =
        |ue: &UePolar| channel::channel_vector(scenario.model, scenario.pol, &grid, ue, lambda);
    let true2 = scenario.ue2.to_point();
    // the true channel goes through the same Cartesian-to-polar path as the
    // perturbed ones, so a zero offset reproduces it bit for bit
    let h1 = vector(&scenario.ue1)?;
    let h2 = vector(&UePolar::from_xz(true2.x, true2.z)?)?;
    let stats = ChannelStats::from_vectors(&h1, &h2, lambda)?;
    let se_mr = sinr_mr(&stats, &scenario.budget)?.se;
    let se_mmse_perfect = sinr_mmse(&stats, &scenario.budget)?.se;

    let mut records = Vec::with_capacity(radii_wavelengths.len());
    for &radius in radii_wavelengths {
        let radius_m = radius * lambda;
        let draws: Vec<Result<Sample>> = par::map_indexed(samples as usize, |i| {
            let mut sampler = DiskSampler::new(seed, i as u64);
            let mut resampled = 0;
            let (x, z) = loop {
                let (ox, oz) = sampler.next_offset();
                let z = true2.z + radius_m * oz;
                if z > 0.0 {
                    break (true2.x + radius_m * ox, z);
                }
                resampled += 1;
            };
            let estimate = vector(&UePolar::from_xz(x, z)?)?;
            let v = mmse_combiner(&h1, &estimate, &scenario.budget)?;
            let gamma = sinr_generic(&v, &h1, &h2, &scenario.budget)?;
            Ok(Sample {
                se: se(gamma)?,
                resampled,
            })
        });
        let draws: Vec<Sample> = draws.into_iter().collect::<Result<_>>()?;
        let n = draws.len() as f64;
        let mean = draws.iter().map(|s| s.se).collect::<NeumaierSum>().value() / n;
        let std = if draws.len() > 1 {
            let ss = draws
                .iter()
                .map(|s| (s.se - mean) * (s.se - mean))
                .collect::<NeumaierSum>()
                .value();
            math::sqrt(ss / (n - 1.0))
        } else {
            0.0
        };
        records.push(PositionErrorRecord {
            radius_wavelengths: radius,
            length: grid.length(),
            n_elements: grid.len(),
            samples,
            seed,
            se_mmse_mean: mean,
            se_mmse_std: std,
            se_mr,
            se_mmse_perfect,
            resampled: draws.iter().map(|s| s.resampled).sum(),
        });
    }
    Ok(records)
}
