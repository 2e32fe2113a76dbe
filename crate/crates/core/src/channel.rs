//! Per-element channels, closed-form norms and streaming channel statistics.
//!
//! A source at `s = (x_s, y_s, z_s)`, `z_s > 0`, radiates isotropically with
//! polarization along Y when traveling along Z. The power captured by a square
//! element is the integral of a density over the element:
//!
//! * with polarization mismatch: `z_s ((x − x_s)² + z_s²) / (4π ρ⁵)`,
//! * without it: `z_s / (4π ρ³)`,
//!
//! where `ρ` is the distance from `s` to the surface point. Both have closed
//! antiderivatives, so an element gain is a signed sum over the element's four
//! corners. Summed over a whole edge-to-edge grid the inner corners cancel,
//! which is why the total gain has a closed form depending only on the total
//! area (see [`norm_closed_form`]).
//!
//! The channel of element `n` is `h_n = |h_n| e^{-jφ_n}` with
//! `φ_n = 2π · frac(‖s − r_n‖ / λ)`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};
use core::ops::Range;

use crate::error::{Error, Result};
use crate::geometry::{ElementGrid, Point3, UePolar};
use crate::math;
use crate::par;
use crate::sum::{ComplexSum, NeumaierSum};

pub type Complex = num_complex::Complex64;

/// Largest channel vector that [`channel_vector`] will materialize.
pub const DEFAULT_MATERIALIZATION_CAP: u64 = 1_000_000;

/// Elements per work unit of the streaming reductions. Fixed so that the
/// reduction tree, and therefore the result, does not depend on thread count.
pub const STREAM_CHUNK: u64 = 1 << 14;

/// Sources closer than this many wavelengths to an element trigger a warning.
pub const REACTIVE_NEAR_FIELD_WAVELENGTHS: f64 = 3.0;

/// Threshold on `|sin(π √A Ω / λ)|` below which the far-field interference
/// kernel is replaced by its analytic limit.
pub const KERNEL_SINGULARITY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelModel {
    ExactNearField,
    FarField,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolarizationMode {
    Mismatch,
    Ignored,
}

#[inline]
fn mismatch_corner(x: f64, y: f64, z: f64) -> f64 {
    let u = x / z;
    let v = y / z;
    let r = math::sqrt(u * u + v * v + 1.0);
    let uv = u * v;
    uv / (3.0 * (v * v + 1.0) * r) + (2.0 / 3.0) * math::atan(uv / r)
}

#[inline]
fn ignored_corner(x: f64, y: f64, z: f64) -> f64 {
    let u = x / z;
    let v = y / z;
    let r = math::sqrt(u * u + v * v + 1.0);
    math::atan(u * v / r)
}

#[inline]
fn corner_sum(pol: PolarizationMode, s: &Point3, cx: f64, cy: f64, half: f64) -> f64 {
    let dx = cx - s.x;
    let dy = cy - s.y;
    let xs = [half + dx, half - dx];
    let ys = [half + dy, half - dy];
    let kernel = match pol {
        PolarizationMode::Mismatch => mismatch_corner,
        PolarizationMode::Ignored => ignored_corner,
    };
    let mut total = 0.0;
    for &x in &xs {
        for &y in &ys {
            total += kernel(x, y, s.z);
        }
    }
    total / (4.0 * PI)
}

fn check_source(s: &Point3) -> Result<()> {
    if s.z > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::SourceBehindSurface { z: s.z })
    }
}

fn check_wavelength(wavelength: f64) -> Result<()> {
    if wavelength.is_finite() && wavelength > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            what: "wavelength",
            value: wavelength,
        })
    }
}

/// Free-space gain from `s` to the square element centered at `center` (in
/// the XY-plane), including the polarization mismatch loss. Lies in (0, 1/3).
pub fn element_gain_exact(s: &Point3, center: &Point3, element_side: f64) -> Result<f64> {
    element_gain(PolarizationMode::Mismatch, s, center, element_side)
}

/// Fraction of the isotropically radiated power that crosses the element,
/// without polarization loss. Lies in (0, 1/2).
pub fn element_gain_ignored_polarization(
    s: &Point3,
    center: &Point3,
    element_side: f64,
) -> Result<f64> {
    element_gain(PolarizationMode::Ignored, s, center, element_side)
}

pub fn element_gain(
    pol: PolarizationMode,
    s: &Point3,
    center: &Point3,
    element_side: f64,
) -> Result<f64> {
    check_source(s)?;
    if !(element_side > 0.0) {
        return Err(Error::InvalidParameter {
            what: "element side",
            value: element_side,
        });
    }
    Ok(corner_sum(pol, s, center.x, center.y, element_side / 2.0))
}

/// `2π · frac(distance / λ)`, in `[0, 2π)`. The fractional part is taken
/// before scaling so that large distances keep full phase precision.
#[inline]
pub fn phase_of_distance(distance: f64, wavelength: f64) -> f64 {
    let cycles = distance / wavelength;
    let frac = cycles - math::floor(cycles);
    let phase = TAU * frac;
    if phase >= TAU {
        0.0
    } else {
        phase
    }
}

pub fn element_phase(s: &Point3, center: &Point3, wavelength: f64) -> f64 {
    phase_of_distance(s.distance(center), wavelength)
}

/// Far-field (plane-wave) channel of an element at abscissa `x_n`:
/// gain `A cosθ / (4π d²)` for every element, phase `2π frac((d − x_n sinθ)/λ)`.
pub fn far_field_element(ue: &UePolar, x_n: f64, element_area: f64, wavelength: f64) -> Complex {
    let amplitude = far_field_amplitude(ue, element_area);
    let phase = phase_of_distance(ue.distance() - x_n * math::sin(ue.angle()), wavelength);
    let (s, c) = math::sincos(phase);
    Complex::new(amplitude * c, -amplitude * s)
}

fn far_field_gain(ue: &UePolar, element_area: f64) -> f64 {
    let d = ue.distance();
    (element_area * math::cos(ue.angle()) / (4.0 * PI * d * d)).max(0.0)
}

fn far_field_amplitude(ue: &UePolar, element_area: f64) -> f64 {
    math::sqrt(far_field_gain(ue, element_area))
}

#[derive(Debug, Clone, Copy)]
enum Evaluator {
    Exact {
        source: Point3,
        pol: PolarizationMode,
    },
    Far {
        amplitude: f64,
        distance: f64,
        sin_angle: f64,
    },
}

/// Channel of one user to every element of a grid, evaluated on demand.
#[derive(Debug, Clone, Copy)]
pub struct ElementChannel {
    grid: ElementGrid,
    wavelength: f64,
    eval: Evaluator,
}

impl ElementChannel {
    pub fn new(
        model: ChannelModel,
        pol: PolarizationMode,
        grid: &ElementGrid,
        ue: &UePolar,
        wavelength: f64,
    ) -> Result<Self> {
        check_wavelength(wavelength)?;
        let eval = match model {
            ChannelModel::ExactNearField => {
                let source = ue.to_point();
                check_source(&source)?;
                warn_if_reactive(grid, &source, wavelength);
                Evaluator::Exact { source, pol }
            }
            ChannelModel::FarField => Evaluator::Far {
                amplitude: far_field_amplitude(ue, grid.element_area()),
                distance: ue.distance(),
                sin_angle: math::sin(ue.angle()),
            },
        };
        Ok(Self {
            grid: *grid,
            wavelength,
            eval,
        })
    }

    pub fn grid(&self) -> &ElementGrid {
        &self.grid
    }

    /// Channel of the element with 0-based index `index`.
    #[inline]
    pub fn at(&self, index: u64) -> Complex {
        let (x, y) = self.grid.center_xy(index);
        let (amplitude, phase) = match self.eval {
            Evaluator::Exact { source, pol } => {
                let gain = corner_sum(pol, &source, x, y, self.grid.element_side() / 2.0);
                let dx = x - source.x;
                let dy = y - source.y;
                let dist = math::sqrt(dx * dx + dy * dy + source.z * source.z);
                (
                    math::sqrt(gain.max(0.0)),
                    phase_of_distance(dist, self.wavelength),
                )
            }
            Evaluator::Far {
                amplitude,
                distance,
                sin_angle,
            } => (
                amplitude,
                phase_of_distance(distance - x * sin_angle, self.wavelength),
            ),
        };
        let (s, c) = math::sincos(phase);
        Complex::new(amplitude * c, -amplitude * s)
    }

    /// Gain `|h_n|²` of the element with 0-based index `index`.
    #[inline]
    pub fn gain_at(&self, index: u64) -> f64 {
        match self.eval {
            Evaluator::Exact { source, pol } => {
                let (x, y) = self.grid.center_xy(index);
                corner_sum(pol, &source, x, y, self.grid.element_side() / 2.0)
            }
            Evaluator::Far { amplitude, .. } => amplitude * amplitude,
        }
    }
}

fn warn_if_reactive(grid: &ElementGrid, source: &Point3, wavelength: f64) {
    let closest = grid.min_center_distance(source);
    if closest < REACTIVE_NEAR_FIELD_WAVELENGTHS * wavelength {
        log::warn!(
            "source at ({}, {}, {}) m is {:.3} wavelengths from the nearest element; \
             the channel model assumes distances much larger than a wavelength",
            source.x,
            source.y,
            source.z,
            closest / wavelength
        );
    }
}

/// Materialized channel vector, in element order.
pub fn channel_vector(
    model: ChannelModel,
    pol: PolarizationMode,
    grid: &ElementGrid,
    ue: &UePolar,
    wavelength: f64,
) -> Result<Vec<Complex>> {
    channel_vector_capped(
        model,
        pol,
        grid,
        ue,
        wavelength,
        DEFAULT_MATERIALIZATION_CAP,
    )
}

pub fn channel_vector_capped(
    model: ChannelModel,
    pol: PolarizationMode,
    grid: &ElementGrid,
    ue: &UePolar,
    wavelength: f64,
    cap: u64,
) -> Result<Vec<Complex>> {
    if grid.len() > cap {
        return Err(Error::MaterializationCap {
            count: grid.len(),
            cap,
        });
    }
    let channel = ElementChannel::new(model, pol, grid, ue, wavelength)?;
    Ok((0..grid.len()).map(|i| channel.at(i)).collect())
}

/// Sufficient statistics of a two-user channel: every SINR of interest is a
/// function of `‖h₁‖²`, `‖h₂‖²` and `h₁ᴴh₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelStats {
    pub norm1_sq: f64,
    pub norm2_sq: f64,
    /// `h₁ᴴh₂ = Σ conj(h₁ₙ) h₂ₙ`
    pub cross: Complex,
    pub n_elements: u64,
    pub wavelength: f64,
}

impl ChannelStats {
    pub fn from_vectors(h1: &[Complex], h2: &[Complex], wavelength: f64) -> Result<Self> {
        if h1.len() != h2.len() {
            return Err(Error::LengthMismatch(h1.len(), h2.len()));
        }
        let mut acc = StatsAccumulator::new();
        for (a, b) in h1.iter().zip(h2) {
            acc.push(*a, *b);
        }
        Ok(acc.finish(wavelength))
    }

    /// `|h₁ᴴh₂|² / ‖h₁‖²`, the interference gain seen through an MR combiner.
    pub fn interference_gain(&self) -> f64 {
        self.cross.norm_sqr() / self.norm1_sq
    }

    /// Squared correlation `|h₁ᴴh₂|² / (‖h₁‖² ‖h₂‖²)`, in `[0, 1]`.
    pub fn correlation(&self) -> f64 {
        self.cross.norm_sqr() / (self.norm1_sq * self.norm2_sq)
    }
}

/// Partial sums of [`ChannelStats`] over a subset of elements.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StatsAccumulator {
    norm1: NeumaierSum,
    norm2: NeumaierSum,
    cross: ComplexSum,
    count: u64,
}

impl StatsAccumulator {
    pub const fn new() -> Self {
        Self {
            norm1: NeumaierSum::new(),
            norm2: NeumaierSum::new(),
            cross: ComplexSum::new(),
            count: 0,
        }
    }

    #[inline]
    pub fn push(&mut self, h1: Complex, h2: Complex) {
        self.norm1.add(h1.norm_sqr());
        self.norm2.add(h2.norm_sqr());
        self.cross.add(h1.conj() * h2);
        self.count += 1;
    }

    pub fn merge(&mut self, other: &Self) {
        self.norm1.merge(&other.norm1);
        self.norm2.merge(&other.norm2);
        self.cross.merge(&other.cross);
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn finish(&self, wavelength: f64) -> ChannelStats {
        ChannelStats {
            norm1_sq: self.norm1.value(),
            norm2_sq: self.norm2.value(),
            cross: self.cross.value(),
            n_elements: self.count,
            wavelength,
        }
    }
}

/// Accumulates the statistics of a channel pair over the element index range.
pub fn accumulate_pair(
    first: &ElementChannel,
    second: &ElementChannel,
    range: Range<u64>,
) -> StatsAccumulator {
    let mut acc = StatsAccumulator::new();
    for i in range {
        acc.push(first.at(i), second.at(i));
    }
    acc
}

/// Statistics of a channel pair where the first channel is already
/// materialized.
pub fn accumulate_against(
    reference: &[Complex],
    second: &ElementChannel,
    range: Range<u64>,
) -> StatsAccumulator {
    let mut acc = StatsAccumulator::new();
    for i in range {
        acc.push(reference[i as usize], second.at(i));
    }
    acc
}

/// Runs `chunk` over fixed-size pieces of `0..count` (in parallel when
/// enabled) and merges the partial sums in index order.
pub(crate) fn chunked_reduce<F>(count: u64, chunk: F) -> StatsAccumulator
where
    F: Fn(Range<u64>) -> StatsAccumulator + Sync + Send,
{
    let chunks = count.div_ceil(STREAM_CHUNK) as usize;
    let parts = par::map_indexed(chunks, |c| {
        let start = c as u64 * STREAM_CHUNK;
        chunk(start..(start + STREAM_CHUNK).min(count))
    });
    let mut total = StatsAccumulator::new();
    for p in &parts {
        total.merge(p);
    }
    total
}

/// Channel pair statistics accumulated over a specific element range.
pub fn channel_stats_range(
    model: ChannelModel,
    pol: PolarizationMode,
    grid: &ElementGrid,
    ue1: &UePolar,
    ue2: &UePolar,
    wavelength: f64,
    range: Range<u64>,
) -> Result<StatsAccumulator> {
    let first = ElementChannel::new(model, pol, grid, ue1, wavelength)?;
    let second = ElementChannel::new(model, pol, grid, ue2, wavelength)?;
    let range = range.start.min(grid.len())..range.end.min(grid.len());
    Ok(accumulate_pair(&first, &second, range))
}

/// Streams over every element once, with no O(N) storage, and returns the
/// two-user statistics. The result is identical for any thread count.
pub fn channel_stats(
    model: ChannelModel,
    pol: PolarizationMode,
    grid: &ElementGrid,
    ue1: &UePolar,
    ue2: &UePolar,
    wavelength: f64,
) -> Result<ChannelStats> {
    let first = ElementChannel::new(model, pol, grid, ue1, wavelength)?;
    let second = ElementChannel::new(model, pol, grid, ue2, wavelength)?;
    Ok(chunked_reduce(grid.len(), |r| accumulate_pair(&first, &second, r)).finish(wavelength))
}

/// `‖h‖²` by summing every element gain.
pub fn norm_streaming(
    model: ChannelModel,
    pol: PolarizationMode,
    grid: &ElementGrid,
    ue: &UePolar,
    wavelength: f64,
) -> Result<f64> {
    let channel = ElementChannel::new(model, pol, grid, ue, wavelength)?;
    let count = grid.len();
    let chunks = count.div_ceil(STREAM_CHUNK) as usize;
    let parts = par::map_indexed(chunks, |c| {
        let start = c as u64 * STREAM_CHUNK;
        (start..(start + STREAM_CHUNK).min(count))
            .map(|i| channel.gain_at(i))
            .collect::<NeumaierSum>()
    });
    let mut total = NeumaierSum::new();
    for p in &parts {
        total.merge(p);
    }
    Ok(total.value())
}

/// Closed-form `‖h‖²` under the exact model with polarization mismatch, for a
/// user at distance `d` and angle `theta` from a square surface of `n_elements`
/// elements of area `element_area`. Always below 1/3.
pub fn norm_closed_form(d: f64, theta: f64, n_elements: u64, element_area: f64) -> Result<f64> {
    let b = closed_form_b(d, theta, n_elements, element_area)?;
    let sqrt_b = math::sqrt(b);
    let t = math::tan(theta);
    let mut total = 0.0;
    for sign in [-1.0, 1.0] {
        let num = b + sign * sqrt_b * t;
        let den = math::sqrt(2.0 * b + t * t + 1.0 + 2.0 * sign * sqrt_b * t);
        total += num / (6.0 * PI * (b + 1.0) * den) + math::atan(num / den) / (3.0 * PI);
    }
    Ok(total)
}

/// Closed-form `‖h‖²` without polarization loss. Always below 1/2.
pub fn norm_closed_form_ignored(
    d: f64,
    theta: f64,
    n_elements: u64,
    element_area: f64,
) -> Result<f64> {
    let b = closed_form_b(d, theta, n_elements, element_area)?;
    let sqrt_b = math::sqrt(b);
    let t = math::tan(theta);
    let mut total = 0.0;
    for sign in [-1.0, 1.0] {
        let num = b + sign * sqrt_b * t;
        let den = math::sqrt(2.0 * b + t * t + 1.0 + 2.0 * sign * sqrt_b * t);
        total += math::atan(num / den) / (2.0 * PI);
    }
    Ok(total)
}

/// `B = N A / (4 d² cos²θ)`
fn closed_form_b(d: f64, theta: f64, n_elements: u64, element_area: f64) -> Result<f64> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::InvalidParameter {
            what: "distance",
            value: d,
        });
    }
    if !(theta.abs() <= FRAC_PI_2) {
        return Err(Error::AngleOutOfRange { radians: theta });
    }
    if theta.abs() == FRAC_PI_2 {
        return Err(Error::Endfire);
    }
    let c = math::cos(theta);
    Ok(n_elements as f64 * element_area / (4.0 * d * d * c * c))
}

/// Gain of the whole surface of side `length`, computed as a single element.
pub fn surface_gain(pol: PolarizationMode, s: &Point3, length: f64) -> Result<f64> {
    element_gain(pol, s, &Point3::default(), length)
}

/// Far-field `‖h‖² = N A cosθ / (4π d²)`; grows without bound in N.
pub fn norm_far_field(d: f64, theta: f64, n_elements: u64, element_area: f64) -> f64 {
    (n_elements as f64 * element_area * math::cos(theta) / (4.0 * PI * d * d)).max(0.0)
}

/// `Σ_c e^{j2π x_c Ω/λ}` over the `side_count` column abscissas, which is real
/// because the columns are symmetric about zero.
fn dirichlet_kernel(side_count: u32, element_side: f64, omega: f64, wavelength: f64) -> f64 {
    let t = element_side * omega / wavelength;
    let denominator = math::sin(PI * t);
    if denominator.abs() < KERNEL_SINGULARITY_THRESHOLD {
        let k = math::round(t) as i64;
        let odd = ((side_count as i64 - 1) * k).rem_euclid(2) == 1;
        let n = side_count as f64;
        if odd {
            -n
        } else {
            n
        }
    } else {
        math::sin(PI * side_count as f64 * t) / denominator
    }
}

/// Far-field `|h₁ᴴh₂|² / ‖h₁‖²`: `A cosθ₂/(4π d₂²) · |sin(πLΩ/λ) / sin(π√AΩ/λ)|²`
/// with `Ω = sinθ₂ − sinθ₁`. Falls back to `N A cosθ₂/(4π d₂²)` where the
/// denominator vanishes.
pub fn interference_far_field_closed(
    d2: f64,
    theta1: f64,
    theta2: f64,
    n_elements: u64,
    element_area: f64,
    wavelength: f64,
) -> f64 {
    let omega = math::sin(theta2) - math::sin(theta1);
    let side = math::sqrt(element_area);
    let length = math::sqrt(n_elements as f64 * element_area);
    let g2 = (element_area * math::cos(theta2) / (4.0 * PI * d2 * d2)).max(0.0);
    let denominator = math::sin(PI * side * omega / wavelength);
    if denominator.abs() < KERNEL_SINGULARITY_THRESHOLD {
        return n_elements as f64 * g2;
    }
    let ratio = math::sin(PI * length * omega / wavelength) / denominator;
    g2 * ratio * ratio
}

/// Far-field statistics in closed form: equal gains per user and a cross
/// term given by the Dirichlet kernel over the columns.
pub fn far_field_stats(
    grid: &ElementGrid,
    ue1: &UePolar,
    ue2: &UePolar,
    wavelength: f64,
) -> Result<ChannelStats> {
    check_wavelength(wavelength)?;
    let area = grid.element_area();
    let g1 = far_field_gain(ue1, area);
    let g2 = far_field_gain(ue2, area);
    let n = grid.len() as f64;
    let omega = math::sin(ue2.angle()) - math::sin(ue1.angle());
    let kernel = dirichlet_kernel(grid.side_count(), grid.element_side(), omega, wavelength);
    let magnitude = math::sqrt(g1 * g2) * grid.side_count() as f64 * kernel;
    // conj(e^{-jφ₁}) e^{-jφ₂} carries the path difference d₁ − d₂
    let phase = phase_of_distance(ue1.distance() - ue2.distance(), wavelength);
    let (s, c) = math::sincos(phase);
    Ok(ChannelStats {
        norm1_sq: n * g1,
        norm2_sq: n * g2,
        cross: Complex::new(magnitude * c, magnitude * s),
        n_elements: grid.len(),
        wavelength,
    })
}

/// Statistics under `model`, using closed forms for the far-field model and a
/// streaming pass for the exact one.
pub fn stats_for(
    model: ChannelModel,
    pol: PolarizationMode,
    grid: &ElementGrid,
    ue1: &UePolar,
    ue2: &UePolar,
    wavelength: f64,
) -> Result<ChannelStats> {
    match model {
        ChannelModel::ExactNearField => channel_stats(model, pol, grid, ue1, ue2, wavelength),
        ChannelModel::FarField => far_field_stats(grid, ue1, ue2, wavelength),
    }
}
