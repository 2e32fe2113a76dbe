//! Receive combining for the two-user uplink.
//!
//! For a combiner `v` the SINR of user 1 is
//! `SNR₁|vᴴh₁|² / (SNR₂|vᴴh₂|² + ‖v‖²)`. MR uses `v = h₁/‖h₁‖`; MMSE uses
//! `v = (Σᵢ SNRᵢ hᵢhᵢᴴ + I)⁻¹ h₁`, which maximizes the quotient. Both closed
//! forms reduce to `SNR₁‖h₁‖²(1 − α)` with a loss term α that depends only on
//! [`ChannelStats`].

use alloc::vec::Vec;

use crate::channel::{ChannelStats, Complex, DEFAULT_MATERIALIZATION_CAP};
use crate::error::{Error, Result};
use crate::math;

/// Transmit and noise powers in dBm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub p1_dbm: f64,
    pub p2_dbm: f64,
    pub noise_dbm: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            p1_dbm: 30.0,
            p2_dbm: 30.0,
            noise_dbm: 0.0,
        }
    }
}

impl LinkBudget {
    pub fn new(p1_dbm: f64, p2_dbm: f64, noise_dbm: f64) -> Self {
        Self {
            p1_dbm,
            p2_dbm,
            noise_dbm,
        }
    }

    pub fn snr1(&self) -> f64 {
        db_to_linear(self.p1_dbm - self.noise_dbm)
    }

    pub fn snr2(&self) -> f64 {
        db_to_linear(self.p2_dbm - self.noise_dbm)
    }
}

fn db_to_linear(db: f64) -> f64 {
    math::powf(10.0, db / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CombinerKind {
    Mr,
    Mmse,
    /// Reference curve `SNR₁‖h₁‖²` with the interferer switched off.
    InterferenceFree,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrReport {
    pub gamma: f64,
    pub alpha: f64,
    /// Spectral efficiency in bit/s/Hz.
    pub se: f64,
}

impl SinrReport {
    fn from_loss(snr1: f64, norm1_sq: f64, alpha: f64) -> Self {
        let gamma = snr1 * norm1_sq * (1.0 - alpha);
        Self {
            gamma,
            alpha,
            se: se_unchecked(gamma),
        }
    }
}

fn check_stats(stats: &ChannelStats) -> Result<()> {
    if stats.norm1_sq > 0.0 {
        Ok(())
    } else {
        Err(Error::DegenerateChannel)
    }
}

pub fn sinr_mr(stats: &ChannelStats, budget: &LinkBudget) -> Result<SinrReport> {
    check_stats(stats)?;
    let interference = budget.snr2() * stats.interference_gain();
    let alpha = interference / (1.0 + interference);
    Ok(SinrReport::from_loss(budget.snr1(), stats.norm1_sq, alpha))
}

pub fn sinr_mmse(stats: &ChannelStats, budget: &LinkBudget) -> Result<SinrReport> {
    check_stats(stats)?;
    let snr2 = budget.snr2();
    let alpha = snr2 * stats.interference_gain() / (1.0 + snr2 * stats.norm2_sq);
    Ok(SinrReport::from_loss(budget.snr1(), stats.norm1_sq, alpha))
}

pub fn sinr_interference_free(stats: &ChannelStats, budget: &LinkBudget) -> Result<SinrReport> {
    check_stats(stats)?;
    Ok(SinrReport::from_loss(budget.snr1(), stats.norm1_sq, 0.0))
}

pub fn sinr(kind: CombinerKind, stats: &ChannelStats, budget: &LinkBudget) -> Result<SinrReport> {
    match kind {
        CombinerKind::Mr => sinr_mr(stats, budget),
        CombinerKind::Mmse => sinr_mmse(stats, budget),
        CombinerKind::InterferenceFree => sinr_interference_free(stats, budget),
    }
}

/// `vᴴw`
fn inner(v: &[Complex], w: &[Complex]) -> Complex {
    let mut acc = crate::sum::ComplexSum::new();
    for (a, b) in v.iter().zip(w) {
        acc.add(a.conj() * b);
    }
    acc.value()
}

fn norm_sq(v: &[Complex]) -> f64 {
    v.iter()
        .map(|x| x.norm_sqr())
        .collect::<crate::sum::NeumaierSum>()
        .value()
}

/// SINR of user 1 for an arbitrary combiner `v`.
pub fn sinr_generic(
    v: &[Complex],
    h1: &[Complex],
    h2: &[Complex],
    budget: &LinkBudget,
) -> Result<f64> {
    if v.len() != h1.len() {
        return Err(Error::LengthMismatch(v.len(), h1.len()));
    }
    if h1.len() != h2.len() {
        return Err(Error::LengthMismatch(h1.len(), h2.len()));
    }
    let v_norm = norm_sq(v);
    if !(v_norm > 0.0) {
        return Err(Error::ZeroCombiner);
    }
    let signal = inner(v, h1).norm_sqr();
    let interference = inner(v, h2).norm_sqr();
    Ok(budget.snr1() * signal / (budget.snr2() * interference + v_norm))
}

/// MMSE combiner `(SNR₁h₁h₁ᴴ + SNR₂h₂h₂ᴴ + I)⁻¹h₁`.
///
/// The solution lies in span{h₁, h₂}: writing `v = c₁h₁ + c₂h₂` reduces the
/// N×N system to `(D G + I) c = e₁` with Gram matrix `G` and `D = diag(SNR)`.
pub fn mmse_combiner(h1: &[Complex], h2: &[Complex], budget: &LinkBudget) -> Result<Vec<Complex>> {
    if h1.len() != h2.len() {
        return Err(Error::LengthMismatch(h1.len(), h2.len()));
    }
    if h1.len() as u64 > DEFAULT_MATERIALIZATION_CAP {
        return Err(Error::MaterializationCap {
            count: h1.len() as u64,
            cap: DEFAULT_MATERIALIZATION_CAP,
        });
    }
    let (c1, c2) = mmse_coefficients(norm_sq(h1), inner(h1, h2), norm_sq(h2), budget);
    Ok(h1.iter().zip(h2).map(|(a, b)| c1 * a + c2 * b).collect())
}

/// Coefficients `(c₁, c₂)` of the MMSE combiner in the basis {h₁, h₂}, from
/// the Gram entries `‖h₁‖²`, `h₁ᴴh₂`, `‖h₂‖²`.
pub fn mmse_coefficients(
    norm1_sq: f64,
    cross: Complex,
    norm2_sq: f64,
    budget: &LinkBudget,
) -> (Complex, Complex) {
    let s1 = budget.snr1();
    let s2 = budget.snr2();
    // D G + I = [[1 + s1 g11, s1 g12], [s2 g21, 1 + s2 g22]], g21 = conj(g12)
    let a = 1.0 + s1 * norm1_sq;
    let b = s1 * cross;
    let c = s2 * cross.conj();
    let d = 1.0 + s2 * norm2_sq;
    let det = a * d - (b * c).re;
    (Complex::new(d / det, 0.0), -c / det)
}

/// Spectral efficiency `log₂(1 + γ)` in bit/s/Hz.
pub fn se(gamma: f64) -> Result<f64> {
    if gamma < 0.0 || gamma.is_nan() {
        return Err(Error::NegativeSinr(gamma));
    }
    Ok(se_unchecked(gamma))
}

fn se_unchecked(gamma: f64) -> f64 {
    math::log1p(gamma) / core::f64::consts::LN_2
}
