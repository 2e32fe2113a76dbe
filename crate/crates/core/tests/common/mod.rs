//! Independent reference computations used by the integration tests. None of
//! these call into the closed forms they check.
#![allow(dead_code)]

use std::f64::consts::PI;

use lisfield_core::{Complex, LinkBudget, Point3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Adaptive Simpson integration of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Iterated adaptive quadrature over `[x0, x1] × [y0, y1]`.
pub fn integrate_2d(
    f: &dyn Fn(f64, f64) -> f64,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    tol: f64,
) -> f64 {
    let inner_tol = tol / (4.0 * (x1 - x0).max(1.0));
    let outer = |x: f64| adaptive_simpson(&|y| f(x, y), y0, y1, inner_tol);
    adaptive_simpson(&outer, x0, x1, tol / 2.0)
}

/// Power density captured at surface point `(x, y, 0)` from `s`, without
/// polarization loss: `z / (4π ρ³)`.
pub fn density_ignored(s: &Point3, x: f64, y: f64) -> f64 {
    let dx = x - s.x;
    let dy = y - s.y;
    let rho2 = dx * dx + dy * dy + s.z * s.z;
    s.z / (4.0 * PI * rho2 * rho2.sqrt())
}

/// Same, with the Y-polarization mismatch: `z ((x − x_s)² + z²) / (4π ρ⁵)`.
pub fn density_mismatch(s: &Point3, x: f64, y: f64) -> f64 {
    let dx = x - s.x;
    let dy = y - s.y;
    let rho2 = dx * dx + dy * dy + s.z * s.z;
    s.z * (dx * dx + s.z * s.z) / (4.0 * PI * rho2 * rho2 * rho2.sqrt())
}

/// Quadrature of a density over the square element centered at `center`.
pub fn element_quadrature(
    density: fn(&Point3, f64, f64) -> f64,
    s: &Point3,
    center: &Point3,
    side: f64,
    tol: f64,
) -> f64 {
    let h = side / 2.0;
    integrate_2d(
        &|x, y| density(s, x, y),
        (center.x - h, center.x + h),
        (center.y - h, center.y + h),
        tol,
    )
}

pub fn inner(v: &[Complex], w: &[Complex]) -> Complex {
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sq(v: &[Complex]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

/// `(SNR₁h₁h₁ᴴ + SNR₂h₂h₂ᴴ + I) v`, applied directly.
pub fn apply_covariance(
    h1: &[Complex],
    h2: &[Complex],
    budget: &LinkBudget,
    v: &[Complex],
) -> Vec<Complex> {
    let a1 = inner(h1, v) * budget.snr1();
    let a2 = inner(h2, v) * budget.snr2();
    v.iter()
        .zip(h1.iter().zip(h2))
        .map(|(vi, (x, y))| vi + x * a1 + y * a2)
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(rng: &mut impl Rng) -> Complex {
    Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn complex_vec(rng: &mut impl Rng, n: usize) -> Vec<Complex> {
    (0..n).map(|_| complex(rng)).collect()
}
