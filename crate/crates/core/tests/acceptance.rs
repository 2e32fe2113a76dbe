//! Reproduction criteria. Each check prints one PASS/FAIL line with the
//! measured values and its runtime against the budget; the process exits
//! with status 1 if any check fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lisfield_core::channel::{
    channel_stats, channel_stats_range, channel_vector, element_gain_exact,
    element_gain_ignored_polarization, interference_far_field_closed, norm_closed_form,
    norm_far_field, surface_gain, ChannelModel, PolarizationMode, StatsAccumulator,
};
use lisfield_core::combining::{mmse_combiner, sinr_generic, sinr_mmse};
use lisfield_core::experiments::{
    self, run_heatmap, run_polarization_compare, run_position_error, run_se_vs_distance,
    run_se_vs_length, HeatmapSpec, Scenario, SeTriple,
};
use lisfield_core::{ChannelStats, ElementGrid, LinkBudget, Point3, UePolar};
use rand::Rng;

use common::*;

const LAMBDA: f64 = 0.1;
const SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            name: "gain identity",
            budget: secs(5),
            run: gain_identity,
        },
        Criterion {
            name: "far-field kernel identity",
            budget: secs(5),
            run: kernel_identity,
        },
        Criterion {
            name: "gain vs size",
            budget: secs(1),
            run: gain_vs_size,
        },
        Criterion {
            name: "SE vs size ordering",
            budget: secs(600),
            run: se_vs_size,
        },
        Criterion {
            name: "SE vs depth",
            budget: secs(60),
            run: se_vs_depth,
        },
        Criterion {
            name: "interferer heatmap",
            budget: secs(600),
            run: heatmap,
        },
        Criterion {
            name: "polarization loss",
            budget: secs(120),
            run: polarization,
        },
        Criterion {
            name: "position error",
            budget: secs(300),
            run: position_error,
        },
        Criterion {
            name: "numerics",
            budget: secs(60),
            run: numerics,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.budget;
        let pass = outcome.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "{} {:<26} {:>8.2}s/{:<4}s{} {}",
            if pass { "PASS" } else { "FAIL" },
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs(),
            if in_time { "" } else { " over budget" },
            outcome.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn gain_identity() -> Outcome {
    let mut rng = rng(SEED);
    let mut worst: f64 = 0.0;
    for side_count in [1u32, 2, 10, 100] {
        for _ in 0..50 {
            let d = rng.random_range(0.5..20.0);
            let theta = rng.random_range(-1.4..1.4);
            let side = rng.random_range(0.005..0.5);
            let grid = ElementGrid::new(side_count, side).unwrap();
            let s = UePolar::new(d, theta).unwrap().to_point();
            let sum: f64 = grid
                .centers()
                .map(|c| element_gain_exact(&s, &c, side).unwrap())
                .collect::<lisfield_core::sum::NeumaierSum>()
                .value();
            let closed = norm_closed_form(d, theta, grid.len(), grid.element_area()).unwrap();
            worst = worst.max(rel(sum, closed));
        }
    }
    Outcome::new(
        worst <= 1e-9,
        format!("max rel err {worst:.2e} (limit 1e-9)"),
    )
}

fn kernel_identity() -> Outcome {
    let mut rng = rng(SEED + 1);
    let mut worst: f64 = 0.0;
    let mut cases: Vec<(u32, f64, f64, f64)> = vec![
        (100, 0.025, 0.1, 0.1),
        (1, 0.025, 0.3, -0.2),
        (77, 0.025, -0.5, -0.5),
    ];
    for _ in 0..30 {
        cases.push((
            rng.random_range(1..=100),
            rng.random_range(0.01..0.1),
            rng.random_range(-1.4..1.4),
            rng.random_range(-1.4..1.4),
        ));
    }
    // grating lobe: aΩ/λ = 1 with one-wavelength elements
    let t1: f64 = 0.2;
    cases.push((50, LAMBDA, t1, (t1.sin() - 1.0).asin()));
    for (side_count, side, t1, t2) in cases {
        let grid = ElementGrid::new(side_count, side).unwrap();
        let ue1 = UePolar::new(2.5, t1).unwrap();
        let ue2 = UePolar::new(3.5, t2).unwrap();
        let h1 = channel_vector(
            ChannelModel::FarField,
            PolarizationMode::Mismatch,
            &grid,
            &ue1,
            LAMBDA,
        )
        .unwrap();
        let h2 = channel_vector(
            ChannelModel::FarField,
            PolarizationMode::Mismatch,
            &grid,
            &ue2,
            LAMBDA,
        )
        .unwrap();
        let direct = inner(&h1, &h2).norm_sqr() / norm_sq(&h1);
        let closed =
            interference_far_field_closed(3.5, t1, t2, grid.len(), grid.element_area(), LAMBDA);
        // nulls of the kernel are compared on the scale of the peak
        let scale = direct.max(1e-6 * norm_sq(&h2));
        worst = worst.max((closed - direct).abs() / scale);
    }
    Outcome::new(
        worst <= 1e-9,
        format!("max rel err {worst:.2e} (limit 1e-9)"),
    )
}

fn gain_vs_size() -> Outcome {
    let s = Scenario::default();
    let third = 1.0 / 3.0;
    let (d, theta) = (s.ue1.distance(), s.ue1.angle());
    let gains = |length: f64| {
        let grid = ElementGrid::for_length(length, s.element_side).unwrap();
        let (n, area) = (grid.len(), grid.element_area());
        (
            grid.length(),
            norm_closed_form(d, theta, n, area).unwrap(),
            norm_far_field(d, theta, n, area),
        )
    };
    let (_, exact1, far1) = gains(1.0);
    let (_, exact100, _) = gains(100.0);
    let gap = far1 / exact1 - 1.0;
    let sweep: Vec<_> = experiments::default_length_grid()
        .into_iter()
        .map(gains)
        .collect();
    // neighbouring targets can round to the same element count
    let monotone = sweep.windows(2).all(|w| {
        if w[1].0 > w[0].0 {
            w[1].1 > w[0].1
        } else {
            w[1].1 == w[0].1
        }
    });
    let below = sweep.iter().all(|r| r.1 < third);
    let crossing = sweep.iter().position(|r| r.2 > third);
    let keeps_growing = sweep
        .windows(2)
        .all(|w| w[1].0 == w[0].0 || w[1].2 > w[0].2);
    let near = 1.0 - exact100 / third;
    let pass =
        gap >= 0.05 && monotone && below && near <= 0.04 && crossing.is_some() && keeps_growing;
    Outcome::new(
        pass,
        format!(
            "L=1: exact {:.5} far {:.5} gap {:.1}%; L=100: exact {:.5} ({:.2}% below 1/3); monotone {monotone}, below 1/3 {below}, far-field crosses at L={:.2}",
            exact1,
            far1,
            100.0 * gap,
            exact100,
            100.0 * near,
            crossing.map_or(f64::NAN, |i| sweep[i].0),
        ),
    )
}

fn ordered(t: &SeTriple) -> bool {
    let slack = 1e-12;
    t.free.se >= t.mmse.se * (1.0 - slack) && t.mmse.se >= t.mr.se * (1.0 - slack)
}

fn se_vs_size() -> Outcome {
    let rows = run_se_vs_length(&Scenario::default(), &experiments::default_length_grid()).unwrap();
    let bad = rows
        .iter()
        .filter(|r| !(ordered(&r.exact) && ordered(&r.far_field)))
        .count();
    Outcome::new(
        bad == 0,
        format!("{} points, {bad} out of order", rows.len()),
    )
}

fn se_vs_depth() -> Outcome {
    let rows = run_se_vs_distance(
        &Scenario::default(),
        &experiments::default_distance_grid(),
        6.0,
    )
    .unwrap();
    let bad = rows
        .iter()
        .filter(|r| !(ordered(&r.exact) && ordered(&r.far_field)))
        .count();
    let near_gap = rows
        .iter()
        .filter(|r| r.z <= 10.0)
        .map(|r| 1.0 - r.exact.mmse.se / r.exact.free.se)
        .fold(0.0, f64::max);
    let far: Vec<_> = rows.iter().filter(|r| r.z >= 40.0).collect();
    let (worst_z, far_gap) = far
        .iter()
        .map(|r| (r.z, r.exact.mmse.se - r.exact.mr.se))
        .fold((f64::NAN, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    let converged_from = rows
        .iter()
        .rev()
        .take_while(|r| r.exact.mmse.se - r.exact.mr.se <= 0.1)
        .last()
        .map_or(f64::NAN, |r| r.z);
    let pass = bad == 0 && near_gap <= 0.01 && far_gap <= 0.1;
    Outcome::new(
        pass,
        format!(
            "{bad} out of order; z<=10: MMSE within {:.2}% of free (limit 1%); z>=40: max MMSE-MR {far_gap:.3} at z={worst_z} (limit 0.1), gap <= 0.1 from z={converged_from}",
            100.0 * near_gap
        ),
    )
}

fn heatmap() -> Outcome {
    let rows = run_heatmap(&Scenario::default(), &HeatmapSpec::default(), 6.0).unwrap();
    let poi = rows
        .iter()
        .find(|r| r.dx_wavelengths == 0.0 && r.dz_wavelengths == 0.0)
        .unwrap();
    let max = rows.iter().map(|r| r.se_mmse).fold(f64::MIN, f64::max);
    // half-width of the below-half region along z through the point of
    // interest, from interpolated crossings on either side
    let mut line: Vec<_> = rows.iter().filter(|r| r.dx_wavelengths == 0.0).collect();
    line.sort_by(|a, b| a.dz_wavelengths.total_cmp(&b.dz_wavelengths));
    let deficit = |r: &&lisfield_core::experiments::HeatmapRecord| r.se_mmse - 0.5 * r.se_free;
    let centre = line.iter().position(|r| r.dz_wavelengths == 0.0).unwrap();
    let crossing = |range: Box<dyn Iterator<Item = usize>>| -> Option<f64> {
        let mut prev = centre;
        for i in range {
            let (a, b) = (deficit(&line[prev]), deficit(&line[i]));
            if b >= 0.0 {
                let t = a / (a - b);
                let (za, zb) = (line[prev].dz_wavelengths, line[i].dz_wavelengths);
                return Some(za + t * (zb - za));
            }
            prev = i;
        }
        None
    };
    let up = crossing(Box::new(centre + 1..line.len()));
    let down = crossing(Box::new((0..centre).rev()));
    let semi_axis = match (up, down) {
        (Some(u), Some(d)) => 0.5 * (u - d),
        _ => f64::NAN,
    };
    let pass = (poi.se_mmse - 1.0).abs() <= 0.3
        && (max - 7.0).abs() <= 0.5
        && (semi_axis - 0.5).abs() <= 0.15;
    Outcome::new(
        pass,
        format!(
            "{} points; MMSE at point of interest {:.3} (1±0.3), max {:.3} (7±0.5), region extends ±{:.3}λ along z (0.5±0.15), crossings at {:.4}λ and {:.4}λ",
            rows.len(),
            poi.se_mmse,
            max,
            semi_axis,
            down.unwrap_or(f64::NAN),
            up.unwrap_or(f64::NAN),
        ),
    )
}

fn polarization() -> Outcome {
    let s = Scenario::default();
    let small: Vec<f64> = (1..=10).map(f64::from).collect();
    let rows = run_polarization_compare(&s, &small).unwrap();
    let small_worst = rows
        .iter()
        .flat_map(|r| r.reductions())
        .fold(f64::MIN, f64::max);
    let big = &run_polarization_compare(&s, &[100.0]).unwrap()[0];
    let [_, mmse, mr] = big.reductions();
    let pass = (100.0 * mmse - 6.5).abs() <= 2.0
        && (100.0 * mr - 15.0).abs() <= 3.0
        && 100.0 * small_worst <= 6.0;
    Outcome::new(
        pass,
        format!(
            "L=100 (N={}): MMSE {:.2}% (6.5±2), MR {:.2}% (15±3); L in 1..10: max {:.2}% (<=6)",
            big.n_elements,
            100.0 * mmse,
            100.0 * mr,
            100.0 * small_worst
        ),
    )
}

fn position_error() -> Outcome {
    let rows = run_position_error(&Scenario::default(), &[0.0, 0.5], 1000, SEED, 6.0).unwrap();
    let (exact, off) = (&rows[0], &rows[1]);
    let reduction = 1.0 - off.se_mmse_mean / exact.se_mmse_mean;
    let mr_flat = rows.iter().all(|r| r.se_mr == rows[0].se_mr);
    let pass = (100.0 * reduction - 65.0).abs() <= 10.0 && mr_flat;
    Outcome::new(
        pass,
        format!(
            "mean MMSE SE {:.3} at r=0, {:.3} ± {:.3} at r=0.5λ: reduction {:.1}% (65±10); MR {:.3} constant {mr_flat}",
            exact.se_mmse_mean,
            off.se_mmse_mean,
            off.se_mmse_std,
            100.0 * reduction,
            exact.se_mr
        ),
    )
}

fn numerics() -> Outcome {
    let mut failures = Vec::new();
    let mut check = |ok: bool, what: String| {
        if !ok {
            failures.push(what);
        }
    };
    let mut rng = rng(SEED + 2);

    // Cauchy–Schwarz over random exact and far-field configurations
    let mut cs_worst: f64 = 0.0;
    for i in 0..500 {
        let grid =
            ElementGrid::new(rng.random_range(1..12u32), rng.random_range(0.01..0.3)).unwrap();
        let model = if i % 2 == 0 {
            ChannelModel::ExactNearField
        } else {
            ChannelModel::FarField
        };
        let ue1 = UePolar::new(rng.random_range(0.5..5.0), rng.random_range(-1.5..1.5)).unwrap();
        let ue2 = UePolar::new(rng.random_range(0.5..5.0), rng.random_range(-1.5..1.5)).unwrap();
        let s =
            channel_stats(model, PolarizationMode::Mismatch, &grid, &ue1, &ue2, LAMBDA).unwrap();
        cs_worst = cs_worst.max(s.cross.norm_sqr() / (s.norm1_sq * s.norm2_sq));
    }
    check(
        cs_worst <= 1.0 + 1e-12,
        format!("cauchy-schwarz ratio {cs_worst}"),
    );

    // streaming against materialized vectors
    let grid = ElementGrid::new(100, 0.025).unwrap();
    let ue1 = UePolar::from_degrees(2.5, 2.0).unwrap();
    let ue2 = UePolar::from_degrees(2.5, -2.0).unwrap();
    let (model, pol) = (ChannelModel::ExactNearField, PolarizationMode::Mismatch);
    let h1 = channel_vector(model, pol, &grid, &ue1, LAMBDA).unwrap();
    let h2 = channel_vector(model, pol, &grid, &ue2, LAMBDA).unwrap();
    let streamed = channel_stats(model, pol, &grid, &ue1, &ue2, LAMBDA).unwrap();
    let stream_err = rel(streamed.norm1_sq, norm_sq(&h1))
        .max(rel(streamed.norm2_sq, norm_sq(&h2)))
        .max((streamed.cross - inner(&h1, &h2)).norm() / inner(&h1, &h2).norm());
    check(
        stream_err <= 1e-12,
        format!("streaming rel err {stream_err:.2e}"),
    );

    // partition order
    let mut part_err: f64 = 0.0;
    for _ in 0..5 {
        let mut cuts: Vec<u64> = (0..9).map(|_| rng.random_range(0..grid.len())).collect();
        cuts.extend([0, grid.len()]);
        cuts.sort_unstable();
        let mut acc = StatsAccumulator::new();
        for w in cuts.windows(2).rev() {
            acc.merge(
                &channel_stats_range(model, pol, &grid, &ue1, &ue2, LAMBDA, w[0]..w[1]).unwrap(),
            );
        }
        let s = acc.finish(LAMBDA);
        part_err = part_err
            .max(rel(s.norm1_sq, streamed.norm1_sq))
            .max((s.cross - streamed.cross).norm() / streamed.cross.norm());
    }
    check(
        part_err <= 1e-9,
        format!("partition rel err {part_err:.2e}"),
    );

    // MMSE combiner residual and optimality
    let budget = LinkBudget::default();
    let a = complex_vec(&mut rng, 64);
    let b = complex_vec(&mut rng, 64);
    let v = mmse_combiner(&a, &b, &budget).unwrap();
    let residual = apply_covariance(&a, &b, &budget, &v)
        .iter()
        .zip(&a)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
        / norm_sq(&a).sqrt();
    check(residual <= 1e-10, format!("mmse residual {residual:.2e}"));

    let budget = LinkBudget::new(10.0, 15.0, 0.0);
    let a = complex_vec(&mut rng, 8);
    let b = complex_vec(&mut rng, 8);
    let best = sinr_mmse(
        &ChannelStats::from_vectors(&a, &b, LAMBDA).unwrap(),
        &budget,
    )
    .unwrap()
    .gamma;
    let beaten = (0..100)
        .filter(|_| {
            let v = complex_vec(&mut rng, 8);
            sinr_generic(&v, &a, &b, &budget).unwrap() > best * (1.0 + 1e-12)
        })
        .count();
    check(beaten == 0, format!("{beaten} random combiners beat MMSE"));

    // ignored-polarization corner sum against quadrature, and the plane limit
    let mut quad_err: f64 = 0.0;
    for (s, c, side) in [
        (Point3::new(0.0, 0.0, 1.0), Point3::default(), 2.0),
        (Point3::new(0.3, -0.2, 0.5), Point3::new(0.1, 0.4, 0.0), 0.3),
        (
            Point3::new(-1.0, 2.0, 0.8),
            Point3::new(0.5, -0.5, 0.0),
            1.2,
        ),
    ] {
        let closed = element_gain_ignored_polarization(&s, &c, side).unwrap();
        let oracle = element_quadrature(density_ignored, &s, &c, side, closed * 1e-11);
        quad_err = quad_err.max(rel(closed, oracle));
    }
    check(
        quad_err <= 1e-9,
        format!("quadrature rel err {quad_err:.2e}"),
    );
    let plane = surface_gain(PolarizationMode::Ignored, &Point3::new(0.0, 0.0, 1.0), 1e7).unwrap();
    check((plane - 0.5).abs() <= 1e-6, format!("plane limit {plane}"));

    let pass = failures.is_empty();
    let detail = if pass {
        format!(
            "cauchy-schwarz max {cs_worst:.6}, streaming {stream_err:.1e}, partitions {part_err:.1e}, residual {residual:.1e}, quadrature {quad_err:.1e}, plane {plane:.9}"
        )
    } else {
        failures.join("; ")
    };
    Outcome::new(pass, detail)
}
