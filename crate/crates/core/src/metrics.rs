//! Phase-invariant distances, eigenvalue estimation and convergence
//! diagnostics.
//!
//! The distance between phase orbits `{e^{is} u}` and `{e^{is} v}` is
//! realized by a single alignment angle, the principal argument of the
//! complex `H^1` pairing `<u, v> + <grad u, grad v>`; when that pairing
//! vanishes the infimum over angles degenerates to the Pythagorean value
//! `sqrt(||u||^2 + ||v||^2)` and no angle is distinguished.
//!
//! The smallest eigenvalue of `-1/2 Delta + V - Omega L_z` is estimated
//! matrix-free by shifted inverse power iteration; the shifted solves run
//! preconditioned conjugate gradients with the diagonal spectral symbol as
//! the preconditioner. The fitting helpers turn recorded trajectories into
//! tail-window exponential rates and ratio bands.

use std::sync::Arc;

use num_complex::Complex64;

use crate::dgf::IterationRecord;
use crate::error::Error;
use crate::grid::{
    forward_transform, inner_products, inverse_transform, norm_h1, norm_l2, Field, Grid,
};
use crate::model::{evaluate_potential, ModelParams};
use crate::ops::apply_lz;

/// Value below which a trajectory entry is treated as round-off noise and
/// excluded from tail fits and ratio bands.
const TAIL_FLOOR: f64 = 1e-11;

/// Start of the tail window: first entry below `1e-2` times the initial one.
const TAIL_DROP: f64 = 1e-2;

/// Alignment of a field against a reference orbit.
#[derive(Debug)]
pub struct PhaseAlignment {
    /// Minimizing angle in `(-pi, pi]`.
    pub theta: f64,
    /// `e^{i theta}` times the reference.
    pub aligned_ref: Field,
    /// `H^1` distance to the aligned reference.
    pub dist_h1: f64,
    /// Magnitude of the complex `H^1` pairing; positive iff the angle is
    /// well-defined.
    pub inner_magnitude: f64,
}

/// Aligns `phi` against the orbit of `reference`. The angle is the principal
/// argument of the complex `H^1` pairing; it fails as degenerate when the
/// pairing magnitude falls below `1e-14 ||phi||_H1 ||ref||_H1`.
pub fn phase_align(phi: &Field, reference: &Field) -> Result<PhaseAlignment, Error> {
    let pairing = inner_products(phi, reference)?.complex_h1;
    let magnitude = pairing.norm();
    let scale = norm_h1(phi) * norm_h1(reference);
    if magnitude < 1e-14 * scale || magnitude == 0.0 {
        return Err(Error::DegenerateAlignment { magnitude });
    }
    let theta = pairing.arg();
    let aligned_ref = reference.scale(Complex64::from_polar(1.0, theta));
    let dist_h1 = norm_h1(&phi.sub(&aligned_ref));
    Ok(PhaseAlignment {
        theta,
        aligned_ref,
        dist_h1,
        inner_magnitude: magnitude,
    })
}

/// Distance between the phase orbits of `phi` and `reference`. Degenerate
/// pairings fall back to the closed-form infimum
/// `sqrt(||phi||_H1^2 + ||ref||_H1^2)`.
pub fn dist_h1(phi: &Field, reference: &Field) -> Result<f64, Error> {
    match phase_align(phi, reference) {
        Ok(alignment) => Ok(alignment.dist_h1),
        Err(Error::DegenerateAlignment { .. }) => {
            let a = norm_h1(phi);
            let b = norm_h1(reference);
            Ok((a * a + b * b).sqrt())
        }
        Err(e) => Err(e),
    }
}

/// Applies the linear part `-1/2 Delta + V - Omega L_z`.
fn apply_linear(u: &Field, potential: &[f64], rotation: f64) -> Field {
    let mut out = inverse_transform(&forward_transform(u).scaled_by(|l| 0.5 * l));
    for (o, (&uj, &v)) in out
        .values_mut()
        .iter_mut()
        .zip(u.values().iter().zip(potential))
    {
        *o += v * uj;
    }
    if rotation != 0.0 {
        let lz = apply_lz(u);
        for (o, &l) in out.values_mut().iter_mut().zip(lz.values()) {
            *o -= rotation * l;
        }
    }
    out
}

/// Plain complex dot product `sum_j a_j conj(b_j)`; quadrature weights cancel
/// in every ratio the solvers below form.
fn dot(a: &Field, b: &Field) -> Complex64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(&x, &y)| x * y.conj())
        .sum()
}

/// Preconditioned conjugate gradients for the shifted operator
/// `B = -1/2 Delta + (V - sigma) - Omega L_z`, which is Hermitian positive
/// definite for `sigma < min V`. The preconditioner is the diagonal spectral
/// symbol `1/2 lambda_k + (min V - sigma)`.
fn cg_solve(
    b_rhs: &Field,
    start: Option<Field>,
    potential_shifted: &[f64],
    rotation: f64,
    symbol_shift: f64,
    rel_tol: f64,
) -> Field {
    let apply_b = |u: &Field| apply_linear(u, potential_shifted, rotation);
    let precondition = |r: &Field| {
        inverse_transform(&forward_transform(r).scaled_by(|l| 1.0 / (0.5 * l + symbol_shift)))
    };

    let rhs_norm = b_rhs.values().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if rhs_norm == 0.0 {
        return Field::zeros(b_rhs.grid());
    }
    let mut x = start.unwrap_or_else(|| Field::zeros(b_rhs.grid()));
    let mut r = b_rhs.sub(&apply_b(&x));
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z).re;
    let max_iters = 20 * b_rhs.grid().n_points().max(50);
    for _ in 0..max_iters {
        let res = r.values().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if res <= rel_tol * rhs_norm {
            break;
        }
        let bp = apply_b(&p);
        let alpha = rz / dot(&p, &bp).re;
        x = x.zip_map(&p, |xj, pj| xj + alpha * pj);
        r = r.zip_map(&bp, |rj, bj| rj - alpha * bj);
        z = precondition(&r);
        let rz_next = dot(&r, &z).re;
        let beta = rz_next / rz;
        rz = rz_next;
        p = z.zip_map(&p, |zj, pj| zj + beta * pj);
    }
    x
}

/// Smallest eigenvalue of `-1/2 Delta + V - Omega L_z` by shifted inverse
/// power iteration (shift `min V - 1`), matrix-free. Converged when the
/// Rayleigh residual `||A x - lambda x||` drops below `1e-9 ||x||`.
pub fn estimate_lambda0(grid: &Arc<Grid>, params: &ModelParams) -> Result<f64, Error> {
    let pot = evaluate_potential(params, grid)?;
    let potential: Vec<f64> = pot.values().collect();
    let v_min = potential.iter().cloned().fold(f64::INFINITY, f64::min);
    let sigma = v_min - 1.0;
    let shifted: Vec<f64> = potential.iter().map(|&v| v - sigma).collect();
    let symbol_shift = v_min - sigma; // = 1
    let rotation = params.rotation;

    // Deterministic start with full overlap with the positive ground state.
    let mut x = Field::from_fn(grid, |_| Complex64::new(1.0, 0.0));
    let scale = 1.0 / norm_l2(&x);
    x = x.scale(scale.into());

    let mut residual = f64::INFINITY;
    let mut warm: Option<Field> = None;
    for _ in 0..10_000 {
        let inner_tol = (0.05 * residual).clamp(1e-13, 1e-4);
        let y = cg_solve(&x, warm.take(), &shifted, rotation, symbol_shift, inner_tol);
        let y_norm = norm_l2(&y);
        if !(y_norm > 0.0) || !y.is_finite() {
            return Err(Error::Lambda0Failed {
                iterations: 0,
                residual,
            });
        }
        x = y.scale((1.0 / y_norm).into());

        let ax = apply_linear(&x, &potential, rotation);
        let ip = inner_products(&ax, &x)?;
        let lambda = ip.complex_l2.re;
        residual = norm_l2(&ax.zip_map(&x, |aj, xj| aj - lambda * xj));
        if residual < 1e-9 {
            return Ok(lambda);
        }
        // Warm start near the expected solution direction.
        warm = Some(x.scale((1.0 / (lambda - sigma)).into()));
    }
    Err(Error::Lambda0Failed {
        iterations: 10_000,
        residual,
    })
}

/// Exponential fit of a positive series over its tail window.
#[derive(Clone, Copy, Debug)]
pub struct RateFit {
    /// Decay rate per iteration (negated slope of the log-linear fit).
    pub rate_a: f64,
    /// Intercept of the fit, `ln C`.
    pub prefactor_log_c: f64,
    /// Coefficient of determination; 0 by convention for constant series.
    pub r_squared: f64,
    /// Inclusive range of positions in the input series that were fitted.
    pub window: (usize, usize),
}

/// Positions of the usable tail entries of a series: everything from the
/// first value below `1e-2` times the initial value (the whole series when
/// no entry drops that far), excluding entries at or below the `1e-11`
/// round-off floor.
pub fn tail_positions(values: &[f64]) -> Vec<usize> {
    if values.is_empty() {
        return Vec::new();
    }
    let start = values
        .iter()
        .position(|&v| v < TAIL_DROP * values[0])
        .unwrap_or(0);
    (start..values.len())
        .filter(|&i| values[i].is_finite() && values[i] > TAIL_FLOOR)
        .collect()
}

/// Least-squares log-linear fit over the tail window. Entries carry the
/// iteration index they belong to; the rate is per iteration.
pub fn fit_exponential_rate(series: &[(usize, f64)]) -> Result<RateFit, Error> {
    let values: Vec<f64> = series.iter().map(|&(_, v)| v).collect();
    let usable = tail_positions(&values);
    if usable.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} usable entries in the tail window, need at least 3",
            usable.len()
        )));
    }
    let pts: Vec<(f64, f64)> = usable
        .iter()
        .map(|&i| (series[i].0 as f64, series[i].1.ln()))
        .collect();
    let n = pts.len() as f64;
    let x_mean = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let y_mean = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - x_mean).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - x_mean) * (p.1 - y_mean)).sum();
    let stot: f64 = pts.iter().map(|p| (p.1 - y_mean).powi(2)).sum();
    let window = (usable[0], *usable.last().unwrap());
    if stot <= 1e-28 * n.max(1.0) {
        // Constant series: no decay, r^2 undefined; report zeros.
        return Ok(RateFit {
            rate_a: 0.0,
            prefactor_log_c: y_mean,
            r_squared: 0.0,
            window,
        });
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let sres: f64 = pts
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    Ok(RateFit {
        rate_a: -slope,
        prefactor_log_c: intercept,
        r_squared: (1.0 - sres / stot).clamp(0.0, 1.0),
        window,
    })
}

/// Ratios `(S - S_ref) / ||H u||_{H^-1}^2` for every record whose dual
/// residual clears the `1e-12` floor, in record order.
pub fn lojasiewicz_report(records: &[IterationRecord], s_ref: f64) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.residual_hminus1 > 1e-12)
        .map(|r| (r.s - s_ref) / (r.residual_hminus1 * r.residual_hminus1))
        .collect()
}

/// Min and max of `(S - S_ref)/dist^2` over the tail window of the action
/// gap. Records without a reference distance, below the gap floor, or with
/// vanishing distance are skipped.
pub fn sgap_dist_equivalence(
    records: &[IterationRecord],
    s_ref: f64,
) -> Result<(f64, f64), Error> {
    let gaps: Vec<f64> = records.iter().map(|r| r.s - s_ref).collect();
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    let mut used = 0usize;
    for i in tail_positions(&gaps) {
        let dist = match records[i].dist_to_ref {
            Some(d) if d * d > 1e-24 => d,
            _ => continue,
        };
        let ratio = gaps[i] / (dist * dist);
        lower = lower.min(ratio);
        upper = upper.max(ratio);
        used += 1;
    }
    if used == 0 {
        return Err(Error::InsufficientData(
            "no records usable for the gap/distance band".into(),
        ));
    }
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::model::Potential;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const PI: f64 = std::f64::consts::PI;

    fn sine_grid(n: usize) -> Arc<Grid> {
        Grid::build(GridSpec::sine_1d(0.0, 1.0, n)).unwrap()
    }

    fn random_smooth(grid: &Arc<Grid>, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..grid.n_points())
            .map(|k| {
                let decay = (-(k as f64) * 0.35).exp();
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * decay
            })
            .collect();
        inverse_transform(&crate::grid::SpectralField::new(grid.clone(), coeffs).unwrap())
    }

    #[test]
    fn alignment_recovers_an_exact_orbit_member() {
        let grid = sine_grid(32);
        let reference = random_smooth(&grid, 1);
        let phi = reference.scale(Complex64::from_polar(1.0, 0.7));
        let a = phase_align(&phi, &reference).unwrap();
        assert!((a.theta - 0.7).abs() < 1e-12, "theta {}", a.theta);
        assert!(a.dist_h1 < 1e-12);
        assert!(a.inner_magnitude > 0.0);
        let positive = reference.scale(2.5.into());
        assert!(phase_align(&positive, &reference).unwrap().theta.abs() < 1e-12);
    }

    #[test]
    fn alignment_first_order_expansion() {
        // eta constrained orthogonal to the gauge direction i*ref: theta
        // stays second order and dist is eps ||eta|| to first order.
        let grid = sine_grid(32);
        let reference = random_smooth(&grid, 2);
        let raw = random_smooth(&grid, 3);
        let gauge = reference.scale(Complex64::new(0.0, 1.0));
        let coef = inner_products(&raw, &gauge).unwrap().h1
            / inner_products(&gauge, &gauge).unwrap().h1;
        let eta = raw.zip_map(&gauge, |r, g| r - coef * g);
        assert!(inner_products(&eta, &gauge).unwrap().h1.abs() < 1e-12);

        let eps = 1e-3;
        let phi = reference.add(&eta.scale(eps.into()));
        let a = phase_align(&phi, &reference).unwrap();
        assert!(a.theta.abs() < 1e-6, "theta {}", a.theta);
        let expect = eps * norm_h1(&eta);
        assert!(
            (a.dist_h1 - expect).abs() < 1e-6 * norm_h1(&eta).max(1.0),
            "dist {} vs first order {expect}",
            a.dist_h1
        );
    }

    #[test]
    fn alignment_orthogonality_and_minimality() {
        let grid = sine_grid(24);
        for seed in 0..20u64 {
            let phi = random_smooth(&grid, 100 + seed);
            let reference = random_smooth(&grid, 200 + seed);
            let a = match phase_align(&phi, &reference) {
                Ok(a) => a,
                Err(_) => continue,
            };
            // Stationarity: the gauge direction at the aligned reference is
            // H1-orthogonal to the offset.
            let gauge = a.aligned_ref.scale(Complex64::new(0.0, 1.0));
            let offset = phi.sub(&a.aligned_ref);
            let orth = inner_products(&gauge, &offset).unwrap().h1;
            assert!(
                orth.abs() < 1e-10 * norm_h1(&phi) * norm_h1(&reference),
                "orthogonality residual {orth}"
            );
            for j in 0..16 {
                let s = -PI + 2.0 * PI * (j as f64 + 0.5) / 16.0;
                let probe = norm_h1(&phi.sub(&reference.scale(Complex64::from_polar(1.0, s))));
                assert!(a.dist_h1 <= probe + 1e-12, "angle {s}: {probe} < {}", a.dist_h1);
            }
        }
    }

    #[test]
    fn degenerate_pairing_falls_back_to_pythagoras() {
        let grid = sine_grid(32);
        // Disjoint sine modes pair to zero in both L2 and H1.
        let a = Field::from_fn(&grid, |x| Complex64::new((PI * x[0]).sin(), 0.0));
        let b = Field::from_fn(&grid, |x| Complex64::new((2.0 * PI * x[0]).sin(), 0.0));
        match phase_align(&a, &b) {
            Err(Error::DegenerateAlignment { magnitude }) => assert!(magnitude < 1e-12),
            other => panic!("expected degenerate alignment, got {other:?}"),
        }
        let d = dist_h1(&a, &b).unwrap();
        let expect = (norm_h1(&a).powi(2) + norm_h1(&b).powi(2)).sqrt();
        assert!((d - expect).abs() < 1e-12);
    }

    #[test]
    fn distance_axioms_hold_on_random_fields() {
        let grid = sine_grid(24);
        for seed in 0..10u64 {
            let a = random_smooth(&grid, 300 + seed);
            let b = random_smooth(&grid, 400 + seed);
            let c = random_smooth(&grid, 500 + seed);
            assert!(dist_h1(&a, &a).unwrap() < 1e-13);
            let ab = dist_h1(&a, &b).unwrap();
            assert!((ab - dist_h1(&b, &a).unwrap()).abs() < 1e-12);
            for s in [0.1, 1.0, PI] {
                let rotated = a.scale(Complex64::from_polar(1.0, s));
                assert!((dist_h1(&rotated, &b).unwrap() - ab).abs() < 1e-12);
            }
            let ac = dist_h1(&a, &c).unwrap();
            let cb = dist_h1(&c, &b).unwrap();
            assert!(ab <= ac + cb + 1e-10);
        }
    }

    #[test]
    fn lambda0_1d_dirichlet_laplacian() {
        let grid = sine_grid(64);
        let params = ModelParams::new(1, 3.0, 1.0, 0.0, -10.0, Potential::Zero).unwrap();
        let got = estimate_lambda0(&grid, &params).unwrap();
        assert!(
            (got - PI * PI / 2.0).abs() < 1e-9,
            "lambda0 {got} vs {}",
            PI * PI / 2.0
        );
    }

    #[test]
    fn lambda0_2d_harmonic_oscillator() {
        // Isotropic trap: ground energy d/2 = 1; with rotation at Omega the
        // spectrum 1 + n+(1-Omega) + n-(1+Omega) keeps the same minimum.
        let grid = Grid::build(GridSpec::fourier_2d((-8.0, -8.0), (8.0, 8.0), (64, 64))).unwrap();
        for rotation in [0.0, 0.5] {
            let params = ModelParams::new(
                2,
                3.0,
                1.0,
                rotation,
                -10.0,
                Potential::Harmonic {
                    gammas: vec![1.0, 1.0],
                },
            )
            .unwrap();
            let got = estimate_lambda0(&grid, &params).unwrap();
            assert!(
                (got - 1.0).abs() < 1e-6,
                "Omega = {rotation}: lambda0 {got}"
            );
        }
    }

    #[test]
    fn exact_exponential_is_fit_exactly() {
        let series: Vec<(usize, f64)> = (0..60).map(|n| (n, 5.0 * (-0.3 * n as f64).exp())).collect();
        let fit = fit_exponential_rate(&series).unwrap();
        assert!((fit.rate_a - 0.3).abs() < 1e-12, "rate {}", fit.rate_a);
        assert!((fit.prefactor_log_c - 5.0f64.ln()).abs() < 1e-10);
        assert!(fit.r_squared > 1.0 - 1e-12);
        // Strided indices must fit identically per iteration.
        let strided: Vec<(usize, f64)> =
            (0..30).map(|j| (10 * j, 5.0 * (-0.3 * (10 * j) as f64).exp())).collect();
        let sfit = fit_exponential_rate(&strided).unwrap();
        assert!((sfit.rate_a - 0.3).abs() < 1e-12);
    }

    #[test]
    fn constant_series_reports_zero_rate() {
        let series: Vec<(usize, f64)> = (0..10).map(|n| (n, 4.2)).collect();
        let fit = fit_exponential_rate(&series).unwrap();
        assert_eq!(fit.rate_a, 0.0);
        assert_eq!(fit.r_squared, 0.0);
    }

    #[test]
    fn window_skips_the_transient_head() {
        // Plateau, then a clean exponential: the window must start once the
        // series has dropped two decades, recovering the tail rate exactly.
        let mut series: Vec<(usize, f64)> = (0..5).map(|n| (n, 1.0 - 1e-3 * n as f64)).collect();
        for j in 0..40 {
            series.push((5 + j, 0.009 * (-0.5 * j as f64).exp()));
        }
        let fit = fit_exponential_rate(&series).unwrap();
        assert_eq!(fit.window.0, 5);
        assert!((fit.rate_a - 0.5).abs() < 1e-10, "rate {}", fit.rate_a);
        assert!(fit.r_squared > 1.0 - 1e-10);
        // Entries at the round-off floor are excluded rather than fitted.
        let mut with_noise = series.clone();
        for j in 0..5 {
            with_noise.push((60 + j, 1e-13));
        }
        let nfit = fit_exponential_rate(&with_noise).unwrap();
        assert!((nfit.rate_a - 0.5).abs() < 1e-10);
    }

    #[test]
    fn too_short_series_is_rejected() {
        let series = vec![(0usize, 1.0), (1, 0.5)];
        match fit_exponential_rate(&series) {
            Err(Error::InsufficientData(_)) => {}
            other => panic!("expected InsufficientData, got {other:?}"),
        }
    }

    fn synthetic_record(n: usize, s: f64, res_hm1: f64, dist: Option<f64>) -> IterationRecord {
        IterationRecord {
            n,
            s,
            k: 0.0,
            alpha_n: 0.0,
            mu_l2: 0.0,
            mu_h1: 0.0,
            residual_max: res_hm1,
            residual_hminus1: res_hm1,
            phi_h1: 1.0,
            dist_to_ref: dist,
            decay_slack: 0.0,
        }
    }

    #[test]
    fn lojasiewicz_ratios_on_synthetic_records() {
        // gap = 3 res^2 everywhere; a record at the reference itself sits
        // below the floor and is skipped.
        let c = 3.0;
        let mut records: Vec<IterationRecord> = (0..8)
            .map(|n| {
                let res = 10f64.powi(-(n as i32));
                synthetic_record(n, c * res * res, res, None)
            })
            .collect();
        records.push(synthetic_record(8, 0.0, 0.0, None));
        let ratios = lojasiewicz_report(&records, 0.0);
        assert_eq!(ratios.len(), 8);
        for r in &ratios {
            assert!((r - c).abs() < 1e-12 * c);
        }
    }

    #[test]
    fn gap_distance_band_on_synthetic_records() {
        let records: Vec<IterationRecord> = (0..40)
            .map(|n| {
                let gap = 0.5f64.powi(n as i32);
                synthetic_record(n, gap, 1.0, Some((gap / 2.0).sqrt()))
            })
            .collect();
        let (lower, upper) = sgap_dist_equivalence(&records, 0.0).unwrap();
        assert!((lower - 2.0).abs() < 1e-12 && (upper - 2.0).abs() < 1e-12);
    }
}
