//! Discrete Hamiltonian, rotation operator, functionals and variations.
//!
//! Everything here works on the interpolant-exact discrete pairings from
//! [`crate::grid`]: the Laplacian acts diagonally in coefficient space,
//! multiplication operators act pointwise, and the rotation operator
//! `L_z = i (x2 d/dx1 - x1 d/dx2)` combines spectral derivatives with
//! coordinate multiplication. On the periodic grid the discrete `L_z` is
//! exactly Hermitian, which keeps the rotation energy real and the decay
//! identity of the flow exact in arithmetic.
//!
//! Per call, every functional evaluation performs one forward transform of
//! each field argument (plus the rotation derivatives where `Omega != 0`);
//! nothing is cached across calls.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Error;
use crate::grid::{forward_transform, gradient, Field, Grid};
use crate::model::{evaluate_potential, ModelParams};

/// A model bound to a grid: parameters plus the sampled trap and the
/// coordinate tables the solver needs every step.
pub struct Problem {
    params: ModelParams,
    grid: Arc<Grid>,
    potential: Vec<f64>,
    /// `x1^2 + x2^2` per point; empty in 1d.
    radius_sq: Vec<f64>,
    potential_min: f64,
}

impl Problem {
    pub fn new(params: ModelParams, grid: Arc<Grid>) -> Result<Problem, Error> {
        let pot = evaluate_potential(&params, &grid)?;
        let potential: Vec<f64> = pot.values().collect();
        let potential_min = potential.iter().cloned().fold(f64::INFINITY, f64::min);
        let radius_sq = if grid.dimension() == 2 {
            let mut x = [0.0; 2];
            (0..grid.n_points())
                .map(|flat| {
                    grid.fill_coords(flat, &mut x);
                    x[0] * x[0] + x[1] * x[1]
                })
                .collect()
        } else {
            Vec::new()
        };
        Ok(Problem {
            params,
            grid,
            potential,
            radius_sq,
            potential_min,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Trap values at the collocation points.
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn potential_min(&self) -> f64 {
        self.potential_min
    }

    /// `x1^2 + x2^2` at the collocation points; empty in 1d.
    pub fn radius_sq(&self) -> &[f64] {
        &self.radius_sq
    }

    pub fn check_field(&self, f: &Field) -> Result<(), Error> {
        if f.grid().spec() != self.grid.spec() {
            return Err(Error::InvalidField(
                "field does not live on the problem's grid".into(),
            ));
        }
        Ok(())
    }
}

/// `|u|^q` from `|u|^2`, with the convention `0^q = 0` also for `q <= 0`.
#[inline]
fn amp_pow(norm_sqr: f64, q: f64) -> f64 {
    if norm_sqr == 0.0 {
        0.0
    } else {
        norm_sqr.powf(0.5 * q)
    }
}

/// Rotation operator `L_z f = i (x2 df/dx1 - x1 df/dx2)`; identically zero
/// in 1d.
pub fn apply_lz(f: &Field) -> Field {
    let grid = f.grid().clone();
    if grid.dimension() == 1 {
        return Field::zeros(&grid);
    }
    let grads = gradient(f);
    let (d1, d2) = (&grads[0], &grads[1]);
    let n2 = grid.spec().axes[1].n;
    let x1 = grid.axis_coords(0);
    let x2 = grid.axis_coords(1);
    let i = Complex64::new(0.0, 1.0);
    let values = (0..grid.n_points())
        .map(|flat| i * (x2[flat % n2] * d1.values()[flat] - x1[flat / n2] * d2.values()[flat]))
        .collect();
    Field::from_raw(grid, values)
}

/// Explicit part of the frozen-coefficient Hamiltonian:
/// `g(u) = (V + omega + beta |u|^{p-1}) u - Omega L_z u`.
pub(crate) fn frozen_coefficient_term(u: &Field, prob: &Problem) -> Field {
    let p = prob.params.p;
    let beta = prob.params.beta;
    let omega = prob.params.omega;
    let mut out = Vec::with_capacity(u.values().len());
    for (&uj, &v) in u.values().iter().zip(&prob.potential) {
        out.push((v + omega + beta * amp_pow(uj.norm_sqr(), p - 1.0)) * uj);
    }
    if prob.params.rotation != 0.0 {
        let lz = apply_lz(u);
        let rot = prob.params.rotation;
        for (o, &l) in out.iter_mut().zip(lz.values()) {
            *o -= rot * l;
        }
    }
    Field::from_raw(u.grid().clone(), out)
}

/// Frozen-coefficient Hamiltonian applied to its own base point:
/// `H_u u = -1/2 Delta u + (V + omega + beta |u|^{p-1}) u - Omega L_z u`.
pub fn apply_hamiltonian(u: &Field, prob: &Problem) -> Result<Field, Error> {
    prob.check_field(u)?;
    let s = forward_transform(u);
    let kinetic = crate::grid::inverse_transform(&s.scaled_by(|l| 0.5 * l));
    let g = frozen_coefficient_term(u, prob);
    Ok(kinetic.add(&g))
}

/// Action, constraint functional and companions of one field.
#[derive(Clone, Copy, Debug)]
pub struct FunctionalReport {
    /// Action `S = E + omega ||u||^2`.
    pub s: f64,
    /// Nehari functional: as `S` but with nonlinear coefficient `beta`
    /// instead of `2 beta / (p + 1)`; vanishes on critical points.
    pub k: f64,
    /// Energy: `S` without the `omega` term.
    pub e: f64,
    /// Rotation energy `-Omega Re <L_z u, u>`.
    pub l_omega: f64,
    pub norm_l2: f64,
    pub norm_h1: f64,
    /// `L^{p+1}` norm.
    pub norm_lp1: f64,
}

/// Evaluates the action and its companion quantities in one pass.
pub fn functionals(u: &Field, prob: &Problem) -> Result<FunctionalReport, Error> {
    prob.check_field(u)?;
    let grid = prob.grid();
    let hq = grid.quad_weight();
    let p = prob.params.p;

    let s_hat = forward_transform(u);
    let mut grad_sq = 0.0;
    for (c, &l) in s_hat.coeffs().iter().zip(grid.lambda()) {
        grad_sq += c.norm_sqr() * l;
    }
    grad_sq *= grid.parseval_weight();

    let mut l2_sq = 0.0;
    let mut pot = 0.0;
    let mut lp1 = 0.0;
    for (&uj, &v) in u.values().iter().zip(&prob.potential) {
        let nsq = uj.norm_sqr();
        l2_sq += nsq;
        pot += v * nsq;
        lp1 += amp_pow(nsq, p + 1.0);
    }
    l2_sq *= hq;
    pot *= hq;
    lp1 *= hq;

    let l_omega = if prob.params.rotation != 0.0 {
        let lz = apply_lz(u);
        let mut pair = 0.0;
        for (&l, &uj) in lz.values().iter().zip(u.values()) {
            pair += (l * uj.conj()).re;
        }
        -prob.params.rotation * pair * hq
    } else {
        0.0
    };

    let beta = prob.params.beta;
    let e = 0.5 * grad_sq + pot + 2.0 * beta / (p + 1.0) * lp1 + l_omega;
    let s = e + prob.params.omega * l2_sq;
    let k = s + beta * (1.0 - 2.0 / (p + 1.0)) * lp1;
    Ok(FunctionalReport {
        s,
        k,
        e,
        l_omega,
        norm_l2: l2_sq.max(0.0).sqrt(),
        norm_h1: (l2_sq + grad_sq).max(0.0).sqrt(),
        norm_lp1: if lp1 > 0.0 {
            lp1.powf(1.0 / (p + 1.0))
        } else {
            0.0
        },
    })
}

/// Dual Sobolev norm `||f||_{H^-1} = sqrt(sum_k w |c_k|^2 / (1 + lambda_k))`,
/// the sup of `<f, psi> / ||psi||_{H1}` over the discrete space.
pub fn h_minus1_norm(f: &Field) -> f64 {
    let s = forward_transform(f);
    let mut total = 0.0;
    for (c, &l) in s.coeffs().iter().zip(f.grid().lambda()) {
        total += c.norm_sqr() / (1.0 + l);
    }
    (total * f.grid().parseval_weight()).max(0.0).sqrt()
}

/// First variation `DS(u)[eta] = 2 <H_u u, eta>` with the real pairing.
pub fn first_variation(u: &Field, eta: &Field, prob: &Problem) -> Result<f64, Error> {
    prob.check_field(u)?;
    prob.check_field(eta)?;
    let h = apply_hamiltonian(u, prob)?;
    let mut pair = 0.0;
    for (&hj, &ej) in h.values().iter().zip(eta.values()) {
        pair += (hj * ej.conj()).re;
    }
    Ok(2.0 * pair * prob.grid().quad_weight())
}

/// Second variation
/// `D2S(u)[eta, eta] = 2 <L1 eta, eta>
///  + 2 <beta ((p-1)/2 |u|^{p-3} u^2 conj(eta) + (p+1)/2 |u|^{p-1} eta), eta>`
/// with `L1 = -1/2 Delta + V - Omega L_z + omega` and `|u|^{p-3} u^2 := 0`
/// where `u = 0`.
pub fn second_variation(u: &Field, eta: &Field, prob: &Problem) -> Result<f64, Error> {
    prob.check_field(u)?;
    prob.check_field(eta)?;
    let grid = prob.grid();
    let hq = grid.quad_weight();
    let p = prob.params.p;
    let beta = prob.params.beta;

    let eta_hat = forward_transform(eta);
    let mut kin = 0.0;
    for (c, &l) in eta_hat.coeffs().iter().zip(grid.lambda()) {
        kin += c.norm_sqr() * 0.5 * l;
    }
    kin *= grid.parseval_weight();

    let mut pointwise = 0.0;
    for ((&ej, &uj), &v) in eta.values().iter().zip(u.values()).zip(&prob.potential) {
        let nsq = uj.norm_sqr();
        // |u|^{p-3} u^2 = |u|^{p-1} (u / |u|)^2, zero at u = 0.
        let cross = if nsq == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            uj * uj * amp_pow(nsq, p - 3.0)
        };
        let linear = (v + prob.params.omega) * ej.norm_sqr();
        let nl = beta
            * (0.5 * (p - 1.0) * (cross * ej.conj() * ej.conj()).re
                + 0.5 * (p + 1.0) * amp_pow(nsq, p - 1.0) * ej.norm_sqr());
        pointwise += linear + nl;
    }
    pointwise *= hq;

    let rot = if prob.params.rotation != 0.0 {
        let lz = apply_lz(eta);
        let mut pair = 0.0;
        for (&l, &ej) in lz.values().iter().zip(eta.values()) {
            pair += (l * ej.conj()).re;
        }
        -prob.params.rotation * pair * hq
    } else {
        0.0
    };

    Ok(2.0 * (kin + pointwise + rot))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{inner_products, GridSpec};
    use crate::model::Potential;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const PI: f64 = std::f64::consts::PI;

    fn params_1d(beta: f64, p: f64, omega: f64) -> ModelParams {
        ModelParams::new(1, p, beta, 0.0, omega, Potential::Zero).unwrap()
    }

    fn harmonic_2d(rotation: f64, omega: f64, beta: f64) -> ModelParams {
        ModelParams::new(
            2,
            3.0,
            beta,
            rotation,
            omega,
            Potential::Harmonic {
                gammas: vec![1.0, 1.0],
            },
        )
        .unwrap()
    }

    fn random_field(grid: &Arc<Grid>, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.n_points())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Field::new(grid.clone(), values).unwrap()
    }

    /// Smooth random field: a handful of low modes with decaying weights,
    /// so finite-difference quotients of the action behave well.
    fn random_smooth_field(grid: &Arc<Grid>, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.n_points()];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let decay = (-(k as f64) * 0.4).exp();
            if decay > 1e-8 {
                *c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * decay;
            }
        }
        crate::grid::inverse_transform(
            &crate::grid::SpectralField::new(grid.clone(), coeffs).unwrap(),
        )
    }

    #[test]
    fn functionals_of_unit_sine_mode() {
        // V = 0, beta = 1, p = 3, omega = -10, u = sin(pi x) on [0, 1]:
        // S = pi^2/4 - 5 + 3/16 exactly (int sin^2 = 1/2, int sin^4 = 3/8).
        let grid = Grid::build(GridSpec::sine_1d(0.0, 1.0, 128)).unwrap();
        let prob = Problem::new(params_1d(1.0, 3.0, -10.0), grid.clone()).unwrap();
        let u = Field::from_fn(&grid, |x| Complex64::new((PI * x[0]).sin(), 0.0));
        let rep = functionals(&u, &prob).unwrap();
        let expect_s = PI * PI / 4.0 - 5.0 + 3.0 / 16.0;
        assert!((rep.s - expect_s).abs() < 1e-12, "S = {}, want {expect_s}", rep.s);
        // K replaces 2 beta/(p+1) = 1/2 by beta = 1: K = S + 3/16.
        assert!((rep.k - (expect_s + 3.0 / 16.0)).abs() < 1e-12);
        // S = E + omega ||u||^2.
        assert!((rep.s - (rep.e + -10.0 * rep.norm_l2.powi(2))).abs() < 1e-12);
        assert!((rep.norm_l2.powi(2) - 0.5).abs() < 1e-13);
        assert!((rep.norm_lp1.powi(4) - 3.0 / 8.0).abs() < 1e-13);
        assert!(rep.l_omega == 0.0);
    }

    #[test]
    fn nehari_action_difference_identity() {
        let grid = Grid::build(GridSpec::sine_1d(0.0, 1.0, 32)).unwrap();
        let p = 2.4;
        let beta = 3.7;
        let prob = Problem::new(params_1d(beta, p, -12.0), grid.clone()).unwrap();
        let u = random_smooth_field(&grid, 7);
        let rep = functionals(&u, &prob).unwrap();
        let expect = beta * (1.0 - 2.0 / (p + 1.0)) * rep.norm_lp1.powf(p + 1.0);
        assert!(
            ((rep.k - rep.s) - expect).abs() < 1e-12 * expect.abs().max(1.0),
            "K - S = {}, want {expect}",
            rep.k - rep.s
        );
    }

    #[test]
    fn functionals_are_gauge_invariant() {
        let grid = Grid::build(GridSpec::fourier_2d((-8.0, -8.0), (8.0, 8.0), (32, 32))).unwrap();
        let prob = Problem::new(harmonic_2d(0.5, -10.0, 100.0), grid.clone()).unwrap();
        let u = random_smooth_field(&grid, 11);
        let rot = u.scale(Complex64::from_polar(1.0, 1.234));
        let a = functionals(&u, &prob).unwrap();
        let b = functionals(&rot, &prob).unwrap();
        for (x, y) in [(a.s, b.s), (a.k, b.k), (a.e, b.e), (a.l_omega, b.l_omega)] {
            assert!((x - y).abs() < 1e-12 * x.abs().max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn lz_eigenfunctions() {
        // L_z (x1 + i x2)^m exp(-|x|^2/2) = m (x1 + i x2)^m exp(-|x|^2/2).
        let grid = Grid::build(GridSpec::fourier_2d(
            (-10.0, -10.0),
            (10.0, 10.0),
            (160, 160),
        ))
        .unwrap();
        for m in [1u32, 4] {
            let f = Field::from_fn(&grid, |x| {
                let z = Complex64::new(x[0], x[1]);
                z.powu(m) * (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp()
            });
            let lz = apply_lz(&f);
            let err = lz
                .values()
                .iter()
                .zip(f.values())
                .map(|(a, b)| (a - b * m as f64).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-8, "m = {m}: max error {err}");
        }
    }

    #[test]
    fn lz_is_hermitian_on_the_periodic_grid() {
        let grid = Grid::build(GridSpec::fourier_2d((-4.0, -4.0), (4.0, 4.0), (24, 24))).unwrap();
        let u = random_field(&grid, 21);
        let v = random_field(&grid, 22);
        let lu = apply_lz(&u);
        let lv = apply_lz(&v);
        let a = inner_products(&lu, &v).unwrap().complex_l2;
        let b = inner_products(&u, &lv).unwrap().complex_l2;
        assert!((a - b).norm() < 1e-12, "<Lu,v> = {a}, <u,Lv> = {b}");
        let diag = inner_products(&lu, &u).unwrap().complex_l2;
        assert!(diag.im.abs() < 1e-12, "<Lu,u> imag = {}", diag.im);
    }

    #[test]
    fn lz_vanishes_in_1d() {
        let grid = Grid::build(GridSpec::sine_1d(0.0, 1.0, 16)).unwrap();
        let f = random_field(&grid, 30);
        assert!(apply_lz(&f).max_abs() == 0.0);
    }

    #[test]
    fn h_minus1_of_single_modes() {
        let grid = Grid::build(GridSpec::sine_1d(0.0, 1.0, 64)).unwrap();
        for k in [1usize, 3, 10] {
            let f = Field::from_fn(&grid, |x| Complex64::new((k as f64 * PI * x[0]).sin(), 0.0));
            let lambda = (k as f64 * PI).powi(2);
            let expect = (0.5 / (1.0 + lambda)).sqrt();
            let got = h_minus1_norm(&f);
            assert!(
                (got - expect).abs() < 1e-12,
                "mode {k}: {got} vs {expect}"
            );
        }
    }

    /// Duality oracle for the dual norm. All trial ratios must stay below
    /// the reported value; a near-optimal trial built through the O(N^2)
    /// direct transforms must reach it from below.
    #[test]
    fn h_minus1_duality_sampling() {
        let n = 16usize;
        let grid = Grid::build(GridSpec::sine_1d(0.0, 1.0, n)).unwrap();
        let f = random_field(&grid, 40);
        let norm = h_minus1_norm(&f);
        let hq = grid.quad_weight();

        let naive_coeffs = |vals: &[Complex64]| -> Vec<Complex64> {
            (1..n)
                .map(|k| {
                    let mut s = Complex64::new(0.0, 0.0);
                    for j in 1..n {
                        s += vals[j - 1] * (PI * (j * k) as f64 / n as f64).sin();
                    }
                    s * (2.0 / n as f64)
                })
                .collect()
        };
        let ratio = |psi: &Field| -> f64 {
            let mut pair = 0.0;
            for (&fj, &pj) in f.values().iter().zip(psi.values()) {
                pair += (fj * pj.conj()).re;
            }
            pair *= hq;
            // H1 norm of the trial through the naive coefficients.
            let c = naive_coeffs(psi.values());
            let mut h1 = 0.0;
            for (k, ck) in c.iter().enumerate() {
                let lambda = ((k + 1) as f64 * PI).powi(2);
                h1 += ck.norm_sqr() * (1.0 + lambda);
            }
            h1 *= 0.5; // Parseval weight L/2
            pair / h1.sqrt()
        };

        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut best: f64 = 0.0;
        for _ in 0..10_000 {
            let psi = Field::new(
                grid.clone(),
                (0..grid.n_points())
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect(),
            )
            .unwrap();
            let r = ratio(&psi);
            assert!(r <= norm * (1.0 + 1e-10), "trial ratio {r} above norm {norm}");
            best = best.max(r);
        }
        // Near-optimal trial psi* with naive coefficients c_k / (1 + lambda_k).
        let c = naive_coeffs(f.values());
        let psi_opt_vals: Vec<Complex64> = (1..n)
            .map(|j| {
                let mut s = Complex64::new(0.0, 0.0);
                for (k, ck) in c.iter().enumerate() {
                    let lambda = ((k + 1) as f64 * PI).powi(2);
                    s += ck / (1.0 + lambda) * (PI * (j * (k + 1)) as f64 / n as f64).sin();
                }
                s
            })
            .collect();
        let psi_opt = Field::new(grid.clone(), psi_opt_vals).unwrap();
        best = best.max(ratio(&psi_opt));
        assert!(
            best >= 0.95 * norm && best <= norm * (1.0 + 1e-10),
            "sampled sup {best} vs norm {norm}"
        );
    }

    #[test]
    fn first_variation_matches_central_differences() {
        let grid = Grid::build(GridSpec::sine_1d(0.0, 1.0, 32)).unwrap();
        for (p, seed) in [(3.0, 50u64), (2.5, 51)] {
            let prob = Problem::new(params_1d(1.0, p, -10.0), grid.clone()).unwrap();
            let u = random_smooth_field(&grid, seed);
            let eta = random_smooth_field(&grid, seed + 100);
            let dv = first_variation(&u, &eta, &prob).unwrap();
            let eps = 1e-5;
            let plus = functionals(&u.add(&eta.scale(eps.into())), &prob).unwrap().s;
            let minus = functionals(&u.sub(&eta.scale(eps.into())), &prob).unwrap().s;
            let fd = (plus - minus) / (2.0 * eps);
            assert!(
                (dv - fd).abs() < 1e-6 * dv.abs().max(1.0),
                "p = {p}: variation {dv} vs finite difference {fd}"
            );
        }
    }

    #[test]
    fn second_variation_matches_central_differences() {
        let grid = Grid::build(GridSpec::sine_1d(0.0, 1.0, 32)).unwrap();
        for (p, seed) in [(3.0, 60u64), (2.5, 61)] {
            let prob = Problem::new(params_1d(1.0, p, -10.0), grid.clone()).unwrap();
            let u = random_smooth_field(&grid, seed);
            let eta = random_smooth_field(&grid, seed + 100);
            let d2 = second_variation(&u, &eta, &prob).unwrap();
            let eps = 1e-4;
            let s0 = functionals(&u, &prob).unwrap().s;
            let plus = functionals(&u.add(&eta.scale(eps.into())), &prob).unwrap().s;
            let minus = functionals(&u.sub(&eta.scale(eps.into())), &prob).unwrap().s;
            let fd = (plus + minus - 2.0 * s0) / (eps * eps);
            assert!(
                (d2 - fd).abs() < 1e-4 * d2.abs().max(1.0),
                "p = {p}: second variation {d2} vs finite difference {fd}"
            );
        }
    }

    #[test]
    fn second_variation_vanishes_on_the_gauge_mode() {
        // At a critical point, eta = i u generates the phase orbit, so the
        // second variation degenerates there.
        let grid = Grid::build(GridSpec::sine_1d(0.0, 1.0, 128)).unwrap();
        let prob = Problem::new(params_1d(1.0, 3.0, -10.0), grid.clone()).unwrap();
        let gs = crate::elliptic1d::analytic_gs_1d(&grid, -10.0).unwrap();
        let gauge = gs.scale(Complex64::new(0.0, 1.0));
        let d2 = second_variation(&gs, &gauge, &prob).unwrap();
        assert!(d2.abs() < 1e-8, "gauge-mode second variation {d2}");
    }

    #[test]
    fn hamiltonian_residual_small_at_analytic_ground_state() {
        let grid = Grid::build(GridSpec::sine_1d(0.0, 1.0, 128)).unwrap();
        let prob = Problem::new(params_1d(1.0, 3.0, -10.0), grid.clone()).unwrap();
        let gs = crate::elliptic1d::analytic_gs_1d(&grid, -10.0).unwrap();
        let h = apply_hamiltonian(&gs, &prob).unwrap();
        assert!(h.max_abs() < 1e-10, "residual {}", h.max_abs());
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let g1 = Grid::build(GridSpec::sine_1d(0.0, 1.0, 16)).unwrap();
        let g2 = Grid::build(GridSpec::sine_1d(0.0, 1.0, 32)).unwrap();
        let prob = Problem::new(params_1d(1.0, 3.0, -10.0), g1).unwrap();
        let f = Field::zeros(&g2);
        assert!(apply_hamiltonian(&f, &prob).is_err());
        assert!(functionals(&f, &prob).is_err());
    }
}
