//! Stabilized backward-forward Euler gradient flow for the action.
//!
//! One step solves
//!
//! ```text
//! ((1 + tau a) I - tau/2 Delta) u_next = (1 + tau a) u - tau g(u),
//! g(u) = (V + omega + beta |u|^{p-1} - Omega L_z) u,
//! ```
//!
//! diagonally in the spectral basis; the divisor `1 + tau a + tau lambda/2`
//! never drops below one, so the solve is unconditionally well-posed. The
//! increment `mu = (u - u_next)/tau` satisfies the resolvent identity
//! `(1 + tau a) mu - tau/2 Delta mu = H_u u` exactly in the discrete space,
//! which is what makes the per-step action decay
//!
//! ```text
//! S(u) - S(u_next) >= 2 tau ||mu||_L2^2 + tau^2/4 ||mu||_H1^2
//! ```
//!
//! hold up to round-off for any tau > 0 once the stabilizer dominates the
//! frozen coefficients. The run loop re-verifies that inequality at every
//! step with a floating-point budget of `1e-10 max(1, |S|)`.
//!
//! The loop carries the iterate's synthesis coefficients as primary state
//! and forms the stopping residual as `1/2 lambda_k u_k + g_k` from those
//! same bits. A fresh value-space evaluation of `-1/2 Delta u` would inject
//! `eps ||u|| lambda_max / 2` of round-off (1e-11 at N = 128 scales) and
//! could never reach the 1e-13 stopping tolerance the 1D experiments use;
//! reusing the held coefficients cancels that amplification mode-wise at
//! the scheme's own fixed point.

use crate::error::Error;
use crate::grid::{forward_transform, inverse_transform, Field, SpectralField};
use crate::ops::{self, functionals, Problem};

/// Stabilizer selection per step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaMode {
    /// Constant stabilizer, mainly for decay stress tests.
    Fixed(f64),
    /// Recompute from the current iterate each step.
    Adaptive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopRule {
    /// Stop when `max_j |H_u u|` drops below `stop_residual_tol`.
    MaxResidual,
    /// Stop when `|S(u) - S(u_next)|` drops below `stop_action_tol`.
    ActionIncrement,
    /// Stop when both conditions hold.
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecayCheck {
    Off,
    /// Count violations of the decay inequality but keep iterating.
    Warn,
    /// Abort the run on the first violation.
    Strict,
}

#[derive(Clone, Debug)]
pub struct DgfConfig {
    pub tau: f64,
    pub alpha_mode: AlphaMode,
    pub stop_rule: StopRule,
    pub stop_residual_tol: f64,
    pub stop_action_tol: f64,
    pub max_iters: usize,
    /// Record every this many accepted states (state 0 and the final state
    /// are always recorded).
    pub record_stride: usize,
    pub decay_check: DecayCheck,
}

impl DgfConfig {
    /// Defaults: adaptive stabilizer, tolerances 1e-13 (residual) and 1e-12
    /// (action increment), at most 10^6 steps, stride 1 on grids up to 256
    /// points and 10 on larger ones, decay violations warned.
    pub fn new(tau: f64, stop_rule: StopRule, n_points: usize) -> DgfConfig {
        DgfConfig {
            tau,
            alpha_mode: AlphaMode::Adaptive,
            stop_rule,
            stop_residual_tol: 1e-13,
            stop_action_tol: 1e-12,
            max_iters: 1_000_000,
            record_stride: if n_points <= 256 { 1 } else { 10 },
            decay_check: DecayCheck::Warn,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidParams("time step must be positive".into()));
        }
        if let AlphaMode::Fixed(a) = self.alpha_mode {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(Error::InvalidParams(
                    "fixed stabilizer must be nonnegative".into(),
                ));
            }
        }
        if !(self.stop_residual_tol > 0.0) || !(self.stop_action_tol > 0.0) {
            return Err(Error::InvalidParams(
                "stopping tolerances must be positive".into(),
            ));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParams("max_iters must be at least 1".into()));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidParams(
                "record_stride must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Snapshot of one recorded state. For state `n >= 1` the step fields
/// (`alpha_n`, `mu_*`, `decay_slack`) describe the step that produced the
/// state; for state 0 they hold the stabilizer about to be used and zeros.
#[derive(Clone, Copy, Debug)]
pub struct IterationRecord {
    pub n: usize,
    pub s: f64,
    pub k: f64,
    pub alpha_n: f64,
    pub mu_l2: f64,
    pub mu_h1: f64,
    pub residual_max: f64,
    pub residual_hminus1: f64,
    pub phi_h1: f64,
    pub dist_to_ref: Option<f64>,
    /// `S(u) - S(u_next) - 2 tau ||mu||_L2^2 - tau^2/4 ||mu||_H1^2`;
    /// nonnegative up to round-off by the decay theorem.
    pub decay_slack: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    ResidualMet,
    ActionIncrementMet,
    MaxIters,
    DecayViolation,
}

#[derive(Debug)]
pub struct RunResult {
    pub final_field: Field,
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
    pub iterations_used: usize,
    /// Steps whose decay slack fell below the floating-point budget. Always
    /// zero under `Strict` (the run aborts on the first one).
    pub decay_violations: usize,
}

/// Adaptive stabilizer
/// `a = 1/2 max{0, max_j (V + omega + Omega^2/2 (x1^2+x2^2) + beta (p+2) |u|^{p-1})}`.
///
/// Panics if the field does not live on the problem's grid.
pub fn adaptive_alpha(u: &Field, prob: &Problem) -> f64 {
    assert!(
        u.grid().spec() == prob.grid().spec(),
        "adaptive_alpha on mismatched grids"
    );
    let params = prob.params();
    let p = params.p;
    let beta = params.beta;
    let omega = params.omega;
    let rot_sq_half = 0.5 * params.rotation * params.rotation;
    let mut worst = f64::NEG_INFINITY;
    for (j, (&uj, &v)) in u.values().iter().zip(prob.potential()).enumerate() {
        let nsq = uj.norm_sqr();
        let amp = if nsq == 0.0 {
            0.0
        } else {
            nsq.powf(0.5 * (p - 1.0))
        };
        let rot = if rot_sq_half > 0.0 {
            rot_sq_half * prob.radius_sq()[j]
        } else {
            0.0
        };
        worst = worst.max(v + omega + rot + beta * (p + 2.0) * amp);
    }
    0.5 * worst.max(0.0)
}

/// One stabilized step. Returns the new iterate and `mu = (u - u_next)/tau`.
pub fn dgf_step(u: &Field, tau: f64, alpha: f64, prob: &Problem) -> Result<(Field, Field), Error> {
    prob.check_field(u)?;
    let g = ops::frozen_coefficient_term(u, prob);
    let shift = 1.0 + tau * alpha;
    let rhs = u.zip_map(&g, |uj, gj| shift * uj - tau * gj);
    let rhs_hat = forward_transform(&rhs);
    let u_next = inverse_transform(&rhs_hat.scaled_by(|l| 1.0 / (shift + 0.5 * tau * l)));
    let mu = u.zip_map(&u_next, |a, b| (a - b) / tau);
    Ok((u_next, mu))
}

/// `max_j |H_u u|`, the stopping residual of the 1D experiments.
pub fn residual_max(u: &Field, prob: &Problem) -> Result<f64, Error> {
    Ok(ops::apply_hamiltonian(u, prob)?.max_abs())
}

/// Residual of the state held as `(u_hat, g_hat)`: coefficients
/// `r_k = 1/2 lambda_k u_k + g_k`. Returns `(max_j |r(x_j)|, ||r||_{H^-1})`.
fn residual_from_coeffs(u_hat: &SpectralField, g_hat: &SpectralField) -> (f64, f64) {
    let grid = u_hat.grid();
    let mut coeffs = Vec::with_capacity(grid.n_points());
    let mut hm1 = 0.0;
    for ((&uk, &gk), &l) in u_hat
        .coeffs()
        .iter()
        .zip(g_hat.coeffs())
        .zip(grid.lambda())
    {
        let rk = 0.5 * l * uk + gk;
        hm1 += rk.norm_sqr() / (1.0 + l);
        coeffs.push(rk);
    }
    hm1 = (hm1 * grid.parseval_weight()).max(0.0).sqrt();
    let field = inverse_transform(
        &SpectralField::new(grid.clone(), coeffs).expect("residual coefficients sized to grid"),
    );
    (field.max_abs(), hm1)
}

/// Per-state bookkeeping carried between loop turns so any state can be
/// recorded after the fact (stride hits, termination, strict aborts).
#[derive(Clone, Copy)]
struct StepStats {
    alpha: f64,
    mu_l2: f64,
    mu_h1: f64,
    decay_slack: f64,
}

/// Runs the flow from `u0` until the stopping rule, the iteration budget, or
/// (under `Strict`) a decay violation ends it. When a violation aborts the
/// run, the last accepted state is returned, so every record satisfies the
/// decay inequality within budget.
pub fn run_dgf(
    u0: &Field,
    config: &DgfConfig,
    prob: &Problem,
    reference: Option<&Field>,
) -> Result<RunResult, Error> {
    config.validate()?;
    prob.check_field(u0)?;
    if u0.max_abs() == 0.0 {
        return Err(Error::InvalidInput("initial field is identically zero".into()));
    }
    if let Some(r) = reference {
        prob.check_field(r)?;
    }
    let tau = config.tau;
    let fp_budget = |s: f64| 1e-10 * s.abs().max(1.0);
    let grid = prob.grid().clone();
    let w = grid.parseval_weight();

    let mut u = u0.clone();
    let mut u_hat = forward_transform(&u);
    let mut g_hat = forward_transform(&ops::frozen_coefficient_term(&u, prob));
    let mut rep = functionals(&u, prob)?;
    let mut stats = StepStats {
        alpha: match config.alpha_mode {
            AlphaMode::Fixed(a) => a,
            AlphaMode::Adaptive => adaptive_alpha(&u, prob),
        },
        mu_l2: 0.0,
        mu_h1: 0.0,
        decay_slack: 0.0,
    };

    let mut records: Vec<IterationRecord> = Vec::new();
    let mut decay_violations = 0usize;

    let push_record = |records: &mut Vec<IterationRecord>,
                       n: usize,
                       u: &Field,
                       rep: &ops::FunctionalReport,
                       stats: &StepStats,
                       residuals: (f64, f64)|
     -> Result<(), Error> {
        let dist_to_ref = match reference {
            Some(r) => Some(crate::metrics::dist_h1(u, r)?),
            None => None,
        };
        records.push(IterationRecord {
            n,
            s: rep.s,
            k: rep.k,
            alpha_n: stats.alpha,
            mu_l2: stats.mu_l2,
            mu_h1: stats.mu_h1,
            residual_max: residuals.0,
            residual_hminus1: residuals.1,
            phi_h1: rep.norm_h1,
            dist_to_ref,
            decay_slack: stats.decay_slack,
        });
        Ok(())
    };

    let initial_res = residual_from_coeffs(&u_hat, &g_hat);
    push_record(&mut records, 0, &u, &rep, &stats, initial_res)?;
    let mut last_recorded = 0usize;

    let mut n = 0usize;
    loop {
        if n == config.max_iters {
            if last_recorded != n {
                let res = residual_from_coeffs(&u_hat, &g_hat);
                push_record(&mut records, n, &u, &rep, &stats, res)?;
            }
            return Ok(RunResult {
                final_field: u,
                records,
                termination: Termination::MaxIters,
                iterations_used: n,
                decay_violations,
            });
        }

        let alpha = match config.alpha_mode {
            AlphaMode::Fixed(a) => a,
            AlphaMode::Adaptive => adaptive_alpha(&u, prob),
        };

        // Diagonal solve on the held coefficients.
        let shift = 1.0 + tau * alpha;
        let u_hat_next = u_hat.scaled_zip(&g_hat, |uk, gk, l| {
            (shift * uk - tau * gk) / (shift + 0.5 * tau * l)
        });
        let u_next = inverse_transform(&u_hat_next);
        if !u_next.is_finite() {
            return Err(Error::NumericalBlowup { iteration: n + 1 });
        }
        let rep_next = functionals(&u_next, prob)?;
        if !rep_next.s.is_finite() {
            return Err(Error::NumericalBlowup { iteration: n + 1 });
        }

        // mu = (u - u_next)/tau, measured through its coefficients.
        let mut mu_l2_sq = 0.0;
        let mut mu_h1_sq = 0.0;
        for ((&uk, &vk), &l) in u_hat
            .coeffs()
            .iter()
            .zip(u_hat_next.coeffs())
            .zip(grid.lambda())
        {
            let mk = (uk - vk) / tau;
            let nsq = mk.norm_sqr();
            mu_l2_sq += nsq;
            mu_h1_sq += (1.0 + l) * nsq;
        }
        mu_l2_sq *= w;
        mu_h1_sq *= w;
        let decay_slack = rep.s - rep_next.s - 2.0 * tau * mu_l2_sq - 0.25 * tau * tau * mu_h1_sq;
        let violated = config.decay_check != DecayCheck::Off && decay_slack < -fp_budget(rep.s);
        if violated {
            decay_violations += 1;
            if config.decay_check == DecayCheck::Strict {
                // Reject the violating step: report the last accepted state.
                if last_recorded != n {
                    let res = residual_from_coeffs(&u_hat, &g_hat);
                    push_record(&mut records, n, &u, &rep, &stats, res)?;
                }
                return Ok(RunResult {
                    final_field: u,
                    records,
                    termination: Termination::DecayViolation,
                    iterations_used: n,
                    decay_violations,
                });
            }
        }

        let action_increment = (rep.s - rep_next.s).abs();
        u = u_next;
        u_hat = u_hat_next;
        rep = rep_next;
        stats = StepStats {
            alpha,
            mu_l2: mu_l2_sq.max(0.0).sqrt(),
            mu_h1: mu_h1_sq.max(0.0).sqrt(),
            decay_slack,
        };
        n += 1;
        g_hat = forward_transform(&ops::frozen_coefficient_term(&u, prob));

        // The residual synthesis is only paid when a rule or record needs it.
        let due_stride = n % config.record_stride == 0 || n == config.max_iters;
        let need_residual =
            matches!(config.stop_rule, StopRule::MaxResidual | StopRule::Both) || due_stride;
        let residuals = if need_residual {
            Some(residual_from_coeffs(&u_hat, &g_hat))
        } else {
            None
        };
        let residual_ok = residuals.map(|(rm, _)| rm < config.stop_residual_tol);
        let action_ok = action_increment < config.stop_action_tol;
        let termination = match config.stop_rule {
            StopRule::MaxResidual if residual_ok == Some(true) => Some(Termination::ResidualMet),
            StopRule::ActionIncrement if action_ok => Some(Termination::ActionIncrementMet),
            StopRule::Both if residual_ok == Some(true) && action_ok => {
                Some(Termination::ResidualMet)
            }
            _ => None,
        };

        if termination.is_some() || due_stride {
            let res = match residuals {
                Some(pair) => pair,
                None => residual_from_coeffs(&u_hat, &g_hat),
            };
            push_record(&mut records, n, &u, &rep, &stats, res)?;
            last_recorded = n;
        }
        if let Some(t) = termination {
            return Ok(RunResult {
                final_field: u,
                records,
                termination: t,
                iterations_used: n,
                decay_violations,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, GridSpec};
    use crate::model::{ModelParams, Potential};
    use num_complex::Complex64;
    use std::sync::Arc;

    const PI: f64 = std::f64::consts::PI;

    fn problem_1d(beta: f64, omega: f64, n: usize) -> (Arc<Grid>, Problem) {
        let grid = Grid::build(GridSpec::sine_1d(0.0, 1.0, n)).unwrap();
        let params = ModelParams::new(1, 3.0, beta, 0.0, omega, Potential::Zero).unwrap();
        let prob = Problem::new(params, grid.clone()).unwrap();
        (grid, prob)
    }

    fn sine_mode(grid: &Arc<Grid>, k: usize, amplitude: f64) -> Field {
        Field::from_fn(grid, |x| {
            Complex64::new(amplitude * (k as f64 * PI * x[0]).sin(), 0.0)
        })
    }

    #[test]
    fn adaptive_alpha_examples() {
        // V = 0, omega = -10, p = 3, max|u| = 1: beta = 1 gives
        // 1/2 max{0, -10 + 5} = 0; beta = 100 gives 1/2 (-10 + 500) = 245.
        let (grid, prob) = problem_1d(1.0, -10.0, 128);
        let u = sine_mode(&grid, 1, 1.0);
        assert_eq!(adaptive_alpha(&u, &prob), 0.0);
        let (_, prob100) = problem_1d(100.0, -10.0, 128);
        assert!((adaptive_alpha(&u, &prob100) - 245.0).abs() < 1e-12);
        let zero = Field::zeros(&grid);
        assert_eq!(adaptive_alpha(&zero, &prob), 0.0);
    }

    #[test]
    fn near_linear_eigenfunction_is_a_fixed_point() {
        // At negligible amplitude the cubic term is below round-off, so
        // sin(pi x) with omega = -pi^2/2 is stationary to machine precision.
        let (grid, prob) = problem_1d(1.0, -PI * PI / 2.0, 64);
        let u = sine_mode(&grid, 1, 1e-8);
        assert!(residual_max(&u, &prob).unwrap() < 1e-12);
        let (u_next, mu) = dgf_step(&u, 0.1, 0.7, &prob).unwrap();
        assert!(mu.max_abs() < 1e-12);
        assert!(u_next.sub(&u).max_abs() < 1e-13);
    }

    #[test]
    fn zero_field_remains_zero() {
        let (grid, prob) = problem_1d(1.0, -10.0, 32);
        let (u_next, mu) = dgf_step(&Field::zeros(&grid), 0.5, 1.0, &prob).unwrap();
        assert_eq!(u_next.max_abs(), 0.0);
        assert_eq!(mu.max_abs(), 0.0);
    }

    #[test]
    fn single_mode_amplification_over_200_steps() {
        // At amplitude 1e-7 the nonlinear term perturbs the mode below the
        // 1e-10 relative target, so the iteration must track the diagonal
        // factor (1 + tau a - tau omega)/(1 + tau a + tau lambda/2).
        //
        // omega = -2 keeps every mode contracting (tau lambda_k / 2 >
        // -tau omega for all k), and the tracked mode k = 1 contracts the
        // slowest, so transform round-off seeded into other modes decays
        // relative to it instead of compounding.
        let (grid, prob) = problem_1d(1.0, -2.0, 16);
        let tau = 0.1;
        let alpha = 0.3;
        let lambda = PI * PI;
        let rho = (1.0 + tau * alpha + tau * 2.0) / (1.0 + tau * alpha + 0.5 * tau * lambda);
        let mut u = sine_mode(&grid, 1, 1e-7);
        let mut expect = 1e-7;
        for step in 0..200 {
            let (u_next, mu) = dgf_step(&u, tau, alpha, &prob).unwrap();
            let coeff = forward_transform(&u_next).coeffs()[0].re;
            expect *= rho;
            assert!(
                (coeff - expect).abs() < 1e-10 * expect.abs(),
                "step {step}: coefficient {coeff} vs {expect}"
            );
            let mu_coeff = forward_transform(&mu).coeffs()[0].re;
            let mu_expect = (expect / rho - expect) / tau;
            assert!((mu_coeff - mu_expect).abs() < 1e-10 * mu_expect.abs().max(1e-12));
            u = u_next;
        }
    }

    #[test]
    fn analytic_ground_state_stops_at_iteration_one() {
        let (grid, prob) = problem_1d(1.0, -10.0, 128);
        let gs = crate::elliptic1d::analytic_gs_1d(&grid, -10.0).unwrap();
        let (_, mu) = dgf_step(&gs, 0.1, adaptive_alpha(&gs, &prob), &prob).unwrap();
        assert!(mu.max_abs() < 1e-10, "increment at the oracle {}", mu.max_abs());
        // The sampled oracle carries ~1e-11 residual, so a 1e-9 tolerance
        // must be met by the very first step.
        let mut config = DgfConfig::new(0.1, StopRule::MaxResidual, grid.n_points());
        config.stop_residual_tol = 1e-9;
        let run = run_dgf(&gs, &config, &prob, None).unwrap();
        assert_eq!(run.termination, Termination::ResidualMet);
        assert_eq!(run.iterations_used, 1);
    }

    #[test]
    fn decay_inequality_and_h1_bound_along_a_run() {
        let (grid, prob) = problem_1d(1.0, -15.0, 64);
        let u0 = sine_mode(&grid, 1, 1.0);
        let mut config = DgfConfig::new(1.0, StopRule::MaxResidual, grid.n_points());
        config.decay_check = DecayCheck::Strict;
        let run = run_dgf(&u0, &config, &prob, None).unwrap();
        assert_eq!(run.termination, Termination::ResidualMet);
        assert_eq!(run.decay_violations, 0);
        let h1_cap = 10.0 * crate::grid::norm_h1(&u0).max(1.0);
        let mut prev_s = f64::INFINITY;
        for rec in &run.records {
            assert!(rec.decay_slack >= -1e-10 * rec.s.abs().max(1.0), "n = {}", rec.n);
            assert!(rec.s <= prev_s + 1e-10 * rec.s.abs().max(1.0));
            assert!(rec.mu_h1 >= rec.mu_l2);
            assert!(rec.phi_h1 <= h1_cap);
            prev_s = rec.s;
        }
        assert!(run.records.last().unwrap().residual_max < 1e-13);
    }

    #[test]
    fn unstabilized_stiff_step_violates_decay_under_strict() {
        // With alpha pinned at zero and a stiff nonlinearity, the explicit
        // part overshoots and the action rises; Strict must abort on it.
        let (grid, prob) = problem_1d(100.0, -10.0, 32);
        let u0 = sine_mode(&grid, 1, 2.0);
        let mut config = DgfConfig::new(1.0, StopRule::MaxResidual, grid.n_points());
        config.alpha_mode = AlphaMode::Fixed(0.0);
        config.decay_check = DecayCheck::Strict;
        let run = run_dgf(&u0, &config, &prob, None).unwrap();
        assert_eq!(run.termination, Termination::DecayViolation);
        assert_eq!(run.decay_violations, 1);
        // The returned state is the last accepted one, here the start.
        assert_eq!(run.iterations_used, 0);
        assert!(run.final_field.sub(&u0).max_abs() == 0.0);
    }

    #[test]
    fn divergent_unchecked_run_reports_blowup_iteration() {
        let (grid, prob) = problem_1d(100.0, -10.0, 32);
        let u0 = sine_mode(&grid, 1, 10.0);
        let mut config = DgfConfig::new(1.0, StopRule::MaxResidual, grid.n_points());
        config.alpha_mode = AlphaMode::Fixed(0.0);
        config.decay_check = DecayCheck::Off;
        config.max_iters = 50;
        match run_dgf(&u0, &config, &prob, None) {
            Err(Error::NumericalBlowup { iteration }) => {
                assert!(iteration >= 1 && iteration <= 50, "iteration {iteration}")
            }
            other => panic!("expected blowup, got {other:?}"),
        }
    }

    #[test]
    fn zero_initial_field_is_rejected() {
        let (grid, prob) = problem_1d(1.0, -10.0, 32);
        let config = DgfConfig::new(0.1, StopRule::MaxResidual, grid.n_points());
        match run_dgf(&Field::zeros(&grid), &config, &prob, None) {
            Err(Error::InvalidInput(_)) => {}
            other => panic!("expected InvalidInput, got {other:?}"),
        }
    }

    #[test]
    fn records_follow_the_stride_and_max_iters() {
        let (grid, prob) = problem_1d(1.0, -10.0, 32);
        let u0 = sine_mode(&grid, 1, 1.0);
        let mut config = DgfConfig::new(0.1, StopRule::MaxResidual, grid.n_points());
        config.stop_residual_tol = 1e-300; // unreachable, force MaxIters
        config.max_iters = 12;
        config.record_stride = 5;
        let run = run_dgf(&u0, &config, &prob, None).unwrap();
        assert_eq!(run.termination, Termination::MaxIters);
        assert_eq!(run.iterations_used, 12);
        let indices: Vec<usize> = run.records.iter().map(|r| r.n).collect();
        assert_eq!(indices, vec![0, 5, 10, 12]);
    }

    #[test]
    fn reference_distances_are_recorded_and_shrink() {
        let (grid, prob) = problem_1d(1.0, -10.0, 128);
        let gs = crate::elliptic1d::analytic_gs_1d(&grid, -10.0).unwrap();
        let u0 = sine_mode(&grid, 1, 1.0);
        let mut config = DgfConfig::new(0.1, StopRule::MaxResidual, grid.n_points());
        config.record_stride = 50;
        let run = run_dgf(&u0, &config, &prob, Some(&gs)).unwrap();
        let dists: Vec<f64> = run
            .records
            .iter()
            .map(|r| r.dist_to_ref.expect("reference distance recorded"))
            .collect();
        assert!(dists.first().unwrap() > dists.last().unwrap());
        assert!(dists.last().unwrap() < &1e-6);
    }
}
