//! Closed-form 1d ground states through Jacobi elliptic functions.
//!
//! On a Dirichlet interval of length `L` with `V = 0`, `beta = 1`, `p = 3`
//! and `omega < -pi^2 / (2 L^2)`, the action ground state is (up to phase)
//!
//! ```text
//! phi_g(x) = (2 k K(k) / L) sn(2 K(k) (x - a) / L, k)
//! ```
//!
//! where the modulus `k` solves `2 (1 + k^2) K(k)^2 + omega L^2 = 0`.
//!
//! Convention: every function here takes the MODULUS `k`, not the parameter
//! `m = k^2`. `K(0) = pi/2`, and `K` grows monotonically towards the
//! logarithmic singularity at `k = 1`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Error;
use crate::grid::{Boundary, Field, Grid};

const MAX_AGM_ITER: usize = 40;

/// Complete elliptic integral of the first kind `K(k)` by the
/// arithmetic-geometric mean, accurate to a few ulps for `0 <= k < 1`.
pub fn agm_k(k: f64) -> Result<f64, Error> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::DomainError(format!(
            "agm_k requires 0 <= k < 1, got {k}"
        )));
    }
    let mut a = 1.0f64;
    // (1 - k)(1 + k) avoids cancellation in 1 - k^2 near k = 1.
    let mut b = ((1.0 - k) * (1.0 + k)).sqrt();
    for _ in 0..MAX_AGM_ITER {
        if (a - b).abs() <= 2.0 * f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(std::f64::consts::PI / (2.0 * a))
}

/// `sn`, `cn`, `dn` at real argument `u` via the descending Landen (AGM)
/// recursion. Private workhorse behind [`jacobi_sn`].
fn sn_cn_dn(u: f64, k: f64) -> (f64, f64, f64) {
    if k == 0.0 {
        return (u.sin(), u.cos(), 1.0);
    }
    let mut a = vec![1.0f64];
    let mut c = vec![k];
    let mut b = ((1.0 - k) * (1.0 + k)).sqrt();
    while *c.last().unwrap() > f64::EPSILON && a.len() < MAX_AGM_ITER {
        let a_prev = *a.last().unwrap();
        a.push(0.5 * (a_prev + b));
        c.push(0.5 * (a_prev - b));
        b = (a_prev * b).sqrt();
    }
    let n = a.len() - 1;
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for i in (1..=n).rev() {
        let arg = (c[i] / a[i] * phi.sin()).clamp(-1.0, 1.0);
        phi = 0.5 * (phi + arg.asin());
    }
    let sn = phi.sin();
    let cn = phi.cos();
    let dn = (1.0 - (k * sn) * (k * sn)).max(0.0).sqrt();
    (sn, cn, dn)
}

/// Jacobi elliptic `sn(u, k)` for real `u` and modulus `0 <= k < 1`.
pub fn jacobi_sn(u: f64, k: f64) -> Result<f64, Error> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::DomainError(format!(
            "jacobi_sn requires 0 <= k < 1, got modulus {k}"
        )));
    }
    if !u.is_finite() {
        return Err(Error::DomainError(format!(
            "jacobi_sn requires finite argument, got {u}"
        )));
    }
    Ok(sn_cn_dn(u, k).0)
}

/// Parameters of the closed-form 1d ground state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipticGS1D {
    pub omega: f64,
    pub length: f64,
    /// Modulus solving `2 (1 + k^2) K(k)^2 + omega L^2 = 0`.
    pub modulus: f64,
    /// `K(modulus)`.
    pub k_complete: f64,
}

impl EllipticGS1D {
    /// Peak amplitude `2 k K / L`, attained at the midpoint.
    pub fn amplitude(&self) -> f64 {
        2.0 * self.modulus * self.k_complete / self.length
    }

    /// Residual of the modulus equation; at a solution, `< 1e-12`.
    pub fn modulus_equation_residual(&self) -> f64 {
        modulus_equation(self.modulus, self.k_complete, self.omega, self.length)
    }
}

fn modulus_equation(k: f64, kk: f64, omega: f64, length: f64) -> f64 {
    2.0 * (1.0 + k * k) * kk * kk + omega * length * length
}

/// Solves the modulus equation by bisection. `F(k) = 2 (1 + k^2) K(k)^2 +
/// omega L^2` is strictly increasing, so the root is unique when it exists:
/// `omega < -pi^2 / (2 L^2)` is required, and roots indistinguishable from
/// `k = 1` are refused.
pub fn solve_modulus(omega: f64, length: f64) -> Result<EllipticGS1D, Error> {
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::DomainError(format!(
            "solve_modulus requires a positive length, got {length}"
        )));
    }
    if !omega.is_finite() {
        return Err(Error::DomainError(format!(
            "solve_modulus requires finite omega, got {omega}"
        )));
    }
    let pi = std::f64::consts::PI;
    // F(0) = pi^2/2 + omega L^2 must be negative for a root to exist.
    if omega * length * length + pi * pi / 2.0 >= 0.0 {
        return Err(Error::NoSolution { omega, length });
    }
    let eval = |k: f64| -> f64 {
        let kk = agm_k(k).expect("bisection keeps k inside [0, 1)");
        modulus_equation(k, kk, omega, length)
    };
    let k_max = 1.0 - 1e-12;
    let mut lo = 0.0f64;
    let mut hi = k_max;
    if eval(hi) < 0.0 {
        return Err(Error::ModulusNearOne { lo: k_max, hi: 1.0 });
    }
    let mut best = 0.5 * (lo + hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f = eval(mid);
        best = mid;
        if f.abs() < 1e-12 {
            break;
        }
        if f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let kk = agm_k(best)?;
    let gs = EllipticGS1D {
        omega,
        length,
        modulus: best,
        k_complete: kk,
    };
    if gs.modulus_equation_residual().abs() >= 1e-12 {
        return Err(Error::DomainError(format!(
            "modulus bisection stalled at k = {best} with residual {}",
            gs.modulus_equation_residual()
        )));
    }
    Ok(gs)
}

/// Samples the closed-form ground state on a 1d Dirichlet sine grid.
pub fn analytic_gs_1d(grid: &Arc<Grid>, omega: f64) -> Result<Field, Error> {
    let spec = grid.spec();
    if spec.boundary != Boundary::DirichletSine || spec.dimension() != 1 {
        return Err(Error::InvalidField(
            "the analytic ground state needs a 1d Dirichlet sine grid".into(),
        ));
    }
    let a = spec.axes[0].a;
    let l = spec.axes[0].length();
    let gs = solve_modulus(omega, l)?;
    let amp = gs.amplitude();
    let scale = 2.0 * gs.k_complete / l;
    let modulus = gs.modulus;
    let mut values = Vec::with_capacity(grid.n_points());
    for &x in grid.axis_coords(0) {
        let sn = jacobi_sn(scale * (x - a), modulus)?;
        values.push(Complex64::new(amp * sn, 0.0));
    }
    Field::new(grid.clone(), values)
}
