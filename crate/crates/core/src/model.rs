//! Model parameters, trap potentials, initial data and admissibility.
//!
//! The continuous model is the defocusing rotating nonlinear Schrodinger
//! action with exponent `p`, coupling `beta > 0`, rotation speed `Omega`
//! (2d only) and chemical potential `omega`. Rotation requires a harmonic
//! trap `V(x) = (1/2) sum_i (gamma_i x_i)^2` stiffer than the rotation,
//! `|Omega| < min gamma_i`; otherwise the quadratic part is unbounded from
//! below. `omega` must sit below `-lambda0`, the negated ground level of
//! `-1/2 Delta + V - Omega L_z`, for a nontrivial ground state to exist.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Error;
use crate::grid::{Boundary, Field, Grid};
use crate::metrics;

/// Trap potential.
#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    Zero,
    /// `V(x) = (1/2) sum_i (gamma_i x_i)^2` with one `gamma_i > 0` per axis.
    Harmonic { gammas: Vec<f64> },
}

/// Validated model parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub dimension: usize,
    /// Nonlinearity exponent, `p > 1`.
    pub p: f64,
    /// Defocusing coupling, `beta > 0`.
    pub beta: f64,
    /// Rotation speed `Omega`; zero in 1d.
    pub rotation: f64,
    /// Chemical potential `omega`.
    pub omega: f64,
    pub potential: Potential,
}

impl ModelParams {
    pub fn new(
        dimension: usize,
        p: f64,
        beta: f64,
        rotation: f64,
        omega: f64,
        potential: Potential,
    ) -> Result<ModelParams, Error> {
        if dimension == 0 || dimension > 2 {
            return Err(Error::InvalidParams(format!(
                "dimension must be 1 or 2, got {dimension}"
            )));
        }
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidParams(format!("p must exceed 1, got {p}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParams(format!(
                "beta must be positive (defocusing), got {beta}"
            )));
        }
        if !omega.is_finite() || !rotation.is_finite() {
            return Err(Error::InvalidParams(
                "omega and Omega must be finite".into(),
            ));
        }
        if dimension == 1 && rotation != 0.0 {
            return Err(Error::InvalidParams(
                "rotation is meaningless in 1d; set Omega = 0".into(),
            ));
        }
        match &potential {
            Potential::Zero => {
                if rotation != 0.0 {
                    return Err(Error::InvalidParams(
                        "rotation requires a harmonic trap".into(),
                    ));
                }
            }
            Potential::Harmonic { gammas } => {
                if gammas.len() != dimension {
                    return Err(Error::InvalidParams(format!(
                        "harmonic trap needs {dimension} gammas, got {}",
                        gammas.len()
                    )));
                }
                if gammas.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
                    return Err(Error::InvalidParams(
                        "harmonic trap frequencies must be positive".into(),
                    ));
                }
                let min_gamma = gammas.iter().cloned().fold(f64::INFINITY, f64::min);
                if rotation.abs() >= min_gamma {
                    return Err(Error::InvalidParams(format!(
                        "|Omega| = {} must stay below the weakest trap frequency {min_gamma}",
                        rotation.abs()
                    )));
                }
            }
        }
        Ok(ModelParams {
            dimension,
            p,
            beta,
            rotation,
            omega,
            potential,
        })
    }

    /// Trap frequencies; defined only for the harmonic potential.
    pub fn gammas(&self) -> Option<&[f64]> {
        match &self.potential {
            Potential::Zero => None,
            Potential::Harmonic { gammas } => Some(gammas),
        }
    }
}

/// The trap sampled on a grid; values are real and non-negative by
/// construction.
#[derive(Clone, Debug)]
pub struct PotentialField {
    field: Field,
}

impl PotentialField {
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Real values, aligned with the grid's flattened point order.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.field.values().iter().map(|c| c.re)
    }

    pub fn min(&self) -> f64 {
        self.field
            .values()
            .iter()
            .map(|c| c.re)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Samples the trap potential at the collocation points.
pub fn evaluate_potential(
    params: &ModelParams,
    grid: &Arc<Grid>,
) -> Result<PotentialField, Error> {
    if grid.dimension() != params.dimension {
        return Err(Error::InvalidParams(format!(
            "grid dimension {} does not match model dimension {}",
            grid.dimension(),
            params.dimension
        )));
    }
    let field = match &params.potential {
        Potential::Zero => Field::zeros(grid),
        Potential::Harmonic { gammas } => {
            let g = gammas.clone();
            Field::from_fn(grid, |x| {
                let v: f64 = x
                    .iter()
                    .zip(&g)
                    .map(|(&xi, &gi)| (gi * xi) * (gi * xi))
                    .sum::<f64>()
                    * 0.5;
                Complex64::new(v, 0.0)
            })
        }
    };
    Ok(PotentialField { field })
}

/// Built-in initial data families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialKind {
    /// `sin(pi (x - a) / L)` on a 1d grid.
    Sine1D,
    /// `(x1 + i x2)^m psi_a` with the normalized trap Gaussian `psi_a`;
    /// carries winding number `m` about the origin.
    VortexM(u32),
    /// `((x1 + i x2) + (x1 + i x2)^4) psi_a / 2`, mixing windings 1 and 4.
    VortexMix,
}

/// Normalized trap Gaussian `sqrt(g1 g2 / pi) exp(-(g1 x1^2 + g2 x2^2)/2)`.
fn trap_gaussian(gammas: &[f64], x: &[f64]) -> f64 {
    let norm = (gammas[0] * gammas[1] / std::f64::consts::PI).sqrt();
    norm * (-(gammas[0] * x[0] * x[0] + gammas[1] * x[1] * x[1]) / 2.0).exp()
}

/// Samples one of the built-in initial data families.
pub fn initial_data(
    kind: InitialKind,
    grid: &Arc<Grid>,
    params: &ModelParams,
) -> Result<Field, Error> {
    if grid.dimension() != params.dimension {
        return Err(Error::InvalidParams(
            "grid and model dimensions disagree".into(),
        ));
    }
    match kind {
        InitialKind::Sine1D => {
            if grid.dimension() != 1 {
                return Err(Error::InvalidParams("Sine1D initial data is 1d".into()));
            }
            let ax = &grid.spec().axes[0];
            let (a, l) = (ax.a, ax.length());
            Ok(Field::from_fn(grid, |x| {
                Complex64::new((std::f64::consts::PI * (x[0] - a) / l).sin(), 0.0)
            }))
        }
        InitialKind::VortexM(m) => {
            let gammas = vortex_gammas(grid, params)?;
            Ok(Field::from_fn(grid, |x| {
                let z = Complex64::new(x[0], x[1]);
                z.powu(m) * trap_gaussian(&gammas, x)
            }))
        }
        InitialKind::VortexMix => {
            let gammas = vortex_gammas(grid, params)?;
            Ok(Field::from_fn(grid, |x| {
                let z = Complex64::new(x[0], x[1]);
                (z + z.powu(4)) * 0.5 * trap_gaussian(&gammas, x)
            }))
        }
    }
}

fn vortex_gammas(grid: &Arc<Grid>, params: &ModelParams) -> Result<Vec<f64>, Error> {
    if grid.dimension() != 2 || grid.spec().boundary != Boundary::PeriodicFourier {
        return Err(Error::InvalidParams(
            "vortex initial data needs a 2d periodic grid".into(),
        ));
    }
    match params.gammas() {
        Some(g) => Ok(g.to_vec()),
        None => Err(Error::InvalidParams(
            "vortex initial data needs the harmonic trap frequencies".into(),
        )),
    }
}

/// Outcome of the admissibility check `omega < -lambda0`.
#[derive(Clone, Copy, Debug)]
pub struct Admissibility {
    pub lambda0_estimate: f64,
    /// `-lambda0 - omega`: positive when omega sits strictly below the
    /// negated ground level.
    pub gap: f64,
    /// `gap > margin` with the safety margin `1e-8`.
    pub admissible: bool,
}

/// Estimates the ground level of `-1/2 Delta + V - Omega L_z` on the given
/// grid and tests `omega < -lambda0` with a `1e-8` safety margin.
pub fn check_admissibility(
    params: &ModelParams,
    grid: &Arc<Grid>,
) -> Result<Admissibility, Error> {
    let lambda0 = metrics::estimate_lambda0(grid, params)?;
    let gap = -lambda0 - params.omega;
    Ok(Admissibility {
        lambda0_estimate: lambda0,
        gap,
        admissible: gap > 1e-8,
    })
}
