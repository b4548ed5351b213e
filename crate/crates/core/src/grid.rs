//! Collocation grids, spectral transforms and discrete inner products.
//!
//! Two grid families are supported:
//!
//! * `DirichletSine` (1d only): interior collocation points
//!   `x_j = a + j h`, `j = 1..N-1`, `h = L / N`, with the sine basis
//!   `sin(k pi (x - a) / L)`, `k = 1..N-1`. Eigenvalues of `-Delta` are
//!   `lambda_k = (k pi / L)^2`.
//! * `PeriodicFourier` (1d or 2d): points `x_j = a + j h`, `j = 0..N-1`,
//!   with modes `k = -N/2 .. N/2 - 1` stored in FFT order and
//!   `lambda_k = sum_i (2 pi k_i / L_i)^2`.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! * Coefficients are synthesis coefficients: `f_j = sum_k c_k basis_k(x_j)`
//!   with unit-amplitude basis functions.
//! * The discrete L2 pairing is the rectangle rule `h^d sum_j f_j conj(g_j)`.
//!   For two fields in the basis span this equals the exact integral of the
//!   interpolants, on both grid families.
//! * Derivative pairings are evaluated in coefficient space,
//!   `sum_k w lambda_k c_k conj(d_k)` with the Parseval weight `w`; this is
//!   again the exact integral for interpolants and keeps `<-Delta f, g> =
//!   <grad f, grad g>` an identity.
//! * The first-derivative symbol on a Fourier axis zeroes the unpaired
//!   Nyquist mode `k = -N/2`, so the gradient of a real field stays real.
//!   `lambda` keeps the full `(pi N / L)^2` value for that mode.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::Error;

/// Boundary treatment of a grid, which also selects the spectral basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Homogeneous Dirichlet box with the sine basis; 1d only.
    DirichletSine,
    /// Periodic torus with the Fourier basis; 1d or 2d.
    PeriodicFourier,
}

/// One axis of the computational box: the interval `[a, b]` split into `n`
/// cells of width `(b - a) / n`.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisSpec {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl AxisSpec {
    pub fn length(&self) -> f64 {
        self.b - self.a
    }
}

/// Value-level description of a grid; cheap to clone and compare.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub boundary: Boundary,
    pub axes: Vec<AxisSpec>,
}

impl GridSpec {
    /// 1d Dirichlet box on `[a, b]` with `n` cells.
    pub fn sine_1d(a: f64, b: f64, n: usize) -> Self {
        GridSpec {
            boundary: Boundary::DirichletSine,
            axes: vec![AxisSpec { a, b, n }],
        }
    }

    /// 1d periodic box on `[a, b)` with `n` points.
    pub fn fourier_1d(a: f64, b: f64, n: usize) -> Self {
        GridSpec {
            boundary: Boundary::PeriodicFourier,
            axes: vec![AxisSpec { a, b, n }],
        }
    }

    /// 2d periodic box `[a1, b1) x [a2, b2)` with `n1 x n2` points.
    pub fn fourier_2d(a: (f64, f64), b: (f64, f64), n: (usize, usize)) -> Self {
        GridSpec {
            boundary: Boundary::PeriodicFourier,
            axes: vec![
                AxisSpec { a: a.0, b: b.0, n: n.0 },
                AxisSpec { a: a.1, b: b.1, n: n.1 },
            ],
        }
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    /// Number of collocation points along one axis (`n - 1` interior points
    /// for the Dirichlet grid, `n` for the periodic one).
    pub fn axis_points(&self, axis: usize) -> usize {
        match self.boundary {
            Boundary::DirichletSine => self.axes[axis].n - 1,
            Boundary::PeriodicFourier => self.axes[axis].n,
        }
    }

    /// Total number of collocation points (equals the number of modes).
    pub fn n_points(&self) -> usize {
        (0..self.dimension()).map(|i| self.axis_points(i)).product()
    }

    fn validate(&self) -> Result<(), Error> {
        let d = self.dimension();
        if d == 0 || d > 2 {
            return Err(Error::InvalidField(format!(
                "unsupported dimension {d}; only 1 and 2 are implemented"
            )));
        }
        if d == 2 && self.boundary == Boundary::DirichletSine {
            return Err(Error::InvalidField(
                "the Dirichlet sine grid is 1d only; use PeriodicFourier in 2d".into(),
            ));
        }
        for (i, ax) in self.axes.iter().enumerate() {
            if !(ax.a.is_finite() && ax.b.is_finite()) || ax.b <= ax.a {
                return Err(Error::InvalidField(format!(
                    "axis {i}: endpoints must be finite with b > a (got [{}, {}])",
                    ax.a, ax.b
                )));
            }
            if ax.n < 4 || ax.n % 2 != 0 {
                return Err(Error::InvalidField(format!(
                    "axis {i}: n must be even and at least 4 (got {})",
                    ax.n
                )));
            }
        }
        Ok(())
    }
}

enum Plans {
    /// One forward FFT of length `2N`; both sine transform directions and
    /// the cosine evaluation reduce to it via odd/even extensions.
    Sine { fft2n: Arc<dyn Fft<f64>> },
    /// Per-axis forward and inverse FFT plans.
    Fourier {
        fwd: Vec<Arc<dyn Fft<f64>>>,
        inv: Vec<Arc<dyn Fft<f64>>>,
    },
}

/// A built grid: the spec plus collocation coordinates, the `-Delta`
/// eigenvalue table, derivative symbols and FFT plans. Construct with
/// [`Grid::build`] and share via `Arc`.
pub struct Grid {
    spec: GridSpec,
    coords: Vec<Vec<f64>>,
    lambda: Vec<f64>,
    /// First-derivative symbol per axis and per mode index (Fourier only;
    /// Nyquist entry is zero).
    kappa: Vec<Vec<f64>>,
    quad_weight: f64,
    parseval_weight: f64,
    plans: Plans,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("spec", &self.spec).finish()
    }
}

impl Grid {
    pub fn build(spec: GridSpec) -> Result<Arc<Grid>, Error> {
        spec.validate()?;
        let d = spec.dimension();
        let mut planner = FftPlanner::<f64>::new();

        let mut coords = Vec::with_capacity(d);
        for (i, ax) in spec.axes.iter().enumerate() {
            let h = ax.length() / ax.n as f64;
            let pts = spec.axis_points(i);
            let first = match spec.boundary {
                Boundary::DirichletSine => 1,
                Boundary::PeriodicFourier => 0,
            };
            coords.push((0..pts).map(|j| ax.a + (first + j) as f64 * h).collect());
        }

        let quad_weight: f64 = spec
            .axes
            .iter()
            .map(|ax| ax.length() / ax.n as f64)
            .product();

        let (lambda, kappa, parseval_weight, plans) = match spec.boundary {
            Boundary::DirichletSine => {
                let ax = &spec.axes[0];
                let l = ax.length();
                let lambda = (1..ax.n)
                    .map(|k| {
                        let kl = k as f64 * std::f64::consts::PI / l;
                        kl * kl
                    })
                    .collect();
                let fft2n = planner.plan_fft_forward(2 * ax.n);
                (lambda, Vec::new(), l / 2.0, Plans::Sine { fft2n })
            }
            Boundary::PeriodicFourier => {
                let mut kappa = Vec::with_capacity(d);
                for ax in &spec.axes {
                    let l = ax.length();
                    let sym: Vec<f64> = (0..ax.n)
                        .map(|idx| {
                            if idx == ax.n / 2 {
                                0.0
                            } else {
                                2.0 * std::f64::consts::PI * signed_mode(idx, ax.n) / l
                            }
                        })
                        .collect();
                    kappa.push(sym);
                }
                let axis_lambda: Vec<Vec<f64>> = spec
                    .axes
                    .iter()
                    .map(|ax| {
                        let l = ax.length();
                        (0..ax.n)
                            .map(|idx| {
                                let k = 2.0 * std::f64::consts::PI
                                    * signed_mode(idx, ax.n).abs()
                                    / l;
                                k * k
                            })
                            .collect()
                    })
                    .collect();
                let lambda = match d {
                    1 => axis_lambda[0].clone(),
                    _ => {
                        let (n1, n2) = (spec.axes[0].n, spec.axes[1].n);
                        let mut table = Vec::with_capacity(n1 * n2);
                        for k1 in 0..n1 {
                            for k2 in 0..n2 {
                                table.push(axis_lambda[0][k1] + axis_lambda[1][k2]);
                            }
                        }
                        table
                    }
                };
                let fwd = spec
                    .axes
                    .iter()
                    .map(|ax| planner.plan_fft_forward(ax.n))
                    .collect();
                let inv = spec
                    .axes
                    .iter()
                    .map(|ax| planner.plan_fft_inverse(ax.n))
                    .collect();
                let w = spec.axes.iter().map(|ax| ax.length()).product();
                (lambda, kappa, w, Plans::Fourier { fwd, inv })
            }
        };

        Ok(Arc::new(Grid {
            spec,
            coords,
            lambda,
            kappa,
            quad_weight,
            parseval_weight,
            plans,
        }))
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn dimension(&self) -> usize {
        self.spec.dimension()
    }

    pub fn n_points(&self) -> usize {
        self.spec.n_points()
    }

    /// Eigenvalues of `-Delta` per flattened mode index.
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Rectangle-rule weight `h^d` of one collocation point.
    pub fn quad_weight(&self) -> f64 {
        self.quad_weight
    }

    /// Weight `w` with `h^d sum_j f_j conj(g_j) = w sum_k c_k conj(d_k)`.
    pub fn parseval_weight(&self) -> f64 {
        self.parseval_weight
    }

    /// Collocation coordinates along one axis.
    pub fn axis_coords(&self, axis: usize) -> &[f64] {
        &self.coords[axis]
    }

    /// Writes the coordinates of the flattened point index into `out`.
    pub fn fill_coords(&self, flat: usize, out: &mut [f64]) {
        match self.dimension() {
            1 => out[0] = self.coords[0][flat],
            _ => {
                let n2 = self.coords[1].len();
                out[0] = self.coords[0][flat / n2];
                out[1] = self.coords[1][flat % n2];
            }
        }
    }

    fn forward_values(&self, values: &[Complex64]) -> Vec<Complex64> {
        match &self.plans {
            Plans::Sine { fft2n } => {
                let n = self.spec.axes[0].n;
                let mut buf = sine_odd_extension(values, n);
                fft2n.process(&mut buf);
                let scale = Complex64::new(0.0, 1.0 / n as f64);
                (1..n).map(|k| scale * buf[k]).collect()
            }
            Plans::Fourier { fwd, .. } => {
                let mut buf = values.to_vec();
                self.fft_all_axes(&mut buf, fwd);
                let scale = 1.0 / self.n_points() as f64;
                for c in &mut buf {
                    *c *= scale;
                }
                buf
            }
        }
    }

    fn inverse_coeffs(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        match &self.plans {
            Plans::Sine { fft2n } => {
                let n = self.spec.axes[0].n;
                let mut buf = sine_odd_extension(coeffs, n);
                fft2n.process(&mut buf);
                let scale = Complex64::new(0.0, 0.5);
                (1..n).map(|j| scale * buf[j]).collect()
            }
            Plans::Fourier { inv, .. } => {
                let mut buf = coeffs.to_vec();
                self.fft_all_axes(&mut buf, inv);
                buf
            }
        }
    }

    /// Pointwise values of the partial derivative along `axis` from
    /// synthesis coefficients.
    fn derivative_values(&self, coeffs: &[Complex64], axis: usize) -> Vec<Complex64> {
        match &self.plans {
            Plans::Sine { fft2n } => {
                let n = self.spec.axes[0].n;
                let l = self.spec.axes[0].length();
                // d/dx sum c_k sin(k pi x/L) = sum c_k (k pi/L) cos(k pi x/L):
                // evaluate the cosine series through an even extension.
                let mut buf = vec![Complex64::new(0.0, 0.0); 2 * n];
                for k in 1..n {
                    let d = coeffs[k - 1] * (k as f64 * std::f64::consts::PI / l);
                    buf[k] = d;
                    buf[2 * n - k] = d;
                }
                fft2n.process(&mut buf);
                (1..n).map(|j| 0.5 * buf[j]).collect()
            }
            Plans::Fourier { inv, .. } => {
                let mut buf: Vec<Complex64> = match self.dimension() {
                    1 => coeffs
                        .iter()
                        .zip(&self.kappa[0])
                        .map(|(c, &k)| c * Complex64::new(0.0, k))
                        .collect(),
                    _ => {
                        let n2 = self.spec.axes[1].n;
                        coeffs
                            .iter()
                            .enumerate()
                            .map(|(flat, c)| {
                                let idx = if axis == 0 { flat / n2 } else { flat % n2 };
                                c * Complex64::new(0.0, self.kappa[axis][idx])
                            })
                            .collect()
                    }
                };
                self.fft_all_axes(&mut buf, inv);
                buf
            }
        }
    }

    fn fft_all_axes(&self, buf: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        match self.dimension() {
            1 => plans[0].process(buf),
            _ => {
                let n1 = self.spec.axes[0].n;
                let n2 = self.spec.axes[1].n;
                for row in buf.chunks_exact_mut(n2) {
                    plans[1].process(row);
                }
                let mut col = vec![Complex64::new(0.0, 0.0); n1];
                for j2 in 0..n2 {
                    for j1 in 0..n1 {
                        col[j1] = buf[j1 * n2 + j2];
                    }
                    plans[0].process(&mut col);
                    for j1 in 0..n1 {
                        buf[j1 * n2 + j2] = col[j1];
                    }
                }
            }
        }
    }
}

fn signed_mode(idx: usize, n: usize) -> f64 {
    if idx < n / 2 {
        idx as f64
    } else {
        idx as f64 - n as f64
    }
}

/// Odd extension of length `2N` used by both sine transform directions:
/// `[0, v_1 .. v_{N-1}, 0, -v_{N-1} .. -v_1]`.
fn sine_odd_extension(values: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); 2 * n];
    for k in 1..n {
        buf[k] = values[k - 1];
        buf[2 * n - k] = -values[k - 1];
    }
    buf
}

/// A complex field sampled at the collocation points, row-major over axes.
#[derive(Clone)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("grid", &self.grid.spec)
            .field("len", &self.values.len())
            .finish()
    }
}

impl Field {
    /// Wraps raw values; rejects length mismatches and non-finite entries.
    pub fn new(grid: Arc<Grid>, values: Vec<Complex64>) -> Result<Field, Error> {
        if values.len() != grid.n_points() {
            return Err(Error::InvalidField(format!(
                "value count {} does not match the grid's {} points",
                values.len(),
                grid.n_points()
            )));
        }
        let field = Field { grid, values };
        if !field.is_finite() {
            return Err(Error::InvalidField("non-finite entries".into()));
        }
        Ok(field)
    }

    /// Crate-internal constructor that skips validation. Arithmetic on
    /// diverging iterates may overflow; callers gate on [`Field::is_finite`]
    /// instead of panicking mid-flow.
    pub(crate) fn from_raw(grid: Arc<Grid>, values: Vec<Complex64>) -> Field {
        debug_assert_eq!(values.len(), grid.n_points());
        Field { grid, values }
    }

    pub fn zeros(grid: &Arc<Grid>) -> Field {
        Field {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.n_points()],
        }
    }

    /// Samples a function of the coordinates at every collocation point.
    pub fn from_fn<F: FnMut(&[f64]) -> Complex64>(grid: &Arc<Grid>, mut f: F) -> Field {
        let d = grid.dimension();
        let mut x = vec![0.0; d];
        let mut values = Vec::with_capacity(grid.n_points());
        for flat in 0..grid.n_points() {
            grid.fill_coords(flat, &mut x);
            values.push(f(&x));
        }
        Field {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn same_grid(&self, other: &Field) -> bool {
        self.grid.spec == other.grid.spec
    }

    pub fn map<F: FnMut(Complex64) -> Complex64>(&self, mut f: F) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&c| f(c)).collect(),
        }
    }

    /// Combines two fields pointwise. Panics on grid mismatch: callers are
    /// expected to have validated compatibility already.
    pub fn zip_map<F: FnMut(Complex64, Complex64) -> Complex64>(
        &self,
        other: &Field,
        mut f: F,
    ) -> Field {
        assert!(self.same_grid(other), "zip_map on mismatched grids");
        Field {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Field) -> Field {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> Field {
        self.map(|c| c * s)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Synthesis coefficients of a field, in the grid's mode order.
#[derive(Clone)]
pub struct SpectralField {
    grid: Arc<Grid>,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Arc<Grid>, coeffs: Vec<Complex64>) -> Result<SpectralField, Error> {
        if coeffs.len() != grid.n_points() {
            return Err(Error::InvalidField(format!(
                "coefficient count {} does not match the grid's {} modes",
                coeffs.len(),
                grid.n_points()
            )));
        }
        Ok(SpectralField { grid, coeffs })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Eigenvalues of `-Delta`, aligned with `coeffs`.
    pub fn lambda(&self) -> &[f64] {
        self.grid.lambda()
    }

    /// New coefficients `c_k * f(lambda_k)`: diagonal application of a
    /// function of `-Delta`.
    pub fn scaled_by<F: Fn(f64) -> f64>(&self, f: F) -> SpectralField {
        SpectralField {
            grid: self.grid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(self.grid.lambda())
                .map(|(c, &l)| c * f(l))
                .collect(),
        }
    }

    /// Combines two coefficient sets mode-wise with access to `lambda_k`.
    /// Panics on grid mismatch, like [`Field::zip_map`].
    pub fn scaled_zip<F: Fn(Complex64, Complex64, f64) -> Complex64>(
        &self,
        other: &SpectralField,
        f: F,
    ) -> SpectralField {
        assert!(
            self.grid.spec == other.grid.spec,
            "scaled_zip on mismatched grids"
        );
        SpectralField {
            grid: self.grid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .zip(self.grid.lambda())
                .map(|((&a, &b), &l)| f(a, b, l))
                .collect(),
        }
    }
}

/// Analysis: field values to synthesis coefficients.
pub fn forward_transform(f: &Field) -> SpectralField {
    SpectralField {
        grid: f.grid.clone(),
        coeffs: f.grid.forward_values(&f.values),
    }
}

/// Synthesis: coefficients back to point values. Exact inverse of
/// [`forward_transform`] up to roundoff.
pub fn inverse_transform(s: &SpectralField) -> Field {
    Field {
        grid: s.grid.clone(),
        values: s.grid.inverse_coeffs(&s.coeffs),
    }
}

/// Pointwise partial derivatives of the interpolant, one field per axis.
pub fn gradient(f: &Field) -> Vec<Field> {
    let s = forward_transform(f);
    (0..f.grid.dimension())
        .map(|axis| Field {
            grid: f.grid.clone(),
            values: f.grid.derivative_values(&s.coeffs, axis),
        })
        .collect()
}

/// The four pairings of two fields. `l2` and `h1` are the real parts of
/// their complex counterparts.
#[derive(Clone, Copy, Debug)]
pub struct InnerProducts {
    pub l2: f64,
    pub h1: f64,
    pub complex_l2: Complex64,
    pub complex_h1: Complex64,
}

/// Discrete pairings `<f, g> = h^d sum f conj(g)` and the H1 pairing with
/// the derivative part evaluated in coefficient space.
pub fn inner_products(f: &Field, g: &Field) -> Result<InnerProducts, Error> {
    if !f.same_grid(g) {
        return Err(Error::InvalidField(
            "inner product of fields on different grids".into(),
        ));
    }
    let mut l2 = Complex64::new(0.0, 0.0);
    for (a, b) in f.values.iter().zip(&g.values) {
        l2 += a * b.conj();
    }
    l2 *= f.grid.quad_weight;

    let fc = f.grid.forward_values(&f.values);
    let gc = g.grid.forward_values(&g.values);
    let mut grad = Complex64::new(0.0, 0.0);
    for ((a, b), &l) in fc.iter().zip(&gc).zip(f.grid.lambda()) {
        grad += a * b.conj() * l;
    }
    grad *= f.grid.parseval_weight;

    let h1 = l2 + grad;
    Ok(InnerProducts {
        l2: l2.re,
        h1: h1.re,
        complex_l2: l2,
        complex_h1: h1,
    })
}

/// L2 norm by the rectangle rule.
pub fn norm_l2(f: &Field) -> f64 {
    let s: f64 = f.values.iter().map(|c| c.norm_sqr()).sum();
    (s * f.grid.quad_weight).max(0.0).sqrt()
}

/// H1 norm: `sqrt(||f||^2 + ||grad f||^2)` with the spectral gradient part.
pub fn norm_h1(f: &Field) -> f64 {
    let s = forward_transform(f);
    let mut total: f64 = f.values.iter().map(|c| c.norm_sqr()).sum();
    total *= f.grid.quad_weight;
    let mut grad = 0.0;
    for (c, &l) in s.coeffs.iter().zip(f.grid.lambda()) {
        grad += c.norm_sqr() * l;
    }
    total += grad * f.grid.parseval_weight;
    total.max(0.0).sqrt()
}
