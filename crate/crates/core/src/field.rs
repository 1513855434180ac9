//! Sampled complex scalar fields on centered uniform grids, unitary Fourier
//! transforms and paraxial free-space propagation.
//!
//! Conventions used throughout the crate:
//!
//! * sample `j` of an [`Axis`] sits at `x_j = (j - n/2) * dx`;
//! * the norm of a field is `Σ|v_j|² dx`, i.e. a total probability;
//! * transforms are unitary, so norms survive every step unchanged.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft::Radix2;

const AXIS_MATCH_TOL: f64 = 1e-9;

/// A centered uniform sample grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    n: usize,
    dx: f64,
}

impl Axis {
    pub fn new(n: usize, extent: f64) -> Result<Self> {
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::NonPositive {
                name: "extent",
                value: extent,
            });
        }
        Self::with_pitch(n, extent / n as f64)
    }

    pub fn with_pitch(n: usize, dx: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::BadSampleCount { n });
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::NonPositive {
                name: "sample pitch",
                value: dx,
            });
        }
        Ok(Self { n, dx })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn pitch(&self) -> f64 {
        self.dx
    }

    pub fn extent(&self) -> f64 {
        self.n as f64 * self.dx
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.dx
    }

    pub fn coordinates(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.coordinate(j))
    }

    /// Spatial-frequency axis (cycles/m) of the centered transform.
    pub fn conjugate(&self) -> Axis {
        Axis {
            n: self.n,
            dx: 1.0 / (self.n as f64 * self.dx),
        }
    }

    /// Same sample count, pitch multiplied by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> Result<Axis> {
        Axis::with_pitch(self.n, self.dx * factor)
    }

    /// Equal sample count and pitch equal to 1e-9 relative.
    pub fn matches(&self, other: &Axis) -> bool {
        self.n == other.n && (self.dx - other.dx).abs() <= AXIS_MATCH_TOL * self.dx
    }

    /// Index of the sample nearest to `x`, if `x` lies on the grid.
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        let j = (x / self.dx).round() + (self.n / 2) as f64;
        (j >= 0.0 && j < self.n as f64).then_some(j as usize)
    }
}

/// `make_axis(n, extent)`: `dx = extent / n`, centered on zero.
pub fn make_axis(n: usize, extent: f64) -> Result<Axis> {
    Axis::new(n, extent)
}

/// A complex transverse amplitude sampled on an [`Axis`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    axis: Axis,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(axis: Axis, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != axis.len() {
            return Err(Error::LengthMismatch {
                expected: axis.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { axis, values })
    }

    pub(crate) fn from_parts(axis: Axis, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(axis.len(), values.len());
        Self { axis, values }
    }

    pub fn from_fn(axis: Axis, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let values = axis.coordinates().map(&mut f).collect();
        Self { axis, values }
    }

    pub fn zeros(axis: Axis) -> Self {
        Self {
            axis,
            values: alloc::vec![Complex64::new(0.0, 0.0); axis.len()],
        }
    }

    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `Σ|v_j|² dx`.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.axis.dx
    }

    /// Rescaled to unit norm; `None` for the zero field.
    pub fn normalized(&self) -> Option<Self> {
        let norm = self.norm();
        if !(norm > 0.0) {
            return None;
        }
        Some(self.scaled(Complex64::new(1.0 / norm.sqrt(), 0.0)))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            axis: self.axis,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// `⟨self|other⟩ = Σ conj(self_j) other_j dx`.
    pub fn inner(&self, other: &ComplexField) -> Result<Complex64> {
        if !self.axis.matches(&other.axis) {
            return Err(Error::AxisMismatch);
        }
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.axis.dx)
    }

    /// `‖self - other‖ / ‖other‖` in the L2 sense. Axes must match.
    pub fn relative_l2(&self, other: &ComplexField) -> Result<f64> {
        if !self.axis.matches(&other.axis) {
            return Err(Error::AxisMismatch);
        }
        let diff: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let base: f64 = other.values.iter().map(|v| v.norm_sqr()).sum();
        Ok((diff / base).sqrt())
    }

    /// Zero-pads (centered) onto a wider grid of the same pitch.
    pub fn embed(&self, target: Axis) -> Result<Self> {
        if (target.dx - self.axis.dx).abs() > AXIS_MATCH_TOL * self.axis.dx
            || target.n < self.axis.n
        {
            return Err(Error::AxisMismatch);
        }
        let offset = target.n / 2 - self.axis.n / 2;
        let mut values = alloc::vec![Complex64::new(0.0, 0.0); target.n];
        values[offset..offset + self.axis.n].copy_from_slice(&self.values);
        Ok(Self {
            axis: target,
            values,
        })
    }
}

/// Unitary centered Fourier transform onto the conjugate (cycles/m) axis.
///
/// Output samples approximate the continuous transform
/// `F(ν) = ∫ f(x) exp(-2πiνx) dx`, so that `Σ|F_k|² dν = Σ|f_j|² dx`.
pub fn fourier_centered(f: &ComplexField) -> ComplexField {
    let axis = f.axis;
    let mut values = f.values.clone();
    Radix2::new(axis.n).centered_forward(&mut values);
    let scale = (axis.n as f64).sqrt() * axis.dx;
    for v in values.iter_mut() {
        *v *= scale;
    }
    ComplexField {
        axis: axis.conjugate(),
        values,
    }
}

/// Inverse of [`fourier_centered`]: takes a spectrum on a frequency axis and
/// returns the field on the corresponding spatial axis.
pub fn inverse_fourier_centered(spectrum: &ComplexField) -> ComplexField {
    let axis = spectrum.axis;
    let mut values = spectrum.values.clone();
    Radix2::new(axis.n).centered_inverse(&mut values);
    let scale = (axis.n as f64).sqrt() * axis.dx;
    for v in values.iter_mut() {
        *v *= scale;
    }
    ComplexField {
        axis: axis.conjugate(),
        values,
    }
}

/// True when the transfer-function chirp aliases on this grid, i.e.
/// `λ|z|ν_max² > n/2` with `ν_max = 1/(2dx)`.
pub fn fresnel_aliases(axis: &Axis, z: f64, wavelength: f64) -> bool {
    let nu_max = 0.5 / axis.dx;
    wavelength * z.abs() * nu_max * nu_max > axis.n as f64 / 2.0
}

/// Paraxial propagation by `z` (negative = backwards) with the transfer
/// function `exp(-iπλzν²)`. Warns through `log` when the chirp aliases.
pub fn fresnel_propagate(f: &ComplexField, z: f64, wavelength: f64) -> Result<ComplexField> {
    if !(wavelength > 0.0 && wavelength.is_finite()) {
        return Err(Error::NonPositive {
            name: "wavelength",
            value: wavelength,
        });
    }
    if !z.is_finite() {
        return Err(Error::NonFinite);
    }
    if z == 0.0 {
        return Ok(f.clone());
    }
    let axis = f.axis;
    if fresnel_aliases(&axis, z, wavelength) {
        log::warn!(
            "fresnel_propagate: z = {z} m aliases on a {}-sample grid of pitch {} m",
            axis.n,
            axis.dx
        );
    }
    let n = axis.n;
    let dnu = 1.0 / (n as f64 * axis.dx);
    let plan = Radix2::new(n);
    let mut values = f.values.clone();
    // The multiplier is shift invariant, so the uncentered (standard order)
    // spectrum can be used directly.
    plan.forward(&mut values);
    for (k, v) in values.iter_mut().enumerate() {
        let nu = if k < n / 2 { k as f64 } else { k as f64 - n as f64 } * dnu;
        *v *= Complex64::from_polar(1.0 / n as f64, -PI * wavelength * z * nu * nu);
    }
    plan.inverse(&mut values);
    Ok(ComplexField { axis, values })
}
