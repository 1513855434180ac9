//! Two-photon transverse joint amplitude of the down-converted pair.
//!
//! `ψ(x₁, x₂)` is stored row-major with `x₁` (signal, camera arm) as the row
//! index and `x₂` (herald arm) as the column index. It is normalised so that
//! `Σ|ψ|² dx₁ dx₂ = 1`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft;
use crate::field::{Axis, ComplexField};

const ENERGY_TOL: f64 = 1e-9;
const UNIT_NORM_TOL: f64 = 1e-6;
const ORTHONORMAL_TOL: f64 = 1e-6;

/// Down-conversion source parameters (SI units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceParams {
    pub pump_wavelength: f64,
    pub signal_wavelength: f64,
    pub herald_wavelength: f64,
    /// Pump-envelope width along `x₁ + x₂`.
    pub sigma_plus: f64,
    /// Phase-matching width along `x₁ - x₂`.
    pub sigma_minus: f64,
    /// Informational only; not mapped onto `sigma_minus`.
    pub crystal_thickness: f64,
}

impl Default for SourceParams {
    fn default() -> Self {
        Self {
            pump_wavelength: 355e-9,
            signal_wavelength: 710e-9,
            herald_wavelength: 710e-9,
            sigma_plus: 500e-6,
            sigma_minus: 20e-6,
            crystal_thickness: 3e-3,
        }
    }
}

/// `1/λ_p = 1/λ₁ + 1/λ₂` to 1e-9 relative.
pub fn validate_energy(params: &SourceParams) -> bool {
    let (p, s, h) = (
        params.pump_wavelength,
        params.signal_wavelength,
        params.herald_wavelength,
    );
    if !(p > 0.0 && s > 0.0 && h > 0.0) {
        return false;
    }
    let pump = 1.0 / p;
    ((1.0 / s + 1.0 / h) - pump).abs() <= ENERGY_TOL * pump
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiphotonAmplitude {
    axis1: Axis,
    axis2: Axis,
    psi: Vec<Complex64>,
}

impl BiphotonAmplitude {
    /// Builds from raw samples and normalises to unit norm.
    pub fn new(axis1: Axis, axis2: Axis, psi: Vec<Complex64>) -> Result<Self> {
        let expected = axis1.len() * axis2.len();
        if psi.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: psi.len(),
            });
        }
        if psi.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut out = Self { axis1, axis2, psi };
        let norm = out.norm();
        if !(norm > 0.0) {
            return Err(Error::ZeroMass);
        }
        let s = 1.0 / norm.sqrt();
        for v in out.psi.iter_mut() {
            *v *= s;
        }
        Ok(out)
    }

    /// Product state `s(x₁) h(x₂)`.
    pub fn separable(signal: &ComplexField, herald: &ComplexField) -> Result<Self> {
        let psi = signal
            .values()
            .iter()
            .flat_map(|s| herald.values().iter().map(move |h| s * h))
            .collect();
        Self::new(*signal.axis(), *herald.axis(), psi)
    }

    pub fn axis1(&self) -> &Axis {
        &self.axis1
    }

    pub fn axis2(&self) -> &Axis {
        &self.axis2
    }

    pub fn values(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn at(&self, i1: usize, i2: usize) -> Complex64 {
        self.psi[i1 * self.axis2.len() + i2]
    }

    pub fn norm(&self) -> f64 {
        self.psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.axis1.pitch() * self.axis2.pitch()
    }

    /// `|ψ|²` as a joint density over `(x₁, x₂)`.
    pub fn position_density(&self) -> JointDensity {
        JointDensity::normalized(
            self.axis1,
            self.axis2,
            self.psi.iter().map(|v| v.norm_sqr()).collect(),
        )
    }

    /// Column `ψ(·, x₂_j)` as a field on `axis1`.
    pub fn signal_column(&self, j: usize) -> ComplexField {
        let n2 = self.axis2.len();
        let values = (0..self.axis1.len()).map(|i| self.psi[i * n2 + j]).collect();
        ComplexField::from_parts(self.axis1, values)
    }
}

/// `ψ ∝ exp(-(x₁+x₂)²/(8σ₊²)) · exp(-(x₁-x₂)²/(8σ₋²))`.
///
/// Both axes must hold `±4σ₊`, and `σ₋` must span at least four samples,
/// otherwise the sampled state silently decorrelates.
pub fn double_gaussian(params: &SourceParams, axis1: Axis, axis2: Axis) -> Result<BiphotonAmplitude> {
    let (sp, sm) = (params.sigma_plus, params.sigma_minus);
    if !(sp > 0.0 && sp.is_finite()) {
        return Err(Error::NonPositive {
            name: "sigma_plus",
            value: sp,
        });
    }
    if !(sm > 0.0 && sm.is_finite()) {
        return Err(Error::NonPositive {
            name: "sigma_minus",
            value: sm,
        });
    }
    for axis in [&axis1, &axis2] {
        let half = axis.extent() / 2.0;
        if half < 4.0 * sp * (1.0 - 1e-9) {
            return Err(Error::NotContained {
                what: "joint amplitude window",
                half_extent: half,
                required: 4.0 * sp,
            });
        }
        let samples = sm / axis.pitch();
        if samples < 4.0 * (1.0 - 1e-9) {
            return Err(Error::UnderResolved {
                what: "sigma_minus",
                samples,
                required: 4.0,
            });
        }
    }
    let a = 1.0 / (8.0 * sp * sp);
    let b = 1.0 / (8.0 * sm * sm);
    let x2s: Vec<f64> = axis2.coordinates().collect();
    let mut psi = Vec::with_capacity(axis1.len() * axis2.len());
    for x1 in axis1.coordinates() {
        for &x2 in &x2s {
            let s = x1 + x2;
            let d = x1 - x2;
            psi.push(Complex64::new((-a * s * s - b * d * d).exp(), 0.0));
        }
    }
    BiphotonAmplitude::new(axis1, axis2, psi)
}

/// A nonnegative density on a 2D grid, normalised to unit integral.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDensity {
    pub axis1: Axis,
    pub axis2: Axis,
    pub density: Vec<f64>,
}

impl JointDensity {
    fn normalized(axis1: Axis, axis2: Axis, mut density: Vec<f64>) -> Self {
        let total: f64 = density.iter().sum::<f64>() * axis1.pitch() * axis2.pitch();
        if total > 0.0 {
            for v in density.iter_mut() {
                *v /= total;
            }
        }
        Self {
            axis1,
            axis2,
            density,
        }
    }

    /// Marginal over the second coordinate, on `axis1`.
    pub fn marginal1(&self) -> Vec<f64> {
        let n2 = self.axis2.len();
        self.density
            .chunks_exact(n2)
            .map(|row| row.iter().sum::<f64>() * self.axis2.pitch())
            .collect()
    }

    /// Marginal over the first coordinate, on `axis2`.
    pub fn marginal2(&self) -> Vec<f64> {
        let n2 = self.axis2.len();
        let mut out = alloc::vec![0.0; n2];
        for row in self.density.chunks_exact(n2) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        for o in out.iter_mut() {
            *o *= self.axis1.pitch();
        }
        out
    }

    /// Pearson correlation between the two coordinates.
    pub fn correlation_coefficient(&self) -> f64 {
        let n2 = self.axis2.len();
        let x1: Vec<f64> = self.axis1.coordinates().collect();
        let x2: Vec<f64> = self.axis2.coordinates().collect();
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (i, row) in self.density.chunks_exact(n2).enumerate() {
            for (j, p) in row.iter().enumerate() {
                m0 += p;
                m1 += p * x1[i];
                m2 += p * x2[j];
            }
        }
        let (mu1, mu2) = (m1 / m0, m2 / m0);
        let (mut c11, mut c22, mut c12) = (0.0, 0.0, 0.0);
        for (i, row) in self.density.chunks_exact(n2).enumerate() {
            let d1 = x1[i] - mu1;
            for (j, p) in row.iter().enumerate() {
                let d2 = x2[j] - mu2;
                c11 += p * d1 * d1;
                c22 += p * d2 * d2;
                c12 += p * d1 * d2;
            }
        }
        c12 / (c11 * c22).sqrt()
    }
}

/// Joint transverse-momentum density `|Ψ(ν₁, ν₂)|²`.
pub fn momentum_joint(b: &BiphotonAmplitude) -> JointDensity {
    let (n1, n2) = (b.axis1.len(), b.axis2.len());
    let mut data = b.psi.clone();
    fft::centered_forward_2d(&mut data, n1, n2);
    JointDensity::normalized(
        b.axis1.conjugate(),
        b.axis2.conjugate(),
        data.iter().map(|v| v.norm_sqr()).collect(),
    )
}

/// Result of projecting the herald photon onto a mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Heralded {
    /// Conditional signal field, unit norm (all zeros when `is_null`).
    pub field: ComplexField,
    pub probability: f64,
    pub is_null: bool,
}

/// `φ(x₁) = ∫ mode*(x₂) ψ(x₁, x₂) dx₂`, `p = ‖φ‖²`.
pub fn herald_project(b: &BiphotonAmplitude, mode: &ComplexField) -> Result<Heralded> {
    if !mode.axis().matches(&b.axis2) {
        return Err(Error::AxisMismatch);
    }
    let norm = mode.norm();
    if (norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::NotNormalized { norm });
    }
    Ok(project_unchecked(b, mode))
}

/// Projection without the unit-norm precondition; `probability` is then
/// `‖φ‖²` for the mode as given.
pub(crate) fn project_unchecked(b: &BiphotonAmplitude, mode: &ComplexField) -> Heralded {
    let n2 = b.axis2.len();
    let dx2 = b.axis2.pitch();
    let conj: Vec<Complex64> = mode.values().iter().map(|v| v.conj()).collect();
    let values: Vec<Complex64> = b
        .psi
        .chunks_exact(n2)
        .map(|row| row.iter().zip(&conj).map(|(p, m)| p * m).sum::<Complex64>() * dx2)
        .collect();
    let phi = ComplexField::from_parts(b.axis1, values);
    let probability = phi.norm();
    match phi.normalized() {
        Some(field) if probability > 0.0 => Heralded {
            field,
            probability,
            is_null: false,
        },
        _ => Heralded {
            field: ComplexField::zeros(b.axis1),
            probability: 0.0,
            is_null: true,
        },
    }
}

/// The first `count` Hermite-Gauss modes `HG_n(x)` with intensity waist `w0`
/// (fundamental `∝ exp(-x²/w0²)`), built from the normalised Hermite
/// function recurrence.
pub fn hermite_gauss_modes(w0: f64, count: usize, axis: Axis) -> Result<Vec<ComplexField>> {
    if count == 0 {
        return Err(Error::NoModes);
    }
    if !(w0 > 0.0 && w0.is_finite()) {
        return Err(Error::NonPositive {
            name: "mode waist",
            value: w0,
        });
    }
    let required = ((count as f64).sqrt() + 2.0) * w0;
    let half = axis.extent() / 2.0;
    if half < required {
        return Err(Error::NotContained {
            what: "Hermite-Gauss modes",
            half_extent: half,
            required,
        });
    }
    let jac = (core::f64::consts::SQRT_2 / w0).sqrt();
    let pi_quarter = core::f64::consts::PI.powf(-0.25);
    let mut modes: Vec<Vec<f64>> = Vec::with_capacity(count);
    let xi: Vec<f64> = axis
        .coordinates()
        .map(|x| core::f64::consts::SQRT_2 * x / w0)
        .collect();
    modes.push(xi.iter().map(|t| pi_quarter * (-t * t / 2.0).exp()).collect());
    if count > 1 {
        let first: Vec<f64> = xi
            .iter()
            .zip(&modes[0])
            .map(|(t, p)| core::f64::consts::SQRT_2 * t * p)
            .collect();
        modes.push(first);
    }
    for n in 1..count.saturating_sub(1) {
        let a = (2.0 / (n as f64 + 1.0)).sqrt();
        let b = (n as f64 / (n as f64 + 1.0)).sqrt();
        let next = xi
            .iter()
            .zip(modes[n].iter().zip(&modes[n - 1]))
            .map(|(t, (p, q))| a * t * p - b * q)
            .collect();
        modes.push(next);
    }
    Ok(modes
        .into_iter()
        .map(|m| {
            ComplexField::from_parts(axis, m.into_iter().map(|v| Complex64::new(v * jac, 0.0)).collect())
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMember {
    pub weight: f64,
    pub field: ComplexField,
}

/// Incoherent mixture of conditional fields; downstream intensities add with
/// the member weights.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MixedEnsemble {
    pub members: Vec<EnsembleMember>,
}

impl MixedEnsemble {
    pub fn total_weight(&self) -> f64 {
        self.members.iter().map(|m| m.weight).sum()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Largest `|⟨i|j⟩ - δ_ij|` over pairs, with the offending pair.
pub fn orthonormality_defect(modes: &[ComplexField]) -> Result<(f64, usize, usize)> {
    let mut worst = (0.0, 0, 0);
    for i in 0..modes.len() {
        for j in i..modes.len() {
            let overlap = modes[i].inner(&modes[j])?;
            let target = if i == j { 1.0 } else { 0.0 };
            let defect = (overlap - Complex64::new(target, 0.0)).norm();
            if defect > worst.0 {
                worst = (defect, i, j);
            }
        }
    }
    Ok(worst)
}

/// Heralding through a multi-mode fiber: one projection per (orthonormal)
/// guided mode, mixed incoherently.
pub fn herald_multimode(b: &BiphotonAmplitude, modes: &[ComplexField]) -> Result<MixedEnsemble> {
    if modes.is_empty() {
        return Err(Error::NoModes);
    }
    let (defect, i, j) = orthonormality_defect(modes)?;
    if defect > ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal { i, j, overlap: defect });
    }
    let members = modes
        .iter()
        .map(|m| {
            herald_project(b, m).map(|h| EnsembleMember {
                weight: h.probability,
                field: h.field,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MixedEnsemble { members })
}

/// Reduced signal state with the herald traced out, as an ensemble of the
/// columns `ψ(·, x₂_j)`.
pub fn trace_out_herald(b: &BiphotonAmplitude) -> MixedEnsemble {
    let dx2 = b.axis2.pitch();
    let members = (0..b.axis2.len())
        .filter_map(|j| {
            let column = b.signal_column(j);
            let weight = column.norm() * dx2;
            column
                .normalized()
                .filter(|_| weight > 0.0)
                .map(|field| EnsembleMember { weight, field })
        })
        .collect();
    MixedEnsemble { members }
}

/// Schmidt decomposition `ψ = Σ c_k u_k(x₁) h_k(x₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schmidt {
    /// Nonincreasing, `Σ c_k² = 1`.
    pub coefficients: Vec<f64>,
    pub signal_modes: Vec<ComplexField>,
    pub herald_modes: Vec<ComplexField>,
    /// `1 / Σ c_k⁴`.
    pub schmidt_number: f64,
}

/// Modes whose coefficient falls below this fraction of the leading one are
/// dropped from the returned mode lists (coefficients are kept).
const SCHMIDT_MODE_CUTOFF: f64 = 1e-8;

pub fn schmidt_decompose(b: &BiphotonAmplitude) -> Schmidt {
    use nalgebra::DMatrix;

    let (n1, n2) = (b.axis1.len(), b.axis2.len());
    let w = (b.axis1.pitch() * b.axis2.pitch()).sqrt();
    let (s1, s2) = (1.0 / b.axis1.pitch().sqrt(), 1.0 / b.axis2.pitch().sqrt());
    let real = b.psi.iter().all(|v| v.im == 0.0);

    // (singular value, signal column, herald row) triples.
    let mut triples: Vec<(f64, Vec<Complex64>, Vec<Complex64>)>;
    if real {
        let m = DMatrix::<f64>::from_fn(n1, n2, |i, j| b.psi[i * n2 + j].re * w);
        let svd = m.svd(true, true);
        let u = svd.u.expect("requested U");
        let vt = svd.v_t.expect("requested V^T");
        triples = svd
            .singular_values
            .iter()
            .enumerate()
            .map(|(k, &s)| {
                let sig = (0..n1).map(|i| Complex64::new(u[(i, k)] * s1, 0.0)).collect();
                let her = (0..n2).map(|j| Complex64::new(vt[(k, j)] * s2, 0.0)).collect();
                (s, sig, her)
            })
            .collect();
    } else {
        let m = DMatrix::<Complex64>::from_fn(n1, n2, |i, j| b.psi[i * n2 + j] * w);
        let svd = m.svd(true, true);
        let u = svd.u.expect("requested U");
        let vt = svd.v_t.expect("requested V^H");
        triples = svd
            .singular_values
            .iter()
            .enumerate()
            .map(|(k, &s)| {
                let sig = (0..n1).map(|i| u[(i, k)] * s1).collect();
                let her = (0..n2).map(|j| vt[(k, j)] * s2).collect();
                (s, sig, her)
            })
            .collect();
    }
    triples.sort_by(|a, b| b.0.total_cmp(&a.0));
    let total: f64 = triples.iter().map(|t| t.0 * t.0).sum::<f64>().sqrt();
    let coefficients: Vec<f64> = triples.iter().map(|t| t.0 / total).collect();
    let schmidt_number = 1.0 / coefficients.iter().map(|c| c.powi(4)).sum::<f64>();
    let lead = coefficients.first().copied().unwrap_or(0.0);
    let mut signal_modes = Vec::new();
    let mut herald_modes = Vec::new();
    for (c, (_, sig, her)) in coefficients.iter().zip(triples) {
        if *c < SCHMIDT_MODE_CUTOFF * lead {
            break;
        }
        signal_modes.push(ComplexField::from_parts(b.axis1, sig));
        herald_modes.push(ComplexField::from_parts(b.axis2, her));
    }
    Schmidt {
        coefficients,
        signal_modes,
        herald_modes,
        schmidt_number,
    }
}

/// Normalised Schmidt coefficients only (no modes), nonincreasing.
pub fn schmidt_coefficients(b: &BiphotonAmplitude) -> Vec<f64> {
    use nalgebra::DMatrix;

    let (n1, n2) = (b.axis1.len(), b.axis2.len());
    let w = (b.axis1.pitch() * b.axis2.pitch()).sqrt();
    let mut values: Vec<f64> = if b.psi.iter().all(|v| v.im == 0.0) {
        DMatrix::<f64>::from_fn(n1, n2, |i, j| b.psi[i * n2 + j].re * w)
            .singular_values()
            .iter()
            .copied()
            .collect()
    } else {
        DMatrix::<Complex64>::from_fn(n1, n2, |i, j| b.psi[i * n2 + j] * w)
            .singular_values()
            .iter()
            .copied()
            .collect()
    };
    values.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = values.iter().map(|s| s * s).sum::<f64>().sqrt();
    values.iter_mut().for_each(|s| *s /= total);
    values
}

/// `K = 1 / Σ c_k⁴`.
pub fn schmidt_number(b: &BiphotonAmplitude) -> f64 {
    1.0 / schmidt_coefficients(b).iter().map(|c| c.powi(4)).sum::<f64>()
}
