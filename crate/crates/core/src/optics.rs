//! Optical elements and ordered systems of them.
//!
//! Sign convention (used everywhere): a converging thin lens has `f > 0` and
//! multiplies the field by `exp(+iπx²/(λf))`; free space multiplies the
//! angular spectrum by `exp(-iπλzν²)`.
//!
//! `FourierLens` and `Imaging4f` are exact operator shortcuts rather than
//! lens-phase plus propagation chains. The Fourier lens maps onto the scaled
//! axis `x' = λfν`; the 4f relay maps `x' = -(f₂/f₁)x` onto an axis whose
//! pitch is scaled by `f₂/f₁`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::{fourier_centered, fresnel_propagate, inverse_fourier_centered, Axis, ComplexField};

/// Real amplitude transmission `t(x) ∈ [0, 1]` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionMask {
    axis: Axis,
    t: Vec<f64>,
}

impl TransmissionMask {
    pub fn new(axis: Axis, t: Vec<f64>) -> Result<Self> {
        if t.len() != axis.len() {
            return Err(Error::LengthMismatch {
                expected: axis.len(),
                found: t.len(),
            });
        }
        if let Some(&v) = t.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::NotAProbability {
                name: "transmission",
                value: v,
            });
        }
        Ok(Self { axis, t })
    }

    pub fn open(axis: Axis) -> Self {
        Self {
            axis,
            t: alloc::vec![1.0; axis.len()],
        }
    }

    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    pub fn values(&self) -> &[f64] {
        &self.t
    }

    /// Transmission at the sample nearest `x` (0 off-grid).
    pub fn at(&self, x: f64) -> f64 {
        self.axis.nearest_index(x).map_or(0.0, |j| self.t[j])
    }

    /// Fraction of the window that is open, `Σt·dx / extent`.
    pub fn open_fraction(&self) -> f64 {
        self.t.iter().sum::<f64>() / self.axis.len() as f64
    }
}

/// Two slits of width `a` centred at `±d/2`; a sample is open when its centre
/// falls strictly inside a slit.
pub fn double_slit(a: f64, d: f64, axis: Axis) -> Result<TransmissionMask> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::NonPositive {
            name: "slit width",
            value: a,
        });
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::NonPositive {
            name: "slit separation",
            value: d,
        });
    }
    if a >= d {
        return Err(Error::SlitOverlap {
            width: a,
            separation: d,
        });
    }
    if d + a >= axis.extent() {
        return Err(Error::SlitOutsideGrid {
            span: d + a,
            extent: axis.extent(),
        });
    }
    let t = axis
        .coordinates()
        .map(|x| {
            let open = (x - d / 2.0).abs() < a / 2.0 || (x + d / 2.0).abs() < a / 2.0;
            if open {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    Ok(TransmissionMask { axis, t })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    FreeSpace { z: f64 },
    ThinLens { f: f64 },
    Mask(TransmissionMask),
    /// Front focal plane to back focal plane of a lens: exact scaled Fourier
    /// transform.
    FourierLens { f: f64 },
    /// Back focal plane to front focal plane; the adjoint of `FourierLens`.
    InverseFourierLens { f: f64 },
    /// Two-lens relay: inverted image with magnification `-f2/f1`.
    Imaging4f { f1: f64, f2: f64 },
}

impl Element {
    /// The adjoint (time-reversed) element.
    pub fn adjoint(&self) -> Element {
        match self {
            Element::FreeSpace { z } => Element::FreeSpace { z: -z },
            Element::ThinLens { f } => Element::ThinLens { f: -f },
            Element::Mask(m) => Element::Mask(m.clone()),
            Element::FourierLens { f } => Element::InverseFourierLens { f: *f },
            Element::InverseFourierLens { f } => Element::FourierLens { f: *f },
            Element::Imaging4f { f1, f2 } => Element::Imaging4f { f1: *f2, f2: *f1 },
        }
    }
}

fn check_focal(f: f64) -> Result<()> {
    if f == 0.0 || !f.is_finite() {
        return Err(Error::ZeroFocalLength);
    }
    Ok(())
}

fn check_positive_focal(f: f64) -> Result<()> {
    check_focal(f)?;
    if f < 0.0 {
        return Err(Error::NonPositive {
            name: "focal length",
            value: f,
        });
    }
    Ok(())
}

/// Applies one element at wavelength `λ`.
pub fn apply_element(field: &ComplexField, element: &Element, wavelength: f64) -> Result<ComplexField> {
    if !(wavelength > 0.0 && wavelength.is_finite()) {
        return Err(Error::NonPositive {
            name: "wavelength",
            value: wavelength,
        });
    }
    match element {
        Element::FreeSpace { z } => fresnel_propagate(field, *z, wavelength),
        Element::ThinLens { f } => {
            check_focal(*f)?;
            let axis = *field.axis();
            let k = PI / (wavelength * f);
            let values = field
                .values()
                .iter()
                .zip(axis.coordinates())
                .map(|(v, x)| v * Complex64::from_polar(1.0, k * x * x))
                .collect();
            Ok(ComplexField::from_parts(axis, values))
        }
        Element::Mask(mask) => {
            if !mask.axis().matches(field.axis()) {
                return Err(Error::AxisMismatch);
            }
            let values = field
                .values()
                .iter()
                .zip(mask.values())
                .map(|(v, t)| v * *t)
                .collect();
            Ok(ComplexField::from_parts(*field.axis(), values))
        }
        Element::FourierLens { f } => {
            check_positive_focal(*f)?;
            let spectrum = fourier_centered(field);
            let scale = wavelength * f;
            let out_axis = spectrum
                .axis()
                .scaled(scale)
                .map_err(|_| Error::OutputWindow)?;
            let amp = 1.0 / scale.sqrt();
            let values = spectrum.into_values().into_iter().map(|v| v * amp).collect();
            Ok(ComplexField::from_parts(out_axis, values))
        }
        Element::InverseFourierLens { f } => {
            check_positive_focal(*f)?;
            let scale = wavelength * f;
            let freq_axis = field
                .axis()
                .scaled(1.0 / scale)
                .map_err(|_| Error::OutputWindow)?;
            let amp = scale.sqrt();
            let values = field.values().iter().map(|v| v * amp).collect();
            Ok(inverse_fourier_centered(&ComplexField::from_parts(
                freq_axis, values,
            )))
        }
        Element::Imaging4f { f1, f2 } => {
            check_positive_focal(*f1)?;
            check_positive_focal(*f2)?;
            image_4f(field, f2 / f1)
        }
    }
}

/// `x' = -m x`: output sample `j` reads input sample `n - j`. The input sample
/// at `-n/2·dx` has no representable mirror, so it must carry (numerically)
/// no weight.
fn image_4f(field: &ComplexField, magnification: f64) -> Result<ComplexField> {
    let axis = *field.axis();
    let out_axis = axis.scaled(magnification).map_err(|_| Error::OutputWindow)?;
    let values = field.values();
    let norm = field.norm();
    let edge = values[0].norm_sqr() * axis.pitch();
    if edge > 1e-12 * norm {
        return Err(Error::OutputWindow);
    }
    let n = axis.len();
    let amp = 1.0 / magnification.sqrt();
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); n];
    for (j, slot) in out.iter_mut().enumerate().skip(1) {
        *slot = values[n - j] * amp;
    }
    Ok(ComplexField::from_parts(out_axis, out))
}

/// An ordered sequence of elements at a design wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalSystem {
    pub elements: Vec<Element>,
    pub wavelength: f64,
}

impl OpticalSystem {
    pub fn new(elements: Vec<Element>, wavelength: f64) -> Self {
        Self {
            elements,
            wavelength,
        }
    }

    pub fn identity(wavelength: f64) -> Self {
        Self::new(Vec::new(), wavelength)
    }
}

/// Left-to-right composition of [`apply_element`].
pub fn apply_system(field: &ComplexField, system: &OpticalSystem) -> Result<ComplexField> {
    let mut current = field.clone();
    for element in &system.elements {
        current = apply_element(&current, element, system.wavelength)?;
    }
    Ok(current)
}

/// Reversed order, each element replaced by its adjoint.
pub fn adjoint_system(system: &OpticalSystem) -> OpticalSystem {
    OpticalSystem {
        elements: system.elements.iter().rev().map(Element::adjoint).collect(),
        wavelength: system.wavelength,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_axis;
    use alloc::vec;

    const LAMBDA: f64 = 710e-9;

    fn default_axis() -> Axis {
        make_axis(4096, 16e-3).unwrap()
    }

    fn test_field(axis: Axis) -> ComplexField {
        ComplexField::from_fn(axis, |x| {
            Complex64::new(
                (-(x - 1e-4) * (x - 1e-4) / 4e-8).exp(),
                0.3 * (-x * x / 1e-7).exp() * (x * 2e4).sin(),
            )
        })
    }

    #[test]
    fn double_slit_geometry() {
        let m = double_slit(100e-6, 500e-6, default_axis()).unwrap();
        assert_eq!(m.at(0.0), 0.0);
        assert_eq!(m.at(250e-6), 1.0);
        assert_eq!(m.at(-250e-6), 1.0);
        assert_eq!(m.at(400e-6), 0.0);
        assert_eq!(m.at(-400e-6), 0.0);
        // Open fraction 2a/extent = 0.0125, within one pixel per slit.
        let pixel = 1.0 / 4096.0;
        assert!((m.open_fraction() - 0.0125).abs() <= 2.0 * pixel);
        // Symmetric.
        let t = m.values();
        for j in 1..4096 {
            assert_eq!(t[j], t[4096 - j]);
        }
    }

    #[test]
    fn double_slit_rejects_overlap_and_oversize() {
        assert!(matches!(
            double_slit(200e-6, 100e-6, default_axis()),
            Err(Error::SlitOverlap { .. })
        ));
        assert!(matches!(
            double_slit(100e-6, 100e-6, default_axis()),
            Err(Error::SlitOverlap { .. })
        ));
        assert!(matches!(
            double_slit(1e-3, 16e-3, default_axis()),
            Err(Error::SlitOutsideGrid { .. })
        ));
    }

    #[test]
    fn mask_zeroes_outside_slits() {
        let axis = default_axis();
        let mask = double_slit(100e-6, 500e-6, axis).unwrap();
        let ones = ComplexField::from_fn(axis, |_| Complex64::new(1.0, 0.0));
        let out = apply_element(&ones, &Element::Mask(mask.clone()), LAMBDA).unwrap();
        for (v, t) in out.values().iter().zip(mask.values()) {
            assert_eq!(v.re, *t);
        }
        let f = test_field(axis);
        assert!(apply_element(&f, &Element::Mask(mask), LAMBDA).unwrap().norm() <= f.norm());
    }

    #[test]
    fn mask_on_wrong_axis_is_rejected() {
        let mask = double_slit(100e-6, 500e-6, make_axis(2048, 8e-3).unwrap()).unwrap();
        let f = test_field(default_axis());
        assert_eq!(apply_element(&f, &Element::Mask(mask), LAMBDA), Err(Error::AxisMismatch));
    }

    #[test]
    fn fourier_lens_output_axis_and_norm() {
        let axis = default_axis();
        let f = test_field(axis);
        let out = apply_element(&f, &Element::FourierLens { f: 0.5 }, LAMBDA).unwrap();
        let expected_pitch = LAMBDA * 0.5 / 16e-3;
        assert!((out.axis().pitch() - expected_pitch).abs() < 1e-15);
        assert!((out.norm() - f.norm()).abs() / f.norm() < 1e-12);
    }

    #[test]
    fn imaging_4f_unit_magnification_flips() {
        let axis = default_axis();
        let f = test_field(axis);
        let out = apply_element(&f, &Element::Imaging4f { f1: 0.25, f2: 0.25 }, LAMBDA).unwrap();
        assert!(out.axis().matches(&axis));
        assert!((out.norm() - f.norm()).abs() / f.norm() < 1e-12);
        for j in 1..4096 {
            assert_eq!(out.values()[j], f.values()[4096 - j]);
        }
    }

    #[test]
    fn imaging_4f_magnification_scales_axis() {
        let axis = default_axis();
        let f = test_field(axis);
        let out = apply_element(&f, &Element::Imaging4f { f1: 0.25, f2: 0.5 }, LAMBDA).unwrap();
        assert!((out.axis().pitch() - 2.0 * axis.pitch()).abs() < 1e-18);
        assert!((out.norm() - f.norm()).abs() / f.norm() < 1e-12);
    }

    #[test]
    fn imaging_4f_rejects_unrepresentable_edge() {
        let axis = make_axis(8, 8e-3).unwrap();
        let f = ComplexField::from_fn(axis, |_| Complex64::new(1.0, 0.0));
        assert_eq!(
            apply_element(&f, &Element::Imaging4f { f1: 0.25, f2: 0.25 }, LAMBDA),
            Err(Error::OutputWindow)
        );
    }

    #[test]
    fn zero_focal_length_rejected() {
        let f = test_field(default_axis());
        for e in [
            Element::ThinLens { f: 0.0 },
            Element::FourierLens { f: 0.0 },
            Element::Imaging4f { f1: 0.0, f2: 0.25 },
        ] {
            assert_eq!(apply_element(&f, &e, LAMBDA), Err(Error::ZeroFocalLength));
        }
    }

    #[test]
    fn empty_system_is_identity() {
        let f = test_field(default_axis());
        assert_eq!(apply_system(&f, &OpticalSystem::identity(LAMBDA)).unwrap(), f);
    }

    #[test]
    fn system_is_composition() {
        let axis = default_axis();
        let f = test_field(axis);
        let mask = Element::Mask(double_slit(100e-6, 500e-6, axis).unwrap());
        let lens = Element::FourierLens { f: 0.5 };
        let sys = OpticalSystem::new(vec![mask.clone(), lens.clone()], LAMBDA);
        let direct = apply_element(&apply_element(&f, &mask, LAMBDA).unwrap(), &lens, LAMBDA).unwrap();
        assert_eq!(apply_system(&f, &sys).unwrap(), direct);
    }

    #[test]
    fn free_space_pair_is_identity() {
        let f = test_field(default_axis());
        let sys = OpticalSystem::new(
            vec![Element::FreeSpace { z: 0.2 }, Element::FreeSpace { z: -0.2 }],
            LAMBDA,
        );
        assert!(apply_system(&f, &sys).unwrap().relative_l2(&f).unwrap() < 1e-10);
    }

    #[test]
    fn adjoint_rules() {
        let sys = OpticalSystem::new(
            vec![Element::FreeSpace { z: 0.1 }, Element::ThinLens { f: 0.5 }],
            LAMBDA,
        );
        let adj = adjoint_system(&sys);
        assert_eq!(
            adj.elements,
            vec![Element::ThinLens { f: -0.5 }, Element::FreeSpace { z: -0.1 }]
        );
        assert_eq!(adjoint_system(&adj), sys);
    }

    #[test]
    fn adjoint_inverts_mask_free_systems() {
        let axis = default_axis();
        let f = test_field(axis);
        let sys = OpticalSystem::new(
            vec![
                Element::FreeSpace { z: 0.05 },
                Element::ThinLens { f: 0.5 },
                Element::FreeSpace { z: 0.1 },
                Element::FourierLens { f: 0.5 },
                Element::Imaging4f { f1: 0.25, f2: 0.5 },
            ],
            LAMBDA,
        );
        let there = apply_system(&f, &sys).unwrap();
        assert!((there.norm() - f.norm()).abs() / f.norm() < 1e-10);
        let back = apply_system(&there, &adjoint_system(&sys)).unwrap();
        assert!(back.axis().matches(&axis));
        assert!(back.relative_l2(&f).unwrap() < 1e-9);
    }
}
