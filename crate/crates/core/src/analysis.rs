//! Reductions of maps and frames to the numbers quoted for a double-slit
//! run: cross-sections, fringe period, visibility, widths and band
//! positions.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft::Radix2;
use crate::field::Axis;

/// A nonnegative 1D profile on a uniform grid starting at `origin`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    origin: f64,
    pitch: f64,
    values: Vec<f64>,
}

impl Profile {
    pub fn new(origin: f64, pitch: f64, values: Vec<f64>) -> Result<Self> {
        if !(pitch > 0.0 && pitch.is_finite()) || !origin.is_finite() {
            return Err(Error::NonPositive {
                name: "profile pitch",
                value: pitch,
            });
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidProfile);
        }
        Ok(Self {
            origin,
            pitch,
            values,
        })
    }

    pub fn on_axis(axis: &Axis, values: Vec<f64>) -> Result<Self> {
        if values.len() != axis.len() {
            return Err(Error::LengthMismatch {
                expected: axis.len(),
                found: values.len(),
            });
        }
        Self::new(axis.coordinate(0), axis.pitch(), values)
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        self.origin + j as f64 * self.pitch
    }

    pub fn coordinates(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |j| self.coordinate(j))
    }

    pub fn extent(&self) -> f64 {
        self.values.len() as f64 * self.pitch
    }

    /// `Σ v_j · pitch`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.pitch
    }

    /// Rescaled to unit integral.
    pub fn normalized(&self) -> Result<Profile> {
        let total = self.integral();
        if !(total > 0.0) {
            return Err(Error::ZeroMass);
        }
        Ok(Profile {
            origin: self.origin,
            pitch: self.pitch,
            values: self.values.iter().map(|v| v / total).collect(),
        })
    }

    /// Samples whose coordinate lies in `[lo, hi]`.
    pub fn crop(&self, lo: f64, hi: f64) -> Result<Profile> {
        let idx: Vec<usize> = (0..self.len())
            .filter(|&j| {
                let x = self.coordinate(j);
                x >= lo && x <= hi
            })
            .collect();
        let (Some(&first), Some(&last)) = (idx.first(), idx.last()) else {
            return Err(Error::EmptyBand);
        };
        Ok(Profile {
            origin: self.coordinate(first),
            pitch: self.pitch,
            values: self.values[first..=last].to_vec(),
        })
    }

    /// Integrates the profile (treated as piecewise constant over each
    /// sample cell) into `n` cells of width `cell` centred on zero.
    pub fn rebin_centered(&self, n: usize, cell: f64) -> Vec<f64> {
        let start = -(n as f64) * cell / 2.0;
        let mut out = alloc::vec![0.0; n];
        for (j, v) in self.values.iter().enumerate() {
            if *v == 0.0 {
                continue;
            }
            let a = self.coordinate(j) - self.pitch / 2.0;
            let b = a + self.pitch;
            let first = ((a - start) / cell).floor().max(0.0) as usize;
            let last = (((b - start) / cell).ceil().max(0.0) as usize).min(n);
            for (k, slot) in out.iter_mut().enumerate().take(last).skip(first) {
                let lo = start + k as f64 * cell;
                let overlap = (b.min(lo + cell) - a.max(lo)).max(0.0);
                *slot += v * overlap;
            }
        }
        out
    }
}

/// `‖a - b‖₂ / ‖b‖₂` for profiles on the same grid.
pub fn relative_l2(a: &Profile, b: &Profile) -> Result<f64> {
    if a.len() != b.len()
        || (a.pitch - b.pitch).abs() > 1e-9 * b.pitch
        || (a.origin - b.origin).abs() > 1e-6 * b.pitch
    {
        return Err(Error::AxisMismatch);
    }
    let diff: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - y) * (x - y)).sum();
    let base: f64 = b.values.iter().map(|y| y * y).sum();
    if !(base > 0.0) {
        return Err(Error::ZeroMass);
    }
    Ok((diff / base).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    X,
    Y,
}

/// A row-major 2D image (`rows = height`, `cols = width`) with square pixels
/// of side `pitch`, centred on zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pitch: f64,
    pub data: Vec<f64>,
}

impl Image {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.data[iy * self.width + ix]
    }
}

/// Sums `image` across a band of rows (`Direction::X`: profile along x over
/// rows `band`) or columns (`Direction::Y`).
pub fn cross_section(image: &Image, direction: Direction, band: (usize, usize)) -> Result<Profile> {
    let (lo, hi) = band;
    let across = match direction {
        Direction::X => image.height,
        Direction::Y => image.width,
    };
    if lo >= hi || hi > across {
        return Err(Error::EmptyBand);
    }
    let values: Vec<f64> = match direction {
        Direction::X => (0..image.width)
            .map(|ix| (lo..hi).map(|iy| image.at(ix, iy)).sum())
            .collect(),
        Direction::Y => (0..image.height)
            .map(|iy| (lo..hi).map(|ix| image.at(ix, iy)).sum())
            .collect(),
    };
    let n = values.len();
    let origin = -(n as f64) * image.pitch / 2.0 + image.pitch / 2.0;
    Profile::new(origin, image.pitch, values)
}

const FRINGE_PAD: usize = 8;
const FRINGE_FLOOR_RATIO: f64 = 3.0;

fn windowed_power(values: &[f64], offset: f64, padded: usize) -> Vec<f64> {
    let n = values.len();
    let mut data = alloc::vec![Complex64::new(0.0, 0.0); padded];
    for (j, v) in values.iter().enumerate() {
        let hann = 0.5 - 0.5 * (2.0 * core::f64::consts::PI * j as f64 / (n - 1) as f64).cos();
        data[j] = Complex64::new((v - offset) * hann, 0.0);
    }
    Radix2::new(padded).forward(&mut data);
    data[..padded / 2].iter().map(|v| v.norm_sqr()).collect()
}

/// Dominant fringe period of a profile.
///
/// The Hann-windowed, zero-padded power spectrum of the raw profile locates
/// the lobe around DC (mean plus slowly varying envelope), which ends at its
/// first local minimum. The strongest local maximum of the mean-removed
/// spectrum beyond that lobe is the fringe carrier; Gaussian (log-parabolic)
/// interpolation refines its position.
pub fn fringe_period(profile: &Profile) -> Result<f64> {
    let n = profile.len();
    if n < 8 {
        return Err(Error::NoFringe { ratio: 0.0 });
    }
    let padded = (n * FRINGE_PAD).next_power_of_two();
    let raw = windowed_power(&profile.values, 0.0, padded);
    let mean = profile.values.iter().sum::<f64>() / n as f64;
    let power = windowed_power(&profile.values, mean, padded);

    let mut start = 0;
    while start + 1 < raw.len() && raw[start + 1] <= raw[start] {
        start += 1;
    }
    let mut best: Option<usize> = None;
    for k in start.max(1)..power.len() - 1 {
        if power[k] > power[k - 1] && power[k] >= power[k + 1] && best.is_none_or(|b| power[k] > power[b]) {
            best = Some(k);
        }
    }
    let Some(k) = best else {
        return Err(Error::NoFringe { ratio: 0.0 });
    };
    // Round-off in a featureless profile is not a fringe.
    let energy: f64 = raw.iter().sum();
    if !(power[k] > 1e-20 * energy) {
        return Err(Error::NoFringe { ratio: 0.0 });
    }
    let mut sorted = power[1..].to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let ratio = if median > 0.0 { power[k] / median } else { f64::INFINITY };
    if ratio < FRINGE_FLOOR_RATIO {
        return Err(Error::NoFringe { ratio });
    }
    let (a, b, c) = (power[k - 1].ln(), power[k].ln(), power[k + 1].ln());
    let denom = a - 2.0 * b + c;
    let offset = if denom.abs() > 0.0 && denom.is_finite() {
        (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    let frequency = (k as f64 + offset) / (padded as f64 * profile.pitch);
    Ok(1.0 / frequency)
}

/// Natural spectral resolution of a profile: `1 / extent` in cycles/m.
pub fn spectral_bin(profile: &Profile) -> f64 {
    1.0 / profile.extent()
}

/// `(max - min) / (max + min)` over the central `window` fraction of the
/// profile's extent.
pub fn visibility(profile: &Profile, window: f64) -> Result<f64> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::BadWindow(window));
    }
    let centre = profile.coordinate(0) + (profile.len().saturating_sub(1)) as f64 * profile.pitch / 2.0;
    let half = window * profile.extent() / 2.0;
    let (mut max, mut min) = (f64::NEG_INFINITY, f64::INFINITY);
    for (x, v) in profile.coordinates().zip(&profile.values) {
        if (x - centre).abs() <= half + 1e-12 * profile.pitch {
            max = max.max(*v);
            min = min.min(*v);
        }
    }
    if !(max > 0.0) {
        return Err(Error::ZeroMass);
    }
    Ok((max - min) / (max + min))
}

pub fn centroid(profile: &Profile) -> Result<f64> {
    let total: f64 = profile.values.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroMass);
    }
    Ok(profile.coordinates().zip(&profile.values).map(|(x, v)| x * v).sum::<f64>() / total)
}

/// Standard deviation of the normalised profile about its centroid.
pub fn rms_width(profile: &Profile) -> Result<f64> {
    let mean = centroid(profile)?;
    let total: f64 = profile.values.iter().sum();
    let var = profile
        .coordinates()
        .zip(&profile.values)
        .map(|(x, v)| (x - mean) * (x - mean) * v)
        .sum::<f64>()
        / total;
    Ok(var.sqrt())
}

/// A contiguous region above threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    /// Interpolated threshold crossings.
    pub lo: f64,
    pub hi: f64,
    pub centre: f64,
    pub mass: f64,
}

impl Band {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Regions where the profile exceeds `fraction` of its maximum, with edges
/// located by linear interpolation between samples.
pub fn bands(profile: &Profile, fraction: f64) -> Result<Vec<Band>> {
    let max = profile.values.iter().copied().fold(0.0, f64::max);
    if !(max > 0.0) {
        return Err(Error::ZeroMass);
    }
    let level = fraction * max;
    let v = &profile.values;
    let crossing = |j: usize| {
        // Between j and j + 1.
        let t = (level - v[j]) / (v[j + 1] - v[j]);
        profile.coordinate(j) + t * profile.pitch
    };
    let mut out = Vec::new();
    let mut j = 0;
    while j < v.len() {
        if v[j] > level {
            let start = j;
            while j < v.len() && v[j] > level {
                j += 1;
            }
            let end = j - 1;
            let lo = if start == 0 { profile.coordinate(0) } else { crossing(start - 1) };
            let hi = if end + 1 == v.len() { profile.coordinate(end) } else { crossing(end) };
            let mass = v[start..=end].iter().sum::<f64>() * profile.pitch;
            out.push(Band {
                lo,
                hi,
                centre: 0.5 * (lo + hi),
                mass,
            });
        } else {
            j += 1;
        }
    }
    Ok(out)
}
