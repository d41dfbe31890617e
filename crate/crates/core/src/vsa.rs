//! Hypervector algebra: Gaussian sampling, circular-convolution binding,
//! additive bundling, Fourier-domain inverses and cosine similarity.
//!
//! Binding runs in the frequency domain (`O(d log d)`). FFT plans are cached
//! in a per-thread planner, so every operation here is safe to call from many
//! threads at once.

use std::cell::RefCell;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Spectral magnitudes below this are clamped before reciprocation.
pub const DEFAULT_INVERSE_FLOOR: f64 = 1e-8;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let plan = PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        if inverse {
            planner.plan_fft_inverse(buf.len())
        } else {
            planner.plan_fft_forward(buf.len())
        }
    });
    plan.process(buf);
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDimension(d))
    } else {
        Ok(())
    }
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: a, right: b })
    }
}

/// A dense real hypervector of dimension `d >= 2`.
#[derive(Clone, PartialEq)]
pub struct HyperVector {
    data: Vec<f64>,
}

impl fmt::Debug for HyperVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<_> = self.data.iter().take(4).collect();
        write!(f, "HyperVector(d={}, {:?}..)", self.data.len(), head)
    }
}

impl HyperVector {
    /// Wraps raw entries, rejecting short or non-finite input.
    pub fn new(data: Vec<f64>) -> Result<Self> {
        check_dim(data.len())?;
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("entry {pos} is not finite")));
        }
        Ok(Self { data })
    }

    pub(crate) fn from_vec_unchecked(data: Vec<f64>) -> Self {
        debug_assert!(data.len() >= 2);
        debug_assert!(data.iter().all(|x| x.is_finite()));
        Self { data }
    }

    pub fn zeros(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Self { data: vec![0.0; d] })
    }

    /// The multiplicative unit of binding: the delta vector `(1, 0, .., 0)`.
    pub fn identity(d: usize) -> Result<Self> {
        check_dim(d)?;
        let mut data = vec![0.0; d];
        data[0] = 1.0;
        Ok(Self { data })
    }

    /// I.i.d. `N(0, 1/d)` entries, so the expected squared norm is 1.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Self> {
        check_dim(d)?;
        let normal =
            Normal::new(0.0, (1.0 / d as f64).sqrt()).map_err(|e| Error::invalid(e.to_string()))?;
        let data = (0..d).map(|_| normal.sample(rng)).collect();
        Ok(Self { data })
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        same_dim(self.dim(), other.dim())?;
        Ok(dot(&self.data, &other.data))
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.data, &self.data)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Circular convolution.
    pub fn bind(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        Ok(self.spectrum().mul(&other.spectrum()).to_vector())
    }

    /// Entrywise sum. No renormalization.
    pub fn bundle(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { data })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    /// Inverse with the default spectral floor.
    pub fn inverse(&self) -> Self {
        self.inverse_with_floor(DEFAULT_INVERSE_FLOOR).vector
    }

    /// Fourier-domain reciprocal. Bins whose magnitude falls below `floor`
    /// are raised to `floor` (phase kept) first; the returned flag records
    /// whether that happened.
    pub fn inverse_with_floor(&self, floor: f64) -> Inverse {
        let (spec, clamped) = self.spectrum().reciprocal(floor);
        Inverse {
            vector: spec.to_vector(),
            clamped,
        }
    }

    pub fn cosine(&self, other: &Self) -> Result<f64> {
        same_dim(self.dim(), other.dim())?;
        let na = self.norm();
        let nb = other.norm();
        if na == 0.0 || nb == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok((dot(&self.data, &other.data) / (na * nb)).clamp(-1.0, 1.0))
    }

    /// Projects every Fourier bin onto the unit circle. The result binds
    /// isometrically, and its exact inverse equals its involution.
    pub fn to_unitary(&self) -> Self {
        let mut spec = self.spectrum();
        for bin in &mut spec.bins {
            let mag = bin.norm();
            *bin = if mag > 0.0 {
                *bin / mag
            } else {
                Complex64::new(1.0, 0.0)
            };
        }
        spec.to_vector()
    }

    /// The involution `a*[k] = a[-k mod d]`, the classic approximate inverse.
    pub fn involution(&self) -> Self {
        let d = self.dim();
        let data = (0..d).map(|k| self.data[(d - k) % d]).collect();
        Self { data }
    }

    pub fn spectrum(&self) -> Spectrum {
        let mut bins: Vec<Complex64> = self.data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft_in_place(&mut bins, false);
        Spectrum { bins }
    }
}

/// Result of [`HyperVector::inverse_with_floor`].
#[derive(Debug, Clone)]
pub struct Inverse {
    pub vector: HyperVector,
    pub clamped: bool,
}

/// Fourier transform of a real hypervector. Lets callers reuse transforms
/// when the same vector takes part in many bindings.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    bins: Vec<Complex64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.bins.len()
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    /// Pointwise product, i.e. binding in the frequency domain.
    pub fn mul(&self, other: &Spectrum) -> Spectrum {
        debug_assert_eq!(self.dim(), other.dim());
        Spectrum {
            bins: self
                .bins
                .iter()
                .zip(&other.bins)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Spectrum) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
    }

    /// Componentwise reciprocal with magnitude floor.
    pub fn reciprocal(&self, floor: f64) -> (Spectrum, bool) {
        let mut clamped = false;
        let bins = self
            .bins
            .iter()
            .map(|&z| {
                let mag = z.norm();
                let z = if mag < floor {
                    clamped = true;
                    if mag > 0.0 {
                        z * (floor / mag)
                    } else {
                        Complex64::new(floor, 0.0)
                    }
                } else {
                    z
                };
                z.inv()
            })
            .collect();
        (Spectrum { bins }, clamped)
    }

    /// Back to the time domain. Imaginary residue from roundoff is dropped.
    pub fn to_vector(&self) -> HyperVector {
        let mut buf = self.bins.clone();
        fft_in_place(&mut buf, true);
        let scale = 1.0 / buf.len() as f64;
        HyperVector::from_vec_unchecked(buf.iter().map(|z| z.re * scale).collect())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Sums terms by recursive halving, so rounding error grows like `log n`
/// and the result depends only on the order of `terms`.
pub fn bundle_all(terms: &[HyperVector]) -> Result<HyperVector> {
    match terms {
        [] => Err(Error::invalid("cannot bundle an empty list")),
        [one] => Ok(one.clone()),
        _ => {
            let (left, right) = terms.split_at(terms.len() / 2);
            bundle_all(left)?.bundle(&bundle_all(right)?)
        }
    }
}

pub fn random_hypervector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<HyperVector> {
    HyperVector::random(d, rng)
}

pub fn bind(a: &HyperVector, b: &HyperVector) -> Result<HyperVector> {
    a.bind(b)
}

pub fn bundle(a: &HyperVector, b: &HyperVector) -> Result<HyperVector> {
    a.bundle(b)
}

pub fn inverse(a: &HyperVector, floor: f64) -> Inverse {
    a.inverse_with_floor(floor)
}

pub fn identity(d: usize) -> Result<HyperVector> {
    HyperVector::identity(d)
}

pub fn cosine(a: &HyperVector, b: &HyperVector) -> Result<f64> {
    a.cosine(b)
}
