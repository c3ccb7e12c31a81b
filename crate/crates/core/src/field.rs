//! Periodic-box grids, complex fields and the Plancherel-normalized
//! spectral transform pair.
//!
//! The box is `[-L, L)^n` sampled on `N` points per dimension, so the
//! frequency lattice is `(pi/L) * {-N/2, ..., N/2-1}^n`. The transform is
//! normalized so that the `h^n`-weighted physical L2 norm equals the
//! `(pi/L)^n`-weighted frequency-side L2 norm.

use crate::error::{Error, Result};
use crate::fft;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which side of the transform the samples currently live on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Physical,
    Frequency,
}

/// Uniform periodic grid on `[-L, L)^n` with an even number of points per
/// dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    dim: usize,
    points_per_dim: usize,
    half_length: f64,
}

impl FrequencyGrid {
    pub fn new(dim: usize, points_per_dim: usize, half_length: f64) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(Error::InvalidParameter(format!(
                "grid dimension must be 1 or 2, got {dim}"
            )));
        }
        if points_per_dim < 4 || points_per_dim % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "points per dimension must be even and at least 4, got {points_per_dim}"
            )));
        }
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "half length must be positive, got {half_length}"
            )));
        }
        Ok(Self {
            dim,
            points_per_dim,
            half_length,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_dim(&self) -> usize {
        self.points_per_dim
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    /// Total number of samples, `N^n`.
    pub fn len(&self) -> usize {
        self.points_per_dim.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing `h = 2L/N`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.points_per_dim as f64
    }

    /// Frequency lattice spacing `pi/L`.
    pub fn freq_spacing(&self) -> f64 {
        PI / self.half_length
    }

    /// Largest resolvable frequency `(pi/L) * N/2`.
    pub fn nyquist(&self) -> f64 {
        self.freq_spacing() * self.points_per_dim as f64 / 2.0
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.points_per_dim; self.dim]
    }

    /// Integer wavenumber of a 1-d index in FFT storage order.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.points_per_dim;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Frequency component attached to a per-axis index.
    #[inline]
    pub fn freq_component(&self, i: usize) -> f64 {
        self.wavenumber(i) as f64 * self.freq_spacing()
    }

    /// Physical coordinate of a per-axis index, `x = -L + i h`.
    #[inline]
    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_length + i as f64 * self.spacing()
    }

    /// Split a flat row-major index into per-axis indices (second entry 0
    /// in one dimension).
    #[inline]
    pub fn index_pair(&self, flat: usize) -> (usize, usize) {
        if self.dim == 1 {
            (flat, 0)
        } else {
            (flat / self.points_per_dim, flat % self.points_per_dim)
        }
    }

    /// Frequency vector of a flat index; unused components are zero.
    #[inline]
    pub fn freq_vector(&self, flat: usize) -> [f64; 2] {
        let (i0, i1) = self.index_pair(flat);
        if self.dim == 1 {
            [self.freq_component(i0), 0.0]
        } else {
            [self.freq_component(i0), self.freq_component(i1)]
        }
    }

    /// Integer wavenumber vector of a flat index.
    #[inline]
    pub fn wavenumber_vector(&self, flat: usize) -> [i64; 2] {
        let (i0, i1) = self.index_pair(flat);
        if self.dim == 1 {
            [self.wavenumber(i0), 0]
        } else {
            [self.wavenumber(i0), self.wavenumber(i1)]
        }
    }

    /// Physical coordinate vector of a flat index.
    #[inline]
    pub fn coordinate_vector(&self, flat: usize) -> [f64; 2] {
        let (i0, i1) = self.index_pair(flat);
        if self.dim == 1 {
            [self.coordinate(i0), 0.0]
        } else {
            [self.coordinate(i0), self.coordinate(i1)]
        }
    }

    /// Flat index of an integer wavenumber vector, if it is on the lattice.
    pub fn index_of_wavenumber(&self, k: [i64; 2]) -> Option<usize> {
        let n = self.points_per_dim as i64;
        let to_idx = |w: i64| -> Option<usize> {
            if w >= -n / 2 && w < n / 2 {
                Some(if w >= 0 { w as usize } else { (w + n) as usize })
            } else {
                None
            }
        };
        let i0 = to_idx(k[0])?;
        if self.dim == 1 {
            (k[1] == 0).then_some(i0)
        } else {
            let i1 = to_idx(k[1])?;
            Some(i0 * self.points_per_dim + i1)
        }
    }
}

/// The sign vector selecting the elliptic or non-elliptic Laplacian.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignSignature(Vec<i8>);

impl SignSignature {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() || signs.len() > 2 {
            return Err(Error::InvalidParameter(format!(
                "signature length must be 1 or 2, got {}",
                signs.len()
            )));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter(format!(
                "signature entries must be +1 or -1, got {signs:?}"
            )));
        }
        Ok(Self(signs))
    }

    /// All-plus signature of the given dimension.
    pub fn elliptic(dim: usize) -> Self {
        Self(vec![1; dim])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }
}

/// Complex samples on a grid, tagged with their representation.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: FrequencyGrid,
    rep: Representation,
    values: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &FrequencyGrid, rep: Representation) -> Self {
        Self {
            grid: grid.clone(),
            rep,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_values(
        grid: &FrequencyGrid,
        rep: Representation,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} values for the grid, got {}",
                grid.len(),
                values.len()
            )));
        }
        let field = Self {
            grid: grid.clone(),
            rep,
            values,
        };
        if !field.is_finite() {
            return Err(Error::NonFinite {
                context: "field construction".into(),
            });
        }
        Ok(field)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        self.rep
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    fn expect_rep(&self, expected: Representation) -> Result<()> {
        if self.rep != expected {
            return Err(Error::WrongRepresentation {
                expected,
                found: self.rep,
            });
        }
        Ok(())
    }

    /// Forward transform, physical to frequency. Plancherel-normalized so
    /// the weighted L2 norms on both sides agree.
    pub fn forward(&self) -> Result<SpectralField> {
        self.expect_rep(Representation::Physical)?;
        let mut values = self.values.clone();
        fft::dft_nd(&mut values, &self.grid.shape(), false);
        let scale = (self.grid.spacing() / (2.0 * PI).sqrt()).powi(self.grid.dim as i32);
        apply_checkerboard_scale(&mut values, &self.grid, scale);
        Ok(SpectralField {
            grid: self.grid.clone(),
            rep: Representation::Frequency,
            values,
        })
    }

    /// Inverse transform, frequency to physical.
    pub fn inverse(&self) -> Result<SpectralField> {
        self.expect_rep(Representation::Frequency)?;
        let mut values = self.values.clone();
        let scale = (self.grid.freq_spacing() / (2.0 * PI).sqrt()).powi(self.grid.dim as i32);
        apply_checkerboard_scale(&mut values, &self.grid, scale);
        fft::dft_nd(&mut values, &self.grid.shape(), true);
        Ok(SpectralField {
            grid: self.grid.clone(),
            rep: Representation::Physical,
            values,
        })
    }

    /// The field in frequency representation, transforming if needed.
    pub fn to_frequency(&self) -> Result<SpectralField> {
        match self.rep {
            Representation::Frequency => Ok(self.clone()),
            Representation::Physical => self.forward(),
        }
    }

    /// The field in physical representation, transforming if needed.
    pub fn to_physical(&self) -> Result<SpectralField> {
        match self.rep {
            Representation::Physical => Ok(self.clone()),
            Representation::Frequency => self.inverse(),
        }
    }

    /// Spectral derivative along one axis. The Nyquist row is zeroed so
    /// derivatives of real fields stay conjugate-symmetric. The result is
    /// returned in the representation of the input.
    pub fn derivative(&self, axis: usize) -> Result<SpectralField> {
        if axis >= self.grid.dim {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: self.grid.dim,
            });
        }
        let mut hat = self.to_frequency()?;
        let n = self.grid.points_per_dim;
        for (flat, v) in hat.values.iter_mut().enumerate() {
            let (i0, i1) = self.grid.index_pair(flat);
            let i = if axis == 0 { i0 } else { i1 };
            if i == n / 2 {
                *v = Complex64::new(0.0, 0.0);
            } else {
                let xi = self.grid.freq_component(i);
                *v *= Complex64::new(0.0, xi);
            }
        }
        match self.rep {
            Representation::Frequency => Ok(hat),
            Representation::Physical => hat.inverse(),
        }
    }

    /// Weighted L2 norm in the current representation.
    pub fn l2_norm(&self) -> f64 {
        let weight = match self.rep {
            Representation::Physical => self.grid.spacing(),
            Representation::Frequency => self.grid.freq_spacing(),
        };
        let sum: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (sum * weight.powi(self.grid.dim as i32)).sqrt()
    }

    /// Maximum modulus over the samples.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn conj(&self) -> SpectralField {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v = v.conj();
        }
        out
    }

    pub fn scaled(&self, c: Complex64) -> SpectralField {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v *= c;
        }
        out
    }

    /// `self += c * other`; grids and representations must match.
    pub fn axpy(&mut self, c: Complex64, other: &SpectralField) {
        assert_eq!(self.grid, other.grid, "axpy on mismatched grids");
        assert_eq!(self.rep, other.rep, "axpy on mismatched representations");
        for (a, b) in self.values.iter_mut().zip(other.values.iter()) {
            *a += c * b;
        }
    }
}

impl std::ops::Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), rhs);
        out
    }
}

impl std::ops::Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), rhs);
        out
    }
}

fn apply_checkerboard_scale(values: &mut [Complex64], grid: &FrequencyGrid, scale: f64) {
    for (flat, v) in values.iter_mut().enumerate() {
        let (i0, i1) = grid.index_pair(flat);
        let sign = if (i0 + i1) % 2 == 0 { 1.0 } else { -1.0 };
        *v *= sign * scale;
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

/// Per-mode stream seed. Fields built from the same base seed agree mode
/// for mode across grids of different size, so a resolution doubling
/// extends a field instead of redrawing it.
fn mode_seed(seed: u64, k: [i64; 2]) -> u64 {
    let z = |w: i64| -> u64 {
        // zigzag map to keep negative wavenumbers distinct
        ((w << 1) ^ (w >> 63)) as u64
    };
    splitmix64(splitmix64(seed ^ splitmix64(z(k[0]))) ^ splitmix64(z(k[1]).wrapping_add(0x5851)))
}

/// Seeded complex Gaussian field in frequency space with amplitude envelope
/// `<xi>^(-decay)`, truncated to `|xi| <= band`.
pub fn random_band_limited(
    grid: &FrequencyGrid,
    seed: u64,
    band: f64,
    decay: f64,
) -> Result<SpectralField> {
    if band > grid.nyquist() + 1e-12 {
        return Err(Error::BandExceedsNyquist {
            band,
            nyquist: grid.nyquist(),
        });
    }
    let mut out = SpectralField::zeros(grid, Representation::Frequency);
    for flat in 0..grid.len() {
        let xi = grid.freq_vector(flat);
        let r2 = xi[0] * xi[0] + xi[1] * xi[1];
        if r2.sqrt() > band {
            continue;
        }
        let k = grid.wavenumber_vector(flat);
        let mut rng = ChaCha8Rng::seed_from_u64(mode_seed(seed, k));
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let envelope = (1.0 + r2).powf(-decay / 2.0);
        out.values_mut()[flat] = Complex64::new(re, im) * envelope;
    }
    Ok(out)
}

/// Samples of `exp(i xi0 . x) exp(-|x - x0|^2 / (2 sigma^2))`.
pub fn gaussian_packet(
    grid: &FrequencyGrid,
    center: &[f64],
    sigma: f64,
    carrier: &[f64],
) -> Result<SpectralField> {
    if center.len() != grid.dim() || carrier.len() != grid.dim() {
        return Err(Error::InvalidParameter(format!(
            "center/carrier length must equal the grid dimension {}",
            grid.dim()
        )));
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "packet width must be positive, got {sigma}"
        )));
    }
    if sigma > grid.half_length() / 4.0 {
        log::warn!(
            "gaussian packet width {sigma} exceeds L/4 = {}; periodization error may be visible",
            grid.half_length() / 4.0
        );
    }
    let mut out = SpectralField::zeros(grid, Representation::Physical);
    for flat in 0..grid.len() {
        let x = grid.coordinate_vector(flat);
        let mut quad = 0.0;
        let mut phase = 0.0;
        for a in 0..grid.dim() {
            let d = x[a] - center[a];
            quad += d * d;
            phase += carrier[a] * x[a];
        }
        out.values_mut()[flat] =
            Complex64::new(0.0, phase).exp() * (-quad / (2.0 * sigma * sigma)).exp();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_1d() -> FrequencyGrid {
        FrequencyGrid::new(1, 64, 8.0 * PI).unwrap()
    }

    #[test]
    fn constant_field_transforms_to_single_mode() {
        let grid = grid_1d();
        let c = Complex64::new(1.3, -0.4);
        let f = SpectralField::from_values(
            &grid,
            Representation::Physical,
            vec![c; grid.len()],
        )
        .unwrap();
        let hat = f.forward().unwrap();
        for (i, v) in hat.values().iter().enumerate() {
            if i == 0 {
                assert!(v.norm() > 1.0);
            } else {
                assert!(v.norm() < 1e-12 * c.norm(), "mode {i} leaked: {v}");
            }
        }
    }

    #[test]
    fn pure_mode_transforms_to_single_coefficient() {
        let grid = grid_1d();
        let xi0 = 3.0 * grid.freq_spacing();
        let mut f = SpectralField::zeros(&grid, Representation::Physical);
        for i in 0..grid.len() {
            let x = grid.coordinate(i);
            f.values_mut()[i] = Complex64::new(0.0, xi0 * x).exp();
        }
        let hat = f.forward().unwrap();
        let hit = grid.index_of_wavenumber([3, 0]).unwrap();
        for (i, v) in hat.values().iter().enumerate() {
            if i == hit {
                assert!(v.norm() > 1.0);
                // the coefficient itself must be real positive in this convention
                assert!(v.im.abs() < 1e-10 * v.re);
            } else {
                assert!(v.norm() < 1e-10, "mode {i} leaked: {v}");
            }
        }
    }

    #[test]
    fn plancherel_and_round_trip() {
        let grid = FrequencyGrid::new(2, 32, 4.0 * PI).unwrap();
        let f = random_band_limited(&grid, 7, grid.nyquist() / 2.0, 1.0)
            .unwrap()
            .inverse()
            .unwrap();
        let hat = f.forward().unwrap();
        let a = f.l2_norm();
        let b = hat.l2_norm();
        assert!((a - b).abs() <= 1e-12 * a, "plancherel defect {}", (a - b).abs() / a);
        let back = hat.inverse().unwrap();
        let diff: f64 = f
            .values()
            .iter()
            .zip(back.values())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff <= 1e-12 * a, "round trip defect {diff}");
    }

    #[test]
    fn zero_field_round_trips_to_zero() {
        let grid = grid_1d();
        let z = SpectralField::zeros(&grid, Representation::Frequency);
        let phys = z.inverse().unwrap();
        assert_eq!(phys.sup_norm(), 0.0);
    }

    #[test]
    fn derivative_of_lattice_modes_is_exact() {
        let grid = grid_1d();
        // d/dx e^{ix} = i e^{ix}; xi = 1 is on the lattice for L = 8 pi
        let mut f = SpectralField::zeros(&grid, Representation::Physical);
        for i in 0..grid.len() {
            let x = grid.coordinate(i);
            f.values_mut()[i] = Complex64::new(0.0, x).exp();
        }
        let df = f.derivative(0).unwrap();
        for (v, w) in f.values().iter().zip(df.values()) {
            let expect = Complex64::new(0.0, 1.0) * v;
            assert!((w - expect).norm() < 1e-10);
        }

        // derivative of a constant vanishes
        let c = SpectralField::from_values(
            &grid,
            Representation::Physical,
            vec![Complex64::new(2.0, 1.0); grid.len()],
        )
        .unwrap();
        assert!(c.derivative(0).unwrap().sup_norm() < 1e-12);

        // d/dx sin(2x) = 2 cos(2x)
        let mut s = SpectralField::zeros(&grid, Representation::Physical);
        for i in 0..grid.len() {
            let x = grid.coordinate(i);
            s.values_mut()[i] = Complex64::new((2.0 * x).sin(), 0.0);
        }
        let ds = s.derivative(0).unwrap();
        for i in 0..grid.len() {
            let x = grid.coordinate(i);
            assert!((ds.values()[i].re - 2.0 * (2.0 * x).cos()).abs() <= 1e-10);
            assert!(ds.values()[i].im.abs() <= 1e-10);
        }
    }

    #[test]
    fn derivative_axis_out_of_range_errors() {
        let grid = grid_1d();
        let f = SpectralField::zeros(&grid, Representation::Physical);
        assert!(matches!(
            f.derivative(1),
            Err(Error::AxisOutOfRange { axis: 1, dim: 1 })
        ));
    }

    #[test]
    fn wrong_representation_is_rejected() {
        let grid = grid_1d();
        let f = SpectralField::zeros(&grid, Representation::Frequency);
        assert!(matches!(
            f.forward(),
            Err(Error::WrongRepresentation { .. })
        ));
        let g = SpectralField::zeros(&grid, Representation::Physical);
        assert!(matches!(
            g.inverse(),
            Err(Error::WrongRepresentation { .. })
        ));
    }

    #[test]
    fn random_band_limited_is_reproducible_and_banded() {
        let grid = grid_1d();
        let band = grid.nyquist() / 2.0;
        let a = random_band_limited(&grid, 42, band, 0.0).unwrap();
        let b = random_band_limited(&grid, 42, band, 0.0).unwrap();
        assert_eq!(a.values(), b.values());
        for flat in 0..grid.len() {
            let xi = grid.freq_vector(flat);
            if xi[0].abs() > band {
                assert_eq!(a.values()[flat], Complex64::new(0.0, 0.0));
            }
        }
        let c = random_band_limited(&grid, 43, band, 0.0).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn random_band_limited_rejects_band_beyond_nyquist() {
        let grid = grid_1d();
        assert!(matches!(
            random_band_limited(&grid, 1, grid.nyquist() * 2.0, 0.0),
            Err(Error::BandExceedsNyquist { .. })
        ));
    }

    #[test]
    fn random_band_limited_nests_across_resolution_doubling() {
        let coarse = FrequencyGrid::new(1, 64, 8.0 * PI).unwrap();
        let fine = FrequencyGrid::new(1, 128, 8.0 * PI).unwrap();
        let band = coarse.nyquist() / 2.0;
        let a = random_band_limited(&coarse, 9, band, 1.0).unwrap();
        let b = random_band_limited(&fine, 9, band, 1.0).unwrap();
        for flat in 0..coarse.len() {
            let k = coarse.wavenumber_vector(flat);
            let other = fine.index_of_wavenumber(k).unwrap();
            assert_eq!(a.values()[flat], b.values()[other]);
        }
    }

    #[test]
    fn random_band_limited_mean_energy_matches_envelope_sum() {
        // independent oracle: E ||f||_2^2 = 2 sum_{|xi|<=band} <xi>^{-2 decay} dxi^n
        let grid = grid_1d();
        let band = grid.nyquist() / 2.0;
        let decay = 1.0;
        let dxi = grid.freq_spacing();
        let mut expected = 0.0;
        for flat in 0..grid.len() {
            let xi = grid.freq_vector(flat);
            let r2 = xi[0] * xi[0];
            if r2.sqrt() <= band {
                expected += 2.0 * (1.0 + r2).powf(-decay) * dxi;
            }
        }
        let mut mean = 0.0;
        let trials = 100;
        for seed in 0..trials {
            let f = random_band_limited(&grid, seed, band, decay).unwrap();
            mean += f.l2_norm().powi(2);
        }
        mean /= trials as f64;
        assert!(
            (mean - expected).abs() <= 0.1 * expected,
            "mean energy {mean} vs envelope sum {expected}"
        );
    }

    #[test]
    fn gaussian_packet_mass_matches_quadrature() {
        let grid = FrequencyGrid::new(2, 64, 8.0 * PI).unwrap();
        let sigma = grid.half_length() / 10.0;
        let f = gaussian_packet(&grid, &[0.0, 0.0], sigma, &[0.0, 0.0]).unwrap();
        let expected = (PI * sigma * sigma).powf(grid.dim() as f64 / 2.0);
        let mass = f.l2_norm().powi(2);
        assert!(
            (mass - expected).abs() <= 1e-6 * expected,
            "mass {mass} vs {expected}"
        );

        // zero carrier, centered: real, positive, even
        for flat in 0..grid.len() {
            let v = f.values()[flat];
            assert!(v.im.abs() < 1e-14 && v.re > 0.0);
        }
    }

    #[test]
    fn gaussian_packet_spectrum_peaks_at_carrier() {
        let grid = grid_1d();
        let xi0 = 2.0;
        let f = gaussian_packet(&grid, &[0.0], 2.0, &[xi0]).unwrap();
        let hat = f.forward().unwrap();
        let mut best = (0usize, 0.0f64);
        for (i, v) in hat.values().iter().enumerate() {
            if v.norm() > best.1 {
                best = (i, v.norm());
            }
        }
        let peak = grid.freq_component(best.0);
        assert!((peak - xi0).abs() <= grid.freq_spacing() + 1e-12);
    }
}
