//! Frequency decompositions: the radial cutoff, inhomogeneous and
//! homogeneous dyadic blocks, frequency-uniform blocks, and partial sums.
//!
//! The cutoff is the mollifier step `psi(r) = g(2-|r|) / (g(2-|r|) + g(|r|-1))`
//! with `g(x) = exp(-1/x)` for `x > 0`, so `psi = 1` on `|r| <= 1` and
//! `psi = 0` on `|r| >= 2`. Dyadic multipliers telescope exactly in
//! floating point because scaling by powers of two is exact.

use crate::error::{Error, Result};
use crate::field::{FrequencyGrid, SpectralField};
use serde::{Deserialize, Serialize};

fn mollifier(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth monotone step: 1 for `u <= 0`, 0 for `u >= 1`.
fn smooth_step_down(u: f64) -> f64 {
    if u <= 0.0 {
        1.0
    } else if u >= 1.0 {
        0.0
    } else {
        let a = mollifier(1.0 - u);
        a / (a + mollifier(u))
    }
}

/// Radial bump adapted to the ball of radius 2: equals 1 on `|r| <= 1`,
/// vanishes on `|r| >= 2`.
pub fn bump_psi(r: f64) -> f64 {
    smooth_step_down(r.abs() - 1.0)
}

/// `delta(r) = psi(r) - psi(2r)`, the dyadic shell profile.
fn shell(r: f64) -> f64 {
    bump_psi(r) - bump_psi(2.0 * r)
}

/// Radial bump for the uniform decomposition in dimension `n`: equals 1 on
/// `|r| <= sqrt(n)/2`, vanishes on `|r| >= sqrt(n)`.
fn uniform_bump(r: f64, dim: usize) -> f64 {
    let b = (dim as f64).sqrt();
    let a = b / 2.0;
    smooth_step_down((r.abs() - a) / (b - a))
}

/// Inhomogeneous dyadic multiplier: `phi_0 = psi(|xi|)` and
/// `phi_j = delta(2^-j |xi|)` for `j >= 1`.
pub fn dyadic_multiplier(j: u32, xi: &[f64]) -> f64 {
    let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    if j == 0 {
        bump_psi(r)
    } else {
        shell(r * 0.5f64.powi(j as i32))
    }
}

/// Homogeneous dyadic multiplier `delta(2^-j |xi|)`, defined for all
/// integer `j`.
pub fn homogeneous_dyadic_multiplier(j: i32, xi: &[f64]) -> f64 {
    let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    shell(r * 2.0f64.powi(-j))
}

/// Normalized uniform multiplier `sigma_k(xi) = rho(xi - k) / sum_l rho(xi - l)`.
/// Computed from the shifted argument, so translation covariance
/// `sigma_k(xi + k) = sigma_0(xi)` holds bit for bit.
pub fn uniform_multiplier(k: &[i64], xi: &[f64]) -> f64 {
    debug_assert_eq!(k.len(), xi.len());
    let dim = xi.len();
    let root_n = (dim as f64).sqrt();
    let mut r = [0.0f64; 2];
    for a in 0..dim {
        r[a] = xi[a] - k[a] as f64;
    }
    let dist = r[..dim].iter().map(|x| x * x).sum::<f64>().sqrt();
    if dist >= root_n {
        return 0.0;
    }
    let numer = uniform_bump(dist, dim);
    let mut denom = 0.0;
    let lo: Vec<i64> = (0..dim).map(|a| (r[a] - root_n).ceil() as i64).collect();
    let hi: Vec<i64> = (0..dim).map(|a| (r[a] + root_n).floor() as i64).collect();
    let mut ell = lo.clone();
    loop {
        let mut d2 = 0.0;
        for a in 0..dim {
            let d = r[a] - ell[a] as f64;
            d2 += d * d;
        }
        denom += uniform_bump(d2.sqrt(), dim);
        // advance the multi-index
        let mut axis = dim;
        loop {
            if axis == 0 {
                return numer / denom;
            }
            axis -= 1;
            ell[axis] += 1;
            if ell[axis] <= hi[axis] {
                break;
            }
            ell[axis] = lo[axis];
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BankKind {
    Dyadic,
    HomogeneousDyadic,
    Uniform,
}

/// Index label of one block in a bank.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockLabel {
    Dyadic(i32),
    Uniform([i64; 2]),
}

enum Blocks {
    Dense(Vec<Vec<f64>>),
    Sparse(Vec<Vec<(u32, f64)>>),
}

/// Precomputed multiplier arrays for a family of blocks on one grid.
pub struct DecompositionBank {
    grid: FrequencyGrid,
    kind: BankKind,
    labels: Vec<BlockLabel>,
    blocks: Blocks,
}

impl DecompositionBank {
    /// Inhomogeneous dyadic bank, `j` from 0 through `ceil(log2 Nyquist) + 1`.
    /// Sums to 1 on the whole lattice.
    pub fn dyadic(grid: &FrequencyGrid) -> Self {
        let j_max = (grid.nyquist().log2().ceil() as i32 + 1).max(1);
        let mut labels = Vec::new();
        let mut dense = Vec::new();
        for j in 0..=j_max {
            let mut arr = vec![0.0f64; grid.len()];
            for (flat, slot) in arr.iter_mut().enumerate() {
                let xi = grid.freq_vector(flat);
                *slot = dyadic_multiplier(j as u32, &xi[..grid.dim()]);
            }
            labels.push(BlockLabel::Dyadic(j));
            dense.push(arr);
        }
        Self {
            grid: grid.clone(),
            kind: BankKind::Dyadic,
            labels,
            blocks: Blocks::Dense(dense),
        }
    }

    /// Homogeneous dyadic bank over `j` in `[j_min, j_max]`, covering every
    /// nonzero lattice frequency; the zero mode is outside every block.
    /// One-dimensional grids only.
    pub fn homogeneous_1d(grid: &FrequencyGrid) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::InvalidParameter(
                "homogeneous dyadic bank is one-dimensional".into(),
            ));
        }
        let j_min = grid.freq_spacing().log2().floor() as i32;
        let j_max = (grid.nyquist().log2().ceil() as i32 + 1).max(j_min + 1);
        let mut labels = Vec::new();
        let mut dense = Vec::new();
        for j in j_min..=j_max {
            let mut arr = vec![0.0f64; grid.len()];
            for (flat, slot) in arr.iter_mut().enumerate() {
                let xi = grid.freq_vector(flat);
                *slot = homogeneous_dyadic_multiplier(j, &xi[..1]);
            }
            labels.push(BlockLabel::Dyadic(j));
            dense.push(arr);
        }
        Ok(Self {
            grid: grid.clone(),
            kind: BankKind::HomogeneousDyadic,
            labels,
            blocks: Blocks::Dense(dense),
        })
    }

    /// Uniform bank over the integer window `[-K, K]^n` with
    /// `K = ceil(Nyquist) + 1`; blocks are stored sparsely on their support.
    pub fn uniform(grid: &FrequencyGrid) -> Self {
        let k_max = grid.nyquist().ceil() as i64 + 1;
        let dim = grid.dim();
        let root_n = (dim as f64).sqrt();
        let dxi = grid.freq_spacing();
        let n = grid.points_per_dim() as i64;
        let mut labels = Vec::new();
        let mut sparse = Vec::new();
        let k_range: Vec<i64> = (-k_max..=k_max).collect();
        let second: Vec<i64> = if dim == 2 { k_range.clone() } else { vec![0] };
        for &k0 in &k_range {
            for &k1 in &second {
                let k = [k0, k1];
                let mut entries: Vec<(u32, f64)> = Vec::new();
                // lattice window covering the support |xi - k| < sqrt(n)
                let w_lo = |c: i64| (((c as f64 - root_n) / dxi).ceil() as i64).max(-n / 2);
                let w_hi = |c: i64| (((c as f64 + root_n) / dxi).floor() as i64).min(n / 2 - 1);
                let (lo0, hi0) = (w_lo(k0), w_hi(k0));
                let (lo1, hi1) = if dim == 2 {
                    (w_lo(k1), w_hi(k1))
                } else {
                    (0, 0)
                };
                for w0 in lo0..=hi0 {
                    for w1 in lo1..=hi1 {
                        if let Some(flat) = grid.index_of_wavenumber([w0, w1]) {
                            let xi = grid.freq_vector(flat);
                            let value = uniform_multiplier(&k[..dim], &xi[..dim]);
                            if value > 0.0 {
                                entries.push((flat as u32, value));
                            }
                        }
                    }
                }
                labels.push(BlockLabel::Uniform(k));
                sparse.push(entries);
            }
        }
        Self {
            grid: grid.clone(),
            kind: BankKind::Uniform,
            labels,
            blocks: Blocks::Sparse(sparse),
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn kind(&self) -> BankKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, index: usize) -> BlockLabel {
        self.labels[index]
    }

    /// Position of a dyadic index or uniform lattice point in the bank.
    pub fn position_of(&self, label: BlockLabel) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Multiplier weight of one block at a flat lattice index.
    pub fn weight(&self, index: usize, flat: usize) -> f64 {
        match &self.blocks {
            Blocks::Dense(arrs) => arrs[index][flat],
            Blocks::Sparse(entries) => entries[index]
                .iter()
                .find(|(f, _)| *f as usize == flat)
                .map(|(_, w)| *w)
                .unwrap_or(0.0),
        }
    }

    /// Sparse support of a block: `(flat index, weight)` pairs. Only
    /// uniform banks are stored sparsely.
    pub fn sparse_support(&self, index: usize) -> Option<&[(u32, f64)]> {
        match &self.blocks {
            Blocks::Sparse(entries) => Some(&entries[index]),
            Blocks::Dense(_) => None,
        }
    }

    /// True when the block multiplier is identically zero on the lattice.
    pub fn block_is_empty(&self, index: usize) -> bool {
        match &self.blocks {
            Blocks::Dense(arrs) => arrs[index].iter().all(|&w| w == 0.0),
            Blocks::Sparse(entries) => entries[index].is_empty(),
        }
    }

    /// Apply one block to a frequency-side coefficient array in place.
    pub(crate) fn apply_hat_inplace(&self, index: usize, values: &mut [num_complex::Complex64]) {
        match &self.blocks {
            Blocks::Dense(arrs) => {
                for (v, &w) in values.iter_mut().zip(&arrs[index]) {
                    *v *= w;
                }
            }
            Blocks::Sparse(entries) => {
                let mut out = vec![num_complex::Complex64::new(0.0, 0.0); values.len()];
                for &(flat, w) in &entries[index] {
                    out[flat as usize] = values[flat as usize] * w;
                }
                values.copy_from_slice(&out);
            }
        }
    }

    /// `F^-1 [ multiplier . F f ]`, returned in the representation of the
    /// input.
    pub fn apply_block(&self, index: usize, f: &SpectralField) -> Result<SpectralField> {
        if index >= self.len() {
            return Err(Error::BlockIndexOutOfRange { index });
        }
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let mut hat = f.to_frequency()?;
        self.apply_hat_inplace(index, hat.values_mut());
        match f.representation() {
            crate::field::Representation::Frequency => Ok(hat),
            crate::field::Representation::Physical => hat.inverse(),
        }
    }

    /// Low-pass partial sum `S_r f = sum_{j <= r} Delta_j f`. For the
    /// inhomogeneous bank this equals the multiplier `psi(2^-r |xi|)`
    /// exactly; `r < 0` gives the zero field.
    pub fn partial_sum(&self, r: i32, f: &SpectralField) -> Result<SpectralField> {
        if self.kind == BankKind::Uniform {
            return Err(Error::InvalidParameter(
                "partial sums are defined for dyadic banks".into(),
            ));
        }
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        if self.kind == BankKind::Dyadic && r < 0 {
            return Ok(SpectralField::zeros(&self.grid, f.representation()));
        }
        let j_min = match self.labels.first() {
            Some(BlockLabel::Dyadic(j)) => *j,
            _ => 0,
        };
        let mut hat = f.to_frequency()?;
        let scale = 2.0f64.powi(-r);
        for (flat, v) in hat.values_mut().iter_mut().enumerate() {
            let xi = self.grid.freq_vector(flat);
            let radius = xi[..self.grid.dim()]
                .iter()
                .map(|x| x * x)
                .sum::<f64>()
                .sqrt();
            let mut w = bump_psi(radius * scale);
            if self.kind == BankKind::HomogeneousDyadic {
                w -= bump_psi(radius * 2.0f64.powi(1 - j_min));
            }
            *v *= w;
        }
        match f.representation() {
            crate::field::Representation::Frequency => Ok(hat),
            crate::field::Representation::Physical => hat.inverse(),
        }
    }

    /// Largest deviation of the block sum from the exact partition of
    /// unity over the lattice (the zero mode is skipped for the
    /// homogeneous bank).
    pub fn partition_defect(&self) -> f64 {
        let mut sums = vec![0.0f64; self.grid.len()];
        match &self.blocks {
            Blocks::Dense(arrs) => {
                for arr in arrs {
                    for (s, w) in sums.iter_mut().zip(arr) {
                        *s += w;
                    }
                }
            }
            Blocks::Sparse(entries) => {
                for block in entries {
                    for &(flat, w) in block {
                        sums[flat as usize] += w;
                    }
                }
            }
        }
        let mut defect = 0.0f64;
        for (flat, s) in sums.iter().enumerate() {
            if self.kind == BankKind::HomogeneousDyadic {
                let k = self.grid.wavenumber_vector(flat);
                if k == [0, 0] {
                    continue;
                }
            }
            defect = defect.max((s - 1.0).abs());
        }
        defect
    }
}

/// Square root of the quadrature of `|F f|^2` over the two-sided annulus
/// `2^j <= |xi| < 2^(j+1)` on a one-dimensional grid.
pub fn homogeneous_annulus_coefficient_1d(j: i32, f: &SpectralField) -> Result<f64> {
    let grid = f.grid();
    if grid.dim() != 1 {
        return Err(Error::InvalidParameter(
            "annulus coefficients are one-dimensional".into(),
        ));
    }
    let hat = f.to_frequency()?;
    let lo = 2.0f64.powi(j);
    let hi = 2.0f64.powi(j + 1);
    let dxi = grid.freq_spacing();
    let mut sum = 0.0;
    for flat in 0..grid.len() {
        let xi = grid.freq_component(flat).abs();
        if xi >= lo && xi < hi {
            sum += hat.values()[flat].norm_sqr() * dxi;
        }
    }
    Ok(sum.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{random_band_limited, Representation};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn grid_1d() -> FrequencyGrid {
        FrequencyGrid::new(1, 256, 16.0 * PI).unwrap()
    }

    fn grid_2d() -> FrequencyGrid {
        FrequencyGrid::new(2, 64, 8.0 * PI).unwrap()
    }

    #[test]
    fn cutoff_matches_its_plateau_and_support() {
        assert_eq!(bump_psi(0.5), 1.0);
        assert_eq!(bump_psi(1.0), 1.0);
        assert_eq!(bump_psi(3.0), 0.0);
        assert_eq!(bump_psi(2.0), 0.0);
        let mid = bump_psi(1.5);
        assert!(mid > 0.0 && mid < 1.0);
        // nonincreasing across the transition
        let mut last = 1.0;
        for i in 0..=100 {
            let v = bump_psi(1.0 + i as f64 / 100.0);
            assert!(v <= last + 1e-15);
            last = v;
        }
    }

    #[test]
    fn dyadic_multiplier_matches_definition() {
        // phi_2(3) = psi(3/4) - psi(3/2) = 1 - psi(3/2)
        let expect = 1.0 - bump_psi(1.5);
        assert!((dyadic_multiplier(2, &[3.0]) - expect).abs() < 1e-15);
        // support of phi_j for j >= 1 is the annulus [2^(j-1), 2^(j+1)]
        for j in 1..5u32 {
            let lo = 2.0f64.powi(j as i32 - 1);
            let hi = 2.0f64.powi(j as i32 + 1);
            assert_eq!(dyadic_multiplier(j, &[lo * 0.99]), 0.0);
            assert_eq!(dyadic_multiplier(j, &[hi * 1.01]), 0.0);
            assert!(dyadic_multiplier(j, &[2.0f64.powi(j as i32)]) > 0.99);
        }
    }

    #[test]
    fn dyadic_partition_sums_to_one() {
        // sum_{j<=J} phi_j(xi) = 1 exactly for |xi| <= 2^J
        for &xi in &[0.0, 0.3, 1.0, 3.0, 7.9, 8.0, 12.0] {
            let total: f64 = (0..=5u32).map(|j| dyadic_multiplier(j, &[xi])).sum();
            assert!(
                (total - 1.0).abs() <= 1e-15,
                "partition at xi = {xi}: {total}"
            );
        }
    }

    #[test]
    fn bank_partitions_are_exact_on_the_lattice() {
        for grid in [grid_1d(), grid_2d()] {
            let dyadic = DecompositionBank::dyadic(&grid);
            assert!(dyadic.partition_defect() <= 1e-12, "dyadic bank");
            let uniform = DecompositionBank::uniform(&grid);
            assert!(uniform.partition_defect() <= 1e-12, "uniform bank");
        }
        let hom = DecompositionBank::homogeneous_1d(&grid_1d()).unwrap();
        assert!(hom.partition_defect() <= 1e-12, "homogeneous bank");
    }

    #[test]
    fn uniform_multiplier_translation_covariance_is_exact() {
        // dyadic-rational offsets so the float shift xi + k - k is exact
        for &(k, xi) in &[(3i64, 0.375), (-5, -0.125), (9, 0.4375)] {
            let a = uniform_multiplier(&[k], &[xi + k as f64]);
            let b = uniform_multiplier(&[0], &[xi]);
            assert_eq!(a, b);
        }
        let a = uniform_multiplier(&[2, -3], &[2.25, -3.5]);
        let b = uniform_multiplier(&[0, 0], &[0.25, -0.5]);
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_multiplier_support_is_the_root_n_ball() {
        assert_eq!(uniform_multiplier(&[0], &[1.0]), 0.0);
        assert!(uniform_multiplier(&[0], &[0.49]) > 0.0);
        assert_eq!(uniform_multiplier(&[0, 0], &[1.0, 1.01]), 0.0);
        assert!(uniform_multiplier(&[0, 0], &[0.5, 0.5]) > 0.0);
    }

    #[test]
    fn resolution_of_identity_and_almost_orthogonality() {
        let grid = grid_1d();
        let f = random_band_limited(&grid, 4, grid.nyquist() / 2.0, 1.0)
            .unwrap()
            .inverse()
            .unwrap();
        for bank in [
            DecompositionBank::dyadic(&grid),
            DecompositionBank::uniform(&grid),
        ] {
            let mut acc = SpectralField::zeros(&grid, Representation::Physical);
            for i in 0..bank.len() {
                acc.axpy(Complex64::new(1.0, 0.0), &bank.apply_block(i, &f).unwrap());
            }
            let defect = (&acc - &f).l2_norm() / f.l2_norm();
            assert!(defect <= 1e-12, "identity defect {defect:.2e}");
        }

        // Delta_j Delta_j' = 0 for |j - j'| >= 2, as multiplier arrays
        let bank = DecompositionBank::dyadic(&grid);
        for i in 0..bank.len() {
            for j in 0..bank.len() {
                let (BlockLabel::Dyadic(a), BlockLabel::Dyadic(b)) = (bank.label(i), bank.label(j))
                else {
                    unreachable!()
                };
                if (a - b).abs() >= 2 {
                    for flat in 0..grid.len() {
                        assert_eq!(bank.weight(i, flat) * bank.weight(j, flat), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn uniform_blocks_with_distant_labels_do_not_overlap() {
        let grid = grid_2d();
        let bank = DecompositionBank::uniform(&grid);
        let a = bank.position_of(BlockLabel::Uniform([0, 0])).unwrap();
        for &ell in &[[2i64, 2i64], [3, 0], [0, -3], [-2, 2]] {
            let b = bank.position_of(BlockLabel::Uniform(ell)).unwrap();
            for flat in 0..grid.len() {
                assert_eq!(
                    bank.weight(a, flat) * bank.weight(b, flat),
                    0.0,
                    "blocks 0 and {ell:?} overlap at {flat}"
                );
            }
        }
        // nearest neighbours do overlap
        let b = bank.position_of(BlockLabel::Uniform([1, 0])).unwrap();
        let overlap = (0..grid.len()).any(|flat| bank.weight(a, flat) * bank.weight(b, flat) > 0.0);
        assert!(overlap);
    }

    #[test]
    fn bessel_bound_holds_with_small_constant() {
        let grid = grid_1d();
        let bank = DecompositionBank::dyadic(&grid);
        let f = random_band_limited(&grid, 8, grid.nyquist() / 2.0, 0.5).unwrap();
        let total: f64 = (0..bank.len())
            .map(|i| bank.apply_block(i, &f).unwrap().l2_norm().powi(2))
            .sum();
        let bound = f.l2_norm().powi(2);
        assert!(total <= 2.0 * bound, "bessel constant {}", total / bound);
    }

    #[test]
    fn dyadic_block_scales_a_pure_mode_by_its_weight() {
        let grid = grid_1d();
        let bank = DecompositionBank::dyadic(&grid);
        // a lattice mode with |xi| = 4 sits inside block j = 2
        let flat = grid.index_of_wavenumber([64, 0]).unwrap();
        let xi = grid.freq_component(64);
        assert_eq!(xi, 4.0);
        let mut f = SpectralField::zeros(&grid, Representation::Frequency);
        f.values_mut()[flat] = Complex64::new(1.0, 0.0);
        let j2 = bank.position_of(BlockLabel::Dyadic(2)).unwrap();
        let blocked = bank.apply_block(j2, &f).unwrap();
        let w = dyadic_multiplier(2, &[xi]);
        assert!(w > 0.0 && w <= 1.0);
        assert!((blocked.values()[flat] - Complex64::new(w, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn partial_sums_telescope_and_lowpass() {
        let grid = grid_1d();
        let bank = DecompositionBank::dyadic(&grid);
        let f = random_band_limited(&grid, 12, grid.nyquist() / 2.0, 1.0).unwrap();

        // r < 0 gives zero
        let s_neg = bank.partial_sum(-1, &f).unwrap();
        assert_eq!(s_neg.sup_norm(), 0.0);

        // r = j_max reproduces f
        let j_max = match bank.label(bank.len() - 1) {
            BlockLabel::Dyadic(j) => j,
            _ => unreachable!(),
        };
        let full = bank.partial_sum(j_max, &f).unwrap();
        assert!((&full - &f).l2_norm() <= 1e-12 * f.l2_norm());

        // low-pass support: F(S_r f) vanishes for |xi| > 2^(r+1)
        let r = 2;
        let s_r = bank.partial_sum(r, &f).unwrap();
        for flat in 0..grid.len() {
            let xi = grid.freq_component(flat).abs();
            if xi > 2.0f64.powi(r + 1) {
                assert_eq!(s_r.values()[flat], Complex64::new(0.0, 0.0));
            }
        }

        // partial sums equal the sum of blocks
        let mut acc = SpectralField::zeros(&grid, Representation::Frequency);
        for i in 0..bank.len() {
            if let BlockLabel::Dyadic(j) = bank.label(i) {
                if j <= r {
                    acc.axpy(Complex64::new(1.0, 0.0), &bank.apply_block(i, &f).unwrap());
                }
            }
        }
        assert!((&acc - &s_r).l2_norm() <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn annulus_coefficients_locate_pure_modes() {
        let grid = grid_1d();
        // a mode at xi = 3 lies in [2, 4), the j = 1 annulus
        let flat = grid.index_of_wavenumber([48, 0]).unwrap();
        assert_eq!(grid.freq_component(48), 3.0);
        let mut f = SpectralField::zeros(&grid, Representation::Frequency);
        f.values_mut()[flat] = Complex64::new(2.0, 0.0);
        for j in -2..5 {
            let c = homogeneous_annulus_coefficient_1d(j, &f).unwrap();
            if j == 1 {
                assert!(c > 0.0);
            } else {
                assert_eq!(c, 0.0);
            }
        }
        let zero = SpectralField::zeros(&grid, Representation::Frequency);
        assert_eq!(homogeneous_annulus_coefficient_1d(0, &zero).unwrap(), 0.0);
    }

    #[test]
    fn annulus_coefficients_sum_to_the_band_energy() {
        let grid = grid_1d();
        let f = random_band_limited(&grid, 19, grid.nyquist() / 2.0, 1.0).unwrap();
        let mut total = 0.0;
        for j in -8..8 {
            total += homogeneous_annulus_coefficient_1d(j, &f).unwrap().powi(2);
        }
        // direct lattice sum over |xi| >= 2^-8
        let dxi = grid.freq_spacing();
        let mut expect = 0.0;
        for flat in 0..grid.len() {
            let xi = grid.freq_component(flat).abs();
            if xi >= 2.0f64.powi(-8) {
                expect += f.values()[flat].norm_sqr() * dxi;
            }
        }
        assert!((total - expect).abs() <= 1e-10 * expect);
    }

    #[test]
    fn block_index_out_of_range_errors() {
        let grid = grid_1d();
        let bank = DecompositionBank::dyadic(&grid);
        let f = SpectralField::zeros(&grid, Representation::Frequency);
        assert!(matches!(
            bank.apply_block(bank.len(), &f),
            Err(Error::BlockIndexOutOfRange { .. })
        ));
    }
}
