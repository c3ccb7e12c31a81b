//! The free group `S(t)` as an exact frequency multiplier, the Duhamel
//! operator, and the dispersive-decay probe.
//!
//! With the symbol `a(xi) = sum_j eps_j xi_j^2`, the group solving
//! `i u_t + Delta_pm u = 0` is the multiplier `exp(-i t a(xi))`. The
//! conventions here make `u(t) = S(t) u0 - i A F` satisfy
//! `i u_t + Delta_pm u = F` on the grid.

use crate::error::{Error, Result};
use crate::field::{FrequencyGrid, Representation, SignSignature, SpectralField};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Value of the mixed-signature symbol `sum_j eps_j xi_j^2`.
pub fn symbol_value(signature: &SignSignature, xi: &[f64]) -> Result<f64> {
    if signature.len() != xi.len() {
        return Err(Error::InvalidParameter(format!(
            "signature length {} does not match frequency length {}",
            signature.len(),
            xi.len()
        )));
    }
    Ok(signature
        .signs()
        .iter()
        .zip(xi)
        .map(|(&s, &x)| s as f64 * x * x)
        .sum())
}

/// Cached multiplier data for one grid and signature.
#[derive(Clone, Debug)]
pub struct Propagator {
    grid: FrequencyGrid,
    signature: SignSignature,
    symbol: Vec<f64>,
}

impl Propagator {
    pub fn new(grid: &FrequencyGrid, signature: &SignSignature) -> Result<Self> {
        if signature.len() != grid.dim() {
            return Err(Error::InvalidParameter(format!(
                "signature length {} does not match grid dimension {}",
                signature.len(),
                grid.dim()
            )));
        }
        let mut symbol = Vec::with_capacity(grid.len());
        for flat in 0..grid.len() {
            let xi = grid.freq_vector(flat);
            symbol.push(symbol_value(signature, &xi[..grid.dim()])?);
        }
        Ok(Self {
            grid: grid.clone(),
            signature: signature.clone(),
            symbol,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn signature(&self) -> &SignSignature {
        &self.signature
    }

    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    /// Apply `S(t)` to a frequency-side array in place.
    pub(crate) fn evolve_hat_inplace(&self, values: &mut [Complex64], t: f64) {
        for (v, &a) in values.iter_mut().zip(&self.symbol) {
            *v *= Complex64::new(0.0, -t * a).exp();
        }
    }

    /// `S(t) u0`. Accepts either representation and returns the same one.
    pub fn free_evolve(&self, u0: &SpectralField, t: f64) -> Result<SpectralField> {
        if u0.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let mut hat = u0.to_frequency()?;
        self.evolve_hat_inplace(hat.values_mut(), t);
        match u0.representation() {
            Representation::Frequency => Ok(hat),
            Representation::Physical => hat.inverse(),
        }
    }

    /// Relative group-law defect `||S(t)S(s)u - S(t+s)u||_2 / ||u||_2`.
    pub fn semigroup_check(&self, u0: &SpectralField, t: f64, s: f64) -> Result<f64> {
        let norm = u0.l2_norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let two_step = self.free_evolve(&self.free_evolve(u0, s)?, t)?;
        let one_step = self.free_evolve(u0, t + s)?;
        Ok((&two_step - &one_step).l2_norm() / norm)
    }
}

/// Uniform time grid on `[0, T]` with `steps + 1` nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_end: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, steps: usize) -> Result<Self> {
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "time horizon must be positive, got {t_end}"
            )));
        }
        if steps < 2 {
            return Err(Error::InvalidParameter(format!(
                "time grid needs at least 2 steps, got {steps}"
            )));
        }
        Ok(Self { t_end, steps })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn num_nodes(&self) -> usize {
        self.steps + 1
    }

    pub fn dt(&self) -> f64 {
        self.t_end / self.steps as f64
    }

    pub fn node(&self, m: usize) -> f64 {
        self.t_end * m as f64 / self.steps as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.steps).map(|m| self.node(m)).collect()
    }

    /// Index of a node equal to `t` up to roundoff.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let m = (t / self.dt()).round();
        if m < 0.0 || m > self.steps as f64 || (t - m * self.dt()).abs() > 1e-9 * self.t_end {
            return Err(Error::NotATimeNode { t });
        }
        Ok(m as usize)
    }
}

/// Duhamel integral `A f (t_m) = int_0^{t_m} S(t_m - s) f(s) ds` by
/// composite trapezoid quadrature over the stored nodes. The sampler must
/// return frequency-side fields at every node index up to `m`.
pub fn duhamel<F>(forcing: F, tg: &TimeGrid, m: usize, prop: &Propagator) -> Result<SpectralField>
where
    F: Fn(usize) -> Result<SpectralField>,
{
    if m > tg.steps() {
        return Err(Error::NotATimeNode { t: tg.dt() * m as f64 });
    }
    let dt = tg.dt();
    let mut acc = SpectralField::zeros(prop.grid(), Representation::Frequency);
    if m == 0 {
        return Ok(acc);
    }
    let t_m = tg.node(m);
    for k in 0..=m {
        let f_k = forcing(k)?;
        if f_k.grid() != prop.grid() {
            return Err(Error::GridMismatch);
        }
        let f_k = f_k.to_frequency()?;
        let mut term = f_k;
        prop.evolve_hat_inplace(term.values_mut(), t_m - tg.node(k));
        let w = if k == 0 || k == m { 0.5 * dt } else { dt };
        acc.axpy(Complex64::new(w, 0.0), &term);
    }
    Ok(acc)
}

/// Duhamel integrals at every node at once, using the group property to
/// advance the trapezoid sum. Identical to [`duhamel`] node by node.
pub fn duhamel_trace(forcing_hat: &[SpectralField], tg: &TimeGrid, prop: &Propagator) -> Result<Vec<SpectralField>> {
    if forcing_hat.len() != tg.num_nodes() {
        return Err(Error::InvalidParameter(format!(
            "forcing has {} nodes, time grid has {}",
            forcing_hat.len(),
            tg.num_nodes()
        )));
    }
    let dt = tg.dt();
    let mut out = Vec::with_capacity(tg.num_nodes());
    out.push(SpectralField::zeros(prop.grid(), Representation::Frequency));
    let mut acc = out[0].clone();
    for m in 0..tg.steps() {
        // I_{m+1} = S(dt) (I_m + dt/2 f_m) + dt/2 f_{m+1}
        acc.axpy(Complex64::new(0.5 * dt, 0.0), &forcing_hat[m]);
        prop.evolve_hat_inplace(acc.values_mut(), dt);
        acc.axpy(Complex64::new(0.5 * dt, 0.0), &forcing_hat[m + 1]);
        out.push(acc.clone());
    }
    Ok(out)
}

/// One sample of the sup-norm decay probe.
#[derive(Clone, Debug, Serialize)]
pub struct DecaySample {
    pub t: f64,
    pub sup_norm: f64,
    /// Largest modulus on the box boundary divided by the peak.
    pub boundary_fraction: f64,
    pub wrap_detected: bool,
}

/// `||S(t) u0||_inf` over the given times, with wrap-around detection via
/// the boundary amplitude.
pub fn decay_probe(u0: &SpectralField, times: &[f64], prop: &Propagator) -> Result<Vec<DecaySample>> {
    let grid = prop.grid().clone();
    let n = grid.points_per_dim();
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        let u = prop.free_evolve(u0, t)?.to_physical()?;
        let sup = u.sup_norm();
        let mut boundary: f64 = 0.0;
        for flat in 0..grid.len() {
            let (i0, i1) = grid.index_pair(flat);
            let on_boundary = i0 == 0 || (grid.dim() == 2 && i1 == 0);
            if on_boundary {
                boundary = boundary.max(u.values()[flat].norm());
            }
        }
        let _ = n;
        let fraction = if sup > 0.0 { boundary / sup } else { 0.0 };
        let wrapped = fraction > 1e-6;
        if wrapped {
            log::warn!("decay probe: wrap-around suspected at t = {t} (boundary fraction {fraction:.2e})");
        }
        samples.push(DecaySample {
            t,
            sup_norm: sup,
            boundary_fraction: fraction,
            wrap_detected: wrapped,
        });
    }
    Ok(samples)
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}
