//! Picard contraction solver for the integral equation
//! `u = S(t) u0 - i A F(u)`, a split-step integrator used as an
//! independent cross-check, small-data growth runs, and scattering-state
//! extraction.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::nonlin::PolynomialNonlinearity;
use crate::norms::{
    composite_block_cube_norm, sobolev_norm, x_norm_1d, CubePartition, SpaceTimeTrace,
};
use crate::propagator::{duhamel_trace, Propagator, TimeGrid};
use crate::decomp::DecompositionBank;
use num_complex::Complex64;
use serde::Serialize;

/// Norm in which Picard iterates are compared.
#[derive(Clone, Debug, PartialEq)]
pub enum SolutionNorm {
    /// `sup_m || . (t_m)||_2`, the always-available monitor.
    L2TraceSup,
    /// The one-dimensional solution-space norm.
    XNorm1d { m: u32, big_m: u32 },
    /// `l^{1,s}_Delta l^inf_alpha L^2_{t,x}`, the two-dimensional working
    /// norm; needs a cube-compatible box.
    DyadicCubeL2 { s: f64 },
}

pub struct PicardOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub norm: SolutionNorm,
    pub dealias: bool,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 40,
            norm: SolutionNorm::L2TraceSup,
            dealias: false,
        }
    }
}

/// Converged Picard iterate with its convergence record.
#[derive(Debug)]
pub struct PicardState {
    pub iterations: usize,
    pub trace: SpaceTimeTrace,
    /// successive-difference norms in the selected solution norm
    pub contraction_history: Vec<f64>,
    /// successive differences in the L2 monitor norm
    pub l2_history: Vec<f64>,
    /// residual of the accepted iterate in the selected norm
    pub residual: f64,
    /// selected norm of the accepted iterate
    pub ball_radius: f64,
}

impl PicardState {
    /// Geometric decrease of the final differences: every consecutive
    /// ratio over the last three steps (when present) is below one.
    pub fn geometric_tail(&self) -> bool {
        let h = &self.contraction_history;
        if h.len() < 2 {
            return true;
        }
        let start = h.len().saturating_sub(4);
        h.windows(2)
            .skip(start)
            .all(|w| w[1] < w[0] || w[1] == 0.0)
    }
}

fn l2_sup_distance(a: &[SpectralField], b: &[SpectralField]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).l2_norm())
        .fold(0.0, f64::max)
}

struct NormContext {
    part: Option<CubePartition>,
    bank: Option<DecompositionBank>,
}

fn trace_solution_norm(
    norm: &SolutionNorm,
    slices: &[SpectralField],
    tg: &TimeGrid,
    ctx: &NormContext,
) -> Result<f64> {
    match norm {
        SolutionNorm::L2TraceSup => Ok(slices.iter().map(|s| s.l2_norm()).fold(0.0, f64::max)),
        SolutionNorm::XNorm1d { m, big_m } => {
            let trace = SpaceTimeTrace::new(tg.clone(), slices.to_vec())?;
            Ok(x_norm_1d(&trace, *m, *big_m)?.value)
        }
        SolutionNorm::DyadicCubeL2 { s } => {
            let trace = SpaceTimeTrace::new(tg.clone(), slices.to_vec())?;
            let part = ctx.part.as_ref().expect("cube partition prepared");
            let bank = ctx.bank.as_ref().expect("dyadic bank prepared");
            Ok(
                composite_block_cube_norm(&trace, *s, bank, f64::INFINITY, 2.0, 2.0, part)?
                    .value,
            )
        }
    }
}

fn trace_norm_distance(
    norm: &SolutionNorm,
    a: &[SpectralField],
    b: &[SpectralField],
    tg: &TimeGrid,
    ctx: &NormContext,
) -> Result<f64> {
    match norm {
        SolutionNorm::L2TraceSup => Ok(l2_sup_distance(a, b)),
        _ => {
            let diff: Vec<SpectralField> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            trace_solution_norm(norm, &diff, tg, ctx)
        }
    }
}

/// One application of the integral map: `S(t) u0 - i A F(u)` on the grid,
/// returned as physical slices.
fn apply_map(
    free_hats: &[SpectralField],
    slices: &[SpectralField],
    forcing: Option<&PolynomialNonlinearity>,
    prop: &Propagator,
    tg: &TimeGrid,
    dealias: bool,
) -> Result<Vec<SpectralField>> {
    let Some(f) = forcing else {
        return free_hats.iter().map(|h| h.inverse()).collect();
    };
    let forcing_hats: Vec<SpectralField> = slices
        .iter()
        .map(|u| f.evaluate_with_options(u, dealias)?.forward())
        .collect::<Result<_>>()?;
    let integral = duhamel_trace(&forcing_hats, tg, prop)?;
    let minus_i = Complex64::new(0.0, -1.0);
    free_hats
        .iter()
        .zip(integral)
        .map(|(free, int)| {
            let mut hat = free.clone();
            hat.axpy(minus_i, &int);
            hat.inverse()
        })
        .collect()
}

/// Picard iteration on the stored time grid. Starts from the free
/// evolution, requires both the difference and the residual certificate
/// below tolerance, and reports non-contraction after three consecutive
/// non-decreasing differences above tolerance.
pub fn picard_solve(
    u0: &SpectralField,
    forcing: Option<&PolynomialNonlinearity>,
    prop: &Propagator,
    tg: &TimeGrid,
    opts: &PicardOptions,
) -> Result<PicardState> {
    if u0.grid() != prop.grid() {
        return Err(Error::GridMismatch);
    }
    let ctx = NormContext {
        part: match opts.norm {
            SolutionNorm::DyadicCubeL2 { .. } => Some(CubePartition::new(prop.grid())?),
            _ => None,
        },
        bank: match opts.norm {
            SolutionNorm::DyadicCubeL2 { .. } => Some(DecompositionBank::dyadic(prop.grid())),
            _ => None,
        },
    };
    let hat0 = u0.to_frequency()?;
    let free_hats: Vec<SpectralField> = (0..tg.num_nodes())
        .map(|m| {
            let mut h = hat0.clone();
            prop.evolve_hat_inplace(h.values_mut(), tg.node(m));
            Ok(h)
        })
        .collect::<Result<_>>()?;
    let mut current: Vec<SpectralField> = free_hats
        .iter()
        .map(|h| h.inverse())
        .collect::<Result<_>>()?;

    let mut history = Vec::new();
    let mut l2_history = Vec::new();
    for sweep in 0..opts.max_iter {
        let next = apply_map(&free_hats, &current, forcing, prop, tg, opts.dealias)?;
        let d = trace_norm_distance(&opts.norm, &next, &current, tg, &ctx)?;
        if !d.is_finite() {
            return Err(Error::NonContraction {
                history,
                ratios: vec![f64::INFINITY],
            });
        }
        l2_history.push(l2_sup_distance(&next, &current));
        history.push(d);
        current = next;
        if d <= opts.tol {
            // residual certificate for the accepted iterate
            let mapped = apply_map(&free_hats, &current, forcing, prop, tg, opts.dealias)?;
            let residual = trace_norm_distance(&opts.norm, &mapped, &current, tg, &ctx)?;
            let radius = trace_solution_norm(&opts.norm, &current, tg, &ctx)?;
            let trace = SpaceTimeTrace::new(tg.clone(), current)?;
            return Ok(PicardState {
                iterations: sweep + 1,
                trace,
                contraction_history: history,
                l2_history,
                residual,
                ball_radius: radius,
            });
        }
        if history.len() >= 4 {
            let tail = &history[history.len() - 4..];
            let ratios: Vec<f64> = tail.windows(2).map(|w| w[1] / w[0]).collect();
            if ratios.iter().all(|&r| r >= 1.0) {
                return Err(Error::NonContraction { history, ratios });
            }
        }
    }
    let last = *history.last().unwrap_or(&f64::NAN);
    Err(Error::MaxIterExceeded {
        max_iter: opts.max_iter,
        last,
    })
}

/// Split-step integrator: exact multiplier for the linear flow, explicit
/// midpoint rule for `du/dt = -i F(u)`. The Strang flag symmetrizes the
/// linear half-steps for second order.
pub fn split_step_evolve(
    u0: &SpectralField,
    forcing: Option<&PolynomialNonlinearity>,
    prop: &Propagator,
    dt: f64,
    steps: usize,
    strang: bool,
) -> Result<SpaceTimeTrace> {
    if u0.grid() != prop.grid() {
        return Err(Error::GridMismatch);
    }
    if !(dt > 0.0) || steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "need dt > 0 and at least 2 steps, got dt = {dt}, steps = {steps}"
        )));
    }
    let tg = TimeGrid::new(dt * steps as f64, steps)?;
    let limit = 10.0 * u0.l2_norm();
    let mut u = u0.to_physical()?;
    let mut slices = vec![u.clone()];
    let linear = |field: &SpectralField, tau: f64| -> Result<SpectralField> {
        let mut hat = field.to_frequency()?;
        prop.evolve_hat_inplace(hat.values_mut(), tau);
        hat.inverse()
    };
    let nonlinear = |field: &SpectralField, tau: f64| -> Result<SpectralField> {
        let Some(f) = forcing else {
            return Ok(field.clone());
        };
        let minus_i = Complex64::new(0.0, -1.0);
        let k1 = f.evaluate(field)?;
        let mut half = field.clone();
        half.axpy(minus_i * Complex64::new(tau / 2.0, 0.0), &k1);
        let k2 = f.evaluate(&half)?;
        let mut out = field.clone();
        out.axpy(minus_i * Complex64::new(tau, 0.0), &k2);
        Ok(out)
    };
    for step in 0..steps {
        u = if strang {
            let a = linear(&u, dt / 2.0)?;
            let b = nonlinear(&a, dt)?;
            linear(&b, dt / 2.0)?
        } else {
            let a = linear(&u, dt)?;
            nonlinear(&a, dt)?
        };
        if !u.is_finite() || u.l2_norm() > limit {
            return Err(Error::StepBlowup { step });
        }
        slices.push(u.clone());
    }
    SpaceTimeTrace::new(tg, slices)
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthEntry {
    pub delta: f64,
    /// `sup_t ||u(t)||_{H^s} / ||u_0||_{H^s}`; 1 by convention at `delta = 0`
    pub sup_ratio: f64,
    pub aborted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub sobolev_index: f64,
    pub t_end: f64,
    pub entries: Vec<GrowthEntry>,
}

/// Evolve a profile rescaled to each `delta` on the ladder and record the
/// worst Sobolev growth ratio over the window.
pub fn small_data_global_run(
    profile: &SpectralField,
    forcing: Option<&PolynomialNonlinearity>,
    prop: &Propagator,
    deltas: &[f64],
    s: f64,
    t_end: f64,
    steps: usize,
) -> Result<GrowthReport> {
    let base_norm = sobolev_norm(profile, s, false)?;
    if base_norm == 0.0 {
        return Err(Error::InvalidParameter("zero profile".into()));
    }
    let dt = t_end / steps as f64;
    let mut entries = Vec::new();
    for &delta in deltas {
        if delta == 0.0 {
            entries.push(GrowthEntry {
                delta,
                sup_ratio: 1.0,
                aborted: false,
            });
            continue;
        }
        let u0 = profile.scaled(Complex64::new(delta / base_norm, 0.0));
        match split_step_evolve(&u0, forcing, prop, dt, steps, true) {
            Ok(trace) => {
                let denom = sobolev_norm(trace.slice(0), s, false)?;
                let mut sup = 0.0f64;
                for m in 0..trace.num_nodes() {
                    sup = sup.max(sobolev_norm(trace.slice(m), s, false)? / denom);
                }
                entries.push(GrowthEntry {
                    delta,
                    sup_ratio: sup,
                    aborted: false,
                });
            }
            Err(Error::StepBlowup { .. }) => {
                entries.push(GrowthEntry {
                    delta,
                    sup_ratio: f64::INFINITY,
                    aborted: true,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(GrowthReport {
        sobolev_index: s,
        t_end,
        entries,
    })
}

/// Free pullbacks `w_m = S(-t_m) u(t_m)`, their increments, and the
/// extracted asymptotic state.
#[derive(Debug)]
pub struct ScatteringRecord {
    pub sample_times: Vec<f64>,
    /// `||w_{m+1} - w_m||_2`
    pub increments: Vec<f64>,
    pub u_plus: SpectralField,
    /// increments decrease over the final half of the window
    pub scattering_consistent: bool,
}

pub fn extract_scattering_state(
    trace: &SpaceTimeTrace,
    prop: &Propagator,
    sample_indices: &[usize],
) -> Result<ScatteringRecord> {
    if trace.grid() != prop.grid() {
        return Err(Error::GridMismatch);
    }
    if sample_indices.len() < 2 {
        return Err(Error::InvalidParameter(
            "scattering extraction needs at least two sample times".into(),
        ));
    }
    let tg = trace.time_grid();
    let mut pullbacks = Vec::with_capacity(sample_indices.len());
    let mut times = Vec::with_capacity(sample_indices.len());
    for &m in sample_indices {
        if m >= trace.num_nodes() {
            return Err(Error::NotATimeNode {
                t: tg.dt() * m as f64,
            });
        }
        let t = tg.node(m);
        let mut hat = trace.slice(m).forward()?;
        prop.evolve_hat_inplace(hat.values_mut(), -t);
        pullbacks.push(hat);
        times.push(t);
    }
    let increments: Vec<f64> = pullbacks
        .windows(2)
        .map(|w| (&w[1] - &w[0]).l2_norm())
        .collect();
    // compare the two quarters of the final half-window
    let half = increments.len() / 2;
    let tail = &increments[half..];
    let verdict = if tail.len() >= 2 {
        let quarter = tail.len() / 2;
        let first: f64 = tail[..quarter.max(1)].iter().sum::<f64>() / quarter.max(1) as f64;
        let second: f64 =
            tail[quarter..].iter().sum::<f64>() / (tail.len() - quarter).max(1) as f64;
        second <= first * (1.0 + 1e-12)
    } else {
        true
    };
    let u_plus = pullbacks.last().unwrap().inverse()?;
    Ok(ScatteringRecord {
        sample_times: times,
        increments,
        u_plus,
        scattering_consistent: verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Representation;
    use num_complex::Complex64;
    use crate::field::{gaussian_packet, FrequencyGrid, SignSignature};
    use crate::propagator::Propagator;
    use std::f64::consts::PI;

    fn setup() -> (FrequencyGrid, Propagator) {
        let grid = FrequencyGrid::new(1, 256, 16.0 * PI).unwrap();
        let prop = Propagator::new(&grid, &SignSignature::elliptic(1)).unwrap();
        (grid, prop)
    }

    #[test]
    fn picard_free_case_converges_immediately_to_the_free_evolution() {
        let (grid, prop) = setup();
        let u0 = gaussian_packet(&grid, &[0.0], 2.0, &[0.0]).unwrap();
        let tg = TimeGrid::new(1.0, 32).unwrap();
        let state = picard_solve(&u0, None, &prop, &tg, &PicardOptions::default()).unwrap();
        assert_eq!(state.iterations, 1);
        assert!(state.residual <= 2e-8);
        for m in [0, 16, 32] {
            let expect = prop.free_evolve(&u0, tg.node(m)).unwrap();
            let diff = (state.trace.slice(m) - &expect).l2_norm();
            assert!(diff <= 1e-12 * expect.l2_norm());
        }
    }

    #[test]
    fn picard_small_data_contracts_and_certifies() {
        let (grid, prop) = setup();
        let f = PolynomialNonlinearity::derivative_power(1, 5).unwrap();
        let profile = gaussian_packet(&grid, &[0.0], 2.0, &[0.0]).unwrap();
        let h1 = sobolev_norm(&profile, 1.0, false).unwrap();
        let u0 = profile.scaled(Complex64::new(1e-3 / h1, 0.0));
        let tg = TimeGrid::new(2.0, 64).unwrap();
        let opts = PicardOptions::default();
        let state = picard_solve(&u0, Some(&f), &prop, &tg, &opts).unwrap();
        assert!(state.residual <= 2.0 * opts.tol, "residual {}", state.residual);
        assert!(state.geometric_tail());
        // observed contraction ratio well below 1/2 in this regime
        if state.contraction_history.len() >= 2 {
            let h = &state.contraction_history;
            assert!(h[1] / h[0] < 0.5);
        }
    }

    #[test]
    fn picard_reports_non_contraction_far_outside_the_small_data_regime() {
        let (grid, prop) = setup();
        let f = PolynomialNonlinearity::derivative_power(1, 5).unwrap();
        let profile = gaussian_packet(&grid, &[0.0], 2.0, &[0.0]).unwrap();
        let u0 = profile.scaled(Complex64::new(1e3, 0.0));
        let tg = TimeGrid::new(2.0, 32).unwrap();
        let err = picard_solve(&u0, Some(&f), &prop, &tg, &PicardOptions::default()).unwrap_err();
        assert!(matches!(
            err,
            Error::NonContraction { .. } | Error::MaxIterExceeded { .. }
        ));
    }

    #[test]
    fn split_step_free_case_equals_the_free_evolution() {
        let (grid, prop) = setup();
        let u0 = gaussian_packet(&grid, &[0.0], 2.0, &[1.0]).unwrap();
        let trace = split_step_evolve(&u0, None, &prop, 0.05, 20, true).unwrap();
        for m in [0, 7, 20] {
            let t = trace.time_grid().node(m);
            let expect = prop.free_evolve(&u0, t).unwrap();
            let diff = (trace.slice(m) - &expect).l2_norm();
            assert!(diff <= 1e-12 * expect.l2_norm(), "node {m}: {diff:.2e}");
        }
    }

    #[test]
    fn split_step_is_second_order_for_strang() {
        let (grid, prop) = setup();
        let f = PolynomialNonlinearity::cubic_gauge_invariant(1).unwrap();
        let u0 = gaussian_packet(&grid, &[0.0], 2.0, &[0.5]).unwrap();
        let t_end = 0.5;
        let reference = split_step_evolve(&u0, Some(&f), &prop, t_end / 512.0, 512, true).unwrap();
        let terminal = |steps: usize| -> SpectralField {
            let tr = split_step_evolve(&u0, Some(&f), &prop, t_end / steps as f64, steps, true)
                .unwrap();
            tr.slice(steps).clone()
        };
        let err32 = (&terminal(32) - reference.slice(512)).l2_norm();
        let err64 = (&terminal(64) - reference.slice(512)).l2_norm();
        let order = err32 / err64;
        assert!(
            (3.5..=4.5).contains(&order),
            "dt halving gain {order:.2} (errors {err32:.2e}, {err64:.2e})"
        );
    }

    #[test]
    fn picard_and_split_step_agree_on_a_moderate_scenario() {
        let (grid, prop) = setup();
        let f = PolynomialNonlinearity::cubic_gauge_invariant(1).unwrap();
        let profile = gaussian_packet(&grid, &[0.0], 2.0, &[0.0]).unwrap();
        let u0 = profile.scaled(Complex64::new(0.05, 0.0));
        let tg = TimeGrid::new(1.0, 128).unwrap();
        let opts = PicardOptions::default();
        let picard = picard_solve(&u0, Some(&f), &prop, &tg, &opts).unwrap();
        let split = split_step_evolve(&u0, Some(&f), &prop, tg.dt(), tg.steps(), true).unwrap();
        let gap = (picard.trace.slice(128) - split.slice(128)).l2_norm();
        let budget = 5.0 * opts.tol.max(tg.dt() * tg.dt());
        assert!(gap <= budget, "solver gap {gap:.2e} vs budget {budget:.2e}");
    }

    #[test]
    fn contraction_ratio_does_not_worsen_when_data_shrinks() {
        let (grid, prop) = setup();
        let f = PolynomialNonlinearity::cubic_gauge_invariant(1).unwrap();
        let profile = gaussian_packet(&grid, &[0.0], 2.0, &[0.0]).unwrap();
        let tg = TimeGrid::new(1.0, 32).unwrap();
        let mut opts = PicardOptions::default();
        opts.tol = 1e-12;
        let ratio_of = |amp: f64| -> f64 {
            let u0 = profile.scaled(Complex64::new(amp, 0.0));
            let state = picard_solve(&u0, Some(&f), &prop, &tg, &opts).unwrap();
            let h = &state.contraction_history;
            if h.len() < 2 {
                0.0
            } else {
                h.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max)
            }
        };
        let big = ratio_of(0.2);
        let small = ratio_of(0.1);
        assert!(small <= big + 1e-3, "ratios {small} vs {big}");
    }

    #[test]
    fn duhamel_residual_is_second_order_in_dt() {
        // central-difference residual of i u_t + Delta u - F along a Picard
        // solution, checked to shrink by ~4 under dt halving
        let (grid, prop) = setup();
        let f = PolynomialNonlinearity::cubic_gauge_invariant(1).unwrap();
        let profile = gaussian_packet(&grid, &[0.0], 2.0, &[0.0]).unwrap();
        let u0 = profile.scaled(Complex64::new(0.1, 0.0));
        let mut opts = PicardOptions::default();
        opts.tol = 1e-12;
        let residual_at = |steps: usize| -> f64 {
            let tg = TimeGrid::new(0.5, steps).unwrap();
            let state = picard_solve(&u0, Some(&f), &prop, &tg, &opts).unwrap();
            let dt = tg.dt();
            let mut worst = 0.0f64;
            for m in 1..steps {
                let plus = state.trace.slice(m + 1).forward().unwrap();
                let minus = state.trace.slice(m - 1).forward().unwrap();
                let here = state.trace.slice(m);
                let here_hat = here.forward().unwrap();
                let fr = f.evaluate(here).unwrap().forward().unwrap();
                let mut res = SpectralField::zeros(&grid, Representation::Frequency);
                let i_over = Complex64::new(0.0, 1.0 / (2.0 * dt));
                res.axpy(i_over, &plus);
                res.axpy(-i_over, &minus);
                // Delta_pm in frequency is multiplication by -symbol
                let mut lap = here_hat.clone();
                for (v, &a) in lap.values_mut().iter_mut().zip(prop.symbol()) {
                    *v *= -a;
                }
                res.axpy(Complex64::new(1.0, 0.0), &lap);
                res.axpy(Complex64::new(-1.0, 0.0), &fr);
                worst = worst.max(res.l2_norm());
            }
            worst
        };
        let r64 = residual_at(64);
        let r128 = residual_at(128);
        let gain = r64 / r128;
        assert!(
            (2.8..=5.5).contains(&gain),
            "richardson gain {gain:.2} (residuals {r64:.2e}, {r128:.2e})"
        );
    }

    #[test]
    fn growth_report_free_case_is_flat() {
        let (grid, prop) = setup();
        let profile = gaussian_packet(&grid, &[0.0], 2.0, &[0.0]).unwrap();
        let report =
            small_data_global_run(&profile, None, &prop, &[0.0, 1e-3, 1e-2], 1.0, 5.0, 64)
                .unwrap();
        for entry in &report.entries {
            assert!(
                (entry.sup_ratio - 1.0).abs() <= 1e-12,
                "delta {}: ratio {}",
                entry.delta,
                entry.sup_ratio
            );
        }
    }

    #[test]
    fn scattering_record_of_free_trace_is_constant() {
        let (grid, prop) = setup();
        let u0 = gaussian_packet(&grid, &[0.0], 2.0, &[0.0]).unwrap();
        let trace = split_step_evolve(&u0, None, &prop, 0.1, 20, true).unwrap();
        let idx: Vec<usize> = (0..=20).collect();
        let rec = extract_scattering_state(&trace, &prop, &idx).unwrap();
        assert!(rec.scattering_consistent);
        for d in &rec.increments {
            assert!(*d <= 1e-12 * u0.l2_norm());
        }
        let gap = (&rec.u_plus - &u0).l2_norm();
        assert!(gap <= 1e-11 * u0.l2_norm(), "pullback gap {gap:.2e}");
    }

    #[test]
    fn blowup_guard_fires_for_wild_data() {
        let (grid, prop) = setup();
        let f = PolynomialNonlinearity::cubic_gauge_invariant(1).unwrap();
        let u0 = gaussian_packet(&grid, &[0.0], 2.0, &[0.0])
            .unwrap()
            .scaled(Complex64::new(50.0, 0.0));
        let out = split_step_evolve(&u0, Some(&f), &prop, 0.5, 10, true);
        assert!(matches!(out, Err(Error::StepBlowup { .. })));
    }
}
