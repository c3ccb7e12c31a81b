//! Function-space norms: Lebesgue, Sobolev and homogeneous Sobolev,
//! Besov and homogeneous Besov, modulation, cube-decomposed mixed
//! space-time norms, the composite block-cube families, the
//! one-dimensional solution-space norm, and a Gagliardo-Nirenberg ratio
//! check on cubes.
//!
//! All physical quadratures are `h^n`-weighted lattice sums, all time
//! quadratures composite trapezoid over the stored nodes, and `L^inf`
//! norms are node maxima.

use crate::decomp::{homogeneous_annulus_coefficient_1d, BankKind, BlockLabel, DecompositionBank};
use crate::error::{Error, Result};
use crate::field::{FrequencyGrid, Representation, SpectralField};
use crate::nonlin::index_pair;
use crate::propagator::TimeGrid;
use serde::Serialize;

/// Value of an index-summed norm together with the fraction of the sum
/// carried by its last two terms.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NormValue {
    pub value: f64,
    pub tail_fraction: f64,
}

impl NormValue {
    pub fn truncation_suspect(&self) -> bool {
        self.tail_fraction > 0.01
    }
}

fn check_exponent(name: &str, p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "{name} must lie in [1, inf], got {p}"
        )));
    }
    Ok(())
}

/// Weighted sequence reduction `(sum w |a|^p)^(1/p)`, maximum for infinite `p`.
fn lp_reduce(terms: &[f64], weights: Option<&[f64]>, p: f64) -> f64 {
    if p.is_infinite() {
        terms.iter().cloned().fold(0.0, f64::max)
    } else {
        let mut sum = 0.0;
        for (i, &a) in terms.iter().enumerate() {
            let w = weights.map_or(1.0, |w| w[i]);
            sum += w * a.powf(p);
        }
        sum.powf(1.0 / p)
    }
}

/// `L^p` norm over the box by `h^n`-weighted quadrature, maximum modulus
/// for `p = inf`.
pub fn lebesgue_norm(f: &SpectralField, p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    if f.representation() != Representation::Physical {
        return Err(Error::WrongRepresentation {
            expected: Representation::Physical,
            found: f.representation(),
        });
    }
    if p.is_infinite() {
        return Ok(f.sup_norm());
    }
    let w = f.grid().spacing().powi(f.grid().dim() as i32);
    let sum: f64 = f.values().iter().map(|v| v.norm().powf(p)).sum();
    Ok((w * sum).powf(1.0 / p))
}

/// Bessel-potential norm `|| <xi>^s F f ||_2`, or the homogeneous version
/// `|| |xi|^s F f ||_2` with the zero mode excluded. A homogeneous norm
/// with `s < 0` requires a mean-zero field.
pub fn sobolev_norm(f: &SpectralField, s: f64, homogeneous: bool) -> Result<f64> {
    let hat = f.to_frequency()?;
    let grid = f.grid();
    let dxi = grid.freq_spacing().powi(grid.dim() as i32);
    let mut sum = 0.0;
    let mut mass = 0.0;
    let mut zero_mode = 0.0;
    for flat in 0..grid.len() {
        let a2 = hat.values()[flat].norm_sqr();
        mass += a2;
        let xi = grid.freq_vector(flat);
        let r2: f64 = xi[..grid.dim()].iter().map(|x| x * x).sum();
        if homogeneous {
            if r2 == 0.0 {
                zero_mode = a2;
                continue;
            }
            sum += r2.powf(s) * a2;
        } else {
            sum += (1.0 + r2).powf(s) * a2;
        }
    }
    if homogeneous && s < 0.0 && zero_mode > 1e-24 * mass.max(f64::MIN_POSITIVE) {
        return Err(Error::SingularDatum { s });
    }
    Ok((sum * dxi).sqrt())
}

/// Besov norm `( sum_j 2^{sjq} ||Delta_j f||_p^q )^{1/q}` over an
/// inhomogeneous dyadic bank.
pub fn besov_norm(
    f: &SpectralField,
    s: f64,
    p: f64,
    q: f64,
    bank: &DecompositionBank,
) -> Result<NormValue> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    if bank.kind() != BankKind::Dyadic {
        return Err(Error::InvalidParameter(
            "besov norm expects the inhomogeneous dyadic bank".into(),
        ));
    }
    weighted_block_norm(f, p, q, bank, |label| match label {
        BlockLabel::Dyadic(j) => 2.0f64.powf(s * j as f64),
        _ => unreachable!(),
    })
}

/// Modulation norm `( sum_k <k>^{sq} ||Box_k f||_p^q )^{1/q}` over a
/// uniform bank.
pub fn modulation_norm(
    f: &SpectralField,
    s: f64,
    p: f64,
    q: f64,
    bank: &DecompositionBank,
) -> Result<NormValue> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    if bank.kind() != BankKind::Uniform {
        return Err(Error::InvalidParameter(
            "modulation norm expects a uniform bank".into(),
        ));
    }
    weighted_block_norm(f, p, q, bank, |label| match label {
        BlockLabel::Uniform(k) => {
            let k2 = (k[0] * k[0] + k[1] * k[1]) as f64;
            (1.0 + k2).powf(s / 2.0)
        }
        _ => unreachable!(),
    })
}

fn weighted_block_norm<W>(
    f: &SpectralField,
    p: f64,
    q: f64,
    bank: &DecompositionBank,
    weight: W,
) -> Result<NormValue>
where
    W: Fn(BlockLabel) -> f64,
{
    if f.grid() != bank.grid() {
        return Err(Error::GridMismatch);
    }
    let hat = f.to_frequency()?;
    let mut terms = Vec::with_capacity(bank.len());
    let mut labels = Vec::with_capacity(bank.len());
    for i in 0..bank.len() {
        if bank.block_is_empty(i) {
            continue;
        }
        let mut piece = hat.clone();
        bank.apply_hat_inplace(i, piece.values_mut());
        let phys = piece.inverse()?;
        let lp = lebesgue_norm(&phys, p)?;
        terms.push(weight(bank.label(i)) * lp);
        labels.push(bank.label(i));
    }
    let value = lp_reduce(&terms, None, q);
    Ok(NormValue {
        value,
        tail_fraction: block_tail_fraction(&terms, &labels),
    })
}

/// Fraction of the (weighted, absolute) term mass sitting on the two
/// outermost block indices.
fn block_tail_fraction(terms: &[f64], labels: &[BlockLabel]) -> f64 {
    let total: f64 = terms.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let rank = |label: &BlockLabel| -> i64 {
        match label {
            BlockLabel::Dyadic(j) => *j as i64,
            BlockLabel::Uniform(k) => k[0].abs().max(k[1].abs()),
        }
    };
    let top = labels.iter().map(&rank).max().unwrap_or(0);
    let tail: f64 = terms
        .iter()
        .zip(labels)
        .filter(|(_, l)| rank(l) >= top - 1)
        .map(|(t, _)| t)
        .sum();
    tail / total
}

/// Homogeneous Besov norm `sum_j 2^{sj} c_j(f)` built from the two-sided
/// annulus coefficients of the one-dimensional lattice.
pub fn homogeneous_besov_norm_1d(f: &SpectralField, s: f64) -> Result<NormValue> {
    let grid = f.grid();
    if grid.dim() != 1 {
        return Err(Error::InvalidParameter(
            "homogeneous Besov norm is one-dimensional".into(),
        ));
    }
    let j_min = grid.freq_spacing().log2().floor() as i32;
    let j_max = grid.nyquist().log2().ceil() as i32;
    let mut terms = Vec::new();
    let mut labels = Vec::new();
    for j in j_min..=j_max {
        let c = homogeneous_annulus_coefficient_1d(j, f)?;
        terms.push(2.0f64.powf(s * j as f64) * c);
        labels.push(BlockLabel::Dyadic(j));
    }
    Ok(NormValue {
        value: terms.iter().sum(),
        tail_fraction: block_tail_fraction(&terms, &labels),
    })
}

/// Unit-cube partition of the box with integer centers. Needs `2L`
/// integer and an equal number of samples in every cube; when `L` itself
/// is an integer the boundary cube wraps around periodically.
#[derive(Clone, Debug)]
pub struct CubePartition {
    grid: FrequencyGrid,
    cubes_per_dim: usize,
    cube_of_axis_index: Vec<u32>,
}

impl CubePartition {
    pub fn new(grid: &FrequencyGrid) -> Result<Self> {
        let n = grid.points_per_dim();
        let l = grid.half_length();
        let two_l = 2.0 * l;
        let cubes = two_l.round();
        if (two_l - cubes).abs() > 1e-9 || cubes < 1.0 {
            return Err(Error::Partition { n, l });
        }
        let cubes_per_dim = cubes as usize;
        if n % cubes_per_dim != 0 {
            return Err(Error::Partition { n, l });
        }
        let samples_per_unit = n / cubes_per_dim;
        let integer_centers_wrap = cubes_per_dim % 2 == 0;
        if integer_centers_wrap && samples_per_unit % 2 != 0 {
            return Err(Error::Partition { n, l });
        }
        let mut cube_of_axis_index = Vec::with_capacity(n);
        for i in 0..n {
            let c = if integer_centers_wrap {
                ((i + samples_per_unit / 2) / samples_per_unit) % cubes_per_dim
            } else {
                i / samples_per_unit
            };
            cube_of_axis_index.push(c as u32);
        }
        Ok(Self {
            grid: grid.clone(),
            cubes_per_dim,
            cube_of_axis_index,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn cubes_per_dim(&self) -> usize {
        self.cubes_per_dim
    }

    pub fn cube_count(&self) -> usize {
        self.cubes_per_dim.pow(self.grid.dim() as u32)
    }

    /// Flat cube index of a flat sample index.
    #[inline]
    pub fn cube_of(&self, flat: usize) -> usize {
        let (i0, i1) = self.grid.index_pair(flat);
        let c0 = self.cube_of_axis_index[i0] as usize;
        if self.grid.dim() == 1 {
            c0
        } else {
            c0 * self.cubes_per_dim + self.cube_of_axis_index[i1] as usize
        }
    }
}

/// Dense record of an evolution: one physical-space field per time node.
#[derive(Clone, Debug)]
pub struct SpaceTimeTrace {
    grid: FrequencyGrid,
    time: TimeGrid,
    slices: Vec<SpectralField>,
}

impl SpaceTimeTrace {
    pub fn new(time: TimeGrid, slices: Vec<SpectralField>) -> Result<Self> {
        if slices.len() != time.num_nodes() {
            return Err(Error::InvalidParameter(format!(
                "trace has {} slices for {} time nodes",
                slices.len(),
                time.num_nodes()
            )));
        }
        let grid = slices[0].grid().clone();
        for s in &slices {
            if s.grid() != &grid {
                return Err(Error::GridMismatch);
            }
            if s.representation() != Representation::Physical {
                return Err(Error::WrongRepresentation {
                    expected: Representation::Physical,
                    found: s.representation(),
                });
            }
        }
        Ok(Self { grid, time, slices })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.time
    }

    pub fn num_nodes(&self) -> usize {
        self.slices.len()
    }

    pub fn slice(&self, m: usize) -> &SpectralField {
        &self.slices[m]
    }

    pub fn slices(&self) -> &[SpectralField] {
        &self.slices
    }

    /// Spectral derivative applied slice by slice.
    pub fn derivative(&self, axis: usize) -> Result<SpaceTimeTrace> {
        let slices = self
            .slices
            .iter()
            .map(|s| s.derivative(axis))
            .collect::<Result<Vec<_>>>()?;
        SpaceTimeTrace::new(self.time.clone(), slices)
    }

    /// Restriction to the first `m` steps.
    pub fn truncated(&self, steps: usize) -> Result<SpaceTimeTrace> {
        if steps < 2 || steps > self.time.steps() {
            return Err(Error::InvalidParameter(format!(
                "cannot truncate a {}-step trace to {steps} steps",
                self.time.steps()
            )));
        }
        let time = TimeGrid::new(self.time.node(steps), steps)?;
        SpaceTimeTrace::new(time, self.slices[..=steps].to_vec())
    }
}

/// Composite-trapezoid weights over the trace nodes.
fn time_weights(tg: &TimeGrid) -> Vec<f64> {
    let dt = tg.dt();
    let mut w = vec![dt; tg.num_nodes()];
    w[0] = 0.5 * dt;
    w[tg.num_nodes() - 1] = 0.5 * dt;
    w
}

/// Global mixed norm `L^q_t L^p_x` over the whole box.
pub fn trace_time_space_norm(trace: &SpaceTimeTrace, q_time: f64, p_space: f64) -> Result<f64> {
    check_exponent("q", q_time)?;
    check_exponent("p", p_space)?;
    let w = time_weights(trace.time_grid());
    let per_node: Vec<f64> = trace
        .slices()
        .iter()
        .map(|s| lebesgue_norm(s, p_space))
        .collect::<Result<_>>()?;
    Ok(lp_reduce(&per_node, Some(&w), q_time))
}

/// Global mixed norm `L^p_x L^q_t` over the whole box.
pub fn trace_space_time_norm(trace: &SpaceTimeTrace, p_space: f64, q_time: f64) -> Result<f64> {
    check_exponent("p", p_space)?;
    check_exponent("q", q_time)?;
    let grid = trace.grid();
    let w = time_weights(trace.time_grid());
    let hn = grid.spacing().powi(grid.dim() as i32);
    let len = grid.len();
    let mut per_point = vec![0.0f64; len];
    if q_time.is_infinite() {
        for s in trace.slices() {
            for (acc, v) in per_point.iter_mut().zip(s.values()) {
                *acc = acc.max(v.norm());
            }
        }
    } else {
        for (m, s) in trace.slices().iter().enumerate() {
            for (acc, v) in per_point.iter_mut().zip(s.values()) {
                *acc += w[m] * v.norm().powf(q_time);
            }
        }
        for acc in per_point.iter_mut() {
            *acc = acc.powf(1.0 / q_time);
        }
    }
    if p_space.is_infinite() {
        Ok(per_point.iter().cloned().fold(0.0, f64::max))
    } else {
        let sum: f64 = per_point.iter().map(|a| a.powf(p_space)).sum();
        Ok((hn * sum).powf(1.0 / p_space))
    }
}

/// Cube-decomposed mixed norm `l^q_alpha ( L^p_t L^r_x (I x Q_alpha) )`.
pub fn cube_mixed_norm(
    trace: &SpaceTimeTrace,
    q_outer: f64,
    p_time: f64,
    r_space: f64,
    part: &CubePartition,
) -> Result<f64> {
    check_exponent("q", q_outer)?;
    check_exponent("p", p_time)?;
    check_exponent("r", r_space)?;
    if part.grid() != trace.grid() {
        return Err(Error::GridMismatch);
    }
    let per_cube = cube_time_profiles(trace, r_space, part)?;
    let w = time_weights(trace.time_grid());
    let cube_values: Vec<f64> = per_cube
        .iter()
        .map(|profile| lp_reduce(profile, Some(&w), p_time))
        .collect();
    Ok(lp_reduce(&cube_values, None, q_outer))
}

/// Per-cube spatial `L^r` profiles over time: `out[cube][node]`.
fn cube_time_profiles(
    trace: &SpaceTimeTrace,
    r_space: f64,
    part: &CubePartition,
) -> Result<Vec<Vec<f64>>> {
    let grid = trace.grid();
    let hn = grid.spacing().powi(grid.dim() as i32);
    let cubes = part.cube_count();
    let nodes = trace.num_nodes();
    let mut out = vec![vec![0.0f64; nodes]; cubes];
    for (m, s) in trace.slices().iter().enumerate() {
        if r_space.is_infinite() {
            for (flat, v) in s.values().iter().enumerate() {
                let c = part.cube_of(flat);
                out[c][m] = out[c][m].max(v.norm());
            }
        } else {
            for (flat, v) in s.values().iter().enumerate() {
                let c = part.cube_of(flat);
                out[c][m] += v.norm().powf(r_space);
            }
            for profile in out.iter_mut() {
                profile[m] = (profile[m] * hn).powf(1.0 / r_space);
            }
        }
    }
    Ok(out)
}

/// Composite norm: apply every block of the bank to each time slice,
/// take the cube-decomposed mixed norm, and sum with the weight
/// `2^{sj}` (dyadic) or `<k>^s` (uniform) in `l^1` over the block index.
pub fn composite_block_cube_norm(
    trace: &SpaceTimeTrace,
    s: f64,
    bank: &DecompositionBank,
    q_outer: f64,
    p_time: f64,
    r_space: f64,
    part: &CubePartition,
) -> Result<NormValue> {
    if bank.grid() != trace.grid() {
        return Err(Error::GridMismatch);
    }
    let hat_slices: Vec<SpectralField> = trace
        .slices()
        .iter()
        .map(|f| f.forward())
        .collect::<Result<_>>()?;
    let mut terms = Vec::new();
    let mut labels = Vec::new();
    for i in 0..bank.len() {
        if bank.block_is_empty(i) {
            continue;
        }
        let mut blocked = Vec::with_capacity(hat_slices.len());
        for hat in &hat_slices {
            let mut piece = hat.clone();
            bank.apply_hat_inplace(i, piece.values_mut());
            blocked.push(piece.inverse()?);
        }
        let blocked_trace = SpaceTimeTrace::new(trace.time_grid().clone(), blocked)?;
        let cube_value = cube_mixed_norm(&blocked_trace, q_outer, p_time, r_space, part)?;
        let weight = match bank.label(i) {
            BlockLabel::Dyadic(j) => 2.0f64.powf(s * j as f64),
            BlockLabel::Uniform(k) => (1.0 + (k[0] * k[0] + k[1] * k[1]) as f64).powf(s / 2.0),
        };
        terms.push(weight * cube_value);
        labels.push(bank.label(i));
    }
    Ok(NormValue {
        value: terms.iter().sum(),
        tail_fraction: block_tail_fraction(&terms, &labels),
    })
}

/// The four block norms entering the one-dimensional solution norm.
struct XBlockNorms {
    j: i32,
    linf_t_l2_x: f64,
    l6_xt: f64,
    linf_x_l2_t: f64,
    lm_x_linf_t: f64,
    lbig_x_linf_t: f64,
}

fn x_block_norms(
    trace: &SpaceTimeTrace,
    bank: &DecompositionBank,
    m: u32,
    big_m: u32,
) -> Result<Vec<XBlockNorms>> {
    let hat_slices: Vec<SpectralField> = trace
        .slices()
        .iter()
        .map(|f| f.forward())
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 0..bank.len() {
        if bank.block_is_empty(i) {
            continue;
        }
        let BlockLabel::Dyadic(j) = bank.label(i) else {
            unreachable!()
        };
        let mut blocked = Vec::with_capacity(hat_slices.len());
        for hat in &hat_slices {
            let mut piece = hat.clone();
            bank.apply_hat_inplace(i, piece.values_mut());
            blocked.push(piece.inverse()?);
        }
        let bt = SpaceTimeTrace::new(trace.time_grid().clone(), blocked)?;
        out.push(XBlockNorms {
            j,
            linf_t_l2_x: trace_time_space_norm(&bt, f64::INFINITY, 2.0)?,
            l6_xt: trace_time_space_norm(&bt, 6.0, 6.0)?,
            linf_x_l2_t: trace_space_time_norm(&bt, f64::INFINITY, 2.0)?,
            lm_x_linf_t: trace_space_time_norm(&bt, m as f64, f64::INFINITY)?,
            lbig_x_linf_t: trace_space_time_norm(&bt, big_m as f64, f64::INFINITY)?,
        });
    }
    Ok(out)
}

fn x_seminorm_from_blocks(blocks: &[XBlockNorms], s: f64, s_tilde_m: f64, s_tilde_big: f64) -> f64 {
    blocks
        .iter()
        .map(|b| {
            let two_sj = 2.0f64.powf(s * b.j as f64);
            let core = b.linf_t_l2_x.max(b.l6_xt) + 2.0f64.powf(b.j as f64 / 2.0) * b.linf_x_l2_t;
            two_sj * core
                + 2.0f64.powf((s - s_tilde_m) * b.j as f64) * b.lm_x_linf_t
                + 2.0f64.powf((s - s_tilde_big) * b.j as f64) * b.lbig_x_linf_t
        })
        .sum()
}

/// Single-`s` layer of the solution norm: `sum_j ||| Delta_j d_x^i u |||_s`
/// over `i = 0, 1`. `s` must lie in `[s_m, s~_M]`.
pub fn x_block_seminorm_1d(trace: &SpaceTimeTrace, s: f64, m: u32, big_m: u32) -> Result<f64> {
    let (s_m, _) = index_pair(m)?;
    let (_, s_tilde_big) = index_pair(big_m)?;
    if s < s_m - 1e-12 || s > s_tilde_big + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "s = {s} outside the admissible range [{s_m}, {s_tilde_big}]"
        )));
    }
    let (_, s_tilde_m) = index_pair(m)?;
    let bank = DecompositionBank::homogeneous_1d(trace.grid())?;
    let mut total = 0.0;
    for axis_order in 0..2 {
        let t = if axis_order == 0 {
            trace.clone()
        } else {
            trace.derivative(0)?
        };
        let blocks = x_block_norms(&t, &bank, m, big_m)?;
        total += x_seminorm_from_blocks(&blocks, s, s_tilde_m, s_tilde_big);
    }
    Ok(total)
}

/// The one-dimensional solution-space norm: the supremum of the block
/// seminorm over a 17-point grid of `s` in `[s_m, s~_M]` for `m > 4`, and
/// the variant with the global Strichartz terms and the range
/// `[s~_m, s~_M]` for `m = 4`.
pub fn x_norm_1d(trace: &SpaceTimeTrace, m: u32, big_m: u32) -> Result<NormValue> {
    if trace.grid().dim() != 1 {
        return Err(Error::InvalidParameter(
            "the solution-space norm is one-dimensional".into(),
        ));
    }
    if m < 4 || big_m < m {
        return Err(Error::InvalidParameter(format!(
            "the solution norm needs M >= m >= 4, got m = {m}, M = {big_m}"
        )));
    }
    let (s_m, s_tilde_m) = index_pair(m)?;
    let (_, s_tilde_big) = index_pair(big_m)?;
    let s_lo = if m == 4 { s_tilde_m } else { s_m };
    let s_hi = s_tilde_big;

    let bank = DecompositionBank::homogeneous_1d(trace.grid())?;
    let mut per_axis_blocks = Vec::new();
    let mut global_terms = 0.0;
    for axis_order in 0..2 {
        let t = if axis_order == 0 {
            trace.clone()
        } else {
            trace.derivative(0)?
        };
        if m == 4 {
            let linf_l2 = trace_time_space_norm(&t, f64::INFINITY, 2.0)?;
            let l6 = trace_time_space_norm(&t, 6.0, 6.0)?;
            global_terms += linf_l2.max(l6);
        }
        per_axis_blocks.push(x_block_norms(&t, &bank, m, big_m)?);
    }

    let samples = 17;
    let mut best = 0.0f64;
    let mut best_tail = 0.0f64;
    for i in 0..samples {
        let s = s_lo + (s_hi - s_lo) * i as f64 / (samples - 1) as f64;
        let mut value = 0.0;
        let mut tail = 0.0;
        for blocks in &per_axis_blocks {
            value += x_seminorm_from_blocks(blocks, s, s_tilde_m, s_tilde_big);
            if blocks.len() >= 2 {
                let top = &blocks[blocks.len() - 1];
                let next = &blocks[blocks.len() - 2];
                for b in [top, next] {
                    let two_sj = 2.0f64.powf(s * b.j as f64);
                    tail += two_sj
                        * (b.linf_t_l2_x.max(b.l6_xt)
                            + 2.0f64.powf(b.j as f64 / 2.0) * b.linf_x_l2_t)
                        + 2.0f64.powf((s - s_tilde_m) * b.j as f64) * b.lm_x_linf_t
                        + 2.0f64.powf((s - s_tilde_big) * b.j as f64) * b.lbig_x_linf_t;
                }
            }
        }
        if value > best {
            best = value;
            best_tail = if value > 0.0 { tail / value } else { 0.0 };
        }
    }
    Ok(NormValue {
        value: global_terms + best,
        tail_fraction: best_tail,
    })
}

fn multi_indices(order: u32, dim: usize) -> Vec<[u32; 2]> {
    if dim == 1 {
        vec![[order, 0]]
    } else {
        (0..=order).map(|a| [order - a, a]).collect()
    }
}

fn derivative_multi(u: &SpectralField, beta: [u32; 2]) -> Result<SpectralField> {
    let mut out = u.clone();
    for _ in 0..beta[0] {
        out = out.derivative(0)?;
    }
    for _ in 0..beta[1] {
        out = out.derivative(1)?;
    }
    Ok(out)
}

fn cube_lp(f: &SpectralField, p: f64, part: &CubePartition, cube: usize) -> f64 {
    let grid = f.grid();
    let hn = grid.spacing().powi(grid.dim() as i32);
    if p.is_infinite() {
        let mut m = 0.0f64;
        for (flat, v) in f.values().iter().enumerate() {
            if part.cube_of(flat) == cube {
                m = m.max(v.norm());
            }
        }
        m
    } else {
        let mut sum = 0.0;
        for (flat, v) in f.values().iter().enumerate() {
            if part.cube_of(flat) == cube {
                sum += v.norm().powf(p);
            }
        }
        (hn * sum).powf(1.0 / p)
    }
}

/// Ratio `LHS / RHS` of the Gagliardo-Nirenberg inequality
/// `sum_{|b| = l} ||D^b u||_{L^p(Q)} <= C ||u||_{L^q(Q)}^{1-theta} ||u||_{W^m_r(Q)}^{theta}`
/// on one cube, with derivatives taken spectrally on the whole box.
#[allow(clippy::too_many_arguments)]
pub fn gagliardo_nirenberg_check(
    u: &SpectralField,
    ell: u32,
    m: u32,
    theta: f64,
    p: f64,
    q: f64,
    r: f64,
    part: &CubePartition,
    cube: usize,
) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    check_exponent("r", r)?;
    if m == 0 || ell > m {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= l <= m with m >= 1, got l = {ell}, m = {m}"
        )));
    }
    let n = u.grid().dim() as f64;
    if theta < ell as f64 / m as f64 - 1e-12 || theta > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "theta = {theta} outside [l/m, 1]"
        )));
    }
    let inv = |e: f64| if e.is_infinite() { 0.0 } else { 1.0 / e };
    let relation =
        inv(p) - ell as f64 / n - theta * (inv(r) - m as f64 / n) - (1.0 - theta) * inv(q);
    if relation.abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "exponent relation violated by {relation:e}"
        )));
    }
    if cube >= part.cube_count() {
        return Err(Error::InvalidParameter(format!(
            "cube index {cube} out of range"
        )));
    }
    let phys = u.to_physical()?;
    let mut lhs = 0.0;
    for beta in multi_indices(ell, u.grid().dim()) {
        let d = derivative_multi(&phys, beta)?;
        lhs += cube_lp(&d, p, part, cube);
    }
    let mut sobolev = 0.0;
    for order in 0..=m {
        for beta in multi_indices(order, u.grid().dim()) {
            let d = derivative_multi(&phys, beta)?;
            sobolev += cube_lp(&d, r, part, cube);
        }
    }
    let rhs = cube_lp(&phys, q, part, cube).powf(1.0 - theta) * sobolev.powf(theta);
    if rhs == 0.0 {
        return Ok(0.0);
    }
    Ok(lhs / rhs)
}
