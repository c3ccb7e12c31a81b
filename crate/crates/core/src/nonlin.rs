//! Polynomial nonlinearities in `u`, `conj(u)` and their first
//! derivatives, scaling arithmetic, and the telescoped product identity
//! used as a cross-check oracle.

use crate::decomp::{BankKind, BlockLabel, DecompositionBank};
use crate::error::{Error, Result};
use crate::field::{Representation, SpectralField};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One monomial `c * u^k1 * conj(u)^k2 * prod_i (d_i u)^a_i (d_i conj u)^b_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialTerm {
    pub coeff: Complex64,
    /// powers of `u` and `conj(u)`
    pub kappa: (u32, u32),
    /// per-axis powers of `d_i u` and `d_i conj(u)`
    pub nu: Vec<(u32, u32)>,
}

impl MonomialTerm {
    pub fn total_degree(&self) -> u32 {
        self.kappa.0 + self.kappa.1 + self.nu.iter().map(|&(a, b)| a + b).sum::<u32>()
    }
}

/// Serialized form of one term in the nonlinearity specification file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermSpec {
    pub re: f64,
    pub im: f64,
    pub kappa: [u32; 2],
    pub nu: Vec<[u32; 2]>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialNonlinearity {
    dim: usize,
    terms: Vec<MonomialTerm>,
}

impl PolynomialNonlinearity {
    pub fn new(dim: usize, terms: Vec<MonomialTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter(
                "a nonlinearity needs at least one term".into(),
            ));
        }
        for term in &terms {
            if term.nu.len() != dim {
                return Err(Error::InvalidParameter(format!(
                    "term carries {} gradient slots for a {dim}-dimensional field",
                    term.nu.len()
                )));
            }
            if !term.coeff.re.is_finite() || !term.coeff.im.is_finite() {
                return Err(Error::InvalidParameter("non-finite coefficient".into()));
            }
            if term.total_degree() < 2 {
                return Err(Error::InvalidParameter(format!(
                    "term degree {} below the quadratic floor",
                    term.total_degree()
                )));
            }
        }
        Ok(Self { dim, terms })
    }

    /// `F = (d_x1 u)^power`, the model derivative nonlinearity.
    pub fn derivative_power(dim: usize, power: u32) -> Result<Self> {
        let mut nu = vec![(0, 0); dim];
        nu[0] = (power, 0);
        Self::new(
            dim,
            vec![MonomialTerm {
                coeff: Complex64::new(1.0, 0.0),
                kappa: (0, 0),
                nu,
            }],
        )
    }

    /// `F = |u|^2 u = u^2 conj(u)`.
    pub fn cubic_gauge_invariant(dim: usize) -> Result<Self> {
        Self::new(
            dim,
            vec![MonomialTerm {
                coeff: Complex64::new(1.0, 0.0),
                kappa: (2, 1),
                nu: vec![(0, 0); dim],
            }],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[MonomialTerm] {
        &self.terms
    }

    pub fn min_total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.total_degree()).min().unwrap()
    }

    pub fn max_total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.total_degree()).max().unwrap()
    }

    /// Lower degree exponent `m` with degrees in `[m+1, M+1]`.
    pub fn lower_exponent(&self) -> u32 {
        self.min_total_degree() - 1
    }

    /// Upper degree exponent `M`.
    pub fn upper_exponent(&self) -> u32 {
        self.max_total_degree() - 1
    }

    fn needs_gradient(&self, axis: usize) -> bool {
        self.terms.iter().any(|t| t.nu[axis] != (0, 0))
    }

    /// Pointwise evaluation of `F(u, conj u, grad u, grad conj u)` with
    /// derivatives computed spectrally.
    pub fn evaluate(&self, u: &SpectralField) -> Result<SpectralField> {
        self.evaluate_with_options(u, false)
    }

    /// Evaluation with an optional 2/3-rule dealias of input and output.
    pub fn evaluate_with_options(&self, u: &SpectralField, dealias: bool) -> Result<SpectralField> {
        if u.representation() != Representation::Physical {
            return Err(Error::WrongRepresentation {
                expected: Representation::Physical,
                found: u.representation(),
            });
        }
        let u = if dealias {
            dealias_two_thirds(u)?
        } else {
            u.clone()
        };
        let grid = u.grid().clone();
        let mut gradients: Vec<Option<SpectralField>> = vec![None; self.dim];
        for axis in 0..self.dim {
            if self.needs_gradient(axis) {
                gradients[axis] = Some(u.derivative(axis)?);
            }
        }
        let mut out = SpectralField::zeros(&grid, Representation::Physical);
        for term in &self.terms {
            for flat in 0..grid.len() {
                let v = u.values()[flat];
                let mut prod = term.coeff;
                prod *= pow_c(v, term.kappa.0) * pow_c(v.conj(), term.kappa.1);
                for axis in 0..self.dim {
                    let (a, b) = term.nu[axis];
                    if a > 0 || b > 0 {
                        let g = gradients[axis].as_ref().unwrap().values()[flat];
                        prod *= pow_c(g, a) * pow_c(g.conj(), b);
                    }
                }
                out.values_mut()[flat] += prod;
            }
        }
        if dealias {
            dealias_two_thirds(&out)
        } else {
            Ok(out)
        }
    }
}

fn pow_c(z: Complex64, n: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        acc *= z;
    }
    acc
}

/// Zero all modes with any `|xi_i|` beyond two thirds of the Nyquist
/// frequency.
fn dealias_two_thirds(u: &SpectralField) -> Result<SpectralField> {
    let grid = u.grid().clone();
    let cutoff = grid.nyquist() * 2.0 / 3.0;
    let mut hat = u.to_frequency()?;
    for flat in 0..grid.len() {
        let xi = grid.freq_vector(flat);
        if xi[..grid.dim()].iter().any(|x| x.abs() > cutoff) {
            hat.values_mut()[flat] = Complex64::new(0.0, 0.0);
        }
    }
    match u.representation() {
        Representation::Frequency => Ok(hat),
        Representation::Physical => hat.inverse(),
    }
}

/// Load a nonlinearity from its JSON term list.
pub fn nonlinearity_from_json(dim: usize, text: &str) -> Result<PolynomialNonlinearity> {
    let specs: Vec<TermSpec> = serde_json::from_str(text)?;
    let terms = specs
        .into_iter()
        .map(|t| MonomialTerm {
            coeff: Complex64::new(t.re, t.im),
            kappa: (t.kappa[0], t.kappa[1]),
            nu: t.nu.iter().map(|p| (p[0], p[1])).collect(),
        })
        .collect();
    PolynomialNonlinearity::new(dim, terms)
}

pub fn nonlinearity_to_json(f: &PolynomialNonlinearity) -> Result<String> {
    let specs: Vec<TermSpec> = f
        .terms()
        .iter()
        .map(|t| TermSpec {
            re: t.coeff.re,
            im: t.coeff.im,
            kappa: [t.kappa.0, t.kappa.1],
            nu: t.nu.iter().map(|&(a, b)| [a, b]).collect(),
        })
        .collect();
    Ok(serde_json::to_string_pretty(&specs)?)
}

/// Scaling-critical Sobolev index `s = 1 + n/2 - 1/(nu - 1)` of the model
/// equation with nonlinearity `(d_x u)^nu`.
pub fn critical_index(nu: u32, n: usize) -> Result<f64> {
    if nu < 2 {
        return Err(Error::InvalidParameter(format!(
            "critical index needs power nu >= 2, got {nu}"
        )));
    }
    Ok(1.0 + n as f64 / 2.0 - 1.0 / (nu as f64 - 1.0))
}

/// The one-dimensional regularity pair `(s_k, s~_k) = (1/2 - 2/k, 1/2 - 1/k)`.
pub fn index_pair(kappa: u32) -> Result<(f64, f64)> {
    if kappa < 1 {
        return Err(Error::InvalidParameter(
            "index pair needs kappa >= 1".into(),
        ));
    }
    let k = kappa as f64;
    Ok((0.5 - 2.0 / k, 0.5 - 1.0 / k))
}

/// Dyadic scaling transform at `t = 0`:
/// `u -> lambda^((2-nu)/(nu-1)) u(lambda x)` realized by spectral
/// resampling, mass-normalized so the whole-space dilation identities for
/// homogeneous Sobolev norms hold on the periodic lattice.
pub fn scaling_transform(u: &SpectralField, lambda: f64, nu: u32) -> Result<SpectralField> {
    if nu < 2 {
        return Err(Error::InvalidParameter(format!(
            "scaling transform needs power nu >= 2, got {nu}"
        )));
    }
    let log2 = lambda.log2();
    let j = log2.round();
    if !(lambda > 0.0) || (log2 - j).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "dilation factor must be a power of two, got {lambda}"
        )));
    }
    let j = j as i32;
    let grid = u.grid().clone();
    let n = grid.dim();
    let amp = lambda.powf((2.0 - nu as f64) / (nu as f64 - 1.0)) * lambda.powf(-(n as f64) / 2.0);
    let hat = u.to_frequency()?;
    let mut out = SpectralField::zeros(&grid, Representation::Frequency);
    if j == 0 {
        out = hat.scaled(Complex64::new(amp, 0.0));
    } else {
        let stride = 2i64.pow(j.unsigned_abs());
        for flat in 0..grid.len() {
            let k = grid.wavenumber_vector(flat);
            if j > 0 {
                // v(x) = u(lambda x): coefficient at eta comes from eta / lambda
                if k[..n.min(2)].iter().all(|&w| w % stride == 0) {
                    let source = [k[0] / stride, k[1] / stride];
                    if let Some(src) = grid.index_of_wavenumber(source) {
                        out.values_mut()[flat] = hat.values()[src] * amp;
                    }
                }
            } else {
                let source = [k[0] * stride, k[1] * stride];
                if let Some(src) = grid.index_of_wavenumber(source) {
                    out.values_mut()[flat] = hat.values()[src] * amp;
                }
            }
        }
    }
    match u.representation() {
        Representation::Frequency => Ok(out),
        Representation::Physical => out.inverse(),
    }
}

/// Reconstruct `v_1 ... v_K` from the telescoped block expansion
/// `sum_r sum_k Delta_{r+1} v_k prod_{i<k} S_r v_i prod_{i>k} S_{r+1} v_i`.
pub fn telescoping_product(
    fields: &[SpectralField],
    bank: &DecompositionBank,
) -> Result<SpectralField> {
    if fields.is_empty() {
        return Err(Error::InvalidParameter(
            "telescoped product needs at least one factor".into(),
        ));
    }
    if bank.kind() != BankKind::Dyadic {
        return Err(Error::InvalidParameter(
            "telescoped product uses the inhomogeneous dyadic bank".into(),
        ));
    }
    let grid = fields[0].grid().clone();
    for f in fields {
        if f.grid() != &grid {
            return Err(Error::GridMismatch);
        }
    }
    if grid != *bank.grid() {
        return Err(Error::GridMismatch);
    }
    let physical: Vec<SpectralField> = fields
        .iter()
        .map(|f| f.to_physical())
        .collect::<Result<_>>()?;
    let count = physical.len();
    let j_max = match bank.label(bank.len() - 1) {
        BlockLabel::Dyadic(j) => j,
        _ => unreachable!(),
    };

    // partial sums S_r v_i for r in [-1, j_max], blocks Delta_{r+1} v_i
    let mut partials: Vec<Vec<SpectralField>> = Vec::with_capacity(count);
    let mut blocks: Vec<Vec<SpectralField>> = Vec::with_capacity(count);
    for f in &physical {
        let mut per_r = Vec::with_capacity((j_max + 2) as usize);
        for r in -1..=j_max {
            per_r.push(bank.partial_sum(r, f)?);
        }
        partials.push(per_r);
        let mut per_j = Vec::with_capacity((j_max + 1) as usize);
        for j in 0..=j_max {
            let pos = bank.position_of(BlockLabel::Dyadic(j)).unwrap();
            per_j.push(bank.apply_block(pos, f)?);
        }
        blocks.push(per_j);
    }

    let mut out = SpectralField::zeros(&grid, Representation::Physical);
    let len = grid.len();
    for r in -1..=j_max - 1 {
        let r_idx = (r + 1) as usize;
        for k in 0..count {
            let block = &blocks[k][(r + 1) as usize];
            for flat in 0..len {
                let mut prod = block.values()[flat];
                for i in 0..k {
                    prod *= partials[i][r_idx].values()[flat];
                }
                for i in (k + 1)..count {
                    prod *= partials[i][r_idx + 1].values()[flat];
                }
                out.values_mut()[flat] += prod;
            }
        }
    }
    match fields[0].representation() {
        Representation::Physical => Ok(out),
        Representation::Frequency => out.forward(),
    }
}

/// Direct pointwise product of the factors, the oracle side of the
/// telescoped reconstruction.
pub fn direct_product(fields: &[SpectralField]) -> Result<SpectralField> {
    if fields.is_empty() {
        return Err(Error::InvalidParameter(
            "product needs at least one factor".into(),
        ));
    }
    let grid = fields[0].grid().clone();
    let mut out = fields[0].to_physical()?;
    for f in &fields[1..] {
        if f.grid() != &grid {
            return Err(Error::GridMismatch);
        }
        let p = f.to_physical()?;
        for (a, b) in out.values_mut().iter_mut().zip(p.values()) {
            *a *= b;
        }
    }
    Ok(out)
}
