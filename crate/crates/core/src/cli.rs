//! Run configuration, scenario orchestration, persistence of run records,
//! and table emission.
//!
//! Every run writes its artifacts beneath one output directory and closes
//! with a `manifest.json` listing each file with its SHA-256 digest, so a
//! rerun with the same configuration can be compared hash for hash.

use crate::error::{Error, Result};
use crate::field::{
    gaussian_packet, random_band_limited, FrequencyGrid, SignSignature, SpectralField,
};
use crate::nonlin::nonlinearity_from_json;
use crate::norms::{
    besov_norm, homogeneous_besov_norm_1d, lebesgue_norm, modulation_norm, sobolev_norm,
    NormValue,
};
use crate::decomp::DecompositionBank;
use crate::prober::{run_probe, ProbeSpec};
use crate::propagator::{Propagator, TimeGrid};
use crate::snapshot;
use crate::solver::{
    extract_scattering_state, picard_solve, split_step_evolve, PicardOptions, SolutionNorm,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Evolve,
    Picard,
    Probe,
    Scatter,
    Norms,
    Selfcheck,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridParams {
    pub dim: usize,
    pub points_per_dim: usize,
    pub half_length: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimeParams {
    pub t_end: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatumSpec {
    Gaussian {
        center: Vec<f64>,
        sigma: f64,
        carrier: Vec<f64>,
    },
    RandomBandLimited {
        band: f64,
        decay: f64,
    },
    Snapshot {
        path: PathBuf,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormSpecEntry {
    pub id: String,
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub homogeneous: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub scenario: ScenarioKind,
    pub grid: GridParams,
    #[serde(default)]
    pub signature: Option<Vec<i8>>,
    #[serde(default)]
    pub time: Option<TimeParams>,
    /// path to a nonlinearity term-list JSON; absent means free evolution
    #[serde(default)]
    pub nonlinearity: Option<PathBuf>,
    #[serde(default)]
    pub datum: Option<DatumSpec>,
    /// rescale the datum to this size in `H^(sobolev_index)`
    #[serde(default)]
    pub amplitude: Option<f64>,
    #[serde(default)]
    pub sobolev_index: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub dealias: Option<bool>,
    #[serde(default)]
    pub save_trace: Option<bool>,
    /// number of pullback samples for the scatter scenario
    #[serde(default)]
    pub scatter_samples: Option<usize>,
    /// probe specification file for the probe scenario
    #[serde(default)]
    pub probe_spec: Option<PathBuf>,
    #[serde(default)]
    pub norms: Option<Vec<NormSpecEntry>>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    fn signature(&self) -> Result<SignSignature> {
        match &self.signature {
            Some(signs) => SignSignature::new(signs.clone()),
            None => Ok(SignSignature::elliptic(self.grid.dim)),
        }
    }
}

/// SHA-256 of the canonical JSON serialization of the configuration.
pub fn config_hash(config: &RunConfig) -> Result<String> {
    let text = serde_json::to_string(config)?;
    Ok(hex_digest(text.as_bytes()))
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Collects artifacts under one directory and finishes with the manifest.
struct ArtifactSink {
    root: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl ArtifactSink {
    fn new(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            entries: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, bytes)?;
        self.entries.push(ManifestEntry {
            path: name.to_string(),
            sha256: hex_digest(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        self.write(name, text.as_bytes())
    }

    fn write_snapshot(
        &mut self,
        name: &str,
        field: &SpectralField,
        signature: &SignSignature,
    ) -> Result<()> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        snapshot::write_field(&path, field, signature)?;
        let bytes = std::fs::read(&path)?;
        self.entries.push(ManifestEntry {
            path: name.to_string(),
            sha256: hex_digest(&bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    fn finish(mut self) -> Result<Vec<ManifestEntry>> {
        self.entries.sort_by(|a, b| a.path.cmp(&b.path));
        let text = serde_json::to_string_pretty(&self.entries)?;
        std::fs::write(self.root.join("manifest.json"), text)?;
        Ok(self.entries)
    }
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub scenario: ScenarioKind,
    pub config_hash: String,
    pub artifacts: Vec<ManifestEntry>,
    /// set by scenarios with a pass/fail outcome
    pub ok: bool,
}

fn build_datum(config: &RunConfig, grid: &FrequencyGrid) -> Result<SpectralField> {
    let datum = config.datum.as_ref().ok_or_else(|| {
        Error::InvalidParameter("this scenario needs a datum specification".into())
    })?;
    let field = match datum {
        DatumSpec::Gaussian {
            center,
            sigma,
            carrier,
        } => gaussian_packet(grid, center, *sigma, carrier)?,
        DatumSpec::RandomBandLimited { band, decay } => {
            random_band_limited(grid, config.seed.unwrap_or(0), *band, *decay)?
                .inverse()?
        }
        DatumSpec::Snapshot { path } => {
            let (field, _) = snapshot::read_field(path)?;
            field.to_physical()?
        }
    };
    match (config.amplitude, config.sobolev_index) {
        (Some(delta), s) => {
            let s = s.unwrap_or(1.0);
            let base = sobolev_norm(&field, s, false)?;
            if base == 0.0 {
                return Err(Error::InvalidParameter("cannot rescale a zero datum".into()));
            }
            Ok(field.scaled(Complex64::new(delta / base, 0.0)))
        }
        (None, _) => Ok(field),
    }
}

fn require_time(config: &RunConfig) -> Result<TimeGrid> {
    let t = config
        .time
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("this scenario needs time parameters".into()))?;
    TimeGrid::new(t.t_end, t.steps)
}

#[derive(Serialize)]
struct TraceSidecar {
    times: Vec<f64>,
    snapshots: Vec<String>,
}

fn save_trace(
    sink: &mut ArtifactSink,
    trace: &crate::norms::SpaceTimeTrace,
    signature: &SignSignature,
) -> Result<()> {
    let mut names = Vec::new();
    for m in 0..trace.num_nodes() {
        let name = format!("trace/u_{m:05}.dnls");
        sink.write_snapshot(&name, trace.slice(m), signature)?;
        names.push(name);
    }
    let sidecar = TraceSidecar {
        times: trace.time_grid().nodes(),
        snapshots: names,
    };
    sink.write_json("trace_index.json", &sidecar)
}

/// Execute one configuration. Artifacts land in `out_dir`; the summary
/// carries the manifest.
pub fn run(config: &RunConfig, out_dir: &Path, workers: usize) -> Result<RunSummary> {
    let hash = config_hash(config)?;
    let grid = FrequencyGrid::new(
        config.grid.dim,
        config.grid.points_per_dim,
        config.grid.half_length,
    )?;
    let signature = config.signature()?;
    let prop = Propagator::new(&grid, &signature)?;
    let nonlinearity = match &config.nonlinearity {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::InvalidParameter(format!(
                    "nonlinearity file {} unreadable: {e}",
                    path.display()
                ))
            })?;
            Some(nonlinearity_from_json(grid.dim(), &text)?)
        }
        None => None,
    };
    let mut sink = ArtifactSink::new(out_dir)?;
    let mut ok = true;
    match config.scenario {
        ScenarioKind::Evolve => {
            let tg = require_time(config)?;
            let u0 = build_datum(config, &grid)?;
            let trace =
                split_step_evolve(&u0, nonlinearity.as_ref(), &prop, tg.dt(), tg.steps(), true)?;
            save_trace(&mut sink, &trace, &signature)?;
            #[derive(Serialize)]
            struct EvolveRecord {
                config_hash: String,
                t_end: f64,
                steps: usize,
                l2_initial: f64,
                l2_final: f64,
            }
            sink.write_json(
                "record.json",
                &EvolveRecord {
                    config_hash: hash.clone(),
                    t_end: tg.t_end(),
                    steps: tg.steps(),
                    l2_initial: trace.slice(0).l2_norm(),
                    l2_final: trace.slice(tg.steps()).l2_norm(),
                },
            )?;
        }
        ScenarioKind::Picard => {
            let tg = require_time(config)?;
            let u0 = build_datum(config, &grid)?;
            let opts = PicardOptions {
                tol: config.tol.unwrap_or(1e-8),
                max_iter: config.max_iter.unwrap_or(40),
                norm: SolutionNorm::L2TraceSup,
                dealias: config.dealias.unwrap_or(false),
            };
            let state = picard_solve(&u0, nonlinearity.as_ref(), &prop, &tg, &opts)?;
            if config.save_trace.unwrap_or(false) {
                save_trace(&mut sink, &state.trace, &signature)?;
            }
            #[derive(Serialize)]
            struct PicardRecord {
                config_hash: String,
                iterations: usize,
                contraction_history: Vec<f64>,
                l2_history: Vec<f64>,
                residual: f64,
                ball_radius: f64,
                geometric_tail: bool,
            }
            sink.write_json(
                "record.json",
                &PicardRecord {
                    config_hash: hash.clone(),
                    iterations: state.iterations,
                    geometric_tail: state.geometric_tail(),
                    contraction_history: state.contraction_history,
                    l2_history: state.l2_history,
                    residual: state.residual,
                    ball_radius: state.ball_radius,
                },
            )?;
        }
        ScenarioKind::Scatter => {
            let tg = require_time(config)?;
            let u0 = build_datum(config, &grid)?;
            let trace =
                split_step_evolve(&u0, nonlinearity.as_ref(), &prop, tg.dt(), tg.steps(), true)?;
            let samples = config.scatter_samples.unwrap_or(17).max(2);
            let idx: Vec<usize> = (0..samples)
                .map(|i| i * tg.steps() / (samples - 1))
                .collect();
            let record = extract_scattering_state(&trace, &prop, &idx)?;
            sink.write_snapshot("u_plus.dnls", &record.u_plus, &signature)?;
            #[derive(Serialize)]
            struct ScatterRecord {
                config_hash: String,
                sample_times: Vec<f64>,
                increments: Vec<f64>,
                scattering_consistent: bool,
            }
            ok = record.scattering_consistent;
            sink.write_json(
                "record.json",
                &ScatterRecord {
                    config_hash: hash.clone(),
                    sample_times: record.sample_times,
                    increments: record.increments,
                    scattering_consistent: record.scattering_consistent,
                },
            )?;
        }
        ScenarioKind::Probe => {
            let path = config.probe_spec.as_ref().ok_or_else(|| {
                Error::InvalidParameter("the probe scenario needs a probe_spec path".into())
            })?;
            let text = std::fs::read_to_string(path)?;
            let spec: ProbeSpec = serde_json::from_str(&text)?;
            let report = run_probe(&spec, workers)?;
            ok = report.pass;
            let mut csv = String::from("seed,config,points_per_dim,t_end,band,ratio\n");
            for s in &report.samples {
                csv.push_str(&format!(
                    "{},{},{},{},{},{:.17e}\n",
                    s.seed, s.config, s.points_per_dim, s.t_end, s.band, s.ratio
                ));
            }
            sink.write("ratios.csv", csv.as_bytes())?;
            #[derive(Serialize)]
            struct ProbeArtifact<'a> {
                config_hash: String,
                #[serde(flatten)]
                report: &'a crate::prober::ProbeReport,
            }
            sink.write_json(
                "report.json",
                &ProbeArtifact {
                    config_hash: hash.clone(),
                    report: &report,
                },
            )?;
        }
        ScenarioKind::Norms => {
            let u0 = build_datum(config, &grid)?;
            let entries = config.norms.clone().unwrap_or_default();
            let (csv, reports) = norm_table(&[("field".to_string(), u0)], &entries)?;
            sink.write("norms.csv", csv.as_bytes())?;
            #[derive(Serialize)]
            struct NormArtifact {
                config_hash: String,
                reports: Vec<NormReport>,
            }
            sink.write_json(
                "norm_reports.json",
                &NormArtifact {
                    config_hash: hash.clone(),
                    reports,
                },
            )?;
        }
        ScenarioKind::Selfcheck => {
            let report = selfcheck(&grid, &signature)?;
            ok = report.iter().all(|(_, pass, _)| *pass);
            #[derive(Serialize)]
            struct SelfcheckRecord {
                config_hash: String,
                checks: Vec<(String, bool, f64)>,
            }
            for (name, pass, defect) in &report {
                println!(
                    "[selfcheck] {name}: {} (defect {defect:.3e})",
                    if *pass { "PASS" } else { "FAIL" }
                );
            }
            sink.write_json(
                "record.json",
                &SelfcheckRecord {
                    config_hash: hash.clone(),
                    checks: report,
                },
            )?;
        }
    }
    let artifacts = sink.finish()?;
    Ok(RunSummary {
        scenario: config.scenario,
        config_hash: hash,
        artifacts,
        ok,
    })
}

/// One row of the norm table, the JSON face of a computed norm.
#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub object: String,
    pub norm_id: String,
    pub params: serde_json::Value,
    pub value: f64,
    pub tail_fraction: f64,
    pub warnings: Vec<String>,
}

fn evaluate_norm(entry: &NormSpecEntry, field: &SpectralField) -> Result<(f64, f64)> {
    let s = entry.s.unwrap_or(0.0);
    let p = entry.p.unwrap_or(2.0);
    let q = entry.q.unwrap_or(1.0);
    let value: NormValue = match entry.id.as_str() {
        "lebesgue" => NormValue {
            value: lebesgue_norm(&field.to_physical()?, p)?,
            tail_fraction: 0.0,
        },
        "sobolev" => NormValue {
            value: sobolev_norm(field, s, entry.homogeneous.unwrap_or(false))?,
            tail_fraction: 0.0,
        },
        "besov" => {
            let bank = DecompositionBank::dyadic(field.grid());
            besov_norm(field, s, p, q, &bank)?
        }
        "homogeneous_besov_1d" => homogeneous_besov_norm_1d(field, s)?,
        "modulation" => {
            let bank = DecompositionBank::uniform(field.grid());
            modulation_norm(field, s, p, q, &bank)?
        }
        other => return Err(Error::UnknownNorm(other.to_string())),
    };
    Ok((value.value, value.tail_fraction))
}

/// One row per `(object, norm spec)` with value and tail diagnostics.
pub fn norm_table(
    objects: &[(String, SpectralField)],
    entries: &[NormSpecEntry],
) -> Result<(String, Vec<NormReport>)> {
    let mut csv = String::from("object,norm_id,s,p,q,homogeneous,value,tail_fraction,warnings\n");
    let mut reports = Vec::new();
    for (name, field) in objects {
        for entry in entries {
            let (value, tail) = evaluate_norm(entry, field)?;
            let mut warnings = Vec::new();
            if tail > 0.01 {
                warnings.push(format!(
                    "index-sum tail fraction {tail:.3} above 1%: possible truncation"
                ));
            }
            csv.push_str(&format!(
                "{},{},{},{},{},{},{:.17e},{:.3e},{}\n",
                name,
                entry.id,
                entry.s.map_or(String::new(), |v| v.to_string()),
                entry.p.map_or(String::new(), |v| v.to_string()),
                entry.q.map_or(String::new(), |v| v.to_string()),
                entry.homogeneous.map_or(String::new(), |v| v.to_string()),
                value,
                tail,
                warnings.join("; "),
            ));
            reports.push(NormReport {
                object: name.clone(),
                norm_id: entry.id.clone(),
                params: serde_json::json!({
                    "s": entry.s, "p": entry.p, "q": entry.q,
                    "homogeneous": entry.homogeneous,
                }),
                value,
                tail_fraction: tail,
                warnings,
            });
        }
    }
    Ok((csv, reports))
}

/// Quick invariant suite: partition of unity, transform round trip,
/// unitarity and the group law on seeded data.
pub fn selfcheck(grid: &FrequencyGrid, signature: &SignSignature) -> Result<Vec<(String, bool, f64)>> {
    let mut checks = Vec::new();
    let dyadic = DecompositionBank::dyadic(grid);
    let d = dyadic.partition_defect();
    checks.push(("dyadic partition of unity".to_string(), d <= 1e-12, d));
    let uniform = DecompositionBank::uniform(grid);
    let d = uniform.partition_defect();
    checks.push(("uniform partition of unity".to_string(), d <= 1e-12, d));

    let prop = Propagator::new(grid, signature)?;
    let mut worst_round = 0.0f64;
    let mut worst_unit = 0.0f64;
    let mut worst_group = 0.0f64;
    for seed in 0..8u64 {
        let f = random_band_limited(grid, seed, grid.nyquist() / 2.0, 1.0)?;
        let phys = f.inverse()?;
        let back = phys.forward()?;
        worst_round = worst_round.max((&back - &f).l2_norm() / f.l2_norm());
        let evolved = prop.free_evolve(&f, 0.37 + seed as f64)?;
        worst_unit = worst_unit.max((evolved.l2_norm() / f.l2_norm() - 1.0).abs());
        worst_group = worst_group.max(prop.semigroup_check(&f, 0.3, 0.7)?);
    }
    checks.push((
        "transform round trip".to_string(),
        worst_round <= 1e-12,
        worst_round,
    ));
    checks.push(("free evolution unitarity".to_string(), worst_unit <= 1e-12, worst_unit));
    checks.push(("group law".to_string(), worst_group <= 1e-12, worst_group));
    Ok(checks)
}
