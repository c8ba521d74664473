//! Scenario runs: single time series, GCS ensembles, fidelity and classical
//! sphere sampling.

use std::path::Path;
use std::sync::Arc;

use qkt_core::{
    build_gcs, classify, evolve, fibonacci_sphere, fidelity_series_with, haar_random_state,
    ClassicalState, FloquetOperator, GcsParams, GeRecord, QuarterTurn, SpinSystem, StateVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{self, GaussianFit, Plateau};
use crate::config::{EnsembleSpec, InitialState, Placement, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{self, fmt_f64, Metadata};

/// Every emitted row must satisfy the GE/extent identity to this accuracy.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

/// One CSV row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Row {
    pub t: usize,
    pub ge_su2: f64,
    pub ge_so2: f64,
    pub ext_x: f64,
    pub ext_y: f64,
    pub ext_z: f64,
    pub fidelity: Option<f64>,
}

impl Row {
    fn csv_line(&self) -> String {
        let fid = self.fidelity.map(fmt_f64).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.t,
            fmt_f64(self.ge_su2),
            fmt_f64(self.ge_so2),
            fmt_f64(self.ext_x),
            fmt_f64(self.ext_y),
            fmt_f64(self.ext_z),
            fid
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    pub rows: Vec<Row>,
    pub metadata: Metadata,
}

impl TimeSeries {
    pub fn ge_su2(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.ge_su2).collect()
    }

    pub fn ext_z(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.ext_z).collect()
    }

    pub fn to_csv(&self) -> String {
        let rows: Vec<String> = self.rows.iter().map(Row::csv_line).collect();
        output::render(&self.metadata, output::TIMESERIES_HEADER, &rows)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        output::write_atomic(path, &self.to_csv())
    }
}

/// Pointwise ensemble statistics of the su(2) purity.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSeries {
    pub p_su2_mean: Vec<f64>,
    pub p_su2_std: Vec<f64>,
    pub metadata: Metadata,
}

impl EnsembleSeries {
    pub fn ge_su2_mean(&self) -> Vec<f64> {
        self.p_su2_mean.iter().map(|p| 1.0 - p).collect()
    }

    pub fn to_csv(&self) -> String {
        let rows: Vec<String> = self
            .p_su2_mean
            .iter()
            .zip(&self.p_su2_std)
            .enumerate()
            .map(|(t, (m, s))| format!("{t},{},{},{}", fmt_f64(*m), fmt_f64(*s), fmt_f64(1.0 - m)))
            .collect();
        output::render(&self.metadata, output::ENSEMBLE_HEADER, &rows)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        output::write_atomic(path, &self.to_csv())
    }
}

/// Saturation and fit of an ensemble run, as printed by `--json`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub saturation_mean: f64,
    pub saturation_std: f64,
    pub fit_a: f64,
    pub fit_residual: f64,
    pub fit_window: (usize, usize),
    pub rmt_prediction: f64,
}

impl EnsembleSummary {
    pub fn from_series(series: &EnsembleSeries, j: f64) -> Result<Self> {
        let Plateau { mean, std, .. } = analysis::plateau(&series.ge_su2_mean());
        let GaussianFit {
            a,
            window,
            rms_residual,
        } = analysis::fit_gaussian(&series.p_su2_mean)?;
        Ok(EnsembleSummary {
            saturation_mean: mean,
            saturation_std: std,
            fit_a: a,
            fit_residual: rms_residual,
            fit_window: window,
            rmt_prediction: 1.0 - 1.0 / (2.0 * j),
        })
    }
}

/// Options that are not part of the config file.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Write the `generated_unix` metadata line.
    pub timestamp: bool,
}

/// Spin system plus a Floquet operator, sharing the expensive rotation.
pub struct Prepared {
    pub sys: SpinSystem<f64>,
    pub floquet: FloquetOperator<f64>,
}

impl Prepared {
    pub fn new(j: f64, k: f64) -> Result<Self> {
        let sys = SpinSystem::<f64>::from_j(j)?;
        let floquet = FloquetOperator::new(&sys, k)?;
        Ok(Prepared { sys, floquet })
    }

    /// Same spin, different kick strength, reusing the rotation.
    pub fn with_k(&self, k: f64) -> Result<Self> {
        let sys = self.sys.clone();
        let floquet = FloquetOperator::with_rotation(&sys, Arc::clone(self.floquet.rotation()), k)?;
        Ok(Prepared { sys, floquet })
    }

    pub fn rotation(&self) -> &Arc<QuarterTurn<f64>> {
        self.floquet.rotation()
    }
}

pub fn initial_state(sys: &SpinSystem<f64>, init: &InitialState) -> Result<StateVector<f64>> {
    Ok(match *init {
        InitialState::Gcs { theta, phi } => build_gcs(sys, &GcsParams::new(theta, phi)?),
        InitialState::Basis { m } => StateVector::basis(sys.spin(), m)?,
        InitialState::Haar { seed } => haar_random_state(sys.dim(), seed)?,
    })
}

/// Evolves `psi0` and measures every step, checking the GE/extent identity.
pub fn simulate(
    prep: &Prepared,
    psi0: &StateVector<f64>,
    steps: usize,
    delta: Option<f64>,
) -> Result<Vec<Row>> {
    let j = prep.sys.j();
    let mut rows = Vec::with_capacity(steps + 1);
    let mut failure: Option<CliError> = None;
    evolve(&prep.floquet, psi0, steps, |rec| {
        if failure.is_some() {
            return;
        }
        match GeRecord::measure(&prep.sys, rec.psi) {
            Ok(g) => {
                let residual = g.identity_residual(j);
                if !(residual < IDENTITY_TOLERANCE) {
                    failure = Some(CliError::Numerical(format!(
                        "GE/extent identity residual {residual:e} at t={}",
                        rec.t
                    )));
                }
                rows.push(Row {
                    t: rec.t,
                    ge_su2: g.ge_su2,
                    ge_so2: g.ge_so2,
                    ext_x: g.ext_x,
                    ext_y: g.ext_y,
                    ext_z: g.ext_z,
                    fidelity: None,
                });
            }
            Err(e) => failure = Some(e.into()),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    if let Some(delta) = delta {
        let f = fidelity_series_with(&prep.sys, &prep.floquet, delta, psi0, steps)?;
        for (row, f) in rows.iter_mut().zip(f) {
            row.fidelity = Some(f);
        }
    }
    Ok(rows)
}

fn base_metadata(cfg: &RunConfig, opts: &RunOptions) -> Metadata {
    let mut meta = Metadata::new(opts.timestamp);
    meta.push("config", cfg.echo());
    meta.push(
        "seed",
        cfg.effective_seed().map_or_else(|| "none".to_string(), |s| s.to_string()),
    );
    meta
}

/// Runs a single-state config and writes its CSV to `cfg.output_path`.
pub fn run_timeseries(cfg: &RunConfig, opts: &RunOptions) -> Result<TimeSeries> {
    cfg.validate()?;
    let prep = Prepared::new(cfg.j, cfg.k)?;
    run_timeseries_with(&prep, cfg, opts)
}

/// As [`run_timeseries`] with a prebuilt system and operator.
pub fn run_timeseries_with(prep: &Prepared, cfg: &RunConfig, opts: &RunOptions) -> Result<TimeSeries> {
    cfg.validate()?;
    let init = match (&cfg.ensemble, &cfg.initial) {
        (None, Some(init)) => init,
        _ => {
            return Err(CliError::validation(
                "ensemble",
                "ensemble configs go through the ensemble run",
            ))
        }
    };
    check_prepared(prep, cfg)?;
    let psi0 = initial_state(&prep.sys, init)?;
    let rows = simulate(prep, &psi0, cfg.steps, cfg.delta)?;
    let series = TimeSeries {
        rows,
        metadata: base_metadata(cfg, opts),
    };
    series.write(&cfg.output_path)?;
    Ok(series)
}

fn check_prepared(prep: &Prepared, cfg: &RunConfig) -> Result<()> {
    if prep.sys.spin() != cfg.spin()? || prep.floquet.k() != cfg.k {
        return Err(CliError::validation("J", "prepared operator does not match the config"));
    }
    Ok(())
}

/// Ensemble centers for `spec`, in member order.
pub fn ensemble_centers(spec: &EnsembleSpec) -> Result<Vec<GcsParams<f64>>> {
    let centers = match spec.placement {
        Placement::FibonacciSphere => fibonacci_sphere::<f64>(spec.count)
            .iter()
            .map(|p| p.to_gcs())
            .collect(),
        Placement::SeededUniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            (0..spec.count)
                .map(|_| {
                    let z: f64 = rng.gen_range(-1.0..=1.0);
                    let phi: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
                    GcsParams::new(z.acos(), phi)
                })
                .collect::<std::result::Result<Vec<_>, _>>()?
        }
    };
    Ok(centers)
}

/// Averages the su(2) purity over GCS members; members run in parallel and
/// are reduced in member order, so the output does not depend on scheduling.
pub fn run_ensemble(cfg: &RunConfig, opts: &RunOptions) -> Result<EnsembleSeries> {
    cfg.validate()?;
    let prep = Prepared::new(cfg.j, cfg.k)?;
    run_ensemble_with(&prep, cfg, opts)
}

pub fn run_ensemble_with(prep: &Prepared, cfg: &RunConfig, opts: &RunOptions) -> Result<EnsembleSeries> {
    cfg.validate()?;
    check_prepared(prep, cfg)?;
    let spec = cfg
        .ensemble
        .ok_or_else(|| CliError::validation("ensemble", "missing ensemble section"))?;
    if spec.count < 2 {
        return Err(CliError::validation("ensemble.count", "an ensemble needs at least 2 members"));
    }
    let centers = ensemble_centers(&spec)?;
    let (mean, std) = ensemble_purity(prep, &centers, cfg.steps)?;
    let mut metadata = base_metadata(cfg, opts);
    metadata.push("members", spec.count.to_string());
    metadata.push("fit_window", format!("P(t) > {}", analysis::FIT_FLOOR));
    metadata.push("saturation_window", "final third of the run");
    let series = EnsembleSeries {
        p_su2_mean: mean,
        p_su2_std: std,
        metadata,
    };
    series.write(&cfg.output_path)?;
    Ok(series)
}

/// Pointwise mean and population standard deviation of `P_su2(t)` over
/// coherent states centered at `centers`.
pub fn ensemble_purity(
    prep: &Prepared,
    centers: &[GcsParams<f64>],
    steps: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let members: Vec<Vec<f64>> = centers
        .par_iter()
        .map(|p| {
            let psi0 = build_gcs(&prep.sys, p);
            let rows = simulate(prep, &psi0, steps, None)?;
            Ok(rows.iter().map(|r| 1.0 - r.ge_su2).collect())
        })
        .collect::<Result<_>>()?;
    let n = members.len() as f64;
    let mut mean = vec![0.0; steps + 1];
    let mut std = vec![0.0; steps + 1];
    for t in 0..=steps {
        let m = members.iter().map(|s| s[t]).sum::<f64>() / n;
        let v = members.iter().map(|s| (s[t] - m) * (s[t] - m)).sum::<f64>() / n;
        mean[t] = m;
        std[t] = v.sqrt();
    }
    Ok((mean, std))
}

/// Fidelity-only CSV for a config with `delta`.
pub fn run_fidelity(cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<f64>> {
    cfg.validate()?;
    let delta = cfg
        .delta
        .ok_or_else(|| CliError::validation("delta", "the fidelity run needs a perturbation"))?;
    let init = cfg
        .initial
        .as_ref()
        .ok_or_else(|| CliError::validation("initial", "the fidelity run needs an initial state"))?;
    let prep = Prepared::new(cfg.j, cfg.k)?;
    let psi0 = initial_state(&prep.sys, init)?;
    let f = fidelity_series_with(&prep.sys, &prep.floquet, delta, &psi0, cfg.steps)?;
    let rows: Vec<String> = f
        .iter()
        .enumerate()
        .map(|(t, v)| format!("{t},{}", fmt_f64(*v)))
        .collect();
    let doc = output::render(&base_metadata(cfg, opts), output::FIDELITY_HEADER, &rows);
    output::write_atomic(&cfg.output_path, &doc)?;
    Ok(f)
}

/// Lyapunov label of one sphere point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassicalSample {
    pub theta: f64,
    pub phi: f64,
    pub lyapunov: f64,
    pub label: &'static str,
}

/// Labels `points` Fibonacci-sphere points at kick strength `k`.
pub fn run_classical(k: f64, points: usize, steps: usize) -> Result<Vec<ClassicalSample>> {
    if !k.is_finite() {
        return Err(CliError::validation("k", "must be finite"));
    }
    if points < 1 {
        return Err(CliError::validation("points", "must be at least 1"));
    }
    fibonacci_sphere::<f64>(points)
        .par_iter()
        .map(|p: &ClassicalState<f64>| {
            let c = classify(p, k, steps)?;
            let g = p.to_gcs();
            Ok(ClassicalSample {
                theta: g.theta(),
                phi: g.phi(),
                lyapunov: c.lyapunov,
                label: c.label.as_str(),
            })
        })
        .collect()
}

pub fn classical_csv(samples: &[ClassicalSample], meta: &Metadata) -> String {
    let rows: Vec<String> = samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            format!(
                "{i},{},{},{},{}",
                fmt_f64(s.theta),
                fmt_f64(s.phi),
                fmt_f64(s.lyapunov),
                s.label
            )
        })
        .collect();
    output::render(meta, output::CLASSICAL_HEADER, &rows)
}
