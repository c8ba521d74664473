//! Canned scenarios: the mixed phase space at k=3, the chaotic ensemble at
//! k=12, and the regular orbits at k=1.1.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use qkt_core::{classify, ClassicalState};
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{self, Plateau, RecurrenceReport};
use crate::config::{EnsembleSpec, InitialState, Placement, RunConfig};
use crate::error::Result;
use crate::experiments::{
    run_ensemble_with, run_timeseries_with, EnsembleSummary, Prepared, RunOptions, TimeSeries,
};

pub const SPIN: f64 = 500.0;
pub const MIXED_K: f64 = 3.0;
pub const MIXED_STEPS: usize = 300;
pub const CHAOTIC_K: f64 = 12.0;
pub const ENSEMBLE_SIZE: usize = 90;
pub const ENSEMBLE_STEPS: usize = 300;
pub const REGULAR_K: f64 = 1.1;
/// Recurrences of the small orbits only show up after ~2000 kicks.
pub const REGULAR_STEPS: usize = 3000;

/// `(name, theta, phi)` of the three k=3 starting points.
pub fn mixed_states() -> [(&'static str, f64, f64); 3] {
    [
        ("chaotic", 3.0 * PI / 5.0, -PI / 10.0),
        ("edge", PI / 2.0, -PI / 10.0),
        ("regular", PI / 2.0, 0.0),
    ]
}

/// Azimuths of the k=1.1 states at `theta = 3 pi / 5`, smallest orbit first.
pub fn regular_phis() -> [f64; 5] {
    [-2.0 * PI / 5.0, -3.0 * PI / 10.0, -PI / 5.0, -PI / 10.0, 0.0]
}

pub const REGULAR_THETA: f64 = 3.0 * PI / 5.0;

#[derive(Clone, Debug, Serialize)]
pub struct StateSummary {
    pub name: String,
    pub theta: f64,
    pub phi: f64,
    pub plateau: Plateau,
    pub path: PathBuf,
}

#[derive(Clone, Debug, Serialize)]
pub struct MixedSummary {
    pub states: Vec<MixedState>,
    pub rmt_prediction: f64,
    pub ordered: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MixedState {
    #[serde(flatten)]
    pub state: StateSummary,
    pub classical_label: &'static str,
    pub lyapunov: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularSummary {
    pub states: Vec<RegularState>,
    pub plateaus_nondecreasing: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularState {
    #[serde(flatten)]
    pub state: StateSummary,
    pub recurrences: RecurrenceReport,
}

fn single_config(k: f64, steps: usize, theta: f64, phi: f64, path: PathBuf) -> RunConfig {
    RunConfig {
        j: SPIN,
        k,
        steps,
        initial: Some(InitialState::Gcs { theta, phi }),
        delta: None,
        ensemble: None,
        output_path: path,
    }
}

fn run_states(
    prep: &Prepared,
    cfgs: &[(String, RunConfig)],
    opts: &RunOptions,
) -> Result<Vec<(StateSummary, TimeSeries)>> {
    cfgs.par_iter()
        .map(|(name, cfg)| {
            let series = run_timeseries_with(prep, cfg, opts)?;
            let Some(InitialState::Gcs { theta, phi }) = cfg.initial else {
                unreachable!("canned states are coherent")
            };
            let summary = StateSummary {
                name: name.clone(),
                theta,
                phi,
                plateau: analysis::plateau(&series.ge_su2()),
                path: cfg.output_path.clone(),
            };
            Ok((summary, series))
        })
        .collect()
}

/// Three 300-kick runs at k=3 written as `fig1_<name>.csv`.
pub fn mixed_phase_space(out: &Path, opts: &RunOptions) -> Result<MixedSummary> {
    let prep = Prepared::new(SPIN, MIXED_K)?;
    mixed_phase_space_with(&prep, out, opts)
}

pub fn mixed_phase_space_with(prep: &Prepared, out: &Path, opts: &RunOptions) -> Result<MixedSummary> {
    let cfgs: Vec<(String, RunConfig)> = mixed_states()
        .iter()
        .map(|&(name, theta, phi)| {
            let path = out.join(format!("fig1_{name}.csv"));
            (name.to_string(), single_config(MIXED_K, MIXED_STEPS, theta, phi, path))
        })
        .collect();
    let runs = run_states(prep, &cfgs, opts)?;
    let mut states = Vec::new();
    for (s, _) in runs {
        let c = classify(
            &ClassicalState::from_angles(s.theta, s.phi),
            MIXED_K,
            qkt_core::classical::DEFAULT_LYAPUNOV_STEPS,
        )?;
        states.push(MixedState {
            state: s,
            classical_label: c.label.as_str(),
            lyapunov: c.lyapunov,
        });
    }
    let ordered = states
        .windows(2)
        .all(|w| w[0].state.plateau.mean > w[1].state.plateau.mean);
    Ok(MixedSummary {
        states,
        rmt_prediction: 1.0 - 1.0 / (2.0 * SPIN),
        ordered,
    })
}

/// 90-member Fibonacci-sphere ensemble at k=12, written as `fig1_inset.csv`.
pub fn chaotic_ensemble(out: &Path, seed: u64, opts: &RunOptions) -> Result<EnsembleSummary> {
    let prep = Prepared::new(SPIN, CHAOTIC_K)?;
    chaotic_ensemble_with(&prep, out, seed, opts)
}

pub fn chaotic_ensemble_with(
    prep: &Prepared,
    out: &Path,
    seed: u64,
    opts: &RunOptions,
) -> Result<EnsembleSummary> {
    let cfg = RunConfig {
        j: SPIN,
        k: CHAOTIC_K,
        steps: ENSEMBLE_STEPS,
        initial: None,
        delta: None,
        ensemble: Some(EnsembleSpec {
            count: ENSEMBLE_SIZE,
            placement: Placement::FibonacciSphere,
            seed,
        }),
        output_path: out.join("fig1_inset.csv"),
    };
    let series = run_ensemble_with(prep, &cfg, opts)?;
    EnsembleSummary::from_series(&series, SPIN)
}

/// Five 3000-kick runs at k=1.1 written as `fig2_phi<i>.csv`, smallest orbit
/// first.
pub fn regular_orbits(out: &Path, opts: &RunOptions) -> Result<RegularSummary> {
    let prep = Prepared::new(SPIN, REGULAR_K)?;
    regular_orbits_with(&prep, out, REGULAR_STEPS, opts)
}

pub fn regular_orbits_with(
    prep: &Prepared,
    out: &Path,
    steps: usize,
    opts: &RunOptions,
) -> Result<RegularSummary> {
    let cfgs: Vec<(String, RunConfig)> = regular_phis()
        .iter()
        .enumerate()
        .map(|(i, &phi)| {
            let path = out.join(format!("fig2_phi{i}.csv"));
            (format!("phi{i}"), single_config(REGULAR_K, steps, REGULAR_THETA, phi, path))
        })
        .collect();
    let runs = run_states(prep, &cfgs, opts)?;
    let mut states = Vec::new();
    for (s, series) in runs {
        let recurrences = analysis::run_recurrence_analysis(&series.ge_su2(), &series.ext_z())?;
        states.push(RegularState { state: s, recurrences });
    }
    let plateaus_nondecreasing = states[..4]
        .windows(2)
        .all(|w| w[0].state.plateau.mean <= w[1].state.plateau.mean);
    Ok(RegularSummary {
        states,
        plateaus_nondecreasing,
    })
}
