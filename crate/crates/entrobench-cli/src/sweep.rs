//! The sweep runner: evolve each configured width once, then estimate the
//! purity of every (depth, run) cell. Cells are independent jobs executed on
//! a worker pool; every cell derives its own RNG stream from the root seed,
//! so the output is identical no matter how the pool schedules them.

use rayon::prelude::*;

use entrobench::ansatz::{build_circuit, evolve_noisy};
use entrobench::seeding::{derive_seed, seeded_rng};
use entrobench::shadows::{
    collect_snapshot_set, derandomized_settings, purity_estimate, resample_randomized,
    sample_settings, ResampleMethod, SnapshotSet,
};
use entrobench::sim::DensityMatrix;
use entrobench::swaptest::{purity_estimate_swap, BellSampler};
use entrobench::Result as CoreResult;

use crate::config::{Estimator, ExperimentConfig, ResampleMode};
use crate::csvio::SweepRow;
use crate::errors::{CliError, CliResult};

// Tag values namespacing the RNG streams of a sweep.
const TAG_CIRCUIT: u64 = 1;
const TAG_CELL: u64 = 2;
const TAG_DATASET: u64 = 3;

pub fn run_sweep(cfg: &ExperimentConfig) -> CliResult<Vec<SweepRow>> {
    let max_depth = *cfg.depths.iter().max().expect("validated nonempty");
    let mut rows = Vec::new();

    for &n in &cfg.widths {
        let circuit_seed = derive_seed(cfg.seed, &[TAG_CIRCUIT, n as u64]);
        let circuit = build_circuit(n, max_depth, circuit_seed)?;
        let states = evolve_noisy(&circuit, &cfg.noise)?;

        match cfg.estimator {
            Estimator::Exact => {
                for &depth in &cfg.depths {
                    rows.push(SweepRow {
                        n,
                        depth,
                        run_id: 0,
                        estimator: cfg.estimator.label().to_string(),
                        purity: states[depth - 1].purity(),
                    });
                }
            }
            Estimator::Shadows | Estimator::Swap => {
                let cells: Vec<(usize, usize)> = cfg
                    .depths
                    .iter()
                    .flat_map(|&depth| (0..cfg.repetitions).map(move |run| (depth, run)))
                    .collect();
                let estimates = cells
                    .par_iter()
                    .map(|&(depth, run)| {
                        let rho = &states[depth - 1];
                        let purity = estimate_cell(cfg, n, depth, run, rho)
                            .map_err(|e| CliError::Validation(e.to_string()))?;
                        Ok((depth, run, purity))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                for (depth, run, purity) in estimates {
                    rows.push(SweepRow {
                        n,
                        depth,
                        run_id: run,
                        estimator: cfg.estimator.label().to_string(),
                        purity,
                    });
                }
            }
        }
    }

    rows.sort_by_key(|r| (r.n, r.depth, r.run_id));
    Ok(rows)
}

fn estimate_cell(
    cfg: &ExperimentConfig,
    n: usize,
    depth: usize,
    run: usize,
    rho: &DensityMatrix,
) -> CoreResult<f64> {
    let cell_seed = derive_seed(cfg.seed, &[TAG_CELL, n as u64, depth as u64, run as u64]);
    let mut rng = seeded_rng(cell_seed);
    match cfg.estimator {
        Estimator::Exact => unreachable!("exact cells are read off the state directly"),
        Estimator::Shadows => {
            let snaps = match cfg.shadows.resample {
                ResampleMode::None if cfg.shadows.derandomize => {
                    let settings = derandomized_settings(n)?;
                    collect_snapshot_set(
                        rho,
                        &settings,
                        cfg.shadows.shots,
                        &mut rng,
                        cfg.noise.readout,
                    )?
                }
                ResampleMode::None => {
                    let settings = sample_settings(n, cfg.shadows.settings, &mut rng)?;
                    collect_snapshot_set(
                        rho,
                        &settings,
                        cfg.shadows.shots,
                        &mut rng,
                        cfg.noise.readout,
                    )?
                }
                mode => {
                    // The exhaustive dataset is shared across runs of a cell,
                    // mirroring hardware reuse of recorded snapshots.
                    let dataset = exhaustive_dataset(cfg, n, depth, rho)?;
                    let method = match mode {
                        ResampleMode::Replicate => ResampleMethod::ReplicateRun(run),
                        _ => ResampleMethod::CycleRuns,
                    };
                    resample_randomized(&dataset, cfg.shadows.settings, &mut rng, method)?
                }
            };
            purity_estimate(&snaps)
        }
        Estimator::Swap => {
            let noise = cfg.swap.measurement_noise.then_some(&cfg.noise);
            let sampler = BellSampler::new(rho, noise)?;
            let records = sampler.sample_many(cfg.swap.shots, &mut rng);
            purity_estimate_swap(&records)
        }
    }
}

fn exhaustive_dataset(
    cfg: &ExperimentConfig,
    n: usize,
    depth: usize,
    rho: &DensityMatrix,
) -> CoreResult<SnapshotSet> {
    let seed = derive_seed(cfg.seed, &[TAG_DATASET, n as u64, depth as u64]);
    let mut rng = seeded_rng(seed);
    let settings = derandomized_settings(n)?;
    let mut snapshots = Vec::new();
    for _ in 0..cfg.shadows.resample_runs {
        let set = collect_snapshot_set(rho, &settings, cfg.shadows.shots, &mut rng, cfg.noise.readout)?;
        snapshots.extend(set.snapshots);
    }
    SnapshotSet::new(n, snapshots)
}
