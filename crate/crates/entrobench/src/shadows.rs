//! Purity estimation from randomized single-qubit Pauli measurements.
//!
//! The protocol measures the state in `M` settings (one X/Y/Z basis choice
//! per qubit), `K` shots each, and combines snapshot pairs from different
//! settings into an estimate of Tr[rho^2]. Basis changes use the convention
//! X -> H, Y -> H S-dagger, Z -> identity, and the per-qubit pair weight is
//! `9 * gamma - 4` where `gamma` is the squared overlap of the two rotated
//! outcome states: 1 or 0 for equal bases (matching/differing bits), 1/2 for
//! different bases.
//!
//! Estimates are intentionally not clipped to [0, 1]; small-sample runs can
//! return values outside that range and downstream consumers decide how to
//! treat non-positive values.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::sim::{BitString, DensityMatrix, Gate, ReadoutError};

/// Measurement basis for one qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::X => write!(f, "X"),
            Basis::Y => write!(f, "Y"),
            Basis::Z => write!(f, "Z"),
        }
    }
}

/// One measurement setting: a basis per qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliSetting {
    bases: Vec<Basis>,
}

impl PauliSetting {
    pub fn new(bases: Vec<Basis>) -> Self {
        Self { bases }
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn basis(&self, qubit: usize) -> Basis {
        self.bases[qubit]
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }
}

impl fmt::Display for PauliSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bases {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                'X' => Ok(Basis::X),
                'Y' => Ok(Basis::Y),
                'Z' => Ok(Basis::Z),
                _ => Err(Error::Parse {
                    line: 0,
                    reason: format!("invalid basis character '{ch}'"),
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

/// All shots taken under a single measurement setting.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub setting: PauliSetting,
    pub outcomes: Vec<BitString>,
}

/// A full protocol run: `M` settings with their outcome lists.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotSet {
    n: usize,
    pub snapshots: Vec<Snapshot>,
}

impl SnapshotSet {
    pub fn new(n: usize, snapshots: Vec<Snapshot>) -> Result<Self> {
        for snap in &snapshots {
            if snap.setting.len() != n {
                return Err(Error::InvalidArgument {
                    name: "snapshots",
                    reason: format!(
                        "setting {} has length {}, expected {n}",
                        snap.setting,
                        snap.setting.len()
                    ),
                });
            }
            if let Some(bad) = snap.outcomes.iter().find(|o| o.len() != n) {
                return Err(Error::InvalidArgument {
                    name: "snapshots",
                    reason: format!("outcome {bad} has length {}, expected {n}", bad.len()),
                });
            }
        }
        Ok(Self { n, snapshots })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    /// Number of measurement settings M.
    pub fn settings(&self) -> usize {
        self.snapshots.len()
    }
}

/// Draw `m` settings with every qubit basis i.i.d. uniform over {X, Y, Z}.
pub fn sample_settings<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    rng: &mut R,
) -> Result<Vec<PauliSetting>> {
    if m < 2 {
        return Err(Error::InsufficientData(format!(
            "purity estimation needs at least 2 settings, got {m}"
        )));
    }
    Ok((0..m)
        .map(|_| {
            PauliSetting::new(
                (0..n)
                    .map(|_| Basis::ALL[rng.gen_range(0..3)])
                    .collect(),
            )
        })
        .collect())
}

/// Rotate a copy of `rho` into the measurement frame of `setting` and sample
/// `k` computational-basis outcomes.
pub fn collect_snapshots<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    setting: &PauliSetting,
    k: usize,
    rng: &mut R,
    readout: ReadoutError,
) -> Result<Vec<BitString>> {
    if setting.len() != rho.qubits() {
        return Err(Error::InvalidArgument {
            name: "setting",
            reason: format!(
                "setting length {} does not match register width {}",
                setting.len(),
                rho.qubits()
            ),
        });
    }
    let mut rotated = rho.clone();
    for (qubit, &basis) in setting.bases().iter().enumerate() {
        match basis {
            Basis::X => rotated.apply_gate(Gate::Hadamard { qubit })?,
            Basis::Y => {
                rotated.apply_gate(Gate::SDagger { qubit })?;
                rotated.apply_gate(Gate::Hadamard { qubit })?;
            }
            Basis::Z => {}
        }
    }
    (0..k)
        .map(|_| rotated.sample_measurement(rng, readout))
        .collect()
}

/// Collect one snapshot per setting, `k` shots each.
pub fn collect_snapshot_set<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    settings: &[PauliSetting],
    k: usize,
    rng: &mut R,
    readout: ReadoutError,
) -> Result<SnapshotSet> {
    let snapshots = settings
        .iter()
        .map(|setting| {
            Ok(Snapshot {
                setting: setting.clone(),
                outcomes: collect_snapshots(rho, setting, k, rng, readout)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SnapshotSet::new(rho.qubits(), snapshots)
}

/// Squared overlap |<s| U_u U_v^dagger |t>|^2 for basis-change unitaries
/// U in {H, H S-dagger, I}: 1 or 0 when the bases match, 1/2 otherwise.
pub fn gamma(u: Basis, s: u8, v: Basis, t: u8) -> f64 {
    if u == v {
        if s == t {
            1.0
        } else {
            0.0
        }
    } else {
        0.5
    }
}

/// Pair-product purity estimate over all setting pairs m < m'.
///
/// Identical outcomes within a snapshot are collapsed into weighted counts,
/// so the cost scales with the number of distinct outcomes rather than K^2.
pub fn purity_estimate(snaps: &SnapshotSet) -> Result<f64> {
    let m = snaps.settings();
    if m < 2 {
        return Err(Error::InsufficientData(format!(
            "purity estimation needs at least 2 settings, got {m}"
        )));
    }
    let n = snaps.qubits();

    struct Collapsed<'a> {
        setting: &'a PauliSetting,
        counts: Vec<(usize, f64)>,
        shots: f64,
    }
    let collapsed: Vec<Collapsed> = snaps
        .snapshots
        .iter()
        .map(|snap| {
            if snap.outcomes.is_empty() {
                return Err(Error::InsufficientData(format!(
                    "setting {} has no outcomes",
                    snap.setting
                )));
            }
            let mut counts: HashMap<usize, f64> = HashMap::new();
            for o in &snap.outcomes {
                *counts.entry(o.index()).or_insert(0.0) += 1.0;
            }
            let mut counts: Vec<(usize, f64)> = counts.into_iter().collect();
            counts.sort_unstable_by_key(|&(idx, _)| idx);
            Ok(Collapsed {
                setting: &snap.setting,
                counts,
                shots: snap.outcomes.len() as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut total = 0.0;
    for i in 0..m {
        for j in 0..i {
            total += pair_term(&collapsed[i], &collapsed[j], n)
                / (collapsed[i].shots * collapsed[j].shots);
        }
    }
    return Ok(2.0 * total / (m as f64 * (m - 1) as f64));

    fn pair_term(a: &Collapsed, b: &Collapsed, n: usize) -> f64 {
        // Factor per qubit: bases differ -> 1/2 regardless of bits; bases
        // equal -> 5 when bits match, -4 otherwise.
        let mut base = 1.0;
        let mut equal_positions = Vec::new();
        for q in 0..n {
            if a.setting.basis(q) == b.setting.basis(q) {
                equal_positions.push(n - 1 - q);
            } else {
                base *= 0.5;
            }
        }
        let mut sum = 0.0;
        for &(sa, ca) in &a.counts {
            for &(sb, cb) in &b.counts {
                let mut prod = base;
                for &pos in &equal_positions {
                    prod *= if (sa >> pos) & 1 == (sb >> pos) & 1 {
                        5.0
                    } else {
                        -4.0
                    };
                }
                sum += ca * cb * prod;
            }
        }
        sum
    }
}

/// Convenience: run the fully randomized protocol once and return the
/// purity estimate.
pub fn estimate_purity_randomized<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    m: usize,
    k: usize,
    rng: &mut R,
    readout: ReadoutError,
) -> Result<f64> {
    let settings = sample_settings(rho.qubits(), m, rng)?;
    let snaps = collect_snapshot_set(rho, &settings, k, rng, readout)?;
    purity_estimate(&snaps)
}

/// Number of settings guaranteeing an `eps`-accurate purity estimate with
/// failure probability at most `delta`: ceil(ln(2/delta) * 544 * 4^n / eps^2).
pub fn sample_bound(n: usize, eps: f64, delta: f64) -> Result<u64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidArgument {
            name: "eps",
            reason: format!("accuracy must lie in (0, 1], got {eps}"),
        });
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument {
            name: "delta",
            reason: format!("failure probability must lie in (0, 1), got {delta}"),
        });
    }
    let raw = (2.0 / delta).ln() * 544.0 * 4f64.powi(n as i32) / (eps * eps);
    Ok(raw.ceil() as u64)
}

/// Every length-`n` basis string exactly once, in lexicographic order with
/// X < Y < Z. Capped at n <= 8 (3^8 = 6561 settings).
pub fn derandomized_settings(n: usize) -> Result<Vec<PauliSetting>> {
    if n == 0 || n > 8 {
        return Err(Error::InvalidArgument {
            name: "n",
            reason: format!("exhaustive setting scan supports 1..=8 qubits, got {n}"),
        });
    }
    let total = 3usize.pow(n as u32);
    Ok((0..total)
        .map(|mut code| {
            let mut bases = vec![Basis::Z; n];
            for q in (0..n).rev() {
                bases[q] = Basis::ALL[code % 3];
                code /= 3;
            }
            PauliSetting::new(bases)
        })
        .collect())
}

/// How resampled snapshot lists are materialized from repeated runs of the
/// exhaustive-settings dataset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResampleMethod {
    /// Every occurrence of a drawn setting replicates the snapshots the given
    /// run recorded for it.
    ReplicateRun(usize),
    /// The o-th occurrence of a setting uses run `o mod R`, cycling through
    /// the available runs in order.
    CycleRuns,
}

/// Simulate a randomized setting choice from a dataset that scanned all 3^n
/// settings `R` times: draw `m` settings uniformly with replacement and
/// attach outcome lists according to `method`.
pub fn resample_randomized<R: Rng + ?Sized>(
    dataset: &SnapshotSet,
    m: usize,
    rng: &mut R,
    method: ResampleMethod,
) -> Result<SnapshotSet> {
    if m < 2 {
        return Err(Error::InsufficientData(format!(
            "purity estimation needs at least 2 settings, got {m}"
        )));
    }
    let n = dataset.qubits();
    let all = derandomized_settings(n)?;

    // Group the dataset's snapshots by setting, preserving run order.
    let mut runs: HashMap<&PauliSetting, Vec<&Vec<BitString>>> = HashMap::new();
    for snap in &dataset.snapshots {
        runs.entry(&snap.setting).or_default().push(&snap.outcomes);
    }
    for setting in &all {
        if !runs.contains_key(setting) {
            return Err(Error::MissingSetting {
                setting: setting.to_string(),
            });
        }
    }

    let mut occurrences: HashMap<&PauliSetting, usize> = HashMap::new();
    let mut snapshots = Vec::with_capacity(m);
    for _ in 0..m {
        let setting = &all[rng.gen_range(0..all.len())];
        let sets = &runs[setting];
        let run = match method {
            ResampleMethod::ReplicateRun(r) => r % sets.len(),
            ResampleMethod::CycleRuns => {
                let counter = occurrences.entry(setting).or_insert(0);
                let r = *counter % sets.len();
                *counter += 1;
                r
            }
        };
        snapshots.push(Snapshot {
            setting: setting.clone(),
            outcomes: sets[run].clone(),
        });
    }
    SnapshotSet::new(n, snapshots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::NoiseModel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn settings_are_uniform_and_deterministic() {
        let mut r = rng(3);
        let settings = sample_settings(3, 50, &mut r).unwrap();
        assert_eq!(settings.len(), 50);
        assert!(settings.iter().all(|s| s.len() == 3));

        let again = sample_settings(3, 50, &mut rng(3)).unwrap();
        assert_eq!(settings, again);

        assert!(sample_settings(3, 1, &mut r).is_err());

        // Basis frequencies per position over 1e5 draws: 1/3 +- 0.01.
        let draws = 100_000;
        let settings = sample_settings(2, draws, &mut rng(9)).unwrap();
        for q in 0..2 {
            for basis in Basis::ALL {
                let freq = settings.iter().filter(|s| s.basis(q) == basis).count() as f64
                    / draws as f64;
                assert!((freq - 1.0 / 3.0).abs() <= 0.01, "freq {freq} for {basis} at {q}");
            }
        }
    }

    #[test]
    fn snapshots_respect_born_rule() {
        let zero = DensityMatrix::new_zero_state(1).unwrap();
        let z: PauliSetting = "Z".parse().unwrap();
        let outs = collect_snapshots(&zero, &z, 100, &mut rng(1), ReadoutError::NONE).unwrap();
        assert!(outs.iter().all(|o| o.index() == 0));

        let x: PauliSetting = "X".parse().unwrap();
        let outs = collect_snapshots(&zero, &x, 10_000, &mut rng(2), ReadoutError::NONE).unwrap();
        let ones = outs.iter().filter(|o| o.index() == 1).count() as f64 / 10_000.0;
        assert!((ones - 0.5).abs() <= 0.02, "frequency {ones}");

        let mut plus = DensityMatrix::new_zero_state(1).unwrap();
        plus.apply_gate(Gate::Hadamard { qubit: 0 }).unwrap();
        let outs = collect_snapshots(&plus, &x, 200, &mut rng(3), ReadoutError::NONE).unwrap();
        assert!(outs.iter().all(|o| o.index() == 0));
    }

    #[test]
    fn y_eigenstate_is_deterministic_in_y() {
        // S H |0> = (|0> + i |1>)/sqrt(2), the +1 eigenstate of Y; rotating
        // with H S-dagger must map it back to |0>.
        let mut rho = DensityMatrix::new_zero_state(1).unwrap();
        rho.apply_gate(Gate::Hadamard { qubit: 0 }).unwrap();
        // S = SDagger^3
        for _ in 0..3 {
            rho.apply_gate(Gate::SDagger { qubit: 0 }).unwrap();
        }
        let y: PauliSetting = "Y".parse().unwrap();
        let outs = collect_snapshots(&rho, &y, 100, &mut rng(4), ReadoutError::NONE).unwrap();
        assert!(outs.iter().all(|o| o.index() == 0));
    }

    #[test]
    fn gamma_table_values() {
        assert_eq!(gamma(Basis::Z, 0, Basis::Z, 0), 1.0);
        assert_eq!(gamma(Basis::X, 0, Basis::Z, 1), 0.5);
        assert_eq!(gamma(Basis::X, 0, Basis::X, 1), 0.0);
        assert_eq!(gamma(Basis::Y, 1, Basis::Y, 1), 1.0);
        assert_eq!(gamma(Basis::Y, 0, Basis::X, 0), 0.5);
    }

    #[test]
    fn gamma_is_symmetric_and_bounded() {
        for u in Basis::ALL {
            for v in Basis::ALL {
                for s in [0u8, 1] {
                    for t in [0u8, 1] {
                        let g = gamma(u, s, v, t);
                        assert_eq!(g, gamma(v, t, u, s));
                        assert!(g == 0.0 || g == 0.5 || g == 1.0);
                    }
                }
            }
        }
    }

    #[test]
    fn randomized_estimate_tracks_pure_state() {
        let zero = DensityMatrix::new_zero_state(1).unwrap();
        let mut estimates = Vec::new();
        for seed in 0..3 {
            let mut r = rng(40 + seed);
            estimates.push(
                estimate_purity_randomized(&zero, 200, 50, &mut r, ReadoutError::NONE).unwrap(),
            );
        }
        let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
        assert!((mean - 1.0).abs() <= 0.1, "estimates {estimates:?}");
    }

    #[test]
    fn randomized_estimate_tracks_maximally_mixed() {
        let mm = DensityMatrix::maximally_mixed(2).unwrap();
        let est =
            estimate_purity_randomized(&mm, 243, 100, &mut rng(50), ReadoutError::NONE).unwrap();
        assert!((est - 0.25).abs() <= 0.1, "estimate {est}");
    }

    /// Exact protocol expectation: replace sampled outcomes by their Born
    /// probabilities and average the pair product over every ordered pair of
    /// settings. Must reproduce Tr[rho^2] exactly.
    fn exact_expectation_over_settings(rho: &DensityMatrix, pairs: Pairs) -> f64 {
        let n = rho.qubits();
        let settings = derandomized_settings(n).unwrap();
        let dim = 1usize << n;
        let probs: Vec<Vec<f64>> = settings
            .iter()
            .map(|s| {
                let mut rotated = rho.clone();
                for (qubit, &basis) in s.bases().iter().enumerate() {
                    match basis {
                        Basis::X => rotated.apply_gate(Gate::Hadamard { qubit }).unwrap(),
                        Basis::Y => {
                            rotated.apply_gate(Gate::SDagger { qubit }).unwrap();
                            rotated.apply_gate(Gate::Hadamard { qubit }).unwrap();
                        }
                        Basis::Z => {}
                    }
                }
                rotated.diagonal_probabilities().unwrap()
            })
            .collect();

        let pair_expect = |a: usize, b: usize| -> f64 {
            let mut sum = 0.0;
            for s in 0..dim {
                for t in 0..dim {
                    let mut prod = 1.0;
                    for q in 0..n {
                        let bs = ((s >> (n - 1 - q)) & 1) as u8;
                        let bt = ((t >> (n - 1 - q)) & 1) as u8;
                        prod *= 9.0
                            * gamma(settings[a].basis(q), bs, settings[b].basis(q), bt)
                            - 4.0;
                    }
                    sum += probs[a][s] * probs[b][t] * prod;
                }
            }
            sum
        };

        let mut total = 0.0;
        let mut count = 0usize;
        for a in 0..settings.len() {
            for b in 0..settings.len() {
                match pairs {
                    Pairs::All => {}
                    Pairs::DistinctSettings if a == b => continue,
                    Pairs::DistinctSettings => {}
                }
                total += pair_expect(a, b);
                count += 1;
            }
        }
        total / count as f64
    }

    #[derive(Clone, Copy)]
    enum Pairs {
        All,
        DistinctSettings,
    }

    #[test]
    fn exact_expectation_reproduces_purity() {
        let mut r = rng(60);
        for n in 1..=2usize {
            let circuit = crate::ansatz::build_circuit(n, 3, 77).unwrap();
            let noise = NoiseModel::depolarizing(0.05, 0.1).unwrap();
            let rho = crate::ansatz::evolve_noisy(&circuit, &noise)
                .unwrap()
                .pop()
                .unwrap();
            let expect = exact_expectation_over_settings(&rho, Pairs::All);
            assert!(
                (expect - rho.purity()).abs() <= 1e-10,
                "n={n}: {expect} vs {}",
                rho.purity()
            );
            let _ = &mut r;
        }
    }

    #[test]
    fn derandomized_expectation_is_biased_for_pure_states() {
        // Restricting pairs to distinct settings shifts the expectation away
        // from Tr[rho^2] on pure states; the exhaustive-scan estimator
        // inherits this offset no matter how large K grows.
        let circuit = crate::ansatz::build_circuit(2, 3, 11).unwrap();
        let rho = crate::ansatz::evolve_noisy(&circuit, &NoiseModel::NOISELESS)
            .unwrap()
            .pop()
            .unwrap();
        let derand = exact_expectation_over_settings(&rho, Pairs::DistinctSettings);
        assert!(
            (derand - rho.purity()).abs() > 0.05,
            "no bias found: {derand} vs {}",
            rho.purity()
        );
        // The maximally mixed state stays unbiased under the same restriction.
        let mm = DensityMatrix::maximally_mixed(2).unwrap();
        let derand_mm = exact_expectation_over_settings(&mm, Pairs::DistinctSettings);
        assert!((derand_mm - 0.25).abs() <= 1e-10);
    }

    #[test]
    fn sample_bound_values() {
        assert_eq!(sample_bound(2, 0.1, 0.05).unwrap(), 3_210_801);
        assert_eq!(
            sample_bound(1, 1.0, 2.0 / std::f64::consts::E.powi(2)).unwrap(),
            4352
        );
        // 4^n scaling between consecutive widths, up to the outer ceiling.
        for n in 1..=6 {
            let a = sample_bound(n, 0.1, 0.05).unwrap() as f64;
            let b = sample_bound(n + 1, 0.1, 0.05).unwrap() as f64;
            assert!((b / a - 4.0).abs() <= 4.0 / a + 1e-9);
        }
        assert!(sample_bound(2, 0.0, 0.05).is_err());
        assert!(sample_bound(2, 0.1, 1.0).is_err());
    }

    #[test]
    fn derandomized_settings_enumeration() {
        let one = derandomized_settings(1).unwrap();
        assert_eq!(
            one.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            vec!["X", "Y", "Z"]
        );
        let two = derandomized_settings(2).unwrap();
        assert_eq!(two.len(), 9);
        let three = derandomized_settings(3).unwrap();
        assert_eq!(three.len(), 27);
        let distinct: std::collections::HashSet<_> = three.iter().collect();
        assert_eq!(distinct.len(), 27);
        // Lexicographic: first and last entries.
        assert_eq!(three[0].to_string(), "XXX");
        assert_eq!(three[26].to_string(), "ZZZ");
        assert!(derandomized_settings(9).is_err());
    }

    fn toy_dataset(n: usize, runs: usize, k: usize) -> SnapshotSet {
        let rho = DensityMatrix::maximally_mixed(n).unwrap();
        let mut r = rng(70);
        let mut snapshots = Vec::new();
        for _ in 0..runs {
            for setting in derandomized_settings(n).unwrap() {
                snapshots.push(Snapshot {
                    outcomes: collect_snapshots(&rho, &setting, k, &mut r, ReadoutError::NONE)
                        .unwrap(),
                    setting,
                });
            }
        }
        SnapshotSet::new(n, snapshots).unwrap()
    }

    #[test]
    fn resample_draws_requested_count() {
        let dataset = toy_dataset(2, 3, 5);
        let out =
            resample_randomized(&dataset, 50, &mut rng(71), ResampleMethod::ReplicateRun(0))
                .unwrap();
        assert_eq!(out.settings(), 50);
        assert!(out.snapshots.iter().all(|s| s.outcomes.len() == 5));
    }

    #[test]
    fn resample_missing_setting_is_rejected() {
        let mut dataset = toy_dataset(2, 1, 5);
        dataset.snapshots.remove(4);
        assert!(matches!(
            resample_randomized(&dataset, 10, &mut rng(72), ResampleMethod::CycleRuns),
            Err(Error::MissingSetting { .. })
        ));
    }

    #[test]
    fn cycle_method_rotates_through_runs_in_order() {
        // Dataset where run r of every setting carries the single outcome
        // with index r, so the chosen run is readable from the outcome.
        let n = 1;
        let mut snapshots = Vec::new();
        for run in 0..3usize {
            for setting in derandomized_settings(n).unwrap() {
                snapshots.push(Snapshot {
                    setting,
                    outcomes: vec![BitString::new(run & 1, 1), BitString::new(run / 2, 1)],
                });
            }
        }
        let dataset = SnapshotSet::new(n, snapshots).unwrap();
        let out = resample_randomized(&dataset, 12, &mut rng(73), ResampleMethod::CycleRuns)
            .unwrap();
        // Group occurrences per setting and decode run ids in draw order.
        let mut seen: HashMap<String, Vec<usize>> = HashMap::new();
        for snap in &out.snapshots {
            let run = snap.outcomes[0].index() | (snap.outcomes[1].index() << 1);
            seen.entry(snap.setting.to_string()).or_default().push(run);
        }
        for (setting, order) in seen {
            for (o, &run) in order.iter().enumerate() {
                assert_eq!(run, o % 3, "setting {setting}: occurrence {o} used run {run}");
            }
        }
    }

    #[test]
    fn replicate_method_pins_one_run() {
        let n = 1;
        let mut snapshots = Vec::new();
        for run in 0..3usize {
            for setting in derandomized_settings(n).unwrap() {
                snapshots.push(Snapshot {
                    setting,
                    outcomes: vec![BitString::new(run & 1, 1), BitString::new(run / 2, 1)],
                });
            }
        }
        let dataset = SnapshotSet::new(n, snapshots).unwrap();
        let out =
            resample_randomized(&dataset, 10, &mut rng(74), ResampleMethod::ReplicateRun(2))
                .unwrap();
        for snap in &out.snapshots {
            let run = snap.outcomes[0].index() | (snap.outcomes[1].index() << 1);
            assert_eq!(run, 2);
        }
    }

    #[test]
    fn estimate_requires_two_settings() {
        let rho = DensityMatrix::new_zero_state(1).unwrap();
        let settings = vec!["Z".parse::<PauliSetting>().unwrap()];
        let snaps =
            collect_snapshot_set(&rho, &settings, 5, &mut rng(80), ReadoutError::NONE).unwrap();
        assert!(matches!(
            purity_estimate(&snaps),
            Err(Error::InsufficientData(_))
        ));
    }
}
