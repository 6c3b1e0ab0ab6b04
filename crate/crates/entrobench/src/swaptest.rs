//! Purity estimation from Bell measurements between two state copies.
//!
//! Two copies of the state are measured jointly: for each qubit pair
//! (copy-1 qubit k, copy-2 qubit k) a CNOT followed by a Hadamard on the
//! control maps the Bell basis onto the computational basis. The parity of
//! the bitwise AND of the two readout halves reproduces the outcome
//! statistics of the ancilla-based swap test, so Tr[rho^2] = P(0) - P(1)
//! without ever simulating the 2n+1-qubit controlled-SWAP circuit.
//!
//! Measurement-circuit noise is opt-in: when a [`NoiseModel`] is supplied,
//! the matching depolarising channel follows each CNOT and Hadamard of the
//! Bell circuit and readout flips apply to the sampled bits.

use rand::Rng;

use crate::error::{Error, Result};
use crate::sim::{BitString, DensityMatrix, Gate, NoiseModel, ReadoutError};

/// One Bell-measurement shot over two copies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SwapTestRecord {
    /// Readout of the first copy.
    pub x1: BitString,
    /// Readout of the second copy.
    pub x2: BitString,
    /// parity(x1 & x2), the reconstructed swap-test outcome.
    pub parity: u8,
}

impl SwapTestRecord {
    pub fn new(x1: BitString, x2: BitString) -> Self {
        let parity = x1.and(&x2).parity();
        Self { x1, x2, parity }
    }
}

/// Prepared Bell-measurement distribution for repeated sampling.
///
/// Building the sampler evolves rho (x) rho through the measurement circuit
/// once; each shot then only draws from the cached diagonal.
pub struct BellSampler {
    n: usize,
    cumulative: Vec<f64>,
    readout: ReadoutError,
}

impl BellSampler {
    pub fn new(rho: &DensityMatrix, measurement_noise: Option<&NoiseModel>) -> Result<Self> {
        let n = rho.qubits();
        let mut joint = rho.tensor(rho)?;
        for k in 0..n {
            joint.apply_gate(Gate::Cnot {
                control: k,
                target: n + k,
            })?;
            if let Some(noise) = measurement_noise {
                if noise.p2 > 0.0 {
                    joint.depolarize(&[k, n + k], noise.p2)?;
                }
            }
            joint.apply_gate(Gate::Hadamard { qubit: k })?;
            if let Some(noise) = measurement_noise {
                if noise.p1 > 0.0 {
                    joint.depolarize(&[k], noise.p1)?;
                }
            }
        }
        let probs = joint.diagonal_probabilities()?;
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in probs {
            acc += p;
            cumulative.push(acc);
        }
        Ok(Self {
            n,
            cumulative,
            readout: measurement_noise.map(|m| m.readout).unwrap_or(ReadoutError::NONE),
        })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SwapTestRecord {
        let u: f64 = rng.gen();
        let idx = self.cumulative.partition_point(|&c| c <= u);
        let idx = idx.min(self.cumulative.len() - 1);
        let full = self.readout.apply(BitString::new(idx, 2 * self.n), rng);
        self.split(full)
    }

    pub fn sample_many<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Vec<SwapTestRecord> {
        (0..m).map(|_| self.sample(rng)).collect()
    }

    /// Exact expectation of (-1)^parity over the prepared distribution,
    /// before readout flips. Equals Tr[rho^2] when the circuit is noiseless.
    pub fn expected_bias(&self) -> f64 {
        let mut prev = 0.0;
        let mut bias = 0.0;
        for (idx, &c) in self.cumulative.iter().enumerate() {
            let p = c - prev;
            prev = c;
            let rec = self.split(BitString::new(idx, 2 * self.n));
            bias += p * if rec.parity == 0 { 1.0 } else { -1.0 };
        }
        bias
    }

    fn split(&self, full: BitString) -> SwapTestRecord {
        let idx = full.index();
        let x2 = BitString::new(idx & ((1 << self.n) - 1), self.n);
        let x1 = BitString::new(idx >> self.n, self.n);
        SwapTestRecord::new(x1, x2)
    }
}

/// Single Bell-measurement shot; prefer [`BellSampler`] when sampling in bulk.
pub fn bell_sample<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    rng: &mut R,
    measurement_noise: Option<&NoiseModel>,
) -> Result<SwapTestRecord> {
    Ok(BellSampler::new(rho, measurement_noise)?.sample(rng))
}

/// (M0 - M1) / M over the recorded parities.
pub fn purity_estimate_swap(records: &[SwapTestRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::InsufficientData(
            "swap-test estimate needs at least one record".into(),
        ));
    }
    let ones = records.iter().filter(|r| r.parity == 1).count() as f64;
    let m = records.len() as f64;
    Ok(1.0 - 2.0 * ones / m)
}

/// Hoeffding bound on the shot count for an `eps`-accurate estimate with
/// failure probability at most `delta`: ceil(2 ln(2/delta) / eps^2).
/// Independent of the register width.
pub fn sample_bound_swap(eps: f64, delta: f64) -> Result<u64> {
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
    Ok((2.0 * (2.0 / delta).ln() / (eps * eps)).ceil() as u64)
}
