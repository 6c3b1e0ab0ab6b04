//! Dense density-matrix simulation of small qubit registers.
//!
//! States are stored as full `2^n x 2^n` complex matrices, so the register
//! width is capped at [`MAX_QUBITS`]. Gates are applied by direct index
//! manipulation rather than by building full-register unitaries, and the
//! depolarising channel is applied in replacement form: the reduced state on
//! the target qubit(s) is traded for the maximally mixed state with
//! probability `p`.
//!
//! Qubit 0 is the most significant bit of a basis index, so qubit `q`
//! occupies character `q` of a measured bitstring.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Widest register the dense representation supports (`2^10 x 2^10` entries).
pub const MAX_QUBITS: usize = 10;

/// A computational-basis measurement outcome over `n` qubits.
///
/// Stored as the basis index with qubit 0 in the most significant position.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: usize,
    n: usize,
}

impl BitString {
    pub fn new(bits: usize, n: usize) -> Self {
        debug_assert!(n == 0 || bits < (1 << n));
        Self { bits, n }
    }

    /// Outcome with every bit clear.
    pub fn zeros(n: usize) -> Self {
        Self { bits: 0, n }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// The underlying basis index.
    pub fn index(&self) -> usize {
        self.bits
    }

    /// Bit for qubit `q` (0 or 1).
    pub fn bit(&self, q: usize) -> u8 {
        debug_assert!(q < self.n);
        ((self.bits >> (self.n - 1 - q)) & 1) as u8
    }

    pub fn with_bit_flipped(&self, q: usize) -> Self {
        Self {
            bits: self.bits ^ (1 << (self.n - 1 - q)),
            n: self.n,
        }
    }

    /// Bitwise AND with another outcome of the same length.
    pub fn and(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self {
            bits: self.bits & other.bits,
            n: self.n,
        }
    }

    /// Parity (0 or 1) of the number of set bits.
    pub fn parity(&self) -> u8 {
        (self.bits.count_ones() & 1) as u8
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.bit(q))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0usize;
        for (i, ch) in s.chars().enumerate() {
            bits <<= 1;
            match ch {
                '0' => {}
                '1' => bits |= 1,
                _ => {
                    return Err(Error::Parse {
                        line: 0,
                        reason: format!("invalid bit character '{ch}' at position {i}"),
                    })
                }
            }
        }
        Ok(Self {
            bits,
            n: s.chars().count(),
        })
    }
}

/// Classical readout bit-flip probabilities.
///
/// `p01` is the probability of reading 0 when the true bit is 1, `p10` the
/// probability of reading 1 when the true bit is 0.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ReadoutError {
    pub p01: f64,
    pub p10: f64,
}

impl ReadoutError {
    pub const NONE: Self = Self { p01: 0.0, p10: 0.0 };

    pub fn new(p01: f64, p10: f64) -> Result<Self> {
        check_probability("p01", p01)?;
        check_probability("p10", p10)?;
        Ok(Self { p01, p10 })
    }

    pub fn is_none(&self) -> bool {
        self.p01 == 0.0 && self.p10 == 0.0
    }

    /// Flip each bit of `outcome` independently: 1 -> 0 with probability
    /// `p01`, 0 -> 1 with probability `p10`.
    pub fn apply<R: Rng + ?Sized>(&self, outcome: BitString, rng: &mut R) -> BitString {
        if self.is_none() {
            return outcome;
        }
        let mut out = outcome;
        for q in 0..outcome.len() {
            let p = if outcome.bit(q) == 1 { self.p01 } else { self.p10 };
            if p > 0.0 && rng.gen::<f64>() < p {
                out = out.with_bit_flipped(q);
            }
        }
        out
    }
}

/// Local depolarising probabilities plus readout flips.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NoiseModel {
    /// Depolarising probability applied after each single-qubit gate.
    pub p1: f64,
    /// Depolarising probability applied after each two-qubit gate.
    pub p2: f64,
    pub readout: ReadoutError,
}

impl NoiseModel {
    pub const NOISELESS: Self = Self {
        p1: 0.0,
        p2: 0.0,
        readout: ReadoutError::NONE,
    };

    pub fn new(p1: f64, p2: f64, p01: f64, p10: f64) -> Result<Self> {
        check_probability("p1", p1)?;
        check_probability("p2", p2)?;
        Ok(Self {
            p1,
            p2,
            readout: ReadoutError::new(p01, p10)?,
        })
    }

    /// Depolarising-only model with ideal readout.
    pub fn depolarizing(p1: f64, p2: f64) -> Result<Self> {
        Self::new(p1, p2, 0.0, 0.0)
    }
}

/// Gates understood by the simulator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    /// Rotation about X: exp(-i angle/2 X).
    Rx { qubit: usize, angle: f64 },
    /// Rotation about Y: exp(-i angle/2 Y).
    Ry { qubit: usize, angle: f64 },
    Hadamard { qubit: usize },
    /// S-dagger phase gate, diag(1, -i).
    SDagger { qubit: usize },
    Cz { a: usize, b: usize },
    Cnot { control: usize, target: usize },
}

impl Gate {
    /// The qubits the gate acts on (one or two entries).
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::Rx { qubit, .. } | Gate::Ry { qubit, .. } => (qubit, None),
            Gate::Hadamard { qubit } | Gate::SDagger { qubit } => (qubit, None),
            Gate::Cz { a, b } => (a, Some(b)),
            Gate::Cnot { control, target } => (control, Some(target)),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits().1.is_some()
    }

    fn single_qubit_matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        let i = Complex64::i();
        match *self {
            Gate::Rx { angle, .. } => {
                let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
                Some([
                    [Complex64::from(c), -i * s],
                    [-i * s, Complex64::from(c)],
                ])
            }
            Gate::Ry { angle, .. } => {
                let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
                Some([
                    [Complex64::from(c), Complex64::from(-s)],
                    [Complex64::from(s), Complex64::from(c)],
                ])
            }
            Gate::Hadamard { .. } => {
                let h = Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
                Some([[h, h], [h, -h]])
            }
            Gate::SDagger { .. } => Some([
                [Complex64::ONE, Complex64::ZERO],
                [Complex64::ZERO, -i],
            ]),
            _ => None,
        }
    }
}

/// Hermitian, trace-one density matrix over `n` qubits.
#[derive(Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityMatrix(n={}, purity={:.6})", self.n, self.purity())
    }
}

impl DensityMatrix {
    /// The rank-1 projector onto the all-zeros basis state.
    pub fn new_zero_state(n: usize) -> Result<Self> {
        check_width(n)?;
        let dim = 1usize << n;
        let mut data = vec![Complex64::ZERO; dim * dim];
        data[0] = Complex64::ONE;
        Ok(Self { n, data })
    }

    /// The maximally mixed state I / 2^n.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_width(n)?;
        let dim = 1usize << n;
        let mut data = vec![Complex64::ZERO; dim * dim];
        let w = Complex64::from(1.0 / dim as f64);
        for r in 0..dim {
            data[r * dim + r] = w;
        }
        Ok(Self { n, data })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        let dim = self.dim();
        (0..dim).map(|r| self.data[r * dim + r]).sum()
    }

    /// Tr[rho^2].
    pub fn purity(&self) -> f64 {
        let dim = self.dim();
        let mut acc = 0.0;
        for r in 0..dim {
            for c in 0..dim {
                acc += (self.data[r * dim + c] * self.data[c * dim + r]).re;
            }
        }
        acc
    }

    /// Renyi-2 entropy density, -log2(Tr[rho^2]) / n, in [0, 1].
    pub fn renyi2_density(&self) -> f64 {
        -self.purity().log2() / self.n as f64
    }

    /// Largest deviation |rho - rho^dagger| over all entries.
    pub fn hermiticity_violation(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                let d = (self.data[r * dim + c] - self.data[c * dim + r].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// rho -> U rho U^dagger.
    pub fn apply_gate(&mut self, gate: Gate) -> Result<()> {
        let (a, b) = gate.qubits();
        self.check_qubit(a)?;
        if let Some(b) = b {
            self.check_qubit(b)?;
            if a == b {
                return Err(Error::DuplicateQubit { index: a });
            }
        }
        match gate {
            Gate::Cz { a, b } => self.apply_cz(a, b),
            Gate::Cnot { control, target } => self.apply_cnot(control, target),
            _ => {
                let u = gate.single_qubit_matrix().expect("single-qubit gate");
                self.apply_unitary_1q(a, &u);
            }
        }
        Ok(())
    }

    /// Depolarising channel in replacement form on one or two qubits: with
    /// probability `p` the reduced state on `qubits` becomes maximally mixed,
    /// leaving every other marginal untouched.
    pub fn depolarize(&mut self, qubits: &[usize], p: f64) -> Result<()> {
        check_probability("p", p)?;
        if qubits.is_empty() || qubits.len() > 2 {
            return Err(Error::InvalidArgument {
                name: "qubits",
                reason: format!("expected 1 or 2 target qubits, got {}", qubits.len()),
            });
        }
        for &q in qubits {
            self.check_qubit(q)?;
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::DuplicateQubit { index: qubits[0] });
        }
        if p == 0.0 {
            return Ok(());
        }

        let k = qubits.len();
        let dk = 1usize << k;
        let dr = 1usize << (self.n - k);
        let dim = self.dim();

        // Bit positions (in index space) of the target and remaining qubits.
        let tpos: Vec<usize> = qubits.iter().map(|&q| self.n - 1 - q).collect();
        let rpos: Vec<usize> = (0..self.n)
            .map(|q| self.n - 1 - q)
            .filter(|pos| !tpos.contains(pos))
            .collect();
        let scatter = |bits: usize, pos: &[usize]| -> usize {
            pos.iter()
                .enumerate()
                .fold(0, |acc, (i, &p)| acc | (((bits >> i) & 1) << p))
        };

        let original = self.data.clone();
        for v in self.data.iter_mut() {
            *v *= 1.0 - p;
        }
        let weight = p / dk as f64;
        for a in 0..dr {
            let abase = scatter(a, &rpos);
            for b in 0..dr {
                let bbase = scatter(b, &rpos);
                let mut reduced = Complex64::ZERO;
                for t in 0..dk {
                    let off = scatter(t, &tpos);
                    reduced += original[(abase | off) * dim + (bbase | off)];
                }
                let add = reduced * weight;
                for t in 0..dk {
                    let off = scatter(t, &tpos);
                    self.data[(abase | off) * dim + (bbase | off)] += add;
                }
            }
        }
        Ok(())
    }

    /// Kronecker product; `self`'s qubits become the most significant block.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.n + other.n;
        check_width(n)?;
        let (da, db) = (self.dim(), other.dim());
        let dim = da * db;
        let mut data = vec![Complex64::ZERO; dim * dim];
        for r1 in 0..da {
            for c1 in 0..da {
                let v1 = self.data[r1 * da + c1];
                if v1 == Complex64::ZERO {
                    continue;
                }
                for r2 in 0..db {
                    for c2 in 0..db {
                        data[(r1 * db + r2) * dim + (c1 * db + c2)] =
                            v1 * other.data[r2 * db + c2];
                    }
                }
            }
        }
        Ok(Self { n, data })
    }

    /// Diagonal as a probability vector: real parts clipped at zero and
    /// renormalised. Fails if the clipped diagonal sums to zero or less.
    pub fn diagonal_probabilities(&self) -> Result<Vec<f64>> {
        let dim = self.dim();
        let mut probs: Vec<f64> = (0..dim)
            .map(|r| self.data[r * dim + r].re.max(0.0))
            .collect();
        let sum: f64 = probs.iter().sum();
        if sum <= 0.0 {
            return Err(Error::CorruptedState { sum });
        }
        for p in probs.iter_mut() {
            *p /= sum;
        }
        Ok(probs)
    }

    /// Draw one computational-basis outcome, then apply readout flips.
    pub fn sample_measurement<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        readout: ReadoutError,
    ) -> Result<BitString> {
        let probs = self.diagonal_probabilities()?;
        let idx = sample_discrete(&probs, rng);
        Ok(readout.apply(BitString::new(idx, self.n), rng))
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            Err(Error::QubitOutOfRange { index: q, n: self.n })
        } else {
            Ok(())
        }
    }

    fn apply_unitary_1q(&mut self, q: usize, u: &[[Complex64; 2]; 2]) {
        let dim = self.dim();
        let stride = 1usize << (self.n - 1 - q);
        // rho <- U rho
        for r0 in 0..dim {
            if r0 & stride != 0 {
                continue;
            }
            let r1 = r0 | stride;
            for c in 0..dim {
                let a = self.data[r0 * dim + c];
                let b = self.data[r1 * dim + c];
                self.data[r0 * dim + c] = u[0][0] * a + u[0][1] * b;
                self.data[r1 * dim + c] = u[1][0] * a + u[1][1] * b;
            }
        }
        // rho <- rho U^dagger
        for r in 0..dim {
            let row = r * dim;
            for c0 in 0..dim {
                if c0 & stride != 0 {
                    continue;
                }
                let c1 = c0 | stride;
                let a = self.data[row + c0];
                let b = self.data[row + c1];
                self.data[row + c0] = a * u[0][0].conj() + b * u[0][1].conj();
                self.data[row + c1] = a * u[1][0].conj() + b * u[1][1].conj();
            }
        }
    }

    fn apply_cz(&mut self, a: usize, b: usize) {
        let dim = self.dim();
        let ma = 1usize << (self.n - 1 - a);
        let mb = 1usize << (self.n - 1 - b);
        let both = ma | mb;
        // Diagonal in the computational basis: entry (r, c) picks up a sign
        // when exactly one of the two indices has both control bits set.
        for r in 0..dim {
            let sr = (r & both) == both;
            for c in 0..dim {
                if sr != ((c & both) == both) {
                    self.data[r * dim + c] = -self.data[r * dim + c];
                }
            }
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let dim = self.dim();
        let mc = 1usize << (self.n - 1 - control);
        let mt = 1usize << (self.n - 1 - target);
        let perm = |i: usize| if i & mc != 0 { i ^ mt } else { i };
        // The permutation is an involution, so conjugation reduces to
        // swapping rows then columns over index pairs (i, perm(i)).
        for r in 0..dim {
            let pr = perm(r);
            if pr > r {
                for c in 0..dim {
                    self.data.swap(r * dim + c, pr * dim + c);
                }
            }
        }
        for c in 0..dim {
            let pc = perm(c);
            if pc > c {
                for r in 0..dim {
                    self.data.swap(r * dim + c, r * dim + pc);
                }
            }
        }
    }
}

/// Draw an index from a normalised probability vector.
fn sample_discrete<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

fn check_width(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        Err(Error::WidthOutOfRange { n, max: MAX_QUBITS })
    } else {
        Ok(())
    }
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) || value.is_nan() {
        Err(Error::InvalidProbability { name, value })
    } else {
        Ok(())
    }
}
