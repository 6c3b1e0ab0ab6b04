//! Hardware-efficient layered circuit construction and noisy evolution.
//!
//! Each layer applies an `Rx` rotation followed by an `Ry` rotation to every
//! qubit, then a brickwork of nearest-neighbour CZ gates split into two
//! non-intersecting sublayers: pairs (0,1), (2,3), ... followed by pairs
//! (1,2), (3,4), .... A layer therefore contains `2n` single-qubit and
//! `n - 1` two-qubit gates. Rotation angles are drawn uniformly from
//! [0, 2*pi) by a seeded generator, so a `(width, depth, seed)` triple pins
//! the circuit exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sim::{DensityMatrix, Gate, NoiseModel, MAX_QUBITS};

/// A layered circuit over `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n: usize,
    layers: Vec<Vec<Gate>>,
}

impl Circuit {
    pub fn width(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    /// Total single-qubit gate count (2 n D for the brickwork ansatz).
    pub fn single_qubit_gates(&self) -> usize {
        self.layers
            .iter()
            .flatten()
            .filter(|g| !g.is_two_qubit())
            .count()
    }

    /// Total two-qubit gate count ((n - 1) D for the brickwork ansatz).
    pub fn two_qubit_gates(&self) -> usize {
        self.layers
            .iter()
            .flatten()
            .filter(|g| g.is_two_qubit())
            .count()
    }
}

/// Build the brickwork circuit for `(n, depth)` with angles drawn from the
/// generator seeded by `seed`. Identical arguments give identical circuits.
pub fn build_circuit(n: usize, depth: usize, seed: u64) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::WidthOutOfRange { n, max: MAX_QUBITS });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = Vec::with_capacity(depth);
    for _ in 0..depth {
        let mut gates = Vec::with_capacity(3 * n);
        for qubit in 0..n {
            gates.push(Gate::Rx {
                qubit,
                angle: std::f64::consts::TAU * rng.gen::<f64>(),
            });
        }
        for qubit in 0..n {
            gates.push(Gate::Ry {
                qubit,
                angle: std::f64::consts::TAU * rng.gen::<f64>(),
            });
        }
        let mut a = 0;
        while a + 1 < n {
            gates.push(Gate::Cz { a, b: a + 1 });
            a += 2;
        }
        let mut b = 1;
        while b + 1 < n {
            gates.push(Gate::Cz { a: b, b: b + 1 });
            b += 2;
        }
        layers.push(gates);
    }
    Ok(Circuit { n, layers })
}

/// Evolve the all-zeros input through the circuit, applying the depolarising
/// channel that matches each gate's arity right after the gate. Returns the
/// state at the end of every layer.
pub fn evolve_noisy(circuit: &Circuit, noise: &NoiseModel) -> Result<Vec<DensityMatrix>> {
    let mut rho = DensityMatrix::new_zero_state(circuit.n)?;
    let mut out = Vec::with_capacity(circuit.depth());
    for layer in &circuit.layers {
        for &gate in layer {
            rho.apply_gate(gate)?;
            let (a, b) = gate.qubits();
            match b {
                Some(b) if noise.p2 > 0.0 => rho.depolarize(&[a, b], noise.p2)?,
                None if noise.p1 > 0.0 => rho.depolarize(&[a], noise.p1)?,
                _ => {}
            }
        }
        out.push(rho.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn layer_gate_counts() {
        let c = build_circuit(5, 1, 42).unwrap();
        assert_eq!(c.single_qubit_gates(), 10);
        assert_eq!(c.two_qubit_gates(), 4);

        let c = build_circuit(1, 3, 42).unwrap();
        assert_eq!(c.single_qubit_gates(), 6);
        assert_eq!(c.two_qubit_gates(), 0);

        // Totals match 2nD and (n-1)D across widths and depths.
        for n in 1..=6 {
            for d in 0..=4 {
                let c = build_circuit(n, d, 1).unwrap();
                assert_eq!(c.single_qubit_gates(), 2 * n * d);
                assert_eq!(c.two_qubit_gates(), (n - 1) * d);
            }
        }
    }

    #[test]
    fn brickwork_pairs_are_non_intersecting() {
        let c = build_circuit(6, 1, 5).unwrap();
        let czs: Vec<(usize, usize)> = c.layers()[0]
            .iter()
            .filter_map(|g| match *g {
                Gate::Cz { a, b } => Some((a, b)),
                _ => None,
            })
            .collect();
        assert_eq!(czs, vec![(0, 1), (2, 3), (4, 5), (1, 2), (3, 4)]);
    }

    #[test]
    fn same_seed_reproduces_angles() {
        let a = build_circuit(4, 6, 837).unwrap();
        let b = build_circuit(4, 6, 837).unwrap();
        assert_eq!(a, b);
        let c = build_circuit(4, 6, 838).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_width_rejected() {
        assert!(build_circuit(0, 1, 0).is_err());
    }

    #[test]
    fn noiseless_evolution_keeps_unit_purity() {
        let c = build_circuit(4, 6, 9).unwrap();
        let states = evolve_noisy(&c, &NoiseModel::NOISELESS).unwrap();
        assert_eq!(states.len(), 6);
        for s in &states {
            assert!((s.purity() - 1.0).abs() <= 1e-10);
        }
    }

    /// Dense-matrix oracle: multiply out the full-register unitary of every
    /// gate and conjugate the input in one shot.
    fn full_unitary(circuit: &Circuit) -> Vec<Complex64> {
        let n = circuit.width();
        let dim = 1usize << n;
        let mut u = vec![Complex64::ZERO; dim * dim];
        for r in 0..dim {
            u[r * dim + r] = Complex64::ONE;
        }
        let gate_matrix = |g: Gate| -> Vec<Complex64> {
            let mut m = vec![Complex64::ZERO; dim * dim];
            match g {
                Gate::Cz { a, b } => {
                    let ma = 1usize << (n - 1 - a);
                    let mb = 1usize << (n - 1 - b);
                    for i in 0..dim {
                        let sign = if i & ma != 0 && i & mb != 0 { -1.0 } else { 1.0 };
                        m[i * dim + i] = Complex64::from(sign);
                    }
                }
                Gate::Cnot { control, target } => {
                    let mc = 1usize << (n - 1 - control);
                    let mt = 1usize << (n - 1 - target);
                    for i in 0..dim {
                        let j = if i & mc != 0 { i ^ mt } else { i };
                        m[j * dim + i] = Complex64::ONE;
                    }
                }
                _ => {
                    let (q, _) = g.qubits();
                    let i = Complex64::i();
                    let u2: [[Complex64; 2]; 2] = match g {
                        Gate::Rx { angle, .. } => {
                            let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
                            [[Complex64::from(c), -i * s], [-i * s, Complex64::from(c)]]
                        }
                        Gate::Ry { angle, .. } => {
                            let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
                            [
                                [Complex64::from(c), Complex64::from(-s)],
                                [Complex64::from(s), Complex64::from(c)],
                            ]
                        }
                        Gate::Hadamard { .. } => {
                            let h = Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
                            [[h, h], [h, -h]]
                        }
                        Gate::SDagger { .. } => [
                            [Complex64::ONE, Complex64::ZERO],
                            [Complex64::ZERO, -i],
                        ],
                        _ => unreachable!(),
                    };
                    let mask = 1usize << (n - 1 - q);
                    for row in 0..dim {
                        for col in 0..dim {
                            if row & !mask != col & !mask {
                                continue;
                            }
                            let rb = usize::from(row & mask != 0);
                            let cb = usize::from(col & mask != 0);
                            m[row * dim + col] = u2[rb][cb];
                        }
                    }
                }
            }
            m
        };
        for layer in circuit.layers() {
            for &g in layer {
                let m = gate_matrix(g);
                let mut next = vec![Complex64::ZERO; dim * dim];
                for r in 0..dim {
                    for k in 0..dim {
                        let v = m[r * dim + k];
                        if v == Complex64::ZERO {
                            continue;
                        }
                        for c in 0..dim {
                            next[r * dim + c] += v * u[k * dim + c];
                        }
                    }
                }
                u = next;
            }
        }
        u
    }

    #[test]
    fn noiseless_evolution_matches_full_unitary_product() {
        let circuit = build_circuit(3, 2, 31).unwrap();
        let states = evolve_noisy(&circuit, &NoiseModel::NOISELESS).unwrap();
        let rho = states.last().unwrap();

        let u = full_unitary(&circuit);
        let dim = 1usize << 3;
        // U rho0 U^dag with rho0 = |0..0><0..0| is the outer product of U's
        // first column with itself.
        for r in 0..dim {
            for c in 0..dim {
                let expect = u[r * dim] * u[c * dim].conj();
                assert!(
                    (rho.entry(r, c) - expect).norm() <= 1e-10,
                    "entry ({r},{c})"
                );
            }
        }
    }

    #[test]
    fn entropy_density_saturates_at_depth() {
        let c = build_circuit(3, 30, 3).unwrap();
        let noise = NoiseModel::depolarizing(0.008, 0.054).unwrap();
        let states = evolve_noisy(&c, &noise).unwrap();
        let densities: Vec<f64> = states.iter().map(|s| s.renyi2_density()).collect();
        for w in densities.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "entropy density decreased: {w:?}");
        }
        assert!(densities[29] >= 0.99, "final density {}", densities[29]);
    }

    #[test]
    fn wider_registers_accumulate_entropy_faster() {
        let noise = NoiseModel::depolarizing(0.008, 0.054).unwrap();
        let mut at_depth5 = Vec::new();
        for n in 2..=6usize {
            let seed = crate::seeding::derive_seed(12, &[1, n as u64]);
            let c = build_circuit(n, 5, seed).unwrap();
            let states = evolve_noisy(&c, &noise).unwrap();
            at_depth5.push(states[4].renyi2_density());
        }
        for w in at_depth5.windows(2) {
            assert!(w[1] > w[0], "density at depth 5 not increasing: {at_depth5:?}");
        }
    }
}
