//! Dense state-vector simulation over a three-register layout.
//!
//! The registers are packed into one amplitude index as
//! `(domain << (m+1)) | (bits << 1) | ancilla`: the ancilla is qubit 0, the
//! bit register occupies qubits 1..=m (bit-register qubit 1 is the most
//! significant of the field, matching the |b₁b₂…⟩ reading order), and the
//! domain register sits above. Only the gate families the attack needs are
//! implemented: Hadamard layers, classical-bijection permutations,
//! predicate-controlled flips, phase oracles, and amplitude-amplification
//! reflections.

mod matrix;

pub use matrix::{GateMatrix, MAX_GATE_MATRIX_DIM};

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Default bound on total qubits (2^24 amplitudes of 16 bytes each).
pub const DEFAULT_QUBIT_CAP: usize = 24;

/// Amplitudes smaller than this are treated as exact zeros in summaries.
pub(crate) const AMP_EPS: f64 = 1e-12;

/// Register selector for gates and measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Register {
    Domain,
    Bits,
    Ancilla,
}

/// Qubit counts of the three registers; the ancilla is always one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    domain_qubits: usize,
    bit_qubits: usize,
}

impl RegisterLayout {
    pub fn new(domain_qubits: usize, bit_qubits: usize) -> Result<Self> {
        Self::with_cap(domain_qubits, bit_qubits, DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap(domain_qubits: usize, bit_qubits: usize, cap: usize) -> Result<Self> {
        if domain_qubits == 0 || bit_qubits == 0 {
            return Err(Error::Parameter(
                "domain and bit registers need at least one qubit each".into(),
            ));
        }
        let total = domain_qubits + bit_qubits + 1;
        if total > cap {
            return Err(Error::Resource(format!(
                "{total} qubits ({domain_qubits} domain + {bit_qubits} bit + 1 ancilla) \
                 exceed the cap of {cap}"
            )));
        }
        Ok(RegisterLayout {
            domain_qubits,
            bit_qubits,
        })
    }

    pub fn domain_qubits(&self) -> usize {
        self.domain_qubits
    }

    pub fn bit_qubits(&self) -> usize {
        self.bit_qubits
    }

    pub fn total_qubits(&self) -> usize {
        self.domain_qubits + self.bit_qubits + 1
    }

    /// Number of amplitudes, 2^total.
    pub fn len(&self) -> usize {
        1 << self.total_qubits()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn domain_len(&self) -> usize {
        1 << self.domain_qubits
    }

    pub fn bits_len(&self) -> usize {
        1 << self.bit_qubits
    }

    pub fn index(&self, domain: usize, bits: usize, ancilla: usize) -> usize {
        debug_assert!(domain < self.domain_len() && bits < self.bits_len() && ancilla < 2);
        (domain << (self.bit_qubits + 1)) | (bits << 1) | ancilla
    }

    pub fn domain_of(&self, index: usize) -> usize {
        index >> (self.bit_qubits + 1)
    }

    pub fn bits_of(&self, index: usize) -> usize {
        (index >> 1) & (self.bits_len() - 1)
    }

    pub fn ancilla_of(&self, index: usize) -> usize {
        index & 1
    }

    /// Global qubit position of bit-register qubit `step` (1-indexed).
    fn bit_qubit_position(&self, step: usize) -> usize {
        1 + (self.bit_qubits - step)
    }

    fn register_value(&self, register: Register, index: usize) -> usize {
        match register {
            Register::Domain => self.domain_of(index),
            Register::Bits => self.bits_of(index),
            Register::Ancilla => self.ancilla_of(index),
        }
    }
}

/// A state-preparation circuit usable inside amplitude amplification. The
/// inverse must undo `apply` exactly (gate inverses in reverse order).
pub trait UnitaryProcedure {
    fn apply(&self, state: &StateVector) -> Result<StateVector>;
    fn apply_inverse(&self, state: &StateVector) -> Result<StateVector>;
}

/// Complex amplitudes over a [`RegisterLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The attack's start state |0…0⟩|0…0⟩|1⟩.
    pub fn initial(layout: RegisterLayout) -> StateVector {
        Self::basis(layout, 0, 0, 1)
    }

    /// A single computational basis state.
    pub fn basis(
        layout: RegisterLayout,
        domain: usize,
        bits: usize,
        ancilla: usize,
    ) -> StateVector {
        let mut amps = vec![Complex64::ZERO; layout.len()];
        amps[layout.index(domain, bits, ancilla)] = Complex64::ONE;
        StateVector { layout, amps }
    }

    /// Wraps raw amplitudes, checking length and normalization.
    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<StateVector> {
        if amps.len() != layout.len() {
            return Err(Error::Parameter(format!(
                "expected {} amplitudes, got {}",
                layout.len(),
                amps.len()
            )));
        }
        let state = StateVector { layout, amps };
        if (state.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::Parameter(format!(
                "state is not normalized: |ψ| = {}",
                state.norm()
            )));
        }
        Ok(state)
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, domain: usize, bits: usize, ancilla: usize) -> Complex64 {
        self.amps[self.layout.index(domain, bits, ancilla)]
    }

    /// Euclidean norm; 1 within 1e-10 for every state produced here.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hadamard on every qubit of the selected registers. The bit register
    /// is never a legal target in this attack, so selecting it is a
    /// contract violation rather than a parameter error.
    pub fn apply_hadamard_layer(&self, targets: &[Register]) -> Result<StateVector> {
        if targets.is_empty() {
            return Err(Error::Parameter("no Hadamard target registers".into()));
        }
        if targets.contains(&Register::Bits) {
            return Err(Error::Contract(
                "the bit register is never Hadamard-transformed".into(),
            ));
        }
        let mut qubits = Vec::new();
        if targets.contains(&Register::Ancilla) {
            qubits.push(0);
        }
        if targets.contains(&Register::Domain) {
            let base = self.layout.bit_qubits + 1;
            qubits.extend(base..base + self.layout.domain_qubits);
        }
        let mut amps = self.amps.clone();
        for qubit in qubits {
            hadamard_on_qubit(&mut amps, qubit);
        }
        Ok(StateVector {
            layout: self.layout,
            amps,
        })
    }

    /// Relabels the domain register through a classical bijection:
    /// |x⟩|y⟩|a⟩ ↦ |table[x]⟩|y⟩|a⟩.
    pub fn apply_permutation_gate(&self, table: &[usize]) -> Result<StateVector> {
        if table.len() != self.layout.domain_len() {
            return Err(Error::Parameter(format!(
                "permutation table has length {}, expected {}",
                table.len(),
                self.layout.domain_len()
            )));
        }
        if !crate::is_bijection(table) {
            return Err(Error::Parameter(
                "permutation table is not a bijection".into(),
            ));
        }
        let shift = self.layout.bit_qubits + 1;
        let low_mask = (1usize << shift) - 1;
        let mut amps = vec![Complex64::ZERO; self.amps.len()];
        for (index, &amp) in self.amps.iter().enumerate() {
            let image = (table[index >> shift] << shift) | (index & low_mask);
            amps[image] = amp;
        }
        Ok(StateVector {
            layout: self.layout,
            amps,
        })
    }

    /// Flips bit-register qubit `step` on every basis state whose domain
    /// value is marked. `marked` must cover all 2^n domain values.
    pub fn apply_predicate_flip(&self, marked: &[bool], step: usize) -> Result<StateVector> {
        if marked.len() != self.layout.domain_len() {
            return Err(Error::Parameter(format!(
                "marked table has length {}, expected {}",
                marked.len(),
                self.layout.domain_len()
            )));
        }
        if step == 0 || step > self.layout.bit_qubits {
            return Err(Error::Parameter(format!(
                "step {step} out of range 1..={}",
                self.layout.bit_qubits
            )));
        }
        let mask = 1usize << self.layout.bit_qubit_position(step);
        let mut amps = vec![Complex64::ZERO; self.amps.len()];
        for (index, &amp) in self.amps.iter().enumerate() {
            let target = if marked[self.layout.domain_of(index)] {
                index ^ mask
            } else {
                index
            };
            amps[target] = amp;
        }
        Ok(StateVector {
            layout: self.layout,
            amps,
        })
    }

    /// Negates the amplitude of every basis state whose bit register equals
    /// `good_bits` (b₁ first). Equivalent to ancilla-|−⟩ phase kickback.
    pub fn apply_phase_oracle(&self, good_bits: &[u8]) -> Result<StateVector> {
        let pattern = self.bit_pattern_value(good_bits)?;
        let mut amps = self.amps.clone();
        for (index, amp) in amps.iter_mut().enumerate() {
            if self.layout.bits_of(index) == pattern {
                *amp = -*amp;
            }
        }
        Ok(StateVector {
            layout: self.layout,
            amps,
        })
    }

    /// Exact amplitude amplification: `iterations` applications of
    /// G = A · R₀ · A⁻¹ · S_good, where A is `prepare`, R₀ reflects about the
    /// initial state, and S_good is the phase oracle on `good_bits`. If the
    /// input is A|init⟩ with good-subspace norm sin θ, the good amplitude
    /// afterwards is sin((2k+1)θ).
    pub fn grover_iterate(
        &self,
        prepare: &dyn UnitaryProcedure,
        good_bits: &[u8],
        iterations: usize,
    ) -> Result<StateVector> {
        self.bit_pattern_value(good_bits)?;
        let mut state = self.clone();
        for _ in 0..iterations {
            state = state.apply_phase_oracle(good_bits)?;
            state = prepare.apply_inverse(&state)?;
            state = state.reflect_about_initial();
            state = prepare.apply(&state)?;
        }
        Ok(state)
    }

    /// Marginal distribution of one register's measurement outcomes.
    pub fn measure_register_distribution(&self, register: Register) -> BTreeMap<usize, f64> {
        let mut distribution = BTreeMap::new();
        for (index, amp) in self.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            if p > 0.0 {
                *distribution
                    .entry(self.layout.register_value(register, index))
                    .or_insert(0.0) += p;
            }
        }
        distribution.retain(|_, p| *p > 1e-15);
        distribution
    }

    /// Draws one outcome from the marginal distribution, deterministically
    /// for a given seed.
    pub fn sample_measurement(&self, register: Register, rng_seed: u64) -> usize {
        let distribution = self.measure_register_distribution(register);
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let draw: f64 = rng.random();
        let mut cumulative = 0.0;
        let mut last = 0;
        for (&outcome, &p) in &distribution {
            cumulative += p;
            last = outcome;
            if draw < cumulative {
                return outcome;
            }
        }
        last
    }

    /// R₀ = 2|init⟩⟨init| − I: negates everything except the initial basis
    /// state |0…0⟩|0…0⟩|1⟩.
    fn reflect_about_initial(&self) -> StateVector {
        let keep = self.layout.index(0, 0, 1);
        let mut amps = self.amps.clone();
        for (index, amp) in amps.iter_mut().enumerate() {
            if index != keep {
                *amp = -*amp;
            }
        }
        StateVector {
            layout: self.layout,
            amps,
        }
    }

    fn bit_pattern_value(&self, pattern: &[u8]) -> Result<usize> {
        if pattern.len() != self.layout.bit_qubits {
            return Err(Error::Parameter(format!(
                "bit pattern has length {}, expected {}",
                pattern.len(),
                self.layout.bit_qubits
            )));
        }
        if pattern.iter().any(|&b| b > 1) {
            return Err(Error::Parameter("bit pattern values must be 0 or 1".into()));
        }
        Ok(pattern.iter().fold(0usize, |v, &b| (v << 1) | b as usize))
    }
}

fn hadamard_on_qubit(amps: &mut [Complex64], qubit: usize) {
    let mask = 1usize << qubit;
    for index in 0..amps.len() {
        if index & mask == 0 {
            let low = amps[index];
            let high = amps[index | mask];
            amps[index] = (low + high) * FRAC_1_SQRT_2;
            amps[index | mask] = (low - high) * FRAC_1_SQRT_2;
        }
    }
}
