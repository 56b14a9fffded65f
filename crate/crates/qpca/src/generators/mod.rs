//! The classical Blum-Micali generators under attack.
//!
//! Both instances — BBS over a Blum modulus and Kaliski over an elliptic
//! curve group — compile down to the same table form: a bijection on the
//! `2^n` register encodings plus a bit-valued predicate, with everything
//! outside the true domain held fixed. The attack and the simulator only
//! ever see that table form.

mod bbs;
mod ec;
mod kaliski;

pub use bbs::{bbs_spec, hardcore_bit, quadratic_residues, rabin_step, BbsParams};
pub use ec::{ec_add, ec_scalar_mul, CurveParams, EcPoint};
pub use kaliski::{default_generator, kaliski_lambda, kaliski_phi, kaliski_spec};

pub(crate) use bbs::bit_width;

use crate::bits::BitSeq;
use crate::{Error, Result};

/// A Blum-Micali generator instance in table form.
///
/// `permutation` is a bijection on `[0, 2^n)` that fixes every padding index
/// (encodings outside the true domain), and `predicate` is total with value 0
/// on padding. Specs are immutable once built and cheap to clone.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    name: &'static str,
    params: String,
    predicate_symbol: &'static str,
    width: usize,
    permutation: Vec<usize>,
    inverse: Vec<usize>,
    predicate: Vec<u8>,
    in_domain: Vec<bool>,
    domain: Vec<usize>,
    labels: Vec<String>,
}

impl GeneratorSpec {
    /// Validates and assembles a spec; see the field invariants above.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: &'static str,
        params: String,
        predicate_symbol: &'static str,
        width: usize,
        permutation: Vec<usize>,
        predicate: Vec<u8>,
        domain: Vec<usize>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let size = 1usize
            .checked_shl(width as u32)
            .filter(|_| width > 0 && width < usize::BITS as usize)
            .ok_or_else(|| Error::Parameter(format!("unusable register width {width}")))?;
        if permutation.len() != size || predicate.len() != size {
            return Err(Error::Parameter(format!(
                "tables must have length 2^{width} = {size}"
            )));
        }
        if !crate::is_bijection(&permutation) {
            return Err(Error::Construction(
                "permutation table is not a bijection".into(),
            ));
        }
        if predicate.iter().any(|&b| b > 1) {
            return Err(Error::Parameter("predicate values must be 0 or 1".into()));
        }
        let mut in_domain = vec![false; size];
        for &x in &domain {
            if x >= size {
                return Err(Error::Parameter(format!(
                    "domain member {x} exceeds 2^{width}"
                )));
            }
            if in_domain[x] {
                return Err(Error::Parameter(format!("domain member {x} repeated")));
            }
            in_domain[x] = true;
        }
        for x in 0..size {
            if !in_domain[x] {
                if permutation[x] != x {
                    return Err(Error::Construction(format!(
                        "padding index {x} must be a fixed point, maps to {}",
                        permutation[x]
                    )));
                }
                if predicate[x] != 0 {
                    return Err(Error::Construction(format!(
                        "padding index {x} must have predicate 0"
                    )));
                }
            }
        }
        let mut domain = domain;
        domain.sort_unstable();
        let mut inverse = vec![0usize; size];
        for (x, &y) in permutation.iter().enumerate() {
            inverse[y] = x;
        }
        let labels = labels.unwrap_or_else(|| (0..size).map(|i| i.to_string()).collect());
        if labels.len() != size {
            return Err(Error::Parameter(
                "label table must cover every encoding".into(),
            ));
        }
        Ok(GeneratorSpec {
            name,
            params,
            predicate_symbol,
            width,
            permutation,
            inverse,
            predicate,
            in_domain,
            domain,
            labels,
        })
    }

    pub fn name(&self) -> &str {
        self.name
    }

    /// Human-readable instance parameters, e.g. `M=21 j=5`.
    pub fn params(&self) -> &str {
        &self.params
    }

    /// Display name of the predicate-controlled gate family ("delta"/"lambda").
    pub fn predicate_symbol(&self) -> &str {
        self.predicate_symbol
    }

    /// Qubit width n of the state register.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of register encodings, 2^n.
    pub fn size(&self) -> usize {
        self.permutation.len()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn inverse_permutation(&self) -> &[usize] {
        &self.inverse
    }

    /// One forward step of the one-way permutation.
    pub fn permute(&self, x: usize) -> usize {
        self.permutation[x]
    }

    /// One backward step through the inverse table.
    pub fn invert(&self, x: usize) -> usize {
        self.inverse[x]
    }

    pub fn predicate_bit(&self, x: usize) -> u8 {
        self.predicate[x]
    }

    pub fn is_in_domain(&self, x: usize) -> bool {
        self.in_domain[x]
    }

    /// The true-domain encodings in ascending order.
    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    /// Display label for an encoding (EC points for Kaliski, decimal otherwise).
    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    /// Mask of states a δ_b / λ_b gate flips: in the true domain with
    /// predicate value `bit`.
    pub fn marked_for_bit(&self, bit: u8) -> Vec<bool> {
        (0..self.size())
            .map(|x| self.in_domain[x] && self.predicate[x] == bit)
            .collect()
    }
}

/// Running state of a generator: the current encoding plus everything
/// emitted so far.
#[derive(Debug, Clone)]
pub struct GeneratorState {
    current: usize,
    history: Vec<(usize, u8)>,
}

impl GeneratorState {
    /// Seeds the generator; the seed must be a true-domain encoding.
    pub fn new(spec: &GeneratorSpec, seed: usize) -> Result<Self> {
        if seed >= spec.size() || !spec.is_in_domain(seed) {
            return Err(Error::Parameter(format!(
                "seed {seed} is not in the generator domain"
            )));
        }
        Ok(GeneratorState {
            current: seed,
            history: Vec::new(),
        })
    }

    /// Advances one step: x ← f(x), then emits the predicate bit of the new
    /// state. Returns the (state, bit) pair and appends it to the history.
    pub fn step(&mut self, spec: &GeneratorSpec) -> (usize, u8) {
        self.current = spec.permute(self.current);
        let bit = spec.predicate_bit(self.current);
        self.history.push((self.current, bit));
        (self.current, bit)
    }

    pub fn current(&self) -> usize {
        self.current
    }

    pub fn history(&self) -> &[(usize, u8)] {
        &self.history
    }
}

/// Output of [`generate_bits`]: internal states x₁…x_m and their bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedSequence {
    pub states: Vec<usize>,
    pub bits: BitSeq,
}

/// Runs the generator for `count` steps from `seed`.
///
/// Iterates xᵢ = f(xᵢ₋₁) with x₀ = seed and emits bᵢ = predicate(xᵢ), so the
/// returned bits match the predicate of the returned states entry by entry.
pub fn generate_bits(spec: &GeneratorSpec, seed: usize, count: usize) -> Result<GeneratedSequence> {
    let mut state = GeneratorState::new(spec, seed)?;
    let mut states = Vec::with_capacity(count);
    let mut bits = Vec::with_capacity(count);
    for _ in 0..count {
        let (x, b) = state.step(spec);
        states.push(x);
        bits.push(b);
    }
    Ok(GeneratedSequence {
        states,
        bits: BitSeq::new(bits).expect("predicate emits 0/1"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bbs21() -> GeneratorSpec {
        bbs_spec(&BbsParams::new(21, 5).unwrap()).unwrap()
    }

    fn kaliski5() -> GeneratorSpec {
        kaliski_spec(&CurveParams::new(5, 1).unwrap(), &EcPoint::affine(2, 2)).unwrap()
    }

    #[test]
    fn spec_validation_rejects_bad_tables() {
        // Non-bijective permutation.
        assert!(GeneratorSpec::new(
            "test",
            String::new(),
            "delta",
            2,
            vec![0, 0, 2, 3],
            vec![0; 4],
            vec![1],
            None,
        )
        .is_err());
        // Padding not fixed.
        assert!(GeneratorSpec::new(
            "test",
            String::new(),
            "delta",
            2,
            vec![0, 2, 1, 3],
            vec![0; 4],
            vec![1],
            None,
        )
        .is_err());
        // Predicate 1 on padding.
        assert!(GeneratorSpec::new(
            "test",
            String::new(),
            "delta",
            2,
            vec![0, 1, 2, 3],
            vec![0, 0, 1, 0],
            vec![1],
            None,
        )
        .is_err());
    }

    #[test]
    fn permutation_is_bijection_for_both_instances() {
        for spec in [bbs21(), kaliski5()] {
            let mut sorted = spec.permutation().to_vec();
            sorted.sort_unstable();
            let identity: Vec<usize> = (0..spec.size()).collect();
            assert_eq!(sorted, identity, "{}", spec.name());
        }
    }

    #[test]
    fn generate_bits_bbs_examples() {
        let spec = bbs21();
        let seq = generate_bits(&spec, 16, 2).unwrap();
        assert_eq!(seq.states, vec![4, 16]);
        assert_eq!(seq.bits.to_string(), "00");

        let seq = generate_bits(&spec, 9, 2).unwrap();
        assert_eq!(seq.states, vec![18, 9]);
        assert_eq!(seq.bits.to_string(), "01");
    }

    #[test]
    fn generate_bits_kaliski_chain() {
        // 2 ↦ 4 ↦ 3 under the reference table; bits are the predicate of the
        // new state at each step.
        let seq = generate_bits(&kaliski5(), 2, 2).unwrap();
        assert_eq!(seq.states, vec![4, 3]);
        assert_eq!(seq.bits.to_string(), "01");
    }

    #[test]
    fn generate_bits_rejects_padding_seed() {
        assert!(generate_bits(&bbs21(), 0, 1).is_err());
        assert!(generate_bits(&bbs21(), 5, 1).is_err());
        assert!(generate_bits(&kaliski5(), 7, 1).is_err());
    }

    #[test]
    fn bits_match_predicate_of_states_for_every_seed() {
        for spec in [bbs21(), kaliski5()] {
            for &seed in spec.domain() {
                let seq = generate_bits(&spec, seed, 4).unwrap();
                for (x, b) in seq.states.iter().zip(seq.bits.iter()) {
                    assert_eq!(spec.predicate_bit(*x), b);
                }
            }
        }
    }

    #[test]
    fn inverse_table_round_trips() {
        for spec in [bbs21(), kaliski5()] {
            for x in 0..spec.size() {
                assert_eq!(spec.invert(spec.permute(x)), x);
                assert_eq!(spec.permute(spec.invert(x)), x);
            }
        }
    }

    #[test]
    fn generator_state_history_invariant() {
        let spec = kaliski5();
        let mut state = GeneratorState::new(&spec, 2).unwrap();
        for _ in 0..5 {
            state.step(&spec);
        }
        for &(x, b) in state.history() {
            assert_eq!(spec.predicate_bit(x), b);
        }
        assert_eq!(state.history().len(), 5);
    }

    #[test]
    fn kaliski_labels_show_points() {
        let spec = kaliski5();
        assert_eq!(spec.label(4), "(2,2)");
        assert_eq!(spec.label(6), "O");
        assert_eq!(spec.label(0), "0");
    }
}
