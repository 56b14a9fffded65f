//! The permanent-compromise attack end to end: planning, the marking walk,
//! amplitude amplification, classical cross-checks, and state recovery.
//!
//! The walk prepares a uniform superposition over the domain register, then
//! for each observed bit bᵢ flips bit-register qubit i on every state whose
//! predicate would have emitted bᵢ and advances the domain register through
//! the permutation. States carrying all-ones flags afterwards are exactly
//! the branches consistent with the whole observation; amplification boosts
//! them before the domain register is measured.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_4;
use std::fmt;

use num_complex::Complex64;

use crate::bits::BitSeq;
use crate::generators::GeneratorSpec;
use crate::statevec::{Register, RegisterLayout, StateVector, UnitaryProcedure, AMP_EPS};
use crate::{Error, Result};

/// Derived attack parameters for one generator instance and observation.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackPlan {
    spec: GeneratorSpec,
    observed: BitSeq,
    layout: RegisterLayout,
    assumed_solutions: usize,
    iterations: usize,
    theta: f64,
    predicted_success: f64,
}

impl AttackPlan {
    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn observed(&self) -> &BitSeq {
        &self.observed
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    /// Domain register width n.
    pub fn domain_qubits(&self) -> usize {
        self.layout.domain_qubits()
    }

    /// Bit register width m (number of observed bits).
    pub fn bit_qubits(&self) -> usize {
        self.layout.bit_qubits()
    }

    pub fn assumed_solutions(&self) -> usize {
        self.assumed_solutions
    }

    /// Amplification iteration count k.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// θ = arcsin(√(solutions / 2ⁿ)).
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// sin²((2k+1)·θ).
    pub fn predicted_success(&self) -> f64 {
        self.predicted_success
    }
}

/// Plans the attack assuming a single consistent seed.
pub fn plan_attack(spec: &GeneratorSpec, bits: &BitSeq) -> Result<AttackPlan> {
    plan_attack_assuming(spec, bits, 1)
}

/// Plans the attack for a stated solution count (tests use this to explore
/// multi-solution observations; the closed form is unchanged).
pub fn plan_attack_assuming(
    spec: &GeneratorSpec,
    bits: &BitSeq,
    assumed_solutions: usize,
) -> Result<AttackPlan> {
    if bits.is_empty() {
        return Err(Error::Parameter("observed bit sequence is empty".into()));
    }
    let layout = RegisterLayout::new(spec.width(), bits.len())?;
    let size = spec.size();
    if assumed_solutions == 0 || assumed_solutions > size {
        return Err(Error::Parameter(format!(
            "assumed solution count {assumed_solutions} out of range 1..={size}"
        )));
    }
    let ratio = assumed_solutions as f64 / size as f64;
    let theta = ratio.sqrt().asin();
    let iterations = (FRAC_PI_4 * ratio.recip().sqrt()).round_ties_even() as usize;
    let predicted_success = ((2 * iterations + 1) as f64 * theta).sin().powi(2);
    Ok(AttackPlan {
        spec: spec.clone(),
        observed: bits.clone(),
        layout,
        assumed_solutions,
        iterations,
        theta,
        predicted_success,
    })
}

/// The full walk circuit (Hadamard layer, then alternating predicate flips
/// and the permutation), reusable as the preparation inside amplification.
pub struct WalkCircuit<'a> {
    spec: &'a GeneratorSpec,
    marked: Vec<Vec<bool>>,
}

impl<'a> WalkCircuit<'a> {
    pub fn new(spec: &'a GeneratorSpec, observed: &BitSeq) -> Self {
        let marked = observed.iter().map(|b| spec.marked_for_bit(b)).collect();
        WalkCircuit { spec, marked }
    }

    /// Applies the walk, reporting each intermediate state to `observe` with
    /// its snapshot index: 1 after the Hadamard layer, then 2i after the
    /// i-th flip and 2i+1 after the following permutation.
    fn apply_observed(
        &self,
        state: &StateVector,
        observe: &mut dyn FnMut(usize, &StateVector),
    ) -> Result<StateVector> {
        let mut sv = state.apply_hadamard_layer(&[Register::Domain, Register::Ancilla])?;
        observe(1, &sv);
        for (i, marked) in self.marked.iter().enumerate() {
            let step = i + 1;
            sv = sv.apply_predicate_flip(marked, step)?;
            observe(2 * step, &sv);
            sv = sv.apply_permutation_gate(self.spec.permutation())?;
            observe(2 * step + 1, &sv);
        }
        Ok(sv)
    }
}

impl UnitaryProcedure for WalkCircuit<'_> {
    fn apply(&self, state: &StateVector) -> Result<StateVector> {
        self.apply_observed(state, &mut |_, _| {})
    }

    /// Gate inverses in reverse order: the permutation inverts through its
    /// inverse table; the flips and the Hadamard layer are self-inverse.
    fn apply_inverse(&self, state: &StateVector) -> Result<StateVector> {
        let mut sv = state.clone();
        for (i, marked) in self.marked.iter().enumerate().rev() {
            sv = sv.apply_permutation_gate(self.spec.inverse_permutation())?;
            sv = sv.apply_predicate_flip(marked, i + 1)?;
        }
        sv.apply_hadamard_layer(&[Register::Domain, Register::Ancilla])
    }
}

/// Ancilla rendering of a trace entry. The ancilla stays an exact |−⟩
/// tensor factor from the Hadamard layer onwards, so entries report it in
/// the {|+⟩, |−⟩} basis whenever it factors that way and in the
/// computational basis otherwise (ψ0 prints as ancilla 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AncillaState {
    Zero,
    One,
    Plus,
    Minus,
}

impl fmt::Display for AncillaState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AncillaState::Zero => "0",
            AncillaState::One => "1",
            AncillaState::Plus => "+",
            AncillaState::Minus => "-",
        })
    }
}

/// One nonzero component of a snapshot: domain value, bit-register value
/// (b₁ is the most significant bit), ancilla, and the coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub domain: usize,
    pub bits: usize,
    pub ancilla: AncillaState,
    pub amplitude: Complex64,
}

/// A labeled intermediate state ψ_i with its nonzero entries sorted by
/// (domain, bits).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSnapshot {
    pub label: String,
    pub entries: Vec<TraceEntry>,
}

impl TraceSnapshot {
    /// The entry for one (domain, bits) pair, if present.
    pub fn entry(&self, domain: usize, bits: usize) -> Option<&TraceEntry> {
        self.entries
            .iter()
            .find(|e| e.domain == domain && e.bits == bits)
    }

    /// Domain values whose bit register equals `bits` in this snapshot.
    pub fn domains_with_bits(&self, bits: usize) -> BTreeSet<usize> {
        self.entries
            .iter()
            .filter(|e| e.bits == bits)
            .map(|e| e.domain)
            .collect()
    }
}

/// Snapshots ψ0…ψ(2m+1) of the walk (plus ψ(2m+2) once amplified) and the
/// per-step candidate sets X̂ᵢ.
///
/// X̂ᵢ is read at ψ(2i): the domain values whose first i flag qubits are all
/// set, pulled back through i−1 inverse permutation steps so the set is
/// expressed in first-internal-state (seed) values. Expressed that way,
/// X̂_m equals the classical brute-force seed set exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackTrace {
    snapshots: Vec<TraceSnapshot>,
    candidates: Vec<BTreeSet<usize>>,
}

impl AttackTrace {
    pub fn snapshots(&self) -> &[TraceSnapshot] {
        &self.snapshots
    }

    pub fn snapshot(&self, label: &str) -> Option<&TraceSnapshot> {
        self.snapshots.iter().find(|s| s.label == label)
    }

    /// Number of observed bits m.
    pub fn steps(&self) -> usize {
        self.candidates.len()
    }

    pub fn candidate_sets(&self) -> &[BTreeSet<usize>] {
        &self.candidates
    }

    fn push_snapshot(&mut self, snapshot: TraceSnapshot) {
        self.snapshots.push(snapshot);
    }
}

/// X̂ᵢ for step `i` in 1..=m.
pub fn candidate_set(trace: &AttackTrace, step: usize) -> Result<&BTreeSet<usize>> {
    if step == 0 || step > trace.steps() {
        return Err(Error::Parameter(format!(
            "step {step} out of range 1..={}",
            trace.steps()
        )));
    }
    Ok(&trace.candidates[step - 1])
}

/// Runs the marking walk from ψ0 and returns ψ(2m+1) with the trace.
pub fn run_walk(plan: &AttackPlan) -> Result<(StateVector, AttackTrace)> {
    let walk = WalkCircuit::new(&plan.spec, &plan.observed);
    let initial = StateVector::initial(plan.layout);
    let mut trace = AttackTrace {
        snapshots: vec![extract_snapshot("psi0", &initial)],
        candidates: Vec::with_capacity(plan.bit_qubits()),
    };
    let spec = &plan.spec;
    let mut candidates = Vec::new();
    let final_state = walk.apply_observed(&initial, &mut |stage, sv| {
        trace.push_snapshot(extract_snapshot(&format!("psi{stage}"), sv));
        if stage >= 2 && stage % 2 == 0 {
            candidates.push(consistent_candidates(spec, sv, stage / 2));
        }
    })?;
    trace.candidates = candidates;
    Ok((final_state, trace))
}

/// Applies the planned amplification to the walk output.
pub fn amplify(state: &StateVector, plan: &AttackPlan) -> Result<StateVector> {
    let walk = WalkCircuit::new(&plan.spec, &plan.observed);
    let good = BitSeq::ones(plan.bit_qubits());
    state.grover_iterate(&walk, good.as_slice(), plan.iterations)
}

/// Internal states recovered around a representative, with their bits.
/// `backward` is in walking order (the entry for offset −1 first), so
/// reading it reversed gives the chronological chain x₁, x₂, ….
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveredStates {
    pub backward: Vec<(usize, u8)>,
    pub representative: (usize, u8),
    pub forward: Vec<(usize, u8)>,
}

/// Walks the permutation backward and forward from a recovered state.
pub fn recover_internal_states(
    spec: &GeneratorSpec,
    representative: usize,
    back: usize,
    forward: usize,
) -> Result<RecoveredStates> {
    if representative >= spec.size() || !spec.is_in_domain(representative) {
        return Err(Error::Parameter(format!(
            "representative {representative} is not in the generator domain"
        )));
    }
    let mut backward = Vec::with_capacity(back);
    let mut state = representative;
    for _ in 0..back {
        state = spec.invert(state);
        backward.push((state, spec.predicate_bit(state)));
    }
    let mut forward_states = Vec::with_capacity(forward);
    state = representative;
    for _ in 0..forward {
        state = spec.permute(state);
        forward_states.push((state, spec.predicate_bit(state)));
    }
    Ok(RecoveredStates {
        backward,
        representative: (representative, spec.predicate_bit(representative)),
        forward: forward_states,
    })
}

/// Exhaustive classical oracle: every first internal state x₁ whose chain
/// x₁, f(x₁), f²(x₁), … emits exactly the observed bits.
pub fn consistent_seeds_bruteforce(spec: &GeneratorSpec, bits: &BitSeq) -> Result<BTreeSet<usize>> {
    if bits.is_empty() {
        return Err(Error::Parameter("observed bit sequence is empty".into()));
    }
    let observed = bits.as_slice();
    let mut seeds = BTreeSet::new();
    for &first in spec.domain() {
        let mut state = first;
        let mut consistent = spec.predicate_bit(state) == observed[0];
        for &bit in &observed[1..] {
            if !consistent {
                break;
            }
            state = spec.permute(state);
            consistent = spec.predicate_bit(state) == bit;
        }
        if consistent {
            seeds.insert(first);
        }
    }
    Ok(seeds)
}

/// Final product of the attack pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackReport {
    pub plan: AttackPlan,
    /// Domain-register outcomes sorted by descending probability, ties by
    /// ascending outcome.
    pub distribution: Vec<(usize, f64)>,
    pub top_outcome: usize,
    pub top_probability: f64,
    /// One sampled measurement of the domain register (seeded).
    pub sampled_outcome: usize,
    pub classical_seeds: BTreeSet<usize>,
    /// Recovered chain around the representative (m back, m forward), absent
    /// when the top outcome is a padding index.
    pub recovered: Option<RecoveredStates>,
    /// True iff walking the top outcome backward m steps lands in the
    /// classical seed set.
    pub agreement: bool,
    /// Full trace ψ0…ψ(2m+2).
    pub trace: AttackTrace,
}

/// Runs the whole pipeline: plan, walk, amplify, measure, cross-check,
/// recover.
pub fn execute_attack(spec: &GeneratorSpec, bits: &BitSeq, rng_seed: u64) -> Result<AttackReport> {
    let plan = plan_attack(spec, bits)?;
    let (walked, mut trace) = run_walk(&plan)?;
    let amplified = amplify(&walked, &plan)?;
    let final_label = format!("psi{}", 2 * plan.bit_qubits() + 2);
    trace.push_snapshot(extract_snapshot(&final_label, &amplified));

    let mut distribution: Vec<(usize, f64)> = amplified
        .measure_register_distribution(Register::Domain)
        .into_iter()
        .collect();
    distribution.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let (top_outcome, top_probability) = distribution[0];
    let sampled_outcome = amplified.sample_measurement(Register::Domain, rng_seed);

    let classical_seeds = consistent_seeds_bruteforce(spec, bits)?;
    let mut seed_of_top = top_outcome;
    for _ in 0..plan.bit_qubits() {
        seed_of_top = spec.invert(seed_of_top);
    }
    let agreement = !classical_seeds.is_empty() && classical_seeds.contains(&seed_of_top);
    let recovered = if spec.is_in_domain(top_outcome) {
        Some(recover_internal_states(
            spec,
            top_outcome,
            plan.bit_qubits(),
            plan.bit_qubits(),
        )?)
    } else {
        None
    };

    Ok(AttackReport {
        plan,
        distribution,
        top_outcome,
        top_probability,
        sampled_outcome,
        classical_seeds,
        recovered,
        agreement,
        trace,
    })
}

/// Domain values whose first `step` flag qubits are all set, pulled back to
/// seed values through step−1 inverse permutation steps.
fn consistent_candidates(
    spec: &GeneratorSpec,
    state: &StateVector,
    step: usize,
) -> BTreeSet<usize> {
    let layout = state.layout();
    let m = layout.bit_qubits();
    let mask = ((1usize << step) - 1) << (m - step);
    let mut out = BTreeSet::new();
    for (index, amp) in state.amplitudes().iter().enumerate() {
        if amp.norm() > AMP_EPS && layout.bits_of(index) & mask == mask {
            let mut seed = layout.domain_of(index);
            for _ in 1..step {
                seed = spec.invert(seed);
            }
            out.insert(seed);
        }
    }
    out
}

/// Collapses each (domain, bits) pair's two ancilla amplitudes into one
/// entry when the ancilla factors as |−⟩, |+⟩, or a computational state.
fn extract_snapshot(label: &str, state: &StateVector) -> TraceSnapshot {
    let layout = state.layout();
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut entries = Vec::new();
    for domain in 0..layout.domain_len() {
        for bits in 0..layout.bits_len() {
            let low = state.amplitude(domain, bits, 0);
            let high = state.amplitude(domain, bits, 1);
            if low.norm() < AMP_EPS && high.norm() < AMP_EPS {
                continue;
            }
            let mut push = |ancilla, amplitude| {
                entries.push(TraceEntry {
                    domain,
                    bits,
                    ancilla,
                    amplitude,
                })
            };
            if (low + high).norm() < AMP_EPS {
                push(AncillaState::Minus, low * sqrt2);
            } else if (low - high).norm() < AMP_EPS {
                push(AncillaState::Plus, low * sqrt2);
            } else if high.norm() < AMP_EPS {
                push(AncillaState::Zero, low);
            } else if low.norm() < AMP_EPS {
                push(AncillaState::One, high);
            } else {
                push(AncillaState::Zero, low);
                push(AncillaState::One, high);
            }
        }
    }
    TraceSnapshot {
        label: label.to_owned(),
        entries,
    }
}
