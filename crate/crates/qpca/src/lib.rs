//! State-compromise attacks on Blum-Micali generators, run end to end on a
//! desk-scale state-vector simulator.
//!
//! A Blum-Micali generator iterates a one-way permutation `f` over a finite
//! domain and emits one hard-core bit per step. Recovering any internal state
//! compromises the stream permanently: every earlier and later output can be
//! replayed through `f` and its inverse. This crate mounts that compromise as
//! a quantum search for two concrete instances:
//!
//! - **BBS** (Blum-Blum-Shub): squaring modulo a Blum integer, with a fixed
//!   bit of the state as the hard-core predicate.
//! - **Kaliski**: scalar multiplication on an elliptic curve `y² = x³ + c`
//!   over `F_p` (p ≡ 2 mod 3), with a threshold predicate on `y`.
//!
//! The attack puts the domain register in uniform superposition, entangles
//! each element with flag qubits recording whether it would have emitted the
//! observed bits (the marking walk), then boosts the consistent branch with
//! amplitude amplification and measures the domain register. With a single
//! consistent seed among `N = 2^n` encodings the success probability after
//! `k` iterations is `sin²((2k+1)·arcsin(1/√N))`.
//!
//! # Layout
//!
//! - [`generators`] — the classical generators under attack, exported as
//!   uniform permutation/predicate tables ([`generators::GeneratorSpec`]).
//! - [`statevec`] — dense simulator over a domain/bits/ancilla register
//!   layout with exactly the gate families the attack needs.
//! - [`attack`] — planning, the marking walk, amplification, classical
//!   cross-checks, and state recovery.
//! - [`cli`] — the `qpca` command-line front end and report serialization.
//!
//! # Example
//!
//! ```
//! use qpca::attack::execute_attack;
//! use qpca::bits::BitSeq;
//! use qpca::generators::{bbs_spec, BbsParams};
//!
//! let spec = bbs_spec(&BbsParams::new(21, 5)?)?;
//! let report = execute_attack(&spec, &"10".parse::<BitSeq>()?, 0)?;
//! assert_eq!(report.top_outcome, 9);
//! assert!(report.agreement);
//! # Ok::<(), qpca::Error>(())
//! ```

pub mod attack;
pub mod bits;
pub mod cli;
pub mod generators;
pub mod numfmt;
pub mod statevec;

pub use bits::BitSeq;

/// Error type shared by every module in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied value violates an operation's precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// A generator instance cannot be assembled from the given parameters.
    #[error("construction failed: {0}")]
    Construction(String),
    /// An API usage rule was broken, e.g. a Hadamard aimed at the bit register.
    #[error("contract violation: {0}")]
    Contract(String),
    /// The requested computation exceeds the configured resource limits.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// True iff `table` maps `0..len` onto `0..len` with every output hit once.
pub(crate) fn is_bijection(table: &[usize]) -> bool {
    let mut seen = vec![false; table.len()];
    for &t in table {
        if t >= table.len() || seen[t] {
            return false;
        }
        seen[t] = true;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::is_bijection;

    #[test]
    fn bijection_check() {
        assert!(is_bijection(&[0, 1, 2, 3]));
        assert!(is_bijection(&[3, 0, 2, 1]));
        assert!(!is_bijection(&[0, 0, 2, 3]));
        assert!(!is_bijection(&[0, 1, 2, 4]));
        assert!(is_bijection(&[]));
    }

    #[test]
    fn results_are_shareable_across_threads() {
        fn check<T: Send + Sync>() {}
        check::<crate::generators::GeneratorSpec>();
        check::<crate::statevec::StateVector>();
        check::<crate::attack::AttackPlan>();
        check::<crate::attack::AttackTrace>();
        check::<crate::attack::AttackReport>();
    }
}
