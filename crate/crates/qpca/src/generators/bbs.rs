//! The Blum-Blum-Shub generator: squaring modulo a Blum integer with a
//! fixed-position hard-core bit.

use std::collections::BTreeSet;

use crate::generators::ec::is_prime;
use crate::generators::GeneratorSpec;
use crate::{Error, Result};

/// Parameters of a BBS instance.
///
/// `j` indexes the hard-core bit, 1-indexed from the most significant of the
/// `n`-bit state representation, so `j = n` selects the least significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BbsParams {
    modulus: u64,
    j: usize,
    n: usize,
}

impl BbsParams {
    /// Builds parameters from a modulus alone; factors are not checked beyond
    /// the modulus being odd and large enough to be a product of two primes.
    pub fn new(modulus: u64, j: usize) -> Result<Self> {
        if modulus < 6 || modulus.is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "modulus {modulus} must be odd and at least 6"
            )));
        }
        let n = bit_width(modulus);
        if j == 0 || j > n {
            return Err(Error::Parameter(format!(
                "bit index {j} out of range 1..={n}"
            )));
        }
        Ok(BbsParams { modulus, j, n })
    }

    /// Builds parameters from the prime factors, checking the Blum condition
    /// p ≡ q ≡ 3 (mod 4).
    pub fn with_factors(p: u64, q: u64, j: usize) -> Result<Self> {
        for f in [p, q] {
            if !is_prime(f) {
                return Err(Error::Parameter(format!("factor {f} is not prime")));
            }
            if f % 4 != 3 {
                return Err(Error::Parameter(format!("factor {f} is not 3 mod 4")));
            }
        }
        if p == q {
            return Err(Error::Parameter("factors must be distinct".into()));
        }
        let modulus = p
            .checked_mul(q)
            .ok_or_else(|| Error::Parameter(format!("modulus {p}·{q} overflows u64")))?;
        Self::new(modulus, j)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn bit_index(&self) -> usize {
        self.j
    }

    /// Bit width of the state register, ⌈log₂ M⌉.
    pub fn width(&self) -> usize {
        self.n
    }
}

/// Number of bits needed to represent values in `[0, m)`, i.e. ⌈log₂ m⌉.
pub(crate) fn bit_width(m: u64) -> usize {
    (64 - (m - 1).leading_zeros()) as usize
}

/// The hard-core bit γ_j: bit `j` of the `n`-bit representation of `x`,
/// counting position 1 as the most significant; `j = n` is the lsb.
pub fn hardcore_bit(x: u64, j: usize, n: usize) -> Result<u8> {
    if n == 0 || n >= 64 || x >= 1 << n {
        return Err(Error::Parameter(format!("{x} does not fit in {n} bits")));
    }
    if j == 0 || j > n {
        return Err(Error::Parameter(format!(
            "bit index {j} out of range 1..={n}"
        )));
    }
    Ok(((x >> (n - j)) & 1) as u8)
}

/// One application of the Rabin function, x ↦ x² mod M.
pub fn rabin_step(x: u64, modulus: u64) -> Result<u64> {
    if x >= modulus {
        return Err(Error::Parameter(format!(
            "state {x} out of range [0, {modulus})"
        )));
    }
    Ok(((x as u128 * x as u128) % modulus as u128) as u64)
}

/// The squares of the nonzero residues modulo `modulus`.
///
/// This is the set the squaring permutation acts on. Note that it contains
/// squares of *all* nonzero residues, not only of the units: for M = 21 it is
/// {1, 4, 7, 9, 15, 16, 18}, where e.g. 7 = 7² shares a factor with M.
pub fn quadratic_residues(modulus: u64) -> Result<BTreeSet<u64>> {
    if modulus < 2 {
        return Err(Error::Parameter(format!(
            "modulus {modulus} must be at least 2"
        )));
    }
    let mut residues = BTreeSet::new();
    for x in 1..modulus {
        residues.insert(((x as u128 * x as u128) % modulus as u128) as u64);
    }
    Ok(residues)
}

/// Compiles a BBS instance into a [`GeneratorSpec`].
///
/// The permutation squares every quadratic residue and fixes everything else
/// (non-residues below M and the padding above it). The predicate is the
/// hard-core bit on residues and 0 elsewhere, so a bit-0 gate can never mark
/// a non-residue even when its selected bit is 0.
pub fn bbs_spec(params: &BbsParams) -> Result<GeneratorSpec> {
    let m = params.modulus;
    let n = params.n;
    let size = 1usize << n;
    let residues = quadratic_residues(m)?;

    let mut permutation: Vec<usize> = (0..size).collect();
    let mut predicate = vec![0u8; size];
    let mut preimage_of = vec![None::<u64>; size];
    for &x in &residues {
        let image = rabin_step(x, m)?;
        if let Some(prev) = preimage_of[image as usize] {
            return Err(Error::Construction(format!(
                "squaring is not injective on the residues of {m}: \
                 {prev}^2 = {x}^2 = {image} (mod {m}); not a Blum modulus"
            )));
        }
        preimage_of[image as usize] = Some(x);
        permutation[x as usize] = image as usize;
        predicate[x as usize] = hardcore_bit(x, params.j, n)?;
    }

    let domain: Vec<usize> = residues.iter().map(|&x| x as usize).collect();
    GeneratorSpec::new(
        "bbs",
        format!("M={} j={}", m, params.j),
        "delta",
        n,
        permutation,
        predicate,
        domain,
        None,
    )
}
