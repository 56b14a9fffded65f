//! Explicit gate matrices for inspection and unitarity checks.
//!
//! Matrices are stored in transition-table orientation: row `x` holds the
//! image of basis state `x`, so a permutation gate has `M[x][table[x]] = 1`.
//! This is the layout the reference tables use for the compiled gates.
//! Applying such a matrix to a state treats the state as a row vector:
//! `out[y] = Σ_x in[x] · M[x][y]`.

use num_complex::Complex64;

use crate::{Error, Result};

/// Largest supported matrix dimension; unitarity checks are O(d³).
pub const MAX_GATE_MATRIX_DIM: usize = 1 << 10;

/// A dense complex gate matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl GateMatrix {
    /// The matrix of a classical bijection on the domain register:
    /// row `x` has its single 1 in column `table[x]`.
    pub fn from_permutation(table: &[usize]) -> Result<Self> {
        if !crate::is_bijection(table) {
            return Err(Error::Parameter(
                "permutation table is not a bijection".into(),
            ));
        }
        let dim = table.len();
        Self::check_dim(dim)?;
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for (x, &y) in table.iter().enumerate() {
            entries[x * dim + y] = Complex64::ONE;
        }
        Ok(GateMatrix { dim, entries })
    }

    /// The matrix of a predicate-controlled flip over (domain ⊗ one target
    /// qubit), basis |x⟩|c⟩ at index 2x + c: marked x swap |x⟩|0⟩ ↔ |x⟩|1⟩.
    pub fn from_predicate(marked: &[bool]) -> Result<Self> {
        if marked.is_empty() {
            return Err(Error::Parameter("empty predicate table".into()));
        }
        let dim = marked.len() * 2;
        Self::check_dim(dim)?;
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for (x, &flip) in marked.iter().enumerate() {
            let (zero, one) = (2 * x, 2 * x + 1);
            if flip {
                entries[zero * dim + one] = Complex64::ONE;
                entries[one * dim + zero] = Complex64::ONE;
            } else {
                entries[zero * dim + zero] = Complex64::ONE;
                entries[one * dim + one] = Complex64::ONE;
            }
        }
        Ok(GateMatrix { dim, entries })
    }

    fn check_dim(dim: usize) -> Result<()> {
        if dim > MAX_GATE_MATRIX_DIM {
            return Err(Error::Resource(format!(
                "gate matrix dimension {dim} exceeds {MAX_GATE_MATRIX_DIM}"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Row-vector application: `out[y] = Σ_x vec[x] · M[x][y]`.
    pub fn apply_to(&self, vec: &[Complex64]) -> Result<Vec<Complex64>> {
        if vec.len() != self.dim {
            return Err(Error::Parameter(format!(
                "vector length {} does not match dimension {}",
                vec.len(),
                self.dim
            )));
        }
        let mut out = vec![Complex64::ZERO; self.dim];
        for (x, &amp) in vec.iter().enumerate() {
            if amp != Complex64::ZERO {
                for (y, slot) in out.iter_mut().enumerate() {
                    *slot += amp * self.entry(x, y);
                }
            }
        }
        Ok(out)
    }

    /// Max-entry deviation of G·G† from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let mut dot = Complex64::ZERO;
                for k in 0..self.dim {
                    dot += self.entry(r, k) * self.entry(c, k).conj();
                }
                let expected = if r == c {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                worst = worst.max((dot - expected).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tolerance: f64) -> bool {
        self.unitarity_deviation() <= tolerance
    }
}
