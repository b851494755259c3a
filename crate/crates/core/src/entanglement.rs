//! Wootters concurrence, entanglement of formation, and the Peres
//! positive-partial-transpose check.
//!
//! The concurrence of a two-qubit state is
//! C = max(0, r1 - r2 - r3 - r4), where the r_i are the square roots, in
//! decreasing order, of the eigenvalues of rho * rho_tilde and
//! rho_tilde = (sigma_y (x) sigma_y) rho^* (sigma_y (x) sigma_y), everything
//! taken in the product basis. rho * rho_tilde is not Hermitian, so the
//! spectrum is computed from the Hermitian surrogate
//! sqrt(rho) rho_tilde sqrt(rho), which is similar to it; this keeps the
//! whole pipeline on the validated Hermitian Jacobi kernel.
//!
//! Entanglement of formation is reported in bits,
//! E = h((1 + sqrt(1 - C^2)) / 2) with the binary entropy h; the q-entropy
//! family elsewhere in the crate uses nats.

use crate::linalg::{ComplexMatrix, hermitian_eigensystem, kron};
use crate::states::DensityMatrix;
use crate::{Error, Result};

/// Surrogate eigenvalues below this are a kernel failure, not roundoff.
const SURROGATE_TOL: f64 = 1e-8;
/// Surrogate eigenvalues inside [-ZERO, ZERO] are treated as exact zeros.
/// Without this, eigenvalue noise ~1e-16 on rank-deficient rho*rho_tilde
/// (pure and Bell-diagonal states) turns into sqrt-amplified root noise
/// ~1e-8, spoiling closed-form concurrence checks at the 1e-10 level.
const SURROGATE_ZERO_TOL: f64 = 1e-13;

/// Wootters roots and the concurrence they produce.
#[derive(Debug, Clone, Copy)]
pub struct ConcurrenceDecomposition {
    /// Square roots of the eigenvalues of rho * rho_tilde, descending.
    pub roots: [f64; 4],
    /// `max(0, roots[0] - roots[1] - roots[2] - roots[3])`, clamped to `[0, 1]`.
    pub concurrence: f64,
}

fn spin_flip_frame() -> ComplexMatrix {
    let sy = ComplexMatrix::sigma_y();
    kron(&sy, &sy).expect("sigma_y is 2x2")
}

/// rho_tilde = (sigma_y (x) sigma_y) rho^* (sigma_y (x) sigma_y).
pub fn spin_flipped(rho: &DensityMatrix) -> ComplexMatrix {
    let syy = spin_flip_frame();
    let conj = rho.matrix().conjugate();
    syy.matmul(&conj)
        .and_then(|m| m.matmul(&syy))
        .expect("fixed 4x4 dimensions")
}

/// Concurrence of a two-qubit state via the Hermitian surrogate spectrum.
pub fn concurrence(rho: &DensityMatrix) -> Result<ConcurrenceDecomposition> {
    let eig = rho.eigensystem()?;
    concurrence_from_eigensystem(rho, &eig)
}

/// Same as [`concurrence`], reusing an already computed eigendecomposition
/// of `rho` (the sampling pipeline has one at hand for the entropies).
pub fn concurrence_from_eigensystem(
    rho: &DensityMatrix,
    eig: &crate::linalg::EigenSystem,
) -> Result<ConcurrenceDecomposition> {
    let min = *eig.eigenvalues.last().expect("4 eigenvalues");
    if min < -crate::states::PSD_CLAMP_TOL {
        return Err(Error::NegativeEigenvalue {
            value: min,
            tol: crate::states::PSD_CLAMP_TOL,
        });
    }
    // sqrt(rho) with the spectrum clamped at zero
    let sqrt_rho = eig.map_eigenvalues(|w| w.max(0.0).sqrt());
    let tilde = spin_flipped(rho);
    let surrogate = sqrt_rho
        .matmul(&tilde)
        .and_then(|m| m.matmul(&sqrt_rho))
        .expect("fixed 4x4 dimensions");
    let seig = hermitian_eigensystem(&surrogate)?;

    let mut roots = [0.0f64; 4];
    for (slot, &w) in roots.iter_mut().zip(&seig.eigenvalues) {
        if w < -SURROGATE_TOL {
            return Err(Error::NegativeEigenvalue {
                value: w,
                tol: SURROGATE_TOL,
            });
        }
        *slot = if w <= SURROGATE_ZERO_TOL {
            0.0
        } else {
            w.sqrt()
        };
    }
    // eigenvalues arrive descending, so the roots already are
    let c = (roots[0] - roots[1] - roots[2] - roots[3]).clamp(0.0, 1.0);
    Ok(ConcurrenceDecomposition {
        roots,
        concurrence: c,
    })
}

/// Binary entropy in bits with the 0 log 0 = 0 convention.
pub fn binary_entropy_bits(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    let mut h = 0.0;
    if x > 0.0 {
        h -= x * x.log2();
    }
    if x < 1.0 {
        h -= (1.0 - x) * (1.0 - x).log2();
    }
    h
}

/// Entanglement of formation in bits for a given concurrence.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy_bits((1.0 + (1.0 - c * c).sqrt()) / 2.0)
}

/// Entanglement of formation of the state, in bits.
pub fn entanglement_of_formation(rho: &DensityMatrix) -> Result<f64> {
    Ok(eof_from_concurrence(concurrence(rho)?.concurrence))
}

/// Peres criterion: is the partial transpose positive semidefinite?
///
/// Returns the verdict together with the smallest partial-transpose
/// eigenvalue for diagnostics. For two qubits PPT is equivalent to
/// separability, so this doubles as an independent entanglement oracle.
pub fn is_ppt(rho: &DensityMatrix) -> Result<(bool, f64)> {
    let pt = rho.partial_transpose();
    let eig = hermitian_eigensystem(&pt)?;
    let min = *eig.eigenvalues.last().expect("4 eigenvalues");
    Ok((min >= -1e-10, min))
}
