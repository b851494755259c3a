//! Two-qubit density matrices: validated constructors, reductions, and the
//! partial transpose.
//!
//! All matrices are expressed in the product basis |00>, |01>, |10>, |11>.
//! The Bell basis is fixed as Phi+- = (|00> +- |11>)/sqrt(2),
//! Psi+- = (|01> +- |10>)/sqrt(2). Partial transposition acts on subsystem B;
//! its spectrum is the same for either choice.

use num_complex::Complex64;

use crate::linalg::{ComplexMatrix, EigenSystem, hermitian_eigensystem};
use crate::{Error, Result};

/// Entrywise Hermiticity / trace tolerance for density-matrix validation.
pub const STATE_TOL: f64 = 1e-10;
/// Eigenvalues in [-PSD_CLAMP_TOL, 0) are treated as roundoff and clamped to 0;
/// anything lower is a hard error.
pub const PSD_CLAMP_TOL: f64 = 1e-10;

const FRAME_TOL: f64 = 1e-12;
const WEIGHT_SUM_TOL: f64 = 1e-12;
const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Which subsystem of the A (x) B split an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Validated 4x4 density matrix of the two-qubit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

/// Spectral data rho = sum_i w_i |v_i><v_i|: simplex weights plus an
/// orthonormal 4-frame, stored as the columns of a unitary.
#[derive(Debug, Clone)]
pub struct SpectralForm {
    pub weights: [f64; 4],
    pub frame: ComplexMatrix,
}

/// 2x2 reduced state of one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedDensityMatrix {
    matrix: ComplexMatrix,
}

impl SpectralForm {
    pub fn new(weights: [f64; 4], frame: ComplexMatrix) -> Result<Self> {
        validate_weights(&weights)?;
        validate_frame(&frame)?;
        Ok(Self { weights, frame })
    }
}

fn validate_weights(weights: &[f64; 4]) -> Result<()> {
    for &w in weights {
        if !w.is_finite() || !(0.0..=1.0 + WEIGHT_SUM_TOL).contains(&w) {
            return Err(Error::InvalidWeights(format!("weight {w} outside [0, 1]")));
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InvalidWeights(format!(
            "weights sum to {sum}, not 1"
        )));
    }
    Ok(())
}

fn validate_frame(frame: &ComplexMatrix) -> Result<()> {
    if frame.dim() != 4 {
        return Err(Error::DimensionMismatch(
            "spectral frame must be 4x4".into(),
        ));
    }
    let gram = frame.adjoint().matmul(frame)?;
    let dev = gram.sub(&ComplexMatrix::identity(4))?.frobenius_norm();
    if dev > FRAME_TOL {
        return Err(Error::NonOrthonormalFrame(dev));
    }
    Ok(())
}

impl DensityMatrix {
    /// Validate an arbitrary 4x4 matrix as a density matrix: Hermitian and
    /// unit-trace entrywise within `STATE_TOL`, positive semidefinite up to
    /// `-PSD_CLAMP_TOL` on the smallest eigenvalue.
    pub fn try_from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != 4 {
            return Err(Error::DimensionMismatch(
                "density matrix must be 4x4".into(),
            ));
        }
        if !matrix.is_finite() {
            return Err(Error::OutOfRange(
                "density matrix has non-finite entries".into(),
            ));
        }
        let defect = matrix.hermiticity_defect();
        if defect > STATE_TOL {
            return Err(Error::NotHermitian {
                tol: STATE_TOL,
                max_dev: defect,
            });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::OutOfRange(format!("trace {tr} differs from 1")));
        }
        let eig = hermitian_eigensystem(&matrix)?;
        let min = *eig.eigenvalues.last().expect("4 eigenvalues");
        if min < -PSD_CLAMP_TOL {
            return Err(Error::NegativeEigenvalue {
                value: min,
                tol: PSD_CLAMP_TOL,
            });
        }
        Ok(Self { matrix })
    }

    /// rho = sum_i w_i |v_i><v_i| over the columns of the spectral frame.
    pub fn from_spectral(form: &SpectralForm) -> Result<Self> {
        validate_weights(&form.weights)?;
        validate_frame(&form.frame)?;
        Ok(Self::from_spectral_unchecked(&form.weights, &form.frame))
    }

    /// Construction used by the sampler, whose draws satisfy the invariants
    /// by construction; skips the frame Gram check in the hot loop.
    pub(crate) fn from_spectral_unchecked(weights: &[f64; 4], frame: &ComplexMatrix) -> Self {
        let mut m = ComplexMatrix::zeros(4);
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for r in 0..4 {
                let vr = frame[(r, k)] * w;
                for c in 0..4 {
                    m[(r, c)] += vr * frame[(c, k)].conj();
                }
            }
        }
        Self { matrix: m }
    }

    /// Pure state |psi><psi| from a normalized 4-vector.
    pub fn pure(amplitudes: &[Complex64; 4]) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-10 {
            return Err(Error::OutOfRange(format!(
                "pure-state vector has norm^2 {norm_sq}"
            )));
        }
        let mut m = ComplexMatrix::zeros(4);
        for r in 0..4 {
            for c in 0..4 {
                m[(r, c)] = amplitudes[r] * amplitudes[c].conj();
            }
        }
        Ok(Self { matrix: m })
    }

    /// Werner state p |Phi+><Phi+| + (1-p) I/4.
    ///
    /// Spectrum {(1+3p)/4, (1-p)/4 x3}; entangled iff p > 1/3.
    pub fn werner(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange(format!(
                "Werner parameter {p} outside [0, 1]"
            )));
        }
        let bell = Self::pure(&bell_vector(BellIndex::PhiPlus))?;
        let mut m = ComplexMatrix::identity(4).scale(Complex64::new((1.0 - p) / 4.0, 0.0));
        m = m.add(&bell.matrix.scale(Complex64::new(p, 0.0)))?;
        Ok(Self { matrix: m })
    }

    /// Mixture of the four Bell projectors with the given simplex weights,
    /// in the order Phi+, Phi-, Psi+, Psi-.
    pub fn bell_diagonal(weights: [f64; 4]) -> Result<Self> {
        validate_weights(&weights)?;
        let mut m = ComplexMatrix::zeros(4);
        for (k, &w) in weights.iter().enumerate() {
            let v = bell_vector(BellIndex::ALL[k]);
            for r in 0..4 {
                for c in 0..4 {
                    m[(r, c)] += v[r] * v[c].conj() * w;
                }
            }
        }
        Ok(Self { matrix: m })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Eigendecomposition of the state (descending eigenvalues).
    pub fn eigensystem(&self) -> Result<EigenSystem> {
        hermitian_eigensystem(&self.matrix)
    }

    /// Trace out one subsystem, keeping the other.
    pub fn partial_trace(&self, keep: Subsystem) -> ReducedDensityMatrix {
        let mut m = ComplexMatrix::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Complex64::ZERO;
                for k in 0..2 {
                    let (r, c) = match keep {
                        // keep A: sum over the B index
                        Subsystem::A => (2 * i + k, 2 * j + k),
                        // keep B: sum over the A index
                        Subsystem::B => (2 * k + i, 2 * k + j),
                    };
                    acc += self.matrix[(r, c)];
                }
                m[(i, j)] = acc;
            }
        }
        ReducedDensityMatrix { matrix: m }
    }

    /// Transpose the subsystem-B indices. Hermitian and unit-trace, but not
    /// necessarily positive; the sign of its smallest eigenvalue is the
    /// Peres separability criterion.
    pub fn partial_transpose(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4);
        for a in 0..2 {
            for b in 0..2 {
                for ap in 0..2 {
                    for bp in 0..2 {
                        m[(2 * a + b, 2 * ap + bp)] = self.matrix[(2 * a + bp, 2 * ap + b)];
                    }
                }
            }
        }
        m
    }
}

impl ReducedDensityMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Both eigenvalues, descending.
    pub fn spectrum(&self) -> Result<[f64; 2]> {
        let es = hermitian_eigensystem(&self.matrix)?;
        Ok([es.eigenvalues[0], es.eigenvalues[1]])
    }

    /// Tr(rho^2) of the reduced state.
    pub fn purity(&self) -> f64 {
        let m = &self.matrix;
        (0..2)
            .flat_map(|r| (0..2).map(move |c| (r, c)))
            .map(|(r, c)| (m[(r, c)] * m[(c, r)]).re)
            .sum()
    }
}

/// The four Bell states in a fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellIndex {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellIndex {
    pub const ALL: [BellIndex; 4] = [
        BellIndex::PhiPlus,
        BellIndex::PhiMinus,
        BellIndex::PsiPlus,
        BellIndex::PsiMinus,
    ];
}

/// Amplitudes of a Bell vector in the product basis.
pub fn bell_vector(which: BellIndex) -> [Complex64; 4] {
    let h = Complex64::new(SQRT_HALF, 0.0);
    let mh = Complex64::new(-SQRT_HALF, 0.0);
    let z = Complex64::ZERO;
    match which {
        BellIndex::PhiPlus => [h, z, z, h],
        BellIndex::PhiMinus => [h, z, z, mh],
        BellIndex::PsiPlus => [z, h, h, z],
        BellIndex::PsiMinus => [z, h, mh, z],
    }
}
