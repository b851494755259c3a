//! Dense complex 2x2 / 4x4 matrix kernel with a Hermitian Jacobi eigensolver.
//!
//! Everything the state, entanglement and entropy layers need lives here:
//! arithmetic, tensor products, adjoints, traces, and
//! [`hermitian_eigensystem`]. Matrices are stack-allocated and `Copy`;
//! the hot sampling loop never touches the heap.

use num_complex::Complex64;

use crate::{Error, Result};

/// Convergence target for the off-diagonal Frobenius norm of the Jacobi sweep.
const JACOBI_OFF_TOL: f64 = 1e-14;
/// Hard cap on Jacobi sweeps; hitting it signals a kernel bug, not bad data.
const JACOBI_MAX_SWEEPS: usize = 100;
/// Entrywise tolerance for the Hermitian precondition check.
const HERMITIAN_TOL: f64 = 1e-10;

/// Square complex matrix of dimension 2 or 4, row-major in a fixed-size buffer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: [Complex64; 16],
}

impl ComplexMatrix {
    /// All-zero matrix. `dim` must be 2 or 4.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 2 || dim == 4, "only 2x2 and 4x4 matrices supported");
        Self {
            dim,
            entries: [Complex64::ZERO; 16],
        }
    }

    /// Identity matrix of dimension 2 or 4.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Build from a row-major slice of `dim * dim` entries.
    pub fn from_rows(dim: usize, rows: &[Complex64]) -> Result<Self> {
        if rows.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                rows.len()
            )));
        }
        let mut m = Self::zeros(dim);
        m.entries[..dim * dim].copy_from_slice(rows);
        Ok(m)
    }

    /// Diagonal matrix from real values.
    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Pauli sigma_y in the fixed convention [[0, -i], [i, 0]].
    pub fn sigma_y() -> Self {
        let mut m = Self::zeros(2);
        m[(0, 1)] = Complex64::new(0.0, -1.0);
        m[(1, 0)] = Complex64::new(0.0, 1.0);
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// True when every entry is finite.
    pub fn is_finite(&self) -> bool {
        self.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn iter(&self) -> impl Iterator<Item = &Complex64> {
        self.entries[..self.dim * self.dim].iter()
    }

    fn check_same_dim(&self, other: &Self, op: &str) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "{op}: {}x{} vs {}x{}",
                self.dim, self.dim, other.dim, other.dim
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "add")?;
        let mut out = *self;
        for i in 0..self.dim * self.dim {
            out.entries[i] += other.entries[i];
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "sub")?;
        let mut out = *self;
        for i in 0..self.dim * self.dim {
            out.entries[i] -= other.entries[i];
        }
        Ok(out)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = *self;
        for i in 0..self.dim * self.dim {
            out.entries[i] *= factor;
        }
        out
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "matmul")?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for c in 0..n {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out[(r, c)] = self[(c, r)].conj();
            }
        }
        out
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conjugate(&self) -> Self {
        let mut out = *self;
        for i in 0..self.dim * self.dim {
            out.entries[i] = out.entries[i].conj();
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from the adjoint; 0 for exactly Hermitian input.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                let dev = (self[(r, c)] - self[(c, r)].conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    /// Column `c` as a length-`dim` vector.
    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.dim).map(|r| self[(r, c)]).collect()
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.entries[r * self.dim + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[r * self.dim + c]
    }
}

/// Tensor product of two 2x2 matrices in product-basis order |00>,|01>,|10>,|11>.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim() != 2 || b.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "kron expects 2x2 operands, got {}x{} and {}x{}",
            a.dim(),
            a.dim(),
            b.dim(),
            b.dim()
        )));
    }
    let mut out = ComplexMatrix::zeros(4);
    for ar in 0..2 {
        for ac in 0..2 {
            for br in 0..2 {
                for bc in 0..2 {
                    out[(2 * ar + br, 2 * ac + bc)] = a[(ar, ac)] * b[(br, bc)];
                }
            }
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues sorted
/// descending, orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    /// Unitary whose column `i` is the eigenvector of `eigenvalues[i]`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenSystem {
    /// Rebuild `V diag(w) V^dag`; used by reconstruction checks and sqrt(rho).
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_eigenvalues(|w| w)
    }

    /// `V diag(f(w)) V^dag` for a real function of the eigenvalues.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvectors.dim();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n);
        for (k, &w) in self.eigenvalues.iter().enumerate() {
            let fw = f(w);
            if fw == 0.0 {
                continue;
            }
            for r in 0..n {
                let vr = v[(r, k)] * fw;
                for c in 0..n {
                    out[(r, c)] += vr * v[(c, k)].conj();
                }
            }
        }
        out
    }
}

/// Full eigendecomposition of a Hermitian 2x2 or 4x4 matrix by cyclic
/// complex Jacobi rotations.
///
/// Each rotation combines a phase that makes the pivot entry real with a
/// real Givens rotation that annihilates it; off-diagonal mass decays
/// quadratically, so four-dimensional inputs settle in a handful of sweeps.
/// Output is deterministic for identical input.
pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<EigenSystem> {
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian {
            tol: HERMITIAN_TOL,
            max_dev: defect,
        });
    }
    let n = m.dim();

    // Symmetrize exactly so roundoff asymmetry cannot bias the sweep.
    let mut a = ComplexMatrix::zeros(n);
    for r in 0..n {
        a[(r, r)] = Complex64::new(m[(r, r)].re, 0.0);
        for c in r + 1..n {
            let avg = (m[(r, c)] + m[(c, r)].conj()) * 0.5;
            a[(r, c)] = avg;
            a[(c, r)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    s += a[(r, c)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_norm(&a) < JACOBI_OFF_TOL {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let g = a[(p, q)];
                let r = g.norm();
                if r < 1e-300 {
                    continue;
                }
                let phase = g / r;
                let alpha = a[(p, p)].re;
                let beta = a[(q, q)].re;
                let tau = (beta - alpha) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let pc = phase * c;
                let ps = phase * s;

                // A <- R^dag A R with R = I except R[pp]=pc, R[pq]=ps, R[qp]=-s, R[qq]=c.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = pc * akp - s * akq;
                    a[(k, q)] = ps * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = pc.conj() * apk - s * aqk;
                    a[(q, k)] = ps.conj() * apk + c * aqk;
                }
                a[(p, q)] = Complex64::ZERO;
                a[(q, p)] = Complex64::ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = pc * vkp - s * vkq;
                    v[(k, q)] = ps * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off_norm(&a) >= JACOBI_OFF_TOL {
        return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
    }

    // Sort descending; stable so degenerate clusters keep sweep order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n);
    for (new_c, &old_c) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors[(r, new_c)] = v[(r, old_c)];
        }
    }
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}
