//! Uniform sampling of two-qubit states under the product measure
//! (Haar projector frame x flat simplex of spectral weights), plus the
//! Bell-diagonal restricted ensemble, on seeded splittable random streams.
//!
//! # Random stream contract
//!
//! The base generator is SplitMix64 (Vigna): a 64-bit Weyl sequence with
//! increment gamma, finalized by the murmur-style `mix64`. For the golden
//! gamma 0x9E3779B97F4A7C15 and seed 0 the first four outputs are
//!
//! ```text
//! 0xE220A8397B1DCDAF 0x6E789E6AA1B965F4 0x06C45D188009454F 0xF88BB8A8724C81EC
//! ```
//!
//! which is the published reference sequence; a unit test pins it so any
//! platform or refactoring drift is caught. Parallel streams follow the
//! SplitMix splitting discipline: stream `i` of master seed `s` derives its
//! initial state and its own odd gamma by hashing `(s, i)` through `mix64`
//! / `mix_gamma`, so distinct indices give structurally distinct generators
//! rather than offsets of one sequence. Identical `(master_seed,
//! stream_index)` always reproduces the identical draw sequence,
//! bit for bit.
//!
//! Uniform doubles are `((x >> 11) + 0.5) * 2^-53`, which lands in the open
//! interval (0, 1) so logarithms in the Box-Muller and exponential maps are
//! always finite.

use num_complex::Complex64;

use crate::linalg::ComplexMatrix;
use crate::states::DensityMatrix;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer (mix13 variant).
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an odd Weyl increment with enough bit transitions, following the
/// SplittableRandom gamma recipe.
#[inline]
fn mix_gamma(z: u64) -> u64 {
    let mut g = mix64(z) | 1;
    if (g ^ (g >> 1)).count_ones() < 24 {
        g ^= 0xAAAA_AAAA_AAAA_AAAA;
    }
    g
}

/// One independent, reproducible random stream identified by
/// `(master_seed, stream_index)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeededStream {
    master_seed: u64,
    stream_index: u64,
    state: u64,
    gamma: u64,
}

impl SeededStream {
    /// Stream `stream_index` of the family spawned by `master_seed`.
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let material =
            mix64(master_seed ^ mix64(stream_index.wrapping_mul(GOLDEN_GAMMA) ^ GOLDEN_GAMMA));
        Self {
            master_seed,
            stream_index,
            state: mix64(material),
            gamma: mix_gamma(material.wrapping_add(GOLDEN_GAMMA)),
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(self.gamma);
        mix64(self.state)
    }

    /// Uniform double in the open interval (0, 1).
    #[inline]
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Pair of independent standard normals (Box-Muller).
    #[inline]
    pub fn next_normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_open01();
        let u2 = self.next_open01();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        (r * theta.cos(), r * theta.sin())
    }
}

/// Raw SplitMix64 with the golden gamma; exists so the reference sequence
/// in the module docs is directly testable.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }
}

/// Which ensemble to draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    /// All states, pure and mixed, under the product measure.
    Full,
    /// Mixtures of the four Bell projectors with flat simplex weights.
    BellDiagonal,
}

impl std::fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EnsembleKind::Full => write!(f, "full"),
            EnsembleKind::BellDiagonal => write!(f, "bell-diagonal"),
        }
    }
}

impl std::str::FromStr for EnsembleKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(EnsembleKind::Full),
            "bell-diagonal" | "bell_diagonal" | "belldiagonal" => Ok(EnsembleKind::BellDiagonal),
            other => Err(crate::Error::InvalidConfig(format!(
                "unknown ensemble {other:?}"
            ))),
        }
    }
}

/// `n` pairwise independent streams for a deterministic parallel run.
pub fn split_streams(master_seed: u64, n_workers: usize) -> Vec<SeededStream> {
    (0..n_workers as u64)
        .map(|i| SeededStream::new(master_seed, i))
        .collect()
}

/// Haar-distributed 4x4 unitary: Ginibre matrix orthonormalized by modified
/// Gram-Schmidt, which realizes the unique QR factor with positive real
/// diagonal (the convention under which Q is Haar).
pub fn sample_haar_unitary(stream: &mut SeededStream) -> ComplexMatrix {
    let mut cols = [[Complex64::ZERO; 4]; 4];
    for col in cols.iter_mut() {
        for entry in col.iter_mut() {
            let (re, im) = stream.next_normal_pair();
            *entry = Complex64::new(re, im);
        }
    }
    for j in 0..4 {
        // two orthogonalization passes keep the Gram defect near machine eps
        for _ in 0..2 {
            for k in 0..j {
                let basis = cols[k];
                let mut proj = Complex64::ZERO;
                for (b, v) in basis.iter().zip(&cols[j]) {
                    proj += b.conj() * v;
                }
                for (v, b) in cols[j].iter_mut().zip(&basis) {
                    *v -= proj * b;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for entry in cols[j].iter_mut() {
            *entry /= norm;
        }
    }
    let mut u = ComplexMatrix::zeros(4);
    for (j, col) in cols.iter().enumerate() {
        for (r, &z) in col.iter().enumerate() {
            u[(r, j)] = z;
        }
    }
    u
}

/// Four weights uniform on the probability simplex: normalized unit-rate
/// exponentials (flat Dirichlet).
pub fn sample_simplex(stream: &mut SeededStream) -> [f64; 4] {
    let mut w = [0.0f64; 4];
    let mut sum = 0.0;
    for v in w.iter_mut() {
        *v = -stream.next_open01().ln();
        sum += *v;
    }
    for v in w.iter_mut() {
        *v /= sum;
    }
    w
}

/// Draw one state from the requested ensemble.
///
/// `Full` pairs a Haar frame with Lebesgue-uniform weights,
/// rho = U diag(w) U^dag; `BellDiagonal` mixes the Bell projectors with the
/// same weight law.
pub fn sample_state(stream: &mut SeededStream, kind: EnsembleKind) -> DensityMatrix {
    match kind {
        EnsembleKind::Full => {
            let u = sample_haar_unitary(stream);
            let w = sample_simplex(stream);
            DensityMatrix::from_spectral_unchecked(&w, &u)
        }
        EnsembleKind::BellDiagonal => {
            let w = sample_simplex(stream);
            DensityMatrix::bell_diagonal(w).expect("simplex weights are valid")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigensystem;

    #[test]
    fn splitmix64_reference_sequence_seed_zero() {
        let mut g = SplitMix64::new(0);
        let got: Vec<u64> = (0..4).map(|_| g.next_u64()).collect();
        assert_eq!(
            got,
            vec![
                0xE220A8397B1DCDAF,
                0x6E789E6AA1B965F4,
                0x06C45D188009454F,
                0xF88BB8A8724C81EC
            ]
        );
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut stream = SeededStream::new(1, 0);
        for _ in 0..200 {
            let u = sample_haar_unitary(&mut stream);
            let gram = u.adjoint().matmul(&u).unwrap();
            let dev = gram
                .sub(&ComplexMatrix::identity(4))
                .unwrap()
                .frobenius_norm();
            assert!(dev < 1e-12, "unitarity defect {dev}");
        }
    }

    #[test]
    fn first_draw_is_reproducible_bit_for_bit() {
        let mut s1 = SeededStream::new(42, 0);
        let mut s2 = SeededStream::new(42, 0);
        let u1 = sample_haar_unitary(&mut s1);
        let u2 = sample_haar_unitary(&mut s2);
        assert_eq!(u1, u2);
        let r1 = sample_state(&mut s1, EnsembleKind::Full);
        let r2 = sample_state(&mut s2, EnsembleKind::Full);
        assert_eq!(r1, r2);
    }

    #[test]
    fn simplex_weights_normalized() {
        let mut stream = SeededStream::new(3, 0);
        for _ in 0..1000 {
            let w = sample_simplex(&mut stream);
            let sum: f64 = w.iter().sum();
            assert!((sum - 1.0).abs() < 1e-15);
            assert!(w.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn simplex_coordinate_mean_is_quarter() {
        let mut stream = SeededStream::new(7, 0);
        let n = 1_000_000usize;
        let mut sums = [0.0f64; 4];
        let mut max_sum = 0.0f64;
        let mut max_sq_sum = 0.0f64;
        for _ in 0..n {
            let w = sample_simplex(&mut stream);
            for (s, x) in sums.iter_mut().zip(&w) {
                *s += x;
            }
            let m = w.iter().cloned().fold(0.0, f64::max);
            max_sum += m;
            max_sq_sum += m * m;
        }
        // per-coordinate mean: 1/4 by exchangeability
        for s in sums {
            let mean = s / n as f64;
            // sd of a flat-Dirichlet coordinate is sqrt(3/80) ~ 0.1936
            let se = 0.1936 / (n as f64).sqrt();
            assert!(
                (mean - 0.25).abs() < 3.0 * se,
                "coordinate mean {mean} too far from 0.25"
            );
        }
        // max-coordinate mean: (1/4) H_4 = 25/48, an order-statistics identity
        let mean = max_sum / n as f64;
        let var = (max_sq_sum / n as f64 - mean * mean).max(0.0);
        let se = (var / n as f64).sqrt();
        assert!(
            (mean - 25.0 / 48.0).abs() < 3.0 * se.max(1e-6),
            "max-coordinate mean {mean} vs 25/48 = {}",
            25.0 / 48.0
        );
    }

    #[test]
    fn sampled_states_are_valid() {
        let mut stream = SeededStream::new(11, 0);
        for kind in [EnsembleKind::Full, EnsembleKind::BellDiagonal] {
            for _ in 0..200 {
                let rho = sample_state(&mut stream, kind);
                assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
                assert!(rho.matrix().hermiticity_defect() < 1e-14);
                let eig = rho.eigensystem().unwrap();
                assert!(*eig.eigenvalues.last().unwrap() >= -1e-10);
            }
        }
    }

    #[test]
    fn full_ensemble_is_almost_surely_rank_four() {
        let mut stream = SeededStream::new(13, 0);
        let n = 10_000;
        let mut full_rank = 0;
        for _ in 0..n {
            let rho = sample_state(&mut stream, EnsembleKind::Full);
            let eig = rho.eigensystem().unwrap();
            if *eig.eigenvalues.last().unwrap() > 0.0 {
                full_rank += 1;
            }
        }
        assert!(full_rank as f64 >= 0.999 * n as f64);
    }

    #[test]
    fn split_single_stream_matches_unsplit() {
        let mut split = split_streams(99, 1);
        let mut direct = SeededStream::new(99, 0);
        let s = &mut split[0];
        for _ in 0..100 {
            assert_eq!(s.next_u64(), direct.next_u64());
        }
    }

    #[test]
    fn split_streams_are_pairwise_distinct() {
        let mut streams = split_streams(5, 4);
        let draws: Vec<Vec<u64>> = streams
            .iter_mut()
            .map(|s| (0..100).map(|_| s.next_u64()).collect())
            .collect();
        for i in 0..4 {
            for j in i + 1..4 {
                assert_ne!(draws[i], draws[j], "streams {i} and {j} collide");
            }
        }
    }

    #[test]
    fn split_rerun_is_identical() {
        let run = |seed: u64| -> Vec<u64> {
            split_streams(seed, 4)
                .iter_mut()
                .flat_map(|s| (0..50).map(|_| s.next_u64()).collect::<Vec<_>>())
                .collect()
        };
        assert_eq!(run(21), run(21));
    }

    /// Two-sample Kolmogorov-Smirnov statistic, tie-robust.
    fn ks_statistic(a: &mut [f64], b: &mut [f64]) -> f64 {
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let (n, m) = (a.len(), b.len());
        let (mut i, mut j) = (0usize, 0usize);
        let mut d = 0.0f64;
        while i < n && j < m {
            let t = a[i].min(b[j]);
            while i < n && a[i] <= t {
                i += 1;
            }
            while j < m && b[j] <= t {
                j += 1;
            }
            d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
        }
        d
    }

    #[test]
    fn haar_statistics_invariant_under_fixed_rotation() {
        // |tr U| has a rotation-invariant law under Haar; compare the sampled
        // distribution against the same draws left-multiplied by a fixed V.
        let mut stream = SeededStream::new(17, 0);
        let mut vstream = SeededStream::new(18, 5);
        let v = sample_haar_unitary(&mut vstream);
        let n = 10_000;
        let mut plain = Vec::with_capacity(n);
        let mut rotated = Vec::with_capacity(n);
        for _ in 0..n {
            let u = sample_haar_unitary(&mut stream);
            plain.push(u.trace().norm());
            rotated.push(v.matmul(&u).unwrap().trace().norm());
        }
        let d = ks_statistic(&mut plain, &mut rotated);
        // critical value ~ 1.95 * sqrt(2/n) at alpha = 0.001
        assert!(d < 0.0276, "KS statistic {d} rejects Haar invariance");
    }

    #[test]
    fn sampled_spectrum_unchanged_by_posthoc_conjugation() {
        let mut stream = SeededStream::new(19, 0);
        let mut vstream = SeededStream::new(20, 1);
        let v = sample_haar_unitary(&mut vstream);
        for _ in 0..100 {
            let rho = sample_state(&mut stream, EnsembleKind::Full);
            let rotated = v
                .matmul(rho.matrix())
                .unwrap()
                .matmul(&v.adjoint())
                .unwrap();
            let w1 = rho.eigensystem().unwrap().eigenvalues;
            let w2 = hermitian_eigensystem(&rotated).unwrap().eigenvalues;
            for (a, b) in w1.iter().zip(&w2) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
