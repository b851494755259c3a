//! Renyi and Tsallis q-entropies of two-qubit states, their normalized and
//! conditional variants, and the tagged entropic order q.
//!
//! All q-entropies are in nats. For a spectrum {p_i}:
//!
//! - Tsallis:  S_q = (1 - sum p_i^q) / (q - 1), with S_max = (1 - N^(1-q))/(q-1);
//! - Renyi:    R_q = ln(sum p_i^q) / (1 - q), with R_max = ln N for every q;
//! - q -> 1:   both reduce to the von Neumann entropy -sum p_i ln p_i;
//! - q -> inf: R_inf = -ln p_max, S_inf = 0, and the normalized Tsallis
//!   entropy degenerates to the indicator 1 - [p_max = 1].
//!
//! The q -> 1 and q -> infinity limits are dedicated branches of
//! [`EntropicOrder`] rather than numerical limits; the `Finite` constructor
//! rejects a small band around q = 1 where the direct formulas lose all
//! precision to cancellation.

use crate::states::{DensityMatrix, Subsystem};
use crate::{Error, Result};

/// Width of the excluded band around q = 1; inside it, use `Shannon`.
pub const SHANNON_BAND: f64 = 1e-9;

const LN_4: f64 = 1.3862943611198906;

/// The entropic order q as a tagged value: a finite positive order, the
/// Shannon limit q = 1, or the q = infinity limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropicOrder {
    Finite(f64),
    Shannon,
    MaxLimit,
}

impl EntropicOrder {
    /// Strictly positive finite order with |q - 1| > `SHANNON_BAND`.
    pub fn finite(q: f64) -> Result<Self> {
        if !q.is_finite() || q <= 0.0 {
            return Err(Error::OutOfRange(format!(
                "entropic order must be positive and finite, got {q}"
            )));
        }
        if (q - 1.0).abs() <= SHANNON_BAND {
            return Err(Error::OutOfRange(format!(
                "order {q} is inside the q=1 band; construct Shannon instead"
            )));
        }
        Ok(Self::Finite(q))
    }

    /// Positive order with the q = 1 neighborhood coerced to `Shannon`.
    pub fn new(q: f64) -> Result<Self> {
        if (q - 1.0).abs() <= SHANNON_BAND {
            return Ok(Self::Shannon);
        }
        Self::finite(q)
    }
}

impl std::str::FromStr for EntropicOrder {
    type Err = Error;

    /// Accepts decimal literals, `1` for the Shannon limit, and `inf`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Self::MaxLimit);
        }
        let q: f64 = t
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("cannot parse entropic order {s:?}")))?;
        Self::new(q)
    }
}

impl std::fmt::Display for EntropicOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Finite(q) => write!(f, "{q}"),
            Self::Shannon => write!(f, "1"),
            Self::MaxLimit => write!(f, "inf"),
        }
    }
}

/// Which member of the q-entropy family to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyFamily {
    Tsallis,
    Renyi,
    TsallisNormalized,
}

impl std::fmt::Display for EntropyFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Tsallis => write!(f, "tsallis"),
            Self::Renyi => write!(f, "renyi"),
            Self::TsallisNormalized => write!(f, "tsallis-normalized"),
        }
    }
}

impl std::str::FromStr for EntropyFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tsallis" => Ok(Self::Tsallis),
            "renyi" => Ok(Self::Renyi),
            "tsallis-normalized" | "tsallis_normalized" => Ok(Self::TsallisNormalized),
            other => Err(Error::InvalidConfig(format!(
                "unknown entropy family {other:?}"
            ))),
        }
    }
}

/// Spectrum of the state, clamped to [0, 1] and renormalized when the sum
/// drifts by more than 1e-14; descending order.
pub fn spectrum_of(rho: &DensityMatrix) -> Result<[f64; 4]> {
    let eig = rho.eigensystem()?;
    clamp_spectrum(&eig.eigenvalues)
}

/// Clamp raw eigenvalues of a density matrix into a probability vector.
///
/// Values in [-1e-10, 0) are Jacobi roundoff and go to 0; anything lower is
/// a hard error. Positive noise below 1e-14 is zeroed as well: left in
/// place it would sqrt-amplify under orders q < 1 (a pure state would read
/// S_0.5 ~ 1e-8 instead of 0). The result is renormalized when its sum
/// drifts from 1 by more than 1e-14.
pub fn clamp_spectrum(eigenvalues: &[f64]) -> Result<[f64; 4]> {
    let mut spec = [0.0f64; 4];
    for (s, &w) in spec.iter_mut().zip(eigenvalues) {
        if w < -crate::states::PSD_CLAMP_TOL {
            return Err(Error::NegativeEigenvalue {
                value: w,
                tol: crate::states::PSD_CLAMP_TOL,
            });
        }
        *s = if w < 1e-14 { 0.0 } else { w.min(1.0) };
    }
    let sum: f64 = spec.iter().sum();
    if (sum - 1.0).abs() > 1e-14 {
        for s in spec.iter_mut() {
            *s /= sum;
        }
    }
    Ok(spec)
}

/// p^q as exp(q ln p); underflow flushes to zero, and 0^q = 0.
#[inline]
fn pow_q(p: f64, q: f64) -> f64 {
    if p <= 0.0 { 0.0 } else { (q * p.ln()).exp() }
}

#[inline]
fn sum_pow_q(spectrum: &[f64], q: f64) -> f64 {
    spectrum.iter().map(|&p| pow_q(p, q)).sum()
}

/// Von Neumann / Shannon entropy of a spectrum, in nats.
pub fn von_neumann(spectrum: &[f64]) -> f64 {
    -spectrum
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

fn spectrum_max(spectrum: &[f64]) -> f64 {
    spectrum.iter().cloned().fold(0.0, f64::max)
}

/// Tsallis entropy of a spectrum.
pub fn tsallis_spectrum(spectrum: &[f64], q: EntropicOrder) -> f64 {
    match q {
        EntropicOrder::Finite(q) => (1.0 - sum_pow_q(spectrum, q)) / (q - 1.0),
        EntropicOrder::Shannon => von_neumann(spectrum),
        // S_max -> 0 as q -> infinity, and 0 <= S_q <= S_max
        EntropicOrder::MaxLimit => 0.0,
    }
}

/// Renyi entropy of a spectrum.
///
/// The finite branch factors out the largest probability,
/// R_q = [q ln p_max + ln sum (p_i/p_max)^q] / (1 - q), so large orders
/// neither underflow nor lose the leading term; the direct
/// ln(sum p_i^q) / (1 - q) form is kept in tests as the second route of the
/// consistency check.
pub fn renyi_spectrum(spectrum: &[f64], q: EntropicOrder) -> f64 {
    match q {
        EntropicOrder::Finite(q) => {
            let m = spectrum_max(spectrum);
            if m <= 0.0 {
                return 0.0;
            }
            let ln_m = m.ln();
            let scaled: f64 = spectrum
                .iter()
                .filter(|&&p| p > 0.0)
                .map(|&p| (q * (p.ln() - ln_m)).exp())
                .sum();
            (q * ln_m + scaled.ln()) / (1.0 - q)
        }
        EntropicOrder::Shannon => von_neumann(spectrum),
        EntropicOrder::MaxLimit => -spectrum_max(spectrum).ln(),
    }
}

/// Largest Tsallis value on N outcomes, (1 - N^(1-q)) / (q - 1).
pub fn tsallis_max(n: usize, q: f64) -> f64 {
    let n = n as f64;
    (1.0 - pow_q(n, 1.0 - q)) / (q - 1.0)
}

/// Normalized Tsallis entropy S_q / S_q^max on the two-qubit spectrum
/// (N = 4); lands in [0, 1].
///
/// In the q -> infinity limit the ratio degenerates to 1 - p_max^q, which is
/// 1 for every mixed state and 0 for pure states, so the limit branch is an
/// indicator on p_max.
pub fn tsallis_normalized_spectrum(spectrum: &[f64], q: EntropicOrder) -> f64 {
    match q {
        EntropicOrder::Finite(qv) => tsallis_spectrum(spectrum, q) / tsallis_max(4, qv),
        EntropicOrder::Shannon => von_neumann(spectrum) / LN_4,
        EntropicOrder::MaxLimit => {
            if spectrum_max(spectrum) < 1.0 - 1e-12 {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Tsallis entropy of the state.
pub fn tsallis(rho: &DensityMatrix, q: EntropicOrder) -> Result<f64> {
    Ok(tsallis_spectrum(&spectrum_of(rho)?, q))
}

/// Renyi entropy of the state.
pub fn renyi(rho: &DensityMatrix, q: EntropicOrder) -> Result<f64> {
    Ok(renyi_spectrum(&spectrum_of(rho)?, q))
}

/// Normalized Tsallis entropy of the state.
pub fn tsallis_normalized(rho: &DensityMatrix, q: EntropicOrder) -> Result<f64> {
    Ok(tsallis_normalized_spectrum(&spectrum_of(rho)?, q))
}

/// Conditional q-entropy `S_q[X|Y] = S_q[rho_AB] - S_q[rho_Y]`, where `given`
/// names the conditioning subsystem Y.
///
/// Positive for every separable state (the joint spectrum of a separable
/// state is majorized by its marginals); entangled states may drive it
/// negative. Only the plain Tsallis and Renyi families are defined here.
pub fn conditional_q_entropy(
    rho: &DensityMatrix,
    q: EntropicOrder,
    given: Subsystem,
    family: EntropyFamily,
) -> Result<f64> {
    let joint = spectrum_of(rho)?;
    let marginal = rho.partial_trace(given).spectrum()?;
    match family {
        EntropyFamily::Tsallis => Ok(tsallis_spectrum(&joint, q) - tsallis_spectrum(&marginal, q)),
        EntropyFamily::Renyi => Ok(renyi_spectrum(&joint, q) - renyi_spectrum(&marginal, q)),
        EntropyFamily::TsallisNormalized => Err(Error::UnsupportedFamily(family.to_string())),
    }
}

/// Evaluate one family member on a precomputed two-qubit spectrum.
pub fn evaluate_spectrum(family: EntropyFamily, spectrum: &[f64], q: EntropicOrder) -> f64 {
    match family {
        EntropyFamily::Tsallis => tsallis_spectrum(spectrum, q),
        EntropyFamily::Renyi => renyi_spectrum(spectrum, q),
        EntropyFamily::TsallisNormalized => tsallis_normalized_spectrum(spectrum, q),
    }
}
