//! Binned statistics over the squared concurrence: streaming per-bin
//! moments with exact merge, dispersion, finite-difference derivatives of
//! the binned means, and the indicator-quality ratio
//! r = |sigma / (d<.>/dC^2)|.
//!
//! Accumulators are single-writer; parallel runs combine private
//! accumulators with [`BinnedAccumulator::merge`], which is associative and
//! commutative in exact arithmetic. Bitwise reproducibility is obtained by
//! always folding the same record partition and merging in stream order.

use crate::{Error, Result};

/// Records with C^2 in (1, 1 + this] are clamped into the last bin.
const C2_SLACK: f64 = 1e-12;
/// Derivatives smaller than this leave the ratio undefined.
const DERIVATIVE_FLOOR: f64 = 1e-12;
/// Bins with fewer records are flagged low-confidence.
pub const LOW_CONFIDENCE_COUNT: u64 = 10;

/// Neumaier compensated sum; `merge` keeps the carried error additive.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.carry += other.carry;
    }

    #[inline]
    fn value(&self) -> f64 {
        self.sum + self.carry
    }

    fn as_dd(&self) -> Dd {
        let (hi, lo) = two_sum(self.sum, self.carry);
        Dd { hi, lo }
    }
}

/// Double-double scratch value for the variance readout. The moment form
/// <x^2> - <x>^2 cancels catastrophically when the true variance is
/// near zero (its f64 floor is ~sqrt(ulp) ~ 1e-8 for O(1) data), so the
/// combination n*S2 - S1^2 is evaluated in ~106-bit arithmetic from the
/// compensated sums, which keeps genuinely constant channels at
/// dispersion ~1e-16.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = two_sum(p, e);
        Dd { hi, lo }
    }

    fn sub(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, -other.hi);
        let e = e + self.lo - other.lo;
        let (hi, lo) = two_sum(s, e);
        Dd { hi, lo }
    }
}

/// Per-C^2-bin streaming moments (count, sum, sum of squares) for a set of
/// tracked channels, over a uniform partition of [0, 1].
///
/// Bins are right-open except the last, which closes at C^2 = 1.
#[derive(Debug, Clone)]
pub struct BinnedAccumulator {
    n_bins: usize,
    n_channels: usize,
    counts: Vec<u64>,
    sums: Vec<CompensatedSum>,
    sum_sqs: Vec<CompensatedSum>,
}

impl BinnedAccumulator {
    pub fn new(n_bins: usize, n_channels: usize) -> Self {
        assert!(n_bins > 0 && n_channels > 0);
        Self {
            n_bins,
            n_channels,
            counts: vec![0; n_bins],
            sums: vec![CompensatedSum::default(); n_bins * n_channels],
            sum_sqs: vec![CompensatedSum::default(); n_bins * n_channels],
        }
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn bin_width(&self) -> f64 {
        1.0 / self.n_bins as f64
    }

    pub fn bin_center(&self, bin: usize) -> f64 {
        (bin as f64 + 0.5) * self.bin_width()
    }

    pub fn count(&self, bin: usize) -> u64 {
        self.counts[bin]
    }

    fn bin_index(&self, c_squared: f64) -> Result<usize> {
        if !c_squared.is_finite() || !(0.0..=1.0 + C2_SLACK).contains(&c_squared) {
            return Err(Error::OutOfRange(format!(
                "squared concurrence {c_squared} outside [0, 1]"
            )));
        }
        let idx = (c_squared * self.n_bins as f64) as usize;
        Ok(idx.min(self.n_bins - 1))
    }

    /// Fold one record (its C^2 plus one value per channel) into the bins.
    pub fn accumulate(&mut self, c_squared: f64, values: &[f64]) -> Result<()> {
        assert_eq!(values.len(), self.n_channels, "channel count mismatch");
        let bin = self.bin_index(c_squared)?;
        self.counts[bin] += 1;
        let base = bin * self.n_channels;
        for (ch, &v) in values.iter().enumerate() {
            self.sums[base + ch].add(v);
            // square error-free: the rounding residue of v*v would otherwise
            // dominate n*S2 - S1^2 for near-constant channels
            let (p, e) = two_prod(v, v);
            self.sum_sqs[base + ch].add(p);
            self.sum_sqs[base + ch].add(e);
        }
        Ok(())
    }

    /// Elementwise combination of two accumulators over the same binning.
    pub fn merge(&mut self, other: &Self) {
        assert_eq!(self.n_bins, other.n_bins);
        assert_eq!(self.n_channels, other.n_channels);
        for (c, oc) in self.counts.iter_mut().zip(&other.counts) {
            *c += oc;
        }
        for (s, os) in self.sums.iter_mut().zip(&other.sums) {
            s.merge(os);
        }
        for (s, os) in self.sum_sqs.iter_mut().zip(&other.sum_sqs) {
            s.merge(os);
        }
    }

    /// Per-bin mean of one channel; `None` for empty bins.
    pub fn mean(&self, bin: usize, channel: usize) -> Option<f64> {
        if self.counts[bin] == 0 {
            return None;
        }
        Some(self.sums[bin * self.n_channels + channel].value() / self.counts[bin] as f64)
    }

    /// Per-bin population dispersion `sigma = sqrt(<x^2> - <x>^2)` of one
    /// channel, with negative roundoff variance clamped to zero.
    pub fn dispersion(&self, bin: usize, channel: usize) -> Option<f64> {
        if self.counts[bin] == 0 {
            return None;
        }
        let n = self.counts[bin] as f64;
        let s1 = self.sums[bin * self.n_channels + channel].as_dd();
        let s2 = self.sum_sqs[bin * self.n_channels + channel].as_dd();
        // (n S2 - S1^2) / n^2 in double-double; see `Dd`
        let var = s2.mul(Dd::from_f64(n)).sub(s1.mul(s1)).hi / (n * n);
        Some(var.max(0.0).sqrt())
    }

    /// Assemble the per-bin profile of one channel: means, dispersions,
    /// finite-difference derivative, and ratio. Empty bins are absent.
    pub fn channel_profile(&self, channel: usize) -> Result<Vec<ProfileRow>> {
        let means: Vec<Option<f64>> = (0..self.n_bins).map(|b| self.mean(b, channel)).collect();
        let derivatives = derivative_profile(&means, self.bin_width())?;
        let mut rows = Vec::new();
        for bin in 0..self.n_bins {
            let Some(mean) = means[bin] else { continue };
            let dispersion = self.dispersion(bin, channel).expect("bin populated");
            let derivative = derivatives[bin];
            let ratio = correlation_ratio(dispersion, derivative);
            rows.push(ProfileRow {
                bin_center: self.bin_center(bin),
                count: self.counts[bin],
                mean,
                dispersion,
                derivative,
                ratio,
                low_confidence: self.counts[bin] < LOW_CONFIDENCE_COUNT,
            });
        }
        Ok(rows)
    }
}

/// One populated bin of a channel profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub bin_center: f64,
    pub count: u64,
    pub mean: f64,
    pub dispersion: f64,
    /// Finite-difference slope of the binned mean; `None` where the
    /// surrounding run of populated bins is too short.
    pub derivative: Option<f64>,
    /// |dispersion / derivative|; `None` where the derivative is absent or
    /// below the floor.
    pub ratio: Option<f64>,
    pub low_confidence: bool,
}

/// Second-order finite differences of binned means on a uniform grid.
///
/// Means are given per bin with `None` marking empty bins. Each maximal run
/// of consecutive populated bins is differentiated independently: central
/// differences inside, one-sided three-point stencils at the run ends (both
/// exact on quadratics). Runs shorter than 3 get no derivative. Errors with
/// `InsufficientBins` when no run reaches length 3.
pub fn derivative_profile(means: &[Option<f64>], bin_width: f64) -> Result<Vec<Option<f64>>> {
    let n = means.len();
    let mut out = vec![None; n];
    let mut best_run = 0usize;
    let mut start = 0usize;
    while start < n {
        if means[start].is_none() {
            start += 1;
            continue;
        }
        let mut end = start;
        while end + 1 < n && means[end + 1].is_some() {
            end += 1;
        }
        let len = end - start + 1;
        best_run = best_run.max(len);
        if len >= 3 {
            let m = |i: usize| means[start + i].expect("populated run");
            let h = bin_width;
            out[start] = Some((-3.0 * m(0) + 4.0 * m(1) - m(2)) / (2.0 * h));
            for i in 1..len - 1 {
                out[start + i] = Some((m(i + 1) - m(i - 1)) / (2.0 * h));
            }
            out[end] = Some((3.0 * m(len - 1) - 4.0 * m(len - 2) + m(len - 3)) / (2.0 * h));
        }
        start = end + 1;
    }
    if out.iter().all(Option::is_none) {
        return Err(Error::InsufficientBins(best_run));
    }
    Ok(out)
}

/// r = |dispersion / derivative|, undefined for vanishing derivatives.
pub fn correlation_ratio(dispersion: f64, derivative: Option<f64>) -> Option<f64> {
    match derivative {
        Some(d) if d.abs() >= DERIVATIVE_FLOOR => Some((dispersion / d).abs()),
        _ => None,
    }
}
