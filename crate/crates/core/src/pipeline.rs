//! Sampling pipeline: draws states, measures concurrence, entanglement of
//! formation and the requested entropy channels, and reduces the results
//! either to raw per-state records or to binned accumulators.
//!
//! # Determinism
//!
//! Work is partitioned into fixed-size batches; batch `b` always consumes
//! stream `b` of the master seed and results are merged in batch order.
//! The partition depends only on the sample count, never on the worker
//! count, so a run with 8 threads is bit-for-bit identical to a run with 1.
//! Worker threads pull batch indices from a shared counter; their outputs
//! land in per-batch slots before the ordered merge.

use std::sync::Mutex;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::entanglement::{concurrence_from_eigensystem, eof_from_concurrence};
use crate::entropy::{EntropicOrder, EntropyFamily, clamp_spectrum, evaluate_spectrum};
use crate::sampler::{EnsembleKind, SeededStream, split_streams};
use crate::stats::BinnedAccumulator;
use crate::{Error, Result};

/// Samples per work batch; fixed so the stream layout is worker-independent.
pub const BATCH_SIZE: usize = 4096;

pub const DEFAULT_SAMPLES: usize = 200_000;
pub const DEFAULT_BINS: usize = 50;
pub const DEFAULT_SEED: u64 = 0;

/// One tracked entropy column: a family at an entropic order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    pub family: EntropyFamily,
    pub q: EntropicOrder,
}

impl Channel {
    /// Column label, e.g. `renyi_q0.5` or `tsallis_qinf`.
    pub fn label(&self) -> String {
        let family = match self.family {
            EntropyFamily::Tsallis => "tsallis",
            EntropyFamily::Renyi => "renyi",
            EntropyFamily::TsallisNormalized => "tsallis_normalized",
        };
        format!("{family}_q{}", self.q)
    }
}

/// Settings of one Monte Carlo run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub samples: usize,
    pub seed: u64,
    pub bins: usize,
    pub workers: usize,
    pub q_list: Vec<EntropicOrder>,
    pub family: EntropyFamily,
    pub ensemble: EnsembleKind,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            bins: DEFAULT_BINS,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            q_list: default_q_list(),
            family: EntropyFamily::Renyi,
            ensemble: EnsembleKind::Full,
        }
    }
}

/// The survey's standard order set: q = 0.5, 1, 2, 10, infinity.
pub fn default_q_list() -> Vec<EntropicOrder> {
    vec![
        EntropicOrder::Finite(0.5),
        EntropicOrder::Shannon,
        EntropicOrder::Finite(2.0),
        EntropicOrder::Finite(10.0),
        EntropicOrder::MaxLimit,
    ]
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 || self.bins == 0 || self.workers == 0 {
            return Err(Error::InvalidConfig(
                "samples, bins and workers must be positive".into(),
            ));
        }
        if self.samples < self.bins {
            return Err(Error::InvalidConfig(format!(
                "refusing degenerate run: {} samples over {} bins",
                self.samples, self.bins
            )));
        }
        if self.q_list.is_empty() {
            return Err(Error::InvalidConfig("q list is empty".into()));
        }
        for q in &self.q_list {
            if let EntropicOrder::Finite(v) = q
                && (*v <= 0.0 || !v.is_finite() || (*v - 1.0).abs() <= crate::entropy::SHANNON_BAND)
            {
                return Err(Error::InvalidConfig(format!("invalid entropic order {v}")));
            }
        }
        Ok(())
    }

    /// The tracked (family, q) columns, in q-list order.
    pub fn channels(&self) -> Vec<Channel> {
        self.q_list
            .iter()
            .map(|&q| Channel {
                family: self.family,
                q,
            })
            .collect()
    }

    fn n_batches(&self) -> usize {
        self.samples.div_ceil(BATCH_SIZE)
    }

    fn batch_len(&self, batch: usize) -> usize {
        let start = batch * BATCH_SIZE;
        BATCH_SIZE.min(self.samples - start)
    }
}

/// One measured state: squared concurrence, entanglement of formation in
/// bits, and one value per tracked channel.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub c_squared: f64,
    pub eof_bits: f64,
    pub values: Vec<f64>,
}

/// Measure the next state of `stream` under the given channels.
pub fn measure_next(
    stream: &mut SeededStream,
    ensemble: EnsembleKind,
    channels: &[Channel],
) -> Result<SampleRecord> {
    let rho = crate::sampler::sample_state(stream, ensemble);
    let eig = rho.eigensystem()?;
    let spectrum = clamp_spectrum(&eig.eigenvalues)?;
    let c = concurrence_from_eigensystem(&rho, &eig)?.concurrence;
    let values = channels
        .iter()
        .map(|ch| evaluate_spectrum(ch.family, &spectrum, ch.q))
        .collect();
    Ok(SampleRecord {
        c_squared: c * c,
        eof_bits: eof_from_concurrence(c),
        values,
    })
}

/// Run `f` over batch indices `0..n_batches` on `workers` threads, returning
/// results in batch order regardless of scheduling.
fn map_batches<T, F>(n_batches: usize, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let workers = workers.max(1).min(n_batches.max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<T>>>> = Mutex::new((0..n_batches).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| {
                loop {
                    let batch = next.fetch_add(1, Ordering::Relaxed);
                    if batch >= n_batches {
                        break;
                    }
                    let out = f(batch);
                    slots.lock().expect("worker panicked")[batch] = Some(out);
                }
            });
        }
    });
    let collected = slots.into_inner().expect("worker panicked");
    collected
        .into_iter()
        .map(|slot| slot.expect("every batch visited"))
        .collect()
}

/// Every per-state record of the run, in deterministic batch order.
pub fn generate_records(config: &RunConfig) -> Result<Vec<SampleRecord>> {
    config.validate()?;
    let channels = config.channels();
    let streams = split_streams(config.seed, config.n_batches());
    let batches = map_batches(config.n_batches(), config.workers, |batch| {
        let mut stream = streams[batch].clone();
        (0..config.batch_len(batch))
            .map(|_| measure_next(&mut stream, config.ensemble, &channels))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(batches.into_iter().flatten().collect())
}

/// Binned per-channel moments over C^2 for the whole run, reduced in batch
/// order.
pub fn accumulate_profiles(config: &RunConfig) -> Result<BinnedAccumulator> {
    config.validate()?;
    let channels = config.channels();
    let streams = split_streams(config.seed, config.n_batches());
    let batches = map_batches(config.n_batches(), config.workers, |batch| {
        let mut stream = streams[batch].clone();
        let mut acc = BinnedAccumulator::new(config.bins, channels.len());
        for _ in 0..config.batch_len(batch) {
            let rec = measure_next(&mut stream, config.ensemble, &channels)?;
            acc.accumulate(rec.c_squared, &rec.values)?;
        }
        Ok(acc)
    })?;
    let mut out = BinnedAccumulator::new(config.bins, channels.len());
    for acc in &batches {
        out.merge(acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> RunConfig {
        RunConfig {
            samples: 3000,
            seed: 7,
            bins: 20,
            workers: 2,
            q_list: vec![EntropicOrder::Finite(0.5), EntropicOrder::Finite(2.0)],
            family: EntropyFamily::Renyi,
            ensemble: EnsembleKind::Full,
        }
    }

    #[test]
    fn validation_rejects_degenerate_runs() {
        let mut cfg = small_config();
        cfg.samples = 10;
        cfg.bins = 50;
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        let mut cfg = small_config();
        cfg.q_list.clear();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn channel_labels() {
        let cfg = small_config();
        let labels: Vec<String> = cfg.channels().iter().map(Channel::label).collect();
        assert_eq!(labels, vec!["renyi_q0.5", "renyi_q2"]);
        let ch = Channel {
            family: EntropyFamily::TsallisNormalized,
            q: EntropicOrder::MaxLimit,
        };
        assert_eq!(ch.label(), "tsallis_normalized_qinf");
    }

    #[test]
    fn records_have_expected_shape_and_ranges() {
        let cfg = small_config();
        let records = generate_records(&cfg).unwrap();
        assert_eq!(records.len(), cfg.samples);
        for rec in &records {
            assert!((0.0..=1.0).contains(&rec.c_squared));
            assert!((0.0..=1.0).contains(&rec.eof_bits));
            assert_eq!(rec.values.len(), 2);
            // band order: R_0.5 >= R_2 pointwise
            assert!(rec.values[0] >= rec.values[1] - 1e-10);
        }
    }

    #[test]
    fn records_identical_across_worker_counts() {
        let mut cfg = small_config();
        cfg.workers = 1;
        let one = generate_records(&cfg).unwrap();
        cfg.workers = 8;
        let eight = generate_records(&cfg).unwrap();
        assert_eq!(one, eight);
    }

    #[test]
    fn profiles_identical_across_worker_counts_and_reruns() {
        let mut cfg = small_config();
        cfg.workers = 1;
        let a = accumulate_profiles(&cfg).unwrap();
        cfg.workers = 8;
        let b = accumulate_profiles(&cfg).unwrap();
        let c = accumulate_profiles(&cfg).unwrap();
        for bin in 0..cfg.bins {
            assert_eq!(a.count(bin), b.count(bin));
            for ch in 0..2 {
                assert_eq!(a.mean(bin, ch), b.mean(bin, ch));
                assert_eq!(a.dispersion(bin, ch), b.dispersion(bin, ch));
                assert_eq!(b.mean(bin, ch), c.mean(bin, ch));
            }
        }
    }

    #[test]
    fn profile_accumulator_counts_all_samples() {
        let cfg = small_config();
        let acc = accumulate_profiles(&cfg).unwrap();
        let total: u64 = (0..cfg.bins).map(|b| acc.count(b)).sum();
        assert_eq!(total, cfg.samples as u64);
    }

    /// Soft throughput floor; run explicitly with
    /// `cargo test -p qent-core --release -- --ignored throughput`.
    #[test]
    #[ignore = "performance smoke check, timing-sensitive"]
    fn throughput_meets_target() {
        let cfg = RunConfig {
            samples: 100_000,
            seed: 1,
            bins: 50,
            workers: 1,
            q_list: default_q_list(),
            family: EntropyFamily::Renyi,
            ensemble: EnsembleKind::Full,
        };
        let start = std::time::Instant::now();
        let acc = accumulate_profiles(&cfg).unwrap();
        let rate = cfg.samples as f64 / start.elapsed().as_secs_f64();
        assert!(acc.count(0) > 0);
        println!("single-core throughput: {rate:.0} samples/s");
        assert!(
            rate >= 50_000.0,
            "throughput {rate:.0} below 50k samples/s/core"
        );
    }
}
