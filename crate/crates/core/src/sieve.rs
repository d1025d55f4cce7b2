//! Segmented, odd-only sieve of Eratosthenes.
//!
//! Segments are `segment_size` integers wide and start at multiples of
//! `segment_size`, so every segment base is even and bit `i` of a segment
//! stands for the odd candidate `base + 2i + 1`. The prime 2 is emitted
//! specially by the first segment.
//!
//! Segments can be sieved by a worker pool; they are always delivered to the
//! consumer in ascending base order, so the prime stream is identical for any
//! worker count.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use crossbeam_channel::{bounded, Receiver};
use rayon::prelude::*;
use thiserror::Error;

/// Integers per segment unless configured otherwise.
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 20;

/// Smallest accepted segment width.
pub const MIN_SEGMENT_SIZE: u64 = 64;

/// Largest accepted segment width (a 4 GiB bitmap).
pub const MAX_SEGMENT_SIZE: u64 = 1 << 36;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SieveError {
    #[error("sieve limit must be at least 2, got {0}")]
    LimitTooSmall(u64),
    #[error("segment size must be even and at least {MIN_SEGMENT_SIZE}, got {0}")]
    InvalidSegmentSize(u64),
    #[error("segment of {0} integers cannot be allocated")]
    SegmentTooLarge(u64),
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("failed to start sieve worker pool: {0}")]
    WorkerPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    /// Inclusive upper bound.
    pub limit: u64,
    pub segment_size: u64,
    /// Threads sieving segments ahead of the consumer. `1` sieves inline.
    pub workers: usize,
}

impl SieveConfig {
    pub fn new(limit: u64) -> Result<Self, SieveError> {
        let config = SieveConfig {
            limit,
            segment_size: DEFAULT_SEGMENT_SIZE,
            workers: 1,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_segment_size(mut self, segment_size: u64) -> Result<Self, SieveError> {
        self.segment_size = segment_size;
        self.validate()?;
        Ok(self)
    }

    pub fn with_workers(mut self, workers: usize) -> Result<Self, SieveError> {
        self.workers = workers;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), SieveError> {
        if self.limit < 2 {
            return Err(SieveError::LimitTooSmall(self.limit));
        }
        if self.segment_size < MIN_SEGMENT_SIZE || self.segment_size % 2 != 0 {
            return Err(SieveError::InvalidSegmentSize(self.segment_size));
        }
        if self.segment_size > MAX_SEGMENT_SIZE {
            return Err(SieveError::SegmentTooLarge(self.segment_size));
        }
        if self.workers == 0 {
            return Err(SieveError::NoWorkers);
        }
        Ok(())
    }

    /// Number of segments needed to tile `[0, limit]`.
    pub fn segment_count(&self) -> u64 {
        self.limit / self.segment_size + 1
    }
}

/// All primes up to `⌊√limit⌋`, used to cross off composites in every segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasePrimes {
    primes: Vec<u64>,
}

impl BasePrimes {
    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.primes
    }
}

/// Plain (non-segmented) sieve of every prime `<= limit_root`.
pub fn base_primes(limit_root: u64) -> BasePrimes {
    if limit_root < 2 {
        return BasePrimes { primes: Vec::new() };
    }
    let n = limit_root as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    BasePrimes { primes }
}

/// `⌊√n⌋` computed exactly for the whole `u64` range.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// One sieved window of integers `[base, end)`.
#[derive(Debug, Clone)]
pub struct PrimeSegment {
    base: u64,
    end: u64,
    /// Bit `i` set ⇔ `base + 2i + 1` is prime.
    flags: Vec<u64>,
    includes_two: bool,
}

impl PrimeSegment {
    pub fn base(&self) -> u64 {
        self.base
    }

    /// Exclusive end of the covered window.
    pub fn end(&self) -> u64 {
        self.end
    }

    pub fn count(&self) -> u64 {
        let odd: u64 = self.flags.iter().map(|w| u64::from(w.count_ones())).sum();
        odd + u64::from(self.includes_two)
    }

    pub fn primes(&self) -> SegmentPrimes<'_> {
        SegmentPrimes {
            segment: self,
            word_index: 0,
            word: self.flags.first().copied().unwrap_or(0),
            pending_two: self.includes_two,
        }
    }

    fn odd_candidates(&self) -> u64 {
        (self.end - self.base) / 2
    }
}

/// Ascending primes of one segment.
pub struct SegmentPrimes<'a> {
    segment: &'a PrimeSegment,
    word_index: usize,
    word: u64,
    pending_two: bool,
}

impl Iterator for SegmentPrimes<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.pending_two {
            self.pending_two = false;
            return Some(2);
        }
        loop {
            if self.word != 0 {
                let bit = self.word.trailing_zeros() as u64;
                self.word &= self.word - 1;
                let index = (self.word_index as u64) * 64 + bit;
                return Some(self.segment.base + 2 * index + 1);
            }
            self.word_index += 1;
            self.word = *self.segment.flags.get(self.word_index)?;
        }
    }
}

/// Sieves the window starting at `base` (a multiple of the segment size).
fn sieve_segment(
    base: u64,
    segment_size: u64,
    limit: u64,
    base_primes: &[u64],
) -> Result<PrimeSegment, SieveError> {
    let end = base.saturating_add(segment_size).min(limit.saturating_add(1));
    let candidates = (end - base) / 2;
    let words = candidates.div_ceil(64) as usize;
    let mut flags: Vec<u64> = Vec::new();
    flags
        .try_reserve_exact(words)
        .map_err(|_| SieveError::SegmentTooLarge(segment_size))?;
    flags.resize(words, u64::MAX);
    let tail = candidates % 64;
    if tail != 0 {
        if let Some(last) = flags.last_mut() {
            *last = (1u64 << tail) - 1;
        }
    }
    if base == 0 && !flags.is_empty() {
        // 1 is not prime.
        flags[0] &= !1;
    }

    for &p in base_primes.iter().skip_while(|&&p| p == 2) {
        let square = p * p;
        if square >= end {
            break;
        }
        let start = if square >= base {
            square
        } else {
            let m = base.div_ceil(p) * p;
            if m % 2 == 0 {
                m + p
            } else {
                m
            }
        };
        let mut index = (start - base) / 2;
        while index < candidates {
            flags[(index >> 6) as usize] &= !(1u64 << (index & 63));
            index += p;
        }
    }

    Ok(PrimeSegment {
        base,
        end,
        flags,
        includes_two: base == 0 && limit >= 2,
    })
}

/// Work counters shared between a stream and its producers.
#[derive(Debug, Default)]
pub struct SieveCounters {
    segments: AtomicU64,
    candidates: AtomicU64,
}

impl SieveCounters {
    pub fn segments(&self) -> u64 {
        self.segments.load(Ordering::Relaxed)
    }

    /// Odd candidates examined so far.
    pub fn candidates(&self) -> u64 {
        self.candidates.load(Ordering::Relaxed)
    }

    fn record(&self, segment: &PrimeSegment) {
        self.segments.fetch_add(1, Ordering::Relaxed);
        self.candidates
            .fetch_add(segment.odd_candidates(), Ordering::Relaxed);
    }
}

enum Producer {
    Inline {
        config: SieveConfig,
        base_primes: Vec<u64>,
        next_base: Option<u64>,
    },
    Pool {
        rx: Receiver<Result<PrimeSegment, SieveError>>,
        handle: Option<JoinHandle<()>>,
    },
}

/// Sieved segments in ascending order.
pub struct SegmentStream {
    producer: Producer,
    counters: Arc<SieveCounters>,
}

impl SegmentStream {
    pub fn new(config: SieveConfig) -> Result<Self, SieveError> {
        config.validate()?;
        let base_primes = base_primes(isqrt(config.limit)).into_vec();
        let counters = Arc::new(SieveCounters::default());
        let producer = if config.workers == 1 {
            Producer::Inline {
                config,
                base_primes,
                next_base: Some(0),
            }
        } else {
            spawn_pool(config, base_primes, Arc::clone(&counters))?
        };
        Ok(SegmentStream { producer, counters })
    }

    pub fn counters(&self) -> Arc<SieveCounters> {
        Arc::clone(&self.counters)
    }
}

fn spawn_pool(
    config: SieveConfig,
    base_primes: Vec<u64>,
    counters: Arc<SieveCounters>,
) -> Result<Producer, SieveError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| SieveError::WorkerPool(e.to_string()))?;
    let (tx, rx) = bounded(2 * config.workers);
    let handle = std::thread::Builder::new()
        .name("sieve-producer".into())
        .spawn(move || {
            let total = config.segment_count();
            let batch = config.workers as u64;
            let mut first = 0;
            while first < total {
                let last = (first + batch).min(total);
                let segments: Vec<_> = pool.install(|| {
                    (first..last)
                        .into_par_iter()
                        .map(|k| {
                            sieve_segment(
                                k * config.segment_size,
                                config.segment_size,
                                config.limit,
                                &base_primes,
                            )
                        })
                        .collect()
                });
                for segment in segments {
                    if let Ok(s) = &segment {
                        counters.record(s);
                    }
                    let failed = segment.is_err();
                    if tx.send(segment).is_err() || failed {
                        return;
                    }
                }
                first = last;
            }
        })
        .map_err(|e| SieveError::WorkerPool(e.to_string()))?;
    Ok(Producer::Pool {
        rx,
        handle: Some(handle),
    })
}

impl Iterator for SegmentStream {
    type Item = Result<PrimeSegment, SieveError>;

    fn next(&mut self) -> Option<Self::Item> {
        match &mut self.producer {
            Producer::Inline {
                config,
                base_primes,
                next_base,
            } => {
                let base = (*next_base)?;
                if base > config.limit {
                    *next_base = None;
                    return None;
                }
                let segment = sieve_segment(base, config.segment_size, config.limit, base_primes);
                match &segment {
                    Ok(s) => {
                        self.counters.record(s);
                        *next_base = base.checked_add(config.segment_size);
                    }
                    Err(_) => *next_base = None,
                }
                Some(segment)
            }
            Producer::Pool { rx, .. } => rx.recv().ok(),
        }
    }
}

impl Drop for SegmentStream {
    fn drop(&mut self) {
        if let Producer::Pool { rx, handle } = &mut self.producer {
            // Unblock the producer before joining it.
            let (_, empty) = bounded(0);
            drop(std::mem::replace(rx, empty));
            if let Some(handle) = handle.take() {
                let _ = handle.join();
            }
        }
    }
}

/// Every prime `<= limit`, strictly increasing.
///
/// A sieve failure ends the stream early; check [`PrimeStream::error`]
/// afterwards when the configuration could fail at allocation time.
pub struct PrimeStream {
    segments: SegmentStream,
    current: Option<PrimeSegment>,
    offset: usize,
    buffer: Vec<u64>,
    error: Option<SieveError>,
}

impl PrimeStream {
    pub fn counters(&self) -> Arc<SieveCounters> {
        self.segments.counters()
    }

    pub fn error(&self) -> Option<&SieveError> {
        self.error.as_ref()
    }

    fn refill(&mut self) -> bool {
        loop {
            match self.segments.next() {
                Some(Ok(segment)) => {
                    self.buffer.clear();
                    self.buffer.extend(segment.primes());
                    self.offset = 0;
                    self.current = Some(segment);
                    if !self.buffer.is_empty() {
                        return true;
                    }
                }
                Some(Err(e)) => {
                    self.error = Some(e);
                    return false;
                }
                None => return false,
            }
        }
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    #[inline]
    fn next(&mut self) -> Option<u64> {
        if self.offset >= self.buffer.len() && !self.refill() {
            self.current = None;
            return None;
        }
        let p = self.buffer[self.offset];
        self.offset += 1;
        Some(p)
    }
}

pub fn prime_stream(config: SieveConfig) -> Result<PrimeStream, SieveError> {
    Ok(PrimeStream {
        segments: SegmentStream::new(config)?,
        current: None,
        offset: 0,
        buffer: Vec::new(),
        error: None,
    })
}

/// π(limit), counted by popcount without materializing the primes.
pub fn count_primes(limit: u64) -> Result<u64, SieveError> {
    count_primes_with(SieveConfig::new(limit)?)
}

pub fn count_primes_with(config: SieveConfig) -> Result<u64, SieveError> {
    let mut total = 0;
    for segment in SegmentStream::new(config)? {
        total += segment?.count();
    }
    Ok(total)
}
