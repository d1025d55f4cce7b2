//! Ordered pass over the prime stream that finds twin pairs and the number of
//! singleton primes separating consecutive twins.
//!
//! The primes 2 and 3 and the overlapping pair (3, 5) are counted but never
//! analyzed; analysis starts with (5, 7), which is twin #1. Twin-count
//! checkpoints use the conventional twin count, which does include (3, 5).

use serde::Serialize;
use thiserror::Error;

use crate::stats::SeparationHistogram;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScanError {
    #[error("prime stream must start at 2, got {0}")]
    NotFromTwo(u64),
    #[error("prime stream out of order: {next} after {previous}")]
    OutOfOrder { previous: u64, next: u64 },
    #[error("checkpoints of one kind must be strictly increasing: {0} repeats or decreases")]
    UnsortedCheckpoints(CheckpointSpec),
    #[error("checkpoint {0} can never be reached")]
    InvalidCheckpoint(CheckpointSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TwinPair {
    pub low: u64,
    pub high: u64,
    /// 1-based; (5, 7) is 1.
    pub index: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeparationEvent {
    pub after_twin_index: u64,
    /// Singleton primes strictly between twin `after_twin_index` and the next.
    pub separation: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScanEvent {
    Separation(SeparationEvent),
    Twin(TwinPair),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ScanState {
    /// Every prime seen so far, 2 included.
    pub pi1_raw: u64,
    /// Conventional twin count, (3, 5) included.
    pub pi2_total: u64,
    /// Twins from (5, 7) onwards.
    pub pi2_analyzed: u64,
    /// Primes at or after 5 seen since the last analyzed twin.
    pub pending_singletons: u64,
    pub last_prime: Option<u64>,
}

/// The (5, 7) convention excludes exactly two primes: 2 and 3.
pub const EXCLUDED_PRIMES: u64 = 2;

/// Result of feeding one prime that completes an analyzed twin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwinStep {
    pub twin: TwinPair,
    pub separation: Option<SeparationEvent>,
}

#[derive(Debug, Clone, Default)]
pub struct TwinScanner {
    state: ScanState,
}

impl TwinScanner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&self) -> &ScanState {
        &self.state
    }

    /// Feeds the next prime.
    #[inline]
    pub fn push(&mut self, p: u64) -> Result<Option<TwinStep>, ScanError> {
        let state = &mut self.state;
        let previous = match state.last_prime {
            None if p != 2 => return Err(ScanError::NotFromTwo(p)),
            None => None,
            Some(prev) if p <= prev => return Err(ScanError::OutOfOrder { previous: prev, next: p }),
            Some(prev) => Some(prev),
        };
        state.pi1_raw += 1;
        state.last_prime = Some(p);

        if p < 5 {
            return Ok(None);
        }
        if previous == Some(3) {
            // p == 5 completes (3, 5); 5 also starts the first analyzed twin.
            state.pi2_total += 1;
            state.pending_singletons = 1;
            return Ok(None);
        }
        if previous != Some(p - 2) {
            state.pending_singletons += 1;
            return Ok(None);
        }

        state.pi2_total += 1;
        state.pi2_analyzed += 1;
        let index = state.pi2_analyzed;
        let separation = (index > 1).then(|| SeparationEvent {
            after_twin_index: index - 1,
            // The low element was counted as pending when it arrived.
            separation: state.pending_singletons - 1,
        });
        state.pending_singletons = 0;
        Ok(Some(TwinStep {
            twin: TwinPair {
                low: p - 2,
                high: p,
                index,
            },
            separation,
        }))
    }
}

/// Iterator of scan events over a prime stream.
pub struct Scan<I> {
    primes: I,
    scanner: TwinScanner,
    queued: Option<ScanEvent>,
    failed: bool,
}

impl<I> Scan<I> {
    pub fn state(&self) -> &ScanState {
        self.scanner.state()
    }
}

impl<I: Iterator<Item = u64>> Iterator for Scan<I> {
    type Item = Result<ScanEvent, ScanError>;

    fn next(&mut self) -> Option<Self::Item> {
        if let Some(event) = self.queued.take() {
            return Some(Ok(event));
        }
        if self.failed {
            return None;
        }
        for p in self.primes.by_ref() {
            match self.scanner.push(p) {
                Ok(None) => continue,
                Ok(Some(step)) => {
                    let twin = ScanEvent::Twin(step.twin);
                    return Some(Ok(match step.separation {
                        Some(sep) => {
                            self.queued = Some(twin);
                            ScanEvent::Separation(sep)
                        }
                        None => twin,
                    }));
                }
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
        None
    }
}

/// Each separation is emitted just before the twin that closes it.
pub fn scan<I: IntoIterator<Item = u64>>(primes: I) -> Scan<I::IntoIter> {
    Scan {
        primes: primes.into_iter(),
        scanner: TwinScanner::new(),
        queued: None,
        failed: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum CheckpointSpec {
    /// Stop right after the conventional twin count reaches this value.
    TwinCount(u64),
    /// Stop at this inclusive upper bound.
    Limit(u64),
}

impl std::fmt::Display for CheckpointSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CheckpointSpec::TwinCount(k) => write!(f, "twin:{k}"),
            CheckpointSpec::Limit(n) => write!(f, "n:{n}"),
        }
    }
}

impl std::str::FromStr for CheckpointSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| format!("expected twin:<k> or n:<N>, got `{s}`"))?;
        let value: u64 = value
            .trim()
            .replace('_', "")
            .parse()
            .map_err(|e| format!("bad checkpoint value in `{s}`: {e}"))?;
        match kind.trim() {
            "twin" => Ok(CheckpointSpec::TwinCount(value)),
            "n" | "N" => Ok(CheckpointSpec::Limit(value)),
            other => Err(format!("unknown checkpoint kind `{other}`")),
        }
    }
}

/// Frozen statistics at one checkpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckpointSnapshot {
    pub spec: CheckpointSpec,
    /// High element of the last counted twin for twin-count checkpoints, the
    /// limit itself otherwise.
    pub n_effective: u64,
    pub pi1_raw: u64,
    pub pi2_total: u64,
    pub pi2_analyzed: u64,
    /// Singletons after the last complete twin; ignored by the statistics.
    pub trailing_singletons: u64,
    pub histogram: SeparationHistogram,
}

impl CheckpointSnapshot {
    /// π₁ with 2 and 3 removed.
    pub fn pi1_adjusted(&self) -> u64 {
        self.pi1_raw.saturating_sub(EXCLUDED_PRIMES)
    }
}

pub fn checkpoint(
    state: &ScanState,
    histogram: &SeparationHistogram,
    spec: CheckpointSpec,
) -> CheckpointSnapshot {
    let n_effective = match spec {
        CheckpointSpec::TwinCount(_) => state.last_prime.unwrap_or(0),
        CheckpointSpec::Limit(n) => n,
    };
    let trailing_singletons = match spec {
        CheckpointSpec::TwinCount(_) => 0,
        CheckpointSpec::Limit(_) => state.pending_singletons,
    };
    CheckpointSnapshot {
        spec,
        n_effective,
        pi1_raw: state.pi1_raw,
        pi2_total: state.pi2_total,
        pi2_analyzed: state.pi2_analyzed,
        trailing_singletons,
        histogram: histogram.clone(),
    }
}

#[derive(Debug, Clone)]
pub struct ScanOutcome {
    /// In the order the checkpoints fired.
    pub snapshots: Vec<CheckpointSnapshot>,
    /// Checkpoints the stream ended before reaching.
    pub incomplete: Vec<CheckpointSpec>,
    pub final_state: ScanState,
    pub histogram: SeparationHistogram,
}

fn sorted_values(
    checkpoints: &[CheckpointSpec],
    pick: impl Fn(CheckpointSpec) -> Option<u64>,
    min: u64,
) -> Result<Vec<(u64, CheckpointSpec)>, ScanError> {
    let values: Vec<_> = checkpoints
        .iter()
        .filter_map(|&c| pick(c).map(|v| (v, c)))
        .collect();
    for pair in values.windows(2) {
        if pair[1].0 <= pair[0].0 {
            return Err(ScanError::UnsortedCheckpoints(pair[1].1));
        }
    }
    if let Some(&(v, c)) = values.first() {
        if v < min {
            return Err(ScanError::InvalidCheckpoint(c));
        }
    }
    Ok(values)
}

/// Runs the scan over `primes`, freezing a snapshot whenever a checkpoint is
/// reached. `stream_limit` is the inclusive bound the stream was generated
/// to, so limit checkpoints at or below it complete when the stream ends.
pub fn scan_with_checkpoints<I>(
    primes: I,
    checkpoints: &[CheckpointSpec],
    stream_limit: u64,
) -> Result<ScanOutcome, ScanError>
where
    I: IntoIterator<Item = u64>,
{
    let twin_targets = sorted_values(
        checkpoints,
        |c| match c {
            CheckpointSpec::TwinCount(k) => Some(k),
            _ => None,
        },
        1,
    )?;
    let limit_targets = sorted_values(
        checkpoints,
        |c| match c {
            CheckpointSpec::Limit(n) => Some(n),
            _ => None,
        },
        2,
    )?;

    let mut scanner = TwinScanner::new();
    let mut histogram = SeparationHistogram::new();
    let mut snapshots = Vec::with_capacity(checkpoints.len());
    let mut next_twin = twin_targets.iter().peekable();
    let mut next_limit = limit_targets.iter().peekable();

    for p in primes {
        while let Some(&&(n, spec)) = next_limit.peek() {
            if p <= n {
                break;
            }
            snapshots.push(checkpoint(scanner.state(), &histogram, spec));
            next_limit.next();
        }
        let before = scanner.state().pi2_total;
        if let Some(step) = scanner.push(p)? {
            if let Some(event) = step.separation {
                histogram.accumulate(&event);
            }
        }
        let pi2 = scanner.state().pi2_total;
        if pi2 != before {
            if let Some(&&(k, spec)) = next_twin.peek() {
                if k == pi2 {
                    snapshots.push(checkpoint(scanner.state(), &histogram, spec));
                    next_twin.next();
                }
            }
        }
    }

    while let Some(&&(n, spec)) = next_limit.peek() {
        if n > stream_limit {
            break;
        }
        snapshots.push(checkpoint(scanner.state(), &histogram, spec));
        next_limit.next();
    }
    let incomplete = next_twin
        .map(|&(_, c)| c)
        .chain(next_limit.map(|&(_, c)| c))
        .collect();

    Ok(ScanOutcome {
        snapshots,
        incomplete,
        final_state: *scanner.state(),
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::base_primes;

    fn primes_to(n: u64) -> Vec<u64> {
        base_primes(n).into_vec()
    }

    fn twins_and_separations(primes: &[u64]) -> (Vec<TwinPair>, Vec<u64>) {
        let mut twins = Vec::new();
        let mut seps = Vec::new();
        for event in scan(primes.iter().copied()) {
            match event.unwrap() {
                ScanEvent::Twin(t) => twins.push(t),
                ScanEvent::Separation(s) => seps.push(s.separation),
            }
        }
        (twins, seps)
    }

    #[test]
    fn seven_twins_below_one_hundred() {
        let (twins, seps) = twins_and_separations(&primes_to(100));
        let lows: Vec<u64> = twins.iter().map(|t| t.low).collect();
        assert_eq!(lows, vec![5, 11, 17, 29, 41, 59, 71]);
        assert!(twins.iter().all(|t| t.high == t.low + 2));
        assert_eq!(
            twins.iter().map(|t| t.index).collect::<Vec<_>>(),
            (1..=7).collect::<Vec<_>>()
        );
        // 47 and 53 sit between (41, 43) and (59, 61).
        assert_eq!(seps, vec![0, 0, 1, 1, 2, 1]);
    }

    #[test]
    fn zero_separation_quadruplet() {
        let (twins, seps) = twins_and_separations(&primes_to(151));
        let n = twins.len();
        assert_eq!((twins[n - 2].low, twins[n - 1].low), (137, 149));
        assert_eq!(*seps.last().unwrap(), 0);
    }

    #[test]
    fn separation_precedes_closing_twin() {
        let events: Vec<ScanEvent> = scan(primes_to(20)).map(Result::unwrap).collect();
        assert_eq!(
            events,
            vec![
                ScanEvent::Twin(TwinPair { low: 5, high: 7, index: 1 }),
                ScanEvent::Separation(SeparationEvent { after_twin_index: 1, separation: 0 }),
                ScanEvent::Twin(TwinPair { low: 11, high: 13, index: 2 }),
                ScanEvent::Separation(SeparationEvent { after_twin_index: 2, separation: 0 }),
                ScanEvent::Twin(TwinPair { low: 17, high: 19, index: 3 }),
            ]
        );
    }

    #[test]
    fn rejects_bad_streams() {
        let mut scanner = TwinScanner::new();
        assert_eq!(scanner.push(3), Err(ScanError::NotFromTwo(3)));
        let mut scanner = TwinScanner::new();
        scanner.push(2).unwrap();
        scanner.push(3).unwrap();
        assert_eq!(
            scanner.push(3),
            Err(ScanError::OutOfOrder { previous: 3, next: 3 })
        );
        let results: Vec<_> = scan([2, 3, 7, 5, 11]).collect();
        assert_eq!(
            results.last().unwrap(),
            &Err(ScanError::OutOfOrder { previous: 7, next: 5 })
        );
    }

    #[test]
    fn state_counts_early_primes() {
        let mut scanner = TwinScanner::new();
        for p in [2, 3, 5] {
            scanner.push(p).unwrap();
        }
        let s = scanner.state();
        assert_eq!((s.pi1_raw, s.pi2_total, s.pi2_analyzed, s.pending_singletons), (3, 1, 0, 1));
        scanner.push(7).unwrap();
        let s = scanner.state();
        assert_eq!((s.pi1_raw, s.pi2_total, s.pi2_analyzed, s.pending_singletons), (4, 2, 1, 0));
    }

    #[test]
    fn limit_checkpoint_at_one_hundred() {
        let out = scan_with_checkpoints(primes_to(200), &[CheckpointSpec::Limit(100)], 200).unwrap();
        let snap = &out.snapshots[0];
        assert_eq!(snap.n_effective, 100);
        assert_eq!(snap.pi1_raw, 25);
        assert_eq!(snap.pi2_analyzed, 7);
        assert_eq!(snap.pi2_total, 8);
        assert_eq!(snap.histogram.total_events(), 6);
        // 79, 83, 89, 97
        assert_eq!(snap.trailing_singletons, 4);
        assert_eq!(snap.pi1_adjusted(), 23);
    }

    #[test]
    fn twin_checkpoint_uses_conventional_count() {
        let out = scan_with_checkpoints(
            primes_to(100),
            &[CheckpointSpec::TwinCount(1), CheckpointSpec::TwinCount(8)],
            100,
        )
        .unwrap();
        assert_eq!(out.snapshots[0].n_effective, 5);
        assert_eq!(out.snapshots[1].n_effective, 73);
        assert_eq!(out.snapshots[1].pi2_analyzed, 7);
        assert!(out.incomplete.is_empty());
    }

    #[test]
    fn unreachable_checkpoints_reported() {
        let out = scan_with_checkpoints(
            primes_to(100),
            &[
                CheckpointSpec::TwinCount(9),
                CheckpointSpec::Limit(90),
                CheckpointSpec::Limit(1000),
            ],
            100,
        )
        .unwrap();
        assert_eq!(out.snapshots.len(), 1);
        assert_eq!(
            out.incomplete,
            vec![CheckpointSpec::TwinCount(9), CheckpointSpec::Limit(1000)]
        );
    }

    #[test]
    fn checkpoint_order_validated() {
        let err = scan_with_checkpoints(
            primes_to(100),
            &[CheckpointSpec::Limit(90), CheckpointSpec::Limit(50)],
            100,
        )
        .unwrap_err();
        assert_eq!(err, ScanError::UnsortedCheckpoints(CheckpointSpec::Limit(50)));
        let err = scan_with_checkpoints(primes_to(100), &[CheckpointSpec::TwinCount(0)], 100)
            .unwrap_err();
        assert_eq!(err, ScanError::InvalidCheckpoint(CheckpointSpec::TwinCount(0)));
    }

    #[test]
    fn checkpoint_spec_parsing() {
        assert_eq!("twin:1000".parse(), Ok(CheckpointSpec::TwinCount(1000)));
        assert_eq!("n:1_000_000".parse(), Ok(CheckpointSpec::Limit(1_000_000)));
        assert!("x:5".parse::<CheckpointSpec>().is_err());
        assert!("twin".parse::<CheckpointSpec>().is_err());
        assert_eq!(CheckpointSpec::Limit(7).to_string(), "n:7");
    }
}
