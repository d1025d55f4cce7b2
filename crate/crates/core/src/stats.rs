//! Separation histograms and the normalized frequency tables fed to the fit.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::scan::SeparationEvent;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("need at least 2 separation events to normalize, have {0}")]
    InsufficientData(u64),
    #[error("frequency weight for separation {separation} must be finite and positive, got {weight}")]
    InvalidWeight { separation: u64, weight: f64 },
    #[error("separation {0} appears more than once")]
    DuplicateSeparation(u64),
}

/// Occurrence counts of each observed separation. Zero-count bins are never
/// stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SeparationHistogram {
    counts: BTreeMap<u64, u64>,
    total_events: u64,
}

impl SeparationHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn accumulate(&mut self, event: &SeparationEvent) {
        self.record(event.separation);
    }

    pub fn record(&mut self, separation: u64) {
        *self.counts.entry(separation).or_insert(0) += 1;
        self.total_events += 1;
    }

    /// Adds every bin of `other` into `self`.
    pub fn merge(&mut self, other: &SeparationHistogram) {
        for (&s, &c) in &other.counts {
            *self.counts.entry(s).or_insert(0) += c;
        }
        self.total_events += other.total_events;
    }

    pub fn count(&self, separation: u64) -> u64 {
        self.counts.get(&separation).copied().unwrap_or(0)
    }

    pub fn total_events(&self) -> u64 {
        self.total_events
    }

    /// Sum of all recorded separations, i.e. singletons lying between
    /// analyzed twins.
    pub fn separation_sum(&self) -> u64 {
        self.counts.iter().map(|(&s, &c)| s * c).sum()
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `(separation, count)` in ascending separation order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&s, &c)| (s, c))
    }

    pub fn to_frequency_table(&self) -> Result<FrequencyTable, StatsError> {
        if self.total_events < 2 {
            return Err(StatsError::InsufficientData(self.total_events));
        }
        let total = self.total_events as f64;
        let rows = self
            .iter()
            .map(|(separation, count)| {
                let rel_freq = count as f64 / total;
                FrequencyRow {
                    separation,
                    count,
                    rel_freq,
                    ln_rel_freq: rel_freq.ln(),
                }
            })
            .collect();
        Ok(FrequencyTable {
            rows,
            total_events: self.total_events,
        })
    }
}

impl FromIterator<u64> for SeparationHistogram {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        let mut hist = SeparationHistogram::new();
        for s in iter {
            hist.record(s);
        }
        hist
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyRow {
    pub separation: u64,
    pub count: u64,
    pub rel_freq: f64,
    pub ln_rel_freq: f64,
}

/// Observed separations with their relative frequencies, sorted by
/// separation. Relative frequencies sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    rows: Vec<FrequencyRow>,
    total_events: u64,
}

impl FrequencyTable {
    /// Builds a table from exact (possibly unnormalized) densities rather than
    /// counted events. Every row gets a count of 1, so count weighting and
    /// uniform weighting coincide on such tables.
    pub fn from_density<I>(density: I) -> Result<Self, StatsError>
    where
        I: IntoIterator<Item = (u64, f64)>,
    {
        let mut bins = BTreeMap::new();
        for (separation, weight) in density {
            if !(weight.is_finite() && weight > 0.0) {
                return Err(StatsError::InvalidWeight { separation, weight });
            }
            if bins.insert(separation, weight).is_some() {
                return Err(StatsError::DuplicateSeparation(separation));
            }
        }
        if bins.len() < 2 {
            return Err(StatsError::InsufficientData(bins.len() as u64));
        }
        let total: f64 = bins.values().sum();
        let rows = bins
            .into_iter()
            .map(|(separation, weight)| {
                let rel_freq = weight / total;
                FrequencyRow {
                    separation,
                    count: 1,
                    rel_freq,
                    ln_rel_freq: rel_freq.ln(),
                }
            })
            .collect::<Vec<_>>();
        let total_events = rows.len() as u64;
        Ok(FrequencyTable { rows, total_events })
    }

    pub fn rows(&self) -> &[FrequencyRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn total_events(&self) -> u64 {
        self.total_events
    }

    /// Table with the largest-separation row removed and the rest
    /// renormalized. `None` when fewer than two rows would remain.
    pub fn without_last_bin(&self) -> Option<FrequencyTable> {
        if self.rows.len() < 3 {
            return None;
        }
        let kept = &self.rows[..self.rows.len() - 1];
        let total: u64 = kept.iter().map(|r| r.count).sum();
        let rows = kept
            .iter()
            .map(|r| {
                let rel_freq = r.count as f64 / total as f64;
                FrequencyRow {
                    rel_freq,
                    ln_rel_freq: rel_freq.ln(),
                    ..*r
                }
            })
            .collect();
        Some(FrequencyTable {
            rows,
            total_events: total,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_insertion() {
        let mut hist = SeparationHistogram::new();
        hist.accumulate(&SeparationEvent {
            after_twin_index: 1,
            separation: 0,
        });
        assert_eq!(hist.count(0), 1);
        assert_eq!(hist.total_events(), 1);
        assert_eq!(hist.bins(), 1);
    }

    #[test]
    fn below_one_hundred() {
        let hist: SeparationHistogram = [0, 0, 1, 1, 2, 1].into_iter().collect();
        assert_eq!(hist.iter().collect::<Vec<_>>(), vec![(0, 2), (1, 3), (2, 1)]);
        assert_eq!(hist.total_events(), 6);
        let table = hist.to_frequency_table().unwrap();
        let freqs: Vec<f64> = table.rows().iter().map(|r| r.rel_freq).collect();
        assert_eq!(freqs, vec![1.0 / 3.0, 0.5, 1.0 / 6.0]);
        for row in table.rows() {
            assert_eq!(row.ln_rel_freq, row.rel_freq.ln());
        }
    }

    #[test]
    fn degenerate_tables() {
        let one: SeparationHistogram = [0].into_iter().collect();
        assert_eq!(
            one.to_frequency_table(),
            Err(StatsError::InsufficientData(1))
        );
        let single_bin: SeparationHistogram = std::iter::repeat(5).take(10).collect();
        let table = single_bin.to_frequency_table().unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(table.rows()[0].rel_freq, 1.0);
        assert_eq!(table.rows()[0].ln_rel_freq, 0.0);
    }

    #[test]
    fn merge_is_keywise_sum() {
        let mut a: SeparationHistogram = [0, 1, 1].into_iter().collect();
        let b: SeparationHistogram = [3, 4].into_iter().collect();
        a.merge(&b);
        assert_eq!(
            a.iter().collect::<Vec<_>>(),
            vec![(0, 1), (1, 2), (3, 1), (4, 1)]
        );
        assert_eq!(a.total_events(), 5);
    }

    #[test]
    fn density_rejects_bad_weights() {
        assert!(matches!(
            FrequencyTable::from_density([(0, 1.0), (1, 0.0)]),
            Err(StatsError::InvalidWeight { separation: 1, .. })
        ));
        assert_eq!(
            FrequencyTable::from_density([(0, 1.0), (0, 2.0)]),
            Err(StatsError::DuplicateSeparation(0))
        );
        assert_eq!(
            FrequencyTable::from_density([(0, 1.0)]),
            Err(StatsError::InsufficientData(1))
        );
    }

    #[test]
    fn dropping_last_bin_renormalizes() {
        let hist: SeparationHistogram = [0, 0, 1, 1, 2, 1, 9].into_iter().collect();
        let table = hist.to_frequency_table().unwrap().without_last_bin().unwrap();
        assert_eq!(table.total_events(), 6);
        assert_eq!(table.rows().last().unwrap().separation, 2);
        let sum: f64 = table.rows().iter().map(|r| r.rel_freq).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn normalized(seps in prop::collection::vec(0u64..400, 2..2000)) {
            let hist: SeparationHistogram = seps.iter().copied().collect();
            let table = hist.to_frequency_table().unwrap();
            let sum: f64 = table.rows().iter().map(|r| r.rel_freq).sum();
            prop_assert!((sum - 1.0).abs() <= 1e-12);
            prop_assert_eq!(table.total_events(), seps.len() as u64);
            prop_assert!(table.rows().windows(2).all(|w| w[0].separation < w[1].separation));
            prop_assert!(table.rows().iter().all(|r| r.count >= 1 && r.ln_rel_freq.is_finite()));
        }

        #[test]
        fn merge_commutes_and_associates(
            a in prop::collection::vec(0u64..50, 0..100),
            b in prop::collection::vec(0u64..50, 0..100),
            c in prop::collection::vec(0u64..50, 0..100),
        ) {
            let [ha, hb, hc]: [SeparationHistogram; 3] =
                [&a, &b, &c].map(|v| v.iter().copied().collect());
            let mut ab = ha.clone();
            ab.merge(&hb);
            let mut ba = hb.clone();
            ba.merge(&ha);
            prop_assert_eq!(&ab, &ba);

            let mut ab_c = ab.clone();
            ab_c.merge(&hc);
            let mut bc = hb.clone();
            bc.merge(&hc);
            let mut a_bc = ha.clone();
            a_bc.merge(&bc);
            prop_assert_eq!(&ab_c, &a_bc);

            let all: SeparationHistogram = a.iter().chain(&b).chain(&c).copied().collect();
            prop_assert_eq!(ab_c, all);
        }
    }
}
