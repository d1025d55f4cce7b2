//! Published reference values for twin-separation slopes and the π₁ counting
//! convention they were reported under.

use serde::Serialize;

/// One published row: twin count, slope, its error, prime count, bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PublishedRow {
    pub pi2: u64,
    pub slope: f64,
    pub stat_error: f64,
    pub pi1: u64,
    pub n: u64,
}

const fn row(pi2: u64, slope: f64, stat_error: f64, pi1: u64, n: u64) -> PublishedRow {
    PublishedRow {
        pi2,
        slope,
        stat_error,
        pi1,
        n,
    }
}

/// Slopes of the separation distribution from `N = 79561` to `4020634603`.
pub const SLOPE_TABLE: [PublishedRow; 12] = [
    row(1_000, 0.141667, 0.00599, 7_793, 79_561),
    row(5_000, 0.122415, 0.00315, 45_886, 557_521),
    row(10_000, 0.114097, 0.00325, 97_255, 1_260_991),
    row(50_000, 0.104126, 0.00105, 556_396, 8_264_959),
    row(100_000, 0.096421, 0.00095, 1_175_775, 18_409_201),
    row(500_000, 0.086700, 0.00056, 6_596_231, 115_438_669),
    row(1_000_000, 0.081143, 0.00041, 13_804_822, 252_427_603),
    row(3_000_000, 0.075491, 0.00035, 44_214_960, 863_029_303),
    row(5_000_000, 0.073150, 0.00031, 75_860_671, 1_523_975_911),
    row(8_000_000, 0.070965, 0.00032, 124_538_861, 2_566_997_821),
    row(10_000_000, 0.070154, 0.00029, 157_523_559, 3_285_916_171),
    row(12_000_000, 0.069814, 0.00024, 190_894_477, 4_020_634_603),
];

pub fn find_row(pi2: u64, n: u64) -> Option<&'static PublishedRow> {
    SLOPE_TABLE.iter().find(|r| r.pi2 == pi2 && r.n == n)
}

/// How many small primes are left out of a reported π₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Pi1Convention {
    /// π(N).
    Raw,
    /// π(N) − 1: the prime 2 is left out. The published slope table uses
    /// this.
    #[default]
    WithoutTwo,
    /// π(N) − 2: both 2 and 3 are left out.
    WithoutTwoAndThree,
}

impl Pi1Convention {
    pub const ALL: [Pi1Convention; 3] = [
        Pi1Convention::Raw,
        Pi1Convention::WithoutTwo,
        Pi1Convention::WithoutTwoAndThree,
    ];

    pub fn offset(self) -> u64 {
        match self {
            Pi1Convention::Raw => 0,
            Pi1Convention::WithoutTwo => 1,
            Pi1Convention::WithoutTwoAndThree => 2,
        }
    }

    pub fn apply(self, pi1_raw: u64) -> u64 {
        pi1_raw.saturating_sub(self.offset())
    }

    /// The convention under which `pi1_raw` reproduces the published π₁ for
    /// the row matching `(pi2, n)`, if any.
    pub fn detect(pi2: u64, n: u64, pi1_raw: u64) -> Option<Pi1Convention> {
        let row = find_row(pi2, n)?;
        Self::ALL.into_iter().find(|c| c.apply(pi1_raw) == row.pi1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_is_monotone() {
        for pair in SLOPE_TABLE.windows(2) {
            assert!(pair[0].pi2 < pair[1].pi2);
            assert!(pair[0].n < pair[1].n);
            assert!(pair[0].pi1 < pair[1].pi1);
            assert!(pair[0].slope > pair[1].slope);
        }
    }

    #[test]
    fn detection() {
        assert_eq!(Pi1Convention::detect(1000, 79_561, 7794), Some(Pi1Convention::WithoutTwo));
        assert_eq!(Pi1Convention::detect(1000, 79_561, 7793), Some(Pi1Convention::Raw));
        assert_eq!(
            Pi1Convention::detect(1000, 79_561, 7795),
            Some(Pi1Convention::WithoutTwoAndThree)
        );
        assert_eq!(Pi1Convention::detect(1000, 79_561, 7800), None);
        assert_eq!(Pi1Convention::detect(999, 79_561, 7794), None);
    }
}
