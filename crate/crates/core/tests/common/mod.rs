#![allow(dead_code)]

//! Independent reference implementations shared by the integration tests.

/// Primes up to `limit` by trial division.
pub fn trial_division(limit: u64) -> Vec<u64> {
    (2..=limit)
        .filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
        .collect()
}

/// Plain byte-per-integer sieve over the whole range.
pub fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut is_prime = vec![true; n + 1];
    is_prime[0] = false;
    if n >= 1 {
        is_prime[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if is_prime[i] {
            for j in (i * i..=n).step_by(i) {
                is_prime[j] = false;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&k| is_prime[k]).map(|k| k as u64).collect()
}

/// Twins from (5, 7) and the singleton counts between consecutive twins,
/// found by brute-force pair search and full rescans.
pub fn naive_twins(primes: &[u64]) -> (Vec<(u64, u64)>, Vec<u64>) {
    let mut twins = Vec::new();
    for (i, &p) in primes.iter().enumerate() {
        if p < 5 {
            continue;
        }
        for &q in &primes[i + 1..] {
            if q == p + 2 {
                twins.push((p, q));
            }
        }
    }
    let separations = twins
        .windows(2)
        .map(|w| {
            let (_, high) = w[0];
            let (low, _) = w[1];
            primes.iter().filter(|&&p| p > high && p < low).count() as u64
        })
        .collect();
    (twins, separations)
}
