//! The fixed bijection between the integers and the primes.
//!
//! Primes are enumerated in increasing order `2, 3, 5, 7, 11, ...` and the
//! integer index walks that list in zigzag order: `0 -> 2`, `1 -> 3`,
//! `-1 -> 5`, `2 -> 7`, `-2 -> 11`, `3 -> 13`, ...

use std::sync::{OnceLock, RwLock};

fn table() -> &'static RwLock<Vec<u64>> {
    static PRIMES: OnceLock<RwLock<Vec<u64>>> = OnceLock::new();
    PRIMES.get_or_init(|| RwLock::new(vec![2, 3, 5, 7, 11, 13]))
}

fn is_prime_with(primes: &[u64], candidate: u64) -> bool {
    for &p in primes {
        if p * p > candidate {
            return true;
        }
        if candidate.is_multiple_of(p) {
            return false;
        }
    }
    true
}

/// The `pos`-th prime in increasing order, zero-based.
pub fn nth_prime(pos: usize) -> u64 {
    if let Some(&p) = table().read().expect("prime table poisoned").get(pos) {
        return p;
    }
    let mut primes = table().write().expect("prime table poisoned");
    let mut candidate = *primes.last().expect("table is seeded") + 2;
    while primes.len() <= pos {
        if is_prime_with(&primes, candidate) {
            primes.push(candidate);
        }
        candidate += 2;
    }
    primes[pos]
}

/// Zero-based position of `p` among the primes, or `None` when `p` is not prime.
pub fn prime_position(p: u64) -> Option<usize> {
    if p < 2 {
        return None;
    }
    let mut pos = 0;
    loop {
        let q = nth_prime(pos);
        if q == p {
            return Some(pos);
        }
        if q > p {
            return None;
        }
        pos += 1;
    }
}

fn index_to_position(n: i64) -> usize {
    if n > 0 {
        (2 * n - 1) as usize
    } else {
        (-2 * n) as usize
    }
}

fn position_to_index(pos: usize) -> i64 {
    let pos = pos as i64;
    if pos % 2 == 1 {
        (pos + 1) / 2
    } else {
        -pos / 2
    }
}

/// The prime carrying index `n`.
pub fn prime_at(n: i64) -> u64 {
    nth_prime(index_to_position(n))
}

/// The index of the prime `p`, or `None` when `p` is not prime.
pub fn index_of_prime(p: u64) -> Option<i64> {
    prime_position(p).map(position_to_index)
}
