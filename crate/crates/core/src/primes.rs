//! Small-prime utilities shared by trial division, the classifiers, and the
//! verification suites: a sieve of Eratosthenes and u64 trial-division
//! primality. These back desk-scale oracles and bound checks only; nothing
//! here pretends to handle cryptographic sizes.

/// All primes strictly below `limit`, ascending.
pub fn primes_below(limit: u64) -> Vec<u64> {
    if limit <= 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut sieve = vec![true; n];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2usize;
    while i * i < n {
        if sieve[i] {
            let mut j = i * i;
            while j < n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &p)| if p { Some(i as u64) } else { None })
        .collect()
}

/// Deterministic trial-division primality for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    if n % 3 == 0 {
        return n == 3;
    }
    let mut d = 5u64;
    while d.checked_mul(d).map_or(false, |dd| dd <= n) {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_matches_trial_division() {
        let sieved = primes_below(1000);
        let checked: Vec<u64> = (0..1000).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(sieved, checked);
        assert_eq!(sieved.len(), 168);
    }

    #[test]
    fn edge_cases() {
        assert!(primes_below(0).is_empty());
        assert!(primes_below(2).is_empty());
        assert_eq!(primes_below(3), vec![2]);
        assert!(is_prime_u64(2));
        assert!(!is_prime_u64(1));
        assert!(is_prime_u64(999_999_937));
        assert!(!is_prime_u64(999_999_939)); // 3 · 333333313
    }
}
