use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

/// Outcome of a primality test.  `certified` is true when the verdict is
/// unconditional (small-base deterministic Miller–Rabin below its proven range);
/// above that range the verdict is probabilistic with error below 2^-128 and is
/// flagged accordingly rather than silently treated as proven.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Primality {
    pub is_prime: bool,
    pub certified: bool,
}

/// Largest bound for which Miller–Rabin with the first 13 prime bases is a
/// deterministic primality test (Sorenson–Webster).
fn deterministic_limit() -> BigUint {
    "3317044064679887385961981".parse().unwrap()
}

const SMALL_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Deterministic xorshift-style mixer used to derive extra Miller–Rabin bases
/// for inputs beyond the proven range; keyed on the input so runs are repeatable.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn miller_rabin_round(n: &BigUint, base: &BigUint) -> bool {
    // n odd, n > 2, 1 < base < n-1 assumed checked by caller.
    let n_m1 = n - 1u32;
    let s = n_m1.trailing_zeros().unwrap();
    let d = &n_m1 >> s;
    let mut x = base.modpow(&d, n);
    if x.is_one() || x == n_m1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_m1 {
            return true;
        }
    }
    false
}

pub fn is_prime(n: &BigInt) -> Primality {
    let composite = Primality { is_prime: false, certified: true };
    if n.sign() != num_bigint::Sign::Plus {
        return composite;
    }
    let n = n.magnitude().clone();
    if n < BigUint::from(2u32) {
        return composite;
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let p = BigUint::from(p);
        if n == p {
            return Primality { is_prime: true, certified: true };
        }
        if (&n % &p).is_zero() {
            return composite;
        }
    }
    let in_proven_range = n < deterministic_limit();
    for b in SMALL_BASES {
        if !miller_rabin_round(&n, &BigUint::from(b)) {
            return composite;
        }
    }
    if in_proven_range {
        return Primality { is_prime: true, certified: true };
    }
    // Beyond the proven range: 64 further bases from a fixed input-keyed stream.
    let mut seed = n.iter_u64_digits().fold(0xdeadbeefu64, |acc, d| acc ^ d.rotate_left(17));
    let span = &n - 3u32;
    let mut done = 0;
    while done < 64 {
        let mut raw = BigUint::zero();
        for _ in 0..(n.bits() / 64 + 1) {
            raw = (raw << 64) | BigUint::from(splitmix64(&mut seed));
        }
        let base = (raw % &span) + 2u32;
        if !miller_rabin_round(&n, &base) {
            return composite;
        }
        done += 1;
    }
    Primality { is_prime: true, certified: false }
}

/// Convenience for u64 inputs (always certified).
pub fn is_prime_u64(n: u64) -> bool {
    is_prime(&BigInt::from(n)).is_prime
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve::primes_below;

    #[test]
    fn matches_sieve_below_10000() {
        let sieve = primes_below(10_000);
        let mut idx = 0;
        for n in 2u64..10_000 {
            let expected = idx < sieve.len() && sieve[idx] == n;
            let got = is_prime(&BigInt::from(n));
            assert_eq!(got.is_prime, expected, "disagreement at {n}");
            assert!(got.certified);
            if expected {
                idx += 1;
            }
        }
    }

    #[test]
    fn known_large_values() {
        // 2^89 - 1 is a Mersenne prime; it exceeds the deterministic range.
        let m89: BigInt = (BigInt::from(1) << 89) - 1;
        let r = is_prime(&m89);
        assert!(r.is_prime && !r.certified);
        // A Carmichael-style stress case: 3215031751 fools bases {2,3,5,7}... not ours.
        assert!(!is_prime(&BigInt::from(3215031751u64)).is_prime);
        // Negative numbers, 0, 1 are not prime.
        assert!(!is_prime(&BigInt::from(-7)).is_prime);
        assert!(!is_prime(&BigInt::from(0)).is_prime);
        assert!(!is_prime(&BigInt::from(1)).is_prime);
        // Fixture primes from the construction pipeline.
        assert!(is_prime(&BigInt::from(463)).is_prime);
        assert!(is_prime(&BigInt::from(999983)).is_prime);
    }
}
