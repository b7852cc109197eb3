use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::primality::is_prime;
use super::sieve::primes_below;
use crate::error::{Error, Result};

/// Work limits for `factorize`.  Trial division runs over primes below
/// `trial_bound`; after that Brent's variant of Pollard rho spends at most
/// `rho_iterations` total iterations across all remaining composites.
#[derive(Debug, Clone)]
pub struct Budget {
    pub trial_bound: u64,
    pub rho_iterations: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { trial_bound: 1_000_000, rho_iterations: 4_000_000 }
    }
}

impl Budget {
    /// A light budget for bulk property tests.
    pub fn small() -> Self {
        Budget { trial_bound: 10_000, rho_iterations: 20_000 }
    }

    pub fn scaled(&self, factor: u64) -> Self {
        Budget {
            trial_bound: self.trial_bound.saturating_mul(factor).max(2),
            rho_iterations: self.rho_iterations.saturating_mul(factor),
        }
    }
}

/// Result of a budgeted factorization.  The invariant
/// `sign * prod(p^e) * cofactor == input` always holds exactly; `cofactor` is a
/// composite remainder present only if the budget ran out, and is never claimed
/// prime.  `certified` records whether every listed prime passed an
/// unconditional primality test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeFactorization {
    pub sign: i8,
    pub factors: Vec<(BigInt, u32)>,
    pub cofactor: Option<BigInt>,
    pub certified: bool,
}

impl PrimeFactorization {
    pub fn is_complete(&self) -> bool {
        self.cofactor.is_none()
    }

    /// Reassemble the original integer.
    pub fn product(&self) -> BigInt {
        let mut acc = BigInt::from(self.sign);
        for (p, e) in &self.factors {
            acc *= p.pow(*e);
        }
        if let Some(c) = &self.cofactor {
            acc *= c;
        }
        acc
    }

    /// Exponent of `p` among the listed factors (0 if absent).
    pub fn exponent_of(&self, p: &BigInt) -> u32 {
        self.factors.iter().find(|(q, _)| q == p).map(|(_, e)| *e).unwrap_or(0)
    }

    /// Distinct primes, ascending.
    pub fn primes(&self) -> Vec<BigInt> {
        self.factors.iter().map(|(p, _)| p.clone()).collect()
    }
}

fn brent_rho(n: &BigUint, budget: &mut u64) -> Option<BigUint> {
    // Deterministic Brent rho: walk x -> x^2 + c (mod n) for c = 1, 2, ...
    let two = BigUint::from(2u32);
    if (n % &two).is_zero() {
        return Some(two);
    }
    for c in 1u64..64 {
        let c = BigUint::from(c);
        let mut y = BigUint::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = (&y * &y + &c) % n;
            }
            let mut k: u64 = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let m = 128.min(r - k);
                for _ in 0..m {
                    y = (&y * &y + &c) % n;
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (&q * &diff) % n;
                }
                g = q.gcd(n);
                k += m;
                if *budget < m {
                    *budget = 0;
                    return None;
                }
                *budget -= m;
            }
            r *= 2;
        }
        if g == *n {
            // Backtrack to find the factor one step at a time.
            loop {
                ys = (&ys * &ys + &c) % n;
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
                if *budget == 0 {
                    return None;
                }
                *budget -= 1;
            }
        }
        if g != *n {
            return Some(g);
        }
        // Cycle degenerated for this c; try the next increment.
    }
    None
}

/// If `n = b^k` for some k >= 2, return `(b, k)` with k maximal.
fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    let bits = n.bits();
    for k in (2..=bits.max(2) as u32).rev() {
        let root = n.nth_root(k);
        if root.pow(k) == *n && root > BigUint::one() {
            return Some((root, k));
        }
    }
    None
}

/// Factor `n` within the given budget.  See `PrimeFactorization` for the exact
/// contract; a zero input is represented as sign 0 with no factors.
pub fn factorize(n: &BigInt, budget: &Budget) -> PrimeFactorization {
    if n.is_zero() {
        return PrimeFactorization { sign: 0, factors: vec![], cofactor: None, certified: true };
    }
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut rest = n.magnitude().clone();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut certified = true;

    for p in primes_below(budget.trial_bound) {
        if rest.is_one() {
            break;
        }
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0u32;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            e += 1;
        }
        if e > 0 {
            factors.push((BigInt::from(p), e));
        }
    }

    // Remaining part is either 1, a prime, or a composite with all prime factors
    // above the trial bound; split it with perfect-power reduction + Brent rho.
    let mut rho_budget = budget.rho_iterations;
    let mut pending: Vec<(BigUint, u32)> = Vec::new();
    if !rest.is_one() {
        pending.push((rest, 1));
    }
    let mut unfactored: Vec<(BigUint, u32)> = Vec::new();
    while let Some((m, mult)) = pending.pop() {
        if m.is_one() {
            continue;
        }
        let verdict = is_prime(&BigInt::from(m.clone()));
        if verdict.is_prime {
            certified &= verdict.certified;
            factors.push((BigInt::from(m), mult));
            continue;
        }
        if let Some((base, k)) = perfect_power(&m) {
            pending.push((base, mult * k));
            continue;
        }
        match brent_rho(&m, &mut rho_budget) {
            Some(d) => {
                let q = &m / &d;
                pending.push((d, mult));
                pending.push((q, mult));
            }
            None => unfactored.push((m, mult)),
        }
    }

    // Merge duplicate primes and sort ascending.
    factors.sort();
    let mut merged: Vec<(BigInt, u32)> = Vec::new();
    for (p, e) in factors {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }

    let cofactor = if unfactored.is_empty() {
        None
    } else {
        let mut c = BigUint::one();
        for (m, mult) in unfactored {
            c *= m.pow(mult);
        }
        Some(BigInt::from(c))
    };

    PrimeFactorization { sign, factors: merged, cofactor, certified }
}

/// Largest k with p^k | n (n nonzero, p a prime > 1).
pub fn valuation(n: &BigInt, p: &BigInt) -> u32 {
    assert!(!n.is_zero(), "valuation of 0 is undefined");
    assert!(p.abs() > BigInt::one());
    let mut k = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return k;
        }
        m = q;
        k += 1;
    }
}

/// Write `m = b * c^3` with `c > 0` and `b` cube-free (sign carried by `b`).
/// Requires a complete factorization of `m` within the budget.
pub fn cube_free_split(m: &BigInt, budget: &Budget) -> Result<(BigInt, BigInt)> {
    if m.is_zero() {
        return Err(Error::parameter("cube_free_split of 0"));
    }
    let f = factorize(m, budget);
    if let Some(c) = f.cofactor {
        return Err(Error::FactorBudget(c));
    }
    let mut b = BigInt::from(f.sign);
    let mut c = BigInt::one();
    for (p, e) in &f.factors {
        b *= p.pow(e % 3);
        c *= p.pow(e / 3);
    }
    Ok((b, c))
}
