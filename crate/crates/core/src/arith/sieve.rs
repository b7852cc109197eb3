/// Primes below `bound` by a plain sieve of Eratosthenes.  Intended for trial
/// division tables and for streaming candidates in the split-prime search, so
/// `bound` stays in the few-million range.
pub fn primes_below(bound: u64) -> Vec<u64> {
    if bound <= 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n];
    let mut primes = Vec::new();
    for p in 2..n {
        if !composite[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q < n {
                composite[q] = true;
                q += p;
            }
        }
    }
    primes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        assert_eq!(primes_below(2), Vec::<u64>::new());
        assert_eq!(primes_below(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(primes_below(1_000).len(), 168);
        assert_eq!(primes_below(1_000_000).len(), 78_498);
    }
}
