//! Exact integer arithmetic: primality, budgeted factorization, modular root
//! extraction and generic dense polynomials.  Everything here is deterministic —
//! randomized subroutines (Pollard rho, equal-degree splitting) iterate over a
//! fixed parameter sequence so that repeated runs produce identical output.

pub mod factor;
pub mod modular;
pub mod poly;
pub mod primality;
pub mod sieve;

pub use factor::{cube_free_split, factorize, valuation, Budget, PrimeFactorization};
pub use modular::{crt, inv_mod, power_residue_test, roots_mod_p, rth_root_mod};
pub use poly::{Poly, Ring};
pub use primality::{is_prime, is_prime_u64, Primality};
pub use sieve::primes_below;
