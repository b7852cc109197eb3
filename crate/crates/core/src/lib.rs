//! Exact-arithmetic construction of cubic number fields whose discriminant lies in a
//! prescribed rational square class `d·Q*²` and whose class number is divisible by a
//! chosen odd `n`.
//!
//! The pipeline works with three fields at once: a cubic field `K = Q(pi)` cut out by
//! `u(x) = x^3 + m(x+1)^2` with `m = (3^6 d^n a^{2^s n} + 27)/4`, the imaginary
//! quadratic field `F = Q(sqrt(d))`, and their compositum `KF` (the Galois closure of
//! `K`, with group S3).  Every analytic-looking step (unit independence, principality
//! of ideals, regulators) is backed by exact rational interval enclosures, so that a
//! produced divisibility certificate is rigorous, not floating-point evidence.
//!
//! Module map:
//! - [`arith`]: big-integer utilities — primality, budgeted factorization, CRT,
//!   power residues, r-th roots mod q, polynomial roots mod p, generic dense
//!   polynomials with exact resultants/discriminants.
//! - [`linalg`]: small exact integer/rational matrices, HNF/SNF, kernels mod p.
//! - [`interval`]: dyadic rational intervals with certified `sqrt` and `ln`.
//! - [`quad`]: the quadratic field `F` and its ring of integers.
//! - [`cubic`]: the cubic field `K`, its maximal order and certified embeddings.
//! - [`orders`]: dimension-generic orders as multiplicative lattices — radical /
//!   multiplier-ring maximalization, prime factorization, ideal arithmetic,
//!   valuations.
//! - [`compositum`]: `KF` as pairs `x + y*sqrt(d)` over `K`, the order-3
//!   automorphism `sigma`, conjugation `tau`, relative norms and traces.
//! - [`units`]: lattice enumeration under the `T2` form, certified fundamental
//!   units, rigorous principality tests, regulators of unit pairs.
//! - [`uchida`]: the Uchida-type instances themselves — construction, ramification
//!   classification, the distinguished element `alpha` and its n-th-power ideal
//!   witnesses.
//! - [`search`]: the auxiliary cyclic cubic base field and the split-prime pair
//!   search with congruence solving.
//! - [`oracle`]: class-element order certification and a small-discriminant class
//!   group oracle.
//! - [`cert`]: serializable certificate formats (all integers as decimal strings).

pub mod arith;
pub mod cert;
pub mod compositum;
pub mod cubic;
pub mod error;
pub mod interval;
pub mod linalg;
pub mod oracle;
pub mod orders;
pub mod quad;
pub mod search;
pub mod uchida;
pub mod units;

pub use error::Error;

/// Default starting precision (bits) for the interval ladder; can be overridden by
/// consumers (the CLI reads `CUBICLASS_PRECISION`).
pub const DEFAULT_PRECISION: u32 = 64;

static START_PRECISION: std::sync::atomic::AtomicU32 = std::sync::atomic::AtomicU32::new(0);

/// Starting precision (bits) used by interval ladders when the caller does not
/// request more. Defaults to [`DEFAULT_PRECISION`] until [`set_start_precision`]
/// is called (the CLI does so once, from `CUBICLASS_PRECISION`). Ladders
/// escalate automatically on demand, so this is a performance knob, never a
/// soundness one.
pub fn start_precision() -> u32 {
    let v = START_PRECISION.load(std::sync::atomic::Ordering::Relaxed);
    if v == 0 {
        DEFAULT_PRECISION
    } else {
        v
    }
}

/// Set the starting precision for interval ladders (clamped to
/// `[8, MAX_PRECISION]`).
pub fn set_start_precision(bits: u32) {
    START_PRECISION.store(
        bits.clamp(8, MAX_PRECISION),
        std::sync::atomic::Ordering::Relaxed,
    );
}

/// Precision ladder used when an enclosure is too wide to decide a comparison:
/// start at `start` bits and double, giving up after `MAX_PRECISION`.
pub const MAX_PRECISION: u32 = 4096;
