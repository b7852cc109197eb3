//! Class-number divisibility certificates and a small-discriminant class
//! group oracle.
//!
//! The primary deliverable is [`class_element_order`]: given the exact
//! n-th root 𝔅 of the principal ideal (β), it certifies that the ideal
//! class [𝔅] has order exactly n by (a) re-verifying the HNF identity
//! 𝔅ⁿ = (β) and (b) proving 𝔅^{n/l} non-principal for every prime l | n
//! through exhaustive trace-form enumeration. Order exactly n forces
//! n | h(K). Enumeration failures downgrade the verdict honestly instead
//! of guessing.
//!
//! [`class_group_small`] is an independent oracle for tiny discriminants:
//! it enumerates every integral ideal of norm up to the Minkowski bound,
//! partitions them into ideal classes with decisive principality tests,
//! and reads off the class number and invariant factors from the finite
//! group so obtained. Every ideal class of a field contains an integral
//! ideal of norm below the Minkowski bound, and an ideal of norm ≤ B is a
//! product of prime ideals of norm ≤ B, so the enumeration is complete
//! and the result unconditional.
//!
//! [`genus_factor_report`] applies the genus-theoretic divisor rule: with
//! 6 + t totally ramified primes the odd part of the class group gains a
//! guaranteed factor 3ᵗ. The rule itself is imported as a black box from
//! the literature; the report never claims more than the count justifies
//! and is withheld when the ramification table is incomplete.

use crate::arith::{self, Budget};
use crate::cubic::{CubicField, KElt};
use crate::error::{Error, Result};
use crate::orders::{
    factor_prime, ideal_from_element, ideal_from_gens, ideal_pow, ideal_product, p_maximalize,
    Ideal, Order, PrimeIdeal,
};
use crate::uchida::{alpha_data, beta_ideal, ramification_report, AlphaData, BetaWitness, Instance};
use crate::units::{self, is_unit, order_basis, reduce_basis, t2_form};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

// ---------------------------------------------------------------------------
// Genus factor
// ---------------------------------------------------------------------------

/// The guaranteed class-number divisor read off the count of totally
/// ramified primes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusFactor {
    /// Number of totally ramified rational primes (complete census).
    #[serde(with = "crate::cert::u64_str")]
    pub count: u64,
    /// t = max(0, count − 6).
    #[serde(with = "crate::cert::u32_str")]
    pub t: u32,
    /// The guaranteed divisor 3ᵗ·n of h(K).
    #[serde(with = "crate::cert::big_str")]
    pub divisor: BigInt,
    #[serde(with = "crate::cert::big_vec_str")]
    pub totally_ramified: Vec<BigInt>,
    /// The 3ᵗ factor rests on a cited genus-theoretic rule that this
    /// artifact does not re-prove; recorded for honest provenance.
    pub rule: String,
}

/// Count the totally ramified primes of an instance and report 3ᵗ·n.
///
/// Withheld (an `Inconclusive` error) when the factorization budget left
/// the ramification table incomplete, because the count would then be a
/// lower bound presented as a census.
pub fn genus_factor_report(inst: &Instance, budget: &Budget) -> Result<GenusFactor> {
    let rep = ramification_report(inst, budget)?;
    if !rep.complete {
        return Err(Error::Inconclusive(
            "ramification table incomplete (factorization budget); genus report withheld".into(),
        ));
    }
    let count = rep.totally_ramified.len() as u64;
    let t = rep.t;
    let divisor = Pow::pow(&big(3), u64::from(t)) * BigInt::from(inst.params.n);
    Ok(GenusFactor {
        count,
        t,
        divisor,
        totally_ramified: rep.totally_ramified.clone(),
        rule: "with 6 + t totally ramified primes the class number gains a factor 3^t \
               (cited rule, not re-proved here); combined with the order-n class this \
               guarantees 3^t·n | h(K)"
            .into(),
    })
}

// ---------------------------------------------------------------------------
// Divisibility certificate (ideal-class order)
// ---------------------------------------------------------------------------

/// One principality subtest: the ideal 𝔅^{n/l} for a prime l | n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderSubtest {
    #[serde(with = "crate::cert::u32_str")]
    pub l: u32,
    /// The tested power n/l.
    #[serde(with = "crate::cert::u32_str")]
    pub exponent: u32,
    /// HNF basis of 𝔅^{n/l} over the maximal-order basis.
    #[serde(with = "crate::cert::mat_str")]
    pub ideal_hnf: Vec<Vec<BigInt>>,
    #[serde(with = "crate::cert::big_str")]
    pub norm: BigInt,
    /// "non-principal" | "principal" | "inconclusive: <reason>".
    pub outcome: String,
    /// Generator coordinates (power basis, rational strings) when one
    /// was found.
    pub generator: Option<Vec<String>>,
    /// Enumeration budget the verdict was certified under.
    #[serde(with = "crate::cert::u64_str")]
    pub max_points: u64,
}

/// Overall verdict of a divisibility certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Every subtest decisive and non-principal: [𝔅] has order exactly n
    /// and n | h(K).
    Certified,
    /// Some subtest hit its enumeration budget: the divisibility is
    /// supported by all completed tests but not certified.
    SupportedNotCertified,
    /// Some 𝔅^{n/l} is principal: the class order properly divides n and
    /// the n-divisibility certificate is withheld.
    OrderDividesProperly,
}

/// Self-contained record that the ideal class of 𝔅 has order exactly n,
/// hence n | h(K).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisibilityCertificate {
    #[serde(with = "crate::cert::big_str")]
    pub d: BigInt,
    #[serde(with = "crate::cert::u32_str")]
    pub n: u32,
    #[serde(with = "crate::cert::u32_str")]
    pub s: u32,
    #[serde(with = "crate::cert::big_str")]
    pub a: BigInt,
    #[serde(with = "crate::cert::big_str")]
    pub m: BigInt,
    /// Basis of the maximal order: rows over the power basis, scaled by
    /// `order_den` (the order is (1/den)·rows).
    #[serde(with = "crate::cert::mat_str")]
    pub order_basis: Vec<Vec<BigInt>>,
    #[serde(with = "crate::cert::big_str")]
    pub order_den: BigInt,
    /// HNF basis of 𝔅 over the maximal-order basis.
    #[serde(with = "crate::cert::mat_str")]
    pub b_hnf: Vec<Vec<BigInt>>,
    #[serde(with = "crate::cert::big_str")]
    pub b_norm: BigInt,
    /// The recorded generator of 𝔅ⁿ: coordinates of β in the power basis.
    pub beta: Vec<String>,
    /// |N(β)| = N(𝔅)ⁿ, re-checked at assembly.
    #[serde(with = "crate::cert::big_str")]
    pub beta_norm_abs: BigInt,
    pub subtests: Vec<OrderSubtest>,
    pub verdict: Verdict,
    pub statement: String,
    pub method: String,
    /// The compositum-side statement is a corollary of the K-side
    /// certificate by the cited descent argument; never certified here.
    pub kf_note: String,
    /// Genus addendum when the ramification census is complete.
    pub genus: Option<GenusFactor>,
}

/// Certify the order of the ideal class [𝔅].
///
/// Re-verifies 𝔅ⁿ = (β) by exact HNF equality, then tests 𝔅^{n/l} for
/// principality for every prime l | n. All non-principal → the class
/// order is exactly n and n | h(K) (verdict `Certified`). A principal
/// subtest flips the verdict to `OrderDividesProperly`; an exhausted
/// enumeration budget downgrades to `SupportedNotCertified`.
pub fn class_element_order(
    inst: &Instance,
    beta: &BetaWitness,
    order: &Order,
    max_points: u64,
) -> Result<DivisibilityCertificate> {
    let k = &inst.k;
    let n = inst.params.n;

    // 𝔅ⁿ = (β), from scratch.
    let bcoords = order
        .coords(&beta.beta.c)
        .ok_or_else(|| Error::internal("β does not lie in the supplied order"))?;
    let beta_principal = ideal_from_element(k, order, &bcoords)?;
    let bn = ideal_pow(k, order, &beta.b_ideal, u64::from(n))?;
    if bn.basis != beta_principal.basis {
        return Err(Error::internal("𝔅ⁿ ≠ (β): certificate precondition fails"));
    }
    let beta_norm_abs = {
        let nb = k.norm(&beta.beta).abs();
        if !nb.denom().is_one() {
            return Err(Error::internal("N(β) is not a rational integer"));
        }
        nb.numer().clone()
    };
    if Pow::pow(&beta.b_ideal.norm(), u64::from(n)) != beta_norm_abs {
        return Err(Error::internal("N(𝔅)ⁿ ≠ |N(β)|"));
    }

    // The reduction unit for principality tests: ε = π + 1.
    let eps = KElt::new(BigRational::one(), BigRational::one(), BigRational::zero());
    if !is_unit(k, &eps) || !order.contains(&eps.c) {
        return Err(Error::internal("π + 1 is not a unit of the order"));
    }

    let mut subtests = Vec::new();
    let mut any_principal = false;
    let mut any_inconclusive = false;
    for l in prime_divisors_u32(n) {
        let e = n / l;
        let idl = ideal_pow(k, order, &beta.b_ideal, u64::from(e))?;
        let norm = idl.norm();
        let (outcome, generator) = match units::is_principal(k, order, &idl, &eps, max_points) {
            Ok(None) => ("non-principal".to_string(), None),
            Ok(Some(g)) => {
                any_principal = true;
                (
                    "principal".to_string(),
                    Some(g.c.iter().map(crate::cert::rat_str::to_string).collect()),
                )
            }
            Err(Error::BoundExhausted(msg)) | Err(Error::Inconclusive(msg)) => {
                any_inconclusive = true;
                (format!("inconclusive: {msg}"), None)
            }
            Err(Error::PrecisionExhausted { bits, context }) => {
                any_inconclusive = true;
                (format!("inconclusive: precision exhausted at {bits} bits while {context}"), None)
            }
            Err(e) => return Err(e),
        };
        subtests.push(OrderSubtest {
            l,
            exponent: e,
            ideal_hnf: idl.basis.clone(),
            norm,
            outcome,
            generator,
            max_points,
        });
    }

    let verdict = if any_principal {
        Verdict::OrderDividesProperly
    } else if any_inconclusive {
        Verdict::SupportedNotCertified
    } else {
        Verdict::Certified
    };
    let statement = match verdict {
        Verdict::Certified => {
            if n == 1 {
                "certified: 1 | h(K) (vacuous; no prime subtests)".to_string()
            } else {
                format!("certified: {n} | h(K); the class of 𝔅 has order exactly {n}")
            }
        }
        Verdict::SupportedNotCertified => format!(
            "supported, not certified: {n} | h(K) is consistent with every completed test, \
             but at least one principality search exhausted its budget"
        ),
        Verdict::OrderDividesProperly => format!(
            "withheld: the class of 𝔅 has order properly dividing {n}; \
             no {n}-divisibility is claimed"
        ),
    };

    // Genus addendum (optional; withheld silently if incomplete).
    let genus = genus_factor_report(inst, &Budget::default()).ok();

    Ok(DivisibilityCertificate {
        d: inst.params.d.clone(),
        n,
        s: inst.params.s,
        a: inst.params.a.clone(),
        m: inst.m.clone(),
        order_basis: order.basis.clone(),
        order_den: order.den.clone(),
        b_hnf: beta.b_ideal.basis.clone(),
        b_norm: beta.b_ideal.norm(),
        beta: beta.beta.c.iter().map(crate::cert::rat_str::to_string).collect(),
        beta_norm_abs,
        subtests,
        verdict,
        statement,
        method: "ideal-class-order via exhaustive trace-form enumeration".into(),
        kf_note: "the compositum-side divisibility n | h(KF) follows from this K-side \
                  certificate by the cited descent argument; paper-conditional, \
                  not independently certified here"
            .into(),
        genus,
    })
}

/// Full pipeline wrapper: construct α and β for the instance, certify.
pub fn certify_instance(inst: &Instance, max_points: u64) -> Result<DivisibilityCertificate> {
    let alpha = alpha_data(inst)?;
    let order = crate::uchida::instance_maximal_order(inst, &Budget::default())?;
    let beta = beta_ideal(inst, &alpha, &order)?;
    class_element_order(inst, &beta, &order, max_points)
}

fn prime_divisors_u32(n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut rest = n;
    let mut p = 2u32;
    while u64::from(p) * u64::from(p) <= u64::from(rest) {
        if rest % p == 0 {
            out.push(p);
            while rest % p == 0 {
                rest /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        out.push(rest);
    }
    out
}

// ---------------------------------------------------------------------------
// Small class group oracle
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorBaseEntry {
    #[serde(with = "crate::cert::big_str")]
    pub p: BigInt,
    #[serde(with = "crate::cert::u32_str")]
    pub e: u32,
    #[serde(with = "crate::cert::u32_str")]
    pub f: u32,
    /// HNF basis of the prime ideal over the maximal-order basis.
    #[serde(with = "crate::cert::mat_str")]
    pub hnf: Vec<Vec<BigInt>>,
}

/// A fully determined class group of a small complex cubic field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupSmall {
    #[serde(with = "crate::cert::u64_str")]
    pub h: u64,
    /// Invariant factors d₁ | d₂ | …, product = h; empty for h = 1.
    pub invariant_factors: Vec<u64>,
    /// Rational upper bound used for the Minkowski bound.
    pub minkowski_bound: String,
    /// Prime ideals of norm below the bound (the class-group generators).
    pub factor_base: Vec<FactorBaseEntry>,
    #[serde(with = "crate::cert::u64_str")]
    pub ideals_enumerated: u64,
    /// Number of decisive principality tests performed.
    #[serde(with = "crate::cert::u64_str")]
    pub principality_tests: u64,
}

/// A unit ≠ ±1 of the order, found by enumerating the trace form with an
/// escalating bound. Exists by Dirichlet (rank 1 for a complex cubic).
fn find_any_unit(k: &CubicField, order: &Order, max_points: u64) -> Result<KElt> {
    let basis = reduce_basis(k, &order_basis(3, order));
    let form = t2_form(k, &basis, crate::start_precision())?;
    let mut bound = BigRational::from_integer(big(8)) * &form.inflation;
    for _ in 0..40 {
        let cands = units::enumerate_form(&form.q, &bound, max_points)?;
        let mut best: Option<KElt> = None;
        for v in &cands {
            let x = units::lattice_elt(&basis, v);
            if is_unit(k, &x) && !(x.is_rational() && x.c[0].abs().is_one()) {
                best = match best {
                    None => Some(x),
                    Some(b) => Some(if cmp_t2_key(&x) < cmp_t2_key(&b) { x } else { b }),
                };
            }
        }
        if let Some(u) = best {
            return Ok(u);
        }
        bound = bound * BigRational::from_integer(big(2));
    }
    Err(Error::BoundExhausted(
        "no unit ≠ ±1 found within the escalation ladder".into(),
    ))
}

/// Deterministic tie-break key: exact coordinate size.
fn cmp_t2_key(x: &KElt) -> (BigInt, Vec<BigRational>) {
    let mut s = BigInt::zero();
    for c in &x.c {
        s += c.numer().abs() + c.denom().abs();
    }
    (s, x.c.to_vec())
}

struct ClassContext<'a> {
    k: &'a CubicField,
    order: &'a Order,
    /// All prime ideals over every rational prime ≤ bound (including
    /// those of norm above the bound — needed for inverses), grouped and
    /// deterministically ordered.
    primes: Vec<PrimeIdeal>,
    unit: KElt,
    max_points: u64,
    tests: u64,
}

impl<'a> ClassContext<'a> {
    /// ∏ primes[i]^{v[i]} as an HNF ideal.
    fn materialize(&self, v: &[u32]) -> Result<Ideal> {
        let mut acc = Ideal::whole_ring(3);
        for (i, &e) in v.iter().enumerate() {
            if e > 0 {
                let p = ideal_pow(self.k, self.order, &self.primes[i].ideal, u64::from(e))?;
                acc = ideal_product(self.k, self.order, &acc, &p)?;
            }
        }
        Ok(acc)
    }

    /// Exponent vector of an integral ideal inverse-representative:
    /// [∏ pᵢ^{v}]⁻¹ = [complement(v)] using (p)·𝒪 = ∏_{𝔭|p} 𝔭^{e_𝔭}.
    fn complement(&self, v: &[u32]) -> Vec<u32> {
        let at = |j: usize| v.get(j).copied().unwrap_or(0);
        let mut w = vec![0u32; self.primes.len()];
        let mut done: Vec<BigInt> = Vec::new();
        for i in 0..self.primes.len() {
            if at(i) == 0 || done.contains(&self.primes[i].p) {
                continue;
            }
            let p = self.primes[i].p.clone();
            done.push(p.clone());
            let mut kp = 0u32;
            for (j, pr) in self.primes.iter().enumerate() {
                if pr.p == p && at(j) > 0 {
                    kp = kp.max(at(j).div_ceil(pr.e));
                }
            }
            for (j, pr) in self.primes.iter().enumerate() {
                if pr.p == p {
                    w[j] = kp * pr.e - at(j);
                }
            }
        }
        w
    }

    /// Decisive test: do v and r lie in the same ideal class?
    fn same_class(&mut self, v: &[u32], r: &[u32]) -> Result<bool> {
        let w = self.complement(r);
        let mut total = vec![0u32; self.primes.len()];
        for i in 0..self.primes.len() {
            total[i] = if i < v.len() { v[i] } else { 0 } + w[i];
        }
        let idl = self.materialize(&total)?;
        self.tests += 1;
        Ok(units::is_principal(self.k, self.order, &idl, &self.unit, self.max_points)?.is_some())
    }
}

/// Compute the full class group of a complex cubic field whose Minkowski
/// bound does not exceed `effort`.
///
/// Method: every ideal class contains an integral ideal of norm below the
/// Minkowski bound B, and every such ideal is a product of prime ideals
/// of norm ≤ B, so the enumerated list covers all classes; pairwise
/// principality tests (via complementary ideals) partition it, powers of
/// representatives give element orders, and the invariant factors follow
/// from the solution counts of x^{r^k} = 1 in the finite abelian group.
pub fn class_group_small(k: &CubicField, effort: u64, max_points: u64) -> Result<ClassGroupSmall> {
    let budget = Budget::default();
    let order = crate::orders::maximal_order(k, &Order::equation_order(3), &budget)?;
    let disc = order.disc(k);
    if disc.is_positive() {
        return Err(Error::Inconclusive(
            "totally real cubic: outside the small-oracle scope (rank-2 unit reduction \
             not implemented)"
            .into(),
        ));
    }

    // Rational upper bound for the Minkowski bound
    // (4/π)·(3!/3³)·√|disc| < 1.27324·(2/9)·(⌊√|disc|⌋ + 1).
    let sqrt_up = disc.abs().sqrt() + 1;
    let mb = BigRational::new(big(127_324) * big(2) * sqrt_up, big(100_000) * big(9));
    let bound = mb.to_integer().to_u64().unwrap_or(u64::MAX) + 1; // ≥ ⌊mb⌋, safe
    let mb_str = crate::interval::to_decimal(&mb, 6);

    if mb < BigRational::from_integer(big(2)) {
        // Every class contains an ideal of norm < 2, i.e. the ring itself.
        return Ok(ClassGroupSmall {
            h: 1,
            invariant_factors: vec![],
            minkowski_bound: mb_str,
            factor_base: vec![],
            ideals_enumerated: 1,
            principality_tests: 0,
        });
    }
    if bound > effort {
        return Err(Error::Inconclusive(format!(
            "effort exhausted: Minkowski bound ≈ {mb_str} exceeds the allowed {effort}"
        )));
    }

    // Primes over every rational p ≤ bound, deterministically ordered.
    let mut primes: Vec<PrimeIdeal> = Vec::new();
    for p in arith::primes_below(bound + 1) {
        let pb = BigInt::from(p);
        let mut over = factor_prime(k, &order, &pb)?;
        over.sort_by(|a, b| (a.f, &a.ideal.basis).cmp(&(b.f, &b.ideal.basis)));
        primes.extend(over);
    }
    let bound_big = BigInt::from(bound);
    let fb: Vec<usize> = (0..primes.len())
        .filter(|&i| primes[i].ideal.norm() <= bound_big)
        .collect();
    let factor_base: Vec<FactorBaseEntry> = fb
        .iter()
        .map(|&i| FactorBaseEntry {
            p: primes[i].p.clone(),
            e: primes[i].e,
            f: primes[i].f,
            hnf: primes[i].ideal.basis.clone(),
        })
        .collect();

    // All exponent vectors over the factor base with product norm ≤ bound.
    let mut vectors: Vec<(BigInt, Vec<u32>)> = Vec::new();
    let mut stack: Vec<(usize, BigInt, Vec<u32>)> =
        vec![(0, BigInt::one(), vec![0u32; primes.len()])];
    while let Some((pos, nrm, v)) = stack.pop() {
        if pos == fb.len() {
            vectors.push((nrm, v));
            continue;
        }
        let pi = fb[pos];
        let pnorm = primes[pi].ideal.norm();
        let mut e = 0u32;
        let mut cur = nrm.clone();
        loop {
            let mut vv = v.clone();
            vv[pi] = e;
            stack.push((pos + 1, cur.clone(), vv));
            e += 1;
            cur = &cur * &pnorm;
            if cur > bound_big {
                break;
            }
        }
    }
    vectors.sort();

    let unit = find_any_unit(k, &order, max_points)?;
    let mut ctx = ClassContext {
        k,
        order: &order,
        primes,
        unit,
        max_points,
        tests: 0,
    };

    // Partition into classes. The identity class is seeded by the whole
    // ring (the empty vector, first in sorted order).
    let mut reps: Vec<Vec<u32>> = Vec::new();
    let mut class_of_vec: Vec<usize> = Vec::new();
    for (_, v) in &vectors {
        let mut found = None;
        for (ci, r) in reps.iter().enumerate() {
            if ctx.same_class(v, r)? {
                found = Some(ci);
                break;
            }
        }
        match found {
            Some(ci) => class_of_vec.push(ci),
            None => {
                reps.push(v.clone());
                class_of_vec.push(reps.len() - 1);
            }
        }
    }
    let h = reps.len() as u64;

    // Group law on class indices: [a]·[b] = class of the product vector.
    let class_of = |v: &[u32], ctx: &mut ClassContext| -> Result<usize> {
        for (ci, r) in reps.iter().enumerate() {
            if ctx.same_class(v, r)? {
                return Ok(ci);
            }
        }
        Err(Error::internal(
            "product ideal matches no enumerated class (Minkowski completeness violated)",
        ))
    };
    let nprimes = ctx.primes.len();
    let mut table = vec![vec![0usize; h as usize]; h as usize];
    for i in 0..h as usize {
        for j in 0..=i {
            let mut v = vec![0u32; nprimes];
            for t in 0..nprimes {
                v[t] = reps[i][t] + reps[j][t];
            }
            let c = class_of(&v, &mut ctx)?;
            table[i][j] = c;
            table[j][i] = c;
        }
    }
    let id = class_of_vec[0]; // class of the whole ring
    let invariant_factors = invariant_factors_from_table(h, &table, id)?;

    Ok(ClassGroupSmall {
        h,
        invariant_factors,
        minkowski_bound: mb_str,
        factor_base,
        ideals_enumerated: vectors.len() as u64,
        principality_tests: ctx.tests,
    })
}

/// Invariant factors of a finite abelian group given by its Cayley table:
/// for each prime r | h the partition of the r-part is recovered from the
/// solution counts of x^{r^k} = 1, then the factors are assembled by
/// aligning the partitions largest-first.
fn invariant_factors_from_table(h: u64, table: &[Vec<usize>], id: usize) -> Result<Vec<u64>> {
    if h == 1 {
        return Ok(vec![]);
    }
    let hn = h as usize;
    let pow = |x: usize, mut e: u64| -> usize {
        let mut acc = id;
        let mut b = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = table[acc][b];
            }
            b = table[b][b];
            e >>= 1;
        }
        acc
    };
    let mut partitions: Vec<(u64, Vec<u32>)> = Vec::new();
    for r in prime_divisors_u64(h) {
        // sigma_k with r^{sigma_k} = #{x : x^{r^k} = 1}; the conjugate
        // partition has sigma_k − sigma_{k−1} parts of size ≥ k.
        let mut sigmas = vec![0u32];
        let mut rk = 1u64;
        loop {
            rk = rk.checked_mul(r).ok_or_else(|| Error::internal("overflow in group order"))?;
            let cnt = (0..hn).filter(|&x| pow(x, rk) == id).count() as u64;
            let mut s = 0u32;
            let mut c = cnt;
            while c > 1 {
                if c % r != 0 {
                    return Err(Error::internal("torsion count is not a power of r"));
                }
                c /= r;
                s += 1;
            }
            if s == *sigmas.last().unwrap() {
                break;
            }
            sigmas.push(s);
        }
        let conj: Vec<u32> = sigmas.windows(2).map(|w| w[1] - w[0]).collect();
        // Conjugate back: part_j = #{k : conj_k > j}.
        let nparts = *conj.first().unwrap_or(&0);
        let parts: Vec<u32> = (0..nparts)
            .map(|j| conj.iter().filter(|&&c| c > j).count() as u32)
            .collect();
        partitions.push((r, parts)); // descending by construction
    }
    let width = partitions.iter().map(|(_, p)| p.len()).max().unwrap_or(0);
    let mut factors = Vec::new();
    for j in 0..width {
        let mut d = 1u64;
        for (r, parts) in &partitions {
            if j < parts.len() {
                d *= r.pow(parts[j]);
            }
        }
        factors.push(d);
    }
    factors.reverse(); // ascending, each dividing the next
    let prod: u64 = factors.iter().product();
    if prod != h {
        return Err(Error::internal("invariant factors do not multiply to h"));
    }
    Ok(factors)
}

fn prime_divisors_u64(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            out.push(p);
            while rest % p == 0 {
                rest /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        out.push(rest);
    }
    out
}

// ---------------------------------------------------------------------------
// Even-order evidence for the auxiliary compositum ideal
// ---------------------------------------------------------------------------

/// Report-only record of the ideal √d·𝒪 + α·𝒪 of the sextic compositum.
///
/// A cited sufficient condition for an extra factor 2^{s−1}·n of h(KF)
/// asks this ideal's class to have even order; no degree-6 principality
/// test exists in this artifact, so the ideal is computed and reported
/// without any class-order verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvenOrderEvidence {
    /// HNF basis over the (support-maximalized) compositum order.
    #[serde(with = "crate::cert::mat_str")]
    pub hnf: Vec<Vec<BigInt>>,
    #[serde(with = "crate::cert::big_str")]
    pub norm: BigInt,
    /// (p, valuations of the ideal at the primes over p), for p | d.
    pub valuations: Vec<(String, Vec<String>)>,
    pub note: String,
}

pub fn even_order_evidence(inst: &Instance, alpha: &AlphaData) -> Result<EvenOrderEvidence> {
    let kf = crate::compositum::KFAlgebra { kf: inst.kf.clone() };
    let kf = &kf;
    let ok = crate::uchida::instance_maximal_order(inst, &Budget::default())?;
    let mut o6 = crate::compositum::product_order(&ok);

    // Maximalize wherever the two generators could have denominators or
    // the product order could fail to be maximal on the support:
    // p | 2·3·d·a and the primes of the α-coordinate denominators.
    let mut ps: Vec<BigInt> = vec![big(2), big(3)];
    ps.extend(inst.d_factors.iter().map(|(p, _)| p.clone()));
    ps.extend(inst.a_factors.iter().map(|(p, _)| p.clone()));
    let coords6 = kfelt_coords(&alpha.alpha);
    let mut den = BigInt::one();
    for c in &coords6 {
        den = den.lcm(c.denom());
    }
    let fac = arith::factorize(&den, &Budget::default());
    if !fac.is_complete() {
        return Err(Error::FactorBudget(den));
    }
    ps.extend(fac.factors.iter().map(|(p, _)| p.clone()));
    ps.sort();
    ps.dedup();
    for p in &ps {
        o6 = p_maximalize(kf, &o6, p)?;
    }

    let sd = o6
        .coords(&kfelt_coords(&crate::compositum::KFElt::sqrt_d()))
        .ok_or_else(|| Error::internal("√d not in the maximalized product order"))?;
    let ac = o6
        .coords(&coords6)
        .ok_or_else(|| Error::internal("α not in the maximalized product order"))?;
    let ideal = ideal_from_gens(kf, &o6, &[sd, ac], None)?;

    let mut valuations = Vec::new();
    for (p, _) in &inst.d_factors {
        let over = factor_prime(kf, &o6, p)?;
        let mut vs = Vec::new();
        for pr in &over {
            vs.push(crate::orders::ideal_valuation(kf, &o6, &ideal, pr)?.to_string());
        }
        valuations.push((p.to_string(), vs));
    }

    Ok(EvenOrderEvidence {
        hnf: ideal.basis.clone(),
        norm: ideal.norm(),
        valuations,
        note: "even class order of this ideal is a cited sufficient condition for an \
               extra 2^{s−1}·n divisor of h(KF); no degree-6 principality test is \
               implemented, so no verdict is asserted"
            .into(),
    })
}

fn kfelt_coords(x: &crate::compositum::KFElt) -> Vec<BigRational> {
    let mut v = x.a.c.to_vec();
    v.extend(x.b.c.to_vec());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Poly;
    use crate::uchida::{build_instance, Params};

    fn field(coeffs: [i64; 4]) -> CubicField {
        CubicField::new(Poly::new(coeffs.iter().map(|&c| big(c)).collect())).unwrap()
    }

    #[test]
    fn minkowski_below_two_forces_trivial_group() {
        // x³ − x − 1, disc −23: bound ≈ 1.357 < 2.
        let k = field([-1, -1, 0, 1]);
        let cg = class_group_small(&k, 100, 200_000).unwrap();
        assert_eq!(cg.h, 1);
        assert!(cg.invariant_factors.is_empty());
        assert!(cg.factor_base.is_empty());
        assert_eq!(cg.principality_tests, 0);
    }

    #[test]
    fn pure_cubic_twos_class_group_is_trivial() {
        // x³ − 2, field disc −108: bound ≈ 2.94, factor base over {2}.
        let k = field([-2, 0, 0, 1]);
        let cg = class_group_small(&k, 100, 500_000).unwrap();
        assert_eq!(cg.h, 1, "regression value");
        assert!(cg.invariant_factors.is_empty());
        assert!(cg.ideals_enumerated >= 2);
        assert!(cg.principality_tests > 0);
    }

    #[test]
    fn first_class_number_two_complex_cubic() {
        // x³ + 4x − 1, disc −283 (squarefree): the classical first complex
        // cubic with class number 2; regression value from published
        // tables of cubic fields.
        let k = field([-1, 4, 0, 1]);
        let cg = class_group_small(&k, 100, 2_000_000).unwrap();
        assert_eq!(cg.h, 2, "regression value");
        assert_eq!(cg.invariant_factors, vec![2]);

        // Consistency between the two methods: the certified order of any
        // non-principal factor-base prime must divide h.
        let order = crate::orders::maximal_order(&k, &Order::equation_order(3), &Budget::default())
            .unwrap();
        let unit = find_any_unit(&k, &order, 500_000).unwrap();
        let two = factor_prime(&k, &order, &big(2)).unwrap();
        let p2 = two.iter().find(|pr| pr.f == 1).unwrap();
        let first = units::is_principal(&k, &order, &p2.ideal, &unit, 2_000_000).unwrap();
        let sq = ideal_pow(&k, &order, &p2.ideal, 2).unwrap();
        let second = units::is_principal(&k, &order, &sq, &unit, 2_000_000).unwrap();
        let ord = if first.is_some() { 1 } else if second.is_some() { 2 } else { 0 };
        assert!(ord > 0, "order of [p2] must be 1 or 2 here");
        assert_eq!(cg.h % ord, 0);
    }

    #[test]
    fn totally_real_is_rejected_honestly() {
        // x³ − 3x − 1, disc 81 > 0.
        let k = field([-1, -3, 0, 1]);
        match class_group_small(&k, 100, 100_000) {
            Err(Error::Inconclusive(m)) => assert!(m.contains("totally real")),
            other => panic!("expected Inconclusive, got {other:?}"),
        }
    }

    #[test]
    fn divisibility_certificate_for_the_main_fixture() {
        let inst =
            build_instance(Params::new(big(-7), 3, 1, big(1)).unwrap()).unwrap();
        let cert = certify_instance(&inst, 5_000_000).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        assert!(cert.statement.contains("3 | h(K)"));
        assert_eq!(cert.b_norm, big(7));
        assert_eq!(cert.subtests.len(), 1);
        assert_eq!(cert.subtests[0].l, 3);
        assert_eq!(cert.subtests[0].exponent, 1);
        assert_eq!(cert.subtests[0].outcome, "non-principal");
        // Genus addendum: census complete for this fixture, below the
        // 6-prime threshold, so the guaranteed divisor is n itself.
        let g = cert.genus.as_ref().expect("census must be complete");
        assert_eq!(g.t, 0);
        assert_eq!(g.divisor, big(3));

        // Determinism: byte-identical JSON on a second run.
        let again = certify_instance(&inst, 5_000_000).unwrap();
        assert_eq!(
            serde_json::to_string(&cert).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn genus_report_counts_and_divisor() {
        let inst =
            build_instance(Params::new(big(-3), 3, 1, big(1)).unwrap()).unwrap();
        let g = genus_factor_report(&inst, &Budget::default()).unwrap();
        assert_eq!(g.t, g.count.saturating_sub(6) as u32);
        assert_eq!(
            g.divisor,
            Pow::pow(&big(3), u64::from(g.t)) * big(3)
        );
    }

    #[test]
    fn even_order_ideal_is_reported_without_verdict() {
        let inst =
            build_instance(Params::new(big(-7), 3, 1, big(1)).unwrap()).unwrap();
        let alpha = alpha_data(&inst).unwrap();
        let ev = even_order_evidence(&inst, &alpha).unwrap();
        assert_eq!(ev.hnf.len(), 6);
        assert!(ev.note.contains("no verdict") || ev.note.contains("not"));
        assert!(!ev.valuations.is_empty());
        // The ideal divides (√d): its norm is supported on p | d.
        let mut n = ev.norm.clone();
        for (p, _) in &inst.d_factors {
            while n.mod_floor(p).is_zero() {
                n /= p;
            }
        }
        assert_eq!(n.abs(), BigInt::one());
    }
}
