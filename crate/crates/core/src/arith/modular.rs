use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::poly::Poly;
use crate::error::{Error, Result};

/// Extended gcd: returns (g, x, y) with a*x + b*y = g >= 0.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// Inverse of a modulo m (m > 1), if gcd(a, m) = 1.
pub fn inv_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let (g, x, _) = ext_gcd(&a.mod_floor(m), m);
    if g.is_one() {
        Some(x.mod_floor(m))
    } else {
        None
    }
}

/// Chinese remainder theorem over (residue, modulus) pairs.  Moduli need not be
/// pairwise coprime: overlapping pairs are merged when consistent, and an
/// inconsistent overlap is an error.  Returns the canonical residue in
/// [0, lcm) together with the lcm of all moduli.
pub fn crt(pairs: &[(BigInt, BigInt)]) -> Result<(BigInt, BigInt)> {
    let mut r = BigInt::zero();
    let mut m = BigInt::one();
    for (ri, mi) in pairs {
        if mi < &BigInt::from(2) {
            return Err(Error::parameter(format!("crt modulus {mi} < 2")));
        }
        let ri = ri.mod_floor(mi);
        let g = m.gcd(mi);
        let diff = &ri - &r;
        let (q, rem) = diff.div_rem(&g);
        if !rem.is_zero() {
            return Err(Error::parameter(format!(
                "inconsistent congruences: x = {r} mod {m} vs x = {ri} mod {mi}"
            )));
        }
        let m_g = &m / &g;
        let mi_g = mi / &g;
        let inv = inv_mod(&m_g.mod_floor(&mi_g), &mi_g)
            .unwrap_or_else(BigInt::one); // mi_g == 1 case
        let t = (&q * &inv).mod_floor(&mi_g);
        r += &m * &t;
        m *= mi_g;
        r = r.mod_floor(&m);
    }
    Ok((r, m))
}

/// Is x an r-th power residue mod the odd prime q?  Requires gcd(x, q) = 1.
pub fn power_residue_test(x: &BigInt, r: &BigInt, q: &BigInt) -> Result<bool> {
    let xq = x.mod_floor(q);
    if xq.is_zero() {
        return Err(Error::parameter(format!("power residue test needs gcd(x, q) = 1, got x = 0 mod {q}")));
    }
    if r < &BigInt::one() {
        return Err(Error::parameter("power residue exponent must be >= 1"));
    }
    let qm1 = q - 1;
    let g = r.gcd(&qm1);
    Ok(xq.modpow(&(&qm1 / &g), q).is_one())
}

/// Solve z^ell = a mod q for prime ell, q odd prime, gcd(a, q) = 1.
/// Returns None when a is not an ell-th power residue.
fn prime_root_mod(a: &BigInt, ell: &BigInt, q: &BigInt) -> Option<BigInt> {
    let one = BigInt::one();
    let qm1 = q - &one;
    let a = a.mod_floor(q);
    if a.is_one() {
        return Some(one);
    }
    if !(&qm1 % ell).is_zero() {
        // Exponent invertible mod q-1: unique root.
        let inv = inv_mod(&ell.mod_floor(&qm1), &qm1)?;
        return Some(a.modpow(&inv, q));
    }
    // q - 1 = ell^e * s with ell not dividing s.
    let mut e = 0u32;
    let mut s = qm1.clone();
    while (&s % ell).is_zero() {
        s /= ell;
        e += 1;
    }
    if !a.modpow(&(&qm1 / ell), q).is_one() {
        return None;
    }
    // Generator of the ell-Sylow subgroup (deterministic scan).
    let mut rho = BigInt::from(2);
    let b = loop {
        if !rho.modpow(&(&qm1 / ell), q).is_one() {
            break rho.modpow(&s, q);
        }
        rho += 1;
    };
    // First approximation from the prime-to-ell part.
    let alpha = inv_mod(&ell.mod_floor(&s), &s).expect("ell invertible mod s");
    let x0 = a.modpow(&alpha, q);
    let a_inv = inv_mod(&a, q).expect("a invertible");
    let err = (x0.modpow(ell, q) * &a_inv) % q;
    // Discrete log of err in <b> (cyclic of order ell^e), base-ell digits.
    let zeta = b.modpow(&ell.pow(e - 1), q);
    let b_inv = inv_mod(&b, q).unwrap();
    let mut dlog = BigInt::zero();
    let mut ell_pow_i = BigInt::one();
    for i in 0..e {
        let reduced = (&err * b_inv.modpow(&dlog, q)) % q;
        let probe = reduced.modpow(&ell.pow(e - 1 - i), q);
        // probe = zeta^j for some j in 0..ell; linear scan (ell is small in practice).
        let mut j = BigInt::zero();
        let mut z = BigInt::one();
        while z != probe {
            z = (z * &zeta) % q;
            j += 1;
            if j >= *ell {
                return None; // err not in <b>: cannot happen for valid inputs
            }
        }
        dlog += &j * &ell_pow_i;
        ell_pow_i *= ell;
    }
    let (d_over_ell, rem) = dlog.div_rem(ell);
    if !rem.is_zero() {
        return None;
    }
    let root = (x0 * b_inv.modpow(&d_over_ell, q)) % q;
    debug_assert!(root.modpow(ell, q) == a);
    Some(root)
}

/// Solve z^r = x mod q for the odd prime q with gcd(x, q) = 1; r >= 1 arbitrary.
/// Returns Ok(None) when x is not an r-th power residue mod q.
pub fn rth_root_mod(x: &BigInt, r: &BigInt, q: &BigInt) -> Result<Option<BigInt>> {
    if r < &BigInt::one() {
        return Err(Error::parameter("rth_root_mod exponent must be >= 1"));
    }
    let x = x.mod_floor(q);
    if x.is_zero() {
        return Err(Error::parameter(format!("rth_root_mod needs gcd(x, q) = 1, got 0 mod {q}")));
    }
    let one = BigInt::one();
    let qm1 = q - &one;
    let r_red = r.mod_floor(&qm1);
    if r_red.is_zero() {
        // z^r = 1 for every unit z.
        return Ok(if x.is_one() { Some(one) } else { None });
    }
    let g = r_red.gcd(&qm1);
    if !x.modpow(&(&qm1 / &g), q).is_one() {
        return Ok(None);
    }
    // Solve w^g = x by peeling one prime of g at a time.  After each extraction
    // the candidate is steered back onto the residue locus for the remaining
    // exponent by multiplying with ell-th roots of unity.
    let mut g_primes: Vec<BigInt> = Vec::new();
    {
        let mut gg = g.clone();
        let mut p = BigInt::from(2);
        while &p * &p <= gg {
            while (&gg % &p).is_zero() {
                g_primes.push(p.clone());
                gg /= &p;
            }
            p += 1;
        }
        if gg > one {
            g_primes.push(gg);
        }
    }
    let mut value = x.clone();
    let mut remaining = g.clone();
    for ell in &g_primes {
        remaining /= ell;
        let root = prime_root_mod(&value, ell, q)
            .ok_or_else(|| Error::internal("residue test passed but prime root missing"))?;
        if remaining.is_one() {
            value = root;
            continue;
        }
        // Candidates differ by powers of an ell-th root of unity; at least one
        // is a `remaining`-th power residue.
        let qm1_over = &qm1 / qm1.gcd(&remaining);
        let mut cand = root.clone();
        let zeta = if (&qm1 % ell).is_zero() {
            let mut rho = BigInt::from(2);
            loop {
                if !rho.modpow(&(&qm1 / ell), q).is_one() {
                    break rho.modpow(&(&qm1 / ell), q);
                }
                rho += 1;
            }
        } else {
            one.clone()
        };
        let mut found = false;
        let mut k = BigInt::zero();
        while &k < ell {
            if cand.modpow(&qm1_over, q).is_one() {
                found = true;
                break;
            }
            cand = (&cand * &zeta) % q;
            k += 1;
        }
        if !found {
            return Err(Error::internal("no residue-compatible root candidate"));
        }
        value = cand;
    }
    // value^g = x; now absorb the unit part t = r/g of the exponent.
    let t = (&r_red / &g).mod_floor(&(&qm1 / &g));
    let t_inv = inv_mod(&t, &(&qm1 / &g))
        .ok_or_else(|| Error::internal("t not invertible mod (q-1)/g"))?;
    let z = value.modpow(&t_inv, q);
    if z.modpow(r, q) != x {
        return Err(Error::internal("rth_root_mod verification failed"));
    }
    Ok(Some(z))
}

// ---------------------------------------------------------------------------
// Dense polynomials over Z/p for root finding.

fn trim(v: &mut Vec<BigInt>) {
    while v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
}

fn p_rem(a: &[BigInt], b: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    // Remainder of a by b (b nonzero, monic-izable) mod p.
    let mut r: Vec<BigInt> = a.iter().map(|c| c.mod_floor(p)).collect();
    trim(&mut r);
    let mut bb: Vec<BigInt> = b.iter().map(|c| c.mod_floor(p)).collect();
    trim(&mut bb);
    let lead_inv = inv_mod(bb.last().unwrap(), p).expect("leading coeff invertible");
    while r.len() >= bb.len() && !bb.is_empty() {
        let shift = r.len() - bb.len();
        let scale = (r.last().unwrap() * &lead_inv).mod_floor(p);
        for i in 0..bb.len() {
            let v = (&r[shift + i] - &scale * &bb[i]).mod_floor(p);
            r[shift + i] = v;
        }
        trim(&mut r);
    }
    r
}

fn p_gcd(a: &[BigInt], b: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let mut x: Vec<BigInt> = a.iter().map(|c| c.mod_floor(p)).collect();
    let mut y: Vec<BigInt> = b.iter().map(|c| c.mod_floor(p)).collect();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = p_rem(&x, &y, p);
        x = y;
        y = r;
    }
    // Normalize monic.
    if let Some(l) = x.last().cloned() {
        let li = inv_mod(&l, p).unwrap();
        for c in &mut x {
            *c = (&*c * &li).mod_floor(p);
        }
    }
    x
}

fn p_mulmod(a: &[BigInt], b: &[BigInt], m: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut prod = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            prod[i + j] = (&prod[i + j] + ai * bj).mod_floor(p);
        }
    }
    p_rem(&prod, m, p)
}

/// x^e mod (m, p) by square and multiply.
fn p_powmod_x(e: &BigInt, m: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    p_powmod(&[BigInt::zero(), BigInt::one()], e, m, p)
}

fn p_powmod(base: &[BigInt], e: &BigInt, m: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let mut result = p_rem(&[BigInt::one()], m, p);
    let mut base = p_rem(base, m, p);
    let bits = e.bits();
    for i in 0..bits {
        if e.bit(i) {
            result = p_mulmod(&result, &base, m, p);
        }
        if i + 1 < bits {
            base = p_mulmod(&base, &base, m, p);
        }
    }
    result
}

/// All roots of f mod the prime p, ascending, with multiplicities.
/// f must not vanish identically mod p.
pub fn roots_mod_p(f: &Poly<BigInt>, p: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    let coeffs: Vec<BigInt> = f.coeffs().iter().map(|c| c.mod_floor(p)).collect();
    let mut red = coeffs.clone();
    trim(&mut red);
    if red.is_empty() {
        return Err(Error::parameter("polynomial vanishes identically mod p"));
    }
    let mut roots: Vec<BigInt> = Vec::new();
    if p < &BigInt::from(10_000) {
        // Exhaustive scan.
        let pu = p.to_u64().unwrap();
        for x in 0..pu {
            let xb = BigInt::from(x);
            let mut acc = BigInt::zero();
            for c in red.iter().rev() {
                acc = (acc * &xb + c).mod_floor(p);
            }
            if acc.is_zero() {
                roots.push(xb);
            }
        }
    } else {
        // gcd with x^p - x isolates the distinct linear factors.
        let xp = p_powmod_x(p, &red, p);
        let mut xp_minus_x = xp;
        while xp_minus_x.len() < 2 {
            xp_minus_x.push(BigInt::zero());
        }
        xp_minus_x[1] = (&xp_minus_x[1] - BigInt::one()).mod_floor(p);
        trim(&mut xp_minus_x);
        let lin = p_gcd(&xp_minus_x, &red, p);
        // Split the product of distinct linears with deterministic shifts.
        let mut stack = vec![lin];
        let half = (p - 1) / 2;
        while let Some(g) = stack.pop() {
            let deg = g.len().saturating_sub(1);
            if deg == 0 {
                continue;
            }
            if deg == 1 {
                // g = x + c (monic): root = -c.
                roots.push((-&g[0]).mod_floor(p));
                continue;
            }
            let mut c = BigInt::zero();
            loop {
                // w = (x + c)^((p-1)/2) - 1 mod g
                let base = vec![c.mod_floor(p), BigInt::one()];
                let mut w = p_powmod(&base, &half, &g, p);
                if w.is_empty() {
                    w.push(BigInt::zero());
                }
                w[0] = (&w[0] - BigInt::one()).mod_floor(p);
                trim(&mut w);
                let h = p_gcd(&w, &g, p);
                let dh = h.len().saturating_sub(1);
                if dh > 0 && dh < deg {
                    let q = p_divide_exact(&g, &h, p);
                    stack.push(h);
                    stack.push(q);
                    break;
                }
                c += 1;
                if c >= *p {
                    return Err(Error::internal("splitting shifts exhausted"));
                }
            }
        }
    }
    roots.sort();
    // Multiplicities by repeated synthetic division.
    let mut out = Vec::with_capacity(roots.len());
    for r in roots {
        let mut mult = 0u32;
        let mut cur = red.clone();
        while cur.len() > 1 {
            let (quo, rem) = synth_div(&cur, &r, p);
            if rem.is_zero() {
                mult += 1;
                cur = quo;
            } else {
                break;
            }
        }
        out.push((r, mult));
    }
    Ok(out)
}

/// Divide `cur` (ascending coefficients, mod p) by (x - r); returns (quotient, remainder).
fn synth_div(cur: &[BigInt], r: &BigInt, p: &BigInt) -> (Vec<BigInt>, BigInt) {
    let n = cur.len() - 1;
    let mut quo = vec![BigInt::zero(); n];
    let mut carry = cur[n].clone();
    for i in (1..=n).rev() {
        quo[i - 1] = carry.clone();
        carry = (&cur[i - 1] + r * &carry).mod_floor(p);
    }
    (quo, carry)
}

fn p_divide_exact(a: &[BigInt], b: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    // Exact quotient a / b mod p (remainder must vanish).
    let mut r: Vec<BigInt> = a.iter().map(|c| c.mod_floor(p)).collect();
    trim(&mut r);
    let mut bb: Vec<BigInt> = b.iter().map(|c| c.mod_floor(p)).collect();
    trim(&mut bb);
    let lead_inv = inv_mod(bb.last().unwrap(), p).unwrap();
    let mut q = vec![BigInt::zero(); r.len() + 1 - bb.len()];
    while r.len() >= bb.len() {
        let shift = r.len() - bb.len();
        let scale = (r.last().unwrap() * &lead_inv).mod_floor(p);
        q[shift] = scale.clone();
        for i in 0..bb.len() {
            let v = (&r[shift + i] - &scale * &bb[i]).mod_floor(p);
            r[shift + i] = v;
        }
        trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    assert!(r.is_empty(), "division not exact");
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn crt_examples() {
        // Values cross-checked by the exhaustive oracle below.
        assert_eq!(crt(&[(b(1), b(3)), (b(2), b(5))]).unwrap(), (b(7), b(15)));
        assert_eq!(
            crt(&[(b(2), b(7)), (b(3), b(11)), (b(5), b(13))]).unwrap(),
            (b(135), b(1001))
        );
        // Non-coprime but consistent.
        assert_eq!(crt(&[(b(3), b(4)), (b(1), b(6))]).unwrap(), (b(7), b(12)));
        // Non-coprime and inconsistent.
        assert!(crt(&[(b(0), b(4)), (b(1), b(6))]).is_err());
    }

    #[test]
    fn crt_exhaustive_oracle() {
        // Every crt answer is verified against direct scanning for small moduli.
        let cases: Vec<Vec<(i64, i64)>> = vec![
            vec![(1, 3), (2, 5)],
            vec![(2, 7), (3, 11), (5, 13)],
            vec![(0, 2), (3, 9), (4, 5)],
            vec![(5, 8), (1, 3), (2, 7)],
        ];
        for case in cases {
            let pairs: Vec<_> = case.iter().map(|(r, m)| (b(*r), b(*m))).collect();
            let (x, m) = crt(&pairs).unwrap();
            let mut expect = None;
            let m_i = m.to_string().parse::<i64>().unwrap();
            'scan: for cand in 0..m_i {
                for (r, md) in &case {
                    if cand % md != r % md {
                        continue 'scan;
                    }
                }
                expect = Some(cand);
                break;
            }
            assert_eq!(x, b(expect.expect("solution exists")));
        }
    }

    #[test]
    fn power_residue_brute_force() {
        // Oracle: direct scan of all r-th powers, for every odd prime q < 200
        // and r <= 12.
        for q in crate::arith::sieve::primes_below(200) {
            if q == 2 {
                continue;
            }
            for r in 1i64..=12 {
                let mut residues = std::collections::HashSet::new();
                for z in 1..q {
                    let mut acc = 1u64;
                    for _ in 0..r {
                        acc = acc * z % q;
                    }
                    residues.insert(acc);
                }
                for x in 1..q {
                    let got = power_residue_test(&b(x as i64), &b(r), &b(q as i64)).unwrap();
                    assert_eq!(got, residues.contains(&x), "q={q} r={r} x={x}");
                }
            }
        }
    }

    #[test]
    fn power_residue_fixture() {
        assert!(!power_residue_test(&b(3), &b(6), &b(13)).unwrap());
        assert!(power_residue_test(&b(1), &b(6), &b(13)).unwrap());
        assert!(power_residue_test(&b(12), &b(6), &b(13)).unwrap());
    }

    #[test]
    fn rth_root_examples() {
        let r = rth_root_mod(&b(4), &b(2), &b(7)).unwrap().unwrap();
        assert!(r == b(2) || r == b(5));
        assert_eq!(rth_root_mod(&b(3), &b(6), &b(13)).unwrap(), None);
    }

    #[test]
    fn rth_root_brute_force() {
        // For q < 120, r <= 16: compare against exhaustive enumeration.
        for q in crate::arith::sieve::primes_below(120) {
            if q == 2 {
                continue;
            }
            for r in 1u64..=16 {
                for x in 1..q {
                    let got = rth_root_mod(&b(x as i64), &b(r as i64), &b(q as i64)).unwrap();
                    let mut any = None;
                    for z in 1..q {
                        let mut acc = 1u64;
                        for _ in 0..r {
                            acc = acc * z % q;
                        }
                        if acc == x {
                            any = Some(z);
                            break;
                        }
                    }
                    match (got, any) {
                        (Some(z), Some(_)) => {
                            let z = z.to_string().parse::<u64>().unwrap();
                            let mut acc = 1u64;
                            for _ in 0..r {
                                acc = acc * z % q;
                            }
                            assert_eq!(acc, x, "bad root q={q} r={r} x={x}");
                        }
                        (None, None) => {}
                        (a, e) => panic!("q={q} r={r} x={x}: got {a:?}, expected solvable={}", e.is_some()),
                    }
                }
            }
        }
    }

    #[test]
    fn roots_mod_p_examples() {
        // x^3 - x mod 5 has roots 0, 1, 4.
        let f = Poly::from_int_vec(vec![0, -1, 0, 1]);
        let roots = roots_mod_p(&f, &b(5)).unwrap();
        assert_eq!(roots, vec![(b(0), 1), (b(1), 1), (b(4), 1)]);

        // (x - 3)^2 (x - 1) mod 7: multiplicity reporting.
        let g = Poly::from_int_vec(vec![-9, 15, -7, 1]);
        let roots = roots_mod_p(&g, &b(7)).unwrap();
        assert_eq!(roots, vec![(b(1), 1), (b(3), 2)]);
    }

    #[test]
    fn roots_mod_p_matches_exhaustive_large() {
        // The gcd/split path (p >= 10^4) agrees with direct evaluation.
        let p = b(10_007);
        for (c0, c1, c2) in [(3i64, 5, 7), (-1, 0, 0), (100, -50, 2), (9999, 123, -456)] {
            let f = Poly::from_int_vec(vec![c0, c1, c2, 1]);
            let got = roots_mod_p(&f, &p).unwrap();
            let mut expect = vec![];
            for x in 0..10_007i64 {
                let v = ((x * x % 10_007 * x + c2 * x % 10_007 * x + c1 * x + c0) % 10_007 + 10_007) % 10_007;
                if v == 0 {
                    expect.push(b(x));
                }
            }
            let got_roots: Vec<BigInt> = got.iter().map(|(r, _)| r.clone()).collect();
            assert_eq!(got_roots, expect, "f with c=({c0},{c1},{c2})");
        }
    }
}
