//! Certified unit and principality computations in a complex cubic field.
//!
//! The unit group of an order in a complex cubic field is `{±1} × <eta0>`
//! for a fundamental unit `eta0`. Everything this module certifies reduces
//! to a *finite, exact* search: integer vectors of bounded trace form
//!
//! ```text
//! T2(x) = x(r)^2 + 2|x(z)|^2    (r the real, z a complex embedding)
//! ```
//!
//! are enumerated by an exact rational Fincke-Pohst walk. The Gram matrix
//! of T2 is only known through interval enclosures, so the enumeration is
//! run on the rational midpoint matrix with the bound *inflated* by a
//! factor that provably absorbs the enclosure error (see [`t2_form`]).
//! Candidates are then screened by exact algebraic predicates (norms,
//! ideal equality), never by floating point, so a failed search is a
//! proof of nonexistence and a successful one returns a checkable witness.
//!
//! Key facts used, all elementary:
//!
//! * for a unit `xi`, `|xi(r)| * |xi(z)|^2 = 1`, so with
//!   `t = max(|xi(r)|, |xi(r)|^-1)` one has `T2(xi) <= t^2 + 2` and, when
//!   `t <= sqrt(rho)`, `T2(xi) <= rho + 2`;
//! * if `eta = ±eta0^k` with `k >= 2` then `t(eta0) = t(eta)^(1/k) <=
//!   sqrt(t(eta))`, so an enumeration up to `t(eta) + 2` finds a strictly
//!   smaller unit whenever `eta` is not already fundamental;
//! * a generator of a principal ideal `I` can be multiplied by a power of
//!   any unit `eta` so that its real embedding lands within a factor
//!   `t(eta)^(1/2)` of `N(I)^(1/3)`, giving `T2 <= N(I)^(2/3)(t(eta)+2)`.

use crate::cubic::{CubicField, KElt};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::orders::{ideal_from_element, Ideal, Order};
use crate::{start_precision, MAX_PRECISION};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn rat_int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Floor of the square root of a nonnegative rational.
fn rat_sqrt_floor(x: &BigRational) -> BigInt {
    assert!(!x.is_negative(), "sqrt of negative rational");
    // floor(sqrt(p/q)) = floor(isqrt(p*q) / q)
    let pq = x.numer() * x.denom();
    pq.sqrt().div_floor(x.denom())
}

/// Smallest integer >= n^(2/3) for n >= 1.
fn ceil_pow_two_thirds(n: &BigInt) -> BigInt {
    assert!(n.is_positive());
    let sq = n * n;
    let mut r = sq.cbrt();
    if &r * &r * &r < sq {
        r += 1;
    }
    r
}

/// Exact rational trace-form data for a rank-3 lattice, ready for
/// enumeration: a positive-definite rational midpoint matrix `q` plus an
/// `inflation >= 1` such that every x in the lattice with true trace form
/// `T2(x) <= c` satisfies `v^T q v <= c * inflation` for its coordinate
/// vector v. (Proof: entrywise |q - G| <= eps gives
/// |v^T q v - T2| <= eps (sum|v_i|)^2 <= 3 eps |v|^2, and
/// |v|^2 <= s * v^T q v where s bounds the row sums of |q^-1| and hence
/// lambda_max(q^-1); so T2 >= (1 - 3 eps s) v^T q v.)
#[derive(Debug, Clone)]
pub struct T2Form {
    pub q: [[BigRational; 3]; 3],
    pub inflation: BigRational,
}

/// Build the trace-form data for the lattice spanned by `basis`,
/// escalating working precision until the enclosure error is provably
/// negligible (inflation <= 2).
pub fn t2_form(k: &CubicField, basis: &[KElt; 3], prec: u32) -> Result<T2Form> {
    let mut bits = prec.max(start_precision());
    loop {
        match t2_form_at(k, basis, bits) {
            Ok(f) => return Ok(f),
            Err(Error::PrecisionExhausted { .. }) if bits < MAX_PRECISION => bits *= 2,
            Err(e) => return Err(e),
        }
    }
}

fn t2_form_at(k: &CubicField, basis: &[KElt; 3], bits: u32) -> Result<T2Form> {
    let (r, z) = k.embeddings(bits)?;
    let wr: Vec<Interval> = basis.iter().map(|b| k.embed_real(b, &r)).collect();
    let wz: Vec<_> = basis.iter().map(|b| k.embed_complex(b, &z)).collect();

    let mut q: [[BigRational; 3]; 3] = Default::default();
    let mut eps = BigRational::zero();
    for i in 0..3 {
        for j in i..3 {
            // G_ij = w_i(r) w_j(r) + 2 Re(w_i(z) conj(w_j(z)))
            let re_part = wz[i].re.mul(&wz[j].re).add(&wz[i].im.mul(&wz[j].im));
            let g = wr[i].mul(&wr[j]).add(&re_part.scale(&rat_int(2)));
            let half = g.width() / rat_int(2);
            if half > eps {
                eps = half;
            }
            q[i][j] = g.mid();
            q[j][i] = q[i][j].clone();
        }
    }

    // Positive definiteness of the midpoint (pivots of LDL^T positive).
    let too_wide = Err(Error::PrecisionExhausted {
        bits,
        context: "trace-form enclosure too wide".into(),
    });
    let Some(_) = ldl3(&q) else {
        return too_wide;
    };
    // Row-sum bound on |q^-1| dominates lambda_max(q^-1).
    let qinv = match inv3(&q) {
        Some(m) => m,
        None => return too_wide,
    };
    let mut s = BigRational::zero();
    for row in &qinv {
        let sum: BigRational = row.iter().map(|e| e.abs()).sum();
        if sum > s {
            s = sum;
        }
    }
    let slack = rat_int(3) * &eps * &s;
    // Demand inflation <= 2, i.e. 3 eps s <= 1/2.
    if slack > BigRational::new(BigInt::one(), BigInt::from(2)) {
        return too_wide;
    }
    let inflation = (rat_int(1) - slack).recip();
    Ok(T2Form { q, inflation })
}

/// LDL^T with unit upper-triangular factor: Q = U^T diag(d) U, so
/// v^T Q v = sum_i d_i (v_i + sum_{j>i} u[i][j] v_j)^2. Returns None
/// unless all pivots are positive.
fn ldl3(q: &[[BigRational; 3]; 3]) -> Option<([BigRational; 3], [[BigRational; 3]; 3])> {
    let mut d: [BigRational; 3] = Default::default();
    let mut u: [[BigRational; 3]; 3] = Default::default();
    for i in 0..3 {
        u[i][i] = BigRational::one();
        let mut pivot = q[i][i].clone();
        for k in 0..i {
            pivot -= &d[k] * &u[k][i] * &u[k][i];
        }
        if !pivot.is_positive() {
            return None;
        }
        for j in (i + 1)..3 {
            let mut v = q[i][j].clone();
            for k in 0..i {
                v -= &d[k] * &u[k][i] * &u[k][j];
            }
            u[i][j] = v / &pivot;
        }
        d[i] = pivot;
    }
    Some((d, u))
}

/// Inverse of a 3x3 rational matrix via the adjugate; None if singular.
fn inv3(q: &[[BigRational; 3]; 3]) -> Option<[[BigRational; 3]; 3]> {
    let det = &q[0][0] * (&q[1][1] * &q[2][2] - &q[1][2] * &q[2][1])
        - &q[0][1] * (&q[1][0] * &q[2][2] - &q[1][2] * &q[2][0])
        + &q[0][2] * (&q[1][0] * &q[2][1] - &q[1][1] * &q[2][0]);
    if det.is_zero() {
        return None;
    }
    let mut inv: [[BigRational; 3]; 3] = Default::default();
    for i in 0..3 {
        for j in 0..3 {
            let (a, b, c, e) = (
                &q[(j + 1) % 3][(i + 1) % 3],
                &q[(j + 2) % 3][(i + 2) % 3],
                &q[(j + 1) % 3][(i + 2) % 3],
                &q[(j + 2) % 3][(i + 1) % 3],
            );
            inv[i][j] = (a * b - c * e) / &det;
        }
    }
    Some(inv)
}

/// All nonzero integer vectors v (up to sign: exactly one of {v, -v} is
/// reported) with v^T q v <= c, for positive-definite rational q. Every
/// candidate is tested against the exact inequality, so the result is
/// both complete and sound. Errors with `BoundExhausted` if more than
/// `max_points` loop steps would be needed.
pub fn enumerate_form(
    q: &[[BigRational; 3]; 3],
    c: &BigRational,
    max_points: u64,
) -> Result<Vec<[BigInt; 3]>> {
    let (d, u) = ldl3(q).ok_or_else(|| Error::internal("trace form not positive definite"))?;
    let mut out = Vec::new();
    if c.is_negative() {
        return Ok(out);
    }
    let mut steps: u64 = 0;
    let budget = |steps: &mut u64| -> Result<()> {
        *steps += 1;
        if *steps > max_points {
            Err(Error::BoundExhausted(format!(
                "trace-form enumeration exceeded {max_points} steps"
            )))
        } else {
            Ok(())
        }
    };

    // Level 2: d2 * v2^2 <= c, take v2 >= 0 (sign canonicalization).
    let t2 = rat_sqrt_floor(&(c / &d[2]));
    let mut v2 = BigInt::zero();
    while v2 <= t2 {
        budget(&mut steps)?;
        let r2 = c - &d[2] * BigRational::from_integer(&v2 * &v2);
        if !r2.is_negative() {
            // Level 1: d1 (v1 + u12 v2)^2 <= r2.
            let c1 = -(&u[1][2] * BigRational::from_integer(v2.clone()));
            let s1 = rat_sqrt_floor(&(&r2 / &d[1])) + BigInt::one();
            let lo1 = if v2.is_zero() {
                BigInt::zero()
            } else {
                (&c1 - BigRational::from_integer(s1.clone())).ceil().to_integer()
            };
            let hi1 = (&c1 + BigRational::from_integer(s1)).floor().to_integer();
            let mut v1 = lo1;
            while v1 <= hi1 {
                budget(&mut steps)?;
                let off1 = BigRational::from_integer(v1.clone()) - &c1;
                let r1 = &r2 - &d[1] * &off1 * &off1;
                if !r1.is_negative() {
                    // Level 0: d0 (v0 + u01 v1 + u02 v2)^2 <= r1.
                    let c0 = -(&u[0][1] * BigRational::from_integer(v1.clone())
                        + &u[0][2] * BigRational::from_integer(v2.clone()));
                    let s0 = rat_sqrt_floor(&(&r1 / &d[0])) + BigInt::one();
                    let lo0 = if v2.is_zero() && v1.is_zero() {
                        BigInt::one()
                    } else {
                        (&c0 - BigRational::from_integer(s0.clone())).ceil().to_integer()
                    };
                    let hi0 = (&c0 + BigRational::from_integer(s0)).floor().to_integer();
                    let mut v0 = lo0;
                    while v0 <= hi0 {
                        budget(&mut steps)?;
                        let off0 = BigRational::from_integer(v0.clone()) - &c0;
                        if (&r1 - &d[0] * &off0 * &off0) >= BigRational::zero() {
                            out.push([v0.clone(), v1.clone(), v2.clone()]);
                        }
                        v0 += 1;
                    }
                }
                v1 += 1;
            }
        }
        v2 += 1;
    }
    Ok(out)
}

/// The field element sum_i v_i * basis_i.
pub(crate) fn lattice_elt(basis: &[KElt; 3], v: &[BigInt; 3]) -> KElt {
    let mut x = KElt::from_int(0);
    for i in 0..3 {
        x = x.add(&basis[i].scale(&BigRational::from_integer(v[i].clone())));
    }
    x
}

/// Rows of an order (or of an ideal inside it) as field elements.
pub(crate) fn order_basis(k_dim_check: usize, order: &Order) -> [KElt; 3] {
    assert_eq!(k_dim_check, 3);
    let mut b: Vec<KElt> = Vec::with_capacity(3);
    for row in &order.basis {
        let a = order_row_elt(order, row);
        b.push(a);
    }
    [b[0].clone(), b[1].clone(), b[2].clone()]
}

fn order_row_elt(order: &Order, row: &[BigInt]) -> KElt {
    let den = BigRational::from_integer(order.den.clone());
    KElt::new(
        BigRational::from_integer(row[0].clone()) / &den,
        BigRational::from_integer(row[1].clone()) / &den,
        BigRational::from_integer(row[2].clone()) / &den,
    )
}

fn ideal_basis_elts(order: &Order, ideal: &Ideal) -> [KElt; 3] {
    let mut b: Vec<KElt> = Vec::with_capacity(3);
    for row in &ideal.basis {
        // Ideal coordinates are in the order basis.
        let alg = order.to_alg(row);
        b.push(KElt::new(alg[0].clone(), alg[1].clone(), alg[2].clone()));
    }
    [b[0].clone(), b[1].clone(), b[2].clone()]
}

/// Replace a lattice basis by an LLL-reduced basis of the same lattice.
///
/// Reduction decisions run on a fixed-precision rational snapshot of the
/// trace form, so they cannot affect soundness: the output differs from
/// the input by a unimodular integer transform, hence spans the same
/// lattice, and every certified computation downstream builds exact
/// enclosures from the new basis. A poor snapshot can only yield a less
/// reduced basis. Raw HNF bases are extremely skew when the field
/// discriminant is large, which makes ellipsoid enumeration visit far
/// more tree nodes than there are lattice points; this pass removes the
/// skew.
pub(crate) fn reduce_basis(k: &CubicField, basis: &[KElt; 3]) -> [KElt; 3] {
    let Some(g) = snapshot_gram(k, basis) else {
        return basis.clone();
    };
    let u = lll3(g);
    let row = |i: usize| lattice_elt(basis, &u[i]);
    [row(0), row(1), row(2)]
}

/// Rational positive-semidefinite snapshot of the trace form Gram matrix
/// of `basis`: the exact Gram of the embedding vectors
/// (w(r), sqrt2 Re w(z), sqrt2 Im w(z)) with coordinates replaced by
/// interval midpoints rounded to 32 fractional bits.
fn snapshot_gram(k: &CubicField, basis: &[KElt; 3]) -> Option<[[BigRational; 3]; 3]> {
    let (r, z) = k.embeddings(160).ok()?;
    let den: BigInt = BigInt::one() << 32;
    let snap = |iv: Interval| -> BigRational {
        let scaled = iv.mid() * BigRational::from_integer(den.clone());
        BigRational::new(scaled.round().to_integer(), den.clone())
    };
    let mut wr = Vec::with_capacity(3);
    let mut wre = Vec::with_capacity(3);
    let mut wim = Vec::with_capacity(3);
    for b in basis {
        wr.push(snap(k.embed_real(b, &r)));
        let c = k.embed_complex(b, &z);
        wre.push(snap(c.re));
        wim.push(snap(c.im));
    }
    let mut g: [[BigRational; 3]; 3] = Default::default();
    for i in 0..3 {
        for j in i..3 {
            let e = &wr[i] * &wr[j] + rat_int(2) * (&wre[i] * &wre[j] + &wim[i] * &wim[j]);
            g[i][j] = e.clone();
            g[j][i] = e;
        }
    }
    Some(g)
}

/// LLL (delta = 3/4) on a positive-semidefinite rational Gram matrix.
/// Returns the unimodular transform U with G_reduced = U G U^T. Exiting
/// at any stage (degenerate pivot, fuel) is sound because U stays
/// unimodular throughout.
fn lll3(mut g: [[BigRational; 3]; 3]) -> [[BigInt; 3]; 3] {
    let mut u = [
        [BigInt::one(), BigInt::zero(), BigInt::zero()],
        [BigInt::zero(), BigInt::one(), BigInt::zero()],
        [BigInt::zero(), BigInt::zero(), BigInt::one()],
    ];
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let mut kk = 1usize;
    let mut fuel = 10_000u32;
    while kk < 3 && fuel > 0 {
        fuel -= 1;
        // Gram-Schmidt data of the current rows: with G = L diag(d) L^T
        // for unit lower-triangular L, the projection coefficient
        // mu_{i,j} = L[i][j] equals ldl3's upper factor transposed.
        let Some((d, mu)) = ldl3(&g) else { break };
        let mut reduced = false;
        for j in (0..kk).rev() {
            let q = mu[j][kk].round().to_integer();
            if q.is_zero() {
                continue;
            }
            let qr = BigRational::from_integer(q.clone());
            for c in 0..3 {
                g[kk][c] = &g[kk][c] - &qr * &g[j][c];
            }
            for row in 0..3 {
                g[row][kk] = &g[row][kk] - &qr * &g[row][j];
            }
            for c in 0..3 {
                u[kk][c] = &u[kk][c] - &q * &u[j][c];
            }
            reduced = true;
        }
        if reduced {
            // Recompute Gram-Schmidt before testing the swap condition;
            // stale coefficients settle within a bounded number of sweeps.
            continue;
        }
        let m = &mu[kk - 1][kk];
        if d[kk] >= (&delta - m * m) * &d[kk - 1] {
            kk += 1;
        } else {
            g.swap(kk, kk - 1);
            for row in g.iter_mut() {
                row.swap(kk, kk - 1);
            }
            u.swap(kk, kk - 1);
            kk = 1.max(kk - 1);
        }
    }
    u
}

/// |N(x)| = 1, the exact unit test for order elements.
pub fn is_unit(k: &CubicField, x: &KElt) -> bool {
    k.norm(x).abs().is_one()
}

fn is_pm_one(x: &KElt) -> bool {
    x.is_rational() && x.c[0].abs().is_one()
}

/// Enclosure of t(eta) = max(|eta(r)|, |eta(r)|^-1) >= 1 for a nonzero
/// element. Always valid; width shrinks with `prec`.
pub fn unit_rho(k: &CubicField, eta: &KElt, prec: u32) -> Result<Interval> {
    let mut bits = prec.max(start_precision());
    loop {
        let (r, _) = k.embeddings(bits)?;
        let a = k.embed_real(eta, &r).abs();
        if a.lo.is_positive() {
            let one = BigRational::one();
            if a.lo >= one {
                return Ok(a);
            }
            if a.hi <= one {
                return a.recip();
            }
            // Straddles 1: max(t, 1/t) lies in [1, max(hi, 1/lo)].
            let upper = std::cmp::max(a.hi.clone(), a.lo.recip());
            return Ok(Interval::new(one, upper));
        }
        if bits >= MAX_PRECISION {
            return Err(Error::PrecisionExhausted {
                bits,
                context: "real embedding of unit not separated from zero".into(),
            });
        }
        bits *= 2;
    }
}

/// Decide t(a) < t(b) for units a, b with t(a) != t(b)
/// (callers must rule out a = ±b^{±1} first, which forces equality).
fn t_less(k: &CubicField, a: &KElt, b: &KElt) -> Result<bool> {
    let mut bits = start_precision();
    loop {
        let ta = unit_rho(k, a, bits)?;
        let tb = unit_rho(k, b, bits)?;
        if ta.hi < tb.lo {
            return Ok(true);
        }
        if tb.hi < ta.lo {
            return Ok(false);
        }
        if bits >= MAX_PRECISION {
            return Err(Error::PrecisionExhausted {
                bits,
                context: "unit sizes not separable".into(),
            });
        }
        bits *= 2;
    }
}

/// A certified fundamental unit together with a regulator enclosure.
#[derive(Debug, Clone)]
pub struct UnitInfo {
    /// Generator of the free part of the unit group, normalized so that
    /// |eta(r)| > 1.
    pub eta: KElt,
    /// Enclosure of ln|eta(r)| (the regulator of the order).
    pub regulator: Interval,
}

/// Certify a fundamental unit of `order`, starting from any known unit
/// `initial != ±1` of the order.
///
/// Each round enumerates the trace form up to t(eta) + 2. If eta were
/// eta0^k with k >= 2 the fundamental unit itself satisfies
/// t(eta0) <= sqrt(t(eta)), hence T2(eta0) <= t(eta) + 2, so the search
/// would find a unit strictly smaller than eta; replacing eta drops its
/// exponent over eta0, which terminates. An empty round is therefore a
/// proof that eta is fundamental.
pub fn fundamental_unit(
    k: &CubicField,
    order: &Order,
    initial: &KElt,
    max_points: u64,
) -> Result<UnitInfo> {
    if !order.contains(&initial.c) {
        return Err(Error::parameter("initial unit does not lie in the order"));
    }
    if !is_unit(k, initial) || is_pm_one(initial) {
        return Err(Error::parameter("initial element is not a unit != ±1"));
    }
    let basis = reduce_basis(k, &order_basis(3, order));
    let form = t2_form(k, &basis, start_precision())?;

    let mut eta = initial.clone();
    loop {
        let rho = unit_rho(k, &eta, start_precision())?;
        let bound = (&rho.hi + rat_int(2)) * &form.inflation;
        let cands = enumerate_form(&form.q, &bound, max_points)?;

        let eta_inv = k.inv(&eta)?;
        let mut best: Option<KElt> = None;
        for v in &cands {
            let x = lattice_elt(&basis, v);
            if !is_unit(k, &x) || is_pm_one(&x) {
                continue;
            }
            // Equal size exactly when x = ±eta^{±1}.
            if x == eta || x == eta.neg() || x == eta_inv || x == eta_inv.neg() {
                continue;
            }
            if !t_less(k, &x, &eta)? {
                continue;
            }
            best = match best {
                None => Some(x),
                Some(b) => {
                    // Enumeration reports one sign only, so distinct
                    // candidates of equal size must be inverses.
                    if x == b || x == k.inv(&b)? || x.neg() == b || x.neg() == k.inv(&b)? {
                        Some(b)
                    } else if t_less(k, &x, &b)? {
                        Some(x)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        match best {
            Some(x) => eta = x,
            None => break,
        }
    }

    // Normalize to |eta(r)| > 1 (replace by the inverse if needed; the
    // inverse of a unit of the order lies in the order).
    let mut bits = start_precision();
    loop {
        let (r, _) = k.embeddings(bits)?;
        let a = k.embed_real(&eta, &r).abs();
        if a.lo > BigRational::one() {
            break;
        }
        if a.hi < BigRational::one() {
            eta = k.inv(&eta)?;
            assert!(order.contains(&eta.c), "unit inverse must stay in the order");
            break;
        }
        if bits >= MAX_PRECISION {
            return Err(Error::PrecisionExhausted {
                bits,
                context: "cannot orient fundamental unit".into(),
            });
        }
        bits *= 2;
    }

    let regulator = regulator_real(k, &eta, start_precision())?;
    Ok(UnitInfo { eta, regulator })
}

/// Enclosure of |ln|eta(r)|| for a unit eta != ±1.
pub fn regulator_real(k: &CubicField, eta: &KElt, prec: u32) -> Result<Interval> {
    let mut bits = prec.max(start_precision());
    loop {
        let rho = unit_rho(k, eta, bits)?;
        if rho.lo > BigRational::one() {
            return rho.ln(bits);
        }
        if bits >= MAX_PRECISION {
            return Err(Error::PrecisionExhausted {
                bits,
                context: "regulator of a unit too close to 1".into(),
            });
        }
        bits *= 2;
    }
}

/// Decide whether the O-ideal `ideal` is principal. `eta` must be a unit
/// of `order` different from ±1; it need not be fundamental (a larger
/// unit only enlarges the certified search region). On success returns a
/// generator; `None` is a certified proof of non-principality.
///
/// Soundness: if I = (x), multiplying x by a power of eta places
/// |x(r)| within [N^(1/3) t^(-1/2), N^(1/3) t^(1/2)] for t = t(eta),
/// where N = N(I) = |N(x)|; then T2(x) <= N^(2/3) (t + 2). Every lattice
/// point of I in that (inflated) ellipsoid is tested by the exact
/// predicate |N(x)| = N(I), which for x in I is equivalent to (x) = I.
pub fn is_principal(
    k: &CubicField,
    order: &Order,
    ideal: &Ideal,
    eta: &KElt,
    max_points: u64,
) -> Result<Option<KElt>> {
    if !is_unit(k, eta) || is_pm_one(eta) {
        return Err(Error::parameter("reduction element is not a unit != ±1"));
    }
    let nrm = ideal.norm();
    if nrm.is_zero() {
        return Err(Error::parameter("ideal basis is singular"));
    }
    let basis = reduce_basis(k, &ideal_basis_elts(order, ideal));
    let form = t2_form(k, &basis, start_precision())?;
    let rho = unit_rho(k, eta, start_precision())?;
    let n23 = ceil_pow_two_thirds(&nrm);
    let c = BigRational::from_integer(n23) * (&rho.hi + rat_int(2)) * &form.inflation;

    let cands = enumerate_form(&form.q, &c, max_points)?;
    let target = BigRational::from_integer(nrm);
    for v in &cands {
        let x = lattice_elt(&basis, v);
        if k.norm(&x).abs() != target {
            continue;
        }
        // x lies in I and |N(x)| = [O : xO] = N(I), so (x) = I; verify the
        // lattice equality anyway and hand back a checked witness.
        let xo = order
            .coords(&x.c)
            .ok_or_else(|| Error::internal("ideal element not in order"))?;
        let px = ideal_from_element(k, order, &xo)?;
        if px.basis == ideal.basis {
            return Ok(Some(x));
        }
        return Err(Error::internal("norm-matched element failed ideal equality"));
    }
    Ok(None)
}

/// Enclosure of the 2x2 regulator determinant of a pair of elements of a
/// sextic compositum over its first two complex places,
///
/// ```text
/// det [ ln|u1|_P0  ln|u1|_P1 ]      with ln|u|_P = ln(|u(P)|^2),
///     [ ln|u2|_P0  ln|u2|_P1 ]
/// ```
///
/// the normalized logarithmic embedding for complex places. An interval
/// excluding zero proves the pair is multiplicatively independent (rank 2);
/// an interval containing zero is inconclusive and the caller reports it
/// as such.
pub fn regulator_of_pair(
    kf: &crate::compositum::Compositum,
    u1: &crate::compositum::KFElt,
    u2: &crate::compositum::KFElt,
    prec: u32,
) -> Result<Interval> {
    let mut bits = prec.max(start_precision());
    loop {
        let e1 = kf.embed_places(u1, bits)?;
        let e2 = kf.embed_places(u2, bits)?;
        let mut logs = [
            [Interval::from_int(0), Interval::from_int(0)],
            [Interval::from_int(0), Interval::from_int(0)],
        ];
        let mut ok = true;
        for (i, e) in [e1, e2].iter().enumerate() {
            for j in 0..2 {
                let a = e[j].abs_sq();
                if !a.lo.is_positive() {
                    ok = false;
                    break;
                }
                logs[i][j] = a.ln(bits)?;
            }
        }
        if ok {
            let det = logs[0][0]
                .mul(&logs[1][1])
                .sub(&logs[0][1].mul(&logs[1][0]));
            return Ok(det);
        }
        if bits >= MAX_PRECISION {
            return Err(Error::PrecisionExhausted {
                bits,
                context: "embedding of unit not separated from zero".into(),
            });
        }
        bits *= 2;
    }
}

/// Enclosure of the 2x2 regulator determinant of a pair of elements of a
/// totally real cubic field over its first two real places,
///
/// ```text
/// det [ ln|u1(r0)|  ln|u1(r1)| ]
///     [ ln|u2(r0)|  ln|u2(r1)| ]
/// ```
///
/// An interval excluding zero proves multiplicative independence. For a
/// pair generating a finite-index subgroup E of the unit group, |det| is
/// the regulator of E.
pub fn regulator_of_real_pair(
    k: &CubicField,
    u1: &KElt,
    u2: &KElt,
    prec: u32,
) -> Result<Interval> {
    let mut bits = prec.max(start_precision());
    loop {
        let roots = k.real_roots(bits);
        if roots.len() != 3 {
            return Err(Error::parameter(
                "regulator_of_real_pair requires a totally real cubic",
            ));
        }
        let mut logs = [
            [Interval::from_int(0), Interval::from_int(0)],
            [Interval::from_int(0), Interval::from_int(0)],
        ];
        let mut ok = true;
        for (i, u) in [u1, u2].iter().enumerate() {
            for j in 0..2 {
                let a = k.embed_real(u, &roots[j]).abs();
                if !a.lo.is_positive() {
                    ok = false;
                    break;
                }
                logs[i][j] = a.ln(bits)?;
            }
        }
        if ok {
            let det = logs[0][0]
                .mul(&logs[1][1])
                .sub(&logs[0][1].mul(&logs[1][0]));
            return Ok(det);
        }
        if bits >= MAX_PRECISION {
            return Err(Error::PrecisionExhausted {
                bits,
                context: "real embedding of unit not separated from zero".into(),
            });
        }
        bits *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Poly;
    use crate::orders::{factor_prime, p_maximalize};

    fn field(c0: i64, c1: i64, c2: i64) -> CubicField {
        CubicField::new(Poly::from_int_vec(vec![c0, c1, c2, 1])).unwrap()
    }

    fn maximal_order(k: &CubicField) -> Order {
        let mut o = Order::equation_order(3);
        let disc = k.discriminant().clone();
        let fac = crate::arith::factorize(&disc.abs(), &crate::arith::Budget::default());
        assert!(fac.is_complete());
        for (p, e) in &fac.factors {
            if *e >= 2 {
                o = p_maximalize(k, &o, p).unwrap();
            }
        }
        o
    }

    #[test]
    fn enumerate_form_matches_brute_force() {
        // Identity form: vectors with v0^2+v1^2+v2^2 <= 9, up to sign.
        let mut q: [[BigRational; 3]; 3] = Default::default();
        for (i, row) in q.iter_mut().enumerate() {
            row[i] = rat_int(1);
        }
        let got = enumerate_form(&q, &rat_int(9), 100_000).unwrap();
        let mut brute = 0u32;
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                for c in -3i64..=3 {
                    if a * a + b * b + c * c <= 9 && (a, b, c) != (0, 0, 0) {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(got.len() as u32 * 2, brute);
        for v in &got {
            let s: BigInt = v.iter().map(|x| x * x).sum();
            assert!(s <= BigInt::from(9));
            assert!(!s.is_zero());
        }
        // Off-diagonal form x^2 + xy + y^2 + z^2 (det 3/4): count against
        // direct evaluation.
        let h = BigRational::new(BigInt::one(), BigInt::from(2));
        q[0][1] = h.clone();
        q[1][0] = h;
        let got = enumerate_form(&q, &rat_int(4), 100_000).unwrap();
        let mut brute = 0u32;
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                for c in -4i64..=4 {
                    if a * a + a * b + b * b + c * c <= 4 && (a, b, c) != (0, 0, 0) {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(got.len() as u32 * 2, brute);
    }

    #[test]
    fn enumerate_budget_is_enforced() {
        let mut q: [[BigRational; 3]; 3] = Default::default();
        for (i, row) in q.iter_mut().enumerate() {
            row[i] = rat_int(1);
        }
        let err = enumerate_form(&q, &rat_int(1_000_000), 10).unwrap_err();
        assert!(matches!(err, Error::BoundExhausted(_)));
    }

    #[test]
    fn t2_form_encloses_known_values() {
        // x^3 - 2, power basis: T2(1) = 3, T2(pi) = r^2 + 2|z|^2 where
        // r = 2^(1/3), |z|^2 = 2^(2/3): T2(pi) = 3 * 2^(2/3) = 4.7622...
        let k = field(-2, 0, 0);
        let o = Order::equation_order(3);
        let basis = order_basis(3, &o);
        let form = t2_form(&k, &basis, 96).unwrap();
        assert!(form.inflation >= rat_int(1) && form.inflation <= rat_int(2));
        // q[0][0] must be extremely close to 3 (exact value 3).
        let d00 = (&form.q[0][0] - rat_int(3)).abs();
        assert!(d00 < BigRational::new(BigInt::one(), BigInt::from(1u64 << 40)));
        // q[1][1] close to 4.76220315...
        let approx = BigRational::new(BigInt::from(476_220_315u64), BigInt::from(100_000_000u64));
        let d11 = (&form.q[1][1] - approx).abs();
        assert!(d11 < BigRational::new(BigInt::one(), BigInt::from(10_000_000u64)));
    }

    #[test]
    fn fundamental_unit_cbrt2() {
        // Q(cbrt 2): fundamental unit 1 + pi + pi^2 (= (pi - 1)^-1),
        // regulator ln(3.84732...) = 1.3473525...
        let k = field(-2, 0, 0);
        let o = maximal_order(&k);
        let start = KElt::new(rat_int(-1), rat_int(1), rat_int(0)); // pi - 1
        assert!(is_unit(&k, &start));
        let info = fundamental_unit(&k, &o, &start, 1_000_000).unwrap();
        let expect = KElt::new(rat_int(1), rat_int(1), rat_int(1));
        assert!(info.eta == expect || info.eta == expect.neg());
        // ln(3.84732210...) = 1.34737734832...
        let reg_lo = BigRational::new(BigInt::from(1_347_377u64), BigInt::from(1_000_000u64));
        let reg_hi = BigRational::new(BigInt::from(1_347_378u64), BigInt::from(1_000_000u64));
        assert!(info.regulator.lo < reg_hi && info.regulator.hi > reg_lo);

        // Starting from the square of the fundamental unit must reduce.
        let sq = k.mul(&start, &start);
        let info2 = fundamental_unit(&k, &o, &sq, 1_000_000).unwrap();
        assert!(info2.eta == expect || info2.eta == expect.neg());
    }

    #[test]
    fn fundamental_unit_plastic() {
        // x^3 - x - 1: pi itself is the fundamental unit (smallest Pisot
        // number 1.32471...), regulator 0.28119...
        let k = field(-1, -1, 0);
        let o = Order::equation_order(3); // disc -23 squarefree => maximal
        let info = fundamental_unit(&k, &o, &KElt::pi(), 1_000_000).unwrap();
        assert!(info.eta == KElt::pi() || info.eta == KElt::pi().neg());
        let reg_lo = BigRational::new(BigInt::from(28_119u64), BigInt::from(100_000u64));
        let reg_hi = BigRational::new(BigInt::from(28_122u64), BigInt::from(100_000u64));
        assert!(info.regulator.lo < reg_hi && info.regulator.hi > reg_lo);
        // Certification from pi^3 also lands on pi.
        let cube = k.pow(&KElt::pi(), 3);
        let info3 = fundamental_unit(&k, &o, &cube, 1_000_000).unwrap();
        assert!(info3.eta == KElt::pi() || info3.eta == KElt::pi().neg());
    }

    #[test]
    fn principality_in_class_number_one_field() {
        // Q(cbrt 2) has class number 1: every prime ideal is principal.
        let k = field(-2, 0, 0);
        let o = maximal_order(&k);
        let eta = KElt::new(rat_int(1), rat_int(1), rat_int(1));
        for p in [2i64, 3, 5, 31] {
            let primes = factor_prime(&k, &o, &BigInt::from(p)).unwrap();
            for pr in &primes {
                let w = is_principal(&k, &o, &pr.ideal, &eta, 5_000_000)
                    .unwrap()
                    .expect("class number one: prime must be principal");
                assert_eq!(k.norm(&w).abs(), BigRational::from_integer(pr.norm()));
            }
        }
    }

    #[test]
    fn nonprincipal_ideal_detected() {
        // x^3 + 4x - 1 has discriminant -283 (squarefree) and class
        // number 2; the degree-one prime above 2 is not principal, but
        // its square is.
        let k = field(-1, 4, 0);
        assert_eq!(k.discriminant(), &BigInt::from(-283));
        let o = Order::equation_order(3);
        // pi is a unit: N(pi) = 1.
        assert!(is_unit(&k, &KElt::pi()));
        let primes = factor_prime(&k, &o, &BigInt::from(2)).unwrap();
        let p2 = primes.iter().find(|pr| pr.f == 1).unwrap();
        let w = is_principal(&k, &o, &p2.ideal, &KElt::pi(), 5_000_000).unwrap();
        assert!(w.is_none(), "degree-one prime above 2 must be non-principal");

        let sq = crate::orders::ideal_product(&k, &o, &p2.ideal, &p2.ideal).unwrap();
        let w2 = is_principal(&k, &o, &sq, &KElt::pi(), 5_000_000).unwrap();
        assert!(w2.is_some(), "square of the class-2 prime must be principal");
    }

    #[test]
    fn principal_primes_give_witnesses() {
        // x^3 - x - 1 (disc -23, h = 1): primes above 23 (ramified) and 5.
        let k = field(-1, -1, 0);
        let o = Order::equation_order(3);
        for p in [5i64, 23] {
            let primes = factor_prime(&k, &o, &BigInt::from(p)).unwrap();
            for pr in &primes {
                let w = is_principal(&k, &o, &pr.ideal, &KElt::pi(), 5_000_000)
                    .unwrap()
                    .expect("h = 1: prime must be principal");
                let wo = o.coords(&w.c).unwrap();
                let back = ideal_from_element(&k, &o, &wo).unwrap();
                assert_eq!(back.basis, pr.ideal.basis);
            }
        }
    }
}
