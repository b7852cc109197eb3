//! Certificate serialization. Every integer is serialized as a decimal
//! string so that certificates round-trip exactly regardless of magnitude
//! and JSON parser numeric limits; field order is fixed by struct order;
//! the run timestamp is isolated in a `meta` block so that two runs with
//! identical inputs produce byte-identical certificate bodies.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::str::FromStr;

/// BigInt <-> decimal string.
pub mod big_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let t = String::deserialize(d)?;
        BigInt::from_str(&t).map_err(D::Error::custom)
    }
}

/// u64 <-> decimal string.
pub mod u64_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        let t = String::deserialize(d)?;
        t.parse().map_err(D::Error::custom)
    }
}

/// u32 <-> decimal string.
pub mod u32_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &u32, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u32, D::Error> {
        let t = String::deserialize(d)?;
        t.parse().map_err(D::Error::custom)
    }
}

/// i64 <-> decimal string.
pub mod i64_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &i64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<i64, D::Error> {
        let t = String::deserialize(d)?;
        t.parse().map_err(D::Error::custom)
    }
}

/// [u64; 3] <-> array of three decimal strings.
pub mod u64_arr3 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[u64; 3], s: S) -> Result<S::Ok, S::Error> {
        [v[0].to_string(), v[1].to_string(), v[2].to_string()].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u64; 3], D::Error> {
        let t = <[String; 3]>::deserialize(d)?;
        Ok([
            t[0].parse().map_err(D::Error::custom)?,
            t[1].parse().map_err(D::Error::custom)?,
            t[2].parse().map_err(D::Error::custom)?,
        ])
    }
}

/// Vec<BigInt> <-> vector of decimal strings.
pub mod big_vec_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let t = Vec::<String>::deserialize(d)?;
        t.iter()
            .map(|x| BigInt::from_str(x).map_err(D::Error::custom))
            .collect()
    }
}

/// BigRational <-> "num" or "num/den" string.
pub mod rat_str {
    use super::*;
    use num_rational::BigRational;

    pub fn to_string(v: &BigRational) -> String {
        if v.denom() == &BigInt::from(1) {
            v.numer().to_string()
        } else {
            format!("{}/{}", v.numer(), v.denom())
        }
    }

    pub fn parse(t: &str) -> Result<BigRational, String> {
        let mut it = t.splitn(2, '/');
        let num = BigInt::from_str(it.next().unwrap_or("")).map_err(|e| e.to_string())?;
        let den = match it.next() {
            Some(d) => BigInt::from_str(d).map_err(|e| e.to_string())?,
            None => BigInt::from(1),
        };
        if den == BigInt::from(0) {
            return Err("zero denominator".into());
        }
        Ok(BigRational::new(num, den))
    }

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_string(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let t = String::deserialize(d)?;
        parse(&t).map_err(D::Error::custom)
    }
}

/// Vec<BigRational> <-> vector of rational strings.
pub mod rat_vec_str {
    use super::*;
    use num_rational::BigRational;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(super::rat_str::to_string).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let t = Vec::<String>::deserialize(d)?;
        t.iter()
            .map(|x| super::rat_str::parse(x).map_err(D::Error::custom))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Document envelope
// ---------------------------------------------------------------------------

/// Identification block of a produced document. The generation timestamp
/// is the only nondeterministic field of any output and lives here,
/// outside the body, so that two runs from the same config agree
/// byte-for-byte on the body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    /// Producing tool and version, e.g. "cubiclass 0.1.0".
    pub tool: String,
    /// Unix timestamp (seconds) of generation, as a decimal string.
    pub generated_unix: String,
    /// Hex SHA-256 of the canonical serialized run configuration.
    pub config_hash: String,
}

/// Versioned document envelope shared by all JSON outputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope<T> {
    /// Schema identifier, e.g. "cubiclass/instance/1"; the matching JSON
    /// Schema file ships in the repository under schemas/.
    pub schema: String,
    pub meta: Meta,
    pub body: T,
}

// ---------------------------------------------------------------------------
// Instance report (the `construct` document body)
// ---------------------------------------------------------------------------

/// One row of the ramification table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamRow {
    pub p: String,
    /// "totally-ramified" | "partially-ramified" | "unramified-or-other"
    /// | "special-three".
    pub shape: String,
}

/// Valuation data for one prime of the compositum above a support prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportPrimeRow {
    pub e: String,
    pub f: String,
    pub v_alpha: String,
    pub v_pi_diff: String,
    pub over_f: String,
}

/// Splitting and valuation evidence above one rational support prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportRow {
    pub p: String,
    /// "ramified" | "split" | "inert" in F = Q(sqrt d).
    pub f_shape: String,
    /// Smaller square root of d mod p when split.
    pub f_root: Option<String>,
    pub primes: Vec<SupportPrimeRow>,
}

/// Everything `construct` reports about one instance: the defining data,
/// the ramification survey, the minimal polynomial of the distinguished
/// element alpha with its verified trace/norm facts, and the n-th power
/// decomposition of (alpha).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub d: String,
    pub n: String,
    pub s: String,
    pub a: String,
    /// m = (3^6 d^n a^(2^s n) + 27)/4.
    pub m: String,
    /// Ascending coefficients of u(x) = x^3 + m(x+1)^2.
    pub u_coeffs: Vec<String>,
    /// c with c^2 d = 4m − 27 (the square root convention is c·sqrt d).
    pub sqrt_factor: String,
    /// disc(u) = m^2 (4m − 27).
    pub disc_u: String,
    /// Marker for the 3 | d branch of the ramification analysis.
    pub three_divides_d: bool,
    /// m = b c^3 with b cube-free.
    pub cube_free_b: String,
    pub cube_c: String,
    pub ramification: Vec<RamRow>,
    /// (e, f) profile of the primes above 3 from direct factorization.
    pub three_profile: Vec<[String; 2]>,
    pub totally_ramified: Vec<String>,
    pub ramified_count: String,
    /// t = max(0, count − 6), the genus-theoretic exponent addendum.
    pub genus_exponent_addendum: String,
    pub ramification_complete: bool,
    /// Ascending coefficients of the minimal polynomial h of alpha over F,
    /// each as the pair (x, y) for x + y·sqrt d.
    pub alpha_min_poly: Vec<[String; 2]>,
    /// Ascending coefficients of the minimal polynomial of pi^sigma/pi.
    pub ratio_min_poly: Vec<[String; 2]>,
    /// N_{KF/F}(alpha) as (x, y).
    pub alpha_norm_f: [String; 2],
    /// N_{KF/Q}(alpha) = |d|^n a^(2^s n).
    pub alpha_norm_q: String,
    /// True when the verified facts hold: h monic with coefficients in
    /// O_F, h(alpha) = 0, Tr(alpha) in 3 O_F, Tr(alpha alpha^sigma) not in
    /// 3 O_F (construction fails hard otherwise).
    pub alpha_trace_facts: bool,
    pub alpha_support: Vec<SupportRow>,
    /// True when every valuation of alpha above the support is a
    /// nonnegative multiple of n (the decomposition fails hard otherwise).
    pub valuations_multiples_of_n: bool,
}

/// Build the full instance report; runs the construction, the
/// ramification survey, and the n-th power decomposition of (alpha).
pub fn instance_report(
    inst: &crate::uchida::Instance,
    budget: &crate::arith::Budget,
) -> crate::error::Result<InstanceReport> {
    use crate::uchida::{self, FShape, PrimeShape};

    let ram = uchida::ramification_report(inst, budget)?;
    let alpha = uchida::alpha_data(inst)?;
    let witness = uchida::decompose_alpha(inst, &alpha)?;

    let shape_str = |s: &PrimeShape| -> String {
        match s {
            PrimeShape::TotallyRamified => "totally-ramified",
            PrimeShape::PartiallyRamified => "partially-ramified",
            PrimeShape::UnramifiedOrOther => "unramified-or-other",
            PrimeShape::SpecialThree => "special-three",
        }
        .into()
    };
    let qelt_pair = |q: &crate::quad::QElt| -> [String; 2] {
        [rat_str::to_string(&q.x), rat_str::to_string(&q.y)]
    };

    let four_m_27 = BigInt::from(4) * &inst.m - BigInt::from(27);
    let disc_u = &inst.m * &inst.m * &four_m_27;

    Ok(InstanceReport {
        d: inst.params.d.to_string(),
        n: inst.params.n.to_string(),
        s: inst.params.s.to_string(),
        a: inst.params.a.to_string(),
        m: inst.m.to_string(),
        u_coeffs: inst.u.coeffs().iter().map(|c| c.to_string()).collect(),
        sqrt_factor: inst.sqrt_factor.to_string(),
        disc_u: disc_u.to_string(),
        three_divides_d: inst.params.d.mod_floor(&BigInt::from(3)).is_zero(),
        cube_free_b: ram.cube_free_b.to_string(),
        cube_c: ram.cube_c.to_string(),
        ramification: ram
            .table
            .iter()
            .map(|(p, s)| RamRow {
                p: p.to_string(),
                shape: shape_str(s),
            })
            .collect(),
        three_profile: ram
            .three_profile
            .iter()
            .map(|(e, f)| [e.to_string(), f.to_string()])
            .collect(),
        totally_ramified: ram.totally_ramified.iter().map(|p| p.to_string()).collect(),
        ramified_count: ram.count.to_string(),
        genus_exponent_addendum: ram.t.to_string(),
        ramification_complete: ram.complete,
        alpha_min_poly: alpha.h.iter().map(&qelt_pair).collect(),
        ratio_min_poly: alpha.h1.iter().map(&qelt_pair).collect(),
        alpha_norm_f: qelt_pair(&alpha.norm_f),
        alpha_norm_q: alpha.norm_q.to_string(),
        alpha_trace_facts: true,
        alpha_support: witness
            .support
            .iter()
            .map(|entry| SupportRow {
                p: entry.p.to_string(),
                f_shape: match &entry.f_side {
                    FShape::Ramified => "ramified".into(),
                    FShape::Split(_) => "split".into(),
                    FShape::Inert => "inert".into(),
                },
                f_root: match &entry.f_side {
                    FShape::Split(r) => Some(r.to_string()),
                    _ => None,
                },
                primes: entry
                    .primes
                    .iter()
                    .map(|q| SupportPrimeRow {
                        e: q.e.to_string(),
                        f: q.f.to_string(),
                        v_alpha: q.v_alpha.to_string(),
                        v_pi_diff: q.v_pi_diff.to_string(),
                        over_f: q.over_f.to_string(),
                    })
                    .collect(),
            })
            .collect(),
        valuations_multiples_of_n: true,
    })
}

/// Vec<Vec<BigInt>> (integer matrix, e.g. an HNF basis) <-> nested decimal
/// strings.
pub mod mat_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<Vec<String>> = v
            .iter()
            .map(|row| row.iter().map(|x| x.to_string()).collect())
            .collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        let t = Vec::<Vec<String>>::deserialize(d)?;
        t.iter()
            .map(|row| {
                row.iter()
                    .map(|x| BigInt::from_str(x).map_err(D::Error::custom))
                    .collect()
            })
            .collect()
    }
}
