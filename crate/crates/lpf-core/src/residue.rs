//! The congruence side of the theory: Q_q, the residue sets B_q, the
//! density beta_q, and the divisor-wise predicate equivalent to S(m) >= q.
//!
//! For a prime power q >= 3 write m(l, q) for the largest m with l^m < q.
//! The modulus Q_q = prod_{l<q} l^{m(l,q)+1} carries, for each prime l < q,
//! a local set of residues
//!
//! ```text
//!   B_{l,q} = (M \ H) u I   with   M = units mod l^{m+1},
//!                                  H = { b : b = 1 mod l },
//!                                  I = { 1 mod l^{m+1} },
//! ```
//!
//! whose CRT product B_q c M_{Q_q} has exactly B_q = prod((l-2)l^m + 1)
//! elements. An odd prime p coprime to Q_q satisfies the S-condition at q
//! precisely when p mod Q_q lies in B_q, and beta_q = B_q / phi(Q_q) is the
//! density of B_q among the reduced classes — kept as an exact rational all
//! the way to the final Gamma evaluation.

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mgroup::{as_prime_power, m_exponent};
use crate::primes::primes_up_to;

/// Exact rational used for beta_q and derived exponents.
pub type Rational = Ratio<u64>;

/// The residue machinery enumerates full unit groups mod Q_q; these caps
/// bound the supported q (both admit q <= 11, reject q >= 13).
pub const MAX_RESIDUE_MODULUS: u64 = 1 << 32;
pub const MAX_RESIDUE_PHI: u64 = 200_000;

/// A set of reduced residue classes to a common modulus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueClassSet {
    pub modulus: u64,
    /// Strictly increasing residues in [1, modulus), all coprime to it.
    pub classes: Vec<u64>,
}

impl ResidueClassSet {
    /// Number of classes in the set.
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Whether x mod modulus is one of the classes.
    pub fn contains(&self, x: u64) -> bool {
        self.classes.binary_search(&(x % self.modulus)).is_ok()
    }
}

/// The four local residue sets at one prime l < q, all mod l^{m+1}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalClassData {
    /// The prime l.
    pub l: u64,
    /// m(l, q).
    pub m: u32,
    /// M: all units mod l^{m+1}.
    pub full_group: ResidueClassSet,
    /// H: units congruent to 1 mod l (the (l-1)st powers), size l^m.
    pub subgroup_h: ResidueClassSet,
    /// I: the single class 1 mod l^{m+1}.
    pub singleton_i: ResidueClassSet,
    /// B_{l,q} = (M \ H) u I, size (l-2) l^m + 1.
    pub b_local: ResidueClassSet,
}

fn require_prime_power_q(q: u64) -> Result<()> {
    if q < 3 || as_prime_power(q).is_none() {
        return Err(Error::InvalidInput(format!(
            "q must be a prime power >= 3, got {q}"
        )));
    }
    Ok(())
}

/// Q_q = prod_{l < q} l^{m(l,q)+1}.
pub fn modulus_q(q: u64) -> Result<u64> {
    require_prime_power_q(q)?;
    let mut product = 1u64;
    for l in primes_up_to(q - 1) {
        let m = m_exponent(l, q)?;
        for _ in 0..=m {
            product = product.checked_mul(l).ok_or_else(|| {
                Error::Capacity(format!("Q_{q} overflows 64 bits"))
            })?;
        }
    }
    Ok(product)
}

/// phi(Q_q) = prod_{l < q} l^{m(l,q)} (l - 1).
pub fn phi_modulus_q(q: u64) -> Result<u64> {
    require_prime_power_q(q)?;
    let mut product = 1u64;
    for l in primes_up_to(q - 1) {
        let m = m_exponent(l, q)?;
        let mut local = l - 1;
        for _ in 0..m {
            local = local.checked_mul(l).ok_or_else(|| {
                Error::Capacity(format!("phi(Q_{q}) overflows 64 bits"))
            })?;
        }
        product = product.checked_mul(local).ok_or_else(|| {
            Error::Capacity(format!("phi(Q_{q}) overflows 64 bits"))
        })?;
    }
    Ok(product)
}

/// Constructs M, H, I, and B_{l,q} explicitly mod l^{m(l,q)+1}.
pub fn local_class_data(l: u64, q: u64) -> Result<LocalClassData> {
    require_prime_power_q(q)?;
    let m = m_exponent(l, q)?; // also rejects l >= q and composite l
    let modulus = l.checked_pow(m + 1).ok_or_else(|| {
        Error::Capacity(format!("l^(m+1) overflows for l = {l}, q = {q}"))
    })?;
    if modulus > MAX_RESIDUE_MODULUS {
        return Err(Error::Capacity(format!(
            "local modulus {modulus} exceeds cap {MAX_RESIDUE_MODULUS}"
        )));
    }

    let full: Vec<u64> = (1..modulus).filter(|b| b % l != 0).collect();
    let subgroup: Vec<u64> = full.iter().copied().filter(|b| b % l == 1).collect();
    let mut b_local: Vec<u64> = full
        .iter()
        .copied()
        .filter(|b| b % l != 1 || *b == 1)
        .collect();
    b_local.sort_unstable();

    debug_assert_eq!(subgroup.len() as u64, l.pow(m));
    debug_assert_eq!(b_local.len() as u64, (l - 2) * l.pow(m) + 1);

    Ok(LocalClassData {
        l,
        m,
        full_group: ResidueClassSet { modulus, classes: full },
        subgroup_h: ResidueClassSet { modulus, classes: subgroup },
        singleton_i: ResidueClassSet { modulus, classes: vec![1] },
        b_local: ResidueClassSet { modulus, classes: b_local },
    })
}

/// Inverse of a mod m (m >= 1, gcd(a, m) = 1).
fn inverse_mod(a: u64, m: u64) -> u64 {
    let e = (a as i128).extended_gcd(&(m as i128));
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m as i128) as u64
}

/// B_q: the CRT product of all local B_{l,q}, as residues mod Q_q.
pub fn residue_set_b(q: u64) -> Result<ResidueClassSet> {
    let big_q = modulus_q(q)?;
    let phi = phi_modulus_q(q)?;
    if big_q > MAX_RESIDUE_MODULUS {
        return Err(Error::Capacity(format!(
            "Q_{q} = {big_q} exceeds modulus cap {MAX_RESIDUE_MODULUS}"
        )));
    }
    if phi > MAX_RESIDUE_PHI {
        return Err(Error::Capacity(format!(
            "phi(Q_{q}) = {phi} exceeds cap {MAX_RESIDUE_PHI}"
        )));
    }

    // fold local sets together by explicit CRT lifting
    let mut modulus = 1u64;
    let mut classes: Vec<u64> = vec![0];
    for l in primes_up_to(q - 1) {
        let local = local_class_data(l, q)?;
        let lm = local.b_local.modulus;
        let inv = inverse_mod(modulus % lm, lm);
        let mut lifted = Vec::with_capacity(classes.len() * local.b_local.len());
        for &r in &classes {
            for &b in &local.b_local.classes {
                // x = r mod modulus, x = b mod lm
                let t = ((b + lm - r % lm) % lm * inv) % lm;
                lifted.push(r + modulus * t);
            }
        }
        modulus *= lm;
        classes = lifted;
    }
    classes.sort_unstable();
    debug_assert_eq!(modulus, big_q);
    Ok(ResidueClassSet { modulus, classes })
}

/// beta_q = B_q / phi(Q_q) = prod_{l<q} ((l-2)/(l-1) + 1/(l^m (l-1))),
/// exact.
pub fn beta(q: u64) -> Result<Rational> {
    require_prime_power_q(q)?;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for l in primes_up_to(q - 1) {
        let m = m_exponent(l, q)?;
        let lm = (l as u128)
            .checked_pow(m)
            .ok_or_else(|| Error::Capacity(format!("beta({q}) overflows")))?;
        num = num
            .checked_mul((l as u128 - 2) * lm + 1)
            .ok_or_else(|| Error::Capacity(format!("beta({q}) overflows")))?;
        den = den
            .checked_mul(lm * (l as u128 - 1))
            .ok_or_else(|| Error::Capacity(format!("beta({q}) overflows")))?;
        let g = num.gcd(&den);
        num /= g;
        den /= g;
    }
    if num > u64::MAX as u128 || den > u64::MAX as u128 {
        return Err(Error::Capacity(format!(
            "beta({q}) does not fit in 64-bit rational"
        )));
    }
    Ok(Rational::new(num as u64, den as u64))
}

/// The divisor-wise test for S(m) >= q (no group computation):
///
/// (a) 4 does not divide m;
/// (b) no odd prime p <= q divides m;
/// (c) every odd prime p | m satisfies, for every prime l < q,
///     p != 1 mod l  or  p = 1 mod l^{m(l,q)+1}.
///
/// m = 1 and m = 2 are counted as satisfying every threshold (their unit
/// groups are trivial), matching the counting conventions.
pub fn satisfies_s_at_least(m: u64, q: u64) -> Result<bool> {
    require_prime_power_q(q)?;
    if m == 0 {
        return Err(Error::InvalidInput("m must be >= 1".into()));
    }
    if m <= 2 {
        return Ok(true);
    }
    if m % 4 == 0 {
        return Ok(false);
    }
    let small_primes = primes_up_to(q - 1);
    // precompute the moduli l^{m(l,q)+1} once
    let lifted: Vec<(u64, u64)> = small_primes
        .iter()
        .map(|&l| Ok((l, l.pow(m_exponent(l, q)? + 1))))
        .collect::<Result<_>>()?;
    for (p, _) in crate::primes::factor_u64(m) {
        if p == 2 {
            continue;
        }
        if p <= q {
            return Ok(false);
        }
        for &(l, lk) in &lifted {
            if l == 2 {
                // p = 1 mod 2 always; need p = 1 mod 2^{m+1}
                if p % lk != 1 {
                    return Ok(false);
                }
            } else if p % l == 1 && p % lk != 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
