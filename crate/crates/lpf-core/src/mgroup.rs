//! Exact structure of the multiplicative group M_n = (Z/nZ)^x.
//!
//! The group M_n decomposes uniquely as a direct sum of cyclic groups of
//! prime-power order (its primary decomposition). This module computes that
//! decomposition exactly from the factorization of n:
//!
//! * for odd p with p^r || n, the local factor M_{p^r} is cyclic of order
//!   p^{r-1}(p-1), contributing the component p^{r-1} (when r >= 2) together
//!   with one component l^{v_l(p-1)} for each prime l dividing p - 1;
//! * for 2^r || n, the local factor is trivial (r = 1), Z_2 (r = 2), or
//!   Z_2 + Z_{2^{r-2}} (r >= 3).
//!
//! The least primary factor S(n) is the minimum component value. M_1 and
//! M_2 are trivial, so S(1) and S(2) are left undefined and surface as
//! typed errors rather than sentinel values.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::primes::{factor_u64, is_prime, nth_root};

/// A prime power l^e with its factored form kept alongside the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PrimePower {
    /// The prime base l.
    pub base: u64,
    /// The exponent e >= 1.
    pub exponent: u32,
    /// The value l^e.
    pub value: u64,
}

impl PrimePower {
    /// Builds l^e, checking that `base` is prime, `exponent >= 1`, and the
    /// value fits in 64 bits.
    pub fn new(base: u64, exponent: u32) -> Result<Self> {
        if !is_prime(base) {
            return Err(Error::InvalidInput(format!(
                "prime power base {base} is not prime"
            )));
        }
        if exponent == 0 {
            return Err(Error::InvalidInput(
                "prime power exponent must be >= 1".into(),
            ));
        }
        let mut value = 1u64;
        for _ in 0..exponent {
            value = value.checked_mul(base).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "prime power {base}^{exponent} overflows 64 bits"
                ))
            })?;
        }
        Ok(PrimePower { base, exponent, value })
    }
}

impl PartialOrd for PrimePower {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PrimePower {
    /// Ordered by value (distinct prime powers have distinct values, so the
    /// base/exponent tiebreak never actually fires; it keeps Ord total).
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.value, self.base, self.exponent).cmp(&(
            other.value,
            other.base,
            other.exponent,
        ))
    }
}

impl std::fmt::Display for PrimePower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.exponent == 1 {
            write!(f, "{}", self.base)
        } else {
            write!(f, "{}^{}", self.base, self.exponent)
        }
    }
}

/// n together with its sorted list of (prime, multiplicity) pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub n: u64,
    /// Pairs (p, r) with p^r || n, primes strictly increasing.
    pub factors: Vec<(u64, u32)>,
}

/// The multiset of cyclic component orders of M_n, ascending by value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimaryDecomposition {
    pub components: Vec<PrimePower>,
}

impl PrimaryDecomposition {
    /// Component values in ascending order.
    pub fn values(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.value).collect()
    }

    /// Product of component values, i.e. the group order phi(n).
    pub fn group_order(&self) -> u64 {
        self.components.iter().map(|c| c.value).product()
    }
}

/// Exact factorization of n >= 1. The empty product represents n = 1.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::InvalidInput("cannot factorize 0".into()));
    }
    Ok(Factorization { n, factors: factor_u64(n) })
}

/// The p-adic valuation v_p(n): the largest k with p^k | n.
pub fn p_adic_valuation(n: u64, p: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::InvalidInput("v_p(0) is undefined".into()));
    }
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!(
            "valuation base {p} is not prime"
        )));
    }
    let mut n = n;
    let mut v = 0u32;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    Ok(v)
}

/// Primary components contributed by a single local factor M_{p^r}.
fn local_components(p: u64, r: u32, out: &mut Vec<PrimePower>) {
    if p == 2 {
        // M_2 trivial; M_4 = Z_2; M_{2^r} = Z_2 + Z_{2^{r-2}} for r >= 3
        if r >= 2 {
            out.push(PrimePower { base: 2, exponent: 1, value: 2 });
            if r >= 3 {
                out.push(PrimePower {
                    base: 2,
                    exponent: r - 2,
                    value: 1u64 << (r - 2),
                });
            }
        }
        return;
    }
    // M_{p^r} cyclic of order p^{r-1}(p-1)
    if r >= 2 {
        out.push(PrimePower {
            base: p,
            exponent: r - 1,
            value: p.pow(r - 1),
        });
    }
    for (l, e) in factor_u64(p - 1) {
        out.push(PrimePower { base: l, exponent: e, value: l.pow(e) });
    }
}

/// The primary decomposition of M_n, ascending by component value.
///
/// Errors with [`Error::TrivialGroup`] for n = 1, 2 (M_1 and M_2 are
/// trivial and have no components).
pub fn primary_decomposition(n: u64) -> Result<PrimaryDecomposition> {
    if n == 0 {
        return Err(Error::InvalidInput("M_0 is not defined".into()));
    }
    if n <= 2 {
        return Err(Error::TrivialGroup(n));
    }
    let mut components = Vec::new();
    for (p, r) in factor_u64(n) {
        local_components(p, r, &mut components);
    }
    components.sort_unstable();
    Ok(PrimaryDecomposition { components })
}

/// S(n): the least prime power in the primary decomposition of M_n.
///
/// Errors with [`Error::UndefinedS`] for n = 1, 2, where the group is
/// trivial and S is deliberately left undefined.
pub fn least_primary_factor(n: u64) -> Result<PrimePower> {
    if n == 0 {
        return Err(Error::InvalidInput("S(0) is not defined".into()));
    }
    if n <= 2 {
        return Err(Error::UndefinedS(n));
    }
    let decomposition = primary_decomposition(n)?;
    // n >= 3 guarantees at least one component
    Ok(decomposition.components[0])
}

/// Whether n is a prime power l^e (e >= 1), returning its factored form.
pub fn as_prime_power(n: u64) -> Option<PrimePower> {
    if n < 2 {
        return None;
    }
    // a prime power's root must be extracted at some exponent <= log2(n)
    for e in (1..=63u32).rev() {
        let r = nth_root(n, e);
        if r < 2 {
            continue;
        }
        if r.pow(e) == n && is_prime(r) {
            return Some(PrimePower { base: r, exponent: e, value: n });
        }
    }
    None
}

/// q+: the least prime power strictly greater than q.
///
/// Well-defined for every q (for q <= 1 it is 2); prime-power gaps are
/// small enough that a linear upward scan is instant.
pub fn next_prime_power(q: u64) -> PrimePower {
    let mut candidate = q.saturating_add(1).max(2);
    loop {
        if let Some(pp) = as_prime_power(candidate) {
            return pp;
        }
        candidate += 1;
    }
}

/// m(l, q): the largest m >= 0 with l^m < q.
///
/// Pure integer arithmetic (repeated multiplication with an overflow
/// guard); floating-point logs misround at exact powers.
pub fn m_exponent(l: u64, q: u64) -> Result<u32> {
    if !is_prime(l) {
        return Err(Error::InvalidInput(format!("{l} is not prime")));
    }
    if l >= q {
        return Err(Error::InvalidInput(format!(
            "m_exponent requires l < q, got l = {l}, q = {q}"
        )));
    }
    let mut m = 0u32;
    let mut power = 1u64;
    loop {
        match power.checked_mul(l) {
            Some(next) if next < q => {
                power = next;
                m += 1;
            }
            _ => return Ok(m),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(1).unwrap().factors, vec![]);
        assert_eq!(factorize(40).unwrap().factors, vec![(2, 3), (5, 1)]);
        assert_eq!(factorize(36).unwrap().factors, vec![(2, 2), (3, 2)]);
        assert!(matches!(factorize(0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(p_adic_valuation(21, 3).unwrap(), 1);
        assert_eq!(p_adic_valuation(5, 3).unwrap(), 0);
        assert_eq!(p_adic_valuation(40, 2).unwrap(), 3);
        assert!(p_adic_valuation(0, 2).is_err());
        assert!(p_adic_valuation(10, 4).is_err());
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(primary_decomposition(5).unwrap().values(), vec![4]);
        assert_eq!(primary_decomposition(8).unwrap().values(), vec![2, 2]);
        assert_eq!(primary_decomposition(13).unwrap().values(), vec![3, 4]);
        assert!(matches!(
            primary_decomposition(1),
            Err(Error::TrivialGroup(1))
        ));
        assert!(matches!(
            primary_decomposition(2),
            Err(Error::TrivialGroup(2))
        ));
    }

    #[test]
    fn least_primary_factor_examples() {
        assert_eq!(least_primary_factor(13).unwrap().value, 3);
        assert_eq!(least_primary_factor(17).unwrap().value, 16);
        assert_eq!(least_primary_factor(17).unwrap().base, 2);
        assert_eq!(least_primary_factor(17).unwrap().exponent, 4);
        assert_eq!(least_primary_factor(9).unwrap().value, 2);
        assert!(matches!(least_primary_factor(1), Err(Error::UndefinedS(1))));
        assert!(matches!(least_primary_factor(2), Err(Error::UndefinedS(2))));
    }

    #[test]
    fn next_prime_power_examples() {
        assert_eq!(next_prime_power(3).value, 4);
        assert_eq!(next_prime_power(5).value, 7);
        assert_eq!(next_prime_power(8).value, 9);
        assert_eq!(next_prime_power(1).value, 2);
        // consecutive prime powers around 2^5
        assert_eq!(next_prime_power(31).value, 32);
        assert_eq!(next_prime_power(32).value, 37);
    }

    #[test]
    fn m_exponent_examples() {
        assert_eq!(m_exponent(2, 5).unwrap(), 2);
        assert_eq!(m_exponent(3, 4).unwrap(), 1);
        assert_eq!(m_exponent(2, 3).unwrap(), 1);
        assert!(m_exponent(5, 5).is_err());
        assert!(m_exponent(4, 9).is_err());
    }

    #[test]
    fn m_exponent_brackets_q() {
        // l^m < q <= l^{m+1} across a grid, including exact powers
        for &l in &[2u64, 3, 5, 7, 11] {
            for q in (l + 1)..200 {
                let m = m_exponent(l, q).unwrap();
                assert!(l.pow(m) < q);
                assert!(l.pow(m + 1) >= q);
            }
        }
        // exact power boundary: m(2, 8) must be 2, not 3
        assert_eq!(m_exponent(2, 8).unwrap(), 2);
        assert_eq!(m_exponent(2, 9).unwrap(), 3);
    }

    #[test]
    fn s_of_odd_prime_powers_ignores_exponent() {
        let primes: Vec<u64> =
            crate::primes::primes_up_to(100).into_iter().skip(1).collect();
        for &p in &primes {
            let s1 = least_primary_factor(p).unwrap().value;
            for r in 2..=3u32 {
                let s = least_primary_factor(p.pow(r)).unwrap().value;
                assert_eq!(s, s1, "S({p}^{r}) != S({p})");
            }
        }
    }

    #[test]
    fn decomposition_multiplies_to_phi() {
        // independent phi via trial division
        fn phi(mut n: u64) -> u64 {
            let mut result = n;
            let mut p = 2;
            while p * p <= n {
                if n % p == 0 {
                    while n % p == 0 {
                        n /= p;
                    }
                    result -= result / p;
                }
                p += 1;
            }
            if n > 1 {
                result -= result / n;
            }
            result
        }
        for n in 3..=10_000u64 {
            assert_eq!(
                primary_decomposition(n).unwrap().group_order(),
                phi(n),
                "n = {n}"
            );
        }
    }

    #[test]
    fn decomposition_respects_crt() {
        fn multiset(n: u64) -> Vec<u64> {
            match primary_decomposition(n) {
                Ok(d) => d.values(),
                Err(_) => vec![],
            }
        }
        for n in 1..=100u64 {
            for m in 1..=100u64 {
                let nm = n * m;
                if nm < 3 || nm > 10_000 {
                    continue;
                }
                if crate::primes::factor_u64(n)
                    .iter()
                    .any(|&(p, _)| m % p == 0)
                {
                    continue;
                }
                let mut merged = multiset(n);
                merged.extend(multiset(m));
                merged.sort_unstable();
                assert_eq!(multiset(nm), merged, "n = {n}, m = {m}");
            }
        }
    }

    #[test]
    fn least_is_minimum_member() {
        for n in 3..=5_000u64 {
            let d = primary_decomposition(n).unwrap();
            let s = least_primary_factor(n).unwrap();
            assert!(d.components.contains(&s));
            assert!(d.components.iter().all(|c| c.value >= s.value));
        }
    }

    #[test]
    fn doubling_preserves_s() {
        // M_{2m} = M_m for odd m, so S(2m) = S(m)
        for m in (3..=4_999u64).step_by(2) {
            assert_eq!(
                least_primary_factor(2 * m).unwrap(),
                least_primary_factor(m).unwrap()
            );
        }
    }

    #[test]
    fn prime_power_recognition() {
        assert_eq!(as_prime_power(1), None);
        assert_eq!(as_prime_power(6), None);
        let pp = as_prime_power(32).unwrap();
        assert_eq!((pp.base, pp.exponent), (2, 5));
        let pp = as_prime_power(343).unwrap();
        assert_eq!((pp.base, pp.exponent), (7, 3));
        assert_eq!(as_prime_power(1_000_000), None);
        let pp = as_prime_power(2_147_483_647).unwrap();
        assert_eq!((pp.base, pp.exponent), (2_147_483_647, 1));
    }
}
