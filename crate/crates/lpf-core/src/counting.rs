//! Counting integers by least primary factor.
//!
//! Two independent routes are provided. The sieve route computes S(n) for
//! every n up to a bound from scratch: a segmented factor sieve first
//! extracts s(p) (the least prime-power part of p - 1) for every odd prime
//! p, then a second pass pushes min(2 for 4 | n, s(p) for odd p | n) onto
//! every n. The residue route enumerates the multiplicatively-structured
//! sets N_B directly from the residue classes B_q. Tests hold the two
//! routes against each other with zero tolerance.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::ConstantsPipeline;
use crate::error::{Error, Result};
use crate::mgroup::{as_prime_power, next_prime_power};
use crate::primes::primes_up_to;
use crate::residue::ResidueClassSet;

/// Hard cap on sieve bounds. The full table costs 4 bytes per integer
/// (~4 GB at the cap); routine runs stay at or below 1e7.
pub const MAX_SIEVE_BOUND: u64 = 1_000_000_000;

/// Segment length for both sieve phases.
pub const SIEVE_SEGMENT: usize = 1 << 22;

const SP_CACHE_MAGIC: &[u8; 8] = b"LPFSPV01";

// ---------------------------------------------------------------------
// Phase 1: s(p) for odd primes p
// ---------------------------------------------------------------------

fn validate_bound(bound: u64) -> Result<()> {
    if bound > MAX_SIEVE_BOUND {
        return Err(Error::Capacity(format!(
            "sieve bound {bound} exceeds the {MAX_SIEVE_BOUND} cap"
        )));
    }
    Ok(())
}

/// (p, s(p)) for every odd prime p <= bound, ascending.
///
/// Each segment factors the window [lo - 1, hi) by the base primes
/// <= sqrt(bound), tracking the least prime-power part of every m; the
/// window is extended one element down so that p - 1 is in scope for
/// p = lo. A prime is recognized by surviving the base primes (residual
/// cofactor equal to itself) or by being a base prime.
pub fn compute_sp_pairs(bound: u64) -> Result<Vec<(u64, u64)>> {
    validate_bound(bound)?;
    if bound < 3 {
        return Ok(Vec::new());
    }
    let root = (bound as f64).sqrt() as u64 + 1;
    let base = primes_up_to(root.max(2));

    let first = 3u64;
    let n_segments = ((bound - first) as usize) / SIEVE_SEGMENT + 1;
    let per_segment: Vec<Vec<(u64, u64)>> = (0..n_segments)
        .into_par_iter()
        .map(|seg| {
            let lo = first + (seg * SIEVE_SEGMENT) as u64;
            let hi = (lo + SIEVE_SEGMENT as u64).min(bound + 1);
            let start = lo - 1; // window covers p - 1 for p = lo
            let len = (hi - start) as usize;
            let mut residual: Vec<u64> = (start..hi).collect();
            let mut minpart: Vec<u64> = vec![u64::MAX; len];

            for &l in &base {
                let mut m = start.div_ceil(l) * l;
                while m < hi {
                    let idx = (m - start) as usize;
                    let mut pw = 1u64;
                    while residual[idx] % l == 0 {
                        residual[idx] /= l;
                        pw *= l;
                    }
                    debug_assert!(pw > 1);
                    minpart[idx] = minpart[idx].min(pw);
                    m += l;
                }
            }
            for idx in 0..len {
                if residual[idx] > 1 {
                    // leftover prime factor > sqrt(bound), multiplicity 1
                    minpart[idx] = minpart[idx].min(residual[idx]);
                }
            }

            let mut out = Vec::new();
            let mut p = if lo % 2 == 0 { lo + 1 } else { lo };
            while p < hi {
                let idx = (p - start) as usize;
                let is_prime =
                    residual[idx] == p || (p <= root && base.binary_search(&p).is_ok());
                if is_prime {
                    out.push((p, minpart[idx - 1]));
                }
                p += 2;
            }
            out
        })
        .collect();

    Ok(per_segment.into_iter().flatten().collect())
}

// ---------------------------------------------------------------------
// Phase 2: the S(n) table
// ---------------------------------------------------------------------

/// S(n) for all 3 <= n <= bound; `s` returns None for n in {0, 1, 2}
/// (where S is undefined) and for n beyond the bound.
pub struct SieveTable {
    bound: u64,
    s_values: Vec<u32>,
}

fn table_from_pairs(bound: u64, pairs: &[(u64, u64)]) -> SieveTable {
    let len = (bound + 1) as usize;
    let mut s_values = vec![u32::MAX; len];
    let split = pairs.partition_point(|&(p, _)| p <= SIEVE_SEGMENT as u64);
    let (small, large) = pairs.split_at(split);

    s_values
        .par_chunks_mut(SIEVE_SEGMENT)
        .enumerate()
        .for_each(|(ci, chunk)| {
            let lo = (ci * SIEVE_SEGMENT) as u64;
            let hi = lo + chunk.len() as u64;
            // the 2^{r-2} component of the 2-part: S contribution 2 iff 4 | n
            let mut m = lo.max(4).div_ceil(4) * 4;
            while m < hi {
                let v = &mut chunk[(m - lo) as usize];
                *v = (*v).min(2);
                m += 4;
            }
            for &(p, sp) in small {
                debug_assert!(sp < u32::MAX as u64);
                let sp = sp as u32;
                let mut m = p.max(lo.div_ceil(p) * p);
                while m < hi {
                    let v = &mut chunk[(m - lo) as usize];
                    *v = (*v).min(sp);
                    m += p;
                }
            }
        });

    // primes above the segment length have sparse multiples; one ordered
    // sequential pass keeps the result independent of thread count
    for &(p, sp) in large {
        let sp = sp as u32;
        let mut m = p;
        while m <= bound {
            let v = &mut s_values[m as usize];
            *v = (*v).min(sp);
            m += p;
        }
    }

    for v in s_values.iter_mut().take(3) {
        *v = 0;
    }
    debug_assert!(s_values.iter().skip(3).all(|&v| v != u32::MAX));
    SieveTable { bound, s_values }
}

/// Builds the full S(n) table for 3 <= n <= bound.
pub fn sieve_least_primary(bound: u64) -> Result<SieveTable> {
    let pairs = compute_sp_pairs(bound)?;
    Ok(table_from_pairs(bound, &pairs))
}

// ---------------------------------------------------------------------
// s(p) cache
// ---------------------------------------------------------------------

/// Writes (bound, pairs) in the binary cache layout: magic, bound, count,
/// then little-endian (p, s(p)) pairs.
pub fn write_sp_pairs(path: &Path, bound: u64, pairs: &[(u64, u64)]) -> Result<()> {
    let mut buf = Vec::with_capacity(24 + 16 * pairs.len());
    buf.extend_from_slice(SP_CACHE_MAGIC);
    buf.extend_from_slice(&bound.to_le_bytes());
    buf.extend_from_slice(&(pairs.len() as u64).to_le_bytes());
    for &(p, sp) in pairs {
        buf.extend_from_slice(&p.to_le_bytes());
        buf.extend_from_slice(&sp.to_le_bytes());
    }
    std::fs::write(path, buf)?;
    Ok(())
}

/// Reads a cache file back as (bound, pairs).
pub fn read_sp_pairs(path: &Path) -> Result<(u64, Vec<(u64, u64)>)> {
    let buf = std::fs::read(path)?;
    if buf.len() < 24 || &buf[..8] != SP_CACHE_MAGIC {
        return Err(Error::CacheFormat(format!(
            "{} is not an sp cache (bad magic or truncated header)",
            path.display()
        )));
    }
    let u = |b: &[u8]| u64::from_le_bytes(b.try_into().unwrap());
    let bound = u(&buf[8..16]);
    let count = u(&buf[16..24]) as usize;
    if buf.len() != 24 + 16 * count {
        return Err(Error::CacheFormat(format!(
            "{}: declared {count} pairs but payload has {} bytes",
            path.display(),
            buf.len() - 24
        )));
    }
    let mut pairs = Vec::with_capacity(count);
    for i in 0..count {
        let off = 24 + 16 * i;
        pairs.push((u(&buf[off..off + 8]), u(&buf[off + 8..off + 16])));
    }
    Ok((bound, pairs))
}

/// Like [`sieve_least_primary`], but reuses `cache` when its bound covers
/// the request; otherwise the pairs are recomputed and the cache rewritten.
pub fn sieve_least_primary_cached(bound: u64, cache: &Path) -> Result<SieveTable> {
    validate_bound(bound)?;
    if cache.exists() {
        let (cached_bound, pairs) = read_sp_pairs(cache)?;
        if cached_bound >= bound {
            let cut = pairs.partition_point(|&(p, _)| p <= bound);
            return Ok(table_from_pairs(bound, &pairs[..cut]));
        }
    }
    let pairs = compute_sp_pairs(bound)?;
    write_sp_pairs(cache, bound, &pairs)?;
    Ok(table_from_pairs(bound, &pairs))
}

// ---------------------------------------------------------------------
// Counting
// ---------------------------------------------------------------------

fn check_count_q(q: u64) -> Result<()> {
    if q < 3 || as_prime_power(q).is_none() {
        return Err(Error::InvalidInput(format!(
            "q must be a prime power >= 3, got {q}"
        )));
    }
    Ok(())
}

impl SieveTable {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// S(n), or None when n is in {0, 1, 2} or beyond the table.
    pub fn s(&self, n: u64) -> Option<u64> {
        match self.s_values.get(n as usize) {
            Some(&v) if v != 0 => Some(v as u64),
            _ => None,
        }
    }

    /// Largest S value present in the table (0 for bounds < 3).
    pub fn max_s(&self) -> u64 {
        self.s_values.iter().copied().max().unwrap_or(0) as u64
    }

    fn check_x(&self, x: f64) -> Result<u64> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidInput(format!(
                "x must be finite and nonnegative, got {x}"
            )));
        }
        if x > self.bound as f64 {
            return Err(Error::InvalidInput(format!(
                "x = {x} exceeds the sieve bound {}",
                self.bound
            )));
        }
        Ok(x.floor() as u64)
    }

    /// A'_q(x) = #{odd n <= x : n = 1 or S(n) >= q}.
    pub fn count_a_prime(&self, q: u64, x: f64) -> Result<u64> {
        check_count_q(q)?;
        let xf = self.check_x(x)?;
        let mut count = u64::from(xf >= 1);
        let mut n = 3u64;
        while n <= xf {
            if self.s_values[n as usize] as u64 >= q {
                count += 1;
            }
            n += 2;
        }
        Ok(count)
    }

    /// A_q(x) = A'_q(x) + A'_q(x/2): S(2m) = S(m), so the even members
    /// are the doubles of the odd ones (with 2 = 2 * 1 counted via n = 1).
    pub fn count_a(&self, q: u64, x: f64) -> Result<u64> {
        Ok(self.count_a_prime(q, x)? + self.count_a_prime(q, x / 2.0)?)
    }

    /// E_q(x) = #{n <= x : S(n) = q} for prime powers q >= 2.
    ///
    /// For q >= 3 this is A_q(x) - A_{q+}(x) with q+ the next prime power;
    /// for q = 2 it is floor(x) - A_3(x), the n in {1, 2} cancelling.
    pub fn count_e(&self, q: u64, x: f64) -> Result<u64> {
        if q == 2 {
            let xf = self.check_x(x)?;
            return Ok(xf - self.count_a(3, x)?);
        }
        check_count_q(q)?;
        let upper = next_prime_power(q).value;
        Ok(self.count_a(q, x)? - self.count_a(upper, x)?)
    }

    /// All three counts at once, for tabulated reports.
    pub fn record(&self, q: u64, x: f64) -> Result<CountRecord> {
        Ok(CountRecord {
            q,
            x,
            count_a_prime: self.count_a_prime(q, x)?,
            count_a: self.count_a(q, x)?,
            count_e: self.count_e(q, x)?,
        })
    }
}

/// One row of a counting report.
#[derive(Debug, Clone, Serialize)]
pub struct CountRecord {
    pub q: u64,
    pub x: f64,
    pub count_a_prime: u64,
    pub count_a: u64,
    pub count_e: u64,
}

// ---------------------------------------------------------------------
// The residue route
// ---------------------------------------------------------------------

/// All n <= x (including 1) whose prime factors all lie in the residue
/// classes of `b`, in increasing order. Since the classes are reduced and
/// the modulus is even, every member is automatically odd and coprime to
/// the modulus; this is the set N_B enumerated multiplicatively.
pub fn enumerate_n_b(b: &ResidueClassSet, x: u64) -> Result<Vec<u64>> {
    if x > MAX_SIEVE_BOUND {
        return Err(Error::Capacity(format!(
            "enumeration limit {x} exceeds the {MAX_SIEVE_BOUND} cap"
        )));
    }
    let mut admissible: Vec<u64> = Vec::new();
    if x >= 2 {
        for p in primes_up_to(x) {
            if b.contains(p % b.modulus) {
                admissible.push(p);
            }
        }
    }
    let mut out = Vec::new();
    fn grow(primes: &[u64], from: usize, cur: u64, x: u64, out: &mut Vec<u64>) {
        out.push(cur);
        for i in from..primes.len() {
            if cur > x / primes[i] {
                break; // primes ascend, so no later branch fits either
            }
            grow(primes, i, cur * primes[i], x, out);
        }
    }
    if x >= 1 {
        grow(&admissible, 0, 1, x, &mut out);
    }
    out.sort_unstable();
    Ok(out)
}

// ---------------------------------------------------------------------
// Asymptotics
// ---------------------------------------------------------------------

/// A first-order asymptotic value plus an applicability warning when the
/// uniformity hypothesis q <= (log x)^{1/3} fails.
#[derive(Debug, Clone, Serialize)]
pub struct Asymptotic {
    pub value: f64,
    pub warning: Option<String>,
}

fn asymptotic_inner(
    pipeline: &ConstantsPipeline,
    q: u64,
    x: f64,
    scale: f64,
) -> Result<Asymptotic> {
    if !x.is_finite() || x <= 1.0 {
        return Err(Error::InvalidInput(format!(
            "asymptotics need finite x > 1, got {x}"
        )));
    }
    let report = pipeline.report(q)?;
    let beta = report.beta_num as f64 / report.beta_den as f64;
    let lx = x.ln();
    let value = scale * report.c.midpoint * x / lx.powf(1.0 - beta);
    let limit = lx.cbrt();
    let warning = if q as f64 > limit {
        Some(format!(
            "q = {q} exceeds (log x)^(1/3) = {limit:.3}; the asymptotic \
             regime is not attained at x = {x}"
        ))
    } else {
        None
    };
    Ok(Asymptotic { value, warning })
}

/// E_q(x) ~ C_q x / (log x)^{1 - beta_q}.
pub fn asymptotic_e(pipeline: &ConstantsPipeline, q: u64, x: f64) -> Result<Asymptotic> {
    asymptotic_inner(pipeline, q, x, 1.0)
}

/// A'_q(x) ~ (2/3) C_q x / (log x)^{1 - beta_q}.
pub fn asymptotic_a_prime(
    pipeline: &ConstantsPipeline,
    q: u64,
    x: f64,
) -> Result<Asymptotic> {
    asymptotic_inner(pipeline, q, x, 2.0 / 3.0)
}
