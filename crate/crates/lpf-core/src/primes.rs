//! Prime enumeration and 64-bit primality/factorization primitives.
//!
//! Everything here is deterministic: the sieve is a plain odd-only sieve of
//! Eratosthenes, primality is Miller–Rabin with a witness set proven
//! complete for u64, and composite splitting is Brent's variant of Pollard
//! rho seeded by a fixed counter (retried deterministically).

/// All primes `<= limit`, ascending.
///
/// Odd-only bit sieve; `limit` up to a few times 10^8 is practical.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    // bit i represents the odd number 2i + 1; index 0 (the number 1) unused
    let half = n / 2 + 1;
    let mut composite = vec![false; half];
    let mut i = 1usize;
    while (2 * i + 1) * (2 * i + 1) <= n {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = (p * p) / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(if n >= 17 {
        (n as f64 / (n as f64).ln() * 1.2) as usize
    } else {
        8
    });
    primes.push(2);
    for i in 1..half {
        let p = 2 * i + 1;
        if p > n {
            break;
        }
        if !composite[i] {
            primes.push(p as u64);
        }
    }
    primes
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for u64.
///
/// The witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37} is known to
/// be exact for all n < 3.3 * 10^24, which covers u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// One nontrivial factor of an odd composite `n` (Brent–Pollard rho).
fn pollard_rho(n: u64) -> u64 {
    debug_assert!(n > 3 && !is_prime(n) && n % 2 == 1);
    let mut c = 1u64;
    loop {
        // f(x) = x^2 + c mod n, Brent cycle detection with batched gcd
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut q = 1u64;
        let mut ys = y;
        let m = 128u64;
        let mut r = 1u64;
        while d == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0u64;
            while k < r && d == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                d = gcd(q, n);
                k += m;
            }
            r *= 2;
        }
        if d == n {
            // backtrack one step at a time
            d = 1;
            let mut z = ys;
            while d == 1 {
                z = f(z);
                d = gcd(x.abs_diff(z), n);
            }
        }
        if d != n && d != 1 {
            return d;
        }
        c += 1; // deterministic re-seed
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Full factorization of `n >= 1` as ascending `(prime, multiplicity)` pairs.
///
/// Trial division by a short prime list clears small factors; any remaining
/// cofactor is split recursively by Miller–Rabin + Pollard rho, so arbitrary
/// u64 inputs are exact.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    if n <= 1 {
        return out;
    }
    for p in SMALL_PRIMES {
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        if is_prime(n) || n < SMALL_PRIME_LIMIT * SMALL_PRIME_LIMIT {
            // below the trial-division horizon any survivor is prime
            out.push((n, 1));
        } else {
            let mut stack = vec![n];
            let mut large: Vec<u64> = Vec::new();
            while let Some(m) = stack.pop() {
                if is_prime(m) {
                    large.push(m);
                    continue;
                }
                let d = pollard_rho(m);
                stack.push(d);
                stack.push(m / d);
            }
            large.sort_unstable();
            let mut i = 0;
            while i < large.len() {
                let p = large[i];
                let mut e = 0u32;
                while i < large.len() && large[i] == p {
                    e += 1;
                    i += 1;
                }
                out.push((p, e));
            }
        }
    }
    out.sort_unstable_by_key(|&(p, _)| p);
    out
}

const SMALL_PRIME_LIMIT: u64 = 100;
const SMALL_PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
    71, 73, 79, 83, 89, 97,
];

/// Integer k-th root: the largest r with r^k <= n.
pub fn nth_root(n: u64, k: u32) -> u64 {
    if k == 1 || n <= 1 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u64;
    // fix up the floating seed exactly
    while r > 0 && checked_pow(r, k).map_or(true, |v| v > n) {
        r -= 1;
    }
    while checked_pow(r + 1, k).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}

fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}
