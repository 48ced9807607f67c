//! Rigorous evaluation of the leading constants C_q and their factors.
//!
//! The chain is: per-residue-class Euler factor shapes for A_{B_q}(1)
//! (derived exactly from the character weights w(chi)), a truncated Euler
//! product with a Rosser–Schoenfeld tail interval, the finite L(1, chi)
//! product, the Gamma prefactor, and finally
//!
//! ```text
//!   C_q = 3 G_{B_q}(1) / (2 Gamma(beta_q)),
//!   G_{B_q}(1) = prod_{p | Q_q} (1 - 1/p)^{beta_q} * A^{1/phi(Q_q)} * L_product.
//! ```
//!
//! Every truncated product is returned as an [`EulerProductEstimate`]
//! carrying a log-scale error bound: the true value provably lies in
//! [mid * e^{-b}, mid * e^{+b}]. Bounds come from the stated tail
//! inequality only, never from observed convergence.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::chars::{b_weight, l1, CharacterGroup};
use crate::error::{Error, Result};
use crate::mgroup::as_prime_power;
use crate::numeric::KahanSum;
use crate::primes::{factor_u64, primes_up_to};
use crate::residue::{beta, modulus_q, residue_set_b, Rational};

/// Default truncation bound for the reference evaluations.
pub const DEFAULT_PRIME_BOUND: u64 = 10_000_000;

/// Accuracy folded into intervals for the finitely-evaluated factors
/// (L values, Gamma, the p | Q product), each computed to ~1e-12.
const ANALYTIC_FOLD: f64 = 1e-11;

/// A positive quantity with a certified multiplicative error interval.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EulerProductEstimate {
    /// Truncated-product value.
    pub midpoint: f64,
    /// b such that the true value lies in [midpoint e^{-b}, midpoint e^{b}].
    pub log_error_bound: f64,
    /// Prime bound the truncation used.
    pub prime_bound: u64,
}

impl EulerProductEstimate {
    pub fn lower(&self) -> f64 {
        self.midpoint * (-self.log_error_bound).exp()
    }

    pub fn upper(&self) -> f64 {
        self.midpoint * self.log_error_bound.exp()
    }

    /// Whether the two certified intervals intersect.
    pub fn overlaps(&self, other: &EulerProductEstimate) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }

    /// Rescales by an exactly-known positive constant.
    pub fn scaled(&self, factor: f64) -> EulerProductEstimate {
        EulerProductEstimate {
            midpoint: self.midpoint * factor,
            log_error_bound: self.log_error_bound,
            prime_bound: self.prime_bound,
        }
    }
}

/// The Euler factor shape of a residue class r mod Q_q: the local factor
/// at every prime p = r (mod Q_q) is prod (1 - p^{-k s})^{e} over the
/// listed (k, e) pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalFactorShape {
    pub residue: u64,
    /// (k, exponent) pairs, ascending k; k >= 2 always (the k = 1 parts
    /// cancel exactly against the B_q-membership factor).
    pub factors: Vec<(u64, i64)>,
}

// ---------------------------------------------------------------------
// Gamma
// ---------------------------------------------------------------------

// Lanczos approximation, g = 607/128, 15 coefficients (Godfrey's set).
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEFFS: [f64; 15] = [
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    3.3994649984811888699e-5,
    4.6523628927048575665e-5,
    -9.8374475304879564677e-5,
    1.5808870322491248884e-4,
    -2.1026444172410488319e-4,
    2.1743961811521264320e-4,
    -1.6431810653676389022e-4,
    8.4418223983852743293e-5,
    -2.6190838401581408670e-5,
    3.6899182659531622704e-6,
];

/// Gamma(x) for x > 0 to ~1e-13 relative accuracy.
pub fn gamma_function(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidInput(format!(
            "gamma_function requires x > 0, got {x}"
        )));
    }
    if x < 0.5 {
        // reflection keeps the Lanczos argument away from the pole
        let s = (std::f64::consts::PI * x).sin();
        return Ok(std::f64::consts::PI / (s * gamma_core(1.0 - x)));
    }
    Ok(gamma_core(x))
}

fn gamma_core(x: f64) -> f64 {
    let z = x - 1.0;
    let mut a = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * a
}

// ---------------------------------------------------------------------
// Tail bound
// ---------------------------------------------------------------------

/// 1.25506 / (P log P): with pi(x) < 1.25506 x/log x, partial summation
/// gives sum_{p > P} p^{-2} <= 2 * this, and every class factor after the
/// 1/phi(Q_q) root is majorized by w_max * |log(1 - p^{-2})|.
pub fn truncation_error_bound(prime_bound: u64) -> Result<f64> {
    if prime_bound < 100 {
        return Err(Error::InvalidInput(
            "prime bound must be >= 100".into(),
        ));
    }
    let p = prime_bound as f64;
    Ok(1.25506 / (p * p.ln()))
}

// ---------------------------------------------------------------------
// Class-factor shapes
// ---------------------------------------------------------------------

fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, a) in factor_u64(n) {
        let len = out.len();
        let mut pk = 1u64;
        for _ in 0..a {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

fn mobius(n: u64) -> i64 {
    let f = factor_u64(n);
    if f.iter().any(|&(_, a)| a > 1) {
        return 0;
    }
    if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All class shapes for q at once: shapes[r] is Some(factor list) for
/// every reduced residue r mod Q_q, None otherwise. Also returns
/// (Q_q, phi(Q_q), max |exponent|).
struct ShapeTable {
    big_q: u64,
    phi: u64,
    shapes: Vec<Option<Vec<(u64, i64)>>>,
    max_abs_exponent: i64,
}

fn build_shape_table(q: u64) -> Result<ShapeTable> {
    let b = residue_set_b(q)?;
    let big_q = b.modulus;
    let group = CharacterGroup::new(big_q)?;
    let phi = group.order();
    let characters = group.characters();

    // w(chi) in character rank order, computed once
    let weights: Vec<i64> = characters
        .iter()
        .map(|chi| b_weight(&group, chi, q))
        .collect::<Result<_>>()?;

    let gen_orders = group.generator_orders().to_vec();
    let exponent = gen_orders.iter().fold(1u64, |acc, &d| acc.lcm(&d));

    let mut shapes: Vec<Option<Vec<(u64, i64)>>> = vec![None; big_q as usize];
    let mut max_abs = 0i64;

    for r in 1..big_q {
        let digits = match group.dlog(r) {
            Some(d) => d,
            None => continue,
        };
        let k = group.order_of_unit(r)?;

        // chi(r) for every chi by an odometer over character ranks:
        // step_i = e_i * (E / d_i) is what exponent slot i contributes.
        let steps: Vec<u64> = digits
            .iter()
            .zip(&gen_orders)
            .map(|(&e, &d)| e * (exponent / d) % exponent)
            .collect();
        let mut e_j = vec![0i64; k as usize];
        let mut counters = vec![0u64; gen_orders.len()];
        let mut cur = 0u64; // numerator of chi(r) over denominator E
        for &w in &weights {
            let j = cur * k / exponent; // exact: ord(chi(r)) | k
            e_j[j as usize] += w;
            // advance to the next character rank
            for i in 0..counters.len() {
                counters[i] += 1;
                if counters[i] < gen_orders[i] {
                    cur = (cur + steps[i]) % exponent;
                    break;
                }
                counters[i] = 0;
                cur = (cur + exponent - steps[i] * (gen_orders[i] - 1) % exponent) % exponent;
            }
        }

        // E_j is constant on {j : gcd(j, k) = t}; call it D_t
        let divs = divisors(k);
        let mut d_of: HashMap<u64, i64> = HashMap::new();
        for (j, &e) in e_j.iter().enumerate() {
            let t = if j == 0 { k } else { (j as u64).gcd(&k) };
            match d_of.get(&t) {
                Some(&prev) => debug_assert_eq!(
                    prev, e,
                    "E_j not constant on gcd class: q={q} r={r} t={t}"
                ),
                None => {
                    d_of.insert(t, e);
                }
            }
        }

        // exponent of (1 - p^{-(k/t) s}) is sum_{d | t} mu(t/d) D_d
        let mut coeffs: HashMap<u64, i64> = HashMap::new();
        for &t in &divs {
            let c: i64 = divisors(t)
                .iter()
                .map(|&d| mobius(t / d) * d_of[&d])
                .sum();
            if c != 0 {
                coeffs.insert(k / t, c);
            }
        }
        // the B_q-membership factor (1 - p^{-s})^{-phi(Q)} cancels c_1
        if b.contains(r) {
            let c1 = coeffs.entry(1).or_insert(0);
            *c1 -= phi as i64;
            if *c1 == 0 {
                coeffs.remove(&1);
            }
        }
        debug_assert!(
            !coeffs.contains_key(&1),
            "degree-1 factor survived: q={q} r={r} coeffs={coeffs:?}"
        );

        let mut factors: Vec<(u64, i64)> = coeffs.into_iter().collect();
        factors.sort_unstable_by_key(|&(k, _)| k);
        for &(_, e) in &factors {
            max_abs = max_abs.max(e.abs());
        }
        shapes[r as usize] = Some(factors);
    }

    Ok(ShapeTable { big_q, phi, shapes, max_abs_exponent: max_abs })
}

/// The Euler factor shape at residue class r mod Q_q.
pub fn residue_class_factor(q: u64, r: u64) -> Result<LocalFactorShape> {
    let table = build_shape_table(q)?;
    let reduced = r % table.big_q;
    match table.shapes.get(reduced as usize).and_then(|s| s.clone()) {
        Some(factors) => Ok(LocalFactorShape { residue: reduced, factors }),
        None => Err(Error::InvalidInput(format!(
            "gcd({r}, {}) > 1: not a reduced residue class",
            table.big_q
        ))),
    }
}

// ---------------------------------------------------------------------
// Truncated Euler products
// ---------------------------------------------------------------------

/// Deterministic parallel log-space sum of f(p) over the prime list:
/// fixed 65536-prime blocks, Kahan inside each block, blocks combined in
/// ascending order. The result is identical for any thread count.
fn block_log_sum<F>(primes: &[u64], f: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    const BLOCK: usize = 65_536;
    let partials: Vec<f64> = primes
        .par_chunks(BLOCK)
        .map(|chunk| {
            let mut acc = KahanSum::new();
            for &p in chunk {
                acc.add(f(p));
            }
            acc.value()
        })
        .collect();
    let mut total = KahanSum::new();
    for v in partials {
        total.add(v);
    }
    total.value()
}

fn euler_product_a_over(
    table: &ShapeTable,
    primes: &[u64],
    prime_bound: u64,
) -> Result<EulerProductEstimate> {
    let big_q = table.big_q;
    let shapes = &table.shapes;
    let log_a = block_log_sum(primes, |p| {
        match &shapes[(p % big_q) as usize] {
            Some(factors) => {
                let mut s = 0.0;
                for &(k, e) in factors {
                    s += e as f64 * (-(p as f64).powi(-(k as i32))).ln_1p();
                }
                s
            }
            None => 0.0, // p | Q_q
        }
    });
    let w_max = table.max_abs_exponent as f64 / table.phi as f64;
    Ok(EulerProductEstimate {
        midpoint: (log_a / table.phi as f64).exp(),
        log_error_bound: 2.0 * w_max * truncation_error_bound(prime_bound)?,
        prime_bound,
    })
}

/// A_{B_q}(1)^{1/phi(Q_q)} truncated at `prime_bound`, with tail interval.
pub fn euler_product_a(q: u64, prime_bound: u64) -> Result<EulerProductEstimate> {
    truncation_error_bound(prime_bound)?; // validates the bound
    let table = build_shape_table(q)?;
    let primes = primes_up_to(prime_bound);
    euler_product_a_over(&table, &primes, prime_bound)
}

/// prod over nonprincipal chi mod Q_q of L(1, chi)^{w(chi)/phi(Q_q)}.
///
/// The weight multiset is conjugation-closed and w is real, so the product
/// equals exp(sum (w/phi) log |L|), which is how it is accumulated.
pub fn l_product(q: u64) -> Result<f64> {
    let big_q = modulus_q(q)?;
    let group = CharacterGroup::new(big_q)?;
    let phi = group.order() as f64;
    let mut acc = KahanSum::new();
    for chi in group.characters() {
        if group.is_principal(&chi) {
            continue;
        }
        let w = b_weight(&group, &chi, q)?;
        let l = l1(&group, &chi)?;
        acc.add(w as f64 * l.norm().ln());
    }
    Ok((acc.value() / phi).exp())
}

/// (3 / (2 Gamma(beta_q))) * prod_{p | Q_q} (1 - 1/p)^{beta_q}: the exact
/// prefactor multiplying A^{1/phi} * L_product in C_q.
pub fn gamma_prefactor(q: u64) -> Result<f64> {
    let b = beta(q)?;
    let beta_f = *b.numer() as f64 / *b.denom() as f64;
    let big_q = modulus_q(q)?;
    let mut local = 1.0f64;
    for (p, _) in factor_u64(big_q) {
        local *= 1.0 - 1.0 / p as f64;
    }
    Ok(1.5 / gamma_function(beta_f)? * local.powf(beta_f))
}

/// G_{B_q}(1) with the A-truncation interval.
pub fn g_value(q: u64, prime_bound: u64) -> Result<EulerProductEstimate> {
    let a = euler_product_a(q, prime_bound)?;
    let b = beta(q)?;
    let beta_f = *b.numer() as f64 / *b.denom() as f64;
    let mut local = 1.0f64;
    for (p, _) in factor_u64(modulus_q(q)?) {
        local *= 1.0 - 1.0 / p as f64;
    }
    Ok(EulerProductEstimate {
        midpoint: a.midpoint * local.powf(beta_f) * l_product(q)?,
        log_error_bound: a.log_error_bound + ANALYTIC_FOLD,
        prime_bound,
    })
}

/// C_q = 3 G_{B_q}(1) / (2 Gamma(beta_q)) with certified interval.
pub fn leading_constant_c(q: u64, prime_bound: u64) -> Result<EulerProductEstimate> {
    let g = g_value(q, prime_bound)?;
    let b = beta(q)?;
    let beta_f = *b.numer() as f64 / *b.denom() as f64;
    Ok(EulerProductEstimate {
        midpoint: 1.5 * g.midpoint / gamma_function(beta_f)?,
        log_error_bound: g.log_error_bound,
        prime_bound,
    })
}

/// Landau-type constant g_q for even q >= 4:
///
/// ```text
///   g_q = Gamma(1/phi(q))^{-1} ((phi(q)/q) prod_{chi != chi_0} L(1,chi))^{1/phi(q)}
///         * prod_{p !| q, p != 1 mod q} (1 - p^{-ord_q(p)})^{1/ord_q(p)}
/// ```
pub fn landau_g(q: u64, prime_bound: u64) -> Result<EulerProductEstimate> {
    if q < 4 || q % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "landau_g requires even q >= 4, got {q}"
        )));
    }
    truncation_error_bound(prime_bound)?;
    let group = CharacterGroup::new(q)?;
    let phi = group.order() as f64;

    let mut lsum = KahanSum::new();
    for chi in group.characters() {
        if group.is_principal(&chi) {
            continue;
        }
        lsum.add(l1(&group, &chi)?.norm().ln());
    }
    let l_part = ((phi / q as f64) * lsum.value().exp()).powf(1.0 / phi);

    // ord_q(p) depends only on p mod q; exclude classes r = 1 and r = q-units only
    let mut ord_of: Vec<u64> = vec![0; q as usize];
    let mut w_max = 0.0f64;
    for r in 2..q {
        if r.gcd(&q) == 1 && r != 1 {
            let ord = group.order_of_unit(r)?;
            ord_of[r as usize] = ord;
            w_max = w_max.max(1.0 / ord as f64);
        }
    }
    let primes = primes_up_to(prime_bound);
    let log_euler = block_log_sum(&primes, |p| {
        let ord = ord_of[(p % q) as usize];
        if ord == 0 {
            0.0 // p | q or p = 1 mod q
        } else {
            (-(p as f64).powi(-(ord as i32))).ln_1p() / ord as f64
        }
    });

    Ok(EulerProductEstimate {
        midpoint: l_part * log_euler.exp() / gamma_function(1.0 / phi)?,
        log_error_bound: 2.0 * w_max * truncation_error_bound(prime_bound)?
            + ANALYTIC_FOLD,
        prime_bound,
    })
}

/// C_3 by the closed form 3/(4 sqrt 2) * prod_{p=3 mod 4}(1-p^{-2})^{1/2},
/// sharing only the truncated Euler product with the general pipeline.
pub fn c3_closed_form(prime_bound: u64) -> Result<EulerProductEstimate> {
    let a = euler_product_a(3, prime_bound)?;
    Ok(a.scaled(3.0 / (4.0 * 2f64.sqrt())))
}

// ---------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------

/// Everything the CLI reports about one constant.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantReport {
    pub q: u64,
    pub prime_bound: u64,
    pub c: EulerProductEstimate,
    pub gamma_prefactor: f64,
    pub l_product: f64,
    pub a_product_root: EulerProductEstimate,
    pub beta_num: u64,
    pub beta_den: u64,
    /// The A-product truncation bound (log scale), as printed in reports.
    pub tail_bound: f64,
}

/// Shared evaluation context: one prime sieve, per-q memoized reports.
///
/// Thread-safe; all evaluations are deterministic for a fixed prime bound.
pub struct ConstantsPipeline {
    prime_bound: u64,
    primes: OnceLock<Vec<u64>>,
    reports: Mutex<HashMap<u64, ConstantReport>>,
}

impl ConstantsPipeline {
    pub fn new(prime_bound: u64) -> Result<Self> {
        truncation_error_bound(prime_bound)?; // validates P >= 100
        Ok(ConstantsPipeline {
            prime_bound,
            primes: OnceLock::new(),
            reports: Mutex::new(HashMap::new()),
        })
    }

    pub fn prime_bound(&self) -> u64 {
        self.prime_bound
    }

    fn primes(&self) -> &[u64] {
        self.primes.get_or_init(|| primes_up_to(self.prime_bound))
    }

    /// The supported-q gate shared by all constant evaluations.
    fn check_q(&self, q: u64) -> Result<()> {
        if q == 2 {
            return Err(Error::UnsupportedQ(
                2,
                "no leading-constant theory at q = 2 (S >= 2 always)".into(),
            ));
        }
        if q < 3 || as_prime_power(q).is_none() {
            return Err(Error::InvalidInput(format!(
                "q must be a prime power >= 3, got {q}"
            )));
        }
        Ok(())
    }

    /// C_q with all sub-factors, memoized per q.
    pub fn report(&self, q: u64) -> Result<ConstantReport> {
        self.check_q(q)?;
        if let Some(r) = self.reports.lock().unwrap().get(&q) {
            return Ok(r.clone());
        }
        let table = build_shape_table(q)?;
        let a = euler_product_a_over(&table, self.primes(), self.prime_bound)?;
        let lp = l_product(q)?;
        let pref = gamma_prefactor(q)?;
        let b = beta(q)?;
        let report = ConstantReport {
            q,
            prime_bound: self.prime_bound,
            c: EulerProductEstimate {
                midpoint: pref * lp * a.midpoint,
                log_error_bound: a.log_error_bound + ANALYTIC_FOLD,
                prime_bound: self.prime_bound,
            },
            gamma_prefactor: pref,
            l_product: lp,
            a_product_root: a,
            beta_num: *b.numer(),
            beta_den: *b.denom(),
            tail_bound: a.log_error_bound,
        };
        self.reports
            .lock()
            .unwrap()
            .insert(q, report.clone());
        Ok(report)
    }

    /// Just the constant with its interval.
    pub fn leading_constant(&self, q: u64) -> Result<EulerProductEstimate> {
        Ok(self.report(q)?.c)
    }

    /// beta_q as an exact rational (no truncation involved).
    pub fn beta(&self, q: u64) -> Result<Rational> {
        self.check_q(q)?;
        beta(q)
    }
}
