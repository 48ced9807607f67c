//! The five subcommand implementations. Each builds a [`Rendered`] table;
//! format selection and exit-code mapping live in `main`.

use clap::ValueEnum;
use serde_json::{json, Value};

use lpf_core::{
    asymptotic_a_prime, asymptotic_e, conductor_and_primitive, enumerate_n_b,
    factorize, gauss_sum, l1, least_primary_factor, next_prime_power,
    primary_decomposition, residue_set_b, satisfies_s_at_least,
    sieve_least_primary, as_prime_power, CharacterGroup, ConstantsPipeline,
    Error, Result, MAX_SIEVE_BOUND,
};

use crate::render::Rendered;

/// Which route `count` uses for the counts themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Full S(n) table from the segmented sieve.
    Sieve,
    /// Per-n divisibility predicate (no table).
    Predicate,
    /// Multiplicative enumeration of N_B from the residue classes.
    Oracle,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Sieve => "sieve",
            Mode::Predicate => "predicate",
            Mode::Oracle => "oracle",
        }
    }
}

pub fn factor(n: u64) -> Result<Rendered> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be >= 1".into()));
    }
    let f = factorize(n)?;
    let factorization = if n == 1 {
        "1".to_string()
    } else {
        f.factors
            .iter()
            .map(|&(p, e)| {
                if e == 1 {
                    p.to_string()
                } else {
                    format!("{p}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join(" * ")
    };
    let mut notes = Vec::new();
    let components: Value = match primary_decomposition(n) {
        Ok(d) => json!(d.values()),
        Err(_) => Value::Null,
    };
    let s: Value = match least_primary_factor(n) {
        Ok(pp) => json!(pp.value),
        Err(_) => {
            notes.push(format!("S undefined: the group mod {n} is trivial"));
            Value::Null
        }
    };
    Ok(Rendered {
        command: "factor",
        parameters: json!({ "n": n }),
        columns: &["n", "factorization", "components", "s"],
        rows: vec![json!({
            "n": n,
            "factorization": factorization,
            "components": components,
            "s": s,
        })],
        notes,
    })
}

fn check_x(x: f64) -> Result<u64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InvalidInput(format!(
            "x must be finite and nonnegative, got {x}"
        )));
    }
    if x > MAX_SIEVE_BOUND as f64 {
        return Err(Error::Capacity(format!(
            "x = {x} exceeds the sieve capacity {MAX_SIEVE_BOUND}"
        )));
    }
    Ok(x.floor() as u64)
}

fn check_count_q(q: u64, mode: Mode) -> Result<()> {
    if q == 2 {
        if mode != Mode::Sieve {
            return Err(Error::UnsupportedQ(
                2,
                format!("{} mode needs q >= 3 (B_2 is not defined)", mode.name()),
            ));
        }
        return Ok(());
    }
    if q < 3 || as_prime_power(q).is_none() {
        return Err(Error::InvalidInput(format!(
            "q must be a prime power >= 2, got {q}"
        )));
    }
    Ok(())
}

/// A' by the per-n divisibility predicate, n = 1 included.
fn predicate_count_a_prime(q: u64, limit: u64) -> Result<u64> {
    let mut count = 0u64;
    let mut n = 1u64;
    while n <= limit {
        if satisfies_s_at_least(n, q)? {
            count += 1;
        }
        n += 2;
    }
    Ok(count)
}

/// A' by enumeration of N_B, as a sorted list (all members are odd).
fn oracle_list(q: u64, limit: u64) -> Result<Vec<u64>> {
    enumerate_n_b(&residue_set_b(q)?, limit)
}

pub fn count(q: u64, x: f64, mode: Mode, prime_bound: u64) -> Result<Rendered> {
    check_count_q(q, mode)?;
    let xf = check_x(x)?;

    let (a_prime, a, e): (u64, u64, Option<u64>) = match mode {
        Mode::Sieve => {
            let table = sieve_least_primary(xf)?;
            let xq = xf as f64;
            if q == 2 {
                // S >= 2 always holds, so A'_2 is every odd n and A_2 is
                // every n; E_2 still comes from the complement identity
                ((xf + 1) / 2, xf, Some(table.count_e(2, xq)?))
            } else {
                (
                    table.count_a_prime(q, xq)?,
                    table.count_a(q, xq)?,
                    Some(table.count_e(q, xq)?),
                )
            }
        }
        Mode::Predicate => {
            let ap = predicate_count_a_prime(q, xf)?;
            let a = ap + predicate_count_a_prime(q, xf / 2)?;
            let up = next_prime_power(q).value;
            let a_up = predicate_count_a_prime(up, xf)?
                + predicate_count_a_prime(up, xf / 2)?;
            (ap, a, Some(a - a_up))
        }
        Mode::Oracle => {
            let list = oracle_list(q, xf)?;
            let ap = list.len() as u64;
            let half = list.partition_point(|&n| n <= xf / 2) as u64;
            let a = ap + half;
            // the next threshold may exceed the residue-set capacity
            let e = match oracle_list(next_prime_power(q).value, xf) {
                Ok(upper) => {
                    let up_half = upper.partition_point(|&n| n <= xf / 2) as u64;
                    Some(a - (upper.len() as u64 + up_half))
                }
                Err(Error::Capacity(_)) => None,
                Err(other) => return Err(other),
            };
            (ap, a, e)
        }
    };

    // main terms need the constants pipeline; beyond its range (or for
    // q = 2, x <= 1) the columns stay empty
    let mut main_a_prime: Option<f64> = None;
    let mut main_e: Option<f64> = None;
    let mut warning: Option<String> = None;
    if q >= 3 && xf > 1 {
        let pipeline = ConstantsPipeline::new(prime_bound)?;
        match asymptotic_e(&pipeline, q, xf as f64) {
            Ok(asym) => {
                main_e = Some(asym.value);
                warning = asym.warning;
                main_a_prime =
                    Some(asymptotic_a_prime(&pipeline, q, xf as f64)?.value);
            }
            Err(Error::Capacity(_)) => {}
            Err(other) => return Err(other),
        }
    }
    let ratio_e = match (e, main_e) {
        (Some(e), Some(m)) if m > 0.0 => Some(e as f64 / m),
        _ => None,
    };

    Ok(Rendered {
        command: "count",
        parameters: json!({
            "q": q, "x": x, "mode": mode.name(), "prime_bound": prime_bound,
        }),
        columns: &[
            "q",
            "x",
            "count_a_prime",
            "count_a",
            "count_e",
            "main_term_a_prime",
            "main_term_e",
            "ratio_e",
            "warning",
        ],
        rows: vec![json!({
            "q": q,
            "x": x,
            "count_a_prime": a_prime,
            "count_a": a,
            "count_e": e,
            "main_term_a_prime": main_a_prime,
            "main_term_e": main_e,
            "ratio_e": ratio_e,
            "warning": warning,
        })],
        notes: Vec::new(),
    })
}

pub fn constant(q: u64, prime_bound: u64) -> Result<Rendered> {
    let pipeline = ConstantsPipeline::new(prime_bound)?;
    let r = pipeline.report(q)?;
    Ok(Rendered {
        command: "constant",
        parameters: json!({ "q": q, "prime_bound": prime_bound }),
        columns: &[
            "q",
            "P",
            "C_mid",
            "C_lo",
            "C_hi",
            "gamma_prefactor",
            "L_product",
            "A_product_root",
            "beta_num",
            "beta_den",
            "tail_bound",
        ],
        rows: vec![json!({
            "q": r.q,
            "P": r.prime_bound,
            "C_mid": r.c.midpoint,
            "C_lo": r.c.lower(),
            "C_hi": r.c.upper(),
            "gamma_prefactor": r.gamma_prefactor,
            "L_product": r.l_product,
            "A_product_root": r.a_product_root.midpoint,
            "beta_num": r.beta_num,
            "beta_den": r.beta_den,
            "tail_bound": r.tail_bound,
        })],
        notes: Vec::new(),
    })
}

pub fn compare(qmax: u64, x_list: &[f64], prime_bound: u64) -> Result<Rendered> {
    if x_list.is_empty() {
        return Err(Error::InvalidInput("x-list must not be empty".into()));
    }
    if qmax < 2 {
        return Err(Error::InvalidInput(format!(
            "qmax must be >= 2, got {qmax}"
        )));
    }
    let qs: Vec<u64> = (2..=qmax)
        .filter(|&q| as_prime_power(q).is_some())
        .collect();
    // surface capacity problems before any sieving
    for &q in qs.iter().filter(|&&q| q >= 3) {
        residue_set_b(q)?;
    }
    let mut xs: Vec<u64> = x_list
        .iter()
        .map(|&x| check_x(x))
        .collect::<Result<_>>()?;
    xs.sort_unstable();

    let table = sieve_least_primary(*xs.iter().max().unwrap())?;
    let pipeline = ConstantsPipeline::new(prime_bound)?;

    let mut rows = Vec::new();
    for &q in &qs {
        for &xf in &xs {
            let xq = xf as f64;
            let e = table.count_e(q, xq)?;
            let (main, ratio, warning) = if q == 2 || xf <= 1 {
                (None, None, None)
            } else {
                let asym = asymptotic_e(&pipeline, q, xq)?;
                let ratio =
                    (asym.value > 0.0).then(|| e as f64 / asym.value);
                (Some(asym.value), ratio, asym.warning)
            };
            rows.push(json!({
                "q": q,
                "x": xq,
                "count_e": e,
                "main_term_e": main,
                "ratio": ratio,
                "warning": warning,
            }));
        }
    }

    Ok(Rendered {
        command: "compare",
        parameters: json!({
            "qmax": qmax,
            "x_list": xs,
            "prime_bound": prime_bound,
        }),
        columns: &["q", "x", "count_e", "main_term_e", "ratio", "warning"],
        rows,
        notes: Vec::new(),
    })
}

pub fn chars(modulus: u64) -> Result<Rendered> {
    if modulus < 2 {
        return Err(Error::InvalidInput(format!(
            "modulus must be >= 2, got {modulus}"
        )));
    }
    let group = CharacterGroup::new(modulus)?;
    let mut rows = Vec::new();
    for (index, chi) in group.characters().into_iter().enumerate() {
        let (conductor, primitive_chi) = conductor_and_primitive(&group, &chi)?;
        let parity = if modulus == 2 {
            "even"
        } else if group.eval(&chi, modulus - 1).expect("-1 is a unit").is_one() {
            "even"
        } else {
            "odd"
        };
        let tau: Value = if conductor == 1 {
            json!([1.0, 0.0]) // empty sum convention for the trivial character
        } else {
            let star_group = CharacterGroup::new(conductor)?;
            let t = gauss_sum(&star_group, &primitive_chi)?;
            json!([t.re, t.im])
        };
        let l_value: Value = if group.is_principal(&chi) {
            Value::Null // L(s, chi_0) has a pole at s = 1
        } else {
            let l = l1(&group, &chi)?;
            json!([l.re, l.im])
        };
        rows.push(json!({
            "index": index,
            "exponents": chi.exponents,
            "order": chi.order,
            "conductor": conductor,
            "primitive": conductor == modulus,
            "parity": parity,
            "gauss_sum": tau,
            "l1": l_value,
        }));
    }
    Ok(Rendered {
        command: "chars",
        parameters: json!({
            "modulus": modulus,
            "phi": group.order(),
            "generators": group.generator_residues(),
            "generator_orders": group.generator_orders(),
        }),
        columns: &[
            "index",
            "exponents",
            "order",
            "conductor",
            "primitive",
            "parity",
            "gauss_sum",
            "l1",
        ],
        rows,
        notes: Vec::new(),
    })
}
