//! Least primary factor of the multiplicative group (Z/nZ)^x.
//!
//! Writing the group M_n = (Z/nZ)^x as a direct sum of primary cyclic
//! groups, S(n) denotes the smallest order appearing among the summands
//! (undefined for the trivial groups n = 1, 2). This crate computes S(n)
//! exactly, counts integers by S-value along two independent routes, and
//! evaluates the leading constants C_q of the counting asymptotics with
//! certified truncation error intervals.
//!
//! Module map:
//!
//! - [`mgroup`]: primary decomposition of M_n, S(n), prime-power helpers.
//! - [`residue`]: the moduli Q_q, residue sets B_q, densities beta_q, and
//!   the finite divisibility predicate equivalent to S(m) >= q.
//! - [`counting`]: a segmented sieve for S up to 1e9, the counting
//!   functions A, A', E, the multiplicative enumeration of N_B, and
//!   first-order asymptotics.
//! - [`chars`]: Dirichlet characters mod Q_q as exact root-of-unity data,
//!   character sums over B_q in closed form, conductors, Gauss sums, and
//!   L(1, chi) by finite formulas.
//! - [`constants`]: per-class Euler factor shapes, truncated Euler
//!   products with Rosser-Schoenfeld tail bounds, L-products, Gamma, and
//!   the constants C_q themselves.
//! - [`primes`]: deterministic u64 primality, factorization, sieves.
//!
//! Everything is deterministic: identical inputs give bit-identical
//! results regardless of thread count.

pub mod chars;
pub mod constants;
pub mod counting;
pub mod error;
pub mod mgroup;
pub mod numeric;
pub mod primes;
pub mod residue;

pub use error::{Error, Result};

pub use chars::{
    b_weight, char_sum_over_b, char_sum_over_b_bruteforce, conductor_and_primitive,
    gauss_sum, image_size, l1, restriction_component, CharacterGroup,
    DirichletCharacter, RootOfUnity,
};
pub use constants::{
    c3_closed_form, euler_product_a, g_value, gamma_function, gamma_prefactor,
    landau_g, l_product, leading_constant_c, residue_class_factor,
    truncation_error_bound, ConstantReport, ConstantsPipeline, EulerProductEstimate,
    LocalFactorShape, DEFAULT_PRIME_BOUND,
};
pub use counting::{
    asymptotic_a_prime, asymptotic_e, compute_sp_pairs, enumerate_n_b,
    read_sp_pairs, sieve_least_primary, sieve_least_primary_cached, write_sp_pairs,
    Asymptotic, CountRecord, SieveTable, MAX_SIEVE_BOUND, SIEVE_SEGMENT,
};
pub use mgroup::{
    as_prime_power, factorize, least_primary_factor, m_exponent, next_prime_power,
    p_adic_valuation, primary_decomposition, Factorization, PrimaryDecomposition,
    PrimePower,
};
pub use residue::{
    beta, local_class_data, modulus_q, phi_modulus_q, residue_set_b,
    satisfies_s_at_least, LocalClassData, Rational, ResidueClassSet,
    MAX_RESIDUE_MODULUS, MAX_RESIDUE_PHI,
};
