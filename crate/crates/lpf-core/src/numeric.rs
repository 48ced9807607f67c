//! Compensated summation helpers shared by the character and constants
//! modules.
//!
//! Every analytic quantity in this crate is a sum or log-space product of
//! many small terms; Kahan compensation keeps the accumulated rounding
//! error O(eps) independent of the term count, which the 1e-12 accuracy
//! contracts rely on.

use num_complex::Complex64;

/// Kahan-compensated real accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: f64) {
        let y = term - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Kahan-compensated complex accumulator (componentwise compensation).
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanComplexSum {
    re: KahanSum,
    im: KahanSum,
}

impl KahanComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: Complex64) {
        self.re.add(term.re);
        self.im.add(term.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_beats_naive_on_many_small_terms() {
        let mut k = KahanSum::new();
        let n = 10_000_000u64;
        for _ in 0..n {
            k.add(0.1);
        }
        let exact = 0.1 * n as f64;
        assert!((k.value() - exact).abs() / exact < 1e-15);
    }

    #[test]
    fn complex_accumulator_matches_components() {
        let mut k = KahanComplexSum::new();
        for j in 0..1000 {
            let theta = j as f64 * 0.01;
            k.add(Complex64::new(theta.cos(), theta.sin()));
        }
        let v = k.value();
        assert!(v.re.is_finite() && v.im.is_finite());
    }
}
