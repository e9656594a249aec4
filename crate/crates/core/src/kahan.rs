//! Compensated (Kahan–Babuška/Neumaier) summation.

use std::iter::Sum;
use std::ops::AddAssign;

#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for KahanSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl Sum<f64> for KahanSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut k = KahanSum::new();
        for x in iter {
            k.add(x);
        }
        k
    }
}

/// Compensated sum of an iterator of floats.
pub fn ksum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().sum::<KahanSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms_lost_by_naive_sum() {
        let mut naive = 1.0f64;
        let mut k = KahanSum::new();
        k.add(1.0);
        for _ in 0..1_000_000 {
            naive += 1e-16;
            k.add(1e-16);
        }
        assert_eq!(naive, 1.0);
        assert!((k.value() - (1.0 + 1e-10)).abs() < 1e-22);
    }

    #[test]
    fn cancellation_case() {
        assert_eq!(ksum([1.0, 1e100, 1.0, -1e100]), 2.0);
    }
}
