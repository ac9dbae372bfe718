//! Compensated (Kahan-Babuska) summation for reproducible moment sums.

use crate::Scalar;

/// Neumaier-corrected running sum.
#[derive(Clone, Copy, Debug)]
pub struct KahanSum<R> {
    sum: R,
    compensation: R,
}

impl<R: Scalar> KahanSum<R> {
    pub fn new() -> Self {
        KahanSum {
            sum: R::zero(),
            compensation: R::zero(),
        }
    }

    pub fn add(&mut self, x: R) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> R {
        self.sum + self.compensation
    }
}

impl<R: Scalar> Default for KahanSum<R> {
    fn default() -> Self {
        Self::new()
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn sum<R: Scalar>(values: impl IntoIterator<Item = R>) -> R {
    let mut acc = KahanSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}
