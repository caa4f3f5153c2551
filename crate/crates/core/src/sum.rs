//! Compensated summation used by every quadrature in the crate.

use num_complex::Complex64;

/// Neumaier-compensated sum; the summation order is the iteration order.
pub(crate) fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Acc::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Compensated sum applied to the real and imaginary parts separately.
pub(crate) fn sum_complex(values: impl IntoIterator<Item = Complex64>) -> Complex64 {
    let mut re = Acc::default();
    let mut im = Acc::default();
    for v in values {
        re.add(v.re);
        im.add(v.im);
    }
    Complex64::new(re.value(), im.value())
}

#[derive(Default)]
struct Acc {
    total: f64,
    carry: f64,
}

impl Acc {
    fn add(&mut self, v: f64) {
        let t = self.total + v;
        if self.total.abs() >= v.abs() {
            self.carry += (self.total - t) + v;
        } else {
            self.carry += (v - t) + self.total;
        }
        self.total = t;
    }

    fn value(&self) -> f64 {
        self.total + self.carry
    }
}
