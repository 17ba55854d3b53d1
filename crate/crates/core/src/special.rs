//! Scalar special functions and small numerical helpers.

/// Gamma function.
#[inline]
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Reciprocal gamma function, equal to zero at the poles `0, -1, -2, ...`.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x > 171.0 {
        return (-libm::lgamma(x)).exp();
    }
    1.0 / libm::tgamma(x)
}

/// `(a + d)^p - a^p` for `a ≥ 0`, `d ≥ 0`, without cancellation when `d ≪ a`.
#[inline]
pub fn pow_increment(a: f64, d: f64, p: f64) -> f64 {
    if a == 0.0 {
        return d.powf(p);
    }
    a.powf(p) * (p * (d / a).ln_1p()).exp_m1()
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}
