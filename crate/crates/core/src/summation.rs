//! Compensated summation and the small series helpers shared by the evaluators.

/// Neumaier's variant of Kahan summation.
///
/// Besides the compensated sum it tracks the sum of absolute values, which
/// bounds the rounding error left after cancellation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
    abs_sum: f64,
}

impl CompensatedSum {
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
        self.abs_sum += x.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Sum of the magnitudes of everything added so far.
    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }

    /// A bound on the accumulated rounding error.
    pub fn rounding_bound(&self) -> f64 {
        4.0 * f64::EPSILON * self.abs_sum
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

/// The stopping rule shared by every power series in the crate: stop at the
/// first index `k > scale` whose term is below `tol` relative to the partial sum.
pub(crate) fn series_done(k: usize, scale: f64, term: f64, partial: f64, tol: f64) -> bool {
    (k as f64) > scale && (term.abs() <= tol * partial.abs() || term.abs() < f64::MIN_POSITIVE)
}

const FACTORIALS: [f64; 26] = {
    let mut t = [1.0; 26];
    let mut i = 1;
    while i < 26 {
        t[i] = t[i - 1] * i as f64;
        i += 1;
    }
    t
};

/// n! as a float (exact through 22!).
pub fn factorial(n: usize) -> f64 {
    if n < FACTORIALS.len() {
        FACTORIALS[n]
    } else {
        (FACTORIALS.len()..=n).fold(FACTORIALS[FACTORIALS.len() - 1], |acc, k| acc * k as f64)
    }
}

/// `(e^z - sum_{i<m} z^i/i!) / z^m`, evaluated without cancellation near zero.
///
/// The Maclaurin tail is summed directly for `|z| <= m + 2`; beyond that the
/// subtraction is benign.
pub fn exp_remainder_scaled(z: f64, m: usize) -> f64 {
    if m == 0 {
        return z.exp();
    }
    if z.abs() <= m as f64 + 2.0 {
        let mut term = 1.0 / factorial(m);
        let mut s = CompensatedSum::new();
        s.add(term);
        let mut j = 0usize;
        loop {
            j += 1;
            term *= z / (m + j) as f64;
            s.add(term);
            if term.abs() <= 1e-18 * s.value().abs() || j > 200 {
                break;
            }
        }
        s.value()
    } else {
        let mut s = CompensatedSum::new();
        s.add(z.exp());
        let mut p = 1.0;
        for i in 0..m {
            s.add(-p);
            p *= z / (i + 1) as f64;
        }
        s.value() / z.powi(m as i32)
    }
}

/// `ln^r(u)` with `r = 0` giving exactly one.
pub(crate) fn ln_pow(ln_u: f64, r: usize) -> f64 {
    ln_u.powi(r as i32)
}
