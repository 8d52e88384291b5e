//! Compensated accumulation for large cancelling sums.
//!
//! Exponential sums over 10^5..10^6 points cancel almost completely away
//! from Bragg positions; plain accumulation would lose the signal in
//! rounding noise. Neumaier's variant of Kahan summation keeps the error
//! at a few ulps independent of length.

/// Neumaier-compensated scalar accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Kahan::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated accumulator for complex values, component-wise.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanComplex {
    pub re: Kahan,
    pub im: Kahan,
}

impl KahanComplex {
    pub fn new() -> Self {
        KahanComplex::default()
    }

    #[inline]
    pub fn add(&mut self, re: f64, im: f64) {
        self.re.add(re);
        self.im.add(im);
    }

    pub fn total(&self) -> (f64, f64) {
        (self.re.total(), self.im.total())
    }
}
