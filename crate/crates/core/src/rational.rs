//! Best rational approximation of floats, used for human-readable reports.

use core::fmt;

/// A reduced fraction `num / den` with `den >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub num: i64,
    pub den: u64,
}

impl Ratio {
    /// Reduced `num / den`; `den` must be positive.
    pub fn new(num: i64, den: u64) -> Self {
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        let g = gcd(num.unsigned_abs(), den).max(1);
        Self { num: num / g as i64, den: den / g }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Closest fraction to `x` whose denominator does not exceed `max_den`,
/// found by walking the continued-fraction expansion and checking the last
/// semiconvergent.
pub fn approximate(x: f64, max_den: u64) -> Ratio {
    assert!(max_den >= 1);
    if !x.is_finite() {
        return Ratio { num: 0, den: 1 };
    }
    let negative = x < 0.0;
    let target = x.abs();

    // Convergents h/k.
    let (mut h_prev, mut h) = (0i128, 1i128);
    let (mut k_prev, mut k) = (1i128, 0i128);
    let mut rest = target;
    let max_den = max_den as i128;
    loop {
        let a = libm::floor(rest);
        if a > 1e15 {
            break;
        }
        let a = a as i128;
        let h_next = a * h + h_prev;
        let k_next = a * k + k_prev;
        if k_next > max_den {
            // Best semiconvergent with the largest admissible multiplier.
            let m = (max_den - k_prev) / k;
            let h_semi = m * h + h_prev;
            let k_semi = m * k + k_prev;
            if k_semi > 0 {
                let err_semi = (target - h_semi as f64 / k_semi as f64).abs();
                let err_conv = (target - h as f64 / k as f64).abs();
                if err_semi < err_conv {
                    h = h_semi;
                    k = k_semi;
                }
            }
            break;
        }
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
        let frac = rest - a as f64;
        if frac < 1e-12 {
            break;
        }
        rest = 1.0 / frac;
    }
    let num = if negative { -(h as i64) } else { h as i64 };
    Ratio { num, den: k as u64 }
}
