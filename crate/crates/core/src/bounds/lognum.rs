//! Iterated-logarithm floating numbers for magnitudes far beyond `f64`.
//!
//! A [`LogNum`] with height `h` and value `v` stands for `10^10^...^v`
//! with `h` exponentiations. Values are kept normalized so that height `0`
//! covers `[0, 1e300]` and every higher height keeps `v` in `[300, 1e300]`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use serde::Serialize;

const HIGH: f64 = 1e300;
const LOW: f64 = 300.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogNum {
    pub height: u32,
    pub value: f64,
}

impl LogNum {
    pub fn new(height: u32, value: f64) -> Self {
        let (mut h, mut v) = (height, value);
        loop {
            if v > HIGH && v.is_finite() {
                v = v.log10();
                h += 1;
            } else if h > 0 && v < LOW {
                v = 10f64.powf(v);
                h -= 1;
            } else {
                break;
            }
        }
        LogNum { height: h, value: v }
    }

    pub fn from_f64(v: f64) -> Self {
        Self::new(0, v)
    }

    pub fn from_biguint(n: &BigUint) -> Self {
        let bits = n.bits();
        if bits <= 900 {
            // exact enough through the f64 conversion
            let f = num_traits::ToPrimitive::to_f64(n).unwrap_or(f64::INFINITY);
            if f.is_finite() && f <= HIGH {
                return Self::new(0, f);
            }
        }
        Self::new(1, log10_biguint(n))
    }

    /// Plain `f64` value when the number is representable.
    pub fn to_f64(self) -> Option<f64> {
        (self.height == 0).then_some(self.value)
    }

    pub fn log10(self) -> LogNum {
        if self.height == 0 {
            LogNum::new(0, self.value.log10())
        } else {
            LogNum::new(self.height - 1, self.value)
        }
    }

    pub fn exp10(self) -> LogNum {
        LogNum::new(self.height + 1, self.value)
    }

    pub fn add(self, other: LogNum) -> LogNum {
        let (big, small) = if self.total_cmp(&other) == Ordering::Less {
            (other, self)
        } else {
            (self, other)
        };
        if big.height == 0 {
            return LogNum::new(0, big.value + small.value);
        }
        if small.height == 0 && small.value <= 0.0 {
            // below one in magnitude, invisible next to anything above 1e300
            return big;
        }
        let (lb, ls) = (big.log10(), small.log10());
        if lb.height == 0 && ls.height == 0 {
            let diff = ls.value - lb.value;
            LogNum::new(0, lb.value + (10f64.powf(diff)).ln_1p() / std::f64::consts::LN_10).exp10()
        } else {
            big
        }
    }

    pub fn mul(self, other: LogNum) -> LogNum {
        if self.height == 0 && other.height == 0 {
            let p = self.value * other.value;
            if p.is_finite() && p <= HIGH {
                return LogNum::new(0, p);
            }
        }
        if self.value == 0.0 && self.height == 0 || other.value == 0.0 && other.height == 0 {
            return LogNum::new(0, 0.0);
        }
        self.log10().add(other.log10()).exp10()
    }

    pub fn pow(self, exponent: LogNum) -> LogNum {
        if self.height == 0 && self.value <= 1.0 {
            // 0^e and 1^e never grow
            return if exponent.height == 0 && exponent.value == 0.0 {
                LogNum::new(0, 1.0)
            } else {
                self
            };
        }
        exponent.mul(self.log10()).exp10()
    }

    pub fn total_cmp(&self, other: &LogNum) -> Ordering {
        self.height
            .cmp(&other.height)
            .then_with(|| self.value.total_cmp(&other.value))
    }

    /// Ordering that refuses to answer when the two top-level values are
    /// within `band` relative distance of each other.
    pub fn cmp_with_band(&self, other: &LogNum, band: f64) -> Option<Ordering> {
        if self.height != other.height {
            return Some(self.height.cmp(&other.height));
        }
        let scale = self.value.abs().max(other.value.abs()).max(1.0);
        if (self.value - other.value).abs() <= band * scale {
            None
        } else {
            Some(self.value.total_cmp(&other.value))
        }
    }
}

impl fmt::Display for LogNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.height {
            0 => write!(f, "{:.6e}", self.value),
            h => {
                for _ in 0..h {
                    f.write_str("10^")?;
                }
                write!(f, "{:.6}", self.value)
            }
        }
    }
}

/// `log10(n)` computed from the top 64 bits, accurate to double precision.
pub fn log10_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        let v: u64 = n.iter_u64_digits().next().unwrap_or(0);
        return (v as f64).log10();
    }
    let shift = bits - 64;
    let top: BigUint = n >> shift;
    let mantissa = top.iter_u64_digits().next().unwrap_or(0) as f64;
    mantissa.log10() + shift as f64 * std::f64::consts::LOG10_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adding_a_negative_to_a_huge_value_is_finite() {
        let big = LogNum::new(1, 5.5e14);
        let r = big.add(LogNum::from_f64(-0.5));
        assert_eq!(r, big);
        let e = LogNum::new(2, 5.5e14).mul(LogNum::from_f64(2f64.log10()));
        assert!(e.value.is_finite());
    }

    #[test]
    fn normalization_moves_between_heights() {
        let x = LogNum::new(0, 1e301);
        assert_eq!(x.height, 1);
        let y = LogNum::new(1, 2.0);
        assert_eq!(y.height, 0);
        assert!((y.value - 100.0).abs() < 1e-9);
    }

    #[test]
    fn huge_power_tracks_iterated_logs() {
        // 2^(2^4096): log10 log10 = 4096 log10 2 + log10 log10 2
        let two = LogNum::from_f64(2.0);
        let e = two.pow(LogNum::from_f64(4096.0));
        let v = two.pow(e);
        assert_eq!(v.height, 2);
        let expected = 4096.0 * std::f64::consts::LOG10_2 + std::f64::consts::LOG10_2.log10();
        assert!((v.value - expected).abs() < 1e-9);
    }

    #[test]
    fn log10_of_bigint_matches_decimal_length() {
        let n = BigUint::from(10u32).pow(500) * BigUint::from(3u32);
        let l = log10_biguint(&n);
        assert!((l - (500.0 + 3f64.log10())).abs() < 1e-12);
    }

    #[test]
    fn band_comparison_refuses_near_ties() {
        let a = LogNum::new(1, 1000.0);
        let b = LogNum::new(1, 1000.0 + 1e-12);
        assert_eq!(a.cmp_with_band(&b, 1e-9), None);
        assert_eq!(a.cmp_with_band(&LogNum::new(1, 1001.0), 1e-9), Some(Ordering::Less));
    }
}
