//! Fixed-point arbitrary-precision real and complex arithmetic.
//!
//! A value is a `BigInt` mantissa at a global binary scale: `Real { m }`
//! represents `m / 2^bits` for the `bits` of the owning [`FloatCtx`]. This is
//! enough for the tower builder: addition is exact, multiplication rounds to
//! one ulp, and the transcendental entry points (π by Machin's formula,
//! `e^{iθ}` by its Taylor series) carry per-term error of a few ulps. All of
//! it is deterministic, which the recognition layer relies on.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FloatCtx {
    pub bits: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Real {
    pub(crate) m: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl FloatCtx {
    pub fn new(bits: u32) -> FloatCtx {
        FloatCtx { bits }
    }

    fn scale(&self) -> BigInt {
        BigInt::one() << self.bits
    }

    pub fn zero(&self) -> Real {
        Real { m: BigInt::zero() }
    }

    pub fn from_bigint(&self, v: &BigInt) -> Real {
        Real { m: v << self.bits }
    }

    pub fn from_i64(&self, v: i64) -> Real {
        Real {
            m: BigInt::from(v) << self.bits,
        }
    }

    /// v / d at full precision (rounded to the nearest ulp).
    pub fn from_ratio(&self, v: &BigInt, d: &BigInt) -> Real {
        Real {
            m: div_rounded(&(v << self.bits), d),
        }
    }

    pub fn add(&self, a: &Real, b: &Real) -> Real {
        Real { m: &a.m + &b.m }
    }

    pub fn sub(&self, a: &Real, b: &Real) -> Real {
        Real { m: &a.m - &b.m }
    }

    pub fn neg(&self, a: &Real) -> Real {
        Real { m: -&a.m }
    }

    pub fn mul(&self, a: &Real, b: &Real) -> Real {
        Real {
            m: shift_right_rounded(&(&a.m * &b.m), self.bits),
        }
    }

    pub fn mul_i64(&self, a: &Real, k: i64) -> Real {
        Real { m: &a.m * k }
    }

    pub fn div(&self, a: &Real, b: &Real) -> Real {
        Real {
            m: div_rounded(&(&a.m << self.bits), &b.m),
        }
    }

    pub fn div_u32(&self, a: &Real, d: u32) -> Real {
        Real {
            m: div_rounded(&a.m, &BigInt::from(d)),
        }
    }

    pub fn abs(&self, a: &Real) -> Real {
        Real { m: a.m.abs() }
    }

    /// |a| < 2^(-k): the mantissa test `|m| < 2^(bits-k)`.
    pub fn abs_lt_pow2(&self, a: &Real, neg_exp: u32) -> bool {
        debug_assert!(neg_exp <= self.bits);
        a.m.magnitude().bits() < (self.bits - neg_exp) as u64 + 1
            && a.m.magnitude() < &(BigUint::one() << (self.bits - neg_exp))
    }

    /// √v for a small non-negative integer v, by integer square root.
    pub fn sqrt_u64(&self, v: u64) -> Real {
        let big = BigUint::from(v) << (2 * self.bits);
        Real {
            m: BigInt::from(big.sqrt()),
        }
    }

    /// Nearest integer to the value.
    pub fn round_to_bigint(&self, a: &Real) -> BigInt {
        shift_right_rounded(&a.m, self.bits)
    }

    /// π by Machin's formula: π = 16·atan(1/5) − 4·atan(1/239).
    pub fn pi(&self) -> Real {
        let a5 = self.atan_inv(5);
        let a239 = self.atan_inv(239);
        Real {
            m: &a5.m * 16 - &a239.m * 4,
        }
    }

    /// atan(1/x) for integer x ≥ 2 via the alternating series.
    fn atan_inv(&self, x: i64) -> Real {
        let xx = BigInt::from(x) * BigInt::from(x);
        let mut term = div_rounded(&self.scale(), &BigInt::from(x));
        let mut sum = BigInt::zero();
        let mut k = 0u32;
        while !term.is_zero() {
            let contrib = div_rounded(&term, &BigInt::from(2 * k + 1));
            if k % 2 == 0 {
                sum += &contrib;
            } else {
                sum -= &contrib;
            }
            term = div_rounded(&term, &xx);
            k += 1;
        }
        Real { m: sum }
    }

    /// e^{iθ} by the Taylor series of the exponential; |θ| should be O(1).
    pub fn exp_i(&self, theta: &Real) -> Complex {
        let mut acc = Complex {
            re: self.zero(),
            im: self.zero(),
        };
        // term_{k+1} = term_k · iθ / (k+1)
        let mut term = Complex {
            re: self.from_i64(1),
            im: self.zero(),
        };
        let mut k = 0u32;
        while !term.re.m.is_zero() || !term.im.m.is_zero() {
            acc = self.cadd(&acc, &term);
            let rotated = Complex {
                re: self.neg(&self.mul(&term.im, theta)),
                im: self.mul(&term.re, theta),
            };
            term = Complex {
                re: self.div_u32(&rotated.re, k + 1),
                im: self.div_u32(&rotated.im, k + 1),
            };
            k += 1;
            assert!(k < 100_000, "exp_i did not converge");
        }
        acc
    }

    /// The table ζ^0, ζ^1, …, ζ^(q-1) for ζ = e^{2πi/q}.
    pub fn roots_of_unity(&self, q: u64) -> Vec<Complex> {
        let two_pi = Real {
            m: &self.pi().m * 2,
        };
        let theta = Real {
            m: div_rounded(&two_pi.m, &BigInt::from(q)),
        };
        let zeta = self.exp_i(&theta);
        let mut table = Vec::with_capacity(q as usize);
        table.push(Complex {
            re: self.from_i64(1),
            im: self.zero(),
        });
        for i in 1..q as usize {
            let prev = &table[i - 1];
            table.push(self.cmul(prev, &zeta));
        }
        table
    }

    pub fn cadd(&self, a: &Complex, b: &Complex) -> Complex {
        Complex {
            re: self.add(&a.re, &b.re),
            im: self.add(&a.im, &b.im),
        }
    }

    pub fn csub(&self, a: &Complex, b: &Complex) -> Complex {
        Complex {
            re: self.sub(&a.re, &b.re),
            im: self.sub(&a.im, &b.im),
        }
    }

    pub fn cmul(&self, a: &Complex, b: &Complex) -> Complex {
        Complex {
            re: self.sub(&self.mul(&a.re, &b.re), &self.mul(&a.im, &b.im)),
            im: self.add(&self.mul(&a.re, &b.im), &self.mul(&a.im, &b.re)),
        }
    }

    pub fn ccube(&self, a: &Complex) -> Complex {
        self.cmul(&self.cmul(a, a), a)
    }

    pub fn cpow_u64(&self, a: &Complex, mut e: u64) -> Complex {
        let mut base = a.clone();
        let mut acc = Complex {
            re: self.from_i64(1),
            im: self.zero(),
        };
        while e > 0 {
            if e & 1 == 1 {
                acc = self.cmul(&acc, &base);
            }
            base = self.cmul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// max(|Re|, |Im|) of a − b as a Real.
    pub fn cdist(&self, a: &Complex, b: &Complex) -> Real {
        let dr = self.sub(&a.re, &b.re).m.abs();
        let di = self.sub(&a.im, &b.im).m.abs();
        Real { m: dr.max(di) }
    }
}

/// Division rounded to the nearest integer (ties toward +∞).
pub(crate) fn div_rounded(a: &BigInt, b: &BigInt) -> BigInt {
    debug_assert!(!b.is_zero());
    let (num, den) = if b.is_negative() {
        (-a, -b)
    } else {
        (a.clone(), b.clone())
    };
    let half: BigInt = &den >> 1;
    (num + half).div_floor(&den)
}

/// a / 2^k rounded to the nearest integer (ties toward +∞).
pub(crate) fn shift_right_rounded(a: &BigInt, k: u32) -> BigInt {
    if k == 0 {
        return a.clone();
    }
    (a + (BigInt::one() << (k - 1))).div_floor(&(BigInt::one() << k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_matches_reference_digits() {
        let ctx = FloatCtx::new(200);
        let pi = ctx.pi();
        // π·10^30 rounded: 3141592653589793238462643383280 (next digit 5...).
        let scaled = ctx.round_to_bigint(&Real {
            m: &pi.m * BigInt::from(10u8).pow(30),
        });
        assert_eq!(
            scaled.to_string(),
            "3141592653589793238462643383280"
        );
    }

    #[test]
    fn exp_i_lands_on_the_unit_circle() {
        let ctx = FloatCtx::new(256);
        let third = ctx.from_ratio(&(BigInt::from(2)), &BigInt::from(3));
        let theta = ctx.mul(&ctx.pi(), &third); // 2π/3
        let z = ctx.exp_i(&theta);
        // e^{2πi/3} = (-1 + i√3)/2.
        let expect = Complex {
            re: ctx.from_ratio(&BigInt::from(-1), &BigInt::from(2)),
            im: ctx.div_u32(&ctx.sqrt_u64(3), 2),
        };
        assert!(ctx.abs_lt_pow2(&ctx.cdist(&z, &expect), 240));
    }

    #[test]
    fn roots_of_unity_close_cyclically() {
        let ctx = FloatCtx::new(192);
        let table = ctx.roots_of_unity(7);
        assert_eq!(table.len(), 7);
        let prod = ctx.cmul(&table[3], &table[4]); // ζ^3·ζ^4 = ζ^7 = 1
        let one = Complex {
            re: ctx.from_i64(1),
            im: ctx.zero(),
        };
        assert!(ctx.abs_lt_pow2(&ctx.cdist(&prod, &one), 150));
    }

    #[test]
    fn sqrt_u64_squares_back() {
        let ctx = FloatCtx::new(256);
        for v in [2u64, 3, 19, 57, 3 * 487] {
            let s = ctx.sqrt_u64(v);
            let sq = ctx.mul(&s, &s);
            let diff = ctx.sub(&sq, &ctx.from_i64(v as i64));
            assert!(ctx.abs_lt_pow2(&diff, 250), "v={}", v);
        }
    }

    #[test]
    fn rounding_helpers() {
        assert_eq!(shift_right_rounded(&BigInt::from(5), 1), BigInt::from(3));
        assert_eq!(shift_right_rounded(&BigInt::from(-5), 1), BigInt::from(-2));
        assert_eq!(shift_right_rounded(&BigInt::from(-6), 1), BigInt::from(-3));
        assert_eq!(div_rounded(&BigInt::from(7), &BigInt::from(2)), BigInt::from(4));
        assert_eq!(div_rounded(&BigInt::from(-7), &BigInt::from(2)), BigInt::from(-3));
        assert_eq!(div_rounded(&BigInt::from(7), &BigInt::from(-2)), BigInt::from(-3));
        assert_eq!(div_rounded(&BigInt::from(-7), &BigInt::from(3)), BigInt::from(-2));
    }
}
