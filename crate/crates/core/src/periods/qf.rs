//! Exact elements of Q(√-q, √-3) with denominators dividing 4.
//!
//! A [`QFElem`] stores the numerator quadruple (n₀, n₁, n₂, n₃) of
//!
//! ```text
//! (n₀ + n₁·√-q + n₂·√-3 + n₃·√(3q)) / 4
//! ```
//!
//! under the sign convention `√-q · √-3 = -√(3q)`, which matches the
//! principal-branch embedding `√-q = i√q`, `√-3 = i√3`. Every constant the
//! tower recognizes is an algebraic integer of this field, so quarters are
//! enough.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::bigring::{Elem, Ring, RingError};
use crate::periods::float::{Complex, FloatCtx, Real};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QFElem {
    q: u64,
    /// Numerators over the fixed denominator 4.
    num: [BigInt; 4],
}

impl QFElem {
    pub fn new(q: u64, num: [BigInt; 4]) -> QFElem {
        QFElem { q, num }
    }

    pub fn from_i64(q: u64, num: [i64; 4]) -> QFElem {
        QFElem {
            q,
            num: num.map(BigInt::from),
        }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn numerators(&self) -> &[BigInt; 4] {
        &self.num
    }

    pub fn is_rational(&self) -> bool {
        self.num[1].is_zero() && self.num[2].is_zero() && self.num[3].is_zero()
    }

    /// True when the √-3 and √(3q) components vanish, i.e. the value lies in
    /// Q(√-q).
    pub fn in_sqrt_minus_q_field(&self) -> bool {
        self.num[2].is_zero() && self.num[3].is_zero()
    }

    pub fn add(&self, other: &QFElem) -> QFElem {
        assert_eq!(self.q, other.q);
        QFElem {
            q: self.q,
            num: [
                &self.num[0] + &other.num[0],
                &self.num[1] + &other.num[1],
                &self.num[2] + &other.num[2],
                &self.num[3] + &other.num[3],
            ],
        }
    }

    pub fn sub(&self, other: &QFElem) -> QFElem {
        assert_eq!(self.q, other.q);
        QFElem {
            q: self.q,
            num: [
                &self.num[0] - &other.num[0],
                &self.num[1] - &other.num[1],
                &self.num[2] - &other.num[2],
                &self.num[3] - &other.num[3],
            ],
        }
    }

    /// Conjugation sending √-3 to -√-3 (and so √(3q) to -√(3q)); this is the
    /// pairing involution of the tower.
    pub fn conj_sqrt3(&self) -> QFElem {
        QFElem {
            q: self.q,
            num: [
                self.num[0].clone(),
                self.num[1].clone(),
                -&self.num[2],
                -&self.num[3],
            ],
        }
    }

    /// Exact product. Returns `None` when the result is not representable
    /// over denominator 4 (the constants this crate manipulates always are).
    ///
    /// Basis products, writing b₁ = √-q, b₂ = √-3, b₃ = √(3q) = -b₁b₂:
    /// b₁² = -q, b₂² = -3, b₃² = 3q, b₁b₂ = -b₃, b₁b₃ = q·b₂, b₂b₃ = 3·b₁.
    pub fn mul(&self, other: &QFElem) -> Option<QFElem> {
        assert_eq!(self.q, other.q);
        let q = BigInt::from(self.q);
        let x = &self.num;
        let y = &other.num;
        let c0 = &x[0] * &y[0] - (&x[1] * &y[1]) * &q - (&x[2] * &y[2]) * 3
            + (&x[3] * &y[3]) * 3 * &q;
        let c1 = &x[0] * &y[1] + &x[1] * &y[0] + (&x[2] * &y[3] + &x[3] * &y[2]) * 3;
        let c2 = &x[0] * &y[2] + &x[2] * &y[0] + (&x[1] * &y[3] + &x[3] * &y[1]) * &q;
        let c3 = &x[0] * &y[3] + &x[3] * &y[0] - (&x[1] * &y[2] + &x[2] * &y[1]);
        let four = BigInt::from(4);
        let mut out = [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
        for (slot, c) in out.iter_mut().zip([c0, c1, c2, c3]) {
            if (&c % &four) != BigInt::zero() {
                return None;
            }
            *slot = c / &four;
        }
        Some(QFElem { q: self.q, num: out })
    }

    /// Numeric embedding: Re = (n₀ + n₃√(3q))/4, Im = (n₁√q + n₂√3)/4.
    pub fn embed(&self, ctx: &FloatCtx, sqrt_q: &Real, sqrt_3: &Real, sqrt_3q: &Real) -> Complex {
        let re = ctx.add(
            &ctx.from_bigint(&self.num[0]),
            &ctx.mul(&ctx.from_bigint(&self.num[3]), sqrt_3q),
        );
        let im = ctx.add(
            &ctx.mul(&ctx.from_bigint(&self.num[1]), sqrt_q),
            &ctx.mul(&ctx.from_bigint(&self.num[2]), sqrt_3),
        );
        Complex {
            re: ctx.div_u32(&re, 4),
            im: ctx.div_u32(&im, 4),
        }
    }

    /// Reduction mod p given fixed square roots s_q = √-q and s₃ = √-3;
    /// √(3q) maps to -s_q·s₃ per the sign convention.
    pub fn map_mod_p(&self, ring: &Ring, s_q: &Elem, s_3: &Elem) -> Result<Elem, RingError> {
        let s_3q = s_q.mul(s_3).neg();
        let mut acc = ring.elem_bigint(&self.num[0]);
        acc = acc.add(&ring.elem_bigint(&self.num[1]).mul(s_q));
        acc = acc.add(&ring.elem_bigint(&self.num[2]).mul(s_3));
        acc = acc.add(&ring.elem_bigint(&self.num[3]).mul(&s_3q));
        acc.div(&ring.elem_u64(4))
    }

    /// Canonical string quadruple for serialization.
    pub fn to_strings(&self) -> [String; 4] {
        [
            self.num[0].to_string(),
            self.num[1].to_string(),
            self.num[2].to_string(),
            self.num[3].to_string(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_respects_basis_relations() {
        // (√-19)² = -19.
        let b1 = QFElem::from_i64(19, [0, 4, 0, 0]);
        assert_eq!(
            b1.mul(&b1).unwrap(),
            QFElem::from_i64(19, [-19 * 4, 0, 0, 0])
        );
        // √-19 · √-3 = -√57.
        let b2 = QFElem::from_i64(19, [0, 0, 4, 0]);
        assert_eq!(b1.mul(&b2).unwrap(), QFElem::from_i64(19, [0, 0, 0, -4]));
        // (√57)² = 57.
        let b3 = QFElem::from_i64(19, [0, 0, 0, 4]);
        assert_eq!(b3.mul(&b3).unwrap(), QFElem::from_i64(19, [57 * 4, 0, 0, 0]));
        // Halves multiply into quarters: ((1 + √-19)/2)² = (-18 + 2√-19)/4
        // = (-9 + √-19)/2.
        let h = QFElem::from_i64(19, [2, 2, 0, 0]);
        assert_eq!(h.mul(&h).unwrap(), QFElem::from_i64(19, [-18, 2, 0, 0]));
        // Genuine quarters times quarters can fall outside denominator 4.
        let quarter = QFElem::from_i64(19, [1, 0, 0, 0]);
        assert!(quarter.mul(&quarter).is_none());
    }

    #[test]
    fn embedding_matches_mod_p_reduction_shape() {
        let ctx = FloatCtx::new(192);
        let sq = ctx.sqrt_u64(19);
        let s3 = ctx.sqrt_u64(3);
        let s3q = ctx.sqrt_u64(57);
        // x = (19 - 17√-19 - 57√-3 + 9√57)/4, |x| finite and nonzero.
        let x = QFElem::from_i64(19, [19, -17, -57, 9]);
        let z = x.embed(&ctx, &sq, &s3, &s3q);
        // Re = (19 + 9√57)/4 ≈ 21.74; Im = (-17√19 - 57√3)/4 ≈ -43.21.
        let re_check = ctx.div_u32(
            &ctx.add(&ctx.from_i64(19), &ctx.mul_i64(&s3q, 9)),
            4,
        );
        assert!(ctx.abs_lt_pow2(&ctx.sub(&z.re, &re_check), 150));
    }
}
