//! Recognition of a single complex value as an exact element of
//! Q(√-q, √-3) with denominators dividing 4.
//!
//! The real and imaginary parts decouple: Re(z) = (n₀ + n₃√(3q))/4 and
//! Im(z) = (n₁√q + n₂√3)/4. Each part is a two-term integer relation
//! `u·w₁ + v·w₂ ≈ target`, solved exactly as a closest-vector problem in a
//! rank-2 lattice (Gauss reduction, then Babai rounding with a small offset
//! search). A candidate is only accepted if back-substitution leaves a
//! residual below 2^(-bits/2), so a wrong lattice answer can at worst turn
//! into [`PeriodsError::RecognitionFailed`], never a wrong constant.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::periods::float::{div_rounded, Complex, FloatCtx, Real};
use crate::periods::qf::QFElem;
use crate::periods::PeriodsError;

type Vec3 = [BigInt; 3];

fn dot(a: &Vec3, b: &Vec3) -> BigInt {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

fn sub_scaled(a: &Vec3, b: &Vec3, k: &BigInt) -> Vec3 {
    [&a[0] - k * &b[0], &a[1] - k * &b[1], &a[2] - k * &b[2]]
}

/// Integers (u, v) with `u·w₁ + v·w₂` closest to `target` among small
/// combinations; exactness is re-checked by the caller.
fn solve_two(ctx: &FloatCtx, target: &Real, w1: &Real, w2: &Real) -> (BigInt, BigInt) {
    // Lattice basis (Wᵢ, penalty eᵢ) with the penalty keeping coefficients
    // honest; the target sits at (T, 0, 0).
    let penalty = BigInt::from(1) << (ctx.bits / 2);
    let mut u1: Vec3 = [w1.m.clone(), penalty.clone(), BigInt::zero()];
    let mut u2: Vec3 = [w2.m.clone(), BigInt::zero(), penalty];
    // Track coefficients so reduction steps keep (u, v) recoverable.
    let mut c1 = [BigInt::from(1), BigInt::zero()];
    let mut c2 = [BigInt::zero(), BigInt::from(1)];

    // Gauss reduction.
    loop {
        if dot(&u2, &u2) < dot(&u1, &u1) {
            std::mem::swap(&mut u1, &mut u2);
            std::mem::swap(&mut c1, &mut c2);
        }
        let mu = div_rounded(&dot(&u1, &u2), &dot(&u1, &u1));
        if mu.is_zero() {
            break;
        }
        u2 = sub_scaled(&u2, &u1, &mu);
        c2 = [&c2[0] - &mu * &c1[0], &c2[1] - &mu * &c1[1]];
    }

    // Babai on the Gram system, then a local offset search.
    let t: Vec3 = [target.m.clone(), BigInt::zero(), BigInt::zero()];
    let g11 = dot(&u1, &u1);
    let g12 = dot(&u1, &u2);
    let g22 = dot(&u2, &u2);
    let b1 = dot(&t, &u1);
    let b2 = dot(&t, &u2);
    let det = &g11 * &g22 - &g12 * &g12;
    let x1 = div_rounded(&(&b1 * &g22 - &b2 * &g12), &det);
    let x2 = div_rounded(&(&b2 * &g11 - &b1 * &g12), &det);

    let mut best: Option<(BigInt, (BigInt, BigInt))> = None;
    for d1 in -2i8..=2 {
        for d2 in -2i8..=2 {
            let a1 = &x1 + BigInt::from(d1);
            let a2 = &x2 + BigInt::from(d2);
            let cand: Vec3 = [
                &a1 * &u1[0] + &a2 * &u2[0] - &t[0],
                &a1 * &u1[1] + &a2 * &u2[1],
                &a1 * &u1[2] + &a2 * &u2[2],
            ];
            let norm = dot(&cand, &cand);
            let coeffs = (
                &a1 * &c1[0] + &a2 * &c2[0],
                &a1 * &c1[1] + &a2 * &c2[1],
            );
            if best.as_ref().map_or(true, |(n, _)| norm < *n) {
                best = Some((norm, coeffs));
            }
        }
    }
    best.expect("offset grid is non-empty").1
}

/// Recognizes z as (n₀ + n₁√-q + n₂√-3 + n₃√(3q))/4 at the context's
/// precision, failing if the back-substituted residual exceeds 2^(-bits/2).
pub fn recognize(ctx: &FloatCtx, z: &Complex, q: u64) -> Result<QFElem, PeriodsError> {
    if ctx.bits < 64 {
        return Err(PeriodsError::BadPrecision);
    }
    let sqrt_q = ctx.sqrt_u64(q);
    let sqrt_3 = ctx.sqrt_u64(3);
    let sqrt_3q = ctx.sqrt_u64(3 * q);
    let one = ctx.from_i64(1);

    let re4 = ctx.mul_i64(&z.re, 4);
    let im4 = ctx.mul_i64(&z.im, 4);
    let (n0, n3) = solve_two(ctx, &re4, &one, &sqrt_3q);
    let (n1, n2) = solve_two(ctx, &im4, &sqrt_q, &sqrt_3);

    let value = QFElem::new(q, [n0, n1, n2, n3]);
    let back = value.embed(ctx, &sqrt_q, &sqrt_3, &sqrt_3q);
    let dist = ctx.cdist(z, &back);
    if !ctx.abs_lt_pow2(&dist, ctx.bits / 2) {
        return Err(PeriodsError::RecognitionFailed { bits: ctx.bits });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recognizes_rational_and_half_integer_values() {
        let ctx = FloatCtx::new(256);
        let one = Complex {
            re: ctx.from_i64(1),
            im: ctx.zero(),
        };
        assert_eq!(
            recognize(&ctx, &one, 19).unwrap(),
            QFElem::from_i64(19, [4, 0, 0, 0])
        );

        // 9.5 - 8.5·√19·i = (19 - 17√-19)/2.
        let z = Complex {
            re: ctx.from_ratio(&BigInt::from(19), &BigInt::from(2)),
            im: ctx.div_u32(&ctx.mul_i64(&ctx.sqrt_u64(19), -17), 2),
        };
        assert_eq!(
            recognize(&ctx, &z, 19).unwrap(),
            QFElem::from_i64(19, [38, -34, 0, 0])
        );
    }

    #[test]
    fn recognize_round_trips_full_quadruples() {
        let ctx = FloatCtx::new(320);
        let sqrt_q = ctx.sqrt_u64(19);
        let sqrt_3 = ctx.sqrt_u64(3);
        let sqrt_3q = ctx.sqrt_u64(57);
        for nums in [
            [-1007i64, 4373, -10659, 99],
            [2584, -2242, 5700, -342],
            [0, -16, 0, 0],
            [3, 0, 0, -5],
        ] {
            let v = QFElem::from_i64(19, nums);
            let z = v.embed(&ctx, &sqrt_q, &sqrt_3, &sqrt_3q);
            assert_eq!(recognize(&ctx, &z, 19).unwrap(), v, "nums={:?}", nums);
        }
    }

    #[test]
    fn refuses_garbage() {
        let ctx = FloatCtx::new(128);
        // π + e·i is no quarter-integer combination of the basis.
        let z = Complex {
            re: ctx.pi(),
            im: ctx.div_u32(&ctx.pi(), 3),
        };
        assert!(matches!(
            recognize(&ctx, &z, 19),
            Err(PeriodsError::RecognitionFailed { .. })
        ));
    }
}
