//! The group `G_α` underlying the deterministic square-root algorithm.
//!
//! Fix a square β = α² in F_q^× with α unknown. On the set
//! `{[a] : a ∈ F_q, a ≠ ±α} ∪ {[∞]}` define
//!
//! ```text
//! [a] * [∞]  = [a]
//! [a] * [-a] = [∞]
//! [a1]*[a2]  = [(a1·a2 + β) / (a1 + a2)]      (a1 + a2 ≠ 0)
//! ```
//!
//! This is an abelian group with identity `[∞]`, isomorphic to F_q^× via
//! `ψ: [∞] ↦ 1, [a] ↦ (a+α)/(a−α)` — and, crucially, the law above mentions
//! only β, never α. Everything the square-root engine does happens on this
//! α-free side; ψ and ψ⁻¹ exist here purely as test oracles for the cases
//! where α is known.
//!
//! The membership condition `a ≠ ±α` is equivalent to `a² ≠ β`, so it is
//! checkable without α too. An element failing it is not an error: its
//! square root has been found by accident, and [`GroupCtx::lift`] reports
//! exactly that.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::bigring::{Elem, Ring, RingError};

/// Errors raised when constructing a [`GroupCtx`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupError {
    /// β must be a unit; β = 0 has no α ∈ F_q^×.
    BetaZero,
    /// Strict mode only: Euler's criterion says β is not a square.
    BetaNotASquare,
    /// Euler's criterion misbehaved (composite modulus) in strict mode.
    Ring(RingError),
}

impl fmt::Display for GroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupError::BetaZero => write!(f, "beta must be nonzero"),
            GroupError::BetaNotASquare => write!(f, "beta is not a quadratic residue"),
            GroupError::Ring(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for GroupError {}

impl From<RingError> for GroupError {
    fn from(e: RingError) -> Self {
        GroupError::Ring(e)
    }
}

/// The data defining `G_α`: the ring and β = α². α itself is deliberately
/// absent — no operation in this module can read it.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupCtx {
    ring: Ring,
    beta: Elem,
}

/// An element of `G_α`: the identity `[∞]` or a residue `[a]` with a² ≠ β.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GElem {
    Infinity,
    Finite(Elem),
}

impl fmt::Display for GElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GElem::Infinity => write!(f, "[inf]"),
            GElem::Finite(a) => write!(f, "[{}]", a),
        }
    }
}

impl GElem {
    pub fn is_infinity(&self) -> bool {
        matches!(self, GElem::Infinity)
    }
}

/// Outcome of lifting a residue into `G_α`. Finding a root of β is a
/// success channel, not an error: it short-circuits the whole computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lifted {
    Member(GElem),
    /// `a² = β`: a is a square root of β.
    RootFound(Elem),
}

impl GroupCtx {
    /// Strict construction for prime moduli: β must be a nonzero quadratic
    /// residue per Euler's criterion, so that α exists in the field.
    pub fn new_strict(ring: Ring, beta: Elem) -> Result<GroupCtx, GroupError> {
        if beta.is_zero() {
            return Err(GroupError::BetaZero);
        }
        if !beta.euler_is_square()? {
            return Err(GroupError::BetaNotASquare);
        }
        Ok(GroupCtx { ring, beta })
    }

    /// Ring-mode construction: only β ≠ 0 is required. Used over Z/N where
    /// the Euler pre-check is itself part of the computation being run.
    pub fn new_ring_mode(ring: Ring, beta: Elem) -> Result<GroupCtx, GroupError> {
        if beta.is_zero() {
            return Err(GroupError::BetaZero);
        }
        Ok(GroupCtx { ring, beta })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn beta(&self) -> &Elem {
        &self.beta
    }

    /// Lifts a residue: `Member([a])` when a² ≠ β, `RootFound(a)` when a² = β.
    pub fn lift(&self, a: Elem) -> Lifted {
        if a.square() == self.beta {
            Lifted::RootFound(a)
        } else {
            Lifted::Member(GElem::Finite(a))
        }
    }

    /// The group law, evaluated without α.
    ///
    /// Over a prime modulus the division is always defined in the branch that
    /// performs one (a₁ + a₂ ≠ 0 there); over a composite modulus it can fail,
    /// and the returned gcd witness is a factor of the modulus.
    pub fn star(&self, x: &GElem, y: &GElem) -> Result<GElem, RingError> {
        match (x, y) {
            (GElem::Infinity, _) => Ok(y.clone()),
            (_, GElem::Infinity) => Ok(x.clone()),
            (GElem::Finite(a1), GElem::Finite(a2)) => {
                let denom = a1.add(a2);
                if denom.is_zero() {
                    return Ok(GElem::Infinity);
                }
                let num = a1.mul(a2).add(&self.beta);
                Ok(GElem::Finite(num.div(&denom)?))
            }
        }
    }

    /// `x^k` under the group law by left-to-right binary powering; k = 0
    /// gives `[∞]`.
    pub fn gpow(&self, x: &GElem, k: &BigUint) -> Result<GElem, RingError> {
        if k.is_zero() {
            return Ok(GElem::Infinity);
        }
        let mut acc = GElem::Infinity;
        for i in (0..k.bits()).rev() {
            acc = self.star(&acc, &acc)?;
            if k.bit(i) {
                acc = self.star(&acc, x)?;
            }
        }
        Ok(acc)
    }

    pub fn gpow_u64(&self, x: &GElem, k: u64) -> Result<GElem, RingError> {
        self.gpow(x, &BigUint::from(k))
    }
}

/// Test oracle: the isomorphism ψ: G_α → F_q^×, `[∞] ↦ 1`, `[a] ↦ (a+α)/(a−α)`.
///
/// Requires α² = β in `ctx` and a prime modulus; production call paths never
/// need α, so this is only ever exercised where α is known.
pub fn psi(ctx: &GroupCtx, alpha: &Elem, x: &GElem) -> Elem {
    debug_assert_eq!(alpha.square(), *ctx.beta());
    match x {
        GElem::Infinity => ctx.ring().one(),
        GElem::Finite(a) => {
            let num = a.add(alpha);
            let den = a.sub(alpha);
            num.div(&den)
                .expect("a != alpha for members of G_alpha over a prime modulus")
        }
    }
}

/// Test oracle: ψ⁻¹: F_q^× → G_α, `1 ↦ [∞]`, `b ↦ [α(b+1)/(b−1)]`. b must be
/// a unit.
pub fn psi_inv(ctx: &GroupCtx, alpha: &Elem, b: &Elem) -> GElem {
    debug_assert_eq!(alpha.square(), *ctx.beta());
    assert!(!b.is_zero(), "psi_inv is defined on F_q^x only");
    if b.is_one() {
        return GElem::Infinity;
    }
    let num = alpha.mul(&b.add(&ctx.ring().one()));
    let den = b.sub(&ctx.ring().one());
    GElem::Finite(
        num.div(&den)
            .expect("b != 1 here, so b-1 is a unit over a prime modulus"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigring::Ring;

    fn ctx41() -> GroupCtx {
        let ring = Ring::from_u64(41).unwrap();
        let beta = ring.elem_u64(2);
        GroupCtx::new_strict(ring, beta).unwrap()
    }

    #[test]
    fn lift_examples() {
        let ctx = ctx41();
        // 17² = 289 ≡ 2 (mod 41): accidental root.
        match ctx.lift(ctx.ring().elem_u64(17)) {
            Lifted::RootFound(a) => assert_eq!(a, ctx.ring().elem_u64(17)),
            other => panic!("expected RootFound, got {:?}", other),
        }
        assert_eq!(
            ctx.lift(ctx.ring().elem_u64(0)),
            Lifted::Member(GElem::Finite(ctx.ring().elem_u64(0)))
        );
        assert_eq!(
            ctx.lift(ctx.ring().elem_u64(1)),
            Lifted::Member(GElem::Finite(ctx.ring().elem_u64(1)))
        );
    }

    #[test]
    fn star_examples() {
        let ctx = ctx41();
        let one = GElem::Finite(ctx.ring().elem_u64(1));
        let three = GElem::Finite(ctx.ring().elem_u64(3));
        // (1·3 + 2)·(1 + 3)⁻¹ = 5·31 ≡ 32 (mod 41).
        assert_eq!(
            ctx.star(&one, &three).unwrap(),
            GElem::Finite(ctx.ring().elem_u64(32))
        );
        assert_eq!(ctx.star(&one, &GElem::Infinity).unwrap(), one);
        assert_eq!(ctx.star(&GElem::Infinity, &three).unwrap(), three);
        // 36 ≡ −5: annihilation.
        let five = GElem::Finite(ctx.ring().elem_u64(5));
        let m5 = GElem::Finite(ctx.ring().elem_u64(36));
        assert_eq!(ctx.star(&five, &m5).unwrap(), GElem::Infinity);
    }

    #[test]
    fn gpow_examples() {
        let ctx = ctx41();
        // [0] is the unique element of order 2.
        let zero = GElem::Finite(ctx.ring().elem_u64(0));
        assert_eq!(ctx.gpow_u64(&zero, 2).unwrap(), GElem::Infinity);
        // [1]² = [(1+2)/2] = [3·21] = [22].
        let one = GElem::Finite(ctx.ring().elem_u64(1));
        assert_eq!(
            ctx.gpow_u64(&one, 2).unwrap(),
            GElem::Finite(ctx.ring().elem_u64(22))
        );
        assert_eq!(ctx.gpow_u64(&one, 0).unwrap(), GElem::Infinity);
    }

    #[test]
    fn psi_and_inverse_examples() {
        let ctx = ctx41();
        let alpha = ctx.ring().elem_u64(17);
        assert!(psi(&ctx, &alpha, &GElem::Infinity).is_one());
        // ψ([0]) = −1 independent of α.
        let zero = GElem::Finite(ctx.ring().elem_u64(0));
        assert!(psi(&ctx, &alpha, &zero).is_minus_one());
        // ψ([1]) = 18·(−16)⁻¹ = 18·23 ≡ 4 (mod 41).
        let one = GElem::Finite(ctx.ring().elem_u64(1));
        assert_eq!(psi(&ctx, &alpha, &one), ctx.ring().elem_u64(4));

        assert_eq!(
            psi_inv(&ctx, &alpha, &ctx.ring().one()),
            GElem::Infinity
        );
        assert_eq!(psi_inv(&ctx, &alpha, &ctx.ring().minus_one()), zero);
        // ψ⁻¹(18) = [17·19·17⁻¹] = [19].
        assert_eq!(
            psi_inv(&ctx, &alpha, &ctx.ring().elem_u64(18)),
            GElem::Finite(ctx.ring().elem_u64(19))
        );
    }

    #[test]
    fn strict_mode_rejects_nonresidues_and_zero() {
        let ring = Ring::from_u64(41).unwrap();
        assert!(matches!(
            GroupCtx::new_strict(ring.clone(), ring.elem_u64(3)),
            Err(GroupError::BetaNotASquare)
        ));
        assert!(matches!(
            GroupCtx::new_strict(ring.clone(), ring.zero()),
            Err(GroupError::BetaZero)
        ));
        // Ring mode admits nonresidues (needed over Z/N).
        assert!(GroupCtx::new_ring_mode(ring.clone(), ring.elem_u64(3)).is_ok());
    }

    #[test]
    fn star_surfaces_factors_over_composite_moduli() {
        // Z/15 with β = 2: [1]*[4] divides by 5, a factor of 15.
        let ring = Ring::from_u64(15).unwrap();
        let ctx = GroupCtx::new_ring_mode(ring.clone(), ring.elem_u64(2)).unwrap();
        let a = GElem::Finite(ring.elem_u64(1));
        let b = GElem::Finite(ring.elem_u64(4));
        match ctx.star(&a, &b) {
            Err(RingError::NonInvertible { witness }) => {
                assert_eq!(witness, BigUint::from(5u32));
            }
            other => panic!("expected NonInvertible, got {:?}", other),
        }
    }
}
