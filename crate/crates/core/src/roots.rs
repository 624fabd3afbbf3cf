//! Root-of-unity constructions and fixed-size square roots.
//!
//! Two bounded searches build primitive roots of unity without taking square
//! roots: for an odd prime r with `q = r^e·t + 1`, scanning `t + 1` candidates
//! is guaranteed to leave the t-torsion subgroup, and pinning down the r-part
//! of the witness's order yields an element of exact order r. The same idea
//! with `2t + 1` candidates produces a fourth root of unity. Candidates are
//! enumerated as g = 1, 2, 3, … so both searches are fully deterministic.
//!
//! Cube roots come from a single exponentiation when `p ≡ 4, 7 (mod 9)`
//! (and `p ≡ 1 (mod 4)`): `b^((2p+1)/9)` resp. `b^((p+2)/9)` cubes back to a
//! cubic residue b.
//!
//! [`fixed_sqrt`] extracts square roots of small constants (−1, −3, 5, …).
//! For `p ≢ 1 (mod 8)` it uses the classical exponentiation formulas; for
//! `p ≡ 1 (mod 8)` it falls back to Tonelli–Shanks seeded by the least
//! nonresidue found by scanning 2, 3, 4, …. The procedure is deterministic
//! throughout; only its worst-case running time for the `p ≡ 1 (mod 8)`
//! branch is conditional (the least nonresidue is O(log² p) under ERH).

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bigring::{Elem, Ring, RingError};
use crate::primes::is_prime_u64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootsError {
    /// The requested order r does not divide q − 1.
    OrderDoesNotDivide { r: u64 },
    /// Every candidate stayed inside the torsion subgroup. Impossible over a
    /// prime field; signals a composite modulus.
    NoWitnessFound,
    /// A precondition on the modulus shape was violated (e.g. 2-adic
    /// valuation too small for a fourth root of unity).
    PrecondViolated { reason: &'static str },
    /// `b^((p-1)/3) ≠ 1`: b has no cube root by this formula.
    NotCubicResidue,
    /// p is not in the residue classes where the cube-root formula applies.
    WrongResidueClass,
    /// Euler's criterion rejects the value as a square.
    NotASquare,
    /// An identity that holds over every prime field failed mid-search:
    /// the modulus is composite.
    CompositeSignal { step: &'static str },
    Ring(RingError),
}

impl fmt::Display for RootsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootsError::OrderDoesNotDivide { r } => {
                write!(f, "order {} does not divide q-1", r)
            }
            RootsError::NoWitnessFound => {
                write!(f, "no witness outside the torsion subgroup (composite modulus?)")
            }
            RootsError::PrecondViolated { reason } => write!(f, "precondition violated: {}", reason),
            RootsError::NotCubicResidue => write!(f, "value is not a cubic residue"),
            RootsError::WrongResidueClass => {
                write!(f, "modulus is not in a residue class with easy cube roots")
            }
            RootsError::NotASquare => write!(f, "value is not a quadratic residue"),
            RootsError::CompositeSignal { step } => {
                write!(f, "prime-field identity failed at {} (composite modulus)", step)
            }
            RootsError::Ring(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for RootsError {}

impl From<RingError> for RootsError {
    fn from(e: RingError) -> Self {
        RootsError::Ring(e)
    }
}

/// Shape data for a root-of-unity search: `q = r^e·t + 1` with gcd(r, t) = 1
/// (order 4 uses `q = 2^e·t + 1` with t odd).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaSpec {
    order: u64,
    e: u32,
    t: BigUint,
}

impl ZetaSpec {
    /// Derives the spec from a modulus: extracts the full r-adic (or 2-adic)
    /// valuation of q − 1.
    pub fn for_order(q: &BigUint, order: u64) -> Result<ZetaSpec, RootsError> {
        if order == 4 {
            let (e, t) = split_valuation(q, 2);
            if e <= 1 {
                return Err(RootsError::PrecondViolated {
                    reason: "need 4 | q-1 for a primitive 4th root of unity",
                });
            }
            return Ok(ZetaSpec { order: 4, e, t });
        }
        if order < 3 || order % 2 == 0 || !is_prime_u64(order) {
            return Err(RootsError::PrecondViolated {
                reason: "order must be an odd prime or 4",
            });
        }
        let (e, t) = split_valuation(q, order);
        if e == 0 {
            return Err(RootsError::OrderDoesNotDivide { r: order });
        }
        Ok(ZetaSpec { order, e, t })
    }

    /// Builds a spec from known parts; `find_zeta_*` re-checks the defining
    /// identity against the ring it is used with.
    pub fn from_parts(order: u64, e: u32, t: BigUint) -> ZetaSpec {
        ZetaSpec { order, e, t }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn t(&self) -> &BigUint {
        &self.t
    }

    fn check_against(&self, ring: &Ring) -> Result<(), RootsError> {
        let base = if self.order == 4 { 2u64 } else { self.order };
        let reassembled = BigUint::from(base).pow(self.e) * &self.t + 1u32;
        if &reassembled != ring.modulus() {
            return Err(RootsError::PrecondViolated {
                reason: "spec does not match the ring modulus",
            });
        }
        Ok(())
    }
}

/// Splits q − 1 = base^e · t with base ∤ t.
fn split_valuation(q: &BigUint, base: u64) -> (u32, BigUint) {
    let b = BigUint::from(base);
    let mut t = q - 1u32;
    let mut e = 0u32;
    while (&t % &b).is_zero() {
        t /= &b;
        e += 1;
    }
    (e, t)
}

/// Largest k ≥ 0 with `g^((q-1)/base^k) = 1`, scanning k upward from 0.
///
/// Over a prime field k = 0 always holds (Fermat); a failure there is a
/// composite signal. The scan is bounded by `e` because `g^t ≠ 1` at the top.
fn largest_k(g: &Elem, base: u64, e: u32) -> Result<u32, RootsError> {
    let q1 = g.ring().modulus() - 1u32;
    let b = BigUint::from(base);
    if !g.pow(&q1).is_one() {
        return Err(RootsError::CompositeSignal {
            step: "fermat check in order search",
        });
    }
    let mut k = 0u32;
    let mut exp = q1;
    while k < e {
        let next = &exp / &b;
        if !g.pow(&next).is_one() {
            break;
        }
        exp = next;
        k += 1;
    }
    Ok(k)
}

/// Constructs a primitive r-th root of unity for an odd prime r | q − 1.
///
/// Scans g = 1, 2, …, t + 1 for the first g with `g^t ≠ 1` (the t-torsion
/// subgroup has only t elements, so a prime modulus guarantees a hit), then
/// returns `g^((q-1)/r^(k+1))` for the largest k with `g^((q-1)/r^k) = 1`.
pub fn find_zeta_r(ring: &Ring, spec: &ZetaSpec) -> Result<Elem, RootsError> {
    if spec.order == 4 || spec.order % 2 == 0 {
        return Err(RootsError::PrecondViolated {
            reason: "find_zeta_r needs an odd prime order",
        });
    }
    spec.check_against(ring)?;
    let witness = first_outside_torsion(ring, &spec.t, spec.t() + 1u32)?;
    let k = largest_k(&witness, spec.order, spec.e)?;
    // k ≤ e - 1 always: at k = e the power is g^t ≠ 1 by witness choice.
    let exp = (ring.modulus() - 1u32) / BigUint::from(spec.order).pow(k + 1);
    Ok(witness.pow(&exp))
}

/// Constructs a primitive 4th root of unity for `q = 2^e·t + 1`, e > 1, t odd.
///
/// Scans g = 1, 2, …, 2t + 1 for the first g with `g^(2t) ≠ 1`, then returns
/// `g^((q-1)/2^(k+2))` for the largest k with `g^((q-1)/2^k) = 1`. The result
/// is verified to square to −1; over a prime modulus that is a theorem, so a
/// failure is a composite signal.
pub fn find_zeta4(ring: &Ring, spec: &ZetaSpec) -> Result<Elem, RootsError> {
    if spec.order != 4 {
        return Err(RootsError::PrecondViolated {
            reason: "find_zeta4 needs order 4",
        });
    }
    if spec.e <= 1 {
        return Err(RootsError::PrecondViolated {
            reason: "need 4 | q-1 for a primitive 4th root of unity",
        });
    }
    spec.check_against(ring)?;
    let two_t = &spec.t * 2u32;
    let witness = first_outside_torsion(ring, &two_t, &two_t + 1u32)?;
    let k = largest_k(&witness, 2, spec.e)?;
    if k + 2 > spec.e {
        // Over a prime field the witness's order has 2-adic valuation ≥ 2,
        // forcing k ≤ e - 2.
        return Err(RootsError::CompositeSignal {
            step: "4 does not divide the witness order",
        });
    }
    let exp = (ring.modulus() - 1u32) >> (k + 2);
    let zeta = witness.pow(&exp);
    if zeta.square() != ring.minus_one() {
        return Err(RootsError::CompositeSignal {
            step: "zeta4 verification",
        });
    }
    Ok(zeta)
}

/// First g in 1, 2, …, limit with `g^torsion ≠ 1`.
fn first_outside_torsion(
    ring: &Ring,
    torsion: &BigUint,
    limit: BigUint,
) -> Result<Elem, RootsError> {
    let mut g = BigUint::one();
    while g <= limit {
        let cand = ring.elem(g.clone());
        if cand.is_zero() {
            // Candidates must stay in the unit range; only reachable when
            // limit ≥ modulus, which a prime modulus never produces.
            return Err(RootsError::NoWitnessFound);
        }
        if !cand.pow(torsion).is_one() {
            return Ok(cand);
        }
        g += 1u32;
    }
    Err(RootsError::NoWitnessFound)
}

/// Cube root over F_p for `p ≡ 1 (mod 4)` and `p ≡ 4, 7 (mod 9)`, as a single
/// exponentiation; the other two roots are this value times ζ₃ and ζ₃².
pub fn cube_root(ring: &Ring, b: &Elem) -> Result<Elem, RootsError> {
    let p = ring.modulus();
    let p_mod_4 = (p % 4u32).to_u32_digits().first().copied().unwrap_or(0);
    let p_mod_9 = (p % 9u32).to_u32_digits().first().copied().unwrap_or(0);
    if p_mod_4 != 1 || !(p_mod_9 == 4 || p_mod_9 == 7) {
        return Err(RootsError::WrongResidueClass);
    }
    let third = (p - 1u32) / 3u32;
    if !b.pow(&third).is_one() {
        return Err(RootsError::NotCubicResidue);
    }
    let exp = if p_mod_9 == 4 {
        (p * 2u32 + 1u32) / 9u32
    } else {
        (p + 2u32) / 9u32
    };
    Ok(b.pow(&exp))
}

/// Square root formulas valid when `p ≢ 1 (mod 8)`; the caller must have
/// verified that `a` is a nonzero quadratic residue. Returns `None` when
/// `p ≡ 1 (mod 8)`.
pub(crate) fn easy_formula_sqrt(a: &Elem) -> Option<Elem> {
    let p = a.ring().modulus();
    let p_mod_8 = (p % 8u32).to_u32_digits().first().copied().unwrap_or(0);
    match p_mod_8 {
        3 | 7 => {
            // p ≡ 3 (mod 4): a^((p+1)/4).
            Some(a.pow(&((p + 1u32) >> 2)))
        }
        5 => {
            // Atkin: v = (2a)^((p-5)/8), i = 2av², root = av(i-1), i² = -1.
            let two_a = a.add(a);
            let v = two_a.pow(&((p - 5u32) >> 3));
            let i = two_a.mul(&v.square());
            let one = a.ring().one();
            Some(a.mul(&v).mul(&i.sub(&one)))
        }
        _ => None,
    }
}

/// Deterministic square root of a small signed constant c over F_p.
///
/// Stand-in for a fixed-size deterministic square-root subroutine: the
/// procedure below is deterministic as computed, but its polynomial running
/// time for `p ≡ 1 (mod 8)` rests on the least quadratic nonresidue being
/// small, which is only known under ERH. Returns `min(x, p-x)`.
pub fn fixed_sqrt(ring: &Ring, c: i64) -> Result<Elem, RootsError> {
    let a = ring.elem_i64(c);
    if a.is_zero() {
        return Err(RootsError::NotASquare);
    }
    if !a.euler_is_square()? {
        return Err(RootsError::NotASquare);
    }
    let x = match easy_formula_sqrt(&a) {
        Some(x) => x,
        None => tonelli_shanks(&a)?,
    };
    debug_assert_eq!(x.square(), a);
    let neg = x.neg();
    Ok(if x.value() <= neg.value() { x } else { neg })
}

/// Tonelli–Shanks seeded by the least nonresidue (scan 2, 3, 4, …). The
/// caller guarantees `a` is a nonzero quadratic residue mod an odd prime.
fn tonelli_shanks(a: &Elem) -> Result<Elem, RootsError> {
    let ring = a.ring().clone();
    let p = ring.modulus().clone();

    let mut z = None;
    let mut n = 2u64;
    while BigUint::from(n) < p {
        let cand = ring.elem_u64(n);
        if !cand.euler_is_square()? {
            z = Some(cand);
            break;
        }
        n += 1;
    }
    let z = z.ok_or(RootsError::NotASquare)?;

    let (s, q0) = split_valuation(&p, 2);
    let mut m = s;
    let mut c = z.pow(&q0);
    let mut t = a.pow(&q0);
    let mut r = a.pow(&((&q0 + 1u32) >> 1));

    while !t.is_one() {
        // Least i with t^(2^i) = 1; exists for prime p, bounded by m.
        let mut i = 0u32;
        let mut probe = t.clone();
        while !probe.is_one() {
            probe = probe.square();
            i += 1;
            if i >= m {
                return Err(RootsError::CompositeSignal {
                    step: "tonelli-shanks order search",
                });
            }
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = b.square();
        }
        m = i;
        c = b.square();
        t = t.mul(&c);
        r = r.mul(&b);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::primes_below;

    fn ring(m: u64) -> Ring {
        Ring::from_u64(m).unwrap()
    }

    fn val(e: &Elem) -> u64 {
        e.value().to_u64_digits().first().copied().unwrap_or(0)
    }

    #[test]
    fn zeta_r_examples() {
        // q = 13, r = 3: g = 2 is the first with 2^4 = 3 ≠ 1; returns 2^4 = 3.
        let spec = ZetaSpec::for_order(&BigUint::from(13u32), 3).unwrap();
        assert_eq!(spec.e(), 1);
        assert_eq!(spec.t(), &BigUint::from(4u32));
        let z = find_zeta_r(&ring(13), &spec).unwrap();
        assert_eq!(val(&z), 3);
        assert!(z.pow_u64(3).is_one());

        // q = 41, r = 5: g = 2, 2^8 ≡ 10; 10^5 ≡ 1 (mod 41).
        let spec = ZetaSpec::for_order(&BigUint::from(41u32), 5).unwrap();
        let z = find_zeta_r(&ring(41), &spec).unwrap();
        assert_eq!(val(&z), 10);
        assert!(z.pow_u64(5).is_one());

        // 5 does not divide 12.
        assert!(matches!(
            ZetaSpec::for_order(&BigUint::from(13u32), 5),
            Err(RootsError::OrderDoesNotDivide { r: 5 })
        ));
    }

    #[test]
    fn zeta4_examples() {
        // q = 17 = 2^4 + 1: g = 2, k = 1, ζ₄ = 2^(16/8) = 4.
        let spec = ZetaSpec::for_order(&BigUint::from(17u32), 4).unwrap();
        let z = find_zeta4(&ring(17), &spec).unwrap();
        assert_eq!(val(&z), 4);
        assert!(z.square().is_minus_one());

        // q = 41 = 2^3·5 + 1: g = 2, k = 1, ζ₄ = 2^5 = 32.
        let spec = ZetaSpec::for_order(&BigUint::from(41u32), 4).unwrap();
        let z = find_zeta4(&ring(41), &spec).unwrap();
        assert_eq!(val(&z), 32);
        assert!(z.square().is_minus_one());

        // 7 ≡ 3 (mod 4): no primitive 4th root of unity.
        assert!(matches!(
            ZetaSpec::for_order(&BigUint::from(7u32), 4),
            Err(RootsError::PrecondViolated { .. })
        ));
    }

    #[test]
    fn zeta_orders_exhaustive_to_500() {
        for q in primes_below(500) {
            if q < 5 {
                continue;
            }
            let r_ring = ring(q);
            let qb = BigUint::from(q);
            let mut rem = q - 1;
            while rem % 2 == 0 {
                rem /= 2;
            }
            let mut f = 3u64;
            while f * f <= rem {
                if rem % f == 0 {
                    let spec = ZetaSpec::for_order(&qb, f).unwrap();
                    let z = find_zeta_r(&r_ring, &spec).unwrap();
                    assert!(!z.is_one(), "q={} r={}", q, f);
                    assert!(z.pow_u64(f).is_one(), "q={} r={}", q, f);
                    while rem % f == 0 {
                        rem /= f;
                    }
                }
                f += 2;
            }
            if rem > 1 {
                let spec = ZetaSpec::for_order(&qb, rem).unwrap();
                let z = find_zeta_r(&r_ring, &spec).unwrap();
                assert!(!z.is_one());
                assert!(z.pow_u64(rem).is_one());
            }
            if (q - 1) % 4 == 0 {
                let spec = ZetaSpec::for_order(&qb, 4).unwrap();
                let z = find_zeta4(&r_ring, &spec).unwrap();
                assert!(z.square().is_minus_one(), "q={}", q);
            }
        }
    }

    #[test]
    fn zeta4_flags_composites() {
        // 9 - 1 = 2^3: shape fits, but 2^8 ≡ 4 (mod 9) breaks Fermat.
        let spec = ZetaSpec::for_order(&BigUint::from(9u32), 4).unwrap();
        match find_zeta4(&ring(9), &spec) {
            Err(RootsError::CompositeSignal { .. }) => {}
            other => panic!("expected CompositeSignal, got {:?}", other),
        }
    }

    #[test]
    fn cube_root_examples() {
        // 13 ≡ 4 (mod 9): root = 5^3 ≡ 8, and 8³ ≡ 5 (mod 13).
        let r13 = ring(13);
        let root = cube_root(&r13, &r13.elem_u64(5)).unwrap();
        assert_eq!(val(&root), 8);
        assert_eq!(root.pow_u64(3), r13.elem_u64(5));

        assert!(cube_root(&r13, &r13.elem_u64(1)).unwrap().is_one());

        // 6^4 ≡ 9 ≠ 1 (mod 13): not a cubic residue.
        assert!(matches!(
            cube_root(&r13, &r13.elem_u64(6)),
            Err(RootsError::NotCubicResidue)
        ));

        // 7 ≡ 7 (mod 9) but 7 ≡ 3 (mod 4): wrong class.
        let r7 = ring(7);
        assert!(matches!(
            cube_root(&r7, &r7.elem_u64(1)),
            Err(RootsError::WrongResidueClass)
        ));
    }

    #[test]
    fn cube_root_cubes_back_exhaustively() {
        for p in primes_below(500) {
            if p % 4 != 1 || !(p % 9 == 4 || p % 9 == 7) {
                continue;
            }
            let rp = ring(p);
            for b in 1..p {
                let be = rp.elem_u64(b);
                if be.pow(&((rp.modulus() - 1u32) / 3u32)).is_one() {
                    let root = cube_root(&rp, &be).unwrap();
                    assert_eq!(root.pow_u64(3), be, "p={} b={}", p, b);
                }
            }
        }
    }

    #[test]
    fn fixed_sqrt_examples() {
        // 4² = 16 ≡ −1 (mod 17), and 4 < 13.
        assert_eq!(val(&fixed_sqrt(&ring(17), -1).unwrap()), 4);
        // 3² ≡ 2 (mod 7), min(3, 4) = 3.
        assert_eq!(val(&fixed_sqrt(&ring(7), 2).unwrap()), 3);
        // 6² = 36 ≡ 10 ≡ −3 (mod 13).
        assert_eq!(val(&fixed_sqrt(&ring(13), -3).unwrap()), 6);
        assert!(matches!(
            fixed_sqrt(&ring(7), 3),
            Err(RootsError::NotASquare)
        ));
        assert!(matches!(
            fixed_sqrt(&ring(7), 0),
            Err(RootsError::NotASquare)
        ));
    }

    #[test]
    fn fixed_sqrt_all_branches_square_back() {
        let constants = [-1i64, 2, -2, 3, -3, 5, -7, -19, 57];
        for p in primes_below(3000) {
            if p < 3 {
                continue;
            }
            let rp = ring(p);
            for &c in &constants {
                let a = rp.elem_i64(c);
                if a.is_zero() {
                    continue;
                }
                match a.euler_is_square() {
                    Ok(true) => {
                        let x = fixed_sqrt(&rp, c).unwrap();
                        assert_eq!(x.square(), a, "p={} c={}", p, c);
                        assert!(x.value() <= x.neg().value());
                    }
                    Ok(false) => {
                        assert!(matches!(fixed_sqrt(&rp, c), Err(RootsError::NotASquare)));
                    }
                    Err(_) => unreachable!("prime modulus"),
                }
            }
        }
    }

    #[test]
    fn determinism() {
        let spec = ZetaSpec::for_order(&BigUint::from(41u32), 5).unwrap();
        let a = find_zeta_r(&ring(41), &spec).unwrap();
        let b = find_zeta_r(&ring(41), &spec).unwrap();
        assert_eq!(a, b);
        let x = fixed_sqrt(&ring(1009), -1).unwrap();
        let y = fixed_sqrt(&ring(1009), -1).unwrap();
        assert_eq!(x, y);
    }
}
