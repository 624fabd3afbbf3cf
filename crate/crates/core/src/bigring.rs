//! Arbitrary-precision modular arithmetic over an odd modulus m ≥ 3.
//!
//! The modulus is deliberately not required to be prime: the same ring type
//! backs prime fields F_p and the rings Z/N the Proth prover works in. Where
//! primality matters the operations report it instead of assuming it — a
//! division by a non-unit returns the gcd witness, and Euler's criterion
//! raises [`RingError::EulerAmbiguous`] whenever `a^((m-1)/2)` lands outside
//! `{1, m-1}`, which cannot happen over a prime modulus.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

/// Errors raised by ring construction and arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingError {
    /// The modulus was even or smaller than 3.
    EvenOrTinyModulus { modulus: BigUint },
    /// Division by an element sharing a factor with the modulus. The witness
    /// is `gcd(a, m)` with `1 < witness <= m` (inverting 0 reports `m`).
    NonInvertible { witness: BigUint },
    /// `a^((m-1)/2)` was neither 1 nor m−1: the modulus is composite.
    EulerAmbiguous { residue: BigUint },
}

impl fmt::Display for RingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingError::EvenOrTinyModulus { modulus } => {
                write!(f, "modulus {} must be odd and at least 3", modulus)
            }
            RingError::NonInvertible { witness } => {
                write!(f, "element is not invertible; gcd witness {}", witness)
            }
            RingError::EulerAmbiguous { residue } => write!(
                f,
                "Euler criterion returned {} (neither 1 nor -1): composite modulus",
                residue
            ),
        }
    }
}

impl std::error::Error for RingError {}

/// The ring Z/m for an odd modulus m ≥ 3, with canonical residues in [0, m).
///
/// Cloning is cheap; the modulus is shared. Two rings are equal exactly when
/// their moduli are equal, and elements of equal rings may be combined.
#[derive(Clone, Debug)]
pub struct Ring {
    modulus: Arc<BigUint>,
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus
    }
}

impl Eq for Ring {}

impl Ring {
    /// Builds the ring Z/m. Rejects even moduli and m < 3; everything in this
    /// crate assumes an odd modulus.
    pub fn new(modulus: BigUint) -> Result<Ring, RingError> {
        if modulus < BigUint::from(3u32) || modulus.is_even() {
            return Err(RingError::EvenOrTinyModulus { modulus });
        }
        Ok(Ring {
            modulus: Arc::new(modulus),
        })
    }

    /// Convenience constructor from a machine integer.
    pub fn from_u64(modulus: u64) -> Result<Ring, RingError> {
        Ring::new(BigUint::from(modulus))
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// Canonicalizes an unsigned value into the ring.
    pub fn elem(&self, value: BigUint) -> Elem {
        Elem {
            value: value % &*self.modulus,
            ring: self.clone(),
        }
    }

    pub fn elem_u64(&self, value: u64) -> Elem {
        self.elem(BigUint::from(value))
    }

    /// Canonicalizes a signed value; negative inputs wrap to [0, m).
    pub fn elem_i64(&self, value: i64) -> Elem {
        self.elem_bigint(&BigInt::from(value))
    }

    /// Canonicalizes a signed big integer into [0, m).
    pub fn elem_bigint(&self, value: &BigInt) -> Elem {
        let m = BigInt::from((*self.modulus).clone());
        let v = value.mod_floor(&m);
        self.elem(v.to_biguint().expect("mod_floor result is non-negative"))
    }

    pub fn zero(&self) -> Elem {
        self.elem(BigUint::zero())
    }

    pub fn one(&self) -> Elem {
        self.elem(BigUint::one())
    }

    /// m − 1, i.e. −1 in canonical form.
    pub fn minus_one(&self) -> Elem {
        self.elem(&*self.modulus - 1u32)
    }
}

/// An element of a [`Ring`], always in canonical form 0 ≤ value < m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elem {
    value: BigUint,
    ring: Ring,
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Elem {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    pub fn is_minus_one(&self) -> bool {
        self.value == self.ring.modulus() - 1u32
    }

    fn check_same_ring(&self, other: &Elem) {
        assert!(
            self.ring == other.ring,
            "elements of different rings may not be combined ({} vs {})",
            self.ring.modulus(),
            other.ring.modulus()
        );
    }

    pub fn add(&self, other: &Elem) -> Elem {
        self.check_same_ring(other);
        self.ring.elem(&self.value + &other.value)
    }

    pub fn sub(&self, other: &Elem) -> Elem {
        self.check_same_ring(other);
        let m = self.ring.modulus();
        self.ring.elem(&self.value + (m - &other.value))
    }

    pub fn mul(&self, other: &Elem) -> Elem {
        self.check_same_ring(other);
        self.ring.elem(&self.value * &other.value)
    }

    pub fn square(&self) -> Elem {
        self.ring.elem(&self.value * &self.value)
    }

    pub fn neg(&self) -> Elem {
        if self.value.is_zero() {
            self.clone()
        } else {
            self.ring.elem(self.ring.modulus() - &self.value)
        }
    }

    /// `self^exp` by successive squaring; `exp = 0` yields 1.
    pub fn pow(&self, exp: &BigUint) -> Elem {
        let m = self.ring.modulus();
        self.ring.elem(self.value.modpow(exp, m))
    }

    pub fn pow_u64(&self, exp: u64) -> Elem {
        self.pow(&BigUint::from(exp))
    }

    /// Modular inverse by the extended Euclidean algorithm.
    ///
    /// Over a composite modulus a failed inversion is information, not a bug:
    /// the returned witness `gcd(a, m)` is a nontrivial factor of m whenever
    /// `1 < gcd < m`. Inverting 0 reports witness m.
    pub fn inv(&self) -> Result<Elem, RingError> {
        let m = self.ring.modulus();
        if self.value.is_zero() {
            return Err(RingError::NonInvertible { witness: m.clone() });
        }
        let a = BigInt::from(self.value.clone());
        let mb = BigInt::from(m.clone());
        let ext = a.extended_gcd(&mb);
        if !ext.gcd.is_one() {
            return Err(RingError::NonInvertible {
                witness: ext
                    .gcd
                    .to_biguint()
                    .expect("gcd of non-negative inputs is non-negative"),
            });
        }
        let x = ext.x.mod_floor(&mb);
        Ok(self
            .ring
            .elem(x.to_biguint().expect("mod_floor result is non-negative")))
    }

    /// `self / other`, failing like [`Elem::inv`] when `other` is not a unit.
    pub fn div(&self, other: &Elem) -> Result<Elem, RingError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Euler's criterion: `true` iff `a^((m-1)/2) ≡ 1`, `false` iff ≡ −1.
    ///
    /// Over a prime modulus this decides quadratic residuosity of a nonzero
    /// element. Any other residue (including for a = 0) proves the modulus
    /// composite and is reported as [`RingError::EulerAmbiguous`].
    pub fn euler_is_square(&self) -> Result<bool, RingError> {
        let m = self.ring.modulus();
        let exp = (m - 1u32) >> 1;
        let r = self.value.modpow(&exp, m);
        if r.is_one() {
            Ok(true)
        } else if r == m - 1u32 {
            Ok(false)
        } else {
            Err(RingError::EulerAmbiguous { residue: r })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(m: u64) -> Ring {
        Ring::from_u64(m).unwrap()
    }

    #[test]
    fn constructor_accepts_odd_and_rejects_even() {
        assert!(Ring::from_u64(41).is_ok());
        assert!(Ring::from_u64(9).is_ok()); // composite allowed
        assert!(matches!(
            Ring::from_u64(8),
            Err(RingError::EvenOrTinyModulus { .. })
        ));
        assert!(matches!(
            Ring::from_u64(1),
            Err(RingError::EvenOrTinyModulus { .. })
        ));
    }

    #[test]
    fn modpow_small_values() {
        let r = ring(41);
        assert_eq!(r.elem_u64(2).pow_u64(5).value(), &BigUint::from(32u32));
        // 2^10 = 1024 ≡ 40 (mod 41), checked against the plain product chain below.
        assert_eq!(r.elem_u64(2).pow_u64(10).value(), &BigUint::from(40u32));
        assert_eq!(r.elem_u64(7).pow_u64(0).value(), &BigUint::from(1u32));
    }

    #[test]
    fn modpow_matches_naive_repeated_multiplication() {
        for m in (3u64..200).step_by(2) {
            let r = ring(m);
            for base in [0u64, 1, 2, 3, m / 2, m - 1] {
                let b = r.elem_u64(base);
                let mut acc = r.one();
                for exp in 0..50u64 {
                    assert_eq!(b.pow_u64(exp), acc, "m={} base={} exp={}", m, base, exp);
                    acc = acc.mul(&b);
                }
            }
        }
    }

    #[test]
    fn modinv_examples() {
        let r = ring(41);
        let inv4 = r.elem_u64(4).inv().unwrap();
        assert_eq!(inv4.value(), &BigUint::from(31u32));
        assert!(r.elem_u64(4).mul(&inv4).is_one());

        assert!(ring(97).elem_u64(1).inv().unwrap().is_one());

        match ring(9).elem_u64(3).inv() {
            Err(RingError::NonInvertible { witness }) => {
                assert_eq!(witness, BigUint::from(3u32))
            }
            other => panic!("expected NonInvertible, got {:?}", other),
        }
        match ring(9).elem_u64(0).inv() {
            Err(RingError::NonInvertible { witness }) => {
                assert_eq!(witness, BigUint::from(9u32))
            }
            other => panic!("expected NonInvertible, got {:?}", other),
        }
    }

    #[test]
    fn modinv_correct_for_all_units_below_1e4() {
        for m in (3u64..10_000).step_by(617) {
            let m = m | 1;
            let r = ring(m);
            for a in 1..m {
                let e = r.elem_u64(a);
                match e.inv() {
                    Ok(x) => assert!(e.mul(&x).is_one(), "m={} a={}", m, a),
                    Err(RingError::NonInvertible { witness }) => {
                        assert!((&BigUint::from(a) % &witness).is_zero());
                        assert!((&BigUint::from(m) % &witness).is_zero());
                    }
                    Err(e) => panic!("unexpected {:?}", e),
                }
            }
        }
    }

    #[test]
    fn euler_examples() {
        let r = ring(41);
        // 17² = 289 ≡ 2 (mod 41), so 2 is a square.
        assert_eq!(r.elem_u64(17).square().value(), &BigUint::from(2u32));
        assert!(r.elem_u64(2).euler_is_square().unwrap());
        // 3^20 ≡ −1 (mod 41).
        assert!(!r.elem_u64(3).euler_is_square().unwrap());
        assert!(r.elem_u64(1).euler_is_square().unwrap());
    }

    #[test]
    fn euler_matches_square_enumeration_for_small_primes() {
        for p in crate::primes::primes_below(2000) {
            if p < 3 {
                continue;
            }
            let r = ring(p);
            let mut squares = vec![false; p as usize];
            for x in 1..p {
                squares[((x * x) % p) as usize] = true;
            }
            for a in 1..p {
                assert_eq!(
                    r.elem_u64(a).euler_is_square().unwrap(),
                    squares[a as usize],
                    "p={} a={}",
                    p,
                    a
                );
            }
        }
    }

    #[test]
    fn euler_ambiguous_flags_composites() {
        // 2^7 = 128 ≡ 8 (mod 15): neither 1 nor 14.
        match ring(15).elem_u64(2).euler_is_square() {
            Err(RingError::EulerAmbiguous { residue }) => {
                assert_eq!(residue, BigUint::from(8u32));
            }
            other => panic!("expected EulerAmbiguous, got {:?}", other),
        }
        // a = 0 also lands outside {1, -1}.
        assert!(matches!(
            ring(15).elem_u64(0).euler_is_square(),
            Err(RingError::EulerAmbiguous { .. })
        ));
    }

    #[test]
    fn canonical_form_preserved() {
        let r = ring(101);
        let a = r.elem_u64(77);
        let b = r.elem_u64(99);
        for e in [a.add(&b), a.sub(&b), a.mul(&b), a.neg(), a.pow_u64(13)] {
            assert!(e.value() < r.modulus());
        }
        assert_eq!(r.elem_i64(-1).value(), &BigUint::from(100u32));
        assert_eq!(r.elem_i64(-202).value(), &BigUint::from(0u32));
    }
}
