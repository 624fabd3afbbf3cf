//! Radical towers of nested cube roots expressing ζ_q for prime q = 2·3^n + 1.
//!
//! The Galois group of Q(ζ_q, ρ)/Q(ρ, √-q) is cyclic of order 3^n (ρ a
//! primitive cube root of unity), so ζ_q can be peeled apart level by level:
//! a value v with conjugates v, σv, σ²v over the next field down is recovered
//! from f = v + σv + σ²v together with the cube roots of
//! g³ = (v + ρσv + ρ²σ²v)³ and h³ = (v + ρ²σv + ρσ²v)³, all of which live one
//! level down. After n levels the remaining constants lie in Q(√-q, √-3) and
//! are recognized exactly from a high-precision floating-point computation:
//! the g/h values come in conjugate pairs z₁, z₂ with z₁ + z₂ and
//! (z₁ − z₂)/√-3 in Q(√-q), whose coordinates are rationals with denominator
//! dividing 4.
//!
//! The resulting [`PeriodTower`] is an exact object: every constant is a
//! [`QFElem`], and reducing the tower mod a prime p ≡ 1 (mod q) with easy
//! cube roots yields a primitive q-th root of unity in F_p, the cube-root
//! ambiguities being pruned by the recorded pairing relations and settled by
//! the `x^q = 1` test.

mod float;
mod modp;
mod qf;
mod recognize;
mod tower;

use std::fmt;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::bigring::{Elem, Ring, RingError};
use crate::roots::RootsError;

pub use float::{Complex, FloatCtx, Real};
pub use qf::QFElem;
pub use recognize::recognize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PeriodsError {
    /// q is not a prime of the form 2·3^n + 1 with n ≥ 1.
    NotTowerPrime { q: u64 },
    /// Rounding residuals stayed above 2^(-bits/2) up to the precision
    /// ceiling.
    RecognitionFailed { bits: u32 },
    /// The modulus is not in a residue class with easy cube roots.
    CubeRootsHard,
    /// Every pruned cube-root assignment failed the x^q = 1 test; impossible
    /// for a valid tower over an admissible prime.
    NoPrimitiveRoot,
    /// ζ_q does not exist mod p (p ≢ 1 mod q) or p is otherwise unusable.
    ModulusInadmissible { reason: &'static str },
    /// The unpruned cube-root choice space is too large to enumerate.
    ChoiceSpaceTooLarge { free_choices: usize },
    /// Precision outside 64 ≤ bits ≤ max_bits.
    BadPrecision,
    Roots(RootsError),
    Ring(RingError),
}

impl fmt::Display for PeriodsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PeriodsError::NotTowerPrime { q } => {
                write!(f, "{} is not a prime of the form 2*3^n + 1", q)
            }
            PeriodsError::RecognitionFailed { bits } => {
                write!(f, "recognition residual too large at {} bits", bits)
            }
            PeriodsError::CubeRootsHard => {
                write!(f, "modulus is not 1 mod 4 with residue 4 or 7 mod 9")
            }
            PeriodsError::NoPrimitiveRoot => {
                write!(f, "no cube-root assignment produced a primitive root")
            }
            PeriodsError::ModulusInadmissible { reason } => write!(f, "{}", reason),
            PeriodsError::ChoiceSpaceTooLarge { free_choices } => {
                write!(f, "cube-root choice space 3^{} is too large", free_choices)
            }
            PeriodsError::BadPrecision => write!(f, "precision must satisfy 64 <= bits <= max_bits"),
            PeriodsError::Roots(e) => write!(f, "{}", e),
            PeriodsError::Ring(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for PeriodsError {}

impl From<RootsError> for PeriodsError {
    fn from(e: RootsError) -> Self {
        PeriodsError::Roots(e)
    }
}

impl From<RingError> for PeriodsError {
    fn from(e: RingError) -> Self {
        PeriodsError::Ring(e)
    }
}

/// Working precision for the floating-point side of tower construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    pub bits: u32,
    pub max_bits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            bits: 256,
            max_bits: 4096,
        }
    }
}

impl Precision {
    pub fn validate(&self) -> Result<(), PeriodsError> {
        if self.bits < 64 || self.bits > self.max_bits {
            return Err(PeriodsError::BadPrecision);
        }
        Ok(())
    }
}

/// A node of the tower tree. Internal nodes expand as
/// `value = (f + g^(1/3) + h^(1/3)) / 3` over their children; level-n nodes
/// are exact constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Internal { f: usize, g: usize, h: usize },
    Leaf { value: QFElem },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerNode {
    /// Path from the root, one of F/G/H per level ("" for the root).
    pub path: String,
    pub level: u32,
    pub kind: NodeKind,
}

/// `cbrt(value[g_node]) · cbrt(value[h_node])` equals `product`, an element
/// of Q(√-q). Fixing one cube root of the pair determines the other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub g_node: usize,
    pub h_node: usize,
    pub product: QFElem,
}

/// The exact radical tower for ζ_q, q = 2·3^n + 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodTower {
    pub q: u64,
    pub n: u32,
    /// σ sends ζ to ζ^sigma_base; pinned to the square of the smallest
    /// primitive root mod q.
    pub sigma_base: u64,
    /// Breadth-first: the root is node 0, children in F, G, H order.
    pub nodes: Vec<TowerNode>,
    pub relations: Vec<Relation>,
}

impl PeriodTower {
    pub fn root(&self) -> &TowerNode {
        &self.nodes[0]
    }

    /// Canonical JSON document: stable field order, mathematical integers as
    /// decimal strings.
    pub fn to_json_value(&self) -> Value {
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|node| match &node.kind {
                NodeKind::Internal { f, g, h } => json!({
                    "path": node.path,
                    "level": node.level,
                    "f": f,
                    "g": g,
                    "h": h,
                }),
                NodeKind::Leaf { value } => json!({
                    "path": node.path,
                    "level": node.level,
                    "const": value.to_strings(),
                }),
            })
            .collect();
        let relations: Vec<Value> = self
            .relations
            .iter()
            .map(|r| {
                json!({
                    "g": r.g_node,
                    "h": r.h_node,
                    "product": r.product.to_strings(),
                })
            })
            .collect();
        json!({
            "q": self.q.to_string(),
            "n": self.n,
            "sigma_base": self.sigma_base.to_string(),
            "nodes": nodes,
            "relations": relations,
        })
    }

    /// Parses the canonical JSON document back into a tower.
    pub fn from_json_value(v: &Value) -> Option<PeriodTower> {
        let q: u64 = v.get("q")?.as_str()?.parse().ok()?;
        let n = v.get("n")?.as_u64()? as u32;
        let sigma_base: u64 = v.get("sigma_base")?.as_str()?.parse().ok()?;
        let parse_quadruple = |arr: &Value| -> Option<QFElem> {
            let items = arr.as_array()?;
            if items.len() != 4 {
                return None;
            }
            let mut nums = [
                BigInt::from(0),
                BigInt::from(0),
                BigInt::from(0),
                BigInt::from(0),
            ];
            for (slot, item) in nums.iter_mut().zip(items) {
                *slot = item.as_str()?.parse().ok()?;
            }
            Some(QFElem::new(q, nums))
        };
        let mut nodes = Vec::new();
        for nv in v.get("nodes")?.as_array()? {
            let path = nv.get("path")?.as_str()?.to_string();
            let level = nv.get("level")?.as_u64()? as u32;
            let kind = if let Some(c) = nv.get("const") {
                NodeKind::Leaf {
                    value: parse_quadruple(c)?,
                }
            } else {
                NodeKind::Internal {
                    f: nv.get("f")?.as_u64()? as usize,
                    g: nv.get("g")?.as_u64()? as usize,
                    h: nv.get("h")?.as_u64()? as usize,
                }
            };
            nodes.push(TowerNode { path, level, kind });
        }
        let mut relations = Vec::new();
        for rv in v.get("relations")?.as_array()? {
            relations.push(Relation {
                g_node: rv.get("g")?.as_u64()? as usize,
                h_node: rv.get("h")?.as_u64()? as usize,
                product: parse_quadruple(rv.get("product")?)?,
            });
        }
        Some(PeriodTower {
            q,
            n,
            sigma_base,
            nodes,
            relations,
        })
    }

    /// Node index lookup by path.
    pub fn index_of(&self, path: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.path == path)
    }

    pub fn leaf_value(&self, path: &str) -> Option<&QFElem> {
        match &self.nodes[self.index_of(path)?].kind {
            NodeKind::Leaf { value } => Some(value),
            NodeKind::Internal { .. } => None,
        }
    }
}

/// The height n with q = 2·3^n + 1, if q is prime of that shape.
pub fn tower_height(q: u64) -> Result<u32, PeriodsError> {
    if !crate::primes::is_prime_u64(q) || q < 7 || (q - 1) % 2 != 0 {
        return Err(PeriodsError::NotTowerPrime { q });
    }
    let mut m = (q - 1) / 2;
    let mut n = 0u32;
    while m % 3 == 0 {
        m /= 3;
        n += 1;
    }
    if m != 1 || n == 0 {
        return Err(PeriodsError::NotTowerPrime { q });
    }
    Ok(n)
}

/// Builds the exact tower for ζ_q, retrying on a doubling precision ladder
/// whenever a rounding residual exceeds 2^(-bits/2).
pub fn build_tower(q: u64, prec: &Precision) -> Result<PeriodTower, PeriodsError> {
    prec.validate()?;
    let n = tower_height(q)?;
    let mut bits = prec.bits;
    loop {
        match tower::build_at(q, n, bits) {
            Ok(t) => return Ok(t),
            Err(PeriodsError::RecognitionFailed { .. }) if bits < prec.max_bits => {
                bits = (bits * 2).min(prec.max_bits);
            }
            Err(e) => return Err(e),
        }
    }
}

/// Reduces the tower mod p, returning an element of exact order q.
///
/// Requires p ≡ 1 (mod q) (so ζ_q exists mod p), p ≡ 1 (mod 4) and
/// p ≡ 4, 7 (mod 9) (so cube roots are a single exponentiation). Cube-root
/// choices are scanned in lexicographic order of their ζ₃-exponent vectors,
/// with relation-forced roots derived rather than enumerated.
pub fn eval_mod_p(tower: &PeriodTower, ring: &Ring) -> Result<Elem, PeriodsError> {
    modp::eval_mod_p_impl(tower, ring)
}

/// Re-evaluates the radical expression numerically with a consistent choice
/// of cube roots and checks the result lands within 2^(-bits/2) of a
/// primitive q-th root of unity. Returns false on any mismatch.
pub fn verify_tower_numeric(tower: &PeriodTower, prec: &Precision) -> bool {
    if prec.validate().is_err() {
        return false;
    }
    tower::verify_numeric(tower, prec.bits)
}
