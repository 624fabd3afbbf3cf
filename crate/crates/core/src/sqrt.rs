//! The deterministic square-root algorithm over F_q and its supporting
//! machinery: the canonical factorization of q − 1, the easy-case formulas
//! for `q ≢ 1 (mod 8)`, and a classifier for the modulus shapes with a
//! polynomial-time guarantee.
//!
//! The hard case `q ≡ 1 (mod 8)` runs entirely inside the α-free group of
//! [`crate::galpha`]:
//!
//! * **Step I** scans g = 1, …, 2t−1 (t the unfactored cofactor of q − 1).
//!   Any g with g² = β is already an answer; otherwise some `[g]` must fall
//!   outside the 2t-torsion subgroup, because that subgroup has exactly 2t
//!   elements and also contains `[∞]` and `[0]`.
//! * **Step II** (the 2-part): if `[g]^((q-1)/2^(e-1)) ≠ [∞]`, locate the
//!   largest k with `[g]^((q-1)/2^k) = [∞]`; then `[a] = [g]^((q-1)/2^(k+2))`
//!   has order 4 and `±a·√-1` are the roots of β.
//! * **Step III/IV** (an odd-prime part): find a listed prime r = p_m with
//!   `[g]^((q-1)/p_m^(e_m)) ≠ [∞]`, produce an order-r element `[a]`, obtain
//!   a primitive r-th root of unity ζ, and scan j = 1, …, (r−1)/2 for
//!   `(a(ζ^j−1)/(ζ^j+1))² = β`.
//!
//! Every search (candidate scan, largest-k scan, j-scan) walks upward from
//! the smallest index, so the whole engine is deterministic and returns a
//! structured [`SqrtTrace`] naming the branch and indices taken. Over a
//! composite modulus the prime-field theorems backing steps II–IV can fail;
//! each such failure is reported as [`SqrtError::InternalContradiction`] (or
//! a propagated division witness), which is exactly the information the
//! Proth prover consumes.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bigring::{Elem, Ring, RingError};
use crate::galpha::{GElem, GroupCtx, Lifted};
use crate::periods;
use crate::roots::{self, RootsError, ZetaSpec};

/// Ceiling on cofactors the engine will scan through; beyond this the
/// algorithm would be superpolynomial and the attempt is refused.
pub const SMALL_COFACTOR_CEILING: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SqrtError {
    /// Euler's criterion rejects β (or β = 0).
    NotASquare,
    /// `sqrt_easy` was called with `q ≡ 1 (mod 8)`.
    NotEasyCase,
    /// `sqrt_deterministic` was called with `q ≢ 1 (mod 8)`; the dispatcher
    /// sends those to `sqrt_easy`.
    EasyCaseModulus,
    /// The unfactored cofactor exceeds the configured ceiling.
    InfeasibleFactorization { cofactor: BigUint },
    /// A step that cannot fail over a prime field failed: composite modulus.
    InternalContradiction { step: &'static str },
    Ring(RingError),
    Roots(RootsError),
    Periods(periods::PeriodsError),
}

impl fmt::Display for SqrtError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SqrtError::NotASquare => write!(f, "beta is not a nonzero quadratic residue"),
            SqrtError::NotEasyCase => write!(f, "modulus is 1 mod 8: not an easy case"),
            SqrtError::EasyCaseModulus => {
                write!(f, "modulus is not 1 mod 8: use the easy-case formulas")
            }
            SqrtError::InfeasibleFactorization { cofactor } => {
                write!(f, "unfactored cofactor {} exceeds the feasibility ceiling", cofactor)
            }
            SqrtError::InternalContradiction { step } => {
                write!(f, "prime-field invariant failed at {} (composite modulus)", step)
            }
            SqrtError::Ring(e) => write!(f, "{}", e),
            SqrtError::Roots(e) => write!(f, "{}", e),
            SqrtError::Periods(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for SqrtError {}

impl From<RingError> for SqrtError {
    fn from(e: RingError) -> Self {
        SqrtError::Ring(e)
    }
}

impl From<RootsError> for SqrtError {
    fn from(e: RootsError) -> Self {
        SqrtError::Roots(e)
    }
}

impl From<periods::PeriodsError> for SqrtError {
    fn from(e: periods::PeriodsError) -> Self {
        SqrtError::Periods(e)
    }
}

/// q − 1 written as `2^e · p1^e1 ⋯ pn^en · t` with the p_i the ascending odd
/// primes up to the trial-division bound, fully extracted, and t coprime to
/// everything extracted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub two_exp: u32,
    pub odd_primes: Vec<(u64, u32)>,
    pub cofactor: BigUint,
    pub bound: u64,
}

impl Factorization {
    /// Rebuilds q − 1; used by tests and internal consistency checks.
    pub fn reassemble(&self) -> BigUint {
        let mut n = BigUint::one() << self.two_exp;
        for &(p, e) in &self.odd_primes {
            n *= BigUint::from(p).pow(e);
        }
        n * &self.cofactor
    }
}

/// Trial division of q − 1 by 2 and the odd primes up to `bound`. Everything
/// above the bound is absorbed into the cofactor.
pub fn factor_qminus1(q: &BigUint, bound: u64) -> Factorization {
    debug_assert!(q.bit(0), "modulus must be odd");
    debug_assert!(bound >= 3);
    let mut n = q - 1u32;
    let mut two_exp = 0u32;
    while !n.bit(0) && !n.is_zero() {
        n >>= 1;
        two_exp += 1;
    }
    let mut odd_primes = Vec::new();
    let mut d = 3u64;
    while d <= bound {
        let db = BigUint::from(d);
        if (&db * &db) > n {
            break;
        }
        if (&n % &db).is_zero() {
            let mut e = 0u32;
            while (&n % &db).is_zero() {
                n /= &db;
                e += 1;
            }
            odd_primes.push((d, e));
        }
        d += 2;
    }
    // The remainder is 1 or has no factor ≤ min(bound, √remainder); if it is
    // itself a prime within the bound, extract it.
    if !n.is_one() && n <= BigUint::from(bound) {
        let small = n.to_u64_digits()[0];
        odd_primes.push((small, 1));
        n = BigUint::one();
    }
    Factorization {
        two_exp,
        odd_primes,
        cofactor: n,
        bound,
    }
}

/// Strategy for obtaining the primitive r-th root of unity Step IV needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZetaStrategy {
    /// The bounded candidate search; unconditional, needs the cofactor of
    /// r^e in q − 1 to be small. Falls back to the other two strategies when
    /// it is not.
    Search,
    /// The radical-tower construction of [`crate::periods`]; applies to
    /// r = 2·3^k + 1 when cube roots mod q are easy.
    RadicalTower,
    /// `ζ₃ = (-1 + √-3)/2` from [`roots::fixed_sqrt`]; applies to r = 3.
    Standin,
}

/// Memoizes roots of unity per (modulus, order); clones share the cache.
#[derive(Clone, Debug, Default)]
pub struct ZetaCache {
    inner: Arc<Mutex<HashMap<(BigUint, u64), BigUint>>>,
}

impl ZetaCache {
    fn get_or_try_insert<F>(&self, ring: &Ring, order: u64, compute: F) -> Result<Elem, SqrtError>
    where
        F: FnOnce() -> Result<Elem, SqrtError>,
    {
        let key = (ring.modulus().clone(), order);
        if let Some(v) = self.inner.lock().unwrap().get(&key) {
            return Ok(ring.elem(v.clone()));
        }
        let computed = compute()?;
        self.inner
            .lock()
            .unwrap()
            .insert(key, computed.value().clone());
        Ok(computed)
    }
}

#[derive(Clone, Debug)]
pub struct SqrtConfig {
    /// Trial-division bound for q − 1.
    pub bound: u64,
    /// How Step IV acquires ζ_r.
    pub zeta_strategy: ZetaStrategy,
    /// Refuse factorizations whose cofactor exceeds this.
    pub cofactor_ceiling: BigUint,
    /// Root-of-unity memoization shared across calls with this config.
    pub cache: ZetaCache,
}

impl Default for SqrtConfig {
    fn default() -> Self {
        SqrtConfig {
            bound: 1_000_000,
            zeta_strategy: ZetaStrategy::Search,
            cofactor_ceiling: BigUint::from(SMALL_COFACTOR_CEILING),
            cache: ZetaCache::default(),
        }
    }
}

/// Which special-case theorem covers a given modulus shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseTag {
    /// q ≢ 1 (mod 8): single-exponentiation formulas apply.
    Easy,
    /// q = 2^e·3^f·t + 1 with small t and q ≡ 1 (mod 12).
    Thm2_1,
    /// q ≡ 13, 25 (mod 36) with every listed odd prime of the form 2·3^k+1.
    Thm2_2,
    /// q = r^e·t + 1 for a single small prime r and small t.
    Thm2_3,
    General,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::Easy => "easy",
            CaseTag::Thm2_1 => "thm2.1",
            CaseTag::Thm2_2 => "thm2.2",
            CaseTag::Thm2_3 => "thm2.3",
            CaseTag::General => "general",
        };
        write!(f, "{}", s)
    }
}

fn residue_u32(q: &BigUint, m: u32) -> u32 {
    (q % m).to_u32_digits().first().copied().unwrap_or(0)
}

fn is_two_three_pow_plus_one(p: u64) -> bool {
    // p = 2·3^k + 1 for some k ≥ 0.
    let mut pow3 = 1u64;
    loop {
        match (2u64).checked_mul(pow3).and_then(|v| v.checked_add(1)) {
            Some(v) if v == p => return true,
            Some(v) if v > p => return false,
            None => return false,
            _ => {}
        }
        pow3 = match pow3.checked_mul(3) {
            Some(v) => v,
            None => return false,
        };
    }
}

/// First matching tag in the order Easy, Thm2.1, Thm2.2, Thm2.3, General.
/// "Small" is pinned to [`SMALL_COFACTOR_CEILING`].
pub fn classify_case(q: &BigUint, f: &Factorization) -> CaseTag {
    if residue_u32(q, 8) != 1 {
        return CaseTag::Easy;
    }
    let ceiling = BigUint::from(SMALL_COFACTOR_CEILING);
    let small_cofactor = f.cofactor <= ceiling;
    if residue_u32(q, 12) == 1
        && small_cofactor
        && f.odd_primes.len() == 1
        && f.odd_primes[0].0 == 3
    {
        return CaseTag::Thm2_1;
    }
    let m36 = residue_u32(q, 36);
    if (m36 == 13 || m36 == 25)
        && small_cofactor
        && !f.odd_primes.is_empty()
        && f.odd_primes.iter().all(|&(p, _)| is_two_three_pow_plus_one(p))
    {
        return CaseTag::Thm2_2;
    }
    // Thm2.3: some prime power r^e leaves a small coprime cofactor.
    let q1 = q - 1u32;
    let two_cof = &q1 >> f.two_exp;
    if small_cofactor && two_cof <= ceiling {
        return CaseTag::Thm2_3;
    }
    for &(p, e) in &f.odd_primes {
        let r_cof = &q1 / BigUint::from(p).pow(e);
        if small_cofactor && r_cof <= ceiling {
            return CaseTag::Thm2_3;
        }
    }
    CaseTag::General
}

/// Which branch of the algorithm produced the roots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Dispatcher sent the input to the easy-case formulas.
    Easy,
    /// Step I.1: a candidate g with g² = β turned up during the scan.
    ScanRoot,
    /// Step II: the 2-power branch (order-4 element times √-1).
    Two,
    /// Step IV: an odd-prime branch (order-r element and a ζ_r power scan).
    OddPrime,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Branch::Easy => "easy",
            Branch::ScanRoot => "I.1",
            Branch::Two => "II",
            Branch::OddPrime => "IV",
        };
        write!(f, "{}", s)
    }
}

/// Structured account of a square-root run; identical inputs yield identical
/// traces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtTrace {
    pub branch: Branch,
    /// Cofactor t that sized the Step I scan (absent on the easy path).
    pub cofactor: Option<BigUint>,
    /// The witness g chosen in Step I.2.
    pub witness: Option<BigUint>,
    /// Largest k from Step II.1 / IV.1.
    pub k: Option<u32>,
    /// Index m of the odd prime picked in Step III.
    pub prime_index: Option<usize>,
    /// The odd prime r of Step IV.
    pub r: Option<u64>,
    /// The j for which `(a(ζ^j-1)/(ζ^j+1))² = β`.
    pub j: Option<u64>,
    /// The root of unity used (ζ₄ in Step II, ζ_r in Step IV).
    pub zeta: Option<BigUint>,
}

impl SqrtTrace {
    fn easy() -> Self {
        SqrtTrace {
            branch: Branch::Easy,
            cofactor: None,
            witness: None,
            k: None,
            prime_index: None,
            r: None,
            j: None,
            zeta: None,
        }
    }
}

/// Both square roots of β in ascending order, plus the trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtOutcome {
    pub roots: (Elem, Elem),
    pub trace: SqrtTrace,
}

fn ordered_pair(x: Elem) -> (Elem, Elem) {
    let y = x.neg();
    if x.value() <= y.value() {
        (x, y)
    } else {
        (y, x)
    }
}

/// Square roots of β for `p ≢ 1 (mod 8)`: a single exponentiation for
/// `p ≡ 3 (mod 4)`, the Atkin two-exponentiation formula for `p ≡ 5 (mod 8)`.
pub fn sqrt_easy(ring: &Ring, beta: &Elem) -> Result<(Elem, Elem), SqrtError> {
    if residue_u32(ring.modulus(), 8) == 1 {
        return Err(SqrtError::NotEasyCase);
    }
    if beta.is_zero() || !beta.euler_is_square()? {
        return Err(SqrtError::NotASquare);
    }
    let x = roots::easy_formula_sqrt(beta).expect("residue class checked above");
    debug_assert_eq!(x.square(), *beta);
    Ok(ordered_pair(x))
}

/// The deterministic square-root algorithm, factoring q − 1 itself.
pub fn sqrt_deterministic(
    ring: &Ring,
    beta: &Elem,
    config: &SqrtConfig,
) -> Result<SqrtOutcome, SqrtError> {
    let f = factor_qminus1(ring.modulus(), config.bound);
    sqrt_deterministic_with_factorization(ring, beta, &f, config)
}

/// The deterministic square-root algorithm against a caller-supplied
/// factorization of q − 1.
///
/// The Proth prover uses this entry point with the bare `2^e · t` shape so
/// that every chain step resolves in the 2-power branch; the generic entry
/// point above supplies the fully trial-divided shape instead.
pub fn sqrt_deterministic_with_factorization(
    ring: &Ring,
    beta: &Elem,
    f: &Factorization,
    config: &SqrtConfig,
) -> Result<SqrtOutcome, SqrtError> {
    if residue_u32(ring.modulus(), 8) != 1 {
        return Err(SqrtError::EasyCaseModulus);
    }
    debug_assert_eq!(&f.reassemble() + 1u32, *ring.modulus());

    let t = &f.cofactor;
    if t > &config.cofactor_ceiling {
        return Err(SqrtError::InfeasibleFactorization {
            cofactor: t.clone(),
        });
    }
    if beta.is_zero() || !beta.euler_is_square()? {
        return Err(SqrtError::NotASquare);
    }

    let q1 = ring.modulus() - 1u32;
    let two_t = t * 2u32;
    let scan_end = &two_t - 1u32; // candidates 1..=2t-1

    // Step I.1: return any scanned g with g² = β before picking a witness.
    let mut gv = BigUint::one();
    while gv <= scan_end {
        let g = ring.elem(gv.clone());
        if g.square() == *beta {
            return Ok(SqrtOutcome {
                roots: ordered_pair(g),
                trace: SqrtTrace {
                    branch: Branch::ScanRoot,
                    cofactor: Some(t.clone()),
                    witness: None,
                    k: None,
                    prime_index: None,
                    r: None,
                    j: None,
                    zeta: None,
                },
            });
        }
        gv += 1u32;
    }

    // Step I.2: first g with [g]^(2t) ≠ [∞]. Euler returned 1 above, so the
    // strict-mode invariant on β holds; ring mode skips re-checking it.
    let ctx = GroupCtx::new_ring_mode(ring.clone(), beta.clone())
        .expect("beta verified nonzero above");
    let mut witness: Option<(BigUint, GElem)> = None;
    let mut gv = BigUint::one();
    while gv <= scan_end {
        let g = match ctx.lift(ring.elem(gv.clone())) {
            Lifted::Member(g) => g,
            Lifted::RootFound(_) => unreachable!("step I.1 scanned these candidates"),
        };
        if !ctx.gpow(&g, &two_t)?.is_infinity() {
            witness = Some((gv.clone(), g));
            break;
        }
        gv += 1u32;
    }
    let (gval, g) = witness.ok_or(SqrtError::InternalContradiction {
        step: "step I: all candidates inside the 2t-torsion subgroup",
    })?;

    let mut trace = SqrtTrace {
        branch: Branch::Two,
        cofactor: Some(t.clone()),
        witness: Some(gval),
        k: None,
        prime_index: None,
        r: None,
        j: None,
        zeta: None,
    };

    // Step II: the 2-power branch.
    if !ctx.gpow(&g, &(&q1 >> (f.two_exp - 1)))?.is_infinity() {
        let k = largest_infinity_k(&ctx, &g, &q1, 2, f.two_exp)?;
        let a = match ctx.gpow(&g, &(&q1 >> (k + 2)))? {
            GElem::Finite(a) => a,
            GElem::Infinity => {
                return Err(SqrtError::InternalContradiction {
                    step: "step II.2: order-4 element collapsed to the identity",
                })
            }
        };
        let zeta4 = config.cache.get_or_try_insert(ring, 4, || {
            let spec = ZetaSpec::from_parts(4, f.two_exp, &q1 >> f.two_exp);
            Ok(roots::find_zeta4(ring, &spec)?)
        })?;
        let root = a.mul(&zeta4);
        if root.square() != *beta {
            return Err(SqrtError::InternalContradiction {
                step: "step II.3: a·sqrt(-1) does not square to beta",
            });
        }
        trace.k = Some(k);
        trace.zeta = Some(zeta4.value().clone());
        return Ok(SqrtOutcome {
            roots: ordered_pair(root),
            trace,
        });
    }

    // Step III: smallest m with [g]^((q-1)/p_m^e_m) ≠ [∞].
    let mut picked = None;
    for (idx, &(p, e)) in f.odd_primes.iter().enumerate() {
        let exp = &q1 / BigUint::from(p).pow(e);
        if !ctx.gpow(&g, &exp)?.is_infinity() {
            picked = Some((idx, p, e));
            break;
        }
    }
    let (m_idx, r, e_r) = picked.ok_or(SqrtError::InternalContradiction {
        step: "step III: no odd prime detaches the witness order",
    })?;

    // Step IV.
    let k = largest_infinity_k(&ctx, &g, &q1, r, e_r)?;
    let a = match ctx.gpow(&g, &(&q1 / BigUint::from(r).pow(k + 1)))? {
        GElem::Finite(a) => a,
        GElem::Infinity => {
            return Err(SqrtError::InternalContradiction {
                step: "step IV.2: order-r element collapsed to the identity",
            })
        }
    };
    let zeta = config.cache.get_or_try_insert(ring, r, || {
        acquire_zeta_r(ring, r, e_r, &(&q1 / BigUint::from(r).pow(e_r)), config)
    })?;

    let one = ring.one();
    let mut zj = zeta.clone();
    for j in 1..=(r - 1) / 2 {
        let num = a.mul(&zj.sub(&one));
        let den = zj.add(&one);
        let cand = num.div(&den)?;
        if cand.square() == *beta {
            trace.branch = Branch::OddPrime;
            trace.k = Some(k);
            trace.prime_index = Some(m_idx);
            trace.r = Some(r);
            trace.j = Some(j);
            trace.zeta = Some(zeta.value().clone());
            return Ok(SqrtOutcome {
                roots: ordered_pair(cand),
                trace,
            });
        }
        zj = zj.mul(&zeta);
    }
    Err(SqrtError::InternalContradiction {
        step: "step IV.4: no power of zeta matches beta",
    })
}

/// Largest k with `[g]^((q-1)/base^k) = [∞]`, scanning k upward from 0.
fn largest_infinity_k(
    ctx: &GroupCtx,
    g: &GElem,
    q1: &BigUint,
    base: u64,
    e: u32,
) -> Result<u32, SqrtError> {
    if !ctx.gpow(g, q1)?.is_infinity() {
        return Err(SqrtError::InternalContradiction {
            step: "largest-k scan: [g]^(q-1) is not the identity",
        });
    }
    let b = BigUint::from(base);
    let mut k = 0u32;
    let mut exp = q1.clone();
    while k < e {
        let next = &exp / &b;
        if !ctx.gpow(g, &next)?.is_infinity() {
            break;
        }
        exp = next;
        k += 1;
    }
    Ok(k)
}

/// Obtains ζ_r per the configured strategy, falling back to the search when
/// a special-case strategy does not apply to this r.
fn acquire_zeta_r(
    ring: &Ring,
    r: u64,
    e_r: u32,
    t_r: &BigUint,
    config: &SqrtConfig,
) -> Result<Elem, SqrtError> {
    match config.zeta_strategy {
        ZetaStrategy::Standin if r == 3 => zeta3_standin(ring),
        ZetaStrategy::RadicalTower if tower_applicable(ring, r) => zeta_by_tower(ring, r),
        ZetaStrategy::Search | ZetaStrategy::Standin | ZetaStrategy::RadicalTower => {
            if t_r <= &config.cofactor_ceiling {
                let spec = ZetaSpec::from_parts(r, e_r, t_r.clone());
                Ok(roots::find_zeta_r(ring, &spec)?)
            } else if r == 3 {
                zeta3_standin(ring)
            } else if tower_applicable(ring, r) {
                zeta_by_tower(ring, r)
            } else {
                Err(SqrtError::InfeasibleFactorization {
                    cofactor: t_r.clone(),
                })
            }
        }
    }
}

/// ζ₃ = (−1 + √-3)/2; valid whenever 3 | q − 1.
fn zeta3_standin(ring: &Ring) -> Result<Elem, SqrtError> {
    let s = roots::fixed_sqrt(ring, -3)?;
    let two_inv = ring.elem_u64(2).inv()?;
    let z = s.sub(&ring.one()).mul(&two_inv);
    debug_assert!(z.pow_u64(3).is_one());
    Ok(z)
}

fn tower_applicable(ring: &Ring, r: u64) -> bool {
    if !is_two_three_pow_plus_one(r) || r < 7 {
        return false;
    }
    let p4 = residue_u32(ring.modulus(), 4);
    let p9 = residue_u32(ring.modulus(), 9);
    p4 == 1 && (p9 == 4 || p9 == 7)
}

fn zeta_by_tower(ring: &Ring, r: u64) -> Result<Elem, SqrtError> {
    let tower = periods::build_tower(r, &periods::Precision::default())?;
    Ok(periods::eval_mod_p(&tower, ring)?)
}

/// Dispatches to the easy or deterministic path; exactly one applies to any
/// odd prime modulus.
pub fn sqrt_mod(ring: &Ring, beta: &Elem, config: &SqrtConfig) -> Result<SqrtOutcome, SqrtError> {
    if residue_u32(ring.modulus(), 8) == 1 {
        sqrt_deterministic(ring, beta, config)
    } else {
        let roots = sqrt_easy(ring, beta)?;
        Ok(SqrtOutcome {
            roots,
            trace: SqrtTrace::easy(),
        })
    }
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
    fn factorization_examples() {
        let f = factor_qminus1(&BigUint::from(41u32), 1_000_000);
        assert_eq!(f.two_exp, 3);
        assert_eq!(f.odd_primes, vec![(5, 1)]);
        assert!(f.cofactor.is_one());

        let f = factor_qminus1(&BigUint::from(97u32), 1_000_000);
        assert_eq!(f.two_exp, 5);
        assert_eq!(f.odd_primes, vec![(3, 1)]);
        assert!(f.cofactor.is_one());

        let f = factor_qminus1(&BigUint::from(59u32), 3);
        assert_eq!(f.two_exp, 1);
        assert!(f.odd_primes.is_empty());
        assert_eq!(f.cofactor, BigUint::from(29u32));
    }

    #[test]
    fn factorization_invariants_random_odd() {
        for q in (5u64..20_000).step_by(377) {
            let q = q | 1;
            let qb = BigUint::from(q);
            for bound in [3u64, 10, 1000] {
                let f = factor_qminus1(&qb, bound);
                assert_eq!(&f.reassemble() + 1u32, qb, "q={} bound={}", q, bound);
                for &(p, e) in &f.odd_primes {
                    assert!(crate::primes::is_prime_u64(p));
                    assert!(p <= bound);
                    assert!(e >= 1);
                    assert!(!(&f.cofactor % p).is_zero());
                }
                assert!(!(&f.cofactor % 2u32).is_zero() || f.cofactor.is_one());
                let mut sorted = f.odd_primes.clone();
                sorted.sort();
                assert_eq!(sorted, f.odd_primes);
            }
        }
    }

    #[test]
    fn classify_examples() {
        let q = BigUint::from(97u32);
        assert_eq!(classify_case(&q, &factor_qminus1(&q, 1_000_000)), CaseTag::Thm2_1);

        let q = BigUint::from(337u32);
        assert_eq!(classify_case(&q, &factor_qminus1(&q, 1_000_000)), CaseTag::Thm2_2);

        let q = BigUint::from(7u32);
        assert_eq!(classify_case(&q, &factor_qminus1(&q, 1_000_000)), CaseTag::Easy);

        let q = BigUint::from(41u32);
        assert_eq!(classify_case(&q, &factor_qminus1(&q, 1_000_000)), CaseTag::Thm2_3);
    }

    #[test]
    fn sqrt_easy_examples() {
        let r7 = ring(7);
        let (lo, hi) = sqrt_easy(&r7, &r7.elem_u64(2)).unwrap();
        assert_eq!((val(&lo), val(&hi)), (3, 4));

        let r13 = ring(13);
        let (lo, hi) = sqrt_easy(&r13, &r13.elem_u64(3)).unwrap();
        assert_eq!((val(&lo), val(&hi)), (4, 9));

        let r17 = ring(17);
        assert!(matches!(
            sqrt_easy(&r17, &r17.elem_u64(2)),
            Err(SqrtError::NotEasyCase)
        ));
        assert!(matches!(
            sqrt_easy(&r7, &r7.elem_u64(3)),
            Err(SqrtError::NotASquare)
        ));
    }

    #[test]
    fn sqrt_deterministic_spec_trace() {
        let r41 = ring(41);
        let out = sqrt_deterministic(&r41, &r41.elem_u64(2), &SqrtConfig::default()).unwrap();
        assert_eq!((val(&out.roots.0), val(&out.roots.1)), (17, 24));
        assert_eq!(out.trace.branch, Branch::OddPrime);
        assert_eq!(out.trace.cofactor, Some(BigUint::one()));
        assert_eq!(out.trace.witness, Some(BigUint::one()));
        assert_eq!(out.trace.r, Some(5));
        assert_eq!(out.trace.k, Some(0));
        assert_eq!(out.trace.j, Some(2));
        assert_eq!(out.trace.zeta, Some(BigUint::from(10u32)));
    }

    #[test]
    fn sqrt_of_one_is_scan_root() {
        let r41 = ring(41);
        let out = sqrt_deterministic(&r41, &r41.elem_u64(1), &SqrtConfig::default()).unwrap();
        assert_eq!((val(&out.roots.0), val(&out.roots.1)), (1, 40));
        assert_eq!(out.trace.branch, Branch::ScanRoot);
    }

    #[test]
    fn sqrt_rejects_nonresidue() {
        let r41 = ring(41);
        assert!(matches!(
            sqrt_deterministic(&r41, &r41.elem_u64(3), &SqrtConfig::default()),
            Err(SqrtError::NotASquare)
        ));
        assert!(matches!(
            sqrt_deterministic(&r41, &r41.elem_u64(0), &SqrtConfig::default()),
            Err(SqrtError::NotASquare)
        ));
    }

    #[test]
    fn deterministic_same_trace() {
        let r = ring(233);
        let cfg = SqrtConfig::default();
        for b in 2..40u64 {
            let beta = r.elem_u64(b);
            if !beta.euler_is_square().unwrap() {
                continue;
            }
            let a = sqrt_deterministic(&r, &beta, &cfg).unwrap();
            let b2 = sqrt_deterministic(&r, &beta, &cfg).unwrap();
            assert_eq!(a, b2);
        }
    }

    #[test]
    fn branch_coverage_small_fields() {
        // Fermat-style primes exercise Step II for every β; 41 exercises IV.
        for q in [17u64, 97, 193, 257] {
            let r = ring(q);
            let cfg = SqrtConfig::default();
            let mut seen_two = false;
            for b in 1..q {
                let beta = r.elem_u64(b);
                if !beta.euler_is_square().unwrap() {
                    continue;
                }
                let out = sqrt_deterministic(&r, &beta, &cfg).unwrap();
                assert_eq!(out.roots.0.square(), beta);
                seen_two |= out.trace.branch == Branch::Two;
            }
            assert!(seen_two, "q={} never hit the 2-power branch", q);
        }
        let r = ring(41);
        let out = sqrt_deterministic(&r, &r.elem_u64(2), &SqrtConfig::default()).unwrap();
        assert_eq!(out.trace.branch, Branch::OddPrime);
    }

    #[test]
    fn dispatcher_totality_small() {
        for p in primes_below(600) {
            if p < 3 {
                continue;
            }
            let r = ring(p);
            let cfg = SqrtConfig::default();
            for b in 1..p {
                let beta = r.elem_u64(b);
                let is_sq = beta.euler_is_square().unwrap();
                let easy = sqrt_easy(&r, &beta);
                let hard = sqrt_deterministic(&r, &beta, &cfg);
                if !is_sq {
                    assert!(easy.is_err() && hard.is_err());
                    continue;
                }
                // Exactly one path succeeds.
                assert!(
                    easy.is_ok() != hard.is_ok(),
                    "p={} b={}: easy={:?} hard={:?}",
                    p,
                    b,
                    easy.is_ok(),
                    hard.is_ok()
                );
                let out = sqrt_mod(&r, &beta, &cfg).unwrap();
                assert_eq!(out.roots.0.square(), beta);
                assert_eq!(out.roots.1.square(), beta);
                assert!(out.roots.0.value() < out.roots.1.value());
            }
        }
    }

    #[test]
    fn zeta_strategies_agree() {
        // 13 = 2·2·3+1: r = 3 admits both the standin and the search.
        let r = ring(13);
        let f = factor_qminus1(r.modulus(), 1_000_000);
        assert!(f.odd_primes.contains(&(3, 1)));
        let spec = ZetaSpec::from_parts(3, 1, BigUint::from(4u32));
        let searched = roots::find_zeta_r(&r, &spec).unwrap();
        let standin = zeta3_standin(&r).unwrap();
        // Both are primitive cube roots (possibly conjugate).
        assert!(searched.pow_u64(3).is_one() && !searched.is_one());
        assert!(standin.pow_u64(3).is_one() && !standin.is_one());
        assert!(standin == searched || standin == searched.square());
    }

    #[test]
    fn infeasible_cofactor_refused() {
        // q - 1 = 2^4 · 5^13: with bound 3 the 5-part stays in the cofactor.
        let q = (BigUint::from(5u32).pow(13) << 4) + 1u32;
        let r = Ring::new(q).unwrap();
        let mut cfg = SqrtConfig::default();
        cfg.bound = 3;
        cfg.cofactor_ceiling = BigUint::from(1u32 << 10);
        let f = factor_qminus1(r.modulus(), cfg.bound);
        assert!(f.cofactor > cfg.cofactor_ceiling);
        match sqrt_deterministic_with_factorization(&r, &r.elem_u64(4), &f, &cfg) {
            Err(SqrtError::InfeasibleFactorization { .. }) => {}
            other => panic!("expected InfeasibleFactorization, got {:?}", other),
        }
    }

    #[test]
    fn deterministic_refuses_easy_moduli() {
        let r13 = ring(13);
        assert!(matches!(
            sqrt_deterministic(&r13, &r13.elem_u64(3), &SqrtConfig::default()),
            Err(SqrtError::EasyCaseModulus)
        ));
    }
}
