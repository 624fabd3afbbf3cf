//! Deterministic square roots over finite fields without quadratic nonresidues,
//! together with the machinery that construction rests on: an α-free group law
//! on residues, deterministic root-of-unity searches, Gaussian-period radical
//! towers for ζ_q with q = 2·3^n + 1, and a Proth primality prover driven by
//! the square-root chain (-1)^(1/2), (-1)^(1/4), ....
//!
//! All arithmetic is arbitrary precision and every algorithm is deterministic:
//! identical inputs produce identical outputs, including the structured traces
//! returned by the square-root engine.
//!
//! Layout:
//!
//! * [`bigring`] — modular arithmetic over an odd modulus with explicit
//!   failure reporting for non-invertible elements,
//! * [`galpha`] — the group `G_α` on `{[a] : a² ≠ β} ∪ {[∞]}` whose law can be
//!   evaluated knowing only `β = α²`,
//! * [`roots`] — primitive r-th and 4th roots of unity by bounded search,
//!   easy cube roots, and a deterministic fixed-size square root,
//! * [`sqrt`] — the deterministic square-root algorithm, the factorization of
//!   `q − 1`, and the special-case classifier,
//! * [`proth`] — the primality prover and certificate verification for
//!   `N = 2^e·t + 1` with `2^e > t`,
//! * [`periods`] — radical towers of nested cube roots expressing ζ_q for
//!   `q = 2·3^n + 1`, with exact constants in `Q(√-q, √-3)`,
//! * [`selftest`] — the desk-scale verification suites shared by the CLI and
//!   the acceptance tests.

pub mod bigring;
pub mod galpha;
pub mod periods;
pub mod primes;
pub mod proth;
pub mod roots;
pub mod selftest;
pub mod sqrt;
