//! Numeric construction of the radical tower.
//!
//! Every tower value v at level m is tracked through its full vector of
//! σ-images (σ^0 v, σ^1 v, …): applying σ is then an index shift, so the
//! children
//!
//! ```text
//! F = v + σ_(m+1)v + σ_(m+1)²v
//! G = (v + ρ·σ_(m+1)v + ρ²·σ_(m+1)²v)³
//! H = (v + ρ²·σ_(m+1)v + ρ·σ_(m+1)²v)³
//! ```
//!
//! with σ_(m+1) = σ^(3^(n-m-1)) are componentwise combinations of rotated
//! orbit vectors. Level-n values are σ-fixed (their orbit is constant) and
//! get recognized as exact [`QFElem`] constants: the involution ρ ↔ ρ²
//! mirrors G and H steps, pairing each leaf z₁ with a conjugate z₂ so that
//! z₁ + z₂ and (z₁ − z₂)/√-3 lie in Q(√-q) with half-integer coordinates.

use num_bigint::BigInt;

use crate::bigring::Ring;
use crate::periods::float::{Complex, FloatCtx, Real};
use crate::periods::qf::QFElem;
use crate::periods::{NodeKind, PeriodTower, PeriodsError, Relation, TowerNode};

/// Guard bits on top of the requested working precision.
const GUARD_BITS: u32 = 64;

pub(crate) struct Numerics {
    pub ctx: FloatCtx,
    pub sqrt_q: Real,
    pub sqrt_3: Real,
    pub sqrt_3q: Real,
    pub rho: Complex,
    pub rho2: Complex,
    /// ζ^x for x = 0..q-1.
    pub zeta_table: Vec<Complex>,
    /// Exponent orbit s^j mod q for j = 0..3^n-1.
    pub exps: Vec<usize>,
}

pub(crate) fn numerics(q: u64, n: u32, sigma_base: u64, working_bits: u32) -> Numerics {
    let ctx = FloatCtx::new(working_bits);
    let ord = 3usize.pow(n);
    let mut exps = Vec::with_capacity(ord);
    let mut x = 1u64;
    for _ in 0..ord {
        exps.push(x as usize);
        x = x * sigma_base % q;
    }
    let zeta_table = ctx.roots_of_unity(q);
    let sqrt_3 = ctx.sqrt_u64(3);
    let rho = Complex {
        re: ctx.from_ratio(&BigInt::from(-1), &BigInt::from(2)),
        im: ctx.div_u32(&sqrt_3, 2),
    };
    let rho2 = Complex {
        re: rho.re.clone(),
        im: ctx.neg(&rho.im),
    };
    Numerics {
        sqrt_q: ctx.sqrt_u64(q),
        sqrt_3q: ctx.sqrt_u64(3 * q),
        sqrt_3,
        rho,
        rho2,
        zeta_table,
        exps,
        ctx,
    }
}

/// σ: ζ ↦ ζ^(g²) for the smallest primitive root g mod q. For q = 2·3^n + 1
/// primitivity reduces to escaping both maximal subgroups.
pub(crate) fn sigma_base_for(q: u64) -> u64 {
    let ring = Ring::from_u64(q).expect("tower primes are odd and > 3");
    let q1 = q - 1;
    let mut g = 2u64;
    loop {
        let e = ring.elem_u64(g);
        if !e.pow_u64(q1 / 2).is_one() && !e.pow_u64(q1 / 3).is_one() {
            return g * g % q;
        }
        g += 1;
        assert!(g < q, "no primitive root found; modulus not prime?");
    }
}

struct BuildNode {
    path: String,
    orbit: Vec<Complex>,
}

/// Expands one node into its F/G/H children; also returns the parent's
/// uncubed g/h combos (the σ^0 components), which relation recognition and
/// the numeric verifier consume.
fn children(
    num: &Numerics,
    node: &BuildNode,
    delta: usize,
) -> ([BuildNode; 3], (Complex, Complex)) {
    let ctx = &num.ctx;
    let ord = node.orbit.len();
    let mut f = Vec::with_capacity(ord);
    let mut g = Vec::with_capacity(ord);
    let mut h = Vec::with_capacity(ord);
    let mut combo0 = None;
    for i in 0..ord {
        let v0 = &node.orbit[i];
        let v1 = &node.orbit[(i + delta) % ord];
        let v2 = &node.orbit[(i + 2 * delta) % ord];
        f.push(ctx.cadd(&ctx.cadd(v0, v1), v2));
        let gc = ctx.cadd(&ctx.cadd(v0, &ctx.cmul(&num.rho, v1)), &ctx.cmul(&num.rho2, v2));
        let hc = ctx.cadd(&ctx.cadd(v0, &ctx.cmul(&num.rho2, v1)), &ctx.cmul(&num.rho, v2));
        if i == 0 {
            combo0 = Some((gc.clone(), hc.clone()));
        }
        g.push(ctx.ccube(&gc));
        h.push(ctx.ccube(&hc));
    }
    (
        [
            BuildNode {
                path: format!("{}F", node.path),
                orbit: f,
            },
            BuildNode {
                path: format!("{}G", node.path),
                orbit: g,
            },
            BuildNode {
                path: format!("{}H", node.path),
                orbit: h,
            },
        ],
        combo0.expect("orbit is non-empty"),
    )
}

pub(crate) fn mirror_path(path: &str) -> String {
    path.chars()
        .map(|c| match c {
            'G' => 'H',
            'H' => 'G',
            other => other,
        })
        .collect()
}

/// Rounds 2z into (a₀, a₁) with z ≈ (a₀ + a₁√-q)/2, checking the residual.
fn recognize_halves(
    num: &Numerics,
    z: &Complex,
    residual_bits: u32,
) -> Result<(BigInt, BigInt), PeriodsError> {
    let ctx = &num.ctx;
    let a0 = ctx.round_to_bigint(&ctx.mul_i64(&z.re, 2));
    let a1 = ctx.round_to_bigint(&ctx.div(&ctx.mul_i64(&z.im, 2), &num.sqrt_q));
    let back = Complex {
        re: ctx.div_u32(&ctx.from_bigint(&a0), 2),
        im: ctx.div_u32(&ctx.mul(&ctx.from_bigint(&a1), &num.sqrt_q), 2),
    };
    let dist = ctx.cdist(z, &back);
    if !ctx.abs_lt_pow2(&dist, residual_bits) {
        return Err(PeriodsError::RecognitionFailed {
            bits: residual_bits * 2,
        });
    }
    Ok((a0, a1))
}

/// (z₁ − z₂)/√-3 as a complex value: dividing by i√3 maps (x, y) to
/// (y/√3, −x/√3).
fn div_by_sqrt_minus3(num: &Numerics, d: &Complex) -> Complex {
    let ctx = &num.ctx;
    Complex {
        re: ctx.div(&d.im, &num.sqrt_3),
        im: ctx.neg(&ctx.div(&d.re, &num.sqrt_3)),
    }
}

/// Recognizes the conjugate pair (z₁, z₂) as an exact quadruple for z₁:
/// z₁ = (a₀ + a₁√-q + b₀√-3 − b₁√(3q))/4.
fn recognize_pair(
    num: &Numerics,
    q: u64,
    z1: &Complex,
    z2: &Complex,
    residual_bits: u32,
) -> Result<QFElem, PeriodsError> {
    let ctx = &num.ctx;
    let (a0, a1) = recognize_halves(num, &ctx.cadd(z1, z2), residual_bits)?;
    let d = div_by_sqrt_minus3(num, &ctx.csub(z1, z2));
    let (b0, b1) = recognize_halves(num, &d, residual_bits)?;
    let value = QFElem::new(q, [a0, a1, b0.clone(), -b1.clone()]);
    // Back-substitute the assembled quadruple against z₁ itself.
    let embedded = value.embed(ctx, &num.sqrt_q, &num.sqrt_3, &num.sqrt_3q);
    if !ctx.abs_lt_pow2(&ctx.cdist(z1, &embedded), residual_bits) {
        return Err(PeriodsError::RecognitionFailed {
            bits: residual_bits * 2,
        });
    }
    Ok(value)
}

/// One full construction attempt at a fixed working precision.
pub(crate) fn build_at(q: u64, n: u32, bits: u32) -> Result<PeriodTower, PeriodsError> {
    let sigma_base = sigma_base_for(q);
    let num = numerics(q, n, sigma_base, bits + GUARD_BITS);
    let ctx = &num.ctx;
    let residual_bits = bits / 2;
    let ord = 3usize.pow(n);

    let root_orbit: Vec<Complex> = num.exps.iter().map(|&e| num.zeta_table[e].clone()).collect();
    let mut levels: Vec<Vec<BuildNode>> = vec![vec![BuildNode {
        path: String::new(),
        orbit: root_orbit,
    }]];
    // Uncubed combos of every parent, keyed by the parent path.
    let mut combos: std::collections::HashMap<String, (Complex, Complex)> =
        std::collections::HashMap::new();
    for m in 0..n {
        let delta = 3usize.pow(n - m - 1);
        let mut next = Vec::new();
        for node in &levels[m as usize] {
            let ([f, g, h], combo) = children(&num, node, delta);
            combos.insert(node.path.clone(), combo);
            next.push(f);
            next.push(g);
            next.push(h);
        }
        levels.push(next);
    }

    // Leaves must be σ-fixed: constant orbits, up to rounding.
    let leaf_level = &levels[n as usize];
    for node in leaf_level {
        for i in 1..ord {
            if !ctx.abs_lt_pow2(&ctx.cdist(&node.orbit[i], &node.orbit[0]), residual_bits) {
                return Err(PeriodsError::RecognitionFailed { bits });
            }
        }
    }

    // Assemble the node table in BFS order; leaves get recognized constants.
    let mut nodes: Vec<TowerNode> = Vec::new();
    let mut level_base = vec![0usize];
    for (lvl, level_nodes) in levels.iter().enumerate() {
        level_base.push(nodes.len() + level_nodes.len());
        for (i, b) in level_nodes.iter().enumerate() {
            let kind = if (lvl as u32) < n {
                let child_base = level_base[lvl + 1] + 3 * i;
                NodeKind::Internal {
                    f: child_base,
                    g: child_base + 1,
                    h: child_base + 2,
                }
            } else {
                // Recognize via the mirror pairing.
                let mpath = mirror_path(&b.path);
                let value = if mpath == b.path {
                    let (a0, a1) = recognize_halves(&num, &b.orbit[0], residual_bits)?;
                    QFElem::new(q, [&a0 * 2, &a1 * 2, BigInt::from(0), BigInt::from(0)])
                } else {
                    let partner = level_nodes
                        .iter()
                        .find(|n| n.path == mpath)
                        .expect("mirror path exists at the same level");
                    recognize_pair(&num, q, &b.orbit[0], &partner.orbit[0], residual_bits)?
                };
                NodeKind::Leaf { value }
            };
            nodes.push(TowerNode {
                path: b.path.clone(),
                level: lvl as u32,
                kind,
            });
        }
    }

    // Relations: for each bottom-level parent P, the uncubed product
    // g(P)·h(mirror P) is fixed by σ and by ρ ↔ ρ², hence lies in Q(√-q).
    let bottom = &levels[(n - 1) as usize];
    let mut relations = Vec::new();
    for p_node in bottom {
        let mpath = mirror_path(&p_node.path);
        let (g_combo, _) = combos.get(&p_node.path).expect("parent combos recorded");
        let (_, h_combo) = combos.get(&mpath).expect("parent combos recorded");
        let prod = ctx.cmul(g_combo, h_combo);
        let (c0, c1) = recognize_halves(&num, &prod, residual_bits)?;
        let product = QFElem::new(q, [&c0 * 2, &c1 * 2, BigInt::from(0), BigInt::from(0)]);
        let index_of = |path: String| {
            nodes
                .iter()
                .position(|n| n.path == path)
                .expect("child indices exist")
        };
        relations.push(Relation {
            g_node: index_of(format!("{}G", p_node.path)),
            h_node: index_of(format!("{}H", mpath)),
            product,
        });
    }

    Ok(PeriodTower {
        q,
        n,
        sigma_base,
        nodes,
        relations,
    })
}

/// Numeric soundness check of a (possibly deserialized) tower: rebuild the
/// orbit values, compare every recognized constant against its numeric
/// counterpart, check the relation products, and reassemble ζ_q bottom-up
/// using the true combos as the consistent cube-root choice.
pub(crate) fn verify_numeric(tower: &PeriodTower, bits: u32) -> bool {
    let q = tower.q;
    let n = tower.n;
    if crate::periods::tower_height(q).ok() != Some(n) {
        return false;
    }
    let num = numerics(q, n, tower.sigma_base, bits + GUARD_BITS);
    let ctx = &num.ctx;
    let residual_bits = bits / 2;

    let root_orbit: Vec<Complex> = num.exps.iter().map(|&e| num.zeta_table[e].clone()).collect();
    let mut levels: Vec<Vec<BuildNode>> = vec![vec![BuildNode {
        path: String::new(),
        orbit: root_orbit,
    }]];
    let mut combos: std::collections::HashMap<String, (Complex, Complex)> =
        std::collections::HashMap::new();
    for m in 0..n {
        let delta = 3usize.pow(n - m - 1);
        let mut next = Vec::new();
        for node in &levels[m as usize] {
            let ([f, g, h], combo) = children(&num, node, delta);
            combos.insert(node.path.clone(), combo);
            next.push(f);
            next.push(g);
            next.push(h);
        }
        levels.push(next);
    }
    let find = |path: &str| -> Option<&BuildNode> {
        levels.get(path.len())?.iter().find(|b| b.path == path)
    };

    // Tolerance scaled by magnitude: |a - b| ≤ (1 + |b|)·2^(-residual_bits).
    let close = |a: &Complex, b: &Complex| -> bool {
        let dist = ctx.cdist(a, b);
        let scale = ctx.add(
            &ctx.add(&ctx.abs(&b.re), &ctx.abs(&b.im)),
            &ctx.from_i64(1),
        );
        ctx.abs_lt_pow2(&ctx.div(&dist, &scale), residual_bits)
    };

    // Every leaf constant must match its numeric value.
    for node in &tower.nodes {
        if let NodeKind::Leaf { value } = &node.kind {
            let numeric = match find(&node.path) {
                Some(b) => &b.orbit[0],
                None => return false,
            };
            let embedded = value.embed(ctx, &num.sqrt_q, &num.sqrt_3, &num.sqrt_3q);
            if !close(&embedded, numeric) {
                return false;
            }
        }
    }

    // Relation products must match the uncubed combo products.
    for rel in &tower.relations {
        let g_path = &tower.nodes[rel.g_node].path;
        let h_path = &tower.nodes[rel.h_node].path;
        if g_path.is_empty() || h_path.is_empty() {
            return false;
        }
        let g_parent = combos.get(&g_path[..g_path.len() - 1]);
        let h_parent = combos.get(&h_path[..h_path.len() - 1]);
        let (g_combo, h_combo) = match (g_parent, h_parent) {
            (Some(gp), Some(hp)) => (gp.0.clone(), hp.1.clone()),
            _ => return false,
        };
        let prod = ctx.cmul(&g_combo, &h_combo);
        let embedded = rel
            .product
            .embed(ctx, &num.sqrt_q, &num.sqrt_3, &num.sqrt_3q);
        if !close(&embedded, &prod) {
            return false;
        }
    }

    // Reassemble from the constants with the true combos as the consistent
    // cube-root choice, bottom-up by level.
    let mut assembled: Vec<Option<Complex>> = vec![None; tower.nodes.len()];
    let mut order: Vec<usize> = (0..tower.nodes.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(tower.nodes[i].level));
    for idx in order {
        let node = &tower.nodes[idx];
        match &node.kind {
            NodeKind::Leaf { value } => {
                assembled[idx] =
                    Some(value.embed(ctx, &num.sqrt_q, &num.sqrt_3, &num.sqrt_3q));
            }
            NodeKind::Internal { f, g, h } => {
                let (f_val, g_val, h_val) = match (&assembled[*f], &assembled[*g], &assembled[*h])
                {
                    (Some(a), Some(b), Some(c)) => (a.clone(), b.clone(), c.clone()),
                    _ => return false,
                };
                let (g_combo, h_combo) = match combos.get(&node.path) {
                    Some(c) => (c.0.clone(), c.1.clone()),
                    None => return false,
                };
                // The combos are cube roots of the children's values.
                if !close(&ctx.ccube(&g_combo), &g_val) || !close(&ctx.ccube(&h_combo), &h_val) {
                    return false;
                }
                let sum = ctx.cadd(&ctx.cadd(&f_val, &g_combo), &h_combo);
                assembled[idx] = Some(Complex {
                    re: ctx.div_u32(&sum.re, 3),
                    im: ctx.div_u32(&sum.im, 3),
                });
            }
        }
    }
    let root = match &assembled[0] {
        Some(v) => v.clone(),
        None => return false,
    };
    // Within tolerance of some primitive q-th root of unity.
    (1..q as usize).any(|k| {
        let target = &num.zeta_table[k];
        ctx.abs_lt_pow2(&ctx.cdist(&root, target), residual_bits)
    })
}

