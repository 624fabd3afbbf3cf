//! Reduction of a radical tower mod p.
//!
//! Each leaf constant maps into F_p through fixed square roots of −q and −3;
//! each cube root of the exact construction becomes a cube root in F_p with
//! a three-way ambiguity (multiplication by ζ₃). The recorded pairing
//! relations cut each tied pair down to a single free choice — fixing one
//! root of a pair determines the other as `product / root` — and the
//! surviving free choices are scanned in lexicographic order of their
//! ζ₃-exponent vectors until the assembled value passes `x ≠ 1, x^q = 1`.

use std::collections::HashMap;

use crate::bigring::{Elem, Ring};
use crate::periods::{NodeKind, PeriodTower, PeriodsError};
use crate::roots::{self, RootsError};

/// Enumeration guard: beyond 3^12 pruned choices the scan is refused.
const MAX_FREE_CHOICES: usize = 12;

fn residue_u32(ring: &Ring, m: u32) -> u32 {
    (ring.modulus() % m).to_u32_digits().first().copied().unwrap_or(0)
}

pub(crate) fn eval_mod_p_impl(tower: &PeriodTower, ring: &Ring) -> Result<Elem, PeriodsError> {
    let q = tower.q;
    if residue_u32(ring, q as u32) != 1 {
        return Err(PeriodsError::ModulusInadmissible {
            reason: "zeta_q does not exist: p is not 1 mod q",
        });
    }
    let p4 = residue_u32(ring, 4);
    let p9 = residue_u32(ring, 9);
    if p4 != 1 || !(p9 == 4 || p9 == 7) {
        return Err(PeriodsError::CubeRootsHard);
    }

    let s_q = roots::fixed_sqrt(ring, -(q as i64))?;
    let s_3 = roots::fixed_sqrt(ring, -3)?;
    let inv2 = ring.elem_u64(2).inv()?;
    let inv3 = ring.elem_u64(3).inv()?;
    let zeta3 = s_3.sub(&ring.one()).mul(&inv2);
    let zeta3_sq = zeta3.square();
    let zeta3_pow = |e: &Elem, trit: u8| -> Elem {
        match trit {
            0 => e.clone(),
            1 => e.mul(&zeta3),
            _ => e.mul(&zeta3_sq),
        }
    };

    // Leaf values mod p.
    let mut leaf_vals: Vec<Option<Elem>> = vec![None; tower.nodes.len()];
    for (i, node) in tower.nodes.iter().enumerate() {
        if let NodeKind::Leaf { value } = &node.kind {
            leaf_vals[i] = Some(value.map_mod_p(ring, &s_q, &s_3)?);
        }
    }

    // h-children forced by a relation, and base cube roots for the free
    // relation g-children (always leaves).
    let mut forced_by: Vec<Option<usize>> = vec![None; tower.nodes.len()];
    for (ri, rel) in tower.relations.iter().enumerate() {
        forced_by[rel.h_node] = Some(ri);
    }
    let mut rel_base_root: Vec<Elem> = Vec::with_capacity(tower.relations.len());
    let mut rel_elems: Vec<Elem> = Vec::with_capacity(tower.relations.len());
    for rel in &tower.relations {
        let v = leaf_vals[rel.g_node]
            .as_ref()
            .ok_or(PeriodsError::ModulusInadmissible {
                reason: "relation g-node is not a leaf",
            })?;
        rel_base_root.push(roots::cube_root(ring, v)?);
        rel_elems.push(rel.product.map_mod_p(ring, &s_q, &s_3)?);
    }

    // Free trits, in breadth-first node order: one per relation (its
    // g-side), plus both cube args of every internal node above the bottom
    // level. Stored as (key, kind) where the key orders the lexicographic
    // scan.
    #[derive(Clone, Copy)]
    enum Free {
        RelationG(usize),
        NodeArg { node: usize, is_h: bool },
    }
    let mut free: Vec<(usize, Free)> = Vec::new();
    for (ri, rel) in tower.relations.iter().enumerate() {
        free.push((rel.g_node, Free::RelationG(ri)));
    }
    for (i, node) in tower.nodes.iter().enumerate() {
        if let NodeKind::Internal { g, h, .. } = node.kind {
            if leaf_vals[g].is_none() {
                free.push((g, Free::NodeArg { node: i, is_h: false }));
            }
            if leaf_vals[h].is_none() {
                free.push((h, Free::NodeArg { node: i, is_h: true }));
            }
        }
    }
    free.sort_by_key(|&(key, _)| key);
    if free.len() > MAX_FREE_CHOICES {
        return Err(PeriodsError::ChoiceSpaceTooLarge {
            free_choices: free.len(),
        });
    }

    // Bottom-up assembly order.
    let mut order: Vec<usize> = (0..tower.nodes.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(tower.nodes[i].level));

    let total = 3usize.pow(free.len() as u32);
    'outer: for counter in 0..total {
        let mut trits = vec![0u8; free.len()];
        let mut c = counter;
        for slot in (0..free.len()).rev() {
            trits[slot] = (c % 3) as u8;
            c /= 3;
        }

        // Phase 1: cube roots of all leaf cube-args. Relation g-sides twist
        // the base root by their trit; the tied h-sides follow by division.
        let mut chosen: HashMap<usize, Elem> = HashMap::new();
        for (slot, &(_, kind)) in free.iter().enumerate() {
            if let Free::RelationG(ri) = kind {
                let rel = &tower.relations[ri];
                let g_root = zeta3_pow(&rel_base_root[ri], trits[slot]);
                let h_root = match rel_elems[ri].div(&g_root) {
                    Ok(v) => v,
                    Err(e) => return Err(PeriodsError::Ring(e)),
                };
                chosen.insert(rel.g_node, g_root);
                chosen.insert(rel.h_node, h_root);
            }
        }

        // Phase 2: assemble values bottom-up, taking fresh cube roots of
        // internal cube-args (their values depend on the lower trits).
        let mut assembled: Vec<Option<Elem>> = vec![None; tower.nodes.len()];
        for &idx in &order {
            match &tower.nodes[idx].kind {
                NodeKind::Leaf { .. } => {
                    assembled[idx] = leaf_vals[idx].clone();
                }
                NodeKind::Internal { f, g, h } => {
                    let f_val = assembled[*f].clone().expect("children assembled first");
                    let arg_root = |child: usize, is_h: bool| -> Result<Elem, SkipOrFail> {
                        if let Some(r) = chosen.get(&child) {
                            return Ok(r.clone());
                        }
                        let v = assembled[child].as_ref().expect("children assembled first");
                        let trit = free
                            .iter()
                            .position(|&(_, k)| {
                                matches!(k, Free::NodeArg { node, is_h: ih } if node == idx && ih == is_h)
                            })
                            .map(|i| trits[i])
                            .unwrap_or(0);
                        match roots::cube_root(ring, v) {
                            Ok(base) => Ok(zeta3_pow(&base, trit)),
                            Err(RootsError::NotCubicResidue) => Err(SkipOrFail::Skip),
                            Err(e) => Err(SkipOrFail::Fail(PeriodsError::Roots(e))),
                        }
                    };
                    let g_root = match arg_root(*g, false) {
                        Ok(v) => v,
                        Err(SkipOrFail::Skip) => continue 'outer,
                        Err(SkipOrFail::Fail(e)) => return Err(e),
                    };
                    let h_root = match arg_root(*h, true) {
                        Ok(v) => v,
                        Err(SkipOrFail::Skip) => continue 'outer,
                        Err(SkipOrFail::Fail(e)) => return Err(e),
                    };
                    let sum = f_val.add(&g_root).add(&h_root);
                    assembled[idx] = Some(sum.mul(&inv3));
                }
            }
        }

        let candidate = assembled[0].clone().expect("root assembled");
        if !candidate.is_one() && candidate.pow_u64(q).is_one() {
            return Ok(candidate);
        }
    }
    Err(PeriodsError::NoPrimitiveRoot)
}

enum SkipOrFail {
    /// The current trit assignment is inconsistent; try the next one.
    Skip,
    Fail(PeriodsError),
}
