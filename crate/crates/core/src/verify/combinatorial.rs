//! Projective-plane suites and the reconciliation of the group model with the
//! residue plane.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;
use petgraph::algo::is_isomorphic_matching;
use petgraph::graph::UnGraph;
use serde_json::json;

use super::{show, CheckKind, CheckResult, Ctx};
use crate::coweights::{Coweight, LAMBDA1, LAMBDA2};
use crate::error::Result;
use crate::exact::ExactVec;
use crate::pgplane::{build_plane, check_plane_axioms, check_residue_identities, ProjectivePlane};

/// Plane orders checked regardless of the model's `p`.
pub const PLANE_ORDERS: [u64; 4] = [2, 3, 5, 7];
/// Largest extra order (the model's `p`) the plane suite also covers.
const MAX_EXTRA_ORDER: u64 = 13;

pub(super) fn plane(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let mut orders: BTreeSet<u64> = PLANE_ORDERS.into_iter().collect();
    if ctx.config().p <= MAX_EXTRA_ORDER {
        orders.insert(ctx.config().p);
    }
    let mut out = Vec::new();
    for q in orders {
        let plane = build_plane(q)?;
        for check in [check_plane_axioms as fn(&ProjectivePlane) -> CheckResult, check_residue_identities] {
            let mut r = ctx.timed(|| Ok(check(&plane)))?;
            r.name = format!("{}-q{q}", r.name);
            out.push(r);
        }
    }
    Ok(out)
}

/// Cells of `part` inside the `F_λ` cell of atom 0, as sorted atom lists.
fn cells_inside(ctx: &Ctx, l: Coweight, fine: Coweight) -> Result<Vec<Vec<usize>>> {
    let coarse = ctx.filt.level(l)?;
    let part = ctx.filt.level(fine)?;
    let home = coarse.cell(0);
    let mut seen = std::collections::BTreeMap::new();
    for atom in (0..part.atom_count()).filter(|&a| coarse.cell(a) == home) {
        seen.entry(part.cell(atom)).or_insert_with(Vec::new).push(atom);
    }
    Ok(seen.into_values().collect())
}

fn indicator(n: usize, atoms: &[usize]) -> ExactVec {
    let mut v = vec![0i64; n];
    for &a in atoms {
        v[a] = 1;
    }
    ExactVec::from_i64s(&v)
}

/// Bipartite graph; node weight `false` for points/P-cells, `true` for lines/L-cells.
fn bipartite(left: usize, right: usize, adj: &[Vec<bool>]) -> UnGraph<bool, ()> {
    let mut g = UnGraph::new_undirected();
    let ls: Vec<_> = (0..left).map(|_| g.add_node(false)).collect();
    let rs: Vec<_> = (0..right).map(|_| g.add_node(true)).collect();
    for a in 0..left {
        for b in 0..right {
            if adj[a][b] {
                g.add_edge(ls[a], rs[b], ());
            }
        }
    }
    g
}

/// Sorted multiset of sorted rows of a square count matrix.
fn row_multiset(m: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut rows: Vec<Vec<u64>> = m
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.sort_unstable();
            r
        })
        .collect();
    rows.sort();
    rows
}

/// Inside one `F_λ` cell, the `F_{λ+λ₁}` cells play the points off `l₀` and the
/// `F_{λ+λ₂}` cells the lines off `p₀`. Checks `E_{λ+λ₂} 1_a = q⁻¹ Σ_{L∼a} 1_L`,
/// the transition `E_{λ+λ₁}E_{λ+λ₂} 1_a = q⁻² Σ_{L∼a} Σ_{b∼L} 1_b`, graph isomorphism
/// with the plane residue, and equality of the point-line-point path-count multisets.
pub(super) fn cross_model(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let c = *ctx.config();
    let q = c.p;
    let qr = BigRational::from_integer(q.into());
    let n = ctx.space().atom_count();
    let plane = build_plane(q)?;
    let p0 = 0;
    let l0 = plane.lines_through(p0)[0];
    let (pts, lns) = plane.affine_residue(p0, l0);
    let plane_adj: Vec<Vec<bool>> = pts.iter().map(|&x| lns.iter().map(|&l| plane.incident(x, l)).collect()).collect();
    let plane_paths: Vec<Vec<u64>> = (0..pts.len())
        .map(|a| (0..pts.len()).map(|b| (0..lns.len()).filter(|&l| plane_adj[a][l] && plane_adj[b][l]).count() as u64).collect())
        .collect();
    let plane_graph = bipartite(pts.len(), lns.len(), &plane_adj);

    let levels: Vec<Coweight> = c
        .representable_levels()
        .into_iter()
        .filter(|&l| ctx.rep(l + LAMBDA1) && ctx.rep(l + LAMBDA2))
        .collect();
    if levels.is_empty() {
        let why = "no level with both upper neighbours representable";
        return Ok(["incidence", "transition", "isomorphism", "path-counts"]
            .into_iter()
            .map(|name| CheckResult::skipped(name, CheckKind::Exact, why))
            .collect());
    }

    let mut fails: [Option<serde_json::Value>; 4] = Default::default();
    let start = std::time::Instant::now();
    for &l in &levels {
        let pcells = cells_inside(ctx, l, l + LAMBDA1)?;
        let lcells = cells_inside(ctx, l, l + LAMBDA2)?;
        let e1 = ctx.e(l + LAMBDA1)?;
        let e2 = ctx.e(l + LAMBDA2)?;
        let size_ok = pcells.len() == pts.len() && lcells.len() == lns.len();
        let adj: Vec<Vec<bool>> = pcells
            .iter()
            .map(|a| lcells.iter().map(|b| a.iter().any(|x| b.binary_search(x).is_ok())).collect())
            .collect();

        for (ai, a) in pcells.iter().enumerate() {
            let ind = indicator(n, a);
            let lhs = e2.apply(&ind);
            let mut rhs = ExactVec::zeros(n);
            for (bi, b) in lcells.iter().enumerate() {
                if adj[ai][bi] {
                    rhs = rhs.add(&indicator(n, b));
                }
            }
            let rhs = rhs.scale(&qr.recip());
            if fails[0].is_none() {
                if let Some(atom) = lhs.first_difference(&rhs) {
                    fails[0] = Some(json!({"lambda": l.to_string(), "p_cell": ai, "atom": atom,
                        "lhs": show(&lhs.get(atom)), "rhs": show(&rhs.get(atom))}));
                }
            }
            let lhs = e1.apply(&lhs);
            let mut rhs = ExactVec::zeros(n);
            for (bi, b) in pcells.iter().enumerate() {
                let paths = (0..lcells.len()).filter(|&k| adj[ai][k] && adj[bi][k]).count() as i64;
                if paths > 0 {
                    rhs = rhs.add(&indicator(n, b).scale(&BigRational::from_integer(paths.into())));
                }
            }
            let rhs = rhs.scale(&(&qr * &qr).recip());
            if fails[1].is_none() {
                if let Some(atom) = lhs.first_difference(&rhs) {
                    fails[1] = Some(json!({"lambda": l.to_string(), "p_cell": ai, "atom": atom,
                        "lhs": show(&lhs.get(atom)), "rhs": show(&rhs.get(atom))}));
                }
            }
        }

        if fails[2].is_none() {
            let g = bipartite(pcells.len(), lcells.len(), &adj);
            if !size_ok || !is_isomorphic_matching(&g, &plane_graph, |a, b| a == b, |_, _| true) {
                fails[2] = Some(json!({"lambda": l.to_string(), "p_cells": pcells.len(), "l_cells": lcells.len(),
                    "points": pts.len(), "lines": lns.len()}));
            }
        }

        if fails[3].is_none() {
            // Transition weights of E_{λ+λ₁}E_{λ+λ₂} between P-cells, scaled by q².
            let mut group_paths = vec![vec![0u64; pcells.len()]; pcells.len()];
            for (ai, a) in pcells.iter().enumerate() {
                let t = e1.apply(&e2.apply(&indicator(n, a)));
                for (bi, b) in pcells.iter().enumerate() {
                    let v = t.get(b[0]) * &qr * &qr;
                    if !v.is_integer() || v < BigRational::zero() {
                        fails[3] = Some(json!({"lambda": l.to_string(), "from": ai, "to": bi, "weight": show(&v)}));
                    }
                    group_paths[ai][bi] = v.to_integer().try_into().unwrap_or(u64::MAX);
                }
            }
            if fails[3].is_none() && row_multiset(&group_paths) != row_multiset(&plane_paths) {
                fails[3] = Some(json!({"lambda": l.to_string(), "group": row_multiset(&group_paths),
                    "plane": row_multiset(&plane_paths)}));
            }
        }
    }
    let ms = if ctx.opts.timings { start.elapsed().as_millis() as u64 } else { 0 };
    let details = [
        "E(l+l2) 1_a = q^-1 sum over incident L-cells",
        "E(l+l1)E(l+l2) 1_a = q^-2 sum over point-line-point paths",
        "P-cell/L-cell intersection graph isomorphic to points off l0 / lines off p0",
        "q^2 x transition weights of E(l+l1)E(l+l2) between P-cells match plane path counts as multisets",
    ];
    let names = ["incidence", "transition", "isomorphism", "path-counts"];
    Ok(names
        .iter()
        .zip(fails)
        .zip(details)
        .map(|((name, fail), what)| {
            let mut r = match fail {
                None => CheckResult::new(*name, CheckKind::Exact, true).with_error("0").with_detail(format!(
                    "{what}; q={q}, {} levels, {} P-cells and {} L-cells per F(lambda) cell",
                    levels.len(),
                    pts.len(),
                    lns.len()
                )),
                Some(w) => CheckResult::new(*name, CheckKind::Exact, false).with_error("1").with_witness(w).with_detail(what),
            };
            r.ms = ms;
            r
        })
        .collect())
}
