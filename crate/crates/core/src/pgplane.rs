//! The Desarguesian projective plane `PG(2, q)` and the residue counting
//! identities behind the quadratic relation between `E_{λ+λ₁}` and `E_{λ+λ₂}`.

use std::io::Write;

use serde_json::json;

use crate::error::{Error, Result};
use crate::heisenberg::is_prime;
use crate::verify::report::{CheckKind, CheckResult};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectivePlane {
    q: u64,
    points: Vec<[u64; 3]>,
    lines: Vec<[u64; 3]>,
    /// `incidence[point][line]`.
    incidence: Vec<Vec<bool>>,
}

/// Nonzero vectors of `F_q³` whose first nonzero coordinate is 1, in lexicographic order.
fn normalized_vectors(q: u64) -> Vec<[u64; 3]> {
    let mut out = Vec::with_capacity((q * q + q + 1) as usize);
    out.push([0, 0, 1]);
    for c in 0..q {
        out.push([0, 1, c]);
    }
    for b in 0..q {
        for c in 0..q {
            out.push([1, b, c]);
        }
    }
    out
}

pub fn build_plane(q: u64) -> Result<ProjectivePlane> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    let points = normalized_vectors(q);
    let lines = points.clone();
    let incidence = points
        .iter()
        .map(|x| lines.iter().map(|l| (x[0] * l[0] + x[1] * l[1] + x[2] * l[2]) % q == 0).collect())
        .collect();
    Ok(ProjectivePlane { q, points, lines, incidence })
}

impl ProjectivePlane {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn points(&self) -> &[[u64; 3]] {
        &self.points
    }

    /// Lines as dual coordinates `[a, b, c]`: the points with `a x + b y + c z = 0`.
    pub fn lines(&self) -> &[[u64; 3]] {
        &self.lines
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    pub fn incident(&self, point: usize, line: usize) -> bool {
        self.incidence[point][line]
    }

    pub fn points_on(&self, line: usize) -> Vec<usize> {
        (0..self.point_count()).filter(|&x| self.incidence[x][line]).collect()
    }

    pub fn lines_through(&self, point: usize) -> Vec<usize> {
        (0..self.line_count()).filter(|&l| self.incidence[point][l]).collect()
    }

    /// Lines incident to both points.
    pub fn common_lines(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.line_count()).filter(|&l| self.incidence[a][l] && self.incidence[b][l]).collect()
    }

    /// Toggles one incidence; only useful for building counterexamples.
    pub fn flip_incidence(&mut self, point: usize, line: usize) {
        self.incidence[point][line] = !self.incidence[point][line];
    }

    /// Points not on `l0` and lines not through `p0`: the `q² + q²` vertices
    /// of the residue that sit strictly inside one cell of the coarser level.
    pub fn affine_residue(&self, p0: usize, l0: usize) -> (Vec<usize>, Vec<usize>) {
        let pts = (0..self.point_count()).filter(|&x| !self.incidence[x][l0]).collect();
        let lns = (0..self.line_count()).filter(|&l| !self.incidence[p0][l]).collect();
        (pts, lns)
    }

    /// `point_id,line_id` for every incident pair.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["point_id", "line_id"])?;
        for (x, row) in self.incidence.iter().enumerate() {
            for (l, &inc) in row.iter().enumerate() {
                if inc {
                    w.write_record([x.to_string(), l.to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Pair axiom, `N Nᵀ = qI + J`, and the point and line counts.
pub fn check_plane_axioms(plane: &ProjectivePlane) -> CheckResult {
    let q = plane.q as usize;
    let n = q * q + q + 1;
    let name = "axioms";
    let np = plane.point_count();
    // Two distinct points share exactly one line: off-diagonal of N Nᵀ is 1.
    for a in 0..np {
        for b in a + 1..np {
            let common = plane.common_lines(a, b).len();
            if common != 1 {
                return CheckResult::new(name, CheckKind::Exact, false)
                    .with_error("1")
                    .with_witness(json!({"points": [a, b], "common_lines": common}))
                    .with_detail("two distinct points must share exactly one line");
            }
        }
    }
    for a in 0..np {
        let deg = plane.lines_through(a).len();
        if deg != q + 1 {
            return CheckResult::new(name, CheckKind::Exact, false)
                .with_error("1")
                .with_witness(json!({"point": a, "lines": deg}))
                .with_detail("N Nᵀ diagonal must be q+1");
        }
    }
    for l in 0..plane.line_count() {
        let deg = plane.points_on(l).len();
        if deg != q + 1 {
            return CheckResult::new(name, CheckKind::Exact, false)
                .with_error("1")
                .with_witness(json!({"line": l, "points": deg}))
                .with_detail("every line carries q+1 points");
        }
    }
    if np != n || plane.line_count() != n {
        return CheckResult::new(name, CheckKind::Exact, false)
            .with_error("1")
            .with_witness(json!({"points": np, "lines": plane.line_count(), "expected": n}));
    }
    CheckResult::new(name, CheckKind::Exact, true)
        .with_error("0")
        .with_detail(format!("q={}: {n} points, {n} lines, N Nᵀ = {}I + J", plane.q, plane.q))
}

/// Residue identities over every flag `(p₀, l₀)` and point `p₁ ≁ l₀`, with
/// `l₁` the line through `p₀` and `p₁`:
/// (a) every line `l ≁ p₀` has `q` points off `l₀`, exactly one of them on `l₁`;
/// (b) `Σ_{l∼p₁, l≁p₀} Σ_{p′∼l, p′≁l₀} 1_{p′} = q·1_{p₁} + Σ_{p′≁l₀, p′≁l₁} 1_{p′}
///      = q·1_{p₁} + Σ_{p′≁l₀} 1_{p′} − Σ_{p′∼l₁, p′≁l₀} 1_{p′}`;
/// (c) in `Σ_{p′≁l₀, p′≁l₁} Σ_{l∼p′, l≁p₀} 1_l` each line `l ≁ p₀` appears `q − 1` times
///     and no line through `p₀` appears.
pub fn check_residue_identities(plane: &ProjectivePlane) -> CheckResult {
    let name = "residue";
    let q = plane.q as usize;
    let np = plane.point_count();
    let nl = plane.line_count();
    let inc = &plane.incidence;
    let pts_on: Vec<Vec<usize>> = (0..nl).map(|l| plane.points_on(l)).collect();
    let lines_thr: Vec<Vec<usize>> = (0..np).map(|x| plane.lines_through(x)).collect();
    let fail = |part: &str, witness: serde_json::Value| {
        CheckResult::new(name, CheckKind::Exact, false)
            .with_error("1")
            .with_witness(witness)
            .with_detail(format!("identity ({part}) fails; l1 is the line through p0 and p1"))
    };
    let mut configurations = 0usize;
    let mut flags = 0usize;
    for p0 in 0..np {
        for &l0 in &lines_thr[p0] {
            flags += 1;
            for p1 in (0..np).filter(|&x| !inc[x][l0]) {
                configurations += 1;
                let through: Vec<usize> = lines_thr[p0].iter().copied().filter(|&l| inc[p1][l]).collect();
                if through.len() != 1 {
                    return fail("l1", json!({"p0": p0, "l0": l0, "p1": p1, "lines_through_p0_p1": through}));
                }
                let l1 = through[0];
                let w = json!({"p0": p0, "l0": l0, "p1": p1, "l1": l1});

                for l in (0..nl).filter(|&l| !inc[p0][l]) {
                    let off: Vec<usize> = pts_on[l].iter().copied().filter(|&x| !inc[x][l0]).collect();
                    let on_l1 = off.iter().filter(|&&x| inc[x][l1]).count();
                    if off.len() != q || on_l1 != 1 {
                        let mut w = w.clone();
                        w["l"] = json!(l);
                        w["points_off_l0"] = json!(off.len());
                        w["on_l1"] = json!(on_l1);
                        return fail("a", w);
                    }
                }

                for x in 0..np {
                    let off_l0 = usize::from(!inc[x][l0]);
                    let at_p1 = q * usize::from(x == p1);
                    let paths = off_l0 * lines_thr[p1].iter().filter(|&&l| !inc[p0][l] && inc[x][l]).count();
                    let second = at_p1 + off_l0 * usize::from(!inc[x][l1]);
                    let third = at_p1 + off_l0 - usize::from(inc[x][l1]) * off_l0;
                    if paths != second || second != third {
                        let mut w = w.clone();
                        w["point"] = json!(x);
                        w["values"] = json!([paths, second, third]);
                        return fail("b", w);
                    }
                }

                let mut count = vec![0usize; nl];
                for x in (0..np).filter(|&x| !inc[x][l0] && !inc[x][l1]) {
                    for &l in lines_thr[x].iter().filter(|&&l| !inc[p0][l]) {
                        count[l] += 1;
                    }
                }
                for (l, &c) in count.iter().enumerate() {
                    let expected = if inc[p0][l] { 0 } else { q - 1 };
                    if c != expected {
                        let mut w = w.clone();
                        w["line"] = json!(l);
                        w["count"] = json!(c);
                        w["expected"] = json!(expected);
                        return fail("c", w);
                    }
                }
            }
        }
    }
    CheckResult::new(name, CheckKind::Exact, true).with_error("0").with_detail(format!(
        "q={}: {flags} flags, {configurations} configurations; l1 is the line through p0 and p1; \
         each line off p0 appears q-1 = {} times",
        plane.q,
        q - 1
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let p2 = build_plane(2).unwrap();
        assert_eq!((p2.point_count(), p2.line_count()), (7, 7));
        let p3 = build_plane(3).unwrap();
        assert_eq!(p3.point_count(), 13);
        assert!((0..13).all(|l| p3.points_on(l).len() == 4));
        let p5 = build_plane(5).unwrap();
        assert_eq!(p5.point_count(), 31);
        assert!((0..31).all(|x| p5.lines_through(x).len() == 6));
        assert!(matches!(build_plane(4), Err(Error::NotPrime(4))));
        assert!(matches!(build_plane(1), Err(Error::NotPrime(1))));
    }

    #[test]
    fn coordinates_are_normalized_and_distinct() {
        let p = build_plane(3).unwrap();
        for v in p.points() {
            let lead = v.iter().find(|&&c| c != 0).unwrap();
            assert_eq!(*lead, 1);
        }
        let mut sorted = p.points().to_vec();
        sorted.dedup();
        assert_eq!(sorted.len(), 13);
    }

    #[test]
    fn incidence_gram_matrix() {
        // N Nᵀ computed directly, independent of the check's short-circuit order.
        for q in [2u64, 3] {
            let p = build_plane(q).unwrap();
            let n = p.point_count();
            for a in 0..n {
                for b in 0..n {
                    let g = (0..n).filter(|&l| p.incident(a, l) && p.incident(b, l)).count();
                    assert_eq!(g as u64, if a == b { q + 1 } else { 1 });
                }
            }
        }
    }

    #[test]
    fn axioms_and_residues_hold() {
        for q in [2u64, 3, 5, 7] {
            let p = build_plane(q).unwrap();
            let a = check_plane_axioms(&p);
            assert!(a.passed(), "{a:?}");
            let r = check_residue_identities(&p);
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn residue_configuration_count() {
        // q=2: 21 flags, 4 points off each flag's line.
        let r = check_residue_identities(&build_plane(2).unwrap());
        assert!(r.detail.unwrap().contains("21 flags, 84 configurations"));
    }

    #[test]
    fn flipped_incidence_fails_with_pair() {
        let mut p = build_plane(2).unwrap();
        let l = p.lines_through(0)[0];
        p.flip_incidence(0, l);
        let r = check_plane_axioms(&p);
        assert!(!r.passed());
        let w = r.witness.unwrap();
        let pair = w["points"].as_array().unwrap();
        assert_eq!(pair.len(), 2);
        assert_eq!(w["common_lines"], 0);

        let mut p = build_plane(3).unwrap();
        let off = (0..13).find(|&l| !p.incident(0, l)).unwrap();
        p.flip_incidence(0, off);
        let r = check_plane_axioms(&p);
        assert_eq!(r.witness.unwrap()["common_lines"], 2);
        assert!(!check_residue_identities(&p).passed());
    }

    #[test]
    fn affine_residue_sizes() {
        let p = build_plane(3).unwrap();
        let l0 = p.lines_through(0)[0];
        let (pts, lns) = p.affine_residue(0, l0);
        assert_eq!((pts.len(), lns.len()), (9, 9));
        for &x in &pts {
            assert_eq!(lns.iter().filter(|&&l| p.incident(x, l)).count(), 3);
        }
    }

    #[test]
    fn csv_lists_incidences() {
        let p = build_plane(2).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 21);
        assert!(text.starts_with("point_id,line_id\n"));
    }
}
