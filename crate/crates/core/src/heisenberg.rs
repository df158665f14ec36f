//! The truncated Heisenberg group box that stands in for the boundary `Ω₀`.
//!
//! Elements of `H_{i0,j0} = p^{i0}O × p^{j0}O × p^{i0+j0}O` are written in
//! digit coordinates `(u, v, w)` with `x = p^{i0}u`, `y = p^{j0}v`,
//! `z = p^{i0+j0}w`. The law `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+xy')`
//! has the same shape in digits, and reducing `u, v, w` modulo
//! `p^{A−i0}, p^{B−j0}, p^{C−i0−j0}` is exactly passing to the quotient by
//! `K = p^A O × p^B O × p^C O`. `K` is normal in the box once
//! `A + j0 ≥ C` and `B + i0 ≥ C`, so atoms (cosets of `K`) form a finite
//! group of their own and [`AtomSpace::mul_atoms`] is well defined.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};

use crate::coweights::Coweight;
use crate::error::{Error, Result};
use crate::exact::fmt_rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelConfig {
    pub p: u64,
    pub i0: i64,
    pub j0: i64,
    #[serde(rename = "I")]
    pub i_max: i64,
    #[serde(rename = "J")]
    pub j_max: i64,
    #[serde(rename = "A")]
    pub a: i64,
    #[serde(rename = "B")]
    pub b: i64,
    #[serde(rename = "C")]
    pub c: i64,
}

impl ModelConfig {
    /// Grid window with the default base exponents `C = I + J`,
    /// `A = C − j0`, `B = C − i0`.
    pub fn new(p: u64, i0: i64, j0: i64, i_max: i64, j_max: i64) -> Self {
        let c = i_max + j_max;
        ModelConfig { p, i0, j0, i_max, j_max, a: c - j0, b: c - i0, c }
    }

    pub fn with_exponents(mut self, a: Option<i64>, b: Option<i64>, c: Option<i64>) -> Self {
        if let Some(c) = c {
            self.c = c;
            self.a = c - self.j0;
            self.b = c - self.i0;
        }
        if let Some(a) = a {
            self.a = a;
        }
        if let Some(b) = b {
            self.b = b;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::NotPrime(self.p));
        }
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.i0 > self.i_max || self.j0 > self.j_max {
            return bad(format!(
                "empty grid: i0={} I={} j0={} J={}",
                self.i0, self.i_max, self.j0, self.j_max
            ));
        }
        if self.a < self.i_max || self.b < self.j_max || self.c < self.i_max + self.j_max {
            return bad(format!(
                "base exponents A={} B={} C={} do not refine the grid level ({},{})",
                self.a, self.b, self.c, self.i_max, self.j_max
            ));
        }
        if self.c > self.a + self.b {
            return bad(format!("C={} exceeds A+B={}", self.c, self.a + self.b));
        }
        if self.a + self.j0 < self.c || self.b + self.i0 < self.c {
            return bad(format!(
                "closure fails: need A+j0 >= C and B+i0 >= C (A={} B={} C={} i0={} j0={})",
                self.a, self.b, self.c, self.i0, self.j0
            ));
        }
        Ok(())
    }

    /// Digit exponents `(A − i0, B − j0, C − i0 − j0)`.
    pub fn digit_exponents(&self) -> (u32, u32, u32) {
        (
            (self.a - self.i0) as u32,
            (self.b - self.j0) as u32,
            (self.c - self.i0 - self.j0) as u32,
        )
    }

    pub fn total_exponent(&self) -> u32 {
        let (ea, eb, ec) = self.digit_exponents();
        ea + eb + ec
    }

    /// `p^{(A−i0)+(B−j0)+(C−i0−j0)}` as a big integer, without building anything.
    pub fn atom_count_big(&self) -> BigInt {
        BigInt::from(self.p).pow(self.total_exponent())
    }

    pub fn base_level(&self) -> Coweight {
        Coweight::new(self.i0, self.j0)
    }

    pub fn top_level(&self) -> Coweight {
        Coweight::new(self.i_max, self.j_max)
    }

    /// Grid coweights `i0..=I × j0..=J` in lexicographic order.
    pub fn grid(&self) -> Vec<Coweight> {
        let mut out = Vec::new();
        for i in self.i0..=self.i_max {
            for j in self.j0..=self.j_max {
                out.push(Coweight::new(i, j));
            }
        }
        out
    }

    /// Grid points with both lower neighbours in the grid.
    pub fn interior(&self) -> Vec<Coweight> {
        self.grid()
            .into_iter()
            .filter(|l| l.i > self.i0 && l.j > self.j0)
            .collect()
    }

    /// A level is representable when its σ-field is a union of atoms and
    /// contained in the box: `i0 ≤ i ≤ A`, `j0 ≤ j ≤ B`, `i + j ≤ C`.
    pub fn representable(&self, l: Coweight) -> bool {
        l.i >= self.i0 && l.j >= self.j0 && l.i <= self.a && l.j <= self.b && l.level() <= self.c
    }

    /// Every representable level, lexicographic.
    pub fn representable_levels(&self) -> Vec<Coweight> {
        let mut out = Vec::new();
        for i in self.i0..=self.a {
            for j in self.j0..=self.b {
                let l = Coweight::new(i, j);
                if self.representable(l) {
                    out.push(l);
                }
            }
        }
        out
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A canonical element of the box in digit coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub u: u64,
    pub v: u64,
    pub w: u64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { u: 0, v: 0, w: 0 };

    pub fn new(u: u64, v: u64, w: u64) -> Self {
        GroupElement { u, v, w }
    }

    /// Scaled coordinates `(p^{i0}u, p^{j0}v, p^{i0+j0}w)`.
    pub fn coordinates(&self, config: &ModelConfig) -> (BigInt, BigInt, BigInt) {
        let p = BigInt::from(config.p);
        let sx = p.clone().pow(config.i0 as u32);
        let sy = p.clone().pow(config.j0 as u32);
        let sz = p.pow((config.i0 + config.j0) as u32);
        (sx * self.u, sy * self.v, sz * self.w)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Moduli {
    u: u64,
    v: u64,
    w: u64,
}

impl Moduli {
    fn of(config: &ModelConfig) -> Self {
        let (ea, eb, ec) = config.digit_exponents();
        Moduli { u: config.p.pow(ea), v: config.p.pow(eb), w: config.p.pow(ec) }
    }

    fn reduce(&self, u: i128, v: i128, w: i128) -> GroupElement {
        GroupElement {
            u: u.rem_euclid(self.u as i128) as u64,
            v: v.rem_euclid(self.v as i128) as u64,
            w: w.rem_euclid(self.w as i128) as u64,
        }
    }
}

/// Product on canonical representatives, reduced back to canonical residues.
pub fn group_mul(g: GroupElement, h: GroupElement, config: &ModelConfig) -> GroupElement {
    let m = Moduli::of(config);
    let (gu, gv, gw) = (g.u as i128, g.v as i128, g.w as i128);
    let (hu, hv, hw) = (h.u as i128, h.v as i128, h.w as i128);
    m.reduce(gu + hu, gv + hv, gw + hw + gu * hv)
}

pub fn group_inv(g: GroupElement, config: &ModelConfig) -> GroupElement {
    let m = Moduli::of(config);
    let (u, v, w) = (g.u as i128, g.v as i128, g.w as i128);
    m.reduce(-u, -v, -w + u * v)
}

/// `π(E_x) = p^{−2(i+j)}` for an atom of `F_λ`.
pub fn cell_measure(config: &ModelConfig, l: Coweight) -> BigRational {
    let q = BigRational::from_integer(BigInt::from(config.p));
    let e = 2 * l.level();
    if e >= 0 {
        q.pow(e as i32).recip()
    } else {
        q.pow((-e) as i32)
    }
}

/// The finite atom space: the box modulo `K`.
#[derive(Clone, Debug)]
pub struct AtomSpace {
    config: ModelConfig,
    moduli: Moduli,
    atom_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceMetadata {
    pub p: u64,
    pub i0: i64,
    pub j0: i64,
    #[serde(rename = "I")]
    pub i_max: i64,
    #[serde(rename = "J")]
    pub j_max: i64,
    #[serde(rename = "A")]
    pub a: i64,
    #[serde(rename = "B")]
    pub b: i64,
    #[serde(rename = "C")]
    pub c: i64,
    pub atom_count: usize,
    pub pi_box: String,
}

/// Largest atom count we are willing to index with `u32` cell ids.
pub const MAX_ATOMS: u64 = 1 << 31;

pub fn build_atom_space(config: ModelConfig) -> Result<AtomSpace> {
    config.validate()?;
    let n = config.atom_count_big();
    if n > BigInt::from(MAX_ATOMS) {
        return Err(Error::Budget(format!("{n} atoms cannot be indexed")));
    }
    let moduli = Moduli::of(&config);
    Ok(AtomSpace {
        config,
        moduli,
        atom_count: (moduli.u * moduli.v * moduli.w) as usize,
    })
}

impl AtomSpace {
    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn p(&self) -> u64 {
        self.config.p
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    /// Digit moduli `(p^{A−i0}, p^{B−j0}, p^{C−i0−j0})`.
    pub fn moduli(&self) -> (u64, u64, u64) {
        (self.moduli.u, self.moduli.v, self.moduli.w)
    }

    pub fn index(&self, g: GroupElement) -> usize {
        debug_assert!(g.u < self.moduli.u && g.v < self.moduli.v && g.w < self.moduli.w);
        ((g.u * self.moduli.v + g.v) * self.moduli.w + g.w) as usize
    }

    pub fn element(&self, atom: usize) -> GroupElement {
        let a = atom as u64;
        let w = a % self.moduli.w;
        let rest = a / self.moduli.w;
        GroupElement { u: rest / self.moduli.v, v: rest % self.moduli.v, w }
    }

    /// Canonical reduction of arbitrary integer digits.
    pub fn reduce(&self, u: i128, v: i128, w: i128) -> GroupElement {
        self.moduli.reduce(u, v, w)
    }

    pub fn mul(&self, g: GroupElement, h: GroupElement) -> GroupElement {
        group_mul(g, h, &self.config)
    }

    /// Atom of `a·b`; independent of representatives because `K` is normal in the box.
    pub fn mul_atoms(&self, a: usize, b: usize) -> usize {
        self.index(self.mul(self.element(a), self.element(b)))
    }

    pub fn inv_atom(&self, a: usize) -> usize {
        self.index(group_inv(self.element(a), &self.config))
    }

    pub fn atom_measure(&self) -> BigRational {
        self.pi_box() / BigInt::from(self.atom_count)
    }

    /// `π(box) = p^{−2(i0+j0)}`.
    pub fn pi_box(&self) -> BigRational {
        cell_measure(&self.config, self.config.base_level())
    }

    pub fn metadata(&self) -> SpaceMetadata {
        let c = &self.config;
        SpaceMetadata {
            p: c.p,
            i0: c.i0,
            j0: c.j0,
            i_max: c.i_max,
            j_max: c.j_max,
            a: c.a,
            b: c.b,
            c: c.c,
            atom_count: self.atom_count,
            pi_box: fmt_rational(&self.pi_box()),
        }
    }

    pub fn is_unit_box(&self) -> bool {
        self.pi_box().is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space(p: u64, i0: i64, j0: i64, i: i64, j: i64) -> AtomSpace {
        build_atom_space(ModelConfig::new(p, i0, j0, i, j)).unwrap()
    }

    #[test]
    fn atom_counts() {
        assert_eq!(space(2, 0, 0, 2, 2).atom_count(), 4096);
        assert_eq!(space(3, 0, 0, 1, 1).atom_count(), 729);
        assert_eq!(space(2, 0, 0, 0, 0).atom_count(), 1);
        assert_eq!(space(2, 1, 0, 2, 1).atom_count(), 1 << 6);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(build_atom_space(ModelConfig::new(4, 0, 0, 1, 1)), Err(Error::NotPrime(4))));
        assert!(build_atom_space(ModelConfig::new(2, 2, 0, 1, 1)).is_err());
        let c = ModelConfig::new(2, 0, 0, 1, 1).with_exponents(Some(1), Some(3), Some(2));
        assert!(matches!(build_atom_space(c), Err(Error::InvalidConfig(_))));
        let c = ModelConfig::new(2, 0, 0, 1, 1).with_exponents(Some(1), Some(1), Some(3));
        assert!(build_atom_space(c).is_err());
    }

    #[test]
    fn multiplication_examples() {
        let c = ModelConfig::new(5, 0, 0, 1, 1);
        let g = GroupElement::new(1, 0, 0);
        let h = GroupElement::new(0, 1, 0);
        assert_eq!(group_mul(g, h, &c), GroupElement::new(1, 1, 1));
        assert_eq!(group_mul(GroupElement::IDENTITY, g, &c), g);
        let g = GroupElement::new(1, 1, 1);
        let m = 25;
        let minus = GroupElement::new(m - 1, m - 1, 0);
        assert_eq!(group_mul(g, minus, &c), GroupElement::IDENTITY);
        assert_eq!(group_inv(g, &c), GroupElement::new(m - 1, m - 1, 0));
    }

    #[test]
    fn cell_measures() {
        let c = ModelConfig::new(2, 0, 0, 2, 2);
        assert_eq!(cell_measure(&c, Coweight::new(1, 1)), BigRational::new(1.into(), 16.into()));
        assert!(cell_measure(&ModelConfig::new(7, 0, 0, 1, 1), Coweight::new(0, 0)).is_one());
        let s = space(2, 1, 1, 2, 2);
        assert_eq!(s.pi_box(), BigRational::new(1.into(), 16.into()));
        assert_eq!(s.atom_measure() * BigInt::from(s.atom_count()), s.pi_box());
    }

    #[test]
    fn index_round_trip() {
        let s = space(3, 0, 0, 1, 1);
        for a in 0..s.atom_count() {
            assert_eq!(s.index(s.element(a)), a);
        }
        assert_eq!(s.element(0), GroupElement::IDENTITY);
        assert_eq!(s.element(1), GroupElement::new(0, 0, 1));
    }

    #[test]
    fn group_axioms_exhaustive_small() {
        let s = space(2, 0, 0, 1, 1);
        let n = s.atom_count();
        for a in 0..n {
            assert_eq!(s.mul_atoms(a, s.inv_atom(a)), 0);
            assert_eq!(s.mul_atoms(s.inv_atom(a), a), 0);
            for b in 0..n {
                let ab = s.mul_atoms(a, b);
                for c in (0..n).step_by(7) {
                    assert_eq!(s.mul_atoms(ab, c), s.mul_atoms(a, s.mul_atoms(b, c)));
                }
            }
        }
    }

    /// Multiplying on integer representatives that differ by elements of
    /// `K` must land in the same atom.
    #[test]
    fn atom_product_independent_of_representatives() {
        let s = space(2, 0, 1, 2, 2);
        let (mu, mv, mw) = s.moduli();
        let lift = |g: GroupElement, t: (i128, i128, i128)| {
            (g.u as i128 + t.0 * mu as i128, g.v as i128 + t.1 * mv as i128, g.w as i128 + t.2 * mw as i128)
        };
        for a in (0..s.atom_count()).step_by(5) {
            for b in (0..s.atom_count()).step_by(11) {
                let expect = s.mul_atoms(a, b);
                for t in [(1, 0, 0), (0, 1, 0), (2, 3, 1), (-1, 2, -3)] {
                    let (u, v, w) = lift(s.element(a), t);
                    let (x, y, z) = lift(s.element(b), (t.2, t.0, t.1));
                    let g = s.reduce(u + x, v + y, w + z + u * y);
                    assert_eq!(s.index(g), expect);
                }
            }
        }
    }

    #[test]
    fn metadata_json() {
        let s = space(2, 0, 0, 1, 1);
        let v = serde_json::to_value(s.metadata()).unwrap();
        assert_eq!(v["atom_count"], 64);
        assert_eq!(v["pi_box"], "1/1");
        assert_eq!(v["I"], 1);
    }

    proptest! {
        #[test]
        fn associativity_and_inverse(p in prop::sample::select(vec![2u64, 3, 5]), a: u64, b: u64, c: u64) {
            let s = space(p, 0, 0, 1, 1);
            let n = s.atom_count() as u64;
            let (a, b, c) = ((a % n) as usize, (b % n) as usize, (c % n) as usize);
            prop_assert_eq!(s.mul_atoms(s.mul_atoms(a, b), c), s.mul_atoms(a, s.mul_atoms(b, c)));
            prop_assert_eq!(s.mul_atoms(a, s.inv_atom(a)), 0);
        }
    }
}
