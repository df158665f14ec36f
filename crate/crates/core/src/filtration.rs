//! σ-fields on the atom space as partitions into right-translation orbits.
//!
//! Every σ-field used here is the family of left cosets `gS` of a box
//! subgroup `S = p^a O × p^b O × p^c O` (digit exponents, `c ≤ a + b`):
//!
//! | spec        | `(a, b, c)`                                  |
//! |-------------|----------------------------------------------|
//! | `Level(λ)`  | `(i − i0, j − j0, i + j − i0 − j0)`           |
//! | `Row(i)`    | `(i − i0, ∞, ∞)`, orbits of `(x, 0, 0)`       |
//! | `Col(j)`    | `(∞, j − j0, ∞)`, orbits of `(0, y, 0)`       |
//! | `Join(..)`  | componentwise max over the members           |
//!
//! `∞` is clamped to the digit modulus exponent, which is the same
//! subgroup once reduced modulo `K`.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::coweights::Coweight;
use crate::error::{Error, Result};
use crate::exact::ExactVec;
use crate::heisenberg::{AtomSpace, ModelConfig};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PartitionSpec {
    Level(Coweight),
    Row(i64),
    Col(i64),
    Join(Vec<PartitionSpec>),
}

impl fmt::Display for PartitionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionSpec::Level(l) => write!(f, "Level({l})"),
            PartitionSpec::Row(i) => write!(f, "Row({i})"),
            PartitionSpec::Col(j) => write!(f, "Col({j})"),
            PartitionSpec::Join(ms) => {
                write!(f, "Join(")?;
                for (k, m) in ms.iter().enumerate() {
                    if k > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for PartitionSpec {
    type Err = Error;

    /// The `Display` form: `Level(i,j)`, `Row(i)`, `Col(j)`, `Join(Level(i,j);Level(k,l))`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Parse(format!("bad partition spec `{s}`"));
        let (head, rest) = t.split_once('(').ok_or_else(bad)?;
        let body = rest.strip_suffix(')').ok_or_else(bad)?;
        let int = |x: &str| x.trim().parse::<i64>().map_err(|_| bad());
        match head.trim().to_ascii_lowercase().as_str() {
            "level" => Ok(PartitionSpec::Level(body.parse()?)),
            "row" => Ok(PartitionSpec::Row(int(body)?)),
            "col" => Ok(PartitionSpec::Col(int(body)?)),
            "join" => body.split(';').map(str::parse).collect::<Result<Vec<_>>>().map(PartitionSpec::Join),
            _ => Err(bad()),
        }
    }
}

/// Digit exponents of the box subgroup whose cosets are the cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoxSubgroup {
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl PartitionSpec {
    pub fn level(i: i64, j: i64) -> Self {
        PartitionSpec::Level(Coweight::new(i, j))
    }

    pub fn join_levels(levels: &[Coweight]) -> Self {
        PartitionSpec::Join(levels.iter().map(|&l| PartitionSpec::Level(l)).collect())
    }

    pub fn validate(&self, config: &ModelConfig) -> Result<()> {
        let out = |what: String| Err(Error::OutOfRange(what));
        match self {
            PartitionSpec::Level(l) => {
                if !config.representable(*l) {
                    return out(format!("level {l} is not representable in the window"));
                }
            }
            PartitionSpec::Row(i) => {
                if *i < config.i0 || *i > config.a {
                    return out(format!("Row({i}) outside {}..={}", config.i0, config.a));
                }
            }
            PartitionSpec::Col(j) => {
                if *j < config.j0 || *j > config.b {
                    return out(format!("Col({j}) outside {}..={}", config.j0, config.b));
                }
            }
            PartitionSpec::Join(ms) => {
                if ms.is_empty() {
                    return out("empty join".into());
                }
                for m in ms {
                    if !matches!(m, PartitionSpec::Level(_)) {
                        return out(format!("join member {m} is not a level"));
                    }
                    m.validate(config)?;
                }
            }
        }
        Ok(())
    }

    /// The subgroup `S` with `cells = { gS }`; assumes a validated spec.
    pub fn subgroup(&self, config: &ModelConfig) -> BoxSubgroup {
        let (ea, eb, ec) = config.digit_exponents();
        match self {
            PartitionSpec::Level(l) => BoxSubgroup {
                a: (l.i - config.i0) as u32,
                b: (l.j - config.j0) as u32,
                c: (l.level() - config.i0 - config.j0) as u32,
            },
            PartitionSpec::Row(i) => BoxSubgroup { a: (i - config.i0) as u32, b: eb, c: ec },
            PartitionSpec::Col(j) => BoxSubgroup { a: ea, b: (j - config.j0) as u32, c: ec },
            PartitionSpec::Join(ms) => ms
                .iter()
                .map(|m| m.subgroup(config))
                .reduce(|x, y| BoxSubgroup { a: x.a.max(y.a), b: x.b.max(y.b), c: x.c.max(y.c) })
                .expect("validated join is nonempty"),
        }
    }
}

/// A partition of the atoms; cell ids are assigned in order of first appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    cell_of: Vec<u32>,
    cell_sizes: Vec<u32>,
    uniform: Option<u32>,
}

impl Partition {
    /// Build from an arbitrary labelling; labels are renumbered by first appearance.
    pub fn from_labels<T: Copy + Eq + std::hash::Hash>(labels: &[T]) -> Self {
        let mut ids: HashMap<T, u32> = HashMap::new();
        let mut cell_of = Vec::with_capacity(labels.len());
        let mut cell_sizes = Vec::new();
        for &l in labels {
            let next = ids.len() as u32;
            let c = *ids.entry(l).or_insert(next);
            if c as usize == cell_sizes.len() {
                cell_sizes.push(0);
            }
            cell_sizes[c as usize] += 1;
            cell_of.push(c);
        }
        Partition::from_parts(cell_of, cell_sizes)
    }

    fn from_parts(cell_of: Vec<u32>, cell_sizes: Vec<u32>) -> Self {
        let uniform = match cell_sizes.first() {
            Some(&s) if cell_sizes.iter().all(|&t| t == s) => Some(s),
            _ => None,
        };
        Partition { cell_of, cell_sizes, uniform }
    }

    pub fn atom_count(&self) -> usize {
        self.cell_of.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cell_sizes.len()
    }

    pub fn cell_of(&self) -> &[u32] {
        &self.cell_of
    }

    pub fn cell(&self, atom: usize) -> usize {
        self.cell_of[atom] as usize
    }

    pub fn cell_sizes(&self) -> &[u32] {
        &self.cell_sizes
    }

    pub fn uniform_size(&self) -> Option<u32> {
        self.uniform
    }

    /// Atoms grouped by cell, each list ascending.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.cell_sizes.iter().map(|&s| Vec::with_capacity(s as usize)).collect();
        for (a, &c) in self.cell_of.iter().enumerate() {
            out[c as usize].push(a);
        }
        out
    }

    /// Every cell of `self` lies inside a single cell of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        let mut owner = vec![u32::MAX; self.cell_count()];
        for (a, &c) in self.cell_of.iter().enumerate() {
            let o = &mut owner[c as usize];
            if *o == u32::MAX {
                *o = coarser.cell_of[a];
            } else if *o != coarser.cell_of[a] {
                return false;
            }
        }
        true
    }

    /// Common refinement.
    pub fn meet(&self, other: &Partition) -> Partition {
        let labels: Vec<(u32, u32)> = self.cell_of.iter().zip(&other.cell_of).map(|(&a, &b)| (a, b)).collect();
        Partition::from_labels(&labels)
    }

    pub fn is_measurable(&self, f: &ExactVec) -> bool {
        let mut first: Vec<Option<usize>> = vec![None; self.cell_count()];
        for (a, &c) in self.cell_of.iter().enumerate() {
            match first[c as usize] {
                None => first[c as usize] = Some(a),
                Some(b) => {
                    if f.compare(a, f, b) != std::cmp::Ordering::Equal {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["atom_index", "cell_id"])?;
        for (a, c) in self.cell_of.iter().enumerate() {
            w.write_record([a.to_string(), c.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Cells of `spec` as cosets `gS`; labels each atom by a canonical coset representative.
pub fn partition(space: &AtomSpace, spec: &PartitionSpec) -> Result<Partition> {
    spec.validate(space.config())?;
    Ok(coset_partition(space, spec.subgroup(space.config())))
}

pub fn coset_partition(space: &AtomSpace, s: BoxSubgroup) -> Partition {
    let p = space.p();
    let (_, mv, mw) = space.moduli();
    let (pa, pb, pc) = (p.pow(s.a), p.pow(s.b), p.pow(s.c));
    let n = space.atom_count();
    let cells = (pa * pb * pc) as usize;
    let mut id = vec![u32::MAX; cells];
    let mut cell_of = Vec::with_capacity(n);
    let mut next = 0u32;
    for atom in 0..n {
        let g = space.element(atom);
        // right-multiply by (u0 − u, v0 − v, 0) to reach u0 = u mod p^a, v0 = v mod p^b
        let v0 = g.v % pb;
        let shift = (v0 + mv - g.v) % mv;
        let w = (g.w + (g.u % mw) * (shift % mw)) % mw;
        let label = (((g.u % pa) * pb + v0) * pc + w % pc) as usize;
        if id[label] == u32::MAX {
            id[label] = next;
            next += 1;
        }
        cell_of.push(id[label]);
    }
    let size = (n / next as usize) as u32;
    Partition::from_parts(cell_of, vec![size; next as usize])
}

/// Conditional expectation: the plain average over each cell.
pub fn cond_expect(f: &ExactVec, part: &Partition) -> ExactVec {
    f.average(part)
}

/// An atom space together with a cache of the partitions built on it.
pub struct Filtration {
    space: Arc<AtomSpace>,
    cache: Mutex<HashMap<BoxSubgroup, Arc<Partition>>>,
}

impl fmt::Debug for Filtration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Filtration").field("config", self.space.config()).finish()
    }
}

impl Filtration {
    pub fn new(space: AtomSpace) -> Self {
        Filtration { space: Arc::new(space), cache: Mutex::new(HashMap::new()) }
    }

    pub fn from_config(config: ModelConfig) -> Result<Self> {
        Ok(Filtration::new(crate::heisenberg::build_atom_space(config)?))
    }

    pub fn space(&self) -> &AtomSpace {
        &self.space
    }

    pub fn config(&self) -> &ModelConfig {
        self.space.config()
    }

    pub fn q(&self) -> BigRational {
        BigRational::from_integer(self.space.p().into())
    }

    pub fn partition(&self, spec: &PartitionSpec) -> Result<Arc<Partition>> {
        spec.validate(self.config())?;
        let key = spec.subgroup(self.config());
        if let Some(p) = self.cache.lock().unwrap().get(&key) {
            return Ok(p.clone());
        }
        let built = Arc::new(coset_partition(&self.space, key));
        Ok(self.cache.lock().unwrap().entry(key).or_insert(built).clone())
    }

    pub fn level(&self, l: Coweight) -> Result<Arc<Partition>> {
        self.partition(&PartitionSpec::Level(l))
    }

    pub fn cond_expect(&self, f: &ExactVec, spec: &PartitionSpec) -> Result<ExactVec> {
        if f.len() != self.space.atom_count() {
            return Err(Error::DimensionMismatch { expected: self.space.atom_count(), found: f.len() });
        }
        let part = self.partition(spec)?;
        Ok(f.average(&part))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::{build_atom_space, GroupElement};
    use std::collections::VecDeque;

    fn space(p: u64, i0: i64, j0: i64, i: i64, j: i64) -> AtomSpace {
        build_atom_space(ModelConfig::new(p, i0, j0, i, j)).unwrap()
    }

    #[test]
    fn spec_round_trips_through_text() {
        for spec in [
            PartitionSpec::level(2, -1),
            PartitionSpec::Row(3),
            PartitionSpec::Col(0),
            PartitionSpec::join_levels(&[Coweight::new(1, 0), Coweight::new(0, 1)]),
        ] {
            assert_eq!(spec.to_string().parse::<PartitionSpec>().unwrap(), spec);
        }
        assert_eq!("level(1, 1)".parse::<PartitionSpec>().unwrap(), PartitionSpec::level(1, 1));
        for bad in ["Level(1)", "Row", "Cell(1)", "Row(x)", "Join()"] {
            assert!(bad.parse::<PartitionSpec>().is_err(), "{bad}");
        }
    }

    /// Independent oracle: breadth-first orbits under right multiplication by generators.
    fn orbit_partition(space: &AtomSpace, gens: &[GroupElement]) -> Partition {
        let n = space.atom_count();
        let mut label = vec![usize::MAX; n];
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = s;
            let mut queue = VecDeque::from([s]);
            while let Some(a) = queue.pop_front() {
                for &h in gens {
                    let b = space.index(space.mul(space.element(a), h));
                    if label[b] == usize::MAX {
                        label[b] = s;
                        queue.push_back(b);
                    }
                }
            }
        }
        Partition::from_labels(&label)
    }

    fn generators(space: &AtomSpace, s: BoxSubgroup) -> Vec<GroupElement> {
        let p = space.p();
        let (mu, mv, mw) = space.moduli();
        vec![
            GroupElement::new(p.pow(s.a) % mu, 0, 0),
            GroupElement::new(0, p.pow(s.b) % mv, 0),
            GroupElement::new(0, 0, p.pow(s.c) % mw),
        ]
    }

    #[test]
    fn cosets_match_orbit_oracle() {
        for (p, i0, j0, i, j) in [(2, 0, 0, 2, 2), (3, 0, 0, 1, 1), (2, 1, 0, 2, 2), (2, 0, 1, 1, 2)] {
            let s = space(p, i0, j0, i, j);
            let c = *s.config();
            let mut specs: Vec<PartitionSpec> = c.representable_levels().into_iter().map(PartitionSpec::Level).collect();
            specs.extend((c.i0..=c.a).map(PartitionSpec::Row));
            specs.extend((c.j0..=c.b).map(PartitionSpec::Col));
            specs.push(PartitionSpec::join_levels(&[Coweight::new(i0 + 1, j0), Coweight::new(i0, j0 + 1)]));
            for spec in specs {
                let fast = partition(&s, &spec).unwrap();
                let slow = orbit_partition(&s, &generators(&s, spec.subgroup(&c)));
                assert_eq!(fast, slow, "{spec} at p={p}");
            }
        }
    }

    #[test]
    fn example_cell_counts() {
        let s = space(2, 0, 0, 2, 2);
        let lvl = partition(&s, &PartitionSpec::level(1, 1)).unwrap();
        assert_eq!((lvl.cell_count(), lvl.uniform_size()), (16, Some(256)));
        let join = partition(&s, &PartitionSpec::join_levels(&[Coweight::new(1, 0), Coweight::new(0, 1)])).unwrap();
        assert_eq!(join.cell_count(), 8);
        assert!(lvl.refines(&join) && !join.refines(&lvl));
        let row = partition(&s, &PartitionSpec::Row(0)).unwrap();
        assert_eq!(row.uniform_size(), Some(16));
        let top = partition(&s, &PartitionSpec::level(0, 0)).unwrap();
        assert_eq!(top.cell_count(), 1);
    }

    #[test]
    fn join_is_meet_of_members() {
        let s = space(2, 0, 0, 2, 2);
        let a = partition(&s, &PartitionSpec::level(2, 0)).unwrap();
        let b = partition(&s, &PartitionSpec::level(1, 1)).unwrap();
        let j = partition(&s, &PartitionSpec::join_levels(&[Coweight::new(2, 0), Coweight::new(1, 1)])).unwrap();
        assert_eq!(a.meet(&b), j);
    }

    #[test]
    fn nesting_and_row_refinement() {
        let s = space(2, 0, 0, 2, 2);
        let c = *s.config();
        let levels = c.representable_levels();
        for &l in &levels {
            for &m in &levels {
                if l.leq(m) {
                    let pl = partition(&s, &PartitionSpec::Level(l)).unwrap();
                    let pm = partition(&s, &PartitionSpec::Level(m)).unwrap();
                    assert!(pm.refines(&pl), "{l} {m}");
                }
            }
        }
        for i in c.i0..c.a {
            let fine = partition(&s, &PartitionSpec::Row(i + 1)).unwrap();
            let coarse = partition(&s, &PartitionSpec::Row(i)).unwrap();
            assert!(fine.refines(&coarse));
        }
        assert_eq!(partition(&s, &PartitionSpec::Row(c.a)).unwrap().cell_count(), s.atom_count());
    }

    #[test]
    fn cell_measure_matches_atom_count() {
        let s = space(2, 0, 0, 2, 2);
        let c = *s.config();
        for l in c.grid() {
            let part = partition(&s, &PartitionSpec::Level(l)).unwrap();
            let size = part.uniform_size().unwrap();
            assert_eq!(
                s.atom_measure() * num_bigint::BigInt::from(size),
                crate::heisenberg::cell_measure(&c, l)
            );
        }
    }

    /// Right translation by a subgroup element never depends on which
    /// representative of an atom we start from.
    #[test]
    fn right_translation_well_defined() {
        let s = space(2, 0, 1, 2, 2);
        let c = *s.config();
        let (mu, mv, mw) = s.moduli();
        for l in c.grid() {
            for h in generators(&s, PartitionSpec::Level(l).subgroup(&c)) {
                for a in 0..s.atom_count() {
                    let g = s.element(a);
                    let direct = s.index(s.mul(g, h));
                    for t in [(1i128, 0i128, 0i128), (0, 1, 0), (0, 0, 1), (3, -2, 5)] {
                        let u = g.u as i128 + t.0 * mu as i128;
                        let v = g.v as i128 + t.1 * mv as i128;
                        let w = g.w as i128 + t.2 * mw as i128;
                        let moved = s.reduce(u + h.u as i128, v + h.v as i128, w + h.w as i128 + u * h.v as i128);
                        assert_eq!(s.index(moved), direct);
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_out_of_range_specs() {
        let s = space(2, 0, 0, 1, 1);
        assert!(partition(&s, &PartitionSpec::level(3, 0)).is_err());
        assert!(partition(&s, &PartitionSpec::Row(-1)).is_err());
        assert!(partition(&s, &PartitionSpec::Col(3)).is_err());
        assert!(partition(&s, &PartitionSpec::Join(vec![])).is_err());
        assert!(partition(&s, &PartitionSpec::Join(vec![PartitionSpec::Row(0)])).is_err());
    }

    #[test]
    fn expectation_basics() {
        let s = space(2, 0, 0, 1, 1);
        let n = s.atom_count();
        let part = partition(&s, &PartitionSpec::level(1, 0)).unwrap();
        let c = ExactVec::from_i64s(&vec![5; n]);
        assert_eq!(cond_expect(&c, &part), c);
        let e = cond_expect(&ExactVec::indicator(n, 3), &part);
        let size = part.uniform_size().unwrap() as i64;
        for a in 0..n {
            let expect = if part.cell(a) == part.cell(3) { crate::exact::rational(1, size) } else { crate::exact::rational(0, 1) };
            assert_eq!(e.get(a), expect);
        }
    }

    #[test]
    fn csv_export() {
        let s = space(2, 0, 0, 0, 0);
        let part = partition(&s, &PartitionSpec::level(0, 0)).unwrap();
        let mut buf = Vec::new();
        part.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "atom_index,cell_id\n0,0\n");
    }
}
