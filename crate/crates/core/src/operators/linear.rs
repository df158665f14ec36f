//! Linear operators on atom functions as expression trees.
//!
//! Nothing is ever materialized as a dense matrix. Expectations, their
//! sums and their products all commute with left translation on the atom
//! group, so such an operator is determined by its kernel `k = T δ_e` and
//! `T[x][y] = k(y⁻¹x)`. Exact operator identities among them reduce to one
//! exact kernel comparison.

use std::io::Write;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{fmt_rational, ExactVec};
use crate::filtration::Partition;
use crate::heisenberg::AtomSpace;

/// Vectors an operator tree can act on.
pub trait Operand: Clone {
    fn dim(&self) -> usize;
    fn zeros(n: usize) -> Self;
    fn average(&self, part: &Partition) -> Self;
    /// `self + c · other`
    fn add_scaled(&self, c: &BigRational, other: &Self) -> Self;
    fn mul_pointwise(&self, w: &ExactVec) -> Self;
    fn apply_sparse(&self, m: &SparseMatrix) -> Self;
}

impl Operand for ExactVec {
    fn dim(&self) -> usize {
        self.len()
    }
    fn zeros(n: usize) -> Self {
        ExactVec::zeros(n)
    }
    fn average(&self, part: &Partition) -> Self {
        ExactVec::average(self, part)
    }
    fn add_scaled(&self, c: &BigRational, other: &Self) -> Self {
        if c.is_one() {
            self.add(other)
        } else if *c == -BigRational::one() {
            self.sub(other)
        } else {
            self.add(&other.scale(c))
        }
    }
    fn mul_pointwise(&self, w: &ExactVec) -> Self {
        self.mul(w)
    }
    fn apply_sparse(&self, m: &SparseMatrix) -> Self {
        let mut acc = vec![BigRational::zero(); m.n];
        for (r, c, v) in &m.entries {
            acc[*r] += v * self.get(*c);
        }
        ExactVec::from_rationals(&acc)
    }
}

/// Double-precision vector used by the power iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatVec(pub Vec<f64>);

impl Operand for FloatVec {
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn zeros(n: usize) -> Self {
        FloatVec(vec![0.0; n])
    }
    fn average(&self, part: &Partition) -> Self {
        let mut sums = vec![0.0; part.cell_count()];
        for (x, &c) in self.0.iter().zip(part.cell_of()) {
            sums[c as usize] += x;
        }
        for (s, &n) in sums.iter_mut().zip(part.cell_sizes()) {
            *s /= n as f64;
        }
        FloatVec(part.cell_of().iter().map(|&c| sums[c as usize]).collect())
    }
    fn add_scaled(&self, c: &BigRational, other: &Self) -> Self {
        let c = c.to_f64().unwrap_or(f64::NAN);
        FloatVec(self.0.iter().zip(&other.0).map(|(a, b)| a + c * b).collect())
    }
    fn mul_pointwise(&self, w: &ExactVec) -> Self {
        FloatVec(self.0.iter().zip(w.to_f64()).map(|(a, b)| a * b).collect())
    }
    fn apply_sparse(&self, m: &SparseMatrix) -> Self {
        let mut out = vec![0.0; m.n];
        for (r, c, v) in &m.entries {
            out[*r] += v.to_f64().unwrap_or(f64::NAN) * self.0[*c];
        }
        FloatVec(out)
    }
}

impl FloatVec {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
    pub fn dot(&self, other: &FloatVec) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }
}

/// Square sparse matrix as `(row, col, value)` triplets sorted by row then column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    n: usize,
    entries: Vec<(usize, usize, BigRational)>,
}

impl SparseMatrix {
    pub fn new(n: usize, mut entries: Vec<(usize, usize, BigRational)>) -> Result<Self> {
        if let Some((r, c, _)) = entries.iter().find(|(r, c, _)| *r >= n || *c >= n) {
            return Err(Error::OutOfRange(format!("entry ({r},{c}) in a {n}x{n} matrix")));
        }
        entries.retain(|(_, _, v)| !v.is_zero());
        entries.sort_by_key(|e| (e.0, e.1));
        let mut merged: Vec<(usize, usize, BigRational)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|(_, _, v)| !v.is_zero());
        Ok(SparseMatrix { n, entries: merged })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(usize, usize, BigRational)] {
        &self.entries
    }

    pub fn transpose(&self) -> SparseMatrix {
        let t = self.entries.iter().map(|(r, c, v)| (*c, *r, v.clone())).collect();
        SparseMatrix::new(self.n, t).expect("transpose keeps indices in range")
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["row_atom", "col_atom", "value"])?;
        for (r, c, v) in &self.entries {
            w.write_record([r.to_string(), c.to_string(), fmt_rational(v)])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub enum LinearOperator {
    Identity(usize),
    Zero(usize),
    Expectation(Arc<Partition>),
    /// Pointwise multiplication by a fixed function.
    Multiply(Arc<ExactVec>),
    /// `Compose([A, B, C]) = A ∘ B ∘ C`; the last factor acts first.
    Compose(Vec<LinearOperator>),
    Sum(Vec<(BigRational, LinearOperator)>),
    Sparse(Arc<SparseMatrix>),
}

impl LinearOperator {
    pub fn expectation(part: Arc<Partition>) -> Self {
        LinearOperator::Expectation(part)
    }

    pub fn multiply(w: ExactVec) -> Self {
        LinearOperator::Multiply(Arc::new(w))
    }

    pub fn dim(&self) -> usize {
        match self {
            LinearOperator::Identity(n) | LinearOperator::Zero(n) => *n,
            LinearOperator::Expectation(p) => p.atom_count(),
            LinearOperator::Multiply(w) => w.len(),
            LinearOperator::Compose(fs) => fs[0].dim(),
            LinearOperator::Sum(ts) => ts[0].1.dim(),
            LinearOperator::Sparse(m) => m.dim(),
        }
    }

    /// `self ∘ other`.
    pub fn then_after(&self, other: &LinearOperator) -> LinearOperator {
        LinearOperator::compose(vec![self.clone(), other.clone()])
    }

    /// Product of factors, leftmost outermost; flattens nested products and drops identities.
    pub fn compose(factors: Vec<LinearOperator>) -> LinearOperator {
        assert!(!factors.is_empty(), "empty composition");
        let n = factors[0].dim();
        let mut flat = Vec::new();
        for f in factors {
            assert_eq!(f.dim(), n, "composing operators of different sizes");
            match f {
                LinearOperator::Identity(_) => {}
                LinearOperator::Zero(_) => return LinearOperator::Zero(n),
                LinearOperator::Compose(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => LinearOperator::Identity(n),
            1 => flat.pop().unwrap(),
            _ => LinearOperator::Compose(flat),
        }
    }

    /// `Σ c_k T_k`.
    pub fn linear_combination(terms: Vec<(BigRational, LinearOperator)>) -> LinearOperator {
        assert!(!terms.is_empty(), "empty sum");
        let n = terms[0].1.dim();
        let kept: Vec<_> = terms
            .into_iter()
            .inspect(|(_, t)| assert_eq!(t.dim(), n, "adding operators of different sizes"))
            .filter(|(c, t)| !c.is_zero() && !matches!(t, LinearOperator::Zero(_)))
            .collect();
        if kept.is_empty() {
            LinearOperator::Zero(n)
        } else {
            LinearOperator::Sum(kept)
        }
    }

    pub fn sum(terms: Vec<LinearOperator>) -> LinearOperator {
        LinearOperator::linear_combination(terms.into_iter().map(|t| (BigRational::one(), t)).collect())
    }

    pub fn add(&self, other: &LinearOperator) -> LinearOperator {
        LinearOperator::sum(vec![self.clone(), other.clone()])
    }

    pub fn sub(&self, other: &LinearOperator) -> LinearOperator {
        LinearOperator::linear_combination(vec![
            (BigRational::one(), self.clone()),
            (-BigRational::one(), other.clone()),
        ])
    }

    pub fn scale(&self, c: &BigRational) -> LinearOperator {
        LinearOperator::linear_combination(vec![(c.clone(), self.clone())])
    }

    pub fn pow(&self, m: u32) -> LinearOperator {
        if m == 0 {
            return LinearOperator::Identity(self.dim());
        }
        LinearOperator::compose(vec![self.clone(); m as usize])
    }

    /// Adjoint for `⟨f, g⟩ = Σ f g · atom_measure`; all atoms weigh the same, so this is the transpose.
    pub fn adjoint(&self) -> LinearOperator {
        match self {
            LinearOperator::Identity(_)
            | LinearOperator::Zero(_)
            | LinearOperator::Expectation(_)
            | LinearOperator::Multiply(_) => self.clone(),
            LinearOperator::Compose(fs) => LinearOperator::Compose(fs.iter().rev().map(|f| f.adjoint()).collect()),
            LinearOperator::Sum(ts) => LinearOperator::Sum(ts.iter().map(|(c, t)| (c.clone(), t.adjoint())).collect()),
            LinearOperator::Sparse(m) => LinearOperator::Sparse(Arc::new(m.transpose())),
        }
    }

    pub fn apply_to<V: Operand>(&self, f: &V) -> V {
        assert_eq!(f.dim(), self.dim(), "operator and vector sizes differ");
        match self {
            LinearOperator::Identity(_) => f.clone(),
            LinearOperator::Zero(n) => V::zeros(*n),
            LinearOperator::Expectation(p) => f.average(p),
            LinearOperator::Multiply(w) => f.mul_pointwise(w),
            LinearOperator::Compose(fs) => {
                let mut x = f.clone();
                for op in fs.iter().rev() {
                    x = op.apply_to(&x);
                }
                x
            }
            LinearOperator::Sum(ts) => {
                let mut acc = V::zeros(f.dim());
                for (c, t) in ts {
                    acc = acc.add_scaled(c, &t.apply_to(f));
                }
                acc
            }
            LinearOperator::Sparse(m) => f.apply_sparse(m),
        }
    }

    pub fn apply(&self, f: &ExactVec) -> ExactVec {
        self.apply_to(f)
    }

    pub fn apply_f64(&self, f: &[f64]) -> Vec<f64> {
        self.apply_to(&FloatVec(f.to_vec())).0
    }

    /// Commutes with every left translation of the atom group.
    pub fn is_translation_invariant(&self) -> bool {
        match self {
            LinearOperator::Identity(_) | LinearOperator::Zero(_) | LinearOperator::Expectation(_) => true,
            LinearOperator::Multiply(_) | LinearOperator::Sparse(_) => false,
            LinearOperator::Compose(fs) => fs.iter().all(|f| f.is_translation_invariant()),
            LinearOperator::Sum(ts) => ts.iter().all(|(_, t)| t.is_translation_invariant()),
        }
    }

    /// `T δ_e`, the image of the identity atom's indicator.
    pub fn kernel(&self) -> ExactVec {
        self.apply(&ExactVec::indicator(self.dim(), 0))
    }

    pub fn column(&self, atom: usize) -> ExactVec {
        self.apply(&ExactVec::indicator(self.dim(), atom))
    }

    /// First `(row, col)` where the two operators differ, or `None` if they are equal.
    pub fn first_difference(&self, other: &LinearOperator, space: &AtomSpace) -> Option<(usize, usize)> {
        assert_eq!(self.dim(), other.dim());
        assert_eq!(self.dim(), space.atom_count());
        if self.is_translation_invariant() && other.is_translation_invariant() {
            return self.kernel().first_difference(&other.kernel()).map(|r| (r, 0));
        }
        (0..self.dim()).find_map(|c| self.column(c).first_difference(&other.column(c)).map(|r| (r, c)))
    }

    pub fn exact_eq(&self, other: &LinearOperator, space: &AtomSpace) -> bool {
        self.first_difference(other, space).is_none()
    }

    pub fn is_zero_operator(&self, space: &AtomSpace) -> bool {
        self.exact_eq(&LinearOperator::Zero(self.dim()), space)
    }

    /// Materialize as sparse triplets; translation-invariant operators are
    /// expanded from their kernel, others column by column.
    pub fn to_sparse(&self, space: &AtomSpace) -> SparseMatrix {
        let n = self.dim();
        let mut entries = Vec::new();
        if self.is_translation_invariant() {
            let k = self.kernel();
            let support: Vec<(usize, BigRational)> =
                (0..n).map(|z| (z, k.get(z))).filter(|(_, v)| !v.is_zero()).collect();
            for col in 0..n {
                for (z, v) in &support {
                    entries.push((space.mul_atoms(col, *z), col, v.clone()));
                }
            }
        } else {
            for col in 0..n {
                let c = self.column(col);
                for row in 0..n {
                    let v = c.get(row);
                    if !v.is_zero() {
                        entries.push((row, col, v));
                    }
                }
            }
        }
        SparseMatrix::new(n, entries).expect("indices come from the space")
    }

    /// Largest absolute row sum of the kernel, i.e. the `L¹`/`L^∞` operator norm for invariant operators.
    pub fn kernel_l1(&self) -> BigRational {
        let k = self.kernel();
        (0..k.len()).map(|i| k.get(i).abs()).sum()
    }
}

/// Convenience for coefficient literals.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::{partition, PartitionSpec};
    use crate::heisenberg::{build_atom_space, ModelConfig};

    fn setup() -> (AtomSpace, LinearOperator, LinearOperator) {
        let s = build_atom_space(ModelConfig::new(2, 0, 0, 1, 1)).unwrap();
        let e1 = LinearOperator::expectation(Arc::new(partition(&s, &PartitionSpec::level(1, 0)).unwrap()));
        let e2 = LinearOperator::expectation(Arc::new(partition(&s, &PartitionSpec::level(0, 1)).unwrap()));
        (s, e1, e2)
    }

    #[test]
    fn projection_properties() {
        let (s, e1, _) = setup();
        assert!(e1.pow(2).exact_eq(&e1, &s));
        assert!(e1.adjoint().exact_eq(&e1, &s));
        let m = e1.to_sparse(&s);
        assert_eq!(m.transpose(), m);
    }

    #[test]
    fn kernel_equality_agrees_with_columns() {
        let (s, e1, e2) = setup();
        let a = e1.then_after(&e2);
        let b = e2.then_after(&e1);
        // compare invariant path against the column-by-column path
        let w = LinearOperator::multiply(ExactVec::from_i64s(&vec![1; s.atom_count()]));
        let a_slow = w.then_after(&a);
        assert_eq!(a.exact_eq(&b, &s), a_slow.exact_eq(&b, &s));
        assert!(a.adjoint().exact_eq(&b, &s));
        assert!(a_slow.exact_eq(&a, &s));
    }

    #[test]
    fn sparse_round_trip() {
        let (s, e1, e2) = setup();
        let t = e1.then_after(&e2).sub(&e2.scale(&ratio(1, 3)));
        let m = LinearOperator::Sparse(Arc::new(t.to_sparse(&s)));
        assert!(m.exact_eq(&t, &s));
        assert!(m.adjoint().exact_eq(&t.adjoint(), &s));
        let f = ExactVec::from_i64s(&(0..s.atom_count() as i64).collect::<Vec<_>>());
        assert_eq!(m.apply(&f), t.apply(&f));
        let ff = f.to_f64();
        let diff: f64 = m.apply_f64(&ff).iter().zip(t.apply_f64(&ff)).map(|(a, b)| (a - b).abs()).sum();
        assert!(diff < 1e-9);
    }

    #[test]
    fn algebra_simplifies() {
        let (s, e1, _) = setup();
        let n = s.atom_count();
        assert!(matches!(LinearOperator::compose(vec![LinearOperator::Identity(n), e1.clone()]), LinearOperator::Expectation(_)));
        assert!(matches!(e1.sub(&e1).scale(&ratio(0, 1)), LinearOperator::Zero(_)));
        assert!(e1.sub(&e1).is_zero_operator(&s));
        assert!(e1.pow(0).exact_eq(&LinearOperator::Identity(n), &s));
    }

    #[test]
    fn sparse_matrix_merges_and_rejects() {
        let m = SparseMatrix::new(2, vec![(0, 1, ratio(1, 2)), (0, 1, ratio(1, 2)), (1, 0, ratio(0, 1))]).unwrap();
        assert_eq!(m.entries(), &[(0, 1, ratio(1, 1))]);
        assert!(SparseMatrix::new(2, vec![(2, 0, ratio(1, 1))]).is_err());
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "row_atom,col_atom,value\n0,1,1/1\n");
    }
}
