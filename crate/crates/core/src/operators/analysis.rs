//! Martingale differences, maximal and square functions, transforms and norms.
//!
//! Ranges: `L(i)` for `i0 ≤ i ≤ A` and `R(j)` for `j0 ≤ j ≤ B`. The row
//! σ-field only becomes the full atom σ-field at `i = A` (at `i = I` it is
//! still coarser in `x`), so the one-parameter resolutions of the identity
//! run up to the base exponents, not to the grid bound.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::coweights::{Coweight, LAMBDA1, LAMBDA2};
use crate::error::{Error, Result};
use crate::exact::{parse_rational, ExactVec};
use crate::filtration::{Filtration, PartitionSpec};
use crate::heisenberg::{AtomSpace, ModelConfig};
use crate::operators::linear::LinearOperator;

pub fn expectation_operator(filt: &Filtration, spec: &PartitionSpec) -> Result<LinearOperator> {
    Ok(LinearOperator::expectation(filt.partition(spec)?))
}

/// `E_λ`.
pub fn level_op(filt: &Filtration, l: Coweight) -> Result<LinearOperator> {
    expectation_operator(filt, &PartitionSpec::Level(l))
}

/// `E[· | F_{i,∞}]`.
pub fn row_op(filt: &Filtration, i: i64) -> Result<LinearOperator> {
    expectation_operator(filt, &PartitionSpec::Row(i))
}

/// `E[· | F_{∞,j}]`.
pub fn col_op(filt: &Filtration, j: i64) -> Result<LinearOperator> {
    expectation_operator(filt, &PartitionSpec::Col(j))
}

pub fn join_op(filt: &Filtration, levels: &[Coweight]) -> Result<LinearOperator> {
    expectation_operator(filt, &PartitionSpec::join_levels(levels))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DifferenceKind {
    L(i64),
    R(i64),
    D(Coweight),
    Dstar(Coweight),
    /// The double difference `d_λ`.
    Double(Coweight),
}

impl fmt::Display for DifferenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DifferenceKind::L(i) => write!(f, "L:{i}"),
            DifferenceKind::R(j) => write!(f, "R:{j}"),
            DifferenceKind::D(l) => write!(f, "D:{l}"),
            DifferenceKind::Dstar(l) => write!(f, "Dstar:{l}"),
            DifferenceKind::Double(l) => write!(f, "d:{l}"),
        }
    }
}

impl FromStr for DifferenceKind {
    type Err = Error;

    /// `L:i`, `R:j`, `D:i,j`, `Dstar:i,j`, `d:i,j`.
    fn from_str(s: &str) -> Result<Self> {
        let (tag, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected KIND:ARGS, got `{s}`")))?;
        let int = |t: &str| t.trim().parse::<i64>().map_err(|e| Error::Parse(format!("`{t}`: {e}")));
        Ok(match tag.trim() {
            "L" => DifferenceKind::L(int(arg)?),
            "R" => DifferenceKind::R(int(arg)?),
            "D" => DifferenceKind::D(arg.parse()?),
            "Dstar" => DifferenceKind::Dstar(arg.parse()?),
            "d" => DifferenceKind::Double(arg.parse()?),
            other => return Err(Error::Parse(format!("unknown operator kind `{other}`"))),
        })
    }
}

/// `L_i`; `L_{i0}` is the base projection `E[· | F_{i0,∞}]`.
pub fn l_op(filt: &Filtration, i: i64) -> Result<LinearOperator> {
    let c = filt.config();
    if i < c.i0 || i > c.a {
        return Err(Error::OutOfRange(format!("L({i}) needs {} <= i <= {}", c.i0, c.a)));
    }
    let top = row_op(filt, i)?;
    if i == c.i0 {
        Ok(top)
    } else {
        Ok(top.sub(&row_op(filt, i - 1)?))
    }
}

/// `R_j`; `R_{j0}` is the base projection `E[· | F_{∞,j0}]`.
pub fn r_op(filt: &Filtration, j: i64) -> Result<LinearOperator> {
    let c = filt.config();
    if j < c.j0 || j > c.b {
        return Err(Error::OutOfRange(format!("R({j}) needs {} <= j <= {}", c.j0, c.b)));
    }
    let top = col_op(filt, j)?;
    if j == c.j0 {
        Ok(top)
    } else {
        Ok(top.sub(&col_op(filt, j - 1)?))
    }
}

/// Is `λ` a valid index for a double difference: all four corners representable.
pub fn is_double_difference_index(config: &ModelConfig, l: Coweight) -> bool {
    l.i > config.i0 && l.j > config.j0 && config.representable(l)
}

pub fn d_op(filt: &Filtration, l: Coweight) -> Result<LinearOperator> {
    if !is_double_difference_index(filt.config(), l) {
        return Err(Error::OutOfRange(format!("d({l}) needs an interior representable level")));
    }
    let one = BigRational::one();
    Ok(LinearOperator::linear_combination(vec![
        (one.clone(), level_op(filt, l)?),
        (-one.clone(), level_op(filt, l - LAMBDA1)?),
        (-one.clone(), level_op(filt, l - LAMBDA2)?),
        (one, level_op(filt, l - LAMBDA1 - LAMBDA2)?),
    ]))
}

pub fn difference_op(filt: &Filtration, kind: DifferenceKind) -> Result<LinearOperator> {
    match kind {
        DifferenceKind::L(i) => l_op(filt, i),
        DifferenceKind::R(j) => r_op(filt, j),
        DifferenceKind::D(l) => Ok(l_op(filt, l.i)?.then_after(&r_op(filt, l.j)?)),
        DifferenceKind::Dstar(l) => Ok(r_op(filt, l.j)?.then_after(&l_op(filt, l.i)?)),
        DifferenceKind::Double(l) => d_op(filt, l),
    }
}

/// Index set of `D_λ`, `D*_λ`: `[i0, A] × [j0, B]`.
pub fn difference_grid(config: &ModelConfig) -> Vec<Coweight> {
    let mut out = Vec::new();
    for i in config.i0..=config.a {
        for j in config.j0..=config.b {
            out.push(Coweight::new(i, j));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MaximalKind {
    Mstar,
    Lstar,
    Rstar,
}

/// Pointwise maxima: `M*` over grid levels of `|E_λ f|`, `L*`/`R*` over
/// rows `i0..=A` / columns `j0..=B` of `E[|f| | ·]`.
pub fn maximal(filt: &Filtration, kind: MaximalKind, f: &ExactVec) -> Result<ExactVec> {
    let c = *filt.config();
    check_dim(filt.space(), f)?;
    let specs: Vec<PartitionSpec> = match kind {
        MaximalKind::Mstar => c.grid().into_iter().map(PartitionSpec::Level).collect(),
        MaximalKind::Lstar => (c.i0..=c.a).map(PartitionSpec::Row).collect(),
        MaximalKind::Rstar => (c.j0..=c.b).map(PartitionSpec::Col).collect(),
    };
    let src = if kind == MaximalKind::Mstar { f.clone() } else { f.abs() };
    let mut best: Option<ExactVec> = None;
    for spec in specs {
        let mut g = filt.cond_expect(&src, &spec)?;
        if kind == MaximalKind::Mstar {
            g = g.abs();
        }
        best = Some(match best {
            None => g,
            Some(b) => b.max(&g),
        });
    }
    Ok(best.expect("grids are nonempty"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SquareKind {
    /// Double-difference square function `S`.
    S,
    /// `𝒮`, built from `D_λ`.
    CalS,
    /// `𝒮*`, built from `D*_λ`.
    CalSstar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SquareFunction {
    /// Pointwise `Σ (·)²` over the main index set (interior grid for `S`).
    pub sum_of_squares: ExactVec,
    /// For `S` only: the boundary group (edge differences and corner projection).
    pub boundary_sum_of_squares: Option<ExactVec>,
    /// Pointwise square root of the full sum.
    pub values: Vec<f64>,
}

impl SquareFunction {
    pub fn total(&self) -> ExactVec {
        match &self.boundary_sum_of_squares {
            Some(b) => self.sum_of_squares.add(b),
            None => self.sum_of_squares.clone(),
        }
    }
}

/// Boundary group of the double-difference decomposition on the grid:
/// `E_{(i0,j)} − E_{(i0,j−1)}`, `E_{(i,j0)} − E_{(i−1,j0)}` and the corner `E_{(i0,j0)}`.
pub fn boundary_ops(filt: &Filtration) -> Result<Vec<(String, LinearOperator)>> {
    let c = *filt.config();
    let mut out = vec![(format!("corner {}", c.base_level()), level_op(filt, c.base_level())?)];
    for j in c.j0 + 1..=c.j_max {
        let l = Coweight::new(c.i0, j);
        out.push((format!("edge {l}"), level_op(filt, l)?.sub(&level_op(filt, l - LAMBDA2)?)));
    }
    for i in c.i0 + 1..=c.i_max {
        let l = Coweight::new(i, c.j0);
        out.push((format!("edge {l}"), level_op(filt, l)?.sub(&level_op(filt, l - LAMBDA1)?)));
    }
    Ok(out)
}

pub fn square(filt: &Filtration, kind: SquareKind, f: &ExactVec) -> Result<SquareFunction> {
    check_dim(filt.space(), f)?;
    let c = *filt.config();
    let n = f.len();
    let mut acc = ExactVec::zeros(n);
    let mut boundary = None;
    match kind {
        SquareKind::S => {
            for l in c.interior() {
                let g = d_op(filt, l)?.apply(f);
                acc = acc.add(&g.mul(&g));
            }
            let mut b = ExactVec::zeros(n);
            for (_, op) in boundary_ops(filt)? {
                let g = op.apply(f);
                b = b.add(&g.mul(&g));
            }
            boundary = Some(b);
        }
        SquareKind::CalS => {
            for j in c.j0..=c.b {
                let rf = r_op(filt, j)?.apply(f);
                for i in c.i0..=c.a {
                    let g = l_op(filt, i)?.apply(&rf);
                    acc = acc.add(&g.mul(&g));
                }
            }
        }
        SquareKind::CalSstar => {
            for i in c.i0..=c.a {
                let lf = l_op(filt, i)?.apply(f);
                for j in c.j0..=c.b {
                    let g = r_op(filt, j)?.apply(&lf);
                    acc = acc.add(&g.mul(&g));
                }
            }
        }
    }
    let mut out = SquareFunction { sum_of_squares: acc, boundary_sum_of_squares: boundary, values: Vec::new() };
    out.values = out.total().to_f64().into_iter().map(f64::sqrt).collect();
    Ok(out)
}

/// Predictable coefficients `a_λ` for interior `λ`, with their sup bound.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficients {
    pub bound: BigRational,
    pub values: BTreeMap<Coweight, ExactVec>,
}

impl Coefficients {
    pub fn constant(filt: &Filtration, c: &BigRational) -> Self {
        let n = filt.space().atom_count();
        let values = filt
            .config()
            .interior()
            .into_iter()
            .map(|l| (l, ExactVec::constant(n, c)))
            .collect();
        Coefficients { bound: c.abs(), values }
    }

    /// Every `a_λ` sits at an interior grid point, is `F_{λ−λ₁−λ₂}`-measurable and `|a_λ| ≤ bound`.
    pub fn validate(&self, filt: &Filtration) -> Result<()> {
        let c = *filt.config();
        for (l, a) in &self.values {
            if !(l.i > c.i0 && l.j > c.j0 && l.i <= c.i_max && l.j <= c.j_max) {
                return Err(Error::OutOfRange(format!("coefficient at {l} is not an interior grid point")));
            }
            check_dim(filt.space(), a)?;
            let pred = *l - LAMBDA1 - LAMBDA2;
            if !filt.level(pred)?.is_measurable(a) {
                return Err(Error::NotPredictable { at: l.to_string(), level: pred.to_string() });
            }
            if a.max_abs() > self.bound {
                return Err(Error::CoefficientUnbounded {
                    at: l.to_string(),
                    bound: crate::exact::fmt_rational(&self.bound),
                });
            }
        }
        Ok(())
    }
}

/// `Σ_λ a_λ · d_λ^m f` over the interior grid points carrying a coefficient.
pub fn martingale_transform(filt: &Filtration, a: &Coefficients, m: u32, f: &ExactVec) -> Result<ExactVec> {
    if m == 0 {
        return Err(Error::InvalidExponent("transform power m must be at least 1".into()));
    }
    check_dim(filt.space(), f)?;
    a.validate(filt)?;
    let mut acc = ExactVec::zeros(f.len());
    for (l, coeff) in &a.values {
        let g = d_op(filt, *l)?.pow(m).apply(f);
        acc = acc.add(&coeff.mul(&g));
    }
    Ok(acc)
}

/// `Σ_λ D_λ D*_λ f` over the difference grid in the given order.
pub fn calderon_sum_ordered(filt: &Filtration, f: &ExactVec, order: &[Coweight]) -> Result<ExactVec> {
    check_dim(filt.space(), f)?;
    let mut acc = ExactVec::zeros(f.len());
    for &l in order {
        let d = difference_op(filt, DifferenceKind::D(l))?;
        let ds = difference_op(filt, DifferenceKind::Dstar(l))?;
        acc = acc.add(&d.apply(&ds.apply(f)));
    }
    Ok(acc)
}

pub fn calderon_sum(filt: &Filtration, f: &ExactVec) -> Result<ExactVec> {
    calderon_sum_ordered(filt, f, &difference_grid(filt.config()))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Exponent {
    Finite(BigRational),
    Infinity,
}

impl Exponent {
    pub fn finite(n: i64, d: i64) -> Self {
        Exponent::Finite(crate::exact::rational(n, d))
    }

    pub fn as_integer(&self) -> Option<u32> {
        match self {
            Exponent::Finite(r) if r.is_integer() => r.to_integer().to_u32(),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Finite(r) => r.to_f64().unwrap_or(f64::NAN),
            Exponent::Infinity => f64::INFINITY,
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// `inf`, an integer, a fraction `n/d` or a decimal like `1.5`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Exponent::Infinity);
        }
        if let Some(r) = parse_rational(t) {
            return Ok(Exponent::Finite(r));
        }
        if let Some((whole, frac)) = t.split_once('.') {
            let digits = format!("{whole}{frac}");
            let n: num_bigint::BigInt = digits.parse().map_err(|_| Error::Parse(format!("bad exponent `{s}`")))?;
            let d = num_bigint::BigInt::from(10u32).pow(frac.len() as u32);
            return Ok(Exponent::Finite(BigRational::new(n, d)));
        }
        Err(Error::Parse(format!("bad exponent `{s}`")))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Infinity => write!(f, "inf"),
            Exponent::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Exponent::Finite(r) => write!(f, "{}", r.to_f64().unwrap_or(f64::NAN)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpNorm {
    /// Exact `Σ |f|^p · atom_measure` for positive integer `p`, or `max |f|` for `p = ∞`.
    pub exact: Option<BigRational>,
    pub value: f64,
}

pub fn lp_norm(space: &AtomSpace, f: &ExactVec, p: &Exponent) -> Result<LpNorm> {
    check_dim(space, f)?;
    match p {
        Exponent::Infinity => {
            let m = f.max_abs();
            Ok(LpNorm { value: m.to_f64().unwrap_or(f64::NAN), exact: Some(m) })
        }
        Exponent::Finite(r) => {
            if *r < BigRational::one() {
                return Err(Error::InvalidExponent(format!("p = {} is below 1", crate::exact::fmt_rational(r))));
            }
            let w = space.atom_measure();
            if let Some(k) = p.as_integer() {
                let s = f.sum_abs_pow(k) * w;
                let value = s.to_f64().unwrap_or(f64::NAN).powf(1.0 / k as f64);
                return Ok(LpNorm { exact: Some(s), value });
            }
            let pf = p.to_f64();
            let s: f64 = f.to_f64().iter().map(|x| x.abs().powf(pf)).sum::<f64>() * w.to_f64().unwrap_or(f64::NAN);
            Ok(LpNorm { exact: None, value: s.powf(1.0 / pf) })
        }
    }
}

/// `⟨f, g⟩ = Σ f g · atom_measure`.
pub fn inner(space: &AtomSpace, f: &ExactVec, g: &ExactVec) -> BigRational {
    f.dot(g) * space.atom_measure()
}

/// `‖f‖₂²` as an exact rational.
pub fn norm2_squared(space: &AtomSpace, f: &ExactVec) -> BigRational {
    inner(space, f, f)
}

fn check_dim(space: &AtomSpace, f: &ExactVec) -> Result<()> {
    if f.len() != space.atom_count() {
        return Err(Error::DimensionMismatch { expected: space.atom_count(), found: f.len() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational;
    use crate::operators::linear::ratio;

    fn filt(p: u64, i: i64, j: i64) -> Filtration {
        Filtration::from_config(ModelConfig::new(p, 0, 0, i, j)).unwrap()
    }

    fn sample(n: usize, salt: i64) -> ExactVec {
        let v: Vec<BigRational> = (0..n as i64)
            .map(|k| rational((k * 7 + salt * 3) % 11 - 5, 1 + (k + salt) % 3))
            .collect();
        ExactVec::from_rationals(&v)
    }

    #[test]
    fn double_difference_kills_constants_and_satisfies_quartic() {
        let f = filt(2, 2, 2);
        let s = f.space();
        let q = ratio(1, 2);
        for l in f.config().interior() {
            let d = d_op(&f, l).unwrap();
            assert!(d.apply(&ExactVec::from_i64s(&vec![3; s.atom_count()])).is_zero());
            let quartic = LinearOperator::linear_combination(vec![
                (ratio(1, 1), d.pow(4)),
                (ratio(-1, 1), d.pow(3)),
                (-q.clone(), d.pow(2)),
                (q.clone(), d.clone()),
            ]);
            assert!(quartic.is_zero_operator(s), "{l}");
        }
    }

    #[test]
    fn one_parameter_resolutions_of_identity() {
        let f = filt(3, 1, 1);
        let s = f.space();
        let c = *f.config();
        let id = LinearOperator::Identity(s.atom_count());
        let ls: Vec<_> = (c.i0..=c.a).map(|i| l_op(&f, i).unwrap()).collect();
        let rs: Vec<_> = (c.j0..=c.b).map(|j| r_op(&f, j).unwrap()).collect();
        assert!(LinearOperator::sum(ls.clone()).exact_eq(&id, s));
        assert!(LinearOperator::sum(rs.clone()).exact_eq(&id, s));
        for (a, la) in ls.iter().enumerate() {
            for (b, lb) in ls.iter().enumerate() {
                let want = if a == b { la.clone() } else { LinearOperator::Zero(s.atom_count()) };
                assert!(la.then_after(lb).exact_eq(&want, s));
            }
        }
        // stopping at the grid bound leaves something out
        let partial = LinearOperator::sum(ls[..=(c.i_max - c.i0) as usize].to_vec());
        assert!(!partial.exact_eq(&id, s));
    }

    #[test]
    fn rejects_out_of_range_differences() {
        let f = filt(2, 1, 1);
        assert!(difference_op(&f, DifferenceKind::L(-1)).is_err());
        assert!(difference_op(&f, DifferenceKind::R(3)).is_err());
        assert!(difference_op(&f, DifferenceKind::Double(Coweight::new(0, 1))).is_err());
        assert!(difference_op(&f, DifferenceKind::Double(Coweight::new(1, 1))).is_ok());
        assert_eq!("Dstar:1,2".parse::<DifferenceKind>().unwrap(), DifferenceKind::Dstar(Coweight::new(1, 2)));
        assert_eq!("L:3".parse::<DifferenceKind>().unwrap(), DifferenceKind::L(3));
        assert!("Q:1".parse::<DifferenceKind>().is_err());
    }

    #[test]
    fn maximal_functions_of_constants() {
        let f = filt(2, 1, 1);
        let n = f.space().atom_count();
        let c = ExactVec::from_i64s(&vec![-4; n]);
        for kind in [MaximalKind::Mstar, MaximalKind::Lstar, MaximalKind::Rstar] {
            assert_eq!(maximal(&f, kind, &c).unwrap(), c.abs());
        }
    }

    #[test]
    fn mstar_dominates_top_level() {
        let f = filt(2, 1, 1);
        let g = sample(f.space().atom_count(), 2);
        let top = f.cond_expect(&g, &PartitionSpec::Level(f.config().top_level())).unwrap().abs();
        let m = maximal(&f, MaximalKind::Mstar, &g).unwrap();
        assert_eq!(top.first_exceeding(&m), None);
    }

    #[test]
    fn square_functions() {
        let f = filt(2, 1, 1);
        let s = f.space();
        let g = sample(s.atom_count(), 1);
        let norm = norm2_squared(s, &g);
        for kind in [SquareKind::CalS, SquareKind::CalSstar] {
            let sq = square(&f, kind, &g).unwrap();
            assert_eq!(sq.sum_of_squares.sum() * s.atom_measure(), norm);
        }
        let e = ExactVec::indicator(s.atom_count(), 5);
        let sq = square(&f, SquareKind::CalSstar, &e).unwrap();
        assert_eq!(sq.sum_of_squares.sum() * s.atom_measure(), norm2_squared(s, &e));
        let c = square(&f, SquareKind::S, &ExactVec::from_i64s(&vec![2; s.atom_count()])).unwrap();
        assert!(c.sum_of_squares.is_zero());
        assert_eq!(c.values[0], 2.0);
    }

    #[test]
    fn transform_examples() {
        let f = filt(2, 2, 2);
        let s = f.space();
        let c = *f.config();
        let g = sample(s.atom_count(), 4);
        let zero = Coefficients::constant(&f, &ratio(0, 1));
        assert!(martingale_transform(&f, &zero, 1, &g).unwrap().is_zero());
        let one = Coefficients::constant(&f, &ratio(1, 1));
        let got = martingale_transform(&f, &one, 1, &g).unwrap();
        let e = |i, j| f.cond_expect(&g, &PartitionSpec::level(i, j)).unwrap();
        let want = e(c.i_max, c.j_max).sub(&e(c.i0, c.j_max)).sub(&e(c.i_max, c.j0)).add(&e(c.i0, c.j0));
        assert_eq!(got, want);

        let mut bad = one.clone();
        bad.values.insert(Coweight::new(2, 2), g.clone());
        bad.bound = ratio(100, 1);
        assert!(matches!(martingale_transform(&f, &bad, 1, &g), Err(Error::NotPredictable { .. })));
        let mut big = one.clone();
        big.bound = ratio(1, 2);
        assert!(matches!(martingale_transform(&f, &big, 1, &g), Err(Error::CoefficientUnbounded { .. })));
        assert!(martingale_transform(&f, &one, 0, &g).is_err());
    }

    #[test]
    fn calderon_reproduces() {
        let f = filt(3, 1, 1);
        let g = sample(f.space().atom_count(), 3);
        assert_eq!(calderon_sum(&f, &g).unwrap(), g);
        let mut order = difference_grid(f.config());
        order.reverse();
        assert_eq!(calderon_sum_ordered(&f, &g, &order).unwrap(), g);
        assert!(calderon_sum(&f, &ExactVec::zeros(g.len())).unwrap().is_zero());
    }

    #[test]
    fn lp_norms() {
        let f = filt(2, 1, 1);
        let s = f.space();
        let one = ExactVec::from_i64s(&vec![1; s.atom_count()]);
        for p in ["1", "2", "3/2", "1.5", "inf"] {
            let e: Exponent = p.parse().unwrap();
            assert!((lp_norm(s, &one, &e).unwrap().value - 1.0).abs() < 1e-12, "{p}");
        }
        let g = sample(s.atom_count(), 0);
        let three = g.scale(&ratio(-3, 1));
        for p in ["1", "2", "1.5", "inf"] {
            let e: Exponent = p.parse().unwrap();
            let a = lp_norm(s, &g, &e).unwrap().value;
            let b = lp_norm(s, &three, &e).unwrap().value;
            assert!((b - 3.0 * a).abs() < 1e-9 * b.max(1.0));
        }
        assert_eq!(lp_norm(s, &g, &Exponent::finite(2, 1)).unwrap().exact, Some(inner(s, &g, &g)));
        assert!(matches!(lp_norm(s, &g, &Exponent::finite(1, 2)), Err(Error::InvalidExponent(_))));
        assert_eq!("1.5".parse::<Exponent>().unwrap(), Exponent::finite(3, 2));
    }
}
