//! Exact rational vectors stored over a common denominator.
//!
//! Numerators live in `i128` as long as every intermediate fits; the first
//! overflow promotes the whole vector to `BigInt`, and vectors whose entries
//! shrink back below [`DEMOTE_BITS`] return to the small representation.
//! Every public constructor and operation yields a normalized vector
//! (`den > 0`, `gcd(den, num…) = 1`), so structural equality is value equality.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

use crate::filtration::Partition;

const DEMOTE_BITS: u64 = 96;

trait Int:
    Clone + Integer + Signed + CheckedAdd + CheckedSub + CheckedMul + From<u32> + fmt::Debug
{
}
impl Int for i128 {}
impl Int for BigInt {}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Dense<T> {
    num: Vec<T>,
    den: T,
}

#[derive(Clone, Debug)]
enum Repr {
    Small(Dense<i128>),
    Big(Dense<BigInt>),
}

/// A vector of exact rationals sharing one positive denominator.
#[derive(Clone, Debug)]
pub struct ExactVec(Repr);

impl<T: Int> Dense<T> {
    fn normalize(mut self) -> Self {
        if self.den.is_one() {
            return self;
        }
        let mut g = self.den.clone();
        for x in &self.num {
            if x.is_zero() {
                continue;
            }
            g = g.gcd(x);
            if g.is_one() {
                return self;
            }
        }
        for x in &mut self.num {
            *x = x.clone() / g.clone();
        }
        self.den = self.den.clone() / g;
        self
    }

    /// Rescale both operands onto `lcm(den_a, den_b)`.
    fn align(&self, other: &Self) -> Option<(Vec<T>, Vec<T>, T)> {
        let l = self.den.lcm(&other.den);
        let fa = l.clone() / self.den.clone();
        let fb = l.clone() / other.den.clone();
        let scale = |v: &[T], f: &T| -> Option<Vec<T>> {
            if f.is_one() {
                Some(v.to_vec())
            } else {
                v.iter().map(|x| x.checked_mul(f)).collect()
            }
        };
        Some((scale(&self.num, &fa)?, scale(&other.num, &fb)?, l))
    }

    fn add(&self, other: &Self, negate: bool) -> Option<Self> {
        if self.den == other.den {
            let num = self
                .num
                .iter()
                .zip(&other.num)
                .map(|(a, b)| if negate { a.checked_sub(b) } else { a.checked_add(b) })
                .collect::<Option<Vec<T>>>()?;
            return Some(Dense { num, den: self.den.clone() }.normalize());
        }
        let (a, b, den) = self.align(other)?;
        let num = a
            .iter()
            .zip(&b)
            .map(|(x, y)| if negate { x.checked_sub(y) } else { x.checked_add(y) })
            .collect::<Option<Vec<T>>>()?;
        Some(Dense { num, den }.normalize())
    }

    fn scale(&self, n: &T, d: &T) -> Option<Self> {
        let num = self
            .num
            .iter()
            .map(|x| x.checked_mul(n))
            .collect::<Option<Vec<T>>>()?;
        let den = self.den.checked_mul(d)?;
        Some(Dense { num, den }.normalize())
    }

    fn mul(&self, other: &Self) -> Option<Self> {
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| a.checked_mul(b))
            .collect::<Option<Vec<T>>>()?;
        let den = self.den.checked_mul(&other.den)?;
        Some(Dense { num, den }.normalize())
    }

    fn abs(&self) -> Self {
        Dense { num: self.num.iter().map(|x| x.abs()).collect(), den: self.den.clone() }
    }

    fn max(&self, other: &Self) -> Option<Self> {
        let (a, b, den) = self.align(other)?;
        let num = a
            .into_iter()
            .zip(b)
            .map(|(x, y)| if x >= y { x } else { y })
            .collect();
        Some(Dense { num, den }.normalize())
    }

    fn average(&self, part: &Partition) -> Option<Self> {
        let mut sums = vec![T::zero(); part.cell_count()];
        for (x, &c) in self.num.iter().zip(part.cell_of()) {
            let s = &mut sums[c as usize];
            *s = s.checked_add(x)?;
        }
        let out = match part.uniform_size() {
            Some(size) => Dense {
                num: part.cell_of().iter().map(|&c| sums[c as usize].clone()).collect(),
                den: self.den.checked_mul(&T::from(size))?,
            },
            None => {
                let l = part
                    .cell_sizes()
                    .iter()
                    .fold(T::one(), |acc, &s| acc.lcm(&T::from(s)));
                let factors: Vec<T> = part
                    .cell_sizes()
                    .iter()
                    .map(|&s| l.clone() / T::from(s))
                    .collect();
                let num = part
                    .cell_of()
                    .iter()
                    .map(|&c| sums[c as usize].checked_mul(&factors[c as usize]))
                    .collect::<Option<Vec<T>>>()?;
                Dense { num, den: self.den.checked_mul(&l)? }
            }
        };
        Some(out.normalize())
    }
}

fn to_big(d: &Dense<i128>) -> Dense<BigInt> {
    Dense { num: d.num.iter().map(|&x| BigInt::from(x)).collect(), den: BigInt::from(d.den) }
}

fn try_demote(d: Dense<BigInt>) -> Repr {
    let fits = |x: &BigInt| x.bits() < DEMOTE_BITS;
    if fits(&d.den) && d.num.iter().all(fits) {
        Repr::Small(Dense {
            num: d.num.iter().map(|x| x.to_i128().unwrap()).collect(),
            den: d.den.to_i128().unwrap(),
        })
    } else {
        Repr::Big(d)
    }
}

fn small_coeff(c: &BigRational) -> Option<(i128, i128)> {
    Some((c.numer().to_i128()?, c.denom().to_i128()?))
}

impl ExactVec {
    fn from_big(d: Dense<BigInt>) -> Self {
        ExactVec(try_demote(d))
    }

    fn big(&self) -> Dense<BigInt> {
        match &self.0 {
            Repr::Small(d) => to_big(d),
            Repr::Big(d) => d.clone(),
        }
    }

    fn binary(
        &self,
        other: &ExactVec,
        small: impl Fn(&Dense<i128>, &Dense<i128>) -> Option<Dense<i128>>,
        big: impl Fn(&Dense<BigInt>, &Dense<BigInt>) -> Option<Dense<BigInt>>,
    ) -> ExactVec {
        assert_eq!(self.len(), other.len(), "exact vectors of different lengths");
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            if let Some(r) = small(a, b) {
                return ExactVec(Repr::Small(r));
            }
        }
        ExactVec::from_big(big(&self.big(), &other.big()).expect("bigint arithmetic cannot overflow"))
    }

    pub fn zeros(n: usize) -> Self {
        ExactVec(Repr::Small(Dense { num: vec![0; n], den: 1 }))
    }

    pub fn from_i64s(values: &[i64]) -> Self {
        ExactVec(Repr::Small(Dense { num: values.iter().map(|&x| x as i128).collect(), den: 1 }))
    }

    /// `num[k] / den` for every `k`.
    pub fn from_parts(num: Vec<i128>, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        let (num, den) = if den < 0 { (num.into_iter().map(|x| -x).collect(), -den) } else { (num, den) };
        ExactVec(Repr::Small(Dense { num, den }.normalize()))
    }

    pub fn from_rationals(values: &[BigRational]) -> Self {
        let den = values.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let num = values
            .iter()
            .map(|r| r.numer() * (&den / r.denom()))
            .collect();
        ExactVec::from_big(Dense { num, den }.normalize())
    }

    pub fn constant(n: usize, c: &BigRational) -> Self {
        ExactVec::from_rationals(&vec![c.clone(); n])
    }

    pub fn indicator(n: usize, index: usize) -> Self {
        let mut num = vec![0i128; n];
        num[index] = 1;
        ExactVec(Repr::Small(Dense { num, den: 1 }))
    }

    pub fn len(&self) -> usize {
        match &self.0 {
            Repr::Small(d) => d.num.len(),
            Repr::Big(d) => d.num.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small(d) => d.num.iter().all(|x| *x == 0),
            Repr::Big(d) => d.num.iter().all(Zero::is_zero),
        }
    }

    pub fn get(&self, i: usize) -> BigRational {
        match &self.0 {
            Repr::Small(d) => BigRational::new(d.num[i].into(), d.den.into()),
            Repr::Big(d) => BigRational::new(d.num[i].clone(), d.den.clone()),
        }
    }

    pub fn to_rationals(&self) -> Vec<BigRational> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    /// Common denominator of the normalized vector.
    pub fn denominator(&self) -> BigInt {
        match &self.0 {
            Repr::Small(d) => d.den.into(),
            Repr::Big(d) => d.den.clone(),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match &self.0 {
            Repr::Small(d) => {
                if d.den.unsigned_abs() < (1u128 << 53) {
                    let den = d.den as f64;
                    d.num.iter().map(|&x| x as f64 / den).collect()
                } else {
                    (0..d.num.len()).map(|i| self.get(i).to_f64().unwrap_or(f64::NAN)).collect()
                }
            }
            Repr::Big(_) => (0..self.len()).map(|i| self.get(i).to_f64().unwrap_or(f64::NAN)).collect(),
        }
    }

    pub fn add(&self, other: &ExactVec) -> ExactVec {
        self.binary(other, |a, b| a.add(b, false), |a, b| a.add(b, false))
    }

    pub fn sub(&self, other: &ExactVec) -> ExactVec {
        self.binary(other, |a, b| a.add(b, true), |a, b| a.add(b, true))
    }

    pub fn mul(&self, other: &ExactVec) -> ExactVec {
        self.binary(other, Dense::mul, Dense::mul)
    }

    pub fn max(&self, other: &ExactVec) -> ExactVec {
        self.binary(other, Dense::max, Dense::max)
    }

    pub fn scale(&self, c: &BigRational) -> ExactVec {
        if c.is_one() {
            return self.clone();
        }
        if let (Repr::Small(d), Some((n, m))) = (&self.0, small_coeff(c)) {
            if let Some(r) = d.scale(&n, &m) {
                return ExactVec(Repr::Small(r));
            }
        }
        ExactVec::from_big(self.big().scale(c.numer(), c.denom()).unwrap())
    }

    pub fn neg(&self) -> ExactVec {
        self.scale(&-BigRational::one())
    }

    pub fn abs(&self) -> ExactVec {
        match &self.0 {
            Repr::Small(d) => ExactVec(Repr::Small(d.abs())),
            Repr::Big(d) => ExactVec(Repr::Big(d.abs())),
        }
    }

    /// Replace every entry by the average over its cell.
    pub fn average(&self, part: &Partition) -> ExactVec {
        assert_eq!(self.len(), part.atom_count(), "partition of a different space");
        if let Repr::Small(d) = &self.0 {
            if let Some(r) = d.average(part) {
                return ExactVec(Repr::Small(r));
            }
        }
        ExactVec::from_big(self.big().average(part).unwrap())
    }

    pub fn compare(&self, i: usize, other: &ExactVec, j: usize) -> Ordering {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            if let (Some(x), Some(y)) = (a.num[i].checked_mul(b.den), b.num[j].checked_mul(a.den)) {
                return x.cmp(&y);
            }
        }
        self.get(i).cmp(&other.get(j))
    }

    /// First index where `self[k] > other[k]`, if any.
    pub fn first_exceeding(&self, other: &ExactVec) -> Option<usize> {
        assert_eq!(self.len(), other.len());
        (0..self.len()).find(|&k| self.compare(k, other, k) == Ordering::Greater)
    }

    /// First index where the two vectors differ, if any.
    pub fn first_difference(&self, other: &ExactVec) -> Option<usize> {
        assert_eq!(self.len(), other.len());
        (0..self.len()).find(|&k| self.compare(k, other, k) != Ordering::Equal)
    }

    pub fn sum(&self) -> BigRational {
        match &self.0 {
            Repr::Small(d) => {
                let s = d.num.iter().map(|&x| BigInt::from(x)).sum::<BigInt>();
                BigRational::new(s, d.den.into())
            }
            Repr::Big(d) => BigRational::new(d.num.iter().sum(), d.den.clone()),
        }
    }

    /// `Σ self[k] · other[k]`.
    pub fn dot(&self, other: &ExactVec) -> BigRational {
        let a = self.big();
        let b = other.big();
        let s: BigInt = a.num.iter().zip(&b.num).map(|(x, y)| x * y).sum();
        BigRational::new(s, a.den * b.den)
    }

    /// `Σ |self[k]|^power`.
    pub fn sum_abs_pow(&self, power: u32) -> BigRational {
        let a = self.big();
        let s: BigInt = a.num.iter().map(|x| num_traits::pow(x.abs(), power as usize)).sum();
        BigRational::new(s, num_traits::pow(a.den, power as usize))
    }

    pub fn max_abs(&self) -> BigRational {
        match &self.0 {
            Repr::Small(d) => {
                let m = d.num.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
                BigRational::new(BigInt::from(m), d.den.into())
            }
            Repr::Big(d) => {
                let m = d.num.iter().map(|x| x.abs()).max().unwrap_or_default();
                BigRational::new(m, d.den.clone())
            }
        }
    }

    pub fn min_value(&self) -> Option<BigRational> {
        (0..self.len()).min_by(|&a, &b| self.compare(a, self, b)).map(|k| self.get(k))
    }

    /// Permute entries: `out[k] = self[source[k]]`.
    pub fn gather(&self, source: &[usize]) -> ExactVec {
        match &self.0 {
            Repr::Small(d) => ExactVec(Repr::Small(Dense {
                num: source.iter().map(|&k| d.num[k]).collect(),
                den: d.den,
            })),
            Repr::Big(d) => ExactVec(Repr::Big(Dense {
                num: source.iter().map(|&k| d.num[k].clone()).collect(),
                den: d.den.clone(),
            })),
        }
    }

    pub fn is_small(&self) -> bool {
        matches!(self.0, Repr::Small(_))
    }
}

impl PartialEq for ExactVec {
    fn eq(&self, other: &ExactVec) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a == b,
            _ => self.big() == other.big(),
        }
    }
}

impl Eq for ExactVec {}

/// Format a rational as `num/den`, always with an explicit denominator.
pub fn fmt_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        rational(n, d)
    }

    #[test]
    fn normalized_on_construction() {
        let v = ExactVec::from_parts(vec![2, 4, -6], 4);
        assert_eq!(v.denominator(), BigInt::from(2));
        assert_eq!(v.get(2), r(-3, 2));
        assert_eq!(ExactVec::from_parts(vec![0, 0], 9).denominator(), BigInt::one());
    }

    #[test]
    fn overflow_promotes_and_shrinking_demotes() {
        let big = ExactVec::from_parts(vec![i128::MAX / 2, 1], 1);
        let sum = big.add(&big).add(&big);
        assert!(!sum.is_small());
        assert_eq!(sum.get(0), BigRational::from_integer(BigInt::from(i128::MAX / 2) * 3));
        let back = sum.sub(&big).sub(&big).sub(&big);
        assert!(back.is_zero());
        assert!(back.is_small());
    }

    #[test]
    fn compare_and_max() {
        let a = ExactVec::from_rationals(&[r(1, 3), r(-1, 2)]);
        let b = ExactVec::from_rationals(&[r(1, 4), r(0, 1)]);
        assert_eq!(a.first_exceeding(&b), Some(0));
        assert_eq!(a.max(&b).to_rationals(), vec![r(1, 3), r(0, 1)]);
        assert_eq!(a.abs().get(1), r(1, 2));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/6"), Some(r(1, 2)));
        assert_eq!(parse_rational("-4"), Some(r(-4, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(fmt_rational(&r(2, 1)), "2/1");
    }

    proptest! {
        #[test]
        fn arithmetic_matches_bigrational(
            xs in prop::collection::vec((-1000i64..1000, 1i64..50), 1..12),
            ys in prop::collection::vec((-1000i64..1000, 1i64..50), 12),
            c in (-20i64..20, 1i64..20),
        ) {
            let n = xs.len();
            let a: Vec<BigRational> = xs.iter().map(|&(p, q)| r(p, q)).collect();
            let b: Vec<BigRational> = ys[..n].iter().map(|&(p, q)| r(p, q)).collect();
            let c = r(c.0, c.1);
            let va = ExactVec::from_rationals(&a);
            let vb = ExactVec::from_rationals(&b);
            let sum: Vec<_> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let prod: Vec<_> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
            let scaled: Vec<_> = a.iter().map(|x| x * &c).collect();
            prop_assert_eq!(va.add(&vb).to_rationals(), sum);
            prop_assert_eq!(va.mul(&vb).to_rationals(), prod);
            prop_assert_eq!(va.scale(&c).to_rationals(), scaled);
            prop_assert_eq!(va.sub(&va).is_zero(), true);
            prop_assert_eq!(va.dot(&vb), a.iter().zip(&b).map(|(x, y)| x * y).sum::<BigRational>());
        }
    }
}
