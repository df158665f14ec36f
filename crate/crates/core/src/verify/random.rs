//! Seeded test-function and coefficient generators.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coweights::{LAMBDA1, LAMBDA2};
use crate::error::{Error, Result};
use crate::exact::ExactVec;
use crate::filtration::{Filtration, PartitionSpec};
use crate::operators::analysis::Coefficients;

const MAX_NUMERATOR: i64 = 8;
const DENOMINATORS: [i64; 4] = [1, 2, 3, 4];

/// Stable stream id for a text tag (FNV-1a), so derived seeds never depend on `std` hashing.
pub fn stream_id(tag: &str) -> u64 {
    tag.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Independent generator for `(seed, tag)`.
pub fn rng_for(seed: u64, tag: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(tag));
    rng
}

/// A child seed for `(seed, tag)`.
pub fn derive_seed(seed: u64, tag: &str) -> u64 {
    rng_for(seed, tag).random()
}

/// Values `n/d` with `|n| ≤ 8` and `d ∈ {1,2,3,4}`, constant on the cells of
/// `measurability` when given.
pub fn random_function(
    filt: &Filtration,
    seed: u64,
    measurability: Option<&PartitionSpec>,
    nonnegative: bool,
) -> Result<ExactVec> {
    let n = filt.space().atom_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = if nonnegative { 0 } else { -MAX_NUMERATOR };
    let mut draw = || {
        let num = rng.random_range(lo..=MAX_NUMERATOR);
        let den = DENOMINATORS[rng.random_range(0..DENOMINATORS.len())];
        BigRational::new(BigInt::from(num), BigInt::from(den))
    };
    let values: Vec<BigRational> = match measurability {
        None => (0..n).map(|_| draw()).collect(),
        Some(spec) => {
            let part = filt.partition(spec)?;
            let cell_values: Vec<BigRational> = (0..part.cell_count()).map(|_| draw()).collect();
            part.cell_of().iter().map(|&c| cell_values[c as usize].clone()).collect()
        }
    };
    Ok(ExactVec::from_rationals(&values))
}

/// Integer values in `[-8, 8]` (or `[0, 8]`), constant on the cells of `measurability`.
pub fn random_integer_function(
    filt: &Filtration,
    seed: u64,
    measurability: Option<&PartitionSpec>,
    nonnegative: bool,
) -> Result<ExactVec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = if nonnegative { 0 } else { -MAX_NUMERATOR };
    let cells = match measurability {
        Some(spec) => Some(filt.partition(spec)?),
        None => None,
    };
    let count = cells.as_ref().map_or(filt.space().atom_count(), |p| p.cell_count());
    let draws: Vec<i64> = (0..count).map(|_| rng.random_range(lo..=MAX_NUMERATOR)).collect();
    let values: Vec<i64> = match cells {
        Some(part) => part.cell_of().iter().map(|&c| draws[c as usize]).collect(),
        None => draws,
    };
    Ok(ExactVec::from_i64s(&values))
}

/// For each interior `λ`, a `F_{λ−λ₁−λ₂}`-measurable coefficient with values
/// `bound · n/8`, `|n| ≤ 8`.
pub fn predictable_coefficients(filt: &Filtration, seed: u64, bound: &BigRational) -> Result<Coefficients> {
    coefficients_with(filt, seed, bound, |rng| {
        BigRational::new(BigInt::from(rng.random_range(-MAX_NUMERATOR..=MAX_NUMERATOR)), BigInt::from(MAX_NUMERATOR))
    })
}

/// Predictable coefficients with every cell value `±bound`, the extreme points of the
/// coefficient ball; `‖Tf‖` is convex in `a`, so its supremum is attained there.
pub fn predictable_signs(filt: &Filtration, seed: u64, bound: &BigRational) -> Result<Coefficients> {
    coefficients_with(filt, seed, bound, |rng| {
        BigRational::from_integer(BigInt::from(if rng.random_bool(0.5) { 1 } else { -1 }))
    })
}

fn coefficients_with(
    filt: &Filtration,
    seed: u64,
    bound: &BigRational,
    mut unit: impl FnMut(&mut ChaCha8Rng) -> BigRational,
) -> Result<Coefficients> {
    if !bound.is_positive() {
        return Err(Error::InvalidConfig("coefficient bound must be positive".into()));
    }
    let mut values = std::collections::BTreeMap::new();
    for l in filt.config().interior() {
        let spec = PartitionSpec::Level(l - LAMBDA1 - LAMBDA2);
        let part = filt.partition(&spec)?;
        let mut rng = rng_for(seed, &format!("coefficient {l}"));
        let cell_values: Vec<BigRational> = (0..part.cell_count()).map(|_| bound * unit(&mut rng)).collect();
        let atoms: Vec<BigRational> = part.cell_of().iter().map(|&c| cell_values[c as usize].clone()).collect();
        values.insert(l, ExactVec::from_rationals(&atoms));
    }
    Ok(Coefficients { bound: bound.clone(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coweights::Coweight;
    use crate::exact::rational;
    use crate::heisenberg::ModelConfig;

    fn filt() -> Filtration {
        Filtration::from_config(ModelConfig::new(2, 0, 0, 1, 1)).unwrap()
    }

    #[test]
    fn deterministic() {
        let f = filt();
        let spec = PartitionSpec::level(1, 0);
        assert_eq!(
            random_function(&f, 9, Some(&spec), false).unwrap(),
            random_function(&f, 9, Some(&spec), false).unwrap()
        );
        assert_ne!(random_function(&f, 9, None, false).unwrap(), random_function(&f, 10, None, false).unwrap());
        assert_eq!(derive_seed(3, "a"), derive_seed(3, "a"));
        assert_ne!(derive_seed(3, "a"), derive_seed(3, "b"));
    }

    #[test]
    fn measurable_and_nonnegative() {
        let f = filt();
        for l in f.config().representable_levels() {
            let spec = PartitionSpec::Level(l);
            let g = random_function(&f, 4, Some(&spec), true).unwrap();
            assert_eq!(f.cond_expect(&g, &spec).unwrap(), g);
            assert!(g.min_value().unwrap() >= rational(0, 1));
            let h = random_integer_function(&f, 4, Some(&spec), false).unwrap();
            assert_eq!(f.cond_expect(&h, &spec).unwrap(), h);
        }
        let g = random_integer_function(&f, 1, None, true).unwrap();
        assert!(g.min_value().unwrap() >= rational(0, 1));
        assert!(g.max_abs() <= rational(8, 1));
    }

    #[test]
    fn coefficients_are_predictable_and_bounded() {
        let f = Filtration::from_config(ModelConfig::new(2, 0, 0, 2, 2)).unwrap();
        let a = predictable_coefficients(&f, 5, &rational(1, 1)).unwrap();
        assert_eq!(a.values.len(), 4);
        assert!(a.values.contains_key(&Coweight::new(2, 2)));
        a.validate(&f).unwrap();
        assert!(a.values.values().all(|v| v.max_abs() <= rational(1, 1)));
        assert_eq!(a, predictable_coefficients(&f, 5, &rational(1, 1)).unwrap());
        let half = predictable_coefficients(&f, 5, &rational(1, 2)).unwrap();
        assert!(half.values.values().all(|v| v.max_abs() <= rational(1, 2)));
        assert!(predictable_coefficients(&f, 5, &rational(0, 1)).is_err());
    }

    #[test]
    fn signs_sit_on_the_bound() {
        let f = Filtration::from_config(ModelConfig::new(3, 0, 0, 1, 1)).unwrap();
        let a = predictable_signs(&f, 2, &rational(3, 2)).unwrap();
        a.validate(&f).unwrap();
        for v in a.values.values() {
            assert!((0..v.len()).all(|k| v.get(k) == rational(3, 2) || v.get(k) == rational(-3, 2)));
        }
        assert!(predictable_signs(&f, 2, &rational(-1, 1)).is_err());
    }
}
