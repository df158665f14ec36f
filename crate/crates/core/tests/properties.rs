use blp_core::exact::rational;
use blp_core::operators::analysis::{
    calderon_sum, d_op, martingale_transform, maximal, norm2_squared, Coefficients, MaximalKind,
};
use blp_core::verify::{predictable_coefficients, random_function};
use blp_core::{Coweight, ExactVec, Filtration, ModelConfig, PartitionSpec};
use proptest::prelude::*;

/// Small models with at most a few hundred atoms.
fn small_config() -> impl Strategy<Value = ModelConfig> {
    prop_oneof![
        Just(ModelConfig::new(2, 0, 0, 1, 1)),
        Just(ModelConfig::new(2, 0, 0, 1, 2)),
        Just(ModelConfig::new(2, 1, 0, 2, 1)),
        Just(ModelConfig::new(3, 0, 0, 1, 1)),
    ]
}

fn level_pair(c: &ModelConfig, a: usize, b: usize) -> (Coweight, Coweight) {
    let levels = c.representable_levels();
    (levels[a % levels.len()], levels[b % levels.len()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn expectation_is_a_contraction_and_keeps_the_mean(c in small_config(), a in 0usize..64, seed in any::<u64>()) {
        let filt = Filtration::from_config(c).unwrap();
        let (l, _) = level_pair(&c, a, 0);
        let f = random_function(&filt, seed, None, false).unwrap();
        let spec = PartitionSpec::Level(l);
        let e = filt.cond_expect(&f, &spec).unwrap();
        prop_assert_eq!(e.sum(), f.sum());
        prop_assert!(norm2_squared(filt.space(), &e) <= norm2_squared(filt.space(), &f));
        prop_assert_eq!(filt.cond_expect(&e, &spec).unwrap(), e);
    }

    #[test]
    fn nested_levels_tower(c in small_config(), a in 0usize..64, b in 0usize..64, seed in any::<u64>()) {
        let filt = Filtration::from_config(c).unwrap();
        let (l, m) = level_pair(&c, a, b);
        let (lo, hi) = (Coweight::new(l.i.min(m.i), l.j.min(m.j)), l.join(m));
        prop_assume!(c.representable(lo) && c.representable(hi));
        let f = random_function(&filt, seed, None, false).unwrap();
        let inner = filt.cond_expect(&f, &PartitionSpec::Level(hi)).unwrap();
        prop_assert_eq!(
            filt.cond_expect(&inner, &PartitionSpec::Level(lo)).unwrap(),
            filt.cond_expect(&f, &PartitionSpec::Level(lo)).unwrap()
        );
    }

    #[test]
    fn calderon_reproduces(c in small_config(), seed in any::<u64>()) {
        let filt = Filtration::from_config(c).unwrap();
        let f = random_function(&filt, seed, None, false).unwrap();
        prop_assert_eq!(calderon_sum(&filt, &f).unwrap(), f);
    }

    #[test]
    fn mstar_dominates_its_averages(c in small_config(), seed in any::<u64>()) {
        let filt = Filtration::from_config(c).unwrap();
        // No representable level is the atom partition, so f ≤ M*f needs f measurable on the grid.
        let f = random_function(&filt, seed, Some(&PartitionSpec::Level(c.top_level())), true).unwrap();
        let m = maximal(&filt, MaximalKind::Mstar, &f).unwrap();
        prop_assert_eq!(f.first_exceeding(&m), None);
        let e = filt.cond_expect(&f, &PartitionSpec::Level(c.base_level())).unwrap();
        prop_assert_eq!(e.first_exceeding(&m), None);
    }

    #[test]
    fn predictable_coefficients_commute_with_d(c in small_config(), seed in any::<u64>(), fseed in any::<u64>()) {
        let filt = Filtration::from_config(c).unwrap();
        let a = predictable_coefficients(&filt, seed, &rational(1, 1)).unwrap();
        let f = random_function(&filt, fseed, None, false).unwrap();
        for (l, al) in &a.values {
            let d = d_op(&filt, *l).unwrap();
            prop_assert_eq!(d.apply(&al.mul(&f)), al.mul(&d.apply(&f)));
        }
    }

    #[test]
    fn unit_transform_telescopes(c in small_config(), seed in any::<u64>()) {
        let filt = Filtration::from_config(c).unwrap();
        let f = random_function(&filt, seed, None, false).unwrap();
        let t = martingale_transform(&filt, &Coefficients::constant(&filt, &rational(1, 1)), 1, &f).unwrap();
        let e = |i, j| filt.cond_expect(&f, &PartitionSpec::level(i, j)).unwrap();
        let expect: ExactVec = e(c.i_max, c.j_max).sub(&e(c.i0, c.j_max)).sub(&e(c.i_max, c.j0)).add(&e(c.i0, c.j0));
        prop_assert_eq!(t, expect);
    }
}
