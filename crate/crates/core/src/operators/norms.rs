//! `L²` operator norms by power iteration and the Cotlar–Stein bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::heisenberg::AtomSpace;
use crate::operators::linear::{FloatVec, LinearOperator};

/// Residual tolerance relative to the current eigenvalue estimate of `T*T`.
pub const RESIDUAL_TOL: f64 = 1e-13;
pub const MAX_ITERATIONS: usize = 200_000;
const START_SEED: u64 = 0x5eed_0fb1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    pub norm: f64,
    pub iterations: usize,
    /// `‖T*T x − ρx‖` at exit; bounds `|ρ − σ²|` for some singular value `σ`.
    pub residual: f64,
    pub converged: bool,
}

/// Largest singular value of `T` in the `π`-weighted `L²` norm.
///
/// Equal atom weights make this the plain spectral norm. Exactly zero
/// translation-invariant operators are recognised from their kernel and
/// return 0 without iterating.
pub fn operator_norm2(t: &LinearOperator, space: &AtomSpace) -> f64 {
    norm_estimate(t, space).norm
}

pub fn norm_estimate(t: &LinearOperator, space: &AtomSpace) -> NormEstimate {
    let n = t.dim();
    assert_eq!(n, space.atom_count());
    if matches!(t, LinearOperator::Zero(_)) || (t.is_translation_invariant() && t.kernel().is_zero()) {
        return NormEstimate { norm: 0.0, iterations: 0, residual: 0.0, converged: true };
    }
    let ta = t.adjoint();
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut x = FloatVec((0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
    let nx = x.norm();
    x.0.iter_mut().for_each(|v| *v /= nx);
    let mut rho = 0.0;
    let mut residual = f64::INFINITY;
    for it in 1..=MAX_ITERATIONS {
        let z = ta.apply_to(&t.apply_to(&x));
        rho = x.dot(&z);
        residual = z.0.iter().zip(&x.0).map(|(a, b)| (a - rho * b).powi(2)).sum::<f64>().sqrt();
        let nz = z.norm();
        if nz == 0.0 {
            return NormEstimate { norm: 0.0, iterations: it, residual: 0.0, converged: true };
        }
        if residual <= RESIDUAL_TOL * rho.max(f64::MIN_POSITIVE) {
            return NormEstimate { norm: rho.max(0.0).sqrt(), iterations: it, residual, converged: true };
        }
        x = FloatVec(z.0.into_iter().map(|v| v / nz).collect());
    }
    NormEstimate { norm: rho.max(0.0).sqrt(), iterations: MAX_ITERATIONS, residual, converged: false }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CotlarReport {
    /// `max_μ Σ_λ max(‖T_μ T_λ*‖, ‖T_μ* T_λ‖)^{1/2}`.
    pub bound: f64,
    /// `‖Σ_λ T_λ‖₂`.
    pub sum_norm: f64,
    pub holds: bool,
}

/// Square-root-sum form of the Cotlar–Stein almost-orthogonality estimate.
pub fn cotlar_bound(family: &[LinearOperator], space: &AtomSpace) -> CotlarReport {
    assert!(!family.is_empty(), "empty family");
    let adj: Vec<LinearOperator> = family.iter().map(|t| t.adjoint()).collect();
    let mut bound = 0.0f64;
    for (mu, tm) in family.iter().enumerate() {
        let mut row = 0.0;
        for (l, tl) in family.iter().enumerate() {
            let a = operator_norm2(&tm.then_after(&adj[l]), space);
            let b = operator_norm2(&adj[mu].then_after(tl), space);
            row += a.max(b).sqrt();
        }
        bound = bound.max(row);
    }
    let sum_norm = operator_norm2(&LinearOperator::sum(family.to_vec()), space);
    CotlarReport { bound, sum_norm, holds: sum_norm <= bound + 1e-9 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coweights::Coweight;
    use crate::filtration::{Filtration, PartitionSpec};
    use crate::heisenberg::ModelConfig;
    use crate::operators::analysis::{d_op, difference_grid, difference_op, expectation_operator, l_op, DifferenceKind};
    use nalgebra::DMatrix;

    fn dense(t: &LinearOperator, space: &AtomSpace) -> DMatrix<f64> {
        let n = t.dim();
        let mut m = DMatrix::zeros(n, n);
        for (r, c, v) in t.to_sparse(space).entries() {
            m[(*r, *c)] = num_traits::ToPrimitive::to_f64(v).unwrap();
        }
        m
    }

    fn svd_norm(t: &LinearOperator, space: &AtomSpace) -> f64 {
        dense(t, space).singular_values().max()
    }

    #[test]
    fn projections_have_norm_one() {
        let f = Filtration::from_config(ModelConfig::new(2, 0, 0, 1, 1)).unwrap();
        let s = f.space();
        assert!((operator_norm2(&LinearOperator::Identity(s.atom_count()), s) - 1.0).abs() < 1e-9);
        for spec in [PartitionSpec::level(0, 0), PartitionSpec::level(1, 1), PartitionSpec::Row(1), PartitionSpec::Col(2)] {
            let e = expectation_operator(&f, &spec).unwrap();
            assert!((operator_norm2(&e, s) - 1.0).abs() < 1e-9);
        }
        assert_eq!(operator_norm2(&LinearOperator::Zero(s.atom_count()), s), 0.0);
    }

    #[test]
    fn power_iteration_matches_dense_svd() {
        let f = Filtration::from_config(ModelConfig::new(2, 0, 0, 1, 1)).unwrap();
        let s = f.space();
        let c = *f.config();
        let dm = d_op(&f, Coweight::new(1, 1)).unwrap();
        for l in c.grid() {
            for lp in c.grid() {
                let t = LinearOperator::compose(vec![
                    difference_op(&f, DifferenceKind::D(l)).unwrap(),
                    dm.clone(),
                    difference_op(&f, DifferenceKind::D(lp)).unwrap(),
                ]);
                let est = norm_estimate(&t, s);
                assert!(est.converged);
                assert!((est.norm - svd_norm(&t, s)).abs() < 1e-9, "{l} {lp}");
            }
        }
        let t = dm.pow(2).then_after(&l_op(&f, 1).unwrap());
        assert!((operator_norm2(&t, s) - svd_norm(&t, s)).abs() < 1e-9);
    }

    #[test]
    fn cotlar_examples() {
        let f = Filtration::from_config(ModelConfig::new(2, 0, 0, 1, 1)).unwrap();
        let s = f.space();
        let c = *f.config();
        let single = vec![d_op(&f, Coweight::new(1, 1)).unwrap()];
        let r = cotlar_bound(&single, s);
        assert!((r.bound - r.sum_norm).abs() < 1e-9 && r.holds);

        let ls: Vec<_> = (c.i0..=c.a).map(|i| l_op(&f, i).unwrap()).collect();
        let r = cotlar_bound(&ls, s);
        assert!((r.sum_norm - 1.0).abs() < 1e-9 && r.holds);

        let dd: Vec<_> = difference_grid(&c)
            .into_iter()
            .map(|l| {
                difference_op(&f, DifferenceKind::D(l))
                    .unwrap()
                    .then_after(&difference_op(&f, DifferenceKind::Dstar(l)).unwrap())
            })
            .collect();
        let r = cotlar_bound(&dd, s);
        assert!((r.sum_norm - 1.0).abs() < 1e-9 && r.holds);
    }
}
