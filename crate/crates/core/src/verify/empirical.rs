//! Empirical `Lᵖ` ratio suites: finiteness, stability across seeds and
//! uniformity against the calibration grid `(i0, j0, i0+1, j0+1)`.

use num_traits::One;
use serde_json::json;

use super::random::{derive_seed, predictable_signs, random_integer_function};
use super::{CheckKind, CheckResult, Ctx};
use crate::error::Result;
use crate::exact::ExactVec;
use crate::filtration::{Filtration, PartitionSpec};
use crate::heisenberg::ModelConfig;
use crate::operators::analysis::{martingale_transform, maximal, square, MaximalKind, SquareKind};

/// `(label, p)`.
pub const EXPONENTS: [(&str, f64); 3] = [("p1.5", 1.5), ("p2", 2.0), ("p3", 3.0)];
pub const SEEDS: usize = 5;
/// `(max − min) / max` of the per-seed maximal ratios.
pub const VARIATION_LIMIT: f64 = 0.10;
/// Allowed factor between the largest ratio on the run grid and on the calibration grid.
pub const GROWTH_LIMIT: f64 = 2.0;

/// Numerator and denominator values whose `Lᵖ` norms form the ratio.
type Statistic<'s> = dyn Fn(&Filtration, &ExactVec, u64) -> Result<(Vec<f64>, Vec<f64>)> + Sync + 's;

fn lp(values: &[f64], p: f64) -> f64 {
    let n = values.len() as f64;
    (values.iter().map(|x| x.abs().powf(p)).sum::<f64>() / n).powf(1.0 / p)
}

pub fn calibration_config(c: &ModelConfig) -> ModelConfig {
    ModelConfig::new(c.p, c.i0, c.j0, c.i0 + 1, c.j0 + 1)
}

/// Largest ratio per seed and exponent: `out[seed][exponent]`.
fn max_ratios(filt: &Filtration, seed: u64, samples: usize, tag: &str, stat: &Statistic) -> Result<Vec<[f64; 3]>> {
    let spec = PartitionSpec::Level(filt.config().top_level());
    let mut out = Vec::with_capacity(SEEDS);
    for s in 0..SEEDS {
        let seed_s = derive_seed(seed, &format!("{tag} seed {s}"));
        let mut best = [0.0f64; 3];
        for k in 0..samples {
            let sample_seed = derive_seed(seed_s, &format!("sample {k}"));
            let f = random_integer_function(filt, sample_seed, Some(&spec), false)?;
            if f.is_zero() {
                continue;
            }
            let (num, den) = stat(filt, &f, sample_seed)?;
            for (e, (_, p)) in EXPONENTS.iter().enumerate() {
                let d = lp(&den, *p);
                let r = if d == 0.0 { f64::INFINITY } else { lp(&num, *p) / d };
                best[e] = best[e].max(r);
            }
        }
        out.push(best);
    }
    Ok(out)
}

fn ratio_checks(ctx: &Ctx, prefix: &str, stat: &Statistic) -> Result<Vec<CheckResult>> {
    let start = std::time::Instant::now();
    let samples = ctx.opts.samples;
    let run = max_ratios(ctx.filt, ctx.seed, samples, prefix, stat)?;
    let cal_config = calibration_config(ctx.config());
    let cal = if cal_config == *ctx.config() {
        run.clone()
    } else {
        let cal_filt = Filtration::from_config(cal_config)?;
        max_ratios(&cal_filt, ctx.seed, samples, prefix, stat)?
    };
    let ms = if ctx.opts.timings { start.elapsed().as_millis() as u64 } else { 0 };
    let mut out = Vec::new();
    for (e, (label, _)) in EXPONENTS.iter().enumerate() {
        let per_seed: Vec<f64> = run.iter().map(|r| r[e]).collect();
        let cal_seed: Vec<f64> = cal.iter().map(|r| r[e]).collect();
        let hi = per_seed.iter().cloned().fold(f64::MIN, f64::max);
        let lo = per_seed.iter().cloned().fold(f64::MAX, f64::min);
        let cal_hi = cal_seed.iter().cloned().fold(f64::MIN, f64::max);
        let finite = per_seed.iter().chain(&cal_seed).all(|x| x.is_finite() && *x > 0.0);
        let variation = if hi > 0.0 { (hi - lo) / hi } else { f64::INFINITY };
        let growth = hi / cal_hi;
        let uniform = growth < GROWTH_LIMIT && growth > 1.0 / GROWTH_LIMIT;
        let passed = finite && variation < VARIATION_LIMIT && uniform;
        let mut r = CheckResult::new(format!("{prefix}-{label}"), CheckKind::Empirical, passed)
            .with_error(format!("{variation:.6}"))
            .with_witness(json!({
                "max_ratio_per_seed": per_seed,
                "calibration_grid": [cal_config.i0, cal_config.j0, cal_config.i_max, cal_config.j_max],
                "calibration_max_per_seed": cal_seed,
                "variation": variation,
                "growth": growth,
            }))
            .with_detail(format!(
                "max ratio {hi:.6}; seed variation {variation:.4} (limit {VARIATION_LIMIT}); growth over calibration grid \
                 {growth:.4} (limit {GROWTH_LIMIT}); {SEEDS} seeds x {samples} functions measurable at the top grid level"
            ));
        r.ms = ms;
        out.push(r);
    }
    Ok(out)
}

pub(super) fn thm1_empirical(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let stat = |filt: &Filtration, f: &ExactVec, _: u64| -> Result<(Vec<f64>, Vec<f64>)> {
        Ok((maximal(filt, MaximalKind::Mstar, f)?.to_f64(), f.to_f64()))
    };
    ratio_checks(ctx, "Mstar", &stat)
}

pub(super) fn thm2_empirical(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    if ctx.config().interior().is_empty() {
        return Ok(vec![CheckResult::skipped("S", CheckKind::Empirical, "grid has no interior point")]);
    }
    let upper = |filt: &Filtration, f: &ExactVec, _: u64| -> Result<(Vec<f64>, Vec<f64>)> {
        Ok((square(filt, SquareKind::S, f)?.values, f.to_f64()))
    };
    let lower = |filt: &Filtration, f: &ExactVec, _: u64| -> Result<(Vec<f64>, Vec<f64>)> {
        Ok((f.to_f64(), square(filt, SquareKind::S, f)?.values))
    };
    let mut out = ratio_checks(ctx, "S-upper", &upper)?;
    out.extend(ratio_checks(ctx, "S-lower", &lower)?);
    Ok(out)
}

pub(super) fn transform_bound(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    if ctx.config().interior().is_empty() {
        return Ok(vec![CheckResult::skipped("transform", CheckKind::Empirical, "grid has no interior point")]);
    }
    let mut out = Vec::new();
    for m in [1u32, 2] {
        let stat = move |filt: &Filtration, f: &ExactVec, seed: u64| -> Result<(Vec<f64>, Vec<f64>)> {
            let a = predictable_signs(filt, seed, &num_rational::BigRational::one())?;
            Ok((martingale_transform(filt, &a, m, f)?.to_f64(), f.to_f64()))
        };
        out.extend(ratio_checks(ctx, &format!("m{m}"), &stat)?);
    }
    Ok(out)
}
