//! Exact atomwise and `L²` inequalities.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::json;

use super::{one_minus_q_inv, show, CheckKind, CheckResult, Ctx};
use crate::coweights::{Coweight, LAMBDA1, LAMBDA2};
use crate::error::Result;
use crate::exact::ExactVec;
use crate::filtration::PartitionSpec;
use crate::operators::analysis::{col_op, maximal, norm2_squared, row_op, MaximalKind};
use crate::operators::LinearOperator;

/// Witness for the first atom where `small > large`.
fn violation(small: &ExactVec, large: &ExactVec) -> Option<(usize, BigRational, BigRational)> {
    small.first_exceeding(large).map(|k| (k, small.get(k), large.get(k)))
}

pub(super) fn lemma2_positivity(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let c = *ctx.config();
    let check = ctx.timed(|| {
        let mut inst = Vec::new();
        for l in c.representable_levels() {
            for k in 1..=c.c {
                let (mu, mupp) = (l + k * LAMBDA1, l + k * LAMBDA2);
                if ctx.rep(mu) && ctx.rep(mupp) {
                    inst.push((l, k, ctx.e(mupp)?.then_after(&ctx.e(mu)?).pow(2), ctx.e(l)?.scale(&one_minus_q_inv(ctx))));
                }
            }
        }
        if inst.is_empty() {
            return Ok(CheckResult::skipped("lower-bound", CheckKind::Exact, "no (lambda, k) with both corners representable"));
        }
        let funcs = ctx.functions("lower-bound", ctx.opts.inequality_samples, None, true)?;
        for (s, f) in funcs.iter().enumerate() {
            for (l, k, lhs, rhs) in &inst {
                if let Some((atom, small, large)) = violation(&rhs.apply(f), &lhs.apply(f)) {
                    return Ok(CheckResult::new("lower-bound", CheckKind::Exact, false)
                        .with_error(show(&(&small - &large)))
                        .with_witness(json!({
                            "lambda": l.to_string(), "k": k, "f": {"sample": s}, "atom": atom,
                            "lhs": show(&large), "rhs": show(&small),
                        })));
                }
            }
        }
        Ok(CheckResult::new("lower-bound", CheckKind::Exact, true).with_error("0").with_detail(format!(
            "{} (lambda, k) pairs x {} non-negative functions, zero violations",
            inst.len(),
            funcs.len()
        )))
    })?;
    Ok(vec![check])
}

/// For `f` measurable at `μ` and each grid `λ`: `μ' = λ ∨ μ`, `s = ⟨μ'−λ, α₀⟩`,
/// `ν = λ + sλ₁`, `ν'' = λ + sλ₂`. The default exponents keep `ν`, `ν''`
/// representable for every grid `μ`; levels that fall outside are skipped and counted.
pub(super) fn thm1_pointwise(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let c = *ctx.config();
    let grid = c.grid();
    let n_samples = ctx.opts.inequality_samples;
    let mut chain_fail = None;
    let mut bound_fail = None;
    let mut max_fail = None;
    let mut comparisons = 0usize;
    let mut constrained = 0usize;
    let start = std::time::Instant::now();
    let cq = one_minus_q_inv(ctx);
    for s in 0..n_samples {
        let mu = grid[s % grid.len()];
        let seed = super::derive_seed(ctx.seed, &format!("pointwise #{s}"));
        let f = super::random_function(ctx.filt, seed, Some(&PartitionSpec::Level(mu)), true)?;
        for &l in &grid {
            let top = l.join(mu);
            let steps = top.level() - l.level();
            let (nu, nupp) = (l + steps * LAMBDA1, l + steps * LAMBDA2);
            if !(ctx.rep(nu) && ctx.rep(nupp)) {
                constrained += 1;
                continue;
            }
            comparisons += 1;
            let lhs = ctx.e(nupp)?.then_after(&ctx.e(nu)?).pow(2).apply(&f);
            let chain = LinearOperator::compose(vec![
                row_op(ctx.filt, l.i)?,
                col_op(ctx.filt, l.j)?,
                row_op(ctx.filt, l.i)?,
                col_op(ctx.filt, l.j)?,
            ])
            .apply(&f);
            if chain_fail.is_none() {
                if let Some(atom) = lhs.first_difference(&chain) {
                    chain_fail = Some(json!({
                        "lambda": l.to_string(), "mu": mu.to_string(), "f": {"sample": s}, "atom": atom,
                        "lhs": show(&lhs.get(atom)), "rhs": show(&chain.get(atom)),
                    }));
                }
            }
            let low = ctx.e(l)?.apply(&f).scale(&cq);
            if bound_fail.is_none() {
                if let Some((atom, a, b)) = violation(&low, &lhs) {
                    bound_fail = Some(json!({
                        "lambda": l.to_string(), "mu": mu.to_string(), "f": {"sample": s}, "atom": atom,
                        "lower": show(&a), "upper": show(&b),
                    }));
                }
            }
        }
        let m = maximal(ctx.filt, MaximalKind::Mstar, &f)?.scale(&cq);
        let mut lr = f.clone();
        for kind in [MaximalKind::Rstar, MaximalKind::Lstar, MaximalKind::Rstar, MaximalKind::Lstar] {
            lr = maximal(ctx.filt, kind, &lr)?;
        }
        if max_fail.is_none() {
            if let Some((atom, a, b)) = violation(&m, &lr) {
                max_fail = Some(json!({
                    "mu": mu.to_string(), "f": {"sample": s}, "atom": atom,
                    "lhs": show(&a), "rhs": show(&b),
                }));
            }
        }
    }
    let ms = if ctx.opts.timings { start.elapsed().as_millis() as u64 } else { 0 };
    let padding = format!(
        "f measurable at grid levels mu in turn; nu = lambda + <mu v lambda - lambda, a0> lambda1 stays within \
         i <= A, j <= B; {constrained} (lambda, f) pairs outside the representable range were skipped"
    );
    let make = |name: &str, fail: Option<serde_json::Value>, what: &str| {
        let mut r = match fail {
            None => CheckResult::new(name, CheckKind::Exact, true)
                .with_error("0")
                .with_detail(format!("{what}; {n_samples} non-negative functions, {comparisons} comparisons; {padding}")),
            Some(w) => CheckResult::new(name, CheckKind::Exact, false).with_error("1").with_witness(w).with_detail(padding.clone()),
        };
        r.ms = ms;
        r
    };
    Ok(vec![
        make("chain", chain_fail, "(E(nu'')E(nu))^2 f = E(row i)E(col j)E(row i)E(col j) f"),
        make("lemma2-bound", bound_fail, "(1-1/q) E(lambda) f <= (E(nu'')E(nu))^2 f"),
        make("maximal", max_fail, "(1-1/q) M*f <= L*R*L*R*f"),
    ])
}

pub(super) fn doob(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let space = ctx.space();
    let four = BigRational::from_integer(4.into());
    let mut out = Vec::new();
    for (name, kind) in [("Lstar", MaximalKind::Lstar), ("Rstar", MaximalKind::Rstar)] {
        out.push(ctx.timed(|| {
            let funcs = ctx.functions(name, ctx.opts.inequality_samples, None, false)?;
            let mut worst = 0.0f64;
            for (k, f) in funcs.iter().enumerate() {
                let lhs = norm2_squared(space, &maximal(ctx.filt, kind, f)?);
                let rhs = norm2_squared(space, f) * &four;
                if lhs > rhs {
                    return Ok(CheckResult::new(name, CheckKind::Exact, false)
                        .with_error(show(&(&lhs - &rhs)))
                        .with_witness(json!({"f": {"sample": k}, "maximal_sq": show(&lhs), "four_norm_sq": show(&rhs)})));
                }
                if !rhs.is_zero() {
                    worst = worst.max((&lhs * &four / &rhs).to_f64().unwrap_or(f64::NAN).sqrt());
                }
            }
            Ok(CheckResult::new(name, CheckKind::Exact, true).with_error("0").with_detail(format!(
                "|{name} f|_2^2 <= 4 |f|_2^2 for {} functions; largest |{name} f|_2 / |f|_2 = {worst:.6}",
                funcs.len()
            )))
        })?);
    }
    Ok(out)
}

pub(super) fn prop1_decay(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let c = *ctx.config();
    let q = ctx.q();
    let four = BigRational::from_integer(4.into());
    let mut out = Vec::new();
    for (a, b, suffix) in [(LAMBDA1, LAMBDA2, ""), (LAMBDA2, LAMBDA1, "-swapped")] {
        let name = format!("decay{suffix}");
        out.push(ctx.timed(|| {
            let mut combos = 0usize;
            let mut worst = 0.0f64;
            for l in c.representable_levels() {
                for j in 1..=c.c {
                    let low = l - j * a;
                    if !ctx.rep(low) {
                        continue;
                    }
                    let ks: Vec<(i64, Coweight)> =
                        (j..=c.a + c.b).map(|k| (k, l - k * (a - b))).filter(|(_, t)| ctx.rep(*t)).collect();
                    if ks.is_empty() {
                        continue;
                    }
                    let tag = format!("{name} {l} {j}");
                    let gs = ctx.functions(&tag, ctx.opts.samples, Some(&PartitionSpec::Level(l)), false)?;
                    let proj = ctx.e(low)?;
                    for (s, g) in gs.iter().enumerate() {
                        let f = g.sub(&proj.apply(g));
                        let nf = norm2_squared(ctx.space(), &f);
                        for (k, target) in &ks {
                            let ef = ctx.e(*target)?.apply(&f);
                            let lhs = norm2_squared(ctx.space(), &ef);
                            let factor = num_traits::pow(q.recip(), (k - j + 1) as usize);
                            let rhs = &four * &factor * &nf;
                            if lhs > rhs {
                                return Ok(CheckResult::new(name.clone(), CheckKind::Exact, false)
                                    .with_error(show(&(&lhs - &rhs)))
                                    .with_witness(json!({
                                        "lambda": l.to_string(), "j": j, "k": k, "f": {"sample": s},
                                        "lhs": show(&lhs), "rhs": show(&rhs),
                                    })));
                            }
                            if !nf.is_zero() {
                                worst = worst.max((&lhs / (&factor * &nf)).to_f64().unwrap_or(f64::NAN));
                            }
                        }
                    }
                    combos += ks.len();
                }
            }
            if combos == 0 {
                return Ok(CheckResult::skipped(name.clone(), CheckKind::Exact, "no admissible (lambda, j, k)"));
            }
            Ok(CheckResult::new(name.clone(), CheckKind::Exact, true).with_error("0").with_detail(format!(
                "{combos} (lambda, j, k) combinations x {} functions; largest |E f|^2 / (q^-(k-j+1) |f|^2) = {worst:.6} (bound 4)",
                ctx.opts.samples
            )))
        })?);
    }
    Ok(out)
}
