//! Suite catalog: every identity and inequality of the theory as an exact or
//! empirical check against the finite model, with seeded inputs and
//! deterministic reports.

mod algebra;
mod combinatorial;
mod empirical;
mod inequalities;
pub mod random;
pub mod report;
mod spectral;

use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::coweights::Coweight;
use crate::error::{Error, Result};
use crate::exact::ExactVec;
use crate::filtration::{Filtration, PartitionSpec};
use crate::heisenberg::{AtomSpace, ModelConfig};
use crate::operators::analysis::{join_op, level_op};
use crate::operators::LinearOperator;

pub use random::{derive_seed, predictable_coefficients, random_function, random_integer_function};
pub use report::{CheckKind, CheckResult, ConfigEcho, Status, SuiteReport, Summary};

/// Every suite name, in catalog order.
pub const SUITES: &[&str] = &[
    "prop0-nesting",
    "lemma1-eq1",
    "lemma1-eq23",
    "lemma4-eq6",
    "lemma3-eq7",
    "lemma5",
    "lemma2-eq8",
    "lemma2-positivity",
    "thm1-pointwise",
    "thm1-empirical",
    "doob",
    "eq10-isometry",
    "prop2-calderon",
    "eq22",
    "prop1-decay",
    "prop3-decay",
    "eq46-48",
    "thm2-reconstruction",
    "thm2-empirical",
    "transform-bound",
    "f4-fails",
    "cotlar",
    "plane",
    "cross-model",
];

/// The zero-tolerance identity suites.
pub const EXACT_IDENTITY_SUITES: &[&str] = &[
    "prop0-nesting",
    "lemma1-eq1",
    "lemma1-eq23",
    "lemma4-eq6",
    "lemma3-eq7",
    "lemma5",
    "lemma2-eq8",
    "eq10-isometry",
    "prop2-calderon",
    "eq22",
    "eq46-48",
    "thm2-reconstruction",
    "f4-fails",
];

pub const EMPIRICAL_SUITES: &[&str] = &["thm1-empirical", "thm2-empirical", "transform-bound"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Random functions per exact identity check.
    pub samples: usize,
    /// Non-negative functions for the pointwise inequalities and Doob.
    pub inequality_samples: usize,
    /// Fill in `ms`; off by default so reports are byte-reproducible.
    pub timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { samples: 20, inequality_samples: 100, timings: false }
    }
}

pub fn is_suite(name: &str) -> bool {
    name == "all" || SUITES.contains(&name)
}

pub fn run_suite(name: &str, config: &ModelConfig, seed: u64) -> Result<SuiteReport> {
    run_suite_with(name, config, seed, &RunOptions::default())
}

/// Runs one suite, or all of them for `"all"`. Check names are `suite/check`.
pub fn run_suite_with(name: &str, config: &ModelConfig, seed: u64, opts: &RunOptions) -> Result<SuiteReport> {
    if !is_suite(name) {
        return Err(Error::UnknownSuite(name.to_string()));
    }
    config.validate()?;
    let filt = Filtration::from_config(*config)?;
    run_on(name, &filt, seed, opts)
}

/// As [`run_suite_with`] on an already built filtration (its partition cache is reused).
pub fn run_on(name: &str, filt: &Filtration, seed: u64, opts: &RunOptions) -> Result<SuiteReport> {
    let names: Vec<&str> = if name == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&name) {
        vec![name]
    } else {
        return Err(Error::UnknownSuite(name.to_string()));
    };
    let per_suite: Vec<Vec<CheckResult>> =
        names.par_iter().map(|s| run_one(s, filt, seed, opts)).collect::<Result<_>>()?;
    Ok(SuiteReport::new(name, filt.config(), seed, per_suite.concat()))
}

fn run_one(suite: &str, filt: &Filtration, seed: u64, opts: &RunOptions) -> Result<Vec<CheckResult>> {
    let ctx = Ctx { filt, seed: derive_seed(seed, suite), opts };
    let checks = match suite {
        "prop0-nesting" => algebra::prop0_nesting(&ctx)?,
        "lemma1-eq1" => algebra::lemma1_eq1(&ctx)?,
        "lemma1-eq23" => algebra::lemma1_eq23(&ctx)?,
        "lemma4-eq6" => algebra::lemma4_eq6(&ctx)?,
        "lemma3-eq7" => algebra::lemma3_eq7(&ctx)?,
        "lemma5" => algebra::lemma5(&ctx)?,
        "lemma2-eq8" => algebra::lemma2_eq8(&ctx)?,
        "lemma2-positivity" => inequalities::lemma2_positivity(&ctx)?,
        "thm1-pointwise" => inequalities::thm1_pointwise(&ctx)?,
        "thm1-empirical" => empirical::thm1_empirical(&ctx)?,
        "doob" => inequalities::doob(&ctx)?,
        "eq10-isometry" => algebra::eq10_isometry(&ctx)?,
        "prop2-calderon" => algebra::prop2_calderon(&ctx)?,
        "eq22" => algebra::eq22(&ctx)?,
        "prop1-decay" => inequalities::prop1_decay(&ctx)?,
        "prop3-decay" => spectral::prop3_decay(&ctx)?,
        "eq46-48" => algebra::eq46_48(&ctx)?,
        "thm2-reconstruction" => algebra::thm2_reconstruction(&ctx)?,
        "thm2-empirical" => empirical::thm2_empirical(&ctx)?,
        "transform-bound" => empirical::transform_bound(&ctx)?,
        "f4-fails" => algebra::f4_fails(&ctx)?,
        "cotlar" => spectral::cotlar(&ctx)?,
        "plane" => combinatorial::plane(&ctx)?,
        "cross-model" => combinatorial::cross_model(&ctx)?,
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    Ok(checks
        .into_iter()
        .map(|mut c| {
            c.name = format!("{suite}/{}", c.name);
            c
        })
        .collect())
}

/// Shared state of one suite run.
pub(crate) struct Ctx<'a> {
    pub filt: &'a Filtration,
    pub seed: u64,
    pub opts: &'a RunOptions,
}

impl Ctx<'_> {
    pub fn config(&self) -> &ModelConfig {
        self.filt.config()
    }

    pub fn space(&self) -> &AtomSpace {
        self.filt.space()
    }

    pub fn q(&self) -> BigRational {
        self.filt.q()
    }

    pub fn q_inv(&self) -> BigRational {
        self.q().recip()
    }

    pub fn rep(&self, l: Coweight) -> bool {
        self.config().representable(l)
    }

    pub fn e(&self, l: Coweight) -> Result<LinearOperator> {
        level_op(self.filt, l)
    }

    pub fn join(&self, a: Coweight, b: Coweight) -> Result<LinearOperator> {
        join_op(self.filt, &[a, b])
    }

    /// `count` seeded functions for the check `tag`.
    pub fn functions(
        &self,
        tag: &str,
        count: usize,
        spec: Option<&PartitionSpec>,
        nonnegative: bool,
    ) -> Result<Vec<ExactVec>> {
        (0..count)
            .map(|k| random_function(self.filt, derive_seed(self.seed, &format!("{tag} #{k}")), spec, nonnegative))
            .collect()
    }

    /// Runs `check` and records its wall time when timings are requested.
    pub fn timed(&self, check: impl FnOnce() -> Result<CheckResult>) -> Result<CheckResult> {
        let start = Instant::now();
        let mut r = check()?;
        if self.opts.timings {
            r.ms = start.elapsed().as_millis() as u64;
        }
        Ok(r)
    }
}

/// `n` or `n/d`.
pub(crate) fn show(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn one_minus_q_inv(ctx: &Ctx) -> BigRational {
    BigRational::one() - ctx.q_inv()
}

/// One instance of an operator identity `lhs = rhs`.
pub(crate) struct Identity {
    pub label: Value,
    pub lhs: LinearOperator,
    pub rhs: LinearOperator,
}

impl Identity {
    pub fn new(label: Value, lhs: LinearOperator, rhs: LinearOperator) -> Self {
        Identity { label, lhs, rhs }
    }
}

/// Exact check of a family of operator identities: first as operators (on the
/// kernel for translation-invariant sides, column by column otherwise), then on
/// the suite's random functions. Fails with the first differing instance and atom.
pub(crate) fn identity_check(ctx: &Ctx, name: &str, instances: Vec<Identity>, empty: &str) -> Result<CheckResult> {
    ctx.timed(|| {
        if instances.is_empty() {
            return Ok(CheckResult::skipped(name, CheckKind::Exact, empty));
        }
        let space = ctx.space();
        for inst in &instances {
            if let Some((row, col)) = inst.lhs.first_difference(&inst.rhs, space) {
                let a = inst.lhs.column(col).get(row);
                let b = inst.rhs.column(col).get(row);
                return Ok(CheckResult::new(name, CheckKind::Exact, false)
                    .with_error(show(&(&a - &b).abs()))
                    .with_witness(json!({
                        "instance": inst.label,
                        "f": {"indicator": col},
                        "atom": row,
                        "lhs": show(&a),
                        "rhs": show(&b),
                    })));
            }
        }
        let funcs = ctx.functions(name, ctx.opts.samples, None, false)?;
        for inst in &instances {
            for (k, f) in funcs.iter().enumerate() {
                let a = inst.lhs.apply(f);
                let b = inst.rhs.apply(f);
                if let Some(atom) = a.first_difference(&b) {
                    return Ok(CheckResult::new(name, CheckKind::Exact, false)
                        .with_error(show(&(a.get(atom) - b.get(atom)).abs()))
                        .with_witness(json!({
                            "instance": inst.label,
                            "f": {"sample": k},
                            "atom": atom,
                            "lhs": show(&a.get(atom)),
                            "rhs": show(&b.get(atom)),
                        })));
                }
            }
        }
        Ok(CheckResult::new(name, CheckKind::Exact, true).with_error("0").with_detail(format!(
            "{} instances; operators equal; {} random functions each",
            instances.len(),
            funcs.len()
        )))
    })
}

pub(crate) fn lambda_label(l: Coweight) -> Value {
    json!(l.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        let cfg = ModelConfig::new(2, 0, 0, 1, 1);
        assert!(matches!(run_suite("nope", &cfg, 0), Err(Error::UnknownSuite(_))));
        assert!(is_suite("all") && is_suite("cotlar"));
        assert_eq!(SUITES.len(), 24);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let cfg = ModelConfig::new(4, 0, 0, 1, 1);
        assert!(run_suite("plane", &cfg, 0).is_err());
    }

    #[test]
    fn check_names_carry_the_suite() {
        let cfg = ModelConfig::new(2, 0, 0, 1, 1);
        let r = run_suite("lemma1-eq23", &cfg, 1).unwrap();
        assert!(r.checks.iter().all(|c| c.name.starts_with("lemma1-eq23/")));
        assert!(r.all_passed());
        assert!(r.checks.iter().all(|c| c.ms == 0));
    }

    #[test]
    fn identity_check_reports_witness() {
        let filt = Filtration::from_config(ModelConfig::new(2, 0, 0, 1, 1)).unwrap();
        let opts = RunOptions { samples: 2, ..RunOptions::default() };
        let ctx = Ctx { filt: &filt, seed: 0, opts: &opts };
        let a = ctx.e(Coweight::new(1, 0)).unwrap();
        let b = ctx.e(Coweight::new(0, 1)).unwrap();
        let bad = identity_check(&ctx, "x", vec![Identity::new(json!("t"), a.clone(), b)], "").unwrap();
        assert_eq!(bad.status, Status::Fail);
        assert_eq!(bad.witness.as_ref().unwrap()["instance"], "t");
        let good = identity_check(&ctx, "x", vec![Identity::new(json!("t"), a.clone(), a)], "").unwrap();
        assert_eq!(good.error.as_deref(), Some("0"));
        let none = identity_check(&ctx, "x", vec![], "no admissible levels").unwrap();
        assert_eq!(none.status, Status::Skipped);
    }
}
