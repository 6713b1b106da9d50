//! Property suites run by the sweep. Each trial is a pure function of its sub-seed.

use std::collections::BTreeMap;
use std::fmt;

use povmrt_core::discrimination::{posterior_success, witness_search, WitnessSearch};
use povmrt_core::monotones::{banaszek, skrzypczyk};
use povmrt_core::order::{class_equal, equivalent, majorization_condition, mixing_residual, precedes};
use povmrt_core::randgen::{random_ensemble, random_povm, random_projective, random_state, random_stochastic};
use povmrt_core::stochastic::{confuse_matrix, decompose, split_matrix};
use povmrt_core::{
    ConfuseSpec, MonotoneReport, Povm, Result, RngSeed, SplitSpec, StatePovmPair,
    StochasticMatrix, Tolerances,
};
use serde::{Deserialize, Serialize};

use crate::config::IntRange;
use crate::report::TrialRecord;

const DECOMPOSITION_TOL: f64 = 1e-12;
const MONOTONE_SLACK: f64 = 1e-8;
const CLASS_CONSTANCY_TOL: f64 = 1e-9;
const AFFINE_IDENTITY_TOL: f64 = 1e-10;
const SUCCESS_SLACK: f64 = 1e-9;
/// Redraws allowed when a suite needs an incomparable pair.
const PAIR_ATTEMPTS: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Decomposition,
    OrderSoundness,
    Terminal,
    Irreversibility,
    ProportionalMerge,
    Monotonicity,
    NoCatalysis,
    ProductReduction,
    Discrimination,
    Majorization,
    Transitivity,
    Extremality,
    ClassEquality,
    Witness,
}

impl Suite {
    pub const ALL: [Suite; 14] = [
        Suite::Decomposition,
        Suite::OrderSoundness,
        Suite::Terminal,
        Suite::Irreversibility,
        Suite::ProportionalMerge,
        Suite::Monotonicity,
        Suite::NoCatalysis,
        Suite::ProductReduction,
        Suite::Discrimination,
        Suite::Majorization,
        Suite::Transitivity,
        Suite::Extremality,
        Suite::ClassEquality,
        Suite::Witness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Decomposition => "decomposition",
            Suite::OrderSoundness => "order_soundness",
            Suite::Terminal => "terminal",
            Suite::Irreversibility => "irreversibility",
            Suite::ProportionalMerge => "proportional_merge",
            Suite::Monotonicity => "monotonicity",
            Suite::NoCatalysis => "no_catalysis",
            Suite::ProductReduction => "product_reduction",
            Suite::Discrimination => "discrimination",
            Suite::Majorization => "majorization",
            Suite::Transitivity => "transitivity",
            Suite::Extremality => "extremality",
            Suite::ClassEquality => "class_equality",
            Suite::Witness => "witness",
        }
    }

    /// Fraction of trials that must pass. Witness search is a heuristic, so some misses
    /// are expected; every other suite checks a theorem and tolerates none.
    pub fn required_pass_rate(self) -> f64 {
        match self {
            Suite::Witness => 0.8,
            _ => 1.0,
        }
    }

    pub fn run_trial(self, trial: u64, seed: RngSeed, dims: IntRange, outcomes: IntRange, tol: &Tolerances) -> TrialRecord {
        let mut ctx = Trial {
            seed,
            dims,
            outcomes,
            dim: draw(seed, u64::MAX, dims),
            n: draw(seed, u64::MAX - 1, outcomes),
            tol: *tol,
            metrics: BTreeMap::new(),
            note: None,
        };
        let verdict = match self {
            Suite::Decomposition => ctx.decomposition(),
            Suite::OrderSoundness => ctx.order_soundness(),
            Suite::Terminal => ctx.terminal(),
            Suite::Irreversibility => ctx.irreversibility(),
            Suite::ProportionalMerge => ctx.proportional_merge(),
            Suite::Monotonicity => ctx.monotonicity(),
            Suite::NoCatalysis => ctx.no_catalysis(),
            Suite::ProductReduction => ctx.product_reduction(),
            Suite::Discrimination => ctx.discrimination(),
            Suite::Majorization => ctx.majorization(),
            Suite::Transitivity => ctx.transitivity(),
            Suite::Extremality => ctx.extremality(),
            Suite::ClassEquality => ctx.class_equality(),
            Suite::Witness => ctx.witness(),
        };
        let (passed, violation) = match verdict {
            Ok(v) => v,
            Err(e) => {
                ctx.note = Some(format!("{}: {e}", e.kind()));
                (false, f64::INFINITY)
            }
        };
        TrialRecord {
            suite: self,
            trial,
            seed,
            dim: ctx.dim,
            outcomes: ctx.n,
            passed,
            violation,
            metrics: ctx.metrics,
            note: ctx.note,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Uniform draw from an inclusive range, keyed by `stream`.
fn draw(seed: RngSeed, stream: u64, range: IntRange) -> usize {
    let span = (range.max() - range.min() + 1) as u64;
    range.min() + (seed.derive(stream).0 % span) as usize
}

fn fraction(seed: RngSeed, stream: u64) -> f64 {
    (seed.derive(stream).0 >> 11) as f64 / (1u64 << 53) as f64
}

fn flag(seed: RngSeed, stream: u64, one_in: u64) -> bool {
    seed.derive(stream).0.is_multiple_of(one_in)
}

/// Outcome `(passed, violation)`; binary checks report a violation of 0 or 1.
type Check = Result<(bool, f64)>;

fn binary(ok: bool) -> (bool, f64) {
    (ok, if ok { 0.0 } else { 1.0 })
}

fn max_povm_diff(a: &Povm, b: &Povm) -> f64 {
    a.elements()
        .iter()
        .zip(b.elements())
        .map(|(x, y)| x.max_abs_diff(y))
        .fold(0.0, f64::max)
}

/// Merges outcomes 0 and 1.
fn merge_first_two(n: usize) -> Result<StochasticMatrix> {
    let targets = (0..n).map(|j| j.saturating_sub(1)).collect();
    confuse_matrix(&ConfuseSpec::new(targets, n - 1)?, n - 1)
}

/// Splits outcome 0 with weights `(w, 1 - w)`.
fn split_first(n: usize, w: f64, tol: f64) -> Result<StochasticMatrix> {
    let mut blocks = vec![vec![1.0]; n];
    blocks[0] = vec![w, 1.0 - w];
    Ok(split_matrix(&SplitSpec::new(blocks, tol)?))
}

struct Trial {
    seed: RngSeed,
    dims: IntRange,
    outcomes: IntRange,
    dim: usize,
    n: usize,
    tol: Tolerances,
    metrics: BTreeMap<String, f64>,
    note: Option<String>,
}

impl Trial {
    fn sub(&self, stream: u64) -> RngSeed {
        self.seed.derive(stream)
    }

    fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    /// A POVM that is rank-1 projective in about one draw in four.
    fn povm(&self, d: usize, n: usize, stream: u64) -> Result<Povm> {
        let s = self.sub(stream);
        if flag(s, 0, 4) {
            Ok(random_projective(d, s))
        } else {
            random_povm(d, n, s)
        }
    }

    fn outcome_draw(&self, stream: u64) -> usize {
        draw(self.seed, stream, self.outcomes)
    }

    fn decomposition(&mut self) -> Check {
        let m = self.outcome_draw(1);
        let p = random_stochastic(m, self.n, self.sub(2));
        let (c, s) = decompose(&p);
        let err = c.compose(&s)?.max_abs_diff(&p);
        self.metric("cs_error", err);
        Ok((err <= DECOMPOSITION_TOL, err))
    }

    fn order_soundness(&mut self) -> Check {
        let e = self.povm(self.dim, self.n, 1)?;
        let p = random_stochastic(self.outcome_draw(2), e.len(), self.sub(3));
        let f = p.apply(&e)?;
        let v = precedes(&e, &f, &self.tol)?;
        self.metric("residual", v.residual);
        self.metric("pivots", v.pivots as f64);
        let Some(w) = v.witness else {
            return Ok((false, v.residual));
        };
        let diff = max_povm_diff(&w.apply(&e)?, &f);
        self.metric("apply_error", diff);
        let worst = v.residual.max(diff);
        Ok((worst <= self.tol.feas, worst))
    }

    fn terminal(&mut self) -> Check {
        let e = self.povm(self.dim, self.n, 1)?;
        let v = precedes(&e, &Povm::trivial(self.dim), &self.tol)?;
        self.metric("residual", v.residual);
        Ok((v.feasible, v.residual))
    }

    fn irreversibility(&mut self) -> Check {
        let (d, n) = (self.dim.max(2), self.n.max(2));
        self.dim = d;
        self.n = n;
        let e = random_povm(d, n, self.sub(1))?;
        if e.elements()[0].proportional(&e.elements()[1], self.tol.prop).is_some() {
            self.note = Some("merged outcomes happened to be proportional".into());
            return Ok((true, 0.0));
        }
        let confused = merge_first_two(n)?.apply(&e)?;
        let v = precedes(&confused, &e, &self.tol)?;
        self.metric("residual", v.residual);
        Ok(binary(!v.feasible))
    }

    fn proportional_merge(&mut self) -> Check {
        let base = self.povm(self.dim, self.n, 1)?;
        let w = 0.05 + 0.9 * fraction(self.seed, 2);
        let e = split_first(base.len(), w, self.tol.stoch)?.apply(&base)?;
        let confused = merge_first_two(e.len())?.apply(&e)?;
        let v = precedes(&confused, &e, &self.tol)?;
        self.metric("weight", w);
        self.metric("residual", v.residual);
        Ok((v.feasible, v.residual))
    }

    fn monotonicity(&mut self) -> Check {
        let (d, tol) = (self.dim, self.tol);
        let e = self.povm(d, self.n, 1)?;
        let p = random_stochastic(self.outcome_draw(2), e.len(), self.sub(3));
        let rho = random_state(d, flag(self.seed, 4, 5), self.sub(5));
        let report = |povm: &Povm| MonotoneReport::compute(&StatePovmPair::new(rho.clone(), povm.clone(), &tol)?, &tol);
        let before = report(&e)?;
        let after = report(&p.apply(&e)?)?;

        // Split the first outcome and add a zero outcome: same class, same values.
        let w = 0.05 + 0.9 * fraction(self.seed, 6);
        let noisy = split_first(e.len(), w, tol.stoch)?.apply(&e)?.with_zero_appended();
        let canonical = report(&noisy.canonicalize(&tol).into_povm())?;

        let mut increase = 0.0f64;
        let mut class_dev = 0.0f64;
        for (((name, b), (_, a)), (_, c)) in before.as_array().iter().zip(after.as_array()).zip(canonical.as_array()) {
            self.metric(&format!("{name}_before"), *b);
            self.metric(&format!("{name}_after"), a);
            increase = increase.max(a - b);
            class_dev = class_dev.max((c - b).abs());
        }
        let df = d as f64;
        let skr = skrzypczyk(&e);
        let affine_dev = (banaszek(&e) - (df + 1.0 + skr) / (df * (df + 1.0))).abs();
        let bounds_ok = skr >= -MONOTONE_SLACK && skr <= df - 1.0 + MONOTONE_SLACK;
        self.metric("max_increase", increase);
        self.metric("class_deviation", class_dev);
        self.metric("affine_deviation", affine_dev);
        let ok = increase <= MONOTONE_SLACK
            && class_dev <= CLASS_CONSTANCY_TOL
            && affine_dev <= AFFINE_IDENTITY_TOL
            && bounds_ok;
        Ok((ok, increase.max(0.0)))
    }

    /// `E (x) C >= E' (x) C` must imply `E >= E'`. Half the targets are built as
    /// post-processings of `E` so the premise is often met.
    fn no_catalysis(&mut self) -> Check {
        let d = self.dim;
        let e = self.povm(d, self.n, 1)?;
        let c = self.povm(draw(self.seed, 2, self.dims), self.outcome_draw(3), 4)?;
        let target = if flag(self.seed, 5, 2) {
            random_stochastic(self.outcome_draw(6), e.len(), self.sub(7)).apply(&e)?
        } else {
            self.povm(d, self.outcome_draw(6), 7)?
        };
        let catalysed = precedes(&e.tensor(&c), &target.tensor(&c), &self.tol)?;
        self.metric("catalysed_feasible", catalysed.feasible as u8 as f64);
        self.metric("catalysed_residual", catalysed.residual);
        if !catalysed.feasible {
            return Ok((true, 0.0));
        }
        let plain = precedes(&e, &target, &self.tol)?;
        self.metric("plain_residual", plain.residual);
        Ok((plain.feasible, if plain.feasible { 0.0 } else { plain.residual }))
    }

    /// `A (x) B >= C (x) D` must imply `A >= C`.
    fn product_reduction(&mut self) -> Check {
        let da = self.dim;
        let db = draw(self.seed, 1, self.dims);
        let a = self.povm(da, self.n, 2)?;
        let b = self.povm(db, self.outcome_draw(3), 4)?;
        let (c, dd) = if flag(self.seed, 5, 3) {
            (self.povm(da, self.outcome_draw(6), 7)?, self.povm(db, self.outcome_draw(8), 9)?)
        } else {
            (
                random_stochastic(self.outcome_draw(6), a.len(), self.sub(7)).apply(&a)?,
                random_stochastic(self.outcome_draw(8), b.len(), self.sub(9)).apply(&b)?,
            )
        };
        let joint = precedes(&a.tensor(&b), &c.tensor(&dd), &self.tol)?;
        self.metric("product_feasible", joint.feasible as u8 as f64);
        if !joint.feasible {
            return Ok((true, 0.0));
        }
        let reduced = precedes(&a, &c, &self.tol)?;
        self.metric("reduced_residual", reduced.residual);
        Ok((reduced.feasible, if reduced.feasible { 0.0 } else { reduced.residual }))
    }

    fn discrimination(&mut self) -> Check {
        let e = self.povm(self.dim, self.n, 1)?;
        let p = random_stochastic(self.outcome_draw(2), e.len(), self.sub(3));
        let k = self.outcome_draw(4);
        let ens = random_ensemble(self.dim, k, flag(self.seed, 5, 2), self.sub(6));
        let before = posterior_success(&e, &ens, &self.tol)?.success;
        let after = posterior_success(&p.apply(&e)?, &ens, &self.tol)?.success;
        self.metric("success_before", before);
        self.metric("success_after", after);
        self.metric("max_prior", ens.max_prior());
        let rise = after - before;
        Ok((rise <= SUCCESS_SLACK && before >= ens.max_prior() - SUCCESS_SLACK, rise.max(0.0)))
    }

    fn majorization(&mut self) -> Check {
        let e = self.povm(self.dim, self.n, 1)?;
        let f = random_stochastic(self.outcome_draw(2), e.len(), self.sub(3)).apply(&e)?;
        let (ve, vf) = (e.eigenvalue_profile(), f.eigenvalue_profile());
        let mut deficit = 0.0f64;
        let (mut se, mut sf) = (0.0, 0.0);
        for (x, y) in ve.iter().zip(&vf) {
            se += x;
            sf += y;
            deficit = deficit.max(sf - se);
        }
        self.metric("max_partial_sum_deficit", deficit);
        Ok((majorization_condition(&e, &f, &self.tol), deficit.max(0.0)))
    }

    fn transitivity(&mut self) -> Check {
        let e = self.povm(self.dim, self.n, 1)?;
        let f = random_stochastic(self.outcome_draw(2), e.len(), self.sub(3)).apply(&e)?;
        let g = random_stochastic(self.outcome_draw(4), f.len(), self.sub(5)).apply(&f)?;
        let ef = precedes(&e, &f, &self.tol)?;
        let fg = precedes(&f, &g, &self.tol)?;
        let eg = precedes(&e, &g, &self.tol)?;
        self.metric("residual_eg", eg.residual);
        let (Some(w1), Some(w2)) = (ef.witness, fg.witness) else {
            return Ok((false, ef.residual.max(fg.residual)));
        };
        let chained = mixing_residual(&w2.compose(&w1)?, &e, &g)?;
        self.metric("chained_residual", chained);
        Ok((eg.feasible && chained <= self.tol.feas, chained))
    }

    /// A rank-1 target is only reachable from its own class.
    fn extremality(&mut self) -> Check {
        let d = self.dim;
        let e = random_projective(d, self.sub(1));
        let source = if flag(self.seed, 2, 2) {
            let w = 0.05 + 0.9 * fraction(self.seed, 3);
            split_first(d, w, self.tol.stoch)?.apply(&e)?
        } else {
            random_povm(d, self.n, self.sub(4))?
        };
        let v = precedes(&source, &e, &self.tol)?;
        self.metric("reaches_feasible", v.feasible as u8 as f64);
        if !v.feasible {
            return Ok((true, 0.0));
        }
        Ok(binary(equivalent(&e, &source, &self.tol)?))
    }

    /// Canonical comparison agrees with two-way post-processability.
    fn class_equality(&mut self) -> Check {
        let e = self.povm(self.dim, self.n, 1)?;
        let f = match self.seed.derive(2).0 % 3 {
            0 => {
                let w = 0.05 + 0.9 * fraction(self.seed, 3);
                split_first(e.len(), w, self.tol.stoch)?.apply(&e)?.with_zero_appended()
            }
            1 => random_stochastic(self.outcome_draw(3), e.len(), self.sub(4)).apply(&e)?,
            _ => self.povm(self.dim, self.outcome_draw(3), 4)?,
        };
        let by_class = class_equal(&e, &f, &self.tol);
        let by_order = equivalent(&e, &f, &self.tol)?;
        self.metric("class_equal", by_class as u8 as f64);
        self.metric("equivalent", by_order as u8 as f64);
        Ok(binary(by_class == by_order))
    }

    /// Draws incomparable pairs until one is found, then searches for a witness ensemble.
    fn witness(&mut self) -> Check {
        let d = self.dim;
        for attempt in 0..PAIR_ATTEMPTS {
            let e = self.povm(d, self.n, 10 + 2 * attempt)?;
            let f = self.povm(d, self.outcome_draw(11 + 2 * attempt), 11 + 2 * attempt)?;
            let order = precedes(&e, &f, &self.tol)?;
            if order.feasible {
                continue;
            }
            self.metric("attempt", attempt as f64);
            self.metric("order_residual", order.residual);
            let found = witness_search(&e, &f, WitnessSearch::new(f.len()), &self.tol)?;
            return Ok(match found {
                Some(w) => {
                    self.metric("gap", w.gap());
                    self.metric("rounds", w.rounds as f64);
                    (true, 0.0)
                }
                None => {
                    self.note = Some("no witness within the round budget".into());
                    (false, 0.0)
                }
            });
        }
        self.note = Some("no incomparable pair drawn".into());
        Ok((true, 0.0))
    }
}
