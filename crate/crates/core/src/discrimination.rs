//! Bayesian state-discrimination games.
//!
//! Alice sends `rho_i` with prior `q_i`; Bob measures and guesses the state with the
//! highest posterior. The resulting success probability never increases under
//! post-processing of Bob's measurement, and over all ensembles it characterizes the
//! order completely, which [`witness_search`] exploits heuristically.

use crate::error::{Error, Result};
use crate::operator::HermitianOperator;
use crate::order::precedes;
use crate::povm::Povm;
use crate::stochastic::StochasticMatrix;
use crate::tolerance::Tolerances;

/// Default mixing step towards the new pure state.
pub const DEFAULT_STEP: f64 = 0.5;
/// Success gap a witness must exceed.
pub const DEFAULT_GAP: f64 = 1e-6;
pub const DEFAULT_MAX_ROUNDS: usize = 200;

/// Halvings tried when the full step does not reduce the surrogate.
const STEP_HALVINGS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    priors: Vec<f64>,
    states: Vec<HermitianOperator>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameResult {
    pub success: f64,
    /// `k x n`: column `j` puts all weight on the state guessed after outcome `j`.
    pub decision: StochasticMatrix,
    /// `posteriors[i][j] = Pr(rho_i | E_j)`, zero for zero-probability outcomes.
    pub posteriors: Vec<Vec<f64>>,
    /// `Pr(E_j)`.
    pub outcome_probabilities: Vec<f64>,
}

/// An ensemble on which `F` beats `E`, certifying that `E` cannot be post-processed into `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub ensemble: Ensemble,
    pub success_source: f64,
    pub success_target: f64,
    pub rounds: usize,
}

impl Witness {
    pub fn gap(&self) -> f64 {
        self.success_target - self.success_source
    }
}

impl Ensemble {
    pub fn new(priors: Vec<f64>, states: Vec<HermitianOperator>, tol: &Tolerances) -> Result<Self> {
        if priors.is_empty() {
            return Err(Error::Empty("ensemble needs at least one state".into()));
        }
        if priors.len() != states.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} priors for {} states",
                priors.len(),
                states.len()
            )));
        }
        if priors.iter().any(|q| !(q.is_finite() && *q >= 0.0)) {
            return Err(Error::InvalidEnsemble("priors must be finite and non-negative".into()));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > tol.stoch {
            return Err(Error::InvalidEnsemble(format!("priors sum to {total}")));
        }
        let dim = states[0].dim();
        for (i, rho) in states.iter().enumerate() {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: rho.dim(),
                });
            }
            validate_state(rho, tol).map_err(|e| Error::InvalidEnsemble(format!("state {i}: {e}")))?;
        }
        Ok(Ensemble { priors, states })
    }

    pub(crate) fn from_parts_unchecked(priors: Vec<f64>, states: Vec<HermitianOperator>) -> Self {
        Ensemble { priors, states }
    }

    /// Builds from subnormalized operators `q_i rho_i`; zero-weight slots get the
    /// maximally mixed state.
    pub fn from_weighted(weighted: &[HermitianOperator]) -> Self {
        let dim = weighted[0].dim();
        let total: f64 = weighted.iter().map(HermitianOperator::trace).sum();
        let mut priors = Vec::with_capacity(weighted.len());
        let mut states = Vec::with_capacity(weighted.len());
        for w in weighted {
            let q = w.trace() / total;
            if w.trace() > 1e-300 {
                priors.push(q);
                states.push(w.scale(1.0 / w.trace()));
            } else {
                priors.push(0.0);
                states.push(HermitianOperator::identity(dim).scale(1.0 / dim as f64));
            }
        }
        Ensemble { priors, states }
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn len(&self) -> usize {
        self.priors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.priors.is_empty()
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn states(&self) -> &[HermitianOperator] {
        &self.states
    }

    /// `q_i rho_i`.
    pub fn weighted(&self) -> Vec<HermitianOperator> {
        self.priors.iter().zip(&self.states).map(|(q, r)| r.scale(*q)).collect()
    }

    pub fn max_prior(&self) -> f64 {
        self.priors.iter().copied().fold(0.0, f64::max)
    }
}

/// Checks that `rho` is PSD with unit trace.
pub fn validate_state(rho: &HermitianOperator, tol: &Tolerances) -> Result<()> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > tol.herm {
        return Err(Error::InvalidState(format!("trace is {tr}")));
    }
    let min = rho.eig().min();
    if min < -tol.psd {
        return Err(Error::InvalidState(format!("min eigenvalue {min:e}")));
    }
    Ok(())
}

/// Joint table `Tr(q_i rho_i E_j)` for subnormalized states.
fn joint_table(weighted: &[HermitianOperator], povm: &Povm) -> Vec<Vec<f64>> {
    weighted
        .iter()
        .map(|w| povm.elements().iter().map(|e| w.trace_product(e)).collect())
        .collect()
}

/// Bayes-optimal success from a joint table; returns (success, argmax state per outcome).
fn optimal_guesses(joint: &[Vec<f64>], outcomes: usize, prob_tol: f64) -> (f64, Vec<usize>) {
    let mut success = 0.0;
    let mut guesses = Vec::with_capacity(outcomes);
    for j in 0..outcomes {
        let pj: f64 = joint.iter().map(|row| row[j]).sum();
        if pj <= prob_tol {
            guesses.push(0);
            continue;
        }
        // Lowest index wins ties.
        let mut best = 0;
        for i in 1..joint.len() {
            if joint[i][j] > joint[best][j] {
                best = i;
            }
        }
        success += joint[best][j];
        guesses.push(best);
    }
    (success, guesses)
}

fn decision_matrix(k: usize, guesses: &[usize]) -> StochasticMatrix {
    let n = guesses.len();
    let mut data = vec![0.0; k * n];
    for (j, &g) in guesses.iter().enumerate() {
        data[g * n + j] = 1.0;
    }
    StochasticMatrix::from_raw(k, n, data)
}

fn check_dims(povm: &Povm, ens: &Ensemble) -> Result<()> {
    if povm.dim() != ens.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            found: ens.dim(),
        });
    }
    Ok(())
}

/// Success probability when Bob guesses the posterior mode after each outcome.
pub fn posterior_success(povm: &Povm, ens: &Ensemble, tol: &Tolerances) -> Result<GameResult> {
    check_dims(povm, ens)?;
    let k = ens.len();
    let n = povm.len();
    let joint = joint_table(&ens.weighted(), povm);
    let (success, guesses) = optimal_guesses(&joint, n, tol.prob);
    let outcome_probabilities: Vec<f64> = (0..n).map(|j| joint.iter().map(|row| row[j]).sum()).collect();
    let posteriors = (0..k)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let pj = outcome_probabilities[j];
                    if pj <= tol.prob {
                        0.0
                    } else {
                        joint[i][j] / pj
                    }
                })
                .collect()
        })
        .collect();
    Ok(GameResult {
        success,
        decision: decision_matrix(k, &guesses),
        posteriors,
        outcome_probabilities,
    })
}

/// Probability that outcome `i` is reported when state `i` was sent.
pub fn canonical_success(povm: &Povm, ens: &Ensemble) -> Result<f64> {
    check_dims(povm, ens)?;
    if povm.len() != ens.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} outcomes for {} states",
            povm.len(),
            ens.len()
        )));
    }
    Ok(ens
        .priors
        .iter()
        .zip(&ens.states)
        .zip(povm.elements())
        .map(|((q, rho), e)| q * rho.trace_product(e))
        .sum())
}

/// Checks that post-processing `povm` by `mix` does not raise its success on `ens`.
pub fn success_monotone_check(
    povm: &Povm,
    mix: &StochasticMatrix,
    ens: &Ensemble,
    tol: &Tolerances,
) -> Result<bool> {
    let before = posterior_success(povm, ens, tol)?.success;
    let after = posterior_success(&mix.apply(povm)?, ens, tol)?.success;
    Ok(after <= before + 1e-9)
}

/// Tuning for [`witness_search`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessSearch {
    pub ensemble_size: usize,
    pub max_rounds: usize,
    pub step: f64,
    pub gap: f64,
}

impl WitnessSearch {
    pub fn new(ensemble_size: usize) -> Self {
        WitnessSearch {
            ensemble_size,
            max_rounds: DEFAULT_MAX_ROUNDS,
            step: DEFAULT_STEP,
            gap: DEFAULT_GAP,
        }
    }
}

/// Searches for an ensemble on which `target` strictly beats `source`.
///
/// Keeps a weighted ensemble `sigma_i = q_i rho_i`. Each round takes Bob's optimal decision
/// `S` for `source`, forms `Delta_i = sum_j S_ij E_j - F_i`, and moves the ensemble
/// towards the pure state on the most negative eigenvector of the most negative
/// `Delta_i`, placed in slot `i`. `sum_i Tr(sigma_i Delta_i)` is then driven down; once
/// it is negative, `target` with the identity decision already beats `source`.
///
/// Returns `Ok(None)` when no witness is found within the round budget. That is not
/// evidence that `source >= target`.
pub fn witness_search(
    source: &Povm,
    target: &Povm,
    params: WitnessSearch,
    tol: &Tolerances,
) -> Result<Option<Witness>> {
    if source.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: source.dim(),
            found: target.dim(),
        });
    }
    if params.ensemble_size == 0 {
        return Err(Error::Empty("witness ensemble size must be positive".into()));
    }
    let verdict = precedes(source, target, tol)?;
    if verdict.feasible {
        return Err(Error::PreconditionViolated(
            "source can be post-processed into target; no witness exists".into(),
        ));
    }

    let d = source.dim();
    let k = params.ensemble_size;
    // Targets beyond the ensemble size are ignored by the surrogate; missing slots are zero.
    let f_slots: Vec<HermitianOperator> = (0..k)
        .map(|i| {
            target
                .elements()
                .get(i)
                .cloned()
                .unwrap_or_else(|| HermitianOperator::zeros(d))
        })
        .collect();

    // Start from sigma_i proportional to F_i: the ensemble F is naturally good at.
    let mut sigma: Vec<HermitianOperator> = f_slots.clone();
    let mass: f64 = sigma.iter().map(HermitianOperator::trace).sum();
    if mass <= tol.prob {
        sigma = vec![HermitianOperator::identity(d).scale(1.0 / (d * k) as f64); k];
    } else {
        sigma = sigma.iter().map(|s| s.scale(1.0 / mass)).collect();
    }

    let surrogate = |sigma: &[HermitianOperator]| -> f64 {
        let joint = joint_table(sigma, source);
        let (s_source, _) = optimal_guesses(&joint, source.len(), tol.prob);
        let identity_target: f64 = sigma.iter().zip(&f_slots).map(|(s, f)| s.trace_product(f)).sum();
        s_source - identity_target
    };

    for round in 0..=params.max_rounds {
        let ensemble = Ensemble::from_weighted(&sigma);
        let s_source = posterior_success(source, &ensemble, tol)?.success;
        let s_target = posterior_success(target, &ensemble, tol)?.success;
        if s_target > s_source + params.gap {
            return Ok(Some(Witness {
                ensemble,
                success_source: s_source,
                success_target: s_target,
                rounds: round,
            }));
        }
        if round == params.max_rounds {
            break;
        }

        let joint = joint_table(&sigma, source);
        let (_, guesses) = optimal_guesses(&joint, source.len(), tol.prob);
        let mut best: Option<(usize, f64, Vec<num_complex::Complex64>)> = None;
        for (i, f) in f_slots.iter().enumerate() {
            let mut delta = -f;
            for (j, e) in source.elements().iter().enumerate() {
                if guesses[j] == i {
                    delta = &delta + e;
                }
            }
            let s = delta.eig();
            let lo = s.min();
            if best.as_ref().is_none_or(|(_, b, _)| lo < *b) {
                best = Some((i, lo, s.eigenvectors[d - 1].clone()));
            }
        }
        let Some((slot, _, vector)) = best else { break };
        let pure = HermitianOperator::projector(&vector);
        let mix = |eta: f64| -> Vec<HermitianOperator> {
            sigma
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let kept = s.scale(1.0 - eta);
                    if i == slot {
                        &kept + &pure.scale(eta)
                    } else {
                        kept
                    }
                })
                .collect()
        };

        let current = surrogate(&sigma);
        let mut eta = params.step;
        let mut chosen = None;
        for _ in 0..=STEP_HALVINGS {
            let candidate = mix(eta);
            if surrogate(&candidate) < current - 1e-15 {
                chosen = Some(candidate);
                break;
            }
            eta *= 0.5;
        }
        // No decrease along this direction: take the smallest step anyway so the decision
        // pattern can change on the next round.
        sigma = chosen.unwrap_or_else(|| mix(eta));
    }
    Ok(None)
}
