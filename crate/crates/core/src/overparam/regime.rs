use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mlp::{Activation, Architecture, Mlp};
use super::train::{eliminate_and_retrain, train, RestartRecord, TrainConfig, TrainResult};
use super::OverparamError;
use crate::arrays::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Over,
    Perfect,
    Under,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Elimination {
    /// The unreduced model.
    None,
    Param { index: usize },
    /// A hidden unit: its incoming weights, bias and outgoing weights.
    Unit { layer: usize, unit: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub elimination: Elimination,
    pub eliminated_params: Vec<usize>,
    pub final_loss: f64,
    pub reached_epsilon: bool,
    pub restarts_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    /// Active-parameter mask of the successful reduced model (Over only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask: Option<Vec<bool>>,
    /// Loss of the deciding run: the reduced model for Over, the full model otherwise.
    pub final_loss: f64,
    pub attempts: Vec<Attempt>,
    /// Restarts of the full model.
    pub restarts: Vec<RestartRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeCertificate {
    pub regime: Regime,
    pub epsilon: f64,
    pub architecture: Vec<usize>,
    pub activation: Activation,
    /// Initialisation seeds, one per restart, shared by every training run.
    pub seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeConfig {
    pub train: TrainConfig,
    /// Candidates tried per group (single parameters, then hidden units).
    pub elimination_budget: usize,
}

impl Default for RegimeConfig {
    fn default() -> Self {
        Self {
            train: TrainConfig::default(),
            elimination_budget: 8,
        }
    }
}

/// Parameter indices owned by hidden unit `unit` of hidden layer `layer`
/// (0 = first hidden layer).
pub fn unit_params(arch: &Architecture, layer: usize, unit: usize) -> Vec<usize> {
    let (w, b, _) = arch.layer_range(layer);
    let inp = arch.layer_sizes[layer];
    let mut idx: Vec<usize> = (0..inp).map(|k| w + unit * inp + k).collect();
    idx.push(b + unit);
    let (w_next, _, _) = arch.layer_range(layer + 1);
    let width = arch.layer_sizes[layer + 1];
    for j in 0..arch.layer_sizes[layer + 2] {
        idx.push(w_next + j * width + unit);
    }
    idx
}

/// Elimination candidates: single parameters by ascending trained magnitude,
/// then hidden units by ascending total magnitude, each group capped at `budget`.
fn candidates(trained: &Mlp, budget: usize) -> Vec<(Elimination, Vec<usize>)> {
    let p = trained.params();
    let mut singles: Vec<usize> = (0..p.len()).filter(|&i| trained.mask()[i]).collect();
    singles.sort_by(|&a, &b| p[a].abs().total_cmp(&p[b].abs()).then(a.cmp(&b)));
    let mut out: Vec<(Elimination, Vec<usize>)> = singles
        .into_iter()
        .take(budget)
        .map(|i| (Elimination::Param { index: i }, vec![i]))
        .collect();

    let arch = &trained.architecture;
    let mut units = Vec::new();
    for layer in 0..arch.n_layers() - 1 {
        for unit in 0..arch.layer_sizes[layer + 1] {
            let idx = unit_params(arch, layer, unit);
            let weight: f64 = idx.iter().map(|&i| p[i].abs()).sum();
            units.push((weight, layer, unit, idx));
        }
    }
    units.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    out.extend(
        units
            .into_iter()
            .filter(|u| u.3.iter().any(|&i| trained.mask()[i]))
            .take(budget)
            .map(|(_, layer, unit, idx)| (Elimination::Unit { layer, unit }, idx)),
    );
    out
}

fn attempt(elimination: Elimination, eliminated_params: Vec<usize>, res: &TrainResult) -> Attempt {
    Attempt {
        elimination,
        eliminated_params,
        final_loss: res.final_loss,
        reached_epsilon: res.reached_epsilon,
        restarts_used: res.restarts_used,
    }
}

/// Classifies `arch` on `data` as over-, perfectly or under-parameterised.
///
/// Under means the full model missed `epsilon` within the training budget.
/// Otherwise candidate eliminations are retrained from scratch in a fixed
/// order; the first to reach `epsilon` makes the model Over. If none does the
/// model is Perfect relative to the searched candidates.
pub fn classify_regime(arch: &Architecture, data: &Dataset, cfg: &RegimeConfig) -> Result<RegimeCertificate, OverparamError> {
    if cfg.elimination_budget == 0 {
        return Err(OverparamError::InvalidParameter("elimination budget must be at least 1".into()));
    }
    let base = Mlp::zeros(arch.clone());
    let (full, trained) = train(&base, data, &cfg.train)?;
    let seeds: Vec<u64> = (0..cfg.train.n_restarts).map(|r| cfg.train.restart_seed(r)).collect();
    let mut attempts = vec![attempt(Elimination::None, Vec::new(), &full)];
    let certificate = |regime, note: Option<String>, evidence| RegimeCertificate {
        regime,
        epsilon: cfg.train.epsilon,
        architecture: arch.layer_sizes.clone(),
        activation: arch.activation,
        seeds: seeds.clone(),
        note,
        evidence,
    };
    if !full.reached_epsilon {
        return Ok(certificate(
            Regime::Under,
            Some("not reached within budget".into()),
            Evidence {
                mask: None,
                final_loss: full.final_loss,
                attempts,
                restarts: full.restarts,
            },
        ));
    }

    let plan: Vec<(Elimination, Vec<usize>)> = candidates(&trained, cfg.elimination_budget)
        .into_iter()
        .filter(|(_, idx)| {
            let mut mask = base.mask().to_vec();
            idx.iter().for_each(|&i| mask[i] = false);
            base.clone().set_mask(mask).is_ok()
        })
        .collect();
    let chunk = rayon::current_num_threads().max(1);
    for group in plan.chunks(chunk) {
        let results: Vec<(TrainResult, Mlp)> = group
            .par_iter()
            .map(|(_, idx)| eliminate_and_retrain(&base, idx, data, &cfg.train))
            .collect::<Result<_, _>>()?;
        for ((elim, idx), (res, model)) in group.iter().zip(results) {
            attempts.push(attempt(elim.clone(), idx.clone(), &res));
            if res.reached_epsilon {
                return Ok(certificate(
                    Regime::Over,
                    None,
                    Evidence {
                        mask: Some(model.mask().to_vec()),
                        final_loss: res.final_loss,
                        attempts,
                        restarts: full.restarts,
                    },
                ));
            }
        }
    }
    Ok(certificate(
        Regime::Perfect,
        None,
        Evidence {
            mask: None,
            final_loss: full.final_loss,
            attempts,
            restarts: full.restarts,
        },
    ))
}
