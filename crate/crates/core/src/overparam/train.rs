use serde::{Deserialize, Serialize};

use super::mlp::Mlp;
use super::OverparamError;
use crate::arrays::Dataset;

/// Loss target when a caller does not choose one.
pub const DEFAULT_EPSILON: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epsilon: f64,
    pub max_epochs: usize,
    pub n_restarts: usize,
    pub seed: u64,
    pub learning_rate: f64,
    pub momentum: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            max_epochs: 3000,
            n_restarts: 5,
            seed: 0,
            learning_rate: 0.1,
            momentum: 0.9,
        }
    }
}

impl TrainConfig {
    /// Initialisation seed of restart `r`.
    pub fn restart_seed(&self, r: usize) -> u64 {
        // splitmix64 step, so neighbouring base seeds give unrelated restarts.
        let mut z = self.seed.wrapping_add((r as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    pub seed: u64,
    /// `None` when the run diverged.
    pub final_loss: Option<f64>,
    pub epochs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainResult {
    /// Best loss over all restarts (infinite if every restart diverged).
    pub final_loss: f64,
    pub reached_epsilon: bool,
    /// Epochs of the kept restart.
    pub epochs_used: usize,
    pub restarts_used: usize,
    pub failed_restarts: usize,
    pub restarts: Vec<RestartRecord>,
}

fn run_once(model: &mut Mlp, data: &Dataset, cfg: &TrainConfig) -> Result<(Option<f64>, usize), OverparamError> {
    let mut velocity = vec![0.0; model.params().len()];
    for epoch in 0..cfg.max_epochs {
        let (loss, grad) = model.loss_and_grad(data)?;
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Ok((None, epoch));
        }
        if loss <= cfg.epsilon {
            return Ok((Some(loss), epoch));
        }
        for ((v, g), p) in velocity.iter_mut().zip(&grad).zip(model.params_mut()) {
            *v = cfg.momentum * *v - cfg.learning_rate * g;
            *p += *v;
        }
        model.enforce_mask();
    }
    let loss = model.loss(data)?;
    Ok((loss.is_finite().then_some(loss), cfg.max_epochs))
}

/// Full-batch gradient descent with momentum on mean cross-entropy.
///
/// Every restart starts from a fresh Xavier initialisation of `model`'s
/// architecture (keeping its mask); restarts stop as soon as one reaches
/// `epsilon`. Returns the result and the best trained model.
pub fn train(model: &Mlp, data: &Dataset, cfg: &TrainConfig) -> Result<(TrainResult, Mlp), OverparamError> {
    if !(cfg.epsilon > 0.0) || !cfg.epsilon.is_finite() {
        return Err(OverparamError::InvalidParameter(format!("epsilon must be > 0, got {}", cfg.epsilon)));
    }
    if cfg.n_restarts == 0 {
        return Err(OverparamError::InvalidParameter("n_restarts must be at least 1".into()));
    }
    if !(cfg.learning_rate > 0.0) || !(0.0..1.0).contains(&cfg.momentum) {
        return Err(OverparamError::InvalidParameter(
            "learning rate must be > 0 and momentum in [0, 1)".into(),
        ));
    }
    model.loss(data)?;
    let mut best: Option<(f64, usize, Mlp)> = None;
    let mut restarts = Vec::new();
    for r in 0..cfg.n_restarts {
        let seed = cfg.restart_seed(r);
        let mut m = model.clone();
        m.reinit(seed);
        let (loss, epochs) = run_once(&mut m, data, cfg)?;
        restarts.push(RestartRecord {
            seed,
            final_loss: loss,
            epochs,
        });
        if let Some(l) = loss {
            if best.as_ref().is_none_or(|b| l < b.0) {
                best = Some((l, epochs, m));
            }
            if l <= cfg.epsilon {
                break;
            }
        }
    }
    let failed = restarts.iter().filter(|r| r.final_loss.is_none()).count();
    let restarts_used = restarts.len();
    let (final_loss, epochs_used, trained) = match best {
        Some(b) => b,
        None => (f64::INFINITY, 0, model.clone()),
    };
    Ok((
        TrainResult {
            final_loss,
            reached_epsilon: final_loss <= cfg.epsilon,
            epochs_used,
            restarts_used,
            failed_restarts: failed,
            restarts,
        },
        trained,
    ))
}

/// Trains `model`'s architecture from scratch with the extra parameters in
/// `eliminate` zeroed and frozen.
pub fn eliminate_and_retrain(
    model: &Mlp,
    eliminate: &[usize],
    data: &Dataset,
    cfg: &TrainConfig,
) -> Result<(TrainResult, Mlp), OverparamError> {
    let mut mask = model.mask().to_vec();
    let mut removed = 0;
    for &i in eliminate {
        if i >= mask.len() {
            return Err(OverparamError::InvalidParameter(format!(
                "parameter index {i} out of range ({} parameters)",
                mask.len()
            )));
        }
        if mask[i] {
            mask[i] = false;
            removed += 1;
        }
    }
    if removed == 0 {
        return Err(OverparamError::NoOpElimination);
    }
    let mut reduced = model.clone();
    reduced.set_mask(mask)?;
    train(&reduced, data, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrays::{diagonal_blobs, gaussian_blobs, xor_dataset, DiagonalBlobs};
    use crate::overparam::{Activation, Architecture};

    fn linear() -> Mlp {
        Mlp::zeros(Architecture::binary(2, &[], Activation::Tanh).unwrap())
    }

    #[test]
    fn separable_blobs_reach_epsilon() {
        let ds = gaussian_blobs(30, 2, &[vec![-2.0, -2.0], vec![2.0, 2.0]], 0.5, 0).unwrap();
        let (res, trained) = train(&linear(), &ds, &TrainConfig::default()).unwrap();
        assert!(res.reached_epsilon, "{res:?}");
        assert!(res.final_loss <= 0.05);
        assert_eq!(trained.accuracy(&ds).unwrap(), 1.0);
    }

    #[test]
    fn xor_stays_above_half() {
        let ds = xor_dataset(5, 0.0, 0).unwrap();
        let cfg = TrainConfig {
            n_restarts: 5,
            ..TrainConfig::default()
        };
        let (res, _) = train(&linear(), &ds, &cfg).unwrap();
        assert!(!res.reached_epsilon);
        assert!(res.final_loss > 0.5);
        assert_eq!(res.restarts_used, 5);
    }

    #[test]
    fn zero_epochs_report_initial_loss() {
        let ds = gaussian_blobs(5, 2, &[vec![-1.0, 0.0], vec![1.0, 0.0]], 0.5, 1).unwrap();
        let cfg = TrainConfig {
            max_epochs: 0,
            n_restarts: 1,
            ..TrainConfig::default()
        };
        let (res, _) = train(&linear(), &ds, &cfg).unwrap();
        let init = Mlp::init(linear().architecture, cfg.restart_seed(0));
        assert_eq!(res.final_loss, init.loss(&ds).unwrap());
        assert_eq!(res.reached_epsilon, res.final_loss <= cfg.epsilon);
        assert_eq!(res.epochs_used, 0);
    }

    #[test]
    fn training_is_deterministic_and_respects_mask() {
        let ds = diagonal_blobs(&DiagonalBlobs::default(), 3).unwrap();
        let arch = Architecture::binary(2, &[6], Activation::Tanh).unwrap();
        let mut m = Mlp::zeros(arch);
        let mut mask = vec![true; m.params().len()];
        for i in [0, 3, 7, 12, 20] {
            mask[i] = false;
        }
        m.set_mask(mask.clone()).unwrap();
        let cfg = TrainConfig {
            max_epochs: 300,
            n_restarts: 2,
            epsilon: 1e-6,
            ..TrainConfig::default()
        };
        let (a, ma) = train(&m, &ds, &cfg).unwrap();
        let (b, mb) = train(&m, &ds, &cfg).unwrap();
        assert_eq!(a.final_loss.to_bits(), b.final_loss.to_bits());
        assert_eq!(ma.params(), mb.params());
        for (p, active) in ma.params().iter().zip(&mask) {
            if !active {
                assert_eq!(*p, 0.0);
            }
        }
    }

    #[test]
    fn divergence_counts_as_failed_restart() {
        let ds = gaussian_blobs(10, 2, &[vec![-50.0, 0.0], vec![50.0, 0.0]], 1.0, 2).unwrap();
        let arch = Architecture::binary(2, &[4], Activation::Relu).unwrap();
        let cfg = TrainConfig {
            learning_rate: 1e150,
            momentum: 0.0,
            n_restarts: 2,
            max_epochs: 50,
            epsilon: 1e-300,
            ..TrainConfig::default()
        };
        let (res, _) = train(&Mlp::zeros(arch), &ds, &cfg).unwrap();
        assert!(res.failed_restarts >= 1, "{res:?}");
        assert_eq!(res.restarts.len(), 2);
    }

    #[test]
    fn elimination_preconditions() {
        let ds = gaussian_blobs(5, 2, &[vec![-1.0, 0.0], vec![1.0, 0.0]], 0.5, 1).unwrap();
        let m = linear();
        assert!(matches!(
            eliminate_and_retrain(&m, &[], &ds, &TrainConfig::default()),
            Err(OverparamError::NoOpElimination)
        ));
        let err = eliminate_and_retrain(&m, &[0, 1, 2], &ds, &TrainConfig::default()).unwrap_err();
        assert_eq!(err.to_string(), "degenerate architecture: layer 0 has no active parameters");
    }

    #[test]
    fn wide_network_survives_losing_half_its_units() {
        let ds = gaussian_blobs(20, 2, &[vec![-2.0, -2.0], vec![2.0, 2.0]], 0.5, 4).unwrap();
        let arch = Architecture::binary(2, &[10], Activation::Tanh).unwrap();
        let m = Mlp::zeros(arch.clone());
        let mut drop = Vec::new();
        for unit in 0..5 {
            drop.extend(super::super::regime::unit_params(&arch, 0, unit));
        }
        let (res, trained) = eliminate_and_retrain(&m, &drop, &ds, &TrainConfig::default()).unwrap();
        assert!(res.reached_epsilon, "{res:?}");
        assert!(drop.iter().all(|&i| trained.params()[i] == 0.0));
    }

    #[test]
    fn diagonal_blobs_need_every_linear_parameter() {
        let ds = diagonal_blobs(&DiagonalBlobs::default(), 0).unwrap();
        let m = linear();
        let cfg = TrainConfig::default();
        assert!(train(&m, &ds, &cfg).unwrap().0.reached_epsilon);
        // Bias plus one weight, then each single parameter.
        for drop in [vec![2, 0], vec![2, 1], vec![0], vec![1], vec![2]] {
            let (res, _) = eliminate_and_retrain(&m, &drop, &ds, &cfg).unwrap();
            assert!(!res.reached_epsilon, "dropping {drop:?}: {res:?}");
        }
    }
}
