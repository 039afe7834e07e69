//! Chunk-based classifier ensembles with a fixed member capacity.
//!
//! Every processed chunk trains one new member; member weights are recomputed
//! on that chunk before it is trained on, so no member is ever scored on data
//! it has already seen (the freshly trained candidate being the one
//! exception). Pruning keeps the highest-weight members, dropping the oldest
//! on ties.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chunk::Chunk;
use crate::error::{CarError, Result};
use crate::learners::{fit_batch, LearnerSpec, TrainedModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Keep the members with the best chunk accuracy; unweighted voting.
    Sea,
    /// Weight members by how far their squared error beats a chance predictor.
    Awe,
    /// Weight members by chunk accuracy decayed geometrically with age.
    Wae,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub strategy: Strategy,
    pub capacity: usize,
    pub learner: LearnerSpec,
    /// Per-chunk geometric decay applied to member age under WAE.
    pub wae_age_decay: f64,
}

impl EnsembleConfig {
    pub fn new(strategy: Strategy, learner: LearnerSpec) -> Self {
        EnsembleConfig {
            strategy,
            capacity: 10,
            learner,
            wae_age_decay: 0.05,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.capacity < 1 {
            return Err(CarError::validation("capacity", "must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.wae_age_decay) {
            return Err(CarError::validation(
                "wae_age_decay",
                format!("must be in [0, 1], got {}", self.wae_age_decay),
            ));
        }
        self.learner.validate()
    }
}

/// One committee member: an immutable model, its voting weight, and its age in
/// chunks since admission.
#[derive(Debug, Clone)]
pub struct Member {
    pub model: TrainedModel,
    pub weight: f64,
    pub age: usize,
}

#[derive(Debug, Clone)]
pub struct EnsembleModel {
    config: EnsembleConfig,
    members: Vec<Member>,
}

impl EnsembleModel {
    pub fn new(config: EnsembleConfig) -> Result<Self> {
        config.validate()?;
        Ok(EnsembleModel {
            config,
            members: Vec::new(),
        })
    }

    pub fn config(&self) -> &EnsembleConfig {
        &self.config
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Weighted-majority vote over member predictions; the class with the
    /// largest summed weight wins, ties resolving to the lowest class index.
    pub fn predict(&self, features: &[f64]) -> Result<usize> {
        if self.members.is_empty() {
            return Err(CarError::Untrained);
        }
        let mut votes: BTreeMap<usize, f64> = BTreeMap::new();
        for member in &self.members {
            let class = member.model.predict(features)?;
            *votes.entry(class).or_insert(0.0) += member.weight;
        }
        let mut best_class = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (&class, &score) in &votes {
            if score > best_score {
                best_score = score;
                best_class = class;
            }
        }
        Ok(best_class)
    }

    /// Tests existing members on the chunk, trains one new member on it,
    /// recomputes weights per strategy, and prunes back to capacity.
    pub fn process_chunk(&mut self, chunk: &Chunk) -> Result<()> {
        if chunk.is_empty() {
            return Err(CarError::validation("chunk", "cannot process an empty chunk"));
        }
        match self.config.strategy {
            Strategy::Sea => {
                for member in &mut self.members {
                    member.age += 1;
                    member.weight = 1.0;
                }
                let candidate = fit_batch(&self.config.learner, chunk)?;
                let members = std::mem::take(&mut self.members);
                self.members =
                    sea_select_members(members, candidate, chunk, self.config.capacity)?;
            }
            Strategy::Awe => {
                let reference = chance_mse(chunk);
                for member in &mut self.members {
                    member.age += 1;
                    member.weight = (reference - model_mse(&member.model, chunk)?).max(0.0);
                }
                let candidate = fit_batch(&self.config.learner, chunk)?;
                let weight = (reference - model_mse(&candidate, chunk)?).max(0.0);
                self.members.push(Member {
                    model: candidate,
                    weight,
                    age: 0,
                });
                self.prune();
            }
            Strategy::Wae => {
                let decay = self.config.wae_age_decay;
                for member in &mut self.members {
                    member.age += 1;
                    let accuracy = model_accuracy(&member.model, chunk)?;
                    member.weight = wae_member_weight(accuracy, member.age, decay);
                }
                let candidate = fit_batch(&self.config.learner, chunk)?;
                let accuracy = model_accuracy(&candidate, chunk)?;
                self.members.push(Member {
                    model: candidate,
                    weight: wae_member_weight(accuracy, 0, decay),
                    age: 0,
                });
                self.prune();
            }
        }
        Ok(())
    }

    fn prune(&mut self) {
        self.members.sort_by(|a, b| {
            b.weight
                .partial_cmp(&a.weight)
                .expect("member weights are finite")
                .then(a.age.cmp(&b.age))
        });
        self.members.truncate(self.config.capacity);
    }
}

/// Fraction of chunk samples a model labels correctly.
pub fn model_accuracy(model: &TrainedModel, chunk: &Chunk) -> Result<f64> {
    if chunk.is_empty() {
        return Err(CarError::validation("chunk", "cannot score an empty chunk"));
    }
    let mut correct = 0usize;
    for sample in &chunk.samples {
        if model.predict(&sample.features)? == sample.label {
            correct += 1;
        }
    }
    Ok(correct as f64 / chunk.size() as f64)
}

/// Mean squared error of a chance predictor that emits the chunk's class
/// frequencies: `sum_c p(c) * (1 - p(c))^2`.
fn chance_mse(chunk: &Chunk) -> f64 {
    let total = chunk.size() as f64;
    chunk
        .class_counts()
        .values()
        .map(|&count| {
            let p = count as f64 / total;
            p * (1.0 - p) * (1.0 - p)
        })
        .sum()
}

/// Mean over samples of `(1 - predicted probability of the true class)^2`.
fn model_mse(model: &TrainedModel, chunk: &Chunk) -> Result<f64> {
    let mut sum = 0.0;
    for sample in &chunk.samples {
        let p = model.proba_of(&sample.features, sample.label)?;
        sum += (1.0 - p) * (1.0 - p);
    }
    Ok(sum / chunk.size() as f64)
}

/// AWE member weight on a chunk: chance-predictor MSE minus the model's MSE,
/// clipped at zero.
pub fn awe_member_weight(model: &TrainedModel, chunk: &Chunk) -> Result<f64> {
    if chunk.is_empty() {
        return Err(CarError::validation("chunk", "cannot weight on an empty chunk"));
    }
    Ok((chance_mse(chunk) - model_mse(model, chunk)?).max(0.0))
}

/// WAE member weight: accuracy decayed geometrically with age.
pub fn wae_member_weight(accuracy: f64, age: usize, decay: f64) -> f64 {
    accuracy * (1.0 - decay).powi(age as i32)
}

/// SEA lineup update: under capacity the candidate is admitted outright; at
/// capacity it replaces the worst member (lowest chunk accuracy, oldest on
/// ties) only when its own chunk accuracy is strictly better. Retained weights
/// are all 1.
pub fn sea_select_members(
    mut members: Vec<Member>,
    candidate: TrainedModel,
    chunk: &Chunk,
    capacity: usize,
) -> Result<Vec<Member>> {
    if chunk.is_empty() {
        return Err(CarError::validation("chunk", "cannot select on an empty chunk"));
    }
    let candidate_accuracy = model_accuracy(&candidate, chunk)?;
    let admitted = Member {
        model: candidate,
        weight: 1.0,
        age: 0,
    };
    if members.len() < capacity {
        members.push(admitted);
        return Ok(members);
    }
    let mut worst: Option<(usize, f64)> = None;
    for (i, member) in members.iter().enumerate() {
        let accuracy = model_accuracy(&member.model, chunk)?;
        let replace = match worst {
            None => true,
            Some((worst_idx, worst_acc)) => {
                accuracy < worst_acc
                    || (accuracy == worst_acc && member.age > members[worst_idx].age)
            }
        };
        if replace {
            worst = Some((i, accuracy));
        }
    }
    if let Some((idx, worst_accuracy)) = worst {
        if candidate_accuracy > worst_accuracy {
            members[idx] = admitted;
        }
    }
    Ok(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chunk::Sample;

    fn chunk_of(points: &[(f64, usize)]) -> Chunk {
        Chunk::new(
            points
                .iter()
                .map(|&(x, y)| Sample::new(vec![x], y))
                .collect(),
            0,
        )
    }

    /// Model that always predicts `class` with probability 1.
    fn constant_model(class: usize) -> TrainedModel {
        let points: Vec<(f64, usize)> = (0..4).map(|i| (i as f64, class)).collect();
        fit_batch(&LearnerSpec::gaussian_nb(), &chunk_of(&points)).unwrap()
    }

    fn member(class: usize, weight: f64, age: usize) -> Member {
        Member {
            model: constant_model(class),
            weight,
            age,
        }
    }

    fn ensemble_with(members: Vec<Member>) -> EnsembleModel {
        let mut e = EnsembleModel::new(EnsembleConfig::new(
            Strategy::Sea,
            LearnerSpec::gaussian_nb(),
        ))
        .unwrap();
        e.members = members;
        e
    }

    #[test]
    fn weighted_vote_picks_heaviest_class() {
        let e = ensemble_with(vec![member(0, 2.0, 0), member(1, 1.0, 1), member(1, 0.5, 2)]);
        assert_eq!(e.predict(&[0.0]).unwrap(), 0);
    }

    #[test]
    fn zero_weights_tie_to_lowest_voted_class() {
        let e = ensemble_with(vec![member(3, 0.0, 0), member(1, 0.0, 1)]);
        assert_eq!(e.predict(&[0.0]).unwrap(), 1);
    }

    #[test]
    fn single_member_is_identity() {
        let e = ensemble_with(vec![member(2, 0.7, 0)]);
        assert_eq!(e.predict(&[0.0]).unwrap(), 2);
    }

    #[test]
    fn empty_ensemble_rejects_prediction() {
        let e = ensemble_with(vec![]);
        assert!(matches!(e.predict(&[0.0]), Err(CarError::Untrained)));
    }

    #[test]
    fn awe_weight_of_perfect_probabilistic_classifier() {
        // Extreme separation makes the posterior exactly one-hot, so the model
        // MSE is 0 and the weight equals the chance MSE of 0.25.
        let mut points = Vec::new();
        for _ in 0..50 {
            points.push((-1000.0, 0));
            points.push((1000.0, 1));
        }
        let chunk = chunk_of(&points);
        let model = fit_batch(&LearnerSpec::gaussian_nb(), &chunk).unwrap();
        assert_eq!(awe_member_weight(&model, &chunk).unwrap(), 0.25);
    }

    #[test]
    fn awe_weight_of_coin_flip_classifier_is_zero() {
        // Identical feature distributions per class give a (0.5, 0.5) posterior
        // everywhere: model MSE 0.25 cancels the chance MSE exactly.
        let mut points = Vec::new();
        for i in 0..20 {
            points.push((i as f64, 0));
            points.push((i as f64, 1));
        }
        let chunk = chunk_of(&points);
        let model = fit_batch(&LearnerSpec::gaussian_nb(), &chunk).unwrap();
        assert_eq!(awe_member_weight(&model, &chunk).unwrap(), 0.0);
    }

    #[test]
    fn awe_weight_clips_below_chance_to_zero() {
        let always_zero = constant_model(0);
        let all_ones = chunk_of(&[(0.0, 1), (1.0, 1), (2.0, 1)]);
        assert_eq!(awe_member_weight(&always_zero, &all_ones).unwrap(), 0.0);
    }

    #[test]
    fn wae_weight_examples() {
        assert_eq!(wae_member_weight(0.9, 0, 0.05), 0.9);
        assert!((wae_member_weight(0.8, 2, 0.05) - 0.722).abs() < 1e-12);
        assert_eq!(wae_member_weight(0.8, 7, 0.0), 0.8);
    }

    #[test]
    fn sea_admits_under_capacity() {
        let members: Vec<Member> = (0..9).map(|i| member(0, 1.0, i)).collect();
        let chunk = chunk_of(&[(0.0, 1), (1.0, 1)]);
        let out = sea_select_members(members, constant_model(1), &chunk, 10).unwrap();
        assert_eq!(out.len(), 10);
    }

    #[test]
    fn sea_replaces_strictly_worse_member() {
        // All incumbents predict class 0; on an all-ones chunk they score 0 and
        // the candidate scores 1, so the oldest worst member is replaced.
        let members: Vec<Member> = (5..8).map(|age| member(0, 1.0, age)).collect();
        let chunk = chunk_of(&[(0.0, 1), (1.0, 1)]);
        let out = sea_select_members(members, constant_model(1), &chunk, 3).unwrap();
        assert_eq!(out.len(), 3);
        assert_eq!(out.iter().filter(|m| m.age == 0).count(), 1);
        // The oldest (age 7) was the tie-broken victim.
        assert!(out.iter().all(|m| m.age != 7));
    }

    #[test]
    fn sea_keeps_lineup_when_candidate_is_worse() {
        let members: Vec<Member> = (5..8).map(|age| member(1, 1.0, age)).collect();
        let chunk = chunk_of(&[(0.0, 1), (1.0, 1)]);
        let out = sea_select_members(members, constant_model(0), &chunk, 3).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.iter().all(|m| m.age != 0));
    }

    #[test]
    fn process_chunk_grows_then_holds_capacity() {
        let mut config = EnsembleConfig::new(Strategy::Awe, LearnerSpec::gaussian_nb());
        config.capacity = 10;
        let mut e = EnsembleModel::new(config).unwrap();
        let chunk = chunk_of(&[(-1.0, 0), (-0.8, 0), (0.9, 1), (1.1, 1)]);
        e.process_chunk(&chunk).unwrap();
        assert_eq!(e.len(), 1);
        for _ in 0..20 {
            e.process_chunk(&chunk).unwrap();
            assert!(e.len() <= 10);
        }
        assert_eq!(e.len(), 10);
    }

    #[test]
    fn process_chunk_is_deterministic() {
        let run = || {
            let mut e = EnsembleModel::new(EnsembleConfig::new(
                Strategy::Wae,
                LearnerSpec::gaussian_nb(),
            ))
            .unwrap();
            let chunks = [
                chunk_of(&[(-1.0, 0), (1.0, 1), (2.0, 1)]),
                chunk_of(&[(-2.0, 0), (-1.5, 0), (1.0, 1)]),
            ];
            for chunk in &chunks {
                e.process_chunk(chunk).unwrap();
            }
            e.members
                .iter()
                .map(|m| (m.weight, m.age))
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    mod properties {
        use crate::chunk::{Chunk, Sample};
        use crate::ensemble::{awe_member_weight, EnsembleConfig, EnsembleModel};
        use crate::learners::{fit_batch, LearnerSpec};
        use proptest::prelude::*;
        use proptest::strategy::Strategy as _;

        fn arbitrary_chunk() -> impl proptest::strategy::Strategy<Value = Chunk> {
            proptest::collection::vec(((-5.0f64..5.0), 0usize..3), 2..30).prop_map(|points| {
                Chunk::new(
                    points
                        .into_iter()
                        .map(|(x, y)| Sample::new(vec![x], y))
                        .collect(),
                    0,
                )
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            // Capacity holds and weights stay finite and non-negative under
            // any chunk sequence, for every strategy.
            #[test]
            fn capacity_and_weight_sanity(
                chunks in proptest::collection::vec(arbitrary_chunk(), 1..12),
                strategy_pick in 0usize..3,
                capacity in 1usize..6,
            ) {
                let strategy = [
                    crate::ensemble::Strategy::Sea,
                    crate::ensemble::Strategy::Awe,
                    crate::ensemble::Strategy::Wae,
                ][strategy_pick];
                let mut config = EnsembleConfig::new(strategy, LearnerSpec::gaussian_nb());
                config.capacity = capacity;
                let mut e = EnsembleModel::new(config).unwrap();
                for chunk in &chunks {
                    e.process_chunk(chunk).unwrap();
                    prop_assert!(e.len() <= capacity);
                    for m in e.members() {
                        prop_assert!(m.weight.is_finite() && m.weight >= 0.0);
                    }
                }
            }

            // Scaling all weights by a positive constant never changes the vote.
            #[test]
            fn vote_invariant_under_weight_scaling(
                chunk in arbitrary_chunk(),
                scale in 0.001f64..1000.0,
                x in -5.0f64..5.0,
            ) {
                let mut e = EnsembleModel::new(EnsembleConfig::new(
                    crate::ensemble::Strategy::Awe,
                    LearnerSpec::gaussian_nb(),
                ))
                .unwrap();
                for _ in 0..3 {
                    e.process_chunk(&chunk).unwrap();
                }
                let before = e.predict(&[x]).unwrap();
                for m in &mut e.members {
                    m.weight *= scale;
                }
                prop_assert_eq!(e.predict(&[x]).unwrap(), before);
            }

            // AWE weights stay within [0, chance MSE], with the chance MSE
            // recomputed independently here.
            #[test]
            fn awe_weight_bounds(chunk in arbitrary_chunk()) {
                let model = fit_batch(&LearnerSpec::gaussian_nb(), &chunk).unwrap();
                let w = awe_member_weight(&model, &chunk).unwrap();
                let total = chunk.size() as f64;
                let reference: f64 = chunk
                    .class_counts()
                    .values()
                    .map(|&c| {
                        let p = c as f64 / total;
                        p * (1.0 - p) * (1.0 - p)
                    })
                    .sum();
                prop_assert!(w >= 0.0);
                prop_assert!(w <= reference + 1e-12);
            }
        }
    }
}
