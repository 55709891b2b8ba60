//! Translation-embedding link prediction with onset-binned relation
//! augmentation: training, ranking evaluation, and the three-seed
//! structural-vs-temporal ablation.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::evaluation::stats::paired_t;
use crate::model::{collapse_bin, range_to_fine_bin, OnsetBinTable};

/// A plain (head, relation, tail) triple with an optional onset range used
/// for temporal augmentation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphTriple {
    pub head: String,
    pub relation: String,
    pub tail: String,
    pub onset: Option<(f64, f64)>,
}

/// How onset data is folded into relation names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinMode {
    None,
    Fine8,
    Coarse5,
}

/// Suffix relations with the onset bin of each triple; triples without
/// onset keep the plain relation.
pub fn augment_temporal(
    triples: &[GraphTriple],
    bin_mode: BinMode,
    table: &OnsetBinTable,
) -> Vec<GraphTriple> {
    triples
        .iter()
        .map(|t| {
            let relation = match (bin_mode, t.onset) {
                (BinMode::None, _) | (_, None) => t.relation.clone(),
                (mode, Some((lo, hi))) => match range_to_fine_bin(lo, hi, table) {
                    Ok(fine) => {
                        let bin = match mode {
                            BinMode::Fine8 => fine,
                            BinMode::Coarse5 => collapse_bin(fine, table).unwrap_or(fine),
                            BinMode::None => unreachable!(),
                        };
                        format!("{}_onset_{}", t.relation, bin.replace('-', "_"))
                    }
                    Err(_) => t.relation.clone(),
                },
            };
            GraphTriple {
                relation,
                head: t.head.clone(),
                tail: t.tail.clone(),
                onset: t.onset,
            }
        })
        .collect()
}

/// Training hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransEParams {
    pub dim: usize,
    pub margin: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
}

impl Default for TransEParams {
    fn default() -> Self {
        TransEParams {
            dim: 100,
            margin: 1.0,
            epochs: 100,
            batch_size: 1024,
            learning_rate: 0.01,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
        }
    }
}

/// Trained model: entity and relation embeddings plus vocabularies.
pub struct TransEModel {
    pub entity_index: BTreeMap<String, usize>,
    pub relation_index: BTreeMap<String, usize>,
    pub entity_emb: Vec<Vec<f64>>,
    pub relation_emb: Vec<Vec<f64>>,
    pub dim: usize,
    /// Mean margin loss per epoch, for monotonicity checks.
    pub epoch_losses: Vec<f64>,
}

struct Adam {
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    fn new(rows: usize, dim: usize) -> Self {
        Adam {
            m: vec![vec![0.0; dim]; rows],
            v: vec![vec![0.0; dim]; rows],
        }
    }

    fn step(
        &mut self,
        weights: &mut [Vec<f64>],
        grads: &BTreeMap<usize, Vec<f64>>,
        t: i32,
        p: &TransEParams,
    ) {
        let (b1, b2, eps, lr) = (p.adam_beta1, p.adam_beta2, p.adam_epsilon, p.learning_rate);
        let bias1 = 1.0 - b1.powi(t);
        let bias2 = 1.0 - b2.powi(t);
        for (&row, grad) in grads {
            for d in 0..grad.len() {
                let m = &mut self.m[row][d];
                let v = &mut self.v[row][d];
                *m = b1 * *m + (1.0 - b1) * grad[d];
                *v = b2 * *v + (1.0 - b2) * grad[d] * grad[d];
                let m_hat = *m / bias1;
                let v_hat = *v / bias2;
                weights[row][d] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
    }
}

fn l2_normalize(row: &mut [f64]) {
    let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in row {
            *x /= norm;
        }
    }
}

fn diff_norm(h: &[f64], r: &[f64], t: &[f64]) -> (Vec<f64>, f64) {
    let v: Vec<f64> = (0..h.len()).map(|i| h[i] + r[i] - t[i]).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (v, norm)
}

fn accumulate(grads: &mut BTreeMap<usize, Vec<f64>>, row: usize, dim: usize, scale: f64, v: &[f64]) {
    let g = grads.entry(row).or_insert_with(|| vec![0.0; dim]);
    for d in 0..dim {
        g[d] += scale * v[d];
    }
}

/// Train with margin ranking loss, one uniform head-or-tail corruption per
/// positive, Adam updates, and entity rows renormalized to unit L2 after
/// every step. Deterministic for a fixed seed.
pub fn train_transe(triples: &[GraphTriple], params: &TransEParams, seed: u64) -> Result<TransEModel> {
    if triples.is_empty() {
        return Err(Error::domain("training needs at least one triple"));
    }
    let mut entity_index: BTreeMap<String, usize> = BTreeMap::new();
    let mut relation_index: BTreeMap<String, usize> = BTreeMap::new();
    for t in triples {
        let n = entity_index.len();
        entity_index.entry(t.head.clone()).or_insert(n);
        let n = entity_index.len();
        entity_index.entry(t.tail.clone()).or_insert(n);
        let n = relation_index.len();
        relation_index.entry(t.relation.clone()).or_insert(n);
    }
    if entity_index.len() < 2 {
        return Err(Error::domain("vocabulary needs at least two entities"));
    }

    let dim = params.dim;
    let n_entities = entity_index.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = 6.0 / (dim as f64).sqrt();
    let mut init = |rows: usize| -> Vec<Vec<f64>> {
        (0..rows)
            .map(|_| (0..dim).map(|_| rng.random_range(-bound..bound)).collect())
            .collect()
    };
    let mut entity_emb = init(n_entities);
    let mut relation_emb = init(relation_index.len());
    for row in &mut entity_emb {
        l2_normalize(row);
    }
    for row in &mut relation_emb {
        l2_normalize(row);
    }

    let encoded: Vec<(usize, usize, usize)> = triples
        .iter()
        .map(|t| (entity_index[&t.head], relation_index[&t.relation], entity_index[&t.tail]))
        .collect();

    let mut entity_adam = Adam::new(n_entities, dim);
    let mut relation_adam = Adam::new(relation_index.len(), dim);
    let mut order: Vec<usize> = (0..encoded.len()).collect();
    let mut epoch_losses = Vec::with_capacity(params.epochs);
    let mut step = 0i32;

    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(params.batch_size) {
            let mut ent_grads: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
            let mut rel_grads: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
            let scale = 1.0 / batch.len() as f64;
            for &idx in batch {
                let (h, r, t) = encoded[idx];
                // Uniform corruption: replace head or tail with a random
                // entity.
                let corrupt_head = rng.random_bool(0.5);
                let candidate = rng.random_range(0..n_entities);
                let (ch, ct) = if corrupt_head { (candidate, t) } else { (h, candidate) };

                let (pos_v, pos_norm) = diff_norm(&entity_emb[h], &relation_emb[r], &entity_emb[t]);
                let (neg_v, neg_norm) = diff_norm(&entity_emb[ch], &relation_emb[r], &entity_emb[ct]);
                let loss = params.margin + pos_norm - neg_norm;
                if loss <= 0.0 {
                    continue;
                }
                epoch_loss += loss * scale;
                let pos_unit: Vec<f64> = pos_v.iter().map(|x| x / pos_norm.max(1e-12)).collect();
                let neg_unit: Vec<f64> = neg_v.iter().map(|x| x / neg_norm.max(1e-12)).collect();
                accumulate(&mut ent_grads, h, dim, scale, &pos_unit);
                accumulate(&mut ent_grads, t, dim, -scale, &pos_unit);
                accumulate(&mut ent_grads, ch, dim, -scale, &neg_unit);
                accumulate(&mut ent_grads, ct, dim, scale, &neg_unit);
                accumulate(&mut rel_grads, r, dim, scale, &pos_unit);
                accumulate(&mut rel_grads, r, dim, -scale, &neg_unit);
            }
            step += 1;
            entity_adam.step(&mut entity_emb, &ent_grads, step, params);
            relation_adam.step(&mut relation_emb, &rel_grads, step, params);
            for &row in ent_grads.keys() {
                l2_normalize(&mut entity_emb[row]);
            }
        }
        epoch_losses.push(epoch_loss / (encoded.len() as f64 / params.batch_size as f64).max(1.0));
    }

    Ok(TransEModel {
        entity_index,
        relation_index,
        entity_emb,
        relation_emb,
        dim,
        epoch_losses,
    })
}

/// Ranking metrics averaged over head and tail prediction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RankingMetrics {
    pub mrr: f64,
    pub hits_at_1: f64,
    pub hits_at_3: f64,
    pub hits_at_10: f64,
}

/// Candidate filtering mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    Raw,
    /// Other known-true candidates are removed before ranking.
    Filtered,
}

impl TransEModel {
    fn score(&self, h: usize, r: usize, t: usize) -> f64 {
        let (_, norm) = diff_norm(&self.entity_emb[h], &self.relation_emb[r], &self.entity_emb[t]);
        norm
    }
}

/// Rank the true entity among all candidates by ascending translation
/// distance; tied scores take the mean rank of the tied block.
pub fn evaluate_ranking(
    model: &TransEModel,
    test_triples: &[GraphTriple],
    all_triples: &[GraphTriple],
    mode: EvalMode,
) -> Result<RankingMetrics> {
    if test_triples.is_empty() {
        return Err(Error::domain("ranking evaluation needs test triples"));
    }
    let known: HashSet<(usize, usize, usize)> = all_triples
        .iter()
        .filter_map(|t| {
            Some((
                *model.entity_index.get(&t.head)?,
                *model.relation_index.get(&t.relation)?,
                *model.entity_index.get(&t.tail)?,
            ))
        })
        .collect();
    let n_entities = model.entity_index.len();
    let mut reciprocal = 0.0;
    let mut hits = [0.0f64; 3];
    let mut count = 0.0;

    for triple in test_triples {
        let (Some(&h), Some(&r), Some(&t)) = (
            model.entity_index.get(&triple.head),
            model.relation_index.get(&triple.relation),
            model.entity_index.get(&triple.tail),
        ) else {
            return Err(Error::domain(format!(
                "test triple ({}, {}, {}) outside the training vocabulary",
                triple.head, triple.relation, triple.tail
            )));
        };
        for predict_tail in [true, false] {
            let true_entity = if predict_tail { t } else { h };
            let true_score = model.score(h, r, t);
            let mut better = 0usize;
            let mut tied = 0usize;
            for candidate in 0..n_entities {
                if candidate == true_entity {
                    continue;
                }
                let key = if predict_tail { (h, r, candidate) } else { (candidate, r, t) };
                if mode == EvalMode::Filtered && known.contains(&key) {
                    continue;
                }
                let score = if predict_tail {
                    model.score(h, r, candidate)
                } else {
                    model.score(candidate, r, t)
                };
                if score < true_score {
                    better += 1;
                } else if score == true_score {
                    tied += 1;
                }
            }
            let rank = better as f64 + 1.0 + tied as f64 / 2.0;
            reciprocal += 1.0 / rank;
            for (i, k) in [1.0, 3.0, 10.0].iter().enumerate() {
                if rank <= *k {
                    hits[i] += 1.0;
                }
            }
            count += 1.0;
        }
    }
    Ok(RankingMetrics {
        mrr: reciprocal / count,
        hits_at_1: hits[0] / count,
        hits_at_3: hits[1] / count,
        hits_at_10: hits[2] / count,
    })
}

/// Mean and standard deviation of per-seed metrics for one condition.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub condition: String,
    pub per_seed_mrr: Vec<f64>,
    pub per_seed_raw_mrr: Vec<f64>,
    pub mrr_mean: f64,
    pub mrr_std: f64,
    pub hits_at_1_mean: f64,
    pub hits_at_3_mean: f64,
    pub hits_at_10_mean: f64,
    pub raw_mrr_mean: f64,
}

/// Structural-vs-temporal ablation report.
///
/// The headline gain and the paired t-test compare raw MRR: filtered
/// evaluation removes each disease's other known-true phenotypes from the
/// candidate list, which are exactly the targets the onset bins
/// disambiguate, so filtering masks the effect under study. Filtered
/// metrics are reported alongside for completeness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AblationReport {
    pub seeds: Vec<u64>,
    pub structural: ConditionSummary,
    pub temporal: ConditionSummary,
    /// (temporal - structural) / structural on mean raw MRR.
    pub relative_gain: f64,
    pub paired_t_p_value: f64,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

fn split_indices(n: usize, seed: u64) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let train_end = (n as f64 * 0.8).floor() as usize;
    let valid_end = (n as f64 * 0.9).floor() as usize;
    (
        order[..train_end].to_vec(),
        order[train_end..valid_end].to_vec(),
        order[valid_end..].to_vec(),
    )
}

fn take(triples: &[GraphTriple], idx: &[usize]) -> Vec<GraphTriple> {
    idx.iter().map(|&i| triples[i].clone()).collect()
}

/// Run the structural and temporal conditions over shared 80/10/10 splits
/// and compare filtered MRR with a paired t-test.
///
/// The split is drawn per seed on the base triples before augmentation, so
/// both conditions train and test on exactly the same positives. A test
/// triple is kept only when its entities appear in the train split and its
/// temporal-augmented relation appears in the temporal train set, keeping
/// the two conditions' test sets identical.
pub fn ablation_run(
    base_triples: &[GraphTriple],
    bin_mode: BinMode,
    seeds: &[u64],
    params: &TransEParams,
    table: &OnsetBinTable,
) -> Result<AblationReport> {
    if base_triples.is_empty() {
        return Err(Error::domain("ablation needs input triples"));
    }
    if seeds.is_empty() {
        return Err(Error::domain("ablation needs at least one seed"));
    }
    let structural_triples = augment_temporal(base_triples, BinMode::None, table);
    let temporal_triples = augment_temporal(base_triples, bin_mode, table);

    let mut per_seed_tests: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for &seed in seeds {
        let (train_idx, _valid_idx, test_idx) = split_indices(base_triples.len(), seed);
        let train_entities: HashSet<&str> = train_idx
            .iter()
            .flat_map(|&i| [base_triples[i].head.as_str(), base_triples[i].tail.as_str()])
            .collect();
        let temporal_train_relations: HashSet<&str> = train_idx
            .iter()
            .map(|&i| temporal_triples[i].relation.as_str())
            .collect();
        let eligible: Vec<usize> = test_idx
            .into_iter()
            .filter(|&i| {
                train_entities.contains(base_triples[i].head.as_str())
                    && train_entities.contains(base_triples[i].tail.as_str())
                    && temporal_train_relations.contains(temporal_triples[i].relation.as_str())
            })
            .collect();
        if eligible.is_empty() {
            return Err(Error::domain(format!(
                "seed {seed}: test split is empty after vocabulary filtering; the graph is too small or too sparse"
            )));
        }
        per_seed_tests.push((train_idx, eligible));
    }

    let mut summaries: Vec<ConditionSummary> = Vec::new();
    for (name, triples) in [
        ("structural", &structural_triples),
        ("temporal", &temporal_triples),
    ] {
        let mut per_seed = Vec::new();
        let mut raw_per_seed = Vec::new();
        let mut h1 = Vec::new();
        let mut h3 = Vec::new();
        let mut h10 = Vec::new();
        for (&seed, (train_idx, test_idx)) in seeds.iter().zip(&per_seed_tests) {
            let train = take(triples, train_idx);
            let test = take(triples, test_idx);
            let model = train_transe(&train, params, seed)?;
            let filtered = evaluate_ranking(&model, &test, triples, EvalMode::Filtered)?;
            let raw = evaluate_ranking(&model, &test, triples, EvalMode::Raw)?;
            per_seed.push(filtered.mrr);
            raw_per_seed.push(raw.mrr);
            h1.push(filtered.hits_at_1);
            h3.push(filtered.hits_at_3);
            h10.push(filtered.hits_at_10);
        }
        let (mrr_mean, mrr_std) = mean_std(&per_seed);
        summaries.push(ConditionSummary {
            condition: name.to_string(),
            per_seed_mrr: per_seed,
            mrr_mean,
            mrr_std,
            hits_at_1_mean: mean_std(&h1).0,
            hits_at_3_mean: mean_std(&h3).0,
            hits_at_10_mean: mean_std(&h10).0,
            raw_mrr_mean: mean_std(&raw_per_seed).0,
            per_seed_raw_mrr: raw_per_seed,
        });
    }
    let temporal = summaries.pop().unwrap();
    let structural = summaries.pop().unwrap();
    let p = if seeds.len() >= 2 {
        paired_t(&temporal.per_seed_raw_mrr, &structural.per_seed_raw_mrr)?
    } else {
        1.0
    };
    Ok(AblationReport {
        seeds: seeds.to_vec(),
        relative_gain: (temporal.raw_mrr_mean - structural.raw_mrr_mean)
            / structural.raw_mrr_mean,
        paired_t_p_value: p,
        structural,
        temporal,
    })
}
