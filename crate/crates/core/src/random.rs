//! Seeded generators for random posets, games and refinement sequences.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::game::{MetricDecl, Player, PosetalGame};
use crate::order::Poset;
use crate::preference::{OutcomeVector, Preference, RefinementOp};

/// Random partial order: nodes are shuffled into a hidden linear order and
/// each forward pair becomes an edge with probability `p`.
pub fn random_poset<R: Rng + ?Sized>(rng: &mut R, ids: &[String], p: f64) -> Poset {
    let mut order: Vec<&String> = ids.iter().collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for a in 0..order.len() {
        for b in a + 1..order.len() {
            if rng.gen_bool(p) {
                edges.push((order[a].clone(), order[b].clone()));
            }
        }
    }
    Poset::new(ids.iter().cloned(), edges).expect("forward edges of a linear order are acyclic")
}

#[derive(Debug, Clone)]
pub struct RandomGameConfig {
    pub max_players: usize,
    pub max_actions: usize,
    pub max_metrics: usize,
    /// Metrics declared and present in every outcome vector but ranked by
    /// no player, available for augmentation.
    pub spare_metrics: usize,
    /// Outcome values are drawn from `0..levels`; small values force ties.
    pub levels: u32,
}

impl Default for RandomGameConfig {
    fn default() -> Self {
        RandomGameConfig { max_players: 3, max_actions: 4, max_metrics: 4, spare_metrics: 2, levels: 4 }
    }
}

pub fn spare_metric_id(k: usize) -> String {
    format!("s{k}")
}

/// A game with joint metrics `m0..`, random carrier subsets and posets, and
/// small integer outcome values.
pub fn random_game<R: Rng + ?Sized>(rng: &mut R, cfg: &RandomGameConfig) -> PosetalGame {
    let n_players = rng.gen_range(1..=cfg.max_players);
    let n_metrics = rng.gen_range(1..=cfg.max_metrics);
    let metric_ids: Vec<String> = (0..n_metrics).map(|k| format!("m{k}")).collect();
    let spare: Vec<String> = (0..cfg.spare_metrics).map(spare_metric_id).collect();
    let players: Vec<Player> = (0..n_players)
        .map(|i| {
            let n_actions = rng.gen_range(1..=cfg.max_actions);
            let mut carrier: Vec<String> =
                metric_ids.iter().filter(|_| rng.gen_bool(0.7)).cloned().collect();
            if carrier.is_empty() {
                carrier.push(metric_ids.choose(rng).unwrap().clone());
            }
            let p = rng.gen_range(0.0..=1.0);
            Player {
                id: format!("P{}", i + 1),
                actions: (0..n_actions).map(|a| format!("a{a}")).collect(),
                preference: Preference::new(random_poset(rng, &carrier, p)),
            }
        })
        .collect();
    let metrics = metric_ids.iter().chain(&spare).map(|m| MetricDecl::joint(m)).collect();
    let levels = cfg.levels.max(1);
    PosetalGame::from_fn(metrics, players, true, |_, _| {
        metric_ids
            .iter()
            .chain(&spare)
            .map(|m| (m.clone(), rng.gen_range(0..levels) as f64))
            .collect::<OutcomeVector>()
    })
    .expect("generated game is well formed")
}

/// Up to `count` operations, each valid on the preference produced by the
/// previous ones. `spare` lists metrics that augmentation may add.
pub fn random_refinement_ops<R: Rng + ?Sized>(
    rng: &mut R,
    pref: &Preference,
    spare: &[String],
    count: usize,
) -> Vec<RefinementOp> {
    let mut ops = Vec::new();
    let mut cur = pref.clone();
    let mut spare: Vec<String> = spare.to_vec();
    for _ in 0..count {
        let nodes = cur.carrier().to_vec();
        let mut pairs = Vec::new();
        for a in 0..nodes.len() {
            for b in a + 1..nodes.len() {
                if !cur.poset().comparable(&nodes[a], &nodes[b]).unwrap() {
                    pairs.push((nodes[a].clone(), nodes[b].clone()));
                }
            }
        }
        let leaves = cur.leaves().unwrap();
        spare.retain(|s| !leaves.contains(s));
        let mut kinds = Vec::new();
        if !pairs.is_empty() {
            kinds.extend([0, 1]);
        }
        if !spare.is_empty() {
            kinds.push(2);
        }
        let Some(&kind) = kinds.choose(rng) else { break };
        let op = match kind {
            0 => {
                let (a, b) = pairs.choose(rng).unwrap().clone();
                let (lower, higher) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
                RefinementOp::PriorityRefine { lower, higher }
            }
            1 => {
                let (left, right) = pairs.choose(rng).unwrap().clone();
                let w = [0.5, 1.0, 2.0];
                RefinementOp::Aggregate { left, right, weights: [*w.choose(rng).unwrap(), *w.choose(rng).unwrap()] }
            }
            _ => RefinementOp::Augment { metric: spare.choose(rng).unwrap().clone() },
        };
        cur = cur.apply(&op).expect("generated operation is applicable");
        ops.push(op);
    }
    ops
}

#[derive(Debug, Clone)]
pub struct ConditionsGameConfig {
    pub min_players: usize,
    pub max_players: usize,
    pub max_actions: usize,
    pub max_joint: usize,
    pub max_personal: usize,
    pub levels: u32,
}

impl Default for ConditionsGameConfig {
    fn default() -> Self {
        ConditionsGameConfig {
            min_players: 2,
            max_players: 3,
            max_actions: 4,
            max_joint: 2,
            max_personal: 3,
            levels: 4,
        }
    }
}

/// A game meeting both existence conditions: a chain of shared joint
/// metrics (equal for all players) ranked above each player's own random
/// poset of personal metrics, which depend only on that player's action.
pub fn conditions_game<R: Rng + ?Sized>(rng: &mut R, cfg: &ConditionsGameConfig) -> PosetalGame {
    let n_players = rng.gen_range(cfg.min_players..=cfg.max_players);
    let n_joint = rng.gen_range(1..=cfg.max_joint);
    let n_personal = rng.gen_range(1..=cfg.max_personal);
    let joint: Vec<String> = (0..n_joint).map(|k| format!("j{k}")).collect();
    let personal: Vec<String> = (0..n_personal).map(|k| format!("p{k}")).collect();
    let levels = cfg.levels.max(1);

    let mut actions = Vec::new();
    let mut players = Vec::new();
    for i in 0..n_players {
        let n_actions = rng.gen_range(1..=cfg.max_actions);
        actions.push(n_actions);
        let own: Vec<String> = personal.iter().filter(|_| rng.gen_bool(0.8)).cloned().collect();
        let own = if own.is_empty() { vec![personal[0].clone()] } else { own };
        let density = rng.gen_range(0.0..=1.0);
        let base = random_poset(rng, &own, density);
        let mut edges = base.hasse_edges();
        for w in joint.windows(2) {
            edges.push((w[1].clone(), w[0].clone()));
        }
        for m in base.maximal_elements() {
            edges.push((m, joint[n_joint - 1].clone()));
        }
        let nodes: Vec<String> = joint.iter().chain(&own).cloned().collect();
        players.push(Player {
            id: format!("P{}", i + 1),
            actions: (0..n_actions).map(|a| format!("a{a}")).collect(),
            preference: Preference::new(Poset::new(nodes, edges).expect("chain over a poset")),
        });
    }

    let total: usize = actions.iter().product();
    let joint_vals: Vec<Vec<f64>> =
        (0..total).map(|_| (0..n_joint).map(|_| rng.gen_range(0..levels) as f64).collect()).collect();
    let personal_vals: Vec<Vec<Vec<f64>>> = actions
        .iter()
        .map(|&k| {
            (0..k).map(|_| (0..n_personal).map(|_| rng.gen_range(0..levels) as f64).collect()).collect()
        })
        .collect();
    let metrics = joint
        .iter()
        .map(|m| MetricDecl::joint(m))
        .chain(personal.iter().map(|m| MetricDecl::personal(m)))
        .collect();
    PosetalGame::from_fn(metrics, players, true, |prof, i| {
        let idx = prof.iter().zip(&actions).fold(0, |acc, (&a, &k)| acc * k + a);
        let mut o: OutcomeVector = joint.iter().cloned().zip(joint_vals[idx].iter().copied()).collect();
        for (m, v) in personal.iter().zip(&personal_vals[i][prof[i]]) {
            o.insert(m.clone(), *v);
        }
        o
    })
    .expect("generated game is well formed")
}
