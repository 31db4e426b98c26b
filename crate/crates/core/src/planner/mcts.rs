use std::collections::HashMap;
use std::hash::Hash;

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Result of applying an action in the generative model.
#[derive(Debug, Clone)]
pub struct Transition<S> {
    pub next: S,
    pub collided: bool,
}

/// A generative model searched by [`Mcts`].
pub trait SearchModel {
    type State;
    type Action: Copy + PartialEq + std::fmt::Debug;
    type Key: Eq + Hash + Clone;

    /// Root state of one iteration, with any hidden quantities sampled.
    fn root<R: Rng>(&self, rng: &mut R) -> Self::State;
    fn key(&self, state: &Self::State, depth: usize) -> Self::Key;
    /// Candidate actions; the driving-policy action comes first.
    fn candidates(&self, state: &Self::State) -> Vec<Self::Action>;
    fn step<R: Rng>(&self, state: &Self::State, action: Self::Action, rng: &mut R) -> Transition<Self::State>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MctsConfig {
    pub discount: f64,
    /// Reward per safe step r_c.
    pub safe_reward: f64,
    /// Value bonus of the driving-policy action c_thres.
    pub adapter: f64,
    /// Search depth H.
    pub depth: usize,
    pub iterations: usize,
    /// UCT exploration constant c.
    pub exploration: f64,
}

impl Default for MctsConfig {
    fn default() -> Self {
        Self {
            discount: 0.95,
            safe_reward: 5.0,
            adapter: 1.0,
            depth: 12,
            iterations: 1200,
            exploration: 10.0,
        }
    }
}

impl MctsConfig {
    /// Largest achievable discounted return, `r_c(1 − γ^H)/(1 − γ)`.
    pub fn max_return(&self) -> f64 {
        self.safe_reward * (1.0 - self.discount.powi(self.depth as i32)) / (1.0 - self.discount)
    }
}

/// Per-step reward: `r_c` while driving safely, 0 on collision.
pub fn reward(collided: bool, cfg: &MctsConfig) -> f64 {
    if collided {
        0.0
    } else {
        cfg.safe_reward
    }
}

#[derive(Debug, Clone)]
pub struct Node<A> {
    pub actions: Vec<A>,
    pub visits: Vec<u32>,
    pub values: Vec<f64>,
    pub total: u32,
}

impl<A> Node<A> {
    fn new(actions: Vec<A>) -> Self {
        let n = actions.len();
        Self {
            actions,
            visits: vec![0; n],
            values: vec![0.0; n],
            total: 0,
        }
    }
}

/// UCT choice with the driving-policy bonus on index 0:
/// `Q + c·√(ln N / n) + δ`. Unvisited actions come first in list order when
/// exploring (`c > 0`). Ties keep the earlier action.
pub fn select_action<A>(node: &Node<A>, cfg: &MctsConfig) -> usize {
    if cfg.exploration > 0.0 {
        if let Some(i) = node.visits.iter().position(|&n| n == 0) {
            return i;
        }
    }
    let ln_n = (node.total.max(1) as f64).ln();
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for i in 0..node.actions.len() {
        let n = node.visits[i];
        let bonus = if cfg.exploration > 0.0 {
            cfg.exploration * (ln_n / n as f64).sqrt()
        } else {
            0.0
        };
        let delta = if i == 0 { cfg.adapter } else { 0.0 };
        let score = node.values[i] + bonus + delta;
        if score > best_score {
            best_score = score;
            best = i;
        }
    }
    best
}

/// Final choice: `argmax Q + δ` over visited actions.
pub fn best_action<A>(node: &Node<A>, cfg: &MctsConfig) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for i in 0..node.actions.len() {
        if node.visits[i] == 0 {
            continue;
        }
        let delta = if i == 0 { cfg.adapter } else { 0.0 };
        let score = node.values[i] + delta;
        if score > best_score {
            best_score = score;
            best = i;
        }
    }
    best
}

pub struct Mcts<M: SearchModel> {
    pub nodes: HashMap<M::Key, Node<M::Action>>,
    pub cfg: MctsConfig,
}

impl<M: SearchModel> Mcts<M> {
    pub fn new(cfg: MctsConfig) -> Self {
        Self {
            nodes: HashMap::new(),
            cfg,
        }
    }

    /// Runs the configured number of iterations from fresh roots and returns
    /// the root key.
    pub fn search<R: Rng>(&mut self, model: &M, rng: &mut R) -> Option<M::Key> {
        let mut root_key = None;
        for _ in 0..self.cfg.iterations {
            let root = model.root(rng);
            if root_key.is_none() {
                root_key = Some(model.key(&root, self.cfg.depth));
            }
            self.simulate(model, &root, self.cfg.depth, rng);
        }
        root_key
    }

    /// One iteration below `state`, returning its discounted return. A node
    /// seen for the first time follows the driving-policy action.
    pub fn simulate<R: Rng>(&mut self, model: &M, state: &M::State, depth: usize, rng: &mut R) -> f64 {
        if depth == 0 {
            return 0.0;
        }
        let key = model.key(state, depth);
        let (index, action) = match self.nodes.get(&key) {
            Some(node) => {
                let i = select_action(node, &self.cfg);
                (i, node.actions[i])
            }
            None => {
                let node = Node::new(model.candidates(state));
                let a = node.actions[0];
                self.nodes.insert(key.clone(), node);
                (0, a)
            }
        };
        let t = model.step(state, action, rng);
        let q = if t.collided {
            reward(true, &self.cfg)
        } else {
            reward(false, &self.cfg) + self.cfg.discount * self.simulate(model, &t.next, depth - 1, rng)
        };
        let node = self.nodes.get_mut(&key).expect("node inserted above");
        node.total += 1;
        node.visits[index] += 1;
        node.values[index] += (q - node.values[index]) / node.visits[index] as f64;
        q
    }
}
