//! Reference bot policies.

use thiserror::Error;

use crate::group::Residue;
use crate::rules::{mix_seed, process_cancellations, GameRng, GameState, Move};

/// What a policy wants to do with its turn.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision<R> {
    /// Voluntary draws before the move.
    pub pre_draws: usize,
    pub mv: Move<R>,
}

impl<R> Decision<R> {
    pub fn play(mv: Move<R>) -> Self {
        Decision { pre_draws: 0, mv }
    }
}

/// A bot. The harness asks `wants_final_round` only when announcing is
/// legal, and `decide` only when at least one legal move exists.
pub trait Policy<R: Residue>: Send {
    fn name(&self) -> &str;

    fn wants_final_round(&mut self, state: &GameState<R>, player: usize) -> bool;

    fn decide(&mut self, state: &GameState<R>, player: usize) -> Decision<R>;
}

/// Legal moves with null exchanges dropped, unless nothing else is legal.
pub fn candidate_moves<R: Residue>(state: &GameState<R>, player: usize) -> Vec<Move<R>> {
    let all = state.enumerate_moves(player);
    let useful: Vec<_> = all.iter().filter(|m| !m.is_null()).cloned().collect();
    if useful.is_empty() {
        all
    } else {
        useful
    }
}

/// Uniform over the candidate moves; announces with probability 1/2.
pub struct RandomPolicy {
    rng: GameRng,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        RandomPolicy { rng: GameRng::seeded(seed) }
    }
}

impl<R: Residue> Policy<R> for RandomPolicy {
    fn name(&self) -> &str {
        "random"
    }

    fn wants_final_round(&mut self, state: &GameState<R>, player: usize) -> bool {
        !state.has_legal_play(player) || self.rng.coin()
    }

    fn decide(&mut self, state: &GameState<R>, player: usize) -> Decision<R> {
        let mut moves = candidate_moves(state, player);
        assert!(!moves.is_empty(), "decide called without a legal move");
        let i = self.rng.index(moves.len()) as usize;
        Decision::play(moves.swap_remove(i))
    }
}

/// One-ply maximizer of (net hand reduction, draw-forcing cancellations,
/// fewest pieces taken); ties go to the earliest move in canonical order.
#[derive(Default)]
pub struct GreedyPolicy;

/// Greedy's score for `mv`; larger is better.
pub fn greedy_score<R: Residue>(state: &GameState<R>, mv: &Move<R>) -> (i64, usize, i64) {
    let params = state.params();
    let (placed, taken) = match mv {
        Move::Spectrum => (crate::rules::spectrum_set(params), 1),
        Move::Exchange { give, take } => (give.clone(), take.len()),
        Move::Pass => return (0, 0, 0),
    };
    let mut center = state.center().clone();
    if let Move::Exchange { take, .. } = mv {
        center.remove_all(take);
    } else {
        center.remove_one(&params.identity());
    }
    center.add_all(&placed);
    let forcing = process_cancellations(params, &mut center, &placed).forced;
    (mv.net_reduction(params), forcing, -(taken as i64))
}

impl<R: Residue> Policy<R> for GreedyPolicy {
    fn name(&self) -> &str {
        "greedy"
    }

    fn wants_final_round(&mut self, state: &GameState<R>, player: usize) -> bool {
        let hand = state.hand(player).len() as i64;
        let moves = state.enumerate_moves(player);
        moves.is_empty() || moves.iter().any(|m| hand - m.net_reduction(state.params()) == 1)
    }

    fn decide(&mut self, state: &GameState<R>, player: usize) -> Decision<R> {
        let moves = candidate_moves(state, player);
        let mut best: Option<(Move<R>, (i64, usize, i64))> = None;
        for mv in moves {
            let score = greedy_score(state, &mv);
            if best.as_ref().is_none_or(|(_, s)| score > *s) {
                best = Some((mv, score));
            }
        }
        Decision::play(best.expect("decide called without a legal move").0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown policy {0:?} (expected random or greedy)")]
pub struct UnknownPolicy(pub String);

pub const POLICY_NAMES: [&str; 2] = ["random", "greedy"];

pub fn policy_by_name<R: Residue>(name: &str, seed: u64) -> Result<Box<dyn Policy<R>>, UnknownPolicy> {
    match name {
        "random" => Ok(Box::new(RandomPolicy::new(seed))),
        "greedy" => Ok(Box::new(GreedyPolicy)),
        other => Err(UnknownPolicy(other.to_string())),
    }
}

/// Seed of the policy in `seat` for a match seeded with `match_seed`.
pub fn seed_for(match_seed: u64, seat: usize) -> u64 {
    mix_seed(match_seed, seat as u64 + 1)
}
