//! Self-play harness: single matches with per-turn auditing, and seeded
//! tournaments.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::group::Residue;
use crate::policy::{policy_by_name, seed_for, Policy, UnknownPolicy};
use crate::rules::{
    write_log, ConfigSummary, EngineError, FinalCause, GameConfig, GameEvent, GameState, InvariantViolation, Rejection,
};

/// Hard stop for a match that fails to terminate.
pub const MAX_TURNS: u64 = 100_000;
/// Most voluntary draws a bot may take in one turn.
pub const MAX_BOT_DRAWS: usize = 3;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{policies} policies for {players} players")]
    PolicyCount { policies: usize, players: usize },
    #[error(transparent)]
    UnknownPolicy(#[from] UnknownPolicy),
    #[error("turn {turn}: {source}")]
    Engine { turn: u64, source: EngineError },
    #[error("turn {turn}: policy {policy} chose an illegal move: {reason}")]
    IllegalDecision { turn: u64, policy: String, reason: Rejection },
    #[error("turn {turn}: player {player} asked for {draws} draws (limit {MAX_BOT_DRAWS})")]
    TooManyDraws { turn: u64, player: usize, draws: usize },
    #[error("turn {turn}: invariant violated: {violation}")]
    Invariant { turn: u64, violation: InvariantViolation },
    #[error("turn {turn}: player {player} shed {reduction} pieces, more than n")]
    ReductionExceeded { turn: u64, player: usize, reduction: i64 },
    #[error("no result after {MAX_TURNS} turns (seed {seed})")]
    NonTerminating { seed: u64 },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// How the final round was signaled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TriggerRecord {
    pub player: usize,
    pub cause: FinalCause,
    pub round: u32,
    pub after_turns: u32,
}

/// Summary of one finished match.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchRecord {
    pub config: ConfigSummary,
    pub seed: u64,
    /// Policy name per seat.
    pub policies: Vec<String>,
    pub winners: Vec<usize>,
    pub turns: u64,
    pub rounds: u32,
    /// Every player's hand size after each turn.
    pub hand_sizes: Vec<Vec<usize>>,
    pub final_hands: Vec<usize>,
    pub cancellations: usize,
    /// Identity pieces received through cancellations, per player.
    pub forced_draws: Vec<usize>,
    pub trigger: Option<TriggerRecord>,
    /// Largest hand reduction seen in any single turn.
    pub max_reduction: i64,
}

/// Plays one turn for the player to act: optional announcement, compelled
/// draws, the policy's move. Every decision is validated first. Returns
/// the hand size just before the move (after any draws) and the outcome.
pub fn play_turn<R: Residue>(
    state: &mut GameState<R>,
    policy: &mut dyn Policy<R>,
    turn: u64,
) -> Result<(usize, crate::rules::TurnOutcome<R>), SimError> {
    let player = state.to_act();
    let engine = |source| SimError::Engine { turn, source };
    if state.can_announce(player) && policy.wants_final_round(state, player) {
        state.announce_final(player).map_err(engine)?;
    }
    if state.is_stuck(player) {
        state.resolve_stuck(player).map_err(engine)?;
        audit(state, turn)?;
    }
    if !state.has_legal_play(player) && state.can_announce(player) {
        // n or fewer pieces and nothing to play: end the game rather than
        // drawing blind
        state.announce_final(player).map_err(engine)?;
    }
    let before = state.hand(player).len();
    let decision = policy.decide(state, player);
    if decision.pre_draws > MAX_BOT_DRAWS {
        return Err(SimError::TooManyDraws { turn, player, draws: decision.pre_draws });
    }
    state
        .validate_move(player, &decision.mv)
        .map_err(|reason| SimError::IllegalDecision { turn, policy: policy.name().to_string(), reason })?;
    let outcome = state.apply_move(player, decision.mv, decision.pre_draws).map_err(engine)?;
    Ok((before + outcome.drawn.len(), outcome))
}

fn audit<R: Residue>(state: &GameState<R>, turn: u64) -> Result<(), SimError> {
    state.check_invariants().map_err(|violation| SimError::Invariant { turn, violation })
}

/// Plays `config` to the end with one policy per seat, checking every
/// invariant after every turn.
pub fn run_match<R: Residue>(
    config: GameConfig,
    policies: &mut [Box<dyn Policy<R>>],
) -> Result<(MatchRecord, GameState<R>), SimError> {
    if policies.len() != config.players() {
        return Err(SimError::PolicyCount { policies: policies.len(), players: config.players() });
    }
    let seed = config.seed();
    let n = config.params().n() as i64;
    let mut state = GameState::new(config).map_err(|source| SimError::Engine { turn: 0, source })?;
    audit(&state, 0)?;
    let mut hand_sizes = Vec::new();
    let mut cancellations = 0;
    let mut forced_draws = vec![0; state.players()];
    let mut max_reduction = i64::MIN;
    let mut turn = 0;
    while !state.is_finished() {
        turn += 1;
        if turn > MAX_TURNS {
            return Err(SimError::NonTerminating { seed });
        }
        let player = state.to_act();
        let (before, outcome) = play_turn(&mut state, policies[player].as_mut(), turn)?;
        audit(&state, turn)?;
        let reduction = before as i64 - state.hand(player).len() as i64;
        if reduction > n {
            return Err(SimError::ReductionExceeded { turn, player, reduction });
        }
        max_reduction = max_reduction.max(reduction);
        cancellations += outcome.cancellations.tuples();
        for (total, k) in forced_draws.iter_mut().zip(&outcome.forced_draws) {
            *total += k;
        }
        hand_sizes.push(state.hand_sizes());
    }
    let record = MatchRecord {
        config: state.config().summary(),
        seed,
        policies: policies.iter().map(|p| p.name().to_string()).collect(),
        winners: state.winners().map_err(|source| SimError::Engine { turn, source })?,
        turns: state.turns_played(),
        rounds: state.round(),
        hand_sizes,
        final_hands: state.hand_sizes(),
        cancellations,
        forced_draws,
        trigger: state.final_trigger().map(|t| TriggerRecord {
            player: t.player,
            cause: t.cause,
            round: t.round,
            after_turns: t.after_turns,
        }),
        max_reduction,
    };
    Ok((record, state))
}

/// Builds the seat policies for a match and plays it.
pub fn run_named<R: Residue>(config: GameConfig, names: &[String]) -> Result<(MatchRecord, GameState<R>), SimError> {
    let seed = config.seed();
    let mut policies = names
        .iter()
        .enumerate()
        .map(|(seat, name)| policy_by_name::<R>(name, seed_for(seed, seat)))
        .collect::<Result<Vec<_>, _>>()?;
    run_match(config, &mut policies)
}

/// A batch of seeded matches. Game `i` uses seed `base_seed + i`, and
/// the matchup is rotated by `i` seats so no entry keeps the first move.
#[derive(Clone, Debug)]
pub struct Tournament {
    pub config: GameConfig,
    pub matchup: Vec<String>,
    pub games: usize,
    pub base_seed: u64,
}

/// One tournament game, with the matchup entry occupying each seat.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TournamentGame {
    pub index: usize,
    /// `entry_of_seat[s]` is the matchup entry playing seat `s`.
    pub entry_of_seat: Vec<usize>,
    pub record: MatchRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryStats {
    pub entry: usize,
    pub policy: String,
    /// Shared wins count 1/k each.
    pub wins: f64,
    pub win_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TournamentSummary {
    pub games: usize,
    pub entries: Vec<EntryStats>,
    /// Game length in turns → number of games.
    pub length_histogram: BTreeMap<u64, usize>,
    pub min_turns: u64,
    pub max_turns: u64,
    pub mean_turns: f64,
    pub cancellations: usize,
    pub forced_draws: usize,
}

impl Tournament {
    pub fn new(config: GameConfig, matchup: Vec<String>, games: usize, base_seed: u64) -> Result<Self, SimError> {
        if matchup.len() != config.players() {
            return Err(SimError::PolicyCount { policies: matchup.len(), players: config.players() });
        }
        for name in &matchup {
            policy_by_name::<u16>(name, 0)?;
        }
        Ok(Tournament { config, matchup, games, base_seed })
    }

    pub fn seed_of(&self, index: usize) -> u64 {
        self.base_seed.wrapping_add(index as u64)
    }

    fn seats(&self, index: usize) -> Vec<usize> {
        let k = self.matchup.len();
        (0..k).map(|seat| (seat + index) % k).collect()
    }

    /// Plays one game of the tournament, returning its log as well.
    pub fn play<R: Residue>(&self, index: usize) -> Result<(TournamentGame, Vec<GameEvent>), SimError> {
        let entry_of_seat = self.seats(index);
        let names: Vec<String> = entry_of_seat.iter().map(|&e| self.matchup[e].clone()).collect();
        let (record, state) = run_named::<R>(self.config.with_seed(self.seed_of(index)), &names)?;
        Ok((TournamentGame { index, entry_of_seat, record }, state.log().to_vec()))
    }

    /// Plays every game in parallel; results come back in game order. If
    /// `log_dir` is set each game's event log is written there.
    pub fn run<R: Residue>(&self, log_dir: Option<&Path>) -> Result<Vec<TournamentGame>, SimError> {
        if let Some(dir) = log_dir {
            std::fs::create_dir_all(dir)?;
        }
        (0..self.games)
            .into_par_iter()
            .map(|i| {
                let (game, log) = self.play::<R>(i)?;
                if let Some(dir) = log_dir {
                    let file = std::fs::File::create(dir.join(log_file_name(i, game.record.seed)))?;
                    write_log(&log, io::BufWriter::new(file))?;
                }
                Ok(game)
            })
            .collect()
    }

    pub fn summarize(&self, games: &[TournamentGame]) -> TournamentSummary {
        let mut wins = vec![0.0; self.matchup.len()];
        let mut length_histogram = BTreeMap::new();
        let mut cancellations = 0;
        let mut forced_draws = 0;
        for g in games {
            let share = 1.0 / g.record.winners.len() as f64;
            for &seat in &g.record.winners {
                wins[g.entry_of_seat[seat]] += share;
            }
            *length_histogram.entry(g.record.turns).or_insert(0) += 1;
            cancellations += g.record.cancellations;
            forced_draws += g.record.forced_draws.iter().sum::<usize>();
        }
        let count = games.len();
        let turns: Vec<u64> = games.iter().map(|g| g.record.turns).collect();
        TournamentSummary {
            games: count,
            entries: wins
                .into_iter()
                .enumerate()
                .map(|(entry, wins)| EntryStats {
                    entry,
                    policy: self.matchup[entry].clone(),
                    wins,
                    win_rate: if count == 0 { 0.0 } else { wins / count as f64 },
                })
                .collect(),
            length_histogram,
            min_turns: turns.iter().copied().min().unwrap_or(0),
            max_turns: turns.iter().copied().max().unwrap_or(0),
            mean_turns: if count == 0 { 0.0 } else { turns.iter().sum::<u64>() as f64 / count as f64 },
            cancellations,
            forced_draws,
        }
    }
}

pub fn log_file_name(index: usize, seed: u64) -> String {
    format!("game-{index:05}-seed-{seed}.jsonl")
}

/// Writes one CSV row per game.
pub fn write_games_csv<W: io::Write>(games: &[TournamentGame], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["game", "seed", "policies", "winners", "turns", "rounds", "final_hands", "cancellations", "forced_draws", "trigger"])?;
    for g in games {
        let r = &g.record;
        let trigger = r.trigger.map_or(String::new(), |t| {
            let cause = serde_json::to_value(t.cause).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
            format!("{}:{}@{}", t.player, cause, t.after_turns)
        });
        w.write_record([
            g.index.to_string(),
            r.seed.to_string(),
            r.policies.join("|"),
            join(&r.winners),
            r.turns.to_string(),
            r.rounds.to_string(),
            join(&r.final_hands),
            r.cancellations.to_string(),
            join(&r.forced_draws),
            trigger,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the per-entry win table and the length histogram.
pub fn write_summary_csv<W: io::Write>(summary: &TournamentSummary, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(["entry", "policy", "wins", "win_rate"])?;
    for e in &summary.entries {
        w.write_record([e.entry.to_string(), e.policy.clone(), format!("{:.3}", e.wins), format!("{:.4}", e.win_rate)])?;
    }
    w.write_record(["turns", "games"])?;
    for (turns, games) in &summary.length_histogram {
        w.write_record([turns.to_string(), games.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join("|")
}
