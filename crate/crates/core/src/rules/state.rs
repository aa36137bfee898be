use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use serde::Serialize;
use thiserror::Error;

use super::config::{ConfigError, GameConfig};
use super::event::{BlackSource, DealMode, DrawReason, FinalCause, GameEvent};
use super::moves::{check_play, has_play, legal_plays, spectrum_set, Move, Rejection};
use super::rng::GameRng;
use crate::group::{ColorVector, GroupParams, Residue};
use crate::multiset::Multiset;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Rejected(#[from] Rejection),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot announce the final round: {0}")]
    CannotAnnounce(&'static str),
    #[error("player is not stuck: {0}")]
    NotStuck(&'static str),
    #[error("game is not finished")]
    NotFinished,
    #[error("scripted deal is not drawn from the pool: {0}")]
    BadDeal(String),
}

/// Who signaled the final round, and how.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FinalTrigger {
    pub player: usize,
    pub cause: FinalCause,
    pub round: u32,
    /// Turns the player had completed when the signal fired.
    pub after_turns: u32,
}

/// Result of m-tuple cancellation in the Center.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cancellations<R> {
    /// `(color, tuples)` per canceled color, ascending.
    pub canceled: Vec<(ColorVector<R>, usize)>,
    /// Colors whose tuples force no draws: the actor placed at least m.
    pub exempt: Vec<ColorVector<R>>,
    /// Identity pieces each other player must take.
    pub forced: usize,
}

impl<R> Cancellations<R> {
    pub fn tuples(&self) -> usize {
        self.canceled.iter().map(|(_, t)| t).sum()
    }
}

/// Cancels every m-tuple of each non-identity color in `center`, replacing
/// each by one identity piece. Identity pieces never cancel.
pub fn process_cancellations<R: Residue>(
    params: GroupParams,
    center: &mut Multiset<R>,
    placed_from_hand: &Multiset<R>,
) -> Cancellations<R> {
    let m = params.m() as usize;
    let mut out = Cancellations { canceled: Vec::new(), exempt: Vec::new(), forced: 0 };
    let full: Vec<(ColorVector<R>, usize)> = center
        .counts()
        .filter(|(c, k)| !c.is_identity() && *k >= m)
        .map(|(c, k)| (c.clone(), k / m))
        .collect();
    for (color, tuples) in full {
        center.remove_n(&color, tuples * m);
        center.insert_n(params.identity(), tuples);
        if placed_from_hand.count(&color) >= m {
            out.exempt.push(color.clone());
        } else {
            out.forced += tuples;
        }
        out.canceled.push((color, tuples));
    }
    out
}

/// What one completed move did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TurnOutcome<R> {
    pub player: usize,
    pub drawn: Vec<ColorVector<R>>,
    pub cancellations: Cancellations<R>,
    /// Identity pieces added to the Center by cancellation.
    pub blacks_added_to_center: usize,
    /// Identity pieces given to each player (zero for the actor).
    pub forced_draws: Vec<usize>,
    /// Final-round signal raised by this turn, if any.
    pub announcement: Option<FinalTrigger>,
    pub finished: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantViolation {
    #[error("Center sum drifted from {expected} to {found}")]
    CenterSum { expected: String, found: String },
    #[error("color {color}: {found} pieces accounted for, expected {expected}")]
    PieceCount { color: String, found: usize, expected: usize },
    #[error("{found} black pieces in play, {expected} dispensed")]
    BlackCount { found: u64, expected: u64 },
    #[error("identity piece in the bag")]
    BlackInBag,
    #[error("color {color} has {count} copies in the Center after cancellation")]
    Uncanceled { color: String, count: usize },
}

/// Occurrences of one position that end the game by repetition.
pub const REPETITION_LIMIT: u8 = 3;

/// The authoritative game state. Mutated only through the methods below;
/// every mutation is appended to the event log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameState<R> {
    config: GameConfig,
    bag: Multiset<R>,
    hands: Vec<Multiset<R>>,
    center: Multiset<R>,
    center_sum: ColorVector<R>,
    canceled: Multiset<R>,
    blacks_dispensed: u64,
    turn: usize,
    round: u32,
    first_player: usize,
    turns_played: u64,
    turns_taken: Vec<u32>,
    final_round: Option<u32>,
    final_trigger: Option<FinalTrigger>,
    finished: bool,
    /// Position hash after each turn → times seen.
    positions: HashMap<u64, u8>,
    rng: GameRng,
    log: Vec<GameEvent>,
}

impl<R: Residue> GameState<R> {
    /// Deals a fresh game from the config's seed. The dealer is player 0
    /// and play opens with player 1.
    pub fn new(config: GameConfig) -> Result<Self, EngineError> {
        let mut state = Self::empty(config, DealMode::Seeded)?;
        let deal = state.config.deal_size() as usize;
        for player in 0..state.config.players() {
            let mut draws = Vec::with_capacity(deal);
            for _ in 0..deal {
                let (piece, index) = state.draw_from_bag().expect("pool checked by config");
                state.hands[player].insert(piece);
                draws.push(index);
            }
            let pieces = state.codes(&state.hands[player]);
            state.log.push(GameEvent::Deal { player, pieces, draws: Some(draws) });
        }
        let (piece, index) = state.draw_from_bag().expect("pool checked by config");
        state.open_center(piece, Some(index));
        Ok(state)
    }

    /// Starts a game from explicit opening hands and Center color; the
    /// pieces are removed from the pool and the seeded generator serves all
    /// later draws.
    pub fn with_deal(
        config: GameConfig,
        hands: Vec<Multiset<R>>,
        center_color: ColorVector<R>,
    ) -> Result<Self, EngineError> {
        if center_color.is_identity() {
            return Err(EngineError::BadDeal("the Center opens with a colored piece".into()));
        }
        let identity = config.params().identity();
        Self::from_position(config, hands, [center_color, identity].into_iter().collect())
    }

    /// Starts from an arbitrary opening position: explicit hands and Center
    /// (black pieces allowed in both). Colored pieces come out of the pool;
    /// the rest stays in the bag. Player 1 acts first.
    pub fn from_position(
        config: GameConfig,
        hands: Vec<Multiset<R>>,
        center: Multiset<R>,
    ) -> Result<Self, EngineError> {
        let mut state = Self::empty(config, DealMode::Scripted)?;
        let params = state.params();
        let black = params.identity::<R>();
        if hands.len() != state.players() {
            return Err(EngineError::BadDeal(format!("{} hands for {} players", hands.len(), state.players())));
        }
        if center.is_empty() {
            return Err(EngineError::BadDeal("empty Center".into()));
        }
        for (player, hand) in hands.into_iter().enumerate() {
            if hand.is_empty() {
                return Err(EngineError::BadDeal(format!("player {player} has an empty hand")));
            }
            if hand.counts().any(|(c, _)| c.params() != params) {
                return Err(EngineError::BadDeal(format!("player {player} holds a piece of another group")));
            }
            let mut colored = hand.clone();
            let blacks = colored.count(&black);
            colored.remove_n(&black, blacks);
            if !state.bag.remove_all(&colored) {
                return Err(EngineError::BadDeal(format!("player {player}'s hand exceeds the pool")));
            }
            state.blacks_dispensed += blacks as u64;
            state.log.push(GameEvent::Deal { player, pieces: state.codes(&hand), draws: None });
            state.hands[player] = hand;
        }
        if center.counts().any(|(c, _)| c.params() != params) {
            return Err(EngineError::BadDeal("Center holds a piece of another group".into()));
        }
        let mut colored = center.clone();
        let blacks = colored.count(&black);
        colored.remove_n(&black, blacks);
        if !state.bag.remove_all(&colored) {
            return Err(EngineError::BadDeal("Center exceeds the pool".into()));
        }
        if colored.counts().any(|(_, k)| k >= params.m() as usize) {
            return Err(EngineError::BadDeal("Center holds an uncanceled m-tuple".into()));
        }
        state.blacks_dispensed += blacks as u64;
        state.center_sum = center.sum(params).expect("checked group");
        state.log.push(GameEvent::CenterInit { pieces: state.codes(&center), draw: None });
        state.center = center;
        Ok(state)
    }

    fn empty(config: GameConfig, deal: DealMode) -> Result<Self, EngineError> {
        config.check_residue::<R>()?;
        let params = config.params();
        let players = config.players();
        let log = vec![GameEvent::Start { config: config.summary(), deal }];
        Ok(GameState {
            bag: config.pool_spec().to_multiset(params),
            hands: vec![Multiset::new(); players],
            center: Multiset::new(),
            center_sum: params.identity(),
            canceled: Multiset::new(),
            blacks_dispensed: 0,
            turn: 1 % players,
            round: 1,
            first_player: 1 % players,
            turns_played: 0,
            turns_taken: vec![0; players],
            final_round: None,
            final_trigger: None,
            finished: false,
            positions: HashMap::new(),
            rng: GameRng::seeded(config.seed()),
            log,
            config,
        })
    }

    fn open_center(&mut self, piece: ColorVector<R>, draw: Option<u64>) {
        let params = self.config.params();
        self.center_sum = piece.clone();
        self.center.insert(piece);
        self.center.insert(params.identity());
        self.blacks_dispensed += 1;
        let pieces = self.codes(&self.center);
        self.log.push(GameEvent::CenterInit { pieces, draw });
    }

    fn codes(&self, pieces: &Multiset<R>) -> Vec<String> {
        self.config.palette().codes(pieces)
    }

    fn code(&self, color: &ColorVector<R>) -> String {
        self.config.palette().code(color)
    }

    fn draw_from_bag(&mut self) -> Option<(ColorVector<R>, u64)> {
        if self.bag.is_empty() {
            return None;
        }
        let index = self.rng.index(self.bag.len());
        let piece = self.bag.nth(index as usize).expect("index in range").clone();
        self.bag.remove_one(&piece);
        Some((piece, index))
    }

    // ----- queries -----

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn params(&self) -> GroupParams {
        self.config.params()
    }

    pub fn players(&self) -> usize {
        self.hands.len()
    }

    pub fn bag(&self) -> &Multiset<R> {
        &self.bag
    }

    pub fn hand(&self, player: usize) -> &Multiset<R> {
        &self.hands[player]
    }

    pub fn hands(&self) -> &[Multiset<R>] {
        &self.hands
    }

    pub fn hand_sizes(&self) -> Vec<usize> {
        self.hands.iter().map(Multiset::len).collect()
    }

    pub fn center(&self) -> &Multiset<R> {
        &self.center
    }

    /// The Center's group sum, fixed for the whole game.
    pub fn center_sum(&self) -> &ColorVector<R> {
        &self.center_sum
    }

    /// Pieces removed from play by cancellation.
    pub fn canceled(&self) -> &Multiset<R> {
        &self.canceled
    }

    /// Identity pieces brought into play from the unlimited supply.
    pub fn blacks_dispensed(&self) -> u64 {
        self.blacks_dispensed
    }

    /// Player to act.
    pub fn to_act(&self) -> usize {
        self.turn
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn first_player(&self) -> usize {
        self.first_player
    }

    pub fn turns_played(&self) -> u64 {
        self.turns_played
    }

    pub fn turns_taken(&self, player: usize) -> u32 {
        self.turns_taken[player]
    }

    pub fn final_round(&self) -> Option<u32> {
        self.final_round
    }

    pub fn final_round_active(&self) -> bool {
        self.final_round.is_some()
    }

    pub fn final_trigger(&self) -> Option<FinalTrigger> {
        self.final_trigger
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    pub fn log(&self) -> &[GameEvent] {
        &self.log
    }

    fn last_in_rotation(&self) -> usize {
        (self.first_player + self.players() - 1) % self.players()
    }

    fn check_turn(&self, player: usize) -> Result<(), Rejection> {
        if self.finished {
            return Err(Rejection::GameFinished);
        }
        if player >= self.players() {
            return Err(Rejection::NoSuchPlayer(player));
        }
        if player != self.turn {
            return Err(Rejection::NotYourTurn { expected: self.turn });
        }
        Ok(())
    }

    /// Whether `player` holds a legal exchange or Spectrum.
    pub fn has_legal_play(&self, player: usize) -> bool {
        has_play(self.params(), &self.hands[player], &self.center)
    }

    pub fn validate_move(&self, player: usize, mv: &Move<R>) -> Result<(), Rejection> {
        self.check_turn(player)?;
        if let Move::Pass = mv {
            if !self.final_round_active() {
                return Err(Rejection::PassOutsideFinalRound);
            }
            if self.has_legal_play(player) {
                return Err(Rejection::PassWithLegalMove);
            }
            return Ok(());
        }
        check_play(self.params(), &self.hands[player], &self.center, mv)
    }

    /// Every legal move for `player` against the current Center, in
    /// canonical order: Spectrum, exchanges, then Pass when it is the only
    /// option in the final round.
    pub fn enumerate_moves(&self, player: usize) -> Vec<Move<R>> {
        if self.finished || player >= self.players() {
            return Vec::new();
        }
        let mut moves = legal_plays(self.params(), &self.hands[player], &self.center);
        if moves.is_empty() && self.final_round_active() {
            moves.push(Move::Pass);
        }
        moves
    }

    /// More than n pieces, no legal move, outside the final round: the
    /// player must draw.
    pub fn is_stuck(&self, player: usize) -> bool {
        !self.finished
            && !self.final_round_active()
            && self.hands[player].len() > self.params().n()
            && !self.has_legal_play(player)
    }

    pub fn can_announce(&self, player: usize) -> bool {
        self.announce_check(player).is_ok()
    }

    fn announce_check(&self, player: usize) -> Result<(), EngineError> {
        self.check_turn(player)?;
        if self.final_round_active() {
            return Err(EngineError::CannotAnnounce("final round already declared"));
        }
        if self.hands[player].len() > self.params().n() {
            return Err(EngineError::CannotAnnounce("hand holds more than n pieces"));
        }
        Ok(())
    }

    /// Whether `player` ended with the fewest pieces. Only valid once the
    /// game is over; ties share the win.
    pub fn winners(&self) -> Result<Vec<usize>, EngineError> {
        if !self.finished {
            return Err(EngineError::NotFinished);
        }
        Ok(winners_of(&self.hand_sizes()))
    }

    // ----- actions -----

    /// Declares, before moving, that the current round is the last. The
    /// player must hold at most n pieces.
    pub fn announce_final(&mut self, player: usize) -> Result<FinalTrigger, EngineError> {
        self.announce_check(player)?;
        Ok(self.signal_final(player, FinalCause::Declared))
    }

    fn signal_final(&mut self, player: usize, cause: FinalCause) -> FinalTrigger {
        let trigger = FinalTrigger { player, cause, round: self.round, after_turns: self.turns_taken[player] };
        self.final_round = Some(self.round);
        self.final_trigger = Some(trigger);
        self.log.push(GameEvent::Announce { player, cause, round: self.round });
        trigger
    }

    /// Draws up to `count` pieces into the acting player's hand. Returns the
    /// pieces actually drawn (fewer if the bag runs out).
    pub fn draw(&mut self, player: usize, count: usize) -> Result<Vec<ColorVector<R>>, EngineError> {
        self.check_turn(player)?;
        Ok(self.draw_into(player, count, DrawReason::Voluntary))
    }

    fn draw_into(&mut self, player: usize, count: usize, reason: DrawReason) -> Vec<ColorVector<R>> {
        let mut drawn = Vec::new();
        for _ in 0..count {
            let Some((piece, index)) = self.draw_from_bag() else { break };
            self.log.push(GameEvent::Draw { player, piece: self.code(&piece), index, reason });
            self.hands[player].insert(piece.clone());
            drawn.push(piece);
        }
        drawn
    }

    /// Compelled drawing for a stuck player: one piece at a time until a
    /// legal move exists. If the bag empties first the final round starts
    /// so the game still ends.
    pub fn resolve_stuck(&mut self, player: usize) -> Result<Vec<ColorVector<R>>, EngineError> {
        self.check_turn(player)?;
        if self.final_round_active() {
            return Err(EngineError::NotStuck("final round: passing is allowed"));
        }
        if self.hands[player].len() <= self.params().n() {
            return Err(EngineError::NotStuck("hand holds n or fewer pieces"));
        }
        if self.has_legal_play(player) {
            return Err(EngineError::NotStuck("a legal move exists"));
        }
        let mut drawn = Vec::new();
        loop {
            let got = self.draw_into(player, 1, DrawReason::Stuck);
            if got.is_empty() {
                self.signal_final(player, FinalCause::BagExhausted);
                break;
            }
            drawn.extend(got);
            if self.has_legal_play(player) {
                break;
            }
        }
        Ok(drawn)
    }

    /// Plays one move for the acting player after `pre_draws` voluntary
    /// draws. The move is checked against the hand before drawing, so a
    /// rejected move leaves the state untouched.
    pub fn apply_move(&mut self, player: usize, mv: Move<R>, pre_draws: usize) -> Result<TurnOutcome<R>, EngineError> {
        self.validate_move(player, &mv)?;
        if pre_draws > 0 && mv == Move::Pass {
            return Err(Rejection::DrawWithPass.into());
        }
        let params = self.params();
        let drawn = self.draw_into(player, pre_draws, DrawReason::Voluntary);

        let placed = match mv {
            Move::Exchange { give, take } => {
                self.hands[player].remove_all(&give);
                self.center.remove_all(&take);
                self.center.add_all(&give);
                self.hands[player].add_all(&take);
                self.log.push(GameEvent::Exchange { player, give: self.codes(&give), take: self.codes(&take) });
                give
            }
            Move::Spectrum => {
                let set = spectrum_set(params);
                let black = params.identity();
                self.hands[player].remove_all(&set);
                let black_from = if self.center.remove_one(&black) {
                    BlackSource::Center
                } else {
                    self.blacks_dispensed += 1;
                    BlackSource::Supply
                };
                self.hands[player].insert(black);
                self.center.add_all(&set);
                self.log.push(GameEvent::Spectrum { player, give: self.codes(&set), black_from });
                set
            }
            Move::Pass => {
                self.log.push(GameEvent::Pass { player });
                Multiset::new()
            }
        };

        let cancellations = process_cancellations(params, &mut self.center, &placed);
        let blacks_added_to_center = cancellations.tuples();
        self.blacks_dispensed += blacks_added_to_center as u64;
        for (color, tuples) in &cancellations.canceled {
            self.canceled.insert_n(color.clone(), tuples * params.m() as usize);
            let exempt = cancellations.exempt.contains(color);
            self.log.push(GameEvent::Cancel { color: self.code(color), tuples: *tuples, exempt });
        }
        let mut forced_draws = vec![0; self.players()];
        if cancellations.forced > 0 {
            for other in (0..self.players()).filter(|&p| p != player) {
                self.hands[other].insert_n(params.identity(), cancellations.forced);
                self.blacks_dispensed += cancellations.forced as u64;
                forced_draws[other] = cancellations.forced;
                self.log.push(GameEvent::ForcedDraw { player: other, count: cancellations.forced });
            }
        }

        let announcement = self.end_turn(player);
        Ok(TurnOutcome {
            player,
            drawn,
            cancellations,
            blacks_added_to_center,
            forced_draws,
            announcement,
            finished: self.finished,
        })
    }

    fn end_turn(&mut self, player: usize) -> Option<FinalTrigger> {
        self.turns_played += 1;
        self.turns_taken[player] += 1;
        let mut announcement = None;
        if self.hands[player].len() == 1 && !self.final_round_active() {
            announcement = Some(self.signal_final(player, FinalCause::OnePiece));
        }
        let seen = self.positions.entry(self.position_key(player)).or_insert(0);
        *seen += 1;
        if *seen >= REPETITION_LIMIT && !self.final_round_active() {
            announcement = Some(self.signal_final(player, FinalCause::Repetition));
        }
        if player == self.last_in_rotation() {
            if self.final_round == Some(self.round) {
                self.finished = true;
                let hand_sizes = self.hand_sizes();
                let winners = winners_of(&hand_sizes);
                self.log.push(GameEvent::GameOver { winners, hand_sizes });
                return announcement;
            }
            self.round += 1;
        }
        self.turn = (player + 1) % self.players();
        announcement
    }

    fn position_key(&self, mover: usize) -> u64 {
        // an unchanged bag means no draws, so the generator state matches too
        let mut h = DefaultHasher::new();
        (mover, &self.hands, &self.center, &self.bag).hash(&mut h);
        h.finish()
    }

    /// Checks conservation of the Center sum, of every colored piece and of
    /// black pieces, and that no m-tuple survives in the Center.
    pub fn check_invariants(&self) -> Result<(), InvariantViolation> {
        let params = self.params();
        let palette = self.config.palette();
        let found = self.center.sum(params).expect("same group");
        if found != self.center_sum {
            return Err(InvariantViolation::CenterSum {
                expected: palette.code(&self.center_sum),
                found: palette.code(&found),
            });
        }
        let black = params.identity::<R>();
        if self.bag.count(&black) > 0 {
            return Err(InvariantViolation::BlackInBag);
        }
        let copies = self.config.copies() as usize;
        for color in params.elements::<R>().filter(|c| !c.is_identity()) {
            let found = self.bag.count(&color)
                + self.center.count(&color)
                + self.canceled.count(&color)
                + self.hands.iter().map(|h| h.count(&color)).sum::<usize>();
            if found != copies {
                return Err(InvariantViolation::PieceCount { color: palette.code(&color), found, expected: copies });
            }
            let in_center = self.center.count(&color);
            if in_center >= params.m() as usize {
                return Err(InvariantViolation::Uncanceled { color: palette.code(&color), count: in_center });
            }
        }
        let blacks =
            (self.center.count(&black) + self.hands.iter().map(|h| h.count(&black)).sum::<usize>()) as u64;
        if blacks != self.blacks_dispensed {
            return Err(InvariantViolation::BlackCount { found: blacks, expected: self.blacks_dispensed });
        }
        Ok(())
    }
}

/// Indices of every player with the minimal hand size.
pub fn winners_of(hand_sizes: &[usize]) -> Vec<usize> {
    let Some(&best) = hand_sizes.iter().min() else { return Vec::new() };
    (0..hand_sizes.len()).filter(|&i| hand_sizes[i] == best).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::palette::Palette;

    const P: GroupParams = GroupParams::STANDARD;

    fn ms(codes: &[&str]) -> Multiset<u8> {
        Palette::standard(P).parse_all(codes).unwrap()
    }

    fn position(hands: &[&[&str]], center: &[&str]) -> GameState<u8> {
        let config = GameConfig::standard(hands.len(), 11).unwrap();
        GameState::from_position(config, hands.iter().map(|h| ms(h)).collect(), ms(center)).unwrap()
    }

    fn ex(g: &[&str], t: &[&str]) -> Move<u8> {
        Move::exchange(ms(g), ms(t))
    }

    #[test]
    fn seeded_deal_counts() {
        let config = GameConfig::standard(4, 3).unwrap();
        let a = GameState::<u8>::new(config.clone()).unwrap();
        assert_eq!(a.hand_sizes(), vec![13; 4]);
        assert_eq!(a.center().len(), 2);
        assert_eq!(a.center().count(&P.identity()), 1);
        assert_eq!(a.bag().len(), 17);
        assert_eq!(a.to_act(), 1);
        assert_eq!(a.check_invariants(), Ok(()));
        let b = GameState::<u8>::new(config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exchange_without_cancellation() {
        let mut g = position(&[&["R", "R"], &["B", "Y", "O"]], &["G", "K"]);
        let out = g.apply_move(1, ex(&["B", "Y"], &["G"]), 0).unwrap();
        assert_eq!(g.center(), &ms(&["B", "Y", "K"]));
        assert_eq!(g.hand(1), &ms(&["G", "O"]));
        assert_eq!(out.cancellations.tuples(), 0);
        assert_eq!(g.to_act(), 0);
        assert_eq!(g.check_invariants(), Ok(()));
    }

    #[test]
    fn double_cancels_and_forces_draws() {
        let mut g = position(&[&["O", "O"], &["R", "Y", "B", "G"], &["P", "P"]], &["R", "Y", "O"]);
        let out = g.apply_move(1, ex(&["R"], &["Y", "O"]), 0).unwrap();
        assert_eq!(g.center(), &ms(&["K"]));
        assert_eq!(out.forced_draws, vec![1, 0, 1]);
        assert_eq!(g.hand(0), &ms(&["K", "O", "O"]));
        assert_eq!(g.hand(2), &ms(&["K", "P", "P"]));
        assert_eq!(g.check_invariants(), Ok(()));
    }

    #[test]
    fn black_pairs_never_cancel() {
        let mut g = position(&[&["O"], &["K", "R", "Y"]], &["K", "B"]);
        g.apply_move(1, ex(&["K"], &["K"]), 0).unwrap();
        assert_eq!(g.center(), &ms(&["B", "K"]));
        let mut g = position(&[&["O"], &["R", "B", "Y", "W", "G"]], &["K", "K"]);
        let out = g.apply_move(1, Move::Spectrum, 0).unwrap();
        assert_eq!(out.cancellations.tuples(), 0);
        assert_eq!(g.center(), &ms(&["B", "K", "R", "W", "Y"]));
    }

    #[test]
    fn own_double_is_exempt() {
        let mut g = position(&[&["O"], &["B", "B", "Y"]], &["R", "K"]);
        let out = g.apply_move(1, ex(&["B", "B"], &["K"]), 0).unwrap();
        assert_eq!(g.center(), &ms(&["K", "R"]));
        assert_eq!(out.cancellations.exempt, vec![P.primaries::<u8>()[2].clone()]);
        assert_eq!(out.forced_draws, vec![0, 0]);
        assert_eq!(g.hand(0), &ms(&["O"]));
        assert_eq!(g.check_invariants(), Ok(()));
    }

    #[test]
    fn cancellation_is_maximal() {
        let mut center = ms(&["R", "R", "R", "R"]);
        let c = process_cancellations(P, &mut center, &Multiset::new());
        assert_eq!(center, ms(&["K", "K"]));
        assert_eq!(c.tuples(), 2);
        let mut center = ms(&["R", "R", "K", "K"]);
        assert_eq!(process_cancellations(P, &mut center, &Multiset::new()).tuples(), 1);
        assert_eq!(center, ms(&["K", "K", "K"]));
        let z3 = GroupParams::new(3, 2).unwrap();
        let c1 = ColorVector::<u8>::new(z3, &[2, 1]).unwrap();
        let mut center: Multiset<u8> = vec![c1.clone(), c1.clone(), c1].into_iter().collect();
        assert_eq!(process_cancellations(z3, &mut center, &Multiset::new()).forced, 1);
        assert_eq!(center.len(), 1);
        assert!(center.iter().all(|c| c.is_identity()));
    }

    #[test]
    fn spectrum_black_source() {
        let mut g = position(&[&["O"], &["R", "B", "Y", "W", "G"]], &["P", "K"]);
        let out = g.apply_move(1, Move::Spectrum, 0).unwrap();
        assert_eq!(g.hand(1), &ms(&["G", "K"]));
        assert_eq!(out.cancellations.tuples(), 0);
        assert!(matches!(g.log().last(), Some(GameEvent::Spectrum { black_from: BlackSource::Center, .. })));
        let mut g = position(&[&["O"], &["R", "B", "Y", "W", "G"]], &["P"]);
        g.apply_move(1, Move::Spectrum, 0).unwrap();
        assert!(matches!(g.log().last(), Some(GameEvent::Spectrum { black_from: BlackSource::Supply, .. })));
        assert_eq!(g.check_invariants(), Ok(()));
    }

    #[test]
    fn stuck_player_draws_until_playable() {
        let mut g = position(&[&["O"], &["R", "R", "R", "R"]], &["B"]);
        assert!(g.enumerate_moves(1).is_empty());
        assert!(g.is_stuck(1));
        assert!(g.apply_move(1, Move::Pass, 0).is_err());
        let drawn = g.resolve_stuck(1).unwrap();
        assert!(!drawn.is_empty());
        assert!(g.has_legal_play(1));
        assert_eq!(g.hand(1).len(), 4 + drawn.len());
        assert!(matches!(g.resolve_stuck(1), Err(EngineError::NotStuck(_))));
    }

    #[test]
    fn small_hand_is_not_stuck() {
        let mut g = position(&[&["O"], &["R", "R"]], &["B"]);
        assert!(!g.is_stuck(1));
        assert!(g.resolve_stuck(1).is_err());
        assert!(g.can_announce(1));
    }

    #[test]
    fn announce_ends_after_rotation() {
        let mut g = position(&[&["O", "O", "Y", "R", "G"], &["R", "Y", "B"], &["B", "P", "W", "K", "G"]], &["G", "K"]);
        g.announce_final(1).unwrap();
        assert!(matches!(g.announce_final(1), Err(EngineError::CannotAnnounce(_))));
        g.apply_move(1, ex(&["Y", "B"], &["G"]), 0).unwrap();
        assert!(!g.is_finished());
        g.apply_move(2, ex(&["G"], &["Y", "B"]), 0).unwrap();
        assert!(!g.is_finished());
        // player 0 closes the round even though the trigger holds two pieces
        g.apply_move(0, ex(&["G"], &["G"]), 0).unwrap();
        assert!(g.is_finished());
        assert_eq!(g.winners().unwrap(), vec![1]);
        assert!(matches!(g.log().last(), Some(GameEvent::GameOver { .. })));
    }

    #[test]
    fn too_many_pieces_to_announce() {
        let mut g = position(&[&["O"], &["R", "Y", "B", "G"]], &["G", "K"]);
        assert!(matches!(g.announce_final(1), Err(EngineError::CannotAnnounce(_))));
        assert!(matches!(g.announce_final(0), Err(EngineError::Rejected(Rejection::NotYourTurn { expected: 1 }))));
    }

    #[test]
    fn trigger_receiving_blacks_still_ends() {
        // player 1 drops to one piece; player 0 then cancels a pair and
        // hands player 1 a black, but the game still ends with the round
        let mut g = position(&[&["B", "G", "O", "O"], &["B", "Y"]], &["G", "R", "K"]);
        let out = g.apply_move(1, ex(&["B", "Y"], &["G"]), 0).unwrap();
        assert_eq!(out.announcement.map(|t| t.cause), Some(FinalCause::OnePiece));
        let out = g.apply_move(0, ex(&["B", "G"], &["Y"]), 0).unwrap();
        assert_eq!(out.forced_draws, vec![0, 1]);
        assert!(g.is_finished());
        assert_eq!(g.hand_sizes(), vec![3, 2]);
        assert_eq!(g.winners().unwrap(), vec![1]);
    }

    #[test]
    fn pass_only_when_final_and_stuck() {
        let mut g = position(&[&["O", "O"], &["R"], &["W", "W"]], &["B", "K"]);
        assert_eq!(g.validate_move(1, &Move::Pass), Err(Rejection::PassOutsideFinalRound));
        g.announce_final(1).unwrap();
        assert_eq!(g.enumerate_moves(1), vec![Move::Pass]);
        assert_eq!(g.apply_move(1, Move::Pass, 1).unwrap_err(), EngineError::Rejected(Rejection::DrawWithPass));
        g.apply_move(1, Move::Pass, 0).unwrap();
        let moves = g.enumerate_moves(2);
        assert!(!moves.contains(&Move::Pass));
        assert_eq!(g.validate_move(2, &Move::Pass), Err(Rejection::PassWithLegalMove));
    }

    #[test]
    fn rejected_move_leaves_state() {
        let mut g = position(&[&["O"], &["R", "Y"]], &["B", "K"]);
        let before = g.clone();
        assert_eq!(g.apply_move(1, ex(&["R"], &["B"]), 2).unwrap_err(), Rejection::SumMismatch.into());
        assert_eq!(g, before);
        assert!(g.apply_move(0, ex(&["O"], &["B"]), 0).is_err());
        assert_eq!(g, before);
    }

    #[test]
    fn voluntary_draws_are_logged() {
        let mut g = position(&[&["O"], &["R", "Y"]], &["B", "K"]);
        let out = g.apply_move(1, ex(&["Y"], &["Y"]), 0);
        assert!(out.is_err());
        let out = g.apply_move(1, ex(&["R"], &["R"]), 0);
        assert!(out.is_err());
        let drawn = g.draw(1, 2).unwrap();
        assert_eq!(drawn.len(), 2);
        assert_eq!(g.hand(1).len(), 4);
        let draws = g.log().iter().filter(|e| matches!(e, GameEvent::Draw { reason: DrawReason::Voluntary, .. }));
        assert_eq!(draws.count(), 2);
        assert_eq!(g.check_invariants(), Ok(()));
    }

    #[test]
    fn third_repetition_ends_game() {
        let mut g = position(&[&["R", "Y", "B", "B"], &["R", "Y", "O", "O"]], &["R", "K"]);
        let null = ex(&["R"], &["R"]);
        for _ in 0..4 {
            let p = g.to_act();
            assert_eq!(g.apply_move(p, null.clone(), 0).unwrap().announcement, None);
        }
        let out = g.apply_move(1, null.clone(), 0).unwrap();
        let trigger = out.announcement.unwrap();
        assert_eq!((trigger.player, trigger.cause, trigger.after_turns), (1, FinalCause::Repetition, 3));
        g.apply_move(0, null, 0).unwrap();
        assert!(g.is_finished());
        assert_eq!(g.winners().unwrap(), vec![0, 1]);
    }

    #[test]
    fn winner_sets() {
        assert_eq!(winners_of(&[1, 4, 6, 3]), vec![0]);
        assert_eq!(winners_of(&[2, 2, 5]), vec![0, 1]);
        assert_eq!(winners_of(&[7, 7]), vec![0, 1]);
    }

    #[test]
    fn scripted_deal_must_fit_pool() {
        let config = GameConfig::standard(2, 0).unwrap();
        let hand = ms(&["R"; 11]);
        let err = GameState::from_position(config.clone(), vec![hand, ms(&["B"])], ms(&["G", "K"])).unwrap_err();
        assert!(matches!(err, EngineError::BadDeal(_)));
        let err = GameState::<u8>::from_position(config, vec![ms(&["B"]), ms(&["B"])], ms(&["G", "G"])).unwrap_err();
        assert!(matches!(err, EngineError::BadDeal(_)));
    }
}
