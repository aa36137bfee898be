//! The shortest possible game, found by exhaustive search over scripted
//! deals. With 13 pieces and at most 3 shed per turn, a player needs four
//! turns before holding 3 or fewer pieces and being able to end the game.
//!
//! The search fixes a deal for the opponent (player 0) and varies the 13th
//! piece of player 1's hand and the Center's opening color. Player 1's
//! moves are searched exhaustively; player 0 answers with the first move in
//! canonical order that forces no draws on player 1.
//!
//! Set `REGENERATE_FIXTURES=1` to rewrite the committed log.

use std::path::PathBuf;

use aljabar_core::rules::{read_log, replay, write_log, FinalCause, GameConfig, GameEvent, GameState};
use aljabar_core::{GroupParams, Multiset, Palette};

const N: usize = 3;
const FIXTURE: &str = "shortest_game.jsonl";

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(FIXTURE)
}

fn ms(codes: &[&str]) -> Multiset<u8> {
    Palette::standard(GroupParams::STANDARD).parse_all(codes).unwrap()
}

fn opponent_reply(state: &GameState<u8>) -> Option<GameState<u8>> {
    for mv in state.enumerate_moves(0) {
        let mut next = state.clone();
        let out = next.apply_move(0, mv, 0).expect("enumerated moves are legal");
        if out.forced_draws[1] == 0 {
            return Some(next);
        }
    }
    None
}

/// Depth-first search for a line where player 1 holds at most n pieces
/// after exactly `turns` of its own turns. Branches that cannot shed enough
/// pieces in the remaining turns are cut.
fn search(state: &GameState<u8>, turns: u32, nodes: &mut u64) -> Option<GameState<u8>> {
    *nodes += 1;
    let taken = state.turns_taken(1);
    if taken == turns {
        return (state.hand(1).len() <= N).then(|| state.clone());
    }
    for mv in state.enumerate_moves(1) {
        let mut next = state.clone();
        next.apply_move(1, mv, 0).expect("enumerated moves are legal");
        let left = (turns - taken - 1) as usize;
        if next.hand(1).len() > N + 3 * left || next.is_finished() {
            continue;
        }
        let Some(next) = opponent_reply(&next) else { continue };
        if let Some(found) = search(&next, turns, nodes) {
            return Some(found);
        }
    }
    None
}

fn deals() -> Vec<(String, String)> {
    let colors = ["R", "B", "Y", "P", "O", "G", "W", "K"];
    let mut out = Vec::new();
    for extra in colors {
        for center in &colors[..7] {
            out.push((extra.to_string(), center.to_string()));
        }
    }
    out
}

fn start(extra: &str, center: &str) -> Option<GameState<u8>> {
    let config = GameConfig::standard(2, 0).unwrap();
    let mut p1 = ms(&["R", "B", "Y", "W", "R", "B", "Y", "W", "R", "B", "Y", "W"]);
    p1.add_all(&ms(&[extra]));
    let p0 = ms(&["P", "O", "G", "P", "O", "G", "R", "B", "Y", "W", "P", "O", "G"]);
    GameState::from_position(config, vec![p0, p1], ms(&[center, "K"])).ok()
}

/// Plays the found line to the end: player 1 declares the final round and
/// both players make their final moves.
fn finish(mut state: GameState<u8>) -> GameState<u8> {
    state.announce_final(1).unwrap();
    let params = state.params();
    let moves = state.enumerate_moves(1);
    let best = moves.iter().map(|m| m.net_reduction(params)).max().unwrap();
    let mv = moves.into_iter().find(|m| m.net_reduction(params) == best).unwrap();
    state.apply_move(1, mv, 0).unwrap();
    let state = opponent_reply(&state).unwrap();
    assert!(state.is_finished());
    state
}

fn shortest() -> GameState<u8> {
    for (extra, center) in deals() {
        let Some(state) = start(&extra, &center) else { continue };
        let mut nodes = 0;
        if let Some(found) = search(&state, 4, &mut nodes) {
            return finish(found);
        }
    }
    panic!("no four-turn line found");
}

#[test]
fn three_turns_never_suffice() {
    for (extra, center) in deals() {
        let Some(state) = start(&extra, &center) else { continue };
        let mut nodes = 0;
        assert!(search(&state, 3, &mut nodes).is_none(), "{extra} {center}");
        assert!(nodes >= 1);
    }
}

#[test]
fn four_turns_are_achievable() {
    let game = shortest();
    let trigger = game.final_trigger().unwrap();
    assert_eq!((trigger.player, trigger.cause, trigger.after_turns), (1, FinalCause::Declared, 4));
    assert_eq!(game.winners().unwrap(), vec![1]);
    let mut text = Vec::new();
    write_log(game.log(), &mut text).unwrap();
    if std::env::var_os("REGENERATE_FIXTURES").is_some() {
        std::fs::create_dir_all(fixture_path().parent().unwrap()).unwrap();
        std::fs::write(fixture_path(), &text).unwrap();
    }
    let committed = std::fs::read(fixture_path()).expect("fixture present");
    assert_eq!(String::from_utf8(committed).unwrap(), String::from_utf8(text).unwrap());
}

#[test]
fn fixture_replays() {
    let file = std::fs::File::open(fixture_path()).unwrap();
    let events = read_log(std::io::BufReader::new(file)).unwrap();
    let state: GameState<u16> = replay(&events).unwrap();
    let trigger = state.final_trigger().unwrap();
    assert_eq!(trigger.after_turns, 4);
    assert_eq!(state.turns_taken(1), 5);
    let spectrums = events.iter().filter(|e| matches!(e, GameEvent::Spectrum { player: 1, .. })).count();
    assert_eq!(spectrums, 3);
    assert!(!events.iter().any(|e| matches!(e, GameEvent::ForcedDraw { player: 1, .. })));
}
