use std::collections::HashMap;

use aljabar_core::policy::{candidate_moves, GreedyPolicy, Policy, RandomPolicy};
use aljabar_core::rules::{GameConfig, GameState, Move};
use aljabar_core::sim::{run_named, Tournament};
use aljabar_core::{GroupParams, Multiset, Palette};

fn ms(codes: &[&str]) -> Multiset<u8> {
    Palette::standard(GroupParams::STANDARD).parse_all(codes).unwrap()
}

fn position(hand: &[&str], center: &[&str]) -> GameState<u8> {
    let config = GameConfig::standard(2, 0).unwrap();
    GameState::from_position(config, vec![ms(&["P"]), ms(hand)], ms(center)).unwrap()
}

#[test]
fn random_is_uniform_over_five_moves() {
    let state = position(&["O"], &["R", "Y", "K", "B", "W", "O"]);
    let moves = candidate_moves(&state, 1);
    assert_eq!(moves.len(), 5);
    let mut policy = RandomPolicy::new(2024);
    let samples = 10_000;
    let mut counts: HashMap<Move<u8>, usize> = HashMap::new();
    for _ in 0..samples {
        let d = policy.decide(&state, 1);
        assert_eq!(d.pre_draws, 0);
        *counts.entry(d.mv).or_default() += 1;
    }
    assert_eq!(counts.len(), 5);
    let expected = samples as f64 / 5.0;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 4 degrees of freedom; 16.25 is the 3-sigma (p = 0.0027) critical value
    assert!(chi2 < 16.25, "chi-square {chi2}");
}

/// Independent scoring: (net reduction, draw-forcing cancellations, -taken).
fn oracle_score(state: &GameState<u8>, mv: &Move<u8>) -> (i64, usize, i64) {
    let params = state.params();
    let black = params.identity::<u8>();
    let mut center: HashMap<Vec<u64>, usize> = HashMap::new();
    for c in state.center().iter() {
        *center.entry((0..3).map(|i| c.entry(i)).collect()).or_default() += 1;
    }
    let key = |c: &aljabar_core::ColorVector<u8>| (0..3).map(|i| c.entry(i)).collect::<Vec<u64>>();
    let (placed, taken): (Vec<_>, usize) = match mv {
        Move::Spectrum => {
            let k = key(&black);
            if center.get(&k).copied().unwrap_or(0) > 0 {
                *center.get_mut(&k).unwrap() -= 1;
            }
            (params.spectrum::<u8>().iter().map(key).collect(), 1)
        }
        Move::Exchange { give, take } => {
            for c in take.iter() {
                *center.get_mut(&key(c)).unwrap() -= 1;
            }
            (give.iter().map(key).collect(), take.len())
        }
        Move::Pass => return (0, 0, 0),
    };
    for p in &placed {
        *center.entry(p.clone()).or_default() += 1;
    }
    let forcing: usize = center
        .iter()
        .filter(|(c, _)| c.iter().any(|&e| e != 0))
        .filter(|(c, _)| placed.iter().filter(|p| p == c).count() < 2)
        .map(|(_, k)| k / 2)
        .sum();
    let net = match mv {
        Move::Spectrum => 3,
        _ => placed.len() as i64 - taken as i64,
    };
    (net, forcing, -(taken as i64))
}

#[test]
fn greedy_maximizes_the_objective_in_play() {
    let mut checked = 0;
    for seed in 0..30 {
        let mut state = GameState::<u8>::new(GameConfig::standard(2, seed).unwrap()).unwrap();
        let mut random = RandomPolicy::new(seed);
        while !state.is_finished() && state.turns_played() < 60 {
            let p = state.to_act();
            if state.is_stuck(p) {
                state.resolve_stuck(p).unwrap();
            }
            let moves = state.enumerate_moves(p);
            if moves.is_empty() {
                state.announce_final(p).unwrap();
                continue;
            }
            let choice = GreedyPolicy.decide(&state, p).mv;
            let candidates = candidate_moves(&state, p);
            let best = candidates.iter().map(|m| oracle_score(&state, m)).max().unwrap();
            assert_eq!(oracle_score(&state, &choice), best, "seed {seed}");
            let first = candidates.iter().find(|m| oracle_score(&state, m) == best).unwrap();
            assert_eq!(&choice, first, "tie broken by canonical order");
            checked += 1;
            let mv = random.decide(&state, p).mv;
            state.apply_move(p, mv, 0).unwrap();
        }
    }
    assert!(checked > 500);
}

#[test]
fn greedy_worked_examples() {
    // Spectrum (-3) beats any exchange
    let state = position(&["R", "B", "Y", "W", "O", "G"], &["P", "K"]);
    assert_eq!(GreedyPolicy.decide(&state, 1).mv, Move::Spectrum);
    // giving R+B for P sheds a piece; giving P for R+B gains one
    let state = position(&["P", "R", "B"], &["P", "R", "B"]);
    let mv = GreedyPolicy.decide(&state, 1).mv;
    assert!(state.enumerate_moves(1).contains(&Move::exchange(ms(&["P"]), ms(&["R", "B"]))));
    assert_eq!(mv.net_reduction(state.params()), 1);
    // only a null exchange and one reducing move
    let state = position(&["R", "Y", "O"], &["O"]);
    let moves = state.enumerate_moves(1);
    assert_eq!(moves, vec![Move::exchange(ms(&["R", "Y"]), ms(&["O"])), Move::exchange(ms(&["O"]), ms(&["O"]))]);
    assert_eq!(GreedyPolicy.decide(&state, 1).mv, moves[0]);
}

#[test]
fn greedy_beats_random() {
    let matchup = vec!["greedy".to_string(), "random".to_string()];
    let t = Tournament::new(GameConfig::standard(2, 0).unwrap(), matchup, 300, 7).unwrap();
    let summary = t.summarize(&t.run::<u8>(None).unwrap());
    assert!(summary.entries[0].win_rate > 0.5, "{summary:?}");
}

#[test]
fn same_seed_same_record() {
    let names = vec!["random".to_string(), "random".to_string()];
    let a = run_named::<u8>(GameConfig::standard(2, 1).unwrap(), &names).unwrap().0;
    let b = run_named::<u8>(GameConfig::standard(2, 1).unwrap(), &names).unwrap().0;
    assert_eq!(a, b);
}
