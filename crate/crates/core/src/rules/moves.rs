use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{ColorVector, GroupError, GroupParams, Residue};
use crate::multiset::Multiset;
use crate::palette::Palette;

/// One turn's action. The derived order (Spectrum, then exchanges by
/// `(give, take)`, then Pass) is the canonical move order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move<R> {
    /// Hand the n primaries plus the all-(m-1) piece to the Center for one
    /// black/clear piece.
    Spectrum,
    Exchange { give: Multiset<R>, take: Multiset<R> },
    /// Final round only, and only with no legal exchange or Spectrum.
    Pass,
}

impl<R: Residue> Move<R> {
    pub fn exchange(give: Multiset<R>, take: Multiset<R>) -> Self {
        Move::Exchange { give, take }
    }

    /// An exchange that returns exactly what it gives.
    pub fn is_null(&self) -> bool {
        matches!(self, Move::Exchange { give, take } if give == take)
    }

    /// Pieces leaving the hand minus pieces arriving.
    pub fn net_reduction(&self, params: GroupParams) -> i64 {
        match self {
            Move::Spectrum => params.n() as i64,
            Move::Exchange { give, take } => give.len() as i64 - take.len() as i64,
            Move::Pass => 0,
        }
    }

    pub fn to_wire(&self, palette: &Palette) -> WireMove {
        match self {
            Move::Spectrum => WireMove::Spectrum,
            Move::Exchange { give, take } => {
                WireMove::Exchange { give: palette.codes(give), take: palette.codes(take) }
            }
            Move::Pass => WireMove::Pass,
        }
    }

    pub fn from_wire(wire: &WireMove, palette: &Palette) -> Result<Self, GroupError> {
        Ok(match wire {
            WireMove::Spectrum => Move::Spectrum,
            WireMove::Pass => Move::Pass,
            WireMove::Exchange { give, take } => {
                Move::Exchange { give: palette.parse_all(give)?, take: palette.parse_all(take)? }
            }
        })
    }
}

/// JSON form of a [`Move`], colors as palette codes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WireMove {
    Exchange { give: Vec<String>, take: Vec<String> },
    Spectrum,
    Pass,
}

/// Why a move was refused. The display strings are relayed to clients.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Rejection {
    #[error("game is finished")]
    GameFinished,
    #[error("not your turn: player {expected} is to act")]
    NotYourTurn { expected: usize },
    #[error("no such player {0}")]
    NoSuchPlayer(usize),
    #[error("must give between 1 and {max} pieces, got {got}")]
    GiveSize { got: usize, max: usize },
    #[error("must take between 1 and {max} pieces, got {got}")]
    TakeSize { got: usize, max: usize },
    #[error("sum mismatch")]
    SumMismatch,
    #[error("pieces not in hand")]
    NotInHand,
    #[error("pieces not in the Center")]
    NotInCenter,
    #[error("hand does not hold the Spectrum set")]
    NoSpectrum,
    #[error("pass is only allowed in the final round")]
    PassOutsideFinalRound,
    #[error("pass is not allowed while a legal move exists")]
    PassWithLegalMove,
    #[error("draw first, then pass")]
    DrawWithPass,
    #[error("piece from a different group")]
    WrongGroup,
}

/// Structural legality of `mv` against a hand and Center, ignoring turn
/// order and the final-round condition for Pass.
pub(crate) fn check_play<R: Residue>(
    params: GroupParams,
    hand: &Multiset<R>,
    center: &Multiset<R>,
    mv: &Move<R>,
) -> Result<(), Rejection> {
    let n = params.n();
    match mv {
        Move::Exchange { give, take } => {
            if give.is_empty() || give.len() > n {
                return Err(Rejection::GiveSize { got: give.len(), max: n });
            }
            if take.is_empty() || take.len() > n {
                return Err(Rejection::TakeSize { got: take.len(), max: n });
            }
            if give.counts().chain(take.counts()).any(|(c, _)| c.params() != params) {
                return Err(Rejection::WrongGroup);
            }
            if !hand.contains_all(give) {
                return Err(Rejection::NotInHand);
            }
            if !center.contains_all(take) {
                return Err(Rejection::NotInCenter);
            }
            let give_sum = give.sum(params).map_err(|_| Rejection::WrongGroup)?;
            let take_sum = take.sum(params).map_err(|_| Rejection::WrongGroup)?;
            if give_sum != take_sum {
                return Err(Rejection::SumMismatch);
            }
            Ok(())
        }
        Move::Spectrum => {
            if hand.contains_all(&spectrum_set(params)) {
                Ok(())
            } else {
                Err(Rejection::NoSpectrum)
            }
        }
        Move::Pass => Ok(()),
    }
}

pub fn spectrum_set<R: Residue>(params: GroupParams) -> Multiset<R> {
    params.spectrum().into_iter().collect()
}

fn with_sums<R: Residue>(params: GroupParams, subs: Vec<Multiset<R>>) -> Vec<(ColorVector<R>, Multiset<R>)> {
    subs.into_iter().map(|s| (s.sum(params).expect("same group"), s)).collect()
}

/// Every legal Spectrum/exchange for `hand` against `center`, canonical
/// order. Pass is not included.
pub fn legal_plays<R: Residue>(params: GroupParams, hand: &Multiset<R>, center: &Multiset<R>) -> Vec<Move<R>> {
    let n = params.n();
    let mut out = Vec::new();
    if hand.contains_all(&spectrum_set(params)) {
        out.push(Move::Spectrum);
    }
    let mut by_sum: HashMap<ColorVector<R>, Vec<Multiset<R>>> = HashMap::new();
    for (sum, sub) in with_sums(params, center.sub_multisets(n)) {
        by_sum.entry(sum).or_default().push(sub);
    }
    for (sum, give) in with_sums(params, hand.sub_multisets(n)) {
        if let Some(takes) = by_sum.get(&sum) {
            for take in takes {
                out.push(Move::Exchange { give: give.clone(), take: take.clone() });
            }
        }
    }
    out
}

/// Whether any Spectrum/exchange is legal; cheaper than [`legal_plays`].
pub fn has_play<R: Residue>(params: GroupParams, hand: &Multiset<R>, center: &Multiset<R>) -> bool {
    if hand.contains_all(&spectrum_set(params)) {
        return true;
    }
    let n = params.n();
    let sums: std::collections::HashSet<ColorVector<R>> =
        center.sub_multisets(n).iter().map(|s| s.sum(params).expect("same group")).collect();
    hand.sub_multisets(n).iter().any(|s| sums.contains(&s.sum(params).expect("same group")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pal() -> Palette {
        Palette::standard(GroupParams::STANDARD)
    }

    fn ms(codes: &[&str]) -> Multiset<u8> {
        pal().parse_all(codes).unwrap()
    }

    fn ex(g: &[&str], t: &[&str]) -> Move<u8> {
        Move::exchange(ms(g), ms(t))
    }

    const P: GroupParams = GroupParams::STANDARD;

    #[test]
    fn yellow_for_blue_green() {
        let hand = ms(&["Y", "R"]);
        let center = ms(&["B", "G", "K"]);
        assert_eq!(check_play(P, &hand, &center, &ex(&["Y"], &["B", "G"])), Ok(()));
    }

    #[test]
    fn mismatched_sum_rejected() {
        let hand = ms(&["R"]);
        let center = ms(&["B", "K"]);
        assert_eq!(check_play(P, &hand, &center, &ex(&["R"], &["B"])), Err(Rejection::SumMismatch));
        assert_eq!(Rejection::SumMismatch.to_string(), "sum mismatch");
    }

    #[test]
    fn four_piece_exchange_rejected() {
        let hand = ms(&["R", "B", "Y", "W"]);
        let center = ms(&["K"]);
        assert_eq!(
            check_play(P, &hand, &center, &ex(&["R", "B", "Y", "W"], &["K"])),
            Err(Rejection::GiveSize { got: 4, max: 3 })
        );
        assert_eq!(check_play(P, &hand, &center, &Move::Spectrum), Ok(()));
        assert_eq!(Move::<u8>::Spectrum.net_reduction(P), 3);
    }

    #[test]
    fn ownership_checked() {
        let hand = ms(&["R"]);
        let center = ms(&["R", "K"]);
        assert_eq!(check_play(P, &hand, &center, &ex(&["R", "R"], &["K"])), Err(Rejection::NotInHand));
        assert_eq!(check_play(P, &hand, &center, &ex(&["R"], &["P", "B"])), Err(Rejection::NotInCenter));
        assert_eq!(check_play(P, &hand, &center, &ex(&[], &["K"])), Err(Rejection::GiveSize { got: 0, max: 3 }));
        assert_eq!(check_play(P, &hand, &center, &ex(&["R"], &[])), Err(Rejection::TakeSize { got: 0, max: 3 }));
    }

    #[test]
    fn enumeration_small_cases() {
        // hand {R}, center {R, K}: K alone never matches R, but R + K does
        let plays = legal_plays(P, &ms(&["R"]), &ms(&["R", "K"]));
        assert_eq!(plays, vec![ex(&["R"], &["K", "R"]), ex(&["R"], &["R"])]);
        // purple for red + blue
        let plays = legal_plays(P, &ms(&["P"]), &ms(&["R", "B", "K"]));
        assert!(plays.contains(&ex(&["P"], &["R", "B"])));
        assert!(plays.contains(&ex(&["P"], &["R", "B", "K"])));
        // black for black
        let plays = legal_plays(P, &ms(&["K"]), &ms(&["K", "R"]));
        assert_eq!(plays, vec![ex(&["K"], &["K"])]);
    }

    #[test]
    fn enumeration_is_sorted_and_unique() {
        let hand = ms(&["R", "R", "B", "Y", "W", "G", "K"]);
        let center = ms(&["P", "O", "K", "K"]);
        let plays = legal_plays(P, &hand, &center);
        let mut sorted = plays.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(plays, sorted);
        assert_eq!(plays[0], Move::Spectrum);
        assert!(has_play(P, &hand, &center));
        for mv in &plays {
            assert_eq!(check_play(P, &hand, &center, mv), Ok(()));
        }
    }

    #[test]
    fn wire_round_trip() {
        let mv = ex(&["P"], &["R", "B"]);
        let wire = mv.to_wire(&pal());
        let json = serde_json::to_string(&wire).unwrap();
        assert_eq!(json, r#"{"kind":"exchange","give":["P"],"take":["B","R"]}"#);
        let back: WireMove = serde_json::from_str(&json).unwrap();
        assert_eq!(Move::from_wire(&back, &pal()).unwrap(), mv);
        assert_eq!(serde_json::to_string(&WireMove::Spectrum).unwrap(), r#"{"kind":"spectrum"}"#);
    }

    #[test]
    fn null_exchange_detected() {
        assert!(ex(&["R"], &["R"]).is_null());
        assert!(!ex(&["P"], &["R", "B"]).is_null());
        assert!(!Move::<u8>::Spectrum.is_null());
    }
}
