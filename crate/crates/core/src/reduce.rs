//! Step-by-step simplification of a handful of pieces to its single-color
//! sum, the way a player works it out at the table: cancel, expand into
//! primaries, cancel again, combine.

use crate::group::{ColorVector, GroupError, GroupParams, Residue};
use crate::multiset::Multiset;
use crate::palette::Palette;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionAction {
    /// Remove every m-tuple of a color and every black/clear piece.
    Cancel,
    /// Replace each non-primary color by its primary decomposition.
    Expand,
    /// Replace the remaining primaries by their single-color sum.
    Combine,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep<R> {
    pub before: Multiset<R>,
    pub action: ReductionAction,
    pub after: Multiset<R>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTrace<R> {
    pub steps: Vec<ReductionStep<R>>,
    pub result: ColorVector<R>,
}

impl<R: Residue> ReductionTrace<R> {
    /// Renders the trace as a chain of equalities, e.g. `Y + O = Y + R + Y = R`.
    pub fn render(&self, palette: &Palette) -> String {
        let show = |m: &Multiset<R>| palette.codes(m).join(" + ");
        let mut parts = Vec::new();
        match self.steps.first() {
            Some(first) => {
                parts.push(show(&first.before));
                parts.extend(self.steps.iter().map(|s| show(&s.after)));
            }
            None => parts.push(palette.code(&self.result)),
        }
        parts.join(" = ")
    }
}

/// Traces the reduction of `pieces`; the result always equals their sum.
pub fn reduce_trace<R: Residue>(
    params: GroupParams,
    pieces: &Multiset<R>,
) -> Result<ReductionTrace<R>, GroupError> {
    if let Some(bad) = pieces.counts().map(|(c, _)| c).find(|c| c.params() != params) {
        return Err(GroupError::DimensionMismatch { left: params, right: bad.params() });
    }
    let m = params.m() as usize;
    let mut current = pieces.clone();
    let mut steps = Vec::new();
    if current.is_empty() {
        current.insert(params.identity());
    }

    while current.len() > 1 {
        let cancellable = current.counts().any(|(c, k)| c.is_identity() || k >= m);
        if cancellable {
            let mut next = Multiset::new();
            for (c, k) in current.counts() {
                if !c.is_identity() {
                    next.insert_n(c.clone(), k % m);
                }
            }
            if next.is_empty() {
                next.insert(params.identity());
            }
            steps.push(ReductionStep { before: current.clone(), action: ReductionAction::Cancel, after: next.clone() });
            current = next;
            continue;
        }
        if current.counts().any(|(c, _)| !c.is_primary()) {
            let primaries: Vec<ColorVector<R>> = params.primaries();
            let mut next = Multiset::new();
            for (c, k) in current.counts() {
                if c.is_primary() {
                    next.insert_n(c.clone(), k);
                    continue;
                }
                for (i, unit) in primaries.iter().enumerate() {
                    next.insert_n(unit.clone(), c.entry(i) as usize * k);
                }
            }
            steps.push(ReductionStep { before: current.clone(), action: ReductionAction::Expand, after: next.clone() });
            current = next;
            continue;
        }
        let combined: Multiset<R> = std::iter::once(current.sum(params)?).collect();
        steps.push(ReductionStep { before: current.clone(), action: ReductionAction::Combine, after: combined.clone() });
        current = combined;
    }

    let result = current.iter().next().cloned().unwrap_or_else(|| params.identity());
    Ok(ReductionTrace { steps, result })
}
