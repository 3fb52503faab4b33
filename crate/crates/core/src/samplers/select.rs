use serde::Serialize;

use crate::corpus::EntryId;
use crate::error::Result;

/// Above this many combinations the search goes greedy, part by part.
pub const EXHAUSTIVE_LIMIT: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    /// Mean AppMatch over all pairs of selected entries (generation).
    Pairwise,
    /// Mean AppMatch of each selected entry against the source (editing).
    Source,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Selection {
    /// One entry per part, in part order. Greedy search records prefixes.
    pub choice: Vec<EntryId>,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectionOutcome {
    pub choice: Vec<EntryId>,
    pub objective: Option<f64>,
    pub evaluated: Vec<Selection>,
    pub exhaustive: bool,
}

fn value<P, S>(choice: &[EntryId], objective: Objective, pair: &mut P, single: &mut S) -> Result<f64>
where
    P: FnMut(EntryId, EntryId) -> Result<f64>,
    S: FnMut(usize, EntryId) -> Result<f64>,
{
    match objective {
        Objective::Pairwise => {
            let (mut sum, mut n) = (0.0, 0usize);
            for i in 0..choice.len() {
                for j in i + 1..choice.len() {
                    sum += pair(choice[i], choice[j])?;
                    n += 1;
                }
            }
            Ok(if n == 0 { 0.0 } else { sum / n as f64 })
        }
        Objective::Source => {
            let mut sum = 0.0;
            for (i, id) in choice.iter().enumerate() {
                sum += single(i, *id)?;
            }
            Ok(sum / choice.len() as f64)
        }
    }
}

/// Picks one entry per list maximizing the objective. Lists must be nonempty
/// and ranked; ties keep the selection earliest in lexicographic rank order.
pub fn select<P, S>(lists: &[Vec<EntryId>], objective: Objective, mut pair: P, mut single: S) -> Result<SelectionOutcome>
where
    P: FnMut(EntryId, EntryId) -> Result<f64>,
    S: FnMut(usize, EntryId) -> Result<f64>,
{
    debug_assert!(!lists.is_empty() && lists.iter().all(|l| !l.is_empty()));
    if objective == Objective::Pairwise && lists.len() == 1 {
        return Ok(SelectionOutcome {
            choice: vec![lists[0][0]],
            objective: None,
            evaluated: Vec::new(),
            exhaustive: true,
        });
    }
    let total: usize = lists.iter().map(|l| l.len()).product();
    let mut evaluated = Vec::new();
    if total <= EXHAUSTIVE_LIMIT {
        let mut ranks = vec![0usize; lists.len()];
        let mut best: Option<(Vec<EntryId>, f64)> = None;
        loop {
            let choice: Vec<EntryId> = ranks.iter().zip(lists).map(|(r, l)| l[*r]).collect();
            let v = value(&choice, objective, &mut pair, &mut single)?;
            if best.as_ref().is_none_or(|(_, b)| v > *b) {
                best = Some((choice.clone(), v));
            }
            evaluated.push(Selection { choice, objective: v });
            // Odometer with the last part fastest.
            let mut i = lists.len();
            loop {
                if i == 0 {
                    let (choice, v) = best.expect("at least one selection");
                    return Ok(SelectionOutcome {
                        choice,
                        objective: Some(v),
                        evaluated,
                        exhaustive: true,
                    });
                }
                i -= 1;
                ranks[i] += 1;
                if ranks[i] < lists[i].len() {
                    break;
                }
                ranks[i] = 0;
            }
        }
    }
    let mut choice: Vec<EntryId> = Vec::with_capacity(lists.len());
    for list in lists {
        let mut best: Option<(EntryId, f64)> = None;
        for id in list {
            let mut trial = choice.clone();
            trial.push(*id);
            let v = value(&trial, objective, &mut pair, &mut single)?;
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((*id, v));
            }
            evaluated.push(Selection { choice: trial, objective: v });
        }
        choice.push(best.expect("nonempty list").0);
    }
    let v = value(&choice, objective, &mut pair, &mut single)?;
    Ok(SelectionOutcome {
        choice,
        objective: Some(v),
        evaluated,
        exhaustive: false,
    })
}
