//! Per-mark precision/recall/F1 scoring of punctuation hypotheses.
//!
//! Both texts are tokenized and reduced to word sequences with punctuation
//! slots: the multiset of marks immediately following each Word/Digit token,
//! plus one slot for marks preceding the first word. Word sequences are
//! aligned by minimum edit distance (unit costs) and slots of aligned words
//! are compared mark by mark; marks attached to unaligned words count as
//! false positives (hypothesis side) or false negatives (reference side).
//!
//! Tie-breaking in the alignment backtrace is chosen so that swapping the
//! two texts mirrors the alignment exactly, which makes precision and recall
//! swap roles under exchange of reference and hypothesis.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::token::{tokenize, PunctuationSet, Token, TokenSeq};

/// Counts and derived scores for one mark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkScore {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl MarkScore {
    fn from_counts(tp: u64, fp: u64, fn_: u64) -> Self {
        // A zero denominator scores 0 when the opposing count is positive;
        // marks absent from both sides never reach this constructor.
        let precision = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
        let recall = if tp + fn_ > 0 { tp as f64 / (tp + fn_) as f64 } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        MarkScore {
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            precision,
            recall,
            f1,
        }
    }

    pub fn is_perfect(&self) -> bool {
        self.false_positives == 0 && self.false_negatives == 0 && self.true_positives > 0
    }
}

/// Per-mark scores over one text pair or an aggregated corpus.
///
/// Marks absent from both reference and hypothesis are reported as absent
/// (no entry) rather than as a vacuous 1.0.
#[derive(Debug, Clone, Default, Serialize)]
pub struct PunctF1Report {
    pub marks: BTreeMap<char, MarkScore>,
}

impl PunctF1Report {
    pub fn mark(&self, mark: char) -> Option<&MarkScore> {
        self.marks.get(&mark)
    }

    /// Unweighted mean F1 over the marks present.
    pub fn macro_f1(&self) -> Option<f64> {
        if self.marks.is_empty() {
            return None;
        }
        Some(self.marks.values().map(|s| s.f1).sum::<f64>() / self.marks.len() as f64)
    }

    /// Merge raw counts from another report (per-sentence → corpus roll-up).
    pub fn absorb(&mut self, other: &PunctF1Report) {
        let mut merged: BTreeMap<char, (u64, u64, u64)> = BTreeMap::new();
        for (mark, s) in self.marks.iter().chain(other.marks.iter()) {
            let e = merged.entry(*mark).or_default();
            e.0 += s.true_positives;
            e.1 += s.false_positives;
            e.2 += s.false_negatives;
        }
        self.marks = merged
            .into_iter()
            .map(|(mark, (tp, fp, fn_))| (mark, MarkScore::from_counts(tp, fp, fn_)))
            .collect();
    }
}

/// A word plus the marks that immediately follow it.
#[derive(Debug, Clone)]
struct Slot {
    word: Token,
    marks: Vec<char>,
}

fn slots(seq: &TokenSeq) -> (Vec<char>, Vec<Slot>) {
    let mut leading: Vec<char> = Vec::new();
    let mut out: Vec<Slot> = Vec::new();
    for token in seq.iter() {
        match token.class() {
            crate::token::TokenClass::Word | crate::token::TokenClass::Digit => {
                out.push(Slot { word: token.clone(), marks: Vec::new() });
            }
            crate::token::TokenClass::Punct => {
                let mark = token.text().chars().next().expect("punct tokens are single chars");
                match out.last_mut() {
                    Some(slot) => slot.marks.push(mark),
                    None => leading.push(mark),
                }
            }
            _ => {}
        }
    }
    (leading, out)
}

#[derive(Debug, Clone, Copy)]
enum Step {
    /// Consume one word from each side (match or substitution).
    Pair,
    /// Consume a reference word with no counterpart.
    RefOnly,
    /// Consume a hypothesis word with no counterpart.
    HypOnly,
}

/// Minimum-edit-distance word alignment with a symmetric, deterministic
/// backtrace: prefer pairing; between the two one-sided moves, advance the
/// side whose current word is ordered first.
fn align(reference: &[Slot], hypothesis: &[Slot]) -> Vec<Step> {
    let n = reference.len();
    let m = hypothesis.len();
    let mut cost = vec![vec![0u32; m + 1]; n + 1];
    for (i, row) in cost.iter_mut().enumerate() {
        row[0] = i as u32;
    }
    for (j, cell) in cost[0].iter_mut().enumerate() {
        *cell = j as u32;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = if reference[i - 1].word == hypothesis[j - 1].word { 0 } else { 1 };
            cost[i][j] = (cost[i - 1][j - 1] + sub)
                .min(cost[i - 1][j] + 1)
                .min(cost[i][j - 1] + 1);
        }
    }

    let mut steps = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        if i > 0 && j > 0 {
            let sub = if reference[i - 1].word == hypothesis[j - 1].word { 0 } else { 1 };
            if cost[i][j] == cost[i - 1][j - 1] + sub {
                steps.push(Step::Pair);
                i -= 1;
                j -= 1;
                continue;
            }
        }
        let ref_ok = i > 0 && cost[i][j] == cost[i - 1][j] + 1;
        let hyp_ok = j > 0 && cost[i][j] == cost[i][j - 1] + 1;
        let take_ref = match (ref_ok, hyp_ok) {
            (true, false) => true,
            (false, true) => false,
            _ => reference[i - 1].word <= hypothesis[j - 1].word,
        };
        if take_ref {
            steps.push(Step::RefOnly);
            i -= 1;
        } else {
            steps.push(Step::HypOnly);
            j -= 1;
        }
    }
    steps.reverse();
    steps
}

/// Compare two mark multisets: shared occurrences are true positives,
/// hypothesis-only are false positives, reference-only are false negatives.
fn score_slot(
    counts: &mut BTreeMap<char, (u64, u64, u64)>,
    ref_marks: &[char],
    hyp_marks: &[char],
    puncts: &PunctuationSet,
) {
    for &mark in puncts.marks() {
        let r = ref_marks.iter().filter(|&&m| m == mark).count() as u64;
        let h = hyp_marks.iter().filter(|&&m| m == mark).count() as u64;
        if r == 0 && h == 0 {
            continue;
        }
        let e = counts.entry(mark).or_default();
        e.0 += r.min(h);
        e.1 += h.saturating_sub(r);
        e.2 += r.saturating_sub(h);
    }
}

/// Score `hypothesis` against `reference` per mark.
pub fn align_and_score(
    reference: &str,
    hypothesis: &str,
    puncts: &PunctuationSet,
) -> PunctF1Report {
    let (ref_leading, ref_slots) = slots(&tokenize(reference, puncts));
    let (hyp_leading, hyp_slots) = slots(&tokenize(hypothesis, puncts));

    let mut counts: BTreeMap<char, (u64, u64, u64)> = BTreeMap::new();
    score_slot(&mut counts, &ref_leading, &hyp_leading, puncts);

    let steps = align(&ref_slots, &hyp_slots);
    let (mut i, mut j) = (0usize, 0usize);
    for step in steps {
        match step {
            Step::Pair => {
                score_slot(&mut counts, &ref_slots[i].marks, &hyp_slots[j].marks, puncts);
                i += 1;
                j += 1;
            }
            Step::RefOnly => {
                score_slot(&mut counts, &ref_slots[i].marks, &[], puncts);
                i += 1;
            }
            Step::HypOnly => {
                score_slot(&mut counts, &[], &hyp_slots[j].marks, puncts);
                j += 1;
            }
        }
    }

    PunctF1Report {
        marks: counts
            .into_iter()
            .map(|(mark, (tp, fp, fn_))| (mark, MarkScore::from_counts(tp, fp, fn_)))
            .collect(),
    }
}
