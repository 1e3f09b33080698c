//! Dehn's algorithm: length-reducing rules `u -> v` taken from factorizations
//! `r = u·v⁻¹` of elements of R* with `|u| > |r|/2`, applied greedily after
//! free reduction.

use serde::Serialize;

use crate::presentation::{relator_closure, Presentation};
use crate::words::{invert, Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DehnRule {
    pub lhs: Word,
    pub rhs: Word,
}

/// All rules from R*, sorted by decreasing `|lhs|`, then lexicographically.
pub fn dehn_rules(p: &Presentation) -> Vec<DehnRule> {
    let mut rules = Vec::new();
    for r in relator_closure(p).iter() {
        let n = r.len();
        for split in n / 2 + 1..=n {
            rules.push(DehnRule { lhs: r.subword(0, split), rhs: invert(&r.subword(split, n)) });
        }
    }
    rules.sort_by(|a, b| b.lhs.len().cmp(&a.lhs.len()).then_with(|| a.cmp(b)));
    rules.dedup();
    rules
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DehnStep {
    /// Deletes the cancelling pair at `position`, `position + 1`.
    FreeCancellation { position: usize },
    /// Replaces the occurrence of `rules[rule].lhs` at `position` by its rhs.
    Rule { position: usize, rule: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DehnReductionTrace {
    pub steps: Vec<DehnStep>,
    pub final_word: Word,
}

impl DehnReductionTrace {
    pub fn rule_steps(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, DehnStep::Rule { .. })).count()
    }
}

/// Applies `steps` to `w`; `None` if a step does not match the word.
pub fn replay(w: &Word, rules: &[DehnRule], steps: &[DehnStep]) -> Option<Word> {
    let mut cur = w.clone();
    for step in steps {
        cur = match *step {
            DehnStep::FreeCancellation { position } => {
                let l = cur.letters();
                if position + 1 >= l.len() || !l[position].cancels(l[position + 1]) {
                    return None;
                }
                cur.splice(position, 2, &[])
            }
            DehnStep::Rule { position, rule } => {
                let rule = rules.get(rule)?;
                let end = position + rule.lhs.len();
                if end > cur.len() || cur.letters()[position..end] != *rule.lhs.letters() {
                    return None;
                }
                cur.splice(position, rule.lhs.len(), rule.rhs.letters())
            }
        };
    }
    Some(cur)
}

fn free_reduce_traced(w: &Word, steps: &mut Vec<DehnStep>) -> Word {
    let mut stack: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w.letters() {
        match stack.last() {
            Some(&top) if top.cancels(l) => {
                steps.push(DehnStep::FreeCancellation { position: stack.len() - 1 });
                stack.pop();
            }
            _ => stack.push(l),
        }
    }
    Word::from_letters(stack)
}

/// Longest lhs first, then leftmost occurrence, then rule order.
fn best_match(w: &Word, rules: &[DehnRule]) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, usize)> = None;
    for (i, rule) in rules.iter().enumerate() {
        let len = rule.lhs.len();
        if let Some((best_len, _, _)) = best {
            if len < best_len {
                break;
            }
        }
        if len == 0 || len > w.len() {
            continue;
        }
        if let Some(pos) = w.find(rule.lhs.letters()) {
            match best {
                Some((_, best_pos, _)) if best_pos <= pos => {}
                _ => best = Some((len, pos, i)),
            }
        }
    }
    best.map(|(_, pos, i)| (pos, i))
}

/// Greedy Dehn reduction with a full trace. `rules` must be sorted as
/// returned by [`dehn_rules`].
pub fn dehn_reduce(w: &Word, rules: &[DehnRule]) -> DehnReductionTrace {
    let mut steps = Vec::new();
    let mut cur = free_reduce_traced(w, &mut steps);
    while let Some((position, rule)) = best_match(&cur, rules) {
        steps.push(DehnStep::Rule { position, rule });
        let r = &rules[rule];
        cur = cur.splice(position, r.lhs.len(), r.rhs.letters());
        cur = free_reduce_traced(&cur, &mut steps);
    }
    DehnReductionTrace { steps, final_word: cur }
}

/// Verdict of Dehn's algorithm. Only `Trivial` is unconditionally sound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DehnVerdict {
    Trivial,
    /// The word did not reduce to the empty word; it is nontrivial only if
    /// the presentation is a genuine Dehn presentation.
    NonTrivialAssumingDehn,
}

/// Rules computed once for repeated queries.
#[derive(Clone, Debug)]
pub struct DehnSolver {
    rules: Vec<DehnRule>,
}

impl DehnSolver {
    pub fn new(p: &Presentation) -> Self {
        DehnSolver { rules: dehn_rules(p) }
    }

    pub fn rules(&self) -> &[DehnRule] {
        &self.rules
    }

    pub fn reduce(&self, w: &Word) -> DehnReductionTrace {
        dehn_reduce(w, &self.rules)
    }

    pub fn verdict(&self, w: &Word) -> DehnVerdict {
        if self.reduce(w).final_word.is_empty() {
            DehnVerdict::Trivial
        } else {
            DehnVerdict::NonTrivialAssumingDehn
        }
    }
}

pub fn wp_dehn(w: &Word, p: &Presentation) -> DehnVerdict {
    DehnSolver::new(p).verdict(w)
}
