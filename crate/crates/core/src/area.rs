//! Combinatorial area of null-homotopic words by breadth-first search, and
//! Dehn-function tables built from it.
//!
//! Area is invariant under conjugation and inversion, so the search runs on
//! cyclic words: a state is the least rotation of the cyclic reduction of a
//! word or of its inverse. One move replaces a nonempty cyclic subword `u`
//! by `v` where `u·v⁻¹` is an element of R*. In a reduced van Kampen diagram
//! some face shares an edge with the boundary, so peeling faces off one at a
//! time reaches every minimal diagram without pure insertions.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::abelian::AbelianizationMap;
use crate::oracle::{OracleError, WordOracle};
use crate::presentation::{relator_closure, Presentation};
use crate::words::{cyclic_reduce, invert, Letter, Word};

pub const DEFAULT_NODE_CAP: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AreaMove {
    /// Start of `u` in the current state, read cyclically.
    pub position: usize,
    /// Index into the sorted R*.
    pub closure_index: usize,
    /// `u` is the first `split` letters of the R* element.
    pub split: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum AreaKind {
    /// Minimal among derivations whose intermediate words respect the
    /// length cap, and unchanged when the cap is raised by 2.
    Exact(usize),
    UpperBound(usize),
    Unknown,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AreaStats {
    pub nodes: usize,
    pub length_cap: usize,
    pub node_cap_hit: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AreaResult {
    pub kind: AreaKind,
    pub stats: AreaStats,
    pub witness: Option<Vec<AreaMove>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AreaOptions {
    /// Longest intermediate word; default `|w| + 2·(longest relator)`.
    pub length_cap: Option<usize>,
    pub node_cap: usize,
    /// Re-run with the cap raised by 2 before calling a result exact.
    pub stability_check: bool,
}

impl Default for AreaOptions {
    fn default() -> Self {
        AreaOptions { length_cap: None, node_cap: DEFAULT_NODE_CAP, stability_check: true }
    }
}

/// Least rotation of the cyclic reduction of `w` or of `w⁻¹`.
pub fn cyclic_class(w: &Word) -> Word {
    let (core, _) = cyclic_reduce(w);
    let inv = invert(&core);
    (0..core.len().max(1)).flat_map(|i| [core.rotate(i), inv.rotate(i)]).min().unwrap_or_default()
}

struct Rule {
    lhs: Vec<Letter>,
    rhs: Vec<Letter>,
    mv: (usize, usize),
}

/// R* with all its `u → v` splits, `u` nonempty.
pub struct AreaSearch {
    closure: Vec<Word>,
    rules: Vec<Rule>,
    max_relator: usize,
}

enum Outcome {
    Found(Vec<AreaMove>),
    Exhausted,
    NodeCap,
}

fn occurs_at(w: &[Letter], position: usize, pattern: &[Letter]) -> bool {
    pattern.iter().enumerate().all(|(i, l)| w[(position + i) % w.len()] == *l)
}

fn rewrite(w: &[Letter], position: usize, split: usize, rhs: &[Letter]) -> Word {
    let n = w.len();
    let mut next = Vec::with_capacity(n - split + rhs.len());
    next.extend_from_slice(rhs);
    next.extend((split..n).map(|i| w[(position + i) % n]));
    cyclic_class(&Word::from_letters(next))
}

impl AreaSearch {
    pub fn new(p: &Presentation) -> Self {
        let closure = relator_closure(p).to_vec();
        let mut rules = Vec::new();
        for (i, r) in closure.iter().enumerate() {
            for split in 1..=r.len() {
                rules.push(Rule {
                    lhs: r.letters()[..split].to_vec(),
                    rhs: invert(&r.subword(split, r.len())).into_letters(),
                    mv: (i, split),
                });
            }
        }
        AreaSearch { closure, rules, max_relator: p.max_relator_len() }
    }

    pub fn closure(&self) -> &[Word] {
        &self.closure
    }

    /// Applies one move to a state; `None` if `u` does not occur there.
    pub fn apply(&self, state: &Word, m: AreaMove) -> Option<Word> {
        let r = self.closure.get(m.closure_index)?;
        let w = state.letters();
        if m.split == 0 || m.split > r.len() || m.split > w.len() || m.position >= w.len() {
            return None;
        }
        if !occurs_at(w, m.position, &r.letters()[..m.split]) {
            return None;
        }
        let v = invert(&r.subword(m.split, r.len()));
        Some(rewrite(w, m.position, m.split, v.letters()))
    }

    /// Replays a witness from the class of `w`; the result is empty exactly
    /// when the witness is valid.
    pub fn replay(&self, w: &Word, moves: &[AreaMove]) -> Option<Word> {
        moves.iter().try_fold(cyclic_class(w), |cur, &m| self.apply(&cur, m))
    }

    fn successors(&self, w: &[Letter], mut visit: impl FnMut(Word, AreaMove) -> bool) -> bool {
        for rule in &self.rules {
            let s = rule.lhs.len();
            if s > w.len() {
                continue;
            }
            for position in 0..w.len() {
                if !occurs_at(w, position, &rule.lhs) {
                    continue;
                }
                let mv = AreaMove { position, closure_index: rule.mv.0, split: rule.mv.1 };
                if visit(rewrite(w, position, s, &rule.rhs), mv) {
                    return true;
                }
            }
        }
        false
    }

    fn search(&self, start: &Word, cap: usize, node_cap: usize, nodes: &mut usize) -> Outcome {
        if start.is_empty() {
            return Outcome::Found(Vec::new());
        }
        // node id → (parent, move)
        let root = AreaMove { position: 0, closure_index: 0, split: 0 };
        let mut parent: Vec<(usize, AreaMove)> = vec![(usize::MAX, root)];
        let mut seen: HashMap<Word, usize> = HashMap::from([(start.clone(), 0)]);
        let mut frontier = vec![(start.clone(), 0usize)];
        let path = |parent: &[(usize, AreaMove)], mut id: usize, last: AreaMove| {
            let mut moves = vec![last];
            while parent[id].0 != usize::MAX {
                moves.push(parent[id].1);
                id = parent[id].0;
            }
            moves.reverse();
            moves
        };
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (w, id) in &frontier {
                let mut found = None;
                let mut capped = false;
                self.successors(w.letters(), |succ, mv| {
                    if succ.is_empty() {
                        found = Some(mv);
                        return true;
                    }
                    if succ.len() > cap || seen.contains_key(&succ) {
                        return false;
                    }
                    if seen.len() >= node_cap {
                        capped = true;
                        return true;
                    }
                    let new_id = parent.len();
                    parent.push((*id, mv));
                    seen.insert(succ.clone(), new_id);
                    next.push((succ, new_id));
                    false
                });
                *nodes += 1;
                if let Some(mv) = found {
                    return Outcome::Found(path(&parent, *id, mv));
                }
                if capped {
                    return Outcome::NodeCap;
                }
            }
            frontier = next;
        }
        Outcome::Exhausted
    }

    /// Greedy length-reducing rewriting on cyclic words (cyclic Dehn's
    /// algorithm), longest `u` first.
    fn greedy_witness(&self, start: &Word) -> Option<Vec<AreaMove>> {
        let mut shrinking: Vec<&Rule> = self.rules.iter().filter(|r| r.lhs.len() > r.rhs.len()).collect();
        shrinking.sort_by(|a, b| b.lhs.len().cmp(&a.lhs.len()).then_with(|| a.lhs.cmp(&b.lhs)));
        let mut cur = start.clone();
        let mut moves = Vec::new();
        while !cur.is_empty() {
            let w = cur.letters();
            let (rule, position) = shrinking.iter().find_map(|r| {
                (r.lhs.len() <= w.len())
                    .then(|| (0..w.len()).find(|&p| occurs_at(w, p, &r.lhs)))
                    .flatten()
                    .map(|p| (r, p))
            })?;
            moves.push(AreaMove { position, closure_index: rule.mv.0, split: rule.mv.1 });
            cur = rewrite(w, position, rule.lhs.len(), &rule.rhs);
        }
        Some(moves)
    }

    pub fn area(&self, w: &Word, opts: &AreaOptions) -> AreaResult {
        let start = cyclic_class(w);
        let cap = opts.length_cap.unwrap_or(w.len() + 2 * self.max_relator).max(start.len());
        let mut stats = AreaStats { nodes: 0, length_cap: cap, node_cap_hit: false };
        match self.search(&start, cap, opts.node_cap, &mut stats.nodes) {
            Outcome::Found(moves) => {
                let d = moves.len();
                if !opts.stability_check || d == 0 {
                    return AreaResult { kind: AreaKind::Exact(d), stats, witness: Some(moves) };
                }
                stats.length_cap = cap + 2;
                match self.search(&start, cap + 2, opts.node_cap, &mut stats.nodes) {
                    Outcome::Found(m2) if m2.len() == d => {
                        AreaResult { kind: AreaKind::Exact(d), stats, witness: Some(moves) }
                    }
                    Outcome::Found(m2) => AreaResult { kind: AreaKind::UpperBound(m2.len()), stats, witness: Some(m2) },
                    _ => {
                        stats.node_cap_hit = true;
                        AreaResult { kind: AreaKind::UpperBound(d), stats, witness: Some(moves) }
                    }
                }
            }
            Outcome::Exhausted => AreaResult { kind: AreaKind::Unknown, stats, witness: None },
            Outcome::NodeCap => {
                stats.node_cap_hit = true;
                match self.greedy_witness(&start) {
                    Some(moves) => AreaResult { kind: AreaKind::UpperBound(moves.len()), stats, witness: Some(moves) },
                    None => AreaResult { kind: AreaKind::Unknown, stats, witness: None },
                }
            }
        }
    }
}

pub fn area(w: &Word, p: &Presentation, opts: &AreaOptions) -> AreaResult {
    AreaSearch::new(p).area(w, opts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    /// Every area is known up to an upper bound.
    UpperBound,
    /// Some area is unknown; the value is a lower bound.
    Partial,
}

impl std::fmt::Display for Exactness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Exactness::Exact => "exact",
            Exactness::UpperBound => "upper_bound",
            Exactness::Partial => "partial",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaRow {
    pub n: usize,
    pub delta: usize,
    pub exactness: Exactness,
    /// A trivial word attaining the value, when there is one.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DehnFunctionTable {
    pub rows: Vec<DeltaRow>,
    pub words_enumerated: usize,
    pub trivial_classes: usize,
    pub oracle: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assumption: Option<String>,
}

impl DehnFunctionTable {
    pub fn values(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.delta).collect()
    }

    pub fn to_tsv(&self) -> String {
        self.rows.iter().map(|r| format!("{}\t{}\t{}\n", r.n, r.delta, r.exactness)).collect()
    }
}

/// Calls `f` on every cyclically reduced word of length exactly `n`.
fn for_each_cyclically_reduced(generators: usize, n: usize, f: &mut impl FnMut(&Word)) -> usize {
    fn go(prefix: &mut Vec<Letter>, generators: usize, n: usize, f: &mut impl FnMut(&Word), count: &mut usize) {
        if prefix.len() == n {
            let w = Word::from_letters(prefix.clone());
            if w.is_cyclically_reduced() {
                *count += 1;
                f(&w);
            }
            return;
        }
        for col in 0..2 * generators {
            let l = Letter::from_column(col);
            if prefix.last().is_some_and(|&p| p.cancels(l)) {
                continue;
            }
            prefix.push(l);
            go(prefix, generators, n, f, count);
            prefix.pop();
        }
    }
    let mut count = 0;
    go(&mut Vec::with_capacity(n), generators, n, f, &mut count);
    count
}

/// `δ(n)` for `n = 0..=n_max`: the largest area of a trivial word of length
/// at most `n`. Conjugation and inversion preserve area, so only one
/// cyclically reduced word per cyclic class is searched.
pub fn dehn_function_estimate(
    p: &Presentation,
    oracle: &dyn WordOracle,
    n_max: usize,
    opts: &AreaOptions,
) -> Result<DehnFunctionTable, OracleError> {
    let search = AreaSearch::new(p);
    let abelian = AbelianizationMap::new(p);
    let mut classes: BTreeMap<Word, AreaKind> = BTreeMap::new();
    let mut rows = Vec::new();
    let mut words = 0;
    let (mut exact_max, mut upper_max, mut unknown) = (0usize, 0usize, 0usize);
    let mut witness: Option<Word> = None;
    let mut witness_value = 0;
    for n in 0..=n_max {
        let mut failure = None;
        if n > 0 {
            words += for_each_cyclically_reduced(p.generator_count(), n, &mut |w| {
                if failure.is_some() || !abelian.is_trivial(w) {
                    return;
                }
                let key = cyclic_class(w);
                if classes.contains_key(&key) {
                    return;
                }
                match oracle.is_trivial(w) {
                    Ok(true) => {}
                    Ok(false) => return,
                    Err(e) => {
                        failure = Some(e);
                        return;
                    }
                }
                let kind = search.area(w, opts).kind;
                let value = match kind {
                    AreaKind::Exact(a) => {
                        exact_max = exact_max.max(a);
                        a
                    }
                    AreaKind::UpperBound(a) => {
                        upper_max = upper_max.max(a);
                        a
                    }
                    AreaKind::Unknown => {
                        unknown += 1;
                        0
                    }
                };
                if value > witness_value || witness.is_none() && value > 0 {
                    witness_value = value;
                    witness = Some(w.clone());
                }
                classes.insert(key, kind);
            });
        }
        if let Some(e) = failure {
            return Err(e);
        }
        let (delta, exactness) = if unknown > 0 {
            (exact_max, Exactness::Partial)
        } else if upper_max <= exact_max {
            (exact_max, Exactness::Exact)
        } else {
            (upper_max, Exactness::UpperBound)
        };
        rows.push(DeltaRow { n, delta, exactness, witness: witness.as_ref().map(|w| p.render(w)) });
    }
    Ok(DehnFunctionTable {
        rows,
        words_enumerated: words,
        trivial_classes: classes.len(),
        oracle: oracle.name().to_string(),
        assumption: oracle.assumption().map(str::to_string),
    })
}

/// Checks `δ_i(n) ≤ C·δ_j(min(Cn + C, N)) + Cn + C` on the computed range,
/// where `N` is the last `n` computed for `δ_j`.
pub fn robustness_holds(delta_i: &[usize], delta_j: &[usize], c: usize) -> bool {
    let Some(last) = delta_j.len().checked_sub(1) else { return delta_i.is_empty() };
    delta_i.iter().enumerate().all(|(n, &d)| d <= c * delta_j[(c * n + c).min(last)] + c * n + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{CosetOracle, DehnOracle, FreeOracle};

    fn exact(p: &Presentation, text: &str) -> AreaResult {
        area(&p.parse_word(text).unwrap(), p, &AreaOptions::default())
    }

    #[test]
    fn single_relator_has_area_one() {
        let p: Presentation = "< a, b | a b a^-1 b^-1 >".parse().unwrap();
        let r = exact(&p, "a b a^-1 b^-1");
        assert_eq!(r.kind, AreaKind::Exact(1));
        assert_eq!(exact(&p, "1").kind, AreaKind::Exact(0));
        assert_eq!(exact(&p, "b a^-1 b^-1 a").kind, AreaKind::Exact(1));
    }

    #[test]
    fn commutator_of_square() {
        let p: Presentation = "< a, b | a b a^-1 b^-1 >".parse().unwrap();
        let w = p.parse_word("a a b a^-1 a^-1 b^-1").unwrap();
        let r = area(&w, &p, &AreaOptions::default());
        assert_eq!(r.kind, AreaKind::Exact(2));
        let search = AreaSearch::new(&p);
        assert_eq!(search.replay(&w, r.witness.as_ref().unwrap()), Some(Word::empty()));
    }

    #[test]
    fn nontrivial_word_is_unknown() {
        let p: Presentation = "< a | a^3 >".parse().unwrap();
        let r = exact(&p, "a");
        assert_eq!(r.kind, AreaKind::Unknown);
        assert!(r.witness.is_none());
    }

    #[test]
    fn node_cap_falls_back_to_dehn() {
        let p: Presentation = "< s1, s2, s3, s4 | s1 s2 s1^-1 s2^-1 s3 s4 s3^-1 s4^-1 >".parse().unwrap();
        let w =
            p.parse_word("s1 s2 s1^-1 s2^-1 s3 s4 s3^-1 s4^-1 s2 s1 s2 s1^-1 s2^-1 s3 s4 s3^-1 s4^-1 s2^-1").unwrap();
        let opts = AreaOptions { node_cap: 5, ..AreaOptions::default() };
        let r = area(&w, &p, &opts);
        assert!(r.stats.node_cap_hit);
        assert_eq!(r.kind, AreaKind::UpperBound(2));
        assert_eq!(AreaSearch::new(&p).replay(&w, r.witness.as_ref().unwrap()), Some(Word::empty()));
    }

    #[test]
    fn cyclic_group_table() {
        let p: Presentation = "< a | a^3 >".parse().unwrap();
        let oracle = CosetOracle::enumerate(&p, 10).unwrap();
        let t = dehn_function_estimate(&p, &oracle, 8, &AreaOptions::default()).unwrap();
        assert_eq!(t.values(), (0..=8).map(|n| n / 3).collect::<Vec<_>>());
        assert!(t.rows.iter().all(|r| r.exactness == Exactness::Exact));
        assert_eq!(t.rows[3].delta, 1);
        assert!(t.to_tsv().starts_with("0\t0\texact\n"));
    }

    #[test]
    fn free_group_table_is_zero() {
        let p = Presentation::free(&["a", "b"]).unwrap();
        let t = dehn_function_estimate(&p, &FreeOracle, 6, &AreaOptions::default()).unwrap();
        assert!(t.values().iter().all(|&d| d == 0));
        assert_eq!(t.trivial_classes, 0);
    }

    #[test]
    fn genus_two_table() {
        let p: Presentation = "< s1, s2, s3, s4 | s1 s2 s1^-1 s2^-1 s3 s4 s3^-1 s4^-1 >".parse().unwrap();
        let t = dehn_function_estimate(&p, &DehnOracle::new(&p), 8, &AreaOptions::default()).unwrap();
        assert_eq!(t.rows[7].delta, 0);
        assert!(t.rows[8].delta >= 1);
        assert!(t.assumption.is_some());
        let values = t.values();
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn robustness_between_presentations_of_z3() {
        let p: Presentation = "< a | a^3 >".parse().unwrap();
        let q: Presentation = "< a, b | a^3, b >".parse().unwrap();
        let opts = AreaOptions::default();
        let dp = dehn_function_estimate(&p, &CosetOracle::enumerate(&p, 10).unwrap(), 8, &opts).unwrap();
        let dq = dehn_function_estimate(&q, &CosetOracle::enumerate(&q, 10).unwrap(), 8, &opts).unwrap();
        assert!(robustness_holds(&dp.values(), &dq.values(), 3));
        assert!(robustness_holds(&dq.values(), &dp.values(), 3));
        assert!(!robustness_holds(&[100], &[0], 3));
    }

    #[test]
    fn class_key_is_rotation_and_inversion_invariant() {
        let p: Presentation = "< a, b | >".parse().unwrap();
        let w = p.parse_word("a b^-1 a a b").unwrap();
        let key = cyclic_class(&w);
        for i in 0..w.len() {
            assert_eq!(cyclic_class(&w.rotate(i)), key);
            assert_eq!(cyclic_class(&invert(&w.rotate(i))), key);
        }
    }
}
