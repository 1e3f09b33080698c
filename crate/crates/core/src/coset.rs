//! Todd–Coxeter coset enumeration (HLT strategy) with union-find
//! coincidence processing.
//!
//! Column `2g` is generator `g`, column `2g + 1` its inverse.

use serde::Serialize;
use thiserror::Error;

use crate::presentation::Presentation;
use crate::words::{Letter, Word};

pub const DEFAULT_MAX_COSETS: usize = 1_000_000;

const UNDEF: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CosetError {
    #[error("max_cosets must be at least 1")]
    ZeroLimit,
    #[error("max_cosets {0} exceeds the supported table size")]
    LimitTooLarge(usize),
    #[error("subgroup generator {index} uses generator #{generator}, but only {count} generators are declared")]
    UnknownGenerator { index: usize, generator: usize, count: usize },
    #[error("coset table is incomplete (enumeration overflowed at {0} cosets)")]
    Incomplete(usize),
    #[error("coset table is for a nontrivial subgroup; the action is not regular")]
    NotRegular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CosetStatus {
    Complete,
    Overflowed { limit: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    generators: usize,
    rows: Vec<u32>,
    cosets: usize,
    status: CosetStatus,
    trivial_subgroup: bool,
    relators: Vec<Word>,
    subgroup: Vec<Word>,
}

#[derive(Serialize)]
struct TableJson {
    cosets: usize,
    #[serde(flatten)]
    status: CosetStatus,
    /// `table[c][col]`, 0-based; `null` when undefined.
    table: Vec<Vec<Option<u32>>>,
}

impl CosetTable {
    pub fn status(&self) -> CosetStatus {
        self.status
    }

    pub fn is_complete(&self) -> bool {
        self.status == CosetStatus::Complete
    }

    /// Number of live cosets (coset 0 is the subgroup).
    pub fn len(&self) -> usize {
        self.cosets
    }

    pub fn is_empty(&self) -> bool {
        self.cosets == 0
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    fn width(&self) -> usize {
        2 * self.generators
    }

    pub fn entry(&self, coset: usize, letter: Letter) -> Option<usize> {
        let v = self.rows[coset * self.width() + letter.column()];
        (v != UNDEF).then_some(v as usize)
    }

    /// Follows `w` from `coset`; `None` if an undefined entry is hit.
    pub fn trace(&self, coset: usize, w: &Word) -> Option<usize> {
        w.letters().iter().try_fold(coset, |c, &l| self.entry(c, l))
    }

    /// Group order: number of cosets of the trivial subgroup, when complete.
    pub fn group_order(&self) -> Option<usize> {
        (self.is_complete() && self.trivial_subgroup).then_some(self.cosets)
    }

    /// Subgroup index, when complete.
    pub fn index(&self) -> Option<usize> {
        self.is_complete().then_some(self.cosets)
    }

    fn require_complete(&self) -> Result<(), CosetError> {
        match self.status {
            CosetStatus::Complete => Ok(()),
            CosetStatus::Overflowed { limit } => Err(CosetError::Incomplete(limit)),
        }
    }

    /// Word problem in a finite group via the regular action.
    pub fn wp_finite(&self, w: &Word) -> Result<bool, CosetError> {
        self.require_complete()?;
        if !self.trivial_subgroup {
            return Err(CosetError::NotRegular);
        }
        let trivial = self.trace(0, w) == Some(0);
        if cfg!(debug_assertions) && self.cosets <= 256 {
            let everywhere = (0..self.cosets).all(|c| self.trace(c, w) == Some(c));
            debug_assert_eq!(trivial, everywhere, "regular action check disagrees");
        }
        Ok(trivial)
    }

    /// Permutation of the cosets induced by each generator (`perm[g][c]`).
    pub fn to_permutation_rep(&self) -> Result<Vec<Vec<usize>>, CosetError> {
        self.require_complete()?;
        Ok((0..self.generators)
            .map(|g| (0..self.cosets).map(|c| self.entry(c, Letter::pos(g)).expect("complete table")).collect())
            .collect())
    }

    /// Checks inverse-column consistency, and for complete tables that every
    /// relator closes at every coset and every subgroup generator at coset 0.
    pub fn verify(&self) -> bool {
        let w = self.width();
        for c in 0..self.cosets {
            for col in 0..w {
                let d = self.rows[c * w + col];
                if d == UNDEF {
                    if self.is_complete() {
                        return false;
                    }
                    continue;
                }
                if d as usize >= self.cosets || self.rows[d as usize * w + (col ^ 1)] != c as u32 {
                    return false;
                }
            }
        }
        if self.is_complete() {
            let relators_close = self.relators.iter().all(|r| (0..self.cosets).all(|c| self.trace(c, r) == Some(c)));
            let subgroup_closes = self.subgroup.iter().all(|h| self.trace(0, h) == Some(0));
            return relators_close && subgroup_closes;
        }
        true
    }

    pub fn to_json(&self) -> serde_json::Value {
        let w = self.width();
        let table = (0..self.cosets)
            .map(|c| (0..w).map(|col| Some(self.rows[c * w + col]).filter(|&v| v != UNDEF)).collect())
            .collect();
        serde_json::to_value(TableJson { cosets: self.cosets, status: self.status, table }).expect("table serializes")
    }
}

struct Full;

struct Enumerator {
    width: usize,
    rows: Vec<u32>,
    /// Union-find parent; `parent[c] == c` for live cosets.
    parent: Vec<u32>,
    live: usize,
    capacity: usize,
    queue: Vec<u32>,
}

impl Enumerator {
    fn new(width: usize, capacity: usize) -> Self {
        let mut e = Enumerator { width, rows: Vec::new(), parent: Vec::new(), live: 0, capacity, queue: Vec::new() };
        e.rows.resize(width, UNDEF);
        e.parent.push(0);
        e.live = 1;
        e
    }

    fn allocated(&self) -> usize {
        self.parent.len()
    }

    fn get(&self, c: u32, col: usize) -> u32 {
        self.rows[c as usize * self.width + col]
    }

    fn set(&mut self, c: u32, col: usize, d: u32) {
        self.rows[c as usize * self.width + col] = d;
    }

    fn is_live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn define(&mut self, c: u32, col: usize) -> Result<u32, Full> {
        if self.allocated() >= self.capacity {
            return Err(Full);
        }
        let d = self.allocated() as u32;
        self.parent.push(d);
        self.rows.extend(std::iter::repeat_n(UNDEF, self.width));
        self.live += 1;
        self.set(c, col, d);
        self.set(d, col ^ 1, c);
        Ok(d)
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut root = c;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = c;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (keep, kill) = if a < b { (a, b) } else { (b, a) };
        self.parent[kill as usize] = keep;
        self.live -= 1;
        self.queue.push(kill);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let e = self.queue[i];
            i += 1;
            for col in 0..self.width {
                let f = self.get(e, col);
                if f == UNDEF {
                    continue;
                }
                self.set(f, col ^ 1, UNDEF);
                let (e1, f1) = (self.rep(e), self.rep(f));
                let ex = self.get(e1, col);
                if ex != UNDEF {
                    self.merge(f1, ex);
                    continue;
                }
                let fx = self.get(f1, col ^ 1);
                if fx != UNDEF {
                    self.merge(e1, fx);
                    continue;
                }
                self.set(e1, col, f1);
                self.set(f1, col ^ 1, e1);
            }
        }
        #[cfg(debug_assertions)]
        if self.allocated() <= 4096 {
            self.debug_check();
        }
    }

    #[cfg(debug_assertions)]
    fn debug_check(&self) {
        for c in 0..self.allocated() as u32 {
            if !self.is_live(c) {
                continue;
            }
            for col in 0..self.width {
                let d = self.get(c, col);
                if d != UNDEF {
                    assert!(self.is_live(d), "live coset {c} points at dead coset {d}");
                    assert_eq!(self.get(d, col ^ 1), c, "inverse columns disagree at ({c}, {col})");
                }
            }
        }
    }

    /// Traces `w` (as columns) from `alpha` in both directions, defining
    /// cosets as needed and deducing or merging when the scans meet.
    fn scan_and_fill(&mut self, alpha: u32, w: &[usize]) -> Result<(), Full> {
        if w.is_empty() {
            return Ok(());
        }
        let (mut f, mut b) = (alpha, alpha);
        let (mut i, mut j) = (0usize, w.len() as isize - 1);
        loop {
            while i as isize <= j && self.get(f, w[i]) != UNDEF {
                f = self.get(f, w[i]);
                i += 1;
            }
            if i as isize > j {
                if f != alpha {
                    self.coincidence(f, alpha);
                }
                return Ok(());
            }
            while j >= i as isize && self.get(b, w[j as usize] ^ 1) != UNDEF {
                b = self.get(b, w[j as usize] ^ 1);
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i as isize {
                self.set(f, w[i], b);
                self.set(b, w[i] ^ 1, f);
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }

    /// Drops dead rows, keeping relative order. Returns the old→new map.
    fn compact(&mut self) -> Vec<u32> {
        let n = self.allocated();
        let mut map = vec![UNDEF; n];
        let mut next = 0u32;
        for c in 0..n as u32 {
            if self.is_live(c) {
                map[c as usize] = next;
                next += 1;
            }
        }
        let mut rows = Vec::with_capacity(next as usize * self.width);
        for c in 0..n as u32 {
            if map[c as usize] == UNDEF {
                continue;
            }
            for col in 0..self.width {
                let d = self.get(c, col);
                rows.push(if d == UNDEF { UNDEF } else { map[d as usize] });
            }
        }
        self.rows = rows;
        self.parent = (0..next).collect();
        self.live = next as usize;
        map
    }

    /// Renumbers a complete table so cosets appear in breadth-first
    /// discovery order from coset 0, scanning columns in order.
    fn standardize(&mut self) {
        let n = self.allocated();
        let mut map = vec![UNDEF; n];
        let mut order = vec![0u32];
        map[0] = 0;
        let mut k = 0;
        while k < order.len() {
            let c = order[k];
            k += 1;
            for col in 0..self.width {
                let d = self.get(c, col);
                if d != UNDEF && map[d as usize] == UNDEF {
                    map[d as usize] = order.len() as u32;
                    order.push(d);
                }
            }
        }
        let mut rows = Vec::with_capacity(order.len() * self.width);
        for &c in &order {
            for col in 0..self.width {
                let d = self.get(c, col);
                rows.push(if d == UNDEF { UNDEF } else { map[d as usize] });
            }
        }
        self.rows = rows;
        self.parent = (0..order.len() as u32).collect();
        self.live = order.len();
    }
}

fn columns(w: &Word) -> Vec<usize> {
    w.letters().iter().map(|l| l.column()).collect()
}

/// Enumerates the cosets of the subgroup generated by `subgroup` in the
/// group presented by `p`, allocating at most `max_cosets` coset rows at a
/// time. Running out of room gives an `Overflowed` table, not an error.
pub fn enumerate_cosets(p: &Presentation, subgroup: &[Word], max_cosets: usize) -> Result<CosetTable, CosetError> {
    if max_cosets == 0 {
        return Err(CosetError::ZeroLimit);
    }
    if max_cosets >= UNDEF as usize {
        return Err(CosetError::LimitTooLarge(max_cosets));
    }
    let count = p.generator_count();
    for (index, h) in subgroup.iter().enumerate() {
        if let Some(g) = h.max_generator().filter(|&g| g >= count) {
            return Err(CosetError::UnknownGenerator { index, generator: g, count });
        }
    }
    let relators: Vec<Vec<usize>> = p.relators().iter().filter(|r| !r.is_empty()).map(columns).collect();
    let subgroup_cols: Vec<Vec<usize>> = subgroup.iter().map(columns).collect();
    let width = 2 * count;
    let mut e = Enumerator::new(width, max_cosets);

    let overflowed = |e: &mut Enumerator| -> bool {
        e.compact();
        e.live >= e.capacity
    };

    let finish = |e: Enumerator, status: CosetStatus| CosetTable {
        generators: count,
        cosets: e.live,
        rows: e.rows,
        status,
        trivial_subgroup: subgroup.iter().all(Word::is_empty),
        relators: p.relators().iter().filter(|r| !r.is_empty()).cloned().collect(),
        subgroup: subgroup.to_vec(),
    };

    // subgroup generators close at coset 0
    'subgroup: loop {
        for h in &subgroup_cols {
            if e.scan_and_fill(0, h).is_err() {
                if overflowed(&mut e) {
                    return Ok(finish(e, CosetStatus::Overflowed { limit: max_cosets }));
                }
                continue 'subgroup;
            }
        }
        break;
    }

    let mut alpha = 0u32;
    while (alpha as usize) < e.allocated() {
        if !e.is_live(alpha) {
            alpha += 1;
            continue;
        }
        let mut full = false;
        for r in &relators {
            if e.scan_and_fill(alpha, r).is_err() {
                full = true;
                break;
            }
            if !e.is_live(alpha) {
                break;
            }
        }
        if !full && e.is_live(alpha) {
            for col in 0..width {
                if e.get(alpha, col) == UNDEF && e.define(alpha, col).is_err() {
                    full = true;
                    break;
                }
            }
        }
        if full {
            // Find the first live coset at or after alpha, then compact.
            let map = {
                let live_alpha = (alpha as usize..e.allocated()).find(|&c| e.is_live(c as u32));
                let map = e.compact();
                (map, live_alpha)
            };
            if e.live >= e.capacity {
                return Ok(finish(e, CosetStatus::Overflowed { limit: max_cosets }));
            }
            alpha = match map.1 {
                Some(c) => map.0[c],
                None => e.allocated() as u32,
            };
            continue;
        }
        if e.is_live(alpha) {
            alpha += 1;
        }
    }
    e.compact();
    e.standardize();
    Ok(finish(e, CosetStatus::Complete))
}
