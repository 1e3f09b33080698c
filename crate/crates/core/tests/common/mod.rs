//! Reference oracles for the integration tests. They work on plain signed
//! integer words (`g + 1` for a generator, `-(g + 1)` for its inverse) and
//! share no code with the library.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

pub type Raw = Vec<i32>;

pub fn reduce(w: &[i32]) -> Raw {
    let mut out: Raw = Vec::with_capacity(w.len());
    for &x in w {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

pub fn inverse(w: &[i32]) -> Raw {
    w.iter().rev().map(|x| -x).collect()
}

/// Every rotation of every relator and of its inverse.
pub fn symmetrize(relators: &[Raw]) -> Vec<Raw> {
    let mut out = HashSet::new();
    for r in relators {
        for s in [r.clone(), inverse(r)] {
            for i in 0..s.len() {
                let mut t = s.clone();
                t.rotate_left(i);
                out.insert(t);
            }
        }
    }
    let mut v: Vec<Raw> = out.into_iter().collect();
    v.sort();
    v
}

/// Freely reduced words over `generators` letters with length exactly `n`.
pub fn reduced_words(generators: i32, n: usize) -> Vec<Raw> {
    let letters: Vec<i32> = (1..=generators).flat_map(|g| [g, -g]).collect();
    let mut layer: Vec<Raw> = vec![vec![]];
    for _ in 0..n {
        layer = layer
            .into_iter()
            .flat_map(|w| {
                letters
                    .iter()
                    .filter(|&&x| w.last() != Some(&-x))
                    .map(|&x| {
                        let mut v = w.clone();
                        v.push(x);
                        v
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    layer
}

/// Trivial freely reduced words of length at most `cap` reachable from the
/// empty word by inserting a relator (any rotation, either orientation) at
/// any position or conjugating by one letter, never exceeding `cap`.
pub fn trivial_words_by_rewriting(relators: &[Raw], generators: i32, cap: usize) -> HashSet<Raw> {
    let closure = symmetrize(relators);
    let letters: Vec<i32> = (1..=generators).flat_map(|g| [g, -g]).collect();
    let mut seen: HashSet<Raw> = HashSet::from([vec![]]);
    let mut queue = VecDeque::from([Raw::new()]);
    while let Some(w) = queue.pop_front() {
        let mut push = |next: Raw| {
            if next.len() <= cap && !seen.contains(&next) {
                seen.insert(next.clone());
                queue.push_back(next);
            }
        };
        for r in &closure {
            for i in 0..=w.len() {
                let mut next = w[..i].to_vec();
                next.extend_from_slice(r);
                next.extend_from_slice(&w[i..]);
                push(reduce(&next));
            }
        }
        for &x in &letters {
            let mut next = vec![x];
            next.extend_from_slice(&w);
            next.push(-x);
            push(reduce(&next));
        }
    }
    seen
}

/// Area by 0-1 breadth-first search over unreduced words: inserting or
/// deleting a relator (any rotation, either orientation) costs 1, inserting
/// or deleting a cancelling pair costs 0. Words never exceed `cap`.
pub fn area_by_01_bfs(relators: &[Raw], generators: i32, w: &[i32], cap: usize) -> Option<usize> {
    let closure = symmetrize(relators);
    let letters: Vec<i32> = (1..=generators).flat_map(|g| [g, -g]).collect();
    let mut dist: std::collections::HashMap<Raw, usize> = std::collections::HashMap::new();
    let mut deque = VecDeque::from([(w.to_vec(), 0usize)]);
    while let Some((x, d)) = deque.pop_front() {
        if dist.get(&x).is_some_and(|&e| e <= d) {
            continue;
        }
        dist.insert(x.clone(), d);
        if x.is_empty() {
            return Some(d);
        }
        let mut moves: Vec<(Raw, usize)> = Vec::new();
        for i in 0..x.len().saturating_sub(1) {
            if x[i] == -x[i + 1] {
                moves.push(([&x[..i], &x[i + 2..]].concat(), 0));
            }
        }
        for i in 0..=x.len() {
            for &l in &letters {
                moves.push(([&x[..i], &[l, -l][..], &x[i..]].concat(), 0));
            }
            for r in &closure {
                moves.push(([&x[..i], &r[..], &x[i..]].concat(), 1));
                if x[i..].starts_with(r) {
                    moves.push(([&x[..i], &x[i + r.len()..]].concat(), 1));
                }
            }
        }
        for (y, c) in moves {
            if y.len() > cap || dist.get(&y).is_some_and(|&e| e <= d + c) {
                continue;
            }
            if c == 0 {
                deque.push_front((y, d));
            } else {
                deque.push_back((y, d + 1));
            }
        }
    }
    None
}

/// Area in `< a, b | a b a^-1 b^-1 >` (so Z²): the sum over unit squares of
/// the absolute winding number of the lattice path spelled by `w`, which
/// must be closed. Letters: 1 = a (x step), 2 = b (y step).
pub fn z2_area(w: &[i32]) -> usize {
    let (mut x, mut y) = (0i64, 0i64);
    // (column, height, direction) of every horizontal step
    let mut horizontal = Vec::new();
    for &l in w {
        match l {
            1 => {
                horizontal.push((x, y, 1));
                x += 1;
            }
            -1 => {
                x -= 1;
                horizontal.push((x, y, -1));
            }
            2 => y += 1,
            -2 => y -= 1,
            _ => panic!("not a letter of Z²: {l}"),
        }
    }
    assert_eq!((x, y), (0, 0), "path is not closed");
    let (lo_x, hi_x) =
        (horizontal.iter().map(|h| h.0).min().unwrap_or(0), horizontal.iter().map(|h| h.0).max().unwrap_or(0));
    let (lo_y, hi_y) =
        (horizontal.iter().map(|h| h.1).min().unwrap_or(0), horizontal.iter().map(|h| h.1).max().unwrap_or(0));
    let mut total = 0;
    for i in lo_x..=hi_x {
        for j in lo_y..hi_y {
            let winding: i64 = horizontal.iter().filter(|h| h.0 == i && h.1 > j).map(|h| h.2).sum();
            total += winding.unsigned_abs() as usize;
        }
    }
    total
}

/// Renders a raw word with the given names, `^-1` for inverses.
pub fn render(w: &[i32], names: &[&str]) -> String {
    let parts: Vec<String> = w
        .iter()
        .map(|&x| {
            let n = names[(x.unsigned_abs() - 1) as usize];
            if x > 0 {
                n.to_string()
            } else {
                format!("{n}^-1")
            }
        })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join(" ")
    }
}

pub fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}
