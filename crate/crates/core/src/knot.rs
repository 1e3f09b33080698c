//! Oriented knot diagrams given as signed PD codes, and the presentations
//! read off them: Wirtinger (arcs), Dehn (faces), the meridian/parallel
//! pair, and Dehn-surgery presentations.
//!
//! Grammar: `PD[X[i,j,k,l]s+, X[...]s-, ...]`. Labels name the edges between
//! consecutive crossings. Each `X` lists its four edges counterclockwise,
//! starting at the incoming under-edge, so position 2 is the outgoing
//! under-edge. On a positive crossing (`s+`) the over-strand enters at
//! position 3 and leaves at position 1; on a negative one (`s-`) it enters
//! at 1 and leaves at 3. `PD[]` is the crossingless unknot.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::presentation::{Presentation, PresentationError};
use crate::syntax::{Cursor, ParseError};
use crate::words::{free_reduce, Alphabet, Letter, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KnotError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("edge label {label} appears {count} time(s); every label must appear exactly twice")]
    LabelCount { label: u32, count: usize },
    #[error("edge label {label} must enter one crossing and leave another, but {detail}")]
    Orientation { label: u32, detail: &'static str },
    #[error("diagram has more than one component (traversal from edge {start} covers {visited} of {total} edges)")]
    MultipleComponents { start: u32, visited: usize, total: usize },
    #[error("rotation system is not planar: {faces} faces, expected {expected}")]
    NonPlanar { faces: usize, expected: usize },
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Crossing {
    pub edges: [u32; 4],
    /// +1 or -1.
    pub sign: i8,
}

impl Crossing {
    /// Positions where the over-strand enters and leaves.
    fn over_in_out(&self) -> (usize, usize) {
        if self.sign > 0 {
            (3, 1)
        } else {
            (1, 3)
        }
    }

    fn is_in(&self, pos: usize) -> bool {
        pos == 0 || pos == self.over_in_out().0
    }

    /// The outgoing position on the same strand as incoming `pos`.
    fn exit_of(&self, pos: usize) -> usize {
        if pos == 0 {
            2
        } else {
            self.over_in_out().1
        }
    }
}

/// How the sign of a parallel letter is read off a crossing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SignConvention {
    /// `ε = +1` when the over-strand passes from left to right as seen from
    /// the under-strand; this is the crossing sign.
    #[default]
    LeftRight,
    /// The opposite reading.
    RightLeft,
}

type HalfEdge = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnotDiagram {
    crossings: Vec<Crossing>,
    /// Edge labels in traversal order, starting at the smallest label.
    traversal: Vec<u32>,
    /// label → (tail half-edge, head half-edge)
    ends: BTreeMap<u32, (HalfEdge, HalfEdge)>,
    /// label → arc index (0-based, traversal order)
    arc_of: BTreeMap<u32, usize>,
    /// `face_of[c][i]` = face containing the corner between positions i, i+1
    face_of: Vec<[usize; 4]>,
    face_sides: Vec<usize>,
}

pub fn parse_pd(text: &str) -> Result<KnotDiagram, KnotError> {
    let mut c = Cursor::new(text);
    if !c.eat_str("PD") {
        return Err(c.error("expected 'PD['").into());
    }
    c.expect('[')?;
    let mut crossings = Vec::new();
    if c.peek() != Some(']') {
        loop {
            if !c.eat_str("X") {
                return Err(c.error("expected 'X['").into());
            }
            c.expect('[')?;
            let mut edges = [0u32; 4];
            for (i, slot) in edges.iter_mut().enumerate() {
                if i > 0 {
                    c.expect(',')?;
                }
                c.skip_ws();
                let start = c.pos();
                let v = c.integer()?;
                *slot = u32::try_from(v)
                    .ok()
                    .filter(|&v| v > 0)
                    .ok_or_else(|| c.error_at(start, "edge labels must be positive integers"))?;
            }
            c.expect(']')?;
            c.skip_ws();
            let sign_at = c.pos();
            let sign = if c.eat_str("s+") {
                1
            } else if c.eat_str("s-") {
                -1
            } else {
                return Err(c.error_at(sign_at, "expected crossing sign 's+' or 's-'").into());
            };
            crossings.push(Crossing { edges, sign });
            if !c.eat(',') {
                break;
            }
        }
    }
    c.expect(']')?;
    if !c.at_end() {
        return Err(c.error("trailing input after PD code").into());
    }
    KnotDiagram::new(crossings)
}

impl KnotDiagram {
    pub fn new(crossings: Vec<Crossing>) -> Result<Self, KnotError> {
        let mut seen: BTreeMap<u32, Vec<HalfEdge>> = BTreeMap::new();
        for (ci, x) in crossings.iter().enumerate() {
            for (p, &label) in x.edges.iter().enumerate() {
                seen.entry(label).or_default().push((ci, p));
            }
        }
        let mut ends = BTreeMap::new();
        for (&label, occ) in &seen {
            if occ.len() != 2 {
                return Err(KnotError::LabelCount { label, count: occ.len() });
            }
            let is_in = |h: HalfEdge| crossings[h.0].is_in(h.1);
            let (head, tail) = match (is_in(occ[0]), is_in(occ[1])) {
                (true, false) => (occ[0], occ[1]),
                (false, true) => (occ[1], occ[0]),
                (true, true) => return Err(KnotError::Orientation { label, detail: "it enters at both ends" }),
                (false, false) => return Err(KnotError::Orientation { label, detail: "it leaves at both ends" }),
            };
            ends.insert(label, (tail, head));
        }

        let mut traversal = Vec::new();
        let mut arc_of = BTreeMap::new();
        if let Some(&start) = ends.keys().next() {
            let mut label = start;
            let mut arc = 0;
            loop {
                traversal.push(label);
                arc_of.insert(label, arc);
                let (_, (c, p)) = ends[&label];
                if p == 0 {
                    arc += 1;
                }
                label = crossings[c].edges[crossings[c].exit_of(p)];
                if label == start {
                    break;
                }
            }
            if traversal.len() != ends.len() {
                return Err(KnotError::MultipleComponents { start, visited: traversal.len(), total: ends.len() });
            }
            // edges after the last undercrossing close up the first arc
            let n = crossings.len();
            for a in arc_of.values_mut() {
                *a %= n;
            }
        }

        let mut d = KnotDiagram { crossings, traversal, ends, arc_of, face_of: Vec::new(), face_sides: Vec::new() };
        d.compute_faces()?;
        Ok(d)
    }

    fn other_end(&self, h: HalfEdge) -> HalfEdge {
        let label = self.crossings[h.0].edges[h.1];
        let (tail, head) = self.ends[&label];
        if tail == h {
            head
        } else {
            tail
        }
    }

    fn compute_faces(&mut self) -> Result<(), KnotError> {
        let n = self.crossings.len();
        if n == 0 {
            // the round circle: inside and outside
            self.face_sides = vec![0, 0];
            return Ok(());
        }
        const UNSET: usize = usize::MAX;
        let mut face_of = vec![[UNSET; 4]; n];
        let mut sides = Vec::new();
        for c in 0..n {
            for i in 0..4 {
                if face_of[c][i] != UNSET {
                    continue;
                }
                let id = sides.len();
                let mut count = 0;
                let (mut cc, mut ci) = (c, i);
                while face_of[cc][ci] == UNSET {
                    face_of[cc][ci] = id;
                    count += 1;
                    (cc, ci) = self.other_end((cc, (ci + 1) % 4));
                }
                if (cc, ci) != (c, i) {
                    return Err(KnotError::NonPlanar { faces: 0, expected: n + 2 });
                }
                sides.push(count);
            }
        }
        // Euler: V - E + F = n - 2n + F = 2
        if sides.len() != n + 2 {
            return Err(KnotError::NonPlanar { faces: sides.len(), expected: n + 2 });
        }
        self.face_of = face_of;
        self.face_sides = sides;
        Ok(())
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn arc_count(&self) -> usize {
        self.crossings.len().max(1)
    }

    pub fn face_count(&self) -> usize {
        self.face_sides.len()
    }

    pub fn bounded_face_count(&self) -> usize {
        self.face_count() - 1
    }

    /// The face drawn as the outside region: the one with most sides,
    /// lowest id on ties. Any face gives a valid Dehn presentation.
    pub fn unbounded_face(&self) -> usize {
        let mut best = 0;
        for (i, &s) in self.face_sides.iter().enumerate() {
            if s > self.face_sides[best] {
                best = i;
            }
        }
        best
    }

    /// Edge labels in traversal order.
    pub fn traversal(&self) -> &[u32] {
        &self.traversal
    }

    /// Arc (0-based) containing edge `label`.
    pub fn arc_of(&self, label: u32) -> Option<usize> {
        self.arc_of.get(&label).copied()
    }

    fn arc_at(&self, c: usize, p: usize) -> usize {
        self.arc_of[&self.crossings[c].edges[p]]
    }
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WirtingerPresentation {
    pub presentation: Presentation,
    pub meridian: Word,
}

/// One generator per arc, one relator per crossing:
/// `out = over^-s · in · over^s`, stored as `out over^-s in^-1 over^s`.
pub fn wirtinger(d: &KnotDiagram, drop_redundant: bool) -> Result<WirtingerPresentation, KnotError> {
    let generators = Alphabet::new(&names("s", d.arc_count())).map_err(PresentationError::from)?;
    let mut relators = Vec::new();
    for (c, x) in d.crossings.iter().enumerate() {
        let incoming = d.arc_at(c, 0);
        let outgoing = d.arc_at(c, 2);
        let over = d.arc_at(c, 1);
        let positive = x.sign > 0;
        relators.push(Word::from_letters(vec![
            Letter::pos(outgoing),
            Letter::new(over, positive),
            Letter::neg(incoming),
            Letter::new(over, !positive),
        ]));
    }
    if drop_redundant {
        relators.pop();
    }
    let presentation = Presentation::new(generators, relators)?;
    Ok(WirtingerPresentation { presentation, meridian: Word::from_letters(vec![Letter::pos(0)]) })
}

/// One generator per bounded face, one relator per crossing: the four
/// corner faces `q0 q1^-1 q2 q3^-1`, with the unbounded face set to 1.
pub fn dehn_presentation(d: &KnotDiagram) -> Result<Presentation, KnotError> {
    let outside = d.unbounded_face();
    let index = |f: usize| if f < outside { f } else { f - 1 };
    let generators = Alphabet::new(&names("f", d.bounded_face_count())).map_err(PresentationError::from)?;
    let mut relators = Vec::new();
    for faces in &d.face_of {
        let letters: Vec<Letter> = faces
            .iter()
            .enumerate()
            .filter(|&(_, &f)| f != outside)
            .map(|(i, &f)| Letter::new(index(f), i % 2 == 1))
            .collect();
        relators.push(free_reduce(&Word::from_letters(letters)));
    }
    Ok(Presentation::new(generators, relators)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeripheralSystem {
    pub meridian: Word,
    pub parallel: Word,
}

/// Walks the knot from the first arc; at each undercrossing records the
/// over-arc generator to the power `ε`, then closes with `s1^k`,
/// `k = -Σε`, so the parallel is null-homologous.
pub fn peripheral(d: &KnotDiagram, convention: SignConvention) -> PeripheralSystem {
    let mut letters = Vec::new();
    let mut total = 0i64;
    for label in &d.traversal {
        let (_, (c, p)) = d.ends[label];
        if p != 0 {
            continue;
        }
        let x = &d.crossings[c];
        let eps = match convention {
            SignConvention::LeftRight => x.sign as i64,
            SignConvention::RightLeft => -(x.sign as i64),
        };
        total += eps;
        letters.push(Letter::new(d.arc_at(c, 1), eps < 0));
    }
    let s1 = Word::from_letters(vec![Letter::pos(0)]);
    let parallel = free_reduce(&Word::from_letters(letters).concat(&s1.pow(-total)));
    PeripheralSystem { meridian: s1, parallel }
}

/// Wirtinger presentation plus the filling relation `m · p^-k`.
pub fn surgery_presentation(d: &KnotDiagram, k: i64, convention: SignConvention) -> Result<Presentation, KnotError> {
    let w = wirtinger(d, false)?;
    let per = peripheral(d, convention);
    let filling = per.meridian.concat(&per.parallel.pow(-k));
    Ok(w.presentation.with_relators([filling])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::abelian_invariants;

    const TREFOIL: &str = "PD[X[1,4,2,5]s-, X[3,6,4,1]s-, X[5,2,6,3]s-]";
    const FIGURE_EIGHT: &str = "PD[X[4,2,5,1]s+, X[8,6,1,5]s+, X[6,3,7,4]s-, X[2,7,3,8]s-]";

    #[test]
    fn trefoil_structure() {
        let d = parse_pd(TREFOIL).unwrap();
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(d.arc_count(), 3);
        assert_eq!(d.bounded_face_count(), 4);
        assert_eq!(d.traversal(), &[1, 2, 3, 4, 5, 6]);
        let arcs: Vec<usize> = (1..=6).map(|l| d.arc_of(l).unwrap()).collect();
        assert_eq!(arcs, vec![0, 1, 1, 2, 2, 0]);
    }

    #[test]
    fn trefoil_wirtinger_matches_chain_relations() {
        let d = parse_pd(TREFOIL).unwrap();
        let w = wirtinger(&d, false).unwrap();
        let p = &w.presentation;
        assert_eq!(p.relator_strings(), vec!["b c a^-1 c^-1", "c a b^-1 a^-1", "a b c^-1 b^-1"]);
        assert_eq!(p.render(&w.meridian), "a");
        let inv = abelian_invariants(p).unwrap();
        assert!(inv.is_infinite_cyclic());
        assert_eq!(wirtinger(&d, true).unwrap().presentation.relators().len(), 2);
    }

    #[test]
    fn trefoil_parallel() {
        let d = parse_pd(TREFOIL).unwrap();
        let w = wirtinger(&d, false).unwrap();
        let per = peripheral(&d, SignConvention::LeftRight);
        assert_eq!(w.presentation.render(&per.parallel), "c^-1 a^-1 b^-1 a a a");
        let flipped = peripheral(&d, SignConvention::RightLeft);
        assert_eq!(w.presentation.render(&flipped.parallel), "c a b a^-1 a^-1 a^-1");
    }

    #[test]
    fn trefoil_dehn_presentation() {
        let d = parse_pd(TREFOIL).unwrap();
        let p = dehn_presentation(&d).unwrap();
        assert_eq!(p.generator_count(), 4);
        assert_eq!(p.relators().len(), 3);
        for r in p.relators() {
            assert_eq!(r.len(), 3);
        }
        assert!(abelian_invariants(&p).unwrap().is_infinite_cyclic());
    }

    #[test]
    fn unknots() {
        let d = parse_pd("PD[]").unwrap();
        assert_eq!((d.crossing_count(), d.arc_count()), (0, 1));
        let w = wirtinger(&d, false).unwrap();
        assert_eq!(w.presentation.to_string(), "< a | >");
        assert!(peripheral(&d, SignConvention::LeftRight).parallel.is_empty());
        let dp = dehn_presentation(&d).unwrap();
        assert_eq!(dp.generator_count(), 1);
        assert!(abelian_invariants(&dp).unwrap().is_infinite_cyclic());

        let kink = parse_pd("PD[X[1,1,2,2]s+]").unwrap();
        assert_eq!(kink.bounded_face_count(), 2);
        assert!(abelian_invariants(&dehn_presentation(&kink).unwrap()).unwrap().is_infinite_cyclic());
        assert!(abelian_invariants(&wirtinger(&kink, false).unwrap().presentation).unwrap().is_infinite_cyclic());
        assert!(peripheral(&kink, SignConvention::LeftRight).parallel.is_empty());
    }

    #[test]
    fn malformed_codes() {
        assert!(matches!(
            parse_pd("PD[X[1,4,2,5]s-, X[3,6,4,1]s-, X[5,2,6,1]s-]"),
            Err(KnotError::LabelCount { label: 1, count: 3 })
        ));
        assert!(matches!(parse_pd("PD[X[1,1,2,2]s-]"), Err(KnotError::Orientation { .. })));
        assert!(parse_pd("PD[X[1,4,2,5], X[3,6,4,1]s-, X[5,2,6,3]s-]").is_err());
        assert!(parse_pd("PD[X[1,4,2]s-]").is_err());
        assert!(parse_pd("PD[X[0,4,2,5]s-]").is_err());
        // the same trefoil labels read as a positive diagram are inconsistent
        assert!(parse_pd("PD[X[1,4,2,5]s+, X[3,6,4,1]s+, X[5,2,6,3]s+]").is_err());
        // two disjoint kinks
        assert!(matches!(parse_pd("PD[X[1,1,2,2]s+, X[3,3,4,4]s+]"), Err(KnotError::MultipleComponents { .. })));
    }

    #[test]
    fn figure_eight() {
        let d = parse_pd(FIGURE_EIGHT).unwrap();
        assert_eq!(d.bounded_face_count(), 5);
        let w = wirtinger(&d, false).unwrap();
        assert!(abelian_invariants(&w.presentation).unwrap().is_infinite_cyclic());
        assert!(abelian_invariants(&dehn_presentation(&d).unwrap()).unwrap().is_infinite_cyclic());
        let per = peripheral(&d, SignConvention::LeftRight);
        // writhe 0, so no meridian correction
        assert_eq!((0..4).map(|g| per.parallel.exponent_sum(g)).sum::<i64>(), 0);
    }

    #[test]
    fn surgery_on_trefoil_is_perfect() {
        let d = parse_pd(TREFOIL).unwrap();
        for k in -3..=3 {
            let p = surgery_presentation(&d, k, SignConvention::LeftRight).unwrap();
            assert!(abelian_invariants(&p).unwrap().is_trivial(), "k = {k}");
        }
    }
}
