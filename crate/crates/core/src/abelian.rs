//! Abelianization of a presentation: exponent-sum matrix, Smith normal form
//! over arbitrary-precision integers, abelian invariants and the induced map
//! on words.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::presentation::Presentation;
use crate::words::Word;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AbelianError {
    #[error("invariant factor {0} does not fit in 64 bits")]
    Overflow(BigInt),
}

/// Rows are relators, columns generators; entry = exponent sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<i64>>,
}

pub fn exponent_matrix(p: &Presentation) -> ExponentMatrix {
    let cols = p.generator_count();
    let entries = p.relators().iter().map(|r| exponent_vector(r, cols)).collect::<Vec<_>>();
    ExponentMatrix { rows: entries.len(), cols, entries }
}

pub fn exponent_vector(w: &Word, generators: usize) -> Vec<i64> {
    let mut v = vec![0; generators];
    for l in w.letters() {
        v[l.generator()] += l.exponent();
    }
    v
}

type Matrix = Vec<Vec<BigInt>>;

fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// `left · m · right = diag`, with `left` and `right` unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    /// One entry per column of the input: the quotient `Z^cols / rowspace`
    /// is the direct sum of `Z/d` over these entries (`d = 0` gives `Z`).
    pub diagonal: Vec<BigInt>,
    pub left: Matrix,
    pub right: Matrix,
}

struct Reducer {
    a: Matrix,
    u: Matrix,
    v: Matrix,
    rows: usize,
    cols: usize,
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap(i, j);
            self.u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for row in &mut self.a {
                row.swap(i, j);
            }
            for row in &mut self.v {
                row.swap(i, j);
            }
        }
    }

    /// row[target] += factor · row[source]
    fn add_row(&mut self, target: usize, source: usize, factor: &BigInt) {
        for k in 0..self.cols {
            let delta = &self.a[source][k] * factor;
            self.a[target][k] += delta;
        }
        for k in 0..self.rows {
            let delta = &self.u[source][k] * factor;
            self.u[target][k] += delta;
        }
    }

    /// col[target] += factor · col[source]
    fn add_col(&mut self, target: usize, source: usize, factor: &BigInt) {
        for row in &mut self.a {
            let delta = &row[source] * factor;
            row[target] += delta;
        }
        for row in &mut self.v {
            let delta = &row[source] * factor;
            row[target] += delta;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -&*x;
        }
        for x in &mut self.u[i] {
            *x = -&*x;
        }
    }

    /// Position of the smallest nonzero |entry| in the block `[t.., t..]`.
    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < self.a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    fn reduce(&mut self) {
        let mut t = 0;
        while t < self.rows.min(self.cols) {
            let Some((i, j)) = self.min_pivot(t) else { break };
            self.swap_rows(t, i);
            self.swap_cols(t, j);
            loop {
                let pivot = self.a[t][t].clone();
                let mut clean = true;
                for i in t + 1..self.rows {
                    if self.a[i][t].is_zero() {
                        continue;
                    }
                    let q = self.a[i][t].div_floor(&pivot);
                    self.add_row(i, t, &-q);
                    clean &= self.a[i][t].is_zero();
                }
                for j in t + 1..self.cols {
                    if self.a[t][j].is_zero() {
                        continue;
                    }
                    let q = self.a[t][j].div_floor(&pivot);
                    self.add_col(j, t, &-q);
                    clean &= self.a[t][j].is_zero();
                }
                if !clean {
                    // a remainder smaller than the pivot becomes the new pivot
                    let mut best = (t, t);
                    for i in t + 1..self.rows {
                        if !self.a[i][t].is_zero() && self.a[i][t].abs() < self.a[best.0][best.1].abs() {
                            best = (i, t);
                        }
                    }
                    for j in t + 1..self.cols {
                        if !self.a[t][j].is_zero() && self.a[t][j].abs() < self.a[best.0][best.1].abs() {
                            best = (t, j);
                        }
                    }
                    self.swap_rows(t, best.0);
                    self.swap_cols(t, best.1);
                    continue;
                }
                // divisibility d_t | every later entry
                let bad =
                    (t + 1..self.rows).find(|&i| (t + 1..self.cols).any(|j| !self.a[i][j].is_multiple_of(&pivot)));
                match bad {
                    Some(i) => self.add_row(t, i, &BigInt::one()),
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
    }
}

pub fn smith_normal_form(m: &ExponentMatrix) -> SmithForm {
    let a: Matrix = m.entries.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut r = Reducer { a, u: identity(m.rows), v: identity(m.cols), rows: m.rows, cols: m.cols };
    r.reduce();
    let diagonal = (0..m.cols).map(|i| if i < m.rows { r.a[i][i].clone() } else { BigInt::zero() }).collect();
    SmithForm { diagonal, left: r.u, right: r.v }
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }
}

/// `torsion` lists the invariant factors `d₁ | d₂ | …` greater than one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianInvariants {
    pub torsion: Vec<u64>,
    pub free_rank: usize,
}

impl AbelianInvariants {
    /// Order of the abelianization, `None` when infinite.
    pub fn order(&self) -> Option<u128> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.torsion.iter().map(|&d| d as u128).product())
    }

    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    pub fn is_infinite_cyclic(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 1
    }
}

impl std::fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        parts.extend((0..self.free_rank).map(|_| "Z".to_string()));
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

pub fn abelian_invariants(p: &Presentation) -> Result<AbelianInvariants, AbelianError> {
    let snf = smith_normal_form(&exponent_matrix(p));
    let mut torsion = Vec::new();
    for d in snf.diagonal.iter().filter(|d| *d > &BigInt::one()) {
        torsion.push(d.to_u64().ok_or_else(|| AbelianError::Overflow(d.clone()))?);
    }
    Ok(AbelianInvariants { torsion, free_rank: p.generator_count() - snf.rank() })
}

pub fn is_perfect(p: &Presentation) -> Result<bool, AbelianError> {
    Ok(abelian_invariants(p)?.is_trivial())
}

/// The abelianization homomorphism on words, in Smith coordinates.
#[derive(Clone, Debug)]
pub struct AbelianizationMap {
    snf: SmithForm,
    generators: usize,
}

impl AbelianizationMap {
    pub fn new(p: &Presentation) -> Self {
        AbelianizationMap { snf: smith_normal_form(&exponent_matrix(p)), generators: p.generator_count() }
    }

    /// Coordinates of the image of `w`: entry `i` lives in `Z/d_i`
    /// (reduced to `0..d_i`), or in `Z` when `d_i = 0`.
    pub fn image(&self, w: &Word) -> Vec<BigInt> {
        let y = exponent_vector(w, self.generators);
        (0..self.generators)
            .map(|j| {
                let z: BigInt = (0..self.generators).map(|i| &self.snf.right[i][j] * y[i]).sum();
                let d = &self.snf.diagonal[j];
                if d.is_zero() {
                    z
                } else {
                    z.mod_floor(d)
                }
            })
            .collect()
    }

    /// Whether `w` maps to the identity of the abelianization.
    pub fn is_trivial(&self, w: &Word) -> bool {
        self.image(w).iter().all(Zero::is_zero)
    }
}

/// Exact rational test `(α−2)/α + (2β−2)/β ≥ 2` for the triangle family
/// `< s1, s2 | s1^α, s2^2, (s2 s1)^β >`.
pub fn family_infinite(alpha: i64, beta: i64) -> Option<bool> {
    use num_rational::Ratio;
    if alpha < 2 || beta < 2 {
        return None;
    }
    let lhs = Ratio::new(alpha - 2, alpha) + Ratio::new(2 * beta - 2, beta);
    Some(lhs >= Ratio::from_integer(2))
}
