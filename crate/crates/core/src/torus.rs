//! Normal forms for the torus-knot groups `G(k,l) = < t, u, v | t = u^k = v^l >`
//! as a central extension of the free product `C_k * C_l`.
//!
//! An element is `t^m` times an alternating word of syllables `u^e`
//! (`1 <= e < k`) and `v^f` (`1 <= f < l`).

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::presentation::Presentation;
use crate::words::{Letter, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TorusError {
    #[error("torus parameters must satisfy k >= 2 and l >= 2 (got k = {k}, l = {l})")]
    BadParameters { k: u32, l: u32 },
    #[error("generator #{0} is not one of t, u, v")]
    UnknownGenerator(usize),
    #[error("normal forms for ({0}, {1}) and ({2}, {3}) cannot be combined")]
    Mismatch(u32, u32, u32, u32),
    #[error("central power overflowed")]
    Overflow,
    #[error("{0}")]
    Syntax(#[from] crate::syntax::ParseError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Syllable {
    U(u32),
    V(u32),
}

impl Syllable {
    fn same_kind(self, other: Syllable) -> bool {
        matches!((self, other), (Syllable::U(_), Syllable::U(_)) | (Syllable::V(_), Syllable::V(_)))
    }

    fn exponent(self) -> u32 {
        match self {
            Syllable::U(e) | Syllable::V(e) => e,
        }
    }

    fn with_exponent(self, e: u32) -> Syllable {
        match self {
            Syllable::U(_) => Syllable::U(e),
            Syllable::V(_) => Syllable::V(e),
        }
    }
}

/// Role of a presentation generator in `G(k,l)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorusGen {
    T,
    U,
    V,
}

impl TorusGen {
    pub fn from_name(name: &str) -> Option<TorusGen> {
        match name {
            "t" => Some(TorusGen::T),
            "u" => Some(TorusGen::U),
            "v" => Some(TorusGen::V),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TorusGroup {
    k: u32,
    l: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusNormalForm {
    k: u32,
    l: u32,
    central: i64,
    tail: Vec<Syllable>,
}

/// An element of `C_k * C_l` as an alternating syllable word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeProductWord {
    k: u32,
    l: u32,
    syllables: Vec<Syllable>,
}

impl TorusGroup {
    pub fn new(k: u32, l: u32) -> Result<Self, TorusError> {
        if k < 2 || l < 2 {
            return Err(TorusError::BadParameters { k, l });
        }
        Ok(TorusGroup { k, l })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    /// `< t, u, v | t = u^k = v^l >`, generators in that order.
    pub fn presentation(&self) -> Presentation {
        format!("< t, u, v | t = u^{} = v^{} >", self.k, self.l).parse().expect("valid presentation")
    }

    /// `< u, v | u^k, v^l >`.
    pub fn free_product_presentation(&self) -> Presentation {
        format!("< u, v | u^{}, v^{} >", self.k, self.l).parse().expect("valid presentation")
    }

    fn modulus(&self, s: Syllable) -> u32 {
        match s {
            Syllable::U(_) => self.k,
            Syllable::V(_) => self.l,
        }
    }

    pub fn identity(&self) -> TorusNormalForm {
        TorusNormalForm { k: self.k, l: self.l, central: 0, tail: Vec::new() }
    }

    pub fn generator(&self, g: TorusGen, inverse: bool) -> TorusNormalForm {
        let (central, tail) = match (g, inverse) {
            (TorusGen::T, false) => (1, vec![]),
            (TorusGen::T, true) => (-1, vec![]),
            (TorusGen::U, false) => (0, vec![Syllable::U(1)]),
            (TorusGen::U, true) => (-1, vec![Syllable::U(self.k - 1)]),
            (TorusGen::V, false) => (0, vec![Syllable::V(1)]),
            (TorusGen::V, true) => (-1, vec![Syllable::V(self.l - 1)]),
        };
        TorusNormalForm { k: self.k, l: self.l, central, tail }
    }

    /// Appends `s` to an alternating stack, merging at the seam. Returns the
    /// number of full cycles `u^k` / `v^l` produced (0 or 1).
    fn push(&self, stack: &mut Vec<Syllable>, s: Syllable) -> i64 {
        match stack.last().copied() {
            Some(top) if top.same_kind(s) => {
                stack.pop();
                let n = self.modulus(s);
                let e = top.exponent() + s.exponent();
                let (e, carry) = if e >= n { (e - n, 1) } else { (e, 0) };
                if e > 0 {
                    stack.push(s.with_exponent(e));
                }
                carry
            }
            _ => {
                stack.push(s);
                0
            }
        }
    }

    pub fn multiply(&self, a: &TorusNormalForm, b: &TorusNormalForm) -> Result<TorusNormalForm, TorusError> {
        for x in [a, b] {
            if (x.k, x.l) != (self.k, self.l) {
                return Err(TorusError::Mismatch(self.k, self.l, x.k, x.l));
            }
        }
        let mut tail = a.tail.clone();
        let mut central = a.central.checked_add(b.central).ok_or(TorusError::Overflow)?;
        for &s in &b.tail {
            central = central.checked_add(self.push(&mut tail, s)).ok_or(TorusError::Overflow)?;
        }
        Ok(TorusNormalForm { k: self.k, l: self.l, central, tail })
    }

    pub fn inverse(&self, a: &TorusNormalForm) -> TorusNormalForm {
        // (u^e)^-1 = t^-1 u^(k-e), and t is central
        let tail = a.tail.iter().rev().map(|&s| s.with_exponent(self.modulus(s) - s.exponent())).collect();
        TorusNormalForm { k: self.k, l: self.l, central: -a.central - a.tail.len() as i64, tail }
    }

    /// Normal form of a word whose generator `i` plays the role `roles[i]`.
    pub fn normalize_with(&self, w: &Word, roles: &[TorusGen]) -> Result<TorusNormalForm, TorusError> {
        let mut acc = self.identity();
        for &l in w.letters() {
            let role = *roles.get(l.generator()).ok_or(TorusError::UnknownGenerator(l.generator()))?;
            acc = self.multiply(&acc, &self.generator(role, l.is_inverse()))?;
        }
        Ok(acc)
    }

    /// Normal form of a word over `t, u, v` (generators 0, 1, 2).
    pub fn normalize(&self, w: &Word) -> Result<TorusNormalForm, TorusError> {
        self.normalize_with(w, &[TorusGen::T, TorusGen::U, TorusGen::V])
    }

    pub fn is_trivial(&self, w: &Word) -> Result<bool, TorusError> {
        Ok(self.normalize(w)?.is_identity())
    }

    /// Image in `C_k * C_l` of a word over `u, v` (generators 0, 1).
    pub fn free_product_normalize(&self, w: &Word) -> Result<FreeProductWord, TorusError> {
        let nf = self.normalize_with(w, &[TorusGen::U, TorusGen::V])?;
        Ok(nf.project())
    }

    pub fn free_product_multiply(&self, a: &FreeProductWord, b: &FreeProductWord) -> FreeProductWord {
        let mut syllables = a.syllables.clone();
        for &s in &b.syllables {
            self.push(&mut syllables, s);
        }
        FreeProductWord { k: self.k, l: self.l, syllables }
    }

    /// Parses the printed form `t^m · u^e v^f …` (also `1`, or any word over
    /// `t, u, v`, which is then normalized).
    pub fn parse(&self, text: &str) -> Result<TorusNormalForm, TorusError> {
        let cleaned = text.replace(['·', '*'], " ");
        let alphabet = crate::words::Alphabet::new(&["t", "u", "v"]).expect("valid names");
        let w = alphabet.parse_word(&cleaned)?;
        self.normalize(&w)
    }
}

impl TorusNormalForm {
    pub fn central_power(&self) -> i64 {
        self.central
    }

    pub fn tail(&self) -> &[Syllable] {
        &self.tail
    }

    pub fn params(&self) -> (u32, u32) {
        (self.k, self.l)
    }

    pub fn is_identity(&self) -> bool {
        self.central == 0 && self.tail.is_empty()
    }

    /// Drops the central power.
    pub fn project(&self) -> FreeProductWord {
        FreeProductWord { k: self.k, l: self.l, syllables: self.tail.clone() }
    }

    /// A word over `t, u, v` (generators 0, 1, 2) representing this element.
    pub fn to_word(&self) -> Word {
        let t = Letter::new(0, self.central < 0);
        let mut letters = vec![t; self.central.unsigned_abs() as usize];
        for s in &self.tail {
            let (g, e) = match *s {
                Syllable::U(e) => (1, e),
                Syllable::V(e) => (2, e),
            };
            letters.extend(std::iter::repeat_n(Letter::pos(g), e as usize));
        }
        Word::from_letters(letters)
    }
}

fn write_syllables(f: &mut fmt::Formatter<'_>, syllables: &[Syllable]) -> fmt::Result {
    for (i, s) in syllables.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        let (name, e) = match *s {
            Syllable::U(e) => ("u", e),
            Syllable::V(e) => ("v", e),
        };
        if e == 1 {
            f.write_str(name)?;
        } else {
            write!(f, "{name}^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for TorusNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.central, self.tail.is_empty()) {
            (0, true) => f.write_str("1"),
            (0, false) => write_syllables(f, &self.tail),
            (m, true) => write!(f, "t^{m}"),
            (m, false) => {
                write!(f, "t^{m} · ")?;
                write_syllables(f, &self.tail)
            }
        }
    }
}

impl FreeProductWord {
    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }
}

impl fmt::Display for FreeProductWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return f.write_str("1");
        }
        write_syllables(f, &self.syllables)
    }
}

pub fn nf_normalize(w: &Word, k: u32, l: u32) -> Result<TorusNormalForm, TorusError> {
    TorusGroup::new(k, l)?.normalize(w)
}

pub fn nf_multiply(a: &TorusNormalForm, b: &TorusNormalForm) -> Result<TorusNormalForm, TorusError> {
    TorusGroup::new(a.k, a.l)?.multiply(a, b)
}

pub fn wp_torus(w: &Word, k: u32, l: u32) -> Result<bool, TorusError> {
    TorusGroup::new(k, l)?.is_trivial(w)
}
