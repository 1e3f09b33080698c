//! Free-group words: letters, alphabets, free and cyclic reduction, and the
//! free-group word and conjugacy problems.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::syntax::{Cursor, ParseError};

/// A generator or its inverse. Letters order by generator index, with
/// `s` before `s^-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    generator: u32,
    inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator: generator as u32, inverse }
    }

    pub fn pos(generator: usize) -> Self {
        Letter::new(generator, false)
    }

    pub fn neg(generator: usize) -> Self {
        Letter::new(generator, true)
    }

    pub fn generator(self) -> usize {
        self.generator as usize
    }

    pub fn is_inverse(self) -> bool {
        self.inverse
    }

    /// +1 or -1.
    pub fn exponent(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Letter {
        Letter { generator: self.generator, inverse: !self.inverse }
    }

    pub fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }

    /// Dense index in `0..2n`: `2g` for `g`, `2g + 1` for `g^-1`.
    pub fn column(self) -> usize {
        2 * self.generator as usize + self.inverse as usize
    }

    pub fn from_column(column: usize) -> Letter {
        Letter::new(column / 2, column % 2 == 1)
    }
}

/// A finite sequence of letters. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    /// Builds a word from signed 1-based generator numbers: `2` is the
    /// second generator, `-2` its inverse.
    pub fn from_signed(codes: &[i32]) -> Self {
        Word(
            codes
                .iter()
                .map(|&c| {
                    assert!(c != 0, "generator code 0 is not a letter");
                    Letter::new(c.unsigned_abs() as usize - 1, c < 0)
                })
                .collect(),
        )
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    /// Concatenation without reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// `w^k` without reduction; negative powers use the inverse.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { invert(self) } else { self.clone() };
        let mut letters = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            letters.extend_from_slice(&base.0);
        }
        Word(letters)
    }

    /// Left rotation by `i` letters.
    pub fn rotate(&self, i: usize) -> Word {
        if self.is_empty() {
            return Word::empty();
        }
        let mut letters = self.0.clone();
        letters.rotate_left(i % self.len());
        Word(letters)
    }

    pub fn subword(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    /// Total exponent of `generator` (occurrences minus inverse occurrences).
    pub fn exponent_sum(&self, generator: usize) -> i64 {
        self.0.iter().filter(|l| l.generator() == generator).map(|l| l.exponent()).sum()
    }

    /// Largest generator index used, if any.
    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.generator()).max()
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|p| !p[0].cancels(p[1]))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_freely_reduced()
            && match (self.0.first(), self.0.last()) {
                (Some(&a), Some(&b)) if self.len() > 1 => !a.cancels(b),
                _ => true,
            }
    }

    /// Position of the first occurrence of `pattern` as a subword.
    pub fn find(&self, pattern: &[Letter]) -> Option<usize> {
        if pattern.is_empty() {
            return Some(0);
        }
        self.0.windows(pattern.len()).position(|w| w == pattern)
    }

    /// Replaces `self[start..start + len]` by `replacement`.
    pub fn splice(&self, start: usize, len: usize, replacement: &[Letter]) -> Word {
        let mut letters = Vec::with_capacity(self.len() - len + replacement.len());
        letters.extend_from_slice(&self.0[..start]);
        letters.extend_from_slice(replacement);
        letters.extend_from_slice(&self.0[start + len..]);
        Word(letters)
    }

    /// Renders the word with generator names from `alphabet`.
    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> WordDisplay<'a> {
        WordDisplay { word: self, alphabet }
    }
}

impl From<Vec<Letter>> for Word {
    fn from(letters: Vec<Letter>) -> Self {
        Word(letters)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// Shortlex order: shorter words first, then lexicographic.
pub fn shortlex_cmp(a: &Word, b: &Word) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    alphabet: &'a Alphabet,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.word.letters().iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(self.alphabet.name(l.generator()))?;
            if l.is_inverse() {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("word is not cyclically reduced")]
    NotCyclicallyReduced,
    #[error("invalid generator name '{0}'")]
    InvalidName(String),
    #[error("duplicate generator name '{0}'")]
    DuplicateName(String),
}

/// Ordered list of generator names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, WordError> {
        let mut alphabet = Alphabet::default();
        for name in names {
            alphabet.push(name.as_ref())?;
        }
        Ok(alphabet)
    }

    pub fn push(&mut self, name: &str) -> Result<usize, WordError> {
        if !is_valid_name(name) {
            return Err(WordError::InvalidName(name.to_string()));
        }
        if self.index.contains_key(name) {
            return Err(WordError::DuplicateName(name.to_string()));
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        Ok(i)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, generator: usize) -> &str {
        &self.names[generator]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Parses whitespace-separated letters such as `a b^-1 (a b)^2 c^3`.
    pub fn parse_word(&self, text: &str) -> Result<Word, ParseError> {
        let mut cursor = Cursor::new(text);
        let w = parse_word_at(&mut cursor, self)?;
        if !cursor.at_end() {
            return Err(cursor.error("unexpected character in word"));
        }
        Ok(w)
    }

    pub fn render(&self, w: &Word) -> String {
        w.display(self).to_string()
    }
}

/// Parses a word until a delimiter (`,` `|` `>` `=` `)` or end of input).
pub(crate) fn parse_word_at(cursor: &mut Cursor<'_>, alphabet: &Alphabet) -> Result<Word, ParseError> {
    let mut letters = Vec::new();
    loop {
        let atom_start = {
            cursor.skip_ws();
            cursor.pos()
        };
        let atom = match cursor.peek() {
            Some('(') => {
                cursor.expect('(')?;
                let inner = parse_word_at(cursor, alphabet)?;
                cursor.expect(')')?;
                inner
            }
            Some('1') => {
                let start = cursor.pos();
                if cursor.integer()? != 1 {
                    return Err(cursor.error_at(start, "only '1' may stand for the identity"));
                }
                Word::empty()
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let (start, name) = cursor.ident().expect("peeked an identifier");
                match alphabet.index(name) {
                    Some(g) => Word(vec![Letter::pos(g)]),
                    None => return Err(cursor.error_at(start, format!("undeclared generator '{name}'"))),
                }
            }
            _ => break,
        };
        // The exponent must be attached to its atom.
        if cursor.peek_raw() == Some('^') {
            cursor.eat('^');
            let k = cursor.integer()?;
            if k == 0 {
                return Err(cursor.error_at(atom_start, "exponent must be nonzero"));
            }
            letters.extend(atom.pow(k).0);
        } else {
            letters.extend(atom.0);
        }
    }
    Ok(Word(letters))
}

/// Free reduction by a single stack pass.
pub fn free_reduce(w: &Word) -> Word {
    let mut stack: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w.letters() {
        match stack.last() {
            Some(&top) if top.cancels(l) => {
                stack.pop();
            }
            _ => stack.push(l),
        }
    }
    Word(stack)
}

/// The free-group word problem, decided by the literal three-step procedure:
/// (i) if |w| ≤ 1 go to (iii); (ii) delete an adjacent pair `s s^-1` or
/// `s^-1 s` and return to (i), else go to (iii); (iii) answer "trivial" iff
/// the word is empty.
pub fn free_wp(w: &Word) -> bool {
    let mut letters = w.letters().to_vec();
    loop {
        // (i)
        if letters.len() <= 1 {
            break;
        }
        // (ii)
        match letters.windows(2).position(|p| p[0].cancels(p[1])) {
            Some(i) => {
                letters.drain(i..i + 2);
            }
            None => break,
        }
    }
    // (iii)
    letters.is_empty()
}

pub fn invert(w: &Word) -> Word {
    w.letters().iter().rev().map(|l| l.inverse()).collect()
}

/// Splits `w` as `conjugator · core · conjugator⁻¹` (freely) with `core`
/// cyclically reduced.
pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    let r = free_reduce(w);
    let letters = r.letters();
    let mut i = 0;
    let mut j = letters.len();
    while j - i >= 2 && letters[i].cancels(letters[j - 1]) {
        i += 1;
        j -= 1;
    }
    (Word(letters[i..j].to_vec()), Word(letters[..i].to_vec()))
}

/// All rotations of a cyclically reduced word.
pub fn cyclic_permutations(w: &Word) -> Result<BTreeSet<Word>, WordError> {
    if !w.is_cyclically_reduced() {
        return Err(WordError::NotCyclicallyReduced);
    }
    if w.is_empty() {
        return Ok(BTreeSet::from([Word::empty()]));
    }
    Ok((0..w.len()).map(|i| w.rotate(i)).collect())
}

/// Index `i` such that `v` rotated left by `i` equals `u`.
fn rotation_offset(u: &[Letter], v: &[Letter]) -> Option<usize> {
    if u.len() != v.len() {
        return None;
    }
    if u.is_empty() {
        return Some(0);
    }
    (0..v.len()).find(|&i| v[i..].iter().chain(&v[..i]).eq(u.iter()))
}

/// Free-group conjugacy: the cyclic reductions are rotations of one another.
pub fn conjugate_free(u: &Word, v: &Word) -> bool {
    free_conjugator(u, v).is_some()
}

/// A freely reduced `x` with `x · v · x⁻¹ = u` in the free group, if one exists.
pub fn free_conjugator(u: &Word, v: &Word) -> Option<Word> {
    let (u_core, u_conj) = cyclic_reduce(u);
    let (v_core, v_conj) = cyclic_reduce(v);
    let i = rotation_offset(u_core.letters(), v_core.letters())?;
    // u_core = p⁻¹ v_core p with p = v_core[..i]
    let p = v_core.subword(0, i);
    let x = u_conj.concat(&invert(&p)).concat(&invert(&v_conj));
    Some(free_reduce(&x))
}
