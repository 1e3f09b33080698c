//! Group presentations `< S | R >`, their text grammar, and the relator
//! closure R* (all rotations of the cyclically reduced relators and their
//! inverses).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::syntax::{Cursor, ParseError};
use crate::words::{cyclic_permutations, cyclic_reduce, free_reduce, invert, parse_word_at, Alphabet, Word, WordError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PresentationError {
    #[error("relator {index} uses generator #{generator}, but only {count} generators are declared")]
    UnknownGenerator { index: usize, generator: usize, count: usize },
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A finite presentation. Relators are stored freely reduced; a relator may
/// reduce to the empty word and is then kept as a (trivial) relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    generators: Alphabet,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: Alphabet, relators: Vec<Word>) -> Result<Self, PresentationError> {
        let count = generators.len();
        for (index, r) in relators.iter().enumerate() {
            if let Some(g) = r.max_generator().filter(|&g| g >= count) {
                return Err(PresentationError::UnknownGenerator { index, generator: g, count });
            }
        }
        let relators = relators.iter().map(free_reduce).collect();
        Ok(Presentation { generators, relators })
    }

    /// The free group on `names`.
    pub fn free<S: AsRef<str>>(names: &[S]) -> Result<Self, PresentationError> {
        Ok(Presentation { generators: Alphabet::new(names)?, relators: Vec::new() })
    }

    /// Convenience constructor from generator names and relator strings.
    pub fn from_strs<S: AsRef<str>>(names: &[S], relators: &[&str]) -> Result<Self, PresentationError> {
        let generators = Alphabet::new(names)?;
        let relators = relators.iter().map(|r| generators.parse_word(r)).collect::<Result<Vec<_>, _>>()?;
        Presentation::new(generators, relators)
    }

    pub fn parse(text: &str) -> Result<Self, PresentationError> {
        let mut c = Cursor::new(text);
        c.expect('<')?;
        let mut generators = Alphabet::default();
        if c.peek() != Some('|') {
            loop {
                let Some((start, name)) = c.ident() else {
                    return Err(c.error("expected a generator name").into());
                };
                generators.push(name).map_err(|e| c.error_at(start, e.to_string()))?;
                if !c.eat(',') {
                    break;
                }
            }
        }
        c.expect('|')?;
        let mut relators = Vec::new();
        if c.peek() != Some('>') {
            loop {
                let item_start = {
                    c.skip_ws();
                    c.pos()
                };
                let mut sides = vec![parse_word_at(&mut c, &generators)?];
                while c.eat('=') {
                    sides.push(parse_word_at(&mut c, &generators)?);
                }
                if c.pos() == item_start {
                    return Err(c.error("expected a relator or relation").into());
                }
                if sides.len() == 1 {
                    relators.push(sides.pop().unwrap());
                } else {
                    // u = v = w  gives  u v⁻¹, v w⁻¹
                    for pair in sides.windows(2) {
                        relators.push(pair[0].concat(&invert(&pair[1])));
                    }
                }
                if !c.eat(',') {
                    break;
                }
            }
        }
        c.expect('>')?;
        if !c.at_end() {
            return Err(c.error("trailing input after '>'").into());
        }
        Presentation::new(generators, relators)
    }

    pub fn generators(&self) -> &Alphabet {
        &self.generators
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn max_relator_len(&self) -> usize {
        self.relators.iter().map(Word::len).max().unwrap_or(0)
    }

    /// A copy with extra relators appended.
    pub fn with_relators(&self, extra: impl IntoIterator<Item = Word>) -> Result<Self, PresentationError> {
        let mut relators = self.relators.clone();
        relators.extend(extra);
        Presentation::new(self.generators.clone(), relators)
    }

    /// A copy with relators reordered by `order` (a permutation of indices).
    pub fn permute_relators(&self, order: &[usize]) -> Self {
        Presentation {
            generators: self.generators.clone(),
            relators: order.iter().map(|&i| self.relators[i].clone()).collect(),
        }
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, ParseError> {
        self.generators.parse_word(text)
    }

    pub fn render(&self, w: &Word) -> String {
        self.generators.render(w)
    }

    /// Relators rendered as text, in order.
    pub fn relator_strings(&self) -> Vec<String> {
        self.relators.iter().map(|r| self.render(r)).collect()
    }
}

impl FromStr for Presentation {
    type Err = PresentationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Presentation::parse(s)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "< {} |", self.generators.names().join(", "))?;
        if self.relators.is_empty() {
            return f.write_str(" >");
        }
        write!(f, " {} >", self.relator_strings().join(", "))
    }
}

/// The symmetrized relator set R*.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelatorClosure {
    elements: BTreeSet<Word>,
}

impl RelatorClosure {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.elements.contains(w)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Word> {
        self.elements.iter()
    }

    /// Elements in sorted order.
    pub fn to_vec(&self) -> Vec<Word> {
        self.elements.iter().cloned().collect()
    }

    /// Whether rotation and inversion keep every element inside the set.
    pub fn is_closed(&self) -> bool {
        self.elements
            .iter()
            .all(|r| self.elements.contains(&invert(r)) && (0..r.len()).all(|i| self.elements.contains(&r.rotate(i))))
    }
}

pub fn relator_closure(p: &Presentation) -> RelatorClosure {
    let mut elements = BTreeSet::new();
    for r in p.relators() {
        let (core, _) = cyclic_reduce(r);
        if core.is_empty() {
            continue;
        }
        for base in [invert(&core), core] {
            elements.extend(cyclic_permutations(&base).expect("cyclic_reduce output is cyclically reduced"));
        }
    }
    RelatorClosure { elements }
}
