//! Reduced words over open-ended generator alphabets.
//!
//! A [`Word`] is a freely reduced word over abstract generators: no two adjacent
//! letters are a generator and its inverse. Words are the shared currency for
//! elements of free groups on group-element alphabets, subgroup bases, and
//! presentation alphabets. Every constructor reduces, so a `Word` is always in
//! canonical form and structural equality coincides with equality in the free
//! group.
//!
//! Generators are identified by a [`GenId`]: a small namespace tag (so that
//! several alphabets can coexist inside one computation without clashes) plus a
//! nonnegative index. New generators can be minted on demand; no global
//! registry is required.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Namespace tag for generators indexed by group elements (`u_x`).
pub const TAG_BASE: u16 = 0;
/// Namespace tag for generators indexed by a subgroup basis.
pub const TAG_BASIS: u16 = 1;
/// Namespace tag for auxiliary alphabets (e.g. presentation generators).
pub const TAG_AUX: u16 = 2;

/// Identifier of an abstract free-group generator.
///
/// Equality and the (lexicographic) total order are by `(tag, index)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct GenId {
    /// Alphabet namespace; see [`TAG_BASE`], [`TAG_BASIS`], [`TAG_AUX`].
    pub tag: u16,
    /// Index within the alphabet.
    pub index: u32,
}

impl GenId {
    /// Creates a generator id.
    #[must_use]
    pub const fn new(tag: u16, index: u32) -> Self {
        GenId { tag, index }
    }

    /// Generator `u_x` on the base alphabet.
    #[must_use]
    pub const fn base(index: u32) -> Self {
        GenId::new(TAG_BASE, index)
    }

    /// Generator on the subgroup-basis alphabet.
    #[must_use]
    pub const fn basis(index: u32) -> Self {
        GenId::new(TAG_BASIS, index)
    }

    /// Generator on the auxiliary alphabet.
    #[must_use]
    pub const fn aux(index: u32) -> Self {
        GenId::new(TAG_AUX, index)
    }
}

impl fmt::Display for GenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}:{}", self.tag, self.index)
    }
}

/// A single signed letter of a word: a generator or its inverse.
pub type Letter = (GenId, i8);

/// A freely reduced word; the empty word is the identity.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<Letter>,
}

/// Errors raised by homomorphism application and evaluation.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    /// A letter of the input has no image under the supplied assignment.
    #[error("unmapped generator {0}")]
    UnmappedGenerator(GenId),
    /// A word string could not be parsed.
    #[error("word parse error: {0}")]
    Parse(String),
}

impl Word {
    /// The identity (empty) word.
    #[must_use]
    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    /// The one-letter word for `g`.
    #[must_use]
    pub fn gen(g: GenId) -> Self {
        Word { letters: vec![(g, 1)] }
    }

    /// The one-letter word for `g` with the given sign (`+1` or `-1`).
    #[must_use]
    pub fn letter(g: GenId, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Word { letters: vec![(g, sign)] }
    }

    /// Builds a word from a letter sequence, freely reducing it.
    #[must_use]
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for (g, s) in letters {
            debug_assert!(s == 1 || s == -1);
            match stack.last() {
                Some(&(h, t)) if h == g && t == -s => {
                    stack.pop();
                }
                _ => stack.push((g, s)),
            }
        }
        Word { letters: stack }
    }

    /// The reduced letter sequence.
    #[must_use]
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Reduced word length.
    #[must_use]
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    /// Whether this is the identity.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Product `self · rhs`, reduced.
    #[must_use]
    pub fn mul(&self, rhs: &Word) -> Word {
        // Only the seam can cancel, so splice rather than re-scan everything.
        let mut left = self.letters.clone();
        let mut right_idx = 0;
        let rl = rhs.letters.len();
        while let Some(&(g, s)) = left.last() {
            if right_idx < rl {
                let (h, t) = rhs.letters[right_idx];
                if g == h && s == -t {
                    left.pop();
                    right_idx += 1;
                    continue;
                }
            }
            break;
        }
        left.extend_from_slice(&rhs.letters[right_idx..]);
        Word { letters: left }
    }

    /// Inverse word, reduced.
    #[must_use]
    pub fn inv(&self) -> Word {
        let letters = self.letters.iter().rev().map(|&(g, s)| (g, -s)).collect();
        Word { letters }
    }

    /// Conjugate `by · self · by⁻¹`, reduced.
    #[must_use]
    pub fn conj(&self, by: &Word) -> Word {
        by.mul(self).mul(&by.inv())
    }

    /// Commutator `self · rhs · self⁻¹ · rhs⁻¹`, reduced.
    #[must_use]
    pub fn comm(&self, rhs: &Word) -> Word {
        self.mul(rhs).mul(&self.inv()).mul(&rhs.inv())
    }

    /// Integer power, reduced.
    #[must_use]
    pub fn pow(&self, e: i64) -> Word {
        let base = if e >= 0 { self.clone() } else { self.inv() };
        let mut out = Word::empty();
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Applies the homomorphism determined by `assignment` and reduces.
    ///
    /// # Errors
    /// [`WordError::UnmappedGenerator`] if some letter of `self` has no image.
    pub fn apply_hom(&self, assignment: &BTreeMap<GenId, Word>) -> Result<Word, WordError> {
        let mut out = Word::empty();
        for &(g, s) in &self.letters {
            let img = assignment
                .get(&g)
                .ok_or(WordError::UnmappedGenerator(g))?;
            out = if s == 1 { out.mul(img) } else { out.mul(&img.inv()) };
        }
        Ok(out)
    }

    /// Applies a homomorphism given as a closure; `None` means unmapped.
    ///
    /// # Errors
    /// [`WordError::UnmappedGenerator`] if some letter of `self` has no image.
    pub fn apply_hom_fn<F>(&self, mut assignment: F) -> Result<Word, WordError>
    where
        F: FnMut(GenId) -> Option<Word>,
    {
        let mut out = Word::empty();
        for &(g, s) in &self.letters {
            let img = assignment(g).ok_or(WordError::UnmappedGenerator(g))?;
            out = if s == 1 { out.mul(&img) } else { out.mul(&img.inv()) };
        }
        Ok(out)
    }

    /// Parses the whitespace-separated `g<tag>:<index>` / `g<tag>:<index>'`
    /// token syntax. Round-trips with [`fmt::Display`].
    ///
    /// # Errors
    /// [`WordError::Parse`] on any malformed token.
    pub fn parse(text: &str) -> Result<Word, WordError> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            let (body, sign) = match token.strip_suffix('\'') {
                Some(b) => (b, -1),
                None => (token, 1),
            };
            let rest = body
                .strip_prefix('g')
                .ok_or_else(|| WordError::Parse(format!("token `{token}` must start with `g`")))?;
            let (tag_s, idx_s) = rest
                .split_once(':')
                .ok_or_else(|| WordError::Parse(format!("token `{token}` missing `:`")))?;
            let tag: u16 = tag_s
                .parse()
                .map_err(|_| WordError::Parse(format!("bad tag in `{token}`")))?;
            let index: u32 = idx_s
                .parse()
                .map_err(|_| WordError::Parse(format!("bad index in `{token}`")))?;
            letters.push((GenId::new(tag, index), sign));
        }
        Ok(Word::from_letters(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, &(g, s)) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{g}")?;
            if s == -1 {
                write!(f, "'")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}
