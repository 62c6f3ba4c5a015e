//! Tile sets: an alphabet together with a finite list of forbidden patterns.

use std::sync::Arc;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::pattern::{Pattern, PatternSet};

/// A tile set `(alphabet, forbidden patterns)`. Its tilings are the
/// configurations in which no forbidden pattern occurs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TileSet {
    pub name: String,
    alphabet: Arc<Alphabet>,
    dim: usize,
    forbidden: PatternSet,
}

impl TileSet {
    pub fn new(name: &str, alphabet: Arc<Alphabet>, dim: usize, forbidden: PatternSet) -> Result<Self> {
        if forbidden.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "forbidden set has dim {}, tile set has dim {dim}",
                forbidden.dim()
            )));
        }
        if *forbidden.alphabet() != alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "forbidden set over {}, tile set over {}",
                forbidden.alphabet().name(),
                alphabet.name()
            )));
        }
        Ok(TileSet {
            name: name.to_string(),
            alphabet,
            dim,
            forbidden,
        })
    }

    /// Tile set with no constraints (the full shift).
    pub fn free(name: &str, alphabet: Arc<Alphabet>, dim: usize) -> Self {
        let forbidden = PatternSet::empty(dim, alphabet.clone());
        TileSet {
            name: name.to_string(),
            alphabet,
            dim,
            forbidden,
        }
    }

    /// 1D tile set forbidding the given token words.
    pub fn forbid_words(name: &str, alphabet: Arc<Alphabet>, words: &[&str]) -> Result<Self> {
        let mut pats = Vec::new();
        for w in words {
            let toks: Vec<&str> = w.split_whitespace().collect();
            pats.push(Pattern::word_from_tokens(&alphabet, &toks)?);
        }
        let forbidden = PatternSet::new(1, alphabet.clone(), pats)?;
        TileSet::new(name, alphabet, 1, forbidden)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn forbidden(&self) -> &PatternSet {
        &self.forbidden
    }

    /// Union of forbidden patterns with another set over the same alphabet.
    pub fn with_extra(&self, extra: &PatternSet) -> Result<TileSet> {
        let mut pats: Vec<Pattern> = self.forbidden.patterns().to_vec();
        pats.extend(extra.patterns().iter().cloned());
        let forbidden = PatternSet::new(self.dim, self.alphabet.clone(), pats)?;
        TileSet::new(&self.name, self.alphabet.clone(), self.dim, forbidden)
    }
}
