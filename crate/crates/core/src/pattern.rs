//! Finite patterns (partial lattice colorings) and canonically ordered
//! pattern collections.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::geom::{BoxRegion, Point};

/// A finite partial map from lattice points to symbols. The support is
/// always non-empty and all points share one dimension.
#[derive(Clone, PartialEq, Eq)]
pub struct Pattern {
    dim: usize,
    alphabet: Arc<Alphabet>,
    // Sorted by scan order, no duplicate points.
    cells: Vec<(Point, Symbol)>,
}

impl Pattern {
    pub fn new(dim: usize, alphabet: Arc<Alphabet>, cells: Vec<(Point, Symbol)>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::EmptySupport);
        }
        for (p, s) in &cells {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "cell {p:?} has dim {} in a {dim}-dimensional pattern",
                    p.dim()
                )));
            }
            if !alphabet.contains(*s) {
                return Err(Error::InvalidSymbol(format!(
                    "symbol id {} out of range for alphabet {}",
                    s.0,
                    alphabet.name()
                )));
            }
        }
        let mut cells = cells;
        cells.sort_by(|a, b| a.0.cmp(&b.0));
        for w in cells.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Validation(format!(
                    "duplicate cell {:?} in pattern",
                    w[0].0
                )));
            }
        }
        Ok(Pattern {
            dim,
            alphabet,
            cells,
        })
    }

    /// A single-cell pattern.
    pub fn cell(alphabet: Arc<Alphabet>, at: Point, sym: Symbol) -> Result<Self> {
        let dim = at.dim();
        Pattern::new(dim, alphabet, vec![(at, sym)])
    }

    /// A 1D word on the window `[0, len-1]`.
    pub fn word(alphabet: Arc<Alphabet>, symbols: &[Symbol]) -> Result<Self> {
        let cells = symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (Point::new(vec![i as i64]), *s))
            .collect();
        Pattern::new(1, alphabet, cells)
    }

    /// Parse a 1D word from whitespace-separated tokens.
    pub fn word_from_tokens(alphabet: &Arc<Alphabet>, tokens: &[&str]) -> Result<Self> {
        let syms: Result<Vec<Symbol>> = tokens.iter().map(|t| alphabet.lookup(t)).collect();
        Pattern::word(alphabet.clone(), &syms?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn cells(&self) -> &[(Point, Symbol)] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, p: &Point) -> Option<Symbol> {
        self.cells
            .binary_search_by(|(q, _)| q.cmp(p))
            .ok()
            .map(|i| self.cells[i].1)
    }

    pub fn support(&self) -> impl Iterator<Item = &Point> {
        self.cells.iter().map(|(p, _)| p)
    }

    pub fn support_box(&self) -> BoxRegion {
        let pts: Vec<Point> = self.cells.iter().map(|(p, _)| p.clone()).collect();
        BoxRegion::bounding(&pts).expect("pattern support is non-empty")
    }

    /// Whether the support is exactly a full box.
    pub fn is_total_on_box(&self) -> bool {
        self.support_box().cell_count() == self.cells.len() as u64
    }

    /// Translate the pattern content by `v`.
    pub fn translate(&self, v: &Point) -> Result<Pattern> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "translation vector {v:?} has dim {} for a {}-dimensional pattern",
                v.dim(),
                self.dim
            )));
        }
        Ok(Pattern {
            dim: self.dim,
            alphabet: self.alphabet.clone(),
            cells: self.cells.iter().map(|(p, s)| (p.add(v), *s)).collect(),
        })
    }

    /// Restrict the pattern to a subset of its support.
    pub fn restrict(&self, points: &BTreeSet<Point>) -> Result<Pattern> {
        if points.is_empty() {
            return Err(Error::EmptySupport);
        }
        let mut cells = Vec::with_capacity(points.len());
        for p in points {
            match self.get(p) {
                Some(s) => cells.push((p.clone(), s)),
                None => {
                    return Err(Error::PointOutside(format!(
                        "{p:?} not in the pattern support"
                    )))
                }
            }
        }
        Pattern::new(self.dim, self.alphabet.clone(), cells)
    }

    /// Restrict to the cells lying inside a box (support must meet the box).
    pub fn restrict_to_box(&self, b: &BoxRegion) -> Result<Pattern> {
        let pts: BTreeSet<Point> = self
            .support()
            .filter(|p| b.contains(p))
            .cloned()
            .collect();
        self.restrict(&pts)
    }

    /// Whether `self` occurs in `q` at some translation (`self ⊑ q`).
    pub fn occurs_in(&self, q: &Pattern) -> Result<bool> {
        Ok(self.occurrences_in(q)?.next().is_some())
    }

    /// All translations `v` with `support(self)+v ⊆ support(q)` and matching
    /// symbols. The support-box prefilter never changes the answer; it only
    /// prunes translations that cannot fit.
    pub fn occurrences_in<'a>(
        &'a self,
        q: &'a Pattern,
    ) -> Result<impl Iterator<Item = Point> + 'a> {
        if self.dim != q.dim {
            return Err(Error::DimensionMismatch(format!(
                "occurs: dims {} vs {}",
                self.dim, q.dim
            )));
        }
        if self.alphabet != q.alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "occurs: alphabets {} vs {}",
                self.alphabet.name(),
                q.alphabet.name()
            )));
        }
        let (anchor, anchor_sym) = self.cells[0].clone();
        let iter = q
            .cells
            .iter()
            .filter(move |(_, s)| *s == anchor_sym)
            .map(move |(p, _)| p.sub(&anchor))
            .filter(move |v| {
                self.cells
                    .iter()
                    .all(|(u, s)| q.get(&u.add(v)) == Some(*s))
            });
        Ok(iter)
    }

    /// Canonical comparison: support box, then cells in scan order, then
    /// symbol ids.
    pub fn canonical_cmp(&self, other: &Pattern) -> std::cmp::Ordering {
        let ba = self.support_box();
        let bb = other.support_box();
        ba.lo()
            .cmp(bb.lo())
            .then_with(|| ba.hi().cmp(bb.hi()))
            .then_with(|| {
                self.cells
                    .iter()
                    .map(|(p, _)| p)
                    .cmp(other.cells.iter().map(|(p, _)| p))
            })
            .then_with(|| {
                self.cells
                    .iter()
                    .map(|(_, s)| s)
                    .cmp(other.cells.iter().map(|(_, s)| s))
            })
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (p, s)) in self.cells.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p:?}:{}", self.alphabet.token(*s))?;
        }
        write!(f, "}}")
    }
}

/// An ordered, deduplicated collection of same-shape-compatible patterns.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PatternSet {
    dim: usize,
    alphabet: Arc<Alphabet>,
    patterns: Vec<Pattern>,
}

impl PatternSet {
    pub fn new(dim: usize, alphabet: Arc<Alphabet>, patterns: Vec<Pattern>) -> Result<Self> {
        for p in &patterns {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "pattern of dim {} in a set of dim {dim}",
                    p.dim()
                )));
            }
            if *p.alphabet() != alphabet {
                return Err(Error::AlphabetMismatch(format!(
                    "pattern over {} in a set over {}",
                    p.alphabet().name(),
                    alphabet.name()
                )));
            }
        }
        let mut patterns = patterns;
        patterns.sort_by(|a, b| a.canonical_cmp(b));
        patterns.dedup();
        Ok(PatternSet {
            dim,
            alphabet,
            patterns,
        })
    }

    pub fn empty(dim: usize, alphabet: Arc<Alphabet>) -> Self {
        PatternSet {
            dim,
            alphabet,
            patterns: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn contains(&self, p: &Pattern) -> bool {
        self.patterns
            .binary_search_by(|q| q.canonical_cmp(p))
            .is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Pattern> {
        self.patterns.iter()
    }

    /// Set difference (patterns of `self` not in `other`).
    pub fn difference(&self, other: &PatternSet) -> PatternSet {
        PatternSet {
            dim: self.dim,
            alphabet: self.alphabet.clone(),
            patterns: self
                .patterns
                .iter()
                .filter(|p| !other.contains(p))
                .cloned()
                .collect(),
        }
    }

    pub fn is_subset_of(&self, other: &PatternSet) -> bool {
        self.patterns.iter().all(|p| other.contains(p))
    }

    /// First pattern of `self` missing from `other`, if any.
    pub fn first_not_in(&self, other: &PatternSet) -> Option<&Pattern> {
        self.patterns.iter().find(|p| !other.contains(p))
    }
}
