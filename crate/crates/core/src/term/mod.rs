//! The term algebra of subshifts.
//!
//! A term denotes a subshift built from full shifts and tile sets by five
//! operations: product, finite type, factor, sub-action and superposition.
//! Terms are immutable; the window semantics in [`eval`] computes sound
//! upper approximations of window languages, exact in one dimension at
//! sufficient margin.
//!
//! Operations whose side conditions fail (mismatched alphabet, dimension or
//! basis) return the operand unchanged with a warning flag set on the term;
//! the flag is data, not a log line, so tests can observe the identity
//! behavior.

mod eval;
mod exact;
mod lower;

pub use eval::{
    compare_window_languages, contains_window_pattern, sample_window_patterns, upper_language,
    window_language_nonempty, ComparisonEntry, LanguageComparison,
};
pub use exact::term_graph;
pub(crate) use lower::{lower, Lowered};

use std::fmt;
use std::sync::Arc;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::pattern::PatternSet;
use crate::tileset::TileSet;

/// Cap on sliding-block-code table sizes and pullback enumerations.
pub const CODE_TABLE_CAP: usize = 1 << 20;

/// A shift-commuting local map: reads the source symbols at `neighborhood`
/// offsets and emits one target symbol. The table is total over all
/// neighborhood assignments.
#[derive(Clone, PartialEq, Eq)]
pub struct SlidingBlockCode {
    source: Arc<Alphabet>,
    target: Arc<Alphabet>,
    dim: usize,
    neighborhood: Vec<Point>,
    table: Vec<Symbol>,
}

impl fmt::Debug for SlidingBlockCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SlidingBlockCode({} -> {}, dim {}, |U|={})",
            self.source.name(),
            self.target.name(),
            self.dim,
            self.neighborhood.len()
        )
    }
}

impl SlidingBlockCode {
    pub fn from_fn(
        source: Arc<Alphabet>,
        target: Arc<Alphabet>,
        dim: usize,
        neighborhood: Vec<Point>,
        local: impl Fn(&[Symbol]) -> Symbol,
    ) -> Result<Self> {
        if neighborhood.is_empty() {
            return Err(Error::EmptySupport);
        }
        let mut neighborhood = neighborhood;
        neighborhood.sort();
        neighborhood.dedup();
        for u in &neighborhood {
            if u.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "neighborhood offset {u:?} in a dim-{dim} code"
                )));
            }
        }
        let k = neighborhood.len();
        let n = source.len();
        let entries = n.checked_pow(k as u32).ok_or_else(|| {
            Error::ResourceLimit("sliding block code table overflows".into())
        })?;
        if entries > CODE_TABLE_CAP {
            return Err(Error::ResourceLimit(format!(
                "sliding block code table has {entries} entries"
            )));
        }
        let mut table = Vec::with_capacity(entries);
        let mut args = vec![Symbol(0); k];
        for idx in 0..entries {
            let mut rem = idx;
            for j in (0..k).rev() {
                args[j] = Symbol((rem % n) as u32);
                rem /= n;
            }
            let out = local(&args);
            if !target.contains(out) {
                return Err(Error::InvalidSymbol(format!(
                    "code output id {} outside target alphabet",
                    out.0
                )));
            }
            table.push(out);
        }
        Ok(SlidingBlockCode {
            source,
            target,
            dim,
            neighborhood,
            table,
        })
    }

    /// The identity letter-to-letter code.
    pub fn identity(alphabet: Arc<Alphabet>, dim: usize) -> Self {
        SlidingBlockCode {
            source: alphabet.clone(),
            target: alphabet.clone(),
            dim,
            neighborhood: vec![Point::zero(dim)],
            table: alphabet.symbols().collect(),
        }
    }

    /// Letter-to-letter code given by a symbol map.
    pub fn letterwise(
        source: Arc<Alphabet>,
        target: Arc<Alphabet>,
        dim: usize,
        map: impl Fn(Symbol) -> Symbol,
    ) -> Result<Self> {
        SlidingBlockCode::from_fn(source, target, dim, vec![Point::zero(dim)], |args| {
            map(args[0])
        })
    }

    pub fn source(&self) -> &Arc<Alphabet> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Alphabet> {
        &self.target
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn neighborhood(&self) -> &[Point] {
        &self.neighborhood
    }

    pub fn table(&self) -> &[Symbol] {
        &self.table
    }

    pub fn is_letterwise(&self) -> bool {
        self.neighborhood.len() == 1 && self.neighborhood[0] == Point::zero(self.dim)
    }

    pub fn is_identity(&self) -> bool {
        self.is_letterwise()
            && self.source == self.target
            && self.table.iter().enumerate().all(|(i, s)| s.0 as usize == i)
    }

    /// Apply the local rule to symbols listed in neighborhood order.
    pub fn apply(&self, args: &[Symbol]) -> Symbol {
        debug_assert_eq!(args.len(), self.neighborhood.len());
        let n = self.source.len();
        let mut idx = 0usize;
        for a in args {
            idx = idx * n + a.0 as usize;
        }
        self.table[idx]
    }

    /// Composition `self ∘ inner` (apply `inner` first).
    pub fn compose(&self, inner: &SlidingBlockCode) -> Result<SlidingBlockCode> {
        if inner.target != self.source || inner.dim != self.dim {
            return Err(Error::AlphabetMismatch(
                "code composition type mismatch".into(),
            ));
        }
        // Fast path: pre/post-composition with letterwise codes keeps the
        // neighborhood small.
        if self.is_letterwise() {
            let table: Vec<Symbol> = inner.table.iter().map(|s| self.table[s.0 as usize]).collect();
            return Ok(SlidingBlockCode {
                source: inner.source.clone(),
                target: self.target.clone(),
                dim: self.dim,
                neighborhood: inner.neighborhood.clone(),
                table,
            });
        }
        let mut u: Vec<Point> = Vec::new();
        for u2 in &self.neighborhood {
            for u1 in &inner.neighborhood {
                u.push(u2.add(u1));
            }
        }
        u.sort();
        u.dedup();
        let index_of = |p: &Point| u.iter().position(|q| q == p).unwrap();
        let outer = self.clone();
        let inner_c = inner.clone();
        let u_for_fn = u.clone();
        SlidingBlockCode::from_fn(
            inner.source.clone(),
            self.target.clone(),
            self.dim,
            u.clone(),
            move |args| {
                let inner_outs: Vec<Symbol> = outer
                    .neighborhood
                    .iter()
                    .map(|u2| {
                        let inner_args: Vec<Symbol> = inner_c
                            .neighborhood
                            .iter()
                            .map(|u1| {
                                let p = u2.add(u1);
                                let pos = u_for_fn.iter().position(|q| *q == p).unwrap();
                                args[pos]
                            })
                            .collect();
                        inner_c.apply(&inner_args)
                    })
                    .collect();
                outer.apply(&inner_outs)
            },
        )
        .map(|c| {
            let _ = index_of;
            c
        })
    }

    /// Pair two codes into one over a binary product source/target.
    pub fn pair(
        left: &SlidingBlockCode,
        right: &SlidingBlockCode,
        source: Arc<Alphabet>,
        target: Arc<Alphabet>,
    ) -> Result<SlidingBlockCode> {
        if left.dim != right.dim {
            return Err(Error::DimensionMismatch("paired codes differ in dim".into()));
        }
        if left.is_letterwise() && right.is_letterwise() {
            let dim = left.dim;
            let l = left.clone();
            let r = right.clone();
            let src = source.clone();
            let tgt = target.clone();
            return SlidingBlockCode::from_fn(
                source,
                target.clone(),
                dim,
                vec![Point::zero(dim)],
                move |args| {
                    let (a, b) = src.unpair(args[0]);
                    tgt.pair(l.table[a.0 as usize], r.table[b.0 as usize])
                },
            );
        }
        let mut u: Vec<Point> = left
            .neighborhood
            .iter()
            .chain(right.neighborhood.iter())
            .cloned()
            .collect();
        u.sort();
        u.dedup();
        let dim = left.dim;
        let l = left.clone();
        let r = right.clone();
        let src = source.clone();
        let tgt = target.clone();
        let u_clone = u.clone();
        SlidingBlockCode::from_fn(source, target.clone(), dim, u, move |args| {
            let split: Vec<(Symbol, Symbol)> = args.iter().map(|s| src.unpair(*s)).collect();
        let largs: Vec<Symbol> = l
                .neighborhood
                .iter()
                .map(|p| split[u_clone.iter().position(|q| q == p).unwrap()].0)
                .collect();
            let rargs: Vec<Symbol> = r
                .neighborhood
                .iter()
                .map(|p| split[u_clone.iter().position(|q| q == p).unwrap()].1)
                .collect();
            tgt.pair(l.apply(&largs), r.apply(&rargs))
        })
    }
}

/// A list of rationally independent vectors generating a subgroup of `Z^d`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubgroupBasis {
    ambient_dim: usize,
    vectors: Vec<Point>,
}

impl SubgroupBasis {
    pub fn new(ambient_dim: usize, vectors: Vec<Point>) -> Result<Self> {
        if vectors.is_empty() || vectors.len() > ambient_dim {
            return Err(Error::Validation(format!(
                "basis of {} vectors in dimension {ambient_dim}",
                vectors.len()
            )));
        }
        for v in &vectors {
            if v.dim() != ambient_dim {
                return Err(Error::DimensionMismatch(format!(
                    "basis vector {v:?} in ambient dim {ambient_dim}"
                )));
            }
        }
        let rows: Vec<Vec<i128>> = vectors
            .iter()
            .map(|v| v.0.iter().map(|&c| c as i128).collect())
            .collect();
        if rank(rows) != vectors.len() {
            return Err(Error::Validation(
                "basis vectors are rationally dependent".into(),
            ));
        }
        Ok(SubgroupBasis {
            ambient_dim,
            vectors,
        })
    }

    /// The standard basis of `Z^d`.
    pub fn standard(dim: usize) -> Self {
        let vectors = (0..dim)
            .map(|i| {
                let mut c = vec![0i64; dim];
                c[i] = 1;
                Point::new(c)
            })
            .collect();
        SubgroupBasis {
            ambient_dim: dim,
            vectors,
        }
    }

    /// Basis consisting of the listed unit vectors of `Z^d` (0-indexed axes).
    pub fn axes(ambient_dim: usize, axes: &[usize]) -> Self {
        let vectors = axes
            .iter()
            .map(|&i| {
                let mut c = vec![0i64; ambient_dim];
                c[i] = 1;
                Point::new(c)
            })
            .collect();
        SubgroupBasis {
            ambient_dim,
            vectors,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vectors(&self) -> &[Point] {
        &self.vectors
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    /// Embed sub-lattice coordinates into the ambient lattice.
    pub fn embed(&self, coords: &Point) -> Point {
        debug_assert_eq!(coords.dim(), self.vectors.len());
        let mut out = Point::zero(self.ambient_dim);
        for (c, v) in coords.0.iter().zip(&self.vectors) {
            out = out.add(&v.scale(*c));
        }
        out
    }

    pub fn is_standard(&self) -> bool {
        *self == SubgroupBasis::standard(self.ambient_dim)
    }
}

fn rank(mut rows: Vec<Vec<i128>>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let pivot = (r..rows.len()).find(|&i| rows[i][c] != 0);
        let Some(p) = pivot else { continue };
        rows.swap(r, p);
        for i in (r + 1)..rows.len() {
            if rows[i][c] != 0 {
                let (a, b) = (rows[r][c], rows[i][c]);
                for j in 0..cols {
                    rows[i][j] = rows[i][j] * a - rows[r][j] * b;
                }
            }
        }
        r += 1;
    }
    r
}

/// Determinant of a small square integer matrix (cofactor expansion).
pub(crate) fn determinant(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            let mut det = 0i128;
            for j in 0..n {
                if m[0][j] == 0 {
                    continue;
                }
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                det += sign * m[0][j] * determinant(&minor);
            }
            det
        }
    }
}

/// Integer inverse of a unimodular matrix via the adjugate.
pub(crate) fn unimodular_inverse(m: &[Vec<i128>]) -> Option<Vec<Vec<i128>>> {
    let n = m.len();
    let det = determinant(m);
    if det != 1 && det != -1 {
        return None;
    }
    let mut inv = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i128>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != i)
                        .map(|c| m[r][c])
                        .collect()
                })
                .collect();
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            inv[i][j] = sign * determinant(&minor) * det;
        }
    }
    Some(inv)
}

/// Expression tree node.
#[derive(Clone, Debug)]
pub enum TermNode {
    FullShift,
    Sft(TileSet),
    Product(Box<SubshiftTerm>, Box<SubshiftTerm>),
    FiniteType(Arc<PatternSet>, Box<SubshiftTerm>),
    Factor(SlidingBlockCode, Box<SubshiftTerm>),
    SubAction(SubgroupBasis, Box<SubshiftTerm>),
    Superposition(SubgroupBasis, SubgroupBasis, Box<SubshiftTerm>),
}

/// A subshift-denoting expression with cached dimension and alphabet.
#[derive(Clone, Debug)]
pub struct SubshiftTerm {
    node: TermNode,
    dim: usize,
    alphabet: Arc<Alphabet>,
    warning: Option<String>,
    groups: Vec<(String, Arc<PatternSet>)>,
}

impl SubshiftTerm {
    pub fn full_shift(alphabet: Arc<Alphabet>, dim: usize) -> Self {
        SubshiftTerm {
            node: TermNode::FullShift,
            dim,
            alphabet,
            warning: None,
            groups: Vec::new(),
        }
    }

    pub fn sft(tileset: TileSet) -> Self {
        let dim = tileset.dim();
        let alphabet = tileset.alphabet().clone();
        SubshiftTerm {
            node: TermNode::Sft(tileset),
            dim,
            alphabet,
            warning: None,
            groups: Vec::new(),
        }
    }

    pub fn node(&self) -> &TermNode {
        &self.node
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    /// Mismatch warning left by an operation that returned its operand
    /// unchanged; `None` when the operation applied normally.
    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }

    fn with_warning(mut self, w: String) -> Self {
        self.warning = Some(w);
        self
    }

    pub(crate) fn with_groups(mut self, groups: Vec<(String, Arc<PatternSet>)>) -> Self {
        self.groups = groups;
        self
    }

    /// Named constraint groups recorded by term builders.
    pub fn constraint_groups(&self) -> &[(String, Arc<PatternSet>)] {
        &self.groups
    }

    pub fn constraint_group(&self, name: &str) -> Option<&Arc<PatternSet>> {
        self.groups
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| g)
    }

    /// Operator names from the root down the spine of unary/product nodes.
    pub fn node_sequence(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match &cur.node {
                TermNode::FullShift => {
                    out.push("full-shift");
                    return out;
                }
                TermNode::Sft(_) => {
                    out.push("sft");
                    return out;
                }
                TermNode::Product(a, b) => {
                    out.push("product");
                    // Follow the structurally larger child (the non-leaf one
                    // if any); products of leaves end the spine.
                    cur = if matches!(b.node, TermNode::FullShift | TermNode::Sft(_)) {
                        if matches!(a.node, TermNode::FullShift | TermNode::Sft(_)) {
                            out.push(leaf_name(&a.node));
                            return out;
                        }
                        a
                    } else {
                        b
                    };
                }
                TermNode::FiniteType(_, t) => {
                    out.push("finite-type");
                    cur = t;
                }
                TermNode::Factor(_, t) => {
                    out.push("factor");
                    cur = t;
                }
                TermNode::SubAction(_, t) => {
                    out.push("sub-action");
                    cur = t;
                }
                TermNode::Superposition(_, _, t) => {
                    out.push("superposition");
                    cur = t;
                }
            }
        }
    }
}

fn leaf_name(n: &TermNode) -> &'static str {
    match n {
        TermNode::FullShift => "full-shift",
        TermNode::Sft(_) => "sft",
        _ => unreachable!(),
    }
}

/// Product of two subshifts of the same dimension over the product alphabet.
pub fn product(t1: SubshiftTerm, t2: SubshiftTerm) -> Result<SubshiftTerm> {
    if t1.dim != t2.dim {
        return Err(Error::DimensionMismatch(format!(
            "product requires equal dimensions, got {} and {}",
            t1.dim, t2.dim
        )));
    }
    let alphabet = Alphabet::product(
        &format!("{}x{}", t1.alphabet.name(), t2.alphabet.name()),
        &[t1.alphabet.clone(), t2.alphabet.clone()],
    );
    let dim = t1.dim;
    Ok(SubshiftTerm {
        node: TermNode::Product(Box::new(t1), Box::new(t2)),
        dim,
        alphabet,
        warning: None,
        groups: Vec::new(),
    })
}

/// Add finitely many forbidden patterns. On alphabet or dimension mismatch
/// the operand is returned unchanged with a warning flag.
pub fn finite_type(extra: PatternSet, t: SubshiftTerm) -> SubshiftTerm {
    if extra.dim() != t.dim || *extra.alphabet() != t.alphabet {
        return t.with_warning(
            "finite-type: pattern set does not match the operand; term unchanged".into(),
        );
    }
    let dim = t.dim;
    let alphabet = t.alphabet.clone();
    SubshiftTerm {
        node: TermNode::FiniteType(Arc::new(extra), Box::new(t)),
        dim,
        alphabet,
        warning: None,
        groups: Vec::new(),
    }
}

/// Finite type with a shared pattern set (used by term builders that also
/// record the set as a named group).
pub fn finite_type_shared(extra: Arc<PatternSet>, t: SubshiftTerm) -> SubshiftTerm {
    if extra.dim() != t.dim || *extra.alphabet() != t.alphabet {
        return t.with_warning(
            "finite-type: pattern set does not match the operand; term unchanged".into(),
        );
    }
    let dim = t.dim;
    let alphabet = t.alphabet.clone();
    SubshiftTerm {
        node: TermNode::FiniteType(extra, Box::new(t)),
        dim,
        alphabet,
        warning: None,
        groups: Vec::new(),
    }
}

/// Image under a sliding block code. On type mismatch the operand is
/// returned unchanged with a warning flag.
pub fn factor(code: SlidingBlockCode, t: SubshiftTerm) -> SubshiftTerm {
    if code.dim() != t.dim || *code.source() != t.alphabet {
        return t.with_warning(
            "factor: code domain does not match the operand; term unchanged".into(),
        );
    }
    let dim = t.dim;
    let alphabet = code.target().clone();
    SubshiftTerm {
        node: TermNode::Factor(code, Box::new(t)),
        dim,
        alphabet,
        warning: None,
        groups: Vec::new(),
    }
}

/// Restriction to the subgroup generated by the basis, lowering dimension to
/// the basis rank. On ambient mismatch the operand is returned unchanged
/// with a warning flag.
pub fn sub_action(basis: SubgroupBasis, t: SubshiftTerm) -> SubshiftTerm {
    if basis.ambient_dim() != t.dim {
        return t.with_warning(
            "sub-action: basis ambient dimension does not match; term unchanged".into(),
        );
    }
    let dim = basis.rank();
    let alphabet = t.alphabet.clone();
    SubshiftTerm {
        node: TermNode::SubAction(basis, Box::new(t)),
        dim,
        alphabet,
        warning: None,
        groups: Vec::new(),
    }
}

/// Stack copies of the subshift along the complement `g2` of an embedded
/// copy `g` of its lattice. `g` and `g2` must jointly form a unimodular
/// basis of the larger lattice; otherwise the operand is returned unchanged
/// with a warning flag.
pub fn superposition(g: SubgroupBasis, g2: SubgroupBasis, t: SubshiftTerm) -> SubshiftTerm {
    let total = g.rank() + g2.rank();
    if g.ambient_dim() != total
        || g2.ambient_dim() != total
        || g.rank() != t.dim
    {
        return t.with_warning(
            "superposition: basis shapes do not match the operand; term unchanged".into(),
        );
    }
    // The combined vectors must form a basis of Z^(d+d'): determinant ±1.
    let mut rows: Vec<Vec<i128>> = Vec::with_capacity(total);
    for v in g.vectors().iter().chain(g2.vectors()) {
        rows.push(v.0.iter().map(|&c| c as i128).collect());
    }
    let det = determinant(&rows);
    if det != 1 && det != -1 {
        return t.with_warning(format!(
            "superposition: bases do not split the lattice (determinant {det}); term unchanged"
        ));
    }
    let alphabet = t.alphabet.clone();
    SubshiftTerm {
        node: TermNode::Superposition(g, g2, Box::new(t)),
        dim: total,
        alphabet,
        warning: None,
        groups: Vec::new(),
    }
}

/// Margin at which the window semantics of a one-dimensional term is exact,
/// when one can be certified cheaply: the composite de Bruijn bound
/// `|C|^(m-1) + m` for the lowered constraint system. `None` when the term
/// cannot be lowered or the bound is impractically large.
pub fn exactness_margin(t: &SubshiftTerm) -> Option<i64> {
    let lowered = lower(t).ok()??;
    let c = lowered.alphabet.len() as i64;
    let mut m = 2i64;
    for mp in &lowered.constraints {
        let pts: Vec<Point> = mp.cells.iter().map(|(p, _)| p.clone()).collect();
        let b = crate::geom::BoxRegion::bounding(&pts).ok()?;
        for axis in 0..b.dim() {
            m = m.max(b.side(axis));
        }
    }
    let bound = c.checked_pow((m - 1) as u32)? + m;
    if bound > 10_000 {
        None
    } else {
        Some(bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::BoxRegion;
    use crate::pattern::Pattern;

    fn bin() -> Arc<Alphabet> {
        Alphabet::new("bin", &["0", "1"]).unwrap()
    }

    fn golden_term() -> SubshiftTerm {
        SubshiftTerm::sft(TileSet::forbid_words("g", bin(), &["1 1"]).unwrap())
    }

    #[test]
    fn product_dimension_mismatch_is_hard_error() {
        let t1 = SubshiftTerm::full_shift(bin(), 1);
        let t2 = SubshiftTerm::full_shift(bin(), 2);
        assert!(product(t1, t2).is_err());
    }

    #[test]
    fn finite_type_mismatch_returns_operand_with_warning() {
        let t = golden_term();
        let other = Alphabet::new("abc", &["a", "b", "c"]).unwrap();
        let p = PatternSet::new(
            1,
            other.clone(),
            vec![Pattern::word_from_tokens(&other, &["a"]).unwrap()],
        )
        .unwrap();
        let r = finite_type(p, t.clone());
        assert!(r.warning().is_some());
        assert!(matches!(r.node(), TermNode::Sft(_)));
    }

    #[test]
    fn superposition_determinant_guard() {
        let t = golden_term();
        // G = Z(2 e1), G' = Z e2: determinant 2, not a lattice splitting.
        let g = SubgroupBasis::new(2, vec![Point::new(vec![2, 0])]).unwrap();
        let g2 = SubgroupBasis::new(2, vec![Point::new(vec![0, 1])]).unwrap();
        let r = superposition(g, g2, t.clone());
        assert!(r.warning().is_some());
        assert_eq!(r.dim(), 1);
        // A genuine splitting raises the dimension.
        let g = SubgroupBasis::axes(2, &[0]);
        let g2 = SubgroupBasis::axes(2, &[1]);
        let r = superposition(g, g2, t);
        assert!(r.warning().is_none());
        assert_eq!(r.dim(), 2);
    }

    #[test]
    fn dependent_basis_rejected() {
        assert!(SubgroupBasis::new(
            2,
            vec![Point::new(vec![1, 1]), Point::new(vec![2, 2])]
        )
        .is_err());
    }

    #[test]
    fn factor_and_subaction_mismatch_warn_and_keep_language() {
        let t = golden_term();
        // Code over the wrong source alphabet.
        let abc = Alphabet::new("abc", &["a", "b", "c"]).unwrap();
        let code = SlidingBlockCode::identity(abc, 1);
        let r = super::factor(code, t.clone());
        assert!(r.warning().is_some());
        let cmp = super::compare_window_languages(&r, &t, 3, 1).unwrap();
        assert!(cmp.all_equal());
        // Basis in the wrong ambient dimension.
        let b = SubgroupBasis::standard(2);
        let r = super::sub_action(b, t.clone());
        assert!(r.warning().is_some());
        assert_eq!(r.dim(), 1);
    }

    #[test]
    fn empty_finite_type_keeps_language() {
        let t = golden_term();
        let empty = PatternSet::empty(1, t.alphabet().clone());
        let r = super::finite_type(empty, t.clone());
        assert!(r.warning().is_none());
        let cmp = super::compare_window_languages(&r, &t, 4, 1).unwrap();
        assert!(cmp.all_equal());
    }

    #[test]
    fn code_composition_matches_pointwise() {
        let a = bin();
        let xor = SlidingBlockCode::from_fn(
            a.clone(),
            a.clone(),
            1,
            vec![Point::new(vec![0]), Point::new(vec![1])],
            |w| Symbol(w[0].0 ^ w[1].0),
        )
        .unwrap();
        let flip = SlidingBlockCode::letterwise(a.clone(), a.clone(), 1, |s| Symbol(1 - s.0))
            .unwrap();
        let comp = flip.compose(&xor).unwrap();
        for x in 0..2u32 {
            for y in 0..2u32 {
                assert_eq!(
                    comp.apply(&[Symbol(x), Symbol(y)]),
                    Symbol(1 - (x ^ y))
                );
            }
        }
    }

    #[test]
    fn unimodular_inverse_roundtrip() {
        let m = vec![vec![1i128, 1], vec![0, 1]];
        let inv = unimodular_inverse(&m).unwrap();
        // m * inv = identity
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0i128;
                for k in 0..2 {
                    acc += m[i][k] * inv[k][j];
                }
                assert_eq!(acc, if i == j { 1 } else { 0 });
            }
        }
        assert!(unimodular_inverse(&[vec![2, 0], vec![0, 1]]).is_none());
    }

    #[test]
    fn exactness_margin_small_for_golden_mean() {
        let m = exactness_margin(&golden_term()).unwrap();
        assert!(m >= 4);
        let _ = BoxRegion::line(1);
    }
}
