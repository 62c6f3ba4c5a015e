//! Exact language computation for one-dimensional subshifts presented by
//! labeled graphs.
//!
//! A labeled graph presents the set of bi-infinite label sequences along its
//! paths. After trimming (keeping only vertices with an infinite past and an
//! infinite future), the words of length `n` readable along paths are exactly
//! the length-`n` language of the presented subshift. Word listing and
//! counting deduplicate via on-the-fly determinization, capped at 2^16
//! subset states with an explicit resource error.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::pattern::{Pattern, PatternSet};
use crate::tileset::TileSet;

pub const SUBSET_STATE_CAP: usize = 1 << 16;

/// A finite automaton presentation: vertices, edges labeled by symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    alphabet: Arc<Alphabet>,
    vertices: Vec<String>,
    // (source, target, label), canonically ordered.
    edges: Vec<(usize, usize, Symbol)>,
}

impl LabeledGraph {
    pub fn new(
        alphabet: Arc<Alphabet>,
        vertices: Vec<String>,
        mut edges: Vec<(usize, usize, Symbol)>,
    ) -> Result<Self> {
        for &(s, t, l) in &edges {
            if s >= vertices.len() || t >= vertices.len() {
                return Err(Error::Validation(format!(
                    "edge ({s},{t}) out of vertex range"
                )));
            }
            if !alphabet.contains(l) {
                return Err(Error::InvalidSymbol(format!("edge label id {}", l.0)));
            }
        }
        edges.sort();
        edges.dedup();
        Ok(LabeledGraph {
            alphabet,
            vertices,
            edges,
        })
    }

    /// The empty presentation (empty subshift).
    pub fn empty(alphabet: Arc<Alphabet>) -> Self {
        LabeledGraph {
            alphabet,
            vertices: Vec::new(),
            edges: Vec::new(),
        }
    }

    /// One vertex with a self-loop per alphabet symbol (the full shift).
    pub fn full_shift(alphabet: Arc<Alphabet>) -> Self {
        let edges = alphabet.symbols().map(|s| (0, 0, s)).collect();
        LabeledGraph {
            alphabet: alphabet.clone(),
            vertices: vec!["*".to_string()],
            edges,
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize, Symbol)] {
        &self.edges
    }

    pub fn is_graph_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Deterministic dump: vertices pre-listed, one line per edge.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "vertices {}", self.vertices.len()).unwrap();
        for v in &self.vertices {
            writeln!(out, "vertex {v}").unwrap();
        }
        for &(s, t, l) in &self.edges {
            writeln!(
                out,
                "{} -> {} : {}",
                self.vertices[s],
                self.vertices[t],
                self.alphabet.token(l)
            )
            .unwrap();
        }
        out
    }

    fn out_edges(&self) -> Vec<Vec<(usize, Symbol)>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for &(s, t, l) in &self.edges {
            out[s].push((t, l));
        }
        out
    }
}

/// Keep exactly the vertices lying on a bi-infinite path (a path from some
/// cycle to some cycle). Idempotent.
pub fn trim(g: &LabeledGraph) -> LabeledGraph {
    let n = g.vertices.len();
    let mut alive: Vec<bool> = vec![true; n];
    // Iteratively delete vertices with no outgoing or no incoming live edge.
    loop {
        let mut outdeg = vec![0usize; n];
        let mut indeg = vec![0usize; n];
        for &(s, t, _) in &g.edges {
            if alive[s] && alive[t] {
                outdeg[s] += 1;
                indeg[t] += 1;
            }
        }
        let mut changed = false;
        for v in 0..n {
            if alive[v] && (outdeg[v] == 0 || indeg[v] == 0) {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut remap = vec![usize::MAX; n];
    let mut vertices = Vec::new();
    for v in 0..n {
        if alive[v] {
            remap[v] = vertices.len();
            vertices.push(g.vertices[v].clone());
        }
    }
    let edges = g
        .edges
        .iter()
        .filter(|&&(s, t, _)| alive[s] && alive[t])
        .map(|&(s, t, l)| (remap[s], remap[t], l))
        .collect();
    LabeledGraph::new(g.alphabet.clone(), vertices, edges).expect("trim preserves validity")
}

/// De Bruijn-style presentation of a 1D tile set. Single-cell forbidden
/// patterns are applied as an alphabet restriction first so the word length
/// `m` is at least 2; vertices are the admissible words of length `m-1`.
pub fn sft_to_graph(ts: &TileSet) -> Result<LabeledGraph> {
    if ts.dim() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "sft_to_graph requires dim 1, got {}",
            ts.dim()
        )));
    }
    let alphabet = ts.alphabet().clone();

    // Partition forbidden patterns into single-cell (alphabet restriction)
    // and longer ones, normalized to start at 0.
    let mut banned_letters: HashSet<Symbol> = HashSet::new();
    let mut words: Vec<Pattern> = Vec::new();
    let mut m: i64 = 2;
    for p in ts.forbidden().iter() {
        let b = p.support_box();
        let diam = b.side(0);
        if diam == 1 {
            banned_letters.insert(p.cells()[0].1);
        } else {
            m = m.max(diam);
            words.push(p.translate(&crate::geom::Point::new(vec![-b.lo().0[0]]))?);
        }
    }
    let letters: Vec<Symbol> = alphabet
        .symbols()
        .filter(|s| !banned_letters.contains(s))
        .collect();
    if letters.is_empty() {
        return Ok(LabeledGraph::empty(alphabet));
    }

    let k = (m - 1) as usize;
    // All words of length k over the allowed letters, in lexicographic order.
    let mut verts: Vec<Vec<Symbol>> = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::with_capacity(verts.len() * letters.len());
        for w in &verts {
            for &a in &letters {
                let mut w2 = w.clone();
                w2.push(a);
                next.push(w2);
            }
        }
        verts = next;
    }

    let word_ok = |w: &[Symbol]| -> bool {
        // No forbidden word occurs fully inside w.
        for f in &words {
            let flen = f.support_box().side(0) as usize;
            if flen > w.len() {
                continue;
            }
            'pos: for start in 0..=(w.len() - flen) {
                for (p, s) in f.cells() {
                    let off = p.0[0] as usize;
                    if w[start + off] != *s {
                        continue 'pos;
                    }
                }
                return false;
            }
        }
        true
    };

    let keep: Vec<Vec<Symbol>> = verts.into_iter().filter(|w| word_ok(w)).collect();
    let index: HashMap<Vec<Symbol>, usize> = keep
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();
    let names: Vec<String> = keep
        .iter()
        .map(|w| {
            w.iter()
                .map(|s| alphabet.token(*s))
                .collect::<Vec<_>>()
                .join("")
        })
        .collect();

    let mut edges = Vec::new();
    for (i, w) in keep.iter().enumerate() {
        for &a in &letters {
            let mut ext = w.clone();
            ext.push(a);
            if !word_ok(&ext) {
                continue;
            }
            let succ: Vec<Symbol> = ext[1..].to_vec();
            if let Some(&j) = index.get(&succ) {
                edges.push((i, j, a));
            }
        }
    }
    Ok(trim(&LabeledGraph::new(alphabet, names, edges)?))
}

/// Synchronized product over a shared alphabet: presents the intersection of
/// the two presented subshifts.
pub fn intersect(g1: &LabeledGraph, g2: &LabeledGraph) -> Result<LabeledGraph> {
    if g1.alphabet != g2.alphabet {
        return Err(Error::AlphabetMismatch(
            "intersection requires one alphabet".into(),
        ));
    }
    product_impl(g1, g2, None)
}

/// Pair-label product: presents the product subshift over the product
/// alphabet.
pub fn graph_product(g1: &LabeledGraph, g2: &LabeledGraph) -> LabeledGraph {
    let prod = Alphabet::product(
        &format!("{}x{}", g1.alphabet.name(), g2.alphabet.name()),
        &[g1.alphabet.clone(), g2.alphabet.clone()],
    );
    product_impl(g1, g2, Some(prod)).expect("pair product cannot mismatch")
}

fn product_impl(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    pair_alphabet: Option<Arc<Alphabet>>,
) -> Result<LabeledGraph> {
    let n2 = g2.vertices.len();
    let mut vertices = Vec::with_capacity(g1.vertices.len() * n2);
    for v1 in &g1.vertices {
        for v2 in &g2.vertices {
            vertices.push(format!("{v1},{v2}"));
        }
    }
    let mut edges = Vec::new();
    for &(s1, t1, l1) in &g1.edges {
        for &(s2, t2, l2) in &g2.edges {
            match &pair_alphabet {
                None => {
                    if l1 == l2 {
                        edges.push((s1 * n2 + s2, t1 * n2 + t2, l1));
                    }
                }
                Some(p) => {
                    edges.push((s1 * n2 + s2, t1 * n2 + t2, p.pair(l1, l2)));
                }
            }
        }
    }
    let alphabet = pair_alphabet.unwrap_or_else(|| g1.alphabet.clone());
    Ok(trim(&LabeledGraph::new(alphabet, vertices, edges)?))
}

/// Relabel edges through a letter-to-letter map.
pub fn graph_letter_image(
    g: &LabeledGraph,
    target: Arc<Alphabet>,
    map: &dyn Fn(Symbol) -> Symbol,
) -> Result<LabeledGraph> {
    let edges = g.edges.iter().map(|&(s, t, l)| (s, t, map(l))).collect();
    Ok(trim(&LabeledGraph::new(target, g.vertices.clone(), edges)?))
}

/// Image presentation through a sliding block code with a 1D neighborhood.
/// Vertices of the image graph are paths of `span-1` consecutive edges; an
/// edge corresponds to a window of `span` consecutive source letters and is
/// labeled by the code applied to that window.
pub fn graph_factor(
    g: &LabeledGraph,
    neighborhood: &[i64],
    target: Arc<Alphabet>,
    local: &dyn Fn(&[Symbol]) -> Symbol,
) -> Result<LabeledGraph> {
    let min = *neighborhood.iter().min().ok_or(Error::EmptySupport)?;
    let max = *neighborhood.iter().max().unwrap();
    let span = (max - min + 1) as usize;

    if span == 1 {
        return graph_letter_image(g, target, &|l| local(&[l]));
    }

    // Vertices: sequences of span-1 consecutive edges in g.
    let mut paths: Vec<Vec<usize>> = g.edges.iter().enumerate().map(|(i, _)| vec![i]).collect();
    for _ in 0..span.saturating_sub(2) {
        let mut next = Vec::new();
        for p in &paths {
            let last = p.last().copied().unwrap();
            let (_, t, _) = g.edges[last];
            for (j, &(s, _, _)) in g.edges.iter().enumerate() {
                if s == t {
                    let mut p2 = p.clone();
                    p2.push(j);
                    next.push(p2);
                }
            }
        }
        paths = next;
    }
    if paths.len() > SUBSET_STATE_CAP {
        return Err(Error::ResourceLimit(format!(
            "block presentation has {} states",
            paths.len()
        )));
    }
    let index: HashMap<Vec<usize>, usize> = paths
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();
    let names: Vec<String> = paths
        .iter()
        .map(|p| {
            p.iter()
                .map(|&e| format!("e{e}"))
                .collect::<Vec<_>>()
                .join(".")
        })
        .collect();

    let mut edges = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        let last = p.last().copied().unwrap();
        let (_, t, _) = g.edges[last];
        for (j, &(s, _, _)) in g.edges.iter().enumerate() {
            if s != t {
                continue;
            }
            // Window of span edges: p followed by j.
            let mut window_syms = Vec::with_capacity(span);
            for &e in p.iter() {
                window_syms.push(g.edges[e].2);
            }
            window_syms.push(g.edges[j].2);
            // The code reads the symbols at its neighborhood offsets.
            let args: Vec<Symbol> = neighborhood
                .iter()
                .map(|&u| window_syms[(u - min) as usize])
                .collect();
            let label = local(&args);
            let mut succ = p[1..].to_vec();
            succ.push(j);
            if let Some(&k) = index.get(&succ) {
                edges.push((i, k, label));
            }
        }
    }
    Ok(trim(&LabeledGraph::new(target, names, edges)?))
}

/// The set of label words of length `n` along paths, deduplicated, as 1D
/// patterns on `[0, n-1]`. The graph should be trimmed.
pub fn exact_language(g: &LabeledGraph, n: usize) -> Result<PatternSet> {
    assert!(n >= 1);
    let out_edges = g.out_edges();
    let all: Vec<usize> = (0..g.vertices.len()).collect();
    let mut seen_subsets: HashSet<Vec<usize>> = HashSet::new();
    let mut words: Vec<Vec<Symbol>> = Vec::new();
    let mut stack: Vec<(Vec<usize>, Vec<Symbol>)> = vec![(all, Vec::new())];
    while let Some((subset, word)) = stack.pop() {
        if word.len() == n {
            words.push(word);
            continue;
        }
        // Group successors by label.
        let mut by_label: HashMap<Symbol, Vec<usize>> = HashMap::new();
        for &v in &subset {
            for &(t, l) in &out_edges[v] {
                by_label.entry(l).or_default().push(t);
            }
        }
        let mut labels: Vec<Symbol> = by_label.keys().copied().collect();
        labels.sort();
        for l in labels {
            let mut next = by_label.remove(&l).unwrap();
            next.sort_unstable();
            next.dedup();
            if seen_subsets.len() > SUBSET_STATE_CAP {
                return Err(Error::ResourceLimit(format!(
                    "subset determinization exceeded {SUBSET_STATE_CAP} states"
                )));
            }
            seen_subsets.insert(next.clone());
            let mut w2 = word.clone();
            w2.push(l);
            stack.push((next, w2));
        }
    }
    let pats: Result<Vec<Pattern>> = words
        .iter()
        .map(|w| Pattern::word(g.alphabet.clone(), w))
        .collect();
    PatternSet::new(1, g.alphabet.clone(), pats?)
}

/// Exact count of distinct words of each length `1..=n_max`, via a lazily
/// built subset automaton and big-integer dynamic programming.
pub fn word_counts(g: &LabeledGraph, n_max: usize) -> Result<Vec<BigUint>> {
    let out_edges = g.out_edges();
    // Build the subset automaton reachable from the full set.
    let mut states: Vec<Vec<usize>> = Vec::new();
    let mut idx: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut trans: Vec<Vec<usize>> = Vec::new(); // successor state ids per state
    let start: Vec<usize> = (0..g.vertices.len()).collect();
    idx.insert(start.clone(), 0);
    states.push(start);
    let mut frontier = vec![0usize];
    while let Some(si) = frontier.pop() {
        let subset = states[si].clone();
        let mut by_label: HashMap<Symbol, Vec<usize>> = HashMap::new();
        for &v in &subset {
            for &(t, l) in &out_edges[v] {
                by_label.entry(l).or_default().push(t);
            }
        }
        let mut succs = Vec::new();
        for (_, mut next) in by_label {
            next.sort_unstable();
            next.dedup();
            let id = match idx.get(&next) {
                Some(&id) => id,
                None => {
                    if states.len() >= SUBSET_STATE_CAP {
                        return Err(Error::ResourceLimit(format!(
                            "subset determinization exceeded {SUBSET_STATE_CAP} states"
                        )));
                    }
                    let id = states.len();
                    idx.insert(next.clone(), id);
                    states.push(next);
                    trans.push(Vec::new());
                    frontier.push(id);
                    id
                }
            };
            succs.push(id);
        }
        while trans.len() <= si {
            trans.push(Vec::new());
        }
        trans[si] = succs;
    }
    while trans.len() < states.len() {
        trans.push(Vec::new());
    }

    // counts[s] = number of words of the current length readable from s.
    let mut counts: Vec<BigUint> = vec![BigUint::from(1u32); states.len()];
    let mut out = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        let mut next: Vec<BigUint> = vec![BigUint::zero(); states.len()];
        for s in 0..states.len() {
            let mut acc = BigUint::zero();
            for &t in &trans[s] {
                acc += &counts[t];
            }
            next[s] = acc;
        }
        counts = next;
        out.push(counts[0].clone());
    }
    Ok(out)
}
