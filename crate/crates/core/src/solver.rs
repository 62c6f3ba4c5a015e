//! Finite-region constraint engine.
//!
//! Enumerates, counts or finds locally admissible total assignments of a box
//! for a tile set, with optional pinned cells. "Locally admissible" means no
//! forbidden pattern occurs with its support fully inside the box; placements
//! that only partially overlap the box are not enforced.
//!
//! Search runs over the cells in scan order. Forbidden patterns are grouped
//! by support shape, each shape anchored at its scan-maximal cell, so that
//! when a cell is assigned every placement ending at that cell is checked
//! with one hash lookup per shape. Enumerations are therefore produced in
//! canonical (lexicographic along scan order) order and are deterministic.
//!
//! Internally constraints may test only some atom components of a product
//! alphabet (used when composing terms over layered alphabets); a plain tile
//! set compiles to constraints that test every atom.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::geom::{BoxRegion, Point};
use crate::pattern::Pattern;
use crate::tileset::TileSet;

/// Default cap on materialized enumeration results.
pub const DEFAULT_LIMIT: usize = 1 << 20;

/// A finite-region problem: fill `region` over `tileset`'s alphabet,
/// extending `pins`, avoiding fully-contained forbidden patterns.
#[derive(Clone, Debug)]
pub struct RegionProblem {
    pub tileset: TileSet,
    pub region: BoxRegion,
    pub pins: BTreeMap<Point, Symbol>,
    pub limit: Option<usize>,
}

impl RegionProblem {
    pub fn new(tileset: TileSet, region: BoxRegion) -> Result<Self> {
        if tileset.dim() != region.dim() {
            return Err(Error::DimensionMismatch(format!(
                "tile set dim {} vs region dim {}",
                tileset.dim(),
                region.dim()
            )));
        }
        Ok(RegionProblem {
            tileset,
            region,
            pins: BTreeMap::new(),
            limit: None,
        })
    }

    pub fn with_pins(mut self, pins: BTreeMap<Point, Symbol>) -> Result<Self> {
        for (p, s) in &pins {
            if !self.region.contains(p) {
                return Err(Error::PointOutside(format!("pin at {p:?} outside region")));
            }
            if !self.tileset.alphabet().contains(*s) {
                return Err(Error::InvalidSymbol(format!("pin symbol id {}", s.0)));
            }
        }
        self.pins = pins;
        Ok(self)
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = Some(limit);
        self
    }

    fn masked(&self) -> MaskedProblem {
        let atom_count = self.tileset.alphabet().atom_count();
        let patterns = self
            .tileset
            .forbidden()
            .iter()
            .map(|p| MaskedPattern::exact(p, atom_count))
            .collect();
        MaskedProblem {
            alphabet: self.tileset.alphabet().clone(),
            dim: self.tileset.dim(),
            region: self.region.clone(),
            pins: self.pins.clone(),
            domains: BTreeMap::new(),
            limit: self.limit,
            patterns,
        }
    }
}

/// Result of an enumeration; `truncated` is set when the limit was reached.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub patterns: Vec<Pattern>,
    pub truncated: bool,
}

/// A forbidden condition that constrains, at each support cell, some atom
/// components of the symbol there. A fully specified cell lists every atom.
#[derive(Clone, Debug)]
pub struct MaskedPattern {
    // (cell, [(atom index, required atom value)]), cells sorted in scan order.
    pub cells: Vec<(Point, Vec<(usize, u32)>)>,
}

impl MaskedPattern {
    pub fn new(mut cells: Vec<(Point, Vec<(usize, u32)>)>) -> Self {
        cells.sort_by(|a, b| a.0.cmp(&b.0));
        for (_, slots) in &mut cells {
            slots.sort_by_key(|(i, _)| *i);
        }
        MaskedPattern { cells }
    }

    /// Full-atom condition equivalent to an exact forbidden pattern.
    pub fn exact(p: &Pattern, atom_count: usize) -> Self {
        let alphabet = p.alphabet();
        let cells = p
            .cells()
            .iter()
            .map(|(pt, s)| {
                let parts = alphabet.atom_parts(*s);
                debug_assert_eq!(parts.len(), atom_count);
                let slots = parts
                    .iter()
                    .enumerate()
                    .map(|(i, a)| (i, a.0))
                    .collect();
                (pt.clone(), slots)
            })
            .collect();
        MaskedPattern::new(cells)
    }

    /// Shift every atom index by `offset` (lifting into a larger product).
    pub fn shift_atoms(&self, offset: usize) -> Self {
        MaskedPattern {
            cells: self
                .cells
                .iter()
                .map(|(p, slots)| {
                    (
                        p.clone(),
                        slots.iter().map(|(i, v)| (i + offset, *v)).collect(),
                    )
                })
                .collect(),
        }
    }

    /// Apply a point transformation to every cell (e.g. basis embedding).
    pub fn map_points(&self, f: &dyn Fn(&Point) -> Point) -> Self {
        MaskedPattern::new(
            self.cells
                .iter()
                .map(|(p, slots)| (f(p), slots.clone()))
                .collect(),
        )
    }
}

/// A constraint problem over an arbitrary (possibly product) alphabet with
/// masked forbidden conditions. This is the engine behind [`RegionProblem`]
/// and behind term-window evaluation.
#[derive(Clone, Debug)]
pub struct MaskedProblem {
    pub alphabet: Arc<Alphabet>,
    pub dim: usize,
    pub region: BoxRegion,
    pub pins: BTreeMap<Point, Symbol>,
    /// Optional per-cell domain restriction (cells absent here range over
    /// the whole alphabet). Pins take precedence.
    pub domains: BTreeMap<Point, Vec<Symbol>>,
    pub limit: Option<usize>,
    pub patterns: Vec<MaskedPattern>,
}

struct Shape {
    rel: Vec<Point>,
    // atom slots per cell, parallel to rel
    slots: Vec<Vec<usize>>,
    forbidden: HashSet<Vec<u32>>,
}

/// Order in which the search assigns cells. Enumeration must be canonical
/// (scan order); pure satisfiability queries assign constrained cells first
/// so a conflict with the pins surfaces before free regions are explored.
#[derive(Clone, Copy, PartialEq, Eq)]
enum CellOrder {
    Canonical,
    ConstrainedFirst,
}

struct Search<'a> {
    problem: &'a MaskedProblem,
    // cells in assignment order
    cells: Vec<Point>,
    shapes: Vec<Shape>,
    // per assignment rank: placements completed by that assignment, as
    // (shape index, ranks of the shape's support cells).
    watches: Vec<Vec<(usize, Vec<usize>)>>,
    domain: Vec<Vec<Symbol>>,
    // atom decomposition per symbol
    parts: Vec<Vec<u32>>,
}

impl<'a> Search<'a> {
    fn build(problem: &'a MaskedProblem, order: CellOrder) -> Search<'a> {
        let scan_cells = problem.region.points();

        // Assignment order: canonical scan, or pinned/restricted cells (in
        // scan order) followed by the rest sorted by distance to them.
        let cells: Vec<Point> = match order {
            CellOrder::Canonical => scan_cells.clone(),
            CellOrder::ConstrainedFirst => {
                let constrained: Vec<Point> = scan_cells
                    .iter()
                    .filter(|p| problem.pins.contains_key(p) || problem.domains.contains_key(p))
                    .cloned()
                    .collect();
                if constrained.is_empty() || constrained.len() == scan_cells.len() {
                    scan_cells.clone()
                } else {
                    let dist = |p: &Point| -> i64 {
                        constrained
                            .iter()
                            .map(|q| {
                                p.0.iter()
                                    .zip(&q.0)
                                    .map(|(a, b)| (a - b).abs())
                                    .sum::<i64>()
                            })
                            .min()
                            .unwrap()
                    };
                    let mut rest: Vec<Point> = scan_cells
                        .iter()
                        .filter(|p| {
                            !problem.pins.contains_key(p) && !problem.domains.contains_key(p)
                        })
                        .cloned()
                        .collect();
                    rest.sort_by_key(|p| (dist(p), p.clone()));
                    let mut all = constrained;
                    all.extend(rest);
                    all
                }
            }
        };
        let rank_of: HashMap<Point, usize> =
            cells.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();

        let mut shape_ids: HashMap<(Vec<Point>, Vec<Vec<usize>>), usize> = HashMap::new();
        let mut shapes: Vec<Shape> = Vec::new();
        for mp in &problem.patterns {
            let anchor = mp.cells.last().expect("non-empty condition").0.clone();
            let rel: Vec<Point> = mp.cells.iter().map(|(p, _)| p.sub(&anchor)).collect();
            let slots: Vec<Vec<usize>> = mp
                .cells
                .iter()
                .map(|(_, sl)| sl.iter().map(|(i, _)| *i).collect())
                .collect();
            let values: Vec<u32> = mp
                .cells
                .iter()
                .flat_map(|(_, sl)| sl.iter().map(|(_, v)| *v))
                .collect();
            let key = (rel.clone(), slots.clone());
            let id = *shape_ids.entry(key).or_insert_with(|| {
                shapes.push(Shape {
                    rel,
                    slots,
                    forbidden: HashSet::new(),
                });
                shapes.len() - 1
            });
            shapes[id].forbidden.insert(values);
        }

        // Every placement of every shape fully inside the region, watched by
        // the support cell assigned last.
        let mut watches: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); cells.len()];
        for anchor in &scan_cells {
            for (si, shape) in shapes.iter().enumerate() {
                let mut ranks = Vec::with_capacity(shape.rel.len());
                let mut fits = true;
                for r in &shape.rel {
                    match rank_of.get(&anchor.add(r)) {
                        Some(&i) => ranks.push(i),
                        None => {
                            fits = false;
                            break;
                        }
                    }
                }
                if fits {
                    let last = *ranks.iter().max().unwrap();
                    watches[last].push((si, ranks));
                }
            }
        }

        let full: Vec<Symbol> = problem.alphabet.symbols().collect();
        let domain: Vec<Vec<Symbol>> = cells
            .iter()
            .map(|p| match problem.pins.get(p) {
                Some(s) => vec![*s],
                None => match problem.domains.get(p) {
                    Some(d) => d.clone(),
                    None => full.clone(),
                },
            })
            .collect();

        let parts: Vec<Vec<u32>> = problem
            .alphabet
            .symbols()
            .map(|s| {
                problem
                    .alphabet
                    .atom_parts(s)
                    .iter()
                    .map(|a| a.0)
                    .collect()
            })
            .collect();

        Search {
            problem,
            cells,
            shapes,
            watches,
            domain,
            parts,
        }
    }

    fn run<F: FnMut(&[Symbol]) -> bool>(&self, mut on_solution: F) {
        let n = self.cells.len();
        if n == 0 {
            return;
        }
        let mut assigned: Vec<Symbol> = vec![Symbol(0); n];
        let mut choice: Vec<usize> = vec![0; n];
        let mut depth = 0usize;
        let mut key_buf: Vec<u32> = Vec::with_capacity(16);

        'outer: loop {
            if depth == n {
                if !on_solution(&assigned) {
                    return;
                }
                loop {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                    choice[depth] += 1;
                    if choice[depth] < self.domain[depth].len() {
                        break;
                    }
                }
                continue 'outer;
            }

            let mut k = choice[depth];
            'cand: while k < self.domain[depth].len() {
                let sym = self.domain[depth][k];
                assigned[depth] = sym;
                for (si, ranks) in &self.watches[depth] {
                    let shape = &self.shapes[*si];
                    key_buf.clear();
                    for (cell_pos, qi) in ranks.iter().enumerate() {
                        debug_assert!(*qi <= depth);
                        let sym_parts = &self.parts[assigned[*qi].0 as usize];
                        for &slot in &shape.slots[cell_pos] {
                            key_buf.push(sym_parts[slot]);
                        }
                    }
                    if shape.forbidden.contains(key_buf.as_slice()) {
                        k += 1;
                        continue 'cand;
                    }
                }
                choice[depth] = k;
                depth += 1;
                if depth < n {
                    choice[depth] = 0;
                }
                continue 'outer;
            }

            loop {
                if depth == 0 {
                    return;
                }
                depth -= 1;
                choice[depth] += 1;
                if choice[depth] < self.domain[depth].len() {
                    break;
                }
            }
        }
    }

    fn assignment_pattern(&self, assigned: &[Symbol]) -> Pattern {
        let mut cells: Vec<(Point, Symbol)> = self
            .cells
            .iter()
            .cloned()
            .zip(assigned.iter().copied())
            .collect();
        cells.sort_by(|a, b| a.0.cmp(&b.0));
        Pattern::new(self.problem.dim, self.problem.alphabet.clone(), cells)
            .expect("total assignment is a valid pattern")
    }
}

impl MaskedProblem {
    pub fn enumerate(&self) -> Enumeration {
        let search = Search::build(self, CellOrder::Canonical);
        let limit = self.limit.unwrap_or(DEFAULT_LIMIT);
        let mut out = Vec::new();
        let mut truncated = false;
        search.run(|assigned| {
            if out.len() == limit {
                truncated = true;
                return false;
            }
            out.push(search.assignment_pattern(assigned));
            true
        });
        Enumeration {
            patterns: out,
            truncated,
        }
    }

    pub fn count(&self) -> BigUint {
        let search = Search::build(self, CellOrder::Canonical);
        let mut count = BigUint::zero();
        search.run(|_| {
            count += BigUint::one();
            true
        });
        count
    }

    pub fn find_one(&self) -> Option<Pattern> {
        let search = Search::build(self, CellOrder::Canonical);
        let mut found = None;
        search.run(|assigned| {
            found = Some(search.assignment_pattern(assigned));
            false
        });
        found
    }

    pub fn satisfiable(&self) -> bool {
        let search = Search::build(self, CellOrder::ConstrainedFirst);
        let mut sat = false;
        search.run(|_| {
            sat = true;
            false
        });
        sat
    }
}

/// All admissible total assignments in canonical order, truncated at the
/// problem limit (default [`DEFAULT_LIMIT`]) with an explicit flag.
pub fn enumerate_admissible(problem: &RegionProblem) -> Enumeration {
    problem.masked().enumerate()
}

/// Exact count of admissible assignments without materializing them.
pub fn count_admissible(problem: &RegionProblem) -> BigUint {
    problem.masked().count()
}

/// The canonically first admissible assignment, if one exists.
pub fn find_one(problem: &RegionProblem) -> Option<Pattern> {
    problem.masked().find_one()
}

/// Whether any admissible assignment exists.
pub fn satisfiable(problem: &RegionProblem) -> bool {
    problem.masked().satisfiable()
}

/// List all placements of forbidden patterns fully inside the assignment's
/// support that match it; used for diagram checking.
pub fn violations(tileset: &TileSet, assignment: &Pattern) -> Result<Vec<(usize, Point)>> {
    if *assignment.alphabet() != *tileset.alphabet() {
        return Err(Error::AlphabetMismatch(format!(
            "assignment over {}, tile set over {}",
            assignment.alphabet().name(),
            tileset.alphabet().name()
        )));
    }
    let mut out = Vec::new();
    for (pi, pat) in tileset.forbidden().iter().enumerate() {
        for v in pat.occurrences_in(assignment)? {
            out.push((pi, v));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::pattern::PatternSet;
    use std::sync::Arc;

    fn bin() -> Arc<Alphabet> {
        Alphabet::new("bin", &["0", "1"]).unwrap()
    }

    fn golden_mean() -> TileSet {
        TileSet::forbid_words("golden", bin(), &["1 1"]).unwrap()
    }

    /// Tile set forbidding adjacent 1s horizontally and vertically in 2D.
    fn hard_square() -> TileSet {
        let a = bin();
        let one = a.lookup("1").unwrap();
        let h = Pattern::new(
            2,
            a.clone(),
            vec![
                (Point::new(vec![0, 0]), one),
                (Point::new(vec![1, 0]), one),
            ],
        )
        .unwrap();
        let v = Pattern::new(
            2,
            a.clone(),
            vec![
                (Point::new(vec![0, 0]), one),
                (Point::new(vec![0, 1]), one),
            ],
        )
        .unwrap();
        let forbidden = PatternSet::new(2, a.clone(), vec![h, v]).unwrap();
        TileSet::new("hard-square", a, 2, forbidden).unwrap()
    }

    #[test]
    fn hard_square_2x2_has_seven() {
        let rp = RegionProblem::new(hard_square(), BoxRegion::grid(2, 2)).unwrap();
        let e = enumerate_admissible(&rp);
        assert_eq!(e.patterns.len(), 7);
        assert!(!e.truncated);
        assert_eq!(count_admissible(&rp), BigUint::from(7u32));
    }

    #[test]
    fn free_tileset_counts_alphabet_power() {
        let a = bin();
        let ts = TileSet::free("free", a, 2);
        let rp = RegionProblem::new(ts, BoxRegion::grid(2, 3)).unwrap();
        assert_eq!(count_admissible(&rp), BigUint::from(64u32));
    }

    #[test]
    fn golden_mean_length_4_counts_8() {
        let rp = RegionProblem::new(golden_mean(), BoxRegion::line(4)).unwrap();
        assert_eq!(count_admissible(&rp), BigUint::from(8u32));
    }

    #[test]
    fn contradictory_pin_is_empty() {
        let a = bin();
        let one = a.lookup("1").unwrap();
        let forbid_one = PatternSet::new(
            1,
            a.clone(),
            vec![Pattern::cell(a.clone(), Point::new(vec![0]), one).unwrap()],
        )
        .unwrap();
        let ts = TileSet::new("no-ones", a.clone(), 1, forbid_one).unwrap();
        let rp = RegionProblem::new(ts, BoxRegion::line(3))
            .unwrap()
            .with_pins([(Point::new(vec![1]), one)].into())
            .unwrap();
        assert!(find_one(&rp).is_none());
        assert_eq!(count_admissible(&rp), BigUint::zero());
    }

    #[test]
    fn find_one_is_first_of_enumeration() {
        let rp = RegionProblem::new(hard_square(), BoxRegion::grid(3, 2)).unwrap();
        let e = enumerate_admissible(&rp);
        assert_eq!(find_one(&rp).as_ref(), e.patterns.first());
        // Full shift: the all-first-symbol assignment comes first.
        let free = RegionProblem::new(TileSet::free("f", bin(), 1), BoxRegion::line(3)).unwrap();
        let first = find_one(&free).unwrap();
        assert!(first.cells().iter().all(|(_, s)| *s == Symbol(0)));
    }

    #[test]
    fn pins_fully_determined_count_one() {
        let a = bin();
        let zero = a.lookup("0").unwrap();
        let rp = RegionProblem::new(golden_mean(), BoxRegion::line(2))
            .unwrap()
            .with_pins(
                [
                    (Point::new(vec![0]), zero),
                    (Point::new(vec![1]), zero),
                ]
                .into(),
            )
            .unwrap();
        assert_eq!(count_admissible(&rp), BigUint::one());
    }

    #[test]
    fn limit_sets_truncation_flag() {
        let a = bin();
        let ts = TileSet::free("free", a, 1);
        let rp = RegionProblem::new(ts, BoxRegion::line(4))
            .unwrap()
            .with_limit(3);
        let e = enumerate_admissible(&rp);
        assert_eq!(e.patterns.len(), 3);
        assert!(e.truncated);
    }

    #[test]
    fn masked_constraint_tests_single_component() {
        // Product alphabet (bin x bin); forbid left-component 1 at a single
        // cell regardless of the right component.
        let a = bin();
        let prod = Alphabet::product("p", &[a.clone(), a.clone()]);
        let mp = MaskedProblem {
            alphabet: prod.clone(),
            dim: 1,
            region: BoxRegion::line(2),
            pins: BTreeMap::new(),
            domains: BTreeMap::new(),
            limit: None,
            patterns: vec![MaskedPattern::new(vec![(
                Point::new(vec![0]),
                vec![(0, 1)],
            )])],
        };
        let e = mp.enumerate();
        // Left component forced to 0 at both cells: 1 * 2 choices each.
        assert_eq!(e.patterns.len(), 4);
        for p in &e.patterns {
            for (_, s) in p.cells() {
                assert_eq!(prod.atom_parts(*s)[0].0, 0);
            }
        }
    }

    #[test]
    fn naive_oracle_agreement_small_random() {
        // Oracle check on random 2D tile sets built from one or two patterns
        // within a 2x2 support over a binary alphabet, on a 3x3 box.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let a = bin();
        let support = BoxRegion::grid(2, 2);
        let support_pts = support.points();
        for _ in 0..40 {
            let mut pats = Vec::new();
            for _ in 0..rng.gen_range(1..=2) {
                let mut pts = support_pts.clone();
                while pts.len() > rng.gen_range(2..=4) {
                    let i = rng.gen_range(0..pts.len());
                    pts.remove(i);
                }
                let cells: Vec<(Point, Symbol)> = pts
                    .iter()
                    .map(|p| (p.clone(), Symbol(rng.gen_range(0..2))))
                    .collect();
                pats.push(Pattern::new(2, a.clone(), cells).unwrap());
            }
            let forbidden = PatternSet::new(2, a.clone(), pats).unwrap();
            let ts = TileSet::new("rand", a.clone(), 2, forbidden).unwrap();
            let region = BoxRegion::grid(3, 3);
            let rp = RegionProblem::new(ts.clone(), region.clone()).unwrap();
            let got: Vec<Pattern> = enumerate_admissible(&rp).patterns;

            let pts = region.points();
            let mut expect = Vec::new();
            for mask in 0u32..(1 << 9) {
                let cells: Vec<(Point, Symbol)> = pts
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (p.clone(), Symbol((mask >> i) & 1)))
                    .collect();
                let pat = Pattern::new(2, a.clone(), cells).unwrap();
                let mut ok = true;
                for f in ts.forbidden().iter() {
                    if f.occurs_in(&pat).unwrap() {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    expect.push(pat);
                }
            }
            expect.sort_by(|x, y| x.canonical_cmp(y));
            assert_eq!(got, expect);
        }
    }
}
