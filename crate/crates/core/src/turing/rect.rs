//! Machine dynamics inside a framework rectangle.
//!
//! Cells carry a product symbol: three border bits (vertical line,
//! bottom line, entry mark) and a space-time cell. The rules are
//! translation-invariant patterns anchored on the bits, so one tile set
//! expresses position-dependent behavior once the bit layers are pinned to
//! the rectangle geometry:
//!
//! - interior columns follow the free-plane step rules;
//! - the line column is the leftmost tape cell: a head stepping off it
//!   freezes (the step does not fire and the head is dropped);
//! - the column left of the next line column is the rightmost tape cell,
//!   frozen symmetrically; the neighboring line column is opaque;
//! - the bottom row spells a head on the first entry letter, entry letters
//!   up to the first entry mark, blanks beyond;
//! - the initial state appears at bottom-left corners and only there;
//! - two heads within three columns of one rectangle are forbidden.
//!
//! The box for one rectangle is `[0, width] x [0, height-1]`: it includes
//! the line column of the neighboring rectangle so that right-edge rules
//! can anchor on it. That column's upper cells are outside every rule and
//! are pinned by the harness.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::geom::{BoxRegion, Point};
use crate::pattern::{Pattern, PatternSet};
use crate::solver::{MaskedPattern, MaskedProblem};
use crate::substitution::Rectangle;

use super::compile::free_successor;
use super::run::{run, RunStatus};
use super::{Move, SpaceTime, TuringMachine};

/// Alphabet of one rectangle cell: three border bits and a space-time cell.
pub fn rect_alphabet(st: &SpaceTime) -> Arc<Alphabet> {
    let w5 = Alphabet::new("vline", &[".", "L"]).unwrap();
    let w3 = Alphabet::new("bline", &[".", "B"]).unwrap();
    let w2 = Alphabet::new("emark", &[".", "M"]).unwrap();
    Alphabet::product("rect-cells", &[w5, w3, w2, st.alphabet.clone()])
}

fn sym(alphabet: &Arc<Alphabet>, line: bool, bottom: bool, mark: bool, o: Symbol) -> Symbol {
    alphabet.from_atom_parts(&[
        Symbol(line as u32),
        Symbol(bottom as u32),
        Symbol(mark as u32),
        o,
    ])
}

struct Geometry {
    width: i64,
    height: i64,
    entry: i64,
}

impl Geometry {
    fn of(rect: &Rectangle) -> Geometry {
        Geometry {
            width: rect.width,
            height: rect.height,
            entry: rect.entry_len,
        }
    }

    fn line(&self, col: i64) -> bool {
        col == 0 || col == self.width
    }

    fn bottom(&self, row: i64) -> bool {
        row == 0
    }

    fn mark(&self, col: i64) -> bool {
        col.rem_euclid(self.entry) == 0
    }
}

/// The box holding one rectangle plus the neighboring line column.
pub fn rectangle_region(rect: &Rectangle) -> BoxRegion {
    BoxRegion::new(
        Point::new(vec![0, 0]),
        Point::new(vec![rect.width, rect.height - 1]),
    )
    .expect("rectangle sides are positive")
}

/// Cell-by-cell domain restriction fixing the border bits to the rectangle
/// geometry while leaving the space-time component free.
pub fn rectangle_domains(
    tm: &TuringMachine,
    rect: &Rectangle,
) -> BTreeMap<Point, Vec<Symbol>> {
    let st = tm.spacetime_alphabet();
    let alphabet = rect_alphabet(&st);
    let geo = Geometry::of(rect);
    let mut out = BTreeMap::new();
    for p in rectangle_region(rect).points() {
        let (c, r) = (p.0[0], p.0[1]);
        let domain: Vec<Symbol> = (0..st.len() as u32)
            .map(|o| sym(&alphabet, geo.line(c), geo.bottom(r), geo.mark(c), Symbol(o)))
            .collect();
        out.insert(p, domain);
    }
    out
}

/// Pins for a deterministic filling: the whole bottom row (head on the
/// first entry letter, the entry word, blanks beyond) and the neighboring
/// line column (a fresh corner head at its base, plain copies above).
pub fn rectangle_pins(
    tm: &TuringMachine,
    rect: &Rectangle,
    input: &[usize],
) -> Result<BTreeMap<Point, Symbol>> {
    if input.len() as i64 != rect.entry_len {
        return Err(Error::Validation(format!(
            "rectangle input must have length {}, got {}",
            rect.entry_len,
            input.len()
        )));
    }
    let st = tm.spacetime_alphabet();
    let alphabet = rect_alphabet(&st);
    let geo = Geometry::of(rect);
    let mut pins = BTreeMap::new();
    for c in 0..=geo.width {
        let o = if c == 0 || c == geo.width {
            st.head(tm.initial(), input[0])
        } else if c < geo.entry {
            st.plain(input[c as usize])
        } else {
            st.plain(tm.blank())
        };
        pins.insert(
            Point::new(vec![c, 0]),
            sym(&alphabet, geo.line(c), true, geo.mark(c), o),
        );
    }
    for r in 1..geo.height {
        pins.insert(
            Point::new(vec![geo.width, r]),
            sym(
                &alphabet,
                true,
                false,
                geo.mark(geo.width),
                st.plain(input[0]),
            ),
        );
    }
    Ok(pins)
}

/// Full border-aware tile set for one rectangle shape.
pub fn rectangle_conditions(tm: &TuringMachine, rect: &Rectangle) -> Result<crate::TileSet> {
    if rect.entry_len > rect.width {
        return Err(Error::EntryExceedsWidth {
            entry: rect.entry_len as u64,
            width: rect.width as u64,
        });
    }
    let st = tm.spacetime_alphabet();
    let alphabet = rect_alphabet(&st);
    let geo = Geometry::of(rect);
    let n = st.len() as u32;
    let mut forbidden: Vec<Pattern> = Vec::new();

    let pat = |cells: Vec<(i64, i64, Symbol)>| -> Pattern {
        Pattern::new(
            2,
            alphabet.clone(),
            cells
                .into_iter()
                .map(|(x, y, s)| (Point::new(vec![x, y]), s))
                .collect(),
        )
        .expect("rule supports are valid")
    };

    let rows = [true, false]; // bottom row and interior rows both occur

    // Interior successor rules: above columns 1..=width-2.
    let mut interior_contexts: Vec<(bool, bool, bool, bool)> = Vec::new();
    for c in 1..=geo.width - 2 {
        let ctx = (
            geo.line(c - 1),
            geo.mark(c - 1),
            geo.mark(c),
            geo.mark(c + 1),
        );
        if !interior_contexts.contains(&ctx) {
            interior_contexts.push(ctx);
        }
    }
    for &(l1, m1, m2, m3) in &interior_contexts {
        for &bottom in &rows {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let (z1, z2, z3) = (Symbol(a), Symbol(b), Symbol(c));
                        let heads = [z1, z2, z3].iter().filter(|&&s| st.is_head(s)).count();
                        if heads >= 2 {
                            continue; // excluded by the head-spacing rules
                        }
                        let succ = free_successor(tm, &st, z1, z2, z3)
                            .expect("single-head triples have a successor");
                        for top in 0..n {
                            if top == succ.0 {
                                continue;
                            }
                            forbidden.push(pat(vec![
                                (-1, 0, sym(&alphabet, l1, bottom, m1, z1)),
                                (0, 0, sym(&alphabet, false, bottom, m2, z2)),
                                (1, 0, sym(&alphabet, false, bottom, m3, z3)),
                                (0, 1, sym(&alphabet, false, false, m2, Symbol(top))),
                            ]));
                        }
                    }
                }
            }
        }
    }

    // Left-edge successor rules: above the line column.
    let m_col1 = geo.mark(1);
    for &bottom in &rows {
        for a in 0..n {
            for b in 0..n {
                let (z1, z2) = (Symbol(a), Symbol(b));
                if st.is_head(z1) && st.is_head(z2) {
                    continue;
                }
                let succ = left_edge_successor(tm, &st, z1, z2);
                for top in 0..n {
                    if top == succ.0 {
                        continue;
                    }
                    forbidden.push(pat(vec![
                        (0, 0, sym(&alphabet, true, bottom, true, z1)),
                        (1, 0, sym(&alphabet, false, bottom, m_col1, z2)),
                        (0, 1, sym(&alphabet, true, false, true, Symbol(top))),
                    ]));
                }
            }
        }
    }

    // Right-edge successor rules: above the column left of the next line;
    // the line cell itself anchors the rule and its content is opaque.
    let (m_w2, m_w1, m_w) = (
        geo.mark(geo.width - 2),
        geo.mark(geo.width - 1),
        geo.mark(geo.width),
    );
    for &bottom in &rows {
        for a in 0..n {
            for b in 0..n {
                let (z1, z2) = (Symbol(a), Symbol(b));
                if st.is_head(z1) && st.is_head(z2) {
                    continue;
                }
                let succ = right_edge_successor(tm, &st, z1, z2);
                for opaque in 0..n {
                    for top in 0..n {
                        if top == succ.0 {
                            continue;
                        }
                        forbidden.push(pat(vec![
                            (-1, 0, sym(&alphabet, false, bottom, m_w2, z1)),
                            (0, 0, sym(&alphabet, false, bottom, m_w1, z2)),
                            (1, 0, sym(&alphabet, true, bottom, m_w, Symbol(opaque))),
                            (0, 1, sym(&alphabet, false, false, m_w1, Symbol(top))),
                        ]));
                    }
                }
            }
        }
    }

    // Head spacing: no two heads within three columns of one rectangle.
    let mut adj_contexts: Vec<(bool, bool, bool)> = Vec::new();
    let mut gap_contexts: Vec<(bool, bool, bool, bool)> = Vec::new();
    for c in 0..geo.width {
        if !geo.line(c + 1) {
            let ctx = (geo.line(c), geo.mark(c), geo.mark(c + 1));
            if !adj_contexts.contains(&ctx) {
                adj_contexts.push(ctx);
            }
        }
        if c + 2 <= geo.width && !geo.line(c + 1) && !geo.line(c + 2) {
            let ctx = (
                geo.line(c),
                geo.mark(c),
                geo.mark(c + 1),
                geo.mark(c + 2),
            );
            if !gap_contexts.contains(&ctx) {
                gap_contexts.push(ctx);
            }
        }
    }
    let heads: Vec<Symbol> = (0..n).map(Symbol).filter(|&s| st.is_head(s)).collect();
    for &bottom in &rows {
        for &(l1, m1, m2) in &adj_contexts {
            for &h1 in &heads {
                for &h2 in &heads {
                    forbidden.push(pat(vec![
                        (0, 0, sym(&alphabet, l1, bottom, m1, h1)),
                        (1, 0, sym(&alphabet, false, bottom, m2, h2)),
                    ]));
                }
            }
        }
        for &(l1, m1, m2, m3) in &gap_contexts {
            for &h1 in &heads {
                for &h2 in &heads {
                    for mid in 0..n {
                        if st.is_head(Symbol(mid)) {
                            continue; // adjacent-pair rules already apply
                        }
                        forbidden.push(pat(vec![
                            (0, 0, sym(&alphabet, l1, bottom, m1, h1)),
                            (1, 0, sym(&alphabet, false, bottom, m2, Symbol(mid))),
                            (2, 0, sym(&alphabet, false, bottom, m3, h2)),
                        ]));
                    }
                }
            }
        }
    }

    // Bottom row: corners hold the initial head on an entry letter.
    let corner_allowed: Vec<Symbol> = tm
        .input_symbols()
        .iter()
        .map(|&s| st.head(tm.initial(), s))
        .collect();
    for mark in [true, false] {
        // Column 0 is marked; the far line column is not (width is a power
        // of 5, the entry period a power of 2), but both variants cost one
        // loop.
        for o in 0..n {
            if corner_allowed.contains(&Symbol(o)) {
                continue;
            }
            forbidden.push(pat(vec![(0, 0, sym(&alphabet, true, true, mark, Symbol(o)))]));
        }
    }

    // Bottom row, non-corner cells: plain entry letters or blanks; a marked
    // cell must be blank.
    let blank = st.plain(tm.blank());
    for mark in [true, false] {
        for o in 0..n {
            let o = Symbol(o);
            let (q, s) = st.unpack(o);
            let allowed = if mark {
                q.is_none() && s == tm.blank()
            } else {
                q.is_none() && (s == tm.blank() || tm.input_symbols().contains(&s))
            };
            if !allowed {
                forbidden.push(pat(vec![(0, 0, sym(&alphabet, false, true, mark, o))]));
            }
        }
    }

    // Blanks are final on the bottom row: no entry letter after a blank,
    // and a blank may start only at a marked cell.
    let entry_plains: Vec<Symbol> = tm
        .input_symbols()
        .iter()
        .map(|&s| st.plain(s))
        .collect();
    let mut pair_contexts: Vec<(bool, bool, bool)> = Vec::new();
    for c in 1..geo.width - 1 {
        let ctx = (geo.mark(c), geo.mark(c + 1), geo.line(c + 1));
        if !pair_contexts.contains(&ctx) && !geo.line(c) {
            pair_contexts.push(ctx);
        }
    }
    for &(m1, m2, l2) in &pair_contexts {
        if l2 {
            continue;
        }
        for &a in &entry_plains {
            // blank then entry letter
            forbidden.push(pat(vec![
                (0, 0, sym(&alphabet, false, true, m1, blank)),
                (1, 0, sym(&alphabet, false, true, m2, a)),
            ]));
            // entry letter then blank at an unmarked cell
            if !m2 {
                forbidden.push(pat(vec![
                    (0, 0, sym(&alphabet, false, true, m1, a)),
                    (1, 0, sym(&alphabet, false, true, m2, blank)),
                ]));
            }
        }
    }
    // Blank directly after the corner head at an unmarked cell.
    if !geo.mark(1) {
        for &h in &corner_allowed {
            forbidden.push(pat(vec![
                (0, 0, sym(&alphabet, true, true, true, h)),
                (1, 0, sym(&alphabet, false, true, false, blank)),
            ]));
        }
    }

    // The initial state appears only on bottom-left corners.
    let initial_heads: Vec<Symbol> = (0..st.tape_size())
        .map(|s| st.head(tm.initial(), s))
        .collect();
    for line in [true, false] {
        for mark in [true, false] {
            for &h in &initial_heads {
                // rows above the bottom
                forbidden.push(pat(vec![(0, 0, sym(&alphabet, line, false, mark, h))]));
            }
        }
    }

    let forbidden = PatternSet::new(2, alphabet.clone(), forbidden)?;
    crate::TileSet::new(
        &format!("{}-rect{}x{}e{}", tm.name, rect.width, rect.height, rect.entry_len),
        alphabet,
        2,
        forbidden,
    )
}

pub(crate) fn left_edge_successor_pub(
    tm: &TuringMachine,
    st: &SpaceTime,
    z1: Symbol,
    z2: Symbol,
) -> Symbol {
    left_edge_successor(tm, st, z1, z2)
}

fn left_edge_successor(
    tm: &TuringMachine,
    st: &SpaceTime,
    z1: Symbol,
    z2: Symbol,
) -> Symbol {
    let (q1, s1) = st.unpack(z1);
    let (q2, s2) = st.unpack(z2);
    if let Some(q) = q1 {
        if tm.is_final(q) {
            return z1; // halted head persists
        }
        let (qn, w, mv) = tm.rule(q, s1).expect("total table");
        return match mv {
            Move::Left => z1, // stepping off the rectangle: frozen in place
            Move::Stay => st.head(qn, w),
            Move::Right => st.plain(w),
        };
    }
    if let Some(q) = q2 {
        if !tm.is_final(q) {
            let (qn, _, mv) = tm.rule(q, s2).expect("total table");
            if mv == Move::Left {
                return st.head(qn, s1);
            }
        }
    }
    st.plain(s1)
}

fn right_edge_successor(
    tm: &TuringMachine,
    st: &SpaceTime,
    z1: Symbol,
    z2: Symbol,
) -> Symbol {
    let (q1, s1) = st.unpack(z1);
    let (q2, s2) = st.unpack(z2);
    if let Some(q) = q2 {
        if tm.is_final(q) {
            return z2; // halted head persists
        }
        let (qn, w, mv) = tm.rule(q, s2).expect("total table");
        return match mv {
            Move::Right => z2, // stepping off the rectangle: frozen in place
            Move::Stay => st.head(qn, w),
            Move::Left => st.plain(w),
        };
    }
    if let Some(q) = q1 {
        if !tm.is_final(q) {
            let (qn, _, mv) = tm.rule(q, s1).expect("total table");
            if mv == Move::Right {
                return st.head(qn, s2);
            }
        }
    }
    st.plain(s2)
}

/// The filling a simulation predicts: the windowed run truncated to the
/// rectangle height, frozen rows (head dropped) after a halt or stop, and
/// the pinned neighboring line column.
pub fn expected_rectangle_filling(
    tm: &TuringMachine,
    rect: &Rectangle,
    input: &[usize],
) -> Result<Pattern> {
    if input.len() as i64 != rect.entry_len {
        return Err(Error::Validation(format!(
            "rectangle input must have length {}, got {}",
            rect.entry_len,
            input.len()
        )));
    }
    let st = tm.spacetime_alphabet();
    let alphabet = rect_alphabet(&st);
    let geo = Geometry::of(rect);
    let h = geo.height as usize;
    let (diagram, status) = run(tm, input, h - 1, geo.width as usize)?;
    let mut rows: Vec<Vec<Symbol>> = diagram.rows().to_vec();
    if rows.len() < h {
        debug_assert!(matches!(
            status,
            RunStatus::Halted | RunStatus::OutOfSpace
        ));
        // Halted and stopped heads persist: the frozen configuration
        // repeats verbatim to the rectangle top.
        let frozen = rows.last().unwrap().clone();
        while rows.len() < h {
            rows.push(frozen.clone());
        }
    }
    let mut cells = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        for (c, &o) in row.iter().enumerate() {
            cells.push((
                Point::new(vec![c as i64, r as i64]),
                sym(
                    &alphabet,
                    geo.line(c as i64),
                    geo.bottom(r as i64),
                    geo.mark(c as i64),
                    o,
                ),
            ));
        }
    }
    // Neighboring line column.
    for r in 0..geo.height {
        let o = if r == 0 {
            st.head(tm.initial(), input[0])
        } else {
            st.plain(input[0])
        };
        cells.push((
            Point::new(vec![geo.width, r]),
            sym(&alphabet, true, geo.bottom(r), geo.mark(geo.width), o),
        ));
    }
    Pattern::new(2, alphabet, cells)
}

/// Result of the solver-versus-simulator cross-check on one rectangle.
#[derive(Clone, Debug)]
pub struct RectCheck {
    pub fillings_found: usize,
    pub truncated: bool,
    pub matches: bool,
}

/// Solve the rectangle with the entry pinned and compare against the
/// simulator's expected filling.
pub fn rect_cross_check(
    tm: &TuringMachine,
    rect: &Rectangle,
    input: &[usize],
) -> Result<RectCheck> {
    let ts = rectangle_conditions(tm, rect)?;
    let region = rectangle_region(rect);
    let pins = rectangle_pins(tm, rect, input)?;
    let domains = rectangle_domains(tm, rect);
    let atom_count = ts.alphabet().atom_count();
    let problem = MaskedProblem {
        alphabet: ts.alphabet().clone(),
        dim: 2,
        region,
        pins,
        domains,
        limit: Some(2),
        patterns: ts
            .forbidden()
            .iter()
            .map(|p| MaskedPattern::exact(p, atom_count))
            .collect(),
    };
    let e = problem.enumerate();
    let expected = expected_rectangle_filling(tm, rect, input)?;
    let matches = e.patterns.len() == 1 && e.patterns[0] == expected;
    Ok(RectCheck {
        fillings_found: e.patterns.len(),
        truncated: e.truncated,
        matches,
    })
}
