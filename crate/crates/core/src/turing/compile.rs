//! Compilation of machine behavior to forbidden patterns on the free plane.
//!
//! A rule step is local: the cell above a tape cell is determined by the
//! cell itself and its two horizontal neighbors. Compilation therefore
//! forbids every pattern with support `{(0,0),(1,0),(2,0),(1,1)}` whose top
//! cell differs from the legal successor of the bottom triple; triples
//! carrying two or more heads are forbidden under every top cell.

use crate::alphabet::Symbol;
use crate::error::Result;
use crate::geom::Point;
use crate::pattern::{Pattern, PatternSet};
use crate::solver::violations;
use crate::tileset::TileSet;

use super::run::SpaceTimeDiagram;
use super::{Move, SpaceTime, TuringMachine};

/// Legal successor of a bottom triple on the free plane (no borders): the
/// machine's step if a head is involved, a plain copy otherwise. `None`
/// when the triple carries two or more heads.
pub(crate) fn free_successor(
    tm: &TuringMachine,
    st: &SpaceTime,
    z1: Symbol,
    z2: Symbol,
    z3: Symbol,
) -> Option<Symbol> {
    let heads = [z1, z2, z3]
        .iter()
        .filter(|&&c| st.is_head(c))
        .count();
    if heads >= 2 {
        return None;
    }
    let (q1, s1) = st.unpack(z1);
    let (q2, s2) = st.unpack(z2);
    let (q3, s3) = st.unpack(z3);
    if let Some(q) = q2 {
        if tm.is_final(q) {
            // A halted head persists: the content is copied out and the
            // marker stays, so a final row differing from the row above it
            // is a violation.
            return Some(z2);
        }
        let (q2n, w, mv) = tm.rule(q, s2).expect("total table");
        return Some(match mv {
            Move::Stay => st.head(q2n, w),
            Move::Left | Move::Right => st.plain(w),
        });
    }
    if let Some(q) = q1 {
        if !tm.is_final(q) {
            let (qn, _, mv) = tm.rule(q, s1).expect("total table");
            if mv == Move::Right {
                return Some(st.head(qn, s2));
            }
        }
        return Some(st.plain(s2));
    }
    if let Some(q) = q3 {
        if !tm.is_final(q) {
            let (qn, _, mv) = tm.rule(q, s3).expect("total table");
            if mv == Move::Left {
                return Some(st.head(qn, s2));
            }
        }
        return Some(st.plain(s2));
    }
    Some(st.plain(s2))
}

/// Compile a machine to the 2D tile set over its space-time alphabet: time
/// runs upward, the tape runs rightward.
pub fn compile_machine(tm: &TuringMachine) -> Result<TileSet> {
    let st = tm.spacetime_alphabet();
    let n = st.len() as u32;
    let mut forbidden = Vec::new();
    let support = [
        Point::new(vec![0, 0]),
        Point::new(vec![1, 0]),
        Point::new(vec![2, 0]),
        Point::new(vec![1, 1]),
    ];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let succ = free_successor(tm, &st, Symbol(a), Symbol(b), Symbol(c));
                for top in 0..n {
                    let bad = match succ {
                        Some(s) => s.0 != top,
                        None => true,
                    };
                    if bad {
                        forbidden.push(Pattern::new(
                            2,
                            st.alphabet.clone(),
                            vec![
                                (support[0].clone(), Symbol(a)),
                                (support[1].clone(), Symbol(b)),
                                (support[2].clone(), Symbol(c)),
                                (support[3].clone(), Symbol(top)),
                            ],
                        )?);
                    }
                }
            }
        }
    }
    let forbidden = PatternSet::new(2, st.alphabet.clone(), forbidden)?;
    TileSet::new(&format!("{}-steps", tm.name), st.alphabet, 2, forbidden)
}

/// All placements of the tile set's forbidden patterns matching inside the
/// diagram; empty exactly when the diagram is locally admissible.
pub fn check_diagram(
    ts: &TileSet,
    diagram: &SpaceTimeDiagram,
) -> Result<Vec<(usize, Point)>> {
    violations(ts, &diagram.to_pattern())
}
