//! Lowering sub-action-free terms to a single constraint system.
//!
//! Every term built without sub-action denotes the image of one constraint
//! system over a composite (layered) alphabet under one sliding block code:
//! products juxtapose layers, finite type pulls patterns back through the
//! code, factors compose codes, and superposition embeds supports along the
//! chosen basis. Window evaluation then reduces to the finite-region engine.
//!
//! Lowering declines (returns `None`) when a construction would exceed the
//! size guards or when a sub-action node is present; evaluation falls back
//! to structural recursion in that case.

use std::sync::Arc;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::Result;
use crate::geom::Point;
use crate::pattern::Pattern;
use crate::solver::MaskedPattern;

use super::{SlidingBlockCode, SubshiftTerm, TermNode};

/// Cap on pullback enumerations (assignments of a pattern's code preimage).
const PULLBACK_CAP: usize = 1 << 16;

#[derive(Clone, Debug)]
pub(crate) struct Lowered {
    pub alphabet: Arc<Alphabet>,
    pub dim: usize,
    pub constraints: Vec<MaskedPattern>,
    pub code: SlidingBlockCode,
}

pub(crate) fn lower(t: &SubshiftTerm) -> Result<Option<Lowered>> {
    match t.node() {
        TermNode::FullShift => Ok(Some(Lowered {
            alphabet: t.alphabet().clone(),
            dim: t.dim(),
            constraints: Vec::new(),
            code: SlidingBlockCode::identity(t.alphabet().clone(), t.dim()),
        })),
        TermNode::Sft(ts) => {
            let atom_count = ts.alphabet().atom_count();
            let constraints = ts
                .forbidden()
                .iter()
                .map(|p| MaskedPattern::exact(p, atom_count))
                .collect();
            Ok(Some(Lowered {
                alphabet: ts.alphabet().clone(),
                dim: ts.dim(),
                constraints,
                code: SlidingBlockCode::identity(ts.alphabet().clone(), ts.dim()),
            }))
        }
        TermNode::FiniteType(extra, inner) => {
            let Some(mut l) = lower(inner)? else {
                return Ok(None);
            };
            if l.code.is_identity() {
                let atom_count = l.alphabet.atom_count();
                for p in extra.iter() {
                    l.constraints.push(MaskedPattern::exact(p, atom_count));
                }
                return Ok(Some(l));
            }
            // Pull each forbidden pattern back through the code: forbid every
            // assignment of the pattern's code preimage whose image matches.
            for p in extra.iter() {
                match pullback(p, &l)? {
                    Some(mut pulled) => l.constraints.append(&mut pulled),
                    None => return Ok(None),
                }
            }
            Ok(Some(l))
        }
        TermNode::Product(a, b) => {
            let Some(la) = lower(a)? else { return Ok(None) };
            let Some(lb) = lower(b)? else { return Ok(None) };
            let alphabet = Alphabet::product(
                &format!("{}x{}", la.alphabet.name(), lb.alphabet.name()),
                &[la.alphabet.clone(), lb.alphabet.clone()],
            );
            let left_atoms = la.alphabet.atom_count();
            let mut constraints = la.constraints.clone();
            for c in &lb.constraints {
                constraints.push(c.shift_atoms(left_atoms));
            }
            let code = match SlidingBlockCode::pair(
                &la.code,
                &lb.code,
                alphabet.clone(),
                t.alphabet().clone(),
            ) {
                Ok(c) => c,
                Err(_) => return Ok(None),
            };
            Ok(Some(Lowered {
                alphabet,
                dim: t.dim(),
                constraints,
                code,
            }))
        }
        TermNode::Factor(code, inner) => {
            let Some(l) = lower(inner)? else { return Ok(None) };
            let composed = match code.compose(&l.code) {
                Ok(c) => c,
                Err(_) => return Ok(None),
            };
            Ok(Some(Lowered {
                alphabet: l.alphabet,
                dim: l.dim,
                constraints: l.constraints,
                code: composed,
            }))
        }
        TermNode::Superposition(g, _g2, inner) => {
            let Some(l) = lower(inner)? else { return Ok(None) };
            let dim = t.dim();
            let embed = |p: &Point| g.embed(p);
            let constraints = l
                .constraints
                .iter()
                .map(|c| c.map_points(&embed))
                .collect();
            let neighborhood: Vec<Point> =
                l.code.neighborhood().iter().map(|p| g.embed(p)).collect();
            let code = match SlidingBlockCode::from_fn(
                l.alphabet.clone(),
                l.code.target().clone(),
                dim,
                neighborhood.clone(),
                |args| {
                    // from_fn sorts and dedups the neighborhood; embedding is
                    // injective on the original offsets, and apply() receives
                    // arguments in the sorted embedded order. Recover the
                    // original order before applying.
                    let mut order: Vec<usize> = (0..neighborhood.len()).collect();
                    order.sort_by(|&i, &j| neighborhood[i].cmp(&neighborhood[j]));
                    let mut orig = vec![Symbol(0); neighborhood.len()];
                    for (sorted_pos, &orig_pos) in order.iter().enumerate() {
                        orig[orig_pos] = args[sorted_pos];
                    }
                    l.code.apply(&orig)
                },
            ) {
                Ok(c) => c,
                Err(_) => return Ok(None),
            };
            Ok(Some(Lowered {
                alphabet: l.alphabet,
                dim,
                constraints,
                code,
            }))
        }
        TermNode::SubAction(_, _) => Ok(None),
    }
}

/// All composite assignments of `p`'s code preimage whose image equals `p`,
/// as exact masked conditions. `None` when the enumeration would exceed the
/// cap.
fn pullback(p: &Pattern, l: &Lowered) -> Result<Option<Vec<MaskedPattern>>> {
    let u = l.code.neighborhood();
    // Preimage support: union over the pattern support of s + U.
    let mut points: Vec<Point> = Vec::new();
    for (s, _) in p.cells() {
        for off in u {
            points.push(s.add(off));
        }
    }
    points.sort();
    points.dedup();

    let c = l.alphabet.len();
    let count = match c.checked_pow(points.len() as u32) {
        Some(n) if n <= PULLBACK_CAP => n,
        _ => return Ok(None),
    };

    let atom_count = l.alphabet.atom_count();
    let mut out = Vec::new();
    let mut assignment = vec![Symbol(0); points.len()];
    for idx in 0..count {
        let mut rem = idx;
        for j in (0..points.len()).rev() {
            assignment[j] = Symbol((rem % c) as u32);
            rem /= c;
        }
        let matches = p.cells().iter().all(|(s, want)| {
            let args: Vec<Symbol> = u
                .iter()
                .map(|off| {
                    let q = s.add(off);
                    let pos = points.binary_search(&q).unwrap();
                    assignment[pos]
                })
                .collect();
            l.code.apply(&args) == *want
        });
        if matches {
            let cells: Vec<(Point, Symbol)> = points
                .iter()
                .cloned()
                .zip(assignment.iter().copied())
                .collect();
            let pat = Pattern::new(l.dim, l.alphabet.clone(), cells)
                .expect("pullback assignment is a valid pattern");
            out.push(MaskedPattern::exact(&pat, atom_count));
        }
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::PatternSet;
    use crate::term;
    use crate::tileset::TileSet;

    fn bin() -> Arc<Alphabet> {
        Alphabet::new("bin", &["0", "1"]).unwrap()
    }

    #[test]
    fn lower_product_layers_constraints() {
        let g = SubshiftTerm::sft(TileSet::forbid_words("g", bin(), &["1 1"]).unwrap());
        let p = term::product(g.clone(), g).unwrap();
        let l = lower(&p).unwrap().unwrap();
        assert_eq!(l.alphabet.len(), 4);
        assert_eq!(l.constraints.len(), 2);
        // Constraints test distinct atoms.
        let atoms0: Vec<usize> = l.constraints[0].cells[0]
            .1
            .iter()
            .map(|(i, _)| *i)
            .collect();
        let atoms1: Vec<usize> = l.constraints[1].cells[0]
            .1
            .iter()
            .map(|(i, _)| *i)
            .collect();
        assert_ne!(atoms0, atoms1);
    }

    #[test]
    fn lower_subaction_declines() {
        let g = SubshiftTerm::sft(TileSet::forbid_words("g", bin(), &["1 1"]).unwrap());
        let sa = term::sub_action(super::super::SubgroupBasis::standard(1), g);
        assert!(lower(&sa).unwrap().is_none());
    }

    #[test]
    fn pullback_through_letter_map() {
        // Forbid "b" in the image of golden mean under 0,1 -> a,b.
        let ab = Alphabet::new("ab", &["a", "b"]).unwrap();
        let g = SubshiftTerm::sft(TileSet::forbid_words("g", bin(), &["1 1"]).unwrap());
        let code =
            SlidingBlockCode::letterwise(bin(), ab.clone(), 1, |s| Symbol(s.0)).unwrap();
        let f = term::factor(code, g);
        let extra = PatternSet::new(
            1,
            ab.clone(),
            vec![Pattern::word_from_tokens(&ab, &["b"]).unwrap()],
        )
        .unwrap();
        let ft = term::finite_type(extra, f);
        let l = lower(&ft).unwrap().unwrap();
        // 1 original constraint + 1 pulled-back single-cell constraint.
        assert_eq!(l.constraints.len(), 2);
        assert_eq!(l.alphabet.len(), 2);
    }
}
