//! Finite-window semantics of terms.
//!
//! `upper_language` returns a superset of the true window language of the
//! denoted subshift: no truly extendable pattern is ever excluded, and the
//! result shrinks (weakly) as the margin grows. For one-dimensional terms
//! without sub-action the result is exact once the margin reaches
//! [`super::exactness_margin`].
//!
//! Terms that lower to one constraint system are evaluated by enumerating
//! admissible assignments on the window's code hull and, at positive margin,
//! keeping those that extend admissibly to the inflated hull. Terms with
//! sub-action nodes are evaluated by structural recursion.

use std::collections::BTreeMap;
use std::fmt;

use crate::alphabet::Symbol;
use crate::error::{Error, Result};
use crate::geom::{BoxRegion, Point};
use crate::pattern::{Pattern, PatternSet};
use crate::solver::{MaskedPattern, MaskedProblem, DEFAULT_LIMIT};

use super::{lower, unimodular_inverse, Lowered, SubshiftTerm, TermNode};

/// Sound upper approximation of the window language of `t`.
pub fn upper_language(t: &SubshiftTerm, window: &BoxRegion, margin: i64) -> Result<PatternSet> {
    if window.dim() != t.dim() {
        return Err(Error::DimensionMismatch(format!(
            "window dim {} vs term dim {}",
            window.dim(),
            t.dim()
        )));
    }
    eval(t, window, margin)
}

fn eval(t: &SubshiftTerm, window: &BoxRegion, margin: i64) -> Result<PatternSet> {
    if let Some(l) = lower(t)? {
        return eval_lowered(t, &l, window, margin);
    }
    match t.node() {
        TermNode::SubAction(basis, inner) => {
            let embedded: Vec<Point> = window.points().iter().map(|p| basis.embed(p)).collect();
            let ambient = BoxRegion::bounding(&embedded)?.inflate(margin);
            let inner_lang = eval(inner, &ambient, margin)?;
            let mut out = Vec::with_capacity(inner_lang.len());
            for q in inner_lang.iter() {
                let cells: Vec<(Point, Symbol)> = window
                    .points()
                    .iter()
                    .map(|w| {
                        let s = q.get(&basis.embed(w)).expect("embedded point inside box");
                        (w.clone(), s)
                    })
                    .collect();
                out.push(Pattern::new(t.dim(), t.alphabet().clone(), cells)?);
            }
            PatternSet::new(t.dim(), t.alphabet().clone(), out)
        }
        TermNode::FiniteType(extra, inner) => {
            let big = window.inflate(margin);
            let candidates = eval(inner, &big, margin)?;
            let mut kept = Vec::new();
            'cand: for q in candidates.iter() {
                for p in extra.iter() {
                    if p.occurs_in(q)? {
                        continue 'cand;
                    }
                }
                kept.push(q.restrict_to_box(window)?);
            }
            PatternSet::new(t.dim(), t.alphabet().clone(), kept)
        }
        TermNode::Product(a, b) => {
            let la = eval(a, window, margin)?;
            let lb = eval(b, window, margin)?;
            let alphabet = t.alphabet();
            let mut out = Vec::with_capacity(la.len() * lb.len());
            for qa in la.iter() {
                for qb in lb.iter() {
                    let cells: Vec<(Point, Symbol)> = window
                        .points()
                        .iter()
                        .map(|w| {
                            (
                                w.clone(),
                                alphabet.pair(qa.get(w).unwrap(), qb.get(w).unwrap()),
                            )
                        })
                        .collect();
                    out.push(Pattern::new(t.dim(), alphabet.clone(), cells)?);
                }
            }
            PatternSet::new(t.dim(), alphabet.clone(), out)
        }
        TermNode::Factor(code, inner) => {
            let hull = window.minkowski_hull(code.neighborhood());
            let src = eval(inner, &hull, margin)?;
            let mut out = Vec::with_capacity(src.len());
            for q in src.iter() {
                out.push(apply_code_on_window(code, q, window, t)?);
            }
            PatternSet::new(t.dim(), t.alphabet().clone(), out)
        }
        TermNode::Superposition(g, g2, inner) => {
            eval_superposition_slicewise(t, g, g2, inner, window, margin)
        }
        // Full shifts, tile sets and their finite-type extensions always
        // lower; reaching here means lowering declined for size reasons.
        _ => Err(Error::ResourceLimit(
            "term too large to lower and has no structural fallback".into(),
        )),
    }
}

fn apply_code_on_window(
    code: &super::SlidingBlockCode,
    source_pattern: &Pattern,
    window: &BoxRegion,
    t: &SubshiftTerm,
) -> Result<Pattern> {
    let cells: Vec<(Point, Symbol)> = window
        .points()
        .iter()
        .map(|w| {
            let args: Vec<Symbol> = code
                .neighborhood()
                .iter()
                .map(|u| {
                    source_pattern
                        .get(&w.add(u))
                        .expect("hull covers the neighborhood")
                })
                .collect();
            (w.clone(), code.apply(&args))
        })
        .collect();
    Pattern::new(t.dim(), t.alphabet().clone(), cells)
}

fn eval_lowered(
    t: &SubshiftTerm,
    l: &Lowered,
    window: &BoxRegion,
    margin: i64,
) -> Result<PatternSet> {
    let identity = l.code.is_identity();
    let hull = if identity {
        window.clone()
    } else {
        window.minkowski_hull(l.code.neighborhood())
    };
    let problem = MaskedProblem {
        alphabet: l.alphabet.clone(),
        dim: l.dim,
        region: hull.clone(),
        pins: BTreeMap::new(),
        domains: BTreeMap::new(),
        limit: Some(DEFAULT_LIMIT),
        patterns: l.constraints.clone(),
    };
    let enumeration = problem.enumerate();
    if enumeration.truncated {
        return Err(Error::ResourceLimit(format!(
            "window language enumeration exceeded {DEFAULT_LIMIT} assignments"
        )));
    }
    let mut out = Vec::new();
    for cand in enumeration.patterns {
        if margin > 0 {
            let pins: BTreeMap<Point, Symbol> = cand
                .cells()
                .iter()
                .map(|(p, s)| (p.clone(), *s))
                .collect();
            let extended = MaskedProblem {
                alphabet: l.alphabet.clone(),
                dim: l.dim,
                region: hull.inflate(margin),
                pins,
                domains: BTreeMap::new(),
                limit: None,
                patterns: l.constraints.clone(),
            };
            if !extended.satisfiable() {
                continue;
            }
        }
        let img = if identity {
            cand
        } else {
            apply_code_on_window(&l.code, &cand, window, t)?
        };
        out.push(img);
    }
    PatternSet::new(t.dim(), t.alphabet().clone(), out)
}

fn eval_superposition_slicewise(
    t: &SubshiftTerm,
    g: &super::SubgroupBasis,
    g2: &super::SubgroupBasis,
    inner: &SubshiftTerm,
    window: &BoxRegion,
    margin: i64,
) -> Result<PatternSet> {
    let total = t.dim();
    let d = g.rank();
    // Column matrix [g | g2]; decompose each window point in that basis.
    let mut cols: Vec<Vec<i128>> = Vec::with_capacity(total);
    for v in g.vectors().iter().chain(g2.vectors()) {
        cols.push(v.0.iter().map(|&c| c as i128).collect());
    }
    // M has the basis vectors as columns: M[r][c] = cols[c][r].
    let m: Vec<Vec<i128>> = (0..total)
        .map(|r| (0..total).map(|c| cols[c][r]).collect())
        .collect();
    let inv = unimodular_inverse(&m).ok_or_else(|| {
        Error::Validation("superposition basis lost unimodularity".into())
    })?;

    // Group window points by their coset coordinates.
    let mut cosets: BTreeMap<Point, Vec<(Point, Point)>> = BTreeMap::new();
    for w in window.points() {
        let mut coeff = vec![0i64; total];
        for (r, c) in coeff.iter_mut().enumerate() {
            let mut acc = 0i128;
            for k in 0..total {
                acc += inv[r][k] * w.0[k] as i128;
            }
            *c = acc as i64;
        }
        let slice_coord = Point::new(coeff[..d].to_vec());
        let coset_id = Point::new(coeff[d..].to_vec());
        cosets.entry(coset_id).or_default().push((w, slice_coord));
    }

    // For each coset: admissible partial assignments on its window points.
    let mut per_coset: Vec<Vec<Vec<(Point, Symbol)>>> = Vec::new();
    for (_, pts) in cosets {
        let slice_coords: Vec<Point> = pts.iter().map(|(_, j)| j.clone()).collect();
        let slice_box = BoxRegion::bounding(&slice_coords)?;
        let lang = eval(inner, &slice_box, margin)?;
        let mut partials: Vec<Vec<(Point, Symbol)>> = Vec::new();
        let mut seen: Vec<Vec<Symbol>> = Vec::new();
        for q in lang.iter() {
            let vals: Vec<Symbol> = pts
                .iter()
                .map(|(_, j)| q.get(j).expect("slice box covers coordinates"))
                .collect();
            if seen.contains(&vals) {
                continue;
            }
            seen.push(vals.clone());
            partials.push(
                pts.iter()
                    .map(|(w, _)| w.clone())
                    .zip(vals)
                    .collect(),
            );
        }
        if partials.is_empty() {
            return Ok(PatternSet::empty(t.dim(), t.alphabet().clone()));
        }
        per_coset.push(partials);
    }

    // Cartesian assembly across cosets.
    let mut size: usize = 1;
    for p in &per_coset {
        size = size.saturating_mul(p.len());
        if size > DEFAULT_LIMIT {
            return Err(Error::ResourceLimit(
                "superposition window assembly exceeds the enumeration limit".into(),
            ));
        }
    }
    let mut acc: Vec<Vec<(Point, Symbol)>> = vec![Vec::new()];
    for partials in &per_coset {
        let mut next = Vec::with_capacity(acc.len() * partials.len());
        for base in &acc {
            for part in partials {
                let mut combined = base.clone();
                combined.extend(part.iter().cloned());
                next.push(combined);
            }
        }
        acc = next;
    }
    let mut out = Vec::with_capacity(acc.len());
    for cells in acc {
        out.push(Pattern::new(t.dim(), t.alphabet().clone(), cells)?);
    }
    PatternSet::new(t.dim(), t.alphabet().clone(), out)
}

/// Whether the window language upper approximation is non-empty, decided by
/// satisfiability without materializing the language.
pub fn window_language_nonempty(
    t: &SubshiftTerm,
    window: &BoxRegion,
    margin: i64,
) -> Result<bool> {
    if window.dim() != t.dim() {
        return Err(Error::DimensionMismatch(format!(
            "window dim {} vs term dim {}",
            window.dim(),
            t.dim()
        )));
    }
    if let Some(l) = lower(t)? {
        let hull = if l.code.is_identity() {
            window.clone()
        } else {
            window.minkowski_hull(l.code.neighborhood())
        };
        let problem = MaskedProblem {
            alphabet: l.alphabet.clone(),
            dim: l.dim,
            region: hull.inflate(margin),
            pins: BTreeMap::new(),
            domains: BTreeMap::new(),
            limit: None,
            patterns: l.constraints.clone(),
        };
        return Ok(problem.satisfiable());
    }
    Ok(!eval(t, window, margin)?.is_empty())
}

/// Membership of a window pattern in the upper approximation, decided by one
/// satisfiability query when the term lowers.
pub fn contains_window_pattern(t: &SubshiftTerm, pattern: &Pattern, margin: i64) -> Result<bool> {
    if pattern.dim() != t.dim() {
        return Err(Error::DimensionMismatch(
            "pattern dimension differs from term".into(),
        ));
    }
    if *pattern.alphabet() != *t.alphabet() {
        return Err(Error::AlphabetMismatch(
            "pattern alphabet differs from term".into(),
        ));
    }
    let window = pattern.support_box();
    if let Some(l) = lower(t)? {
        let hull = if l.code.is_identity() {
            window.clone()
        } else {
            window.minkowski_hull(l.code.neighborhood())
        };
        let mut constraints = l.constraints.clone();
        if l.code.is_identity() {
            // The pattern pins composite cells directly.
            let pins: BTreeMap<Point, Symbol> = pattern
                .cells()
                .iter()
                .map(|(p, s)| (p.clone(), *s))
                .collect();
            let problem = MaskedProblem {
                alphabet: l.alphabet.clone(),
                dim: l.dim,
                region: hull.inflate(margin),
                pins,
                domains: BTreeMap::new(),
                limit: None,
                patterns: constraints,
            };
            return Ok(problem.satisfiable());
        }
        // Forbid, at every pattern cell, the code preimages that disagree.
        let c = l.alphabet.len();
        let u = l.code.neighborhood();
        let count = match c.checked_pow(u.len() as u32) {
            Some(n) if n <= super::CODE_TABLE_CAP => n,
            _ => {
                return Ok(upper_language(t, &window, margin)?.contains(pattern));
            }
        };
        let atom_count = l.alphabet.atom_count();
        for (cell, want) in pattern.cells() {
            let points: Vec<Point> = u.iter().map(|off| cell.add(off)).collect();
            let mut assignment = vec![Symbol(0); u.len()];
            for idx in 0..count {
                let mut rem = idx;
                for j in (0..u.len()).rev() {
                    assignment[j] = Symbol((rem % c) as u32);
                    rem /= c;
                }
                if l.code.apply(&assignment) != *want {
                    let cells: Vec<(Point, Symbol)> = points
                        .iter()
                        .cloned()
                        .zip(assignment.iter().copied())
                        .collect();
                    let pat = Pattern::new(l.dim, l.alphabet.clone(), cells)?;
                    constraints.push(MaskedPattern::exact(&pat, atom_count));
                }
            }
        }
        let problem = MaskedProblem {
            alphabet: l.alphabet.clone(),
            dim: l.dim,
            region: hull.inflate(margin),
            pins: BTreeMap::new(),
            domains: BTreeMap::new(),
            limit: None,
            patterns: constraints,
        };
        return Ok(problem.satisfiable());
    }
    Ok(upper_language(t, &window, margin)?.contains(pattern))
}

/// A bounded sample of the upper window language: images of the first
/// composite solutions in canonical order. The flag reports whether the
/// underlying enumeration was truncated.
pub fn sample_window_patterns(
    t: &SubshiftTerm,
    window: &BoxRegion,
    margin: i64,
    limit: usize,
) -> Result<(Vec<Pattern>, bool)> {
    if let Some(l) = lower(t)? {
        let hull = if l.code.is_identity() {
            window.clone()
        } else {
            window.minkowski_hull(l.code.neighborhood())
        };
        let problem = MaskedProblem {
            alphabet: l.alphabet.clone(),
            dim: l.dim,
            region: hull.inflate(margin),
            pins: BTreeMap::new(),
            domains: BTreeMap::new(),
            limit: Some(limit),
            patterns: l.constraints.clone(),
        };
        let e = problem.enumerate();
        let mut out: Vec<Pattern> = Vec::new();
        for cand in &e.patterns {
            let restricted = cand.restrict_to_box(window)?;
            let img = if l.code.is_identity() {
                restricted
            } else {
                apply_code_on_window(&l.code, cand, window, t)?
            };
            if !out.contains(&img) {
                out.push(img);
            }
        }
        return Ok((out, e.truncated));
    }
    let lang = eval(t, window, margin)?;
    let truncated = lang.len() > limit;
    Ok((lang.iter().take(limit).cloned().collect(), truncated))
}

/// Per-window comparison entry of [`compare_window_languages`].
#[derive(Clone, Debug)]
pub struct ComparisonEntry {
    pub n: i64,
    pub count_left: usize,
    pub count_right: usize,
    pub equal: bool,
    /// A pattern present on exactly one side, with `true` meaning it came
    /// from the left language.
    pub first_difference: Option<(Pattern, bool)>,
}

/// Report of window-language agreement over a range of window sizes.
#[derive(Clone, Debug)]
pub struct LanguageComparison {
    pub entries: Vec<ComparisonEntry>,
}

impl LanguageComparison {
    pub fn all_equal(&self) -> bool {
        self.entries.iter().all(|e| e.equal)
    }

    pub fn first_disagreement(&self) -> Option<&ComparisonEntry> {
        self.entries.iter().find(|e| !e.equal)
    }
}

impl fmt::Display for LanguageComparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            if e.equal {
                writeln!(f, "n={}: equal ({} patterns)", e.n, e.count_left)?;
            } else {
                writeln!(
                    f,
                    "n={}: differ ({} vs {} patterns)",
                    e.n, e.count_left, e.count_right
                )?;
                if let Some((p, left)) = &e.first_difference {
                    writeln!(
                        f,
                        "  first difference ({} side): {p:?}",
                        if *left { "left" } else { "right" }
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// Compare upper window languages of two terms on the boxes `[0, n]^d` for
/// every `n <= n_max`.
pub fn compare_window_languages(
    t1: &SubshiftTerm,
    t2: &SubshiftTerm,
    n_max: i64,
    margin: i64,
) -> Result<LanguageComparison> {
    if t1.dim() != t2.dim() {
        return Err(Error::DimensionMismatch(format!(
            "comparison of dims {} and {}",
            t1.dim(),
            t2.dim()
        )));
    }
    if *t1.alphabet() != *t2.alphabet() {
        return Err(Error::AlphabetMismatch(
            "compared terms have different alphabets".into(),
        ));
    }
    let mut entries = Vec::new();
    for n in 0..=n_max {
        let window = BoxRegion::new(Point::zero(t1.dim()), Point::new(vec![n; t1.dim()]))?;
        let l1 = upper_language(t1, &window, margin)?;
        let l2 = upper_language(t2, &window, margin)?;
        let equal = l1 == l2;
        let first_difference = if equal {
            None
        } else {
            l1.first_not_in(&l2)
                .map(|p| (p.clone(), true))
                .or_else(|| l2.first_not_in(&l1).map(|p| (p.clone(), false)))
        };
        entries.push(ComparisonEntry {
            n,
            count_left: l1.len(),
            count_right: l2.len(),
            equal,
            first_difference,
        });
    }
    Ok(LanguageComparison { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::term::{self, SubgroupBasis, SubshiftTerm};
    use crate::tileset::TileSet;
    use std::sync::Arc;

    fn bin() -> Arc<Alphabet> {
        Alphabet::new("bin", &["0", "1"]).unwrap()
    }

    fn golden_term() -> SubshiftTerm {
        SubshiftTerm::sft(TileSet::forbid_words("g", bin(), &["1 1"]).unwrap())
    }

    #[test]
    fn full_shift_window_language_is_everything() {
        let t = SubshiftTerm::full_shift(bin(), 1);
        let l = upper_language(&t, &BoxRegion::line(3), 0).unwrap();
        assert_eq!(l.len(), 8);
    }

    #[test]
    fn golden_mean_window_counts() {
        let t = golden_term();
        for (n, want) in [(1, 2usize), (2, 3), (3, 5), (4, 8)] {
            let l = upper_language(&t, &BoxRegion::line(n), 1).unwrap();
            assert_eq!(l.len(), want);
        }
    }

    #[test]
    fn margin_monotone_on_golden_product() {
        let t = term::product(golden_term(), golden_term()).unwrap();
        let w = BoxRegion::line(3);
        let l0 = upper_language(&t, &w, 0).unwrap();
        let l1 = upper_language(&t, &w, 1).unwrap();
        let l2 = upper_language(&t, &w, 2).unwrap();
        assert!(l2.is_subset_of(&l1));
        assert!(l1.is_subset_of(&l0));
        // Product of golden means at window 3: 5 * 5 = 25 patterns.
        assert_eq!(l2.len(), 25);
    }

    #[test]
    fn finite_type_on_full_shift_equals_sft() {
        let forbid = TileSet::forbid_words("g", bin(), &["1 1"]).unwrap();
        let ft = term::finite_type(
            forbid.forbidden().clone(),
            SubshiftTerm::full_shift(bin(), 1),
        );
        let direct = SubshiftTerm::sft(forbid);
        let cmp = compare_window_languages(&ft, &direct, 5, 2).unwrap();
        assert!(cmp.all_equal(), "{cmp}");
    }

    #[test]
    fn golden_vs_full_shift_differ_at_window_two() {
        let cmp =
            compare_window_languages(&golden_term(), &SubshiftTerm::full_shift(bin(), 1), 3, 0)
                .unwrap();
        assert!(cmp.entries[0].equal);
        let e1 = &cmp.entries[1];
        assert!(!e1.equal);
        assert_eq!(e1.count_left, 3);
        assert_eq!(e1.count_right, 4);
    }

    #[test]
    fn subaction_spaced_basis_allows_close_ones() {
        // Sampling the golden mean along 2e1 makes "1 1" admissible.
        let basis = SubgroupBasis::new(1, vec![Point::new(vec![2])]).unwrap();
        let sa = term::sub_action(basis, golden_term());
        let l = upper_language(&sa, &BoxRegion::line(2), 1).unwrap();
        let ones = Pattern::word_from_tokens(&bin(), &["1", "1"]).unwrap();
        assert!(l.contains(&ones));
    }

    #[test]
    fn subaction_standard_basis_identity_language() {
        let sa = term::sub_action(SubgroupBasis::standard(1), golden_term());
        let cmp = compare_window_languages(&sa, &golden_term(), 4, 2).unwrap();
        assert!(cmp.all_equal(), "{cmp}");
    }

    #[test]
    fn superposition_of_rows_counts_squares() {
        // Rows constrained by the golden mean, columns free: on [0,1]^2 the
        // 3 admissible row-words pair freely: 9 patterns.
        let g = SubgroupBasis::axes(2, &[0]);
        let g2 = SubgroupBasis::axes(2, &[1]);
        let sp = term::superposition(g, g2, golden_term());
        assert!(sp.warning().is_none());
        let l = upper_language(&sp, &BoxRegion::grid(2, 2), 1).unwrap();
        assert_eq!(l.len(), 9);
    }

    #[test]
    fn identity_letter_factor_keeps_language() {
        let code = super::super::SlidingBlockCode::identity(bin(), 1);
        let f = term::factor(code, golden_term());
        let cmp = compare_window_languages(&f, &golden_term(), 4, 2).unwrap();
        assert!(cmp.all_equal(), "{cmp}");
    }

    #[test]
    fn xor_factor_window_language_matches_graph() {
        let ab = Alphabet::new("ab", &["a", "b"]).unwrap();
        let code = super::super::SlidingBlockCode::from_fn(
            bin(),
            ab.clone(),
            1,
            vec![Point::new(vec![0]), Point::new(vec![1])],
            |w| Symbol(w[0].0 ^ w[1].0),
        )
        .unwrap();
        let f = term::factor(code, golden_term());
        let margin = term::exactness_margin(&f).unwrap();
        let graph = term::term_graph(&f).unwrap();
        for n in 1..=5 {
            let upper = upper_language(&f, &BoxRegion::line(n), margin).unwrap();
            let exact = crate::onedim::exact_language(&graph, n as usize).unwrap();
            assert_eq!(upper, exact, "n={n}");
        }
    }

    #[test]
    fn contains_matches_materialized_language() {
        let t = term::product(golden_term(), golden_term()).unwrap();
        let w = BoxRegion::line(3);
        let lang = upper_language(&t, &w, 1).unwrap();
        for p in lang.iter() {
            assert!(contains_window_pattern(&t, p, 1).unwrap());
        }
        // A pattern with "1|1 1|1" adjacent must be excluded.
        let alphabet = t.alphabet().clone();
        let s11 = alphabet.lookup("1|1").unwrap();
        let bad = Pattern::word(alphabet.clone(), &[s11, s11, s11]).unwrap();
        assert!(!contains_window_pattern(&t, &bad, 1).unwrap());
    }

    #[test]
    fn nonempty_checks() {
        let t = golden_term();
        assert!(window_language_nonempty(&t, &BoxRegion::line(4), 2).unwrap());
        let a = bin();
        let all = PatternSet::new(
            1,
            a.clone(),
            vec![
                Pattern::word_from_tokens(&a, &["0"]).unwrap(),
                Pattern::word_from_tokens(&a, &["1"]).unwrap(),
            ],
        )
        .unwrap();
        let empty = term::finite_type(all, SubshiftTerm::full_shift(a, 1));
        assert!(!window_language_nonempty(&empty, &BoxRegion::line(2), 0).unwrap());
    }
}
