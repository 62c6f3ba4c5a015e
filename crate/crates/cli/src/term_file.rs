//! S-expression term files.
//!
//! ```text
//! (fullshift <dim> (alphabet tok ...))
//! (sft <dim> (alphabet tok ...) (forbid (pattern (cell c1 .. cd tok) ...) ...))
//! (product T T)
//! (finite-type (forbid ...) T)
//! (factor (code (target tok ...) (neighborhood (c ...) ...) (row tok ... tok) ...) T)
//! (sub-action (basis (c ...) ...) T)
//! (superpose (basis (c ...) ...) (basis (c ...) ...) T)
//! ```
//!
//! A factor's code rows list the source tokens read at the neighborhood
//! offsets followed by the output token; every combination must be listed.
//! Loading validates each node; serialization is canonical and reparses to
//! an identical tree.

use std::sync::Arc;

use tilings::term::{self, SlidingBlockCode, SubgroupBasis, SubshiftTerm, TermNode};
use tilings::{Alphabet, Error, Pattern, PatternSet, Point, Symbol, TileSet};

use crate::sexpr::{parse as parse_sexpr, Sexpr};

pub fn parse_term(text: &str) -> Result<SubshiftTerm, Error> {
    let e = parse_sexpr(text)?;
    build_term(&e)
}

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse {
        line: 0,
        msg: msg.into(),
    }
}

fn expect_head<'a>(e: &'a Sexpr, head: &str) -> Result<&'a [Sexpr], Error> {
    let items = e.as_list()?;
    if e.head()? != head {
        return Err(perr(format!("expected a {head} form, found {}", e.head()?)));
    }
    Ok(&items[1..])
}

fn parse_alphabet(e: &Sexpr) -> Result<Arc<Alphabet>, Error> {
    let items = expect_head(e, "alphabet")?;
    let tokens: Result<Vec<&str>, Error> = items.iter().map(|i| i.as_atom()).collect();
    Alphabet::new("term", &tokens?)
}

fn parse_point(e: &Sexpr) -> Result<Point, Error> {
    let items = e.as_list()?;
    let coords: Result<Vec<i64>, Error> = items
        .iter()
        .map(|i| {
            i.as_atom()?
                .parse::<i64>()
                .map_err(|_| perr("bad coordinate"))
        })
        .collect();
    Ok(Point::new(coords?))
}

fn parse_pattern(e: &Sexpr, dim: usize, alphabet: &Arc<Alphabet>) -> Result<Pattern, Error> {
    let items = expect_head(e, "pattern")?;
    let mut cells = Vec::new();
    for cell in items {
        let parts = expect_head(cell, "cell")?;
        if parts.len() != dim + 1 {
            return Err(perr(format!(
                "cell takes {dim} coordinates and one token"
            )));
        }
        let coords: Result<Vec<i64>, Error> = parts[..dim]
            .iter()
            .map(|i| {
                i.as_atom()?
                    .parse::<i64>()
                    .map_err(|_| perr("bad coordinate"))
            })
            .collect();
        let sym = alphabet.lookup(parts[dim].as_atom()?)?;
        cells.push((Point::new(coords?), sym));
    }
    Pattern::new(dim, alphabet.clone(), cells)
}

fn parse_forbid(
    e: &Sexpr,
    dim: usize,
    alphabet: &Arc<Alphabet>,
) -> Result<PatternSet, Error> {
    let items = expect_head(e, "forbid")?;
    let pats: Result<Vec<Pattern>, Error> = items
        .iter()
        .map(|p| parse_pattern(p, dim, alphabet))
        .collect();
    PatternSet::new(dim, alphabet.clone(), pats?)
}

fn parse_basis(e: &Sexpr, ambient: usize) -> Result<SubgroupBasis, Error> {
    let items = expect_head(e, "basis")?;
    let vectors: Result<Vec<Point>, Error> = items.iter().map(parse_point).collect();
    SubgroupBasis::new(ambient, vectors?)
}

fn build_term(e: &Sexpr) -> Result<SubshiftTerm, Error> {
    match e.head()? {
        "fullshift" => {
            let items = expect_head(e, "fullshift")?;
            if items.len() != 2 {
                return Err(perr("fullshift takes a dimension and an alphabet"));
            }
            let dim: usize = items[0]
                .as_atom()?
                .parse()
                .map_err(|_| perr("bad dimension"))?;
            let alphabet = parse_alphabet(&items[1])?;
            Ok(SubshiftTerm::full_shift(alphabet, dim))
        }
        "sft" => {
            let items = expect_head(e, "sft")?;
            if items.len() != 3 {
                return Err(perr("sft takes a dimension, an alphabet and a forbid form"));
            }
            let dim: usize = items[0]
                .as_atom()?
                .parse()
                .map_err(|_| perr("bad dimension"))?;
            let alphabet = parse_alphabet(&items[1])?;
            let forbidden = parse_forbid(&items[2], dim, &alphabet)?;
            Ok(SubshiftTerm::sft(TileSet::new(
                "term", alphabet, dim, forbidden,
            )?))
        }
        "product" => {
            let items = expect_head(e, "product")?;
            if items.len() != 2 {
                return Err(perr("product takes two terms"));
            }
            term::product(build_term(&items[0])?, build_term(&items[1])?)
        }
        "finite-type" => {
            let items = expect_head(e, "finite-type")?;
            if items.len() != 2 {
                return Err(perr("finite-type takes a forbid form and a term"));
            }
            let t = build_term(&items[1])?;
            let forbidden = parse_forbid(&items[0], t.dim(), t.alphabet())?;
            Ok(term::finite_type(forbidden, t))
        }
        "factor" => {
            let items = expect_head(e, "factor")?;
            if items.len() != 2 {
                return Err(perr("factor takes a code and a term"));
            }
            let t = build_term(&items[1])?;
            let code = parse_code(&items[0], t.dim(), t.alphabet())?;
            Ok(term::factor(code, t))
        }
        "sub-action" => {
            let items = expect_head(e, "sub-action")?;
            if items.len() != 2 {
                return Err(perr("sub-action takes a basis and a term"));
            }
            let t = build_term(&items[1])?;
            let basis = parse_basis(&items[0], t.dim())?;
            Ok(term::sub_action(basis, t))
        }
        "superpose" => {
            let items = expect_head(e, "superpose")?;
            if items.len() != 3 {
                return Err(perr("superpose takes two bases and a term"));
            }
            let t = build_term(&items[2])?;
            let g_items = expect_head(&items[0], "basis")?;
            let g2_items = expect_head(&items[1], "basis")?;
            let ambient = parse_point(
                g_items
                    .first()
                    .ok_or_else(|| perr("empty basis"))?,
            )?
            .dim();
            let _ = g2_items;
            let g = parse_basis(&items[0], ambient)?;
            let g2 = parse_basis(&items[1], ambient)?;
            Ok(term::superposition(g, g2, t))
        }
        other => Err(perr(format!("unknown term form {other:?}"))),
    }
}

fn parse_code(
    e: &Sexpr,
    dim: usize,
    source: &Arc<Alphabet>,
) -> Result<SlidingBlockCode, Error> {
    let items = expect_head(e, "code")?;
    if items.len() < 3 {
        return Err(perr("code takes a target, a neighborhood and rows"));
    }
    let target_items = expect_head(&items[0], "target")?;
    let tokens: Result<Vec<&str>, Error> =
        target_items.iter().map(|i| i.as_atom()).collect();
    let target = Alphabet::new("target", &tokens?)?;
    let hood_items = expect_head(&items[1], "neighborhood")?;
    let neighborhood: Result<Vec<Point>, Error> = hood_items.iter().map(parse_point).collect();
    let mut neighborhood = neighborhood?;
    neighborhood.sort();
    neighborhood.dedup();
    let k = neighborhood.len();
    // Collect the rows into a table keyed by source symbols.
    let entries = source.len().pow(k as u32);
    let mut table: Vec<Option<Symbol>> = vec![None; entries];
    for row in &items[2..] {
        let parts = expect_head(row, "row")?;
        if parts.len() != k + 1 {
            return Err(perr(format!(
                "row takes {k} source tokens and one target token"
            )));
        }
        let mut idx = 0usize;
        for p in &parts[..k] {
            let s = source.lookup(p.as_atom()?)?;
            idx = idx * source.len() + s.0 as usize;
        }
        let out = target.lookup(parts[k].as_atom()?)?;
        if table[idx].replace(out).is_some() {
            return Err(perr("duplicate code row"));
        }
    }
    if table.iter().any(|t| t.is_none()) {
        return Err(perr("code table is not total"));
    }
    let table: Vec<Symbol> = table.into_iter().map(|t| t.unwrap()).collect();
    let src_len = source.len();
    SlidingBlockCode::from_fn(
        source.clone(),
        target,
        dim,
        neighborhood.clone(),
        move |args| {
            let mut idx = 0usize;
            for a in args {
                idx = idx * src_len + a.0 as usize;
            }
            table[idx]
        },
    )
}

pub fn serialize_term(t: &SubshiftTerm) -> String {
    term_to_sexpr(t).render()
}

fn alphabet_sexpr(a: &Arc<Alphabet>) -> Sexpr {
    let mut items = vec![Sexpr::atom("alphabet")];
    items.extend(a.tokens().iter().map(Sexpr::atom));
    Sexpr::list(items)
}

fn point_sexpr(p: &Point) -> Sexpr {
    Sexpr::list(p.0.iter().map(|c| Sexpr::atom(c.to_string())).collect())
}

fn pattern_sexpr(p: &Pattern) -> Sexpr {
    let mut items = vec![Sexpr::atom("pattern")];
    for (pt, s) in p.cells() {
        let mut cell = vec![Sexpr::atom("cell")];
        cell.extend(pt.0.iter().map(|c| Sexpr::atom(c.to_string())));
        cell.push(Sexpr::atom(p.alphabet().token(*s)));
        items.push(Sexpr::list(cell));
    }
    Sexpr::list(items)
}

fn forbid_sexpr(ps: &PatternSet) -> Sexpr {
    let mut items = vec![Sexpr::atom("forbid")];
    items.extend(ps.iter().map(pattern_sexpr));
    Sexpr::list(items)
}

fn basis_sexpr(b: &SubgroupBasis) -> Sexpr {
    let mut items = vec![Sexpr::atom("basis")];
    items.extend(b.vectors().iter().map(point_sexpr));
    Sexpr::list(items)
}

fn term_to_sexpr(t: &SubshiftTerm) -> Sexpr {
    match t.node() {
        TermNode::FullShift => Sexpr::list(vec![
            Sexpr::atom("fullshift"),
            Sexpr::atom(t.dim().to_string()),
            alphabet_sexpr(t.alphabet()),
        ]),
        TermNode::Sft(ts) => Sexpr::list(vec![
            Sexpr::atom("sft"),
            Sexpr::atom(ts.dim().to_string()),
            alphabet_sexpr(ts.alphabet()),
            forbid_sexpr(ts.forbidden()),
        ]),
        TermNode::Product(a, b) => Sexpr::list(vec![
            Sexpr::atom("product"),
            term_to_sexpr(a),
            term_to_sexpr(b),
        ]),
        TermNode::FiniteType(ps, inner) => Sexpr::list(vec![
            Sexpr::atom("finite-type"),
            forbid_sexpr(ps),
            term_to_sexpr(inner),
        ]),
        TermNode::Factor(code, inner) => {
            let mut code_items = vec![
                Sexpr::atom("code"),
                {
                    let mut items = vec![Sexpr::atom("target")];
                    items.extend(code.target().tokens().iter().map(Sexpr::atom));
                    Sexpr::list(items)
                },
                {
                    let mut items = vec![Sexpr::atom("neighborhood")];
                    items.extend(code.neighborhood().iter().map(point_sexpr));
                    Sexpr::list(items)
                },
            ];
            // Rows in table order.
            let k = code.neighborhood().len();
            let n = code.source().len();
            for (idx, out) in code.table().iter().enumerate() {
                let mut row = vec![Sexpr::atom("row")];
                let mut rem = idx;
                let mut digits = vec![0usize; k];
                for j in (0..k).rev() {
                    digits[j] = rem % n;
                    rem /= n;
                }
                for d in digits {
                    row.push(Sexpr::atom(code.source().token(Symbol(d as u32))));
                }
                row.push(Sexpr::atom(code.target().token(*out)));
                code_items.push(Sexpr::list(row));
            }
            Sexpr::list(vec![
                Sexpr::atom("factor"),
                Sexpr::list(code_items),
                term_to_sexpr(inner),
            ])
        }
        TermNode::SubAction(basis, inner) => Sexpr::list(vec![
            Sexpr::atom("sub-action"),
            basis_sexpr(basis),
            term_to_sexpr(inner),
        ]),
        TermNode::Superposition(g, g2, inner) => Sexpr::list(vec![
            Sexpr::atom("superpose"),
            basis_sexpr(g),
            basis_sexpr(g2),
            term_to_sexpr(inner),
        ]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_roundtrip() {
        let text = "(finite-type (forbid (pattern (cell 0 1) (cell 1 1))) (fullshift 1 (alphabet 0 1)))";
        let t = parse_term(text).unwrap();
        assert_eq!(t.dim(), 1);
        let back = serialize_term(&t);
        let t2 = parse_term(&back).unwrap();
        assert_eq!(serialize_term(&t2), back);
    }

    #[test]
    fn factor_code_roundtrip() {
        let text = "(factor (code (target a b) (neighborhood (0) (1)) \
                    (row 0 0 a) (row 0 1 b) (row 1 0 b) (row 1 1 a)) \
                    (fullshift 1 (alphabet 0 1)))";
        let t = parse_term(text).unwrap();
        let back = serialize_term(&t);
        assert_eq!(serialize_term(&parse_term(&back).unwrap()), back);
    }

    #[test]
    fn superpose_parses() {
        let text = "(superpose (basis (1 0)) (basis (0 1)) \
                    (finite-type (forbid (pattern (cell 0 1) (cell 1 1))) (fullshift 1 (alphabet 0 1))))";
        let t = parse_term(text).unwrap();
        assert_eq!(t.dim(), 2);
        assert!(t.warning().is_none());
    }
}
