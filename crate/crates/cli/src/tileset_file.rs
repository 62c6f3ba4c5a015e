//! Line-based tile set files.
//!
//! ```text
//! tileset <name>
//! dim <d>
//! alphabet <tok> ...
//! forbid
//! cell <c1> ... <cd> <tok>
//! end
//! ...
//! end
//! ```
//!
//! Each `forbid` block lists the cells of one forbidden pattern and closes
//! with `end`; the final `end` closes the file. Unknown directives are
//! errors. Serialization emits canonical order, and parsing a canonical
//! file reproduces it byte for byte.

use std::fmt::Write as _;
use std::sync::Arc;

use tilings::{Alphabet, Error, Pattern, PatternSet, Point, Symbol, TileSet};

pub fn parse_tileset(text: &str) -> Result<TileSet, Error> {
    let mut name: Option<String> = None;
    let mut dim: Option<usize> = None;
    let mut alphabet: Option<Arc<Alphabet>> = None;
    let mut patterns: Vec<Pattern> = Vec::new();
    let mut block: Option<Vec<(Point, Symbol)>> = None;
    let mut closed = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse {
            line: lineno + 1,
            msg,
        };
        if closed {
            return Err(err("content after the closing end".into()));
        }
        match toks[0] {
            "tileset" => {
                if toks.len() != 2 {
                    return Err(err("tileset takes one name".into()));
                }
                name = Some(toks[1].to_string());
            }
            "dim" => {
                let d: usize = toks
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err("dim takes one positive integer".into()))?;
                if d == 0 {
                    return Err(err("dim must be at least 1".into()));
                }
                dim = Some(d);
            }
            "alphabet" => {
                let tokens: Vec<&str> = toks[1..].to_vec();
                alphabet = Some(
                    Alphabet::new(name.as_deref().unwrap_or("tileset"), &tokens)
                        .map_err(|e| err(e.to_string()))?,
                );
            }
            "forbid" => {
                if block.is_some() {
                    return Err(err("nested forbid block".into()));
                }
                block = Some(Vec::new());
            }
            "cell" => {
                let d = dim.ok_or_else(|| err("cell before dim".into()))?;
                let a = alphabet
                    .as_ref()
                    .ok_or_else(|| err("cell before alphabet".into()))?;
                let cells = block
                    .as_mut()
                    .ok_or_else(|| err("cell outside a forbid block".into()))?;
                if toks.len() != d + 2 {
                    return Err(err(format!(
                        "cell takes {d} coordinates and one token"
                    )));
                }
                let coords: Result<Vec<i64>, _> =
                    toks[1..=d].iter().map(|t| t.parse::<i64>()).collect();
                let coords = coords.map_err(|_| err("bad coordinate".into()))?;
                let sym = a
                    .lookup(toks[d + 1])
                    .map_err(|e| err(e.to_string()))?;
                cells.push((Point::new(coords), sym));
            }
            "end" => match block.take() {
                Some(cells) => {
                    let d = dim.ok_or_else(|| err("pattern before dim".into()))?;
                    let a = alphabet
                        .as_ref()
                        .ok_or_else(|| err("pattern before alphabet".into()))?;
                    let p = Pattern::new(d, a.clone(), cells)
                        .map_err(|e| err(e.to_string()))?;
                    patterns.push(p);
                }
                None => closed = true,
            },
            other => return Err(err(format!("unknown directive {other:?}"))),
        }
    }
    if !closed {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: "missing closing end".into(),
        });
    }
    let name = name.ok_or(Error::Parse {
        line: 0,
        msg: "missing tileset name".into(),
    })?;
    let dim = dim.ok_or(Error::Parse {
        line: 0,
        msg: "missing dim".into(),
    })?;
    let alphabet = alphabet.ok_or(Error::Parse {
        line: 0,
        msg: "missing alphabet".into(),
    })?;
    let forbidden = PatternSet::new(dim, alphabet.clone(), patterns)?;
    TileSet::new(&name, alphabet, dim, forbidden)
}

pub fn serialize_tileset(ts: &TileSet) -> String {
    let mut out = String::new();
    writeln!(out, "tileset {}", ts.name).unwrap();
    writeln!(out, "dim {}", ts.dim()).unwrap();
    writeln!(out, "alphabet {}", ts.alphabet().tokens().join(" ")).unwrap();
    for p in ts.forbidden().iter() {
        writeln!(out, "forbid").unwrap();
        for (pt, s) in p.cells() {
            let coords: Vec<String> = pt.0.iter().map(|c| c.to_string()).collect();
            writeln!(
                out,
                "cell {} {}",
                coords.join(" "),
                ts.alphabet().token(*s)
            )
            .unwrap();
        }
        writeln!(out, "end").unwrap();
    }
    writeln!(out, "end").unwrap();
    out
}
