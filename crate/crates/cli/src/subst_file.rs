//! Line-based substitution files.
//!
//! ```text
//! substitution <name>
//! factor <k>
//! alphabet <tok> ...
//! image <tok>
//! cell <x> <y> <tok>    # k*k cells with 1 <= x,y <= k
//! end
//! ...
//! end
//! ```

use std::sync::Arc;

use tilings::substitution::Substitution;
use tilings::{Alphabet, Error, Pattern, Point, Symbol};

pub fn parse_substitution(text: &str) -> Result<Substitution, Error> {
    let mut name: Option<String> = None;
    let mut factor: Option<usize> = None;
    let mut alphabet: Option<Arc<Alphabet>> = None;
    let mut images: Vec<(Symbol, Pattern)> = Vec::new();
    let mut block: Option<(Symbol, Vec<(Point, Symbol)>)> = None;
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
            "substitution" => name = Some(toks.get(1).unwrap_or(&"subst").to_string()),
            "factor" => {
                factor = Some(
                    toks.get(1)
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| err("factor takes one integer".into()))?,
                )
            }
            "alphabet" => {
                let tokens: Vec<&str> = toks[1..].to_vec();
                alphabet = Some(
                    Alphabet::new(name.as_deref().unwrap_or("subst"), &tokens)
                        .map_err(|e| err(e.to_string()))?,
                );
            }
            "image" => {
                if block.is_some() {
                    return Err(err("image block not closed".into()));
                }
                let a = alphabet
                    .as_ref()
                    .ok_or_else(|| err("image before alphabet".into()))?;
                let sym = a
                    .lookup(toks.get(1).ok_or_else(|| err("image takes a token".into()))?)
                    .map_err(|e| err(e.to_string()))?;
                block = Some((sym, Vec::new()));
            }
            "cell" => {
                let a = alphabet
                    .as_ref()
                    .ok_or_else(|| err("cell before alphabet".into()))?;
                let (_, cells) = block
                    .as_mut()
                    .ok_or_else(|| err("cell outside an image block".into()))?;
                if toks.len() != 4 {
                    return Err(err("cell takes x y token".into()));
                }
                let x: i64 = toks[1].parse().map_err(|_| err("bad x".into()))?;
                let y: i64 = toks[2].parse().map_err(|_| err("bad y".into()))?;
                let sym = a.lookup(toks[3]).map_err(|e| err(e.to_string()))?;
                cells.push((Point::new(vec![x, y]), sym));
            }
            "end" => match block.take() {
                Some((sym, cells)) => {
                    let a = alphabet.as_ref().unwrap();
                    images.push((sym, Pattern::new(2, a.clone(), cells)?));
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
    let alphabet = alphabet.ok_or(Error::Parse {
        line: 0,
        msg: "missing alphabet".into(),
    })?;
    let factor = factor.ok_or(Error::Parse {
        line: 0,
        msg: "missing factor".into(),
    })?;
    images.sort_by_key(|(s, _)| s.0);
    if images.len() != alphabet.len()
        || images.iter().enumerate().any(|(i, (s, _))| s.0 as usize != i)
    {
        return Err(Error::Parse {
            line: 0,
            msg: "each alphabet letter needs exactly one image".into(),
        });
    }
    Substitution::new(
        alphabet,
        factor,
        images.into_iter().map(|(_, p)| p).collect(),
    )
}
