//! Minimal s-expression reader/writer for the term file format.

use tilings::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexpr {
    Atom(String),
    List(Vec<Sexpr>),
}

impl Sexpr {
    pub fn atom(s: impl Into<String>) -> Sexpr {
        Sexpr::Atom(s.into())
    }

    pub fn list(items: Vec<Sexpr>) -> Sexpr {
        Sexpr::List(items)
    }

    pub fn as_atom(&self) -> Result<&str, Error> {
        match self {
            Sexpr::Atom(s) => Ok(s),
            Sexpr::List(_) => Err(Error::Parse {
                line: 0,
                msg: "expected an atom, found a list".into(),
            }),
        }
    }

    pub fn as_list(&self) -> Result<&[Sexpr], Error> {
        match self {
            Sexpr::List(items) => Ok(items),
            Sexpr::Atom(a) => Err(Error::Parse {
                line: 0,
                msg: format!("expected a list, found atom {a:?}"),
            }),
        }
    }

    /// Head atom of a list form.
    pub fn head(&self) -> Result<&str, Error> {
        let items = self.as_list()?;
        items
            .first()
            .ok_or(Error::Parse {
                line: 0,
                msg: "empty list form".into(),
            })?
            .as_atom()
    }

    pub fn render(&self) -> String {
        match self {
            Sexpr::Atom(s) => s.clone(),
            Sexpr::List(items) => {
                let inner: Vec<String> = items.iter().map(|i| i.render()).collect();
                format!("({})", inner.join(" "))
            }
        }
    }
}

pub fn parse(text: &str) -> Result<Sexpr, Error> {
    let mut tokens = tokenize(text)?;
    tokens.reverse();
    let expr = parse_expr(&mut tokens)?;
    if !tokens.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "trailing content after the top-level form".into(),
        });
    }
    Ok(expr)
}

fn tokenize(text: &str) -> Result<Vec<String>, Error> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for line in text.lines() {
        let line = match line.find(';') {
            Some(i) => &line[..i],
            None => line,
        };
        for c in line.chars() {
            match c {
                '(' | ')' => {
                    if !cur.is_empty() {
                        out.push(std::mem::take(&mut cur));
                    }
                    out.push(c.to_string());
                }
                c if c.is_whitespace() => {
                    if !cur.is_empty() {
                        out.push(std::mem::take(&mut cur));
                    }
                }
                c => cur.push(c),
            }
        }
        if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    Ok(out)
}

fn parse_expr(tokens: &mut Vec<String>) -> Result<Sexpr, Error> {
    let tok = tokens.pop().ok_or(Error::Parse {
        line: 0,
        msg: "unexpected end of input".into(),
    })?;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.last().map(|s| s.as_str()) {
                    Some(")") => {
                        tokens.pop();
                        return Ok(Sexpr::List(items));
                    }
                    Some(_) => items.push(parse_expr(tokens)?),
                    None => {
                        return Err(Error::Parse {
                            line: 0,
                            msg: "unclosed parenthesis".into(),
                        })
                    }
                }
            }
        }
        ")" => Err(Error::Parse {
            line: 0,
            msg: "unexpected closing parenthesis".into(),
        }),
        atom => Ok(Sexpr::Atom(atom.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let text = "(finite-type (forbid (pattern (cell 0 1))) (fullshift 1 (alphabet 0 1)))";
        let e = parse(text).unwrap();
        assert_eq!(e.render(), text);
        assert_eq!(parse(&e.render()).unwrap(), e);
    }

    #[test]
    fn comments_ignored()     {
        let e = parse("(a b ; trailing\n c)").unwrap();
        assert_eq!(e.render(), "(a b c)");
    }
}
