//! Symbols and alphabets, including product alphabets.
//!
//! A product alphabet keeps its factor structure so that symbols can be
//! decomposed into atom components; display tokens of a product symbol are
//! the atom tokens joined with `|`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Index of a symbol within its alphabet.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub u32);

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Structure {
    Atomic,
    Product(Vec<Arc<Alphabet>>),
}

/// A finite ordered alphabet. Symbol order is the canonical order used for
/// every deterministic enumeration.
#[derive(Clone, Debug)]
pub struct Alphabet {
    name: String,
    tokens: Vec<String>,
    structure: Structure,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        // Names are labels; token lists carry the identity.
        self.tokens == other.tokens
    }
}
impl Eq for Alphabet {}

impl Alphabet {
    pub fn new(name: &str, tokens: &[&str]) -> Result<Arc<Self>> {
        Self::from_tokens(name, tokens.iter().map(|t| t.to_string()).collect())
    }

    pub fn from_tokens(name: &str, tokens: Vec<String>) -> Result<Arc<Self>> {
        if tokens.is_empty() {
            return Err(Error::Validation("alphabet must be non-empty".into()));
        }
        for t in &tokens {
            if t.is_empty() || t.chars().any(|c| c.is_whitespace()) {
                return Err(Error::InvalidSymbol(format!(
                    "token {t:?} is empty or contains whitespace"
                )));
            }
        }
        let mut seen = tokens.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != tokens.len() {
            return Err(Error::InvalidSymbol(format!(
                "duplicate token in alphabet {name}"
            )));
        }
        Ok(Arc::new(Alphabet {
            name: name.to_string(),
            tokens,
            structure: Structure::Atomic,
        }))
    }

    /// Product alphabet of the given factors. Symbol ids are mixed-radix with
    /// the last factor fastest; tokens join the factor tokens with `|`.
    pub fn product(name: &str, factors: &[Arc<Alphabet>]) -> Arc<Self> {
        assert!(factors.len() >= 2);
        let mut tokens = vec![String::new()];
        for f in factors {
            let mut next = Vec::with_capacity(tokens.len() * f.len());
            for prefix in &tokens {
                for t in &f.tokens {
                    if prefix.is_empty() {
                        next.push(t.clone());
                    } else {
                        next.push(format!("{prefix}|{t}"));
                    }
                }
            }
            tokens = next;
        }
        Arc::new(Alphabet {
            name: name.to_string(),
            tokens,
            structure: Structure::Product(factors.to_vec()),
        })
    }

    /// A renamed copy with every token suffixed (used for marked copies of an
    /// alphabet, e.g. the oracle copy).
    pub fn suffixed_copy(&self, name: &str, suffix: &str) -> Result<Arc<Self>> {
        Self::from_tokens(
            name,
            self.tokens.iter().map(|t| format!("{t}{suffix}")).collect(),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.tokens.len() as u32).map(Symbol)
    }

    pub fn token(&self, s: Symbol) -> &str {
        &self.tokens[s.0 as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn lookup(&self, token: &str) -> Result<Symbol> {
        self.tokens
            .iter()
            .position(|t| t == token)
            .map(|i| Symbol(i as u32))
            .ok_or_else(|| {
                Error::InvalidSymbol(format!(
                    "token {token:?} not in alphabet {} (valid: {})",
                    self.name,
                    self.tokens.join(" ")
                ))
            })
    }

    pub fn contains(&self, s: Symbol) -> bool {
        (s.0 as usize) < self.tokens.len()
    }

    /// Direct factors of a product alphabet (the alphabet itself if atomic).
    pub fn factors(&self) -> Vec<Arc<Alphabet>> {
        match &self.structure {
            Structure::Atomic => vec![],
            Structure::Product(fs) => fs.clone(),
        }
    }

    /// Flattened atomic components, left to right.
    pub fn atoms(&self) -> Vec<Arc<Alphabet>> {
        match &self.structure {
            Structure::Atomic => vec![],
            Structure::Product(fs) => {
                let mut out = Vec::new();
                for f in fs {
                    match &f.structure {
                        Structure::Atomic => out.push(f.clone()),
                        Structure::Product(_) => out.extend(f.atoms()),
                    }
                }
                out
            }
        }
    }

    /// Number of atomic components (1 for an atomic alphabet).
    pub fn atom_count(&self) -> usize {
        match &self.structure {
            Structure::Atomic => 1,
            Structure::Product(_) => self.atoms().len(),
        }
    }

    /// Decompose a symbol of a product alphabet into its atom symc components.
    pub fn atom_parts(&self, s: Symbol) -> Vec<Symbol> {
        match &self.structure {
            Structure::Atomic => vec![s],
            Structure::Product(_) => {
                let atoms = self.atoms();
                let mut parts = vec![Symbol(0); atoms.len()];
                let mut rem = s.0 as usize;
                for (i, a) in atoms.iter().enumerate().rev() {
                    parts[i] = Symbol((rem % a.len()) as u32);
                    rem /= a.len();
                }
                parts
            }
        }
    }

    /// Compose a symbol of a product alphabet from atom components.
    pub fn from_atom_parts(&self, parts: &[Symbol]) -> Symbol {
        match &self.structure {
            Structure::Atomic => {
                debug_assert_eq!(parts.len(), 1);
                parts[0]
            }
            Structure::Product(_) => {
                let atoms = self.atoms();
                debug_assert_eq!(parts.len(), atoms.len());
                let mut id = 0usize;
                for (p, a) in parts.iter().zip(&atoms) {
                    id = id * a.len() + p.0 as usize;
                }
                Symbol(id as u32)
            }
        }
    }

    /// Pair two symbols of the two direct factors of a binary product.
    pub fn pair(&self, left: Symbol, right: Symbol) -> Symbol {
        match &self.structure {
            Structure::Product(fs) if fs.len() == 2 => {
                Symbol(left.0 * fs[1].len() as u32 + right.0)
            }
            _ => panic!("pair() requires a binary product alphabet"),
        }
    }

    /// Split a symbol of a binary product into its two factor symbols.
    pub fn unpair(&self, s: Symbol) -> (Symbol, Symbol) {
        match &self.structure {
            Structure::Product(fs) if fs.len() == 2 => {
                let n = fs[1].len() as u32;
                (Symbol(s.0 / n), Symbol(s.0 % n))
            }
            _ => panic!("unpair() requires a binary product alphabet"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_tokens_join_with_bar() {
        let a = Alphabet::new("A", &["0", "1"]).unwrap();
        let b = Alphabet::new("B", &["x"]).unwrap();
        let p = Alphabet::product("AxB", &[a, b]);
        assert_eq!(p.tokens(), &["0|x", "1|x"]);
        assert_eq!(p.atom_count(), 2);
    }

    #[test]
    fn nested_product_flattens_atoms() {
        let a = Alphabet::new("A", &["a", "b"]).unwrap();
        let b = Alphabet::new("B", &["x", "y"]).unwrap();
        let c = Alphabet::new("C", &["0", "1", "2"]).unwrap();
        let inner = Alphabet::product("BxC", &[b.clone(), c.clone()]);
        let p = Alphabet::product("Ax(BxC)", &[a.clone(), inner]);
        assert_eq!(p.atom_count(), 3);
        assert_eq!(p.len(), 12);
        for s in p.symbols() {
            let parts = p.atom_parts(s);
            assert_eq!(p.from_atom_parts(&parts), s);
            let toks: Vec<&str> = p.token(s).split('|').collect();
            assert_eq!(toks[0], a.token(parts[0]));
            assert_eq!(toks[1], b.token(parts[1]));
            assert_eq!(toks[2], c.token(parts[2]));
        }
    }

    #[test]
    fn rejects_whitespace_and_duplicates() {
        assert!(Alphabet::new("A", &["a b"]).is_err());
        assert!(Alphabet::new("A", &["a", "a"]).is_err());
        assert!(Alphabet::new("A", &[]).is_err());
    }
}
