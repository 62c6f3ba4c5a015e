//! Turing machines: definitions, a line-based file format, execution to
//! space-time diagrams, compilation to forbidden-pattern sets, rectangle
//! conditions, semi-oracle semantics and the simulation terms built on top.

mod compile;
mod oracle;
mod rect;
mod run;
mod terms;

pub use compile::{check_diagram, compile_machine};
pub use oracle::{
    domain_sample, machine_input_alphabet, order_evidence, DomainSample, Oracle,
    OrderEvidence, Verdict,
};
pub use rect::{
    expected_rectangle_filling, rect_cross_check, rectangle_conditions, rectangle_domains,
    rectangle_pins, rectangle_region, RectCheck,
};
pub use run::{oracle_run, run, OracleOutcome, RunStatus, SpaceTimeDiagram};
pub use terms::{
    machine_term, simulation_term, verify_simulation_slices, SimulationReport, SimulationTerm,
};

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};

/// Head movement of a transition.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord)]
pub enum Move {
    Left,
    Stay,
    Right,
}

impl Move {
    pub fn token(&self) -> &'static str {
        match self {
            Move::Left => "L",
            Move::Stay => "S",
            Move::Right => "R",
        }
    }

    pub fn parse(s: &str) -> Result<Move> {
        match s {
            "L" => Ok(Move::Left),
            "S" => Ok(Move::Stay),
            "R" => Ok(Move::Right),
            _ => Err(Error::Validation(format!("unknown move {s:?}"))),
        }
    }
}

/// A deterministic Turing machine. Tape symbols are indexed with the blank
/// as the last index; the transition table is total on non-final states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuringMachine {
    pub name: String,
    states: Vec<String>,
    initial: usize,
    finals: Vec<usize>,
    input_syms: Vec<usize>,
    tape_tokens: Vec<String>,
    blank_token: String,
    // (state, read) -> (state, write, move); read/write range over tape
    // symbols plus the blank (index = tape_tokens.len()).
    rules: BTreeMap<(usize, usize), (usize, usize, Move)>,
    oracle_state: Option<usize>,
}

impl TuringMachine {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: &str,
        states: Vec<String>,
        initial: &str,
        finals: &[&str],
        input: &[&str],
        tape: &[&str],
        blank: &str,
        rules: &[(&str, &str, &str, &str, Move)],
        oracle_state: Option<&str>,
    ) -> Result<Self> {
        let mut m = TuringMachine {
            name: name.to_string(),
            states,
            initial: 0,
            finals: Vec::new(),
            input_syms: Vec::new(),
            tape_tokens: tape.iter().map(|s| s.to_string()).collect(),
            blank_token: blank.to_string(),
            rules: BTreeMap::new(),
            oracle_state: None,
        };
        m.initial = m.state_index(initial)?;
        for f in finals {
            let i = m.state_index(f)?;
            m.finals.push(i);
        }
        m.finals.sort_unstable();
        m.finals.dedup();
        for t in input {
            let i = m.tape_index(t)?;
            m.input_syms.push(i);
        }
        for (q, r, q2, w, mv) in rules {
            let key = (m.state_index(q)?, m.tape_index(r)?);
            let val = (m.state_index(q2)?, m.tape_index(w)?, *mv);
            if m.rules.insert(key, val).is_some() {
                return Err(Error::Validation(format!(
                    "duplicate rule for ({q}, {r})"
                )));
            }
        }
        if let Some(q) = oracle_state {
            m.oracle_state = Some(m.state_index(q)?);
        }
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if self.states.is_empty() {
            return Err(Error::Validation("machine has no states".into()));
        }
        let mut sorted = self.states.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.states.len() {
            return Err(Error::Validation("duplicate state names".into()));
        }
        if self.tape_tokens.contains(&self.blank_token) {
            return Err(Error::Validation(
                "blank symbol must not be in the tape alphabet".into(),
            ));
        }
        // Input alphabet strictly inside tape-plus-blank always holds since
        // the blank is outside the input alphabet; check the containment.
        for &i in &self.input_syms {
            if i >= self.tape_tokens.len() {
                return Err(Error::Validation(
                    "input symbol outside the tape alphabet".into(),
                ));
            }
        }
        let g = self.tape_tokens.len() + 1;
        for q in 0..self.states.len() {
            let is_final = self.finals.contains(&q);
            for s in 0..g {
                let has = self.rules.contains_key(&(q, s));
                if is_final && has {
                    return Err(Error::Validation(format!(
                        "final state {} has an outgoing rule",
                        self.states[q]
                    )));
                }
                if !is_final && !has {
                    return Err(Error::Validation(format!(
                        "missing rule for ({}, {})",
                        self.states[q],
                        self.tape_token(s)
                    )));
                }
            }
        }
        if let Some(q) = self.oracle_state {
            if self.finals.contains(&q) {
                return Err(Error::Validation("oracle state cannot be final".into()));
            }
        }
        Ok(())
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::Validation(format!("unknown state {name:?}")))
    }

    pub fn tape_index(&self, token: &str) -> Result<usize> {
        if token == self.blank_token {
            return Ok(self.tape_tokens.len());
        }
        self.tape_tokens
            .iter()
            .position(|s| s == token)
            .ok_or_else(|| Error::Validation(format!("unknown tape symbol {token:?}")))
    }

    pub fn tape_token(&self, index: usize) -> &str {
        if index == self.tape_tokens.len() {
            &self.blank_token
        } else {
            &self.tape_tokens[index]
        }
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn finals(&self) -> &[usize] {
        &self.finals
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals.contains(&q)
    }

    pub fn oracle_state(&self) -> Option<usize> {
        self.oracle_state
    }

    /// Number of tape symbols including the blank.
    pub fn tape_size(&self) -> usize {
        self.tape_tokens.len() + 1
    }

    pub fn blank(&self) -> usize {
        self.tape_tokens.len()
    }

    pub fn input_symbols(&self) -> &[usize] {
        &self.input_syms
    }

    pub fn input_tokens(&self) -> Vec<&str> {
        self.input_syms.iter().map(|&i| self.tape_token(i)).collect()
    }

    pub fn rule(&self, state: usize, read: usize) -> Option<(usize, usize, Move)> {
        self.rules.get(&(state, read)).copied()
    }

    pub fn rules(&self) -> impl Iterator<Item = (&(usize, usize), &(usize, usize, Move))> {
        self.rules.iter()
    }

    /// Parse an input word of tokens into tape symbol indices.
    pub fn parse_input(&self, word: &[&str]) -> Result<Vec<usize>> {
        word.iter()
            .map(|t| {
                let i = self.tape_index(t)?;
                if self.input_syms.contains(&i) {
                    Ok(i)
                } else {
                    Err(Error::InvalidSymbol(format!(
                        "{t:?} is not an input symbol"
                    )))
                }
            })
            .collect()
    }

    /// The space-time alphabet: tape symbols (with blank) plus head-marked
    /// cells, one symbol per (state, tape symbol) pair.
    pub fn spacetime_alphabet(&self) -> SpaceTime {
        let g = self.tape_size();
        let mut tokens: Vec<String> = (0..g).map(|s| self.tape_token(s).to_string()).collect();
        for q in 0..self.states.len() {
            for s in 0..g {
                tokens.push(format!("{}:{}", self.states[q], self.tape_token(s)));
            }
        }
        let alphabet =
            Alphabet::from_tokens(&format!("{}-cells", self.name), tokens).expect("valid tokens");
        SpaceTime {
            alphabet,
            tape_size: g,
            state_count: self.states.len(),
        }
    }
}

/// The alphabet of space-time diagram cells with packing helpers.
#[derive(Clone, Debug)]
pub struct SpaceTime {
    pub alphabet: Arc<Alphabet>,
    tape_size: usize,
    state_count: usize,
}

impl SpaceTime {
    pub fn plain(&self, sym: usize) -> Symbol {
        debug_assert!(sym < self.tape_size);
        Symbol(sym as u32)
    }

    pub fn head(&self, state: usize, sym: usize) -> Symbol {
        debug_assert!(state < self.state_count && sym < self.tape_size);
        Symbol((self.tape_size + state * self.tape_size + sym) as u32)
    }

    /// `(Some(state), sym)` for head cells, `(None, sym)` for plain cells.
    pub fn unpack(&self, cell: Symbol) -> (Option<usize>, usize) {
        let v = cell.0 as usize;
        if v < self.tape_size {
            (None, v)
        } else {
            let r = v - self.tape_size;
            (Some(r / self.tape_size), r % self.tape_size)
        }
    }

    pub fn is_head(&self, cell: Symbol) -> bool {
        cell.0 as usize >= self.tape_size
    }

    pub fn strip_head(&self, cell: Symbol) -> Symbol {
        let (_, s) = self.unpack(cell);
        self.plain(s)
    }

    pub fn tape_size(&self) -> usize {
        self.tape_size
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn len(&self) -> usize {
        self.tape_size * (1 + self.state_count)
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Parse a machine file. Lines hold one directive each; `#` starts a
/// comment; the file ends with `end`. Unknown directives are errors.
pub fn parse_machine(text: &str) -> Result<TuringMachine> {
    let mut name = None;
    let mut states: Option<Vec<String>> = None;
    let mut initial = None;
    let mut finals: Option<Vec<String>> = None;
    let mut input: Option<Vec<String>> = None;
    let mut tape: Option<Vec<String>> = None;
    let mut blank = None;
    let mut rules: Vec<(String, String, String, String, Move)> = Vec::new();
    let mut oracle_state = None;
    let mut ended = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if ended {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: "content after end".into(),
            });
        }
        let err = |msg: &str| Error::Parse {
            line: lineno + 1,
            msg: msg.to_string(),
        };
        match toks[0] {
            "machine" => {
                if toks.len() != 2 {
                    return Err(err("machine takes one name"));
                }
                name = Some(toks[1].to_string());
            }
            "states" => {
                states = Some(toks[1..].iter().map(|s| s.to_string()).collect());
            }
            "initial" => {
                if toks.len() != 2 {
                    return Err(err("initial takes one state"));
                }
                initial = Some(toks[1].to_string());
            }
            "final" => {
                finals = Some(toks[1..].iter().map(|s| s.to_string()).collect());
            }
            "input" => {
                input = Some(toks[1..].iter().map(|s| s.to_string()).collect());
            }
            "tape" => {
                tape = Some(toks[1..].iter().map(|s| s.to_string()).collect());
            }
            "blank" => {
                if toks.len() != 2 {
                    return Err(err("blank takes one token"));
                }
                blank = Some(toks[1].to_string());
            }
            "rule" => {
                // rule <state> <read> -> <state> <write> <move>
                if toks.len() != 7 || toks[3] != "->" {
                    return Err(err("rule format: rule q r -> q' w L|S|R"));
                }
                let mv = Move::parse(toks[6]).map_err(|e| err(&e.to_string()))?;
                rules.push((
                    toks[1].to_string(),
                    toks[2].to_string(),
                    toks[4].to_string(),
                    toks[5].to_string(),
                    mv,
                ));
            }
            "oracle_state" => {
                if toks.len() != 2 {
                    return Err(err("oracle_state takes one state"));
                }
                oracle_state = Some(toks[1].to_string());
            }
            "end" => {
                ended = true;
            }
            other => {
                return Err(err(&format!("unknown directive {other:?}")));
            }
        }
    }
    if !ended {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: "missing end".into(),
        });
    }
    let name = name.ok_or(Error::Parse {
        line: 0,
        msg: "missing machine name".into(),
    })?;
    let states = states.ok_or(Error::Parse {
        line: 0,
        msg: "missing states".into(),
    })?;
    let initial = initial.ok_or(Error::Parse {
        line: 0,
        msg: "missing initial".into(),
    })?;
    let finals = finals.unwrap_or_default();
    let input = input.ok_or(Error::Parse {
        line: 0,
        msg: "missing input".into(),
    })?;
    let tape = tape.ok_or(Error::Parse {
        line: 0,
        msg: "missing tape".into(),
    })?;
    let blank = blank.ok_or(Error::Parse {
        line: 0,
        msg: "missing blank".into(),
    })?;
    let finals_ref: Vec<&str> = finals.iter().map(|s| s.as_str()).collect();
    let input_ref: Vec<&str> = input.iter().map(|s| s.as_str()).collect();
    let tape_ref: Vec<&str> = tape.iter().map(|s| s.as_str()).collect();
    let rules_ref: Vec<(&str, &str, &str, &str, Move)> = rules
        .iter()
        .map(|(a, b, c, d, m)| (a.as_str(), b.as_str(), c.as_str(), d.as_str(), *m))
        .collect();
    TuringMachine::new(
        &name,
        states,
        &initial,
        &finals_ref,
        &input_ref,
        &tape_ref,
        &blank,
        &rules_ref,
        oracle_state.as_deref(),
    )
}

/// Canonical machine file serialization; `parse_machine` inverts it.
pub fn serialize_machine(m: &TuringMachine) -> String {
    let mut out = String::new();
    writeln!(out, "machine {}", m.name).unwrap();
    writeln!(out, "states {}", m.states.join(" ")).unwrap();
    writeln!(out, "initial {}", m.states[m.initial]).unwrap();
    let finals: Vec<&str> = m.finals.iter().map(|&i| m.states[i].as_str()).collect();
    writeln!(out, "final {}", finals.join(" ")).unwrap();
    writeln!(out, "input {}", m.input_tokens().join(" ")).unwrap();
    writeln!(out, "tape {}", m.tape_tokens.join(" ")).unwrap();
    writeln!(out, "blank {}", m.blank_token).unwrap();
    for ((q, r), (q2, w, mv)) in &m.rules {
        writeln!(
            out,
            "rule {} {} -> {} {} {}",
            m.states[*q],
            m.tape_token(*r),
            m.states[*q2],
            m.tape_token(*w),
            mv.token()
        )
        .unwrap();
    }
    if let Some(q) = m.oracle_state {
        writeln!(out, "oracle_state {}", m.states[q]).unwrap();
    }
    writeln!(out, "end").unwrap();
    out
}

/// Fixture: a unary scanner walking right over 1s, halting on the blank.
/// The initial state hands over immediately and is never re-entered, so
/// the head-placement condition of rectangle tilings is satisfiable.
pub fn fixture_scanner() -> TuringMachine {
    TuringMachine::new(
        "scanner",
        vec!["q0".into(), "q1".into(), "qf".into()],
        "q0",
        &["qf"],
        &["1"],
        &["1"],
        "_",
        &[
            ("q0", "1", "q1", "1", Move::Right),
            ("q0", "_", "qf", "_", Move::Stay),
            ("q1", "1", "q1", "1", Move::Right),
            ("q1", "_", "qf", "_", Move::Stay),
        ],
        None,
    )
    .expect("scanner fixture is valid")
}

/// Fixture: flips a binary word left to right, steps back onto its last
/// letter and halts there. The initial state is never re-entered.
pub fn fixture_flipper() -> TuringMachine {
    TuringMachine::new(
        "flipper",
        vec!["qs".into(), "q0".into(), "q1".into(), "qf".into()],
        "qs",
        &["qf"],
        &["0", "1"],
        &["0", "1"],
        "_",
        &[
            ("qs", "0", "q0", "1", Move::Right),
            ("qs", "1", "q0", "0", Move::Right),
            ("qs", "_", "qf", "_", Move::Stay),
            ("q0", "0", "q0", "1", Move::Right),
            ("q0", "1", "q0", "0", Move::Right),
            ("q0", "_", "q1", "_", Move::Left),
            ("q1", "0", "qf", "0", Move::Stay),
            ("q1", "1", "qf", "1", Move::Stay),
            ("q1", "_", "qf", "_", Move::Stay),
        ],
        None,
    )
    .expect("flipper fixture is valid")
}

/// Fixture: queries the oracle with the input word, then loops forever on a
/// negative answer. Its domain is exactly the oracle language (restricted
/// to its input alphabet).
pub fn fixture_querier() -> TuringMachine {
    TuringMachine::new(
        "querier",
        vec!["q?".into(), "qloop".into()],
        "q?",
        &[],
        &["a", "b"],
        &["a", "b"],
        "_",
        &[
            ("q?", "a", "qloop", "a", Move::Stay),
            ("q?", "b", "qloop", "b", Move::Stay),
            ("q?", "_", "qloop", "_", Move::Stay),
            ("qloop", "a", "qloop", "a", Move::Stay),
            ("qloop", "b", "qloop", "b", Move::Stay),
            ("qloop", "_", "qloop", "_", Move::Stay),
        ],
        Some("q?"),
    )
    .expect("querier fixture is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn machine_file_roundtrip() {
        for m in [fixture_scanner(), fixture_flipper(), fixture_querier()] {
            let text = serialize_machine(&m);
            let back = parse_machine(&text).unwrap();
            assert_eq!(back, m);
            assert_eq!(serialize_machine(&back), text);
        }
    }

    #[test]
    fn comments_and_unknown_directives() {
        let text = "machine t # a machine\nstates q0 qf\ninitial q0\nfinal qf\ninput 1\ntape 1\nblank _\nrule q0 1 -> qf 1 S\nrule q0 _ -> qf _ S\nend\n";
        assert!(parse_machine(text).is_ok());
        let bad = text.replace("blank _", "blankx _");
        match parse_machine(&bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn validation_rejects_partial_tables() {
        let r = TuringMachine::new(
            "bad",
            vec!["q0".into(), "qf".into()],
            "q0",
            &["qf"],
            &["1"],
            &["1"],
            "_",
            &[("q0", "1", "q0", "1", Move::Right)],
            None,
        );
        assert!(r.is_err());
    }

    #[test]
    fn spacetime_packing_roundtrip() {
        let m = fixture_flipper();
        let st = m.spacetime_alphabet();
        assert_eq!(st.len(), 3 * (1 + 4));
        for q in 0..4 {
            for s in 0..3 {
                let cell = st.head(q, s);
                assert_eq!(st.unpack(cell), (Some(q), s));
                assert!(st.is_head(cell));
                assert_eq!(st.strip_head(cell), st.plain(s));
            }
        }
        assert_eq!(st.unpack(st.plain(2)), (None, 2));
        assert_eq!(st.alphabet.token(st.head(0, 0)), "qs:0");
    }
}
