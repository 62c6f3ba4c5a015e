//! Execution of machines to space-time diagrams, and semi-oracle runs.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::alphabet::Symbol;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::pattern::Pattern;

use super::{Move, Oracle, SpaceTime, TuringMachine};

/// Terminal status of a windowed run.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RunStatus {
    /// A final state was reached; the last row carries the final head.
    Halted,
    /// The step budget ran out mid-computation.
    OutOfTime,
    /// The head attempted to leave the tape window; the last row shows the
    /// configuration in which the exit was attempted (the blocked step does
    /// not fire).
    OutOfSpace,
}

/// Rows of tape configurations over the machine's space-time alphabet; row 0
/// is the initial configuration and every row up to a halt or stop carries
/// exactly one head cell.
#[derive(Clone, Debug)]
pub struct SpaceTimeDiagram {
    pub spacetime: SpaceTime,
    pub width: usize,
    rows: Vec<Vec<Symbol>>,
    head_cols: Vec<usize>,
}

impl SpaceTimeDiagram {
    pub fn height(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Symbol>] {
        &self.rows
    }

    pub fn head_col(&self, row: usize) -> usize {
        self.head_cols[row]
    }

    /// The diagram as a 2D pattern on `[0, width-1] x [0, height-1]`, time
    /// increasing upward.
    pub fn to_pattern(&self) -> Pattern {
        let mut cells = Vec::with_capacity(self.width * self.rows.len());
        for (y, row) in self.rows.iter().enumerate() {
            for (x, s) in row.iter().enumerate() {
                cells.push((Point::new(vec![x as i64, y as i64]), *s));
            }
        }
        Pattern::new(2, self.spacetime.alphabet.clone(), cells).expect("diagram is non-empty")
    }

    /// One row per line in time order; head cells render as `[q:sym]`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|&c| {
                    let tok = self.spacetime.alphabet.token(c);
                    if self.spacetime.is_head(c) {
                        format!("[{tok}]")
                    } else {
                        tok.to_string()
                    }
                })
                .collect();
            writeln!(out, "{}", cells.join(" ")).unwrap();
        }
        out
    }
}

/// Deterministic windowed run: the input sits at the left edge of a tape of
/// `tape_window` cells, the head starts on its first letter in the initial
/// state. One diagram row is recorded per configuration.
pub fn run(
    tm: &TuringMachine,
    input: &[usize],
    max_steps: usize,
    tape_window: usize,
) -> Result<(SpaceTimeDiagram, RunStatus)> {
    if input.len() > tape_window {
        return Err(Error::Validation(format!(
            "input length {} exceeds the tape window {tape_window}",
            input.len()
        )));
    }
    for &s in input {
        if !tm.input_symbols().contains(&s) {
            return Err(Error::InvalidSymbol(format!(
                "input symbol {} outside the input alphabet",
                tm.tape_token(s)
            )));
        }
    }
    let st = tm.spacetime_alphabet();
    let mut tape: Vec<usize> = vec![tm.blank(); tape_window];
    tape[..input.len()].copy_from_slice(input);
    let mut head = 0usize;
    let mut state = tm.initial();
    let mut rows = Vec::new();
    let mut head_cols = Vec::new();

    let record =
        |tape: &Vec<usize>, head: usize, state: usize, rows: &mut Vec<Vec<Symbol>>, head_cols: &mut Vec<usize>| {
            let mut row: Vec<Symbol> = tape.iter().map(|&s| st.plain(s)).collect();
            row[head] = st.head(state, tape[head]);
            rows.push(row);
            head_cols.push(head);
        };

    record(&tape, head, state, &mut rows, &mut head_cols);
    for _ in 0..max_steps {
        if tm.is_final(state) {
            return Ok((
                SpaceTimeDiagram {
                    spacetime: st,
                    width: tape_window,
                    rows,
                    head_cols,
                },
                RunStatus::Halted,
            ));
        }
        let (q2, w, mv) = tm
            .rule(state, tape[head])
            .expect("transition table is total on non-final states");
        let next_head: i64 = head as i64
            + match mv {
                Move::Left => -1,
                Move::Stay => 0,
                Move::Right => 1,
            };
        if next_head < 0 || next_head >= tape_window as i64 {
            return Ok((
                SpaceTimeDiagram {
                    spacetime: st,
                    width: tape_window,
                    rows,
                    head_cols,
                },
                RunStatus::OutOfSpace,
            ));
        }
        tape[head] = w;
        head = next_head as usize;
        state = q2;
        record(&tape, head, state, &mut rows, &mut head_cols);
    }
    let status = if tm.is_final(state) {
        RunStatus::Halted
    } else {
        RunStatus::OutOfTime
    };
    Ok((
        SpaceTimeDiagram {
            spacetime: st,
            width: tape_window,
            rows,
            head_cols,
        },
        status,
    ))
}

/// Outcome of a semi-oracle run.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OracleOutcome {
    /// The oracle answered yes to this query.
    HaltedByOracle(Vec<usize>),
    /// An ordinary final state was reached.
    HaltedFinal,
    /// The step budget ran out with no certificate either way.
    RunningAtBudget,
    /// The oracle returned unknown for this query.
    BlockedUnknown(Vec<usize>),
    /// The configuration repeated: the machine provably never halts.
    Looping,
}

/// Run a semi-oracle machine on an unbounded tape. Whenever the query state
/// is current, the word under and right of the head (over the oracle's
/// alphabet) is offered to the oracle: yes halts, no resumes through the
/// transition table, unknown blocks. Exact configuration repetition is
/// detected and certified as looping.
pub fn oracle_run(
    tm: &TuringMachine,
    input: &[usize],
    oracle: &Oracle,
    max_steps: usize,
) -> Result<(OracleOutcome, usize)> {
    let query_state = tm.oracle_state().ok_or_else(|| {
        Error::Validation("machine has no oracle state".into())
    })?;
    for &s in input {
        if !tm.input_symbols().contains(&s) {
            return Err(Error::InvalidSymbol(format!(
                "input symbol {} outside the input alphabet",
                tm.tape_token(s)
            )));
        }
    }
    // Tape as a map, head anywhere on Z.
    let mut tape: HashMap<i64, usize> = input
        .iter()
        .enumerate()
        .map(|(i, &s)| (i as i64, s))
        .collect();
    let mut head: i64 = 0;
    let mut state = tm.initial();
    let mut seen: HashSet<(usize, i64, Vec<(i64, usize)>)> = HashSet::new();

    let snapshot = |state: usize, head: i64, tape: &HashMap<i64, usize>| {
        let mut cells: Vec<(i64, usize)> = tape
            .iter()
            .filter(|(_, &s)| s != tm.blank())
            .map(|(&p, &s)| (p, s))
            .collect();
        cells.sort_unstable();
        (state, head, cells)
    };

    for step in 0..=max_steps {
        if tm.is_final(state) {
            return Ok((OracleOutcome::HaltedFinal, step));
        }
        if !seen.insert(snapshot(state, head, &tape)) {
            return Ok((OracleOutcome::Looping, step));
        }
        if state == query_state {
            let word = read_query(tm, oracle, &tape, head);
            if !word.is_empty() {
                match oracle.query_tape_word(tm, &word)? {
                    super::oracle::Answer::Yes => {
                        return Ok((OracleOutcome::HaltedByOracle(word), step))
                    }
                    super::oracle::Answer::Unknown => {
                        return Ok((OracleOutcome::BlockedUnknown(word), step))
                    }
                    super::oracle::Answer::No => {}
                }
            }
        }
        if step == max_steps {
            break;
        }
        let read = *tape.get(&head).unwrap_or(&tm.blank());
        let (q2, w, mv) = tm
            .rule(state, read)
            .expect("transition table is total on non-final states");
        if w == tm.blank() {
            tape.remove(&head);
        } else {
            tape.insert(head, w);
        }
        head += match mv {
            Move::Left => -1,
            Move::Stay => 0,
            Move::Right => 1,
        };
        state = q2;
    }
    Ok((OracleOutcome::RunningAtBudget, max_steps))
}

/// The maximal word over the oracle's alphabet starting under the head and
/// extending rightward.
fn read_query(
    tm: &TuringMachine,
    oracle: &Oracle,
    tape: &HashMap<i64, usize>,
    head: i64,
) -> Vec<usize> {
    let mut word = Vec::new();
    let mut pos = head;
    loop {
        let s = *tape.get(&pos).unwrap_or(&tm.blank());
        if s == tm.blank() || !oracle.accepts_token(tm.tape_token(s)) {
            break;
        }
        word.push(s);
        pos += 1;
    }
    word
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turing::{fixture_flipper, fixture_querier, fixture_scanner};

    #[test]
    fn scanner_halts_after_scanning() {
        let tm = fixture_scanner();
        let input = tm.parse_input(&["1", "1", "1", "1"]).unwrap();
        let (d, status) = run(&tm, &input, 100, 8).unwrap();
        assert_eq!(status, RunStatus::Halted);
        // Four right-moves plus the final transition: six rows.
        assert_eq!(d.height(), 6);
        assert_eq!(d.head_col(5), 4);
        // Exactly one head per row.
        for row in d.rows() {
            assert_eq!(
                row.iter().filter(|&&c| d.spacetime.is_head(c)).count(),
                1
            );
        }
    }

    #[test]
    fn scanner_out_of_space_on_small_window() {
        let tm = fixture_scanner();
        let input = tm.parse_input(&["1", "1", "1"]).unwrap();
        let (d, status) = run(&tm, &input, 100, 3).unwrap();
        assert_eq!(status, RunStatus::OutOfSpace);
        // The head reaches the last cell and the exiting step is blocked.
        assert_eq!(d.height(), 3);
        assert_eq!(d.head_col(2), 2);
    }

    #[test]
    fn immediate_final_state_gives_one_row() {
        let tm = super::super::TuringMachine::new(
            "idle",
            vec!["q0".into()],
            "q0",
            &["q0"],
            &["1"],
            &["1"],
            "_",
            &[],
            None,
        )
        .unwrap();
        let input = tm.parse_input(&["1"]).unwrap();
        let (d, status) = run(&tm, &input, 10, 4).unwrap();
        assert_eq!(status, RunStatus::Halted);
        assert_eq!(d.height(), 1);
    }

    #[test]
    fn flipper_flips_and_halts_on_last_letter() {
        let tm = fixture_flipper();
        let input = tm.parse_input(&["0", "1", "1", "0"]).unwrap();
        let (d, status) = run(&tm, &input, 100, 8).unwrap();
        assert_eq!(status, RunStatus::Halted);
        let last = d.rows().last().unwrap();
        let toks: Vec<&str> = last
            .iter()
            .map(|&c| d.spacetime.alphabet.token(c))
            .collect();
        // Flipped word with the head resting on its last letter.
        assert_eq!(toks[..4].join(" "), "1 0 0 qf:1");
        assert_eq!(d.height(), 7);
    }

    #[test]
    fn querier_loops_without_oracle_hit() {
        let tm = fixture_querier();
        let oracle = Oracle::empty_explicit(&["a", "b"]);
        let input = tm.parse_input(&["a", "a"]).unwrap();
        let (outcome, _) = oracle_run(&tm, &input, &oracle, 1000).unwrap();
        assert_eq!(outcome, OracleOutcome::Looping);
    }
}
