//! Oracles over 1D words, machine domains at bounded budgets, and
//! finite-sample evidence for the induced order on languages.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::pattern::{Pattern, PatternSet};
use crate::term::{self, SubshiftTerm};

use super::run::{oracle_run, OracleOutcome};
use super::TuringMachine;

/// Answer of a membership query at the current budget. Answers are stable:
/// the same query always returns the same answer.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

/// A membership evaluator for 1D words.
pub enum Oracle {
    /// A finite explicit language: complete knowledge, never unknown.
    Explicit {
        alphabet: Arc<Alphabet>,
        words: BTreeSet<Vec<Symbol>>,
    },
    /// The complement of a term's language. Queries answer through the
    /// exact graph route when available, else through the window
    /// approximation at the scheduled margins; a word still inside every
    /// approximation is unknown.
    TermComplement {
        term: SubshiftTerm,
        margins: Vec<i64>,
    },
}

impl Oracle {
    pub fn empty_explicit(tokens: &[&str]) -> Oracle {
        Oracle::Explicit {
            alphabet: Alphabet::new("oracle", tokens).expect("valid tokens"),
            words: BTreeSet::new(),
        }
    }

    /// Explicit oracle holding every word over `tokens` up to `n_max` that
    /// satisfies the predicate.
    pub fn explicit_from_predicate(
        tokens: &[&str],
        n_max: usize,
        pred: impl Fn(&[Symbol]) -> bool,
    ) -> Oracle {
        let alphabet = Alphabet::new("oracle", tokens).expect("valid tokens");
        let mut words = BTreeSet::new();
        let k = alphabet.len();
        for len in 1..=n_max {
            let mut w = vec![Symbol(0); len];
            loop {
                if pred(&w) {
                    words.insert(w.clone());
                }
                let mut i = 0;
                loop {
                    if i == len {
                        break;
                    }
                    w[i].0 += 1;
                    if (w[i].0 as usize) < k {
                        break;
                    }
                    w[i] = Symbol(0);
                    i += 1;
                }
                if i == len {
                    break;
                }
            }
        }
        Oracle::Explicit { alphabet, words }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        match self {
            Oracle::Explicit { alphabet, .. } => alphabet,
            Oracle::TermComplement { term, .. } => term.alphabet(),
        }
    }

    pub fn accepts_token(&self, token: &str) -> bool {
        self.alphabet().lookup(token).is_ok()
    }

    /// Membership of a word given as oracle-alphabet symbols.
    pub fn query_symbols(&self, word: &[Symbol]) -> Result<Answer> {
        if word.is_empty() {
            return Ok(Answer::No);
        }
        match self {
            Oracle::Explicit { words, .. } => Ok(if words.contains(word) {
                Answer::Yes
            } else {
                Answer::No
            }),
            Oracle::TermComplement { term, margins } => {
                let pat = Pattern::word(term.alphabet().clone(), word)?;
                // Exact route first: in the language means not in the
                // complement, definitively.
                if let Ok(graph) = term::term_graph(term) {
                    let lang = crate::onedim::exact_language(&graph, word.len())?;
                    return Ok(if lang.contains(&pat) {
                        Answer::No
                    } else {
                        Answer::Yes
                    });
                }
                for &m in margins {
                    if !term::contains_window_pattern(term, &pat, m)? {
                        return Ok(Answer::Yes);
                    }
                }
                Ok(Answer::Unknown)
            }
        }
    }
}

/// One machine's sampled domain with an honesty report: words whose status
/// at the budget neither certifies membership nor non-membership.
#[derive(Clone, Debug)]
pub struct DomainSample {
    pub included: PatternSet,
    /// Words with an inconclusive status at the budget.
    pub unresolved: Vec<(Pattern, String)>,
    pub words_checked: usize,
}

/// All input words of length `1..=n_max` on which the machine provably
/// halts within the budget; words that ran out of budget or blocked on an
/// unknown oracle answer are listed as unresolved.
pub fn domain_sample(
    tm: &TuringMachine,
    oracle: &Oracle,
    n_max: usize,
    max_steps: usize,
) -> Result<DomainSample> {
    let input_alpha = machine_input_alphabet(tm);
    let mut included = Vec::new();
    let mut unresolved = Vec::new();
    let mut words_checked = 0usize;
    for word in input_words(tm, n_max) {
        words_checked += 1;
        let (outcome, _) = oracle_run(tm, &word, oracle, max_steps)?;
        let pat = word_pattern(tm, &input_alpha, &word)?;
        match outcome {
            OracleOutcome::HaltedByOracle(_) | OracleOutcome::HaltedFinal => included.push(pat),
            OracleOutcome::Looping => {}
            OracleOutcome::RunningAtBudget => {
                unresolved.push((pat, "step budget exhausted".to_string()))
            }
            OracleOutcome::BlockedUnknown(_) => {
                unresolved.push((pat, "oracle answer unknown".to_string()))
            }
        }
    }
    Ok(DomainSample {
        included: PatternSet::new(1, input_alpha, included)?,
        unresolved,
        words_checked,
    })
}

/// Per-word verdict of [`order_evidence`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    Agree,
    Disagree,
    Inconclusive,
}

/// Finite-sample comparison of a machine's domain against a target word
/// set.
#[derive(Clone, Debug)]
pub struct OrderEvidence {
    pub verdicts: Vec<(Pattern, Verdict, String)>,
    pub disagreements: usize,
    pub inconclusive: usize,
}

impl OrderEvidence {
    /// No disagreement was found; the sample is consistent with the
    /// machine's domain being exactly the target language.
    pub fn consistent(&self) -> bool {
        self.disagreements == 0
    }
}

/// Compare the machine's domain sample against the target: a halt on a word
/// outside the target, or a certified loop on a word inside it, is a
/// disagreement; budget-limited words inside the target are inconclusive.
pub fn order_evidence(
    tm: &TuringMachine,
    oracle: &Oracle,
    target: &PatternSet,
    n_max: usize,
    max_steps: usize,
) -> Result<OrderEvidence> {
    let input_alpha = machine_input_alphabet(tm);
    if *target.alphabet() != input_alpha {
        return Err(Error::AlphabetMismatch(
            "target words must be over the machine input alphabet".into(),
        ));
    }
    let mut verdicts = Vec::new();
    let mut disagreements = 0usize;
    let mut inconclusive = 0usize;
    for word in input_words(tm, n_max) {
        let (outcome, _) = oracle_run(tm, &word, oracle, max_steps)?;
        let pat = word_pattern(tm, &input_alpha, &word)?;
        let in_target = target.contains(&pat);
        let (verdict, why) = match (&outcome, in_target) {
            (OracleOutcome::HaltedByOracle(_) | OracleOutcome::HaltedFinal, true) => {
                (Verdict::Agree, "halts and is in the target".to_string())
            }
            (OracleOutcome::HaltedByOracle(_) | OracleOutcome::HaltedFinal, false) => (
                Verdict::Disagree,
                "halts but the target excludes it".to_string(),
            ),
            (OracleOutcome::Looping, true) => (
                Verdict::Disagree,
                "provably loops but the target includes it".to_string(),
            ),
            (OracleOutcome::Looping, false) => {
                (Verdict::Agree, "loops and is excluded".to_string())
            }
            (OracleOutcome::RunningAtBudget | OracleOutcome::BlockedUnknown(_), true) => (
                Verdict::Inconclusive,
                "included in the target but unresolved at budget".to_string(),
            ),
            (OracleOutcome::RunningAtBudget | OracleOutcome::BlockedUnknown(_), false) => (
                Verdict::Agree,
                "excluded and did not halt within budget".to_string(),
            ),
        };
        match verdict {
            Verdict::Disagree => disagreements += 1,
            Verdict::Inconclusive => inconclusive += 1,
            Verdict::Agree => {}
        }
        verdicts.push((pat, verdict, why));
    }
    Ok(OrderEvidence {
        verdicts,
        disagreements,
        inconclusive,
    })
}

/// The machine's input alphabet as an [`Alphabet`] (token order follows the
/// machine's input declaration).
pub fn machine_input_alphabet(tm: &TuringMachine) -> Arc<Alphabet> {
    let tokens: Vec<&str> = tm.input_tokens();
    Alphabet::new(&format!("{}-input", tm.name), &tokens).expect("valid input tokens")
}

fn word_pattern(
    tm: &TuringMachine,
    alphabet: &Arc<Alphabet>,
    word: &[usize],
) -> Result<Pattern> {
    let syms: Result<Vec<Symbol>> = word
        .iter()
        .map(|&s| alphabet.lookup(tm.tape_token(s)))
        .collect();
    Pattern::word(alphabet.clone(), &syms?)
}

fn input_words(tm: &TuringMachine, n_max: usize) -> Vec<Vec<usize>> {
    let syms = tm.input_symbols().to_vec();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 1..=n_max {
        let mut next = Vec::with_capacity(layer.len() * syms.len());
        for w in &layer {
            for &s in &syms {
                let mut w2 = w.clone();
                w2.push(s);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Membership translation used by `oracle_run`: tape symbols to oracle
/// symbols by token.
impl Oracle {
    pub(crate) fn query_tape_word(
        &self,
        tm: &TuringMachine,
        word: &[usize],
    ) -> Result<Answer> {
        let syms: Result<Vec<Symbol>> = word
            .iter()
            .map(|&s| self.alphabet().lookup(tm.tape_token(s)))
            .collect();
        self.query_symbols(&syms?)
    }
}
