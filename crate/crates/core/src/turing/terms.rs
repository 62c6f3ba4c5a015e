//! Subshift terms carrying machine computations.
//!
//! `machine_term` assembles the three-dimensional term whose planes hold
//! machine runs inside framework rectangles: finite-type conditions over a
//! product of an input layer, three marker-bit layers and the machine-cell
//! layer, with the step rules superposed along the plane axis.
//!
//! `simulation_term` assembles the four-dimensional term of the oracle
//! construction: the base subshift rides the fourth axis in a marked copy
//! of its alphabet and the machine queries it through local alignment
//! conditions; forbidding the halting state leaves exactly the
//! configurations whose first-axis content the machine never accepts.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::geom::{BoxRegion, Point};
use crate::pattern::{Pattern, PatternSet};
use crate::term::{
    self, contains_window_pattern, sample_window_patterns, window_language_nonempty,
    SlidingBlockCode, SubgroupBasis, SubshiftTerm,
};

use super::compile::compile_machine;
use super::oracle::machine_input_alphabet;
use super::{SpaceTime, TuringMachine};

fn bit_alphabet(name: &str, mark: &str) -> Arc<Alphabet> {
    Alphabet::new(name, &[".", mark]).expect("static alphabet")
}

/// Pairs forbidding a difference between a cell and its translate: the
/// finite-type form of "constant along the offset".
fn equality_pairs(alphabet: &Arc<Alphabet>, dim: usize, offset: &Point) -> PatternSet {
    let mut pats = Vec::new();
    for a in alphabet.symbols() {
        for b in alphabet.symbols() {
            if a == b {
                continue;
            }
            pats.push(
                Pattern::new(
                    dim,
                    alphabet.clone(),
                    vec![(Point::zero(dim), a), (offset.clone(), b)],
                )
                .expect("two distinct cells"),
            );
        }
    }
    PatternSet::new(dim, alphabet.clone(), pats).expect("uniform alphabet")
}

fn axis(dim: usize, i: usize) -> Point {
    let mut c = vec![0i64; dim];
    c[i] = 1;
    Point::new(c)
}

/// Embed a 2D pattern into `dim` dimensions, sending x and y to the given
/// axes.
fn embed_pattern(p: &Pattern, dim: usize, x_axis: usize, y_axis: usize) -> Pattern {
    let cells = p
        .cells()
        .iter()
        .map(|(pt, s)| {
            let mut c = vec![0i64; dim];
            c[x_axis] = pt.0[0];
            c[y_axis] = pt.0[1];
            (Point::new(c), *s)
        })
        .collect();
    Pattern::new(dim, p.alphabet().clone(), cells).expect("embedding preserves cells")
}

// ---------------------------------------------------------------------------
// The three-dimensional machine term.
// ---------------------------------------------------------------------------

/// The term whose planes carry machine runs: finite-type conditions applied
/// to the product of the input layer, the three marker layers and the
/// superposed step rules. The named constraint groups `init`, `head`,
/// `stop` and `final` are recorded on the returned term.
pub fn machine_term(tm: &TuringMachine) -> Result<SubshiftTerm> {
    let st = tm.spacetime_alphabet();
    let a_input = machine_input_alphabet(tm);
    let dim = 3;
    let e2 = 1usize;
    let e3 = 2usize;

    // Marker layers with their invariance conditions.
    let w2a = bit_alphabet("w2", "M");
    let w3a = bit_alphabet("w3", "B");
    let w5a = bit_alphabet("w5", "L");
    let w2 = term::finite_type(
        equality_pairs(&w2a, dim, &axis(dim, e3)),
        SubshiftTerm::full_shift(w2a.clone(), dim),
    );
    let w3 = term::finite_type(
        equality_pairs(&w3a, dim, &axis(dim, e2)),
        SubshiftTerm::full_shift(w3a.clone(), dim),
    );
    let w5 = term::finite_type(
        equality_pairs(&w5a, dim, &axis(dim, e3)),
        SubshiftTerm::full_shift(w5a.clone(), dim),
    );
    let w_layers = term::product(w2, term::product(w3, w5)?)?;

    // Step rules on planes: the compiled 2D tile set superposed along e1.
    let steps = SubshiftTerm::sft(compile_machine(tm)?);
    let sp = term::superposition(
        SubgroupBasis::axes(dim, &[e2, e3]),
        SubgroupBasis::axes(dim, &[0]),
        steps,
    );
    if sp.warning().is_some() {
        return Err(Error::Validation("superposition of step rules failed".into()));
    }

    let base = term::product(
        SubshiftTerm::full_shift(a_input.clone(), dim),
        term::product(w_layers, sp)?,
    )?;
    let c3 = base.alphabet().clone();

    // Atom layout: A, w2, w3, w5, O.
    let groups = machine_calc_groups(tm, &st, &a_input, &c3)?;
    let mut union: Vec<Pattern> = Vec::new();
    for (_, ps) in &groups {
        union.extend(ps.iter().cloned());
    }
    let union = PatternSet::new(dim, c3.clone(), union)?;
    let t = term::finite_type(union, base);
    let groups: Vec<(String, Arc<PatternSet>)> = groups
        .into_iter()
        .map(|(n, ps)| (n, Arc::new(ps)))
        .collect();
    Ok(t.with_groups(groups))
}

fn sym5(
    c3: &Arc<Alphabet>,
    a: Symbol,
    w2: bool,
    w3: bool,
    w5: bool,
    o: Symbol,
) -> Symbol {
    c3.from_atom_parts(&[
        a,
        Symbol(w2 as u32),
        Symbol(w3 as u32),
        Symbol(w5 as u32),
        o,
    ])
}

fn machine_calc_groups(
    tm: &TuringMachine,
    st: &SpaceTime,
    a_input: &Arc<Alphabet>,
    c3: &Arc<Alphabet>,
) -> Result<Vec<(String, PatternSet)>> {
    let dim = 3;
    let n = st.len() as u32;
    let bits = [false, true];
    let mut init = Vec::new();
    let mut head = Vec::new();
    let mut stop = Vec::new();
    let mut fin = Vec::new();

    let cell = |a: Symbol, w2: bool, w3: bool, w5: bool, o: Symbol, at: Point| {
        (at, sym5(c3, a, w2, w3, w5, o))
    };
    let single = |cells: Vec<(Point, Symbol)>| {
        Pattern::new(dim, c3.clone(), cells).expect("valid rule pattern")
    };

    // Init: a corner cell holds the initial head on the input layer's
    // letter; other bottom cells hold plain entry letters (matching the
    // input layer) or blanks, with blanks forced on marked cells.
    for a in a_input.symbols() {
        let a_tape = tm.tape_index(a_input.token(a))?;
        for &w2 in &bits {
            for o in 0..n {
                let o = Symbol(o);
                if o != st.head(tm.initial(), a_tape) {
                    init.push(single(vec![cell(
                        a,
                        w2,
                        true,
                        true,
                        o,
                        Point::zero(dim),
                    )]));
                }
            }
            for o in 0..n {
                let o = Symbol(o);
                let (q, s) = st.unpack(o);
                let allowed = if w2 {
                    q.is_none() && s == tm.blank()
                } else {
                    q.is_none() && (s == tm.blank() || s == a_tape)
                };
                if !allowed {
                    init.push(single(vec![cell(
                        a,
                        w2,
                        true,
                        false,
                        o,
                        Point::zero(dim),
                    )]));
                }
            }
        }
    }

    // Head: the initial state appears only on bottom-left corners.
    for a in a_input.symbols() {
        for &w2 in &bits {
            for &w5 in &bits {
                for s in 0..st.tape_size() {
                    let h = st.head(tm.initial(), s);
                    head.push(single(vec![cell(a, w2, false, w5, h, Point::zero(dim))]));
                }
            }
        }
    }

    // Stop and final: edge-column discipline. Left edges anchor on the
    // line bit of the cell itself, right edges on the line bit of the
    // right neighbor (whose machine cell is opaque).
    let e2v = axis(dim, 1);
    let e3v = axis(dim, 2);
    for a1 in a_input.symbols() {
        for a2 in a_input.symbols() {
            for &w2a_ in &bits {
                for &w2b in &bits {
                    for &w3row in &bits {
                        for z1 in 0..n {
                            for z2 in 0..n {
                                let (z1, z2) = (Symbol(z1), Symbol(z2));
                                if st.is_head(z1) && st.is_head(z2) {
                                    continue;
                                }
                                let succ = super::rect::left_edge_successor_pub(tm, st, z1, z2);
                                let involves_final = [z1, z2]
                                    .iter()
                                    .any(|&z| matches!(st.unpack(z), (Some(q), _) if tm.is_final(q)));
                                for top in 0..n {
                                    if top == succ.0 {
                                        continue;
                                    }
                                    let p = single(vec![
                                        cell(a1, w2a_, w3row, true, z1, Point::zero(dim)),
                                        cell(a2, w2b, w3row, false, z2, e2v.clone()),
                                        cell(a1, w2a_, false, true, Symbol(top), e3v.clone()),
                                    ]);
                                    if involves_final {
                                        fin.push(p);
                                    } else {
                                        stop.push(p);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    Ok(vec![
        ("init".to_string(), PatternSet::new(dim, c3.clone(), init)?),
        ("head".to_string(), PatternSet::new(dim, c3.clone(), head)?),
        ("stop".to_string(), PatternSet::new(dim, c3.clone(), stop)?),
        ("final".to_string(), PatternSet::new(dim, c3.clone(), fin)?),
    ])
}

// ---------------------------------------------------------------------------
// The four-dimensional simulation term.
// ---------------------------------------------------------------------------

/// The simulation term with the data needed to verify its slices.
#[derive(Clone, Debug)]
pub struct SimulationTerm {
    term: SubshiftTerm,
    base: SubshiftTerm,
    machine: TuringMachine,
}

impl SimulationTerm {
    pub fn term(&self) -> &SubshiftTerm {
        &self.term
    }

    pub fn base(&self) -> &SubshiftTerm {
        &self.base
    }

    pub fn machine(&self) -> &TuringMachine {
        &self.machine
    }
}

/// Assemble the four-dimensional simulation term over the seven-component
/// alphabet (base letters, their marked copy, machine input letters, three
/// marker bits, machine cells). Constraint groups are recorded on the term
/// under names prefixed `step1` through `step6`.
pub fn simulation_term(tm: &TuringMachine, base: &SubshiftTerm) -> Result<SimulationTerm> {
    if base.dim() != 1 {
        return Err(Error::DimensionMismatch(
            "the simulated base subshift must be one-dimensional".into(),
        ));
    }
    let query_state = tm.oracle_state().ok_or_else(|| {
        Error::Validation("simulation requires a machine with an oracle state".into())
    })?;
    let dim = 4;
    let (e1, e2, e3, e4) = (0usize, 1usize, 2usize, 3usize);
    let a = base.alphabet().clone();
    let a_copy = a.suffixed_copy(&format!("{}-copy", a.name()), "~")?;
    // The machine tape must contain the marked copy of the base alphabet.
    let copy_tape: Result<Vec<usize>> = a_copy
        .tokens()
        .iter()
        .map(|t| tm.tape_index(t))
        .collect();
    let copy_tape = copy_tape.map_err(|_| {
        Error::Validation(
            "machine tape must contain the marked copies of the base letters".into(),
        )
    })?;
    let b_input = machine_input_alphabet(tm);
    let st = tm.spacetime_alphabet();

    let mut groups: Vec<(String, Arc<PatternSet>)> = Vec::new();
    let mut record = |name: &str, ps: PatternSet| -> Arc<PatternSet> {
        let arc = Arc::new(ps);
        groups.push((name.to_string(), arc.clone()));
        arc
    };

    // Step 1: the base subshift, in its marked copy, rides the fourth axis.
    let copy_code = SlidingBlockCode::letterwise(a.clone(), a_copy.clone(), 1, |s| s)?;
    let copied = term::factor(copy_code, base.clone());
    let lifted = term::superposition(
        SubgroupBasis::axes(dim, &[e4]),
        SubgroupBasis::axes(dim, &[e1, e2, e3]),
        copied,
    );
    if lifted.warning().is_some() {
        return Err(Error::Validation("axis lift of the base failed".into()));
    }
    record(
        "step1_oracle_axis",
        PatternSet::empty(dim, a_copy.clone()),
    );

    // Step 6a: one base configuration serves every calculation.
    let sync = record(
        "step6_sync",
        equality_pairs(&a_copy, dim, &axis(dim, e1).add(&axis(dim, e4))),
    );
    let t_copy = term::finite_type_shared(sync, lifted);

    // Step 2: the first-axis content is copied onto the tape axis (input
    // layer) and the entry stays available along time (memory layer).
    let copy_group = record(
        "step2_copy",
        equality_pairs(&b_input, dim, &axis(dim, e1).sub(&axis(dim, e2))),
    );
    let t_b = term::finite_type_shared(copy_group, SubshiftTerm::full_shift(b_input.clone(), dim));
    let memory_group = record(
        "step2_entry_memory",
        equality_pairs(&a, dim, &axis(dim, e3)),
    );
    let t_a = term::finite_type_shared(memory_group, SubshiftTerm::full_shift(a.clone(), dim));

    // Step 3: marker-bit layers with their line invariances.
    let w5a = bit_alphabet("w5", "L");
    let w3a = bit_alphabet("w3", "B");
    let w2a = bit_alphabet("w2", "M");
    let g5 = record("step3_w5", equality_pairs(&w5a, dim, &axis(dim, e3)));
    let g3 = record("step3_w3", equality_pairs(&w3a, dim, &axis(dim, e2)));
    let g2 = record("step3_w2", equality_pairs(&w2a, dim, &axis(dim, e3)));
    let t_w5 = term::finite_type_shared(g5, SubshiftTerm::full_shift(w5a.clone(), dim));
    let t_w3 = term::finite_type_shared(g3, SubshiftTerm::full_shift(w3a.clone(), dim));
    let t_w2 = term::finite_type_shared(g2, SubshiftTerm::full_shift(w2a.clone(), dim));

    // Step 4a: machine step rules on the (tape, time) planes, plus head
    // spacing along the tape.
    let compiled = compile_machine(tm)?;
    let machine_pats: Vec<Pattern> = compiled
        .forbidden()
        .iter()
        .map(|p| embed_pattern(p, dim, e2, e3))
        .collect();
    let machine_group = record(
        "step4_machine",
        PatternSet::new(dim, st.alphabet.clone(), machine_pats)?,
    );
    let heads: Vec<Symbol> = (0..st.len() as u32)
        .map(Symbol)
        .filter(|&s| st.is_head(s))
        .collect();
    let mut spacing = Vec::new();
    let e2v = axis(dim, e2);
    for &h1 in &heads {
        for &h2 in &heads {
            spacing.push(Pattern::new(
                dim,
                st.alphabet.clone(),
                vec![(Point::zero(dim), h1), (e2v.clone(), h2)],
            )?);
            for mid in 0..st.len() as u32 {
                let mid = Symbol(mid);
                if st.is_head(mid) {
                    continue;
                }
                spacing.push(Pattern::new(
                    dim,
                    st.alphabet.clone(),
                    vec![
                        (Point::zero(dim), h1),
                        (e2v.clone(), mid),
                        (e2v.scale(2), h2),
                    ],
                )?);
            }
        }
    }
    let spacing_group = record(
        "step4_head_spacing",
        PatternSet::new(dim, st.alphabet.clone(), spacing)?,
    );

    // Step 5a: the query staircase: a marked-copy tape word climbs the
    // fourth axis one cell per tape step.
    let mut stair = Vec::new();
    let copy_cells: Vec<Symbol> = copy_tape.iter().map(|&s| st.plain(s)).collect();
    let mut stair_sources: Vec<Symbol> = copy_cells.clone();
    for &s in &copy_tape {
        stair_sources.push(st.head(query_state, s));
    }
    let e4v = axis(dim, e4);
    for &o1 in &stair_sources {
        for &o2 in &copy_cells {
            for o3 in 0..st.len() as u32 {
                let o3 = Symbol(o3);
                if o3 == o2 {
                    continue;
                }
                stair.push(Pattern::new(
                    dim,
                    st.alphabet.clone(),
                    vec![
                        (Point::zero(dim), o1),
                        (e2v.clone(), o2),
                        (e4v.clone(), o3),
                    ],
                )?);
            }
        }
    }
    let stair_group = record(
        "step5_staircase",
        PatternSet::new(dim, st.alphabet.clone(), stair)?,
    );

    // Step 6b: the halting state is forbidden outright.
    let mut no_stop = Vec::new();
    for &q in tm.finals() {
        for s in 0..st.tape_size() {
            no_stop.push(Pattern::cell(
                st.alphabet.clone(),
                Point::zero(dim),
                st.head(q, s),
            )?);
        }
    }
    let no_stop_group = record(
        "step6_no_stop",
        PatternSet::new(dim, st.alphabet.clone(), no_stop)?,
    );

    let t_o = term::finite_type_shared(
        no_stop_group,
        term::finite_type_shared(
            stair_group,
            term::finite_type_shared(
                spacing_group,
                term::finite_type_shared(
                    machine_group,
                    SubshiftTerm::full_shift(st.alphabet.clone(), dim),
                ),
            ),
        ),
    );

    // Layer product: bits then machine cells.
    let t_bits_o = term::product(t_w5, term::product(t_w3, term::product(t_w2, t_o)?)?)?;

    // Step 4b: the entry layout ties the bottom rows of rectangles to the
    // input layer. Atom layout here: B, w5, w3, w2, O.
    let bfo = term::product(t_b, t_bits_o)?;
    let c_bfo = bfo.alphabet().clone();
    let entry_layout = record(
        "step4_entry_layout",
        entry_layout_patterns(tm, &st, &b_input, &c_bfo)?,
    );
    let t_bfo = term::finite_type_shared(entry_layout, bfo);

    // Step 5b: cells carrying marked-copy tape content agree with the
    // oracle layer. Atom layout: Acopy, B, w5, w3, w2, O.
    let abfo = term::product(t_copy, t_bfo)?;
    let c_abfo = abfo.alphabet().clone();
    let line_match = record(
        "step5_line_match",
        line_match_patterns(&st, &a_copy, &copy_tape, query_state, &c_abfo)?,
    );
    let t_abfo = term::finite_type_shared(line_match, abfo);

    let term_full = term::product(t_a, t_abfo)?;
    let term_full = term_full.with_groups(groups);
    Ok(SimulationTerm {
        term: term_full,
        base: base.clone(),
        machine: tm.clone(),
    })
}

fn entry_layout_patterns(
    tm: &TuringMachine,
    st: &SpaceTime,
    b_input: &Arc<Alphabet>,
    c_bfo: &Arc<Alphabet>,
) -> Result<PatternSet> {
    let dim = 4;
    let n = st.len() as u32;
    let bits = [false, true];
    let mut out = Vec::new();
    let cell = |b: Symbol, w5: bool, w3: bool, w2: bool, o: Symbol| -> Symbol {
        c_bfo.from_atom_parts(&[
            b,
            Symbol(w5 as u32),
            Symbol(w3 as u32),
            Symbol(w2 as u32),
            o,
        ])
    };
    for b in b_input.symbols() {
        let b_tape = tm.tape_index(b_input.token(b))?;
        for &w2 in &bits {
            // Corner cells: the initial head on the input-layer letter.
            for o in 0..n {
                let o = Symbol(o);
                if o != st.head(tm.initial(), b_tape) {
                    out.push(Pattern::cell(
                        c_bfo.clone(),
                        Point::zero(dim),
                        cell(b, true, true, w2, o),
                    )?);
                }
            }
            // Other bottom cells: a plain copy of the input letter, or a
            // blank; marked cells must be blank.
            for o in 0..n {
                let o = Symbol(o);
                let (q, s) = st.unpack(o);
                let allowed = if w2 {
                    q.is_none() && s == tm.blank()
                } else {
                    q.is_none() && (s == tm.blank() || s == b_tape)
                };
                if !allowed {
                    out.push(Pattern::cell(
                        c_bfo.clone(),
                        Point::zero(dim),
                        cell(b, false, true, w2, o),
                    )?);
                }
            }
        }
    }
    PatternSet::new(dim, c_bfo.clone(), out)
}

fn line_match_patterns(
    st: &SpaceTime,
    a_copy: &Arc<Alphabet>,
    copy_tape: &[usize],
    query_state: usize,
    c_abfo: &Arc<Alphabet>,
) -> Result<PatternSet> {
    let dim = 4;
    let bits = [false, true];
    let mut out = Vec::new();
    // Atom layout: Acopy, B, w5, w3, w2, O.
    let b_len = c_abfo.atoms()[1].len() as u32;
    let cell = |ac: Symbol, b: Symbol, w5: bool, w3: bool, w2: bool, o: Symbol| -> Symbol {
        c_abfo.from_atom_parts(&[
            ac,
            b,
            Symbol(w5 as u32),
            Symbol(w3 as u32),
            Symbol(w2 as u32),
            o,
        ])
    };
    for (i, &tape_sym) in copy_tape.iter().enumerate() {
        // Cells whose machine component carries the i-th marked letter
        // (plainly or under the query head) must carry it on the oracle
        // layer too.
        for o in [st.plain(tape_sym), st.head(query_state, tape_sym)] {
            for ac in a_copy.symbols() {
                if ac.0 as usize == i {
                    continue;
                }
                for b in 0..b_len {
                    for &w5 in &bits {
                        for &w3 in &bits {
                            for &w2 in &bits {
                                out.push(Pattern::cell(
                                    c_abfo.clone(),
                                    Point::zero(dim),
                                    cell(ac, Symbol(b), w5, w3, w2, o),
                                )?);
                            }
                        }
                    }
                }
            }
        }
    }
    PatternSet::new(dim, c_abfo.clone(), out)
}

/// Outcome of the finite-scale checks on a simulation term.
#[derive(Clone, Debug)]
pub struct SimulationReport {
    pub base_nonempty: bool,
    pub term_nonempty: bool,
    pub emptiness_consistent: bool,
    pub fibers_checked: usize,
    pub fiber_violations: usize,
    pub samples: usize,
    pub sample_truncated: bool,
    pub mismatch_probe_excluded: bool,
    pub staircase_probe_excluded: Option<bool>,
}

impl SimulationReport {
    pub fn passed(&self) -> bool {
        self.emptiness_consistent
            && self.fiber_violations == 0
            && self.mismatch_probe_excluded
            && self.staircase_probe_excluded.unwrap_or(true)
    }
}

/// Finite-scale checks: emptiness propagates from the base, sampled window
/// patterns have fourth-axis fibers inside the base's window language, and
/// locally mismatched oracle probes are excluded.
pub fn verify_simulation_slices(
    sim: &SimulationTerm,
    tiny: &BoxRegion,
    margin: i64,
) -> Result<SimulationReport> {
    if tiny.dim() != 4 {
        return Err(Error::DimensionMismatch(
            "simulation windows are four-dimensional".into(),
        ));
    }
    if tiny.cell_count() > 12 {
        return Err(Error::WindowOutOfRange(format!(
            "simulation windows are capped at 12 cells, got {}",
            tiny.cell_count()
        )));
    }
    let base = &sim.base;
    let sigma = &sim.term;
    let base_nonempty = window_language_nonempty(base, &BoxRegion::line(1), margin)?;
    let term_nonempty = window_language_nonempty(sigma, tiny, margin)?;
    let emptiness_consistent = base_nonempty == term_nonempty;

    // Fiber containment on a bounded sample.
    let (samples, truncated) = sample_window_patterns(sigma, tiny, margin, 48)?;
    let mut fibers_checked = 0usize;
    let mut fiber_violations = 0usize;
    let alphabet = sigma.alphabet();
    for pat in &samples {
        let mut fibers: BTreeMap<(i64, i64, i64), Vec<(i64, Symbol)>> = BTreeMap::new();
        for (p, s) in pat.cells() {
            let parts = alphabet.atom_parts(*s);
            // Atom 1 is the marked copy of the base alphabet.
            fibers
                .entry((p.0[0], p.0[1], p.0[2]))
                .or_default()
                .push((p.0[3], parts[1]));
        }
        for (_, mut cells) in fibers {
            cells.sort_by_key(|(l, _)| *l);
            let word: Vec<(Point, Symbol)> = cells
                .iter()
                .map(|(l, s)| (Point::new(vec![*l]), *s))
                .collect();
            let fiber = Pattern::new(1, base.alphabet().clone(), word)?;
            fibers_checked += 1;
            if !contains_window_pattern(base, &fiber, margin)? {
                fiber_violations += 1;
            }
        }
    }

    // A query head on a marked letter that disagrees with the oracle layer
    // must be inadmissible.
    let st = sim.machine.spacetime_alphabet();
    let query_state = sim.machine.oracle_state().expect("simulation machine");
    let a_copy_token = format!("{}~", base.alphabet().token(Symbol(0)));
    let wrong_copy_token = format!("{}~", base.alphabet().token(Symbol(1.min(base.alphabet().len() as u32 - 1))));
    let mismatch_probe_excluded = if base.alphabet().len() >= 2 {
        let tape_first = sim.machine.tape_index(&a_copy_token)?;
        let probe_cell = mismatch_probe_symbol(
            sigma.alphabet(),
            &st,
            query_state,
            tape_first,
            &wrong_copy_token,
        )?;
        let probe = Pattern::cell(sigma.alphabet().clone(), tiny.lo().clone(), probe_cell)?;
        !contains_window_pattern(sigma, &probe, margin)?
    } else {
        true
    };

    // Staircase probe when the window spans the tape and oracle axes.
    let staircase_probe_excluded = if tiny.side(1) >= 2 && tiny.side(3) >= 2 && base.alphabet().len() >= 2
    {
        Some(staircase_probe(sim, tiny, margin)?)
    } else {
        None
    };

    Ok(SimulationReport {
        base_nonempty,
        term_nonempty,
        emptiness_consistent,
        fibers_checked,
        fiber_violations,
        samples: samples.len(),
        sample_truncated: truncated,
        mismatch_probe_excluded,
        staircase_probe_excluded,
    })
}

fn mismatch_probe_symbol(
    c: &Arc<Alphabet>,
    st: &SpaceTime,
    query_state: usize,
    tape_first_copy: usize,
    wrong_copy_token: &str,
) -> Result<Symbol> {
    // Atom layout: A, Acopy, B, w5, w3, w2, O.
    let atoms = c.atoms();
    let wrong_copy = atoms[1].lookup(wrong_copy_token)?;
    Ok(c.from_atom_parts(&[
        Symbol(0),
        wrong_copy,
        Symbol(0),
        Symbol(0),
        Symbol(0),
        Symbol(0),
        st.head(query_state, tape_first_copy),
    ]))
}

fn staircase_probe(sim: &SimulationTerm, tiny: &BoxRegion, margin: i64) -> Result<bool> {
    let sigma = &sim.term;
    let c = sigma.alphabet().clone();
    let st = sim.machine.spacetime_alphabet();
    let base_alpha = sim.base.alphabet();
    let tok0 = format!("{}~", base_alpha.token(Symbol(0)));
    let tok1 = format!("{}~", base_alpha.token(Symbol(1)));
    let t0 = sim.machine.tape_index(&tok0)?;
    let t1 = sim.machine.tape_index(&tok1)?;
    let atoms = c.atoms();
    let copy0 = atoms[1].lookup(&tok0)?;
    let copy1 = atoms[1].lookup(&tok1)?;
    let mk = |copy: Symbol, o: Symbol| {
        c.from_atom_parts(&[
            Symbol(0),
            copy,
            Symbol(0),
            Symbol(0),
            Symbol(0),
            Symbol(0),
            o,
        ])
    };
    let lo = tiny.lo();
    let u = lo.clone();
    let u_e2 = lo.add(&Point::new(vec![0, 1, 0, 0]));
    let u_e4 = lo.add(&Point::new(vec![0, 0, 0, 1]));
    // Tape carries t0 then t1; the cell above along the oracle axis claims
    // t0, violating the staircase.
    let probe = Pattern::new(
        4,
        c.clone(),
        vec![
            (u, mk(copy0, st.plain(t0))),
            (u_e2, mk(copy1, st.plain(t1))),
            (u_e4, mk(copy0, st.plain(t0))),
        ],
    )?;
    Ok(!contains_window_pattern(sigma, &probe, margin)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tileset::TileSet;
    use crate::turing::compile::free_successor;
    use crate::turing::{fixture_scanner, Move};

    fn sigma_machine() -> TuringMachine {
        TuringMachine::new(
            "osim",
            vec!["q?".into(), "qs".into()],
            "q?",
            &["qs"],
            &["x", "y"],
            &["x", "y", "a", "b", "a~", "b~"],
            "_",
            &[
                ("q?", "x", "q?", "x", Move::Right),
                ("q?", "y", "q?", "y", Move::Right),
                ("q?", "a", "q?", "a", Move::Right),
                ("q?", "b", "q?", "b", Move::Right),
                ("q?", "a~", "q?", "a~", Move::Right),
                ("q?", "b~", "q?", "b~", Move::Right),
                ("q?", "_", "q?", "_", Move::Right),
            ],
            Some("q?"),
        )
        .unwrap()
    }

    fn base_full() -> SubshiftTerm {
        SubshiftTerm::full_shift(Alphabet::new("ab", &["a", "b"]).unwrap(), 1)
    }

    fn base_empty() -> SubshiftTerm {
        let a = Alphabet::new("ab", &["a", "b"]).unwrap();
        let all = PatternSet::new(
            1,
            a.clone(),
            vec![
                Pattern::word_from_tokens(&a, &["a"]).unwrap(),
                Pattern::word_from_tokens(&a, &["b"]).unwrap(),
            ],
        )
        .unwrap();
        term::finite_type(all, SubshiftTerm::full_shift(a, 1))
    }

    #[test]
    fn machine_term_shape() {
        let t = machine_term(&fixture_scanner()).unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.alphabet().atom_count(), 5);
        // Operator spine: finite type over a product tower over a
        // superposition of a tile set.
        let seq = t.node_sequence();
        assert_eq!(seq.first(), Some(&"finite-type"));
        let mut compact = seq.clone();
        compact.dedup();
        assert_eq!(
            compact,
            vec!["finite-type", "product", "superposition", "sft"]
        );
        for name in ["init", "head", "stop", "final"] {
            assert!(t.constraint_group(name).is_some(), "missing group {name}");
        }
    }

    #[test]
    fn machine_term_window_contains_allowed_transitions() {
        let tm = fixture_scanner();
        let st = tm.spacetime_alphabet();
        let t = machine_term(&tm).unwrap();
        let c3 = t.alphabet().clone();
        let a_input = machine_input_alphabet(&tm);
        // Every allowed transition pattern, lifted with quiet bits, is in
        // the window language.
        let n = st.len() as u32;
        let initial = tm.initial();
        let involves_initial = |s: Symbol| matches!(st.unpack(s), (Some(q), _) if q == initial);
        let mut checked = 0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if [a, b, c].iter().any(|&v| involves_initial(Symbol(v))) {
                        continue; // the initial state lives only on corners
                    }
                    if let Some(top) =
                        free_successor(&tm, &st, Symbol(a), Symbol(b), Symbol(c))
                    {
                        let lift = |o: Symbol, x: i64, y: i64| {
                            (
                                Point::new(vec![0, x, y]),
                                sym5(&c3, a_input.symbols().next().unwrap(), false, false, false, o),
                            )
                        };
                        let pat = Pattern::new(
                            3,
                            c3.clone(),
                            vec![
                                lift(Symbol(a), 0, 0),
                                lift(Symbol(b), 1, 0),
                                lift(Symbol(c), 2, 0),
                                lift(top, 1, 1),
                            ],
                        )
                        .unwrap();
                        assert!(
                            contains_window_pattern(&t, &pat, 0).unwrap(),
                            "transition missing from the window language"
                        );
                        checked += 1;
                        if checked >= 12 {
                            return;
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn simulation_term_structure() {
        let sim = simulation_term(&sigma_machine(), &base_full()).unwrap();
        let t = sim.term();
        assert_eq!(t.dim(), 4);
        assert_eq!(t.alphabet().atom_count(), 7);
        // Machine cells are one component.
        let atoms = t.alphabet().atoms();
        assert_eq!(atoms[6].len(), sigma_machine().spacetime_alphabet().len());
        for step in 1..=6 {
            let prefix = format!("step{step}");
            assert!(
                t.constraint_groups()
                    .iter()
                    .any(|(n, _)| n.starts_with(&prefix)),
                "missing group for {prefix}"
            );
        }
    }

    #[test]
    fn simulation_emptiness_and_probes() {
        let tiny = BoxRegion::new(
            Point::new(vec![0, 0, 0, 0]),
            Point::new(vec![0, 1, 0, 1]),
        )
        .unwrap();
        let sim = simulation_term(&sigma_machine(), &base_full()).unwrap();
        let report = verify_simulation_slices(&sim, &tiny, 0).unwrap();
        assert!(report.base_nonempty);
        assert!(report.term_nonempty);
        assert!(report.passed(), "{report:?}");

        let sim_empty = simulation_term(&sigma_machine(), &base_empty()).unwrap();
        let report = verify_simulation_slices(&sim_empty, &tiny, 0).unwrap();
        assert!(!report.base_nonempty);
        assert!(!report.term_nonempty);
        assert!(report.emptiness_consistent);
    }

    #[test]
    fn simulation_fibers_respect_constrained_base() {
        // Base forbids the marked word b b; fibers of sampled patterns
        // must avoid it.
        let a = Alphabet::new("ab", &["a", "b"]).unwrap();
        let golden = SubshiftTerm::sft(TileSet::forbid_words("g", a, &["b b"]).unwrap());
        let sim = simulation_term(&sigma_machine(), &golden).unwrap();
        let tiny = BoxRegion::new(
            Point::new(vec![0, 0, 0, 0]),
            Point::new(vec![0, 0, 0, 3]),
        )
        .unwrap();
        let report = verify_simulation_slices(&sim, &tiny, 1).unwrap();
        assert!(report.fibers_checked > 0);
        assert_eq!(report.fiber_violations, 0);
        assert!(report.passed(), "{report:?}");
    }
}
