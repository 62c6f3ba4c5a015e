//! Acceptance suite: one test per criterion, each printing a pass line and
//! holding its stated time budget. Expected values come from independent
//! oracles computed inside the test (naive filters, hand-stepped runs,
//! direct recurrences), never from the code paths under test.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tilings::onedim::{exact_language, sft_to_graph, word_counts};
use tilings::solver::{enumerate_admissible, RegionProblem};
use tilings::substitution::{expand, verify_framework_proposition, Substitution};
use tilings::term::{
    self, compare_window_languages, exactness_margin, term_graph, upper_language, SubshiftTerm,
};
use tilings::turing::{
    self, check_diagram, compile_machine, domain_sample, order_evidence, rect_cross_check,
    simulation_term, verify_simulation_slices, Oracle,
};
use tilings::{Alphabet, BoxRegion, Pattern, PatternSet, Point, Symbol, TileSet};

fn bin() -> Arc<Alphabet> {
    Alphabet::new("bin", &["0", "1"]).unwrap()
}

fn golden_tileset() -> TileSet {
    TileSet::forbid_words("golden", bin(), &["1 1"]).unwrap()
}

#[test]
fn criterion_1_golden_mean_counts() {
    let start = Instant::now();
    // Fibonacci counts 2, 3, 5, ..., 17711 for lengths 1..=20.
    let mut expect = vec![2u64, 3];
    while expect.len() < 20 {
        let k = expect.len();
        expect.push(expect[k - 1] + expect[k - 2]);
    }
    assert_eq!(*expect.last().unwrap(), 17711);

    let g = sft_to_graph(&golden_tileset()).unwrap();
    let counts = word_counts(&g, 20).unwrap();
    for (i, &want) in expect.iter().enumerate() {
        assert_eq!(counts[i], want.into(), "length {}", i + 1);
    }
    // The window semantics at sufficient margin agrees for n <= 10.
    let t = SubshiftTerm::sft(golden_tileset());
    let margin = exactness_margin(&t).unwrap();
    for n in 1..=10usize {
        let upper = upper_language(&t, &BoxRegion::line(n as i64), margin).unwrap();
        let exact = exact_language(&g, n).unwrap();
        assert_eq!(upper, exact, "window length {n}");
        assert_eq!(upper.len() as u64, expect[n - 1]);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!("criterion 1: PASS (golden-mean counts, {elapsed:?})");
}

#[test]
fn criterion_2_solver_oracle_sweep() {
    let start = Instant::now();
    let a = bin();
    // All patterns with support inside a 2x2 box: 80 of them.
    let support = BoxRegion::grid(2, 2);
    let support_pts = support.points();
    let mut all_patterns: Vec<Pattern> = Vec::new();
    for mask in 1u32..16 {
        let pts: Vec<Point> = support_pts
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, p)| p.clone())
            .collect();
        let k = pts.len();
        for assign in 0..(1u32 << k) {
            let cells: Vec<(Point, Symbol)> = pts
                .iter()
                .enumerate()
                .map(|(i, p)| (p.clone(), Symbol((assign >> i) & 1)))
                .collect();
            all_patterns.push(Pattern::new(2, a.clone(), cells).unwrap());
        }
    }
    assert_eq!(all_patterns.len(), 80);

    // Tile sets: all singles, then seeded pairs, capped at 500.
    let mut tilesets: Vec<Vec<Pattern>> = all_patterns.iter().map(|p| vec![p.clone()]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    while tilesets.len() < 500 {
        let i = rng.gen_range(0..all_patterns.len());
        let j = rng.gen_range(0..all_patterns.len());
        if i == j {
            continue;
        }
        tilesets.push(vec![all_patterns[i].clone(), all_patterns[j].clone()]);
    }

    let region = BoxRegion::grid(4, 4);
    let cells = region.points();
    // Precompute placement offsets of a normalized pattern inside 4x4.
    let cell_index =
        |x: i64, y: i64| -> Option<usize> { (x >= 0 && x < 4 && y >= 0 && y < 4).then(|| (y * 4 + x) as usize) };
    for (ti, pats) in tilesets.iter().enumerate() {
        let forbidden = PatternSet::new(2, a.clone(), pats.clone()).unwrap();
        let ts = TileSet::new("sweep", a.clone(), 2, forbidden).unwrap();
        let rp = RegionProblem::new(ts.clone(), region.clone()).unwrap();
        let got = enumerate_admissible(&rp);
        assert!(!got.truncated);
        let got_masks: BTreeSet<u16> = got
            .patterns
            .iter()
            .map(|p| {
                let mut m = 0u16;
                for (i, cell) in cells.iter().enumerate() {
                    if p.get(cell).unwrap() == Symbol(1) {
                        m |= 1 << i;
                    }
                }
                m
            })
            .collect();

        // Naive filter over all 2^16 assignments on raw bitmasks.
        let mut placements: Vec<Vec<(usize, u32)>> = Vec::new();
        for p in ts.forbidden().iter() {
            for dy in -4i64..4 {
                for dx in -4i64..4 {
                    let mut cellreqs = Vec::new();
                    let mut ok = true;
                    for (pt, s) in p.cells() {
                        match cell_index(pt.0[0] + dx, pt.0[1] + dy) {
                            Some(ci) => cellreqs.push((ci, s.0)),
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok {
                        placements.push(cellreqs);
                    }
                }
            }
        }
        let mut expect: BTreeSet<u16> = BTreeSet::new();
        'mask: for mask in 0u32..(1 << 16) {
            for pl in &placements {
                if pl
                    .iter()
                    .all(|&(ci, v)| ((mask >> ci) & 1) == v)
                {
                    continue 'mask;
                }
            }
            expect.insert(mask as u16);
        }
        assert_eq!(got_masks, expect, "tile set {ti}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!("criterion 2: PASS (500 tile sets vs naive filter, {elapsed:?})");
}

#[test]
fn criterion_3_closure_identities() {
    let start = Instant::now();
    // Pair 1: finite type on the full shift is the directly built tile set.
    let ft = term::finite_type(
        golden_tileset().forbidden().clone(),
        SubshiftTerm::full_shift(bin(), 1),
    );
    let direct = SubshiftTerm::sft(golden_tileset());
    let cmp = compare_window_languages(&ft, &direct, 5, 2).unwrap();
    assert!(cmp.all_equal(), "pair 1:\n{cmp}");

    // Pair 2: the same with two forbidden words.
    let two = TileSet::forbid_words("alt", bin(), &["0 0", "1 1"]).unwrap();
    let ft2 = term::finite_type(two.forbidden().clone(), SubshiftTerm::full_shift(bin(), 1));
    let direct2 = SubshiftTerm::sft(two.clone());
    let cmp = compare_window_languages(&ft2, &direct2, 5, 2).unwrap();
    assert!(cmp.all_equal(), "pair 2:\n{cmp}");

    // Pair 3: superposing the alternating shift row-wise equals the 2D tile
    // set with the same row constraints.
    let g = term::SubgroupBasis::axes(2, &[0]);
    let g2 = term::SubgroupBasis::axes(2, &[1]);
    let sp = term::superposition(g, g2, SubshiftTerm::sft(two.clone()));
    assert!(sp.warning().is_none());
    let a = bin();
    let rows_2d: Vec<Pattern> = two
        .forbidden()
        .iter()
        .map(|p| {
            let cells = p
                .cells()
                .iter()
                .map(|(pt, s)| (Point::new(vec![pt.0[0], 0]), *s))
                .collect();
            Pattern::new(2, a.clone(), cells).unwrap()
        })
        .collect();
    let direct_2d = SubshiftTerm::sft(
        TileSet::new(
            "rows",
            a.clone(),
            2,
            PatternSet::new(2, a.clone(), rows_2d).unwrap(),
        )
        .unwrap(),
    );
    let cmp = compare_window_languages(&sp, &direct_2d, 5, 1).unwrap();
    assert!(cmp.all_equal(), "pair 3:\n{cmp}");

    // Sanity on the negative side: the golden mean is not the full shift.
    let cmp = compare_window_languages(&direct, &SubshiftTerm::full_shift(bin(), 1), 3, 0).unwrap();
    let diff = cmp.first_disagreement().unwrap();
    assert_eq!(diff.n, 1);
    assert_eq!((diff.count_left, diff.count_right), (3, 4));

    let elapsed = start.elapsed();
    println!("criterion 3: PASS (closure identities on 3 fixture pairs, {elapsed:?})");
}

#[test]
fn criterion_4_substitution_counting() {
    let start = Instant::now();
    let marks = |e: &tilings::substitution::Expansion| -> u64 {
        e.count(tilings::substitution::marker_alphabet().lookup("b").unwrap())
    };
    for n in [2u32, 3, 5] {
        let s = Substitution::diagonal(n as usize).unwrap();
        let blank = s.alphabet().lookup("o").unwrap();
        let mark = s.alphabet().lookup("b").unwrap();
        for letter in [blank, mark] {
            let mut prev = None;
            for t in 1..=4u32 {
                if (n as u64).pow(t) > 8192 {
                    break;
                }
                let b = marks(&expand(&s, letter, t).unwrap());
                if let Some(p) = prev {
                    assert_eq!(
                        b,
                        (n as u64 - 1) * (n as u64).pow(2 * (t - 1)) + p,
                        "n={n} t={t}"
                    );
                }
                prev = Some(b);
            }
        }
    }
    let s2 = Substitution::diagonal(2).unwrap();
    let blank = s2.alphabet().lookup("o").unwrap();
    let seq: Vec<u64> = (1..=4).map(|t| marks(&expand(&s2, blank, t).unwrap())).collect();
    assert_eq!(seq, vec![1, 5, 21, 85]);
    let elapsed = start.elapsed();
    println!("criterion 4: PASS (substitution counting law, {elapsed:?})");
}

#[test]
fn criterion_5_framework_proposition() {
    let start = Instant::now();
    let report = verify_framework_proposition(3, None).unwrap();
    assert!(report.failures.is_empty(), "{}", report.render());
    assert!(report.growth_misses.is_empty(), "{}", report.render());
    assert_eq!(report.observed_width_exps(), vec![1, 2, 3]);
    // Every combination with exponents up to (2, 2) at both tested entry
    // periods is observed, and its grown partners exist.
    for m in 1..=2u32 {
        for p in 1..=2u32 {
            for n in 1..=2u32 {
                for probe in [(m, p, n), (m + 1, p, n), (m, p + 1, n)] {
                    assert!(
                        report.observed.iter().any(|(c, _)| *c == probe),
                        "missing {probe:?}"
                    );
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "criterion 5: PASS (rectangle partition and growth witnesses, {elapsed:?})"
    );
}

#[test]
fn criterion_6_machine_compilation() {
    let start = Instant::now();
    let rect = tilings::substitution::Rectangle::new(Point::new(vec![0, 0]), 25, 9, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (tm, word) in [
        (turing::fixture_scanner(), vec!["1", "1", "1", "1"]),
        (turing::fixture_flipper(), vec!["0", "1", "1", "0"]),
    ] {
        let input = tm.parse_input(&word).unwrap();
        // Soundness: the genuine diagram has no violations.
        let ts = compile_machine(&tm).unwrap();
        let (d, _) = turing::run(&tm, &input, 16 * 12, 16).unwrap();
        assert!(check_diagram(&ts, &d).unwrap().is_empty());

        // Uniqueness: the pinned rectangle has exactly one filling and it
        // equals the simulated diagram.
        let check = rect_cross_check(&tm, &rect, &input).unwrap();
        assert_eq!(check.fillings_found, 1, "{}", tm.name);
        assert!(check.matches, "{}", tm.name);

        // Corruption: 50 random interior flips each yield a violation.
        let st = tm.spacetime_alphabet();
        let pat = d.to_pattern();
        let w = d.width as i64;
        let h = d.height() as i64;
        for _ in 0..50 {
            let x = rng.gen_range(2..w - 2);
            let y = rng.gen_range(0..h - 1);
            let p = Point::new(vec![x, y]);
            let old = pat.get(&p).unwrap();
            let mut new = old;
            while new == old {
                new = Symbol(rng.gen_range(0..st.len() as u32));
            }
            let cells: Vec<(Point, Symbol)> = pat
                .cells()
                .iter()
                .map(|(q, s)| (q.clone(), if *q == p { new } else { *s }))
                .collect();
            let corrupted = Pattern::new(2, st.alphabet.clone(), cells).unwrap();
            assert!(
                !tilings::solver::violations(&ts, &corrupted).unwrap().is_empty(),
                "undetected corruption at {p:?} in {}",
                tm.name
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    println!("criterion 6: PASS (compilation soundness and uniqueness, {elapsed:?})");
}

#[test]
fn criterion_7_semi_oracle_semantics() {
    let start = Instant::now();
    let tm = turing::fixture_querier();
    let oracle = Oracle::explicit_from_predicate(&["a", "b"], 8, |w| w.iter().any(|s| s.0 == 1));
    let sample = domain_sample(&tm, &oracle, 6, 10_000).unwrap();
    assert!(sample.unresolved.is_empty(), "honesty report not empty");

    // Direct filter oracle.
    let a = turing::machine_input_alphabet(&tm);
    let mut expect = Vec::new();
    for len in 1..=6usize {
        for idx in 0..(1usize << len) {
            let syms: Vec<Symbol> = (0..len).map(|i| Symbol(((idx >> i) & 1) as u32)).collect();
            if syms.iter().any(|s| s.0 == 1) {
                expect.push(Pattern::word(a.clone(), &syms).unwrap());
            }
        }
    }
    let expect = PatternSet::new(1, a, expect).unwrap();
    assert_eq!(sample.included, expect);

    let ev = order_evidence(&tm, &oracle, &expect, 6, 10_000).unwrap();
    assert_eq!(ev.disagreements, 0);
    let elapsed = start.elapsed();
    println!("criterion 7: PASS (semi-oracle domain and order evidence, {elapsed:?})");
}

#[test]
fn criterion_8_window_semantics_contracts() {
    let start = Instant::now();
    // Twenty seeded random 1D terms of depth <= 3: the window semantics at
    // the certified margin equals the exact graph language.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut built = 0usize;
    while built < 20 {
        let t = random_term(&mut rng, 0);
        let Some(margin) = exactness_margin(&t) else {
            continue;
        };
        // Keep the certified margins at desk scale: wide margins mean very
        // long extension windows.
        if margin > 200 {
            continue;
        }
        let Ok(graph) = term_graph(&t) else { continue };
        for n in 1..=4usize {
            let upper = upper_language(&t, &BoxRegion::line(n as i64), margin).unwrap();
            let exact = exact_language(&graph, n).unwrap();
            assert_eq!(upper, exact, "term {built}, n={n}");
        }
        built += 1;
    }

    // 2D terms: margins 0, 1, 2 shrink the window language monotonically.
    let hard = {
        let a = bin();
        let one = a.lookup("1").unwrap();
        let h = Pattern::new(
            2,
            a.clone(),
            vec![(Point::new(vec![0, 0]), one), (Point::new(vec![1, 0]), one)],
        )
        .unwrap();
        let v = Pattern::new(
            2,
            a.clone(),
            vec![(Point::new(vec![0, 0]), one), (Point::new(vec![0, 1]), one)],
        )
        .unwrap();
        SubshiftTerm::sft(
            TileSet::new(
                "hard",
                a.clone(),
                2,
                PatternSet::new(2, a, vec![h, v]).unwrap(),
            )
            .unwrap(),
        )
    };
    let sp = term::superposition(
        term::SubgroupBasis::axes(2, &[0]),
        term::SubgroupBasis::axes(2, &[1]),
        SubshiftTerm::sft(golden_tileset()),
    );
    for t in [hard, sp] {
        let w = BoxRegion::grid(3, 3);
        let l0 = upper_language(&t, &w, 0).unwrap();
        let l1 = upper_language(&t, &w, 1).unwrap();
        let l2 = upper_language(&t, &w, 2).unwrap();
        assert!(l1.is_subset_of(&l0));
        assert!(l2.is_subset_of(&l1));
    }
    let elapsed = start.elapsed();
    println!("criterion 8: PASS (window semantics contracts, {elapsed:?})");
}

fn random_term(rng: &mut ChaCha8Rng, depth: usize) -> SubshiftTerm {
    let leaf = |rng: &mut ChaCha8Rng| -> SubshiftTerm {
        if rng.gen_bool(0.3) {
            SubshiftTerm::full_shift(bin(), 1)
        } else {
            // Random short forbidden words over the binary alphabet.
            let a = bin();
            let mut pats = Vec::new();
            for _ in 0..rng.gen_range(1..=2) {
                let len = rng.gen_range(2..=3);
                let syms: Vec<Symbol> = (0..len).map(|_| Symbol(rng.gen_range(0..2))).collect();
                pats.push(Pattern::word(a.clone(), &syms).unwrap());
            }
            SubshiftTerm::sft(
                TileSet::new(
                    "rnd",
                    a.clone(),
                    1,
                    PatternSet::new(1, a.clone(), pats).unwrap(),
                )
                .unwrap(),
            )
        }
    };
    if depth >= 3 {
        return leaf(rng);
    }
    match rng.gen_range(0..5) {
        0 | 1 => leaf(rng),
        2 => {
            let inner = random_term(rng, depth + 1);
            let a = inner.alphabet().clone();
            let mut pats = Vec::new();
            for _ in 0..rng.gen_range(1..=2) {
                let len = rng.gen_range(2..=2);
                let syms: Vec<Symbol> = (0..len)
                    .map(|_| Symbol(rng.gen_range(0..a.len() as u32)))
                    .collect();
                pats.push(Pattern::word(a.clone(), &syms).unwrap());
            }
            term::finite_type(
                PatternSet::new(1, a.clone(), pats).unwrap(),
                inner,
            )
        }
        3 => {
            let l = random_term(rng, depth + 1);
            // Keep products binary-over-binary to bound alphabet growth.
            let r = leaf(rng);
            term::product(l, r).unwrap()
        }
        _ => {
            let inner = random_term(rng, depth + 1);
            let a = inner.alphabet().clone();
            if rng.gen_bool(0.5) {
                // letter permutation
                let n = a.len() as u32;
                let code = term::SlidingBlockCode::letterwise(a.clone(), a.clone(), 1, move |s| {
                    Symbol((s.0 + 1) % n)
                })
                .unwrap();
                term::factor(code, inner)
            } else {
                let code = term::SlidingBlockCode::from_fn(
                    a.clone(),
                    bin(),
                    1,
                    vec![Point::new(vec![0]), Point::new(vec![1])],
                    |w| Symbol((w[0].0 ^ w[1].0) & 1),
                )
                .unwrap();
                term::factor(code, inner)
            }
        }
    }
}

#[test]
fn criterion_9_simulation_term() {
    let start = Instant::now();
    let machine = turing::TuringMachine::new(
        "osim",
        vec!["q?".into(), "qs".into()],
        "q?",
        &["qs"],
        &["x", "y"],
        &["x", "y", "a", "b", "a~", "b~"],
        "_",
        &[
            ("q?", "x", "q?", "x", turing::Move::Right),
            ("q?", "y", "q?", "y", turing::Move::Right),
            ("q?", "a", "q?", "a", turing::Move::Right),
            ("q?", "b", "q?", "b", turing::Move::Right),
            ("q?", "a~", "q?", "a~", turing::Move::Right),
            ("q?", "b~", "q?", "b~", turing::Move::Right),
            ("q?", "_", "q?", "_", turing::Move::Right),
        ],
        Some("q?"),
    )
    .unwrap();
    let ab = Alphabet::new("ab", &["a", "b"]).unwrap();
    let full = SubshiftTerm::full_shift(ab.clone(), 1);

    let sim = simulation_term(&machine, &full).unwrap();
    let t = sim.term();
    assert_eq!(t.dim(), 4);
    assert_eq!(t.alphabet().atom_count(), 7);
    for step in 1..=6 {
        let prefix = format!("step{step}");
        assert!(
            t.constraint_groups().iter().any(|(n, _)| n.starts_with(&prefix)),
            "missing constraint group {prefix}"
        );
    }

    // Emptiness propagation plus probes on a 4-cell window.
    let tiny = BoxRegion::new(Point::new(vec![0, 0, 0, 0]), Point::new(vec![0, 1, 0, 1])).unwrap();
    let report = verify_simulation_slices(&sim, &tiny, 0).unwrap();
    assert!(report.base_nonempty && report.term_nonempty);
    assert!(report.passed(), "{report:?}");

    let all = PatternSet::new(
        1,
        ab.clone(),
        vec![
            Pattern::word_from_tokens(&ab, &["a"]).unwrap(),
            Pattern::word_from_tokens(&ab, &["b"]).unwrap(),
        ],
    )
    .unwrap();
    let empty = term::finite_type(all, SubshiftTerm::full_shift(ab.clone(), 1));
    let sim_empty = simulation_term(&machine, &empty).unwrap();
    let report = verify_simulation_slices(&sim_empty, &tiny, 0).unwrap();
    assert!(!report.base_nonempty && !report.term_nonempty);
    assert!(report.emptiness_consistent);

    // Fiber containment against a constrained base on a 12-cell fiber.
    let golden_ab = SubshiftTerm::sft(TileSet::forbid_words("g", ab, &["b b"]).unwrap());
    let sim_g = simulation_term(&machine, &golden_ab).unwrap();
    let fiber_box =
        BoxRegion::new(Point::new(vec![0, 0, 0, 0]), Point::new(vec![0, 0, 0, 11])).unwrap();
    let report = verify_simulation_slices(&sim_g, &fiber_box, 1).unwrap();
    assert!(report.fibers_checked > 0);
    assert_eq!(report.fiber_violations, 0);
    assert!(report.passed(), "{report:?}");

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!("criterion 9: PASS (simulation term structure and slices, {elapsed:?})");
}
