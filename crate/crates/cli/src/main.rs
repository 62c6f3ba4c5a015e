//! Batch workbench for generalized tilings: window languages of subshift
//! terms, finite-region solving, substitution expansions, the rectangle
//! framework, and Turing-machine tilings.
//!
//! Exit codes: 0 success, 1 well-formed negative result (unsatisfiable,
//! mismatch, disagreement), 2 usage or parse error, 3 resource ceiling.

mod render;
mod sexpr;
mod subst_file;
mod term_file;
mod tileset_file;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tilings::onedim;
use tilings::solver::{self, RegionProblem};
use tilings::substitution::{
    self, decompose_rectangles, expand, verify_framework_proposition, Substitution,
};
use tilings::term::{self};
use tilings::turing::{
    self, check_diagram, compile_machine, domain_sample, order_evidence, rect_cross_check,
    Oracle,
};
use tilings::{BoxRegion, Error, Pattern, PatternSet, Point, Symbol};

#[derive(Parser)]
#[command(name = "tilings", version, about = "generalized tilings workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Window language of a term file.
    Lang(LangArgs),
    /// Admissible fillings of a box for a tile set file.
    Solve(SolveArgs),
    /// Substitution expansions.
    Subst(SubstArgs),
    /// Rectangle framework slices and the partition sweep.
    Framework(FrameworkArgs),
    /// Turing machine tooling.
    #[command(subcommand)]
    Tm(TmCommand),
    /// Re-emit a file in canonical form.
    #[command(subcommand)]
    Fmt(FmtCommand),
}

#[derive(Subcommand)]
enum FmtCommand {
    /// Canonical form of a term file.
    Term { file: PathBuf },
    /// Canonical form of a tile set file.
    Tileset { file: PathBuf },
    /// Canonical form of a machine file.
    Machine { file: PathBuf },
}

#[derive(Args)]
struct LangArgs {
    /// Term file (s-expressions).
    term: PathBuf,
    /// Window side length (window [0, n-1]^d).
    #[arg(long)]
    n: i64,
    #[arg(long, default_value_t = 0)]
    margin: i64,
    /// Print the count only.
    #[arg(long)]
    count: bool,
    /// List the patterns.
    #[arg(long)]
    list: bool,
    /// Exact one-dimensional route through the graph presentation.
    #[arg(long = "exact-1d")]
    exact_1d: bool,
}

#[derive(Args)]
struct SolveArgs {
    /// Tile set file.
    tileset: PathBuf,
    /// Box as WxH (2D) or N (1D), based at the origin.
    #[arg(long = "box")]
    box_spec: Option<String>,
    /// Explicit corner, comma-separated.
    #[arg(long)]
    lo: Option<String>,
    /// Explicit corner, comma-separated.
    #[arg(long)]
    hi: Option<String>,
    /// Pins of the form x,y=token.
    #[arg(long = "pin")]
    pins: Vec<String>,
    #[arg(long)]
    limit: Option<usize>,
    /// Print the count only.
    #[arg(long)]
    count: bool,
    /// Render each filling: ascii or pgm (2D only).
    #[arg(long)]
    render: Option<String>,
}

#[derive(Args)]
struct SubstArgs {
    /// Side of the built-in diagonal-marker substitution.
    #[arg(long)]
    n: Option<usize>,
    /// Substitution file.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Starting letter token.
    #[arg(long)]
    letter: String,
    #[arg(long)]
    iters: u32,
    /// ascii or pgm.
    #[arg(long, default_value = "ascii")]
    render: String,
}

#[derive(Args)]
struct FrameworkArgs {
    /// Scale of the sweep or slice.
    #[arg(long)]
    t: u32,
    /// Plane index for a single slice.
    #[arg(long)]
    row: Option<i64>,
    /// Window as WxH for a single slice (based at (1,1)).
    #[arg(long)]
    window: Option<String>,
    /// Run the partition-and-growth sweep.
    #[arg(long)]
    verify: bool,
}

#[derive(Subcommand)]
enum TmCommand {
    /// Compile a machine to its step tile set (a tile set file).
    Compile { machine: PathBuf },
    /// Run a machine on an input word and dump the diagram.
    Run {
        machine: PathBuf,
        /// Input word, whitespace-separated tokens.
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 100)]
        max_steps: usize,
        #[arg(long, default_value_t = 16)]
        window: usize,
        /// Check the diagram against the compiled tile set.
        #[arg(long)]
        check: bool,
    },
    /// Cross-check the solver filling of a rectangle against the run.
    Rect {
        machine: PathBuf,
        /// Width exponent (width 5^m).
        #[arg(long)]
        m: u32,
        /// Height exponent (height 3^p).
        #[arg(long)]
        p: u32,
        /// Entry exponent (entry 2^n).
        #[arg(long)]
        n: u32,
        /// Input word of length 2^n.
        #[arg(long)]
        input: String,
    },
    /// Compare a semi-oracle machine's domain sample against a target.
    Order {
        machine: PathBuf,
        /// File of oracle words, one per line.
        #[arg(long = "oracle-file")]
        oracle_file: PathBuf,
        /// File of target words; defaults to the machine's own sample.
        #[arg(long = "target-file")]
        target_file: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long, default_value_t = 10000)]
        max_steps: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ResourceLimit(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Lang(a) => cmd_lang(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Subst(a) => cmd_subst(a),
        Command::Framework(a) => cmd_framework(a),
        Command::Tm(a) => cmd_tm(a),
        Command::Fmt(a) => cmd_fmt(a),
    }
}

fn cmd_fmt(cmd: FmtCommand) -> Result<ExitCode, Error> {
    match cmd {
        FmtCommand::Term { file } => {
            let t = term_file::parse_term(&read(&file)?)?;
            println!("{}", term_file::serialize_term(&t));
        }
        FmtCommand::Tileset { file } => {
            let ts = tileset_file::parse_tileset(&read(&file)?)?;
            print!("{}", tileset_file::serialize_tileset(&ts));
        }
        FmtCommand::Machine { file } => {
            let tm = turing::parse_machine(&read(&file)?)?;
            print!("{}", turing::serialize_machine(&tm));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("{}: {e}", path.display()),
    })
}

fn cmd_lang(a: LangArgs) -> Result<ExitCode, Error> {
    let t = term_file::parse_term(&read(&a.term)?)?;
    if a.n < 1 {
        return Err(Error::Validation("window side must be at least 1".into()));
    }
    if a.exact_1d {
        if t.dim() != 1 {
            return Err(Error::Validation("exact mode requires dim 1".into()));
        }
        let g = term::term_graph(&t)?;
        let lang = onedim::exact_language(&g, a.n as usize)?;
        print_language(&lang, a.n, a.count, a.list);
        return Ok(ExitCode::SUCCESS);
    }
    let window = BoxRegion::new(Point::zero(t.dim()), Point::new(vec![a.n - 1; t.dim()]))?;
    let lang = term::upper_language(&t, &window, a.margin)?;
    print_language(&lang, a.n, a.count, a.list);
    Ok(ExitCode::SUCCESS)
}

fn print_language(lang: &PatternSet, n: i64, count: bool, list: bool) {
    println!("n={}: {}", n, lang.len());
    if list && !count {
        for p in lang.iter() {
            println!("{p:?}");
        }
    }
}

fn parse_point_arg(s: &str) -> Result<Point, Error> {
    let coords: Result<Vec<i64>, _> = s
        .split([',', ' '])
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>())
        .collect();
    Ok(Point::new(coords.map_err(|_| Error::Parse {
        line: 0,
        msg: format!("bad coordinates {s:?}"),
    })?))
}

fn parse_box(a: &SolveArgs, dim: usize) -> Result<BoxRegion, Error> {
    if let Some(spec) = &a.box_spec {
        let sides: Result<Vec<i64>, _> = spec.split('x').map(|t| t.parse::<i64>()).collect();
        let sides = sides.map_err(|_| Error::Parse {
            line: 0,
            msg: format!("bad box {spec:?}"),
        })?;
        if sides.len() != dim || sides.iter().any(|&s| s < 1) {
            return Err(Error::Validation(format!(
                "box must give {dim} positive sides"
            )));
        }
        let hi: Vec<i64> = sides.iter().map(|s| s - 1).collect();
        return BoxRegion::new(Point::zero(dim), Point::new(hi));
    }
    match (&a.lo, &a.hi) {
        (Some(lo), Some(hi)) => BoxRegion::new(parse_point_arg(lo)?, parse_point_arg(hi)?),
        _ => Err(Error::Validation(
            "give either --box or both --lo and --hi".into(),
        )),
    }
}

fn cmd_solve(a: SolveArgs) -> Result<ExitCode, Error> {
    let ts = tileset_file::parse_tileset(&read(&a.tileset)?)?;
    let region = parse_box(&a, ts.dim())?;
    let mut pins = BTreeMap::new();
    for pin in &a.pins {
        let (at, tok) = pin.split_once('=').ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("pin must be coords=token, got {pin:?}"),
        })?;
        pins.insert(parse_point_arg(at)?, ts.alphabet().lookup(tok)?);
    }
    let mut problem = RegionProblem::new(ts.clone(), region)?.with_pins(pins)?;
    if let Some(l) = a.limit {
        problem = problem.with_limit(l);
    }
    if a.count {
        println!("{}", solver::count_admissible(&problem));
        return Ok(ExitCode::SUCCESS);
    }
    let e = solver::enumerate_admissible(&problem);
    if e.patterns.is_empty() {
        println!("no admissible pattern");
        return Ok(ExitCode::from(1));
    }
    println!("{} admissible", e.patterns.len());
    for (i, p) in e.patterns.iter().enumerate() {
        match a.render.as_deref() {
            Some("ascii") => {
                println!("-- {i}");
                print!("{}", render::ascii(p));
            }
            Some("pgm") => {
                println!("-- {i}");
                print!("{}", render::pgm(p));
            }
            Some(other) => return Err(Error::Validation(format!("unknown render {other:?}"))),
            None => println!("{p:?}"),
        }
    }
    if e.truncated {
        println!("truncated at {} results", e.patterns.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_subst(a: SubstArgs) -> Result<ExitCode, Error> {
    let s: Substitution = match (&a.n, &a.file) {
        (Some(n), None) => Substitution::diagonal(*n)?,
        (None, Some(f)) => subst_file::parse_substitution(&read(f)?)?,
        _ => {
            return Err(Error::Validation(
                "give exactly one of --n or --file".into(),
            ))
        }
    };
    let letter = s.alphabet().lookup(&a.letter)?;
    let e = expand(&s, letter, a.iters)?;
    match a.render.as_str() {
        "ascii" => print!("{}", e.render_ascii()),
        "pgm" => print!("{}", e.render_pgm()),
        other => return Err(Error::Validation(format!("unknown render {other:?}"))),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_framework(a: FrameworkArgs) -> Result<ExitCode, Error> {
    if a.verify {
        let cap = match &a.window {
            Some(spec) => Some(parse_window(spec)?),
            None => None,
        };
        let report = verify_framework_proposition(a.t, cap.as_ref())?;
        print!("{}", report.render());
        return Ok(if report.passed() {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        });
    }
    let row = a.row.ok_or_else(|| {
        Error::Validation("give --row for a single slice, or --verify".into())
    })?;
    let window = match &a.window {
        Some(spec) => parse_window(spec)?,
        None => BoxRegion::new(Point::new(vec![1, 1]), Point::new(vec![26, 10]))?,
    };
    let slice = substitution::build_framework_slice(a.t, row, &window)?;
    let rects = decompose_rectangles(&slice)?;
    let first = &rects[0];
    println!(
        "plane {} rectangles {}x{} entry {} (exponents {:?})",
        row,
        first.width,
        first.height,
        first.entry_len,
        first.exponents()
    );
    println!("{} rectangles meet the window", rects.len());
    Ok(ExitCode::SUCCESS)
}

fn parse_window(spec: &str) -> Result<BoxRegion, Error> {
    let sides: Result<Vec<i64>, _> = spec.split('x').map(|t| t.parse::<i64>()).collect();
    let sides = sides.map_err(|_| Error::Parse {
        line: 0,
        msg: format!("bad window {spec:?}"),
    })?;
    if sides.len() != 2 || sides.iter().any(|&s| s < 1) {
        return Err(Error::Validation("window must be WxH".into()));
    }
    BoxRegion::new(Point::new(vec![1, 1]), Point::new(vec![sides[0], sides[1]]))
}

fn cmd_tm(cmd: TmCommand) -> Result<ExitCode, Error> {
    match cmd {
        TmCommand::Compile { machine } => {
            let tm = turing::parse_machine(&read(&machine)?)?;
            let ts = compile_machine(&tm)?;
            print!("{}", tileset_file::serialize_tileset(&ts));
            Ok(ExitCode::SUCCESS)
        }
        TmCommand::Run {
            machine,
            input,
            max_steps,
            window,
            check,
        } => {
            let tm = turing::parse_machine(&read(&machine)?)?;
            let toks: Vec<&str> = input.split_whitespace().collect();
            let word = tm.parse_input(&toks)?;
            let (d, status) = turing::run(&tm, &word, max_steps, window)?;
            print!("{}", d.dump());
            println!("status: {status:?}");
            if check {
                let ts = compile_machine(&tm)?;
                let v = check_diagram(&ts, &d)?;
                println!("violations: {}", v.len());
                if !v.is_empty() {
                    return Ok(ExitCode::from(1));
                }
            }
            Ok(match status {
                turing::RunStatus::Halted => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            })
        }
        TmCommand::Rect {
            machine,
            m,
            p,
            n,
            input,
        } => {
            let tm = turing::parse_machine(&read(&machine)?)?;
            let rect = substitution::Rectangle::new(
                Point::new(vec![0, 0]),
                5i64.pow(m),
                3i64.pow(p),
                2i64.pow(n),
            )?;
            let toks: Vec<&str> = input.split_whitespace().collect();
            let word = tm.parse_input(&toks)?;
            let check = rect_cross_check(&tm, &rect, &word)?;
            if check.matches {
                println!("MATCH ({} filling)", check.fillings_found);
                Ok(ExitCode::SUCCESS)
            } else {
                println!("MISMATCH ({} fillings)", check.fillings_found);
                Ok(ExitCode::from(1))
            }
        }
        TmCommand::Order {
            machine,
            oracle_file,
            target_file,
            n_max,
            max_steps,
        } => {
            let tm = turing::parse_machine(&read(&machine)?)?;
            let oracle = parse_word_file_oracle(&read(&oracle_file)?, &tm)?;
            let sample = domain_sample(&tm, &oracle, n_max, max_steps)?;
            let target = match target_file {
                Some(f) => parse_word_file_set(&read(&f)?, &tm)?,
                None => sample.included.clone(),
            };
            let ev = order_evidence(&tm, &oracle, &target, n_max, max_steps)?;
            println!(
                "{} disagreements, {} inconclusive over {} words",
                ev.disagreements,
                ev.inconclusive,
                ev.verdicts.len()
            );
            for (w, verdict, why) in &ev.verdicts {
                if *verdict != turing::Verdict::Agree {
                    println!("{w:?}: {verdict:?} ({why})");
                }
            }
            Ok(if ev.disagreements == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn parse_word_file_oracle(text: &str, tm: &turing::TuringMachine) -> Result<Oracle, Error> {
    let tokens: Vec<&str> = tm.input_tokens();
    let alphabet = tilings::Alphabet::new("oracle", &tokens)?;
    let mut words = std::collections::BTreeSet::new();
    for line in text.lines() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let syms: Result<Vec<Symbol>, Error> = toks.iter().map(|t| alphabet.lookup(t)).collect();
        words.insert(syms?);
    }
    Ok(Oracle::Explicit { alphabet, words })
}

fn parse_word_file_set(text: &str, tm: &turing::TuringMachine) -> Result<PatternSet, Error> {
    let alphabet = turing::machine_input_alphabet(tm);
    let mut pats: Vec<Pattern> = Vec::new();
    for line in text.lines() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        pats.push(Pattern::word_from_tokens(&alphabet, &toks)?);
    }
    PatternSet::new(1, alphabet, pats)
}
