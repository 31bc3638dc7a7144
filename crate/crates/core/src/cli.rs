//! The `soslab` command line.
//!
//! Exit codes: 0 when a verdict was computed (negative verdicts included),
//! 1 when a verification scan recorded failures, 2 for usage or parse
//! errors, 3 when the search budget ran out before a verdict.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::criteria::{
    approx_endpoints, peters_interval, thm1b_witness, thm3_witness, thm4c_witness,
};
use crate::decompose::{decompose_sos, SearchOptions, SearchOutcome};
use crate::error::{Error, Result};
use crate::quadfield::{QuadInt, RingContext};
use crate::residues::{is_square_mod_2o, residue_mod_2o};
use crate::sintegers::{s_element, s_is_sum_of_squares, SVerdictKind};
use crate::verify::{scan_totally_positive, write_jsonl, Claim, Execution, Harness, ScanSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURES: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
    Human,
}

#[derive(Debug, Parser)]
#[command(name = "soslab", version, about = "Sums of squares in real quadratic rings of integers")]
pub struct Cli {
    /// Output format (default: human for queries, json for verify and scan)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct ElemArgs {
    /// Squarefree D > 1
    #[arg(long = "D")]
    pub d: i64,
    /// Element as `u+vw` (ω-basis) or `a+bsqrtD`, `(a+bsqrtD)/2`
    #[arg(long, allow_hyphen_values = true)]
    pub elem: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WitnessKind {
    Thm3,
    Thm1b,
    Thm4c,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find a decomposition into squares
    Decompose {
        #[command(flatten)]
        elem: ElemArgs,
        /// Upper bound on the number of squares
        #[arg(long)]
        max_terms: Option<usize>,
    },
    /// Decide whether an element is a sum of squares, with local data
    Check {
        #[command(flatten)]
        elem: ElemArgs,
    },
    /// Peters' five-square interval test
    Peters {
        #[command(flatten)]
        elem: ElemArgs,
    },
    /// Print a witness element and its verdict
    Witness {
        #[arg(long = "D")]
        d: i64,
        #[arg(long, value_enum)]
        kind: WitnessKind,
        #[arg(long, default_value_t = 1)]
        m: u64,
    },
    /// Representability as a sum of squares in O[1/m]
    Sint {
        #[command(flatten)]
        elem: ElemArgs,
        #[arg(long)]
        m: u64,
        /// Element is elem / m^(2j)
        #[arg(long, default_value_t = 0)]
        j: u32,
        /// How many extra factors m² to clear before giving up
        #[arg(long, default_value_t = 4)]
        j_budget: u32,
    },
    /// Run a verification scan and emit JSONL reports
    Verify {
        /// thm3, scharlau, maass, pythagoras, peters, thm4, m0, lemma1, sint
        claim: String,
        /// List `2,3,5` or inclusive range `2..50` (non-squarefree D in a range are skipped)
        #[arg(long = "D")]
        d: String,
        #[arg(long, default_value_t = 30)]
        trace_bound: u64,
        /// Inclusive range `lo..hi`
        #[arg(long)]
        m_range: Option<String>,
        /// Shorthand for `--m-range 1..M`
        #[arg(long)]
        m_max: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Disable the thread pool
        #[arg(long)]
        sequential: bool,
    },
    /// List totally positive elements up to a trace bound with their verdicts
    Scan {
        #[arg(long = "D")]
        d: i64,
        #[arg(long, default_value_t = 30)]
        trace_bound: u64,
    },
}

/// Parses `INT (('+'|'-') INT? 'w')?` in the ω-basis, or
/// `INT (('+'|'-') INT? 'sqrt' INT)?` in the √D-basis, optionally wrapped as
/// `(...)/2`. Whitespace is ignored.
pub fn parse_element(s: &str, ctx: &RingContext) -> Result<QuadInt> {
    let mut p = ElemParser { chars: s.char_indices().filter(|(_, c)| !c.is_whitespace()).collect(), i: 0, end: s.len() };
    let halved = p.eat('(');
    let first = p.int(true)?;
    let mut coeff = None;
    let mut basis = None;
    if let Some(sign) = p.peek().filter(|c| *c == '+' || *c == '-') {
        p.i += 1;
        let mag = if p.peek().is_some_and(|c| c.is_ascii_digit()) { p.int(false)? } else { BigInt::from(1) };
        coeff = Some(if sign == '-' { -mag } else { mag });
        if p.eat('w') {
            basis = Some(None);
        } else if p.eat_word("sqrt") {
            let at = p.pos();
            let found = p.int(false)?;
            let found = i64::try_from(found).map_err(|_| Error::Parse { pos: at, msg: "radicand too large".into() })?;
            if found != ctx.d() {
                return Err(Error::BasisMismatch { expected: ctx.d(), found });
            }
            basis = Some(Some(()));
        } else {
            return Err(p.error("expected 'w' or 'sqrt'"));
        }
    }
    if halved {
        if !p.eat(')') {
            return Err(p.error("expected ')'"));
        }
        if !(p.eat('/') && p.eat('2')) {
            return Err(p.error("expected '/2'"));
        }
        if basis == Some(None) {
            return Err(Error::Parse { pos: 0, msg: "halving is only for the sqrt form".into() });
        }
    }
    if p.peek().is_some() {
        return Err(p.error("trailing input"));
    }
    let b = coeff.unwrap_or_default();
    match basis {
        Some(None) => Ok(ctx.elem(first, b)),
        _ => {
            let (a2, b2) = if halved { (first, b) } else { (first * 2, b * 2) };
            ctx.from_half_coords(&a2, &b2).map_err(|_| Error::NotIntegral(s.trim().to_string()))
        }
    }
}

struct ElemParser {
    chars: Vec<(usize, char)>,
    i: usize,
    end: usize,
}

impl ElemParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).map(|&(_, c)| c)
    }

    fn pos(&self) -> usize {
        self.chars.get(self.i).map_or(self.end, |&(p, _)| p)
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos(), msg: msg.into() }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        let n = w.chars().count();
        let ok = self.chars.len() >= self.i + n
            && self.chars[self.i..self.i + n].iter().map(|&(_, c)| c).eq(w.chars());
        if ok {
            self.i += n;
        }
        ok
    }

    fn int(&mut self, signed: bool) -> Result<BigInt> {
        let start = self.pos();
        let neg = signed && self.eat('-');
        let mut digits = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            digits.push(c);
            self.i += 1;
        }
        if digits.is_empty() {
            return Err(Error::Parse { pos: start, msg: "expected an integer".into() });
        }
        let n: BigInt = digits.parse().expect("ascii digits");
        Ok(if neg { -n } else { n })
    }
}

/// `2,3,5` or the inclusive range `2..50`; a range keeps only squarefree D.
pub fn parse_d_list(s: &str) -> Result<Vec<i64>> {
    let bad = |msg: &str| Error::Parse { pos: 0, msg: format!("{msg}: {s:?}") };
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: i64 = lo.trim().parse().map_err(|_| bad("bad range start"))?;
        let hi: i64 = hi.trim().parse().map_err(|_| bad("bad range end"))?;
        if lo < 2 {
            return Err(Error::TooSmall(lo));
        }
        return Ok((lo..=hi).filter(|&d| RingContext::new(d).is_ok()).collect());
    }
    s.split(',')
        .map(|t| {
            let d: i64 = t.trim().parse().map_err(|_| bad("bad D"))?;
            RingContext::new(d).map(|_| d)
        })
        .collect()
}

fn parse_range(s: &str) -> Result<(u64, u64)> {
    let bad = || Error::Parse { pos: 0, msg: format!("expected lo..hi, got {s:?}") };
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

/// One computed verdict. `exit` is the code this verdict maps to.
struct Verdict {
    json: Value,
    human: String,
    tsv: String,
    exit: i32,
}

fn element_json(alpha: &QuadInt) -> Value {
    json!({ "w": alpha.to_string(), "sqrt": alpha.to_sqrt_string() })
}

fn terms_json(terms: &[QuadInt]) -> Value {
    Value::Array(terms.iter().map(|t| Value::String(t.to_string())).collect())
}

fn human_sum(alpha: &QuadInt, terms: &[QuadInt]) -> String {
    if terms.is_empty() {
        return format!("{} = 0", alpha.to_sqrt_string());
    }
    let rhs: Vec<String> = terms.iter().map(|t| format!("({})²", t.to_sqrt_string())).collect();
    format!("{} = {}", alpha.to_sqrt_string(), rhs.join(" + "))
}

fn search_verdict(
    command: &str,
    ctx: &RingContext,
    alpha: &QuadInt,
    opts: &SearchOptions,
) -> Verdict {
    let start = Instant::now();
    let v = decompose_sos(alpha, opts);
    let ms = start.elapsed().as_millis() as u64;
    let (name, terms, certificate, exit) = match &v.outcome {
        SearchOutcome::Found(dec) => ("sum_of_squares", dec.terms().to_vec(), Value::Null, EXIT_OK),
        SearchOutcome::ExhaustedNone => {
            let why = if !alpha.is_zero() && !alpha.is_totally_positive() {
                "not totally positive".to_string()
            } else if !is_square_mod_2o(ctx, alpha) {
                let r = residue_mod_2o(alpha);
                format!("not a square mod 2O (residue class ({}, {}))", r.e0, r.e1)
            } else {
                match opts.max_terms {
                    Some(k) => format!("exhaustive search with at most {k} squares"),
                    None => "exhaustive search".to_string(),
                }
            };
            ("not_sum_of_squares", Vec::new(), Value::String(why), EXIT_OK)
        }
        SearchOutcome::BudgetExceeded => ("unknown", Vec::new(), Value::String("node budget exceeded".into()), EXIT_BUDGET),
    };
    let human = match &v.outcome {
        SearchOutcome::Found(_) => human_sum(alpha, &terms),
        _ => format!("{}: {} ({})", alpha.to_sqrt_string(), name, certificate.as_str().unwrap_or("")),
    };
    let tsv = format!("{}\t{}\t{}\t{}", ctx.d(), alpha, name, terms.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","));
    Verdict {
        json: json!({
            "command": command,
            "D": ctx.d(),
            "element": element_json(alpha),
            "verdict": name,
            "certificate": certificate,
            "terms": terms_json(&terms),
            "nodes": v.nodes_explored,
            "elapsed_ms": ms,
        }),
        human,
        tsv,
        exit,
    }
}

fn peters_verdict(ctx: &RingContext, alpha: &QuadInt) -> Result<Verdict> {
    let start = Instant::now();
    let iv = peters_interval(ctx, alpha)?;
    let ms = start.elapsed().as_millis() as u64;
    let (five, certificate, detail) = match &iv {
        None => (false, json!({ "reason": "odd sqrtD coefficient" }), "odd sqrtD coefficient".to_string()),
        Some(iv) => {
            let (lo, hi) = approx_endpoints(iv);
            let adm: Vec<String> = iv.admissible_n().iter().map(|n| n.to_string()).collect();
            let shown = if adm.len() > 8 { format!("{}, ... ({} total)", adm[..8].join(", "), adm.len()) } else { adm.join(", ") };
            (
                iv.has_admissible(),
                json!({
                    "center": iv.center.to_string(),
                    "radicand": iv.radicand.to_string(),
                    "denom": iv.denom.to_string(),
                    "parity": iv.parity_required,
                    "interval_approx": [lo, hi],
                    "admissible_n": adm,
                }),
                format!("interval ≈ [{lo:.4}, {hi:.4}], admissible n: {{{shown}}}"),
            )
        }
    };
    let name = if five { "five_squares" } else { "not_five_squares" };
    Ok(Verdict {
        json: json!({
            "command": "peters",
            "D": ctx.d(),
            "element": element_json(alpha),
            "verdict": name,
            "certificate": certificate,
            "terms": [],
            "nodes": 0,
            "elapsed_ms": ms,
        }),
        human: format!("{}: {} ({})", alpha.to_sqrt_string(), name, detail),
        tsv: format!("{}\t{}\t{}", ctx.d(), alpha, name),
        exit: EXIT_OK,
    })
}

/// `x`, `(x)/m` or `(x)/m^e`
fn over(x: &str, m: u64, e: u32) -> String {
    match e {
        0 => x.to_string(),
        1 => format!("({x})/{m}"),
        _ => format!("({x})/{m}^{e}"),
    }
}

fn sint_verdict(ctx: &RingContext, alpha: QuadInt, m: u64, j: u32, j_budget: u32) -> Result<Verdict> {
    let start = Instant::now();
    let xi = s_element(alpha, j, m)?;
    let v = s_is_sum_of_squares(ctx, &xi, j_budget, &SearchOptions::from_env())?;
    let ms = start.elapsed().as_millis() as u64;
    let shown = over(&xi.numerator().to_sqrt_string(), m, 2 * xi.j());
    let (name, certificate, terms, human, exit) = match &v.kind {
        SVerdictKind::Representable { terms, j_used } => {
            let ts: Vec<String> = terms.iter().map(|t| over(&t.numerator.to_string(), m, t.exponent)).collect();
            let sq: Vec<String> =
                terms.iter().map(|t| format!("({})²", over(&t.numerator.to_sqrt_string(), m, t.exponent))).collect();
            let human = format!("{shown} = {}", sq.join(" + "));
            ("sum_of_squares", json!({ "j_used": j_used }), ts, human, EXIT_OK)
        }
        SVerdictKind::Obstructed(cert) => {
            let human = format!("{shown}: not_sum_of_squares ({})", cert.reason);
            ("not_sum_of_squares", serde_json::to_value(cert).expect("serializable"), Vec::new(), human, EXIT_OK)
        }
        SVerdictKind::Unknown { j_budget } => {
            let human = format!("{shown}: unknown (no representation within j_budget {j_budget})");
            ("unknown", json!({ "j_budget": j_budget }), Vec::new(), human, EXIT_BUDGET)
        }
    };
    Ok(Verdict {
        json: json!({
            "command": "sint",
            "D": ctx.d(),
            "m": m,
            "element": { "numerator": element_json(xi.numerator()), "j": xi.j() },
            "verdict": name,
            "certificate": certificate,
            "terms": terms,
            "nodes": v.nodes_explored,
            "elapsed_ms": ms,
        }),
        tsv: format!("{}\t{}\t{}\t{}\t{}", ctx.d(), m, xi.numerator(), xi.j(), name),
        human,
        exit,
    })
}

fn witness_verdict(ctx: &RingContext, kind: WitnessKind, m: u64) -> Result<Verdict> {
    let opts = SearchOptions::from_env();
    match kind {
        WitnessKind::Thm3 => {
            let w = thm3_witness(ctx).scale(&BigInt::from(2));
            Ok(search_verdict("witness", ctx, &w, &opts))
        }
        WitnessKind::Thm4c => {
            let w = thm4c_witness(ctx, m)?;
            Ok(search_verdict("witness", ctx, &w, &opts))
        }
        WitnessKind::Thm1b => {
            let w = thm1b_witness(ctx)?;
            let m = if m % 2 == 1 && m > 1 { m } else { 3 };
            sint_verdict(ctx, w, m, 0, 0).map(|mut v| {
                v.json["command"] = "witness".into();
                v
            })
        }
    }
}

fn check_verdict(ctx: &RingContext, alpha: &QuadInt) -> Result<Verdict> {
    let mut v = search_verdict("check", ctx, alpha, &SearchOptions::from_env());
    let local = is_square_mod_2o(ctx, alpha);
    let peters = if alpha.is_totally_positive() { Some(crate::criteria::peters_five_squares(ctx, alpha)?) } else { None };
    v.json["local"] = json!({
        "totally_positive": alpha.is_totally_positive(),
        "square_mod_2O": local,
        "peters_five_squares": peters,
    });
    v.human = format!(
        "{}\n  totally positive: {}, square mod 2O: {}, Peters: {}",
        v.human,
        alpha.is_totally_positive(),
        local,
        peters.map_or("n/a".to_string(), |p| p.to_string())
    );
    Ok(v)
}

struct Out {
    w: Box<dyn Write>,
}

impl Out {
    fn open(path: &Option<PathBuf>) -> io::Result<Out> {
        let w: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Out { w })
    }
}

fn emit(out: &mut Out, format: Format, v: &Verdict) -> io::Result<()> {
    match format {
        Format::Json => writeln!(out.w, "{}", v.json),
        Format::Tsv => writeln!(out.w, "{}", v.tsv),
        Format::Human => writeln!(out.w, "{}", v.human),
    }
}

fn run_verify(
    out: &mut Out,
    format: Format,
    claim: &str,
    d: &str,
    trace_bound: u64,
    m_range: Option<(u64, u64)>,
    seed: u64,
    sequential: bool,
) -> Result<i32> {
    let claim = Claim::parse(claim).ok_or_else(|| Error::Parse { pos: 0, msg: format!("unknown claim {claim:?}") })?;
    let mut spec = ScanSpec::new(parse_d_list(d)?, trace_bound)?.with_seed(seed);
    if let Some((lo, hi)) = m_range {
        spec = spec.with_m_range(lo, hi);
    }
    let mut harness = Harness::default().with_seed(seed);
    if sequential {
        harness.exec = Execution::Sequential;
    }
    let reports = harness.run(claim, &spec)?;
    let res = match format {
        Format::Json => write_jsonl(&mut out.w, &spec, &reports),
        Format::Tsv => reports.iter().try_for_each(|r| {
            writeln!(out.w, "{}\t{}\t{}\t{}\t{}", r.claim_id, r.d, r.pass, r.instances_checked, r.failures.len())
        }),
        Format::Human => reports.iter().try_for_each(|r| {
            writeln!(
                out.w,
                "{} D={}: {} ({} instances, {} failures, {} witnesses, {} findings, {:.2?})",
                r.claim_id,
                r.d,
                if r.pass { "pass" } else { "FAIL" },
                r.instances_checked,
                r.failures.len(),
                r.witnesses.len(),
                r.findings.len(),
                r.elapsed
            )?;
            for key in ["m_star", "max_length"] {
                if let Some(v) = r.stats.get(key) {
                    writeln!(out.w, "  {key} = {v}")?;
                }
            }
            for f in &r.failures {
                writeln!(out.w, "  {}: expected {}, got {}", f.element, f.expected, f.got)?;
            }
            Ok(())
        }),
    };
    res.map_err(|e| Error::Parse { pos: 0, msg: format!("write failed: {e}") })?;
    let budget = reports.iter().flat_map(|r| &r.failures).any(|f| f.got == "budget_exceeded");
    Ok(if reports.iter().all(|r| r.pass) {
        EXIT_OK
    } else if budget {
        EXIT_BUDGET
    } else {
        EXIT_FAILURES
    })
}

fn run_scan(out: &mut Out, format: Format, d: i64, trace_bound: u64) -> Result<i32> {
    let ctx = RingContext::new(d)?;
    let opts = SearchOptions::from_env();
    let elems = scan_totally_positive(&ctx, trace_bound);
    let rows = crate::verify::map_ordered(Execution::Parallel, &elems, |a| {
        let len = crate::decompose::pythagoras_length_with(a, &opts);
        let peters = crate::criteria::peters_five_squares(&ctx, a).expect("totally positive");
        (len, peters, is_square_mod_2o(&ctx, a))
    });
    let mut exit = EXIT_OK;
    let io = |e: io::Error| Error::Parse { pos: 0, msg: format!("write failed: {e}") };
    if format == Format::Json {
        writeln!(out.w, "{}", json!({ "schema": crate::verify::SCHEMA_VERSION, "D": d, "trace_bound": trace_bound })).map_err(io)?;
    }
    for (a, (len, peters, local)) in elems.iter().zip(rows) {
        let len = match len {
            Ok(l) => json!(l),
            Err(_) => {
                exit = EXIT_BUDGET;
                json!("unknown")
            }
        };
        let line = match format {
            Format::Json => json!({
                "D": d,
                "element": element_json(a),
                "trace": a.trace().to_string(),
                "norm": a.norm().to_string(),
                "length": len,
                "square_mod_2O": local,
                "peters_five_squares": peters,
            })
            .to_string(),
            Format::Tsv => format!("{}\t{}\t{}\t{}\t{}", a, a.trace(), len, local, peters),
            Format::Human => format!(
                "{:<20} Tr={:<4} length={:<8} square_mod_2O={:<5} peters={}",
                a.to_sqrt_string(),
                a.trace().to_string(),
                len.to_string(),
                local,
                peters
            ),
        };
        writeln!(out.w, "{line}").map_err(io)?;
    }
    Ok(exit)
}

fn dispatch(cli: Cli) -> Result<i32> {
    let scan_like = matches!(cli.command, Command::Verify { .. } | Command::Scan { .. });
    let format = cli.format.unwrap_or(if scan_like { Format::Json } else { Format::Human });
    let mut out = Out::open(&cli.output).map_err(|e| Error::Parse { pos: 0, msg: format!("cannot open output: {e}") })?;
    let verdict = match cli.command {
        Command::Decompose { elem, max_terms } => {
            let ctx = RingContext::new(elem.d)?;
            let alpha = parse_element(&elem.elem, &ctx)?;
            let mut opts = SearchOptions::from_env();
            opts.max_terms = max_terms;
            search_verdict("decompose", &ctx, &alpha, &opts)
        }
        Command::Check { elem } => {
            let ctx = RingContext::new(elem.d)?;
            let alpha = parse_element(&elem.elem, &ctx)?;
            check_verdict(&ctx, &alpha)?
        }
        Command::Peters { elem } => {
            let ctx = RingContext::new(elem.d)?;
            let alpha = parse_element(&elem.elem, &ctx)?;
            peters_verdict(&ctx, &alpha)?
        }
        Command::Witness { d, kind, m } => witness_verdict(&RingContext::new(d)?, kind, m)?,
        Command::Sint { elem, m, j, j_budget } => {
            let ctx = RingContext::new(elem.d)?;
            let alpha = parse_element(&elem.elem, &ctx)?;
            sint_verdict(&ctx, alpha, m, j, j_budget)?
        }
        Command::Verify { claim, d, trace_bound, m_range, m_max, seed, sequential } => {
            let range = match (m_range, m_max) {
                (Some(r), _) => Some(parse_range(&r)?),
                (None, Some(hi)) => Some((1, hi)),
                (None, None) => None,
            };
            let code = run_verify(&mut out, format, &claim, &d, trace_bound, range, seed, sequential)?;
            out.w.flush().ok();
            return Ok(code);
        }
        Command::Scan { d, trace_bound } => {
            let code = run_scan(&mut out, format, d, trace_bound)?;
            out.w.flush().ok();
            return Ok(code);
        }
    };
    emit(&mut out, format, &verdict).and_then(|_| out.w.flush()).map_err(|e| Error::Parse { pos: 0, msg: format!("write failed: {e}") })?;
    Ok(verdict.exit)
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: i64) -> RingContext {
        RingContext::new(d).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_element("3+sqrt6", &ctx(6)).unwrap(), ctx(6).elem(3, 1));
        assert_eq!(parse_element("1+w", &ctx(5)).unwrap(), ctx(5).elem(1, 1));
        assert_eq!(
            parse_element("1+sqrt7", &ctx(6)),
            Err(Error::BasisMismatch { expected: 6, found: 7 })
        );
        assert_eq!(parse_element("(3+sqrt5)/2", &ctx(5)).unwrap(), ctx(5).elem(1, 1));
        assert_eq!(parse_element("-2-3w", &ctx(7)).unwrap(), ctx(7).elem(-2, -3));
        assert_eq!(parse_element(" 4 + 2 sqrt2 ", &ctx(2)).unwrap(), ctx(2).elem(4, 2));
        assert_eq!(parse_element("7", &ctx(13)).unwrap(), ctx(13).int(7));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_element("(1+sqrt6)/2", &ctx(6)), Err(Error::NotIntegral(_))));
        assert!(matches!(parse_element("(2+sqrt5)/2", &ctx(5)), Err(Error::NotIntegral(_))));
        assert_eq!(parse_element("3+", &ctx(6)).unwrap_err(), Error::Parse { pos: 2, msg: "expected 'w' or 'sqrt'".into() });
        assert!(matches!(parse_element("x", &ctx(6)), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(parse_element("1+w3", &ctx(6)), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(parse_element("(1+w)/2", &ctx(5)), Err(Error::Parse { .. })));
    }

    #[test]
    fn display_round_trips() {
        for d in [2, 5, 6, 13] {
            let c = ctx(d);
            for u in -4..=4 {
                for v in -4..=4 {
                    let a = c.elem(u, v);
                    assert_eq!(parse_element(&a.to_string(), &c).unwrap(), a);
                    assert_eq!(parse_element(&a.to_sqrt_string(), &c).unwrap(), a);
                    assert_eq!(parse_element(&a.to_string(), &c).unwrap().to_string(), a.to_string());
                }
            }
        }
    }

    #[test]
    fn d_lists() {
        assert_eq!(parse_d_list("2..10").unwrap(), vec![2, 3, 5, 6, 7, 10]);
        assert_eq!(parse_d_list("2,3,5").unwrap(), vec![2, 3, 5]);
        assert!(parse_d_list("2,4").is_err());
        assert!(parse_d_list("x").is_err());
    }
}
