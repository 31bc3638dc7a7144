//! Desk-scale scans that check the classification, threshold and bound
//! statements against the exhaustive search, emitting JSONL reports.
//!
//! Every scan enumerates totally positive elements up to a trace bound,
//! evaluates elements independently (in parallel when enabled) and merges
//! results in enumeration order.

mod exec;
mod report;

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Roots;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::criteria::{
    kappa_multiple, peters_five_squares, thm1b_witness, thm3_witness, thm4a_applies,
    thm4b_applies, thm4c_witness,
};
use crate::decompose::{
    decompose_sos, pythagoras_length_with, SearchOptions, SearchOutcome, SearchVerdict,
};
use crate::error::{Error, Result};
use crate::quadfield::{QuadInt, RingContext};
use crate::residues::is_square_mod_2o;
use crate::sintegers::{s_element, s_is_sum_of_squares, SVerdictKind};

pub use exec::{map_ordered, Execution};
pub use report::{write_jsonl, Failure, Finding, Report, Witness, WitnessKind, SCHEMA_VERSION};

/// Parameters of a scan, as recorded in the JSONL header.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanSpec {
    #[serde(rename = "D_list")]
    pub d_list: Vec<i64>,
    pub trace_bound: u64,
    pub m_range: Option<(u64, u64)>,
    pub node_budget: u64,
    pub seed: u64,
}

impl ScanSpec {
    pub fn new(d_list: Vec<i64>, trace_bound: u64) -> Result<Self> {
        if trace_bound < 2 {
            return Err(Error::TooSmall(trace_bound as i64));
        }
        for &d in &d_list {
            RingContext::new(d)?;
        }
        Ok(ScanSpec {
            d_list,
            trace_bound,
            m_range: None,
            node_budget: SearchOptions::from_env().node_budget,
            seed: 0,
        })
    }

    pub fn with_m_range(mut self, lo: u64, hi: u64) -> Self {
        self.m_range = Some((lo, hi));
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_node_budget(mut self, node_budget: u64) -> Self {
        self.node_budget = node_budget;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    Thm3,
    Scharlau,
    Maass,
    Pythagoras,
    Peters,
    Thm4,
    M0,
    Lemma1,
    Sint,
}

impl Claim {
    pub const ALL: [Claim; 9] = [
        Claim::Thm3,
        Claim::Scharlau,
        Claim::Maass,
        Claim::Pythagoras,
        Claim::Peters,
        Claim::Thm4,
        Claim::M0,
        Claim::Lemma1,
        Claim::Sint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Claim::Thm3 => "thm3",
            Claim::Scharlau => "scharlau",
            Claim::Maass => "maass",
            Claim::Pythagoras => "pythagoras",
            Claim::Peters => "peters",
            Claim::Thm4 => "thm4",
            Claim::M0 => "m0",
            Claim::Lemma1 => "lemma1",
            Claim::Sint => "sint",
        }
    }

    pub fn parse(s: &str) -> Option<Claim> {
        Claim::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// Totally positive elements with `Tr ≤ trace_bound`, ordered by trace then
/// by the `√D` coefficient.
pub fn scan_totally_positive(ctx: &RingContext, trace_bound: u64) -> Vec<QuadInt> {
    let d = ctx.d() as i128;
    let half = ctx.d_mod4() == 1;
    let mut out = Vec::new();
    for t in 1..=trace_bound as i128 {
        if !half && t % 2 != 0 {
            continue;
        }
        // doubled coordinates (t, b): need d·b² < t², and b ≡ t mod 2 (or b even)
        let mut bmax = (t * t / d).sqrt();
        if d * bmax * bmax == t * t {
            bmax -= 1;
        }
        for b in -bmax..=bmax {
            let ok = if half { (t - b) % 2 == 0 } else { b % 2 == 0 };
            if ok {
                out.push(
                    ctx.from_half_coords(&BigInt::from(t), &BigInt::from(b))
                        .expect("integral by construction"),
                );
            }
        }
    }
    out
}

/// Shared knobs for every scan.
#[derive(Debug, Clone, Copy)]
pub struct Harness {
    pub search: SearchOptions,
    pub exec: Execution,
    pub seed: u64,
    /// How many of the smallest elements get an oracle cross-check when a
    /// scan otherwise relies on Peters' test.
    pub oracle_confirm: usize,
    /// β-sample size for multiples whose full scan would be large.
    pub beta_sample: usize,
}

impl Default for Harness {
    fn default() -> Self {
        Harness {
            search: SearchOptions::from_env(),
            exec: Execution::default(),
            seed: 0,
            oracle_confirm: 10,
            beta_sample: 200,
        }
    }
}

/// Per-element result folded into a report in scan order.
#[derive(Default)]
struct Outcome {
    failures: Vec<Failure>,
    findings: Vec<Finding>,
    witnesses: Vec<Witness>,
    found: Vec<QuadInt>,
    length: Option<usize>,
}

impl Outcome {
    fn fail(mut self, f: Failure) -> Self {
        self.failures.push(f);
        self
    }
}

fn fold(report: &mut Report, outcomes: Vec<Outcome>) {
    for o in outcomes {
        report.instances_checked += 1;
        report.failures.extend(o.failures);
        report.findings.extend(o.findings);
        report.witnesses.extend(o.witnesses);
        report.oracle_found.extend(o.found);
    }
}

fn verdict_name(v: &SearchVerdict) -> &'static str {
    match v.outcome {
        SearchOutcome::Found(_) => "sum_of_squares",
        SearchOutcome::ExhaustedNone => "not_sum_of_squares",
        SearchOutcome::BudgetExceeded => "budget_exceeded",
    }
}

fn sos_string(alpha: &QuadInt) -> String {
    alpha.to_sqrt_string()
}

impl Harness {
    pub fn sequential(mut self) -> Self {
        self.exec = Execution::Sequential;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_node_budget(mut self, node_budget: u64) -> Self {
        self.search.node_budget = node_budget;
        self
    }

    fn oracle(&self, alpha: &QuadInt) -> SearchVerdict {
        decompose_sos(alpha, &SearchOptions { max_terms: None, candidate_seed: None, ..self.search })
    }

    /// Oracle check expecting a decomposition.
    fn expect_sos(&self, alpha: &QuadInt) -> Outcome {
        let v = self.oracle(alpha);
        let mut o = Outcome::default();
        match &v.outcome {
            SearchOutcome::Found(_) => o.found.push(alpha.clone()),
            _ => o.failures.push(Failure::new(sos_string(alpha), "sum_of_squares", verdict_name(&v))),
        }
        o
    }

    /// Oracle check expecting exhaustion; records the element as a witness.
    fn expect_not_sos(&self, alpha: &QuadInt, role: &str) -> Outcome {
        let v = self.oracle(alpha);
        let mut o = Outcome::default();
        match &v.outcome {
            SearchOutcome::ExhaustedNone => o.witnesses.push(Witness {
                element: alpha.clone(),
                verdict: WitnessKind::NotSumOfSquares,
                role: role.to_string(),
            }),
            SearchOutcome::Found(_) => {
                o.found.push(alpha.clone());
                o.failures.push(Failure::new(sos_string(alpha), "not_sum_of_squares", "sum_of_squares"));
            }
            SearchOutcome::BudgetExceeded => {
                o.failures.push(Failure::new(sos_string(alpha), "not_sum_of_squares", "budget_exceeded"))
            }
        }
        o
    }

    fn timed(&self, claim: &str, ctx: &RingContext, body: impl FnOnce(&mut Report)) -> Report {
        let start = Instant::now();
        let mut r = Report::new(claim, ctx.d());
        body(&mut r);
        r.finish(start.elapsed())
    }

    /// For `D ∈ {2,3,5}` every `2α` with `α` totally positive is a sum of
    /// squares; for every other `D`, `2·(k+ω)` is not.
    pub fn verify_thm3(&self, ctx: &RingContext, trace_bound: u64) -> Report {
        self.timed("thm3", ctx, |r| {
            if matches!(ctx.d(), 2 | 3 | 5) {
                let elems = scan_totally_positive(ctx, trace_bound);
                let outs = map_ordered(self.exec, &elems, |a| self.expect_sos(&a.scale_i64(2)));
                fold(r, outs);
                r.stat("mode", "all_doubles");
            } else {
                let w = thm3_witness(ctx).scale_i64(2);
                fold(r, vec![self.expect_not_sos(&w, "2*(k+w) not a sum of squares")]);
                r.stat("mode", "witness");
            }
        })
    }

    /// Square mod 2𝒪 implies sum of squares, for `D ∈ {2, 3}`.
    pub fn verify_scharlau(&self, ctx: &RingContext, trace_bound: u64) -> Result<Report> {
        if !matches!(ctx.d(), 2 | 3) {
            return Err(Error::WrongField(ctx.d()));
        }
        Ok(self.timed("scharlau", ctx, |r| {
            let elems: Vec<QuadInt> = scan_totally_positive(ctx, trace_bound)
                .into_iter()
                .filter(|a| is_square_mod_2o(ctx, a))
                .collect();
            let outs = map_ordered(self.exec, &elems, |a| self.expect_sos(a));
            fold(r, outs);
        }))
    }

    /// Lengths of every scanned sum of squares.
    fn lengths(&self, elems: &[QuadInt]) -> Vec<Outcome> {
        map_ordered(self.exec, elems, |a| match pythagoras_length_with(a, &self.search) {
            Ok(Some(l)) => Outcome { found: vec![a.clone()], length: Some(l), ..Outcome::default() },
            Ok(None) => Outcome::default(),
            Err(_) => Outcome::default().fail(Failure::new(sos_string(a), "length", "budget_exceeded")),
        })
    }

    fn fold_lengths(r: &mut Report, outs: Vec<Outcome>) -> (usize, BTreeMap<usize, u64>) {
        let mut hist = BTreeMap::new();
        let lens: Vec<usize> = outs.iter().filter_map(|o| o.length).collect();
        for &l in &lens {
            *hist.entry(l).or_insert(0u64) += 1;
        }
        fold(r, outs);
        let max = lens.into_iter().max().unwrap_or(0);
        r.stat("max_length", max);
        r.stat("length_histogram", &hist);
        (max, hist)
    }

    /// Every totally positive element over `D = 5` is a sum of at most three
    /// squares.
    pub fn verify_maass_d5(&self, trace_bound: u64) -> Report {
        let ctx = RingContext::new(5).expect("5 is squarefree");
        self.timed("maass", &ctx, |r| {
            let elems = scan_totally_positive(&ctx, trace_bound);
            let outs: Vec<Outcome> = self
                .lengths(&elems)
                .into_iter()
                .zip(&elems)
                .map(|(o, a)| match o.length {
                    Some(l) if l > 3 => {
                        let got = format!("length {l}");
                        o.fail(Failure::new(sos_string(a), "length <= 3", got))
                    }
                    None if o.failures.is_empty() => {
                        o.fail(Failure::new(sos_string(a), "length <= 3", "not_sum_of_squares"))
                    }
                    _ => o,
                })
                .collect();
            Self::fold_lengths(r, outs);
        })
    }

    /// Length at most 5 everywhere; at most 3, and 3 attained, for
    /// `D ∈ {2, 3, 5}`.
    pub fn verify_pythagoras(&self, ctx: &RingContext, trace_bound: u64) -> Report {
        self.timed("pythagoras", ctx, |r| {
            let elems = scan_totally_positive(ctx, trace_bound);
            let small = matches!(ctx.d(), 2 | 3 | 5);
            let cap = if small { 3 } else { 5 };
            let outs: Vec<Outcome> = self
                .lengths(&elems)
                .into_iter()
                .zip(&elems)
                .map(|(o, a)| match o.length {
                    Some(l) if l > cap => {
                        let got = format!("length {l}");
                        o.fail(Failure::new(sos_string(a), format!("length <= {cap}"), got))
                    }
                    _ => o,
                })
                .collect();
            let (max, _) = Self::fold_lengths(r, outs);
            if small && max != 3 {
                r.failures.push(Failure::new("-", "length 3 attained", format!("max length {max}")));
            }
        })
    }

    /// Peters' five-square test against the oracle. Disagreement where the
    /// test says yes fails; for `D ≡ 2, 3 (mod 4)` disagreement where it says
    /// no is a finding, since the test is only known to be sufficient there.
    pub fn verify_peters(&self, ctx: &RingContext, trace_bound: u64) -> Report {
        self.timed("peters", ctx, |r| {
            let elems = scan_totally_positive(ctx, trace_bound);
            let sufficient_only = ctx.d_mod4() != 1;
            let outs = map_ordered(self.exec, &elems, |a| {
                let p = peters_five_squares(ctx, a).expect("scanned elements are totally positive");
                let mut o = Outcome::default();
                let v = match pythagoras_length_with(a, &self.search) {
                    Ok(l) => l,
                    Err(_) => return o.fail(Failure::new(sos_string(a), "length", "budget_exceeded")),
                };
                if v.is_some() {
                    o.found.push(a.clone());
                }
                let five = v.is_some_and(|l| l <= 5);
                match (p, five) {
                    (true, false) => o.failures.push(Failure::new(
                        sos_string(a),
                        "not_sum_of_five_squares",
                        "peters_true",
                    )),
                    (false, true) if sufficient_only => o.findings.push(Finding {
                        element: sos_string(a),
                        note: "sum of five squares outside Peters' condition".into(),
                    }),
                    (false, true) => o.failures.push(Failure::new(
                        sos_string(a),
                        "sum_of_five_squares",
                        "peters_false",
                    )),
                    _ => {}
                }
                o
            });
            fold(r, outs);
        })
    }

    /// The threshold statements: small multiples of `k+ω` are not sums of
    /// squares, large multiples `κmβ` pass Peters' test, and odd multiples of
    /// `k+√D` are obstructed when 2 ramifies.
    pub fn verify_thm4(&self, ctx: &RingContext, m_lo: u64, m_hi: u64, trace_bound: u64) -> Report {
        self.timed("thm4", ctx, |r| {
            let betas = scan_totally_positive(ctx, trace_bound);
            let mut branches = BTreeMap::new();
            for m in m_lo.max(1)..=m_hi {
                let mut applied = Vec::new();
                if thm4a_applies(ctx, m) {
                    applied.push("a");
                    let w = thm3_witness(ctx).scale(&BigInt::from(m));
                    fold(r, vec![self.expect_not_sos(&w, &format!("m={m}: m*(k+w) below threshold"))]);
                }
                if thm4b_applies(ctx, m) {
                    applied.push("b");
                    let picked = self.sample_betas(&betas, m);
                    let outs = map_ordered(self.exec, &picked, |&(idx, ref b)| {
                        let x = kappa_multiple(ctx, m, b);
                        let mut o = Outcome::default();
                        if !peters_five_squares(ctx, &x).expect("totally positive") {
                            o.failures.push(Failure::new(sos_string(&x), "peters_true", "peters_false"));
                        }
                        let small = BigInt::from(trace_bound);
                        if idx < self.oracle_confirm && x.trace() <= small {
                            let c = self.expect_sos(&x);
                            o.failures.extend(c.failures);
                            o.found.extend(c.found);
                        }
                        o
                    });
                    fold(r, outs);
                }
                if m % 2 == 1 && ctx.is_ramified() {
                    applied.push("c");
                    let w = thm4c_witness(ctx, m).expect("odd m, ramified");
                    let mut o = Outcome::default();
                    if is_square_mod_2o(ctx, &w) {
                        o.failures.push(Failure::new(sos_string(&w), "not_square_mod_2O", "square_mod_2O"));
                    }
                    if w.trace() <= BigInt::from(trace_bound) {
                        let c = self.expect_not_sos(&w, &format!("m={m}: odd multiple of k+sqrtD"));
                        o.failures.extend(c.failures);
                        o.witnesses.extend(c.witnesses);
                        o.found.extend(c.found);
                    }
                    fold(r, vec![o]);
                }
                branches.insert(m.to_string(), applied.join(""));
            }
            r.stat("branches", branches);
        })
    }

    /// Indices into `betas` (the scan order) with their elements, sampled
    /// deterministically from the seed when the scan is large; the smallest
    /// `oracle_confirm` are always included.
    fn sample_betas(&self, betas: &[QuadInt], m: u64) -> Vec<(usize, QuadInt)> {
        if betas.len() <= self.beta_sample {
            return betas.iter().cloned().enumerate().collect();
        }
        let keep = self.oracle_confirm.min(betas.len());
        let rest = betas.len() - keep;
        let want = self.beta_sample.saturating_sub(keep).min(rest);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ m.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut idx: Vec<usize> = sample(&mut rng, rest, want).into_iter().map(|i| i + keep).collect();
        idx.extend(0..keep);
        idx.sort_unstable();
        idx.into_iter().map(|i| (i, betas[i].clone())).collect()
    }

    /// Empirical threshold `m*` past which every scanned `2mβ` passes
    /// Peters' test, up to `m_max`. This is an estimate over a finite scan,
    /// not the constant from the existence statement.
    pub fn estimate_m0(&self, ctx: &RingContext, m_max: u64, trace_bound: u64) -> Report {
        self.timed("m0", ctx, |r| {
            let betas = scan_totally_positive(ctx, trace_bound);
            let ms: Vec<u64> = (1..=m_max.max(1)).collect();
            let per_m = map_ordered(self.exec, &ms, |&m| {
                let mut failing = Vec::new();
                for b in &betas {
                    let x = b.scale(&BigInt::from(2 * m));
                    if !peters_five_squares(ctx, &x).expect("totally positive") {
                        failing.push(x);
                    }
                }
                failing
            });
            let kappa = ctx.kappa() as u64;
            let mut counts = BTreeMap::new();
            let mut largest_failing = None;
            for (&m, failing) in ms.iter().zip(&per_m) {
                r.instances_checked += betas.len() as u64;
                counts.insert(m.to_string(), failing.len());
                if failing.is_empty() {
                    continue;
                }
                largest_failing = Some(m);
                // 2mβ = κ·(2m/κ)·β, covered by the large-m guarantee once 2m/κ ≥ D/2
                if thm4b_applies(ctx, 2 * m / kappa) {
                    for x in failing {
                        r.failures.push(Failure::new(sos_string(x), "peters_true", "peters_false"));
                    }
                }
            }
            let m_star = match largest_failing {
                None => Some(1),
                Some(m) if m < m_max => Some(m + 1),
                Some(_) => None,
            };
            r.stat("label", "empirical estimate over scanned elements");
            r.stat("m_max", m_max);
            r.stat("m_star", m_star);
            r.stat("largest_failing_m", largest_failing);
            r.stat("failing_counts", counts);
        })
    }

    /// Every sum of squares found in the scan is a square mod 2𝒪.
    pub fn verify_lemma1_necessity(&self, ctx: &RingContext, trace_bound: u64) -> Report {
        self.timed("lemma1", ctx, |r| {
            let elems = scan_totally_positive(ctx, trace_bound);
            let outs = map_ordered(self.exec, &elems, |a| {
                let v = self.oracle(a);
                let mut o = Outcome::default();
                match v.outcome {
                    SearchOutcome::Found(_) => {
                        o.found.push(a.clone());
                        if !is_square_mod_2o(ctx, a) {
                            o.failures.push(Failure::new(sos_string(a), "square_mod_2O", "not_square_mod_2O"));
                        }
                    }
                    SearchOutcome::ExhaustedNone => {}
                    SearchOutcome::BudgetExceeded => {
                        o.failures.push(Failure::new(sos_string(a), "verdict", "budget_exceeded"))
                    }
                }
                o
            });
            let sos = outs.iter().filter(|o| !o.found.is_empty()).count();
            fold(r, outs);
            r.stat("sums_of_squares", sos);
        })
    }

    /// In `𝒪[1/m]`: odd `m` with 2 ramified obstructs the dyadic witness;
    /// otherwise the `count` smallest totally positive elements are sums of
    /// at most five squares within `j_budget` escalations.
    pub fn verify_sintegers(
        &self,
        ctx: &RingContext,
        m: u64,
        count: usize,
        j_budget: u32,
    ) -> Result<Report> {
        let obstructed_case = m % 2 == 1 && ctx.is_ramified();
        let elems: Vec<QuadInt> = if obstructed_case {
            vec![thm1b_witness(ctx)?]
        } else {
            // trace grows until the scan holds enough elements
            let mut t = 2;
            loop {
                let s = scan_totally_positive(ctx, t);
                if s.len() >= count {
                    break s.into_iter().take(count).collect();
                }
                t += 2;
            }
        };
        let xis = elems.iter().map(|a| s_element(a.clone(), 0, m)).collect::<Result<Vec<_>>>()?;
        Ok(self.timed("sint", ctx, |r| {
            let outs = map_ordered(self.exec, &xis, |xi| {
                let el = sos_string(xi.numerator());
                let mut o = Outcome::default();
                let v = match s_is_sum_of_squares(ctx, xi, j_budget, &self.search) {
                    Ok(v) => v,
                    Err(e) => return o.fail(Failure::new(el, "verdict", e)),
                };
                match (&v.kind, obstructed_case) {
                    (SVerdictKind::Obstructed(_), true) => o.witnesses.push(Witness {
                        element: xi.numerator().clone(),
                        verdict: WitnessKind::NotSumOfSquares,
                        role: format!("not a sum of squares in O[1/{m}]"),
                    }),
                    (SVerdictKind::Representable { terms, j_used }, false) => {
                        // the oracle found γ·m^(2(j_used - j)) as a sum of squares in 𝒪
                        let lift = num_traits::Pow::pow(BigInt::from(m), 2 * (j_used - xi.j()));
                        o.found.push(xi.numerator().scale(&lift));
                        if terms.len() > 5 {
                            let got = format!("{} terms", terms.len());
                            o.failures.push(Failure::new(el, "at most 5 terms", got))
                        }
                    }
                    (k, true) => o.failures.push(Failure::new(el, "obstructed", kind_name(k))),
                    (k, false) => o.failures.push(Failure::new(el, "representable", kind_name(k))),
                }
                o
            });
            fold(r, outs);
            r.stat("m", m);
            r.stat("j_budget", j_budget);
        }))
    }

    /// Runs one claim for every `D` of the spec. Claims that do not apply to
    /// a field (Scharlau outside `D ∈ {2,3}`, Maaß outside `D = 5`) are
    /// skipped.
    pub fn run(&self, claim: Claim, spec: &ScanSpec) -> Result<Vec<Report>> {
        let h = Harness {
            search: SearchOptions { node_budget: spec.node_budget, ..self.search },
            seed: spec.seed,
            ..*self
        };
        let (m_lo, m_hi) = spec.m_range.unwrap_or((1, 10));
        let mut out = Vec::new();
        for &d in &spec.d_list {
            let ctx = RingContext::new(d)?;
            let t = spec.trace_bound;
            match claim {
                Claim::Thm3 => out.push(h.verify_thm3(&ctx, t)),
                Claim::Scharlau if matches!(d, 2 | 3) => out.push(h.verify_scharlau(&ctx, t)?),
                Claim::Maass if d == 5 => out.push(h.verify_maass_d5(t)),
                Claim::Scharlau | Claim::Maass => {}
                Claim::Pythagoras => out.push(h.verify_pythagoras(&ctx, t)),
                Claim::Peters => out.push(h.verify_peters(&ctx, t)),
                Claim::Thm4 => out.push(h.verify_thm4(&ctx, m_lo, m_hi, t)),
                Claim::M0 => out.push(h.estimate_m0(&ctx, m_hi, t)),
                Claim::Lemma1 => out.push(h.verify_lemma1_necessity(&ctx, t)),
                Claim::Sint => {
                    for m in m_lo.max(2)..=m_hi {
                        if m % 2 == 1 && !ctx.is_ramified() {
                            continue;
                        }
                        out.push(h.verify_sintegers(&ctx, m, 10, 4)?);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Re-runs the oracle on a stored witness.
    pub fn reverify_witness(&self, w: &Witness) -> bool {
        let v = self.oracle(&w.element);
        match w.verdict {
            WitnessKind::SumOfSquares => v.is_found(),
            WitnessKind::NotSumOfSquares => {
                v.is_exhausted() || {
                    // S-integer witnesses are refuted by the residue obstruction
                    let ctx = RingContext::new(w.element.d()).expect("valid D");
                    ctx.is_ramified() && !is_square_mod_2o(&ctx, &w.element)
                }
            }
        }
    }
}

fn kind_name(k: &SVerdictKind) -> &'static str {
    match k {
        SVerdictKind::Representable { .. } => "representable",
        SVerdictKind::Obstructed(_) => "obstructed",
        SVerdictKind::Unknown { .. } => "unknown",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: i64) -> RingContext {
        RingContext::new(d).unwrap()
    }

    fn h() -> Harness {
        Harness::default()
    }

    #[test]
    fn scan_examples() {
        let c6 = ctx(6);
        assert_eq!(scan_totally_positive(&c6, 4), vec![c6.int(1), c6.int(2)]);
        let c2 = ctx(2);
        let s = scan_totally_positive(&c2, 4);
        let expect = vec![c2.int(1), c2.elem(2, -1), c2.int(2), c2.elem(2, 1)];
        assert_eq!(s, expect);
        for d in [2, 3, 5, 13] {
            assert_eq!(scan_totally_positive(&ctx(d), 2)[0], ctx(d).int(1));
        }
        // D = 5 includes the half-integral elements
        assert!(scan_totally_positive(&ctx(5), 3).contains(&ctx(5).elem(1, 1)));
    }

    #[test]
    fn scan_is_exact_and_ordered() {
        for d in [2, 3, 5, 6, 13, 21] {
            let c = ctx(d);
            let s = scan_totally_positive(&c, 20);
            let keys: Vec<(BigInt, BigInt)> = s.iter().map(|a| a.half_coords()).collect();
            let mut sorted = keys.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(keys, sorted);
            assert!(s.iter().all(|a| a.is_totally_positive() && a.trace() <= BigInt::from(20)));
            // brute count over a box
            let mut n = 0;
            for a2 in 1..=20i64 {
                for b2 in -20..=20i64 {
                    if let Ok(x) = c.from_half_coords(&a2.into(), &b2.into()) {
                        if x.is_totally_positive() {
                            n += 1;
                        }
                    }
                }
            }
            assert_eq!(s.len(), n, "D={d}");
        }
    }

    #[test]
    fn thm3_small_fields_and_witness() {
        assert!(h().verify_thm3(&ctx(5), 12).pass);
        let r = h().verify_thm3(&ctx(6), 30);
        assert!(r.pass);
        assert_eq!(r.witnesses[0].element, ctx(6).elem(6, 2));
        assert!(h().reverify_witness(&r.witnesses[0]));
    }

    #[test]
    fn scharlau_field_check() {
        assert!(h().verify_scharlau(&ctx(2), 12).unwrap().pass);
        assert!(matches!(h().verify_scharlau(&ctx(6), 12), Err(Error::WrongField(6))));
    }

    #[test]
    fn maass_trivial_bound() {
        let r = h().verify_maass_d5(2);
        assert!(r.pass);
        assert_eq!(r.instances_checked, 1);
        assert_eq!(r.stats["max_length"], 1);
    }

    #[test]
    fn thm4_examples() {
        let r = h().verify_thm4(&ctx(6), 1, 3, 18);
        assert!(r.pass, "{:?}", r.failures);
        assert_eq!(r.stats["branches"]["1"], "ac");
        assert_eq!(r.stats["branches"]["3"], "bc");
        assert!(r.witnesses.iter().any(|w| w.element == ctx(6).elem(9, 3)));
        let r = h().verify_thm4(&ctx(101), 2, 2, 4);
        assert!(r.pass);
        assert_eq!(r.witnesses[0].element, ctx(101).elem(10, 2));
    }

    #[test]
    fn m0_estimates() {
        for d in [2, 5] {
            let r = h().estimate_m0(&ctx(d), 5, 12);
            assert!(r.pass);
            assert_eq!(r.stats["m_star"], 1, "D={d}");
        }
    }

    #[test]
    fn lemma1_and_sintegers() {
        assert!(h().verify_lemma1_necessity(&ctx(6), 16).pass);
        assert!(h().verify_sintegers(&ctx(6), 3, 10, 4).unwrap().pass);
        assert!(h().verify_sintegers(&ctx(6), 2, 5, 4).unwrap().pass);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let spec = ScanSpec::new(vec![6, 13], 14).unwrap().with_m_range(1, 4).with_seed(7);
        for claim in [Claim::Pythagoras, Claim::Thm4, Claim::M0] {
            let a = h().run(claim, &spec).unwrap();
            let b = h().sequential().run(claim, &spec).unwrap();
            let mut ja = Vec::new();
            let mut jb = Vec::new();
            write_jsonl(&mut ja, &spec, &a).unwrap();
            write_jsonl(&mut jb, &spec, &b).unwrap();
            assert_eq!(ja, jb);
        }
    }

    #[test]
    fn jsonl_header_and_records() {
        let spec = ScanSpec::new(vec![6], 6).unwrap();
        let reports = h().run(Claim::Thm3, &spec).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &spec, &reports).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        let head: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(head["schema"], 1);
        let rec: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
        assert_eq!(rec["claim_id"], "thm3");
        assert_eq!(rec["D"], 6);
        assert_eq!(rec["pass"], true);
        assert!(rec.get("elapsed").is_none());
    }

    #[test]
    fn scan_parameters_are_validated() {
        assert!(matches!(ScanSpec::new(vec![6], 1), Err(Error::TooSmall(1))));
        assert!(ScanSpec::new(vec![8], 10).is_err());
    }
}
