//! Exhaustive search for sum-of-squares decompositions in `𝒪`.
//!
//! The search walks a canonical tree: terms are taken from a fixed candidate
//! list in non-decreasing index order, so each multiset of squares is visited
//! once, and a branch is cut as soon as the remainder stops being totally
//! nonnegative. Every nonzero square has trace at least 2, so the depth is
//! bounded by `Tr(α)/2` and an exhausted tree is a proof that no
//! decomposition exists.
//!
//! The kernel works on doubled coordinates `(A, B)` with the element equal to
//! `(A + B√D)/2`, held in `i128`. Targets whose coordinates do not fit in
//! `i64` are reported as [`SearchOutcome::BudgetExceeded`]: their candidate
//! boxes are far beyond any node budget anyway.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadfield::QuadInt;

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;
pub const NODE_BUDGET_ENV: &str = "SOSLAB_NODE_BUDGET";

/// A checked certificate: `target = Σ terms[i]²`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    target: QuadInt,
    terms: Vec<QuadInt>,
}

impl Decomposition {
    /// Canonicalizes the terms (sign representative, zeros dropped,
    /// non-increasing `(a, b)` order) and re-verifies the identity.
    pub fn new(target: QuadInt, terms: Vec<QuadInt>) -> Result<Self> {
        let mut terms: Vec<QuadInt> = terms
            .into_iter()
            .filter(|t| !t.is_zero())
            .map(|t| t.canonical_sign())
            .collect();
        terms.sort_by_key(|t| std::cmp::Reverse(t.half_coords()));
        let mut sum = target.checked_sub(&target)?;
        for t in &terms {
            sum = sum.checked_add(&t.square())?;
        }
        if sum != target {
            return Err(Error::InvalidDecomposition(target.to_string()));
        }
        Ok(Decomposition { target, terms })
    }

    pub fn target(&self) -> &QuadInt {
        &self.target
    }

    pub fn terms(&self) -> &[QuadInt] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Recomputes `Σ terms²` and compares with the target.
    pub fn verify(&self) -> bool {
        let sum = self.terms.iter().fold(&self.target - &self.target, |acc, t| acc + t.square());
        sum == self.target
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SearchOutcome {
    Found(Decomposition),
    /// The whole canonical tree was traversed without a hit.
    ExhaustedNone,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchVerdict {
    pub outcome: SearchOutcome,
    pub nodes_explored: u64,
}

impl SearchVerdict {
    pub fn is_found(&self) -> bool {
        matches!(self.outcome, SearchOutcome::Found(_))
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self.outcome, SearchOutcome::ExhaustedNone)
    }

    pub fn decomposition(&self) -> Option<&Decomposition> {
        match &self.outcome {
            SearchOutcome::Found(d) => Some(d),
            _ => None,
        }
    }

    /// `Some(true)` for Found, `Some(false)` for ExhaustedNone.
    pub fn as_bool(&self) -> Option<bool> {
        match self.outcome {
            SearchOutcome::Found(_) => Some(true),
            SearchOutcome::ExhaustedNone => Some(false),
            SearchOutcome::BudgetExceeded => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub max_terms: Option<usize>,
    pub node_budget: u64,
    /// Shuffles the candidate list before the search. The tree stays
    /// complete, only the visiting order changes.
    pub candidate_seed: Option<u64>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { max_terms: None, node_budget: DEFAULT_NODE_BUDGET, candidate_seed: None }
    }
}

impl SearchOptions {
    pub fn unbounded() -> Self {
        SearchOptions { node_budget: u64::MAX, ..Self::default() }
    }

    /// Default options with the node budget taken from `SOSLAB_NODE_BUDGET`
    /// when that variable holds an integer.
    pub fn from_env() -> Self {
        let node_budget = std::env::var(NODE_BUDGET_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_NODE_BUDGET);
        SearchOptions { node_budget, ..Self::default() }
    }

    pub fn with_max_terms(self, max_terms: usize) -> Self {
        SearchOptions { max_terms: Some(max_terms), ..self }
    }

    pub fn with_budget(self, node_budget: u64) -> Self {
        SearchOptions { node_budget, ..self }
    }

    pub fn with_candidate_seed(self, seed: u64) -> Self {
        SearchOptions { candidate_seed: Some(seed), ..self }
    }
}

/// `(A + B√D)/2` in machine integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Half {
    a: i128,
    b: i128,
}

impl Half {
    const ZERO: Half = Half { a: 0, b: 0 };

    fn from_quad(x: &QuadInt) -> Option<Half> {
        let (a2, b2) = x.half_coords();
        Some(Half { a: a2.to_i64()? as i128, b: b2.to_i64()? as i128 })
    }

    fn to_quad(self, d: i64) -> QuadInt {
        QuadInt::from_half_coords(d, &BigInt::from(self.a), &BigInt::from(self.b))
            .expect("kernel only produces integral elements")
    }

    fn square(self, d: i128) -> Half {
        Half { a: (self.a * self.a + d * self.b * self.b) / 2, b: self.a * self.b }
    }

    fn sub(self, o: Half) -> Half {
        Half { a: self.a - o.a, b: self.b - o.b }
    }

    fn is_totally_nonnegative(self, d: i128) -> bool {
        self.a >= 0 && self.a * self.a >= d * self.b * self.b
    }

    /// Trace of the element.
    fn trace(self) -> i128 {
        self.a
    }
}

fn isqrt_i128(n: i128) -> i128 {
    if n <= 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Canonical roots `β` with `β²` dominated by `gamma` in both embeddings,
/// sorted by descending `(a, b)`. `budget` caps the size of the scanned box.
fn kernel_candidates(gamma: Half, d: i64, budget: u64) -> Option<Vec<Half>> {
    let di = d as i128;
    let half_basis = d.rem_euclid(4) == 1;
    // Tr(β²) = (A² + D·B²)/2 ≤ Tr(γ)
    let cap = 2 * gamma.trace();
    let b_max = isqrt_i128(cap / di);
    let a_max = isqrt_i128(cap);
    let box_size = (2 * b_max + 1).saturating_mul(a_max + 1);
    if box_size as u128 > budget as u128 {
        return None;
    }
    let mut out = Vec::new();
    for b in -b_max..=b_max {
        let rest = cap - di * b * b;
        if rest < 0 {
            continue;
        }
        for a in 0..=isqrt_i128(rest) {
            if a == 0 && b <= 0 {
                continue;
            }
            let integral = if half_basis { (a - b) % 2 == 0 } else { a % 2 == 0 && b % 2 == 0 };
            if !integral {
                continue;
            }
            let beta = Half { a, b };
            if gamma.sub(beta.square(di)).is_totally_nonnegative(di) {
                out.push(beta);
            }
        }
    }
    out.sort_by(|x, y| (y.a, y.b).cmp(&(x.a, x.b)));
    Some(out)
}

/// All canonical `β ≠ 0` with `σᵢ(β²) ≤ σᵢ(γ)` in both embeddings.
pub fn candidate_roots(gamma: &QuadInt) -> Result<Vec<QuadInt>> {
    if !gamma.is_totally_nonnegative() {
        return Err(Error::NotTotallyNonneg(gamma.to_string()));
    }
    let g = Half::from_quad(gamma).ok_or_else(|| Error::TooLarge(gamma.to_string()))?;
    let cands = kernel_candidates(g, gamma.d(), u64::MAX)
        .ok_or_else(|| Error::TooLarge(gamma.to_string()))?;
    Ok(cands.into_iter().map(|h| h.to_quad(gamma.d())).collect())
}

enum Step {
    Found,
    Exhausted,
    Budget,
}

struct Searcher {
    d: i128,
    squares: Vec<Half>,
    /// Failed `(remainder, first candidate index, terms left)` states.
    dead: HashSet<(Half, usize, usize)>,
    path: Vec<usize>,
    nodes: u64,
    budget: u64,
    depth_cap: usize,
}

impl Searcher {
    fn dfs(&mut self, rem: Half, start: usize, left: usize) -> Step {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Step::Budget;
        }
        if rem == Half::ZERO {
            return Step::Found;
        }
        // Each further term costs trace ≥ 2.
        let left = left.min((rem.trace() / 2) as usize);
        if left == 0 {
            return Step::Exhausted;
        }
        debug_assert!(self.path.len() < self.depth_cap);
        let key = (rem, start, left);
        if self.dead.contains(&key) {
            return Step::Exhausted;
        }
        for i in start..self.squares.len() {
            let next = rem.sub(self.squares[i]);
            if !next.is_totally_nonnegative(self.d) {
                continue;
            }
            self.path.push(i);
            match self.dfs(next, i, left - 1) {
                Step::Exhausted => {
                    self.path.pop();
                }
                other => return other,
            }
        }
        self.dead.insert(key);
        Step::Exhausted
    }
}

/// Decides whether `alpha` is a sum of at most `max_terms` squares in `𝒪`
/// (any number when `max_terms` is `None`).
pub fn decompose_sos(alpha: &QuadInt, opts: &SearchOptions) -> SearchVerdict {
    let d = alpha.d();
    let verdict = |outcome, nodes| SearchVerdict { outcome, nodes_explored: nodes };
    if alpha.is_zero() {
        let empty = Decomposition::new(alpha.clone(), Vec::new()).expect("0 = empty sum");
        return verdict(SearchOutcome::Found(empty), 0);
    }
    if !alpha.is_totally_positive() {
        return verdict(SearchOutcome::ExhaustedNone, 0);
    }
    let Some(target) = Half::from_quad(alpha) else {
        return verdict(SearchOutcome::BudgetExceeded, 0);
    };
    let Some(mut cands) = kernel_candidates(target, d, opts.node_budget) else {
        return verdict(SearchOutcome::BudgetExceeded, 0);
    };
    if let Some(seed) = opts.candidate_seed {
        cands.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let di = d as i128;
    let depth_cap = (target.trace() / 2) as usize;
    let left = opts.max_terms.unwrap_or(usize::MAX).min(depth_cap);
    let mut s = Searcher {
        d: di,
        squares: cands.iter().map(|c| c.square(di)).collect(),
        dead: HashSet::new(),
        path: Vec::new(),
        nodes: 0,
        budget: opts.node_budget,
        depth_cap,
    };
    match s.dfs(target, 0, left) {
        Step::Found => {
            let terms = s.path.iter().map(|&i| cands[i].to_quad(d)).collect();
            let dec = Decomposition::new(alpha.clone(), terms).expect("search path re-verifies");
            verdict(SearchOutcome::Found(dec), s.nodes)
        }
        Step::Exhausted => verdict(SearchOutcome::ExhaustedNone, s.nodes),
        Step::Budget => verdict(SearchOutcome::BudgetExceeded, s.nodes),
    }
}

/// Marker for a search that ran out of nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetExceeded;

/// Least number of squares summing to `alpha`, by iterative deepening.
pub fn pythagoras_length_with(
    alpha: &QuadInt,
    opts: &SearchOptions,
) -> std::result::Result<Option<usize>, BudgetExceeded> {
    let unbounded = SearchOptions { max_terms: None, ..*opts };
    let found = match decompose_sos(alpha, &unbounded).outcome {
        SearchOutcome::Found(dec) => dec.len(),
        SearchOutcome::ExhaustedNone => return Ok(None),
        SearchOutcome::BudgetExceeded => return Err(BudgetExceeded),
    };
    for r in 1..found {
        match decompose_sos(alpha, &unbounded.with_max_terms(r)).outcome {
            SearchOutcome::Found(dec) => return Ok(Some(dec.len())),
            SearchOutcome::ExhaustedNone => {}
            SearchOutcome::BudgetExceeded => return Err(BudgetExceeded),
        }
    }
    Ok(Some(found))
}

pub fn pythagoras_length(alpha: &QuadInt) -> Option<usize> {
    pythagoras_length_with(alpha, &SearchOptions::unbounded()).expect("unbounded search")
}

pub fn is_sum_of_squares(alpha: &QuadInt) -> bool {
    decompose_sos(alpha, &SearchOptions::unbounded()).is_found()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::RingContext;
    use crate::residues::is_square_mod_2o;
    use proptest::prelude::*;

    fn ctx(d: i64) -> RingContext {
        RingContext::new(d).unwrap()
    }

    #[test]
    fn candidate_examples() {
        let c6 = ctx(6);
        assert_eq!(candidate_roots(&c6.one()).unwrap(), vec![c6.one()]);

        let c3 = ctx(3);
        // σ₂(4+2√3) = 4-2√3 < 1, so neither 1 nor 2 fits under the conjugate
        let got = candidate_roots(&c3.elem(4, 2)).unwrap();
        assert_eq!(got, vec![c3.elem(1, 1)]);
        let got = candidate_roots(&c3.elem(6, 2)).unwrap();
        assert_eq!(got, vec![c3.elem(1, 1), c3.one()]);

        let c2 = ctx(2);
        assert!(candidate_roots(&c2.zero()).unwrap().is_empty());
        assert!(candidate_roots(&c2.elem(0, 1)).is_err());
    }

    #[test]
    fn decompose_examples() {
        let c2 = ctx(2);
        let v = decompose_sos(&c2.elem(4, 2), &SearchOptions::default());
        let dec = v.decomposition().unwrap();
        assert_eq!(dec.terms(), &[c2.elem(1, 1), c2.one()]);

        let c3 = ctx(3);
        let v = decompose_sos(&c3.elem(4, 2), &SearchOptions::default());
        assert_eq!(v.decomposition().unwrap().terms(), &[c3.elem(1, 1)]);

        let c6 = ctx(6);
        let v = decompose_sos(&c6.elem(6, 2), &SearchOptions::default());
        assert_eq!(v.outcome, SearchOutcome::ExhaustedNone);

        let v = decompose_sos(&c2.zero(), &SearchOptions::default());
        assert!(v.decomposition().unwrap().is_empty());
    }

    #[test]
    fn non_positive_targets_are_refuted_immediately() {
        let c6 = ctx(6);
        let v = decompose_sos(&c6.omega(), &SearchOptions::default());
        assert_eq!(v, SearchVerdict { outcome: SearchOutcome::ExhaustedNone, nodes_explored: 0 });
        let v = decompose_sos(&c6.int(-4), &SearchOptions::default());
        assert!(v.is_exhausted());
    }

    #[test]
    fn pythagoras_examples() {
        let c5 = ctx(5);
        assert_eq!(pythagoras_length(&c5.elem(2, 2)), Some(2));
        let c3 = ctx(3);
        assert_eq!(pythagoras_length(&c3.elem(4, 2)), Some(1));
        let c2 = ctx(2);
        assert_eq!(pythagoras_length(&c2.elem(1, 1)), None);
        assert_eq!(pythagoras_length(&c2.int(7)), Some(3));
    }

    #[test]
    fn is_sum_of_squares_examples() {
        let c2 = ctx(2);
        assert!(is_sum_of_squares(&c2.elem(4, 2)));
        let c6 = ctx(6);
        assert!(!is_sum_of_squares(&c6.elem(6, 2)));
        let c5 = ctx(5);
        assert!(is_sum_of_squares(&c5.elem(2, 1)));
    }

    #[test]
    fn tiny_budget_degrades_gracefully() {
        let c2 = ctx(2);
        let v = decompose_sos(&c2.int(1000), &SearchOptions::default().with_budget(3));
        assert_eq!(v.outcome, SearchOutcome::BudgetExceeded);
        assert_eq!(pythagoras_length_with(&c2.int(1000), &SearchOptions::default().with_budget(3)),
                   Err(BudgetExceeded));
    }

    #[test]
    fn oversized_target_is_budget_exceeded() {
        let c2 = ctx(2);
        let huge = c2.int(BigInt::from(1u8) << 80);
        assert_eq!(decompose_sos(&huge, &SearchOptions::default()).outcome, SearchOutcome::BudgetExceeded);
    }

    #[test]
    fn decomposition_rejects_wrong_terms() {
        let c2 = ctx(2);
        assert!(Decomposition::new(c2.int(3), vec![c2.one()]).is_err());
        let d = Decomposition::new(c2.int(2), vec![-c2.one(), c2.zero(), c2.one()]).unwrap();
        assert_eq!(d.terms(), &[c2.one(), c2.one()]);
        assert!(d.verify());
    }

    #[test]
    fn max_terms_is_respected() {
        let c2 = ctx(2);
        // 7 needs three squares in ℤ[√2]
        let v = decompose_sos(&c2.int(7), &SearchOptions::default().with_max_terms(2));
        assert!(v.is_exhausted());
        let v = decompose_sos(&c2.int(7), &SearchOptions::default().with_max_terms(3));
        assert_eq!(v.decomposition().unwrap().len(), 3);
    }

    fn desk_d() -> impl Strategy<Value = i64> {
        prop::sample::select(vec![2i64, 3, 5, 6, 7, 13, 17, 21])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn found_is_sound_and_locally_square(d in desk_d(), u in 0i64..14, v in -8i64..8) {
            let c = ctx(d);
            let a = c.elem(u, v);
            prop_assume!(a.is_totally_positive());
            let verdict = decompose_sos(&a, &SearchOptions::default());
            if let Some(dec) = verdict.decomposition() {
                prop_assert!(dec.verify());
                prop_assert!(dec.len() as i64 <= a.trace().to_i64().unwrap() / 2);
                prop_assert!(is_square_mod_2o(&c, &a));
            }
        }

        #[test]
        fn order_independent(d in prop::sample::select(vec![2i64, 3, 5, 6]),
                             u in 0i64..11, v in -6i64..6, seed in any::<u64>()) {
            let c = ctx(d);
            let a = c.elem(u, v);
            prop_assume!(a.is_totally_positive() && a.trace() <= BigInt::from(20));
            let plain = decompose_sos(&a, &SearchOptions::default()).as_bool();
            let shuffled = decompose_sos(&a, &SearchOptions::default().with_candidate_seed(seed)).as_bool();
            prop_assert_eq!(plain, shuffled);
        }

        #[test]
        fn sums_of_squares_are_closed(d in desk_d(),
                                      x in (0i64..8, -5i64..5), y in (0i64..8, -5i64..5)) {
            let c = ctx(d);
            let (a, b) = (c.elem(x.0, x.1), c.elem(y.0, y.1));
            prop_assume!(a.trace() <= BigInt::from(12) && b.trace() <= BigInt::from(12));
            if is_sum_of_squares(&a) && is_sum_of_squares(&b) {
                prop_assert!(is_sum_of_squares(&(&a + &b)));
            }
        }
    }
}
