//! Sums of squares in `𝒪[1/m]`.
//!
//! Elements are kept as `γ / m^(2j)` with `γ ∈ 𝒪`. Representability is
//! semi-decided by clearing ever larger square denominators and searching in
//! `𝒪`; the only certified negative answer is the dyadic obstruction for odd
//! `m` when 2 ramifies.

use num_bigint::BigInt;
use num_traits::Pow;
use serde::Serialize;

use crate::decompose::{decompose_sos, SearchOptions, SearchOutcome};
use crate::error::{Error, Result};
use crate::quadfield::{QuadInt, RingContext};
use crate::residues::{is_square_mod_2o, residue_mod_2o, Residue2O};

/// `numerator / m^(2j)`
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SElement {
    numerator: QuadInt,
    j: u32,
    m: u64,
}

impl SElement {
    pub fn numerator(&self) -> &QuadInt {
        &self.numerator
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn m(&self) -> u64 {
        self.m
    }
}

/// `gamma / m^(2j)` with factors `m²` of the numerator cancelled against the
/// denominator while `j > 0`.
pub fn s_element(gamma: QuadInt, j: u32, m: u64) -> Result<SElement> {
    if m <= 1 {
        return Err(Error::BadModulus(m));
    }
    let m2 = BigInt::from(m) * m;
    let mut numerator = gamma;
    let mut j = j;
    while j > 0 {
        match numerator.div_exact(&m2) {
            Some(n) => {
                numerator = n;
                j -= 1;
            }
            None => break,
        }
    }
    Ok(SElement { numerator, j, m })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObstructionCert {
    pub m_odd: bool,
    pub ramified: bool,
    pub residue: Residue2O,
    pub reason: String,
}

impl ObstructionCert {
    pub fn is_valid(&self, ctx: &RingContext) -> bool {
        self.m_odd
            && self.ramified
            && ctx.is_ramified()
            && !crate::residues::squares_mod_2o(ctx).contains(&self.residue)
    }
}

/// A root `numerator / m^exponent`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SRoot {
    pub numerator: QuadInt,
    pub exponent: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SVerdictKind {
    Representable { terms: Vec<SRoot>, j_used: u32 },
    Obstructed(ObstructionCert),
    Unknown { j_budget: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SVerdict {
    pub kind: SVerdictKind,
    pub nodes_explored: u64,
}

impl SVerdict {
    pub fn is_representable(&self) -> bool {
        matches!(self.kind, SVerdictKind::Representable { .. })
    }

    pub fn is_obstructed(&self) -> bool {
        matches!(self.kind, SVerdictKind::Obstructed(_))
    }
}

pub fn s_obstruction(ctx: &RingContext, xi: &SElement) -> Option<ObstructionCert> {
    let m_odd = xi.m % 2 == 1;
    if !m_odd || !ctx.is_ramified() || is_square_mod_2o(ctx, &xi.numerator) {
        return None;
    }
    Some(ObstructionCert {
        m_odd,
        ramified: true,
        residue: residue_mod_2o(&xi.numerator),
        reason: format!(
            "m = {} is odd, so m^(2j) ≡ 1 mod 2O and any sum of squares in O[1/m] clears to \
             one in O; every sum of squares in O is a square mod 2O, but {} is not (D = {} ramifies at 2)",
            xi.m,
            xi.numerator,
            ctx.d()
        ),
    })
}

/// Checks `Σ (βᵢ/m^eᵢ)² = xi` exactly.
pub fn verify_representation(xi: &SElement, terms: &[SRoot]) -> bool {
    let m = BigInt::from(xi.m);
    let Some(top) = terms.iter().map(|t| t.exponent).max().max(Some(xi.j)) else { return false };
    // scale everything to the common denominator m^(2·top)
    let mut lhs = &xi.numerator - &xi.numerator;
    for t in terms {
        let lift = Pow::pow(&m, top - t.exponent);
        lhs = lhs + t.numerator.scale(&lift).square();
    }
    let rhs = xi.numerator.scale(&Pow::pow(&m, 2 * (top - xi.j)));
    lhs == rhs
}

/// Searches for a representation of `xi` as a sum of squares in `𝒪[1/m]`,
/// clearing denominators `m^(2j')` for `j' = j, …, j + j_budget`.
pub fn s_is_sum_of_squares(
    ctx: &RingContext,
    xi: &SElement,
    j_budget: u32,
    opts: &SearchOptions,
) -> Result<SVerdict> {
    if !ctx.is_totally_positive(&xi.numerator) {
        return Err(Error::NotTotallyPositive(xi.numerator.to_string()));
    }
    if let Some(cert) = s_obstruction(ctx, xi) {
        return Ok(SVerdict { kind: SVerdictKind::Obstructed(cert), nodes_explored: 0 });
    }
    let m2 = BigInt::from(xi.m) * xi.m;
    let mut target = xi.numerator.clone();
    let mut nodes = 0;
    for step in 0..=j_budget {
        if step > 0 {
            target = target.scale(&m2);
        }
        let j_used = xi.j + step;
        let five = SearchOptions { max_terms: Some(5), ..*opts };
        let unbounded = SearchOptions { max_terms: None, ..*opts };
        for o in [five, unbounded] {
            let v = decompose_sos(&target, &o);
            nodes += v.nodes_explored;
            if let SearchOutcome::Found(dec) = v.outcome {
                let terms: Vec<SRoot> = dec
                    .terms()
                    .iter()
                    .map(|b| SRoot { numerator: b.clone(), exponent: j_used })
                    .collect();
                debug_assert!(verify_representation(xi, &terms));
                return Ok(SVerdict {
                    kind: SVerdictKind::Representable { terms, j_used },
                    nodes_explored: nodes,
                });
            }
        }
    }
    Ok(SVerdict { kind: SVerdictKind::Unknown { j_budget }, nodes_explored: nodes })
}

/// Upper bound for the Pythagoras number of `𝒪[1/m]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PythagorasBound {
    pub value: u32,
    pub provenance: &'static str,
}

pub fn s_pythagoras_upper(_ctx: &RingContext, _m: u64) -> PythagorasBound {
    PythagorasBound {
        value: 5,
        provenance: "known bound for quadratic S-integer rings; not computed here",
    }
}
