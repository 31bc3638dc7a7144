//! Closed-form criteria: Peters' five-square interval test, the witness
//! elements behind the negative classification results, and the
//! thresholds for multiples `m𝒪⁺`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadfield::{OmegaKind, QuadInt, RingContext};
use crate::residues::{dyadic_valuation_class, is_square_mod_2o, ValuationClass};

/// The interval `[(center - √radicand)/denom, (center + √radicand)/denom]`
/// together with its admissible integers.
///
/// For `D ≡ 1 (mod 4)` and `α = a₀ + a₁ω`: `center = 2a₀ + a₁`,
/// `radicand = 4N(α)`, `denom = D`, and `n ≡ a₁ (mod 2)` is required.
/// For `D ≡ 2, 3 (mod 4)` and `α = a₀ + 2a₁√D`: `center = a₀`,
/// `radicand = N(α)`, `denom = 2D`, no parity condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PetersInterval {
    pub center: BigInt,
    pub radicand: BigInt,
    pub denom: BigInt,
    pub parity_required: Option<u8>,
    /// Smallest and largest integer in the closed interval, if any.
    pub integer_range: Option<(BigInt, BigInt)>,
}

impl PetersInterval {
    fn build(center: BigInt, radicand: BigInt, denom: BigInt, parity: Option<u8>) -> Self {
        // n lies in the interval iff (denom·n - center)² ≤ radicand.
        let contains = |n: &BigInt| -> bool {
            let t = &denom * n - &center;
            &t * &t <= radicand
        };
        let s = radicand.sqrt();
        // lower endpoint lies in ((center-s-1)/denom, (center-s)/denom]
        let start = (&center - &s - 1i32).div_floor(&denom);
        let lo = (0..3i32).map(|k| &start + k).find(|n| contains(n));
        let end = (&center + &s + 1i32).div_ceil(&denom);
        let hi = (0..3i32).map(|k| &end - k).find(|n| contains(n));
        let integer_range = match (lo, hi) {
            (Some(lo), Some(hi)) if lo <= hi => Some((lo, hi)),
            _ => None,
        };
        PetersInterval { center, radicand, denom, parity_required: parity, integer_range }
    }

    pub fn contains(&self, n: &BigInt) -> bool {
        let t = &self.denom * n - &self.center;
        &t * &t <= self.radicand
    }

    /// Whether some integer of the interval satisfies the parity condition.
    pub fn has_admissible(&self) -> bool {
        let Some((lo, hi)) = &self.integer_range else { return false };
        match self.parity_required {
            None => true,
            Some(p) => hi > lo || lo.mod_floor(&BigInt::from(2)) == BigInt::from(p),
        }
    }

    /// Every admissible integer. The list grows like `√N(α)/D`.
    pub fn admissible_n(&self) -> Vec<BigInt> {
        let Some((lo, hi)) = &self.integer_range else { return Vec::new() };
        let mut out = Vec::new();
        let mut n = lo.clone();
        while &n <= hi {
            let ok = self
                .parity_required
                .map_or(true, |p| n.mod_floor(&BigInt::from(2)) == BigInt::from(p));
            if ok {
                out.push(n.clone());
            }
            n += 1;
        }
        out
    }
}

/// The interval for `alpha`, or `None` when `D ≡ 2, 3 (mod 4)` and the
/// `√D`-coefficient of `alpha` is odd.
pub fn peters_interval(ctx: &RingContext, alpha: &QuadInt) -> Result<Option<PetersInterval>> {
    if !ctx.is_totally_positive(alpha) {
        return Err(Error::NotTotallyPositive(alpha.to_string()));
    }
    let norm = alpha.norm();
    let d = BigInt::from(ctx.d());
    Ok(match ctx.omega_kind() {
        OmegaKind::HalfOnePlusSqrtD => {
            let parity = u8::from(alpha.v().is_odd());
            Some(PetersInterval::build(alpha.trace(), norm * 4, d, Some(parity)))
        }
        OmegaKind::SqrtD => {
            if alpha.v().is_odd() {
                None
            } else {
                Some(PetersInterval::build(alpha.u().clone(), norm, d * 2, None))
            }
        }
    })
}

/// Whether `alpha` is a sum of five squares according to Peters' criterion.
///
/// For `D ≡ 2, 3 (mod 4)` an odd `√D`-coefficient means `alpha` is not a
/// square mod `2𝒪`, hence not a sum of squares at all.
pub fn peters_five_squares(ctx: &RingContext, alpha: &QuadInt) -> Result<bool> {
    Ok(peters_interval(ctx, alpha)?.is_some_and(|iv| iv.has_admissible()))
}

/// `k + √D` with `k = ⌊√D⌋ + 1` for `D ≡ 2, 3 (mod 4)`, and `⌊ω⌋ + ω` for
/// `D ≡ 1 (mod 4)`.
pub fn thm3_witness(ctx: &RingContext) -> QuadInt {
    let w = match ctx.omega_kind() {
        OmegaKind::SqrtD => ctx.elem(ctx.isqrt_d() + 1, 1),
        OmegaKind::HalfOnePlusSqrtD => ctx.elem(ctx.floor_omega(), 1),
    };
    assert!(w.is_totally_positive(), "witness {w} must be totally positive");
    w
}

/// A totally positive element of `𝔭 ∖ 𝔭²` at the ramified dyadic prime:
/// `√D` (D even) or `1 + √D` (D odd), shifted by the least even integer
/// that makes it totally positive.
pub fn thm1b_witness(ctx: &RingContext) -> Result<QuadInt> {
    if !ctx.is_ramified() {
        return Err(Error::NotRamified(ctx.d()));
    }
    let base = if ctx.d() % 2 == 0 { ctx.omega() } else { ctx.elem(1, 1) };
    let mut shift = BigInt::zero();
    let mut alpha = base.clone();
    while !alpha.is_totally_positive() {
        shift += 2;
        alpha = &base + &ctx.int(shift.clone());
    }
    assert_eq!(dyadic_valuation_class(ctx, &alpha)?, ValuationClass::InPNotP2);
    assert!(!is_square_mod_2o(ctx, &alpha));
    Ok(alpha)
}

/// `m < κ√D/4`, decided as `16m² < κ²D`.
pub fn thm4a_applies(ctx: &RingContext, m: u64) -> bool {
    let k = ctx.kappa() as u128;
    16 * (m as u128) * (m as u128) < k * k * ctx.d() as u128
}

/// `m ≥ D/2`
pub fn thm4b_applies(ctx: &RingContext, m: u64) -> bool {
    2 * m as u128 >= ctx.d() as u128
}

/// `m·(k + √D)` for odd `m` and `D ≡ 2, 3 (mod 4)`.
pub fn thm4c_witness(ctx: &RingContext, m: u64) -> Result<QuadInt> {
    if m % 2 == 0 {
        return Err(Error::NotOdd(m));
    }
    if !ctx.is_ramified() {
        return Err(Error::NotRamified(ctx.d()));
    }
    let w = thm3_witness(ctx).scale(&BigInt::from(m));
    assert!(!is_square_mod_2o(ctx, &w));
    Ok(w)
}

/// `κ·m·β`
pub fn kappa_multiple(ctx: &RingContext, m: u64, beta: &QuadInt) -> QuadInt {
    beta.scale(&(BigInt::from(ctx.kappa()) * m))
}

/// Upper end of the interval as a float, for human-readable output only.
pub fn approx_endpoints(iv: &PetersInterval) -> (f64, f64) {
    let f = |x: &BigInt| x.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let r = f(&iv.radicand).sqrt();
    let (c, den) = (f(&iv.center), f(&iv.denom));
    ((c - r) / den, (c + r) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::is_sum_of_squares;
    use num_traits::One;

    fn ctx(d: i64) -> RingContext {
        RingContext::new(d).unwrap()
    }

    #[test]
    fn peters_examples() {
        let c5 = ctx(5);
        let a = c5.elem(2, 2);
        let iv = peters_interval(&c5, &a).unwrap().unwrap();
        assert_eq!(iv.integer_range, Some((1.into(), 2.into())));
        assert_eq!(iv.admissible_n(), vec![BigInt::from(2)]);
        assert!(peters_five_squares(&c5, &a).unwrap());

        let c3 = ctx(3);
        let a = c3.elem(4, 2);
        let iv = peters_interval(&c3, &a).unwrap().unwrap();
        assert_eq!(iv.admissible_n(), vec![BigInt::one()]);
        assert!(peters_five_squares(&c3, &a).unwrap());

        let c6 = ctx(6);
        assert!(peters_interval(&c6, &c6.elem(3, 1)).unwrap().is_none());
        assert!(!peters_five_squares(&c6, &c6.elem(3, 1)).unwrap());
        assert!(!is_sum_of_squares(&c6.elem(3, 1)));

        assert!(matches!(
            peters_five_squares(&c6, &c6.omega()),
            Err(Error::NotTotallyPositive(_))
        ));
    }

    #[test]
    fn closed_endpoints_are_kept() {
        // D=5, α=1: (5n-2)² ≤ 4 holds with equality at n = 0.
        let c5 = ctx(5);
        let iv = peters_interval(&c5, &c5.one()).unwrap().unwrap();
        assert_eq!(iv.integer_range, Some((0.into(), 0.into())));
        assert!(iv.has_admissible());
        // D=3, α=4+2√3: upper endpoint (4+2)/6 = 1 exactly.
        let c3 = ctx(3);
        let iv = peters_interval(&c3, &c3.elem(4, 2)).unwrap().unwrap();
        assert!(iv.contains(&BigInt::one()));
        assert!(!iv.contains(&BigInt::from(2)));
    }

    #[test]
    fn interval_range_matches_direct_scan() {
        for d in [2i64, 3, 5, 6, 7, 13, 17, 21, 101] {
            let c = ctx(d);
            for u in 0..40 {
                for v in -25..25 {
                    let a = c.elem(u, v);
                    let Ok(Some(iv)) = peters_interval(&c, &a) else { continue };
                    let direct: Vec<BigInt> = (-5..60)
                        .map(BigInt::from)
                        .filter(|n| iv.contains(n))
                        .collect();
                    let range = iv.integer_range.clone().map(|(lo, hi)| (lo, hi));
                    assert_eq!(range, direct.first().cloned().zip(direct.last().cloned()), "D={d} {a}");
                }
            }
        }
    }

    #[test]
    fn thm3_witness_examples() {
        let c6 = ctx(6);
        assert_eq!(thm3_witness(&c6), c6.elem(3, 1));
        let c5 = ctx(5);
        assert_eq!(thm3_witness(&c5), c5.elem(1, 1));
        let c2 = ctx(2);
        assert_eq!(thm3_witness(&c2), c2.elem(2, 1));
    }

    #[test]
    fn thm1b_witness_examples() {
        let c6 = ctx(6);
        assert_eq!(thm1b_witness(&c6).unwrap(), c6.elem(4, 1));
        let c3 = ctx(3);
        assert_eq!(thm1b_witness(&c3).unwrap(), c3.elem(3, 1));
        assert_eq!(thm1b_witness(&ctx(5)), Err(Error::NotRamified(5)));
        for d in [2, 3, 6, 7, 10, 11, 14, 15, 19, 22, 23, 26, 31, 35, 39, 43, 47] {
            let c = ctx(d);
            let w = thm1b_witness(&c).unwrap();
            assert!(w.is_totally_positive());
            assert_eq!(dyadic_valuation_class(&c, &w).unwrap(), ValuationClass::InPNotP2);
            assert!(!is_square_mod_2o(&c, &w));
        }
    }

    #[test]
    fn thm4_thresholds() {
        let c101 = ctx(101);
        assert!(thm4a_applies(&c101, 2));
        assert!(!thm4a_applies(&c101, 3));
        let c6 = ctx(6);
        assert!(thm4a_applies(&c6, 1));
        assert!(thm4b_applies(&c6, 3));
        assert!(!thm4b_applies(&c6, 2));
        assert!(thm4b_applies(&ctx(13), 7));
    }

    #[test]
    fn thm4c_examples() {
        let c6 = ctx(6);
        assert_eq!(thm4c_witness(&c6, 3).unwrap(), c6.elem(9, 3));
        let c7 = ctx(7);
        assert_eq!(thm4c_witness(&c7, 1).unwrap(), c7.elem(3, 1));
        assert_eq!(thm4c_witness(&ctx(5), 3), Err(Error::NotRamified(5)));
        assert_eq!(thm4c_witness(&c6, 2), Err(Error::NotOdd(2)));
    }

    #[test]
    fn thm3_classification_for_small_d() {
        for d in 2..=30 {
            let Ok(c) = RingContext::new(d) else { continue };
            let twice = thm3_witness(&c).scale_i64(2);
            assert_eq!(is_sum_of_squares(&twice), matches!(d, 2 | 3 | 5), "D = {d}");
        }
    }

    #[test]
    fn thm4a_witness_is_refuted() {
        for (d, m) in [(6, 1), (7, 1), (101, 1), (101, 2), (17, 1)] {
            let c = ctx(d);
            assert!(thm4a_applies(&c, m));
            assert!(!is_sum_of_squares(&thm3_witness(&c).scale_i64(m as i64)), "D={d} m={m}");
        }
    }
}
