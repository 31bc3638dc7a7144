//! The residue ring `𝒪/2𝒪`, its square classes, and the dyadic
//! valuation at the ramified prime above 2.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadfield::{QuadInt, RingContext};

/// Class of `u + v·ω` in `𝒪/2𝒪`, stored as `(u mod 2, v mod 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Residue2O {
    pub e0: u8,
    pub e1: u8,
}

impl Residue2O {
    pub const ALL: [Residue2O; 4] = [
        Residue2O { e0: 0, e1: 0 },
        Residue2O { e0: 1, e1: 0 },
        Residue2O { e0: 0, e1: 1 },
        Residue2O { e0: 1, e1: 1 },
    ];

    fn index(self) -> usize {
        (self.e0 + 2 * self.e1) as usize
    }

    fn representative(self, d: i64) -> QuadInt {
        QuadInt::from_parts(self.e0.into(), self.e1.into(), d)
    }
}

pub fn residue_mod_2o(alpha: &QuadInt) -> Residue2O {
    let bit = |x: &BigInt| u8::from(x.is_odd());
    Residue2O { e0: bit(alpha.u()), e1: bit(alpha.v()) }
}

/// Square classes and nilpotent classes of `𝒪/2𝒪`, both by enumerating the
/// four representatives and reducing their squares.
pub(crate) fn enumerate_class_tables(d: i64) -> ([bool; 4], [bool; 4]) {
    let mut squares = [false; 4];
    let mut nil = [false; 4];
    for r in Residue2O::ALL {
        let sq = residue_mod_2o(&r.representative(d).square());
        squares[sq.index()] = true;
        if sq == (Residue2O { e0: 0, e1: 0 }) {
            nil[r.index()] = true;
        }
    }
    (squares, nil)
}

pub fn squares_mod_2o(ctx: &RingContext) -> Vec<Residue2O> {
    let table = ctx.square_class_table();
    Residue2O::ALL.into_iter().filter(|r| table[r.index()]).collect()
}

pub fn is_square_mod_2o(ctx: &RingContext, alpha: &QuadInt) -> bool {
    assert_eq!(alpha.d(), ctx.d(), "element from another ring");
    let by_table = ctx.square_class_table()[residue_mod_2o(alpha).index()];
    if ctx.is_ramified() {
        debug_assert_eq!(by_table, alpha.v().is_even(), "ramified square classes are the even-b classes");
    }
    by_table
}

/// Whether `alpha` is a sum of `r ≥ 5` squares over every dyadic completion.
/// For `r ≥ 5` this reduces to being a square modulo `2𝒪`.
pub fn local_sos_test(ctx: &RingContext, alpha: &QuadInt, r: u32) -> Result<bool> {
    if r < 5 {
        return Err(Error::RTooSmall(r));
    }
    Ok(is_square_mod_2o(ctx, alpha))
}

/// Archimedean places need total positivity, non-dyadic places impose
/// nothing, dyadic places need a square mod `2𝒪`.
pub fn everywhere_local_test(ctx: &RingContext, alpha: &QuadInt) -> bool {
    ctx.is_totally_positive(alpha) && is_square_mod_2o(ctx, alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ValuationClass {
    Unit,
    InPNotP2,
    InP2,
    NotApplicable,
}

/// Valuation of `alpha` at the prime `𝔭` with `𝔭² = 2𝒪`. `None` when 2 is
/// unramified.
pub fn dyadic_valuation(ctx: &RingContext, alpha: &QuadInt) -> Result<Option<u64>> {
    assert_eq!(alpha.d(), ctx.d(), "element from another ring");
    if alpha.is_zero() {
        return Err(Error::ZeroElement);
    }
    if !ctx.is_ramified() {
        return Ok(None);
    }
    let two = BigInt::from(2);
    let mut x = alpha.clone();
    let mut v = 0;
    // 𝔭² = 2𝒪, so each exact halving adds 2.
    while let Some(y) = x.div_exact(&two) {
        x = y;
        v += 2;
    }
    // x ∉ 2𝒪 = 𝔭², so v_𝔭(x) ∈ {0, 1}; 𝔭/2𝒪 is the nilradical of 𝒪/2𝒪.
    if ctx.nil_class_table()[residue_mod_2o(&x).index()] {
        v += 1;
    }
    Ok(Some(v))
}

pub fn dyadic_valuation_class(ctx: &RingContext, alpha: &QuadInt) -> Result<ValuationClass> {
    Ok(match dyadic_valuation(ctx, alpha)? {
        None => ValuationClass::NotApplicable,
        Some(0) => ValuationClass::Unit,
        Some(1) => ValuationClass::InPNotP2,
        Some(_) => ValuationClass::InP2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(e0: u8, e1: u8) -> Residue2O {
        Residue2O { e0, e1 }
    }

    #[test]
    fn residue_examples() {
        let c6 = RingContext::new(6).unwrap();
        assert_eq!(residue_mod_2o(&c6.elem(4, 1)), r(0, 1));
        let c5 = RingContext::new(5).unwrap();
        assert_eq!(residue_mod_2o(&c5.elem(1, 1)), r(1, 1));
        assert_eq!(residue_mod_2o(&c5.elem(7, -3).scale_i64(2)), r(0, 0));
    }

    #[test]
    fn square_class_examples() {
        let c6 = RingContext::new(6).unwrap();
        assert_eq!(squares_mod_2o(&c6), vec![r(0, 0), r(1, 0)]);
        let c3 = RingContext::new(3).unwrap();
        assert_eq!(squares_mod_2o(&c3), vec![r(0, 0), r(1, 0)]);
        // (1+√3)² = 4+2√3 ≡ 0
        assert_eq!(residue_mod_2o(&c3.elem(1, 1).square()), r(0, 0));
        let c5 = RingContext::new(5).unwrap();
        assert_eq!(squares_mod_2o(&c5).len(), 4);
    }

    #[test]
    fn square_class_shape_by_congruence() {
        for d in 2..200 {
            let Ok(c) = RingContext::new(d) else { continue };
            let sq = squares_mod_2o(&c);
            if d % 4 == 1 {
                assert_eq!(sq.len(), 4, "D = {d}");
            } else {
                assert_eq!(sq, vec![r(0, 0), r(1, 0)], "D = {d}");
            }
        }
    }

    #[test]
    fn is_square_examples() {
        let c6 = RingContext::new(6).unwrap();
        assert!(!is_square_mod_2o(&c6, &c6.omega()));
        assert!(is_square_mod_2o(&c6, &c6.elem(1, 2)));
        let c17 = RingContext::new(17).unwrap();
        for u in -3..3 {
            for v in -3..3 {
                assert!(is_square_mod_2o(&c17, &c17.elem(u, v)));
            }
        }
    }

    #[test]
    fn local_tests() {
        let c6 = RingContext::new(6).unwrap();
        assert_eq!(local_sos_test(&c6, &c6.omega(), 5), Ok(false));
        assert_eq!(local_sos_test(&c6, &c6.elem(2, 2), 5), Ok(true));
        let c7 = RingContext::new(7).unwrap();
        assert_eq!(local_sos_test(&c7, &c7.elem(3, 1), 4), Err(Error::RTooSmall(4)));

        // 4+2√6 has a negative conjugate; 6+2√6 is the totally positive analogue
        assert!(!everywhere_local_test(&c6, &c6.elem(4, 2)));
        assert!(everywhere_local_test(&c6, &c6.elem(6, 2)));
        assert!(!everywhere_local_test(&c6, &c6.elem(4, 1)));
        assert!(!everywhere_local_test(&c6, &c6.omega()));
    }

    #[test]
    fn valuation_examples() {
        let c6 = RingContext::new(6).unwrap();
        assert_eq!(dyadic_valuation_class(&c6, &c6.omega()), Ok(ValuationClass::InPNotP2));
        assert_eq!(dyadic_valuation_class(&c6, &c6.int(2)), Ok(ValuationClass::InP2));
        assert_eq!(dyadic_valuation_class(&c6, &c6.int(3)), Ok(ValuationClass::Unit));
        assert_eq!(dyadic_valuation_class(&c6, &c6.zero()), Err(Error::ZeroElement));
        let c3 = RingContext::new(3).unwrap();
        assert_eq!(dyadic_valuation_class(&c3, &c3.elem(3, 1)), Ok(ValuationClass::InPNotP2));
        let c5 = RingContext::new(5).unwrap();
        assert_eq!(dyadic_valuation_class(&c5, &c5.int(2)), Ok(ValuationClass::NotApplicable));
    }

    fn ramified_d() -> impl Strategy<Value = i64> {
        prop::sample::select(vec![2i64, 3, 6, 7, 10, 11, 14, 15, 19, 22])
    }

    proptest! {
        #[test]
        fn sum_of_squares_reduces_like_square_of_sum(
            d in prop::sample::select(vec![2i64, 3, 5, 6, 7, 13, 17, 21]),
            coords in prop::collection::vec((-30i64..30, -30i64..30), 1..7)
        ) {
            let c = RingContext::new(d).unwrap();
            let terms: Vec<_> = coords.iter().map(|&(u, v)| c.elem(u, v)).collect();
            let sum_sq = terms.iter().fold(c.zero(), |acc, t| acc + t.square());
            let sq_sum = terms.iter().fold(c.zero(), |acc, t| acc + t).square();
            prop_assert_eq!(residue_mod_2o(&sum_sq), residue_mod_2o(&sq_sum));
            prop_assert!(is_square_mod_2o(&c, &sum_sq));
        }

        #[test]
        fn valuation_is_additive(d in ramified_d(),
                                 u1 in -40i64..40, v1 in -40i64..40,
                                 u2 in -40i64..40, v2 in -40i64..40) {
            let c = RingContext::new(d).unwrap();
            let (x, y) = (c.elem(u1, v1), c.elem(u2, v2));
            prop_assume!(!x.is_zero() && !y.is_zero());
            let vx = dyadic_valuation(&c, &x).unwrap().unwrap();
            let vy = dyadic_valuation(&c, &y).unwrap().unwrap();
            prop_assume!(vx <= 4 && vy <= 4);
            prop_assert_eq!(dyadic_valuation(&c, &(&x * &y)).unwrap().unwrap(), vx + vy);
            // 𝔭 is the only prime over 2 and has residue degree 1
            let n = x.norm();
            prop_assert_eq!(vx, n.trailing_zeros().unwrap());
        }
    }
}
