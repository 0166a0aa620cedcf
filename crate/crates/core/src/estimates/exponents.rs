//! Exact exponent bookkeeping for the product law with an `L^inf L^3` factor.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{CsnsError, Result};

pub type Rational = Ratio<i64>;

/// `s_x = -1 + 3/x`.
pub fn critical_regularity_exact(x: Rational) -> Rational {
    Rational::from_integer(-1) + Rational::from_integer(3) / x
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ProductLaw4Exponents {
    pub p: Rational,
    /// `r_0 = 2p / (p - 1)`.
    pub r0: Rational,
    /// `1/p_bar = 1/3 + 1/(6p)`.
    pub p_bar: Rational,
    /// `1/p_bar = 1/p + 1/q1`.
    pub q1: Rational,
    pub p1: Rational,
    /// `1/p_bar = 1/p1 + 1/q`.
    pub q: Rational,
    /// `s_{p1} + 2/r0`.
    pub s_p1_plus_time: Rational,
    /// `s_p + s_q + 2/r0`.
    pub s_p_plus_s_q_plus_time: Rational,
}

/// Solve the Hölder relations for the auxiliary exponents; everything is exact.
pub fn product_law_4_exponents(p: Rational) -> Result<ProductLaw4Exponents> {
    let one = Rational::from_integer(1);
    let three = Rational::from_integer(3);
    if p <= three {
        return Err(CsnsError::Precondition(format!("need p > 3, got {p}")));
    }
    let r0 = Rational::from_integer(2) * p / (p - one);
    let inv_p_bar = one / three + one / (Rational::from_integer(6) * p);
    let q1 = one / (inv_p_bar - one / p);
    let p1 = Rational::from_integer(4) * p;
    let q = one / (inv_p_bar - one / p1);
    let time = Rational::from_integer(2) / r0;
    Ok(ProductLaw4Exponents {
        p,
        r0,
        p_bar: one / inv_p_bar,
        q1,
        p1,
        q,
        s_p1_plus_time: critical_regularity_exact(p1) + time,
        s_p_plus_s_q_plus_time: critical_regularity_exact(p) + critical_regularity_exact(q) + time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn closed_forms_hold_exactly() {
        for p in [r(4, 1), r(7, 2), r(6, 1), r(8, 1), r(31, 3), r(100, 1)] {
            let e = product_law_4_exponents(p).unwrap();
            let one = r(1, 1);
            assert_eq!(e.q1, r(6, 1) * p / (r(2, 1) * p - r(5, 1)));
            assert_eq!(e.p1, r(4, 1) * p);
            assert_eq!(e.q, r(12, 1) * p / (r(4, 1) * p - one));
            assert_eq!(e.s_p1_plus_time, -one / (r(4, 1) * p));
            assert_eq!(e.s_p_plus_s_q_plus_time, r(7, 1) / (r(4, 1) * p));
            assert!(e.q1 > r(3, 1));
        }
    }

    #[test]
    fn values_at_four() {
        let e = product_law_4_exponents(r(4, 1)).unwrap();
        assert_eq!(e.q1, r(8, 1));
        assert_eq!(e.r0, r(8, 3));
        assert_eq!(e.p_bar, r(8, 3));
        assert_eq!(e.s_p1_plus_time, r(-1, 16));
        assert_eq!(e.s_p_plus_s_q_plus_time, r(7, 16));
        assert!(product_law_4_exponents(r(3, 1)).is_err());
    }
}
