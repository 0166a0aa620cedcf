use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spectral::rescale::dyadic_exponent;

/// One element `(lambda, x)` of a scale-core sequence, with `lambda = 2^{-exponent}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleCore {
    pub exponent: i32,
    pub core: [f64; 3],
}

impl ScaleCore {
    pub const IDENTITY: ScaleCore = ScaleCore {
        exponent: 0,
        core: [0.0; 3],
    };

    pub fn new(exponent: i32, core: [f64; 3]) -> Self {
        Self { exponent, core }
    }

    /// From a dyadic `lambda`; non-dyadic values are rejected.
    pub fn from_scale(lambda: f64, core: [f64; 3]) -> Result<Self> {
        Ok(Self {
            exponent: dyadic_exponent(lambda)?,
            core,
        })
    }

    pub fn lambda(&self) -> f64 {
        2f64.powi(-self.exponent)
    }

    /// Core reduced into `[0, period)^3`.
    pub fn reduced(&self, period: f64) -> Self {
        let mut core = self.core;
        for c in core.iter_mut() {
            *c = c.rem_euclid(period);
            if *c >= period {
                *c = 0.0;
            }
        }
        Self {
            exponent: self.exponent,
            core,
        }
    }
}

/// Euclidean distance; with `Some(period)` the minimum-image distance on the torus.
pub fn core_distance(a: [f64; 3], b: [f64; 3], period: Option<f64>) -> f64 {
    a.iter()
        .zip(&b)
        .map(|(x, y)| {
            let d = x - y;
            match period {
                Some(l) => {
                    let r = d.rem_euclid(l);
                    r.min(l - r)
                }
                None => d,
            }
        })
        .map(|d| d * d)
        .sum::<f64>()
        .sqrt()
}

/// `lambda_a / lambda_b + lambda_b / lambda_a + |x_a - x_b| / lambda_a` at index `n`.
pub fn orthogonality_value(a: &[ScaleCore], b: &[ScaleCore], n: usize, period: Option<f64>) -> f64 {
    let (sa, sb) = (a[n], b[n]);
    let (la, lb) = (sa.lambda(), sb.lambda());
    la / lb + lb / la + core_distance(sa.core, sb.core, period) / la
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn displayed_sum_cases() {
        let a: Vec<ScaleCore> = (0..4).map(|_| ScaleCore::IDENTITY).collect();
        assert_eq!(orthogonality_value(&a, &a, 2, None), 2.0);
        let b: Vec<ScaleCore> = (0..4).map(|n| ScaleCore::new(n, [0.0; 3])).collect();
        for n in 0..4 {
            let expect = 2f64.powi(n as i32) + 2f64.powi(-(n as i32));
            assert_eq!(orthogonality_value(&a, &b, n, None), expect);
        }
        let dx = 0.25;
        let lam = 0.5;
        let c: Vec<ScaleCore> = (0..4).map(|_| ScaleCore::new(1, [0.0; 3])).collect();
        let d: Vec<ScaleCore> = (0..4)
            .map(|n| ScaleCore::new(1, [n as f64 * dx, 0.0, 0.0]))
            .collect();
        for n in 0..4 {
            assert!(
                (orthogonality_value(&c, &d, n, None) - (2.0 + n as f64 * dx / lam)).abs() < 1e-15
            );
        }
    }

    #[test]
    fn minimum_image_and_reduction() {
        assert!((core_distance([0.1, 0.0, 0.0], [9.9, 0.0, 0.0], Some(10.0)) - 0.2).abs() < 1e-12);
        let s = ScaleCore::new(0, [-1.0, 12.0, 3.0]).reduced(10.0);
        assert_eq!(s.core, [9.0, 2.0, 3.0]);
        assert_eq!(ScaleCore::from_scale(0.125, [0.0; 3]).unwrap().exponent, 3);
        assert!(ScaleCore::from_scale(0.3, [0.0; 3]).is_err());
    }
}
