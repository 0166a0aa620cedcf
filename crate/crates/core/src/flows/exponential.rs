//! Exponential-integrator coefficients for the stiff linear part `-|xi|^2`.

/// `phi_k(z) = sum_{i>=0} z^i / (i+k)!` for `k = 0..=3`.
pub fn phi_functions(z: f64) -> [f64; 4] {
    if z.abs() < 0.5 {
        let mut out = [0.0; 4];
        for (k, slot) in out.iter_mut().enumerate() {
            // Horner on sum z^i / (i+k)!, 22 terms.
            let mut acc = 0.0;
            for i in (0..22).rev() {
                acc = acc * z / (i + k + 1) as f64 + 1.0;
            }
            let fact: f64 = (1..=k).map(|v| v as f64).product();
            *slot = acc / fact;
        }
        return out;
    }
    let p0 = z.exp();
    let p1 = (p0 - 1.0) / z;
    let p2 = (p1 - 1.0) / z;
    let p3 = (p2 - 0.5) / z;
    [p0, p1, p2, p3]
}

/// Per-`|k|^2` tables for one step of size `dt`.
pub(crate) struct StepTables {
    /// `exp(-kappa dt)` and `exp(-kappa dt / 2)`.
    pub decay_full: Vec<f64>,
    pub decay_half: Vec<f64>,
    /// `(1 - exp(-kappa tau)) / kappa` for `tau = dt/2, dt`.
    pub forcing_half: Vec<f64>,
    pub forcing_full: Vec<f64>,
    /// Collocation weights `[node m][basis i]` on nodes `{0, 1/2, 1}`.
    pub weights: [[Vec<f64>; 3]; 2],
}

/// Lagrange basis on `{0, 1/2, 1}` as monomial coefficients in `x = s / dt`.
const BASIS: [[f64; 3]; 3] = [[1.0, -3.0, 2.0], [0.0, 4.0, -4.0], [0.0, -1.0, 2.0]];

impl StepTables {
    /// `unit_sq` is `(2 pi / L)^2`; tables cover `|k|^2 = 0..=max_k_sq`.
    pub fn new(unit_sq: f64, max_k_sq: u32, dt: f64) -> Self {
        let len = max_k_sq as usize + 1;
        let mut t = StepTables {
            decay_full: vec![1.0; len],
            decay_half: vec![1.0; len],
            forcing_half: vec![0.0; len],
            forcing_full: vec![0.0; len],
            weights: [
                [vec![0.0; len], vec![0.0; len], vec![0.0; len]],
                [vec![0.0; len], vec![0.0; len], vec![0.0; len]],
            ],
        };
        for ks in 0..len {
            let kappa = unit_sq * ks as f64;
            for (m, tau) in [0.5 * dt, dt].into_iter().enumerate() {
                let phi = phi_functions(-kappa * tau);
                // I_k = int_0^tau e^{-kappa (tau - s)} (s/dt)^k ds = k! tau^{k+1} phi_{k+1} / dt^k
                let r = tau / dt;
                let integrals = [tau * phi[1], tau * r * phi[2], 2.0 * tau * r * r * phi[3]];
                for (i, basis) in BASIS.iter().enumerate() {
                    t.weights[m][i][ks] = basis.iter().zip(&integrals).map(|(a, b)| a * b).sum();
                }
                if m == 0 {
                    t.decay_half[ks] = phi[0];
                    t.forcing_half[ks] = tau * phi[1];
                } else {
                    t.decay_full[ks] = phi[0];
                    t.forcing_full[ks] = tau * phi[1];
                }
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_functions_match_closed_forms_across_branch() {
        for &z in &[-0.3, -0.49, -0.51, -2.0, -40.0] {
            let p = phi_functions(z);
            let e = z.exp();
            let exact = [
                e,
                (e - 1.0) / z,
                (e - 1.0 - z) / (z * z),
                (e - 1.0 - z - z * z / 2.0) / (z * z * z),
            ];
            for k in 0..4 {
                // Closed forms cancel catastrophically near 0; scale tolerance accordingly.
                let tol = 1e-15 / z.abs().min(1.0).powi(k as i32 + 1);
                assert!(
                    (p[k] - exact[k]).abs() <= tol,
                    "z={z} k={k}: {} vs {}",
                    p[k],
                    exact[k]
                );
            }
        }
        // Tiny arguments: two Taylor terms, 1/k! + z/(k+1)!.
        let z = -1e-8;
        let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
        for (k, v) in phi_functions(z).iter().enumerate() {
            assert!((v - (1.0 / fact[k] + z / fact[k + 1])).abs() < 1e-15);
        }
        assert_eq!(phi_functions(0.0), [1.0, 1.0, 0.5, 1.0 / 6.0]);
    }

    #[test]
    fn weights_integrate_quadratics_exactly() {
        // For a source s^2 the exact convolution is known in closed form.
        let (kappa, dt) = (7.0, 0.1);
        let t = StepTables::new(1.0, 7, dt);
        for (m, tau) in [0.5 * dt, dt].into_iter().enumerate() {
            let nodes = [0.0f64, 0.5 * dt, dt];
            let quad: f64 = (0..3)
                .map(|i| t.weights[m][i][7] * nodes[i] * nodes[i])
                .sum();
            // int_0^tau e^{-k(tau-s)} s^2 ds
            let exact = (tau * tau / kappa) - 2.0 * tau / (kappa * kappa)
                + 2.0 / kappa.powi(3) * (1.0 - (-kappa * tau).exp());
            assert!((quad - exact).abs() < 1e-15, "m={m} {quad} vs {exact}");
            let ones: f64 = (0..3).map(|i| t.weights[m][i][7]).sum();
            let f = if m == 0 {
                t.forcing_half[7]
            } else {
                t.forcing_full[7]
            };
            assert!((ones - f).abs() < 1e-16);
        }
    }
}
