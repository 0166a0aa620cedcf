use std::f64::consts::PI;

use csns_core::besov::oracle::besov_norm_direct;
use csns_core::besov::{
    besov_norm, block_lp_norms, block_symbol, critical_regularity, BesovSpec, DyadicWindow,
};
use csns_core::experiments::norm_scaling_identity_check;
use csns_core::profiles::{apply_lambda, ScaleCore};
use csns_core::spectral::random::{random_band_limited, random_solenoidal};

use crate::support::{ensure, grid, rel, Context, Verdict};

pub fn oracle_equivalence() -> Verdict {
    let g = grid(32, 2.0 * PI);
    let window = DyadicWindow::for_grid(&g);
    let ps = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, f64::INFINITY];
    let qs = [1.0, 2.0, 3.0, f64::INFINITY];
    let ss = [-0.75, -0.25, 0.0, 0.5, 1.0];
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let ncomp = if i % 3 == 0 { 1 } else { 3 };
        let kmax = 2 + (i % 9) as i64;
        let slope = -2.0 + (i % 3) as f64;
        let u = random_band_limited(&g, ncomp, 1000 + i, kmax, slope, 1.0);
        let (p, q, s) = (
            ps[i as usize % ps.len()],
            qs[(i / 7) as usize % qs.len()],
            ss[(i / 3) as usize % ss.len()],
        );
        let spec = BesovSpec::new(s, p, q, window).ctx("spec")?;
        let fast = besov_norm(&u, &spec).ctx("besov_norm")?;
        let direct = besov_norm_direct(&u, &spec);
        let e = rel(fast, direct);
        ensure(e <= 1e-12, || {
            format!("field {i} (p={p}, q={q}, s={s}): {fast:e} vs {direct:e}, rel {e:e}")
        })?;
        worst = worst.max(e);
    }
    Ok(format!("100 fields, worst relative error {worst:.2e}"))
}

pub fn partition_of_unity() -> Verdict {
    let g = grid(32, 2.0 * PI);
    let window = DyadicWindow::for_grid(&g);
    let (lo, hi) = (
        2f64.powi(window.j_min + 1).log2(),
        2f64.powi(window.j_max + 1).log2(),
    );
    let mut radii: Vec<f64> = (0..=4000)
        .map(|i| 2f64.powf(lo + (hi - lo) * i as f64 / 4000.0))
        .collect();
    radii.extend((1..g.len()).map(|lin| g.xi_abs(lin)));
    let mut sum_err: f64 = 0.0;
    let mut overlap: f64 = 0.0;
    for &r in &radii {
        let values: Vec<f64> = window.indices().map(|j| block_symbol(j, r)).collect();
        if window.covers(r) {
            sum_err = sum_err.max((values.iter().sum::<f64>() - 1.0).abs());
        }
        for (a, va) in values.iter().enumerate() {
            for vb in values.iter().skip(a + 2) {
                overlap = overlap.max((va * vb).abs());
            }
        }
    }
    ensure(sum_err <= 1e-12, || {
        format!("sum of blocks off by {sum_err:e}")
    })?;
    ensure(overlap <= 1e-14, || {
        format!("blocks two apart overlap by {overlap:e}")
    })?;
    Ok(format!(
        "{} radii: |sum - 1| <= {sum_err:.1e}, separated products <= {overlap:.1e}",
        radii.len()
    ))
}

pub fn scaling_invariance() -> Verdict {
    let g = grid(64, 2.0 * PI);
    let window = DyadicWindow::for_grid(&g);
    let l3_spec = BesovSpec::critical(3.0, 0.0, window).ctx("spec")?;
    let b4_spec = BesovSpec::critical(4.0, 0.0, window).ctx("spec")?;
    let (mut l3_err, mut besov_err, mut law_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut cases = 0;
    for m in 1..=4u32 {
        // Largest band that the dilation keeps inside the dealiased range.
        let kmax = [3, 3, 2, 1][m as usize - 1];
        for seed in 0..5u64 {
            let u = random_solenoidal(&g, 50 + seed, kmax, -1.0, 1.0);
            let lam = 2f64.powi(-(m as i32));
            let image = apply_lambda(&u, ScaleCore::new(m as i32, [0.0; 3])).ctx("rescale")?;
            l3_err = l3_err.max(norm_scaling_identity_check(&u, lam).ctx("identity")?);
            besov_err = besov_err.max(rel(
                besov_norm(&image, &l3_spec).ctx("norm")?,
                besov_norm(&u, &l3_spec).ctx("norm")?,
            ));
            for p in [3.0, 4.0] {
                let before = block_lp_norms(&u, &window, p).ctx("blocks")?;
                let after = block_lp_norms(&image, &window, p).ctx("blocks")?;
                let shift = m as usize;
                for (i, a) in after.iter().enumerate() {
                    let expected = if i >= shift { before[i - shift] } else { 0.0 };
                    ensure(*a == expected, || {
                        format!("m={m}, p={p}: block {i} is {a:e}, expected {expected:e}")
                    })?;
                }
                ensure(
                    before[before.len() - shift..].iter().all(|v| *v == 0.0),
                    || format!("m={m}: band reaches the top of the window"),
                )?;
            }
            let scaled = 2f64.powf(m as f64 * critical_regularity(4.0))
                * besov_norm(&u, &b4_spec).ctx("norm")?;
            law_err = law_err.max(rel(besov_norm(&image, &b4_spec).ctx("norm")?, scaled));
            cases += 1;
        }
    }
    ensure(l3_err <= 1e-10, || format!("L3 changed by {l3_err:e}"))?;
    ensure(besov_err <= 1e-9, || {
        format!("B^0_33 changed by {besov_err:e}")
    })?;
    ensure(law_err <= 1e-9, || {
        format!("B^s4_44 law off by {law_err:e}")
    })?;
    Ok(format!(
        "{cases} fields, m = 1..4: L3 {l3_err:.1e}, B^0_33 {besov_err:.1e}, B^s4_44 law {law_err:.1e}, block shift exact"
    ))
}
