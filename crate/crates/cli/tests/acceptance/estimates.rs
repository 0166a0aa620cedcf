use csns_core::estimates::{
    product_law_4_exponents, verify_heat_block_decay, verify_product_law_1, verify_product_law_2,
    verify_product_law_3, verify_product_law_4, CorpusSpec, EstimateReport, Law1, Law2, Law3, Law4,
    Rational,
};

use crate::support::{ensure, Context, Verdict};

const RESOLUTIONS: [usize; 3] = [16, 32, 48];

fn corpus() -> CorpusSpec {
    CorpusSpec::standard(1, 30)
}

fn stable(r: &EstimateReport) -> Result<(), String> {
    ensure(r.is_stable(2.0), || {
        format!(
            "{}: constant {:e}, stability {:.4}",
            r.inequality_id, r.measured_constant, r.stability_ratio
        )
    })
}

pub fn heat_block_decay() -> Verdict {
    let times = [0.0, 0.01, 0.05, 0.1, 0.5, 1.0];
    let exact = verify_heat_block_decay(&corpus(), &RESOLUTIONS, 2.0, &times).ctx("p = 2")?;
    ensure(exact.measured_constant <= 1.0 + 1e-12, || {
        format!("p = 2 ratio {:.15}", exact.measured_constant)
    })?;
    let mut parts = vec![format!("p=2 ratio {:.15}", exact.measured_constant)];
    for p in [1.0, 3.0, 4.0, 6.0] {
        let r = verify_heat_block_decay(&corpus(), &RESOLUTIONS, p, &times).ctx("general p")?;
        stable(&r)?;
        parts.push(format!(
            "p={p} c0 {:.4} (stability {:.4})",
            r.measured_constant, r.stability_ratio
        ));
    }
    Ok(parts.join(", "))
}

fn exponent_identities() -> Result<usize, String> {
    let ps = [(7, 2), (4, 1), (9, 2), (5, 1), (13, 3), (31, 7)];
    for (num, den) in ps {
        let p = Rational::new(num, den);
        let e = product_law_4_exponents(p).ctx("exponents")?;
        let one = Rational::from_integer(1);
        let q1 = Rational::from_integer(6) * p
            / (Rational::from_integer(2) * p - Rational::from_integer(5));
        let first = -one / (Rational::from_integer(4) * p);
        let second = Rational::from_integer(7) / (Rational::from_integer(4) * p);
        ensure(e.q1 == q1, || {
            format!("p = {p}: q1 = {}, expected {q1}", e.q1)
        })?;
        ensure(e.s_p1_plus_time == first, || {
            format!(
                "p = {p}: s_p1 + 2/r0 = {}, expected {first}",
                e.s_p1_plus_time
            )
        })?;
        ensure(e.s_p_plus_s_q_plus_time == second, || {
            format!(
                "p = {p}: s_p + s_q + 2/r0 = {}, expected {second}",
                e.s_p_plus_s_q_plus_time
            )
        })?;
    }
    Ok(ps.len())
}

pub fn product_laws() -> Verdict {
    let c = corpus();
    let reports = [
        verify_product_law_1(
            &c,
            &RESOLUTIONS,
            Law1 {
                p: 4.0,
                q: 4.0,
                r: 3.0,
                eps: 0.2,
            },
        )
        .ctx("law 1")?,
        verify_product_law_2(
            &c,
            &RESOLUTIONS,
            Law2 {
                p: 4.0,
                r: 4.0,
                eps: 0.1,
            },
        )
        .ctx("law 2")?,
        verify_product_law_3(
            &c,
            &RESOLUTIONS,
            Law3 {
                p1: 8.0,
                p2: 8.0,
                r: 4.0,
            },
        )
        .ctx("law 3")?,
        verify_product_law_4(&c, &RESOLUTIONS, Law4 { p: 4.0 }).ctx("law 4")?,
    ];
    for r in &reports {
        stable(r)?;
    }
    let exact = exponent_identities()?;
    let summary: Vec<String> = reports
        .iter()
        .map(|r| {
            format!(
                "{} C {:.4} (stability {:.4})",
                r.inequality_id, r.measured_constant, r.stability_ratio
            )
        })
        .collect();
    Ok(format!(
        "{}; exponent identities exact for {exact} rational p",
        summary.join(", ")
    ))
}
