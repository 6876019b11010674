//! Gamma-function arithmetic and the dimension-dependent constants built
//! from it. Everything is done in log space first so that dimensions up to
//! 500 survive; plain-value wrappers exponentiate at the end.

use crate::error::{Error, Result};

// Lanczos (g = 7, n = 9), accurate to ~1e-14 relative for x > 0.5.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_C: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of Gamma(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        // shift into the Lanczos range; one division is exact enough
        return Ok(log_gamma_lanczos(x + 1.0) - x.ln());
    }
    Ok(log_gamma_lanczos(x))
}

fn log_gamma_lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut acc = LANCZOS_C[0];
    for (i, c) in LANCZOS_C.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

pub fn gamma(x: f64) -> Result<f64> {
    Ok(log_gamma(x)?.exp())
}

/// log of the surface measure of the unit n-sphere sitting in R^{n+1}:
/// omega_n = 2 pi^{(n+1)/2} / Gamma((n+1)/2).
pub fn log_sphere_measure(n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain(format!("sphere_measure requires n >= 1, got {n}")));
    }
    let half = (n as f64 + 1.0) / 2.0;
    Ok(2f64.ln() + half * std::f64::consts::PI.ln() - log_gamma(half)?)
}

/// omega_n as a plain value. Underflows to subnormal/zero for n beyond
/// roughly 450; scans that go that far must stay in log space.
pub fn sphere_measure(n: u32) -> Result<f64> {
    Ok(log_sphere_measure(n)?.exp())
}

/// The two closed forms of log S_N, returned separately so callers can
/// measure how far apart the Gamma routes land.
pub fn log_sobolev_constant_forms(n: u32) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::Domain(format!("sobolev_constant requires N >= 3, got {n}")));
    }
    let nf = n as f64;
    let pref = (nf * (nf - 2.0)).ln();
    // N(N-2) pi (Gamma(N/2)/Gamma(N))^{2/N}
    let form_a = pref
        + std::f64::consts::PI.ln()
        + (2.0 / nf) * (log_gamma(nf / 2.0)? - log_gamma(nf)?);
    // N(N-2)/4 * omega_N^{2/N}
    let form_b = pref - 4f64.ln() + (2.0 / nf) * log_sphere_measure(n)?;
    Ok((form_a, form_b))
}

/// log of the sharp constant S_N for the embedding D^{1,2}(R^N) -> L^{2*}.
/// Both closed forms are evaluated and must agree; a disagreement beyond
/// 1e-10 means the Gamma machinery is broken and is reported as such.
pub fn log_sobolev_constant(n: u32) -> Result<f64> {
    let (form_a, form_b) = log_sobolev_constant_forms(n)?;
    let rel = (form_a - form_b).abs().max((form_a - form_b).exp_m1().abs());
    if rel > 1e-10 {
        return Err(Error::InternalConsistency(format!(
            "S_N closed forms disagree at N={n}: log values {form_a} vs {form_b}"
        )));
    }
    Ok(form_b)
}

pub fn sobolev_constant(n: u32) -> Result<f64> {
    Ok(log_sobolev_constant(n)?.exp())
}

/// Relative residual of Gamma(N) Gamma(N+1/2) = 2^{1-2N} sqrt(pi) Gamma(2N),
/// evaluated in log space so it is meaningful up to N in the hundreds.
pub fn duplication_residual(n: f64) -> Result<f64> {
    if !(n > 0.0) {
        return Err(Error::Domain(format!("duplication_residual requires N > 0, got {n}")));
    }
    let lhs = log_gamma(n)? + log_gamma(n + 0.5)?;
    let rhs = (1.0 - 2.0 * n) * 2f64.ln() + 0.5 * std::f64::consts::PI.ln() + log_gamma(2.0 * n)?;
    Ok((lhs - rhs).exp_m1().abs())
}

/// Gamma(N+1) / (sqrt(2 pi N) (N/e)^N), in log space. Tends to 1 from above.
pub fn stirling_ratio(n: f64) -> Result<f64> {
    if !(n > 0.0) {
        return Err(Error::Domain(format!("stirling_ratio requires N > 0, got {n}")));
    }
    let log_den = 0.5 * (2.0 * std::f64::consts::PI * n).ln() + n * (n.ln() - 1.0);
    Ok((log_gamma(n + 1.0)? - log_den).exp())
}

/// The pair (N, s): ambient dimension and fractional order. Validated once
/// at construction; every formula downstream assumes the invariants.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DimPair {
    pub n: u32,
    pub s: f64,
}

impl DimPair {
    pub fn new(n: u32, s: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("dimension must be >= 3, got {n}")));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Domain(format!("fractional order must lie in (0,1), got {s}")));
        }
        Ok(DimPair { n, s })
    }

    /// critical exponent 2N/(N-2)
    pub fn two_star(&self) -> f64 {
        2.0 * self.n as f64 / (self.n as f64 - 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn log_gamma_pinned() {
        assert!(close(log_gamma(1.0).unwrap(), 0.0, 1e-14));
        assert!(close(log_gamma(0.5).unwrap(), 0.57236494292470008707, 1e-13));
        assert!(close(log_gamma(11.0).unwrap(), 15.104412573075515295, 1e-13));
        assert!(close(log_gamma(2.0).unwrap(), 0.0, 1e-14));
    }

    #[test]
    fn log_gamma_rejects_nonpositive() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-3.0).is_err());
    }

    #[test]
    fn sphere_measures_pinned() {
        let expect = [
            6.2831853071795864769,
            12.566370614359172954,
            19.739208802178717238,
            26.318945069571622984,
            31.006276680299820175,
            33.073361792319808187,
            32.469697011334145745,
            29.686580124648361824,
            25.501640398773454439,
        ];
        for (i, &w) in expect.iter().enumerate() {
            assert!(close(sphere_measure(i as u32 + 1).unwrap(), w, 1e-13));
        }
    }

    #[test]
    fn sphere_measure_recurrence() {
        // omega_{n+2}/omega_n = 2 pi / (n+1)
        for n in 1..=50u32 {
            let ratio = sphere_measure(n + 2).unwrap() / sphere_measure(n).unwrap();
            let expect = 2.0 * std::f64::consts::PI / (n as f64 + 1.0);
            assert!(close(ratio, expect, 1e-12), "n={n}");
        }
    }

    #[test]
    fn sobolev_constant_pinned() {
        let cases = [
            (3, 5.4779040895313318736),
            (4, 10.260398641294912764),
            (5, 14.811911720005934),
            (6, 19.259456665473206128),
            (7, 23.651515700982420176),
            (8, 28.010527560039570792),
            (10, 36.671569821051461046),
            (100, 421.36452832476763461),
            (500, 2129.3450929806624412),
        ];
        for (n, v) in cases {
            assert!(close(sobolev_constant(n).unwrap(), v, 1e-12), "N={n}");
        }
    }

    #[test]
    fn sobolev_forms_agree_to_500() {
        for n in 3..=500 {
            // construction itself asserts the two closed forms agree
            assert!(sobolev_constant(n).is_ok(), "N={n}");
        }
    }

    #[test]
    fn duplication_residual_small() {
        for x in [0.5, 1.0, 2.5, 10.0, 50.0, 200.0] {
            assert!(duplication_residual(x).unwrap() <= 1e-11, "x={x}");
        }
    }

    #[test]
    fn stirling_pinned_and_decreasing() {
        assert!(close(stirling_ratio(2.0).unwrap(), 1.0422071208166730576, 1e-12));
        assert!(close(stirling_ratio(10.0).unwrap(), 1.0083653591324002459, 1e-12));
        assert!(close(stirling_ratio(100.0).unwrap(), 1.0008336778720121418, 1e-12));
        assert!(close(stirling_ratio(200.0).unwrap(), 1.0004167531369153583, 1e-12));
        let mut prev = stirling_ratio(2.0).unwrap();
        for n in 3..=200 {
            let cur = stirling_ratio(n as f64).unwrap();
            assert!(cur < prev && cur > 1.0, "n={n}");
            prev = cur;
        }
    }

    #[test]
    fn dim_pair_validation() {
        assert!(DimPair::new(3, 0.5).is_ok());
        assert!(DimPair::new(2, 0.5).is_err());
        assert!(DimPair::new(5, 0.0).is_err());
        assert!(DimPair::new(5, 1.0).is_err());
        assert!((DimPair::new(4, 0.5).unwrap().two_star() - 4.0).abs() < 1e-15);
        assert!((DimPair::new(6, 0.25).unwrap().two_star() - 3.0).abs() < 1e-15);
    }
}
