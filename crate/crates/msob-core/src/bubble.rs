//! The extremal profile family
//!
//!   U_{z,lambda}(x) = c lambda^{-(N-2)/2} (1 + |x-z|^2/lambda^2)^{-(N-2)/2}
//!
//! together with its closed-form norms (kept in log space so they survive
//! dimensions in the hundreds), the smooth annular cutoff used for energy
//! truncation, and the truncated-tail energy integral.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::QuadSpec;
use crate::quadrature::{integrate_gk, QuadValue};
use crate::shapes::{smooth_step, smooth_step_deriv};
use crate::specfn;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bubble {
    pub center: Vec<f64>,
    pub scale: f64,
    pub amplitude: f64,
}

impl Bubble {
    pub fn new(center: Vec<f64>, scale: f64, amplitude: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::Domain("bubble center must have at least one coordinate".into()));
        }
        if !(scale > 0.0) {
            return Err(Error::Domain(format!("bubble scale must be positive, got {scale}")));
        }
        if amplitude == 0.0 || !amplitude.is_finite() {
            return Err(Error::Domain(format!(
                "bubble amplitude must be finite and nonzero, got {amplitude}"
            )));
        }
        Ok(Bubble { center, scale, amplitude })
    }

    pub fn dim(&self) -> u32 {
        self.center.len() as u32
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.center.len(), "point dimension mismatch");
        let beta = (self.center.len() as f64 - 2.0) / 2.0;
        let mut q = 0.0;
        for (xi, zi) in x.iter().zip(&self.center) {
            q += (xi - zi) * (xi - zi);
        }
        self.amplitude * self.scale.powf(-beta) * (1.0 + q / (self.scale * self.scale)).powf(-beta)
    }

    /// radius at which the profile drops to half its peak value
    pub fn half_height_radius(&self) -> f64 {
        let n = self.center.len() as f64;
        self.scale * (2f64.powf(2.0 / (n - 2.0)) - 1.0).sqrt()
    }
}

pub fn eval_bubble(b: &Bubble, x: &[f64]) -> f64 {
    b.eval(x)
}

/// amplitude (N(N-2))^{(N-2)/4} that turns the unit profile into an exact
/// solution of the limiting equation
pub fn solution_amplitude(n: u32) -> f64 {
    let nf = n as f64;
    (nf * (nf - 2.0)).powf((nf - 2.0) / 4.0)
}

/// translation parameters: center t*sigma with |sigma| = 1 and scale 1 - t
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoronParams {
    pub t: f64,
    pub sigma: Vec<f64>,
}

impl CoronParams {
    pub fn new(t: f64, sigma: Vec<f64>) -> Result<Self> {
        if !(0.0..1.0).contains(&t) {
            return Err(Error::Domain(format!("t must lie in [0,1), got {t}")));
        }
        if sigma.is_empty() {
            return Err(Error::Domain("direction vector must be nonempty".into()));
        }
        let norm: f64 = sigma.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "direction vector must be unit length to 1e-12, |sigma| = {norm}"
            )));
        }
        Ok(CoronParams { t, sigma })
    }

    pub fn to_bubble(&self) -> Bubble {
        let center: Vec<f64> = self.sigma.iter().map(|v| v * self.t).collect();
        Bubble { center, scale: 1.0 - self.t, amplitude: 1.0 }
    }
}

// --------------------------------------------------------------- cutoff

/// Smooth radial plateau: 0 up to 1/(4R), ramps to 1 by 1/(2R), holds 1
/// through 2R, ramps back to 0 by 4R. C^1 (in fact C-infinity) throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub r: f64,
}

impl Cutoff {
    pub fn new(r: f64) -> Result<Self> {
        if !(r >= 1.0) {
            return Err(Error::Domain(format!("cutoff radius must be at least 1, got {r}")));
        }
        Ok(Cutoff { r })
    }

    pub fn eval(&self, m: f64) -> f64 {
        let r = self.r;
        if m <= 0.25 / r {
            0.0
        } else if m < 0.5 / r {
            smooth_step(4.0 * r * m - 1.0)
        } else if m <= 2.0 * r {
            1.0
        } else if m < 4.0 * r {
            smooth_step((4.0 * r - m) / (2.0 * r))
        } else {
            0.0
        }
    }

    pub fn deriv(&self, m: f64) -> f64 {
        let r = self.r;
        if m > 0.25 / r && m < 0.5 / r {
            4.0 * r * smooth_step_deriv(4.0 * r * m - 1.0)
        } else if m > 2.0 * r && m < 4.0 * r {
            -smooth_step_deriv((4.0 * r - m) / (2.0 * r)) / (2.0 * r)
        } else {
            0.0
        }
    }
}

pub fn eval_cutoff(c: &Cutoff, x: &[f64]) -> f64 {
    let m: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    c.eval(m)
}

// ---------------------------------------------------- closed-form norms

/// log of ||U||_{L^2}^2 for the unit profile; finite only for N >= 5
pub fn log_bubble_l2_sq(n: u32) -> Result<f64> {
    if n < 5 {
        return Err(Error::Divergent(format!(
            "||U||_2^2 diverges in dimension {n}: the integrand carries an \
             r^{{3-N}} tail, integrable only for N >= 5"
        )));
    }
    let nf = n as f64;
    Ok(specfn::log_sphere_measure(n - 1)? + specfn::log_gamma(nf / 2.0 - 2.0)?
        + specfn::log_gamma(nf / 2.0)?
        - std::f64::consts::LN_2
        - specfn::log_gamma(nf - 2.0)?)
}

pub fn bubble_l2_sq(n: u32) -> Result<f64> {
    Ok(log_bubble_l2_sq(n)?.exp())
}

/// log of int |U|^{2N/(N-2)} for the unit profile, N >= 3
pub fn log_bubble_lcrit(n: u32) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain(format!("critical integral needs N >= 3, got {n}")));
    }
    let nf = n as f64;
    Ok(specfn::log_sphere_measure(n - 1)? - nf * std::f64::consts::LN_2
        + 0.5 * std::f64::consts::PI.ln()
        + specfn::log_gamma(nf / 2.0)?
        - specfn::log_gamma((nf + 1.0) / 2.0)?)
}

pub fn bubble_lcrit(n: u32) -> Result<f64> {
    Ok(log_bubble_lcrit(n)?.exp())
}

/// log of ||grad U||_2^2 = S_N (int |U|^{2*})^{(N-2)/N}
pub fn log_bubble_grad_sq(n: u32) -> Result<f64> {
    let nf = n as f64;
    Ok(specfn::log_sobolev_constant(n)? + (nf - 2.0) / nf * log_bubble_lcrit(n)?)
}

pub fn bubble_grad_sq(n: u32) -> Result<f64> {
    Ok(log_bubble_grad_sq(n)?.exp())
}

/// how [u_lambda]_s^2 responds to u_lambda(x) = lambda^{(N-2)/2} u(lambda x)
pub fn seminorm_scale_factor(lambda: f64, s: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("scale must be positive, got {lambda}")));
    }
    if !(0.0 < s && s < 1.0) {
        return Err(Error::Domain(format!("s must lie in (0,1), got {s}")));
    }
    Ok(lambda.powf(2.0 * s - 2.0))
}

// ---------------------------------------------------- truncation energy

/// || (phi_R - 1) U_t ||_H^2: full quadratic energy (gradient plus mass)
/// of the tail cut away by the plateau cutoff, for the translated profile
/// with center t*sigma and scale 1 - t. Axial symmetry reduces the
/// integral to the (|x|, angle-to-sigma) half-plane.
pub fn truncation_error(
    n: u32,
    params: &CoronParams,
    r_cut: f64,
    spec: &QuadSpec,
) -> Result<QuadValue> {
    spec.validate()?;
    if n < 5 {
        return Err(Error::Divergent(format!(
            "the cut tail has ||.||_2^2 ~ r^{{3-N}}: not integrable in dimension {n}"
        )));
    }
    let cut = Cutoff::new(r_cut)?;
    let nf = n as f64;
    let t = params.t;
    let lam = 1.0 - t;
    let beta = (nf - 2.0) / 2.0;
    let omega_ang = specfn::sphere_measure(n - 2)?;

    // profile value and radial derivative in the distance w to the center
    let u_of = |w2: f64| lam.powf(beta) * (lam * lam + w2).powf(-beta);
    let du_of = |w: f64| {
        -2.0 * beta * lam.powf(beta) * w * (lam * lam + w * w).powf(-beta - 1.0)
    };

    // integrand over (zeta, theta) for a given cutoff branch
    let point = |zeta: f64, theta: f64| -> f64 {
        let phi = cut.eval(zeta);
        let dphi = cut.deriv(zeta);
        let c = phi - 1.0;
        if c == 0.0 && dphi == 0.0 {
            return 0.0;
        }
        let ct = theta.cos();
        let w2 = zeta * zeta + t * t - 2.0 * zeta * t * ct;
        let w = w2.sqrt();
        let u = u_of(w2);
        let grad_sq = if w == 0.0 {
            // only reachable at t = 0, zeta -> 0 where du = 0 anyway
            c * c * 0.0 + dphi * dphi * u * u
        } else {
            let du = du_of(w);
            c * c * du * du + 2.0 * c * dphi * u * du * (zeta - t * ct) / w
                + dphi * dphi * u * u
        };
        (grad_sq + c * c * u * u) * zeta.powf(nf - 1.0) * theta.sin().powf(nf - 2.0)
    };

    let theta_integral = |zeta: f64| -> f64 {
        let mut f = |th: f64| point(zeta, th);
        let out = integrate_gk(
            &mut f,
            &[0.0, 0.5 * std::f64::consts::PI, std::f64::consts::PI],
            1e-9,
            1e-300,
            200,
            "truncation angular integral",
        );
        match out {
            Ok(q) => q.value,
            Err(_) => 0.0,
        }
    };

    let lo1 = 0.25 / r_cut;
    let lo2 = 0.5 / r_cut;
    let hi1 = 2.0 * r_cut;
    let hi2 = 4.0 * r_cut;

    let mut total = 0.0;
    let mut err = 0.0;
    for (a, b) in [(0.0, lo1), (lo1, lo2), (hi1, hi2)] {
        let mut f = |z: f64| theta_integral(z);
        let q = integrate_gk(
            &mut f,
            &[a, 0.5 * (a + b), b],
            spec.rel_tol,
            0.25 * spec.abs_tol / omega_ang,
            spec.max_subdiv,
            "truncation radial integral",
        )?;
        total += q.value;
        err += q.error;
    }
    // far tail: zeta = hi2 / v
    {
        let mut f = |v: f64| {
            if v <= 0.0 {
                return 0.0;
            }
            let z = hi2 / v;
            theta_integral(z) * hi2 / (v * v)
        };
        let q = integrate_gk(
            &mut f,
            &[0.0, 0.5, 1.0],
            spec.rel_tol,
            0.25 * spec.abs_tol / omega_ang,
            spec.max_subdiv,
            "truncation tail integral",
        )?;
        total += q.value;
        err += q.error;
    }
    Ok(QuadValue { value: omega_ang * total, error: omega_ang * err })
}
