//! Energy bookkeeping for concentrating sequences: functional values of
//! individual profiles, energy levels built from profile decompositions,
//! the window (beta*, 2 beta*) in which compactness survives, separation
//! statistics, and the algebraic identity satisfied by sign-changing
//! candidates with separated bumps.

use serde::{Deserialize, Serialize};

use crate::bubble::{self, Bubble, Cutoff};
use crate::error::{Error, Result};
use crate::quad::{self, QuadSpec, RadialFn};
use crate::quadrature::{integrate_gk, QuadValue};
use crate::specfn;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnergyReport {
    pub total: f64,
    /// (||grad u||^2 + [u]_s^2) / 2
    pub quadratic: f64,
    /// lambda ||u||_2^2 / 2
    pub mass: f64,
    /// ||u||_{2*}^{2*} / 2*
    pub critical: f64,
    pub quadratic_error: f64,
    pub mass_error: f64,
    pub critical_error: f64,
}

/// I_lambda(u) = quadratic - mass - critical for a radial profile,
/// everything by quadrature
pub fn energy_local(
    u: &RadialFn,
    n: u32,
    s: f64,
    lambda: f64,
    spec: &QuadSpec,
) -> Result<EnergyReport> {
    if n < 3 {
        return Err(Error::Domain("energy needs dimension >= 3".into()));
    }
    let nf = n as f64;
    let two_star = 2.0 * nf / (nf - 2.0);
    let grad = quad::radial_integral(&u.deriv_squared(), n, spec)?;
    let sem = quad::gagliardo_direct(u, n, s, spec)?;
    let (mass_v, mass_e) = if lambda == 0.0 {
        (0.0, 0.0)
    } else {
        let l2 = quad::radial_integral(&u.abs_power(2.0), n, spec)?;
        (0.5 * lambda * l2.value, 0.5 * lambda.abs() * l2.error)
    };
    let crit = quad::radial_integral(&u.abs_power(two_star), n, spec)?;
    let quadratic = 0.5 * (grad.value + sem.value);
    let critical = crit.value / two_star;
    Ok(EnergyReport {
        total: quadratic - mass_v - critical,
        quadratic,
        mass: mass_v,
        critical,
        quadratic_error: 0.5 * (grad.error + sem.error),
        mass_error: mass_e,
        critical_error: crit.error / two_star,
    })
}

/// limiting functional I_infty(u) = ||grad u||^2/2 - ||u||_{2*}^{2*}/2*
pub fn energy_infty(u: &RadialFn, n: u32, spec: &QuadSpec) -> Result<QuadValue> {
    if n < 3 {
        return Err(Error::Domain("energy needs dimension >= 3".into()));
    }
    let nf = n as f64;
    let two_star = 2.0 * nf / (nf - 2.0);
    let grad = quad::radial_integral(&u.deriv_squared(), n, spec)?;
    let crit = quad::radial_integral(&u.abs_power(two_star), n, spec)?;
    Ok(QuadValue {
        value: 0.5 * grad.value - crit.value / two_star,
        error: 0.5 * grad.error + crit.error / two_star,
    })
}

/// log of beta* = S_N^{N/2} / N, the limiting energy of one ground profile
pub fn log_bubble_energy(n: u32) -> Result<f64> {
    Ok(0.5 * n as f64 * specfn::log_sobolev_constant(n)? - (n as f64).ln())
}

/// beta* in linear scale; overflows f64 somewhere past N = 250, where the
/// log form stays usable
pub fn bubble_energy(n: u32) -> Result<f64> {
    Ok(log_bubble_energy(n)?.exp())
}

/// closed-form I_infty of c U_{z,lambda}: scale-free, even in c
pub fn profile_energy(n: u32, amplitude: f64) -> Result<f64> {
    if amplitude == 0.0 || !amplitude.is_finite() {
        return Err(Error::Domain("profile amplitude must be finite and nonzero".into()));
    }
    let nf = n as f64;
    let two_star = 2.0 * nf / (nf - 2.0);
    let grad = bubble::bubble_grad_sq(n)?;
    let crit = bubble::bubble_lcrit(n)?;
    Ok(0.5 * amplitude * amplitude * grad - amplitude.abs().powf(two_star) * crit / two_star)
}

/// a weak limit's energy plus a list of bubbles escaping to infinity
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileSet {
    pub base_energy: f64,
    pub bubbles: Vec<Bubble>,
}

/// energy level of the decomposition: base + sum of profile energies.
/// With l ground-normalized bubbles this is base + l beta*.
pub fn ps_level(ps: &ProfileSet, n: u32) -> Result<f64> {
    let mut level = ps.base_energy;
    for b in &ps.bubbles {
        if b.dim() != n {
            return Err(Error::Domain(format!(
                "profile dimension {} does not match requested dimension {n}",
                b.dim()
            )));
        }
        level += profile_energy(n, b.amplitude)?;
    }
    Ok(level)
}

/// the open energy window (beta*, 2 beta*) where exactly one bubble fits
pub fn coron_window(n: u32) -> Result<(f64, f64)> {
    let b = bubble_energy(n)?;
    Ok((b, 2.0 * b))
}

/// |log(lambda_i/lambda_j)| + |z_i - z_j| / lambda_i; asymmetric in (i, j)
pub fn separation_stat(bi: &Bubble, bj: &Bubble) -> Result<f64> {
    if bi.dim() != bj.dim() {
        return Err(Error::Domain("profiles live in different dimensions".into()));
    }
    let mut dist2 = 0.0;
    for (a, b) in bi.center.iter().zip(&bj.center) {
        dist2 += (a - b) * (a - b);
    }
    Ok((bi.scale / bj.scale).ln().abs() + dist2.sqrt() / bi.scale)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IdentityReport {
    pub energy_direct: f64,
    pub energy_split: f64,
    /// |direct - split| relative to the direct value
    pub residual: f64,
    pub seminorm_direct: f64,
    pub seminorm_split: f64,
    pub seminorm_residual: f64,
    pub cross_term: f64,
}

/// For u = u+ - u- with separated supports, check
///   [u]^2 = [u+]^2 + [u-]^2 + 4X,  X = iint u+(x) u-(y) K(x,y),
/// and the corresponding split of the full functional
///   I(u) = I(u+) + I(u-) + 2X.
/// Pure recombination of quadrature values; nothing is solved.
pub fn sign_changing_identity(
    u_plus: &RadialFn,
    u_minus: &RadialFn,
    n: u32,
    s: f64,
    spec: &QuadSpec,
) -> Result<IdentityReport> {
    let (lo_p, hi_p) = u_plus.support.ok_or_else(|| {
        Error::UnsupportedInput("identity needs compactly supported parts".into())
    })?;
    let (lo_m, hi_m) = u_minus.support.ok_or_else(|| {
        Error::UnsupportedInput("identity needs compactly supported parts".into())
    })?;
    let separated = hi_p <= lo_m || hi_m <= lo_p;
    if !separated {
        return Err(Error::UnsupportedInput(format!(
            "supports [{lo_p}, {hi_p}] and [{lo_m}, {hi_m}] overlap: the \
             split identity only holds for separated bumps"
        )));
    }
    let nf = n as f64;
    let two_star = 2.0 * nf / (nf - 2.0);

    // the difference as a single radial profile
    let up = u_plus.clone();
    let um = u_minus.clone();
    let hull = (lo_p.min(lo_m), hi_p.max(hi_m));
    let diff = RadialFn::new(move |r| up.eval(r) - um.eval(r), f64::INFINITY)
        .with_support(hull.0, hull.1);
    let up_d = u_plus.clone();
    let um_d = u_minus.clone();
    let diff = diff.with_deriv(move |r| up_d.deriv_at(r) - um_d.deriv_at(r));

    let sem_u = quad::gagliardo_direct(&diff, n, s, spec)?;
    let sem_p = quad::gagliardo_direct(u_plus, n, s, spec)?;
    let sem_m = quad::gagliardo_direct(u_minus, n, s, spec)?;
    let x = quad::cross_term(u_plus, u_minus, n, s, spec)?;

    let sem_split = sem_p.value + sem_m.value + 4.0 * x.value;
    let sem_res = (sem_u.value - sem_split).abs() / sem_u.value.abs().max(1e-300);

    let grad_u = quad::radial_integral(&diff.deriv_squared(), n, spec)?;
    let grad_p = quad::radial_integral(&u_plus.deriv_squared(), n, spec)?;
    let grad_m = quad::radial_integral(&u_minus.deriv_squared(), n, spec)?;
    let crit_u = quad::radial_integral(&diff.abs_power(two_star), n, spec)?;
    let crit_p = quad::radial_integral(&u_plus.abs_power(two_star), n, spec)?;
    let crit_m = quad::radial_integral(&u_minus.abs_power(two_star), n, spec)?;

    let direct = 0.5 * (grad_u.value + sem_u.value) - crit_u.value / two_star;
    let split = 0.5 * (grad_p.value + grad_m.value)
        + 0.5 * (sem_p.value + sem_m.value)
        + 2.0 * x.value
        - (crit_p.value + crit_m.value) / two_star;
    let residual = (direct - split).abs() / direct.abs().max(1e-300);

    Ok(IdentityReport {
        energy_direct: direct,
        energy_split: split,
        residual,
        seminorm_direct: sem_u.value,
        seminorm_split: sem_split,
        seminorm_residual: sem_res,
        cross_term: x.value,
    })
}

/// F(u) = int x |grad u|^2 / int |grad u|^2 for a bubble, optionally
/// multiplied by a plateau cutoff centered at the origin. Without a cutoff
/// the answer is the bubble center exactly (odd shells cancel); with one,
/// the axial symmetry reduces the quotient to a half-plane integral.
pub fn center_of_mass(b: &Bubble, cut: Option<&Cutoff>, spec: &QuadSpec) -> Result<Vec<f64>> {
    let n = b.dim();
    if n < 3 {
        return Err(Error::Domain("center of mass needs dimension >= 3".into()));
    }
    let cut = match cut {
        None => return Ok(b.center.clone()),
        Some(c) => *c,
    };
    let nf = n as f64;
    let t: f64 = b.center.iter().map(|v| v * v).sum::<f64>().sqrt();
    let axis: Vec<f64> = if t == 0.0 {
        let mut e = vec![0.0; n as usize];
        e[0] = 1.0;
        e
    } else {
        b.center.iter().map(|v| v / t).collect()
    };
    let lam = b.scale;
    let beta = (nf - 2.0) / 2.0;
    let c_amp = b.amplitude;
    let u_of = |w2: f64| c_amp * lam.powf(-beta) * (1.0 + w2 / (lam * lam)).powf(-beta);
    let du_of = |w: f64| {
        -2.0 * beta * c_amp * w * lam.powf(-beta - 2.0)
            * (1.0 + w * w / (lam * lam)).powf(-beta - 1.0)
    };

    let grad_sq_at = |zeta: f64, theta: f64| -> f64 {
        let phi = cut.eval(zeta);
        let dphi = cut.deriv(zeta);
        if phi == 0.0 && dphi == 0.0 {
            return 0.0;
        }
        let ct = theta.cos();
        let w2 = zeta * zeta + t * t - 2.0 * zeta * t * ct;
        let w = w2.sqrt();
        let u = u_of(w2);
        if w == 0.0 {
            return dphi * dphi * u * u;
        }
        let du = du_of(w);
        phi * phi * du * du + 2.0 * phi * dphi * u * du * (zeta - t * ct) / w
            + dphi * dphi * u * u
    };

    let lo = 0.25 / cut.r;
    let hi = 4.0 * cut.r;
    let mut pts = vec![lo, 0.5 / cut.r, 2.0 * cut.r, hi];
    if t > lo && t < hi {
        pts.push(t);
    }
    if lam > lo && lam < hi {
        pts.push(lam);
    }
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();

    let theta_moment = |zeta: f64, weight_cos: bool| -> f64 {
        let mut f = |th: f64| {
            let g = grad_sq_at(zeta, th);
            let base = g * zeta.powf(nf - 1.0) * th.sin().powf(nf - 2.0);
            if weight_cos {
                base * zeta * th.cos()
            } else {
                base
            }
        };
        integrate_gk(
            &mut f,
            &[0.0, 0.5 * std::f64::consts::PI, std::f64::consts::PI],
            1e-9,
            1e-300,
            200,
            "center-of-mass angular integral",
        )
        .map(|q| q.value)
        .unwrap_or(0.0)
    };

    let mut num = |z: f64| theta_moment(z, true);
    let numerator = integrate_gk(
        &mut num,
        &pts,
        spec.rel_tol,
        spec.abs_tol,
        spec.max_subdiv,
        "center-of-mass numerator",
    )?;
    let mut den = |z: f64| theta_moment(z, false);
    let denominator = integrate_gk(
        &mut den,
        &pts,
        spec.rel_tol,
        spec.abs_tol,
        spec.max_subdiv,
        "center-of-mass denominator",
    )?;
    if denominator.value <= 0.0 {
        return Err(Error::Domain("cutoff removes the entire gradient mass".into()));
    }
    let f_axis = numerator.value / denominator.value;
    Ok(axis.iter().map(|v| v * f_axis).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::{CapBump, ShellBump};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn limiting_energy_pinned() {
        let expect = [
            (3, 4.2736640683230422787),
            (4, 26.318945069571622984),
            (5, 168.87205295254771194),
            (6, 1190.6410245235130947),
            (10, 6632045.6554524488495),
        ];
        for (n, v) in expect {
            assert!(close(bubble_energy(n).unwrap(), v, 1e-12), "N = {n}");
        }
    }

    #[test]
    fn closed_form_energy_matches_quadrature() {
        // ground normalization turns the unit profile into a solution whose
        // limiting energy is exactly beta*
        for n in [3u32, 4, 5] {
            let amp = bubble::solution_amplitude(n);
            assert!(close(profile_energy(n, amp).unwrap(), bubble_energy(n).unwrap(), 1e-13));
            let u = RadialFn::bubble(n).scaled(amp);
            let q = energy_infty(&u, n, &QuadSpec::default()).unwrap();
            assert!(
                close(q.value, bubble_energy(n).unwrap(), 1e-6),
                "N = {n}: quadrature {} vs closed {}",
                q.value,
                bubble_energy(n).unwrap()
            );
        }
    }

    #[test]
    fn ps_level_counts_ground_bubbles() {
        let n = 5;
        let amp = bubble::solution_amplitude(n);
        let ps = ProfileSet {
            base_energy: 1.25,
            bubbles: vec![
                Bubble::new(vec![1.0, 0.0, 0.0, 0.0, 0.0], 0.1, amp).unwrap(),
                Bubble::new(vec![-1.0, 0.0, 0.0, 0.0, 0.0], 0.02, amp).unwrap(),
                Bubble::new(vec![0.0, 3.0, 0.0, 0.0, 0.0], 1.0, amp).unwrap(),
            ],
        };
        let level = ps_level(&ps, n).unwrap();
        let beta = bubble_energy(n).unwrap();
        assert!(close(level, 1.25 + 3.0 * beta, 1e-12));
        let (lo, hi) = coron_window(n).unwrap();
        assert!(close(lo, beta, 1e-15) && close(hi, 2.0 * beta, 1e-15));
        // one bubble above the base lands inside the window, two outside
        assert!(beta + 0.0 < hi && 2.0 * beta >= hi);
    }

    #[test]
    fn separation_stat_asymmetric() {
        let bi = Bubble::new(vec![1.0, 0.0, 0.0], 0.1, 1.0).unwrap();
        let bj = Bubble::new(vec![-1.0, 0.0, 0.0], 0.4, 1.0).unwrap();
        let sij = separation_stat(&bi, &bj).unwrap();
        let sji = separation_stat(&bj, &bi).unwrap();
        assert!(close(sij, (0.1f64 / 0.4).ln().abs() + 2.0 / 0.1, 1e-13));
        assert!(close(sji, (0.1f64 / 0.4).ln().abs() + 2.0 / 0.4, 1e-13));
        assert!(sij != sji);
    }

    #[test]
    fn energy_ledger_pinned_cutoff_profile() {
        // phi_{R=1} times the ground-normalized profile at N = 5, s = 1/2
        let n = 5;
        let amp = bubble::solution_amplitude(n);
        let cut = Cutoff::new(1.0).unwrap();
        let base = RadialFn::bubble(n).scaled(amp);
        let cut_fn = RadialFn::new(move |r| cut.eval(r), f64::INFINITY)
            .with_deriv(move |r| cut.deriv(r))
            .with_support(0.25, 4.0);
        let w = base.product(&cut_fn);
        let rep = energy_local(&w, n, 0.5, 0.0, &QuadSpec::default()).unwrap();
        // grad 1036.6191936347424, sem 17891.6154946, crit 790.33257143897578
        let grad_sem = 0.5 * (1036.6191936347424 + 17891.6154946);
        assert!(close(rep.quadratic, grad_sem, 2e-3), "quadratic {}", rep.quadratic);
        assert!(close(rep.critical, 0.3 * 790.33257143897578, 1e-6), "critical {}", rep.critical);
        assert_eq!(rep.mass, 0.0);
        assert!(close(rep.total, 9227.01757267, 2e-3), "total {}", rep.total);
    }

    #[test]
    fn identity_for_separated_bumps() {
        let up = RadialFn::from_cap(CapBump::new(1.0, 0.25));
        let um = RadialFn::from_shell(ShellBump::new(2.0, 3.0, 0.25));
        let rep = sign_changing_identity(&up, &um, 3, 0.5, &QuadSpec::default()).unwrap();
        assert!(rep.seminorm_residual <= 1e-3, "seminorm residual {}", rep.seminorm_residual);
        assert!(rep.residual <= 1e-3, "energy residual {}", rep.residual);
        assert!(close(rep.cross_term, 5.16714293480609, 1e-5));
        assert!(close(rep.seminorm_direct, 3378.06628401, 1e-4));
        assert!(close(rep.energy_direct, 2238.05806227, 1e-4));

        let overlapping = RadialFn::from_shell(ShellBump::new(0.5, 2.5, 0.5));
        assert!(matches!(
            sign_changing_identity(&up, &overlapping, 3, 0.5, &QuadSpec::default()),
            Err(Error::UnsupportedInput(_))
        ));
    }

    #[test]
    fn center_of_mass_tracks_the_center() {
        let spec = QuadSpec::default();
        let b = Bubble::new(vec![0.4, 0.0, 0.0, 0.0, 0.0], 0.6, 2.0).unwrap();
        // no cutoff: exact
        assert_eq!(center_of_mass(&b, None, &spec).unwrap(), vec![0.4, 0.0, 0.0, 0.0, 0.0]);
        // generous cutoff barely moves it
        let cut = Cutoff::new(10.0).unwrap();
        let f = center_of_mass(&b, Some(&cut), &spec).unwrap();
        assert!((f[0] - 0.4).abs() < 0.02, "axial component {}", f[0]);
        assert!(f[1].abs() < 1e-14);
        // centered bubble stays centered
        let b0 = Bubble::new(vec![0.0; 5], 0.6, 1.0).unwrap();
        let f0 = center_of_mass(&b0, Some(&cut), &spec).unwrap();
        assert!(f0[0].abs() < 1e-9);
    }
}
