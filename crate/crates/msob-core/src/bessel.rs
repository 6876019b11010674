//! Modified Bessel K_1 and ordinary Bessel J_nu for the orders the
//! frequency-side transforms need (nu = 1/2, 1, 3/2, 2).
//!
//! K_1 switches between the ascending series, the cosh integral
//! representation, and the large-argument asymptotic series; the switch
//! points are covered by cross-regime tests.

use crate::quadrature::tanh_sinh;

const EULER_GAMMA: f64 = 0.5772156649015328606065120900824024;

/// K_1(x) for x > 0.
pub fn bessel_k1(x: f64) -> f64 {
    assert!(x > 0.0, "bessel_k1 requires x > 0");
    if x <= 2.0 {
        k1_series(x)
    } else if x < 16.0 {
        // the asymptotic series bottoms out near 4e-10 relative at x = 10,
        // so the integral representation carries further than usual
        k1_integral(x)
    } else {
        k1_asymptotic(x)
    }
}

// K_1(x) = 1/x + ln(x/2) I_1(x)
//          - (x/4) sum_k [psi(k+1)+psi(k+2)] (x^2/4)^k / (k! (k+1)!)
fn k1_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    // I_1 ascending series
    let mut i1 = 0.0;
    let mut term = 0.5 * x;
    let mut k = 0u32;
    loop {
        i1 += term;
        k += 1;
        term *= q / (k as f64 * (k + 1) as f64);
        if term < 1e-19 * i1.abs() + 1e-300 || k > 60 {
            break;
        }
    }
    let mut psi1 = -EULER_GAMMA; // psi(1)
    let mut psi2 = 1.0 - EULER_GAMMA; // psi(2)
    let mut s = 0.0;
    let mut t = 1.0; // (x^2/4)^k / (k!(k+1)!)
    let mut k = 0u32;
    loop {
        s += (psi1 + psi2) * t;
        k += 1;
        t *= q / (k as f64 * (k + 1) as f64);
        psi1 += 1.0 / k as f64;
        psi2 += 1.0 / (k + 1) as f64;
        if t * (psi1 + psi2).abs() < 1e-19 * s.abs() + 1e-300 || k > 60 {
            break;
        }
    }
    1.0 / x + (0.5 * x).ln() * i1 - 0.25 * x * s
}

// K_1(x) = int_0^inf e^{-x cosh t} cosh t dt, truncated where the
// integrand underflows
fn k1_integral(x: f64) -> f64 {
    let t_cut = (760.0 / x).acosh();
    let mut f = |t: f64| (-x * t.cosh()).exp() * t.cosh();
    tanh_sinh(&mut f, 0.0, t_cut, 1e-15, 1e-300)
        .expect("cosh-kernel integral converges for 2 < x < 16")
        .value
}

// sqrt(pi/2x) e^{-x} sum_k a_k / x^k with a_k the nu=1 Hankel coefficients
fn k1_asymptotic(x: f64) -> f64 {
    let mu = 4.0;
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..30 {
        let j = (2 * k - 1) as f64;
        term *= (mu - j * j) / (k as f64 * 8.0 * x);
        if term.abs() >= prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() * sum
}

/// J_{1/2}(x) = sqrt(2/(pi x)) sin x
pub fn bessel_j_half(x: f64) -> f64 {
    assert!(x > 0.0);
    (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sin()
}

/// J_{3/2}(x) = sqrt(2/(pi x)) (sin x / x - cos x)
pub fn bessel_j_three_half(x: f64) -> f64 {
    assert!(x > 0.0);
    if x < 1e-2 {
        // small-x series to dodge the sin x / x - cos x cancellation
        let q = x * x;
        let lead = x / 3.0 * (1.0 - q / 10.0 + q * q / 280.0 - q * q * q / 15120.0);
        return (2.0 / (std::f64::consts::PI * x)).sqrt() * lead;
    }
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (x.sin() / x - x.cos())
}

/// J_1(x) for x >= 0.
pub fn bessel_j1(x: f64) -> f64 {
    if x <= 12.0 {
        j_series(1, x)
    } else {
        j_asymptotic(1, x)
    }
}

/// J_2(x) for x >= 0.
pub fn bessel_j2(x: f64) -> f64 {
    if x <= 12.0 {
        j_series(2, x)
    } else {
        j_asymptotic(2, x)
    }
}

fn j_series(nu: u32, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut fact_nu = 1.0;
    for i in 1..=nu {
        fact_nu *= i as f64;
    }
    let mut term = (0.5 * x).powi(nu as i32) / fact_nu;
    let mut sum = 0.0;
    for m in 0..80u32 {
        sum += term;
        term *= -q / ((m + 1) as f64 * (m + 1 + nu) as f64);
        if term.abs() < 1e-18 * sum.abs().max(1e-30) {
            break;
        }
    }
    sum
}

// Hankel expansion: J_nu = sqrt(2/(pi x)) [P cos chi - Q sin chi],
// chi = x - (nu/2 + 1/4) pi
fn j_asymptotic(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu as f64) * (nu as f64);
    let mut a = [0.0f64; 12];
    a[0] = 1.0;
    for k in 1..12 {
        let j = (2 * k - 1) as f64;
        a[k] = a[k - 1] * (mu - j * j) / (k as f64 * 8.0);
    }
    let mut p = 0.0;
    let mut q = 0.0;
    let mut sign = 1.0;
    for k in 0..6 {
        p += sign * a[2 * k] / x.powi(2 * k as i32);
        q += sign * a[2 * k + 1] / x.powi(2 * k as i32 + 1);
        sign = -sign;
    }
    let chi = x - (0.5 * nu as f64 + 0.25) * std::f64::consts::PI;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn k1_pinned_series_regime() {
        assert!(close(bessel_k1(0.05), 19.909674325882506511, 1e-13));
        assert!(close(bessel_k1(0.5), 1.6564411200033008937, 1e-13));
        assert!(close(bessel_k1(1.0), 0.60190723019723457474, 1e-13));
    }

    #[test]
    fn k1_pinned_integral_regime() {
        assert!(close(bessel_k1(3.0), 0.040156431128194184377, 1e-12));
        assert!(close(bessel_k1(3.6), 0.019794962019720617134, 1e-12));
        assert!(close(bessel_k1(5.0), 0.0040446134454521642084, 1e-12));
        assert!(close(bessel_k1(8.0), 0.00015536921180500113392, 1e-12));
    }

    #[test]
    fn k1_pinned_asymptotic_regime() {
        assert!(close(bessel_k1(15.0), 1.014172936976209181e-7, 1e-12));
        assert!(close(bessel_k1(30.0), 2.1677320018915494249e-14, 1e-12));
        assert!(close(bessel_k1(50.0), 3.4441022267175556126e-23, 1e-12));
    }

    #[test]
    fn k1_regime_boundaries_consistent() {
        assert!(close(bessel_k1(9.9), 2.0721059931963455001e-5, 1e-11));
        assert!(close(bessel_k1(10.1), 1.67846826746835386e-5, 1e-11));
        // straddle the series/integral switch
        assert!(close(k1_series(2.0), k1_integral(2.0), 1e-11));
        // straddle the integral/asymptotic switch
        assert!(close(k1_integral(15.99), k1_asymptotic(15.99), 1e-12));
    }

    #[test]
    fn j_half_orders_pinned() {
        assert!(close(bessel_j_half(0.3), 0.43049351732812456502, 1e-13));
        assert!(close(bessel_j_half(7.0), 0.19812877407634482015, 1e-13));
        assert!(close(bessel_j_three_half(0.3), 0.043309881918378323272, 1e-12));
        assert!(close(bessel_j_three_half(7.0), -0.19905171329249354882, 1e-13));
    }

    #[test]
    fn j_integer_orders_pinned() {
        assert!(close(bessel_j1(0.3), 0.14831881627310400774, 1e-13));
        assert!(close(bessel_j1(7.0), -0.0046828234823458326991, 1e-11));
        assert!(close(bessel_j1(20.0), 0.066833124175850045579, 5e-10));
        assert!(close(bessel_j2(0.3), 0.01116586194906396404, 1e-13));
        assert!(close(bessel_j2(7.0), -0.30141722008594012028, 1e-12));
        assert!(close(bessel_j2(20.0), -0.16034135192299815017, 5e-10));
    }

    #[test]
    fn j_series_asymptotic_overlap() {
        for &x in &[11.5, 12.0, 12.5, 13.0] {
            assert!(close(j_series(1, x), j_asymptotic(1, x), 5e-9), "J1 at {x}");
            assert!(close(j_series(2, x), j_asymptotic(2, x), 5e-9), "J2 at {x}");
        }
    }
}
