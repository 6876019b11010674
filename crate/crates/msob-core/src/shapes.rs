//! Smooth compactly-supported building blocks: a C-infinity unit step and
//! the radial cap/shell bumps assembled from it. These are the standard
//! exp(-1/t) constructions; every ramp is infinitely flat at both ends, so
//! gradient and seminorm integrals see no endpoint kinks.

/// C-infinity step: 0 for t <= 0, 1 for t >= 1, strictly increasing between.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let q = (-1.0 / t).exp();
        let q1 = (-1.0 / (1.0 - t)).exp();
        q / (q + q1)
    }
}

/// derivative of `smooth_step`
pub fn smooth_step_deriv(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        let q = (-1.0 / t).exp();
        let q1 = (-1.0 / (1.0 - t)).exp();
        let denom = q + q1;
        q * q1 * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t))) / (denom * denom)
    }
}

/// Radial bump equal to 1 near the origin, falling to 0 across
/// [b - w, b]: r -> step((b - r)/w).
#[derive(Debug, Clone, Copy)]
pub struct CapBump {
    pub b: f64,
    pub w: f64,
}

impl CapBump {
    pub fn new(b: f64, w: f64) -> Self {
        assert!(b > 0.0 && w > 0.0 && w < b, "cap bump needs 0 < w < b");
        CapBump { b, w }
    }
    pub fn eval(&self, r: f64) -> f64 {
        smooth_step((self.b - r) / self.w)
    }
    pub fn deriv(&self, r: f64) -> f64 {
        -smooth_step_deriv((self.b - r) / self.w) / self.w
    }
    /// support is [0, b]
    pub fn support(&self) -> (f64, f64) {
        (0.0, self.b)
    }
}

/// Radial bump supported on the shell a <= r <= b with ramps of width w
/// at both ends.
#[derive(Debug, Clone, Copy)]
pub struct ShellBump {
    pub a: f64,
    pub b: f64,
    pub w: f64,
}

impl ShellBump {
    pub fn new(a: f64, b: f64, w: f64) -> Self {
        assert!(
            a >= 0.0 && b > a && w > 0.0 && 2.0 * w <= b - a,
            "shell bump needs ramps that fit inside [a, b]"
        );
        ShellBump { a, b, w }
    }
    pub fn eval(&self, r: f64) -> f64 {
        smooth_step((r - self.a) / self.w) * smooth_step((self.b - r) / self.w)
    }
    pub fn deriv(&self, r: f64) -> f64 {
        let up = smooth_step((r - self.a) / self.w);
        let dn = smooth_step((self.b - r) / self.w);
        smooth_step_deriv((r - self.a) / self.w) / self.w * dn
            - up * smooth_step_deriv((self.b - r) / self.w) / self.w
    }
    pub fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_endpoints_and_symmetry() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert_eq!(smooth_step(2.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        for &t in &[0.1, 0.23, 0.4, 0.49] {
            let s = smooth_step(t) + smooth_step(1.0 - t);
            assert!((s - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn step_deriv_matches_finite_difference() {
        let h = 1e-6;
        for &t in &[0.1, 0.25, 0.5, 0.75, 0.9] {
            let fd = (smooth_step(t + h) - smooth_step(t - h)) / (2.0 * h);
            let an = smooth_step_deriv(t);
            assert!((fd - an).abs() < 1e-8 * an.abs().max(1.0), "at t={t}");
        }
    }

    #[test]
    fn bumps_respect_their_supports() {
        let cap = CapBump::new(1.0, 0.25);
        assert_eq!(cap.eval(0.0), 1.0);
        assert_eq!(cap.eval(0.74), 1.0);
        assert!(cap.eval(0.9) > 0.0 && cap.eval(0.9) < 1.0);
        assert_eq!(cap.eval(1.0), 0.0);
        assert_eq!(cap.eval(1.5), 0.0);

        let shell = ShellBump::new(2.0, 3.0, 0.25);
        assert_eq!(shell.eval(1.9), 0.0);
        assert_eq!(shell.eval(2.0), 0.0);
        assert_eq!(shell.eval(2.5), 1.0);
        assert_eq!(shell.eval(3.0), 0.0);
        let h = 1e-6;
        for &r in &[2.1, 2.2, 2.9] {
            let fd = (shell.eval(r + h) - shell.eval(r - h)) / (2.0 * h);
            assert!((fd - shell.deriv(r)).abs() < 1e-7 * shell.deriv(r).abs().max(1.0));
        }
    }
}
