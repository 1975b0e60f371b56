//! Central finite differences and a small derivative-check harness.

/// Central first difference `(f(x+h) - f(x-h)) / 2h`.
pub fn central<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Central second difference `(f(x-h) - 2 f(x) + f(x+h)) / h²`.
pub fn second_central<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - h) - 2.0 * f(x) + f(x + h)) / (h * h)
}

/// Result of comparing an analytic derivative against central differences.
#[derive(Debug, Clone, Copy)]
pub struct DerivativeCheck {
    /// Largest relative mismatch seen (rounding floor already deducted).
    pub max_rel_err: f64,
    /// Point where it occurred.
    pub worst_x: f64,
    /// Number of points checked.
    pub points: usize,
}

impl DerivativeCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_rel_err <= tol
    }
}

/// Compare `df` against the central difference of `f` at each point in
/// `xs`.
///
/// The central difference carries its own rounding noise of about
/// `2·eps·|f(x)|/h`; where the true derivative crosses zero that noise
/// dwarfs any relative target, so the mismatch is measured as the excess
/// over the noise floor, relative to `max(|df|, |fd|)`. A wrong derivative
/// formula exceeds the floor by orders of magnitude and still fails.
pub fn check_derivative<F, G>(f: F, df: G, xs: &[f64], h: f64) -> DerivativeCheck
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let mut max_rel_err = 0.0f64;
    let mut worst_x = f64::NAN;
    for &x in xs {
        let a = df(x);
        let fd = central(&f, x, h);
        let noise = 2.0 * f64::EPSILON * f(x).abs() / h;
        let excess = ((a - fd).abs() - noise).max(0.0);
        let rel = excess / a.abs().max(fd.abs()).max(f64::MIN_POSITIVE);
        if rel > max_rel_err {
            max_rel_err = rel;
            worst_x = x;
        }
    }
    DerivativeCheck {
        max_rel_err,
        worst_x,
        points: xs.len(),
    }
}
