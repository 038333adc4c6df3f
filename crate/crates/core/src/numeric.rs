//! Scalar numerics shared by the model modules: bracketed bisection,
//! adaptive Simpson quadrature on log-subdivided partitions and
//! golden-section maximization.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Bisection for a sign change of `f` in `[lo, hi]`.
///
/// Stops when the bracket is narrower than `rel_tol * |mid|` or after
/// `max_iter` halvings. With `geometric` set the bracket is split at the
/// geometric mean, which suits brackets spanning many decades (both ends
/// must then be positive).
pub fn bisect<F>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
    max_iter: usize,
    geometric: bool,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) {
        return Err(Error::Bisection(format!("empty bracket [{lo}, {hi}]")));
    }
    if geometric && lo <= 0.0 {
        return Err(Error::Bisection("geometric bisection needs lo > 0".into()));
    }
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bisection(format!(
            "no sign change on [{lo:e}, {hi:e}] (f = {flo:e}, {fhi:e})"
        )));
    }
    let lo_sign = flo.signum();
    for _ in 0..max_iter {
        let mid = if geometric {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= rel_tol * mid.abs() {
            return Ok(mid);
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Bisection(format!(
        "no convergence after {max_iter} iterations, bracket [{lo:e}, {hi:e}]"
    )))
}

/// Smallest power-of-two multiple of `start` at which `pred` holds, scanning
/// upward no further than `limit`.
pub fn expand_until<F>(start: f64, limit: f64, mut pred: F) -> Option<f64>
where
    F: FnMut(f64) -> bool,
{
    let mut x = start;
    while x <= limit {
        if pred(x) {
            return Some(x);
        }
        x *= 2.0;
    }
    None
}

/// Breakpoints for integrating over `[a, b]`: geometric with ratio at most 2,
/// and for `a = 0` a first panel of width `b / 2^20`.
pub fn log_partition(a: f64, b: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    if b <= a {
        return vec![a, a];
    }
    let start = if a <= 0.0 {
        pts.push(a);
        (b / f64::powi(2.0, 20)).max(a + f64::MIN_POSITIVE)
    } else {
        a
    };
    let segments = (b / start).log2().ceil().max(1.0) as usize;
    let ratio = (b / start).powf(1.0 / segments as f64);
    let mut x = start;
    pts.push(x);
    for _ in 1..segments {
        x *= ratio;
        pts.push(x);
    }
    pts.push(b);
    pts
}

/// Adaptive Simpson quadrature with Richardson correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveSimpson {
    pub rel_tol: f64,
    pub abs_floor: f64,
    pub max_depth: u32,
}

impl Default for AdaptiveSimpson {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_floor: 1e-300,
            max_depth: 48,
        }
    }
}

impl AdaptiveSimpson {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrates `f` over `[a, b]` using a log-subdivided partition.
    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        if b <= a {
            return Ok(0.0);
        }
        self.integrate_partition(&f, &log_partition(a, b))
    }

    /// Integrates over consecutive panels `[pts[i], pts[i+1]]`.
    pub fn integrate_partition<F>(&self, f: &F, pts: &[f64]) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        // A coarse composite estimate sets the absolute error budget.
        let coarse: f64 = pts
            .windows(2)
            .map(|w| composite_simpson(f, w[0], w[1], 32).abs())
            .sum();
        let panels = (pts.len().saturating_sub(1)).max(1) as f64;
        let budget = (self.rel_tol * coarse).max(self.abs_floor) / panels;

        let mut total = 0.0;
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let fa = f(a);
            let fb = f(b);
            let m = 0.5 * (a + b);
            let fm = f(m);
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            total += self.recurse(f, a, b, fa, fm, fb, whole, budget, self.max_depth)?;
        }
        Ok(total)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if !delta.is_finite() {
            return Err(Error::NonConvergentQuadrature { a, b });
        }
        if delta.abs() <= 15.0 * eps || m <= a || b <= m {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::NonConvergentQuadrature { a, b });
        }
        let l = self.recurse(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)?;
        let r = self.recurse(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)?;
        Ok(l + r)
    }
}

fn composite_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let n = 2 * panels;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Composite trapezoid rule with `points` equally spaced nodes.
pub fn trapezoid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, points: usize) -> f64 {
    assert!(points >= 2);
    let h = (b - a) / (points - 1) as f64;
    let mut s = 0.5 * (f(a) + f(b));
    for i in 1..points - 1 {
        s += f(a + i as f64 * h);
    }
    s * h
}

/// Location and value of a maximum of `f` on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub at: f64,
    pub value: f64,
}

/// Maximizes `f` over `[a, b]`: scan `samples` grid points (log-spaced when
/// `log_grid`), then refine around the best one by golden-section search.
pub fn maximize<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    samples: usize,
    log_grid: bool,
) -> Maximum {
    let samples = samples.max(3);
    let node = |i: usize| -> f64 {
        let s = i as f64 / (samples - 1) as f64;
        if log_grid && a > 0.0 {
            a * (b / a).powf(s)
        } else {
            a + (b - a) * s
        }
    };
    let mut best = Maximum { at: a, value: f(a) };
    let mut best_i = 0;
    for i in 1..samples {
        let x = node(i);
        let v = f(x);
        if v > best.value {
            best = Maximum { at: x, value: v };
            best_i = i;
        }
    }
    let lo = node(best_i.saturating_sub(1));
    let hi = node((best_i + 1).min(samples - 1));
    let refined = golden_section_max(&f, lo, hi, 1e-13, 200);
    if refined.value > best.value {
        refined
    } else {
        best
    }
}

fn golden_section_max<F: Fn(f64) -> f64>(
    f: &F,
    mut a: f64,
    mut b: f64,
    rel_tol: f64,
    max_iter: usize,
) -> Maximum {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (b - a).abs() <= rel_tol * (a.abs() + b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        Maximum { at: c, value: fc }
    } else {
        Maximum { at: d, value: fd }
    }
}

/// `exp(z) - 1` without cancellation for small `|z|`.
pub fn expm1_complex(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    // cos(y) - 1 = -2 sin^2(y/2)
    let re = z.re.exp_m1() * c - 2.0 * half * half;
    let im = z.re.exp() * s;
    Complex64::new(re, im)
}

/// Round-trip float formatting with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
