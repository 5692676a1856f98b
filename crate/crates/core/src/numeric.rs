//! Shared numerical kernels: compensated summation, log-factorials and a
//! one-dimensional adaptive Simpson integrator.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Neumaier (improved Kahan) running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

/// Compensated sum of an iterator of reals.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = NeumaierSum::new();
    acc.extend(iter);
    acc.value()
}

/// Componentwise Neumaier sum for complex values.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Euclidean norm of a real sequence, scaled so tiny entries do not
/// underflow when squared.
pub fn scaled_l2<I: IntoIterator<Item = f64> + Clone>(iter: I) -> f64 {
    let scale = iter.clone().into_iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let ss = neumaier_sum(iter.into_iter().map(|x| {
        let y = x / scale;
        y * y
    }));
    scale * ss.sqrt()
}

const EXACT_FACTORIAL_MAX: usize = 20;

const fn factorial_table() -> [u64; EXACT_FACTORIAL_MAX + 1] {
    let mut t = [1_u64; EXACT_FACTORIAL_MAX + 1];
    let mut k = 1;
    while k <= EXACT_FACTORIAL_MAX {
        t[k] = t[k - 1] * k as u64;
        k += 1;
    }
    t
}

const FACTORIALS: [u64; EXACT_FACTORIAL_MAX + 1] = factorial_table();

/// `n!` as an exact integer, for `n <= 20`.
pub fn exact_factorial(n: usize) -> Option<u64> {
    FACTORIALS.get(n).copied()
}

/// `ln(n!)`.
///
/// Exact integer factorial up to 20!, Stirling series for `ln Γ(n + 1)`
/// above. At `x = n + 1 >= 22` the first omitted series term is below
/// `1e-15`, so the result is limited by rounding of `(x - 1/2) ln x`.
pub fn ln_factorial(n: usize) -> f64 {
    if let Some(f) = exact_factorial(n) {
        return (f as f64).ln();
    }
    let x = (n + 1) as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // 1/(12x) - 1/(360x^3) + 1/(1260x^5) - 1/(1680x^7)
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

/// Default subdivision budget for [`adaptive_simpson`].
pub const SIMPSON_BUDGET: usize = 1 << 20;

const INITIAL_PANELS: usize = 16;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
///
/// Panels are bisected until the Richardson estimate `|S_2 - S_1| / 15`
/// drops below the panel's share of `tol`; accepted panels contribute the
/// extrapolated value `S_2 + (S_2 - S_1) / 15`. More than `budget`
/// subintervals yields [`Error::Accuracy`] carrying the best estimate.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64, budget: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid("integration bounds must be finite"));
    }
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return adaptive_simpson(f, b, a, tol, budget).map(|v| -v);
    }

    let width = b - a;
    let min_width = width * f64::EPSILON * 4.0;
    let h = width / INITIAL_PANELS as f64;
    let mut stack = Vec::with_capacity(64);
    for i in (0..INITIAL_PANELS).rev() {
        let pa = a + h * i as f64;
        let pb = if i + 1 == INITIAL_PANELS { b } else { a + h * (i + 1) as f64 };
        let pm = 0.5 * (pa + pb);
        let (fa, fm, fb) = (f(pa), f(pm), f(pb));
        stack.push(Panel {
            a: pa,
            b: pb,
            fa,
            fm,
            fb,
            whole: (pb - pa) / 6.0 * (fa + 4.0 * fm + fb),
            tol: tol / INITIAL_PANELS as f64,
        });
    }

    let mut total = NeumaierSum::new();
    let mut err_total = 0.0;
    let mut accepted = 0usize;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        let right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        let delta = left + right - p.whole;
        let err = delta.abs() / 15.0;
        if err <= p.tol || (p.b - p.a) <= min_width {
            total.add(left + right + delta / 15.0);
            err_total += err;
            accepted += 1;
            continue;
        }
        if accepted + stack.len() + 2 > budget {
            let rest = neumaier_sum(stack.iter().map(|q| q.whole));
            return Err(Error::Accuracy {
                estimate: total.value() + left + right + rest,
                error_estimate: err_total + err,
                tol,
            });
        }
        let half = 0.5 * p.tol;
        stack.push(Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, tol: half });
        stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left, tol: half });
    }
    Ok(total.value())
}
