//! Golden-section search for unimodal functions of one variable.
//!
//! The bracket `[lo, hi]` shrinks by the inverse golden ratio each step and
//! only one new function evaluation is needed per iteration. The search
//! keeps track of the best point it has ever probed and reports that point,
//! so the returned value is never worse than any evaluated candidate.

/// `1 / phi`, with `phi = (1 + sqrt 5) / 2`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenResult {
    /// Best probed argument.
    pub x: f64,
    /// Objective at `x`.
    pub fx: f64,
    /// Final bracket.
    pub lo: f64,
    pub hi: f64,
    pub evaluations: usize,
}

impl GoldenResult {
    pub fn bracket_width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Minimise `f` on `[lo, hi]` until the bracket is narrower than `tol`.
///
/// Ties `f(c) == f(d)` keep the left part of the bracket, which makes the
/// search deterministic on plateaus.
pub fn golden_section_min<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> GoldenResult
where
    F: FnMut(f64) -> f64,
{
    assert!(lo <= hi, "golden_section_min: empty bracket [{lo}, {hi}]");
    assert!(tol > 0.0, "golden_section_min: tolerance must be positive");

    let (mut a, mut b) = (lo, hi);
    let mut best = (f64::NAN, f64::INFINITY);
    let mut evals = 0usize;
    let mut eval = |x: f64, best: &mut (f64, f64)| {
        evals += 1;
        let v = f(x);
        if v < best.1 || best.0.is_nan() {
            *best = (x, v);
        }
        v
    };

    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c, &mut best);
    let mut fd = eval(d, &mut best);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d, &mut best);
        }
        // Guard against a bracket that can no longer shrink in floating point.
        if c >= d && b - a > tol && (b - a) <= f64::EPSILON * a.abs().max(b.abs()) * 4.0 {
            break;
        }
    }
    // The endpoints are legitimate candidates for monotone objectives.
    for x in [a, b] {
        eval(x, &mut best);
    }
    GoldenResult {
        x: best.0,
        fx: best.1,
        lo: a,
        hi: b,
        evaluations: evals,
    }
}

/// Maximise `f` on `[lo, hi]`; `fx` in the result is the maximum value.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> GoldenResult
where
    F: FnMut(f64) -> f64,
{
    let mut r = golden_section_min(|x| -f(x), lo, hi, tol);
    r.fx = -r.fx;
    r
}
