//! Golden-section search over a bracket.
//!
//! Each iteration shrinks `[lo, hi]` by `1/phi` and reuses one interior
//! evaluation, so one new objective call is made per iteration.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMin {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Minimize `f` on `[lo, hi]` until the bracket width falls below
/// `rel_tol * max(|x|, 1)` or `max_iter` is reached.
///
/// Assumes `f` is unimodal on the bracket. Ties between the interior
/// probes keep the left one.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, rel_tol: f64, max_iter: usize) -> ScalarMin
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while iterations < max_iter && (b - a) > rel_tol * c.abs().max(1.0) {
        if fc <= fd {
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
        iterations += 1;
    }
    let (x, fx) = if fc <= fd { (c, fc) } else { (d, fd) };
    ScalarMin { x, fx, iterations }
}
