//! Central finite differences with Richardson extrapolation.
//!
//! Every stencil here has an `O(h^2)` leading error, so halving the step and
//! combining as `(4 D(h/2) - D(h)) / 3` cancels it; a cascade of three steps
//! applies a second level with weight 16.

use crate::C64;

/// Central stencil for the `order`-th derivative (1 to 4) of `f` at `x`,
/// stepping along the real axis.
pub fn central<F>(f: &F, x: C64, order: usize, h: f64) -> C64
where
    F: Fn(C64) -> C64,
{
    let at = |k: f64| f(x + C64::new(k * h, 0.0));
    match order {
        1 => (at(1.0) - at(-1.0)) / (2.0 * h),
        2 => (at(1.0) - 2.0 * at(0.0) + at(-1.0)) / (h * h),
        3 => (at(2.0) - 2.0 * at(1.0) + 2.0 * at(-1.0) - at(-2.0)) / (2.0 * h.powi(3)),
        4 => {
            (at(2.0) - 4.0 * at(1.0) + 6.0 * at(0.0) - 4.0 * at(-1.0) + at(-2.0)) / h.powi(4)
        }
        _ => panic!("central stencils are provided for orders 1..=4, got {order}"),
    }
}

/// One Richardson step on a central stencil: `(4 D(h/2) - D(h)) / 3`.
pub fn richardson<F>(f: &F, x: C64, order: usize, h: f64) -> C64
where
    F: Fn(C64) -> C64,
{
    let coarse = central(f, x, order, h);
    let fine = central(f, x, order, h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

/// Richardson extrapolation over a cascade of steps, each half the previous.
///
/// Returns the extrapolated value and the spread between the two best
/// estimates, which callers use as a noise indicator.
pub fn richardson_cascade(estimates: &[C64]) -> (C64, f64) {
    assert!(!estimates.is_empty());
    let mut level: Vec<C64> = estimates.to_vec();
    let mut factor = 4.0;
    let mut spread = 0.0;
    while level.len() > 1 {
        let next: Vec<C64> = level
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
        spread = (level[level.len() - 1] - next[next.len() - 1]).norm();
        level = next;
        factor *= 4.0;
    }
    (level[0], spread)
}

/// Derivative of `f` at `x` by the stencil cascade `h, h/2, h/4`.
pub fn derivative<F>(f: &F, x: C64, order: usize, h: f64) -> C64
where
    F: Fn(C64) -> C64,
{
    let estimates = [
        central(f, x, order, h),
        central(f, x, order, h / 2.0),
        central(f, x, order, h / 4.0),
    ];
    richardson_cascade(&estimates).0
}

/// Default step used for the analytic-derivative identities: `1e-5 max(1, |scale|)`.
pub fn default_step(scale: f64) -> f64 {
    1e-5 * scale.abs().max(1.0)
}
