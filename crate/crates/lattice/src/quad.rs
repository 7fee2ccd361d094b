//! Adaptive Gauss-Kronrod (7/15 point) quadrature for complex integrands.

use ness_core::C64;

use crate::error::{LatticeError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

pub const MAX_INTERVALS: usize = 20_000;

/// Kronrod estimate and the Kronrod-Gauss difference on `[a, b]`.
fn gk15(f: &mut impl FnMut(f64) -> Result<C64>, a: f64, b: f64) -> Result<(C64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx)? + f(c + dx)?;
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    Ok((kron * h, ((kron - gauss) * h).norm()))
}

/// Integrates `f` over consecutive intervals between sorted `points`,
/// bisecting the interval with the largest error estimate until the total
/// error falls below `max(abs_tol, rel_tol * |integral|)`.
pub fn integrate(
    mut f: impl FnMut(f64) -> Result<C64>,
    points: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<C64> {
    let mut pts: Vec<f64> = points.to_vec();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut intervals: Vec<(f64, f64, C64, f64)> = vec![];
    for w in pts.windows(2) {
        let (v, e) = gk15(&mut f, w[0], w[1])?;
        intervals.push((w[0], w[1], v, e));
    }
    loop {
        let total: C64 = intervals.iter().map(|i| i.2).sum();
        let error: f64 = intervals.iter().map(|i| i.3).sum();
        if error <= abs_tol.max(rel_tol * total.norm()) {
            return Ok(total);
        }
        if intervals.len() >= MAX_INTERVALS {
            return Err(LatticeError::Quadrature {
                a: pts[0],
                b: *pts.last().unwrap(),
                tolerance: abs_tol.max(rel_tol * total.norm()),
                error,
            });
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (a, b, _, _) = intervals.swap_remove(worst);
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            return Err(LatticeError::Quadrature {
                a,
                b,
                tolerance: abs_tol.max(rel_tol * total.norm()),
                error,
            });
        }
        let (v1, e1) = gk15(&mut f, a, m)?;
        let (v2, e2) = gk15(&mut f, m, b)?;
        intervals.push((a, m, v1, e1));
        intervals.push((m, b, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(g: impl Fn(f64) -> f64) -> impl FnMut(f64) -> Result<C64> {
        move |x| Ok(C64::new(g(x), 0.0))
    }

    #[test]
    fn exact_for_polynomials_of_degree_22() {
        let v = integrate(real(|x| x.powi(22)), &[0.0, 1.0], 1e-15, 0.0).unwrap();
        assert!((v.re - 1.0 / 23.0).abs() < 1e-16);
    }

    #[test]
    fn handles_kinks_and_sharp_steps() {
        let v = integrate(real(|x: f64| x.abs()), &[-1.0, 1.0], 1e-13, 0.0).unwrap();
        assert!((v.re - 1.0).abs() < 1e-13);
        // Fermi step of width 1e-3 centred at 0.3: integral of 1/(1+e^{(x-0.3)/T}) over [0,1]
        let t = 1e-3;
        let v = integrate(real(|x| 1.0 / (1.0 + ((x - 0.3) / t).exp())), &[0.0, 1.0], 1e-12, 0.0).unwrap();
        let exact = 0.3 + t * ((1.0 + (-0.3f64 / t).exp()).ln() - (1.0 + (-0.7f64 / t).exp()).ln());
        assert!((v.re - exact).abs() < 1e-12, "{}", v.re - exact);
    }

    #[test]
    fn complex_integrand() {
        let v = integrate(|x: f64| Ok(C64::new(0.0, x).exp()), &[0.0, std::f64::consts::PI], 1e-14, 0.0).unwrap();
        assert!((v - C64::new(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn integrand_errors_propagate() {
        let r = integrate(
            |x: f64| if x > 0.5 { Err(LatticeError::Eigen) } else { Ok(C64::new(1.0, 0.0)) },
            &[0.0, 1.0],
            1e-10,
            0.0,
        );
        assert!(r.is_err());
    }
}
