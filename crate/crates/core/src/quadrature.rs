//! Adaptive Gauss-Kronrod (7/15) quadrature and golden-section search.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

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
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

pub const DEFAULT_ABS_TOL: f64 = 1e-13;
pub const DEFAULT_REL_TOL: f64 = 1e-12;
const MAX_SEGMENTS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
}

/// One 15-point Kronrod rule with its embedded 7-point Gauss estimate.
pub fn gk15(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> Integral {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    Integral {
        value: k * h,
        abs_error: ((k - g) * h).abs(),
    }
}

struct Segment {
    lo: f64,
    hi: f64,
    est: Integral,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.est.abs_error == other.est.abs_error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.abs_error.total_cmp(&other.est.abs_error)
    }
}

/// Integrates `f` over `[lo, hi]`, splitting first at the breakpoints that
/// fall strictly inside the interval, then bisecting the worst segment until
/// the summed error estimate meets `max(abs_tol, rel_tol·|value|)`.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Integral> {
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::InvalidArgument(format!("bad integration interval [{lo}, {hi}]")));
    }
    if hi == lo {
        return Ok(Integral { value: 0.0, abs_error: 0.0 });
    }
    let mut cuts = vec![lo];
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|b| *b > lo && *b < hi).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(hi);

    let mut heap = BinaryHeap::new();
    for w in cuts.windows(2) {
        heap.push(Segment { lo: w[0], hi: w[1], est: gk15(&f, w[0], w[1]) });
    }
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.est.value, e + s.est.abs_error));
        let target = abs_tol.max(rel_tol * value.abs());
        if error <= target {
            return Ok(Integral { value, abs_error: error });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if heap.len() + 2 > MAX_SEGMENTS || mid <= worst.lo || mid >= worst.hi {
            heap.push(worst);
            return Err(Error::Integration { lo, hi, achieved: error, requested: target });
        }
        heap.push(Segment { lo: worst.lo, hi: mid, est: gk15(&f, worst.lo, mid) });
        heap.push(Segment { lo: mid, hi: worst.hi, est: gk15(&f, mid, worst.hi) });
    }
}

/// Golden-section search for a maximiser of `f` on `[a, b]`.
/// Returns `(argmax, max)`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .max_by(|u, v| u.1.total_cmp(&v.1))
        .expect("three candidates")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(|x| x.powi(5) - 2.0 * x * x, 0.0, 2.0, &[], 1e-14, 1e-14).unwrap();
        assert!((r.value - (64.0 / 6.0 - 16.0 / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn oscillating_integrand() {
        let a = 16.0 * std::f64::consts::PI;
        let r = integrate(|x| (a * x).sin().powi(2), 0.0, 0.3, &[], 1e-13, 1e-13).unwrap();
        let exact = 0.15 - (2.0 * a * 0.3).sin() / (4.0 * a);
        assert!((r.value - exact).abs() < 1e-12);
    }

    #[test]
    fn breakpoints_handle_jumps() {
        let step = |x: f64| if x < 0.3 { 1.0 } else { 5.0 };
        let r = integrate(step, 0.0, 1.0, &[0.3, 2.0], 1e-14, 1e-14).unwrap();
        assert!((r.value - (0.3 + 3.5)).abs() < 1e-13);
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, fx) = golden_max(|t| -(t - 0.37).powi(2), 0.0, 1.0, 1e-12);
        assert!((x - 0.37).abs() < 1e-8);
        assert!(fx.abs() < 1e-15);
    }
}
