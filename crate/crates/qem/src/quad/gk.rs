//! Adaptive Gauss-Kronrod (G7/K15) quadrature over real intervals for
//! scalar-, complex-, and matrix-valued integrands.

use thiserror::Error;

use crate::{CMat3, Complex};

/// 15-point Kronrod abscissae on [-1, 1] (nonnegative half, symmetric).
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];

/// Embedded 7-point Gauss weights (for XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// Value types integrable by [`adaptive_gk`].
pub trait QuadValue: Copy {
    fn zero() -> Self;
    fn accumulate(&mut self, weight: f64, value: Self);
    /// Magnitude used for error control (max-norm style).
    fn magnitude(&self) -> f64;
    fn sub(self, other: Self) -> Self;
    fn add(self, other: Self) -> Self;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn accumulate(&mut self, w: f64, v: Self) {
        *self += w * v;
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
}

impl QuadValue for Complex {
    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }
    fn accumulate(&mut self, w: f64, v: Self) {
        *self += v * w;
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
}

impl QuadValue for CMat3 {
    fn zero() -> Self {
        CMat3::zeros()
    }
    fn accumulate(&mut self, w: f64, v: Self) {
        *self += v.map(|z| z * w);
    }
    fn magnitude(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error(
        "quadrature failed to converge: error estimate {error:.3e} above tolerance {tolerance:.3e} after {intervals} intervals"
    )]
    NotConverged { error: f64, tolerance: f64, intervals: usize },
    #[error("invalid integration interval [{0}, {1}]")]
    BadInterval(f64, f64),
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of subdivided intervals before giving up.
    pub max_intervals: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 0.0, max_intervals: 4000 }
    }
}

struct Segment<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

/// One G7/K15 panel on [a, b]: returns (kronrod value, |kronrod - gauss|).
fn gk15<V: QuadValue>(f: &mut impl FnMut(f64) -> V, a: f64, b: f64) -> (V, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = V::zero();
    let mut gauss = V::zero();
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        if x == 0.0 {
            let v = f(center);
            kron.accumulate(wk * half, v);
            gauss.accumulate(WG[3] * half, v);
        } else {
            let vp = f(center + half * x);
            let vm = f(center - half * x);
            kron.accumulate(wk * half, vp);
            kron.accumulate(wk * half, vm);
            if i % 2 == 1 {
                let wg = WG[i / 2];
                gauss.accumulate(wg * half, vp);
                gauss.accumulate(wg * half, vm);
            }
        }
    }
    // Raw |K - G| is a conservative error estimate for the Kronrod value.
    let diff = kron.sub(gauss).magnitude();
    (kron, diff)
}

/// Adaptively integrate `f` over `[a, b]` to the requested tolerance.
///
/// Returns the integral and the final error estimate. Errors if the estimate
/// stays above `max(abs_tol, rel_tol * |I|)` after `max_intervals`
/// subdivisions.
pub fn adaptive_gk<V: QuadValue>(
    mut f: impl FnMut(f64) -> V,
    a: f64,
    b: f64,
    opts: &AdaptiveOptions,
) -> Result<(V, f64), QuadError> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(QuadError::BadInterval(a, b));
    }
    if a == b {
        return Ok((V::zero(), 0.0));
    }
    let (v0, e0) = gk15(&mut f, a, b);
    let mut segments = vec![Segment { a, b, value: v0, error: e0 }];
    loop {
        let mut total = V::zero();
        let mut total_err = 0.0;
        for s in &segments {
            total = total.add(s.value);
            total_err += s.error;
        }
        let tol = opts.abs_tol.max(opts.rel_tol * total.magnitude());
        if total_err <= tol || total_err == 0.0 {
            return Ok((total, total_err));
        }
        if segments.len() >= opts.max_intervals {
            return Err(QuadError::NotConverged {
                error: total_err,
                tolerance: tol,
                intervals: segments.len(),
            });
        }
        // Split the worst segment.
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x.error.total_cmp(&y.error))
            .map(|(i, _)| i)
            .expect("nonempty");
        let Segment { a, b, .. } = segments.swap_remove(worst);
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // Interval at floating-point resolution; accept its estimate.
            let (v, e) = gk15(&mut f, a, b);
            segments.push(Segment { a, b, value: v, error: e * f64::EPSILON });
            continue;
        }
        let (v1, e1) = gk15(&mut f, a, mid);
        let (v2, e2) = gk15(&mut f, mid, b);
        segments.push(Segment { a, b: mid, value: v1, error: e1 });
        segments.push(Segment { a: mid, b, value: v2, error: e2 });
    }
}
