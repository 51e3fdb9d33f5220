//! Bessel functions J0, J1, J2 of real argument, from libm.

/// J0(x).
#[inline]
pub fn bessel_j0(x: f64) -> f64 {
    libm::j0(x)
}

/// J1(x).
#[inline]
pub fn bessel_j1(x: f64) -> f64 {
    libm::j1(x)
}

/// J2(x).
#[inline]
pub fn bessel_j2(x: f64) -> f64 {
    libm::jn(2, x)
}
