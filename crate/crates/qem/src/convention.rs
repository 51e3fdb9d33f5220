//! Time-harmonic sign conventions.
//!
//! The volume-integral and layered-media machinery works in the engineering
//! `e^{+j omega t}` convention (scalar Green's function `e^{-j k0 R}/4 pi R`,
//! lossy permittivity with negative imaginary part). Open-system qubit rates
//! require the physics `e^{-i omega t}` convention, where `Im G >= 0` encodes
//! loss. The two differ by complex conjugation of every field/Green quantity.

use crate::{CMat3, CVec3, Complex};

/// Time-harmonic convention of a complex field quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeHarmonic {
    /// `e^{-i omega t}`; lossy media have `Im eps >= 0`.
    Physics,
    /// `e^{+j omega t}`; lossy media have `Im eps <= 0`.
    Engineering,
}

impl TimeHarmonic {
    /// Convert a complex scalar expressed in `self` to `target`.
    ///
    /// Conversion is complex conjugation; converting to the same convention
    /// is the identity, and a round trip is exact.
    #[inline]
    pub fn convert(self, target: TimeHarmonic, value: Complex) -> Complex {
        if self == target {
            value
        } else {
            value.conj()
        }
    }

    /// Convert a complex 3-vector between conventions.
    pub fn convert_vec(self, target: TimeHarmonic, v: &CVec3) -> CVec3 {
        if self == target {
            *v
        } else {
            v.map(|z| z.conj())
        }
    }

    /// Convert a complex 3x3 tensor between conventions.
    pub fn convert_mat(self, target: TimeHarmonic, m: &CMat3) -> CMat3 {
        if self == target {
            *m
        } else {
            m.map(|z| z.conj())
        }
    }
}
