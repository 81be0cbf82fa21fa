//! Single-harmonic representation of position-dependent results.
//!
//! Every z-dependent quantity produced here is supported on one wavenumber:
//! the cos(kz) gauge profile only connects momenta differing by ±k, so
//! results are exact combinations of e^{±ikz} rather than sampled grids.
//!
//! A `HarmonicCoefficient` stores the real-valued function
//! F(z) = A e^{ikz} + conj(A) e^{−ikz}. Equal-time charge–current
//! commutator expectations are purely imaginary, so the library stores the
//! imaginary part of such a commutator as the real harmonic F and the
//! commutator itself is i·F(z). First-order gauge shifts of the current are
//! real and are stored directly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicCoefficient {
    /// Amplitude A of e^{+ikz}; the e^{−ikz} partner is conj(A).
    pub amplitude: Complex64,
    /// Wavenumber k of the harmonic.
    pub wavenumber: f64,
}

impl HarmonicCoefficient {
    pub fn new(amplitude: Complex64, wavenumber: f64) -> Self {
        Self { amplitude, wavenumber }
    }

    pub fn zero(wavenumber: f64) -> Self {
        Self::new(Complex64::new(0.0, 0.0), wavenumber)
    }

    /// Build from F(z) = s·sin(kz) + c·cos(kz).
    pub fn from_sin_cos(sin_coefficient: f64, cos_coefficient: f64, wavenumber: f64) -> Self {
        Self::new(
            Complex64::new(0.5 * cos_coefficient, -0.5 * sin_coefficient),
            wavenumber,
        )
    }

    /// Coefficient of sin(kz) in F.
    pub fn sin_coefficient(&self) -> f64 {
        -2.0 * self.amplitude.im
    }

    /// Coefficient of cos(kz) in F.
    pub fn cos_coefficient(&self) -> f64 {
        2.0 * self.amplitude.re
    }

    pub fn eval(&self, z: f64) -> f64 {
        2.0 * (self.amplitude * Complex64::new(0.0, self.wavenumber * z).exp()).re
    }

    /// |A|; proportional to the L² norm of F over a period, so ratios of
    /// magnitudes compare function sizes.
    pub fn magnitude(&self) -> f64 {
        self.amplitude.norm()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.amplitude * factor, self.wavenumber)
    }
}

impl std::ops::Add for HarmonicCoefficient {
    type Output = HarmonicCoefficient;

    fn add(self, other: HarmonicCoefficient) -> HarmonicCoefficient {
        debug_assert!(
            (self.wavenumber - other.wavenumber).abs()
                <= 1e-12 * self.wavenumber.abs().max(other.wavenumber.abs()),
            "adding harmonics of different wavenumbers"
        );
        HarmonicCoefficient::new(self.amplitude + other.amplitude, self.wavenumber)
    }
}

impl std::ops::Neg for HarmonicCoefficient {
    type Output = HarmonicCoefficient;

    fn neg(self) -> HarmonicCoefficient {
        HarmonicCoefficient::new(-self.amplitude, self.wavenumber)
    }
}
