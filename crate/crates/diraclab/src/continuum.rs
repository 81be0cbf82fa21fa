//! Closed-form continuum integrals with a sharp momentum cutoff.
//!
//! The infinite-ring limit of the discrete sums turns the lattice selection
//! rule into momentum-shift integrals of
//!
//!   f(p) = (p+k)/√((p+k)²+m²) − p/√(p²+m²)
//!
//! regulated symmetrically at |p| ≤ r. The half-integral
//!
//!   I_cut(r) = (1/2)∫_{−r}^{r} f dp
//!            = (1/2)(√((r+k)²+m²) − √((r−k)²+m²))
//!
//! is the building block: it tends to k as r → ∞ with an O(1/r²) remainder,
//! and every commutator coefficient below is proportional to it. Closed
//! forms are the reported values; adaptive quadrature of the same integrand
//! is exposed as an independent cross-check only.
//!
//! The band-restricted sea adds the sum over transitions to states beneath
//! the band. Its support is confined by the cutoff to two momentum windows
//! of width k at the band edges, and its closed form cancels the
//! band-to-positive part identically at every finite r.

use crate::error::{Error, Result};
use crate::harmonic::HarmonicCoefficient;

/// Parameters of a continuum (infinite-ring) evaluation.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ContinuumParams {
    /// Fermion mass m ≥ 0 (massless limit allowed here).
    pub mass: f64,
    /// Gauge wavenumber k > 0.
    pub wavenumber: f64,
    /// Gauge amplitude V₀.
    pub amplitude: f64,
    /// Coupling e.
    pub charge: f64,
    /// Symmetric momentum cutoff r > k. For the band-restricted sea this is
    /// the band momentum radius, √(r²+m²) = m + ΔE_w.
    pub cutoff: f64,
}

impl ContinuumParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass >= 0.0) || !self.mass.is_finite() {
            return Err(Error::InvalidParams(format!(
                "mass must be nonnegative and finite, got {}",
                self.mass
            )));
        }
        if !(self.wavenumber > 0.0) || !self.wavenumber.is_finite() {
            return Err(Error::InvalidParams(format!(
                "wavenumber must be positive and finite, got {}",
                self.wavenumber
            )));
        }
        if !self.amplitude.is_finite() || !self.charge.is_finite() {
            return Err(Error::InvalidParams(
                "amplitude and charge must be finite".into(),
            ));
        }
        if !(self.cutoff > self.wavenumber) {
            return Err(Error::CutoffBelowWavenumber {
                cutoff: self.cutoff,
                wavenumber: self.wavenumber,
            });
        }
        Ok(())
    }
}

/// Momentum-shift integrand f(p) for given mass and wavenumber.
pub fn shift_integrand(mass: f64, wavenumber: f64, p: f64) -> f64 {
    (p + wavenumber) / (p + wavenumber).hypot(mass) - p / p.hypot(mass)
}

/// Closed form of the half-integral (1/2)∫_{−r}^{r} f dp.
///
/// Valid for any signed k with |k| < r; odd in k; equals k exactly at m = 0
/// and approaches k as r → ∞.
pub fn cutoff_integral_value(mass: f64, wavenumber: f64, cutoff: f64) -> f64 {
    0.5 * ((cutoff + wavenumber).hypot(mass) - (cutoff - wavenumber).hypot(mass))
}

/// Validated closed-form cutoff integral.
pub fn cutoff_integral(params: &ContinuumParams) -> Result<f64> {
    params.validate()?;
    Ok(cutoff_integral_value(params.mass, params.wavenumber, params.cutoff))
}

/// Quadrature cross-check of `cutoff_integral`: the same half-integral
/// evaluated by adaptive Gauss–Kronrod integration of f.
pub fn cutoff_integral_quadrature(params: &ContinuumParams, abs_tol: f64) -> Result<f64> {
    params.validate()?;
    let (mass, k, r) = (params.mass, params.wavenumber, params.cutoff);
    let value = adaptive_quadrature(|p| shift_integrand(mass, k, p), -r, r, abs_tol)?;
    Ok(0.5 * value)
}

/// Sin-coefficient of the imaginary part of the equal-time commutator of
/// the smeared charge with the current, taken in the filled-sea state:
/// the commutator is i·S·sin(kz) with S = 2e²V₀·I_cut(r)/π.
pub fn schwinger_sin_coefficient_value(
    mass: f64,
    wavenumber: f64,
    amplitude: f64,
    charge: f64,
    cutoff: f64,
) -> f64 {
    2.0 * charge * charge * amplitude * cutoff_integral_value(mass, wavenumber, cutoff)
        / std::f64::consts::PI
}

/// Filled-sea commutator pieces: the sea-to-positive transition sum I and
/// the full commutator, both as real harmonics (the commutator itself is
/// i times the returned function).
#[derive(Clone, Copy, Debug)]
pub struct SchwingerStandard {
    /// Imaginary part of the transition sum I; I(z) = i·(V₀ I_cut/π)sin(kz).
    pub transition_sum: HarmonicCoefficient,
    /// Imaginary part of e²(I − h.c.): S·sin(kz) with S = 2e²V₀ I_cut/π.
    pub commutator: HarmonicCoefficient,
}

pub fn schwinger_standard(params: &ContinuumParams) -> Result<SchwingerStandard> {
    params.validate()?;
    let icut = cutoff_integral_value(params.mass, params.wavenumber, params.cutoff);
    let base = params.amplitude * icut / std::f64::consts::PI;
    Ok(SchwingerStandard {
        transition_sum: HarmonicCoefficient::from_sin_cos(base, 0.0, params.wavenumber),
        commutator: HarmonicCoefficient::from_sin_cos(
            2.0 * params.charge * params.charge * base,
            0.0,
            params.wavenumber,
        ),
    })
}

/// First-order gauge shift of the sea current: the real function
/// δJ(z) = −S·sin(kz), i.e. i times the commutator expectation.
pub fn delta_j_vac(params: &ContinuumParams) -> Result<HarmonicCoefficient> {
    Ok(-schwinger_standard(params)?.commutator)
}

/// A momentum region bounded on one side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TargetRegion {
    /// p ≥ bound.
    Above(f64),
    /// p ≤ bound.
    Below(f64),
}

/// Source interval of p_m ∈ [low, high] whose shifted image p_m + shift
/// lands in `target`; `None` when the constraint has empty support.
pub fn delta_support_window(
    source: (f64, f64),
    target: TargetRegion,
    shift: f64,
) -> Option<(f64, f64)> {
    let (low, high) = match target {
        TargetRegion::Above(bound) => ((bound - shift).max(source.0), source.1),
        TargetRegion::Below(bound) => (source.0, (bound - shift).min(source.1)),
    };
    (low < high).then_some((low, high))
}

/// Band-restricted sea commutator pieces, as real harmonics of the
/// imaginary parts (each function itself is i times the harmonic).
#[derive(Clone, Copy, Debug)]
pub struct BandIntegrals {
    /// Band-to-positive transitions; equals the filled-sea transition sum
    /// regulated at the band radius.
    pub i_plus: HarmonicCoefficient,
    /// Band-to-below-band transitions; cancels `i_plus` exactly.
    pub i_minus: HarmonicCoefficient,
}

impl BandIntegrals {
    /// Imaginary part of e²(I₊ + I₋ − h.c.).
    pub fn commutator(&self, charge: f64) -> HarmonicCoefficient {
        (self.i_plus + self.i_minus).scaled(2.0 * charge * charge)
    }
}

/// Antiderivative of (p+shift)/√((p+shift)²+m²) + p/√(p²+m²).
fn sum_antiderivative(mass: f64, shift: f64, p: f64) -> f64 {
    (p + shift).hypot(mass) + p.hypot(mass)
}

pub fn band_integrals(params: &ContinuumParams) -> Result<BandIntegrals> {
    params.validate()?;
    let (m, k, r) = (params.mass, params.wavenumber, params.cutoff);
    let icut = cutoff_integral_value(m, k, r);
    let prefactor = params.amplitude / (4.0 * std::f64::consts::PI);

    // Transitions below the band survive only where the shifted band
    // momentum leaves [−r, r]; with 0 < k < r that is a width-k window at
    // each band edge, one per harmonic.
    let mut plus_coeff = 0.0; // e^{+ikz} amplitude of I₋ / prefactor
    let mut minus_coeff = 0.0;
    for (shift, into_plus) in [(k, true), (-k, false)] {
        for target in [TargetRegion::Above(r), TargetRegion::Below(-r)] {
            if let Some((low, high)) = delta_support_window((-r, r), target, shift) {
                let value = -(sum_antiderivative(m, shift, high)
                    - sum_antiderivative(m, shift, low));
                if into_plus {
                    plus_coeff += value;
                } else {
                    minus_coeff += value;
                }
            }
        }
    }
    // I₋(z) = prefactor·(plus_coeff·e^{ikz} + minus_coeff·e^{−ikz}); the two
    // window integrals give minus_coeff = −plus_coeff, so the imaginary part
    // is 2·prefactor·plus_coeff·sin(kz).
    debug_assert!((plus_coeff + minus_coeff).abs() <= 1e-12 * plus_coeff.abs().max(1.0));
    let i_minus_sin = 2.0 * prefactor * plus_coeff;
    let i_plus_sin = params.amplitude * icut / std::f64::consts::PI;
    Ok(BandIntegrals {
        i_plus: HarmonicCoefficient::from_sin_cos(i_plus_sin, 0.0, k),
        i_minus: HarmonicCoefficient::from_sin_cos(i_minus_sin, 0.0, k),
    })
}

// ---------------------------------------------------------------------------
// Adaptive Gauss–Kronrod quadrature (15-point Kronrod, embedded 7-pt Gauss)
// ---------------------------------------------------------------------------

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_47,
    0.0,
];

const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_69,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

fn kronrod_pair<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for (i, (&node, &weight)) in KRONROD_NODES.iter().zip(&KRONROD_WEIGHTS).enumerate() {
        let pair = if node == 0.0 {
            f(center)
        } else {
            f(center - half * node) + f(center + half * node)
        };
        kronrod += weight * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * half, (kronrod - gauss).abs() * half)
}

/// Adaptive quadrature of f over [a, b] to the requested absolute
/// tolerance, by bisection on the Gauss–Kronrod error estimate.
pub fn adaptive_quadrature<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    const MAX_DEPTH: u32 = 52;
    let mut total = 0.0;
    let mut err_total = 0.0;
    let mut stack = vec![(a, b, abs_tol, 0u32)];
    while let Some((lo, hi, tol, depth)) = stack.pop() {
        let (value, err) = kronrod_pair(&f, lo, hi);
        if err <= tol || depth >= MAX_DEPTH {
            total += value;
            err_total += err;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * tol, depth + 1));
            stack.push((mid, hi, 0.5 * tol, depth + 1));
        }
    }
    if err_total > abs_tol.max(1e-15 * total.abs()) {
        return Err(Error::QuadratureFailure {
            tolerance: abs_tol,
            achieved: err_total,
        });
    }
    Ok(total)
}
