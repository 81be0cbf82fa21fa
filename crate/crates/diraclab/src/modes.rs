//! Single-particle Dirac modes on a periodic ring.
//!
//! The one-dimensional free Dirac Hamiltonian α_z p + β m on a ring of
//! length L has plane-wave eigensolutions u e^{ipz} at the lattice momenta
//! p_n = 2πn/L. Each momentum carries four constant 4-spinors: two energy
//! signs λ = ±1 (energy λE with E = +√(p²+m²)) and two spin branches.
//! This module builds those spinors in closed form and provides the
//! first-quantized matrix elements that the second-quantized and mode-sum
//! layers consume:
//!
//! - `chi_matrix_element`: ∫ φ_n† χ φ_m dz with χ(z) = V₀ cos(kz), which on
//!   the ring collapses to a selection rule p_n − p_m = ±k;
//! - `current_pair_element`: (u_m† α_z u_n)(u_n† u_m), the weight entering
//!   the current-charge commutator sums;
//! - `first_quantized_commutator_check`: the mode-by-mode identity relating
//!   (λ_nE_n − λ_mE_m)∫φ_n†χφ_m to ∫φ_n†(−iα_z ∂χ/∂z)φ_m, which must hold
//!   to rounding for every pair.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// z-component Dirac alpha matrix in the standard representation.
pub const ALPHA_Z: [[f64; 4]; 4] = [
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, -1.0, 0.0, 0.0],
];

/// Diagonal of the Dirac beta matrix.
pub const BETA_DIAG: [f64; 4] = [1.0, 1.0, -1.0, -1.0];

/// Relative slack when matching a wavenumber to the momentum lattice.
const LATTICE_MATCH_TOL: f64 = 1e-6;

/// Physical inputs of a ring truncation. Natural units (ħ = c = 1)
/// throughout; the charge sign convention is e > 0, and every reported
/// quantity depends on e only through e².
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeParams {
    /// Fermion mass m > 0.
    pub mass: f64,
    /// Ring circumference L > 0.
    pub ring_length: f64,
    /// Largest retained momentum index n_max ≥ 1; momenta are p_n = 2πn/L
    /// with |n| ≤ n_max.
    pub momentum_index_cutoff: i32,
    /// Coupling e.
    pub charge: f64,
}

impl ModeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::InvalidParams(format!(
                "mass must be positive and finite, got {}",
                self.mass
            )));
        }
        if !(self.ring_length > 0.0) || !self.ring_length.is_finite() {
            return Err(Error::InvalidParams(format!(
                "ring length must be positive and finite, got {}",
                self.ring_length
            )));
        }
        if self.momentum_index_cutoff < 1 {
            return Err(Error::InvalidParams(format!(
                "momentum index cutoff must be at least 1, got {}",
                self.momentum_index_cutoff
            )));
        }
        if !self.charge.is_finite() {
            return Err(Error::InvalidParams("charge must be finite".into()));
        }
        Ok(())
    }

    /// Lattice momentum spacing 2π/L.
    pub fn lattice_spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.ring_length
    }

    /// Momentum of lattice index n.
    pub fn momentum(&self, index: i32) -> f64 {
        f64::from(index) * self.lattice_spacing()
    }

    /// Largest retained momentum magnitude.
    pub fn max_momentum(&self) -> f64 {
        self.momentum(self.momentum_index_cutoff)
    }

    pub fn energy(&self, momentum: f64) -> f64 {
        momentum.hypot(self.mass)
    }
}

/// Energy sign λ of a mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnergySign {
    Positive,
    Negative,
}

impl EnergySign {
    pub fn factor(self) -> f64 {
        match self {
            EnergySign::Positive => 1.0,
            EnergySign::Negative => -1.0,
        }
    }
}

/// The two spin branches of the 4-spinor solutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    One,
    Two,
}

impl Spin {
    pub fn label(self) -> u8 {
        match self {
            Spin::One => 1,
            Spin::Two => 2,
        }
    }
}

/// One plane-wave solution of the ring Dirac equation.
#[derive(Clone, Debug, PartialEq)]
pub struct Mode {
    /// Lattice index n with p = 2πn/L.
    pub index: i32,
    pub momentum: f64,
    /// Positive branch energy E = +√(p²+m²).
    pub energy: f64,
    pub sign: EnergySign,
    pub spin: Spin,
    /// Constant 4-spinor; real in this representation, with u†u = 1/L. All
    /// complex structure lives in the plane-wave phase e^{ipz}.
    pub spinor: [f64; 4],
}

impl Mode {
    /// λE, the actual Dirac eigenvalue of the mode.
    pub fn signed_energy(&self) -> f64 {
        self.sign.factor() * self.energy
    }

    pub fn is_negative(&self) -> bool {
        self.sign == EnergySign::Negative
    }
}

/// Gauge function χ(z) = V₀ cos(kz).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeProfile {
    /// Amplitude V₀.
    pub amplitude: f64,
    /// Wavenumber k > 0. On a ring it must sit on the momentum lattice,
    /// k = 2πj/L with integer j ≥ 1; `lattice_index` enforces this.
    pub wavenumber: f64,
}

impl GaugeProfile {
    pub fn new(amplitude: f64, wavenumber: f64) -> Result<Self> {
        if !(wavenumber > 0.0) || !wavenumber.is_finite() {
            return Err(Error::InvalidParams(format!(
                "gauge wavenumber must be positive and finite, got {wavenumber}"
            )));
        }
        if !amplitude.is_finite() {
            return Err(Error::InvalidParams("gauge amplitude must be finite".into()));
        }
        Ok(Self { amplitude, wavenumber })
    }

    /// Lattice index j with k = 2πj/L, or an error naming the nearest
    /// lattice wavenumbers when k is off-lattice.
    pub fn lattice_index(&self, params: &ModeParams) -> Result<i32> {
        let estimate = self.wavenumber / params.lattice_spacing();
        let rounded = estimate.round();
        if (estimate - rounded).abs() > LATTICE_MATCH_TOL * estimate.abs().max(1.0)
            || rounded < 1.0
        {
            return Err(Error::NonLatticeWavenumber {
                wavenumber: self.wavenumber,
                index_estimate: estimate,
                below: params.momentum(estimate.floor().max(1.0) as i32),
                above: params.momentum(estimate.ceil().max(1.0) as i32),
            });
        }
        Ok(rounded as i32)
    }

    pub fn chi(&self, z: f64) -> f64 {
        self.amplitude * (self.wavenumber * z).cos()
    }

    /// ∂χ/∂z.
    pub fn chi_prime(&self, z: f64) -> f64 {
        -self.amplitude * self.wavenumber * (self.wavenumber * z).sin()
    }
}

/// Depth of the occupied negative-energy band: modes with energy in
/// [−(m+ΔE_w), −m] are band members.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    pub band_depth: f64,
}

impl BandSpec {
    pub fn new(band_depth: f64) -> Result<Self> {
        if !(band_depth > 0.0) || !band_depth.is_finite() {
            return Err(Error::InvalidParams(format!(
                "band depth must be positive and finite, got {band_depth}"
            )));
        }
        Ok(Self { band_depth })
    }

    /// Momentum radius r with √(r²+m²) = m + ΔE_w.
    pub fn momentum_radius(&self, mass: f64) -> f64 {
        (self.band_depth * (self.band_depth + 2.0 * mass)).sqrt()
    }

    /// Band membership: negative sign and E ≤ m + ΔE_w (closed boundary).
    pub fn contains(&self, mode: &Mode, mass: f64) -> bool {
        mode.is_negative() && mode.energy <= mass + self.band_depth
    }
}

/// Which many-body reference state the calculation is built on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum VacuumSpec {
    /// Every negative-energy mode occupied (the filled sea).
    Standard,
    /// Only negative-energy modes down to −(m+ΔE_w) occupied.
    Band(BandSpec),
}

impl VacuumSpec {
    pub fn band(band_depth: f64) -> Result<Self> {
        Ok(VacuumSpec::Band(BandSpec::new(band_depth)?))
    }

    /// Indices (into `set`) of the modes occupied in this vacuum.
    pub fn occupied(&self, set: &ModeSet) -> Result<Vec<usize>> {
        let occ: Vec<usize> = set
            .modes()
            .iter()
            .enumerate()
            .filter(|(_, mode)| match self {
                VacuumSpec::Standard => mode.is_negative(),
                VacuumSpec::Band(band) => band.contains(mode, set.params().mass),
            })
            .map(|(i, _)| i)
            .collect();
        if occ.is_empty() {
            if let VacuumSpec::Band(band) = self {
                return Err(Error::EmptyBand { band_depth: band.band_depth });
            }
        }
        Ok(occ)
    }
}

fn spinor(momentum: f64, sign: EnergySign, spin: Spin, mass: f64, ring_length: f64) -> [f64; 4] {
    let energy = momentum.hypot(mass);
    if sign == EnergySign::Negative && momentum == 0.0 {
        // The closed form is 0/0 at rest; these are its limits up to phase.
        let inv = 1.0 / ring_length.sqrt();
        return match spin {
            Spin::One => [0.0, 0.0, inv, 0.0],
            Spin::Two => [0.0, 0.0, 0.0, -inv],
        };
    }
    let signed = sign.factor() * energy;
    // λE + m, computed without cancellation: for λ = −1 this is
    // m − E = −p²/(E + m) exactly.
    let shifted = match sign {
        EnergySign::Positive => energy + mass,
        EnergySign::Negative => -(momentum * momentum) / (energy + mass),
    };
    let prefactor = (shifted / (2.0 * signed * ring_length)).sqrt();
    let lower = momentum / shifted;
    match spin {
        Spin::One => [prefactor, 0.0, prefactor * lower, 0.0],
        Spin::Two => [0.0, prefactor, 0.0, -prefactor * lower],
    }
}

/// All modes of the truncation, ordered n ascending, then λ = +1 before −1,
/// then spin 1 before 2. Count is 4(2·n_max + 1).
pub fn build_modes(params: &ModeParams) -> Result<Vec<Mode>> {
    params.validate()?;
    let n_max = params.momentum_index_cutoff;
    let mut modes = Vec::with_capacity(4 * (2 * n_max as usize + 1));
    for index in -n_max..=n_max {
        let momentum = params.momentum(index);
        let energy = params.energy(momentum);
        for sign in [EnergySign::Positive, EnergySign::Negative] {
            for spin in [Spin::One, Spin::Two] {
                modes.push(Mode {
                    index,
                    momentum,
                    energy,
                    sign,
                    spin,
                    spinor: spinor(momentum, sign, spin, params.mass, params.ring_length),
                });
            }
        }
    }
    Ok(modes)
}

/// An ordered set of modes sharing one `ModeParams`. Usually the full
/// truncation; exact Fock work runs on small subsets.
#[derive(Clone, Debug)]
pub struct ModeSet {
    params: ModeParams,
    modes: Vec<Mode>,
    lookup: std::collections::HashMap<(i32, EnergySign, Spin), usize>,
}

impl ModeSet {
    pub fn full(params: ModeParams) -> Result<Self> {
        let modes = build_modes(&params)?;
        Ok(Self::assemble(params, modes))
    }

    pub fn from_modes(params: ModeParams, modes: Vec<Mode>) -> Result<Self> {
        params.validate()?;
        if modes.is_empty() {
            return Err(Error::InvalidParams("mode set may not be empty".into()));
        }
        for mode in &modes {
            if mode.index.abs() > params.momentum_index_cutoff {
                return Err(Error::InvalidParams(format!(
                    "mode index {} lies outside the cutoff {}",
                    mode.index, params.momentum_index_cutoff
                )));
            }
        }
        Ok(Self::assemble(params, modes))
    }

    fn assemble(params: ModeParams, modes: Vec<Mode>) -> Self {
        let lookup = modes
            .iter()
            .enumerate()
            .map(|(i, mode)| ((mode.index, mode.sign, mode.spin), i))
            .collect();
        Self { params, modes, lookup }
    }

    /// New set keeping the modes that satisfy the predicate.
    pub fn subset<F: FnMut(&Mode) -> bool>(&self, mut keep: F) -> Result<Self> {
        let modes: Vec<Mode> = self.modes.iter().filter(|m| keep(m)).cloned().collect();
        Self::from_modes(self.params, modes)
    }

    pub fn params(&self) -> &ModeParams {
        &self.params
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn position(&self, index: i32, sign: EnergySign, spin: Spin) -> Option<usize> {
        self.lookup.get(&(index, sign, spin)).copied()
    }
}

/// Real inner product u† v of two constant spinors.
pub fn spinor_dot(u: &[f64; 4], v: &[f64; 4]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// u† α_z v.
pub fn alpha_z_sandwich(u: &[f64; 4], v: &[f64; 4]) -> f64 {
    let av = [v[2], -v[3], v[0], -v[1]];
    spinor_dot(u, &av)
}

fn wavenumber_steps(gauge: &GaugeProfile, params: &ModeParams) -> i32 {
    (gauge.wavenumber / params.lattice_spacing()).round() as i32
}

/// ∫_{−L/2}^{+L/2} φ_n† χ φ_m dz for χ = V₀ cos(kz).
///
/// Nonzero only when p_n − p_m = ±k, where it equals (V₀L/2)(u_n†u_m).
/// Real-symmetric here, returned as complex per the operator contract.
pub fn chi_matrix_element(
    n: &Mode,
    m: &Mode,
    gauge: &GaugeProfile,
    params: &ModeParams,
) -> Complex64 {
    let steps = wavenumber_steps(gauge, params);
    let diff = n.index - m.index;
    if diff == steps || diff == -steps {
        let overlap = spinor_dot(&n.spinor, &m.spinor);
        Complex64::new(0.5 * gauge.amplitude * params.ring_length * overlap, 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// The commutator weight (u_m† α_z u_n)(u_n† u_m).
///
/// Vanishes between different spin branches; for equal spins it equals
/// (1/2L²)(p_n/λ_nE_n + p_m/λ_mE_m), which the unit tests verify against
/// the brute-force spinor contraction.
pub fn current_pair_element(n: &Mode, m: &Mode) -> f64 {
    alpha_z_sandwich(&m.spinor, &n.spinor) * spinor_dot(&n.spinor, &m.spinor)
}

/// Bare current weight u_n† α_z u_m used when assembling the current
/// operator.
pub fn current_weight(n: &Mode, m: &Mode) -> f64 {
    alpha_z_sandwich(&n.spinor, &m.spinor)
}

/// ∫ φ_n† (−i α_z ∂χ/∂z) φ_m dz for χ = V₀ cos(kz): the gradient-coupling
/// matrix element, (±V₀kL/2)(u_n†α_z u_m) on the p_n − p_m = ±k shells.
pub fn gradient_matrix_element(
    n: &Mode,
    m: &Mode,
    gauge: &GaugeProfile,
    params: &ModeParams,
) -> Complex64 {
    let steps = wavenumber_steps(gauge, params);
    let diff = n.index - m.index;
    let direction = if diff == steps {
        1.0
    } else if diff == -steps {
        -1.0
    } else {
        return Complex64::new(0.0, 0.0);
    };
    let weight = alpha_z_sandwich(&n.spinor, &m.spinor);
    Complex64::new(
        direction * 0.5 * gauge.amplitude * gauge.wavenumber * params.ring_length * weight,
        0.0,
    )
}

/// Residual of the first-quantized identity
/// (λ_nE_n − λ_mE_m)·∫φ_n†χφ_m − ∫φ_n†(−iα_z ∂χ/∂z)φ_m,
/// which vanishes exactly for every mode pair of the same lattice.
pub fn first_quantized_commutator_check(
    n: &Mode,
    m: &Mode,
    gauge: &GaugeProfile,
    params: &ModeParams,
) -> Complex64 {
    let gap = n.signed_energy() - m.signed_energy();
    gap * chi_matrix_element(n, m, gauge, params) - gradient_matrix_element(n, m, gauge, params)
}

/// Deviation of Σ_{λ,s} u u† from (1/L)·1₄ on one momentum shell
/// (max-abs entry).
pub fn completeness_residual(params: &ModeParams, index: i32) -> f64 {
    let momentum = params.momentum(index);
    let mut sum = [[0.0f64; 4]; 4];
    for sign in [EnergySign::Positive, EnergySign::Negative] {
        for spin in [Spin::One, Spin::Two] {
            let u = spinor(momentum, sign, spin, params.mass, params.ring_length);
            for (r, row) in sum.iter_mut().enumerate() {
                for (c, entry) in row.iter_mut().enumerate() {
                    *entry += u[r] * u[c];
                }
            }
        }
    }
    let inv_l = 1.0 / params.ring_length;
    let mut worst = 0.0f64;
    for (r, row) in sum.iter().enumerate() {
        for (c, entry) in row.iter().enumerate() {
            let target = if r == c { inv_l } else { 0.0 };
            worst = worst.max((entry - target).abs());
        }
    }
    worst
}
