//! Exact second quantization on a small truncated mode set.
//!
//! The occupation-number basis over M modes (dimension 2^M, M ≤ 14) carries
//! explicit sparse matrices for the ladder operators with the standard
//! fermionic sign convention, the free Hamiltonian, the smeared charge
//! ρ̂_w, and the current Ĵ(z). Everything downstream — vacuum defining
//! relations, the double-commutator diagnostic, the equal-time
//! charge–current commutator — is plain matrix algebra, so equalities that
//! hold in the truncation hold to rounding, not to a model error.
//!
//! Two reference states are supported: the filled sea (every λ = −1 mode
//! occupied) and the band vacuum (negative modes occupied only down to
//! energy −(m+ΔE_w)). The band state admits basis states below its own
//! energy, which is exactly what lets the commutator sums cancel.

use nalgebra::DMatrix;
use num_complex::Complex64;
use sprs::{CsMat, TriMat};

use crate::error::{Error, Result};
use crate::harmonic::HarmonicCoefficient;
use crate::modes::{
    chi_matrix_element, current_weight, GaugeProfile, ModeParams, ModeSet, VacuumSpec,
};

/// Cap on the exact-Fock mode count (dimension 2^14 = 16384).
pub const MODE_CAP: usize = 14;

/// Cap on the dense matrix-exponential dimension (2^10).
pub const DENSE_EXP_DIM_CAP: usize = 1024;

/// Premise tolerance for the exponential commutator identity.
pub const EXP_IDENTITY_PREMISE_TOL: f64 = 1e-12;

/// Occupation-number basis over an ordered mode set.
#[derive(Clone, Debug)]
pub struct FockBasis {
    set: ModeSet,
}

impl FockBasis {
    pub fn new(set: ModeSet) -> Result<Self> {
        if set.len() > MODE_CAP {
            return Err(Error::OversizeBasis { modes: set.len(), cap: MODE_CAP });
        }
        Ok(Self { set })
    }

    pub fn dimension(&self) -> usize {
        1 << self.set.len()
    }

    pub fn num_modes(&self) -> usize {
        self.set.len()
    }

    pub fn set(&self) -> &ModeSet {
        &self.set
    }

    pub fn modes(&self) -> &[crate::modes::Mode] {
        self.set.modes()
    }

    pub fn params(&self) -> &ModeParams {
        self.set.params()
    }
}

/// A sparse operator on the occupation basis.
#[derive(Clone, Debug)]
pub struct FockOperator {
    pub matrix: CsMat<Complex64>,
    pub label: String,
}

fn jw_sign(state: usize, mode: usize) -> f64 {
    if (state & ((1 << mode) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl FockOperator {
    pub fn from_matrix(matrix: CsMat<Complex64>, label: impl Into<String>) -> Self {
        Self { matrix, label: label.into() }
    }

    pub fn zero(dim: usize, label: impl Into<String>) -> Self {
        Self::from_matrix(CsMat::zero((dim, dim)), label)
    }

    pub fn identity(dim: usize, scale: Complex64, label: impl Into<String>) -> Self {
        let eye: CsMat<Complex64> = CsMat::eye(dim);
        Self::from_matrix(eye.map(|v| v * scale), label)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::from_matrix(self.matrix.map(|v| v * factor), self.label.clone())
    }

    /// Self plus a c-number: A + c·1.
    pub fn shifted(&self, constant: Complex64) -> Self {
        let eye: CsMat<Complex64> = CsMat::eye(self.dim());
        Self::from_matrix(
            &self.matrix + &eye.map(|v| v * constant),
            format!("{}+c", self.label),
        )
    }

    pub fn adjoint(&self) -> Self {
        let transposed = self.matrix.transpose_view().to_csr();
        Self::from_matrix(transposed.map(|v| v.conj()), format!("{}^", self.label))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_matrix(&self.matrix + &other.matrix, self.label.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_matrix(&self.matrix - &other.matrix, self.label.clone())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self::from_matrix(
            &self.matrix * &other.matrix,
            format!("{}·{}", self.label, other.label),
        )
    }

    /// [self, other]
    pub fn commutator(&self, other: &Self) -> Self {
        let ab = &self.matrix * &other.matrix;
        let ba = &other.matrix * &self.matrix;
        Self::from_matrix(&ab - &ba, format!("[{},{}]", self.label, other.label))
    }

    /// {self, other}
    pub fn anticommutator(&self, other: &Self) -> Self {
        let ab = &self.matrix * &other.matrix;
        let ba = &other.matrix * &self.matrix;
        Self::from_matrix(&ab + &ba, format!("{{{},{}}}", self.label, other.label))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix
            .iter()
            .map(|(v, _)| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Deviation from the nearest scalar multiple of the identity:
    /// returns (tr/dim, ‖A − (tr/dim)·1‖_F).
    pub fn deviation_from_scalar(&self) -> (Complex64, f64) {
        let dim = self.dim();
        let mut trace = Complex64::new(0.0, 0.0);
        for (v, (r, c)) in self.matrix.iter() {
            if r == c {
                trace += v;
            }
        }
        let scalar = trace / dim as f64;
        let mut sum = 0.0;
        let mut seen_diagonal = 0usize;
        for (v, (r, c)) in self.matrix.iter() {
            if r == c {
                sum += (v - scalar).norm_sqr();
                seen_diagonal += 1;
            } else {
                sum += v.norm_sqr();
            }
        }
        // Structurally-missing diagonal entries deviate by |scalar| each.
        sum += (dim - seen_diagonal) as f64 * scalar.norm_sqr();
        (scalar, sum.sqrt())
    }

    pub fn apply(&self, vector: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.matrix.rows()];
        for (row, row_vec) in self.matrix.outer_iterator().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (col, value) in row_vec.iter() {
                acc += value * vector[col];
            }
            out[row] = acc;
        }
        out
    }

    /// ⟨v|A|v⟩ for a unit vector v.
    pub fn expectation(&self, vector: &[Complex64]) -> Complex64 {
        let applied = self.apply(vector);
        vector
            .iter()
            .zip(&applied)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        let mut dense = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for (v, (r, c)) in self.matrix.iter() {
            dense[(r, c)] += v;
        }
        dense
    }
}

/// Assemble Σ_terms w·a_n†a_m + constant·1 in one pass over the basis.
fn one_body_operator(
    basis: &FockBasis,
    terms: &[(usize, usize, Complex64)],
    constant: Complex64,
    label: impl Into<String>,
) -> FockOperator {
    let dim = basis.dimension();
    let mut tri = TriMat::new((dim, dim));
    if constant.norm() > 0.0 {
        for s in 0..dim {
            tri.add_triplet(s, s, constant);
        }
    }
    for &(create, destroy, weight) in terms {
        if weight.norm() == 0.0 {
            continue;
        }
        let destroy_bit = 1usize << destroy;
        let create_bit = 1usize << create;
        for s in 0..dim {
            if s & destroy_bit == 0 {
                continue;
            }
            if create == destroy {
                tri.add_triplet(s, s, weight);
                continue;
            }
            let intermediate = s & !destroy_bit;
            if intermediate & create_bit != 0 {
                continue;
            }
            let sign = jw_sign(s, destroy) * jw_sign(intermediate, create);
            tri.add_triplet(intermediate | create_bit, s, weight * sign);
        }
    }
    FockOperator::from_matrix(tri.to_csr(), label)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderKind {
    Create,
    Destroy,
}

/// Ladder operator for one mode, with the sign (−1)^(occupied modes
/// preceding it in the fixed order).
pub fn ladder(basis: &FockBasis, mode: usize, kind: LadderKind) -> Result<FockOperator> {
    if mode >= basis.num_modes() {
        return Err(Error::UnknownMode(mode));
    }
    let dim = basis.dimension();
    let bit = 1usize << mode;
    let mut tri = TriMat::new((dim, dim));
    for s in 0..dim {
        match kind {
            LadderKind::Create => {
                if s & bit == 0 {
                    tri.add_triplet(s | bit, s, Complex64::new(jw_sign(s, mode), 0.0));
                }
            }
            LadderKind::Destroy => {
                if s & bit != 0 {
                    tri.add_triplet(s & !bit, s, Complex64::new(jw_sign(s, mode), 0.0));
                }
            }
        }
    }
    let label = match kind {
        LadderKind::Create => format!("a{mode}^"),
        LadderKind::Destroy => format!("a{mode}"),
    };
    Ok(FockOperator::from_matrix(tri.to_csr(), label))
}

/// The occupation bitstring of a vacuum on this basis.
pub fn vacuum_state_index(spec: &VacuumSpec, basis: &FockBasis) -> Result<usize> {
    let occ = spec.occupied(basis.set())?;
    Ok(occ.iter().fold(0usize, |acc, &i| acc | (1 << i)))
}

/// Unit basis vector of the vacuum, verified against its defining
/// annihilation conditions by applying the ladder matrices.
pub fn build_vacuum(spec: &VacuumSpec, basis: &FockBasis) -> Result<Vec<Complex64>> {
    let occ = spec.occupied(basis.set())?;
    let state = occ.iter().fold(0usize, |acc, &i| acc | (1 << i));
    let mut vacuum = vec![Complex64::new(0.0, 0.0); basis.dimension()];
    vacuum[state] = Complex64::new(1.0, 0.0);
    for mode in 0..basis.num_modes() {
        let kind = if occ.contains(&mode) {
            LadderKind::Create
        } else {
            LadderKind::Destroy
        };
        let op = ladder(basis, mode, kind)?;
        let image = op.apply(&vacuum);
        let norm: f64 = image.iter().map(|v| v.norm_sqr()).sum();
        assert!(
            norm == 0.0,
            "vacuum defining relation violated for mode {mode}"
        );
    }
    Ok(vacuum)
}

/// ξ_R: the c-number making the chosen vacuum an exact zero-energy state.
pub fn renormalization_constant(spec: &VacuumSpec, set: &ModeSet) -> Result<f64> {
    let occ = spec.occupied(set)?;
    Ok(occ.iter().map(|&i| set.modes()[i].signed_energy()).sum())
}

/// Ĥ₀ = Σ_n λ_nE_n a_n†a_n − ξ_R·1, diagonal on the occupation basis.
pub fn build_h0(basis: &FockBasis, vacuum: &VacuumSpec) -> Result<FockOperator> {
    let xi = renormalization_constant(vacuum, basis.set())?;
    let terms: Vec<(usize, usize, Complex64)> = basis
        .modes()
        .iter()
        .enumerate()
        .map(|(i, mode)| (i, i, Complex64::new(mode.signed_energy(), 0.0)))
        .collect();
    Ok(one_body_operator(
        basis,
        &terms,
        Complex64::new(-xi, 0.0),
        "H0",
    ))
}

/// ρ̂_w = e Σ_{m,n} (∫φ_n†χφ_m)(a_n†a_m − δ_mn/2).
pub fn build_rho_w(basis: &FockBasis, gauge: &GaugeProfile) -> Result<FockOperator> {
    gauge.lattice_index(basis.params())?;
    let e = basis.params().charge;
    let modes = basis.modes();
    let mut terms = Vec::new();
    let mut diagonal_sum = 0.0;
    for (n, mode_n) in modes.iter().enumerate() {
        for (m, mode_m) in modes.iter().enumerate() {
            let element = chi_matrix_element(mode_n, mode_m, gauge, basis.params());
            if element.norm() > 0.0 {
                terms.push((n, m, element * e));
                if n == m {
                    diagonal_sum += element.re;
                }
            }
        }
    }
    Ok(one_body_operator(
        basis,
        &terms,
        Complex64::new(-0.5 * e * diagonal_sum, 0.0),
        "rho_w",
    ))
}

/// Ĵ(z) = e Σ_{m,n} (u_n†α_z u_m) e^{i(p_m−p_n)z} (a_n†a_m − δ_mn/2) at a
/// fixed position.
pub fn build_current(basis: &FockBasis, z: f64) -> FockOperator {
    let e = basis.params().charge;
    let modes = basis.modes();
    let mut terms = Vec::new();
    let mut diagonal_sum = 0.0;
    for (n, mode_n) in modes.iter().enumerate() {
        for (m, mode_m) in modes.iter().enumerate() {
            let weight = current_weight(mode_n, mode_m);
            if weight == 0.0 {
                continue;
            }
            let phase = Complex64::new(0.0, (mode_m.momentum - mode_n.momentum) * z).exp();
            terms.push((n, m, phase * (e * weight)));
            if n == m {
                diagonal_sum += weight;
            }
        }
    }
    one_body_operator(
        basis,
        &terms,
        Complex64::new(-0.5 * e * diagonal_sum, 0.0),
        format!("J(z={z})"),
    )
}

/// Harmonic component Ĵ_d of the current: the operator coefficient of
/// e^{i·d·(2π/L)·z} in Ĵ(z), so Ĵ(z) = Σ_d e^{i d (2π/L) z} Ĵ_d.
pub fn current_harmonic(basis: &FockBasis, steps: i32) -> FockOperator {
    let e = basis.params().charge;
    let modes = basis.modes();
    let mut terms = Vec::new();
    let mut diagonal_sum = 0.0;
    for (n, mode_n) in modes.iter().enumerate() {
        for (m, mode_m) in modes.iter().enumerate() {
            if mode_m.index - mode_n.index != steps {
                continue;
            }
            let weight = current_weight(mode_n, mode_m);
            if weight == 0.0 {
                continue;
            }
            terms.push((n, m, Complex64::new(e * weight, 0.0)));
            if n == m {
                diagonal_sum += weight;
            }
        }
    }
    let constant = if steps == 0 {
        Complex64::new(-0.5 * e * diagonal_sum, 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    };
    one_body_operator(basis, &terms, constant, format!("J[{steps}]"))
}

/// The gradient-flux operator ∫ Ĵ(z) ∂χ/∂z dz; the first-quantized
/// identity makes [Ĥ₀, ρ̂_w] = −i·(this) exact on the truncation.
pub fn current_flux(basis: &FockBasis, gauge: &GaugeProfile) -> Result<FockOperator> {
    let steps = gauge.lattice_index(basis.params())?;
    let e = basis.params().charge;
    let factor = 0.5 * gauge.amplitude * gauge.wavenumber * basis.params().ring_length;
    let modes = basis.modes();
    let mut terms = Vec::new();
    for (n, mode_n) in modes.iter().enumerate() {
        for (m, mode_m) in modes.iter().enumerate() {
            // Δ = p_m − p_n in lattice steps.
            let diff = mode_m.index - mode_n.index;
            let direction = if diff == steps {
                1.0
            } else if diff == -steps {
                -1.0
            } else {
                continue;
            };
            let weight = current_weight(mode_n, mode_m);
            if weight == 0.0 {
                continue;
            }
            terms.push((n, m, Complex64::new(0.0, -direction * factor * e * weight)));
        }
    }
    Ok(one_body_operator(
        basis,
        &terms,
        Complex64::new(0.0, 0.0),
        "flux",
    ))
}

fn real_expectation(value: Complex64, context: &str) -> f64 {
    debug_assert!(
        value.im.abs() <= 1e-10 * value.re.abs().max(1.0),
        "{context}: unexpected imaginary part {value}"
    );
    value.re
}

/// ⟨vac| ρ̂_w Ĥ₀ ρ̂_w |vac⟩ by matrix application.
pub fn rho_h_rho_expectation(
    vacuum: &VacuumSpec,
    gauge: &GaugeProfile,
    basis: &FockBasis,
) -> Result<f64> {
    let h0 = build_h0(basis, vacuum)?;
    let rho = build_rho_w(basis, gauge)?;
    let vac = build_vacuum(vacuum, basis)?;
    let rv = rho.apply(&vac);
    let hrv = h0.apply(&rv);
    let value: Complex64 = rv.iter().zip(&hrv).map(|(a, b)| a.conj() * b).sum();
    Ok(real_expectation(value, "rho-H-rho"))
}

/// (1/2)⟨vac|[ρ̂_w,[Ĥ₀,ρ̂_w]]|vac⟩ by explicit matrix commutators.
pub fn double_commutator_expectation(
    vacuum: &VacuumSpec,
    gauge: &GaugeProfile,
    basis: &FockBasis,
) -> Result<f64> {
    let h0 = build_h0(basis, vacuum)?;
    let rho = build_rho_w(basis, gauge)?;
    let vac = build_vacuum(vacuum, basis)?;
    Ok(half_double_commutator_value(&rho, &h0, &vac))
}

/// (1/2)⟨v|[ρ,[H,ρ]]|v⟩ for caller-supplied operators (used for the
/// c-number shift-invariance properties).
pub fn half_double_commutator_value(
    rho: &FockOperator,
    h: &FockOperator,
    vector: &[Complex64],
) -> f64 {
    let inner = h.commutator(rho);
    let outer = rho.commutator(&inner);
    real_expectation(outer.expectation(vector) * 0.5, "double commutator")
}

/// ⟨v|[A,B]|v⟩ by matrix application.
pub fn commutator_expectation(
    a: &FockOperator,
    b: &FockOperator,
    vector: &[Complex64],
) -> Complex64 {
    let bv = b.apply(vector);
    let abv = a.apply(&bv);
    let av = a.apply(vector);
    let bav = b.apply(&av);
    vector
        .iter()
        .zip(abv.iter().zip(&bav))
        .map(|(v, (x, y))| v.conj() * (x - y))
        .sum()
}

/// ⟨vac|[Ĵ_d, ρ̂_w]|vac⟩ for every harmonic d present in the current.
pub fn schwinger_harmonic_amplitudes(
    vacuum: &VacuumSpec,
    gauge: &GaugeProfile,
    basis: &FockBasis,
) -> Result<Vec<(i32, Complex64)>> {
    let rho = build_rho_w(basis, gauge)?;
    let vac = build_vacuum(vacuum, basis)?;
    let mut diffs: Vec<i32> = Vec::new();
    for n in basis.modes() {
        for m in basis.modes() {
            let d = m.index - n.index;
            if current_weight(n, m) != 0.0 && !diffs.contains(&d) {
                diffs.push(d);
            }
        }
    }
    diffs.sort_unstable();
    Ok(diffs
        .into_iter()
        .map(|d| {
            let j_d = current_harmonic(basis, d);
            (d, commutator_expectation(&j_d, &rho, &vac))
        })
        .collect())
}

/// Equal-time commutator ⟨vac|[Ĵ(z), ρ̂_w]|vac⟩ accumulated symbolically in
/// z. The cos(kz) selection rule confines it to e^{±ikz}; the commutator is
/// purely imaginary, and its imaginary part is returned as a real harmonic
/// (the commutator itself is i·F(z)).
pub fn schwinger_expectation(
    vacuum: &VacuumSpec,
    gauge: &GaugeProfile,
    basis: &FockBasis,
) -> Result<HarmonicCoefficient> {
    let steps = gauge.lattice_index(basis.params())?;
    let rho = build_rho_w(basis, gauge)?;
    let vac = build_vacuum(vacuum, basis)?;
    let plus = commutator_expectation(&current_harmonic(basis, steps), &rho, &vac);
    let minus = commutator_expectation(&current_harmonic(basis, -steps), &rho, &vac);
    debug_assert!(
        (minus + plus.conj()).norm() <= 1e-12 * plus.norm().max(1.0),
        "commutator harmonics are not anti-conjugate: {plus} vs {minus}"
    );
    Ok(HarmonicCoefficient::new(
        plus * Complex64::new(0.0, -1.0),
        gauge.wavenumber,
    ))
}

/// Residual of the double-commutator identity
/// [[A,B],[C,D]] = 2[A,D]{B,C} − 2[B,D]{A,C} − 2[A,C]{B,D} + 2[B,C]{A,D},
/// valid when the four cross anticommutators are c-numbers. The
/// anticommutator preconditions are checked numerically first.
pub fn field_commutator_identity_check(
    a: &FockOperator,
    b: &FockOperator,
    c: &FockOperator,
    d: &FockOperator,
    precondition_tol: f64,
) -> Result<f64> {
    for (left, right) in [(a, c), (a, d), (b, c), (b, d)] {
        let anti = left.anticommutator(right);
        let (_, deviation) = anti.deviation_from_scalar();
        if deviation > precondition_tol {
            return Err(Error::NotScalarAnticommutator {
                left: left.label.clone(),
                right: right.label.clone(),
                deviation,
            });
        }
    }
    let lhs = a.commutator(b).commutator(&c.commutator(d));
    let two = Complex64::new(2.0, 0.0);
    let rhs = a
        .commutator(d)
        .matmul(&b.anticommutator(c))
        .scaled(two)
        .sub(&b.commutator(d).matmul(&a.anticommutator(c)).scaled(two))
        .sub(&a.commutator(c).matmul(&b.anticommutator(d)).scaled(two))
        .add(&b.commutator(c).matmul(&a.anticommutator(d)).scaled(two));
    Ok(lhs.sub(&rhs).frobenius_norm())
}

fn dense_exp(op: &FockOperator) -> Result<DMatrix<Complex64>> {
    if op.dim() > DENSE_EXP_DIM_CAP {
        return Err(Error::InvalidParams(format!(
            "dense exponential capped at dimension {DENSE_EXP_DIM_CAP}, got {}",
            op.dim()
        )));
    }
    Ok(op.to_dense().exp())
}

/// Residual of ‖[H, exp(−iρ)] + exp(−iρ)·K‖ under the premises
/// [H,ρ] = −iK and [ρ,K] = 0 (checked numerically; violation is an error
/// carrying both premise residuals). The exponential is a dense
/// scaling-and-squaring evaluation, capped at dimension 2^10.
pub fn exponential_commutator_identity_check(
    h: &FockOperator,
    rho: &FockOperator,
    flux: &FockOperator,
) -> Result<f64> {
    let premise_one = h
        .commutator(rho)
        .add(&flux.scaled(Complex64::new(0.0, 1.0)))
        .frobenius_norm();
    let premise_two = rho.commutator(flux).frobenius_norm();
    if premise_one > EXP_IDENTITY_PREMISE_TOL || premise_two > EXP_IDENTITY_PREMISE_TOL {
        return Err(Error::PremiseViolated {
            commutator_residual: premise_one,
            exchange_residual: premise_two,
            tolerance: EXP_IDENTITY_PREMISE_TOL,
        });
    }
    let minus_i_rho = rho.scaled(Complex64::new(0.0, -1.0));
    let exp = dense_exp(&minus_i_rho)?;
    let h_dense = h.to_dense();
    let k_dense = flux.to_dense();
    let residual = (&h_dense * &exp) - (&exp * &h_dense) + (&exp * &k_dense);
    Ok(residual.norm())
}

/// Premise residuals of the physical pair (Ĥ₀, ρ̂_w) with K the gradient
/// flux: the first vanishes identically on the truncation, the second is
/// the truncated charge–flux commutator, whose size is the whole story.
pub fn physical_premise_residuals(
    vacuum: &VacuumSpec,
    gauge: &GaugeProfile,
    basis: &FockBasis,
) -> Result<(f64, f64)> {
    let h0 = build_h0(basis, vacuum)?;
    let rho = build_rho_w(basis, gauge)?;
    let flux = current_flux(basis, gauge)?;
    let first = h0
        .commutator(&rho)
        .add(&flux.scaled(Complex64::new(0.0, 1.0)))
        .frobenius_norm();
    let second = rho.commutator(&flux).frobenius_norm();
    Ok((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{EnergySign, Spin};

    fn params(n_max: i32) -> ModeParams {
        ModeParams {
            mass: 1.0,
            ring_length: 2.0 * std::f64::consts::PI,
            momentum_index_cutoff: n_max,
            charge: 1.0,
        }
    }

    fn full_basis(n_max: i32) -> FockBasis {
        FockBasis::new(ModeSet::full(params(n_max)).unwrap()).unwrap()
    }

    fn small_basis(n_modes: usize) -> FockBasis {
        // Spin-1 positive modes only: enough structure for pure CAR checks.
        let set = ModeSet::full(params(3)).unwrap();
        let mut kept = 0;
        let subset = set
            .subset(|m| {
                if m.spin == Spin::One && m.sign == EnergySign::Positive {
                    kept += 1;
                    kept <= n_modes
                } else {
                    false
                }
            })
            .unwrap();
        assert_eq!(subset.len(), n_modes);
        FockBasis::new(subset).unwrap()
    }

    fn gauge_j(p: &ModeParams, j: i32) -> GaugeProfile {
        GaugeProfile::new(1.0, p.momentum(j)).unwrap()
    }

    #[test]
    fn single_mode_car() {
        let basis = small_basis(1);
        let a = ladder(&basis, 0, LadderKind::Destroy).unwrap();
        let ad = ladder(&basis, 0, LadderKind::Create).unwrap();
        let anti = ad.anticommutator(&a);
        let eye = FockOperator::identity(2, Complex64::new(1.0, 0.0), "1");
        assert_eq!(anti.sub(&eye).frobenius_norm(), 0.0);
    }

    #[test]
    fn two_mode_antisymmetry() {
        let basis = small_basis(2);
        let a1 = ladder(&basis, 0, LadderKind::Destroy).unwrap();
        let a2 = ladder(&basis, 1, LadderKind::Destroy).unwrap();
        let anti = a1.matmul(&a2).add(&a2.matmul(&a1));
        assert_eq!(anti.frobenius_norm(), 0.0);
    }

    #[test]
    fn exhaustive_car_small_bases() {
        for modes in [1usize, 2, 3] {
            let basis = small_basis(modes);
            let dim = basis.dimension();
            for n in 0..modes {
                for m in 0..modes {
                    let an = ladder(&basis, n, LadderKind::Destroy).unwrap();
                    let am = ladder(&basis, m, LadderKind::Destroy).unwrap();
                    let adn = ladder(&basis, n, LadderKind::Create).unwrap();
                    let mixed = adn.anticommutator(&am);
                    let expected = if n == m {
                        FockOperator::identity(dim, Complex64::new(1.0, 0.0), "1")
                    } else {
                        FockOperator::zero(dim, "0")
                    };
                    assert_eq!(mixed.sub(&expected).frobenius_norm(), 0.0);
                    assert_eq!(an.anticommutator(&am).frobenius_norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn unknown_mode_rejected() {
        let basis = small_basis(2);
        assert!(matches!(
            ladder(&basis, 5, LadderKind::Destroy),
            Err(Error::UnknownMode(5))
        ));
    }

    #[test]
    fn oversize_basis_rejected() {
        let p = ModeParams { momentum_index_cutoff: 4, ..params(4) };
        let set = ModeSet::full(p).unwrap(); // 36 modes
        assert!(matches!(
            FockBasis::new(set),
            Err(Error::OversizeBasis { .. })
        ));
    }

    #[test]
    fn standard_vacuum_occupies_negative_modes() {
        // Two positive and two negative modes.
        let set = ModeSet::full(params(1))
            .unwrap()
            .subset(|m| m.spin == Spin::One && (m.index == 0 || m.index == 1))
            .unwrap();
        assert_eq!(set.len(), 4);
        let basis = FockBasis::new(set).unwrap();
        let idx = vacuum_state_index(&VacuumSpec::Standard, &basis).unwrap();
        let expected: usize = basis
            .modes()
            .iter()
            .enumerate()
            .filter(|(_, m)| m.is_negative())
            .map(|(i, _)| 1usize << i)
            .sum();
        assert_eq!(idx, expected);
        assert_eq!(expected.count_ones(), 2);
        build_vacuum(&VacuumSpec::Standard, &basis).unwrap();
    }

    #[test]
    fn deep_band_equals_standard_vacuum() {
        let basis = full_basis(1);
        // Deepest retained negative energy is √2; any depth beyond it
        // occupies the whole sea.
        let deep = VacuumSpec::band(5.0).unwrap();
        assert_eq!(
            vacuum_state_index(&deep, &basis).unwrap(),
            vacuum_state_index(&VacuumSpec::Standard, &basis).unwrap()
        );
    }

    #[test]
    fn band_vacuum_defining_relations() {
        let basis = full_basis(1);
        let band = VacuumSpec::band(0.2).unwrap();
        // build_vacuum internally asserts the ladder conditions.
        let vac = build_vacuum(&band, &basis).unwrap();
        let norm: f64 = vac.iter().map(|v| v.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn h0_annihilates_vacuum_and_grades_excitations() {
        let basis = full_basis(1);
        for vacuum in [VacuumSpec::Standard, VacuumSpec::band(0.2).unwrap()] {
            let h0 = build_h0(&basis, &vacuum).unwrap();
            let vac = build_vacuum(&vacuum, &basis).unwrap();
            let hv = h0.apply(&vac);
            assert!(hv.iter().map(|v| v.norm()).fold(0.0, f64::max) < 1e-12);
        }
        // A particle added above the standard sea carries +E_n.
        let h0 = build_h0(&basis, &VacuumSpec::Standard).unwrap();
        let vac = build_vacuum(&VacuumSpec::Standard, &basis).unwrap();
        let n = basis
            .modes()
            .iter()
            .position(|m| m.index == 1 && m.sign == EnergySign::Positive && m.spin == Spin::One)
            .unwrap();
        let excited = ladder(&basis, n, LadderKind::Create).unwrap().apply(&vac);
        let h_exc = h0.apply(&excited);
        let energy = basis.modes()[n].energy;
        for (a, b) in excited.iter().zip(&h_exc) {
            assert!((b - a * energy).norm() < 1e-12);
        }
    }

    #[test]
    fn band_hole_pair_has_negative_energy() {
        let basis = full_basis(1);
        let band = VacuumSpec::band(0.2).unwrap();
        let h0 = build_h0(&basis, &band).unwrap();
        let vac = build_vacuum(&band, &basis).unwrap();
        // Move a band particle (rest mode) beneath the band (index ±1).
        let from = basis
            .modes()
            .iter()
            .position(|m| m.index == 0 && m.is_negative() && m.spin == Spin::One)
            .unwrap();
        let to = basis
            .modes()
            .iter()
            .position(|m| m.index == 1 && m.is_negative() && m.spin == Spin::One)
            .unwrap();
        let moved = ladder(&basis, to, LadderKind::Create)
            .unwrap()
            .apply(&ladder(&basis, from, LadderKind::Destroy).unwrap().apply(&vac));
        let h_moved = h0.apply(&moved);
        let expected = basis.modes()[to].signed_energy() - basis.modes()[from].signed_energy();
        assert!(expected < 0.0);
        for (a, b) in moved.iter().zip(&h_moved) {
            assert!((b - a * expected).norm() < 1e-12);
        }
    }

    #[test]
    fn rho_w_zero_cases_and_hermiticity() {
        let basis = full_basis(1);
        let p = *basis.params();
        let zero_amp = GaugeProfile::new(0.0, p.momentum(1)).unwrap();
        assert_eq!(build_rho_w(&basis, &zero_amp).unwrap().frobenius_norm(), 0.0);
        // Wavenumber beyond every retained momentum gap: empty selection rule.
        let wide = GaugeProfile::new(1.0, p.momentum(3)).unwrap();
        assert_eq!(build_rho_w(&basis, &wide).unwrap().frobenius_norm(), 0.0);
        let rho = build_rho_w(&basis, &gauge_j(&p, 1)).unwrap();
        assert!(rho.sub(&rho.adjoint()).frobenius_norm() < 1e-14);
    }

    #[test]
    fn current_is_hermitian_and_sea_current_uniform() {
        let basis = full_basis(1);
        for z in [-1.3, 0.0, 0.7, 2.0] {
            let current = build_current(&basis, z);
            assert!(current.sub(&current.adjoint()).frobenius_norm() < 1e-12);
        }
        let vac = build_vacuum(&VacuumSpec::Standard, &basis).unwrap();
        let sea_values: Vec<f64> = [-2.0, -0.5, 0.0, 1.1]
            .iter()
            .map(|&z| real_expectation(build_current(&basis, z).expectation(&vac), "J"))
            .collect();
        for value in &sea_values {
            assert!((value - sea_values[0]).abs() < 1e-13);
        }
    }

    #[test]
    fn single_particle_current() {
        let basis = full_basis(1);
        let vac = build_vacuum(&VacuumSpec::Standard, &basis).unwrap();
        let n = basis
            .modes()
            .iter()
            .position(|m| m.index == 1 && m.sign == EnergySign::Positive && m.spin == Spin::Two)
            .unwrap();
        let state = ladder(&basis, n, LadderKind::Create).unwrap().apply(&vac);
        let current = build_current(&basis, 0.4);
        let vac_current = real_expectation(current.expectation(&vac), "Jvac");
        let particle_current = real_expectation(current.expectation(&state), "J");
        let mode = &basis.modes()[n];
        let expected = basis.params().charge * mode.momentum
            / (mode.energy * basis.params().ring_length);
        assert!((particle_current - vac_current - expected).abs() < 1e-13);
    }

    #[test]
    fn current_harmonics_reassemble_current() {
        let basis = full_basis(1);
        let z = 0.83;
        let mut assembled = FockOperator::zero(basis.dimension(), "sum");
        for steps in -2..=2 {
            let harmonic = current_harmonic(&basis, steps);
            let phase = Complex64::new(
                0.0,
                f64::from(steps) * basis.params().lattice_spacing() * z,
            )
            .exp();
            assembled = assembled.add(&harmonic.scaled(phase));
        }
        assert!(assembled.sub(&build_current(&basis, z)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn double_commutator_standard_vacuum_frozen_value() {
        let basis = full_basis(1);
        let p = *basis.params();
        let gauge = gauge_j(&p, 1);
        let dc =
            double_commutator_expectation(&VacuumSpec::Standard, &gauge, &basis).unwrap();
        let rhr = rho_h_rho_expectation(&VacuumSpec::Standard, &gauge, &basis).unwrap();
        // Exact value 1/√2 for this truncation (four connected pairs of
        // weight 1/(8√2) per spin).
        let expected = 0.5f64.sqrt();
        assert!((dc - expected).abs() < 1e-13, "dc = {dc}");
        assert!((dc - rhr).abs() < 1e-13);
        assert!(dc > 0.0);
    }

    #[test]
    fn double_commutator_zero_cases() {
        let basis = full_basis(1);
        let p = *basis.params();
        let zero_amp = GaugeProfile::new(0.0, p.momentum(1)).unwrap();
        assert_eq!(
            double_commutator_expectation(&VacuumSpec::Standard, &zero_amp, &basis).unwrap(),
            0.0
        );
        // Band vacuum with the ±k neighborhoods inside the truncation.
        let gauge = gauge_j(&p, 1);
        let band = VacuumSpec::band(0.2).unwrap();
        let dc = double_commutator_expectation(&band, &gauge, &basis).unwrap();
        let rhr = rho_h_rho_expectation(&band, &gauge, &basis).unwrap();
        assert!(dc.abs() < 1e-13, "band dc = {dc}");
        assert!(rhr.abs() < 1e-13, "band rhr = {rhr}");
    }

    #[test]
    fn schwinger_expectation_values() {
        let basis = full_basis(1);
        let p = *basis.params();
        let gauge = gauge_j(&p, 1);
        let standard =
            schwinger_expectation(&VacuumSpec::Standard, &gauge, &basis).unwrap();
        // e^{+ikz} amplitude of the commutator is √2/(2π) here, so the
        // imaginary part carries sin coefficient √2/π.
        let expected = std::f64::consts::SQRT_2 / std::f64::consts::PI;
        assert!(
            (standard.sin_coefficient() - expected).abs() < 1e-13,
            "sin coefficient {}",
            standard.sin_coefficient()
        );
        assert!(standard.cos_coefficient().abs() < 1e-13);

        let band = schwinger_expectation(&VacuumSpec::band(0.2).unwrap(), &gauge, &basis)
            .unwrap();
        assert!(band.magnitude() < 1e-13);

        let zero_amp = GaugeProfile::new(0.0, p.momentum(1)).unwrap();
        let silent = schwinger_expectation(&VacuumSpec::Standard, &zero_amp, &basis).unwrap();
        assert_eq!(silent.magnitude(), 0.0);
    }

    #[test]
    fn schwinger_harmonics_respect_selection_rule() {
        let basis = full_basis(1);
        let gauge = gauge_j(basis.params(), 1);
        for (steps, amplitude) in
            schwinger_harmonic_amplitudes(&VacuumSpec::Standard, &gauge, &basis).unwrap()
        {
            if steps.abs() != 1 {
                assert!(
                    amplitude.norm() < 1e-13,
                    "harmonic {steps} unexpectedly {amplitude}"
                );
            }
        }
    }

    #[test]
    fn commutators_ignore_c_number_shifts() {
        let basis = full_basis(1);
        let p = *basis.params();
        let gauge = gauge_j(&p, 1);
        let h0 = build_h0(&basis, &VacuumSpec::Standard).unwrap();
        let rho = build_rho_w(&basis, &gauge).unwrap();
        let vac = build_vacuum(&VacuumSpec::Standard, &basis).unwrap();
        let plain = half_double_commutator_value(&rho, &h0, &vac);
        let shifted = half_double_commutator_value(
            &rho.shifted(Complex64::new(-0.35, 0.0)),
            &h0.shifted(Complex64::new(2.2, 0.0)),
            &vac,
        );
        assert!((plain - shifted).abs() < 1e-12);

        let j_plus = current_harmonic(&basis, 1);
        let base = commutator_expectation(&j_plus, &rho, &vac);
        let moved = commutator_expectation(
            &j_plus.shifted(Complex64::new(0.9, 0.0)),
            &rho.shifted(Complex64::new(-1.4, 0.0)),
            &vac,
        );
        assert!((base - moved).norm() < 1e-12);
    }

    #[test]
    fn field_identity_exhaustive_on_ladders() {
        let basis = small_basis(2);
        let mut family = Vec::new();
        for i in 0..2 {
            family.push(ladder(&basis, i, LadderKind::Destroy).unwrap());
            family.push(ladder(&basis, i, LadderKind::Create).unwrap());
        }
        for a in &family {
            for b in &family {
                for c in &family {
                    for d in &family {
                        let residual =
                            field_commutator_identity_check(a, b, c, d, 1e-12).unwrap();
                        assert!(
                            residual < 1e-12,
                            "{} {} {} {}: {residual}",
                            a.label, b.label, c.label, d.label
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn field_identity_degenerate_operands() {
        let basis = small_basis(3);
        let a = ladder(&basis, 0, LadderKind::Destroy).unwrap();
        let b = ladder(&basis, 1, LadderKind::Create).unwrap();
        // A = C, B = D: both sides vanish identically.
        let residual = field_commutator_identity_check(&a, &b, &a, &b, 1e-12).unwrap();
        assert!(residual < 1e-12);
    }

    #[test]
    fn field_identity_rejects_non_field_operands() {
        let basis = small_basis(2);
        let a = ladder(&basis, 0, LadderKind::Destroy).unwrap();
        let number = {
            let ad = ladder(&basis, 1, LadderKind::Create).unwrap();
            let an = ladder(&basis, 1, LadderKind::Destroy).unwrap();
            ad.matmul(&an)
        };
        let b = ladder(&basis, 1, LadderKind::Destroy).unwrap();
        assert!(matches!(
            field_commutator_identity_check(&a, &b, &number, &b, 1e-12),
            Err(Error::NotScalarAnticommutator { .. })
        ));
    }

    #[test]
    fn exponential_identity_commuting_and_degenerate_cases() {
        let basis = small_basis(3);
        let dim = basis.dimension();
        let h0 = build_h0(&basis, &VacuumSpec::Standard).unwrap();
        // rho a function of number operators: commutes with H0, K = 0.
        let mut tri = TriMat::new((dim, dim));
        for s in 0..dim {
            tri.add_triplet(s, s, Complex64::new(0.3 * (s as f64).sin(), 0.0));
        }
        let rho = FockOperator::from_matrix(tri.to_csr(), "rho-diag");
        let zero = FockOperator::zero(dim, "0");
        let residual = exponential_commutator_identity_check(&h0, &rho, &zero).unwrap();
        assert!(residual < 1e-12, "residual {residual}");

        // Projector onto a degenerate eigenspace: the ±1 shells share one
        // energy, so the two single-particle states span a degenerate pair
        // and K = i[H0, P] = 0.
        let mirrored = ModeSet::full(params(1))
            .unwrap()
            .subset(|m| m.spin == Spin::One && m.sign == EnergySign::Positive && m.index != 0)
            .unwrap();
        let basis = FockBasis::new(mirrored).unwrap();
        let dim = basis.dimension();
        let h0 = build_h0(&basis, &VacuumSpec::Standard).unwrap();
        let h_dense = h0.to_dense();
        let (s, t) = (0b01usize, 0b10usize);
        assert!((h_dense[(s, s)] - h_dense[(t, t)]).norm() < 1e-13);
        let mut tri = TriMat::new((dim, dim));
        tri.add_triplet(s, s, Complex64::new(1.0, 0.0));
        tri.add_triplet(t, t, Complex64::new(1.0, 0.0));
        let projector = FockOperator::from_matrix(tri.to_csr(), "P");
        let zero = FockOperator::zero(dim, "0");
        let residual =
            exponential_commutator_identity_check(&h0, &projector, &zero).unwrap();
        assert!(residual < 1e-12);
    }

    #[test]
    fn exponential_identity_nonzero_flux_triple() {
        // Shift-pair construction: H = |s1⟩⟨s2|, ρ = |s2⟩⟨s3| gives
        // [H,ρ] = |s1⟩⟨s3| =: −iK, and K commutes with ρ.
        let basis = small_basis(2);
        let dim = basis.dimension();
        let unit = |r: usize, c: usize, v: Complex64, label: &str| {
            let mut tri = TriMat::new((dim, dim));
            tri.add_triplet(r, c, v);
            FockOperator::from_matrix(tri.to_csr(), label)
        };
        let h = unit(0, 1, Complex64::new(1.0, 0.0), "H");
        let rho = unit(1, 2, Complex64::new(1.0, 0.0), "rho");
        let flux = unit(0, 2, Complex64::new(0.0, 1.0), "K");
        let residual = exponential_commutator_identity_check(&h, &rho, &flux).unwrap();
        assert!(residual < 1e-10, "residual {residual}");
    }

    #[test]
    fn exponential_identity_rejects_bad_premises() {
        let basis = full_basis(1);
        let gauge = gauge_j(basis.params(), 1);
        let h0 = build_h0(&basis, &VacuumSpec::Standard).unwrap();
        let rho = build_rho_w(&basis, &gauge).unwrap();
        // The physical flux satisfies premise one but not premise two.
        let flux = current_flux(&basis, &gauge).unwrap();
        match exponential_commutator_identity_check(&h0, &rho, &flux) {
            Err(Error::PremiseViolated {
                commutator_residual,
                exchange_residual,
                ..
            }) => {
                assert!(commutator_residual < 1e-12);
                assert!(exchange_residual > 1e-6);
            }
            other => panic!("expected premise violation, got {other:?}"),
        }
    }

    #[test]
    fn physical_pair_premises() {
        let basis = full_basis(1);
        let gauge = gauge_j(basis.params(), 1);
        let (first, second) =
            physical_premise_residuals(&VacuumSpec::Standard, &gauge, &basis).unwrap();
        // The energy–charge commutator matches the flux exactly on the
        // truncation; the charge–flux commutator does not vanish, which is
        // the source of the filled-sea contradiction.
        assert!(first < 1e-12, "first premise {first}");
        assert!(second > 1e-3, "second premise unexpectedly small: {second}");
    }
}
