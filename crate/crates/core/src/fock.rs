//! Truncated Fock-space states and operators.
//!
//! Single-mode states are amplitude vectors over `|0>, ..., |n_max>`; two-mode
//! pure states are coefficient matrices `C[m][n]` for `|m>|n>`. A local
//! operator pair `A (x) B` acts on the coefficient matrix as `C -> A C B^T`, so
//! every two-mode expectation value reduces to a handful of dense products.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tail mass targeted by the thermal-distribution cutoff rule.
const THERMAL_TAIL: f64 = 1e-13;

/// Highest Fock number kept in a truncated mode. A cutoff of `n_max` gives
/// `n_max + 1` basis states per mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockCutoff(usize);

impl FockCutoff {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidCutoff(n_max));
        }
        Ok(FockCutoff(n_max))
    }

    pub fn n_max(self) -> usize {
        self.0
    }

    pub fn dim(self) -> usize {
        self.0 + 1
    }

    /// Default cutoff for Poissonian photon statistics with mean `mu`:
    /// `max(32, ceil(4 mu + 10 sqrt(mu)))`.
    pub fn for_mean_photons(mu: f64) -> Self {
        let mu = mu.max(0.0);
        let n = (4.0 * mu + 10.0 * mu.sqrt()).ceil() as usize;
        FockCutoff(n.max(32))
    }

    /// Default cutoff for a two-mode squeezed state. Its photon statistics are
    /// thermal, so the tail decays geometrically in `tanh^2 r` rather than like
    /// a Poisson tail; the cutoff keeps the discarded mass below 1e-13.
    pub fn for_tmss(r: f64) -> Self {
        let q = r.tanh().powi(2);
        if q <= 0.0 {
            return FockCutoff(32);
        }
        let n = (THERMAL_TAIL.ln() / q.ln()).ceil() as usize;
        FockCutoff(n.max(32))
    }

    /// Default cutoff for an entangled coherent state of amplitude `gamma`.
    pub fn for_ecs(gamma: f64) -> Self {
        Self::for_mean_photons(gamma * gamma)
    }

    /// Cutoff large enough to displace every basis vector of `self` by up to
    /// `max_shift` without the displaced amplitudes reaching the truncation
    /// edge.
    pub fn with_displacement_margin(self, max_shift: f64) -> Self {
        let reach = (self.0 as f64).sqrt() + max_shift.abs() + 6.0;
        let n = (reach * reach).ceil() as usize + 16;
        FockCutoff(n.max(self.0))
    }
}

/// Photon-number parity label for cat states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeState {
    coeffs: CVector,
    cutoff: FockCutoff,
    tail_mass: f64,
}

impl SingleModeState {
    /// Normalizes `coeffs`; `tail_mass` is the probability lost to truncation
    /// before normalization.
    pub fn from_amplitudes(coeffs: CVector, tail_mass: f64) -> Result<Self> {
        let cutoff = FockCutoff::new(coeffs.len().saturating_sub(1))?;
        let norm = coeffs.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::DegenerateState("zero or non-finite amplitude vector"));
        }
        Ok(SingleModeState {
            coeffs: coeffs.unscale(norm),
            cutoff,
            tail_mass,
        })
    }

    pub fn number(n: usize, cutoff: FockCutoff) -> Result<Self> {
        if n > cutoff.n_max() {
            return Err(invalid("n", n as f64, "number state above cutoff"));
        }
        let mut v = CVector::zeros(cutoff.dim());
        v[n] = ONE;
        Self::from_amplitudes(v, 0.0)
    }

    pub fn coeffs(&self) -> &CVector {
        &self.coeffs
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    pub fn inner(&self, other: &SingleModeState) -> Result<Complex64> {
        check_cutoff(self.cutoff, other.cutoff)?;
        Ok(self.coeffs.dotc(&other.coeffs))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    coeffs: CMatrix,
    cutoff: FockCutoff,
    tail_mass: f64,
}

impl TwoModeState {
    /// Normalizes a square coefficient matrix `C[m][n]` for `|m>|n>`.
    pub fn from_coefficients(coeffs: CMatrix, tail_mass: f64) -> Result<Self> {
        if coeffs.nrows() != coeffs.ncols() {
            return Err(Error::CutoffMismatch {
                left: coeffs.nrows().saturating_sub(1),
                right: coeffs.ncols().saturating_sub(1),
            });
        }
        let cutoff = FockCutoff::new(coeffs.nrows().saturating_sub(1))?;
        let norm = coeffs.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::DegenerateState("zero or non-finite coefficient matrix"));
        }
        Ok(TwoModeState {
            coeffs: coeffs.unscale(norm),
            cutoff,
            tail_mass,
        })
    }

    pub fn product(a: &SingleModeState, b: &SingleModeState) -> Result<Self> {
        check_cutoff(a.cutoff, b.cutoff)?;
        let tail = 1.0 - (1.0 - a.tail_mass) * (1.0 - b.tail_mass);
        Self::from_coefficients(a.coeffs() * b.coeffs().transpose(), tail)
    }

    /// `(|0>|1> - |1>|0>)/sqrt(2)` embedded at `cutoff`.
    pub fn single_photon(cutoff: FockCutoff) -> Self {
        let mut c = CMatrix::zeros(cutoff.dim(), cutoff.dim());
        c[(0, 1)] = ONE;
        c[(1, 0)] = -ONE;
        Self::from_coefficients(c, 0.0).expect("nonzero by construction")
    }

    pub fn coeffs(&self) -> &CMatrix {
        &self.coeffs
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Keeps the lowest `n_max + 1` levels of each mode and renormalizes.
    pub fn truncate(&self, cutoff: FockCutoff) -> Result<Self> {
        let d = cutoff.dim().min(self.cutoff.dim());
        let block = self.coeffs.view((0, 0), (d, d)).into_owned();
        let kept = block.norm_squared();
        let mut c = CMatrix::zeros(cutoff.dim(), cutoff.dim());
        c.view_mut((0, 0), (d, d)).copy_from(&block);
        let tail = 1.0 - kept * (1.0 - self.tail_mass);
        Self::from_coefficients(c, tail)
    }

    /// Zero-pads to a larger cutoff.
    pub fn embed(&self, cutoff: FockCutoff) -> Result<Self> {
        if cutoff.dim() < self.cutoff.dim() {
            return self.truncate(cutoff);
        }
        let d = self.cutoff.dim();
        let mut c = CMatrix::zeros(cutoff.dim(), cutoff.dim());
        c.view_mut((0, 0), (d, d)).copy_from(&self.coeffs);
        Ok(TwoModeState {
            coeffs: c,
            cutoff,
            tail_mass: self.tail_mass,
        })
    }

    /// Schmidt coefficients in non-increasing order.
    pub fn schmidt_coefficients(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self
            .coeffs
            .clone()
            .singular_values()
            .iter()
            .copied()
            .collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Von Neumann entropy of either reduced state, in nats.
    pub fn entanglement_entropy(&self) -> f64 {
        self.schmidt_coefficients()
            .into_iter()
            .map(|s| s * s)
            .filter(|&p| p > 0.0)
            .map(|p| -p * p.ln())
            .sum()
    }

    pub fn inner(&self, other: &TwoModeState) -> Result<Complex64> {
        check_cutoff(self.cutoff, other.cutoff)?;
        Ok(self.coeffs.dotc(&other.coeffs))
    }

    /// Amplitude `(<u| (x) <v|) |psi>`.
    pub fn project(&self, u: &CVector, v: &CVector) -> Complex64 {
        // sum_mn conj(u_m) C_mn conj(v_n)
        let cv = &self.coeffs * v.map(|z| z.conj());
        u.dotc(&cv)
    }
}

/// Dense single-mode operator at a fixed cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    matrix: CMatrix,
    cutoff: FockCutoff,
    hermitian: bool,
}

impl FockOperator {
    /// Wraps `matrix`. When `hermitian` is set the claim is checked to 1e-10.
    pub fn new(matrix: CMatrix, hermitian: bool) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::CutoffMismatch {
                left: matrix.nrows().saturating_sub(1),
                right: matrix.ncols().saturating_sub(1),
            });
        }
        let cutoff = FockCutoff::new(matrix.nrows().saturating_sub(1))?;
        let op = FockOperator {
            matrix,
            cutoff,
            hermitian,
        };
        if hermitian {
            let defect = op.hermiticity_defect();
            if defect >= 1e-10 {
                return Err(Error::NotHermitian(defect));
            }
        }
        Ok(op)
    }

    pub(crate) fn new_unchecked(matrix: CMatrix, hermitian: bool) -> Self {
        let cutoff = FockCutoff(matrix.nrows() - 1);
        FockOperator {
            matrix,
            cutoff,
            hermitian,
        }
    }

    pub fn identity(cutoff: FockCutoff) -> Self {
        Self::new_unchecked(CMatrix::identity(cutoff.dim(), cutoff.dim()), true)
    }

    pub fn diagonal(entries: impl IntoIterator<Item = f64>, cutoff: FockCutoff) -> Self {
        let mut m = CMatrix::zeros(cutoff.dim(), cutoff.dim());
        for (i, x) in entries.into_iter().take(cutoff.dim()).enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        Self::new_unchecked(m, true)
    }

    /// `|psi><psi|`.
    pub fn projector(state: &SingleModeState) -> Self {
        let v = state.coeffs();
        Self::new_unchecked(v * v.adjoint(), true)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Largest deviation of a column norm from one.
    pub fn unitarity_defect(&self) -> f64 {
        self.matrix
            .column_iter()
            .map(|c| (c.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn adjoint(&self) -> Self {
        Self::new_unchecked(self.matrix.adjoint(), self.hermitian)
    }

    pub fn compose(&self, rhs: &FockOperator) -> Result<Self> {
        check_cutoff(self.cutoff, rhs.cutoff)?;
        Ok(Self::new_unchecked(&self.matrix * &rhs.matrix, false))
    }

    pub fn apply(&self, state: &SingleModeState) -> Result<CVector> {
        check_cutoff(self.cutoff, state.cutoff())?;
        Ok(&self.matrix * state.coeffs())
    }

    /// `<u|M|v>`.
    pub fn element(&self, u: &SingleModeState, v: &SingleModeState) -> Result<Complex64> {
        Ok(u.coeffs().dotc(&self.apply(v)?))
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }
}

/// `<psi| A (x) B |psi>` without hermiticity checks.
pub fn expectation_complex(
    state: &TwoModeState,
    op1: &FockOperator,
    op2: &FockOperator,
) -> Result<Complex64> {
    check_cutoff(state.cutoff(), op1.cutoff())?;
    check_cutoff(state.cutoff(), op2.cutoff())?;
    let c = state.coeffs();
    let acbt = op1.matrix() * c * op2.matrix().transpose();
    Ok(c.dotc(&acbt))
}

/// Real expectation value `<psi| A (x) B |psi>` of a hermitian product.
pub fn expectation(state: &TwoModeState, op1: &FockOperator, op2: &FockOperator) -> Result<f64> {
    for op in [op1, op2] {
        if !op.is_hermitian() {
            return Err(Error::NotHermitian(op.hermiticity_defect()));
        }
    }
    let z = expectation_complex(state, op1, op2)?;
    if z.im.abs() >= 1e-9 {
        return Err(Error::ImaginaryResidue(z.im));
    }
    Ok(z.re)
}

/// Raw truncated coherent amplitudes `e^{-|g|^2/2} g^n / sqrt(n!)`, not
/// renormalized.
pub fn coherent_amplitudes(gamma: Complex64, cutoff: FockCutoff) -> CVector {
    let mut v = CVector::zeros(cutoff.dim());
    let mut a = Complex64::new((-0.5 * gamma.norm_sqr()).exp(), 0.0);
    for n in 0..cutoff.dim() {
        v[n] = a;
        a = a * gamma / ((n + 1) as f64).sqrt();
    }
    v
}

pub fn make_coherent(gamma: Complex64, cutoff: FockCutoff) -> SingleModeState {
    let raw = coherent_amplitudes(gamma, cutoff);
    let tail = (1.0 - raw.norm_squared()).max(0.0);
    SingleModeState::from_amplitudes(raw, tail).expect("vacuum amplitude is never zero")
}

/// Even (`|gamma> + |-gamma>`) or odd (`|gamma> - |-gamma>`) cat state. The
/// amplitudes are real and non-negative for `gamma > 0`.
pub fn make_cat(gamma: f64, parity: Parity, cutoff: FockCutoff) -> Result<SingleModeState> {
    if !gamma.is_finite() {
        return Err(invalid("gamma", gamma, "must be finite"));
    }
    if gamma == 0.0 && parity == Parity::Odd {
        return Err(Error::DegenerateState("odd cat state with gamma = 0"));
    }
    let raw = coherent_amplitudes(Complex64::new(gamma, 0.0), cutoff);
    let keep = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    let v = CVector::from_iterator(
        cutoff.dim(),
        raw.iter()
            .enumerate()
            .map(|(n, &a)| if n % 2 == keep { a } else { ZERO }),
    );
    let expected = match parity {
        Parity::Even => (1.0 + (-2.0 * gamma * gamma).exp()) / 2.0,
        Parity::Odd => -(-2.0 * gamma * gamma).exp_m1() / 2.0,
    };
    let tail = (1.0 - v.norm_squared() / expected).max(0.0);
    SingleModeState::from_amplitudes(v, tail)
}

/// `sum_n (tanh r)^n / cosh r |n>|n>`.
pub fn make_tmss(r: f64, cutoff: FockCutoff) -> Result<TwoModeState> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(invalid("r", r, "squeezing must be finite and non-negative"));
    }
    let t = r.tanh();
    let mut c = CMatrix::zeros(cutoff.dim(), cutoff.dim());
    let mut a = 1.0 / r.cosh();
    let mut kept = 0.0;
    for n in 0..cutoff.dim() {
        c[(n, n)] = Complex64::new(a, 0.0);
        kept += a * a;
        a *= t;
    }
    TwoModeState::from_coefficients(c, (1.0 - kept).max(0.0))
}

/// `N (|g>|-g> - |-g>|g>)` for real `gamma != 0`.
pub fn make_ecs(gamma: f64, cutoff: FockCutoff) -> Result<TwoModeState> {
    if !gamma.is_finite() {
        return Err(invalid("gamma", gamma, "must be finite"));
    }
    if gamma == 0.0 {
        return Err(Error::DegenerateState("entangled coherent state with gamma = 0"));
    }
    let plus = coherent_amplitudes(Complex64::new(gamma, 0.0), cutoff);
    let minus = coherent_amplitudes(Complex64::new(-gamma, 0.0), cutoff);
    let c = &plus * minus.transpose() - &minus * plus.transpose();
    let exact = 2.0 * -(-4.0 * gamma * gamma).exp_m1();
    let tail = (1.0 - c.norm_squared() / exact).max(0.0);
    TwoModeState::from_coefficients(c, tail)
}

/// Eigenbasis of the truncated quadrature `a + a^dag`, from which every
/// displacement at this cutoff follows in closed form.
///
/// With `alpha = |alpha| e^{i phi}` the truncated generator is
/// `alpha a^dag - alpha^* a = -i |alpha| R X R^dag` where `X = a + a^dag` and
/// `R = exp(i (phi + pi/2) n)`, so
/// `D(alpha) = R V exp(-i |alpha| Lambda) V^T R^dag` for `X = V Lambda V^T`.
/// This is exactly the matrix exponential of the truncated generator, and it is
/// unitary to rounding.
#[derive(Debug, Clone)]
pub struct DisplacementBasis {
    cutoff: FockCutoff,
    vectors: DMatrix<f64>,
    values: DVector<f64>,
}

impl DisplacementBasis {
    pub fn new(cutoff: FockCutoff) -> Self {
        let d = cutoff.dim();
        let mut x = DMatrix::<f64>::zeros(d, d);
        for n in 0..d - 1 {
            let s = ((n + 1) as f64).sqrt();
            x[(n, n + 1)] = s;
            x[(n + 1, n)] = s;
        }
        let eig = SymmetricEigen::new(x);
        DisplacementBasis {
            cutoff,
            vectors: eig.eigenvectors,
            values: eig.eigenvalues,
        }
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    fn phases(&self, alpha: Complex64) -> (CVector, CVector) {
        let psi = alpha.arg() + std::f64::consts::FRAC_PI_2;
        let rot = CVector::from_fn(self.cutoff.dim(), |n, _| {
            Complex64::from_polar(1.0, psi * n as f64)
        });
        let spec = self
            .values
            .map(|lam| Complex64::from_polar(1.0, -alpha.norm() * lam));
        (rot, spec)
    }

    /// First `k` columns of `D(alpha)`.
    pub fn columns(&self, alpha: Complex64, k: usize) -> CMatrix {
        let d = self.cutoff.dim();
        let k = k.min(d);
        let (rot, spec) = self.phases(alpha);
        // left = R V e^{-i|a|L}, right = V^T R^dag restricted to k columns
        let left = CMatrix::from_fn(d, d, |i, j| rot[i] * spec[j] * self.vectors[(i, j)]);
        let right = CMatrix::from_fn(d, k, |i, j| self.vectors[(j, i)] * rot[j].conj());
        left * right
    }

    pub fn displacement(&self, alpha: Complex64) -> FockOperator {
        FockOperator::new_unchecked(self.columns(alpha, self.cutoff.dim()), false)
    }

    /// `D(alpha) v` in O(d^2).
    pub fn displace(&self, alpha: Complex64, v: &CVector) -> CVector {
        let (rot, spec) = self.phases(alpha);
        let w = v.zip_map(&rot, |x, r| x * r.conj());
        let w = self.vectors.tr_mul(&w.map(|z| z.re)).map(|x| Complex64::new(x, 0.0))
            + self
                .vectors
                .tr_mul(&w.map(|z| z.im))
                .map(|x| Complex64::new(0.0, x));
        let w = w.component_mul(&spec);
        let out = self.vectors.map(|x| Complex64::new(x, 0.0)) * w;
        out.component_mul(&rot)
    }
}

/// `D(alpha) = exp(alpha a^dag - alpha^* a)` truncated at `cutoff`.
pub fn make_displacement(alpha: Complex64, cutoff: FockCutoff) -> FockOperator {
    DisplacementBasis::new(cutoff).displacement(alpha)
}

pub fn annihilation(cutoff: FockCutoff) -> CMatrix {
    let d = cutoff.dim();
    CMatrix::from_fn(d, d, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

pub(crate) fn check_cutoff(a: FockCutoff, b: FockCutoff) -> Result<()> {
    if a != b {
        return Err(Error::CutoffMismatch {
            left: a.n_max(),
            right: b.n_max(),
        });
    }
    Ok(())
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cut(n: usize) -> FockCutoff {
        FockCutoff::new(n).unwrap()
    }

    #[test]
    fn cutoff_rejects_zero() {
        assert_eq!(FockCutoff::new(0), Err(Error::InvalidCutoff(0)));
        assert_eq!(FockCutoff::for_mean_photons(0.0).n_max(), 32);
        assert_eq!(FockCutoff::for_mean_photons(25.0).n_max(), 150);
    }

    #[test]
    fn tmss_cutoff_bounds_thermal_tail() {
        for r in [0.3, 1.0, 1.5, 2.0] {
            let cutoff = FockCutoff::for_tmss(r);
            let s = make_tmss(r, cutoff).unwrap();
            assert!(s.tail_mass() < 1e-12, "r={r} tail={}", s.tail_mass());
        }
    }

    #[test]
    fn coherent_vacuum_and_series() {
        let vac = make_coherent(c(0.0, 0.0), cut(32));
        assert_eq!(vac.coeffs()[0], ONE);
        assert!(vac.coeffs().iter().skip(1).all(|z| *z == ZERO));

        let one = make_coherent(c(1.0, 0.0), cut(32));
        assert!((one.coeffs()[0].re - (-0.5f64).exp()).abs() < 1e-12);
        assert!((one.coeffs()[0].re - 0.60653).abs() < 1e-5);

        let two = make_coherent(c(2.0, 0.0), cut(32));
        assert!((two.mean_photon_number() - 4.0).abs() < 1e-6);
        assert!((two.coeffs().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tmss_structure_and_entropy() {
        let s0 = make_tmss(0.0, cut(8)).unwrap();
        assert_eq!(s0.coeffs()[(0, 0)], ONE);
        assert!((s0.coeffs().norm() - 1.0).abs() < 1e-15);

        let s = make_tmss(1.0, cut(64)).unwrap();
        let ratio = s.coeffs()[(1, 1)].re / s.coeffs()[(0, 0)].re;
        assert!((ratio - 1f64.tanh()).abs() < 1e-12);
        assert!((ratio - 0.76159).abs() < 1e-5);
        assert!(s.coeffs()[(0, 1)] == ZERO);

        // closed-form thermal entropy vs Schmidt spectrum
        let ch2 = 1f64.cosh().powi(2);
        let sh2 = 1f64.sinh().powi(2);
        let closed = ch2 * ch2.ln() - sh2 * sh2.ln();
        let s = make_tmss(1.0, FockCutoff::for_tmss(1.0)).unwrap();
        assert!((s.entanglement_entropy() - closed).abs() < 1e-6);
        let total: f64 = s.schmidt_coefficients().iter().map(|x| x * x).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ecs_rejects_zero_amplitude() {
        assert!(matches!(
            make_ecs(0.0, cut(16)),
            Err(Error::DegenerateState(_))
        ));
        assert!(matches!(
            make_cat(0.0, Parity::Odd, cut(16)),
            Err(Error::DegenerateState(_))
        ));
        let even = make_cat(0.0, Parity::Even, cut(16)).unwrap();
        assert!((even.coeffs()[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ecs_is_singlet_in_cat_basis() {
        for gamma in [0.1, 0.7, 1.0, 2.5] {
            let cutoff = FockCutoff::for_ecs(gamma);
            let ecs = make_ecs(gamma, cutoff).unwrap();
            let e = make_cat(gamma, Parity::Even, cutoff).unwrap();
            let d = make_cat(gamma, Parity::Odd, cutoff).unwrap();
            let ed = e.coeffs() * d.coeffs().transpose();
            let singlet = (&ed - ed.transpose()).unscale(2f64.sqrt());
            let overlap = ecs.coeffs().dotc(&singlet).norm();
            assert!((overlap - 1.0).abs() < 1e-10, "gamma={gamma}");

            let schmidt = ecs.schmidt_coefficients();
            assert!((schmidt[0] - 0.5f64.sqrt()).abs() < 1e-10);
            assert!((schmidt[1] - 0.5f64.sqrt()).abs() < 1e-10);
            assert!(schmidt[2] < 1e-10);
        }
    }

    #[test]
    fn small_gamma_ecs_approaches_single_photon_state() {
        let cutoff = cut(32);
        let ecs = make_ecs(0.1, cutoff).unwrap();
        let sp = TwoModeState::single_photon(cutoff);
        assert!(ecs.inner(&sp).unwrap().norm() > 0.99);
    }

    #[test]
    fn cat_parity_support_and_orthogonality() {
        let cutoff = cut(40);
        let e = make_cat(1.0, Parity::Even, cutoff).unwrap();
        let d = make_cat(1.0, Parity::Odd, cutoff).unwrap();
        for n in 0..cutoff.dim() {
            if n % 2 == 1 {
                assert_eq!(e.coeffs()[n], ZERO);
            } else {
                assert_eq!(d.coeffs()[n], ZERO);
            }
        }
        assert!(e.inner(&d).unwrap().norm() < 1e-12);
    }

    #[test]
    fn displacement_identity_and_vacuum_overlap() {
        let id = make_displacement(c(0.0, 0.0), cut(20));
        assert!(max_abs(&(id.matrix() - CMatrix::identity(21, 21))) < 1e-12);

        let d = make_displacement(c(1.0, 0.0), cut(48));
        assert!((d.matrix()[(0, 0)] - c((-0.5f64).exp(), 0.0)).norm() < 1e-8);
        assert!(d.unitarity_defect() < 1e-10);
    }

    #[test]
    fn displacement_inverse_on_lower_space() {
        let cutoff = cut(48);
        let basis = DisplacementBasis::new(cutoff);
        let a = c(0.5, 0.5);
        let prod = basis.displacement(a).compose(&basis.displacement(-a)).unwrap();
        let k = cutoff.dim() * 3 / 4;
        let block = prod.matrix().view((0, 0), (k, k)).into_owned();
        assert!(max_abs(&(block - CMatrix::identity(k, k))) < 1e-8);
    }

    #[test]
    fn displacement_matches_pade_exponential() {
        let cutoff = cut(30);
        let alpha = c(0.7, -0.4);
        let a = annihilation(cutoff);
        let gen = a.adjoint() * alpha - &a * alpha.conj();
        let pade = gen.exp();
        let eig = make_displacement(alpha, cutoff);
        assert!(max_abs(&(pade - eig.matrix())) < 1e-10);
    }

    #[test]
    fn displacement_columns_and_action_agree() {
        let cutoff = cut(24);
        let basis = DisplacementBasis::new(cutoff);
        let alpha = c(-0.3, 0.9);
        let full = basis.displacement(alpha);
        let cols = basis.columns(alpha, 5);
        assert!(max_abs(&(full.matrix().columns(0, 5).into_owned() - cols)) < 1e-12);
        let v = make_coherent(c(0.2, 0.1), cutoff);
        let direct = full.apply(&v).unwrap();
        let fast = basis.displace(alpha, v.coeffs());
        assert!((direct - fast).norm() < 1e-12);
    }

    #[test]
    fn displacement_composition_law() {
        let (a, b) = (c(0.6, 0.2), c(-0.3, 0.5));
        let need = 4.0 * (a.norm() + b.norm()).powi(2) + 20.0;
        let cutoff = cut(need.ceil() as usize);
        let basis = DisplacementBasis::new(cutoff);
        let lhs = basis.displacement(a).compose(&basis.displacement(b)).unwrap();
        let phase = Complex64::from_polar(1.0, (a * b.conj()).im);
        let rhs = basis.displacement(a + b).matrix() * phase;
        let k = cutoff.dim() / 2;
        let diff = (lhs.matrix() - rhs).view((0, 0), (k, k)).into_owned();
        assert!(max_abs(&diff) < 1e-6);
    }

    #[test]
    fn expectation_checks() {
        let cutoff = cut(6);
        let s = make_tmss(0.4, cutoff).unwrap();
        let id = FockOperator::identity(cutoff);
        assert!((expectation(&s, &id, &id).unwrap() - 1.0).abs() < 1e-12);

        let other = FockOperator::identity(cut(7));
        assert!(matches!(
            expectation(&s, &id, &other),
            Err(Error::CutoffMismatch { .. })
        ));

        let a = FockOperator::new(annihilation(cutoff), false).unwrap();
        assert!(matches!(
            expectation(&s, &a, &id),
            Err(Error::NotHermitian(_))
        ));
        assert!(FockOperator::new(annihilation(cutoff), true).is_err());
    }
}
