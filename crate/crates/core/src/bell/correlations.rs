use num_complex::Complex64;

use crate::error::Result;
use crate::fock::{check_cutoff, CMatrix, CVector, FockCutoff, FockOperator, TwoModeState};
use crate::observables::{pair_flip, pseudospin_lowering, pseudospin_z, GammaZ};

/// Correlations of a state over a fixed operator basis `{O_j}`.
///
/// Observables that are linear in the basis, `A(s) = sum_j c_j(s) O_j`, have
/// `<A(s) (x) B(t)> = c(s)^T J c(t)` with `J_jk = <O_j (x) O_k>`, so a whole
/// optimization needs the state only once.
#[derive(Debug, Clone)]
pub struct FamilyCorrelations {
    joint: CMatrix,
    first: CVector,
    second: CVector,
}

impl FamilyCorrelations {
    pub fn from_basis(state: &TwoModeState, basis: &[FockOperator]) -> Result<Self> {
        for op in basis {
            check_cutoff(state.cutoff(), op.cutoff())?;
        }
        let sparse: Vec<Vec<(usize, usize, Complex64)>> = basis.iter().map(nonzeros).collect();
        let c = state.coeffs();
        let k = basis.len();
        let mut joint = CMatrix::zeros(k, k);
        let mut first = CVector::zeros(k);
        let mut second = CVector::zeros(k);
        for (j, oj) in sparse.iter().enumerate() {
            // <O (x) 1> = sum_{m m' n} conj(C_mn) O_mm' C_m'n
            for &(m, mp, a) in oj {
                first[j] += a * c.row(m).iter().zip(c.row(mp).iter()).map(|(x, y)| x.conj() * y).sum::<Complex64>();
                second[j] += a * c.column(m).dotc(&c.column(mp));
            }
            for (l, ol) in sparse.iter().enumerate() {
                let mut total = Complex64::new(0.0, 0.0);
                for &(m, mp, a) in oj {
                    for &(n, np, b) in ol {
                        total += c[(m, n)].conj() * a * b * c[(mp, np)];
                    }
                }
                joint[(j, l)] = total;
            }
        }
        Ok(FamilyCorrelations { joint, first, second })
    }

    /// Basis `{s_z, s_-, s_+}` with coefficients from [`pseudospin_coefficients`].
    pub fn pseudospin(state: &TwoModeState) -> Result<Self> {
        let c = state.cutoff();
        let lower = pseudospin_lowering(c);
        let basis = [pseudospin_z(c), lower.clone(), lower.adjoint()];
        Self::from_basis(state, &basis)
    }

    /// Basis `{Gamma_z, Gamma_x, E}` for Gisin-Peres observables; the state
    /// must already live in dimension `N`.
    pub fn gisin_peres(state: &TwoModeState, convention: GammaZ) -> Result<Self> {
        let c = state.cutoff();
        let d = c.dim();
        let sign = match convention {
            GammaZ::Pauli => 1.0,
            GammaZ::Pseudospin => -1.0,
        };
        let gz = FockOperator::diagonal(
            (0..d).map(|n| {
                if n + 1 == d && d % 2 == 1 {
                    0.0
                } else if n % 2 == 0 {
                    sign
                } else {
                    -sign
                }
            }),
            c,
        );
        let e = FockOperator::diagonal((0..d).map(|n| if n + 1 == d && d % 2 == 1 { 1.0 } else { 0.0 }), c);
        Self::from_basis(state, &[gz, pair_flip(c), e])
    }

    /// Basis `{P_even, P_odd, X, P_top}` for `chi(theta) = c^2 P_even + s^2 P_odd
    /// - c s X + P_top`, with `P_top` the unpaired top level at odd dimension.
    pub fn chi(state: &TwoModeState) -> Result<Self> {
        let c = state.cutoff();
        let d = c.dim();
        let unpaired = |n: usize| n + 1 == d && d % 2 == 1;
        let even = FockOperator::diagonal((0..d).map(|n| if n % 2 == 0 && !unpaired(n) { 1.0 } else { 0.0 }), c);
        let odd = FockOperator::diagonal((0..d).map(|n| if n % 2 == 1 { 1.0 } else { 0.0 }), c);
        let top = FockOperator::diagonal((0..d).map(|n| if unpaired(n) { 1.0 } else { 0.0 }), c);
        Self::from_basis(state, &[even, odd, pair_flip(c), top])
    }

    /// Basis `{|0><0|, |1><1|, |0><1| + |1><0|}` for `|theta><theta|`.
    pub fn qubit_projector(state: &TwoModeState) -> Result<Self> {
        let c = state.cutoff();
        let d = c.dim();
        let p0 = FockOperator::diagonal((0..d).map(|n| if n == 0 { 1.0 } else { 0.0 }), c);
        let p1 = FockOperator::diagonal((0..d).map(|n| if n == 1 { 1.0 } else { 0.0 }), c);
        let mut x = CMatrix::zeros(d, d);
        if d > 1 {
            x[(0, 1)] = Complex64::new(1.0, 0.0);
            x[(1, 0)] = Complex64::new(1.0, 0.0);
        }
        let x = FockOperator::new(x, true)?;
        Self::from_basis(state, &[p0, p1, x])
    }

    pub fn basis_len(&self) -> usize {
        self.first.len()
    }

    pub fn joint(&self, a: &[Complex64], b: &[Complex64]) -> f64 {
        let mut total = Complex64::new(0.0, 0.0);
        for (j, ca) in a.iter().enumerate() {
            for (k, cb) in b.iter().enumerate() {
                total += ca * cb * self.joint[(j, k)];
            }
        }
        total.re
    }

    pub fn first(&self, a: &[Complex64]) -> f64 {
        a.iter().zip(self.first.iter()).map(|(c, v)| c * v).sum::<Complex64>().re
    }

    pub fn second(&self, b: &[Complex64]) -> f64 {
        b.iter().zip(self.second.iter()).map(|(c, v)| c * v).sum::<Complex64>().re
    }
}

fn nonzeros(op: &FockOperator) -> Vec<(usize, usize, Complex64)> {
    let m = op.matrix();
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if z != Complex64::new(0.0, 0.0) {
                out.push((i, j, z));
            }
        }
    }
    out
}

pub(crate) fn pseudospin_coefficients(theta: f64, phi: f64) -> [Complex64; 3] {
    let (st, ct) = theta.sin_cos();
    [
        Complex64::new(ct, 0.0),
        Complex64::from_polar(st, phi),
        Complex64::from_polar(st, -phi),
    ]
}

pub(crate) fn gisin_peres_coefficients(theta: f64) -> [Complex64; 3] {
    let (st, ct) = theta.sin_cos();
    [Complex64::new(ct, 0.0), Complex64::new(st, 0.0), Complex64::new(1.0, 0.0)]
}

pub(crate) fn chi_coefficients(theta: f64) -> [Complex64; 4] {
    let (s, c) = theta.sin_cos();
    [
        Complex64::new(c * c, 0.0),
        Complex64::new(s * s, 0.0),
        Complex64::new(-c * s, 0.0),
        Complex64::new(1.0, 0.0),
    ]
}

pub(crate) fn qubit_projector_coefficients(theta: f64) -> [Complex64; 3] {
    let (s, c) = theta.sin_cos();
    [Complex64::new(c * c, 0.0), Complex64::new(s * s, 0.0), Complex64::new(c * s, 0.0)]
}

pub(crate) fn truncate_to(state: &TwoModeState, dim: usize) -> Result<TwoModeState> {
    if dim < 2 {
        return Err(crate::error::invalid("N", dim as f64, "dimension must be at least 2"));
    }
    let target = FockCutoff::new(dim - 1)?;
    if target.dim() <= state.cutoff().dim() {
        state.truncate(target)
    } else {
        state.embed(target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{expectation, make_ecs, make_tmss};
    use crate::observables::{ch_projector, chi_projector, gisin_peres, pseudospin, ProjectorSetting, PseudospinSetting};

    #[test]
    fn tensor_matches_direct_operators() {
        let cutoff = FockCutoff::new(15).unwrap();
        let states = [make_tmss(0.6, cutoff).unwrap(), make_ecs(0.9, cutoff).unwrap()];
        let angles = [(0.3, -1.1), (2.0, 0.4), (-0.7, 2.9)];
        for st in &states {
            let ps = FamilyCorrelations::pseudospin(st).unwrap();
            let chi = FamilyCorrelations::chi(st).unwrap();
            let qb = FamilyCorrelations::qubit_projector(st).unwrap();
            for &(t1, p1) in &angles {
                for &(t2, p2) in &angles {
                    let a = pseudospin(PseudospinSetting { theta: t1, phi: p1 }, cutoff);
                    let b = pseudospin(PseudospinSetting { theta: t2, phi: p2 }, cutoff);
                    let direct = expectation(st, &a, &b).unwrap();
                    let via = ps.joint(&pseudospin_coefficients(t1, p1), &pseudospin_coefficients(t2, p2));
                    assert!((direct - via).abs() < 1e-12);

                    let direct = expectation(st, &chi_projector(t1, cutoff), &chi_projector(t2, cutoff)).unwrap();
                    let via = chi.joint(&chi_coefficients(t1), &chi_coefficients(t2));
                    assert!((direct - via).abs() < 1e-12);

                    let pa = ch_projector(ProjectorSetting { theta: t1 }, cutoff);
                    let pb = ch_projector(ProjectorSetting { theta: t2 }, cutoff);
                    let direct = expectation(st, &pa, &pb).unwrap();
                    let via = qb.joint(&qubit_projector_coefficients(t1), &qubit_projector_coefficients(t2));
                    assert!((direct - via).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn gisin_peres_tensor_matches_operators() {
        let st = make_tmss(0.8, FockCutoff::new(30).unwrap()).unwrap();
        for n in [2usize, 3, 6, 9] {
            let t = truncate_to(&st, n).unwrap();
            for conv in [GammaZ::Pauli, GammaZ::Pseudospin] {
                let f = FamilyCorrelations::gisin_peres(&t, conv).unwrap();
                for (x, y) in [(0.2, 1.3), (-2.0, 0.7)] {
                    let direct = expectation(&t, &gisin_peres(n, x, conv).unwrap(), &gisin_peres(n, y, conv).unwrap()).unwrap();
                    let via = f.joint(&gisin_peres_coefficients(x), &gisin_peres_coefficients(y));
                    assert!((direct - via).abs() < 1e-12, "n={n}");
                }
            }
        }
    }
}
