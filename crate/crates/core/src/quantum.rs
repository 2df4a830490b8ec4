//! Single-qubit states, the tetrahedral SIC-POVM, Born probabilities and fidelity.
//!
//! Everything here is exact 2x2 arithmetic on `Complex64`; no general-purpose
//! linear algebra is needed for a qubit.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used when validating density matrices and POVM elements.
pub const PHYSICALITY_TOL: f64 = 1e-12;

/// Sums of squared Cholesky parameters at or below this value are rejected.
pub const DEGENERATE_NORM_SQR: f64 = 1e-24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A 2x2 complex matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix2(pub [[Complex64; 2]; 2]);

impl ComplexMatrix2 {
    pub const IDENTITY: Self = Self([[ONE, ZERO], [ZERO, ONE]]);
    pub const ZERO: Self = Self([[ZERO, ZERO], [ZERO, ZERO]]);

    pub fn new(entries: [[Complex64; 2]; 2]) -> Self {
        Self(entries)
    }

    pub fn from_real(entries: [[f64; 2]; 2]) -> Self {
        Self([
            [entries[0][0].into(), entries[0][1].into()],
            [entries[1][0].into(), entries[1][1].into()],
        ])
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn scale(&self, factor: f64) -> Self {
        let m = &self.0;
        Self([
            [m[0][0] * factor, m[0][1] * factor],
            [m[1][0] * factor, m[1][1] * factor],
        ])
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        let (a, b) = (&self.0, &other.0);
        a[0][0] * b[0][0] + a[0][1] * b[1][0] + a[1][0] * b[0][1] + a[1][1] * b[1][1]
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.0;
        let diag = m[0][0].im.abs().max(m[1][1].im.abs());
        diag.max((m[0][1] - m[1][0].conj()).norm())
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let m = &self.0;
        let a = m[0][0].re;
        let d = m[1][1].re;
        let off = (m[0][1] + m[1][0].conj()) * 0.5;
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + off.norm_sqr()).sqrt();
        [mean - radius, mean + radius]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for ComplexMatrix2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (self.0, rhs.0);
        Self([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for ComplexMatrix2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let (a, b) = (self.0, rhs.0);
        Self([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }
}

impl Mul for ComplexMatrix2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self.0, rhs.0);
        Self([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

/// A Hermitian, unit-trace, positive-semidefinite 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(ComplexMatrix2);

impl DensityMatrix {
    /// Validates `matrix` against the physicality tolerances.
    pub fn new(matrix: ComplexMatrix2) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
        }
        let defect = matrix.hermiticity_defect();
        if defect > PHYSICALITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {defect:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace - ONE).norm() > PHYSICALITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {trace} != 1")));
        }
        let [min_eig, _] = matrix.hermitian_eigenvalues();
        if min_eig < -PHYSICALITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self(matrix))
    }

    pub fn maximally_mixed() -> Self {
        Self(ComplexMatrix2::IDENTITY.scale(0.5))
    }

    /// `(I + s . sigma) / 2`; the Bloch vector must satisfy `|s| <= 1`.
    pub fn from_bloch(s: [f64; 3]) -> Result<Self> {
        let [x, y, z] = s;
        Self::new(ComplexMatrix2([
            [
                Complex64::new(0.5 * (1.0 + z), 0.0),
                Complex64::new(0.5 * x, -0.5 * y),
            ],
            [
                Complex64::new(0.5 * x, 0.5 * y),
                Complex64::new(0.5 * (1.0 - z), 0.0),
            ],
        ]))
    }

    pub fn matrix(&self) -> &ComplexMatrix2 {
        &self.0
    }

    pub fn bloch_vector(&self) -> [f64; 3] {
        let m = &self.0 .0;
        [2.0 * m[1][0].re, 2.0 * m[1][0].im, m[0][0].re - m[1][1].re]
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.0.trace_product(&self.0).re
    }
}

/// Polar and azimuthal angles of a pure qubit state on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureStateAngles {
    theta: f64,
    phi: f64,
}

impl PureStateAngles {
    /// `theta` must lie in `[0, pi]` and `phi` in `[0, 2 pi)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::InvalidAngles { theta, phi });
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Four real parameters of a lower-triangular Cholesky factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CholeskyParams([f64; 4]);

impl CholeskyParams {
    pub fn new(t: [f64; 4]) -> Result<Self> {
        if t.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteParameters);
        }
        let norm = norm_sqr(&t);
        if norm <= DEGENERATE_NORM_SQR {
            return Err(Error::DegenerateParameters(norm));
        }
        Ok(Self(t))
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.0
    }
}

fn norm_sqr(t: &[f64; 4]) -> f64 {
    t.iter().map(|x| x * x).sum()
}

/// The pure state `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>` as `|psi><psi|`.
pub fn pure_state_density(angles: PureStateAngles) -> DensityMatrix {
    let c = libm::cos(0.5 * angles.theta);
    let s = libm::sin(0.5 * angles.theta);
    let phase = Complex64::new(libm::cos(angles.phi), libm::sin(angles.phi));
    let off = phase * (s * c);
    DensityMatrix(ComplexMatrix2([
        [Complex64::new(c * c, 0.0), off.conj()],
        [off, Complex64::new(s * s, 0.0)],
    ]))
}

/// Raw Cholesky map used by the optimizer; `None` at the degenerate origin.
pub(crate) fn cholesky_raw(t: &[f64; 4]) -> Option<DensityMatrix> {
    let norm = norm_sqr(t);
    if !(norm > DEGENERATE_NORM_SQR) || !norm.is_finite() {
        return None;
    }
    let [t1, t2, t3, t4] = *t;
    // T = [[t1, 0], [t3 + i t4, t2]], T^dagger T = [[t1^2 + t3^2 + t4^2, (t3 - i t4) t2], [.., t2^2]]
    let inv = 1.0 / norm;
    let off = Complex64::new(t3 * t2 * inv, t4 * t2 * inv);
    Some(DensityMatrix(ComplexMatrix2([
        [
            Complex64::new((t1 * t1 + t3 * t3 + t4 * t4) * inv, 0.0),
            off.conj(),
        ],
        [off, Complex64::new(t2 * t2 * inv, 0.0)],
    ])))
}

/// `rho = T^dagger T / Tr(T^dagger T)` with `T = [[t1, 0], [t3 + i t4, t2]]`.
pub fn density_from_cholesky(t: &CholeskyParams) -> Result<DensityMatrix> {
    cholesky_raw(&t.0).ok_or(Error::DegenerateParameters(norm_sqr(&t.0)))
}

/// Bloch directions of the tetrahedron, before normalization by `sqrt(3)`.
pub const TETRAHEDRON_DIRECTIONS: [[f64; 3]; 4] = [
    [1.0, 1.0, 1.0],
    [1.0, -1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
];

/// Symmetric informationally complete POVM for a qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SicPovm {
    operators: [ComplexMatrix2; 4],
}

impl SicPovm {
    pub fn operators(&self) -> &[ComplexMatrix2; 4] {
        &self.operators
    }

    /// Returns the POVM with its elements reordered as `operators[perm[k]]`.
    pub fn permuted(&self, perm: [usize; 4]) -> Self {
        Self {
            operators: perm.map(|k| self.operators[k]),
        }
    }
}

/// The tetrahedral SIC-POVM `M_j = (I + r_j . sigma) / 4`.
pub fn sic_povm() -> SicPovm {
    let inv_sqrt3 = 1.0 / 3.0_f64.sqrt();
    let operators = TETRAHEDRON_DIRECTIONS.map(|d| {
        let [x, y, z] = d.map(|c| c * inv_sqrt3);
        ComplexMatrix2([
            [
                Complex64::new(0.25 * (1.0 + z), 0.0),
                Complex64::new(0.25 * x, -0.25 * y),
            ],
            [
                Complex64::new(0.25 * x, 0.25 * y),
                Complex64::new(0.25 * (1.0 - z), 0.0),
            ],
        ])
    });
    SicPovm { operators }
}

/// `p_j = Tr(M_j rho)`.
pub fn born_probabilities(rho: &DensityMatrix, povm: &SicPovm) -> [f64; 4] {
    povm.operators.map(|m| m.trace_product(&rho.0).re)
}

/// Determinants at or below this are rounding noise of a rank-1 matrix.
const PURE_DET_FLOOR: f64 = 1e-15;

fn clamped_det(m: &ComplexMatrix2) -> f64 {
    let det = m.det().re;
    if det <= PURE_DET_FLOOR {
        0.0
    } else {
        det
    }
}

/// Squared Uhlmann fidelity, via the qubit closed form
/// `F = Tr(rho sigma) + 2 sqrt(det rho det sigma)`.
///
/// Determinants at the rounding floor are taken as zero; otherwise the square
/// root turns a 1e-17 error in a pure state's determinant into 1e-9 in `F`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let overlap = rho.0.trace_product(&sigma.0).re;
    let det_rho = clamped_det(&rho.0);
    let det_sigma = clamped_det(&sigma.0);
    (overlap + 2.0 * (det_rho * det_sigma).sqrt()).clamp(0.0, 1.0)
}

/// The default restart point of the estimator, which maps to `I/2`.
pub const MAXIMALLY_MIXED_CHOLESKY: [f64; 4] = [FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.0];

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &ComplexMatrix2, b: &ComplexMatrix2, tol: f64) {
        let d = a.max_abs_diff(b);
        assert!(d <= tol, "matrices differ by {d:e}: {a:?} vs {b:?}");
    }

    #[test]
    fn pole_and_equator_states() {
        let north = pure_state_density(PureStateAngles::new(0.0, 0.0).unwrap());
        assert_close(
            north.matrix(),
            &ComplexMatrix2::from_real([[1.0, 0.0], [0.0, 0.0]]),
            1e-15,
        );

        let south = pure_state_density(PureStateAngles::new(PI, 0.0).unwrap());
        assert_close(
            south.matrix(),
            &ComplexMatrix2::from_real([[0.0, 0.0], [0.0, 1.0]]),
            1e-15,
        );

        let plus = pure_state_density(PureStateAngles::new(PI / 2.0, 0.0).unwrap());
        assert_close(
            plus.matrix(),
            &ComplexMatrix2::from_real([[0.5, 0.5], [0.5, 0.5]]),
            1e-15,
        );
    }

    #[test]
    fn pure_state_off_diagonal_carries_phase() {
        let (theta, phi) = (1.1, 2.3);
        let rho = pure_state_density(PureStateAngles::new(theta, phi).unwrap());
        let expected = Complex64::from_polar(1.0, phi) * (theta / 2.0).sin() * (theta / 2.0).cos();
        assert!((rho.matrix().get(1, 0) - expected).norm() < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn angles_out_of_range_are_rejected() {
        assert!(PureStateAngles::new(-0.1, 0.0).is_err());
        assert!(PureStateAngles::new(0.0, 2.0 * PI).is_err());
        assert!(PureStateAngles::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn cholesky_simple_cases() {
        let rho =
            density_from_cholesky(&CholeskyParams::new([1.0, 0.0, 0.0, 0.0]).unwrap()).unwrap();
        assert_close(
            rho.matrix(),
            &ComplexMatrix2::from_real([[1.0, 0.0], [0.0, 0.0]]),
            1e-15,
        );

        let rho =
            density_from_cholesky(&CholeskyParams::new([1.0, 1.0, 0.0, 0.0]).unwrap()).unwrap();
        assert_close(
            rho.matrix(),
            &ComplexMatrix2::from_real([[0.5, 0.0], [0.0, 0.5]]),
            1e-15,
        );
    }

    #[test]
    fn cholesky_matches_explicit_product() {
        // Oracle: build T, multiply T^dagger T entry by entry, divide by the trace.
        let t = [1.0, 1.0, 1.0, 0.0];
        let tm = ComplexMatrix2([
            [Complex64::new(t[0], 0.0), ZERO],
            [Complex64::new(t[2], t[3]), Complex64::new(t[1], 0.0)],
        ]);
        let product = tm.adjoint() * tm;
        let expected = product.scale(1.0 / product.trace().re);
        assert_close(
            &expected,
            &ComplexMatrix2::from_real([[2.0 / 3.0, 1.0 / 3.0], [1.0 / 3.0, 1.0 / 3.0]]),
            1e-15,
        );

        let rho = density_from_cholesky(&CholeskyParams::new(t).unwrap()).unwrap();
        assert_close(rho.matrix(), &expected, 1e-15);
    }

    #[test]
    fn degenerate_cholesky_is_an_error() {
        assert!(matches!(
            CholeskyParams::new([0.0; 4]),
            Err(Error::DegenerateParameters(_))
        ));
        assert!(matches!(
            CholeskyParams::new([f64::INFINITY, 0.0, 0.0, 0.0]),
            Err(Error::NonFiniteParameters)
        ));
        assert!(cholesky_raw(&[1e-13, 0.0, 0.0, 0.0]).is_none());
    }

    #[test]
    fn sic_povm_invariants() {
        let povm = sic_povm();
        let ops = povm.operators();
        let sum = ops.iter().fold(ComplexMatrix2::ZERO, |acc, m| acc + *m);
        assert_close(&sum, &ComplexMatrix2::IDENTITY, 1e-12);
        for (i, mi) in ops.iter().enumerate() {
            assert!(mi.hermiticity_defect() <= 1e-12);
            assert!(mi.hermitian_eigenvalues()[0] >= -1e-12);
            assert!((mi.trace().re - 0.5).abs() <= 1e-12);
            for (j, mj) in ops.iter().enumerate() {
                if i != j {
                    // (1/8)(1 + r_i . r_j) with r_i . r_j = -1/3
                    assert!((mi.trace_product(mj).re - 1.0 / 12.0).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn born_probabilities_examples() {
        let povm = sic_povm();
        let p = born_probabilities(&DensityMatrix::maximally_mixed(), &povm);
        for pj in p {
            assert!((pj - 0.25).abs() < 1e-15);
        }

        let north = DensityMatrix::from_bloch([0.0, 0.0, 1.0]).unwrap();
        let hi = (1.0 + 1.0 / 3.0_f64.sqrt()) / 4.0;
        let lo = (1.0 - 1.0 / 3.0_f64.sqrt()) / 4.0;
        let p = born_probabilities(&north, &povm);
        for (got, want) in p.iter().zip([hi, lo, lo, hi]) {
            assert!((got - want).abs() < 1e-15, "{p:?}");
        }
    }

    #[test]
    fn fidelity_examples() {
        let a = DensityMatrix::from_bloch([0.0, 0.0, 1.0]).unwrap();
        let b = DensityMatrix::from_bloch([0.0, 0.0, -1.0]).unwrap();
        assert!(fidelity(&a, &b).abs() < 1e-15);
        assert!((fidelity(&a, &a) - 1.0).abs() < 1e-15);
        assert!((fidelity(&a, &DensityMatrix::maximally_mixed()) - 0.5).abs() < 1e-15);

        let mixed = DensityMatrix::from_bloch([0.1, -0.2, 0.3]).unwrap();
        assert!((fidelity(&mixed, &mixed) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_validation_rejects_unphysical() {
        assert!(DensityMatrix::new(ComplexMatrix2::from_real([[1.0, 0.0], [0.0, 1.0]])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix2::from_real([[1.5, 0.0], [0.0, -0.5]])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix2::from_real([[0.5, 0.3], [0.0, 0.5]])).is_err());
        assert!(DensityMatrix::from_bloch([1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn bloch_round_trip() {
        let s = [0.3, -0.4, 0.5];
        let rho = DensityMatrix::from_bloch(s).unwrap();
        for (a, b) in rho.bloch_vector().iter().zip(s) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
