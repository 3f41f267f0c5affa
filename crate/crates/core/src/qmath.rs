//! Fixed-size complex linear algebra for one and two qubits.
//!
//! Global phases are kept as-is. Anything that should ignore them compares
//! through [`Ket::fidelity`].

use core::ops::Mul;

use num_complex::Complex;

use crate::fmath;
use crate::{Error, Result};

pub type C64 = Complex<f64>;

pub use crate::fmath::wrap_angle;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Tolerance used when constructors validate normalization or unitarity.
pub const ALGEBRAIC_TOL: f64 = 1e-10;

/// A pure state of dimension `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket<const N: usize> {
    amps: [C64; N],
}

pub type StateVec2 = Ket<2>;
pub type StateVec4 = Ket<4>;

impl<const N: usize> Ket<N> {
    /// Wraps amplitudes that are already normalized to within 1e-12.
    pub fn new(amps: [C64; N]) -> Result<Self> {
        let ket = Self { amps };
        if (ket.norm_sqr() - 1.0).abs() > 1e-12 {
            return Err(Error::Domain("state vector is not normalized"));
        }
        Ok(ket)
    }

    /// Rescales the amplitudes to unit norm.
    pub fn normalized(amps: [C64; N]) -> Result<Self> {
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !(n2.is_finite() && n2 > 0.0) {
            return Err(Error::Domain("cannot normalize a zero or non-finite vector"));
        }
        let inv = 1.0 / fmath::sqrt(n2);
        Ok(Self {
            amps: amps.map(|a| a * inv),
        })
    }

    pub(crate) fn from_raw(amps: [C64; N]) -> Self {
        Self { amps }
    }

    /// The computational basis vector `|k⟩`.
    pub fn basis(k: usize) -> Self {
        assert!(k < N, "basis index out of range");
        let mut amps = [ZERO; N];
        amps[k] = ONE;
        Self { amps }
    }

    pub fn amplitudes(&self) -> &[C64; N] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Multiplies every amplitude by `e^{iα}`.
    pub fn with_global_phase(&self, alpha: f64) -> Self {
        let p = C64::from_polar(1.0, alpha);
        Self {
            amps: self.amps.map(|a| a * p),
        }
    }
}

/// `[cos(θ/2), e^{iφ} sin(θ/2)]ᵀ`.
pub fn bloch_to_state(theta: f64, phi: f64) -> Result<StateVec2> {
    Error::check_finite(theta, "polar angle must be finite")?;
    Error::check_finite(phi, "azimuth must be finite")?;
    let (s, c) = fmath::sin_cos(theta / 2.0);
    Ok(Ket::from_raw([C64::new(c, 0.0), C64::from_polar(s, phi)]))
}

/// Two-qubit product state `a ⊗ b`.
pub fn tensor_state(a: &StateVec2, b: &StateVec2) -> StateVec4 {
    let (x, y) = (a.amps, b.amps);
    Ket::from_raw([x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1]])
}

/// Concurrence `2|a₀₀a₁₁ − a₀₁a₁₀|` of a two-qubit pure state.
pub fn concurrence(psi: &StateVec4) -> f64 {
    let a = psi.amps;
    2.0 * (a[0] * a[3] - a[1] * a[2]).norm()
}

/// A 2×2 density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Density2 {
    m: [[C64; 2]; 2],
}

impl Density2 {
    /// Validates hermiticity and unit trace to 1e-12.
    pub fn new(m: [[C64; 2]; 2]) -> Result<Self> {
        let rho = Self { m };
        if rho.hermiticity_defect() > 1e-12 {
            return Err(Error::Domain("density matrix is not Hermitian"));
        }
        if (rho.trace() - 1.0).abs() > 1e-12 {
            return Err(Error::Domain("density matrix trace is not one"));
        }
        Ok(rho)
    }

    /// `(I + r·σ)/2`. Hermitian with unit trace for any real `r`; positivity
    /// needs `|r| ≤ 1` and is not enforced.
    pub fn from_bloch(r: [f64; 3]) -> Self {
        let [x, y, z] = r;
        Self {
            m: [
                [C64::new((1.0 + z) / 2.0, 0.0), C64::new(x / 2.0, -y / 2.0)],
                [C64::new(x / 2.0, y / 2.0), C64::new((1.0 - z) / 2.0, 0.0)],
            ],
        }
    }

    pub fn maximally_mixed() -> Self {
        Self::from_bloch([0.0; 3])
    }

    pub fn entries(&self) -> &[[C64; 2]; 2] {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        (self.m[0][0] + self.m[1][1]).re
    }

    fn hermiticity_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.m[i][j] - self.m[j][i].conj()).norm());
            }
        }
        d
    }

    /// Bloch components `rᵢ = Tr(ρσᵢ)`.
    pub fn bloch(&self) -> [f64; 3] {
        let off = self.m[1][0];
        [
            2.0 * off.re,
            2.0 * off.im,
            (self.m[0][0] - self.m[1][1]).re,
        ]
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        let mut p = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                p += (self.m[i][j] * self.m[j][i]).re;
            }
        }
        p
    }

    /// Eigenvalues in ascending order. Slightly negative values are possible
    /// for linear-inversion estimates and are reported, not clipped.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let [x, y, z] = self.bloch();
        let r = fmath::sqrt(x * x + y * y + z * z);
        let t = self.trace();
        [(t - r) / 2.0, (t + r) / 2.0]
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        d
    }

    /// `UρU†`.
    pub fn conjugate_by(&self, u: &Unitary2) -> Self {
        let mut out = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = ZERO;
                for k in 0..2 {
                    for l in 0..2 {
                        acc += u.m[i][k] * self.m[k][l] * u.m[j][l].conj();
                    }
                }
                out[i][j] = acc;
            }
        }
        Self { m: out }
    }
}

/// `|ψ⟩⟨ψ|`.
pub fn state_to_density(psi: &StateVec2) -> Density2 {
    let a = psi.amps;
    Density2 {
        m: [
            [a[0] * a[0].conj(), a[0] * a[1].conj()],
            [a[1] * a[0].conj(), a[1] * a[1].conj()],
        ],
    }
}

/// A square complex matrix expected to be unitary.
///
/// Constructors that build gates from closed forms skip the check; [`Unitary::new`]
/// verifies it for externally supplied entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary<const N: usize> {
    m: [[C64; N]; N],
}

pub type Unitary2 = Unitary<2>;
pub type Unitary4 = Unitary<4>;

/// Outcome of a unitarity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitarityCheck {
    pub is_unitary: bool,
    /// `max |(M†M − I)ᵢⱼ|`.
    pub max_deviation: f64,
}

impl<const N: usize> Unitary<N> {
    pub fn new(m: [[C64; N]; N]) -> Result<Self> {
        let u = Self { m };
        if u.unitarity_defect() > ALGEBRAIC_TOL {
            return Err(Error::Domain("matrix is not unitary"));
        }
        Ok(u)
    }

    pub(crate) fn from_raw(m: [[C64; N]; N]) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        let mut m = [[ZERO; N]; N];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = ONE;
        }
        Self { m }
    }

    pub fn entries(&self) -> &[[C64; N]; N] {
        &self.m
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.m[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = [[ZERO; N]; N];
        for i in 0..N {
            for j in 0..N {
                out[i][j] = self.m[j][i].conj();
            }
        }
        Self { m: out }
    }

    pub fn apply(&self, psi: &Ket<N>) -> Ket<N> {
        let mut out = [ZERO; N];
        for (i, row) in self.m.iter().enumerate() {
            out[i] = row
                .iter()
                .zip(psi.amps.iter())
                .fold(ZERO, |acc, (u, a)| acc + u * a);
        }
        Ket::from_raw(out)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            m: self.m.map(|row| row.map(|x| x * c)),
        }
    }

    /// `max |(U†U − I)ᵢⱼ|`.
    pub fn unitarity_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..N {
            for j in 0..N {
                let mut acc = ZERO;
                for k in 0..N {
                    acc += self.m[k][i].conj() * self.m[k][j];
                }
                if i == j {
                    acc -= ONE;
                }
                d = d.max(acc.norm());
            }
        }
        d
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..N {
            for j in 0..N {
                d = d.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        d
    }

    /// Frobenius norm of `self·other − other·self`.
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        let ab = *self * *other;
        let ba = *other * *self;
        let mut s = 0.0;
        for i in 0..N {
            for j in 0..N {
                s += (ab.m[i][j] - ba.m[i][j]).norm_sqr();
            }
        }
        fmath::sqrt(s)
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> C64 {
        let mut a = self.m;
        let mut det = ONE;
        for col in 0..N {
            let pivot = (col..N)
                .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
                .unwrap_or(col);
            if a[pivot][col].norm() == 0.0 {
                return ZERO;
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            det *= a[col][col];
            for r in col + 1..N {
                let f = a[r][col] / a[col][col];
                for c in col..N {
                    let v = a[col][c];
                    a[r][c] -= f * v;
                }
            }
        }
        det
    }
}

impl<const N: usize> Mul for Unitary<N> {
    type Output = Unitary<N>;

    fn mul(self, rhs: Self) -> Self::Output {
        let mut out = [[ZERO; N]; N];
        for i in 0..N {
            for j in 0..N {
                let mut acc = ZERO;
                for k in 0..N {
                    acc += self.m[i][k] * rhs.m[k][j];
                }
                out[i][j] = acc;
            }
        }
        Unitary { m: out }
    }
}

impl Unitary2 {
    pub fn pauli_x() -> Self {
        Self::from_raw([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn pauli_y() -> Self {
        Self::from_raw([[ZERO, -I], [I, ZERO]])
    }

    pub fn pauli_z() -> Self {
        Self::from_raw([[ONE, ZERO], [ZERO, -ONE]])
    }

    pub fn hadamard() -> Self {
        let h = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::from_raw([[h, h], [h, -h]])
    }

    /// `exp(−i α n·σ / 2)` for a unit axis `n`.
    pub fn rotation(axis: [f64; 3], angle: f64) -> Self {
        let (s, c) = fmath::sin_cos(angle / 2.0);
        let [x, y, z] = axis;
        Self::from_raw([
            [C64::new(c, -s * z), C64::new(-s * y, -s * x)],
            [C64::new(s * y, -s * x), C64::new(c, s * z)],
        ])
    }
}

impl Unitary4 {
    /// Block-diagonal `diag(a, b)`.
    pub fn block_diag(a: &Unitary2, b: &Unitary2) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a.m[i][j];
                m[i + 2][j + 2] = b.m[i][j];
            }
        }
        Self::from_raw(m)
    }

    /// The 2×2 block at block row `r`, block column `c`.
    pub fn block(&self, r: usize, c: usize) -> [[C64; 2]; 2] {
        let (r0, c0) = (2 * r, 2 * c);
        [
            [self.m[r0][c0], self.m[r0][c0 + 1]],
            [self.m[r0 + 1][c0], self.m[r0 + 1][c0 + 1]],
        ]
    }
}

/// Kronecker product `A ⊗ B`, with `A` acting on the first (most
/// significant) qubit.
pub fn tensor(a: &Unitary2, b: &Unitary2) -> Unitary4 {
    let mut m = [[ZERO; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m[2 * i + k][2 * j + l] = a.m[i][j] * b.m[k][l];
                }
            }
        }
    }
    Unitary::from_raw(m)
}

/// Checks `max |(M†M − I)ᵢⱼ| ≤ tol` for a row-major `dim × dim` matrix.
pub fn check_unitary(entries: &[C64], dim: usize, tol: f64) -> Result<UnitarityCheck> {
    if dim == 0 || entries.len() != dim * dim {
        return Err(Error::Domain("matrix is not square"));
    }
    let mut dev: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = ZERO;
            for k in 0..dim {
                acc += entries[k * dim + i].conj() * entries[k * dim + j];
            }
            if i == j {
                acc -= ONE;
            }
            dev = dev.max(acc.norm());
        }
    }
    Ok(UnitarityCheck {
        is_unitary: dev <= tol,
        max_deviation: dev,
    })
}
