//! Fictitious-field loops and their Berry phases.
//!
//! Units: frequencies in rad/ns, times in ns (ħ = 1).
//!
//! Sign convention. [`solid_angle`] is the signed quadrature
//! `Ω = ∫ (B_x ∂ₜB_y − B_y ∂ₜB_x) / (|B|(B_z + |B|)) dt`, positive for a loop
//! traversed with the azimuth increasing ([`Traversal::Forward`]). Under
//! `H = σ·B/2` the upper eigenstate `|ψ₊⟩` picks up the geometric phase `−Ω/2`.
//! [`cone_berry_phase`] returns the magnitude `π(1 − cos ξ)`, so a gate whose
//! `|ψ₊⟩` phase is `+γ` is realised by the [`Traversal::Backward`] loop built
//! by [`gate_loop`]. Flipping the traversal flips every Berry phase at once.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::fmath;
use crate::quadrature::{self, simpson};
use crate::{Error, Result};

/// Relative distance from the south pole below which Ω is singular.
pub const SOUTH_POLE_EPS: f64 = 1e-9;

/// Direction in which the azimuth of the field is swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Traversal {
    /// φ increasing.
    Forward,
    /// φ decreasing.
    Backward,
}

impl Traversal {
    pub fn sign(self) -> f64 {
        match self {
            Traversal::Forward => 1.0,
            Traversal::Backward => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Traversal::Forward => Traversal::Backward,
            Traversal::Backward => Traversal::Forward,
        }
    }
}

/// A closed loop `B(t) = s·(ν cos φ(t), ν sin φ(t) + y₀, Δω)` with
/// `φ(t) = φ_start ± 2πt/τ₀` and `s = −1` for a reversed segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPath {
    rabi: f64,
    detuning: f64,
    y_offset: f64,
    phi_start: f64,
    traversal: Traversal,
    period: f64,
    reversed: bool,
}

impl FieldPath {
    pub fn new(
        rabi: f64,
        detuning: f64,
        y_offset: f64,
        phi_start: f64,
        traversal: Traversal,
        period: f64,
    ) -> Result<Self> {
        for (v, what) in [
            (rabi, "Rabi frequency must be finite"),
            (detuning, "detuning must be finite"),
            (y_offset, "field offset must be finite"),
            (phi_start, "start azimuth must be finite"),
            (period, "loop period must be finite"),
        ] {
            Error::check_finite(v, what)?;
        }
        if rabi < 0.0 {
            return Err(Error::Domain("Rabi frequency must be non-negative"));
        }
        if period <= 0.0 {
            return Err(Error::Domain("loop period must be positive"));
        }
        Ok(Self {
            rabi,
            detuning,
            y_offset,
            phi_start,
            traversal,
            period,
            reversed: false,
        })
    }

    pub fn rabi(&self) -> f64 {
        self.rabi
    }
    pub fn detuning(&self) -> f64 {
        self.detuning
    }
    pub fn y_offset(&self) -> f64 {
        self.y_offset
    }
    pub fn phi_start(&self) -> f64 {
        self.phi_start
    }
    pub fn traversal(&self) -> Traversal {
        self.traversal
    }
    pub fn period(&self) -> f64 {
        self.period
    }
    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    fn orientation(&self) -> f64 {
        if self.reversed {
            -1.0
        } else {
            1.0
        }
    }

    fn angular_rate(&self) -> f64 {
        self.traversal.sign() * 2.0 * PI / self.period
    }

    pub fn azimuth(&self, t: f64) -> f64 {
        self.phi_start + self.angular_rate() * t
    }

    /// Field vector at local time `t ∈ [0, τ₀]`.
    pub fn field(&self, t: f64) -> [f64; 3] {
        let (s, c) = fmath::sin_cos(self.azimuth(t));
        let o = self.orientation();
        [
            o * self.rabi * c,
            o * (self.rabi * s + self.y_offset),
            o * self.detuning,
        ]
    }

    /// `dB/dt` at local time `t`.
    pub fn field_rate(&self, t: f64) -> [f64; 3] {
        let (s, c) = fmath::sin_cos(self.azimuth(t));
        let k = self.orientation() * self.rabi * self.angular_rate();
        [-k * s, k * c, 0.0]
    }

    pub fn magnitude(&self, t: f64) -> f64 {
        norm(self.field(t))
    }

    /// The pointwise negated loop, `−B(t)`.
    pub fn negated(&self) -> Self {
        Self {
            reversed: !self.reversed,
            ..*self
        }
    }

    pub fn with_traversal(&self, traversal: Traversal) -> Self {
        Self { traversal, ..*self }
    }

    /// `c·B(t)` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Domain("field scale factor must be positive"));
        }
        Ok(Self {
            rabi: self.rabi * c,
            detuning: self.detuning * c,
            y_offset: self.y_offset * c,
            ..*self
        })
    }

    /// `|B(τ₀) − B(0)|`.
    pub fn closure_error(&self) -> f64 {
        norm(sub(self.field(self.period), self.field(0.0)))
    }

    /// Largest `|B|` on the loop.
    pub fn max_magnitude(&self) -> f64 {
        // |B|² = ν² + y₀² + Δω² + 2νy₀ sin φ, largest where sin φ = sign(y₀).
        let r2 = self.rabi * self.rabi
            + self.y_offset * self.y_offset
            + self.detuning * self.detuning
            + 2.0 * self.rabi * self.y_offset.abs();
        fmath::sqrt(r2)
    }
}

/// Cone loop starting at azimuth `η`, swept forward.
pub fn cone_path(rabi: f64, detuning: f64, eta: f64, period: f64) -> Result<FieldPath> {
    FieldPath::new(rabi, detuning, 0.0, eta, Traversal::Forward, period)
}

/// Cone loop swept backward: the orientation whose `|ψ₊⟩` Berry phase is
/// `+cone_berry_phase(ν, Δω)`, i.e. the physical loop behind the
/// single-qubit gates.
pub fn gate_loop(rabi: f64, detuning: f64, eta: f64, period: f64) -> Result<FieldPath> {
    FieldPath::new(rabi, detuning, 0.0, eta, Traversal::Backward, period)
}

/// Cone displaced by `y_offset` along y, starting at φ = π/2 and swept
/// forward. This is the target-qubit loop of the σy⊗σy coupled pair.
pub fn shifted_cone(rabi: f64, detuning: f64, y_offset: f64, period: f64) -> Result<FieldPath> {
    FieldPath::new(rabi, detuning, y_offset, FRAC_PI_2, Traversal::Forward, period)
}

/// Consecutive loop segments forming one gate operation.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSequence {
    segments: Vec<FieldPath>,
}

impl LoopSequence {
    pub fn single(path: FieldPath) -> Self {
        Self {
            segments: alloc::vec![path],
        }
    }

    pub fn segments(&self) -> &[FieldPath] {
        &self.segments
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.period()).sum()
    }

    /// Field at global time `t`. At a segment boundary the value of the later
    /// segment is returned, so `field(τ₀)` is `B(τ₀ + 0)`.
    pub fn field(&self, t: f64) -> [f64; 3] {
        let mut start = 0.0;
        let last = self.segments.len() - 1;
        for (i, seg) in self.segments.iter().enumerate() {
            let end = start + seg.period();
            if t < end || i == last {
                return seg.field(t - start);
            }
            start = end;
        }
        unreachable!("sequences are never empty")
    }

    /// Largest `|B_{k+1}(0) + B_k(τ)|` over the segment boundaries, i.e. the
    /// violation of the prompt-reversal rule.
    pub fn reversal_mismatch(&self) -> f64 {
        self.segments
            .windows(2)
            .map(|w| norm(add(w[1].field(0.0), w[0].field(w[0].period()))))
            .fold(0.0, f64::max)
    }
}

/// The two-loop protocol: `path`, then `−path` for another period.
pub fn two_loop(path: FieldPath) -> LoopSequence {
    LoopSequence {
        segments: alloc::vec![path, path.negated()],
    }
}

/// Signed solid angle enclosed by `path`, by composite Simpson quadrature
/// of the loop integrand over one period.
pub fn solid_angle(path: &FieldPath, n_steps: usize) -> Result<f64> {
    quadrature::check_steps(n_steps)?;
    simpson(
        |t| {
            let b = path.field(t);
            let db = path.field_rate(t);
            let r = norm(b);
            let pole = b[2] + r;
            if r == 0.0 || pole < SOUTH_POLE_EPS * r {
                return Err(Error::Singularity(
                    "field passes through the south pole of the solid-angle gauge",
                ));
            }
            Ok((b[0] * db[1] - b[1] * db[0]) / (r * pole))
        },
        0.0,
        path.period(),
        n_steps,
    )
}

/// Cone Berry phase magnitude `π(1 − Δω/√(Δω² + ν²))`; `|ψ₋⟩` carries the
/// opposite sign.
pub fn cone_berry_phase(rabi: f64, detuning: f64) -> Result<f64> {
    Error::check_finite(rabi, "Rabi frequency must be finite")?;
    Error::check_finite(detuning, "detuning must be finite")?;
    let r = fmath::hypot(rabi, detuning);
    if r == 0.0 {
        return Err(Error::Domain("cone Berry phase undefined for a zero field"));
    }
    Ok(PI * (1.0 - detuning / r))
}

/// Polar and azimuthal angles `(ξ, η)` of a field vector. `η = 0` when the
/// transverse part vanishes.
pub fn eigen_angles(field: [f64; 3]) -> Result<(f64, f64)> {
    let [x, y, z] = field;
    let transverse = fmath::hypot(x, y);
    if transverse == 0.0 && z == 0.0 {
        return Err(Error::Domain("eigen angles undefined for a zero field"));
    }
    let eta = if transverse == 0.0 { 0.0 } else { fmath::atan2(y, x) };
    Ok((fmath::atan2(transverse, z), eta))
}

pub(crate) fn norm(v: [f64; 3]) -> f64 {
    fmath::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    const W: f64 = 2.0 * PI * 0.3;

    #[test]
    fn cone_path_angles() {
        let p = cone_path(0.0, W, 0.0, 10.0).unwrap();
        let (xi, _) = eigen_angles(p.field(0.0)).unwrap();
        assert_eq!(xi, 0.0);
        assert!(p.closure_error() < 1e-12);

        let p = cone_path(W, W, 0.0, 10.0).unwrap();
        let (xi, eta) = eigen_angles(p.field(0.0)).unwrap();
        assert!((xi - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(eta, 0.0);

        let p = cone_path(W, 0.0, 0.0, 10.0).unwrap();
        let (xi, _) = eigen_angles(p.field(0.0)).unwrap();
        assert!((xi - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn cone_path_rejects_bad_period() {
        assert!(cone_path(W, W, 0.0, 0.0).is_err());
        assert!(cone_path(W, W, 0.0, -1.0).is_err());
        assert!(cone_path(-1.0, W, 0.0, 1.0).is_err());
    }

    #[test]
    fn two_loop_structure() {
        let p = cone_path(W, W, 0.3, 7.0).unwrap();
        let seq = two_loop(p);
        assert_eq!(seq.segments().len(), 2);
        assert_eq!(seq.segments()[1].field(0.0)[2], -W);
        assert!((seq.duration() - 14.0).abs() < 1e-15);
        assert!(seq.reversal_mismatch() < 1e-12);
        let before = p.field(7.0);
        let after = seq.field(7.0);
        for k in 0..3 {
            assert!((after[k] + before[k]).abs() < 1e-12);
        }
        for t in [0.5, 2.0, 6.9] {
            let a = seq.field(t + 7.0);
            let b = p.field(t);
            for k in 0..3 {
                assert!((a[k] + b[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn solid_angle_examples() {
        let hemi = cone_path(W, 0.0, 0.0, 5.0).unwrap();
        assert!((solid_angle(&hemi, 4096).unwrap() - 2.0 * PI).abs() < 1e-10);

        let cone = cone_path(W, W, 0.0, 5.0).unwrap();
        let want = 2.0 * PI * (1.0 - FRAC_1_SQRT_2);
        assert!((solid_angle(&cone, 4096).unwrap() - want).abs() < 1e-10);
        assert!((want - 1.8403).abs() < 1e-4);

        let flat = cone_path(0.0, W, 0.0, 5.0).unwrap();
        assert_eq!(solid_angle(&flat, 4096).unwrap(), 0.0);
    }

    #[test]
    fn solid_angle_south_pole_is_singular() {
        let down = cone_path(0.0, -W, 0.0, 5.0).unwrap();
        assert!(matches!(
            solid_angle(&down, 4096),
            Err(Error::Singularity(_))
        ));
        // ν = y₀ and Δω < 0: the transverse field vanishes at φ = 3π/2.
        let through = shifted_cone(W, -W, W, 5.0).unwrap();
        assert!(matches!(
            solid_angle(&through, 4096),
            Err(Error::Singularity(_))
        ));
        let tilted = cone_path(W, -W, 0.0, 5.0).unwrap();
        assert!(solid_angle(&tilted, 4096).is_ok());
    }

    #[test]
    fn solid_angle_rejects_coarse_grids() {
        let cone = cone_path(W, W, 0.0, 5.0).unwrap();
        assert!(matches!(
            solid_angle(&cone, 32),
            Err(Error::Resolution { .. })
        ));
    }

    #[test]
    fn cone_berry_phase_examples() {
        assert_eq!(cone_berry_phase(0.0, W).unwrap(), 0.0);
        assert!((cone_berry_phase(W, 0.0).unwrap() - PI).abs() < 1e-15);
        let v = cone_berry_phase(W, W).unwrap();
        assert!((v - PI * (1.0 - FRAC_1_SQRT_2)).abs() < 1e-15);
        assert!((v - 0.92015).abs() < 1e-5);
        assert!(cone_berry_phase(0.0, 0.0).is_err());
    }

    #[test]
    fn eigen_angles_examples() {
        let (xi, eta) = eigen_angles([W, 0.0, 2.0]).unwrap();
        assert_eq!(eta, 0.0);
        assert!((xi - libm::atan2(W, 2.0)).abs() < 1e-15);
        let (_, eta) = eigen_angles([0.0, W, 2.0]).unwrap();
        assert!((eta - FRAC_PI_2).abs() < 1e-15);
        let (xi, _) = eigen_angles([0.0, 0.0, 1.0]).unwrap();
        assert_eq!(xi, 0.0);
        assert!(eigen_angles([0.0; 3]).is_err());
    }

    #[test]
    fn traversal_flip_negates_solid_angle() {
        let p = shifted_cone(1.1, 0.7, -0.3, 3.0).unwrap();
        let fwd = solid_angle(&p, 4096).unwrap();
        let bwd = solid_angle(&p.with_traversal(Traversal::Backward), 4096).unwrap();
        assert!((fwd + bwd).abs() < 1e-12);
    }

    #[test]
    fn solid_angle_is_scale_invariant() {
        let p = shifted_cone(1.1, 0.7, 0.4, 3.0).unwrap();
        let base = solid_angle(&p, 4096).unwrap();
        for c in [0.5, 2.0, 10.0] {
            let v = solid_angle(&p.scaled(c).unwrap(), 4096).unwrap();
            assert!((v - base).abs() < 1e-12, "c = {c}");
        }
        assert!(p.scaled(0.0).is_err());
    }

    #[test]
    fn max_magnitude_bounds_samples() {
        let p = shifted_cone(1.1, 0.7, -0.4, 3.0).unwrap();
        let m = p.max_magnitude();
        for k in 0..100 {
            assert!(p.magnitude(3.0 * k as f64 / 100.0) <= m + 1e-12);
        }
    }
}
