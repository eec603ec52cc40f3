//! Spin-j observables: component matrices, direction operators, their
//! eigenprojectors, and observables with relabeled outcomes.
//!
//! Basis convention throughout: the (2j+1)-dimensional space is ordered by
//! descending m, so |+j⟩ ≡ (1, 0, …, 0). Label vectors are stored by
//! ascending m (λ_{-j} first) and mapped internally.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{Complex64, ComplexMatrix};
use crate::tol::{Tolerances, MAX_TWO_J};

/// Spin magnitude j, stored as 2j so half-integers stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinMagnitude {
    two_j: u32,
}

impl SpinMagnitude {
    pub fn from_two_j(two_j: u32) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::InvalidArgument("spin must satisfy 2j ≥ 1".into()));
        }
        if two_j > MAX_TWO_J {
            return Err(Error::InvalidArgument(format!(
                "spin 2j = {two_j} exceeds supported cap {MAX_TWO_J}"
            )));
        }
        Ok(SpinMagnitude { two_j })
    }

    pub const HALF: SpinMagnitude = SpinMagnitude { two_j: 1 };
    pub const ONE: SpinMagnitude = SpinMagnitude { two_j: 2 };
    pub const THREE_HALVES: SpinMagnitude = SpinMagnitude { two_j: 3 };

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// Matrix dimension d = 2j + 1.
    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    /// m values by ascending order (−j, …, +j), matching label storage.
    pub fn m_ascending(&self) -> Vec<f64> {
        let j = self.j();
        (0..self.dim()).map(|i| -j + i as f64).collect()
    }

    /// Basis index of the |m⟩ vector (descending-m ordering).
    pub fn basis_index(&self, m_ascending_index: usize) -> usize {
        self.two_j as usize - m_ascending_index
    }
}

impl fmt::Display for SpinMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_j.is_multiple_of(2) {
            write!(f, "{}", self.two_j / 2)
        } else {
            write!(f, "{}/2", self.two_j)
        }
    }
}

impl FromStr for SpinMagnitude {
    type Err = Error;

    /// Accepts "1", "3/2", "1.5".
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("cannot parse spin magnitude from {s:?}"));
        if let Some((num, den)) = s.split_once('/') {
            let n: u32 = num.trim().parse().map_err(|_| bad())?;
            let d: u32 = den.trim().parse().map_err(|_| bad())?;
            if d == 2 {
                return SpinMagnitude::from_two_j(n);
            }
            if d == 1 {
                return SpinMagnitude::from_two_j(2 * n);
            }
            return Err(bad());
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        let two_j = 2.0 * x;
        if two_j.fract() != 0.0 || two_j < 1.0 {
            return Err(bad());
        }
        SpinMagnitude::from_two_j(two_j as u32)
    }
}

/// Measurement direction in spherical coordinates, radians.
///
/// Values outside θ ∈ [0, π], φ ∈ [0, 2π) are normalized on construction
/// (θ reflected through the pole with φ advanced by π, φ wrapped).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::NonFinite("direction angle"));
        }
        let tau = std::f64::consts::TAU;
        let mut t = theta.rem_euclid(tau);
        let mut p = phi;
        if t > std::f64::consts::PI {
            t = tau - t;
            p += std::f64::consts::PI;
        }
        let p = p.rem_euclid(tau);
        Ok(Direction { theta: t, phi: p })
    }

    /// +z axis (θ = φ = 0).
    pub fn z() -> Self {
        Direction { theta: 0.0, phi: 0.0 }
    }

    /// Direction at signed angle `alpha` from +z within the x–z plane,
    /// i.e. the φ ∈ {0, π} meridian used by the default CHSH search.
    pub fn from_plane_angle(alpha: f64) -> Result<Self> {
        Direction::new(alpha, 0.0)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Outcome labels λ_{-j}, …, λ_{+j} ordered by ascending m.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelVector {
    labels: Vec<f64>,
}

impl LabelVector {
    pub fn new(labels: Vec<f64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument("label vector must not be empty".into()));
        }
        if labels.iter().any(|l| !l.is_finite()) {
            return Err(Error::NonFinite("outcome label"));
        }
        Ok(LabelVector { labels })
    }

    /// Spin-state labels (−j, −j+1, …, +j).
    pub fn spin(j: SpinMagnitude) -> Self {
        LabelVector {
            labels: j.m_ascending(),
        }
    }

    /// Dichotomic ±1 labels for a qubit.
    pub fn dichotomic() -> Self {
        LabelVector {
            labels: vec![-1.0, 1.0],
        }
    }

    /// Spin-1 labels (1, 0, 1): "is the spin along this axis nonzero?".
    pub fn kochen_specker() -> Self {
        LabelVector {
            labels: vec![1.0, 0.0, 1.0],
        }
    }

    /// Spin-1 labels (0, 1, 0), the complementary question.
    pub fn kochen_specker_inverted() -> Self {
        LabelVector {
            labels: vec![0.0, 1.0, 0.0],
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.labels
    }

    /// Largest |λ|.
    pub fn max_abs(&self) -> f64 {
        self.labels.iter().fold(0.0, |a, &l| a.max(l.abs()))
    }
}

impl FromStr for LabelVector {
    type Err = Error;

    /// Comma-separated list, e.g. "-1,0,1".
    fn from_str(s: &str) -> Result<Self> {
        let labels: std::result::Result<Vec<f64>, _> =
            s.split(',').map(|p| p.trim().parse::<f64>()).collect();
        let labels = labels
            .map_err(|_| Error::InvalidArgument(format!("cannot parse labels from {s:?}")))?;
        LabelVector::new(labels)
    }
}

/// A one-particle measurement: spin magnitude, direction, outcome labels,
/// the Hermitian matrix Σ_m λ_m F_m, and the cached eigenprojectors F_m.
#[derive(Debug, Clone)]
pub struct SpinObservable {
    j: SpinMagnitude,
    dir: Direction,
    labels: LabelVector,
    matrix: ComplexMatrix,
    projectors: Vec<ComplexMatrix>,
}

impl SpinObservable {
    pub fn j(&self) -> SpinMagnitude {
        self.j
    }

    pub fn dir(&self) -> Direction {
        self.dir
    }

    pub fn labels(&self) -> &LabelVector {
        &self.labels
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Projectors ordered by ascending m, like the labels.
    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }
}

/// Angular momentum component matrices (Jx, Jy, Jz) in units of ħ,
/// basis ordered by descending m.
pub fn spin_component_matrices(j: SpinMagnitude) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let d = j.dim();
    let jj = j.j();
    let mut jz = ComplexMatrix::zeros(d);
    let mut jplus = ComplexMatrix::zeros(d);
    for i in 0..d {
        let m = jj - i as f64;
        jz.set(i, i, Complex64::new(m, 0.0));
        if i > 0 {
            // J₊|j,m⟩ = √(j(j+1) − m(m+1)) |j,m+1⟩ and |j,m+1⟩ sits at i−1.
            let amp = (jj * (jj + 1.0) - m * (m + 1.0)).sqrt();
            jplus.set(i - 1, i, Complex64::new(amp, 0.0));
        }
    }
    let jminus = jplus.dagger();
    let jx = jplus.add(&jminus).expect("same dim").scale_re(0.5);
    let jy = jplus
        .sub(&jminus)
        .expect("same dim")
        .scale(Complex64::new(0.0, -0.5));
    (jx, jy, jz)
}

/// S_j(θ, φ) = sinθ cosφ·Jx + sinθ sinφ·Jy + cosθ·Jz.
pub fn spin_operator(j: SpinMagnitude, dir: Direction) -> ComplexMatrix {
    let (jx, jy, jz) = spin_component_matrices(j);
    let (st, ct) = (dir.theta().sin(), dir.theta().cos());
    let (sp, cp) = (dir.phi().sin(), dir.phi().cos());
    jx.scale_re(st * cp)
        .add(&jy.scale_re(st * sp))
        .expect("same dim")
        .add(&jz.scale_re(ct))
        .expect("same dim")
}

/// Eigenprojectors F_m(θ, φ) of S_j(θ, φ), ordered by ascending m.
pub fn eigenprojectors(j: SpinMagnitude, dir: Direction) -> Result<Vec<ComplexMatrix>> {
    eigenprojectors_with(j, dir, &Tolerances::default())
}

pub fn eigenprojectors_with(
    j: SpinMagnitude,
    dir: Direction,
    tol: &Tolerances,
) -> Result<Vec<ComplexMatrix>> {
    let s = spin_operator(j, dir);
    let es = s.eigh_with(tol)?;
    let ms = j.m_ascending();
    let mut out = Vec::with_capacity(ms.len());
    for (k, &m) in ms.iter().enumerate() {
        let lambda = es.eigenvalues()[k];
        if (lambda - m).abs() > tol.eigenvalue_match {
            return Err(Error::EigenvalueMatch {
                m,
                tol: tol.eigenvalue_match,
            });
        }
        out.push(es.projector(k));
    }
    Ok(out)
}

/// Observable R(θ, φ) = Σ_m λ_m F_m(θ, φ) with arbitrary outcome labels.
pub fn labeled_observable(
    j: SpinMagnitude,
    dir: Direction,
    labels: LabelVector,
) -> Result<SpinObservable> {
    if labels.len() != j.dim() {
        return Err(Error::DimMismatch(format!(
            "label vector length {} does not match 2j+1 = {}",
            labels.len(),
            j.dim()
        )));
    }
    let projectors = eigenprojectors(j, dir)?;
    let mut matrix = ComplexMatrix::zeros(j.dim());
    for (f, &lambda) in projectors.iter().zip(labels.as_slice()) {
        matrix = matrix.add(&f.scale_re(lambda)).expect("same dim");
    }
    Ok(SpinObservable {
        j,
        dir,
        labels,
        matrix,
        projectors,
    })
}

/// Observable measuring spin state in direction `dir`.
pub fn spin_state_observable(j: SpinMagnitude, dir: Direction) -> Result<SpinObservable> {
    labeled_observable(j, dir, LabelVector::spin(j))
}

/// The degenerate spin-1 observable with labels (1, 0, 1), or its
/// inverted form (0, 1, 0).
pub fn ks_observable(dir: Direction, inverted: bool) -> Result<SpinObservable> {
    let labels = if inverted {
        LabelVector::kochen_specker_inverted()
    } else {
        LabelVector::kochen_specker()
    };
    labeled_observable(SpinMagnitude::ONE, dir, labels)
}
