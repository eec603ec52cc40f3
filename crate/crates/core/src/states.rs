//! Singlet states: two-particle spin-j singlets built from Clebsch–Gordan
//! coefficients, the two explicit four-qubit singlets, density matrices,
//! and the uniqueness-property check.
//!
//! Tensor convention: particle 1 is the slowest-varying index, matching the
//! Kronecker-product ordering of `linalg`. Per-particle bases are ordered by
//! descending m, so for qubits |+⟩ ≡ (1, 0).

use crate::correlate;
use crate::error::{Error, Result};
use crate::linalg::{Complex64, ComplexMatrix, C_ZERO};
use crate::spin::{Direction, SpinMagnitude};
use crate::tol::Tolerances;

/// Normalized multipartite state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Build from per-particle dimensions and amplitudes; the vector must
    /// already be normalized to within 1e-12.
    pub fn new(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument("every particle dimension must be ≥ 1".into()));
        }
        if amplitudes.len() != total {
            return Err(Error::DimMismatch(format!(
                "state length {} does not match product of dims {total}",
                amplitudes.len()
            )));
        }
        if amplitudes
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite("state amplitude"));
        }
        let sv = StateVector { dims, amplitudes };
        let norm = sv.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "state vector norm {norm} is not 1"
            )));
        }
        Ok(sv)
    }

    /// Build from unnormalized amplitudes, rescaling to unit norm.
    pub fn normalized(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("cannot normalize the zero vector".into()));
        }
        let scaled = amplitudes.iter().map(|c| c / norm).collect();
        StateVector::new(dims, scaled)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn total_dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn particles(&self) -> usize {
        self.dims.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.total_dim() != other.total_dim() {
            return Err(Error::DimMismatch(format!(
                "state dims {} vs {}",
                self.total_dim(),
                other.total_dim()
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Fix the global phase so the first nonzero amplitude is real-positive.
    fn fix_global_phase(mut self) -> Self {
        if let Some(first) = self.amplitudes.iter().find(|c| c.norm() > 1e-14) {
            let phase = first.conj() / first.norm();
            for a in &mut self.amplitudes {
                *a *= phase;
            }
        }
        self
    }
}

/// Density matrix ρ with the per-particle dimensions it acts on.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    rho: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn particles(&self) -> usize {
        self.dims.len()
    }
}

/// ρ = |ψ⟩⟨ψ| for a normalized state.
pub fn density(psi: &StateVector) -> Result<DensityMatrix> {
    density_with(psi, &Tolerances::default())
}

pub fn density_with(psi: &StateVector, tol: &Tolerances) -> Result<DensityMatrix> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > tol.state_norm {
        return Err(Error::InvalidArgument(format!(
            "cannot form a density matrix from a state with norm {norm}"
        )));
    }
    let n = psi.total_dim();
    let mut rho = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            rho.set(i, j, psi.amplitudes[i] * psi.amplitudes[j].conj());
        }
    }
    Ok(DensityMatrix {
        rho,
        dims: psi.dims.clone(),
    })
}

/// Two-particle total-spin-zero state
/// |Ψ⟩ = Σ_m (−1)^{j−m} / √(2j+1) · |m⟩ ⊗ |−m⟩.
pub fn clebsch_gordan_singlet(j: SpinMagnitude) -> StateVector {
    let d = j.dim();
    let jj = j.j();
    let norm = 1.0 / (d as f64).sqrt();
    let mut amp = vec![C_ZERO; d * d];
    for i1 in 0..d {
        let m = jj - i1 as f64; // particle-1 m, descending with index
        let i2 = d - 1 - i1; // index of |−m⟩
        // (−1)^{j−m} with j − m = i1 a nonnegative integer.
        let sign = if i1 % 2 == 0 { 1.0 } else { -1.0 };
        amp[i1 * d + i2] = Complex64::new(sign * norm, 0.0);
        let _ = m;
    }
    StateVector {
        dims: vec![d, d],
        amplitudes: amp,
    }
    .fix_global_phase()
}

/// The two four-qubit singlet states. `which` selects:
///
/// 1. (1/√3)[|++−−⟩ + |−−++⟩ − ½(|+−⟩+|−+⟩)(|+−⟩+|−+⟩)], entangled across
///    all four particles;
/// 2. ½(|+−⟩−|−+⟩)(|+−⟩−|−+⟩), the product of two pair singlets.
pub fn four_qubit_singlet(which: u8) -> Result<StateVector> {
    let basis = |bits: [usize; 4]| -> usize {
        bits.iter().fold(0, |acc, &b| acc * 2 + b) // 0 = |+⟩, 1 = |−⟩
    };
    let mut amp = vec![C_ZERO; 16];
    match which {
        1 => {
            let s3 = 1.0 / 3f64.sqrt();
            amp[basis([0, 0, 1, 1])] = Complex64::new(s3, 0.0);
            amp[basis([1, 1, 0, 0])] = Complex64::new(s3, 0.0);
            for pair1 in [[0, 1], [1, 0]] {
                for pair2 in [[0, 1], [1, 0]] {
                    let idx = basis([pair1[0], pair1[1], pair2[0], pair2[1]]);
                    amp[idx] = Complex64::new(-0.5 * s3, 0.0);
                }
            }
        }
        2 => {
            let half = 0.5;
            for (i1, s1) in [([0usize, 1usize], 1.0), ([1, 0], -1.0)] {
                for (i2, s2) in [([0usize, 1usize], 1.0), ([1, 0], -1.0)] {
                    let idx = basis([i1[0], i1[1], i2[0], i2[1]]);
                    amp[idx] = Complex64::new(half * s1 * s2, 0.0);
                }
            }
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "four-qubit singlet selector must be 1 or 2, got {other}"
            )))
        }
    }
    Ok(StateVector {
        dims: vec![2; 4],
        amplitudes: amp,
    }
    .fix_global_phase())
}

/// A named singlet, carrying which family it belongs to. The family tag is
/// what lets closed-form evaluators be matched to a state.
#[derive(Debug, Clone)]
pub struct SingletState {
    family: SingletFamily,
    vector: StateVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingletFamily {
    /// Two spin-j particles coupled to total spin zero.
    SpinPair(SpinMagnitude),
    /// One of the two four-qubit singlets (`which` ∈ {1, 2}).
    FourQubit(u8),
}

impl SingletState {
    pub fn spin_pair(j: SpinMagnitude) -> Self {
        SingletState {
            family: SingletFamily::SpinPair(j),
            vector: clebsch_gordan_singlet(j),
        }
    }

    /// The two-qubit Bell singlet (|+−⟩ − |−+⟩)/√2.
    pub fn bell() -> Self {
        Self::spin_pair(SpinMagnitude::HALF)
    }

    pub fn four_qubit(which: u8) -> Result<Self> {
        Ok(SingletState {
            family: SingletFamily::FourQubit(which),
            vector: four_qubit_singlet(which)?,
        })
    }

    pub fn family(&self) -> SingletFamily {
        self.family
    }

    pub fn vector(&self) -> &StateVector {
        &self.vector
    }

    pub fn density(&self) -> DensityMatrix {
        density(&self.vector).expect("singlet constructors produce normalized states")
    }

    /// Spin magnitude of each particle.
    pub fn particle_j(&self) -> SpinMagnitude {
        match self.family {
            SingletFamily::SpinPair(j) => j,
            SingletFamily::FourQubit(_) => SpinMagnitude::HALF,
        }
    }
}

/// ⟨Ψ|(J_tot)²|Ψ⟩ with J_tot,a = Σ_k J_a acting on particle k. Zero for a
/// singlet. All particles must share one spin magnitude.
pub fn total_spin_squared(psi: &StateVector, j: SpinMagnitude) -> Result<f64> {
    let d = j.dim();
    if psi.dims().iter().any(|&dd| dd != d) {
        return Err(Error::DimMismatch(format!(
            "total spin check needs every particle dimension to equal {d}"
        )));
    }
    let n = psi.particles();
    let total = psi.total_dim();
    let (jx, jy, jz) = crate::spin::spin_component_matrices(j);
    let mut expectation = 0.0;
    for comp in [&jx, &jy, &jz] {
        // J_tot,a |ψ⟩ accumulated particle by particle.
        let mut jpsi = vec![C_ZERO; total];
        for k in 0..n {
            apply_single_particle(comp, psi.amplitudes(), &mut jpsi, &psi_strides(psi), k, d);
        }
        expectation += jpsi.iter().map(|c| c.norm_sqr()).sum::<f64>();
    }
    Ok(expectation)
}

fn psi_strides(psi: &StateVector) -> Vec<usize> {
    let mut strides = vec![1usize; psi.particles()];
    for k in (0..psi.particles().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * psi.dims()[k + 1];
    }
    strides
}

/// out += (I ⊗ … ⊗ op_k ⊗ … ⊗ I)·psi for particle k of dimension d.
fn apply_single_particle(
    op: &ComplexMatrix,
    psi: &[Complex64],
    out: &mut [Complex64],
    strides: &[usize],
    k: usize,
    d: usize,
) {
    let stride = strides[k];
    let total = psi.len();
    let block = stride * d;
    let mut base = 0;
    while base < total {
        for offset in 0..stride {
            for row in 0..d {
                let mut acc = C_ZERO;
                for col in 0..d {
                    acc += op.get(row, col) * psi[base + offset + col * stride];
                }
                out[base + offset + row * stride] += acc;
            }
        }
        base += block;
    }
}

/// Result of sampling the uniqueness property over directions.
#[derive(Debug, Clone)]
pub struct UniquenessReport {
    pub samples: usize,
    pub max_violation: f64,
    pub worst_direction: Direction,
    pub passed: bool,
}

/// Check that measuring the same direction on both particles never yields
/// outcomes with m₂ ≠ −m₁: every off-anti-diagonal joint probability must
/// stay below the uniqueness tolerance. Directions come from a seeded
/// low-discrepancy sequence so reports are reproducible.
pub fn check_uniqueness(
    psi: &StateVector,
    j: SpinMagnitude,
    samples: usize,
    seed: u64,
) -> Result<UniquenessReport> {
    let tol = Tolerances::default();
    let d = j.dim();
    if psi.particles() != 2 || psi.dims() != [d, d] {
        return Err(Error::DimMismatch(format!(
            "uniqueness check needs a two-particle state of equal dims {d}"
        )));
    }
    let rho = density(psi)?;
    let mut max_violation: f64 = 0.0;
    let mut worst = Direction::z();
    for dir in low_discrepancy_directions(samples, seed) {
        let table = correlate::joint_probabilities(&rho, &[dir, dir], &[j, j])?;
        for (outcome, p) in table.iter() {
            // outcome holds m values; anti-diagonal means m₂ = −m₁.
            if (outcome[0] + outcome[1]).abs() > 1e-9 && p > max_violation {
                max_violation = p;
                worst = dir;
            }
        }
    }
    Ok(UniquenessReport {
        samples,
        max_violation,
        worst_direction: worst,
        passed: max_violation <= tol.uniqueness,
    })
}

/// Deterministic low-discrepancy directions on the sphere (R2 sequence with
/// a seed-derived offset), area-uniform in (cosθ, φ).
pub fn low_discrepancy_directions(count: usize, seed: u64) -> Vec<Direction> {
    // Plastic-constant sequence parameters.
    const G: f64 = 1.324_717_957_244_746;
    let a1 = 1.0 / G;
    let a2 = 1.0 / (G * G);
    // Seed enters as a fractional offset derived from a splitmix step.
    let mut s = seed.wrapping_add(0x9E3779B97F4A7C15);
    let mut mix = || {
        s ^= s >> 30;
        s = s.wrapping_mul(0xBF58476D1CE4E5B9);
        s ^= s >> 27;
        s = s.wrapping_mul(0x94D049BB133111EB);
        s ^= s >> 31;
        (s >> 11) as f64 / (1u64 << 53) as f64
    };
    let (o1, o2) = (mix(), mix());
    (0..count)
        .map(|k| {
            let u = (o1 + a1 * (k + 1) as f64).fract();
            let v = (o2 + a2 * (k + 1) as f64).fract();
            let theta = (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos();
            let phi = std::f64::consts::TAU * v;
            Direction::new(theta, phi).expect("finite angles")
        })
        .collect()
}
