//! The trace engine: joint outcome probabilities and correlation
//! coefficients for any state and any per-particle labeled observables,
//! evaluated through the Born rule E = Tr[ρ·(R₁ ⊗ … ⊗ Rₙ)].

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::spin::{Direction, SpinMagnitude, SpinObservable};
use crate::states::{clebsch_gordan_singlet, density, DensityMatrix};
use crate::tol::Tolerances;

/// A state paired with one observable per particle.
#[derive(Debug)]
pub struct CorrelationQuery<'a> {
    pub state: &'a DensityMatrix,
    pub observables: &'a [SpinObservable],
}

impl CorrelationQuery<'_> {
    fn validate(&self) -> Result<()> {
        let product: usize = self.observables.iter().map(|o| o.dim()).product();
        if product != self.state.dim() {
            return Err(Error::DimMismatch(format!(
                "observable dims multiply to {product} but the state has dimension {}",
                self.state.dim()
            )));
        }
        Ok(())
    }
}

/// Joint probabilities over outcome tuples (m₁, …, mₙ).
///
/// Outcomes are stored and iterated with each particle's m descending
/// (+j first), particle 1 slowest, matching the basis ordering.
#[derive(Debug, Clone)]
pub struct JointProbabilityTable {
    js: Vec<SpinMagnitude>,
    raw: Vec<f64>,
}

impl JointProbabilityTable {
    fn new(js: Vec<SpinMagnitude>, raw: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        for &p in &raw {
            if !(-tol.probability_slack..=1.0 + tol.probability_slack).contains(&p) {
                return Err(Error::BadProbabilities(format!(
                    "entry {p} outside [0, 1] beyond slack {}",
                    tol.probability_slack
                )));
            }
        }
        let sum: f64 = raw.iter().sum();
        if (sum - 1.0).abs() > tol.table_sum {
            return Err(Error::BadProbabilities(format!(
                "entries sum to {sum}, not 1"
            )));
        }
        Ok(JointProbabilityTable { js, raw })
    }

    pub fn outcomes(&self) -> usize {
        self.raw.len()
    }

    /// Outcome tuples (m values, descending per particle) with probabilities
    /// clamped to [0, 1].
    pub fn iter(&self) -> impl Iterator<Item = (Vec<f64>, f64)> + '_ {
        (0..self.raw.len()).map(move |flat| {
            let mut indices = Vec::with_capacity(self.js.len());
            let mut rem = flat;
            let mut stride: usize = self.js.iter().skip(1).map(|j| j.dim()).product();
            for (k, j) in self.js.iter().enumerate() {
                indices.push(j.j() - (rem / stride) as f64);
                rem %= stride;
                if k + 1 < self.js.len() {
                    stride /= self.js[k + 1].dim();
                }
            }
            (indices, self.raw[flat].clamp(0.0, 1.0))
        })
    }

    /// Probability by per-particle m values; error if any m is off-grid.
    pub fn prob(&self, ms: &[f64]) -> Result<f64> {
        if ms.len() != self.js.len() {
            return Err(Error::DimMismatch(format!(
                "expected {} outcome values, got {}",
                self.js.len(),
                ms.len()
            )));
        }
        let mut flat = 0usize;
        for (k, (&m, j)) in ms.iter().zip(&self.js).enumerate() {
            let idx = j.j() - m;
            if idx < -1e-9 || (idx - idx.round()).abs() > 1e-9 || idx.round() >= j.dim() as f64 {
                return Err(Error::InvalidArgument(format!(
                    "m = {m} is not an outcome of a spin-{} measurement",
                    j
                )));
            }
            flat = flat * j.dim() + idx.round() as usize;
            let _ = k;
        }
        Ok(self.raw[flat].clamp(0.0, 1.0))
    }

    pub fn sum(&self) -> f64 {
        self.raw.iter().sum()
    }
}

/// P(m⃗) = Tr[ρ · ⊗ₖ F_{mₖ}(θₖ, φₖ)] for every outcome tuple.
pub fn joint_probabilities(
    state: &DensityMatrix,
    dirs: &[Direction],
    js: &[SpinMagnitude],
) -> Result<JointProbabilityTable> {
    joint_probabilities_with(state, dirs, js, &Tolerances::default())
}

pub fn joint_probabilities_with(
    state: &DensityMatrix,
    dirs: &[Direction],
    js: &[SpinMagnitude],
    tol: &Tolerances,
) -> Result<JointProbabilityTable> {
    if dirs.len() != js.len() {
        return Err(Error::DimMismatch(format!(
            "{} directions vs {} spin magnitudes",
            dirs.len(),
            js.len()
        )));
    }
    let product: usize = js.iter().map(|j| j.dim()).product();
    if product != state.dim() {
        return Err(Error::DimMismatch(format!(
            "measurement dims multiply to {product} but the state has dimension {}",
            state.dim()
        )));
    }
    // Per-particle projectors reordered to descending m to match iteration.
    let mut projs: Vec<Vec<ComplexMatrix>> = Vec::with_capacity(js.len());
    for (dir, j) in dirs.iter().zip(js) {
        let mut f = eigenprojectors_desc(*j, *dir, tol)?;
        projs.push(std::mem::take(&mut f));
    }
    let mut raw = Vec::with_capacity(product);
    let mut indices = vec![0usize; js.len()];
    loop {
        let mut op = projs[0][indices[0]].clone();
        for k in 1..js.len() {
            op = op.kron(&projs[k][indices[k]])?;
        }
        let p = state.rho().trace_product(&op)?;
        if p.im.abs() > tol.imaginary_residue {
            return Err(Error::ImaginaryResidue(p.im.abs()));
        }
        raw.push(p.re);
        // Advance the multi-index, last particle fastest.
        let mut k = js.len();
        loop {
            if k == 0 {
                return JointProbabilityTable::new(js.to_vec(), raw, tol);
            }
            k -= 1;
            indices[k] += 1;
            if indices[k] < js[k].dim() {
                break;
            }
            indices[k] = 0;
        }
    }
}

fn eigenprojectors_desc(
    j: SpinMagnitude,
    dir: Direction,
    tol: &Tolerances,
) -> Result<Vec<ComplexMatrix>> {
    let mut f = crate::spin::eigenprojectors_with(j, dir, tol)?;
    f.reverse();
    Ok(f)
}

/// E = Tr[ρ · ⊗ₖ Rₖ]; the imaginary residue is asserted, not discarded.
pub fn correlation(query: &CorrelationQuery) -> Result<f64> {
    correlation_with(query, &Tolerances::default())
}

pub fn correlation_with(query: &CorrelationQuery, tol: &Tolerances) -> Result<f64> {
    query.validate()?;
    let mut op = query.observables[0].matrix().clone();
    for obs in &query.observables[1..] {
        op = op.kron(obs.matrix())?;
    }
    let value = query.state.rho().trace_product(&op)?;
    if value.im.abs() > tol.imaginary_residue {
        return Err(Error::ImaginaryResidue(value.im.abs()));
    }
    Ok(value.re)
}

/// Correlation of a two-particle state for per-side (direction, labels),
/// the common case throughout the closed-form checks.
pub fn pair_correlation(
    state: &DensityMatrix,
    j: SpinMagnitude,
    dirs: [Direction; 2],
    labels: [&crate::spin::LabelVector; 2],
) -> Result<f64> {
    let obs = [
        crate::spin::labeled_observable(j, dirs[0], labels[0].clone())?,
        crate::spin::labeled_observable(j, dirs[1], labels[1].clone())?,
    ];
    correlation(&CorrelationQuery {
        state,
        observables: &obs,
    })
}

/// Four-qubit parity quantities: E = P_even − P_odd where "even"/"odd"
/// counts the number of "−" outcomes.
#[derive(Debug, Clone, Copy)]
pub struct ParityCorrelation {
    pub e: f64,
    pub p_even: f64,
    pub p_odd: f64,
}

pub fn parity_correlation(state: &DensityMatrix, dirs: &[Direction; 4]) -> Result<ParityCorrelation> {
    if state.dims() != [2, 2, 2, 2] {
        return Err(Error::DimMismatch(format!(
            "parity correlation needs four qubits, state has dims {:?}",
            state.dims()
        )));
    }
    let js = [SpinMagnitude::HALF; 4];
    let table = joint_probabilities(state, dirs, &js)?;
    let mut p_even = 0.0;
    let mut p_odd = 0.0;
    for (outcome, p) in table.iter() {
        let minus_count = outcome.iter().filter(|&&m| m < 0.0).count();
        if minus_count % 2 == 0 {
            p_even += p;
        } else {
            p_odd += p;
        }
    }
    let e = p_even - p_odd;
    // P_even = (1+E)/2 and P_odd = (1−E)/2 must hold to 1e-12; failure here
    // means the table lost normalization.
    if (p_even - 0.5 * (1.0 + e)).abs() > 1e-12 || (p_odd - 0.5 * (1.0 - e)).abs() > 1e-12 {
        return Err(Error::BadProbabilities(
            "parity identities violated beyond 1e-12".into(),
        ));
    }
    Ok(ParityCorrelation { e, p_even, p_odd })
}

/// Spin-state correlation of the two-spin-j singlet, computed by the trace
/// engine. Equals −j(1+j)/3·[cosθ₁cosθ₂ + cos(φ₁−φ₂)sinθ₁sinθ₂] for all j.
pub fn correlation_general_j(j: SpinMagnitude, dirs: [Direction; 2]) -> Result<f64> {
    let psi = clebsch_gordan_singlet(j);
    let rho = density(&psi)?;
    let spin_labels = crate::spin::LabelVector::spin(j);
    pair_correlation(&rho, j, dirs, [&spin_labels, &spin_labels])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{labeled_observable, LabelVector};
    use crate::states::four_qubit_singlet;
    use std::f64::consts::{FRAC_PI_2, PI};

    struct Angles(u64);
    impl Angles {
        fn next(&mut self) -> f64 {
            self.0 = self
                .0
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (self.0 >> 11) as f64 / (1u64 << 53) as f64
        }
        fn dir(&mut self) -> Direction {
            Direction::new(self.next() * PI, self.next() * std::f64::consts::TAU).unwrap()
        }
    }

    fn bell_rho() -> DensityMatrix {
        density(&clebsch_gordan_singlet(SpinMagnitude::HALF)).unwrap()
    }

    #[test]
    fn bell_singlet_along_z() {
        let table = joint_probabilities(
            &bell_rho(),
            &[Direction::z(), Direction::z()],
            &[SpinMagnitude::HALF, SpinMagnitude::HALF],
        )
        .unwrap();
        assert!((table.prob(&[0.5, -0.5]).unwrap() - 0.5).abs() < 1e-14);
        assert!((table.prob(&[-0.5, 0.5]).unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(table.prob(&[0.5, 0.5]).unwrap(), 0.0);
        assert_eq!(table.prob(&[-0.5, -0.5]).unwrap(), 0.0);
    }

    #[test]
    fn spin_one_singlet_equal_dirs_anti_diagonal() {
        let j = SpinMagnitude::ONE;
        let rho = density(&clebsch_gordan_singlet(j)).unwrap();
        let mut rng = Angles(3);
        for _ in 0..10 {
            let dir = rng.dir();
            let table = joint_probabilities(&rho, &[dir, dir], &[j, j]).unwrap();
            for m in [-1.0, 0.0, 1.0] {
                assert!((table.prob(&[m, -m]).unwrap() - 1.0 / 3.0).abs() < 1e-10);
            }
            assert!((table.sum() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn table_dim_mismatch_is_usage_error() {
        let err = joint_probabilities(
            &bell_rho(),
            &[Direction::z(), Direction::z()],
            &[SpinMagnitude::ONE, SpinMagnitude::ONE],
        )
        .unwrap_err();
        assert!(err.is_usage());
    }

    #[test]
    fn spin_one_correlation_closed_form() {
        // E(θ₁, θ₂ in the φ = 0 plane) = −(2/3)cos(θ₁ − θ₂) for spin labels.
        let j = SpinMagnitude::ONE;
        let rho = density(&clebsch_gordan_singlet(j)).unwrap();
        let labels = LabelVector::new(vec![-1.0, 0.0, 1.0]).unwrap();
        for (t1, t2) in [(0.0, 0.0), (0.9, 0.2), (2.3, 1.1), (PI, 0.4)] {
            let e = pair_correlation(
                &rho,
                j,
                [
                    Direction::new(t1, 0.0).unwrap(),
                    Direction::new(t2, 0.0).unwrap(),
                ],
                [&labels, &labels],
            )
            .unwrap();
            assert!((e + (2.0 / 3.0) * (t1 - t2).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn spin_three_halves_equal_dirs_value() {
        let j = SpinMagnitude::THREE_HALVES;
        let rho = density(&clebsch_gordan_singlet(j)).unwrap();
        let labels = LabelVector::spin(j);
        let dir = Direction::new(0.77, 1.3).unwrap();
        let e = pair_correlation(&rho, j, [dir, dir], [&labels, &labels]).unwrap();
        assert!((e + 1.25).abs() < 1e-12);
    }

    #[test]
    fn ks_correlation_closed_form() {
        let j = SpinMagnitude::ONE;
        let rho = density(&clebsch_gordan_singlet(j)).unwrap();
        let ks = LabelVector::kochen_specker();
        for (t1, t2) in [(0.3, 1.4), (2.0, 0.1)] {
            let e = pair_correlation(
                &rho,
                j,
                [
                    Direction::new(t1, 0.0).unwrap(),
                    Direction::new(t2, 0.0).unwrap(),
                ],
                [&ks, &ks],
            )
            .unwrap();
            let expect = ((2.0 * (t1 - t2)).cos() + 3.0) / 6.0;
            assert!((e - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_point_values() {
        let rho1 = density(&four_qubit_singlet(1).unwrap()).unwrap();
        let z = Direction::z();
        let p = parity_correlation(&rho1, &[z, z, z, z]).unwrap();
        assert!((p.e - 1.0).abs() < 1e-12);
        assert!((p.p_even - 1.0).abs() < 1e-12);

        let rho2 = density(&four_qubit_singlet(2).unwrap()).unwrap();
        let dirs = [
            Direction::new(FRAC_PI_2, 0.0).unwrap(),
            z,
            z,
            z,
        ];
        let p = parity_correlation(&rho2, &dirs).unwrap();
        assert!(p.e.abs() < 1e-12);
    }

    #[test]
    fn parity_matches_meridian_closed_form() {
        let rho = density(&four_qubit_singlet(1).unwrap()).unwrap();
        let mut rng = Angles(17);
        for _ in 0..20 {
            let t: Vec<f64> = (0..4).map(|_| rng.next() * PI).collect();
            let dirs = [
                Direction::new(t[0], 0.0).unwrap(),
                Direction::new(t[1], 0.0).unwrap(),
                Direction::new(t[2], 0.0).unwrap(),
                Direction::new(t[3], 0.0).unwrap(),
            ];
            let p = parity_correlation(&rho, &dirs).unwrap();
            let expect =
                ((t[0] + t[1] - t[2] - t[3]).cos() * 2.0 + (t[0] - t[1]).cos() * (t[2] - t[3]).cos())
                    / 3.0;
            assert!((p.e - expect).abs() < 1e-10);
            assert!((p.p_even - 0.5 * (1.0 + p.e)).abs() < 1e-12);
            assert!((p.p_odd - 0.5 * (1.0 - p.e)).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_wrong_particle_count() {
        let err = parity_correlation(&bell_rho(), &[Direction::z(); 4]).unwrap_err();
        assert!(err.is_usage());
    }

    #[test]
    fn general_j_point_values() {
        let two = SpinMagnitude::from_two_j(4).unwrap();
        let dir = Direction::new(1.2, 0.3).unwrap();
        let e = correlation_general_j(two, [dir, dir]).unwrap();
        assert!((e + 2.0).abs() < 1e-12);

        let half = SpinMagnitude::HALF;
        for theta in [0.0, 0.4, 1.9, PI] {
            let e = correlation_general_j(
                half,
                [Direction::new(theta, 0.0).unwrap(), Direction::z()],
            )
            .unwrap();
            assert!((e + 0.25 * theta.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn general_j_matches_printed_law() {
        let mut rng = Angles(29);
        for two_j in 1..=5 {
            let j = SpinMagnitude::from_two_j(two_j).unwrap();
            for _ in 0..20 {
                let (d1, d2) = (rng.dir(), rng.dir());
                let e = correlation_general_j(j, [d1, d2]).unwrap();
                let jj = j.j();
                let expect = -(jj * (1.0 + jj) / 3.0)
                    * (d1.theta().cos() * d2.theta().cos()
                        + (d1.phi() - d2.phi()).cos() * d1.theta().sin() * d2.theta().sin());
                assert!((e - expect).abs() < 1e-9, "two_j = {two_j}");
            }
        }
    }

    #[test]
    fn label_linearity_is_affine() {
        // E(αλ + β·1, λ') = α·E(λ, λ') + β·⟨I ⊗ R'⟩ — for label vectors on
        // the first side only, with ⟨R'⟩ the singlet marginal mean of λ'.
        let j = SpinMagnitude::ONE;
        let rho = density(&clebsch_gordan_singlet(j)).unwrap();
        let base = [0.4, -0.9, 1.7];
        let (alpha, beta) = (1.3, -0.6);
        let shifted: Vec<f64> = base.iter().map(|l| alpha * l + beta).collect();
        let other = LabelVector::new(vec![0.2, 1.1, -0.5]).unwrap();
        let mut rng = Angles(41);
        for _ in 0..10 {
            let (d1, d2) = (rng.dir(), rng.dir());
            let e_base = pair_correlation(
                &rho,
                j,
                [d1, d2],
                [&LabelVector::new(base.to_vec()).unwrap(), &other],
            )
            .unwrap();
            let e_shift = pair_correlation(
                &rho,
                j,
                [d1, d2],
                [&LabelVector::new(shifted.clone()).unwrap(), &other],
            )
            .unwrap();
            // Singlet marginals are uniform, so ⟨I ⊗ R'⟩ = mean of λ'.
            let marginal = other.as_slice().iter().sum::<f64>() / 3.0;
            assert!((e_shift - (alpha * e_base + beta * marginal)).abs() < 1e-10);
        }
    }

    #[test]
    fn exchange_symmetry_and_azimuthal_gauge() {
        let j = SpinMagnitude::ONE;
        let rho = density(&clebsch_gordan_singlet(j)).unwrap();
        let labels = LabelVector::new(vec![0.3, -1.0, 0.9]).unwrap();
        let mut rng = Angles(53);
        for _ in 0..10 {
            let (d1, d2) = (rng.dir(), rng.dir());
            let e12 = pair_correlation(&rho, j, [d1, d2], [&labels, &labels]).unwrap();
            let e21 = pair_correlation(&rho, j, [d2, d1], [&labels, &labels]).unwrap();
            assert!((e12 - e21).abs() < 1e-10);

            let delta = rng.next() * std::f64::consts::TAU;
            let d1s = Direction::new(d1.theta(), d1.phi() + delta).unwrap();
            let d2s = Direction::new(d2.theta(), d2.phi() + delta).unwrap();
            let shifted = pair_correlation(&rho, j, [d1s, d2s], [&labels, &labels]).unwrap();
            assert!((e12 - shifted).abs() < 1e-10);
        }
    }

    #[test]
    fn correlation_bound_and_table_consistency() {
        let j = SpinMagnitude::THREE_HALVES;
        let rho = density(&clebsch_gordan_singlet(j)).unwrap();
        let labels = LabelVector::new(vec![1.4, -0.3, 0.8, -1.9]).unwrap();
        let mut rng = Angles(67);
        for _ in 0..10 {
            let (d1, d2) = (rng.dir(), rng.dir());
            let e = pair_correlation(&rho, j, [d1, d2], [&labels, &labels]).unwrap();
            assert!(e.abs() <= labels.max_abs().powi(2) + 1e-12);

            // E equals Σ_m⃗ (Π λ) P(m⃗).
            let table = joint_probabilities(&rho, &[d1, d2], &[j, j]).unwrap();
            let mut acc = 0.0;
            for (outcome, p) in table.iter() {
                let l1 = labels.as_slice()[(outcome[0] + j.j()).round() as usize];
                let l2 = labels.as_slice()[(outcome[1] + j.j()).round() as usize];
                acc += l1 * l2 * p;
            }
            assert!((acc - e).abs() < 1e-10);
        }
    }

    #[test]
    fn query_dim_mismatch() {
        let obs = [
            labeled_observable(SpinMagnitude::ONE, Direction::z(), LabelVector::spin(SpinMagnitude::ONE))
                .unwrap(),
        ];
        let err = correlation(&CorrelationQuery {
            state: &bell_rho(),
            observables: &obs,
        })
        .unwrap_err();
        assert!(err.is_usage());
    }
}
