//! Cross-verification of every closed form against the trace engine, plus
//! the reference rotation-path projector construction used to arbitrate
//! disagreements.
//!
//! A closed form that systematically disagrees with the trace engine is
//! only accepted when (a) it is on the list of known formula errata and
//! (b) the trace engine survives cross-validation through the independent
//! rotation-path projectors. Anything else is a verification failure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::closedform::{self, ClosedFormId};
use crate::correlate::{self};
use crate::error::{Error, Result};
use crate::inequalities;
use crate::linalg::{Complex64, ComplexMatrix};
use crate::spin::{spin_component_matrices, Direction, LabelVector, SpinMagnitude};
use crate::states::{
    check_uniqueness, clebsch_gordan_singlet, density, four_qubit_singlet, total_spin_squared,
    DensityMatrix, StateVector,
};
use crate::tol::Tolerances;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// exp(A) by scaling-and-squaring Taylor summation. Independent of the
/// Jacobi eigensolver, which is the point: it feeds the reference path.
pub fn expm_taylor(a: &ComplexMatrix) -> ComplexMatrix {
    let norm = a.frobenius_norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale_re(0.5f64.powi(squarings as i32));
    let n = a.dim();
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=60 {
        term = term.matmul(&scaled).expect("same dim").scale_re(1.0 / k as f64);
        sum = sum.add(&term).expect("same dim");
        if term.frobenius_norm() < 1e-20 {
            break;
        }
    }
    let mut out = sum;
    for _ in 0..squarings {
        out = out.matmul(&out).expect("same dim");
    }
    out
}

/// Rotation U(θ, φ) = exp(−iφ·Jz)·exp(−iθ·Jy), which carries the Jz
/// eigenbasis onto the eigenbasis of S(θ, φ).
pub fn rotation_operator(j: SpinMagnitude, dir: Direction) -> ComplexMatrix {
    let (_, jy, _) = spin_component_matrices(j);
    let exp_jy = expm_taylor(&jy.scale(Complex64::new(0.0, -dir.theta())));
    // exp(−iφ·Jz) is diagonal in this basis.
    let d = j.dim();
    let mut exp_jz = ComplexMatrix::zeros(d);
    for i in 0..d {
        let m = j.j() - i as f64;
        exp_jz.set(i, i, Complex64::from_polar(1.0, -dir.phi() * m));
    }
    exp_jz.matmul(&exp_jy).expect("same dim")
}

/// Projectors F_m(θ, φ) = U|m⟩⟨m|U†, ascending m — the reference path that
/// cross-checks the eigensolver-based production construction.
pub fn rotation_path_projectors(j: SpinMagnitude, dir: Direction) -> Vec<ComplexMatrix> {
    let u = rotation_operator(j, dir);
    let d = j.dim();
    (0..d)
        .map(|asc| {
            let col = j.basis_index(asc);
            let v: Vec<Complex64> = (0..d).map(|row| u.get(row, col)).collect();
            let mut p = ComplexMatrix::zeros(d);
            for r in 0..d {
                for c in 0..d {
                    p.set(r, c, v[r] * v[c].conj());
                }
            }
            p
        })
        .collect()
}

/// Pair correlation evaluated through rotation-path projectors instead of
/// the eigensolver.
pub fn pair_correlation_rotation_path(
    rho: &DensityMatrix,
    j: SpinMagnitude,
    dirs: [Direction; 2],
    labels: [&LabelVector; 2],
) -> Result<f64> {
    let build = |dir: Direction, lab: &LabelVector| -> ComplexMatrix {
        let f = rotation_path_projectors(j, dir);
        let mut r = ComplexMatrix::zeros(j.dim());
        for (p, &l) in f.iter().zip(lab.as_slice()) {
            r = r.add(&p.scale_re(l)).expect("same dim");
        }
        r
    };
    let op = build(dirs[0], labels[0])
        .kron(&build(dirs[1], labels[1]))?;
    let v = rho.rho().trace_product(&op)?;
    if v.im.abs() > Tolerances::default().imaginary_residue {
        return Err(Error::ImaginaryResidue(v.im.abs()));
    }
    Ok(v.re)
}

/// One machine-readable erratum: a formula, a parameter point, the printed
/// value, the engine value, and their difference.
#[derive(Debug, Clone)]
pub struct ErrataRecord {
    pub formula: String,
    pub params: Vec<(String, f64)>,
    pub printed: f64,
    pub engine: f64,
    pub delta: f64,
    pub note: String,
}

impl ErrataRecord {
    /// One JSON object per line; floats carry 17 significant digits.
    pub fn jsonl_line(&self) -> String {
        let params = self
            .params
            .iter()
            .map(|(k, v)| format!("\"{k}\":{}", fmt_json_f64(*v)))
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "{{\"formula\":\"{}\",\"params\":{{{params}}},\"printed\":{},\"engine\":{},\"delta\":{},\"note\":\"{}\"}}",
            self.formula,
            fmt_json_f64(self.printed),
            fmt_json_f64(self.engine),
            fmt_json_f64(self.delta),
            self.note
        )
    }
}

/// 17-significant-digit float rendering for JSON output.
pub fn fmt_json_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseStatus {
    /// Closed form and trace engine agree within tolerance.
    Ok,
    /// Known formula erratum: systematic disagreement, trace engine
    /// cross-validated by the rotation path.
    Erratum,
    /// No trace counterpart exists; checked at pinned points instead.
    PointCheck,
    Failed,
}

#[derive(Debug, Clone)]
pub struct CaseReport {
    pub name: String,
    pub trials: usize,
    pub max_delta: f64,
    pub worst_params: Vec<(String, f64)>,
    pub status: CaseStatus,
    pub note: String,
}

#[derive(Debug, Clone)]
pub struct StateCheckReport {
    pub name: String,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub tolerance: f64,
    pub cases: Vec<CaseReport>,
    pub state_checks: Vec<StateCheckReport>,
    pub errata: Vec<ErrataRecord>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// Formula ids whose systematic disagreement with the trace engine is an
/// established erratum of the printed source rather than a regression.
const KNOWN_ERRATA: [&str; 1] = ["E321_enhanced"];

/// One sampled comparison: named parameters, closed-form value, trace value.
type Sample = (Vec<(String, f64)>, f64, f64);

/// Independent re-evaluation of the trace side at a parameter point.
type CrossCheck<'a> = &'a dyn Fn(&[(String, f64)]) -> Result<f64>;

/// Run every closed-form-vs-trace case plus the state invariants.
///
/// `filter` restricts to case names starting with the given string.
pub fn run_verify(trials: usize, seed: u64, filter: Option<&str>) -> Result<VerifyReport> {
    run_verify_with_tolerance(trials, seed, filter, Tolerances::default().oracle_equivalence)
}

pub fn run_verify_with_tolerance(
    trials: usize,
    seed: u64,
    filter: Option<&str>,
    tolerance: f64,
) -> Result<VerifyReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be ≥ 1".into()));
    }
    let mut cases = Vec::new();
    let mut errata = Vec::new();

    let keep = |name: &str| filter.is_none_or(|f| name.starts_with(f));

    let spin1 = density(&clebsch_gordan_singlet(SpinMagnitude::ONE))?;
    let spin32 = density(&clebsch_gordan_singlet(SpinMagnitude::THREE_HALVES))?;
    let psi241 = density(&four_qubit_singlet(1)?)?;
    let psi242 = density(&four_qubit_singlet(2)?)?;

    // Streams are split per case so a filter never changes sampled points.
    let mut case_index = 0u64;
    let stream = |idx: u64| ChaCha20Rng::seed_from_u64(seed ^ (0x517c_c1b7_2722_0a95u64.wrapping_mul(idx + 1)));

    let push_case = |cases: &mut Vec<CaseReport>,
                         errata: &mut Vec<ErrataRecord>,
                         name: String,
                         rng: &mut ChaCha20Rng,
                         sampler: &mut dyn FnMut(&mut ChaCha20Rng) -> Result<Sample>,
                         cross: Option<CrossCheck>|
     -> Result<()> {
        let mut max_delta = 0.0f64;
        let mut worst: Vec<(String, f64)> = Vec::new();
        let mut worst_vals = (0.0f64, 0.0f64);
        for _ in 0..trials {
            let (params, closed, trace) = sampler(rng)?;
            let delta = (closed - trace).abs();
            if delta >= max_delta {
                max_delta = delta;
                worst = params;
                worst_vals = (closed, trace);
            }
        }
        let (status, note) = if max_delta <= tolerance {
            (CaseStatus::Ok, String::new())
        } else if KNOWN_ERRATA.contains(&name.as_str()) {
            // Erratum pathway: the trace engine must survive the
            // rotation-path cross-check at the worst point.
            let cross_fn = cross.ok_or_else(|| {
                Error::InvalidArgument(format!("case {name} lacks a cross-validator"))
            })?;
            let rot = cross_fn(&worst)?;
            let cross_gap = (rot - worst_vals.1).abs();
            if cross_gap <= tolerance {
                errata.push(ErrataRecord {
                    formula: name.clone(),
                    params: worst.clone(),
                    printed: worst_vals.0,
                    engine: worst_vals.1,
                    delta: max_delta,
                    note: "printed identity disagrees with the trace engine; \
                           trace value confirmed by rotation-path projectors"
                        .into(),
                });
                (
                    CaseStatus::Erratum,
                    format!("known erratum; rotation-path cross-check gap {cross_gap:.2e}"),
                )
            } else {
                (
                    CaseStatus::Failed,
                    format!("cross-validation failed (gap {cross_gap:.2e})"),
                )
            }
        } else {
            (
                CaseStatus::Failed,
                format!("closed form and trace engine disagree by {max_delta:.2e}"),
            )
        };
        cases.push(CaseReport {
            name,
            trials,
            max_delta,
            worst_params: worst,
            status,
            note,
        });
        Ok(())
    };

    // Samplers share these angle helpers.
    fn dir_full(rng: &mut ChaCha20Rng) -> Direction {
        Direction::new(rng.gen_range(0.0..PI), rng.gen_range(0.0..TAU)).expect("finite")
    }

    // --- two spin-1 particles ------------------------------------------------
    let pair1 = spin1.clone();
    let general_label_case = move |rng: &mut ChaCha20Rng| -> Result<Sample> {
        let (d1, d2) = (dir_full(rng), dir_full(rng));
        let labels: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let closed = closedform::e321_general(
            d1.theta(),
            d2.theta(),
            d1.phi(),
            d2.phi(),
            labels[0],
            labels[1],
            labels[2],
        );
        let lv = LabelVector::new(labels.clone())?;
        let trace = correlate::pair_correlation(&pair1, SpinMagnitude::ONE, [d1, d2], [&lv, &lv])?;
        Ok((
            vec![
                ("theta1".into(), d1.theta()),
                ("theta2".into(), d2.theta()),
                ("phi1".into(), d1.phi()),
                ("phi2".into(), d2.phi()),
                ("lambda_minus".into(), labels[0]),
                ("lambda_zero".into(), labels[1]),
                ("lambda_plus".into(), labels[2]),
            ],
            closed,
            trace,
        ))
    };

    struct Spin1Case {
        id: ClosedFormId,
        labels: Vec<f64>,
        pin: AnglePin,
    }
    #[derive(Clone, Copy)]
    enum AnglePin {
        None,
        ThetaHalfPi,
        PhiZero,
    }
    let spin1_cases = [
        Spin1Case {
            id: ClosedFormId::E321Spin,
            labels: vec![-1.0, 0.0, 1.0],
            pin: AnglePin::None,
        },
        Spin1Case {
            id: ClosedFormId::E321Ks,
            labels: vec![1.0, 0.0, 1.0],
            pin: AnglePin::None,
        },
        Spin1Case {
            id: ClosedFormId::E321KsInverted,
            labels: vec![0.0, 1.0, 0.0],
            pin: AnglePin::None,
        },
        Spin1Case {
            id: ClosedFormId::E321KsPhi,
            labels: vec![1.0, 0.0, 1.0],
            pin: AnglePin::ThetaHalfPi,
        },
        Spin1Case {
            id: ClosedFormId::E321KsInvertedPhi,
            labels: vec![0.0, 1.0, 0.0],
            pin: AnglePin::ThetaHalfPi,
        },
        Spin1Case {
            id: ClosedFormId::E321KsTheta,
            labels: vec![1.0, 0.0, 1.0],
            pin: AnglePin::PhiZero,
        },
        Spin1Case {
            id: ClosedFormId::E321KsInvertedTheta,
            labels: vec![0.0, 1.0, 0.0],
            pin: AnglePin::PhiZero,
        },
    ];

    if keep("E321_general") {
        let mut rng = stream(case_index);
        let mut s = general_label_case;
        push_case(
            &mut cases,
            &mut errata,
            "E321_general".into(),
            &mut rng,
            &mut s,
            None,
        )?;
    }
    case_index += 1;

    for case in spin1_cases {
        let name = case.id.name().to_string();
        if keep(&name) {
            let rho = spin1.clone();
            let labels = LabelVector::new(case.labels.clone())?;
            let id = case.id;
            let pin = case.pin;
            let mut sampler = move |rng: &mut ChaCha20Rng| -> Result<Sample> {
                let (d1, d2) = match pin {
                    AnglePin::None => (dir_full(rng), dir_full(rng)),
                    AnglePin::ThetaHalfPi => (
                        Direction::new(FRAC_PI_2, rng.gen_range(0.0..TAU))?,
                        Direction::new(FRAC_PI_2, rng.gen_range(0.0..TAU))?,
                    ),
                    AnglePin::PhiZero => (
                        Direction::new(rng.gen_range(0.0..PI), 0.0)?,
                        Direction::new(rng.gen_range(0.0..PI), 0.0)?,
                    ),
                };
                let params = closedform::FormParams {
                    theta: match pin {
                        AnglePin::ThetaHalfPi => vec![],
                        _ => vec![d1.theta(), d2.theta()],
                    },
                    phi: match pin {
                        AnglePin::PhiZero => vec![],
                        _ => vec![d1.phi(), d2.phi()],
                    },
                    labels: vec![],
                    j: None,
                };
                let closed = closedform::evaluate(id, &params)?;
                let trace =
                    correlate::pair_correlation(&rho, SpinMagnitude::ONE, [d1, d2], [&labels, &labels])?;
                Ok((
                    vec![
                        ("theta1".into(), d1.theta()),
                        ("theta2".into(), d2.theta()),
                        ("phi1".into(), d1.phi()),
                        ("phi2".into(), d2.phi()),
                    ],
                    closed,
                    trace,
                ))
            };
            let mut rng = stream(case_index);
            push_case(&mut cases, &mut errata, name, &mut rng, &mut sampler, None)?;
        }
        case_index += 1;
    }

    // --- the combined coefficient (known erratum) ----------------------------
    if keep("E321_enhanced") {
        let rho = spin1.clone();
        let spin_labels = LabelVector::new(vec![-1.0, 0.0, 1.0])?;
        let ks_labels = LabelVector::kochen_specker();
        let trace_combo = {
            let rho = rho.clone();
            let spin_labels = spin_labels.clone();
            let ks_labels = ks_labels.clone();
            move |t1: f64, t2: f64, rotation_path: bool| -> Result<f64> {
                let dirs = [Direction::new(t1, 0.0)?, Direction::new(t2, 0.0)?];
                let (e_spin, e_ks) = if rotation_path {
                    (
                        pair_correlation_rotation_path(
                            &rho,
                            SpinMagnitude::ONE,
                            dirs,
                            [&spin_labels, &spin_labels],
                        )?,
                        pair_correlation_rotation_path(
                            &rho,
                            SpinMagnitude::ONE,
                            dirs,
                            [&ks_labels, &ks_labels],
                        )?,
                    )
                } else {
                    (
                        correlate::pair_correlation(
                            &rho,
                            SpinMagnitude::ONE,
                            dirs,
                            [&spin_labels, &spin_labels],
                        )?,
                        correlate::pair_correlation(
                            &rho,
                            SpinMagnitude::ONE,
                            dirs,
                            [&ks_labels, &ks_labels],
                        )?,
                    )
                };
                Ok(0.5 * (e_spin + 3.0 * (2.0 * e_ks - 1.0)))
            }
        };
        let sampler_combo = trace_combo.clone();
        let mut sampler = move |rng: &mut ChaCha20Rng| -> Result<Sample> {
            let (t1, t2) = (rng.gen_range(0.0..PI), rng.gen_range(0.0..PI));
            let closed = closedform::enhanced_combination(t1, t2);
            let trace = sampler_combo(t1, t2, false)?;
            Ok((
                vec![("theta1".into(), t1), ("theta2".into(), t2)],
                closed,
                trace,
            ))
        };
        let cross = move |params: &[(String, f64)]| -> Result<f64> {
            let t1 = params.iter().find(|(k, _)| k == "theta1").map(|(_, v)| *v).unwrap_or(0.0);
            let t2 = params.iter().find(|(k, _)| k == "theta2").map(|(_, v)| *v).unwrap_or(0.0);
            trace_combo(t1, t2, true)
        };
        let mut rng = stream(case_index);
        push_case(
            &mut cases,
            &mut errata,
            "E321_enhanced".into(),
            &mut rng,
            &mut sampler,
            Some(&cross),
        )?;
    }
    case_index += 1;

    // --- two spin-3/2 particles ----------------------------------------------
    if keep("E421_spin") {
        let rho = spin32.clone();
        let labels = LabelVector::spin(SpinMagnitude::THREE_HALVES);
        let mut sampler = move |rng: &mut ChaCha20Rng| -> Result<Sample> {
            let (d1, d2) = (dir_full(rng), dir_full(rng));
            let closed = closedform::e421_spin(d1.theta(), d2.theta(), d1.phi(), d2.phi());
            let trace = correlate::pair_correlation(
                &rho,
                SpinMagnitude::THREE_HALVES,
                [d1, d2],
                [&labels, &labels],
            )?;
            Ok((
                vec![
                    ("theta1".into(), d1.theta()),
                    ("theta2".into(), d2.theta()),
                    ("phi1".into(), d1.phi()),
                    ("phi2".into(), d2.phi()),
                ],
                closed,
                trace,
            ))
        };
        let mut rng = stream(case_index);
        push_case(
            &mut cases,
            &mut errata,
            "E421_spin".into(),
            &mut rng,
            &mut sampler,
            None,
        )?;
    }
    case_index += 1;

    let plastic_cases: [(ClosedFormId, [f64; 4]); 3] = [
        (ClosedFormId::E421PlasticMmpp, [-1.0, -1.0, 1.0, 1.0]),
        (ClosedFormId::E421PlasticMppm, [-1.0, 1.0, 1.0, -1.0]),
        (ClosedFormId::E421PlasticPmpm, [1.0, -1.0, 1.0, -1.0]),
    ];
    for (id, labs) in plastic_cases {
        let name = id.name().to_string();
        if keep(&name) {
            let rho = spin32.clone();
            let labels = LabelVector::new(labs.to_vec())?;
            let mut sampler = move |rng: &mut ChaCha20Rng| -> Result<Sample> {
                let theta = rng.gen_range(0.0..PI);
                let params = closedform::FormParams {
                    theta: vec![theta],
                    ..Default::default()
                };
                let closed = closedform::evaluate(id, &params)?;
                let trace = correlate::pair_correlation(
                    &rho,
                    SpinMagnitude::THREE_HALVES,
                    [Direction::new(theta, 0.0)?, Direction::z()],
                    [&labels, &labels],
                )?;
                Ok((vec![("theta".into(), theta)], closed, trace))
            };
            let mut rng = stream(case_index);
            push_case(&mut cases, &mut errata, name, &mut rng, &mut sampler, None)?;
        }
        case_index += 1;
    }

    // --- general spin j --------------------------------------------------------
    for two_j in [1u32, 2, 3, 4, 5] {
        let j = SpinMagnitude::from_two_j(two_j)?;
        let name = format!("E_general_j[j={j}]");
        if keep(&name) || keep("E_general_j") {
            let mut sampler = move |rng: &mut ChaCha20Rng| -> Result<Sample> {
                let (d1, d2) = (dir_full(rng), dir_full(rng));
                let closed = closedform::e_general_j(j, d1.theta(), d2.theta(), d1.phi(), d2.phi());
                let trace = correlate::correlation_general_j(j, [d1, d2])?;
                Ok((
                    vec![
                        ("theta1".into(), d1.theta()),
                        ("theta2".into(), d2.theta()),
                        ("phi1".into(), d1.phi()),
                        ("phi2".into(), d2.phi()),
                    ],
                    closed,
                    trace,
                ))
            };
            let mut rng = stream(case_index);
            push_case(&mut cases, &mut errata, name, &mut rng, &mut sampler, None)?;
        }
        case_index += 1;
    }

    // --- four qubits -------------------------------------------------------------
    struct FourCase {
        id: ClosedFormId,
        which: u8,
        pin: AnglePin,
    }
    let four_cases = [
        FourCase { id: ClosedFormId::E241General, which: 1, pin: AnglePin::None },
        FourCase { id: ClosedFormId::E241Phi, which: 1, pin: AnglePin::ThetaHalfPi },
        FourCase { id: ClosedFormId::E241Theta, which: 1, pin: AnglePin::PhiZero },
        FourCase { id: ClosedFormId::E242General, which: 2, pin: AnglePin::None },
        FourCase { id: ClosedFormId::E242Theta, which: 2, pin: AnglePin::PhiZero },
        FourCase { id: ClosedFormId::E242Phi, which: 2, pin: AnglePin::ThetaHalfPi },
    ];
    for case in four_cases {
        let name = case.id.name().to_string();
        if keep(&name) {
            let rho = if case.which == 1 { psi241.clone() } else { psi242.clone() };
            let id = case.id;
            let pin = case.pin;
            let mut sampler = move |rng: &mut ChaCha20Rng| -> Result<Sample> {
                let mut thetas = [0.0f64; 4];
                let mut phis = [0.0f64; 4];
                for k in 0..4 {
                    match pin {
                        AnglePin::None => {
                            thetas[k] = rng.gen_range(0.0..PI);
                            phis[k] = rng.gen_range(0.0..TAU);
                        }
                        AnglePin::ThetaHalfPi => {
                            thetas[k] = FRAC_PI_2;
                            phis[k] = rng.gen_range(0.0..TAU);
                        }
                        AnglePin::PhiZero => {
                            thetas[k] = rng.gen_range(0.0..PI);
                            phis[k] = 0.0;
                        }
                    }
                }
                let params = closedform::FormParams {
                    theta: match pin {
                        AnglePin::ThetaHalfPi => vec![],
                        _ => thetas.to_vec(),
                    },
                    phi: match pin {
                        AnglePin::PhiZero => vec![],
                        _ => phis.to_vec(),
                    },
                    labels: vec![],
                    j: None,
                };
                let closed = closedform::evaluate(id, &params)?;
                let dirs = [
                    Direction::new(thetas[0], phis[0])?,
                    Direction::new(thetas[1], phis[1])?,
                    Direction::new(thetas[2], phis[2])?,
                    Direction::new(thetas[3], phis[3])?,
                ];
                let trace = correlate::parity_correlation(&rho, &dirs)?.e;
                let mut params_out = Vec::new();
                for k in 0..4 {
                    params_out.push((format!("theta{}", k + 1), thetas[k]));
                    params_out.push((format!("phi{}", k + 1), phis[k]));
                }
                Ok((params_out, closed, trace))
            };
            let mut rng = stream(case_index);
            push_case(&mut cases, &mut errata, name, &mut rng, &mut sampler, None)?;
        }
        case_index += 1;
    }

    // --- classical reference line: no trace counterpart, pinned points ------------
    if keep("E_classical_linear") {
        let pts = [(0.0, -1.0), (FRAC_PI_2, 0.0), (PI, 1.0)];
        let mut max_delta = 0.0f64;
        for (theta, expect) in pts {
            max_delta = max_delta.max((closedform::e_classical_linear(theta) - expect).abs());
        }
        cases.push(CaseReport {
            name: "E_classical_linear".into(),
            trials: pts.len(),
            max_delta,
            worst_params: vec![],
            status: if max_delta <= tolerance {
                CaseStatus::PointCheck
            } else {
                CaseStatus::Failed
            },
            note: "classical reference line, endpoint check".into(),
        });
    }

    // --- auxiliary formula errata (series and domain claims) ----------------------
    if filter.is_none() {
        errata.push(sign_series_erratum_record());
        errata.push(enhancement_claim_erratum_record()?);
    }

    let state_checks = if filter.is_none() {
        run_state_checks(seed)?
    } else {
        Vec::new()
    };

    let passed = cases.iter().all(|c| c.status != CaseStatus::Failed)
        && state_checks.iter().all(|c| c.passed);

    Ok(VerifyReport {
        seed,
        trials,
        tolerance,
        cases,
        state_checks,
        errata,
        passed,
    })
}

/// The step-function series as printed, argument shifted by π/2. It sums
/// to −1 on the whole interval instead of the intended sign step.
pub fn sign_series_shifted_argument(theta: f64, terms: usize) -> f64 {
    let mut acc = 0.0;
    for n in 0..terms {
        let k = (2 * n + 1) as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * (k * (theta + FRAC_PI_2)).cos() / k;
    }
    4.0 / PI * acc
}

fn sign_series_erratum_record() -> ErrataRecord {
    let theta = 3.0 * std::f64::consts::FRAC_PI_4;
    let printed = sign_series_shifted_argument(theta, 10_000);
    let corrected = inequalities::sign_fourier_partial(theta, 10_000).expect("valid args");
    ErrataRecord {
        formula: "sign_fourier_series".into(),
        params: vec![("theta".into(), theta), ("terms".into(), 10_000.0)],
        printed,
        engine: corrected,
        delta: (printed - corrected).abs(),
        note: "the printed series (argument theta + pi/2) sums to -1 on all of (0, pi); \
               the step function requires the argument theta with an overall sign flip"
            .into(),
    }
}

fn enhancement_claim_erratum_record() -> Result<ErrataRecord> {
    let report = inequalities::enhancement_domain(1e-3)?;
    let (lo, hi) = report.below_domain.unwrap_or((f64::NAN, f64::NAN));
    // Probe point Δ = π/2: inside the measured domain, outside the claim.
    let probe = FRAC_PI_2;
    let enhanced = closedform::enhanced_combination(probe, 0.0);
    Ok(ErrataRecord {
        formula: "enhancement_domain".into(),
        params: vec![
            ("delta_probe".into(), probe),
            ("measured_lo".into(), lo),
            ("measured_hi".into(), hi),
        ],
        printed: report.claimed_domain.1,
        engine: lo,
        delta: (enhanced - (-probe.cos())).abs(),
        note: "the combined coefficient lies below -cos(delta) for delta in (pi/3, pi), \
               not the claimed 0 < |delta| < pi/3; the boundary pi/3 itself is confirmed"
            .into(),
    })
}

/// State-construction invariants: printed coordinates, total spin zero,
/// rotational invariance, orthogonality, and the uniqueness property.
fn run_state_checks(seed: u64) -> Result<Vec<StateCheckReport>> {
    let mut out = Vec::new();
    let mut push = |name: &str, residual: f64, bound: f64| {
        out.push(StateCheckReport {
            name: name.into(),
            residual,
            passed: residual <= bound,
        });
    };

    // Printed coordinates (up to the fixed global phase).
    let bell = clebsch_gordan_singlet(SpinMagnitude::HALF);
    let s2 = 1.0 / 2f64.sqrt();
    let bell_expect = [0.0, s2, -s2, 0.0];
    let bell_res = max_amp_diff(&bell, &bell_expect);
    push("coordinates_bell", bell_res, 1e-12);

    let one = clebsch_gordan_singlet(SpinMagnitude::ONE);
    let s3 = 1.0 / 3f64.sqrt();
    let one_expect = [0.0, 0.0, s3, 0.0, -s3, 0.0, s3, 0.0, 0.0];
    push("coordinates_spin1", max_amp_diff(&one, &one_expect), 1e-12);

    let th = clebsch_gordan_singlet(SpinMagnitude::THREE_HALVES);
    let mut th_expect = [0.0; 16];
    th_expect[3] = 0.5;
    th_expect[6] = -0.5;
    th_expect[9] = 0.5;
    th_expect[12] = -0.5;
    push("coordinates_spin32", max_amp_diff(&th, &th_expect), 1e-12);

    // Total spin zero.
    for two_j in [1u32, 2, 3, 4, 5] {
        let j = SpinMagnitude::from_two_j(two_j)?;
        let psi = clebsch_gordan_singlet(j);
        push(
            &format!("total_spin_zero[j={j}]"),
            total_spin_squared(&psi, j)?,
            1e-10,
        );
    }
    for which in [1u8, 2] {
        let psi = four_qubit_singlet(which)?;
        push(
            &format!("total_spin_zero[four_qubit_{which}]"),
            total_spin_squared(&psi, SpinMagnitude::HALF)?,
            1e-10,
        );
    }

    // Rotational invariance |⟨Ψ|U⊗U|Ψ⟩| = 1 over sampled rotations.
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xda3e_39cb_94b9_5bdb);
    for two_j in [1u32, 2, 3] {
        let j = SpinMagnitude::from_two_j(two_j)?;
        let psi = clebsch_gordan_singlet(j);
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let dir = Direction::new(rng.gen_range(0.0..PI), rng.gen_range(0.0..TAU))?;
            let u = rotation_operator(j, dir);
            let uu = u.kron(&u)?;
            let rotated = uu.matvec(psi.amplitudes())?;
            let overlap: Complex64 = psi
                .amplitudes()
                .iter()
                .zip(&rotated)
                .map(|(a, b)| a.conj() * b)
                .sum();
            worst = worst.max((overlap.norm() - 1.0).abs());
        }
        push(&format!("rotational_invariance[j={j}]"), worst, 1e-10);
    }

    // Orthogonality of the two four-qubit singlets.
    let a = four_qubit_singlet(1)?;
    let b = four_qubit_singlet(2)?;
    push("four_qubit_orthogonality", a.inner(&b)?.norm(), 1e-12);

    // Uniqueness property over 50 sampled directions.
    for two_j in [1u32, 2, 3] {
        let j = SpinMagnitude::from_two_j(two_j)?;
        let psi = clebsch_gordan_singlet(j);
        let report = check_uniqueness(&psi, j, 50, seed)?;
        push(
            &format!("uniqueness[j={j}]"),
            report.max_violation,
            1e-10,
        );
    }

    // Production projectors against the rotation path.
    let mut worst = 0.0f64;
    for two_j in [1u32, 2, 3, 4, 5] {
        let j = SpinMagnitude::from_two_j(two_j)?;
        for _ in 0..10 {
            let dir = Direction::new(rng.gen_range(0.0..PI), rng.gen_range(0.0..TAU))?;
            let eig = crate::spin::eigenprojectors(j, dir)?;
            let rot = rotation_path_projectors(j, dir);
            for (p, q) in eig.iter().zip(&rot) {
                worst = worst.max(p.max_abs_diff(q));
            }
        }
    }
    push("projector_rotation_path", worst, 1e-9);

    Ok(out)
}

fn max_amp_diff(psi: &StateVector, expect: &[f64]) -> f64 {
    psi.amplitudes()
        .iter()
        .zip(expect)
        .map(|(a, &b)| (a - Complex64::new(b, 0.0)).norm())
        .fold(0.0, f64::max)
}

/// Compare an arbitrary closed-form/trace pair over sampled points, the
/// machinery the verifier uses internally. Exposed so regression fixtures
/// (deliberately perturbed formulas) can demonstrate a failing case.
pub fn compare_pair<F>(trials: usize, seed: u64, tolerance: f64, mut sample: F) -> Result<CaseReport>
where
    F: FnMut(&mut ChaCha20Rng) -> Result<Sample>,
{
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut max_delta = 0.0f64;
    let mut worst = Vec::new();
    for _ in 0..trials {
        let (params, closed, trace) = sample(&mut rng)?;
        let delta = (closed - trace).abs();
        if delta >= max_delta {
            max_delta = delta;
            worst = params;
        }
    }
    let status = if max_delta <= tolerance {
        CaseStatus::Ok
    } else {
        CaseStatus::Failed
    };
    Ok(CaseReport {
        name: "custom".into(),
        trials,
        max_delta,
        worst_params: worst,
        status,
        note: String::new(),
    })
}
