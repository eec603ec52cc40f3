//! Closed-form correlation coefficients, each transcribed literally from
//! its printed source with no algebraic simplification. They serve as
//! oracles for the trace engine and as fast evaluators for scans and
//! figure reproduction; any disagreement between the two routes lands in
//! the errata file rather than being patched over here.

use crate::error::{Error, Result};
use crate::spin::SpinMagnitude;

/// Identifier for every closed-form expression the library transcribes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClosedFormId {
    /// Two spin-1 particles, arbitrary labels (λ₋, λ₀, λ₊), full angles.
    E321General,
    /// Two spin-1 particles, spin labels (−1, 0, +1).
    E321Spin,
    /// Two spin-1 particles, labels (1, 0, 1), full angles.
    E321Ks,
    /// Two spin-1 particles, labels (0, 1, 0), full angles.
    E321KsInverted,
    /// Labels (1, 0, 1) with both polar angles pinned to π/2.
    E321KsPhi,
    /// Labels (0, 1, 0) with both polar angles pinned to π/2.
    E321KsInvertedPhi,
    /// Labels (1, 0, 1) in the φ = 0 meridian.
    E321KsTheta,
    /// Labels (0, 1, 0) in the φ = 0 meridian.
    E321KsInvertedTheta,
    /// The weighted combination ½[−cosΔ + cos2Δ] built from spin and
    /// degenerate-label coefficients (meridian only).
    E321Enhanced,
    /// Two spin-3/2 particles, spin labels.
    E421Spin,
    /// Two spin-3/2 particles, labels (−1, −1, +1, +1), dirs (θ,0,0,0).
    E421PlasticMmpp,
    /// Two spin-3/2 particles, labels (−1, +1, +1, −1), dirs (θ,0,0,0).
    E421PlasticMppm,
    /// Two spin-3/2 particles, labels (+1, −1, +1, −1), dirs (θ,0,0,0).
    E421PlasticPmpm,
    /// Two spin-j particles, spin labels, any j.
    EGeneralJ,
    /// Four-qubit singlet 1, parity correlation, full angles.
    E241General,
    /// Four-qubit singlet 1 with all polar angles at π/2.
    E241Phi,
    /// Four-qubit singlet 1 in the φ = 0 meridian.
    E241Theta,
    /// Four-qubit singlet 2 (pair product), full angles.
    E242General,
    /// Four-qubit singlet 2 in the φ = 0 meridian.
    E242Theta,
    /// Four-qubit singlet 2 with all polar angles at π/2.
    E242Phi,
    /// The classical linear correlation line 2θ/π − 1.
    EClassicalLinear,
}

impl ClosedFormId {
    pub const ALL: [ClosedFormId; 21] = [
        ClosedFormId::E321General,
        ClosedFormId::E321Spin,
        ClosedFormId::E321Ks,
        ClosedFormId::E321KsInverted,
        ClosedFormId::E321KsPhi,
        ClosedFormId::E321KsInvertedPhi,
        ClosedFormId::E321KsTheta,
        ClosedFormId::E321KsInvertedTheta,
        ClosedFormId::E321Enhanced,
        ClosedFormId::E421Spin,
        ClosedFormId::E421PlasticMmpp,
        ClosedFormId::E421PlasticMppm,
        ClosedFormId::E421PlasticPmpm,
        ClosedFormId::EGeneralJ,
        ClosedFormId::E241General,
        ClosedFormId::E241Phi,
        ClosedFormId::E241Theta,
        ClosedFormId::E242General,
        ClosedFormId::E242Theta,
        ClosedFormId::E242Phi,
        ClosedFormId::EClassicalLinear,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ClosedFormId::E321General => "E321_general",
            ClosedFormId::E321Spin => "E321_spin",
            ClosedFormId::E321Ks => "E321_KS",
            ClosedFormId::E321KsInverted => "E321_KS_inverted",
            ClosedFormId::E321KsPhi => "E321_KS_phi",
            ClosedFormId::E321KsInvertedPhi => "E321_KS_inverted_phi",
            ClosedFormId::E321KsTheta => "E321_KS_theta",
            ClosedFormId::E321KsInvertedTheta => "E321_KS_inverted_theta",
            ClosedFormId::E321Enhanced => "E321_enhanced",
            ClosedFormId::E421Spin => "E421_spin",
            ClosedFormId::E421PlasticMmpp => "E421_plastic_mmpp",
            ClosedFormId::E421PlasticMppm => "E421_plastic_mppm",
            ClosedFormId::E421PlasticPmpm => "E421_plastic_pmpm",
            ClosedFormId::EGeneralJ => "E_general_j",
            ClosedFormId::E241General => "E241_general",
            ClosedFormId::E241Phi => "E241_phi",
            ClosedFormId::E241Theta => "E241_theta",
            ClosedFormId::E242General => "E242_general",
            ClosedFormId::E242Theta => "E242_theta",
            ClosedFormId::E242Phi => "E242_phi",
            ClosedFormId::EClassicalLinear => "E_classical_linear",
        }
    }

    pub fn from_name(name: &str) -> Option<ClosedFormId> {
        ClosedFormId::ALL.iter().copied().find(|id| id.name() == name)
    }

    /// (polar angles, azimuthal angles, labels) the form expects.
    pub fn arity(&self) -> (usize, usize, usize) {
        match self {
            ClosedFormId::E321General => (2, 2, 3),
            ClosedFormId::E321Spin
            | ClosedFormId::E321Ks
            | ClosedFormId::E321KsInverted
            | ClosedFormId::E421Spin
            | ClosedFormId::EGeneralJ => (2, 2, 0),
            ClosedFormId::E321KsPhi | ClosedFormId::E321KsInvertedPhi => (0, 2, 0),
            ClosedFormId::E321KsTheta
            | ClosedFormId::E321KsInvertedTheta
            | ClosedFormId::E321Enhanced => (2, 0, 0),
            ClosedFormId::E421PlasticMmpp
            | ClosedFormId::E421PlasticMppm
            | ClosedFormId::E421PlasticPmpm
            | ClosedFormId::EClassicalLinear => (1, 0, 0),
            ClosedFormId::E241General | ClosedFormId::E242General => (4, 4, 0),
            ClosedFormId::E241Phi | ClosedFormId::E242Phi => (0, 4, 0),
            ClosedFormId::E241Theta | ClosedFormId::E242Theta => (4, 0, 0),
        }
    }

    pub fn needs_j(&self) -> bool {
        matches!(self, ClosedFormId::EGeneralJ)
    }

    /// Outcome labels of the observable the form describes, ascending m.
    /// None when the form is not a single labeled-observable correlation.
    pub fn labels(&self) -> Option<Vec<f64>> {
        match self {
            ClosedFormId::E321Spin => Some(vec![-1.0, 0.0, 1.0]),
            ClosedFormId::E321Ks | ClosedFormId::E321KsPhi | ClosedFormId::E321KsTheta => {
                Some(vec![1.0, 0.0, 1.0])
            }
            ClosedFormId::E321KsInverted
            | ClosedFormId::E321KsInvertedPhi
            | ClosedFormId::E321KsInvertedTheta => Some(vec![0.0, 1.0, 0.0]),
            ClosedFormId::E421Spin => Some(vec![-1.5, -0.5, 0.5, 1.5]),
            ClosedFormId::E421PlasticMmpp => Some(vec![-1.0, -1.0, 1.0, 1.0]),
            ClosedFormId::E421PlasticMppm => Some(vec![-1.0, 1.0, 1.0, -1.0]),
            ClosedFormId::E421PlasticPmpm => Some(vec![1.0, -1.0, 1.0, -1.0]),
            _ => None,
        }
    }
}

/// Parameters for `evaluate`: polar angles, azimuthal angles, labels, and
/// (only for the general-j law) the spin magnitude.
#[derive(Debug, Clone, Default)]
pub struct FormParams {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub labels: Vec<f64>,
    pub j: Option<SpinMagnitude>,
}

impl FormParams {
    pub fn angles(theta: &[f64], phi: &[f64]) -> Self {
        FormParams {
            theta: theta.to_vec(),
            phi: phi.to_vec(),
            ..Default::default()
        }
    }
}

/// Evaluate a closed form at the given parameters, checking arity.
pub fn evaluate(id: ClosedFormId, p: &FormParams) -> Result<f64> {
    let (nt, np, nl) = id.arity();
    if p.theta.len() != nt || p.phi.len() != np || p.labels.len() != nl {
        return Err(Error::InvalidArgument(format!(
            "{} expects {nt} polar angles, {np} azimuthal angles, {nl} labels; \
             got {}, {}, {}",
            id.name(),
            p.theta.len(),
            p.phi.len(),
            p.labels.len()
        )));
    }
    if id.needs_j() && p.j.is_none() {
        return Err(Error::InvalidArgument(format!(
            "{} needs a spin magnitude",
            id.name()
        )));
    }
    let t = &p.theta;
    let f = &p.phi;
    Ok(match id {
        ClosedFormId::E321General => {
            e321_general(t[0], t[1], f[0], f[1], p.labels[0], p.labels[1], p.labels[2])
        }
        ClosedFormId::E321Spin => e321_spin(t[0], t[1], f[0], f[1]),
        ClosedFormId::E321Ks => e321_ks(t[0], t[1], f[0], f[1]),
        ClosedFormId::E321KsInverted => e321_ks_inverted(t[0], t[1], f[0], f[1]),
        ClosedFormId::E321KsPhi => e321_ks_phi(f[0], f[1]),
        ClosedFormId::E321KsInvertedPhi => e321_ks_inverted_phi(f[0], f[1]),
        ClosedFormId::E321KsTheta => e321_ks_theta(t[0], t[1]),
        ClosedFormId::E321KsInvertedTheta => e321_ks_inverted_theta(t[0], t[1]),
        ClosedFormId::E321Enhanced => enhanced_combination(t[0], t[1]),
        ClosedFormId::E421Spin => e421_spin(t[0], t[1], f[0], f[1]),
        ClosedFormId::E421PlasticMmpp => e421_plastic_mmpp(t[0]),
        ClosedFormId::E421PlasticMppm => e421_plastic_mppm(t[0]),
        ClosedFormId::E421PlasticPmpm => e421_plastic_pmpm(t[0]),
        ClosedFormId::EGeneralJ => e_general_j(p.j.expect("checked"), t[0], t[1], f[0], f[1]),
        ClosedFormId::E241General => e241_general(
            [t[0], t[1], t[2], t[3]],
            [f[0], f[1], f[2], f[3]],
        ),
        ClosedFormId::E241Phi => e241_phi([f[0], f[1], f[2], f[3]]),
        ClosedFormId::E241Theta => e241_theta([t[0], t[1], t[2], t[3]]),
        ClosedFormId::E242General => e242_general(
            [t[0], t[1], t[2], t[3]],
            [f[0], f[1], f[2], f[3]],
        ),
        ClosedFormId::E242Theta => e242_theta([t[0], t[1], t[2], t[3]]),
        ClosedFormId::E242Phi => e242_phi([f[0], f[1], f[2], f[3]]),
        ClosedFormId::EClassicalLinear => e_classical_linear(t[0]),
    })
}

/// Two spin-1 particles, arbitrary outcome labels (λ₋, λ₀, λ₊).
#[allow(clippy::too_many_arguments)]
pub fn e321_general(t1: f64, t2: f64, p1: f64, p2: f64, lm: f64, l0: f64, lp: f64) -> f64 {
    let dp = p1 - p2;
    let w = -2.0 * l0 + lm + lp;
    (1.0 / 192.0)
        * (24.0 * l0 * l0
            + 40.0 * l0 * (lm + lp)
            + 22.0 * (lm + lp) * (lm + lp)
            - 32.0 * (lm - lp) * (lm - lp) * t1.cos() * t2.cos()
            + 2.0
                * w
                * w
                * (2.0 * t2).cos()
                * ((3.0 + (2.0 * dp).cos()) * (2.0 * t1).cos() + 2.0 * dp.sin() * dp.sin())
            + 2.0 * w * w * ((2.0 * dp).cos() + 2.0 * (2.0 * t1).cos() * dp.sin() * dp.sin())
            - 32.0 * (lm - lp) * (lm - lp) * dp.cos() * t1.sin() * t2.sin()
            + 8.0 * w * w * dp.cos() * (2.0 * t1).sin() * (2.0 * t2).sin())
}

/// Spin labels (−1, 0, +1): −(2/3)[cosθ₁cosθ₂ + cos(φ₁−φ₂)sinθ₁sinθ₂].
pub fn e321_spin(t1: f64, t2: f64, p1: f64, p2: f64) -> f64 {
    -(2.0 / 3.0) * (t1.cos() * t2.cos() + (p1 - p2).cos() * t1.sin() * t2.sin())
}

/// Degenerate labels (1, 0, 1), full angles.
pub fn e321_ks(t1: f64, t2: f64, p1: f64, p2: f64) -> f64 {
    let dp = p1 - p2;
    (1.0 / 24.0)
        * (11.0
            + (2.0 * dp).cos()
            + 4.0 * dp.cos() * (2.0 * t1).sin() * (2.0 * t2).sin()
            + 2.0 * ((2.0 * t1).cos() + (2.0 * t2).cos()) * dp.sin() * dp.sin()
            + (2.0 * t1).cos() * (2.0 * t2).cos() * ((2.0 * dp).cos() + 3.0))
}

/// Inverted labels (0, 1, 0), full angles.
pub fn e321_ks_inverted(t1: f64, t2: f64, p1: f64, p2: f64) -> f64 {
    let inner = t1.cos() * t2.cos() + (p1 - p2).cos() * t1.sin() * t2.sin();
    (1.0 / 3.0) * inner * inner
}

/// Labels (1, 0, 1) at θ₁ = θ₂ = π/2.
pub fn e321_ks_phi(p1: f64, p2: f64) -> f64 {
    (1.0 / 6.0) * ((2.0 * (p1 - p2)).cos() + 3.0)
}

/// Labels (0, 1, 0) at θ₁ = θ₂ = π/2.
pub fn e321_ks_inverted_phi(p1: f64, p2: f64) -> f64 {
    let c = (p1 - p2).cos();
    (1.0 / 3.0) * c * c
}

/// Labels (1, 0, 1) in the φ = 0 meridian.
pub fn e321_ks_theta(t1: f64, t2: f64) -> f64 {
    (1.0 / 6.0) * ((2.0 * (t1 - t2)).cos() + 3.0)
}

/// Labels (0, 1, 0) in the φ = 0 meridian.
pub fn e321_ks_inverted_theta(t1: f64, t2: f64) -> f64 {
    let c = (t1 - t2).cos();
    (1.0 / 3.0) * c * c
}

/// The combined coefficient ½[−cos(θ₁−θ₂) + cos 2(θ₁−θ₂)].
pub fn enhanced_combination(t1: f64, t2: f64) -> f64 {
    let d = t1 - t2;
    0.5 * (-d.cos() + (2.0 * d).cos())
}

/// The same combination assembled from its label-coefficient constituents:
/// ½{E_spin(θ̂, 0, 0) + 3·[2·E_KS(θ̂, 0, 0) − 1]}.
///
/// This does NOT reproduce `enhanced_combination`; it evaluates to
/// ½[−(2/3)cosΔ + cos2Δ], a measured difference of (1/6)cosΔ that is
/// recorded in the errata file.
pub fn enhanced_combination_from_labels(t1: f64, t2: f64) -> f64 {
    0.5 * (e321_spin(t1, t2, 0.0, 0.0) + 3.0 * (2.0 * e321_ks_theta(t1, t2) - 1.0))
}

/// Two spin-3/2 particles with spin labels.
pub fn e421_spin(t1: f64, t2: f64, p1: f64, p2: f64) -> f64 {
    -(5.0 / 4.0) * (t1.cos() * t2.cos() + (p1 - p2).cos() * t1.sin() * t2.sin())
}

/// Spin-3/2 labels (−1, −1, +1, +1) at dirs (θ, 0), (0, 0).
pub fn e421_plastic_mmpp(theta: f64) -> f64 {
    (1.0 / 8.0) * (-7.0 * theta.cos() - (3.0 * theta).cos())
}

/// Spin-3/2 labels (−1, +1, +1, −1) at dirs (θ, 0), (0, 0).
pub fn e421_plastic_mppm(theta: f64) -> f64 {
    (1.0 / 4.0) * (3.0 * (2.0 * theta).cos() + 1.0)
}

/// Spin-3/2 labels (+1, −1, +1, −1) at dirs (θ, 0), (0, 0).
pub fn e421_plastic_pmpm(theta: f64) -> f64 {
    (1.0 / 2.0) * (-theta.cos() - (3.0 * theta).cos())
}

/// Spin-state correlation of the two-spin-j singlet for any j.
pub fn e_general_j(j: SpinMagnitude, t1: f64, t2: f64, p1: f64, p2: f64) -> f64 {
    let jj = j.j();
    -(jj * (1.0 + jj) / 3.0) * (t1.cos() * t2.cos() + (p1 - p2).cos() * t1.sin() * t2.sin())
}

/// Parity correlation of four-qubit singlet 1, full angles.
pub fn e241_general(t: [f64; 4], p: [f64; 4]) -> f64 {
    let [t1, t2, t3, t4] = t;
    let [p1, p2, p3, p4] = p;
    (1.0 / 3.0)
        * (t3.cos() * t1.sin()
            * (-t4.cos() * (p1 - p2).cos() * t2.sin() + 2.0 * t2.cos() * (p1 - p4).cos() * t4.sin())
            + t1.sin()
                * t3.sin()
                * (2.0 * t2.cos() * t4.cos() * (p1 - p3).cos()
                    + (2.0 * (p1 + p2 - p3 - p4).cos() + (p1 - p2).cos() * (p3 - p4).cos())
                        * t2.sin()
                        * t4.sin())
            + t1.cos()
                * (2.0 * t2.sin()
                    * (t4.cos() * (p2 - p3).cos() * t3.sin() + t3.cos() * (p2 - p4).cos() * t4.sin())
                    + t2.cos()
                        * (3.0 * t3.cos() * t4.cos() - (p3 - p4).cos() * t3.sin() * t4.sin())))
}

/// Four-qubit singlet 1 with every polar angle at π/2.
pub fn e241_phi(p: [f64; 4]) -> f64 {
    let [p1, p2, p3, p4] = p;
    (1.0 / 3.0) * (2.0 * (p1 + p2 - p3 - p4).cos() + (p1 - p2).cos() * (p3 - p4).cos())
}

/// Four-qubit singlet 1 in the φ = 0 meridian.
pub fn e241_theta(t: [f64; 4]) -> f64 {
    let [t1, t2, t3, t4] = t;
    (1.0 / 3.0) * (2.0 * (t1 + t2 - t3 - t4).cos() + (t1 - t2).cos() * (t3 - t4).cos())
}

/// Four-qubit singlet 2 (pair product), full angles.
pub fn e242_general(t: [f64; 4], p: [f64; 4]) -> f64 {
    let [t1, t2, t3, t4] = t;
    let [p1, p2, p3, p4] = p;
    (t1.cos() * t2.cos() + (p1 - p2).cos() * t1.sin() * t2.sin())
        * (t3.cos() * t4.cos() + (p3 - p4).cos() * t3.sin() * t4.sin())
}

/// Four-qubit singlet 2 in the φ = 0 meridian.
pub fn e242_theta(t: [f64; 4]) -> f64 {
    (t[0] - t[1]).cos() * (t[2] - t[3]).cos()
}

/// Four-qubit singlet 2 with every polar angle at π/2.
pub fn e242_phi(p: [f64; 4]) -> f64 {
    (p[0] - p[1]).cos() * (p[2] - p[3]).cos()
}

/// Classical linear correlation line.
pub fn e_classical_linear(theta: f64) -> f64 {
    2.0 * theta / std::f64::consts::PI - 1.0
}

/// One figure's worth of labeled curves sampled on a θ grid.
#[derive(Debug, Clone)]
pub struct FigureTable {
    pub figure: u8,
    pub series_names: Vec<&'static str>,
    pub thetas: Vec<f64>,
    /// values[s][k] is series s at thetas[k].
    pub values: Vec<Vec<f64>>,
}

type Curve = Box<dyn Fn(f64) -> f64>;

/// Curves of the two plasticity figures.
///
/// Figure 1 (two spin-3/2 particles): the three relabeled coefficients,
/// the rescaled spin coefficient (4/5)·E421_spin(θ,0,0,0) = −cosθ, and the
/// classical line. Figure 2 (four qubits): E241_theta at the five
/// captioned argument patterns.
pub fn figure_curves(figure: u8, thetas: &[f64]) -> Result<FigureTable> {
    if thetas.is_empty() {
        return Err(Error::InvalidArgument("empty θ grid".into()));
    }
    if thetas
        .iter()
        .any(|&t| !t.is_finite() || !(0.0..=std::f64::consts::PI + 1e-12).contains(&t))
    {
        return Err(Error::InvalidArgument(
            "figure grids must lie within [0, π]".into(),
        ));
    }
    let (series_names, series): (Vec<&'static str>, Vec<Curve>) = match figure {
        1 => (
            vec!["mmpp", "mppm", "pmpm", "spin_scaled", "classical"],
            vec![
                Box::new(e421_plastic_mmpp),
                Box::new(e421_plastic_mppm),
                Box::new(e421_plastic_pmpm),
                Box::new(|t| 0.8 * e421_spin(t, 0.0, 0.0, 0.0)),
                Box::new(e_classical_linear),
            ],
        ),
        2 => (
            vec![
                "t_qpi4_mt_t",
                "t_t_mt_t",
                "t_mt_mt_t",
                "t_mt_mt_0",
                "mt_mt_qpi4_t",
            ],
            vec![
                Box::new(|t| e241_theta([t, std::f64::consts::FRAC_PI_4, -t, t])),
                Box::new(|t| e241_theta([t, t, -t, t])),
                Box::new(|t| e241_theta([t, -t, -t, t])),
                Box::new(|t| e241_theta([t, -t, -t, 0.0])),
                Box::new(|t| e241_theta([-t, -t, std::f64::consts::FRAC_PI_4, t])),
            ],
        ),
        other => {
            return Err(Error::InvalidArgument(format!(
                "figure selector must be 1 or 2, got {other}"
            )))
        }
    };
    let values = series
        .iter()
        .map(|f| thetas.iter().map(|&t| f(t)).collect())
        .collect();
    Ok(FigureTable {
        figure,
        series_names,
        thetas: thetas.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    struct Angles(u64);
    impl Angles {
        fn next(&mut self) -> f64 {
            self.0 = self
                .0
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (self.0 >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    #[test]
    fn point_values() {
        assert!((e321_spin(0.0, 0.0, 0.0, 0.0) + 2.0 / 3.0).abs() < 1e-15);
        assert!((e321_ks_theta(FRAC_PI_4, 0.0) - 0.5).abs() < 1e-15);
        assert!((e421_plastic_mmpp(PI) - 1.0).abs() < 1e-15);
        assert!((e241_theta([0.4, 0.4, 0.4, 0.4]) - 1.0).abs() < 1e-15);
        assert!(e_classical_linear(FRAC_PI_2).abs() < 1e-15);
        assert!((e421_plastic_mmpp(0.0) + 1.0).abs() < 1e-15);
        assert!((e421_plastic_mppm(0.0) - 1.0).abs() < 1e-15);
        assert!((e421_plastic_pmpm(0.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn general_form_specializes_to_spin_labels() {
        let mut rng = Angles(5);
        for _ in 0..200 {
            let (t1, t2) = (rng.next() * PI, rng.next() * PI);
            let (p1, p2) = (
                rng.next() * std::f64::consts::TAU,
                rng.next() * std::f64::consts::TAU,
            );
            let gen = e321_general(t1, t2, p1, p2, -1.0, 0.0, 1.0);
            let spin = e321_spin(t1, t2, p1, p2);
            assert!((gen - spin).abs() < 1e-12);
        }
    }

    #[test]
    fn ks_and_inverted_are_complementary() {
        // R(1,0,1) + R(0,1,0) = I gives E₁₀₁ = 1/3 + E₀₁₀ on the singlet.
        let mut rng = Angles(9);
        for _ in 0..100 {
            let (t1, t2) = (rng.next() * PI, rng.next() * PI);
            let (p1, p2) = (
                rng.next() * std::f64::consts::TAU,
                rng.next() * std::f64::consts::TAU,
            );
            let lhs = e321_ks(t1, t2, p1, p2);
            let rhs = 1.0 / 3.0 + e321_ks_inverted(t1, t2, p1, p2);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn pinned_variants_match_their_general_forms() {
        let mut rng = Angles(13);
        for _ in 0..100 {
            let (a, b) = (
                rng.next() * std::f64::consts::TAU,
                rng.next() * std::f64::consts::TAU,
            );
            assert!((e321_ks(FRAC_PI_2, FRAC_PI_2, a, b) - e321_ks_phi(a, b)).abs() < 1e-13);
            assert!(
                (e321_ks_inverted(FRAC_PI_2, FRAC_PI_2, a, b) - e321_ks_inverted_phi(a, b)).abs()
                    < 1e-13
            );
            let (t1, t2) = (rng.next() * PI, rng.next() * PI);
            assert!((e321_ks(t1, t2, 0.0, 0.0) - e321_ks_theta(t1, t2)).abs() < 1e-13);
            assert!(
                (e321_ks_inverted(t1, t2, 0.0, 0.0) - e321_ks_inverted_theta(t1, t2)).abs() < 1e-13
            );
            assert!((e241_general([FRAC_PI_2; 4], [a, b, a, b]) - e241_phi([a, b, a, b])).abs() < 1e-13);
            assert!((e242_general([t1, t2, t1, t2], [0.0; 4]) - e242_theta([t1, t2, t1, t2])).abs() < 1e-13);
        }
    }

    #[test]
    fn enhanced_combination_values() {
        assert!((enhanced_combination(FRAC_PI_2, 0.0) + 0.5).abs() < 1e-15);
        assert!(enhanced_combination(0.7, 0.7).abs() < 1e-15);
        assert!(enhanced_combination(2.0 * PI / 3.0, 0.0).abs() < 1e-15);
    }

    #[test]
    fn enhanced_combination_label_route_differs_by_sixth_cosine() {
        // The label-built combination falls short of the printed form by
        // exactly (1/6)cosΔ; this pins the recorded erratum.
        let mut rng = Angles(17);
        for _ in 0..100 {
            let (t1, t2) = (rng.next() * PI, rng.next() * PI);
            let printed = enhanced_combination(t1, t2);
            let built = enhanced_combination_from_labels(t1, t2);
            let gap = printed - built;
            assert!((gap + (t1 - t2).cos() / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn evaluate_dispatch_and_arity() {
        let p = FormParams::angles(&[0.0, 0.0], &[0.0, 0.0]);
        let v = evaluate(ClosedFormId::E321Spin, &p).unwrap();
        assert!((v + 2.0 / 3.0).abs() < 1e-15);

        let err = evaluate(ClosedFormId::E321Spin, &FormParams::angles(&[0.0], &[])).unwrap_err();
        assert!(err.is_usage());

        let err = evaluate(
            ClosedFormId::EGeneralJ,
            &FormParams::angles(&[0.0, 0.0], &[0.0, 0.0]),
        )
        .unwrap_err();
        assert!(err.is_usage());

        let mut p = FormParams::angles(&[0.3, 0.4], &[0.0, 1.0]);
        p.j = Some(SpinMagnitude::from_two_j(4).unwrap());
        let v = evaluate(ClosedFormId::EGeneralJ, &p).unwrap();
        assert!((v - e_general_j(p.j.unwrap(), 0.3, 0.4, 0.0, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn id_names_round_trip() {
        for id in ClosedFormId::ALL {
            assert_eq!(ClosedFormId::from_name(id.name()), Some(id));
        }
        assert_eq!(ClosedFormId::from_name("nope"), None);
    }

    #[test]
    fn figure_one_endpoints() {
        let table = figure_curves(1, &[0.0, FRAC_PI_2, PI]).unwrap();
        // Series d is −cosθ.
        let d = &table.values[3];
        assert!((d[0] + 1.0).abs() < 1e-14);
        assert!(d[1].abs() < 1e-14);
        assert!((d[2] - 1.0).abs() < 1e-14);
        // The relabeled coefficients at θ = 0 give (−1, 1, −1).
        assert!((table.values[0][0] + 1.0).abs() < 1e-14);
        assert!((table.values[1][0] - 1.0).abs() < 1e-14);
        assert!((table.values[2][0] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn figure_two_endpoints() {
        let table = figure_curves(2, &[0.0, PI]).unwrap();
        // Curves b and d start at 1; a and e start at cos(π/4)·(2+1)/3.
        assert!((table.values[1][0] - 1.0).abs() < 1e-14);
        assert!((table.values[3][0] - 1.0).abs() < 1e-14);
        let start = (2.0 * FRAC_PI_4.cos() + FRAC_PI_4.cos()) / 3.0;
        assert!((table.values[0][0] - start).abs() < 1e-14);
        assert!((table.values[4][0] - start).abs() < 1e-14);
    }

    #[test]
    fn figure_grid_validation() {
        assert!(figure_curves(1, &[]).is_err());
        assert!(figure_curves(1, &[-0.1]).is_err());
        assert!(figure_curves(3, &[0.0]).is_err());
    }
}
