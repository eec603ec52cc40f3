//! CHSH evaluation and angle-space search, the enhancement-domain report,
//! and the Fourier step-function buildup.
//!
//! The CHSH combination used throughout is the standard
//! S = E(a,b) + E(a,b′) + E(a′,b) − E(a′,b′).

use std::time::Instant;

use crate::closedform;
use crate::correlate::{self, CorrelationQuery};
use crate::error::{Error, Result};
use crate::spin::{labeled_observable, Direction, LabelVector, SpinMagnitude};
use crate::states::{DensityMatrix, SingletFamily, SingletState};
use crate::tol::{Tolerances, KAHAN_THRESHOLD};

/// Measurement settings for one CHSH evaluation.
#[derive(Debug, Clone)]
pub struct ChshSetting {
    pub alice: [Direction; 2],
    pub bob: [Direction; 2],
    pub alice_labels: LabelVector,
    pub bob_labels: LabelVector,
}

/// Which route evaluates the four correlations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChshEngine {
    Trace,
    ClosedForm,
    /// Evaluate both and fail on disagreement beyond the engine tolerance.
    Both,
}

/// S = E(a,b) + E(a,b′) + E(a′,b) − E(a′,b′) for a two-particle singlet.
pub fn chsh_value(state: &SingletState, setting: &ChshSetting, engine: ChshEngine) -> Result<f64> {
    let j = match state.family() {
        SingletFamily::SpinPair(j) => j,
        SingletFamily::FourQubit(_) => {
            return Err(Error::InvalidArgument(
                "chsh_value needs a two-particle state; use optimize_chsh for \
                 the pairwise four-qubit search"
                    .into(),
            ))
        }
    };
    if setting.alice_labels.len() != j.dim() || setting.bob_labels.len() != j.dim() {
        return Err(Error::DimMismatch(format!(
            "label vectors must have length 2j+1 = {}",
            j.dim()
        )));
    }
    let combine = |e: &dyn Fn(Direction, Direction) -> Result<f64>| -> Result<f64> {
        let [a, ap] = setting.alice;
        let [b, bp] = setting.bob;
        Ok(e(a, b)? + e(a, bp)? + e(ap, b)? - e(ap, bp)?)
    };

    let trace_val = |rho: &DensityMatrix| -> Result<f64> {
        combine(&|x, y| {
            correlate::pair_correlation(
                rho,
                j,
                [x, y],
                [&setting.alice_labels, &setting.bob_labels],
            )
        })
    };

    match engine {
        ChshEngine::Trace => trace_val(&state.density()),
        ChshEngine::ClosedForm => {
            let f = closed_pair_form(j, &setting.alice_labels, &setting.bob_labels)?;
            combine(&|x, y| Ok(f(x, y)))
        }
        ChshEngine::Both => {
            let t = trace_val(&state.density())?;
            let f = closed_pair_form(j, &setting.alice_labels, &setting.bob_labels)?;
            let c = combine(&|x, y| Ok(f(x, y)))?;
            let gap = (t - c).abs();
            if gap > Tolerances::default().engine_agreement {
                return Err(Error::EngineDisagreement(gap));
            }
            Ok(t)
        }
    }
}

/// Closed-form pair correlation for a spin-j singlet, when one exists for
/// the given labels: the general spin-1 expression, or the general-j law
/// rescaled for labels proportional to the spin labels.
fn closed_pair_form(
    j: SpinMagnitude,
    alice: &LabelVector,
    bob: &LabelVector,
) -> Result<Box<dyn Fn(Direction, Direction) -> f64>> {
    if j == SpinMagnitude::ONE && alice == bob {
        let l = alice.as_slice().to_vec();
        return Ok(Box::new(move |x: Direction, y: Direction| {
            closedform::e321_general(x.theta(), y.theta(), x.phi(), y.phi(), l[0], l[1], l[2])
        }));
    }
    let spin = LabelVector::spin(j);
    let ratio = |labels: &LabelVector| -> Option<f64> {
        let s = spin.as_slice();
        let l = labels.as_slice();
        let (mut c, mut seen) = (0.0, false);
        for (a, b) in l.iter().zip(s) {
            if b.abs() < 1e-15 {
                if a.abs() > 1e-12 {
                    return None;
                }
                continue;
            }
            let r = a / b;
            if seen && (r - c).abs() > 1e-12 {
                return None;
            }
            c = r;
            seen = true;
        }
        seen.then_some(c)
    };
    if let (Some(ca), Some(cb)) = (ratio(alice), ratio(bob)) {
        return Ok(Box::new(move |x: Direction, y: Direction| {
            ca * cb * closedform::e_general_j(j, x.theta(), y.theta(), x.phi(), y.phi())
        }));
    }
    Err(Error::InvalidArgument(
        "no closed form covers this combination of spin and labels".into(),
    ))
}

/// Search strategy for `optimize_chsh`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMethod {
    /// Exhaustive lattice search only.
    Grid,
    /// Lattice search followed by coordinate-wise golden-section refinement.
    GridRefine,
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub method: ScanMethod,
    /// Lattice points per angle.
    pub grid_per_angle: usize,
    /// Cap on correlation-engine evaluations.
    pub budget: u64,
    /// Search all eight spherical angles instead of the φ = 0 meridian.
    pub full_angles: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            method: ScanMethod::GridRefine,
            grid_per_angle: 60,
            budget: 1_000_000,
            full_angles: false,
        }
    }
}

/// Outcome of a CHSH angle scan. `best_value` is the value returned by the
/// final evaluation at `argmax`, so re-evaluating reproduces it exactly.
#[derive(Debug, Clone)]
pub struct ScanResult {
    pub best_value: f64,
    pub alice: [Direction; 2],
    pub bob: [Direction; 2],
    pub evaluations: u64,
    pub runtime_ms: f64,
    pub method: String,
}

/// Pair-correlation evaluator used by the scans. For a spin pair this is
/// the two-particle correlation with the given labels; for a four-qubit
/// singlet it is the parity correlation with particles 3 and 4 pinned to
/// the +z axis ("pairwise" mode).
struct PairEvaluator {
    rho: DensityMatrix,
    j: SpinMagnitude,
    alice_labels: LabelVector,
    bob_labels: LabelVector,
    pairwise_four_qubit: bool,
    evaluations: std::cell::Cell<u64>,
}

impl PairEvaluator {
    fn new(state: &SingletState, alice_labels: &LabelVector, bob_labels: &LabelVector) -> Result<Self> {
        let (j, pairwise) = match state.family() {
            SingletFamily::SpinPair(j) => (j, false),
            SingletFamily::FourQubit(_) => (SpinMagnitude::HALF, true),
        };
        if alice_labels.len() != j.dim() || bob_labels.len() != j.dim() {
            return Err(Error::DimMismatch(format!(
                "label vectors must have length 2j+1 = {}",
                j.dim()
            )));
        }
        Ok(PairEvaluator {
            rho: state.density(),
            j,
            alice_labels: alice_labels.clone(),
            bob_labels: bob_labels.clone(),
            pairwise_four_qubit: pairwise,
            evaluations: std::cell::Cell::new(0),
        })
    }

    fn eval(&self, x: Direction, y: Direction) -> Result<f64> {
        self.evaluations.set(self.evaluations.get() + 1);
        if self.pairwise_four_qubit {
            let z = Direction::z();
            let obs = [
                labeled_observable(self.j, x, self.alice_labels.clone())?,
                labeled_observable(self.j, y, self.bob_labels.clone())?,
                labeled_observable(self.j, z, self.alice_labels.clone())?,
                labeled_observable(self.j, z, self.bob_labels.clone())?,
            ];
            correlate::correlation(&CorrelationQuery {
                state: &self.rho,
                observables: &obs,
            })
        } else {
            correlate::pair_correlation(
                &self.rho,
                self.j,
                [x, y],
                [&self.alice_labels, &self.bob_labels],
            )
        }
    }

    fn count(&self) -> u64 {
        self.evaluations.get()
    }
}

/// Grid search plus optional golden-section refinement for the maximum of
/// the CHSH combination over measurement angles. The default search runs
/// in the φ = 0 meridian, where each direction is one signed plane angle;
/// `full_angles` switches to all eight spherical angles.
pub fn optimize_chsh(
    state: &SingletState,
    alice_labels: &LabelVector,
    bob_labels: &LabelVector,
    opts: &ScanOptions,
) -> Result<ScanResult> {
    if opts.budget == 0 {
        return Err(Error::InvalidArgument("budget must be ≥ 1 evaluation".into()));
    }
    let n = opts.grid_per_angle;
    if n < 2 {
        return Err(Error::InvalidArgument("grid must have ≥ 2 points per angle".into()));
    }
    if opts.full_angles && n > 10 {
        return Err(Error::InvalidArgument(
            "full-angle lattice is capped at 10 points per angle".into(),
        ));
    }
    let start = Instant::now();
    let eval = PairEvaluator::new(state, alice_labels, bob_labels)?;

    // Lattice of measurement settings per side.
    let tau = std::f64::consts::TAU;
    let settings: Vec<Direction> = if opts.full_angles {
        let mut v = Vec::with_capacity(n * n);
        for it in 0..n {
            let theta = std::f64::consts::PI * it as f64 / (n - 1) as f64;
            for ip in 0..n {
                let phi = tau * ip as f64 / n as f64;
                v.push(Direction::new(theta, phi)?);
            }
        }
        v
    } else {
        (0..n)
            .map(|i| Direction::from_plane_angle(tau * i as f64 / n as f64))
            .collect::<Result<_>>()?
    };

    let ns = settings.len();
    let needed = (ns * ns) as u64;
    if needed > opts.budget {
        return Err(Error::InvalidArgument(format!(
            "lattice needs {needed} correlation evaluations, over the budget {}",
            opts.budget
        )));
    }
    let mut m = vec![0.0f64; ns * ns];
    for (i, &x) in settings.iter().enumerate() {
        for (k, &y) in settings.iter().enumerate() {
            m[i * ns + k] = eval.eval(x, y)?;
        }
    }

    // Exhaustive combination over (a, a′, b, b′) lattice indices.
    let mut best = f64::NEG_INFINITY;
    let mut arg = [0usize; 4];
    for a in 0..ns {
        for ap in 0..ns {
            for b in 0..ns {
                let partial = m[a * ns + b] + m[ap * ns + b];
                for bp in 0..ns {
                    let s = partial + m[a * ns + bp] - m[ap * ns + bp];
                    if s > best {
                        best = s;
                        arg = [a, ap, b, bp];
                    }
                }
            }
        }
    }

    let dir_of = |idx: usize| settings[idx];
    let mut alice = [dir_of(arg[0]), dir_of(arg[1])];
    let mut bob = [dir_of(arg[2]), dir_of(arg[3])];

    let mut method = String::from(if opts.full_angles { "grid8" } else { "grid" });
    if opts.method == ScanMethod::GridRefine {
        method.push_str("+golden");
        let chsh_of = |angles: &[f64]| -> Result<f64> {
            let (a, ap, b, bp) = if opts.full_angles {
                (
                    Direction::new(angles[0], angles[1])?,
                    Direction::new(angles[2], angles[3])?,
                    Direction::new(angles[4], angles[5])?,
                    Direction::new(angles[6], angles[7])?,
                )
            } else {
                (
                    Direction::from_plane_angle(angles[0])?,
                    Direction::from_plane_angle(angles[1])?,
                    Direction::from_plane_angle(angles[2])?,
                    Direction::from_plane_angle(angles[3])?,
                )
            };
            Ok(eval.eval(a, b)? + eval.eval(a, bp)? + eval.eval(ap, b)? - eval.eval(ap, bp)?)
        };
        // Starting point and per-coordinate bracket half-width.
        let (mut x, h): (Vec<f64>, f64) = if opts.full_angles {
            let angles = vec![
                alice[0].theta(),
                alice[0].phi(),
                alice[1].theta(),
                alice[1].phi(),
                bob[0].theta(),
                bob[0].phi(),
                bob[1].theta(),
                bob[1].phi(),
            ];
            (angles, std::f64::consts::PI / (n - 1) as f64)
        } else {
            let plane = |d: Direction| if d.phi() > 1.0 { tau - d.theta() } else { d.theta() };
            (
                vec![
                    plane(alice[0]),
                    plane(alice[1]),
                    plane(bob[0]),
                    plane(bob[1]),
                ],
                tau / n as f64,
            )
        };

        const GOLDEN: f64 = 0.618_033_988_749_894_8;
        let mut sweeps = 0;
        loop {
            sweeps += 1;
            let mut largest_move = 0.0f64;
            for k in 0..x.len() {
                if eval.count() + 64 > opts.budget {
                    break;
                }
                let (mut lo, mut hi) = (x[k] - h, x[k] + h);
                let probe = |v: f64, xs: &[f64]| -> Result<f64> {
                    let mut trial = xs.to_vec();
                    trial[k] = v;
                    chsh_of(&trial)
                };
                let mut c = hi - GOLDEN * (hi - lo);
                let mut d = lo + GOLDEN * (hi - lo);
                let mut fc = probe(c, &x)?;
                let mut fd = probe(d, &x)?;
                while hi - lo > 1e-6 {
                    if fc > fd {
                        hi = d;
                        d = c;
                        fd = fc;
                        c = hi - GOLDEN * (hi - lo);
                        fc = probe(c, &x)?;
                    } else {
                        lo = c;
                        c = d;
                        fc = fd;
                        d = lo + GOLDEN * (hi - lo);
                        fd = probe(d, &x)?;
                    }
                }
                let new = 0.5 * (lo + hi);
                largest_move = largest_move.max((new - x[k]).abs());
                x[k] = new;
            }
            if largest_move < 1e-6 || sweeps >= 50 || eval.count() + 64 > opts.budget {
                break;
            }
        }
        if opts.full_angles {
            alice = [Direction::new(x[0], x[1])?, Direction::new(x[2], x[3])?];
            bob = [Direction::new(x[4], x[5])?, Direction::new(x[6], x[7])?];
        } else {
            alice = [
                Direction::from_plane_angle(x[0])?,
                Direction::from_plane_angle(x[1])?,
            ];
            bob = [
                Direction::from_plane_angle(x[2])?,
                Direction::from_plane_angle(x[3])?,
            ];
        }
    }

    // Final evaluation at the argmax is the reported value, so re-evaluating
    // the stored angles reproduces it bit for bit.
    let best_value = eval.eval(alice[0], bob[0])? + eval.eval(alice[0], bob[1])?
        + eval.eval(alice[1], bob[0])?
        - eval.eval(alice[1], bob[1])?;

    Ok(ScanResult {
        best_value,
        alice,
        bob,
        evaluations: eval.count(),
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        method,
    })
}

/// Re-evaluate the CHSH combination at a scan's argmax with the same
/// engine, for the reproducibility contract.
pub fn reevaluate_scan(
    state: &SingletState,
    alice_labels: &LabelVector,
    bob_labels: &LabelVector,
    result: &ScanResult,
) -> Result<f64> {
    let eval = PairEvaluator::new(state, alice_labels, bob_labels)?;
    Ok(eval.eval(result.alice[0], result.bob[0])? + eval.eval(result.alice[0], result.bob[1])?
        + eval.eval(result.alice[1], result.bob[0])?
        - eval.eval(result.alice[1], result.bob[1])?)
}

/// CHSH value of one deterministic local assignment: each party fixes an
/// outcome in {−1, +1} per setting. Always ±2.
pub fn deterministic_local_chsh(alice: [i8; 2], bob: [i8; 2]) -> f64 {
    let e = |a: i8, b: i8| (a as f64) * (b as f64);
    e(alice[0], bob[0]) + e(alice[0], bob[1]) + e(alice[1], bob[0]) - e(alice[1], bob[1])
}

/// Sign of the difference on one grid interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignInterval {
    pub start_index: usize,
    pub end_index: usize,
    pub sign: i8,
}

/// Comparison of the combined coefficient ½[−cosΔ + cos2Δ] against the
/// dichotomic singlet coefficient −cosΔ over Δ ∈ [0, π].
#[derive(Debug, Clone)]
pub struct EnhancementReport {
    pub grid_step: f64,
    pub samples: usize,
    pub sign_intervals: Vec<SignInterval>,
    /// Grid sub-domain where the combination lies strictly below −cosΔ.
    pub below_domain: Option<(f64, f64)>,
    /// First grid point where the difference turns negative.
    pub boundary: Option<f64>,
    /// The claimed enhancement domain (0, π/3).
    pub claimed_domain: (f64, f64),
    /// Whether the measured below-domain agrees with the claimed one.
    pub matches_claim: bool,
}

/// Tabulate enhanced_combination(Δ) − (−cosΔ) on a uniform grid.
pub fn enhancement_domain(grid_step: f64) -> Result<EnhancementReport> {
    if !(grid_step.is_finite() && grid_step > 0.0 && grid_step <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "grid step {grid_step} must lie in (0, 0.5]"
        )));
    }
    let samples = (std::f64::consts::PI / grid_step).ceil() as usize + 1;
    let diff = |k: usize| -> f64 {
        let d = (k as f64 * grid_step).min(std::f64::consts::PI);
        closedform::enhanced_combination(d, 0.0) + d.cos()
    };
    let sign_of = |v: f64| -> i8 {
        if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        }
    };

    let mut sign_intervals: Vec<SignInterval> = Vec::new();
    let mut below_start: Option<usize> = None;
    let mut below_end: Option<usize> = None;
    let mut boundary: Option<f64> = None;
    for k in 0..samples {
        let s = sign_of(diff(k));
        match sign_intervals.last_mut() {
            Some(iv) if iv.sign == s => iv.end_index = k,
            _ => sign_intervals.push(SignInterval {
                start_index: k,
                end_index: k,
                sign: s,
            }),
        }
        if s < 0 {
            if below_start.is_none() {
                below_start = Some(k);
                boundary = Some(k as f64 * grid_step);
            }
            below_end = Some(k);
        }
    }
    let below_domain = below_start.map(|s| {
        (
            s as f64 * grid_step,
            (below_end.unwrap() as f64 * grid_step).min(std::f64::consts::PI),
        )
    });
    let claimed_domain = (0.0, std::f64::consts::FRAC_PI_3);
    // Agreement would need the measured domain to sit inside the claim; a
    // lower edge at or beyond π/3 contradicts it.
    let matches_claim = below_domain
        .map(|(lo, hi)| lo < claimed_domain.1 && hi <= claimed_domain.1 + grid_step)
        .unwrap_or(false);
    Ok(EnhancementReport {
        grid_step,
        samples,
        sign_intervals,
        below_domain,
        boundary,
        claimed_domain,
        matches_claim,
    })
}

/// Partial sum of the step-function series on [0, π]:
/// −(4/π)·Σ_{n<terms} (−1)ⁿ cos[(2n+1)θ]/(2n+1), which converges to −1
/// below π/2, +1 above, and vanishes term by term at π/2.
pub fn sign_fourier_partial(theta: f64, terms: usize) -> Result<f64> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::InvalidArgument(format!(
            "theta {theta} must lie in [0, π]"
        )));
    }
    if terms == 0 {
        return Err(Error::InvalidArgument("need at least one series term".into()));
    }
    let factor = -4.0 / std::f64::consts::PI;
    if terms <= KAHAN_THRESHOLD {
        let mut acc = 0.0;
        for n in 0..terms {
            let k = (2 * n + 1) as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * (k * theta).cos() / k;
        }
        Ok(factor * acc)
    } else {
        // Kahan compensation for the slowly decaying tail.
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for n in 0..terms {
            let k = (2 * n + 1) as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let term = sign * (k * theta).cos() / k - comp;
            let t = sum + term;
            comp = (t - sum) - term;
            sum = t;
        }
        Ok(factor * sum)
    }
}
