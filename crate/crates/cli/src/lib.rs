//! Command implementations behind the `qcorr` binary. Each command returns
//! its rendered output as a string (plus an exit code where relevant) so
//! integration tests can drive them without spawning processes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use qcorr::closedform::figure_curves;
use qcorr::correlate;
use qcorr::error::{Error, Result};
use qcorr::inequalities::{self, ScanMethod, ScanOptions};
use qcorr::spin::{Direction, LabelVector, SpinMagnitude};
use qcorr::states::{check_uniqueness, SingletFamily, SingletState};
use qcorr::verify::{fmt_json_f64, run_verify_with_tolerance, CaseStatus, VerifyReport};

/// Output format for file-producing commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidArgument(format!(
                "format must be csv or json, got {other:?}"
            ))),
        }
    }
}

/// CSV floats carry 12 significant digits, JSON floats 17.
pub fn fmt_csv_f64(x: f64) -> String {
    format!("{x:.11e}")
}

/// Which singlet a command operates on.
#[derive(Debug, Clone, Copy)]
pub enum StateChoice {
    SpinPair(SpinMagnitude),
    FourQubit(u8),
}

impl StateChoice {
    pub fn parse(j: Option<&str>, four_qubit: Option<u8>) -> Result<Self> {
        match (j, four_qubit) {
            (Some(_), Some(_)) => Err(Error::InvalidArgument(
                "choose either --j or --four-qubit, not both".into(),
            )),
            (Some(spec), None) => Ok(StateChoice::SpinPair(spec.parse()?)),
            (None, Some(which)) => Ok(StateChoice::FourQubit(which)),
            (None, None) => Ok(StateChoice::SpinPair(SpinMagnitude::HALF)),
        }
    }

    pub fn build(&self) -> Result<SingletState> {
        match self {
            StateChoice::SpinPair(j) => Ok(SingletState::spin_pair(*j)),
            StateChoice::FourQubit(which) => SingletState::four_qubit(*which),
        }
    }
}

pub fn write_output(path: Option<&str>, content: &str) -> Result<()> {
    match path {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(p) => fs::write(Path::new(p), content).map_err(|source| Error::Io {
            path: p.to_string(),
            source,
        }),
    }
}

// --- curve -------------------------------------------------------------------

/// Sample the figure curves uniformly on [0, π] and render them.
///
/// Grid points are quantized to their 12-significant-digit CSV rendering
/// so that re-parsing the θ column and re-evaluating reproduces the series
/// columns up to their own printing precision.
pub fn render_curve(figure: u8, samples: usize, format: OutputFormat) -> Result<String> {
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    let thetas: Vec<f64> = (0..samples)
        .map(|k| {
            let raw = std::f64::consts::PI * k as f64 / (samples - 1) as f64;
            fmt_csv_f64(raw).parse::<f64>().expect("own rendering parses")
        })
        .collect();
    let table = figure_curves(figure, &thetas)?;
    let headers: Vec<String> = (0..table.values.len())
        .map(|i| format!("series_{}", (b'a' + i as u8) as char))
        .collect();
    let mut out = String::new();
    match format {
        OutputFormat::Csv => {
            writeln!(out, "theta,{}", headers.join(",")).unwrap();
            for (k, &theta) in table.thetas.iter().enumerate() {
                let mut row = vec![fmt_csv_f64(theta)];
                for series in &table.values {
                    row.push(fmt_csv_f64(series[k]));
                }
                writeln!(out, "{}", row.join(",")).unwrap();
            }
        }
        OutputFormat::Json => {
            writeln!(out, "{{").unwrap();
            writeln!(out, "  \"figure\": {},", table.figure).unwrap();
            writeln!(
                out,
                "  \"series\": [{}],",
                headers
                    .iter()
                    .map(|h| format!("\"{h}\""))
                    .collect::<Vec<_>>()
                    .join(", ")
            )
            .unwrap();
            writeln!(out, "  \"rows\": [").unwrap();
            for (k, &theta) in table.thetas.iter().enumerate() {
                let mut row = vec![fmt_json_f64(theta)];
                for series in &table.values {
                    row.push(fmt_json_f64(series[k]));
                }
                let comma = if k + 1 < table.thetas.len() { "," } else { "" };
                writeln!(out, "    [{}]{comma}", row.join(", ")).unwrap();
            }
            writeln!(out, "  ]").unwrap();
            writeln!(out, "}}").unwrap();
        }
    }
    Ok(out)
}

// --- singlet ------------------------------------------------------------------

/// Render the amplitudes of a singlet state.
pub fn render_singlet(choice: StateChoice, format: Option<OutputFormat>) -> Result<String> {
    let state = choice.build()?;
    let psi = state.vector();
    let labels: Vec<String> = basis_labels(&state);
    let mut out = String::new();
    match format {
        None => {
            writeln!(out, "state: {}", state_name(&state)).unwrap();
            writeln!(out, "dims: {:?}", psi.dims()).unwrap();
            for (k, amp) in psi.amplitudes().iter().enumerate() {
                if amp.norm() > 1e-15 {
                    writeln!(out, "  |{}>  {:+.12}  {:+.12}i", labels[k], amp.re, amp.im).unwrap();
                }
            }
        }
        Some(OutputFormat::Csv) => {
            writeln!(out, "index,basis,re,im").unwrap();
            for (k, amp) in psi.amplitudes().iter().enumerate() {
                writeln!(
                    out,
                    "{k},{},{},{}",
                    labels[k],
                    fmt_csv_f64(amp.re),
                    fmt_csv_f64(amp.im)
                )
                .unwrap();
            }
        }
        Some(OutputFormat::Json) => {
            writeln!(out, "{{").unwrap();
            writeln!(out, "  \"state\": \"{}\",", state_name(&state)).unwrap();
            writeln!(out, "  \"dims\": {:?},", psi.dims()).unwrap();
            writeln!(out, "  \"amplitudes\": [").unwrap();
            let n = psi.amplitudes().len();
            for (k, amp) in psi.amplitudes().iter().enumerate() {
                let comma = if k + 1 < n { "," } else { "" };
                writeln!(
                    out,
                    "    {{\"basis\": \"{}\", \"re\": {}, \"im\": {}}}{comma}",
                    labels[k],
                    fmt_json_f64(amp.re),
                    fmt_json_f64(amp.im)
                )
                .unwrap();
            }
            writeln!(out, "  ]").unwrap();
            writeln!(out, "}}").unwrap();
        }
    }
    Ok(out)
}

fn state_name(state: &SingletState) -> String {
    match state.family() {
        SingletFamily::SpinPair(j) => format!("two-spin-{j}-singlet"),
        SingletFamily::FourQubit(which) => format!("four-qubit-singlet-{which}"),
    }
}

fn basis_labels(state: &SingletState) -> Vec<String> {
    let psi = state.vector();
    let dims = psi.dims();
    let total = psi.total_dim();
    (0..total)
        .map(|flat| {
            let mut rem = flat;
            let mut parts = vec![0usize; dims.len()];
            for k in (0..dims.len()).rev() {
                parts[k] = rem % dims[k];
                rem /= dims[k];
            }
            match state.family() {
                SingletFamily::FourQubit(_) => parts
                    .iter()
                    .map(|&i| if i == 0 { '+' } else { '-' })
                    .collect(),
                SingletFamily::SpinPair(j) => parts
                    .iter()
                    .map(|&i| {
                        let two_m = j.two_j() as i64 - 2 * i as i64;
                        if two_m % 2 == 0 {
                            format!("{}", two_m / 2)
                        } else {
                            format!("{two_m}/2")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(","),
            }
        })
        .collect()
}

// --- verify -------------------------------------------------------------------

pub struct VerifyOutput {
    pub report: VerifyReport,
    pub summary: String,
    pub json: String,
    pub errata_lines: String,
}

pub fn run_verify_command(
    trials: usize,
    seed: u64,
    filter: Option<&str>,
    tolerance: f64,
) -> Result<VerifyOutput> {
    let report = run_verify_with_tolerance(trials, seed, filter, tolerance)?;
    let mut summary = String::new();
    writeln!(
        summary,
        "verification: {trials} trials per form, seed {seed}, tolerance {tolerance:.1e}"
    )
    .unwrap();
    for case in &report.cases {
        let status = match case.status {
            CaseStatus::Ok => "ok",
            CaseStatus::Erratum => "ERRATUM",
            CaseStatus::PointCheck => "point-check",
            CaseStatus::Failed => "FAILED",
        };
        writeln!(
            summary,
            "  {:<28} max delta {:>12.3e}  {status}{}",
            case.name,
            case.max_delta,
            if case.note.is_empty() {
                String::new()
            } else {
                format!("  ({})", case.note)
            }
        )
        .unwrap();
    }
    for check in &report.state_checks {
        writeln!(
            summary,
            "  {:<28} residual  {:>12.3e}  {}",
            check.name,
            check.residual,
            if check.passed { "ok" } else { "FAILED" }
        )
        .unwrap();
    }
    writeln!(
        summary,
        "result: {} ({} errata recorded)",
        if report.passed { "PASS" } else { "FAIL" },
        report.errata.len()
    )
    .unwrap();

    let mut json = String::new();
    writeln!(json, "{{").unwrap();
    writeln!(json, "  \"seed\": {},", report.seed).unwrap();
    writeln!(json, "  \"trials\": {},", report.trials).unwrap();
    writeln!(json, "  \"tolerance\": {},", fmt_json_f64(report.tolerance)).unwrap();
    writeln!(json, "  \"passed\": {},", report.passed).unwrap();
    writeln!(json, "  \"cases\": [").unwrap();
    for (k, case) in report.cases.iter().enumerate() {
        let status = match case.status {
            CaseStatus::Ok => "ok",
            CaseStatus::Erratum => "erratum",
            CaseStatus::PointCheck => "point_check",
            CaseStatus::Failed => "failed",
        };
        let params = case
            .worst_params
            .iter()
            .map(|(k, v)| format!("\"{k}\": {}", fmt_json_f64(*v)))
            .collect::<Vec<_>>()
            .join(", ");
        let comma = if k + 1 < report.cases.len() { "," } else { "" };
        writeln!(
            json,
            "    {{\"name\": \"{}\", \"trials\": {}, \"max_delta\": {}, \"status\": \"{status}\", \"worst_params\": {{{params}}}}}{comma}",
            case.name,
            case.trials,
            fmt_json_f64(case.max_delta)
        )
        .unwrap();
    }
    writeln!(json, "  ],").unwrap();
    writeln!(json, "  \"state_checks\": [").unwrap();
    for (k, check) in report.state_checks.iter().enumerate() {
        let comma = if k + 1 < report.state_checks.len() { "," } else { "" };
        writeln!(
            json,
            "    {{\"name\": \"{}\", \"residual\": {}, \"passed\": {}}}{comma}",
            check.name,
            fmt_json_f64(check.residual),
            check.passed
        )
        .unwrap();
    }
    writeln!(json, "  ],").unwrap();
    writeln!(json, "  \"errata\": {}", report.errata.len()).unwrap();
    writeln!(json, "}}").unwrap();

    let mut errata_lines = report
        .errata
        .iter()
        .map(|e| e.jsonl_line())
        .collect::<Vec<_>>()
        .join("\n");
    if !errata_lines.is_empty() {
        errata_lines.push('\n');
    }

    Ok(VerifyOutput {
        report,
        summary,
        json,
        errata_lines,
    })
}

// --- probe --------------------------------------------------------------------

/// Parse "theta:phi[,theta:phi...]" into directions, optionally given in
/// degrees.
pub fn parse_directions(spec: &str, degrees: bool) -> Result<Vec<Direction>> {
    let convert = |v: f64| if degrees { v.to_radians() } else { v };
    spec.split(',')
        .map(|pair| {
            let (t, p) = pair.split_once(':').ok_or_else(|| {
                Error::InvalidArgument(format!("direction {pair:?} is not theta:phi"))
            })?;
            let theta: f64 = t
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("cannot parse angle from {t:?}")))?;
            let phi: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("cannot parse angle from {p:?}")))?;
            Direction::new(convert(theta), convert(phi))
        })
        .collect()
}

/// Joint probability table (and correlation when labels are given) for a
/// state measured along the given directions.
pub fn render_probe(
    choice: StateChoice,
    dirs: &[Direction],
    labels: Option<&LabelVector>,
) -> Result<String> {
    let state = choice.build()?;
    let j = state.particle_j();
    let n = state.vector().particles();
    if dirs.len() != n {
        return Err(Error::DimMismatch(format!(
            "state has {n} particles but {} directions were given",
            dirs.len()
        )));
    }
    let rho = state.density();
    let js = vec![j; n];
    let table = correlate::joint_probabilities(&rho, dirs, &js)?;
    let mut out = String::new();
    writeln!(out, "state: {}", state_name(&state)).unwrap();
    for (k, d) in dirs.iter().enumerate() {
        writeln!(
            out,
            "direction {}: theta = {:.6}, phi = {:.6}",
            k + 1,
            d.theta(),
            d.phi()
        )
        .unwrap();
    }
    writeln!(out, "outcomes (m values) and probabilities:").unwrap();
    for (outcome, p) in table.iter() {
        let ms = outcome
            .iter()
            .map(|m| format!("{m:+.1}"))
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(out, "  {ms}  {p:.6}").unwrap();
    }
    if let Some(lv) = labels {
        if lv.len() != j.dim() {
            return Err(Error::DimMismatch(format!(
                "labels must have length 2j+1 = {}",
                j.dim()
            )));
        }
        let mut e = 0.0;
        for (outcome, p) in table.iter() {
            let mut product = 1.0;
            for m in &outcome {
                product *= lv.as_slice()[(m + j.j()).round() as usize];
            }
            e += product * p;
        }
        writeln!(out, "correlation E = {e:.6}").unwrap();
    }
    Ok(out)
}

// --- chsh-scan ----------------------------------------------------------------

pub struct ScanCommandOutput {
    pub result: inequalities::ScanResult,
    pub summary: String,
    pub json: String,
}

pub fn run_chsh_scan(
    choice: StateChoice,
    labels: Option<&str>,
    labels_bob: Option<&str>,
    grid: usize,
    refine: bool,
    budget: u64,
    full_angles: bool,
) -> Result<ScanCommandOutput> {
    let state = choice.build()?;
    let j = state.particle_j();
    let alice: LabelVector = match labels {
        Some(s) => s.parse()?,
        None => {
            if j == SpinMagnitude::HALF {
                LabelVector::dichotomic()
            } else {
                LabelVector::spin(j)
            }
        }
    };
    let bob: LabelVector = match labels_bob {
        Some(s) => s.parse()?,
        None => alice.clone(),
    };
    let opts = ScanOptions {
        method: if refine {
            ScanMethod::GridRefine
        } else {
            ScanMethod::Grid
        },
        grid_per_angle: grid,
        budget,
        full_angles,
    };
    let result = inequalities::optimize_chsh(&state, &alice, &bob, &opts)?;

    let dirs = |d: &Direction| format!("(theta {:.9}, phi {:.9})", d.theta(), d.phi());
    let mut summary = String::new();
    writeln!(summary, "state: {}", state_name(&state)).unwrap();
    writeln!(summary, "method: {}", result.method).unwrap();
    writeln!(summary, "best CHSH value: {:.9}", result.best_value).unwrap();
    writeln!(
        summary,
        "alice: {} | {}",
        dirs(&result.alice[0]),
        dirs(&result.alice[1])
    )
    .unwrap();
    writeln!(
        summary,
        "bob:   {} | {}",
        dirs(&result.bob[0]),
        dirs(&result.bob[1])
    )
    .unwrap();
    writeln!(
        summary,
        "evaluations: {}, runtime: {:.1} ms",
        result.evaluations, result.runtime_ms
    )
    .unwrap();

    let mut json = String::new();
    writeln!(json, "{{").unwrap();
    writeln!(json, "  \"state\": \"{}\",", state_name(&state)).unwrap();
    writeln!(json, "  \"method\": \"{}\",", result.method).unwrap();
    writeln!(json, "  \"best_value\": {},", fmt_json_f64(result.best_value)).unwrap();
    writeln!(
        json,
        "  \"alice\": [[{}, {}], [{}, {}]],",
        fmt_json_f64(result.alice[0].theta()),
        fmt_json_f64(result.alice[0].phi()),
        fmt_json_f64(result.alice[1].theta()),
        fmt_json_f64(result.alice[1].phi())
    )
    .unwrap();
    writeln!(
        json,
        "  \"bob\": [[{}, {}], [{}, {}]],",
        fmt_json_f64(result.bob[0].theta()),
        fmt_json_f64(result.bob[0].phi()),
        fmt_json_f64(result.bob[1].theta()),
        fmt_json_f64(result.bob[1].phi())
    )
    .unwrap();
    writeln!(json, "  \"evaluations\": {}", result.evaluations).unwrap();
    writeln!(json, "}}").unwrap();

    Ok(ScanCommandOutput {
        result,
        summary,
        json,
    })
}

// --- enhance ------------------------------------------------------------------

pub fn render_enhance(grid_step: f64) -> Result<String> {
    let report = inequalities::enhancement_domain(grid_step)?;
    let mut out = String::new();
    writeln!(
        out,
        "combined coefficient 1/2[-cos(d) + cos(2d)] versus -cos(d) on [0, pi], step {grid_step}"
    )
    .unwrap();
    for iv in &report.sign_intervals {
        let lo = iv.start_index as f64 * report.grid_step;
        let hi = (iv.end_index as f64 * report.grid_step).min(std::f64::consts::PI);
        let label = match iv.sign {
            1 => "combination above (weaker)",
            -1 => "combination below (stronger)",
            _ => "equal",
        };
        writeln!(out, "  [{lo:.4}, {hi:.4}]  {label}").unwrap();
    }
    match report.below_domain {
        Some((lo, hi)) => {
            writeln!(
                out,
                "measured domain where the combination beats -cos(d): ({lo:.6}, {hi:.6})"
            )
            .unwrap();
            writeln!(
                out,
                "boundary: {:.6} (pi/3 = {:.6})",
                report.boundary.unwrap(),
                std::f64::consts::FRAC_PI_3
            )
            .unwrap();
        }
        None => writeln!(out, "no sub-domain found").unwrap(),
    }
    writeln!(
        out,
        "claimed domain: (0, pi/3); agreement: {}",
        if report.matches_claim {
            "yes"
        } else {
            "NO - the measured domain is the complement; recorded as an erratum"
        }
    )
    .unwrap();
    Ok(out)
}

// --- uniqueness ---------------------------------------------------------------

pub fn render_uniqueness(j_spec: &str, samples: usize, seed: u64) -> Result<String> {
    let j: SpinMagnitude = j_spec.parse()?;
    let psi = qcorr::states::clebsch_gordan_singlet(j);
    let report = check_uniqueness(&psi, j, samples, seed)?;
    Ok(format!(
        "uniqueness of the two-spin-{j} singlet over {} directions (seed {seed}):\n\
         max off-anti-diagonal probability = {:.3e} -> {}\n",
        report.samples,
        report.max_violation,
        if report.passed { "holds" } else { "VIOLATED" }
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_float_has_12_significant_digits() {
        assert_eq!(fmt_csv_f64(1.0), "1.00000000000e0");
        assert_eq!(fmt_csv_f64(-0.5), "-5.00000000000e-1");
    }

    #[test]
    fn direction_parsing() {
        let dirs = parse_directions("0:0, 1.5:0.5", false).unwrap();
        assert_eq!(dirs.len(), 2);
        assert!((dirs[1].theta() - 1.5).abs() < 1e-15);
        let deg = parse_directions("90:0", true).unwrap();
        assert!((deg[0].theta() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(parse_directions("nope", false).is_err());
        assert!(parse_directions("1:x", false).is_err());
    }

    #[test]
    fn state_choice_parse() {
        assert!(matches!(
            StateChoice::parse(Some("3/2"), None).unwrap(),
            StateChoice::SpinPair(j) if j.two_j() == 3
        ));
        assert!(matches!(
            StateChoice::parse(None, Some(1)).unwrap(),
            StateChoice::FourQubit(1)
        ));
        assert!(StateChoice::parse(Some("1"), Some(2)).is_err());
        assert!(matches!(
            StateChoice::parse(None, None).unwrap(),
            StateChoice::SpinPair(j) if j.two_j() == 1
        ));
    }

    #[test]
    fn probe_bell_along_z() {
        let out = render_probe(
            StateChoice::SpinPair(SpinMagnitude::HALF),
            &[Direction::z(), Direction::z()],
            Some(&LabelVector::dichotomic()),
        )
        .unwrap();
        assert!(out.contains("+0.5 -0.5  0.500000"));
        assert!(out.contains("-0.5 +0.5  0.500000"));
        assert!(out.contains("+0.5 +0.5  0.000000"));
        assert!(out.contains("correlation E = -1.000000"));
    }

    #[test]
    fn singlet_rendering_modes() {
        let text = render_singlet(StateChoice::SpinPair(SpinMagnitude::ONE), None).unwrap();
        assert!(text.contains("two-spin-1-singlet"));
        assert!(text.contains("|1,-1>"));
        let csv = render_singlet(StateChoice::FourQubit(1), Some(OutputFormat::Csv)).unwrap();
        assert!(csv.starts_with("index,basis,re,im"));
        assert!(csv.contains("3,++--"));
        let json = render_singlet(StateChoice::FourQubit(2), Some(OutputFormat::Json)).unwrap();
        assert!(json.contains("\"state\": \"four-qubit-singlet-2\""));
    }
}
