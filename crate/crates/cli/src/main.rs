//! Command-line front end: figure data, singlet amplitudes, the
//! closed-form verification suite, joint-probability probes, CHSH scans,
//! and the enhancement-domain report.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 numerical failure.

use clap::{Args, Parser, Subcommand};

use qcorr_cli::{
    parse_directions, render_curve, render_enhance, render_probe, render_singlet,
    render_uniqueness, run_chsh_scan, run_verify_command, write_output, OutputFormat, StateChoice,
};

#[derive(Parser)]
#[command(
    name = "qcorr",
    about = "Correlation coefficients of spin singlets under outcome relabeling",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StateArgs {
    /// Spin magnitude of the two-particle singlet (e.g. 1/2, 1, 3/2).
    #[arg(long)]
    j: Option<String>,
    /// Pick a four-qubit singlet instead (1 or 2).
    #[arg(long, value_name = "WHICH")]
    four_qubit: Option<u8>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the curve data of figure 1 or 2 as CSV or JSON.
    Curve {
        /// Figure selector: 1 (two spin-3/2 particles) or 2 (four qubits).
        #[arg(long)]
        figure: u8,
        /// Grid points over θ ∈ [0, π].
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[arg(long, default_value = "csv")]
        format: String,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<String>,
    },
    /// Print the amplitudes of a singlet state.
    Singlet {
        #[command(flatten)]
        state: StateArgs,
        /// Optional machine format (csv or json); human text when omitted.
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Run the closed-form-vs-trace verification suite.
    Verify {
        /// Random angle tuples per closed form.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Restrict to case names starting with this string.
        #[arg(long)]
        filter: Option<String>,
        /// Agreement tolerance between the two engines.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Write the JSON report here (stdout summary always prints).
        #[arg(long)]
        out: Option<String>,
        /// Errata file path.
        #[arg(long, default_value = "errata.jsonl")]
        errata: String,
        /// Skip writing the errata file.
        #[arg(long)]
        no_errata: bool,
    },
    /// Print a joint probability table for a state and directions.
    Probe {
        #[command(flatten)]
        state: StateArgs,
        /// Comma-separated theta:phi pairs, one per particle.
        #[arg(long)]
        dirs: String,
        /// Outcome labels (ascending m) to fold into a correlation value.
        #[arg(long)]
        labels: Option<String>,
        /// Interpret angles as degrees.
        #[arg(long)]
        degrees: bool,
    },
    /// Search measurement angles for the maximal CHSH combination.
    ChshScan {
        #[command(flatten)]
        state: StateArgs,
        /// Outcome labels for Alice (ascending m); sensible default per state.
        #[arg(long)]
        labels: Option<String>,
        /// Outcome labels for Bob; defaults to Alice's.
        #[arg(long)]
        labels_bob: Option<String>,
        /// Lattice points per angle.
        #[arg(long, default_value_t = 60)]
        grid: usize,
        /// Skip golden-section refinement after the lattice stage.
        #[arg(long)]
        no_refine: bool,
        /// Cap on correlation evaluations.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        /// Search all eight spherical angles instead of the φ = 0 meridian.
        #[arg(long)]
        full_angles: bool,
        /// Write the JSON result here.
        #[arg(long)]
        out: Option<String>,
    },
    /// Compare the combined coefficient against −cosΔ over [0, π].
    Enhance {
        /// Grid step in radians.
        #[arg(long, default_value_t = 1e-3)]
        grid_step: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Check the uniqueness property of a two-spin-j singlet.
    Uniqueness {
        /// Spin magnitude (e.g. 1/2, 1, 3/2).
        #[arg(long, default_value = "1")]
        j: String,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}

fn run(cli: Cli) -> qcorr::Result<i32> {
    match cli.command {
        Command::Curve {
            figure,
            samples,
            format,
            out,
        } => {
            let format: OutputFormat = format.parse()?;
            let content = render_curve(figure, samples, format)?;
            write_output(out.as_deref(), &content)?;
            Ok(0)
        }
        Command::Singlet { state, format, out } => {
            let choice = StateChoice::parse(state.j.as_deref(), state.four_qubit)?;
            let format = format.map(|f| f.parse()).transpose()?;
            let content = render_singlet(choice, format)?;
            write_output(out.as_deref(), &content)?;
            Ok(0)
        }
        Command::Verify {
            trials,
            seed,
            filter,
            tol,
            out,
            errata,
            no_errata,
        } => {
            let output = run_verify_command(trials, seed, filter.as_deref(), tol)?;
            print!("{}", output.summary);
            if let Some(path) = out.as_deref() {
                write_output(Some(path), &output.json)?;
            }
            if !no_errata {
                write_output(Some(&errata), &output.errata_lines)?;
            }
            Ok(output.report.exit_code())
        }
        Command::Probe {
            state,
            dirs,
            labels,
            degrees,
        } => {
            let choice = StateChoice::parse(state.j.as_deref(), state.four_qubit)?;
            let dirs = parse_directions(&dirs, degrees)?;
            let labels = labels.map(|s| s.parse()).transpose()?;
            let content = render_probe(choice, &dirs, labels.as_ref())?;
            print!("{content}");
            Ok(0)
        }
        Command::ChshScan {
            state,
            labels,
            labels_bob,
            grid,
            no_refine,
            budget,
            full_angles,
            out,
        } => {
            let choice = StateChoice::parse(state.j.as_deref(), state.four_qubit)?;
            let output = run_chsh_scan(
                choice,
                labels.as_deref(),
                labels_bob.as_deref(),
                grid,
                !no_refine,
                budget,
                full_angles,
            )?;
            print!("{}", output.summary);
            if let Some(path) = out.as_deref() {
                write_output(Some(path), &output.json)?;
            }
            Ok(0)
        }
        Command::Enhance { grid_step, out } => {
            let content = render_enhance(grid_step)?;
            match out.as_deref() {
                Some(path) => write_output(Some(path), &content)?,
                None => print!("{content}"),
            }
            Ok(0)
        }
        Command::Uniqueness { j, samples, seed } => {
            let content = render_uniqueness(&j, samples, seed)?;
            print!("{content}");
            Ok(0)
        }
    }
}
