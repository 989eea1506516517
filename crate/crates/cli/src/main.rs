use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use absep::classify::classify_channel;
use absep::state::{classify_spectrum, nqubit_ball, state_spectrum};
use absep::witness::{example5_witness, random_unitary_witness, recovery_witness_one_sided};
use absep::Partition;
use absep_cli::input::{load_channel, parse_spectrum, read_matrix, read_text};
use absep_cli::report::{
    map_exit_code, state_exit_code, to_pretty, upgrade_with_search, witness_json,
};
use absep_cli::sweep::{
    figure1_csv, figure1_json, preset, render_csv, render_json, run_sweep, SweepSpec,
};
use absep_cli::{demo, exit, io_error, usage, CliError, CliResult};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

/// Absolute separability of states and absolutely separating maps.
#[derive(Parser)]
#[command(name = "absep", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a state given by its spectrum or a dense matrix file.
    ClassifyState {
        /// Comma-separated eigenvalues.
        #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
        spectrum: Option<String>,
        /// Matrix file: a dimension line, then rows of `re,im` pairs.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// `MxN`, or `2^N` for the N-qubit full-separability ball.
        #[arg(long)]
        partition: String,
    },
    /// Classify a channel given as inline JSON or a JSON file.
    ClassifyChannel {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        partition: String,
        /// Run a random witness search when the criteria are inconclusive.
        #[arg(long)]
        witness_trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate criteria over a parameter grid.
    Sweep {
        /// Sweep spec JSON file.
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        spec: Option<PathBuf>,
        /// Built-in grid: figure-1, figure-3 .. figure-7.
        #[arg(long)]
        preset: Option<String>,
        /// Override the preset resolution per axis.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for, or construct, an entangling unitary.
    Witness {
        #[arg(long, required_unless_present_any = ["example5", "recovery"])]
        channel: Option<String>,
        #[arg(long)]
        partition: Option<String>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// The two-copy depolarizing construction on 4|4.
        #[arg(long, conflicts_with_all = ["channel", "recovery"])]
        example5: bool,
        /// Recovery unitary for `D_0 ⊗ D_q2` on the state in `--matrix`.
        #[arg(long, requires = "matrix", conflicts_with = "channel")]
        recovery: Option<f64>,
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Reproduce the reference examples as a pass/fail table.
    Demo {
        #[arg(long)]
        only: Option<String>,
    },
}

fn parse_partition(s: &str) -> CliResult<Partition> {
    Ok(s.parse::<Partition>()?)
}

fn print(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| CliError::Io(format!("stdout: {e}")))
}

fn classify_state_cmd(
    spectrum: Option<String>,
    matrix: Option<PathBuf>,
    partition: &str,
) -> CliResult<i32> {
    let part = parse_partition(partition)?;
    let s = match (spectrum, matrix) {
        (Some(s), _) => parse_spectrum(&s)?,
        (None, Some(path)) => {
            let m = read_matrix(&path)?;
            state_spectrum(&m, m.dim())?
        }
        (None, None) => return Err(usage("give --spectrum or --matrix")),
    };
    let v = match &part {
        Partition::Bi(p) => classify_spectrum(&s, *p)?,
        Partition::Multi(mp) => {
            let n = mp
                .qubit_count()
                .ok_or_else(|| usage("multipartitions are only supported as 2^N"))?;
            nqubit_ball(&s, n)?
        }
    };
    print(&to_pretty(&v))?;
    Ok(state_exit_code(&v))
}

fn classify_channel_cmd(
    channel: &str,
    partition: &str,
    trials: Option<usize>,
    seed: u64,
) -> CliResult<i32> {
    let c = load_channel(channel)?;
    let part = parse_partition(partition)?;
    let mut v = classify_channel(&c, &part)?;
    let mut search = None;
    if let (Some(trials), Some(bp)) = (trials, part.as_bipartition()) {
        let (up, w) = upgrade_with_search(v, &c, bp, trials, seed)?;
        v = up;
        search = w.as_ref().map(witness_json);
    }
    let mut doc = serde_json::to_value(&v).expect("serializable");
    if let Some(w) = search {
        doc["search"] = w;
    }
    print(&to_pretty(&doc))?;
    Ok(map_exit_code(&v))
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_error(path, e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn sweep_cmd(
    spec: Option<PathBuf>,
    preset_name: Option<String>,
    steps: Option<usize>,
    out: Option<PathBuf>,
    format: Format,
    seed: u64,
) -> CliResult<i32> {
    if preset_name.as_deref() == Some("figure-1") {
        let text = match format {
            Format::Csv => figure1_csv(seed),
            Format::Json => figure1_json(seed),
        };
        write_output(out.as_deref(), &text)?;
        return Ok(exit::HOLDS);
    }
    let spec: SweepSpec = match (spec, preset_name) {
        (Some(path), _) => {
            if steps.is_some() {
                return Err(usage("--steps only applies to presets"));
            }
            serde_json::from_str(&read_text(&path)?)
                .map_err(|e| usage(format!("invalid sweep spec: {e}")))?
        }
        (None, Some(name)) => preset(&name, steps)?,
        (None, None) => return Err(usage("give --spec or --preset")),
    };
    let records = run_sweep(&spec)?;
    let text = match format {
        Format::Csv => render_csv(&spec, &records, seed),
        Format::Json => render_json(&spec, &records, seed),
    };
    write_output(out.as_deref(), &text)?;
    Ok(exit::HOLDS)
}

#[allow(clippy::too_many_arguments)]
fn witness_cmd(
    channel: Option<String>,
    partition: Option<String>,
    trials: usize,
    seed: u64,
    example5: bool,
    recovery: Option<f64>,
    matrix: Option<PathBuf>,
) -> CliResult<i32> {
    let found = if example5 {
        Some(example5_witness()?)
    } else if let Some(q2) = recovery {
        let path = matrix.ok_or_else(|| usage("--recovery needs --matrix"))?;
        recovery_witness_one_sided(q2, &read_matrix(&path)?)?
    } else {
        let c = load_channel(
            channel
                .as_deref()
                .ok_or_else(|| usage("--channel is required"))?,
        )?;
        let part = parse_partition(
            partition
                .as_deref()
                .ok_or_else(|| usage("--partition is required"))?,
        )?;
        let bp = part
            .as_bipartition()
            .ok_or_else(|| usage("witness search needs a bipartition MxN"))?;
        random_unitary_witness(&c, bp, trials, seed)?
    };
    match found {
        Some(w) => {
            let mut doc = witness_json(&w);
            doc["found"] = json!(true);
            print(&to_pretty(&doc))?;
            Ok(exit::FAILS)
        }
        None => {
            print(&to_pretty(&json!({"found": false})))?;
            Ok(exit::UNDETERMINED)
        }
    }
}

fn demo_cmd(only: Option<String>) -> CliResult<i32> {
    let outcomes = demo::run(only.as_deref())?;
    print(demo::render(&outcomes).trim_end())?;
    Ok(if outcomes.iter().all(|o| o.pass) {
        exit::HOLDS
    } else {
        exit::FAILS
    })
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::ClassifyState {
            spectrum,
            matrix,
            partition,
        } => classify_state_cmd(spectrum, matrix, &partition),
        Command::ClassifyChannel {
            channel,
            partition,
            witness_trials,
            seed,
        } => classify_channel_cmd(&channel, &partition, witness_trials, seed),
        Command::Sweep {
            spec,
            preset,
            steps,
            out,
            format,
            seed,
        } => sweep_cmd(spec, preset, steps, out, format, seed),
        Command::Witness {
            channel,
            partition,
            trials,
            seed,
            example5,
            recovery,
            matrix,
        } => witness_cmd(channel, partition, trials, seed, example5, recovery, matrix),
        Command::Demo { only } => demo_cmd(only),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("absep: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
