//! `unicrit`: command-line access to potentials, rays, transversality and
//! the geometric probes. Every run writes its outputs and a manifest into
//! `--out-dir`; `replay` re-runs a manifest and compares digests.

mod args;
mod cache;
mod commands;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use commands::{point, probes, rays};
use run::{manifest_name, write_outputs, Manifest, Outcome};

/// Exit status of `replay` when a digest differs.
const REPLAY_MISMATCH: i32 = 12;

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "unicrit", version, about = "Unicritical polynomial toolkit")]
struct Cli {
    /// Directory receiving outputs and the run manifest.
    #[arg(long, global = true, default_value = "unicrit-out")]
    out_dir: PathBuf,
    /// Worker threads; 0 uses every core, 1 is the reference mode.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Green's function G_c(z).
    Green(point::PointArgs),
    /// Böttcher coordinate φ_c(z).
    Bottcher(point::PointArgs),
    /// Potential and external angle of z.
    Angle(point::PointArgs),
    /// Trace a parameter or dynamical ray and estimate its landing point.
    Ray(rays::RayArgs),
    /// The transversality sum T(c).
    Transversality(point::ParamArgs),
    /// Compare D_cΦ / ∂_zφ_c against T(c).
    Verify(point::VerifyArgs),
    /// T along a parameter ray.
    Raylimit(rays::RayLimitArgs),
    /// Arc lengths of a dynamical and a parameter ray to a common landing point.
    Geo(rays::GeoArgs),
    /// Landing points of parameter rays at random angles.
    Sample(probes::SampleArgs),
    /// Area of the connectedness locus in shrinking disks.
    Deepscan(probes::DeepscanArgs),
    /// Largest empty disks relative to scale.
    Porosity(probes::PorosityArgs),
    /// Hedgehog layer detection in a round annulus.
    Hedgehog(probes::HedgehogArgs),
    /// Escape-time raster as PGM.
    Render(probes::RenderArgs),
    /// Lyapunov exponent of the critical value.
    Lyapunov(point::LyapunovArgs),
    /// Distance bracket and accessibility functional along a parameter ray.
    Access(rays::AccessArgs),
    /// Re-run a manifest and compare output digests.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, clap::Args, Serialize)]
struct ReplayArgs {
    manifest: PathBuf,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Green(_) => "green",
            Command::Bottcher(_) => "bottcher",
            Command::Angle(_) => "angle",
            Command::Ray(_) => "ray",
            Command::Transversality(_) => "transversality",
            Command::Verify(_) => "verify",
            Command::Raylimit(_) => "raylimit",
            Command::Geo(_) => "geo",
            Command::Sample(_) => "sample",
            Command::Deepscan(_) => "deepscan",
            Command::Porosity(_) => "porosity",
            Command::Hedgehog(_) => "hedgehog",
            Command::Render(_) => "render",
            Command::Lyapunov(_) => "lyapunov",
            Command::Access(_) => "access",
            Command::Replay(_) => "replay",
        }
    }

    fn execute(&self) -> Outcome {
        match self {
            Command::Green(a) => point::green(a),
            Command::Bottcher(a) => point::bottcher(a),
            Command::Angle(a) => point::angle(a),
            Command::Ray(a) => rays::ray(a),
            Command::Transversality(a) => point::transversality(a),
            Command::Verify(a) => point::verify(a),
            Command::Raylimit(a) => rays::raylimit(a),
            Command::Geo(a) => rays::geo(a),
            Command::Sample(a) => probes::sample(a),
            Command::Deepscan(a) => probes::deepscan(a),
            Command::Porosity(a) => probes::porosity(a),
            Command::Hedgehog(a) => probes::hedgehog(a),
            Command::Render(a) => probes::render(a),
            Command::Lyapunov(a) => point::lyapunov_cmd(a),
            Command::Access(a) => rays::access(a),
            Command::Replay(_) => unreachable!("replay is dispatched separately"),
        }
    }
}

/// Runs `cli`, writes outputs and manifest, and returns the manifest.
fn run(cli: &Cli, argv: Vec<String>) -> Manifest {
    let started = Instant::now();
    let mut outcome = cli.command.execute();
    let name = cli.command.name();
    let outputs = match write_outputs(&cli.out_dir, &outcome.outputs) {
        Ok(records) => records,
        Err(e) => {
            outcome.error.get_or_insert(e);
            Vec::new()
        }
    };
    let status = match (&outcome.error, outcome.verdict_code) {
        (Some(e), _) => e.kind().to_string(),
        (None, Some(_)) => "VerdictFailed".into(),
        (None, None) => "ok".into(),
    };
    let config = serde_json::to_value(&cli.command).expect("serialisable arguments");
    let manifest = Manifest {
        tool: "unicrit".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: name.into(),
        argv,
        config: config[name].clone(),
        seed: outcome.seed,
        threads: rayon::current_num_threads(),
        wall_time_s: started.elapsed().as_secs_f64(),
        status,
        exit_code: outcome.exit_code(),
        error: outcome.error.as_ref().map(|e| e.to_string()),
        outputs,
        notes: outcome.notes,
    };
    let path = cli.out_dir.join(manifest_name(name));
    let text = serde_json::to_string_pretty(&manifest).expect("serialisable manifest") + "\n";
    if let Err(e) = unicrit::io::write_file(&path, text.as_bytes()) {
        eprintln!("error: could not write manifest {}: {e}", path.display());
    }
    if let Some(e) = &outcome.error {
        eprintln!("error [{}]: {e}", e.kind());
    }
    let summary = outcome.summary.unwrap_or_else(|| json!({}));
    println!("{}", json!({ "command": name, "status": manifest.status, "result": summary }));
    manifest
}

fn replay(path: &Path, out_dir: &Path, threads: usize) -> i32 {
    let loaded = std::fs::read(path)
        .map_err(unicrit::Error::from)
        .and_then(|b| serde_json::from_slice::<Manifest>(&b).map_err(unicrit::Error::from));
    let original = match loaded {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.kind());
            return e.exit_code();
        }
    };
    let mut cli = match Cli::try_parse_from(&original.argv) {
        Ok(cli) => cli,
        Err(e) => {
            eprintln!("error: manifest argv does not parse: {e}");
            return 1;
        }
    };
    if matches!(cli.command, Command::Replay(_)) {
        eprintln!("error: a replay manifest cannot be replayed");
        return 1;
    }
    cli.out_dir = out_dir.to_path_buf();
    init_threads(if threads == 0 { 1 } else { threads });
    let fresh = run(&cli, original.argv.clone());
    let compared: Vec<_> = original
        .outputs
        .iter()
        .map(|o| {
            let now = fresh.outputs.iter().find(|f| f.file == o.file);
            json!({ "file": o.file, "expected": o.sha256, "actual": now.map(|f| &f.sha256), "match": now.map(|f| f.sha256 == o.sha256) == Some(true) })
        })
        .collect();
    let all = fresh.outputs.len() == original.outputs.len() && compared.iter().all(|c| c["match"] == json!(true));
    println!("{}", json!({ "replay": path, "match": all, "files": compared }));
    if all { 0 } else { REPLAY_MISMATCH }
}

fn init_threads(n: usize) {
    if n > 0 {
        // only fails when a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let mut argv: Vec<String> = std::env::args().collect();
    if let Some(first) = argv.first_mut() {
        *first = "unicrit".into();
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match &cli.command {
        Command::Replay(r) => replay(&r.manifest, &cli.out_dir, cli.threads),
        _ => {
            init_threads(cli.threads);
            run(&cli, argv).exit_code
        }
    };
    ExitCode::from(code as u8)
}
