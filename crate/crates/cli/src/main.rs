mod args;
mod commands;
mod error;
mod output;
mod settings;

use std::io;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;

use args::{Cli, Command};
use error::CliError;
use output::{manifest_path, write_file, RunManifest};
use settings::Settings;

fn execute(cli: Cli) -> Result<(), CliError> {
    let settings = match &cli.command {
        Command::Replay(r) => {
            let m = RunManifest::load(&r.manifest)?;
            m.config.check()?;
            m.config
        }
        cmd => Settings::resolve(&cli.common, cmd)?,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(settings.threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;

    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let clock = Instant::now();
    let table = commands::run(&settings)?;
    let wall = clock.elapsed().as_secs_f64();

    let Some(out) = &cli.common.out else {
        return table.write_csv(io::stdout().lock());
    };
    write_file(out, |f| table.write_csv(f))?;
    let manifest = RunManifest {
        command: settings.command.clone(),
        seed: settings.seed,
        config: settings,
        version: env!("CARGO_PKG_VERSION").into(),
        threads_used: rayon::current_num_threads(),
        started_unix_s: started,
        wall_clock_s: wall,
        outputs: vec![out.display().to_string()],
    };
    write_file(&manifest_path(out), |f| Ok(serde_json::to_writer_pretty(f, &manifest)?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ftn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
