//! Command-line front end for `tmlab-core`: configuration, orchestration and output.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod profile;
pub mod record;

use std::io::Write;
use std::path::Path;

pub use cli::{Cli, Resolved};
pub use config::Common;
pub use error::{CliError, Result};
pub use record::{Provenance, ResultRecord};

/// Runs a resolved command on a pool of `common.threads` workers.
pub fn execute(common: &Common, cmd: &Resolved) -> Result<ResultRecord> {
    cmd.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = common.threads {
        pool = pool.num_threads(t);
    }
    let pool = pool
        .build()
        .map_err(|e| commands::numerical(format!("thread pool: {e}")))?;
    let prov = Provenance::new(common.seed, common.precision);
    pool.install(|| match cmd {
        Resolved::Eval(c) => commands::cmd_eval(c, prov),
        Resolved::Sharpness(c) => commands::cmd_sharpness(c, prov),
        Resolved::Maximize(c) => commands::cmd_maximize(c, prov),
        Resolved::Green(c) => commands::cmd_green(c, prov),
        Resolved::Bound(c) => commands::cmd_bound(c, prov),
        Resolved::Existence(c) => commands::cmd_existence(c, prov),
        Resolved::Bubble(c) => commands::cmd_bubble(c, prov),
    })
}

/// Writes the record as the chosen format to `out` or stdout.
pub fn emit(rec: &ResultRecord, format: config::Format, out: Option<&Path>) -> Result<()> {
    let body = match format {
        config::Format::Json => rec.to_json(),
        config::Format::Csv => rec.to_csv(),
    };
    match out {
        Some(path) => {
            std::fs::write(path, &body).map_err(|e| CliError::io(path, e))?;
            if format == config::Format::Csv {
                let side = path.with_extension("json");
                std::fs::write(&side, rec.to_json()).map_err(|e| CliError::io(side, e))?;
            }
        }
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(body.as_bytes())
                .map_err(|e| CliError::io("<stdout>", e))?;
        }
    }
    Ok(())
}

/// Full CLI pass; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = cli.resolve().and_then(|(common, cmd)| {
        let rec = execute(&common, &cmd)?;
        emit(&rec, common.format, cli.common.out.as_deref())?;
        Ok(rec)
    });
    match result {
        Ok(rec) if rec.failures.is_empty() => 0,
        Ok(rec) => {
            for f in &rec.failures {
                eprintln!("tmlab: {f}");
            }
            3
        }
        Err(e) => {
            eprintln!("tmlab: {e}");
            e.exit_code()
        }
    }
}
