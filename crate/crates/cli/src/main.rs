//! `ng`: command-line front end for the Naming Game engine.

mod commands;
mod manifest;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use commands::{Cli, Cmd};

#[derive(Debug)]
pub enum Failure {
    /// Bad flags or inputs; exit status 2.
    Usage(String),
    /// The numerics could not deliver; exit status 3.
    Numeric(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Io(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Numeric(m) | Failure::Io(m) => f.write_str(m),
        }
    }
}

impl From<ng_core::Error> for Failure {
    fn from(e: ng_core::Error) -> Self {
        use ng_core::Error::*;
        match e {
            Parameter(_) | Parse(_) => Failure::Usage(e.to_string()),
            DegenerateNetwork(_) | Domain { .. } | NotFound { .. } => Failure::Numeric(e.to_string()),
            Io(_) | Csv(_) => Failure::Io(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

/// Pulls `--config FILE` out of `argv` and splices the file's settings in
/// right after the subcommand, so explicit flags override them.
fn resolve_args(argv: Vec<String>) -> Result<Vec<String>, Failure> {
    let mut rest = Vec::new();
    let mut config = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            let path = it.next().ok_or_else(|| Failure::Usage("--config needs a file".into()))?;
            config = Some(PathBuf::from(path));
        } else if let Some(path) = a.strip_prefix("--config=") {
            config = Some(PathBuf::from(path));
        } else {
            rest.push(a);
        }
    }
    if let Some(path) = config {
        let extra = manifest::config_args(&path)?;
        let at = rest.iter().position(|a| !a.starts_with('-')).map_or(rest.len(), |i| i + 1);
        rest.splice(at..at, extra);
    }
    Ok(rest)
}

/// Parses and runs resolved arguments (no program name, no config).
pub fn execute(args: Vec<String>) -> Result<(), Failure> {
    let cli = match Cli::try_parse_from(std::iter::once("ng".to_string()).chain(args.iter().cloned())) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(Failure::Usage(e.render().to_string().trim_end().to_string())),
    };
    match cli.cmd {
        Cmd::Sim(a) => commands::sim(a, &args),
        Cmd::Ode(a) => commands::ode(a, &args),
        Cmd::Tip(a) => commands::tip(a, &args),
        Cmd::Sweep(a) => commands::sweep(a, &args),
        Cmd::Compare(a) => commands::compare(a, &args),
        Cmd::Replay(a) => commands::replay(a),
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("NG_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("NG_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let outcome = init_threads()
        .and_then(|()| resolve_args(std::env::args().skip(1).collect()))
        .and_then(execute);
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ng: {f}");
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn config_lands_after_subcommand() {
        let dir = std::env::temp_dir().join(format!("ng-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let cfg = dir.join("c.conf");
        std::fs::write(&cfg, "# defaults\nn = 80\nmeanfield = true\nseed=3\n").unwrap();
        let got = resolve_args(v(&["sim", "--config", cfg.to_str().unwrap(), "--n", "90"])).unwrap();
        assert_eq!(got, v(&["sim", "--n", "80", "--meanfield", "--seed", "3", "--n", "90"]));
    }
}
