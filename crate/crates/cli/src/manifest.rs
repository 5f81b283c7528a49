//! Run manifests and key=value config files.

use std::fs;
use std::path::{Path, PathBuf};

use crate::Failure;

pub const MANIFEST_HEADER: &str = "# ng run manifest";

/// Everything needed to rerun a command: the resolved argument vector plus
/// the outputs it wrote.
#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    pub command: String,
    pub args: Vec<String>,
    pub params: Vec<(String, String)>,
    pub outputs: Vec<PathBuf>,
}

impl Manifest {
    pub fn render(&self) -> String {
        let mut s = format!("{MANIFEST_HEADER}\ncommand={}\nversion={}\n", self.command, env!("CARGO_PKG_VERSION"));
        for (k, v) in &self.params {
            s += &format!("param.{k}={v}\n");
        }
        for a in &self.args {
            s += &format!("arg={a}\n");
        }
        for o in &self.outputs {
            s += &format!("output={}\n", o.display());
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        let mut m = Manifest {
            command: String::new(),
            args: Vec::new(),
            params: Vec::new(),
            outputs: Vec::new(),
        };
        for line in text.lines() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("malformed manifest line: {line}")))?;
            match k {
                "command" => m.command = v.to_string(),
                "version" => {}
                "arg" => m.args.push(v.to_string()),
                "output" => m.outputs.push(PathBuf::from(v)),
                _ => match k.strip_prefix("param.") {
                    Some(p) => m.params.push((p.to_string(), v.to_string())),
                    None => return Err(Failure::Usage(format!("unknown manifest key: {k}"))),
                },
            }
        }
        if m.command.is_empty() || m.args.first() != Some(&m.command) {
            return Err(Failure::Usage("manifest lacks a command".into()));
        }
        Ok(m)
    }
}

/// `out.csv` → `out.manifest`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("manifest")
}

/// Reads a config file into `--key value` arguments. Lines are
/// `key = value`; `#` starts a comment. A value of `true` becomes a bare
/// switch and `false` drops the key.
pub fn config_args(path: &Path) -> Result<Vec<String>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut args = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        match v {
            "true" => args.push(format!("--{k}")),
            "false" => {}
            _ => {
                args.push(format!("--{k}"));
                args.push(v.to_string());
            }
        }
    }
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trip() {
        let m = Manifest {
            command: "sim".into(),
            args: vec!["sim".into(), "--n".into(), "50".into()],
            params: vec![("n".into(), "50".into())],
            outputs: vec![PathBuf::from("a/b_runs.csv")],
        };
        assert_eq!(Manifest::parse(&m.render()).unwrap(), m);
    }

    #[test]
    fn sibling_path() {
        assert_eq!(manifest_path(Path::new("x/run_runs.csv")), PathBuf::from("x/run_runs.manifest"));
    }
}
