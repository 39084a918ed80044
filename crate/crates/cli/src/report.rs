use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Human-readable record of one invocation.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub command: String,
    pub input_sha256: String,
    pub results: String,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn new(command: String, input: &[u8]) -> Self {
        Self { command, input_sha256: hex_digest(input), ..Self::default() }
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn render(&self) -> String {
        let mut out = format!("command: {}\ninput_sha256: {}\n--\n", self.command, self.input_sha256);
        out.push_str(&self.results);
        if !self.results.is_empty() && !self.results.ends_with('\n') {
            out.push('\n');
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}

/// Prints to stdout; a closed pipe ends output quietly.
pub fn to_stdout(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(CliError::Io { path: "<stdout>".into(), source: e })
        }
        _ => Ok(()),
    }
}

pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.display().to_string(), source };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| CliError::Invalid(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io)
}
