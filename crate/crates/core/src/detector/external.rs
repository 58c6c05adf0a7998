//! Adapter for detectors running as child processes.
//!
//! The command template is split shell-style; every `{image}` occurrence is
//! replaced with the image path (the path is appended when the template has
//! no placeholder). The child prints one detection per line on stdout:
//!
//! ```text
//! <label> <confidence> <x0> <y0> <x1> <y1>
//! ```
//!
//! Blank lines are ignored. Exit status 0 is required.

use std::io::Read;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use super::{DetectError, Detection, Detector, Frame};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);
const PLACEHOLDER: &str = "{image}";

#[derive(Debug, Clone)]
pub struct ExternalDetector {
    name: String,
    argv: Vec<String>,
    timeout: Duration,
    concurrency: usize,
}

impl ExternalDetector {
    pub fn new(template: &str) -> Result<Self, String> {
        let argv = shell_words::split(template).map_err(|e| format!("bad command template: {e}"))?;
        if argv.is_empty() {
            return Err("empty command template".into());
        }
        Ok(ExternalDetector { name: "external".into(), argv, timeout: DEFAULT_TIMEOUT, concurrency: 1 })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    /// Allows up to `n` concurrent child processes (default 1).
    pub fn with_concurrency(mut self, n: usize) -> Self {
        self.concurrency = n.max(1);
        self
    }

    fn command_for(&self, image: &str) -> Command {
        let mut args: Vec<String> = self.argv.iter().map(|a| a.replace(PLACEHOLDER, image)).collect();
        if !self.argv.iter().any(|a| a.contains(PLACEHOLDER)) {
            args.push(image.to_string());
        }
        let mut cmd = Command::new(&args[0]);
        cmd.args(&args[1..]);
        cmd
    }
}

/// Parses child stdout in the wire format.
pub fn parse_wire_output(text: &str) -> Result<Vec<Detection>, DetectError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split_whitespace().collect();
            Detection::from_fields(&fields).map_err(|reason| DetectError::Malformed { line: i + 1, reason })
        })
        .collect()
}

fn drain<R: Read + Send + 'static>(mut reader: R) -> thread::JoinHandle<Vec<u8>> {
    thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = reader.read_to_end(&mut buf);
        buf
    })
}

impl Detector for ExternalDetector {
    fn name(&self) -> &str {
        &self.name
    }

    fn detect(&self, frame: &Frame<'_>) -> Result<Vec<Detection>, DetectError> {
        let image = frame.path.to_string_lossy();
        let mut child = self
            .command_for(&image)
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(DetectError::Spawn)?;
        let stdout = drain(child.stdout.take().expect("stdout is piped"));
        let stderr = drain(child.stderr.take().expect("stderr is piped"));

        let deadline = Instant::now() + self.timeout;
        let status = loop {
            match child.try_wait().map_err(DetectError::Spawn)? {
                Some(status) => break status,
                None if Instant::now() >= deadline => {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err(DetectError::Timeout(self.timeout));
                }
                None => thread::sleep(Duration::from_millis(2)),
            }
        };
        let out = stdout.join().unwrap_or_default();
        let err = stderr.join().unwrap_or_default();
        if !status.success() {
            return Err(DetectError::ExitStatus {
                status: status.to_string(),
                stderr: String::from_utf8_lossy(&err).trim().to_string(),
            });
        }
        let text = String::from_utf8(out)
            .map_err(|_| DetectError::Malformed { line: 0, reason: "output is not UTF-8".into() })?;
        parse_wire_output(&text)
    }

    fn concurrency_limit(&self) -> Option<usize> {
        Some(self.concurrency)
    }
}
