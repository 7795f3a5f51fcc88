//! Adapter for segmenters that run as a child process.
//!
//! Line protocol: the child reads one sentinel-encoded sentence per line on
//! stdin and writes one space-delimited token sequence per line on stdout, in
//! order. Output must concatenate back to the input exactly.

use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::process::{Command, Stdio};
use std::thread;

use crate::corpus::{Line, SchemeId, SegmentedLine};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalCommand {
    pub program: String,
    pub args: Vec<String>,
    /// Used as the scheme name.
    pub name: String,
}

impl ExternalCommand {
    /// Splits a command line with POSIX shell quoting rules. The scheme name
    /// defaults to the program's file stem.
    pub fn parse(command: &str) -> Result<Self> {
        let mut words = shell_words::split(command)
            .map_err(|e| Error::usage(format!("cannot parse command {command:?}: {e}")))?
            .into_iter();
        let program = words
            .next()
            .ok_or_else(|| Error::usage("external command is empty"))?;
        let name = Path::new(&program)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| program.clone());
        Ok(ExternalCommand {
            program,
            args: words.collect(),
            name,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// Runs every line through the external segmenter and validates the result.
pub fn external_segment(lines: &[Line], command: &ExternalCommand) -> Result<Vec<SegmentedLine>> {
    let inputs: Vec<String> = lines.iter().map(Line::encoded).collect();

    let mut child = Command::new(&command.program)
        .args(&command.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| Error::External {
            message: format!("cannot start `{}`: {e}", command.program),
            stderr: String::new(),
        })?;

    let stdin = child.stdin.take().expect("piped stdin");
    let payload = inputs.clone();
    // a child that exits early closes the pipe; the exit status or line count
    // check reports that, so write errors are dropped here
    let writer = thread::spawn(move || {
        let mut w = BufWriter::new(stdin);
        for line in &payload {
            if w.write_all(line.as_bytes()).is_err()
                || w.write_all(b"\n").is_err()
                || w.flush().is_err()
            {
                return;
            }
        }
    });
    let mut stderr_pipe = child.stderr.take().expect("piped stderr");
    let stderr_reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stderr_pipe.read_to_end(&mut buf);
        String::from_utf8_lossy(&buf).into_owned()
    });

    let mut stdout = Vec::new();
    let read_result = child
        .stdout
        .take()
        .expect("piped stdout")
        .read_to_end(&mut stdout);
    let _ = writer.join();
    let status = child.wait().map_err(|e| Error::External {
        message: format!("waiting for `{}` failed: {e}", command.program),
        stderr: String::new(),
    })?;
    let stderr = stderr_reader.join().unwrap_or_default();

    if !status.success() {
        return Err(Error::External {
            message: format!("`{}` exited with {status}", command.program),
            stderr,
        });
    }
    read_result.map_err(|e| Error::External {
        message: format!("reading output of `{}` failed: {e}", command.program),
        stderr: stderr.clone(),
    })?;

    let text = String::from_utf8(stdout)
        .map_err(|e| Error::data(format!("`{}` produced invalid UTF-8: {e}", command.program)))?;
    let outputs: Vec<&str> = if text.is_empty() {
        Vec::new()
    } else {
        text.strip_suffix('\n')
            .unwrap_or(&text)
            .split('\n')
            .collect()
    };
    if outputs.len() != inputs.len() {
        return Err(Error::data(format!(
            "`{}` returned {} lines for {} inputs",
            command.program,
            outputs.len(),
            inputs.len()
        )));
    }

    let scheme = SchemeId::external(command.name.clone());
    inputs
        .iter()
        .zip(outputs)
        .enumerate()
        .map(|(i, (input, output))| {
            let tokens: Vec<String> = output
                .split(' ')
                .filter(|t| !t.is_empty())
                .map(String::from)
                .collect();
            if tokens.concat() != *input {
                return Err(Error::data(format!(
                    "line {}: `{}` output {output:?} does not reproduce the input",
                    i + 1,
                    command.program
                )));
            }
            SegmentedLine::new(tokens, scheme.clone())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_command_line() {
        let cmd = ExternalCommand::parse("/usr/bin/deepcut-wrapper --model 'a b'").unwrap();
        assert_eq!(cmd.program, "/usr/bin/deepcut-wrapper");
        assert_eq!(cmd.args, ["--model", "a b"]);
        assert_eq!(cmd.name, "deepcut-wrapper");
        assert!(matches!(ExternalCommand::parse("  "), Err(Error::Usage(_))));
        assert!(matches!(
            ExternalCommand::parse("'unterminated"),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn missing_program_is_external_error() {
        let cmd = ExternalCommand::parse("/nonexistent/segmenter-xyz").unwrap();
        let err = external_segment(&[Line::new("a").unwrap()], &cmd).unwrap_err();
        assert!(matches!(err, Error::External { .. }));
    }
}
