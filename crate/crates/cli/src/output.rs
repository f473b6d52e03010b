//! Output destinations. Files are written to a temporary sibling and renamed
//! into place only once the command has succeeded.

use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::CliError;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "TRAITFUSE_OUTPUT_DIR";

pub enum Sink {
    Stdout(BufWriter<io::Stdout>),
    File {
        tmp: BufWriter<NamedTempFile>,
        dest: PathBuf,
    },
}

impl Sink {
    pub fn create(dest: Option<&Path>) -> Result<Self, CliError> {
        match dest {
            None => Ok(Sink::Stdout(BufWriter::new(io::stdout()))),
            Some(dest) => {
                let dir = match dest.parent() {
                    Some(p) if !p.as_os_str().is_empty() => p,
                    _ => Path::new("."),
                };
                std::fs::create_dir_all(dir)
                    .map_err(|e| CliError::data(format!("cannot create {}: {e}", dir.display())))?;
                let tmp = NamedTempFile::new_in(dir)
                    .map_err(|e| CliError::data(format!("cannot write in {}: {e}", dir.display())))?;
                Ok(Sink::File {
                    tmp: BufWriter::new(tmp),
                    dest: dest.to_path_buf(),
                })
            }
        }
    }

    pub fn writer(&mut self) -> &mut dyn Write {
        match self {
            Sink::Stdout(w) => w,
            Sink::File { tmp, .. } => tmp,
        }
    }

    /// Flushes and moves the file into place. Dropping a `Sink` without
    /// calling this discards the temporary file.
    pub fn commit(self) -> Result<(), CliError> {
        match self {
            Sink::Stdout(mut w) => w.flush().map_err(CliError::from),
            Sink::File { tmp, dest } => {
                let tmp = tmp.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
                tmp.persist(&dest)
                    .map_err(|e| CliError::data(format!("cannot write {}: {}", dest.display(), e.error)))?;
                Ok(())
            }
        }
    }
}

pub fn write_atomic(dest: &Path, contents: &str) -> Result<(), CliError> {
    let mut sink = Sink::create(Some(dest))?;
    sink.writer().write_all(contents.as_bytes())?;
    sink.commit()
}

/// `--output` if given, else `$TRAITFUSE_OUTPUT_DIR/<file_name>`.
pub fn resolve_file(explicit: Option<&Path>, env_dir: Option<&Path>, file_name: &str) -> Option<PathBuf> {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| env_dir.map(|d| d.join(file_name)))
}
