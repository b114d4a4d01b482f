use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::error::{io_context, CliResult};

/// A set of files that appear together or not at all: contents go to
/// sibling temporaries, renamed into place by [`commit`](Self::commit).
/// Dropping an uncommitted set removes the temporaries.
#[derive(Default)]
pub struct FileSet {
    staged: Vec<(PathBuf, PathBuf)>,
    committed: bool,
}

impl FileSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stage(&mut self, path: &Path, contents: &[u8]) -> CliResult<()> {
        let mut name = path.file_name().unwrap_or_default().to_os_string();
        name.push(format!(".tmp{}", std::process::id()));
        let tmp = path.with_file_name(name);
        fs::write(&tmp, contents).map_err(io_context(path))?;
        self.staged.push((tmp, path.to_path_buf()));
        Ok(())
    }

    pub fn commit(mut self) -> CliResult<()> {
        for (tmp, dest) in &self.staged {
            fs::rename(tmp, dest).map_err(io_context(dest))?;
        }
        self.committed = true;
        Ok(())
    }
}

impl Drop for FileSet {
    fn drop(&mut self) {
        if !self.committed {
            for (tmp, _) in &self.staged {
                let _ = fs::remove_file(tmp);
            }
        }
    }
}

/// Opens `path` for writing, or stdout for `-`.
pub fn writer(path: &Path) -> CliResult<Box<dyn Write>> {
    if path == Path::new("-") {
        Ok(Box::new(io::BufWriter::new(io::stdout().lock())))
    } else {
        let f = fs::File::create(path).map_err(io_context(path))?;
        Ok(Box::new(io::BufWriter::new(f)))
    }
}

/// Reads `path`, or stdin for `-`.
pub fn read_input(path: &Path) -> CliResult<String> {
    if path == Path::new("-") {
        Ok(io::read_to_string(io::stdin())?)
    } else {
        fs::read_to_string(path).map_err(io_context(path))
    }
}

/// `stem` with `ext` appended (not replacing a dotted part of the stem).
pub fn with_suffix(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_os_string();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}
