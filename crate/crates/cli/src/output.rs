use std::fmt::Display;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::config::Config;
use crate::error::CliError;

/// Writes artifacts into one directory, each prefixed by `#` comment lines
/// carrying the command, the resolved configuration and the seed.
pub struct OutputDir {
    dir: PathBuf,
    header: String,
    quiet: bool,
}

impl OutputDir {
    pub fn create(
        dir: &Path,
        command: &str,
        cfg: &Config,
        timestamp: bool,
        quiet: bool,
    ) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
        let config = serde_json::to_string(cfg).expect("config serializes");
        let mut header = format!(
            "# hoi {command} {}\n# config: {config}\n# seed: {}\n",
            env!("CARGO_PKG_VERSION"),
            cfg.seed
        );
        if timestamp {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs());
            header.push_str(&format!("# generated: {secs}\n"));
        }
        Ok(Self {
            dir: dir.to_path_buf(),
            header,
            quiet,
        })
    }

    /// One-line progress summary on stdout, unless quiet.
    pub fn say(&self, msg: std::fmt::Arguments) {
        if !self.quiet {
            println!("{msg}");
        }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write<F>(&self, name: &str, body: F) -> Result<PathBuf, CliError>
    where
        F: FnOnce(&mut dyn Write) -> io::Result<()>,
    {
        let path = self.path(name);
        let result = fs::File::create(&path).and_then(|f| {
            let mut w = BufWriter::new(f);
            w.write_all(self.header.as_bytes())?;
            body(&mut w)?;
            w.flush()
        });
        result.map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }

    /// A CSV file with the given header row and pre-formatted rows.
    pub fn write_csv(
        &self,
        name: &str,
        columns: &[&str],
        rows: &[Vec<String>],
    ) -> Result<PathBuf, CliError> {
        self.write(name, |w| {
            writeln!(w, "{}", columns.join(","))?;
            for row in rows {
                writeln!(w, "{}", row.join(","))?;
            }
            Ok(())
        })
    }
}

/// CSV cell for an optional value; absent values are empty.
pub fn opt<T: Display>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn cell<T: Display>(v: T) -> String {
    v.to_string()
}
