//! Output emission: tracked file writes with cleanup on failure, and the
//! fixed float formatting that keeps repeated runs byte-identical.

use anyhow::Context;
use std::path::{Path, PathBuf};

/// Floats are printed with 17 significant digits, enough to round-trip f64
/// exactly, so identical configs produce byte-identical files.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Collects the files written by one command so a failure part-way through
/// removes everything instead of leaving a torn run behind.
pub struct OutputSession {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputSession {
    pub fn create(dir: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: &str) -> anyhow::Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents)
            .with_context(|| format!("cannot write {}", path.display()))?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// Remove every file this session wrote.
    pub fn discard(&self) {
        for path in &self.written {
            let _ = std::fs::remove_file(path);
        }
    }

}

/// Build a CSV line from already formatted cells.
pub fn csv_line(cells: &[String]) -> String {
    cells.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_fixed_width_significant() {
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(f64::INFINITY), "inf");
        assert_eq!(fmt_float(f64::NAN), "nan");
        // round-trips exactly
        let x = std::f64::consts::PI / 17.0;
        assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn discard_removes_written_files() {
        let dir = std::env::temp_dir().join(format!("zenosim-out-test-{}", std::process::id()));
        let mut session = OutputSession::create(&dir).unwrap();
        let path = session.write("x.csv", "a,b\n").unwrap();
        assert!(path.exists());
        session.discard();
        assert!(!path.exists());
        let _ = std::fs::remove_dir(&dir);
    }
}
