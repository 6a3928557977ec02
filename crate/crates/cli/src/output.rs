use serde::Serialize;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Data files written into the output directory, in write order.
pub struct Artifacts {
    dir: PathBuf,
    pub files: Vec<String>,
}

impl Artifacts {
    pub fn create(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn csv<H, R>(&mut self, name: &str, header: &[H], rows: R) -> io::Result<()>
    where
        H: AsRef<str>,
        R: IntoIterator<Item = Vec<f64>>,
    {
        self.csv_text(name, header, rows.into_iter().map(|r| r.iter().map(f64::to_string).collect()))
    }

    pub fn csv_text<H, R>(&mut self, name: &str, header: &[H], rows: R) -> io::Result<()>
    where
        H: AsRef<str>,
        R: IntoIterator<Item = Vec<String>>,
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(self.path(name))?;
        w.write_record(header.iter().map(|h| h.as_ref()))?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> io::Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
        text.push('\n');
        fs::write(self.path(name), text)?;
        self.files.push(name.to_string());
        Ok(())
    }
}
