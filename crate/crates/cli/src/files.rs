//! Workdir layout and atomic file writes.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use tripkg::TripKG;

pub struct Layout {
    root: PathBuf,
}

impl Layout {
    pub fn new(root: &Path) -> Self {
        Layout { root: root.to_path_buf() }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn records(&self) -> PathBuf {
        self.path("records.csv")
    }
    pub fn rejects(&self) -> PathBuf {
        self.path("rejects.csv")
    }
    pub fn graph(&self) -> PathBuf {
        self.path("graph")
    }
    pub fn profiles(&self) -> PathBuf {
        self.path("profiles.csv")
    }
    pub fn labels(&self) -> PathBuf {
        self.path("labels.csv")
    }
    pub fn characteristics(&self) -> PathBuf {
        self.path("characteristics")
    }
    pub fn generated(&self) -> PathBuf {
        self.path("generated")
    }
    pub fn evaluation(&self) -> PathBuf {
        self.path("evaluation")
    }
}

/// Writes through a temporary file in the target directory, then renames it
/// into place so readers never see a partial file.
pub fn write_atomic<F>(path: &Path, fill: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        fill(&mut w)?;
        w.flush()?;
    }
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn open(path: &Path, produced_by: &str) -> Result<BufReader<File>> {
    let f = File::open(path)
        .with_context(|| format!("missing {}; run `tripkg {produced_by}` first", path.display()))?;
    Ok(BufReader::new(f))
}

pub fn save_graph(dir: &Path, g: &TripKG) -> Result<()> {
    write_atomic(&dir.join("triples.tsv"), |w| Ok(g.write_triples(w)?))?;
    write_atomic(&dir.join("properties.tsv"), |w| Ok(g.write_properties(w)?))
}

pub fn load_graph(dir: &Path, produced_by: &str) -> Result<TripKG> {
    let t = open(&dir.join("triples.tsv"), produced_by)?;
    let p = open(&dir.join("properties.tsv"), produced_by)?;
    TripKG::read_tsv(t, p).with_context(|| format!("cannot load graph from {}", dir.display()))
}
