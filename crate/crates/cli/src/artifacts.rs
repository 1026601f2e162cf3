//! Artifact files: JSON documents, matrices, count tables and flat CSVs.

use std::fs;
use std::path::{Path, PathBuf};

use afcoam::numerics::ComplexMatrix;
use afcoam::tomography::CountTable;
use afcoam::DensityMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::report::{Artifact, ArtifactKind};

/// On-disk form of a density or process matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub matrix: ComplexMatrix,
    pub dims: (usize, usize),
    #[serde(default)]
    pub metadata: serde_json::Value,
}

impl MatrixFile {
    pub fn density(&self) -> CliResult<DensityMatrix> {
        Ok(DensityMatrix::new(self.matrix.clone(), self.dims)?)
    }
}

/// Writes into one run directory and records what was written.
#[derive(Debug)]
pub struct ArtifactWriter {
    dir: PathBuf,
    written: Vec<Artifact>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), written: Vec::new() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn into_artifacts(self) -> Vec<Artifact> {
        self.written
    }

    fn put(&mut self, name: &str, file: &str, kind: ArtifactKind, bytes: &[u8]) -> CliResult<()> {
        let path = self.dir.join(file);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.written.push(Artifact { name: name.into(), path: file.into(), kind });
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
        self.put(name, &format!("{name}.json"), ArtifactKind::Json, text.as_bytes())
    }

    pub fn matrix(&mut self, name: &str, matrix: &ComplexMatrix, dims: (usize, usize), metadata: serde_json::Value) -> CliResult<()> {
        let doc = MatrixFile { matrix: matrix.clone(), dims, metadata };
        let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Runtime(e.to_string()))?;
        self.put(name, &format!("{name}.json"), ArtifactKind::Matrix, text.as_bytes())
    }

    pub fn counts(&mut self, name: &str, table: &CountTable) -> CliResult<()> {
        let mut buf = Vec::new();
        table.write_csv(&mut buf)?;
        self.put(name, &format!("{name}.csv"), ArtifactKind::Counts, &buf)
    }

    /// Rows serialized through `csv`; floats use the shortest round-trip form.
    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> CliResult<()> {
        let mut wr = csv::Writer::from_writer(Vec::new());
        for r in rows {
            wr.serialize(r).map_err(|e| CliError::Runtime(e.to_string()))?;
        }
        let buf = wr.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
        self.put(name, &format!("{name}.csv"), ArtifactKind::Csv, &buf)
    }
}

/// Reads artifacts of a finished run.
#[derive(Debug, Clone)]
pub struct ArtifactReader {
    dir: PathBuf,
}

impl ArtifactReader {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn exists(&self, file: &str) -> bool {
        self.dir.join(file).is_file()
    }

    fn read(&self, file: &str) -> CliResult<(PathBuf, String)> {
        let path = self.dir.join(file);
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        Ok((path, text))
    }

    pub fn json<T: DeserializeOwned>(&self, name: &str) -> CliResult<T> {
        let (path, text) = self.read(&format!("{name}.json"))?;
        serde_json::from_str(&text).map_err(|e| CliError::artifact(path, e))
    }

    pub fn matrix(&self, name: &str) -> CliResult<MatrixFile> {
        self.json(name)
    }

    pub fn counts(&self, name: &str, background: f64) -> CliResult<CountTable> {
        let (path, text) = self.read(&format!("{name}.csv"))?;
        CountTable::read_csv(text.as_bytes(), background).map_err(|e| CliError::artifact(path, e))
    }

    pub fn csv<T: DeserializeOwned>(&self, name: &str) -> CliResult<Vec<T>> {
        let (path, text) = self.read(&format!("{name}.csv"))?;
        csv::Reader::from_reader(text.as_bytes())
            .deserialize()
            .collect::<Result<Vec<T>, _>>()
            .map_err(|e| CliError::artifact(path, e))
    }
}
