//! Persistence: frontier checkpoints, level statistics and the results ledger.

mod frontier_file;
mod ledger;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use frontier_file::{decode_frontier, encode_frontier, read_frontier, write_frontier, MAGIC};
pub use ledger::{
    append_result, load_ledger, parse_ledger, render_tables, table_rows, ResultRecord, TableRow, TablesReport,
    TABLES,
};

use crate::enumerate::{Frontier, LevelStats};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("corrupt frontier file: {0}")]
    CorruptFile(String),
    #[error("program length {len} does not fit one-byte indices")]
    IndexOverflow { len: usize },
    #[error("corrupt ledger at line {line}: {message}")]
    CorruptLedger { line: usize, message: String },
}

impl StoreError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        StoreError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Output directory of a run: `frontier-KK.slpf`, `stats.tsv`, `results.tsv`.
#[derive(Debug, Clone)]
pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    /// Opens `root`, creating it if needed.
    pub fn create(root: impl Into<PathBuf>) -> Result<RunDir, StoreError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| StoreError::io(&root, e))?;
        Ok(RunDir { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn frontier_path(&self, k: usize) -> PathBuf {
        self.root.join(format!("frontier-{k:02}.slpf"))
    }

    pub fn stats_path(&self) -> PathBuf {
        self.root.join("stats.tsv")
    }

    pub fn ledger_path(&self) -> PathBuf {
        self.root.join("results.tsv")
    }

    /// The checkpointed frontier of length `k`, if present.
    pub fn load_frontier(&self, k: usize) -> Result<Option<Frontier>, StoreError> {
        let path = self.frontier_path(k);
        if !path.exists() {
            return Ok(None);
        }
        let f = read_frontier(&path)?;
        if f.program_len() != k {
            return Err(StoreError::CorruptFile(format!(
                "{} holds programs of length {}",
                path.display(),
                f.program_len()
            )));
        }
        Ok(Some(f))
    }

    pub fn save_frontier(&self, frontier: &Frontier) -> Result<(), StoreError> {
        write_frontier(frontier, &self.frontier_path(frontier.program_len()))
    }

    /// Rewrites the statistics table.
    pub fn save_stats(&self, stats: &[LevelStats]) -> Result<(), StoreError> {
        frontier_file::write_atomic(&self.stats_path(), stats_table(stats).as_bytes())
    }
}

/// Tab-separated statistics with a header row.
pub fn stats_table(stats: &[LevelStats]) -> String {
    let mut out = String::from(LevelStats::HEADER);
    out.push('\n');
    for s in stats {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_dir_layout() {
        let dir = tempfile::tempdir().unwrap();
        let run = RunDir::create(dir.path().join("a/b")).unwrap();
        assert!(run.root().is_dir());
        assert!(run.frontier_path(3).ends_with("frontier-03.slpf"));
        assert_eq!(run.load_frontier(1).unwrap(), None);
        run.save_frontier(&Frontier::seed()).unwrap();
        assert_eq!(run.load_frontier(0).unwrap(), Some(Frontier::seed()));
        std::fs::copy(run.frontier_path(0), run.frontier_path(1)).unwrap();
        assert!(matches!(run.load_frontier(1), Err(StoreError::CorruptFile(_))));
    }
}
