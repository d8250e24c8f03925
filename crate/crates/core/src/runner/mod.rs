//! Experiment orchestration: planning, parallel execution, resumable
//! persistence and the final canonical tables.
//!
//! Each cell is written to its own file under `output_dir/cells/` as soon as
//! it finishes. The final `features.csv` and `shifts.csv` are assembled from
//! those files in canonical order, so their bytes do not depend on worker
//! count, scheduling, or how many times a run was interrupted and resumed.

pub mod config;

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::thread;

use rayon::prelude::*;

pub use config::{fingerprint_diff, ElaSeedPolicy, ExperimentConfig};

use crate::doe::{self, Design};
use crate::ela::{self, Dataset, FeatureValue, FeatureVector, NUM_FEATURES};
use crate::embed::{self, GaussianEmbedding};
use crate::error::{Error, Result};
use crate::io::{self as csvio, FeatureRow, FEATURE_HEADER, SHIFT_HEADER};
use crate::seed::{mix, tag};
use crate::shift::{shift_records, ShiftKey};
use crate::suite::{self, ProblemInstance};

/// Stands in for the embedding index of reference cells when deriving seeds.
pub const REFERENCE_MARKER: u64 = u64::MAX;

pub const CELLS_DIR: &str = "cells";
pub const FEATURES_FILE: &str = "features.csv";
pub const SHIFTS_FILE: &str = "shifts.csv";
pub const FINGERPRINT_FILE: &str = "fingerprint.txt";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Projection {
    pub reduced_dim: usize,
    pub embedding_id: u32,
}

/// One unit of work: a (function, instance, design) sample, either in the
/// original space or projected through one embedding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunCell {
    pub function_id: u32,
    pub instance_id: u32,
    pub sample_size: usize,
    pub design_id: u32,
    pub projection: Option<Projection>,
    /// Also the feature seed of the cell.
    pub seed: u64,
}

impl RunCell {
    pub fn is_reference(&self) -> bool {
        self.projection.is_none()
    }

    pub fn file_name(&self) -> String {
        let base = format!(
            "f{:02}_i{}_s{}_l{}",
            self.function_id, self.instance_id, self.sample_size, self.design_id
        );
        match self.projection {
            None => format!("{base}_ref.csv"),
            Some(p) => format!("{base}_d{}_k{}.csv", p.reduced_dim, p.embedding_id),
        }
    }

    /// Identifies the reference sample a cell belongs to.
    fn sample_key(&self) -> (u32, u32, u32, usize) {
        (self.function_id, self.instance_id, self.design_id, self.sample_size)
    }

    /// Canonical order of the final tables.
    fn sort_key(&self) -> (u32, u32, u32, usize, Option<Projection>) {
        (
            self.function_id,
            self.instance_id,
            self.design_id,
            self.sample_size,
            self.projection,
        )
    }

    fn rows(&self, features: &FeatureVector) -> Vec<FeatureRow> {
        csvio::feature_rows(
            self.function_id,
            self.instance_id,
            self.design_id,
            self.sample_size,
            self.projection.map(|p| (p.reduced_dim, p.embedding_id)),
            features,
        )
    }
}

pub fn design_seed(master_seed: u64, sample_size: usize, design_id: u32) -> u64 {
    mix(&[tag::DESIGN, master_seed, sample_size as u64, design_id as u64])
}

pub fn embedding_seed(master_seed: u64, reduced_dim: usize, embedding_id: u32) -> u64 {
    mix(&[tag::EMBEDDING, master_seed, reduced_dim as u64, embedding_id as u64])
}

pub fn cell_seed(
    master_seed: u64,
    design_id: u32,
    function_id: u32,
    instance_id: u32,
    projection: Option<Projection>,
    sample_size: usize,
) -> u64 {
    let (k, d) = projection.map_or((REFERENCE_MARKER, 0), |p| (p.embedding_id as u64, p.reduced_dim as u64));
    mix(&[
        tag::CELL,
        master_seed,
        design_id as u64,
        function_id as u64,
        instance_id as u64,
        k,
        d,
        sample_size as u64,
    ])
}

/// All cells of a configuration: every reference cell first, then every
/// projected cell, each group nested by size, design, function, instance
/// (and reduced dim, embedding).
pub fn plan(config: &ExperimentConfig) -> Result<Vec<RunCell>> {
    config.validate()?;
    let mut projections = vec![None];
    for &d in &config.reduced_dims {
        for k in 0..config.embeddings_per_dim {
            projections.push(Some(Projection {
                reduced_dim: d,
                embedding_id: k,
            }));
        }
    }
    let mut refs = Vec::new();
    let mut projected = Vec::new();
    for &s in &config.sample_sizes {
        for l in 0..config.designs_per_size {
            for &m in &config.function_ids {
                for &n in &config.instance_ids {
                    for &p in &projections {
                        let cell = RunCell {
                            function_id: m,
                            instance_id: n,
                            sample_size: s,
                            design_id: l,
                            projection: p,
                            seed: cell_seed(config.master_seed, l, m, n, p, s),
                        };
                        if p.is_none() {
                            refs.push(cell);
                        } else {
                            projected.push(cell);
                        }
                    }
                }
            }
        }
    }
    refs.extend(projected);
    Ok(refs)
}

/// Shared, read-only inputs of a run: the designs (one per size and design
/// id), the embeddings (one per reduced dim and embedding id) and the
/// problem instances.
pub struct Workspace {
    designs: HashMap<(usize, u32), Design>,
    embeddings: HashMap<Projection, GaussianEmbedding>,
    instances: HashMap<(u32, u32), ProblemInstance>,
}

impl Workspace {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let mut designs = HashMap::new();
        for &s in &config.sample_sizes {
            for l in 0..config.designs_per_size {
                let mut d = doe::lhs(s, config.dimension, design_seed(config.master_seed, s, l))?;
                d.design_id = l;
                designs.insert((s, l), d);
            }
        }
        let mut embeddings = HashMap::new();
        for &d in &config.reduced_dims {
            for k in 0..config.embeddings_per_dim {
                let mut e = embed::sample_embedding(d, config.dimension, embedding_seed(config.master_seed, d, k))?;
                e.embedding_id = k;
                embeddings.insert(
                    Projection {
                        reduced_dim: d,
                        embedding_id: k,
                    },
                    e,
                );
            }
        }
        let mut instances = HashMap::new();
        for &m in &config.function_ids {
            for &n in &config.instance_ids {
                instances.insert((m, n), suite::make_instance(m, n, config.dimension)?);
            }
        }
        Ok(Workspace {
            designs,
            embeddings,
            instances,
        })
    }

    pub fn design(&self, sample_size: usize, design_id: u32) -> Option<&Design> {
        self.designs.get(&(sample_size, design_id))
    }

    pub fn embedding(&self, projection: Projection) -> Option<&GaussianEmbedding> {
        self.embeddings.get(&projection)
    }

    /// Points (original or projected) with the objective values of the
    /// original design points.
    pub fn dataset(&self, cell: &RunCell) -> Result<Dataset> {
        let design = self
            .design(cell.sample_size, cell.design_id)
            .ok_or_else(|| Error::domain(format!("no design for cell {}", cell.file_name())))?;
        let instance = self
            .instances
            .get(&(cell.function_id, cell.instance_id))
            .ok_or_else(|| Error::domain(format!("no instance for cell {}", cell.file_name())))?;
        let y = instance.evaluate_rows(&design.points)?;
        let points = match cell.projection {
            None => design.points.clone(),
            Some(p) => self
                .embedding(p)
                .ok_or_else(|| Error::domain(format!("no embedding for cell {}", cell.file_name())))?
                .project(&design.points)?,
        };
        Dataset::new(points, y)
    }

    pub fn features(&self, cell: &RunCell) -> Result<FeatureVector> {
        Ok(ela::compute_all(&self.dataset(cell)?, cell.seed))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` uses one per core.
    pub workers: Option<usize>,
    pub resume: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub planned_cells: usize,
    pub computed_cells: usize,
    pub skipped_cells: usize,
    pub feature_rows: usize,
    pub shift_rows: usize,
    /// Shift rows whose delta is missing because a side was not ok.
    pub missing_shifts: usize,
}

/// Runs (or, with `resume`, continues) an experiment and writes the final
/// tables.
pub fn execute(config: &ExperimentConfig, options: &RunOptions) -> Result<RunSummary> {
    let cells = plan(config)?;
    if options.workers == Some(0) {
        return Err(Error::config("workers", "must be at least 1"));
    }
    let out = &config.output_dir;
    let cells_dir = out.join(CELLS_DIR);
    prepare_output(config, options.resume)?;

    let todo: Vec<RunCell> = cells
        .iter()
        .filter(|c| !(options.resume && cells_dir.join(c.file_name()).is_file()))
        .copied()
        .collect();
    let skipped = cells.len() - todo.len();
    if !todo.is_empty() {
        let ws = Workspace::new(config)?;
        run_cells(&ws, &todo, &cells_dir, options.workers)?;
    }
    let (feature_rows, shift_rows, missing_shifts) = assemble(&cells, out)?;
    Ok(RunSummary {
        planned_cells: cells.len(),
        computed_cells: todo.len(),
        skipped_cells: skipped,
        feature_rows,
        shift_rows,
        missing_shifts,
    })
}

/// Continues an interrupted run; a no-op apart from re-assembling the
/// tables if every cell is already on disk.
pub fn resume(config: &ExperimentConfig, workers: Option<usize>) -> Result<RunSummary> {
    execute(config, &RunOptions { workers, resume: true })
}

fn prepare_output(config: &ExperimentConfig, resume: bool) -> Result<()> {
    let out = &config.output_dir;
    let cells_dir = out.join(CELLS_DIR);
    let fp_path = out.join(FINGERPRINT_FILE);
    let fingerprint = config.fingerprint();
    if resume && fp_path.is_file() {
        let stored = fs::read_to_string(&fp_path).map_err(|e| Error::io(&fp_path, e))?;
        if stored != fingerprint {
            let fields = fingerprint_diff(&stored, &fingerprint);
            return Err(Error::config(
                "fingerprint",
                format!(
                    "{} was produced by a different configuration (differs in: {}); \
                     rerun without --resume or point output_dir elsewhere",
                    out.display(),
                    fields.join(", ")
                ),
            ));
        }
    } else if cells_dir.exists() {
        fs::remove_dir_all(&cells_dir).map_err(|e| Error::io(&cells_dir, e))?;
    }
    fs::create_dir_all(&cells_dir).map_err(|e| Error::io(&cells_dir, e))?;
    csvio::write_atomic(&fp_path, fingerprint.as_bytes())
}

/// Computes cells on a worker pool; a single writer thread persists them.
fn run_cells(ws: &Workspace, cells: &[RunCell], cells_dir: &Path, workers: Option<usize>) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::config("workers", e.to_string()))?;
    let (tx, rx) = mpsc::channel::<(PathBuf, String)>();
    let writer = thread::spawn(move || -> Result<()> {
        for (path, text) in rx {
            csvio::write_atomic(&path, text.as_bytes())?;
        }
        Ok(())
    });
    let computed = pool.install(|| {
        cells.par_iter().try_for_each_with(tx, |tx, cell| {
            let features = ws.features(cell)?;
            let path = cells_dir.join(cell.file_name());
            let text = csvio::feature_rows_to_csv(&cell.rows(&features));
            // A closed channel means the writer hit an I/O error; its own
            // error is reported below.
            tx.send((path, text)).map_err(|_| Error::domain("writer stopped"))
        })
    });
    let written = writer.join().expect("writer thread panicked");
    written.and(computed)
}

fn load_cell(cells_dir: &Path, cell: &RunCell) -> Result<FeatureVector> {
    let path = cells_dir.join(cell.file_name());
    let rows = csvio::read_feature_rows(&path)?;
    let expected = cell.rows(&FeatureVector::from_entries(vec![
        FeatureValue::missing();
        NUM_FEATURES
    ])?);
    let matches = rows.len() == NUM_FEATURES && rows.iter().zip(&expected).all(|(r, e)| r.sort_key() == e.sort_key());
    if !matches {
        return Err(Error::parse(&path, "cell file does not hold the 61 rows of its cell"));
    }
    FeatureVector::from_entries(rows.iter().map(|r| r.value).collect())
}

/// Streams the cell files into the canonical tables. Returns (feature rows,
/// shift rows, missing deltas).
fn assemble(cells: &[RunCell], out: &Path) -> Result<(usize, usize, usize)> {
    let cells_dir = out.join(CELLS_DIR);
    let mut order: Vec<RunCell> = cells.to_vec();
    order.sort_by_key(RunCell::sort_key);

    let feat_path = out.join(FEATURES_FILE);
    let shift_path = out.join(SHIFTS_FILE);
    let feat_tmp = out.join(format!("{FEATURES_FILE}.tmp"));
    let shift_tmp = out.join(format!("{SHIFTS_FILE}.tmp"));
    let create = |p: &Path| fs::File::create(p).map(BufWriter::new).map_err(|e| Error::io(p, e));
    let mut feat = create(&feat_tmp)?;
    let mut shifts = create(&shift_tmp)?;
    let put = |w: &mut BufWriter<fs::File>, p: &Path, s: &str| w.write_all(s.as_bytes()).map_err(|e| Error::io(p, e));
    put(&mut feat, &feat_tmp, &format!("{}\n", FEATURE_HEADER.join(",")))?;
    put(&mut shifts, &shift_tmp, &format!("{}\n", SHIFT_HEADER.join(",")))?;

    let (mut n_feat, mut n_shift, mut n_missing) = (0, 0, 0);
    let mut reference: Option<(RunCell, FeatureVector)> = None;
    for cell in &order {
        let features = load_cell(&cells_dir, cell)?;
        let rows = cell.rows(&features);
        let text = csvio::feature_rows_to_csv(&rows);
        put(&mut feat, &feat_tmp, text.split_once('\n').map_or("", |t| t.1))?;
        n_feat += rows.len();
        match cell.projection {
            None => reference = Some((*cell, features)),
            Some(p) => {
                // Canonical order puts each reference cell right before its
                // projections.
                let (r, ref_features) = reference
                    .as_ref()
                    .filter(|(r, _)| r.sample_key() == cell.sample_key())
                    .ok_or_else(|| Error::domain(format!("no reference cell for {}", cell.file_name())))?;
                debug_assert!(r.is_reference());
                let key = ShiftKey {
                    function_id: cell.function_id,
                    instance_id: cell.instance_id,
                    design_id: cell.design_id,
                    sample_size: cell.sample_size,
                    reduced_dim: p.reduced_dim,
                    embedding_id: p.embedding_id,
                };
                let recs = shift_records(key, &features, ref_features)?;
                n_missing += recs.iter().filter(|r| r.delta.is_none()).count();
                n_shift += recs.len();
                let text = csvio::shifts_to_csv(&recs);
                put(&mut shifts, &shift_tmp, text.split_once('\n').map_or("", |t| t.1))?;
            }
        }
    }
    for (w, tmp, dest) in [(feat, &feat_tmp, &feat_path), (shifts, &shift_tmp, &shift_path)] {
        let f = w.into_inner().map_err(|e| Error::io(tmp, e.into_error()))?;
        f.sync_all().map_err(|e| Error::io(tmp, e))?;
        fs::rename(tmp, dest).map_err(|e| Error::io(dest, e))?;
    }
    Ok((n_feat, n_shift, n_missing))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_plan_counts() {
        let cells = plan(&ExperimentConfig::desk("/o")).unwrap();
        assert_eq!(cells.iter().filter(|c| c.is_reference()).count(), 12);
        assert_eq!(cells.iter().filter(|c| !c.is_reference()).count(), 48);
        assert!(cells[..12].iter().all(RunCell::is_reference));
    }

    #[test]
    fn paper_scale_reference_count() {
        let mut cfg = ExperimentConfig::desk("/o");
        cfg.function_ids = (1..=24).collect();
        cfg.instance_ids = (0..15).collect();
        cfg.designs_per_size = 40;
        cfg.sample_sizes = vec![200, 2000];
        cfg.reduced_dims = vec![2, 5, 10];
        cfg.embeddings_per_dim = 40;
        let cells = plan(&cfg).unwrap();
        let refs = cells.iter().filter(|c| c.is_reference()).count();
        assert_eq!(refs, 28_800);
        assert_eq!(cells.len() - refs, 28_800 * 3 * 40);
    }

    #[test]
    fn empty_function_list_is_rejected() {
        let mut cfg = ExperimentConfig::desk("/o");
        cfg.function_ids.clear();
        assert!(matches!(plan(&cfg), Err(Error::Config { field, .. }) if field == "function_ids"));
    }

    #[test]
    fn seeds_are_distinct_and_names_unique() {
        let cells = plan(&ExperimentConfig::desk("/o")).unwrap();
        let mut seeds: Vec<u64> = cells.iter().map(|c| c.seed).collect();
        let mut names: Vec<String> = cells.iter().map(RunCell::file_name).collect();
        seeds.sort_unstable();
        seeds.dedup();
        names.sort();
        names.dedup();
        assert_eq!(seeds.len(), cells.len());
        assert_eq!(names.len(), cells.len());
    }
}
