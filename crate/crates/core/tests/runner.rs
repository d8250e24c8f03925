use std::fs;
use std::path::Path;

use elashift::ela::NUM_FEATURES;
use elashift::runner::{self, ExperimentConfig, RunOptions, Workspace};
use elashift::Error;

fn small(dir: &Path) -> ExperimentConfig {
    ExperimentConfig {
        dimension: 6,
        function_ids: vec![2, 16],
        instance_ids: vec![0, 1],
        sample_sizes: vec![40],
        designs_per_size: 3,
        reduced_dims: vec![2, 3],
        embeddings_per_dim: 2,
        master_seed: 99,
        output_dir: dir.to_path_buf(),
        ela_seed_policy: Default::default(),
    }
}

fn outputs(dir: &Path) -> (Vec<u8>, Vec<u8>) {
    (
        fs::read(dir.join(runner::FEATURES_FILE)).unwrap(),
        fs::read(dir.join(runner::SHIFTS_FILE)).unwrap(),
    )
}

#[test]
fn counts_are_conserved() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small(tmp.path());
    let s = runner::execute(&cfg, &RunOptions::default()).unwrap();
    assert_eq!(s.planned_cells, 12 + 48);
    assert_eq!(s.feature_rows, 60 * NUM_FEATURES);
    assert_eq!(s.shift_rows, 48 * NUM_FEATURES);
    let (f, sh) = outputs(tmp.path());
    assert_eq!(String::from_utf8(f).unwrap().lines().count(), 1 + 60 * NUM_FEATURES);
    assert_eq!(String::from_utf8(sh).unwrap().lines().count(), 1 + 48 * NUM_FEATURES);
}

#[test]
fn interrupted_run_resumes_to_identical_output() {
    let tmp = tempfile::tempdir().unwrap();
    let full = small(&tmp.path().join("full"));
    runner::execute(&full, &RunOptions::default()).unwrap();

    let part = small(&tmp.path().join("part"));
    runner::execute(&part, &RunOptions::default()).unwrap();
    // simulate a kill halfway: drop every other cell file and the tables
    let cells_dir = part.output_dir.join(runner::CELLS_DIR);
    let mut names: Vec<_> = fs::read_dir(&cells_dir).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    for p in names.iter().step_by(2) {
        fs::remove_file(p).unwrap();
    }
    fs::remove_file(part.output_dir.join(runner::FEATURES_FILE)).unwrap();
    let s = runner::resume(&part, Some(3)).unwrap();
    assert_eq!(s.computed_cells, names.len().div_ceil(2));
    assert_eq!(outputs(&full.output_dir), outputs(&part.output_dir));

    let again = runner::resume(&part, None).unwrap();
    assert_eq!(again.computed_cells, 0);
    assert_eq!(again.skipped_cells, again.planned_cells);
    assert_eq!(outputs(&full.output_dir), outputs(&part.output_dir));
}

#[test]
fn changed_seed_is_refused_on_resume() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small(tmp.path());
    runner::execute(&cfg, &RunOptions::default()).unwrap();
    let mut other = cfg.clone();
    other.master_seed += 1;
    match runner::resume(&other, None) {
        Err(Error::Config { field, message }) => {
            assert_eq!(field, "fingerprint");
            assert!(message.contains("master_seed"));
        }
        r => panic!("expected a fingerprint error, got {r:?}"),
    }
    // a fresh run with the new seed is fine and replaces the old cells
    runner::execute(&other, &RunOptions::default()).unwrap();
}

#[test]
fn projected_cells_reuse_reference_objectives() {
    let cfg = small(Path::new("/unused"));
    let ws = Workspace::new(&cfg).unwrap();
    let cells = runner::plan(&cfg).unwrap();
    for p in cells.iter().filter(|c| !c.is_reference()) {
        let r = cells
            .iter()
            .find(|c| {
                c.is_reference()
                    && (c.function_id, c.instance_id, c.design_id, c.sample_size)
                        == (p.function_id, p.instance_id, p.design_id, p.sample_size)
            })
            .unwrap();
        let (a, b) = (ws.dataset(r).unwrap(), ws.dataset(p).unwrap());
        assert_eq!(a.objectives(), b.objectives());
        assert_eq!(b.dim(), p.projection.unwrap().reduced_dim);
    }
}

#[test]
fn unwritable_output_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = small(&blocker.join("out"));
    assert!(matches!(
        runner::execute(&cfg, &RunOptions::default()),
        Err(Error::Io { .. })
    ));
}

#[test]
fn zero_workers_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let r = runner::execute(
        &small(tmp.path()),
        &RunOptions {
            workers: Some(0),
            resume: false,
        },
    );
    assert!(matches!(r, Err(Error::Config { .. })));
}
