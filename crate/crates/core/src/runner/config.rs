//! Experiment configuration: a flat `key = value` text file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::suite::NUM_FUNCTIONS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ElaSeedPolicy {
    /// The feature seed of each cell is that cell's own seed.
    #[default]
    DerivedPerCell,
}

impl ElaSeedPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            ElaSeedPolicy::DerivedPerCell => "derived-per-cell",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub dimension: usize,
    pub function_ids: Vec<u32>,
    pub instance_ids: Vec<u32>,
    pub sample_sizes: Vec<usize>,
    pub designs_per_size: u32,
    pub reduced_dims: Vec<usize>,
    pub embeddings_per_dim: u32,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub ela_seed_policy: ElaSeedPolicy,
}

const KEYS: [&str; 10] = [
    "dimension",
    "function_ids",
    "instance_ids",
    "sample_sizes",
    "designs_per_size",
    "reduced_dims",
    "embeddings_per_dim",
    "master_seed",
    "output_dir",
    "ela_seed_policy",
];

fn scalar<T: FromStr>(field: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::config(field, format!("cannot parse `{raw}`")))
}

fn list<T: FromStr>(field: &str, raw: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| scalar(field, s))
        .collect()
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

fn check_list<T: Ord + Copy>(field: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::config(field, "list is empty"));
    }
    let mut s = v.to_vec();
    s.sort_unstable();
    if s.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::config(field, "list contains duplicates"));
    }
    Ok(())
}

impl ExperimentConfig {
    /// The small default: two functions, two instances, three designs of 200
    /// points in 20 dimensions, two embeddings at d = 2 and d = 10.
    pub fn desk(output_dir: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            dimension: 20,
            function_ids: vec![1, 16],
            instance_ids: vec![0, 1],
            sample_sizes: vec![200],
            designs_per_size: 3,
            reduced_dims: vec![2, 10],
            embeddings_per_dim: 2,
            master_seed: 20240601,
            output_dir: output_dir.into(),
            ela_seed_policy: ElaSeedPolicy::DerivedPerCell,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(Error::config("dimension", "must be at least 2"));
        }
        check_list("function_ids", &self.function_ids)?;
        check_list("instance_ids", &self.instance_ids)?;
        check_list("sample_sizes", &self.sample_sizes)?;
        check_list("reduced_dims", &self.reduced_dims)?;
        if let Some(f) = self.function_ids.iter().find(|&&f| !(1..=NUM_FUNCTIONS).contains(&f)) {
            return Err(Error::config(
                "function_ids",
                format!("{f} is outside 1..={NUM_FUNCTIONS}"),
            ));
        }
        if let Some(s) = self.sample_sizes.iter().find(|&&s| s < self.dimension + 2) {
            return Err(Error::config(
                "sample_sizes",
                format!("{s} is below dimension + 2 = {}", self.dimension + 2),
            ));
        }
        if let Some(d) = self.reduced_dims.iter().find(|&&d| d == 0 || d >= self.dimension) {
            return Err(Error::config(
                "reduced_dims",
                format!("{d} is not in 1..{}", self.dimension),
            ));
        }
        if self.designs_per_size == 0 {
            return Err(Error::config("designs_per_size", "must be positive"));
        }
        if self.embeddings_per_dim == 0 {
            return Err(Error::config("embeddings_per_dim", "must be positive"));
        }
        if self.output_dir.as_os_str().is_empty() {
            return Err(Error::config("output_dir", "is empty"));
        }
        Ok(())
    }

    /// Parses config text. Relative `output_dir` values are resolved against
    /// `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut raw: BTreeMap<&str, &str> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}", i + 1), "expected `key = value`"))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(Error::config(k, "unknown key"));
            }
            if raw.insert(k, v.trim()).is_some() {
                return Err(Error::config(k, "given more than once"));
            }
        }
        let get = |k: &str| raw.get(k).copied().ok_or_else(|| Error::config(k, "missing"));
        let ela_seed_policy = match raw.get("ela_seed_policy").copied() {
            None | Some("derived-per-cell") => ElaSeedPolicy::DerivedPerCell,
            Some(other) => {
                return Err(Error::config(
                    "ela_seed_policy",
                    format!("unsupported policy `{other}`; only `derived-per-cell` exists"),
                ))
            }
        };
        let out = PathBuf::from(get("output_dir")?);
        let cfg = ExperimentConfig {
            dimension: scalar("dimension", get("dimension")?)?,
            function_ids: list("function_ids", get("function_ids")?)?,
            instance_ids: list("instance_ids", get("instance_ids")?)?,
            sample_sizes: list("sample_sizes", get("sample_sizes")?)?,
            designs_per_size: scalar("designs_per_size", get("designs_per_size")?)?,
            reduced_dims: list("reduced_dims", get("reduced_dims")?)?,
            embeddings_per_dim: scalar("embeddings_per_dim", get("embeddings_per_dim")?)?,
            master_seed: scalar("master_seed", get("master_seed")?)?,
            output_dir: if out.is_absolute() { out } else { base_dir.join(out) },
            ela_seed_policy,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Every field that influences results, one `key = value` per line.
    /// `output_dir` is left out so a run directory can be moved.
    pub fn fingerprint(&self) -> String {
        format!(
            "dimension = {}\nfunction_ids = {}\ninstance_ids = {}\nsample_sizes = {}\n\
             designs_per_size = {}\nreduced_dims = {}\nembeddings_per_dim = {}\n\
             master_seed = {}\nela_seed_policy = {}\n",
            self.dimension,
            join(&self.function_ids),
            join(&self.instance_ids),
            join(&self.sample_sizes),
            self.designs_per_size,
            join(&self.reduced_dims),
            self.embeddings_per_dim,
            self.master_seed,
            self.ela_seed_policy.as_str(),
        )
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}output_dir = {}", self.fingerprint(), self.output_dir.display())
    }
}

/// Field names whose lines differ between two fingerprints.
pub fn fingerprint_diff(stored: &str, current: &str) -> Vec<String> {
    let parse = |s: &str| -> BTreeMap<String, String> {
        s.lines()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect()
    };
    let (a, b) = (parse(stored), parse(current));
    let mut keys: Vec<String> = a.keys().chain(b.keys()).cloned().collect();
    keys.sort();
    keys.dedup();
    keys.into_iter().filter(|k| a.get(k) != b.get(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_of(e: Error) -> String {
        match e {
            Error::Config { field, .. } => field,
            other => panic!("expected config error, got {other}"),
        }
    }

    #[test]
    fn display_round_trips() {
        let cfg = ExperimentConfig::desk("/tmp/out");
        assert_eq!(ExperimentConfig::parse(&cfg.to_string(), Path::new("/")).unwrap(), cfg);
    }

    #[test]
    fn relative_output_dir_resolves_against_base() {
        let text = ExperimentConfig::desk("/x")
            .to_string()
            .replace("output_dir = /x", "output_dir = runs/a");
        let cfg = ExperimentConfig::parse(&text, Path::new("/cfg")).unwrap();
        assert_eq!(cfg.output_dir, PathBuf::from("/cfg/runs/a"));
    }

    #[test]
    fn invariant_violations_name_the_field() {
        let mut c = ExperimentConfig::desk("/o");
        c.function_ids.clear();
        assert_eq!(field_of(c.validate().unwrap_err()), "function_ids");
        let mut c = ExperimentConfig::desk("/o");
        c.reduced_dims = vec![20];
        assert_eq!(field_of(c.validate().unwrap_err()), "reduced_dims");
        let mut c = ExperimentConfig::desk("/o");
        c.sample_sizes = vec![21];
        assert_eq!(field_of(c.validate().unwrap_err()), "sample_sizes");
        let mut c = ExperimentConfig::desk("/o");
        c.function_ids = vec![25];
        assert_eq!(field_of(c.validate().unwrap_err()), "function_ids");
    }

    #[test]
    fn parse_errors() {
        let base = ExperimentConfig::desk("/o").to_string();
        let e = ExperimentConfig::parse(&format!("{base}colour = red\n"), Path::new("/")).unwrap_err();
        assert_eq!(field_of(e), "colour");
        let e = ExperimentConfig::parse(&base.replace("master_seed = 20240601\n", ""), Path::new("/")).unwrap_err();
        assert_eq!(field_of(e), "master_seed");
        let e =
            ExperimentConfig::parse(&base.replace("dimension = 20", "dimension = twenty"), Path::new("/")).unwrap_err();
        assert_eq!(field_of(e), "dimension");
    }

    #[test]
    fn fingerprint_diff_names_changed_fields() {
        let a = ExperimentConfig::desk("/o");
        let mut b = a.clone();
        b.master_seed += 1;
        b.output_dir = "/elsewhere".into();
        assert_eq!(
            fingerprint_diff(&a.fingerprint(), &b.fingerprint()),
            vec!["master_seed"]
        );
    }
}
