//! Subsystem discovery and scenario assembly.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::changes::DetectorConfig;
use crate::srcmodel::VersionLabel;

pub const DEFAULT_MARKER: &str = "AndroidManifest.xml";
pub const DEFAULT_EXTENSION: &str = ".java";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{label} root {} does not exist or is not a directory", path.display())]
    MissingRoot { label: VersionLabel, path: PathBuf },
    #[error("{name} must be in (0, 1], got {value}")]
    Threshold { name: &'static str, value: f64 },
    #[error("cannot scan {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// One scenario file. Relative roots are resolved against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario_id: String,
    pub ao_root: PathBuf,
    pub an_root: PathBuf,
    pub cm_root: PathBuf,
    #[serde(default = "default_marker")]
    pub marker_file: String,
    #[serde(default = "default_extension")]
    pub source_extension: String,
    #[serde(default = "default_sim")]
    pub sim_threshold: f64,
    #[serde(default = "default_inline")]
    pub inline_threshold: f64,
}

fn default_marker() -> String {
    DEFAULT_MARKER.to_string()
}

fn default_extension() -> String {
    DEFAULT_EXTENSION.to_string()
}

fn default_sim() -> f64 {
    DetectorConfig::default().sim_threshold
}

fn default_inline() -> f64 {
    DetectorConfig::default().inline_threshold
}

impl ScenarioConfig {
    /// Parse a config document; relative roots are joined onto `base`.
    pub fn parse(text: &str, base: &Path, origin: &Path) -> Result<Self, ConfigError> {
        let mut cfg: ScenarioConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        for root in [&mut cfg.ao_root, &mut cfg.an_root, &mut cfg.cm_root] {
            if root.is_relative() {
                *root = base.join(&*root);
            }
        }
        if !cfg.source_extension.starts_with('.') {
            cfg.source_extension.insert(0, '.');
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base, path)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [
            ("sim_threshold", self.sim_threshold),
            ("inline_threshold", self.inline_threshold),
        ] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(ConfigError::Threshold { name, value });
            }
        }
        Ok(())
    }

    pub fn root(&self, label: VersionLabel) -> &Path {
        match label {
            VersionLabel::Ao => &self.ao_root,
            VersionLabel::An => &self.an_root,
            VersionLabel::Cm => &self.cm_root,
        }
    }

    pub fn detector(&self) -> DetectorConfig {
        DetectorConfig {
            sim_threshold: self.sim_threshold,
            inline_threshold: self.inline_threshold,
            refactorings: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemTriple {
    /// `/`-separated path under the roots; `.` for a root that is itself a subsystem.
    pub relative_path: String,
    pub present_in: BTreeSet<VersionLabel>,
}

impl SubsystemTriple {
    pub fn is_complete(&self) -> bool {
        self.present_in.len() == 3
    }

    pub fn dir(&self, root: &Path) -> PathBuf {
        if self.relative_path == "." {
            root.to_path_buf()
        } else {
            root.join(&self.relative_path)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonScenario {
    pub config: ScenarioConfig,
    /// Every base subsystem, complete or not.
    pub subsystems: Vec<SubsystemTriple>,
}

impl ComparisonScenario {
    pub fn analyzed(&self) -> impl Iterator<Item = &SubsystemTriple> {
        self.subsystems.iter().filter(|s| s.is_complete())
    }

    pub fn excluded(&self) -> impl Iterator<Item = &SubsystemTriple> {
        self.subsystems.iter().filter(|s| !s.is_complete())
    }
}

/// Every directory under `root` holding `marker`, sorted, nested ones included.
pub fn discover_subsystems(root: &Path, marker: &str) -> Result<Vec<String>, ConfigError> {
    let mut out = Vec::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| ConfigError::Io {
            path: e.path().unwrap_or(root).to_path_buf(),
            source: e
                .into_io_error()
                .unwrap_or_else(|| std::io::Error::other("filesystem loop")),
        })?;
        if !entry.file_type().is_dir() || !entry.path().join(marker).is_file() {
            continue;
        }
        let rel = entry.path().strip_prefix(root).unwrap_or(entry.path());
        let rel: Vec<String> = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect();
        out.push(if rel.is_empty() {
            ".".to_string()
        } else {
            rel.join("/")
        });
    }
    out.sort();
    Ok(out)
}

/// Discover base subsystems and check which exist in the other two roots.
pub fn assemble_scenario(config: &ScenarioConfig) -> Result<ComparisonScenario, ConfigError> {
    for label in [VersionLabel::Ao, VersionLabel::An, VersionLabel::Cm] {
        let root = config.root(label);
        if !root.is_dir() {
            return Err(ConfigError::MissingRoot {
                label,
                path: root.to_path_buf(),
            });
        }
    }
    let mut subsystems = Vec::new();
    for rel in discover_subsystems(&config.ao_root, &config.marker_file)? {
        let mut t = SubsystemTriple {
            relative_path: rel,
            present_in: BTreeSet::from([VersionLabel::Ao]),
        };
        for label in [VersionLabel::An, VersionLabel::Cm] {
            if t.dir(config.root(label))
                .join(&config.marker_file)
                .is_file()
            {
                t.present_in.insert(label);
            }
        }
        if !t.is_complete() {
            log::info!(
                "{}: excluding {} (present in {:?})",
                config.scenario_id,
                t.relative_path,
                t.present_in
            );
        }
        subsystems.push(t);
    }
    Ok(ComparisonScenario {
        config: config.clone(),
        subsystems,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn touch(root: &Path, rel: &str) {
        let p = root.join(rel);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, "").unwrap();
    }

    #[test]
    fn discovery() {
        let dir = tempfile::tempdir().unwrap();
        assert!(discover_subsystems(dir.path(), DEFAULT_MARKER)
            .unwrap()
            .is_empty());
        touch(dir.path(), "a/AndroidManifest.xml");
        touch(dir.path(), "a/b/AndroidManifest.xml");
        touch(dir.path(), "c/src/X.java");
        assert_eq!(
            discover_subsystems(dir.path(), DEFAULT_MARKER).unwrap(),
            ["a", "a/b"]
        );
        touch(dir.path(), "AndroidManifest.xml");
        assert_eq!(
            discover_subsystems(dir.path(), DEFAULT_MARKER).unwrap(),
            [".", "a", "a/b"]
        );
    }

    #[test]
    fn config_with_release_names() {
        let text = r#"
            scenario_id = "CS1"
            ao_root = "4.2.2_r1"
            an_root = "4.3.1_r1"
            cm_root = "cm-10.1"
        "#;
        let cfg = ScenarioConfig::parse(text, Path::new("/data"), Path::new("cs1.toml")).unwrap();
        assert_eq!(cfg.scenario_id, "CS1");
        assert_eq!(cfg.ao_root, Path::new("/data/4.2.2_r1"));
        assert_eq!(cfg.an_root, Path::new("/data/4.3.1_r1"));
        assert_eq!(cfg.cm_root, Path::new("/data/cm-10.1"));
        assert_eq!(cfg.marker_file, DEFAULT_MARKER);
        assert_eq!(cfg.source_extension, ".java");
        assert_eq!((cfg.sim_threshold, cfg.inline_threshold), (0.6, 0.5));
    }

    #[test]
    fn bad_configs() {
        let base = Path::new("/");
        let origin = Path::new("x.toml");
        assert!(matches!(
            ScenarioConfig::parse("scenario_id = 1", base, origin),
            Err(ConfigError::Parse { .. })
        ));
        let text = "scenario_id='x'\nao_root='a'\nan_root='b'\ncm_root='c'\nsim_threshold=0.0";
        assert!(matches!(
            ScenarioConfig::parse(text, base, origin),
            Err(ConfigError::Threshold { .. })
        ));
        let text = "scenario_id='x'\nao_root='a'\nan_root='b'\ncm_root='c'\ncolour='red'";
        assert!(matches!(
            ScenarioConfig::parse(text, base, origin),
            Err(ConfigError::Parse { .. })
        ));
    }

    #[test]
    fn assemble_excludes_missing_subsystems() {
        let dir = tempfile::tempdir().unwrap();
        for v in ["ao", "an", "cm"] {
            touch(dir.path(), &format!("{v}/apps/Mail/AndroidManifest.xml"));
        }
        touch(dir.path(), "ao/apps/Old/AndroidManifest.xml");
        touch(dir.path(), "an/apps/Old/AndroidManifest.xml");
        touch(dir.path(), "cm/apps/New/AndroidManifest.xml");
        let text = "scenario_id='t'\nao_root='ao'\nan_root='an'\ncm_root='cm'";
        let cfg = ScenarioConfig::parse(text, dir.path(), Path::new("t.toml")).unwrap();
        let sc = assemble_scenario(&cfg).unwrap();
        assert_eq!(sc.subsystems.len(), 2);
        assert_eq!(
            sc.analyzed()
                .map(|s| s.relative_path.as_str())
                .collect::<Vec<_>>(),
            ["apps/Mail"]
        );
        let old = sc.excluded().next().unwrap();
        assert_eq!(old.relative_path, "apps/Old");
        assert_eq!(
            old.present_in,
            BTreeSet::from([VersionLabel::Ao, VersionLabel::An])
        );
    }

    #[test]
    fn missing_root_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "ao/AndroidManifest.xml");
        touch(dir.path(), "an/AndroidManifest.xml");
        let text = "scenario_id='t'\nao_root='ao'\nan_root='an'\ncm_root='cm'";
        let cfg = ScenarioConfig::parse(text, dir.path(), Path::new("t.toml")).unwrap();
        let err = assemble_scenario(&cfg).unwrap_err();
        assert!(matches!(
            err,
            ConfigError::MissingRoot {
                label: VersionLabel::Cm,
                ..
            }
        ));
        assert!(err.to_string().contains("cm"));
    }
}
