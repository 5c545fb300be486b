//! TOML run configuration. Unknown keys are rejected at every level.
//!
//! ```toml
//! name = "h2-curve"
//! seed = 0
//! workers = 1
//!
//! [molecule]
//! xyz = """
//! 2
//! h2
//! H 0 0 0
//! H 0 0 {r}
//! """
//!
//! [integrals]
//! basis = "sto-3g"          # or: fcidump = "data/h2_{r}.fcidump"
//!
//! [pno]
//! qubits = 4
//!
//! [ansatz]
//! kind = "upccgsd"
//!
//! [scan]
//! values = [0.5, 0.7, 0.9]
//! ```
//!
//! `{r}` in the XYZ text or FCIDUMP path is replaced by the scan coordinate
//! (angstrom for geometries).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ansatz::AnsatzKind;
use crate::error::{Error, Result};
use crate::molint::{parse_xyz_with_charge, BasisName, Molecule};
use crate::optimizer::VqeOptions;
use crate::pno::Orthonormalization;
use crate::scf::ScfOptions;

pub const PLACEHOLDER: &str = "{r}";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Wall-clock timestamps in the metadata; off keeps outputs byte-identical.
    #[serde(default)]
    pub record_timestamps: bool,
    #[serde(default)]
    pub molecule: Option<MoleculeSpec>,
    pub integrals: IntegralsSpec,
    #[serde(default)]
    pub scf: ScfOptions,
    #[serde(default)]
    pub pno: PnoSpec,
    #[serde(default)]
    pub ansatz: AnsatzSpec,
    #[serde(default)]
    pub optimizer: VqeOptions,
    #[serde(default)]
    pub scan: Option<ScanSpec>,
    #[serde(default)]
    pub reference: Option<ReferenceSpec>,
}

fn default_name() -> String {
    "run".into()
}

fn default_workers() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculeSpec {
    /// Inline XYZ text.
    #[serde(default)]
    pub xyz: Option<String>,
    /// Path to an XYZ file.
    #[serde(default)]
    pub file: Option<PathBuf>,
    #[serde(default)]
    pub charge: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegralsSpec {
    /// Built-in basis name, e.g. `sto-3g`, `6-31g`, `even-tempered:10:0.1:2.5`.
    #[serde(default)]
    pub basis: Option<String>,
    /// FCIDUMP path (template).
    #[serde(default)]
    pub fcidump: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PnoSpec {
    /// Qubit budget `N_q`; absent means all orbitals are kept and no PNOs are built.
    #[serde(default)]
    pub qubits: Option<usize>,
    #[serde(default)]
    pub diagonal_only: bool,
    /// Occupied orbitals folded into the core before MP2.
    #[serde(default)]
    pub freeze: Vec<usize>,
    #[serde(default)]
    pub orthonormalization: Orthonormalization,
    #[serde(default)]
    pub occupation_threshold: Option<f64>,
}

impl Default for PnoSpec {
    fn default() -> Self {
        Self {
            qubits: None,
            diagonal_only: false,
            freeze: Vec::new(),
            orthonormalization: Orthonormalization::Cholesky,
            occupation_threshold: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSpec {
    pub kind: AnsatzKind,
    /// Repetitions of the UpCCGSD layer.
    #[serde(default = "one")]
    pub layers: usize,
}

fn one() -> usize {
    1
}

impl Default for AnsatzSpec {
    fn default() -> Self {
        Self { kind: AnsatzKind::Upccgsd, layers: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub values: Vec<f64>,
}

/// External reference energies for error metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSpec {
    /// CSV with `coordinate,energy` rows.
    #[serde(default)]
    pub file: Option<PathBuf>,
    /// FCIDUMP path template; its FCI energy is the reference.
    #[serde(default)]
    pub fcidump: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IntegralSource {
    Builtin(BasisName),
    Fcidump(String),
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_toml(&text)?;
        // relative paths inside the file are resolved against its directory
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            cfg.resolve_relative(dir);
        }
        Ok(cfg)
    }

    fn resolve_relative(&mut self, dir: &Path) {
        let fix = |p: &mut String| {
            if Path::new(p).is_relative() {
                *p = dir.join(&*p).to_string_lossy().into_owned();
            }
        };
        if let Some(f) = self.integrals.fcidump.as_mut() {
            fix(f);
        }
        if let Some(m) = self.molecule.as_mut() {
            if let Some(f) = m.file.as_mut().filter(|f| f.is_relative()) {
                *f = dir.join(&*f);
            }
        }
        if let Some(r) = self.reference.as_mut() {
            if let Some(f) = r.fcidump.as_mut() {
                fix(f);
            }
            if let Some(f) = r.file.as_mut().filter(|f| f.is_relative()) {
                *f = dir.join(&*f);
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let source = self.integral_source()?;
        if let IntegralSource::Builtin(_) = source {
            match &self.molecule {
                None => return bad("a built-in basis needs a [molecule] section".into()),
                Some(m) if m.xyz.is_some() == m.file.is_some() => {
                    return bad("[molecule] needs exactly one of 'xyz' or 'file'".into())
                }
                _ => {}
            }
        }
        if let Some(q) = self.pno.qubits {
            if q % 2 != 0 {
                return bad(format!("qubit budget {q} must be even"));
            }
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if self.ansatz.layers == 0 {
            return bad("ansatz layers must be at least 1".into());
        }
        if let Some(scan) = &self.scan {
            if scan.values.is_empty() {
                return bad("scan values must not be empty".into());
            }
            if scan.values.iter().any(|v| !v.is_finite()) {
                return bad("scan values must be finite".into());
            }
            if scan.values.windows(2).any(|w| w[1] <= w[0]) {
                return bad("scan values must be strictly increasing".into());
            }
            if !self.has_placeholder() {
                return bad(format!("a scan needs a '{PLACEHOLDER}' placeholder in the geometry or FCIDUMP path"));
            }
        }
        if let Some(r) = &self.reference {
            if r.file.is_some() == r.fcidump.is_some() {
                return bad("[reference] needs exactly one of 'file' or 'fcidump'".into());
            }
        }
        Ok(())
    }

    pub fn integral_source(&self) -> Result<IntegralSource> {
        match (&self.integrals.basis, &self.integrals.fcidump) {
            (Some(b), None) => Ok(IntegralSource::Builtin(b.parse()?)),
            (None, Some(f)) => Ok(IntegralSource::Fcidump(f.clone())),
            _ => Err(Error::Config("[integrals] needs exactly one of 'basis' or 'fcidump'".into())),
        }
    }

    fn has_placeholder(&self) -> bool {
        let in_xyz = self.molecule.as_ref().and_then(|m| m.xyz.as_ref()).is_some_and(|x| x.contains(PLACEHOLDER));
        let in_file = self.molecule.as_ref().is_some_and(|m| m.file.is_some());
        let in_dump = self.integrals.fcidump.as_ref().is_some_and(|f| f.contains(PLACEHOLDER));
        in_xyz || in_file || in_dump
    }

    /// Geometry at scan coordinate `r` (ignored without a placeholder).
    pub fn molecule_at(&self, r: Option<f64>) -> Result<Molecule> {
        let spec = self.molecule.as_ref().ok_or_else(|| Error::Config("no [molecule] section".into()))?;
        let text = match (&spec.xyz, &spec.file) {
            (Some(x), None) => x.clone(),
            (None, Some(f)) => std::fs::read_to_string(f)?,
            _ => return Err(Error::Config("[molecule] needs exactly one of 'xyz' or 'file'".into())),
        };
        parse_xyz_with_charge(substitute(text.trim_start(), r).as_str(), spec.charge)
    }

    pub fn scan_values(&self) -> Vec<Option<f64>> {
        match &self.scan {
            Some(s) => s.values.iter().map(|v| Some(*v)).collect(),
            None => vec![None],
        }
    }

    /// SHA-256 of the canonical JSON echo of the configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// Replaces every `{r}` by the shortest round-trip rendering of `r`.
pub fn substitute(template: &str, r: Option<f64>) -> String {
    match r {
        Some(v) => template.replace(PLACEHOLDER, &format!("{v}")),
        None => template.to_string(),
    }
}
