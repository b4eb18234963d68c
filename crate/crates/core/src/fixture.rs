//! Realizability facts for true lattices.
//!
//! A fixture lists parameter sets known not to be realized and generators
//! whose downward closure is known to be realized. These files are the only
//! source of existence information; nothing here infers it.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ParameterSet;

/// Environment variable that overrides the bundled fixture directory.
pub const DATA_ENV: &str = "OA_LATTICE_DATA";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizabilityFixture {
    pub runs: u64,
    pub nonexistent: Vec<ParameterSet>,
    pub realized_generators: Vec<ParameterSet>,
    #[serde(default)]
    pub provenance: BTreeMap<String, String>,
}

impl RealizabilityFixture {
    pub fn from_json(text: &str) -> Result<Self> {
        let fixture: RealizabilityFixture = serde_json::from_str(text)?;
        fixture.check_shape()?;
        Ok(fixture)
    }

    /// Local checks that do not need the lattice: run counts agree and no set
    /// is listed as both realized and nonexistent.
    pub fn check_shape(&self) -> Result<()> {
        let bad = |detail: String| Error::InconsistentFixture {
            runs: self.runs,
            detail,
        };
        for ps in self.nonexistent.iter().chain(&self.realized_generators) {
            if ps.runs() != self.runs {
                return Err(bad(format!("{ps} has the wrong run count")));
            }
        }
        if let Some(dup) = self
            .nonexistent
            .iter()
            .find(|ps| self.realized_generators.contains(ps))
        {
            return Err(bad(format!(
                "{dup} listed as both realized and nonexistent"
            )));
        }
        Ok(())
    }
}

const BUNDLED: &[&str] = &[
    include_str!("../data/fixtures/lambda_1.json"),
    include_str!("../data/fixtures/lambda_2.json"),
    include_str!("../data/fixtures/lambda_3.json"),
    include_str!("../data/fixtures/lambda_4.json"),
    include_str!("../data/fixtures/lambda_5.json"),
    include_str!("../data/fixtures/lambda_6.json"),
    include_str!("../data/fixtures/lambda_7.json"),
    include_str!("../data/fixtures/lambda_8.json"),
    include_str!("../data/fixtures/lambda_9.json"),
    include_str!("../data/fixtures/lambda_10.json"),
    include_str!("../data/fixtures/lambda_11.json"),
    include_str!("../data/fixtures/lambda_12.json"),
    include_str!("../data/fixtures/lambda_13.json"),
    include_str!("../data/fixtures/lambda_14.json"),
    include_str!("../data/fixtures/lambda_15.json"),
    include_str!("../data/fixtures/lambda_16.json"),
    include_str!("../data/fixtures/lambda_25.json"),
    include_str!("../data/fixtures/lambda_27.json"),
    include_str!("../data/fixtures/lambda_32.json"),
    include_str!("../data/fixtures/lambda_64.json"),
];

/// Fixtures keyed by run count.
#[derive(Debug, Clone, Default)]
pub struct FixtureSet {
    by_runs: HashMap<u64, RealizabilityFixture>,
}

impl FixtureSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// The fixtures compiled into the library.
    pub fn bundled() -> Self {
        let mut set = FixtureSet::new();
        for text in BUNDLED {
            let fixture = RealizabilityFixture::from_json(text).expect("bundled fixture is valid");
            set.insert(fixture);
        }
        set
    }

    /// Every `*.json` file in `dir`.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let mut set = FixtureSet::new();
        let mut paths: Vec<_> = fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        for path in paths {
            let text = fs::read_to_string(&path)?;
            set.insert(RealizabilityFixture::from_json(&text)?);
        }
        Ok(set)
    }

    /// `dir` if given, else `$OA_LATTICE_DATA`, else the bundled set.
    pub fn locate(dir: Option<&Path>) -> Result<Self> {
        if let Some(dir) = dir {
            return Self::from_dir(dir);
        }
        match std::env::var_os(DATA_ENV) {
            Some(dir) => Self::from_dir(Path::new(&dir)),
            None => Ok(Self::bundled()),
        }
    }

    pub fn insert(&mut self, fixture: RealizabilityFixture) {
        self.by_runs.insert(fixture.runs, fixture);
    }

    pub fn get(&self, runs: u64) -> Option<&RealizabilityFixture> {
        self.by_runs.get(&runs)
    }

    pub fn runs(&self) -> Vec<u64> {
        let mut r: Vec<u64> = self.by_runs.keys().copied().collect();
        r.sort_unstable();
        r
    }
}
