use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use freearr::graphic::{fixture, graphic_arrangement, Fixture, Graph};
use freearr::io::{parse_linear_forms, AnyArrangement, ArrangementFile};
use freearr::rootsys::{Ideal, RootSystem};

/// Where an arrangement comes from. Exactly one source is allowed.
#[derive(Args, Debug, Clone)]
pub struct ArrInput {
    /// Arrangement JSON file.
    #[arg(long, group = "source")]
    pub file: Option<PathBuf>,
    /// Plain-text linear forms, e.g. `x1; x2; x1 - x2`.
    #[arg(long, group = "source")]
    pub forms: Option<PathBuf>,
    /// Ambient dimension for `--forms` (default: highest variable used).
    #[arg(long, requires = "forms")]
    pub dim: Option<usize>,
    /// Weyl arrangement of a root system type such as `B3`.
    #[arg(long = "type", group = "source")]
    pub root_type: Option<String>,
    /// Restrict `--type` to the ideal generated by these roots, given by
    /// simple-root coefficients: `1,1,0;0,1,1`. An empty string is the empty
    /// ideal.
    #[arg(long, requires = "root_type")]
    pub generators: Option<String>,
    /// Graph JSON file `{"n": .., "edges": [[a, b], ..]}`.
    #[arg(long, group = "source")]
    pub graph: Option<PathBuf>,
    /// Embedded graph fixture.
    #[arg(long, group = "source")]
    pub fixture: Option<Fixture>,
}

/// A loaded arrangement plus what is known about its structure.
pub struct Loaded {
    pub arr: AnyArrangement,
    /// Root-height partition for root system input.
    pub height_partition: Option<Vec<Vec<usize>>>,
    pub graph: Option<Graph>,
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing graph {}", path.display()))
}

pub fn root_system(name: &str) -> Result<RootSystem> {
    Ok(RootSystem::new(name.parse()?))
}

/// Parse `1,1,0;0,1,1` into coefficient vectors.
pub fn parse_roots(text: &str) -> Result<Vec<Vec<i64>>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|r| {
            r.split(',')
                .map(|x| x.trim().parse::<i64>().with_context(|| format!("bad root coefficient {x:?}")))
                .collect()
        })
        .collect()
}

pub fn ideal(rs: &RootSystem, generators: Option<&str>) -> Result<Ideal> {
    match generators {
        None => Ok(rs.full_ideal()),
        Some(g) => Ok(rs.ideal_from_generators(&parse_roots(g)?)?),
    }
}

pub fn parse_indices(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|x| x.parse::<usize>().with_context(|| format!("bad index {x:?}")))
        .collect()
}

impl ArrInput {
    pub fn load(&self) -> Result<Loaded> {
        let plain = |arr| Loaded { arr, height_partition: None, graph: None };
        if let Some(p) = &self.file {
            let file: ArrangementFile =
                serde_json::from_str(&read(p)?).with_context(|| format!("parsing {}", p.display()))?;
            return Ok(plain(file.to_arrangement()?));
        }
        if let Some(p) = &self.forms {
            let parsed = parse_linear_forms(&read(p)?, self.dim)?;
            for w in &parsed.warnings {
                eprintln!("warning: {w}");
            }
            return Ok(plain(AnyArrangement::Rational(parsed.arrangement)));
        }
        if let Some(t) = &self.root_type {
            let rs = root_system(t)?;
            let ideal = ideal(&rs, self.generators.as_deref())?;
            return Ok(Loaded {
                arr: AnyArrangement::Rational(rs.ideal_arrangement(&ideal)),
                height_partition: Some(rs.root_height_partition(&ideal)),
                graph: None,
            });
        }
        let g = match (&self.graph, self.fixture) {
            (Some(p), _) => read_graph(p)?,
            (None, Some(f)) => fixture(f),
            (None, None) => bail!("no arrangement given; use one of --file, --forms, --type, --graph, --fixture"),
        };
        Ok(Loaded { arr: AnyArrangement::Rational(graphic_arrangement(&g)), height_partition: None, graph: Some(g) })
    }
}
