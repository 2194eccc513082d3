use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which sampler or design produced a node set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    CUE,
    HermiteEnsemble,
    ChainRule,
    Grid,
    Halton,
    IID,
    Herding,
    SBQ,
    GaussHermiteTensor,
}

const PROVENANCES: [Provenance; 9] = [
    Provenance::CUE,
    Provenance::HermiteEnsemble,
    Provenance::ChainRule,
    Provenance::Grid,
    Provenance::Halton,
    Provenance::IID,
    Provenance::Herding,
    Provenance::SBQ,
    Provenance::GaussHermiteTensor,
];

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PROVENANCES
            .iter()
            .copied()
            .find(|p| p.to_string() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown provenance `{s}`")))
    }
}

/// `N` points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NodeSetRepr", into = "NodeSetRepr")]
pub struct NodeSet {
    dim: usize,
    coords: Vec<f64>,
    provenance: Provenance,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
struct NodeSetRepr {
    provenance: Provenance,
    seed: u64,
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl TryFrom<NodeSetRepr> for NodeSet {
    type Error = Error;

    fn try_from(r: NodeSetRepr) -> Result<Self> {
        if let Some(p) = r.points.iter().find(|p| p.len() != r.dim) {
            return Err(Error::DimensionMismatch {
                expected: r.dim,
                found: p.len(),
            });
        }
        Ok(NodeSet::new(r.dim, r.points.concat(), r.provenance, r.seed))
    }
}

impl From<NodeSet> for NodeSetRepr {
    fn from(n: NodeSet) -> Self {
        NodeSetRepr {
            provenance: n.provenance,
            seed: n.seed,
            dim: n.dim,
            points: n.points().map(<[f64]>::to_vec).collect(),
        }
    }
}

impl NodeSet {
    pub fn new(dim: usize, coords: Vec<f64>, provenance: Provenance, seed: u64) -> Self {
        assert!(dim > 0 && coords.len().is_multiple_of(dim), "coordinates do not tile the dimension");
        Self {
            dim,
            coords,
            provenance,
            seed,
        }
    }

    pub fn empty(dim: usize, provenance: Provenance, seed: u64) -> Self {
        Self::new(dim, Vec::new(), provenance, seed)
    }

    /// One-dimensional node set.
    pub fn from_scalars(values: Vec<f64>, provenance: Provenance, seed: u64) -> Self {
        Self::new(1, values, provenance, seed)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Values of coordinate `k` across all points, sorted ascending.
    pub fn sorted_coordinate(&self, k: usize) -> Vec<f64> {
        let mut v: Vec<f64> = self.points().map(|p| p[k]).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn push(&mut self, x: &[f64]) {
        assert_eq!(x.len(), self.dim);
        self.coords.extend_from_slice(x);
    }

    /// Write as CSV: a `#` comment line with provenance and seed, a header
    /// `x0,x1,...`, then one row per point.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# provenance={} seed={}", self.provenance, self.seed)?;
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record((0..self.dim).map(|k| format!("x{k}")))?;
        for p in self.points() {
            wr.write_record(p.iter().map(|v| format!("{v:e}")))?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(mut r: R) -> Result<Self> {
        let mut first = String::new();
        r.read_line(&mut first)?;
        let meta = first
            .strip_prefix('#')
            .ok_or_else(|| Error::InvalidConfig("node CSV must start with a `#` comment".into()))?;
        let (mut provenance, mut seed) = (None, None);
        for kv in meta.split_whitespace() {
            match kv.split_once('=') {
                Some(("provenance", v)) => provenance = Some(v.parse()?),
                Some(("seed", v)) => {
                    seed = Some(v.parse().map_err(|_| Error::InvalidConfig(format!("bad seed `{v}`")))?)
                }
                _ => {}
            }
        }
        let provenance = provenance.ok_or_else(|| Error::InvalidConfig("missing provenance".into()))?;
        let seed = seed.ok_or_else(|| Error::InvalidConfig("missing seed".into()))?;
        let mut rd = csv::Reader::from_reader(r);
        let dim = rd.headers()?.len();
        let mut coords = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            for field in rec.iter() {
                coords.push(
                    field
                        .trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidConfig(format!("bad coordinate `{field}`")))?,
                );
            }
        }
        if dim == 0 || coords.len() % dim != 0 {
            return Err(Error::InvalidConfig("ragged node CSV".into()));
        }
        Ok(Self::new(dim, coords, provenance, seed))
    }
}
