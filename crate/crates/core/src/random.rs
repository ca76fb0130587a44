//! Seeded random inputs.
//!
//! A [`FieldSpec`] describes a distribution of nonnegative values; the same
//! spec and seed always produce the same field, grid or boundary function.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use crate::fields::{BoundaryFunction, DyadicField, GridFunction};
use crate::geometry::{DyadicCube, TreeConfig};
use crate::{Error, Result};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_field(seed: u64, tree: TreeConfig, spec: &FieldSpec) -> Result<DyadicField> {
    spec.dyadic_field(tree, seed)
}

pub fn random_grid(seed: u64, tree: TreeConfig, m: usize, spec: &FieldSpec) -> Result<GridFunction> {
    spec.grid_function(tree, m, seed)
}

/// Distribution of the values of a random input.
///
/// Textual forms: `zero`, `constant:C`, `uniform:LO:HI`, `lognormal:MU:SIGMA`,
/// `sparse:DENSITY[:SIGMA]` and `delta(LEVEL;K1,...,Kn)`.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    Zero,
    Constant(f64),
    Uniform { lo: f64, hi: f64 },
    LogNormal { mu: f64, sigma: f64 },
    /// Log-normal `(0, sigma)` with probability `density`, zero otherwise.
    Sparse { density: f64, sigma: f64 },
    /// One on a single cube (on its Whitney region for grids, on the cube
    /// itself for boundary functions), zero elsewhere.
    Delta(DyadicCube),
}

impl FieldSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, value| Err(Error::Parameter { name, value });
        match *self {
            Self::Constant(c) if !(c.is_finite() && c >= 0.0) => bad("constant", c),
            Self::Uniform { lo, hi } if !(lo >= 0.0 && hi >= lo && hi.is_finite()) => {
                bad("uniform bounds", hi)
            }
            Self::LogNormal { mu, .. } if !mu.is_finite() => bad("mu", mu),
            Self::LogNormal { sigma, .. } | Self::Sparse { sigma, .. }
                if !(sigma.is_finite() && sigma >= 0.0) =>
            {
                bad("sigma", sigma)
            }
            Self::Sparse { density, .. } if !(0.0..=1.0).contains(&density) => {
                bad("density", density)
            }
            _ => Ok(()),
        }
    }

    fn sampler(&self, seed: u64) -> Result<Sampler> {
        self.validate()?;
        let log_normal = |mu, sigma| {
            LogNormal::new(mu, sigma).map_err(|_| Error::Parameter {
                name: "sigma",
                value: sigma,
            })
        };
        let kind = match *self {
            Self::Zero | Self::Delta(_) => Kind::Constant(0.0),
            Self::Constant(c) => Kind::Constant(c),
            Self::Uniform { lo, hi } => Kind::Uniform(lo, hi),
            Self::LogNormal { mu, sigma } => Kind::LogNormal(log_normal(mu, sigma)?),
            Self::Sparse { density, sigma } => Kind::Sparse(density, log_normal(0.0, sigma)?),
        };
        Ok(Sampler {
            rng: rng(seed),
            kind,
        })
    }

    fn delta_id(&self, tree: &TreeConfig) -> Result<Option<usize>> {
        match self {
            Self::Delta(cube) => tree.id(cube).map(Some),
            _ => Ok(None),
        }
    }

    pub fn dyadic_field(&self, tree: TreeConfig, seed: u64) -> Result<DyadicField> {
        let target = self.delta_id(&tree)?;
        let mut s = self.sampler(seed)?;
        let values = (0..tree.cube_count())
            .map(|id| match target {
                Some(t) => f64::from(u8::from(id == t)),
                None => s.sample(),
            })
            .collect();
        DyadicField::new(tree, values)
    }

    pub fn grid_function(&self, tree: TreeConfig, m: usize, seed: u64) -> Result<GridFunction> {
        let target = self.delta_id(&tree)?;
        let mut s = self.sampler(seed)?;
        GridFunction::from_cells(tree, m, |id, _, _| match target {
            Some(t) => f64::from(u8::from(id == t)),
            None => s.sample(),
        })
    }

    pub fn boundary_function(&self, tree: TreeConfig, seed: u64) -> Result<BoundaryFunction> {
        let below = self
            .delta_id(&tree)?
            .map(|id| tree.leaves_below(id));
        let mut s = self.sampler(seed)?;
        let values = (0..tree.leaf_count())
            .map(|leaf| match &below {
                Some(r) => f64::from(u8::from(r.contains(&leaf))),
                None => s.sample(),
            })
            .collect();
        BoundaryFunction::new(tree, values)
    }
}

enum Kind {
    Constant(f64),
    Uniform(f64, f64),
    LogNormal(LogNormal<f64>),
    Sparse(f64, LogNormal<f64>),
}

struct Sampler {
    rng: ChaCha8Rng,
    kind: Kind,
}

impl Sampler {
    fn sample(&mut self) -> f64 {
        match &self.kind {
            Kind::Constant(c) => *c,
            Kind::Uniform(lo, hi) => lo + (hi - lo) * self.rng.random::<f64>(),
            Kind::LogNormal(d) => d.sample(&mut self.rng),
            Kind::Sparse(density, d) => {
                if self.rng.random::<f64>() < *density {
                    d.sample(&mut self.rng)
                } else {
                    0.0
                }
            }
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "zero"),
            Self::Constant(c) => write!(f, "constant:{c}"),
            Self::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
            Self::LogNormal { mu, sigma } => write!(f, "lognormal:{mu}:{sigma}"),
            Self::Sparse { density, sigma } => write!(f, "sparse:{density}:{sigma}"),
            Self::Delta(cube) => {
                write!(f, "delta({};", cube.level)?;
                for (i, k) in cube.index.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{k}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownSpec(s.to_string());
        let s = s.trim();
        if let Some(body) = s.strip_prefix("delta(").and_then(|b| b.strip_suffix(')')) {
            let (level, index) = body.split_once(';').ok_or_else(unknown)?;
            let level = level.trim().parse().map_err(|_| unknown())?;
            let index = index
                .split(',')
                .map(|k| k.trim().parse::<u32>())
                .collect::<core::result::Result<Vec<_>, _>>()
                .map_err(|_| unknown())?;
            return Ok(Self::Delta(DyadicCube::new(level, index)));
        }
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default();
        let args = parts
            .map(|a| a.trim().parse::<f64>())
            .collect::<core::result::Result<Vec<_>, _>>()
            .map_err(|_| unknown())?;
        let spec = match (name, args.as_slice()) {
            ("zero", []) => Self::Zero,
            ("constant", [c]) => Self::Constant(*c),
            ("uniform", []) => Self::Uniform { lo: 0.0, hi: 1.0 },
            ("uniform", [lo, hi]) => Self::Uniform { lo: *lo, hi: *hi },
            ("lognormal", []) => Self::LogNormal { mu: 0.0, sigma: 1.0 },
            ("lognormal", [mu, sigma]) => Self::LogNormal {
                mu: *mu,
                sigma: *sigma,
            },
            ("sparse", [density]) => Self::Sparse {
                density: *density,
                sigma: 1.0,
            },
            ("sparse", [density, sigma]) => Self::Sparse {
                density: *density,
                sigma: *sigma,
            },
            _ => return Err(unknown()),
        };
        spec.validate()?;
        Ok(spec)
    }
}
