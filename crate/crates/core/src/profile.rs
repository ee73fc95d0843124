use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mono::MAX_DIM;

/// Truncation bounds shared by every value computed in one run.
///
/// Base series keep `ℏ^k x^a` with `k ≤ N` and `|a| ≤ Dx`. Weyl elements keep
/// `ℏ^k x^a y^b dx^S` with `2k + |a| + |b| + |S| ≤ Dy` (and `k ≤ N`); see [`crate::weyl`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Profile {
    pub hbar_order: u32,
    pub x_degree: u32,
    pub y_degree: u32,
    pub dim: usize,
}

impl Profile {
    pub fn new(hbar_order: u32, x_degree: u32, y_degree: u32, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Validation("dim must be at least 1".into()));
        }
        if dim > MAX_DIM {
            return Err(Error::DimensionTooLarge(dim));
        }
        Ok(Profile {
            hbar_order,
            x_degree,
            y_degree,
            dim,
        })
    }

    /// N=6, Dx=4, Dy=6 on ℝ².
    pub fn desk() -> Self {
        Profile {
            hbar_order: 6,
            x_degree: 4,
            y_degree: 6,
            dim: 2,
        }
    }

    pub fn with_dim(self, dim: usize) -> Self {
        Profile { dim, ..self }
    }

    pub fn with_hbar(self, n: u32) -> Self {
        Profile {
            hbar_order: n,
            ..self
        }
    }

    pub fn with_x(self, dx: u32) -> Self {
        Profile {
            x_degree: dx,
            ..self
        }
    }

    pub fn with_y(self, dy: u32) -> Self {
        Profile {
            y_degree: dy,
            ..self
        }
    }

    /// Weight bound for Weyl elements.
    pub fn weyl_bound(&self) -> u32 {
        self.y_degree
    }

    /// Bounds the CLI accepts.
    pub fn check_cli_bounds(&self) -> Result<()> {
        if self.hbar_order > 16 || self.x_degree > 8 || self.y_degree > 10 {
            return Err(Error::Validation(format!(
                "profile {self} exceeds N ≤ 16, Dx ≤ 8, Dy ≤ 10"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            self.hbar_order, self.x_degree, self.y_degree, self.dim
        )
    }
}

impl FromStr for Profile {
    type Err = Error;

    /// `N,Dx,Dy,dim`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("profile `{s}` must be N,Dx,Dy,dim")));
        }
        let num = |p: &str| {
            p.parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad profile field `{p}`")))
        };
        Profile::new(
            num(parts[0])?,
            num(parts[1])?,
            num(parts[2])?,
            num(parts[3])? as usize,
        )
    }
}
