//! TOML run configuration for `verify`.
//!
//! ```toml
//! name = "square-with-hole"      # optional report label
//! preset = "square-with-disk-hole"  # or an explicit [domain] table
//! alpha_mode = "inscribed"       # or "equal-measure"
//! h = 0.08                       # coarsest mesh size; levels h, h/2, h/4
//! trial = true                   # trial-space corroboration
//!
//! [domain]
//! dim = 2
//! outer = { kind = "boxed", center = [0.0, 0.0], half = [1.0, 1.0] }
//! holes = [{ kind = "ball", center = [0.0, 0.0], radius = 0.3 }]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{examples, AlphaMode, Domain};
use crate::trial::VerifyOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: Option<String>,
    pub preset: Option<String>,
    pub domain: Option<Domain>,
    #[serde(default)]
    pub alpha_mode: AlphaMode,
    /// Coarsest absolute mesh size; default `0.04 sqrt |Omega|`.
    pub h: Option<f64>,
    /// Number of refinement levels, default 3.
    pub levels: Option<usize>,
    #[serde(default = "default_true")]
    pub trial: bool,
}

fn default_true() -> bool {
    true
}

/// Names accepted by `preset`.
pub const PRESETS: &[&str] = &[
    "disk",
    "annulus",
    "unit-square",
    "square-with-disk-hole",
    "square-with-square-hole",
    "octagon",
    "l4-ball",
    "rectangle-sqrt3",
    "eccentric-annulus",
    "two-hole-disk",
];

pub fn preset(name: &str) -> Result<Domain> {
    Ok(match name {
        "disk" => examples::disk(1.0),
        "annulus" => examples::annulus(0.25, 1.0),
        "unit-square" => examples::rectangle(1.0, 1.0),
        "square-with-disk-hole" => examples::square_with_disk_hole(2.0, 0.3),
        "square-with-square-hole" => examples::square_with_square_hole(2.0, 0.6),
        "octagon" => examples::unit_octagon(),
        "l4-ball" => examples::lp_ball(4.0, 1.0),
        "rectangle-sqrt3" => examples::rectangle_sqrt3(),
        "eccentric-annulus" => examples::eccentric_annulus(0.25, 1.0, 0.25),
        "two-hole-disk" => examples::two_hole_disk(),
        _ => return Err(Error::Parse(format!("unknown preset {name:?}; expected one of {}", PRESETS.join(", ")))),
    })
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let c: RunConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        c.check()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        let mut c = Self::parse(&text)?;
        if c.name.is_none() {
            c.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        Ok(c)
    }

    fn check(&self) -> Result<()> {
        if self.preset.is_some() == self.domain.is_some() {
            return Err(Error::Parse("exactly one of `preset` and `domain` must be given".into()));
        }
        if let Some(h) = self.h {
            if !(h > 0.0) {
                return Err(Error::Parse(format!("mesh size must be positive, got {h}")));
            }
        }
        if matches!(self.levels, Some(n) if !(2..=5).contains(&n)) {
            return Err(Error::Parse("levels must be in 2..=5".into()));
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<Domain> {
        match (&self.preset, &self.domain) {
            (Some(p), _) => preset(p),
            (None, Some(d)) => {
                d.validate()?;
                Ok(d.clone())
            }
            (None, None) => Err(Error::Parse("no domain given".into())),
        }
    }

    pub fn label(&self) -> String {
        self.name.clone().or_else(|| self.preset.clone()).unwrap_or_else(|| "domain".into())
    }

    pub fn options(&self, domain: &Domain) -> VerifyOptions {
        let mut o = VerifyOptions { alpha_mode: self.alpha_mode, trial: self.trial, ..Default::default() };
        let levels = self.levels.unwrap_or(3);
        let h0 = self.h.map(|h| h / domain.measure().sqrt()).unwrap_or(o.h_rel[0]);
        o.h_rel = (0..levels).map(|i| h0 / f64::powi(2.0, i as i32)).collect();
        o
    }
}
