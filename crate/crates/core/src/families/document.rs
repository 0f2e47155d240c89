//! JSON documents naming a family and its parameters, plus random admissible
//! parameter sets for sweeps.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{FamilyError, SolutionFamily};
use crate::polyalg::{format_rational, int, parse_rational, rat, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyKind {
    Square,
    Disc,
    QuarticPlane,
    RadialPlane,
    ExpPlane,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 5] = [
        FamilyKind::Square,
        FamilyKind::Disc,
        FamilyKind::QuarticPlane,
        FamilyKind::RadialPlane,
        FamilyKind::ExpPlane,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Square => "square",
            Self::Disc => "disc",
            Self::QuarticPlane => "quartic_plane",
            Self::RadialPlane => "radial_plane",
            Self::ExpPlane => "exp_plane",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Self::Square | Self::Disc => &["a0"],
            Self::RadialPlane => &["a0", "a1", "a2"],
            Self::QuarticPlane | Self::ExpPlane => &["a0", "a1", "a2", "a3", "a4", "a5", "a6"],
        }
    }

    /// Builds a family from parameters listed in [`Self::param_names`] order.
    pub fn build(self, p: &[Rational]) -> SolutionFamily {
        let get = |k: usize| p.get(k).cloned().unwrap_or_else(Rational::zero);
        let seven = || std::array::from_fn::<Rational, 7, _>(get);
        match self {
            Self::Square => SolutionFamily::square(get(0)),
            Self::Disc => SolutionFamily::disc(get(0)),
            Self::RadialPlane => SolutionFamily::radial_plane(get(0), get(1), get(2)),
            Self::QuarticPlane => SolutionFamily::quartic_plane(seven()),
            Self::ExpPlane => SolutionFamily::exp_plane(seven()),
        }
    }

    /// A representative admissible member, used when no document is given.
    pub fn default_family(self) -> SolutionFamily {
        let ints = |v: &[i64]| v.iter().map(|&n| int(n)).collect::<Vec<_>>();
        match self {
            Self::Square | Self::Disc => self.build(&ints(&[1])),
            Self::RadialPlane => self.build(&ints(&[1, 1, 0])),
            Self::QuarticPlane => self.build(&ints(&[1, 0, 1, 1, 0, 0, 0])),
            Self::ExpPlane => self.build(&ints(&[1, 1, 1, 1, 0, 0, 0])),
        }
    }

    /// Random admissible rational parameters with small numerators and
    /// denominators.
    pub fn random<R: Rng + ?Sized>(self, rng: &mut R) -> SolutionFamily {
        fn draw<R: Rng + ?Sized>(rng: &mut R, nonzero: bool) -> Rational {
            loop {
                let q = rat(rng.random_range(-12..=12), rng.random_range(1..=9));
                if !nonzero || !q.is_zero() {
                    return q;
                }
            }
        }
        loop {
            let params: Vec<Rational> = (0..self.param_names().len())
                .map(|k| {
                    let nonzero = matches!(
                        (self, k),
                        (Self::QuarticPlane, 2) | (Self::QuarticPlane, 3) | (Self::RadialPlane, 1)
                    );
                    draw(rng, nonzero)
                })
                .collect();
            let family = self.build(&params);
            if family.validate().is_ok() {
                return family;
            }
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| FamilyError::Document(format!("unknown family `{s}`")))
    }
}

/// `{"family": "square", "params": {"a0": "-1/1"}}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDocument {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
}

impl FamilyDocument {
    pub fn from_family(family: &SolutionFamily) -> Self {
        Self {
            family: family.name().to_string(),
            params: family
                .params()
                .into_iter()
                .map(|(k, v)| (k.to_string(), format_rational(&v)))
                .collect(),
        }
    }

    /// Missing parameters default to zero; unknown names are rejected.
    pub fn to_family(&self) -> Result<SolutionFamily, FamilyError> {
        let kind: FamilyKind = self.family.parse()?;
        let names = kind.param_names();
        if let Some(extra) = self.params.keys().find(|k| !names.contains(&k.as_str())) {
            return Err(FamilyError::Document(format!(
                "unknown parameter `{extra}` for family `{}`",
                kind.name()
            )));
        }
        let values = names
            .iter()
            .map(|n| match self.params.get(*n) {
                Some(text) => parse_rational(text).map_err(|e| FamilyError::Document(format!("parameter `{n}`: {e}"))),
                None => Ok(Rational::zero()),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(kind.build(&values))
    }

    pub fn from_json(text: &str) -> Result<Self, FamilyError> {
        serde_json::from_str(text).map_err(|e| FamilyError::Document(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("string map serializes")
    }
}
