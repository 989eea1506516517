use serde::{Deserialize, Serialize};

use crate::partition::Partition;
use crate::spectrum::Spectrum;

/// Non-strict inequalities count as satisfied within this band.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapStatus {
    AbsolutelySeparating,
    NotAbsolutelySeparating,
    Undetermined,
}

/// Data backing a verdict: an offending spectrum, an input recipe, or a
/// parameter point.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Evidence {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spectrum: Option<Spectrum>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub point: Option<Vec<f64>>,
}

impl Evidence {
    pub fn spectrum(s: Spectrum) -> Self {
        Evidence {
            spectrum: Some(s),
            ..Default::default()
        }
    }

    pub fn input(recipe: impl Into<String>) -> Self {
        Evidence {
            input: Some(recipe.into()),
            ..Default::default()
        }
    }

    pub fn with_input(mut self, recipe: impl Into<String>) -> Self {
        self.input = Some(recipe.into());
        self
    }

    pub fn with_point(mut self, point: Vec<f64>) -> Self {
        self.point = Some(point);
        self
    }
}

/// Outcome of a state-level criterion.
///
/// `margin` is the signed slack of the criterion's inequality: nonnegative
/// when it is satisfied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub criterion: String,
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Evidence>,
}

impl Verdict {
    pub fn new(status: Status, criterion: &str, margin: f64) -> Self {
        Verdict {
            status,
            criterion: criterion.to_string(),
            margin,
            witness: None,
        }
    }

    pub fn with_witness(mut self, w: Evidence) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn fails(&self) -> bool {
        self.status == Status::Fails
    }
}

/// Outcome of a map-level criterion, tied to the partition it speaks about.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapVerdict {
    pub status: MapStatus,
    pub criterion: String,
    pub partition: Partition,
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Evidence>,
}

impl MapVerdict {
    pub fn new(status: MapStatus, criterion: &str, partition: Partition, margin: f64) -> Self {
        MapVerdict {
            status,
            criterion: criterion.to_string(),
            partition,
            margin,
            witness: None,
        }
    }

    pub fn with_witness(mut self, w: Evidence) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn is_as(&self) -> bool {
        self.status == MapStatus::AbsolutelySeparating
    }

    pub fn is_not_as(&self) -> bool {
        self.status == MapStatus::NotAbsolutelySeparating
    }

    pub fn is_undetermined(&self) -> bool {
        self.status == MapStatus::Undetermined
    }
}

pub(crate) fn satisfied(margin: f64) -> bool {
    margin >= -BOUNDARY_TOL
}
