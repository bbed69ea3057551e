use serde::{Deserialize, Serialize};

use crate::grid::GridField;

/// Two consecutive time levels `(v^{m-1}, v^m)`; enough to advance.
#[derive(Debug, Clone)]
pub struct SchemeState {
    pub level: usize,
    pub time: f64,
    /// `None` only at level 0.
    pub v_prev: Option<GridField>,
    pub v_cur: GridField,
    /// Last `Σ a_k² v_kk`, kept when the stepper is asked to.
    pub aux: Option<GridField>,
}

impl SchemeState {
    pub fn initial(v0: GridField) -> Self {
        Self {
            level: 0,
            time: 0.0,
            v_prev: None,
            v_cur: v0,
            aux: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Compact,
    Explicit,
}

impl SchemeKind {
    /// Approximation order.
    pub fn order(self) -> u32 {
        match self {
            SchemeKind::Compact => 4,
            SchemeKind::Explicit => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Compact => "compact",
            SchemeKind::Explicit => "explicit",
        }
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "compact" => Ok(SchemeKind::Compact),
            "explicit" => Ok(SchemeKind::Explicit),
            other => Err(crate::Error::Config(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Approximation of `f` on the first time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FirstStepVariant {
    /// `f^0/3 + 2 f^{1/2}/3`.
    #[default]
    TwoLevel,
    /// `7 f^0/12 + f^1/2 - f^2/12`.
    ThreeLevel,
}

impl std::str::FromStr for FirstStepVariant {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "two-level" => Ok(FirstStepVariant::TwoLevel),
            "three-level" => Ok(FirstStepVariant::ThreeLevel),
            other => Err(crate::Error::Config(format!(
                "unknown first-step variant `{other}`"
            ))),
        }
    }
}
