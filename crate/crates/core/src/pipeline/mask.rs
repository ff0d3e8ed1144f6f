use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::corpus::Task;

/// Feature families, declared in layout order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureFlag {
    BF,
    LF,
    SA,
    SF,
    LD,
    PF,
    FP,
    GFS,
    HSV,
}

impl FeatureFlag {
    pub const ALL: [FeatureFlag; 9] = [
        FeatureFlag::BF,
        FeatureFlag::LF,
        FeatureFlag::SA,
        FeatureFlag::SF,
        FeatureFlag::LD,
        FeatureFlag::PF,
        FeatureFlag::FP,
        FeatureFlag::GFS,
        FeatureFlag::HSV,
    ];
    pub const VERBAL: [FeatureFlag; 6] = [
        FeatureFlag::BF,
        FeatureFlag::LF,
        FeatureFlag::SA,
        FeatureFlag::SF,
        FeatureFlag::LD,
        FeatureFlag::PF,
    ];
    pub const VISUAL: [FeatureFlag; 3] = [FeatureFlag::FP, FeatureFlag::GFS, FeatureFlag::HSV];

    pub fn is_visual(self) -> bool {
        matches!(self, FeatureFlag::FP | FeatureFlag::GFS | FeatureFlag::HSV)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureFlag::BF => "BF",
            FeatureFlag::LF => "LF",
            FeatureFlag::SA => "SA",
            FeatureFlag::SF => "SF",
            FeatureFlag::LD => "LD",
            FeatureFlag::PF => "PF",
            FeatureFlag::FP => "FP",
            FeatureFlag::GFS => "GFS",
            FeatureFlag::HSV => "HSV",
        }
    }
}

impl fmt::Display for FeatureFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureFlag {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, PipelineError> {
        let s = s.trim();
        FeatureFlag::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| PipelineError::InvalidMask(format!("unknown feature family {s:?}")))
    }
}

/// Non-empty set of feature families.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<FeatureFlag>", into = "Vec<FeatureFlag>")]
pub struct FeatureSetMask {
    flags: BTreeSet<FeatureFlag>,
}

impl FeatureSetMask {
    pub fn new<I: IntoIterator<Item = FeatureFlag>>(flags: I) -> Result<Self, PipelineError> {
        let flags: BTreeSet<FeatureFlag> = flags.into_iter().collect();
        if flags.is_empty() {
            return Err(PipelineError::InvalidMask("mask is empty".into()));
        }
        Ok(FeatureSetMask { flags })
    }

    pub fn all() -> Self {
        Self::new(FeatureFlag::ALL).expect("non-empty")
    }

    pub fn verbal() -> Self {
        Self::new(FeatureFlag::VERBAL).expect("non-empty")
    }

    pub fn visual() -> Self {
        Self::new(FeatureFlag::VISUAL).expect("non-empty")
    }

    pub fn contains(&self, f: FeatureFlag) -> bool {
        self.flags.contains(&f)
    }

    /// Flags in layout order.
    pub fn flags(&self) -> impl Iterator<Item = FeatureFlag> + '_ {
        self.flags.iter().copied()
    }

    pub fn has_visual(&self) -> bool {
        self.flags.iter().any(|f| f.is_visual())
    }

    /// Rejects visual families for the response task.
    pub fn check_task(&self, task: Task) -> Result<(), PipelineError> {
        if task == Task::ER && self.has_visual() {
            return Err(PipelineError::VisualForResponses);
        }
        Ok(())
    }
}

impl fmt::Display for FeatureSetMask {
    /// `BF+LF+SA`, in layout order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.flags.iter().map(|f| f.as_str()).collect();
        f.write_str(&parts.join("+"))
    }
}

impl FromStr for FeatureSetMask {
    type Err = PipelineError;

    /// Codes separated by `,` or `+`; `all`, `verbal` and `visual` name the
    /// usual groups.
    fn from_str(s: &str) -> Result<Self, PipelineError> {
        let mut flags = Vec::new();
        for part in s.split([',', '+']).map(str::trim).filter(|p| !p.is_empty()) {
            match part.to_ascii_lowercase().as_str() {
                "all" => flags.extend(FeatureFlag::ALL),
                "verbal" => flags.extend(FeatureFlag::VERBAL),
                "visual" => flags.extend(FeatureFlag::VISUAL),
                _ => flags.push(part.parse()?),
            }
        }
        FeatureSetMask::new(flags)
    }
}

impl TryFrom<Vec<FeatureFlag>> for FeatureSetMask {
    type Error = PipelineError;

    fn try_from(v: Vec<FeatureFlag>) -> Result<Self, PipelineError> {
        FeatureSetMask::new(v)
    }
}

impl From<FeatureSetMask> for Vec<FeatureFlag> {
    fn from(m: FeatureSetMask) -> Self {
        m.flags.into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let m: FeatureSetMask = "sa, LF".parse().unwrap();
        assert_eq!(m.to_string(), "LF+SA");
        assert_eq!(
            "all".parse::<FeatureSetMask>().unwrap(),
            FeatureSetMask::all()
        );
        assert_eq!(
            "BF+LF+SA+SF+LD+PF".parse::<FeatureSetMask>().unwrap(),
            FeatureSetMask::verbal()
        );
        assert!("".parse::<FeatureSetMask>().is_err());
        assert!("BF,XX".parse::<FeatureSetMask>().is_err());
    }

    #[test]
    fn visual_rejected_for_responses() {
        let m: FeatureSetMask = "LF,FP".parse().unwrap();
        let err = m.check_task(Task::ER).unwrap_err();
        assert_eq!(err.to_string(), "visual features invalid for ER");
        assert!(m.check_task(Task::ES).is_ok());
    }

    #[test]
    fn serde_as_list() {
        let m: FeatureSetMask = "HSV,BF".parse().unwrap();
        let j = serde_json::to_string(&m).unwrap();
        assert_eq!(j, r#"["BF","HSV"]"#);
        assert_eq!(serde_json::from_str::<FeatureSetMask>(&j).unwrap(), m);
        assert!(serde_json::from_str::<FeatureSetMask>("[]").is_err());
    }
}
