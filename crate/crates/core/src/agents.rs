//! Choosing agents: a choice space, Nature's and Understanding's
//! distributions over it, and a will strength.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::{
    exercise_will, unpredictability, ChoiceSpace, ProbabilityVector, WillStrength,
};
use crate::error::ModelError;
use crate::quantum::CollapseSampler;

/// Will strength pinned for the saint (high will).
pub const SAINT_WILL: f64 = 0.99;
/// Will strength pinned for the conscientious criminal.
pub const CONSCIENTIOUS_WILL: f64 = 0.5;
/// Will strength pinned for the hardcore criminal (low will).
pub const HARDCORE_WILL: f64 = 0.01;
/// Nature's distribution for both criminals, nearly pure "evil".
pub const CRIMINAL_NATURE: [f64; 2] = [0.001, 0.999];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct AgentProfile {
    name: String,
    space: ChoiceSpace,
    nature: ProbabilityVector,
    understanding: ProbabilityVector,
    will: WillStrength,
    effective: ProbabilityVector,
}

impl AgentProfile {
    pub fn new(
        name: impl Into<String>,
        space: ChoiceSpace,
        nature: ProbabilityVector,
        understanding: ProbabilityVector,
        will: WillStrength,
    ) -> Result<Self, ModelError> {
        space.check(&nature)?;
        space.check(&understanding)?;
        let effective = exercise_will(&nature, &understanding, will)?;
        Ok(Self { name: name.into(), space, nature, understanding, will, effective })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &ChoiceSpace {
        &self.space
    }

    pub fn nature(&self) -> &ProbabilityVector {
        &self.nature
    }

    pub fn understanding(&self) -> &ProbabilityVector {
        &self.understanding
    }

    pub fn will(&self) -> WillStrength {
        self.will
    }

    /// The distribution the agent actually chooses from.
    pub fn effective(&self) -> &ProbabilityVector {
        &self.effective
    }

    /// Same agent with a different will strength.
    pub fn with_will(&self, will: WillStrength) -> Result<Self, ModelError> {
        Self::new(
            self.name.clone(),
            self.space.clone(),
            self.nature.clone(),
            self.understanding.clone(),
            will,
        )
    }
}

#[derive(Serialize, Deserialize)]
struct RawProfile {
    name: String,
    labels: ChoiceSpace,
    nature: ProbabilityVector,
    understanding: ProbabilityVector,
    sigma: WillStrength,
}

impl TryFrom<RawProfile> for AgentProfile {
    type Error = ModelError;

    fn try_from(r: RawProfile) -> Result<Self, Self::Error> {
        AgentProfile::new(r.name, r.labels, r.nature, r.understanding, r.sigma)
    }
}

impl From<AgentProfile> for RawProfile {
    fn from(a: AgentProfile) -> Self {
        RawProfile {
            name: a.name,
            labels: a.space,
            nature: a.nature,
            understanding: a.understanding,
            sigma: a.will,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchetypeKind {
    Saint,
    ConscientiousCriminal,
    HardcoreCriminal,
    Particle,
}

impl ArchetypeKind {
    pub const ALL: [ArchetypeKind; 4] = [
        ArchetypeKind::Saint,
        ArchetypeKind::ConscientiousCriminal,
        ArchetypeKind::HardcoreCriminal,
        ArchetypeKind::Particle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ArchetypeKind::Saint => "saint",
            ArchetypeKind::ConscientiousCriminal => "conscientious_criminal",
            ArchetypeKind::HardcoreCriminal => "hardcore_criminal",
            ArchetypeKind::Particle => "particle",
        }
    }
}

impl fmt::Display for ArchetypeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ArchetypeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ArchetypeKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown archetype {s:?}"))
    }
}

/// A canonical agent.
#[derive(Debug, Clone, PartialEq)]
pub enum Archetype {
    /// Ethical guidance and near-maximal will over a neutral nature.
    Saint,
    /// Ethical guidance, half will, nearly evil nature.
    ConscientiousCriminal,
    /// Ethical guidance, almost no will, nearly evil nature.
    HardcoreCriminal,
    /// No will; guidance equals nature so nothing is distorted.
    Particle(ProbabilityVector),
}

impl Archetype {
    pub fn kind(&self) -> ArchetypeKind {
        match self {
            Archetype::Saint => ArchetypeKind::Saint,
            Archetype::ConscientiousCriminal => ArchetypeKind::ConscientiousCriminal,
            Archetype::HardcoreCriminal => ArchetypeKind::HardcoreCriminal,
            Archetype::Particle(_) => ArchetypeKind::Particle,
        }
    }

    /// `particle_nature` is only read for [`ArchetypeKind::Particle`]; it
    /// defaults to the fair two-outcome distribution.
    pub fn from_kind(kind: ArchetypeKind, particle_nature: Option<ProbabilityVector>) -> Self {
        match kind {
            ArchetypeKind::Saint => Archetype::Saint,
            ArchetypeKind::ConscientiousCriminal => Archetype::ConscientiousCriminal,
            ArchetypeKind::HardcoreCriminal => Archetype::HardcoreCriminal,
            ArchetypeKind::Particle => Archetype::Particle(
                particle_nature.unwrap_or_else(|| ProbabilityVector::from_convex(vec![0.5, 0.5])),
            ),
        }
    }
}

/// The canonical profile for `kind`.
pub fn archetype(kind: &Archetype) -> AgentProfile {
    let moral = || ChoiceSpace::new(["good", "evil"]).expect("distinct labels");
    let good = || ProbabilityVector::from_convex(vec![1.0, 0.0]);
    let criminal = || ProbabilityVector::from_convex(CRIMINAL_NATURE.to_vec());
    let will = |s| WillStrength::new(s).expect("pinned will in range");
    let built = match kind {
        Archetype::Saint => AgentProfile::new(
            "saint",
            moral(),
            ProbabilityVector::from_convex(vec![0.5, 0.5]),
            good(),
            will(SAINT_WILL),
        ),
        Archetype::ConscientiousCriminal => AgentProfile::new(
            "conscientious_criminal",
            moral(),
            criminal(),
            good(),
            will(CONSCIENTIOUS_WILL),
        ),
        Archetype::HardcoreCriminal => AgentProfile::new(
            "hardcore_criminal",
            moral(),
            criminal(),
            good(),
            will(HARDCORE_WILL),
        ),
        Archetype::Particle(p) => AgentProfile::new(
            "particle",
            ChoiceSpace::indexed(p.len()).expect("nonempty"),
            p.clone(),
            p.clone(),
            WillStrength::NONE,
        ),
    };
    built.expect("canonical profiles are consistent")
}

/// Draws one choice from the agent's effective distribution.
pub fn choose<'a, R: Rng + ?Sized>(agent: &'a AgentProfile, rng: &mut R) -> &'a str {
    let index = CollapseSampler::from_distribution(agent.effective()).sample_index(rng);
    agent.space.label(index)
}

/// Entropy in bits of the agent's effective distribution.
pub fn agent_unpredictability(agent: &AgentProfile) -> f64 {
    unpredictability(agent.effective())
}
