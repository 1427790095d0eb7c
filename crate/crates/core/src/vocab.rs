//! Closed vocabularies used by entity fields, flows and rule metadata.

use std::fmt;

/// Error for a token outside a closed vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown {what} `{found}`; expected one of {{{}}}", .expected.join(", "))]
pub struct UnknownVariant {
    pub what: &'static str,
    pub found: String,
    pub expected: Vec<&'static str>,
}

fn canon(raw: &str) -> String {
    raw.trim().to_lowercase().replace(['-', ' '], "_")
}

macro_rules! vocab {
    (
        $(#[$meta:meta])*
        $name:ident, $what:literal {
            $($variant:ident => $text:literal),+ $(,)?
        }
        $(aliases { $($alias:literal => $target:ident),* $(,)? })?
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            /// Every variant in declaration (enumeration) order.
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }

            /// Parses a case-insensitive spelling, accepting the registered synonyms.
            pub fn parse(raw: &str) -> Result<Self, UnknownVariant> {
                let key = canon(raw);
                $(if key == $text { return Ok($name::$variant); })+
                $($(if key == $alias { return Ok($name::$target); })*)?
                Err(UnknownVariant {
                    what: $what,
                    found: raw.to_string(),
                    expected: vec![$($text),+],
                })
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

vocab! {
    EntityKind, "entity kind" {
        Device => "device",
        Residents => "residents",
        Government => "government",
        Business => "business",
        External => "external",
    }
    aliases {
        "devices" => Device,
        "iot_service" => Device,
        "resident" => Residents,
        "resident_groups" => Residents,
        "governments" => Government,
        "businesses" => Business,
        "ba" => Business,
    }
}

impl EntityKind {
    /// The four declared (principal) kinds, in canonical order.
    pub const DECLARED: [EntityKind; 4] = [
        EntityKind::Device,
        EntityKind::Residents,
        EntityKind::Government,
        EntityKind::Business,
    ];
}

vocab! {
    MovementType, "movement type" {
        Stationary => "stationary",
        Mobile => "mobile",
        Hazardous => "hazardous",
    }
    aliases { "still" => Stationary }
}

vocab! {
    InteractionType, "interaction type" {
        Physical => "physical",
        NonPhysical => "non_physical",
    }
    aliases { "nonphysical" => NonPhysical }
}

vocab! {
    RiskType, "risk type" {
        Low => "low",
        Medium => "medium",
        High => "high",
    }
}

vocab! {
    EconomicStatus, "economic status" {
        Low => "low",
        Middle => "middle",
        High => "high",
    }
    aliases { "medium" => Middle }
}

vocab! {
    BusinessScale, "business scale" {
        Small => "small",
        Med => "med",
        Large => "large",
    }
    aliases { "medium" => Med }
}

vocab! {
    /// Registered project-goal tags. Free-text goals are carried separately.
    GoalTag, "goal tag" {
        TransformPhysicalLivingEnvironment => "transform_physical_living_environment",
        ImproveCityInfrastructure => "improve_city_infrastructure",
        TechnologicalReform => "technological_reform",
        PublicSafety => "public_safety",
        TrafficManagement => "traffic_management",
        EnvironmentalMonitoring => "environmental_monitoring",
    }
}

vocab! {
    PayloadKind, "payload" {
        ResidentPersonalData => "resident_personal_data",
        ResidentLocation => "resident_location",
        ArrivalTime => "arrival_time",
        EconomicStatus => "economic_status",
        ProjectGoals => "project_goals",
        GenericMessage => "generic_message",
        HarmfulContent => "harmful_content",
    }
}

vocab! {
    Consent, "consent" {
        Granted => "granted",
        Denied => "denied",
        Unknown => "unknown",
    }
}

vocab! {
    Provenance, "provenance" {
        Scenario => "scenario",
        HumanOverride => "human_override",
    }
}

vocab! {
    /// The six rights that classify every rule.
    Right, "right" {
        Safety => "safety",
        Privacy => "privacy",
        Fairness => "fairness",
        Truth => "truth",
        WhatIsAgreed => "what_is_agreed",
        Authority => "authority",
    }
}

vocab! {
    /// Roles that appear in a rule's perspective pair.
    Role, "role" {
        Residents => "residents",
        IotService => "iot_service",
        Government => "government",
        Business => "business",
    }
}

/// The pair of roles whose interaction a rule governs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perspective(pub Role, pub Role);

impl Perspective {
    /// Perspective pairs in the order they first appear among the principles.
    pub const TABLE_ORDER: [Perspective; 5] = [
        Perspective(Role::Residents, Role::IotService),
        Perspective(Role::Residents, Role::Government),
        Perspective(Role::Residents, Role::Residents),
        Perspective(Role::Residents, Role::Business),
        Perspective(Role::Business, Role::Business),
    ];

    /// Parses `a-b`, e.g. `residents-iot_service`.
    pub fn parse(raw: &str) -> Result<Self, UnknownVariant> {
        let malformed = || UnknownVariant {
            what: "perspective",
            found: raw.to_string(),
            expected: vec!["<role>-<role>"],
        };
        // `iot_service` may itself be spelled `iot-service`, so try every split point.
        let bytes = raw.trim();
        for (idx, _) in bytes.match_indices('-') {
            if let (Ok(a), Ok(b)) = (Role::parse(&bytes[..idx]), Role::parse(&bytes[idx + 1..])) {
                return Ok(Perspective(a, b));
            }
        }
        Err(malformed())
    }
}

impl fmt::Display for Perspective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

impl serde::Serialize for Perspective {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.0.as_str(), self.1.as_str()].serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synonyms_canonicalize() {
        assert_eq!(MovementType::parse("still"), Ok(MovementType::Stationary));
        assert_eq!(MovementType::parse("Stationary"), Ok(MovementType::Stationary));
        assert_eq!(EconomicStatus::parse("Medium"), Ok(EconomicStatus::Middle));
        assert_eq!(InteractionType::parse("non-physical"), Ok(InteractionType::NonPhysical));
        assert_eq!(RiskType::parse("medium"), Ok(RiskType::Medium));
    }

    #[test]
    fn unknown_variant_lists_expected() {
        let err = RiskType::parse("extreme").unwrap_err();
        assert_eq!(err.expected, vec!["low", "medium", "high"]);
        assert!(err.to_string().contains("{low, medium, high}"));
    }

    #[test]
    fn perspective_roundtrip() {
        for p in Perspective::TABLE_ORDER {
            assert_eq!(Perspective::parse(&p.to_string()), Ok(p));
        }
        assert_eq!(
            Perspective::parse("residents-iot-service"),
            Ok(Perspective(Role::Residents, Role::IotService))
        );
        assert!(Perspective::parse("residents").is_err());
    }
}
