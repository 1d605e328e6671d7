use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Token-level semantic tag. The declaration order is the canonical order
/// used for tie-breaking during decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TagLabel {
    Other,
    Type,
    Attribute,
    Location,
    Sibling,
    UserAttribute,
    UserLocation,
}

impl TagLabel {
    pub const ALL: [TagLabel; 7] = [
        TagLabel::Other,
        TagLabel::Type,
        TagLabel::Attribute,
        TagLabel::Location,
        TagLabel::Sibling,
        TagLabel::UserAttribute,
        TagLabel::UserLocation,
    ];

    pub fn canonical_index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TagLabel::Other => "other",
            TagLabel::Type => "x.type",
            TagLabel::Attribute => "x.attribute",
            TagLabel::Location => "x.location",
            TagLabel::Sibling => "x.sibling",
            TagLabel::UserAttribute => "user.attribute",
            TagLabel::UserLocation => "user.location",
        }
    }
}

impl fmt::Display for TagLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown tag label `{0}`")]
pub struct UnknownLabel(pub String);

impl FromStr for TagLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "other" | "o" => TagLabel::Other,
            "x.type" => TagLabel::Type,
            "x.attribute" | "x.attr" => TagLabel::Attribute,
            "x.location" | "x.loc" => TagLabel::Location,
            "x.sibling" => TagLabel::Sibling,
            "user.attribute" | "user.attr" => TagLabel::UserAttribute,
            "user.location" | "user.loc" => TagLabel::UserLocation,
            _ => return Err(UnknownLabel(s.to_string())),
        })
    }
}

impl Serialize for TagLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for TagLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A label that may be missing, as produced by merging two annotators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PartialLabel {
    Known(TagLabel),
    Unknown,
}

impl PartialLabel {
    pub fn known(self) -> Option<TagLabel> {
        match self {
            PartialLabel::Known(l) => Some(l),
            PartialLabel::Unknown => None,
        }
    }
}
