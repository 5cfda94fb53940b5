//! Inclusive frame intervals and Allen's interval relations on them.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An inclusive range of frame indices, `start <= end`.
///
/// Serialized as the two-element array `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeInterval {
    pub start: u32,
    pub end: u32,
}

impl TimeInterval {
    /// Returns `None` when `start > end`.
    pub fn new(start: u32, end: u32) -> Option<Self> {
        (start <= end).then_some(Self { start, end })
    }

    /// Number of frames covered.
    pub fn len(&self) -> u64 {
        u64::from(self.end - self.start) + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains_frame(&self, frame: u32) -> bool {
        self.start <= frame && frame <= self.end
    }

    pub fn contains(&self, other: &TimeInterval) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn intersects(&self, other: &TimeInterval) -> bool {
        self.start <= other.end && other.start <= self.end
    }

    pub fn intersection(&self, other: &TimeInterval) -> Option<TimeInterval> {
        TimeInterval::new(self.start.max(other.start), self.end.min(other.end))
    }

    /// Smallest interval covering both.
    pub fn hull(&self, other: &TimeInterval) -> TimeInterval {
        TimeInterval {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }

    /// Number of frames strictly between the two intervals; zero when they
    /// touch or overlap.
    pub fn gap_to(&self, other: &TimeInterval) -> u32 {
        if self.end < other.start {
            other.start - self.end - 1
        } else if other.end < self.start {
            self.start - other.end - 1
        } else {
            0
        }
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

impl Serialize for TimeInterval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.start, self.end].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TimeInterval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [start, end] = <[u32; 2]>::deserialize(deserializer)?;
        TimeInterval::new(start, end).ok_or_else(|| {
            serde::de::Error::custom(format!("interval start {start} exceeds end {end}"))
        })
    }
}

/// The thirteen jointly exhaustive, pairwise disjoint interval relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllenRelation {
    Before,
    Meets,
    Overlaps,
    Starts,
    During,
    Finishes,
    Equals,
    FinishedBy,
    Contains,
    StartedBy,
    OverlappedBy,
    MetBy,
    After,
}

impl AllenRelation {
    pub const ALL: [AllenRelation; 13] = [
        AllenRelation::Before,
        AllenRelation::Meets,
        AllenRelation::Overlaps,
        AllenRelation::Starts,
        AllenRelation::During,
        AllenRelation::Finishes,
        AllenRelation::Equals,
        AllenRelation::FinishedBy,
        AllenRelation::Contains,
        AllenRelation::StartedBy,
        AllenRelation::OverlappedBy,
        AllenRelation::MetBy,
        AllenRelation::After,
    ];

    pub fn inverse(self) -> AllenRelation {
        use AllenRelation::*;
        match self {
            Before => After,
            Meets => MetBy,
            Overlaps => OverlappedBy,
            Starts => StartedBy,
            During => Contains,
            Finishes => FinishedBy,
            Equals => Equals,
            FinishedBy => Finishes,
            Contains => During,
            StartedBy => Starts,
            OverlappedBy => Overlaps,
            MetBy => Meets,
            After => Before,
        }
    }
}

/// Relation of `i` to `j` under the discrete convention: `i` meets `j` when
/// `j` starts on the frame right after `i` ends.
pub fn allen_relation(i: &TimeInterval, j: &TimeInterval) -> AllenRelation {
    use std::cmp::Ordering::*;
    use AllenRelation::*;

    // widen so end + 1 cannot overflow
    let (is, ie) = (u64::from(i.start), u64::from(i.end));
    let (js, je) = (u64::from(j.start), u64::from(j.end));

    if ie + 1 < js {
        return Before;
    }
    if ie + 1 == js {
        return Meets;
    }
    if je + 1 < is {
        return After;
    }
    if je + 1 == is {
        return MetBy;
    }
    // the intervals share at least one frame
    match (is.cmp(&js), ie.cmp(&je)) {
        (Equal, Equal) => Equals,
        (Equal, Less) => Starts,
        (Equal, Greater) => StartedBy,
        (Greater, Less) => During,
        (Less, Greater) => Contains,
        (Greater, Equal) => Finishes,
        (Less, Equal) => FinishedBy,
        (Less, Less) => Overlaps,
        (Greater, Greater) => OverlappedBy,
    }
}
