use std::collections::HashMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Category, IngestError};
use crate::interval::TimeInterval;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CastMember {
    pub track_id: String,
    pub class_label: String,
    pub category: Category,
}

/// A scripted interaction: `subject` touches `object` on every frame of
/// `interval` and on no other frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptEvent {
    pub subject: String,
    pub object: String,
    pub interval: TimeInterval,
}

impl ScriptEvent {
    /// The unordered track pair, smaller id first.
    pub fn pair(&self) -> (&str, &str) {
        if self.subject <= self.object {
            (&self.subject, &self.object)
        } else {
            (&self.object, &self.subject)
        }
    }
}

/// Ground truth for a simulated scene.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SceneScript {
    pub video_id: String,
    pub frame_count: u32,
    pub cast: Vec<CastMember>,
    pub events: Vec<ScriptEvent>,
}

impl SceneScript {
    pub fn validate(&self) -> Result<(), IngestError> {
        let invalid = |msg: String| Err(IngestError::InvalidScript(msg));
        if self.frame_count == 0 {
            return invalid("frame_count must be positive".into());
        }
        let mut ids = HashMap::new();
        for (i, m) in self.cast.iter().enumerate() {
            if ids.insert(m.track_id.as_str(), i).is_some() {
                return invalid(format!("track {} appears twice in cast", m.track_id));
            }
        }
        for (i, ev) in self.events.iter().enumerate() {
            for track in [&ev.subject, &ev.object] {
                if !ids.contains_key(track.as_str()) {
                    return invalid(format!("event {i} references unknown track {track}"));
                }
            }
            if ev.subject == ev.object {
                return invalid(format!("event {i} pairs track {} with itself", ev.subject));
            }
            if ev.interval.end >= self.frame_count {
                return invalid(format!(
                    "event {i} interval {} exceeds frame range [0, {}]",
                    ev.interval,
                    self.frame_count - 1
                ));
            }
        }
        for (i, a) in self.events.iter().enumerate() {
            for (j, b) in self.events.iter().enumerate().skip(i + 1) {
                if a.pair() == b.pair() && a.interval.intersects(&b.interval) {
                    return invalid(format!(
                        "events {i} and {j} overlap on the same pair {:?}",
                        a.pair()
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn cast_member(&self, track_id: &str) -> Option<&CastMember> {
        self.cast.iter().find(|m| m.track_id == track_id)
    }

    pub fn from_json(text: &str) -> Result<Self, IngestError> {
        let script: SceneScript =
            serde_json::from_str(text).map_err(|e| IngestError::InvalidScript(e.to_string()))?;
        script.validate()?;
        Ok(script)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scripts always serialize")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScriptRecord {
    video_id: String,
    frame_count: u32,
    cast: Vec<(String, String, Category)>,
    events: Vec<(String, String, u32, u32)>,
}

impl Serialize for SceneScript {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ScriptRecord {
            video_id: self.video_id.clone(),
            frame_count: self.frame_count,
            cast: self
                .cast
                .iter()
                .map(|m| (m.track_id.clone(), m.class_label.clone(), m.category))
                .collect(),
            events: self
                .events
                .iter()
                .map(|e| {
                    (
                        e.subject.clone(),
                        e.object.clone(),
                        e.interval.start,
                        e.interval.end,
                    )
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SceneScript {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = ScriptRecord::deserialize(deserializer)?;
        let mut events = Vec::with_capacity(r.events.len());
        for (subject, object, start, end) in r.events {
            let interval = TimeInterval::new(start, end).ok_or_else(|| {
                serde::de::Error::custom(format!("event interval [{start}, {end}] is reversed"))
            })?;
            events.push(ScriptEvent {
                subject,
                object,
                interval,
            });
        }
        Ok(SceneScript {
            video_id: r.video_id,
            frame_count: r.frame_count,
            cast: r
                .cast
                .into_iter()
                .map(|(track_id, class_label, category)| CastMember {
                    track_id,
                    class_label,
                    category,
                })
                .collect(),
            events,
        })
    }
}
