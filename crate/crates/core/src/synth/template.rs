//! Question templates and deterministic surface realization.

use serde::{Deserialize, Serialize};

use super::{
    AnswerMode, Direction, HopOrdinal, QueryProgram, SeedOrdinal, SynthError, TemporalConstraint,
};
use crate::ingest::Category;
use crate::kg::Predicate;

/// A question pattern for programs of one shape.
///
/// Placeholders: `{seed_class}`, `{seed_ordinal}`, and for hop `k` (from 1)
/// `{pred_k}`, `{target_cat_k}`, `{hop_ordinal_k}`. A conforming program has
/// `depth` hops whose temporal constraints equal `temporal`, and answers in
/// `answer_mode`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaTemplate {
    pub template_id: String,
    pub depth: usize,
    pub answer_mode: AnswerMode,
    pub temporal: Vec<TemporalConstraint>,
    pub pattern: String,
}

impl QaTemplate {
    fn new(
        id: &str,
        answer_mode: AnswerMode,
        temporal: &[TemporalConstraint],
        pattern: &str,
    ) -> Self {
        Self {
            template_id: id.to_string(),
            depth: temporal.len(),
            answer_mode,
            temporal: temporal.to_vec(),
            pattern: pattern.to_string(),
        }
    }

    pub fn conforms(&self, program: &QueryProgram) -> bool {
        program.answer_mode == self.answer_mode
            && program.hops.len() == self.depth
            && program
                .hops
                .iter()
                .zip(&self.temporal)
                .all(|(h, t)| h.temporal_constraint == *t)
    }

    /// Checks that the template is well formed: the temporal list matches the
    /// depth, the first hop is unconstrained, and every placeholder names a
    /// slot a conforming program can fill.
    pub fn check(&self) -> Result<(), String> {
        if self.temporal.len() != self.depth {
            return Err(format!(
                "{}: {} temporal constraints for depth {}",
                self.template_id,
                self.temporal.len(),
                self.depth
            ));
        }
        if self
            .temporal
            .first()
            .is_some_and(|t| *t != TemporalConstraint::Any)
        {
            return Err(format!(
                "{}: first hop must be unconstrained",
                self.template_id
            ));
        }
        if self.depth == 0 && self.answer_mode != AnswerMode::EntityClass {
            return Err(format!(
                "{}: depth 0 only answers entity_class",
                self.template_id
            ));
        }
        for name in placeholders(&self.pattern)? {
            if !slot_known(&name, self.depth) {
                return Err(format!(
                    "{}: placeholder {{{name}}} cannot be filled at depth {}",
                    self.template_id, self.depth
                ));
            }
        }
        Ok(())
    }
}

fn placeholders(pattern: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut rest = pattern;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        let close = after
            .find('}')
            .ok_or_else(|| format!("unclosed placeholder in {pattern:?}"))?;
        out.push(after[..close].to_string());
        rest = &after[close + 1..];
    }
    if rest.contains('}') {
        return Err(format!("stray '}}' in {pattern:?}"));
    }
    Ok(out)
}

fn slot_known(name: &str, depth: usize) -> bool {
    if name == "seed_class" || name == "seed_ordinal" {
        return true;
    }
    for prefix in ["pred_", "target_cat_", "hop_ordinal_"] {
        if let Some(k) = name.strip_prefix(prefix) {
            return k.parse::<usize>().is_ok_and(|k| (1..=depth).contains(&k));
        }
    }
    false
}

/// Display phrase for an ontology class label.
pub fn display_class(label: &str) -> String {
    label.replace('_', " ")
}

pub fn display_category(category: Option<Category>) -> &'static str {
    match category {
        Some(Category::Instrument) => "instrument",
        Some(Category::Anatomy) => "anatomical structure",
        None => "entity",
    }
}

/// Base-form verb phrase for a hop, seen from the current node.
pub fn display_predicate(predicate: Predicate, direction: Direction) -> &'static str {
    match (predicate, direction) {
        (Predicate::Touches, Direction::AsSubject) => "touch",
        (Predicate::Touches, Direction::AsObject) => "get touched by",
        (Predicate::Touches, Direction::Either) => "come into contact with",
        (Predicate::Near, Direction::AsSubject) => "approach",
        (Predicate::Near, Direction::AsObject) => "get approached by",
        (Predicate::Near, Direction::Either) => "come near",
    }
}

fn display_seed_ordinal(ordinal: SeedOrdinal) -> &'static str {
    match ordinal {
        SeedOrdinal::First => "first",
        SeedOrdinal::Last => "last",
        SeedOrdinal::Unique => "",
    }
}

fn display_hop_ordinal(ordinal: HopOrdinal) -> &'static str {
    match ordinal {
        HopOrdinal::First => "first",
        HopOrdinal::Last => "last",
    }
}

fn slot_value(name: &str, program: &QueryProgram) -> Option<String> {
    match name {
        "seed_class" => Some(match &program.seed.class_label {
            Some(label) => display_class(label),
            None => display_category(program.seed.category).to_string(),
        }),
        "seed_ordinal" => Some(display_seed_ordinal(program.seed.ordinal).to_string()),
        _ => {
            let (prefix, k) = name.rsplit_once('_')?;
            let hop = program.hops.get(k.parse::<usize>().ok()?.checked_sub(1)?)?;
            Some(match prefix {
                "pred" => display_predicate(hop.predicate, hop.direction).to_string(),
                "target_cat" => display_category(hop.target_category).to_string(),
                "hop_ordinal" => display_hop_ordinal(hop.ordinal).to_string(),
                _ => return None,
            })
        }
    }
}

/// Fills a template's slots from a conforming program.
pub fn render_question(
    template: &QaTemplate,
    program: &QueryProgram,
) -> Result<String, SynthError> {
    if !template.conforms(program) {
        return Err(SynthError::TemplateMismatch {
            template_id: template.template_id.clone(),
            detail: format!(
                "template wants depth {} {}, program has depth {} {}",
                template.depth,
                template.answer_mode.as_str(),
                program.designed_depth(),
                program.answer_mode.as_str()
            ),
        });
    }
    let mut text = String::with_capacity(template.pattern.len() + 32);
    let mut rest = template.pattern.as_str();
    while let Some(open) = rest.find('{') {
        text.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let close = after
            .find('}')
            .ok_or_else(|| SynthError::TemplateMismatch {
                template_id: template.template_id.clone(),
                detail: "unclosed placeholder".into(),
            })?;
        let name = &after[..close];
        let value = slot_value(name, program).ok_or_else(|| SynthError::TemplateMismatch {
            template_id: template.template_id.clone(),
            detail: format!("unresolvable placeholder {{{name}}}"),
        })?;
        text.push_str(&value);
        rest = &after[close + 1..];
    }
    text.push_str(rest);
    Ok(smooth(&text))
}

/// Collapses the whitespace left by empty slots.
fn smooth(text: &str) -> String {
    let mut out = text.split_whitespace().collect::<Vec<_>>().join(" ");
    for p in ["?", ",", ".", ")"] {
        out = out.replace(&format!(" {p}"), p);
    }
    out.replace("( ", "(")
}

/// The built-in template catalog.
pub fn builtin_templates() -> Vec<QaTemplate> {
    use AnswerMode::*;
    use TemporalConstraint::{AfterPrev as After, Any};
    vec![
        QaTemplate::new(
            "d1_class",
            EntityClass,
            &[Any],
            "Which {target_cat_1} does the {seed_ordinal} {seed_class} {pred_1}?",
        ),
        QaTemplate::new(
            "d1_class_ordinal",
            EntityClass,
            &[Any],
            "Which {target_cat_1} does the {seed_ordinal} {seed_class} {pred_1} {hop_ordinal_1}?",
        ),
        QaTemplate::new(
            "d1_time",
            TimeSpan,
            &[Any],
            "When does the {seed_ordinal} {seed_class} {hop_ordinal_1} {pred_1} the {target_cat_1}?",
        ),
        QaTemplate::new(
            "d1_count",
            Count,
            &[Any],
            "How many times does the {seed_ordinal} {seed_class} {pred_1} some {target_cat_1}?",
        ),
        QaTemplate::new(
            "d2_class_after",
            EntityClass,
            &[Any, After],
            "The {seed_ordinal} {seed_class} is seen to {pred_1} some {target_cat_1} \
             ({hop_ordinal_1} occurrence). Afterwards, which {target_cat_2} does that \
             {target_cat_1} {pred_2} {hop_ordinal_2}?",
        ),
        QaTemplate::new(
            "d2_class_any",
            EntityClass,
            &[Any, Any],
            "The {seed_ordinal} {seed_class} is seen to {pred_1} some {target_cat_1} \
             ({hop_ordinal_1} occurrence). Which {target_cat_2} does that {target_cat_1} \
             {pred_2} {hop_ordinal_2}?",
        ),
        QaTemplate::new(
            "d2_time_after",
            TimeSpan,
            &[Any, After],
            "The {seed_ordinal} {seed_class} is seen to {pred_1} some {target_cat_1} \
             ({hop_ordinal_1} occurrence). When, afterwards, does that {target_cat_1} \
             {hop_ordinal_2} {pred_2} some {target_cat_2}?",
        ),
        QaTemplate::new(
            "d3_class_after",
            EntityClass,
            &[Any, After, After],
            "The {seed_ordinal} {seed_class} is seen to {pred_1} some {target_cat_1} \
             ({hop_ordinal_1} occurrence). Afterwards, that {target_cat_1} is seen to \
             {pred_2} some {target_cat_2} ({hop_ordinal_2} occurrence). Later still, which \
             {target_cat_3} does that {target_cat_2} {pred_3} {hop_ordinal_3}?",
        ),
        QaTemplate::new(
            "d3_class_any",
            EntityClass,
            &[Any, Any, Any],
            "The {seed_ordinal} {seed_class} is seen to {pred_1} some {target_cat_1} \
             ({hop_ordinal_1} occurrence), which in turn is seen to {pred_2} some \
             {target_cat_2} ({hop_ordinal_2} occurrence). Which {target_cat_3} does that \
             {target_cat_2} {pred_3} {hop_ordinal_3}?",
        ),
        QaTemplate::new(
            "d4_class_any",
            EntityClass,
            &[Any, Any, Any, Any],
            "The {seed_ordinal} {seed_class} is seen to {pred_1} some {target_cat_1} \
             ({hop_ordinal_1} occurrence), which is seen to {pred_2} some {target_cat_2} \
             ({hop_ordinal_2} occurrence), which in turn is seen to {pred_3} some \
             {target_cat_3} ({hop_ordinal_3} occurrence). Which {target_cat_4} does that \
             {target_cat_3} {pred_4} {hop_ordinal_4}?",
        ),
    ]
}
