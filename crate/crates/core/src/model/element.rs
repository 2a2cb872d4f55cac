use std::fmt;

use thiserror::Error;

use super::{is_valid_text, AudienceTier, ElementKind, Scope};
use crate::lifecycle::LifecycleStage;
use crate::Id;

const FRAME_PREFIX: &str = "The use of the {";
const FRAME_BY: &str = "} by {";
const FRAME_ADVANCE: &str = "} can help advance {";
const FRAME_END: &str = "}.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotName {
    System,
    Context,
    Goal,
}

impl fmt::Display for SlotName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SlotName::System => "system",
            SlotName::Context => "context",
            SlotName::Goal => "goal",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("goal slot `{0}` is empty")]
    EmptySlot(SlotName),
    #[error("goal slot `{0}` contains a template brace")]
    BraceInSlot(SlotName),
    #[error("goal slot `{0}` spans more than one line")]
    MultilineSlot(SlotName),
}

/// The three bracketed components of a top-level normative goal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GoalSlots {
    system: String,
    context: String,
    goal: String,
}

impl GoalSlots {
    pub fn new(
        system: impl Into<String>,
        context: impl Into<String>,
        goal: impl Into<String>,
    ) -> Result<Self, TemplateError> {
        let slots = GoalSlots { system: system.into(), context: context.into(), goal: goal.into() };
        for (name, value) in slots.fields() {
            check_slot_shape(name, value)?;
            if value.contains(['{', '}']) {
                return Err(TemplateError::BraceInSlot(name));
            }
        }
        Ok(slots)
    }

    /// Slot values that may themselves contain pattern placeholders such as `{system}`.
    pub(crate) fn template(system: String, context: String, goal: String) -> Result<Self, TemplateError> {
        let slots = GoalSlots { system, context, goal };
        for (name, value) in slots.fields() {
            check_slot_shape(name, value)?;
        }
        Ok(slots)
    }

    pub fn system(&self) -> &str {
        &self.system
    }

    pub fn context(&self) -> &str {
        &self.context
    }

    pub fn goal(&self) -> &str {
        &self.goal
    }

    pub fn get(&self, name: SlotName) -> &str {
        match name {
            SlotName::System => &self.system,
            SlotName::Context => &self.context,
            SlotName::Goal => &self.goal,
        }
    }

    pub fn fields(&self) -> [(SlotName, &str); 3] {
        [(SlotName::System, &self.system), (SlotName::Context, &self.context), (SlotName::Goal, &self.goal)]
    }

    /// "The use of the {system} by {context} can help advance {goal}."
    pub fn render(&self) -> String {
        format!("{FRAME_PREFIX}{}{FRAME_BY}{}{FRAME_ADVANCE}{}{FRAME_END}", self.system, self.context, self.goal)
    }

    /// Inverse of [`GoalSlots::render`].
    pub fn extract(text: &str) -> Option<Self> {
        let rest = text.strip_prefix(FRAME_PREFIX)?;
        let (system, rest) = rest.split_once(FRAME_BY)?;
        let (context, rest) = rest.split_once(FRAME_ADVANCE)?;
        let goal = rest.strip_suffix(FRAME_END)?;
        GoalSlots::new(system, context, goal).ok()
    }
}

fn check_slot_shape(name: SlotName, value: &str) -> Result<(), TemplateError> {
    if value.trim().is_empty() {
        return Err(TemplateError::EmptySlot(name));
    }
    if value.contains(['\n', '\r']) {
        return Err(TemplateError::MultilineSlot(name));
    }
    Ok(())
}

/// Builds a top-level normative goal from its three slots.
pub fn goal_from_template(id: Id, system: &str, context: &str, goal: &str) -> Result<Element, TemplateError> {
    Ok(Element::goal(id, GoalSlots::new(system, context, goal)?))
}

/// Where an evidential artefact lives: a relative path or URL, optionally
/// narrowed to a section (`docs/eia.pdf#section-3`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Locator {
    target: String,
    section: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid artefact locator {0:?}")]
pub struct InvalidLocator(pub String);

impl Locator {
    pub fn new(target: impl Into<String>, section: Option<String>) -> Result<Self, InvalidLocator> {
        let target = target.into();
        let ok_target = is_valid_text(&target) && (section.is_some() || !target.contains('#'));
        let ok_section = section
            .as_deref()
            .is_none_or(|s| is_valid_text(s) && !s.contains('#'));
        if ok_target && ok_section {
            Ok(Locator { target, section })
        } else {
            let shown = match section {
                Some(s) => format!("{target}#{s}"),
                None => target,
            };
            Err(InvalidLocator(shown))
        }
    }

    pub fn parse(s: &str) -> Result<Self, InvalidLocator> {
        match s.rsplit_once('#') {
            Some((target, section)) => Locator::new(target, Some(section.to_string())),
            None => Locator::new(s, None),
        }
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn section(&self) -> Option<&str> {
        self.section.as_deref()
    }
}

impl fmt::Display for Locator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.section {
            Some(s) => write!(f, "{}#{s}", self.target),
            None => f.write_str(&self.target),
        }
    }
}

/// Per-kind field rule an element violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KindRule {
    TextEmpty,
    ScopeMissing,
    ScopeNotPermitted,
    SlotsMissing,
    SlotsNotPermitted,
    LocatorMissing,
    LocatorNotPermitted,
}

impl KindRule {
    pub fn as_str(self) -> &'static str {
        match self {
            KindRule::TextEmpty => "text-empty",
            KindRule::ScopeMissing => "scope-missing",
            KindRule::ScopeNotPermitted => "scope-not-permitted",
            KindRule::SlotsMissing => "slots-missing",
            KindRule::SlotsNotPermitted => "slots-not-permitted",
            KindRule::LocatorMissing => "locator-missing",
            KindRule::LocatorNotPermitted => "locator-not-permitted",
        }
    }
}

impl fmt::Display for KindRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element {
    pub id: Id,
    pub kind: ElementKind,
    pub text: String,
    pub stage: Option<LifecycleStage>,
    /// PropertyClaim only.
    pub scope: Option<Scope>,
    /// Goal only.
    pub slots: Option<GoalSlots>,
    /// Evidence only.
    pub locator: Option<Locator>,
    pub tier: AudienceTier,
}

impl Element {
    fn bare(id: Id, kind: ElementKind, text: String) -> Self {
        Element { id, kind, text, stage: None, scope: None, slots: None, locator: None, tier: AudienceTier::Public }
    }

    pub fn goal(id: Id, slots: GoalSlots) -> Self {
        let mut e = Element::bare(id, ElementKind::Goal, slots.render());
        e.slots = Some(slots);
        e
    }

    pub fn context(id: Id, text: impl Into<String>) -> Self {
        Element::bare(id, ElementKind::Context, text.into())
    }

    pub fn property_claim(id: Id, scope: Scope, text: impl Into<String>) -> Self {
        let mut e = Element::bare(id, ElementKind::PropertyClaim, text.into());
        e.scope = Some(scope);
        e
    }

    pub fn evidential_claim(id: Id, text: impl Into<String>) -> Self {
        Element::bare(id, ElementKind::EvidentialClaim, text.into())
    }

    pub fn evidence(id: Id, locator: Locator, text: impl Into<String>) -> Self {
        let mut e = Element::bare(id, ElementKind::Evidence, text.into());
        e.locator = Some(locator);
        e
    }

    pub fn warrant(id: Id, text: impl Into<String>) -> Self {
        Element::bare(id, ElementKind::Warrant, text.into())
    }

    pub fn assumption(id: Id, text: impl Into<String>) -> Self {
        Element::bare(id, ElementKind::Assumption, text.into())
    }

    /// An element of any kind with only the common fields set; kind-specific
    /// fields must be filled in before it passes [`Element::check`].
    pub fn of_kind(id: Id, kind: ElementKind, text: impl Into<String>) -> Self {
        Element::bare(id, kind, text.into())
    }

    pub fn with_stage(mut self, stage: LifecycleStage) -> Self {
        self.stage = Some(stage);
        self
    }

    pub fn with_tier(mut self, tier: AudienceTier) -> Self {
        self.tier = tier;
        self
    }

    pub fn check(&self) -> Result<(), KindRule> {
        if !is_valid_text(&self.text) {
            return Err(KindRule::TextEmpty);
        }
        let is = |k| self.kind == k;
        match (is(ElementKind::PropertyClaim), self.scope.is_some()) {
            (true, false) => return Err(KindRule::ScopeMissing),
            (false, true) => return Err(KindRule::ScopeNotPermitted),
            _ => {}
        }
        match (is(ElementKind::Goal), self.slots.is_some()) {
            (true, false) => return Err(KindRule::SlotsMissing),
            (false, true) => return Err(KindRule::SlotsNotPermitted),
            _ => {}
        }
        match (is(ElementKind::Evidence), self.locator.is_some()) {
            (true, false) => Err(KindRule::LocatorMissing),
            (false, true) => Err(KindRule::LocatorNotPermitted),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::id;

    #[test]
    fn renders_the_healthcare_goal() {
        let g = goal_from_template(
            id!("G1"),
            "decision support tool",
            "healthcare professionals in a formal healthcare setting",
            "health equity",
        )
        .unwrap();
        assert_eq!(
            g.text,
            "The use of the {decision support tool} by {healthcare professionals in a formal healthcare setting} \
             can help advance {health equity}."
        );
        let slots = g.slots.as_ref().unwrap();
        assert_eq!(slots.system(), "decision support tool");
        assert_eq!(slots.goal(), "health equity");
        assert_eq!(g.check(), Ok(()));
    }

    #[test]
    fn rejects_empty_and_braced_slots() {
        assert_eq!(goal_from_template(id!("G"), "x", "", "y").unwrap_err(), TemplateError::EmptySlot(SlotName::Context));
        assert_eq!(
            goal_from_template(id!("G"), "{tool}", "staff", "equity").unwrap_err(),
            TemplateError::BraceInSlot(SlotName::System)
        );
        assert_eq!(goal_from_template(id!("G"), "x", "  ", "y").unwrap_err(), TemplateError::EmptySlot(SlotName::Context));
    }

    #[test]
    fn extract_inverts_render() {
        let s = GoalSlots::new("a by b", "c", "d can help advance e").unwrap();
        assert_eq!(GoalSlots::extract(&s.render()), Some(s));
        assert_eq!(GoalSlots::extract("This decision support tool is fair."), None);
    }

    #[test]
    fn kind_rules() {
        let mut g = Element::goal(id!("G"), GoalSlots::new("a", "b", "c").unwrap());
        g.slots = None;
        assert_eq!(g.check(), Err(KindRule::SlotsMissing));
        let mut c = Element::property_claim(id!("C"), Scope::Project, "x");
        assert_eq!(c.check(), Ok(()));
        c.scope = None;
        assert_eq!(c.check(), Err(KindRule::ScopeMissing));
        let w = Element::warrant(id!("W"), "   ");
        assert_eq!(w.check(), Err(KindRule::TextEmpty));
        let mut e = Element::evidential_claim(id!("E"), "t");
        e.scope = Some(Scope::System);
        assert_eq!(e.check(), Err(KindRule::ScopeNotPermitted));
        let ev = Element::of_kind(id!("V"), ElementKind::Evidence, "t");
        assert_eq!(ev.check(), Err(KindRule::LocatorMissing));
    }

    #[test]
    fn locator_round_trip() {
        for s in ["docs/eia.pdf", "docs/eia.pdf#section-3", "https://example.org/a#b"] {
            assert_eq!(Locator::parse(s).unwrap().to_string(), s);
        }
        assert!(Locator::parse("x#").is_err());
        assert!(Locator::parse("#x").is_err());
        assert!(Locator::new("a#b", None).is_err());
    }
}
