use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::audit::{Actor, AuditRecord, Entry};
use super::element::{CaseElement, ElementKind};
use super::id::{ElementId, Ident, InvalidId, QuestionId};
use super::link::TraceLink;
use super::ModelError;
use crate::checklist::{Answer, Checklist};
use crate::goal::{GoalGraph, Satisfaction};
use crate::workflow::RegulatorRecord;

pub const SCHEMA_VERSION: u32 = 1;

/// The principles every checklist is expected to cover.
pub const MANDATORY_PRINCIPLES: [&str; 4] = ["transparency", "fairness", "accountability", "privacy"];

/// An ethical principle and its ordered segments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Principle {
    pub id: Ident,
    pub segments: Vec<Ident>,
}

impl Principle {
    pub fn has_segment(&self, segment: &Ident) -> bool {
        self.segments.contains(segment)
    }
}

/// Default segment layout for the four mandatory principles.
pub fn default_principles() -> Vec<Principle> {
    let make = |id: &str, segs: &[&str]| Principle {
        id: Ident::new(id).unwrap(),
        segments: segs.iter().map(|s| Ident::new(*s).unwrap()).collect(),
    };
    vec![
        make("transparency", &["traceability", "communication", "explainability"]),
        make("fairness", &["data_fairness", "model_fairness"]),
        make("accountability", &["responsibility", "auditability"]),
        make("privacy", &["data_protection", "consent"]),
    ]
}

/// Identifier of a whole case (file stem, URL segment).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CaseId(String);

impl CaseId {
    pub fn new(value: impl Into<String>) -> Result<Self, InvalidId> {
        // same lexical rule as question ids
        let value = value.into();
        QuestionId::new(value.clone()).map_err(|e| InvalidId { what: "case id", ..e })?;
        Ok(Self(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for CaseId {
    type Error = InvalidId;

    fn try_from(value: String) -> Result<Self, InvalidId> {
        CaseId::new(value)
    }
}

impl std::str::FromStr for CaseId {
    type Err = InvalidId;

    fn from_str(s: &str) -> Result<Self, InvalidId> {
        CaseId::new(s)
    }
}

impl From<CaseId> for String {
    fn from(id: CaseId) -> String {
        id.0
    }
}

impl std::fmt::Display for CaseId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Root aggregate of an ethics assurance case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssuranceCase {
    id: CaseId,
    title: String,
    schema_version: u32,
    threshold: Satisfaction,
    principles: Vec<Principle>,
    elements: BTreeMap<ElementId, CaseElement>,
    links: BTreeSet<TraceLink>,
    goal_graph: GoalGraph,
    checklist: Checklist,
    answers: BTreeMap<QuestionId, Answer>,
    #[serde(default)]
    regulator_reviews: Vec<RegulatorRecord>,
    #[serde(default)]
    audit: Vec<AuditRecord>,
}

impl AssuranceCase {
    pub fn new(id: CaseId, title: impl Into<String>) -> Self {
        Self {
            id,
            title: title.into(),
            schema_version: SCHEMA_VERSION,
            threshold: Satisfaction::MAX,
            principles: Vec::new(),
            elements: BTreeMap::new(),
            links: BTreeSet::new(),
            goal_graph: GoalGraph::default(),
            checklist: Checklist::default(),
            answers: BTreeMap::new(),
            regulator_reviews: Vec::new(),
            audit: Vec::new(),
        }
    }

    /// A case with the four mandatory principles already declared.
    pub fn with_default_principles(id: CaseId, title: impl Into<String>) -> Self {
        let mut case = Self::new(id, title);
        case.principles = default_principles();
        case
    }

    pub fn id(&self) -> &CaseId {
        &self.id
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn schema_version(&self) -> u32 {
        self.schema_version
    }

    /// Satisfaction a hazard-mitigation node must reach to count as mitigated.
    pub fn threshold(&self) -> Satisfaction {
        self.threshold
    }

    pub fn principles(&self) -> &[Principle] {
        &self.principles
    }

    pub fn principle(&self, id: &str) -> Option<&Principle> {
        self.principles.iter().find(|p| p.id.as_str() == id)
    }

    pub fn elements(&self) -> impl Iterator<Item = &CaseElement> {
        self.elements.values()
    }

    pub fn element(&self, id: &str) -> Option<&CaseElement> {
        self.elements.get(&ElementId::key(id))
    }

    pub fn elements_of(&self, kind: ElementKind) -> impl Iterator<Item = &CaseElement> {
        self.elements.values().filter(move |e| e.kind == kind)
    }

    pub fn links(&self) -> impl Iterator<Item = &TraceLink> {
        self.links.iter()
    }

    /// Links whose downstream end is `id`.
    pub fn links_from<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a TraceLink> + 'a {
        self.links.iter().filter(move |l| l.from.as_str() == id)
    }

    /// Links whose upstream end is `id`.
    pub fn links_to<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a TraceLink> + 'a {
        self.links.iter().filter(move |l| l.to.as_str() == id)
    }

    /// Question-to-requirement links derived from the checklist.
    pub fn question_links(&self) -> Vec<(QuestionId, ElementId)> {
        self.checklist
            .questions()
            .flat_map(|q| q.requirement_links.iter().map(move |r| (q.id.clone(), r.clone())))
            .collect()
    }

    pub fn goal_graph(&self) -> &GoalGraph {
        &self.goal_graph
    }

    pub fn checklist(&self) -> &Checklist {
        &self.checklist
    }

    pub fn answers(&self) -> &BTreeMap<QuestionId, Answer> {
        &self.answers
    }

    pub fn answer(&self, question: &str) -> Option<&Answer> {
        self.answers.get(&QuestionId::key(question))
    }

    pub fn regulator_reviews(&self) -> &[RegulatorRecord] {
        &self.regulator_reviews
    }

    pub fn audit(&self) -> &[AuditRecord] {
        &self.audit
    }

    /// True while no answer exists; principles may only be added then.
    pub fn registry_open(&self) -> bool {
        self.answers.is_empty()
    }

    /// Equality of the authored content, ignoring answers, reviews and audit.
    pub fn same_structure(&self, other: &Self) -> bool {
        self.id == other.id
            && self.title == other.title
            && self.schema_version == other.schema_version
            && self.threshold == other.threshold
            && self.principles == other.principles
            && self.elements == other.elements
            && self.links == other.links
            && self.goal_graph == other.goal_graph
            && self.checklist == other.checklist
    }

    /// Records that the case entered a store, typically right after parsing.
    pub fn record_creation(&mut self, actor: &Actor, at: DateTime<Utc>) {
        let entry = Entry::new("create_case", &self.id);
        self.record(actor, at, entry);
    }

    pub fn set_title(&mut self, title: impl Into<String>, actor: &Actor, at: DateTime<Utc>) {
        let title = title.into();
        let entry = Entry::new("set_title", &self.id).states(Some(&self.title), &title);
        self.title = title;
        self.record(actor, at, entry);
    }

    pub fn set_threshold(&mut self, threshold: Satisfaction, actor: &Actor, at: DateTime<Utc>) {
        let entry = Entry::new("set_threshold", &self.id).states(Some(self.threshold), threshold);
        self.threshold = threshold;
        self.record(actor, at, entry);
    }

    /// Declares a principle, or appends missing segments to an existing one.
    pub fn declare_principle(
        &mut self,
        principle: Principle,
        actor: &Actor,
        at: DateTime<Utc>,
    ) -> Result<(), ModelError> {
        let target = principle.id.clone();
        if !self.ensure_segments(&principle.id, &principle.segments)? {
            return Ok(());
        }
        self.record(actor, at, Entry::new("declare_principle", target));
        Ok(())
    }

    /// Returns whether anything changed.
    fn ensure_segments(&mut self, principle: &Ident, segments: &[Ident]) -> Result<bool, ModelError> {
        let existing = self.principles.iter().position(|p| &p.id == principle);
        let missing: Vec<Ident> = match existing {
            Some(i) => segments
                .iter()
                .filter(|s| !self.principles[i].has_segment(s))
                .cloned()
                .collect(),
            None => segments.to_vec(),
        };
        if existing.is_some() && missing.is_empty() {
            return Ok(false);
        }
        if !self.registry_open() {
            return Err(ModelError::RegistryClosed(principle.clone()));
        }
        let mut unique = Vec::new();
        for s in missing {
            if !unique.contains(&s) {
                unique.push(s);
            }
        }
        match existing {
            Some(i) => self.principles[i].segments.extend(unique),
            None => self.principles.push(Principle {
                id: principle.clone(),
                segments: unique,
            }),
        }
        Ok(true)
    }

    /// Stores a new element. Its principle and segment are declared on the fly
    /// while the registry is open.
    pub fn add_element(&mut self, element: CaseElement, actor: &Actor, at: DateTime<Utc>) -> Result<(), ModelError> {
        if self.elements.contains_key(&element.id) {
            return Err(ModelError::DuplicateId(element.id.to_string()));
        }
        element.validate().map_err(ModelError::InvalidElement)?;
        if let Some(action) = &element.action {
            match self.elements.get(&action.control_action) {
                Some(e) if e.kind == ElementKind::ControlAction => {}
                Some(e) => {
                    return Err(ModelError::InvalidElement(format!(
                        "{}: `{}` is a {}, not a control action",
                        element.id, e.id, e.kind
                    )))
                }
                None => return Err(ModelError::UnknownElement(action.control_action.to_string())),
            }
        }
        self.ensure_segments(&element.principle, std::slice::from_ref(&element.segment))?;
        let entry = Entry::new(format!("add_{}", element.kind), &element.id);
        self.elements.insert(element.id.clone(), element);
        self.record(actor, at, entry);
        Ok(())
    }

    /// Checks a link against the schema without storing it.
    pub fn check_link(&self, link: &TraceLink) -> Result<(), ModelError> {
        self.check_endpoints(link)?;
        if self.links.contains(link) {
            return Err(ModelError::DuplicateLink {
                from: link.from.clone(),
                to: link.to.clone(),
                kind: link.kind,
            });
        }
        Ok(())
    }

    fn check_endpoints(&self, link: &TraceLink) -> Result<(), ModelError> {
        let Some((want_from, want_to)) = link.kind.endpoints() else {
            return Err(ModelError::QuestionLinkNotStored);
        };
        if link.from == link.to {
            return Err(ModelError::SelfLink(link.from.clone()));
        }
        let from = self
            .elements
            .get(&link.from)
            .ok_or_else(|| ModelError::UnknownEndpoint(link.from.clone()))?;
        let to = self
            .elements
            .get(&link.to)
            .ok_or_else(|| ModelError::UnknownEndpoint(link.to.clone()))?;
        if from.kind != want_from || to.kind != want_to {
            return Err(ModelError::KindMismatch {
                link: link.kind,
                from: from.id.clone(),
                from_kind: from.kind,
                to: to.id.clone(),
                to_kind: to.kind,
            });
        }
        // Endpoint kinds always sit at strictly decreasing chain depth, so a
        // schema-valid link cannot close a cycle.
        debug_assert!(super::link::chain_depth(from.kind) > super::link::chain_depth(to.kind));
        Ok(())
    }

    pub fn add_link(&mut self, link: TraceLink, actor: &Actor, at: DateTime<Utc>) -> Result<(), ModelError> {
        self.check_link(&link)?;
        let entry = Entry::new(format!("link_{}", link.kind), format!("{}->{}", link.from, link.to));
        self.links.insert(link);
        self.record(actor, at, entry);
        Ok(())
    }

    pub fn remove_link(&mut self, link: &TraceLink, actor: &Actor, at: DateTime<Utc>) -> Result<(), ModelError> {
        if !self.links.remove(link) {
            return Err(ModelError::UnknownLink {
                from: link.from.clone(),
                to: link.to.clone(),
                kind: link.kind,
            });
        }
        let entry = Entry::new(format!("unlink_{}", link.kind), format!("{}->{}", link.from, link.to));
        self.record(actor, at, entry);
        Ok(())
    }

    pub(crate) fn record(&mut self, actor: &Actor, at: DateTime<Utc>, entry: Entry) {
        let seq = self.audit.len() as u64 + 1;
        self.audit.push(AuditRecord {
            seq,
            actor: actor.user.clone(),
            role: actor.role,
            action: entry.action,
            target: entry.target,
            timestamp: at,
            prior_state: entry.prior_state,
            new_state: entry.new_state,
        });
    }

    pub(crate) fn goal_graph_mut(&mut self) -> &mut GoalGraph {
        &mut self.goal_graph
    }

    pub(crate) fn checklist_mut(&mut self) -> &mut Checklist {
        &mut self.checklist
    }

    pub(crate) fn answers_mut(&mut self) -> &mut BTreeMap<QuestionId, Answer> {
        &mut self.answers
    }

    pub(crate) fn regulator_reviews_mut(&mut self) -> &mut Vec<RegulatorRecord> {
        &mut self.regulator_reviews
    }

    /// Removes and returns the audit trail; used by stores that keep it in a
    /// separate append-only file.
    pub fn take_audit(&mut self) -> Vec<AuditRecord> {
        std::mem::take(&mut self.audit)
    }

    /// Reattaches a previously taken audit trail.
    pub fn restore_audit(&mut self, audit: Vec<AuditRecord>) {
        self.audit = audit;
    }

    /// Structural constructor used by the DSL builder: no audit records.
    pub(crate) fn set_authored(&mut self, title: String, threshold: Satisfaction, schema_version: u32) {
        self.title = title;
        self.threshold = threshold;
        self.schema_version = schema_version;
    }

    /// Re-checks every structural invariant, e.g. after deserializing.
    pub fn validate(&self) -> Result<(), ModelError> {
        for (id, e) in &self.elements {
            if id != &e.id {
                return Err(ModelError::InvalidElement(format!(
                    "{id}: key does not match element id {}",
                    e.id
                )));
            }
            e.validate().map_err(ModelError::InvalidElement)?;
            match self.principle(e.principle.as_str()) {
                Some(p) if p.has_segment(&e.segment) => {}
                _ => {
                    return Err(ModelError::InvalidElement(format!(
                        "{}: undeclared segment {}/{}",
                        e.id, e.principle, e.segment
                    )))
                }
            }
        }
        for link in &self.links {
            self.check_endpoints(link)?;
        }
        for (i, rec) in self.audit.iter().enumerate() {
            if rec.seq != i as u64 + 1 {
                return Err(ModelError::AuditGap {
                    expected: i as u64 + 1,
                    found: rec.seq,
                });
            }
        }
        Ok(())
    }
}
