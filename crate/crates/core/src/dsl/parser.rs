use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use chrono::NaiveDate;

use super::diagnostic::{codes, ParseDiagnostic, SourceSpan};
use super::lexer::{lex, Line, Token, TokenKind};
use crate::appraisal::{store_appraisal, AppraisalError, AppraisalRecord, Assessed, UnitValue};
use crate::lifecycle::LifecycleStage;
use crate::model::{
    is_valid_text, AudienceTier, Case, Challenge, ChallengeState, Element, ElementKind, GoalSlots, Link, LinkKind,
    Locator, ModelError, Phase, Qualifier, QualifierLabel, Scope, TemplateError, Timestamp,
};
use crate::patterns::SlotType;
use crate::Id;

/// Identifier given to a case whose header names none.
pub const DEFAULT_CASE_ID: &str = "case";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    Case,
    Pattern,
}

#[derive(Debug, Clone)]
pub(crate) enum Stmt {
    Header { title: String, phase: Phase, id: Option<Id>, created: Option<Timestamp>, modified: Option<Timestamp> },
    Element(Element),
    Link(Link),
    Appraisal(AppraisalRecord),
    Challenge(Challenge),
    Pattern(Id),
    Intent(String),
    Applicability(String),
    Risk(String),
    Slot(String, SlotType),
}

type Diag = ParseDiagnostic;

struct Cursor<'a> {
    line: &'a Line,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.line.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.line.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn last_span(&self) -> SourceSpan {
        self.line.tokens.last().expect("non-empty line").span
    }

    fn missing(&self, what: &str) -> Diag {
        Diag::error(self.last_span(), codes::SYNTAX, format!("expected {what} at end of line"))
    }

    fn unexpected(t: &Token, what: &str) -> Diag {
        Diag::error(t.span, codes::SYNTAX, format!("expected {what}, found {}", t.describe()))
    }

    fn keyword(&mut self, kw: &str) -> Result<SourceSpan, Diag> {
        match self.bump() {
            Some(t) if t.word() == Some(kw) => Ok(t.span),
            Some(t) => Err(Self::unexpected(t, &format!("`{kw}`"))),
            None => Err(self.missing(&format!("`{kw}`"))),
        }
    }

    fn word(&mut self, what: &str) -> Result<(&'a str, SourceSpan), Diag> {
        match self.bump() {
            Some(t) => match &t.kind {
                TokenKind::Word(w) => Ok((w.as_str(), t.span)),
                TokenKind::Str(_) => Err(Self::unexpected(t, what)),
            },
            None => Err(self.missing(what)),
        }
    }

    fn id(&mut self, what: &str) -> Result<(Id, SourceSpan), Diag> {
        let (w, span) = self.word(what)?;
        Id::new(w)
            .map(|id| (id, span))
            .map_err(|e| Diag::error(span, codes::BAD_ID, format!("{what}: {e}")))
    }

    fn string(&mut self, what: &str) -> Result<(String, SourceSpan), Diag> {
        match self.bump() {
            Some(t) => match &t.kind {
                TokenKind::Str(s) => Ok((s.clone(), t.span)),
                TokenKind::Word(_) => Err(Self::unexpected(t, what)),
            },
            None => Err(self.missing(what)),
        }
    }

    fn text(&mut self, what: &str) -> Result<(String, SourceSpan), Diag> {
        let (s, span) = self.string(what)?;
        check_text(&s, span, what)?;
        Ok((s, span))
    }

    fn value<T: FromStr>(&mut self, what: &str) -> Result<(T, SourceSpan), Diag>
    where
        T::Err: std::fmt::Display,
    {
        let (w, span) = self.word(what)?;
        parse_value(w, span, what)
    }

    fn optional_string(&mut self) -> Option<(String, SourceSpan)> {
        match self.peek() {
            Some(Token { kind: TokenKind::Str(s), span }) => {
                self.pos += 1;
                Some((s.clone(), *span))
            }
            _ => None,
        }
    }

    fn at_word(&self, kw: &str) -> bool {
        self.peek().and_then(Token::word) == Some(kw)
    }

    fn finish(&self) -> Result<(), Diag> {
        match self.peek() {
            Some(t) => Err(Diag::error(t.span, codes::SYNTAX, format!("unexpected {} at end of statement", t.describe()))),
            None => Ok(()),
        }
    }
}

fn parse_value<T: FromStr>(w: &str, span: SourceSpan, what: &str) -> Result<(T, SourceSpan), Diag>
where
    T::Err: std::fmt::Display,
{
    w.parse::<T>().map(|v| (v, span)).map_err(|e| Diag::error(span, codes::BAD_VALUE, format!("{what}: {e}")))
}

fn check_text(s: &str, span: SourceSpan, what: &str) -> Result<(), Diag> {
    if is_valid_text(s) {
        Ok(())
    } else {
        Err(Diag::error(span, codes::EMPTY_TEXT, format!("{what} must not be blank")))
    }
}

fn stage(w: &str, span: SourceSpan) -> Result<LifecycleStage, Diag> {
    w.parse().map_err(|_| {
        Diag::error(span, codes::UNKNOWN_STAGE, format!("unknown lifecycle stage `{w}` (expected one of {})", LifecycleStage::names()))
    })
}

/// Optional `<keyword> <value>` clauses in any order, plus a trailing text.
#[derive(Default)]
struct Clauses {
    words: BTreeMap<&'static str, (String, SourceSpan)>,
    strings: BTreeMap<&'static str, (String, SourceSpan)>,
    text: Option<(String, SourceSpan)>,
}

impl Clauses {
    fn read(cur: &mut Cursor<'_>, word_clauses: &[&'static str], string_clauses: &[&'static str]) -> Result<Self, Diag> {
        let mut out = Clauses::default();
        while let Some(t) = cur.bump() {
            match &t.kind {
                TokenKind::Str(s) => {
                    out.text = Some((s.clone(), t.span));
                    cur.finish()?;
                    break;
                }
                TokenKind::Word(w) => {
                    let known_word = word_clauses.iter().find(|k| **k == w.as_str());
                    let known_str = string_clauses.iter().find(|k| **k == w.as_str());
                    let seen = out.words.contains_key(w.as_str()) || out.strings.contains_key(w.as_str());
                    if seen {
                        return Err(Diag::error(t.span, codes::SYNTAX, format!("duplicate `{w}` clause")));
                    }
                    if let Some(k) = known_word {
                        let (v, span) = cur.word(&format!("a value after `{k}`"))?;
                        out.words.insert(k, (v.to_string(), span));
                    } else if let Some(k) = known_str {
                        let (v, span) = cur.string(&format!("a quoted value after `{k}`"))?;
                        out.strings.insert(k, (v, span));
                    } else {
                        let mut expected: Vec<&str> = word_clauses.iter().chain(string_clauses).copied().collect();
                        expected.push("quoted text");
                        return Err(Cursor::unexpected(t, &format!("one of {}", expected.join(", "))));
                    }
                }
            }
        }
        Ok(out)
    }

    fn stage(&self) -> Result<Option<LifecycleStage>, Diag> {
        self.words.get("stage").map(|(w, span)| stage(w, *span)).transpose()
    }

    fn tier(&self) -> Result<AudienceTier, Diag> {
        match self.words.get("tier") {
            Some((w, span)) => parse_value(w, *span, "tier").map(|(t, _)| t),
            None => Ok(AudienceTier::Public),
        }
    }

    fn required_text(&self, cur: &Cursor<'_>) -> Result<String, Diag> {
        let (s, span) = self.text.clone().ok_or_else(|| cur.missing("quoted text"))?;
        check_text(&s, span, "text")?;
        Ok(s)
    }
}

fn element_stmt(kw: &str, cur: &mut Cursor<'_>, mode: Mode) -> Result<Element, Vec<Diag>> {
    let (id, id_span) = cur.id("element identifier").map_err(|d| vec![d])?;
    if kw == "goal" {
        return goal_stmt(id, id_span, cur, mode);
    }
    let (word_clauses, string_clauses): (&[&'static str], &[&'static str]) = match kw {
        "claim" => (&["scope", "stage", "tier"], &[]),
        "evidence" => (&["stage", "tier"], &["at"]),
        _ => (&["stage", "tier"], &[]),
    };
    let one = |d: Diag| vec![d];
    let cl = Clauses::read(cur, word_clauses, string_clauses).map_err(one)?;
    let text = cl.required_text(cur).map_err(one)?;
    let mut element = match kw {
        "claim" => {
            let (w, span) = cl.words.get("scope").cloned().ok_or_else(|| one(cur.missing("`scope <system|project>`")))?;
            let (scope, _) = parse_value::<Scope>(&w, span, "scope").map_err(one)?;
            Element::property_claim(id, scope, text)
        }
        "evidence" => {
            let (loc, span) = cl.strings.get("at").cloned().ok_or_else(|| one(cur.missing("`at \"<locator>\"`")))?;
            let locator =
                Locator::parse(&loc).map_err(|e| one(Diag::error(span, codes::BAD_LOCATOR, e.to_string())))?;
            Element::evidence(id, locator, text)
        }
        "context" => Element::context(id, text),
        "eclaim" => Element::evidential_claim(id, text),
        "warrant" => Element::warrant(id, text),
        "assume" => Element::assumption(id, text),
        _ => unreachable!("dispatch covers element keywords"),
    };
    element.stage = cl.stage().map_err(one)?;
    element.tier = cl.tier().map_err(one)?;
    Ok(element)
}

fn goal_stmt(id: Id, id_span: SourceSpan, cur: &mut Cursor<'_>, mode: Mode) -> Result<Element, Vec<Diag>> {
    let stmt_span = cur.line.span();
    let cl = Clauses::read(cur, &["stage", "tier"], &["system", "context", "value"]);
    let slot_names = ["system", "context", "value"];
    let present: Vec<&str> = match &cl {
        Ok(c) => slot_names.iter().copied().filter(|k| c.strings.contains_key(k)).collect(),
        Err(_) => slot_names.iter().copied().filter(|k| cur.line.tokens.iter().any(|t| t.word() == Some(k))).collect(),
    };
    if present.len() < 3 {
        let has_text = matches!(&cl, Ok(c) if c.text.is_some());
        let d = if present.is_empty() && has_text {
            Diag::error(
                stmt_span,
                codes::UNDERSPECIFIED_GOAL,
                format!("goal `{id}` is free text; state its system, context and value slots"),
            )
        } else {
            let missing: Vec<&str> = slot_names.iter().copied().filter(|k| !present.contains(k)).collect();
            Diag::error(stmt_span, codes::GOAL_SLOTS, format!("goal `{id}` is missing slot(s): {}", missing.join(", ")))
        };
        return Err(vec![d]);
    }
    let cl = cl.map_err(|d| vec![d])?;
    let slot = |k: &str| cl.strings[k].clone();
    let ((system, s_span), (context, c_span), (value, v_span)) = (slot("system"), slot("context"), slot("value"));
    let built = match mode {
        Mode::Case => GoalSlots::new(system, context, value),
        Mode::Pattern => GoalSlots::template(system, context, value),
    };
    let slots = built.map_err(|e| {
        let (span, code) = match &e {
            TemplateError::BraceInSlot(n) => (slot_span(*n, s_span, c_span, v_span), codes::BRACE_IN_SLOT),
            TemplateError::EmptySlot(n) | TemplateError::MultilineSlot(n) => {
                (slot_span(*n, s_span, c_span, v_span), codes::EMPTY_TEXT)
            }
        };
        vec![Diag::error(span, code, e.to_string())]
    })?;
    let mut element = Element::goal(id, slots);
    if let Some((text, span)) = &cl.text {
        check_text(text, *span, "goal text").map_err(|d| vec![d])?;
        element.text = text.clone();
    }
    element.stage = cl.stage().map_err(|d| vec![d])?;
    element.tier = cl.tier().map_err(|d| vec![d])?;
    let _ = id_span;
    Ok(element)
}

fn slot_span(n: crate::model::SlotName, s: SourceSpan, c: SourceSpan, v: SourceSpan) -> SourceSpan {
    match n {
        crate::model::SlotName::System => s,
        crate::model::SlotName::Context => c,
        crate::model::SlotName::Goal => v,
    }
}

fn link_stmt(cur: &mut Cursor<'_>) -> Result<Link, Diag> {
    let (id, _) = cur.id("link identifier")?;
    let (kind, _) = cur.value::<LinkKind>("link kind")?;
    let (from, _) = cur.id("link source")?;
    cur.keyword("->")?;
    let (to, _) = cur.id("link target")?;
    let mut link = Link::new(id, kind, from, to);
    if cur.at_word("qualifier") {
        cur.bump();
        let (label, _) = cur.value::<QualifierLabel>("qualifier label")?;
        let mut q = Qualifier::new(label);
        if let Some((note, span)) = cur.optional_string() {
            check_text(&note, span, "qualifier note")?;
            q.note = Some(note);
        }
        link.qualifier = Some(q);
    }
    cur.finish()?;
    Ok(link)
}

fn appraisal_stmt(cur: &mut Cursor<'_>) -> Result<AppraisalRecord, Diag> {
    fn verdict<T: FromStr>(cur: &mut Cursor<'_>, kw: &str) -> Result<Assessed<T>, Diag>
    where
        T::Err: std::fmt::Display,
    {
        cur.keyword(kw)?;
        let (v, _) = cur.value::<T>(kw)?;
        let note = match cur.optional_string() {
            Some((n, span)) => {
                check_text(&n, span, "note")?;
                Some(n)
            }
            None => None,
        };
        Ok(Assessed { verdict: v, note })
    }
    let (evidence, _) = cur.id("evidence identifier")?;
    let relevance = verdict(cur, "relevance")?;
    let materiality = verdict(cur, "materiality")?;
    let admissibility = verdict(cur, "admissibility")?;
    cur.keyword("value")?;
    let (raw, span) = cur.word("probative value")?;
    let v: f64 = raw
        .parse()
        .map_err(|_| Diag::error(span, codes::BAD_VALUE, format!("probative value `{raw}` is not a number")))?;
    let probative_value = UnitValue::new(v).map_err(|e| Diag::error(span, codes::VALUE_RANGE, e.to_string()))?;
    cur.keyword("by")?;
    let (assessor, _) = cur.text("assessor")?;
    cur.keyword("on")?;
    let (raw, span) = cur.word("appraisal date")?;
    let date = NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .map_err(|_| Diag::error(span, codes::BAD_VALUE, format!("date `{raw}` is not YYYY-MM-DD")))?;
    cur.finish()?;
    Ok(AppraisalRecord { evidence, relevance, materiality, admissibility, probative_value, assessor, date })
}

fn challenge_stmt(cur: &mut Cursor<'_>) -> Result<Challenge, Diag> {
    let (id, _) = cur.id("challenge identifier")?;
    cur.keyword("on")?;
    let (target, _) = cur.id("challenge target")?;
    cur.keyword("by")?;
    let (author, _) = cur.text("author")?;
    let (text, _) = cur.text("challenge text")?;
    let mut c = Challenge::open(id, target, author, text);
    if cur.at_word("state") {
        cur.bump();
        let (state, _) = cur.value::<ChallengeState>("challenge state")?;
        c.state = state;
        if cur.at_word("note") {
            cur.bump();
            let (note, _) = cur.text("resolution note")?;
            c.resolution_note = Some(note);
        }
    }
    cur.finish()?;
    Ok(c)
}

fn header_stmt(cur: &mut Cursor<'_>) -> Result<Stmt, Diag> {
    let (title, _) = cur.text("case title")?;
    cur.keyword("phase")?;
    let (phase, _) = cur.value::<Phase>("phase")?;
    let (mut id, mut created, mut modified) = (None, None, None);
    let mut seen = BTreeSet::new();
    while let Some(t) = cur.bump() {
        let kw = t.word().ok_or_else(|| Cursor::unexpected(t, "`id`, `created` or `modified`"))?;
        if !seen.insert(kw) {
            return Err(Diag::error(t.span, codes::SYNTAX, format!("duplicate `{kw}` clause")));
        }
        match kw {
            "id" => id = Some(cur.id("case identifier")?.0),
            "created" | "modified" => {
                let (w, span) = cur.word("timestamp")?;
                let ts = Timestamp::parse(w).ok_or_else(|| {
                    Diag::error(span, codes::BAD_VALUE, format!("timestamp `{w}` is not YYYY-MM-DDTHH:MM:SSZ"))
                })?;
                if kw == "created" {
                    created = Some(ts);
                } else {
                    modified = Some(ts);
                }
            }
            _ => return Err(Cursor::unexpected(t, "`id`, `created` or `modified`")),
        }
    }
    Ok(Stmt::Header { title, phase, id, created, modified })
}

fn pattern_line(kw: &str, cur: &mut Cursor<'_>) -> Result<Stmt, Diag> {
    let stmt = match kw {
        "pattern" => Stmt::Pattern(cur.id("pattern identifier")?.0),
        "intent" => Stmt::Intent(cur.text("intent")?.0),
        "applicability" => Stmt::Applicability(cur.text("applicability")?.0),
        "risk" => Stmt::Risk(cur.text("risk")?.0),
        "slot" => {
            let name = match cur.bump() {
                Some(Token { kind: TokenKind::Str(s), .. }) | Some(Token { kind: TokenKind::Word(s), .. }) => s.clone(),
                None => return Err(cur.missing("slot name")),
            };
            let span = cur.line.tokens[cur.pos - 1].span;
            if !crate::patterns::is_valid_slot_name(&name) {
                return Err(Diag::error(span, codes::BAD_VALUE, format!("invalid slot name {name:?}")));
            }
            cur.keyword(":")?;
            let (ty, _) = cur.value::<SlotType>("slot type")?;
            Stmt::Slot(name, ty)
        }
        _ => unreachable!("dispatch covers pattern keywords"),
    };
    cur.finish()?;
    Ok(stmt)
}

/// Parses every line into a statement, collecting diagnostics.
pub(crate) fn statements(source: &str, mode: Mode) -> (Vec<(Stmt, SourceSpan)>, Vec<Diag>) {
    let (lines, mut diags) = lex(source);
    let broken: BTreeSet<usize> = diags.iter().map(|d| d.span.line).collect();
    let mut out = Vec::new();
    for line in lines.iter().filter(|l| !broken.contains(&l.number)) {
        let mut cur = Cursor { line, pos: 0 };
        let first = cur.bump().expect("non-empty line");
        let Some(kw) = first.word() else {
            diags.push(Diag::error(first.span, codes::SYNTAX, "statement must start with a keyword"));
            continue;
        };
        let span = line.span();
        let result: Result<Stmt, Vec<Diag>> = match (kw, mode) {
            ("goal" | "context" | "claim" | "eclaim" | "evidence" | "warrant" | "assume", _) => {
                element_stmt(kw, &mut cur, mode).map(Stmt::Element)
            }
            ("link", _) => link_stmt(&mut cur).map(Stmt::Link).map_err(|d| vec![d]),
            ("case", Mode::Case) => header_stmt(&mut cur).map_err(|d| vec![d]),
            ("appraisal", Mode::Case) => appraisal_stmt(&mut cur).map(Stmt::Appraisal).map_err(|d| vec![d]),
            ("challenge", Mode::Case) => challenge_stmt(&mut cur).map(Stmt::Challenge).map_err(|d| vec![d]),
            ("pattern" | "intent" | "applicability" | "risk" | "slot", Mode::Pattern) => {
                pattern_line(kw, &mut cur).map_err(|d| vec![d])
            }
            _ => Err(vec![Diag::error(first.span, codes::UNKNOWN_KEYWORD, format!("unknown keyword `{kw}`"))]),
        };
        match result {
            Ok(stmt) => out.push((stmt, span)),
            Err(ds) => diags.extend(ds),
        }
    }
    (out, diags)
}

pub(crate) fn model_diag(span: SourceSpan, err: &ModelError) -> Diag {
    let code = match err {
        ModelError::DuplicateId(_) => codes::DUPLICATE_ID,
        ModelError::DanglingEndpoint { .. } | ModelError::DanglingTarget { .. } | ModelError::NotFound(_) => {
            codes::DANGLING_REF
        }
        ModelError::IncompatibleKinds { .. } => codes::KIND_MISMATCH,
        ModelError::QualifierNotPermitted { .. } => codes::QUALIFIER,
        ModelError::DuplicateLink { .. } => codes::DUPLICATE_LINK,
        ModelError::CycleIntroduced { .. } => codes::CYCLE,
        ModelError::NoteRequired { .. } => codes::NOTE_REQUIRED,
        ModelError::InvalidTitle | ModelError::InvalidChallengeText { .. } => codes::EMPTY_TEXT,
        ModelError::KindInvariantViolation { .. } | ModelError::ChallengeNotOpen { .. } | ModelError::AlreadyClosed { .. } => {
            codes::SYNTAX
        }
    };
    Diag::error(span, code, err.to_string())
}

/// A parsed case with the source position of every element, link and challenge.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub case: Case,
    pub spans: BTreeMap<Id, SourceSpan>,
    pub warnings: Vec<ParseDiagnostic>,
}

/// Parses `.eac` source. On failure every diagnostic found is returned,
/// errors and warnings together, in source order.
pub fn parse(source: &str) -> Result<Parsed, Vec<ParseDiagnostic>> {
    let (stmts, mut diags) = statements(source, Mode::Case);
    let mut header: Option<(Case, SourceSpan)> = None;
    let mut elements = Vec::new();
    let mut links = Vec::new();
    let mut warrants = Vec::new();
    let mut appraisals = Vec::new();
    let mut challenges = Vec::new();
    let mut saw_body = false;
    for (stmt, span) in stmts {
        match stmt {
            Stmt::Header { title, phase, id, created, modified } => {
                if header.is_some() {
                    diags.push(Diag::error(span, codes::DUPLICATE_HEADER, "case header appears more than once"));
                    continue;
                }
                if saw_body {
                    diags.push(Diag::error(span, codes::MISSING_HEADER, "case header must be the first statement"));
                }
                let id = id.unwrap_or_else(|| Id::new(DEFAULT_CASE_ID).expect("valid"));
                match Case::new(id, title, phase) {
                    Ok(c) => header = Some((c.with_timestamps(created, modified), span)),
                    Err(e) => diags.push(model_diag(span, &e)),
                }
            }
            Stmt::Element(e) => {
                saw_body = true;
                elements.push((e, span));
            }
            Stmt::Link(l) if l.kind == LinkKind::Warrants => {
                saw_body = true;
                warrants.push((l, span));
            }
            Stmt::Link(l) => {
                saw_body = true;
                links.push((l, span));
            }
            Stmt::Appraisal(a) => {
                saw_body = true;
                appraisals.push((a, span));
            }
            Stmt::Challenge(c) => {
                saw_body = true;
                challenges.push((c, span));
            }
            Stmt::Pattern(_) | Stmt::Intent(_) | Stmt::Applicability(_) | Stmt::Risk(_) | Stmt::Slot(..) => {
                unreachable!("pattern statements are rejected in case mode")
            }
        }
    }
    let mut case = match header {
        Some((c, _)) => c,
        None => {
            let span = source_start(source);
            if !diags.iter().any(|d| d.code == codes::MISSING_HEADER) {
                diags.push(Diag::error(span, codes::MISSING_HEADER, "expected `case \"<title>\" phase <phase>` header"));
            }
            Case::new(Id::new(DEFAULT_CASE_ID).expect("valid"), "untitled", Phase::Preliminary).expect("valid")
        }
    };
    let mut spans = BTreeMap::new();
    for (e, span) in elements {
        let id = e.id.clone();
        match case.push_element(e) {
            Ok(()) => {
                spans.insert(id, span);
            }
            Err(err) => diags.push(model_diag(span, &err)),
        }
    }
    for (l, span) in links.into_iter().chain(warrants) {
        let id = l.id.clone();
        match case.push_link(l) {
            Ok(()) => {
                spans.insert(id, span);
            }
            Err(err) => diags.push(model_diag(span, &err)),
        }
    }
    for (a, span) in appraisals {
        let evidence = a.evidence.clone();
        match store_appraisal(&mut case, a) {
            Ok(None) => {}
            Ok(Some(_)) => diags.push(Diag::warning(
                span,
                codes::SUPERSEDED_APPRAISAL,
                format!("appraisal of `{evidence}` replaces an earlier one"),
            )),
            Err(AppraisalError::NotEvidence(id)) => {
                diags.push(Diag::error(span, codes::NOT_EVIDENCE, format!("`{id}` is not an Evidence element")))
            }
            Err(err) => diags.push(Diag::error(span, codes::EMPTY_TEXT, err.to_string())),
        }
    }
    for (c, span) in challenges {
        let id = c.id.clone();
        match case.push_challenge(c) {
            Ok(()) => {
                spans.insert(id, span);
            }
            Err(err) => diags.push(model_diag(span, &err)),
        }
    }
    diags.sort_by_key(|a| a.span);
    if diags.iter().any(ParseDiagnostic::is_error) {
        Err(diags)
    } else {
        Ok(Parsed { case, spans, warnings: diags })
    }
}

/// Parses `.eac` source, discarding positions and warnings.
pub fn parse_case(source: &str) -> Result<Case, Vec<ParseDiagnostic>> {
    parse(source).map(|p| p.case)
}

fn source_start(source: &str) -> SourceSpan {
    let (lines, _) = lex(source);
    lines.first().map(Line::span).unwrap_or_else(|| SourceSpan::new(1, 1, 1))
}

pub(crate) fn element_kind_keyword(kind: ElementKind) -> &'static str {
    match kind {
        ElementKind::Goal => "goal",
        ElementKind::Context => "context",
        ElementKind::PropertyClaim => "claim",
        ElementKind::EvidentialClaim => "eclaim",
        ElementKind::Evidence => "evidence",
        ElementKind::Warrant => "warrant",
        ElementKind::Assumption => "assume",
    }
}
