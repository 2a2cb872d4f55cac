use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use eac_core::appraisal::{record_appraisal, sufficiency, AppraisalRecord, Assessed, UnitValue, DEFAULT_THRESHOLD};
use eac_core::dsl::{appraisal_line, parse, parse_case, serialize, Parsed};
use eac_core::export::{sufficiency_document, to_dot, to_interchange, to_report_with, TierFilter};
use eac_core::lifecycle::{coverage, diff, snapshot_at, ChangeSet, Changes, DiffError, FieldChange, LifecycleStage, Snapshot, SnapshotLabel};
use eac_core::model::{goal_from_template, AudienceTier, Case, Phase, Timestamp};
use eac_core::patterns::{check_applicability, derive_with_bindings, instantiate, parse_pattern, serialize_pattern, Bindings, CaseMeta};
use eac_core::validation::{compute_status, explain_status, validate_at};
use eac_core::{id, Id};
use serde_json::{json, Value};

use crate::config::Config;
use crate::diagnostics::{self, header_span, json_doc, write_human, Located};
use crate::{Cli, Command, ExitStatus, FilterArgs, Failure, Format, PatternCommand};

type Outcome = Result<ExitStatus, Failure>;

struct Io<'a> {
    json: bool,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn print(&mut self, text: &str) -> Result<(), Failure> {
        self.stdout.write_all(text.as_bytes()).map_err(stream_failure)
    }

    fn document(&mut self, doc: &Value) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(doc).expect("json values serialize");
        self.print(&format!("{text}\n"))
    }

    /// Informational lines go to stderr so stdout stays machine-readable.
    fn note(&mut self, text: &str) {
        let _ = writeln!(self.stderr, "{text}");
    }
}

fn stream_failure(source: io::Error) -> Failure {
    Failure::Io { path: PathBuf::from("<stdout>"), source }
}

pub(crate) fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome {
    let mut io = Io { json: cli.json, stdout, stderr };
    match cli.command {
        Command::New { title, id, output } => new(&mut io, &title, id.as_deref(), output),
        Command::Validate { file, phase, strict } => validate(&mut io, &file, phase.as_deref(), strict),
        Command::Status { file, explain } => status(&mut io, &file, explain.as_deref()),
        Command::Render { file, format, filter, threshold, output } => {
            render(&mut io, &file, format, &filter, threshold, output.as_deref())
        }
        Command::Appraise { file, evidence, relevance, materiality, admissibility, value, assessor, date, output } => {
            let fields = AppraiseFields { evidence, relevance, materiality, admissibility, value, assessor, date };
            appraise(&mut io, &file, fields, output.as_deref())
        }
        Command::Sufficiency { file, threshold } => sufficiency_cmd(&mut io, &file, threshold),
        Command::Coverage { file } => coverage_cmd(&mut io, &file),
        Command::Pattern(PatternCommand::Instantiate { pattern, bind, prefix, into, output }) => {
            pattern_instantiate(&mut io, &pattern, &bind, &prefix, into.as_deref(), output.as_deref())
        }
        Command::Pattern(PatternCommand::Derive { cases, output }) => pattern_derive(&mut io, &cases, output.as_deref()),
        Command::Snapshot { file, label, at, output } => snapshot_cmd(&mut io, &file, &label, at.as_deref(), output),
        Command::Diff { from, to } => diff_cmd(&mut io, &from, &to),
        Command::Serve { dir, addr } => serve(&mut io, &dir, &addr),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|source| Failure::Io { path: path.to_path_buf(), source })
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|source| Failure::Io { path: path.to_path_buf(), source })
}

fn shown(path: &Path) -> String {
    path.display().to_string()
}

fn load(path: &Path) -> Result<(String, Parsed), Failure> {
    let source = read(path)?;
    match parse(&source) {
        Ok(parsed) => Ok((source, parsed)),
        Err(diagnostics) => Err(Failure::Parse { file: shown(path), diagnostics }),
    }
}

fn load_case(path: &Path) -> Result<Case, Failure> {
    Ok(load(path)?.1.case)
}

fn keyword<T: std::str::FromStr>(s: &str) -> Result<T, Failure>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>().map_err(|e| Failure::Usage(e.to_string()))
}

fn id_arg(s: &str) -> Result<Id, Failure> {
    Id::new(s).map_err(|e| Failure::Usage(e.to_string()))
}

fn slug(title: &str) -> String {
    let mut out = String::new();
    for c in title.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    let trimmed = out.trim_matches('_');
    if trimmed.starts_with(|c: char| c.is_ascii_alphabetic()) {
        trimmed.to_string()
    } else {
        format!("case_{trimmed}").trim_end_matches('_').to_string()
    }
}

fn new(io: &mut Io, title: &str, id: Option<&str>, output: Option<PathBuf>) -> Outcome {
    let id = id_arg(&id.map(str::to_string).unwrap_or_else(|| slug(title)))?;
    let goal = goal_from_template(id!("G1"), "the system", "its context of use", "the ethical goal")
        .expect("scaffold slots are well formed");
    let case = Case::new(id.clone(), title, Phase::Preliminary)
        .and_then(|c| c.add_element(goal))
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let path = output.unwrap_or_else(|| PathBuf::from(format!("{id}.eac")));
    let text = serialize(&case);
    fs::OpenOptions::new()
        .write(true)
        .create_new(true)
        .open(&path)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(|source| Failure::Io { path: path.clone(), source })?;
    if io.json {
        io.document(&json!({ "version": "1", "file": shown(&path), "case": interchange_value(&case) }))?;
    } else {
        io.print(&format!("created {}\n", shown(&path)))?;
    }
    Ok(ExitStatus::Success)
}

fn interchange_value(case: &Case) -> Value {
    serde_json::from_str(&to_interchange(case)).expect("interchange output is json")
}

fn validate(io: &mut Io, file: &Path, phase: Option<&str>, strict: bool) -> Outcome {
    let config = Config::for_file(file)?;
    let phase_flag = phase.map(keyword::<Phase>).transpose()?;
    let source = read(file)?;
    let name = shown(file);
    let (mut found, phase) = match parse(&source) {
        Ok(parsed) => {
            let phase = phase_flag.or(config.phase).unwrap_or(parsed.case.phase());
            let report = validate_at(&parsed.case, phase);
            let fallback = header_span(&source);
            let mut found: Vec<Located> = parsed.warnings.iter().map(Located::from_parse).collect();
            found.extend(report.findings.iter().map(|f| Located::from_finding(f, &parsed.spans, fallback)));
            (found, Some(phase))
        }
        Err(diagnostics) => {
            // lexical and syntax errors are usage failures, reported on stderr
            if diagnostics.iter().any(|d| d.is_error() && !d.is_structural()) {
                return Err(Failure::Parse { file: name, diagnostics });
            }
            (diagnostics.iter().map(Located::from_parse).collect(), None)
        }
    };
    diagnostics::sort(&mut found);
    if io.json {
        let mut doc = json_doc(&name, &found);
        doc["phase"] = phase.map_or(Value::Null, |p| p.as_str().into());
        io.document(&doc)?;
    } else {
        let mut text = Vec::new();
        write_human(&mut text, &name, &found).map_err(stream_failure)?;
        io.print(&String::from_utf8(text).expect("utf-8"))?;
    }
    let errors = found.iter().any(Located::is_error);
    let failing = errors || (strict && !found.is_empty());
    Ok(if failing { ExitStatus::Findings } else { ExitStatus::Success })
}

fn status(io: &mut Io, file: &Path, explain: Option<&str>) -> Outcome {
    let case = load_case(file)?;
    if let Some(target) = explain {
        let explanation = explain_status(&case, target).map_err(|e| Failure::Usage(e.to_string()))?;
        if io.json {
            io.document(&json!({ "version": "1", "file": shown(file), "explanation": explanation }))?;
        } else {
            io.print(&explanation.render())?;
        }
        return Ok(ExitStatus::Success);
    }
    let statuses = compute_status(&case).map_err(|e| Failure::Rejected(e.to_string()))?;
    if io.json {
        io.document(&json!({ "version": "1", "file": shown(file), "statuses": statuses }))?;
    } else {
        let mut text = String::new();
        for (id, s) in &statuses {
            let kind = case.elements()[id].kind;
            text.push_str(&format!("{id} {kind} {s}\n"));
        }
        io.print(&text)?;
    }
    Ok(ExitStatus::Success)
}

fn tier_filter(filter: &FilterArgs, config: &Config) -> Result<TierFilter, Failure> {
    let tier = match &filter.tier {
        Some(t) => keyword::<AudienceTier>(t)?,
        None => config.tier.unwrap_or(AudienceTier::Public),
    };
    let goals = filter.goals.iter().map(|g| id_arg(g)).collect::<Result<Vec<_>, _>>()?;
    let stages = filter.stages.iter().map(|s| keyword::<LifecycleStage>(s)).collect::<Result<Vec<_>, _>>()?;
    let mut f = TierFilter::new(tier);
    if !goals.is_empty() {
        f = f.with_goals(goals);
    }
    if !stages.is_empty() {
        f = f.with_stages(stages);
    }
    Ok(f)
}

fn threshold_of(flag: Option<f64>, config: &Config) -> Result<f64, Failure> {
    let t = flag.or(config.threshold).unwrap_or(DEFAULT_THRESHOLD);
    if !(0.0..=1.0).contains(&t) {
        return Err(Failure::Usage(format!("threshold {t} is outside [0, 1]")));
    }
    Ok(t)
}

fn render(io: &mut Io, file: &Path, format: Format, filter: &FilterArgs, threshold: Option<f64>, output: Option<&Path>) -> Outcome {
    let config = Config::for_file(file)?;
    let filter = tier_filter(filter, &config)?;
    let threshold = threshold_of(threshold, &config)?;
    let case = load_case(file)?;
    let filtered = filter.apply(&case);
    let (name, text) = match format {
        Format::Dot => ("dot", to_dot(&case, &filter)),
        Format::Md => ("md", to_report_with(&case, &filter, threshold)),
        Format::Json => ("json", to_interchange(&filtered.case)),
    };
    match output {
        Some(path) => {
            write_file(path, &text)?;
            if io.json {
                io.document(&json!({ "version": "1", "format": name, "output": shown(path), "redacted": filtered.redacted.len() }))?;
            } else {
                io.print(&format!("wrote {} ({} redacted)\n", shown(path), filtered.redacted.len()))?;
            }
        }
        None if io.json && format != Format::Json => {
            io.document(&json!({ "version": "1", "format": name, "content": text, "redacted": filtered.redacted.len() }))?;
        }
        None => io.print(&text)?,
    }
    Ok(ExitStatus::Success)
}

struct AppraiseFields {
    evidence: String,
    relevance: String,
    materiality: String,
    admissibility: String,
    value: f64,
    assessor: String,
    date: Option<String>,
}

fn appraise(io: &mut Io, file: &Path, fields: AppraiseFields, output: Option<&Path>) -> Outcome {
    let date = match &fields.date {
        Some(d) => chrono::NaiveDate::parse_from_str(d, "%Y-%m-%d")
            .map_err(|e| Failure::Usage(format!("invalid date {d:?}: {e}")))?,
        None => chrono::Utc::now().date_naive(),
    };
    let record = AppraisalRecord {
        evidence: id_arg(&fields.evidence)?,
        relevance: Assessed::new(keyword(&fields.relevance)?),
        materiality: Assessed::new(keyword(&fields.materiality)?),
        admissibility: Assessed::new(keyword(&fields.admissibility)?),
        probative_value: UnitValue::new(fields.value).map_err(|e| Failure::Usage(e.to_string()))?,
        assessor: fields.assessor,
        date,
    };
    let (source, parsed) = load(file)?;
    let updated = record_appraisal(&parsed.case, record.clone()).map_err(|e| Failure::Rejected(e.to_string()))?;
    let text = rewrite_appraisal(&source, &record, &updated);
    let target = output.unwrap_or(file);
    write_file(target, &text)?;
    if io.json {
        io.document(&json!({
            "version": "1",
            "file": shown(target),
            "evidence": record.evidence,
            "effectiveValue": record.effective_value(),
            "appraisal": appraisal_line(&record),
        }))?;
    } else {
        io.print(&format!("{} -> {}\n", appraisal_line(&record), shown(target)))?;
    }
    Ok(ExitStatus::Success)
}

/// Replaces the evidence's appraisal line in place, keeping comments and
/// layout. Falls back to canonical text if the edit does not reparse to
/// the expected case.
fn rewrite_appraisal(source: &str, record: &AppraisalRecord, expected: &Case) -> String {
    let prefix = format!("appraisal {}", record.evidence);
    let line = appraisal_line(record);
    let mut lines: Vec<String> = Vec::new();
    let mut replaced = false;
    for l in source.lines() {
        let trimmed = l.trim_start();
        let is_old = trimmed.strip_prefix(&prefix).is_some_and(|rest| rest.starts_with(char::is_whitespace));
        if !is_old {
            lines.push(l.to_string());
        } else if !replaced {
            lines.push(format!("{}{line}", &l[..l.len() - trimmed.len()]));
            replaced = true;
        }
    }
    if !replaced {
        while lines.last().is_some_and(|l| l.trim().is_empty()) {
            lines.pop();
        }
        lines.push(String::new());
        lines.push(format!("  {line}"));
    }
    let edited = lines.join("\n") + "\n";
    match parse_case(&edited) {
        Ok(c) if &c == expected => edited,
        _ => serialize(expected),
    }
}

fn sufficiency_cmd(io: &mut Io, file: &Path, threshold: Option<f64>) -> Outcome {
    let config = Config::for_file(file)?;
    let threshold = threshold_of(threshold, &config)?;
    let case = load_case(file)?;
    let report = sufficiency(&case, threshold).map_err(|e| Failure::Rejected(e.to_string()))?;
    if io.json {
        io.print(&format!("{}\n", sufficiency_document(&report)))?;
        return Ok(ExitStatus::Success);
    }
    let value = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"));
    let mut text = format!("threshold {threshold}\n");
    for (id, v) in &report.per_evidence {
        text.push_str(&format!("evidence {id} {}\n", value(*v)));
    }
    for (id, a) in &report.per_claim {
        text.push_str(&format!("claim {id} {} {}\n", value(a.value), a.verdict));
    }
    text.push_str(&format!("case {} {}\n", value(report.case_value.value), report.case_value.verdict));
    io.print(&text)?;
    Ok(ExitStatus::Success)
}

fn coverage_cmd(io: &mut Io, file: &Path) -> Outcome {
    let case = load_case(file)?;
    let cov = coverage(&case);
    if io.json {
        io.document(&json!({ "version": "1", "file": shown(file), "covered": cov.covered(), "stages": LifecycleStage::ALL.len(), "coverage": cov }))?;
        return Ok(ExitStatus::Success);
    }
    let mut text = String::new();
    for stage in LifecycleStage::ALL {
        text.push_str(&format!("{:<12} {:<34} {}\n", stage.macro_stage().as_str(), stage.as_str(), cov.counts[stage]));
    }
    text.push_str(&format!("{}/{} stages covered\n", cov.covered(), LifecycleStage::ALL.len()));
    if !cov.untagged.is_empty() {
        let ids: Vec<&str> = cov.untagged.iter().map(Id::as_str).collect();
        text.push_str(&format!("untagged claims: {}\n", ids.join(", ")));
    }
    io.print(&text)?;
    Ok(ExitStatus::Success)
}

fn pattern_instantiate(io: &mut Io, file: &Path, binds: &[String], prefix: &str, into: Option<&Path>, output: Option<&Path>) -> Outcome {
    let source = read(file)?;
    let parsed = parse_pattern(&source).map_err(|diagnostics| Failure::Parse { file: shown(file), diagnostics })?;
    for w in &parsed.warnings {
        io.note(&format!("WARNING {} {}:{}:{} {}", w.code, shown(file), w.span.line, w.span.column, w.message));
    }
    let pattern = parsed.pattern;
    let mut bindings = Bindings::new();
    for pair in binds {
        bindings = bindings.bind_pair(pair).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let host = match into {
        Some(path) => load_case(path)?,
        None => Case::new(pattern.id.clone(), pattern.intent.clone(), Phase::Preliminary)
            .map_err(|e| Failure::Rejected(e.to_string()))?,
    };
    let fragment = instantiate(&pattern, &bindings, prefix).map_err(|e| Failure::Usage(e.to_string()))?;
    let case = host.merge(&fragment).map_err(|e| Failure::Rejected(e.to_string()))?;
    let advisories = check_applicability(&pattern, &CaseMeta::of_case(&host, host.title()));
    let text = serialize(&case);
    if let Some(path) = output {
        write_file(path, &text)?;
    }
    if io.json {
        io.document(&json!({ "version": "1", "pattern": pattern.id, "case": interchange_value(&case), "advisories": advisories }))?;
    } else {
        for a in &advisories {
            io.note(&format!("advisory: {a}"));
        }
        match output {
            Some(path) => io.print(&format!("wrote {}\n", shown(path)))?,
            None => io.print(&text)?,
        }
    }
    Ok(ExitStatus::Success)
}

fn pattern_derive(io: &mut Io, files: &[PathBuf], output: Option<&Path>) -> Outcome {
    let cases = files.iter().map(|f| load_case(f)).collect::<Result<Vec<_>, _>>()?;
    let (pattern, bindings) = derive_with_bindings(&cases).map_err(|e| Failure::Rejected(e.to_string()))?;
    let text = serialize_pattern(&pattern);
    if let Some(path) = output {
        write_file(path, &text)?;
    }
    if io.json {
        let per_case: Vec<Value> = cases
            .iter()
            .zip(&bindings)
            .map(|(c, b)| json!({ "case": c.id(), "bindings": b }))
            .collect();
        io.document(&json!({ "version": "1", "pattern": text, "slotTypes": pattern.slot_types, "instances": per_case }))?;
    } else {
        match output {
            Some(path) => io.print(&format!("wrote {}\n", shown(path)))?,
            None => io.print(&text)?,
        }
    }
    Ok(ExitStatus::Success)
}

fn snapshot_cmd(io: &mut Io, file: &Path, label: &str, at: Option<&str>, output: Option<PathBuf>) -> Outcome {
    let label = SnapshotLabel::new(label).map_err(|e| Failure::Usage(e.to_string()))?;
    let taken_at = match at {
        Some(s) => Timestamp::parse(s).ok_or_else(|| Failure::Usage(format!("invalid timestamp {s:?}, expected YYYY-MM-DDTHH:MM:SSZ")))?,
        None => Timestamp::now(),
    };
    let case = load_case(file)?;
    let snap = snapshot_at(&case, label, taken_at);
    let path = output.unwrap_or_else(|| {
        let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "case".into());
        file.with_file_name(format!("{stem}.{}.snap", snap.label))
    });
    write_file(&path, &snap.to_file())?;
    if io.json {
        io.document(&json!({ "version": "1", "file": shown(&path), "label": snap.label, "takenAt": snap.taken_at, "digest": snap.digest }))?;
    } else {
        io.print(&format!("{} sha256:{}\n", shown(&path), snap.digest))?;
    }
    Ok(ExitStatus::Success)
}

fn load_snapshot(path: &Path) -> Result<Snapshot, Failure> {
    Snapshot::parse(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", shown(path))))
}

fn diff_cmd(io: &mut Io, from: &Path, to: &Path) -> Outcome {
    let (a, b) = (load_snapshot(from)?, load_snapshot(to)?);
    let changes = diff(&a, &b).map_err(|e| match e {
        DiffError::ParseFailure { label, diagnostics } => {
            let file = if label == a.label.as_str() { shown(from) } else { shown(to) };
            Failure::Parse { file, diagnostics }
        }
    })?;
    if io.json {
        io.document(&json!({ "version": "1", "from": a.label, "to": b.label, "changes": changes }))?;
    } else {
        io.print(&describe(&changes, a.label.as_str(), b.label.as_str()))?;
    }
    Ok(ExitStatus::Success)
}

fn field(f: &FieldChange) -> String {
    let side = |v: &Option<String>| v.as_deref().map_or_else(|| "(none)".to_string(), |s| format!("{s:?}"));
    format!("{}: {} -> {}", f.field, side(&f.before), side(&f.after))
}

fn describe(c: &ChangeSet, from: &str, to: &str) -> String {
    let mut out = format!("{from} -> {to}\n");
    if c.is_empty() {
        out.push_str("no changes\n");
        return out;
    }
    for f in &c.metadata {
        out.push_str(&format!("case {}\n", field(f)));
    }
    if let Some((a, b)) = c.phase_change {
        out.push_str(&format!("phase {a} -> {b}\n"));
    }
    let section = |out: &mut String, name: &str, ch: &Changes| {
        for id in &ch.added {
            out.push_str(&format!("+ {name} {id}\n"));
        }
        for id in &ch.removed {
            out.push_str(&format!("- {name} {id}\n"));
        }
        for m in &ch.modified {
            for f in &m.fields {
                out.push_str(&format!("~ {name} {} {}\n", m.id, field(f)));
            }
        }
    };
    section(&mut out, "element", &c.elements);
    section(&mut out, "link", &c.links);
    section(&mut out, "challenge", &c.challenges);
    section(&mut out, "appraisal", &c.appraisals);
    for (id, (a, b)) in &c.status_deltas {
        out.push_str(&format!("status {id} {a} -> {b}\n"));
    }
    out
}

fn serve(io: &mut Io, dir: &Path, addr: &str) -> Outcome {
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|source| Failure::Io { path: dir.to_path_buf(), source })?;
    runtime.block_on(async {
        let service = eac_serve::Service::start(dir, addr).await.map_err(serve_failure(dir))?;
        let url = service.base_url();
        if io.json {
            io.document(&json!({ "version": "1", "listening": url }))?;
        } else {
            io.print(&format!("listening on {url}\n"))?;
        }
        let _ = io.stdout.flush();
        service.run_until_interrupted().await.map_err(serve_failure(dir))?;
        Ok(ExitStatus::Success)
    })
}

fn serve_failure(dir: &Path) -> impl Fn(eac_serve::ServeError) -> Failure + '_ {
    move |e| match e {
        eac_serve::ServeError::Bind { source, .. } => Failure::Io { path: dir.to_path_buf(), source },
        eac_serve::ServeError::Io(source) => Failure::Io { path: dir.to_path_buf(), source },
        eac_serve::ServeError::Store(eac_serve::StoreError::Io { path, source }) => Failure::Io { path, source },
        other => Failure::Rejected(other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert_eq!(slug("Fair Triage Tool"), "fair_triage_tool");
        assert_eq!(slug("  2024: audit!! "), "case_2024_audit");
        assert_eq!(slug("!!!"), "case");
    }
}
