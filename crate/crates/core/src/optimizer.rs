//! Scans a checked program for blocks matching catalog entries and rewrites
//! the selected ones into quantum blocks.

use serde::Serialize;

use crate::diag::{Diagnostic, Diagnostics, Span};
use crate::frontend::ast::*;
use crate::frontend::{check_program, TypedProgram};
use crate::qplp::{match_block, Catalog, SearchBinding};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizeMode {
    #[default]
    ReportOnly,
    ApplyAll,
    /// Entry ids (`qplp.search.grover`) or site ids (`site-0`).
    ApplySelected(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Site {
    pub site: String,
    pub entry: String,
    pub span: Span,
    pub bindings: SearchBinding,
    pub success_probability: f64,
    pub applied: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub entry: String,
    pub span: Span,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizationReport {
    pub mode: OptimizeMode,
    pub sites: Vec<Site>,
    pub rejected: Vec<Rejection>,
    #[serde(skip)]
    pub warnings: Vec<Diagnostic>,
}

impl OptimizationReport {
    pub fn applied(&self) -> impl Iterator<Item = &Site> {
        self.sites.iter().filter(|s| s.applied)
    }

    /// Pretty-printed JSON with a trailing newline; stable across runs.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

struct Scan<'a> {
    tp: &'a TypedProgram,
    catalog: &'a Catalog,
    sites: Vec<Site>,
    rejected: Vec<Rejection>,
}

impl Scan<'_> {
    fn body(&mut self, body: &[Stmt], in_function: bool) {
        let mut i = 0;
        while i < body.len() {
            if !in_function {
                if let Some((entry, b)) = self.try_at(body, i) {
                    let success_probability = b.params.success_probability();
                    self.sites.push(Site {
                        site: format!("site-{}", self.sites.len()),
                        entry: entry.to_string(),
                        span: b.span,
                        bindings: b.clone(),
                        success_probability,
                        applied: false,
                    });
                    i += b.len;
                    continue;
                }
            }
            let s = &body[i];
            if crate::qplp::is_candidate(s) {
                let reason = if in_function { "inside a function body".to_string() } else { self.reason_before(body, i) };
                let span = if i > 0 && !in_function { body[i - 1].span.to(s.span) } else { s.span };
                self.rejected.push(Rejection { entry: crate::qplp::SEARCH_ID.into(), span, reason });
            }
            let nested = in_function || matches!(s.kind, StmtKind::FuncDef(_));
            for b in s.bodies() {
                self.body(b, nested);
            }
            i += 1;
        }
    }

    fn try_at(&self, body: &[Stmt], at: usize) -> Option<(&'static str, SearchBinding)> {
        self.catalog.entries().iter().filter(|e| e.executable).find_map(|e| match_block(self.tp, e, body, at).ok().map(|b| (e.id, b)))
    }

    /// Why the window ending at candidate loop `body[i]` did not match.
    fn reason_before(&self, body: &[Stmt], i: usize) -> String {
        let entry = self.catalog.get(crate::qplp::SEARCH_ID).expect("search entry");
        if i == 0 {
            return "body shape mismatch: expected `found = -1` before the loop".into();
        }
        match match_block(self.tp, entry, body, i - 1) {
            Err(e) => e.reason,
            Ok(_) => unreachable!("window would have matched"),
        }
    }
}

/// The statement a directive applies to: the first one starting after it.
fn directive_target<'a>(module: &'a Module, d: &Directive) -> Option<&'a Stmt> {
    let mut best: Option<&Stmt> = None;
    module.walk_stmts(&mut |s| {
        if s.span.start >= d.span.end && best.is_none_or(|b| s.span.start < b.span.start) {
            best = Some(s);
        }
    });
    best
}

fn directive_warnings(tp: &TypedProgram, catalog: &Catalog, sites: &[Site]) -> Vec<Diagnostic> {
    let mut out = vec![];
    for d in &tp.module.directives {
        let warn = |msg: String| Diagnostic::warning("W050", msg, d.span);
        let Some(entry) = catalog.get(&d.entry) else {
            out.push(warn(format!("unknown pattern '{}'", d.entry)));
            continue;
        };
        if !entry.executable {
            out.push(warn(format!("pattern '{}' is metadata only and cannot be applied", d.entry)));
            continue;
        }
        let Some(target) = directive_target(&tp.module, d) else {
            out.push(warn(format!("no statement follows the '{}' directive", d.entry)));
            continue;
        };
        if sites.iter().any(|s| s.entry == entry.id && s.span.start == target.span.start) {
            continue;
        }
        // Re-run the matcher where the directive points to explain the miss.
        let mut reason = None;
        let mut visit = |body: &[Stmt]| {
            if let Some(at) = body.iter().position(|s| s.id == target.id) {
                reason = Some(match match_block(tp, entry, body, at) {
                    Err(e) => e.reason,
                    Ok(_) => "block lies inside a function body".into(),
                });
            }
        };
        visit(&tp.module.body);
        tp.module.walk_stmts(&mut |s| s.bodies().into_iter().for_each(|b| visit(b)));
        let reason = reason.unwrap_or_else(|| "body shape mismatch".into());
        out.push(warn(format!("'{}' does not apply here: {reason}", d.entry)));
    }
    out
}

/// Finds every applicable site; nothing is marked applied.
pub fn find_sites(tp: &TypedProgram, catalog: &Catalog) -> OptimizationReport {
    let mut scan = Scan { tp, catalog, sites: vec![], rejected: vec![] };
    scan.body(&tp.module.body, false);
    let warnings = directive_warnings(tp, catalog, &scan.sites);
    OptimizationReport { mode: OptimizeMode::ReportOnly, sites: scan.sites, rejected: scan.rejected, warnings }
}

/// Marks sites applied according to `mode`.
pub fn select(report: &mut OptimizationReport, mode: &OptimizeMode) {
    report.mode = mode.clone();
    for s in &mut report.sites {
        s.applied = match mode {
            OptimizeMode::ReportOnly => false,
            OptimizeMode::ApplyAll => true,
            OptimizeMode::ApplySelected(ids) => ids.iter().any(|id| *id == s.site || *id == s.entry),
        };
    }
    if let OptimizeMode::ApplySelected(ids) = mode {
        for id in ids {
            if !report.sites.iter().any(|s| *id == s.site || *id == s.entry) {
                report.warnings.push(Diagnostic::warning("W051", format!("'{id}' selects no site"), Span::default()));
            }
        }
    }
}

fn stale(site: &Site) -> Diagnostic {
    Diagnostic::error("E050", format!("{} ({}) is no longer valid for this program", site.site, site.entry), site.span)
}

/// Replaces every applied site with a quantum block and re-checks the result.
pub fn apply(tp: &TypedProgram, report: &OptimizationReport, catalog: &Catalog) -> Result<TypedProgram, Diagnostics> {
    if report.applied().next().is_none() {
        return Ok(tp.clone());
    }
    let mut module = tp.module.clone();
    for (index, site) in report.sites.iter().enumerate().filter(|(_, s)| s.applied) {
        let entry = catalog.get(&site.entry).filter(|e| e.executable).ok_or_else(|| Diagnostics::single(stale(site)))?;
        let done = rewrite(&mut module.body, &mut |body: &mut Vec<Stmt>| {
            let Some(at) = body.iter().position(|s| s.span.start == site.span.start) else { return Ok(false) };
            let b = match_block(tp, entry, body, at).map_err(|_| stale(site))?;
            if b != site.bindings {
                return Err(stale(site));
            }
            let replaced: Vec<Stmt> = body.drain(at..at + b.len).collect();
            let StmtKind::Assign { target: Target::Name(found), .. } = &replaced[0].kind else { unreachable!() };
            let q = QuantumBlock {
                entry: entry.id.to_string(),
                site: index,
                params: b.params.clone(),
                found: found.clone(),
                array: b.array.clone(),
                target: b.target,
                replaced: replaced.clone(),
            };
            body.insert(at, Stmt { id: replaced[0].id, kind: StmtKind::QuantumBlock(Box::new(q)), span: b.span });
            Ok(true)
        })
        .map_err(Diagnostics::single)?;
        if !done {
            return Err(Diagnostics::single(stale(site)));
        }
    }
    check_program(module).map_err(Diagnostics)
}

/// Applies `f` to each statement list, outermost first, until it reports a rewrite.
fn rewrite(body: &mut Vec<Stmt>, f: &mut dyn FnMut(&mut Vec<Stmt>) -> Result<bool, Diagnostic>) -> Result<bool, Diagnostic> {
    if f(body)? {
        return Ok(true);
    }
    for s in body.iter_mut() {
        if matches!(s.kind, StmtKind::FuncDef(_)) {
            continue;
        }
        for b in s.bodies_mut() {
            if rewrite(b, f)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Scan, select and apply in one step.
pub fn optimize(tp: &TypedProgram, catalog: &Catalog, mode: &OptimizeMode) -> Result<(TypedProgram, OptimizationReport), Diagnostics> {
    let mut report = find_sites(tp, catalog);
    select(&mut report, mode);
    let out = apply(tp, &report, catalog)?;
    Ok((out, report))
}
