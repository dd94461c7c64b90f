//! The mapping file: line-based templates that drive classical lowering.
//!
//! ```text
//! version 1
//! binop.add | int,int -> int | ({0} + {1})
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::diag::{Diagnostic, Span};

pub const DEFAULT_MAPPING: &str = include_str!("default.map");

pub const TYPES: &[&str] = &["int", "float", "bool", "intarray", "none"];

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RuleKey {
    pub kind: String,
    /// `None` is the wildcard signature `-`.
    pub sig: Option<Vec<String>>,
}

impl RuleKey {
    pub fn sig_text(&self) -> String {
        match &self.sig {
            None => "-".into(),
            Some(v) => v.join(","),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MappingRule {
    pub key: RuleKey,
    /// `None` is `-`.
    pub result: Option<String>,
    pub template: String,
}

impl MappingRule {
    /// Placeholder names in order of appearance (duplicates kept).
    pub fn placeholders(&self) -> Vec<&str> {
        placeholders(&self.template).into_iter().map(|(_, n)| n).collect()
    }

    /// Substitutes placeholders. Unknown placeholders are left as written;
    /// load-time validation guarantees none remain for valid rule sets.
    pub fn render(&self, args: &[(&str, &str)]) -> String {
        let mut out = String::with_capacity(self.template.len());
        let mut last = 0;
        for (pos, name) in placeholders(&self.template) {
            out.push_str(&self.template[last..pos]);
            match args.iter().find(|(k, _)| *k == name) {
                Some((_, v)) => out.push_str(v),
                None => out.push_str(&self.template[pos..pos + name.len() + 2]),
            }
            last = pos + name.len() + 2;
        }
        out.push_str(&self.template[last..]);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MappingRuleSet {
    pub version: u32,
    pub rules: Vec<MappingRule>,
}

/// `{name}` / `{0}` occurrences as (byte offset, name).
fn placeholders(t: &str) -> Vec<(usize, &str)> {
    let b = t.as_bytes();
    let mut out = vec![];
    let mut i = 0;
    while i < b.len() {
        if b[i] == b'{' {
            let mut j = i + 1;
            while j < b.len() && (b[j].is_ascii_alphanumeric() || b[j] == b'_') {
                j += 1;
            }
            let name = &t[i + 1..j];
            let valid = !name.is_empty() && (name.bytes().all(|c| c.is_ascii_digit()) || !name.as_bytes()[0].is_ascii_digit());
            if j < b.len() && b[j] == b'}' && valid {
                out.push((i, name));
                i = j + 1;
                continue;
            }
        }
        i += 1;
    }
    out
}

/// What a rule family may bind: positional arity and named placeholders.
struct Family {
    positional: usize,
    named: &'static [&'static str],
    sig_len: Option<usize>,
}

fn family(kind: &str) -> Option<Family> {
    let f = |positional, named, sig_len| Some(Family { positional, named, sig_len });
    match kind {
        "decl" | "decl.output" => f(0, &["name", "size"], Some(1)),
        "param" => f(0, &["name"], Some(1)),
        "cast" => f(1, &[], Some(1)),
        "lit.int" | "lit.float" | "lit.bool" => f(0, &["value"], None),
        "name" => f(0, &["name"], None),
        "index" => f(2, &[], Some(2)),
        "unop.neg" | "unop.not" | "call.abs" => f(1, &[], Some(1)),
        "call.min" | "call.max" => f(2, &[], Some(2)),
        "call.user" => f(0, &["name", "args"], None),
        "stmt.assign" | "stmt.print" => f(0, &["target", "value"], if kind == "stmt.print" { Some(1) } else { None }),
        "stmt.expr" | "stmt.return" => f(0, &["value"], None),
        "stmt.if" | "stmt.while" => f(0, &["cond", "body"], None),
        "stmt.ifelse" => f(0, &["cond", "body", "orelse"], None),
        "stmt.for" => f(0, &["var", "start", "last", "body"], None),
        "stmt.break" | "stmt.continue" | "stmt.pass" | "stmt.return.void" => f(0, &[], None),
        "stmt.def" => f(0, &["name", "params", "body"], Some(1)),
        k if k.starts_with("helper.") && k.len() > "helper.".len() => f(0, &[], None),
        k if ["binop.", "cmp.", "boolop."].iter().any(|p| k.starts_with(p)) => {
            let op = k.split_once('.').unwrap().1;
            let known = match k.split_once('.').unwrap().0 {
                "binop" => ["add", "sub", "mul", "div", "floordiv", "mod", "pow"].contains(&op),
                "cmp" => ["eq", "ne", "lt", "le", "gt", "ge"].contains(&op),
                _ => ["and", "or"].contains(&op),
            };
            if known {
                f(2, &[], Some(2))
            } else {
                None
            }
        }
        _ => None,
    }
}

fn unescape(s: &str) -> Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut it = s.chars();
    while let Some(c) = it.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match it.next() {
            Some('n') => out.push('\n'),
            Some('\\') => out.push('\\'),
            Some(o) => return Err(format!("unknown escape '\\{o}'")),
            None => return Err("dangling '\\' at end of template".into()),
        }
    }
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('\n', "\\n")
}

fn malformed(msg: impl Into<String>, span: Span) -> Diagnostic {
    Diagnostic::error("E020", format!("malformed mapping rule: {}", msg.into()), span)
}

fn parse_type_list(s: &str) -> Result<Option<Vec<String>>, String> {
    let s = s.trim();
    if s == "-" {
        return Ok(None);
    }
    let mut v = vec![];
    for t in s.split(',') {
        let t = t.trim();
        if !TYPES.contains(&t) {
            return Err(format!("unknown type '{t}'"));
        }
        v.push(t.to_string());
    }
    Ok(Some(v))
}

fn parse_rule(line: &str, span: Span) -> Result<MappingRule, Diagnostic> {
    let mut parts = line.splitn(3, '|');
    let (Some(key), Some(sig), Some(template)) = (parts.next(), parts.next(), parts.next()) else {
        return Err(malformed("expected `key | signature -> result | template`", span));
    };
    let kind = key.trim();
    let fam = family(kind).ok_or_else(|| malformed(format!("unknown rule key '{kind}'"), span))?;
    let Some((params, result)) = sig.split_once("->") else {
        return Err(malformed("signature needs `->`", span));
    };
    let sig = parse_type_list(params).map_err(|m| malformed(m, span))?;
    let result = match result.trim() {
        "-" => None,
        t if TYPES.contains(&t) && t != "none" => Some(t.to_string()),
        t => return Err(malformed(format!("unknown result type '{t}'"), span)),
    };
    if let (Some(s), Some(n)) = (&sig, fam.sig_len) {
        if s.len() != n {
            return Err(malformed(format!("'{kind}' takes {n} operand type(s), found {}", s.len()), span));
        }
    }
    if let (Some(_), None) = (&sig, fam.sig_len) {
        return Err(malformed(format!("'{kind}' only accepts the wildcard signature '-'"), span));
    }
    let template = unescape(template.trim()).map_err(|m| malformed(m, span))?;
    let mut indices = BTreeSet::new();
    for (_, name) in placeholders(&template) {
        if let Ok(i) = name.parse::<usize>() {
            if i >= fam.positional {
                return Err(malformed(format!("placeholder {{{i}}} is not bindable for '{kind}'"), span));
            }
            indices.insert(i);
        } else if !fam.named.contains(&name) {
            return Err(malformed(format!("placeholder {{{name}}} is not bindable for '{kind}'"), span));
        }
    }
    if indices.iter().enumerate().any(|(n, i)| n != *i) {
        return Err(malformed("placeholder indices must be contiguous from {0}", span));
    }
    Ok(MappingRule { key: RuleKey { kind: kind.to_string(), sig }, result, template })
}

/// Every (kind, signature) the front end can ask the lowering for.
pub fn required_keys() -> Vec<(String, Vec<String>)> {
    let mut out: Vec<(String, Vec<&str>)> = vec![];
    let num2 = [["int", "int"], ["int", "float"], ["float", "int"], ["float", "float"]];
    for t in ["int", "float", "bool", "intarray"] {
        out.push(("decl".into(), vec![t]));
    }
    for t in ["int", "float", "bool"] {
        out.push(("decl.output".into(), vec![t]));
        out.push(("param".into(), vec![t]));
        out.push(("stmt.print".into(), vec![t]));
    }
    out.push(("cast".into(), vec!["int"]));
    for k in ["lit.int", "lit.float", "lit.bool", "name", "call.user"] {
        out.push((k.into(), vec![]));
    }
    out.push(("index".into(), vec!["intarray", "int"]));
    for op in ["add", "sub", "mul", "div"] {
        for s in num2 {
            out.push((format!("binop.{op}"), s.to_vec()));
        }
    }
    out.push(("binop.floordiv".into(), vec!["int", "int"]));
    out.push(("binop.mod".into(), vec!["int", "int"]));
    // int ** int lowers through binop.mul.
    for s in &num2[1..] {
        out.push(("binop.pow".into(), s.to_vec()));
    }
    out.push(("unop.neg".into(), vec!["int"]));
    out.push(("unop.neg".into(), vec!["float"]));
    out.push(("unop.not".into(), vec!["bool"]));
    for op in ["eq", "ne", "lt", "le", "gt", "ge"] {
        for s in num2 {
            out.push((format!("cmp.{op}"), s.to_vec()));
        }
    }
    out.push(("cmp.eq".into(), vec!["bool", "bool"]));
    out.push(("cmp.ne".into(), vec!["bool", "bool"]));
    out.push(("boolop.and".into(), vec!["bool", "bool"]));
    out.push(("boolop.or".into(), vec!["bool", "bool"]));
    for t in ["int", "float"] {
        out.push(("call.abs".into(), vec![t]));
        out.push(("call.min".into(), vec![t, t]));
        out.push(("call.max".into(), vec![t, t]));
    }
    for k in [
        "stmt.assign",
        "stmt.expr",
        "stmt.if",
        "stmt.ifelse",
        "stmt.while",
        "stmt.for",
        "stmt.break",
        "stmt.continue",
        "stmt.pass",
        "stmt.return",
        "stmt.return.void",
    ] {
        out.push((k.into(), vec![]));
    }
    for t in ["int", "float", "bool", "none"] {
        out.push(("stmt.def".into(), vec![t]));
    }
    out.into_iter().map(|(k, s)| (k, s.into_iter().map(String::from).collect())).collect()
}

pub fn load_mapping(text: &str) -> Result<MappingRuleSet, Vec<Diagnostic>> {
    let mut diags = vec![];
    let mut version = None;
    let mut rules: Vec<MappingRule> = vec![];
    let mut seen: BTreeMap<RuleKey, usize> = BTreeMap::new();
    let mut offset = 0;
    for raw in text.split_inclusive('\n') {
        let span = Span::new(offset, offset + raw.trim_end_matches(['\n', '\r']).len());
        offset += raw.len();
        let line = raw.trim_end_matches(['\n', '\r']);
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if version.is_none() {
            match trimmed.strip_prefix("version").map(str::trim) {
                Some("1") => version = Some(1),
                Some(v) => {
                    diags.push(malformed(format!("unsupported format version '{v}'"), span));
                    return Err(diags);
                }
                None => {
                    diags.push(malformed("the first rule line must be `version 1`", span));
                    return Err(diags);
                }
            }
            continue;
        }
        match parse_rule(line, span) {
            Ok(rule) => {
                if seen.contains_key(&rule.key) {
                    diags.push(Diagnostic::error(
                        "E021",
                        format!("duplicate mapping rule '{} | {}'", rule.key.kind, rule.key.sig_text()),
                        span,
                    ));
                    continue;
                }
                seen.insert(rule.key.clone(), rules.len());
                rules.push(rule);
            }
            Err(d) => diags.push(d),
        }
    }
    let Some(version) = version else {
        return Err(vec![malformed("missing `version 1` line", Span::new(0, 0))]);
    };
    let set = MappingRuleSet { version, rules };
    if diags.is_empty() {
        let missing: Vec<String> = required_keys()
            .into_iter()
            .filter(|(k, s)| set.lookup(k, s).is_err())
            .map(|(k, s)| if s.is_empty() { k } else { format!("{k}({})", s.join(",")) })
            .collect();
        if !missing.is_empty() {
            diags.push(Diagnostic::error("E022", format!("mapping does not cover: {}", missing.join(", ")), Span::new(0, 0)));
        }
    }
    if diags.is_empty() {
        Ok(set)
    } else {
        Err(diags)
    }
}

pub fn default_rules() -> MappingRuleSet {
    load_mapping(DEFAULT_MAPPING).expect("embedded default mapping is valid")
}

impl MappingRuleSet {
    /// Exact signature first, then the wildcard rule.
    pub fn lookup(&self, kind: &str, sig: &[String]) -> Result<&MappingRule, Diagnostic> {
        let exact = self.rules.iter().find(|r| r.key.kind == kind && r.key.sig.as_deref() == Some(sig));
        exact
            .or_else(|| self.rules.iter().find(|r| r.key.kind == kind && r.key.sig.is_none()))
            .ok_or_else(|| Diagnostic::error("E023", format!("no mapping rule for {kind}({})", sig.join(",")), Span::default()))
    }

    pub fn lookup_str(&self, kind: &str, sig: &[&str]) -> Result<&MappingRule, Diagnostic> {
        let sig: Vec<String> = sig.iter().map(|s| s.to_string()).collect();
        self.lookup(kind, &sig)
    }

    /// Helper subroutines: (name, definition text) in file order.
    pub fn helpers(&self) -> impl Iterator<Item = (&str, &str)> {
        self.rules.iter().filter_map(|r| r.key.kind.strip_prefix("helper.").map(|n| (n, r.template.as_str())))
    }

    /// Canonical text form; reloading it yields an equal rule set.
    pub fn to_text(&self) -> String {
        let mut out = format!("version {}\n", self.version);
        for r in &self.rules {
            let result = r.result.as_deref().unwrap_or("-");
            writeln!(out, "{} | {} -> {} | {}", r.key.kind, r.key.sig_text(), result, escape(&r.template)).unwrap();
        }
        out
    }

    /// Replaces the template of one rule. Used for fault injection.
    pub fn with_template(&self, kind: &str, sig: &[&str], template: &str) -> Option<MappingRuleSet> {
        let mut out = self.clone();
        let sig: Option<Vec<String>> = if sig == ["-"] { None } else { Some(sig.iter().map(|s| s.to_string()).collect()) };
        let rule = out.rules.iter_mut().find(|r| r.key.kind == kind && r.key.sig == sig)?;
        rule.template = template.to_string();
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAD: &str = "version 1\n";

    fn without(kind: &str) -> String {
        DEFAULT_MAPPING.lines().filter(|l| !l.starts_with(&format!("{kind} |"))).map(|l| format!("{l}\n")).collect()
    }

    #[test]
    fn default_mapping_loads() {
        let rs = default_rules();
        assert_eq!(rs.version, 1);
        assert!(rs.rules.len() > 50);
    }

    #[test]
    fn single_rule_format() {
        let r = parse_rule("binop.add | int,int -> int | ({0} + {1})", Span::default()).unwrap();
        assert_eq!(r.key, RuleKey { kind: "binop.add".into(), sig: Some(vec!["int".into(), "int".into()]) });
        assert_eq!(r.result.as_deref(), Some("int"));
        assert_eq!(r.render(&[("0", "a"), ("1", "b")]), "(a + b)");
    }

    #[test]
    fn duplicate_key_is_e021() {
        let text = format!("{DEFAULT_MAPPING}binop.add | int,int -> int | ({{0}} + {{1}})\n");
        let d = load_mapping(&text).unwrap_err();
        assert_eq!(d.iter().map(|d| d.code).collect::<Vec<_>>(), vec!["E021"]);
    }

    #[test]
    fn missing_while_is_e022() {
        let d = load_mapping(&without("stmt.while")).unwrap_err();
        assert_eq!(d[0].code, "E022");
        assert!(d[0].message.contains("stmt.while"), "{}", d[0].message);
    }

    #[test]
    fn malformed_lines_are_e020() {
        for bad in [
            "binop.add int,int -> int ({0} + {1})",
            "binop.add | int,int int | x",
            "binop.add | int,str -> int | x",
            "binop.add | int,int -> int | ({1} + {2})",
            "binop.add | int,int -> int | ({0} + {name})",
            "binop.bogus | int,int -> int | x",
            "binop.add | int -> int | {0}",
            "lit.int | int -> int | {value}",
            "stmt.if | - -> - | if {cond} \\q",
        ] {
            let d = load_mapping(&format!("{HEAD}{bad}\n")).unwrap_err();
            assert_eq!(d[0].code, "E020", "{bad}");
        }
        assert_eq!(load_mapping("binop.add | - -> - | x\n").unwrap_err()[0].code, "E020");
        assert_eq!(load_mapping("version 2\n").unwrap_err()[0].code, "E020");
    }

    #[test]
    fn lookup_prefers_exact_then_wildcard() {
        let rs = default_rules();
        assert_eq!(rs.lookup_str("binop.add", &["int", "int"]).unwrap().result.as_deref(), Some("int"));
        let w = rs.lookup_str("binop.add", &["int", "float"]).unwrap();
        assert!(w.key.sig.is_none());
        assert_eq!(rs.lookup_str("call.unknown", &[]).unwrap_err().code, "E023");
    }

    #[test]
    fn text_round_trip() {
        let rs = default_rules();
        let again = load_mapping(&rs.to_text()).unwrap();
        assert_eq!(rs, again);
        assert_eq!(again.to_text(), rs.to_text());
    }

    #[test]
    fn templates_unescape_newlines() {
        let rs = default_rules();
        let r = rs.lookup_str("stmt.while", &[]).unwrap();
        assert_eq!(r.render(&[("cond", "c"), ("body", "x = 1;")]), "while (c) {\nx = 1;\n}");
        assert_eq!(rs.helpers().count(), 8);
    }
}
