//! The line-oriented text format: a document declares a group and some `ρ`,
//! then lists parameters, extended multi-segments and Langlands data.
//! Documents in one stream are separated by `---`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use arthurkit::arith::{format_rational, parse_rational, HalfInt};
use arthurkit::ems::{ExtendedMultiSegment, ExtendedSegment};
use arthurkit::ldata::{make_ldata, GlSegment, LData, TemperedData, TemperedPiece};
use arthurkit::multiset::MultiSet;
use arthurkit::params::{ArthurParameter, Family, GroupTag, Summand};
use arthurkit::rho::{Parity, RhoSymbol, Sign};
use num_rational::Rational64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Statement {
    Param(ArthurParameter),
    Ems(ExtendedMultiSegment),
    Ldata(LData),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Workspace {
    pub group: GroupTag,
    pub rhos: BTreeMap<String, RhoSymbol>,
    pub statements: Vec<Statement>,
}

impl Workspace {
    pub fn new(group: GroupTag) -> Self {
        Workspace { group, rhos: BTreeMap::new(), statements: Vec::new() }
    }

    /// Declares `rho` (and the contragredient of a non-self-dual one).
    pub fn declare(&mut self, rho: RhoSymbol) {
        if !rho.is_self_dual() {
            self.rhos.insert(rho.dual_label().to_string(), rho.contragredient());
        }
        self.rhos.insert(rho.label().to_string(), rho);
    }

    /// Declares every `ρ` occurring in `statement` and appends it.
    pub fn push(&mut self, statement: Statement) {
        let rhos: Vec<RhoSymbol> = match &statement {
            Statement::Param(p) => p.summands.iter().map(|(s, _)| s.rho.clone()).collect(),
            Statement::Ems(e) => e.rows.keys().cloned().collect(),
            Statement::Ldata(l) => l.rhos(),
        };
        for r in rhos {
            if !self.rhos.contains_key(r.label()) {
                self.declare(r);
            }
        }
        self.statements.push(statement);
    }

    pub fn params(&self) -> impl Iterator<Item = &ArthurParameter> + '_ {
        self.statements.iter().filter_map(|s| match s {
            Statement::Param(p) => Some(p),
            _ => None,
        })
    }

    pub fn ems(&self) -> impl Iterator<Item = &ExtendedMultiSegment> + '_ {
        self.statements.iter().filter_map(|s| match s {
            Statement::Ems(e) => Some(e),
            _ => None,
        })
    }

    pub fn ldata(&self) -> impl Iterator<Item = &LData> + '_ {
        self.statements.iter().filter_map(|s| match s {
            Statement::Ldata(l) => Some(l),
            _ => None,
        })
    }
}

struct Cursor<'a> {
    line: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        Cursor { line, text, pos: 0 }
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.text[..pos].chars().count() + 1, message: message.into() }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.rest().is_empty()
    }

    fn peek(&mut self, s: &str) -> bool {
        self.skip_ws();
        self.rest().starts_with(s)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.peek(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`")))
        }
    }

    fn take_while(&mut self, keep: impl Fn(char) -> bool) -> (usize, &'a str) {
        self.skip_ws();
        let start = self.pos;
        let len = self.rest().find(|c: char| !keep(c)).unwrap_or(self.rest().len());
        self.pos += len;
        (start, &self.text[start..self.pos])
    }

    fn word(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        let (start, w) = self.take_while(|c| c.is_alphanumeric() || c == '_' || c == '\'');
        if w.is_empty() {
            return Err(self.error(format!("expected {what}")));
        }
        Ok((start, w))
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let (start, w) = self.word(&format!("`{kw}`"))?;
        if w != kw {
            return Err(self.error_at(start, format!("expected `{kw}`, found `{w}`")));
        }
        Ok(())
    }

    fn number_text(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        let (start, w) = self.take_while(|c| c.is_ascii_digit() || c == '/' || c == '-');
        if w.is_empty() {
            return Err(self.error(format!("expected {what}")));
        }
        Ok((start, w))
    }

    fn uint(&mut self, what: &str) -> Result<u32, ParseError> {
        let (start, w) = self.number_text(what)?;
        w.parse().map_err(|_| self.error_at(start, format!("expected {what}, found `{w}`")))
    }

    fn halfint(&mut self) -> Result<HalfInt, ParseError> {
        let (start, w) = self.number_text("a half-integer")?;
        w.parse().map_err(|e| self.error_at(start, format!("{e}")))
    }

    fn rational(&mut self) -> Result<Rational64, ParseError> {
        let (start, w) = self.number_text("a rational")?;
        parse_rational(w).map_err(|e| self.error_at(start, format!("{e}")))
    }

    fn sign(&mut self) -> Result<Sign, ParseError> {
        self.skip_ws();
        let c = self.rest().chars().next();
        match c.and_then(Sign::from_symbol) {
            Some(s) => {
                self.pos += 1;
                Ok(s)
            }
            None => Err(self.error("expected `+` or `-`")),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected `{}`", self.rest())))
        }
    }
}

struct Parser {
    group: Option<GroupTag>,
    rhos: BTreeMap<String, RhoSymbol>,
    statements: Vec<Statement>,
    pending: Option<(usize, Vec<Summand>)>,
}

impl Parser {
    fn rho(&self, cur: &mut Cursor) -> Result<RhoSymbol, ParseError> {
        let (start, label) = cur.word("a rho label")?;
        self.rhos.get(label).cloned().ok_or_else(|| cur.error_at(start, format!("undeclared rho `{label}`")))
    }

    fn group(&self, cur: &Cursor) -> Result<GroupTag, ParseError> {
        self.group.ok_or_else(|| cur.error_at(0, "`group` must come first"))
    }

    fn flush(&mut self) -> Result<(), ParseError> {
        if let Some((line, summands)) = self.pending.take() {
            let group = self.group.expect("group precedes param");
            let psi = ArthurParameter::new(group, summands);
            psi.validate().map_err(|e| ParseError { line, column: 1, message: e.to_string() })?;
            self.statements.push(Statement::Param(psi));
        }
        Ok(())
    }

    fn declare(&mut self, cur: &mut Cursor, start: usize, rho: RhoSymbol) -> Result<(), ParseError> {
        if let Some(prev) = self.rhos.get(rho.label()) {
            let same = prev.dim() == rho.dim()
                && prev.parity() == rho.parity()
                && prev.dual_label() == rho.dual_label()
                && prev.is_unramified() == rho.is_unramified();
            if !(same && !rho.is_self_dual()) {
                return Err(cur.error_at(start, format!("duplicate rho `{}`", rho.label())));
            }
            return Ok(());
        }
        if !rho.is_self_dual() {
            if let Some(d) = self.rhos.get(rho.dual_label()) {
                if d.dual_label() != rho.label() {
                    return Err(cur.error_at(start, format!("`{}` is already declared with another dual", d.label())));
                }
            }
            self.rhos.entry(rho.dual_label().to_string()).or_insert_with(|| rho.contragredient());
        }
        self.rhos.insert(rho.label().to_string(), rho);
        Ok(())
    }

    fn line(&mut self, no: usize, text: &str) -> Result<(), ParseError> {
        let mut cur = Cursor::new(no, text);
        let (start, head) = cur.word("a statement")?;
        if head != "param" {
            self.flush()?;
        }
        match head {
            "group" => {
                if self.group.is_some() {
                    return Err(cur.error_at(start, "duplicate `group`"));
                }
                let (fs, family) = cur.word("`Sp` or `SO`")?;
                let n = cur.uint("the rank")?;
                self.group = Some(match family {
                    "Sp" => GroupTag::sp(n),
                    "SO" => GroupTag::so_odd(n),
                    other => return Err(cur.error_at(fs, format!("unknown group family `{other}`"))),
                });
            }
            "rho" => {
                self.group(&cur)?;
                let (ls, label) = cur.word("a rho label")?;
                let label = label.to_string();
                cur.keyword("dim")?;
                let dim = cur.uint("a dimension")?;
                cur.keyword("parity")?;
                let (ps, p) = cur.word("`O`, `S` or `N`")?;
                let parity = match p {
                    "O" | "S" | "N" => Parity::from_letter(p.chars().next().unwrap()).unwrap(),
                    _ => return Err(cur.error_at(ps, format!("unknown parity `{p}`"))),
                };
                let unramified = cur.eat("unramified");
                let dual = if cur.eat("dual") { Some(cur.word("a dual label")?.1.to_string()) } else { None };
                cur.finish()?;
                let rho = RhoSymbol::new(label, dim, parity, dual, unramified).map_err(|e| cur.error_at(ls, e.to_string()))?;
                self.declare(&mut cur, ls, rho)?;
            }
            "param" => {
                self.group(&cur)?;
                let mut summands = Vec::new();
                loop {
                    let rho = self.rho(&mut cur)?;
                    let twist = if cur.eat("@") { cur.rational()? } else { Rational64::from_integer(0) };
                    cur.expect("S")?;
                    let a = cur.uint("a positive integer")?;
                    cur.expect("S")?;
                    let b = cur.uint("a positive integer")?;
                    summands.push(Summand::new(rho, twist, a, b));
                    if !cur.eat(";") {
                        break;
                    }
                }
                cur.finish()?;
                self.pending.get_or_insert_with(|| (no, Vec::new())).1.extend(summands);
            }
            "ems" => {
                let group = self.group(&cur)?;
                let mut rows = Vec::new();
                let mut rho: Option<RhoSymbol> = None;
                loop {
                    if !cur.peek("[") {
                        rho = Some(self.rho(&mut cur)?);
                    }
                    let Some(r) = rho.clone() else {
                        return Err(cur.error("the first row needs a rho label"));
                    };
                    let rs = {
                        cur.skip_ws();
                        cur.pos
                    };
                    cur.expect("[")?;
                    let upper = cur.halfint()?;
                    cur.expect(",")?;
                    let lower = cur.halfint()?;
                    cur.expect("]")?;
                    cur.keyword("l")?;
                    cur.expect("=")?;
                    let l = cur.uint("a nonnegative integer")?;
                    cur.keyword("eta")?;
                    cur.expect("=")?;
                    let eta = cur.sign()?;
                    rows.push(ExtendedSegment::new(r, upper, lower, l, eta).map_err(|e| cur.error_at(rs, e.to_string()))?);
                    if !cur.eat(";") {
                        break;
                    }
                }
                cur.finish()?;
                let e = ExtendedMultiSegment::from_rows(group, rows);
                e.validate().map_err(|err| cur.error_at(start, err.to_string()))?;
                self.statements.push(Statement::Ems(e));
            }
            "ldata" => {
                let group = self.group(&cur)?;
                cur.expect("L(")?;
                let mut segments = Vec::new();
                while cur.peek("D(") {
                    let ss = cur.pos;
                    cur.expect("D(")?;
                    let rho = self.rho(&mut cur)?;
                    cur.expect(",")?;
                    let x = cur.halfint()?;
                    cur.expect(",")?;
                    let y = cur.halfint()?;
                    cur.expect(")")?;
                    segments.push(GlSegment::steinberg(rho, x, y).map_err(|e| cur.error_at(ss, e.to_string()))?);
                }
                cur.expect(";")?;
                cur.keyword("phi")?;
                cur.expect("=")?;
                let mut phi = MultiSet::new();
                if !cur.peek(";") {
                    loop {
                        phi.insert(self.piece(&mut cur)?);
                        if !cur.eat("+") {
                            break;
                        }
                    }
                }
                cur.expect(";")?;
                cur.keyword("eps")?;
                cur.expect("=")?;
                let mut eps = BTreeMap::new();
                if !cur.peek(")") {
                    loop {
                        let ps = cur.pos;
                        let piece = self.piece(&mut cur)?;
                        cur.expect(":")?;
                        let s = cur.sign()?;
                        if eps.insert(piece, s).is_some() {
                            return Err(cur.error_at(ps, "eps given twice for one piece"));
                        }
                        if !cur.eat(",") {
                            break;
                        }
                    }
                }
                cur.expect(")")?;
                cur.finish()?;
                let tdim: u32 = phi.iter().map(|(p, m): (&TemperedPiece, usize)| p.rho.dim() * p.a * m as u32).sum();
                let tgroup = group
                    .with_big_n(tdim)
                    .ok_or_else(|| cur.error_at(start, format!("tempered part of dimension {tdim} fits no group of this family")))?;
                let tempered = TemperedData::new(tgroup, phi, eps).map_err(|e| cur.error_at(start, e.to_string()))?;
                let l = make_ldata(group, segments, tempered).map_err(|e| cur.error_at(start, e.to_string()))?;
                self.statements.push(Statement::Ldata(l));
            }
            other => return Err(cur.error_at(start, format!("unknown statement `{other}`"))),
        }
        Ok(())
    }

    fn piece(&self, cur: &mut Cursor) -> Result<TemperedPiece, ParseError> {
        let rho = self.rho(cur)?;
        cur.expect("*")?;
        cur.expect("S")?;
        let a = cur.uint("a positive integer")?;
        Ok(TemperedPiece::new(rho, a))
    }
}

fn document(lines: &[(usize, &str)]) -> Result<Workspace, ParseError> {
    let mut p = Parser { group: None, rhos: BTreeMap::new(), statements: Vec::new(), pending: None };
    for &(no, raw) in lines {
        let text = raw.split('#').next().unwrap_or("");
        if text.trim().is_empty() {
            p.flush()?;
            continue;
        }
        p.line(no, text)?;
    }
    p.flush()?;
    let group = p.group.ok_or(ParseError {
        line: lines.last().map_or(1, |l| l.0),
        column: 1,
        message: "missing `group`".into(),
    })?;
    Ok(Workspace { group, rhos: p.rhos, statements: p.statements })
}

/// Parses a single document.
pub fn parse(input: &str) -> Result<Workspace, ParseError> {
    let mut docs = parse_stream(input)?;
    match docs.len() {
        1 => Ok(docs.remove(0)),
        n => Err(ParseError { line: 1, column: 1, message: format!("expected one document, found {n}") }),
    }
}

/// Parses `---`-separated documents; blank documents are skipped.
pub fn parse_stream(input: &str) -> Result<Vec<Workspace>, ParseError> {
    let mut docs = Vec::new();
    let mut current: Vec<(usize, &str)> = Vec::new();
    let lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
    for (no, line) in lines.chain(std::iter::once((0, "---"))) {
        if line.trim() == "---" {
            if current.iter().any(|(_, l)| !l.split('#').next().unwrap_or("").trim().is_empty()) {
                docs.push(document(&current)?);
            }
            current.clear();
        } else {
            current.push((no, line));
        }
    }
    Ok(docs)
}

fn family_word(g: GroupTag) -> &'static str {
    match g.family {
        Family::Sp => "Sp",
        Family::SOodd => "SO",
    }
}

pub fn write_rho(out: &mut String, rho: &RhoSymbol) {
    write!(out, "rho {} dim {} parity {}", rho.label(), rho.dim(), rho.parity().letter()).unwrap();
    if rho.is_unramified() {
        out.push_str(" unramified");
    }
    if !rho.is_self_dual() {
        write!(out, " dual {}", rho.dual_label()).unwrap();
    }
    out.push('\n');
}

pub fn summand_text(s: &Summand) -> String {
    let twist = if s.twist == Rational64::from_integer(0) { String::new() } else { format!(" @{}", format_rational(&s.twist)) };
    format!("{}{twist} S{} S{}", s.rho, s.a, s.b)
}

/// One `param` line per summand copy.
pub fn param_text(p: &ArthurParameter) -> String {
    p.summands.iter_expanded().map(|s| format!("param {}\n", summand_text(s))).collect()
}

pub fn statement_text(s: &Statement) -> String {
    match s {
        Statement::Param(p) => param_text(p),
        Statement::Ems(e) => format!("{e}\n"),
        Statement::Ldata(l) => format!("ldata {l}\n"),
    }
}

/// Canonical text: the group, the `ρ` (one line per contragredient pair),
/// then the statements separated by blank lines.
pub fn serialize(ws: &Workspace) -> String {
    let mut out = format!("group {} {}\n", family_word(ws.group), ws.group.n);
    for rho in ws.rhos.values() {
        if rho.is_self_dual() || rho.label() < rho.dual_label() {
            write_rho(&mut out, rho);
        }
    }
    for s in &ws.statements {
        out.push('\n');
        out.push_str(&statement_text(s));
    }
    out
}

pub fn serialize_stream(docs: &[Workspace]) -> String {
    docs.iter().map(serialize).collect::<Vec<_>>().join("---\n")
}
