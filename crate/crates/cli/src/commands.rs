//! Subcommands over parsed documents. Commands whose result is again an
//! object (dual parameters, `π(E)`, `L`-classes, ...) print a document that
//! can be piped into the next command.

use arthurkit::algorithm::{arthur_type_check, AlgoError, DerivativeOracle, TemperedOracle, UnramifiedOracle, Verdict};
use arthurkit::arith::format_rational;
use arthurkit::census::{census_parameters, enumerate_ems, CensusConfig};
use arthurkit::classify::{
    classify_unramified, has_generic_member, tempered_packet, tempered_singleton, unramified_member, ClassifyError,
    UnramifiedVerdict,
};
use arthurkit::ems::{l_class, EmsError, OrderMode};
use arthurkit::ldata::{LData, TemperedData, TemperedPiece};
use arthurkit::params::{steinberg_parameter, ArthurParameter, Family, GroupTag, ParamError, Summand};
use serde_json::{json, Value};
use thiserror::Error;

use crate::text::{param_text, serialize, summand_text, Statement, Workspace};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] crate::text::ParseError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Ems(#[from] EmsError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Algorithm(#[from] AlgoError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Tempered,
    Unramified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectKind {
    Param,
    Ems,
    Ldata,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Validate,
    Decompose,
    Lparam,
    DualParam,
    Characters,
    EmsCheck,
    EmsPi,
    EmsDual,
    LClass,
    TemperedPacket,
    Singleton,
    Shahidi,
    ClassifyUnramified,
    UnramifiedMember,
    ArthurType { oracle: OracleKind },
    Steinberg { group: GroupTag },
    Enumerate { family: Family, max_n: u32, objects: ObjectKind, two_rho: bool },
}

impl Command {
    pub fn reads_input(&self) -> bool {
        !matches!(self, Command::Steinberg { .. } | Command::Enumerate { .. })
    }
}

/// One result: its text, its JSON form, and whether it is a negative verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Item {
    pub text: String,
    pub json: Value,
    pub negative: bool,
}

impl Item {
    fn report(text: String, json: Value, negative: bool) -> Self {
        Item { text, json, negative }
    }

    fn document(ws: &Workspace) -> Self {
        Item { text: serialize(ws), json: serde_json::to_value(ws).expect("serializable"), negative: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub items: Vec<Item>,
    /// Items are whole documents and are joined with `---`.
    pub documents: bool,
}

impl Output {
    pub fn negative(&self) -> bool {
        self.items.iter().any(|i| i.negative)
    }

    pub fn text(&self) -> String {
        let parts: Vec<&str> = self.items.iter().map(|i| i.text.as_str()).collect();
        if self.documents {
            parts.join("---\n")
        } else {
            parts.concat()
        }
    }

    pub fn json_lines(&self) -> String {
        self.items.iter().map(|i| format!("{}\n", i.json)).collect()
    }
}

fn sum_list(summands: &[Summand]) -> String {
    if summands.is_empty() {
        "0".into()
    } else {
        summands.iter().map(summand_text).collect::<Vec<_>>().join(" ; ")
    }
}

fn tempered_of(psi: &ArthurParameter) -> Result<LData, CliError> {
    let lp = psi.l_parameter();
    if !lp.is_tempered() || !psi.predicates().is_tempered {
        return Err(CliError::Usage(format!("{psi} is not tempered")));
    }
    let mut phi = arthurkit::multiset::MultiSet::new();
    for (p, m) in lp.pieces.iter() {
        phi.insert_many(TemperedPiece::new(p.rho.clone(), p.a), m);
    }
    Ok(LData::tempered(TemperedData::trivial(psi.group, phi)))
}

fn derived(ws: &Workspace, statements: Vec<Statement>) -> Workspace {
    let mut out = Workspace::new(ws.group);
    for s in statements {
        out.push(s);
    }
    out
}

fn need<T>(items: Vec<T>, what: &str) -> Result<Vec<T>, CliError> {
    if items.is_empty() {
        Err(CliError::Usage(format!("input has no {what}")))
    } else {
        Ok(items)
    }
}

/// Runs `cmd` on the parsed input documents.
pub fn run(cmd: &Command, docs: &[Workspace]) -> Result<Output, CliError> {
    let mut items = Vec::new();
    let mut documents = false;
    match cmd {
        Command::Steinberg { group } => {
            let mut ws = Workspace::new(*group);
            ws.push(Statement::Param(steinberg_parameter(*group)));
            items.push(Item::document(&ws));
            documents = true;
        }
        Command::Enumerate { family, max_n, objects, two_rho } => {
            documents = true;
            let env = CensusConfig::from_env();
            let cap = (*max_n).min(env.max_n_one);
            let config = CensusConfig { max_n_one: cap, max_n_two: if *two_rho { cap.min(env.max_n_two) } else { 0 } };
            for psi in census_parameters(config).into_iter().filter(|p| p.group.family == *family) {
                let statements: Vec<Statement> = match objects {
                    ObjectKind::Param => vec![Statement::Param(psi.clone())],
                    ObjectKind::Ems => enumerate_ems(&psi).into_iter().map(Statement::Ems).collect(),
                    ObjectKind::Ldata => {
                        let mut seen: Vec<LData> = Vec::new();
                        for e in l_class(&psi)? {
                            let pi = e.pi_of_l()?;
                            if !seen.contains(&pi) {
                                seen.push(pi);
                            }
                        }
                        seen.into_iter().map(Statement::Ldata).collect()
                    }
                };
                for s in statements {
                    let mut ws = Workspace::new(psi.group);
                    ws.push(s);
                    items.push(Item::document(&ws));
                }
            }
        }
        _ => {
            for ws in docs {
                run_on(cmd, ws, &mut items, &mut documents)?;
            }
        }
    }
    Ok(Output { items, documents })
}

fn run_on(cmd: &Command, ws: &Workspace, items: &mut Vec<Item>, documents: &mut bool) -> Result<(), CliError> {
    let params: Vec<&ArthurParameter> = ws.params().collect();
    match cmd {
        Command::Validate => {
            for s in &ws.statements {
                let (text, json) = match s {
                    Statement::Param(p) => {
                        let gp = p.is_good_parity();
                        (format!("valid param {p} (good parity: {gp})\n"), json!({"kind": "param", "valid": true, "good_parity": gp}))
                    }
                    Statement::Ems(e) => {
                        let l = e.satisfies_l();
                        (format!("valid {e} (L: {l})\n"), json!({"kind": "ems", "valid": true, "condition_l": l}))
                    }
                    Statement::Ldata(d) => {
                        let gp = d.is_good_parity();
                        (format!("valid ldata {d} (good parity: {gp})\n"), json!({"kind": "ldata", "valid": true, "good_parity": gp}))
                    }
                };
                items.push(Item::report(text, json, false));
            }
        }
        Command::Decompose => {
            for p in need(params, "param")? {
                let d = p.decompose();
                let gp: Vec<Summand> = d.gp.summands.iter_expanded().cloned().collect();
                let text = format!("nu_pos: {}\nnp: {}\ngp: {}\n", sum_list(&d.nu_pos), sum_list(&d.np), sum_list(&gp));
                items.push(Item::report(text, serde_json::to_value(&d).expect("serializable"), false));
            }
        }
        Command::Lparam => {
            for p in need(params, "param")? {
                let lp = p.l_parameter();
                let pieces: Vec<String> = lp
                    .pieces
                    .iter_expanded()
                    .map(|x| {
                        let twist = if x.twist == 0.into() { String::new() } else { format!("@{}", format_rational(&x.twist)) };
                        format!("{}{twist}*S{}", x.rho, x.a)
                    })
                    .collect();
                let text = format!("lparam {}: {}\n", ws.group, pieces.join(" + "));
                items.push(Item::report(text, serde_json::to_value(&lp).expect("serializable"), false));
            }
        }
        Command::DualParam => {
            let out = need(params, "param")?.into_iter().map(|p| Statement::Param(p.dual_parameter())).collect();
            items.push(Item::document(&derived(ws, out)));
            *documents = true;
        }
        Command::Characters => {
            for p in need(params, "param")? {
                let table = p.characters()?;
                let mut text = format!("characters: {}\n", table.len());
                for eps in &table.characters {
                    let parts: Vec<String> =
                        table.distinct.iter().zip(eps).map(|((s, _), e)| format!("{}:{e}", summand_text(s))).collect();
                    text.push_str(&format!("eps {}\n", parts.join(", ")));
                }
                items.push(Item::report(text, serde_json::to_value(&table).expect("serializable"), false));
            }
        }
        Command::EmsCheck => {
            for e in need(ws.ems().collect(), "ems")? {
                let (p, pp, sign, l) =
                    (e.order_check(OrderMode::P), e.order_check(OrderMode::Pprime), e.sign_condition(), e.satisfies_l());
                let text = format!("{e}\n  (P): {p}\n  (P'): {pp}\n  sign: {sign}\n  (L): {l}\n");
                let json = json!({"ems": e, "order_p": p, "order_p_prime": pp, "sign_condition": sign, "condition_l": l});
                items.push(Item::report(text, json, !l));
            }
        }
        Command::EmsPi => {
            let out = need(ws.ems().collect(), "ems")?
                .into_iter()
                .map(|e| e.pi_of_l().map(Statement::Ldata))
                .collect::<Result<Vec<_>, _>>()?;
            items.push(Item::document(&derived(ws, out)));
            *documents = true;
        }
        Command::EmsDual => {
            let out = need(ws.ems().collect(), "ems")?
                .into_iter()
                .map(|e| e.dual().map(Statement::Ems))
                .collect::<Result<Vec<_>, _>>()?;
            items.push(Item::document(&derived(ws, out)));
            *documents = true;
        }
        Command::LClass => {
            let mut out = Vec::new();
            for p in need(params, "param")? {
                out.extend(l_class(p)?.into_iter().map(Statement::Ems));
            }
            items.push(Item::document(&derived(ws, out)));
            *documents = true;
        }
        Command::TemperedPacket => {
            for p in need(params, "param")? {
                tempered_of(p)?;
                let members = tempered_packet(&p.l_parameter())?;
                let mut text = format!("# tempered packet of size {}\n", members.len());
                for m in &members {
                    let l = LData::tempered(m.data.clone());
                    text.push_str(&format!("ldata {l}{}\n", if m.generic { "  # generic" } else { "" }));
                }
                items.push(Item::report(text, serde_json::to_value(&members).expect("serializable"), false));
            }
        }
        Command::Singleton => {
            let mut targets: Vec<LData> = ws.ldata().cloned().collect();
            for p in &params {
                targets.push(tempered_of(p)?);
            }
            for l in need(targets, "tempered param or ldata")? {
                if !l.segments.is_empty() {
                    return Err(CliError::Usage(format!("{l} is not tempered")));
                }
                let s = tempered_singleton(&l.tempered)?;
                items.push(Item::report(format!("singleton: {s}\n"), json!({"ldata": l, "singleton": s}), !s));
            }
        }
        Command::Shahidi => {
            for p in need(params, "param")? {
                let g = has_generic_member(p);
                let pr = p.predicates();
                let text = format!(
                    "generic member: {g}\n  tempered: {}\n  anti-tempered: {}\n  anti-generic: {}\n",
                    pr.is_tempered, pr.is_anti_tempered, pr.is_anti_generic
                );
                items.push(Item::report(text, json!({"generic_member": g, "predicates": pr}), !g));
            }
        }
        Command::ClassifyUnramified => {
            for l in need(ws.ldata().collect(), "ldata")? {
                match classify_unramified(l)? {
                    UnramifiedVerdict::Accepted(e) => {
                        let psi = e.parameter()?;
                        let text = format!("accepted\n{e}\n{}", param_text(&psi));
                        items.push(Item::report(text, json!({"accepted": true, "ems": e, "psi": psi}), false));
                    }
                    UnramifiedVerdict::Rejected(r) => {
                        let text = format!("rejected {}: {}\n", r.condition, r.witness);
                        items.push(Item::report(text, json!({"accepted": false, "rejection": r}), true));
                    }
                }
            }
        }
        Command::UnramifiedMember => {
            for p in need(params, "param")? {
                match unramified_member(p)? {
                    Some(l) => items.push(Item::report(format!("ldata {l}\n"), json!({"member": l}), false)),
                    None => items.push(Item::report("none\n".into(), json!({"member": null}), true)),
                }
            }
        }
        Command::ArthurType { oracle } => {
            let oracle: &dyn DerivativeOracle = match oracle {
                OracleKind::Tempered => &TemperedOracle,
                OracleKind::Unramified => &UnramifiedOracle,
            };
            for l in need(ws.ldata().collect(), "ldata")? {
                let report = arthur_type_check(l, oracle)?;
                let text = match &report.verdict {
                    Verdict::NotArthurType { step, witness } => format!("not of Arthur type (step {step}): {witness}\n"),
                    Verdict::Candidate { psi, .. } => format!("candidate (membership unverified)\n{}", param_text(psi)),
                    Verdict::ArthurVia { psi, ems } => format!("arthur type\n{ems}\n{}", param_text(psi)),
                };
                let negative = !report.verdict.is_arthur();
                items.push(Item::report(text, serde_json::to_value(&report.verdict).expect("serializable"), negative));
            }
        }
        Command::Steinberg { .. } | Command::Enumerate { .. } => unreachable!("handled without input"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse;

    fn run_text(cmd: Command, src: &str) -> Output {
        run(&cmd, &[parse(src).unwrap()]).unwrap()
    }

    #[test]
    fn steinberg_chain() {
        let out = run(&Command::Steinberg { group: GroupTag::sp(2) }, &[]).unwrap();
        let docs = crate::text::parse_stream(&out.text()).unwrap();
        let s = run(&Command::Singleton, &docs).unwrap();
        assert_eq!(s.text(), "singleton: true\n");
        assert!(!s.negative());
    }

    #[test]
    fn ems_pi_output() {
        let out = run_text(Command::EmsPi, "group Sp 1\nrho r dim 1 parity O unramified\nems r [1,-1] l=1 eta=+\n");
        assert!(out.text().contains("ldata L( D(r,-1,-1) ; phi = r*S1 ; eps = r*S1:+ )"), "{}", out.text());
    }

    #[test]
    fn unramified_rejection_is_negative() {
        let src = "group Sp 1\nrho r dim 1 parity O unramified\nrho q dim 1 parity O unramified\nldata L( D(r,-1,-1) ; phi = q*S1 ; eps = q*S1:+ )\n";
        let out = run_text(Command::ClassifyUnramified, src);
        assert!(out.negative());
        assert!(out.text().starts_with("rejected (ii)"), "{}", out.text());
    }

    #[test]
    fn arthur_type_reports() {
        let src = "group Sp 1\nrho r dim 1 parity O unramified\nldata L( D(r,-1,-1) ; phi = r*S1 ; eps = r*S1:+ )\n";
        let out = run_text(Command::ArthurType { oracle: OracleKind::Unramified }, src);
        assert!(out.text().starts_with("arthur type\nems r [1,-1] l=1 eta=+\nparam r S1 S3\n"), "{}", out.text());
        let src = "group Sp 1\nrho r dim 1 parity O unramified\nldata L( D(r,-2,-2) ; phi = r*S1 ; eps = r*S1:+ )\n";
        let out = run_text(Command::ArthurType { oracle: OracleKind::Unramified }, src);
        assert!(out.text().starts_with("not of Arthur type (step 4)"), "{}", out.text());
        assert!(out.negative());
    }

    #[test]
    fn missing_objects_are_usage_errors() {
        let ws = parse("group Sp 1\n").unwrap();
        assert!(matches!(run(&Command::Decompose, &[ws]), Err(CliError::Usage(_))));
    }
}
