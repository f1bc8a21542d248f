//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always reach stdout.

use std::collections::BTreeSet;
use std::process::Command as Process;
use std::time::Instant;

use arthurkit::algorithm::{arthur_type_check, UnramifiedOracle, Verdict};
use arthurkit::arith::HalfInt;
use arthurkit::census::{census_parameters, enumerate_ems, perturbed_profiles, unramified_profiles, CensusConfig};
use arthurkit::classify::{
    classify_unramified, tempered_packet, tempered_singleton, unramified_member, unramified_parameter_set,
    UnramifiedCondition, UnramifiedVerdict,
};
use arthurkit::ems::{l_class, EmsError, ExtendedMultiSegment, ExtendedSegment};
use arthurkit::ldata::{LData, MultiplicityProfile, TemperedData, TemperedPiece};
use arthurkit::multiset::MultiSet;
use arthurkit::params::{steinberg_parameter, ArthurParameter, Family, GroupTag};
use arthurkit::rho::{RhoSymbol, Sign};
use arthurkit_cli::{parse, run, serialize, Command, Statement, Workspace};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tempered_of(psi: &ArthurParameter) -> LData {
    let mut phi = MultiSet::new();
    for (s, m) in psi.summands.iter() {
        phi.insert_many(TemperedPiece::new(s.rho.clone(), s.a), m);
    }
    LData::tempered(TemperedData::trivial(psi.group, phi))
}

fn steinberg_chain() -> Outcome {
    let groups: Vec<GroupTag> = (1..=3).flat_map(|n| [GroupTag::sp(n), GroupTag::so_odd(n)]).collect();
    for &g in &groups {
        let psi = steinberg_parameter(g);
        let packet = tempered_packet(&psi.l_parameter()).map_err(|e| format!("{g}: {e}"))?;
        check(packet.len() == 1, || format!("{g}: packet has {} members", packet.len()))?;
        check(packet[0].generic, || format!("{g}: member not flagged generic"))?;
        let s = tempered_singleton(&packet[0].data).map_err(|e| e.to_string())?;
        check(s, || format!("{g}: not a singleton"))?;
    }
    Ok(format!("{} groups", groups.len()))
}

fn dual_involution(census: &[ArthurParameter]) -> Outcome {
    let (mut checked, mut undefined) = (0, 0);
    for psi in census {
        for e in enumerate_ems(psi) {
            let d = match e.dual() {
                Ok(d) => d,
                Err(EmsError::DualOutOfRange(_)) => {
                    undefined += 1;
                    continue;
                }
                Err(err) => return Err(format!("{e}: {err}")),
            };
            let swapped: MultiSet<_> = e.parameter_unchecked().summands.map(|s| s.swapped());
            check(d.parameter_unchecked().summands == swapped, || format!("{e}: parameter of dual is not swapped"))?;
            check(d.sign_condition(), || format!("{e}: dual {d} breaks the sign condition"))?;
            let dd = d.dual().map_err(|err| format!("{d}: {err}"))?;
            check(dd.weak_equivalent(&e), || format!("{e} -> {d} -> {dd}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} E checked, {undefined} with undefined dual skipped"))
}

/// `2·dim(ρ)·a` per segment and `dim(ρ)·a` per tempered piece, from the
/// segment endpoints alone.
fn l_dimension(pi: &LData) -> u32 {
    let segs: u32 = pi.segments.iter().map(|s| 2 * s.rho.dim() * ((s.x - s.y).twice() / 2 + 1) as u32).sum();
    let temp: u32 = pi.tempered.phi.iter_expanded().map(|p| p.rho.dim() * p.a).sum();
    segs + temp
}

fn dimension_conservation(census: &[ArthurParameter]) -> Outcome {
    let mut checked = 0;
    for psi in census {
        let mut family: Vec<ExtendedMultiSegment> = enumerate_ems(psi).into_iter().filter(|e| e.satisfies_l()).collect();
        family.extend(l_class(psi).map_err(|e| e.to_string())?);
        for e in family {
            let pi = e.pi_of_l().map_err(|err| format!("{e}: {err}"))?;
            let n = psi.group.big_n();
            check(pi.l_parameter().dim() == n, || format!("{e}: L-parameter dimension {} != {n}", pi.l_parameter().dim()))?;
            check(l_dimension(&pi) == n, || format!("{e}: audit {} != {n}", l_dimension(&pi)))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} E checked"))
}

fn character_count(census: &[ArthurParameter]) -> Outcome {
    for psi in census {
        let expanded: Vec<_> = psi.summands.iter_expanded().collect();
        let k = expanded.len();
        let mut count = 0;
        for mask in 0u32..(1 << k) {
            let sign = |i: usize| mask >> i & 1 == 1;
            let product_ok = (0..k).filter(|&i| sign(i)).count() % 2 == 0;
            let equal_ok = (0..k).all(|i| (0..k).all(|j| expanded[i] != expanded[j] || sign(i) == sign(j)));
            if product_ok && equal_ok {
                count += 1;
            }
        }
        let got = psi.characters().map_err(|e| e.to_string())?.len();
        check(got == count, || format!("{psi}: {got} characters, brute force {count}"))?;
    }
    Ok(format!("{} parameters", census.len()))
}

/// `([x,-x], ⌊x+1/2⌋, +)` with multiplicity `m_x - m_{x+1}`, largest `x`
/// first.
fn expected_ems(group: GroupTag, profile: &MultiplicityProfile) -> ExtendedMultiSegment {
    let mut rows = Vec::new();
    for (rho, counts) in &profile.counts {
        for (&x, &m) in counts.iter().rev() {
            let copies = m - profile.get(rho, x + 1);
            let l = ((x + HalfInt::HALF).twice() / 2) as u32;
            for _ in 0..copies {
                rows.push(ExtendedSegment::new(rho.clone(), x, -x, l, Sign::Plus).expect("row"));
            }
        }
    }
    ExtendedMultiSegment::from_rows(group, rows)
}

struct UnramifiedCase {
    group: GroupTag,
    profile: MultiplicityProfile,
    witness: Option<(RhoSymbol, HalfInt)>,
}

fn unramified_cases() -> Vec<UnramifiedCase> {
    let mut out = Vec::new();
    for family in [Family::Sp, Family::SOodd] {
        for (group, profile) in unramified_profiles(family) {
            out.push(UnramifiedCase { group, profile, witness: None });
        }
        for (group, profile, w) in perturbed_profiles(family) {
            out.push(UnramifiedCase { group, profile, witness: Some(w) });
        }
    }
    out
}

fn unramified_round_trip(cases: &[UnramifiedCase]) -> Outcome {
    let (mut accepted, mut rejected) = (0, 0);
    for c in cases {
        let pi = c.profile.to_ldata(c.group).map_err(|e| e.to_string())?;
        let verdict = classify_unramified(&pi).map_err(|e| e.to_string())?;
        match (&c.witness, verdict) {
            (None, UnramifiedVerdict::Accepted(got)) => {
                let e = expected_ems(c.group, &c.profile);
                check(e.pi_of_l().as_ref() == Ok(&pi), || format!("{e} does not give {pi}"))?;
                check(got.weak_equivalent(&e), || format!("{pi}: recovered {got}, expected {e}"))?;
                check(got.parameter() == e.parameter(), || format!("{pi}: parameter mismatch"))?;
                accepted += 1;
            }
            (Some(_), UnramifiedVerdict::Rejected(r)) => {
                check(r.condition == UnramifiedCondition::Monotone, || format!("{pi}: rejected by {}", r.condition))?;
                rejected += 1;
            }
            (w, v) => return Err(format!("{pi}: expected {}, got {v:?}", if w.is_some() { "rejection" } else { "acceptance" })),
        }
    }
    Ok(format!("{accepted} accepted, {rejected} rejected with (ii)"))
}

fn anti_generic_certificate(cases: &[UnramifiedCase]) -> Outcome {
    let mut checked = 0;
    for c in cases.iter().filter(|c| c.witness.is_none()) {
        let pi = c.profile.to_ldata(c.group).map_err(|e| e.to_string())?;
        let cert = unramified_parameter_set(&pi).map_err(|e| e.to_string())?.ok_or_else(|| format!("{pi}: no certificate"))?;
        check(cert.passes(), || format!("{pi}: certificate fails"))?;
        check(cert.psi.summands.iter().all(|(s, _)| s.a == 1), || format!("{pi}: {} is not anti-generic", cert.psi))?;
        let singleton = tempered_singleton(&cert.dual_tempered).map_err(|e| e.to_string())?;
        check(singleton, || format!("{pi}: dual tempered datum is not a singleton"))?;
        checked += 1;
    }
    Ok(format!("{checked} accepted instances"))
}

fn at_most_one_unramified(census: &[ArthurParameter]) -> Outcome {
    let mut with_member = 0;
    let mut considered = 0;
    for psi in census.iter().filter(|p| p.summands.iter().all(|(s, _)| s.rho.is_unramified())) {
        considered += 1;
        let mut found: BTreeSet<String> = BTreeSet::new();
        for e in l_class(psi).map_err(|e| e.to_string())? {
            let pi = e.pi_of_l().map_err(|err| err.to_string())?;
            if matches!(classify_unramified(&pi), Ok(UnramifiedVerdict::Accepted(_))) {
                found.insert(pi.to_string());
            }
        }
        check(found.len() <= 1, || format!("{psi}: {} unramified members", found.len()))?;
        let member = unramified_member(psi).map_err(|e| e.to_string())?;
        if let Some(l) = member {
            check(matches!(classify_unramified(&l), Ok(UnramifiedVerdict::Accepted(_))), || format!("{psi}: {l} rejected"))?;
            check(found.is_empty() || found.contains(&l.to_string()), || format!("{psi}: member {l} not in the L-class"))?;
            with_member += 1;
        }
    }
    Ok(format!("{considered} parameters, {with_member} with an unramified member"))
}

fn algorithm_equivalence(cases: &[UnramifiedCase]) -> Outcome {
    for c in cases {
        let pi = c.profile.to_ldata(c.group).map_err(|e| e.to_string())?;
        let expected = classify_unramified(&pi).map_err(|e| e.to_string())?;
        let report = arthur_type_check(&pi, &UnramifiedOracle).map_err(|e| format!("{pi}: {e}"))?;
        match (expected, report.verdict) {
            (UnramifiedVerdict::Accepted(e), Verdict::ArthurVia { psi, .. }) => {
                check(Ok(&psi) == e.parameter().as_ref(), || format!("{pi}: algorithm gives {psi}"))?;
            }
            (UnramifiedVerdict::Rejected(_), Verdict::NotArthurType { .. }) => {}
            (x, y) => return Err(format!("{pi}: classifier {x:?}, algorithm {y:?}")),
        }
    }
    Ok(format!("{} instances agree", cases.len()))
}

fn trivial_eps_singleton(census: &[ArthurParameter]) -> Outcome {
    let mut checked = 0;
    for psi in census.iter().filter(|p| p.predicates().is_tempered) {
        let pi = tempered_of(psi);
        let s = tempered_singleton(&pi.tempered).map_err(|e| e.to_string())?;
        check(s, || format!("{pi}: not a singleton"))?;
        checked += 1;
    }
    Ok(format!("{checked} tempered parameters"))
}

fn shahidi_shape(census: &[ArthurParameter]) -> Outcome {
    let mut checked = 0;
    for psi in census.iter().filter(|p| !p.predicates().is_tempered) {
        for e in l_class(psi).map_err(|e| e.to_string())? {
            let pi = e.pi_of_l().map_err(|err| err.to_string())?;
            check(!pi.segments.is_empty(), || format!("{psi}: {e} gives tempered {pi}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} members of non-tempered parameters"))
}

fn round_trip_objects() -> (Vec<Workspace>, Vec<Workspace>, Vec<Workspace>) {
    let wide = CensusConfig { max_n_one: 13, max_n_two: 11 };
    let wrap = |group: GroupTag, s: Statement| {
        let mut ws = Workspace::new(group);
        ws.push(s);
        ws
    };
    let census = census_parameters(wide);
    let params: Vec<Workspace> = census.iter().take(1000).map(|p| wrap(p.group, Statement::Param(p.clone()))).collect();
    let ems: Vec<Workspace> = census
        .iter()
        .flat_map(|p| enumerate_ems(p).into_iter().map(move |e| (p.group, e)))
        .take(1000)
        .map(|(g, e)| wrap(g, Statement::Ems(e)))
        .collect();
    let mut ldata = Vec::new();
    for p in &census {
        if ldata.len() >= 1000 {
            break;
        }
        for e in l_class(p).expect("good parity") {
            ldata.push(wrap(p.group, Statement::Ldata(e.pi_of_l().expect("(L)"))));
        }
        if p.predicates().is_tempered {
            for m in tempered_packet(&p.l_parameter()).expect("tempered") {
                ldata.push(wrap(p.group, Statement::Ldata(LData::tempered(m.data))));
            }
        }
    }
    ldata.truncate(1000);
    (params, ems, ldata)
}

fn cli_round_trip() -> Outcome {
    let (params, ems, ldata) = round_trip_objects();
    let mut counts = Vec::new();
    for (name, objects) in [("param", &params), ("ems", &ems), ("ldata", &ldata)] {
        check(objects.len() == 1000, || format!("only {} {name} objects", objects.len()))?;
        for ws in objects {
            let text = serialize(ws);
            let back = parse(&text).map_err(|e| format!("{text}: {e}"))?;
            check(&back == ws, || format!("{text}: parse(serialize) differs"))?;
            check(serialize(&back) == text, || format!("{text}: serialization not byte-stable"))?;
            for s in &back.statements {
                let again = match s {
                    Statement::Param(p) => ws.params().next() == Some(p),
                    Statement::Ems(e) => ws.ems().next().is_some_and(|o| o.rows == e.rows),
                    Statement::Ldata(l) => ws.ldata().next() == Some(l),
                };
                check(again, || format!("{text}: statement changed"))?;
            }
        }
        counts.push(format!("{} {name}", objects.len()));
    }
    let docs: Vec<Workspace> = ldata.iter().take(50).cloned().collect();
    let a = run(&Command::Validate, &docs).map_err(|e| e.to_string())?;
    let b = run(&Command::Validate, &docs).map_err(|e| e.to_string())?;
    check(a == b, || "in-process rerun differs".into())?;
    let bin = env!("CARGO_BIN_EXE_arthurkit");
    let invoke = || {
        Process::new(bin)
            .args(["enumerate", "--group", "Sp", "--max-N", "7", "--objects", "ems", "--two-rho"])
            .env_remove("ARTHURKIT_MAX_N")
            .output()
            .map_err(|e| e.to_string())
    };
    let (x, y) = (invoke()?, invoke()?);
    check(x.status.success() && x.stdout == y.stdout, || "binary rerun differs".into())?;
    Ok(format!("{}; reruns byte-identical", counts.join(", ")))
}

fn main() {
    let start = Instant::now();
    let config = CensusConfig::from_env();
    let census = census_parameters(config);
    let cases = unramified_cases();
    let criteria: Vec<Criterion> = vec![
        ("steinberg chain", Box::new(steinberg_chain)),
        ("dual involution", Box::new(|| dual_involution(&census))),
        ("dimension conservation", Box::new(|| dimension_conservation(&census))),
        ("character count", Box::new(|| character_count(&census))),
        ("unramified round trip", Box::new(|| unramified_round_trip(&cases))),
        ("anti-generic certificate", Box::new(|| anti_generic_certificate(&cases))),
        ("at most one unramified member", Box::new(|| at_most_one_unramified(&census))),
        ("algorithm and classifier agree", Box::new(|| algorithm_equivalence(&cases))),
        ("trivial character singleton", Box::new(|| trivial_eps_singleton(&census))),
        ("non-tempered parameters have non-tempered members", Box::new(|| shahidi_shape(&census))),
        ("text round trip", Box::new(cli_round_trip)),
    ];
    println!(
        "acceptance: census of {} parameters (N <= {} on one rho, N <= {} on two)",
        census.len(),
        config.max_n_one,
        config.max_n_two
    );
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("[{:>2}] PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("[{:>2}] FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} passed in {:.1?}", criteria.len() - failed, criteria.len(), start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
