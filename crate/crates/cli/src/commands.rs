//! Subcommand bodies. Each returns the text for stdout.

use std::fmt::Write as _;
use std::path::Path;

use psp_core::cluster::Dendrogram;
use psp_core::dilworth::{dilworth_brute, slepian_wolf_violation};
use psp_core::distributed::distr_par;
use psp_core::kolmogorov::kolmogorov_with;
use psp_core::psp::{compute, mmi_brute, weighted_ordering, Algorithm, PspReport};
use psp_core::sfm::Backend;
use psp_core::{set, Oracle, Rational};
use serde::Serialize;

use crate::problem::{Model, Problem, ProblemFile, Q, SCHEMA};
use crate::report::{trace, ReportFile, TreeFile};
use crate::{AlgorithmArg, CliError, OutputArgs, RateModel, TreeFormat};

/// Largest instance `validate` compares against enumeration.
pub const VALIDATE_USERS: usize = 8;

pub fn load(path: &Path) -> Result<Problem, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    ProblemFile::parse(&text)?.load()
}

fn order_of(p: &Problem, labels: Option<&[String]>) -> Result<Vec<usize>, CliError> {
    match labels {
        Some(l) => Ok(p.ground.ordering(l)?),
        None => Ok((0..p.ground.len()).collect()),
    }
}

fn algorithm(a: AlgorithmArg) -> Algorithm {
    match a {
        AlgorithmArg::Par => Algorithm::Par,
        AlgorithmArg::Da => Algorithm::Da,
        AlgorithmArg::Kolmogorov => Algorithm::Kolmogorov,
        AlgorithmArg::Distr => Algorithm::Distr,
        AlgorithmArg::Brute => Algorithm::Brute,
    }
}

fn emit<T: Serialize>(doc: &T, output: OutputArgs) -> Option<Result<String, CliError>> {
    let text = if output.json {
        serde_json::to_string(doc)
    } else if output.pretty {
        serde_json::to_string_pretty(doc)
    } else {
        return None;
    };
    Some(text.map(|t| t + "\n").map_err(|e| CliError::Input(e.to_string())))
}

fn vector(p: &Problem, r: &[Rational]) -> String {
    let parts: Vec<String> = p.labels().iter().zip(r).map(|(l, v)| format!("{l}: {v}")).collect();
    format!("({})", parts.join(", "))
}

fn joined(v: &[Rational]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

pub fn psp(
    file: &Path,
    alg: AlgorithmArg,
    order: Option<&[String]>,
    trace_to: Option<&Path>,
    output: OutputArgs,
) -> Result<String, CliError> {
    let p = load(file)?;
    let order = order_of(&p, order)?;
    let o = p.oracle.as_ref();
    let report = match (alg, trace_to) {
        (AlgorithmArg::Distr, Some(path)) => {
            let run = distr_par(o, &order)?;
            let text = serde_json::to_string_pretty(&trace(&p, &run.log)).map_err(|e| CliError::Input(e.to_string()))?;
            std::fs::write(path, text + "\n").map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
            run.report
        }
        (_, Some(_)) => return Err(CliError::Input("--trace needs --algorithm distr".into())),
        _ => compute(algorithm(alg), o, &order)?,
    };
    let doc = ReportFile::new(&p, &report);
    if let Some(out) = emit(&doc, output) {
        return out;
    }
    Ok(psp_text(&p, &report))
}

fn psp_text(p: &Problem, r: &PspReport) -> String {
    let labels = p.labels();
    let mut s = String::new();
    let _ = writeln!(s, "algorithm: {}", r.algorithm);
    let order: Vec<&str> = r.order.iter().map(|i| labels[*i].as_str()).collect();
    let _ = writeln!(s, "order: {}", order.join(","));
    let _ = writeln!(s, "critical α: {}", joined(r.psp.critical_alpha()));
    let _ = writeln!(s, "critical λ: {}", joined(&r.psp.critical_lambda()));
    for (k, c) in r.psp.chain().iter().enumerate() {
        let _ = writeln!(s, "P{k}: {}", c.display_with(labels));
    }
    let _ = writeln!(s, "fundamental partition: {}", r.fundamental_partition.display_with(labels));
    let _ = writeln!(s, "R_ACO = {}  rate {}", r.r_aco, vector(p, &r.optimal_rate_aco));
    match &r.optimal_rate_nco {
        Some(v) => {
            let _ = writeln!(s, "R_NCO = {}  rate {}", r.r_nco, vector(p, v));
        }
        None => {
            let _ = writeln!(s, "R_NCO = {}  (beyond f(V), no integral rate)", r.r_nco);
        }
    }
    let _ = writeln!(s, "I(V) = C_S(V) = {}", r.mmi);
    if let Some(st) = r.strength {
        let _ = writeln!(s, "strength = {st}");
    }
    if r.degenerate {
        let _ = writeln!(s, "degenerate: the users share nothing");
    }
    let _ = writeln!(s, "SFM calls: {}", r.sfm_call_count);
    s
}

#[derive(Debug, Serialize)]
struct RateEntry {
    user: String,
    rate: Q,
}

#[derive(Debug, Serialize)]
struct OmniscienceDoc {
    schema: u32,
    model: &'static str,
    sum_rate: Q,
    order: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<Q>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weighted_sum: Option<Q>,
    rate: Vec<RateEntry>,
}

pub fn omniscience(
    file: &Path,
    model: RateModel,
    weights: Option<&[String]>,
    order: Option<&[String]>,
    output: OutputArgs,
) -> Result<String, CliError> {
    let p = load(file)?;
    let o = p.oracle.as_ref();
    let weights: Option<Vec<Rational>> = weights
        .map(|w| {
            if w.len() != p.ground.len() {
                return Err(CliError::Input(format!("{} weights for {} users", w.len(), p.ground.len())));
            }
            w.iter()
                .map(|x| x.parse::<Rational>().map_err(|e| CliError::Input(e.to_string())))
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;
    let order = match &weights {
        Some(w) => weighted_ordering(w)?,
        None => order_of(&p, order)?,
    };
    let report = compute(Algorithm::Par, o, &order)?;
    let (name, sum, rate) = match model {
        RateModel::Asymptotic => ("asymptotic", report.r_aco, report.optimal_rate_aco.clone()),
        RateModel::Integral => {
            let rate = report
                .optimal_rate_nco
                .clone()
                .ok_or_else(|| CliError::Infeasible(format!("⌈R_ACO⌉ = {} exceeds f(V)", report.r_nco)))?;
            ("integral", report.r_nco, rate)
        }
    };
    check_rate(o, sum, &rate)?;
    let weighted_sum = weights.as_ref().map(|w| w.iter().zip(&rate).map(|(a, b)| *a * *b).sum::<Rational>());
    let doc = OmniscienceDoc {
        schema: SCHEMA,
        model: name,
        sum_rate: Q(sum),
        order: order.iter().map(|i| p.labels()[*i].clone()).collect(),
        weights: weights.as_ref().map(|w| w.iter().copied().map(Q).collect()),
        weighted_sum: weighted_sum.map(Q),
        rate: p.labels().iter().zip(&rate).map(|(l, r)| RateEntry { user: l.clone(), rate: Q(*r) }).collect(),
    };
    if let Some(out) = emit(&doc, output) {
        return out;
    }
    let mut s = format!("{} = {}\nrate {}\n", if name == "integral" { "R_NCO" } else { "R_ACO" }, sum, vector(&p, &rate));
    if let Some(ws) = weighted_sum {
        let _ = writeln!(s, "weighted sum = {ws}");
    }
    Ok(s)
}

fn check_rate(o: &dyn Oracle, sum: Rational, rate: &[Rational]) -> Result<(), CliError> {
    if rate.iter().copied().sum::<Rational>() != sum {
        return Err(CliError::Infeasible("rate does not add up to the sum-rate".into()));
    }
    if let Some(x) = slepian_wolf_violation(o, rate) {
        return Err(CliError::Infeasible(format!("Slepian-Wolf constraint fails on {x:#b}")));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct StrengthDoc {
    schema: u32,
    strength: Q,
    attack_partition: Vec<Vec<String>>,
}

pub fn strength(file: &Path, output: OutputArgs) -> Result<String, CliError> {
    let p = load(file)?;
    if p.model != Model::Graph {
        return Err(CliError::Input("strength needs a graph model".into()));
    }
    let order: Vec<usize> = (0..p.ground.len()).collect();
    let r = compute(Algorithm::Par, p.oracle.as_ref(), &order)?;
    let sigma = r.strength.expect("graph model");
    let attack = &r.fundamental_partition;
    let doc = StrengthDoc {
        schema: SCHEMA,
        strength: Q(sigma),
        attack_partition: attack.blocks().iter().map(|b| p.names(*b)).collect(),
    };
    if let Some(out) = emit(&doc, output) {
        return out;
    }
    Ok(format!("strength = {sigma}\nattack partition: {}\n", attack.display_with(p.labels())))
}

pub fn cluster(file: &Path, format: TreeFormat) -> Result<String, CliError> {
    let p = load(file)?;
    let order: Vec<usize> = (0..p.ground.len()).collect();
    let r = compute(Algorithm::Par, p.oracle.as_ref(), &order)?;
    let d = Dendrogram::from_psp(&r.psp)?;
    Ok(match format {
        TreeFormat::Json => {
            serde_json::to_string_pretty(&TreeFile::new(&p, &d)).map_err(|e| CliError::Input(e.to_string()))? + "\n"
        }
        TreeFormat::Dot => d.to_dot(p.labels()),
        TreeFormat::Newick => d.to_newick(p.labels()) + "\n",
    })
}

struct Checks {
    passed: usize,
    lines: String,
    failure: Option<String>,
}

impl Checks {
    fn record(&mut self, name: &str, outcome: Result<(), String>) {
        match outcome {
            Ok(()) => {
                self.passed += 1;
                let _ = writeln!(self.lines, "ok    {name}");
            }
            Err(e) => {
                let _ = writeln!(self.lines, "FAIL  {name}: {e}");
                self.failure.get_or_insert(format!("{name}: {e}"));
            }
        }
    }
}

fn expect(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn validate(file: &Path) -> Result<String, CliError> {
    let p = load(file)?;
    let n = p.ground.len();
    if n > VALIDATE_USERS {
        return Err(psp_core::PspError::TooLarge { what: "validated instance", size: n, limit: VALIDATE_USERS }.into());
    }
    let o = p.oracle.as_ref();
    let order: Vec<usize> = (0..n).collect();
    let algs = [Algorithm::Par, Algorithm::Da, Algorithm::Kolmogorov, Algorithm::Distr, Algorithm::Brute];
    let reports: Vec<Result<PspReport, psp_core::PspError>> = std::thread::scope(|s| {
        let handles: Vec<_> = algs.iter().map(|a| s.spawn(|| compute(*a, o, &order))).collect();
        handles.into_iter().map(|h| h.join().expect("algorithm thread")).collect()
    });
    let mut c = Checks { passed: 0, lines: String::new(), failure: None };
    let mut ok = Vec::new();
    for (a, r) in algs.iter().zip(reports) {
        match r {
            Ok(r) => ok.push(r),
            Err(e) => c.record(&format!("{a} runs"), Err(e.to_string())),
        }
    }
    if let Some(brute) = ok.iter().find(|r| r.algorithm == Algorithm::Brute) {
        for r in ok.iter().filter(|r| r.algorithm != Algorithm::Brute) {
            c.record(&format!("{} ≡ brute", r.algorithm), expect(r.psp == brute.psp, || format!("{:?} vs {:?}", r.psp, brute.psp)));
        }
    }
    if let Some(par) = ok.iter().find(|r| r.algorithm == Algorithm::Par) {
        invariants(&mut c, o, par);
    }
    c.record("DistrPAR log replays", distr_par(o, &order).and_then(|run| run.replay(o, Backend::Auto)).map(|_| ()).map_err(|e| e.to_string()));
    c.record(
        "Kolmogorov chains nest downward",
        kolmogorov_with(Backend::Auto, o, &order).map_err(|e| e.to_string()).and_then(|run| {
            let bad = run
                .iterations
                .iter()
                .find(|it| it.chain.sets.windows(2).any(|w| w[0] == w[1] || !set::is_subset(w[1], w[0])));
            expect(bad.is_none(), || format!("user {}", bad.unwrap().chain.user))
        }),
    );
    let summary = format!("{}{} checks passed\n", c.lines, c.passed);
    match c.failure {
        None => Ok(summary),
        Some(first) => {
            eprint!("{summary}");
            Err(CliError::Divergence(format!("first divergence: {first}")))
        }
    }
}

fn invariants(c: &mut Checks, o: &dyn Oracle, r: &PspReport) {
    let psp = &r.psp;
    let (lo, total) = (psp.window_lo(), psp.total());
    let mut probes = vec![lo, total];
    let crit = psp.critical_alpha();
    for (k, a) in crit.iter().enumerate() {
        probes.push(*a);
        let prev = if k == 0 { lo } else { crit[k - 1] };
        probes.push((prev + *a) / Rational::from(2));
    }
    let rates = r.rates.as_ref().expect("par keeps rates");
    c.record(
        "rates meet the Dilworth truncation",
        probes.iter().try_for_each(|a| {
            let (value, finest) = dilworth_brute(o, *a).map_err(|e| e.to_string())?;
            let sum: Rational = rates.at(*a).into_iter().sum();
            expect(sum == value, || format!("α = {a}: {sum} vs {value}"))?;
            expect(*psp.partition_at(*a) == finest, || format!("α = {a}: partition differs"))
        }),
    );
    c.record(
        "tight blocks at every probe",
        probes.iter().try_for_each(|a| {
            let rate = rates.at(*a);
            psp.partition_at(*a).blocks().iter().try_for_each(|b| {
                let sum: Rational = set::members(*b).map(|m| rate[m]).sum();
                let want = psp_core::oracle::residual(o, *a, *b);
                expect(sum == want, || format!("α = {a}, block {b:#b}: {sum} vs {want}"))
            })
        }),
    );
    c.record(
        "Slepian-Wolf achievability at R_ACO",
        expect(slepian_wolf_violation(o, &r.optimal_rate_aco).is_none(), || "violated".into()),
    );
    c.record(
        "R_ACO = f(V) - I(V)",
        mmi_brute(o).map_err(|e| e.to_string()).and_then(|(mmi, _)| {
            expect(total - mmi == r.r_aco, || format!("I(V) = {mmi}, R_ACO = {}", r.r_aco))
        }),
    );
}
