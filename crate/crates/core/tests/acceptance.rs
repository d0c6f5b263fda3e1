//! End-to-end acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use stl_tableau::formula::int;
use stl_tableau::lra::check_consistent;
use stl_tableau::oracle::{brute_force_check, DEFAULT_CAP};
use stl_tableau::random::{random_corpus, RandomConfig};
use stl_tableau::smt_export::emit_smtlib;
use stl_tableau::tableau::TOGGLES;
use stl_tableau::{
    parse_requirements, parse_stl, solve, Dialect, Formula, LinearConstraint, Options, Relation, Status, Verdict,
};

const CORPUS_SEED: u64 = 2024;
const CORPUS_SIZE: usize = 500;
const LIMIT: Duration = Duration::from_secs(120);

type Outcome = Result<String, String>;

/// Solver front end that remembers every horizon violation it has seen.
#[derive(Default)]
struct Runs {
    count: u64,
    violations: u64,
    offenders: Vec<String>,
}

impl Runs {
    fn solve(&mut self, f: &Formula, opts: &Options) -> Verdict {
        let v = solve(f, opts);
        self.count += 1;
        if v.stats.horizon_violations > 0 {
            self.violations += v.stats.horizon_violations;
            self.offenders.push(format!("{f} with {}", opts.fingerprint()));
        }
        v
    }
}

fn bench_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks")
}

fn load(path: &Path) -> Formula {
    let dialect = if path.extension().is_some_and(|e| e == "mltl") {
        Dialect::Mltl
    } else {
        Dialect::Stl
    };
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_requirements(&text, dialect).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn bundled() -> Vec<(String, Formula)> {
    let mut out = Vec::new();
    for sub in ["stl", "mltl"] {
        let mut files: Vec<PathBuf> = std::fs::read_dir(bench_root().join(sub))
            .expect("benchmark directory")
            .map(|e| e.expect("directory entry").path())
            .collect();
        files.sort();
        for p in files {
            let name = format!("{sub}/{}", p.file_name().unwrap().to_string_lossy());
            out.push((name, load(&p)));
        }
    }
    out
}

fn status_name(sat: bool) -> Status {
    if sat {
        Status::Sat
    } else {
        Status::Unsat
    }
}

fn benchmark_verdicts(runs: &mut Runs) -> Outcome {
    let expected = [
        ("car", Status::Sat),
        ("thermostat", Status::Sat),
        ("watertank", Status::Sat),
        ("battery", Status::Sat),
        ("railroad", Status::Unsat),
    ];
    let mut parts = Vec::new();
    for (name, want) in expected {
        let f = load(&bench_root().join(format!("stl/{name}.stl")));
        let start = Instant::now();
        let v = runs.solve(&f, &Options::default());
        let took = start.elapsed();
        if v.status != want {
            return Err(format!("{name}: {} instead of {want}", v.status));
        }
        if took > LIMIT {
            return Err(format!("{name}: {:.1}s", took.as_secs_f64()));
        }
        if !common::witness_holds(&f, &v) {
            return Err(format!("{name}: witness does not satisfy the requirements"));
        }
        parts.push(format!("{name} {want} {:.3}s", took.as_secs_f64()));
    }
    Ok(parts.join(", "))
}

fn railroad_pair(runs: &mut Runs) -> Outcome {
    let f = parse_stl("G[3,50] F[5,20] (a >= 80) & G[10,60] (a >= 80 -> G[20,40] (a < 60))").unwrap();
    let start = Instant::now();
    let v = runs.solve(&f, &Options::default());
    let took = start.elapsed().as_secs_f64();
    match v.status {
        Status::Unsat if start.elapsed() <= LIMIT => Ok(format!("unsat in {took:.3}s")),
        s => Err(format!("{s} in {took:.3}s")),
    }
}

fn worked_examples(runs: &mut Runs) -> Outcome {
    let mut parts = Vec::new();
    for text in ["G[1,2] x > 0", "F[0,2] x < 5", "G[0,10] x > 5 & F[0,11] x < 0"] {
        let f = parse_stl(text).unwrap();
        let v = runs.solve(&f, &Options::default());
        if v.status != Status::Sat {
            return Err(format!("{text}: {}", v.status));
        }
        if !common::witness_holds(&f, &v) {
            return Err(format!("{text}: witness rejected by the evaluator"));
        }
        parts.push(format!("{text}: sat, jumps {}", v.stats.jumps));
    }
    let jump_example = parse_stl("G[0,10] x > 5 & F[0,11] x < 0").unwrap();
    let v = runs.solve(&jump_example, &Options::default());
    if v.stats.jumps != 1 || v.stats.jumped_time != 10 {
        return Err(format!(
            "jump example took {} jumps covering {} instants",
            v.stats.jumps, v.stats.jumped_time
        ));
    }
    Ok(parts.join("; "))
}

fn corpus() -> Vec<Formula> {
    random_corpus(CORPUS_SEED, CORPUS_SIZE, &RandomConfig::default())
}

fn oracle_equivalence(runs: &mut Runs, formulas: &[Formula]) -> Outcome {
    let start = Instant::now();
    let mut sat = 0;
    for f in formulas {
        let expected = brute_force_check(f, DEFAULT_CAP)
            .map_err(|e| format!("{f}: {e}"))?
            .satisfiable;
        let v = runs.solve(f, &Options::default());
        if v.status != status_name(expected) {
            return Err(format!("{f}: tableau {} but oracle {}", v.status, status_name(expected)));
        }
        if !common::witness_holds(f, &v) {
            return Err(format!("{f}: witness rejected"));
        }
        sat += usize::from(expected);
    }
    let took = start.elapsed();
    if took > Duration::from_secs(600) {
        return Err(format!("took {:.1}s", took.as_secs_f64()));
    }
    Ok(format!(
        "{} formulas agree ({sat} sat), {:.1}s",
        formulas.len(),
        took.as_secs_f64()
    ))
}

fn jump_equivalence(runs: &mut Runs, formulas: &[Formula]) -> Outcome {
    for f in formulas {
        let with = runs.solve(f, &Options::default());
        let without = runs.solve(f, &Options::without("jump"));
        if with.status != without.status {
            return Err(format!("{f}: {} with jumps, {} without", with.status, without.status));
        }
    }
    Ok(format!("{} formulas agree", formulas.len()))
}

fn ablation(runs: &mut Runs, formulas: &[Formula]) -> Outcome {
    let mut timeouts = Vec::new();
    let mut checked = 0;
    let bench = bundled();
    let cases = bench
        .iter()
        .map(|(n, f)| (n.clone(), f, Duration::from_secs(30)))
        .chain(
            formulas
                .iter()
                .enumerate()
                .map(|(i, f)| (format!("random #{i}"), f, Duration::from_secs(10))),
        );
    for (name, f, limit) in cases {
        let reference = runs.solve(f, &Options::default()).status;
        for toggle in TOGGLES {
            let opts = Options {
                timeout: Some(limit),
                ..Options::without(toggle)
            };
            let v = runs.solve(f, &opts);
            match v.status {
                Status::Timeout => timeouts.push(format!("{name} no-{toggle}")),
                s if s != reference => return Err(format!("{name}: {reference} by default, {s} with no-{toggle}")),
                _ => checked += 1,
            }
        }
    }
    let reported = if timeouts.is_empty() {
        "no timeouts".to_owned()
    } else {
        format!("timeouts: {}", timeouts.join(", "))
    };
    Ok(format!("{checked} runs agree; {reported}"))
}

fn jump_scaling(runs: &mut Runs) -> Outcome {
    let mut rows = Vec::new();
    for n in [10u64, 100, 1000, 10000] {
        let f = parse_stl(&format!("G[0,{n}] x > 5 & F[0,{}] x < 0", n + 1)).unwrap();
        let with = runs.solve(&f, &Options::default());
        let without = runs.solve(
            &f,
            &Options {
                timeout: None,
                ..Options::without("jump")
            },
        );
        if with.status != Status::Sat || without.status != Status::Sat {
            return Err(format!("N={n}: {} / {}", with.status, without.status));
        }
        rows.push((n, with.stats.poised, without.stats.poised));
    }
    let table: Vec<String> = rows.iter().map(|(n, a, b)| format!("N={n}: {a} vs {b}")).collect();
    let summary = table.join(", ");
    if let Some((n, a, _)) = rows.iter().find(|(_, a, _)| *a > 5) {
        return Err(format!("N={n} needs {a} poised nodes with jumps; {summary}"));
    }
    let ratios: Vec<f64> = rows.iter().map(|(n, _, b)| *b as f64 / *n as f64).collect();
    let (lo, hi) = ratios
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), r| (lo.min(*r), hi.max(*r)));
    if lo < 0.5 || hi > 2.0 * lo {
        return Err(format!("no-jump growth is not linear: {summary}"));
    }
    Ok(summary)
}

fn termination_bound(runs: &Runs) -> Outcome {
    if runs.violations == 0 {
        Ok(format!("{} solver runs, zero violations", runs.count))
    } else {
        Err(format!(
            "{} violations, e.g. {}",
            runs.violations,
            runs.offenders.first().map_or("", String::as_str)
        ))
    }
}

fn random_system(rng: &mut StdRng) -> Vec<LinearConstraint> {
    let names = ["x", "y", "z"];
    let relations = [Relation::Gt, Relation::Ge, Relation::Eq, Relation::Neq];
    let rows = rng.gen_range(1..=6);
    (0..rows)
        .map(|_| {
            let terms: Vec<(String, _)> = names
                .iter()
                .map(|v| (v.to_string(), int(rng.gen_range(-3..=3))))
                .collect();
            let relation = relations[rng.gen_range(0..relations.len())];
            LinearConstraint::new(terms, relation, int(rng.gen_range(-3..=3)))
        })
        .filter(|c| !c.is_ground())
        .collect()
}

fn lra_agreement() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let mut consistent = 0;
    for i in 0..1000 {
        let cs = random_system(&mut rng);
        let result = check_consistent(&cs);
        if result.is_consistent() != common::fm::consistent(&cs) {
            return Err(format!("system #{i} disagrees: {cs:?}"));
        }
        if let Some(model) = &result.model {
            consistent += 1;
            let full: BTreeMap<String, _> = ["x", "y", "z"]
                .iter()
                .map(|v| (v.to_string(), model.get(*v).cloned().unwrap_or_else(|| int(0))))
                .collect();
            if let Some(c) = cs.iter().find(|c| !c.holds(&full)) {
                return Err(format!("system #{i}: model {model:?} violates {c:?}"));
            }
        }
    }
    Ok(format!("1000 systems agree, {consistent} models verified"))
}

fn find_on_path(names: &[&str]) -> Option<PathBuf> {
    let path = std::env::var_os("PATH")?;
    names.iter().find_map(|name| {
        std::env::split_paths(&path)
            .map(|dir| dir.join(name))
            .find(|p| p.is_file())
    })
}

fn external_verdict(solver: &Path, script: &str) -> Result<String, String> {
    let is_z3 = solver.file_name().is_some_and(|n| n == "z3");
    let args: &[&str] = if is_z3 { &["-in"] } else { &["--lang=smt2"] };
    let mut child = Command::new(solver)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .map_err(|e| e.to_string())?;
    child
        .stdin
        .take()
        .expect("piped stdin")
        .write_all(script.as_bytes())
        .map_err(|e| e.to_string())?;
    let out = child.wait_with_output().map_err(|e| e.to_string())?;
    Ok(String::from_utf8_lossy(&out.stdout).trim().to_owned())
}

fn smt_export(runs: &mut Runs) -> Outcome {
    let script = emit_smtlib(&parse_stl("G[2,3] F[0,1] (a >= 80)").unwrap());
    let expected = "(assert (and (or (>= a_2 80) (>= a_3 80)) (or (>= a_3 80) (>= a_4 80))))";
    let asserts: Vec<&str> = script.lines().filter(|l| l.starts_with("(assert")).collect();
    if asserts != [expected] {
        return Err(format!("assertions were {asserts:?}"));
    }
    let Some(solver) = find_on_path(&["z3", "cvc5"]) else {
        return Ok("assertion exact; no z3 or cvc5 on PATH, external cross-check skipped".into());
    };
    let bench = bundled();
    for (name, f) in &bench {
        let ours = runs.solve(f, &Options::default()).status;
        let theirs = external_verdict(&solver, &emit_smtlib(f))?;
        if theirs != ours.to_string() {
            return Err(format!("{name}: tableau {ours}, {} says {theirs}", solver.display()));
        }
    }
    Ok(format!(
        "assertion exact; {} agrees on {} bundled benchmarks",
        solver.display(),
        bench.len()
    ))
}

fn main() {
    let mut runs = Runs::default();
    let formulas = corpus();
    let mut failed = 0;
    let mut report = |n: u32, title: &str, outcome: Outcome| {
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {n:>2} {title}: {detail}");
    };
    report(1, "benchmark verdicts", benchmark_verdicts(&mut runs));
    report(2, "railroad pair", railroad_pair(&mut runs));
    report(3, "worked examples", worked_examples(&mut runs));
    report(4, "oracle equivalence", oracle_equivalence(&mut runs, &formulas));
    report(5, "no-jump equivalence", jump_equivalence(&mut runs, &formulas));
    report(6, "ablation soundness", ablation(&mut runs, &formulas));
    report(7, "jump scaling", jump_scaling(&mut runs));
    let smt = smt_export(&mut runs);
    report(8, "termination bound", termination_bound(&runs));
    report(9, "LRA agreement", lra_agreement());
    report(10, "SMT-LIB export", smt);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
