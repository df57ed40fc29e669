//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::fs;
use std::panic;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xdual_core::brute::brute_force_explanations;
use xdual_core::duality::verify_duality;
use xdual_core::enumerate::{enumerate_all, EnumerationOptions};
use xdual_core::explain::{extract_axp, extract_cxp, is_cxp, targeted_cxp};
use xdual_core::fixtures::three_class;
use xdual_core::hitting_set::{hits_all, minimal_hitting_set, HittingSetInstance, MhsMode};
use xdual_core::io::{parse_instances, parse_model, serialize_model};
use xdual_core::synth::{random_instances, random_tree_model, TreeParams};
use xdual_core::{Budget, ClassLabel, Error, ExplanationProblem, Instance, Model, Oracle};

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn load(name: &str) -> Model {
    parse_model(&fs::read_to_string(data(name)).unwrap()).unwrap()
}

fn instance(m: &Model, csv: &str) -> Instance {
    parse_instances(csv, m.space()).unwrap().remove(0).instance
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn goldens() -> Check {
    let m = load("poole.json");
    let space = m.space();
    let e1 = instance(&m, "A,T,L,W\nknown,new,long,home\n");
    let e2 = instance(&m, "A,T,L,W\nknown,new,short,work\n");
    let e3 = e1.clone();
    let limit = Duration::from_millis(1);
    let mut slowest = Duration::ZERO;
    let mut check = |what: &str, got: String, want: &str, took: Duration| -> Result<(), String> {
        slowest = slowest.max(took);
        ensure(got == want, || format!("{what}: got {got}, want {want}"))?;
        ensure(took < limit, || format!("{what}: took {took:?}"))
    };

    let (p, t) = timed(|| m.class_name(m.predict(&e1)).to_string());
    check("predict(e1)", p, "skips", t)?;
    let (p, t) = timed(|| m.class_name(m.predict(&e2)).to_string());
    check("predict(e2)", p, "reads", t)?;

    let run_axp = |x: &Instance| {
        let p = ExplanationProblem::new(&m, x.clone()).unwrap();
        let mut o = Oracle::new(&m);
        space.format_literals(extract_axp(&p, &mut o, None).unwrap().literals())
    };
    let run_cxp = |x: &Instance| {
        let p = ExplanationProblem::new(&m, x.clone()).unwrap();
        let mut o = Oracle::new(&m);
        let c = extract_cxp(&p, &mut o, &[], &Budget::default())
            .unwrap()
            .unwrap();
        space.format_literals(c.literals())
    };
    let (s, t) = timed(|| run_axp(&e3));
    check("axp(e3)", s, "{L=long}", t)?;
    let (s, t) = timed(|| run_cxp(&e3));
    check("cxp(e3)", s, "{L=long}", t)?;
    let (s, t) = timed(|| run_cxp(&e2));
    check("cxp(e2)", s, "{L=short}", t)?;
    // Set equality with {L=short, T=new}; printed in declaration order.
    let (s, t) = timed(|| run_axp(&e2));
    check("axp(e2)", s, "{T=new, L=short}", t)?;
    Ok(format!("6 goldens, slowest {slowest:?}"))
}

struct CorpusEntry {
    model: Model,
    instances: Vec<Instance>,
}

fn corpus() -> Vec<CorpusEntry> {
    let params = TreeParams::default();
    (0..200u64)
        .map(|seed| {
            let model = random_tree_model(seed, &params);
            let instances = random_instances(seed + 10_000, model.space(), 5);
            CorpusEntry { model, instances }
        })
        .collect()
}

fn corpus_shape_ok(c: &[CorpusEntry]) -> Result<(), String> {
    for e in c {
        let s = e.model.space();
        ensure(s.len() <= 6, || "more than 6 features".into())?;
        ensure(
            s.features()
                .iter()
                .all(|f| (2..=3).contains(&f.domain.len())),
            || "domain size outside 2..=3".into(),
        )?;
        ensure(e.model.num_classes() >= 2, || "fewer than 2 classes".into())?;
    }
    Ok(())
}

fn sorted(mut v: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    v.sort();
    v
}

fn brute_equivalence(c: &[CorpusEntry]) -> Check {
    corpus_shape_ok(c)?;
    let budget = Budget::default();
    let start = Instant::now();
    let mut pairs = 0;
    for (i, e) in c.iter().enumerate() {
        for x in &e.instances {
            let p = ExplanationProblem::new(&e.model, x.clone()).map_err(|e| e.to_string())?;
            let mut o = Oracle::new(&e.model);
            let r = enumerate_all(&p, &mut o, &budget, &EnumerationOptions::default())
                .map_err(|e| e.to_string())?;
            let b = brute_force_explanations(&p, &mut o, &budget).map_err(|e| e.to_string())?;
            let axps = sorted(r.axps.iter().map(|a| a.features()).collect());
            let cxps = sorted(r.cxps.iter().map(|c| c.features()).collect());
            ensure(axps == b.axps && cxps == b.cxps, || {
                format!(
                    "model {i}: enumerated {axps:?}/{cxps:?}, brute force {:?}/{:?}",
                    b.axps, b.cxps
                )
            })?;
            pairs += 1;
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!("{} models, {pairs} instances, {took:.2?}", c.len()))
}

fn duality(c: &[CorpusEntry]) -> Check {
    let budget = Budget::default();
    let mut checked = 0;
    for (i, e) in c.iter().enumerate() {
        for x in &e.instances {
            let p = ExplanationProblem::new(&e.model, x.clone()).unwrap();
            let mut o = Oracle::new(&e.model);
            let r = enumerate_all(&p, &mut o, &budget, &EnumerationOptions::default())
                .map_err(|e| e.to_string())?;
            let axps: Vec<_> = r.axps.iter().map(|a| a.features()).collect();
            let cxps: Vec<_> = r.cxps.iter().map(|c| c.features()).collect();
            let report = verify_duality(&axps, &cxps);
            ensure(report.is_ok(), || {
                let name = |f: usize| format!("x{f}");
                format!("model {i}: {}", report.violations[0].describe(&name))
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} instances, 0 violations"))
}

fn call_budgets(c: &[CorpusEntry]) -> Check {
    let budget = Budget::default();
    let (mut max_axp_extra, mut max_cxp_ratio) = (0i64, 0.0f64);
    for (i, e) in c.iter().enumerate() {
        for x in &e.instances {
            let p = ExplanationProblem::new(&e.model, x.clone()).unwrap();
            let n = p.arity() as u64;
            let mut o = Oracle::new(&e.model);
            extract_axp(&p, &mut o, None).map_err(|e| e.to_string())?;
            let s = *o.stats();
            ensure(s.entailment_calls == n && s.witness_calls == 0, || {
                format!(
                    "model {i}: AXp used {} entailment calls for |tau|={n}",
                    s.entailment_calls
                )
            })?;
            max_axp_extra = max_axp_extra.max(s.entailment_calls as i64 - n as i64);

            let mut o = Oracle::new(&e.model);
            extract_cxp(&p, &mut o, &[], &budget).map_err(|e| e.to_string())?;
            let w = o.stats().witness_calls;
            ensure(w <= n, || {
                format!("model {i}: CXp used {w} witness calls for |tau|={n}")
            })?;
            max_cxp_ratio = max_cxp_ratio.max(w as f64 / n as f64);
        }
    }
    Ok(format!(
        "AXp calls exactly |tau| (max excess {max_axp_extra}); CXp witness calls at most {max_cxp_ratio:.2}*|tau|"
    ))
}

/// Subset-minimal sets of features whose release lets some completion reach `targets`.
fn naive_correction_sets(m: &Model, tau: &Instance, targets: &[ClassLabel]) -> Vec<Vec<usize>> {
    let n = tau.len();
    let all: Vec<Instance> = (0..m.space().size().unwrap() as usize)
        .map(|mut code| {
            let mut v = vec![0; n];
            for f in (0..n).rev() {
                let d = m.space().domain_size(f);
                v[f] = code % d;
                code /= d;
            }
            Instance::new(v)
        })
        .collect();
    let reaches = |rho: &[usize]| {
        all.iter().any(|x| {
            (0..n).all(|f| rho.contains(&f) || x.value(f) == tau.value(f))
                && targets.contains(&m.predict(x))
        })
    };
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut subsets: Vec<Vec<usize>> = (0u32..1 << n)
        .map(|mask| (0..n).filter(|&f| mask & (1 << f) != 0).collect())
        .collect();
    subsets.sort_by_key(|s: &Vec<usize>| s.len());
    for s in subsets {
        if reaches(&s) && !out.iter().any(|o| o.iter().all(|f| s.contains(f))) {
            out.push(s);
        }
    }
    out
}

fn targeted(c: &[CorpusEntry]) -> Check {
    let m = three_class();
    let mut choices = 0;
    for code in 0..m.space().size().unwrap() as usize {
        let tau = Instance::new(vec![code / 2, code % 2]);
        let base = ExplanationProblem::new(&m, tau.clone()).unwrap();
        let others = m.other_classes(base.prediction());
        for mask in 1u32..(1 << others.len()) {
            let delta: Vec<ClassLabel> = (0..others.len())
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| others[i])
                .collect();
            let p = base.clone().with_targets(&delta).unwrap();
            let mut o = Oracle::new(&m);
            let got = targeted_cxp(&p, &mut o)
                .map_err(|e| e.to_string())?
                .features();
            let want = naive_correction_sets(&m, &tau, &delta);
            ensure(want.contains(&got), || {
                format!("tau {tau:?}, targets {delta:?}: {got:?} not in {want:?}")
            })?;
            choices += 1;
        }
    }
    let mut binary = 0;
    for (i, e) in c
        .iter()
        .enumerate()
        .filter(|(_, e)| e.model.num_classes() == 2)
    {
        for x in &e.instances {
            let base = ExplanationProblem::new(&e.model, x.clone()).unwrap();
            let delta = e.model.other_classes(base.prediction());
            let p = base.clone().with_targets(&delta).unwrap();
            let mut o = Oracle::new(&e.model);
            match targeted_cxp(&p, &mut o) {
                Ok(cxp) => {
                    let ok =
                        is_cxp(&base, &mut o, &cxp.features(), &[]).map_err(|e| e.to_string())?;
                    ensure(ok, || {
                        format!("model {i}: {:?} fails the CXp check", cxp.features())
                    })?;
                }
                // Constant models have no CXp of either kind.
                Err(Error::TargetUnreachable) => {
                    let none = extract_cxp(&base, &mut o, &[], &Budget::default())
                        .map_err(|e| e.to_string())?;
                    ensure(none.is_none(), || {
                        format!("model {i}: unreachable target but a CXp exists")
                    })?;
                }
                Err(err) => return Err(err.to_string()),
            }
            binary += 1;
        }
    }
    Ok(format!(
        "{choices} three-class (tau, targets) choices, {binary} binary instances"
    ))
}

fn exhaustive_mhs(n: usize, family: &[Vec<usize>]) -> BTreeSet<Vec<usize>> {
    (0u32..1 << n)
        .map(|mask| (0..n).filter(|&e| mask & (1 << e) != 0).collect::<Vec<_>>())
        .filter(|s| hits_all(s, family))
        .filter(|s| {
            s.iter().all(|&e| {
                let t: Vec<usize> = s.iter().copied().filter(|&x| x != e).collect();
                !hits_all(&t, family)
            })
        })
        .collect()
}

fn mhs_exactness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut total = 0;
    for i in 0..100 {
        let n = rng.gen_range(1..=12);
        let family: Vec<Vec<usize>> = (0..rng.gen_range(0..=10))
            .map(|_| {
                (0..rng.gen_range(1..=4))
                    .map(|_| rng.gen_range(0..n))
                    .collect()
            })
            .collect();
        let mut inst =
            HittingSetInstance::new(0..n, family.clone(), vec![]).map_err(|e| e.to_string())?;
        let mut found = BTreeSet::new();
        while let Some(s) = minimal_hitting_set(&inst, MhsMode::SubsetMinimal, 10_000_000)
            .map_err(|e| e.to_string())?
        {
            ensure(found.insert(s.clone()), || {
                format!("instance {i}: {s:?} repeated")
            })?;
            inst.push_blocked(s);
        }
        let want = exhaustive_mhs(n, inst.to_hit());
        ensure(found == want, || {
            format!("instance {i}: got {found:?}, want {want:?}")
        })?;
        total += found.len();
    }
    Ok(format!("100 instances, {total} minimal hitting sets"))
}

fn xdual(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_xdual"))
        .args(args)
        .env_remove("XDUAL_BUDGET")
        .output()
        .unwrap()
}

fn scale_smoke() -> Check {
    let m = load("ensemble10.json");
    let features = m.space().len();
    ensure(features == 10, || format!("{features} features"))?;
    ensure(
        m.space().features().iter().all(|f| f.domain.len() == 2),
        || "non-binary domain".into(),
    )?;
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("stats.csv");
    let model = data("ensemble10.json");
    let rows = data("ensemble10.csv");
    let (res, took) = timed(|| {
        xdual(&[
            "stats",
            "-m",
            model.to_str().unwrap(),
            "-i",
            rows.to_str().unwrap(),
            "-o",
            out.to_str().unwrap(),
        ])
    });
    ensure(res.status.success(), || {
        String::from_utf8_lossy(&res.stderr).into_owned()
    })?;
    ensure(took < Duration::from_secs(300), || format!("took {took:?}"))?;
    let csv = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    ensure(lines.len() == 102, || format!("{} CSV lines", lines.len()))?;
    let summary = String::from_utf8(res.stdout).unwrap();
    let tendency = summary
        .lines()
        .any(|l| l == "avg CXp size <= avg AXp size: yes");
    let flagged = summary.lines().any(|l| l.starts_with("FLAG:"));
    ensure(tendency || flagged, || {
        format!("summary lacks a verdict:\n{summary}")
    })?;
    let verdict = if tendency {
        "CXps not larger on average"
    } else {
        "counterexample flagged"
    };
    Ok(format!(
        "100 instances in {took:.2?}, {verdict}; {}",
        lines[101]
    ))
}

fn round_trip_and_determinism() -> Check {
    for name in ["poole.json", "ensemble10.json"] {
        let text = fs::read_to_string(data(name)).unwrap();
        let again = serialize_model(&parse_model(&text).map_err(|e| e.to_string())?);
        ensure(again == text, || format!("{name} does not round-trip"))?;
    }
    let poole = data("poole.json");
    let poole = poole.to_str().unwrap();
    let all16 = data("all16.csv");
    let all16 = all16.to_str().unwrap();
    let ens = data("ensemble10.json");
    let ens = ens.to_str().unwrap();
    let ens_rows = data("ensemble10.csv");
    let ens_rows = ens_rows.to_str().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let file = |run: usize, name: &str| {
        dir.path()
            .join(format!("{run}-{name}"))
            .to_str()
            .unwrap()
            .to_string()
    };
    let mut runs: Vec<Vec<Vec<u8>>> = Vec::new();
    for run in 0..2 {
        let (stats_out, occ_out) = (file(run, "stats.csv"), file(run, "occ.csv"));
        let commands: Vec<Vec<&str>> = vec![
            vec!["predict", "-m", poole, "-i", all16],
            vec!["axp", "-m", poole, "-i", all16],
            vec!["axp", "-m", poole, "-i", all16, "--order", "W,L,T,A"],
            vec!["cxp", "-m", poole, "-i", all16],
            vec!["cxp", "-m", poole, "-i", all16, "--target", "reads"],
            vec![
                "enum",
                "-m",
                poole,
                "-i",
                all16,
                "--mode",
                "all",
                "--pixel-occurrence",
                &occ_out,
            ],
            vec![
                "enum",
                "-m",
                poole,
                "-i",
                all16,
                "--mode",
                "cxp",
                "--sort-size",
            ],
            vec!["verify", "-m", poole, "-i", all16],
            vec!["stats", "-m", ens, "-i", ens_rows, "-o", &stats_out],
            vec!["enum", "-m", ens, "-i", ens_rows, "--limit", "5"],
        ];
        let mut outputs = Vec::new();
        for args in &commands {
            let o = xdual(args);
            ensure(o.status.success(), || {
                format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr))
            })?;
            outputs.push(o.stdout);
        }
        outputs.push(fs::read(&stats_out).unwrap());
        outputs.push(fs::read(&occ_out).unwrap());
        runs.push(outputs);
    }
    ensure(runs[0] == runs[1], || {
        let i = (0..runs[0].len())
            .find(|&i| runs[0][i] != runs[1][i])
            .unwrap();
        format!("output {i} differs between runs")
    })?;
    Ok(format!(
        "2 models round-trip; {} outputs identical across runs",
        runs[0].len()
    ))
}

fn main() {
    let corpus = corpus();
    let criteria: Vec<Criterion> = vec![
        ("running-example goldens", Box::new(goldens)),
        (
            "brute-force equivalence",
            Box::new(|| brute_equivalence(&corpus)),
        ),
        ("duality", Box::new(|| duality(&corpus))),
        ("oracle-call budgets", Box::new(|| call_budgets(&corpus))),
        ("targeted CXps", Box::new(|| targeted(&corpus))),
        ("hitting-set exactness", Box::new(mhs_exactness)),
        ("ensemble scale smoke test", Box::new(scale_smoke)),
        (
            "round trip and determinism",
            Box::new(round_trip_and_determinism),
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match result {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
