//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report prints under plain
//! `cargo test`. Exits non-zero when any criterion fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use upbell::bellgen::{build_inequality, strategies, BellInequality, Scenario};
use upbell::catalog::{self, CatalogEntry};
use upbell::extend::{lift_method1, method2, Companion, Position};
use upbell::gyni::{gyni_inequality, gyni_vectors, tightness_certificate, CongruenceEngine, StrategyString};
use upbell::nspoly::{
    is_tight, is_trivial, modular_affine_rank, ns_maximum, polytope_dimension, random_prime, CgLayout,
    RankMethod, Verdict,
};
use upbell::pvset::{ClassificationKind, ProductVectorSet};
use upbell::quantum::{
    bell_operator_spectrum, tensor_power_violation, upb_state, witness_box, witness_expectation, BasisRealization,
};
use upbell::rational::{int, rat, to_f64, Rational};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn entry(name: &str) -> CatalogEntry {
    catalog::get(name).expect("catalog entry")
}

fn entries(kind: impl Fn(ClassificationKind) -> bool) -> Vec<CatalogEntry> {
    catalog::list().into_iter().map(entry).filter(|e| kind(e.kind)).collect()
}

fn set(words: &[&str]) -> ProductVectorSet {
    ProductVectorSet::from_symbols(words).expect("valid set")
}

const TABLE_II: [&str; 10] = ["u1", "u2", "u3", "u4", "u5", "u6", "u7", "u8", "u9", "u10"];

fn construction_fidelity() -> Outcome {
    let shifts = build_inequality(&entry("shifts").set, None).map_err(|e| e.to_string())?;
    let expected = "p(000|000) + p(110|011) + p(011|101) + p(101|110) ≤ 1";
    ensure(shifts.to_string() == expected, || format!("Shifts built {shifts}"))?;
    ensure(shifts.to_string() == entry("shifts").inequality.to_string(), || "Shifts differs from catalog".into())?;
    let nwe = build_inequality(&entry("nwe3").set, None).map_err(|e| e.to_string())?;
    let expected = "p(000|000) + p(001|100) + p(010|001) + p(011|001) + p(100|010) + p(101|100) + p(110|010) + p(111|000) ≤ 1";
    ensure(nwe.to_string() == expected, || format!("NWE built {nwe}"))?;
    ensure(nwe.to_string() == entry("nwe3").inequality.to_string(), || "NWE differs from catalog".into())?;
    Ok("Shifts 4 terms, NWE 8 terms, bound 1".into())
}

fn random_weights(rng: &mut ChaCha8Rng, len: usize) -> Vec<Rational> {
    (0..len).map(|_| rat(rng.gen_range(1..=97), 97)).collect()
}

fn bound_is_max_weight() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let upbs = entries(|k| k == ClassificationKind::Upb);
    let mut worst = 0.0f64;
    for e in &upbs {
        for _ in 0..20 {
            let w = random_weights(&mut rng, e.set.len());
            let max = w.iter().max().cloned().expect("nonempty");
            let b = build_inequality(&e.set, Some(&w)).map_err(|x| x.to_string())?;
            ensure(b.classical_bound == max, || format!("{}: bound {} vs max weight {max}", e.name, b.classical_bound))?;
            let real = BasisRealization::random(e.set.bases_per_party(), &mut rng);
            let top = bell_operator_spectrum(&b, &real).map_err(|x| x.to_string())?[0];
            worst = worst.max((top - to_f64(&max)).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("eigenvalue deviation {worst:.3e}"))?;
    Ok(format!("{} UPBs × 20 weightings, max eigenvalue deviation {worst:.1e}", upbs.len()))
}

fn dichotomy() -> Outcome {
    let completable = entries(|k| matches!(k, ClassificationKind::FullBasis | ClassificationKind::CompletableToFullBasis));
    for e in &completable {
        ensure(e.set.classify().map_err(|x| x.to_string())?.kind == e.kind, || format!("{} misclassified", e.name))?;
        ensure(is_trivial(&e.inequality).map_err(|x| x.to_string())?, || format!("{} not trivial", e.name))?;
    }
    let upbs = entries(|k| k == ClassificationKind::Upb);
    for e in &upbs {
        ensure(!is_trivial(&e.inequality).map_err(|x| x.to_string())?, || format!("{} trivial", e.name))?;
    }
    Ok(format!("{} completable trivial, {} UPBs violated", completable.len(), upbs.len()))
}

fn ns_values() -> Outcome {
    for name in std::iter::once("gyni3").chain(TABLE_II) {
        let v = ns_maximum(&entry(name).inequality).map_err(|e| e.to_string())?.value;
        ensure(v == rat(4, 3), || format!("{name}: {v}"))?;
    }
    let nwe = ns_maximum(&entry("nwe3").inequality).map_err(|e| e.to_string())?.value;
    ensure(nwe == int(1), || format!("nwe3: {nwe}"))?;
    let g5 = ns_maximum(&entry("gyni5").inequality).map_err(|e| e.to_string())?.value;
    ensure(g5 <= int(2), || format!("gyni5: {g5}"))?;
    Ok(format!("gyni3 and u1..u10 at 4/3, nwe3 at 1, gyni5 at {g5}"))
}

fn cloud_dimension(sc: &Scenario) -> usize {
    let layout = CgLayout::new(sc);
    let points: Vec<Vec<i64>> = strategies(sc)
        .map(|s| layout.strategy(&s).into_iter().map(i64::from).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    modular_affine_rank(&points, random_prime(&mut rng), usize::MAX)
}

fn tightness() -> Outcome {
    let mut cases: Vec<(&str, Verdict)> = vec![("gyni3", Verdict::Tight), ("gyni4", Verdict::Tight), ("gyni5", Verdict::Tight)];
    cases.extend(TABLE_II[..9].iter().map(|&n| (n, Verdict::Tight)));
    cases.push(("u10", Verdict::NotTight));
    cases.extend(["t3_1", "t3_2", "t3_3"].map(|n| (n, Verdict::Tight)));
    cases.push(("nwe3", Verdict::Trivial));
    let mut scenarios = BTreeSet::new();
    for (name, want) in &cases {
        let b = entry(name).inequality;
        let c = is_tight(&b).map_err(|e| e.to_string())?;
        ensure(c.verdict == *want, || format!("{name}: {} (affine {})", c.verdict, c.affine_dimension))?;
        if c.verdict == Verdict::NotTight {
            ensure(c.method == RankMethod::Exact, || format!("{name}: rank not exact"))?;
        }
        scenarios.insert(b.scenario.settings().to_vec());
    }
    for m in &scenarios {
        let sc = Scenario::new(m.clone()).map_err(|e| e.to_string())?;
        let (d, cloud) = (polytope_dimension(&sc), cloud_dimension(&sc));
        ensure(d == cloud, || format!("scenario {m:?}: formula {d}, cloud {cloud}"))?;
    }
    Ok(format!("{} verdicts, {} scenario dimensions cross-checked", cases.len(), scenarios.len()))
}

fn gyni7_stretch() -> Outcome {
    let c = is_tight(&entry("gyni7").inequality).map_err(|e| e.to_string())?;
    ensure(c.verdict == Verdict::Tight, || format!("prefilter verdict {}", c.verdict))?;
    let t = tightness_certificate(7).map_err(|e| e.to_string())?;
    ensure(t.tight, || "certificate incomplete".into())?;
    Ok(format!("modular prefilter Tight, {} exact certificates", t.certified))
}

fn certificates() -> Outcome {
    let mut total = 0;
    for n in [3, 5] {
        let engine = CongruenceEngine::new(n).map_err(|e| e.to_string())?;
        for s in StrategyString::all(n) {
            ensure(s.saturates() == s.saturates_by_enumeration(), || format!("saturation lemma fails on {s}"))?;
            if !s.saturates() {
                let c = engine.certify(&s).map_err(|e| e.to_string())?;
                ensure(c.verify(), || format!("certificate for {s} does not verify"))?;
                total += 1;
            }
        }
    }
    Ok(format!("{total} exact certificates, lemma checked on 4^3 + 4^5 strings"))
}

fn witness_pipeline() -> Outcome {
    let u = entry("shifts").set;
    let real = BasisRealization::default_for(u.bases_per_party());
    let eps = 0.125;
    let (_, report) = witness_box(&u, eps, &real).map_err(|e| e.to_string())?;
    ensure(report.nonnegative && report.normalized && report.no_signalling, || "witness box invalid".into())?;
    ensure((report.value - 7.0 / 6.0).abs() < 1e-9, || format!("value {}", report.value))?;
    let state = upb_state(&u, &real).map_err(|e| e.to_string())?;
    let min_pt = state.ppt.iter().map(|p| p.min_eigenvalue).fold(f64::INFINITY, f64::min);
    ensure(state.ppt.len() == 3 && min_pt >= -1e-9, || format!("partial transpose eigenvalue {min_pt:.3e}"))?;
    let tr = witness_expectation(&u, eps, &real).map_err(|e| e.to_string())?;
    ensure(tr < 0.0, || format!("Tr(W rho) = {tr}"))?;
    let sq = tensor_power_violation(&u, 2, eps, &real).map_err(|e| e.to_string())?;
    ensure((sq - 49.0 / 36.0).abs() < 1e-9, || format!("tensor square {sq}"))?;
    Ok(format!("7/6, PPT (min {min_pt:.1e}), Tr(W rho) = {tr:.4}, 49/36"))
}

fn gyni_structure() -> Outcome {
    for n in 3..=6 {
        let v = gyni_vectors(n).map_err(|e| e.to_string())?;
        ensure(v.len() == 1 << (n - 1), || format!("n = {n}: {} vectors", v.len()))?;
        let kind = v.classify().map_err(|e| e.to_string())?.kind;
        ensure(kind == ClassificationKind::Upb, || format!("n = {n}: {kind}"))?;
        let built = build_inequality(&v, None).map_err(|e| e.to_string())?;
        let direct: BellInequality = gyni_inequality(n).map_err(|e| e.to_string())?;
        ensure(built.same_terms(&direct), || format!("n = {n}: term sets differ"))?;
    }
    let listed = set(&["0000", "1ēe0", "e001", "ēēe1", "01ēe", "1e1e", "e1ēē", "ēe1ē"]);
    ensure(gyni_vectors(4).map_err(|e| e.to_string())?.same_vectors(&listed), || "U_4 differs".into())?;
    Ok("n = 3..6 UPBs of size 2^(n-1), terms agree, U_4 matches".into())
}

fn extension_methods() -> Outcome {
    let t3 = method2(&entry("u1").set, 1, Position::Front).map_err(|e| e.to_string())?;
    let b = build_inequality(&t3, None).map_err(|e| e.to_string())?;
    ensure(b.same_terms(&entry("t3_1").inequality), || "row 1 term set differs".into())?;
    let shifts = entry("shifts").set;
    let u4 = lift_method1(&shifts, &Companion::FullBasis).map_err(|e| e.to_string())?;
    ensure(u4.same_vectors(&entry("u4").set), || "lift with full basis differs from U_4".into())?;
    let v = is_tight(&build_inequality(&u4, None).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?.verdict;
    ensure(v == Verdict::Tight, || format!("lifted U_4 is {v}"))?;
    let u10 = lift_method1(&shifts, &Companion::Set(shifts.clone())).map_err(|e| e.to_string())?;
    let front = u10.permute_parties(&[3, 0, 1, 2]).map_err(|e| e.to_string())?;
    ensure(front.same_vectors(&entry("u10").set), || "lift with Shifts differs from U_10".into())?;
    let v = is_tight(&build_inequality(&u10, None).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?.verdict;
    ensure(v == Verdict::NotTight, || format!("lifted U_10 is {v}"))?;
    Ok("row 1 reproduced, U_4 Tight, U_10 (lifting qubit listed first) NotTight".into())
}

struct Criterion {
    id: &'static str,
    title: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: "1", title: "construction fidelity", budget: Duration::from_secs(1), run: construction_fidelity },
        Criterion { id: "2", title: "classical bound is the largest weight", budget: Duration::from_secs(30), run: bound_is_max_weight },
        Criterion { id: "3", title: "completable trivial, UPB non-trivial", budget: Duration::from_secs(120), run: dichotomy },
        Criterion { id: "4", title: "no-signalling maxima", budget: Duration::from_secs(600), run: ns_values },
        Criterion { id: "5", title: "tightness verdicts", budget: Duration::from_secs(900), run: tightness },
        Criterion { id: "5+", title: "GYNI_7 tight (stretch)", budget: Duration::from_secs(900), run: gyni7_stretch },
        Criterion { id: "6", title: "congruence certificates n = 3, 5", budget: Duration::from_secs(300), run: certificates },
        Criterion { id: "7", title: "witness pipeline on Shifts", budget: Duration::from_secs(60), run: witness_pipeline },
        Criterion { id: "8", title: "GYNI structure", budget: Duration::from_secs(300), run: gyni_structure },
        Criterion { id: "9", title: "extension methods", budget: Duration::from_secs(300), run: extension_methods },
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for c in &criteria {
        if !only.is_empty() && !only.iter().any(|o| o == c.id) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let result = match result {
            Ok(_) if took > c.budget => Err(format!("took {took:.1?}, budget {:?}", c.budget)),
            r => r,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d.as_str()),
            Err(d) => ("FAIL", d.as_str()),
        };
        println!("criterion {:<3} {tag}  {:<40} {detail} [{took:.2?}]", c.id, c.title);
        failed += usize::from(result.is_err());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
