//! Acceptance suite. Runs each criterion in turn, prints one PASS/FAIL line
//! per criterion and exits nonzero if any failed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use sumsetlab::{run, Engine};
use sumsetlab_core::verify::draw_pair;
use sumsetlab_core::{
    build_factor_system, build_group, generated_subgroup, minimal_torsion, normal_subgroups_two_generated,
    product_set, replay_solvable_proof, restricted_product_set, smallest_prime_factor, Caps, FiniteGroup, Pair,
    RepPolicy, SamplingPlan, SizeDistribution, SubsetMask, Theorem, Torsion, Verifier, CORPUS,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn group(spec: &str) -> FiniteGroup {
    build_group(&spec.parse().expect("spec parses")).expect("group builds")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn corpus_pairs() -> Vec<(FiniteGroup, sumsetlab_core::Subgroup)> {
    CORPUS
        .iter()
        .flat_map(|spec| {
            let g = group(spec);
            normal_subgroups_two_generated(&g).into_iter().map(move |k| (g.clone(), k))
        })
        .collect()
}

fn ac01_cauchy_davenport_cyclic() -> Outcome {
    let mut notes = Vec::new();
    for n in [3usize, 5, 7, 9, 11] {
        let g = group(&format!("cyclic:{}", n));
        let report = Verifier::default()
            .exhaustive(&g, Theorem::CauchyDavenport, None)
            .map_err(|e| e.to_string())?;
        let expected = ((1u64 << n) - 1).pow(2);
        ensure(report.pairs_checked == expected, || {
            format!("Z/{n}: {} pairs, expected {expected}", report.pairs_checked)
        })?;
        ensure(report.holds(), || format!("Z/{n}: {} violations", report.violations.len()))?;
        if n == 11 {
            ensure(report.wall_time < Duration::from_secs(60), || {
                format!("Z/11 took {:?}", report.wall_time)
            })?;
        }
        notes.push(format!("Z/{n} {:.2}s", report.wall_time.as_secs_f64()));
    }
    Ok(notes.join(", "))
}

fn ac02_nonabelian_odd_order() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    for spec in ["heisenberg:3", "frobenius:7:3:2"] {
        let g = group(spec);
        let v = Verifier::default();
        let capped = v
            .exhaustive(&g, Theorem::CauchyDavenport, Some(Caps::sizes(3, 3)))
            .map_err(|e| e.to_string())?;
        ensure(capped.holds(), || format!("{spec}: capped search found violations"))?;
        let sampled = v
            .sampled(&g, Theorem::CauchyDavenport, &SamplingPlan::uniform(42, 100_000))
            .map_err(|e| e.to_string())?;
        ensure(sampled.pairs_checked == 100_000, || format!("{spec}: short sample"))?;
        ensure(sampled.holds(), || format!("{spec}: sampled search found violations"))?;
        notes.push(format!("{spec} capped {} + sampled {}", capped.pairs_checked, sampled.pairs_checked));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!("{} in {:.2}s", notes.join(", "), elapsed.as_secs_f64()))
}

fn ac03_even_order() -> Outcome {
    for spec in ["quaternion", "dihedral:5"] {
        let g = group(spec);
        ensure(minimal_torsion(&g) == Torsion::Finite(2), || format!("{spec}: p(G) != 2"))?;
        let report = Verifier::default()
            .exhaustive(&g, Theorem::CauchyDavenport, None)
            .map_err(|e| e.to_string())?;
        ensure(report.holds(), || format!("{spec}: {} violations", report.violations.len()))?;
    }
    Ok("quaternion, dihedral:5".into())
}

fn ac04_torsion_matches_smallest_prime() -> Outcome {
    for spec in CORPUS {
        let g = group(spec);
        let (t, p) = (minimal_torsion(&g), smallest_prime_factor(g.order()));
        ensure(t == p, || format!("{spec}: p(G) = {t}, smallest prime = {p}"))?;
    }
    let trivial = group(&format!("cyclic:{}", 1));
    ensure(minimal_torsion(&trivial) == Torsion::Infinite, || "trivial group is not infinity".into())?;
    Ok(format!("{} groups", CORPUS.len()))
}

fn ac05_quaternion_table() -> Outcome {
    // 1,-1,i,-i,j,-j,k,-k
    let g = group("quaternion");
    let k = generated_subgroup(&g, &SubsetMask::from_elements(8, [6]));
    ensure(k.elements() == [0, 1, 6, 7], || format!("K = {:?}", k.elements()))?;
    let fs = build_factor_system(&g, &k, &RepPolicy::Explicit(vec![0, 4])).map_err(|e| e.to_string())?;
    let expected = [(0, 0), (1, 0), (7, 1), (6, 1), (0, 1), (1, 1), (6, 0), (7, 0)];
    for (x, &(kk, h)) in expected.iter().enumerate() {
        let got = fs.psi(x as u32);
        ensure(got == Pair { kernel: kk, coset: h }, || format!("psi({x}) = {got:?}"))?;
    }
    let minus_k_kj = Pair { kernel: 7, coset: 1 };
    let sq = fs.star(minus_k_kj, minus_k_kj);
    ensure(sq == Pair { kernel: 1, coset: 0 }, || format!("(-k,Kj)*(-k,Kj) = {sq:?}"))?;
    ensure(fs.eta(1, 1) == 1, || "eta(Kj,Kj) != -1".into())?;

    // The lowest-index policy picks i for the second coset under this encoding.
    let low = build_factor_system(&g, &k, &RepPolicy::LowestIndex).map_err(|e| e.to_string())?;
    ensure(low.reps() == [0, 2], || format!("lowest-index reps {:?}", low.reps()))?;
    ensure(low.verify_isomorphism(&g).holds(), || "lowest-index psi is not an isomorphism".into())?;
    Ok("reps {1, j}; lowest-index reps {1, i} also isomorphic".into())
}

fn ac06_carry_cocycle() -> Outcome {
    for p in [3usize, 5] {
        let g = group(&format!("cyclic:{}", p * p));
        let k = generated_subgroup(&g, &SubsetMask::from_elements(p * p, [p as u32]));
        let fs = build_factor_system(&g, &k, &RepPolicy::LowestIndex).map_err(|e| e.to_string())?;
        for b in 0..p {
            for d in 0..p {
                let hb = fs.quotient().project(b as u32);
                let hd = fs.quotient().project(d as u32);
                let want = if b + d < p { 0 } else { p as u32 };
                let got = fs.eta(hb, hd);
                ensure(got == want, || format!("p={p}: eta({b},{d}) = {got}, expected {want}"))?;
            }
        }
        for x in 0..p * p {
            for y in 0..p * p {
                let lhs = fs.psi(((x + y) % (p * p)) as u32);
                let rhs = fs.star(fs.psi(x as u32), fs.psi(y as u32));
                ensure(lhs == rhs, || format!("p={p}: psi({x}+{y}) mismatch"))?;
            }
        }
    }
    Ok("p = 3, 5".into())
}

fn ac07_isomorphism_property() -> Outcome {
    let pairs = corpus_pairs();
    let mut checked = 0;
    for (g, k) in &pairs {
        for seed in 0..5u64 {
            let fs = build_factor_system(g, k, &RepPolicy::SeededRandom(seed)).map_err(|e| e.to_string())?;
            let check = fs.verify_isomorphism(g);
            ensure(check.holds(), || {
                format!("{} / {:?} seed {seed}: {:?}", g.label(), k.elements(), check.counterexample)
            })?;
            checked += 1;
        }
    }
    let g = group("quaternion");
    let k = generated_subgroup(&g, &SubsetMask::from_elements(8, [6]));
    let mut fs = build_factor_system(&g, &k, &RepPolicy::Explicit(vec![0, 4])).map_err(|e| e.to_string())?;
    let old = fs.extension().eta(1, 1);
    fs.extension_mut().set_eta(1, 1, (old + 1) % 4);
    let check = fs.verify_isomorphism(&g);
    ensure(!check.holds(), || "mutated cocycle still passes".into())?;
    let (a, b) = check.counterexample.ok_or("no counterexample for mutated cocycle")?;
    Ok(format!("{checked} systems; mutation caught at ({a}, {b})"))
}

fn ac08_round_trip() -> Outcome {
    let pairs = corpus_pairs();
    for (g, k) in &pairs {
        let fs = build_factor_system(g, k, &RepPolicy::LowestIndex).map_err(|e| e.to_string())?;
        let ext = fs.extension_group().map_err(|e| e.to_string())?;
        ensure(ext.order() == g.order(), || format!("{}: order mismatch", g.label()))?;
        for x in g.elements() {
            ensure(fs.psi_inverse(fs.psi(x)) == x, || format!("{}: psi not invertible at {x}", g.label()))?;
            for y in g.elements() {
                let lhs = fs.psi_index(g.mul(x, y));
                let rhs = ext.mul(fs.psi_index(x), fs.psi_index(y));
                ensure(lhs == rhs, || format!("{} / {:?}: table differs at ({x}, {y})", g.label(), k.elements()))?;
            }
        }
    }
    Ok(format!("{} (G, K) pairs", pairs.len()))
}

fn ac09_replay() -> Outcome {
    let shapes = [(1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 2)];
    let mut inductive = 0;
    for spec in ["heisenberg:3", "frobenius:7:3:2"] {
        let g = group(spec);
        let p = minimal_torsion(&g).finite().expect("finite") as usize;
        for i in 0..1000u64 {
            let (sa, sb) = shapes[i as usize % shapes.len()];
            assert!(sa + sb - 1 <= p);
            let plan = SamplingPlan {
                seed: 2024,
                count: 1000,
                distribution: SizeDistribution::Fixed { size_a: sa, size_b: sb },
            };
            let (a, b) = draw_pair(g.order(), &plan, i);
            let trace = replay_solvable_proof(&g, &a, &b).map_err(|e| format!("{spec} pair {i}: {e}"))?;
            ensure(trace.all_checks_hold(), || format!("{spec} pair {i}: {:?}", trace.failures()))?;
            let direct = product_set(&g, &a, &b).len() as i64;
            ensure(trace.traced_bound() <= direct, || {
                format!("{spec} pair {i}: traced {} > |AB| {direct}", trace.traced_bound())
            })?;
            ensure(direct >= (sa + sb - 1) as i64, || format!("{spec} pair {i}: bound fails"))?;
            if matches!(trace.step, sumsetlab_core::replay::Step::Inductive(_)) {
                inductive += 1;
            }
        }
    }
    Ok(format!("2000 traces, {inductive} inductive"))
}

fn ac10_erdos_heilbronn() -> Outcome {
    for p in [3usize, 5, 7, 11] {
        let g = group(&format!("cyclic:{}", p));
        let report = Verifier::default()
            .exhaustive(&g, Theorem::ErdosHeilbronn, None)
            .map_err(|e| e.to_string())?;
        ensure(report.pairs_checked == ((1u64 << p) - 1).pow(2), || format!("Z/{p}: {} pairs", report.pairs_checked))?;
        ensure(report.holds(), || format!("Z/{p}: {} violations", report.violations.len()))?;
        if p == 5 {
            ensure(report.extremal_count > 0, || "Z/5: bound never attained".into())?;
            let a = SubsetMask::from_elements(5, [0, 1, 2]);
            let size = restricted_product_set(&g, &a, &a).len();
            ensure(size == 3, || format!("Z/5: |{{0,1,2}} +. {{0,1,2}}| = {size}"))?;
        }
    }
    Ok("Z/3, Z/5, Z/7, Z/11".into())
}

fn naive_product(g: &FiniteGroup, a: &[u32], b: &[u32]) -> Vec<u32> {
    let n = g.order();
    let table = g.table();
    let mut hit = vec![false; n];
    for &x in a {
        for &y in b {
            hit[table[x as usize * n + y as usize] as usize] = true;
        }
    }
    (0..n as u32).filter(|&z| hit[z as usize]).collect()
}

fn ac11_oracle_equivalence() -> Outcome {
    let groups: Vec<FiniteGroup> = CORPUS.iter().map(|s| group(s)).collect();
    let mut discrepancies = 0;
    for i in 0..1000u64 {
        let g = &groups[i as usize % groups.len()];
        let (a, b) = draw_pair(g.order(), &SamplingPlan::uniform(11, 1000), i);
        if product_set(g, &a, &b).to_vec() != naive_product(g, &a.to_vec(), &b.to_vec()) {
            discrepancies += 1;
        }
    }
    ensure(discrepancies == 0, || format!("{discrepancies} discrepancies"))?;
    Ok("1000 triples, 0 discrepancies".into())
}

fn cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let full: Vec<&str> = std::iter::once("sumsetlab").chain(args.iter().copied()).collect();
    let code = run(full, &Engine, &mut out, &mut err);
    if code != 0 {
        return Err(format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&err)));
    }
    Ok(out)
}

fn ac12_determinism() -> Outcome {
    let commands: [&[&str]; 5] = [
        &["verify", "--group", "frobenius:7:3:2", "--mode", "sampled", "--seed", "7", "--count", "20000"],
        &["verify", "--group", "heisenberg:3", "--theorem", "eh", "--mode", "sampled", "--seed", "3", "--count", "5000", "--sizes", "4,5"],
        &["verify", "--group", "dihedral:3", "--mode", "capped", "--max-a", "3", "--max-b", "3"],
        &["decompose", "--group", "frobenius:13:3:3", "--rep-seed", "5"],
        &["extremal", "--group", "heisenberg:3", "--sizes", "2,2", "--limit", "50"],
    ];
    for cmd in commands {
        let mut outputs = Vec::new();
        for workers in ["1", "3", "8", "1"] {
            let mut args = vec!["--json", "--workers", workers];
            args.extend_from_slice(cmd);
            outputs.push(cli(&args)?);
        }
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), || format!("{cmd:?}: outputs differ"))?;
        ensure(!outputs[0].is_empty(), || format!("{cmd:?}: empty output"))?;
    }
    Ok(format!("{} commands x 4 runs", commands.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("AC01 Cauchy-Davenport exhaustive on Z/3..Z/11", ac01_cauchy_davenport_cyclic),
        ("AC02 nonabelian odd order, capped and sampled", ac02_nonabelian_odd_order),
        ("AC03 even order exhaustive", ac03_even_order),
        ("AC04 minimal torsion equals smallest prime", ac04_torsion_matches_smallest_prime),
        ("AC05 quaternion factor-system fixture", ac05_quaternion_table),
        ("AC06 carry cocycle on Z/p^2", ac06_carry_cocycle),
        ("AC07 isomorphism over corpus with seeded reps", ac07_isomorphism_property),
        ("AC08 round trip through the extension", ac08_round_trip),
        ("AC09 proof replay on seeded pairs", ac09_replay),
        ("AC10 Erdos-Heilbronn exhaustive on Z/p", ac10_erdos_heilbronn),
        ("AC11 product set matches naive oracle", ac11_oracle_equivalence),
        ("AC12 byte-identical seeded JSON", ac12_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(note) => println!("{name}: PASS ({note}; {secs:.2}s)"),
            Err(why) => {
                failed += 1;
                println!("{name}: FAIL ({why}; {secs:.2}s)");
            }
        }
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
