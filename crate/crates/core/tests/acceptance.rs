//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Criteria run one after another so the timings are not
//! disturbed by each other.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use walkforge_core::colouring::{colour_table, evaluate, transfer_campaign, PlantedParams, Which};
use walkforge_core::dfunction::{claim_e4_sweep, d_by_enumeration, LabelledSeq, SweepConfig};
use walkforge_core::partition::{
    check_instance, normalize_theta, search_counterexample, HFun, Instance, InstanceFile, PartitionParams, PrInstance,
    QrFamily, QrInstance, SearchBounds, Strategy, Theta, Variant, Verdict,
};
use walkforge_core::suites::{coherence, walk_lemmas, CoherenceConfig, WalkLemmaConfig};
use walkforge_core::{ColourTable, ColouringSystem, FiniteSuccessor, SCHEMA};

const SYSTEM_N64: &str = include_str!("../../../data/system-n64.json");

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let pass = outcome.pass && in_time;
    let timing = match limit {
        Some(l) => format!("{:.1}s, limit {}s", elapsed.as_secs_f64(), l.as_secs()),
        None => format!("{:.1}s", elapsed.as_secs_f64()),
    };
    println!(
        "criterion {id} [{name}]: {} ({timing}) {}",
        if pass { "PASS" } else { "FAIL" },
        outcome.detail
    );
    pass
}

fn criterion_walk_lemmas() -> Outcome {
    let r = walk_lemmas(&WalkLemmaConfig::default(), &[]);
    let expected = 62 * 63 / 2 + 200 * (30 * 31 / 2);
    Outcome {
        pass: r.is_clean() && r.checked == expected,
        detail: format!("walks={} violations={}", r.checked, r.violation_count),
    }
}

fn criterion_coherence() -> Outcome {
    let r = coherence(&CoherenceConfig::default());
    Outcome {
        pass: r.is_clean() && r.checked == 1000 * 50,
        detail: format!("checks={} violations={}", r.checked, r.violation_count),
    }
}

fn criterion_claim_e4() -> Outcome {
    let r = claim_e4_sweep(&SweepConfig::exhaustive(3, 3, 6));
    let witness = r
        .inconsistency_records
        .first()
        .map(|w| {
            format!(
                " first: F1={:?} F0={:?} splits {:?} -> {} vs {:?} -> {}",
                w.f1, w.f0, w.first.splits, w.first.index, w.second.splits, w.second.index
            )
        })
        .unwrap_or_default();
    Outcome {
        pass: r.is_consistent(),
        detail: format!(
            "sequences={} decomposable={} inconsistencies={} structural_mismatches={} d_direct_agreement={:.4} \
             (disagreements on uniquely decomposable: {}){witness}",
            r.sequences,
            r.decomposable,
            r.inconsistencies,
            r.structural_mismatches,
            r.direct_agreement_rate,
            r.direct_disagreements_decomposable
        ),
    }
}

fn criterion_colouring() -> Outcome {
    const N: usize = 64;
    let sys = ColouringSystem::from_json(SYSTEM_N64).expect("system file parses");
    sys.validate(N).expect("system fits the model");
    let cs = FiniteSuccessor::new(N);
    let tables = || {
        let c1 = colour_table(&sys, &cs, N, Which::C1).expect("c1 total");
        let c2 = colour_table(&sys, &cs, N, Which::C2).expect("c2 total");
        (c1.to_json(), c2.to_json())
    };
    let first = tables();
    let second = tables();
    let identical = first == second;

    // Every d index lies inside its trace, c₁ is h′ of an F₁ value on the
    // trace, and short traces agree with the enumeration definition.
    let mut out_of_range = 0;
    let mut off_trace = 0;
    let mut oracle_checked = 0;
    let mut oracle_mismatch = 0;
    for beta in 1..N {
        for alpha in 1..beta {
            let e = evaluate(&sys, &cs, N, alpha, beta).expect("pair evaluates");
            let d = e.d.as_ref().expect("α > 0").value;
            if d >= e.labels.len() {
                out_of_range += 1;
                continue;
            }
            let on_trace: BTreeSet<u64> = e.f1.iter().map(|&x| sys.hprime.apply("hprime", x).unwrap()).collect();
            if sys.hprime.apply("hprime", e.f1[d]).unwrap() != e.c1 || !on_trace.contains(&e.c1) {
                off_trace += 1;
            }
            if e.labels.len() <= 12 {
                oracle_checked += 1;
                let seq = LabelledSeq::new(e.f0.clone(), e.f1.clone()).unwrap();
                if let Ok(v) = d_by_enumeration(&seq) {
                    if v != d {
                        oracle_mismatch += 1;
                    }
                }
            }
        }
    }
    Outcome {
        pass: identical && out_of_range == 0 && off_trace == 0 && oracle_mismatch == 0,
        detail: format!(
            "pairs={} byte_identical={identical} index_out_of_range={out_of_range} c1_off_trace={off_trace} \
             enumeration_checked={oracle_checked} enumeration_mismatch={oracle_mismatch}",
            N * (N - 1) / 2
        ),
    }
}

fn criterion_transfer() -> Outcome {
    let r = transfer_campaign(&PlantedParams::default(), 7, 1000).expect("campaign runs");
    Outcome {
        pass: r.configurations == 1000 && r.failures == 0 && r.identity_failures == 0,
        detail: format!(
            "configurations={} cells={} cell_failures={} identity_failures={}",
            r.configurations, r.cells, r.failures, r.identity_failures
        ),
    }
}

/// Independent re-scan: builds the required colour of every cell and
/// compares it with the colouring, pair by pair.
fn naive_verdict(c: &ColourTable, params: &PartitionParams, inst: &Instance) -> Verdict {
    let pr = |x: u64, y: u64| (x + y) * (x + y + 1) / 2 + y;
    let iota = params.iota.unwrap_or(0);
    let colour = |x: usize, y: usize| c.rows()[x.min(y)][x.max(y) - x.min(y) - 1];
    let works = |a0: usize, a1: usize| -> bool {
        match inst {
            Instance::Pr(p) => {
                let mut ok = true;
                for i0 in 0..p.i0 {
                    for i1 in 0..p.i1 {
                        let idx = [i0, i1];
                        let want = match &p.h {
                            HFun::Full(m) => Some(m[i0][i1]),
                            HFun::Constant(g) => Some(*g),
                            HFun::Side(v) => match p.ultra {
                                Some(j) if idx[1 - iota] != j => None,
                                _ => Some(v[idx[iota]]),
                            },
                        };
                        if let Some(w) = want {
                            ok &= colour(p.zeta0[a0][i0], p.zeta1[a1][i1]) == w;
                        }
                    }
                }
                ok
            }
            Instance::Qr(q) => {
                let (f0, f1) = (&q.families[a0], &q.families[a1]);
                let mut ok = true;
                for (k0, &z0) in f0.u0.iter().enumerate() {
                    for (k1, &z1) in f1.u1.iter().enumerate() {
                        ok &= z0 < z1 && colour(z0, z1) == pr(f0.h0[k0], f1.h1[k1]);
                    }
                }
                ok
            }
        }
    };
    let rows = match inst {
        Instance::Pr(p) => p.zeta0.len(),
        Instance::Qr(q) => q.families.len(),
    };
    let mut witness = None;
    'outer: for a0 in 0..rows {
        for a1 in a0 + 1..rows {
            if works(a0, a1) {
                witness = Some([a0, a1]);
                break 'outer;
            }
        }
    }
    Verdict { witness }
}

struct Case {
    colouring: ColourTable,
    file: InstanceFile,
}

/// A random valid case; half the time the pattern is planted on a random
/// pair so that witnesses occur.
fn random_case(variant: Variant, rng: &mut ChaCha8Rng) -> Case {
    let lambda = rng.random_range(10..=16);
    let sigma: u64 = if variant.is_qr() { 6 } else { 2 };
    let theta = [rng.random_range(2..=3), rng.random_range(2..=3)];
    let iota = variant.needs_iota().then(|| rng.random_range(0..2));
    let params = if variant == Variant::Col {
        PartitionParams::col(lambda, theta[0] - 1)
    } else {
        PartitionParams {
            lambda,
            mu: lambda,
            sigma,
            theta: Theta::Pair(theta),
            variant,
            iota,
        }
    };
    let eff = params.validated().expect("generated parameters are valid");
    let [t0, t1] = eff.theta.pair();
    let mut colouring = ColourTable::random(lambda, eff.sigma, rng);
    let mut i = [rng.random_range(0..t0), rng.random_range(0..t1)];
    if variant == Variant::Pr0Uf && i[1 - iota.unwrap()] == 0 {
        i[1 - iota.unwrap()] = 1;
    }
    let rows = rng.random_range(2..=lambda / (i[0] + i[1]).max(1)).min(4);
    let mut points: Vec<usize> = (0..lambda).collect();
    points.shuffle(rng);
    let mut take = points.into_iter();
    let mut block = |len: usize| -> Vec<usize> { take.by_ref().take(len).collect() };
    let plant = rng.random_bool(0.5);
    let (a0, a1) = (0, 1);
    let instance = if variant.is_qr() {
        let constant = match variant {
            Variant::Qr0 => [false, false],
            Variant::Qr0Iota => [iota == Some(1), iota == Some(0)],
            _ => [true, true],
        };
        let h = |len: usize, constant: bool, rng: &mut ChaCha8Rng| -> Vec<u64> {
            let g = rng.random_range(0..2);
            (0..len)
                .map(|_| if constant { g } else { rng.random_range(0..2) })
                .collect()
        };
        let mut families = Vec::new();
        for _ in 0..rows {
            let mut u = block(i[0] + i[1]);
            u.sort_unstable();
            let u1 = u.split_off(i[0]);
            let u0 = u;
            let h0 = h(u0.len(), constant[0], rng);
            let h1 = h(u1.len(), constant[1], rng);
            families.push(QrFamily { u0, u1, h0, h1 });
        }
        let q = QrInstance { families };
        if plant {
            let (f0, f1) = (&q.families[a0], &q.families[a1]);
            for (k0, &z0) in f0.u0.iter().enumerate() {
                for (k1, &z1) in f1.u1.iter().enumerate() {
                    let x = f0.h0[k0];
                    let y = f1.h1[k1];
                    colouring.set(z0, z1, (x + y) * (x + y + 1) / 2 + y);
                }
            }
        }
        Instance::Qr(q)
    } else {
        let zeta0: Vec<Vec<usize>> = (0..rows).map(|_| block(i[0])).collect();
        let zeta1: Vec<Vec<usize>> = (0..rows).map(|_| block(i[1])).collect();
        let s = eff.sigma;
        let (h, ultra) = match eff.variant {
            Variant::Pr0 => (
                HFun::Full(
                    (0..i[0])
                        .map(|_| (0..i[1]).map(|_| rng.random_range(0..s)).collect())
                        .collect(),
                ),
                None,
            ),
            Variant::Pr1 => (HFun::Constant(rng.random_range(0..s)), None),
            Variant::Pr0Iota => (
                HFun::Side((0..i[iota.unwrap()]).map(|_| rng.random_range(0..s)).collect()),
                None,
            ),
            _ => {
                let io = iota.unwrap();
                (
                    HFun::Side((0..i[io]).map(|_| rng.random_range(0..s)).collect()),
                    Some(rng.random_range(0..i[1 - io])),
                )
            }
        };
        let p = PrInstance {
            i0: i[0],
            i1: i[1],
            zeta0,
            zeta1,
            h,
            ultra,
        };
        if plant {
            for x in 0..p.i0 {
                for y in 0..p.i1 {
                    let idx = [x, y];
                    let want = match &p.h {
                        HFun::Full(m) => Some(m[x][y]),
                        HFun::Constant(g) => Some(*g),
                        HFun::Side(v) => match p.ultra {
                            Some(j) if idx[1 - iota.unwrap()] != j => None,
                            _ => Some(v[idx[iota.unwrap()]]),
                        },
                    };
                    if let Some(w) = want {
                        colouring.set(p.zeta0[a0][x], p.zeta1[a1][y], w);
                    }
                }
            }
        }
        Instance::Pr(p)
    };
    Case {
        colouring,
        file: InstanceFile {
            schema: SCHEMA.to_string(),
            params,
            instance,
        },
    }
}

fn criterion_checkers() -> Outcome {
    let mut mismatches = 0;
    let mut witnesses = 0;
    let mut cases = 0;
    let mut round_trips = 0;
    let mut round_trip_failures = 0;
    for (vi, &variant) in Variant::ALL.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(600 + vi as u64);
        for _ in 0..100 {
            let case = random_case(variant, &mut rng);
            let got = check_instance(&case.colouring, &case.file).expect("generated instance is valid");
            let want = naive_verdict(&case.colouring, &case.file.params, &case.file.instance);
            cases += 1;
            witnesses += usize::from(got.witness.is_some());
            mismatches += usize::from(got != want);
        }
        // Search round trips: every counterexample is confirmed by the checker.
        for k in 0..5u64 {
            let case = random_case(variant, &mut rng);
            let bounds = SearchBounds::new(3, 1, 1);
            let strategy = if k % 2 == 0 {
                Strategy::Exhaustive
            } else {
                Strategy::Random { seed: k, trials: 300 }
            };
            let Ok(report) = search_counterexample(&case.colouring, &case.file.params, &bounds, strategy) else {
                continue;
            };
            round_trips += 1;
            if let Some(ce) = report.counterexample {
                let file = InstanceFile {
                    instance: ce.instance,
                    ..case.file.clone()
                };
                let verdict = check_instance(&case.colouring, &file);
                if !matches!(verdict, Ok(Verdict { witness: None })) {
                    round_trip_failures += 1;
                }
            }
        }
    }
    Outcome {
        pass: mismatches == 0 && round_trip_failures == 0 && round_trips > 0,
        detail: format!(
            "cases={cases} with_witness={witnesses} oracle_mismatches={mismatches} \
             search_round_trips={round_trips} round_trip_failures={round_trip_failures}"
        ),
    }
}

fn criterion_encodings() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(700);
    let mut theta_diff = 0;
    let mut col_diff = 0;
    let mut witnesses = 0;
    for k in 0..500 {
        let variant = [Variant::Pr0, Variant::Pr1][k % 2];
        let mut case = random_case(variant, &mut rng);
        let [t0, t1] = case.file.params.theta.pair();
        case.file.params.theta = Theta::Single(t0.max(t1));
        let single = check_instance(&case.colouring, &case.file);
        let paired = check_instance(
            &case.colouring,
            &InstanceFile {
                params: normalize_theta(&case.file.params),
                ..case.file.clone()
            },
        );
        theta_diff += usize::from(single != paired);
        witnesses += usize::from(matches!(single, Ok(Verdict { witness: Some(_) })));

        let col_case = random_case(Variant::Col, &mut rng);
        let Theta::Single(theta) = col_case.file.params.theta else {
            unreachable!()
        };
        let as_col = check_instance(&col_case.colouring, &col_case.file);
        let as_pr0 = check_instance(
            &col_case.colouring,
            &InstanceFile {
                params: PartitionParams {
                    lambda: col_case.file.params.lambda,
                    mu: col_case.file.params.lambda,
                    sigma: 2,
                    theta: Theta::Single(theta + 1),
                    variant: Variant::Pr0,
                    iota: None,
                },
                ..col_case.file.clone()
            },
        );
        col_diff += usize::from(as_col != as_pr0 || as_col.is_err());
    }
    Outcome {
        pass: theta_diff == 0 && col_diff == 0,
        detail: format!(
            "instances=500 theta_disagreements={theta_diff} col_disagreements={col_diff} with_witness={witnesses}"
        ),
    }
}

fn main() -> ExitCode {
    let results = [
        run(1, "walk lemmas", Some(Duration::from_secs(30)), criterion_walk_lemmas),
        run(2, "coherence", Some(Duration::from_secs(60)), criterion_coherence),
        run(3, "d index consistency", Some(Duration::from_secs(600)), criterion_claim_e4),
        run(4, "colouring totality", None, criterion_colouring),
        run(5, "transfer identity", None, criterion_transfer),
        run(6, "checker soundness", None, criterion_checkers),
        run(7, "encoding equivalence", None, criterion_encodings),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
