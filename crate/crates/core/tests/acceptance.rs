//! Acceptance suite: one PASS/FAIL line per criterion AC-1..AC-8, followed by
//! indented detail. Runs without the libtest harness so every line is shown;
//! the process exits non-zero if any criterion fails.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use orbitconf::cyclotomic::CycNum;
use orbitconf::finite_field::FieldTable;
use orbitconf::os_cohomology::{
    default_n_max, graded_character, stable_inner_product, GradedCharacter, OsAlgebra,
};
use orbitconf::polyspace::{enumerate_polyspace, polyspace_size};
use orbitconf::stats_engine::{
    approx, cohomology_section, exact_string, glt_row, normform_row, rational_distance,
    run_pointcount, scan_types, Mode, Observable, RunConfig,
};
use orbitconf::wreath_char::{labeled_cycle_types, parse_statistic, ClassTable, WreathElement};

/// `Σ_{α≠β} χ(α) χ̄(β)` over pairs of distinct roots.
const PAIR_STAT: &str = "X[1,chi 1]*X[1,chi -1] - X[1,chi 0]";
/// The same product with the diagonal `α = β` included.
const PRODUCT_STAT: &str = "X[1,chi 1]*X[1,chi -1]";

struct Outcome {
    pass: bool,
    summary: String,
    detail: Vec<String>,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn divisors_upto(qm1: u32, cap: u32) -> Vec<u32> {
    (1..=cap.min(qm1)).filter(|d| qm1 % d == 0).collect()
}

fn ac1() -> Outcome {
    let mut detail = Vec::new();
    let mut cells = 0;
    let mut bad = Vec::new();
    let mut chars: HashMap<(u32, u32), GradedCharacter> = HashMap::new();
    let start = Instant::now();
    for q in [3u32, 5, 7] {
        let field = FieldTable::from_order(q).unwrap();
        let n_top = if q == 3 { 4 } else { 3 };
        for d in divisors_upto(q - 1, 6) {
            let mut phis: Vec<String> = vec!["1".into()];
            phis.extend((0..d).map(|k| format!("X[1,g={k}]")));
            phis.extend([
                PRODUCT_STAT.into(),
                PAIR_STAT.into(),
                "X[2,chi 1]".into(),
                "delta".into(),
            ]);
            for n in 1..=n_top {
                let counts = scan_types(&field, n, d, 1).unwrap();
                let ch = chars
                    .entry((n, d))
                    .or_insert_with(|| graded_character(n, d).unwrap());
                for phi in &phis {
                    let obs = Observable::parse(phi, d).unwrap();
                    let row = glt_row(q, n, &obs, &counts, ch).unwrap();
                    cells += 1;
                    if !row.equal {
                        bad.push(format!(
                            "q={q} d={d} n={n} phi={phi}: {} vs {}",
                            row.point_side.exact, row.cohomology_side.exact
                        ));
                    }
                }
            }
        }
    }
    detail.push(format!(
        "{cells} cells in {:.1}s",
        start.elapsed().as_secs_f64()
    ));
    detail.extend(bad.iter().cloned());
    Outcome {
        pass: bad.is_empty(),
        summary: format!(
            "exact GLT identity on {} of {cells} cells",
            cells - bad.len()
        ),
        detail,
    }
}

/// Stable `⟨P, H^i⟩` for `i = 1, 2` and their onsets.
fn stable_pair(text: &str, d: u32) -> Vec<(String, u32)> {
    let p = parse_statistic(text, d).unwrap();
    (1..=2)
        .map(|i| {
            let sp = stable_inner_product(&p, i, default_n_max(&p, i)).unwrap();
            (exact_string(&sp.value), sp.plateau_onset)
        })
        .collect()
}

fn ac2() -> Outcome {
    let mut detail = Vec::new();
    let mut pass = true;
    for d in [2u32, 3, 4, 6] {
        let v = stable_pair(PAIR_STAT, d);
        let ok = v[0].0 == "1" && v[1].0 == "5";
        pass &= ok;
        detail.push(format!(
            "d={d} {PAIR_STAT}: i=1 -> {} (onset n={}), i=2 -> {} (onset n={})",
            v[0].0, v[0].1, v[1].0, v[1].1
        ));
        let w = stable_pair(PRODUCT_STAT, d);
        detail.push(format!(
            "d={d} {PRODUCT_STAT} (diagonal included, for comparison): i=1 -> {}, i=2 -> {}",
            w[0].0, w[1].0
        ));
    }
    Outcome {
        pass,
        summary: "coefficients 1 and 5 for the distinct-root pair statistic".into(),
        detail,
    }
}

fn ac3() -> Outcome {
    let mut detail = Vec::new();
    let v = stable_pair("X[2,chi 1]", 2);
    let pass = v[0].0 == "1" && v[1].0 == "3";
    detail.push(format!(
        "d=2 X[2,chi 1]: i=1 -> {} (onset n={}), i=2 -> {} (onset n={}); expected 1 and 3",
        v[0].0, v[0].1, v[1].0, v[1].1
    ));
    for d in [4u32, 6] {
        let text = format!("X[2,chi {}]", d / 2);
        let w = stable_pair(&text, d);
        detail.push(format!(
            "d={d} {text}: i=1 -> {}, i=2 -> {}",
            w[0].0, w[1].0
        ));
    }
    let w = stable_pair("2*X[2,chi 1]", 2);
    detail.push(format!(
        "d=2 2*X[2,chi 1] (one term per root instead of per factor): i=1 -> {}, i=2 -> {}",
        w[0].0, w[1].0
    ));
    detail.push(
        "sum over irreducible quadratics of the quadratic character of a root is -(q-1)/2, so the per-factor average \
         starts -1/(2q); the expected coefficients are twice the values found"
            .into(),
    );
    Outcome {
        pass,
        summary: "coefficients 1 and 3 for the quadratic-character statistic on 2-cycles".into(),
        detail,
    }
}

fn ac4() -> Outcome {
    let mut detail = Vec::new();
    let mut pass = true;
    for (q, d) in [(7u32, 2u32), (5, 4)] {
        let stat = parse_statistic(PAIR_STAT, d).unwrap();
        let series = cohomology_section(&stat, q, 3, None).unwrap();
        let s2 = series.series[2].partial_sum.value.clone();
        let s3 = series.series[3].partial_sum.value.clone();
        let c3 = exact_string(&series.products[3].value);
        let target = CycNum::from_rational(d, rat(-1, q as i64) + rat(5, (q * q) as i64));
        let t0 = Instant::now();
        let cfg = RunConfig::new(Mode::Pointcount, q, d, 3).with_stat(PAIR_STAT);
        let a3 = run_pointcount(&cfg).unwrap().payload.pointcount.unwrap()[0]
            .average
            .value
            .clone();
        let cfg = RunConfig::new(Mode::Pointcount, q, d, 9).with_stat(PAIR_STAT);
        let a9 = run_pointcount(&cfg).unwrap().payload.pointcount.unwrap()[0]
            .average
            .value
            .clone();
        let e3 = rational_distance(&a3, &target).unwrap();
        let e9 = rational_distance(&a9, &target).unwrap();
        let es = rational_distance(&a9, &s2).unwrap();
        let tol = rat(10, (q as i64).pow(3));
        let ok = e9 < e3 && es < tol;
        pass &= ok;
        detail.push(format!(
            "q={q} d={d}: A_3 = {} , A_9 = {} , S_2 = {} ; |A_3 - T| = {:.3e}, |A_9 - T| = {:.3e}, |A_9 - S_2| = {:.3e} < {:.3e}: {ok} ({:.1}s)",
            exact_string(&a3),
            exact_string(&a9),
            exact_string(&s2),
            approx(&e3),
            approx(&e9),
            approx(&es),
            approx(&tol),
            t0.elapsed().as_secs_f64()
        ));
        detail.push(format!(
            "    next coefficient <P, H^3> = {c3}, S_3 = {} ({:.4e}); A_3 and A_9 already sit near the full series",
            exact_string(&s3),
            s3.approx().0
        ));
    }
    detail.push(
        "the i = 3 term alone is 13/q^3 > 10/q^3, so no n can bring A_n within 10 q^-3 of S_2, and the distance to \
         S_2 cannot shrink once A_n has settled near its limit"
            .into(),
    );
    Outcome {
        pass,
        summary: "averages approach -1/q + 5/q^2 between n = 3 and n = 9".into(),
        detail,
    }
}

fn ac5() -> Outcome {
    let mut detail = Vec::new();
    let mut pass = true;
    for (q, d, n_top) in [(3u32, 2u32, 4u32), (5, 2, 3), (7, 3, 3)] {
        let field = FieldTable::from_order(q).unwrap();
        for n in 1..=n_top {
            let counts = scan_types(&field, n, d, 1).unwrap();
            let ch = graded_character(n, d).unwrap();
            let row = normform_row(&field, d, n, &counts, &ch).unwrap();
            let ok = row.delta_equals_cohomology && row.delta_equals_witness;
            pass &= ok;
            detail.push(format!(
                "q={q} d={d} n={n}: delta {} cohomology {} witnesses minus {} plus {} either {} realized by [{}]{}",
                row.delta_count,
                row.cohomological.exact,
                row.witness_minus,
                row.witness_plus,
                row.witness_any,
                row.realizing_signs.join(", "),
                if ok { "" } else { "  <- mismatch" }
            ));
        }
    }
    detail.push(
        "witnesses have the shape g^d -+ t h^d with d deg g <= n and 1 + d deg h <= n; for d = 3 no such f has \
         degree 2 and few have degree 3, while the norm from F_q(t^(1/3)) has cross terms these binomials lack"
            .into(),
    );
    Outcome {
        pass,
        summary:
            "delta count = norm-form witness count (one sign convention) = cohomological count"
                .into(),
        detail,
    }
}

/// Points of the complement of the arrangement over `F_p`, by brute force.
fn complement_points(p: u64, n: usize, d: u64) -> u64 {
    let mut count = 0;
    let mut x = vec![1u64; n];
    loop {
        let ok = (0..n).all(|i| {
            (0..i).all(|j| {
                // x_i / x_j is not a d-th root of unity
                let inv = mod_pow(x[j], p - 2, p);
                mod_pow(x[i] * inv % p, d, p) != 1
            })
        });
        count += u64::from(ok);
        let mut k = 0;
        while k < n {
            x[k] += 1;
            if x[k] < p {
                break;
            }
            x[k] = 1;
            k += 1;
        }
        if k == n {
            return count;
        }
    }
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn ac6() -> Outcome {
    let mut detail = Vec::new();
    // OS ranks against the characteristic polynomial read off point counts
    let mut os_ok = true;
    for d in 1..=3u32 {
        for n in 1..=4usize {
            let ranks = OsAlgebra::full(n, d).unwrap().ranks();
            for p in [7u64, 13, 19, 31, 37] {
                let expect: i128 = ranks
                    .iter()
                    .enumerate()
                    .map(|(i, &r)| {
                        (if i % 2 == 0 { 1 } else { -1 })
                            * r as i128
                            * (p as i128).pow((n - i) as u32)
                    })
                    .sum();
                if complement_points(p, n, d as u64) as i128 != expect {
                    os_ok = false;
                    detail.push(format!(
                        "OS ranks {ranks:?} disagree with point count at d={d} n={n} p={p}"
                    ));
                }
            }
        }
    }
    detail.push(format!(
        "OS ranks vs characteristic polynomial (n <= 4, d <= 3, five primes): {os_ok}"
    ));

    // wreath classes against enumeration of the group
    let mut wr_ok = true;
    for n in 1..=3usize {
        let all = WreathElement::all(2, n);
        let mut by_type: BTreeMap<_, u64> = BTreeMap::new();
        for w in &all {
            *by_type.entry(w.cycle_type()).or_insert(0) += 1;
        }
        let formula: BTreeMap<_, u64> = labeled_cycle_types(2, n as u32)
            .into_iter()
            .map(|(t, s)| (t, u64::try_from(s).unwrap()))
            .collect();
        wr_ok &= by_type == formula;
        let table = ClassTable::new(2, n as u32);
        wr_ok &= *table.group_order() == BigUint::from(all.len());
        // conjugacy classes by orbit computation
        let mut seen: HashSet<WreathElement> = HashSet::new();
        for w in &all {
            if seen.contains(w) {
                continue;
            }
            let orbit: HashSet<WreathElement> = all
                .iter()
                .map(|g| g.compose(w).compose(&g.inverse()))
                .collect();
            let t = w.cycle_type();
            wr_ok &= orbit.iter().all(|x| x.cycle_type() == t) && orbit.len() as u64 == formula[&t];
            seen.extend(orbit);
        }
    }
    detail.push(format!(
        "wreath classes vs enumeration (d = 2, n <= 3): {wr_ok}"
    ));

    // |Poly_n(F_q^*)|
    let mut three_term_ok = true;
    let mut true_ok = true;
    let mut misses = Vec::new();
    for q in [2u32, 3, 4, 5, 7] {
        let field = FieldTable::from_order(q).unwrap();
        for n in 2..=6u32 {
            let scanned = scan_types(&field, n, 1, 1).unwrap().poly_count;
            let q64 = q as i64;
            let three = q64.pow(n) - 2 * q64.pow(n - 1) + q64.pow(n - 2);
            if scanned as i64 != three {
                three_term_ok = false;
                misses.push(format!("q={q} n={n}: {scanned} vs {three}"));
            }
            let brute = if q.pow(n) <= 20_000 {
                enumerate_polyspace(&field, n as usize).count() as u64
            } else {
                scanned
            };
            true_ok &= scanned == polyspace_size(q as u64, n) && brute == scanned;
        }
    }
    detail.push(format!(
        "scan counts vs coefficient of t^n in (1 - q t^2)/((1 - q t)(1 + t)): {true_ok}"
    ));
    detail.push(format!(
        "scan counts vs q^n - 2q^(n-1) + q^(n-2): {three_term_ok}; mismatches: {}",
        misses.join("; ")
    ));
    detail.push(
        "the three-term expression is right only for n = 2; inclusion-exclusion over T | f and squarefreeness gives \
         q^n - 2q^(n-1) + 2q^(n-2) - ... + 2(-1)^(n-1) q + (-1)^n"
            .into(),
    );
    Outcome {
        pass: os_ok && wr_ok && true_ok && three_term_ok,
        summary: "OS ranks, wreath class data and polynomial counts against oracles".into(),
        detail,
    }
}

fn ac7() -> Outcome {
    let mut detail = Vec::new();
    let mut pass = true;
    let mut stats: Vec<(String, u32)> = vec![
        ("1".into(), 2),
        ("X[1,g=0]".into(), 2),
        ("X[1,g=1]".into(), 2),
    ];
    for d in [2u32, 3, 4, 6] {
        stats.push((PAIR_STAT.into(), d));
    }
    stats.push((PRODUCT_STAT.into(), 2));
    stats.push(("X[2,chi 1]".into(), 2));
    for (text, d) in &stats {
        let p = parse_statistic(text, *d).unwrap();
        let mut parts = Vec::new();
        for i in 0..=2 {
            let sp = stable_inner_product(&p, i, default_n_max(&p, i)).unwrap();
            let len = sp.plateau_length();
            pass &= len >= 3;
            parts.push(format!(
                "i={i}: {} from n={} (run {len} up to n={})",
                exact_string(&sp.value),
                sp.plateau_onset,
                sp.n_max
            ));
        }
        detail.push(format!("d={d} {text}: {}", parts.join("; ")));
    }
    // regression fixtures for the onsets and values
    let fixture = [
        ("1", 2u32, [("1", 1u32), ("2", 2), ("2", 3)]),
        (PAIR_STAT, 2, [("0", 1), ("1", 2), ("5", 4)]),
        ("X[2,chi 1]", 2, [("0", 1), ("1/2", 2), ("3/2", 4)]),
    ];
    for (text, d, want) in fixture {
        let p = parse_statistic(text, d).unwrap();
        for (i, (v, onset)) in want.iter().enumerate() {
            let sp = stable_inner_product(&p, i, default_n_max(&p, i)).unwrap();
            if exact_string(&sp.value) != *v || sp.plateau_onset != *onset {
                pass = false;
                detail.push(format!(
                    "fixture drift: d={d} {text} i={i}: {} from n={}",
                    exact_string(&sp.value),
                    sp.plateau_onset
                ));
            }
        }
    }
    Outcome {
        pass,
        summary: "plateaus of length >= 3 for every acceptance statistic, i <= 2".into(),
        detail,
    }
}

fn ac8() -> Outcome {
    let mut detail = Vec::new();
    let base = RunConfig::new(Mode::Pointcount, 5, 4, 10).with_stat(PAIR_STAT);
    let mut payloads = Vec::new();
    let mut times = Vec::new();
    for shards in [1usize, 4, 8] {
        let t0 = Instant::now();
        let r = run_pointcount(&base.clone().with_shards(shards)).unwrap();
        times.push(t0.elapsed().as_secs_f64());
        if shards == 1 {
            let row = &r.payload.pointcount.as_ref().unwrap()[0];
            detail.push(format!(
                "q=5 d=4 n=10: {} squarefree of {} candidates, A_10 = {}",
                row.poly_count, row.candidates, row.average.exact
            ));
        }
        payloads.push(r.payload_json());
    }
    let identical = payloads.windows(2).all(|w| w[0] == w[1]);
    let threads = rayon::current_num_threads();
    detail.push(format!(
        "wall time at 1/4/8 shards: {:.1}s / {:.1}s / {:.1}s on {threads} thread(s); payloads identical: {identical}",
        times[0], times[1], times[2]
    ));
    Outcome {
        pass: identical && times.iter().all(|&t| t <= 60.0),
        summary: "q = 5, n = 10 scan within 60 s, shard-independent report".into(),
        detail,
    }
}

fn main() {
    // `cargo test -- --list` and filters from libtest are accepted and ignored
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let suite: [(&str, fn() -> Outcome); 8] = [
        ("AC-1", ac1),
        ("AC-2", ac2),
        ("AC-3", ac3),
        ("AC-4", ac4),
        ("AC-5", ac5),
        ("AC-6", ac6),
        ("AC-7", ac7),
        ("AC-8", ac8),
    ];
    let mut failed = Vec::new();
    for (name, f) in suite {
        let out = f();
        println!(
            "{name} {}: {}",
            if out.pass { "PASS" } else { "FAIL" },
            out.summary
        );
        for line in &out.detail {
            println!("    {line}");
        }
        if !out.pass {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing {}", failed.join(", "));
        std::process::exit(1);
    }
}
