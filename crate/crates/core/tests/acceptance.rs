//! Exit criteria for the library. Runs without the libtest harness so each
//! criterion prints exactly one `[PASS]`/`[FAIL]` line (or `[SKIP]`) under a
//! plain `cargo test`.

use std::fs::File;
use std::io::BufReader;
use std::panic;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subpareto::ingest::{parse_rankings, AdditiveDomain};
use subpareto::pareto::{join_agent, leave_agent};
use subpareto::subgroup::{run_scan, ScanConfig, ScanReport};
use subpareto::synthetic::{impartial_culture, uniform_ratings};
use subpareto::theory::{borda_count, expected_pareto_count, expected_pareto_count_mc, ExpectationQuery};
use subpareto::{pareto_set_fast, pareto_set_naive, Group, OutcomeSpace, PreferenceProfile, ProfileTable};

fn verdict(id: u32, name: &str, ok: bool, detail: impl AsRef<str>) -> bool {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id}: {name} ({})", detail.as_ref());
    ok
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> bool); 9] = [
        (1, criterion_1_subgroup_containment),
        (2, criterion_2_fast_matches_naive),
        (3, criterion_3_formula_identities),
        (4, criterion_4_ratio_grows_with_subgroup_size),
        (5, criterion_5_false_positives),
        (6, criterion_6_dataset_regression),
        (7, criterion_7_incremental_matches_batch),
        (8, criterion_8_desk_scale_performance),
        (9, criterion_9_empirical_fraction_tracks_theory),
    ];
    let mut failed = 0;
    for (id, check) in criteria {
        match panic::catch_unwind(check) {
            Ok(true) => {}
            Ok(false) => failed += 1,
            Err(_) => {
                println!("[FAIL] criterion {id}: panicked");
                failed += 1;
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

/// Every non-empty proper subset of `group`.
fn proper_subgroups(group: &Group) -> impl Iterator<Item = Group> + '_ {
    let n = group.len();
    (1..(1usize << n) - 1).map(move |mask| {
        Group::new(
            (0..n)
                .filter(|j| mask >> j & 1 == 1)
                .map(|j| group.members()[j])
                .collect(),
        )
        .unwrap()
    })
}

fn tied_table(rng: &mut ChaCha8Rng, max_m: usize, max_agents: usize, levels: u32) -> ProfileTable {
    let m = rng.gen_range(1..=max_m);
    let agents = rng.gen_range(1..=max_agents);
    let profiles = (0..agents)
        .map(|a| {
            let u = (0..m).map(|_| f64::from(rng.gen_range(0..levels))).collect();
            PreferenceProfile::new(format!("a{a}"), u).unwrap()
        })
        .collect();
    ProfileTable::new(OutcomeSpace::new(m).unwrap(), profiles).unwrap()
}

fn criterion_1_subgroup_containment() -> bool {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e01);
    let mut checked = 0usize;
    let mut violations = 0usize;
    for _ in 0..1000 {
        let m = rng.gen_range(2..=50);
        let n = rng.gen_range(2..=9);
        let table = impartial_culture(&mut rng, m, n).unwrap();
        let group = Group::all(n).unwrap();
        let full = pareto_set_naive(&group, &table).unwrap();
        for sub in proper_subgroups(&group) {
            let po = pareto_set_fast(&sub, &table).unwrap();
            checked += 1;
            if !po.is_subset_of(&full) {
                violations += 1;
            }
        }
    }
    let elapsed = started.elapsed();
    verdict(
        1,
        "PO(S) ⊆ PO(G) on strict profiles",
        violations == 0 && elapsed < Duration::from_secs(60),
        format!("1000 instances, {checked} subgroups, {violations} violations, {elapsed:.2?}"),
    )
}

fn criterion_2_fast_matches_naive() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e02);
    let mut mismatches = 0;
    let instances = 600;
    for i in 0..instances {
        // mostly coarse integer ratings, every fifth instance on a finer scale
        let levels = if i % 5 == 0 { 1000 } else { 5 };
        let table = tied_table(&mut rng, 64, 9, levels);
        let group = Group::all(table.agent_count()).unwrap();
        let naive = pareto_set_naive(&group, &table).unwrap();
        let fast = pareto_set_fast(&group, &table).unwrap();
        if naive.optimal != fast.optimal {
            mismatches += 1;
        }
    }
    verdict(
        2,
        "sweep equals pairwise filter",
        mismatches == 0,
        format!("{instances} instances with ties, {mismatches} mismatches"),
    )
}

fn harmonic(m: usize) -> BigRational {
    (1..=m).fold(BigRational::zero(), |acc, k| {
        acc + BigRational::new(1.into(), (k as i64).into())
    })
}

fn criterion_3_formula_identities() -> bool {
    let exact = |m, n| expected_pareto_count(ExpectationQuery { m, n }).unwrap();
    let single_ok = (1..=100).all(|m| exact(m, 1).0.is_one());
    let harmonic_ok = (1..=100).all(|m| exact(m, 2).0 == harmonic(m));
    let pair_ok = exact(2, 2).0 == BigRational::new(3.into(), 2.into());

    let mut worst: f64 = 0.0;
    let mut mc_ok = true;
    for m in 1..=8 {
        for n in 1..=5 {
            let q = ExpectationQuery { m, n };
            let value = exact(m, n).to_f64();
            let est = expected_pareto_count_mc(q, 100_000, 0x7e03 + (m * 10 + n) as u64).unwrap();
            let diff = (est.mean - value).abs();
            let within = if est.std_error == 0.0 {
                diff == 0.0
            } else {
                worst = worst.max(diff / est.std_error);
                diff <= 3.0 * est.std_error
            };
            if !within {
                println!("  m={m} n={n}: exact {value}, mc {} ± {}", est.mean, est.std_error);
            }
            mc_ok &= within;
        }
    }
    verdict(
        3,
        "expected Pareto count identities and Monte Carlo agreement",
        single_ok && harmonic_ok && pair_ok && mc_ok,
        format!(
            "n=1 ≡ 1: {single_ok}, n=2 ≡ H_m: {harmonic_ok}, E(2,2)=3/2: {pair_ok}, \
             MC within 3σ for m≤8 n≤5: {mc_ok} (worst {worst:.2}σ)"
        ),
    )
}

fn monotone(report: &ScanReport) -> bool {
    report.group_sizes.iter().all(|g| {
        (2..g.group_size.saturating_sub(1)).all(|k| {
            report.cell(g.group_size, k).unwrap().mean_ratio
                <= report.cell(g.group_size, k + 1).unwrap().mean_ratio
        })
    })
}

fn strict_scans() -> Vec<ScanReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e04);
    let mut reports = Vec::new();
    for (m, pool, cap) in [(10, 12, 300), (40, 14, 200), (200, 10, 60)] {
        let table = impartial_culture(&mut rng, m, pool).unwrap();
        let config = ScanConfig {
            group_sizes: vec![5, 7, 9],
            max_groups_per_size: cap,
            rng_seed: m as u64,
            min_samples_flag: 30,
        };
        reports.push(run_scan(&config, &table).unwrap());
    }
    reports
}

fn criterion_4_ratio_grows_with_subgroup_size() -> bool {
    let reports = strict_scans();
    let ok = reports.iter().all(monotone);
    let cells: usize = reports.iter().map(|r| r.subgroups.len()).sum();
    verdict(
        4,
        "mean ratio non-decreasing in subgroup size (strict profiles)",
        ok,
        format!("{} scans, {cells} cells", reports.len()),
    )
}

fn criterion_5_false_positives() -> bool {
    let strict_zero = strict_scans()
        .iter()
        .flat_map(|r| &r.subgroups)
        .all(|s| s.mean_false_positive_rate == 0.0);

    let mut rng = ChaCha8Rng::seed_from_u64(0x7e05);
    let table = uniform_ratings(&mut rng, 30, 15, 5).unwrap();
    let config = ScanConfig {
        group_sizes: vec![9],
        max_groups_per_size: 200,
        rng_seed: 0x7e05,
        min_samples_flag: 30,
    };
    let report = run_scan(&config, &table).unwrap();
    let small = report.cell(9, 2).unwrap();
    let large = report.cell(9, 8).unwrap();
    let decreasing = large.mean_false_positive_rate < small.mean_false_positive_rate;
    verdict(
        5,
        "false positives: zero when strict, fewer for larger subgroups",
        strict_zero && decreasing && small.sample_count >= 200,
        format!(
            "strict all zero: {strict_zero}; 5-point ratings n=9: k=2 {:.4}, k=8 {:.4} over {} groups",
            small.mean_false_positive_rate, large.mean_false_positive_rate, small.sample_count
        ),
    )
}

fn dataset(var: &str, file: &str) -> Option<PathBuf> {
    if let Ok(p) = std::env::var(var) {
        return Some(PathBuf::from(p));
    }
    let default = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(file);
    default.exists().then_some(default)
}

fn normalized(label: &str) -> String {
    label.to_lowercase().replace(['_', ' '], "-")
}

fn criterion_6_dataset_regression() -> bool {
    let sushi = dataset("SUBPARETO_SUSHI", "sushi.rankings");
    let agh = dataset("SUBPARETO_AGH", "agh.rankings");
    if sushi.is_none() && agh.is_none() {
        println!(
            "[SKIP] criterion 6: dataset regression (set SUBPARETO_SUSHI / SUBPARETO_AGH \
             or place sushi.rankings / agh.rankings under data/)"
        );
        return true;
    }
    let mut ok = true;
    let mut details = Vec::new();
    match sushi {
        Some(path) => {
            let data = parse_rankings(BufReader::new(File::open(&path).unwrap())).unwrap();
            let table = data.to_table().unwrap();
            let tally = borda_count(&data.ballots, &data.space).unwrap();
            let score = |name: &str| {
                (0..data.space.size())
                    .find(|&o| normalized(&data.space.label(o)) == name)
                    .map(|o| tally.scores[o])
            };
            let (toro, kappa) = (score("toro"), score("kappa-maki"));
            ok &= toro == Some(39445)
                && kappa == Some(14928)
                && table.agent_count() == 5000
                && table.outcome_count() == 10;
            details.push(format!(
                "sushi: toro {toro:?}, kappa-maki {kappa:?}, {} profiles over {} outcomes",
                table.agent_count(),
                table.outcome_count()
            ));
        }
        None => details.push("sushi file not supplied".into()),
    }
    match agh {
        Some(path) => {
            let data = parse_rankings(BufReader::new(File::open(&path).unwrap())).unwrap();
            let tally = borda_count(&data.ballots, &data.space).unwrap();
            let top = tally.ranking()[0].1;
            ok &= top == 731;
            details.push(format!("AGH top score {top}"));
        }
        None => details.push("AGH file not supplied".into()),
    }
    verdict(6, "dataset Borda regression", ok, details.join("; "))
}

fn criterion_7_incremental_matches_batch() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e07);
    let mut steps = 0;
    let mut mismatches = 0;
    for _ in 0..300 {
        let m = rng.gen_range(2..=40);
        let pool = rng.gen_range(3..=10);
        let table = impartial_culture(&mut rng, m, pool).unwrap();
        let mut agents: Vec<usize> = (0..pool).collect();
        agents.shuffle(&mut rng);
        let start = Group::new(agents[..2].to_vec()).unwrap();
        let mut current = pareto_set_naive(&start, &table).unwrap();
        for _ in 0..12 {
            let outside: Vec<usize> = (0..pool).filter(|a| !current.group.contains(*a)).collect();
            let join = current.group.len() == 1 || (!outside.is_empty() && rng.gen_bool(0.5));
            let next = if join {
                let a = *outside.choose(&mut rng).unwrap();
                let next = join_agent(&current, a, &table).unwrap();
                if !current.is_subset_of(&next) {
                    mismatches += 1;
                }
                next
            } else {
                let a = *current.group.members().choose(&mut rng).unwrap();
                let next = leave_agent(&current, a, &table).unwrap();
                if !next.is_subset_of(&current) {
                    mismatches += 1;
                }
                next
            };
            let batch = pareto_set_naive(&next.group, &table).unwrap();
            if batch.optimal != next.optimal {
                mismatches += 1;
            }
            steps += 1;
            current = next;
        }
    }
    verdict(
        7,
        "join/leave maintenance equals batch recomputation",
        mismatches == 0,
        format!("300 sequences, {steps} steps, {mismatches} mismatches"),
    )
}

fn criterion_8_desk_scale_performance() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e08);
    // 3 * 4^5 = 3072 outcomes, 24 agents
    let domain = AdditiveDomain::random(&mut rng, &[3, 4, 4, 4, 4, 4], 24);
    let table = domain.to_table().unwrap();
    assert_eq!(table.outcome_count(), 3072);

    let group = Group::new((0..9).collect()).unwrap();
    let started = Instant::now();
    let po = pareto_set_fast(&group, &table).unwrap();
    let single = started.elapsed();

    let config = ScanConfig {
        group_sizes: vec![5, 7, 9],
        max_groups_per_size: 1000,
        rng_seed: 0x7e08,
        min_samples_flag: 30,
    };
    let started = Instant::now();
    let report = run_scan(&config, &table).unwrap();
    let mut csv = Vec::new();
    report.write_csv(&mut csv).unwrap();
    let scan = started.elapsed();

    verdict(
        8,
        "desk-scale performance",
        single < Duration::from_secs(1) && scan < Duration::from_secs(600),
        format!(
            "m=3072 n=9 Pareto set ({} optimal) in {single:.2?}; scan of 24 profiles, n∈{{5,7,9}}, cap 1000 in {scan:.2?}",
            po.len()
        ),
    )
}

fn criterion_9_empirical_fraction_tracks_theory() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e09);
    let mut lines = Vec::new();
    let mut ok = true;
    for m in [10, 20] {
        let table = impartial_culture(&mut rng, m, 1000).unwrap();
        let config = ScanConfig {
            group_sizes: (2..=7).collect(),
            max_groups_per_size: 1000,
            rng_seed: m as u64,
            min_samples_flag: 30,
        };
        let report = run_scan(&config, &table).unwrap();
        for g in &report.group_sizes {
            let diff = (g.mean_pareto_fraction - g.theoretical_pareto_fraction).abs();
            let within = g.sample_count >= 500 && diff <= 3.0 * g.pareto_fraction_std_error;
            ok &= within;
            lines.push(format!(
                "m={m} n={}: {:.2}σ",
                g.group_size,
                diff / g.pareto_fraction_std_error
            ));
        }
    }
    verdict(
        9,
        "empirical Pareto fraction within 3 SE of E(m,n)/m",
        ok,
        lines.join(", "),
    )
}
