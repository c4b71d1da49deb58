mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use stratix::survival::{chi_square_sf, km_curve, logrank};

fn ids(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Two groups stored in one table: `a{i}` and `b{i}`.
fn two_groups(a: &[(f64, bool)], b: &[(f64, bool)]) -> (stratix::ingest::ClinicalTable, Vec<(String, Vec<String>)>) {
    let mut records = clinical("a", a).records().to_vec();
    records.extend(clinical("b", b).records().iter().cloned());
    let table = stratix::ingest::ClinicalTable::from_records(records).unwrap();
    (table, vec![("A".into(), ids("a", a.len())), ("B".into(), ids("b", b.len()))])
}

#[test]
fn km_matches_risk_set_simulation() {
    for instance in 0..200u64 {
        let mut r = rng(40_000 + instance);
        let n = r.random_range(1..=30);
        let censor_p = r.random_range(0.0..0.6);
        let obs = random_survival(&mut r, n, censor_p);
        let table = clinical("s", &obs);
        let curve = km_curve("g", &ids("s", n), &table).unwrap();
        let oracle = naive_km(&obs);
        assert_eq!(curve.steps.len(), oracle.len(), "instance {instance}");
        let mut greenwood = 0.0;
        for (step, &(t, n_risk, d, s)) in curve.steps.iter().zip(&oracle) {
            assert_eq!(step.time, t);
            assert_eq!(step.n_at_risk, n_risk);
            assert_eq!(step.events, d);
            assert!((step.survival - s).abs() <= 1e-12, "instance {instance} t={t}");
            if d < n_risk {
                greenwood += d as f64 / (n_risk as f64 * (n_risk - d) as f64);
            }
            assert!((step.variance - s * s * greenwood).abs() <= 1e-12);
        }
        let censored = obs.iter().filter(|o| !o.1).count();
        assert_eq!(curve.censor_times.len(), censored);
    }
}

#[test]
fn km_without_censoring_is_exactly_one_minus_ecdf() {
    for instance in 0..200u64 {
        let mut r = rng(50_000 + instance);
        let n = r.random_range(1..=30);
        let obs = random_survival(&mut r, n, 0.0);
        let table = clinical("s", &obs);
        let curve = km_curve("g", &ids("s", n), &table).unwrap();
        for step in &curve.steps {
            let at_or_before = obs.iter().filter(|o| o.0 <= step.time).count();
            let ecdf_complement = (n - at_or_before) as f64 / n as f64;
            assert_eq!(step.survival, ecdf_complement, "instance {instance} t={}", step.time);
        }
    }
}

#[test]
fn identical_groups_give_zero_statistic_and_unit_p() {
    let obs = [(1.0, true), (3.0, false), (4.0, true), (4.0, true), (7.0, false)];
    let (table, groups) = two_groups(&obs, &obs);
    let lr = logrank(&groups, &table).unwrap();
    assert_eq!(lr.statistic, 0.0);
    assert_eq!(lr.p_value, 1.0);
}

#[test]
fn four_subject_example_matches_event_table() {
    let a = [(1.0, true), (2.0, true)];
    let b = [(3.0, true), (4.0, true)];
    let (table, groups) = two_groups(&a, &b);
    let lr = logrank(&groups, &table).unwrap();
    let (o, e, v) = logrank_table(&a, &b);
    assert_eq!(o, 2.0);
    assert!((e - 5.0 / 6.0).abs() < 1e-12);
    assert!((lr.observed[0] - o).abs() < 1e-10);
    assert!((lr.expected[0] - e).abs() < 1e-10);
    assert!((lr.variance.unwrap() - v).abs() < 1e-10);
    assert!((lr.statistic - (o - e).powi(2) / v).abs() < 1e-10);
    // by hand: V = 1/4 + 2/9, statistic = (7/6)^2 / (17/36) = 49/17
    assert!((lr.statistic - 49.0 / 17.0).abs() < 1e-10);
}

#[test]
fn two_group_statistic_matches_event_table_on_random_data() {
    for instance in 0..100u64 {
        let mut r = rng(60_000 + instance);
        let (na, nb) = (r.random_range(1..=20), r.random_range(1..=20));
        let a = random_survival(&mut r, na, 0.3);
        let b = random_survival(&mut r, nb, 0.3);
        if !a.iter().chain(&b).any(|o| o.1) {
            continue;
        }
        let (table, groups) = two_groups(&a, &b);
        let (o, e, v) = logrank_table(&a, &b);
        match logrank(&groups, &table) {
            Ok(lr) => {
                assert!((lr.observed[0] - o).abs() < 1e-10);
                assert!((lr.expected[0] - e).abs() < 1e-10);
                if v > 0.0 {
                    assert!((lr.statistic - (o - e).powi(2) / v).abs() < 1e-9 * (1.0 + lr.statistic));
                }
                let total_o: f64 = lr.observed.iter().sum();
                let total_e: f64 = lr.expected.iter().sum();
                assert!((total_o - total_e).abs() < 1e-9);
            }
            Err(err) => assert_eq!(err.code(), "zero_variance", "instance {instance}"),
        }
    }
}

#[test]
fn chi_square_matches_quadrature() {
    let p = chi_square_sf(3.841459, 1).unwrap();
    let oracle = chi_square_sf_quadrature(3.841459, 1);
    assert!((oracle - 0.05).abs() < 5e-4);
    assert!((p - 0.05).abs() < 5e-4);
    assert!((p - oracle).abs() < 1e-10);
    for df in [1u32, 2, 3, 5, 10, 30, 100] {
        for x in [0.01, 0.5, 1.0, 3.0, 10.0, 40.0, 100.0, 150.0] {
            let got = chi_square_sf(x, df).unwrap();
            let want = chi_square_sf_quadrature(x, df);
            assert!((got - want).abs() < 1e-10, "df {df} x {x}: {got} vs {want}");
        }
    }
    assert_eq!(chi_square_sf(0.0, 4).unwrap(), 1.0);
    assert!((chi_square_sf(2.0, 2).unwrap() - (-1.0f64).exp()).abs() < 1e-14);
}

fn obs_strategy(max: usize) -> impl Strategy<Value = Vec<(f64, bool)>> {
    prop::collection::vec((1u32..15, any::<bool>()), 1..max)
        .prop_map(|v| v.into_iter().map(|(t, e)| (t as f64, e)).collect())
}

proptest! {
    #[test]
    fn km_is_order_independent(a in obs_strategy(15), b in obs_strategy(15)) {
        let (table, groups) = two_groups(&a, &b);
        let mut merged: Vec<String> = groups[0].1.iter().chain(&groups[1].1).cloned().collect();
        let forward = km_curve("g", &merged, &table).unwrap();
        merged.reverse();
        let backward = km_curve("g", &merged, &table).unwrap();
        prop_assert_eq!(forward, backward);
    }

    #[test]
    fn km_curve_invariants(obs in obs_strategy(30)) {
        let table = clinical("s", &obs);
        let c = km_curve("g", &ids("s", obs.len()), &table).unwrap();
        let mut prev_s = 1.0;
        let mut prev_n = usize::MAX;
        for s in &c.steps {
            prop_assert!(s.survival <= prev_s && (0.0..=1.0).contains(&s.survival));
            prop_assert!(s.n_at_risk <= prev_n);
            prop_assert!(s.events >= 1);
            prev_s = s.survival;
            prev_n = s.n_at_risk;
        }
        prop_assert!(c.steps.windows(2).all(|w| w[0].time < w[1].time));
    }

    #[test]
    fn logrank_ignores_group_order(a in obs_strategy(12), b in obs_strategy(12), c in obs_strategy(12)) {
        prop_assume!(a.iter().chain(&b).chain(&c).any(|o| o.1));
        let mut records = clinical("a", &a).records().to_vec();
        records.extend(clinical("b", &b).records().iter().cloned());
        records.extend(clinical("c", &c).records().iter().cloned());
        let table = stratix::ingest::ClinicalTable::from_records(records).unwrap();
        let ga = ("A".to_string(), ids("a", a.len()));
        let gb = ("B".to_string(), ids("b", b.len()));
        let gc = ("C".to_string(), ids("c", c.len()));
        let three = logrank(&[ga.clone(), gb.clone(), gc.clone()], &table).unwrap();
        let shuffled = logrank(&[gc, ga.clone(), gb.clone()], &table).unwrap();
        prop_assert!((three.statistic - shuffled.statistic).abs() <= 1e-12 * (1.0 + three.statistic));
        prop_assert!((three.p_value - shuffled.p_value).abs() <= 1e-12);
        if let (Ok(x), Ok(y)) = (logrank(&[ga.clone(), gb.clone()], &table), logrank(&[gb, ga], &table)) {
            prop_assert!((x.statistic - y.statistic).abs() <= 1e-12 * (1.0 + x.statistic));
            prop_assert_eq!(x.p_value, y.p_value);
        }
    }

    #[test]
    fn doubling_subjects_strengthens_the_statistic(a in obs_strategy(10), b in obs_strategy(10)) {
        let (table, groups) = two_groups(&a, &b);
        let Ok(once) = logrank(&groups, &table) else { return Ok(()) };
        prop_assume!(once.statistic > 1e-9);
        let double = |v: &[(f64, bool)]| v.iter().chain(v).copied().collect::<Vec<_>>();
        let (table2, groups2) = two_groups(&double(&a), &double(&b));
        let twice = logrank(&groups2, &table2).unwrap();
        prop_assert!(twice.statistic > once.statistic);
        let sign = |r: &stratix::survival::LogRankResult| (r.observed[0] - r.expected[0]).signum();
        prop_assert_eq!(sign(&once), sign(&twice));
    }

    #[test]
    fn chi_square_sf_decreases(df in 1u32..60, x in 0.0f64..300.0, dx in 0.01f64..5.0) {
        let lo = chi_square_sf(x, df).unwrap();
        let hi = chi_square_sf(x + dx, df).unwrap();
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(hi <= lo);
        // strict while both ends are away from where f64 rounds to 0 or 1
        if lo > 1e-300 && lo < 1.0 - 1e-9 {
            prop_assert!(hi < lo, "df {} x {} -> {} vs {}", df, x, lo, hi);
        }
    }
}
