use std::collections::BTreeMap;

use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use protoinfer::distance::DistanceMatrix;
use protoinfer::format_cluster::{acda_traced, euclid, membership, AcdaConfig, FeatureVector};
use protoinfer::ingest::{Direction, FlowKey, Transport};
use protoinfer::metrics::{smc, tmc};
use protoinfer::psm::{build_pfts, pfts_to_psm, ps, pt, Node, Psm};
use protoinfer::session_cluster::kmedoids;
use protoinfer::SessionSequence;

const CASES: u32 = 500;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn check<S: Strategy>(
    name: &str,
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases)
        .run(&strategy, test)
        .map_err(|e| format!("{name}: {e}"))
}

fn is_substring(needle: &[u8], hay: &[u8]) -> bool {
    needle.is_empty() || hay.windows(needle.len()).any(|w| w == needle)
}

fn key(i: usize) -> FlowKey {
    let client = format!("10.0.0.1:{}", 1000 + i).parse().unwrap();
    FlowKey::new(client, "10.0.0.2:80".parse().unwrap(), Transport::Tcp)
}

fn sequences(raw: &[Vec<Option<usize>>]) -> Vec<SessionSequence> {
    raw.iter()
        .enumerate()
        .map(|(i, t)| SessionSequence {
            session_key: key(i),
            tokens: t.clone(),
        })
        .collect()
}

fn token_sessions() -> impl Strategy<Value = Vec<Vec<Option<usize>>>> {
    vec(vec(prop::option::weighted(0.9, 0..5usize), 0..10), 1..12)
}

fn psm_from(raw: &[Vec<Option<usize>>], flip: u8) -> Option<Psm> {
    let pfts = build_pfts(&sequences(raw));
    if pfts.is_empty() {
        return None;
    }
    let dirs: BTreeMap<usize, Direction> = pfts
        .labels()
        .into_iter()
        .map(|l| {
            let d = if (flip >> (l % 8)) & 1 == 1 {
                Direction::Responder
            } else {
                Direction::Initiator
            };
            (l, d)
        })
        .collect();
    Some(pfts_to_psm(&pfts, &dirs).expect("directions cover every label"))
}

fn membership_props() -> Result<(), String> {
    let s = (vec(0u8..4, 1..6), vec(0u8..4, 0..20));
    check("membership", CASES, s, |(item, msg)| {
        let m = membership(&item, &msg);
        prop_assert!((0.0..=1.0).contains(&m));
        prop_assert_eq!(m == 1.0, is_substring(&item, &msg));
        Ok(())
    })
}

fn euclid_props() -> Result<(), String> {
    let s = (1usize..6).prop_flat_map(|d| {
        let v = || vec(0.0f64..=1.0, d);
        (v(), v(), v())
    });
    check("distance", CASES, s, |(a, b, c)| {
        let (a, b, c) = (FeatureVector(a), FeatureVector(b), FeatureVector(c));
        let ab = euclid(&a, &b).unwrap();
        prop_assert_eq!(ab, euclid(&b, &a).unwrap());
        prop_assert_eq!(euclid(&a, &a).unwrap(), 0.0);
        let (bc, ac) = (euclid(&b, &c).unwrap(), euclid(&a, &c).unwrap());
        prop_assert!(ac <= ab + bc + 1e-12);
        Ok(())
    })
}

fn probability_props() -> Result<(), String> {
    check("probabilities", CASES, token_sessions(), |raw| {
        let pfts = build_pfts(&sequences(&raw));
        if pfts.is_empty() {
            return Ok(());
        }
        let mut by_from: BTreeMap<Node, f64> = BTreeMap::new();
        let mut total = 0.0;
        for ((f, t), _) in pfts.edges() {
            *by_from.entry(f).or_insert(0.0) += ps(&pfts, f, t).unwrap();
            total += pt(&pfts, f, t).unwrap();
        }
        for (f, s) in by_from {
            prop_assert!((s - 1.0).abs() < 1e-9, "ps from {} sums to {}", f, s);
        }
        prop_assert!((total - 1.0).abs() < 1e-9);
        Ok(())
    })
}

fn matching_props() -> Result<(), String> {
    let s = (token_sessions(), token_sessions(), any::<u8>(), any::<u8>());
    check("state matching", CASES, s, |(ra, rb, fa, fb)| {
        let (Some(a), Some(b)) = (psm_from(&ra, fa), psm_from(&rb, fb)) else {
            return Ok(());
        };
        prop_assert_eq!(smc(&a, &b), smc(&b, &a));
        prop_assert_eq!(tmc(&a, &b), tmc(&b, &a));
        prop_assert_eq!(smc(&a, &a), 1.0);
        prop_assert_eq!(tmc(&a, &a), 1.0);
        for v in [smc(&a, &b), tmc(&a, &b)] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        Ok(())
    })
}

fn kmedoids_props() -> Result<(), String> {
    let s = (2usize..25).prop_flat_map(|n| (vec(vec(0.0f64..10.0, 2), n), 1..=n));
    check("k-medoids objective", CASES, s, |(points, k)| {
        let dist = DistanceMatrix::from_fn(points.len(), |i, j| {
            ((points[i][0] - points[j][0]).powi(2) + (points[i][1] - points[j][1]).powi(2)).sqrt()
        });
        let r = kmedoids(&dist, k, 0).unwrap();
        for w in r.objective.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9, "objective rose: {:?}", r.objective);
        }
        Ok(())
    })
}

fn acda_props() -> Result<(), String> {
    let s = vec(vec(0.0f64..=1.0, 3), 6..30);
    check("acda best score", CASES, s, |points| {
        let vectors: Vec<FeatureVector> = points.into_iter().map(FeatureVector).collect();
        let cfg = AcdaConfig {
            max_iters: 6,
            ..AcdaConfig::default()
        };
        let Ok(run) = acda_traced(&vectors, &cfg) else {
            return Ok(());
        };
        for w in run.history.windows(2) {
            prop_assert!(w[1].best_sc >= w[0].best_sc);
        }
        if let Some(last) = run.history.last() {
            prop_assert_eq!(last.best_sc, run.labeling.sc);
        }
        Ok(())
    })
}

pub fn run() -> Result<String, String> {
    membership_props()?;
    euclid_props()?;
    probability_props()?;
    matching_props()?;
    kmedoids_props()?;
    acda_props()?;
    Ok(format!("6 properties x {CASES} cases"))
}
