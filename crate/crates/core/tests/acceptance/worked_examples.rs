use protoinfer::format_cluster::{
    euclid, feature_vectors, lcss_len, membership, next_eps_step, next_minpts_step, silhouette,
    AcdaConfig, FeatureVector,
};
use protoinfer::metrics::{rand_index, smc, tmc};
use protoinfer::mfi::{extract_mfi, support, FrequentItem, MfiConfig, MfiError};
use protoinfer::psm::{ps, pt, Node, Pfts, Psm, Role, State, Transition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

fn ensure(ok: bool, what: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn state(id: &str, role: Role) -> State {
    State {
        id: id.into(),
        role,
    }
}

fn edge(from: &str, to: &str, label: Option<&str>) -> Transition {
    Transition {
        from: from.into(),
        to: to.into(),
        label: label.map(Into::into),
        p: 1.0,
    }
}

fn support_examples() -> Result<(), String> {
    let all: Vec<Vec<u8>> = vec![vec![1, 2], vec![2, 1], vec![9, 1]];
    ensure(
        support(&[1], &all).unwrap() == 1.0,
        "support: present everywhere",
    )?;
    let four: Vec<Vec<u8>> = vec![vec![0]; 4];
    ensure(support(&[7], &four).unwrap() == 0.0, "support: absent")?;
    let m: Vec<Vec<u8>> = vec![vec![0xab, 0x00], vec![0x00, 0xab], vec![0x11, 0x22]];
    ensure(
        close(support(&[0xab], &m).unwrap(), 2.0 / 3.0),
        "support: 2/3",
    )
}

fn mfi_examples() -> Result<(), String> {
    let same = vec![vec![0xde, 0xad, 0xbe, 0xef]; 5];
    let items = extract_mfi(&same, &MfiConfig::new(0.5).unwrap()).map_err(|e| e.to_string())?;
    ensure(
        items.len() == 1 && items[0].bytes == [0xde, 0xad, 0xbe, 0xef],
        "mfi: containment keeps only the whole message",
    )?;
    let mut two: Vec<Vec<u8>> = (0..4u8).map(|i| vec![0x11, 0x22, 0x80 + i]).collect();
    two.extend((0..4u8).map(|i| vec![0x40 + i, 0x33, 0x44]));
    let items = extract_mfi(&two, &MfiConfig::new(0.4).unwrap()).map_err(|e| e.to_string())?;
    let found: Vec<&[u8]> = items.iter().map(|i| i.bytes.as_slice()).collect();
    ensure(
        found == [[0x11, 0x22], [0x33, 0x44]],
        "mfi: one magic per population",
    )?;
    let distinct: Vec<Vec<u8>> = (0..8u8).map(|i| vec![i]).collect();
    ensure(
        matches!(
            extract_mfi(&distinct, &MfiConfig::new(0.999).unwrap()),
            Err(MfiError::EmptyMfi(_))
        ),
        "mfi: nothing frequent",
    )
}

fn lcss_examples() -> Result<(), String> {
    ensure(lcss_len(b"abcab", b"abcab") == 5, "lcss: identity")?;
    ensure(
        lcss_len(&[0xaa, 0xbb, 0xcc], &[0xdd, 0xee, 0xff]) == 0,
        "lcss: disjoint",
    )?;
    ensure(
        lcss_len(&[1, 2, 3, 4], &[0xff, 2, 3, 0x10]) == 2,
        "lcss: common run 0203",
    )
}

fn feature_examples() -> Result<(), String> {
    let item = |b: &[u8]| FrequentItem {
        bytes: b.to_vec(),
        support: 1.0,
    };
    let own = feature_vectors(&[vec![5u8, 6, 7]], &[item(&[5, 6, 7])]).unwrap();
    ensure(own == [FeatureVector(vec![1.0])], "features: own bytes")?;
    let zero = feature_vectors(&[vec![9u8, 9]], &[item(&[1]), item(&[2, 3])]).unwrap();
    ensure(
        zero == [FeatureVector(vec![0.0, 0.0])],
        "features: disjoint",
    )?;
    let mixed = feature_vectors(
        &[vec![1u8, 2, 0, 3, 4]],
        &[item(&[1, 2]), item(&[3, 4, 5, 6])],
    )
    .unwrap();
    ensure(
        mixed == [FeatureVector(vec![1.0, 0.5])],
        "features: full and half",
    )
}

fn membership_examples() -> Result<(), String> {
    ensure(
        membership(&[2, 3], &[1, 2, 3, 4]) == 1.0,
        "membership: substring",
    )?;
    ensure(membership(b"ABCD", b"xxABxx") == 0.5, "membership: half")?;
    ensure(
        membership(&[1, 2], &[7, 8, 9]) == 0.0,
        "membership: disjoint",
    )
}

fn euclid_examples() -> Result<(), String> {
    let v = FeatureVector(vec![0.3, 0.7]);
    ensure(euclid(&v, &v).unwrap() == 0.0, "euclid: identity")?;
    let d = euclid(
        &FeatureVector(vec![1.0, 0.0]),
        &FeatureVector(vec![0.0, 1.0]),
    )
    .unwrap();
    ensure(close(d, 2f64.sqrt()), "euclid: unit axes")?;
    let d = euclid(
        &FeatureVector(vec![0.5, 0.5, 0.0]),
        &FeatureVector(vec![0.0, 0.5, 1.0]),
    )
    .unwrap();
    ensure(close(d, 1.25f64.sqrt()), "euclid: sqrt 1.25")
}

fn probability_examples() -> Result<(), String> {
    let (a, b, c) = (Node::Format(0), Node::Format(1), Node::Format(2));
    let single = Pfts::from_counts([((a, b), 3)]);
    ensure(ps(&single, a, b).unwrap() == 1.0, "ps: single edge")?;
    let two = Pfts::from_counts([((a, b), 2), ((a, c), 1)]);
    ensure(close(ps(&two, a, b).unwrap(), 2.0 / 3.0), "ps: 2/3")?;
    ensure(ps(&two, a, a).unwrap() == 0.0, "ps: absent pair")?;
    let three = Pfts::from_counts([((a, b), 2), ((a, c), 1), ((b, c), 1)]);
    ensure(pt(&three, a, b).unwrap() == 0.5, "pt: 2/4")?;
    ensure(pt(&single, a, b).unwrap() == 1.0, "pt: only transition")?;
    ensure(pt(&three, c, a).unwrap() == 0.0, "pt: absent pair")
}

fn silhouette_examples() -> Result<(), String> {
    let pts = |xs: &[f64]| {
        xs.iter()
            .map(|&x| FeatureVector(vec![x]))
            .collect::<Vec<_>>()
    };
    let v = pts(&[0.0, 0.1, 10.0, 10.1]);
    let sc = silhouette(&v, &[Some(0), Some(0), Some(1), Some(1)])
        .unwrap()
        .unwrap();
    ensure(sc > 0.97, "silhouette: separated pairs")?;
    let v = pts(&[0.0, 1.0, 2.0]);
    let sc = silhouette(&v, &[Some(0), Some(1), Some(2)]).unwrap();
    ensure(sc == Some(0.0), "silhouette: singletons")?;
    let sc = silhouette(&v, &[Some(0), Some(0), Some(0)]).unwrap();
    ensure(sc.is_none(), "silhouette: one cluster is invalid")
}

fn rand_index_examples() -> Result<(), String> {
    ensure(
        rand_index(&[4, 4, 9], &[1, 1, 2]).unwrap() == 1.0,
        "ri: relabeled",
    )?;
    ensure(
        close(rand_index(&[1, 1, 1], &[1, 1, 2]).unwrap(), 1.0 / 3.0),
        "ri: 1/3",
    )?;
    ensure(
        rand_index(&[0, 1, 2], &[0, 0, 0]).unwrap() == 0.0,
        "ri: all false negatives",
    )
}

fn smc_examples() -> Result<(), String> {
    let reference = Psm {
        states: vec![
            state("start", Role::Start),
            state("end", Role::End),
            state("c", Role::Client),
            state("s", Role::Server),
        ],
        transitions: vec![
            edge("start", "c", Some("a")),
            edge("c", "s", Some("b")),
            edge("s", "end", None),
        ],
    };
    ensure(smc(&reference, &reference) == 1.0, "smc: self")?;
    let mut inferred = reference.clone();
    inferred.states.push(state("x", Role::Server));
    inferred.transitions.push(edge("s", "x", Some("z")));
    ensure(close(smc(&inferred, &reference), 0.8), "smc: 2*2/(3+2)")?;
    let other = Psm {
        states: vec![
            state("start", Role::Start),
            state("end", Role::End),
            state("q", Role::Client),
        ],
        transitions: vec![edge("start", "q", Some("zz"))],
    };
    ensure(smc(&other, &reference) == 0.0, "smc: no matches")
}

fn tmc_examples() -> Result<(), String> {
    let mut states = vec![state("start", Role::Start), state("end", Role::End)];
    states.push(state("c1", Role::Client));
    states.push(state("s1", Role::Server));
    states.push(state("c2", Role::Client));
    let label = |to: &str| {
        Some(match to {
            "c1" => "a",
            "s1" => "b",
            _ => "c",
        })
    };
    let pairs = [
        ("c1", "s1"),
        ("s1", "c2"),
        ("c2", "c1"),
        ("c1", "c1"),
        ("s1", "s1"),
        ("c2", "c2"),
    ];
    let mut transitions = vec![edge("start", "c1", Some("a")), edge("c2", "end", None)];
    transitions.extend(pairs.iter().map(|(f, t)| edge(f, t, label(t))));
    let reference = Psm {
        states,
        transitions,
    };
    ensure(tmc(&reference, &reference) == 1.0, "tmc: self")?;
    let mut inferred = reference.clone();
    inferred.transitions.push(edge("c1", "c2", label("c2")));
    ensure(
        close(tmc(&inferred, &reference), 12.0 / 13.0),
        "tmc: one spurious edge",
    )?;
    let disjoint = reference.map_labels(|l| format!("{l}-other"));
    ensure(tmc(&disjoint, &reference) == 0.0, "tmc: disjoint")
}

fn step_clamps() -> Result<(), String> {
    let cfg = AcdaConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    for _ in 0..1000 {
        let imp = rng.gen_range(-2.0..2.0);
        let tol = rng.gen_range(0.0001..0.5);
        let eps_step = rng.gen_range(cfg.beta..=cfg.alpha);
        let minpts_step = rng.gen_range(cfg.lambda..=cfg.gamma);
        let e = next_eps_step(eps_step, imp, tol, cfg.alpha, cfg.beta);
        let m = next_minpts_step(minpts_step, imp, tol, cfg.gamma, cfg.lambda);
        if !(cfg.beta..=cfg.alpha).contains(&e) {
            return Err(format!(
                "eps step {e} from {eps_step}, imp {imp}, tol {tol}"
            ));
        }
        if !(cfg.lambda..=cfg.gamma).contains(&m) {
            return Err(format!(
                "minpts step {m} from {minpts_step}, imp {imp}, tol {tol}"
            ));
        }
        let expected = if imp > tol {
            (eps_step * (1.0 + imp)).min(cfg.alpha)
        } else {
            (eps_step * (1.0 - imp)).max(cfg.beta)
        }
        .clamp(cfg.beta, cfg.alpha);
        if !close(e, expected) {
            return Err(format!("eps step {e}, expected {expected}"));
        }
    }
    Ok(())
}

pub fn run() -> Result<String, String> {
    support_examples()?;
    mfi_examples()?;
    lcss_examples()?;
    membership_examples()?;
    feature_examples()?;
    euclid_examples()?;
    probability_examples()?;
    silhouette_examples()?;
    rand_index_examples()?;
    smc_examples()?;
    tmc_examples()?;
    step_clamps()?;
    Ok("support, mfi, lcss, membership, features, distance, ps/pt, silhouette, rand index, smc, tmc; 1000 step draws".into())
}
