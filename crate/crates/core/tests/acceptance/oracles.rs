use std::collections::BTreeMap;
use std::time::Instant;

use protoinfer::format_cluster::{lcss_len, silhouette, FeatureVector};
use protoinfer::metrics::rand_index;
use protoinfer::mfi::{extract_mfi, MfiConfig, MfiError};
use protoinfer::session_cluster::{nw_similarity, AlignmentParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INSTANCES: usize = 250;

fn bytes(rng: &mut ChaCha8Rng, max_len: usize, alphabet: u8) -> Vec<u8> {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| rng.gen_range(0..alphabet)).collect()
}

fn is_substring(needle: &[u8], hay: &[u8]) -> bool {
    needle.is_empty() || hay.windows(needle.len()).any(|w| w == needle)
}

fn lcss_oracle(a: &[u8], b: &[u8]) -> usize {
    let mut best = 0;
    for i in 0..a.len() {
        for j in i + 1..=a.len() {
            if j - i > best && is_substring(&a[i..j], b) {
                best = j - i;
            }
        }
    }
    best
}

/// Every global alignment enumerated; best (score, matches) kept.
fn nw_exhaustive(a: &[u8], b: &[u8], p: &AlignmentParams) -> (i64, usize) {
    fn go(
        a: &[u8],
        b: &[u8],
        p: &AlignmentParams,
        score: i64,
        matches: usize,
        best: &mut (i64, usize),
    ) {
        if a.is_empty() && b.is_empty() {
            *best = (*best).max((score, matches));
            return;
        }
        if let (Some(x), Some(y)) = (a.first(), b.first()) {
            let same = x == y;
            let s = if same {
                p.match_score
            } else {
                p.mismatch_score
            } as i64;
            go(
                &a[1..],
                &b[1..],
                p,
                score + s,
                matches + usize::from(same),
                best,
            );
        }
        if !a.is_empty() {
            go(&a[1..], b, p, score + p.gap_score as i64, matches, best);
        }
        if !b.is_empty() {
            go(a, &b[1..], p, score + p.gap_score as i64, matches, best);
        }
    }
    let mut best = (i64::MIN, 0);
    go(a, b, p, 0, 0, &mut best);
    best
}

/// Suffix recursion with memoization.
fn nw_memo(a: &[u8], b: &[u8], p: &AlignmentParams) -> (i64, usize) {
    fn go(
        i: usize,
        j: usize,
        a: &[u8],
        b: &[u8],
        p: &AlignmentParams,
        memo: &mut BTreeMap<(usize, usize), (i64, usize)>,
    ) -> (i64, usize) {
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let gap = p.gap_score as i64;
        let v = if i == a.len() {
            ((b.len() - j) as i64 * gap, 0)
        } else if j == b.len() {
            ((a.len() - i) as i64 * gap, 0)
        } else {
            let same = a[i] == b[j];
            let (ds, dm) = go(i + 1, j + 1, a, b, p, memo);
            let diag = (
                ds + if same {
                    p.match_score
                } else {
                    p.mismatch_score
                } as i64,
                dm + usize::from(same),
            );
            let (us, um) = go(i + 1, j, a, b, p, memo);
            let (ls, lm) = go(i, j + 1, a, b, p, memo);
            diag.max((us + gap, um)).max((ls + gap, lm))
        };
        memo.insert((i, j), v);
        v
    }
    go(0, 0, a, b, p, &mut BTreeMap::new())
}

fn ri_oracle(pred: &[usize], truth: &[usize]) -> f64 {
    let n = pred.len();
    let mut agree = 0usize;
    let mut total = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            total += 1;
            if (pred[i] == pred[j]) == (truth[i] == truth[j]) {
                agree += 1;
            }
        }
    }
    agree as f64 / total as f64
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn silhouette_oracle(points: &[Vec<f64>], labels: &[Option<usize>]) -> Option<f64> {
    let mut clusters: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        if let Some(l) = l {
            clusters.entry(*l).or_default().push(i);
        }
    }
    if clusters.len() < 2 {
        return None;
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (&c, members) in &clusters {
        for &i in members {
            count += 1;
            if members.len() == 1 {
                continue;
            }
            let a = members
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| dist(&points[i], &points[j]))
                .sum::<f64>()
                / (members.len() - 1) as f64;
            let b = clusters
                .iter()
                .filter(|(&o, _)| o != c)
                .map(|(_, other)| {
                    other
                        .iter()
                        .map(|&j| dist(&points[i], &points[j]))
                        .sum::<f64>()
                        / other.len() as f64
                })
                .fold(f64::INFINITY, f64::min);
            let m = a.max(b);
            if m > 0.0 {
                sum += (b - a) / m;
            }
        }
    }
    Some(sum / count as f64)
}

fn mfi_oracle(messages: &[Vec<u8>], ms: f64) -> Vec<(Vec<u8>, f64)> {
    let n = messages.len();
    let mut frequent: Vec<(Vec<u8>, f64)> = Vec::new();
    for len in [1usize, 2, 4, 8] {
        let mut candidates: Vec<Vec<u8>> = messages
            .iter()
            .flat_map(|m| m.windows(len).map(<[u8]>::to_vec).collect::<Vec<_>>())
            .collect();
        candidates.sort();
        candidates.dedup();
        for c in candidates {
            let count = messages.iter().filter(|m| is_substring(&c, m)).count();
            let support = count as f64 / n as f64;
            if support >= ms {
                frequent.push((c, support));
            }
        }
    }
    let all: Vec<Vec<u8>> = frequent.iter().map(|(b, _)| b.clone()).collect();
    frequent.retain(|(b, _)| !all.iter().any(|o| o != b && is_substring(b, o)));
    frequent.sort_by(|x, y| {
        y.0.len()
            .cmp(&x.0.len())
            .then(y.1.total_cmp(&x.1))
            .then(x.0.cmp(&y.0))
    });
    frequent
}

fn check_lcss(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..INSTANCES {
        let a = bytes(rng, 16, 4);
        let b = bytes(rng, 16, 4);
        let (got, want) = (lcss_len(&a, &b), lcss_oracle(&a, &b));
        if got != want {
            return Err(format!("lcss {a:?} {b:?}: {got} vs {want}"));
        }
    }
    Ok(())
}

fn check_nw(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let params = [
        AlignmentParams::default(),
        AlignmentParams {
            match_score: 1,
            mismatch_score: 0,
            gap_score: -2,
        },
    ];
    for k in 0..INSTANCES {
        let p = &params[k % params.len()];
        let short = k % 2 == 0;
        let a = bytes(rng, if short { 6 } else { 16 }, 3);
        let b = bytes(rng, if short { 6 } else { 16 }, 3);
        let want = if short {
            nw_exhaustive(&a, &b, p)
        } else {
            nw_memo(&a, &b, p)
        };
        let got = nw_similarity(&a, &b, p);
        if got != want.1 {
            return Err(format!("nw {a:?} {b:?}: {got} vs {}", want.1));
        }
    }
    Ok(())
}

fn check_ri(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..INSTANCES {
        let n = rng.gen_range(2..=200);
        let kp = rng.gen_range(1..=6);
        let kt = rng.gen_range(1..=6);
        let pred: Vec<usize> = (0..n).map(|_| rng.gen_range(0..kp)).collect();
        let truth: Vec<usize> = (0..n).map(|_| rng.gen_range(0..kt)).collect();
        let got = rand_index(&pred, &truth).map_err(|e| e.to_string())?;
        let want = ri_oracle(&pred, &truth);
        if (got - want).abs() > 1e-9 {
            return Err(format!("rand index n={n}: {got} vs {want}"));
        }
    }
    Ok(())
}

fn check_silhouette(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..INSTANCES {
        let n = rng.gen_range(2..=60);
        let d = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=5);
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| (rng.gen_range(0..8) as f64) / 4.0).collect())
            .collect();
        let labels: Vec<Option<usize>> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.1) {
                    None
                } else {
                    Some(rng.gen_range(0..k))
                }
            })
            .collect();
        let vectors: Vec<FeatureVector> = points.iter().cloned().map(FeatureVector).collect();
        let got = silhouette(&vectors, &labels).map_err(|e| e.to_string())?;
        let want = silhouette_oracle(&points, &labels);
        let ok = match (got, want) {
            (Some(g), Some(w)) => (g - w).abs() <= 1e-9,
            (None, None) => true,
            _ => false,
        };
        if !ok {
            return Err(format!("silhouette n={n}: {got:?} vs {want:?}"));
        }
    }
    Ok(())
}

fn check_mfi(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let mut nonempty = 0;
    for _ in 0..INSTANCES {
        let n = rng.gen_range(1..=50);
        let alphabet = rng.gen_range(2..=6);
        let magic: Vec<u8> = (0..rng.gen_range(0..=8))
            .map(|_| rng.gen_range(0..alphabet))
            .collect();
        let messages: Vec<Vec<u8>> = (0..n)
            .map(|_| {
                let mut m = bytes(rng, 24, alphabet);
                if rng.gen_bool(0.6) {
                    let at = rng.gen_range(0..=m.len());
                    m.splice(at..at, magic.iter().copied());
                }
                m.truncate(32);
                m
            })
            .collect();
        let ms = rng.gen_range(0.2..0.9);
        let want = mfi_oracle(&messages, ms);
        match extract_mfi(&messages, &MfiConfig::new(ms).unwrap()) {
            Ok(items) => {
                let got: Vec<(Vec<u8>, f64)> =
                    items.into_iter().map(|i| (i.bytes, i.support)).collect();
                if got != want {
                    return Err(format!("mfi ms={ms}: {got:?} vs {want:?}"));
                }
                nonempty += 1;
            }
            Err(MfiError::EmptyMfi(_)) if want.is_empty() => {}
            Err(e) => return Err(format!("mfi ms={ms}: {e}, oracle {want:?}")),
        }
    }
    if nonempty < INSTANCES / 2 {
        return Err(format!("only {nonempty} corpora had frequent items"));
    }
    Ok(())
}

pub fn run() -> Result<String, String> {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    check_lcss(&mut rng)?;
    check_nw(&mut rng)?;
    check_ri(&mut rng)?;
    check_silhouette(&mut rng)?;
    check_mfi(&mut rng)?;
    let secs = t.elapsed().as_secs_f64();
    if secs >= 30.0 {
        return Err(format!("took {secs:.1}s"));
    }
    Ok(format!("5 kernels x {INSTANCES} instances"))
}
