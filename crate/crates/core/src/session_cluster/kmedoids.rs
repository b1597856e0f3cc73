use crate::distance::DistanceMatrix;

pub const MAX_ROUNDS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct KMedoids {
    /// Cluster index per point, in `0..k`.
    pub labels: Vec<usize>,
    /// Point index of each cluster's medoid.
    pub medoids: Vec<usize>,
    /// Total distance to assigned medoid after each assignment pass.
    pub objective: Vec<f64>,
}

/// Greedy build: the point with minimal total distance first, then
/// repeatedly the point farthest from its nearest chosen medoid. Ties go to
/// the lower index.
pub fn greedy_init(dist: &DistanceMatrix, k: usize) -> Vec<usize> {
    let n = dist.len();
    let mut medoids = Vec::with_capacity(k);
    if k == 0 || n == 0 {
        return medoids;
    }
    let first = (0..n)
        .map(|i| (dist.row(i).iter().sum::<f64>(), i))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .expect("non-empty")
        .1;
    medoids.push(first);
    let mut nearest: Vec<f64> = (0..n).map(|i| dist.get(i, first)).collect();
    let mut chosen = vec![false; n];
    chosen[first] = true;
    while medoids.len() < k {
        let mut pick: Option<usize> = None;
        for i in (0..n).filter(|&i| !chosen[i]) {
            if pick.is_none_or(|p| nearest[i] > nearest[p]) {
                pick = Some(i);
            }
        }
        let m = pick.expect("k <= n");
        chosen[m] = true;
        medoids.push(m);
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(dist.get(i, m));
        }
    }
    medoids
}

fn assign(dist: &DistanceMatrix, medoids: &[usize]) -> (Vec<usize>, f64) {
    let mut labels = Vec::with_capacity(dist.len());
    let mut total = 0.0;
    for i in 0..dist.len() {
        let c = match medoids.iter().position(|&m| m == i) {
            Some(own) => own,
            None => {
                let mut best = 0;
                for c in 1..medoids.len() {
                    if dist.get(i, medoids[c]) < dist.get(i, medoids[best]) {
                        best = c;
                    }
                }
                best
            }
        };
        total += dist.get(i, medoids[c]);
        labels.push(c);
    }
    (labels, total)
}

/// PAM-style alternation of assignment and per-cluster medoid update until
/// the medoids stop changing or [`MAX_ROUNDS`] is reached.
///
/// Initialization is deterministic; `seed` is accepted for API stability and
/// does not currently influence the result.
pub fn kmedoids(dist: &DistanceMatrix, k: usize, seed: u64) -> Result<KMedoids, String> {
    let _ = seed;
    let n = dist.len();
    if k == 0 || k > n {
        return Err(format!("k = {k} outside 1..={n}"));
    }
    let mut medoids = greedy_init(dist, k);
    let mut objective = Vec::new();
    let (mut labels, total) = assign(dist, &medoids);
    objective.push(total);
    for _ in 0..MAX_ROUNDS {
        let mut changed = false;
        for (c, medoid) in medoids.iter_mut().enumerate() {
            let members: Vec<usize> = (0..n).filter(|&i| labels[i] == c).collect();
            let cost = |m: usize| members.iter().map(|&j| dist.get(m, j)).sum::<f64>();
            let mut best = *medoid;
            let mut best_cost = cost(best);
            for &m in &members {
                let c = cost(m);
                if c < best_cost {
                    best = m;
                    best_cost = c;
                }
            }
            if best != *medoid {
                *medoid = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let (l, total) = assign(dist, &medoids);
        labels = l;
        objective.push(total);
    }
    Ok(KMedoids {
        labels,
        medoids,
        objective,
    })
}
