//! Dense symmetric distance matrices and the silhouette coefficient shared by
//! format clustering and session clustering.

use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds the matrix from a symmetric distance function; rows are
    /// computed in parallel.
    pub fn from_fn<F>(n: usize, dist: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| if i < j { dist(i, j) } else { 0.0 })
                    .collect()
            })
            .collect();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = rows[i][j];
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        DistanceMatrix { n, data }
    }

    /// Panics if `rows` is not square.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        assert!(
            rows.iter().all(|r| r.len() == n),
            "distance matrix must be square"
        );
        DistanceMatrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

/// Mean silhouette over points with `Some` label.
///
/// `None` labels (noise) are excluded entirely. Points in singleton clusters
/// contribute 0, as do points where both mean distances are 0. Returns `None`
/// when fewer than two clusters remain.
pub fn silhouette(dist: &DistanceMatrix, labels: &[Option<usize>]) -> Option<f64> {
    assert_eq!(dist.len(), labels.len(), "labels must cover every point");
    let k = labels.iter().flatten().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0usize; k];
    for l in labels.iter().flatten() {
        sizes[*l] += 1;
    }
    if sizes.iter().filter(|&&s| s > 0).count() < 2 {
        return None;
    }

    let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i].is_some()).collect();
    let total: f64 = members
        .par_iter()
        .map(|&i| {
            let own = labels[i].expect("member");
            if sizes[own] == 1 {
                return 0.0;
            }
            let mut sums = vec![0.0; k];
            let row = dist.row(i);
            for &j in &members {
                if j != i {
                    sums[labels[j].expect("member")] += row[j];
                }
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..k)
                .filter(|&c| c != own && sizes[c] > 0)
                .map(|c| sums[c] / sizes[c] as f64)
                .fold(f64::INFINITY, f64::min);
            let denom = a.max(b);
            if denom == 0.0 {
                0.0
            } else {
                (b - a) / denom
            }
        })
        .sum();
    Some(total / members.len() as f64)
}
