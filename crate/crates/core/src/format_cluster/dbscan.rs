use std::collections::VecDeque;

use crate::distance::DistanceMatrix;

/// Per-point neighbor lists sorted by distance, so a radius query for any
/// `eps` is a binary search. Built once and shared by every grid cell.
pub struct NeighborIndex {
    sorted: Vec<Vec<(f64, u32)>>,
}

impl NeighborIndex {
    pub fn new(dist: &DistanceMatrix) -> Self {
        use rayon::prelude::*;
        let n = dist.len();
        let sorted = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row: Vec<(f64, u32)> = dist
                    .row(i)
                    .iter()
                    .enumerate()
                    .map(|(j, &d)| (d, j as u32))
                    .collect();
                row.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                row
            })
            .collect();
        NeighborIndex { sorted }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Points within `eps` of `i`, itself included.
    pub fn within(&self, i: usize, eps: f64) -> &[(f64, u32)] {
        let row = &self.sorted[i];
        &row[..row.partition_point(|&(d, _)| d <= eps)]
    }
}

/// Density-based clustering. A point is core when at least `minpts` points
/// (itself included) lie within `eps`. Cluster ids are dense and assigned in
/// first-touch order over point indices; unreachable points are `None`.
pub fn dbscan_indexed(index: &NeighborIndex, eps: f64, minpts: usize) -> Vec<Option<usize>> {
    let n = index.len();
    let mut labels: Vec<Option<usize>> = vec![None; n];
    let mut visited = vec![false; n];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for i in 0..n {
        if visited[i] {
            continue;
        }
        visited[i] = true;
        let seeds = index.within(i, eps);
        if seeds.len() < minpts {
            continue;
        }
        let cluster = next;
        next += 1;
        labels[i] = Some(cluster);
        queue.extend(seeds.iter().map(|&(_, j)| j as usize));
        while let Some(j) = queue.pop_front() {
            if labels[j].is_none() {
                labels[j] = Some(cluster);
            }
            if visited[j] {
                continue;
            }
            visited[j] = true;
            let nb = index.within(j, eps);
            if nb.len() >= minpts {
                queue.extend(nb.iter().map(|&(_, k)| k as usize));
            }
        }
    }
    labels
}

pub fn dbscan_matrix(dist: &DistanceMatrix, eps: f64, minpts: usize) -> Vec<Option<usize>> {
    dbscan_indexed(&NeighborIndex::new(dist), eps, minpts)
}
