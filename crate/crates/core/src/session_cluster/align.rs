use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlignmentParams {
    pub match_score: i32,
    pub mismatch_score: i32,
    pub gap_score: i32,
}

impl Default for AlignmentParams {
    fn default() -> Self {
        AlignmentParams {
            match_score: 2,
            mismatch_score: -1,
            gap_score: -1,
        }
    }
}

impl AlignmentParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.match_score <= self.mismatch_score || self.match_score <= self.gap_score {
            return Err(format!(
                "match score {} must exceed mismatch {} and gap {}",
                self.match_score, self.mismatch_score, self.gap_score
            ));
        }
        Ok(())
    }
}

/// Global Needleman-Wunsch alignment; returns the number of aligned columns
/// holding the same token on both sides.
///
/// Among alignments of maximal score, the one with the most matching columns
/// is taken, so the result does not depend on traceback order.
pub fn nw_similarity<T: PartialEq>(a: &[T], b: &[T], p: &AlignmentParams) -> usize {
    // (score, matches), maximized lexicographically
    let w = b.len() + 1;
    let mut prev: Vec<(i64, usize)> = (0..w).map(|j| (j as i64 * p.gap_score as i64, 0)).collect();
    let mut cur = vec![(0i64, 0usize); w];
    for (i, x) in a.iter().enumerate() {
        cur[0] = ((i as i64 + 1) * p.gap_score as i64, 0);
        for (j, y) in b.iter().enumerate() {
            let same = x == y;
            let diag = (
                prev[j].0
                    + if same {
                        p.match_score
                    } else {
                        p.mismatch_score
                    } as i64,
                prev[j].1 + usize::from(same),
            );
            let up = (prev[j + 1].0 + p.gap_score as i64, prev[j + 1].1);
            let left = (cur[j].0 + p.gap_score as i64, cur[j].1);
            cur[j + 1] = diag.max(up).max(left);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()].1
}
