//! Strong-cluster detection and snapping.
//!
//! In a terminal state relaxed spins form groups with coinciding
//! continuous components. Membership is decided by the circular distance
//! of the boundary-crossing phase (equivalently, of X on the
//! circumference-2 phase circle): spins at distance zero flip together
//! under rotation of the phase circle even when their discrete components
//! differ, which is exactly what the readout needs.

use crate::phase::{phase_distance, PhasePoint};

/// Partitions node indices by the transitive closure of
/// `phase_distance(θ_i, θ_j) ≤ tol`. Clusters are ordered by smallest
/// member index, members ascending.
pub fn detect_clusters(points: &[PhasePoint], tol: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();

    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }

    for i in 0..n {
        for j in (i + 1)..n {
            if phase_distance(points[i], points[j]) <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = clusters.len();
            clusters.push(Vec::new());
        }
        clusters[slot[root]].push(i);
    }
    clusters
}

/// Moves every member of each cluster to the cluster's common crossing
/// phase, so that regularization jitter cannot split a strong cluster
/// across a readout boundary. Each member travels by the minimal circular
/// shift; discrete components only change if that shift carries the point
/// over a boundary.
pub fn snap_clusters(points: &[PhasePoint], clusters: &[Vec<usize>]) -> Vec<PhasePoint> {
    let mut out = points.to_vec();
    for cluster in clusters {
        if cluster.len() < 2 {
            continue;
        }
        // Circular mean of the crossing phases, computed relative to the
        // first member to stay safe near the wrap.
        let base = points[cluster[0]].crossing_phase();
        let mut acc = 0.0;
        for &m in cluster {
            let mut d = (points[m].crossing_phase() - base).rem_euclid(2.0);
            if d > 1.0 {
                d -= 2.0;
            }
            acc += d;
        }
        let target = base + acc / cluster.len() as f64;
        for &m in cluster {
            let mut shift = (points[m].crossing_phase() - target).rem_euclid(2.0);
            if shift > 1.0 {
                shift -= 2.0;
            }
            out[m] = points[m].rotated(shift);
        }
    }
    out
}
