//! The phase-circle rotation symmetry and the chain of discrete
//! configurations a terminal state encodes.
//!
//! C_V2 is invariant under θ_m → θ_m + r for every m, so the terminal
//! state represents the whole one-parameter family of rotated states.
//! Sweeping r across a spin's boundary-crossing value inverts that spin's
//! discrete component; sampling σ between consecutive crossings enumerates
//! the encoded chain of binary states.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cluster::{detect_clusters, snap_clusters};
use crate::error::Result;
use crate::network::SpinNetwork;
use crate::objective::discrete_cut;
use crate::phase::{PhasePoint, Spin};

/// Tolerance for merging coincident critical rotations.
const CRITICAL_MERGE_TOL: f64 = 1e-12;

/// Uniform rotation of the phase circle: θ_m ← wrap(θ_m + r) for every
/// node, clamped and free alike.
pub fn rotate(points: &[PhasePoint], r: f64) -> Vec<PhasePoint> {
    points.iter().map(|p| p.rotated(r)).collect()
}

/// Rotation parameters in (0, 4) at which some spin crosses a σ-boundary,
/// sorted and deduplicated within 1e-12. Each spin contributes two
/// crossings per full rotation of the parameter range 4.
pub fn critical_rotations(points: &[PhasePoint]) -> Vec<f64> {
    let mut out = Vec::with_capacity(points.len() * 2);
    for p in points {
        let phase = p.crossing_phase();
        out.push(phase);
        if phase + 2.0 < 4.0 {
            out.push(phase + 2.0);
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    out.dedup_by(|a, b| (*a - *b).abs() <= CRITICAL_MERGE_TOL);
    out
}

/// One sampled configuration of the readout chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainEntry {
    /// Rotation at which `sigma` was sampled (an interval midpoint;
    /// 0 for the base entry).
    pub r: f64,
    pub sigma: Vec<Spin>,
    /// Nodes newly inverted relative to the previous entry.
    pub flipped: BTreeSet<usize>,
}

/// The ordered chain of discrete configurations read off a state by
/// rotating the phase circle through [0, 4).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReadout {
    pub base_sigma: Vec<Spin>,
    pub entries: Vec<ChainEntry>,
}

impl ChainReadout {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn sigma_at(points: &[PhasePoint], r: f64) -> Vec<Spin> {
    points.iter().map(|p| p.rotated(r).sigma()).collect()
}

/// Enumerates the readout chain of `points`. Clusters within
/// `cluster_tol` are first snapped to a common representative so that
/// regularization jitter cannot split a strong cluster across a boundary;
/// σ is then sampled at the midpoint of every interval between
/// consecutive critical rotations.
pub fn chain_readout(points: &[PhasePoint], cluster_tol: f64) -> ChainReadout {
    let clusters = detect_clusters(points, cluster_tol);
    let snapped = snap_clusters(points, &clusters);

    let criticals = critical_rotations(&snapped);
    let base_sigma = sigma_at(&snapped, 0.0);

    let mut entries = vec![ChainEntry { r: 0.0, sigma: base_sigma.clone(), flipped: BTreeSet::new() }];
    let mut previous = base_sigma.clone();
    for (i, &lo) in criticals.iter().enumerate() {
        let hi = criticals.get(i + 1).copied().unwrap_or(4.0);
        if hi - lo <= CRITICAL_MERGE_TOL {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let sigma = sigma_at(&snapped, mid);
        let flipped: BTreeSet<usize> = sigma
            .iter()
            .zip(&previous)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| i)
            .collect();
        if flipped.is_empty() {
            continue;
        }
        previous = sigma.clone();
        entries.push(ChainEntry { r: mid, sigma, flipped });
    }

    // The window past the last crossing wraps around to r = 0; it is the
    // base entry seen again, not a new chain position.
    if entries.len() > 1 && entries.last().map(|e| &e.sigma) == Some(&base_sigma) {
        entries.pop();
    }

    ChainReadout { base_sigma, entries }
}

/// Readout cut invariance: the discrete cut of every chain entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CutInvariance {
    pub min_cut: f64,
    pub max_cut: f64,
    pub invariant: bool,
}

/// Evaluates `discrete_cut` on every readout entry. For converged,
/// unclamped, strictly quadratic networks all values coincide; clamped
/// encodings may lose cut weight under rotation.
pub fn verify_cut_invariance(
    net: &SpinNetwork,
    points: &[PhasePoint],
    cluster_tol: f64,
    tol_abs: f64,
) -> Result<CutInvariance> {
    let readout = chain_readout(points, cluster_tol);
    let mut min_cut = f64::INFINITY;
    let mut max_cut = f64::NEG_INFINITY;
    for entry in &readout.entries {
        let cut = discrete_cut(net, &entry.sigma)?;
        min_cut = min_cut.min(cut);
        max_cut = max_cut.max(cut);
    }
    Ok(CutInvariance { min_cut, max_cut, invariant: max_cut - min_cut <= tol_abs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::complete_graph;
    use crate::objective::relaxed_cut;
    use crate::phase::Spin;

    fn pt(sigma: Spin, x: f64) -> PhasePoint {
        PhasePoint::from_parts(sigma, x)
    }

    /// The Figure-1 style K5 terminal state: clusters {0}, {1,2}, {3,4}
    /// with base σ = (−1, 1, −1, −1, 1).
    fn k5_terminal() -> Vec<PhasePoint> {
        vec![pt(-1, 0.8), pt(1, 0.4), pt(-1, 0.4), pt(-1, -0.3), pt(1, -0.3)]
    }

    #[test]
    fn rotation_identities() {
        let pts = k5_terminal();
        let same = rotate(&pts, 0.0);
        assert_eq!(
            pts.iter().map(PhasePoint::theta).collect::<Vec<_>>(),
            same.iter().map(PhasePoint::theta).collect::<Vec<_>>()
        );

        let inverted = rotate(&pts, 2.0);
        for (p, q) in pts.iter().zip(&inverted) {
            assert_eq!(q.sigma(), -p.sigma());
            assert!((q.continuous() - p.continuous()).abs() < 1e-12);
        }

        let full = rotate(&pts, 4.0);
        for (p, q) in pts.iter().zip(&full) {
            assert!((q.theta() - p.theta()).abs() < 1e-12);
        }
    }

    #[test]
    fn single_spin_crossings() {
        let pts = [PhasePoint::new(0.5)];
        let crossings = critical_rotations(&pts);
        assert_eq!(crossings.len(), 2);
        assert!((crossings[0] - 1.5).abs() < 1e-12);
        assert!((crossings[1] - 3.5).abs() < 1e-12);
    }

    #[test]
    fn coincident_cluster_crossings_merge() {
        let pts = [pt(1, 0.25), pt(-1, 0.25), pt(1, -0.5)];
        let crossings = critical_rotations(&pts);
        // Two distinct crossing phases, each appearing twice per range 4.
        assert_eq!(crossings.len(), 4);
    }

    #[test]
    fn k5_readout_reproduces_the_rotation_sequence() {
        let pts = k5_terminal();
        let readout = chain_readout(&pts, 1e-9);
        assert_eq!(readout.base_sigma, vec![-1, 1, -1, -1, 1]);
        let sigmas: Vec<Vec<Spin>> = readout.entries.iter().map(|e| e.sigma.clone()).collect();
        assert_eq!(sigmas.len(), 6);
        assert_eq!(sigmas[1], vec![1, 1, -1, -1, 1]);
        assert_eq!(sigmas[2], vec![1, -1, 1, -1, 1]);
        assert_eq!(sigmas[3], vec![1, -1, 1, 1, -1]);
        // Full inversion is reached exactly once the first half-period of
        // flips completes; the chain is circular, so rotation 4 is the
        // base entry again.
        let inv: Vec<Spin> = readout.base_sigma.iter().map(|s| -s).collect();
        assert_eq!(sigmas[3], inv);
        assert!(readout.entries[3].r < 2.0 && readout.entries[4].r > 2.0);

        // Three rotations below 2 reproduce the printed sequence.
        let criticals = critical_rotations(&pts);
        assert_eq!(criticals.iter().filter(|&&r| r < 2.0).count(), 3);
    }

    #[test]
    fn one_cluster_gives_base_and_inversion_only() {
        let pts = [pt(1, 0.3), pt(-1, 0.3), pt(1, 0.3)];
        let readout = chain_readout(&pts, 1e-9);
        assert_eq!(readout.entries.len(), 2);
        let inv: Vec<Spin> = readout.base_sigma.iter().map(|s| -s).collect();
        assert_eq!(readout.entries[1].sigma, inv);
    }

    #[test]
    fn each_node_flips_once_per_half_period() {
        let pts = k5_terminal();
        let readout = chain_readout(&pts, 1e-9);
        let mut seen = BTreeSet::new();
        for entry in readout.entries.iter().filter(|e| e.r < 2.0) {
            for &node in &entry.flipped {
                assert!(seen.insert(node), "node {node} flipped twice before r = 2");
            }
        }
    }

    #[test]
    fn consecutive_entries_differ_exactly_on_flipped() {
        let pts = k5_terminal();
        let readout = chain_readout(&pts, 1e-9);
        for pair in readout.entries.windows(2) {
            for i in 0..pair[0].sigma.len() {
                let changed = pair[0].sigma[i] != pair[1].sigma[i];
                assert_eq!(changed, pair[1].flipped.contains(&i));
            }
        }
    }

    #[test]
    fn k5_readout_cuts_are_invariant() {
        let net = complete_graph(5);
        let pts = k5_terminal();
        let inv = verify_cut_invariance(&net, &pts, 1e-9, 1e-9).unwrap();
        assert!(inv.invariant);
        assert_eq!(inv.min_cut, 6.0);
        assert_eq!(inv.max_cut, 6.0);
    }

    #[test]
    fn single_node_is_trivially_invariant() {
        let net = SpinNetwork::new(1);
        let inv = verify_cut_invariance(&net, &[PhasePoint::new(0.3)], 1e-9, 0.0).unwrap();
        assert!(inv.invariant);
    }

    #[test]
    fn relaxed_cut_is_rotation_invariant() {
        let net = complete_graph(5);
        let pts = k5_terminal();
        let base = relaxed_cut(&net, &pts).unwrap();
        for k in 0..40 {
            let r = 0.1 * k as f64;
            let rotated = rotate(&pts, r);
            let value = relaxed_cut(&net, &rotated).unwrap();
            assert!((value - base).abs() < 1e-9, "r = {r}: {value} vs {base}");
        }
    }

    #[test]
    fn readout_serializes_to_json() {
        let readout = chain_readout(&k5_terminal(), 1e-9);
        let text = readout.to_json().unwrap();
        let back = ChainReadout::from_json(&text).unwrap();
        assert_eq!(back, readout);
    }
}
