//! Branch encodings: clamped placements of input spins that make one
//! relaxation compute a whole family of argument sets.
//!
//! Input groups are clusters of co-clamped spins sharing one position on
//! the phase circle. Groups listed in the flip order occupy distinct,
//! evenly spaced positions across the placement arc, first listed nearest
//! the top so it crosses the σ-boundary first as the readout rotation
//! grows; all remaining groups share one base position at the bottom of
//! the arc and cross last. Each boundary crossing inverts one group, so
//! the readout intervals between consecutive crossings enumerate the
//! encoded branches.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::adder::{adder_bits, carry_node, sum_node, x_node, y_node};
use crate::cluster::snap_clusters;
use crate::dynamics::TerminalState;
use crate::error::{Error, Result};
use crate::gates::GateSpec;
use crate::network::SpinNetwork;
use crate::oracle::truth;
use crate::phase::{PhasePoint, Spin};

/// Effective argument set of one adder branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchArgs {
    pub x: u64,
    pub y: u64,
    pub c: u8,
}

impl BranchArgs {
    pub fn sum(&self) -> u64 {
        u64::from(self.c) + self.x + self.y
    }
}

/// One chain position of an encoded adder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchSpec {
    pub position: usize,
    /// Input-group positions inverted on entering this branch (empty for
    /// the base branch). Position 0 is the carry-in group, position k the
    /// k-th bit pair.
    pub newly_flipped: Vec<usize>,
    /// Cumulative set of inverted positions relative to the base.
    pub flips: BTreeSet<usize>,
    pub args: BranchArgs,
    /// c' + x' + y' as an (N+1)-bit integer.
    pub expected_sum: u64,
}

/// Placement of the input groups and the branch chain it encodes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchEncoding {
    pub n_bits: usize,
    /// Flip positions as requested, first traversed first.
    pub order: Vec<usize>,
    pub arc: (f64, f64),
    /// (input-group position, theta offset) for every group, listed
    /// groups first in flip order, unlisted groups sharing the last
    /// entry's offset.
    pub placement: Vec<(usize, f64)>,
    /// Groups of input positions inverted at each boundary crossing of
    /// the first half-period, in crossing order.
    pub flip_sequence: Vec<Vec<usize>>,
    /// Readout interval per chain position over the full double rotation.
    pub windows: Vec<(f64, f64)>,
    /// One entry per chain position (full cycle; the first half are the
    /// forward branches, the second half their inversion mirrors).
    pub branches: Vec<BranchSpec>,
}

impl BranchEncoding {
    /// Chain positions before the first group flips back: the branches
    /// carrying independent results.
    pub fn forward_branches(&self) -> &[BranchSpec] {
        &self.branches[..self.branches.len() / 2]
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// The full branch chain of an encoding, one entry per readout window.
pub fn enumerate_branches(enc: &BranchEncoding) -> &[BranchSpec] {
    &enc.branches
}

fn apply_group_flip(args: &mut BranchArgs, position: usize) {
    if position == 0 {
        args.c ^= 1;
    } else {
        let bit = 1u64 << (position - 1);
        args.x ^= bit;
        args.y ^= bit;
    }
}

/// Evenly spaced offsets across `arc` for `listed` groups plus one base
/// slot at the arc's low end.
fn spread_offsets(arc: (f64, f64), listed: usize) -> Vec<f64> {
    let (lo, hi) = arc;
    let span = hi - lo;
    let slots = listed + 1;
    (1..=listed)
        .map(|j| lo + span * (slots - j) as f64 / slots as f64)
        .collect()
}

/// Windows between consecutive boundary crossings over [0, 4). The
/// stretch after the last crossing wraps around into window 0.
fn windows_from_crossings(crossings: &[f64]) -> Vec<(f64, f64)> {
    let mut windows = Vec::with_capacity(crossings.len());
    windows.push((0.0, crossings[0]));
    for pair in crossings.windows(2) {
        windows.push((pair[0], pair[1]));
    }
    windows
}

/// Clamps the adder's input spins to encode (x, y, c_in) at rotation 0
/// with the groups in `order` placed for branch-parallel readout.
/// Position 0 denotes the carry-in group; position k the pair (x_k, y_k).
pub fn encode_branches(
    adder: &GateSpec,
    x: u64,
    y: u64,
    c_in: u8,
    order: &[usize],
    arc: (f64, f64),
) -> Result<(SpinNetwork, BranchEncoding)> {
    let n = adder_bits(adder)?;
    if n < 64 && (x >> n != 0 || y >> n != 0) {
        return Err(Error::InvalidInput(format!("inputs exceed {n} bits")));
    }
    if c_in > 1 {
        return Err(Error::InvalidInput("carry-in must be a bit".into()));
    }
    if !(0.0 < arc.0 && arc.0 < arc.1 && arc.1 < 2.0) {
        return Err(Error::InvalidInput(format!("arc {arc:?} must satisfy 0 < lo < hi < 2")));
    }
    let mut seen = BTreeSet::new();
    for &p in order {
        if p > n {
            return Err(Error::InvalidInput(format!("flip position {p} exceeds {n}")));
        }
        if !seen.insert(p) {
            return Err(Error::InvalidInput(format!("duplicate flip position {p}")));
        }
    }

    let listed_offsets = spread_offsets(arc, order.len());
    let unlisted: Vec<usize> = (0..=n).filter(|p| !seen.contains(p)).collect();
    let base_offset = arc.0;

    let mut placement: Vec<(usize, f64)> = order
        .iter()
        .zip(&listed_offsets)
        .map(|(&p, &o)| (p, o))
        .collect();
    placement.extend(unlisted.iter().map(|&p| (p, base_offset)));

    // Clamp the inputs: spin value from the encoded bits, continuous
    // component from the group offset.
    let mut net = adder.net.clone();
    let spin_of = |bit: u64| if bit != 0 { 1i8 } else { -1 };
    for &(p, offset) in &placement {
        let x_part = offset - 1.0;
        if p == 0 {
            net.clamp(carry_node(0), PhasePoint::from_parts(spin_of(c_in.into()), x_part))?;
        } else {
            let bit = 1u64 << (p - 1);
            net.clamp(x_node(p), PhasePoint::from_parts(spin_of(x & bit), x_part))?;
            net.clamp(y_node(p), PhasePoint::from_parts(spin_of(y & bit), x_part))?;
        }
    }

    // Boundary crossings: listed groups in order, then the base cluster,
    // then the same sequence again in the second half-period.
    let mut flip_sequence: Vec<Vec<usize>> = order.iter().map(|&p| vec![p]).collect();
    if !unlisted.is_empty() {
        flip_sequence.push(unlisted.clone());
    }
    let mut half_crossings: Vec<f64> = listed_offsets.iter().map(|&o| 2.0 - o).collect();
    if !unlisted.is_empty() {
        half_crossings.push(2.0 - base_offset);
    }
    let mut crossings = half_crossings.clone();
    crossings.extend(half_crossings.iter().map(|c| c + 2.0));
    let windows = windows_from_crossings(&crossings);

    let mut branches = Vec::with_capacity(windows.len());
    let mut args = BranchArgs { x, y, c: c_in };
    let mut flips: BTreeSet<usize> = BTreeSet::new();
    for position in 0..windows.len() {
        let newly_flipped = if position == 0 {
            Vec::new()
        } else {
            flip_sequence[(position - 1) % flip_sequence.len()].clone()
        };
        for &p in &newly_flipped {
            apply_group_flip(&mut args, p);
            if !flips.remove(&p) {
                flips.insert(p);
            }
        }
        branches.push(BranchSpec {
            position,
            newly_flipped,
            flips: flips.clone(),
            args,
            expected_sum: args.sum(),
        });
    }

    let encoding = BranchEncoding {
        n_bits: n,
        order: order.to_vec(),
        arc,
        placement,
        flip_sequence,
        windows,
        branches,
    };
    Ok((net, encoding))
}

/// Decoded result of one branch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchOutcome {
    pub position: usize,
    pub flips: BTreeSet<usize>,
    pub observed_sum: u64,
    pub expected_sum: u64,
    pub correct: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecodeReport {
    pub outcomes: Vec<BranchOutcome>,
    /// False when the terminal state had not converged; the flags are
    /// still computed but carry no guarantee.
    pub certified: bool,
}

impl DecodeReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn read_bit(points: &[PhasePoint], node: usize, r: f64) -> u64 {
    u64::from(points[node].rotated(r).sigma() > 0)
}

/// Reads every branch out of a terminal state: rotate to the midpoint of
/// each readout interval, collect the sum and carry-out bits, and compare
/// with the branch arithmetic.
pub fn decode_outputs(
    term: &TerminalState,
    enc: &BranchEncoding,
    adder: &GateSpec,
) -> Result<DecodeReport> {
    let n = adder_bits(adder)?;
    if term.points.len() != adder.net.len() {
        return Err(Error::Dimension { expected: adder.net.len(), got: term.points.len() });
    }
    let snapped = snap_clusters(&term.points, &term.clusters);

    let outcomes = enc
        .branches
        .iter()
        .map(|branch| {
            let (lo, hi) = enc.windows[branch.position];
            let r = 0.5 * (lo + hi);
            let mut observed = 0u64;
            for k in 1..=n {
                observed |= read_bit(&snapped, sum_node(k), r) << (k - 1);
            }
            observed |= read_bit(&snapped, carry_node(n), r) << n;
            BranchOutcome {
                position: branch.position,
                flips: branch.flips.clone(),
                observed_sum: observed,
                expected_sum: branch.expected_sum,
                correct: observed == branch.expected_sum,
            }
        })
        .collect();

    Ok(DecodeReport { outcomes, certified: term.converged })
}

/// Carry into stage k+1 when evaluating `args` exactly.
fn carry_after(args: BranchArgs, k: usize) -> u64 {
    let mask = (1u64 << k) - 1;
    (u64::from(args.c) + (args.x & mask) + (args.y & mask)) >> k
}

/// Constructs the ideal terminal state of an encoding: every output and
/// internal carry spin is placed so that each branch reads off its exact
/// arithmetic. Fails when some spin's value chain is not realizable by a
/// single point on the circle (more than one flip per half-period).
pub fn ideal_state(enc: &BranchEncoding, adder: &GateSpec) -> Result<Vec<PhasePoint>> {
    let n = adder_bits(adder)?;
    let cycle = enc.branches.len();
    // Crossing at which the chain enters position j; entering position 0
    // is the final crossing, where the last window wraps around.
    let entering_crossing =
        |j: usize| if j == 0 { enc.windows[cycle - 1].1 } else { enc.windows[j].0 };

    // Value of each dynamic node per chain position.
    let node_values = |node: usize| -> Vec<u64> {
        enc.branches
            .iter()
            .map(|b| {
                if let Some(k) = (1..=n).find(|&k| sum_node(k) == node) {
                    (b.expected_sum >> (k - 1)) & 1
                } else if node == carry_node(n) {
                    (b.expected_sum >> n) & 1
                } else {
                    let k = (1..n).find(|&k| carry_node(k) == node).expect("carry node");
                    carry_after(b.args, k)
                }
            })
            .collect()
    };

    let mut points = vec![PhasePoint::new(0.0); adder.net.len()];
    for (&node, placed) in adder.net.clamps() {
        points[node] = *placed;
    }
    let clamped: Vec<usize> = adder.net.clamps().keys().copied().collect();
    let dynamic: Vec<usize> = (0..adder.net.len()).filter(|m| !clamped.contains(m)).collect();

    for node in dynamic {
        let values = node_values(node);
        let flip_positions: Vec<usize> = (0..cycle)
            .filter(|&j| values[j] != values[(j + cycle - 1) % cycle])
            .collect();
        if flip_positions.len() != 2 {
            return Err(Error::InvalidInput(format!(
                "node {node}: value chain needs {} flips; not realizable by one spin",
                flip_positions.len()
            )));
        }
        let first = flip_positions[0];
        let phase = entering_crossing(first).rem_euclid(2.0);
        let sigma = if values[0] != 0 { 1 } else { -1 };
        points[node] = PhasePoint::from_parts(sigma, 1.0 - phase);
    }
    Ok(points)
}

/// The clamps an encoding applied, for re-building nets.
pub fn encoded_clamps(net: &SpinNetwork) -> Vec<(usize, PhasePoint)> {
    net.clamps().iter().map(|(&k, &v)| (k, v)).collect()
}

/// A gate's argument groups placed on the circle for chain readout; the
/// gate analogue of `BranchEncoding`. Groups not listed in the traversal
/// order share the base position at the low end of the arc and invert
/// together, last.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateChainEncoding {
    /// Argument positions per group.
    pub groups: Vec<Vec<usize>>,
    /// (group index, theta offset), listed groups first in flip order.
    pub placement: Vec<(usize, f64)>,
    /// Groups inverted at each crossing of the first half-period.
    pub flip_sequence: Vec<Vec<usize>>,
    pub windows: Vec<(f64, f64)>,
    /// Argument vector per chain position.
    pub args: Vec<Vec<Spin>>,
}

impl GateChainEncoding {
    pub fn forward_len(&self) -> usize {
        self.windows.len() / 2
    }
}

/// Clamps a gate's argument spins along the arc: listed groups at
/// distinct descending offsets, everything else co-clamped at the base.
pub fn encode_gate_chain(
    gate: &GateSpec,
    base_args: &[Spin],
    groups: &[Vec<usize>],
    order: &[usize],
    arc: (f64, f64),
) -> Result<(SpinNetwork, GateChainEncoding)> {
    let arg_nodes = gate.argument_nodes();
    let arity = arg_nodes.len();
    if base_args.len() != arity {
        return Err(Error::Dimension { expected: arity, got: base_args.len() });
    }
    if !(0.0 < arc.0 && arc.0 < arc.1 && arc.1 < 2.0) {
        return Err(Error::InvalidInput(format!("arc {arc:?} must satisfy 0 < lo < hi < 2")));
    }
    let covered: BTreeSet<usize> = groups.iter().flatten().copied().collect();
    if covered.len() != arity || groups.iter().map(Vec::len).sum::<usize>() != arity {
        return Err(Error::InvalidInput("groups must partition the gate arguments".into()));
    }
    let mut seen = BTreeSet::new();
    for &g in order {
        if g >= groups.len() {
            return Err(Error::InvalidInput(format!("group index {g} out of range")));
        }
        if !seen.insert(g) {
            return Err(Error::InvalidInput(format!("duplicate group {g} in order")));
        }
    }
    let unlisted: Vec<usize> = (0..groups.len()).filter(|g| !seen.contains(g)).collect();

    let offsets = spread_offsets(arc, order.len());
    let mut net = gate.net.clone();
    let mut placement: Vec<(usize, f64)> =
        order.iter().zip(&offsets).map(|(&g, &o)| (g, o)).collect();
    placement.extend(unlisted.iter().map(|&g| (g, arc.0)));
    for &(g, offset) in &placement {
        for &arg in &groups[g] {
            net.clamp(arg_nodes[arg], PhasePoint::from_parts(base_args[arg], offset - 1.0))?;
        }
    }

    let mut flip_sequence: Vec<Vec<usize>> = order.iter().map(|&g| vec![g]).collect();
    if !unlisted.is_empty() {
        flip_sequence.push(unlisted.clone());
    }
    let mut half: Vec<f64> = offsets.iter().map(|&o| 2.0 - o).collect();
    if !unlisted.is_empty() {
        half.push(2.0 - arc.0);
    }
    let mut crossings = half.clone();
    crossings.extend(half.iter().map(|c| c + 2.0));
    let windows = windows_from_crossings(&crossings);

    let mut args_chain = Vec::with_capacity(windows.len());
    let mut current = base_args.to_vec();
    args_chain.push(current.clone());
    for position in 1..windows.len() {
        for &g in &flip_sequence[(position - 1) % flip_sequence.len()] {
            for &arg in &groups[g] {
                current[arg] = -current[arg];
            }
        }
        args_chain.push(current.clone());
    }

    Ok((net, GateChainEncoding {
        groups: groups.to_vec(),
        placement,
        flip_sequence,
        windows,
        args: args_chain,
    }))
}

/// Ideal placements of a gate's output spins: each output sits so that
/// every chain position reads its truth-table value. Fails when an
/// output's value chain flips more than once per half-period.
pub fn gate_ideal_outputs(
    enc: &GateChainEncoding,
    gate: &GateSpec,
) -> Result<Vec<(usize, PhasePoint)>> {
    let cycle = enc.windows.len();
    let entering_crossing =
        |j: usize| if j == 0 { enc.windows[cycle - 1].1 } else { enc.windows[j].0 };
    let mut out = Vec::with_capacity(gate.output_nodes.len());
    for (idx, &node) in gate.output_nodes.iter().enumerate() {
        let values: Vec<Spin> = enc
            .args
            .iter()
            .map(|args| truth(gate.oracle, args).map(|o| o[idx]))
            .collect::<Result<_>>()?;
        let flips: Vec<usize> = (0..cycle)
            .filter(|&j| values[j] != values[(j + cycle - 1) % cycle])
            .collect();
        if flips.len() != 2 {
            return Err(Error::InvalidInput(format!(
                "output node {node}: value chain has {} flips per cycle",
                flips.len()
            )));
        }
        let phase = entering_crossing(flips[0]).rem_euclid(2.0);
        out.push((node, PhasePoint::from_parts(values[0], 1.0 - phase)));
    }
    Ok(out)
}

/// Decoded gate outputs per chain position.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateOutcome {
    pub position: usize,
    pub observed: Vec<Spin>,
    pub expected: Vec<Spin>,
    pub correct: bool,
}

/// Reads the gate's output spins at every window midpoint and compares
/// against the truth table of the rotated arguments.
pub fn decode_gate_outputs(
    term: &TerminalState,
    enc: &GateChainEncoding,
    gate: &GateSpec,
) -> Result<Vec<GateOutcome>> {
    let snapped = snap_clusters(&term.points, &term.clusters);
    let mut outcomes = Vec::with_capacity(enc.windows.len());
    for (position, &(lo, hi)) in enc.windows.iter().enumerate() {
        let r = 0.5 * (lo + hi);
        let observed: Vec<Spin> = gate
            .output_nodes
            .iter()
            .map(|&node| snapped[node].rotated(r).sigma())
            .collect();
        let expected = truth(gate.oracle, &enc.args[position])?;
        let correct = observed == expected;
        outcomes.push(GateOutcome { position, observed, expected, correct });
    }
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adder::ripple_carry_adder;
    use crate::cluster::detect_clusters;
    use crate::gates::and_or_gate;

    const ARC: (f64, f64) = (0.1, 1.9);

    fn branch_sums(enc: &BranchEncoding) -> Vec<u64> {
        enc.branches.iter().map(|b| b.expected_sum).collect()
    }

    #[test]
    fn empty_order_is_plain_addition() {
        let adder = ripple_carry_adder(4, false, 0).unwrap();
        let (net, enc) = encode_branches(&adder, 5, 9, 0, &[], ARC).unwrap();
        assert_eq!(enc.forward_branches().len(), 1);
        assert_eq!(enc.branches.len(), 2);
        assert_eq!(enc.branches[0].expected_sum, 14);
        // The mirror branch is the inversion: ~5 + ~9 + 1 within 4 bits.
        assert_eq!(enc.branches[1].expected_sum, 1 + 10 + 6);
        // All nine inputs clamped to one cluster.
        assert_eq!(net.clamps().len(), 9);
        let offsets: BTreeSet<u64> = enc.placement.iter().map(|p| p.1.to_bits()).collect();
        assert_eq!(offsets.len(), 1);
    }

    #[test]
    fn carry_select_pair() {
        let adder = ripple_carry_adder(4, false, 0).unwrap();
        let (_, enc) = encode_branches(&adder, 5, 9, 0, &[0], ARC).unwrap();
        let forward = enc.forward_branches();
        assert_eq!(forward.len(), 2);
        assert_eq!(forward[0].expected_sum, 14);
        assert_eq!(forward[1].expected_sum, 15);
        assert_eq!(forward[1].flips, BTreeSet::from([0]));
    }

    #[test]
    fn fig5_three_bit_chain() {
        // 0 + 6 + 3 traversed pairs 1, 2, 3 then the carry reproduces the
        // printed chain 9, 9, 5, 5, 6, 6, 10, 10.
        let adder = ripple_carry_adder(3, false, 0).unwrap();
        let (_, enc) = encode_branches(&adder, 6, 3, 0, &[1, 2, 3, 0], ARC).unwrap();
        assert_eq!(branch_sums(&enc), vec![9, 9, 5, 5, 6, 6, 10, 10]);
        // 2N + 2 chain positions.
        assert_eq!(enc.branches.len(), 8);
    }

    #[test]
    fn thirty_two_bit_paper_instance() {
        let adder = ripple_carry_adder(32, false, 0).unwrap();
        let order = [17, 3, 25, 0, 8, 30, 12, 21];
        let (_, enc) =
            encode_branches(&adder, 3_411_433_493, 2_079_581_652, 0, &order, ARC).unwrap();
        let forward = enc.forward_branches();
        assert_eq!(forward.len(), 9);
        assert_eq!(forward[0].expected_sum, 5_491_015_145);
        assert_eq!(forward[1].args, BranchArgs { x: 3_411_499_029, y: 2_079_516_116, c: 0 });
        assert_eq!(forward[8].args, BranchArgs { x: 3_930_542_225, y: 1_524_821_328, c: 1 });
        assert_eq!(forward[8].expected_sum, 5_455_363_554);
    }

    #[test]
    fn flipping_unequal_pairs_preserves_the_sum() {
        // x bit 2 = 1, y bit 2 = 0: flipping the pair swaps a 1+0 for a
        // 0+1 and the sum is unchanged.
        let adder = ripple_carry_adder(4, false, 0).unwrap();
        let (_, enc) = encode_branches(&adder, 0b0100, 0b0011, 0, &[3], ARC).unwrap();
        let forward = enc.forward_branches();
        assert_eq!(forward[0].expected_sum, forward[1].expected_sum);
    }

    #[test]
    fn listed_groups_cross_before_the_base_cluster() {
        let adder = ripple_carry_adder(4, false, 0).unwrap();
        let (_, enc) = encode_branches(&adder, 5, 9, 0, &[2, 0], ARC).unwrap();
        // Listed offsets strictly descending, all above the base offset.
        let listed: Vec<f64> = enc.placement[..2].iter().map(|p| p.1).collect();
        assert!(listed[0] > listed[1]);
        assert!(listed[1] > enc.placement[2].1);
        assert_eq!(enc.placement[2].1, ARC.0);
        // Flip sequence: group 2, group 0, then the unlisted cluster.
        assert_eq!(enc.flip_sequence[0], vec![2]);
        assert_eq!(enc.flip_sequence[1], vec![0]);
        assert_eq!(enc.flip_sequence[2], vec![1, 3, 4]);
    }

    #[test]
    fn invalid_orders_are_rejected() {
        let adder = ripple_carry_adder(4, false, 0).unwrap();
        assert!(encode_branches(&adder, 1, 1, 0, &[2, 2], ARC).is_err());
        assert!(encode_branches(&adder, 1, 1, 0, &[5], ARC).is_err());
        assert!(encode_branches(&adder, 1, 1, 2, &[], ARC).is_err());
        assert!(encode_branches(&adder, 16, 0, 0, &[], ARC).is_err());
        assert!(encode_branches(&adder, 1, 1, 0, &[0], (0.0, 2.0)).is_err());
    }

    #[test]
    fn ideal_state_round_trips_through_decode() {
        let adder = ripple_carry_adder(3, false, 0).unwrap();
        let (net, enc) = encode_branches(&adder, 6, 3, 0, &[1, 2, 3, 0], ARC).unwrap();
        let mut placed = adder.clone();
        placed.net = net;
        let points = ideal_state(&enc, &placed).unwrap();
        let term = TerminalState {
            clusters: detect_clusters(&points, 1e-9),
            points,
            elapsed: 0.0,
            lyapunov_trace: vec![],
            converged: true,
        };
        let report = decode_outputs(&term, &enc, &placed).unwrap();
        assert!(report.certified);
        for outcome in &report.outcomes {
            assert!(outcome.correct, "branch {outcome:?}");
        }
    }

    #[test]
    fn ideal_state_round_trips_on_carry_select() {
        let adder = ripple_carry_adder(4, false, 0).unwrap();
        let (net, enc) = encode_branches(&adder, 11, 6, 0, &[0], ARC).unwrap();
        let mut placed = adder.clone();
        placed.net = net;
        let points = ideal_state(&enc, &placed).unwrap();
        let term = TerminalState {
            clusters: detect_clusters(&points, 1e-9),
            points,
            elapsed: 0.0,
            lyapunov_trace: vec![],
            converged: true,
        };
        let report = decode_outputs(&term, &enc, &placed).unwrap();
        assert!(report.outcomes.iter().all(|o| o.correct));
    }

    #[test]
    fn gate_chain_encodes_the_and_or_family() {
        let gate = and_or_gate();
        let groups = vec![vec![0], vec![1], vec![2]];
        // Base (1,1,1), traversal x, y, f.
        let (net, enc) =
            encode_gate_chain(&gate, &[1, 1, 1], &groups, &[0, 1, 2], ARC).unwrap();
        assert_eq!(enc.windows.len(), 6);
        assert_eq!(enc.args[0], vec![1, 1, 1]);
        assert_eq!(enc.args[1], vec![-1, 1, 1]);
        assert_eq!(enc.args[3], vec![-1, -1, -1]);
        // x, y, f clamped; the output spin stays free.
        assert_eq!(net.free_nodes(), vec![2]);
    }
}
