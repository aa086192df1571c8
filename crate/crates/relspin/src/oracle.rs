//! Ground-truth machinery: exhaustive restricted ground states, truth
//! tables, bit-flip-chain isotonicity, the chain census, and the
//! single-free-spin drift analysis.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::SpinNetwork;
use crate::objective::ising_energy;
use crate::phase::Spin;

/// Limit on exhaustive enumeration.
const MAX_FREE_SPINS: usize = 24;

/// Boolean functions with spin-network representations in this crate.
///
/// Argument order follows the owning gate's `argument_nodes`:
/// AND/OR takes (x, y, f) where f selects the operation, the full adder
/// takes (x, y, c_in), and the N-bit adder takes
/// (c_0, x_1, y_1, …, x_N, y_N) returning (s_1, …, s_N, c_N).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TruthFn {
    AndOr,
    FullAdder,
    Adder(usize),
}

fn maj(a: Spin, b: Spin, c: Spin) -> Spin {
    if i32::from(a) + i32::from(b) + i32::from(c) > 0 {
        1
    } else {
        -1
    }
}

/// Pure Boolean evaluation. Spin +1 encodes True.
pub fn truth(fn_id: TruthFn, args: &[Spin]) -> Result<Vec<Spin>> {
    match fn_id {
        TruthFn::AndOr => {
            let [x, y, f] = args_array(args)?;
            // f = +1 is AND, f = −1 is OR; both are MAJ(x, y, −f).
            Ok(vec![maj(x, y, -f)])
        }
        TruthFn::FullAdder => {
            let [x, y, c] = args_array(args)?;
            let s = x * y * c;
            Ok(vec![s, maj(x, y, c)])
        }
        TruthFn::Adder(n) => {
            if args.len() != 2 * n + 1 {
                return Err(Error::Dimension { expected: 2 * n + 1, got: args.len() });
            }
            if n == 0 || n > 63 {
                return Err(Error::InvalidInput(format!("adder width {n} out of range")));
            }
            let bit = |s: Spin| u64::from(s > 0);
            let c0 = bit(args[0]);
            let mut x = 0u64;
            let mut y = 0u64;
            for k in 0..n {
                x |= bit(args[1 + 2 * k]) << k;
                y |= bit(args[2 + 2 * k]) << k;
            }
            let sum = c0 + x + y;
            let mut out = Vec::with_capacity(n + 1);
            for k in 0..=n {
                out.push(if (sum >> k) & 1 == 1 { 1 } else { -1 });
            }
            Ok(out)
        }
    }
}

fn args_array<const K: usize>(args: &[Spin]) -> Result<[Spin; K]> {
    args.try_into()
        .map_err(|_| Error::Dimension { expected: K, got: args.len() })
}

/// Exhaustive restricted ground state of the Ising energy.
#[derive(Debug, Clone)]
pub struct GroundState {
    /// Lexicographically smallest minimizer (−1 sorts before +1).
    pub sigma: Vec<Spin>,
    pub energy: f64,
    /// Every minimizer, sorted; length one when the minimum is unique.
    pub ties: Vec<Vec<Spin>>,
}

/// argmin over free spins of H(σ) with the given spins fixed.
pub fn restricted_ground_state(
    net: &SpinNetwork,
    clamp_sigma: &BTreeMap<usize, Spin>,
) -> Result<GroundState> {
    let n = net.len();
    for (&node, &s) in clamp_sigma {
        if node >= n {
            return Err(Error::InvalidInput(format!("clamped spin {node} out of range")));
        }
        if s != 1 && s != -1 {
            return Err(Error::InvalidInput(format!("spin value {s} is not ±1")));
        }
    }
    let free: Vec<usize> = (0..n).filter(|m| !clamp_sigma.contains_key(m)).collect();
    if free.len() > MAX_FREE_SPINS {
        return Err(Error::Capacity(format!(
            "{} free spins exceed the enumeration limit {MAX_FREE_SPINS}",
            free.len()
        )));
    }

    let mut sigma: Vec<Spin> = (0..n).map(|m| clamp_sigma.get(&m).copied().unwrap_or(-1)).collect();
    let mut best = f64::INFINITY;
    let mut minimizers: Vec<Vec<Spin>> = Vec::new();
    for mask in 0u64..(1u64 << free.len()) {
        for (bit, &node) in free.iter().enumerate() {
            sigma[node] = if mask >> bit & 1 == 1 { 1 } else { -1 };
        }
        let energy = ising_energy(net, &sigma)?;
        let tol = 1e-9 * (1.0 + best.abs().min(energy.abs()));
        if energy < best - tol {
            best = energy;
            minimizers.clear();
            minimizers.push(sigma.clone());
        } else if (energy - best).abs() <= tol {
            minimizers.push(sigma.clone());
        }
    }
    minimizers.sort();
    Ok(GroundState { sigma: minimizers[0].clone(), energy: best, ties: minimizers })
}

/// A bit-flip chain ∅ ⊂ J₁ ⊂ J₁∪J₂ ⊂ …, stored by its increments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipChain {
    pub increments: Vec<BTreeSet<usize>>,
    pub arity: usize,
}

impl FlipChain {
    pub fn new(increments: Vec<BTreeSet<usize>>, arity: usize) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for inc in &increments {
            if inc.is_empty() {
                return Err(Error::InvalidInput("empty chain increment".into()));
            }
            for &i in inc {
                if i >= arity {
                    return Err(Error::InvalidInput(format!("argument index {i} out of range")));
                }
                if !seen.insert(i) {
                    return Err(Error::InvalidInput(format!(
                        "argument {i} appears in two increments"
                    )));
                }
            }
        }
        Ok(FlipChain { increments, arity })
    }

    /// Argument states visited along the chain, starting from `base`.
    pub fn states(&self, base: &[Spin]) -> Result<Vec<Vec<Spin>>> {
        if base.len() != self.arity {
            return Err(Error::Dimension { expected: self.arity, got: base.len() });
        }
        let mut states = vec![base.to_vec()];
        let mut current = base.to_vec();
        for inc in &self.increments {
            for &i in inc {
                current[i] = -current[i];
            }
            states.push(current.clone());
        }
        Ok(states)
    }
}

/// Evaluates `fn_id` along the argument chain. The function is isotone
/// along the chain when every output bit changes at most once across the
/// whole output sequence, i.e. the outputs themselves form a bit-flip
/// chain.
pub fn isotone_check(
    fn_id: TruthFn,
    base_args: &[Spin],
    chain: &FlipChain,
) -> Result<(bool, Vec<Vec<Spin>>)> {
    let states = chain.states(base_args)?;
    let outputs: Vec<Vec<Spin>> = states
        .iter()
        .map(|args| truth(fn_id, args))
        .collect::<Result<_>>()?;
    let width = outputs[0].len();
    let mut isotone = true;
    for bit in 0..width {
        let flips = outputs.windows(2).filter(|w| w[0][bit] != w[1][bit]).count();
        if flips > 1 {
            isotone = false;
        }
    }
    Ok((isotone, outputs))
}

/// A signed permutation of the argument positions that leaves the
/// evaluated function's truth table intact (up to relabeling of outputs):
/// args'[i] = signs[i] · args[perm[i]].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgSymmetry {
    pub perm: Vec<usize>,
    pub signs: Vec<Spin>,
}

impl ArgSymmetry {
    pub fn apply(&self, args: &[Spin]) -> Vec<Spin> {
        (0..args.len()).map(|i| self.signs[i] * args[self.perm[i]]).collect()
    }

    /// Image of a position group under the chain relabeling: flipping old
    /// position p flips new position i whenever perm[i] = p.
    fn map_group(&self, group: &BTreeSet<usize>) -> BTreeSet<usize> {
        (0..self.perm.len()).filter(|&i| group.contains(&self.perm[i])).collect()
    }
}

/// The argument-group structure and declared symmetries a chain census
/// quotients by. Inversion of all arguments and reversal of the traversal
/// order are always included.
#[derive(Debug, Clone)]
pub struct ChainSpace {
    pub fn_id: TruthFn,
    pub groups: Vec<BTreeSet<usize>>,
    pub symmetries: Vec<ArgSymmetry>,
    pub arity: usize,
}

impl ChainSpace {
    pub fn new(
        fn_id: TruthFn,
        arity: usize,
        groups: Vec<BTreeSet<usize>>,
        symmetries: Vec<ArgSymmetry>,
    ) -> Result<Self> {
        let covered: BTreeSet<usize> = groups.iter().flatten().copied().collect();
        if covered.len() != arity || groups.iter().map(BTreeSet::len).sum::<usize>() != arity {
            return Err(Error::InvalidInput("groups must partition the argument set".into()));
        }
        for sym in &symmetries {
            if sym.perm.len() != arity || sym.signs.len() != arity {
                return Err(Error::InvalidInput("symmetry arity mismatch".into()));
            }
            for g in &groups {
                let image = sym.map_group(g);
                if !groups.contains(&image) {
                    return Err(Error::InvalidInput(
                        "symmetry does not preserve the group structure".into(),
                    ));
                }
            }
        }
        Ok(ChainSpace { fn_id, groups, symmetries, arity })
    }
}

/// The AND/OR gate as a chain space over argument groups {x}, {y}, {f}.
/// `extended` additionally quotients by the symmetries of the evaluated
/// family MAJ(x, y, −f), which exchange the auxiliary spin with an input
/// up to sign; the minimal space only declares the x↔y swap.
pub fn and_or_chain_space(extended: bool) -> ChainSpace {
    let mut symmetries = vec![ArgSymmetry { perm: vec![1, 0, 2], signs: vec![1, 1, 1] }];
    if extended {
        symmetries.push(ArgSymmetry { perm: vec![2, 1, 0], signs: vec![-1, 1, -1] });
    }
    ChainSpace::new(
        TruthFn::AndOr,
        3,
        vec![BTreeSet::from([0]), BTreeSet::from([1]), BTreeSet::from([2])],
        symmetries,
    )
    .expect("valid space")
}

/// The full adder with x and y clustered into one group.
pub fn fa_clustered_chain_space() -> ChainSpace {
    ChainSpace::new(
        TruthFn::FullAdder,
        3,
        vec![BTreeSet::from([0, 1]), BTreeSet::from([2])],
        vec![ArgSymmetry { perm: vec![1, 0, 2], signs: vec![1, 1, 1] }],
    )
    .expect("valid space")
}

/// One equivalence class of saturated full chains.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainClass {
    /// Lexicographically smallest representative.
    pub base: Vec<Spin>,
    /// Group indices in traversal order.
    pub order: Vec<usize>,
    pub size: usize,
    pub broken: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainCensus {
    pub classes: Vec<ChainClass>,
    pub total: usize,
    pub broken: usize,
}

type RawChain = (Vec<Spin>, Vec<usize>);

fn orbit_of(space: &ChainSpace, start: &RawChain) -> BTreeSet<RawChain> {
    let mut orbit = BTreeSet::new();
    let mut frontier = vec![start.clone()];
    orbit.insert(start.clone());
    while let Some((base, order)) = frontier.pop() {
        let mut images: Vec<RawChain> = Vec::new();
        // Inversion of all arguments.
        images.push((base.iter().map(|s| -s).collect(), order.clone()));
        // Reversal: traverse the same chain from its end state.
        images.push((
            base.iter().map(|s| -s).collect(),
            order.iter().rev().copied().collect(),
        ));
        for sym in &space.symmetries {
            let new_base = sym.apply(&base);
            let new_order: Vec<usize> = order
                .iter()
                .map(|&g| {
                    let image = sym.map_group(&space.groups[g]);
                    space
                        .groups
                        .iter()
                        .position(|h| *h == image)
                        .expect("validated group image")
                })
                .collect();
            images.push((new_base, new_order));
        }
        for image in images {
            if orbit.insert(image.clone()) {
                frontier.push(image);
            }
        }
    }
    orbit
}

fn chain_is_broken(space: &ChainSpace, chain: &RawChain) -> Result<bool> {
    let increments: Vec<BTreeSet<usize>> =
        chain.1.iter().map(|&g| space.groups[g].clone()).collect();
    let flip_chain = FlipChain::new(increments, space.arity)?;
    let (isotone, _) = isotone_check(space.fn_id, &chain.0, &flip_chain)?;
    Ok(!isotone)
}

/// Enumerates saturated full chains over the space's argument groups and
/// counts equivalence classes under inversion, reversal and the declared
/// argument symmetries, flagging the broken ones.
pub fn enumerate_nontrivial_chains(space: &ChainSpace) -> Result<ChainCensus> {
    let g = space.groups.len();
    let mut orders: Vec<Vec<usize>> = Vec::new();
    permutations(&mut (0..g).collect::<Vec<_>>(), 0, &mut orders);

    let mut visited: BTreeSet<RawChain> = BTreeSet::new();
    let mut classes = Vec::new();
    for mask in 0u32..(1 << space.arity) {
        let base: Vec<Spin> = (0..space.arity)
            .map(|i| if mask >> i & 1 == 1 { 1 } else { -1 })
            .collect();
        for order in &orders {
            let chain: RawChain = (base.clone(), order.clone());
            if visited.contains(&chain) {
                continue;
            }
            let orbit = orbit_of(space, &chain);
            let representative = orbit.iter().next().expect("non-empty orbit").clone();
            let broken = chain_is_broken(space, &representative)?;
            classes.push(ChainClass {
                base: representative.0,
                order: representative.1,
                size: orbit.len(),
                broken,
            });
            visited.extend(orbit);
        }
    }
    classes.sort_by(|a, b| (&a.base, &a.order).cmp(&(&b.base, &b.order)));
    let broken = classes.iter().filter(|c| c.broken).count();
    Ok(ChainCensus { total: classes.len(), broken, classes })
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Drift analysis of a network with exactly one free spin.
#[derive(Debug, Clone)]
pub struct DriftProfile {
    pub sigma_a: Spin,
    /// Sorted distinct continuous components of the clamped spins; the
    /// edges between consecutive intervals.
    pub interval_edges: Vec<f64>,
    /// Sign of dX_a/dt inside each of the S intervals, left to right.
    pub signs: Vec<i8>,
    /// Continuous components of the stable (+ → −) interior boundaries
    /// for this σ_a.
    pub stable: Vec<f64>,
}

/// Per-interval sign of the free spin's drift between consecutive clamped
/// placements. A boundary where the sign descends from + to − attracts
/// from both sides and is a stable equilibrium.
pub fn drift_sign_profile(
    net: &SpinNetwork,
    free_node: usize,
    sigma_a: Spin,
) -> Result<DriftProfile> {
    let free = net.free_nodes();
    if free != vec![free_node] {
        return Err(Error::InvalidInput(format!(
            "drift profile needs exactly one free spin ({free_node}); free set is {free:?}"
        )));
    }

    let mut edges: Vec<f64> = net
        .neighbors(free_node)
        .iter()
        .filter_map(|&(n, _)| net.clamps().get(&n).map(|p| p.continuous()))
        .collect();
    edges.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);

    let mut signs: Vec<i8> = Vec::with_capacity(edges.len() + 1);
    for interval in 0..=edges.len() {
        // Clamps on the first `interval` edges lie below the free spin.
        let mut acc = 0.0;
        for &(n, w) in net.neighbors(free_node) {
            let p = net.clamps()[&n];
            let below = edges
                .iter()
                .position(|&e| (e - p.continuous()).abs() <= 1e-12)
                .expect("clamp on an edge")
                < interval;
            let side = if below { 1.0 } else { -1.0 };
            acc += w * f64::from(p.sigma()) * side;
        }
        let drift = f64::from(sigma_a) * acc;
        if drift.abs() <= 1e-12 {
            return Err(Error::InvalidInput(
                "degenerate placement: zero drift in an interval".into(),
            ));
        }
        signs.push(if drift > 0.0 { 1 } else { -1 });
    }

    let stable = edges
        .iter()
        .enumerate()
        .filter(|(k, _)| signs[*k] == 1 && signs[k + 1] == -1)
        .map(|(_, &x)| x)
        .collect();

    Ok(DriftProfile { sigma_a, interval_edges: edges, signs, stable })
}

/// Stable equilibria of the single free spin over the whole phase circle,
/// as (σ_a, X) pairs.
pub fn stable_equilibria(net: &SpinNetwork, free_node: usize) -> Result<Vec<(Spin, f64)>> {
    let mut out = Vec::new();
    for sigma_a in [1, -1] {
        let profile = drift_sign_profile(net, free_node, sigma_a)?;
        out.extend(profile.stable.into_iter().map(|x| (sigma_a, x)));
    }
    Ok(out)
}
