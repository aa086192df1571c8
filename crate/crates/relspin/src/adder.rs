//! The N-bit ripple-carry adder and its weight conditioning.
//!
//! The adder chains N full adders by identifying the carry-out spin of
//! stage k with the carry-in spin of stage k+1 (one shared node, no tie
//! edge). Gate subnetworks share nodes but never edges, so the maximum
//! cut of the composed network given the inputs is attained exactly on
//! wire-consistent assignments.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gates::{GateSpec, FA_EDGES};
use crate::network::{Role, SpinNetwork};
use crate::oracle::TruthFn;

/// Widest supported adder; sums must fit N+1 bits of a u64.
pub const MAX_ADDER_BITS: usize = 63;

/// Number of primes kept in the conditioning pool.
const PRIME_POOL: usize = 10_000;

/// Node indices of the N-bit adder: the carry chain occupies every fourth
/// slot, c_k = 4k, and stage k (1-based) owns x_k, y_k, s_k.
pub fn carry_node(k: usize) -> usize {
    4 * k
}

pub fn x_node(k: usize) -> usize {
    4 * k - 3
}

pub fn y_node(k: usize) -> usize {
    4 * k - 2
}

pub fn sum_node(k: usize) -> usize {
    4 * k - 1
}

/// The five nodes of stage k in full-adder order (x, y, i, s, o).
fn stage_nodes(k: usize) -> [usize; 5] {
    [x_node(k), y_node(k), carry_node(k - 1), sum_node(k), carry_node(k)]
}

/// Builds the 4N+1-node ripple-carry adder. Inputs are x_k, y_k and c_0;
/// outputs are s_1..s_N and c_N. With `condition` set the weights are
/// adjusted by `condition_weights`.
pub fn ripple_carry_adder(n: usize, condition: bool, seed: u64) -> Result<GateSpec> {
    if n == 0 {
        return Err(Error::InvalidInput("adder needs at least one bit".into()));
    }
    if n > MAX_ADDER_BITS {
        return Err(Error::Capacity(format!("adder width {n} exceeds {MAX_ADDER_BITS}")));
    }

    let mut net = SpinNetwork::new(4 * n + 1);
    for k in 1..=n {
        let nodes = stage_nodes(k);
        for (a, b, w) in FA_EDGES {
            net.set_weight(nodes[a], nodes[b], w)?;
        }
        net.set_role(x_node(k), Role::Input);
        net.set_role(y_node(k), Role::Input);
        net.set_role(sum_node(k), Role::Output);
    }
    net.set_role(carry_node(0), Role::Input);
    net.set_role(carry_node(n), Role::Output);

    let mut input_nodes = vec![carry_node(0)];
    for k in 1..=n {
        input_nodes.push(x_node(k));
        input_nodes.push(y_node(k));
    }
    let mut output_nodes: Vec<usize> = (1..=n).map(sum_node).collect();
    output_nodes.push(carry_node(n));

    let spec = GateSpec {
        net,
        input_nodes,
        output_nodes,
        fixed_nodes: vec![],
        oracle: TruthFn::Adder(n),
    };
    if condition {
        condition_weights(&spec, seed)
    } else {
        Ok(spec)
    }
}

/// Width of the adder a GateSpec was built with.
pub fn adder_bits(adder: &GateSpec) -> Result<usize> {
    match adder.oracle {
        TruthFn::Adder(n) => Ok(n),
        _ => Err(Error::InvalidInput("not an adder network".into())),
    }
}

/// Per-stage factor √p / ⌊√p⌋ used to break rational weight relations.
pub fn conditioning_factor(p: u64) -> f64 {
    let root = (p as f64).sqrt();
    root / root.floor()
}

/// Removes rational linear dependencies among the adder weights:
/// within each stage the (x, c_out) and (y, c_out) couplings grow in
/// magnitude by 10 percent, then all ten stage weights scale by
/// √p_k / ⌊√p_k⌋ with the p_k distinct primes drawn from a seeded pool.
/// The carry-chain node is shared, but the (o, ·) couplings belong to the
/// stage that produced the carry, so every edge scales exactly once.
pub fn condition_weights(adder: &GateSpec, seed: u64) -> Result<GateSpec> {
    let n = adder_bits(adder)?;
    let primes = distinct_primes(n, seed);

    let mut spec = adder.clone();
    for k in 1..=n {
        let nodes = stage_nodes(k);
        let factor = conditioning_factor(primes[k - 1]);
        for (a, b, base_w) in FA_EDGES {
            let (m, nn) = (nodes[a], nodes[b]);
            let bump = if (a == 4 && b == 0) || (a == 4 && b == 1) { 1.1 } else { 1.0 };
            let w = base_w * bump * factor;
            spec.net.set_weight(m, nn, w)?;
        }
    }
    Ok(spec)
}

/// First `PRIME_POOL` primes, sampled without replacement.
fn distinct_primes(count: usize, seed: u64) -> Vec<u64> {
    let pool = prime_pool();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = rand::seq::index::sample(&mut rng, pool.len(), count.min(pool.len()));
    let mut out: Vec<u64> = picked.iter().map(|i| pool[i]).collect();
    // The pool is ample for any supported width, but stay total anyway.
    let mut next = *pool.last().unwrap() + 1;
    while out.len() < count {
        if is_prime(next) {
            out.push(next);
        }
        next += 1;
    }
    out
}

fn prime_pool() -> Vec<u64> {
    let mut primes = Vec::with_capacity(PRIME_POOL);
    let mut candidate = 2u64;
    while primes.len() < PRIME_POOL {
        if is_prime(candidate) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

fn is_prime(v: u64) -> bool {
    if v < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= v {
        if v % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
