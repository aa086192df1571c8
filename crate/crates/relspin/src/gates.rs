//! Spin-network representations of logic gates.
//!
//! A gate network represents its Boolean function through restricted
//! ground states: with the input spins fixed, the minimum-energy
//! (maximum-cut) assignment of the remaining spins carries the output.
//! Every configuration satisfying the gate equation attains one common
//! cut value and every violating configuration sits strictly below it,
//! which is what makes the representations composable.

use crate::error::{Error, Result};
use crate::network::{Role, SpinNetwork};
use crate::oracle::TruthFn;
use crate::phase::PhasePoint;

/// A spin network together with its circuit interface.
#[derive(Debug, Clone)]
pub struct GateSpec {
    pub net: SpinNetwork,
    pub input_nodes: Vec<usize>,
    pub output_nodes: Vec<usize>,
    pub fixed_nodes: Vec<usize>,
    pub oracle: TruthFn,
}

impl GateSpec {
    /// Nodes carrying the oracle's arguments, in argument order. Fixed
    /// auxiliary spins participate like any other placed argument.
    pub fn argument_nodes(&self) -> Vec<usize> {
        let mut nodes = self.input_nodes.clone();
        nodes.extend(&self.fixed_nodes);
        nodes
    }
}

/// Node indices of the AND/OR gate network.
pub const AND_OR_X: usize = 0;
pub const AND_OR_Y: usize = 1;
pub const AND_OR_A: usize = 2;
pub const AND_OR_F: usize = 3;

/// The four-node AND/OR gate. The fixed auxiliary spin f selects the
/// operation: σ_f = +1 is AND, σ_f = −1 is OR (a global inversion maps
/// one truth table onto the other). Constructed clamped to AND at
/// θ_f = 1; encodings re-place f as needed.
pub fn and_or_gate() -> GateSpec {
    let mut net = SpinNetwork::new(4);
    let weights = [
        (AND_OR_X, AND_OR_Y, 1.0),
        (AND_OR_X, AND_OR_A, -2.0),
        (AND_OR_Y, AND_OR_A, -2.0),
        (AND_OR_X, AND_OR_F, -1.0),
        (AND_OR_Y, AND_OR_F, -1.0),
        (AND_OR_A, AND_OR_F, 2.0),
    ];
    for (m, n, w) in weights {
        net.set_weight(m, n, w).expect("static gate edge");
    }
    net.set_role(AND_OR_X, Role::Input);
    net.set_role(AND_OR_Y, Role::Input);
    net.set_role(AND_OR_A, Role::Output);
    net.set_role(AND_OR_F, Role::AuxiliaryFixed);
    net.clamp(AND_OR_F, PhasePoint::from_parts(1, 0.0)).expect("clamp f");

    GateSpec {
        net,
        input_nodes: vec![AND_OR_X, AND_OR_Y],
        output_nodes: vec![AND_OR_A],
        fixed_nodes: vec![AND_OR_F],
        oracle: TruthFn::AndOr,
    }
}

/// Node indices of the full-adder network.
pub const FA_X: usize = 0;
pub const FA_Y: usize = 1;
pub const FA_C_IN: usize = 2;
pub const FA_S: usize = 3;
pub const FA_C_OUT: usize = 4;

/// Weights of one full adder over nodes (x, y, i, s, o), where i and o
/// are carry-in and carry-out.
pub(crate) const FA_EDGES: [(usize, usize, f64); 10] = [
    (4, 3, 2.0),  // (o, s)
    (4, 0, -2.0), // (o, x)
    (4, 1, -2.0), // (o, y)
    (4, 2, -2.0), // (o, i)
    (3, 0, -1.0), // (s, x)
    (3, 1, -1.0), // (s, y)
    (3, 2, -1.0), // (s, i)
    (0, 1, 1.0),  // (x, y)
    (0, 2, 1.0),  // (x, i)
    (1, 2, 1.0),  // (y, i)
];

/// The five-node full adder: s = x ⊕ y ⊕ c_in, c_out = MAJ(x, y, c_in).
/// Its truth table is invariant under full inversion, so no auxiliary
/// spin is needed.
pub fn full_adder() -> GateSpec {
    let mut net = SpinNetwork::new(5);
    for (m, n, w) in FA_EDGES {
        net.set_weight(m, n, w).expect("static gate edge");
    }
    for node in [FA_X, FA_Y, FA_C_IN] {
        net.set_role(node, Role::Input);
    }
    for node in [FA_S, FA_C_OUT] {
        net.set_role(node, Role::Output);
    }

    GateSpec {
        net,
        input_nodes: vec![FA_X, FA_Y, FA_C_IN],
        output_nodes: vec![FA_S, FA_C_OUT],
        fixed_nodes: vec![],
        oracle: TruthFn::FullAdder,
    }
}

/// Restricted maximum cut shared by every configuration satisfying a
/// gate equation, and the strict margin to the best violator; both by
/// exhaustive enumeration.
#[derive(Debug, Clone, Copy)]
pub struct GateDegeneracy {
    pub satisfied_cut: f64,
    pub best_violator_cut: f64,
}

/// Verifies the gate cut degeneracy over all input assignments: the
/// satisfying configurations share one cut value (within `tol`) and every
/// violator falls strictly below it.
pub fn gate_cut_degeneracy(gate: &GateSpec, tol: f64) -> Result<GateDegeneracy> {
    use crate::objective::discrete_cut;
    use crate::oracle::truth;

    let arg_nodes = gate.argument_nodes();
    let free: Vec<usize> = (0..gate.net.len())
        .filter(|m| !arg_nodes.contains(m))
        .collect();
    let mut satisfied: Option<f64> = None;
    let mut best_violator = f64::NEG_INFINITY;

    let mut sigma = vec![-1i8; gate.net.len()];
    for args_mask in 0u32..(1 << arg_nodes.len()) {
        let args: Vec<i8> = (0..arg_nodes.len())
            .map(|i| if args_mask >> i & 1 == 1 { 1 } else { -1 })
            .collect();
        for (i, &node) in arg_nodes.iter().enumerate() {
            sigma[node] = args[i];
        }
        let expected = truth(gate.oracle, &args)?;
        for free_mask in 0u32..(1 << free.len()) {
            for (i, &node) in free.iter().enumerate() {
                sigma[node] = if free_mask >> i & 1 == 1 { 1 } else { -1 };
            }
            let cut = discrete_cut(&gate.net, &sigma)?;
            let satisfies = gate
                .output_nodes
                .iter()
                .zip(&expected)
                .all(|(&node, &value)| sigma[node] == value);
            if satisfies {
                match satisfied {
                    None => satisfied = Some(cut),
                    Some(c) if (c - cut).abs() > tol => {
                        return Err(Error::Numeric(format!(
                            "satisfying cuts differ: {c} vs {cut}"
                        )))
                    }
                    _ => {}
                }
            } else {
                best_violator = best_violator.max(cut);
            }
        }
    }

    let satisfied_cut = satisfied.ok_or_else(|| Error::Numeric("no satisfying state".into()))?;
    if best_violator >= satisfied_cut - tol {
        return Err(Error::Numeric(format!(
            "violator cut {best_violator} reaches the satisfied value {satisfied_cut}"
        )));
    }
    Ok(GateDegeneracy { satisfied_cut, best_violator_cut: best_violator })
}
