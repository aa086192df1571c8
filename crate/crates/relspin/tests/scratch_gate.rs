use relspin::encoding::*;
use relspin::gates::*;
use relspin::oracle::*;
use relspin::*;

#[test]
fn fa_single_free_probe() {
    let gate = full_adder();
    let groups = vec![vec![0, 1], vec![2]];
    let mut total = 0;
    let mut ok = 0;
    let mut profiles_ok = 0;
    let mut placements = 0;
    for mask in 0u32..8 {
        let base: Vec<i8> = (0..3).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect();
        for order in [[0usize, 1], [1, 0]] {
            let (net, enc) = encode_gate_chain(&gate, &base, &groups, &order, (0.1, 1.9)).unwrap();
            let ideal = gate_ideal_outputs(&enc, &gate).unwrap();
            for free_idx in 0..2usize {
                placements += 1;
                let free_node = gate.output_nodes[free_idx];
                let mut net2 = net.clone();
                for &(node, p) in &ideal {
                    if node != free_node { net2.clamp(node, p).unwrap(); }
                }
                let eq = stable_equilibria(&net2, free_node).unwrap();
                if eq.len() == 1 { profiles_ok += 1; }
                let mut placed = gate.clone();
                placed.net = net2.clone();
                for seed in 0..100u64 {
                    let cfg = IntegratorConfig { t_max: 60.0, seed, ..IntegratorConfig::for_network(&net2) };
                    let init = sample_initial(&net2, &cfg);
                    let term = evolve(&net2, &init, &cfg).unwrap();
                    let outcomes = decode_gate_outputs(&term, &enc, &placed).unwrap();
                    total += 1;
                    if outcomes.iter().all(|o| o.observed[free_idx] == o.expected[free_idx]) { ok += 1; }
                }
            }
        }
    }
    eprintln!("fa single-free: {placements} placements, {profiles_ok} unique-equilibrium profiles, decode {ok}/{total}");
}
