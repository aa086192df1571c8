use relspin::experiments::*;
use std::time::Instant;

fn cfg(cond: bool, mode: Mode, trials: usize, durations: Vec<f64>) -> ExperimentConfig {
    ExperimentConfig {
        circuit: CircuitSpec {
            kind: "adder".into(), n: Some(8), condition: cond, seed: 11,
            inputs: CircuitInputs { x: "181".into(), y: "108".into(), c_in: Some("0".into()) },
            order: vec![6, 3, 0], arc: None, op: None,
        },
        durations, trials, mode,
        integrator: IntegratorOverrides::default(),
        seed: 42,
    }
}

#[test]
fn crit8_probe() {
    let durations = vec![5.0, 15.0, 40.0, 100.0];
    let t0 = Instant::now();
    let cond = run_concurrent(&cfg(true, Mode::Concurrent, 120, durations.clone())).unwrap();
    let t1 = t0.elapsed().as_secs_f64();
    let unc = run_concurrent(&cfg(false, Mode::Concurrent, 120, durations.clone())).unwrap();
    let t2 = t0.elapsed().as_secs_f64() - t1;
    let seq = run_sequential(&cfg(true, Mode::Sequential, 120, durations.clone())).unwrap();
    let t3 = t0.elapsed().as_secs_f64() - t2 - t1;
    eprintln!("timing: cond {t1:.1}s, unc {t2:.1}s, seq {t3:.1}s (120 trials x 4 durations)");
    let mut ge_cells = 0;
    let mut seq_ge = 0;
    let mut total = 0;
    for cell in &cond.cells {
        let u = unc.cell(cell.duration, cell.branch).unwrap();
        let s = seq.cell(cell.duration, cell.branch).unwrap();
        total += 1;
        if cell.probability >= u.probability { ge_cells += 1; }
        if s.probability >= cell.probability { seq_ge += 1; }
        eprintln!("d={:>5} b{}: cond {:.2} unc {:.2} seq {:.2}", cell.duration, cell.branch, cell.probability, u.probability, s.probability);
    }
    eprintln!("cond>=unc in {ge_cells}/{total} cells; seq>=conc in {seq_ge}/{total} cells");
}
