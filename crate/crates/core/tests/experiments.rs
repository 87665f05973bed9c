use mcm_core::device::DeviceConfig;
use mcm_core::experiments::{exchange, tradeoff, RunOptions};

#[test]
fn tradeoff_curves_are_monotone_and_cross_near_twenty_us() {
    let cfg = DeviceConfig::default();
    let r = tradeoff::run_tradeoff(&cfg, &tradeoff::default_grid_us()).unwrap();
    let t = r.table("tradeoff").unwrap();
    let fid = t.numbers("charge_fidelity").unwrap();
    let ramsey = t.numbers("ramsey_D1").unwrap();
    let hahn = t.numbers("hahn_D1").unwrap();
    assert!(fid.windows(2).all(|w| w[1] >= w[0]));
    assert!(hahn.windows(2).all(|w| w[1] <= w[0]));
    assert!(ramsey.iter().zip(&hahn).all(|(r, h)| r < h));
    let crossing = r.metric("crossing_total_time_us").unwrap();
    assert!((crossing - 20.0).abs() < 2.0, "{crossing}");
}

#[test]
fn exchange_solutions_need_stronger_coupling_at_shorter_times() {
    let cfg = DeviceConfig::default();
    let r = exchange::run_exchange_fingerprint(
        &cfg,
        &exchange::default_voltages(),
        &exchange::default_times_us(),
        &RunOptions::exact(),
    )
    .unwrap();
    let v: Vec<f64> = exchange::default_times_us()
        .iter()
        .map(|t| r.metric(&format!("v_j3_pi_{t}us")).unwrap())
        .collect();
    assert!(v.windows(2).all(|w| w[1] < w[0]), "{v:?}");
}
