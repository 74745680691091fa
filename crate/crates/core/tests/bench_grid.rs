//! Integration checks of the experiment harness beyond determinism:
//! grid structure, summary shape, and the optimal-β ordering.

use powerlab_core::bench::{self, Config};

#[test]
fn beta_sweep_optimal_cell_is_minimal() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Config::parse(
        "experiment=beta-sweep\nd=10\nspectrum_head=1.0,0.9\nspectrum_tail=0.8\n\
         spectrum_tag=loose10\nepsilons=1e-9\nbetas=0.1025,0.2025,0.3025,0.4525\n\
         trials=8\nseed=100\nn_samples=200\n",
    )
    .unwrap();
    let out = dir.path().join("sweep.csv");
    let summary = bench::run_experiment(&cfg, &out).unwrap();
    let mean_for = |needle: &str| -> f64 {
        summary
            .iter()
            .find(|c| c.cell.contains(needle))
            .and_then(|c| c.mean_iterations)
            .unwrap_or_else(|| panic!("missing cell {needle}"))
    };
    let optimal = mean_for("|0.2025");
    for other in ["|0.1025", "|0.3025", "|0.4525"] {
        assert!(
            optimal < mean_for(other),
            "beta=0.2025 ({optimal}) not minimal vs {other} ({})",
            mean_for(other)
        );
    }
    assert!(
        optimal < mean_for("power|10|loose10|1e-9||"),
        "optimal beats vanilla"
    );
}

#[test]
fn lambda2_grid_emits_both_methods_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Config::parse(
        "experiment=lambda2-accuracy\nd=10\nspectrum_head=1.0,0.9\nspectrum_tail=0.8\n\
         epsilons=1e-6\nrho_policies=eps,sqrt\ntrials=3\nseed=5\nn_samples=200\n",
    )
    .unwrap();
    let out = dir.path().join("l2.csv");
    bench::run_experiment(&cfg, &out).unwrap();
    let text = std::fs::read_to_string(&out).unwrap();
    let dm = text.lines().filter(|l| l.contains(",dmpower,")).count();
    let sim = text
        .lines()
        .filter(|l| l.contains(",simultaneous,"))
        .count();
    assert_eq!(dm, 6, "2 rho policies x 3 trials");
    assert_eq!(sim, 3);
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert!(!cols[13].is_empty(), "lambda2_abs_err missing in {line}");
    }
}

#[test]
fn cluster_grid_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Config::parse(
        "experiment=cluster-grid\ndatasets=circles:200\nnoise=0.02\nfactor=0.5\n\
         sigma_scale=0.13\nepsilons=1e-8\nrho_policies=cbrt\npowerm=false\ntrials=2\nseed=9\n",
    )
    .unwrap();
    let out = dir.path().join("cluster.csv");
    let summary = bench::run_experiment(&cfg, &out).unwrap();
    let acc = summary
        .iter()
        .find(|c| c.cell.contains("dmpower"))
        .and_then(|c| c.median_accuracy)
        .unwrap();
    assert!(acc >= 0.9, "small-circles accuracy {acc}");
}
