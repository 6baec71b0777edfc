//! Fitted constants of shipped-suite cells, frozen from a calibrated run.
//! A change here means the numerics moved; recheck the suite before
//! refreezing.

use smoothlab::cli::paper_suite;
use smoothlab::corpus::corpus_get;
use smoothlab::harness::{run_check, Verdict};

// (cell, variant, c_fit)
const PINS: &[(&str, &str, f64)] = &[
    ("direct_r1_p2__abs_pow_1.5", "main", 0.343_990_572_349_996_86),
    ("direct_r0_inf__one_minus_x_pow_0.5", "main", 0.255_402_202_216_829_9),
    ("hierarchy_k2_r0_inf__abs_pow_1.5", "main", 1.005_662_977_687_534_3),
    ("hierarchy_k2_r0_inf__abs_pow_1.5", "auxjan", 1.005_662_977_687_534_3),
    ("sharp_marchaud_m3_p2__abs_pow_1.5", "integral", 1.031_541_676_734_510_2),
    ("sharp_marchaud_m3_p2__abs_pow_1.5", "discrete", 3.867_554_276_248_153_4),
    ("sharp_jackson_m2_p3__abs_pow_0.5", "best_approximation", 0.515_655_885_846_141_5),
    ("sharp_jackson_m2_p3__abs_pow_0.5", "modulus_sum", 1.535_572_721_821_313_5),
    ("sharp_jackson_m2_p3__abs_pow_0.5", "integral", 0.980_654_740_903_545_9),
    ("characterization_r0__abs_pow_1.5", "forward", 0.196_260_337_031_095_08),
    ("characterization_r0__abs_pow_1.5", "converse", 2.0),
    ("weighted_jackson_w00__abs_pow_1.5", "main", 0.322_392_745_345_269_57),
    ("weighted_jackson_w00__abs_pow_1.5", "luther", 0.387_175_924_171_801_97),
    ("weighted_transfer_w05__abs_pow_1.5", "main", 0.830_135_591_391_060_5),
];

fn check_cell(stem: &str) {
    let cfg = paper_suite();
    let hc = cfg.harness_config();
    let cell = cfg.cells().into_iter().find(|c| c.stem == stem).expect("cell in suite");
    let f = corpus_get(&cell.function).unwrap();
    let out = run_check(cell.check_id, &f, &cell.params, &hc).unwrap();
    assert_eq!(out.verdict, Verdict::Pass, "{stem}");
    for &(s, variant, c) in PINS.iter().filter(|p| p.0 == stem) {
        let rep = out.report(variant).unwrap_or_else(|| panic!("{s} lacks {variant}"));
        let got = rep.c_fit.unwrap();
        assert!((got - c).abs() <= 1e-9 * c, "{s}/{variant}: {got} vs {c}");
    }
}

#[test]
fn direct() {
    check_cell("direct_r1_p2__abs_pow_1.5");
    check_cell("direct_r0_inf__one_minus_x_pow_0.5");
}

#[test]
fn hierarchy() {
    check_cell("hierarchy_k2_r0_inf__abs_pow_1.5");
}

#[test]
fn sharp_corollaries() {
    check_cell("sharp_marchaud_m3_p2__abs_pow_1.5");
    check_cell("sharp_jackson_m2_p3__abs_pow_0.5");
}

#[test]
fn characterization() {
    check_cell("characterization_r0__abs_pow_1.5");
}

#[test]
fn weighted() {
    check_cell("weighted_jackson_w00__abs_pow_1.5");
    check_cell("weighted_transfer_w05__abs_pow_1.5");
}
