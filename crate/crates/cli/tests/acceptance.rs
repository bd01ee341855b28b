//! Acceptance criteria. Each test prints its report, so a plain
//! `cargo test` run shows the per-check outcome for failing criteria and
//! `--nocapture` shows it for all of them.

use cavstat_cli::validate::{self, CriterionReport};

fn check(report: CriterionReport) {
    println!("{report}");
    assert!(report.passed(), "criterion {} failed:\n{report}", report.id);
}

#[test]
fn criterion_01_printed_equations() {
    check(validate::criterion_1());
}

#[test]
fn criterion_02_mean_photon_closed_form() {
    check(validate::criterion_2());
}

#[test]
fn criterion_03_g2_closed_form() {
    check(validate::criterion_3());
}

#[test]
fn criterion_04_small_kappa_limits() {
    check(validate::criterion_4());
}

#[test]
fn criterion_05_incoherent_baselines() {
    check(validate::criterion_5());
}

#[test]
fn criterion_06_g0_independence() {
    check(validate::criterion_6());
}

#[test]
fn criterion_07_density_matrix_oracle() {
    check(validate::criterion_7());
}

#[test]
fn criterion_08_dressed_dynamics() {
    check(validate::criterion_8());
}

#[test]
fn criterion_09_figure_trends() {
    check(validate::criterion_9());
}

#[test]
fn criterion_10_deterministic_output() {
    check(validate::criterion_10());
}
