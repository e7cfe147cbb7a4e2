//! End-to-end runs of the positivity campaign on the reduced mixed-mechanism
//! network.

use hopfcheck::cone::extreme_rays;
use hopfcheck::fixtures;
use hopfcheck::prover::{
    run_campaign, sample_implication, CampaignOptions, CampaignTarget, Mode, SampleOptions,
};
use hopfcheck::spectral::{convex_system, ConvexSystem};

fn system() -> (ConvexSystem, CampaignTarget) {
    let net = fixtures::network("g1r").unwrap().unwrap();
    let rays = extreme_rays(&net.stoichiometric_matrix()).unwrap();
    let sys = convex_system(
        &net.stoichiometric_matrix(),
        &net.reactant_matrix(),
        &rays.e,
    )
    .unwrap();
    let target = CampaignTarget::resolve(&net, &rays, &sys).unwrap();
    (sys, target)
}

#[test]
fn fast_campaign_certifies_the_reduced_network() {
    let (sys, target) = system();
    let opts = CampaignOptions {
        mode: Mode::Fast,
        label: "g1r".into(),
        shadow_samples: 60,
        coverage_samples: 512,
        ..Default::default()
    };
    let report = run_campaign(&sys, &target, &opts).unwrap();
    println!("{}", serde_json::to_string_pretty(&report).unwrap());

    assert_eq!(report.network, "g1r");
    assert_eq!(report.mode, "fast");
    assert!(report.checks.iter().all(|c| c.passed), "{:?}", report.checks);
    assert_eq!(report.certificates.len(), 10);
    for cert in &report.certificates {
        assert!(
            cert.verdict == "positive" || cert.verdict == "incomplete",
            "unexpected verdict {}",
            cert.verdict
        );
    }
    assert!(report.verdict == "positive" || report.verdict == "positive-on-checked-subset");
    assert_eq!(report.complete, report.verdict == "positive");
}

#[test]
fn sampler_agrees_and_negative_control_fires() {
    let (sys, target) = system();
    let ok = sample_implication(
        &sys,
        &target,
        &SampleOptions {
            trials: 256,
            seed: 7,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(ok.accepted > 0);
    assert_eq!(ok.violations, 0);

    let broken = sample_implication(
        &sys,
        &target,
        &SampleOptions {
            trials: 256,
            seed: 7,
            negative_control: true,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(broken.violations > 0);
}
