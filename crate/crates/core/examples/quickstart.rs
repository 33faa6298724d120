//! Fuse 30 noisy HF runs with a cheap LF model and print intervals.

use mfpce_core::benchmarks::{gaussian_noise, one_d_pair};
use mfpce_core::{bootstrap_ensemble, lhs_sample, ExperimentalDesign, LowFidelitySource, MfConfig};

fn main() -> Result<(), mfpce_core::Error> {
    let pair = one_d_pair();
    let seed = 42;

    // scarce, noisy HF data
    let x = lhs_sample(&pair.rv, 30, seed)?;
    let noise = gaussian_noise(0.08, seed, 0, x.len());
    let y = x.iter().zip(&noise).map(|(x, e)| pair.hf.eval(x) + e).collect();
    let hf = ExperimentalDesign::new(x, y)?;

    // the LF model is sampled 100 times and replaced by its own PCE
    let lf = LowFidelitySource::Sampled { model: pair.lf.clone(), n: 100 };
    let ens = bootstrap_ensemble(&hf, &lf, &pair.rv, &MfConfig::with_pce(pair.pce), 500, seed)?;
    let noise = ens.fit_noise()?;
    println!("noise: {:?}, sigma = {:.4}", noise.family, noise.std());

    for (i, q) in [0.1, 0.5, 1.2, 1.9].iter().enumerate() {
        let r = ens.intervals(&[*q], &[0.05], Some(&noise), seed, i as u64)?;
        let (ci, pi) = (r.ci[0], r.pi[0]);
        println!(
            "x = {q:.2}  mean {:+.4}  90% CI [{:+.4}, {:+.4}]  90% PI [{:+.4}, {:+.4}]  truth {:+.4}",
            r.mean, ci.lower, ci.upper, pi.lower, pi.upper, pair.hf.eval(&[*q])
        );
    }
    Ok(())
}
