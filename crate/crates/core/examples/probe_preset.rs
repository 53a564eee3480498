use bourgain::search::{large_n_preset, PresetOutcome};

fn main() {
    for n in 10..=13 {
        match large_n_preset(n).unwrap() {
            PresetOutcome::Evaluated { n, cert, alpha, rate_claim } => {
                println!(
                    "n={n}: admissible={} eta_ok={} gamma_ok={} prelemma={} bound=[{:e},{:e}] alpha.hi={:e} k={} gamma=[{:.6},{:.6}] rho=[{:e},{:e}] rate={rate_claim:?}",
                    cert.admissible, cert.eta_admissible, cert.gamma_below_one,
                    cert.prelemma_verified, cert.bound.lo(), cert.bound.hi(),
                    alpha.value.hi(), alpha.k_argmin,
                    cert.gamma.lo(), cert.gamma.hi(), cert.rho.lo(), cert.rho.hi(),
                );
            }
            PresetOutcome::InvalidConfig { n, reason } => println!("n={n}: invalid: {reason}"),
        }
    }
}
