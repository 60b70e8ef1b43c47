use planetree::experiments::*;
use planetree::sampler::*;
use std::time::Instant;

fn main() {
    let law = OffspringLaw::stable(1.5).unwrap();
    let geom = OffspringLaw::geometric();
    for (tag, pair, law, grid) in [
        ("a", M1Pair::RotContourVsMirrorLuka, &law, 4096usize),
        ("b", M1Pair::CorotLukaVsLuka, &law, 4096),
        ("c", M1Pair::ContourVsHeight, &geom, 8192),
    ] {
        for n in [1000usize, 10_000, 100_000] {
            let t0 = Instant::now();
            let mut vals = vec![];
            for rep in 0..5u64 {
                let tree = sample_conditioned_seeded(law, n, Seeded::new(100, rep)).unwrap();
                let (x, y) = pair.walks(&tree);
                vals.push(normalized_m1_statistic(&x, &y, grid));
            }
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            println!(
                "pair {tag} n={n}: median {:.4} (min {:.4} max {:.4}) [{:?}]",
                vals[2], vals[0], vals[4], t0.elapsed()
            );
        }
    }
}
