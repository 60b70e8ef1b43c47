//! Exact sampling of critical Galton-Watson trees conditioned on their total
//! vertex count: draw i.i.d. offspring numbers conditioned on their sum
//! (rejection with an early running-sum abort), then rotate the resulting
//! bridge into the unique valid Łukasiewicz excursion (cycle lemma).

use crate::tree::PlaneTree;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SampleError {
    #[error("no tree with {n} vertices has positive probability under {law}")]
    InadmissibleSize { law: String, n: usize },
    #[error("rejection sampler exhausted its budget of {attempts} attempts")]
    BudgetExhausted { attempts: u64 },
    #[error("stable index must lie strictly between 1 and 2, got {0}")]
    BadStableIndex(f64),
}

/// Reproducible generator handle: the same (seed, stream) pair always yields
/// the same draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seeded {
    pub seed: u64,
    pub stream: u64,
}

impl Seeded {
    pub fn new(seed: u64, stream: u64) -> Self {
        Seeded { seed, stream }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Terms and a tail estimate for sums of k^-s, via Euler-Maclaurin from a
/// cutoff; accurate far beyond the f64 noise floor for s > 1.
fn zeta_tail(from: f64, s: f64) -> f64 {
    let k = from;
    k.powf(1.0 - s) / (s - 1.0) + 0.5 * k.powf(-s) + s * k.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * k.powf(-s - 3.0) / 720.0
}

fn zeta(s: f64) -> f64 {
    const CUTOFF: u64 = 20_000;
    let mut sum = 0.0f64;
    for k in 1..CUTOFF {
        sum += (k as f64).powf(-s);
    }
    sum + zeta_tail(CUTOFF as f64, s)
}

/// Critical offspring distribution.
#[derive(Debug, Clone)]
pub enum OffspringLaw {
    /// Geometric on {0,1,2,...} with success 1/2: mass 2^-(k+1), variance 2.
    Geometric,
    /// Half a chance of no child, half of two: variance 1.
    Binary,
    /// Poisson with unit mean: variance 1.
    Poisson,
    /// Heavy tail: mass proportional to k^-(1+alpha) for k >= 1, the mass at
    /// zero fixed by criticality.  Infinite variance, tail exponent alpha.
    StableZipf(StableZipf),
}

#[derive(Debug, Clone)]
pub struct StableZipf {
    pub alpha: f64,
    /// 1/zeta(alpha): normalizer making the mean exactly one.
    scale: f64,
    mass_at_zero: f64,
    /// cumulative masses for 0..=TABLE, for inversion sampling
    cumulative: Vec<f64>,
}

const ZIPF_TABLE: usize = 1 << 16;

impl StableZipf {
    fn new(alpha: f64) -> Result<Self, SampleError> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(SampleError::BadStableIndex(alpha));
        }
        let scale = 1.0 / zeta(alpha);
        let mass_at_zero = 1.0 - scale * zeta(1.0 + alpha);
        let mut cumulative = Vec::with_capacity(ZIPF_TABLE + 1);
        let mut acc = mass_at_zero;
        cumulative.push(acc);
        for k in 1..=ZIPF_TABLE {
            acc += scale * (k as f64).powf(-1.0 - alpha);
            cumulative.push(acc);
        }
        Ok(StableZipf { alpha, scale, mass_at_zero, cumulative })
    }

    fn pmf(&self, k: u64) -> f64 {
        if k == 0 {
            self.mass_at_zero
        } else {
            self.scale * (k as f64).powf(-1.0 - self.alpha)
        }
    }

    /// P(X >= k) for k >= 1, from the analytic tail sum.
    pub fn survival(&self, k: u64) -> f64 {
        self.scale * zeta_tail(k as f64, 1.0 + self.alpha)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        if u < *self.cumulative.last().unwrap() {
            return self.cumulative.partition_point(|&c| c < u) as u64;
        }
        // Far tail: invert P(X <= k) numerically.  Reached ~1e-7 of draws.
        let mut lo = ZIPF_TABLE as u64;
        let mut hi = lo * 2;
        let cdf = |k: u64| 1.0 - self.scale * zeta_tail((k + 1) as f64, 1.0 + self.alpha);
        while cdf(hi) < u && hi < 1 << 50 {
            lo = hi;
            hi *= 2;
        }
        while lo + 1 < hi {
            let mid = lo + (hi - lo) / 2;
            if cdf(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

impl OffspringLaw {
    pub fn geometric() -> Self {
        OffspringLaw::Geometric
    }

    pub fn binary() -> Self {
        OffspringLaw::Binary
    }

    pub fn poisson() -> Self {
        OffspringLaw::Poisson
    }

    pub fn stable(alpha: f64) -> Result<Self, SampleError> {
        Ok(OffspringLaw::StableZipf(StableZipf::new(alpha)?))
    }

    /// Parses "geom" | "binary" | "poisson" | "stable:<alpha>".
    pub fn parse(spec: &str) -> Result<Self, SampleError> {
        match spec {
            "geom" => Ok(Self::geometric()),
            "binary" => Ok(Self::binary()),
            "poisson" => Ok(Self::poisson()),
            other => {
                if let Some(a) = other.strip_prefix("stable:") {
                    let alpha: f64 =
                        a.parse().map_err(|_| SampleError::BadStableIndex(f64::NAN))?;
                    Self::stable(alpha)
                } else {
                    Err(SampleError::InadmissibleSize { law: other.to_string(), n: 0 })
                }
            }
        }
    }

    pub fn tag(&self) -> String {
        match self {
            OffspringLaw::Geometric => "geom".into(),
            OffspringLaw::Binary => "binary".into(),
            OffspringLaw::Poisson => "poisson".into(),
            OffspringLaw::StableZipf(z) => format!("stable:{}", z.alpha),
        }
    }

    pub fn pmf(&self, k: u64) -> f64 {
        match self {
            OffspringLaw::Geometric => 0.5f64.powi(k as i32 + 1),
            OffspringLaw::Binary => {
                if k == 0 || k == 2 {
                    0.5
                } else {
                    0.0
                }
            }
            OffspringLaw::Poisson => {
                if k > 170 {
                    return 0.0; // factorial overflows f64; mass below 1e-300
                }
                let mut factorial = 1.0f64;
                for i in 1..=k {
                    factorial *= i as f64;
                }
                (-1.0f64).exp() / factorial
            }
            OffspringLaw::StableZipf(z) => z.pmf(k),
        }
    }

    /// Mean is one by construction for every variant.
    pub fn mean(&self) -> f64 {
        1.0
    }

    /// None where the variance is infinite.
    pub fn variance(&self) -> Option<f64> {
        match self {
            OffspringLaw::Geometric => Some(2.0),
            OffspringLaw::Binary => Some(1.0),
            OffspringLaw::Poisson => Some(1.0),
            OffspringLaw::StableZipf(_) => None,
        }
    }

    pub fn tail_exponent(&self) -> Option<f64> {
        match self {
            OffspringLaw::StableZipf(z) => Some(z.alpha),
            _ => None,
        }
    }

    /// Whether a tree with n vertices has positive probability.
    pub fn admissible(&self, n: usize) -> bool {
        match self {
            OffspringLaw::Binary => n % 2 == 1,
            _ => n >= 1,
        }
    }

    pub fn sample_offspring<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self {
            OffspringLaw::Geometric => {
                let mut k = 0u64;
                while rng.random::<bool>() {
                    k += 1;
                }
                k
            }
            OffspringLaw::Binary => {
                if rng.random::<bool>() {
                    2
                } else {
                    0
                }
            }
            OffspringLaw::Poisson => {
                // inversion by sequential search around the unit mean
                let mut u: f64 = rng.random();
                let mut k = 0u64;
                let mut p = (-1.0f64).exp();
                loop {
                    if u < p {
                        return k;
                    }
                    u -= p;
                    k += 1;
                    p /= k as f64;
                    if k > 500 {
                        return k;
                    }
                }
            }
            OffspringLaw::StableZipf(z) => z.sample(rng),
        }
    }
}

pub const DEFAULT_ATTEMPT_BUDGET: u64 = 5_000_000;

/// One exact draw from the law of a Galton-Watson tree conditioned to have
/// exactly n vertices.
pub fn sample_conditioned<R: Rng + ?Sized>(
    law: &OffspringLaw,
    n: usize,
    rng: &mut R,
) -> Result<PlaneTree, SampleError> {
    sample_conditioned_with_budget(law, n, rng, DEFAULT_ATTEMPT_BUDGET)
}

pub fn sample_conditioned_seeded(
    law: &OffspringLaw,
    n: usize,
    seed: Seeded,
) -> Result<PlaneTree, SampleError> {
    sample_conditioned(law, n, &mut seed.rng())
}

pub fn sample_conditioned_with_budget<R: Rng + ?Sized>(
    law: &OffspringLaw,
    n: usize,
    rng: &mut R,
    max_attempts: u64,
) -> Result<PlaneTree, SampleError> {
    if n == 0 || !law.admissible(n) {
        return Err(SampleError::InadmissibleSize { law: law.tag(), n });
    }
    if n == 1 {
        return Ok(PlaneTree::singleton());
    }
    let target = (n - 1) as u64;
    let mut degrees: Vec<u64> = Vec::with_capacity(n);
    let mut attempts = 0u64;
    loop {
        attempts += 1;
        if attempts > max_attempts {
            return Err(SampleError::BudgetExhausted { attempts: max_attempts });
        }
        degrees.clear();
        let mut sum = 0u64;
        let mut ok = true;
        for _ in 0..n {
            let d = law.sample_offspring(rng);
            sum += d;
            if sum > target {
                ok = false;
                break;
            }
            degrees.push(d);
        }
        if ok && sum == target {
            break;
        }
    }
    // Cycle lemma: rotate the bridge at the first minimum of its partial sums
    // of (degree - 1); the rotated sequence is the unique valid excursion.
    let mut best_pos = 0usize;
    let mut best = i64::MAX;
    let mut walk = 0i64;
    for (i, &d) in degrees.iter().enumerate() {
        walk += d as i64 - 1;
        if walk < best {
            best = walk;
            best_pos = i + 1;
        }
    }
    let rotated: Vec<u32> = degrees[best_pos % n..]
        .iter()
        .chain(degrees[..best_pos % n].iter())
        .map(|&d| d as u32)
        .collect();
    Ok(PlaneTree::from_degrees(rotated).expect("cycle lemma yields a valid excursion"))
}

/// Brute-force conditional distribution over all shapes with n vertices:
/// pairs of (tree, conditional probability).  Exponential in n; for oracles.
pub fn conditional_shape_table(law: &OffspringLaw, n: usize) -> Vec<(PlaneTree, f64)> {
    let all = crate::tree::enumerate_plane_trees(n);
    let mut weights: Vec<f64> = all
        .iter()
        .map(|t| t.degrees().iter().map(|&d| law.pmf(u64::from(d))).product())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    all.into_iter().zip(weights).filter(|(_, p)| *p > 0.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_spot_values() {
        assert!((zeta(2.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
        assert!((zeta(1.5) - 2.612375348685488).abs() < 1e-10);
    }

    #[test]
    fn laws_are_critical_and_normalized() {
        for law in [
            OffspringLaw::geometric(),
            OffspringLaw::binary(),
            OffspringLaw::poisson(),
            OffspringLaw::stable(1.5).unwrap(),
            OffspringLaw::stable(1.1).unwrap(),
            OffspringLaw::stable(1.9).unwrap(),
        ] {
            let mut mass = 0.0;
            let mut mean = 0.0;
            for k in 0..200_000u64 {
                let p = law.pmf(k);
                mass += p;
                mean += k as f64 * p;
            }
            if let OffspringLaw::StableZipf(z) = &law {
                // analytic tail beyond the summation cutoff
                mass += z.scale * zeta_tail(200_000.0, 1.0 + z.alpha);
                mean += z.scale * zeta_tail(200_000.0, z.alpha);
            }
            assert!((mass - 1.0).abs() < 1e-9, "{}: mass {mass}", law.tag());
            assert!((mean - 1.0).abs() < 1e-9, "{}: mean {mean}", law.tag());
        }
    }

    #[test]
    fn stable_index_validation() {
        assert!(OffspringLaw::stable(1.0).is_err());
        assert!(OffspringLaw::stable(2.0).is_err());
        assert!(OffspringLaw::stable(0.5).is_err());
        assert!(OffspringLaw::parse("stable:1.5").is_ok());
        assert!(OffspringLaw::parse("cauchy").is_err());
    }

    #[test]
    fn stable_tail_slope_matches_alpha() {
        // log-log regression of the survival function over k in [10, 1e4]
        for alpha in [1.2, 1.5, 1.8] {
            let law = OffspringLaw::stable(alpha).unwrap();
            let z = match &law {
                OffspringLaw::StableZipf(z) => z,
                _ => unreachable!(),
            };
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            let mut k = 10u64;
            while k <= 10_000 {
                xs.push((k as f64).ln());
                ys.push(z.survival(k).ln());
                k = (k as f64 * 1.3) as u64 + 1;
            }
            let mean_x: f64 = xs.iter().sum::<f64>() / xs.len() as f64;
            let mean_y: f64 = ys.iter().sum::<f64>() / ys.len() as f64;
            let slope: f64 = xs
                .iter()
                .zip(&ys)
                .map(|(x, y)| (x - mean_x) * (y - mean_y))
                .sum::<f64>()
                / xs.iter().map(|x| (x - mean_x).powi(2)).sum::<f64>();
            assert!((slope + alpha).abs() < 0.1, "alpha={alpha}: slope {slope}");
        }
    }

    #[test]
    fn sampled_trees_have_exactly_n_vertices() {
        let mut rng = Seeded::new(7, 0).rng();
        for law in [
            OffspringLaw::geometric(),
            OffspringLaw::poisson(),
            OffspringLaw::stable(1.5).unwrap(),
        ] {
            for n in [1usize, 2, 3, 17, 256] {
                let t = sample_conditioned(&law, n, &mut rng).unwrap();
                assert_eq!(t.n(), n);
            }
        }
        let t = sample_conditioned(&OffspringLaw::binary(), 41, &mut rng).unwrap();
        assert_eq!(t.n(), 41);
    }

    #[test]
    fn binary_parity_rejected() {
        let mut rng = Seeded::new(1, 0).rng();
        let err = sample_conditioned(&OffspringLaw::binary(), 4, &mut rng).unwrap_err();
        assert!(matches!(err, SampleError::InadmissibleSize { n: 4, .. }));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let mut rng = Seeded::new(1, 0).rng();
        let err =
            sample_conditioned_with_budget(&OffspringLaw::geometric(), 300, &mut rng, 1);
        // one attempt at n=300 virtually never hits the bridge condition
        assert!(matches!(err, Err(SampleError::BudgetExhausted { .. })));
    }

    #[test]
    fn same_seed_same_tree() {
        let law = OffspringLaw::stable(1.5).unwrap();
        let a = sample_conditioned_seeded(&law, 500, Seeded::new(42, 3)).unwrap();
        let b = sample_conditioned_seeded(&law, 500, Seeded::new(42, 3)).unwrap();
        assert_eq!(a, b);
        let c = sample_conditioned_seeded(&law, 500, Seeded::new(42, 4)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn binary_n3_is_deterministic() {
        let mut rng = Seeded::new(9, 0).rng();
        for _ in 0..50 {
            let t = sample_conditioned(&OffspringLaw::binary(), 3, &mut rng).unwrap();
            assert_eq!(t.degrees(), &[2, 0, 0]);
        }
    }

    #[test]
    fn geometric_n3_is_uniform_over_two_shapes() {
        // both 3-vertex shapes carry equal weight under the geometric law
        let table = conditional_shape_table(&OffspringLaw::geometric(), 3);
        assert_eq!(table.len(), 2);
        assert!((table[0].1 - 0.5).abs() < 1e-12);
        assert!((table[1].1 - 0.5).abs() < 1e-12);
        let mut rng = Seeded::new(11, 0).rng();
        let mut cherry = 0u32;
        let draws = 10_000;
        for _ in 0..draws {
            let t = sample_conditioned(&OffspringLaw::geometric(), 3, &mut rng).unwrap();
            if t.degrees() == [2, 0, 0] {
                cherry += 1;
            }
        }
        let freq = f64::from(cherry) / f64::from(draws);
        assert!((freq - 0.5).abs() < 0.02, "frequency {freq}");
    }

    #[test]
    fn geometric_n4_table() {
        // 5 shapes, all weights equal under geometric(1/2) so each is 1/5
        let table = conditional_shape_table(&OffspringLaw::geometric(), 4);
        assert_eq!(table.len(), 5);
        for (_, p) in &table {
            assert!((p - 0.2).abs() < 1e-12);
        }
    }
}
