//! Exact rational oracles and their Monte Carlo counterpart.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::AnalysisError;

/// Largest `m^k` [`distinct_value_enumerate`] agrees to walk through.
pub const ENUMERATION_CAP: u64 = 10_000_000;

fn int(n: u64) -> BigInt {
    BigInt::from(n)
}

/// Probability that `k` values drawn uniformly from `1..=m` are pairwise
/// distinct: `m! / (m^k (m-k)!)`, i.e. the falling factorial over `m^k`.
pub fn distinct_value_probability(m: u64, k: u64) -> Result<BigRational, AnalysisError> {
    if k == 0 || m == 0 {
        return Err(AnalysisError::Domain(format!("need 1 ≤ k ≤ m, got m={m}, k={k}")));
    }
    if k > m {
        return Err(AnalysisError::Domain(format!("k={k} exceeds m={m}: no injective labelling")));
    }
    let falling: BigInt = (m - k + 1..=m).map(int).product();
    let total = num_traits::pow(int(m), k as usize);
    Ok(BigRational::new(falling, total))
}

/// The same probability by counting the injective assignments among all
/// `m^k` of them. Refuses above [`ENUMERATION_CAP`].
pub fn distinct_value_enumerate(m: u64, k: u64) -> Result<BigRational, AnalysisError> {
    if m == 0 || k == 0 {
        return Err(AnalysisError::Domain(format!("need m, k ≥ 1, got m={m}, k={k}")));
    }
    let total = (m as u128).checked_pow(k as u32).filter(|&t| t <= ENUMERATION_CAP as u128);
    let Some(total) = total else {
        return Err(AnalysisError::CapExceeded(format!("{m}^{k} assignments exceed {ENUMERATION_CAP}")));
    };
    let (m, k) = (m as usize, k as usize);
    let mut digits = vec![0usize; k];
    let mut injective: u64 = 0;
    for _ in 0..total {
        let ok = (0..k).all(|i| (i + 1..k).all(|j| digits[i] != digits[j]));
        injective += ok as u64;
        for d in digits.iter_mut() {
            *d += 1;
            if *d < m {
                break;
            }
            *d = 0;
        }
    }
    Ok(BigRational::new(int(injective), int(total as u64)))
}

/// Result of a Monte Carlo labelling experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistinctSample {
    pub samples: u64,
    pub distinct: u64,
}

impl DistinctSample {
    pub fn estimate(&self) -> f64 {
        self.distinct as f64 / self.samples as f64
    }

    /// Distance from `p` in binomial standard deviations.
    pub fn sigmas_from(&self, p: f64) -> f64 {
        let sd = (p * (1.0 - p) / self.samples as f64).sqrt();
        if sd == 0.0 {
            if (self.estimate() - p).abs() == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.estimate() - p).abs() / sd
        }
    }
}

/// Labels `k` forks uniformly from `1..=m`, `samples` times.
pub fn distinct_value_monte_carlo(m: u32, k: usize, samples: u64, seed: u64) -> DistinctSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = vec![0u32; k];
    let mut distinct = 0;
    for _ in 0..samples {
        for l in labels.iter_mut() {
            *l = rng.gen_range(1..=m);
        }
        labels.sort_unstable();
        distinct += labels.windows(2).all(|w| w[0] != w[1]) as u64;
    }
    DistinctSample { samples, distinct }
}

/// Both sides of `∏_{k=1}^{m} (1 − p^k) ≥ 1 − p − p² + p^{m+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductBound {
    pub product: BigRational,
    pub bound: BigRational,
    /// `1 − p − p²`, the bound as `m → ∞`.
    pub limit_bound: BigRational,
}

impl ProductBound {
    pub fn holds(&self) -> bool {
        self.product >= self.bound
    }
}

pub fn product_lower_bound(p: &BigRational, m: u32) -> Result<ProductBound, AnalysisError> {
    let half = BigRational::new(int(1), int(2));
    if *p <= BigRational::zero() || *p > half {
        return Err(AnalysisError::Domain(format!("p must lie in (0, 1/2], got {p}")));
    }
    if m == 0 {
        return Err(AnalysisError::Domain("m must be at least 1".into()));
    }
    let one = BigRational::one();
    let mut product = one.clone();
    let mut power = one.clone();
    for _ in 0..m {
        power *= p;
        product *= &one - &power;
    }
    let p2 = p * p;
    let limit_bound = &one - p - &p2;
    let bound = &limit_bound + power * p;
    Ok(ProductBound {
        product,
        bound,
        limit_bound,
    })
}

/// Parses `a/b`, an integer, or a finite decimal such as `0.3` exactly.
pub fn parse_rational(text: &str) -> Result<BigRational, AnalysisError> {
    let t = text.trim();
    let bad = || AnalysisError::Domain(format!("not a rational number: `{text}`"));
    if let Some((a, b)) = t.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
        let scale = num_traits::pow(int(10), frac.len());
        return Ok(BigRational::new(digits, scale));
    }
    t.parse::<BigInt>().map(BigRational::from_integer).map_err(|_| bad())
}

/// `a/b` in lowest terms (`a` for integers).
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A rational as the nearest `f64`.
pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
