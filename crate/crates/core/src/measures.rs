//! Exact size-indexed measures.
//!
//! A measure assigns a non-negative rational weight to every set size
//! `0..=n`; the measure of a family is the sum of the weights of its members.
//! Index 0 is outside the sizes `[n]` the theory talks about. Tables read
//! from JSON default it to 0 when only `n` weights are given; the built-in
//! constructors use whatever their formula yields there.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::exact::{binomial, format_rational, is_non_negative, parse_rational};
use crate::setcore::Family;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureTable {
    n: usize,
    weights: Vec<BigRational>,
    window: Option<(usize, usize)>,
}

impl MeasureTable {
    /// Builds a table from `n + 1` weights (sizes `0..=n`).
    ///
    /// The window is only range-checked here; whether the weights really are
    /// non-increasing on it is reported by [`MeasureTable::validate_window`].
    pub fn new(
        n: usize,
        weights: Vec<BigRational>,
        window: Option<(usize, usize)>,
    ) -> Result<MeasureTable> {
        if weights.len() != n + 1 {
            return param(format!(
                "measure over n = {n} needs {} weights, got {}",
                n + 1,
                weights.len()
            ));
        }
        if let Some(i) = weights.iter().position(|w| !is_non_negative(w)) {
            return param(format!("weight at size {i} is negative"));
        }
        if let Some((k, khat)) = window {
            if k > khat || khat > n {
                return param(format!("window [{k}, {khat}] invalid for n = {n}"));
            }
        }
        Ok(MeasureTable { n, weights, window })
    }

    /// Constant weight 1, the counting measure. Non-increasing on `[1, n]`.
    pub fn counting(n: usize) -> MeasureTable {
        MeasureTable {
            n,
            weights: vec![BigRational::one(); n + 1],
            window: (n >= 1).then_some((1, n)),
        }
    }

    /// `ϱ_p(F) = p^|F| (1 - p)^(n - |F|)`.
    ///
    /// The declared window is `[1, n]` when `p ≤ 1/2`, where the table is
    /// non-increasing, and absent otherwise.
    pub fn product(n: usize, p: &BigRational) -> Result<MeasureTable> {
        if p < &BigRational::zero() || p > &BigRational::one() {
            return param(format!("product measure needs p in [0, 1], got {p}"));
        }
        let q = BigRational::one() - p;
        let weights = (0..=n)
            .map(|s| num_traits::pow(p.clone(), s) * num_traits::pow(q.clone(), n - s))
            .collect();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let window = (n >= 1 && p <= &half).then_some((1, n));
        Ok(MeasureTable { n, weights, window })
    }

    /// `ν_k`: weight `1 / C(n, k)` on size `k`, zero elsewhere. Window `[k, n]`.
    pub fn uniform(n: usize, k: usize) -> Result<MeasureTable> {
        if k == 0 || k > n {
            return param(format!("uniform measure needs 1 ≤ k ≤ n, got k = {k}, n = {n}"));
        }
        let mut weights = vec![BigRational::zero(); n + 1];
        weights[k] = BigRational::new(BigInt::one(), binomial(n, k));
        Ok(MeasureTable {
            n,
            weights,
            window: Some((k, n)),
        })
    }

    /// `C(n, k) ν_k`, i.e. counting restricted to the `k`-th level.
    pub fn level_count(n: usize, k: usize) -> Result<MeasureTable> {
        let scaled = MeasureTable::uniform(n, k)?.scaled(&BigRational::from_integer(binomial(n, k)));
        Ok(scaled)
    }

    /// Parses a built-in name: `count`, `product:<p>`, `uniform:<k>`, or
    /// `level:<k>` (the scaled uniform measure).
    pub fn from_spec(spec: &str, n: usize) -> Result<MeasureTable> {
        let spec = spec.trim();
        if spec == "count" {
            return Ok(MeasureTable::counting(n));
        }
        let (name, arg) = spec
            .split_once(':')
            .ok_or_else(|| Error::Format(format!("unknown measure {spec:?}")))?;
        match name {
            "product" => MeasureTable::product(n, &parse_rational(arg)?),
            "uniform" | "level" => {
                let k: usize = arg
                    .trim()
                    .parse()
                    .map_err(|_| Error::Format(format!("bad level in measure {spec:?}")))?;
                if name == "uniform" {
                    MeasureTable::uniform(n, k)
                } else {
                    MeasureTable::level_count(n, k)
                }
            }
            _ => Err(Error::Format(format!("unknown measure {spec:?}"))),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn weight(&self, size: usize) -> &BigRational {
        &self.weights[size]
    }

    pub fn window(&self) -> Option<(usize, usize)> {
        self.window
    }

    pub fn with_window(mut self, window: Option<(usize, usize)>) -> Result<MeasureTable> {
        if let Some((k, khat)) = window {
            if k > khat || khat > self.n {
                return param(format!("window [{k}, {khat}] invalid for n = {}", self.n));
            }
        }
        self.window = window;
        Ok(self)
    }

    pub fn scaled(&self, factor: &BigRational) -> MeasureTable {
        MeasureTable {
            n: self.n,
            weights: self.weights.iter().map(|w| w * factor).collect(),
            window: self.window,
        }
    }

    /// `μ(f) = Σ_{F ∈ f} μ(|F|)`.
    pub fn measure(&self, f: &Family) -> Result<BigRational> {
        if f.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: f.n(),
            });
        }
        Ok(self.measure_level_sizes(&f.level_sizes()))
    }

    pub(crate) fn measure_level_sizes(&self, sizes: &[usize]) -> BigRational {
        sizes
            .iter()
            .zip(&self.weights)
            .filter(|(&c, _)| c > 0)
            .map(|(&c, w)| w * BigInt::from(c))
            .fold(BigRational::zero(), |acc, x| acc + x)
    }

    /// Exact check that the weights never increase across `[lo, hi]`.
    pub fn is_non_increasing_on(&self, lo: usize, hi: usize) -> bool {
        if lo > hi || hi > self.n {
            return false;
        }
        self.weights[lo..=hi].windows(2).all(|w| w[0] >= w[1])
    }

    /// Whether the weights are non-increasing across the declared window.
    pub fn validate_window(&self) -> Result<bool> {
        let (k, khat) = self
            .window
            .ok_or_else(|| Error::Param("measure has no declared window".into()))?;
        Ok(self.is_non_increasing_on(k, khat))
    }

    pub fn from_json_str(text: &str) -> Result<MeasureTable> {
        let raw: RawMeasure =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("measure JSON: {e}")))?;
        MeasureTable::from_raw(raw)
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<MeasureTable> {
        let raw: RawMeasure =
            serde_json::from_value(value).map_err(|e| Error::Format(format!("measure JSON: {e}")))?;
        MeasureTable::from_raw(raw)
    }

    fn from_raw(raw: RawMeasure) -> Result<MeasureTable> {
        if raw.n > crate::setcore::MAX_SUBSET_N as u64 {
            return Err(Error::Format(format!("measure n = {} too large", raw.n)));
        }
        let n = raw.n as usize;
        let mut weights = raw
            .weights
            .iter()
            .enumerate()
            .map(|(i, w)| {
                parse_rational(w).map_err(|e| Error::Format(format!("weights[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if weights.len() == n {
            weights.insert(0, BigRational::zero());
        }
        let window = raw.window.map(|[k, khat]| (k as usize, khat as usize));
        if let Some((k, khat)) = raw.window.map(|[a, b]| (a, b)) {
            if k > khat || khat > raw.n {
                return Err(Error::Format(format!("window [{k}, {khat}] invalid for n = {n}")));
            }
        }
        MeasureTable::new(n, weights, window).map_err(|e| match e {
            Error::Param(m) => Error::Format(m),
            other => other,
        })
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let raw = RawMeasureOut {
            n: self.n,
            weights: self.weights.iter().map(format_rational).collect(),
            window: self.window.map(|(a, b)| [a, b]),
        };
        serde_json::to_value(raw).expect("measure serialises")
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    n: u64,
    weights: Vec<String>,
    #[serde(default)]
    window: Option<[u64; 2]>,
}

#[derive(Debug, Serialize)]
struct RawMeasureOut {
    n: usize,
    weights: Vec<String>,
    window: Option<[usize; 2]>,
}

/// `measure_family` as a free function.
pub fn measure_family(mu: &MeasureTable, f: &Family) -> Result<BigRational> {
    mu.measure(f)
}

pub fn product_measure(n: usize, p: &BigRational) -> Result<MeasureTable> {
    MeasureTable::product(n, p)
}

pub fn uniform_measure(n: usize, k: usize) -> Result<MeasureTable> {
    MeasureTable::uniform(n, k)
}

pub fn validate_window(mu: &MeasureTable) -> Result<bool> {
    mu.validate_window()
}
