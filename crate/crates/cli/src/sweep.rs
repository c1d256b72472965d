// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

/// `param:lo:hi:steps[:linear|log]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub param: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub scale: Scale,
}

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(format!("expected param:lo:hi:steps[:linear|log], got `{s}`"));
        }
        let num = |t: &str, what: &str| {
            t.parse::<f64>()
                .map_err(|_| format!("{what} `{t}` is not a number"))
        };
        let lo = num(parts[1], "lo")?;
        let hi = num(parts[2], "hi")?;
        let steps: usize = parts[3]
            .parse()
            .map_err(|_| format!("steps `{}` is not a count", parts[3]))?;
        let scale = match parts.get(4).copied() {
            None | Some("linear") => Scale::Linear,
            Some("log") => Scale::Log,
            Some(o) => return Err(format!("unknown scale `{o}`")),
        };
        let spec = SweepSpec {
            param: parts[0].to_string(),
            lo,
            hi,
            steps,
            scale,
        };
        spec.check()?;
        Ok(spec)
    }
}

impl fmt::Display for SweepSpec {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let scale = match self.scale {
            Scale::Linear => "linear",
            Scale::Log => "log",
        };
        write!(f, "{}:{}:{}:{}:{scale}", self.param, self.lo, self.hi, self.steps)
    }
}

impl SweepSpec {
    fn check(&self) -> Result<(), String> {
        if self.param.is_empty() {
            return Err("sweep parameter name is empty".into());
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(format!("need finite lo < hi, got {} and {}", self.lo, self.hi));
        }
        if self.steps < 2 {
            return Err(format!("need at least 2 steps, got {}", self.steps));
        }
        if self.scale == Scale::Log && self.lo <= 0.0 {
            return Err("log sweeps need lo > 0".into());
        }
        Ok(())
    }

    /// Increasing grid with both ends included exactly.
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..=n)
            .map(|i| {
                if i == 0 {
                    return self.lo;
                }
                if i == n {
                    return self.hi;
                }
                let u = i as f64 / n as f64;
                match self.scale {
                    Scale::Linear => self.lo + u * (self.hi - self.lo),
                    Scale::Log => (self.lo.ln() + u * (self.hi.ln() - self.lo.ln())).exp(),
                }
            })
            .collect()
    }

    pub fn expect(&self, allowed: &[&str]) -> Result<(), String> {
        if allowed.contains(&self.param.as_str()) {
            Ok(())
        } else {
            Err(format!(
                "cannot sweep `{}` here; expected one of: {}",
                self.param,
                allowed.join(", ")
            ))
        }
    }
}

/// Runs `f` over `values` on up to `jobs` threads; results keep the input order.
pub fn run_points<T, F>(values: &[f64], jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(f64) -> T + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| values.par_iter().map(|&v| f(v)).collect())
}
