//! Problem parameters and the closed-form constants attached to them.

use crate::error::{Error, Result};
use crate::special::gamma;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// How the extension-Hardy constant `ĉ` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum CHat {
    /// Use `ĉ = 1`, which is only justified when `n ≥ 4`, or `n = 3` and `s ≤ 1/2`.
    #[default]
    Default,
    /// An explicit value supplied by the caller.
    Explicit(f64),
    /// Leave `ĉ` unknown; constants depending on it become unavailable.
    Unset,
}

/// Unvalidated parameter tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    pub n: usize,
    pub s: f64,
    pub q: f64,
    pub lambda: f64,
    pub m: usize,
    pub k: usize,
    pub c_hat: CHat,
}

impl RawParams {
    /// Single factor space (`m = 1`, `k = n`), default `ĉ` where justified.
    pub fn new(n: usize, s: f64, q: f64, lambda: f64) -> Self {
        Self {
            n,
            s,
            q,
            lambda,
            m: 1,
            k: n,
            c_hat: if c_hat_one_justified(n, s) {
                CHat::Default
            } else {
                CHat::Unset
            },
        }
    }

    pub fn with_partition(mut self, k: usize, m: usize) -> Self {
        self.k = k;
        self.m = m;
        self
    }

    pub fn with_c_hat(mut self, c_hat: CHat) -> Self {
        self.c_hat = c_hat;
        self
    }

    pub fn validate(&self) -> Result<ProblemParams> {
        validate_params(self)
    }
}

/// Validated parameters; `b` is derived from `n/q - b = n/2 - s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub n: usize,
    pub s: f64,
    pub q: f64,
    pub b: f64,
    pub lambda: f64,
    pub m: usize,
    pub k: usize,
    pub c_hat: Option<f64>,
}

/// `ĉ = 1` is known to work in these dimensions.
pub fn c_hat_one_justified(n: usize, s: f64) -> bool {
    n >= 4 || (n == 3 && s <= 0.5)
}

/// Critical Sobolev exponent `2n/(n-2s)`.
pub fn critical_exponent(n: usize, s: f64) -> f64 {
    let n = n as f64;
    2.0 * n / (n - 2.0 * s)
}

pub fn validate_params(raw: &RawParams) -> Result<ProblemParams> {
    for (name, v) in [("s", raw.s), ("q", raw.q), ("lambda", raw.lambda)] {
        if !v.is_finite() {
            return Err(Error::NonFinite(name));
        }
    }
    if raw.n < 2 {
        return Err(Error::InvalidParameter(format!("n = {} must be at least 2", raw.n)));
    }
    if !(raw.s > 0.0 && raw.s < 1.0) {
        return Err(Error::InvalidParameter(format!("s = {} must lie in (0, 1)", raw.s)));
    }
    if raw.k < 2 || raw.m < 1 || raw.k * raw.m != raw.n {
        return Err(Error::BadFactorization { n: raw.n, k: raw.k, m: raw.m });
    }
    let critical = critical_exponent(raw.n, raw.s);
    if !(raw.q > 2.0 && raw.q < critical) {
        return Err(Error::QOutOfRange { q: raw.q, critical });
    }
    let hs = hardy_constant(raw.n, raw.s)?;
    if raw.lambda <= -hs {
        return Err(Error::LambdaBelowHardy { lambda: raw.lambda, bound: -hs });
    }
    let c_hat = match raw.c_hat {
        CHat::Default => {
            if !c_hat_one_justified(raw.n, raw.s) {
                return Err(Error::CHatUnjustified { n: raw.n, s: raw.s });
            }
            Some(1.0)
        }
        CHat::Explicit(v) => {
            if !v.is_finite() {
                return Err(Error::NonFinite("c_hat"));
            }
            if v <= 0.0 {
                return Err(Error::InvalidParameter(format!("c_hat = {v} must be positive")));
            }
            Some(v)
        }
        CHat::Unset => None,
    };
    let n = raw.n as f64;
    Ok(ProblemParams {
        n: raw.n,
        s: raw.s,
        q: raw.q,
        b: n / raw.q - n / 2.0 + raw.s,
        lambda: raw.lambda,
        m: raw.m,
        k: raw.k,
        c_hat,
    })
}

impl ProblemParams {
    pub fn critical_exponent(&self) -> f64 {
        critical_exponent(self.n, self.s)
    }

    pub fn hardy(&self) -> f64 {
        hardy_constant(self.n, self.s).expect("validated parameters")
    }

    /// `ĉ`, or an error when it was left unset.
    pub fn c_hat(&self) -> Result<f64> {
        self.c_hat.ok_or(Error::CHatUnjustified { n: self.n, s: self.s })
    }

    /// Same parameters at a different `λ` (revalidated).
    pub fn with_lambda(&self, lambda: f64) -> Result<ProblemParams> {
        let hs = self.hardy();
        if !lambda.is_finite() {
            return Err(Error::NonFinite("lambda"));
        }
        if lambda <= -hs {
            return Err(Error::LambdaBelowHardy { lambda, bound: -hs });
        }
        Ok(ProblemParams { lambda, ..*self })
    }

    pub fn constants(&self, mu: f64) -> Result<ConstantsTable> {
        let hardy = self.hardy();
        let c_hat = self.c_hat()?;
        Ok(ConstantsTable {
            hardy,
            cs: cs_constant(self.s),
            gamma: gamma_constant(self.s, c_hat),
            sobolev: sobolev_constant(self.n, self.s).ok(),
            mu,
            c_mu: c_mu(self, mu)?,
            threshold: breaking_threshold(self, mu)?,
        })
    }
}

/// All closed-form constants for one parameter set and eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub hardy: f64,
    pub cs: f64,
    pub gamma: f64,
    pub sobolev: Option<f64>,
    pub mu: f64,
    pub c_mu: f64,
    pub threshold: f64,
}

/// Sharp fractional Hardy constant `H_s = 2^{2s} Γ²((n+2s)/4) / Γ²((n-2s)/4)`.
pub fn hardy_constant(n: usize, s: f64) -> Result<f64> {
    let n = n as f64;
    if !(s > 0.0 && s < 1.0) || n <= 2.0 * s {
        return Err(Error::InvalidParameter(format!("Hardy constant needs n > 2s, got n = {n}, s = {s}")));
    }
    let ratio = gamma((n + 2.0 * s) / 4.0) / gamma((n - 2.0 * s) / 4.0);
    Ok(2f64.powf(2.0 * s) * ratio * ratio)
}

/// `C_s = Γ(s) / (2^{1-2s} Γ(1-s))`.
pub fn cs_constant(s: f64) -> f64 {
    gamma(s) / (2f64.powf(1.0 - 2.0 * s) * gamma(1.0 - s))
}

/// `γ = ĉ Γ(s) Γ(1-s) / 2`.
pub fn gamma_constant(s: f64, c_hat: f64) -> f64 {
    c_hat * gamma(s) * gamma(1.0 - s) / 2.0
}

/// `c_μ = C_s (mμ + m + 1 - 2s) γ`.
pub fn c_mu(params: &ProblemParams, mu: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::MuNonpositive(mu));
    }
    let m = params.m as f64;
    let s = params.s;
    Ok(cs_constant(s) * (m * mu + m + 1.0 - 2.0 * s) * gamma_constant(s, params.c_hat()?))
}

/// Second algebraic form `ĉ (mμ + m + 1 - 2s) Γ(s)² 2^{2s-2}`.
pub fn c_mu_direct(params: &ProblemParams, mu: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::MuNonpositive(mu));
    }
    let m = params.m as f64;
    let s = params.s;
    let g = gamma(s);
    Ok(params.c_hat()? * (m * mu + m + 1.0 - 2.0 * s) * g * g * 2f64.powf(2.0 * s - 2.0))
}

/// `λ ≥ -H_s + c_μ/(q-2)` rules out k-radially symmetric extremals.
pub fn breaking_threshold(params: &ProblemParams, mu: f64) -> Result<f64> {
    Ok(-params.hardy() + c_mu(params, mu)? / (params.q - 2.0))
}

/// Sharp fractional Sobolev constant
/// `S = 2^{2s} π^s Γ((n+2s)/2)/Γ((n-2s)/2) · (Γ(n/2)/Γ(n))^{2s/n}`.
pub fn sobolev_constant(n: usize, s: f64) -> Result<f64> {
    let nf = n as f64;
    if !(s > 0.0 && s < 1.0) || nf <= 2.0 * s {
        return Err(Error::InvalidParameter(format!("Sobolev constant needs n > 2s, got n = {n}, s = {s}")));
    }
    let lead = 2f64.powf(2.0 * s) * PI.powf(s) * gamma((nf + 2.0 * s) / 2.0) / gamma((nf - 2.0 * s) / 2.0);
    Ok(lead * (gamma(nf / 2.0) / gamma(nf)).powf(2.0 * s / nf))
}
