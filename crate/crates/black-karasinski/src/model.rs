//! Black-Karasinski model state: parameters, the OU deviation process, its
//! bridge, and their closed-form Karhunen-Loeve bases.
//!
//! With `l_t = ln r_t` the model is `dl_t = (a(t) - b l_t) dt + sigma dW_t`.
//! Conditional on time u, the future short rate splits into a deterministic
//! zero-volatility part and a unit-volatility OU deviation X started at 0:
//!
//! `r_{u+t} = rbar_{u,t} exp(sigma X_t)`, `dX = -bX dt + dW`.
//!
//! Everything downstream (bond and swaption approximations, both oracles) is
//! built from `rbar`, the OU covariance `K(s,t)`, the bridge covariance
//! obtained by conditioning on `X_T`, and the eigen-decompositions of those
//! two kernels.

use serde::{Deserialize, Serialize};

use crate::numerics::solve_bracketed_root;
use crate::{Error, Result};

/// One piecewise-constant drift segment: `a(t) = level` for `t >= t_knot`
/// until the next knot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftKnot {
    pub t: f64,
    pub level: f64,
}

/// Model parameters. `sigma` and `b` are per sqrt-year / per year, `r0` is
/// the spot short rate, `a` is the piecewise-constant drift of `ln r`.
///
/// A constant drift `a = b ln(m)` pins the stationary median of the short
/// rate at `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModelParams")]
#[serde(into = "RawModelParams")]
pub struct ModelParams {
    sigma: f64,
    b: f64,
    r0: f64,
    a: Vec<DriftKnot>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModelParams {
    sigma: f64,
    b: f64,
    r0: f64,
    a: Vec<DriftKnot>,
}

impl TryFrom<RawModelParams> for ModelParams {
    type Error = Error;
    fn try_from(raw: RawModelParams) -> Result<Self> {
        let knots: Vec<(f64, f64)> = raw.a.iter().map(|k| (k.t, k.level)).collect();
        ModelParams::new(raw.sigma, raw.b, raw.r0, &knots)
    }
}

impl From<ModelParams> for RawModelParams {
    fn from(p: ModelParams) -> Self {
        RawModelParams {
            sigma: p.sigma,
            b: p.b,
            r0: p.r0,
            a: p.a,
        }
    }
}

impl ModelParams {
    pub fn new(sigma: f64, b: f64, r0: f64, drift: &[(f64, f64)]) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::invalid(format!("sigma must be > 0, got {sigma}")));
        }
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::invalid(format!("b must be > 0, got {b}")));
        }
        if !(r0 > 0.0) || !r0.is_finite() {
            return Err(Error::invalid(format!("r0 must be > 0, got {r0}")));
        }
        if drift.is_empty() {
            return Err(Error::invalid("drift needs at least one segment"));
        }
        if drift[0].0 != 0.0 {
            return Err(Error::invalid("first drift knot must be at t = 0"));
        }
        if !drift.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(Error::invalid(
                "drift knot times must be strictly increasing",
            ));
        }
        if drift.iter().any(|&(t, l)| !t.is_finite() || !l.is_finite()) {
            return Err(Error::invalid("drift knots must be finite"));
        }
        Ok(ModelParams {
            sigma,
            b,
            r0,
            a: drift
                .iter()
                .map(|&(t, level)| DriftKnot { t, level })
                .collect(),
        })
    }

    pub fn with_constant_drift(sigma: f64, b: f64, r0: f64, level: f64) -> Result<Self> {
        ModelParams::new(sigma, b, r0, &[(0.0, level)])
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn drift_knots(&self) -> &[DriftKnot] {
        &self.a
    }

    /// Same parameters with a different drift ladder (used by the bootstrap).
    pub fn with_drift(&self, drift: &[(f64, f64)]) -> Result<Self> {
        ModelParams::new(self.sigma, self.b, self.r0, drift)
    }

    /// `A(u, u+v) = int_u^{u+v} e^{-b(u+v-s)} a(s) ds`, closed form per
    /// segment: a segment of level `a` on `[t1, t2]` contributes
    /// `(a/b)(e^{-b(u+v-t2)} - e^{-b(u+v-t1)})`.
    pub fn drift_integral(&self, u: f64, v: f64) -> f64 {
        debug_assert!(u >= 0.0 && v >= 0.0);
        let end = u + v;
        let mut total = 0.0;
        for (i, knot) in self.a.iter().enumerate() {
            let seg_lo = knot.t.max(u);
            let seg_hi = self.a.get(i + 1).map_or(end, |next| next.t.min(end));
            if seg_hi <= seg_lo {
                continue;
            }
            total += knot.level / self.b
                * ((-self.b * (end - seg_hi)).exp() - (-self.b * (end - seg_lo)).exp());
        }
        total
    }

    /// `ln rbar_{u,v} = e^{-bv} ln r_u + A(u, u+v)`.
    pub fn ln_rbar(&self, ln_r_u: f64, u: f64, v: f64) -> f64 {
        (-self.b * v).exp() * ln_r_u + self.drift_integral(u, v)
    }

    /// Zero-volatility forward short rate `rbar_{u,v}`; strictly increasing
    /// in `r_u` and equal to `r_u` at `v = 0`.
    pub fn rbar(&self, r_u: f64, u: f64, v: f64) -> f64 {
        self.ln_rbar(r_u.ln(), u, v).exp()
    }
}

/// Which Gaussian process a kernel or basis describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// OU deviation started at 0.
    Ou,
    /// OU bridge: the deviation conditioned on its value at the horizon.
    Bridge,
}

/// Covariance kernel of the OU deviation on `[0, horizon]`, or of its bridge
/// pinned at both ends.
#[derive(Debug, Clone, Copy)]
pub struct Kernel {
    pub b: f64,
    pub horizon: f64,
    pub kind: KernelKind,
}

/// `V(s) = (1 - e^{-2bs}) / (2b)`.
pub(crate) fn ou_variance(b: f64, s: f64) -> f64 {
    (1.0 - (-2.0 * b * s).exp()) / (2.0 * b)
}

/// `K(s,t) = (e^{-b|t-s|} - e^{-b(t+s)}) / (2b)`.
pub(crate) fn ou_covariance(b: f64, s: f64, t: f64) -> f64 {
    ((-b * (t - s).abs()).exp() - (-b * (t + s)).exp()) / (2.0 * b)
}

impl Kernel {
    pub fn ou(b: f64, horizon: f64) -> Self {
        Kernel {
            b,
            horizon,
            kind: KernelKind::Ou,
        }
    }

    pub fn bridge(b: f64, horizon: f64) -> Self {
        Kernel {
            b,
            horizon,
            kind: KernelKind::Bridge,
        }
    }

    pub fn covariance(&self, s: f64, t: f64) -> f64 {
        match self.kind {
            KernelKind::Ou => ou_covariance(self.b, s, t),
            KernelKind::Bridge => {
                let vt = ou_variance(self.b, self.horizon);
                ou_covariance(self.b, s, t)
                    - ou_covariance(self.b, s, self.horizon)
                        * ou_covariance(self.b, t, self.horizon)
                        / vt
            }
        }
    }

    pub fn variance(&self, s: f64) -> f64 {
        self.covariance(s, s)
    }
}

/// Truncated Karhunen-Loeve eigen-system `{omega_n, lambda_n, c_n}` of an OU
/// or bridge kernel; eigenfunctions are `c_n sin(omega_n t)`.
#[derive(Debug, Clone)]
pub struct KlBasis {
    pub kind: KernelKind,
    /// Mean-reversion speed of the underlying kernel.
    pub b: f64,
    /// Interval length (tau for OU, T for the bridge).
    pub interval: f64,
    pub omegas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub norm_constants: Vec<f64>,
}

impl KlBasis {
    pub fn truncation(&self) -> usize {
        self.omegas.len()
    }

    /// `c_n sin(omega_n t)`; slot `n` is the (n+1)-th bridge mode since the
    /// bridge expansion starts at mode 1.
    pub fn eigenfunction(&self, n: usize, t: f64) -> Result<f64> {
        if n >= self.truncation() {
            return Err(Error::invalid(format!(
                "eigenfunction index {n} >= truncation {}",
                self.truncation()
            )));
        }
        Ok(self.norm_constants[n] * (self.omegas[n] * t).sin())
    }
}

/// KL basis of the OU deviation on `[0, tau]`.
///
/// Frequencies solve `omega cot(omega tau) = -b`, one root per interval
/// `((n+1/2) pi/tau, (n+1) pi/tau)`; `lambda_n = 1/(b^2 + omega_n^2)` and
/// `c_n = sqrt(2 / (tau + b lambda_n))`.
pub fn ou_kl_basis(b: f64, tau: f64, terms: usize) -> Result<KlBasis> {
    if !(b > 0.0) || !(tau > 0.0) || terms == 0 {
        return Err(Error::invalid(format!(
            "ou_kl_basis: need b > 0, tau > 0, terms >= 1 (got {b}, {tau}, {terms})"
        )));
    }
    let mut omegas = Vec::with_capacity(terms);
    let mut lambdas = Vec::with_capacity(terms);
    let mut norms = Vec::with_capacity(terms);
    let pi = std::f64::consts::PI;
    for n in 0..terms {
        // sin-cleared form of the transcendental equation keeps the bracket
        // endpoints finite: g(w) = w cos(w tau) + b sin(w tau)
        let g = |w: f64| w * (w * tau).cos() + b * (w * tau).sin();
        let lo = (n as f64 + 0.5) * pi / tau;
        let hi = (n as f64 + 1.0) * pi / tau;
        let eps = 1e-14 * hi;
        let mut w = solve_bracketed_root(g, lo + eps, hi - eps, 1e-13 * hi)?;
        // one Newton polish on the cleared form
        let gp = (1.0 + b * tau) * (w * tau).cos() - w * tau * (w * tau).sin();
        if gp != 0.0 {
            let polished = w - g(w) / gp;
            if polished > lo && polished < hi {
                w = polished;
            }
        }
        let lam = 1.0 / (b * b + w * w);
        omegas.push(w);
        lambdas.push(lam);
        norms.push((2.0 / (tau + b * lam)).sqrt());
    }
    Ok(KlBasis {
        kind: KernelKind::Ou,
        b,
        interval: tau,
        omegas,
        lambdas,
        norm_constants: norms,
    })
}

/// KL basis of the OU bridge on `[0, T]`: `omega_n = n pi / T`,
/// `lambda_n = T^2 / (b^2 T^2 + n^2 pi^2)`, `c_n = sqrt(2/T)`, n = 1, 2, ...
pub fn bridge_kl_basis(b: f64, horizon: f64, terms: usize) -> Result<KlBasis> {
    if !(b > 0.0) || !(horizon > 0.0) || terms == 0 {
        return Err(Error::invalid(format!(
            "bridge_kl_basis: need b > 0, T > 0, terms >= 1 (got {b}, {horizon}, {terms})"
        )));
    }
    let pi = std::f64::consts::PI;
    let c = (2.0 / horizon).sqrt();
    let mut omegas = Vec::with_capacity(terms);
    let mut lambdas = Vec::with_capacity(terms);
    for n in 1..=terms {
        let npi = n as f64 * pi;
        omegas.push(npi / horizon);
        lambdas.push(horizon * horizon / (b * b * horizon * horizon + npi * npi));
    }
    Ok(KlBasis {
        kind: KernelKind::Bridge,
        b,
        interval: horizon,
        omegas,
        lambdas,
        norm_constants: vec![c; terms],
    })
}
