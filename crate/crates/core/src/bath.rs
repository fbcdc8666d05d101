//! Bosonic bath models and their two-point functions.
//!
//! With `B = sum_k lambda_k b_k` coupled through channel 1 and `B^dagger`
//! through channel 2, the only nonvanishing correlators are
//!
//! ```text
//! D12(t) = sum_k lambda_k^2 (1 + n_k) e^{-i W_k t}     D12~(w) = g(w)(1 + n(w)),  w > 0
//! D21(t) = sum_k lambda_k^2 n_k e^{+i W_k t}           D21~(w) = g(-w) n(-w),     w < 0
//! ```
//!
//! Besides `D` and `D~` the kernel module needs the one-sided transform
//! `R(z) = int_0^inf D(t) e^{izt} dt = int dw'/2pi D~(w') i/(z - w')` and its
//! real-axis split `R(x + i0) = D~(x)/2 + i Phi(x)` with
//! `Phi(x) = P int dw'/2pi D~(w')/(x - w')`.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::special::{exp_m1, trigamma};
use crate::system::Channel;

/// Gaussian smearing width of a discrete bath, as a fraction of its lowest mode.
pub const SMEARING_FRACTION: f64 = 0.05;

/// Default spectral cutoff in units of the ohmic cutoff frequency.
pub const OHMIC_CUTOFF_MULTIPLE: f64 = 40.0;

/// Default spectral cutoff in units of the largest system splitting.
pub const SPLITTING_CUTOFF_MULTIPLE: f64 = 10.0;

/// Inverse temperature; the vacuum is a distinct value rather than a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Beta {
    Finite(f64),
    Infinite,
}

impl Beta {
    pub fn validate(self) -> Result<()> {
        match self {
            Beta::Finite(b) if !(b > 0.0) || !b.is_finite() => {
                Err(invalid(format!("beta must be positive, got {b}")))
            }
            _ => Ok(()),
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Beta::Infinite)
    }
}

impl std::fmt::Display for Beta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Beta::Finite(b) => write!(f, "{b}"),
            Beta::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub lambda: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BathModel {
    /// `g(w) = eta * w * exp(-w / cutoff)`.
    OhmicExponential {
        eta: f64,
        cutoff: f64,
    },
    Discrete(Vec<Mode>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    pub model: BathModel,
    pub beta: Beta,
}

impl BathSpec {
    pub fn ohmic(eta: f64, cutoff: f64, beta: Beta) -> Result<Self> {
        let spec = Self {
            model: BathModel::OhmicExponential { eta, cutoff },
            beta,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn discrete(modes: Vec<Mode>, beta: Beta) -> Result<Self> {
        let spec = Self {
            model: BathModel::Discrete(modes),
            beta,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.beta.validate()?;
        match &self.model {
            BathModel::OhmicExponential { eta, cutoff } => {
                if !(*eta >= 0.0) || !eta.is_finite() {
                    return Err(invalid(format!("eta must be non-negative, got {eta}")));
                }
                if !(*cutoff > 0.0) || !cutoff.is_finite() {
                    return Err(invalid(format!(
                        "ohmic cutoff must be positive, got {cutoff}"
                    )));
                }
            }
            BathModel::Discrete(modes) => {
                if modes.is_empty() {
                    return Err(invalid("discrete bath needs at least one mode"));
                }
                for m in modes {
                    if !(m.omega > 0.0) || !m.omega.is_finite() {
                        return Err(invalid(format!(
                            "mode frequency must be positive, got {}",
                            m.omega
                        )));
                    }
                    if !m.lambda.is_finite() {
                        return Err(invalid(format!(
                            "mode coupling must be finite, got {}",
                            m.lambda
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Width of the Gaussian that replaces each delta peak of a discrete bath.
    pub fn smearing_width(&self) -> Option<f64> {
        match &self.model {
            BathModel::Discrete(modes) => Some(
                SMEARING_FRACTION * modes.iter().map(|m| m.omega).fold(f64::INFINITY, f64::min),
            ),
            BathModel::OhmicExponential { .. } => None,
        }
    }

    /// Spectral cutoff used when none is configured.
    pub fn default_cutoff(&self, max_splitting: f64) -> f64 {
        let from_bath = match &self.model {
            BathModel::OhmicExponential { cutoff, .. } => OHMIC_CUTOFF_MULTIPLE * cutoff,
            BathModel::Discrete(modes) => {
                let top = modes.iter().map(|m| m.omega).fold(0.0, f64::max);
                top + 20.0 * self.smearing_width().unwrap_or(0.0)
            }
        };
        from_bath.max(SPLITTING_CUTOFF_MULTIPLE * max_splitting)
    }

    /// `g(w)` for any real `w`; zero for `w <= 0` in the ohmic model.
    fn density_raw(&self, omega: f64) -> f64 {
        match &self.model {
            BathModel::OhmicExponential { eta, cutoff } => {
                if omega > 0.0 {
                    eta * omega * (-omega / cutoff).exp()
                } else {
                    0.0
                }
            }
            BathModel::Discrete(modes) => {
                let sigma = self.smearing_width().expect("discrete bath");
                let norm = (2.0 * PI).sqrt() * sigma;
                modes
                    .iter()
                    .map(|m| {
                        let x = (omega - m.omega) / sigma;
                        2.0 * PI * m.lambda * m.lambda * (-0.5 * x * x).exp() / norm
                    })
                    .sum()
            }
        }
    }
}

/// `1 / (exp(beta omega) - 1)`, zero in the vacuum.
pub fn planck_occupation(omega: f64, beta: Beta) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(invalid(format!(
            "occupation needs a positive frequency, got {omega}"
        )));
    }
    beta.validate()?;
    Ok(match beta {
        Beta::Infinite => 0.0,
        Beta::Finite(b) => 1.0 / (b * omega).exp_m1(),
    })
}

/// Spectral density `g(w)`; discrete baths are Gaussian-smeared.
pub fn spectral_density(bath: &BathSpec, omega: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(invalid(format!(
            "spectral density needs a positive frequency, got {omega}"
        )));
    }
    Ok(bath.density_raw(omega))
}

/// The two nonvanishing channel orderings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pair {
    /// `D^{12}`: emission side, supported on `w > 0`.
    Emit,
    /// `D^{21}`: absorption side, supported on `w < 0`.
    Absorb,
}

fn pair(alpha: Channel, beta: Channel) -> Option<Pair> {
    match (alpha, beta) {
        (Channel::Lower, Channel::Raise) => Some(Pair::Emit),
        (Channel::Raise, Channel::Lower) => Some(Pair::Absorb),
        _ => None,
    }
}

/// `x / (exp(beta x) - 1)` for complex `x`, equal to `1 / beta` at `x = 0`.
fn x_over_expm1(x: C64, beta: f64) -> C64 {
    let y = x * beta;
    if y.norm() < 1e-4 {
        // y/(e^y - 1) = 1 - y/2 + y^2/12 - y^4/720
        let y2 = y * y;
        (1.0 - y * 0.5 + y2 / 12.0 - y2 * y2 / 720.0) / beta
    } else if y.re > 30.0 {
        let decay = (-y).exp();
        x * decay / (1.0 - decay)
    } else {
        x / exp_m1(y)
    }
}

/// Correlators of one bath, together with the numerical settings of the
/// spectral integrals.
#[derive(Debug, Clone)]
pub struct BathCorrelation {
    spec: BathSpec,
    omega_cutoff: f64,
    quad: QuadOptions,
}

impl BathCorrelation {
    pub fn new(spec: BathSpec, omega_cutoff: f64) -> Result<Self> {
        spec.validate()?;
        if !(omega_cutoff > 0.0) || !omega_cutoff.is_finite() {
            return Err(invalid(format!(
                "omega_cutoff must be positive, got {omega_cutoff}"
            )));
        }
        if let BathModel::OhmicExponential { cutoff, .. } = spec.model {
            if omega_cutoff < 5.0 * cutoff {
                return Err(invalid(format!(
                    "omega_cutoff {omega_cutoff} must be at least 5 x the ohmic cutoff {cutoff}"
                )));
            }
        }
        Ok(Self {
            spec,
            omega_cutoff,
            quad: QuadOptions::default(),
        })
    }

    pub fn with_quadrature(mut self, quad: QuadOptions) -> Self {
        self.quad = quad;
        self
    }

    pub fn spec(&self) -> &BathSpec {
        &self.spec
    }

    pub fn omega_cutoff(&self) -> f64 {
        self.omega_cutoff
    }

    pub fn beta(&self) -> Beta {
        self.spec.beta
    }

    /// Emission profile `f(w) = g(w)(1 + n(w))` continued to complex `w`
    /// (ohmic model only). The absorption profile is `f(-w) - g(-w)`.
    fn ohmic_profile(&self, p: Pair, z: C64) -> C64 {
        let BathModel::OhmicExponential { eta, cutoff } = self.spec.model else {
            unreachable!("ohmic profile on a discrete bath")
        };
        // Absorption: g(-z) n(-z) with u = -z.
        let (u, emit) = match p {
            Pair::Emit => (z, true),
            Pair::Absorb => (-z, false),
        };
        let damp = (-u / cutoff).exp() * eta;
        match self.spec.beta {
            Beta::Infinite => {
                if emit {
                    damp * u
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            Beta::Finite(b) => {
                let thermal = x_over_expm1(u, b);
                if emit {
                    damp * (u + thermal)
                } else {
                    damp * thermal
                }
            }
        }
    }

    /// Real profile on the support, used inside spectral integrals.
    fn profile(&self, p: Pair, w: f64) -> f64 {
        match &self.spec.model {
            BathModel::OhmicExponential { .. } => self.ohmic_profile(p, C64::new(w, 0.0)).re,
            BathModel::Discrete(_) => {
                let u = match p {
                    Pair::Emit => w,
                    Pair::Absorb => -w,
                };
                if u <= 0.0 {
                    return 0.0;
                }
                let g = self.spec.density_raw(u);
                let n = match self.spec.beta {
                    Beta::Infinite => 0.0,
                    Beta::Finite(b) => 1.0 / (b * u).exp_m1(),
                };
                match p {
                    Pair::Emit => g * (1.0 + n),
                    Pair::Absorb => g * n,
                }
            }
        }
    }

    fn support(&self, p: Pair) -> (f64, f64) {
        match p {
            Pair::Emit => (0.0, self.omega_cutoff),
            Pair::Absorb => (-self.omega_cutoff, 0.0),
        }
    }

    /// Tolerance for deciding that an argument sits on the support endpoint 0.
    fn endpoint_tol(&self) -> f64 {
        1e-12 * self.omega_cutoff
    }

    /// `D^{ab}(t)`. Ohmic baths use the closed form of the infinite-cutoff
    /// integral; discrete baths the exact mode sum.
    pub fn time(&self, alpha: Channel, beta: Channel, t: f64) -> C64 {
        let Some(p) = pair(alpha, beta) else {
            return C64::new(0.0, 0.0);
        };
        match &self.spec.model {
            BathModel::Discrete(modes) => modes
                .iter()
                .map(|m| {
                    let l2 = m.lambda * m.lambda;
                    let n = match self.spec.beta {
                        Beta::Infinite => 0.0,
                        Beta::Finite(b) => 1.0 / (b * m.omega).exp_m1(),
                    };
                    match p {
                        Pair::Emit => C64::from_polar(l2 * (1.0 + n), -m.omega * t),
                        Pair::Absorb => C64::from_polar(l2 * n, m.omega * t),
                    }
                })
                .sum(),
            BathModel::OhmicExponential { eta, cutoff } => {
                let a = C64::new(1.0 / cutoff, 0.0);
                let it = C64::new(0.0, t);
                match (self.spec.beta, p) {
                    (Beta::Infinite, Pair::Emit) => {
                        let w = a + it;
                        eta / (2.0 * PI) / (w * w)
                    }
                    (Beta::Infinite, Pair::Absorb) => C64::new(0.0, 0.0),
                    (Beta::Finite(b), Pair::Emit) => {
                        eta / (2.0 * PI * b * b) * trigamma((a + it) / b)
                    }
                    (Beta::Finite(b), Pair::Absorb) => {
                        eta / (2.0 * PI * b * b) * trigamma((a - it) / b + 1.0)
                    }
                }
            }
        }
    }

    /// `D^{ab}(t)` by direct quadrature of the spectral integral up to `cutoff`.
    pub fn time_quadrature(
        &self,
        alpha: Channel,
        beta: Channel,
        t: f64,
        cutoff: f64,
    ) -> Result<C64> {
        let Some(p) = pair(alpha, beta) else {
            return Ok(C64::new(0.0, 0.0));
        };
        if let BathModel::Discrete(_) = self.spec.model {
            return Ok(self.time(alpha, beta, t));
        }
        // Integrate over the positive mode frequency W.
        let sign = match p {
            Pair::Emit => -1.0,
            Pair::Absorb => 1.0,
        };
        let f = |w: f64| {
            let weight = match p {
                Pair::Emit => self.profile(p, w),
                Pair::Absorb => self.profile(p, -w),
            };
            C64::from_polar(weight / (2.0 * PI), sign * w * t)
        };
        let scale = match self.spec.model {
            BathModel::OhmicExponential { cutoff: c, .. } => c,
            _ => unreachable!(),
        };
        let breaks: Vec<f64> = (1..8).map(|k| k as f64 * scale).collect();
        integrate_with_breaks(f, 0.0, cutoff, &breaks, self.quad)
    }

    /// `D~^{ab}(w)`. At `w = 0` the midpoint of the one-sided limit is returned.
    pub fn freq(&self, alpha: Channel, beta: Channel, omega: f64) -> f64 {
        let Some(p) = pair(alpha, beta) else {
            return 0.0;
        };
        if omega.abs() <= self.endpoint_tol() {
            return 0.5 * self.profile(p, 0.0);
        }
        let inside = match p {
            Pair::Emit => omega > 0.0,
            Pair::Absorb => omega < 0.0,
        };
        if inside {
            self.profile(p, omega)
        } else {
            0.0
        }
    }

    /// `R^{ab}(z) = int_0^inf D^{ab}(t) e^{izt} dt`, continued analytically
    /// below the real axis.
    pub fn response(&self, alpha: Channel, beta: Channel, z: C64) -> Result<C64> {
        let Some(p) = pair(alpha, beta) else {
            return Ok(C64::new(0.0, 0.0));
        };
        // Real arguments are read as limits from above.
        let z = if z.im == 0.0 { C64::new(z.re, 0.0) } else { z };
        let i = C64::new(0.0, 1.0);
        match &self.spec.model {
            BathModel::Discrete(modes) => Ok(modes
                .iter()
                .map(|m| {
                    let l2 = m.lambda * m.lambda;
                    let n = match self.spec.beta {
                        Beta::Infinite => 0.0,
                        Beta::Finite(b) => 1.0 / (b * m.omega).exp_m1(),
                    };
                    match p {
                        Pair::Emit => i * l2 * (1.0 + n) / (z - m.omega),
                        Pair::Absorb => i * l2 * n / (z + m.omega),
                    }
                })
                .sum()),
            BathModel::OhmicExponential { .. } => {
                if p == Pair::Absorb && self.spec.beta.is_infinite() {
                    return Ok(C64::new(0.0, 0.0));
                }
                let (a, b) = self.support(p);
                let fz = self.ohmic_profile(p, z);
                let smooth = integrate_with_breaks(
                    |w| (self.profile(p, w) - fz) / (z - w),
                    a,
                    b,
                    &[z.re],
                    self.quad,
                )?;
                let tol = self.endpoint_tol();
                let log_at = |end: f64| {
                    let d = z - end;
                    if (z.re - end).abs() <= tol {
                        // Argument on the endpoint: keep only the phase.
                        C64::new(0.0, d.arg())
                    } else {
                        d.ln()
                    }
                };
                let mut r = smooth + fz * (log_at(a) - log_at(b));
                if z.im < 0.0 && z.re > a && z.re < b {
                    // Continuation through the cut of the support.
                    r += fz * C64::new(0.0, -2.0 * PI);
                }
                Ok(i * r / (2.0 * PI))
            }
        }
    }

    /// `conj R^{ab}(-conj z) = int_0^inf D^{ab}(-t) e^{izt} dt`.
    pub fn response_reflected(&self, alpha: Channel, beta: Channel, z: C64) -> Result<C64> {
        Ok(self.response(alpha, beta, -z.conj())?.conj())
    }

    /// Principal value `Phi^{ab}(x) = P int dw'/2pi D~^{ab}(w') / (x - w')`.
    ///
    /// Interior points use a symmetric exclusion window of half-width `h`,
    /// extrapolated linearly from `h` and `h/2`. On the support endpoint the
    /// logarithmically divergent piece is dropped.
    pub fn principal_value(&self, alpha: Channel, beta: Channel, x: f64, h: f64) -> Result<f64> {
        let Some(p) = pair(alpha, beta) else {
            return Ok(0.0);
        };
        if !(h > 0.0) {
            return Err(invalid(format!(
                "principal-value window must be positive, got {h}"
            )));
        }
        match &self.spec.model {
            BathModel::Discrete(modes) => Ok(modes
                .iter()
                .map(|m| {
                    let l2 = m.lambda * m.lambda;
                    let n = match self.spec.beta {
                        Beta::Infinite => 0.0,
                        Beta::Finite(b) => 1.0 / (b * m.omega).exp_m1(),
                    };
                    let (weight, pole) = match p {
                        Pair::Emit => (l2 * (1.0 + n), m.omega),
                        Pair::Absorb => (l2 * n, -m.omega),
                    };
                    if x == pole {
                        0.0
                    } else {
                        weight / (x - pole)
                    }
                })
                .sum()),
            BathModel::OhmicExponential { .. } => {
                if p == Pair::Absorb && self.spec.beta.is_infinite() {
                    return Ok(0.0);
                }
                let (a, b) = self.support(p);
                let f = |w: f64| self.profile(p, w);
                let tol = self.endpoint_tol();
                let real = |g: &dyn Fn(f64) -> f64, lo: f64, hi: f64, brk: &[f64]| {
                    integrate_with_breaks(|w| C64::new(g(w), 0.0), lo, hi, brk, self.quad)
                        .map(|v| v.re)
                };
                let on_end = |e: f64| (x - e).abs() <= tol;
                let value = if on_end(a) || on_end(b) {
                    let e = if on_end(a) { a } else { b };
                    let fe = f(e);
                    let sub = real(&|w| (f(w) - fe) / (e - w), a, b, &[])?;
                    // int_a^b dw/(e - w) with the log of zero dropped.
                    let log_part = if e == a { -(b - a).ln() } else { (b - a).ln() };
                    sub + fe * log_part
                } else if x < a || x > b {
                    let near = if x < a { a } else { b };
                    let d = (x - near).abs();
                    let brk = [near + d.min(1.0) * (a + b - 2.0 * near).signum()];
                    real(&|w| f(w) / (x - w), a, b, &brk)?
                } else {
                    let h = h.min(0.5 * (x - a)).min(0.5 * (b - x));
                    let excluded = |h: f64| -> Result<f64> {
                        let left = real(&|w| f(w) / (x - w), a, x - h, &[])?;
                        let right = real(&|w| f(w) / (x - w), x + h, b, &[x + 1.0])?;
                        Ok(left + right)
                    };
                    2.0 * excluded(0.5 * h)? - excluded(h)?
                };
                Ok(value / (2.0 * PI))
            }
        }
    }
}
