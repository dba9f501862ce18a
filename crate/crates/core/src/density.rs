//! Mass-density families ρ(Q) and the scalar diagnostics built from them.
//!
//! Every family exposes ρ, ρ′, the auxiliary function H with
//! `H′ = ½ρ + Qρ′, H(0) = 0`, the ellipticity function `𝔥(Q) = Qρ²(Q)`,
//! and the primitive `∫₀^Q ρ` used by the nonlinear Hodge energy.
//!
//! Built-in families:
//!
//! | family | ρ(Q) | admissible Q |
//! |---|---|---|
//! | Chaplygin(γ) | `(1 − (γ−1)Q/2)^{1/(γ−1)}` | `[0, 2/(γ+1))` |
//! | minimal surface | `(1+Q)^{−1/2}` | `[0, ∞)` |
//! | power law(K, q) | `(K+Q)^q` | `[0, ∞)` |
//! | constant(c) | `c` | `[0, ∞)` |
//!
//! Custom families take ρ and ρ′ as closures together with an admissible interval.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

/// Absolute tolerance of the H quadrature.
pub const H_QUADRATURE_TOL: f64 = 1e-10;

/// Relative cavitation threshold: ρ below `CAVITATION_FACTOR · ρ(0)` counts as cavitation.
pub const CAVITATION_FACTOR: f64 = 1e-8;

pub type ScalarMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Half-open interval `[lo, hi)` of admissible speeds; `hi` may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QDomain {
    pub lo: f64,
    pub hi: f64,
}

impl QDomain {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && lo >= 0.0 && hi > lo) {
            return Err(Error::Parameter(format!("invalid Q interval [{lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub fn unbounded() -> Self {
        Self {
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, q: f64) -> bool {
        q.is_finite() && q >= self.lo && q < self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.hi.is_finite()
    }
}

impl fmt::Display for QDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.hi.is_finite() {
            write!(f, "[{}, {})", self.lo, self.hi)
        } else {
            write!(f, "[{}, inf)", self.lo)
        }
    }
}

#[derive(Clone)]
pub enum Family {
    Chaplygin { gamma: f64 },
    MinimalSurface,
    PowerLaw { k: f64, q: f64 },
    Constant { c: f64 },
    Custom {
        name: String,
        rho: ScalarMap,
        drho: ScalarMap,
    },
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Chaplygin { gamma } => write!(f, "Chaplygin {{ gamma: {gamma} }}"),
            Family::MinimalSurface => write!(f, "MinimalSurface"),
            Family::PowerLaw { k, q } => write!(f, "PowerLaw {{ k: {k}, q: {q} }}"),
            Family::Constant { c } => write!(f, "Constant {{ c: {c} }}"),
            Family::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// A mass density ρ(Q) together with its admissible speed interval.
#[derive(Clone, Debug)]
pub struct MassDensity {
    family: Family,
    domain: QDomain,
}

impl MassDensity {
    pub fn chaplygin(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 1.0) {
            return Err(Error::Parameter(format!(
                "Chaplygin density needs an adiabatic constant gamma > 1, got {gamma}"
            )));
        }
        Ok(Self {
            family: Family::Chaplygin { gamma },
            domain: QDomain {
                lo: 0.0,
                hi: 2.0 / (gamma + 1.0),
            },
        })
    }

    pub fn minimal_surface() -> Self {
        Self {
            family: Family::MinimalSurface,
            domain: QDomain::unbounded(),
        }
    }

    pub fn power_law(k: f64, q: f64) -> Result<Self> {
        if !(k.is_finite() && q.is_finite() && k >= 0.0) {
            return Err(Error::Parameter(format!(
                "power-law density needs finite K >= 0 and finite q, got K={k}, q={q}"
            )));
        }
        if k == 0.0 && q != 0.0 {
            return Err(Error::Parameter(
                "power-law density with K = 0 is not positive and finite at Q = 0".into(),
            ));
        }
        Ok(Self {
            family: Family::PowerLaw { k, q },
            domain: QDomain::unbounded(),
        })
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Parameter(format!(
                "constant density must be positive, got {c}"
            )));
        }
        Ok(Self {
            family: Family::Constant { c },
            domain: QDomain::unbounded(),
        })
    }

    pub fn custom(
        name: impl Into<String>,
        rho: ScalarMap,
        drho: ScalarMap,
        domain: QDomain,
    ) -> Result<Self> {
        let r0 = rho(domain.lo);
        if !(r0.is_finite() && r0 > 0.0) {
            return Err(Error::Parameter(format!(
                "custom density must be positive and finite at Q = {}, got {r0}",
                domain.lo
            )));
        }
        Ok(Self {
            family: Family::Custom {
                name: name.into(),
                rho,
                drho,
            },
            domain,
        })
    }

    /// ρ̂(P) = (1 − P)^{−1/2} on `[0, 1)`, the partner of the minimal-surface density
    /// under the Hodge duality (their product is identically one).
    pub fn dual_minimal_surface() -> Self {
        Self::custom(
            "dual_minimal_surface",
            Arc::new(|p: f64| 1.0 / (1.0 - p).sqrt()),
            Arc::new(|p: f64| 0.5 * (1.0 - p).powf(-1.5)),
            QDomain { lo: 0.0, hi: 1.0 },
        )
        .expect("dual minimal surface density is positive at 0")
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn domain(&self) -> QDomain {
        self.domain
    }

    pub fn name(&self) -> String {
        match &self.family {
            Family::Chaplygin { gamma } => format!("chaplygin(gamma={gamma})"),
            Family::MinimalSurface => "minimal_surface".into(),
            Family::PowerLaw { k, q } => format!("power_law(K={k}, q={q})"),
            Family::Constant { c } => format!("constant(c={c})"),
            Family::Custom { name, .. } => format!("custom({name})"),
        }
    }

    fn domain_error(&self, q: f64) -> Error {
        Error::Domain {
            family: self.name(),
            domain: self.domain.to_string(),
            q,
        }
    }

    pub(crate) fn check(&self, q: f64) -> Result<()> {
        if self.domain.contains(q) {
            Ok(())
        } else {
            Err(self.domain_error(q))
        }
    }

    /// Located domain error for callers that know where the offending value sits.
    pub(crate) fn domain_error_at(&self, q: f64, location: String) -> Error {
        Error::DomainAt {
            family: self.name(),
            domain: self.domain.to_string(),
            q,
            location,
        }
    }

    /// Closed-form ρ without domain checking (analytic continuation where it exists).
    pub(crate) fn rho_raw(&self, q: f64) -> f64 {
        match &self.family {
            Family::Chaplygin { gamma } => {
                let g1 = gamma - 1.0;
                (1.0 - 0.5 * g1 * q).powf(1.0 / g1)
            }
            Family::MinimalSurface => 1.0 / (1.0 + q).sqrt(),
            Family::PowerLaw { k, q: e } => (k + q).powf(*e),
            Family::Constant { c } => *c,
            Family::Custom { rho, .. } => rho(q),
        }
    }

    pub(crate) fn drho_raw(&self, q: f64) -> f64 {
        match &self.family {
            Family::Chaplygin { gamma } => {
                let g1 = gamma - 1.0;
                -0.5 * (1.0 - 0.5 * g1 * q).powf(1.0 / g1 - 1.0)
            }
            Family::MinimalSurface => -0.5 * (1.0 + q).powf(-1.5),
            Family::PowerLaw { k, q: e } => {
                if *e == 0.0 {
                    0.0
                } else {
                    e * (k + q).powf(e - 1.0)
                }
            }
            Family::Constant { .. } => 0.0,
            Family::Custom { drho, .. } => drho(q),
        }
    }

    pub fn rho(&self, q: f64) -> Result<f64> {
        self.check(q)?;
        Ok(self.rho_raw(q))
    }

    pub fn drho(&self, q: f64) -> Result<f64> {
        self.check(q)?;
        Ok(self.drho_raw(q))
    }

    /// H′(Q) = ½ρ(Q) + Qρ′(Q).
    pub fn h_prime(&self, q: f64) -> Result<f64> {
        self.check(q)?;
        Ok(self.h_prime_raw(q))
    }

    fn h_prime_raw(&self, q: f64) -> f64 {
        0.5 * self.rho_raw(q) + q * self.drho_raw(q)
    }

    /// H(Q) normalised by H(0) = 0.
    pub fn h(&self, q: f64) -> Result<f64> {
        self.check(q)?;
        match &self.family {
            Family::MinimalSurface => Ok(1.0 - 1.0 / (1.0 + q).sqrt()),
            Family::Constant { c } => Ok(0.5 * c * q),
            _ => self.h_segment(self.domain.lo, q),
        }
    }

    /// H(Q) by adaptive quadrature of H′, bypassing any closed form.
    pub fn h_by_quadrature(&self, q: f64) -> Result<f64> {
        self.check(q)?;
        self.h_segment(self.domain.lo, q)
    }

    /// ∫ H′ over `[a, b]` by adaptive Simpson.
    fn h_segment(&self, a: f64, b: f64) -> Result<f64> {
        adaptive_simpson(|s| self.h_prime_raw(s), a, b, H_QUADRATURE_TOL)
    }

    /// 𝔥(Q) = Qρ²(Q).
    pub fn frak_h(&self, q: f64) -> Result<f64> {
        let r = self.rho(q)?;
        Ok(q * r * r)
    }

    /// ∫₀^Q ρ(s) ds, the integrand of the nonlinear Hodge energy.
    pub fn rho_integral(&self, q: f64) -> Result<f64> {
        self.check(q)?;
        self.rho_integral_raw(q)
    }

    pub(crate) fn rho_integral_raw(&self, q: f64) -> Result<f64> {
        Ok(match &self.family {
            Family::Chaplygin { gamma } => {
                let a = 0.5 * (gamma - 1.0);
                let m1 = 1.0 / (gamma - 1.0) + 1.0;
                (1.0 - (1.0 - a * q).powf(m1)) / (a * m1)
            }
            Family::MinimalSurface => 2.0 * ((1.0 + q).sqrt() - 1.0),
            Family::PowerLaw { k, q: e } => {
                if (e + 1.0).abs() < 1e-14 {
                    ((k + q) / k).ln()
                } else {
                    ((k + q).powf(e + 1.0) - k.powf(e + 1.0)) / (e + 1.0)
                }
            }
            Family::Constant { c } => c * q,
            Family::Custom { .. } => {
                adaptive_simpson(|s| self.rho_raw(s), self.domain.lo, q, H_QUADRATURE_TOL)?
            }
        })
    }

    /// The subsonic expression ρ² + 2Qρ′ρ (analytic continuation, no domain check).
    pub fn subsonic_expr(&self, q: f64) -> f64 {
        let r = self.rho_raw(q);
        r * r + 2.0 * q * self.drho_raw(q) * r
    }

    /// Smallest root of the subsonic expression on `(0, scan_max]`.
    ///
    /// When the admissible interval is bounded the scan is extended just past its
    /// supremum, where the formula is evaluated by continuation: the sonic point of
    /// such families coincides with the end of the interval.
    pub fn sonic_q(&self, scan_max: f64) -> Option<f64> {
        let mut end = scan_max;
        if self.domain.is_bounded() {
            end = end.max(self.domain.hi * (1.0 + 1e-6));
        }
        if !(end > 0.0 && end.is_finite()) {
            return None;
        }
        let n = 4096;
        let start = (end * 1e-12).max(f64::MIN_POSITIVE);
        let ratio = (end / start).powf(1.0 / n as f64);
        let mut prev_q = self.domain.lo;
        let mut prev = self.subsonic_expr(prev_q);
        let mut q = start;
        for i in 0..=n {
            let cur_q = if i == n { end } else { q };
            let cur = self.subsonic_expr(cur_q);
            if cur.is_finite() && prev.is_finite() && prev > 0.0 && cur <= 0.0 {
                return Some(self.bisect_sonic(prev_q, cur_q));
            }
            if cur.is_finite() {
                prev = cur;
                prev_q = cur_q;
            }
            q *= ratio;
        }
        None
    }

    fn bisect_sonic(&self, mut a: f64, mut b: f64) -> f64 {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let v = self.subsonic_expr(m);
            if v > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    /// Absolute cavitation threshold, `CAVITATION_FACTOR · ρ(lo)`.
    pub fn cavitation_threshold(&self) -> f64 {
        CAVITATION_FACTOR * self.rho_raw(self.domain.lo)
    }

    /// Scans the hypothesis constants over `scan`.
    pub fn check_hypotheses(&self, scan: &QScan) -> DensityReport {
        let pts = scan.points_in(&self.domain);
        let mut kmin = f64::INFINITY;
        let mut kmax = f64::NEG_INFINITY;
        let mut pos_sup = f64::NEG_INFINITY;
        let mut neg_inf = f64::INFINITY;
        let mut min_rho = f64::INFINITY;
        let (mut any_pos, mut any_neg) = (false, false);
        for &q in &pts {
            let r = self.rho_raw(q);
            let dr = self.drho_raw(q);
            if !(r.is_finite() && dr.is_finite()) {
                continue;
            }
            min_rho = min_rho.min(r);
            // (d/dQ)[Qρ²]/ρ = ρ + 2Qρ′
            let kappa = r + 2.0 * q * dr;
            kmin = kmin.min(kappa);
            kmax = kmax.max(kappa);
            let ratio = (0.5 * r + q * dr) / r;
            pos_sup = pos_sup.max(ratio);
            neg_inf = neg_inf.min(ratio);
            if q > 0.0 {
                any_pos |= dr > 0.0;
                any_neg |= dr < 0.0;
            }
        }
        let binding = match (any_pos, any_neg) {
            (true, false) => Binding::Positive,
            (false, true) => Binding::Negative,
            (true, true) => Binding::Mixed,
            (false, false) => Binding::Neither,
        };
        let finite = |v: f64| if v.is_finite() { Some(v) } else { None };
        DensityReport {
            sonic_q: self.sonic_q(scan.hi),
            kappa_bounds: if kmin.is_finite() && kmax.is_finite() {
                Some((kmin, kmax))
            } else {
                None
            },
            lemma2_c: self.lemma2_constant(scan).ok(),
            hypo_pos_c: finite(pos_sup),
            hypo_neg_c: finite(neg_inf),
            binding,
            min_rho,
            cavitates: min_rho < self.cavitation_threshold(),
        }
    }

    /// Empirical sup of Qρ(Q)/H(Q) over the scan, Q = 0 excluded.
    pub fn lemma2_constant(&self, scan: &QScan) -> Result<f64> {
        let pts = scan.points_in(&self.domain);
        let closed_form = matches!(
            self.family,
            Family::MinimalSurface | Family::Constant { .. }
        );
        let mut h = 0.0;
        let mut prev = self.domain.lo;
        let mut sup = f64::NEG_INFINITY;
        for &q in &pts {
            if closed_form {
                h = self.h(q)?;
            } else {
                h += self.h_segment(prev, q)?;
                prev = q;
            }
            if q <= 0.0 {
                continue;
            }
            if h <= 0.0 {
                return Err(Error::Evaluation(format!(
                    "H({q}) = {h} is not positive; ratio Q rho/H undefined for {}",
                    self.name()
                )));
            }
            sup = sup.max(q * self.rho_raw(q) / h);
        }
        if sup.is_finite() {
            Ok(sup)
        } else {
            Err(Error::Evaluation("empty scan".into()))
        }
    }
}

/// Which sign hypothesis on ρ′ governs the scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Binding {
    /// ρ′ > 0 throughout: `H′ ≤ Cρ` is the binding condition.
    Positive,
    /// ρ′ < 0 throughout: `H′ ≥ Cρ` is the binding condition.
    Negative,
    Mixed,
    /// ρ′ ≡ 0: both conditions hold automatically.
    Neither,
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Binding::Positive => "hypo_pos",
            Binding::Negative => "hypo_neg",
            Binding::Mixed => "mixed",
            Binding::Neither => "none",
        };
        f.write_str(s)
    }
}

/// Q-range with geometric sample spacing: `lo`, then points from `hi·1e−9` to `hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QScan {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
}

impl QScan {
    pub fn new(lo: f64, hi: f64, samples: usize) -> Self {
        Self { lo, hi, samples }
    }

    /// Sample points clipped to the admissible interval.
    pub fn points_in(&self, domain: &QDomain) -> Vec<f64> {
        let lo = self.lo.max(domain.lo);
        let mut hi = self.hi;
        if hi >= domain.hi {
            hi = domain.hi * (1.0 - 1e-9);
        }
        let n = self.samples.max(2);
        let mut pts = vec![lo];
        let first = (hi * 1e-9).max(lo);
        if first <= 0.0 || hi <= first {
            let step = (hi - lo) / (n - 1) as f64;
            pts.extend((1..n).map(|i| lo + step * i as f64));
            return pts;
        }
        let ratio = (hi / first).powf(1.0 / (n - 2).max(1) as f64);
        let mut q = first;
        for i in 0..n - 1 {
            let v = if i == n - 2 { hi } else { q };
            if v > *pts.last().unwrap() {
                pts.push(v);
            }
            q *= ratio;
        }
        pts
    }
}

/// Scan-based summary of a density.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub sonic_q: Option<f64>,
    pub kappa_bounds: Option<(f64, f64)>,
    pub lemma2_c: Option<f64>,
    pub hypo_pos_c: Option<f64>,
    pub hypo_neg_c: Option<f64>,
    pub binding: Binding,
    pub min_rho: f64,
    pub cavitates: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn families() -> Vec<MassDensity> {
        vec![
            MassDensity::chaplygin(1.4).unwrap(),
            MassDensity::chaplygin(2.0).unwrap(),
            MassDensity::chaplygin(3.0).unwrap(),
            MassDensity::minimal_surface(),
            MassDensity::power_law(1.0, -0.25).unwrap(),
            MassDensity::power_law(2.0, 0.5).unwrap(),
            MassDensity::constant(2.0).unwrap(),
            MassDensity::dual_minimal_surface(),
        ]
    }

    #[test]
    fn rho_examples() {
        assert_eq!(MassDensity::chaplygin(2.0).unwrap().rho(0.0).unwrap(), 1.0);
        assert!((MassDensity::minimal_surface().rho(3.0).unwrap() - 0.5).abs() < 1e-15);
        let p = MassDensity::power_law(1.0, -0.25).unwrap();
        assert!((p.rho(15.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn drho_examples() {
        assert!((MassDensity::minimal_surface().drho(0.0).unwrap() + 0.5).abs() < 1e-15);
        assert_eq!(MassDensity::constant(3.0).unwrap().drho(7.0).unwrap(), 0.0);
        assert!((MassDensity::chaplygin(2.0).unwrap().drho(0.0).unwrap() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn domain_errors_name_family() {
        let c = MassDensity::chaplygin(2.0).unwrap();
        let err = c.rho(0.7).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("chaplygin"), "{msg}");
        assert!(msg.contains("0.666"), "{msg}");
        assert!(MassDensity::minimal_surface().rho(-1.0).is_err());
        assert!(MassDensity::minimal_surface().rho(f64::NAN).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(MassDensity::chaplygin(1.0).is_err());
        assert!(MassDensity::constant(0.0).is_err());
        assert!(MassDensity::power_law(0.0, -0.25).is_err());
        assert!(MassDensity::power_law(0.0, 0.0).is_ok());
        assert!(MassDensity::power_law(-1.0, 0.5).is_err());
    }

    #[test]
    fn h_examples() {
        for d in families() {
            assert_eq!(d.h(0.0).unwrap(), 0.0, "{}", d.name());
        }
        assert!((MassDensity::minimal_surface().h(3.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((MassDensity::constant(1.0).unwrap().h(2.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn h_quadrature_matches_integration_by_parts() {
        // H = Qρ − ½∫₀^Q ρ, with the primitive taken in closed form.
        for d in [
            MassDensity::chaplygin(1.4).unwrap(),
            MassDensity::chaplygin(3.0).unwrap(),
            MassDensity::power_law(1.0, -0.25).unwrap(),
            MassDensity::power_law(0.5, 0.75).unwrap(),
        ] {
            for q in [1e-3, 0.1, 0.3, 0.45] {
                let oracle = q * d.rho(q).unwrap() - 0.5 * d.rho_integral(q).unwrap();
                let h = d.h(q).unwrap();
                assert!((h - oracle).abs() < 1e-9, "{} q={q}: {h} vs {oracle}", d.name());
            }
        }
    }

    #[test]
    fn frak_h_examples() {
        for d in families() {
            assert_eq!(d.frak_h(0.0).unwrap(), 0.0);
        }
        assert!((MassDensity::minimal_surface().frak_h(3.0).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(MassDensity::constant(2.0).unwrap().frak_h(1.0).unwrap(), 4.0);
    }

    #[test]
    fn rho_integral_matches_quadrature() {
        for d in families() {
            let top = if d.domain().is_bounded() {
                0.9 * d.domain().hi
            } else {
                5.0
            };
            for q in [0.0, 0.25 * top, top] {
                let oracle = adaptive_simpson(|s| d.rho_raw(s), 0.0, q, 1e-12).unwrap();
                assert!((d.rho_integral(q).unwrap() - oracle).abs() < 1e-9, "{}", d.name());
            }
        }
    }

    #[test]
    fn sonic_examples() {
        let c = MassDensity::chaplygin(2.0).unwrap();
        let s = c.sonic_q(0.66).unwrap();
        assert!((s - 2.0 / 3.0).abs() < 1e-10, "{s}");
        for g in [1.4, 2.0, 3.0] {
            let s = MassDensity::chaplygin(g).unwrap().sonic_q(0.5).unwrap();
            assert!((s - 2.0 / (g + 1.0)).abs() < 1e-10);
        }
        assert_eq!(MassDensity::minimal_surface().sonic_q(1e6), None);
        assert_eq!(MassDensity::constant(4.0).unwrap().sonic_q(1e3), None);
        assert_eq!(MassDensity::dual_minimal_surface().sonic_q(0.9), None);
    }

    #[test]
    fn hypotheses_power_law() {
        let p = MassDensity::power_law(1.0, -0.25).unwrap();
        let rep = p.check_hypotheses(&QScan::new(0.0, 1e4, 400));
        assert!(rep.hypo_neg_c.unwrap() >= 0.25);
        assert_eq!(rep.binding, Binding::Negative);
        assert!(!rep.cavitates);
    }

    #[test]
    fn hypotheses_constant_and_minimal_surface() {
        let c = MassDensity::constant(3.0).unwrap();
        let rep = c.check_hypotheses(&QScan::new(0.0, 50.0, 100));
        let (k1, k2) = rep.kappa_bounds.unwrap();
        assert_eq!(k1, k2);
        assert_eq!(k1, 3.0);
        assert_eq!(rep.binding, Binding::Neither);

        let m = MassDensity::minimal_surface();
        let small = m.check_hypotheses(&QScan::new(0.0, 100.0, 200)).hypo_neg_c.unwrap();
        let large = m.check_hypotheses(&QScan::new(0.0, 1e4, 200)).hypo_neg_c.unwrap();
        assert!((small - 0.5 / 101.0).abs() < 1e-12);
        assert!(large < small / 50.0);
    }

    #[test]
    fn lemma2_examples() {
        let c = MassDensity::constant(1.7).unwrap();
        let v = c.lemma2_constant(&QScan::new(0.0, 100.0, 200)).unwrap();
        assert!((v - 2.0).abs() < 1e-12);

        let p = MassDensity::power_law(1.0, -0.25).unwrap();
        let a = p.lemma2_constant(&QScan::new(0.0, 1e5, 300)).unwrap();
        let b = p.lemma2_constant(&QScan::new(0.0, 1e6, 300)).unwrap();
        assert!(a.is_finite() && b.is_finite());
        assert!((a - b).abs() / b < 0.05, "{a} {b}");
        // limit (q+1)/(q+½) = 3
        assert!(b < 3.0 + 1e-6);

        let m = MassDensity::minimal_surface();
        let a = m.lemma2_constant(&QScan::new(0.0, 1e4, 200)).unwrap();
        let b = m.lemma2_constant(&QScan::new(0.0, 1e6, 200)).unwrap();
        assert!(b / a > 8.0, "expected ~sqrt growth, {a} -> {b}");
    }

    #[test]
    fn energy_ratio_of_increasing_density_bounded_by_two() {
        for d in [
            MassDensity::power_law(1.0, 0.5).unwrap(),
            MassDensity::power_law(0.2, 2.0).unwrap(),
        ] {
            let v = d.lemma2_constant(&QScan::new(0.0, 1e4, 300)).unwrap();
            assert!(v <= 2.0 + 1e-9, "{} {v}", d.name());
        }
    }

    #[test]
    fn cavitation_flag() {
        let p = MassDensity::power_law(1.0, -0.45).unwrap();
        let rep = p.check_hypotheses(&QScan::new(0.0, 1e30, 200));
        assert!(rep.cavitates);
        let rep = p.check_hypotheses(&QScan::new(0.0, 1e3, 200));
        assert!(!rep.cavitates);
    }

    #[test]
    fn scan_points_are_increasing_and_clipped() {
        let c = MassDensity::chaplygin(2.0).unwrap();
        let pts = QScan::new(0.0, 10.0, 50).points_in(&c.domain());
        assert_eq!(pts[0], 0.0);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert!(c.domain().contains(*pts.last().unwrap()));
    }
}
