//! Closed-form populations, variances and correlation functions for both
//! coupling kinds, at finite time and in the stationary limit.
//!
//! Every quantity is an affine function of two envelopes: `w` multiplies the
//! initial asymmetries (populations, single-mode correlations, variances) and
//! `u` generates the inter-mode correlations. The helpers taking an
//! [`EnvelopePair`] let callers evaluate at an arbitrary scaled angle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    derived_params, scaled_coupling, validate, CouplingConfig, CouplingKind, DerivedParams, ScaledCoupling,
    SystemConfig,
};

/// Equal-time second moments of the two modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub pop_a: f64,
    pub pop_b: f64,
    /// `<aa>`
    pub c_aa: Complex64,
    /// `<bb>`
    pub c_bb: Complex64,
    /// `<a^dag b>`
    pub c_adagb: Complex64,
    /// `<ab>`
    pub c_ab: Complex64,
}

impl MomentSet {
    /// Largest absolute componentwise difference.
    pub fn max_abs_diff(&self, other: &MomentSet) -> f64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Real components in a fixed order: populations then re/im of each correlation.
    pub fn components(&self) -> [f64; 10] {
        [
            self.pop_a,
            self.pop_b,
            self.c_aa.re,
            self.c_aa.im,
            self.c_bb.re,
            self.c_bb.im,
            self.c_adagb.re,
            self.c_adagb.im,
            self.c_ab.re,
            self.c_ab.im,
        ]
    }

    /// Populations non-negative and each `|<rr>| <= sqrt(N(N+1))`, within tolerance.
    pub fn is_physical(&self) -> bool {
        let single =
            |pop: f64, c: Complex64| pop >= -1e-10 && c.norm() <= (pop.max(0.0) * (pop.max(0.0) + 1.0)).sqrt() + 1e-8;
        single(self.pop_a, self.c_aa) && single(self.pop_b, self.c_bb)
    }
}

/// Quadrature variances and symmetrized cross moments of each mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceSet {
    pub xx_a: f64,
    pub yy_a: f64,
    pub xy_a: f64,
    pub xx_b: f64,
    pub yy_b: f64,
    pub xy_b: f64,
}

impl VarianceSet {
    pub fn components(&self) -> [f64; 6] {
        [self.xx_a, self.yy_a, self.xy_a, self.xx_b, self.yy_b, self.xy_b]
    }

    pub fn max_abs_diff(&self, other: &VarianceSet) -> f64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Per-mode uncertainty relation `<X^2><Y^2> - <XY>^2 >= 1/4`.
    pub fn satisfies_uncertainty(&self) -> bool {
        let ok = |xx: f64, yy: f64, xy: f64| xx > 0.0 && yy > 0.0 && xx * yy - xy * xy >= 0.25 - 1e-10;
        ok(self.xx_a, self.yy_a, self.xy_a) && ok(self.xx_b, self.yy_b, self.xy_b)
    }
}

/// The two universal envelopes at one `(t, g)` point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopePair {
    pub kind: CouplingKind,
    pub w: f64,
    pub u: f64,
}

impl EnvelopePair {
    /// Stationary envelopes at scaled angle `angle`: `(sin^2, sin cos)` or `(sinh^2, sinh cosh)`.
    pub fn steady(scaled: ScaledCoupling) -> Self {
        let a = scaled.angle;
        let (w, u) = match scaled.kind {
            CouplingKind::Linear => {
                let (s, c) = a.sin_cos();
                (s * s, s * c)
            }
            CouplingKind::Nonlinear => {
                let (s, c) = (a.sinh(), a.cosh());
                (s * s, s * c)
            }
        };
        Self {
            kind: scaled.kind,
            w,
            u,
        }
    }

    /// Envelopes after time `t`.
    pub fn at(coupling: &CouplingConfig, t: f64) -> Result<Self> {
        coupling.validate()?;
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Config(format!("time must be finite and >= 0, got {t}")));
        }
        if !coupling.g.is_finite() {
            return Err(Error::Config("infinite coupling has no finite-time solution".into()));
        }
        let (g, kappa) = (coupling.g, coupling.kappa);
        let decay = (-2.0 * kappa * t).exp();
        let (w, u) = match coupling.kind {
            CouplingKind::Linear => {
                let psi = (g / kappa).atan();
                let s = psi.sin();
                let phase = 2.0 * g * t + psi;
                (s * (s - decay * phase.sin()), s * (psi.cos() - decay * phase.cos()))
            }
            CouplingKind::Nonlinear if g < kappa => {
                let chi = (g / kappa).atanh();
                let s = chi.sinh();
                let phase = 2.0 * g * t + chi;
                (s * (s - decay * phase.sinh()), s * (chi.cosh() - decay * phase.cosh()))
            }
            CouplingKind::Nonlinear => nonlinear_rate_form(g, kappa, t),
        };
        Ok(Self {
            kind: coupling.kind,
            w,
            u,
        })
    }
}

/// Parametric envelopes written through `(1 - e^{-x})/x`, valid for every
/// `g` including `g >= kappa` where the scaled angle does not exist.
fn nonlinear_rate_form(g: f64, kappa: f64, t: f64) -> (f64, f64) {
    let relax = |x: f64| if x == 0.0 { 1.0 } else { -(-x).exp_m1() / x };
    let slow = relax(2.0 * (kappa - g) * t);
    let fast = relax(2.0 * (kappa + g) * t);
    (g * t * (slow - fast), g * t * (slow + fast))
}

pub fn envelope_w(coupling: &CouplingConfig, t: f64) -> Result<f64> {
    EnvelopePair::at(coupling, t).map(|e| e.w)
}

pub fn envelope_u(coupling: &CouplingConfig, t: f64) -> Result<f64> {
    EnvelopePair::at(coupling, t).map(|e| e.u)
}

pub fn steady_envelopes(coupling: &CouplingConfig) -> Result<EnvelopePair> {
    scaled_coupling(coupling).map(EnvelopePair::steady)
}

/// Noise split into parts untouched by the coupling (`V+-`) and parts it acts on (`U+-`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceDecomposition {
    pub v_plus: f64,
    pub v_minus: f64,
    pub u_plus: f64,
    pub u_minus: f64,
}

pub fn variance_decomposition(config: &SystemConfig) -> Result<VarianceDecomposition> {
    let d = derived_params(config)?;
    let (s, c) = d.phi.sin_cos();
    let (s2, c2) = (s * s, c * c);
    Ok(VarianceDecomposition {
        v_plus: 0.5 + d.n + d.m * c2 - d.dm * s2,
        v_minus: 0.5 + d.n - d.m * c2 + d.dm * s2,
        u_plus: d.dn + d.m * s2 - d.dm * c2,
        u_minus: d.dn - d.m * s2 + d.dm * c2,
    })
}

/// Moments for given envelopes; the kind is taken from `env`.
pub fn moments_with(config: &SystemConfig, env: EnvelopePair) -> Result<MomentSet> {
    let config = validate(config)?.config;
    let d = derived_params(&config)?;
    let (a, b) = (config.mode_a, config.mode_b);
    let input_aa = Complex64::from_polar(a.m, 2.0 * d.phi);
    let input_bb = Complex64::new(b.m, 0.0);
    let EnvelopePair { w, u, .. } = env;
    Ok(match env.kind {
        CouplingKind::Linear => {
            let amp = linear_amplitude(&d);
            MomentSet {
                pop_a: d.n + d.dn * (1.0 - w),
                pop_b: d.n - d.dn * (1.0 - w),
                c_aa: input_aa - amp * w,
                c_bb: input_bb + amp * w,
                c_adagb: Complex64::new(-d.dn * u, 0.0),
                c_ab: -amp * u,
            }
        }
        CouplingKind::Nonlinear => {
            let amp = nonlinear_amplitude(&d);
            let half_plus = d.n + 0.5;
            MomentSet {
                pop_a: a.n + half_plus * w,
                pop_b: b.n + half_plus * w,
                c_aa: input_aa + amp * w,
                c_bb: input_bb + amp.conj() * w,
                c_adagb: amp.conj() * u,
                c_ab: Complex64::new(half_plus * u, 0.0),
            }
        }
    })
}

// The amplitudes depend only on (m, delta_m, phi), so they are rebuilt for the
// requested kind rather than the kind stored in the config.
fn linear_amplitude(d: &DerivedParams) -> Complex64 {
    d.linear_amplitude()
}

fn nonlinear_amplitude(d: &DerivedParams) -> Complex64 {
    d.nonlinear_amplitude()
}

pub fn variances_with(config: &SystemConfig, env: EnvelopePair) -> Result<VarianceSet> {
    let dec = variance_decomposition(config)?;
    let ms = moments_with(config, env)?;
    let w = env.w;
    let (xx_a, yy_a, xx_b, yy_b) = match env.kind {
        CouplingKind::Linear => {
            let keep = 1.0 - w;
            (
                dec.v_plus + dec.u_minus * keep,
                dec.v_minus + dec.u_plus * keep,
                dec.v_plus - dec.u_minus * keep,
                dec.v_minus - dec.u_plus * keep,
            )
        }
        CouplingKind::Nonlinear => {
            let gain = 1.0 + w;
            (
                dec.v_plus * gain + dec.u_minus,
                dec.v_minus * gain + dec.u_plus,
                dec.v_plus * gain - dec.u_minus,
                dec.v_minus * gain - dec.u_plus,
            )
        }
    };
    // the cross moment is fixed by the single-mode correlation: <XY>_sym = -Im<rr>
    Ok(VarianceSet {
        xx_a,
        yy_a,
        xy_a: -ms.c_aa.im,
        xx_b,
        yy_b,
        xy_b: -ms.c_bb.im,
    })
}

pub fn moments(config: &SystemConfig, t: f64) -> Result<MomentSet> {
    moments_with(config, EnvelopePair::at(&config.coupling, t)?)
}

pub fn variances(config: &SystemConfig, t: f64) -> Result<VarianceSet> {
    variances_with(config, EnvelopePair::at(&config.coupling, t)?)
}

pub fn populations(config: &SystemConfig, t: f64) -> Result<(f64, f64)> {
    moments(config, t).map(|m| (m.pop_a, m.pop_b))
}

pub fn single_mode_correlations(config: &SystemConfig, t: f64) -> Result<(Complex64, Complex64)> {
    moments(config, t).map(|m| (m.c_aa, m.c_bb))
}

pub fn two_mode_correlations(config: &SystemConfig, t: f64) -> Result<(Complex64, Complex64)> {
    moments(config, t).map(|m| (m.c_adagb, m.c_ab))
}

/// Stationary moments; errors with [`Error::Stability`] for parametric coupling at `g >= kappa`.
pub fn steady_moments(config: &SystemConfig) -> Result<MomentSet> {
    moments_with(config, steady_envelopes(&config.coupling)?)
}

pub fn steady_variances(config: &SystemConfig) -> Result<VarianceSet> {
    variances_with(config, steady_envelopes(&config.coupling)?)
}

/// Stationary moments at an explicit scaled angle, bypassing `g`.
pub fn steady_moments_at_angle(config: &SystemConfig, angle: f64) -> Result<MomentSet> {
    moments_with(
        config,
        EnvelopePair::steady(ScaledCoupling {
            kind: config.kind(),
            angle,
        }),
    )
}

pub fn steady_variances_at_angle(config: &SystemConfig, angle: f64) -> Result<VarianceSet> {
    variances_with(
        config,
        EnvelopePair::steady(ScaledCoupling {
            kind: config.kind(),
            angle,
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModeParams;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn cfg(kind: CouplingKind, g: f64, a: ModeParams, b: ModeParams, phi: f64) -> SystemConfig {
        SystemConfig::new(a, b, phi, CouplingConfig::new(kind, g, 1.0))
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn envelopes_vanish_at_zero_time() {
        for kind in [CouplingKind::Linear, CouplingKind::Nonlinear] {
            for g in [0.0, 0.3, 0.9, 1.5, 7.0] {
                let e = EnvelopePair::at(&CouplingConfig::new(kind, g, 1.0), 0.0).unwrap();
                assert_eq!((e.w, e.u), (0.0, 0.0), "{kind} g={g}");
            }
        }
    }

    #[test]
    fn linear_envelope_reference_point() {
        // kappa = g = 1, t = 1: sin(pi/4)[sin(pi/4) - e^{-2} sin(2 + pi/4)]
        let w = envelope_w(&CouplingConfig::new(CouplingKind::Linear, 1.0, 1.0), 1.0).unwrap();
        let s = FRAC_PI_4.sin();
        let want = s * (s - (-2f64).exp() * (2.0 + FRAC_PI_4).sin());
        assert!(close(w, want, 1e-15));
        assert!(close(w, 0.4666296625931755, 1e-12));
    }

    #[test]
    fn long_time_envelopes_reach_steady_values() {
        let c = CouplingConfig::new(CouplingKind::Linear, 1.7, 1.0);
        let late = EnvelopePair::at(&c, 40.0).unwrap();
        let st = steady_envelopes(&c).unwrap();
        assert!(close(late.w, st.w, 1e-15) && close(late.u, st.u, 1e-15));
        let psi = 1.7f64.atan();
        assert!(close(st.w, psi.sin().powi(2), 1e-15));

        let c = CouplingConfig::new(CouplingKind::Nonlinear, 0.6, 1.0);
        let late = EnvelopePair::at(&c, 60.0).unwrap();
        let st = steady_envelopes(&c).unwrap();
        assert!(close(late.w, st.w, 1e-13) && close(late.u, st.u, 1e-13));
    }

    #[test]
    fn linear_u_peaks_at_quarter_pi() {
        let st = EnvelopePair::steady(ScaledCoupling {
            kind: CouplingKind::Linear,
            angle: FRAC_PI_4,
        });
        assert!(close(st.u, 0.5, 1e-15));
    }

    #[test]
    fn nonlinear_steady_u_at_unit_angle() {
        let st = EnvelopePair::steady(ScaledCoupling {
            kind: CouplingKind::Nonlinear,
            angle: 1.0,
        });
        assert!(close(st.u, 1f64.sinh() * 1f64.cosh(), 1e-15));
        assert!(close(st.u, 1.8134302039235093, 1e-13));
    }

    #[test]
    fn rate_form_matches_angle_form_below_threshold() {
        for &(g, t) in &[(0.1, 0.3), (0.5, 1.0), (0.95, 10.0), (0.7, 0.01)] {
            let c = CouplingConfig::new(CouplingKind::Nonlinear, g, 1.0);
            let e = EnvelopePair::at(&c, t).unwrap();
            let (w, u) = nonlinear_rate_form(g, 1.0, t);
            assert!(close(e.w, w, 1e-12 * (1.0 + w.abs())), "g={g} t={t}");
            assert!(close(e.u, u, 1e-12 * (1.0 + u.abs())), "g={g} t={t}");
        }
    }

    #[test]
    fn above_threshold_finite_time_allowed_but_not_steady() {
        let c = CouplingConfig::new(CouplingKind::Nonlinear, 1.0, 1.0);
        let e = EnvelopePair::at(&c, 1.0).unwrap();
        // g = kappa: w = gt[1 - (1-e^{-4})/4]
        assert!(close(e.w, 1.0 - (1.0 - (-4f64).exp()) / 4.0, 1e-15));
        assert!(matches!(steady_envelopes(&c), Err(Error::Stability { .. })));
    }

    #[test]
    fn decomposition_special_cases() {
        let vac = cfg(
            CouplingKind::Linear,
            1.0,
            ModeParams::vacuum(),
            ModeParams::vacuum(),
            0.3,
        );
        let d = variance_decomposition(&vac).unwrap();
        assert_eq!((d.v_plus, d.v_minus, d.u_plus, d.u_minus), (0.5, 0.5, 0.0, 0.0));

        let sq = ModeParams::new(0.8, 1.0);
        let eq = cfg(CouplingKind::Linear, 1.0, sq, sq, FRAC_PI_2);
        let d = variance_decomposition(&eq).unwrap();
        assert!(close(d.v_plus, 1.3, 1e-15) && close(d.v_minus, 1.3, 1e-15));

        let one = cfg(CouplingKind::Linear, 1.0, sq, ModeParams::vacuum(), 0.9);
        let d = variance_decomposition(&one).unwrap();
        assert!(close(d.v_plus, 0.5 + 0.4 + 0.5 * 1.8f64.cos(), 1e-15));
        assert!(close(d.v_minus, 0.5 + 0.4 - 0.5 * 1.8f64.cos(), 1e-15));
    }

    #[test]
    fn zero_time_reproduces_input() {
        let a = ModeParams::new(0.9, 1.1);
        let b = ModeParams::new(0.3, 0.2);
        for kind in [CouplingKind::Linear, CouplingKind::Nonlinear] {
            let c = cfg(kind, 0.6, a, b, 2.2);
            let ms = moments(&c, 0.0).unwrap();
            assert!(close(ms.pop_a, 0.9, 1e-15) && close(ms.pop_b, 0.3, 1e-15));
            assert!((ms.c_aa - Complex64::from_polar(1.1, 4.4)).norm() < 1e-15);
            assert!((ms.c_bb - Complex64::new(0.2, 0.0)).norm() < 1e-15);
            assert_eq!(ms.c_adagb.norm() + ms.c_ab.norm(), 0.0);

            let vs = variances(&c, 0.0).unwrap();
            let cov = crate::model::input_covariance(&c).unwrap();
            let from_cov = crate::oracle::extract_variances(&cov);
            assert!(vs.max_abs_diff(&from_cov) < 1e-15);
        }
    }

    #[test]
    fn linear_strong_coupling_equalizes_variances() {
        let c = cfg(
            CouplingKind::Linear,
            f64::INFINITY,
            ModeParams::new(1.0, 1.2),
            ModeParams::new(0.2, 0.3),
            0.4,
        );
        let vs = steady_variances(&c).unwrap();
        let d = variance_decomposition(&c).unwrap();
        assert!(close(vs.xx_a, d.v_plus, 1e-15) && close(vs.xx_b, d.v_plus, 1e-15));
        assert!(close(vs.yy_a, d.v_minus, 1e-15) && close(vs.yy_b, d.v_minus, 1e-15));
        assert!(moments(&c, 1.0).is_err());
    }

    #[test]
    fn nonlinear_equal_squeezed_steady_variances() {
        let (n, m) = (0.5, 0.75f64.sqrt());
        let g = 0.6;
        let c = cfg(
            CouplingKind::Nonlinear,
            g,
            ModeParams::new(n, m),
            ModeParams::new(n, m),
            0.0,
        );
        let vs = steady_variances(&c).unwrap();
        let ch2 = g.atanh().cosh().powi(2);
        assert!(close(vs.xx_a, (0.5 + n + m) * ch2, 1e-13));
        assert!(close(vs.yy_a, (0.5 + n - m) * ch2, 1e-13));
    }

    #[test]
    fn linear_equal_populations_stay_put() {
        let c = cfg(
            CouplingKind::Linear,
            3.0,
            ModeParams::new(0.6, 0.1),
            ModeParams::new(0.6, 0.7),
            1.0,
        );
        for t in [0.0, 0.2, 1.0, 5.0] {
            let (pa, pb) = populations(&c, t).unwrap();
            assert!(close(pa, 0.6, 1e-15) && close(pb, 0.6, 1e-15));
        }
    }

    #[test]
    fn linear_half_population_transfer() {
        let c = cfg(
            CouplingKind::Linear,
            f64::INFINITY,
            ModeParams::ideal_squeezed(0.5),
            ModeParams::vacuum(),
            0.0,
        );
        let ms = steady_moments(&c).unwrap();
        assert!(close(ms.pop_a, 0.25, 1e-15) && close(ms.pop_b, 0.25, 1e-15));
    }

    #[test]
    fn nonlinear_vacuum_population_build_up() {
        let c = cfg(
            CouplingKind::Nonlinear,
            0.0,
            ModeParams::vacuum(),
            ModeParams::vacuum(),
            0.0,
        );
        let ms = steady_moments_at_angle(&c, 1.0).unwrap();
        let want = 0.5 * 1f64.sinh().powi(2);
        assert!(close(ms.pop_a, want, 1e-15) && close(ms.pop_b, want, 1e-15));
        assert!(close(ms.pop_a, 0.6905489227709077, 1e-13));
        assert!(close(ms.c_ab.re, 0.5 * 1f64.sinh() * 1f64.cosh(), 1e-15));
        assert_eq!(ms.c_adagb.norm(), 0.0);
    }

    #[test]
    fn linear_correlations_equal_squeezed_orthogonal_vanish() {
        let sq = ModeParams::new(0.4, 0.6);
        let c = cfg(CouplingKind::Linear, f64::INFINITY, sq, sq, FRAC_PI_2);
        let ms = steady_moments(&c).unwrap();
        assert!(ms.c_aa.norm() < 1e-15 && ms.c_bb.norm() < 1e-15);
    }

    #[test]
    fn linear_transfer_from_squeezed_to_uncorrelated() {
        let (ma, psi) = (0.9, 0.8);
        let c = cfg(
            CouplingKind::Linear,
            0.0,
            ModeParams::new(1.0, ma),
            ModeParams::thermal(0.4),
            0.0,
        );
        let ms = steady_moments_at_angle(&c, psi).unwrap();
        let s2 = psi.sin().powi(2);
        assert!((ms.c_aa - Complex64::new(ma * (1.0 - 0.5 * s2), 0.0)).norm() < 1e-15);
        assert!((ms.c_bb - Complex64::new(0.5 * ma * s2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn linear_first_order_correlation_magnitude() {
        // dn = 0.25, psi = pi/3
        let c = cfg(
            CouplingKind::Linear,
            0.0,
            ModeParams::thermal(0.5),
            ModeParams::vacuum(),
            0.0,
        );
        let ms = steady_moments_at_angle(&c, FRAC_PI_3).unwrap();
        assert!(close(
            ms.c_adagb.norm(),
            0.25 * FRAC_PI_3.sin() * FRAC_PI_3.cos(),
            1e-15
        ));
        assert!(close(ms.c_adagb.norm(), 0.10825317547305485, 1e-15));
    }

    #[test]
    fn uncoupled_steady_state_is_input_state() {
        let a = ModeParams::new(0.9, 1.1);
        let b = ModeParams::new(0.3, 0.2);
        for kind in [CouplingKind::Linear, CouplingKind::Nonlinear] {
            let c = cfg(kind, 0.0, a, b, 1.1);
            assert!(steady_moments(&c).unwrap().max_abs_diff(&moments(&c, 0.0).unwrap()) < 1e-15);
        }
    }
}
