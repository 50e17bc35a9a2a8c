//! FSO link budget: free-space path loss, Kim/Mie atmospheric attenuation,
//! Gamma-Gamma scintillation, pointing-error loss, SNR, and Shannon capacity
//! for uplink, downlink, and inter-satellite links.

pub mod specfun;

use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

use rand::Rng;
use statrs::distribution::{Continuous, ContinuousCDF, Gamma as GammaDist};
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma;
use thiserror::Error;

use specfun::{bessel_k, simpson};

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("elevation {0} deg is not above the horizon")]
    NonPositiveElevation(f64),
    #[error("range {0} km too short (must exceed 1 km)")]
    RangeTooShort(f64),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Scenario-level physical-layer parameters.
///
/// Directional quantities (transmit power and antenna gains) are resolved per
/// link: the ground terminal transmits on the uplink, the satellite terminal
/// on the downlink and on LISLs. The beam radius at the receiver follows from
/// the divergence half-angle, w_z = R * theta_div.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudgetParams {
    /// Ground-station transmit power, W.
    pub p_t_ground_w: f64,
    /// Satellite transmit power, W.
    pub p_t_sat_w: f64,
    /// Number of data wavelengths sharing the transmit power.
    pub n_ch: u32,
    /// Ground-station antenna gain, dBi.
    pub g_gs_dbi: f64,
    /// Satellite antenna gain, dBi.
    pub g_sat_dbi: f64,
    /// Transmitter optical efficiency, (0, 1].
    pub eta_t: f64,
    /// Receiver optical efficiency, (0, 1].
    pub eta_r: f64,
    /// Channel bandwidth, Hz.
    pub bandwidth_hz: f64,
    /// System noise power, W. `None` derives it from `snr_ref_db` (see
    /// [`LinkBudgetParams::noise_power_w`]).
    pub noise_power_w: Option<f64>,
    /// Reference SNR in dB for a zenith downlink at 1000 km, used to derive
    /// the default noise power.
    pub snr_ref_db: f64,
    /// Optical wavelength, m.
    pub wavelength_m: f64,
    /// Visibility, km (Kim model input).
    pub visibility_km: f64,
    /// Extinction ratio of the Mie term, unitless.
    pub extinction_ratio: f64,
    /// Receiving aperture radius w_d, m.
    pub aperture_radius_m: f64,
    /// Full beam divergence half-angle, rad; w_z = R * theta_div.
    pub beam_divergence_rad: f64,
    /// Pointing jitter standard deviation as a fraction of w_d.
    pub sigma_p_over_wd: f64,
    /// Gamma-Gamma small-scale shape parameter.
    pub alpha_turb: f64,
    /// Gamma-Gamma large-scale shape parameter.
    pub beta_turb: f64,
    /// Fiber-coupling / channel loss, dB.
    pub l_fc_db: f64,
    /// Effective atmosphere height for the scattering path, km.
    pub h_atm_km: f64,
    /// Outage percentile used for the scintillation fade margin.
    pub scintillation_percentile: f64,
}

impl Default for LinkBudgetParams {
    fn default() -> Self {
        LinkBudgetParams {
            p_t_ground_w: 10.0,
            p_t_sat_w: 0.7,
            n_ch: 4,
            g_gs_dbi: 125.0,
            g_sat_dbi: 120.0,
            eta_t: 0.8,
            eta_r: 0.8,
            bandwidth_hz: 10e9,
            noise_power_w: None,
            snr_ref_db: 40.0,
            wavelength_m: 1550e-9,
            visibility_km: 60.0,
            extinction_ratio: 0.1,
            aperture_radius_m: 0.4,
            beam_divergence_rad: 15e-6,
            sigma_p_over_wd: 0.30,
            alpha_turb: 4.0,
            beta_turb: 2.0,
            l_fc_db: 1.0,
            h_atm_km: 20.0,
            scintillation_percentile: 0.01,
        }
    }
}

impl LinkBudgetParams {
    pub fn validate(&self) -> Result<(), ChannelError> {
        let positive = [
            ("p_t_ground_w", self.p_t_ground_w),
            ("p_t_sat_w", self.p_t_sat_w),
            ("bandwidth_hz", self.bandwidth_hz),
            ("wavelength_m", self.wavelength_m),
            ("visibility_km", self.visibility_km),
            ("aperture_radius_m", self.aperture_radius_m),
            ("beam_divergence_rad", self.beam_divergence_rad),
            ("sigma_p_over_wd", self.sigma_p_over_wd),
            ("alpha_turb", self.alpha_turb),
            ("beta_turb", self.beta_turb),
            ("h_atm_km", self.h_atm_km),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(ChannelError::Numerical(format!("{name} must be positive")));
            }
        }
        if !(self.eta_t > 0.0 && self.eta_t <= 1.0 && self.eta_r > 0.0 && self.eta_r <= 1.0) {
            return Err(ChannelError::Numerical("eta must be in (0, 1]".into()));
        }
        if self.n_ch == 0 {
            return Err(ChannelError::Numerical("n_ch must be positive".into()));
        }
        if !(self.scintillation_percentile > 0.0 && self.scintillation_percentile <= 0.5) {
            return Err(ChannelError::Numerical(
                "scintillation percentile must be in (0, 0.5]".into(),
            ));
        }
        if self.l_fc_db < 0.0 {
            return Err(ChannelError::Numerical("l_fc_db must be >= 0".into()));
        }
        Ok(())
    }

    /// System noise power: explicit override, or derived so that a zenith
    /// downlink at 1000 km yields `snr_ref_db` of SNR.
    pub fn noise_power_w(&self) -> f64 {
        if let Some(n0) = self.noise_power_w {
            return n0;
        }
        let reference = self
            .received_power_updown(1000.0, 90.0, LinkDirection::Down)
            .expect("reference downlink budget");
        reference.p_r_w / db_to_linear(self.snr_ref_db)
    }

    /// Pointing jitter standard deviation, m.
    pub fn sigma_p_m(&self) -> f64 {
        self.sigma_p_over_wd * self.aperture_radius_m
    }

    /// Beam radius at the receiver for a link of the given range, m.
    pub fn beam_radius_at(&self, range_km: f64) -> f64 {
        range_km * 1000.0 * self.beam_divergence_rad
    }

    /// Composed received power, SNR, and capacity for an uplink or downlink.
    pub fn received_power_updown(
        &self,
        range_km: f64,
        elevation_deg: f64,
        direction: LinkDirection,
    ) -> Result<LinkLossBreakdown, ChannelError> {
        if range_km <= 1.0 {
            return Err(ChannelError::RangeTooShort(range_km));
        }
        let l_fso = fso_path_loss(self.wavelength_m, range_km);
        let l_atm_att = atmospheric_attenuation(
            self.visibility_km,
            self.wavelength_m,
            elevation_deg,
            self.extinction_ratio,
            self.h_atm_km,
            range_km,
        )?;
        let l_atm = match direction {
            LinkDirection::Up => {
                l_atm_att
                    * scintillation_loss(
                        self.alpha_turb,
                        self.beta_turb,
                        self.scintillation_percentile,
                    )?
            }
            LinkDirection::Down => l_atm_att,
        };
        let pointing = PointingGeometry::new(
            self.aperture_radius_m,
            self.beam_radius_at(range_km),
            self.sigma_p_m(),
        );
        let l_p = pointing.mean_loss();
        let l_fc = db_to_linear(-self.l_fc_db);
        let (p_t, g_t_dbi, g_r_dbi) = match direction {
            LinkDirection::Up => (self.p_t_ground_w, self.g_gs_dbi, self.g_sat_dbi),
            LinkDirection::Down => (self.p_t_sat_w, self.g_sat_dbi, self.g_gs_dbi),
        };
        let gains = db_to_linear(g_t_dbi) * db_to_linear(g_r_dbi) * self.eta_t * self.eta_r;
        let p_r = p_t / f64::from(self.n_ch) * gains * l_fso * l_atm * l_fc * l_p;
        Ok(LinkLossBreakdown {
            l_fso,
            l_atm,
            l_p,
            l_fc,
            p_r_w: p_r,
        })
    }

    /// Composed received power for a LISL: no atmospheric terms.
    pub fn received_power_lisl(&self, range_km: f64) -> Result<LinkLossBreakdown, ChannelError> {
        if range_km <= 1.0 {
            return Err(ChannelError::RangeTooShort(range_km));
        }
        let l_fso = fso_path_loss(self.wavelength_m, range_km);
        let pointing = PointingGeometry::new(
            self.aperture_radius_m,
            self.beam_radius_at(range_km),
            self.sigma_p_m(),
        );
        let l_p = pointing.mean_loss();
        let l_fc = db_to_linear(-self.l_fc_db);
        let gains =
            db_to_linear(self.g_sat_dbi) * db_to_linear(self.g_sat_dbi) * self.eta_t * self.eta_r;
        let p_r = self.p_t_sat_w / f64::from(self.n_ch) * gains * l_fso * l_fc * l_p;
        Ok(LinkLossBreakdown {
            l_fso,
            l_atm: 1.0,
            l_p,
            l_fc,
            p_r_w: p_r,
        })
    }

    /// Capacity of a link given its received power, bits/s.
    pub fn capacity_of(&self, breakdown: &LinkLossBreakdown) -> f64 {
        capacity(breakdown.p_r_w, self.noise_power_w(), self.bandwidth_hz)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkDirection {
    Up,
    Down,
}

/// All multiplicative stages of one link budget, linear factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkLossBreakdown {
    pub l_fso: f64,
    pub l_atm: f64,
    pub l_p: f64,
    pub l_fc: f64,
    pub p_r_w: f64,
}

/// Free-space path loss (lambda / (4 pi R))^2, linear factor.
pub fn fso_path_loss(wavelength_m: f64, range_km: f64) -> f64 {
    let r_m = range_km * 1000.0;
    let x = wavelength_m / (4.0 * std::f64::consts::PI * r_m);
    x * x
}

/// Kim-model scattering attenuation coefficient, dB/km.
pub fn kim_scattering_coeff_db_per_km(visibility_km: f64, wavelength_m: f64) -> f64 {
    let v = visibility_km;
    let q = if v > 50.0 {
        1.6
    } else if v > 6.0 {
        1.3
    } else if v > 1.0 {
        0.16 * v + 0.34
    } else if v > 0.5 {
        v - 0.5
    } else {
        0.0
    };
    let lambda_nm = wavelength_m * 1e9;
    let alpha_per_km = 3.91 / v * (lambda_nm / 550.0).powf(-q);
    alpha_per_km * 10.0 / std::f64::consts::LN_10
}

/// Atmospheric transmittance: Kim scattering over the atmospheric path
/// combined with the Mie extinction term, linear factor in (0, 1].
///
/// The scattering path is capped at h_atm / sin(el) so attenuation only
/// accrues inside the atmosphere.
pub fn atmospheric_attenuation(
    visibility_km: f64,
    wavelength_m: f64,
    elevation_deg: f64,
    extinction_ratio: f64,
    h_atm_km: f64,
    slant_range_km: f64,
) -> Result<f64, ChannelError> {
    if elevation_deg <= 0.0 {
        return Err(ChannelError::NonPositiveElevation(elevation_deg));
    }
    let sin_el = elevation_deg.to_radians().sin();
    let d_atm = (h_atm_km / sin_el).min(slant_range_km);
    let alpha_db_km = kim_scattering_coeff_db_per_km(visibility_km, wavelength_m);
    let scatter = db_to_linear(-alpha_db_km * d_atm);
    let mie = (-extinction_ratio / sin_el).exp();
    Ok(scatter * mie)
}

/// Gamma-Gamma irradiance probability density.
pub fn gamma_gamma_pdf(i: f64, alpha: f64, beta: f64) -> f64 {
    assert!(i > 0.0 && alpha > 0.0 && beta > 0.0);
    let ab = alpha * beta;
    let half_sum = (alpha + beta) / 2.0;
    2.0 * ab.powf(half_sum) / (gamma(alpha) * gamma(beta))
        * i.powf(half_sum - 1.0)
        * bessel_k(alpha - beta, 2.0 * (ab * i).sqrt())
}

/// Gamma-Gamma CDF via the Gamma-mixture representation: the irradiance is
/// the product of two independent unit-mean Gamma variates with shapes
/// alpha and beta.
pub fn gamma_gamma_cdf(i: f64, alpha: f64, beta: f64) -> f64 {
    assert!(alpha > 0.0 && beta > 0.0);
    if i <= 0.0 {
        return 0.0;
    }
    let x_dist = GammaDist::new(alpha, alpha).expect("gamma dist");
    let y_dist = GammaDist::new(beta, beta).expect("gamma dist");
    // Integrate f_X(x) F_Y(i/x) dx in log space so the endpoint behaviour is
    // benign for any shape parameter.
    let u_lo = x_dist.inverse_cdf(1e-10).max(1e-300).ln();
    let u_hi = x_dist.inverse_cdf(1.0 - 1e-12).ln();
    simpson(
        |u: f64| {
            let x = u.exp();
            x * x_dist.pdf(x) * y_dist.cdf(i / x)
        },
        u_lo,
        u_hi,
        4000,
    )
    .clamp(0.0, 1.0)
}

fn scintillation_cache() -> &'static Mutex<HashMap<(u64, u64, u64), f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64, u64), f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Scintillation fade margin: the `percentile` quantile of the unit-mean
/// Gamma-Gamma irradiance, used as a deterministic multiplicative loss.
pub fn scintillation_loss(alpha: f64, beta: f64, percentile: f64) -> Result<f64, ChannelError> {
    if !(percentile > 0.0 && percentile <= 0.5) {
        return Err(ChannelError::Numerical(format!(
            "percentile {percentile} out of (0, 0.5]"
        )));
    }
    let key = (alpha.to_bits(), beta.to_bits(), percentile.to_bits());
    if let Some(v) = scintillation_cache().lock().unwrap().get(&key) {
        return Ok(*v);
    }
    let mut lo = 1e-12f64;
    let mut hi = 10.0f64;
    if gamma_gamma_cdf(hi, alpha, beta) < percentile {
        return Err(ChannelError::Numerical(
            "gamma-gamma quantile bracket failed".into(),
        ));
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if gamma_gamma_cdf(mid, alpha, beta) < percentile {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q = 0.5 * (lo + hi);
    scintillation_cache().lock().unwrap().insert(key, q);
    Ok(q)
}

/// Irradiance-displacement pointing model geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointingGeometry {
    pub v: f64,
    pub a0: f64,
    pub w_zeq: f64,
    pub gamma: f64,
}

impl PointingGeometry {
    pub fn new(w_d: f64, w_z: f64, sigma_p: f64) -> Self {
        assert!(w_d > 0.0 && w_z > 0.0 && sigma_p > 0.0);
        let v = (std::f64::consts::PI).sqrt() * w_d / (2f64.sqrt() * w_z);
        let a0 = erfc(v).powi(2);
        let w_zeq_sq =
            w_z * w_z * (std::f64::consts::PI).sqrt() * erfc(v) / (2.0 * v * (-v * v).exp());
        let w_zeq = w_zeq_sq.sqrt();
        let gamma = w_zeq / (2.0 * sigma_p);
        PointingGeometry { v, a0, w_zeq, gamma }
    }

    /// E[h] = gamma^2 A0 / (gamma^2 + 1).
    pub fn mean_loss(&self) -> f64 {
        let g2 = self.gamma * self.gamma;
        g2 * self.a0 / (g2 + 1.0)
    }

    /// Density of the pointing loss h on (0, A0]. Evaluated in log space so
    /// large gamma (tight jitter) cannot overflow the A0^(-gamma^2) factor.
    pub fn pdf(&self, h: f64) -> f64 {
        let g2 = self.gamma * self.gamma;
        if h <= 0.0 || h > self.a0 {
            return 0.0;
        }
        g2 / self.a0 * ((g2 - 1.0) * (h / self.a0).ln()).exp()
    }

    /// Inverse-CDF draw: h = A0 * u^(1/gamma^2).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen_range(0.0f64..1.0).max(f64::MIN_POSITIVE);
        self.a0 * u.powf(1.0 / (self.gamma * self.gamma))
    }
}

/// Shannon capacity C = B log2(1 + P_R / N0), bits/s.
pub fn capacity(p_r_w: f64, n0_w: f64, bandwidth_hz: f64) -> f64 {
    assert!(n0_w > 0.0 && bandwidth_hz > 0.0);
    bandwidth_hz * (1.0 + p_r_w / n0_w).log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fspl_reference_values() {
        let l = fso_path_loss(1550e-9, 1000.0);
        assert_relative_eq!(l, 1.5215e-26, max_relative = 1e-3);
        assert_abs_diff_eq!(linear_to_db(l), -258.18, epsilon = 0.01);
        let l550 = fso_path_loss(1550e-9, 550.0);
        assert_abs_diff_eq!(linear_to_db(l550), -252.98, epsilon = 0.01);
    }

    #[test]
    fn fspl_inverse_square() {
        let l1 = fso_path_loss(1550e-9, 700.0);
        let l2 = fso_path_loss(1550e-9, 1400.0);
        assert_relative_eq!(l1 / l2, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn kim_coefficient_clear_sky() {
        let a = kim_scattering_coeff_db_per_km(60.0, 1550e-9);
        assert_relative_eq!(a, 0.054, max_relative = 0.02);
    }

    #[test]
    fn kim_limits() {
        assert!(kim_scattering_coeff_db_per_km(1e9, 1550e-9) < 1e-8);
        // At the 550 nm reference wavelength the factor collapses to 3.91/V.
        let a = kim_scattering_coeff_db_per_km(30.0, 550e-9);
        assert_relative_eq!(
            a,
            3.91 / 30.0 * 10.0 / std::f64::consts::LN_10,
            max_relative = 1e-12
        );
    }

    #[test]
    fn atmospheric_attenuation_lossless_limit() {
        let l = atmospheric_attenuation(1e12, 1550e-9, 45.0, 0.0, 20.0, 1000.0).unwrap();
        assert_relative_eq!(l, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn atmospheric_attenuation_zenith_composition() {
        // 10^(-alpha*20/10) * exp(-0.1) with alpha = kim(60 km, 1550 nm).
        let alpha = kim_scattering_coeff_db_per_km(60.0, 1550e-9);
        let expected = db_to_linear(-alpha * 20.0) * (-0.1f64).exp();
        let l = atmospheric_attenuation(60.0, 1550e-9, 90.0, 0.1, 20.0, 550.0).unwrap();
        assert_relative_eq!(l, expected, max_relative = 1e-12);
        assert_abs_diff_eq!(l, 0.706, epsilon = 0.005);
    }

    #[test]
    fn atmospheric_attenuation_monotone_in_elevation() {
        let lo = atmospheric_attenuation(60.0, 1550e-9, 30.0, 0.1, 20.0, 1200.0).unwrap();
        let hi = atmospheric_attenuation(60.0, 1550e-9, 90.0, 0.1, 20.0, 600.0).unwrap();
        assert!(lo < hi);
        assert!(atmospheric_attenuation(60.0, 1550e-9, 0.0, 0.1, 20.0, 600.0).is_err());
    }

    #[test]
    fn gamma_gamma_pdf_normalizes_and_has_unit_mean() {
        // Substituting i = u^2 removes the sqrt singularity at the origin.
        for &(a, b) in &[(4.0, 2.0), (4.0, 4.0), (2.5, 1.7)] {
            let total = simpson(
                |u| 2.0 * u * gamma_gamma_pdf(u * u, a, b),
                1e-9,
                40f64.sqrt(),
                4000,
            );
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-6);
            let mean = simpson(
                |u| 2.0 * u * u * u * gamma_gamma_pdf(u * u, a, b),
                1e-9,
                60f64.sqrt(),
                4000,
            );
            assert_abs_diff_eq!(mean, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn gamma_gamma_cdf_consistent_with_pdf() {
        // Independent routes: Bessel-form pdf integral vs Gamma-mixture cdf.
        for x in [0.2f64, 0.5, 1.0, 2.0] {
            let from_pdf = simpson(
                |u| 2.0 * u * gamma_gamma_pdf(u * u, 4.0, 2.0),
                1e-9,
                x.sqrt(),
                4000,
            );
            let cdf = gamma_gamma_cdf(x, 4.0, 2.0);
            assert_abs_diff_eq!(from_pdf, cdf, epsilon = 1e-5);
        }
    }

    #[test]
    fn equal_shape_pdf_finite_at_unity() {
        let f = gamma_gamma_pdf(1.0, 4.0, 4.0);
        assert!(f.is_finite() && f > 0.0);
        // Cross-check against a high-resolution cdf derivative.
        let h = 1e-4;
        let deriv =
            (gamma_gamma_cdf(1.0 + h, 4.0, 4.0) - gamma_gamma_cdf(1.0 - h, 4.0, 4.0)) / (2.0 * h);
        assert_relative_eq!(f, deriv, max_relative = 1e-3);
    }

    #[test]
    fn scintillation_quantile_against_monte_carlo() {
        let q = scintillation_loss(4.0, 2.0, 0.01).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let gx = rand_distr::Gamma::new(4.0, 0.25).unwrap();
        let gy = rand_distr::Gamma::new(2.0, 0.5).unwrap();
        let n = 1_000_000usize;
        let mut below = 0usize;
        for _ in 0..n {
            let i = rand::Rng::sample(&mut rng, gx) * rand::Rng::sample(&mut rng, gy);
            if i <= q {
                below += 1;
            }
        }
        let frac = below as f64 / n as f64;
        assert_abs_diff_eq!(frac, 0.01, epsilon = 0.0004);
    }

    #[test]
    fn scintillation_monotone_in_percentile_and_weak_limit() {
        let q1 = scintillation_loss(4.0, 2.0, 0.01).unwrap();
        let q5 = scintillation_loss(4.0, 2.0, 0.05).unwrap();
        assert!(q1 < q5);
        // Very weak turbulence: median close to 1.
        let weak = scintillation_loss(300.0, 300.0, 0.5).unwrap();
        assert_abs_diff_eq!(weak, 1.0, epsilon = 0.02);
    }

    #[test]
    fn pointing_mean_matches_quadrature() {
        let g = PointingGeometry::new(0.4, 8.25, 3.0);
        let quad = simpson(|h| h * g.pdf(h), 1e-12, g.a0, 20000);
        assert_abs_diff_eq!(g.mean_loss(), quad, epsilon = 1e-9);
        // Density normalizes.
        let total = simpson(|h| g.pdf(h), 1e-12, g.a0, 20000);
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn pointing_perfect_limit() {
        // sigma -> 0 means gamma -> inf and E[h] -> A0.
        let g = PointingGeometry::new(0.4, 8.25, 1e-9);
        assert_relative_eq!(g.mean_loss(), g.a0, max_relative = 1e-12);
    }

    #[test]
    fn pointing_sample_mean_matches_expectation() {
        let g = PointingGeometry::new(0.4, 8.25, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000usize;
        let sum: f64 = (0..n).map(|_| g.sample(&mut rng)).sum();
        let empirical = sum / n as f64;
        assert_relative_eq!(empirical, g.mean_loss(), max_relative = 0.005);
    }

    #[test]
    fn capacity_reference_points() {
        assert_relative_eq!(capacity(1.0, 1.0, 5e9), 5e9, max_relative = 1e-12);
        assert_eq!(capacity(0.0, 1.0, 5e9), 0.0);
        assert_relative_eq!(capacity(1023.0, 1.0, 10e9), 100e9, max_relative = 1e-12);
    }

    #[test]
    fn lossless_identity_budget() {
        let mut p = LinkBudgetParams::default();
        p.eta_t = 1.0;
        p.eta_r = 1.0;
        p.l_fc_db = 0.0;
        let bd = p.received_power_lisl(2000.0).unwrap();
        let expected = p.p_t_sat_w / 4.0
            * db_to_linear(p.g_sat_dbi)
            * db_to_linear(p.g_sat_dbi)
            * bd.l_fso
            * bd.l_p;
        assert_relative_eq!(bd.p_r_w, expected, max_relative = 1e-12);
    }

    #[test]
    fn downlink_stronger_than_uplink_scaled_by_power() {
        let p = LinkBudgetParams::default();
        let up = p
            .received_power_updown(1000.0, 45.0, LinkDirection::Up)
            .unwrap();
        let down = p
            .received_power_updown(1000.0, 45.0, LinkDirection::Down)
            .unwrap();
        // Same geometry and symmetric gain product: the only differences are
        // transmit power and the uplink scintillation factor.
        let scint = scintillation_loss(4.0, 2.0, 0.01).unwrap();
        assert_relative_eq!(
            up.p_r_w / down.p_r_w,
            p.p_t_ground_w / p.p_t_sat_w * scint,
            max_relative = 1e-9
        );
        assert!(down.p_r_w / p.p_t_sat_w >= up.p_r_w / p.p_t_ground_w);
    }

    #[test]
    fn received_power_decreases_with_range() {
        let p = LinkBudgetParams::default();
        let near = p
            .received_power_updown(600.0, 45.0, LinkDirection::Down)
            .unwrap();
        let far = p
            .received_power_updown(1200.0, 45.0, LinkDirection::Down)
            .unwrap();
        assert!(near.p_r_w > far.p_r_w);
        let lisl_near = p.received_power_lisl(1000.0).unwrap();
        let lisl_far = p.received_power_lisl(2000.0).unwrap();
        assert!(lisl_near.p_r_w > lisl_far.p_r_w);
        // The geometric spreading term alone follows the inverse square law;
        // the pointing loss additionally depends on the beam footprint.
        assert_relative_eq!(lisl_near.l_fso / lisl_far.l_fso, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn lisl_rejects_short_range() {
        let p = LinkBudgetParams::default();
        assert!(matches!(
            p.received_power_lisl(0.5),
            Err(ChannelError::RangeTooShort(_))
        ));
    }

    #[test]
    fn loss_factors_bounded() {
        let p = LinkBudgetParams::default();
        for range in [600.0, 1000.0, 2500.0] {
            for el in [10.0, 45.0, 90.0] {
                let bd = p
                    .received_power_updown(range, el, LinkDirection::Up)
                    .unwrap();
                for l in [bd.l_atm, bd.l_p, bd.l_fc] {
                    assert!(l > 0.0 && l <= 1.0, "loss factor {l} out of (0,1]");
                }
                let cap = p.p_t_ground_w / 4.0
                    * db_to_linear(p.g_gs_dbi)
                    * db_to_linear(p.g_sat_dbi)
                    * p.eta_t
                    * p.eta_r;
                assert!(bd.p_r_w <= cap);
            }
        }
    }

    #[test]
    fn db_roundtrip() {
        for v in [1e-26, 1e-3, 0.5, 1.0] {
            assert_relative_eq!(db_to_linear(linear_to_db(v)), v, max_relative = 1e-12);
        }
    }

    #[test]
    fn derived_noise_power_hits_reference_snr() {
        let p = LinkBudgetParams::default();
        let n0 = p.noise_power_w();
        let bd = p
            .received_power_updown(1000.0, 90.0, LinkDirection::Down)
            .unwrap();
        assert_relative_eq!(bd.p_r_w / n0, db_to_linear(p.snr_ref_db), max_relative = 1e-9);
    }
}
