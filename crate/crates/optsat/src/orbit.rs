//! Walker-Delta constellation generation and ideal circular-orbit propagation.
//!
//! Constellations are described by the classic Walker notation (total
//! satellites, plane count, inclination, phasing factor). Propagation is
//! two-body circular motion over a spherical Earth; ground stations rotate
//! with the Earth.

use thiserror::Error;

/// Mean Earth radius, km (spherical model).
pub const EARTH_RADIUS_KM: f64 = 6371.0;
/// Standard gravitational parameter of the Earth, km^3/s^2.
pub const MU_EARTH: f64 = 398_600.4418;
/// Earth rotation rate, rad/s.
pub const EARTH_ROTATION_RAD_S: f64 = 7.292_115_9e-5;
/// Speed of light in vacuum, km/s.
pub const SPEED_OF_LIGHT_KM_S: f64 = 299_792.458;

#[derive(Debug, Error, PartialEq)]
pub enum OrbitError {
    #[error("total_sats {total} is not divisible by planes {planes}")]
    NonIntegralPlaneSize { total: u32, planes: u32 },
    #[error("invalid Walker-Delta parameter: {0}")]
    InvalidParameter(String),
}

/// Walker-Delta constellation description.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerDeltaSpec {
    pub name: String,
    pub total_sats: u32,
    pub planes: u32,
    pub inclination_deg: f64,
    pub altitude_km: f64,
    /// Relative spacing F of the Walker notation.
    pub phasing_factor: u32,
}

impl WalkerDeltaSpec {
    pub fn validate(&self) -> Result<(), OrbitError> {
        if self.planes == 0 || self.total_sats == 0 {
            return Err(OrbitError::InvalidParameter(
                "planes and total_sats must be positive".into(),
            ));
        }
        if self.total_sats % self.planes != 0 {
            return Err(OrbitError::NonIntegralPlaneSize {
                total: self.total_sats,
                planes: self.planes,
            });
        }
        if !(self.inclination_deg > 0.0 && self.inclination_deg < 180.0) {
            return Err(OrbitError::InvalidParameter(format!(
                "inclination {} out of (0, 180)",
                self.inclination_deg
            )));
        }
        if self.altitude_km <= 0.0 {
            return Err(OrbitError::InvalidParameter(format!(
                "altitude {} must be positive",
                self.altitude_km
            )));
        }
        if self.phasing_factor >= self.planes {
            return Err(OrbitError::InvalidParameter(format!(
                "phasing factor {} must be < planes {}",
                self.phasing_factor, self.planes
            )));
        }
        Ok(())
    }

    pub fn sats_per_plane(&self) -> u32 {
        self.total_sats / self.planes
    }

    /// Orbital radius (Earth radius + altitude), km.
    pub fn orbit_radius_km(&self) -> f64 {
        EARTH_RADIUS_KM + self.altitude_km
    }
}

/// Constellation presets from the three studied systems.
pub fn preset(name: &str) -> Option<WalkerDeltaSpec> {
    let (label, total, planes, inc, alt) = match name {
        "starlink-p1" => ("starlink-p1", 1584, 72, 53.0, 550.0),
        "telesat" => ("telesat", 220, 20, 50.88, 1325.0),
        "amazon-leo-1" => ("amazon-leo-1", 784, 28, 33.0, 590.0),
        _ => return None,
    };
    Some(WalkerDeltaSpec {
        name: label.to_string(),
        total_sats: total,
        planes,
        inclination_deg: inc,
        altitude_km: alt,
        phasing_factor: 0,
    })
}

pub const PRESET_NAMES: &[&str] = &["telesat", "amazon-leo-1", "starlink-p1"];

/// Default feeder-link elevation mask per constellation. Denser, lower
/// shells serve ground stations from higher passes; the 33 deg Amazon shell
/// barely covers Milan at 45.5N, which caps its mask near 13 deg.
pub fn preset_elevation_mask_deg(name: &str) -> f64 {
    match name {
        "starlink-p1" => 22.0,
        "amazon-leo-1" => 13.5,
        _ => 10.0,
    }
}

/// Orbital elements of one satellite in a circular Walker-Delta shell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitalElements {
    pub plane_idx: u32,
    pub slot_idx: u32,
    pub raan_deg: f64,
    /// In-plane phase (argument of latitude) at epoch, degrees.
    pub anomaly_deg: f64,
    pub inclination_deg: f64,
    pub altitude_km: f64,
}

/// Propagated state of one satellite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatelliteState {
    pub sat_id: u32,
    pub plane_idx: u32,
    pub slot_idx: u32,
    /// Position in the Earth-centered inertial frame, km.
    pub position: [f64; 3],
    /// Seconds since simulation start.
    pub epoch_s: f64,
}

/// Optical ground station.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStation {
    pub name: String,
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    pub altitude_km: f64,
}

impl GroundStation {
    pub fn new(name: &str, latitude_deg: f64, longitude_deg: f64) -> Self {
        GroundStation {
            name: name.to_string(),
            latitude_deg,
            longitude_deg,
            altitude_km: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), OrbitError> {
        if !(-90.0..=90.0).contains(&self.latitude_deg) {
            return Err(OrbitError::InvalidParameter(format!(
                "latitude {} out of [-90, 90]",
                self.latitude_deg
            )));
        }
        if !(-180.0..=180.0).contains(&self.longitude_deg) {
            return Err(OrbitError::InvalidParameter(format!(
                "longitude {} out of [-180, 180]",
                self.longitude_deg
            )));
        }
        Ok(())
    }

    /// ECI position at time `t_s`, accounting for Earth rotation.
    pub fn position_eci(&self, t_s: f64) -> [f64; 3] {
        let r = EARTH_RADIUS_KM + self.altitude_km;
        let lat = self.latitude_deg.to_radians();
        let lon = self.longitude_deg.to_radians() + EARTH_ROTATION_RAD_S * t_s;
        [
            r * lat.cos() * lon.cos(),
            r * lat.cos() * lon.sin(),
            r * lat.sin(),
        ]
    }
}

/// The four European OGSs of the study.
pub fn default_ground_stations() -> Vec<GroundStation> {
    vec![
        GroundStation::new("Maspalomas", 27.76, -15.59),
        GroundStation::new("Athens", 37.98, 23.72),
        GroundStation::new("Milan", 45.4642, 9.19),
        GroundStation::new("Bilbao", 43.263, -2.935),
    ]
}

/// Generate the per-satellite orbital elements of a Walker-Delta shell.
///
/// Plane p sits at RAAN p * 360/planes; slot s in plane p starts at phase
/// s * 360/sats_per_plane + p * F * 360/total_sats.
pub fn generate_walker_delta(spec: &WalkerDeltaSpec) -> Result<Vec<OrbitalElements>, OrbitError> {
    spec.validate()?;
    let spp = spec.sats_per_plane();
    let mut elements = Vec::with_capacity(spec.total_sats as usize);
    for p in 0..spec.planes {
        let raan = f64::from(p) * 360.0 / f64::from(spec.planes);
        for s in 0..spp {
            let anomaly = f64::from(s) * 360.0 / f64::from(spp)
                + f64::from(p) * f64::from(spec.phasing_factor) * 360.0
                    / f64::from(spec.total_sats);
            elements.push(OrbitalElements {
                plane_idx: p,
                slot_idx: s,
                raan_deg: raan,
                anomaly_deg: anomaly,
                inclination_deg: spec.inclination_deg,
                altitude_km: spec.altitude_km,
            });
        }
    }
    Ok(elements)
}

/// Orbital period of a circular orbit at the given altitude, seconds.
pub fn orbital_period_s(altitude_km: f64) -> f64 {
    let a = EARTH_RADIUS_KM + altitude_km;
    2.0 * std::f64::consts::PI * (a.powi(3) / MU_EARTH).sqrt()
}

/// Propagate one satellite to time `t_s` under circular two-body motion.
pub fn propagate(elem: &OrbitalElements, sat_id: u32, t_s: f64) -> SatelliteState {
    let a = EARTH_RADIUS_KM + elem.altitude_km;
    let omega = (MU_EARTH / a.powi(3)).sqrt(); // rad/s
    let u = elem.anomaly_deg.to_radians() + omega * t_s;
    let raan = elem.raan_deg.to_radians();
    let inc = elem.inclination_deg.to_radians();
    let (sin_u, cos_u) = u.sin_cos();
    let (sin_o, cos_o) = raan.sin_cos();
    let (sin_i, cos_i) = inc.sin_cos();
    SatelliteState {
        sat_id,
        plane_idx: elem.plane_idx,
        slot_idx: elem.slot_idx,
        position: [
            a * (cos_o * cos_u - sin_o * sin_u * cos_i),
            a * (sin_o * cos_u + cos_o * sin_u * cos_i),
            a * sin_u * sin_i,
        ],
        epoch_s: t_s,
    }
}

/// Propagate a whole constellation; sat_id = plane_idx * sats_per_plane + slot_idx.
pub fn propagate_all(elements: &[OrbitalElements], t_s: f64) -> Vec<SatelliteState> {
    elements
        .iter()
        .enumerate()
        .map(|(i, e)| propagate(e, i as u32, t_s))
        .collect()
}

/// Slant range (km) and elevation (deg) from a ground station to a satellite.
///
/// Elevation is the angle of the station-to-satellite vector above the local
/// horizon plane; negative below the horizon.
pub fn slant_range_and_elevation(
    gs: &GroundStation,
    sat: &SatelliteState,
    t_s: f64,
) -> (f64, f64) {
    let gp = gs.position_eci(t_s);
    let d = [
        sat.position[0] - gp[0],
        sat.position[1] - gp[1],
        sat.position[2] - gp[2],
    ];
    let range = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    let g_norm = (gp[0] * gp[0] + gp[1] * gp[1] + gp[2] * gp[2]).sqrt();
    let dot = (gp[0] * d[0] + gp[1] * d[1] + gp[2] * d[2]) / (g_norm * range);
    let elevation = dot.clamp(-1.0, 1.0).asin().to_degrees();
    (range, elevation)
}
