//! Onboard optical switching fabrics: reconfiguration time, power draw, and
//! insertion loss per technology.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SwitchError {
    #[error("unknown switch fabric '{0}'; builtin fabrics: {1}")]
    UnknownFabric(String, String),
    #[error("invalid fabric definition: {0}")]
    InvalidFabric(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchFabric {
    pub name: String,
    pub switch_time_s: f64,
    pub power_w: f64,
    pub insertion_loss_db: f64,
    pub trl: u32,
}

impl SwitchFabric {
    pub fn new(
        name: &str,
        switch_time_s: f64,
        power_w: f64,
        insertion_loss_db: f64,
        trl: u32,
    ) -> Result<Self, SwitchError> {
        if !(switch_time_s > 0.0) {
            return Err(SwitchError::InvalidFabric(format!(
                "switch_time_s {switch_time_s} must be positive"
            )));
        }
        if !(power_w > 0.0) {
            return Err(SwitchError::InvalidFabric(format!(
                "power_w {power_w} must be positive"
            )));
        }
        if insertion_loss_db < 0.0 {
            return Err(SwitchError::InvalidFabric(format!(
                "insertion_loss_db {insertion_loss_db} must be >= 0"
            )));
        }
        Ok(SwitchFabric {
            name: name.to_string(),
            switch_time_s,
            power_w,
            insertion_loss_db,
            trl,
        })
    }

    /// Switch reconfiguration time as integer nanoseconds.
    pub fn switch_time_ns(&self) -> u64 {
        (self.switch_time_s * 1e9).round() as u64
    }
}

/// The four studied fabrics.
pub fn builtin_fabrics() -> Vec<SwitchFabric> {
    vec![
        SwitchFabric::new("POLATIS", 25e-3, 5.0, 1.0, 9).unwrap(),
        SwitchFabric::new("GLSUN", 8e-3, 1.25, 2.6, 9).unwrap(),
        SwitchFabric::new("AGILTRON", 0.1e-6, 10.0, 3.5, 9).unwrap(),
        SwitchFabric::new("InP-SOA", 5.2e-9, 0.58, 0.0, 4).unwrap(),
    ]
}

/// Case-insensitive lookup among the builtin fabrics.
pub fn lookup(name: &str) -> Result<SwitchFabric, SwitchError> {
    let fabrics = builtin_fabrics();
    fabrics
        .iter()
        .find(|f| f.name.eq_ignore_ascii_case(name))
        .cloned()
        .ok_or_else(|| {
            SwitchError::UnknownFabric(
                name.to_string(),
                fabrics
                    .iter()
                    .map(|f| f.name.as_str())
                    .collect::<Vec<_>>()
                    .join(", "),
            )
        })
}

/// Total switching delay over a path crossing `n_satellites` switches.
pub fn path_switching_delay_s(fabric: &SwitchFabric, n_satellites: u32) -> f64 {
    f64::from(n_satellites) * fabric.switch_time_s
}

/// Total insertion loss over a path crossing `n_satellites` switches, dB.
pub fn path_insertion_loss_db(fabric: &SwitchFabric, n_satellites: u32) -> f64 {
    f64::from(n_satellites) * fabric.insertion_loss_db
}
