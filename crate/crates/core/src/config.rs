//! Central tolerance record. Every field can be overridden from the command
//! line with `--tol.<name>=<value>`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Margin from the unit circle for interior points built from doubles.
    pub disk_margin: f64,
    pub singular_denominator: f64,
    pub max_degree: usize,
    /// Relative threshold for trimming leading polynomial coefficients.
    pub coeff_trim: f64,
    pub root_max_sweeps: usize,
    pub root_residual: f64,
    pub fiber_boundary_margin: f64,
    pub fiber_residual: f64,
    pub multiplicity_threshold: f64,
    pub exceptional_dedup: f64,
    pub conditioning_warning: f64,
    /// Second-best match must be farther than this multiple of the best.
    pub match_guard: f64,
    pub track_residual: f64,
    pub newton_max: usize,
    pub sep_fraction: f64,
    pub min_step: f64,
    pub near_critical: f64,
    pub path_clearance: f64,
    pub loop_radius_max: f64,
    pub collision_eps: f64,
    pub collision_retries: usize,
    pub collision_ratio: f64,
    pub cluster_gap: f64,
    pub conditions_tol: f64,
    pub group_enum_bound: usize,
    pub basepoint_step: f64,
    pub stage_gate_margin: f64,
    pub scan_budget: usize,
    pub max_truncation: usize,
    pub rotation_tol: f64,
    pub bergman_clearance: f64,
    pub forfeit_bound: f64,
    /// Zeros closer than this to the circle switch the kernels to quad-double.
    pub extended_threshold: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            disk_margin: 1e-12,
            singular_denominator: 1e-14,
            max_degree: 64,
            coeff_trim: 1e-14,
            root_max_sweeps: 500,
            root_residual: 1e-11,
            fiber_boundary_margin: 1e-12,
            fiber_residual: 1e-10,
            multiplicity_threshold: 1e-8,
            exceptional_dedup: 1e-9,
            conditioning_warning: 1e-4,
            match_guard: 3.0,
            track_residual: 1e-9,
            newton_max: 8,
            sep_fraction: 0.4,
            min_step: 1e-12,
            near_critical: 1e-10,
            path_clearance: 1e-3,
            loop_radius_max: 0.1,
            collision_eps: 1e-4,
            collision_retries: 5,
            collision_ratio: 0.8,
            cluster_gap: 3.0,
            conditions_tol: 1e-6,
            group_enum_bound: 3_628_800,
            basepoint_step: 0.05,
            stage_gate_margin: 1e-8,
            scan_budget: 10_000,
            max_truncation: 24,
            rotation_tol: 1e-8,
            bergman_clearance: 5e-3,
            forfeit_bound: 1e-4,
            extended_threshold: 1e-4,
        }
    }
}

impl Tolerances {
    /// Override one field by name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let mut map = match serde_json::to_value(&*self)? {
            Value::Object(m) => m,
            _ => unreachable!(),
        };
        let slot = map
            .get_mut(name)
            .ok_or_else(|| Error::Parameter(format!("unknown tolerance '{name}'")))?;
        *slot = if slot.is_u64() {
            if value < 0.0 || value.fract() != 0.0 {
                return Err(Error::Parameter(format!(
                    "tolerance '{name}' needs a non-negative integer"
                )));
            }
            Value::from(value as u64)
        } else {
            Value::from(value)
        };
        *self = serde_json::from_value(Value::Object(map))?;
        Ok(())
    }

    pub fn names() -> Vec<String> {
        match serde_json::to_value(Tolerances::default()) {
            Ok(Value::Object(m)) => m.keys().cloned().collect(),
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_by_name() {
        let mut t = Tolerances::default();
        t.set("conditions_tol", 1e-3).unwrap();
        t.set("newton_max", 5.0).unwrap();
        assert_eq!(t.conditions_tol, 1e-3);
        assert_eq!(t.newton_max, 5);
        assert!(t.set("nope", 1.0).is_err());
        assert!(t.set("newton_max", 1.5).is_err());
        assert!(Tolerances::names().contains(&"collision_eps".to_string()));
    }
}
