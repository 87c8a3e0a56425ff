//! The single-operating-point analysis report.

use serde::Serialize;

/// Everything the analyze command knows about one design at one voltage.
/// Field order here is the line order of the text rendering.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub voltage_v: f64,
    pub stage_count: u32,
    pub adjusted_onset_v: f64,
    pub drift_field_v_per_m: f64,
    pub stage_current_a: f64,
    pub stage_thrust_n: f64,
    pub space_charge_limited: bool,
    pub space_charge_limit_n: f64,
    pub total_thrust_n: f64,
    pub total_power_w: f64,
    pub efficiency_n_per_w: f64,
    pub efficiency_bound_n_per_w: f64,
    pub thrust_density_n_per_m2: f64,
    pub outlet_velocity_m_per_s: f64,
    pub reynolds: f64,
    pub duct_area_m2: f64,
    pub duct_length_m: f64,
    pub soft_violations: Vec<String>,
}

impl AnalysisReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("voltage (V): {}\n", self.voltage_v));
        s.push_str(&format!("stages: {}\n", self.stage_count));
        s.push_str(&format!("adjusted onset (V): {}\n", self.adjusted_onset_v));
        s.push_str(&format!(
            "drift field (V/m): {}\n",
            self.drift_field_v_per_m
        ));
        s.push_str(&format!("stage current (A): {}\n", self.stage_current_a));
        s.push_str(&format!("stage thrust (N): {}\n", self.stage_thrust_n));
        s.push_str(&format!(
            "space-charge limited: {}\n",
            self.space_charge_limited
        ));
        s.push_str(&format!(
            "space-charge limit (N): {}\n",
            self.space_charge_limit_n
        ));
        s.push_str(&format!("total thrust (N): {}\n", self.total_thrust_n));
        s.push_str(&format!("total power (W): {}\n", self.total_power_w));
        s.push_str(&format!(
            "efficiency (N/W): {}\n",
            self.efficiency_n_per_w
        ));
        s.push_str(&format!(
            "efficiency bound (N/W): {}\n",
            self.efficiency_bound_n_per_w
        ));
        s.push_str(&format!(
            "thrust density (N/m^2): {}\n",
            self.thrust_density_n_per_m2
        ));
        s.push_str(&format!(
            "outlet velocity (m/s): {}\n",
            self.outlet_velocity_m_per_s
        ));
        s.push_str(&format!("Reynolds number: {}\n", self.reynolds));
        s.push_str(&format!("duct area (m^2): {}\n", self.duct_area_m2));
        s.push_str(&format!("duct length (m): {}\n", self.duct_length_m));
        if self.soft_violations.is_empty() {
            s.push_str("soft violations: none\n");
        } else {
            s.push_str("soft violations:\n");
            for v in &self.soft_violations {
                s.push_str(&format!("  {v}\n"));
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}
