//! Machine-readable verification reports.

use serde::Serialize;

pub const SCHEMA: u32 = 1;

/// Base tolerances by the highest derivative order an identity involves.
pub const SECOND_ORDER_TOL: f64 = 1e-8;
pub const THIRD_ORDER_TOL: f64 = 1e-7;
pub const FOURTH_ORDER_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ToleranceLadder {
    pub second_order: f64,
    pub third_order: f64,
    pub fourth_order: f64,
    pub scale: f64,
}

impl ToleranceLadder {
    pub fn scaled(scale: f64) -> Self {
        Self {
            second_order: SECOND_ORDER_TOL * scale,
            third_order: THIRD_ORDER_TOL * scale,
            fourth_order: FOURTH_ORDER_TOL * scale,
            scale,
        }
    }

    pub fn for_order(&self, order: u8) -> f64 {
        match order {
            0..=2 => self.second_order,
            3 => self.third_order,
            _ => self.fourth_order,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precondition {
    Met,
    /// No sampled point satisfied the check's hypotheses.
    NotApplicable,
    /// A hypothesis the instance should satisfy failed.
    Unmet,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub description: String,
    pub derivative_order: u8,
    pub max_residual: Option<f64>,
    pub mean_residual: Option<f64>,
    pub tolerance: f64,
    pub evaluated: usize,
    pub skipped: usize,
    pub precondition: Precondition,
    pub note: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Parameters {
    pub n: usize,
    pub rho: f64,
    pub lambda: f64,
    pub seed: u64,
    pub points: usize,
    pub perturb: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub instance: String,
    pub parameters: Parameters,
    pub tolerances: ToleranceLadder,
    pub checks: Vec<CheckRecord>,
    pub overall: Verdict,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.overall == Verdict::Pass
    }

    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.id.as_str()).collect()
    }

    /// One line per check.
    pub fn render(&self) -> String {
        let mut out = format!(
            "{} (n = {}, rho = {}, lambda = {}, {} points, seed {})\n",
            self.instance,
            self.parameters.n,
            self.parameters.rho,
            self.parameters.lambda,
            self.parameters.points,
            self.parameters.seed
        );
        for c in &self.checks {
            let status = if c.pass { "pass" } else { "FAIL" };
            let max = c.max_residual.map_or_else(|| "-".to_string(), |v| format!("{v:.3e}"));
            let pre = match c.precondition {
                Precondition::Met => String::new(),
                Precondition::NotApplicable => "  (not applicable)".to_string(),
                Precondition::Unmet => "  (precondition unmet)".to_string(),
            };
            out.push_str(&format!(
                "  {status:4}  {:28} max {max:>10}  tol {:.1e}  [{}/{}]{pre}\n",
                c.id,
                c.tolerance,
                c.evaluated,
                c.evaluated + c.skipped
            ));
        }
        out.push_str(&format!("overall: {}\n", if self.passed() { "pass" } else { "FAIL" }));
        out
    }
}
