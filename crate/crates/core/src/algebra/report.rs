use std::fmt;

use super::exact::ExactComplex;
use super::matrix::Matrix4;

/// What is left over when a condition is evaluated: the difference between
/// the computed and the required value.
#[derive(Clone, Debug, PartialEq)]
pub enum Residual {
    Exact(Matrix4),
    Scalar(ExactComplex),
    Float(f64),
}

impl Residual {
    fn is_zero(&self) -> bool {
        match self {
            Residual::Exact(m) => m.is_zero(),
            Residual::Scalar(s) => s.is_zero(),
            Residual::Float(x) => *x == 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Condition {
    pub name: String,
    pub passed: bool,
    /// Informational rows are printed but never fail a report.
    pub gated: bool,
    pub residual: Residual,
}

/// A named list of checks. Failing algebra is data, not an error.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConditionReport {
    pub title: String,
    pub conditions: Vec<Condition>,
}

impl ConditionReport {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            conditions: Vec::new(),
        }
    }

    /// Records an exact matrix condition; passes iff `residual` is zero.
    pub fn push_exact(&mut self, name: impl Into<String>, residual: Matrix4) {
        let residual = Residual::Exact(residual);
        self.conditions.push(Condition {
            name: name.into(),
            passed: residual.is_zero(),
            gated: true,
            residual,
        });
    }

    /// Records a float condition with an explicit bound.
    pub fn push_float(&mut self, name: impl Into<String>, residual: f64, bound: f64) {
        self.conditions.push(Condition {
            name: name.into(),
            passed: residual.is_finite() && residual < bound,
            gated: true,
            residual: Residual::Float(residual),
        });
    }

    pub fn push_info(&mut self, name: impl Into<String>, passed: bool, residual: Residual) {
        self.conditions.push(Condition {
            name: name.into(),
            passed,
            gated: false,
            residual,
        });
    }

    pub fn gated(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| c.gated)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Condition> {
        self.gated().filter(|c| !c.passed)
    }

    pub fn passed_count(&self) -> usize {
        self.gated().filter(|c| c.passed).count()
    }

    pub fn gated_count(&self) -> usize {
        self.gated().count()
    }

    pub fn all_passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn find(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}  ({}/{} pass)",
            self.title,
            self.passed_count(),
            self.gated_count()
        )?;
        let width = self.conditions.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.conditions {
            let status = match (c.gated, c.passed) {
                (true, true) => "pass",
                (true, false) => "FAIL",
                (false, true) => "info",
                (false, false) => "info!",
            };
            write!(f, "  {:<width$}  {status}", c.name)?;
            match &c.residual {
                Residual::Float(x) => write!(f, "  residual {x:.3e}")?,
                Residual::Scalar(s) => write!(f, "  value {s}")?,
                Residual::Exact(m) if c.gated && !c.passed => {
                    writeln!(f, "  residual:")?;
                    for line in m.to_string().lines() {
                        writeln!(f, "      {line}")?;
                    }
                    continue;
                }
                Residual::Exact(_) => {}
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
