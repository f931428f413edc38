//! Dimensionless checks of the parameter hierarchies each scheme relies on.
//!
//! `MuchLess`: `ratio = small / large`, passes when `ratio ≤ 1 / factor`.
//! `Similar`: passes when `1/factor ≤ ratio ≤ factor`.
//! `Equal`: `ratio = |a − b| / max(a, b)`, passes when `ratio ≤ tol`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{FourLevelParams, TwoLevelParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeThresholds {
    pub much_less: f64,
    pub similar: f64,
    pub equal_rel_tol: f64,
    /// Per-check factor replacing `much_less` or `similar`.
    pub overrides: BTreeMap<String, f64>,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        // The reference four-level configuration has g/|Ω1| = 1/2.
        let overrides = BTreeMap::from([("cavity_vs_pump".to_string(), 2.0)]);
        Self {
            much_less: 10.0,
            similar: 3.0,
            equal_rel_tol: 1e-2,
            overrides,
        }
    }
}

impl RegimeThresholds {
    fn factor(&self, name: &str, relation: Relation) -> f64 {
        if let Some(f) = self.overrides.get(name) {
            return *f;
        }
        match relation {
            Relation::MuchLess => self.much_less,
            Relation::Similar => self.similar,
            Relation::Equal => self.equal_rel_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    MuchLess,
    Similar,
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Warn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeCheck {
    pub name: String,
    pub description: String,
    pub relation: Relation,
    pub ratio: f64,
    pub threshold: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RegimeReport {
    pub checks: Vec<RegimeCheck>,
}

impl RegimeReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.verdict == Verdict::Pass)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &RegimeCheck> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Warn)
    }

    pub fn get(&self, name: &str) -> Option<&RegimeCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for RegimeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let v = match c.verdict {
                Verdict::Pass => "pass",
                Verdict::Warn => "WARN",
            };
            writeln!(
                f,
                "{v:4}  {:<28} {:>12.4e}  (limit {:.4e})  {}",
                c.name, c.ratio, c.threshold, c.description
            )?;
        }
        Ok(())
    }
}

/// Either parameter set.
#[derive(Debug, Clone, Copy)]
pub enum RegimeParams<'a> {
    TwoLevel(&'a TwoLevelParams),
    FourLevel(&'a FourLevelParams),
}

impl<'a> From<&'a TwoLevelParams> for RegimeParams<'a> {
    fn from(p: &'a TwoLevelParams) -> Self {
        RegimeParams::TwoLevel(p)
    }
}

impl<'a> From<&'a FourLevelParams> for RegimeParams<'a> {
    fn from(p: &'a FourLevelParams) -> Self {
        RegimeParams::FourLevel(p)
    }
}

struct Builder<'t> {
    thresholds: &'t RegimeThresholds,
    checks: Vec<RegimeCheck>,
}

fn safe_ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

impl Builder<'_> {
    fn push(&mut self, name: &str, description: &str, relation: Relation, a: f64, b: f64) {
        let a = a.abs();
        let b = b.abs();
        let factor = self.thresholds.factor(name, relation);
        let (ratio, threshold, pass) = match relation {
            Relation::MuchLess => {
                let r = safe_ratio(a, b);
                (r, 1.0 / factor, r <= 1.0 / factor)
            }
            Relation::Similar => {
                let r = if a == 0.0 && b == 0.0 {
                    1.0
                } else {
                    safe_ratio(a, b)
                };
                (r, factor, r >= 1.0 / factor && r <= factor)
            }
            Relation::Equal => {
                let r = safe_ratio((a - b).abs(), a.max(b));
                (r, factor, r <= factor)
            }
        };
        self.checks.push(RegimeCheck {
            name: name.to_string(),
            description: description.to_string(),
            relation,
            ratio,
            threshold,
            verdict: if pass { Verdict::Pass } else { Verdict::Warn },
        });
    }
}

pub fn validate_regime<'a>(
    params: impl Into<RegimeParams<'a>>,
    thresholds: &RegimeThresholds,
) -> RegimeReport {
    let mut b = Builder {
        thresholds,
        checks: Vec::new(),
    };
    match params.into() {
        RegimeParams::TwoLevel(p) => {
            for (i, w) in [p.omega1, p.omega2].iter().enumerate() {
                let n = i + 1;
                b.push(
                    &format!("decay_vs_drive_{n}"),
                    &format!("Γ ≪ |Ω{n}|"),
                    Relation::MuchLess,
                    p.gamma,
                    w.norm(),
                );
                b.push(
                    &format!("drive_{n}_vs_coupling"),
                    &format!("|Ω{n}| ≪ g"),
                    Relation::MuchLess,
                    w.norm(),
                    p.g,
                );
            }
            b.push(
                "cavity_vs_coupling",
                "κ ∼ g",
                Relation::Similar,
                p.kappa,
                p.g,
            );
        }
        RegimeParams::FourLevel(p) => {
            let det = p.delta2.abs().min(p.delta3.abs());
            b.push(
                "pump0_vs_detuning",
                "|Ω0| ≪ Δ",
                Relation::MuchLess,
                p.omega0.norm(),
                det,
            );
            b.push(
                "pump1_vs_detuning",
                "|Ω1| ≪ Δ",
                Relation::MuchLess,
                p.omega1.norm(),
                det,
            );
            for (i, w) in p.omega_i.iter().enumerate() {
                b.push(
                    &format!("drive_{}_vs_detuning", i + 1),
                    "|Ω⁽ⁱ⁾| ≪ Δ",
                    Relation::MuchLess,
                    w.norm(),
                    det,
                );
            }
            b.push(
                "coupling_vs_detuning",
                "g ≪ Δ",
                Relation::MuchLess,
                p.g,
                det,
            );
            b.push(
                "decay2_vs_detuning",
                "Γ2 ≪ Δ",
                Relation::MuchLess,
                p.gamma2,
                det,
            );
            b.push(
                "decay3_vs_detuning",
                "Γ3 ≪ Δ",
                Relation::MuchLess,
                p.gamma3,
                det,
            );
            b.push(
                "detunings_similar",
                "Δ2 ∼ Δ3",
                Relation::Similar,
                p.delta2,
                p.delta3,
            );
            b.push(
                "pumps_equal",
                "|Ω0| = |Ω1|",
                Relation::Equal,
                p.omega0.norm(),
                p.omega1.norm(),
            );
            b.push(
                "detunings_equal",
                "Δ2 = Δ3",
                Relation::Equal,
                p.delta2,
                p.delta3,
            );
            b.push(
                "cavity_vs_pump",
                "g ≪ |Ω1|",
                Relation::MuchLess,
                p.g,
                p.omega1.norm(),
            );
            for (i, w) in p.omega_i.iter().enumerate() {
                let n = i + 1;
                b.push(
                    &format!("drive_{n}_vs_pump"),
                    "|Ω⁽ⁱ⁾| ≪ |Ω0|",
                    Relation::MuchLess,
                    w.norm(),
                    p.omega0.norm(),
                );
                b.push(
                    &format!("drive_{n}_vs_coupling"),
                    "|Ω⁽ⁱ⁾| ≪ g",
                    Relation::MuchLess,
                    w.norm(),
                    p.g,
                );
            }
            let g_eff = p.g * p.omega1.norm() / p.delta2.abs();
            b.push(
                "cavity_vs_effective_coupling",
                "κ ∼ g|Ω1|/Δ2",
                Relation::Similar,
                p.kappa,
                g_eff,
            );
        }
    }
    RegimeReport { checks: b.checks }
}
