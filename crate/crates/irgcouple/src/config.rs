//! Experiment configuration (TOML).

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use irgcouple_core::{Kernel, RateFunction, ScalingSequence, SolveBudget};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::canonical::to_canonical_string;
use crate::error::{Error, Result};
use crate::io::read_grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    CouplingValidation,
    ChromaticWindow,
    QuasiCliqueWindow,
    Concentration,
    AssumptionSuite,
    Counterexample,
}

impl ExperimentKind {
    pub fn tag(self) -> &'static str {
        match self {
            ExperimentKind::CouplingValidation => "coupling_validation",
            ExperimentKind::ChromaticWindow => "chromatic_window",
            ExperimentKind::QuasiCliqueWindow => "quasi_clique_window",
            ExperimentKind::Concentration => "concentration",
            ExperimentKind::AssumptionSuite => "assumption_suite",
            ExperimentKind::Counterexample => "counterexample",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Constant {
        p: f64,
    },
    /// `g(x) g(y)` with `g(x) = scale · x^exponent`, maximized at `m = 1`.
    Rank1 {
        scale: f64,
        exponent: f64,
    },
    /// Block kernel from an inline matrix or a grid file. Breakpoints
    /// default to equal-width blocks.
    Block {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid_path: Option<PathBuf>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        breakpoints: Option<Vec<f64>>,
    },
    Bump {
        m: f64,
        peak: f64,
        width: f64,
    },
    /// Bilinear interpolation of a square grid of values sampled at
    /// `i / (k − 1)`; the caller declares the diagonal argmax `m`.
    Custom {
        grid_path: PathBuf,
        m: f64,
    },
}

impl KernelSpec {
    pub fn build(&self) -> Result<Kernel> {
        Ok(match self {
            KernelSpec::Constant { p } => Kernel::constant(*p)?,
            KernelSpec::Rank1 { scale, exponent } => {
                let (s, e) = (*scale, *exponent);
                Kernel::rank1(
                    Arc::new(move |x: f64| s * x.powf(e)),
                    1.0,
                    &format!("rank1(g(x)={s}*x^{e})"),
                )?
            }
            KernelSpec::Block {
                grid,
                grid_path,
                breakpoints,
            } => {
                let grid = match (grid, grid_path) {
                    (Some(g), None) => g.clone(),
                    (None, Some(p)) => read_grid(p)?,
                    _ => {
                        return Err(Error::Config(
                            "block kernel needs exactly one of `grid` or `grid_path`".into(),
                        ))
                    }
                };
                match breakpoints {
                    Some(b) => Kernel::block(&grid, b)?,
                    None => Kernel::block_uniform(&grid)?,
                }
            }
            KernelSpec::Bump { m, peak, width } => Kernel::bump(*m, *peak, *width)?,
            KernelSpec::Custom { grid_path, m } => {
                let grid = read_grid(grid_path)?;
                if grid.len() < 2 {
                    return Err(Error::Config(
                        "custom grid needs at least 2x2 values".into(),
                    ));
                }
                let label = format!("custom(grid={})", grid_path.display());
                Kernel::custom(Arc::new(move |x, y| bilinear(&grid, x, y)), *m, &label)?
            }
        })
    }
}

fn bilinear(grid: &[Vec<f64>], x: f64, y: f64) -> f64 {
    let k = grid.len() - 1;
    let locate = |t: f64| {
        let s = t.clamp(0.0, 1.0) * k as f64;
        let i = (s.floor() as usize).min(k - 1);
        (i, s - i as f64)
    };
    let (i, fx) = locate(x);
    let (j, fy) = locate(y);
    let top = grid[i][j] * (1.0 - fy) + grid[i][j + 1] * fy;
    let bottom = grid[i + 1][j] * (1.0 - fy) + grid[i + 1][j + 1] * fy;
    top * (1.0 - fx) + bottom * fx
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalingSpec {
    Constant { c: f64 },
    Linear { c: f64 },
    Power { c: f64, alpha: f64 },
}

impl ScalingSpec {
    pub fn build(&self) -> ScalingSequence {
        match *self {
            ScalingSpec::Constant { c } => ScalingSequence::Constant(c),
            ScalingSpec::Linear { c } => ScalingSequence::Linear(c),
            ScalingSpec::Power { c, alpha } => ScalingSequence::Power { c, alpha },
        }
    }
}

impl Default for ScalingSpec {
    fn default() -> Self {
        ScalingSpec::Constant { c: 1.0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum RateSpec {
    #[default]
    InverseLog,
    InverseLogPower {
        a: f64,
    },
    Fixed {
        r: f64,
    },
    /// `(n, r)` points.
    Table {
        points: Vec<(usize, f64)>,
    },
}

impl RateSpec {
    pub fn build(&self) -> RateFunction {
        match self {
            RateSpec::InverseLog => RateFunction::InverseLog,
            RateSpec::InverseLogPower { a } => RateFunction::InverseLogPower(*a),
            RateSpec::Fixed { r } => RateFunction::Fixed(*r),
            RateSpec::Table { points } => RateFunction::Table(points.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSpec {
    #[serde(default = "default_node_limit")]
    pub node_limit: u64,
    /// Seconds. Makes results depend on machine speed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit: Option<f64>,
}

fn default_node_limit() -> u64 {
    SolveBudget::default().node_limit
}

impl Default for BudgetSpec {
    fn default() -> Self {
        Self {
            node_limit: default_node_limit(),
            time_limit: None,
        }
    }
}

impl BudgetSpec {
    pub fn build(&self) -> SolveBudget {
        SolveBudget {
            node_limit: self.node_limit,
            time_limit: self.time_limit,
        }
    }
}

/// Which window the coverage assertion is checked against.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageWindow {
    #[default]
    Main,
    Refined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub n: Vec<usize>,
    pub trials: u64,
    #[serde(default = "default_kernel")]
    pub kernel: KernelSpec,
    #[serde(default)]
    pub scaling: ScalingSpec,
    #[serde(default)]
    pub rate: RateSpec,
    #[serde(default)]
    pub budget: BudgetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Densities for the assumption suite.
    #[serde(default = "default_gammas")]
    pub gammas: Vec<f64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_refined_epsilon")]
    pub refined_epsilon: f64,
    #[serde(default = "default_coverage_threshold")]
    pub coverage_threshold: f64,
    #[serde(default)]
    pub coverage_window: CoverageWindow,
    /// Largest tolerated fraction of trials whose solver bracket is not
    /// settled inside the window.
    #[serde(default = "default_inconclusive")]
    pub max_inconclusive_fraction: f64,
    /// Deviations for the concentration check.
    #[serde(default = "default_t_values")]
    pub t_values: Vec<f64>,
    /// Worker threads; 0 uses every core. Does not affect results.
    #[serde(default, skip_serializing)]
    pub threads: usize,
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
}

fn default_kernel() -> KernelSpec {
    KernelSpec::Constant { p: 0.5 }
}
fn default_gammas() -> Vec<f64> {
    vec![0.5, 0.75, 1.0]
}
fn default_epsilon() -> f64 {
    0.1
}
fn default_refined_epsilon() -> f64 {
    1.0
}
fn default_coverage_threshold() -> f64 {
    0.8
}
fn default_inconclusive() -> f64 {
    0.1
}
fn default_t_values() -> Vec<f64> {
    vec![50.0, 100.0, 150.0]
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.trials < 1 {
            return bad("trials must be at least 1");
        }
        if self.n.is_empty() {
            return bad("n list is empty");
        }
        if self.n.windows(2).any(|w| w[0] >= w[1]) {
            return bad("n values must be strictly ascending");
        }
        if self.n[0] == 0 {
            return bad("n values must be positive");
        }
        if !(0.0..=1.0).contains(&self.coverage_threshold) {
            return bad("coverage_threshold must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.max_inconclusive_fraction) {
            return bad("max_inconclusive_fraction must lie in [0, 1]");
        }
        if self.epsilon < 0.0 || self.refined_epsilon < 0.0 {
            return bad("epsilon values must be nonnegative");
        }
        if self.budget.node_limit == 0 || self.budget.time_limit.is_some_and(|t| t <= 0.0) {
            return bad("budget limits must be positive");
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g <= 1.0) {
                return bad("gamma must lie in (0, 1]");
            }
        }
        if self.gammas.iter().any(|&g| !(g > 0.0 && g <= 1.0)) {
            return bad("gammas must lie in (0, 1]");
        }
        if self.t_values.iter().any(|&t| t < 0.0) {
            return bad("t_values must be nonnegative");
        }
        if self.kind == ExperimentKind::QuasiCliqueWindow && self.gamma.is_none() {
            return bad("quasi_clique_window needs gamma");
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form (threads and output excluded).
    pub fn hash(&self) -> Result<String> {
        let text = to_canonical_string(self)?;
        Ok(hex::encode(Sha256::digest(text.as_bytes())))
    }
}

fn cli_numbers(spec: &str, args: &str, count: usize) -> Result<Vec<f64>> {
    let vals = args
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Config(format!("{spec:?}: {e}")))?;
    if vals.len() != count {
        return Err(Error::Config(format!(
            "{spec:?}: expected {count} comma-separated values"
        )));
    }
    Ok(vals)
}

/// `family:args`, e.g. `constant:0.5`, `bump:0.5,3,1`, `rank1:1,2`,
/// `block:grid.txt`, `custom:grid.txt,0.5`.
pub fn parse_kernel_arg(spec: &str) -> Result<KernelSpec> {
    let (family, args) = spec.split_once(':').unwrap_or((spec, ""));
    Ok(match family {
        "constant" => KernelSpec::Constant {
            p: cli_numbers(spec, args, 1)?[0],
        },
        "rank1" => {
            let v = cli_numbers(spec, args, 2)?;
            KernelSpec::Rank1 {
                scale: v[0],
                exponent: v[1],
            }
        }
        "bump" => {
            let v = cli_numbers(spec, args, 3)?;
            KernelSpec::Bump {
                m: v[0],
                peak: v[1],
                width: v[2],
            }
        }
        "block" if !args.is_empty() => KernelSpec::Block {
            grid: None,
            grid_path: Some(PathBuf::from(args)),
            breakpoints: None,
        },
        "custom" => {
            let (path, m) = args
                .rsplit_once(',')
                .ok_or_else(|| Error::Config(format!("{spec:?}: expected custom:PATH,m")))?;
            KernelSpec::Custom {
                grid_path: PathBuf::from(path),
                m: cli_numbers(spec, m, 1)?[0],
            }
        }
        _ => return Err(Error::Config(format!("unknown kernel {spec:?}"))),
    })
}

/// `constant:c`, `linear:c` or `power:c,alpha`.
pub fn parse_scaling_arg(spec: &str) -> Result<ScalingSpec> {
    let (rule, args) = spec.split_once(':').unwrap_or((spec, ""));
    Ok(match rule {
        "constant" => ScalingSpec::Constant {
            c: cli_numbers(spec, args, 1)?[0],
        },
        "linear" => ScalingSpec::Linear {
            c: cli_numbers(spec, args, 1)?[0],
        },
        "power" => {
            let v = cli_numbers(spec, args, 2)?;
            ScalingSpec::Power {
                c: v[0],
                alpha: v[1],
            }
        }
        _ => return Err(Error::Config(format!("unknown scaling {spec:?}"))),
    })
}

/// `inverse_log`, `inverse_log_power:a` or `fixed:r`.
pub fn parse_rate_arg(spec: &str) -> Result<RateSpec> {
    let (form, args) = spec.split_once(':').unwrap_or((spec, ""));
    Ok(match form {
        "inverse_log" if args.is_empty() => RateSpec::InverseLog,
        "inverse_log_power" => RateSpec::InverseLogPower {
            a: cli_numbers(spec, args, 1)?[0],
        },
        "fixed" => RateSpec::Fixed {
            r: cli_numbers(spec, args, 1)?[0],
        },
        _ => return Err(Error::Config(format!("unknown rate {spec:?}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
kind = "chromatic_window"
seed = 11
n = [100, 300]
trials = 5
[kernel]
family = "bump"
m = 0.5
peak = 3.0
width = 1.0
[scaling]
rule = "linear"
c = 1.0
"#;

    #[test]
    fn parses_with_defaults() {
        let c = ExperimentConfig::from_toml_str(BASE).unwrap();
        assert_eq!(c.kind, ExperimentKind::ChromaticWindow);
        assert_eq!(c.rate, RateSpec::InverseLog);
        assert_eq!(c.budget.node_limit, 50_000_000);
        assert_eq!(c.coverage_threshold, 0.8);
        assert!(c.kernel.build().is_ok());
    }

    #[test]
    fn rejects_bad_configs() {
        for (from, to) in [
            ("trials = 5", "trials = 0"),
            ("n = [100, 300]", "n = [300, 100]"),
            ("seed = 11\n", ""),
            ("width = 1.0", "width = 1.0\nheight = 2.0"),
        ] {
            let text = BASE.replace(from, to);
            assert!(
                matches!(
                    ExperimentConfig::from_toml_str(&text),
                    Err(Error::Config(_))
                ),
                "{to}"
            );
        }
    }

    #[test]
    fn hash_ignores_threads_and_output() {
        let a = ExperimentConfig::from_toml_str(BASE).unwrap();
        let mut b = a.clone();
        b.threads = 7;
        b.output = Some("elsewhere".into());
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.seed = 12;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
        assert_eq!(a.hash().unwrap().len(), 64);
    }

    #[test]
    fn canonical_echo_reparses() {
        let a = ExperimentConfig::from_toml_str(BASE).unwrap();
        let json = to_canonical_string(&a).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn cli_specs() {
        assert_eq!(
            parse_kernel_arg("bump:0.5,3,1").unwrap(),
            KernelSpec::Bump {
                m: 0.5,
                peak: 3.0,
                width: 1.0
            }
        );
        assert_eq!(
            parse_kernel_arg("constant:0.25").unwrap(),
            KernelSpec::Constant { p: 0.25 }
        );
        assert!(matches!(
            parse_kernel_arg("custom:dir/g.txt,0.5").unwrap(),
            KernelSpec::Custom { m, .. } if m == 0.5
        ));
        assert_eq!(
            parse_scaling_arg("power:1,0.8").unwrap(),
            ScalingSpec::Power { c: 1.0, alpha: 0.8 }
        );
        assert_eq!(
            parse_rate_arg("fixed:0.05").unwrap(),
            RateSpec::Fixed { r: 0.05 }
        );
        assert!(parse_kernel_arg("bump:1,2").is_err());
        assert!(parse_scaling_arg("cubic:1").is_err());
        assert!(parse_rate_arg("inverse_log:3").is_err());
    }

    #[test]
    fn bilinear_hits_grid_points() {
        let g = vec![vec![0.0, 1.0], vec![1.0, 2.0]];
        assert_eq!(bilinear(&g, 0.0, 0.0), 0.0);
        assert_eq!(bilinear(&g, 1.0, 1.0), 2.0);
        assert_eq!(bilinear(&g, 0.5, 0.5), 1.0);
    }
}
