//! Scenario files.
//!
//! ```json
//! {
//!   "kind": "defect",
//!   "curve": { "exponents": ["z", "0.7071067811865476*z"] },
//!   "divisor": {
//!     "compactification": "product",
//!     "multidegree": [1, 1],
//!     "terms": [
//!       { "exponent": [0, 0], "coefficient": "1" },
//!       { "exponent": [1, 1], "coefficient": "2" }
//!     ]
//!   },
//!   "grid": { "rmin": 10, "rmax": 35, "steps": 24, "spacing": "log" },
//!   "k": [1]
//! }
//! ```
//!
//! `"type"` is accepted in place of `"kind"`. Numbers may be given as JSON
//! numbers or as strings in the expression syntax (`"2^(-1/2)"`, `"1+2i"`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::parse::{parse_complex, parse_expression};
use super::CliError;
use crate::exprjet::Expression;
use crate::nevanlinna::{radius_grid, QuadratureSettings, ZeroSettings};
use crate::semitorus::{CompactifiedDivisor, SemiTorusCurve};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Characteristic,
    Defect,
    Boundary,
    Stabilizer,
    #[serde(rename = "ex518")]
    ExponentialSum,
    #[serde(rename = "prop513")]
    PositiveDefect,
    Cartan,
    Torus,
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Characteristic => "characteristic",
            ScenarioKind::Defect => "defect",
            ScenarioKind::Boundary => "boundary",
            ScenarioKind::Stabilizer => "stabilizer",
            ScenarioKind::ExponentialSum => "ex518",
            ScenarioKind::PositiveDefect => "prop513",
            ScenarioKind::Cartan => "cartan",
            ScenarioKind::Torus => "torus",
        }
    }

    fn needs_regression(&self) -> bool {
        !matches!(self, ScenarioKind::Boundary | ScenarioKind::Stabilizer)
    }
}

/// A real or complex parameter, as a JSON number or an expression string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Number(f64),
    Text(String),
}

impl Param {
    pub fn complex(&self) -> Result<Complex64, CliError> {
        match self {
            Param::Number(x) => Ok(Complex64::new(*x, 0.0)),
            Param::Text(s) => parse_complex(s).map_err(CliError::InvalidInput),
        }
    }

    pub fn real(&self) -> Result<f64, CliError> {
        let c = self.complex()?;
        if c.im != 0.0 {
            return Err(CliError::InvalidInput(format!("expected a real number, got {c}")));
        }
        Ok(c.re)
    }
}

impl From<f64> for Param {
    fn from(x: f64) -> Param {
        Param::Number(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rmin: f64,
    pub rmax: f64,
    pub steps: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            rmin: 5.0,
            rmax: 40.0,
            steps: 24,
            spacing: Spacing::Log,
        }
    }
}

impl GridSpec {
    pub fn new(rmin: f64, rmax: f64, steps: usize, spacing: Spacing) -> GridSpec {
        GridSpec {
            rmin,
            rmax,
            steps,
            spacing,
        }
    }

    pub fn radii(&self) -> Vec<f64> {
        radius_grid(self.rmin, self.rmax, self.steps, self.spacing == Spacing::Log)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    #[serde(default)]
    pub initial_panels: Option<usize>,
    #[serde(default)]
    pub max_panels: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    /// Exponents `L_j` of the coordinates `exp(L_j(z))`.
    pub exponents: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompactificationKind {
    #[default]
    Product,
    Projective,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub exponent: Vec<u32>,
    pub coefficient: Param,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivisorSpec {
    #[serde(default)]
    pub compactification: CompactificationKind,
    #[serde(default)]
    pub multidegree: Option<Vec<u32>>,
    #[serde(default)]
    pub degree: Option<u32>,
    pub terms: Vec<TermSpec>,
}

impl DivisorSpec {
    pub fn build(&self) -> Result<CompactifiedDivisor, CliError> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((t.exponent.clone(), t.coefficient.complex()?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        let p = terms.first().map(|t| t.0.len()).unwrap_or(0);
        let d = match self.compactification {
            CompactificationKind::Product => {
                let md = self
                    .multidegree
                    .clone()
                    .ok_or_else(|| CliError::InvalidInput("product compactification needs a multidegree".into()))?;
                CompactifiedDivisor::product(md, terms)
            }
            CompactificationKind::Projective => {
                let deg = self
                    .degree
                    .ok_or_else(|| CliError::InvalidInput("projective compactification needs a degree".into()))?;
                CompactifiedDivisor::projective(p, deg, terms)
            }
        };
        d.map_err(|e| CliError::InvalidInput(e.to_string()))
    }

    /// `sum_l a_l u^l` on `(P^1)^p` with the given multidegree.
    pub fn product(multidegree: Vec<u32>, terms: &[(Vec<u32>, f64)]) -> DivisorSpec {
        DivisorSpec {
            compactification: CompactificationKind::Product,
            multidegree: Some(multidegree),
            degree: None,
            terms: terms
                .iter()
                .map(|(l, a)| TermSpec {
                    exponent: l.clone(),
                    coefficient: Param::Number(*a),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(alias = "type")]
    pub kind: ScenarioKind,
    /// Single meromorphic function for `characteristic` runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisor: Option<DivisorSpec>,
    /// Coefficients `a_0..a_n` of a hyperplane `sum a_j w_j = 0` in `P^n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyperplane: Option<Vec<Param>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    /// Fit window inside the grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Param>,
    /// Values `c'` for the asymptotic defect sweep of `ex518`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_list: Option<Vec<Param>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Param>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Param>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rmax: Option<f64>,
    /// Directory for report and CSV files; not part of the settings hash.
    #[serde(default, skip_serializing)]
    pub output: Option<String>,
}

impl Scenario {
    pub fn new(kind: ScenarioKind) -> Scenario {
        Scenario {
            kind,
            function: None,
            curve: None,
            divisor: None,
            hyperplane: None,
            grid: None,
            window: None,
            quadrature: None,
            k: None,
            m: None,
            n: None,
            c: None,
            sweep: None,
            p: None,
            rho: None,
            c_list: None,
            tau: None,
            a: None,
            b: None,
            rmax: None,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Scenario, CliError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| CliError::InvalidInput(format!("scenario: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(g) = &self.grid {
            if !(g.rmin >= 1.0) || !(g.rmax > g.rmin) || !g.rmax.is_finite() {
                return Err(CliError::InvalidInput(format!(
                    "grid [{}, {}] must satisfy 1 <= rmin < rmax",
                    g.rmin, g.rmax
                )));
            }
            if self.kind.needs_regression() && g.steps < 8 {
                return Err(CliError::InvalidInput(format!("{} steps, need at least 8", g.steps)));
            }
        }
        if let Some(q) = &self.quadrature {
            if !(q.abs_tol > 0.0) {
                return Err(CliError::InvalidInput("quadrature tolerance must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn grid_or(&self, default: GridSpec) -> GridSpec {
        self.grid.clone().unwrap_or(default)
    }

    pub fn quadrature_settings(&self) -> QuadratureSettings {
        let mut q = QuadratureSettings::default();
        if let Some(s) = &self.quadrature {
            q.abs_tol = s.abs_tol;
            if let Some(n) = s.initial_panels {
                q.initial_panels = n;
            }
            if let Some(n) = s.max_panels {
                q.max_panels = n;
            }
        }
        q
    }

    pub fn zero_settings(&self) -> ZeroSettings {
        ZeroSettings::default()
    }

    pub fn curve(&self) -> Result<SemiTorusCurve, CliError> {
        let spec = self
            .curve
            .as_ref()
            .ok_or_else(|| CliError::InvalidInput("scenario has no curve".into()))?;
        let exps = spec
            .exponents
            .iter()
            .map(|s| parse_expression(s).map_err(CliError::InvalidInput))
            .collect::<Result<Vec<Expression>, _>>()?;
        if exps.is_empty() {
            return Err(CliError::InvalidInput("curve has no components".into()));
        }
        Ok(SemiTorusCurve::from_exponents(exps))
    }

    pub fn divisor(&self) -> Result<CompactifiedDivisor, CliError> {
        self.divisor
            .as_ref()
            .ok_or_else(|| CliError::InvalidInput("scenario has no divisor".into()))?
            .build()
    }

    pub fn truncations(&self) -> Vec<u32> {
        self.k.clone().unwrap_or_else(|| vec![1])
    }
}
