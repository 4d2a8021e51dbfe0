//! Suite-runner configuration: JSON file plus command-line overrides.

use picp_core::linalg::Tolerance;
use picp_core::spaces::SemigroupElement;
use serde::Deserialize;

pub const DEFAULT_GRID_N: usize = 24;
pub const DEFAULT_CUTOFF: u64 = 16;
pub const DEFAULT_SEED: u64 = 0;

/// Raw JSON shape of the configuration file. All fields optional; the
/// command line may override each.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RawConfig {
    pub suites: Option<Vec<String>>,
    /// An integer, or a `[a_num, a_den, b_num, b_den]` quadruple meaning
    /// `a + b√2`.
    pub cutoff: Option<serde_json::Value>,
    pub grid_n: Option<usize>,
    pub tolerances: Option<RawTolerances>,
    /// Semigroup generators as `[a_num, a_den, b_num, b_den]` quadruples.
    pub generators: Option<Vec<[i64; 4]>>,
    pub seed: Option<u64>,
    pub out_path: Option<String>,
    pub inject_failure: Option<bool>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RawTolerances {
    pub eq_tol: Option<f64>,
    pub rank_tol: Option<f64>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub suites: Vec<String>,
    pub cutoff: SemigroupElement,
    pub grid_n: usize,
    pub tol: Tolerance,
    pub generators: Vec<SemigroupElement>,
    pub seed: u64,
    pub out_path: Option<String>,
    pub inject_failure: bool,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn element_from_quad(q: [i64; 4]) -> Result<SemigroupElement, ConfigError> {
    SemigroupElement::new(q[0], q[1], q[2], q[3])
        .map_err(|e| ConfigError(format!("bad semigroup element {q:?}: {e}")))
}

pub fn parse_cutoff(v: &serde_json::Value) -> Result<SemigroupElement, ConfigError> {
    if let Some(n) = v.as_u64() {
        return Ok(SemigroupElement::from_int(n));
    }
    let arr: Option<Vec<i64>> = v
        .as_array()
        .map(|a| a.iter().filter_map(|x| x.as_i64()).collect());
    match arr {
        Some(a) if a.len() == 4 => element_from_quad([a[0], a[1], a[2], a[3]]),
        _ => Err(ConfigError(format!(
            "cutoff must be an integer or a [a_num,a_den,b_num,b_den] quadruple, got {v}"
        ))),
    }
}

impl SuiteConfig {
    pub fn from_raw(raw: RawConfig, known_suites: &[&str]) -> Result<SuiteConfig, ConfigError> {
        let suites = raw.suites.unwrap_or_else(|| vec!["all".into()]);
        let expanded: Vec<String> = if suites.iter().any(|s| s == "all") {
            known_suites.iter().map(|s| s.to_string()).collect()
        } else {
            for s in &suites {
                if !known_suites.contains(&s.as_str()) {
                    return Err(ConfigError(format!("unknown suite '{s}'")));
                }
            }
            suites
        };
        let cutoff = match &raw.cutoff {
            Some(v) => parse_cutoff(v)?,
            None => SemigroupElement::from_int(DEFAULT_CUTOFF),
        };
        if cutoff < SemigroupElement::from_int(4) {
            return Err(ConfigError(format!("cutoff must be at least 4, got {cutoff}")));
        }
        let grid_n = raw.grid_n.unwrap_or(DEFAULT_GRID_N);
        if grid_n < 8 {
            return Err(ConfigError(format!("gridN must be at least 8, got {grid_n}")));
        }
        let tols = raw.tolerances.unwrap_or_default();
        let tol = Tolerance::new(
            tols.eq_tol.unwrap_or(Tolerance::default().eq_tol),
            tols.rank_tol.unwrap_or(Tolerance::default().rank_tol),
        )
        .map_err(|e| ConfigError(e.to_string()))?;
        let generators = match raw.generators {
            Some(gs) => {
                if gs.is_empty() {
                    return Err(ConfigError("generators must be nonempty".into()));
                }
                gs.into_iter()
                    .map(element_from_quad)
                    .collect::<Result<Vec<_>, _>>()?
            }
            None => vec![SemigroupElement::from_int(1)],
        };
        Ok(SuiteConfig {
            suites: expanded,
            cutoff,
            grid_n,
            tol,
            generators,
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
            out_path: raw.out_path,
            inject_failure: raw.inject_failure.unwrap_or(false),
        })
    }

    /// Integer cutoff for the suites that live over `Γ = ℤ`.
    pub fn int_cutoff(&self) -> u64 {
        self.cutoff.as_integer().unwrap_or(DEFAULT_CUTOFF)
    }
}
