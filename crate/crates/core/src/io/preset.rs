use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::FlowConfig;
use crate::geometry::{build_grid, Profile};

use super::csv::load_profile_csv;

/// Magnitude bound on the perturbation amplitude `ε`.
pub const MAX_PERTURBATION: f64 = 0.2;

/// Initial data selector.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Preset {
    /// `φ = 1`, `ψ = sinh x`.
    Hyperbolic,
    /// `φ = 1`, `ψ = x`.
    Flat,
    /// `φ = λ`, `ψ = λ sinh x`.
    ScaledHyperbolic { lambda_sq: f64 },
    /// `φ = 1`, `ψ = sinh(x) (1 + ε x² exp(-((x - x_c)/width)²))`.
    PerturbedHyperbolic { epsilon: f64, x_c: f64, width: f64 },
    /// Profile read from an `x,phi,psi` CSV; the file also fixes the grid.
    FromCsv { path: PathBuf },
}

impl Preset {
    /// Parses `hyperbolic`, `flat`, `scaled_hyperbolic(λ²)`,
    /// `perturbed_hyperbolic(ε, x_c, width)` or `from_csv(path)`.
    /// A bare `from_csv` takes its path from `psi_csv`.
    pub fn parse(text: &str, psi_csv: Option<&str>) -> Result<Self> {
        let text = text.trim();
        let (name, args) = match text.find('(') {
            Some(open) => {
                let close = text
                    .strip_suffix(')')
                    .ok_or_else(|| Error::config("preset", format!("missing `)` in `{text}`")))?;
                (text[..open].trim(), Some(&close[open + 1..]))
            }
            None => (text, None),
        };
        let numbers = |want: usize| -> Result<Vec<f64>> {
            let args = args.unwrap_or("");
            let vals = args
                .split(',')
                .filter(|a| !a.trim().is_empty())
                .map(|a| {
                    a.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::config("preset", format!("`{}` is not a number", a.trim())))
                })
                .collect::<Result<Vec<_>>>()?;
            if vals.len() != want {
                return Err(Error::config(
                    "preset",
                    format!("`{name}` takes {want} parameter(s), got {}", vals.len()),
                ));
            }
            Ok(vals)
        };
        let preset = match name {
            "hyperbolic" => {
                numbers(0)?;
                Preset::Hyperbolic
            }
            "flat" => {
                numbers(0)?;
                Preset::Flat
            }
            "scaled_hyperbolic" => Preset::ScaledHyperbolic {
                lambda_sq: numbers(1)?[0],
            },
            "perturbed_hyperbolic" => {
                let v = numbers(3)?;
                Preset::PerturbedHyperbolic {
                    epsilon: v[0],
                    x_c: v[1],
                    width: v[2],
                }
            }
            "from_csv" => {
                let path = match (args.map(str::trim).filter(|a| !a.is_empty()), psi_csv) {
                    (Some(p), _) | (None, Some(p)) => PathBuf::from(p),
                    (None, None) => return Err(Error::config("psi_csv", "required by preset `from_csv`")),
                };
                Preset::FromCsv { path }
            }
            other => return Err(Error::config("preset", format!("unknown preset `{other}`"))),
        };
        preset.validate()?;
        Ok(preset)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Preset::ScaledHyperbolic { lambda_sq } if !(lambda_sq > 0.0 && lambda_sq.is_finite()) => Err(
                Error::config("preset", format!("λ² must be finite and positive, got {lambda_sq}")),
            ),
            Preset::PerturbedHyperbolic { epsilon, x_c, width } => {
                if !(epsilon.abs() < MAX_PERTURBATION) {
                    return Err(Error::config(
                        "preset",
                        format!("ε must lie in (-{MAX_PERTURBATION}, {MAX_PERTURBATION}), got {epsilon}"),
                    ));
                }
                if !x_c.is_finite() || !(width > 0.0 && width.is_finite()) {
                    return Err(Error::config("preset", "x_c must be finite and width positive"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `λ²` for presets that lie in the exact hyperbolic family.
    pub fn exact_scale(&self) -> Option<f64> {
        match *self {
            Preset::Hyperbolic => Some(1.0),
            Preset::ScaledHyperbolic { lambda_sq } => Some(lambda_sq),
            _ => None,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Hyperbolic => write!(f, "hyperbolic"),
            Preset::Flat => write!(f, "flat"),
            Preset::ScaledHyperbolic { lambda_sq } => write!(f, "scaled_hyperbolic({lambda_sq:?})"),
            Preset::PerturbedHyperbolic { epsilon, x_c, width } => {
                write!(f, "perturbed_hyperbolic({epsilon:?},{x_c:?},{width:?})")
            }
            Preset::FromCsv { path } => write!(f, "from_csv({})", path.display()),
        }
    }
}

/// `(name, formula)` for every preset, for listing on the command line.
pub fn preset_catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        ("hyperbolic", "phi = 1, psi = sinh(x)"),
        ("flat", "phi = 1, psi = x"),
        ("scaled_hyperbolic(l2)", "phi = sqrt(l2), psi = sqrt(l2) sinh(x)"),
        (
            "perturbed_hyperbolic(eps,x_c,width)",
            "phi = 1, psi = sinh(x) (1 + eps x^2 exp(-((x - x_c)/width)^2)), |eps| < 0.2",
        ),
        (
            "from_csv(path)",
            "x,phi,psi read from a CSV file; the file fixes the grid",
        ),
    ]
}

/// Samples the configured preset on the configured grid.
pub fn initial_profile(config: &FlowConfig) -> Result<Profile> {
    config.validate()?;
    if let Preset::FromCsv { path } = &config.preset {
        return load_profile_csv(path, config.n);
    }
    let grid = build_grid(config.length, config.intervals, config.stretch)?;
    let n = config.n;
    match config.preset {
        Preset::Hyperbolic => Profile::from_fn(grid, n, |_| 1.0, f64::sinh),
        Preset::Flat => Profile::from_fn(grid, n, |_| 1.0, |x| x),
        Preset::ScaledHyperbolic { lambda_sq } => {
            let l = lambda_sq.sqrt();
            Profile::from_fn(grid, n, |_| l, |x| l * x.sinh())
        }
        Preset::PerturbedHyperbolic { epsilon, x_c, width } => Profile::from_fn(
            grid,
            n,
            |_| 1.0,
            |x| {
                let z = (x - x_c) / width;
                x.sinh() * (1.0 + epsilon * x * x * (-z * z).exp())
            },
        ),
        Preset::FromCsv { .. } => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_parameterised_presets() {
        assert_eq!(Preset::parse("hyperbolic", None).unwrap(), Preset::Hyperbolic);
        assert_eq!(
            Preset::parse("scaled_hyperbolic(4)", None).unwrap(),
            Preset::ScaledHyperbolic { lambda_sq: 4.0 }
        );
        assert_eq!(
            Preset::parse("perturbed_hyperbolic(0.1, 2, 0.5)", None).unwrap(),
            Preset::PerturbedHyperbolic {
                epsilon: 0.1,
                x_c: 2.0,
                width: 0.5
            }
        );
        assert_eq!(
            Preset::parse("from_csv", Some("a.csv")).unwrap(),
            Preset::FromCsv { path: "a.csv".into() }
        );
    }

    #[test]
    fn rejects_bad_presets() {
        for bad in [
            "sphere",
            "hyperbolic(1)",
            "scaled_hyperbolic(-1)",
            "perturbed_hyperbolic(0.3,2,0.5)",
            "perturbed_hyperbolic(0.1,2)",
            "from_csv",
            "scaled_hyperbolic(2",
        ] {
            assert!(Preset::parse(bad, None).unwrap_err().is_config(), "{bad}");
        }
    }

    #[test]
    fn display_roundtrips() {
        for p in [
            Preset::Flat,
            Preset::ScaledHyperbolic { lambda_sq: 2.5 },
            Preset::PerturbedHyperbolic {
                epsilon: -0.1,
                x_c: 2.0,
                width: 0.5,
            },
        ] {
            assert_eq!(Preset::parse(&p.to_string(), None).unwrap(), p);
        }
    }

    #[test]
    fn perturbation_keeps_origin_data() {
        let mut cfg = FlowConfig::new(Preset::PerturbedHyperbolic {
            epsilon: 0.15,
            x_c: 1.0,
            width: 0.5,
        });
        cfg.intervals = 256;
        let p = initial_profile(&cfg).unwrap();
        assert_eq!(p.psi()[0], 0.0);
        assert!((p.origin_slope() - 1.0).abs() < 1e-3);
    }
}
