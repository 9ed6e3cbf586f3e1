use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::flow::{FlowConfig, OuterBc};

use super::preset::Preset;

/// Environment variable that overrides `out_dir` when set.
pub const OUT_DIR_ENV: &str = "WARPFLOW_OUT_DIR";

const KEYS: [&str; 12] = [
    "n",
    "L",
    "M",
    "stretch",
    "cfl",
    "t_end",
    "outer_bc",
    "preset",
    "psi_csv",
    "modified",
    "record_every",
    "out_dir",
];

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{value}`")))
}

/// Parses `key = value` lines (with `#` comments) into a validated config.
pub fn parse_config(text: &str) -> Result<FlowConfig> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(line, format!("line {}: expected `key = value`", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(Error::config(key, "unknown key"));
        }
        if pairs.iter().any(|(k, _)| k == key) {
            return Err(Error::config(key, "given more than once"));
        }
        pairs.push((key.to_string(), value.to_string()));
    }
    let get = |k: &str| pairs.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());

    let preset_text = get("preset").ok_or_else(|| Error::config("preset", "missing"))?;
    let preset = Preset::parse(preset_text, get("psi_csv"))?;
    let mut config = FlowConfig::new(preset);
    for (key, value) in &pairs {
        let v = value.as_str();
        match key.as_str() {
            "n" => config.n = number(key, v)?,
            "L" => config.length = number(key, v)?,
            "M" => config.intervals = number(key, v)?,
            "stretch" => config.stretch = number(key, v)?,
            "cfl" => config.cfl = number(key, v)?,
            "t_end" => config.t_end = number(key, v)?,
            "outer_bc" => config.outer_bc = OuterBc::parse(v)?,
            "modified" => config.modified = number(key, v)?,
            "record_every" => config.record_every = number(key, v)?,
            "out_dir" => config.out_dir = PathBuf::from(v),
            _ => {}
        }
    }
    config.validate()?;
    Ok(config)
}

/// Renders a config in the grammar accepted by [`parse_config`].
pub fn config_to_text(config: &FlowConfig) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    line("preset", config.preset.to_string());
    line("n", config.n.to_string());
    line("L", format!("{:?}", config.length));
    line("M", config.intervals.to_string());
    line("stretch", format!("{:?}", config.stretch));
    line("cfl", format!("{:?}", config.cfl));
    line("t_end", format!("{:?}", config.t_end));
    line("outer_bc", config.outer_bc.to_string());
    line("modified", config.modified.to_string());
    line("record_every", config.record_every.to_string());
    line("out_dir", config.out_dir.display().to_string());
    out
}

/// Reads and parses a config file, then applies the `out_dir` environment
/// override. Relative CSV paths resolve against the config file's directory.
pub fn load_config(path: &Path) -> Result<FlowConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
    let mut config = parse_config(&text)?;
    if let Preset::FromCsv { path: csv } = &mut config.preset {
        if csv.is_relative() {
            if let Some(dir) = path.parent() {
                *csv = dir.join(&*csv);
            }
        }
    }
    apply_env_override(&mut config);
    Ok(config)
}

pub fn apply_env_override(config: &mut FlowConfig) {
    if let Some(dir) = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty()) {
        config.out_dir = PathBuf::from(dir);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config("preset=hyperbolic\nn=2\nL=6\nM=512\nt_end=1").unwrap();
        assert_eq!(c.cfl, 0.2);
        assert_eq!(c.outer_bc, OuterBc::DirichletExactHyperbolic);
        assert_eq!(c.intervals, 512);
        assert!(!c.modified);
    }

    #[test]
    fn errors_name_the_key() {
        let key_of = |text: &str| match parse_config(text).unwrap_err() {
            Error::Config { key, .. } => key,
            other => panic!("{other}"),
        };
        assert_eq!(key_of("preset=hyperbolic\nn=1"), "n");
        assert_eq!(key_of("preset=hyperbolic\ncfl=0.9"), "cfl");
        assert_eq!(key_of("preset=hyperbolic\ncolour=red"), "colour");
        assert_eq!(key_of("preset=hyperbolic\nM=many"), "M");
        assert_eq!(key_of("preset=hyperbolic\nmodified=perhaps"), "modified");
        assert_eq!(key_of("n=2"), "preset");
    }

    #[test]
    fn comments_and_whitespace() {
        let c = parse_config("# run\n preset = flat  # comment\n\nt_end = 0.5\n").unwrap();
        assert_eq!(c.preset, Preset::Flat);
        assert_eq!(c.t_end, 0.5);
    }

    #[test]
    fn text_roundtrip() {
        let mut c = parse_config("preset=perturbed_hyperbolic(0.1,2,0.5)\nM=128\nmodified=true\nstretch=1.5").unwrap();
        c.outer_bc = OuterBc::ExtrapolateZeroCurvatureGradient;
        assert_eq!(parse_config(&config_to_text(&c)).unwrap(), c);
    }
}
