//! Flag sets, the flat config file that mirrors them, and list parsing.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer};

use crate::analysis::LevelMode;
use crate::error::{LabError, LabResult};
use crate::fieldio::Format;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SU11_LAB_OUT_DIR";

/// Comma-separated numbers on the command line, a string or an array in the
/// config file. Angles may be written as multiples of pi (`pi/4`, `3pi/2`).
#[derive(Debug, Clone, PartialEq)]
pub struct NumList(pub Vec<f64>);

pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some(pos) = s.find("pi") {
        let (coef, rest) = s.split_at(pos);
        let coef = match coef.trim() {
            "" => 1.0,
            "-" => -1.0,
            c => c
                .trim_end_matches('*')
                .parse::<f64>()
                .map_err(|e| format!("{s:?}: {e}"))?,
        };
        let div = match rest[2..].trim() {
            "" => 1.0,
            r => r
                .strip_prefix('/')
                .ok_or_else(|| format!("{s:?}: expected a/pi/b"))?
                .parse::<f64>()
                .map_err(|e| format!("{s:?}: {e}"))?,
        };
        return Ok(coef * std::f64::consts::PI / div);
    }
    s.parse::<f64>().map_err(|e| format!("{s:?}: {e}"))
}

impl FromStr for NumList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v = s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(parse_number)
            .collect::<Result<Vec<_>, _>>()?;
        if v.is_empty() {
            return Err("empty list".into());
        }
        Ok(NumList(v))
    }
}

impl<'de> Deserialize<'de> for NumList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Many(Vec<f64>),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Many(v) => Ok(NumList(v)),
        }
    }
}

impl<'de> Deserialize<'de> for Format {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

impl<'de> Deserialize<'de> for LevelMode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Declares a flag set whose every field is optional, can be read from a
/// flat TOML file with the same (kebab-case) names, and merges with flags
/// taking precedence.
macro_rules! flag_set {
    ($(#[$m:meta])* $name:ident { $( $(#[$fm:meta])* $field:ident : $ty:ty ),* $(,)? }) => {
        $(#[$m])*
        #[derive(clap::Args, Debug, Clone, Default, serde::Deserialize)]
        #[serde(deny_unknown_fields, rename_all = "kebab-case")]
        pub struct $name {
            /// Flat key = value file with the same names as the flags.
            #[arg(long)]
            #[serde(skip)]
            pub config: Option<std::path::PathBuf>,
            $( $(#[$fm])* #[arg(long)] pub $field: Option<$ty>, )*
        }

        impl $name {
            /// Flags first, then the config file.
            pub fn resolve(self) -> crate::error::LabResult<(Self, Option<String>)> {
                let Some(path) = self.config.clone() else {
                    return Ok((self, None));
                };
                let file: Self = crate::options::read_config(&path)?;
                Ok((
                    Self {
                        config: self.config,
                        $( $field: self.$field.or(file.$field), )*
                    },
                    Some(path.display().to_string()),
                ))
            }
        }
    };
}

pub(crate) use flag_set;

pub fn read_config<T: serde::de::DeserializeOwned>(path: &Path) -> LabResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    toml::from_str(&text).map_err(|e| LabError::parse(path, e.to_string()))
}

/// `--out` if given, otherwise `<SU11_LAB_OUT_DIR or .>/<default_name>`.
pub fn output_path(out: Option<PathBuf>, default_name: &str) -> PathBuf {
    out.unwrap_or_else(|| {
        let dir = std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."));
        dir.join(default_name)
    })
}

/// `foo.csv` → `foo.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    path.with_file_name(format!("{stem}.{suffix}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn numbers_and_angles() {
        assert_eq!(parse_number("0.25").unwrap(), 0.25);
        assert_eq!(parse_number("pi").unwrap(), PI);
        assert_eq!(parse_number("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_number("3pi/2").unwrap(), 3.0 * PI / 2.0);
        assert_eq!(parse_number("-pi").unwrap(), -PI);
        assert!(parse_number("pi/").is_err());
        assert!(parse_number("x").is_err());
        let l: NumList = "8, 12,16".parse().unwrap();
        assert_eq!(l.0, vec![8.0, 12.0, 16.0]);
        assert!("".parse::<NumList>().is_err());
    }

    #[test]
    fn list_from_config_text_or_array() {
        #[derive(Deserialize)]
        struct C {
            a: NumList,
            b: NumList,
        }
        let c: C = toml::from_str("a = \"0, pi/4\"\nb = [8, 12.5]\n").unwrap();
        assert_eq!(c.a.0, vec![0.0, PI / 4.0]);
        assert_eq!(c.b.0, vec![8.0, 12.5]);
    }

    #[test]
    fn sibling_names() {
        assert_eq!(
            sibling(Path::new("/tmp/w.csv"), "manifest.json"),
            PathBuf::from("/tmp/w.manifest.json")
        );
    }
}
