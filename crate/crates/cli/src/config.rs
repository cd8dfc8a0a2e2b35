//! Run configuration: flags > config file > defaults.

use crate::error::CliError;
use manifold_rkhs::kernels::{Family, KernelSpec, TruncationPolicy, Weighting};
use manifold_rkhs::spectra::Manifold;
use serde::Deserialize;
use std::fmt;
use std::path::{Path, PathBuf};

/// One layer of raw settings, as written in a config file or on the command line.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub manifold: Option<String>,
    pub kernel: Option<String>,
    pub weighting: Option<String>,
    pub trunc: Option<String>,
    pub abel: Option<bool>,
    pub points: Option<String>,
    pub seed: Option<u64>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub sequential: Option<bool>,
}

impl Layer {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

const DEFAULTS: [(&str, &str); 9] = [
    ("manifold", "circle"),
    ("kernel", "sobolev:1"),
    ("weighting", "bessel"),
    ("trunc", "tail:1e-8"),
    ("abel", "false"),
    ("points", "grid:8"),
    ("seed", "0"),
    ("format", "csv"),
    ("sequential", "false"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Flag,
    File,
    Default,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Flag => "flag",
            Source::File => "file",
            Source::Default => "default",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointSpec {
    /// `n` points at geodesic distances `0, R/(n-1), …, R` from the base point.
    Grid(usize),
    Random {
        n: usize,
        seed: u64,
    },
    File(PathBuf),
}

/// Fully resolved run configuration, with the origin of every value.
#[derive(Debug, Clone)]
pub struct Settings {
    pub manifold: Manifold,
    pub family: Family,
    pub weighting: Weighting,
    pub truncation: TruncationPolicy,
    pub abel: bool,
    pub points: PointSpec,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub sequential: bool,
    /// `(key, value, source)` in a fixed order, for the output header.
    pub provenance: Vec<(String, String, Source)>,
}

impl Settings {
    pub fn resolve(flags: &Layer, file: Option<&Layer>) -> Result<Self, CliError> {
        let empty = Layer::default();
        let file = file.unwrap_or(&empty);
        let mut provenance = Vec::new();
        let mut pick = |key: &str, flag: Option<String>, from_file: Option<String>| -> String {
            let (value, source) = match (flag, from_file) {
                (Some(v), _) => (v, Source::Flag),
                (None, Some(v)) => (v, Source::File),
                (None, None) => {
                    let v = DEFAULTS.iter().find(|(k, _)| *k == key).map_or("", |(_, v)| *v);
                    (v.to_string(), Source::Default)
                }
            };
            provenance.push((key.to_string(), value.clone(), source));
            value
        };
        let manifold = pick("manifold", flags.manifold.clone(), file.manifold.clone());
        let kernel = pick("kernel", flags.kernel.clone(), file.kernel.clone());
        let weighting = pick("weighting", flags.weighting.clone(), file.weighting.clone());
        let trunc = pick("trunc", flags.trunc.clone(), file.trunc.clone());
        let abel = pick(
            "abel",
            flags.abel.map(|b| b.to_string()),
            file.abel.map(|b| b.to_string()),
        );
        let seed = pick(
            "seed",
            flags.seed.map(|s| s.to_string()),
            file.seed.map(|s| s.to_string()),
        );
        let points = pick("points", flags.points.clone(), file.points.clone());
        let format = pick("format", flags.format.clone(), file.format.clone());
        let path = |p: &PathBuf| p.display().to_string();
        let out = pick("out", flags.out.as_ref().map(path), file.out.as_ref().map(path));
        let sequential = pick(
            "sequential",
            flags.sequential.map(|b| b.to_string()),
            file.sequential.map(|b| b.to_string()),
        );

        let seed: u64 = seed
            .parse()
            .map_err(|_| CliError::Config(format!("seed must be a nonnegative integer, got {seed:?}")))?;
        Ok(Self {
            manifold: parse_manifold(&manifold)?,
            family: parse_kernel(&kernel)?,
            weighting: parse_weighting(&weighting)?,
            truncation: parse_trunc(&trunc)?,
            abel: parse_bool("abel", &abel)?,
            points: parse_points(&points, seed)?,
            format: parse_format(&format)?,
            out: (!out.is_empty()).then(|| PathBuf::from(out)),
            sequential: parse_bool("sequential", &sequential)?,
            provenance,
        })
    }

    pub fn spec(&self) -> KernelSpec {
        KernelSpec::new(self.family)
            .with_weighting(self.weighting)
            .with_truncation(self.truncation)
    }
}

fn bad(what: &str, value: &str, expected: &str) -> CliError {
    CliError::Config(format!("invalid {what} {value:?}: expected {expected}"))
}

fn number<T: std::str::FromStr>(what: &str, value: &str, expected: &str) -> Result<T, CliError> {
    value.trim().parse().map_err(|_| bad(what, value, expected))
}

pub fn parse_manifold(value: &str) -> Result<Manifold, CliError> {
    const EXPECTED: &str = "circle, sphere:d or euclidean:n";
    let built = match value.split_once(':') {
        None if value == "circle" => Ok(Manifold::Circle),
        Some(("sphere", d)) => Manifold::sphere(number("manifold", d, EXPECTED)?),
        Some(("euclidean", n)) => Manifold::euclidean(number("manifold", n, EXPECTED)?),
        _ => return Err(bad("manifold", value, EXPECTED)),
    };
    built.map_err(|e| CliError::Config(e.to_string()))
}

pub fn parse_kernel(value: &str) -> Result<Family, CliError> {
    const EXPECTED: &str = "sobolev:s, heat:t or power:s,r";
    let family = match value.split_once(':') {
        Some(("sobolev", s)) => Family::Sobolev {
            s: number("kernel", s, EXPECTED)?,
        },
        Some(("heat", t)) => Family::Heat {
            t: number("kernel", t, EXPECTED)?,
        },
        Some(("power", rest)) => {
            let (s, r) = rest.split_once(',').ok_or_else(|| bad("kernel", value, EXPECTED))?;
            Family::Power {
                s: number("kernel", s, EXPECTED)?,
                r: number("kernel", r, EXPECTED)?,
            }
        }
        _ => return Err(bad("kernel", value, EXPECTED)),
    };
    KernelSpec::new(family)
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(family)
}

pub fn parse_weighting(value: &str) -> Result<Weighting, CliError> {
    match value {
        "bessel" => Ok(Weighting::Bessel),
        "inverse-power" => Ok(Weighting::InversePower),
        "riesz" => Ok(Weighting::Riesz),
        "fourier" => Ok(Weighting::Fourier),
        _ => Err(bad("weighting", value, "bessel, inverse-power, riesz or fourier")),
    }
}

/// `levels:N`, `tail:EPS`, or a bare integer (levels) / float (tail bound).
pub fn parse_trunc(value: &str) -> Result<TruncationPolicy, CliError> {
    const EXPECTED: &str = "levels:N, tail:EPS, N or EPS";
    let spec = KernelSpec::sobolev(1.0);
    let policy = match value.split_once(':') {
        Some(("levels", n)) => spec.with_levels(number("trunc", n, EXPECTED)?).truncation,
        Some(("tail", eps)) => spec.with_tail_bound(number("trunc", eps, EXPECTED)?).truncation,
        Some(_) => return Err(bad("trunc", value, EXPECTED)),
        None => match value.parse::<usize>() {
            Ok(n) => spec.with_levels(n).truncation,
            Err(_) => spec.with_tail_bound(number("trunc", value, EXPECTED)?).truncation,
        },
    };
    match policy {
        TruncationPolicy::TailBound { eps, .. } if !(eps > 0.0 && eps.is_finite()) => {
            Err(bad("trunc", value, "a positive tail bound"))
        }
        TruncationPolicy::FixedLevels(0) => Err(bad("trunc", value, "at least one level")),
        _ => Ok(policy),
    }
}

fn parse_bool(what: &str, value: &str) -> Result<bool, CliError> {
    value.parse().map_err(|_| bad(what, value, "true or false"))
}

/// `grid:N`, `random:N[,seed]` or a path to a CSV file of coordinates.
pub fn parse_points(value: &str, seed: u64) -> Result<PointSpec, CliError> {
    const EXPECTED: &str = "grid:N, random:N[,seed] or a file path";
    let positive = |n: usize| {
        if n == 0 {
            Err(bad("points", value, "at least one point"))
        } else {
            Ok(n)
        }
    };
    match value.split_once(':') {
        Some(("grid", n)) => Ok(PointSpec::Grid(positive(number("points", n, EXPECTED)?)?)),
        Some(("random", rest)) => {
            let (n, seed) = match rest.split_once(',') {
                Some((n, s)) => (n, number("points", s, EXPECTED)?),
                None => (rest, seed),
            };
            Ok(PointSpec::Random {
                n: positive(number("points", n, EXPECTED)?)?,
                seed,
            })
        }
        _ if value.is_empty() => Err(bad("points", value, EXPECTED)),
        _ => Ok(PointSpec::File(PathBuf::from(value))),
    }
}

fn parse_format(value: &str) -> Result<Format, CliError> {
    match value {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err(bad("format", value, "csv or json")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_overrides_defaults() {
        let file = Layer {
            manifold: Some("sphere:3".into()),
            kernel: Some("sobolev:2".into()),
            ..Layer::default()
        };
        let flags = Layer {
            kernel: Some("heat:0.5".into()),
            ..Layer::default()
        };
        let s = Settings::resolve(&flags, Some(&file)).unwrap();
        assert_eq!(s.manifold, Manifold::Sphere { dim: 3 });
        assert_eq!(s.family, Family::Heat { t: 0.5 });
        assert_eq!(s.weighting, Weighting::Bessel);
        let source = |key: &str| s.provenance.iter().find(|p| p.0 == key).unwrap().2;
        assert_eq!(source("manifold"), Source::File);
        assert_eq!(source("kernel"), Source::Flag);
        assert_eq!(source("weighting"), Source::Default);
    }

    #[test]
    fn parsers_accept_documented_forms() {
        assert_eq!(parse_manifold("euclidean:3").unwrap(), Manifold::Euclidean { dim: 3 });
        assert_eq!(parse_kernel("power:2,0.5").unwrap(), Family::Power { s: 2.0, r: 0.5 });
        assert_eq!(parse_trunc("levels:40").unwrap(), TruncationPolicy::FixedLevels(40));
        assert_eq!(parse_trunc("64").unwrap(), TruncationPolicy::FixedLevels(64));
        assert!(matches!(parse_trunc("1e-10").unwrap(), TruncationPolicy::TailBound { eps, .. } if eps == 1e-10));
        assert_eq!(
            parse_points("random:5,9", 0).unwrap(),
            PointSpec::Random { n: 5, seed: 9 }
        );
        assert_eq!(
            parse_points("random:5", 3).unwrap(),
            PointSpec::Random { n: 5, seed: 3 }
        );
    }

    #[test]
    fn parsers_reject_malformed_values() {
        for bad in ["sphere:2", "sphere:x", "torus", "euclidean:0"] {
            assert!(parse_manifold(bad).is_err(), "{bad}");
        }
        for bad in ["sobolev:-1", "heat", "power:1", "power:1,2", "matern:1"] {
            assert!(parse_kernel(bad).is_err(), "{bad}");
        }
        for bad in ["tail:0", "levels:0", "levels:x", "foo:1"] {
            assert!(parse_trunc(bad).is_err(), "{bad}");
        }
        assert!(parse_points("grid:0", 0).is_err());
    }
}
