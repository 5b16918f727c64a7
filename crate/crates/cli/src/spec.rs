//! Benchmark specification files.
//!
//! A spec is a TOML document with a master `seed`, optional `[defaults]`
//! algorithm settings and one `[[problem]]` table per problem:
//!
//! ```toml
//! seed = 42
//!
//! [defaults]
//! m = 5
//! n_init = 10
//!
//! [[problem]]
//! name = "uniform"
//! generator = "uniform"
//! n = 1000
//! k = 100
//! runs = 20
//!
//! [[problem]]
//! name = "birch1"
//! file = "data/birch1.txt"
//! k = 100
//! runs = 5
//! ```

use std::path::{Path, PathBuf};

use breathing_kmeans::datagen::{GRID_SIGMA_X, GRID_SIGMA_Y, GRID_SPACING};
use breathing_kmeans::{
    BreathingConfig, GenSpec, Init, LloydConfig, MixtureSpec, Norm25Params, SeedConfig,
};
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::format::read_codebook;

/// Algorithm settings; unset fields fall back to `[defaults]`, then to the
/// built-in defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgoSettings {
    pub m: Option<usize>,
    pub theta: Option<f64>,
    pub tol: Option<f64>,
    pub epsilon: Option<f64>,
    pub n_init: Option<usize>,
    pub max_iter: Option<usize>,
    pub init: Option<String>,
}

impl AlgoSettings {
    fn or(&self, fallback: &AlgoSettings) -> AlgoSettings {
        AlgoSettings {
            m: self.m.or(fallback.m),
            theta: self.theta.or(fallback.theta),
            tol: self.tol.or(fallback.tol),
            epsilon: self.epsilon.or(fallback.epsilon),
            n_init: self.n_init.or(fallback.n_init),
            max_iter: self.max_iter.or(fallback.max_iter),
            init: self.init.clone().or_else(|| fallback.init.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemEntry {
    pub name: String,
    pub k: usize,
    #[serde(default = "one")]
    pub runs: usize,
    /// Data file; mutually exclusive with `generator`.
    pub file: Option<PathBuf>,
    /// `uniform`, `gaussian-grid`, `norm25` or `mixture`.
    pub generator: Option<String>,
    pub n: Option<usize>,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub sigma_x: Option<f64>,
    pub sigma_y: Option<f64>,
    pub spacing: Option<f64>,
    pub d: Option<usize>,
    pub g: Option<usize>,
    pub side: Option<f64>,
    pub sigma: Option<f64>,
    /// Mixture only: explicit centers (one array per cluster).
    pub centers: Option<Vec<Vec<f64>>>,
    pub m: Option<usize>,
    pub theta: Option<f64>,
    pub tol: Option<f64>,
    pub epsilon: Option<f64>,
    pub n_init: Option<usize>,
    pub max_iter: Option<usize>,
    pub init: Option<String>,
}

impl ProblemEntry {
    fn algo(&self) -> AlgoSettings {
        AlgoSettings {
            m: self.m,
            theta: self.theta,
            tol: self.tol,
            epsilon: self.epsilon,
            n_init: self.n_init,
            max_iter: self.max_iter,
            init: self.init.clone(),
        }
    }
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub defaults: AlgoSettings,
    #[serde(rename = "problem", default)]
    pub problems: Vec<ProblemEntry>,
}

/// Where a problem's data comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Generator(GenSpec),
    File(PathBuf),
}

/// A problem with its data source resolved and settings merged.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub name: String,
    pub source: Source,
    pub k: usize,
    pub runs: usize,
    pub algo: AlgoSettings,
}

impl BenchSpec {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("invalid bench spec: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Validates every problem; relative file paths resolve against `base`.
    pub fn problems(&self, base: &Path) -> CliResult<Vec<Problem>> {
        if self.problems.is_empty() {
            return Err(CliError::Usage(
                "bench spec has no [[problem]] entries".into(),
            ));
        }
        self.problems
            .iter()
            .map(|p| {
                if p.runs < 1 {
                    return Err(usage(&p.name, "runs must be at least 1"));
                }
                if p.k < 1 {
                    return Err(usage(&p.name, "k must be at least 1"));
                }
                let source = match (&p.file, &p.generator) {
                    (Some(f), None) => Source::File(base.join(f)),
                    (None, Some(g)) => Source::Generator(gen_spec(p, g)?),
                    _ => return Err(usage(&p.name, "set exactly one of `file` or `generator`")),
                };
                Ok(Problem {
                    name: p.name.clone(),
                    source,
                    k: p.k,
                    runs: p.runs,
                    algo: p.algo().or(&self.defaults),
                })
            })
            .collect()
    }
}

fn usage(problem: &str, msg: &str) -> CliError {
    CliError::Usage(format!("problem `{problem}`: {msg}"))
}

fn gen_spec(p: &ProblemEntry, generator: &str) -> CliResult<GenSpec> {
    let need_n = || p.n.ok_or_else(|| usage(&p.name, "generator needs `n`"));
    Ok(match generator {
        "uniform" => GenSpec::UniformSquare { n: need_n()? },
        "gaussian-grid" => GenSpec::GaussianGrid {
            rows: p.rows.unwrap_or(5),
            cols: p.cols.unwrap_or(5),
            n: need_n()?,
            sigma_x: p.sigma_x.unwrap_or(GRID_SIGMA_X),
            sigma_y: p.sigma_y.unwrap_or(GRID_SIGMA_Y),
            spacing: p.spacing.unwrap_or(GRID_SPACING),
        },
        "norm25" => {
            let d = Norm25Params::default();
            GenSpec::Norm25Style(Norm25Params {
                n: p.n.unwrap_or(d.n),
                d: p.d.unwrap_or(d.d),
                g: p.g.unwrap_or(d.g),
                side: p.side.unwrap_or(d.side),
                sigma: p.sigma.unwrap_or(d.sigma),
            })
        }
        "mixture" => {
            let centers = p
                .centers
                .clone()
                .ok_or_else(|| usage(&p.name, "mixture needs `centers`"))?;
            GenSpec::GaussianMixture(MixtureSpec::isotropic(
                centers,
                p.sigma.unwrap_or(1.0),
                need_n()?,
            ))
        }
        other => return Err(usage(&p.name, &format!("unknown generator `{other}`"))),
    })
}

impl AlgoSettings {
    /// Parses an `init` value: `kmeanspp`, `random` or `file:PATH`.
    pub fn parse_init(value: &str, base: &Path) -> CliResult<Init<f64>> {
        match value {
            "kmeanspp" | "k-means++" => Ok(Init::KMeansPlusPlus),
            "random" => Ok(Init::Random),
            other => match other.strip_prefix("file:") {
                Some(path) => {
                    let codebook = read_codebook(&base.join(path))
                        .map_err(|e| CliError::Data(e.to_string()))?;
                    Ok(Init::Explicit(codebook))
                }
                None => Err(CliError::Usage(format!(
                    "unknown init `{other}` (expected kmeanspp, random or file:PATH)"
                ))),
            },
        }
    }

    /// Full breathing configuration with built-in defaults for unset fields.
    pub fn to_config(&self, rng_seed: u64, base: &Path) -> CliResult<BreathingConfig<f64>> {
        let defaults = BreathingConfig::<f64>::default();
        let init = match &self.init {
            Some(v) => Self::parse_init(v, base)?,
            None => Init::KMeansPlusPlus,
        };
        let tol = self.tol.unwrap_or(defaults.tol);
        let cfg = BreathingConfig {
            m0: self.m.unwrap_or(defaults.m0),
            theta: self.theta.unwrap_or(defaults.theta),
            tol,
            epsilon: self.epsilon.unwrap_or(defaults.epsilon),
            lloyd: LloydConfig {
                tol,
                max_iter: self.max_iter.unwrap_or(defaults.lloyd.max_iter),
            },
            seeding: SeedConfig {
                init,
                n_init: self.n_init.unwrap_or(defaults.seeding.n_init),
                rng_seed,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPEC: &str = r#"
seed = 42

[defaults]
m = 4
n_init = 3

[[problem]]
name = "uniform"
generator = "uniform"
n = 1000
k = 100
runs = 20

[[problem]]
name = "grid"
generator = "gaussian-grid"
n = 10000
k = 50
m = 2

[[problem]]
name = "ext"
file = "data/x.txt"
k = 7
"#;

    #[test]
    fn parses_and_merges_defaults() {
        let spec = BenchSpec::parse(SPEC).unwrap();
        assert_eq!(spec.seed, 42);
        let problems = spec.problems(Path::new("/base")).unwrap();
        assert_eq!(problems.len(), 3);
        assert_eq!(
            problems[0].source,
            Source::Generator(GenSpec::UniformSquare { n: 1000 })
        );
        assert_eq!(problems[0].algo.m, Some(4));
        assert_eq!(problems[1].algo.m, Some(2));
        assert_eq!(problems[1].algo.n_init, Some(3));
        assert_eq!(problems[1].runs, 1);
        assert_eq!(
            problems[1].source,
            Source::Generator(GenSpec::gmd5x5(10000))
        );
        assert_eq!(
            problems[2].source,
            Source::File(PathBuf::from("/base/data/x.txt"))
        );
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(BenchSpec::parse("seed = 1\n[[problem]]\nname='a'\nk=2\nbogus=1\n").is_err());
        let no_source = BenchSpec::parse("[[problem]]\nname='a'\nk=2\n").unwrap();
        assert!(no_source.problems(Path::new(".")).is_err());
        let unknown =
            BenchSpec::parse("[[problem]]\nname='a'\nk=2\ngenerator='rice'\nn=5\n").unwrap();
        assert!(unknown.problems(Path::new(".")).is_err());
        let zero_runs =
            BenchSpec::parse("[[problem]]\nname='a'\nk=2\nruns=0\ngenerator='uniform'\nn=5\n")
                .unwrap();
        assert!(zero_runs.problems(Path::new(".")).is_err());
        assert!(BenchSpec::parse("seed = 1\n")
            .unwrap()
            .problems(Path::new("."))
            .is_err());
    }

    #[test]
    fn settings_build_configs() {
        let s = AlgoSettings {
            m: Some(0),
            tol: Some(1e-3),
            init: Some("random".into()),
            ..AlgoSettings::default()
        };
        let cfg = s.to_config(9, Path::new(".")).unwrap();
        assert_eq!(cfg.m0, 0);
        assert_eq!(cfg.lloyd.tol, 1e-3);
        assert_eq!(cfg.tol, 1e-3);
        assert_eq!(cfg.seeding.init, Init::Random);
        assert_eq!(cfg.seeding.rng_seed, 9);
        assert_eq!(cfg.seeding.n_init, 10);
        assert_eq!(cfg.theta, 1.1);
        let bad = AlgoSettings {
            init: Some("forgy".into()),
            ..AlgoSettings::default()
        };
        assert!(matches!(
            bad.to_config(0, Path::new(".")),
            Err(CliError::Usage(_))
        ));
        let missing = AlgoSettings {
            init: Some("file:/nonexistent/c.txt".into()),
            ..AlgoSettings::default()
        };
        assert!(matches!(
            missing.to_config(0, Path::new(".")),
            Err(CliError::Data(_))
        ));
    }

    #[test]
    fn mixture_needs_centers() {
        let spec = BenchSpec::parse(
            "[[problem]]\nname='m'\nk=2\ngenerator='mixture'\nn=10\ncenters=[[0.0,0.0],[5.0,5.0]]\nsigma=0.5\n",
        )
        .unwrap();
        let p = spec.problems(Path::new(".")).unwrap();
        match &p[0].source {
            Source::Generator(GenSpec::GaussianMixture(m)) => {
                assert_eq!(m.counts, vec![5, 5]);
                assert_eq!(m.sigmas[1], vec![0.5, 0.5]);
            }
            other => panic!("{other:?}"),
        }
    }
}
