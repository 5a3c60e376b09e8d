//! Run configuration in a plain `key = value` grammar.
//!
//! One entry per line; `#` starts a comment; blank lines are ignored; keys
//! are case-sensitive and may appear once. Recognized keys:
//!
//! | key | meaning | default |
//! |---|---|---|
//! | `N` | grid resolution per axis (even, >= 4) | 32 |
//! | `scheme` | `galerkin` or `mollified` | `galerkin` |
//! | `cutoff` | Galerkin spherical cutoff `K <= N/3` | `floor(N/3)` |
//! | `m` | mollification index | 4 |
//! | `mollifier` | `gaussian` or `compact_bump` | `gaussian` |
//! | `dt` | time step | 1e-3 |
//! | `T` | horizon | 1 |
//! | `datum` | `zero`, `kolmogorov`, `taylor_green`, `random` | `taylor_green` |
//! | `amplitude` | datum amplitude | 1 |
//! | `seed` | seed of the random datum | 0 |
//! | `slope` | spectral slope of the random datum | 2 |
//! | `sample_every` | steps between stored samples | 1 |
//! | `eta` | pigeonhole threshold | 1 |
//! | `guard` | blow-up guard on the coefficient sum | 1e8 |
//! | `keep_fields` | store the field of every sample | `false` |
//! | `snapshot_times` | comma-separated snapshot times | none |
//! | `out` | output directory | `nslab_out` |

use std::collections::HashMap;
use std::path::PathBuf;

use nslab::field::MollifierSymbol;
use nslab::{Datum, Scheme, SolverConfig};

use crate::CliError;

pub const KEYS: [&str; 17] = [
    "N",
    "scheme",
    "cutoff",
    "m",
    "mollifier",
    "dt",
    "T",
    "datum",
    "amplitude",
    "seed",
    "slope",
    "sample_every",
    "eta",
    "guard",
    "keep_fields",
    "snapshot_times",
    "out",
];

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub out: Option<PathBuf>,
    /// Entries as written, in file order.
    pub entries: Vec<(String, String)>,
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| config_error(format!("`{key}`: cannot parse `{value}`")))
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| config_error(format!("line {}: expected `key = value`, got `{line}`", lineno + 1)))?;
        entries.push((k.trim().to_string(), v.trim().to_string()));
    }

    let unknown: Vec<&str> = entries
        .iter()
        .map(|(k, _)| k.as_str())
        .filter(|k| !KEYS.contains(k))
        .collect();
    if !unknown.is_empty() {
        return Err(config_error(format!("unknown keys: {}", unknown.join(", "))));
    }
    let mut map: HashMap<&str, &str> = HashMap::new();
    for (k, v) in &entries {
        if map.insert(k, v).is_some() {
            return Err(config_error(format!("duplicate key `{k}`")));
        }
    }
    let get = |k: &str| map.get(k).copied();
    let num = |k: &str, default: f64| get(k).map_or(Ok(default), |v| number::<f64>(k, v));

    let n: usize = get("N").map_or(Ok(32), |v| number("N", v))?;
    let scheme = match get("scheme").unwrap_or("galerkin") {
        "galerkin" => Scheme::galerkin(num("cutoff", (n / 3) as f64)?),
        "mollified" => Scheme::Mollified {
            m: num("m", 4.0)?,
            symbol: match get("mollifier") {
                None => MollifierSymbol::Gaussian,
                Some(s) => MollifierSymbol::parse(s)
                    .ok_or_else(|| config_error(format!("`mollifier`: unknown symbol `{s}`")))?,
            },
        },
        other => return Err(config_error(format!("`scheme`: expected galerkin or mollified, got `{other}`"))),
    };
    let datum = Datum::from_name(
        get("datum").unwrap_or("taylor_green"),
        num("amplitude", 1.0)?,
        get("seed").map_or(Ok(0), |v| number("seed", v))?,
        num("slope", 2.0)?,
    )
    .map_err(|e| config_error(format!("`datum`: {e}")))?;

    let mut solver = SolverConfig::new(n, scheme, datum, num("dt", 1e-3)?, num("T", 1.0)?);
    solver.sample_every = get("sample_every").map_or(Ok(1), |v| number("sample_every", v))?;
    solver.eta = num("eta", 1.0)?;
    solver.guard = num("guard", 1e8)?;
    solver.keep_fields = get("keep_fields").map_or(Ok(false), |v| number("keep_fields", v))?;
    if let Some(v) = get("snapshot_times") {
        solver.snapshot_times = v
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| number("snapshot_times", s.trim()))
            .collect::<Result<_, _>>()?;
    }
    solver.validate().map_err(|e| config_error(e.to_string()))?;
    Ok(RunConfig {
        solver,
        out: get("out").map(PathBuf::from),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let c = parse("# comment\nN = 16\ndatum = kolmogorov  # trailing\n\nT=0.5\n").unwrap();
        assert_eq!(c.solver.n, 16);
        assert_eq!(c.solver.scheme, Scheme::galerkin(5.0));
        assert_eq!(c.solver.datum, Datum::Kolmogorov { amplitude: 1.0 });
        assert_eq!(c.solver.horizon, 0.5);
        assert_eq!(c.entries.len(), 3);

        let c = parse("scheme = mollified\nm = 3\nmollifier = compact_bump\nsnapshot_times = 0.1, 0.2").unwrap();
        assert_eq!(c.solver.scheme.tag(), "mollified:3:compact_bump");
        assert_eq!(c.solver.snapshot_times, vec![0.1, 0.2]);
    }

    #[test]
    fn errors_name_the_key() {
        let msg = |t: &str| parse(t).unwrap_err().to_string();
        assert!(msg("dt = 0").contains("dt"));
        assert!(msg("foo = 1\nbar = 2\nN = 8").contains("foo, bar"));
        assert!(msg("N = 8\nN = 16").contains("duplicate key `N`"));
        assert!(msg("T = soon").contains("`T`"));
        assert!(msg("N = 16\ncutoff = 9").contains("cutoff"));
        assert!(msg("just words").contains("line 1"));
        assert!(msg("datum = vortex").contains("vortex"));
    }
}
