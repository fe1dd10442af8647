use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use fhardy::make_params;
use fhardy::specfun::a_star;
use fhardy::verify::GridSpec;

use crate::CliError;

/// Flags shared by every command. Any flag can also be set in a config
/// file as `key = value`, with the key spelled like the flag without dashes.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Line-oriented `key = value` file; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub d: Option<u32>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Coupling(s). Accepts numbers or multiples of the critical value,
    /// e.g. `a*`, `0.5a*`, `-0.25a*`.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Option<Vec<String>>,
    #[arg(long = "a-tilde", global = true, allow_hyphen_values = true)]
    pub a_tilde: Option<String>,
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub s: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
    #[arg(long = "grid-n", global = true)]
    pub grid_n: Option<usize>,
    #[arg(long = "r-min", global = true)]
    pub r_min: Option<f64>,
    #[arg(long = "r-max", global = true)]
    pub r_max: Option<f64>,
    #[arg(long, global = true)]
    pub family: Option<String>,
    /// Exponent(s): the power-window exponent, or the σ list for `psi`.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub sigma: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long = "out-csv", global = true)]
    pub out_csv: Option<PathBuf>,
    #[arg(long = "out-json", global = true)]
    pub out_json: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long = "delta-plus", global = true)]
    pub delta_plus: Option<f64>,
    /// Pass bound on equivalence ratios.
    #[arg(long, global = true)]
    pub bound: Option<f64>,
    /// Random samples for the Riesz band and the monotonicity probes.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub rx: Option<f64>,
    #[arg(long, global = true)]
    pub ry: Option<f64>,
    #[arg(long, global = true)]
    pub rxy: Option<f64>,
}

/// Fully resolved and validated settings of one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub d: u32,
    pub alpha: f64,
    pub a: Vec<f64>,
    pub a_tilde: Option<f64>,
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    pub grid: GridSpec,
    pub family: String,
    pub sigma: Vec<f64>,
    pub eps: Option<Vec<f64>>,
    pub tol: f64,
    pub seed: u64,
    pub beta: Option<f64>,
    pub delta_plus: Option<f64>,
    pub bound: Option<f64>,
    pub samples: usize,
    pub rx: Option<f64>,
    pub ry: Option<f64>,
    pub rxy: Option<f64>,
    #[serde(skip)]
    pub out_csv: Option<PathBuf>,
    #[serde(skip)]
    pub out_json: Option<PathBuf>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.trim().parse().map_err(|_| invalid(format!("{key}: cannot parse '{v}'")))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, CliError> {
    v.split(',').filter(|x| !x.trim().is_empty()).map(|x| parse_num(key, x)).collect()
}

fn parse_strings(v: &str) -> Vec<String> {
    v.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
}

/// Reads `key = value` lines; `#` starts a comment. Keys may use `-` or `_`.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| invalid(format!("{}:{}: expected `key = value`", path.display(), lineno + 1)))?;
        out.insert(key.trim().replace('_', "-"), value.trim().to_string());
    }
    Ok(out)
}

impl Flags {
    /// Fills unset flags from a key/value map.
    fn fill_from(&mut self, map: &BTreeMap<String, String>) -> Result<(), CliError> {
        for (key, v) in map {
            match key.as_str() {
                "d" => set(&mut self.d, parse_num(key, v)?),
                "alpha" => set(&mut self.alpha, parse_num(key, v)?),
                "a" => set(&mut self.a, parse_strings(v)),
                "a-tilde" => set(&mut self.a_tilde, v.clone()),
                "s" => set(&mut self.s, parse_list(key, v)?),
                "t" => set(&mut self.t, parse_list(key, v)?),
                "grid-n" => set(&mut self.grid_n, parse_num(key, v)?),
                "r-min" => set(&mut self.r_min, parse_num(key, v)?),
                "r-max" => set(&mut self.r_max, parse_num(key, v)?),
                "family" => set(&mut self.family, v.clone()),
                "sigma" => set(&mut self.sigma, parse_list(key, v)?),
                "eps" => set(&mut self.eps, parse_list(key, v)?),
                "tol" => set(&mut self.tol, parse_num(key, v)?),
                "out-csv" => set(&mut self.out_csv, PathBuf::from(v)),
                "out-json" => set(&mut self.out_json, PathBuf::from(v)),
                "seed" => set(&mut self.seed, parse_num(key, v)?),
                "beta" => set(&mut self.beta, parse_num(key, v)?),
                "delta-plus" => set(&mut self.delta_plus, parse_num(key, v)?),
                "bound" => set(&mut self.bound, parse_num(key, v)?),
                "samples" => set(&mut self.samples, parse_num(key, v)?),
                "rx" => set(&mut self.rx, parse_num(key, v)?),
                "ry" => set(&mut self.ry, parse_num(key, v)?),
                "rxy" => set(&mut self.rxy, parse_num(key, v)?),
                other => return Err(invalid(format!("unknown config key '{other}'"))),
            }
        }
        Ok(())
    }

    pub fn resolve(mut self) -> Result<RunConfig, CliError> {
        if let Some(path) = self.config.clone() {
            let map = read_config_file(&path)?;
            self.fill_from(&map)?;
        }
        let d = self.d.unwrap_or(3);
        let alpha = self.alpha.unwrap_or(1.0);
        make_params(d, alpha, 0.0).map_err(CliError::Library)?;
        let a = self.a.unwrap_or_default().iter().map(|x| parse_coupling(x, d, alpha)).collect::<Result<_, _>>()?;
        let a_tilde = self.a_tilde.map(|x| parse_coupling(&x, d, alpha)).transpose()?;
        let grid = GridSpec {
            r_min: self.r_min.unwrap_or(GridSpec::default().r_min),
            r_max: self.r_max.unwrap_or(GridSpec::default().r_max),
            n: self.grid_n.unwrap_or(GridSpec::default().n),
        };
        if !(grid.r_min > 0.0 && grid.r_max > grid.r_min && grid.n >= 16) {
            return Err(invalid(format!("need 0 < r_min < r_max and grid_n >= 16, got {grid:?}")));
        }
        let tol = self.tol.unwrap_or(1e-10);
        if !(tol > 0.0 && tol < 1.0) {
            return Err(invalid(format!("tol must lie in (0, 1), got {tol}")));
        }
        if let Some(b) = self.bound {
            if !(b >= 1.0) {
                return Err(invalid(format!("bound must be at least 1, got {b}")));
            }
        }
        Ok(RunConfig {
            d,
            alpha,
            a,
            a_tilde,
            s: self.s.unwrap_or_default(),
            t: self.t.unwrap_or_else(|| vec![0.1, 1.0, 10.0]),
            grid,
            family: self.family.unwrap_or_else(|| "gaussian-dilates".to_string()),
            sigma: self.sigma.unwrap_or_default(),
            eps: self.eps,
            tol,
            seed: self.seed.unwrap_or(0),
            beta: self.beta,
            delta_plus: self.delta_plus,
            bound: self.bound,
            samples: self.samples.unwrap_or(200),
            rx: self.rx,
            ry: self.ry,
            rxy: self.rxy,
            out_csv: self.out_csv,
            out_json: self.out_json,
        })
    }
}

fn set<T>(slot: &mut Option<T>, value: T) {
    if slot.is_none() {
        *slot = Some(value);
    }
}

/// A number, or `[factor]a*` meaning a multiple of the critical coupling.
pub fn parse_coupling(text: &str, d: u32, alpha: f64) -> Result<f64, CliError> {
    let t = text.trim();
    let Some(prefix) = t.strip_suffix("a*").or_else(|| t.strip_suffix("astar")) else {
        return parse_num("a", t);
    };
    let factor = match prefix.trim_end_matches('*') {
        "" | "+" => 1.0,
        "-" => -1.0,
        f => parse_num("a", f)?,
    };
    let crit = a_star(d, alpha).map_err(CliError::Library)?;
    Ok(factor * crit)
}

impl RunConfig {
    pub fn single_a(&self) -> Result<f64, CliError> {
        match self.a.as_slice() {
            [a] => Ok(*a),
            [] => Err(invalid("--a is required")),
            _ => Err(invalid("this command takes a single --a value")),
        }
    }

    pub fn s_list(&self) -> Result<&[f64], CliError> {
        if self.s.is_empty() {
            Err(invalid("--s is required"))
        } else {
            Ok(&self.s)
        }
    }

    pub fn sigma_single(&self) -> Result<Option<f64>, CliError> {
        match self.sigma.as_slice() {
            [] => Ok(None),
            [s] => Ok(Some(*s)),
            _ => Err(invalid("the power-window family takes a single --sigma")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn couplings_parse() {
        let crit = a_star(3, 1.0).unwrap();
        assert_eq!(parse_coupling("0.25", 3, 1.0).unwrap(), 0.25);
        assert_eq!(parse_coupling("a*", 3, 1.0).unwrap(), crit);
        assert_eq!(parse_coupling("0.5a*", 3, 1.0).unwrap(), 0.5 * crit);
        assert_eq!(parse_coupling("-a*", 3, 1.0).unwrap(), -crit);
        assert!(parse_coupling("x", 3, 1.0).is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let mut flags = Flags { d: Some(5), ..Default::default() };
        let map = BTreeMap::from([("d".to_string(), "3".to_string()), ("alpha".to_string(), "0.5".to_string())]);
        flags.fill_from(&map).unwrap();
        assert_eq!(flags.d, Some(5));
        assert_eq!(flags.alpha, Some(0.5));
        let bad = BTreeMap::from([("colour".to_string(), "red".to_string())]);
        assert!(flags.fill_from(&bad).is_err());
    }
}
