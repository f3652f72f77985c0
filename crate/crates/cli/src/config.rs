//! Run configuration: one flat namespace of dotted keys, read from a TOML
//! document. Unset keys fall back to defaults when used; flags are applied
//! on top of the file with [`RunConfig::overlay`].

use std::collections::BTreeMap;
use std::path::PathBuf;

use toml::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Str,
    Float,
    Int,
    IntList,
}

/// Every accepted key and its value type.
const SCHEMA: &[(&str, Kind)] = &[
    ("c_max", Kind::Int),
    ("grid.density", Kind::Int),
    ("group", Kind::Str),
    ("multiplier", Kind::Str),
    ("output.csv", Kind::Str),
    ("output.json", Kind::Str),
    ("scan.coeffs", Kind::Int),
    ("scan.k_list", Kind::IntList),
    ("scan.lemma_count", Kind::Int),
    ("scan.refinements", Kind::Int),
    ("tolerances.basis", Kind::Float),
    ("tolerances.kernel", Kind::Float),
    ("tolerances.quad", Kind::Float),
    ("weight", Kind::Float),
    ("workers", Kind::Int),
];

fn kind_of(key: &str) -> Result<Kind, CliError> {
    SCHEMA
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, t)| *t)
        .ok_or_else(|| CliError::Usage(format!("unknown configuration key '{key}'")))
}

/// Explicitly set configuration values; `None` means "use the default".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub group: Option<String>,
    pub multiplier: Option<String>,
    pub weight: Option<f64>,
    pub c_max: Option<i64>,
    pub kernel_tol: Option<f64>,
    pub quad_tol: Option<f64>,
    pub basis_tol: Option<f64>,
    pub grid_density: Option<usize>,
    pub k_list: Option<Vec<u32>>,
    pub coeffs: Option<usize>,
    pub refinements: Option<usize>,
    pub lemma_count: Option<usize>,
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub workers: Option<usize>,
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut BTreeMap<String, Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Table(t) => flatten(&key, t, out),
            other => {
                out.insert(key, other.clone());
            }
        }
    }
}

/// Checks a value against the key's type, widening integers to floats.
fn coerce(key: &str, v: Value) -> Result<Value, CliError> {
    let bad = || CliError::Usage(format!("configuration key '{key}' has the wrong type"));
    match (kind_of(key)?, v) {
        (Kind::Str, Value::String(s)) => Ok(Value::String(s)),
        (Kind::Float, Value::Float(x)) => Ok(Value::Float(x)),
        (Kind::Float, Value::Integer(i)) => Ok(Value::Float(i as f64)),
        (Kind::Int, Value::Integer(i)) if i >= 0 => Ok(Value::Integer(i)),
        (Kind::IntList, Value::Array(a)) => {
            if a.iter().all(|x| matches!(x, Value::Integer(i) if *i >= 0)) {
                Ok(Value::Array(a))
            } else {
                Err(bad())
            }
        }
        _ => Err(bad()),
    }
}

/// Flattened, type-checked `key -> value` pairs of a document.
fn entries(text: &str) -> Result<BTreeMap<String, Value>, CliError> {
    let table: toml::Table = text.parse().map_err(|e| CliError::Usage(format!("configuration: {e}")))?;
    let mut flat = BTreeMap::new();
    flatten("", &table, &mut flat);
    flat.into_iter().map(|(k, v)| Ok((k.clone(), coerce(&k, v)?))).collect()
}

fn render(entries: &BTreeMap<String, Value>) -> String {
    entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

/// The canonical text of a document: one `key = value` line per set key,
/// sorted, with values widened to their declared types.
pub fn normalize(text: &str) -> Result<String, CliError> {
    Ok(render(&entries(text)?))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut c = Self::default();
        for (key, v) in entries(text)? {
            let s = || v.as_str().map(str::to_string);
            let f = || v.as_float();
            let i = || v.as_integer();
            let u = || v.as_integer().map(|i| i as usize);
            match key.as_str() {
                "group" => c.group = s(),
                "multiplier" => c.multiplier = s(),
                "weight" => c.weight = f(),
                "c_max" => c.c_max = i(),
                "tolerances.kernel" => c.kernel_tol = f(),
                "tolerances.quad" => c.quad_tol = f(),
                "tolerances.basis" => c.basis_tol = f(),
                "grid.density" => c.grid_density = u(),
                "scan.k_list" => {
                    let list = v.as_array().expect("checked array");
                    let ks = list.iter().map(|x| u32::try_from(x.as_integer().unwrap_or(-1)).ok());
                    c.k_list = Some(ks.collect::<Option<Vec<u32>>>().ok_or_else(|| {
                        CliError::Usage("scan.k_list entries must fit in 32 bits".into())
                    })?);
                }
                "scan.coeffs" => c.coeffs = u(),
                "scan.refinements" => c.refinements = u(),
                "scan.lemma_count" => c.lemma_count = u(),
                "output.json" => c.json = s().map(PathBuf::from),
                "output.csv" => c.csv = s().map(PathBuf::from),
                "workers" => c.workers = u(),
                _ => unreachable!("schema covers every key"),
            }
        }
        Ok(c)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read configuration {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn to_entries(&self) -> BTreeMap<String, Value> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| Value::String(p.to_string_lossy().into_owned()));
        put("group", self.group.clone().map(Value::String));
        put("multiplier", self.multiplier.clone().map(Value::String));
        put("weight", self.weight.map(Value::Float));
        put("c_max", self.c_max.map(Value::Integer));
        put("tolerances.kernel", self.kernel_tol.map(Value::Float));
        put("tolerances.quad", self.quad_tol.map(Value::Float));
        put("tolerances.basis", self.basis_tol.map(Value::Float));
        put("grid.density", self.grid_density.map(|x| Value::Integer(x as i64)));
        put("scan.k_list", self.k_list.as_ref().map(|ks| Value::Array(ks.iter().map(|&k| Value::Integer(k.into())).collect())));
        put("scan.coeffs", self.coeffs.map(|x| Value::Integer(x as i64)));
        put("scan.refinements", self.refinements.map(|x| Value::Integer(x as i64)));
        put("scan.lemma_count", self.lemma_count.map(|x| Value::Integer(x as i64)));
        put("output.json", path(&self.json));
        put("output.csv", path(&self.csv));
        put("workers", self.workers.map(|x| Value::Integer(x as i64)));
        m
    }

    /// Canonical text; `RunConfig::parse` reads it back unchanged.
    pub fn serialize(&self) -> String {
        render(&self.to_entries())
    }

    /// `self` with every value set in `over` replaced.
    pub fn overlay(self, over: RunConfig) -> Self {
        macro_rules! pick {
            ($($f:ident),*) => { Self { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            group, multiplier, weight, c_max, kernel_tol, quad_tol, basis_tol, grid_density, k_list, coeffs,
            refinements, lemma_count, json, csv, workers
        )
    }
}
