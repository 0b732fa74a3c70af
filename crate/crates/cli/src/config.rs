//! Experiment configuration: a JSON file, overridden field by field by flags.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use coopstore::field::{Field, FieldSpec, FiniteField};
use coopstore::params::{CodeParams, NodeId};

use crate::CliError;

pub const SEED_ENV: &str = "COOPSTORE_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Stable,
    CodeA,
    CodeB,
}

impl Variant {
    pub fn tag(self) -> u8 {
        match self {
            Variant::Stable => 0,
            Variant::CodeA => 1,
            Variant::CodeB => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        [Variant::Stable, Variant::CodeA, Variant::CodeB].into_iter().find(|v| v.tag() == tag)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Stable => "stable",
            Variant::CodeA => "code-a",
            Variant::CodeB => "code-b",
        }
    }
}

/// `n=6,k=3,d=3,t=2`; any subset of the keys. Configs may give the same
/// string or an object.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "TextOr<ParamObject>")]
pub struct ParamArgs {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub d: Option<usize>,
    pub t: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamObject {
    n: Option<usize>,
    k: Option<usize>,
    d: Option<usize>,
    t: Option<usize>,
}

/// A config value written either in flag syntax or as a JSON object.
#[derive(Deserialize)]
#[serde(untagged)]
enum TextOr<T> {
    Text(String),
    Object(T),
}

impl TryFrom<TextOr<ParamObject>> for ParamArgs {
    type Error = String;

    fn try_from(v: TextOr<ParamObject>) -> Result<Self, String> {
        match v {
            TextOr::Text(s) => s.parse(),
            TextOr::Object(ParamObject { n, k, d, t }) => Ok(ParamArgs { n, k, d, t }),
        }
    }
}

impl TryFrom<TextOr<FieldSpec>> for FieldArg {
    type Error = String;

    fn try_from(v: TextOr<FieldSpec>) -> Result<Self, String> {
        match v {
            TextOr::Text(s) => s.parse(),
            TextOr::Object(spec) => Ok(FieldArg(spec)),
        }
    }
}

impl ParamArgs {
    fn overlay(self, top: ParamArgs) -> ParamArgs {
        ParamArgs { n: top.n.or(self.n), k: top.k.or(self.k), d: top.d.or(self.d), t: top.t.or(self.t) }
    }
}

impl FromStr for ParamArgs {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = ParamArgs::default();
        for (key, value) in key_values(s)? {
            let v: usize = value.parse().map_err(|_| format!("{key}={value}: not a number"))?;
            let slot = match key {
                "n" => &mut out.n,
                "k" => &mut out.k,
                "d" => &mut out.d,
                "t" => &mut out.t,
                other => return Err(format!("unknown parameter {other:?} (expected n, k, d, t)")),
            };
            *slot = Some(v);
        }
        Ok(out)
    }
}

/// `p=11`, `m=4`, `2^4` or `m=4,poly=0x13`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TextOr<FieldSpec>")]
pub struct FieldArg(pub FieldSpec);

impl FromStr for FieldArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(m) = s.strip_prefix("2^") {
            return Ok(FieldArg(FieldSpec::binary(m.parse().map_err(|_| format!("bad degree in {s:?}"))?)));
        }
        let (mut p, mut m, mut poly) = (None, None, None);
        for (key, value) in key_values(s)? {
            match key {
                "p" => p = Some(value.parse::<u64>().map_err(|_| format!("p={value}: not a number"))?),
                "m" => m = Some(value.parse::<u32>().map_err(|_| format!("m={value}: not a number"))?),
                "poly" => {
                    let hex = value.trim_start_matches("0x");
                    poly = Some(u64::from_str_radix(hex, 16).map_err(|_| format!("poly={value}: not hex"))?);
                }
                other => return Err(format!("unknown field key {other:?} (expected p, m, poly)")),
            }
        }
        match (p, m, poly) {
            (Some(p), None, None) => Ok(FieldArg(FieldSpec::prime(p))),
            (None, Some(m), None) => Ok(FieldArg(FieldSpec::binary(m))),
            (None, Some(m), Some(poly)) => Ok(FieldArg(FieldSpec::BinaryExtension { m, poly })),
            _ => Err(format!("{s:?}: give either p=<prime> or m=<degree>[,poly=<hex>]")),
        }
    }
}

fn key_values(s: &str) -> Result<Vec<(&str, &str)>, String> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.split_once('=').map(|(k, v)| (k.trim(), v.trim())).ok_or_else(|| format!("{p:?}: expected key=value")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvePlacement {
    #[serde(default)]
    pub observed: Vec<NodeId>,
    #[serde(default)]
    pub downloads: Vec<NodeId>,
}

/// The on-disk config; every field optional.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub params: Option<ParamArgs>,
    pub field: Option<FieldArg>,
    pub variant: Option<Variant>,
    pub seed: Option<u64>,
    pub omega: Option<u64>,
    pub parity: Option<usize>,
    pub eve: Option<Vec<EvePlacement>>,
    /// `(l1, l2)` sizes to sweep; absent means every size with `l1 + l2 <= k - 1`.
    pub sweep: Option<Vec<(usize, usize)>>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Values given on the command line; these win over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub params: Option<ParamArgs>,
    pub field: Option<FieldArg>,
    pub variant: Option<Variant>,
    pub seed: Option<u64>,
    pub omega: Option<u64>,
    pub parity: Option<usize>,
    pub eve: Option<EvePlacement>,
    pub sweep: Option<Vec<(usize, usize)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedSource {
    Flag,
    Config,
    Env,
    Default,
}

/// A fully resolved, validated configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub variant: Variant,
    pub params: CodeParams,
    pub field: FieldSpec,
    pub seed: u64,
    pub seed_source: SeedSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity: Option<usize>,
    pub eve: Vec<EvePlacement>,
    pub sweep: Option<Vec<(usize, usize)>>,
}

impl ExperimentConfig {
    pub fn resolve(file: Option<&Path>, flags: Overrides) -> Result<Self, CliError> {
        let file = match file {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let env_seed = match std::env::var(SEED_ENV) {
            Ok(v) => Some(v.trim().parse::<u64>().map_err(|_| CliError::Config(format!("{SEED_ENV}={v:?} is not a u64")))?),
            Err(_) => None,
        };
        let (seed, seed_source) = match (flags.seed, file.seed, env_seed) {
            (Some(s), _, _) => (s, SeedSource::Flag),
            (None, Some(s), _) => (s, SeedSource::Config),
            (None, None, Some(s)) => (s, SeedSource::Env),
            (None, None, None) => (0, SeedSource::Default),
        };
        let variant = flags.variant.or(file.variant).unwrap_or(Variant::Stable);
        let given = file.params.unwrap_or_default().overlay(flags.params.unwrap_or_default());
        let field = flags.field.or(file.field).map(|f| f.0).unwrap_or(FieldSpec::prime(11));
        let q = Field::new(field)?.order();
        let params = resolve_params(variant, given, q)?;
        let eve = match flags.eve {
            Some(e) => vec![e],
            None => file.eve.unwrap_or_default(),
        };
        Ok(ExperimentConfig {
            variant,
            params,
            field,
            seed,
            seed_source,
            omega: flags.omega.or(file.omega),
            parity: flags.parity.or(file.parity),
            eve,
            sweep: flags.sweep.or(file.sweep),
        })
    }

    pub fn field(&self) -> Result<Field, CliError> {
        Ok(Field::new(self.field)?)
    }
}

fn resolve_params(variant: Variant, p: ParamArgs, q: u64) -> Result<CodeParams, CliError> {
    let bad = |msg: String| CliError::Config(msg);
    match variant {
        Variant::CodeA => {
            // k = t = 2, n = d + 2
            let d = p.d.unwrap_or(3);
            if p.k.is_some_and(|k| k != 2) || p.t.is_some_and(|t| t != 2) || p.n.is_some_and(|n| n != d + 2) {
                return Err(bad(format!("code-a fixes k = t = 2 and n = d + 2 = {}", d + 2)));
            }
            Ok(CodeParams::mscr(d + 2, 2, d, 2, 2 * d, q)?)
        }
        Variant::Stable | Variant::CodeB => {
            let k = p.k.unwrap_or(3);
            let t = p.t.unwrap_or(2);
            let d = p.d.unwrap_or(k);
            let n = p.n.unwrap_or(k + t + 1);
            if d != k {
                return Err(bad(format!("{} is implemented for d = k only (got d = {d}, k = {k})", variant.name())));
            }
            Ok(CodeParams::scalar_d_equals_k(n, k, t, q)?)
        }
    }
}

/// Parses `l1,l2`.
pub fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("{s:?}: expected l1,l2"))?;
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("{x:?} is not a number"));
    Ok((num(a)?, num(b)?))
}

/// A comma-separated node list, `1,2,3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeList(pub Vec<NodeId>);

impl FromStr for NodeList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| p.trim().parse::<NodeId>().map_err(|_| format!("{p:?} is not a node id")))
            .collect::<Result<_, _>>()
            .map(NodeList)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_params_and_fields() {
        let p: ParamArgs = "n=6,k=3,d=3,t=2".parse().unwrap();
        assert_eq!(p, ParamArgs { n: Some(6), k: Some(3), d: Some(3), t: Some(2) });
        assert!("n=6,x=1".parse::<ParamArgs>().is_err());
        assert_eq!("p=11".parse::<FieldArg>().unwrap().0, FieldSpec::prime(11));
        assert_eq!("2^4".parse::<FieldArg>().unwrap().0, FieldSpec::binary(4));
        assert_eq!("m=4,poly=0x13".parse::<FieldArg>().unwrap().0, FieldSpec::BinaryExtension { m: 4, poly: 0x13 });
        assert!("p=11,m=4".parse::<FieldArg>().is_err());
    }

    #[test]
    fn config_accepts_strings_or_objects() {
        let a: ConfigFile = serde_json::from_str(r#"{"params": "n=6,k=3", "field": "m=4"}"#).unwrap();
        let b: ConfigFile =
            serde_json::from_str(r#"{"params": {"n": 6, "k": 3}, "field": {"kind": "binary-extension", "m": 4, "poly": 19}}"#)
                .unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.field, b.field);
        assert!(serde_json::from_str::<ConfigFile>(r#"{"params": "q=3"}"#).is_err());
        assert!(serde_json::from_str::<ConfigFile>(r#"{"colour": 1}"#).is_err());
    }

    #[test]
    fn flags_override_file() {
        let base = ParamArgs { n: Some(7), k: Some(3), d: None, t: Some(2) };
        let top = ParamArgs { n: Some(6), ..Default::default() };
        assert_eq!(base.overlay(top), ParamArgs { n: Some(6), k: Some(3), d: None, t: Some(2) });
    }

    #[test]
    fn code_a_shape() {
        let p = resolve_params(Variant::CodeA, ParamArgs { d: Some(3), ..Default::default() }, 11).unwrap();
        assert_eq!((p.n, p.k, p.d, p.t, p.alpha, p.file_size), (5, 2, 3, 2, 3, 6));
        assert!(resolve_params(Variant::CodeA, ParamArgs { k: Some(3), ..Default::default() }, 11).is_err());
        assert!(resolve_params(Variant::Stable, ParamArgs { d: Some(4), ..Default::default() }, 11).is_err());
    }
}
