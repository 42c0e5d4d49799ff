//! Family files, canonical JSON, hashing, and tool configuration.
//!
//! A family file is
//!
//! ```json
//! {"D":2,"d":1,"n":1,"scalars":"rational","tensors":[{"im":["0/1","0/1","0/1","0/1"],"re":["1/1","0/1","0/1","1/1"]}],"version":1}
//! ```
//!
//! Each tensor is flat and row-major over its `2n` axes in port order
//! `(−e₁, +e₁, …, −eₙ, +eₙ)`. Float scalars are JSON numbers; rational
//! scalars are strings `"p/q"` (a bare `"p"` is accepted on input).
//! Canonical output has sorted keys, no whitespace, and shortest round-trip
//! float formatting, so write → read → write is byte-identical.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::contraction::{Family, Limits, TensorFamily};
use crate::error::{Error, Result};
use crate::linalg::{EngineTag, RankEngineConfig};
use crate::scalar::{format_rational, parse_rational, ExactScalar, C64};

pub const FAMILY_FORMAT_VERSION: u64 = 1;
pub const REPORT_FORMAT_VERSION: u64 = 1;

/// Compact JSON with object keys in sorted order.
pub fn canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    // serde_json's default map is ordered by key
    let v = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| Error::Parse(e.to_string()))
}

pub fn family_to_value(family: &Family) -> Value {
    let (scalars, tensors): (&str, Vec<Value>) = match family {
        Family::Float(f) => ("float", f.tensors().iter().map(|t| planes(t.data(), |z| json!(z.re), |z| json!(z.im))).collect()),
        Family::Rational(f) => (
            "rational",
            f.tensors()
                .iter()
                .map(|t| planes(t.data(), |z| json!(format_rational(&z.re)), |z| json!(format_rational(&z.im))))
                .collect(),
        ),
    };
    json!({
        "version": FAMILY_FORMAT_VERSION,
        "n": family.n(),
        "D": family.bond_dim(),
        "d": family.d(),
        "scalars": scalars,
        "tensors": tensors,
    })
}

fn planes<T>(data: &[T], re: impl Fn(&T) -> Value, im: impl Fn(&T) -> Value) -> Value {
    json!({ "re": data.iter().map(&re).collect::<Vec<_>>(), "im": data.iter().map(&im).collect::<Vec<_>>() })
}

/// Canonical family JSON, without a trailing newline.
pub fn write_family(family: &Family) -> String {
    canonical_json(&family_to_value(family)).expect("family JSON is always serializable")
}

/// Lowercase hex SHA-256 of the canonical family JSON.
pub fn family_hash(family: &Family) -> String {
    Sha256::digest(write_family(family).as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::Parse(format!("missing field {key:?}")))
}

fn uint(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    field(obj, key)?
        .as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| Error::Parse(format!("field {key:?} must be a non-negative integer")))
}

pub fn read_family(text: &str) -> Result<Family> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    let obj = v.as_object().ok_or_else(|| Error::Parse("family file must be a JSON object".into()))?;
    let version = field(obj, "version")?.as_u64();
    if version != Some(FAMILY_FORMAT_VERSION) {
        return Err(Error::Parse(format!("unsupported family file version {}", field(obj, "version")?)));
    }
    let n = uint(obj, "n")?;
    let bond = uint(obj, "D")?;
    let d = uint(obj, "d")?;
    if n == 0 || bond == 0 || d == 0 {
        return Err(Error::InvalidFamily(format!("need n, D, d ≥ 1, got n = {n}, D = {bond}, d = {d}")));
    }
    let len = u32::try_from(2 * n)
        .ok()
        .and_then(|e| bond.checked_pow(e))
        .filter(|l| l.saturating_mul(d) <= 1 << 26)
        .ok_or_else(|| Error::InvalidFamily("family too large".into()))?;
    let tensors = field(obj, "tensors")?.as_array().ok_or_else(|| Error::Parse("\"tensors\" must be an array".into()))?;
    if tensors.len() != d {
        return Err(Error::InvalidFamily(format!("d = {d} but {} tensors present", tensors.len())));
    }
    let plane = |t: &Value, k: usize, key: &str| -> Result<Vec<Value>> {
        let arr = t
            .get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse(format!("tensor {k} needs an array {key:?}")))?;
        if arr.len() != len {
            return Err(Error::InvalidFamily(format!("tensor {k} {key:?} has {} entries, expected D^(2n) = {len}", arr.len())));
        }
        Ok(arr.clone())
    };
    match field(obj, "scalars")?.as_str() {
        Some("float") => {
            let num = |x: &Value| x.as_f64().ok_or_else(|| Error::Parse(format!("{x} is not a number")));
            let flats = tensors
                .iter()
                .enumerate()
                .map(|(k, t)| {
                    let (re, im) = (plane(t, k, "re")?, plane(t, k, "im")?);
                    re.iter().zip(&im).map(|(a, b)| Ok(C64::new(num(a)?, num(b)?))).collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Family::Float(TensorFamily::from_flat(n, bond, flats)?))
        }
        Some("rational") => {
            let rat = |x: &Value| {
                x.as_str().ok_or_else(|| Error::Parse(format!("rational entry {x} must be a string \"p/q\""))).and_then(parse_rational)
            };
            let flats = tensors
                .iter()
                .enumerate()
                .map(|(k, t)| {
                    let (re, im) = (plane(t, k, "re")?, plane(t, k, "im")?);
                    re.iter().zip(&im).map(|(a, b)| Ok(ExactScalar::new(rat(a)?, rat(b)?))).collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Family::Rational(TensorFamily::from_flat(n, bond, flats)?))
        }
        _ => Err(Error::Parse("\"scalars\" must be \"float\" or \"rational\"".into())),
    }
}

/// Optional settings read from a TOML file:
///
/// ```toml
/// [engine]
/// mode = "rational"
/// tolerance = 1e-9
///
/// [limits]
/// max_enumeration = 1000000
/// max_exposed_entries = 1048576
/// max_candidate_entries = 33554432
/// ```
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToolConfig {
    #[serde(default)]
    pub engine: EngineSection,
    #[serde(default)]
    pub limits: LimitsSection,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineSection {
    pub mode: Option<EngineTag>,
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsSection {
    pub max_enumeration: Option<u64>,
    pub max_exposed_entries: Option<u64>,
    pub max_candidate_entries: Option<u64>,
}

impl ToolConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("invalid config: {e}")))
    }

    /// Config values over the defaults, then `PEPSINJ_MAX_*` environment
    /// variables over those.
    pub fn limits(&self) -> Result<Limits> {
        let mut l = Limits::default();
        let s = &self.limits;
        if let Some(v) = s.max_enumeration {
            l.max_enumeration = v;
        }
        if let Some(v) = s.max_exposed_entries {
            l.max_exposed_entries = v;
        }
        if let Some(v) = s.max_candidate_entries {
            l.max_candidate_entries = v;
        }
        let env = Limits::from_env()?;
        for (var, slot, value) in [
            (Limits::ENV_MAX_ENUMERATION, &mut l.max_enumeration, env.max_enumeration),
            (Limits::ENV_MAX_EXPOSED, &mut l.max_exposed_entries, env.max_exposed_entries),
            (Limits::ENV_MAX_CANDIDATES, &mut l.max_candidate_entries, env.max_candidate_entries),
        ] {
            if std::env::var_os(var).is_some() {
                *slot = value;
            }
        }
        Ok(l)
    }

    /// Engine from the config, with explicit flags taking precedence.
    pub fn engine(&self, mode: Option<EngineTag>, tolerance: Option<f64>) -> Result<RankEngineConfig> {
        let mut cfg = RankEngineConfig::default();
        if let Some(m) = mode.or(self.engine.mode) {
            cfg.mode = m;
        }
        if let Some(t) = tolerance.or(self.engine.tolerance) {
            cfg.tolerance = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate, FamilyKind, FamilyRecipe};

    fn sample(kind: FamilyKind, n: usize, bond: usize, d: Option<usize>) -> Family {
        generate(&FamilyRecipe::resolve(kind, Some(n), Some(bond), d, Some(5)).unwrap()).unwrap()
    }

    #[test]
    fn round_trip_is_byte_identical() {
        for fam in [
            sample(FamilyKind::RandomGaussian, 2, 2, Some(3)),
            sample(FamilyKind::RandomInteger, 1, 3, Some(2)),
            sample(FamilyKind::FullBasis, 1, 2, None),
            sample(FamilyKind::IdentityOnly, 2, 2, None),
        ] {
            let text = write_family(&fam);
            let back = read_family(&text).unwrap();
            assert_eq!(back, fam);
            assert_eq!(write_family(&back), text);
        }
    }

    #[test]
    fn canonical_layout() {
        let fam = generate(&FamilyRecipe::resolve(FamilyKind::IdentityOnly, Some(1), Some(2), None, None).unwrap()).unwrap();
        assert_eq!(
            write_family(&fam),
            r#"{"D":2,"d":1,"n":1,"scalars":"rational","tensors":[{"im":["0/1","0/1","0/1","0/1"],"re":["1/1","0/1","0/1","1/1"]}],"version":1}"#
        );
        assert_eq!(family_hash(&fam).len(), 64);
        assert_eq!(family_hash(&fam), family_hash(&read_family(&write_family(&fam)).unwrap()));
    }

    #[test]
    fn hash_is_sha256_of_canonical_text() {
        // SHA-256 of the empty string, as a check of the hex encoding
        let empty: String = Sha256::digest(b"").iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(empty, "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn accepts_integers_and_bare_rationals() {
        let text = r#"{"version":1,"n":1,"D":1,"d":2,"scalars":"rational","tensors":[{"re":["3"],"im":["-1/2"]},{"re":["0"],"im":["2/4"]}]}"#;
        let fam = read_family(text).unwrap();
        assert!(write_family(&fam).contains(r#""re":["3/1"]"#));
        assert!(write_family(&fam).contains(r#""im":["1/2"]"#));
        let float = r#"{"version":1,"n":1,"D":1,"d":1,"scalars":"float","tensors":[{"re":[1],"im":[0.5]}]}"#;
        assert!(matches!(read_family(float).unwrap(), Family::Float(_)));
    }

    #[test]
    fn malformed_files_are_rejected() {
        let base = r#"{"version":1,"n":1,"D":1,"d":1,"scalars":"float","tensors":[{"re":[1],"im":[0]}]}"#;
        assert!(read_family(base).is_ok());
        for bad in [
            base.replace(r#""version":1"#, r#""version":2"#),
            base.replace(r#""d":1"#, r#""d":2"#),
            base.replace(r#""re":[1]"#, r#""re":[1,2]"#),
            base.replace(r#""float""#, r#""complex""#),
            base.replace(r#""n":1"#, r#""n":0"#),
            base.replace(r#""re":[1]"#, r#""re":["x"]"#),
            "not json".to_string(),
            "[]".to_string(),
        ] {
            assert!(read_family(&bad).is_err(), "{bad}");
        }
        let rat = r#"{"version":1,"n":1,"D":1,"d":1,"scalars":"rational","tensors":[{"re":["1/0"],"im":["0"]}]}"#;
        assert!(read_family(rat).is_err());
    }

    #[test]
    fn config_parsing_and_precedence() {
        let cfg = ToolConfig::parse("[engine]\nmode = \"rational\"\n[limits]\nmax_enumeration = 10\n").unwrap();
        assert_eq!(cfg.engine(None, None).unwrap().mode, EngineTag::Rational);
        assert_eq!(cfg.engine(Some(EngineTag::Float), Some(1e-6)).unwrap(), RankEngineConfig::float(1e-6));
        if std::env::var_os(Limits::ENV_MAX_ENUMERATION).is_none() {
            assert_eq!(cfg.limits().unwrap().max_enumeration, 10);
        }
        assert!(ToolConfig::parse("[engine]\nspeed = 3\n").is_err());
        assert!(cfg.engine(None, Some(-1.0)).is_err());
    }
}
