//! JSON encodings of every artifact. Rationals are written as `"p/q"`
//! strings and floats as JSON numbers (shortest round-trip form).

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::algebroid::{GroupJetSection, JetSection, SemidirectSection, TrivialSection};
use crate::finite_groupoid::{GroupoidTable, Subgroupoid};
use crate::flows::{GroupPath, TrivialElement};
use crate::jet_groupoid::JetArrow;
use crate::linalg::Mat;
use crate::linear_groupoid::{LinearOperator, VectorSection};
use crate::multijet::{MatrixJet, TruncatedJet};
use crate::poly::{MatrixPoly, MultiIndex, Poly, PolyVectorField};
use crate::scalar::{format_rational, parse_rational, Scalar, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed input: {0}")]
pub struct JsonError(pub String);

pub type JsonResult<T> = Result<T, JsonError>;

fn bad<T>(msg: impl Into<String>) -> JsonResult<T> {
    Err(JsonError(msg.into()))
}

pub trait ToJson {
    fn to_json(&self) -> Value;
}

pub trait FromJson: Sized {
    fn from_json(v: &Value) -> JsonResult<Self>;
}

/// Parses a JSON text into any [`FromJson`] type.
pub fn parse<T: FromJson>(text: &str) -> JsonResult<T> {
    let v: Value = serde_json::from_str(text).map_err(|e| JsonError(e.to_string()))?;
    T::from_json(&v)
}

/// Scalars with a JSON encoding.
pub trait JsonScalar: Scalar {
    fn encode(&self) -> Value;
    fn decode(v: &Value) -> JsonResult<Self>;
}

impl JsonScalar for Q {
    fn encode(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn decode(v: &Value) -> JsonResult<Self> {
        match v {
            Value::String(s) => parse_rational(s).ok_or_else(|| JsonError(format!("bad rational {s:?}"))),
            Value::Number(n) if n.is_i64() => Ok(Q::from_integer(n.as_i64().expect("i64").into())),
            _ => bad(format!("expected a rational \"p/q\", got {v}")),
        }
    }
}

impl JsonScalar for f64 {
    fn encode(&self) -> Value {
        json!(self)
    }

    fn decode(v: &Value) -> JsonResult<Self> {
        v.as_f64().ok_or_else(|| JsonError(format!("expected a number, got {v}")))
    }
}

fn field<'a>(v: &'a Value, key: &str) -> JsonResult<&'a Value> {
    v.get(key).ok_or_else(|| JsonError(format!("missing field {key:?}")))
}

fn usize_field(v: &Value, key: &str) -> JsonResult<usize> {
    field(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| JsonError(format!("field {key:?} must be a non-negative integer")))
}

fn u64_of(v: &Value) -> JsonResult<u64> {
    v.as_u64().ok_or_else(|| JsonError(format!("expected an arrow id, got {v}")))
}

fn array<'a>(v: &'a Value, what: &str) -> JsonResult<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| JsonError(format!("{what} must be an array")))
}

fn object<'a>(v: &'a Value, what: &str) -> JsonResult<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| JsonError(format!("{what} must be an object")))
}

fn scalars<T: JsonScalar>(v: &Value, what: &str) -> JsonResult<Vec<T>> {
    array(v, what)?.iter().map(T::decode).collect()
}

fn encode_vec<T: JsonScalar>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(JsonScalar::encode).collect())
}

fn multi_index(key: &str, n: usize) -> JsonResult<MultiIndex> {
    let a = MultiIndex::parse_key(key).ok_or_else(|| JsonError(format!("bad multi-index {key:?}")))?;
    if a.dim() != n {
        return bad(format!("multi-index {key:?} is not over {n} variables"));
    }
    Ok(a)
}

fn check_kind(v: &Value, kind: &str) -> JsonResult<()> {
    match v.get("kind") {
        None => Ok(()),
        Some(Value::String(k)) if k == kind => Ok(()),
        Some(other) => bad(format!("expected kind {kind:?}, got {other}")),
    }
}

impl ToJson for Poly {
    fn to_json(&self) -> Value {
        let terms: Map<String, Value> = self
            .terms()
            .iter()
            .map(|(a, c)| (a.key(), c.encode()))
            .collect();
        json!({ "nvars": self.nvars(), "terms": terms })
    }
}

impl FromJson for Poly {
    fn from_json(v: &Value) -> JsonResult<Self> {
        let n = usize_field(v, "nvars")?;
        let mut terms = Vec::new();
        for (k, c) in object(field(v, "terms")?, "terms")? {
            terms.push((multi_index(k, n)?, Q::decode(c)?));
        }
        Ok(Poly::from_terms(n, terms))
    }
}

impl ToJson for PolyVectorField {
    fn to_json(&self) -> Value {
        let comps: Vec<Value> = self.components().iter().map(ToJson::to_json).collect();
        json!({ "dim": self.dim(), "components": comps })
    }
}

impl FromJson for PolyVectorField {
    fn from_json(v: &Value) -> JsonResult<Self> {
        let n = usize_field(v, "dim")?;
        let comps: Vec<Poly> = array(field(v, "components")?, "components")?
            .iter()
            .map(Poly::from_json)
            .collect::<JsonResult<_>>()?;
        if comps.len() != n || comps.iter().any(|p| p.nvars() != n) {
            return bad(format!("vector field on R^{n} needs {n} polynomials in {n} variables"));
        }
        Ok(PolyVectorField::new(comps))
    }
}

fn mat_to_json<T: JsonScalar>(m: &Mat<T>) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| m[(i, j)].encode()).collect()))
            .collect(),
    )
}

fn mat_from_json<T: JsonScalar>(v: &Value, size: Option<usize>) -> JsonResult<Mat<T>> {
    let rows: Vec<Vec<T>> = array(v, "matrix")?
        .iter()
        .map(|r| scalars(r, "matrix row"))
        .collect::<JsonResult<_>>()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != rows[0].len()) || n == 0 {
        return bad("matrix rows must be non-empty and equally long");
    }
    if let Some(s) = size {
        if n != s || rows[0].len() != s {
            return bad(format!("expected a {s}×{s} matrix"));
        }
    }
    Ok(Mat::from_rows(rows))
}

impl ToJson for MatrixPoly {
    fn to_json(&self) -> Value {
        let m = self.size();
        let mut coeffs: BTreeMap<MultiIndex, Mat<Q>> = BTreeMap::new();
        for (idx, p) in self.entries().iter().enumerate() {
            for (a, c) in p.terms() {
                coeffs.entry(a.clone()).or_insert_with(|| Mat::zeros(m, m))[(idx / m, idx % m)] =
                    c.clone();
            }
        }
        let coeffs: Map<String, Value> =
            coeffs.iter().map(|(a, c)| (a.key(), mat_to_json(c))).collect();
        json!({ "nvars": self.nvars(), "size": m, "coeffs": coeffs })
    }
}

impl FromJson for MatrixPoly {
    fn from_json(v: &Value) -> JsonResult<Self> {
        let n = usize_field(v, "nvars")?;
        let m = usize_field(v, "size")?;
        let mut entries = vec![Poly::zero(n); m * m];
        for (k, c) in object(field(v, "coeffs")?, "coeffs")? {
            let a = multi_index(k, n)?;
            let c: Mat<Q> = mat_from_json(c, Some(m))?;
            for (idx, e) in entries.iter_mut().enumerate() {
                let x = &c.as_slice()[idx];
                *e = e.add(&Poly::monomial(n, a.clone(), x.clone()));
            }
        }
        Ok(MatrixPoly::new(n, m, entries))
    }
}

impl<T: JsonScalar> ToJson for TruncatedJet<T> {
    fn to_json(&self) -> Value {
        let coeffs: Map<String, Value> = self
            .coeffs()
            .iter()
            .map(|(a, c)| (a.key(), encode_vec(c)))
            .collect();
        json!({
            "n": self.n(),
            "m": self.m(),
            "k": self.k(),
            "base": encode_vec(self.base()),
            "value": encode_vec(&self.value()),
            "coeffs": coeffs,
        })
    }
}

impl<T: JsonScalar> FromJson for TruncatedJet<T> {
    fn from_json(v: &Value) -> JsonResult<Self> {
        let n = usize_field(v, "n")?;
        let m = usize_field(v, "m")?;
        let k = usize_field(v, "k")? as u32;
        let base = scalars(field(v, "base")?, "base")?;
        let value = scalars(field(v, "value")?, "value")?;
        let mut coeffs = BTreeMap::new();
        if let Some(c) = v.get("coeffs") {
            for (key, c) in object(c, "coeffs")? {
                coeffs.insert(multi_index(key, n)?, scalars(c, "coefficient")?);
            }
        }
        TruncatedJet::new(n, m, k, base, value, coeffs).map_err(|e| JsonError(e.to_string()))
    }
}

impl<T: JsonScalar> ToJson for JetArrow<T> {
    fn to_json(&self) -> Value {
        let mut v = self.jet().to_json();
        v["kind"] = json!("jet_arrow");
        v
    }
}

/// Decoding checks invertibility; a singular jet is malformed as an arrow.
impl<T: JsonScalar> FromJson for JetArrow<T> {
    fn from_json(v: &Value) -> JsonResult<Self> {
        check_kind(v, "jet_arrow")?;
        JetArrow::new(TruncatedJet::from_json(v)?).map_err(|e| JsonError(e.to_string()))
    }
}

impl<T: JsonScalar> ToJson for MatrixJet<T> {
    fn to_json(&self) -> Value {
        let mut v = self.jet().to_json();
        v["kind"] = json!("matrix_jet");
        v["size"] = json!(self.size());
        v
    }
}

impl<T: JsonScalar> FromJson for MatrixJet<T> {
    fn from_json(v: &Value) -> JsonResult<Self> {
        check_kind(v, "matrix_jet")?;
        let size = usize_field(v, "size")?;
        MatrixJet::from_jet(size, TruncatedJet::from_json(v)?).map_err(|e| JsonError(e.to_string()))
    }
}

impl ToJson for GroupoidTable {
    fn to_json(&self) -> Value {
        let ids = self.ids();
        let map = |f: &dyn Fn(u64) -> u64| -> Map<String, Value> {
            ids.iter().map(|&a| (a.to_string(), json!(f(a)))).collect()
        };
        let comp: Vec<Value> = self
            .composition_entries()
            .into_iter()
            .map(|(g, h, gh)| json!([g, h, gh]))
            .collect();
        json!({
            "arrows": ids,
            "units": self.unit_ids(),
            "src": map(&|a| self.src(a).expect("own id")),
            "tgt": map(&|a| self.tgt(a).expect("own id")),
            "comp": comp,
            "inv": map(&|a| self.inv(a).expect("own id")),
        })
    }
}

fn id_map(v: &Value, key: &str) -> JsonResult<BTreeMap<u64, u64>> {
    object(field(v, key)?, key)?
        .iter()
        .map(|(k, x)| {
            let a = k
                .parse::<u64>()
                .map_err(|_| JsonError(format!("{key}: bad arrow id {k:?}")))?;
            Ok((a, u64_of(x)?))
        })
        .collect()
}

impl FromJson for GroupoidTable {
    fn from_json(v: &Value) -> JsonResult<Self> {
        let arrows: Vec<u64> = array(field(v, "arrows")?, "arrows")?
            .iter()
            .map(u64_of)
            .collect::<JsonResult<_>>()?;
        let units: Vec<u64> = array(field(v, "units")?, "units")?
            .iter()
            .map(u64_of)
            .collect::<JsonResult<_>>()?;
        let comp = array(field(v, "comp")?, "comp")?
            .iter()
            .map(|t| {
                let t = array(t, "comp entry")?;
                if t.len() != 3 {
                    return bad("comp entries are [g, h, gh]");
                }
                Ok((u64_of(&t[0])?, u64_of(&t[1])?, u64_of(&t[2])?))
            })
            .collect::<JsonResult<Vec<_>>>()?;
        GroupoidTable::from_parts(
            &arrows,
            &units,
            &id_map(v, "src")?,
            &id_map(v, "tgt")?,
            &comp,
            &id_map(v, "inv")?,
        )
        .map_err(|e| JsonError(e.to_string()))
    }
}

/// `{"members": [ids]}` relative to a parent table.
pub fn subgroupoid_to_json(parent: &GroupoidTable, s: &Subgroupoid) -> Value {
    let members: Vec<u64> = parent
        .ids()
        .iter()
        .enumerate()
        .filter(|(i, _)| s.contains_index(*i))
        .map(|(_, &a)| a)
        .collect();
    json!({ "members": members })
}

/// Member ids of a subgroupoid document; validation against the parent is
/// left to the caller, where failure is a domain error.
pub fn subgroupoid_members(v: &Value) -> JsonResult<Vec<u64>> {
    array(field(v, "members")?, "members")?
        .iter()
        .map(u64_of)
        .collect()
}

impl ToJson for TrivialSection {
    fn to_json(&self) -> Value {
        json!({ "kind": "trivial_section", "theta": self.theta.to_json(), "h": self.h.to_json() })
    }
}

impl FromJson for TrivialSection {
    fn from_json(v: &Value) -> JsonResult<Self> {
        check_kind(v, "trivial_section")?;
        let theta = PolyVectorField::from_json(field(v, "theta")?)?;
        let h = MatrixPoly::from_json(field(v, "h")?)?;
        TrivialSection::new(theta, h).map_err(|e| JsonError(e.to_string()))
    }
}

impl ToJson for LinearOperator {
    fn to_json(&self) -> Value {
        json!({ "kind": "linear_operator", "theta": self.theta.to_json(), "h": self.h.to_json() })
    }
}

impl FromJson for LinearOperator {
    fn from_json(v: &Value) -> JsonResult<Self> {
        check_kind(v, "linear_operator")?;
        let theta = PolyVectorField::from_json(field(v, "theta")?)?;
        let h = MatrixPoly::from_json(field(v, "h")?)?;
        LinearOperator::new(theta, h).map_err(|e| JsonError(e.to_string()))
    }
}

impl ToJson for VectorSection {
    fn to_json(&self) -> Value {
        let comps: Vec<Value> = self.components().iter().map(ToJson::to_json).collect();
        json!({ "kind": "vector_section", "nvars": self.nvars(), "components": comps })
    }
}

impl FromJson for VectorSection {
    fn from_json(v: &Value) -> JsonResult<Self> {
        check_kind(v, "vector_section")?;
        let n = usize_field(v, "nvars")?;
        let comps = array(field(v, "components")?, "components")?
            .iter()
            .map(Poly::from_json)
            .collect::<JsonResult<_>>()?;
        VectorSection::new(n, comps).map_err(|e| JsonError(e.to_string()))
    }
}

impl ToJson for JetSection {
    fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms()
            .iter()
            .map(|(f, mu)| json!({ "f": f.to_json(), "mu": mu.to_json() }))
            .collect();
        json!({ "kind": "jet_section", "n": self.dim(), "k": self.k(), "terms": terms })
    }
}

impl FromJson for JetSection {
    fn from_json(v: &Value) -> JsonResult<Self> {
        check_kind(v, "jet_section")?;
        let n = usize_field(v, "n")?;
        let k = usize_field(v, "k")? as u32;
        let terms = array(field(v, "terms")?, "terms")?
            .iter()
            .map(|t| {
                Ok((
                    Poly::from_json(field(t, "f")?)?,
                    PolyVectorField::from_json(field(t, "mu")?)?,
                ))
            })
            .collect::<JsonResult<_>>()?;
        JetSection::new(n, k, terms).map_err(|e| JsonError(e.to_string()))
    }
}

impl ToJson for GroupJetSection {
    fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms()
            .iter()
            .map(|(f, z)| json!({ "f": f.to_json(), "zeta": z.to_json() }))
            .collect();
        json!({
            "kind": "group_jet_section",
            "n": self.dim(),
            "m": self.size(),
            "k": self.k(),
            "terms": terms,
        })
    }
}

impl FromJson for GroupJetSection {
    fn from_json(v: &Value) -> JsonResult<Self> {
        check_kind(v, "group_jet_section")?;
        let n = usize_field(v, "n")?;
        let m = usize_field(v, "m")?;
        let k = usize_field(v, "k")? as u32;
        let terms = array(field(v, "terms")?, "terms")?
            .iter()
            .map(|t| {
                Ok((
                    Poly::from_json(field(t, "f")?)?,
                    MatrixPoly::from_json(field(t, "zeta")?)?,
                ))
            })
            .collect::<JsonResult<_>>()?;
        GroupJetSection::new(n, m, k, terms).map_err(|e| JsonError(e.to_string()))
    }
}

impl ToJson for SemidirectSection {
    fn to_json(&self) -> Value {
        json!({ "kind": "semidirect_section", "xi": self.xi.to_json(), "lambda": self.lambda.to_json() })
    }
}

impl FromJson for SemidirectSection {
    fn from_json(v: &Value) -> JsonResult<Self> {
        check_kind(v, "semidirect_section")?;
        let xi = JetSection::from_json(field(v, "xi")?)?;
        let lambda = GroupJetSection::from_json(field(v, "lambda")?)?;
        SemidirectSection::new(xi, lambda).map_err(|e| JsonError(e.to_string()))
    }
}

impl ToJson for TrivialElement {
    fn to_json(&self) -> Value {
        json!({
            "kind": "trivial_element",
            "target": self.target,
            "g": mat_to_json(&self.g),
            "source": self.source,
        })
    }
}

impl FromJson for TrivialElement {
    fn from_json(v: &Value) -> JsonResult<Self> {
        check_kind(v, "trivial_element")?;
        Ok(Self {
            target: scalars(field(v, "target")?, "target")?,
            g: mat_from_json(field(v, "g")?, None)?,
            source: scalars(field(v, "source")?, "source")?,
        })
    }
}

impl ToJson for GroupPath {
    fn to_json(&self) -> Value {
        let samples: Vec<Value> = self
            .samples
            .iter()
            .map(|(t, p, g)| json!({ "t": t, "point": p, "g": mat_to_json(g) }))
            .collect();
        json!({ "kind": "group_path", "samples": samples })
    }
}

impl FromJson for GroupPath {
    fn from_json(v: &Value) -> JsonResult<Self> {
        check_kind(v, "group_path")?;
        let samples = array(field(v, "samples")?, "samples")?
            .iter()
            .map(|s| {
                let t = f64::decode(field(s, "t")?)?;
                Ok((t, scalars(field(s, "point")?, "point")?, mat_from_json(field(s, "g")?, None)?))
            })
            .collect::<JsonResult<_>>()?;
        Ok(GroupPath { samples })
    }
}

/// A list of points, `[[x0, x1], …]` or a single point `[x0, x1]`.
pub fn points_from_json(v: &Value) -> JsonResult<Vec<Vec<f64>>> {
    let arr = array(v, "points")?;
    if arr.iter().all(Value::is_number) {
        return Ok(vec![scalars(v, "point")?]);
    }
    arr.iter().map(|p| scalars(p, "point")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FiniteGroup;
    use crate::scalar::{q, qi};

    fn round_trip<T: ToJson + FromJson + PartialEq + std::fmt::Debug>(x: &T) {
        let text = serde_json::to_string(&x.to_json()).unwrap();
        assert_eq!(&parse::<T>(&text).unwrap(), x, "{text}");
    }

    #[test]
    fn artifacts_round_trip() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = x.mul(&y).scale(&q(-3, 7)).add(&Poly::constant(2, q(1, 2)));
        round_trip(&p);
        let vf = PolyVectorField::new(vec![p.clone(), x.clone()]);
        round_trip(&vf);
        let mp = MatrixPoly::new(2, 2, vec![p.clone(), x.clone(), Poly::zero(2), y.clone()]);
        round_trip(&mp);
        round_trip(&TrivialSection::new(vf.clone(), mp.clone()).unwrap());
        round_trip(&LinearOperator::new(vf.clone(), mp.clone()).unwrap());
        round_trip(&VectorSection::new(2, vec![p.clone(), y.clone()]).unwrap());
        let js = JetSection::new(2, 2, vec![(x.clone(), vf.clone())]).unwrap();
        round_trip(&js);
        let gs = GroupJetSection::new(2, 2, 2, vec![(y.clone(), mp.clone())]).unwrap();
        round_trip(&gs);
        round_trip(&SemidirectSection::new(js, gs).unwrap());
        let arrow = JetArrow::of_polynomial(
            &[x.add(&y.mul(&y)), y.scale(&qi(2)).add(&x.mul(&x))],
            &[q(1, 3), qi(-2)],
            3,
        )
        .unwrap();
        round_trip(&arrow);
        round_trip(&arrow.map(|c| c.to_float()));
        round_trip(&GroupoidTable::trivial(2, &FiniteGroup::symmetric3()));
    }

    #[test]
    fn rationals_are_strings() {
        let v = Poly::constant(1, q(4, 2)).to_json();
        assert_eq!(v["terms"]["0"], json!("2/1"));
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(parse::<Poly>("{\"nvars\": 1, \"terms\": {\"1,1\": \"1/2\"}}").is_err());
        assert!(parse::<Poly>("{\"nvars\": 1, \"terms\": {\"1\": \"x\"}}").is_err());
        assert!(parse::<JetArrow>("{\"n\":1,\"m\":1,\"k\":1,\"base\":[\"0/1\"],\"value\":[\"0/1\"],\"coeffs\":{}}").is_err());
        assert!(parse::<GroupoidTable>("[1,2]").is_err());
    }
}
