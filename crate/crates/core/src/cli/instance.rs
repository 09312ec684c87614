//! Instance files: JSON with every number an exact rational (`"p/q"` string
//! or integer). Objects refer to spaces and norms by name; operator tables,
//! maps and tensors are keyed by point label.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Caps;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::operators::{FreeTensor, LinearMap, LipLinearOperator, LipschitzMap, TwoLipschitzTable};
use crate::random;
use crate::rational::{serde_rational, Rational};
use crate::spaces::{default_labels, FiniteMetricSpace, PolyhedralNorm};
use crate::summing::SequenceSample;

/// A rational as it appears in a file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Q(#[serde(with = "serde_rational")] pub Rational);

fn vec_q(v: &[Rational]) -> Vec<Q> {
    v.iter().cloned().map(Q).collect()
}

fn unq(v: &[Q]) -> Vector {
    v.iter().map(|q| q.0.clone()).collect()
}

fn matrix_q(m: &Matrix) -> Vec<Vec<Q>> {
    m.row_vectors().iter().map(|r| vec_q(r)).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub spaces: BTreeMap<String, SpaceSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub norms: BTreeMap<String, NormSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub operators: BTreeMap<String, OperatorSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, MapSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub linear_maps: BTreeMap<String, LinearMapSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tensors: BTreeMap<String, TensorSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub samples: BTreeMap<String, SampleSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub two_lipschitz: BTreeMap<String, TwoLipschitzSpec>,
}

/// Point 0 (the first label) is the base point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub distances: Vec<Vec<Q>>,
}

/// `"l1:n"`, `"linf:n"`, `"scalar"`, or an explicit symmetric list of dual vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NormSpec {
    Shorthand(String),
    Vertices(DualVertices),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualVertices {
    pub dual_vertices: Vec<Vec<Q>>,
}

/// `table[label]` is the matrix `A(label)`: rows index the codomain.
/// Omitted labels are the zero matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub space: String,
    pub domain: String,
    pub codomain: String,
    pub table: BTreeMap<String, Vec<Vec<Q>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub space: String,
    pub codomain: String,
    pub values: BTreeMap<String, Vec<Q>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearMapSpec {
    pub domain: String,
    pub codomain: String,
    pub matrix: Vec<Vec<Q>>,
}

/// `u = Σ_x δ_x ⊗ coeffs[x]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorSpec {
    pub space: String,
    pub factor: String,
    pub coeffs: BTreeMap<String, Vec<Q>>,
}

/// Triples `(x, y, e)` for the sandwich lower bound of `operator`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub operator: String,
    pub triples: Vec<(String, String, Vec<Q>)>,
}

/// `values[x][y]`; pairs with a base point must be omitted or zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoLipschitzSpec {
    pub x: String,
    pub y: String,
    pub codomain: String,
    pub values: BTreeMap<String, BTreeMap<String, Vec<Q>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedOperator {
    pub space: String,
    pub domain: String,
    pub codomain: String,
    pub op: LipLinearOperator,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedMap {
    pub space: String,
    pub codomain: String,
    pub map: LipschitzMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedLinearMap {
    pub domain: String,
    pub codomain: String,
    pub map: LinearMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedTensor {
    pub space: String,
    pub factor: String,
    pub tensor: FreeTensor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedSample {
    pub operator: String,
    pub sample: Vec<(usize, usize, Vector)>,
}

impl NamedSample {
    pub fn sequence(&self) -> SequenceSample {
        SequenceSample::new(self.sample.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedTwoLipschitz {
    pub x: String,
    pub y: String,
    pub codomain: String,
    pub table: TwoLipschitzTable,
}

/// A validated instance file. Norm shorthands are remembered so that
/// emitting reproduces them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Instance {
    pub spaces: BTreeMap<String, FiniteMetricSpace>,
    pub norms: BTreeMap<String, PolyhedralNorm>,
    norm_text: BTreeMap<String, String>,
    pub operators: BTreeMap<String, NamedOperator>,
    pub maps: BTreeMap<String, NamedMap>,
    pub linear_maps: BTreeMap<String, NamedLinearMap>,
    pub tensors: BTreeMap<String, NamedTensor>,
    pub samples: BTreeMap<String, NamedSample>,
    pub two_lipschitz: BTreeMap<String, NamedTwoLipschitz>,
}

/// Prefixes an error with the field it came from. Cap violations pass
/// through untouched so they keep their exit code.
fn at<T>(field: &str, r: Result<T>) -> Result<T> {
    r.map_err(|err| match err {
        Error::CapExceeded { .. } => err,
        other => Error::Parse(format!("{field}: {other}")),
    })
}

fn bad(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{field}: {msg}"))
}

fn shorthand_norm(text: &str, caps: &Caps) -> Result<PolyhedralNorm> {
    if text == "scalar" {
        return Ok(PolyhedralNorm::scalar());
    }
    let (kind, n) = text
        .split_once(':')
        .ok_or_else(|| Error::InvalidNorm(format!("unknown shorthand {text:?}; expected l1:n, linf:n or scalar")))?;
    let n: usize = n.trim().parse().map_err(|_| Error::InvalidNorm(format!("bad dimension in {text:?}")))?;
    caps.check(crate::error::Cap::Dimension, n)?;
    match kind.trim() {
        "l1" => PolyhedralNorm::l1(n),
        "linf" => PolyhedralNorm::linf(n),
        _ => Err(Error::InvalidNorm(format!("unknown norm family {kind:?}"))),
    }
}

fn matrix_of(field: &str, rows: &[Vec<Q>], shape: (usize, usize)) -> Result<Matrix> {
    if rows.len() != shape.0 {
        return Err(bad(field, format!("expected {} rows, found {}", shape.0, rows.len())));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != shape.1) {
        return Err(bad(field, format!("expected {} columns, found {}", shape.1, r.len())));
    }
    let m = Matrix::from_rows(rows.iter().map(|r| unq(r)).collect());
    at(field, m).map(|m| if shape.0 == 0 { Matrix::zeros(0, shape.1) } else { m })
}

fn vector_of(field: &str, v: &[Q], dim: usize) -> Result<Vector> {
    if v.len() != dim {
        return Err(bad(field, format!("expected {dim} entries, found {}", v.len())));
    }
    Ok(unq(v))
}

fn point(field: &str, space: &FiniteMetricSpace, label: &str) -> Result<usize> {
    space.index_of(label).ok_or_else(|| bad(field, format!("unknown point label {label:?}")))
}

impl InstanceFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize")
    }

    /// Checks every invariant and builds the domain values.
    pub fn validate(&self, caps: &Caps) -> Result<Instance> {
        let mut inst = Instance::default();
        for (name, s) in &self.spaces {
            let field = format!("spaces.{name}");
            caps.check(crate::error::Cap::Points, s.distances.len())?;
            let labels = s.labels.clone().unwrap_or_else(|| default_labels(s.distances.len()));
            let dist = s.distances.iter().map(|r| unq(r)).collect();
            inst.spaces.insert(name.clone(), at(&field, FiniteMetricSpace::new(labels, dist))?);
        }
        for (name, n) in &self.norms {
            let field = format!("norms.{name}");
            let norm = match n {
                NormSpec::Shorthand(text) => {
                    inst.norm_text.insert(name.clone(), text.clone());
                    at(&field, shorthand_norm(text, caps))?
                }
                NormSpec::Vertices(v) => {
                    if let Some(first) = v.dual_vertices.first() {
                        caps.check(crate::error::Cap::Dimension, first.len())?;
                    }
                    let verts = v.dual_vertices.iter().map(|r| unq(r)).collect();
                    at(&field, PolyhedralNorm::with_caps(verts, caps))?
                }
            };
            inst.norms.insert(name.clone(), norm);
        }
        for (name, o) in &self.operators {
            let field = format!("operators.{name}");
            let space = inst.space(&format!("{field}.space"), &o.space)?;
            let dom = inst.norm(&format!("{field}.domain"), &o.domain)?;
            let cod = inst.norm(&format!("{field}.codomain"), &o.codomain)?;
            let mut table = vec![Matrix::zeros(cod.dim(), dom.dim()); space.len()];
            for (label, rows) in &o.table {
                let f = format!("{field}.table.{label}");
                table[point(&f, space, label)?] = matrix_of(&f, rows, (cod.dim(), dom.dim()))?;
            }
            let op = at(&field, LipLinearOperator::from_full_table(space.clone(), dom.clone(), cod.clone(), table))?;
            let named =
                NamedOperator { space: o.space.clone(), domain: o.domain.clone(), codomain: o.codomain.clone(), op };
            inst.operators.insert(name.clone(), named);
        }
        for (name, m) in &self.maps {
            let field = format!("maps.{name}");
            let space = inst.space(&format!("{field}.space"), &m.space)?;
            let cod = inst.norm(&format!("{field}.codomain"), &m.codomain)?;
            let mut values = vec![linalg::zeros(cod.dim()); space.len()];
            for (label, v) in &m.values {
                let f = format!("{field}.values.{label}");
                values[point(&f, space, label)?] = vector_of(&f, v, cod.dim())?;
            }
            if !linalg::is_zero(&values[0]) {
                return Err(bad(&field, "a Lipschitz map must send the base point to 0"));
            }
            values.remove(0);
            let map = at(&field, LipschitzMap::new(space.clone(), cod.clone(), values))?;
            inst.maps.insert(name.clone(), NamedMap { space: m.space.clone(), codomain: m.codomain.clone(), map });
        }
        for (name, v) in &self.linear_maps {
            let field = format!("linear_maps.{name}");
            let dom = inst.norm(&format!("{field}.domain"), &v.domain)?;
            let cod = inst.norm(&format!("{field}.codomain"), &v.codomain)?;
            let matrix = matrix_of(&format!("{field}.matrix"), &v.matrix, (cod.dim(), dom.dim()))?;
            let map = at(&field, LinearMap::new(dom.clone(), cod.clone(), matrix))?;
            let named = NamedLinearMap { domain: v.domain.clone(), codomain: v.codomain.clone(), map };
            inst.linear_maps.insert(name.clone(), named);
        }
        for (name, t) in &self.tensors {
            let field = format!("tensors.{name}");
            let space = inst.space(&format!("{field}.space"), &t.space)?;
            let factor = inst.norm(&format!("{field}.factor"), &t.factor)?;
            let mut coeffs = vec![linalg::zeros(factor.dim()); space.len()];
            for (label, v) in &t.coeffs {
                let f = format!("{field}.coeffs.{label}");
                coeffs[point(&f, space, label)?] = vector_of(&f, v, factor.dim())?;
            }
            // δ_0 = 0, so the base-point coefficient carries no information
            coeffs.remove(0);
            let tensor = at(&field, FreeTensor::new(coeffs, factor.dim()))?;
            inst.tensors.insert(name.clone(), NamedTensor { space: t.space.clone(), factor: t.factor.clone(), tensor });
        }
        for (name, s) in &self.samples {
            let field = format!("samples.{name}");
            let op = inst
                .operators
                .get(&s.operator)
                .ok_or_else(|| bad(&format!("{field}.operator"), format!("unknown operator {:?}", s.operator)))?;
            let mut sample = Vec::new();
            for (k, (x, y, e)) in s.triples.iter().enumerate() {
                let f = format!("{field}.triples[{k}]");
                let space = &op.op.space;
                sample.push((point(&f, space, x)?, point(&f, space, y)?, vector_of(&f, e, op.op.domain.dim())?));
            }
            inst.samples.insert(name.clone(), NamedSample { operator: s.operator.clone(), sample });
        }
        for (name, t) in &self.two_lipschitz {
            let field = format!("two_lipschitz.{name}");
            let x = inst.space(&format!("{field}.x"), &t.x)?;
            let y = inst.space(&format!("{field}.y"), &t.y)?;
            let cod = inst.norm(&format!("{field}.codomain"), &t.codomain)?;
            let mut values = vec![vec![linalg::zeros(cod.dim()); y.len()]; x.len()];
            for (xl, row) in &t.values {
                let i = point(&format!("{field}.values.{xl}"), x, xl)?;
                for (yl, v) in row {
                    let f = format!("{field}.values.{xl}.{yl}");
                    values[i][point(&f, y, yl)?] = vector_of(&f, v, cod.dim())?;
                }
            }
            let table = at(&field, TwoLipschitzTable::new(x.clone(), y.clone(), cod.clone(), values))?;
            let named = NamedTwoLipschitz { x: t.x.clone(), y: t.y.clone(), codomain: t.codomain.clone(), table };
            inst.two_lipschitz.insert(name.clone(), named);
        }
        Ok(inst)
    }
}

impl Instance {
    fn space(&self, field: &str, name: &str) -> Result<&FiniteMetricSpace> {
        self.spaces.get(name).ok_or_else(|| bad(field, format!("unknown space {name:?}")))
    }

    fn norm(&self, field: &str, name: &str) -> Result<&PolyhedralNorm> {
        self.norms.get(name).ok_or_else(|| bad(field, format!("unknown norm {name:?}")))
    }

    pub fn parse_file(path: &Path, caps: &Caps) -> Result<Self> {
        InstanceFile::read(path)?.validate(caps)
    }

    pub fn parse_str(text: &str, caps: &Caps) -> Result<Self> {
        InstanceFile::from_json(text)?.validate(caps)
    }

    /// The file form; every point of every table is written out.
    pub fn emit(&self) -> InstanceFile {
        let mut file = InstanceFile::default();
        for (name, s) in &self.spaces {
            let distances = s.distances().iter().map(|r| vec_q(r)).collect();
            file.spaces.insert(name.clone(), SpaceSpec { labels: Some(s.labels().to_vec()), distances });
        }
        for (name, n) in &self.norms {
            let spec = match self.norm_text.get(name) {
                Some(text) => NormSpec::Shorthand(text.clone()),
                None => NormSpec::Vertices(DualVertices {
                    dual_vertices: n.dual_vertices().iter().map(|v| vec_q(v)).collect(),
                }),
            };
            file.norms.insert(name.clone(), spec);
        }
        for (name, o) in &self.operators {
            let space = &o.op.space;
            let table = (1..space.len()).map(|x| (space.label(x).to_string(), matrix_q(&o.op.at(x)))).collect();
            let spec =
                OperatorSpec { space: o.space.clone(), domain: o.domain.clone(), codomain: o.codomain.clone(), table };
            file.operators.insert(name.clone(), spec);
        }
        for (name, m) in &self.maps {
            let space = &m.map.space;
            let values = (1..space.len()).map(|x| (space.label(x).to_string(), vec_q(&m.map.value(x)))).collect();
            file.maps.insert(name.clone(), MapSpec { space: m.space.clone(), codomain: m.codomain.clone(), values });
        }
        for (name, v) in &self.linear_maps {
            let spec = LinearMapSpec {
                domain: v.domain.clone(),
                codomain: v.codomain.clone(),
                matrix: matrix_q(&v.map.matrix),
            };
            file.linear_maps.insert(name.clone(), spec);
        }
        for (name, t) in &self.tensors {
            let space = &self.spaces[&t.space];
            let coeffs =
                t.tensor.coeffs().iter().enumerate().map(|(k, c)| (space.label(k + 1).to_string(), vec_q(c))).collect();
            file.tensors.insert(name.clone(), TensorSpec { space: t.space.clone(), factor: t.factor.clone(), coeffs });
        }
        for (name, s) in &self.samples {
            let space = &self.operators[&s.operator].op.space;
            let triples = s
                .sample
                .iter()
                .map(|(x, y, e)| (space.label(*x).to_string(), space.label(*y).to_string(), vec_q(e)))
                .collect();
            file.samples.insert(name.clone(), SampleSpec { operator: s.operator.clone(), triples });
        }
        for (name, t) in &self.two_lipschitz {
            let (x, y) = (&t.table.x_space, &t.table.y_space);
            let values = (1..x.len())
                .map(|i| {
                    let row = (1..y.len()).map(|j| (y.label(j).to_string(), vec_q(t.table.value(i, j)))).collect();
                    (x.label(i).to_string(), row)
                })
                .collect();
            let spec = TwoLipschitzSpec { x: t.x.clone(), y: t.y.clone(), codomain: t.codomain.clone(), values };
            file.two_lipschitz.insert(name.clone(), spec);
        }
        file
    }
}

/// A random instance with one object of every kind: space `X`, norms `E`
/// and `F`, operator `T`, map `R`, linear map `V`, tensor `u`, sample `S`,
/// two-Lipschitz table `B` and the scalar operator `Ts`.
pub fn gen_random(points: usize, dim: usize, seed: u64, caps: &Caps) -> Result<InstanceFile> {
    caps.check(crate::error::Cap::Points, points)?;
    caps.check(crate::error::Cap::Dimension, dim)?;
    if points < 2 || dim < 1 {
        return Err(Error::Parse("gen needs at least 2 points and dimension 1".into()));
    }
    let mut rng = random::rng(seed);
    let space = random::metric(&mut rng, points, caps)?;
    let e = random::norm(&mut rng, dim, caps)?;
    let f = random::norm(&mut rng, dim, caps)?;
    let scalar = PolyhedralNorm::scalar();
    let t = random::operator(&mut rng, &space, &e, &f);
    let ts = random::operator(&mut rng, &space, &e, &scalar);
    let r = random::lipschitz_map(&mut rng, &space, &f);
    let v = random::linear_map(&mut rng, &e, &f);
    let u = FreeTensor::new((0..space.free_dim()).map(|_| random::vector(&mut rng, dim, 3)).collect(), dim)?;
    let sample: Vec<(usize, usize, Vector)> = (0..3)
        .map(|k| {
            let x = 1 + k % space.free_dim();
            (x, 0, random::vector(&mut rng, dim, 3))
        })
        .collect();
    let b = random::two_lipschitz(&mut rng, &space, &space, &f);

    let mut inst = Instance::default();
    inst.spaces.insert("X".into(), space);
    for (name, n) in [("E", e), ("F", f), ("R1", scalar)] {
        inst.norms.insert(name.into(), n);
    }
    inst.norm_text.insert("R1".into(), "scalar".into());
    let named = |op, cod: &str| NamedOperator { space: "X".into(), domain: "E".into(), codomain: cod.into(), op };
    inst.operators.insert("T".into(), named(t, "F"));
    inst.operators.insert("Ts".into(), named(ts, "R1"));
    inst.maps.insert("R".into(), NamedMap { space: "X".into(), codomain: "F".into(), map: r });
    inst.linear_maps.insert("V".into(), NamedLinearMap { domain: "E".into(), codomain: "F".into(), map: v });
    inst.tensors.insert("u".into(), NamedTensor { space: "X".into(), factor: "E".into(), tensor: u });
    inst.samples.insert("S".into(), NamedSample { operator: "T".into(), sample });
    inst.two_lipschitz
        .insert("B".into(), NamedTwoLipschitz { x: "X".into(), y: "X".into(), codomain: "F".into(), table: b });
    Ok(inst.emit())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Signed;

    const X3: &str = r#"{
        "spaces": {"X3": {"labels": ["0", "a", "b"], "distances": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]}},
        "norms": {"E": "l1:2", "F": "linf:2"},
        "operators": {"T": {"space": "X3", "domain": "E", "codomain": "F",
                            "table": {"a": [["1/2", 0], [0, 1]]}}}
    }"#;

    #[test]
    fn parses_line_instance() {
        let inst = Instance::parse_str(X3, &Caps::default()).unwrap();
        let line =
            FiniteMetricSpace::line(&[crate::rational::int(0), crate::rational::int(1), crate::rational::int(2)])
                .unwrap();
        assert_eq!(inst.spaces["X3"], line);
        assert!(inst.operators["T"].op.at(2).is_zero());
    }

    #[test]
    fn l1_shorthand_has_sign_vertices() {
        let n = shorthand_norm("l1:2", &Caps::default()).unwrap();
        assert_eq!(n.dual_vertices().len(), 4);
        assert!(n.dual_vertices().iter().all(|w| w.iter().all(|c| c.abs() == crate::rational::one())));
    }

    #[test]
    fn unknown_fields_rejected() {
        let err = InstanceFile::from_json(r#"{"spaces": {}, "extra": 1}"#).unwrap_err();
        assert!(err.to_string().contains("extra"));
    }

    #[test]
    fn errors_name_the_field() {
        let text = X3.replace(r#""a": [["1/2", 0], [0, 1]]"#, r#""c": [[1, 0], [0, 1]]"#);
        let err = Instance::parse_str(&text, &Caps::default()).unwrap_err().to_string();
        assert!(err.contains("operators.T.table.c") && err.contains("\"c\""), "{err}");
    }

    #[test]
    fn generated_round_trip() {
        let caps = Caps::default();
        for seed in 0..5 {
            let file = gen_random(4, 2, seed, &caps).unwrap();
            let inst = file.validate(&caps).unwrap();
            let again = InstanceFile::from_json(&inst.emit().to_json()).unwrap().validate(&caps).unwrap();
            assert_eq!(inst, again);
        }
    }
}
