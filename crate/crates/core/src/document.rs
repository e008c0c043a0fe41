//! JSON input documents and serialized build output.
//!
//! Rationals travel as strings `"a"` or `"a/b"`; matrices are row-major grids.
//! A document carries exactly one of `phin`, `cocycle` or `module`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::linalg::PadicMatrix;
use crate::padic::{parse_rational, Padic, PadicContext, PadicError};
use crate::phin::{PhiNData, PhiNError, RationalGrid};
use crate::pi_sen::{
    build_direct, build_from_cocycle, build_from_cocycle_unchecked, build_from_phin, default_characters,
    monodromy_gap, BigradedDims, BuildOptions, Generators, PiSenError, PiSenModule,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("unsupported schema_version {0}, expected {SCHEMA_VERSION}")]
    Schema(u32),
    #[error("document must contain exactly one of `phin`, `cocycle`, `module` (found {0})")]
    Variant(usize),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("{0}")]
    Context(PadicError),
}

fn field_err(field: impl Into<String>, message: impl ToString) -> DocumentError {
    DocumentError::Field { field: field.into(), message: message.to_string() }
}

pub type StringGrid = Vec<Vec<String>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhinSection {
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: StringGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<StringGrid>,
    pub weights: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twists: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleSection {
    pub dim: usize,
    pub chi0: String,
    pub c0: String,
    pub gamma0: StringGrid,
    pub beta0: StringGrid,
}

/// Operator matrices given directly, optionally with generator matrices and
/// the monodromy of the source data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSection {
    pub dim: usize,
    pub nabla0: StringGrid,
    pub nabla_pi: StringGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma0: Option<StringGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta0: Option<StringGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monodromy: Option<StringGrid>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phin: Option<PhinSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<CocycleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<ModuleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_degree: Option<i64>,
}

/// The typed content of a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Phin(PhiNData),
    Cocycle(Generators),
    Module {
        nabla0: PadicMatrix,
        nabla_pi: PadicMatrix,
        generators: Option<Generators>,
        monodromy: Option<RationalGrid>,
    },
}

fn parse_grid(field: &str, grid: &StringGrid, dim: usize) -> Result<RationalGrid, DocumentError> {
    if grid.len() != dim {
        return Err(field_err(field, format!("expected {dim} rows, found {}", grid.len())));
    }
    grid.iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != dim {
                return Err(field_err(format!("{field}[{i}]"), format!("expected {dim} entries, found {}", row.len())));
            }
            row.iter()
                .enumerate()
                .map(|(j, s)| parse_rational(s).map_err(|e| field_err(format!("{field}[{i}][{j}]"), e)))
                .collect()
        })
        .collect()
}

fn to_matrix(ctx: PadicContext, field: &str, grid: &StringGrid, dim: usize) -> Result<PadicMatrix, DocumentError> {
    let q = parse_grid(field, grid, dim)?;
    PadicMatrix::from_rationals(ctx, &q).map_err(|e| field_err(field, e))
}

fn to_scalar(ctx: PadicContext, field: &str, s: &str) -> Result<Padic, DocumentError> {
    ctx.parse(s).map_err(|e| field_err(field, e))
}

impl InputDocument {
    pub fn from_json(text: &str) -> Result<InputDocument, DocumentError> {
        let doc: InputDocument = serde_json::from_str(text).map_err(|e| DocumentError::Json(e.to_string()))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(DocumentError::Schema(doc.schema_version));
        }
        let variants = [doc.phin.is_some(), doc.cocycle.is_some(), doc.module.is_some()];
        let count = variants.iter().filter(|&&x| x).count();
        if count != 1 {
            return Err(DocumentError::Variant(count));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    /// SHA-256 of the compact serialization, independent of input whitespace.
    pub fn digest(&self) -> String {
        let compact = serde_json::to_string(self).expect("document serializes");
        hex::encode(Sha256::digest(compact.as_bytes()))
    }

    /// Context from the document's prime and precision, each overridable.
    pub fn context(&self, prime: Option<u64>, precision: Option<i64>) -> Result<PadicContext, DocumentError> {
        let default = PadicContext::default();
        let p = prime.or(self.prime).unwrap_or(default.p());
        let m = precision.or(self.precision).unwrap_or(default.precision());
        PadicContext::new(p, m).map_err(DocumentError::Context)
    }

    pub fn source(&self, ctx: PadicContext) -> Result<Source, DocumentError> {
        if let Some(s) = &self.phin {
            if s.weights.len() != s.dim {
                return Err(field_err("phin.weights", format!("expected {} entries, found {}", s.dim, s.weights.len())));
            }
            let n = parse_grid("phin.N", &s.n, s.dim)?;
            let phi = s.phi.as_ref().map(|g| parse_grid("phin.phi", g, s.dim)).transpose()?;
            let data = PhiNData::new(n, phi, s.weights.clone(), s.twists.clone()).map_err(|e| match e {
                PhiNError::Shape { field, .. } => field_err(format!("phin.{field}"), e),
                PhiNError::EmptyModule => field_err("phin.dim", e),
            })?;
            return Ok(Source::Phin(data));
        }
        if let Some(s) = &self.cocycle {
            return Ok(Source::Cocycle(Generators {
                gamma0: to_matrix(ctx, "cocycle.gamma0", &s.gamma0, s.dim)?,
                beta0: to_matrix(ctx, "cocycle.beta0", &s.beta0, s.dim)?,
                chi0: to_scalar(ctx, "cocycle.chi0", &s.chi0)?,
                c0: to_scalar(ctx, "cocycle.c0", &s.c0)?,
            }));
        }
        let s = self.module.as_ref().ok_or(DocumentError::Variant(0))?;
        let nabla0 = to_matrix(ctx, "module.nabla0", &s.nabla0, s.dim)?;
        let nabla_pi = to_matrix(ctx, "module.nabla_pi", &s.nabla_pi, s.dim)?;
        let generators = match (&s.gamma0, &s.beta0) {
            (Some(g), Some(b)) => {
                let (chi_default, c_default) = default_characters(ctx);
                Some(Generators {
                    gamma0: to_matrix(ctx, "module.gamma0", g, s.dim)?,
                    beta0: to_matrix(ctx, "module.beta0", b, s.dim)?,
                    chi0: s.chi0.as_deref().map_or(Ok(chi_default), |x| to_scalar(ctx, "module.chi0", x))?,
                    c0: s.c0.as_deref().map_or(Ok(c_default), |x| to_scalar(ctx, "module.c0", x))?,
                })
            }
            (None, None) => None,
            _ => return Err(field_err("module.gamma0", "gamma0 and beta0 must be given together")),
        };
        let monodromy = s.monodromy.as_ref().map(|g| parse_grid("module.monodromy", g, s.dim)).transpose()?;
        Ok(Source::Module { nabla0, nabla_pi, generators, monodromy })
    }
}

impl Source {
    /// Builds the module. With `strict` false, cocycle generators violating the
    /// group relation are still turned into operators so the failure can be reported.
    pub fn build(&self, ctx: PadicContext, opts: BuildOptions, strict: bool) -> Result<PiSenModule, PiSenError> {
        match self {
            Source::Phin(data) => build_from_phin(data, ctx, opts),
            Source::Cocycle(g) if strict => build_from_cocycle(g.clone(), ctx, opts),
            Source::Cocycle(g) => build_from_cocycle_unchecked(g.clone(), ctx, opts),
            Source::Module { nabla0, nabla_pi, generators, monodromy } => build_direct(
                nabla0.clone(),
                nabla_pi.clone(),
                generators.clone(),
                monodromy.clone(),
                ctx,
                opts,
            ),
        }
    }
}

/// A matrix as rational strings plus the absolute precision of each entry
/// (`null` for an exact zero).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub entries: StringGrid,
    pub precision: Vec<Vec<Option<i64>>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &PadicMatrix) -> MatrixJson {
        let precision = (0..m.rows())
            .map(|i| {
                (0..m.cols())
                    .map(|j| {
                        let x = m.get(i, j);
                        (!x.is_exact_zero()).then(|| x.precision())
                    })
                    .collect()
            })
            .collect();
        MatrixJson { entries: m.to_rational_strings(), precision }
    }

    /// Reconstructs the matrix; entries equal the originals bit for bit.
    pub fn to_matrix(&self, ctx: PadicContext) -> Result<PadicMatrix, DocumentError> {
        let rows = self.entries.len();
        let cols = self.entries.first().map_or(0, Vec::len);
        let mut out = PadicMatrix::zeros(ctx, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let field = format!("entries[{i}][{j}]");
                let q: BigRational = parse_rational(&self.entries[i][j]).map_err(|e| field_err(&field, e))?;
                let prec = self.precision.get(i).and_then(|r| r.get(j)).ok_or_else(|| field_err(&field, "no precision"))?;
                let x = match prec {
                    None if q.is_zero() => Padic::exact_zero(ctx.p()),
                    None => return Err(field_err(field, "only zero can be exact")),
                    Some(n) => Padic::from_rational_prec(q.numer(), q.denom(), ctx.p(), *n)
                        .map_err(|e| field_err(&field, e))?,
                };
                out.set(i, j, x);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BigradingJson {
    pub total_degree: i64,
    pub weight_shift: i64,
    pub table: Vec<(i64, i64, usize)>,
    pub monodromy_gap: i64,
}

/// Serialized [`PiSenModule`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleJson {
    pub schema_version: u32,
    pub prime: u64,
    pub precision: i64,
    pub route: String,
    pub dim: usize,
    pub labels: Vec<Vec<String>>,
    pub nabla0: MatrixJson,
    pub nabla_pi: MatrixJson,
    pub weights: Option<Vec<i64>>,
    pub spectrum_error: Option<String>,
    pub bigrading: Option<BigradingJson>,
}

impl ModuleJson {
    pub fn new(module: &PiSenModule, total_degree: Option<i64>) -> ModuleJson {
        let ctx = module.ctx();
        let (weights, spectrum_error) = match module.weights() {
            Ok(wd) => (Some(wd.weights()), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let bigrading = module.grading(total_degree).and_then(|(m, shift)| {
            let dims: BigradedDims = module.bigraded_dims(m, shift).ok()?;
            Some(BigradingJson {
                total_degree: m,
                weight_shift: shift,
                table: dims.table.iter().map(|e| (e.s, e.t, e.dim)).collect(),
                monodromy_gap: monodromy_gap(&dims),
            })
        });
        ModuleJson {
            schema_version: SCHEMA_VERSION,
            prime: ctx.p(),
            precision: ctx.precision(),
            route: module.route().as_str().to_string(),
            dim: module.dim(),
            labels: module.labels().to_vec(),
            nabla0: MatrixJson::from_matrix(module.nabla0()),
            nabla_pi: MatrixJson::from_matrix(module.nabla_pi()),
            weights,
            spectrum_error,
            bigrading,
        }
    }
}

fn grid_from_ints(rows: &[Vec<i64>]) -> StringGrid {
    rows.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

fn rational_grid_strings(g: &RationalGrid) -> StringGrid {
    g.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

fn document(ctx: PadicContext) -> InputDocument {
    InputDocument {
        schema_version: SCHEMA_VERSION,
        prime: Some(ctx.p()),
        precision: Some(ctx.precision()),
        phin: None,
        cocycle: None,
        module: None,
        total_degree: None,
    }
}

/// Document for `(phi, N)`-data in chain form.
pub fn phin_document(ctx: PadicContext, data: &PhiNData, total_degree: Option<i64>) -> InputDocument {
    InputDocument {
        phin: Some(PhinSection {
            dim: data.dim(),
            n: rational_grid_strings(data.n()),
            phi: data.phi().map(rational_grid_strings),
            weights: data.weights().to_vec(),
            twists: Some(data.twists().to_vec()),
        }),
        total_degree,
        ..document(ctx)
    }
}

/// Names accepted by [`example`].
pub const EXAMPLE_NAMES: [&str; 5] = ["tate-curve", "tate-curve-cocycle", "crystalline:<d>", "jordan:<d>", "gapped"];

/// Built-in input documents.
///
/// * `tate-curve`: two-dimensional chain with weights 0, 1.
/// * `tate-curve-cocycle`: the same module from generator matrices on `(e, f)`.
/// * `crystalline:d`: `N = 0` with weights `0..d`.
/// * `jordan:d`: one chain of length `d` with consecutive weights.
/// * `gapped`: one chain of length 3 with weights 0, 2, 4 and dropping twists.
pub fn example(name: &str, ctx: PadicContext) -> Option<InputDocument> {
    let p = ctx.p() as i64;
    let parse_dim = |prefix: &str| -> Option<usize> {
        name.strip_prefix(prefix)?.parse().ok().filter(|&d: &usize| (1..=32).contains(&d))
    };
    if let Some(d) = parse_dim("crystalline:") {
        let data = PhiNData::shift((0..d as i64).collect(), None, false);
        return Some(phin_document(ctx, &data, None));
    }
    if let Some(d) = parse_dim("jordan:") {
        let data = PhiNData::shift((0..d as i64).collect(), Some(vec![0; d]), true);
        return Some(phin_document(ctx, &data, None));
    }
    match name {
        "tate-curve" => {
            let q = |x: i64| BigRational::from_integer(BigInt::from(x));
            let data = PhiNData::shift(vec![0, 1], Some(vec![0, 0]), true)
                .with_phi(vec![vec![q(p), q(0)], vec![q(0), BigRational::one()]])
                .expect("2x2");
            Some(phin_document(ctx, &data, Some(1)))
        }
        "tate-curve-cocycle" => {
            let (chi0, _) = default_characters(ctx);
            let chi = chi0.to_rational_string();
            Some(InputDocument {
                cocycle: Some(CocycleSection {
                    dim: 2,
                    chi0: chi.clone(),
                    c0: "1".into(),
                    gamma0: vec![vec![chi, "0".into()], vec!["0".into(), "1".into()]],
                    beta0: grid_from_ints(&[vec![1, 1], vec![0, 1]]),
                }),
                total_degree: Some(1),
                ..document(ctx)
            })
        }
        "gapped" => {
            let data = PhiNData::shift(vec![0, 2, 4], Some(vec![0, -1, -2]), true);
            Some(phin_document(ctx, &data, None))
        }
        _ => None,
    }
}

fn module_document(ctx: PadicContext, nabla0: &[Vec<i64>], nabla_pi: &[Vec<i64>]) -> InputDocument {
    InputDocument {
        module: Some(ModuleSection {
            dim: nabla0.len(),
            nabla0: grid_from_ints(nabla0),
            nabla_pi: grid_from_ints(nabla_pi),
            chi0: None,
            c0: None,
            gamma0: None,
            beta0: None,
            monodromy: None,
        }),
        ..document(ctx)
    }
}

/// Corrupted inputs, each paired with the check it must fail.
pub fn negative_controls(ctx: PadicContext) -> Vec<(&'static str, InputDocument)> {
    let (chi0, _) = default_characters(ctx);
    let chi = chi0.to_rational_string();
    let chi_sq = (&chi0 * &chi0).to_rational_string();
    let tate0 = vec![vec![0, 0], vec![0, 1]];
    let tate_pi = vec![vec![0, 0], vec![1, 0]];

    let mut crystalline = module_document(ctx, &tate0, &tate_pi);
    if let Some(m) = crystalline.module.as_mut() {
        m.monodromy = Some(grid_from_ints(&[vec![0, 0], vec![0, 0]]));
    }
    let mut limits = module_document(ctx, &tate0, &tate_pi);
    if let Some(m) = limits.module.as_mut() {
        m.gamma0 = Some(vec![vec!["1".into(), "0".into()], vec!["0".into(), chi_sq]]);
        m.beta0 = Some(grid_from_ints(&[vec![1, 0], vec![1, 1]]));
    }
    let relation = InputDocument {
        cocycle: Some(CocycleSection {
            dim: 2,
            chi0: chi.clone(),
            c0: "1".into(),
            gamma0: vec![vec![chi, "0".into()], vec!["0".into(), "1".into()]],
            beta0: grid_from_ints(&[vec![1, 0], vec![1, 1]]),
        }),
        ..document(ctx)
    };
    vec![
        ("decomposition", module_document(ctx, &[vec![0, 0], vec![1, 0]], &[vec![0, 0], vec![0, 0]])),
        ("bracket", module_document(ctx, &tate0, &[vec![1, 0], vec![1, 0]])),
        ("nilpotent", module_document(ctx, &[vec![0, 0], vec![0, 0]], &[vec![0, 1], vec![1, 0]])),
        ("weight_shift", module_document(ctx, &[vec![0, 0], vec![0, 2]], &tate_pi)),
        ("transversality", module_document(ctx, &[vec![0, 0], vec![0, 2]], &tate_pi)),
        ("crystalline", crystalline),
        ("local_monodromy", module_document(ctx, &[vec![0, 0], vec![0, 2]], &tate_pi)),
        ("limits", limits),
        ("semidirect_relation", relation),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PadicContext {
        PadicContext::default()
    }

    #[test]
    fn examples_parse_back() {
        for name in ["tate-curve", "tate-curve-cocycle", "crystalline:3", "jordan:4", "gapped"] {
            let doc = example(name, ctx()).unwrap();
            let back = InputDocument::from_json(&doc.to_json()).unwrap();
            assert_eq!(back, doc);
            back.source(ctx()).unwrap().build(ctx(), BuildOptions::default(), true).unwrap();
        }
        assert!(example("jordan:0", ctx()).is_none());
        assert!(example("nonsense", ctx()).is_none());
    }

    #[test]
    fn malformed_documents_name_the_field() {
        let err = InputDocument::from_json(r#"{"schema_version":1,"phin":{"dim":2,"N":[["0","0"],["1","0"]]}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("weights"), "{err}");
        let doc = InputDocument::from_json(
            r#"{"schema_version":1,"phin":{"dim":2,"N":[["0","0"],["x","0"]],"weights":[0,1]}}"#,
        )
        .unwrap();
        let err = doc.source(ctx()).unwrap_err();
        assert!(err.to_string().starts_with("phin.N[1][0]"), "{err}");
        let both = r#"{"schema_version":1,"phin":{"dim":1,"N":[["0"]],"weights":[0]},
            "module":{"dim":1,"nabla0":[["0"]],"nabla_pi":[["0"]]}}"#;
        assert_eq!(InputDocument::from_json(both).unwrap_err(), DocumentError::Variant(2));
    }

    #[test]
    fn matrix_json_round_trips() {
        let c = ctx();
        let doc = example("jordan:3", c).unwrap();
        let module = doc.source(c).unwrap().build(c, BuildOptions::default(), true).unwrap();
        for m in [module.nabla0(), module.nabla_pi()] {
            let json = MatrixJson::from_matrix(m);
            assert_eq!(&json.to_matrix(c).unwrap(), m);
        }
    }
}
