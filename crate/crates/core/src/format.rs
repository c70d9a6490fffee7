//! JSON documents for polynomials, factorizations, factor chains and
//! representations.
//!
//! Matrices are row-major arrays of rows, each entry a `[re, im]` pair.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorizer::{BlockDiagonal, DegreeOneFactor, Factorization};
use crate::matrix::ScalarMatrix;
use crate::ncpoly::{MatPoly, Word};
use crate::repnorm::Representation;
use crate::Complex64;

pub type MatrixDoc = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub word: String,
    pub coeff: MatrixDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyDoc {
    pub rows: usize,
    pub cols: usize,
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockDoc {
    pub size: usize,
    pub a0: MatrixDoc,
    #[serde(default)]
    pub a: BTreeMap<u32, MatrixDoc>,
    #[serde(default)]
    pub b: BTreeMap<u32, MatrixDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagDoc {
    pub blocks: Vec<BlockDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorizationDoc {
    pub out_rows: usize,
    pub out_cols: usize,
    pub alphas: Vec<MatrixDoc>,
    pub diags: Vec<DiagDoc>,
    pub cost: f64,
}

/// The `P₁ ⋯ P_m` chain written by `factorize --absorb`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDoc {
    pub out_rows: usize,
    pub out_cols: usize,
    pub factors: Vec<PolyDoc>,
    pub cost: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationDoc {
    pub dim: usize,
    pub label: String,
    pub unitaries: BTreeMap<u32, MatrixDoc>,
}

pub fn matrix_to_doc(m: &ScalarMatrix) -> MatrixDoc {
    m.row_iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_from_doc(doc: &MatrixDoc) -> Result<ScalarMatrix> {
    let rows = doc.len();
    let cols = doc.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(Error::Format("empty matrix".into()));
    }
    if doc.iter().any(|r| r.len() != cols) {
        return Err(Error::Format("ragged matrix rows".into()));
    }
    if doc.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Format("non-finite matrix entry".into()));
    }
    Ok(ScalarMatrix::from_row_iterator(
        rows,
        cols,
        doc.iter().flatten().map(|&[re, im]| Complex64::new(re, im)),
    ))
}

fn shaped(doc: &MatrixDoc, rows: usize, cols: usize, what: &str) -> Result<ScalarMatrix> {
    let m = matrix_from_doc(doc)?;
    if m.shape() != (rows, cols) {
        return Err(Error::Format(format!(
            "{what}: expected {rows}x{cols}, found {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m)
}

pub fn poly_to_doc(p: &MatPoly) -> PolyDoc {
    PolyDoc {
        rows: p.rows(),
        cols: p.cols(),
        terms: p
            .terms()
            .map(|(w, c)| TermDoc {
                word: w.to_string(),
                coeff: matrix_to_doc(c),
            })
            .collect(),
    }
}

/// Duplicate words are summed.
pub fn poly_from_doc(doc: &PolyDoc, max_gen: u32) -> Result<MatPoly> {
    if doc.rows == 0 || doc.cols == 0 {
        return Err(Error::Format("polynomial shape must be positive".into()));
    }
    let terms = doc
        .terms
        .iter()
        .map(|t| {
            let w = Word::parse_with_max(&t.word, max_gen)?;
            let c = shaped(&t.coeff, doc.rows, doc.cols, &format!("coefficient of `{}`", t.word))?;
            Ok((w, c))
        })
        .collect::<Result<Vec<_>>>()?;
    MatPoly::from_terms(doc.rows, doc.cols, terms)
}

pub fn poly_to_json(p: &MatPoly) -> String {
    serde_json::to_string_pretty(&poly_to_doc(p)).expect("serializable")
}

pub fn poly_from_json(text: &str, max_gen: u32) -> Result<MatPoly> {
    let doc: PolyDoc = serde_json::from_str(text)?;
    poly_from_doc(&doc, max_gen)
}

fn block_to_doc(y: &DegreeOneFactor) -> BlockDoc {
    BlockDoc {
        size: y.size(),
        a0: matrix_to_doc(y.a0()),
        a: y.a().iter().map(|(&j, m)| (j, matrix_to_doc(m))).collect(),
        b: y.b().iter().map(|(&j, m)| (j, matrix_to_doc(m))).collect(),
    }
}

fn block_from_doc(doc: &BlockDoc, max_gen: u32) -> Result<DegreeOneFactor> {
    let n = doc.size;
    let side = |map: &BTreeMap<u32, MatrixDoc>| -> Result<BTreeMap<u32, ScalarMatrix>> {
        map.iter()
            .map(|(&j, m)| {
                if j == 0 || j > max_gen {
                    return Err(Error::GeneratorOutOfRange { index: j, max: max_gen });
                }
                Ok((j, shaped(m, n, n, "block coefficient")?))
            })
            .collect()
    };
    DegreeOneFactor::new(shaped(&doc.a0, n, n, "block a0")?, side(&doc.a)?, side(&doc.b)?)
}

pub fn factorization_to_doc(f: &Factorization) -> FactorizationDoc {
    let (out_rows, out_cols) = f.out_shape();
    FactorizationDoc {
        out_rows,
        out_cols,
        alphas: f.alphas().iter().map(matrix_to_doc).collect(),
        diags: f
            .diags()
            .iter()
            .map(|d| DiagDoc {
                blocks: d.blocks().iter().map(block_to_doc).collect(),
            })
            .collect(),
        cost: f.cost(),
    }
}

/// Parses a factorization and checks it against its recorded shape and cost.
///
/// Malformed documents give [`Error::Format`]/[`Error::Json`]; documents that
/// parse but whose chain, shape or cost is inconsistent give
/// [`Error::Verification`].
pub fn factorization_from_doc(doc: &FactorizationDoc, max_gen: u32) -> Result<Factorization> {
    let alphas = doc
        .alphas
        .iter()
        .map(matrix_from_doc)
        .collect::<Result<Vec<_>>>()?;
    let diags = doc
        .diags
        .iter()
        .map(|d| {
            let blocks = d
                .blocks
                .iter()
                .map(|b| block_from_doc(b, max_gen))
                .collect::<Result<Vec<_>>>()?;
            BlockDiagonal::new(blocks).map_err(|e| Error::Format(e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let f = Factorization::new(alphas, diags)?;
    if f.out_shape() != (doc.out_rows, doc.out_cols) {
        return Err(Error::Verification(format!(
            "recorded shape {}x{} but chain produces {:?}",
            doc.out_rows,
            doc.out_cols,
            f.out_shape()
        )));
    }
    let cost = f.cost();
    if (cost - doc.cost).abs() > 1e-9 * cost.max(1.0) {
        return Err(Error::Verification(format!(
            "recorded cost {} differs from recomputed {cost}",
            doc.cost
        )));
    }
    Ok(f)
}

pub fn factorization_to_json(f: &Factorization) -> String {
    serde_json::to_string_pretty(&factorization_to_doc(f)).expect("serializable")
}

pub fn factorization_from_json(text: &str, max_gen: u32) -> Result<Factorization> {
    let doc: FactorizationDoc = serde_json::from_str(text)?;
    factorization_from_doc(&doc, max_gen)
}

pub fn chain_to_json(factors: &[MatPoly], cost: f64) -> String {
    let (out_rows, out_cols) = (
        factors.first().map_or(0, MatPoly::rows),
        factors.last().map_or(0, MatPoly::cols),
    );
    let doc = ChainDoc {
        out_rows,
        out_cols,
        factors: factors.iter().map(poly_to_doc).collect(),
        cost,
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn chain_from_json(text: &str, max_gen: u32) -> Result<Vec<MatPoly>> {
    let doc: ChainDoc = serde_json::from_str(text)?;
    doc.factors.iter().map(|p| poly_from_doc(p, max_gen)).collect()
}

pub fn representation_to_doc(r: &Representation) -> RepresentationDoc {
    RepresentationDoc {
        dim: r.dim(),
        label: r.label().to_string(),
        unitaries: r.unitaries().iter().map(|(&j, u)| (j, matrix_to_doc(u))).collect(),
    }
}

pub fn representation_from_doc(doc: &RepresentationDoc) -> Result<Representation> {
    let us = doc
        .unitaries
        .iter()
        .map(|(&j, m)| Ok((j, shaped(m, doc.dim, doc.dim, "unitary")?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    Representation::new(doc.dim, us, doc.label.clone())
}
