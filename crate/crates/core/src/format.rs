//! JSON file formats.
//!
//! Matrices are `{"rows": n, "cols": k, "data": [[re, im], ...]}` in
//! column-major order; vectors are `n x 1` matrices.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hilbert::{CMatrix, Ray, Subspace};
use crate::isometry::{Isometry, OperatorClass};
use crate::projective::{line_through, Line, LineSample, RayMapTable};
use crate::tolerance::Tolerance;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data: m.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Format(format!(
                "matrix declares {}x{} but carries {} entries",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        if self.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CMatrix::from_iterator(
            self.rows,
            self.cols,
            self.data.iter().map(|&[re, im]| Complex64::new(re, im)),
        ))
    }

    pub fn to_ray(&self) -> Result<Ray> {
        if self.cols != 1 {
            return Err(Error::Format(format!(
                "expected a column vector, got {} columns",
                self.cols
            )));
        }
        Ray::new(self.to_matrix()?.column(0).into_owned())
    }

    /// Orthonormalizes the columns.
    pub fn to_subspace(&self, tol: &Tolerance) -> Result<Subspace> {
        Subspace::from_columns(&self.to_matrix()?, tol)
    }

    pub fn from_ray(r: &Ray) -> Self {
        Self::from_matrix(&CMatrix::from_column_slice(
            r.ambient(),
            1,
            r.vector().as_slice(),
        ))
    }
}

/// `#[serde(with = "matrix")]` adapter for [`CMatrix`] fields.
pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from_matrix(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMatrix, D::Error> {
        MatrixJson::deserialize(d)?
            .to_matrix()
            .map_err(D::Error::custom)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairJson {
    pub source: MatrixJson,
    pub image: MatrixJson,
}

pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

pub fn ray_table_from_json(text: &str, tol: &Tolerance) -> Result<RayMapTable> {
    let pairs: Vec<PairJson> = parse(text)?;
    let n = pairs
        .first()
        .map(|p| p.source.rows)
        .ok_or_else(|| Error::Format("ray table is empty".into()))?;
    let mut table = RayMapTable::new(n)?;
    for (i, p) in pairs.iter().enumerate() {
        let source = p.source.to_ray().map_err(|e| at(i, "source", e))?;
        let image = p.image.to_ray().map_err(|e| at(i, "image", e))?;
        table.insert(source, image, tol)?;
    }
    Ok(table)
}

fn at(i: usize, field: &str, e: Error) -> Error {
    Error::Format(format!("entry {i} {field}: {e}"))
}

pub fn ray_table_to_json(table: &RayMapTable) -> Vec<PairJson> {
    table
        .pairs()
        .iter()
        .map(|(s, i)| PairJson {
            source: MatrixJson::from_ray(s),
            image: MatrixJson::from_ray(i),
        })
        .collect()
}

/// A line file entry: explicit member rays and an optional carrier. Without a
/// carrier the line through the first two distinct members is used.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LineJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carrier: Option<MatrixJson>,
    pub members: Vec<MatrixJson>,
}

pub fn lines_from_json(text: &str, tol: &Tolerance) -> Result<Vec<LineSample>> {
    let lines: Vec<LineJson> = parse(text)?;
    lines
        .iter()
        .enumerate()
        .map(|(li, l)| {
            let members = l
                .members
                .iter()
                .map(MatrixJson::to_ray)
                .collect::<Result<Vec<_>>>()?;
            let line = match &l.carrier {
                Some(c) => Line::new(c.to_subspace(tol)?)?,
                None => members
                    .iter()
                    .skip(1)
                    .find_map(|m| line_through(&members[0], m, tol).ok())
                    .ok_or_else(|| {
                        Error::Format(format!("line {li} has fewer than two distinct members"))
                    })?,
            };
            Ok(LineSample { line, members })
        })
        .collect()
}

/// Hypergraph file; contexts are recomputed when absent.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HypergraphJson {
    pub d: usize,
    pub rays: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contexts: Option<Vec<Vec<usize>>>,
}

impl HypergraphJson {
    pub fn rays(&self) -> Result<Vec<Ray>> {
        self.rays
            .iter()
            .enumerate()
            .map(|(i, m)| m.to_ray().map_err(|e| at(i, "ray", e)))
            .collect()
    }
}

/// An oracle given as the isometry inducing it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub matrix: MatrixJson,
    pub class: OperatorClass,
    pub k: usize,
}

impl GeneratorJson {
    pub fn isometry(&self, tol: &Tolerance) -> Result<Isometry> {
        Isometry::new(self.matrix.to_matrix()?, self.class, tol)
    }
}

/// A tabulated map of `G_k(C^n)`: source and image bases.
pub fn subspace_pairs_from_json(text: &str, tol: &Tolerance) -> Result<Vec<(Subspace, Subspace)>> {
    let pairs: Vec<PairJson> = parse(text)?;
    pairs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            Ok((
                p.source.to_subspace(tol).map_err(|e| at(i, "source", e))?,
                p.image.to_subspace(tol).map_err(|e| at(i, "image", e))?,
            ))
        })
        .collect()
}
