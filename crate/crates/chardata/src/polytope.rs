//! Convex-polytope front end: face posets from vertex-facet incidence, and
//! facet labelings (characteristic functions) turned into characteristic
//! data.
//!
//! Input is purely combinatorial; the face lattice is recovered as the meet
//! closure of the facets' vertex sets. A face is assigned the saturation of
//! the span of the labels of the facets containing it, with the saturation
//! index recorded as its orbifold defect. On simple polytopes this
//! reproduces the classical facet-product construction; on non-simple
//! polytopes a face whose facet labels span less than its codimension is a
//! hard validation error, reported instead of inventing a lattice
//! (directly supplied characteristic data remains the escape hatch).

use crate::data::{CharData, ChernClass, DataError, ValidationReport};
use crate::lattice::{GeneratorSet, IntVec, SaturatedLattice};
use crate::poset::{PosetError, StratPoset, Stratum};
use num_bigint::BigUint;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("polytope has no vertices")]
    EmptyPolytope,
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertexId(String),
    #[error("vertex {vertex:?} references facet {index}, only {facet_count} facets declared")]
    FacetIndexOutOfRange {
        vertex: String,
        index: usize,
        facet_count: usize,
    },
    #[error("facet {index} contains no vertices")]
    FacetWithoutVertices { index: usize },
    #[error("vertex {vertex:?} lies on {found} facets, a vertex of an {n}-polytope needs >= {n}")]
    VertexInTooFewFacets {
        vertex: String,
        found: usize,
        n: usize,
    },
    #[error("{expected} facet labels expected, {found} given")]
    LabelCountMismatch { expected: usize, found: usize },
    #[error("facet label {index} is not primitive")]
    NonPrimitiveLabel { index: usize },
    #[error("facet label {index} has {found} entries, expected {expected}")]
    LabelWidthMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("label rank m = {m} is below the polytope dimension n = {n}")]
    AmbientBelowDimension { m: usize, n: usize },
    #[error("face lattice heights are inconsistent: {0}")]
    HeightInconsistency(String),
    #[error("labels are required to build characteristic data")]
    MissingLabels,
    #[error("characteristic function fails validation: {0}")]
    InvalidCharacteristicFunction(ValidationReport),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Vertex-facet incidence of an `n`-dimensional convex polytope, with an
/// optional primitive label per facet (the characteristic function).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeIncidence {
    n: usize,
    facet_count: usize,
    vertices: Vec<(String, BTreeSet<usize>)>,
    labels: Option<Vec<IntVec>>,
    m: usize,
}

impl PolytopeIncidence {
    pub fn new(
        n: usize,
        facet_count: usize,
        vertices: Vec<(String, BTreeSet<usize>)>,
        labels: Option<Vec<IntVec>>,
        m: Option<usize>,
    ) -> Result<Self, PolytopeError> {
        if vertices.is_empty() {
            return Err(PolytopeError::EmptyPolytope);
        }
        let mut ids = BTreeSet::new();
        for (id, facets) in &vertices {
            if !ids.insert(id.clone()) {
                return Err(PolytopeError::DuplicateVertexId(id.clone()));
            }
            for &f in facets {
                if f >= facet_count {
                    return Err(PolytopeError::FacetIndexOutOfRange {
                        vertex: id.clone(),
                        index: f,
                        facet_count,
                    });
                }
            }
            if facets.len() < n {
                return Err(PolytopeError::VertexInTooFewFacets {
                    vertex: id.clone(),
                    found: facets.len(),
                    n,
                });
            }
        }
        let m = match &labels {
            Some(rows) => {
                if rows.len() != facet_count {
                    return Err(PolytopeError::LabelCountMismatch {
                        expected: facet_count,
                        found: rows.len(),
                    });
                }
                let width = m.or_else(|| rows.first().map(|r| r.dim())).unwrap_or(n);
                for (index, row) in rows.iter().enumerate() {
                    if row.dim() != width {
                        return Err(PolytopeError::LabelWidthMismatch {
                            index,
                            expected: width,
                            found: row.dim(),
                        });
                    }
                    if !row.is_primitive() {
                        return Err(PolytopeError::NonPrimitiveLabel { index });
                    }
                }
                if width < n {
                    return Err(PolytopeError::AmbientBelowDimension { m: width, n });
                }
                width
            }
            None => m.unwrap_or(n),
        };
        Ok(PolytopeIncidence {
            n,
            facet_count,
            vertices,
            labels,
            m,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn facet_count(&self) -> usize {
        self.facet_count
    }

    pub fn vertices(&self) -> &[(String, BTreeSet<usize>)] {
        &self.vertices
    }

    pub fn labels(&self) -> Option<&[IntVec]> {
        self.labels.as_deref()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// True iff every vertex lies on exactly `n` facets.
    pub fn is_simple(&self) -> bool {
        self.vertices
            .iter()
            .all(|(_, facets)| facets.len() == self.n)
    }

    /// Vertex-index sets of the faces: the meet closure of the facets'
    /// vertex sets under the full vertex set.
    fn face_sets(&self) -> Result<Vec<BTreeSet<usize>>, PolytopeError> {
        let facet_verts: Vec<BTreeSet<usize>> = (0..self.facet_count)
            .map(|f| {
                (0..self.vertices.len())
                    .filter(|&v| self.vertices[v].1.contains(&f))
                    .collect()
            })
            .collect();
        for (index, verts) in facet_verts.iter().enumerate() {
            if verts.is_empty() {
                return Err(PolytopeError::FacetWithoutVertices { index });
            }
        }
        let full: BTreeSet<usize> = (0..self.vertices.len()).collect();
        let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        seen.insert(full.clone());
        let mut queue = vec![full];
        while let Some(cur) = queue.pop() {
            for verts in &facet_verts {
                let inter: BTreeSet<usize> = cur.intersection(verts).copied().collect();
                if !inter.is_empty() && seen.insert(inter.clone()) {
                    queue.push(inter);
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    /// Facets containing every vertex of the face.
    fn facet_set_of(&self, face: &BTreeSet<usize>) -> BTreeSet<usize> {
        (0..self.facet_count)
            .filter(|f| face.iter().all(|&v| self.vertices[v].1.contains(f)))
            .collect()
    }

    fn face_id(&self, face: &BTreeSet<usize>, facets: &BTreeSet<usize>) -> String {
        if face.len() == 1 {
            let &v = face.iter().next().expect("singleton");
            return self.vertices[v].0.clone();
        }
        if facets.is_empty() {
            return "poly".to_string();
        }
        let parts: Vec<String> = facets.iter().map(|f| f.to_string()).collect();
        format!("f{}", parts.join("-"))
    }

    /// Face poset of the polytope: faces ordered by inclusion of vertex
    /// sets, graded by longest-chain height with vertices at dimension 0 and
    /// the polytope itself at dimension `n`. Stratum ids are the user vertex
    /// ids for vertices, sorted facet-index sets for other proper faces, and
    /// `poly` for the full polytope.
    pub fn face_poset(&self) -> Result<StratPoset, PolytopeError> {
        let mut faces = self.face_sets()?;
        faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        // longest-chain height over proper subsets
        let mut heights = vec![0usize; faces.len()];
        for i in 0..faces.len() {
            for j in 0..i {
                if faces[j].len() < faces[i].len() && faces[j].is_subset(&faces[i]) {
                    heights[i] = heights[i].max(heights[j] + 1);
                }
            }
        }
        for (face, &h) in faces.iter().zip(&heights) {
            if h == 0 && face.len() != 1 {
                return Err(PolytopeError::HeightInconsistency(format!(
                    "minimal face with {} vertices is not a vertex",
                    face.len()
                )));
            }
        }
        let top = heights.last().copied().unwrap_or(0);
        if top != self.n {
            return Err(PolytopeError::HeightInconsistency(format!(
                "polytope height {top} differs from the declared dimension {}",
                self.n
            )));
        }
        let ids: Vec<String> = faces
            .iter()
            .map(|f| self.face_id(f, &self.facet_set_of(f)))
            .collect();
        let strata: Vec<Stratum> = ids
            .iter()
            .zip(&heights)
            .map(|(id, &h)| Stratum::new(id.clone(), h))
            .collect();
        let mut pairs = Vec::new();
        for i in 0..faces.len() {
            for j in 0..faces.len() {
                if i != j && faces[i].is_subset(&faces[j]) {
                    pairs.push((ids[i].clone(), ids[j].clone()));
                }
            }
        }
        Ok(StratPoset::new(strata, &pairs)?)
    }

    /// Characteristic data of the labeled polytope: each face is assigned
    /// the saturation of the span of the labels of its facets, with the
    /// saturation index recorded as the face's defect. Validation runs
    /// before returning; a face whose labels span less than its codimension
    /// is reported as a hard error naming the face and the offending rank.
    pub fn to_chardata(&self) -> Result<CharData, PolytopeError> {
        let labels = self.labels.as_ref().ok_or(PolytopeError::MissingLabels)?;
        let poset = self.face_poset()?;
        let faces = self.face_sets()?;
        let mut lambda = BTreeMap::new();
        let mut defects: BTreeMap<String, BigUint> = BTreeMap::new();
        for face in &faces {
            let facets = self.facet_set_of(face);
            let id = self.face_id(face, &facets);
            let rows: Vec<IntVec> = facets.iter().map(|&f| labels[f].clone()).collect();
            let gens = GeneratorSet::new(self.m, rows).map_err(DataError::from)?;
            let (lat, index) = SaturatedLattice::saturation(&gens);
            lambda.insert(id.clone(), lat);
            defects.insert(id, index);
        }
        let data =
            CharData::new(self.m, poset, lambda, ChernClass::Zero, true)?.with_defects(defects)?;
        let report = data.validate();
        if !report.is_valid() {
            return Err(PolytopeError::InvalidCharacteristicFunction(report));
        }
        Ok(data)
    }
}
