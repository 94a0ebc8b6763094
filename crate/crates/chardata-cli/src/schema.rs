//! Self-describing JSON file format for the four input kinds.
//!
//! Every document carries a top-level `kind` tag (`chardata`, `fan`,
//! `polytope`, or `lattice`) and a `format_version`. Lattice entries, ray
//! coordinates, facet labels, and Chern coordinates are encoded as decimal
//! strings so arbitrary-precision values survive the trip.

use chardata::data::{CharData, ChernClass};
use chardata::fan::Fan;
use chardata::lattice::{GeneratorSet, Int, IntVec, SaturatedLattice};
use chardata::polytope::PolytopeIncidence;
use chardata::poset::{StratPoset, Stratum};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use crate::CliError;

pub const FORMAT_VERSION: &str = "1";

fn default_version() -> String {
    FORMAT_VERSION.to_string()
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum InputFile {
    #[serde(rename = "chardata")]
    CharData(CharDataFile),
    #[serde(rename = "fan")]
    Fan(FanFile),
    #[serde(rename = "polytope")]
    Polytope(PolytopeFile),
    #[serde(rename = "lattice")]
    Lattice(LatticeFile),
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct CharDataFile {
    #[serde(default = "default_version")]
    pub format_version: String,
    pub m: usize,
    pub chern: ChernFile,
    pub top_strata_he: bool,
    pub strata: Vec<StratumFile>,
    pub relations: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum ChernFile {
    #[serde(rename = "zero")]
    Zero,
    #[serde(rename = "opaque")]
    Opaque {
        tag: String,
        coords: Vec<Vec<String>>,
    },
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct StratumFile {
    pub id: String,
    pub dim: usize,
    pub lattice: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct FanFile {
    #[serde(default = "default_version")]
    pub format_version: String,
    pub n: usize,
    pub rays: Vec<Vec<String>>,
    pub max_cones: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct PolytopeFile {
    #[serde(default = "default_version")]
    pub format_version: String,
    pub n: usize,
    pub facet_count: usize,
    pub vertices: Vec<VertexFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct VertexFile {
    pub id: String,
    pub facets: Vec<usize>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct LatticeFile {
    #[serde(default = "default_version")]
    pub format_version: String,
    pub m: usize,
    pub rows: Vec<Vec<String>>,
}

/// A fully decoded input value.
#[derive(Debug, Clone)]
pub enum InputValue {
    CharData(CharData),
    Fan(Fan),
    Polytope(PolytopeIncidence),
    Lattice(GeneratorSet),
}

impl InputValue {
    pub fn kind(&self) -> &'static str {
        match self {
            InputValue::CharData(_) => "chardata",
            InputValue::Fan(_) => "fan",
            InputValue::Polytope(_) => "polytope",
            InputValue::Lattice(_) => "lattice",
        }
    }
}

fn parse_int(field: String, text: &str) -> Result<Int, CliError> {
    Int::from_str(text.trim()).map_err(|_| CliError::Schema {
        field,
        message: format!("not a decimal integer: {text:?}"),
    })
}

fn parse_vec(field: &str, entries: &[String], width: usize) -> Result<IntVec, CliError> {
    if entries.len() != width {
        return Err(CliError::Schema {
            field: field.to_string(),
            message: format!("expected {width} entries, found {}", entries.len()),
        });
    }
    let mut out = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        out.push(parse_int(format!("{field}[{i}]"), e)?);
    }
    Ok(IntVec::new(out))
}

fn int_vec_strings(v: &IntVec) -> Vec<String> {
    v.entries().iter().map(|e| e.to_string()).collect()
}

pub fn decode(file: InputFile) -> Result<InputValue, CliError> {
    match file {
        InputFile::CharData(f) => decode_chardata(f).map(InputValue::CharData),
        InputFile::Fan(f) => decode_fan(f).map(InputValue::Fan),
        InputFile::Polytope(f) => decode_polytope(f).map(InputValue::Polytope),
        InputFile::Lattice(f) => decode_lattice(f).map(InputValue::Lattice),
    }
}

fn decode_chardata(f: CharDataFile) -> Result<CharData, CliError> {
    let mut strata = Vec::new();
    let mut lambda = BTreeMap::new();
    let mut ids = BTreeSet::new();
    for (i, s) in f.strata.iter().enumerate() {
        if !ids.insert(s.id.clone()) {
            return Err(CliError::Schema {
                field: format!("strata[{i}].id"),
                message: format!("duplicate stratum id {:?}", s.id),
            });
        }
        strata.push(Stratum::new(s.id.clone(), s.dim));
        let mut rows = Vec::new();
        for (j, row) in s.lattice.iter().enumerate() {
            rows.push(parse_vec(&format!("strata[{i}].lattice[{j}]"), row, f.m)?);
        }
        let gens = GeneratorSet::new(f.m, rows).map_err(|e| CliError::Schema {
            field: format!("strata[{i}].lattice"),
            message: e.to_string(),
        })?;
        let lat = SaturatedLattice::from_generators(&gens).map_err(|e| CliError::Schema {
            field: format!("strata[{i}].lattice"),
            message: e.to_string(),
        })?;
        lambda.insert(s.id.clone(), lat);
    }
    for (i, (lo, hi)) in f.relations.iter().enumerate() {
        for id in [lo, hi] {
            if !ids.contains(id) {
                return Err(CliError::Schema {
                    field: format!("relations[{i}]"),
                    message: format!("unknown stratum id {id:?}"),
                });
            }
        }
    }
    let poset = StratPoset::new(strata, &f.relations).map_err(|e| CliError::Schema {
        field: "strata".to_string(),
        message: e.to_string(),
    })?;
    let chern = match f.chern {
        ChernFile::Zero => ChernClass::Zero,
        ChernFile::Opaque { tag, coords } => {
            let mut rows = Vec::new();
            for (i, row) in coords.iter().enumerate() {
                rows.push(parse_vec(&format!("chern.coords[{i}]"), row, f.m)?);
            }
            ChernClass::Opaque { tag, coords: rows }
        }
    };
    CharData::new(f.m, poset, lambda, chern, f.top_strata_he).map_err(|e| CliError::Schema {
        field: "strata".to_string(),
        message: e.to_string(),
    })
}

fn decode_fan(f: FanFile) -> Result<Fan, CliError> {
    let mut rays = Vec::new();
    for (i, ray) in f.rays.iter().enumerate() {
        rays.push(parse_vec(&format!("rays[{i}]"), ray, f.n)?);
    }
    Fan::from_max_cones(f.n, rays, f.max_cones).map_err(|e| CliError::Schema {
        field: "max_cones".to_string(),
        message: e.to_string(),
    })
}

fn decode_polytope(f: PolytopeFile) -> Result<PolytopeIncidence, CliError> {
    let width =
        f.m.or_else(|| f.labels.as_ref().and_then(|ls| ls.first().map(|l| l.len())));
    let labels = match &f.labels {
        Some(rows) => {
            let width = width.unwrap_or(f.n);
            let mut out = Vec::new();
            for (i, row) in rows.iter().enumerate() {
                out.push(parse_vec(&format!("labels[{i}]"), row, width)?);
            }
            Some(out)
        }
        None => None,
    };
    let vertices: Vec<(String, BTreeSet<usize>)> = f
        .vertices
        .iter()
        .map(|v| (v.id.clone(), v.facets.iter().copied().collect()))
        .collect();
    PolytopeIncidence::new(f.n, f.facet_count, vertices, labels, f.m).map_err(|e| {
        CliError::Schema {
            field: "vertices".to_string(),
            message: e.to_string(),
        }
    })
}

fn decode_lattice(f: LatticeFile) -> Result<GeneratorSet, CliError> {
    let mut rows = Vec::new();
    for (i, row) in f.rows.iter().enumerate() {
        rows.push(parse_vec(&format!("rows[{i}]"), row, f.m)?);
    }
    GeneratorSet::new(f.m, rows).map_err(|e| CliError::Schema {
        field: "rows".to_string(),
        message: e.to_string(),
    })
}

/// Reads and decodes one input file.
pub fn parse_input(path: &std::path::Path) -> Result<InputValue, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let file: InputFile = serde_json::from_str(&text).map_err(|e| CliError::Json {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    decode(file)
}

// --- encoding ---------------------------------------------------------------

pub fn encode_chardata(d: &CharData) -> CharDataFile {
    let mut strata: Vec<&Stratum> = d.poset().strata().iter().collect();
    strata.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.id.cmp(&b.id)));
    let strata_files = strata
        .iter()
        .map(|s| StratumFile {
            id: s.id.clone(),
            dim: s.dim,
            lattice: d
                .lambda_of(&s.id)
                .expect("stratum has lattice")
                .basis()
                .iter()
                .map(int_vec_strings)
                .collect(),
        })
        .collect();
    // covering pairs are enough: parsing closes the relation again
    let mut relations = Vec::new();
    for s in d.poset().strata() {
        for cover in d.poset().covers_of(&s.id) {
            relations.push((s.id.clone(), cover.to_string()));
        }
    }
    relations.sort();
    let chern = match d.chern() {
        ChernClass::Zero => ChernFile::Zero,
        ChernClass::Opaque { tag, coords } => ChernFile::Opaque {
            tag: tag.clone(),
            coords: coords.iter().map(int_vec_strings).collect(),
        },
    };
    CharDataFile {
        format_version: default_version(),
        m: d.m(),
        chern,
        top_strata_he: d.top_strata_he_asserted(),
        strata: strata_files,
        relations,
    }
}

pub fn encode_fan(f: &Fan) -> FanFile {
    FanFile {
        format_version: default_version(),
        n: f.n(),
        rays: f.rays().iter().map(int_vec_strings).collect(),
        max_cones: f.max_cones().to_vec(),
    }
}

pub fn encode_polytope(p: &PolytopeIncidence) -> PolytopeFile {
    PolytopeFile {
        format_version: default_version(),
        n: p.n(),
        facet_count: p.facet_count(),
        vertices: p
            .vertices()
            .iter()
            .map(|(id, facets)| VertexFile {
                id: id.clone(),
                facets: facets.iter().copied().collect(),
            })
            .collect(),
        labels: p
            .labels()
            .map(|ls| ls.iter().map(int_vec_strings).collect()),
        m: Some(p.m()),
    }
}

pub fn encode_lattice(g: &GeneratorSet) -> LatticeFile {
    LatticeFile {
        format_version: default_version(),
        m: g.ambient_rank(),
        rows: g.rows().iter().map(int_vec_strings).collect(),
    }
}

pub fn to_json_string(file: &InputFile) -> String {
    serde_json::to_string_pretty(file).expect("serializable") + "\n"
}
