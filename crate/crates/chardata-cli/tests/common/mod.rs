//! JSON fixtures and in-process invocation helpers shared by the CLI and
//! acceptance suites.
#![allow(dead_code)] // each test target uses its own slice of the fixtures

use chardata_cli::commands::{run, Command, Invocation, Outcome, OutputFormat};
use chardata_cli::CliError;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

pub fn write_file(dir: &Path, name: &str, value: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

pub fn invoke(command: Command, format: OutputFormat) -> Result<Outcome, CliError> {
    run(&Invocation {
        command,
        format,
        assert_top_he: false,
        max_signs: 24,
    })
}

pub fn invoke_default(command: Command) -> Outcome {
    invoke(command, OutputFormat::Text).expect("command runs")
}

fn row(entries: &[i64]) -> Value {
    Value::Array(
        entries
            .iter()
            .map(|e| Value::String(e.to_string()))
            .collect(),
    )
}

/// Labeled triangle of the twisted-sphere family: facets e1, e2, e3 carry
/// the weights (0,1), (1,k), (1,0); the vertex v1 lies between e2 and e3.
pub fn triangle_polytope(k: i64) -> Value {
    json!({
        "kind": "polytope",
        "format_version": "1",
        "n": 2,
        "facet_count": 3,
        "vertices": [
            { "id": "v1", "facets": [1, 2] },
            { "id": "v2", "facets": [0, 2] },
            { "id": "v3", "facets": [0, 1] }
        ],
        "labels": [row(&[0, 1]), row(&[1, k]), row(&[1, 0])],
        "m": 2
    })
}

/// Hand-authored triangle characteristic data with full vertex lattices;
/// valid for every k, including the underdetermined k = 0 case.
pub fn triangle_chardata(k: i64) -> Value {
    json!({
        "kind": "chardata",
        "format_version": "1",
        "m": 2,
        "chern": { "type": "zero" },
        "top_strata_he": true,
        "strata": [
            { "id": "v1", "dim": 0, "lattice": [row(&[1, 0]), row(&[0, 1])] },
            { "id": "v2", "dim": 0, "lattice": [row(&[1, 0]), row(&[0, 1])] },
            { "id": "v3", "dim": 0, "lattice": [row(&[1, 0]), row(&[0, 1])] },
            { "id": "e1", "dim": 1, "lattice": [row(&[0, 1])] },
            { "id": "e2", "dim": 1, "lattice": [row(&[1, k])] },
            { "id": "e3", "dim": 1, "lattice": [row(&[1, 0])] },
            { "id": "P", "dim": 2, "lattice": [] }
        ],
        "relations": [
            ["v1", "e2"], ["v1", "e3"],
            ["v2", "e1"], ["v2", "e3"],
            ["v3", "e1"], ["v3", "e2"],
            ["e1", "P"], ["e2", "P"], ["e3", "P"]
        ]
    })
}

/// Square pyramid with apex A over base BCDE; facet order
/// base, front, back, right, left with the three-parameter weight family.
pub fn pyramid_polytope(a: i64, b: i64, k: i64) -> Value {
    json!({
        "kind": "polytope",
        "format_version": "1",
        "n": 3,
        "facet_count": 5,
        "vertices": [
            { "id": "A", "facets": [1, 2, 3, 4] },
            { "id": "B", "facets": [0, 1, 4] },
            { "id": "C", "facets": [0, 1, 3] },
            { "id": "D", "facets": [0, 2, 3] },
            { "id": "E", "facets": [0, 2, 4] }
        ],
        "labels": [
            row(&[0, 0, 1]),
            row(&[0, 1, 0]),
            row(&[0, 1, b]),
            row(&[1, k, a]),
            row(&[1, 0, 0])
        ],
        "m": 3
    })
}

/// Unit square with product labels; its data is that of the quadrant fan.
pub fn square_polytope() -> Value {
    json!({
        "kind": "polytope",
        "format_version": "1",
        "n": 2,
        "facet_count": 4,
        "vertices": [
            { "id": "q1", "facets": [0, 3] },
            { "id": "q2", "facets": [0, 1] },
            { "id": "q3", "facets": [1, 2] },
            { "id": "q4", "facets": [2, 3] }
        ],
        "labels": [row(&[0, 1]), row(&[1, 0]), row(&[0, 1]), row(&[1, 0])],
        "m": 2
    })
}

/// The complete fan of the projective plane.
pub fn plane_fan() -> Value {
    json!({
        "kind": "fan",
        "format_version": "1",
        "n": 2,
        "rays": [row(&[1, 0]), row(&[0, 1]), row(&[-1, -1])],
        "max_cones": [[0, 1], [1, 2], [0, 2]]
    })
}

/// The quadrant fan of a product of two projective lines.
pub fn quadrant_fan() -> Value {
    json!({
        "kind": "fan",
        "format_version": "1",
        "n": 2,
        "rays": [row(&[1, 0]), row(&[-1, 0]), row(&[0, 1]), row(&[0, -1])],
        "max_cones": [[0, 2], [1, 2], [1, 3], [0, 3]]
    })
}

/// Two-stratum data of the 3-sphere with a one-coordinate circle action:
/// disk orbit space with fixed boundary circle, m = 1.
pub fn sphere_chardata() -> Value {
    json!({
        "kind": "chardata",
        "format_version": "1",
        "m": 1,
        "chern": { "type": "zero" },
        "top_strata_he": true,
        "strata": [
            { "id": "boundary", "dim": 1, "lattice": [row(&[1])] },
            { "id": "interior", "dim": 2, "lattice": [] }
        ],
        "relations": [["boundary", "interior"]]
    })
}

pub fn lattice_file(m: usize, rows: &[&[i64]]) -> Value {
    json!({
        "kind": "lattice",
        "format_version": "1",
        "m": m,
        "rows": rows.iter().map(|r| row(r)).collect::<Vec<_>>()
    })
}
