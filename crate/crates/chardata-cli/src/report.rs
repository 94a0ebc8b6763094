//! Deterministic text and JSON rendering of reports. Strata are always
//! listed by (dim, id); every collection comes from an ordered container, so
//! repeated runs emit identical bytes.

use chardata::data::{CharData, InspectReport, ValidationReport};
use chardata::fan::FanReport;
use chardata::iso::{Fingerprint, IsoWitness, Mode, Verdict};
use chardata::poset::Stratum;
use serde_json::{json, Value};

pub fn stratum_lines(d: &CharData) -> Vec<String> {
    let mut strata: Vec<&Stratum> = d.poset().strata().iter().collect();
    strata.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.id.cmp(&b.id)));
    strata
        .iter()
        .map(|s| {
            let lat = d.lambda_of(&s.id).expect("stratum has lattice");
            let basis: Vec<String> = lat.basis().iter().map(|r| r.to_string()).collect();
            let defect = d
                .defects()
                .get(&s.id)
                .map(|x| x.to_string())
                .unwrap_or_else(|| "-".to_string());
            format!(
                "stratum {}  dim {}  codim {}  lattice [{}]  defect {}",
                s.id,
                s.dim,
                d.poset().codim_of(&s.id).expect("stratum exists"),
                basis.join(", "),
                defect
            )
        })
        .collect()
}

pub fn chardata_text(d: &CharData, title: &str) -> String {
    let mut out = Vec::new();
    out.push(format!(
        "{title}: m = {}, l = {}, n = {}, {} strata{}",
        d.m(),
        d.l(),
        d.n(),
        d.poset().len(),
        if d.is_skeleton() {
            " (skeleton: validation deferred)"
        } else {
            ""
        }
    ));
    if d.is_empty() {
        out.push("empty data".to_string());
    }
    out.extend(stratum_lines(d));
    out.join("\n") + "\n"
}

pub fn validation_text(report: &ValidationReport) -> String {
    if report.is_valid() {
        "valid\n".to_string()
    } else {
        let mut out: Vec<String> = report
            .violations
            .iter()
            .map(|v| format!("violation: {v}"))
            .collect();
        out.push(format!("invalid: {} violation(s)", report.violations.len()));
        out.join("\n") + "\n"
    }
}

pub fn validation_json(command: &str, report: &ValidationReport) -> Value {
    json!({
        "kind": "report",
        "command": command,
        "status": if report.is_valid() { "valid" } else { "invalid" },
        "violations": report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
    })
}

pub fn fan_report_text(report: &FanReport) -> String {
    let mut out = Vec::new();
    for v in &report.violations {
        out.push(format!("violation: {v}"));
    }
    for w in &report.warnings {
        out.push(format!("warning: {w}"));
    }
    out.push(format!(
        "fan: simplicial = {}, complete = {}",
        report.simplicial,
        match report.complete {
            Some(true) => "yes",
            Some(false) => "no",
            None => "unchecked",
        }
    ));
    out.push(if report.is_valid() {
        "valid".into()
    } else {
        "invalid".into()
    });
    out.join("\n") + "\n"
}

pub fn fan_report_json(report: &FanReport) -> Value {
    json!({
        "kind": "report",
        "command": "validate",
        "status": if report.is_valid() { "valid" } else { "invalid" },
        "simplicial": report.simplicial,
        "complete": report.complete,
        "violations": report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "warnings": report.warnings.clone(),
    })
}

pub fn inspect_text(r: &InspectReport) -> String {
    let mut out = Vec::new();
    out.push(format!("l = {}, n = {}, m = {}", r.l, r.n, r.m));
    out.push(format!("total model dimension {}", r.total_dim));
    out.push(format!("free part dimension {}", r.free_dim));
    for level in &r.skeleta {
        out.push(format!(
            "skeleton i = {}: model dim {}, {} stratum(s) of orbit dim {}",
            level.i,
            level.model_dim,
            level.stratum_count,
            r.l + level.i
        ));
    }
    out.push(format!(
        "fixed components ({}): {}",
        r.fixed_components.len(),
        if r.fixed_components.is_empty() {
            "-".into()
        } else {
            r.fixed_components.join(", ")
        }
    ));
    if !r.defects.is_empty() {
        let entries: Vec<String> = r
            .defects
            .iter()
            .map(|(id, d)| format!("{id}: {d}"))
            .collect();
        out.push(format!("defects: {}", entries.join(", ")));
    }
    out.push(format!(
        "top strata homotopy condition asserted: {}",
        r.top_strata_he_asserted
    ));
    if r.skeleton {
        out.push("skeleton data (validation deferred)".to_string());
    }
    out.join("\n") + "\n"
}

pub fn inspect_json(r: &InspectReport) -> Value {
    json!({
        "kind": "report",
        "command": "inspect",
        "l": r.l,
        "n": r.n,
        "m": r.m,
        "total_dim": r.total_dim,
        "free_dim": r.free_dim,
        "skeleta": r.skeleta.iter().map(|s| json!({
            "i": s.i,
            "model_dim": s.model_dim,
            "stratum_count": s.stratum_count,
        })).collect::<Vec<_>>(),
        "fixed_components": r.fixed_components.clone(),
        "defects": r.defects.iter()
            .map(|(id, d)| (id.clone(), Value::String(d.to_string())))
            .collect::<serde_json::Map<String, Value>>(),
        "top_strata_he": r.top_strata_he_asserted,
        "skeleton": r.skeleton,
    })
}

fn witness_lines(w: &IsoWitness) -> Vec<String> {
    let mut out = Vec::new();
    out.push(format!("mode: {}", w.mode));
    for (s, t) in w.poset_iso.mapping() {
        out.push(format!("map {s} -> {t}"));
    }
    for row in w.psi.matrix() {
        let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
        out.push(format!("psi [{}]", cells.join(", ")));
    }
    out
}

pub fn verdict_text(v: &Verdict, mode: Mode, conditional: bool) -> String {
    let mut out = Vec::new();
    match v {
        Verdict::Isomorphic(w) => {
            out.push(format!("ISOMORPHIC ({mode})"));
            out.extend(witness_lines(w));
        }
        Verdict::NotIsomorphic { certificate } => {
            out.push(format!("NOT_ISOMORPHIC ({mode})"));
            out.push(format!("certificate: {certificate}"));
        }
        Verdict::Undecided { reason } => {
            out.push(format!("UNDECIDED ({mode})"));
            out.push(format!("reason: {reason}"));
        }
    }
    if conditional {
        out.push(
            "note: verdict is conditional on the unverified top-strata homotopy condition"
                .to_string(),
        );
    }
    out.join("\n") + "\n"
}

pub fn verdict_json(v: &Verdict, mode: Mode, conditional: bool) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("kind".into(), "report".into());
    obj.insert("command".into(), "iso".into());
    obj.insert("mode".into(), mode.to_string().into());
    obj.insert("conditional".into(), conditional.into());
    match v {
        Verdict::Isomorphic(w) => {
            obj.insert("verdict".into(), "isomorphic".into());
            let map: serde_json::Map<String, Value> = w
                .poset_iso
                .mapping()
                .iter()
                .map(|(s, t)| (s.clone(), Value::String(t.clone())))
                .collect();
            let psi: Vec<Vec<String>> = w
                .psi
                .matrix()
                .iter()
                .map(|row| row.iter().map(|e| e.to_string()).collect())
                .collect();
            obj.insert("witness".into(), json!({ "poset_iso": map, "psi": psi }));
        }
        Verdict::NotIsomorphic { certificate } => {
            obj.insert("verdict".into(), "not_isomorphic".into());
            obj.insert("certificate".into(), certificate.clone().into());
        }
        Verdict::Undecided { reason } => {
            obj.insert("verdict".into(), "undecided".into());
            obj.insert("reason".into(), reason.clone().into());
        }
    }
    Value::Object(obj)
}

pub fn fingerprint_text(fp: &Fingerprint) -> String {
    let mut out = Vec::new();
    for key in fp.keys() {
        let invs: Vec<String> = key.cover_invariants.iter().map(|d| d.to_string()).collect();
        out.push(format!(
            "key dim {} rank {} down {} up {} cover-invariants [{}]",
            key.dim,
            key.rank,
            key.down_degree,
            key.up_degree,
            invs.join(", ")
        ));
    }
    out.join("\n") + "\n"
}

pub fn fingerprint_json(fp: &Fingerprint) -> Value {
    json!({
        "kind": "report",
        "command": "fingerprint",
        "keys": fp.keys().iter().map(|k| json!({
            "dim": k.dim,
            "rank": k.rank,
            "down_degree": k.down_degree,
            "up_degree": k.up_degree,
            "cover_invariants": k.cover_invariants.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

pub fn json_line(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}
