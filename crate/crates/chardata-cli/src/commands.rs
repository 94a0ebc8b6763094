//! Command dispatch. Each command parses its inputs, runs the corresponding
//! library operation, and renders a deterministic report plus an exit code:
//! 0 valid/isomorphic/success, 1 violations/not isomorphic, 2 undecided,
//! 3 usage, 4 I/O.

use crate::report;
use crate::schema::{self, InputFile, InputValue};
use crate::CliError;
use chardata::data::CharData;
use chardata::fan::FanError;
use chardata::iso::{decide, fingerprint, DecideOptions, Mode, Verdict};
use chardata::lattice::smith_invariants;
use chardata::polytope::PolytopeError;
use serde_json::json;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Debug)]
pub enum Command {
    Validate { path: PathBuf },
    Inspect { path: PathBuf },
    Link { path: PathBuf, stratum: String },
    Iso { a: PathBuf, b: PathBuf, mode: Mode },
    Fan2cd { path: PathBuf },
    Poly2cd { path: PathBuf },
    Skeleton { path: PathBuf, index: usize },
    Snf { path: PathBuf },
    Fingerprint { path: PathBuf },
}

#[derive(Clone, Debug)]
pub struct Invocation {
    pub command: Command,
    pub format: OutputFormat,
    pub assert_top_he: bool,
    pub max_signs: usize,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit: i32,
    pub output: String,
}

fn ok(output: String) -> Outcome {
    Outcome { exit: 0, output }
}

impl Invocation {
    fn parse(&self, path: &Path) -> Result<InputValue, CliError> {
        let value = schema::parse_input(path)?;
        Ok(match value {
            InputValue::CharData(d) if self.assert_top_he => {
                InputValue::CharData(d.assert_top_he())
            }
            other => other,
        })
    }

    fn parse_chardata(&self, path: &Path) -> Result<CharData, CliError> {
        match self.parse(path)? {
            InputValue::CharData(d) => Ok(d),
            other => Err(CliError::WrongKind {
                expected: "chardata",
                found: other.kind().into(),
            }),
        }
    }

    fn render_chardata(&self, d: &CharData, title: &str) -> String {
        match self.format {
            OutputFormat::Text => report::chardata_text(d, title),
            OutputFormat::Json => {
                schema::to_json_string(&InputFile::CharData(schema::encode_chardata(d)))
            }
        }
    }
}

pub fn run(inv: &Invocation) -> Result<Outcome, CliError> {
    match &inv.command {
        Command::Validate { path } => run_validate(inv, path),
        Command::Inspect { path } => {
            let d = inv.parse_chardata(path)?;
            match d.inspect() {
                Ok(r) => Ok(ok(match inv.format {
                    OutputFormat::Text => report::inspect_text(&r),
                    OutputFormat::Json => report::json_line(&report::inspect_json(&r)),
                })),
                Err(chardata::data::DataError::Invalid(rep)) => Ok(Outcome {
                    exit: 1,
                    output: match inv.format {
                        OutputFormat::Text => report::validation_text(&rep),
                        OutputFormat::Json => {
                            report::json_line(&report::validation_json("inspect", &rep))
                        }
                    },
                }),
                Err(e) => Err(CliError::BadArgument(e.to_string())),
            }
        }
        Command::Link { path, stratum } => {
            let d = inv.parse_chardata(path)?;
            match d.link_data(stratum) {
                Ok(link) => Ok(ok(inv.render_chardata(&link, &format!("link at {stratum}")))),
                Err(chardata::data::DataError::UnknownStratum(id)) => {
                    Err(CliError::UnknownStratum(id))
                }
                Err(chardata::data::DataError::Invalid(rep)) => Ok(Outcome {
                    exit: 1,
                    output: match inv.format {
                        OutputFormat::Text => report::validation_text(&rep),
                        OutputFormat::Json => {
                            report::json_line(&report::validation_json("link", &rep))
                        }
                    },
                }),
                Err(e) => Err(CliError::BadArgument(e.to_string())),
            }
        }
        Command::Iso { a, b, mode } => {
            let da = inv.parse_chardata(a)?;
            let db = inv.parse_chardata(b)?;
            let opts = DecideOptions {
                max_signs: inv.max_signs,
                ..DecideOptions::default()
            };
            match decide(&da, &db, *mode, &opts) {
                Ok(verdict) => {
                    let conditional = !da.top_strata_he_asserted() || !db.top_strata_he_asserted();
                    let exit = match verdict {
                        Verdict::Isomorphic(_) => 0,
                        Verdict::NotIsomorphic { .. } => 1,
                        Verdict::Undecided { .. } => 2,
                    };
                    let output = match inv.format {
                        OutputFormat::Text => report::verdict_text(&verdict, *mode, conditional),
                        OutputFormat::Json => {
                            report::json_line(&report::verdict_json(&verdict, *mode, conditional))
                        }
                    };
                    Ok(Outcome { exit, output })
                }
                Err(e) => {
                    let (which, rep) = match e {
                        chardata::iso::IsoError::InvalidLeft(r) => ("left", r),
                        chardata::iso::IsoError::InvalidRight(r) => ("right", r),
                    };
                    Ok(Outcome {
                        exit: 1,
                        output: match inv.format {
                            OutputFormat::Text => {
                                format!("{which} input invalid\n{}", report::validation_text(&rep))
                            }
                            OutputFormat::Json => {
                                report::json_line(&report::validation_json("iso", &rep))
                            }
                        },
                    })
                }
            }
        }
        Command::Fan2cd { path } => {
            let fan = match inv.parse(path)? {
                InputValue::Fan(f) => f,
                other => {
                    return Err(CliError::WrongKind {
                        expected: "fan",
                        found: other.kind().into(),
                    })
                }
            };
            match fan.to_chardata() {
                Ok(d) => Ok(ok(inv.render_chardata(&d, "fan data"))),
                Err(FanError::Invalid(rep)) => Ok(Outcome {
                    exit: 1,
                    output: match inv.format {
                        OutputFormat::Text => report::fan_report_text(&rep),
                        OutputFormat::Json => report::json_line(&report::fan_report_json(&rep)),
                    },
                }),
                Err(FanError::InvalidOutput(rep)) => Ok(Outcome {
                    exit: 1,
                    output: match inv.format {
                        OutputFormat::Text => report::validation_text(&rep),
                        OutputFormat::Json => {
                            report::json_line(&report::validation_json("fan2cd", &rep))
                        }
                    },
                }),
                Err(e) => Err(CliError::BadArgument(e.to_string())),
            }
        }
        Command::Poly2cd { path } => {
            let poly = match inv.parse(path)? {
                InputValue::Polytope(p) => p,
                other => {
                    return Err(CliError::WrongKind {
                        expected: "polytope",
                        found: other.kind().into(),
                    })
                }
            };
            match poly.to_chardata() {
                Ok(d) => Ok(ok(inv.render_chardata(&d, "polytope data"))),
                Err(PolytopeError::InvalidCharacteristicFunction(rep)) => Ok(Outcome {
                    exit: 1,
                    output: match inv.format {
                        OutputFormat::Text => report::validation_text(&rep),
                        OutputFormat::Json => {
                            report::json_line(&report::validation_json("poly2cd", &rep))
                        }
                    },
                }),
                Err(e) => Err(CliError::BadArgument(e.to_string())),
            }
        }
        Command::Skeleton { path, index } => {
            let d = inv.parse_chardata(path)?;
            match d.restrict_to_skeleton(*index) {
                Ok(sk) => Ok(ok(
                    inv.render_chardata(&sk, &format!("skeleton i = {index}"))
                )),
                Err(e) => Err(CliError::BadArgument(e.to_string())),
            }
        }
        Command::Snf { path } => {
            let g = match inv.parse(path)? {
                InputValue::Lattice(g) => g,
                other => {
                    return Err(CliError::WrongKind {
                        expected: "lattice",
                        found: other.kind().into(),
                    })
                }
            };
            let invariants = smith_invariants(&g);
            Ok(ok(match inv.format {
                OutputFormat::Text => {
                    let entries: Vec<String> = invariants.iter().map(|d| d.to_string()).collect();
                    format!("smith invariants: [{}]\n", entries.join(", "))
                }
                OutputFormat::Json => report::json_line(&json!({
                    "kind": "report",
                    "command": "snf",
                    "invariants": invariants.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                })),
            }))
        }
        Command::Fingerprint { path } => {
            let d = inv.parse_chardata(path)?;
            let rep = d.validate();
            if !rep.is_valid() {
                return Ok(Outcome {
                    exit: 1,
                    output: match inv.format {
                        OutputFormat::Text => report::validation_text(&rep),
                        OutputFormat::Json => {
                            report::json_line(&report::validation_json("fingerprint", &rep))
                        }
                    },
                });
            }
            let fp = fingerprint(&d);
            Ok(ok(match inv.format {
                OutputFormat::Text => report::fingerprint_text(&fp),
                OutputFormat::Json => report::json_line(&report::fingerprint_json(&fp)),
            }))
        }
    }
}

fn run_validate(inv: &Invocation, path: &Path) -> Result<Outcome, CliError> {
    match inv.parse(path)? {
        InputValue::CharData(d) => {
            let rep = d.validate();
            let exit = i32::from(!rep.is_valid());
            Ok(Outcome {
                exit,
                output: match inv.format {
                    OutputFormat::Text => report::validation_text(&rep),
                    OutputFormat::Json => {
                        report::json_line(&report::validation_json("validate", &rep))
                    }
                },
            })
        }
        InputValue::Fan(fan) => {
            let rep = fan.validate(true);
            let exit = i32::from(!rep.is_valid());
            Ok(Outcome {
                exit,
                output: match inv.format {
                    OutputFormat::Text => report::fan_report_text(&rep),
                    OutputFormat::Json => report::json_line(&report::fan_report_json(&rep)),
                },
            })
        }
        InputValue::Polytope(poly) => {
            // structural checks passed at parse time; with labels present the
            // characteristic function is validated via conversion
            match poly.labels() {
                None => Ok(ok(match inv.format {
                    OutputFormat::Text => format!(
                        "polytope: n = {}, {} facets, {} vertices, simple = {}\nvalid\n",
                        poly.n(),
                        poly.facet_count(),
                        poly.vertices().len(),
                        poly.is_simple()
                    ),
                    OutputFormat::Json => report::json_line(&json!({
                        "kind": "report",
                        "command": "validate",
                        "status": "valid",
                        "simple": poly.is_simple(),
                        "violations": [],
                    })),
                })),
                Some(_) => match poly.to_chardata() {
                    Ok(_) => Ok(ok(match inv.format {
                        OutputFormat::Text => format!(
                            "polytope: simple = {}\ncharacteristic function valid\n",
                            poly.is_simple()
                        ),
                        OutputFormat::Json => report::json_line(&json!({
                            "kind": "report",
                            "command": "validate",
                            "status": "valid",
                            "simple": poly.is_simple(),
                            "violations": [],
                        })),
                    })),
                    Err(PolytopeError::InvalidCharacteristicFunction(rep)) => Ok(Outcome {
                        exit: 1,
                        output: match inv.format {
                            OutputFormat::Text => report::validation_text(&rep),
                            OutputFormat::Json => {
                                report::json_line(&report::validation_json("validate", &rep))
                            }
                        },
                    }),
                    Err(e) => Err(CliError::BadArgument(e.to_string())),
                },
            }
        }
        InputValue::Lattice(g) => {
            let (basis, rank) = chardata::lattice::canonicalize(&g);
            let (_, index) = chardata::lattice::SaturatedLattice::saturation(&g);
            Ok(ok(match inv.format {
                OutputFormat::Text => {
                    let rows: Vec<String> = basis.iter().map(|r| r.to_string()).collect();
                    format!(
                        "lattice: rank {rank}, canonical basis [{}], saturation index {index}\nvalid\n",
                        rows.join(", ")
                    )
                }
                OutputFormat::Json => report::json_line(&json!({
                    "kind": "report",
                    "command": "validate",
                    "status": "valid",
                    "rank": rank,
                    "canonical_basis": basis.iter()
                        .map(|r| r.entries().iter().map(|e| e.to_string()).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                    "saturation_index": index.to_string(),
                    "violations": [],
                })),
            }))
        }
    }
}
