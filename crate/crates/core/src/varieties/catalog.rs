//! The built-in catalog: Beauville pencils I-VI, the Schoen quintic in both
//! coordinate systems, the double octic/sextic cover templates, V33, V24, the
//! van Geemen-Nygaard quadrics, the Hirzebruch quintic, and the Weierstrass
//! calibration curve.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::error::VarietyError;
use crate::qseries::{EtaData, EtaQuotient, NewformRecord};

use super::poly::{Ambient, MultiHomogPolynomial, ProjectiveFactor};
use super::{
    CatalogEntry, CoordinateChange, CountShape, InvolutionSpec, ModularSource, ResidueChart,
    TwistFamily, TwistPattern, TwistStatus, VarietyMetadata, VarietySpec,
};

pub struct Catalog {
    entries: BTreeMap<String, CatalogEntry>,
}

impl Catalog {
    /// The embedded catalog. Built once; immutable afterwards.
    pub fn builtin() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(build)
    }

    /// A mutable copy of the embedded catalog, for file-based extension.
    pub fn builtin_copy() -> Catalog {
        Catalog {
            entries: Self::builtin().entries.clone(),
        }
    }

    pub fn get(&self, id: &str) -> Result<&CatalogEntry, VarietyError> {
        self.entries
            .get(id)
            .ok_or_else(|| VarietyError::UnknownId(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.values()
    }

    /// Entries carrying a twist family.
    pub fn families(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries().filter(|e| e.twist.is_some())
    }

    /// Insert or override an entry (the file-extension path).
    pub fn insert(&mut self, entry: CatalogEntry) {
        self.entries.insert(entry.variety.id.clone(), entry);
    }

    /// Parse a variety definition file and merge its entries over the
    /// built-ins.
    pub fn extend_from_str(&mut self, text: &str) -> Result<usize, VarietyError> {
        let parsed = super::vdf::parse_definition_file(text)?;
        let n = parsed.len();
        for entry in parsed {
            self.insert(entry);
        }
        Ok(n)
    }

    /// The newform records reachable from catalog entries, deduplicated by
    /// label. Forms whose sources give no eta description carry the
    /// `NotEtaGiven` marker; their coefficients come from external files.
    pub fn newforms(&self) -> Vec<NewformRecord> {
        let mut seen = BTreeMap::new();
        for e in self.entries() {
            match &e.modular {
                Some(ModularSource::Eta(rec)) => {
                    seen.entry(rec.label.clone()).or_insert_with(|| rec.clone());
                }
                Some(ModularSource::External { label, level }) => {
                    seen.entry(label.clone()).or_insert_with(|| NewformRecord {
                        label: label.clone(),
                        level: *level,
                        weight: 4,
                        eta: EtaData::NotEtaGiven,
                        family: Some(e.variety.id.clone()),
                    });
                }
                _ => {}
            }
        }
        seen.into_values().collect()
    }

    /// Look up a newform record by its label.
    pub fn newform(&self, label: &str) -> Result<NewformRecord, VarietyError> {
        self.newforms()
            .into_iter()
            .find(|r| r.label == label)
            .ok_or_else(|| VarietyError::UnknownId(label.to_string()))
    }
}

fn poly(ambient: &Ambient, terms: &[(i64, &[u16])]) -> MultiHomogPolynomial {
    let raw: Vec<(i64, Vec<u16>)> = terms.iter().map(|&(c, e)| (c, e.to_vec())).collect();
    MultiHomogPolynomial::new(ambient.clone(), &raw).expect("catalog equation must be homogeneous")
}

fn names(ns: &[&str]) -> Vec<String> {
    ns.iter().map(|s| s.to_string()).collect()
}

fn eta(factors: &[(u64, i32)]) -> EtaQuotient {
    EtaQuotient::new(factors).expect("catalog eta quotient")
}

fn eta_record(label: &str, level: u64, factors: &[(u64, i32)], family: &str) -> ModularSource {
    ModularSource::Eta(NewformRecord {
        label: label.to_string(),
        level,
        weight: 4,
        eta: EtaData::Quotient(eta(factors)),
        family: Some(family.to_string()),
    })
}

fn beauville(id: &str, terms: &[(i64, &[u16])], modular: ModularSource) -> CatalogEntry {
    let ambient = Ambient::product(&[2, 1]);
    CatalogEntry {
        variety: VarietySpec {
            id: id.to_string(),
            ambient: ambient.clone(),
            equations: vec![poly(&ambient, terms)],
            var_names: names(&["x", "y", "z", "mu", "lambda"]),
            metadata: VarietyMetadata {
                notes: "semi-stable cubic pencil; threefold is the self-fiber product over P^1"
                    .to_string(),
                ..Default::default()
            },
        },
        shape: CountShape::PencilFiberProduct,
        involutions: vec![],
        twist: None,
        modular: Some(modular),
        chart: None,
        companion: None,
    }
}

fn build() -> Catalog {
    let mut entries = BTreeMap::new();
    let mut add = |e: CatalogEntry| {
        entries.insert(e.variety.id.clone(), e);
    };

    // -- Beauville pencils ---------------------------------------------------

    add(beauville(
        "beauville-I",
        &[
            (1, &[3, 0, 0, 1, 0]),
            (1, &[0, 3, 0, 1, 0]),
            (1, &[0, 0, 3, 1, 0]),
            (-1, &[1, 1, 1, 0, 1]),
        ],
        eta_record("beauville-I", 9, &[(3, 8)], "beauville-I"),
    ));
    add(beauville(
        "beauville-II",
        &[
            (1, &[3, 0, 0, 1, 0]),
            (1, &[1, 0, 2, 1, 0]),
            (2, &[1, 1, 1, 1, 0]),
            (-1, &[2, 0, 1, 0, 1]),
            (1, &[0, 2, 1, 0, 1]),
        ],
        eta_record("beauville-II", 8, &[(2, 4), (4, 4)], "beauville-II"),
    ));
    add(beauville(
        "beauville-III",
        &[
            (1, &[2, 1, 0, 1, 0]),
            (-1, &[2, 0, 1, 1, 0]),
            (-1, &[1, 1, 1, 1, 0]),
            (1, &[1, 0, 2, 1, 0]),
            (-1, &[1, 1, 1, 0, 1]),
            (1, &[0, 2, 1, 0, 1]),
        ],
        eta_record("beauville-III", 5, &[(1, 4), (5, 4)], "beauville-III"),
    ));
    add(beauville(
        "beauville-IV",
        &[
            (1, &[2, 1, 0, 1, 0]),
            (1, &[2, 0, 1, 1, 0]),
            (1, &[1, 2, 0, 1, 0]),
            (1, &[0, 2, 1, 1, 0]),
            (1, &[0, 1, 2, 1, 0]),
            (1, &[1, 0, 2, 1, 0]),
            (3, &[1, 1, 1, 1, 0]),
            (-1, &[1, 1, 1, 0, 1]),
        ],
        eta_record(
            "beauville-IV",
            6,
            &[(1, 2), (2, 2), (3, 2), (6, 2)],
            "beauville-IV",
        ),
    ));
    let mut bv = beauville(
        "beauville-V",
        &[
            (1, &[2, 1, 0, 1, 0]),
            (1, &[1, 2, 0, 1, 0]),
            (-1, &[1, 0, 2, 1, 0]),
            (-1, &[0, 1, 2, 1, 0]),
            (-1, &[1, 1, 1, 0, 1]),
        ],
        eta_record(
            "beauville-V",
            16,
            &[(4, 16), (8, -4), (2, -4)],
            "beauville-V",
        ),
    );
    // iota((x:y:z),(mu:lambda)) = ((-x:-y:z),(mu:-lambda)); the twisted pencil
    // carries d on the z^2 terms and the square-class change scales x, y, lambda.
    bv.involutions = vec![InvolutionSpec {
        name: "negate-xy-lambda".to_string(),
        targets: vec![0, 1, 2, 3, 4],
        signs: vec![-1, -1, 1, 1, -1],
        equation_map: None,
    }];
    bv.twist = Some(TwistFamily {
        base_id: "beauville-V".to_string(),
        patterns: vec![TwistPattern {
            coordinate: 2,
            degree: 2,
            power: 1,
        }],
        change: CoordinateChange::diagonal(5, &[0, 1, 4]),
    });
    bv.chart = Some(ResidueChart {
        i0: None,
        minor: vec![1, 3],
    });
    add(bv);
    add(beauville(
        "beauville-VI",
        &[
            (1, &[2, 1, 0, 1, 0]),
            (1, &[0, 2, 1, 1, 0]),
            (1, &[1, 0, 2, 1, 0]),
            (-1, &[1, 1, 1, 0, 1]),
        ],
        eta_record("beauville-VI", 9, &[(3, 8)], "beauville-VI"),
    ));

    // -- Schoen quintic, both coordinate systems -----------------------------

    let p4 = Ambient::projective(4);
    let quintic_terms: Vec<(i64, Vec<u16>)> = {
        let mut v = Vec::new();
        for i in 0..5usize {
            let mut e = vec![0u16; 5];
            e[i] = 5;
            v.push((1i64, e));
        }
        v.push((-5, vec![1, 1, 1, 1, 1]));
        v
    };
    add(CatalogEntry {
        variety: VarietySpec {
            id: "schoen-quintic".to_string(),
            ambient: p4.clone(),
            equations: vec![MultiHomogPolynomial::new(p4.clone(), &quintic_terms).unwrap()],
            var_names: names(&["x0", "x1", "x2", "x3", "x4"]),
            metadata: VarietyMetadata {
                nodes: Some(125),
                notes: "125 ordinary double points; small resolution is rigid".to_string(),
                bad_primes: vec![5],
                ..Default::default()
            },
        },
        shape: CountShape::Projective,
        involutions: vec![InvolutionSpec::swap("swap-x0-x1", 5, 0, 1)],
        twist: None,
        modular: Some(ModularSource::External {
            label: "schoen-25k4".to_string(),
            level: 25,
        }),
        chart: Some(ResidueChart {
            i0: Some(4),
            minor: vec![3],
        }),
        companion: None,
    });

    // u = x0 + x1, v = x0 - x1; equation times 16, integral and valid away from 2.
    add(CatalogEntry {
        variety: VarietySpec {
            id: "schoen-quintic-uv".to_string(),
            ambient: p4.clone(),
            equations: vec![poly(
                &p4,
                &[
                    (1, &[5, 0, 0, 0, 0]),
                    (10, &[3, 2, 0, 0, 0]),
                    (5, &[1, 4, 0, 0, 0]),
                    (16, &[0, 0, 5, 0, 0]),
                    (16, &[0, 0, 0, 5, 0]),
                    (16, &[0, 0, 0, 0, 5]),
                    (-20, &[2, 0, 1, 1, 1]),
                    (20, &[0, 2, 1, 1, 1]),
                ],
            )],
            var_names: names(&["u", "v", "x2", "x3", "x4"]),
            metadata: VarietyMetadata {
                nodes: Some(125),
                notes: "Schoen quintic in (u, v) = (x0+x1, x0-x1) coordinates".to_string(),
                bad_primes: vec![2, 5],
                clearing_factor: Some(16),
                ..Default::default()
            },
        },
        shape: CountShape::Projective,
        involutions: vec![InvolutionSpec::negation("negate-v", 5, 1)],
        twist: Some(TwistFamily {
            base_id: "schoen-quintic-uv".to_string(),
            patterns: vec![
                TwistPattern {
                    coordinate: 1,
                    degree: 2,
                    power: 1,
                },
                TwistPattern {
                    coordinate: 1,
                    degree: 4,
                    power: 2,
                },
            ],
            change: CoordinateChange::diagonal(5, &[1]),
        }),
        modular: Some(ModularSource::External {
            label: "schoen-25k4".to_string(),
            level: 25,
        }),
        chart: Some(ResidueChart {
            i0: Some(4),
            minor: vec![3],
        }),
        companion: Some((
            "schoen-quintic".to_string(),
            vec![
                vec![(1, 0), (1, 1)],
                vec![(1, 0), (-1, 1)],
                vec![(1, 2)],
                vec![(1, 3)],
                vec![(1, 4)],
            ],
            16,
        )),
    });

    // -- Double cover templates ----------------------------------------------

    let octic_ambient = Ambient::Projective(vec![ProjectiveFactor::weighted(&[1, 1, 1, 1, 4])]);
    add(CatalogEntry {
        variety: VarietySpec {
            id: "double-octic-template".to_string(),
            ambient: octic_ambient.clone(),
            equations: vec![poly(
                &octic_ambient,
                &[
                    (1, &[0, 0, 0, 0, 2]),
                    (-1, &[8, 0, 0, 0, 0]),
                    (-1, &[0, 8, 0, 0, 0]),
                    (-1, &[0, 0, 8, 0, 0]),
                    (-1, &[0, 0, 0, 8, 0]),
                ],
            )],
            var_names: names(&["x1", "x2", "x3", "x4", "y"]),
            metadata: VarietyMetadata {
                notes: "diagonal octic instance of the y^2 = f8(x) template".to_string(),
                bad_primes: vec![2],
                twist_status: TwistStatus::Plumbing,
                ..Default::default()
            },
        },
        shape: CountShape::DoubleCover {
            cover_coordinate: 4,
        },
        involutions: vec![InvolutionSpec::negation("negate-y", 5, 4)],
        twist: Some(TwistFamily {
            base_id: "double-octic-template".to_string(),
            patterns: vec![TwistPattern {
                coordinate: 4,
                degree: 2,
                power: 1,
            }],
            change: CoordinateChange::diagonal(5, &[4]),
        }),
        modular: None,
        chart: Some(ResidueChart {
            i0: Some(0),
            minor: vec![4],
        }),
        companion: None,
    });

    let sextic_ambient = Ambient::Projective(vec![ProjectiveFactor::weighted(&[1, 1, 1, 3])]);
    add(CatalogEntry {
        variety: VarietySpec {
            id: "double-sextic-template".to_string(),
            ambient: sextic_ambient.clone(),
            equations: vec![poly(
                &sextic_ambient,
                &[
                    (1, &[0, 0, 0, 2]),
                    (-1, &[6, 0, 0, 0]),
                    (-1, &[0, 6, 0, 0]),
                    (-1, &[0, 0, 6, 0]),
                ],
            )],
            var_names: names(&["x", "y", "z", "w"]),
            metadata: VarietyMetadata {
                notes: "diagonal sextic K3 instance of the w^2 = f6(x) template".to_string(),
                bad_primes: vec![2],
                twist_status: TwistStatus::Plumbing,
                ..Default::default()
            },
        },
        shape: CountShape::DoubleCover {
            cover_coordinate: 3,
        },
        involutions: vec![InvolutionSpec::negation("negate-w", 4, 3)],
        twist: Some(TwistFamily {
            base_id: "double-sextic-template".to_string(),
            patterns: vec![TwistPattern {
                coordinate: 3,
                degree: 2,
                power: 1,
            }],
            change: CoordinateChange::diagonal(4, &[3]),
        }),
        modular: None,
        chart: Some(ResidueChart {
            i0: Some(0),
            minor: vec![3],
        }),
        companion: None,
    });

    // -- Werner / van Geemen complete intersections ---------------------------

    let p5 = Ambient::projective(5);
    let cube = |i: usize| -> Vec<u16> {
        let mut e = vec![0u16; 6];
        e[i] = 3;
        e
    };
    add(CatalogEntry {
        variety: VarietySpec {
            id: "v33".to_string(),
            ambient: p5.clone(),
            equations: vec![
                MultiHomogPolynomial::new(
                    p5.clone(),
                    &[
                        (1, cube(0)),
                        (1, cube(1)),
                        (1, cube(2)),
                        (1, cube(3)),
                    ],
                )
                .unwrap(),
                MultiHomogPolynomial::new(
                    p5.clone(),
                    &[
                        (1, cube(2)),
                        (1, cube(3)),
                        (1, cube(4)),
                        (1, cube(5)),
                    ],
                )
                .unwrap(),
            ],
            var_names: names(&["x0", "x1", "x2", "x3", "x4", "x5"]),
            metadata: VarietyMetadata {
                nodes: Some(9),
                notes: "two cubics in P^5; 9 singular points, big resolution".to_string(),
                ..Default::default()
            },
        },
        shape: CountShape::Projective,
        involutions: vec![InvolutionSpec::swap("swap-x2-x3", 6, 2, 3)],
        twist: None,
        modular: Some(eta_record("v33-9", 9, &[(3, 8)], "v33")),
        chart: Some(ResidueChart {
            i0: Some(0),
            minor: vec![1, 5],
        }),
        companion: None,
    });

    // u = x2 + x3, v = x2 - x3; system times 4.
    add(CatalogEntry {
        variety: VarietySpec {
            id: "v33-uv".to_string(),
            ambient: p5.clone(),
            equations: vec![
                poly(
                    &p5,
                    &[
                        (4, &[3, 0, 0, 0, 0, 0]),
                        (4, &[0, 3, 0, 0, 0, 0]),
                        (1, &[0, 0, 3, 0, 0, 0]),
                        (3, &[0, 0, 1, 2, 0, 0]),
                    ],
                ),
                poly(
                    &p5,
                    &[
                        (1, &[0, 0, 3, 0, 0, 0]),
                        (3, &[0, 0, 1, 2, 0, 0]),
                        (4, &[0, 0, 0, 0, 3, 0]),
                        (4, &[0, 0, 0, 0, 0, 3]),
                    ],
                ),
            ],
            var_names: names(&["x0", "x1", "u", "v", "x4", "x5"]),
            metadata: VarietyMetadata {
                nodes: Some(9),
                notes: "V33 in (u, v) = (x2+x3, x2-x3) coordinates".to_string(),
                bad_primes: vec![2],
                clearing_factor: Some(4),
                ..Default::default()
            },
        },
        shape: CountShape::Projective,
        involutions: vec![InvolutionSpec::negation("negate-v", 6, 3)],
        twist: Some(TwistFamily {
            base_id: "v33-uv".to_string(),
            patterns: vec![TwistPattern {
                coordinate: 3,
                degree: 2,
                power: 1,
            }],
            change: CoordinateChange::diagonal(6, &[3]),
        }),
        modular: Some(eta_record("v33-9", 9, &[(3, 8)], "v33")),
        chart: Some(ResidueChart {
            i0: Some(0),
            minor: vec![1, 5],
        }),
        companion: Some((
            "v33".to_string(),
            vec![
                vec![(1, 0)],
                vec![(1, 1)],
                vec![(1, 2), (1, 3)],
                vec![(1, 2), (-1, 3)],
                vec![(1, 4)],
                vec![(1, 5)],
            ],
            4,
        )),
    });

    let sq = |i: usize, s: i64| -> (i64, Vec<u16>) {
        let mut e = vec![0u16; 6];
        e[i] = 2;
        (s, e)
    };
    let quart = |i: usize, s: i64| -> (i64, Vec<u16>) {
        let mut e = vec![0u16; 6];
        e[i] = 4;
        (s, e)
    };
    add(CatalogEntry {
        variety: VarietySpec {
            id: "v24".to_string(),
            ambient: p5.clone(),
            equations: vec![
                MultiHomogPolynomial::new(
                    p5.clone(),
                    &[sq(0, 1), sq(1, 1), sq(2, 1), sq(3, -1), sq(4, -1), sq(5, -1)],
                )
                .unwrap(),
                MultiHomogPolynomial::new(
                    p5.clone(),
                    &[
                        quart(0, 1),
                        quart(1, 1),
                        quart(2, 1),
                        quart(3, -1),
                        quart(4, -1),
                        quart(5, -1),
                    ],
                )
                .unwrap(),
            ],
            var_names: names(&["x0", "x1", "x2", "x3", "x4", "x5"]),
            metadata: VarietyMetadata {
                nodes: Some(122),
                notes: "quadric-quartic intersection with 122 nodes, small resolution".to_string(),
                ..Default::default()
            },
        },
        shape: CountShape::Projective,
        involutions: vec![
            InvolutionSpec::negation("negate-x1", 6, 1),
            InvolutionSpec::negation("negate-x2", 6, 2),
        ],
        twist: Some(TwistFamily {
            base_id: "v24".to_string(),
            patterns: vec![
                TwistPattern {
                    coordinate: 1,
                    degree: 2,
                    power: 1,
                },
                TwistPattern {
                    coordinate: 1,
                    degree: 4,
                    power: 2,
                },
            ],
            change: CoordinateChange::diagonal(6, &[1]),
        }),
        modular: Some(ModularSource::External {
            label: "v24-12".to_string(),
            level: 12,
        }),
        chart: Some(ResidueChart {
            i0: Some(0),
            minor: vec![1, 2],
        }),
        companion: None,
    });

    // Four quadrics in P^7; the second equation carries the corrected sign on x3^2.
    let p7 = Ambient::projective(7);
    let vgn_eq = |yi: usize, signs: [i64; 4]| -> MultiHomogPolynomial {
        let mut raw: Vec<(i64, Vec<u16>)> = Vec::new();
        let mut ye = vec![0u16; 8];
        ye[4 + yi] = 2;
        raw.push((1, ye));
        for (i, &s) in signs.iter().enumerate() {
            let mut e = vec![0u16; 8];
            e[i] = 2;
            raw.push((-s, e));
        }
        MultiHomogPolynomial::new(p7.clone(), &raw).unwrap()
    };
    add(CatalogEntry {
        variety: VarietySpec {
            id: "vgn".to_string(),
            ambient: p7.clone(),
            equations: vec![
                vgn_eq(0, [1, 1, 1, 1]),
                vgn_eq(1, [1, -1, 1, -1]),
                vgn_eq(2, [1, 1, -1, -1]),
                vgn_eq(3, [1, -1, -1, 1]),
            ],
            var_names: names(&["x0", "x1", "x2", "x3", "y0", "y1", "y2", "y3"]),
            metadata: VarietyMetadata {
                nodes: Some(96),
                notes: "van Geemen-Nygaard quadrics; 96 ordinary double points".to_string(),
                bad_primes: vec![2],
                ..Default::default()
            },
        },
        shape: CountShape::Projective,
        involutions: vec![InvolutionSpec::negation("negate-x0", 8, 0)],
        twist: Some(TwistFamily {
            base_id: "vgn".to_string(),
            patterns: vec![TwistPattern {
                coordinate: 0,
                degree: 2,
                power: 1,
            }],
            change: CoordinateChange::diagonal(8, &[0]),
        }),
        modular: Some(eta_record("vgn-8", 8, &[(2, 4), (4, 4)], "vgn")),
        chart: Some(ResidueChart {
            i0: Some(1),
            minor: vec![4, 5, 6, 7],
        }),
        companion: None,
    });

    // -- Hirzebruch quintic ----------------------------------------------------
    // F(x,y) - F(u,w) = 0 cleared by 10: G(x,y) = (2x+1)(5y^4 - 5y^2(2x^2-2x+1)
    // + (x^2+x-1)^2), homogenized by z. Whether negate-y twists H^3 is open;
    // the pipelines report evidence only.
    add(CatalogEntry {
        variety: VarietySpec {
            id: "hirzebruch-quintic".to_string(),
            ambient: p4.clone(),
            equations: vec![poly(
                &p4,
                &[
                    (2, &[5, 0, 0, 0, 0]),
                    (5, &[4, 0, 0, 0, 1]),
                    (-5, &[2, 0, 0, 0, 3]),
                    (10, &[1, 4, 0, 0, 0]),
                    (5, &[0, 4, 0, 0, 1]),
                    (-20, &[3, 2, 0, 0, 0]),
                    (10, &[2, 2, 0, 0, 1]),
                    (-5, &[0, 2, 0, 0, 3]),
                    (-2, &[0, 0, 5, 0, 0]),
                    (-5, &[0, 0, 4, 0, 1]),
                    (5, &[0, 0, 2, 0, 3]),
                    (-10, &[0, 0, 1, 4, 0]),
                    (-5, &[0, 0, 0, 4, 1]),
                    (20, &[0, 0, 3, 2, 0]),
                    (-10, &[0, 0, 2, 2, 1]),
                    (5, &[0, 0, 0, 2, 3]),
                ],
            )],
            var_names: names(&["x", "y", "u", "w", "z"]),
            metadata: VarietyMetadata {
                nodes: Some(126),
                notes: "F(x,y) = F(u,w) quintic with 126 nodes, cleared by 10".to_string(),
                bad_primes: vec![2, 5],
                twist_status: TwistStatus::Conjectural,
                clearing_factor: Some(10),
            },
        },
        shape: CountShape::Projective,
        involutions: vec![InvolutionSpec::negation("negate-y", 5, 1)],
        twist: Some(TwistFamily {
            base_id: "hirzebruch-quintic".to_string(),
            patterns: vec![
                TwistPattern {
                    coordinate: 1,
                    degree: 2,
                    power: 1,
                },
                TwistPattern {
                    coordinate: 1,
                    degree: 4,
                    power: 2,
                },
            ],
            change: CoordinateChange::diagonal(5, &[1]),
        }),
        modular: None,
        chart: Some(ResidueChart {
            i0: Some(4),
            minor: vec![1],
        }),
        companion: None,
    });

    // -- Weierstrass calibration curve -----------------------------------------

    let p2 = Ambient::projective(2);
    add(CatalogEntry {
        variety: VarietySpec {
            id: "elliptic-calibration".to_string(),
            ambient: p2.clone(),
            equations: vec![poly(
                &p2,
                &[(1, &[0, 2, 1]), (-1, &[3, 0, 0]), (1, &[1, 0, 2])],
            )],
            var_names: names(&["x", "y", "z"]),
            metadata: VarietyMetadata {
                notes: "y^2 = x^3 - x; the standard calibration curve for the twist pipeline"
                    .to_string(),
                bad_primes: vec![2],
                ..Default::default()
            },
        },
        shape: CountShape::EllipticCurve { a: 0, b: -1, c: 0 },
        involutions: vec![InvolutionSpec::negation("negate-y", 3, 1)],
        twist: Some(TwistFamily {
            base_id: "elliptic-calibration".to_string(),
            patterns: vec![TwistPattern {
                coordinate: 1,
                degree: 2,
                power: 1,
            }],
            change: CoordinateChange::diagonal(3, &[1]),
        }),
        modular: Some(ModularSource::EllipticSelf),
        chart: Some(ResidueChart {
            i0: Some(2),
            minor: vec![1],
        }),
        companion: None,
    });

    Catalog { entries }
}
