//! Built-in sets and inequalities with their expected properties.

use thiserror::Error;

use crate::bellgen::{build_inequality, BellInequality, BellTerm};
use crate::extend::{method2, Position};
use crate::gyni::{gyni_inequality, gyni_vectors};
use crate::nspoly::Verdict;
use crate::pvset::{ClassificationKind, ProductVectorSet};
use crate::rational::{int, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry {0:?}")]
    UnknownName(String),
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub note: &'static str,
    pub set: ProductVectorSet,
    pub kind: ClassificationKind,
    /// Terms as recorded, in the scenario of the built inequality.
    pub inequality: BellInequality,
    pub ns_maximum: Option<Rational>,
    pub verdict: Option<Verdict>,
}

const SHIFTS: [&str; 4] = ["000", "1ēe", "e1ē", "ēe1"];
const SHIFTS_TERMS: [&str; 4] = ["000|000", "110|011", "011|101", "101|110"];

const NWE: [&str; 8] = ["000", "e01", "01e", "01ē", "1e0", "ē01", "1ē0", "111"];
const NWE_TERMS: [&str; 8] = [
    "000|000", "001|100", "010|001", "011|001", "100|010", "101|100", "110|010", "111|000",
];

struct Table {
    name: &'static str,
    vectors: &'static [&'static str],
    terms: &'static [&'static str],
    note: &'static str,
}

const TABLE: [Table; 10] = [
    Table {
        name: "u1",
        vectors: &["0000", "1eE0", "eE10", "E1ee", "0001", "01E1", "1E0E", "0011", "1011"],
        terms: &[
            "0000|0000", "1010|0110", "0110|1100", "1100|1011", "0001|0000", "0111|0010", "1101|0101",
            "0011|0000", "1011|0000",
        ],
        note: "four-qubit UPB of size 9",
    },
    Table {
        name: "u2",
        vectors: &["0000", "Ee1e", "e1e1", "E11E", "eeE1", "1EEe", "10eE", "E10E", "e1e0"],
        terms: &[
            "0000|0000", "1010|1101", "0101|1010", "1111|1001", "0011|1110", "1110|0111", "1001|0011",
            "1101|1001", "0100|1010",
        ],
        note: "four-qubit UPB of size 9; scenario label (2,2,2,2)",
    },
    Table {
        name: "u3",
        vectors: &["0000", "1eE0", "eE10", "E1ee", "0001", "0011", "1001", "1011", "010E", "11E1"],
        terms: &[
            "0000|0000", "1010|0110", "0110|1100", "1100|1011", "0001|0000", "0011|0000", "1011|0000",
            "1001|0000", "0101|0001", "1111|0010",
        ],
        note: "four-qubit UPB of size 10",
    },
    Table {
        name: "u4",
        vectors: &[
            "0000", "1Ee0", "e1E0", "Ee10", "0001", "0011", "0101", "0111", "1001", "1011", "1101", "1111",
        ],
        terms: &[
            "0000|0000", "1100|0110", "0110|1010", "1010|1100", "1101|0000", "0001|0000", "0011|0000",
            "0101|0000", "0111|0000", "1001|0000", "1011|0000", "1111|0000",
        ],
        note: "Shifts lifted with the standard basis; token e1E10 taken as e1E0",
    },
    Table {
        name: "u5",
        vectors: &["0000", "1eee", "e1Ef", "0ee1", "101E", "1E0F", "EE1e"],
        terms: &[
            "0000|0000", "1000|0111", "0110|1012", "0001|0110", "1011|0001", "1101|0102", "1110|1101",
        ],
        note: "four-qubit UPB of size 7 with three bases at the last party",
    },
    Table {
        name: "u6",
        vectors: &["0000", "1eEe", "eE1E", "E1ef", "0eE1", "1eEE", "e1ee", "EE1F"],
        terms: &[
            "0000|0000", "1010|0111", "0111|1101", "1100|1012", "0011|0110", "1011|0111", "0100|1011",
            "1111|1102",
        ],
        note: "four-qubit UPB of size 8",
    },
    Table {
        name: "u7",
        vectors: &[
            "0000", "Eee1", "e11e", "E1EF", "1000", "e001", "e10E", "e010", "e011", "e11E", "EE1f", "e10e",
        ],
        terms: &[
            "0000|0000", "1001|1110", "0110|1001", "1111|1012", "1000|0000", "0001|1000", "0101|1001",
            "0010|1000", "0011|1000", "0111|1001", "1110|1102", "0100|1001",
        ],
        note: "four-qubit UPB of size 12",
    },
    Table {
        name: "u8",
        vectors: &["0000", "e1eE", "1eEf", "EEF1", "e01F", "01fe"],
        terms: &["0000|0000", "0101|1011", "1010|0112", "1111|1120", "0011|1002", "0100|0021"],
        note: "four-qubit UPB of size 6",
    },
    Table {
        name: "u9",
        vectors: &[
            "0000", "1eee", "eE1f", "10EF", "0ef1", "01FF", "1E0f", "1eeE", "1EeF", "1eEf", "11EF", "EE1f",
        ],
        terms: &[
            "0000|0000", "1000|0111", "0110|1102", "1011|0012", "0001|0120", "0111|0022", "1100|0102",
            "1001|0111", "1101|0112", "1010|0112", "1111|0012", "1110|1102",
        ],
        note: "four-qubit UPB of size 12",
    },
    Table {
        name: "u10",
        vectors: &["0000", "01Ee", "0e1E", "0Ee1", "1000", "11Ee", "1e1E", "1Ee1"],
        terms: &[
            "0000|0000", "0110|0011", "0011|0101", "0101|0110", "1000|0000", "1110|0011", "1011|0101",
            "1101|0110",
        ],
        note: "Shifts lifted with Shifts; term 1101|0011 taken as 1110|0011",
    },
];

struct Row {
    name: &'static str,
    source: &'static str,
    party: usize,
    position: Position,
    terms: &'static [&'static str],
    note: &'static str,
}

const ROWS: [Row; 3] = [
    Row {
        name: "t3_1",
        source: "u1",
        party: 1,
        position: Position::Front,
        terms: &[
            "00000|00000", "00001|00000", "00011|00000", "01011|00000", "00111|00010", "01100|01011",
            "01101|10101", "01010|10110", "00110|11100", "10100|00000", "10101|00000", "10111|00000",
            "11111|00000", "10011|00010", "11000|01011", "11001|10101", "11110|10110", "10010|11100",
        ],
        note: "method 2 on u1 at party 2, new party first",
    },
    Row {
        name: "t3_2",
        source: "u6",
        party: 0,
        position: Position::Front,
        terms: &[
            "00000|00000", "11000|00000", "00011|00110", "11011|00110", "01010|00111", "10010|00111",
            "01011|00111", "10011|00111", "00111|11101", "11111|11101", "00100|11011", "11100|11011",
            "01100|11012", "10100|11012", "01111|11102", "10111|11102",
        ],
        note: "method 2 on u6 at party 1, new party first",
    },
    Row {
        name: "t3_3",
        source: "u8",
        party: 3,
        position: Position::Back,
        terms: &[
            "00000|00000", "11110|11200", "01010|10111", "01000|00211", "10100|01122", "00110|10022",
            "00011|00000", "11101|11200", "01001|10111", "01011|00211", "10111|01122", "00101|10022",
        ],
        note: "method 2 on u8 at party 4, new party last",
    },
];

const EXTRA: [&str; 3] = ["std3", "shifts_minus", "u4_minus"];

/// Every entry name in a fixed order.
pub fn list() -> Vec<&'static str> {
    let mut names = vec!["shifts", "nwe3"];
    names.extend(EXTRA);
    names.extend(TABLE.iter().map(|t| t.name));
    names.extend(["gyni3", "gyni4", "gyni5", "gyni6", "gyni7"]);
    names.extend(ROWS.iter().map(|r| r.name));
    names
}

fn words(v: &[&str]) -> ProductVectorSet {
    ProductVectorSet::from_symbols(v).expect("catalog set is valid")
}

/// Unit-weight terms in the scenario of `set`'s own inequality.
fn recorded(set: &ProductVectorSet, terms: &[&str]) -> BellInequality {
    let built = build_inequality(set, None).expect("catalog set builds");
    let terms = terms
        .iter()
        .map(|t| BellTerm::parse_label(t, int(1)).expect("catalog term parses"))
        .collect();
    BellInequality::new(built.scenario, terms).expect("catalog terms fit")
}

fn entry(
    name: &'static str,
    note: &'static str,
    set: ProductVectorSet,
    kind: ClassificationKind,
    inequality: BellInequality,
    ns_maximum: Option<Rational>,
    verdict: Option<Verdict>,
) -> CatalogEntry {
    CatalogEntry {
        name,
        note,
        set,
        kind,
        inequality,
        ns_maximum,
        verdict,
    }
}

pub fn get(name: &str) -> Result<CatalogEntry, CatalogError> {
    use ClassificationKind::*;
    let built = |s: &ProductVectorSet| build_inequality(s, None).expect("catalog set builds");
    let e = match name {
        "shifts" => {
            let s = words(&SHIFTS);
            let b = recorded(&s, &SHIFTS_TERMS);
            entry("shifts", "three-qubit Shifts UPB", s, Upb, b, Some(rat(4, 3)), Some(Verdict::Tight))
        }
        "nwe3" => {
            let s = words(&NWE);
            let b = recorded(&s, &NWE_TERMS);
            entry(
                "nwe3",
                "three-qubit product basis; term 110|000 taken as 110|010",
                s,
                FullBasis,
                b,
                Some(int(1)),
                Some(Verdict::Trivial),
            )
        }
        "std3" => {
            let s = crate::extend::full_basis(3);
            let b = built(&s);
            entry("std3", "three-qubit computational basis", s, FullBasis, b, Some(int(1)), Some(Verdict::Trivial))
        }
        "shifts_minus" => {
            let s = words(&SHIFTS[..3]);
            let b = built(&s);
            entry(
                "shifts_minus",
                "Shifts without its last vector",
                s,
                CompletableToFullBasis,
                b,
                Some(int(1)),
                Some(Verdict::Trivial),
            )
        }
        "u4_minus" => {
            let s = words(&TABLE[3].vectors[..11]);
            let b = built(&s);
            entry(
                "u4_minus",
                "u4 without 1111: only completable to a UPB",
                s,
                ExtendibleOnlyToUpb,
                b,
                None,
                None,
            )
        }
        _ => {
            if let Some(t) = TABLE.iter().find(|t| t.name == name) {
                let s = words(t.vectors);
                let b = recorded(&s, t.terms);
                let verdict = if name == "u10" { Verdict::NotTight } else { Verdict::Tight };
                entry(t.name, t.note, s, Upb, b, Some(rat(4, 3)), Some(verdict))
            } else if let Some(r) = ROWS.iter().find(|r| r.name == name) {
                let src = words(TABLE.iter().find(|t| t.name == r.source).expect("source").vectors);
                let s = method2(&src, r.party, r.position).expect("method 2 applies");
                let b = recorded(&s, r.terms);
                entry(r.name, r.note, s, Upb, b, None, Some(Verdict::Tight))
            } else if let Some(n) = name.strip_prefix("gyni").and_then(|k| k.parse::<usize>().ok()) {
                if !(3..=7).contains(&n) {
                    return Err(CatalogError::UnknownName(name.to_string()));
                }
                let s = gyni_vectors(n).expect("n ≥ 3");
                let b = gyni_inequality(n).expect("n ≥ 3");
                let ns = match n {
                    3 | 4 => Some(rat(4, 3)),
                    _ => None,
                };
                let verdict = match n {
                    6 => None,
                    _ => Some(Verdict::Tight),
                };
                let name = ["gyni3", "gyni4", "gyni5", "gyni6", "gyni7"][n - 3];
                entry(name, "guess-your-neighbour's-input family", s, Upb, b, ns, verdict)
            } else {
                return Err(CatalogError::UnknownName(name.to_string()));
            }
        }
    };
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve_and_are_unique() {
        let names = list();
        let mut sorted = names.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
        for n in names {
            assert_eq!(get(n).unwrap().name, n);
        }
        assert_eq!(get("u11").unwrap_err(), CatalogError::UnknownName("u11".into()));
        assert!(get("gyni8").is_err());
    }

    #[test]
    fn recorded_terms_match_construction() {
        for n in list() {
            if n == "gyni7" {
                continue;
            }
            let e = get(n).unwrap();
            let b = build_inequality(&e.set, None).unwrap();
            assert!(b.same_terms(&e.inequality), "{n}");
            assert_eq!(b.classical_bound, e.inequality.classical_bound, "{n}");
        }
    }

    #[test]
    fn table_three_scenarios() {
        let sc: Vec<String> = ["t3_1", "t3_2", "t3_3"]
            .iter()
            .map(|n| get(n).unwrap().inequality.scenario.to_string())
            .collect();
        assert_eq!(sc, ["(2,2,2,2,2)", "(2,2,2,2,3)", "(2,2,3,3,3)"]);
    }
}
