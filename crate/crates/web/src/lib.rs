//! WebAssembly bindings for the browser demo in `www/`.

use upbell::bellgen::build_inequality;
use upbell::formats::read_pvs;
use upbell::gyni::{gyni_inequality, gyni_vectors, CongruenceEngine, StrategyString};
use upbell::nspoly::ns_maximum;
use upbell::pvset::ProductVectorSet;
use upbell::quantum::{epsilon_prime, witness_box, BasisRealization};
use upbell::rational::{format_rational, to_f64};
use wasm_bindgen::prelude::*;

/// The LP is offered only below this many box entries.
const NS_ENTRY_LIMIT: usize = 1 << 12;

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Accepts either a `.pvs` file or whitespace-separated symbol words.
fn parse_set(text: &str) -> Result<ProductVectorSet, JsError> {
    if text.trim_start().starts_with("pvs") {
        return read_pvs(text).map_err(err);
    }
    let words: Vec<&str> = text.split_whitespace().collect();
    ProductVectorSet::from_symbols(&words).map_err(err)
}

#[wasm_bindgen(getter_with_clone)]
pub struct Built {
    pub kind: String,
    pub inequality: String,
    pub bound: String,
    pub scenario: String,
    /// Empty when the scenario is too large for an in-browser LP.
    pub ns_maximum: String,
}

#[wasm_bindgen]
pub fn build(text: &str) -> Result<Built, JsError> {
    let set = parse_set(text)?;
    let kind = set.classify().map_err(err)?.kind;
    let b = build_inequality(&set, None).map_err(err)?;
    let ns_maximum = match b.scenario.box_len() {
        Some(len) if len <= NS_ENTRY_LIMIT => format_rational(&ns_maximum(&b).map_err(err)?.value),
        _ => String::new(),
    };
    let m: Vec<String> = b.scenario.settings().iter().map(|m| m.to_string()).collect();
    Ok(Built {
        kind: kind.to_string(),
        inequality: b.to_string(),
        bound: format_rational(&b.classical_bound),
        scenario: format!("({})", m.join(",")),
        ns_maximum,
    })
}

#[wasm_bindgen(getter_with_clone)]
pub struct Curve {
    pub epsilons: Vec<f64>,
    pub values: Vec<f64>,
    pub epsilon_prime: f64,
    pub bound: f64,
}

/// Witness-box Bell value for `points` values of ε spread over (0, ε′].
#[wasm_bindgen]
pub fn witness_curve(text: &str, points: usize) -> Result<Curve, JsError> {
    let set = parse_set(text)?;
    let b = build_inequality(&set, None).map_err(err)?;
    let real = BasisRealization::default_for(set.bases_per_party());
    let top = epsilon_prime(&set, &real).map_err(err)?;
    if top <= 0.0 {
        return Err(JsError::new("ε′ = 0: some product of local vectors is orthogonal to every vector, so the set is not a UPB"));
    }
    let points = points.clamp(2, 400);
    let mut epsilons = Vec::with_capacity(points);
    let mut values = Vec::with_capacity(points);
    for k in 1..=points {
        let eps = top * k as f64 / points as f64;
        let (_, report) = witness_box(&set, eps, &real).map_err(err)?;
        epsilons.push(eps);
        values.push(report.value);
    }
    Ok(Curve {
        epsilons,
        values,
        epsilon_prime: top,
        bound: to_f64(&b.classical_bound),
    })
}

#[wasm_bindgen(getter_with_clone)]
pub struct Gyni {
    pub vectors: Vec<String>,
    pub inequality: String,
}

#[wasm_bindgen]
pub fn gyni(n: usize) -> Result<Gyni, JsError> {
    if n > 8 {
        return Err(JsError::new("at most 8 parties in the browser"));
    }
    Ok(Gyni {
        vectors: gyni_vectors(n).map_err(err)?.to_symbols(),
        inequality: gyni_inequality(n).map_err(err)?.to_string(),
    })
}

#[wasm_bindgen(getter_with_clone)]
pub struct StrategyReport {
    pub evaluation: String,
    pub saturates: bool,
    /// Congruence certificate, one `coefficient [string]` per line.
    pub certificate: String,
}

/// Evaluates a strategy string such as `[i0f]` and, for odd n ≤ 5 when it
/// does not saturate, certifies it.
#[wasm_bindgen]
pub fn strategy(text: &str) -> Result<StrategyReport, JsError> {
    let s = StrategyString::parse(text).map_err(err)?;
    let evaluation = match s.evaluate() {
        Ok(e) => e.to_string(),
        Err(_) => "no numeric symbol".to_string(),
    };
    let saturates = s.saturates();
    let certificate = if !saturates && s.len() % 2 == 1 && (3..=5).contains(&s.len()) {
        let c = CongruenceEngine::new(s.len()).map_err(err)?.certify(&s).map_err(err)?;
        if !c.verify() {
            return Err(JsError::new("certificate does not verify"));
        }
        c.dump()
    } else {
        String::new()
    };
    Ok(StrategyReport {
        evaluation,
        saturates,
        certificate,
    })
}
