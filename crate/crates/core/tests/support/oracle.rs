//! Brute-force scoring reference, independent of the library's arithmetic.
//!
//! Weights and thresholds are held as integer hundredths, coverage as an
//! integer fraction, and levels are found by a linear scan over thresholds.
//! Catalog documents are built and read with plain `serde_json`.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use serde_json::{json, Value};

pub const DIMENSIONS: [&str; 3] = ["human", "economic", "environmental"];

#[derive(Debug, Clone)]
pub struct RefAction {
    pub id: String,
    pub dimension: usize,
    pub weight: i128,
}

#[derive(Debug, Clone)]
pub struct RefCatalog {
    pub actions: Vec<RefAction>,
    pub thresholds: Vec<i128>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefResult {
    pub coverage: [String; 3],
    pub ordinals: [u32; 3],
    pub overall: u32,
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

pub fn fraction_string(num: i128, den: i128) -> String {
    let g = gcd(num, den).max(1);
    let (n, d) = (num / g, den / g);
    if d == 1 {
        n.to_string()
    } else {
        format!("{n}/{d}")
    }
}

pub fn reference_level(done: i128, total: i128, thresholds: &[i128]) -> u32 {
    let mut level = 1;
    for &t in thresholds {
        // done/total >= t/100
        if done * 100 >= t * total {
            level += 1;
        }
    }
    level
}

pub fn reference_assess(cat: &RefCatalog, implemented: &BTreeSet<String>) -> RefResult {
    let mut coverage: [String; 3] = Default::default();
    let mut ordinals = [0u32; 3];
    for d in 0..3 {
        let mut done = 0;
        let mut total = 0;
        for a in cat.actions.iter().filter(|a| a.dimension == d) {
            total += a.weight;
            if implemented.contains(&a.id) {
                done += a.weight;
            }
        }
        coverage[d] = fraction_string(done, total);
        ordinals[d] = reference_level(done, total, &cat.thresholds);
    }
    let overall = *ordinals.iter().min().unwrap();
    RefResult {
        coverage,
        ordinals,
        overall,
    }
}

fn hundredths_json(v: i128) -> Value {
    let text = if v % 100 == 0 {
        (v / 100).to_string()
    } else {
        let s = format!("{}.{:02}", v / 100, v % 100);
        s.trim_end_matches('0').to_string()
    };
    serde_json::from_str(&text).unwrap()
}

fn number_to_hundredths(v: &Value) -> i128 {
    let text = v.to_string();
    let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
    assert!(frac.len() <= 2, "oracle handles at most two decimals: {text}");
    int.parse::<i128>().unwrap() * 100 + format!("{frac:0<2}").parse::<i128>().unwrap()
}

pub fn to_document(cat: &RefCatalog) -> Value {
    let dims: Vec<Value> = (0..3)
        .map(|d| {
            let actions: Vec<Value> = cat
                .actions
                .iter()
                .filter(|a| a.dimension == d)
                .map(|a| {
                    json!({
                        "id": a.id,
                        "statement": format!("{} is done", a.id),
                        "weight": hundredths_json(a.weight),
                        "recommendation": format!("Do {}", a.id),
                    })
                })
                .collect();
            json!({"id": DIMENSIONS[d], "name": DIMENSIONS[d], "actions": actions})
        })
        .collect();
    let thresholds: Vec<Value> = cat.thresholds.iter().map(|&t| hundredths_json(t)).collect();
    json!({"catalog_version": "oracle", "thresholds": thresholds, "dimensions": dims})
}

/// Reads a catalog document without going through the library parser.
pub fn from_document(doc: &Value) -> RefCatalog {
    let thresholds = match doc.get("thresholds") {
        Some(ts) => ts.as_array().unwrap().iter().map(number_to_hundredths).collect(),
        None => vec![25, 50, 75, 100],
    };
    let mut actions = Vec::new();
    for dim in doc["dimensions"].as_array().unwrap() {
        let d = DIMENSIONS
            .iter()
            .position(|n| *n == dim["id"].as_str().unwrap())
            .unwrap();
        for a in dim["actions"].as_array().unwrap() {
            actions.push(RefAction {
                id: a["id"].as_str().unwrap().to_string(),
                dimension: d,
                weight: a.get("weight").map_or(100, number_to_hundredths),
            });
        }
    }
    RefCatalog {
        actions,
        thresholds,
    }
}

/// A random catalog with `1..=max_per_dimension` actions per dimension,
/// weights in hundredths from 0.01 to 5.00 (or all equal when `uniform`), and
/// 1 to 5 thresholds ending at 1.
pub fn random_catalog(rng: &mut impl Rng, max_per_dimension: usize, uniform: bool) -> RefCatalog {
    let common = rng.random_range(1..=500);
    let mut actions = Vec::new();
    for d in 0..3 {
        for i in 0..rng.random_range(1..=max_per_dimension) {
            actions.push(RefAction {
                id: format!("{}-{i}", &DIMENSIONS[d][..3]),
                dimension: d,
                weight: if uniform { common } else { rng.random_range(1..=500) },
            });
        }
    }
    let mut cuts: BTreeSet<i128> = BTreeSet::new();
    for _ in 0..rng.random_range(0..=4) {
        cuts.insert(rng.random_range(1..=99));
    }
    let mut thresholds: Vec<i128> = cuts.into_iter().collect();
    thresholds.push(100);
    RefCatalog {
        actions,
        thresholds,
    }
}

pub fn subset(cat: &RefCatalog, mask: u64) -> BTreeSet<String> {
    cat.actions
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, a)| a.id.clone())
        .collect()
}

pub fn random_subset(cat: &RefCatalog, rng: &mut impl Rng) -> BTreeSet<String> {
    cat.actions
        .iter()
        .filter(|_| rng.random_bool(0.5))
        .map(|a| a.id.clone())
        .collect()
}
