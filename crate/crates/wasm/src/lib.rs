//! Browser bindings. Every entry point takes and returns JSON text so the
//! page needs no generated types.

use polyvol_core::instance::{parse_instance, to_json};
use polyvol_core::oracle::{mc_points, mc_volume, random};
use polyvol_core::rat::{to_decimal, to_f64};
use polyvol_core::residue::LevelStats;
use polyvol_core::{normalize, run_direct, run_transform, Error, PolytopeInstance};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Failure {
    ok: bool,
    code: u8,
    error: String,
}

fn failure(e: Error) -> String {
    serde_json::to_string(&Failure { ok: false, code: e.exit_code(), error: e.to_string() }).unwrap()
}

#[derive(Serialize)]
struct Level {
    var: String,
    terms_in: usize,
    poles: usize,
    left: usize,
    right: usize,
    terms_out: usize,
}

impl From<&LevelStats> for Level {
    fn from(st: &LevelStats) -> Self {
        Level {
            var: st.var.to_string(),
            terms_in: st.terms_in,
            poles: st.poles_found,
            left: st.left_poles,
            right: st.right_poles,
            terms_out: st.terms_out,
        }
    }
}

#[derive(Serialize)]
struct Shift {
    var: String,
    from: String,
    to: String,
}

#[derive(Serialize)]
struct VolumeReport {
    ok: bool,
    fraction: String,
    decimal: String,
    value: f64,
    n: usize,
    abscissae: Vec<String>,
    direct_levels: Vec<Level>,
    transform_levels: Vec<Level>,
    partials: Vec<String>,
    h_coefficient: String,
    perturbations: Vec<Shift>,
}

fn load(instance_json: &str) -> Result<PolytopeInstance, Error> {
    Ok(parse_instance(instance_json, false)?.instance)
}

/// Exact volume by both methods, with the level trace.
#[wasm_bindgen]
pub fn volume(instance_json: &str, digits: usize) -> String {
    let run = || -> Result<VolumeReport, Error> {
        let norm = normalize(&load(instance_json)?)?;
        let d = run_direct(&norm, None)?;
        let t = run_transform(&norm, None)?;
        if d.result != t.result {
            return Err(Error::Internal(format!("methods disagree: {} vs {}", d.result, t.result)));
        }
        let perturbations = d
            .config
            .ledger()
            .iter()
            .chain(t.config.ledger())
            .map(|e| Shift { var: e.var.to_string(), from: e.from.to_string(), to: e.to.to_string() })
            .collect();
        Ok(VolumeReport {
            ok: true,
            fraction: d.result.to_string(),
            decimal: to_decimal(&d.result, digits.min(60)),
            value: to_f64(&d.result),
            n: norm.n(),
            abscissae: norm.interior().iter().map(|c| c.to_string()).collect(),
            direct_levels: d.levels.iter().map(Level::from).collect(),
            transform_levels: t.levels.iter().map(Level::from).collect(),
            partials: d.partials.iter().map(|p| p.to_string()).collect(),
            h_coefficient: t.h_coefficient.to_string(),
            perturbations,
        })
    };
    match run() {
        Ok(report) => serde_json::to_string(&report).unwrap(),
        Err(e) => failure(e),
    }
}

#[derive(Serialize)]
struct McReport {
    ok: bool,
    estimate: f64,
    stderr: f64,
    samples: u64,
    hits: u64,
    box_side: f64,
    /// `[x, y, hit]` for the first points, planar instances only.
    points: Vec<(f64, f64, bool)>,
}

/// Seeded hit-or-miss estimate plus up to `show` of its sample points.
#[wasm_bindgen]
pub fn monte_carlo(instance_json: &str, samples: u32, seed: u32, show: u32) -> String {
    let run = || -> Result<McReport, Error> {
        let inst = load(instance_json)?;
        let est = mc_volume(&inst, samples as u64, seed as u64)?;
        let points = if inst.n() == 2 {
            mc_points(&inst, show.min(samples) as usize, seed as u64)?.into_iter().map(|(x, hit)| (x[0], x[1], hit)).collect()
        } else {
            Vec::new()
        };
        Ok(McReport {
            ok: true,
            estimate: est.estimate,
            stderr: est.stderr,
            samples: est.samples,
            hits: est.hits,
            box_side: to_f64(&est.box_bound),
            points,
        })
    };
    match run() {
        Ok(report) => serde_json::to_string(&report).unwrap(),
        Err(e) => failure(e),
    }
}

/// A random bounded, non-degenerate `m×n` instance as instance JSON.
#[wasm_bindgen]
pub fn random_instance(m: u32, n: u32, seed: u32) -> String {
    let (m, n) = (m.clamp(1, 6) as usize, n.clamp(1, 8) as usize);
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    loop {
        let inst = PolytopeInstance::new(random::bounded_matrix(&mut rng, m, n), random::positive_rhs(&mut rng, m))
            .expect("shape is consistent");
        let ok = normalize(&inst).and_then(|norm| run_direct(&norm, None).and(run_transform(&norm, None)));
        if ok.is_ok() {
            return to_json(&inst);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    const EXAMPLE: &str = r#"{"A": [["1","1"],["-2","2"],["2","-1"]], "b": ["1","1","1"]}"#;

    #[test]
    fn volume_of_example() {
        let v: Value = serde_json::from_str(&volume(EXAMPLE, 12)).unwrap();
        assert_eq!(v["ok"], true);
        assert_eq!(v["fraction"], "17/48");
        assert_eq!(v["decimal"], "0.354166666667");
        assert_eq!(v["h_coefficient"], "17/24");
        assert_eq!(v["direct_levels"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn errors_carry_exit_codes() {
        let v: Value = serde_json::from_str(&volume(r#"{"A": [["1","-1"]], "b": ["1"]}"#, 6)).unwrap();
        assert_eq!(v["ok"], false);
        assert_eq!(v["code"], 4);
        let v: Value = serde_json::from_str(&volume("{", 6)).unwrap();
        assert_eq!(v["code"], 2);
        let v: Value = serde_json::from_str(&monte_carlo(r#"{"A": [["1","-1"]], "b": ["1"]}"#, 10, 0, 10)).unwrap();
        assert_eq!(v["code"], 4);
    }

    #[test]
    fn monte_carlo_points() {
        let v: Value = serde_json::from_str(&monte_carlo(EXAMPLE, 50_000, 4, 300)).unwrap();
        assert_eq!(v["ok"], true);
        assert_eq!(v["points"].as_array().unwrap().len(), 300);
        let est = v["estimate"].as_f64().unwrap();
        let se = v["stderr"].as_f64().unwrap();
        assert!((est - 17.0 / 48.0).abs() < 4.0 * se);
    }

    #[test]
    fn random_instances_are_computable() {
        for seed in 0..5 {
            let text = random_instance(3, 2, seed);
            let v: Value = serde_json::from_str(&volume(&text, 8)).unwrap();
            assert_eq!(v["ok"], true, "{text}");
        }
        assert_eq!(random_instance(2, 3, 7), random_instance(2, 3, 7));
    }
}
