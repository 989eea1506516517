//! Grid sweeps over channel parameters.

use std::fmt::Write as _;

use absep::classify::{criterion, evaluate_criterion};
use absep::state::purity_breakpoint_dim;
use absep::{ChannelSpec, MapStatus, MapVerdict, Partition};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::{usage, CliResult};

pub const MAX_AXES: usize = 3;

/// One swept parameter. `paths` are dotted locations in the channel JSON
/// (`q`, `factors.0.q`, `inner.alpha`); when empty the axis name is used.
/// Several paths tie parameters together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub paths: Vec<String>,
}

impl Axis {
    pub fn new(name: &str, min: f64, max: f64, steps: usize) -> Self {
        Axis {
            name: name.into(),
            min,
            max,
            steps,
            paths: Vec::new(),
        }
    }

    pub fn tied(name: &str, min: f64, max: f64, steps: usize, paths: &[&str]) -> Self {
        Axis {
            paths: paths.iter().map(|p| p.to_string()).collect(),
            ..Axis::new(name, min, max, steps)
        }
    }

    /// Grid value `i`, endpoints included.
    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            return self.max;
        }
        self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
    }

    fn paths(&self) -> Vec<&str> {
        if self.paths.is_empty() {
            vec![self.name.as_str()]
        } else {
            self.paths.iter().map(String::as_str).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Channel template; swept parameters are overwritten per cell.
    pub family: ChannelSpec,
    pub axes: Vec<Axis>,
    pub partition: String,
    pub criteria: Vec<String>,
}

/// One grid cell. `verdicts[k]` is `None` when the parameters leave the
/// positivity region of the family.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub point: Vec<f64>,
    pub verdicts: Vec<Option<MapVerdict>>,
    pub decided_by: String,
    pub margin: Option<f64>,
}

fn locate<'a>(root: &'a mut Value, path: &str) -> Option<&'a mut Value> {
    let mut cur = root;
    for key in path.split('.') {
        cur = match cur {
            Value::Object(map) => map.get_mut(key)?,
            Value::Array(items) => items.get_mut(key.parse::<usize>().ok()?)?,
            _ => return None,
        };
    }
    Some(cur)
}

impl SweepSpec {
    pub fn parse_partition(&self) -> CliResult<Partition> {
        Ok(self.partition.parse::<Partition>()?)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.axes.is_empty() || self.axes.len() > MAX_AXES {
            return Err(usage(format!(
                "a sweep needs 1 to {MAX_AXES} axes, got {}",
                self.axes.len()
            )));
        }
        if self.criteria.is_empty() {
            return Err(usage("a sweep needs at least one criterion"));
        }
        for id in &self.criteria {
            if !criterion::EVALUABLE.contains(&id.as_str()) {
                return Err(usage(format!(
                    "unknown criterion {id:?}; known: {}",
                    criterion::EVALUABLE.join(", ")
                )));
            }
        }
        let mut template = serde_json::to_value(&self.family).expect("serializable");
        for axis in &self.axes {
            if axis.steps < 2 {
                return Err(usage(format!(
                    "axis {:?} needs at least 2 steps, got {}",
                    axis.name, axis.steps
                )));
            }
            if !(axis.min.is_finite() && axis.max.is_finite() && axis.min < axis.max) {
                return Err(usage(format!(
                    "axis {:?} needs finite min < max",
                    axis.name
                )));
            }
            for path in axis.paths() {
                match locate(&mut template, path) {
                    Some(v) if v.is_number() => {}
                    _ => {
                        return Err(usage(format!(
                            "{path:?} is not a parameter of family {}",
                            self.family.family()
                        )))
                    }
                }
            }
        }
        let part = self.parse_partition()?;
        if part.dim() != self.family.dim() {
            return Err(usage(format!(
                "partition {part} does not match channel dimension {}",
                self.family.dim()
            )));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.axes.iter().map(|a| a.steps).product()
    }

    /// Grid point of cell `idx`, first axis slowest.
    pub fn point(&self, mut idx: usize) -> Vec<f64> {
        let mut point = vec![0.0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            point[k] = axis.value(idx % axis.steps);
            idx /= axis.steps;
        }
        point
    }

    pub fn channel_at(&self, point: &[f64]) -> CliResult<ChannelSpec> {
        let mut v = serde_json::to_value(&self.family).expect("serializable");
        for (axis, x) in self.axes.iter().zip(point) {
            for path in axis.paths() {
                let slot = locate(&mut v, path)
                    .ok_or_else(|| usage(format!("missing parameter {path:?}")))?;
                *slot = json!(x);
            }
        }
        serde_json::from_value(v).map_err(|e| usage(format!("bad channel at {point:?}: {e}")))
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("serializable");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

fn evaluate_cell(spec: &SweepSpec, part: &Partition, idx: usize) -> CliResult<SweepRecord> {
    let point = spec.point(idx);
    let c = spec.channel_at(&point)?;
    if c.validate().is_err() {
        return Ok(SweepRecord {
            point,
            verdicts: vec![None; spec.criteria.len()],
            decided_by: "invalid".into(),
            margin: None,
        });
    }
    let verdicts = spec
        .criteria
        .iter()
        .map(|id| evaluate_criterion(id, &c, part).map(Some))
        .collect::<absep::Result<Vec<_>>>()?;
    let decided = verdicts.iter().flatten().find(|v| !v.is_undetermined());
    let (decided_by, margin) = match decided {
        Some(v) => (v.criterion.clone(), Some(v.margin)),
        None => (
            criterion::NONE.to_string(),
            verdicts.first().and_then(|v| v.as_ref().map(|v| v.margin)),
        ),
    };
    Ok(SweepRecord {
        point,
        verdicts,
        decided_by,
        margin,
    })
}

/// Evaluates every cell, in parallel, returned in row-major order.
pub fn run_sweep(spec: &SweepSpec) -> CliResult<Vec<SweepRecord>> {
    spec.validate()?;
    let part = spec.parse_partition()?;
    (0..spec.cell_count())
        .into_par_iter()
        .map(|idx| evaluate_cell(spec, &part, idx))
        .collect()
}

pub fn status_label(s: MapStatus) -> &'static str {
    match s {
        MapStatus::AbsolutelySeparating => "AS",
        MapStatus::NotAbsolutelySeparating => "NotAS",
        MapStatus::Undetermined => "Undetermined",
    }
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        String::new()
    }
}

pub fn provenance_lines(seed: u64, hash: &str) -> String {
    format!(
        "# absep {}\n# seed {seed}\n# spec sha256 {hash}\n",
        env!("CARGO_PKG_VERSION")
    )
}

pub fn render_csv(spec: &SweepSpec, records: &[SweepRecord], seed: u64) -> String {
    let mut out = provenance_lines(seed, &spec.hash());
    let mut header: Vec<String> = spec.axes.iter().map(|a| a.name.clone()).collect();
    for id in &spec.criteria {
        header.push(id.clone());
        header.push(format!("{id}_margin"));
    }
    header.push("decided_by".into());
    header.push("margin".into());
    out.push_str(&header.join(","));
    out.push('\n');
    for r in records {
        let mut row: Vec<String> = r.point.iter().map(|x| num(*x)).collect();
        for v in &r.verdicts {
            match v {
                Some(v) => {
                    row.push(status_label(v.status).into());
                    row.push(num(v.margin));
                }
                None => {
                    row.push("invalid".into());
                    row.push(String::new());
                }
            }
        }
        row.push(r.decided_by.clone());
        row.push(r.margin.map(num).unwrap_or_default());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn render_json(spec: &SweepSpec, records: &[SweepRecord], seed: u64) -> String {
    let rows: Vec<Value> = records
        .iter()
        .map(|r| {
            let point: serde_json::Map<String, Value> = spec
                .axes
                .iter()
                .zip(&r.point)
                .map(|(a, x)| (a.name.clone(), json!(x)))
                .collect();
            let criteria: serde_json::Map<String, Value> = spec
                .criteria
                .iter()
                .zip(&r.verdicts)
                .map(|(id, v)| {
                    let entry = match v {
                        Some(v) => json!({"status": status_label(v.status), "margin": v.margin}),
                        None => json!({"status": "invalid"}),
                    };
                    (id.clone(), entry)
                })
                .collect();
            json!({
                "point": point,
                "criteria": criteria,
                "decided_by": r.decided_by,
                "margin": r.margin,
            })
        })
        .collect();
    let doc = json!({
        "provenance": {
            "tool": format!("absep {}", env!("CARGO_PKG_VERSION")),
            "seed": seed,
            "spec_sha256": spec.hash(),
        },
        "spec": spec,
        "records": rows,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

/// Curves behind the purity-versus-dimension plot: the separable ball
/// `1/(mn-1)`, the purity where the bracketed necessary bound starts to
/// fail, and the simple bound `9/(mn+8)`, for `mn = 4..=64`.
pub fn figure1_csv(seed: u64) -> String {
    let mut out = provenance_lines(seed, &figure1_hash());
    out.push_str("mn,ball,purity_breakpoint,simple_bound\n");
    for mn in 4..=64usize {
        let d = mn as f64;
        let _ = writeln!(
            out,
            "{mn},{},{},{}",
            1.0 / (d - 1.0),
            purity_breakpoint_dim(mn),
            9.0 / (d + 8.0)
        );
    }
    out
}

fn figure1_hash() -> String {
    hex::encode(Sha256::digest(b"figure-1 mn=4..=64"))
}

pub fn figure1_json(seed: u64) -> String {
    let rows: Vec<Value> = (4..=64usize)
        .map(|mn| {
            let d = mn as f64;
            json!({
                "mn": mn,
                "ball": 1.0 / (d - 1.0),
                "purity_breakpoint": purity_breakpoint_dim(mn),
                "simple_bound": 9.0 / (d + 8.0),
            })
        })
        .collect();
    let doc = json!({
        "provenance": {
            "tool": format!("absep {}", env!("CARGO_PKG_VERSION")),
            "seed": seed,
            "spec_sha256": figure1_hash(),
        },
        "records": rows,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

pub const PRESETS: &[&str] = &[
    "figure-1", "figure-3", "figure-4", "figure-5", "figure-6", "figure-7",
];

fn dep2(q: f64) -> ChannelSpec {
    ChannelSpec::Depolarizing { d: 2, q }
}

/// Grid presets for the region plots. `figure-1` is not a grid and is
/// produced by [`figure1_csv`]; `steps` overrides the default resolution.
pub fn preset(name: &str, steps: Option<usize>) -> CliResult<SweepSpec> {
    let s = |default: usize| steps.unwrap_or(default);
    let ids = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let spec = match name {
        "figure-3" => SweepSpec {
            family: ChannelSpec::LocalProduct {
                factors: vec![dep2(0.0), dep2(0.0)],
            },
            axes: vec![
                Axis::tied("q1", -1.0, 1.0, s(400), &["factors.0.q"]),
                Axis::tied("q2", -1.0, 1.0, s(400), &["factors.1.q"]),
            ],
            partition: "2x2".into(),
            criteria: ids(&[
                criterion::LOCAL_DEP_2Q_EXACT,
                criterion::LOCAL_DEP_2Q_SUFFICIENT,
            ]),
        },
        "figure-4" => {
            let u = ChannelSpec::UnitalQubit {
                l1: 0.0,
                l2: 0.0,
                l3: 0.0,
            };
            SweepSpec {
                family: ChannelSpec::LocalProduct {
                    factors: vec![u.clone(), u],
                },
                axes: ["l1", "l2", "l3"]
                    .iter()
                    .map(|l| {
                        let p0 = format!("factors.0.{l}");
                        let p1 = format!("factors.1.{l}");
                        Axis::tied(l, -1.0, 1.0, s(41), &[&p0, &p1])
                    })
                    .collect(),
                partition: "2x2".into(),
                criteria: ids(&[criterion::LOCAL_UNITAL, criterion::DISPATCH]),
            }
        }
        "figure-5" => SweepSpec {
            family: ChannelSpec::TraceIdTranspose {
                d: 8,
                alpha: 0.0,
                beta: 0.0,
            },
            axes: vec![
                Axis::new("alpha", -2.0, 6.0, s(300)),
                Axis::new("beta", -2.0, 6.0, s(300)),
            ],
            partition: "2x4".into(),
            criteria: ids(&[
                criterion::CTIT_SUFFICIENT,
                criterion::CTIT_2N_EXACT,
                criterion::CTIT_NECESSARY,
            ]),
        },
        "figure-6" | "figure-7" => {
            let k = if name == "figure-6" { 2 } else { 3 };
            SweepSpec {
                family: ChannelSpec::BipartiteDepolarizing {
                    m: k,
                    n: k,
                    alpha: 0.0,
                    beta: 0.0,
                    gamma: 0.0,
                },
                axes: vec![
                    Axis::new("alpha", -2.0, 4.0, s(41)),
                    Axis::new("beta", -2.0, 4.0, s(41)),
                    Axis::new("gamma", -4.0, 8.0, s(41)),
                ],
                partition: format!("{k}x{k}"),
                criteria: ids(&[criterion::BIDEP_SUFFICIENT, criterion::BIDEP_NECESSARY]),
            }
        }
        _ => {
            return Err(usage(format!(
                "unknown preset {name:?}; known: {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SweepSpec {
        preset("figure-3", Some(5)).unwrap()
    }

    #[test]
    fn grid_points_row_major() {
        let spec = small();
        assert_eq!(spec.cell_count(), 25);
        assert_eq!(spec.point(0), vec![-1.0, -1.0]);
        assert_eq!(spec.point(1), vec![-1.0, -0.5]);
        assert_eq!(spec.point(5), vec![-0.5, -1.0]);
        assert_eq!(spec.point(24), vec![1.0, 1.0]);
    }

    #[test]
    fn channel_substitution() {
        let spec = small();
        let c = spec.channel_at(&[0.25, -0.5]).unwrap();
        assert_eq!(
            c,
            ChannelSpec::LocalProduct {
                factors: vec![dep2(0.25), dep2(-0.5)]
            }
        );
    }

    #[test]
    fn validation() {
        let mut spec = small();
        spec.axes[0].steps = 1;
        assert!(spec.validate().is_err());
        let mut spec = small();
        spec.axes[0].paths = vec!["factors.0.nope".into()];
        assert!(spec.validate().is_err());
        let mut spec = small();
        spec.criteria.push("nope".into());
        assert!(spec.validate().is_err());
        let mut spec = small();
        spec.partition = "2x3".into();
        assert!(spec.validate().is_err());
        let mut spec = small();
        spec.axes[0].min = 2.0;
        assert!(spec.validate().is_err());
        assert!(preset("figure-9", None).is_err());
        for p in PRESETS.iter().filter(|p| **p != "figure-1") {
            preset(p, Some(2)).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn csv_shape() {
        let spec = small();
        let recs = run_sweep(&spec).unwrap();
        let csv = render_csv(&spec, &recs, 0);
        let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 26);
        assert_eq!(
            rows[0],
            "q1,q2,local_dep_2q_exact,local_dep_2q_exact_margin,\
             local_dep_2q_sufficient,local_dep_2q_sufficient_margin,decided_by,margin"
        );
        assert!(csv.starts_with("# absep "));
        // Centre cell (0, 0) is AS for both.
        assert!(rows[13].starts_with("0,0,AS,"));
        let json = render_json(&spec, &recs, 0);
        let v: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["records"].as_array().unwrap().len(), 25);
    }

    #[test]
    fn invalid_cells_are_marked() {
        let spec = preset("figure-5", Some(9)).unwrap();
        let recs = run_sweep(&spec).unwrap();
        // alpha = beta = -2 leaves the positivity region.
        assert_eq!(recs[0].decided_by, "invalid");
        assert!(recs[0].verdicts.iter().all(Option::is_none));
        assert!(recs.iter().any(|r| r.decided_by != "invalid"));
    }

    #[test]
    fn figure1_rows() {
        let csv = figure1_csv(0);
        let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 62);
        for row in &rows[1..] {
            let f: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
            // ball <= breakpoint <= simple bound
            assert!(f[1] <= f[2] + 1e-12 && f[2] <= f[3] + 1e-12, "{row}");
        }
    }
}
