//! JSON shapes printed by the command.

use absep::witness::Witness;
use absep::{Matrix, Status, Verdict};
use serde::Serialize;
use serde_json::{json, Value};

use crate::exit;

fn matrix_json(m: &Matrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| {
            Value::Array(
                (0..m.cols())
                    .map(|j| json!([m[(i, j)].re, m[(i, j)].im]))
                    .collect(),
            )
        })
        .collect();
    Value::Array(rows)
}

/// Witness with its unitary as rows of `[re, im]` pairs.
pub fn witness_json(w: &Witness) -> Value {
    json!({
        "channel": w.channel,
        "input": w.input,
        "partition": w.partition.to_string(),
        "negativity": w.negativity,
        "unrefined_negativity": w.unrefined_negativity,
        "trial": w.trial,
        "unitary": matrix_json(w.unitary.matrix()),
    })
}

pub fn to_pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

pub fn state_exit_code(v: &Verdict) -> i32 {
    match v.status {
        Status::Holds => exit::HOLDS,
        Status::Fails => exit::FAILS,
        Status::Undetermined => exit::UNDETERMINED,
    }
}

pub fn map_exit_code(v: &absep::MapVerdict) -> i32 {
    match v.status {
        absep::MapStatus::AbsolutelySeparating => exit::HOLDS,
        absep::MapStatus::NotAbsolutelySeparating => exit::FAILS,
        absep::MapStatus::Undetermined => exit::UNDETERMINED,
    }
}

pub const SEARCH_CRITERION: &str = "random_unitary_witness";

/// Replaces an undetermined verdict by NotAS when the random search finds a
/// witness. Decided verdicts are returned unchanged.
pub fn upgrade_with_search(
    v: absep::MapVerdict,
    c: &absep::ChannelSpec,
    part: absep::Bipartition,
    trials: usize,
    seed: u64,
) -> absep::Result<(absep::MapVerdict, Option<Witness>)> {
    if !v.is_undetermined() {
        return Ok((v, None));
    }
    match absep::witness::random_unitary_witness(c, part, trials, seed)? {
        Some(w) => {
            let up = absep::MapVerdict::new(
                absep::MapStatus::NotAbsolutelySeparating,
                SEARCH_CRITERION,
                v.partition,
                w.negativity,
            )
            .with_witness(absep::Evidence::input(w.input.clone()));
            Ok((up, Some(w)))
        }
        None => Ok((v, None)),
    }
}
