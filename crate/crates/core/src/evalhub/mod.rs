//! Benchmark scoring, gold construction, corpus statistics and splitting.

pub mod bleu;
pub mod gold;
pub mod metrics;
pub mod records;
pub mod split;
pub mod stats;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use bleu::{eval_response, BleuReport};
pub use gold::build_gold;
pub use metrics::{eval_act, eval_recommend, eval_set_task, ActReport, Prf, SetReport};
pub use records::{read_rows, rows_to_jsonl, write_rows, Row};
pub use split::{split_corpus, Split, DEFAULT_RATIOS};
pub use stats::{corpus_stats, StatsReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    /// Values of the discussed attribute still consistent with the customer.
    Spd,
    /// Items inside the referred region.
    Rru,
    /// Next salesperson act.
    Act,
    /// Salesperson utterance text.
    Response,
    /// Target item of the dialog.
    Recommend,
}

impl Task {
    pub const ALL: [Task; 5] = [Task::Spd, Task::Rru, Task::Act, Task::Response, Task::Recommend];

    pub fn name(self) -> &'static str {
        match self {
            Task::Spd => "spd",
            Task::Rru => "rru",
            Task::Act => "act",
            Task::Response => "response",
            Task::Recommend => "recommend",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Task, Error> {
        Task::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::TaskMismatch(format!("unknown task `{s}`")))
    }
}
