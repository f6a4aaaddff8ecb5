//! Self-play dialog-flow generation.

pub mod act;
pub mod customer;
pub mod dialog;
pub mod flow;
pub mod policy;
pub mod session;

pub use act::{ActName, CustomerAct, SalesAct, Slots, Speaker};
pub use customer::customer_step;
pub use dialog::{generate_goal, run_dialog, session_rng, session_seed, Simulator};
pub use flow::{flows_to_jsonl, read_flows, write_flows, DialogFlow, Outcome, Round, Turn};
pub use policy::{eligible_acts, is_stalled, salesperson_step, PolicyConfig};
pub use session::{apply_turn, consistent_items, GoalSpec, SessionState, Setting};
