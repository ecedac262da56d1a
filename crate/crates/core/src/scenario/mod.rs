//! Closed-loop experiments: references, switching schedules, and the sample loop.

mod builtin;
mod reference;
mod run;
mod schedule;

pub use builtin::{
    builtin_catalog_scenarios, builtin_scenario, builtin_scenarios, regulation_scenario,
    BuiltinScenario, Tunings, DELAY_CHANGE_TIME, LOOP_DELAY_AFTER, LOOP_DELAY_BEFORE,
};
pub use reference::{ReferenceTrajectory, Segment};
pub use run::{run_closed_loop, run_many, Outcome, ScenarioConfig, SimTrace, TraceRow, MAX_SAMPLES};
pub use schedule::{Mode, SwitchEvent, SwitchingSchedule, TIME_EPS};
