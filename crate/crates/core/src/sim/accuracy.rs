//! Declarative task expectations evaluated against a simulator run.
//!
//! By default an expectation looks at which actions were executed and at
//! the end-state flags, not at where the robot ended up. Pose checks exist
//! but have to be asked for explicitly.

use serde::{Deserialize, Serialize};

use super::{RobotState, SimFailure};
use crate::syntax::{Command, ParamKind, StatementKind};

/// Tolerance for exact numeric argument patterns.
const ARG_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskExpectation {
    pub predicates: Vec<Predicate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Predicate {
    /// The whole executed trace matches this pattern list.
    Sequence { steps: Vec<StepPattern> },
    /// What the gripper holds at the end (`null` for nothing).
    Held { object: Option<String> },
    Perceived { value: bool },
    /// Signed sum of executed turns (left positive), in radians. With
    /// `absolute` the bounds apply to the magnitude of the sum.
    TurnTotal {
        #[serde(default)]
        min: Option<f64>,
        #[serde(default)]
        max: Option<f64>,
        #[serde(default)]
        absolute: bool,
    },
    /// Number of executed statements whose command is in `commands`.
    Count {
        commands: CommandPattern,
        #[serde(default)]
        min: Option<usize>,
        #[serde(default)]
        max: Option<usize>,
    },
    /// Opt-in final position check.
    Pose { x: f64, y: f64, tolerance: f64 },
}

/// `"forward"`, `["turnleft", "turnright"]` or `"*"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CommandPattern {
    One(String),
    AnyOf(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepPattern {
    pub cmd: CommandPattern,
    /// Per-parameter patterns; omitted means any arguments.
    #[serde(default)]
    pub args: Option<Vec<ArgPattern>>,
    /// Defaults to exactly once.
    #[serde(default)]
    pub repeat: Option<Repeat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Repeat {
    #[serde(default)]
    pub min: usize,
    #[serde(default)]
    pub max: Option<usize>,
}

/// A number (matched within 1e-6), an inclusive `{min, max}` range, an
/// object name, or `"*"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ArgPattern {
    Exact(f64),
    Range {
        #[serde(default)]
        min: Option<f64>,
        #[serde(default)]
        max: Option<f64>,
    },
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExpectationError {
    #[error("expectation has no predicates")]
    Empty,
    #[error("unknown command `{0}` in pattern")]
    UnknownCommand(String),
    #[error("pattern for `{cmd}` gives {found} argument(s), the statement takes {expected}")]
    ArgCount { cmd: String, expected: usize, found: usize },
    #[error("argument patterns need a single command or commands with one shared schema")]
    MixedSchemas,
    #[error("pattern `{0}` does not fit a {1} parameter")]
    ArgKind(String, ParamKind),
    #[error("empty range: min > max")]
    EmptyRange,
    #[error("pose tolerance must be positive and finite")]
    BadTolerance,
    #[error("invalid object name `{0}`")]
    BadObject(String),
}

impl CommandPattern {
    fn commands(&self) -> Result<Vec<Command>, ExpectationError> {
        let names: Vec<&str> = match self {
            CommandPattern::One(s) if s == "*" => return Ok(Command::ALL.to_vec()),
            CommandPattern::One(s) => vec![s.as_str()],
            CommandPattern::AnyOf(v) => v.iter().map(String::as_str).collect(),
        };
        names
            .into_iter()
            .map(|n| Command::from_keyword(n).ok_or_else(|| ExpectationError::UnknownCommand(n.to_owned())))
            .collect()
    }

    fn matches(&self, cmd: Command) -> bool {
        match self {
            CommandPattern::One(s) => s == "*" || s == cmd.keyword(),
            CommandPattern::AnyOf(v) => v.iter().any(|s| s == cmd.keyword()),
        }
    }
}

fn check_range(min: Option<f64>, max: Option<f64>) -> Result<(), ExpectationError> {
    match (min, max) {
        (Some(lo), Some(hi)) if lo > hi => Err(ExpectationError::EmptyRange),
        _ => Ok(()),
    }
}

impl ArgPattern {
    fn validate(&self, kind: ParamKind) -> Result<(), ExpectationError> {
        match (self, kind) {
            (ArgPattern::Text(s), _) if s == "*" => Ok(()),
            (ArgPattern::Text(s), ParamKind::Object) => {
                crate::syntax::ObjectName::new(s).map(|_| ()).map_err(|_| ExpectationError::BadObject(s.clone()))
            }
            (ArgPattern::Exact(_), ParamKind::Number) => Ok(()),
            (ArgPattern::Range { min, max }, ParamKind::Number) => check_range(*min, *max),
            (other, kind) => Err(ExpectationError::ArgKind(format!("{other:?}"), kind)),
        }
    }

    fn matches_number(&self, v: f64) -> bool {
        match self {
            ArgPattern::Exact(x) => (v - x).abs() <= ARG_TOLERANCE,
            ArgPattern::Range { min, max } => min.is_none_or(|lo| v >= lo) && max.is_none_or(|hi| v <= hi),
            ArgPattern::Text(s) => s == "*",
        }
    }

    fn matches_object(&self, name: &str) -> bool {
        matches!(self, ArgPattern::Text(s) if s == "*" || s == name)
    }
}

impl StepPattern {
    fn validate(&self) -> Result<(), ExpectationError> {
        let commands = self.cmd.commands()?;
        if let Some(args) = &self.args {
            let schema = commands[0].params();
            if commands.iter().any(|c| c.params() != schema) {
                return Err(ExpectationError::MixedSchemas);
            }
            if args.len() != schema.len() {
                return Err(ExpectationError::ArgCount {
                    cmd: commands[0].keyword().to_owned(),
                    expected: schema.len(),
                    found: args.len(),
                });
            }
            for (a, k) in args.iter().zip(schema) {
                a.validate(*k)?;
            }
        }
        if let Some(r) = self.repeat {
            if r.max.is_some_and(|m| m < r.min) {
                return Err(ExpectationError::EmptyRange);
            }
        }
        Ok(())
    }

    fn bounds(&self) -> (usize, usize) {
        match self.repeat {
            None => (1, 1),
            Some(r) => (r.min, r.max.unwrap_or(usize::MAX)),
        }
    }

    fn matches(&self, s: &StatementKind) -> bool {
        if !self.cmd.matches(s.command()) {
            return false;
        }
        let Some(args) = &self.args else { return true };
        match s {
            StatementKind::Perceive => args.is_empty(),
            StatementKind::GoTo { x, y } => {
                args.len() == 2 && args[0].matches_number(x.value()) && args[1].matches_number(y.value())
            }
            StatementKind::Approach { object } | StatementKind::Grasp { object } => {
                args.len() == 1 && args[0].matches_object(object.as_str())
            }
            other => {
                let n = other.magnitude().expect("motion statement");
                args.len() == 1 && args[0].matches_number(n.value())
            }
        }
    }
}

/// Backtracking match of `steps` against the whole of `trace`.
fn match_sequence(steps: &[StepPattern], trace: &[&StatementKind]) -> bool {
    let Some((first, rest)) = steps.split_first() else {
        return trace.is_empty();
    };
    let (min, max) = first.bounds();
    let mut taken = 0;
    loop {
        if taken >= min && match_sequence(rest, &trace[taken..]) {
            return true;
        }
        if taken == max || taken == trace.len() || !first.matches(trace[taken]) {
            return false;
        }
        taken += 1;
    }
}

impl Predicate {
    fn validate(&self) -> Result<(), ExpectationError> {
        match self {
            Predicate::Sequence { steps } => steps.iter().try_for_each(StepPattern::validate),
            Predicate::Held { object: Some(o) } => crate::syntax::ObjectName::new(o)
                .map(|_| ())
                .map_err(|_| ExpectationError::BadObject(o.clone())),
            Predicate::Held { object: None } | Predicate::Perceived { .. } => Ok(()),
            Predicate::TurnTotal { min, max, .. } => check_range(*min, *max),
            Predicate::Count { commands, min, max } => {
                commands.commands()?;
                match (min, max) {
                    (Some(lo), Some(hi)) if lo > hi => Err(ExpectationError::EmptyRange),
                    _ => Ok(()),
                }
            }
            Predicate::Pose { tolerance, .. } => {
                if tolerance.is_finite() && *tolerance > 0.0 {
                    Ok(())
                } else {
                    Err(ExpectationError::BadTolerance)
                }
            }
        }
    }

    pub fn holds(&self, state: &RobotState) -> bool {
        let trace: Vec<&StatementKind> = state.trace.iter().map(|r| &r.statement).collect();
        match self {
            Predicate::Sequence { steps } => match_sequence(steps, &trace),
            Predicate::Held { object } => state.held.as_ref().map(|o| o.as_str()) == object.as_deref(),
            Predicate::Perceived { value } => state.perceived == *value,
            Predicate::TurnTotal { min, max, absolute } => {
                let signed: f64 = trace
                    .iter()
                    .map(|s| match s {
                        StatementKind::TurnLeft { angle } => angle.value(),
                        StatementKind::TurnRight { angle } => -angle.value(),
                        _ => 0.0,
                    })
                    .sum();
                let total = if *absolute { signed.abs() } else { signed };
                min.is_none_or(|lo| total >= lo) && max.is_none_or(|hi| total <= hi)
            }
            Predicate::Count { commands, min, max } => {
                let n = trace.iter().filter(|s| commands.matches(s.command())).count();
                min.is_none_or(|lo| n >= lo) && max.is_none_or(|hi| n <= hi)
            }
            Predicate::Pose { x, y, tolerance } => {
                (state.pose.x - x).hypot(state.pose.y - y) <= *tolerance
            }
        }
    }
}

impl TaskExpectation {
    pub fn validate(&self) -> Result<(), ExpectationError> {
        if self.predicates.is_empty() {
            return Err(ExpectationError::Empty);
        }
        self.predicates.iter().try_for_each(Predicate::validate)
    }

    pub fn holds(&self, state: &RobotState) -> bool {
        self.predicates.iter().all(|p| p.holds(state))
    }
}

/// True iff the run succeeded and every predicate holds.
pub fn evaluate_accuracy(outcome: &Result<RobotState, SimFailure>, expectation: &TaskExpectation) -> bool {
    match outcome {
        Ok(state) => expectation.holds(state),
        Err(_) => false,
    }
}
