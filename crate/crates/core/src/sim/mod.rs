//! A 2D kinematic robot used to execute verified programs.
//!
//! The robot has a planar pose, a pan/tilt camera, a single gripper and a
//! "perceived" flag set by `perceive`. The world is a set of named point
//! objects. There is no physics; each statement maps one state to the next.

mod accuracy;

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize, Serializer};

use crate::parser::VerifiedProgram;
use crate::syntax::{ObjectName, StatementKind};

pub use accuracy::{
    evaluate_accuracy, ArgPattern, CommandPattern, ExpectationError, Predicate, Repeat, StepPattern,
    TaskExpectation,
};

pub const DEFAULT_GRASP_RANGE: f64 = 0.5;
pub const DEFAULT_REACH_OFFSET: f64 = 0.5;

/// Slack on the grasp distance check. An approach lands exactly at the
/// reach offset up to rounding.
const GRASP_EPSILON: f64 = 1e-9;

fn default_grasp_range() -> f64 {
    DEFAULT_GRASP_RANGE
}

fn default_reach_offset() -> f64 {
    DEFAULT_REACH_OFFSET
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct World {
    pub objects: BTreeMap<ObjectName, (f64, f64)>,
    #[serde(default = "default_grasp_range")]
    pub grasp_range: f64,
    #[serde(default = "default_reach_offset")]
    pub reach_offset: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum WorldError {
    #[error("malformed world file: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("object `{0}` has non-finite coordinates")]
    NonFinite(String),
    #[error("{0} must be finite and non-negative")]
    BadGeometry(&'static str),
}

impl World {
    pub fn new(objects: impl IntoIterator<Item = (ObjectName, (f64, f64))>) -> World {
        World {
            objects: objects.into_iter().collect(),
            grasp_range: DEFAULT_GRASP_RANGE,
            reach_offset: DEFAULT_REACH_OFFSET,
        }
    }

    pub fn from_json(text: &str) -> Result<World, WorldError> {
        let world: World = serde_json::from_str(text)?;
        for (name, (x, y)) in &world.objects {
            if !x.is_finite() || !y.is_finite() {
                return Err(WorldError::NonFinite(name.to_string()));
            }
        }
        for (label, v) in [("grasp_range", world.grasp_range), ("reach_offset", world.reach_offset)] {
            if !v.is_finite() || v < 0.0 {
                return Err(WorldError::BadGeometry(label));
            }
        }
        Ok(world)
    }

    pub fn object(&self, name: &ObjectName) -> Option<(f64, f64)> {
        self.objects.get(name).copied()
    }
}

impl Default for World {
    fn default() -> Self {
        World::new([])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Radians, kept in (-π, π].
    pub heading: f64,
    pub cam_pan: f64,
    pub cam_tilt: f64,
}

fn serialize_statement<S: Serializer>(s: &StatementKind, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&s.to_string())
}

/// One executed statement and the state it produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    #[serde(serialize_with = "serialize_statement")]
    pub statement: StatementKind,
    #[serde(flatten)]
    pub pose: Pose,
    pub held: Option<ObjectName>,
    pub perceived: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RobotState {
    pub pose: Pose,
    pub held: Option<ObjectName>,
    pub perceived: bool,
    pub trace: Vec<TraceRecord>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("unknown object `{0}`")]
    UnknownObject(ObjectName),
    #[error("`{object}` is {distance:.3} m away, beyond grasp range {range} m")]
    GraspOutOfRange { object: ObjectName, distance: f64, range: f64 },
    #[error("cannot grasp `{requested}` while holding `{held}`")]
    HandFull { held: ObjectName, requested: ObjectName },
}

/// A failed run: the error, the index of the failing statement and the
/// state reached before it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("statement {index}: {error}")]
pub struct SimFailure {
    pub error: SimError,
    pub index: usize,
    pub state: RobotState,
}

/// Wraps an angle into (-π, π]. Angles already in range are returned
/// unchanged.
pub fn wrap_angle(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let r = (a + PI).rem_euclid(TAU) - PI;
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

impl RobotState {
    pub fn at(x: f64, y: f64, heading: f64) -> RobotState {
        RobotState {
            pose: Pose { x, y, heading: wrap_angle(heading), ..Pose::default() },
            ..RobotState::default()
        }
    }

    /// Applies one statement. On error the state is left untouched.
    pub fn apply(&mut self, world: &World, s: &StatementKind) -> Result<(), SimError> {
        let p = &mut self.pose;
        match s {
            StatementKind::Forward { distance } => {
                p.x += distance.value() * p.heading.cos();
                p.y += distance.value() * p.heading.sin();
            }
            StatementKind::Backward { distance } => {
                p.x -= distance.value() * p.heading.cos();
                p.y -= distance.value() * p.heading.sin();
            }
            StatementKind::TurnLeft { angle } => p.heading = wrap_angle(p.heading + angle.value()),
            StatementKind::TurnRight { angle } => p.heading = wrap_angle(p.heading - angle.value()),
            StatementKind::LookUp { angle } => p.cam_tilt += angle.value(),
            StatementKind::LookDown { angle } => p.cam_tilt -= angle.value(),
            StatementKind::LookLeft { angle } => p.cam_pan += angle.value(),
            StatementKind::LookRight { angle } => p.cam_pan -= angle.value(),
            StatementKind::Perceive => self.perceived = true,
            StatementKind::GoTo { x, y } => {
                p.x = x.value();
                p.y = y.value();
            }
            StatementKind::Approach { object } => {
                let (ox, oy) = world
                    .object(object)
                    .ok_or_else(|| SimError::UnknownObject(object.clone()))?;
                let (dx, dy) = (ox - p.x, oy - p.y);
                if dx != 0.0 || dy != 0.0 {
                    p.heading = dy.atan2(dx);
                }
                p.x = ox - world.reach_offset * p.heading.cos();
                p.y = oy - world.reach_offset * p.heading.sin();
            }
            StatementKind::Grasp { object } => {
                let (ox, oy) = world
                    .object(object)
                    .ok_or_else(|| SimError::UnknownObject(object.clone()))?;
                if let Some(held) = &self.held {
                    return Err(SimError::HandFull { held: held.clone(), requested: object.clone() });
                }
                let distance = (ox - p.x).hypot(oy - p.y);
                if distance > world.grasp_range + GRASP_EPSILON {
                    return Err(SimError::GraspOutOfRange {
                        object: object.clone(),
                        distance,
                        range: world.grasp_range,
                    });
                }
                self.held = Some(object.clone());
            }
        }
        self.trace.push(TraceRecord {
            statement: s.clone(),
            pose: self.pose,
            held: self.held.clone(),
            perceived: self.perceived,
        });
        Ok(())
    }

    /// Trace export: one JSON object per executed statement.
    pub fn trace_jsonl(&self) -> String {
        self.trace
            .iter()
            .map(|r| serde_json::to_string(r).expect("trace records serialize") + "\n")
            .collect()
    }
}

/// Pure single step.
pub fn step(state: &RobotState, world: &World, s: &StatementKind) -> Result<RobotState, SimError> {
    let mut next = state.clone();
    next.apply(world, s)?;
    Ok(next)
}

/// Executes `program` from `initial`, stopping at the first error.
#[allow(clippy::result_large_err)]
pub fn run(program: &VerifiedProgram, world: &World, initial: RobotState) -> Result<RobotState, SimFailure> {
    let mut state = initial;
    for (index, s) in program.kinds().enumerate() {
        if let Err(error) = state.apply(world, s) {
            return Err(SimFailure { error, index, state });
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::check;

    fn program(src: &str) -> VerifiedProgram {
        check(src).into_verified().expect("test program verifies")
    }

    fn obj(name: &str) -> ObjectName {
        ObjectName::new(name).unwrap()
    }

    fn world(objects: &[(&str, f64, f64)]) -> World {
        World::new(objects.iter().map(|(n, x, y)| (obj(n), (*x, *y))))
    }

    #[test]
    fn forward_along_heading() {
        let s = run(&program("forward 2;"), &World::default(), RobotState::default()).unwrap();
        assert_eq!((s.pose.x, s.pose.y, s.pose.heading), (2.0, 0.0, 0.0));
    }

    #[test]
    fn turns_accumulate() {
        let s = run(&program("turnleft 1.5; turnleft 1.75;"), &World::default(), RobotState::default())
            .unwrap();
        assert!((s.pose.heading - 3.25 + std::f64::consts::TAU).abs() < 1e-9);
    }

    #[test]
    fn heading_wraps() {
        let s = run(&program("turnleft 4;"), &World::default(), RobotState::default()).unwrap();
        assert!((s.pose.heading - (4.0 - TAU)).abs() < 1e-12);
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
    }

    #[test]
    fn goto_sets_position_only() {
        let start = RobotState::at(-7.0, 1.0, 0.3);
        let s = run(&program("goto 3, 4;"), &World::default(), start).unwrap();
        assert_eq!((s.pose.x, s.pose.y, s.pose.heading), (3.0, 4.0, 0.3));
    }

    #[test]
    fn square_path() {
        let s = run(
            &program("forward 2; turnright 1.5707963; forward 2;"),
            &World::default(),
            RobotState::default(),
        )
        .unwrap();
        assert!((s.pose.x - 2.0).abs() < 1e-6 && (s.pose.y + 2.0).abs() < 1e-6);
    }

    #[test]
    fn perceive_sets_flag_only() {
        let s = run(&program("perceive;"), &World::default(), RobotState::default()).unwrap();
        assert!(s.perceived);
        assert_eq!(s.pose, Pose::default());
    }

    #[test]
    fn camera_accumulates_unclamped() {
        let s = run(
            &program("lookup 2; lookup 2; lookleft 1; lookright 3; lookdown 0.5;"),
            &World::default(),
            RobotState::default(),
        )
        .unwrap();
        assert_eq!(s.pose.cam_tilt, 3.5);
        assert_eq!(s.pose.cam_pan, -2.0);
    }

    #[test]
    fn approach_then_grasp() {
        let w = world(&[("cup", 0.0, 4.0)]);
        let s = run(&program("approach cup; grasp cup;"), &w, RobotState::default()).unwrap();
        assert!((s.pose.x).abs() < 1e-12 && (s.pose.y - 3.5).abs() < 1e-12);
        assert!((s.pose.heading - PI / 2.0).abs() < 1e-12);
        assert_eq!(s.held, Some(obj("cup")));
    }

    #[test]
    fn grasp_out_of_range() {
        let w = world(&[("cup", 10.0, 0.0)]);
        let err = run(&program("grasp cup;"), &w, RobotState::default()).unwrap_err();
        assert!(matches!(err.error, SimError::GraspOutOfRange { distance, .. } if distance == 10.0));
        assert_eq!(err.index, 0);

        let w = world(&[("table", 5.0, 0.0), ("cup", -5.0, 0.0)]);
        let err = run(&program("approach table; grasp cup;"), &w, RobotState::default()).unwrap_err();
        assert!(matches!(err.error, SimError::GraspOutOfRange { .. }));
        assert_eq!(err.index, 1);
        assert_eq!(err.state.trace.len(), 1);
    }

    #[test]
    fn unknown_object_and_full_hand() {
        let w = world(&[("a", 0.2, 0.0), ("b", 0.0, 0.2)]);
        let err = run(&program("approach ghost;"), &w, RobotState::default()).unwrap_err();
        assert_eq!(err.error, SimError::UnknownObject(obj("ghost")));
        let err = run(&program("grasp a; grasp b;"), &w, RobotState::default()).unwrap_err();
        assert_eq!(err.error, SimError::HandFull { held: obj("a"), requested: obj("b") });
    }

    #[test]
    fn step_is_pure() {
        let before = RobotState::default();
        let kind = StatementKind::Perceive;
        let after = step(&before, &World::default(), &kind).unwrap();
        assert!(!before.perceived && after.perceived);
        assert_eq!(after.trace.len(), 1);
    }

    #[test]
    fn world_file_round_trip() {
        let w = World::from_json(r#"{"objects": {"door": [1, 2]}, "grasp_range": 0.75}"#).unwrap();
        assert_eq!(w.object(&obj("door")), Some((1.0, 2.0)));
        assert_eq!(w.grasp_range, 0.75);
        assert_eq!(w.reach_offset, DEFAULT_REACH_OFFSET);
        assert!(World::from_json(r#"{"objects": {"3x": [1, 2]}}"#).is_err());
        assert!(World::from_json(r#"{"objects": {}, "reach_offset": -1}"#).is_err());
    }

    #[test]
    fn trace_export_is_one_line_per_statement() {
        let s = run(&program("forward 1; perceive; turnleft 1;"), &World::default(), RobotState::default())
            .unwrap();
        let text = s.trace_jsonl();
        assert_eq!(text.lines().count(), 3);
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["statement"], "forward 1;");
        assert_eq!(first["x"], 1.0);
        assert_eq!(first["perceived"], false);
        assert!(first["held"].is_null());
    }
}
