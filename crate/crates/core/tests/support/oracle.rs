//! Brute-force kinematics written without reference to `rsl_core::sim`.
//!
//! Headings are accumulated without wrapping; comparisons against the
//! simulator reduce the difference modulo a full turn. Approach uses a
//! normalized direction vector instead of trigonometry.

use rsl_core::StatementKind;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleState {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub pan: f64,
    pub tilt: f64,
    pub held: Option<String>,
    pub perceived: bool,
    pub executed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    Unknown(String),
    OutOfRange(String),
    HandFull,
}

pub struct OracleWorld<'a> {
    pub objects: &'a [(&'a str, f64, f64)],
    pub grasp_range: f64,
    pub reach: f64,
}

impl OracleWorld<'_> {
    fn find(&self, name: &str) -> Option<(f64, f64)> {
        self.objects.iter().find(|o| o.0 == name).map(|o| (o.1, o.2))
    }
}

pub fn start(x: f64, y: f64, heading: f64) -> OracleState {
    OracleState { x, y, heading, pan: 0.0, tilt: 0.0, held: None, perceived: false, executed: 0 }
}

pub fn execute(
    program: &[StatementKind],
    world: &OracleWorld<'_>,
    mut s: OracleState,
) -> Result<OracleState, (OracleError, OracleState)> {
    for stmt in program {
        let (dir_x, dir_y) = (s.heading.cos(), s.heading.sin());
        match stmt {
            StatementKind::Forward { distance } => {
                s.x += dir_x * distance.value();
                s.y += dir_y * distance.value();
            }
            StatementKind::Backward { distance } => {
                s.x += -dir_x * distance.value();
                s.y += -dir_y * distance.value();
            }
            StatementKind::TurnLeft { angle } => s.heading += angle.value(),
            StatementKind::TurnRight { angle } => s.heading += -angle.value(),
            StatementKind::LookUp { angle } => s.tilt += angle.value(),
            StatementKind::LookDown { angle } => s.tilt += -angle.value(),
            StatementKind::LookLeft { angle } => s.pan += angle.value(),
            StatementKind::LookRight { angle } => s.pan += -angle.value(),
            StatementKind::Perceive => s.perceived = true,
            StatementKind::GoTo { x, y } => {
                s.x = x.value();
                s.y = y.value();
            }
            StatementKind::Approach { object } => {
                let Some((ox, oy)) = world.find(object.as_str()) else {
                    return Err((OracleError::Unknown(object.to_string()), s));
                };
                let (dx, dy) = (ox - s.x, oy - s.y);
                let len = (dx * dx + dy * dy).sqrt();
                let (ux, uy) = if len > 0.0 {
                    s.heading = dy.atan2(dx);
                    (dx / len, dy / len)
                } else {
                    (dir_x, dir_y)
                };
                s.x = ox - world.reach * ux;
                s.y = oy - world.reach * uy;
            }
            StatementKind::Grasp { object } => {
                let Some((ox, oy)) = world.find(object.as_str()) else {
                    return Err((OracleError::Unknown(object.to_string()), s));
                };
                if s.held.is_some() {
                    return Err((OracleError::HandFull, s));
                }
                let d2 = (ox - s.x).powi(2) + (oy - s.y).powi(2);
                if d2.sqrt() > world.grasp_range + 1e-9 {
                    return Err((OracleError::OutOfRange(object.to_string()), s));
                }
                s.held = Some(object.to_string());
            }
        }
        s.executed += 1;
    }
    Ok(s)
}

/// Smallest absolute difference between two angles.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let d = (a - b).rem_euclid(tau);
    d.min(tau - d)
}
