//! Random generators for programs and source text.

use proptest::prelude::*;
use rsl_core::{Command, Number, ObjectName, Program, StatementKind};

pub const OBJECTS: [&str; 6] = ["cup", "table", "door", "tool_2", "_x", "Banana"];

fn raw_number(positive: bool) -> impl Strategy<Value = String> {
    (any::<bool>(), 0u32..1000, proptest::option::of("[0-9]{1,4}")).prop_filter_map(
        "positive magnitude",
        move |(neg, int, frac)| {
            let mut raw = String::new();
            if neg && !positive {
                raw.push('-');
            }
            raw.push_str(&int.to_string());
            if let Some(f) = frac {
                raw.push('.');
                raw.push_str(&f);
            }
            let n = Number::parse(&raw).ok()?;
            (!positive || n.value() > 0.0).then_some(raw)
        },
    )
}

pub fn number(positive: bool) -> impl Strategy<Value = Number> {
    raw_number(positive).prop_map(|r| Number::parse(&r).unwrap())
}

pub fn object() -> impl Strategy<Value = ObjectName> {
    prop_oneof![
        proptest::sample::select(OBJECTS.to_vec()).prop_map(|s| ObjectName::new(s).unwrap()),
        "[A-Za-z_][A-Za-z0-9_]{0,8}"
            .prop_filter("not a keyword", |s| Command::from_keyword_ignore_case(s).is_none())
            .prop_map(|s| ObjectName::new(&s).unwrap()),
    ]
}

pub fn statement() -> impl Strategy<Value = StatementKind> {
    let motions = proptest::sample::select(
        Command::ALL.into_iter().filter(|c| c.is_motion()).collect::<Vec<_>>(),
    );
    prop_oneof![
        (motions, number(true)).prop_map(|(c, n)| StatementKind::motion(c, n).unwrap()),
        Just(StatementKind::Perceive),
        object().prop_map(|object| StatementKind::Approach { object }),
        object().prop_map(|object| StatementKind::Grasp { object }),
        (number(false), number(false)).prop_map(|(x, y)| StatementKind::GoTo { x, y }),
    ]
}

pub fn program(max_len: usize) -> impl Strategy<Value = Program> {
    proptest::collection::vec(statement(), 0..=max_len).prop_map(Program::from_kinds)
}

/// Pose-relative statements only: no goto, approach or grasp.
pub fn relative_statement() -> impl Strategy<Value = StatementKind> {
    let motions = proptest::sample::select(
        Command::ALL.into_iter().filter(|c| c.is_motion()).collect::<Vec<_>>(),
    );
    prop_oneof![
        (motions, number(true)).prop_map(|(c, n)| StatementKind::motion(c, n).unwrap()),
        Just(StatementKind::Perceive),
    ]
}

const FRAGMENTS: [&str; 24] = [
    "forward", "FORWARD", "goto", "grasp", "perceive", "approach", "Turnleft", "move", "cup", "3apple",
    "1.5", "-2", "123.23.45", "0", ",", ";", ";", " ", "\n", "//c\n", "/* x */", "/", "$", "é",
];

/// Source text assembled from lexer-relevant fragments.
pub fn token_soup() -> impl Strategy<Value = String> {
    proptest::collection::vec(proptest::sample::select(FRAGMENTS.to_vec()), 0..24)
        .prop_map(|parts| parts.join(" "))
}
