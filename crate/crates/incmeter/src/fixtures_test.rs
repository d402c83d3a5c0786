//! Shared unit-test fixtures. The integration suites load the same data
//! through the manifest path instead.

use crate::constraint::{parse_constraints, ConstraintSet};
use crate::model::{Database, Schema, TupleId, TupleSet, Value};
use crate::schema_io::parse_schema;

pub fn mealticket_db() -> Database {
    let schema = parse_schema(include_str!("../fixtures/mealticket/schema.txt")).unwrap();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(include_str!("../fixtures/mealticket/mealticket.csv").as_bytes());
    let scheme = schema.relation("MealTicket").unwrap().clone();
    let rows: Vec<Vec<Value>> = reader
        .records()
        .map(|r| {
            r.unwrap()
                .iter()
                .enumerate()
                .map(|(i, cell)| Value::parse_as(scheme.attributes[i].1, cell).unwrap())
                .collect()
        })
        .collect();
    Database::load(schema, &[("MealTicket".into(), rows)]).unwrap()
}

pub fn mealticket_constraints(schema: &Schema) -> ConstraintSet {
    parse_constraints(include_str!("../fixtures/mealticket/constraints.txt"), schema).unwrap()
}

pub fn tid_set(ids: &[u32]) -> TupleSet {
    ids.iter().map(|i| TupleId(*i)).collect()
}

/// R(A: int) with the given single-column rows.
pub fn int_db1(rows: &[i64]) -> Database {
    let schema = parse_schema("relation R(A: int)").unwrap();
    let tuples = rows
        .iter()
        .map(|a| ("R".to_string(), vec![Value::Int((*a).into())]));
    Database::from_tuples(schema, tuples).unwrap()
}

/// R(A: int, B: int).
pub fn int_db2(rows: &[(i64, i64)]) -> Database {
    let schema = parse_schema("relation R(A: int, B: int)").unwrap();
    let tuples = rows.iter().map(|(a, b)| {
        (
            "R".to_string(),
            vec![Value::Int((*a).into()), Value::Int((*b).into())],
        )
    });
    Database::from_tuples(schema, tuples).unwrap()
}

/// R(A: int, B: int, C: int).
pub fn int_db3(rows: &[(i64, i64, i64)]) -> Database {
    let schema = parse_schema("relation R(A: int, B: int, C: int)").unwrap();
    let tuples = rows.iter().map(|(a, b, c)| {
        (
            "R".to_string(),
            vec![
                Value::Int((*a).into()),
                Value::Int((*b).into()),
                Value::Int((*c).into()),
            ],
        )
    });
    Database::from_tuples(schema, tuples).unwrap()
}
