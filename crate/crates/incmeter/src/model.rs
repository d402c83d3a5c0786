//! Relational core: typed schemas, tuples, and databases.
//!
//! Databases have set semantics: loading the same row twice yields one
//! tuple. Every loaded tuple gets a [`TupleId`] that is stable for a fixed
//! input order; atom numbering and report output follow that order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use chrono::NaiveDate;
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::Error;
use crate::rational::parse_exact_rational;

/// The four attribute kinds. Order comparisons are defined only within a
/// kind; dates compare chronologically, text by code point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AttributeKind {
    Int,
    Rat,
    Text,
    Date,
}

impl AttributeKind {
    pub fn name(self) -> &'static str {
        match self {
            AttributeKind::Int => "int",
            AttributeKind::Rat => "rat",
            AttributeKind::Text => "text",
            AttributeKind::Date => "date",
        }
    }

    pub fn from_name(s: &str) -> Option<AttributeKind> {
        match s {
            "int" | "integer" => Some(AttributeKind::Int),
            "rat" | "rational" => Some(AttributeKind::Rat),
            "text" => Some(AttributeKind::Text),
            "date" => Some(AttributeKind::Date),
            _ => None,
        }
    }
}

/// A scalar value of one attribute kind. Numeric kinds are exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(BigInt),
    Rat(BigRational),
    Text(String),
    Date(NaiveDate),
}

impl Value {
    pub fn kind(&self) -> AttributeKind {
        match self {
            Value::Int(_) => AttributeKind::Int,
            Value::Rat(_) => AttributeKind::Rat,
            Value::Text(_) => AttributeKind::Text,
            Value::Date(_) => AttributeKind::Date,
        }
    }

    /// Parses a raw field (CSV cell or DSL literal body) as `kind`.
    pub fn parse_as(kind: AttributeKind, raw: &str) -> Result<Value, String> {
        let raw = raw.trim();
        match kind {
            AttributeKind::Int => raw
                .parse::<BigInt>()
                .map(Value::Int)
                .map_err(|_| format!("`{raw}` is not an integer")),
            AttributeKind::Rat => parse_exact_rational(raw).map(Value::Rat),
            AttributeKind::Text => Ok(Value::Text(raw.to_string())),
            AttributeKind::Date => NaiveDate::parse_from_str(raw, "%Y-%m-%d")
                .map(Value::Date)
                .map_err(|_| format!("`{raw}` is not an ISO-8601 date")),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Rat(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Value::Text(s) => write!(f, "{s}"),
            Value::Date(d) => write!(f, "{}", d.format("%Y-%m-%d")),
        }
    }
}

/// Comparison operators usable in constraints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn is_order(self) -> bool {
        matches!(self, CmpOp::Lt | CmpOp::Le | CmpOp::Gt | CmpOp::Ge)
    }
}

/// Compares two values. Equality is total (cross-kind values compare
/// unequal); order comparisons across kinds are an error.
pub fn compare(a: &Value, b: &Value, op: CmpOp) -> Result<bool, Error> {
    if a.kind() != b.kind() {
        return match op {
            CmpOp::Eq => Ok(false),
            CmpOp::Ne => Ok(true),
            _ => Err(Error::Model(format!(
                "cannot order-compare {} with {}",
                a.kind().name(),
                b.kind().name()
            ))),
        };
    }
    let ord = a.cmp(b);
    Ok(match op {
        CmpOp::Eq => ord == std::cmp::Ordering::Equal,
        CmpOp::Ne => ord != std::cmp::Ordering::Equal,
        CmpOp::Lt => ord == std::cmp::Ordering::Less,
        CmpOp::Le => ord != std::cmp::Ordering::Greater,
        CmpOp::Gt => ord == std::cmp::Ordering::Greater,
        CmpOp::Ge => ord != std::cmp::Ordering::Less,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationScheme {
    pub name: String,
    pub attributes: Vec<(String, AttributeKind)>,
}

impl RelationScheme {
    pub fn arity(&self) -> usize {
        self.attributes.len()
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|(n, _)| n == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    relations: Vec<RelationScheme>,
}

impl Schema {
    pub fn new(relations: Vec<RelationScheme>) -> Result<Schema, Error> {
        if relations.is_empty() {
            return Err(Error::Model("schema must declare at least one relation".into()));
        }
        let mut seen = BTreeSet::new();
        for r in &relations {
            if r.attributes.is_empty() {
                return Err(Error::Model(format!("relation {} has arity 0", r.name)));
            }
            let mut attrs = BTreeSet::new();
            for (a, _) in &r.attributes {
                if !attrs.insert(a.clone()) {
                    return Err(Error::Model(format!(
                        "duplicate attribute {a} in relation {}",
                        r.name
                    )));
                }
            }
            if !seen.insert(r.name.clone()) {
                return Err(Error::Model(format!("duplicate relation {}", r.name)));
            }
        }
        Ok(Schema { relations })
    }

    pub fn relations(&self) -> &[RelationScheme] {
        &self.relations
    }

    pub fn relation(&self, name: &str) -> Option<&RelationScheme> {
        self.relations.iter().find(|r| r.name == name)
    }
}

/// A tuple over one relation scheme.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tuple {
    pub relation: String,
    pub values: Vec<Value>,
}

impl Tuple {
    pub fn render(&self) -> String {
        let vals: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        format!("{}({})", self.relation, vals.join(","))
    }
}

/// Stable identifier for a loaded tuple: its position in load order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TupleId(pub u32);

impl fmt::Display for TupleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0 + 1)
    }
}

pub type TupleSet = BTreeSet<TupleId>;

/// An immutable database instance: a schema plus a set of tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Database {
    schema: Schema,
    tuples: Vec<Tuple>,
    by_relation: BTreeMap<String, Vec<TupleId>>,
}

impl Database {
    /// Loads per-relation row lists, validating arity and kinds, and
    /// collapsing duplicate rows (set semantics).
    pub fn load(schema: Schema, rows: &[(String, Vec<Vec<Value>>)]) -> Result<Database, Error> {
        let mut db = Database {
            schema,
            tuples: Vec::new(),
            by_relation: BTreeMap::new(),
        };
        for r in db.schema.relations() {
            db.by_relation.insert(r.name.clone(), Vec::new());
        }
        let mut seen: HashMap<Tuple, TupleId> = HashMap::new();
        for (relation, relation_rows) in rows {
            let scheme = db
                .schema
                .relation(relation)
                .ok_or_else(|| Error::Model(format!("unknown relation {relation}")))?
                .clone();
            for (i, row) in relation_rows.iter().enumerate() {
                if row.len() != scheme.arity() {
                    return Err(Error::Model(format!(
                        "relation {relation} row {i}: got {} values, scheme has arity {}",
                        row.len(),
                        scheme.arity()
                    )));
                }
                for (j, v) in row.iter().enumerate() {
                    let expected = scheme.attributes[j].1;
                    if v.kind() != expected {
                        return Err(Error::Model(format!(
                            "relation {relation} row {i} attribute {}: expected {}, got {}",
                            scheme.attributes[j].0,
                            expected.name(),
                            v.kind().name()
                        )));
                    }
                }
                let tuple = Tuple {
                    relation: relation.clone(),
                    values: row.clone(),
                };
                if seen.contains_key(&tuple) {
                    continue;
                }
                let id = TupleId(db.tuples.len() as u32);
                seen.insert(tuple.clone(), id);
                db.by_relation.get_mut(relation).unwrap().push(id);
                db.tuples.push(tuple);
            }
        }
        Ok(db)
    }

    /// Convenience constructor from (relation, values) pairs.
    pub fn from_tuples(
        schema: Schema,
        tuples: impl IntoIterator<Item = (String, Vec<Value>)>,
    ) -> Result<Database, Error> {
        let mut grouped: Vec<(String, Vec<Vec<Value>>)> = Vec::new();
        for (rel, vals) in tuples {
            // Preserve interleaved load order so TupleIds stay stable.
            grouped.push((rel, vec![vals]));
        }
        Database::load(schema, &grouped)
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuple(&self, id: TupleId) -> &Tuple {
        &self.tuples[id.0 as usize]
    }

    pub fn tuple_ids(&self) -> impl Iterator<Item = TupleId> + '_ {
        (0..self.tuples.len() as u32).map(TupleId)
    }

    pub fn all_tuple_ids(&self) -> TupleSet {
        self.tuple_ids().collect()
    }

    pub fn relation_tuples(&self, relation: &str) -> &[TupleId] {
        self.by_relation
            .get(relation)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    pub fn find_tuple(&self, relation: &str, values: &[Value]) -> Option<TupleId> {
        self.relation_tuples(relation)
            .iter()
            .copied()
            .find(|id| self.tuple(*id).values == values)
    }

    /// A new database without the given tuples. TupleIds are renumbered
    /// but relative order is preserved.
    pub fn without_tuples(&self, removed: &TupleSet) -> Database {
        let remaining = self
            .tuple_ids()
            .filter(|id| !removed.contains(id))
            .map(|id| {
                let t = self.tuple(id);
                (t.relation.clone(), t.values.clone())
            })
            .collect::<Vec<_>>();
        Database::from_tuples(self.schema.clone(), remaining).expect("subset of a valid database")
    }

    /// Restriction to the given tuples, preserving order.
    pub fn restrict(&self, kept: &TupleSet) -> Database {
        let removed: TupleSet = self.tuple_ids().filter(|id| !kept.contains(id)).collect();
        self.without_tuples(&removed)
    }

    /// Set union of two instances over the same schema.
    pub fn union(&self, other: &Database) -> Result<Database, Error> {
        if self.schema != other.schema {
            return Err(Error::Model("schema mismatch in database union".into()));
        }
        let all = self
            .tuples
            .iter()
            .chain(other.tuples.iter())
            .map(|t| (t.relation.clone(), t.values.clone()))
            .collect::<Vec<_>>();
        Database::from_tuples(self.schema.clone(), all)
    }

    /// True when the two instances share no tuple (by value).
    pub fn disjoint_from(&self, other: &Database) -> bool {
        self.tuples.iter().all(|t| !other.tuples.contains(t))
    }
}

/// Projects a tuple onto an ordered attribute list.
pub fn project(schema: &Schema, t: &Tuple, attrs: &[&str]) -> Result<Vec<Value>, Error> {
    let scheme = schema
        .relation(&t.relation)
        .ok_or_else(|| Error::Model(format!("unknown relation {}", t.relation)))?;
    let mut out = Vec::with_capacity(attrs.len());
    for a in attrs {
        let idx = scheme
            .attribute_index(a)
            .ok_or_else(|| Error::Model(format!("unknown attribute {a} in {}", t.relation)))?;
        out.push(t.values[idx].clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures_test::mealticket_db;

    #[test]
    fn figure_fixture_loads_seven_tuples() {
        let db = mealticket_db();
        assert_eq!(db.len(), 7);
    }

    #[test]
    fn duplicate_rows_collapse() {
        let db = mealticket_db();
        let mut rows: Vec<(String, Vec<Value>)> = db
            .tuple_ids()
            .map(|id| {
                let t = db.tuple(id);
                (t.relation.clone(), t.values.clone())
            })
            .collect();
        rows.insert(1, rows[0].clone());
        let db2 = Database::from_tuples(db.schema().clone(), rows).unwrap();
        assert_eq!(db2.len(), 7);
        assert_eq!(&db2, &db);
    }

    #[test]
    fn empty_rows_load() {
        let db = Database::load(mealticket_db().schema().clone(), &[]).unwrap();
        assert_eq!(db.len(), 0);
    }

    #[test]
    fn loading_is_idempotent() {
        let db = mealticket_db();
        let rows: Vec<(String, Vec<Value>)> = db
            .tuple_ids()
            .map(|id| (db.tuple(id).relation.clone(), db.tuple(id).values.clone()))
            .collect();
        let db2 = Database::from_tuples(db.schema().clone(), rows).unwrap();
        assert_eq!(db, db2);
    }

    #[test]
    fn projection_follows_request_order() {
        let db = mealticket_db();
        let t1 = db.tuple(TupleId(0));
        assert_eq!(
            project(db.schema(), t1, &["Holder"]).unwrap(),
            vec![Value::Text("Matthew".into())]
        );
        assert_eq!(project(db.schema(), t1, &[]).unwrap(), Vec::<Value>::new());
        let t4 = db.tuple(TupleId(3));
        let projected = project(db.schema(), t4, &["Date", "Holder"]).unwrap();
        assert_eq!(
            projected,
            vec![
                Value::parse_as(AttributeKind::Date, "2018-12-17").unwrap(),
                Value::Text("Sophia".into())
            ]
        );
        assert!(project(db.schema(), t1, &["Nope"]).is_err());
    }

    #[test]
    fn comparison_semantics() {
        let i15 = Value::Int(15.into());
        let i0 = Value::Int(0.into());
        assert!(compare(&i15, &i0, CmpOp::Gt).unwrap());
        assert!(!compare(&i0, &i0, CmpOp::Gt).unwrap());
        assert!(compare(&i0, &i0, CmpOp::Eq).unwrap());
        let txt = Value::Text("0".into());
        assert!(!compare(&i0, &txt, CmpOp::Eq).unwrap());
        assert!(compare(&i0, &txt, CmpOp::Ne).unwrap());
        assert!(compare(&i0, &txt, CmpOp::Lt).is_err());
        let d1 = Value::parse_as(AttributeKind::Date, "2018-12-13").unwrap();
        let d2 = Value::parse_as(AttributeKind::Date, "2018-12-17").unwrap();
        assert!(compare(&d1, &d2, CmpOp::Lt).unwrap());
    }

    #[test]
    fn load_errors_name_relation_and_row() {
        let schema = mealticket_db().schema().clone();
        let bad = Database::load(
            schema.clone(),
            &[("MealTicket".into(), vec![vec![Value::Int(1.into())]])],
        );
        let msg = format!("{}", bad.unwrap_err());
        assert!(msg.contains("MealTicket") && msg.contains("row 0"), "{msg}");
        let unknown = Database::load(schema, &[("Nope".into(), vec![])]);
        assert!(format!("{}", unknown.unwrap_err()).contains("Nope"));
    }
}
