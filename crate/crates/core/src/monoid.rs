//! Commutative weight monoids.
//!
//! A [`Monoid`] describes a carrier, its zero, and its addition. Carrier
//! elements are [`Value`]s with exact representations: booleans, big
//! naturals and integers, reduced fractions, elements of a user-supplied
//! finite table, and label-indexed tuples for power monoids `M^A`.

use std::fmt;

use num::{BigInt, BigRational, BigUint, One, Zero};
use serde::Serialize;
use serde_json::json;

/// An element of some monoid's carrier.
///
/// The derived order is only used for canonical sorting; it carries no
/// algebraic meaning.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Bool(bool),
    Nat(BigUint),
    Int(BigInt),
    Rat(BigRational),
    /// Index into a table monoid's element list.
    Elem(u32),
    /// Label-indexed tuple of a power monoid, in the monoid's label order.
    Tuple(Vec<Value>),
}

impl Value {
    pub fn nat(n: u64) -> Value {
        Value::Nat(BigUint::from(n))
    }

    pub fn int(n: i64) -> Value {
        Value::Int(BigInt::from(n))
    }

    pub fn rat(numer: i64, denom: i64) -> Value {
        Value::Rat(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MonoidError {
    #[error("malformed monoid table: {0}")]
    MalformedTable(String),
    #[error("power monoid needs a nonempty label set")]
    EmptyLabels,
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("monoid `{0}` is trivial (its nonzero witness equals zero)")]
    Trivial(String),
    #[error("`{value}` is not an element of monoid `{monoid}`")]
    BadValue { monoid: String, value: String },
    #[error("malformed monoid description: {0}")]
    Spec(String),
}

/// A finite monoid given by its addition table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    elements: Vec<String>,
    add: Vec<Vec<u32>>,
    zero: u32,
}

impl Table {
    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    fn index_of(&self, name: &str) -> Option<u32> {
        self.elements.iter().position(|e| e == name).map(|i| i as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonoidKind {
    BoolOr,
    NatPlus,
    IntPlus,
    RationalPlus,
    Power { inner: Box<Monoid>, labels: Vec<String> },
    Table(Table),
}

/// A commutative monoid together with a designated nonzero element.
///
/// Equality ignores the display name.
#[derive(Debug, Clone)]
pub struct Monoid {
    name: String,
    kind: MonoidKind,
    nonzero: Value,
}

impl PartialEq for Monoid {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.nonzero == other.nonzero
    }
}

impl Eq for Monoid {}

impl fmt::Display for Monoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl Monoid {
    /// Booleans under disjunction, zero `ff`.
    pub fn bool_or() -> Monoid {
        Monoid { name: "bool-or".into(), kind: MonoidKind::BoolOr, nonzero: Value::Bool(true) }
    }

    pub fn nat_plus() -> Monoid {
        Monoid { name: "nat-plus".into(), kind: MonoidKind::NatPlus, nonzero: Value::nat(1) }
    }

    pub fn int_plus() -> Monoid {
        Monoid { name: "int-plus".into(), kind: MonoidKind::IntPlus, nonzero: Value::int(1) }
    }

    pub fn rational_plus() -> Monoid {
        Monoid { name: "rational-plus".into(), kind: MonoidKind::RationalPlus, nonzero: Value::rat(1, 1) }
    }

    /// The power monoid `inner^labels` with pointwise zero and addition.
    ///
    /// Its nonzero witness puts `inner`'s witness at the first label.
    pub fn power(inner: Monoid, labels: Vec<String>) -> Result<Monoid, MonoidError> {
        if labels.is_empty() {
            return Err(MonoidError::EmptyLabels);
        }
        check_unique(&labels)?;
        if inner.is_trivial() {
            return Err(MonoidError::Trivial(inner.name.clone()));
        }
        let mut witness = vec![inner.zero(); labels.len()];
        witness[0] = inner.nonzero.clone();
        let name = format!("({})^{{{}}}", inner.name, labels.join(","));
        Ok(Monoid {
            name,
            kind: MonoidKind::Power { inner: Box::new(inner), labels },
            nonzero: Value::Tuple(witness),
        })
    }

    /// A monoid given by an explicit addition table over named elements.
    ///
    /// Only closure and well-formedness are enforced here; the algebraic
    /// laws are checked by [`Monoid::check_laws`].
    pub fn table(
        name: impl Into<String>,
        elements: Vec<String>,
        add: Vec<Vec<String>>,
        zero: &str,
        nonzero: &str,
    ) -> Result<Monoid, MonoidError> {
        if elements.is_empty() {
            return Err(MonoidError::MalformedTable("no elements".into()));
        }
        check_unique(&elements).map_err(|e| MonoidError::MalformedTable(e.to_string()))?;
        let n = elements.len();
        if add.len() != n || add.iter().any(|row| row.len() != n) {
            return Err(MonoidError::MalformedTable(format!("addition table must be {n}x{n}")));
        }
        let lookup = |s: &str| {
            elements
                .iter()
                .position(|e| e == s)
                .map(|i| i as u32)
                .ok_or_else(|| MonoidError::MalformedTable(format!("`{s}` is not a table element")))
        };
        let add = add
            .iter()
            .map(|row| row.iter().map(|s| lookup(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let zero = lookup(zero)?;
        let nonzero = Value::Elem(lookup(nonzero)?);
        Ok(Monoid { name: name.into(), kind: MonoidKind::Table(Table { elements, add, zero }), nonzero })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &MonoidKind {
        &self.kind
    }

    pub fn nonzero_witness(&self) -> &Value {
        &self.nonzero
    }

    /// Labels of a power monoid, `None` otherwise.
    pub fn power_labels(&self) -> Option<(&Monoid, &[String])> {
        match &self.kind {
            MonoidKind::Power { inner, labels } => Some((inner, labels)),
            _ => None,
        }
    }

    pub fn zero(&self) -> Value {
        match &self.kind {
            MonoidKind::BoolOr => Value::Bool(false),
            MonoidKind::NatPlus => Value::Nat(BigUint::zero()),
            MonoidKind::IntPlus => Value::Int(BigInt::zero()),
            MonoidKind::RationalPlus => Value::Rat(BigRational::zero()),
            MonoidKind::Power { inner, labels } => Value::Tuple(vec![inner.zero(); labels.len()]),
            MonoidKind::Table(t) => Value::Elem(t.zero),
        }
    }

    pub fn is_zero(&self, v: &Value) -> bool {
        match (&self.kind, v) {
            (MonoidKind::BoolOr, Value::Bool(b)) => !b,
            (MonoidKind::NatPlus, Value::Nat(n)) => n.is_zero(),
            (MonoidKind::IntPlus, Value::Int(n)) => n.is_zero(),
            (MonoidKind::RationalPlus, Value::Rat(q)) => q.is_zero(),
            (MonoidKind::Power { inner, .. }, Value::Tuple(xs)) => xs.iter().all(|x| inner.is_zero(x)),
            (MonoidKind::Table(t), Value::Elem(i)) => *i == t.zero,
            _ => false,
        }
    }

    /// Whether `v` belongs to the carrier.
    pub fn contains(&self, v: &Value) -> bool {
        match (&self.kind, v) {
            (MonoidKind::BoolOr, Value::Bool(_))
            | (MonoidKind::NatPlus, Value::Nat(_))
            | (MonoidKind::IntPlus, Value::Int(_))
            | (MonoidKind::RationalPlus, Value::Rat(_)) => true,
            (MonoidKind::Power { inner, labels }, Value::Tuple(xs)) => {
                xs.len() == labels.len() && xs.iter().all(|x| inner.contains(x))
            }
            (MonoidKind::Table(t), Value::Elem(i)) => (*i as usize) < t.elements.len(),
            _ => false,
        }
    }

    /// Monoid addition. Both arguments must belong to the carrier.
    pub fn add(&self, a: &Value, b: &Value) -> Value {
        match (&self.kind, a, b) {
            (MonoidKind::BoolOr, Value::Bool(x), Value::Bool(y)) => Value::Bool(*x || *y),
            (MonoidKind::NatPlus, Value::Nat(x), Value::Nat(y)) => Value::Nat(x + y),
            (MonoidKind::IntPlus, Value::Int(x), Value::Int(y)) => Value::Int(x + y),
            (MonoidKind::RationalPlus, Value::Rat(x), Value::Rat(y)) => Value::Rat(x + y),
            (MonoidKind::Power { inner, .. }, Value::Tuple(xs), Value::Tuple(ys)) => {
                Value::Tuple(xs.iter().zip(ys).map(|(x, y)| inner.add(x, y)).collect())
            }
            (MonoidKind::Table(t), Value::Elem(x), Value::Elem(y)) => {
                Value::Elem(t.add[*x as usize][*y as usize])
            }
            _ => panic!("monoid `{}`: addition applied outside the carrier", self.name),
        }
    }

    pub fn sum<'a>(&self, values: impl IntoIterator<Item = &'a Value>) -> Value {
        values.into_iter().fold(self.zero(), |acc, v| self.add(&acc, v))
    }

    /// True when the declared nonzero witness is zero, or the carrier has a
    /// single element.
    pub fn is_trivial(&self) -> bool {
        !self.contains(&self.nonzero) || self.is_zero(&self.nonzero) || self.carrier_size() == Some(1)
    }

    /// Number of carrier elements, `None` for infinite carriers or on
    /// overflow of `u64`.
    pub fn carrier_size(&self) -> Option<u64> {
        match &self.kind {
            MonoidKind::BoolOr => Some(2),
            MonoidKind::Table(t) => Some(t.elements.len() as u64),
            MonoidKind::Power { inner, labels } => {
                let base = inner.carrier_size()?;
                base.checked_pow(u32::try_from(labels.len()).ok()?)
            }
            _ => None,
        }
    }

    /// All carrier elements for finite monoids, zero first.
    pub fn carrier(&self) -> Option<Vec<Value>> {
        match &self.kind {
            MonoidKind::BoolOr => Some(vec![Value::Bool(false), Value::Bool(true)]),
            MonoidKind::Table(t) => {
                let mut all: Vec<Value> = (0..t.elements.len() as u32).map(Value::Elem).collect();
                all.swap(0, t.zero as usize);
                Some(all)
            }
            MonoidKind::Power { inner, labels } => {
                let base = inner.carrier()?;
                let mut tuples: Vec<Vec<Value>> = vec![Vec::new()];
                for _ in labels {
                    tuples = tuples
                        .into_iter()
                        .flat_map(|t| {
                            base.iter().map(move |v| {
                                let mut t = t.clone();
                                t.push(v.clone());
                                t
                            })
                        })
                        .collect();
                }
                Some(tuples.into_iter().map(Value::Tuple).collect())
            }
            _ => None,
        }
    }

    /// Reads a carrier element from its JSON form.
    pub fn parse_value(&self, raw: &serde_json::Value) -> Result<Value, MonoidError> {
        let bad = || MonoidError::BadValue { monoid: self.name.clone(), value: raw.to_string() };
        let text = match raw {
            serde_json::Value::String(s) => Some(s.trim().to_string()),
            serde_json::Value::Number(n) => Some(n.to_string()),
            serde_json::Value::Bool(b) => Some(if *b { "tt".to_string() } else { "ff".to_string() }),
            _ => None,
        };
        match &self.kind {
            MonoidKind::BoolOr => match text.as_deref() {
                Some("tt") => Ok(Value::Bool(true)),
                Some("ff") => Ok(Value::Bool(false)),
                _ => Err(bad()),
            },
            MonoidKind::NatPlus => {
                let t = text.ok_or_else(bad)?;
                if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                t.parse::<BigUint>().map(Value::Nat).map_err(|_| bad())
            }
            MonoidKind::IntPlus => {
                let t = text.ok_or_else(bad)?;
                t.parse::<BigInt>().map(Value::Int).map_err(|_| bad())
            }
            MonoidKind::RationalPlus => {
                let t = text.ok_or_else(bad)?;
                parse_rational(&t).map(Value::Rat).ok_or_else(bad)
            }
            MonoidKind::Table(t) => {
                let name = text.ok_or_else(bad)?;
                t.index_of(&name).map(Value::Elem).ok_or_else(bad)
            }
            MonoidKind::Power { inner, labels } => {
                let obj = raw.as_object().ok_or_else(bad)?;
                if let Some(k) = obj.keys().find(|k| !labels.contains(k)) {
                    return Err(MonoidError::BadValue {
                        monoid: self.name.clone(),
                        value: format!("unknown label `{k}` in {raw}"),
                    });
                }
                let parts = labels
                    .iter()
                    .map(|l| match obj.get(l) {
                        Some(v) => inner.parse_value(v),
                        None => Ok(inner.zero()),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Value::Tuple(parts))
            }
        }
    }

    /// JSON form of a carrier element; the inverse of [`Monoid::parse_value`].
    pub fn render_value(&self, v: &Value) -> serde_json::Value {
        match (&self.kind, v) {
            (MonoidKind::Power { inner, labels }, Value::Tuple(xs)) => {
                let map: serde_json::Map<String, serde_json::Value> =
                    labels.iter().cloned().zip(xs.iter().map(|x| inner.render_value(x))).collect();
                serde_json::Value::Object(map)
            }
            (MonoidKind::Table(t), Value::Elem(i)) => json!(t.elements[*i as usize]),
            (_, Value::Bool(b)) => json!(if *b { "tt" } else { "ff" }),
            (_, Value::Nat(n)) => json!(n.to_string()),
            (_, Value::Int(n)) => json!(n.to_string()),
            (_, Value::Rat(q)) => json!(render_rational(q)),
            (_, other) => json!(format!("{other:?}")),
        }
    }

    /// Reads a monoid description such as `{"kind": "nat-plus"}`.
    pub fn from_json(raw: &serde_json::Value) -> Result<Monoid, MonoidError> {
        let obj = raw.as_object().ok_or_else(|| MonoidError::Spec(format!("expected an object, got {raw}")))?;
        let kind = obj
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| MonoidError::Spec("missing `kind`".into()))?;
        let mut monoid = match kind {
            "bool-or" | "bool" => Monoid::bool_or(),
            "nat-plus" | "nat" => Monoid::nat_plus(),
            "int-plus" | "int" => Monoid::int_plus(),
            "rational-plus" | "rational" => Monoid::rational_plus(),
            "power" => {
                let inner = Monoid::from_json(
                    obj.get("inner").ok_or_else(|| MonoidError::Spec("power monoid without `inner`".into()))?,
                )?;
                let labels = string_list(obj.get("labels"), "labels")?;
                Monoid::power(inner, labels)?
            }
            "table" => {
                let elements = string_list(obj.get("elements"), "elements")?;
                let add = obj
                    .get("add")
                    .and_then(|a| a.as_array())
                    .ok_or_else(|| MonoidError::Spec("table monoid without `add`".into()))?
                    .iter()
                    .map(|row| string_list(Some(row), "add row"))
                    .collect::<Result<Vec<_>, _>>()?;
                let zero = obj.get("zero").and_then(|z| z.as_str()).ok_or_else(|| MonoidError::Spec("table monoid without `zero`".into()))?;
                let nonzero = obj
                    .get("nonzero")
                    .and_then(|z| z.as_str())
                    .ok_or_else(|| MonoidError::Spec("table monoid without `nonzero`".into()))?;
                Monoid::table("table", elements, add, zero, nonzero)?
            }
            other => return Err(MonoidError::Spec(format!("unknown monoid kind `{other}`"))),
        };
        if let Some(name) = obj.get("name").and_then(|n| n.as_str()) {
            monoid.name = name.to_string();
        }
        Ok(monoid)
    }

    pub fn to_json(&self) -> serde_json::Value {
        match &self.kind {
            MonoidKind::BoolOr => json!({"kind": "bool-or"}),
            MonoidKind::NatPlus => json!({"kind": "nat-plus"}),
            MonoidKind::IntPlus => json!({"kind": "int-plus"}),
            MonoidKind::RationalPlus => json!({"kind": "rational-plus"}),
            MonoidKind::Power { inner, labels } => json!({"kind": "power", "inner": inner.to_json(), "labels": labels}),
            MonoidKind::Table(t) => {
                let add: Vec<Vec<&str>> = t
                    .add
                    .iter()
                    .map(|row| row.iter().map(|&i| t.elements[i as usize].as_str()).collect())
                    .collect();
                json!({
                    "kind": "table",
                    "name": self.name,
                    "elements": t.elements,
                    "add": add,
                    "zero": t.elements[t.zero as usize],
                    "nonzero": self.render_value(&self.nonzero),
                })
            }
        }
    }

    /// Checks associativity, commutativity and the unit laws.
    ///
    /// Finite carriers are checked exhaustively (the samples are ignored);
    /// infinite ones over all pairs and triples drawn from `samples`
    /// together with zero and the nonzero witness.
    pub fn check_laws(&self, samples: &[Value]) -> Result<LawReport, MonoidError> {
        if let Some(bad) = samples.iter().find(|s| !self.contains(s)) {
            return Err(MonoidError::BadValue { monoid: self.name.clone(), value: format!("{bad:?}") });
        }
        let (pool, exhaustive) = match self.carrier() {
            Some(all) => (all, true),
            None => {
                let mut pool = vec![self.zero(), self.nonzero.clone()];
                for s in samples {
                    if !pool.contains(s) {
                        pool.push(s.clone());
                    }
                }
                (pool, false)
            }
        };
        let render = |vs: &[&Value]| vs.iter().map(|v| self.render_value(v)).collect::<Vec<_>>();
        let zero = self.zero();

        let mut associativity = LawOutcome::holds();
        let mut commutativity = LawOutcome::holds();
        let mut unit = LawOutcome::holds();
        'outer: for x in &pool {
            if unit.holds && (self.add(x, &zero) != *x || self.add(&zero, x) != *x) {
                unit = LawOutcome::violated(render(&[x]));
            }
            for y in &pool {
                if commutativity.holds && self.add(x, y) != self.add(y, x) {
                    commutativity = LawOutcome::violated(render(&[x, y]));
                }
                for z in &pool {
                    if associativity.holds && self.add(&self.add(x, y), z) != self.add(x, &self.add(y, z)) {
                        associativity = LawOutcome::violated(render(&[x, y, z]));
                    }
                    if !associativity.holds && !commutativity.holds && !unit.holds {
                        break 'outer;
                    }
                }
            }
        }
        let non_trivial = if self.is_trivial() {
            LawOutcome::violated(render(&[&self.nonzero]))
        } else {
            LawOutcome::holds()
        };
        Ok(LawReport { monoid: self.name.clone(), exhaustive, samples: pool.len(), associativity, commutativity, unit, non_trivial })
    }
}

/// Outcome of one monoid law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawOutcome {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<serde_json::Value>>,
}

impl LawOutcome {
    fn holds() -> Self {
        LawOutcome { holds: true, counterexample: None }
    }

    fn violated(witness: Vec<serde_json::Value>) -> Self {
        LawOutcome { holds: false, counterexample: Some(witness) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawReport {
    pub monoid: String,
    pub exhaustive: bool,
    pub samples: usize,
    pub associativity: LawOutcome,
    pub commutativity: LawOutcome,
    pub unit: LawOutcome,
    pub non_trivial: LawOutcome,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.associativity.holds && self.commutativity.holds && self.unit.holds && self.non_trivial.holds
    }
}

fn check_unique(names: &[String]) -> Result<(), MonoidError> {
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(MonoidError::DuplicateLabel(n.clone()));
        }
    }
    Ok(())
}

fn string_list(raw: Option<&serde_json::Value>, what: &str) -> Result<Vec<String>, MonoidError> {
    raw.and_then(|v| v.as_array())
        .ok_or_else(|| MonoidError::Spec(format!("`{what}` must be a list of strings")))?
        .iter()
        .map(|v| v.as_str().map(str::to_string).ok_or_else(|| MonoidError::Spec(format!("`{what}` must be a list of strings"))))
        .collect()
}

fn parse_rational(text: &str) -> Option<BigRational> {
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => text.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

fn render_rational(q: &BigRational) -> String {
    // BigRational keeps the denominator positive after reduction.
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
