//! Algebraic structures for diagram terminals.
//!
//! An [`AlgebraDescriptor`] names a carrier set together with the binary and
//! unary operations defined on it and a few distinguished elements. The
//! kernel lifts any of these operations to whole diagrams, so swapping the
//! descriptor swaps the co-domain without touching the kernel.
//!
//! Four descriptors ship with the crate, selectable by identifier:
//!
//! | id        | carrier        | template      | operations                          |
//! |-----------|----------------|---------------|-------------------------------------|
//! | `boolean` | {false, true}  | lattice/logic | `and`, `or`, `xor`, `not`           |
//! | `fuzzy`   | [0, 1]         | lattice/logic | `and`, `or`, `not` (probabilistic)  |
//! | `real`    | f64            | ring-like     | `+`, `-`, `*`, `/`, `min`, `max`, `neg` |
//! | `weights` | f64^n          | ring-like     | `+`, `-`, `*`, `/`, `norm`          |
//!
//! Colour terminals (RGB) need no dedicated type: they are `weights` vectors
//! of dimension 3 whose components happen to live in `[0, 255]`.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::hash::{Hash, Hasher};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AlgebraError {
    #[error("value {0} is outside the unit interval [0, 1]")]
    OutOfUnitInterval(f64),
    #[error("value is not a finite real number")]
    NotFinite,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("division by zero in component {index}")]
    DivisionByZero { index: usize },
    #[error("value of kind {found} does not belong to carrier {expected}")]
    KindMismatch { expected: CarrierKind, found: &'static str },
    #[error("unknown algebra `{0}`")]
    UnknownAlgebra(String),
    #[error("algebra `{algebra}` requires operation or element `{missing}` for its template")]
    Incomplete { algebra: String, missing: String },
}

/// Bit pattern used for equality and hashing. `-0.0` and `0.0` collapse so
/// that values produced by different arithmetic routes share one terminal.
#[inline]
fn canonical_bits(x: f64) -> u64 {
    if x == 0.0 {
        0
    } else {
        x.to_bits()
    }
}

/// Component weights, one per declared category in declaration order.
#[derive(Debug, Clone, Default)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(components: Vec<f64>) -> Self {
        WeightVector(components)
    }

    pub fn zeros(dim: usize) -> Self {
        WeightVector(vec![0.0; dim])
    }

    /// The vote of a single tree: weight 1 for `index`, 0 elsewhere.
    pub fn one_hot(dim: usize, index: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[index] = 1.0;
        WeightVector(v)
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Index of the largest component; ties go to the lowest index.
    /// `None` only for the empty vector.
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &w) in self.0.iter().enumerate() {
            match best {
                Some((_, b)) if w <= b => {}
                _ => best = Some((i, w)),
            }
        }
        best.map(|(i, _)| i)
    }

    fn zip_with(
        &self,
        other: &WeightVector,
        f: impl Fn(usize, f64, f64) -> Result<f64, AlgebraError>,
    ) -> Result<WeightVector, AlgebraError> {
        if self.dim() != other.dim() {
            return Err(AlgebraError::Dimension {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        self.0
            .iter()
            .zip(&other.0)
            .enumerate()
            .map(|(i, (&a, &b))| f(i, a, b))
            .collect::<Result<Vec<_>, _>>()
            .map(WeightVector)
    }

    pub fn try_add(&self, other: &WeightVector) -> Result<WeightVector, AlgebraError> {
        self.zip_with(other, |_, a, b| Ok(a + b))
    }

    pub fn try_sub(&self, other: &WeightVector) -> Result<WeightVector, AlgebraError> {
        self.zip_with(other, |_, a, b| Ok(a - b))
    }

    pub fn try_mul(&self, other: &WeightVector) -> Result<WeightVector, AlgebraError> {
        self.zip_with(other, |_, a, b| Ok(a * b))
    }

    /// Component-wise quotient; fails on the first zero component of `other`.
    pub fn try_div(&self, other: &WeightVector) -> Result<WeightVector, AlgebraError> {
        self.zip_with(other, |index, a, b| {
            if b == 0.0 {
                Err(AlgebraError::DivisionByZero { index })
            } else {
                Ok(a / b)
            }
        })
    }

    /// Scales by the reciprocal of the component sum. A zero-sum vector is
    /// returned unchanged, so all-zero weights stay inert.
    pub fn normalized(&self) -> WeightVector {
        let s = self.sum();
        if s == 0.0 {
            self.clone()
        } else {
            WeightVector(self.0.iter().map(|&w| w / s).collect())
        }
    }
}

impl PartialEq for WeightVector {
    fn eq(&self, other: &Self) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(&a, &b)| canonical_bits(a) == canonical_bits(b))
    }
}

impl Eq for WeightVector {}

impl Hash for WeightVector {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.len().hash(state);
        for &w in &self.0 {
            canonical_bits(w).hash(state);
        }
    }
}

impl From<Vec<f64>> for WeightVector {
    fn from(v: Vec<f64>) -> Self {
        WeightVector(v)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{w}")?;
        }
        f.write_str(")")
    }
}

/// A terminal value. Equality is exact on the stored bits (with `-0.0`
/// identified with `0.0`); tolerances never influence canonicity.
#[derive(Debug, Clone)]
pub enum AlgebraValue {
    Bool(bool),
    Real(f64),
    Vector(WeightVector),
}

impl AlgebraValue {
    pub fn kind(&self) -> &'static str {
        match self {
            AlgebraValue::Bool(_) => "boolean",
            AlgebraValue::Real(_) => "real",
            AlgebraValue::Vector(_) => "vector",
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            AlgebraValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            AlgebraValue::Real(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_vector(&self) -> Option<&WeightVector> {
        match self {
            AlgebraValue::Vector(v) => Some(v),
            _ => None,
        }
    }

    /// Replaces `-0.0` payloads by `0.0` so stored terminals print cleanly.
    pub(crate) fn canonicalize(self) -> Self {
        fn z(x: f64) -> f64 {
            if x == 0.0 {
                0.0
            } else {
                x
            }
        }
        match self {
            AlgebraValue::Real(x) => AlgebraValue::Real(z(x)),
            AlgebraValue::Vector(v) => {
                AlgebraValue::Vector(WeightVector(v.0.into_iter().map(z).collect()))
            }
            b => b,
        }
    }

    /// True when every real payload is finite.
    pub fn is_finite(&self) -> bool {
        match self {
            AlgebraValue::Bool(_) => true,
            AlgebraValue::Real(x) => x.is_finite(),
            AlgebraValue::Vector(v) => v.0.iter().all(|w| w.is_finite()),
        }
    }
}

impl PartialEq for AlgebraValue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (AlgebraValue::Bool(a), AlgebraValue::Bool(b)) => a == b,
            (AlgebraValue::Real(a), AlgebraValue::Real(b)) => canonical_bits(*a) == canonical_bits(*b),
            (AlgebraValue::Vector(a), AlgebraValue::Vector(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for AlgebraValue {}

impl Hash for AlgebraValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        core::mem::discriminant(self).hash(state);
        match self {
            AlgebraValue::Bool(b) => b.hash(state),
            AlgebraValue::Real(x) => canonical_bits(*x).hash(state),
            AlgebraValue::Vector(v) => v.hash(state),
        }
    }
}

impl fmt::Display for AlgebraValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraValue::Bool(b) => write!(f, "{}", u8::from(*b)),
            AlgebraValue::Real(x) => write!(f, "{x}"),
            AlgebraValue::Vector(v) => write!(f, "{v}"),
        }
    }
}

impl From<bool> for AlgebraValue {
    fn from(b: bool) -> Self {
        AlgebraValue::Bool(b)
    }
}

impl From<f64> for AlgebraValue {
    fn from(x: f64) -> Self {
        AlgebraValue::Real(x)
    }
}

impl From<WeightVector> for AlgebraValue {
    fn from(v: WeightVector) -> Self {
        AlgebraValue::Vector(v)
    }
}

// Probabilistic fuzzy logic on [0, 1].

fn unit(a: f64) -> Result<f64, AlgebraError> {
    if (0.0..=1.0).contains(&a) {
        Ok(a)
    } else {
        Err(AlgebraError::OutOfUnitInterval(a))
    }
}

pub fn fuzzy_and(a: f64, b: f64) -> Result<f64, AlgebraError> {
    Ok(unit(a)? * unit(b)?)
}

pub fn fuzzy_or(a: f64, b: f64) -> Result<f64, AlgebraError> {
    Ok(1.0 - (1.0 - unit(a)?) * (1.0 - unit(b)?))
}

pub fn fuzzy_not(a: f64) -> Result<f64, AlgebraError> {
    Ok(1.0 - unit(a)?)
}

/// Kind of carrier set an algebra is defined on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CarrierKind {
    Boolean,
    UnitInterval,
    Real,
    Vector(usize),
}

impl fmt::Display for CarrierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CarrierKind::Boolean => f.write_str("boolean"),
            CarrierKind::UnitInterval => f.write_str("unit-interval"),
            CarrierKind::Real => f.write_str("real"),
            CarrierKind::Vector(n) => write!(f, "vector({n})"),
        }
    }
}

impl CarrierKind {
    /// Checks that `value` belongs to this carrier.
    pub fn check(&self, value: &AlgebraValue) -> Result<(), AlgebraError> {
        let mismatch = || AlgebraError::KindMismatch {
            expected: *self,
            found: value.kind(),
        };
        match (self, value) {
            (CarrierKind::Boolean, AlgebraValue::Bool(_)) => Ok(()),
            (CarrierKind::UnitInterval, AlgebraValue::Real(x)) => unit(*x).map(|_| ()),
            (CarrierKind::Real, AlgebraValue::Real(x)) => {
                if x.is_finite() {
                    Ok(())
                } else {
                    Err(AlgebraError::NotFinite)
                }
            }
            (CarrierKind::Vector(n), AlgebraValue::Vector(v)) => {
                if v.dim() != *n {
                    Err(AlgebraError::Dimension {
                        expected: *n,
                        found: v.dim(),
                    })
                } else if !value.is_finite() {
                    Err(AlgebraError::NotFinite)
                } else {
                    Ok(())
                }
            }
            _ => Err(mismatch()),
        }
    }
}

/// Template category; determines which operations a descriptor must provide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Template {
    GroupLike,
    RingLike,
    LatticeLogic,
}

impl Template {
    fn required_ops(self) -> (&'static [&'static str], &'static [&'static str], &'static [&'static str]) {
        // (binary, unary, elements)
        match self {
            Template::GroupLike => (&[], &[], &["zero"]),
            Template::RingLike => (&["+", "*"], &[], &["zero", "one"]),
            Template::LatticeLogic => (&["and", "or"], &["not"], &["zero", "one"]),
        }
    }
}

pub type BinaryFn = fn(&AlgebraValue, &AlgebraValue) -> Result<AlgebraValue, AlgebraError>;
pub type UnaryFn = fn(&AlgebraValue) -> Result<AlgebraValue, AlgebraError>;

#[derive(Clone)]
pub struct BinaryOp {
    pub name: String,
    pub func: BinaryFn,
    /// Commutative operations share one cache entry for `(f, g)` and `(g, f)`.
    pub commutative: bool,
}

#[derive(Clone)]
pub struct UnaryOp {
    pub name: String,
    pub func: UnaryFn,
}

/// A carrier plus named operations and distinguished elements.
#[derive(Clone)]
pub struct AlgebraDescriptor {
    name: String,
    carrier: CarrierKind,
    template: Template,
    binary: Vec<BinaryOp>,
    unary: Vec<UnaryOp>,
    elements: Vec<(String, AlgebraValue)>,
    labels: Vec<String>,
}

impl fmt::Debug for AlgebraDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgebraDescriptor")
            .field("name", &self.name)
            .field("carrier", &self.carrier)
            .field("template", &self.template)
            .field("binary", &self.binary.iter().map(|o| o.name.as_str()).collect::<Vec<_>>())
            .field("unary", &self.unary.iter().map(|o| o.name.as_str()).collect::<Vec<_>>())
            .finish()
    }
}

impl AlgebraDescriptor {
    pub fn new(name: &str, carrier: CarrierKind, template: Template) -> Self {
        AlgebraDescriptor {
            name: name.to_owned(),
            carrier,
            template,
            binary: Vec::new(),
            unary: Vec::new(),
            elements: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn with_binary(mut self, name: &str, func: BinaryFn, commutative: bool) -> Self {
        self.binary.push(BinaryOp {
            name: name.to_owned(),
            func,
            commutative,
        });
        self
    }

    pub fn with_unary(mut self, name: &str, func: UnaryFn) -> Self {
        self.unary.push(UnaryOp {
            name: name.to_owned(),
            func,
        });
        self
    }

    pub fn with_element(mut self, name: &str, value: AlgebraValue) -> Self {
        self.elements.push((name.to_owned(), value));
        self
    }

    /// Names for vector components (the declared categories).
    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.labels = labels;
        self
    }

    /// Checks the template's required operations and that every
    /// distinguished element belongs to the carrier.
    pub fn validate(self) -> Result<Self, AlgebraError> {
        let (bin, un, el) = self.template.required_ops();
        let missing = bin
            .iter()
            .find(|op| self.binary_op(op).is_none())
            .or_else(|| un.iter().find(|op| self.unary_op(op).is_none()))
            .or_else(|| el.iter().find(|e| self.element(e).is_none()));
        if let Some(m) = missing {
            return Err(AlgebraError::Incomplete {
                algebra: self.name.clone(),
                missing: (*m).to_owned(),
            });
        }
        if self.template == Template::GroupLike && self.binary.is_empty() {
            return Err(AlgebraError::Incomplete {
                algebra: self.name.clone(),
                missing: "binary operation".to_owned(),
            });
        }
        for (_, v) in &self.elements {
            self.carrier.check(v)?;
        }
        Ok(self)
    }

    pub fn boolean() -> Self {
        Self::new("boolean", CarrierKind::Boolean, Template::LatticeLogic)
            .with_binary("and", bool_and, true)
            .with_binary("or", bool_or, true)
            .with_binary("xor", bool_xor, true)
            .with_unary("not", bool_not)
            .with_element("zero", AlgebraValue::Bool(false))
            .with_element("one", AlgebraValue::Bool(true))
    }

    pub fn fuzzy() -> Self {
        Self::new("fuzzy", CarrierKind::UnitInterval, Template::LatticeLogic)
            .with_binary("and", fz_and, true)
            .with_binary("or", fz_or, true)
            .with_unary("not", fz_not)
            .with_element("zero", AlgebraValue::Real(0.0))
            .with_element("one", AlgebraValue::Real(1.0))
    }

    pub fn real() -> Self {
        Self::new("real", CarrierKind::Real, Template::RingLike)
            .with_binary("+", real_add, true)
            .with_binary("-", real_sub, false)
            .with_binary("*", real_mul, true)
            .with_binary("/", real_div, false)
            .with_binary("min", real_min, true)
            .with_binary("max", real_max, true)
            .with_unary("neg", real_neg)
            .with_element("zero", AlgebraValue::Real(0.0))
            .with_element("one", AlgebraValue::Real(1.0))
    }

    /// Weight vectors over the given categories (dimension = category count).
    pub fn weights<S: AsRef<str>>(categories: &[S]) -> Self {
        let n = categories.len();
        Self::new("weights", CarrierKind::Vector(n), Template::RingLike)
            .with_binary("+", vec_add, true)
            .with_binary("-", vec_sub, false)
            .with_binary("*", vec_mul, true)
            .with_binary("/", vec_div, false)
            .with_unary("norm", vec_norm)
            .with_element("zero", WeightVector::zeros(n).into())
            .with_element("one", WeightVector::new(vec![1.0; n]).into())
            .with_labels(categories.iter().map(|c| c.as_ref().to_owned()).collect())
    }

    /// Looks up a built-in algebra by identifier. `weights` needs the
    /// category names.
    pub fn by_name(id: &str, categories: Option<&[String]>) -> Result<Self, AlgebraError> {
        match (id, categories) {
            ("boolean", _) => Ok(Self::boolean()),
            ("fuzzy", _) => Ok(Self::fuzzy()),
            ("real", _) => Ok(Self::real()),
            ("weights", Some(c)) => Ok(Self::weights(c)),
            ("weights", None) => Err(AlgebraError::Incomplete {
                algebra: "weights".to_owned(),
                missing: "category declaration".to_owned(),
            }),
            _ => Err(AlgebraError::UnknownAlgebra(id.to_owned())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn carrier(&self) -> CarrierKind {
        self.carrier
    }

    pub fn template(&self) -> Template {
        self.template
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn binary_ops(&self) -> &[BinaryOp] {
        &self.binary
    }

    pub fn unary_ops(&self) -> &[UnaryOp] {
        &self.unary
    }

    pub fn binary_op(&self, name: &str) -> Option<(usize, &BinaryOp)> {
        self.binary.iter().enumerate().find(|(_, o)| o.name == name)
    }

    pub fn unary_op(&self, name: &str) -> Option<(usize, &UnaryOp)> {
        self.unary.iter().enumerate().find(|(_, o)| o.name == name)
    }

    pub fn element(&self, name: &str) -> Option<&AlgebraValue> {
        self.elements.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    /// Human-readable name for vector component `index`.
    pub fn label(&self, index: usize) -> String {
        self.labels
            .get(index)
            .cloned()
            .unwrap_or_else(|| format!("#{index}"))
    }
}

fn want_bool(v: &AlgebraValue) -> Result<bool, AlgebraError> {
    v.as_bool().ok_or(AlgebraError::KindMismatch {
        expected: CarrierKind::Boolean,
        found: v.kind(),
    })
}

fn want_real(v: &AlgebraValue, expected: CarrierKind) -> Result<f64, AlgebraError> {
    v.as_real().ok_or(AlgebraError::KindMismatch {
        expected,
        found: v.kind(),
    })
}

fn want_vec(v: &AlgebraValue) -> Result<&WeightVector, AlgebraError> {
    v.as_vector().ok_or(AlgebraError::KindMismatch {
        expected: CarrierKind::Vector(0),
        found: v.kind(),
    })
}

fn bool_and(a: &AlgebraValue, b: &AlgebraValue) -> Result<AlgebraValue, AlgebraError> {
    Ok((want_bool(a)? && want_bool(b)?).into())
}

fn bool_or(a: &AlgebraValue, b: &AlgebraValue) -> Result<AlgebraValue, AlgebraError> {
    Ok((want_bool(a)? || want_bool(b)?).into())
}

fn bool_xor(a: &AlgebraValue, b: &AlgebraValue) -> Result<AlgebraValue, AlgebraError> {
    Ok((want_bool(a)? ^ want_bool(b)?).into())
}

fn bool_not(a: &AlgebraValue) -> Result<AlgebraValue, AlgebraError> {
    Ok((!want_bool(a)?).into())
}

fn fz_and(a: &AlgebraValue, b: &AlgebraValue) -> Result<AlgebraValue, AlgebraError> {
    let k = CarrierKind::UnitInterval;
    fuzzy_and(want_real(a, k)?, want_real(b, k)?).map(Into::into)
}

fn fz_or(a: &AlgebraValue, b: &AlgebraValue) -> Result<AlgebraValue, AlgebraError> {
    let k = CarrierKind::UnitInterval;
    fuzzy_or(want_real(a, k)?, want_real(b, k)?).map(Into::into)
}

fn fz_not(a: &AlgebraValue) -> Result<AlgebraValue, AlgebraError> {
    fuzzy_not(want_real(a, CarrierKind::UnitInterval)?).map(Into::into)
}

fn reals(a: &AlgebraValue, b: &AlgebraValue) -> Result<(f64, f64), AlgebraError> {
    Ok((want_real(a, CarrierKind::Real)?, want_real(b, CarrierKind::Real)?))
}

fn real_add(a: &AlgebraValue, b: &AlgebraValue) -> Result<AlgebraValue, AlgebraError> {
    let (x, y) = reals(a, b)?;
    Ok((x + y).into())
}

fn real_sub(a: &AlgebraValue, b: &AlgebraValue) -> Result<AlgebraValue, AlgebraError> {
    let (x, y) = reals(a, b)?;
    Ok((x - y).into())
}

fn real_mul(a: &AlgebraValue, b: &AlgebraValue) -> Result<AlgebraValue, AlgebraError> {
    let (x, y) = reals(a, b)?;
    Ok((x * y).into())
}

fn real_div(a: &AlgebraValue, b: &AlgebraValue) -> Result<AlgebraValue, AlgebraError> {
    let (x, y) = reals(a, b)?;
    if y == 0.0 {
        return Err(AlgebraError::DivisionByZero { index: 0 });
    }
    Ok((x / y).into())
}

fn real_min(a: &AlgebraValue, b: &AlgebraValue) -> Result<AlgebraValue, AlgebraError> {
    let (x, y) = reals(a, b)?;
    Ok(x.min(y).into())
}

fn real_max(a: &AlgebraValue, b: &AlgebraValue) -> Result<AlgebraValue, AlgebraError> {
    let (x, y) = reals(a, b)?;
    Ok(x.max(y).into())
}

fn real_neg(a: &AlgebraValue) -> Result<AlgebraValue, AlgebraError> {
    Ok((-want_real(a, CarrierKind::Real)?).into())
}

fn vec_add(a: &AlgebraValue, b: &AlgebraValue) -> Result<AlgebraValue, AlgebraError> {
    want_vec(a)?.try_add(want_vec(b)?).map(Into::into)
}

fn vec_sub(a: &AlgebraValue, b: &AlgebraValue) -> Result<AlgebraValue, AlgebraError> {
    want_vec(a)?.try_sub(want_vec(b)?).map(Into::into)
}

fn vec_mul(a: &AlgebraValue, b: &AlgebraValue) -> Result<AlgebraValue, AlgebraError> {
    want_vec(a)?.try_mul(want_vec(b)?).map(Into::into)
}

fn vec_div(a: &AlgebraValue, b: &AlgebraValue) -> Result<AlgebraValue, AlgebraError> {
    want_vec(a)?.try_div(want_vec(b)?).map(Into::into)
}

fn vec_norm(a: &AlgebraValue) -> Result<AlgebraValue, AlgebraError> {
    Ok(want_vec(a)?.normalized().into())
}
