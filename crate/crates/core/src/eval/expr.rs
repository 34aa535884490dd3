use std::fmt;

use crate::model::{Binding, EngineConfig, Expr, Func, Request, Value, ValueSet};

/// The outcome of evaluating an expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprResult {
    Value(Value),
    Set(ValueSet),
    /// A missing attribute (⊥).
    Absent,
    Error(String),
}

impl ExprResult {
    pub fn is_true(&self) -> bool {
        matches!(self, ExprResult::Value(Value::Bool(true)))
    }

    fn error(msg: impl Into<String>) -> Self {
        ExprResult::Error(msg.into())
    }
}

impl fmt::Display for ExprResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprResult::Value(v) => write!(f, "{v}"),
            ExprResult::Set(s) => write!(f, "{s}"),
            ExprResult::Absent => f.write_str("absent"),
            ExprResult::Error(e) => write!(f, "error: {e}"),
        }
    }
}

impl From<Option<&Binding>> for ExprResult {
    fn from(b: Option<&Binding>) -> Self {
        match b {
            None => ExprResult::Absent,
            Some(Binding::Value(v)) => ExprResult::Value(v.clone()),
            Some(Binding::Set(s)) => ExprResult::Set(s.clone()),
        }
    }
}

/// Three-valued view of a boolean operand.
enum Tri {
    True,
    False,
    Absent,
}

fn tri(r: ExprResult, func: &str) -> Result<Tri, ExprResult> {
    match r {
        ExprResult::Value(Value::Bool(true)) => Ok(Tri::True),
        ExprResult::Value(Value::Bool(false)) => Ok(Tri::False),
        ExprResult::Absent => Ok(Tri::Absent),
        ExprResult::Error(_) => Err(r),
        other => Err(ExprResult::error(format!("{func} expects booleans, got {other}"))),
    }
}

pub fn eval_expr(expr: &Expr, request: &Request, config: &EngineConfig) -> ExprResult {
    match expr {
        Expr::Name(n) => request.lookup(n).into(),
        Expr::Literal(v) => ExprResult::Value(v.clone()),
        Expr::Set(s) => ExprResult::Set(s.clone()),
        Expr::Not(e) => match tri(eval_expr(e, request, config), "not") {
            Ok(Tri::True) => ExprResult::Value(Value::Bool(false)),
            Ok(Tri::False) => ExprResult::Value(Value::Bool(true)),
            Ok(Tri::Absent) => ExprResult::Absent,
            Err(e) => e,
        },
        Expr::Call(func, a, b) => {
            let lhs = eval_expr(a, request, config);
            let rhs = eval_expr(b, request, config);
            apply(*func, lhs, rhs, config)
        }
    }
}

/// Applies a binary function to already evaluated operands.
pub fn apply(func: Func, lhs: ExprResult, rhs: ExprResult, config: &EngineConfig) -> ExprResult {
    if matches!(func, Func::And | Func::Or) {
        return kleene(func, lhs, rhs);
    }
    match (&lhs, &rhs) {
        (ExprResult::Error(_), _) => return lhs,
        (_, ExprResult::Error(_)) => return rhs,
        (ExprResult::Absent, _) | (_, ExprResult::Absent) => return ExprResult::Absent,
        _ => {}
    }
    let mismatch = || ExprResult::error(format!("{} undefined on {lhs} and {rhs}", func.name()));
    let boolean = |b: bool| ExprResult::Value(Value::Bool(b));
    match func {
        Func::And | Func::Or => unreachable!("handled above"),
        Func::Equal => match (&lhs, &rhs) {
            (ExprResult::Value(x), ExprResult::Value(y)) if x.kind() == y.kind() => boolean(x == y),
            (ExprResult::Set(x), ExprResult::Set(y)) if x.kind() == y.kind() => boolean(x == y),
            _ => mismatch(),
        },
        Func::In => match (&lhs, &rhs) {
            (ExprResult::Value(x), ExprResult::Set(s)) if x.kind() == s.kind() => boolean(s.contains(x)),
            (ExprResult::Value(x), ExprResult::Value(y)) if x.kind() == y.kind() => boolean(x == y),
            _ => mismatch(),
        },
        Func::GreaterThan => match (&lhs, &rhs) {
            (ExprResult::Value(Value::Double(x)), ExprResult::Value(Value::Double(y))) => boolean(x > y),
            (ExprResult::Value(Value::Date(x)), ExprResult::Value(Value::Date(y))) => boolean(x > y),
            _ => mismatch(),
        },
        Func::Add | Func::Subtract | Func::Multiply | Func::Divide => match (&lhs, &rhs) {
            (ExprResult::Value(Value::Double(x)), ExprResult::Value(Value::Double(y))) => {
                arithmetic(func, *x, *y)
            }
            _ => mismatch(),
        },
        Func::Leq => match (&lhs, &rhs) {
            (ExprResult::Value(Value::Str(a)), ExprResult::Value(Value::Str(b))) => {
                match config.levels.leq(a, b) {
                    Some(r) => boolean(r),
                    None => ExprResult::error(format!("leq on undeclared level in ({a}, {b})")),
                }
            }
            _ => mismatch(),
        },
        Func::SubRole => {
            let ExprResult::Value(Value::Str(target)) = &rhs else {
                return mismatch();
            };
            let roles: Vec<&Value> = match &lhs {
                ExprResult::Value(v) => vec![v],
                ExprResult::Set(s) => s.iter().collect(),
                _ => return mismatch(),
            };
            let mut reached = false;
            for role in roles {
                let Value::Str(role) = role else {
                    return mismatch();
                };
                match config.roles.is_sub_role(role, target) {
                    Some(r) => reached |= r,
                    None => {
                        return ExprResult::error(format!(
                            "sub-role on undeclared role in ({role}, {target})"
                        ))
                    }
                }
            }
            boolean(reached)
        }
    }
}

fn kleene(func: Func, lhs: ExprResult, rhs: ExprResult) -> ExprResult {
    let name = func.name();
    let (a, b) = match (tri(lhs, name), tri(rhs, name)) {
        (Err(e), _) | (Ok(_), Err(e)) => return e,
        (Ok(a), Ok(b)) => (a, b),
    };
    // the absorbing element decides, otherwise absence propagates
    let absorbing = matches!(func, Func::Or);
    let as_bool = |t: &Tri| match t {
        Tri::True => Some(true),
        Tri::False => Some(false),
        Tri::Absent => None,
    };
    match (as_bool(&a), as_bool(&b)) {
        (Some(x), _) | (_, Some(x)) if x == absorbing => ExprResult::Value(Value::Bool(absorbing)),
        (Some(_), Some(_)) => ExprResult::Value(Value::Bool(!absorbing)),
        _ => ExprResult::Absent,
    }
}

fn arithmetic(func: Func, x: f64, y: f64) -> ExprResult {
    let r = match func {
        Func::Add => x + y,
        Func::Subtract => x - y,
        Func::Multiply => x * y,
        Func::Divide if y == 0.0 => return ExprResult::error("division by zero"),
        Func::Divide => x / y,
        _ => unreachable!("not arithmetic"),
    };
    if r.is_finite() {
        ExprResult::Value(Value::Double(r))
    } else {
        ExprResult::error(format!("{} overflows", func.name()))
    }
}
