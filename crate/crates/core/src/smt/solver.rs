use std::collections::BTreeMap;
use std::env;
use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use chrono::NaiveDate;

use super::emit::{member_var, present_var};
use super::encode::Encoding;
use super::SolveError;
use crate::model::{AttrKind, Binding, Request, Value, ValueSet};

pub const SOLVER_ENV: &str = "FACPL_SMT_SOLVER";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Sat,
    Unsat,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Sat => "sat",
            Verdict::Unsat => "unsat",
            Verdict::Unknown => "unknown",
        })
    }
}

/// An s-expression as printed by a solver. Quoted symbols lose their bars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom(String),
    List(Vec<SExpr>),
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(a) => f.write_str(a),
            SExpr::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Parses a sequence of s-expressions.
pub fn parse_sexprs(text: &str) -> Result<Vec<SExpr>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let mut stack: Vec<Vec<SExpr>> = vec![Vec::new()];
    while pos < chars.len() {
        let c = chars[pos];
        match c {
            c if c.is_whitespace() => pos += 1,
            ';' => {
                while pos < chars.len() && chars[pos] != '\n' {
                    pos += 1;
                }
            }
            '(' => {
                stack.push(Vec::new());
                pos += 1;
            }
            ')' => {
                let list = stack.pop().expect("stack never empty");
                let parent = stack.last_mut().ok_or("unbalanced `)`")?;
                parent.push(SExpr::List(list));
                pos += 1;
            }
            '|' => {
                let end = chars[pos + 1..].iter().position(|&c| c == '|').ok_or("unterminated `|` symbol")?;
                let sym: String = chars[pos + 1..pos + 1 + end].iter().collect();
                stack.last_mut().expect("stack never empty").push(SExpr::Atom(sym));
                pos += end + 2;
            }
            '"' => {
                let start = pos;
                pos += 1;
                loop {
                    match chars.get(pos) {
                        None => return Err("unterminated string".into()),
                        Some('"') if chars.get(pos + 1) == Some(&'"') => pos += 2,
                        Some('"') => break,
                        Some(_) => pos += 1,
                    }
                }
                pos += 1;
                let s: String = chars[start..pos].iter().collect();
                stack.last_mut().expect("stack never empty").push(SExpr::Atom(s));
            }
            _ => {
                let start = pos;
                while pos < chars.len() && !chars[pos].is_whitespace() && !"()|;\"".contains(chars[pos]) {
                    pos += 1;
                }
                let s: String = chars[start..pos].iter().collect();
                stack.last_mut().expect("stack never empty").push(SExpr::Atom(s));
            }
        }
    }
    if stack.len() != 1 {
        return Err("unbalanced `(`".into());
    }
    Ok(stack.pop().expect("one level"))
}

/// Constant interpretations from a `(get-model)` response.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model(BTreeMap<String, SExpr>);

impl Model {
    pub fn get(&self, name: &str) -> Option<&SExpr> {
        self.0.get(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn collect(&mut self, e: &SExpr) {
        if let SExpr::List(items) = e {
            if let [SExpr::Atom(kw), SExpr::Atom(name), SExpr::List(params), _sort, value] = items.as_slice() {
                if kw == "define-fun" && params.is_empty() {
                    self.0.insert(name.clone(), value.clone());
                    return;
                }
            }
            for item in items {
                self.collect(item);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverOutput {
    pub verdict: Verdict,
    pub model: Option<Model>,
}

/// Parses solver output: a verdict line followed, after `sat`, by a model.
pub fn parse_output(text: &str) -> Result<SolverOutput, SolveError> {
    let trimmed = text.trim_start();
    let (first, rest) = trimmed.split_once('\n').unwrap_or((trimmed, ""));
    let verdict = match first.trim() {
        "sat" => Verdict::Sat,
        "unsat" => Verdict::Unsat,
        "unknown" => Verdict::Unknown,
        other if other.starts_with("(error") => return Err(SolveError::Failed(other.to_owned())),
        other => return Err(SolveError::Unparseable(format!("expected a verdict, got `{other}`"))),
    };
    if verdict != Verdict::Sat {
        return Ok(SolverOutput { verdict, model: None });
    }
    let exprs = parse_sexprs(rest).map_err(SolveError::Unparseable)?;
    let mut model = Model::default();
    for e in &exprs {
        if let SExpr::List(items) = e {
            if matches!(items.first(), Some(SExpr::Atom(a)) if a == "error") {
                return Err(SolveError::Unparseable(format!("solver error in model: {e}")));
            }
        }
        model.collect(e);
    }
    Ok(SolverOutput { verdict, model: Some(model) })
}

/// An external SMT-LIB 2 solver reading the script on standard input.
#[derive(Debug, Clone)]
pub struct Solver {
    program: PathBuf,
    timeout: Duration,
}

impl Solver {
    /// Uses `explicit` if given, else `$FACPL_SMT_SOLVER`, else `z3` on the path.
    pub fn locate(explicit: Option<&Path>) -> Self {
        let program = explicit
            .map(Path::to_path_buf)
            .or_else(|| env::var_os(SOLVER_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("z3"));
        Solver { program, timeout: DEFAULT_TIMEOUT }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn program(&self) -> &Path {
        &self.program
    }

    fn args(&self) -> &'static [&'static str] {
        let stem = self.program.file_name().map(|s| s.to_string_lossy().to_lowercase()).unwrap_or_default();
        if stem.starts_with("z3") {
            &["-in"]
        } else if stem.starts_with("cvc5") || stem.starts_with("cvc4") {
            &["--lang=smt2"]
        } else {
            &[]
        }
    }

    /// Runs `script` and returns the raw standard output.
    pub fn run_raw(&self, script: &str) -> Result<String, SolveError> {
        let mut child = Command::new(&self.program)
            .args(self.args())
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound => SolveError::NotFound(self.program.display().to_string()),
                _ => SolveError::Io(format!("{}: {e}", self.program.display())),
            })?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let input = script.to_owned();
        let writer = thread::spawn(move || {
            // a solver that exits early closes the pipe; that is not our error
            let _ = stdin.write_all(input.as_bytes());
        });
        let mut stdout = child.stdout.take().expect("piped stdout");
        let reader = thread::spawn(move || {
            let mut buf = String::new();
            let _ = stdout.read_to_string(&mut buf);
            buf
        });
        let start = Instant::now();
        loop {
            match child.try_wait() {
                Ok(Some(_)) => break,
                Ok(None) if start.elapsed() >= self.timeout => {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err(SolveError::Timeout(self.timeout));
                }
                Ok(None) => thread::sleep(Duration::from_millis(5)),
                Err(e) => return Err(SolveError::Io(e.to_string())),
            }
        }
        let _ = writer.join();
        reader.join().map_err(|_| SolveError::Io("output reader panicked".into()))
    }

    pub fn run(&self, script: &str) -> Result<SolverOutput, SolveError> {
        parse_output(&self.run_raw(script)?)
    }
}

/// Runs `script` on the solver at `solver` (or the default solver).
pub fn solve(script: &str, solver: Option<&Path>) -> Result<SolverOutput, SolveError> {
    Solver::locate(solver).run(script)
}

fn parse_real(e: &SExpr) -> Option<f64> {
    match e {
        SExpr::Atom(a) => a.parse().ok(),
        SExpr::List(items) => match items.as_slice() {
            [SExpr::Atom(op), x] if op == "-" => parse_real(x).map(|v| -v),
            [SExpr::Atom(op), x, y] if op == "/" => Some(parse_real(x)? / parse_real(y)?),
            _ => None,
        },
    }
}

fn parse_bool(e: &SExpr) -> Option<bool> {
    match e {
        SExpr::Atom(a) if a == "true" => Some(true),
        SExpr::Atom(a) if a == "false" => Some(false),
        _ => None,
    }
}

impl Encoding {
    /// The request described by a model. Unassigned variables take their
    /// default (absent, or the first universe value).
    pub fn decode_model(&self, model: &Model) -> Result<Request, SolveError> {
        let strings = self.string_constants();
        let mut request = Request::new();
        let bad = |name: &str, e: &SExpr| SolveError::Unparseable(format!("value `{e}` for `{name}`"));
        for (name, domain) in self.attrs() {
            if domain.allow_absent() {
                let flag = present_var(name);
                let flag = flag.trim_matches('|');
                let present = match model.get(flag) {
                    Some(e) => parse_bool(e).ok_or_else(|| bad(flag, e))?,
                    None => false,
                };
                if !present {
                    continue;
                }
            }
            let universe = domain.universe();
            let label = name.to_string();
            let binding = if domain.kind() == AttrKind::StringSet {
                let mut members = Vec::new();
                for (j, v) in universe.iter().enumerate() {
                    let flag = member_var(name, j);
                    let flag = flag.trim_matches('|');
                    if let Some(e) = model.get(flag) {
                        if parse_bool(e).ok_or_else(|| bad(flag, e))? {
                            members.push(v.clone());
                        }
                    }
                }
                let set = ValueSet::new(members)
                    .map_err(|_| SolveError::Unparseable(format!("empty set for present `{label}`")))?;
                Binding::Set(set)
            } else {
                let value = match model.get(&label) {
                    None => universe[0].clone(),
                    Some(e) => {
                        let decoded = match domain.kind() {
                            AttrKind::Boolean => parse_bool(e).map(Value::Bool),
                            AttrKind::String => match e {
                                SExpr::Atom(a) => a
                                    .strip_prefix('s')
                                    .and_then(|i| i.parse::<usize>().ok())
                                    .and_then(|i| strings.get(i))
                                    .map(|s| Value::Str(s.clone())),
                                _ => None,
                            },
                            AttrKind::Double => parse_real(e).and_then(|x| nearest(universe, x)),
                            AttrKind::Date => parse_real(e)
                                .and_then(|d| i32::try_from(d as i64).ok())
                                .and_then(NaiveDate::from_num_days_from_ce_opt)
                                .map(Value::Date),
                            AttrKind::StringSet => unreachable!("handled above"),
                        };
                        decoded.filter(|v| universe.contains(v)).ok_or_else(|| bad(&label, e))?
                    }
                };
                Binding::Value(value)
            };
            request.bind(name.clone(), binding);
        }
        Ok(request)
    }
}

fn nearest(universe: &[Value], x: f64) -> Option<Value> {
    universe
        .iter()
        .filter_map(|v| match v {
            Value::Double(d) => Some((v, (d - x).abs())),
            _ => None,
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(v, _)| v.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sexpr_parsing() {
        let e = parse_sexprs("(model (define-fun |a/b| () Str s1) (define-fun x () Real (- (/ 1.0 4.0))))").unwrap();
        assert_eq!(e.len(), 1);
        let mut m = Model::default();
        m.collect(&e[0]);
        assert_eq!(m.get("a/b"), Some(&SExpr::Atom("s1".into())));
        assert_eq!(parse_real(m.get("x").unwrap()), Some(-0.25));
        assert!(parse_sexprs("(a (b)").is_err());
        assert!(parse_sexprs("a)").is_err());
    }

    #[test]
    fn output_parsing() {
        assert_eq!(parse_output("unsat\n(error \"model is not available\")\n").unwrap().verdict, Verdict::Unsat);
        let sat = parse_output("sat\n(\n  (define-fun |present:a/b| () Bool\n    true)\n)\n").unwrap();
        assert_eq!(sat.verdict, Verdict::Sat);
        assert_eq!(sat.model.unwrap().len(), 1);
        assert!(matches!(parse_output("garbage"), Err(SolveError::Unparseable(_))));
        assert!(matches!(parse_output("(error \"bad\")"), Err(SolveError::Failed(_))));
        assert!(matches!(parse_output("sat\n((define-fun"), Err(SolveError::Unparseable(_))));
    }

    #[test]
    fn locate_prefers_explicit_path() {
        let s = Solver::locate(Some(Path::new("/opt/cvc5")));
        assert_eq!(s.program(), Path::new("/opt/cvc5"));
        assert_eq!(s.args(), &["--lang=smt2"]);
    }

    #[test]
    fn missing_solver_reported() {
        let s = Solver::locate(Some(Path::new("/nonexistent/solver-binary")));
        assert!(matches!(s.run("(check-sat)"), Err(SolveError::NotFound(_))));
    }
}
