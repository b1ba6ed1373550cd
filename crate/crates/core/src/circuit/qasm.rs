//! OpenQASM 2.0 export and a small parser for the cx/rz/ry subset.
//!
//! R_Z(a) = diag(e^{ia}, e^{−ia}) is written rz(−2a) and R_Y(a) is written
//! ry(−2a). With the usual qelib1 definitions both conversions are exact up to
//! a global phase.

use std::fmt::Write as _;

use super::{Circuit, Gate, Segment, SegmentKind};
use crate::error::{Error, Result};

const HEADER: &str = "\
// conventions: qubit k is q[k-1]; q[0] is the most significant bit of a basis-state index
// R_Z(a) = diag(exp(ia), exp(-ia)) is written rz(-2a); R_Y(a) = [[cos a, sin a], [-sin a, cos a]] is written ry(-2a)
// unitaries agree with the source circuit up to a global phase
";

/// Shortest round-trip decimal, always with a '.' in the mantissa.
fn fmt_float(v: f64) -> String {
    let s = format!("{v:?}");
    if s.contains('.') || s.contains("inf") || s.contains("NaN") {
        return s;
    }
    match s.find('e') {
        Some(i) => format!("{}.0{}", &s[..i], &s[i..]),
        None => format!("{s}.0"),
    }
}

pub fn export(c: &Circuit) -> Result<String> {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    out.push_str(HEADER);
    let _ = writeln!(out, "// qubits: {}", c.n);
    let _ = writeln!(out, "qreg q[{}];", c.n);
    for seg in &c.segments {
        let _ = writeln!(out, "// segment {} {}", seg.layer, seg.kind.label());
        for g in &seg.gates {
            match g {
                Gate::Cnot { control, target } => {
                    let _ = writeln!(out, "cx q[{}],q[{}];", control - 1, target - 1);
                }
                Gate::Rz { qubit, angle } => {
                    let _ = writeln!(out, "rz({}) q[{}];", fmt_float(-2.0 * angle), qubit - 1);
                }
                Gate::Ry { qubit, angle } => {
                    let _ = writeln!(out, "ry({}) q[{}];", fmt_float(-2.0 * angle), qubit - 1);
                }
                Gate::Mux(_) => return Err(Error::MacroPresent),
            }
        }
    }
    Ok(out)
}

struct Expr<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Expr<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn sum(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.product()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let r = self.product()?;
            v = if op == b'+' { v + r } else { v - r };
        }
        Ok(v)
    }

    fn product(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let r = self.unary()?;
            v = if op == b'*' { v * r } else { v / r };
        }
        Ok(v)
    }

    fn unary(&mut self) -> std::result::Result<f64, String> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> std::result::Result<f64, String> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err("missing ')'".into());
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                match &self.s[start..self.pos] {
                    b"pi" => Ok(std::f64::consts::PI),
                    other => Err(format!("unknown identifier {:?}", String::from_utf8_lossy(other))),
                }
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.s.len() {
                    let c = self.s[self.pos];
                    let exp_sign = (c == b'-' || c == b'+') && matches!(self.s[self.pos - 1], b'e' | b'E');
                    if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let text = std::str::from_utf8(&self.s[start..self.pos]).map_err(|e| e.to_string())?;
                text.parse::<f64>().map_err(|_| format!("bad number {text:?}"))
            }
            other => Err(format!("unexpected {:?}", other.map(|c| c as char))),
        }
    }
}

fn eval_expr(s: &str) -> std::result::Result<f64, String> {
    let mut e = Expr { s: s.as_bytes(), pos: 0 };
    let v = e.sum()?;
    if e.peek().is_some() {
        return Err(format!("trailing input in {s:?}"));
    }
    Ok(v)
}

fn qubit_ref(s: &str, reg: &str, n: u32) -> std::result::Result<u32, String> {
    let s = s.trim();
    let inner = s
        .strip_prefix(reg)
        .and_then(|r| r.trim_start().strip_prefix('['))
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| format!("bad qubit reference {s:?}"))?;
    let k: u32 = inner.trim().parse().map_err(|_| format!("bad qubit index {inner:?}"))?;
    if k >= n {
        return Err(format!("qubit index {k} outside register of size {n}"));
    }
    Ok(k + 1)
}

/// Parses the subset written by `export`. Segment markers are restored when present.
pub fn parse(text: &str) -> Result<Circuit> {
    let mut reg: Option<(String, u32)> = None;
    let mut segments: Vec<Segment> = Vec::new();
    let mut current = Segment { layer: 0, kind: SegmentKind::Free, gates: Vec::new() };
    let mut header_seen = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let perr = |message: String| Error::Parse { line: line_no, message };
        let (code, comment) = match raw.find("//") {
            Some(i) => (&raw[..i], Some(raw[i + 2..].trim())),
            None => (raw, None),
        };
        if let Some(rest) = comment.and_then(|c| c.strip_prefix("segment ")) {
            let mut it = rest.split_whitespace();
            let layer = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| perr("bad segment layer".into()))?;
            let kind = SegmentKind::from_label(it.next().ok_or_else(|| perr("segment label missing".into()))?)?;
            let done = std::mem::replace(&mut current, Segment { layer, kind, gates: Vec::new() });
            if !done.gates.is_empty() || done.kind != SegmentKind::Free {
                segments.push(done);
            }
        }
        for stmt in code.split(';') {
            let stmt = stmt.trim();
            if stmt.is_empty() {
                continue;
            }
            if let Some(v) = stmt.strip_prefix("OPENQASM") {
                if v.trim() != "2.0" {
                    return Err(perr(format!("unsupported version {:?}", v.trim())));
                }
                header_seen = true;
                continue;
            }
            if stmt.starts_with("include") {
                continue;
            }
            if let Some(decl) = stmt.strip_prefix("qreg") {
                if reg.is_some() {
                    return Err(perr("only one quantum register is supported".into()));
                }
                let decl = decl.trim();
                let open = decl.find('[').ok_or_else(|| perr("bad qreg".into()))?;
                let name = decl[..open].trim().to_string();
                let size: u32 = decl[open + 1..]
                    .strip_suffix(']')
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| perr("bad qreg size".into()))?;
                if size == 0 {
                    return Err(perr("empty register".into()));
                }
                reg = Some((name, size));
                continue;
            }
            let (name, n) =
                reg.as_ref().map(|(a, b)| (a.as_str(), *b)).ok_or_else(|| perr("gate before qreg".into()))?;
            let (head, args) = match stmt.find(|c: char| c.is_whitespace() || c == '(') {
                Some(i) => stmt.split_at(i),
                None => return Err(perr(format!("cannot parse {stmt:?}"))),
            };
            match head {
                "cx" | "CX" => {
                    let (a, b) = args.split_once(',').ok_or_else(|| perr("cx needs two qubits".into()))?;
                    let control = qubit_ref(a, name, n).map_err(perr)?;
                    let target = qubit_ref(b, name, n).map_err(perr)?;
                    if control == target {
                        return Err(perr("cx control equals target".into()));
                    }
                    current.gates.push(Gate::cnot(control, target));
                }
                "rz" | "ry" => {
                    let args = args.trim_start();
                    let close = args.rfind(')').ok_or_else(|| perr("missing angle".into()))?;
                    let expr =
                        args.strip_prefix('(').map(|_| &args[1..close]).ok_or_else(|| perr("missing '('".into()))?;
                    let theta = eval_expr(expr).map_err(perr)?;
                    let qubit = qubit_ref(&args[close + 1..], name, n).map_err(perr)?;
                    let angle = -theta / 2.0;
                    current.gates.push(if head == "rz" {
                        Gate::Rz { qubit, angle }
                    } else {
                        Gate::Ry { qubit, angle }
                    });
                }
                other => return Err(Error::UnsupportedGate(format!("{other} (line {line_no})"))),
            }
        }
    }
    if !header_seen {
        return Err(Error::Parse { line: 1, message: "missing OPENQASM header".into() });
    }
    let (_, n) = reg.ok_or_else(|| Error::Parse { line: 0, message: "missing qreg".into() })?;
    if !current.gates.is_empty() || current.kind != SegmentKind::Free {
        segments.push(current);
    }
    Ok(Circuit { n, segments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::evaluate;
    use crate::matcore::phase_invariant_distance;

    #[test]
    fn empty_circuit() {
        let text = export(&Circuit::new(2)).unwrap();
        assert!(text.starts_with("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n"));
        assert!(text.contains("qreg q[2];"));
        assert_eq!(text.lines().filter(|l| !l.starts_with("//")).count(), 3);
        let back = parse(&text).unwrap();
        assert_eq!(back.n, 2);
        assert_eq!(back.gates().count(), 0);
    }

    #[test]
    fn rz_convention() {
        let c = Circuit::from_gates(1, vec![Gate::Rz { qubit: 1, angle: std::f64::consts::FRAC_PI_2 }]);
        let text = export(&c).unwrap();
        assert!(text.contains(&format!("rz({:?}) q[0];", -std::f64::consts::PI)));
        let back = parse(&text).unwrap();
        assert!(phase_invariant_distance(&evaluate(&back), &evaluate(&c)).unwrap() < 1e-12);
    }

    #[test]
    fn floats_keep_a_point() {
        assert_eq!(fmt_float(1e-7), "1.0e-7");
        assert_eq!(fmt_float(2.0), "2.0");
        assert_eq!(fmt_float(-0.25), "-0.25");
        assert_eq!(fmt_float(1e300), "1.0e300");
    }

    #[test]
    fn parser_handles_pi_expressions() {
        let text = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg r[2];\nrz(-pi/2) r[1]; ry(2*pi - 0.5e-1) r[0];\ncx r[0], r[1];\n";
        let c = parse(text).unwrap();
        let g: Vec<&Gate> = c.gates().collect();
        assert_eq!(g.len(), 3);
        assert_eq!(*g[0], Gate::Rz { qubit: 2, angle: std::f64::consts::FRAC_PI_4 });
        assert_eq!(*g[2], Gate::cnot(1, 2));
    }

    #[test]
    fn parser_rejects_garbage() {
        let base = "OPENQASM 2.0;\nqreg q[2];\n";
        assert!(matches!(parse(&format!("{base}h q[0];")), Err(Error::UnsupportedGate(_))));
        assert!(parse(&format!("{base}cx q[0],q[2];")).is_err());
        assert!(parse(&format!("{base}rz(foo) q[0];")).is_err());
        assert!(parse("qreg q[1];").is_err());
        assert!(parse(&format!("{base}cx q[1],q[1];")).is_err());
    }

    #[test]
    fn export_refuses_macros() {
        let m = crate::circuit::MultiplexedRotation {
            axis: crate::circuit::Axis::Z,
            controls: vec![],
            target: 1,
            angles: vec![0.1],
            mirrored: false,
        };
        assert_eq!(export(&Circuit::from_gates(1, vec![Gate::Mux(m)])), Err(Error::MacroPresent));
    }
}
