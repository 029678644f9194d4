//! Text format for functions.
//!
//! ```text
//! n=<int>
//! alpha=<int>          (optional, default 2)
//! tt=<0|1|*>...        (dense table in index order)
//! ctor=<name>(<args>)  (instead of tt)
//! ```
//!
//! Lines may also be separated by `;`. `n=` may be omitted for `ctor=`.

use crate::error::{Error, Result};
use crate::function::{
    compose, make_and, make_collision, make_lattice, make_majority, make_or, make_parity, make_threshold,
    make_weight_window, FunctionObject, Kind, DENSE_CAP,
};

/// Largest `n` accepted for `tt=` with a Boolean alphabet.
pub const MAX_TT_VARS: usize = 20;

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_function(text: &str) -> Result<FunctionObject> {
    let mut n: Option<(usize, usize)> = None;
    let mut alpha: Option<(usize, u32)> = None;
    let mut body: Option<(usize, &str, &str)> = None;
    let entries = text
        .split(['\n', ';'])
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    for (line, entry) in entries {
        let (key, value) = entry
            .split_once('=')
            .ok_or_else(|| perr(line, format!("expected key=value, got {entry:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "n" => {
                let v = value
                    .parse()
                    .map_err(|_| perr(line, format!("bad variable count {value:?}")))?;
                n = Some((line, v));
            }
            "alpha" => {
                let v: u32 = value
                    .parse()
                    .map_err(|_| perr(line, format!("bad alphabet size {value:?}")))?;
                if v < 2 {
                    return Err(perr(line, "alphabet size must be at least 2"));
                }
                alpha = Some((line, v));
            }
            "tt" | "ctor" => {
                if body.is_some() {
                    return Err(perr(line, "more than one tt=/ctor= entry"));
                }
                body = Some((line, key, value));
            }
            other => return Err(perr(line, format!("unknown key {other:?}"))),
        }
    }
    let (line, key, value) = body.ok_or_else(|| perr(1, "missing tt= or ctor="))?;
    if key == "tt" {
        let (_, n) = n.ok_or_else(|| perr(line, "tt= requires n="))?;
        let alpha = alpha.map_or(2, |(_, a)| a);
        let size = crate::function::checked_pow(alpha as u64, n).filter(|&s| s <= DENSE_CAP);
        let Some(size) = size else {
            return Err(perr(line, format!("n={n} is outside the supported range for tt=")));
        };
        let table = value
            .chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(Some(false)),
                '1' => Ok(Some(true)),
                '*' => Ok(None),
                other => Err(perr(line, format!("illegal character {other:?} at offset {i}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if table.len() as u64 != size {
            return Err(perr(
                line,
                format!("table has {} entries, expected {size}", table.len()),
            ));
        }
        return FunctionObject::dense(n, alpha, table);
    }
    let f = parse_ctor(value).map_err(|e| match e {
        Error::Parse { message, .. } => perr(line, message),
        other => other,
    })?;
    if let Some((l, n)) = n {
        if n != f.n() {
            return Err(perr(l, format!("n={n} but the constructor has {} variables", f.n())));
        }
    }
    if let Some((l, a)) = alpha {
        if a != f.alphabet() {
            return Err(perr(
                l,
                format!("alpha={a} but the constructor has alphabet {}", f.alphabet()),
            ));
        }
    }
    Ok(f)
}

pub fn serialize_function(f: &FunctionObject) -> Result<String> {
    let mut out = format!("n={}\n", f.n());
    if let Some(ctor) = f.ctor() {
        out.push_str("ctor=");
        out.push_str(ctor);
        return Ok(out);
    }
    if let Kind::Symmetric(p) = f.kind() {
        let bits: String = p.iter().map(|&b| if b { '1' } else { '0' }).collect();
        out.push_str(&format!("ctor=profile({bits})"));
        return Ok(out);
    }
    let dense = match f.kind() {
        Kind::Dense(_) => f.clone(),
        _ if f.dense_size().is_some() => f.to_dense()?,
        _ => {
            return Err(Error::Unsupported(format!(
                "serializing an unnamed {} function",
                f.kind_name()
            )))
        }
    };
    if dense.alphabet() != 2 {
        out.push_str(&format!("alpha={}\n", dense.alphabet()));
    }
    out.push_str("tt=");
    out.extend(dense.table().expect("dense").iter().map(|v| match v {
        Some(false) => '0',
        Some(true) => '1',
        None => '*',
    }));
    Ok(out)
}

/// Parses a constructor expression such as `compose(window(29,13,16),2)`.
pub fn parse_ctor(expr: &str) -> Result<FunctionObject> {
    let mut p = CtorParser {
        src: expr.as_bytes(),
        pos: 0,
    };
    let f = p.function()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("trailing characters after constructor"));
    }
    Ok(f)
}

struct CtorParser<'a> {
    src: &'a [u8],
    pos: usize,
}

enum Arg {
    Int(usize),
    Bits(Vec<bool>),
    Func(FunctionObject),
}

impl CtorParser<'_> {
    fn error(&self, message: &str) -> Error {
        perr(1, format!("{message} (at offset {} of constructor)", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected {:?}", c as char)))
        }
    }

    fn word(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii")
    }

    fn arg(&mut self) -> Result<Arg> {
        let save = self.pos;
        let w = self.word().to_string();
        if w.is_empty() {
            return Err(self.error("expected an argument"));
        }
        self.skip_ws();
        if self.src.get(self.pos) == Some(&b'(') {
            self.pos = save;
            return Ok(Arg::Func(self.function()?));
        }
        if w.bytes().all(|b| b.is_ascii_digit()) {
            // bit strings keep leading zeros and only use 0/1; integers are ordinary
            let bits = w.len() > 1 && w.starts_with('0') && w.bytes().all(|b| b == b'0' || b == b'1');
            if bits {
                return Ok(Arg::Bits(w.bytes().map(|b| b == b'1').collect()));
            }
            return w.parse().map(Arg::Int).map_err(|_| self.error("integer out of range"));
        }
        Err(self.error(&format!("unexpected argument {w:?}")))
    }

    fn function(&mut self) -> Result<FunctionObject> {
        let name = self.word().to_string();
        if name.is_empty() {
            return Err(self.error("expected a constructor name"));
        }
        self.eat(b'(')?;
        let mut args = Vec::new();
        self.skip_ws();
        if self.src.get(self.pos) != Some(&b')') {
            loop {
                args.push(self.arg()?);
                self.skip_ws();
                if self.src.get(self.pos) == Some(&b',') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.eat(b')')?;
        self.build(&name, args)
    }

    fn build(&self, name: &str, args: Vec<Arg>) -> Result<FunctionObject> {
        let ints = |args: &[Arg], k: usize| -> Result<Vec<usize>> {
            if args.len() != k {
                return Err(self.error(&format!("{name} takes {k} integer arguments")));
            }
            args.iter()
                .map(|a| match a {
                    Arg::Int(v) => Ok(*v),
                    Arg::Bits(b) if b.iter().all(|x| !x) => Ok(0),
                    _ => Err(self.error(&format!("{name} takes integer arguments"))),
                })
                .collect()
        };
        match name {
            "window" => {
                let v = ints(&args, 3)?;
                make_weight_window(v[0], v[1], v[2])
            }
            "threshold" => make_threshold(ints(&args, 1)?[0]),
            "lattice" => {
                let v = ints(&args, 2)?;
                make_lattice(v[0], v[1])
            }
            "or" => make_or(ints(&args, 1)?[0]),
            "and" => make_and(ints(&args, 1)?[0]),
            "parity" => make_parity(ints(&args, 1)?[0]),
            "majority" => make_majority(ints(&args, 1)?[0]),
            "collision" => make_collision(ints(&args, 1)?[0]),
            "profile" => match args.as_slice() {
                [Arg::Bits(b)] => FunctionObject::symmetric(b.clone()),
                [Arg::Int(v)] if *v <= 1 => FunctionObject::symmetric(vec![*v == 1]),
                _ => Err(self.error("profile takes one 0/1 string")),
            },
            "compose" => match args.as_slice() {
                [Arg::Func(f), Arg::Int(t)] => compose(f, f, *t),
                [Arg::Func(o), Arg::Func(i), Arg::Int(t)] => compose(o, i, *t),
                _ => Err(self.error("compose takes (f,t) or (outer,inner,t)")),
            },
            other => Err(self.error(&format!("unknown constructor {other:?}"))),
        }
    }
}
