use std::collections::VecDeque;

use super::ast::{AxisRef, Command, CutOrientation, IndexSpec, Offset, ViewDerive, ANIM_AXES, VERBS};
use super::token::{tokenize, Token, TokenKind};
use super::ParseError;
use crate::field::Reducer;
use crate::render::Palette;
use crate::session::{is_valid_name, AnimKind, Generator, Mode, ViewTarget};

type Result<T> = std::result::Result<T, ParseError>;

fn err(tok: &Token, message: impl Into<String>) -> ParseError {
    let offending = match tok.kind {
        TokenKind::String => format!("\"{}\"", tok.text),
        _ => tok.text.clone(),
    };
    ParseError { message: message.into(), line: tok.line, column: tok.column, offending }
}

#[derive(Debug, Clone)]
enum Value {
    Number(Token),
    Range(Token, Token),
    Word(Token),
    Tuple(Token, Vec<Token>),
    Dims(Token, Vec<usize>),
}

impl Value {
    fn token(&self) -> &Token {
        match self {
            Value::Number(t) | Value::Range(t, _) | Value::Word(t) | Value::Tuple(t, _) | Value::Dims(t, _) => t,
        }
    }
}

#[derive(Debug, Clone)]
struct Named {
    key: Token,
    value: Value,
}

fn number(tok: &Token) -> Result<f64> {
    let v: f64 = tok.text.parse().map_err(|_| err(tok, format!("invalid number {}", tok.text)))?;
    if !v.is_finite() {
        return Err(err(tok, format!("number {} is not finite", tok.text)));
    }
    Ok(v)
}

fn integer<I: std::str::FromStr>(tok: &Token) -> Result<I> {
    if tok.kind != TokenKind::Number || !tok.text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err(tok, format!("expected a non-negative integer, found {}", tok.text)));
    }
    tok.text.parse().map_err(|_| err(tok, format!("integer {} is too large", tok.text)))
}

/// `x16x16` after an adjacent number, as in `16x16x16`.
fn dims_tail(word: &str) -> Option<Vec<&str>> {
    let parts: Vec<&str> = word.strip_prefix('x')?.split('x').collect();
    parts.iter().all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit())).then_some(parts)
}

struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    fn peek(&self, k: usize) -> &Token {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i]
    }

    fn next(&mut self) -> Token {
        let t = self.peek(0).clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn at_end(&self) -> bool {
        self.peek(0).kind == TokenKind::End
    }

    fn value(&mut self) -> Result<Value> {
        let t = self.next();
        match t.kind {
            TokenKind::Number => {
                if self.peek(0).is_symbol("..") {
                    self.next();
                    let hi = self.next();
                    if hi.kind != TokenKind::Number {
                        return Err(err(&hi, format!("expected a number after '..', found {}", describe(&hi))));
                    }
                    return Ok(Value::Range(t, hi));
                }
                let w = self.peek(0);
                if w.kind == TokenKind::Word && !w.spaced {
                    let w = self.next();
                    let parts = dims_tail(&w.text)
                        .ok_or_else(|| err(&w, format!("unexpected '{}' after number {}", w.text, t.text)))?;
                    let mut dims = vec![integer::<usize>(&t)?];
                    for p in parts {
                        let d = p.parse().map_err(|_| err(&w, format!("extent {p} is too large")))?;
                        dims.push(d);
                    }
                    return Ok(Value::Dims(t, dims));
                }
                Ok(Value::Number(t))
            }
            TokenKind::Word => Ok(Value::Word(t)),
            TokenKind::Symbol if t.text == "(" => {
                let mut items = Vec::new();
                loop {
                    let n = self.next();
                    if n.kind != TokenKind::Number {
                        return Err(err(&n, format!("expected a number in tuple, found {}", describe(&n))));
                    }
                    items.push(n);
                    let sep = self.next();
                    if sep.is_symbol(")") {
                        break;
                    }
                    if !sep.is_symbol(",") {
                        return Err(err(&sep, format!("expected ',' or ')', found {}", describe(&sep))));
                    }
                }
                if !(2..=3).contains(&items.len()) {
                    return Err(err(&t, format!("tuples have 2 or 3 numbers, found {}", items.len())));
                }
                Ok(Value::Tuple(t, items))
            }
            _ => Err(err(&t, format!("expected a value, found {}", describe(&t)))),
        }
    }
}

fn describe(t: &Token) -> String {
    match t.kind {
        TokenKind::End | TokenKind::Newline => "end of line".into(),
        TokenKind::String => format!("string \"{}\"", t.text),
        _ => format!("'{}'", t.text),
    }
}

/// Arguments of one statement, consumed by the per-verb builders; anything
/// left over is an error.
struct Args {
    verb: Token,
    positional: VecDeque<Token>,
    named: Vec<Named>,
    alias: Option<Token>,
}

impl Args {
    fn positional_word(&mut self, what: &str) -> Result<Token> {
        match self.positional.front() {
            Some(t) if t.kind == TokenKind::Word => Ok(self.positional.pop_front().unwrap()),
            Some(t) => Err(err(t, format!("expected {what}, found {}", describe(t)))),
            None => Err(err(&self.verb, format!("{} needs {what}", self.verb.text))),
        }
    }

    fn positional_name(&mut self, what: &str) -> Result<String> {
        let t = self.positional_word(what)?;
        name_of(&t)
    }

    fn positional_string(&mut self, what: &str) -> Result<String> {
        match self.positional.front() {
            Some(t) if t.kind == TokenKind::String => Ok(self.positional.pop_front().unwrap().text),
            Some(t) => Err(err(t, format!("expected {what} as a quoted string, found {}", describe(t)))),
            None => Err(err(&self.verb, format!("{} needs {what}", self.verb.text))),
        }
    }

    fn take(&mut self, key: &str) -> Result<Option<Value>> {
        let mut found = self.named.iter().enumerate().filter(|(_, n)| n.key.text == key).map(|(i, _)| i);
        let Some(first) = found.next() else { return Ok(None) };
        if let Some(dup) = found.next() {
            return Err(err(&self.named[dup].key, format!("duplicate argument {key}=")));
        }
        Ok(Some(self.named.remove(first).value))
    }

    fn take_all(&mut self, key: &str) -> Vec<Value> {
        let (hit, rest): (Vec<Named>, Vec<Named>) = self.named.drain(..).partition(|n| n.key.text == key);
        self.named = rest;
        hit.into_iter().map(|n| n.value).collect()
    }

    fn require(&mut self, key: &str) -> Result<Value> {
        self.take(key)?.ok_or_else(|| err(&self.verb, format!("{} needs {key}=", self.verb.text)))
    }

    fn alias(&mut self) -> Result<String> {
        match self.alias.take() {
            Some(t) => name_of(&t),
            None => Err(err(&self.verb, format!("{} needs 'as NAME'", self.verb.text))),
        }
    }

    fn finish(self) -> Result<()> {
        if let Some(t) = self.positional.front() {
            return Err(err(t, format!("unexpected argument {}", describe(t))));
        }
        if let Some(n) = self.named.first() {
            return Err(err(&n.key, format!("{} does not take {}=", self.verb.text, n.key.text)));
        }
        if let Some(a) = &self.alias {
            return Err(err(a, format!("{} does not take 'as NAME'", self.verb.text)));
        }
        Ok(())
    }
}

fn name_of(t: &Token) -> Result<String> {
    if is_valid_name(&t.text) {
        Ok(t.text.clone())
    } else {
        Err(err(t, format!("invalid name {}", t.text)))
    }
}

fn num(v: &Value) -> Result<f64> {
    match v {
        Value::Number(t) => number(t),
        other => Err(err(other.token(), "expected a number")),
    }
}

fn int<I: std::str::FromStr>(v: &Value) -> Result<I> {
    match v {
        Value::Number(t) => integer(t),
        other => Err(err(other.token(), "expected a non-negative integer")),
    }
}

fn word(v: &Value) -> Result<&Token> {
    match v {
        Value::Word(t) => Ok(t),
        other => Err(err(other.token(), "expected a word")),
    }
}

fn axis(v: &Value) -> Result<AxisRef> {
    match v {
        Value::Word(t) => Ok(AxisRef::Label(name_of(t)?)),
        Value::Number(t) => Ok(AxisRef::Index(integer(t)?)),
        other => Err(err(other.token(), "expected an axis label or index")),
    }
}

fn tuple<const N: usize>(v: &Value) -> Result<[f64; N]> {
    match v {
        Value::Tuple(_, items) if items.len() == N => {
            let mut out = [0.0; N];
            for (o, t) in out.iter_mut().zip(items) {
                *o = number(t)?;
            }
            Ok(out)
        }
        other => Err(err(other.token(), format!("expected a tuple of {N} numbers"))),
    }
}

fn int_pair(v: &Value) -> Result<(usize, usize)> {
    match v {
        Value::Tuple(_, items) if items.len() == 2 => Ok((integer(&items[0])?, integer(&items[1])?)),
        other => Err(err(other.token(), "expected a pair of integers (a,b)")),
    }
}

fn dims(v: &Value) -> Result<Vec<usize>> {
    match v {
        Value::Dims(_, d) => Ok(d.clone()),
        Value::Number(t) => Ok(vec![integer(t)?]),
        other => Err(err(other.token(), "expected extents like 16x16x16")),
    }
}

fn target(v: &Value) -> Result<ViewTarget> {
    match v {
        Value::Word(t) if t.text == "all" => Ok(ViewTarget::All),
        Value::Number(t) => Ok(ViewTarget::One(integer(t)?)),
        other => Err(err(other.token(), "expected a view id or 'all'")),
    }
}

fn optional<T>(v: Option<Value>, f: impl Fn(&Value) -> Result<T>) -> Result<Option<T>> {
    v.as_ref().map(f).transpose()
}

fn levenshtein(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.chars().enumerate() {
        let mut prev = row[0];
        row[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let cur = row[j + 1];
            row[j + 1] = (prev + usize::from(ca != cb)).min(row[j] + 1).min(cur + 1);
            prev = cur;
        }
    }
    row[b.len()]
}

/// Up to three verb phrases closest to `input`, nearest first.
pub fn nearest_verbs(input: &str) -> Vec<&'static str> {
    let head = |v: &str| v.split(' ').next().unwrap_or(v).to_string();
    let mut scored: Vec<(usize, &'static str)> = VERBS
        .iter()
        .map(|&v| (levenshtein(input, v).min(levenshtein(input, &head(v))), v))
        .collect();
    scored.sort_by_key(|&(d, _)| d);
    scored.into_iter().take(3).map(|(_, v)| v).collect()
}

fn statement_verb(c: &mut Cursor) -> Result<(Token, &'static str)> {
    let first = c.next();
    if first.kind != TokenKind::Word {
        return Err(err(&first, format!("expected a verb, found {}", describe(&first))));
    }
    let quals: Vec<&'static str> = VERBS
        .iter()
        .filter_map(|v| v.strip_prefix(first.text.as_str()).and_then(|r| r.strip_prefix(' ')))
        .collect();
    if VERBS.contains(&first.text.as_str()) {
        let v = VERBS.iter().find(|v| **v == first.text).unwrap();
        return Ok((first, v));
    }
    if quals.is_empty() {
        let near = nearest_verbs(&first.text).join(", ");
        return Err(err(&first, format!("unknown verb '{}'; nearest valid verbs: {near}", first.text)));
    }
    let q = c.next();
    let phrase = format!("{} {}", first.text, q.text);
    match VERBS.iter().find(|v| **v == phrase) {
        Some(v) if q.kind == TokenKind::Word => Ok((first, v)),
        _ => {
            let options: Vec<String> = quals.iter().map(|q| format!("{} {q}", first.text)).collect();
            Err(err(&q, format!("unknown verb '{}'; expected {}", phrase.trim_end(), options.join("|"))))
        }
    }
}

fn collect_args(c: &mut Cursor, verb: Token) -> Result<Args> {
    let mut args = Args { verb, positional: VecDeque::new(), named: Vec::new(), alias: None };
    while !c.at_end() {
        let t = c.next();
        match t.kind {
            TokenKind::String => args.positional.push_back(t),
            TokenKind::Word if c.peek(0).is_symbol("=") => {
                c.next();
                let value = c.value()?;
                args.named.push(Named { key: t, value });
            }
            TokenKind::Word
                if t.text == "as" && c.peek(0).kind == TokenKind::Word && c.peek(1).kind == TokenKind::End =>
            {
                args.alias = Some(c.next());
            }
            TokenKind::Word => args.positional.push_back(t),
            _ => return Err(err(&t, format!("unexpected {}", describe(&t)))),
        }
    }
    Ok(args)
}

fn build(verb: &str, mut a: Args) -> Result<Command> {
    let cmd = match verb {
        "load" => {
            let path = a.positional_string("a path")?;
            Command::Load { path, name: a.alias()? }
        }
        "synth" => {
            let g = a.positional_word("a generator")?;
            let generator: Generator = g.text.parse().map_err(|m: String| err(&g, m))?;
            let dims = dims(&a.require("dims")?)?;
            let lumps = optional(a.take("lumps")?, int)?;
            if lumps.is_some() && generator != Generator::QcdLumps {
                return Err(err(&g, "lumps= only applies to qcd_lumps"));
            }
            let seed = optional(a.take("seed")?, int)?;
            Command::Synth { generator, dims, lumps, seed, name: a.alias()? }
        }
        "slice" => {
            let source = a.positional_name("a dataset name")?;
            let axis = axis(&a.require("axis")?)?;
            let index = match a.require("index")? {
                Value::Range(lo, hi) => IndexSpec::Range(integer(&lo)?, integer(&hi)?),
                v => IndexSpec::Single(int(&v)?),
            };
            Command::Slice { source, axis, index, name: a.alias()? }
        }
        "project" => {
            let source = a.positional_name("a dataset name")?;
            let axis = axis(&a.require("axis")?)?;
            let reducer = reducer(&a.require("reducer")?)?;
            Command::Project { source, axis, reducer, name: a.alias()? }
        }
        "filter" => {
            let source = a.positional_name("a dataset name")?;
            let lo = optional(a.take("min")?, num)?;
            let hi = optional(a.take("max")?, num)?;
            if lo.is_none() && hi.is_none() {
                return Err(err(&a.verb, "filter needs min= or max="));
            }
            Command::Filter { source, lo, hi }
        }
        "view add" => {
            let source = a.positional_name("a dataset name")?;
            let ax = optional(a.take("axis")?, axis)?;
            let index = optional(a.take("index")?, int)?;
            let red = optional(a.take("reducer")?, reducer)?;
            let derive = match (ax, index, red) {
                (None, None, None) => None,
                (Some(axis), Some(index), None) => Some(ViewDerive::Slice { axis, index }),
                (Some(axis), None, Some(reducer)) => Some(ViewDerive::Project { axis, reducer }),
                _ => return Err(err(&a.verb, "view add takes axis= with exactly one of index= or reducer=")),
            };
            let cell = optional(a.take("cell")?, int_pair)?;
            Command::ViewAdd { source, derive, cell }
        }
        "view remove" => Command::ViewRemove { view: int(&a.require("view")?)? },
        "iso add" => Command::IsoAdd { view: int(&a.require("view")?)?, level: num(&a.require("level")?)? },
        "iso remove" => {
            Command::IsoRemove { view: int(&a.require("view")?)?, level: optional(a.take("level")?, num)? }
        }
        "cut add" => {
            let view = int(&a.require("view")?)?;
            let orientation = match (a.take("axis")?, a.take("normal")?) {
                (Some(ax), None) => CutOrientation::Axis(axis(&ax)?),
                (None, Some(n)) => CutOrientation::Normal(tuple::<3>(&n)?),
                _ => return Err(err(&a.verb, "cut add takes exactly one of axis= or normal=")),
            };
            let offset = match a.take("offset")? {
                None => Offset::Center,
                Some(Value::Word(t)) if t.text == "center" => Offset::Center,
                Some(v) => Offset::Value(num(&v)?),
            };
            Command::CutAdd { view, orientation, offset }
        }
        "cut remove" => {
            Command::CutRemove { view: int(&a.require("view")?)?, index: optional(a.take("index")?, int)? }
        }
        "palette set" => {
            let target = target(&a.require("view")?)?;
            let v = a.require("name")?;
            let t = word(&v)?;
            let palette: Palette = t.text.parse().map_err(|e: crate::render::RenderError| err(t, e.to_string()))?;
            Command::PaletteSet { target, palette }
        }
        "opacity set" => {
            let target = target(&a.require("view")?)?;
            let points = a
                .take_all("point")
                .iter()
                .map(|v| tuple::<2>(v).map(|[s, o]| (s, o)))
                .collect::<Result<Vec<_>>>()?;
            if points.is_empty() {
                return Err(err(&a.verb, "opacity set needs at least one point=(scalar,opacity)"));
            }
            Command::OpacitySet { target, points }
        }
        "range set" => Command::RangeSet {
            view: int(&a.require("view")?)?,
            lo: num(&a.require("min")?)?,
            hi: num(&a.require("max")?)?,
        },
        "hist show" => Command::HistShow { view: int(&a.require("view")?)?, bins: optional(a.take("bins")?, int)? },
        "colorbar show" => Command::ColorbarShow { view: int(&a.require("view")?)? },
        "mode" => {
            let t = a.positional_word("camera|object|sync")?;
            Command::Mode(t.text.parse::<Mode>().map_err(|m| err(&t, m))?)
        }
        "camera set" => {
            let position = optional(a.take("position")?, tuple::<3>)?;
            let focal = optional(a.take("focal")?, tuple::<3>)?;
            let up = optional(a.take("up")?, tuple::<3>)?;
            let fov = optional(a.take("fov")?, num)?;
            if position.is_none() && focal.is_none() && up.is_none() && fov.is_none() {
                return Err(err(&a.verb, "camera set needs position=, focal=, up= or fov="));
            }
            Command::CameraSet { position, focal, up, fov }
        }
        "anim" => {
            let k = a.positional_word("rotate|orbit")?;
            let kind = match k.text.as_str() {
                "rotate" => AnimKind::Rotate,
                "orbit" => AnimKind::Orbit,
                other => return Err(err(&k, format!("unknown animation: {other}; expected rotate|orbit"))),
            };
            let axis = match a.require("axis")? {
                Value::Word(t) => ANIM_AXES
                    .iter()
                    .position(|x| *x == t.text)
                    .ok_or_else(|| err(&t, "animation axis must be x, y or z"))?,
                v => {
                    let i: usize = int(&v)?;
                    if i > 2 {
                        return Err(err(v.token(), "animation axis must be 0, 1 or 2"));
                    }
                    i
                }
            };
            let degrees = num(&a.require("degrees")?)?;
            let fv = a.require("frames")?;
            let frames: usize = int(&fv)?;
            if frames == 0 {
                return Err(err(fv.token(), "frames must be at least 1"));
            }
            Command::Anim { kind, axis, degrees, frames }
        }
        "snapshot" => {
            let path = a.positional_string("an output path")?;
            let size = match a.take("size")? {
                None => None,
                Some(Value::Dims(t, d)) if d.len() == 2 => {
                    if d.contains(&0) {
                        return Err(err(&t, "snapshot size must be positive"));
                    }
                    Some((d[0], d[1]))
                }
                Some(v) => return Err(err(v.token(), "expected size=WIDTHxHEIGHT")),
            };
            Command::Snapshot { path, size }
        }
        "source" => Command::Source { path: a.positional_string("a script path")? },
        "layout" => Command::Layout {
            cols: int(&a.require("cols")?)?,
            cell_width: num(&a.require("width")?)?,
            cell_height: num(&a.require("height")?)?,
        },
        other => unreachable!("verb table and builders disagree on {other}"),
    };
    a.finish()?;
    Ok(cmd)
}

fn reducer(v: &Value) -> Result<Reducer> {
    let t = word(v)?;
    t.text.parse().map_err(|e: crate::field::FieldError| err(t, e.to_string()))
}

/// Parses the tokens of one line (without newlines). Blank lines yield `None`.
fn parse_tokens(toks: Vec<Token>) -> Result<Option<Command>> {
    let mut c = Cursor { toks, pos: 0 };
    if c.at_end() {
        return Ok(None);
    }
    let (verb_tok, verb) = statement_verb(&mut c)?;
    let args = collect_args(&mut c, verb_tok)?;
    build(verb, args).map(Some)
}

/// Parses exactly one statement; comments and surrounding blank lines are allowed.
pub fn parse(text: &str) -> Result<Command> {
    let toks = tokenize(text)?;
    let end = toks.last().cloned().expect("token stream ends with End");
    let mut found: Option<Command> = None;
    for group in toks.split(|t| matches!(t.kind, TokenKind::Newline | TokenKind::End)) {
        if group.is_empty() {
            continue;
        }
        let mut line = group.to_vec();
        let last = line.last().unwrap();
        line.push(Token { kind: TokenKind::End, text: String::new(), line: last.line, column: last.column + last.text.chars().count(), spaced: true });
        if let Some(cmd) = parse_tokens(line)? {
            if found.is_some() {
                return Err(err(&group[0], "expected a single statement"));
            }
            found = Some(cmd);
        }
    }
    found.ok_or_else(|| err(&end, "empty statement"))
}

/// One line of a script: its 1-based number and the parsed statement, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptLine {
    pub line: usize,
    pub result: Result<Option<Command>>,
}

/// Parses each line independently so one bad line does not hide the others.
pub fn parse_script(text: &str) -> Vec<ScriptLine> {
    text.split('\n')
        .enumerate()
        .map(|(i, raw)| {
            let raw = raw.strip_suffix('\r').unwrap_or(raw);
            let line = i + 1;
            let result = tokenize(raw)
                .map(|toks| {
                    toks.into_iter()
                        .map(|mut t| {
                            t.line = line;
                            t
                        })
                        .collect()
                })
                .and_then(parse_tokens)
                .map_err(|mut e| {
                    e.line = line;
                    e
                });
            ScriptLine { line, result }
        })
        .collect()
}
