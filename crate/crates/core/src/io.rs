//! Instance files, statistics reports and SVG rendering of planar instances.
//!
//! Instance file layout, one record per line, fields separated by single
//! spaces:
//!
//! ```text
//! n m d seed
//! a_1 ... a_n b        (m rows: support rows first, then random rows)
//! c_1 ... c_n
//! ```
//!
//! Reals are written like C's `%.17g`, which round-trips every binary64.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use thiserror::Error;

use crate::geometry::{project_center, CenterPoint};
use crate::model::{GenerationStats, GeneratorParams, Inequality, LpInstance};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("header declares {expected} constraint rows but the file has {found}")]
    RowShortfall { expected: usize, found: usize },
}

fn parse_error(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        message: message.into(),
    }
}

/// Formats `x` the way C's `printf("%.17g", x)` does.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let fixed = format!("{x:.*}", (16 - exp) as usize);
        trim_fraction(&fixed).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn write_row<W: Write>(w: &mut W, values: impl Iterator<Item = f64>) -> std::io::Result<()> {
    let line = values.map(format_real).collect::<Vec<_>>().join(" ");
    writeln!(w, "{line}")
}

pub fn write_instance<W: Write>(inst: &LpInstance, w: &mut W) -> Result<(), IoError> {
    writeln!(
        w,
        "{} {} {} {}",
        inst.n(),
        inst.m(),
        inst.d(),
        inst.params.seed
    )?;
    for q in inst.constraints() {
        write_row(w, q.a.iter().copied().chain(std::iter::once(q.b)))?;
    }
    write_row(w, inst.objective.iter().copied())?;
    w.flush()?;
    Ok(())
}

/// Renders an instance file into a string.
pub fn instance_to_string(inst: &LpInstance) -> String {
    let mut buf = Vec::new();
    write_instance(inst, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Reads an instance file.
///
/// The file carries `n`, `d`, the seed and every number of the problem;
/// `alpha` is recovered from the first support row and `theta` from the last
/// objective coefficient. Parameters the file does not record (`rho`, the
/// likeness bounds, coefficient bounds, worker count and attempt budget) are
/// taken from `template`.
pub fn read_instance<R: BufRead>(
    reader: R,
    template: &GeneratorParams,
) -> Result<LpInstance, IoError> {
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            lines.push((i + 1, line));
        }
    }
    let Some((header_no, header)) = lines.first() else {
        return Err(parse_error(1, "empty file"));
    };
    let header: Vec<&str> = header.split_whitespace().collect();
    if header.len() != 4 {
        return Err(parse_error(
            *header_no,
            format!("header needs 4 fields `n m d seed`, found {}", header.len()),
        ));
    }
    let count = |i: usize, name: &str| -> Result<usize, IoError> {
        header[i].parse().map_err(|_| {
            parse_error(
                *header_no,
                format!("{name} is not a count: {:?}", header[i]),
            )
        })
    };
    let n = count(0, "n")?;
    let m = count(1, "m")?;
    let d = count(2, "d")?;
    let seed: u64 = header[3].parse().map_err(|_| {
        parse_error(
            *header_no,
            format!("seed is not an integer: {:?}", header[3]),
        )
    })?;
    if n == 0 {
        return Err(parse_error(*header_no, "n must be positive"));
    }
    if m != 2 * n + 1 + d {
        return Err(parse_error(
            *header_no,
            format!("m = {m} but 2n + 1 + d = {}", 2 * n + 1 + d),
        ));
    }
    let body = &lines[1..];
    // The last line is the objective.
    let rows_found = body.len().saturating_sub(1);
    if rows_found < m {
        return Err(IoError::RowShortfall {
            expected: m,
            found: rows_found,
        });
    }
    if rows_found > m {
        let (line_no, _) = body[m + 1];
        return Err(parse_error(line_no, "unexpected trailing line"));
    }

    let parse_reals = |line_no: usize, text: &str, expected: usize| -> Result<Vec<f64>, IoError> {
        let values = text
            .split_whitespace()
            .map(|token| {
                token
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_error(line_no, format!("not a number: {token:?}")))
            })
            .collect::<Result<Vec<f64>, IoError>>()?;
        if values.len() != expected {
            return Err(parse_error(
                line_no,
                format!("expected {expected} values, found {}", values.len()),
            ));
        }
        Ok(values)
    };

    let mut rows = Vec::with_capacity(m);
    for (line_no, text) in &body[..m] {
        let mut values = parse_reals(*line_no, text, n + 1)?;
        let b = values.pop().expect("n + 1 values");
        rows.push(Inequality::new(values, b));
    }
    let (objective_line, objective_text) = &body[m];
    let objective = parse_reals(*objective_line, objective_text, n)?;

    let random = rows.split_off(2 * n + 1);
    let params = GeneratorParams {
        n,
        d,
        seed,
        alpha: rows[0].b,
        theta: objective[n - 1],
        ..template.clone()
    };
    Ok(LpInstance {
        params,
        support: rows,
        random,
        objective,
    })
}

/// Key/value lines `key = value`.
pub fn write_stats<W: Write>(stats: &GenerationStats, w: &mut W) -> Result<(), IoError> {
    let entries: [(&str, u128); 9] = [
        ("candidates_drawn", stats.candidates_drawn.into()),
        ("accepted", stats.accepted.into()),
        ("rejected_distance", stats.rejected_distance.into()),
        ("rejected_objective", stats.rejected_objective.into()),
        ("rejected_similarity", stats.rejected_similarity.into()),
        (
            "coordinator_rejected_similarity",
            stats.coordinator_rejected_similarity.into(),
        ),
        ("discarded", stats.discarded.into()),
        ("rounds", stats.rounds.into()),
        ("wall_time_ms", stats.wall_time.as_millis()),
    ];
    for (key, value) in entries {
        writeln!(w, "{key} = {value}")?;
    }
    w.flush()?;
    Ok(())
}

/// Parses `key = value` lines back into a map.
pub fn read_stats<R: BufRead>(reader: R) -> Result<BTreeMap<String, u128>, IoError> {
    let mut out = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_error(i + 1, "expected `key = value`"))?;
        let value = value
            .trim()
            .parse()
            .map_err(|_| parse_error(i + 1, format!("not a count: {:?}", value.trim())))?;
        out.insert(key.trim().to_string(), value);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("only two-dimensional instances can be rendered, got n = {0}")]
    UnsupportedDimension(usize),
}

const SVG_PIXELS: f64 = 600.0;

/// Convex polygon cut out of `start` by the halfplanes `rows`
/// (Sutherland–Hodgman, one halfplane at a time).
pub fn clip_polygon(start: Vec<[f64; 2]>, rows: &[&Inequality]) -> Vec<[f64; 2]> {
    let mut poly = start;
    for q in rows {
        if poly.is_empty() {
            break;
        }
        let value = |p: &[f64; 2]| q.a[0] * p[0] + q.a[1] * p[1] - q.b;
        let mut next = Vec::with_capacity(poly.len() + 1);
        for i in 0..poly.len() {
            let cur = poly[i];
            let prev = poly[(i + poly.len() - 1) % poly.len()];
            let (vc, vp) = (value(&cur), value(&prev));
            if (vc <= 0.0) != (vp <= 0.0) {
                let t = vp / (vp - vc);
                next.push([
                    prev[0] + t * (cur[0] - prev[0]),
                    prev[1] + t * (cur[1] - prev[1]),
                ]);
            }
            if vc <= 0.0 {
                next.push(cur);
            }
        }
        poly = next;
    }
    dedup_ring(poly)
}

fn dedup_ring(poly: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let scale = poly
        .iter()
        .flat_map(|p| p.iter())
        .fold(1.0f64, |m, v| m.max(v.abs()));
    let near = |p: &[f64; 2], q: &[f64; 2]| {
        (p[0] - q[0]).abs() <= 1e-9 * scale && (p[1] - q[1]).abs() <= 1e-9 * scale
    };
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(poly.len());
    for p in poly {
        if out.last().is_none_or(|last| !near(last, &p)) {
            out.push(p);
        }
    }
    while out.len() > 1 && near(&out[0], out.last().expect("nonempty")) {
        out.pop();
    }
    out
}

/// Endpoints of a chord of length `2 * half_length` along the boundary line
/// of `q`, centered on the foot of the perpendicular from `h`.
fn boundary_segment(h: &CenterPoint, q: &Inequality, half_length: f64) -> ([f64; 2], [f64; 2]) {
    let foot = project_center(h, q).expect("rendered rows have nonzero normals");
    let norm = q.norm();
    let dir = [-q.a[1] / norm, q.a[0] / norm];
    (
        [
            foot[0] - half_length * dir[0],
            foot[1] - half_length * dir[1],
        ],
        [
            foot[0] + half_length * dir[0],
            foot[1] + half_length * dir[1],
        ],
    )
}

/// SVG picture of a planar instance.
///
/// Elements carry a `class` attribute: `feasible` (polygon), `support`,
/// `random` and `objective` (lines), `small-circle` and `large-circle`
/// (dashed circles of radius rho and theta around the hypercube center).
/// All coordinates are in problem space; a group transform flips the y axis.
pub fn render_svg(inst: &LpInstance) -> Result<String, RenderError> {
    let n = inst.n();
    if n != 2 {
        return Err(RenderError::UnsupportedDimension(n));
    }
    let p = &inst.params;
    let alpha = p.alpha;
    let h = CenterPoint::new(2, alpha);
    let lo = -alpha / 4.0;
    let span = alpha * 1.5;
    let f = format_real;

    let rows: Vec<&Inequality> = inst.constraints().collect();
    let big = 2.0 * alpha;
    let region = clip_polygon(
        vec![[-big, -big], [big, -big], [big, big], [-big, big]],
        &rows,
    );

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{px}" height="{px}" viewBox="{lo} {lo} {span} {span}">"#,
        px = SVG_PIXELS,
        lo = f(lo),
        span = f(span),
    );
    let _ = writeln!(
        svg,
        r#"<g transform="matrix(1 0 0 -1 0 {})" stroke-width="1.5" fill="none">"#,
        f(2.0 * lo + span)
    );
    let points = region
        .iter()
        .map(|v| format!("{},{}", f(v[0]), f(v[1])))
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(
        svg,
        r#"<polygon class="feasible" points="{points}" fill="red" fill-opacity="0.3" stroke="none"/>"#
    );
    for (class, color, list) in [
        ("support", "black", &inst.support),
        ("random", "red", &inst.random),
    ] {
        for q in list {
            let (s, e) = boundary_segment(&h, q, alpha);
            let _ = writeln!(
                svg,
                r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" vector-effect="non-scaling-stroke"/>"#,
                f(s[0]),
                f(s[1]),
                f(e[0]),
                f(e[1]),
            );
        }
    }
    let _ = writeln!(
        svg,
        r#"<line class="objective" x1="0" y1="0" x2="{}" y2="{}" stroke="purple" vector-effect="non-scaling-stroke"/>"#,
        f(inst.objective[0]),
        f(inst.objective[1]),
    );
    for (class, r) in [("small-circle", p.rho), ("large-circle", p.theta)] {
        let _ = writeln!(
            svg,
            r#"<circle class="{class}" cx="{c}" cy="{c}" r="{}" stroke="green" stroke-dasharray="4 4" vector-effect="non-scaling-stroke"/>"#,
            f(r),
            c = f(alpha / 2.0),
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}
