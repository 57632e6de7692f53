use std::fmt::Write as _;

use powerbetti::quasipoly::QuasiPolynomial;
use powerbetti::regions::{Region, RegionDecomposition};

/// `P`, `Q`, `R`, ... for chambers 0, 1, 2, ...
pub fn chamber_letter(c: usize) -> String {
    const LETTERS: &[u8] = b"PQRSUVWXYZ";
    match LETTERS.get(c) {
        Some(&b) => (b as char).to_string(),
        None => format!("C{c}"),
    }
}

/// Label of a region as a signed sum of shifted chamber pieces, e.g. `P1+P2+P3-P4`.
///
/// `first` is the number given to the first term of the module; `None` leaves terms
/// unnumbered.
pub fn region_label(dec: &RegionDecomposition, region: &Region, first: Option<usize>, shifts: &[[i64; 2]]) -> String {
    if region.terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, term) in region.terms.iter().enumerate() {
        let sign = if term.coefficient < 0 { "-" } else if k > 0 { "+" } else { "" };
        let mag = term.coefficient.unsigned_abs();
        let coeff = if mag == 1 { String::new() } else { mag.to_string() };
        let name = match term.chamber {
            Some(c) => chamber_letter(c),
            None => format!("B{}", dec.degrees.len()),
        };
        let num = match first {
            Some(f) => shifts
                .iter()
                .position(|s| *s == term.shift)
                .map(|p| (f + p).to_string())
                .unwrap_or_default(),
            None => String::new(),
        };
        write!(out, "{sign}{coeff}{name}{num}").unwrap();
    }
    out
}

/// `2t+3 <= mu < 2t+6`, with the top boundary written inclusively when it closes the support.
pub fn interval(dec: &RegionDecomposition, region: &Region) -> String {
    let lo = dec.breaks[region.lower];
    let hi = dec.breaks[region.upper];
    let emax = dec.degrees.iter().copied().max().unwrap_or(0);
    let emin = dec.degrees.iter().copied().min().unwrap_or(0);
    if hi.slope == emax && emax != emin {
        let closed = powerbetti::regions::Breakpoint {
            slope: hi.slope,
            intercept: hi.intercept - 1,
        };
        format!("{lo} <= mu <= {closed}")
    } else {
        format!("{lo} <= mu < {hi}")
    }
}

pub fn fmt_vec(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

pub fn qp_lines(q: &QuasiPolynomial, indent: &str) -> String {
    let mut out = String::new();
    for (r, p) in q.pieces() {
        writeln!(out, "{indent}{} : {p}", fmt_vec(&r)).unwrap();
    }
    out
}

pub fn regions_table(dec: &RegionDecomposition, title: &str, first: Option<usize>, shifts: &[[i64; 2]], pieces: bool) -> String {
    let mut out = String::new();
    writeln!(out, "{title}").unwrap();
    writeln!(out, "t0 = {}", dec.t0).unwrap();
    writeln!(out, "modulus D = {}", dec.modulus).unwrap();
    writeln!(out, "lattice basis columns = {:?}", dec.lattice.columns()).unwrap();
    writeln!(out, "lines:").unwrap();
    for (i, l) in dec.lines.iter().enumerate() {
        writeln!(out, "  L{i}: mu = {l}  through {}", fmt_vec(&l.origin)).unwrap();
    }
    writeln!(out, "regions (t >= t0):").unwrap();
    for r in &dec.regions {
        writeln!(out, "  {:<24} {}", interval(dec, r), region_label(dec, r, first, shifts)).unwrap();
        if pieces && !r.terms.is_empty() {
            out.push_str(&qp_lines(&r.piece, "      "));
        }
    }
    writeln!(out, "  otherwise                0").unwrap();
    out
}

pub fn regions_csv(dec: &RegionDecomposition, first: Option<usize>, shifts: &[[i64; 2]]) -> String {
    let mut out = String::from("region,lower,upper,label,residue_mu,residue_t,polynomial\n");
    for (k, r) in dec.regions.iter().enumerate() {
        let label = region_label(dec, r, first, shifts);
        for (res, p) in r.piece.pieces() {
            writeln!(
                out,
                "{k},{},{},{label},{},{},{p}",
                dec.breaks[r.lower], dec.breaks[r.upper], res[0], res[1]
            )
            .unwrap();
        }
    }
    out
}

const FILLS: [&str; 6] = ["#cfe3f7", "#f7dccf", "#d8f0d2", "#efe0f5", "#f5efc9", "#d2eeee"];

/// Static picture of the `(μ, t)` plane, `μ` to the right and `t` upward.
pub fn regions_svg(dec: &RegionDecomposition, first: Option<usize>, shifts: &[[i64; 2]], tmax: i64) -> String {
    let tmax = tmax.max(dec.t0 + 1);
    let mu_max = dec.breaks.iter().map(|b| b.at(tmax)).max().unwrap_or(1).max(1);
    let mu_min = dec.breaks.iter().map(|b| b.at(dec.t0)).min().unwrap_or(0).min(0);
    let sx = (900 / (mu_max - mu_min + 1)).max(2);
    let sy = (480 / (tmax + 1)).max(8);
    let margin = 40;
    let width = (mu_max - mu_min) * sx + 2 * margin + 160;
    let height = tmax * sy + 2 * margin;
    let x = |mu: i64| margin + (mu - mu_min) * sx;
    let y = |t: i64| height - margin - t * sy;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(out, r##"<rect width="{width}" height="{height}" fill="#ffffff"/>"##).unwrap();
    for (k, r) in dec.regions.iter().enumerate() {
        if r.terms.is_empty() {
            continue;
        }
        let (lo, hi) = (dec.breaks[r.lower], dec.breaks[r.upper]);
        writeln!(
            out,
            r#"<polygon points="{},{} {},{} {},{} {},{}" fill="{}" stroke="none"/>"#,
            x(lo.at(dec.t0)),
            y(dec.t0),
            x(lo.at(tmax)),
            y(tmax),
            x(hi.at(tmax)),
            y(tmax),
            x(hi.at(dec.t0)),
            y(dec.t0),
            FILLS[k % FILLS.len()]
        )
        .unwrap();
    }
    writeln!(
        out,
        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#000000"/>"##,
        x(mu_min),
        y(0),
        x(mu_max),
        y(0)
    )
    .unwrap();
    writeln!(
        out,
        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#000000"/>"##,
        x(0),
        y(0),
        x(0),
        y(tmax)
    )
    .unwrap();
    writeln!(out, r#"<text x="{}" y="{}">mu</text>"#, x(mu_max) + 6, y(0) + 4).unwrap();
    writeln!(out, r#"<text x="{}" y="{}">t</text>"#, x(0) - 4, y(tmax) - 8).unwrap();
    writeln!(
        out,
        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#888888" stroke-dasharray="4 3"/>"##,
        x(mu_min),
        y(dec.t0),
        x(mu_max),
        y(dec.t0)
    )
    .unwrap();
    writeln!(out, r#"<text x="{}" y="{}">t0 = {}</text>"#, x(mu_max) + 6, y(dec.t0) + 4, dec.t0).unwrap();
    for b in &dec.breaks {
        writeln!(
            out,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#333333"/>"##,
            x(b.at(dec.t0)),
            y(dec.t0),
            x(b.at(tmax)),
            y(tmax)
        )
        .unwrap();
    }
    let mut legend_y = margin;
    for (k, r) in dec.regions.iter().enumerate() {
        if r.terms.is_empty() {
            continue;
        }
        let label = region_label(dec, r, first, shifts);
        writeln!(
            out,
            r#"<rect x="{}" y="{}" width="10" height="10" fill="{}"/>"#,
            x(mu_max) + 40,
            legend_y - 9,
            FILLS[k % FILLS.len()]
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="{legend_y}">{}: {}</text>"#,
            x(mu_max) + 54,
            interval(dec, r).replace('<', "&lt;"),
            label
        )
        .unwrap();
        legend_y += 14;
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use powerbetti::rees::ci_shifts;
    use powerbetti::regions::region_decomposition;

    #[test]
    fn example_labels() {
        let s = ci_shifts(&[2, 3, 6]).unwrap();
        let dec = region_decomposition(s.tor(1).unwrap()).unwrap();
        let shifts = [[5, 1], [8, 1], [9, 1], [11, 2]];
        let labels: Vec<String> = dec
            .regions
            .iter()
            .map(|r| region_label(&dec, r, Some(1), &shifts))
            .collect();
        assert_eq!(
            labels,
            [
                "P1",
                "P1+P2",
                "P1+P2+P3-P4",
                "Q1+P2+P3-P4",
                "Q1+Q2+P3-Q4",
                "Q1+Q2+Q3-Q4",
                "Q2+Q3",
                "Q3"
            ]
        );
        assert_eq!(interval(&dec, &dec.regions[7]), "6t+3 <= mu <= 6t+3");
        assert_eq!(interval(&dec, &dec.regions[0]), "2t+3 <= mu < 2t+6");
    }

    #[test]
    fn svg_is_well_formed() {
        let s = ci_shifts(&[2, 3, 6]).unwrap();
        let dec = region_decomposition(s.tor(2).unwrap()).unwrap();
        let svg = regions_svg(&dec, Some(5), &[[11, 1]], 10);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polygon").count(), 2);
    }
}
