//! ASCII and plain-PGM renders of 2D box patterns.

use std::fmt::Write as _;

use tilings::{Pattern, Point};

/// ASCII render of a total 2D box pattern, top row first: `.` for symbol 0,
/// `#` for symbol 1, the token's first character beyond.
pub fn ascii(p: &Pattern) -> String {
    let b = p.support_box();
    let mut out = String::new();
    for y in (b.lo().0[1]..=b.hi().0[1]).rev() {
        for x in b.lo().0[0]..=b.hi().0[0] {
            let ch = match p.get(&Point::new(vec![x, y])) {
                Some(s) if s.0 == 0 => '.',
                Some(s) if s.0 == 1 => '#',
                Some(s) => p.alphabet().token(s).chars().next().unwrap_or('?'),
                None => ' ',
            };
            out.push(ch);
        }
        out.push('\n');
    }
    out
}

/// Plain (P2) PGM render: symbol ids spread over the gray range, 0 mapped
/// to white and the last symbol to black.
pub fn pgm(p: &Pattern) -> String {
    let b = p.support_box();
    let w = b.side(0);
    let h = b.side(1);
    let n = p.alphabet().len().max(2) as u32;
    let mut out = String::new();
    writeln!(out, "P2").unwrap();
    writeln!(out, "{w} {h}").unwrap();
    writeln!(out, "255").unwrap();
    for y in (b.lo().0[1]..=b.hi().0[1]).rev() {
        let row: Vec<String> = (b.lo().0[0]..=b.hi().0[0])
            .map(|x| match p.get(&Point::new(vec![x, y])) {
                Some(s) => (255 - s.0 * 255 / (n - 1)).to_string(),
                None => "255".to_string(),
            })
            .collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}
