//! Self-checks of the color arithmetic against the printed combination
//! table, the standard identities, the group axioms and the setup formulas.

use std::fmt;

use crate::group::{fano_lines, sum_colors, ColorVector, GroupParams, Residue};
use crate::palette::{AdditionTable, Palette};
use crate::rules::{deal_size, GameConfig, GameRng, STANDARD_COPIES};

/// The two-piece combination table as printed for the eight-color game:
/// a header row of column colors, then one row per color.
pub const REFERENCE_TABLE: &str = "\
Color K R B Y P O G W
K K R B Y P O G W
R R K P O B Y W G
B B P K G R W Y O
Y Y O G K W R B P
P P B R W K G O Y
O O Y W R G K P B
G G W Y B O P K R
W W G O P Y B R K
";

/// Multi-piece sums every player is expected to know, as (pieces, sum).
pub const IDENTITIES: &[(&[&str], &str)] = &[
    (&["Y", "O"], "R"),
    (&["B", "P"], "R"),
    (&["G", "W"], "R"),
    (&["Y", "P", "G"], "R"),
    (&["O", "P", "W"], "R"),
    (&["R", "B", "P"], "K"),
    (&["R", "O"], "Y"),
    (&["Y", "O"], "R"),
    (&["B", "P"], "R"),
    (&["R", "P"], "B"),
    (&["B", "G"], "Y"),
    (&["Y", "G"], "B"),
    (&["G", "O"], "P"),
    (&["O", "P"], "G"),
    (&["P", "G"], "O"),
];

/// Random triples used for associativity when exhaustive checking is not
/// requested.
pub const ASSOCIATIVITY_SAMPLES: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub failures: Vec<String>,
}

impl Check {
    fn new(name: impl Into<String>, detail: String, failures: Vec<String>) -> Self {
        Check { name: name.into(), passed: failures.is_empty(), detail, failures }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", if self.passed { "ok" } else { "FAIL" }, self.name, self.detail)?;
        for failure in &self.failures {
            write!(f, "\n    {failure}")?;
        }
        Ok(())
    }
}

/// Deliberate corruption used to exercise the failure path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Overwrite one generated table cell before comparing.
    TableCell,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

/// Parses [`REFERENCE_TABLE`] into (column codes, rows of (row code, cells)).
pub fn reference_table() -> (Vec<&'static str>, Vec<(&'static str, Vec<&'static str>)>) {
    let mut lines = REFERENCE_TABLE.lines();
    let header: Vec<&str> = lines.next().expect("header").split_whitespace().skip(1).collect();
    let rows = lines
        .map(|l| {
            let mut it = l.split_whitespace();
            let row = it.next().expect("row label");
            (row, it.collect())
        })
        .collect();
    (header, rows)
}

/// Compares a generated table with the printed one, entry by entry.
pub fn check_table<R: Residue>(table: &AdditionTable<R>, palette: &Palette) -> Check {
    let (header, rows) = reference_table();
    let mut failures = Vec::new();
    let mut matched = 0;
    let mut total = 0;
    for (row, cells) in &rows {
        for (col, expected) in header.iter().zip(cells) {
            total += 1;
            let (Ok(a), Ok(b)) = (palette.parse::<R>(row), palette.parse::<R>(col)) else {
                failures.push(format!("{row} + {col}: unknown code"));
                continue;
            };
            match table.get(&a, &b).map(|c| palette.code(c)) {
                Some(got) if got == *expected => matched += 1,
                Some(got) => failures.push(format!("{row} + {col}: generated {got}, printed {expected}")),
                None => failures.push(format!("{row} + {col}: missing from generated table")),
            }
        }
    }
    Check::new("combination table", format!("{matched}/{total} table entries match"), failures)
}

pub fn check_identities() -> Check {
    let palette = Palette::standard(GroupParams::STANDARD);
    let mut failures = Vec::new();
    for (pieces, expected) in IDENTITIES {
        let colors = palette.parse_all::<u8, _>(pieces).expect("standard codes");
        let sum = palette.code(&colors.sum(GroupParams::STANDARD).expect("same group"));
        if sum != *expected {
            failures.push(format!("{} = {sum}, expected {expected}", pieces.join(" + ")));
        }
    }
    Check::new("worked identities", format!("{}/{} identities hold", IDENTITIES.len() - failures.len(), IDENTITIES.len()), failures)
}

/// Closure, identity, inverses and commutativity exhaustively;
/// associativity exhaustively or on `samples` random triples.
pub fn check_axioms(params: GroupParams, samples: Option<usize>, seed: u64) -> Check {
    let elements: Vec<ColorVector<u32>> = params.elements().collect();
    let k = params.identity();
    let m = params.m() as u64;
    let mut failures = Vec::new();
    let note = |failures: &mut Vec<String>, msg: String| {
        if failures.len() < 10 {
            failures.push(msg);
        }
    };
    for a in &elements {
        if &(a + &k) != a || &(&k + a) != a {
            note(&mut failures, format!("{a} + K != {a}"));
        }
        let inv = a.inverse();
        if (a + &inv) != k {
            note(&mut failures, format!("{a} + {inv} != K"));
        }
        if m == 2 && (a + a) != k {
            note(&mut failures, format!("{a} is not its own inverse"));
        }
        for b in &elements {
            let s = a + b;
            if s.params() != params || (0..params.n()).any(|i| s.entry(i) >= m) {
                note(&mut failures, format!("{a} + {b} leaves the group"));
            }
            if s != b + a {
                note(&mut failures, format!("{a} + {b} != {b} + {a}"));
            }
        }
    }
    let assoc = |a: &ColorVector<u32>, b: &ColorVector<u32>, c: &ColorVector<u32>| &(a + b) + c == a + &(b + c);
    let triples = match samples {
        None => {
            for a in &elements {
                for b in &elements {
                    for c in &elements {
                        if !assoc(a, b, c) {
                            note(&mut failures, format!("({a} + {b}) + {c} != {a} + ({b} + {c})"));
                        }
                    }
                }
            }
            elements.len().pow(3)
        }
        Some(samples) => {
            let mut rng = GameRng::seeded(seed);
            for _ in 0..samples {
                let mut pick = || &elements[rng.index(elements.len()) as usize];
                let (a, b, c) = (pick(), pick(), pick());
                if !assoc(a, b, c) {
                    note(&mut failures, format!("({a} + {b}) + {c} != {a} + ({b} + {c})"));
                }
            }
            samples
        }
    };
    let how = if samples.is_some() { "random" } else { "all" };
    Check::new(
        format!("group axioms {params}"),
        format!("{} elements, associativity on {how} {triples} triples", elements.len()),
        failures,
    )
}

pub fn check_formulas() -> Check {
    let mut failures = Vec::new();
    let mut parts = Vec::new();
    for (m, n, expected) in [(2, 3, 13), (2, 4, 29), (3, 2, 23)] {
        let params = GroupParams::new(m, n).expect("valid");
        let got = deal_size(params);
        parts.push(format!("deal {params} = {got}"));
        if got != expected {
            failures.push(format!("deal size {params}: {got}, expected {expected}"));
        }
    }
    let pool = GameConfig::standard(2, 0).expect("standard").pool_total();
    parts.push(format!("pool = {pool}"));
    if pool != 70 || STANDARD_COPIES != 10 {
        failures.push(format!("standard pool {pool}, expected 70"));
    }
    for (m, n) in [(2, 3), (2, 4), (3, 2)] {
        let params = GroupParams::new(m, n).expect("valid");
        let spectrum = params.spectrum::<u32>();
        let sum = sum_colors(params, &spectrum).expect("same group");
        if !sum.is_identity() || spectrum.len() != params.n() + 1 {
            failures.push(format!("Spectrum of {params} sums to {sum}"));
        }
    }
    parts.push("Spectrum sums to K".into());
    Check::new("setup formulas", parts.join(", "), failures)
}

pub fn check_fano() -> Check {
    let params = GroupParams::STANDARD;
    let palette = Palette::standard(params);
    let lines = fano_lines::<u8>(params).expect("standard group");
    let mut failures = Vec::new();
    if lines.len() != 7 {
        failures.push(format!("{} lines, expected 7", lines.len()));
    }
    for line in &lines {
        let sum = sum_colors(params, line).expect("same group");
        if !sum.is_identity() {
            let codes: Vec<_> = line.iter().map(|c| palette.code(c)).collect();
            failures.push(format!("line {} sums to {}", codes.join(""), palette.code(&sum)));
        }
    }
    for point in params.elements::<u8>().filter(|c| !c.is_identity()) {
        let on = lines.iter().filter(|l| l.contains(&point)).count();
        if on != 3 {
            failures.push(format!("{} lies on {on} lines", palette.code(&point)));
        }
    }
    let rendered: Vec<String> = lines.iter().map(|l| l.iter().map(|c| palette.code(c)).collect()).collect();
    Check::new("Fano plane", format!("lines {}", rendered.join(" ")), failures)
}

/// Runs every check. `fault` corrupts the generated table first.
pub fn run_all(fault: Option<Fault>) -> Report {
    let palette = Palette::standard(GroupParams::STANDARD);
    let mut table = AdditionTable::<u8>::new(&palette);
    if fault == Some(Fault::TableCell) {
        let last = table.colors.len() - 1;
        table.cells[1][last] = table.cells[1][1].clone();
    }
    let p = |m, n| GroupParams::new(m, n).expect("valid");
    Report {
        checks: vec![
            check_table(&table, &palette),
            check_identities(),
            check_axioms(p(2, 3), None, 0),
            check_axioms(p(2, 4), None, 0),
            check_axioms(p(3, 2), Some(ASSOCIATIVITY_SAMPLES), 0x5eed),
            check_formulas(),
            check_fano(),
        ],
    }
}
