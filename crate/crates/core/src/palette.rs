//! Names, short codes and display swatches for group elements, plus the
//! two-piece addition table.

use std::collections::HashMap;
use std::io;

use serde::Serialize;

use crate::group::{ColorVector, GroupError, GroupParams, Residue};
use crate::multiset::Multiset;

/// Name and code used for the identity in every palette.
pub const IDENTITY_NAME: &str = "black/clear";
pub const IDENTITY_CODE: &str = "K";

struct Named {
    entries: &'static [u64],
    name: &'static str,
    code: &'static str,
    swatch: &'static str,
}

// Listed in the column order of the printed combination table.
const STANDARD_NAMES: &[Named] = &[
    Named { entries: &[0, 0, 0], name: IDENTITY_NAME, code: "K", swatch: "#1a1a1a" },
    Named { entries: &[1, 0, 0], name: "red", code: "R", swatch: "#d62728" },
    Named { entries: &[0, 0, 1], name: "blue", code: "B", swatch: "#1f5fd6" },
    Named { entries: &[0, 1, 0], name: "yellow", code: "Y", swatch: "#f2d024" },
    Named { entries: &[1, 0, 1], name: "purple", code: "P", swatch: "#8e44ad" },
    Named { entries: &[1, 1, 0], name: "orange", code: "O", swatch: "#f28c28" },
    Named { entries: &[0, 1, 1], name: "green", code: "G", swatch: "#2ca02c" },
    Named { entries: &[1, 1, 1], name: "white", code: "W", swatch: "#f5f5f5" },
];

// Lexicographic order: (0,0), (0,1), ..., (2,2).
const MOD3_PAIR_NAMES: &[Named] = &[
    Named { entries: &[0, 0], name: IDENTITY_NAME, code: "K", swatch: "#1a1a1a" },
    Named { entries: &[0, 1], name: "light blue", code: "LB", swatch: "#8fb8f0" },
    Named { entries: &[0, 2], name: "dark blue", code: "DB", swatch: "#1d3f8f" },
    Named { entries: &[1, 0], name: "light red", code: "LR", swatch: "#f29a9a" },
    Named { entries: &[1, 1], name: "light purple", code: "LP", swatch: "#c9a6e4" },
    Named { entries: &[1, 2], name: "bluish purple", code: "BP", swatch: "#5b4bb5" },
    Named { entries: &[2, 0], name: "dark red", code: "DR", swatch: "#9b1c1c" },
    Named { entries: &[2, 1], name: "reddish purple", code: "RP", swatch: "#a8397f" },
    Named { entries: &[2, 2], name: "dark purple", code: "DP", swatch: "#4a1f5c" },
];

/// Bijection between group elements and display names / short codes.
///
/// `(2,3)` and `(3,2)` carry hand-picked names; every other group uses
/// systematic codes `C(v1,...,vn)` with `K` reserved for the identity.
#[derive(Clone, Debug)]
pub struct Palette {
    params: GroupParams,
    named: Option<&'static [Named]>,
    by_code: HashMap<&'static str, u64>,
    by_index: HashMap<u64, usize>,
}

impl std::fmt::Debug for Named {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code)
    }
}

impl Palette {
    pub fn standard(params: GroupParams) -> Palette {
        let named = match (params.m(), params.n()) {
            (2, 3) => Some(STANDARD_NAMES),
            (3, 2) => Some(MOD3_PAIR_NAMES),
            _ => None,
        };
        let mut by_code = HashMap::new();
        let mut by_index = HashMap::new();
        for (pos, entry) in named.into_iter().flatten().enumerate() {
            let index = entry.entries.iter().fold(0, |acc, &e| acc * params.m() as u64 + e);
            by_code.insert(entry.code, index);
            by_index.insert(index, pos);
        }
        Palette { params, named, by_code, by_index }
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    /// Number of colors, `m^n`.
    pub fn size(&self) -> u64 {
        self.params.order()
    }

    fn entry<R: Residue>(&self, color: &ColorVector<R>) -> Option<&'static Named> {
        let named = self.named?;
        self.by_index.get(&color.index()).map(|&pos| &named[pos])
    }

    pub fn name<R: Residue>(&self, color: &ColorVector<R>) -> String {
        match self.entry(color) {
            Some(e) => e.name.to_string(),
            None if color.is_identity() => IDENTITY_NAME.to_string(),
            None => systematic(color),
        }
    }

    pub fn code<R: Residue>(&self, color: &ColorVector<R>) -> String {
        match self.entry(color) {
            Some(e) => e.code.to_string(),
            None if color.is_identity() => IDENTITY_CODE.to_string(),
            None => systematic(color),
        }
    }

    /// Hex swatch for rendering. Unnamed groups get a hue spread over the
    /// element rank.
    pub fn swatch<R: Residue>(&self, color: &ColorVector<R>) -> String {
        if let Some(e) = self.entry(color) {
            return e.swatch.to_string();
        }
        if color.is_identity() {
            return "#1a1a1a".to_string();
        }
        let t = color.index() as f64 / self.params.order() as f64;
        let (r, g, b) = hue_to_rgb(t);
        format!("#{r:02x}{g:02x}{b:02x}")
    }

    pub fn parse<R: Residue>(&self, code: &str) -> Result<ColorVector<R>, GroupError> {
        let unknown = || GroupError::UnknownCode(code.to_string());
        if code == IDENTITY_CODE {
            return Ok(self.params.identity());
        }
        if self.named.is_some() {
            let index = *self.by_code.get(code).ok_or_else(unknown)?;
            return Ok(self.params.element_at(index));
        }
        let inner = code.strip_prefix("C(").and_then(|s| s.strip_suffix(')')).ok_or_else(unknown)?;
        let entries = inner
            .split(',')
            .map(|s| s.trim().parse::<u64>().map_err(|_| unknown()))
            .collect::<Result<Vec<_>, _>>()?;
        let color = ColorVector::new(self.params, &entries)?;
        if color.is_identity() {
            return Err(unknown());
        }
        Ok(color)
    }

    /// Every element in display order: the named order where one exists,
    /// otherwise lexicographic.
    pub fn colors<R: Residue>(&self) -> Vec<ColorVector<R>> {
        match self.named {
            Some(named) => named
                .iter()
                .map(|e| ColorVector::new(self.params, e.entries).expect("palette entry"))
                .collect(),
            None => self.params.elements().collect(),
        }
    }

    /// Codes of every piece, repeated by multiplicity, in canonical order.
    pub fn codes<R: Residue>(&self, pieces: &Multiset<R>) -> Vec<String> {
        pieces.iter().map(|c| self.code(c)).collect()
    }

    pub fn parse_all<R: Residue, S: AsRef<str>>(&self, codes: &[S]) -> Result<Multiset<R>, GroupError> {
        codes.iter().map(|c| self.parse(c.as_ref())).collect()
    }

    /// Serializable description shipped to clients.
    pub fn describe<R: Residue>(&self) -> PaletteDescription {
        let colors: Vec<ColorVector<R>> = self.colors();
        let table = AdditionTable::over(&colors);
        PaletteDescription {
            m: self.params.m(),
            n: self.params.n(),
            colors: colors
                .iter()
                .map(|c| PaletteColor {
                    code: self.code(c),
                    name: self.name(c),
                    entries: (0..self.params.n()).map(|i| c.entry(i)).collect(),
                    swatch: self.swatch(c),
                })
                .collect(),
            table: table.cells.iter().map(|row| row.iter().map(|c| self.code(c)).collect()).collect(),
        }
    }
}

fn systematic<R: Residue>(color: &ColorVector<R>) -> String {
    format!("C{color}")
}

fn hue_to_rgb(t: f64) -> (u8, u8, u8) {
    let h = (t * 6.0) % 6.0;
    let x = 1.0 - ((h % 2.0) - 1.0).abs();
    let (r, g, b) = match h as u32 {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        4 => (x, 0.0, 1.0),
        _ => (1.0, 0.0, x),
    };
    let scale = |v: f64| (60.0 + v * 170.0) as u8;
    (scale(r), scale(g), scale(b))
}

#[derive(Clone, Debug, Serialize)]
pub struct PaletteColor {
    pub code: String,
    pub name: String,
    pub entries: Vec<u64>,
    pub swatch: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PaletteDescription {
    pub m: u32,
    pub n: usize,
    pub colors: Vec<PaletteColor>,
    /// `table[i][j]` is the code of `colors[i] + colors[j]`.
    pub table: Vec<Vec<String>>,
}

/// Full `m^n x m^n` table of two-piece sums, rows and columns in palette
/// display order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditionTable<R> {
    pub colors: Vec<ColorVector<R>>,
    pub cells: Vec<Vec<ColorVector<R>>>,
}

impl<R: Residue> AdditionTable<R> {
    pub fn new(palette: &Palette) -> Self {
        Self::over(&palette.colors())
    }

    /// Table over an explicit list of colors.
    pub fn over(colors: &[ColorVector<R>]) -> Self {
        let cells = colors.iter().map(|a| colors.iter().map(|b| a + b).collect()).collect();
        AdditionTable { colors: colors.to_vec(), cells }
    }

    pub fn get(&self, a: &ColorVector<R>, b: &ColorVector<R>) -> Option<&ColorVector<R>> {
        let i = self.colors.iter().position(|c| c == a)?;
        let j = self.colors.iter().position(|c| c == b)?;
        Some(&self.cells[i][j])
    }

    pub fn is_symmetric(&self) -> bool {
        let k = self.colors.len();
        (0..k).all(|i| (0..k).all(|j| self.cells[i][j] == self.cells[j][i]))
    }

    /// Writes the table as CSV with a header row and column of short codes.
    pub fn write_csv<W: io::Write>(&self, palette: &Palette, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["+".to_string()];
        header.extend(self.colors.iter().map(|c| palette.code(c)));
        w.write_record(&header)?;
        for (color, row) in self.colors.iter().zip(&self.cells) {
            let mut record = vec![palette.code(color)];
            record.extend(row.iter().map(|c| palette.code(c)));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }
}
