//! Codebook files: `{"n_t": .., "l": .., "words": [[[re, im], ...], ...]}`,
//! one array of rows per word.

use std::path::Path;

use serde::{Deserialize, Serialize};
use wishart_stc::{Codebook, Complex64, ComplexMatrix};

use crate::document::to_json;
use crate::CliError;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodebookFile {
    n_t: usize,
    l: usize,
    words: Vec<Vec<Vec<[f64; 2]>>>,
}

fn parse_err(path: &Path, msg: impl std::fmt::Display) -> CliError {
    CliError::Parse(format!("{}: {msg}", path.display()))
}

/// Parses a codebook document. Structural problems (bad JSON, ragged rows,
/// wrong dimensions) are parse errors; duplicate words are validation errors.
pub fn parse_codebook(text: &str, path: &Path) -> Result<Codebook, CliError> {
    let file: CodebookFile = serde_json::from_str(text).map_err(|e| parse_err(path, e))?;
    let mut words = Vec::with_capacity(file.words.len());
    for (k, rows) in file.words.iter().enumerate() {
        if rows.len() != file.n_t {
            return Err(parse_err(path, format!("words[{k}]: {} rows, n_t is {}", rows.len(), file.n_t)));
        }
        let mut data = Vec::with_capacity(file.n_t * file.l);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != file.l {
                return Err(parse_err(path, format!("words[{k}][{r}]: {} entries, l is {}", row.len(), file.l)));
            }
            data.extend(row.iter().map(|&[re, im]| Complex64::new(re, im)));
        }
        let m = ComplexMatrix::from_vec(file.n_t, file.l, data).map_err(|e| parse_err(path, format!("words[{k}]: {e}")))?;
        words.push(m);
    }
    Codebook::new(words).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

pub fn load_codebook(path: &Path) -> Result<Codebook, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_codebook(&text, path)
}

pub fn codebook_to_json(book: &Codebook) -> Vec<u8> {
    let file = CodebookFile {
        n_t: book.n_t(),
        l: book.l(),
        words: book
            .words()
            .iter()
            .map(|w| (0..w.rows()).map(|r| w.row(r).iter().map(|z| [z.re, z.im]).collect()).collect())
            .collect(),
    };
    to_json(&file).expect("codebook entries are finite")
}

pub fn save_codebook(book: &Codebook, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, codebook_to_json(book)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
