//! Built-in datasets, exactly as printed in the source analyses.

use crate::circular::Angle;
use crate::editdist::WordForm;
use crate::error::{Error, Result};

/// Spellings of "old" recorded in the Linguistic Atlas of Late Mediaeval English.
pub const LALME_OLD: [&str; 25] = [
    "aeld", "aelde", "ald", "alde", "alld", "aulde", "awlde", "eeld", "eelde", "eld", "elde",
    "hald", "halde", "held", "helde", "hold", "holde", "hoolde", "old", "olde", "oold", "oolde",
    "ould", "wold", "woold",
];

/// The forms of "old" used by Chaucer.
pub const CHAUCER_OLD: [&str; 4] = ["olde", "old", "oold", "oolde"];

/// Six noisy angles near multiples of π/3.
#[allow(clippy::approx_constant)]
pub const PENNEC6: [f64; 6] = [-2.12, -1.08, 0.016, 0.99, 2.08, 3.14];

pub const WORD_DATASETS: [&str; 2] = ["lalme_old", "chaucer_old"];
pub const ANGLE_DATASETS: [&str; 1] = ["pennec6"];

pub fn word_forms(name: &str) -> Result<Vec<WordForm>> {
    let forms: &[&str] = match name {
        "lalme_old" => &LALME_OLD,
        "chaucer_old" => &CHAUCER_OLD,
        _ => {
            return Err(Error::UnknownDataset {
                name: name.to_string(),
                valid: WORD_DATASETS.join(", "),
            })
        }
    };
    Ok(forms.iter().map(|s| WordForm::ingest(s).expect("nonempty")).collect())
}

pub fn angles(name: &str) -> Result<Vec<Angle>> {
    match name {
        "pennec6" => Ok(PENNEC6.iter().map(|&a| Angle::new(a)).collect()),
        _ => Err(Error::UnknownDataset {
            name: name.to_string(),
            valid: ANGLE_DATASETS.join(", "),
        }),
    }
}
