//! Textual model formats: CTWedge in both directions, ACTS and PICT export,
//! and JSON parameter dictionaries.

mod acts;
mod ctwedge;
mod dictionary;
mod pict;

pub use acts::export_acts;
pub use ctwedge::{expr_to_string, parse_ctwedge, print_ctwedge, ParseError, ParseErrorKind};
pub use dictionary::{Dictionary, DictionaryEntry, DictionaryError, EntryType};
pub use pict::export_pict;
